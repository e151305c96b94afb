//! One runner per subcommand.  Each builds its objects from the scenario,
//! measures, gates the measurements against `--tol`, and assembles the JSON
//! report body.  Construction errors are invalid input; gate misses are
//! ordinary failed runs.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hig_core::{
    bernstein_verdict_with, calibrate_verdict, dgn_witness, first_variation, perturbed_area,
    product_test_function, standard_battery, transported_witness, variation_report,
    witness_sweep, Admissibility, BernsteinVerdict, CharacteristicChart, DomainVerdict,
    Error as CoreError, GraphFunction, VariationReport,
};

use crate::report::{CsvSeries, Outcome};
use crate::scenario::{
    quad_or_default, AreaScenario, BernsteinExpectation, BernsteinScenario, CalibrationScenario,
    CharsScenario, VariationScenario,
};

/// Area over a window, with optional dilation rows checking the cubic (or
/// higher, for n > 1) homogeneity ratio against `--tol` in relative terms.
pub fn run_area(s: &AreaScenario, base: &Path, tol: f64) -> Result<Outcome> {
    let graph = s.graph.build(base)?;
    let window = s.window.build()?;
    let spec = quad_or_default(&s.quadrature)?;
    let base = graph.area(&window, &spec).context("area integration")?;
    let power = (2 * graph.n() + 1) as i32;

    let mut rows = Vec::new();
    let mut series = CsvSeries::new("dilations", vec!["lambda", "area", "ratio"]);
    let mut max_defect = 0.0f64;
    for &lam in &s.dilations {
        if !(lam > 0.0) || !lam.is_finite() {
            bail!("dilation factors must be positive, got {lam}");
        }
        let mut factors = vec![lam; 2 * graph.n()];
        *factors.last_mut().unwrap() = lam * lam;
        let scaled_window = window.scaled(&factors)?;
        let area = graph.dilate(lam)?.area(&scaled_window, &spec)?;
        let ratio = area / base;
        let target = lam.powi(power);
        let defect = (ratio - target).abs() / target;
        max_defect = max_defect.max(defect);
        series.push(vec![lam, area, ratio]);
        rows.push(json!({
            "lambda": lam,
            "area": area,
            "ratio": ratio,
            "target": target,
            "relative_defect": defect,
        }));
    }

    let passed = max_defect <= tol;
    let report = json!({
        "area": base,
        "homogeneity_power": power,
        "dilations": rows,
        "max_relative_defect": if s.dilations.is_empty() { Value::Null } else { json!(max_defect) },
        "tolerance": tol,
    });
    let mut outcome = Outcome::new(passed, report);
    if !s.dilations.is_empty() {
        outcome = outcome.with_series(series);
    }
    Ok(outcome)
}

fn admissibility_json(a: &Admissibility) -> Value {
    match a {
        Admissibility::Admissible => json!({ "status": "admissible" }),
        Admissibility::Violated { c, b_prime_sq, two_a_prime } => json!({
            "status": "violated",
            "c": c,
            "b_prime_sq": b_prime_sq,
            "two_a_prime": two_a_prime,
        }),
    }
}

fn domain_tag(v: &DomainVerdict) -> &'static str {
    match v {
        DomainVerdict::AllOfPlane { .. } => "all_of_plane",
        DomainVerdict::ProperSubset { .. } => "proper_subset",
        DomainVerdict::Inadmissible { .. } => "inadmissible",
        DomainVerdict::Undetermined { .. } => "undetermined",
    }
}

fn domain_json(v: &DomainVerdict) -> Value {
    match v {
        DomainVerdict::AllOfPlane { evidence } => {
            json!({ "verdict": "all_of_plane", "evidence": evidence })
        }
        DomainVerdict::ProperSubset { description } => {
            json!({ "verdict": "proper_subset", "description": description })
        }
        DomainVerdict::Inadmissible { c, b_prime_sq, two_a_prime } => json!({
            "verdict": "inadmissible",
            "c": c,
            "b_prime_sq": b_prime_sq,
            "two_a_prime": two_a_prime,
        }),
        DomainVerdict::Undetermined { detail } => {
            json!({ "verdict": "undetermined", "detail": detail })
        }
    }
}

/// Chart diagnostics: admissibility scan, domain verdict (optionally matched
/// against an expectation), inversion round trip gated at `--tol`, and the
/// transport residuals of the synthesized slope field.
pub fn run_chars(s: &CharsScenario, base: &Path, tol: f64) -> Result<Outcome> {
    let data = s.data.build(base)?;
    let window = s.window.build()?;
    if window.dim() != 2 {
        bail!("characteristics window must be 2-dimensional (x, t)");
    }
    if s.counts.len() != 2 || s.counts.iter().any(|&c| c < 2) {
        bail!("counts must be two entries of at least 2");
    }

    let adm = data.admissibility(101);
    let verdict = data.classify_domain();
    let mut report = json!({
        "label": data.label(),
        "admissibility": admissibility_json(&adm),
        "domain": domain_json(&verdict),
        "tolerance": tol,
    });

    let mut passed = true;
    if let Some(expect) = s.expect_domain {
        let matched = expect.as_str() == domain_tag(&verdict);
        passed &= matched;
        report["expected_domain"] = json!(expect.as_str());
        report["domain_matches"] = json!(matched);
    }

    // The probe is informational: a refused inversion is the interesting
    // output for degenerate data, so it never gates the run.
    if let Some([x, t]) = s.probe {
        let chart = CharacteristicChart::new(data.clone());
        report["probe"] = match chart.invert(x, t) {
            Ok(c) => json!({ "x": x, "t": t, "status": "inverted", "c": c }),
            Err(e) => json!({ "x": x, "t": t, "status": "refused", "reason": e.to_string() }),
        };
    }

    // Inversion and transport only make sense on admissible data; the chart
    // refuses them by design otherwise.
    if matches!(adm, Admissibility::Admissible) {
        let chart = CharacteristicChart::new(data.clone());
        let mut roundtrip = 0.0f64;
        let mut inverted = 0usize;
        let mut skipped = 0usize;
        for p in window.lattice(&s.counts) {
            let (x, t) = (p[0], p[1]);
            match chart.invert(x, t) {
                Ok(c) => {
                    roundtrip = roundtrip.max((chart.x_of(c, t) - x).abs());
                    inverted += 1;
                }
                Err(CoreError::OutsideImage { .. }) | Err(CoreError::DegenerateChart { .. }) => {
                    skipped += 1;
                }
                Err(e) => return Err(e).context("chart inversion"),
            }
        }
        if inverted == 0 {
            bail!("no lattice point of the window was invertible");
        }
        passed &= roundtrip <= tol;

        let u = chart.u_field();
        let burgers = hig_core::InitialData::burgers_residual(
            &u,
            Some(&chart),
            &window,
            &s.counts,
            s.fd_step,
        )
        .context("transport residual")?;
        report["roundtrip"] = json!({
            "max_defect": roundtrip,
            "inverted": inverted,
            "skipped": skipped,
        });
        report["transport"] = json!({
            "transport_defect": burgers.transport_defect,
            "nested_defect": burgers.nested_defect,
        });
    }

    Ok(Outcome::new(passed, report))
}

/// First and second variation over the standard bump battery; the first
/// variation is gated at `--tol`, the second only when the scenario demands
/// stability.  Random planes, when requested, must be critical and stable.
pub fn run_vary(s: &VariationScenario, base: &Path, tol: f64, seed: u64) -> Result<Outcome> {
    let graph = s.graph.build(base)?;
    let window = s.window.build()?;
    let spec = quad_or_default(&s.quadrature)?;
    let battery = standard_battery(&window)?;

    let mut members = Vec::with_capacity(battery.len());
    let mut max_g1 = 0.0f64;
    let mut min_g2 = f64::INFINITY;
    for psi in &battery {
        let m = variation_report(&graph, psi, &spec)?;
        max_g1 = max_g1.max(m.g1.abs());
        min_g2 = min_g2.min(m.g2);
        members.push(m);
    }
    let mut passed = max_g1 <= tol;
    if s.require_stability {
        passed &= min_g2 >= -tol;
    }
    let mut report = json!({
        "battery": members,
        "battery_size": battery.len(),
        "max_first_variation": max_g1,
        "min_second_variation": min_g2,
        "require_stability": s.require_stability,
        "tolerance": tol,
    });

    if s.random_planes > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut plane_g1 = 0.0f64;
        let mut plane_g2 = f64::INFINITY;
        for _ in 0..s.random_planes {
            let w = rng.gen_range(-2.0..2.0);
            let c = rng.gen_range(-2.0..2.0);
            let plane = GraphFunction::affine(w, c)?;
            for psi in &battery {
                let m = variation_report(&plane, psi, &spec)?;
                plane_g1 = plane_g1.max(m.g1.abs());
                plane_g2 = plane_g2.min(m.g2);
            }
        }
        passed &= plane_g1 <= tol && plane_g2 >= -tol;
        report["planes"] = json!({
            "count": s.random_planes,
            "max_first_variation": plane_g1,
            "min_second_variation": plane_g2,
        });
    }

    Ok(Outcome::new(passed, report))
}

/// Calibration check of a section against a graph; the pass flag is the
/// checker's own verdict.  `--tol` does not apply here: the thresholds live
/// in the scenario (or the library defaults).
pub fn run_calibrate(s: &CalibrationScenario, base: &Path) -> Result<Outcome> {
    let section = s.section.build(base)?;
    let graph = s.graph.build(base)?;
    let base_window = s.base_window.build()?;
    if s.counts.len() != base_window.dim() {
        bail!(
            "counts length {} does not match window dimension {}",
            s.counts.len(),
            base_window.dim()
        );
    }
    let thresholds = s.thresholds.as_ref().map(|t| t.build()).unwrap_or_default();
    let report =
        calibrate_verdict(&section, &graph, &base_window, &s.counts, s.fd_step, &thresholds)
            .context("calibration check")?;
    let passed = report.calibrated;
    let body = json!({
        "section": section.label(),
        "thresholds": thresholds,
        "report": report,
    });
    Ok(Outcome::new(passed, body))
}

/// Rigidity verdict for one initial-data family.  Any cleanly produced
/// verdict passes unless the scenario pins an expectation; data rejected by
/// the entrance conditions (inadmissible, or flow not covering the plane)
/// are a legitimate outcome, not an input error.
pub fn run_bernstein(s: &BernsteinScenario, base: &Path, tol: f64) -> Result<Outcome> {
    let data = s.data.build(base)?;
    let opts = s.options.build()?;
    let expect_is = |e: BernsteinExpectation| s.expect.map_or(true, |want| want == e);
    let mut series = None;

    let (outcome_tag, result_json, passed) = match bernstein_verdict_with(&data, &opts) {
        Ok(v @ BernsteinVerdict::VerticalPlane { .. }) => (
            "vertical_plane",
            serde_json::to_value(&v)?,
            expect_is(BernsteinExpectation::VerticalPlane),
        ),
        Ok(v @ BernsteinVerdict::NonMinimizing { .. }) => {
            let (c0, a, b, witness, g2) = match &v {
                BernsteinVerdict::NonMinimizing { c0, a, b, witness, second_variation } => {
                    (*c0, *a, *b, witness.clone(), *second_variation)
                }
                BernsteinVerdict::VerticalPlane { .. } => unreachable!(),
            };
            if !s.sweep.is_empty() {
                let reports = witness_sweep(a, b, &s.sweep).context("witness sweep")?;
                let mut sr = CsvSeries::new("witness_sweep", vec!["epsilon", "lhs", "rhs", "ratio"]);
                for w in &reports {
                    sr.push(vec![w.epsilon, w.lhs, w.rhs, w.ratio]);
                }
                series = Some(sr);
            }
            // Rebuild the transported pair behind the verdict to report the
            // perturbed area and its first derivative alongside the decisive
            // second one.
            let (profile, _) = dgn_witness(a, b, opts.epsilon)?;
            let zeta = product_test_function(c0, opts.c_halfwidth, &profile)?;
            let psi = transported_witness(&data, &zeta)?;
            let chart = CharacteristicChart::new(data.clone());
            let phi = chart.synthesize_phi(psi.support().grown(1.0)?, opts.phi_step)?;
            let g0 = perturbed_area(&phi, &psi, 0.0, &opts.quadrature)?;
            let g1 = first_variation(&phi, &psi, &opts.quadrature)?;
            let ok = expect_is(BernsteinExpectation::NonMinimizing) && g2 < -tol;
            let measurement =
                VariationReport { g0, g1, g2, witness: Some(witness), verdict: Some(v) };
            ("non_minimizing", serde_json::to_value(&measurement)?, ok)
        }
        Err(e @ (CoreError::Inadmissible { .. } | CoreError::NotEntire { .. })) => (
            "rejected",
            json!({ "reason": e.to_string() }),
            expect_is(BernsteinExpectation::Rejected),
        ),
        Err(e) => return Err(e).context("rigidity pipeline"),
    };

    let report = json!({
        "label": data.label(),
        "outcome": outcome_tag,
        "expected": match s.expect {
            Some(e) => json!(e.as_str()),
            None => Value::Null,
        },
        "result": result_json,
        "tolerance": tol,
    });
    let mut out = Outcome::new(passed, report);
    if let Some(sr) = series {
        out = out.with_series(sr);
    }
    Ok(out)
}
