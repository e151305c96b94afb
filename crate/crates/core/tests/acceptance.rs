//! Acceptance gate: one test per shipped guarantee. Every test prints a
//! single verdict line (run with `-- --nocapture` to see them on success);
//! the same line is the panic message on failure. Tolerances are pinned
//! here with their rationale and must not be loosened to make a run green.

use std::sync::Arc;
use std::time::Instant;

use hig_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let line = format!("acceptance {id:02} {name}: {status} ({detail})");
    println!("{line}");
    assert!(ok, "{line}");
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> HPoint {
    let mut coords: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    coords.push(rng.gen_range(-4.0..4.0));
    HPoint::new(coords).unwrap()
}

/// Group arithmetic and the homogeneous metric: associativity, left
/// invariance of the distance, and norm homogeneity under dilations, over
/// 10^4 random samples. Tolerance 1e-12: the twisted product of
/// O(1)-coordinates accumulates a handful of rounding errors, each below
/// 1e-15; anything larger signals a wrong formula, not noise.
#[test]
fn acceptance_01_group_and_metric() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=3usize);
        let p = random_point(&mut rng, n);
        let q = random_point(&mut rng, n);
        let r = random_point(&mut rng, n);
        let ab_c = p.mul(&q).unwrap().mul(&r).unwrap();
        let a_bc = p.mul(&q.mul(&r).unwrap()).unwrap();
        for (u, v) in ab_c.coords().iter().zip(a_bc.coords()) {
            worst = worst.max((u - v).abs());
        }
        let g = random_point(&mut rng, n);
        let d0 = p.dist_inf(&q).unwrap();
        let d1 = g.mul(&p).unwrap().dist_inf(&g.mul(&q).unwrap()).unwrap();
        worst = worst.max((d1 - d0).abs());
        let lam = rng.gen_range(0.5..2.0);
        worst = worst.max((p.dilate(lam).unwrap().norm_inf() - lam * p.norm_inf()).abs());
        let e = p.mul(&p.inverse()).unwrap();
        worst = worst.max(e.coords().iter().map(|c| c.abs()).fold(0.0, f64::max));
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        1,
        "group_and_metric",
        worst <= 1e-12 && secs < 1.0,
        &format!("max defect {worst:.3e} over 10000 samples, {secs:.2}s"),
    );
}

/// Numerical chart inversion against closed forms: linear data
/// (c = 2x/(2 + alpha t^2)) and the shifted-parabola data, on 100 x 100
/// grids over [-3, 3]^2. Tolerance 1e-9: the Newton iteration terminates at
/// bracket width 4 eps max(1, |c|) ~ 1e-15, so 1e-9 leaves three orders of
/// headroom for conditioning of the closed forms near |t| = sqrt(2), which
/// the grid avoids by 0.05.
#[test]
fn acceptance_02_chart_inversion_closed_forms() {
    let t0 = Instant::now();
    let mut worst_linear = 0.0f64;
    for alpha in [1.0, 4.0] {
        let chart = CharacteristicChart::new(InitialData::linear(alpha));
        for i in 0..100 {
            for j in 0..100 {
                let x = -3.0 + 6.0 * i as f64 / 99.0;
                let t = -3.0 + 6.0 * j as f64 / 99.0;
                let closed = 2.0 * x / (2.0 + alpha * t * t);
                let got = chart.invert(x, t).unwrap();
                worst_linear = worst_linear.max((got - closed).abs());
            }
        }
    }
    let chart = CharacteristicChart::new(InitialData::shifted_parabola());
    let mut worst_parab = 0.0f64;
    let mut checked = 0usize;
    for i in 0..100 {
        for j in 0..100 {
            let x = -3.0 + 6.0 * i as f64 / 99.0;
            let t = -3.0 + 6.0 * j as f64 / 99.0;
            if (t.abs() - std::f64::consts::SQRT_2).abs() < 0.05 {
                continue;
            }
            let closed = shifted_parabola_inverse(x, t).unwrap();
            let got = chart.invert(x, t).unwrap();
            worst_parab = worst_parab.max((got - closed).abs());
            checked += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        2,
        "chart_inversion_closed_forms",
        worst_linear <= 1e-9 && worst_parab <= 1e-9 && checked > 9000 && secs < 5.0,
        &format!(
            "linear defect {worst_linear:.3e}, shifted-parabola defect {worst_parab:.3e} over {checked} points, {secs:.2}s"
        ),
    );
}

/// The fan data (A, B) = (c/2, -c) sit exactly on the admissibility
/// boundary: the launch scan must flag them and inversion at t = 2, where
/// the flow jacobian vanishes identically, must fail.
#[test]
fn acceptance_03_degenerate_fan_is_rejected() {
    let t0 = Instant::now();
    let data = InitialData::degenerate_fan();
    let flagged = matches!(data.admissibility(101), Admissibility::Violated { .. });
    let classified = matches!(data.classify_domain(), DomainVerdict::Inadmissible { .. });
    let chart = CharacteristicChart::new(data);
    let invert_fails = chart.invert(0.3, 2.0).is_err() && chart.invert(0.0, 2.0).is_err();
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        3,
        "degenerate_fan_is_rejected",
        flagged && classified && invert_fails && secs < 1.0,
        &format!("admissibility flagged {flagged}, inversion fails at t=2 {invert_fails}, {secs:.2}s"),
    );
}

/// Graphs synthesized from admissible data are stationary: the pointwise
/// minimal-surface residual on a 9 x 9 grid of [-0.3, 0.3]^2 stays below
/// 1e-6 at step 1e-3 (measured headroom ~35% for the linear family, whose
/// third eta-derivative dominates the truncation), the residual decays at
/// second order under step halving, and the first variation vanishes to
/// 1e-7 against the 12-member bump battery (quadrature of smooth closed
/// integrands is exact to ~1e-12; 1e-7 absorbs the closed-partial defects
/// of the synthesized charts).
#[test]
fn acceptance_04_synthesized_graphs_are_stationary() {
    let t0 = Instant::now();
    let window = BoxDomain::symmetric(2, 0.3).unwrap();
    let spec = QuadratureSpec::fixed(8, 16);
    let battery = standard_battery(&window).unwrap();
    assert_eq!(battery.len(), 12);
    let datasets =
        [InitialData::linear(4.0), InitialData::tanh_data(), InitialData::constants(0.7, -0.3)];
    let mut max_residual = 0.0f64;
    let mut min_order = f64::INFINITY;
    let mut max_g1 = 0.0f64;
    for data in &datasets {
        let chart = CharacteristicChart::new(data.clone());
        let domain = window.grown(0.5).unwrap();
        let phi = chart.synthesize_phi(domain.clone(), 1e-3).unwrap();
        for a in window.lattice(&[9, 9]) {
            max_residual = max_residual.max(phi.mse_residual(&a).abs());
        }
        let phi_fine = chart.synthesize_phi(domain, 5e-4).unwrap();
        let probe = [0.2, 0.15];
        let order = observed_order(
            phi.mse_residual(&probe).abs(),
            phi_fine.mse_residual(&probe).abs(),
            1e-9,
        );
        min_order = min_order.min(order);
        for psi in &battery {
            max_g1 = max_g1.max(first_variation(&phi, psi, &spec).unwrap().abs());
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        4,
        "synthesized_graphs_are_stationary",
        max_residual <= 1e-6 && min_order >= 1.9 && max_g1 <= 1e-7 && secs < 30.0,
        &format!(
            "max residual {max_residual:.3e}, min order {min_order:.2}, max |g'| {max_g1:.3e}, {secs:.2}s"
        ),
    );
}

/// Non-planar entire stationary graphs are not minimizers. The verdict for
/// linear data must produce a perturbation with second variation below
/// -1e-3; an independently frozen run (eps = 0.5, launch bump halfwidth
/// 0.5 at c0 = 0, 128-cell order-8 quadrature) must reproduce
/// -5.684289675997117 to 1e-6 (an external multiprecision evaluation of the
/// same integral agrees with this value to ~1e-9); the witness-limit
/// integrals match their closed forms to 1e-6; and the concentration ratio
/// reaches 1/4 within 5e-3 at scale 1e-3 for weights (1,0) and (2,1), whose
/// drift in the scale is ~0.5 eps.
#[test]
fn acceptance_05_dgn_graphs_are_not_minimizers() {
    let t0 = Instant::now();
    let data = InitialData::linear(4.0);
    let verdict_g2 = match bernstein_verdict(&data).unwrap() {
        BernsteinVerdict::NonMinimizing { second_variation, .. } => second_variation,
        BernsteinVerdict::VerticalPlane { .. } => f64::INFINITY,
    };
    let (profile, _) = dgn_witness(4.0, 0.0, 0.5).unwrap();
    let zeta = product_test_function(0.0, 0.5, &profile).unwrap();
    let psi = transported_witness(&data, &zeta).unwrap();
    let chart = CharacteristicChart::new(data.clone());
    let phi = chart.synthesize_phi(psi.support().grown(1.0).unwrap(), 1e-5).unwrap();
    let frozen = second_variation_stationary(&phi, &psi, &QuadratureSpec::fixed(8, 128)).unwrap();
    let frozen_defect = (frozen - (-5.684_289_675_997_117)).abs();
    let mut moment_defect = 0.0f64;
    let mut ratio_defect = 0.0f64;
    for (a, b) in [(1.0, 0.0), (2.0, 1.0)] {
        let alpha = a * a / (2.0 * a - b * b);
        let (m1, m2) = lorentzian_moments(alpha).unwrap();
        let pi = std::f64::consts::PI;
        moment_defect = moment_defect
            .max((m1 - pi / alpha.sqrt()).abs())
            .max((m2 - pi / (2.0 * alpha.sqrt())).abs());
        let (_, report) = dgn_witness(a, b, 1e-3).unwrap();
        ratio_defect = ratio_defect.max((report.ratio - 0.25).abs());
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        5,
        "dgn_graphs_are_not_minimizers",
        verdict_g2 < -1e-3
            && frozen_defect <= 1e-6
            && moment_defect <= 1e-6
            && ratio_defect <= 5e-3
            && secs < 30.0,
        &format!(
            "verdict g2 {verdict_g2:.6}, frozen-route defect {frozen_defect:.3e}, moment defect {moment_defect:.3e}, ratio defect {ratio_defect:.3e}, {secs:.2}s"
        ),
    );
}

/// Vertical planes are stable: over 20 random planes, every battery member
/// gives |g'| <= 1e-8 (the integrand is an odd exact form; quadrature noise
/// only) and g'' >= -1e-10 (the integrand is pointwise nonnegative, so only
/// compensated-summation noise can dip below zero).
#[test]
fn acceptance_06_planes_are_stable() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E55);
    let window = BoxDomain::symmetric(2, 1.0).unwrap();
    let battery = standard_battery(&window).unwrap();
    let spec = QuadratureSpec::fixed(8, 16);
    let mut max_g1 = 0.0f64;
    let mut min_g2 = f64::INFINITY;
    for _ in 0..20 {
        let plane =
            GraphFunction::affine(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
        for psi in &battery {
            max_g1 = max_g1.max(first_variation(&plane, psi, &spec).unwrap().abs());
            min_g2 = min_g2.min(second_variation(&plane, psi, &spec).unwrap());
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        6,
        "planes_are_stable",
        max_g1 <= 1e-8 && min_g2 >= -1e-10 && secs < 10.0,
        &format!("max |g'| {max_g1:.3e}, min g'' {min_g2:.3e}, {secs:.2}s"),
    );
}

/// The graph area is homogeneous of degree 3 under intrinsic dilations
/// (horizontal axes scale by lambda, the vertical one by lambda^2).
/// Relative tolerance 1e-6: the dilated integrand transports exactly, so
/// the only defect is cell-boundary rounding of the scaled window.
#[test]
fn acceptance_07_area_scales_cubically() {
    let t0 = Instant::now();
    let g = GraphFunction::dgn(1.0).unwrap();
    let window = BoxDomain::symmetric(2, 1.0).unwrap();
    let spec = QuadratureSpec::fixed(8, 16);
    let base = g.area(&window, &spec).unwrap();
    let mut worst = 0.0f64;
    for lam in [0.5, 2.0, 3.0] {
        let dilated = g.dilate(lam).unwrap();
        let scaled = window.scaled(&[lam, lam * lam]).unwrap();
        let area = dilated.area(&scaled, &spec).unwrap();
        let target = lam.powi(3) * base;
        worst = worst.max((area - target).abs() / target);
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        7,
        "area_scales_cubically",
        worst <= 1e-6 && secs < 5.0,
        &format!("max relative defect {worst:.3e}, {secs:.2}s"),
    );
}

/// Graphs glued from the profile |t| along characteristics: bitwise equality
/// with the closed form on a dyadic grid whose branch divisors 1 -/+ 4 eta
/// are powers of two (every intermediate of both routes is then exact), an
/// almost-everywhere intrinsic slope below 1e-8 off the kink image (the
/// grid keeps |tau| >= 0.05 and the one-sided stencils at step 1e-6 leave
/// truncation ~6e-9), and a smoothing sweep whose slope bound decreases
/// strictly with the scale.
#[test]
fn acceptance_08_lipschitz_profile_graphs() {
    let t0 = Instant::now();
    let g = lipschitz_phi_from_beta(LipschitzProfile::abs());
    let mut exact = true;
    for &eta in &[0.0, 0.125, 0.1875, 0.21875] {
        for k in 0..=16 {
            let tau = k as f64 / 8.0;
            exact &= g.value(eta, tau).unwrap() == abs_phi_closed(eta, tau);
            exact &= g.value(-eta, -tau).unwrap() == abs_phi_closed(-eta, -tau);
        }
    }
    let mut points = Vec::new();
    for i in 0..9 {
        for j in 0..21 {
            let eta = -0.125 + 0.25 * i as f64 / 8.0;
            let tau = -1.0 + 2.0 * j as f64 / 20.0;
            if tau.abs() >= 0.05 {
                points.push((eta, tau));
            }
        }
    }
    let residual = g.wphi_ae_residual(&points, 1e-6, 0.04).unwrap();
    let window = BoxDomain::new(vec![-0.125, -1.0], vec![0.125, 1.0]).unwrap();
    let sweep = mollified_profile_sweep(&[0.1, 0.05, 0.025], &window, &[5, 9]).unwrap();
    let decreasing = sweep[0] > sweep[1] && sweep[1] > sweep[2];
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        8,
        "lipschitz_profile_graphs",
        exact && residual <= 1e-8 && decreasing && secs < 10.0,
        &format!(
            "closed-form match {exact}, a.e. slope {residual:.3e}, sweep {sweep:?}, {secs:.2}s"
        ),
    );
}

/// Piecewise-constant normals of polynomial t-graphs are divergence-free in
/// the weak sense: |int <N, grad psi>| <= 1e-8 over a 75-member bump
/// battery (the integrals telescope exactly for the separable bumps; 1e-8
/// absorbs summation noise), and the angular section's strong frame
/// divergence stays below 1e-8 at |y| >= 0.1 (central stencils at 1e-6
/// leave ~1e-9 of truncation against the 1/r^3 curvature there).
#[test]
fn acceptance_09_weak_and_strong_divergence() {
    let t0 = Instant::now();
    let a = 1.0;
    let step_normal = move |p: &[f64]| [0.0, (4.0 * p[0] - a).signum()];
    let window = BoxDomain::symmetric(2, 1.0).unwrap();
    let battery = bump_battery(&window, 5, &[0.5, 0.25, 0.125]).unwrap();
    assert_eq!(battery.len(), 75);
    let weak =
        weak_divergence_residual(step_normal, &battery, &QuadratureSpec::fixed(8, 16)).unwrap();
    let section = HorizontalSection::dgn_xyt(4.0).unwrap();
    let ambient = BoxDomain::symmetric(3, 1.0).unwrap();
    let points = lattice_avoiding(&ambient, &[5, 7, 3], section.singular(), 0.1);
    let strong = divx_residual(&section, &points, 1e-6).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        9,
        "weak_and_strong_divergence",
        weak <= 1e-8 && strong <= 1e-8 && secs < 10.0,
        &format!("weak residual {weak:.3e}, strong residual {strong:.3e} over {} points, {secs:.2}s", points.len()),
    );
}

/// The reported first and second variations are the derivatives of the
/// perturbed-area map s -> g(s): centered difference quotients of g at
/// s in {0.02, 0.01, 0.005} converge to them at order >= 1.9 for three
/// independent graph/perturbation pairs. The order floor 1e-9 marks where
/// quotient cancellation noise overtakes the s^2 truncation. The finest
/// quotient still carries ~s^2/12 times the fourth s-derivative of g
/// (several hundred for these bump amplitudes), so its defect bound 1e-2
/// only guards against gross mismatch; the convergence order is the gate.
#[test]
fn acceptance_10_variations_match_difference_quotients() {
    let t0 = Instant::now();
    let spec = QuadratureSpec::fixed(8, 32);
    let domain = BoxDomain::symmetric(2, 2.0).unwrap();
    let quadratic = GraphFunction::from_field(
        1,
        domain.clone(),
        Arc::new(ClosedField::with_gradient(
            2,
            |a: &[f64]| 0.3 * a[0] * a[0] - 0.2 * a[0] * a[1],
            |a: &[f64]| vec![0.6 * a[0] - 0.2 * a[1], -0.2 * a[0]],
        )),
    )
    .unwrap();
    let wavy = GraphFunction::from_field(
        1,
        domain,
        Arc::new(ClosedField::with_gradient(
            2,
            |a: &[f64]| 0.4 * a[0].sin() + 0.1 * a[1] * a[1],
            |a: &[f64]| vec![0.4 * a[0].cos(), 0.2 * a[1]],
        )),
    )
    .unwrap();
    let pairs = [
        (quadratic, TestFunction::bump(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()),
        (GraphFunction::dgn(1.0).unwrap(), TestFunction::bump(vec![0.3, -0.2], vec![0.8, 0.6]).unwrap()),
        (wavy, TestFunction::bump(vec![-0.2, 0.4], vec![0.7, 0.9]).unwrap()),
    ];
    let mut min_order = f64::INFINITY;
    let mut finest = 0.0f64;
    for (phi, psi) in &pairs {
        let g1 = first_variation(phi, psi, &spec).unwrap();
        let g2 = second_variation(phi, psi, &spec).unwrap();
        let g0 = perturbed_area(phi, psi, 0.0, &spec).unwrap();
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for s in [0.02, 0.01, 0.005] {
            let gp = perturbed_area(phi, psi, s, &spec).unwrap();
            let gm = perturbed_area(phi, psi, -s, &spec).unwrap();
            d1.push(((gp - gm) / (2.0 * s) - g1).abs());
            d2.push(((gp - 2.0 * g0 + gm) / (s * s) - g2).abs());
        }
        for w in [&d1, &d2] {
            min_order = min_order.min(observed_order(w[0], w[1], 1e-9));
            min_order = min_order.min(observed_order(w[1], w[2], 1e-9));
        }
        finest = finest.max(d1[2]).max(d2[2]);
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        10,
        "variations_match_difference_quotients",
        min_order >= 1.9 && finest <= 1e-2 && secs < 10.0,
        &format!("min order {min_order:.2}, finest defect {finest:.3e}, {secs:.2}s"),
    );
}

/// The intrinsic lift of the classical saddle log(cos x_2 / cos y_1) is
/// stationary (pointwise residual <= 1e-8 at step 5e-5: truncation ~5e-9
/// from third derivatives of the flux below tan 0.25) and is calibrated by
/// its closed unit normal under the default thresholds.
#[test]
fn acceptance_11_scherk_lift_is_calibrated() {
    let t0 = Instant::now();
    let domain =
        BoxDomain::new(vec![-0.25, -0.25, -0.5, -0.5], vec![0.25, 0.25, 0.5, 0.5]).unwrap();
    let lift = GraphFunction::lift_classical(Arc::new(scherk_psi()), domain, 5e-5).unwrap();
    let inner =
        BoxDomain::new(vec![-0.24, -0.24, -0.45, -0.45], vec![0.24, 0.24, 0.45, 0.45]).unwrap();
    let mut max_residual = 0.0f64;
    for a in inner.lattice(&[5, 5, 3, 3]) {
        max_residual = max_residual.max(lift.mse_residual(&a).abs());
    }
    let section = HorizontalSection::scherk_lift().unwrap();
    let base_window =
        BoxDomain::new(vec![-0.2, -0.2, -0.4, -0.4], vec![0.2, 0.2, 0.4, 0.4]).unwrap();
    let report = calibrate_verdict(
        &section,
        &lift,
        &base_window,
        &[3, 3, 3, 3],
        1e-6,
        &CalibrationThresholds::default(),
    )
    .unwrap();
    let secs = t0.elapsed().as_secs_f64();
    verdict(
        11,
        "scherk_lift_is_calibrated",
        max_residual <= 1e-8 && report.calibrated && secs < 10.0,
        &format!(
            "max residual {max_residual:.3e}, calibrated {} (norm {:.2e}, div {:.2e}, normal {:.2e}), {secs:.2}s",
            report.calibrated,
            report.max_norm_defect,
            report.max_divergence,
            report.max_normal_mismatch
        ),
    );
}
