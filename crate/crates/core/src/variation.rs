//! First and second variation of the graph area along compactly supported
//! perturbations, the reduced quadratic form in characteristic coordinates,
//! and the negative-direction certificate that separates vertical planes
//! from every other entire stationary graph.

use std::sync::Arc;

use serde::Serialize;

use crate::characteristics::{CharacteristicChart, DomainVerdict, InitialData};
use crate::diff::central_partial;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{bump3, bump3_deriv, ClosedField, PlateauCutoff, TestFunction};
use crate::graph::{GraphFunction, AREA_NORMALIZATION};
use crate::quad::{integrate, integrate_line, QuadratureSpec};

/// Largest second-order residual tolerated on the support of a perturbation
/// before the stationary-form second variation refuses to apply.
pub const STATIONARITY_TOL: f64 = 1e-6;
/// Derivative bound below which sampled data counts as constant.
pub const PLANE_DERIV_TOL: f64 = 1e-12;

fn check_pair(phi: &GraphFunction, psi: &TestFunction) -> Result<()> {
    if psi.dim() != 2 * phi.n() {
        return Err(Error::DimensionMismatch { expected: 2 * phi.n(), got: psi.dim() });
    }
    if !phi.domain().contains_box(psi.support()) {
        return Err(Error::OutsideDomain {
            detail: "perturbation support leaves the graph domain".into(),
        });
    }
    Ok(())
}

/// Slots of the linearized intrinsic gradient of a perturbation psi along
/// phi, mirroring the intrinsic-gradient slot order.
fn perturbation_slots(
    n: usize,
    a: &[f64],
    phi_val: f64,
    phi_tau: f64,
    psi_val: f64,
    psi_grad: &[f64],
) -> Vec<f64> {
    let t = 2 * n - 1;
    if n == 1 {
        return vec![psi_grad[0] - 4.0 * phi_val * psi_grad[1] - 4.0 * psi_val * phi_tau];
    }
    let mut v = Vec::with_capacity(2 * n - 1);
    for k in 0..n - 1 {
        v.push(psi_grad[k + 1] + 2.0 * a[n + k] * psi_grad[t]);
    }
    v.push(psi_grad[0] - 4.0 * phi_val * psi_grad[t] - 4.0 * psi_val * phi_tau);
    for k in n..2 * n - 1 {
        v.push(psi_grad[k] - 2.0 * a[k - n + 1] * psi_grad[t]);
    }
    v
}

/// Area of the perturbed graph phi + s psi over the support of psi,
/// evaluated through the exact expansion of the perturbed intrinsic
/// gradient: slot-wise w + s V, with the additional -4 s^2 psi psi_tau on
/// the middle slot.
pub fn perturbed_area(
    phi: &GraphFunction,
    psi: &TestFunction,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_pair(phi, psi)?;
    let n = phi.n();
    let t = 2 * n - 1;
    integrate(spec, psi.support(), |a| {
        let w = phi.wphi(a);
        let g = phi.gradient(a);
        let psi_val = psi.value(a);
        let psi_grad = psi.gradient(a, phi.step());
        let v = perturbation_slots(n, a, phi.value(a), g[t], psi_val, &psi_grad);
        let mut m2 = 1.0;
        for k in 0..2 * n - 1 {
            let mut ws = w[k] + s * v[k];
            if k == n - 1 {
                ws -= 4.0 * s * s * psi_val * psi_grad[t];
            }
            m2 += ws * ws;
        }
        AREA_NORMALIZATION * m2.sqrt()
    })
}

/// Derivative of the perturbed area at s = 0.
pub fn first_variation(
    phi: &GraphFunction,
    psi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_pair(phi, psi)?;
    let n = phi.n();
    let t = 2 * n - 1;
    integrate(spec, psi.support(), |a| {
        let w = phi.wphi(a);
        let g = phi.gradient(a);
        let v = perturbation_slots(n, a, phi.value(a), g[t], psi.value(a), &psi.gradient(a, phi.step()));
        let wv: f64 = w.iter().zip(&v).map(|(wi, vi)| wi * vi).sum();
        let w2: f64 = w.iter().map(|wi| wi * wi).sum();
        wv / (1.0 + w2).sqrt()
    })
}

/// Second derivative of the perturbed area at s = 0, valid for any graph.
pub fn second_variation(
    phi: &GraphFunction,
    psi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_pair(phi, psi)?;
    let n = phi.n();
    let t = 2 * n - 1;
    integrate(spec, psi.support(), |a| {
        let w = phi.wphi(a);
        let g = phi.gradient(a);
        let psi_val = psi.value(a);
        let psi_grad = psi.gradient(a, phi.step());
        let v = perturbation_slots(n, a, phi.value(a), g[t], psi_val, &psi_grad);
        let wv: f64 = w.iter().zip(&v).map(|(wi, vi)| wi * vi).sum();
        let w2: f64 = w.iter().map(|wi| wi * wi).sum();
        let v2: f64 = v.iter().map(|vi| vi * vi).sum();
        let quad = v2 - 8.0 * psi_val * psi_grad[t] * w[n - 1];
        ((1.0 + w2) * quad - wv * wv) / (1.0 + w2).powf(1.5)
    })
}

/// Reject graphs whose pointwise minimal-surface residual exceeds
/// [`STATIONARITY_TOL`] on a coarse lattice of the window.
pub fn stationarity_precheck(phi: &GraphFunction, window: &BoxDomain) -> Result<()> {
    for a in window.lattice(&vec![7; window.dim()]) {
        let r = phi.mse_residual(&a);
        if r.abs() > STATIONARITY_TOL {
            return Err(Error::StationarityViolated {
                eta: a[0],
                tau: a[window.dim() - 1],
                residual: r,
            });
        }
    }
    Ok(())
}

/// Second variation in the form valid only at stationary graphs (n = 1):
/// the integrand trades the cross terms for the tau-derivative of the
/// intrinsic gradient. The support is scanned for stationarity first and a
/// violating sample aborts the computation.
pub fn second_variation_stationary(
    phi: &GraphFunction,
    psi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if phi.n() != 1 {
        return Err(Error::InvalidParameter {
            detail: "stationary-form second variation is implemented for n = 1".into(),
        });
    }
    check_pair(phi, psi)?;
    stationarity_precheck(phi, psi.support())?;
    let h = phi.step();
    integrate(spec, psi.support(), |a| {
        let w = phi.wphi(a)[0];
        let phi_val = phi.value(a);
        let phi_tau = phi.gradient(a)[1];
        let psi_val = psi.value(a);
        let psi_grad = psi.gradient(a, h);
        let wpsi = psi_grad[0] - 4.0 * phi_val * psi_grad[1];
        let wfield = |x: &[f64]| phi.wphi(x)[0];
        let wtau = central_partial(&wfield, a, 1, h);
        (wpsi * wpsi + 8.0 * psi_val * psi_val * (wtau + 2.0 * phi_tau * phi_tau))
            / (1.0 + w * w).powf(1.5)
    })
}

/// The 12-member perturbation battery used by stationarity checks: 2x2
/// center lattice times scale fractions {0.5, 0.35, 0.25}.
pub fn standard_battery(window: &BoxDomain) -> Result<Vec<TestFunction>> {
    crate::field::bump_battery(window, 2, &[0.5, 0.35, 0.25])
}

/// Weights of the reduced quadratic form in characteristic coordinates
/// (c, t). `Frozen` freezes the launch point at c0, leaving the explicit
/// polynomial h(t) = a t^2 / 2 + b t + 1; `Full` keeps the c-dependence of
/// the initial data.
#[derive(Clone)]
pub enum WeightMode {
    Frozen,
    Full(InitialData),
}

#[derive(Clone)]
pub struct ReducedWeights {
    a: f64,
    b: f64,
    mode: WeightMode,
}

impl ReducedWeights {
    fn validate(a: f64, b: f64) -> Result<()> {
        if !a.is_finite() || !b.is_finite() || b * b >= 2.0 * a {
            return Err(Error::IndefiniteWeights { a, b });
        }
        Ok(())
    }

    pub fn frozen(a: f64, b: f64) -> Result<Self> {
        Self::validate(a, b)?;
        Ok(Self { a, b, mode: WeightMode::Frozen })
    }

    pub fn full(data: &InitialData, c0: f64) -> Result<Self> {
        let a = data.a_deriv(c0);
        let b = data.b_deriv(c0);
        Self::validate(a, b)?;
        Ok(Self { a, b, mode: WeightMode::Full(data.clone()) })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// h(t) = a t^2/2 + b t + 1, positive whenever b^2 < 2a.
    pub fn h(&self, t: f64) -> f64 {
        0.5 * self.a * t * t + self.b * t + 1.0
    }

    /// Weight multiplying zeta_t^2.
    pub fn weight_u(&self, c: f64, t: f64) -> f64 {
        match &self.mode {
            WeightMode::Frozen => self.h(t),
            WeightMode::Full(d) => {
                let a = d.a(c);
                d.flow_jacobian(c, t) / (1.0 + a * a).powf(1.5)
            }
        }
    }

    /// Weight multiplying zeta^2; negative under admissibility.
    pub fn weight_v(&self, c: f64, t: f64) -> f64 {
        match &self.mode {
            WeightMode::Frozen => (self.b * self.b - 2.0 * self.a) / self.h(t),
            WeightMode::Full(d) => {
                let a = d.a(c);
                let ap = d.a_deriv(c);
                let bp = d.b_deriv(c);
                (bp * bp - 2.0 * ap) / ((1.0 + a * a).powf(1.5) * d.flow_jacobian(c, t))
            }
        }
    }
}

/// The reduced second variation 4 * int (zeta_t^2 wu + zeta^2 wv) dc dt over
/// the support of a test function in characteristic coordinates.
pub fn reduced_form(
    weights: &ReducedWeights,
    zeta: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if zeta.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: zeta.dim() });
    }
    integrate(spec, zeta.support(), |p| {
        let z = zeta.value(p);
        let zt = zeta.gradient(p, 1e-6)[1];
        4.0 * (zt * zt * weights.weight_u(p[0], p[1]) + z * z * weights.weight_v(p[0], p[1]))
    })
}

/// A compactly supported profile of one variable with a closed derivative.
pub trait Profile1D: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn deriv(&self, t: f64) -> f64;
    fn support_half_width(&self) -> f64;
}

/// The two sides of the one-dimensional reduced inequality for a profile
/// zeta: lhs = int zeta'^2 h dt, rhs = (2a - b^2) int zeta^2 / h dt. The
/// frozen form fails to be coercive exactly when lhs < rhs for some zeta.
pub fn one_d_form(a: f64, b: f64, zeta: &dyn Profile1D, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    ReducedWeights::validate(a, b)?;
    let s = zeta.support_half_width();
    let window = BoxDomain::new(vec![-s], vec![s])?;
    let h = move |t: f64| 0.5 * a * t * t + b * t + 1.0;
    let lhs = integrate(spec, &window, |p| {
        let d = zeta.deriv(p[0]);
        d * d * h(p[0])
    })?;
    let rhs = integrate(spec, &window, |p| {
        let z = zeta.value(p[0]);
        (2.0 * a - b * b) * z * z / h(p[0])
    })?;
    Ok((lhs, rhs))
}

/// The concentrating family chi_eps / sqrt(h): a plateau cutoff of width
/// 1/eps against the square root of the frozen weight polynomial.
#[derive(Clone)]
pub struct WitnessProfile {
    a: f64,
    b: f64,
    cutoff: PlateauCutoff,
}

impl WitnessProfile {
    pub fn new(a: f64, b: f64, eps: f64) -> Result<Self> {
        ReducedWeights::validate(a, b)?;
        Ok(Self { a, b, cutoff: PlateauCutoff::new(eps)? })
    }

    fn h(&self, t: f64) -> f64 {
        0.5 * self.a * t * t + self.b * t + 1.0
    }
}

impl Profile1D for WitnessProfile {
    fn value(&self, t: f64) -> f64 {
        self.cutoff.value(t) / self.h(t).sqrt()
    }

    fn deriv(&self, t: f64) -> f64 {
        let h = self.h(t);
        let hp = self.a * t + self.b;
        self.cutoff.deriv(t) / h.sqrt() - 0.5 * self.cutoff.value(t) * hp / h.powf(1.5)
    }

    fn support_half_width(&self) -> f64 {
        self.cutoff.support_half_width()
    }
}

/// One evaluation of the concentration witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Evaluate the concentration witness at scale eps: as eps -> 0 the ratio
/// lhs/rhs tends to 1/4, defeating coercivity of the reduced form.
pub fn dgn_witness(a: f64, b: f64, eps: f64) -> Result<(WitnessProfile, WitnessReport)> {
    let profile = WitnessProfile::new(a, b, eps)?;
    let spec = QuadratureSpec::adaptive(1e-10);
    let (lhs, rhs) = one_d_form(a, b, &profile, &spec)?;
    let report = WitnessReport { a, b, epsilon: eps, lhs, rhs, ratio: lhs / rhs };
    Ok((profile, report))
}

/// Witness evaluations over a sweep of scales.
pub fn witness_sweep(a: f64, b: f64, eps_list: &[f64]) -> Result<Vec<WitnessReport>> {
    eps_list.iter().map(|&eps| dgn_witness(a, b, eps).map(|(_, r)| r)).collect()
}

/// Closed-form limit of the witness lhs as eps -> 0.
pub fn witness_lhs_limit(a: f64, b: f64) -> f64 {
    a * std::f64::consts::PI / (2.0 * (2.0 * a - b * b).sqrt())
}

/// Closed-form limit of the witness rhs as eps -> 0.
pub fn witness_rhs_limit(a: f64, b: f64) -> f64 {
    2.0 * a * std::f64::consts::PI / (2.0 * a - b * b).sqrt()
}

/// Numeric values of int dt/(1 + alpha t^2) and int dt/(1 + alpha t^2)^2
/// over the real line; the closed forms are pi/sqrt(alpha) and
/// pi/(2 sqrt(alpha)).
pub fn lorentzian_moments(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter { detail: format!("alpha must be positive, got {alpha}") });
    }
    let m1 = integrate_line(|t| 1.0 / (1.0 + alpha * t * t), 1e-10)?;
    let m2 = integrate_line(|t| 1.0 / (1.0 + alpha * t * t).powi(2), 1e-10)?;
    Ok((m1, m2))
}

/// Product test function zeta(c, t) = bump((c - c0)/wc) * profile(t) in
/// characteristic coordinates, with closed gradient.
pub fn product_test_function(
    c0: f64,
    c_halfwidth: f64,
    profile: &WitnessProfile,
) -> Result<TestFunction> {
    if !(c_halfwidth > 0.0) {
        return Err(Error::InvalidParameter { detail: "c-halfwidth must be positive".into() });
    }
    let s = profile.support_half_width();
    let support = BoxDomain::new(vec![c0 - c_halfwidth, -s], vec![c0 + c_halfwidth, s])?;
    let p1 = profile.clone();
    let p2 = profile.clone();
    let field = ClosedField::with_gradient(
        2,
        move |p: &[f64]| bump3((p[0] - c0) / c_halfwidth) * p1.value(p[1]),
        move |p: &[f64]| {
            let u = (p[0] - c0) / c_halfwidth;
            vec![
                bump3_deriv(u) / c_halfwidth * p2.value(p[1]),
                bump3(u) * p2.deriv(p[1]),
            ]
        },
    );
    TestFunction::new(Arc::new(field), support)
}

/// Transport a test function from characteristic coordinates (c, t) to graph
/// coordinates (eta, tau) along the inverse flow: psi(eta, tau) =
/// zeta(c*(-tau/4, eta), eta), with the chain-rule gradient through the
/// flow jacobian. The support box maps the c-edges of the zeta support
/// through the flow and pads the tau-range by 5%.
pub fn transported_witness(data: &InitialData, zeta: &TestFunction) -> Result<TestFunction> {
    if zeta.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: zeta.dim() });
    }
    let chart = CharacteristicChart::new(data.clone());
    let sup = zeta.support();
    let (c_lo, c_hi) = (sup.lo()[0], sup.hi()[0]);
    let (t_lo, t_hi) = (sup.lo()[1], sup.hi()[1]);
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    for i in 0..=1000 {
        let t = t_lo + (t_hi - t_lo) * i as f64 / 1000.0;
        for c in [c_lo, c_hi] {
            let x = chart.x_of(c, t);
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
    }
    let pad = 0.05 * (x_max - x_min).max(1e-6);
    let support = BoxDomain::new(
        vec![t_lo, -4.0 * (x_max + pad)],
        vec![t_hi, -4.0 * (x_min - pad)],
    )?;
    let ch1 = chart.clone();
    let ch2 = chart;
    let z1 = zeta.clone();
    let z2 = zeta.clone();
    let field = ClosedField::with_gradient(
        2,
        move |a: &[f64]| match ch1.invert(-a[1] / 4.0, a[0]) {
            Ok(c) => z1.value(&[c, a[0]]),
            Err(_) => 0.0,
        },
        move |a: &[f64]| match ch2.invert(-a[1] / 4.0, a[0]) {
            Ok(c) => {
                let j = ch2.jacobian(c, a[0]);
                let u = ch2.u_of(c, a[0]);
                let zg = z2.gradient(&[c, a[0]], 1e-6);
                vec![zg[0] * (-u / j) + zg[1], -zg[0] / (4.0 * j)]
            }
            Err(_) => vec![0.0, 0.0],
        },
    );
    TestFunction::new(Arc::new(field), support)
}

/// Outcome of the entire-graph classification.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BernsteinVerdict {
    /// The data synthesize the vertical plane phi = w eta + c.
    VerticalPlane { w: f64, c: f64 },
    /// Non-planar entire stationary graph: a concentrating perturbation
    /// makes the second variation negative.
    NonMinimizing {
        c0: f64,
        a: f64,
        b: f64,
        witness: WitnessReport,
        second_variation: f64,
    },
}

/// One variational measurement of a graph/perturbation pair, shaped for
/// JSON reports: the perturbed area at s = 0 and its first two derivatives,
/// optionally annotated with the concentration witness and the verdict the
/// measurement supports.
#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<BernsteinVerdict>,
}

impl VariationReport {
    pub fn with_witness(mut self, witness: WitnessReport) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_verdict(mut self, verdict: BernsteinVerdict) -> Self {
        self.verdict = Some(verdict);
        self
    }
}

/// Measure g(0), g'(0), g''(0) for one pair with the general-form second
/// variation.
pub fn variation_report(
    phi: &GraphFunction,
    psi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<VariationReport> {
    Ok(VariationReport {
        g0: perturbed_area(phi, psi, 0.0, spec)?,
        g1: first_variation(phi, psi, spec)?,
        g2: second_variation(phi, psi, spec)?,
        witness: None,
        verdict: None,
    })
}

/// Tunable knobs for [`bernstein_verdict`].
#[derive(Clone)]
pub struct BernsteinOptions {
    /// Concentration scale of the witness profile.
    pub epsilon: f64,
    /// Halfwidth of the launch-point bump around c0.
    pub c_halfwidth: f64,
    /// Finite-difference step of the synthesized graph.
    pub phi_step: f64,
    /// Quadrature for the transported second variation.
    pub quadrature: QuadratureSpec,
}

impl Default for BernsteinOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.25,
            c_halfwidth: 0.5,
            phi_step: 1e-5,
            quadrature: QuadratureSpec::fixed(8, 128),
        }
    }
}

/// Classify entire stationary graphs synthesized from `data`: constant data
/// give a vertical plane, anything else admits an explicit perturbation with
/// negative second variation. Data that are inadmissible or whose flow does
/// not cover the plane are rejected.
pub fn bernstein_verdict(data: &InitialData) -> Result<BernsteinVerdict> {
    bernstein_verdict_with(data, &BernsteinOptions::default())
}

pub fn bernstein_verdict_with(
    data: &InitialData,
    opts: &BernsteinOptions,
) -> Result<BernsteinVerdict> {
    match data.classify_domain() {
        DomainVerdict::AllOfPlane { .. } => {}
        DomainVerdict::Inadmissible { c, b_prime_sq, two_a_prime } => {
            return Err(Error::Inadmissible { c, b_prime_sq, two_a_prime })
        }
        DomainVerdict::ProperSubset { description } => {
            return Err(Error::NotEntire { detail: description })
        }
        DomainVerdict::Undetermined { detail } => return Err(Error::NotEntire { detail }),
    }
    let (lo, hi) = data.c_window();
    let m = 129;
    let mut c0 = lo;
    let mut best = f64::NEG_INFINITY;
    let mut max_deriv = 0.0f64;
    for i in 0..m {
        let c = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        let ap = data.a_deriv(c);
        max_deriv = max_deriv.max(ap.abs()).max(data.b_deriv(c).abs());
        if ap > best {
            best = ap;
            c0 = c;
        }
    }
    if max_deriv <= PLANE_DERIV_TOL {
        let mid = 0.5 * (lo + hi);
        return Ok(BernsteinVerdict::VerticalPlane { w: data.a(mid), c: data.b(mid) });
    }
    let a = data.a_deriv(c0);
    let b = data.b_deriv(c0);
    let (profile, witness) = dgn_witness(a, b, opts.epsilon)?;
    let zeta = product_test_function(c0, opts.c_halfwidth, &profile)?;
    let psi = transported_witness(data, &zeta)?;
    let chart = CharacteristicChart::new(data.clone());
    let phi = chart.synthesize_phi(psi.support().grown(1.0)?, opts.phi_step)?;
    let g2 = second_variation_stationary(&phi, &psi, &opts.quadrature)?;
    Ok(BernsteinVerdict::NonMinimizing { c0, a, b, witness, second_variation: g2 })
}
