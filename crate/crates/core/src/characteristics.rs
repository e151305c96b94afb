//! Construction of stationary graphs by the method of characteristics.
//!
//! Initial data (A, B) on the x-axis launch the characteristic curves
//! x(c, t) = A(c) t^2 / 2 + B(c) t + c carrying the slope
//! u(c, t) = A(c) t + B(c). When the flow jacobian
//! J = A'(c) t^2 / 2 + B'(c) t + 1 stays positive, inverting c -> x at fixed
//! t yields a solution u of the inviscid transport equation whose restriction
//! to t-sections synthesizes a stationary intrinsic graph via
//! phi(eta, tau) = u(-tau/4, eta).

use std::sync::Arc;

use crate::diff::central_partial;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{ClosedField, GridField, ScalarField};
use crate::graph::GraphFunction;

/// Finite-difference step for A' and B' when no closed derivative is given.
pub const DERIV_FD_STEP: f64 = 1e-6;
/// Slack in the admissibility inequality B'^2 < 2 A'.
pub const ADMISSIBILITY_SLACK: f64 = 1e-12;
/// Maximum bracket-expansion doublings before a target is declared outside
/// the image of the characteristic flow.
pub const BRACKET_DOUBLINGS: u32 = 60;
/// Decade horizon used by the domain classification.
pub const CLASSIFICATION_HORIZON: f64 = 1e8;

type Curve = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
enum CurveDeriv {
    Closed(Arc<Curve>),
    FiniteDifference,
}

/// Initial data for the characteristic flow: the pair (A, B), their
/// derivatives (closed-form or finite-difference), and the window of launch
/// points on which admissibility is monitored.
#[derive(Clone)]
pub struct InitialData {
    a: Arc<Curve>,
    b: Arc<Curve>,
    a_deriv: CurveDeriv,
    b_deriv: CurveDeriv,
    c_window: (f64, f64),
    label: String,
    image_note: Option<String>,
}

impl InitialData {
    pub fn new<F, G>(label: &str, a: F, b: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            a: Arc::new(a),
            b: Arc::new(b),
            a_deriv: CurveDeriv::FiniteDifference,
            b_deriv: CurveDeriv::FiniteDifference,
            c_window: (-1.0, 1.0),
            label: label.into(),
            image_note: None,
        }
    }

    pub fn with_derivs<F, G>(mut self, a_deriv: F, b_deriv: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.a_deriv = CurveDeriv::Closed(Arc::new(a_deriv));
        self.b_deriv = CurveDeriv::Closed(Arc::new(b_deriv));
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("bad launch window [{lo}, {hi}]") });
        }
        self.c_window = (lo, hi);
        Ok(self)
    }

    /// Record that the flow covers only part of the plane, with a printable
    /// description of the uncovered set.
    pub fn with_image_note(mut self, note: &str) -> Self {
        self.image_note = Some(note.into());
        self
    }

    /// Linear data A = alpha c, B = 0; the flow is globally invertible with
    /// c(x, t) = 2x / (2 + alpha t^2).
    pub fn linear(alpha: f64) -> Self {
        Self::new(&format!("linear({alpha})"), move |c| alpha * c, |_| 0.0)
            .with_derivs(move |_| alpha, |_| 0.0)
    }

    /// Data A = c/2, B = -c sitting exactly on the admissibility boundary
    /// B'^2 = 2A'; every characteristic passes through x = 0 at t = 2, where
    /// the jacobian vanishes identically.
    pub fn degenerate_fan() -> Self {
        Self::new("ex4.7", |c| 0.5 * c, |c| -c).with_derivs(|_| 0.5, |_| -1.0)
    }

    /// Data A = c, B = sqrt(2 (1 + c^2)): strictly admissible, yet the flow
    /// misses one half-line on each of the sections t = +-sqrt(2).
    pub fn shifted_parabola() -> Self {
        Self::new("ex4.8", |c| c, |c| (2.0 * (1.0 + c * c)).sqrt())
            .with_derivs(|_| 1.0, |c| std::f64::consts::SQRT_2 * c / (1.0 + c * c).sqrt())
            .with_image_note(
                "misses the half-lines {x <= 0, t = sqrt(2)} and {x >= 0, t = -sqrt(2)}",
            )
    }

    /// Bounded increasing data A = tanh c, B = 0: an entire non-planar
    /// stationary graph whose slope degenerates at infinity.
    pub fn tanh_data() -> Self {
        Self::new("tanh", |c| c.tanh(), |_| 0.0)
            .with_derivs(|c| 1.0 / c.cosh().powi(2), |_| 0.0)
    }

    /// Constant data: the flow translates rigidly and synthesizes a vertical
    /// plane with slope a0.
    pub fn constants(a0: f64, b0: f64) -> Self {
        Self::new(&format!("constants({a0},{b0})"), move |_| a0, move |_| b0)
            .with_derivs(|_| 0.0, |_| 0.0)
    }

    /// Data interpolated from samples of A and B on a uniform c-lattice.
    pub fn from_samples(c_lo: f64, c_hi: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let bbox = BoxDomain::new(vec![c_lo], vec![c_hi])?;
        let ga = GridField::new(bbox.clone(), vec![a.len()], a)?;
        let gb = GridField::new(bbox, vec![b.len()], b)?;
        Ok(Self::new("grid", move |c| ga.value(&[c]), move |c| gb.value(&[c]))
            .with_window(c_lo, c_hi)?)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn c_window(&self) -> (f64, f64) {
        self.c_window
    }

    pub fn image_note(&self) -> Option<&str> {
        self.image_note.as_deref()
    }

    pub fn a(&self, c: f64) -> f64 {
        (self.a)(c)
    }

    pub fn b(&self, c: f64) -> f64 {
        (self.b)(c)
    }

    pub fn a_deriv(&self, c: f64) -> f64 {
        match &self.a_deriv {
            CurveDeriv::Closed(d) => d(c),
            CurveDeriv::FiniteDifference => {
                let f = |x: &[f64]| (self.a)(x[0]);
                central_partial(&f, &[c], 0, DERIV_FD_STEP)
            }
        }
    }

    pub fn b_deriv(&self, c: f64) -> f64 {
        match &self.b_deriv {
            CurveDeriv::Closed(d) => d(c),
            CurveDeriv::FiniteDifference => {
                let f = |x: &[f64]| (self.b)(x[0]);
                central_partial(&f, &[c], 0, DERIV_FD_STEP)
            }
        }
    }

    /// Position of the characteristic launched at c after time t.
    pub fn char_position(&self, c: f64, t: f64) -> f64 {
        0.5 * self.a(c) * t * t + self.b(c) * t + c
    }

    /// Slope carried along the characteristic.
    pub fn char_slope(&self, c: f64, t: f64) -> f64 {
        self.a(c) * t + self.b(c)
    }

    /// Jacobian of the flow map c -> x at fixed t.
    pub fn flow_jacobian(&self, c: f64, t: f64) -> f64 {
        0.5 * self.a_deriv(c) * t * t + self.b_deriv(c) * t + 1.0
    }

    /// Scan the launch window for the no-crossing condition: at each sample
    /// either both derivatives vanish (constant data) or B'^2 < 2A' with
    /// slack. The first violating sample is reported.
    pub fn admissibility(&self, samples: usize) -> Admissibility {
        let (lo, hi) = self.c_window;
        let m = samples.max(2);
        for i in 0..m {
            let c = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            let ap = self.a_deriv(c);
            let bp = self.b_deriv(c);
            if ap.abs() <= ADMISSIBILITY_SLACK && bp.abs() <= ADMISSIBILITY_SLACK {
                continue;
            }
            if bp * bp >= 2.0 * ap - ADMISSIBILITY_SLACK {
                return Admissibility::Violated { c, b_prime_sq: bp * bp, two_a_prime: 2.0 * ap };
            }
        }
        Admissibility::Admissible
    }

    /// Classify the image of the flow by sampling the launch-time behavior
    /// of (A, B) out to the decade horizon on both sides.
    pub fn classify_domain(&self) -> DomainVerdict {
        self.classify_domain_with(CLASSIFICATION_HORIZON, 257)
    }

    pub fn classify_domain_with(&self, horizon: f64, admissibility_samples: usize) -> DomainVerdict {
        if let Admissibility::Violated { c, b_prime_sq, two_a_prime } =
            self.admissibility(admissibility_samples)
        {
            return DomainVerdict::Inadmissible { c, b_prime_sq, two_a_prime };
        }
        let mut evidence = Vec::new();
        for side in [1.0, -1.0] {
            match self.side_evidence(side, horizon) {
                Some(e) => evidence.push(e),
                None => {
                    return match &self.image_note {
                        Some(note) => DomainVerdict::ProperSubset { description: note.clone() },
                        None => DomainVerdict::Undetermined {
                            detail: format!(
                                "no coverage criterion holds for c -> {}",
                                if side > 0.0 { "+inf" } else { "-inf" }
                            ),
                        },
                    }
                }
            }
        }
        DomainVerdict::AllOfPlane { evidence: evidence.join("; ") }
    }

    /// Evidence that characteristics launched towards `side * infinity`
    /// sweep the corresponding end of every time section, or None.
    fn side_evidence(&self, side: f64, horizon: f64) -> Option<String> {
        let tag = if side > 0.0 { "c -> +inf" } else { "c -> -inf" };
        let far = side * horizon;
        let near = side * horizon / 10.0;
        let a_far = self.a(far);
        if (a_far - self.a(near)).abs() <= 1e-6 * (1.0 + a_far.abs()) {
            return Some(format!("{tag}: A approaches a finite limit"));
        }
        // Sample the three largest decades; liminf-style criteria take the
        // minimum over the samples, limsup-style the maximum.
        let mut ratio_min = f64::INFINITY;
        let mut ratio_max: f64 = 0.0;
        let mut b_ratio_min = f64::INFINITY;
        for k in 0..=12 {
            let c = side * horizon / 100.0 * 10f64.powf(k as f64 / 6.0);
            let a = self.a(c);
            let ratio = (a / c).abs();
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
            let ca = c * a;
            if ca > 0.0 {
                b_ratio_min = b_ratio_min.min(self.b(c).abs() / ca.sqrt());
            }
        }
        if ratio_min <= 1e-9 {
            return Some(format!("{tag}: A grows sublinearly (|A/c| -> 0)"));
        }
        if ratio_max >= 1e9 {
            return Some(format!("{tag}: A grows superlinearly (|A/c| -> inf)"));
        }
        if b_ratio_min < std::f64::consts::SQRT_2 - 1e-9 {
            return Some(format!("{tag}: launch offset stays below the parabolic gauge"));
        }
        None
    }

    /// Transport residuals of a slope field u(x, t): r1 compares the
    /// convective derivative u_t + u u_x against the slope A(c) carried by
    /// the chart (when one is supplied), r2 applies the convective operator
    /// twice. Both are maxima over the lattice of `counts` points in
    /// `window`, with central differences at step `h`.
    pub fn burgers_residual(
        u: &dyn ScalarField,
        chart: Option<&CharacteristicChart>,
        window: &BoxDomain,
        counts: &[usize],
        h: f64,
    ) -> Result<BurgersResidual> {
        if u.dim() != 2 || window.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: u.dim().max(window.dim()) });
        }
        let transport = |v: &dyn Fn(&[f64]) -> f64, p: &[f64]| {
            central_partial(v, p, 1, h) + u.value(p) * central_partial(v, p, 0, h)
        };
        let uval = |p: &[f64]| u.value(p);
        let lu = |p: &[f64]| transport(&uval, p);
        let mut r1: Option<f64> = None;
        let mut r2 = 0.0f64;
        for p in window.lattice(counts) {
            if let Some(chart) = chart {
                let c = chart.invert(p[0], p[1])?;
                let defect = (lu(&p) - chart.data().a(c)).abs();
                r1 = Some(r1.unwrap_or(0.0).max(defect));
            }
            r2 = r2.max(transport(&lu, &p).abs());
        }
        Ok(BurgersResidual { transport_defect: r1, nested_defect: r2 })
    }
}

/// Verdict of the launch-window scan for characteristic crossings.
#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible,
    Violated { c: f64, b_prime_sq: f64, two_a_prime: f64 },
}

/// How much of the plane the characteristic flow covers.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainVerdict {
    AllOfPlane { evidence: String },
    ProperSubset { description: String },
    Inadmissible { c: f64, b_prime_sq: f64, two_a_prime: f64 },
    Undetermined { detail: String },
}

/// Residual pair returned by [`InitialData::burgers_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersResidual {
    /// max |u_t + u u_x - A(c(x,t))|, present when a chart was supplied.
    pub transport_defect: Option<f64>,
    /// max |(d_t + u d_x)^2 u|.
    pub nested_defect: f64,
}

/// The invertible-flow view of initial data: forward evaluation plus a
/// guarded numerical inverse of c -> x(c, t).
#[derive(Clone)]
pub struct CharacteristicChart {
    data: InitialData,
}

impl CharacteristicChart {
    pub fn new(data: InitialData) -> Self {
        Self { data }
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn x_of(&self, c: f64, t: f64) -> f64 {
        self.data.char_position(c, t)
    }

    pub fn u_of(&self, c: f64, t: f64) -> f64 {
        self.data.char_slope(c, t)
    }

    pub fn jacobian(&self, c: f64, t: f64) -> f64 {
        self.data.flow_jacobian(c, t)
    }

    /// Solve x(c, t) = x for c at fixed t.
    ///
    /// The bracket [x - w, x + w] starts at w = 1 and doubles until it
    /// captures a sign change (the flow map is increasing wherever the
    /// jacobian is positive); the root is then polished by a
    /// bisection-guarded Newton iteration. A non-positive jacobian at a
    /// probed launch point reports a degenerate chart; bracket exhaustion
    /// reports the target outside the image of the flow. Jacobian sign
    /// checks stop beyond |c| = 1e6 max(1, |x|): out there the flow map's
    /// rounding noise can fake both brackets and sign flips, so spurious
    /// roots are instead rejected by a residual gate after convergence.
    pub fn invert(&self, x: f64, t: f64) -> Result<f64> {
        let f = |c: f64| self.x_of(c, t) - x;
        let far = 1e6 * x.abs().max(1.0);
        let check_jac = |c: f64| -> Result<f64> {
            let j = self.jacobian(c, t);
            if j <= 0.0 {
                Err(Error::DegenerateChart { c, t, jacobian: j })
            } else {
                Ok(j)
            }
        };
        check_jac(x)?;
        let (mut lo, mut hi) = (x - 1.0, x + 1.0);
        let (mut flo, mut fhi) = (f(lo), f(hi));
        let mut width = 1.0;
        let mut doublings = 0;
        while flo > 0.0 || fhi < 0.0 {
            if doublings >= BRACKET_DOUBLINGS {
                return Err(Error::OutsideImage { x, t });
            }
            width *= 2.0;
            if flo > 0.0 {
                lo = x - width;
                if lo.abs() <= far {
                    check_jac(lo)?;
                }
                flo = f(lo);
            }
            if fhi < 0.0 {
                hi = x + width;
                if hi.abs() <= far {
                    check_jac(hi)?;
                }
                fhi = f(hi);
            }
            doublings += 1;
        }
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        let mut c = 0.5 * (lo + hi);
        for _ in 0..200 {
            let fc = f(c);
            if fc == 0.0 {
                return Ok(c);
            }
            if fc > 0.0 {
                hi = c;
            } else {
                lo = c;
            }
            if hi - lo <= 4.0 * f64::EPSILON * c.abs().max(1.0) {
                break;
            }
            let newton = if c.abs() <= far { c - fc / check_jac(c)? } else { f64::NAN };
            c = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        if f(c).abs() > 1e-7 * x.abs().max(1.0) {
            return Err(Error::OutsideImage { x, t });
        }
        Ok(c)
    }

    /// Slope field u(x, t) recovered through the inverse flow.
    pub fn synthesize_u(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.u_of(self.invert(x, t)?, t))
    }

    /// Slope field as a two-variable scalar field in (x, t); evaluation
    /// outside the image yields NaN.
    pub fn u_field(&self) -> ClosedField {
        let chart = self.clone();
        let chart2 = self.clone();
        ClosedField::with_gradient(
            2,
            move |p: &[f64]| chart.synthesize_u(p[0], p[1]).unwrap_or(f64::NAN),
            move |p: &[f64]| match chart2.invert(p[0], p[1]) {
                Ok(c) => {
                    let j = chart2.jacobian(c, p[1]);
                    let k = chart2.data.a_deriv(c) * p[1] + chart2.data.b_deriv(c);
                    let u = chart2.u_of(c, p[1]);
                    // u_x = K/J, u_t = A - K u / J by the chain rule through
                    // the inverse flow.
                    vec![k / j, chart2.data.a(c) - k * u / j]
                }
                Err(_) => vec![f64::NAN, f64::NAN],
            },
        )
    }

    /// Synthesize the stationary intrinsic graph phi(eta, tau) =
    /// u(-tau/4, eta) over `domain`, with closed partial derivatives and
    /// closed intrinsic gradient A(c*) carried through the inverse flow.
    ///
    /// The domain corners and center are probed first so chart degeneracy
    /// inside the requested window surfaces as an error instead of NaNs.
    pub fn synthesize_phi(&self, domain: BoxDomain, step: f64) -> Result<GraphFunction> {
        if domain.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: domain.dim() });
        }
        for probe in domain.lattice(&[3, 3]) {
            self.invert(-probe[1] / 4.0, probe[0])?;
        }
        let c1 = self.clone();
        let c2 = self.clone();
        let c3 = self.clone();
        let field = ClosedField::with_gradient(
            2,
            move |a: &[f64]| c1.synthesize_u(-a[1] / 4.0, a[0]).unwrap_or(f64::NAN),
            move |a: &[f64]| {
                let (eta, tau) = (a[0], a[1]);
                match c2.invert(-tau / 4.0, eta) {
                    Ok(c) => {
                        let j = c2.jacobian(c, eta);
                        let k = c2.data.a_deriv(c) * eta + c2.data.b_deriv(c);
                        let u = c2.u_of(c, eta);
                        vec![c2.data.a(c) - k * u / j, -k / (4.0 * j)]
                    }
                    Err(_) => vec![f64::NAN, f64::NAN],
                }
            },
        );
        Ok(GraphFunction::from_field(1, domain, Arc::new(field))?
            .with_step(step)?
            .with_wphi(move |a: &[f64]| match c3.invert(-a[1] / 4.0, a[0]) {
                Ok(c) => vec![c3.data.a(c)],
                Err(_) => vec![f64::NAN],
            }))
    }
}

/// Closed-form inverse of the shifted-parabola flow, for cross-checking the
/// numerical inversion; None on the uncovered half-lines.
pub fn shifted_parabola_inverse(x: f64, t: f64) -> Option<f64> {
    let d = 1.0 - 0.5 * t * t;
    if d.abs() < 1e-12 {
        // On the exceptional sections the quadratic degenerates to an affine
        // equation with a single root on the covered half-line.
        if x * t > 0.0 {
            Some((x * x - 4.0) / (4.0 * x))
        } else {
            None
        }
    } else {
        let s = (x * x + d * d).sqrt();
        Some((x * (1.0 + 0.5 * t * t) - std::f64::consts::SQRT_2 * t * s) / (d * d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_chart_inverts_in_closed_form() {
        for alpha in [1.0, 4.0] {
            let chart = CharacteristicChart::new(InitialData::linear(alpha));
            for &(x, t) in &[(0.4, -1.2), (-2.0, 0.7), (3.0, 2.5)] {
                let c = chart.invert(x, t).unwrap();
                let closed = 2.0 * x / (2.0 + alpha * t * t);
                assert_abs_diff_eq!(c, closed, epsilon = 1e-12 * (1.0 + x.abs()));
                assert_abs_diff_eq!(chart.x_of(c, t), x, epsilon = 1e-12 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn inverse_is_monotone_in_x() {
        let chart = CharacteristicChart::new(InitialData::tanh_data());
        let t = 1.7;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..40 {
            let x = -4.0 + 8.0 * i as f64 / 39.0;
            let c = chart.invert(x, t).unwrap();
            assert!(c > prev, "inverse not increasing at x = {x}");
            prev = c;
        }
    }

    #[test]
    fn degenerate_fan_is_flagged() {
        let data = InitialData::degenerate_fan();
        match data.admissibility(65) {
            Admissibility::Violated { b_prime_sq, two_a_prime, .. } => {
                assert_abs_diff_eq!(b_prime_sq, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(two_a_prime, 1.0, epsilon = 1e-12);
            }
            Admissibility::Admissible => panic!("boundary data passed the crossing scan"),
        }
        // Every characteristic meets x = 0 at t = 2 and the jacobian
        // vanishes there identically.
        let chart = CharacteristicChart::new(data);
        assert_eq!(chart.jacobian(0.3, 2.0), 0.0);
        assert!(matches!(chart.invert(0.0, 2.0), Err(Error::DegenerateChart { .. })));
    }

    #[test]
    fn shifted_parabola_matches_its_closed_inverse() {
        let chart = CharacteristicChart::new(InitialData::shifted_parabola());
        let mut worst = 0.0f64;
        for i in 0..30 {
            for j in 0..30 {
                let x = -3.0 + 6.0 * i as f64 / 29.0;
                let t = -3.0 + 6.0 * j as f64 / 29.0;
                if (t.abs() - std::f64::consts::SQRT_2).abs() < 0.05 {
                    continue;
                }
                let closed = shifted_parabola_inverse(x, t).unwrap();
                let c = chart.invert(x, t).unwrap();
                worst = worst.max((c - closed).abs() / (1.0 + x.abs()));
            }
        }
        assert!(worst < 1e-9, "worst inversion defect {worst:.3e}");
    }

    #[test]
    fn shifted_parabola_misses_the_slit() {
        let chart = CharacteristicChart::new(InitialData::shifted_parabola());
        let s2 = std::f64::consts::SQRT_2;
        assert!(matches!(chart.invert(-1.0, s2), Err(Error::OutsideImage { .. })));
        assert!(matches!(chart.invert(1.0, -s2), Err(Error::OutsideImage { .. })));
        // The covered half-lines agree with the degenerate closed form.
        let c = chart.invert(1.0, s2).unwrap();
        assert_abs_diff_eq!(c, shifted_parabola_inverse(1.0, s2).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn synthesized_graph_carries_closed_structure() {
        let alpha = 4.0;
        let chart = CharacteristicChart::new(InitialData::linear(alpha));
        let domain = BoxDomain::symmetric(2, 2.0).unwrap();
        let g = chart.synthesize_phi(domain, 1e-3).unwrap();
        let ap = alpha / 4.0;
        for a in [[0.5, 0.25], [-0.7, 1.1], [1.0, 2.0]] {
            let expected = -ap * a[0] * a[1] / (1.0 + 2.0 * ap * a[0] * a[0]);
            assert_abs_diff_eq!(g.value(&a), expected, epsilon = 1e-10);
            let expected_w = -ap * a[1] / (1.0 + 2.0 * ap * a[0] * a[0]);
            assert_abs_diff_eq!(g.wphi(&a)[0], expected_w, epsilon = 1e-10);
        }
        let defect = g
            .validate_partials(&[vec![0.5, 0.25], vec![-0.7, 1.1]], 1e-5)
            .unwrap();
        assert!(defect < 1e-8, "closed partials defect {defect:.3e}");
    }

    #[test]
    fn domain_classification_of_the_builtins() {
        assert!(matches!(
            InitialData::linear(4.0).classify_domain(),
            DomainVerdict::AllOfPlane { .. }
        ));
        assert!(matches!(
            InitialData::tanh_data().classify_domain(),
            DomainVerdict::AllOfPlane { .. }
        ));
        assert!(matches!(
            InitialData::constants(2.0, -1.0).classify_domain(),
            DomainVerdict::AllOfPlane { .. }
        ));
        assert!(matches!(
            InitialData::degenerate_fan().classify_domain(),
            DomainVerdict::Inadmissible { .. }
        ));
        match InitialData::shifted_parabola().classify_domain() {
            DomainVerdict::ProperSubset { description } => {
                assert!(description.contains("half-lines"));
            }
            v => panic!("expected a proper subset, got {v:?}"),
        }
    }

    #[test]
    fn transport_residuals_vanish_for_synthesized_slopes() {
        let chart = CharacteristicChart::new(InitialData::tanh_data());
        let u = chart.u_field();
        let window = BoxDomain::symmetric(2, 1.5).unwrap();
        let r = InitialData::burgers_residual(&u, Some(&chart), &window, &[7, 7], 1e-4).unwrap();
        assert!(r.transport_defect.unwrap() < 1e-6, "r1 {:?}", r.transport_defect);
        assert!(r.nested_defect < 1e-5, "r2 {}", r.nested_defect);
    }

    #[test]
    fn sampled_data_tracks_its_source() {
        let m = 2001;
        let (lo, hi) = (-2.0, 2.0);
        let a: Vec<f64> = (0..m).map(|i| (lo + (hi - lo) * i as f64 / (m - 1) as f64) as f64).map(|c| c.tanh()).collect();
        let b = vec![0.0; m];
        let data = InitialData::from_samples(lo, hi, a, b).unwrap();
        assert_abs_diff_eq!(data.a(0.37), 0.37f64.tanh(), epsilon = 1e-6);
        assert_abs_diff_eq!(data.a_deriv(0.37), 1.0 / 0.37f64.cosh().powi(2), epsilon = 1e-3);
    }
}
