//! Calibration certificates for area minimizers: horizontal unit sections
//! and their frame divergence, weak-form divergence tests against bump
//! batteries, graphs glued from Lipschitz profiles along characteristic
//! lines, and group-convolution mollification of sections.

use std::sync::Arc;

use serde::Serialize;

use crate::diff::{central_directional, central_partial, one_sided_partial, Side};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{GridField, ScalarField, TestFunction};
use crate::graph::GraphFunction;
use crate::heisenberg::{frame_slots, frame_vector, BasePoint, HPoint};
use crate::quad::{integrate, QuadratureSpec};

/// Acceptance thresholds of [`calibrate_verdict`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationThresholds {
    /// |norm - 1| of the section on the graph.
    pub norm: f64,
    /// Frame divergence away from the singular set.
    pub divergence: f64,
    /// Distance between the section and the graph normal.
    pub normal_match: f64,
}

impl Default for CalibrationThresholds {
    fn default() -> Self {
        Self { norm: 1e-10, divergence: 1e-6, normal_match: 1e-8 }
    }
}

/// Locus where a section is undefined or discontinuous.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularSet {
    Empty,
    /// {p : p[axis] = value}.
    Hyperplane { axis: usize, value: f64 },
    /// {p : |p[axis] - value| <= half_width}.
    Slab { axis: usize, value: f64, half_width: f64 },
}

impl SingularSet {
    pub fn distance(&self, p: &[f64]) -> f64 {
        match self {
            SingularSet::Empty => f64::INFINITY,
            SingularSet::Hyperplane { axis, value } => (p[*axis] - value).abs(),
            SingularSet::Slab { axis, value, half_width } => {
                ((p[*axis] - value).abs() - half_width).max(0.0)
            }
        }
    }

    /// Enlarge by `margin` in the normal direction.
    pub fn thickened(&self, margin: f64) -> SingularSet {
        match *self {
            SingularSet::Empty => SingularSet::Empty,
            SingularSet::Hyperplane { axis, value } => {
                SingularSet::Slab { axis, value, half_width: margin }
            }
            SingularSet::Slab { axis, value, half_width } => {
                SingularSet::Slab { axis, value, half_width: half_width + margin }
            }
        }
    }
}

type SectionFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A horizontal vector field on an ambient region, stored as frame
/// coefficients (X_1..X_n, Y_1..Y_n) per point.
#[derive(Clone)]
pub struct HorizontalSection {
    n: usize,
    region: BoxDomain,
    eval: Arc<SectionFn>,
    singular: SingularSet,
    resolution: Option<f64>,
    label: String,
}

impl HorizontalSection {
    pub fn new<F>(
        n: usize,
        region: BoxDomain,
        singular: SingularSet,
        label: &str,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if region.dim() != 2 * n + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 1, got: region.dim() });
        }
        Ok(Self {
            n,
            region,
            eval: Arc::new(eval),
            singular,
            resolution: None,
            label: label.into(),
        })
    }

    /// Constant section with the given frame coefficients, normalized.
    pub fn constant(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: coeffs.len() });
        }
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter { detail: "constant section needs a nonzero direction".into() });
        }
        let unit: Vec<f64> = coeffs.iter().map(|c| c / norm).collect();
        Self::new(
            n,
            BoxDomain::symmetric(2 * n + 1, 1e6)?,
            SingularSet::Empty,
            "constant",
            move |_| unit.clone(),
        )
    }

    /// The angular unit section sign(y) (-y/r, x/r) on the first group,
    /// which calibrates every graph in the stationary family synthesized
    /// from linear data; alpha only tags the intended family member.
    pub fn dgn_xyt(alpha: f64) -> Result<Self> {
        Self::new(
            1,
            BoxDomain::symmetric(3, 1e6)?,
            SingularSet::Hyperplane { axis: 1, value: 0.0 },
            &format!("dgn_xyt({alpha})"),
            |p: &[f64]| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let s = p[1].signum();
                if r == 0.0 {
                    return vec![0.0, 0.0];
                }
                vec![-s * p[1] / r, s * p[0] / r]
            },
        )
    }

    /// The piecewise-constant section (0, -sign(4x + a)) normal to the
    /// t-graph of 2xy + ay + b away from its characteristic line.
    pub fn tgraph_poly(a: f64, b: f64) -> Result<Self> {
        Self::new(
            1,
            BoxDomain::symmetric(3, 1e6)?,
            SingularSet::Hyperplane { axis: 0, value: -a / 4.0 },
            &format!("tgraph({a},{b})"),
            move |p: &[f64]| vec![0.0, -(4.0 * p[0] + a).signum()],
        )
    }

    /// The unit normal of the intrinsic lift of the classical graph of
    /// log(cos x_2 / cos y_1), defined wherever |y_1|, |x_2| < pi/2.
    pub fn scherk_lift() -> Result<Self> {
        let region = BoxDomain::new(
            vec![-1e6, -0.7, -0.7, -1e6, -1e6],
            vec![1e6, 0.7, 0.7, 1e6, 1e6],
        )?;
        Self::new(2, region, SingularSet::Empty, "scherk_lift", |p: &[f64]| {
            let (x2, y1) = (p[1], p[2]);
            let (te, tv) = (y1.tan(), x2.tan());
            let w = (1.0 + te * te + tv * tv).sqrt();
            vec![-1.0 / w, -tv / w, te / w, 0.0]
        })
    }

    /// Section interpolated from lattice samples of the two frame
    /// coefficients on a first-group box.
    pub fn from_grids(region: BoxDomain, counts: Vec<usize>, x_coeff: Vec<f64>, y_coeff: Vec<f64>) -> Result<Self> {
        let gx = GridField::new(region.clone(), counts.clone(), x_coeff)?;
        let gy = GridField::new(region.clone(), counts, y_coeff)?;
        let resolution = gx.max_step();
        let mut s = Self::new(1, region, SingularSet::Empty, "grid", move |p: &[f64]| {
            vec![gx.value(p), gy.value(p)]
        })?;
        s.resolution = Some(resolution);
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn region(&self) -> &BoxDomain {
        &self.region
    }

    pub fn singular(&self) -> &SingularSet {
        &self.singular
    }

    pub fn resolution(&self) -> Option<f64> {
        self.resolution
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, p: &[f64]) -> Vec<f64> {
        debug_assert_eq!(p.len(), 2 * self.n + 1);
        (self.eval)(p)
    }

    /// Group-convolution mollification at scale eps: the kernel is a bump in
    /// the homogeneous norm sampled on a (2m+1)^{2n+1} lattice of the
    /// anisotropic box |z_i| <= eps, |t| <= eps^2, with weights normalized to
    /// unit mass. Convolution acts by left kernel translations, so it
    /// commutes with right translations and with the left-invariant frame.
    pub fn mollify(&self, eps: f64, m: usize) -> Result<HorizontalSection> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("mollification scale must be positive, got {eps}") });
        }
        if m < 2 {
            return Err(Error::InvalidParameter { detail: "kernel lattice needs at least 2 points per half-axis".into() });
        }
        if let Some(res) = self.resolution {
            if res > eps / 2.0 {
                return Err(Error::ResolutionViolated { resolution: res, scale: eps });
            }
        }
        let n = self.n;
        let d = 2 * n + 1;
        let count = 2 * m + 1;
        let mut kernel: Vec<(HPoint, f64)> = Vec::new();
        let mut total = 0.0;
        let mut idx = vec![0usize; d];
        'nodes: loop {
            let mut coords = vec![0.0; d];
            for ax in 0..d {
                let u = idx[ax] as f64 / m as f64 - 1.0;
                coords[ax] = if ax == d - 1 { u * eps * eps } else { u * eps };
            }
            let y = HPoint::new(coords)?;
            let w = crate::field::bump3(y.dilate(1.0 / eps)?.norm_inf());
            if w > 0.0 {
                total += w;
                kernel.push((y.inverse(), w));
            }
            for ax in (0..d).rev() {
                idx[ax] += 1;
                if idx[ax] < count {
                    continue 'nodes;
                }
                idx[ax] = 0;
            }
            break;
        }
        for entry in &mut kernel {
            entry.1 /= total;
        }
        // Shrink the region so every kernel translate stays inside; the
        // center displacement grows with the horizontal extent of the region.
        let zmax = (0..2 * n)
            .map(|ax| self.region.lo()[ax].abs().max(self.region.hi()[ax].abs()))
            .fold(0.0, f64::max);
        let t_margin = eps * eps + 2.0 * eps * zmax * n as f64;
        let lo: Vec<f64> = (0..d)
            .map(|ax| self.region.lo()[ax] + if ax == d - 1 { t_margin } else { eps })
            .collect();
        let hi: Vec<f64> = (0..d)
            .map(|ax| self.region.hi()[ax] - if ax == d - 1 { t_margin } else { eps })
            .collect();
        let region = BoxDomain::new(lo, hi).map_err(|_| Error::InvalidParameter {
            detail: format!("region too small to mollify at scale {eps}"),
        })?;
        let inner = self.clone();
        let mut out = Self::new(
            n,
            region,
            self.singular.thickened(eps),
            &format!("mollified({eps}) {}", self.label),
            move |p: &[f64]| {
                let hp = HPoint::new(p.to_vec()).expect("finite evaluation point");
                let mut acc = vec![0.0; 2 * n];
                for (y_inv, w) in &kernel {
                    let q = y_inv.mul(&hp).expect("matching group index");
                    let v = inner.value(q.coords());
                    for (a, vi) in acc.iter_mut().zip(&v) {
                        *a += w * vi;
                    }
                }
                acc
            },
        )?;
        out.resolution = self.resolution;
        Ok(out)
    }
}

/// Lattice of `counts` points in `window` that keeps `margin` away from the
/// singular set.
pub fn lattice_avoiding(
    window: &BoxDomain,
    counts: &[usize],
    singular: &SingularSet,
    margin: f64,
) -> Vec<Vec<f64>> {
    window
        .lattice(counts)
        .into_iter()
        .filter(|p| singular.distance(p) >= margin)
        .collect()
}

/// Largest frame divergence sum_j (X_j nu_Xj + Y_j nu_Yj) over the points,
/// by central differences at step `h` along the frozen frame directions.
/// Points must keep a 2h margin from the singular set.
pub fn divx_residual(section: &HorizontalSection, points: &[Vec<f64>], h: f64) -> Result<f64> {
    let n = section.n();
    let mut worst = 0.0f64;
    for p in points {
        if p.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 1, got: p.len() });
        }
        if section.singular().distance(p) < 2.0 * h {
            return Err(Error::OutsideDomain {
                detail: format!("point {p:?} is within the stencil margin of the singular set"),
            });
        }
        let hp = HPoint::new(p.clone())?;
        let mut div = 0.0;
        for (idx, slot) in frame_slots(n).enumerate() {
            let dir = frame_vector(&hp, slot);
            let comp = |q: &[f64]| section.value(q)[idx];
            div += central_directional(&comp, p, &dir, h);
        }
        worst = worst.max(div.abs());
    }
    Ok(worst)
}

/// Outcome of checking a section as a calibration of a graph.
#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub max_norm_defect: f64,
    pub max_divergence: f64,
    pub max_normal_mismatch: f64,
    pub calibrated: bool,
    pub failures: Vec<String>,
}

/// Check the three calibration properties of `section` against `graph` over
/// a lattice of base points: unit norm on the graph, vanishing frame
/// divergence at the graph points, and agreement with the graph normal.
pub fn calibrate_verdict(
    section: &HorizontalSection,
    graph: &GraphFunction,
    base_window: &BoxDomain,
    counts: &[usize],
    h: f64,
    thresholds: &CalibrationThresholds,
) -> Result<CalibrationReport> {
    if section.n() != graph.n() {
        return Err(Error::DimensionMismatch { expected: graph.n(), got: section.n() });
    }
    if !graph.domain().contains_box(base_window) {
        return Err(Error::OutsideDomain { detail: "window leaves the graph domain".into() });
    }
    let n = graph.n();
    let mut norm_defect = 0.0f64;
    let mut mismatch = 0.0f64;
    let mut points = Vec::new();
    for a in base_window.lattice(counts) {
        let base = BasePoint::new(n, a.clone())?;
        let p = base.graph_point(graph.value(&a));
        let nu = section.value(p.coords());
        if nu.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: nu.len() });
        }
        let norm = nu.iter().map(|c| c * c).sum::<f64>().sqrt();
        norm_defect = norm_defect.max((norm - 1.0).abs());
        let normal = graph.horizontal_normal(&a)?;
        let diff: f64 = nu
            .iter()
            .zip(normal.coeffs())
            .map(|(s, g)| (s - g) * (s - g))
            .sum::<f64>()
            .sqrt();
        mismatch = mismatch.max(diff);
        points.push(p.coords().to_vec());
    }
    let divergence = divx_residual(section, &points, h)?;
    let mut failures = Vec::new();
    if norm_defect > thresholds.norm {
        failures.push(format!("norm defect {norm_defect:.3e} exceeds {:.3e}", thresholds.norm));
    }
    if divergence > thresholds.divergence {
        failures.push(format!("divergence {divergence:.3e} exceeds {:.3e}", thresholds.divergence));
    }
    if mismatch > thresholds.normal_match {
        failures.push(format!(
            "normal mismatch {mismatch:.3e} exceeds {:.3e}",
            thresholds.normal_match
        ));
    }
    Ok(CalibrationReport {
        max_norm_defect: norm_defect,
        max_divergence: divergence,
        max_normal_mismatch: mismatch,
        calibrated: failures.is_empty(),
        failures,
    })
}

/// Unit normal of the t-graph {t = f(x, y)} in frame coefficients:
/// normalize(-f_x + 2y, -f_y - 2x). Points where the unnormalized vector
/// drops below 1e-12 are characteristic.
pub fn tgraph_normal(f: &dyn ScalarField, x: f64, y: f64, h: f64) -> Result<[f64; 2]> {
    let p = [x, y];
    let g = f.gradient(&p).unwrap_or_else(|| {
        let v = |q: &[f64]| f.value(q);
        vec![central_partial(&v, &p, 0, h), central_partial(&v, &p, 1, h)]
    });
    let vx = -g[0] + 2.0 * y;
    let vy = -g[1] - 2.0 * x;
    let norm = (vx * vx + vy * vy).sqrt();
    if norm < 1e-12 {
        return Err(Error::CharacteristicPoint { x, y });
    }
    Ok([vx / norm, vy / norm])
}

/// The t-graph height 2xy + ay + b whose normal is piecewise constant.
pub fn tgraph_poly_height(a: f64, b: f64) -> crate::field::ClosedField {
    crate::field::ClosedField::with_gradient(
        2,
        move |p: &[f64]| 2.0 * p[0] * p[1] + a * p[1] + b,
        move |p: &[f64]| vec![2.0 * p[1], 2.0 * p[0] + a],
    )
}

/// Largest weak-form divergence integral |int <N, grad psi>| of a plane
/// field over a battery of test functions; each integral runs over the test
/// function's own support.
pub fn weak_divergence_residual<F>(
    field: F,
    battery: &[TestFunction],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(&[f64]) -> [f64; 2] + Sync,
{
    let mut worst = 0.0f64;
    for psi in battery {
        if psi.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
        }
        let integral = integrate(spec, psi.support(), |p| {
            let nvec = field(p);
            let g = psi.gradient(p, 1e-6);
            nvec[0] * g[0] + nvec[1] * g[1]
        })?;
        worst = worst.max(integral.abs());
    }
    Ok(worst)
}

type ProfileFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A Lipschitz profile beta(t) with its Lipschitz bound and kink locations.
#[derive(Clone)]
pub struct LipschitzProfile {
    beta: Arc<ProfileFn>,
    lip: f64,
    kinks: Vec<f64>,
    label: String,
}

impl LipschitzProfile {
    pub fn new<F>(label: &str, lip: f64, kinks: Vec<f64>, beta: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lip >= 0.0) || !lip.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("bad Lipschitz bound {lip}") });
        }
        Ok(Self { beta: Arc::new(beta), lip, kinks, label: label.into() })
    }

    /// beta(t) = |t|: the profile of a nonsmooth entire minimizer.
    pub fn abs() -> Self {
        Self { beta: Arc::new(f64::abs), lip: 1.0, kinks: vec![0.0], label: "abs".into() }
    }

    /// beta(t) = sqrt(t^2 + eps^2), the smooth approximation of [`Self::abs`].
    pub fn mollified_abs(eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter { detail: format!("scale must be positive, got {eps}") });
        }
        Self::new(&format!("mollified_abs({eps})"), 1.0, vec![], move |t| (t * t + eps * eps).sqrt())
    }

    pub fn linear(k: f64) -> Result<Self> {
        Self::new(&format!("linear({k})"), k.abs(), vec![], move |t| k * t)
    }

    pub fn constant(b: f64) -> Result<Self> {
        Self::new(&format!("constant({b})"), 0.0, vec![], move |_| b)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.beta)(t)
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lip
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Largest sampled difference quotient; used by tests to confirm the
    /// declared bound.
    pub fn max_difference_quotient(&self, half_width: f64, samples: usize) -> f64 {
        let mut worst = 0.0f64;
        let mut prev_t = -half_width;
        let mut prev_v = self.value(prev_t);
        for i in 1..=samples {
            let t = -half_width + 2.0 * half_width * i as f64 / samples as f64;
            let v = self.value(t);
            worst = worst.max(((v - prev_v) / (t - prev_t)).abs());
            prev_t = t;
            prev_v = v;
        }
        worst
    }
}

/// Graph glued from a Lipschitz profile along the characteristic lines of
/// zero intrinsic slope: phi(eta, tau) = beta(t) where t solves
/// t - 4 eta beta(t) = tau. Defined for |eta| < 1/(4 L).
#[derive(Clone)]
pub struct LipschitzGraph {
    profile: LipschitzProfile,
}

/// Build the glued graph from a profile.
pub fn lipschitz_phi_from_beta(profile: LipschitzProfile) -> LipschitzGraph {
    LipschitzGraph { profile }
}

impl LipschitzGraph {
    pub fn profile(&self) -> &LipschitzProfile {
        &self.profile
    }

    /// Half-width 1/(4L) of the eta-strip on which the gluing map is
    /// invertible; infinite for constant profiles.
    pub fn slope_bound(&self) -> f64 {
        if self.profile.lip == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (4.0 * self.profile.lip)
        }
    }

    /// Solve t - 4 eta beta(t) = tau; the map is strictly increasing in t on
    /// the admissible strip. Bisection interleaved with false-position steps
    /// lands exact roots exactly (the final bracket endpoints are compared
    /// by residual).
    fn characteristic_root(&self, eta: f64, tau: f64) -> Result<f64> {
        let bound = self.slope_bound();
        if !(eta.abs() < bound) {
            return Err(Error::SlopeBound { eta, bound });
        }
        if eta == 0.0 {
            return Ok(tau);
        }
        let g = |t: f64| t - 4.0 * eta * self.profile.value(t) - tau;
        let mut width = 1.0;
        let (mut lo, mut hi) = (tau - width, tau + width);
        let (mut flo, mut fhi) = (g(lo), g(hi));
        let mut doublings = 0;
        while flo > 0.0 || fhi < 0.0 {
            if doublings >= 60 {
                return Err(Error::OutsideDomain {
                    detail: format!("no characteristic through eta={eta}, tau={tau}"),
                });
            }
            width *= 2.0;
            if flo > 0.0 {
                lo = tau - width;
                flo = g(lo);
            }
            if fhi < 0.0 {
                hi = tau + width;
                fhi = g(hi);
            }
            doublings += 1;
        }
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        for iter in 0..200 {
            let mid = if iter % 2 == 0 || fhi == flo {
                0.5 * (lo + hi)
            } else {
                // False position: exact on the piecewise-linear branches.
                let t = hi - fhi * (hi - lo) / (fhi - flo);
                if t > lo && t < hi {
                    t
                } else {
                    0.5 * (lo + hi)
                }
            };
            let fm = g(mid);
            if fm == 0.0 {
                return Ok(mid);
            }
            if fm > 0.0 {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
            if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
                break;
            }
        }
        Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
    }

    /// Graph height at (eta, tau).
    pub fn value(&self, eta: f64, tau: f64) -> Result<f64> {
        Ok(self.profile.value(self.characteristic_root(eta, tau)?))
    }

    /// Images of the profile kinks on the section at height eta: the graph
    /// is smooth away from tau in this set.
    pub fn kink_images(&self, eta: f64) -> Vec<f64> {
        self.profile.kinks.iter().map(|&k| k - 4.0 * eta * self.profile.value(k)).collect()
    }

    /// Largest |phi_eta - 4 phi phi_tau| over the points, with the
    /// tau-partials taken one-sided away from tau = 0 at both difference
    /// levels. This is the pointwise intrinsic slope, which vanishes
    /// almost everywhere for glued graphs. Points must keep `margin` away
    /// from every kink image.
    pub fn wphi_ae_residual(&self, points: &[(f64, f64)], h: f64, margin: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for &(eta, tau) in points {
            for img in self.kink_images(eta) {
                if (tau - img).abs() < margin {
                    return Err(Error::OutsideDomain {
                        detail: format!(
                            "point (eta={eta}, tau={tau}) is within {margin} of a kink image"
                        ),
                    });
                }
            }
            let side = if tau >= 0.0 { Side::Plus } else { Side::Minus };
            let phi = |p: &[f64]| self.value(p[0], p[1]).unwrap_or(f64::NAN);
            let p = [eta, tau];
            let w = central_partial(&phi, &p, 0, h)
                - 4.0 * phi(&p) * one_sided_partial(&phi, &p, 1, h, side);
            worst = worst.max(w.abs());
        }
        Ok(worst)
    }
}

/// Closed form of the glued graph of beta = |t|:
/// tau/(1 - 4 eta) for tau >= 0 and -tau/(1 + 4 eta) for tau < 0.
pub fn abs_phi_closed(eta: f64, tau: f64) -> f64 {
    if tau >= 0.0 {
        tau / (1.0 - 4.0 * eta)
    } else {
        -tau / (1.0 + 4.0 * eta)
    }
}

/// Largest central-difference intrinsic slope of the glued graphs of
/// beta_eps = sqrt(t^2 + eps^2) over the lattice, one entry per scale; the
/// step is tied to eps^2 so the residual tracks the smoothing scale.
pub fn mollified_profile_sweep(
    eps_list: &[f64],
    window: &BoxDomain,
    counts: &[usize],
) -> Result<Vec<f64>> {
    if window.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: window.dim() });
    }
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let graph = lipschitz_phi_from_beta(LipschitzProfile::mollified_abs(eps)?);
        let h = (eps * eps / 100.0).min(1e-4);
        let phi = |p: &[f64]| graph.value(p[0], p[1]).unwrap_or(f64::NAN);
        let mut worst = 0.0f64;
        for p in window.lattice(counts) {
            let w = central_partial(&phi, &p, 0, h)
                - 4.0 * phi(&p) * central_partial(&phi, &p, 1, h);
            worst = worst.max(w.abs());
        }
        out.push(worst);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_sections_are_exactly_divergence_free() {
        let s = HorizontalSection::constant(1, vec![3.0, 4.0]).unwrap();
        let v = s.value(&[0.3, -0.5, 2.0]);
        assert_abs_diff_eq!(v[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 0.8, epsilon = 1e-15);
        let points: Vec<Vec<f64>> =
            vec![vec![0.0, 0.0, 0.0], vec![1.0, -2.0, 0.5], vec![-0.3, 0.7, -4.0]];
        assert_eq!(divx_residual(&s, &points, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn angular_section_is_divergence_free_off_its_singular_plane() {
        let s = HorizontalSection::dgn_xyt(1.0).unwrap();
        let window = BoxDomain::new(vec![-1.0, 0.1, -1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let points = lattice_avoiding(&window, &[5, 5, 3], s.singular(), 0.1);
        assert!(!points.is_empty());
        let r = divx_residual(&s, &points, 1e-6).unwrap();
        assert!(r < 1e-8, "divergence {r:.3e}");
    }

    #[test]
    fn divergence_margin_is_enforced() {
        let s = HorizontalSection::dgn_xyt(1.0).unwrap();
        let bad = vec![vec![0.5, 1e-9, 0.0]];
        assert!(matches!(divx_residual(&s, &bad, 1e-6), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn angular_section_calibrates_the_stationary_family() {
        for alpha in [1.0, 4.0] {
            let s = HorizontalSection::dgn_xyt(alpha).unwrap();
            let g = GraphFunction::dgn(alpha).unwrap();
            let window = BoxDomain::new(vec![0.15, -1.0], vec![1.0, 1.0]).unwrap();
            let report = calibrate_verdict(
                &s,
                &g,
                &window,
                &[7, 7],
                1e-6,
                &CalibrationThresholds::default(),
            )
            .unwrap();
            assert!(report.calibrated, "failures: {:?}", report.failures);
            assert!(report.max_normal_mismatch < 1e-12);
        }
    }

    #[test]
    fn tgraph_normals_match_the_section_and_flag_characteristic_points() {
        let (a, b) = (1.0, -0.5);
        let f = tgraph_poly_height(a, b);
        let s = HorizontalSection::tgraph_poly(a, b).unwrap();
        for &(x, y) in &[(0.5, 0.3), (-1.0, 2.0), (0.2, -0.7)] {
            let nu = tgraph_normal(&f, x, y, 1e-6).unwrap();
            let sv = s.value(&[x, y, f.value(&[x, y])]);
            assert_abs_diff_eq!(nu[0], sv[0], epsilon = 1e-12);
            assert_abs_diff_eq!(nu[1], sv[1], epsilon = 1e-12);
        }
        assert!(matches!(
            tgraph_normal(&f, -a / 4.0, 1.3, 1e-6),
            Err(Error::CharacteristicPoint { .. })
        ));
    }

    #[test]
    fn weak_divergence_vanishes_for_one_sided_steps_but_not_sources() {
        let window = BoxDomain::symmetric(2, 1.0).unwrap();
        let battery = crate::field::bump_battery(&window, 5, &[0.5, 0.25, 0.125]).unwrap();
        assert_eq!(battery.len(), 75);
        let spec = QuadratureSpec::fixed(8, 16);
        let step = |p: &[f64]| [0.0, -(4.0 * p[0] - 1.0).signum()];
        let r = weak_divergence_residual(step, &battery, &spec).unwrap();
        assert!(r < 1e-8, "weak residual {r:.3e}");
        // A genuinely sourced field fails: <(x, 0), grad psi> integrates to
        // -int psi < 0.
        let sourced = |p: &[f64]| [p[0], 0.0];
        let r = weak_divergence_residual(sourced, &battery, &spec).unwrap();
        assert!(r > 1e-3, "sourced field looked divergence-free: {r:.3e}");
    }

    #[test]
    fn glued_graph_reproduces_the_closed_form_exactly_on_dyadic_data() {
        let g = lipschitz_phi_from_beta(LipschitzProfile::abs());
        // Grid chosen so the branch divisors 1 -/+ 4 eta are powers of two
        // and every intermediate of both routes is exact.
        for &eta in &[0.0, 0.125, 0.1875, 0.21875] {
            for k in 0..=16 {
                let tau = k as f64 / 8.0;
                assert_eq!(g.value(eta, tau).unwrap(), abs_phi_closed(eta, tau));
                assert_eq!(g.value(-eta, -tau).unwrap(), abs_phi_closed(-eta, -tau));
            }
        }
        // The section eta = 0 returns the profile itself for every tau.
        for &tau in &[-0.7, -0.123, 0.0, 0.456, 1.9] {
            assert_eq!(g.value(0.0, tau).unwrap(), tau.abs());
        }
    }

    #[test]
    fn glued_graph_respects_the_slope_bound() {
        let g = lipschitz_phi_from_beta(LipschitzProfile::abs());
        assert!(matches!(g.value(0.25, 1.0), Err(Error::SlopeBound { .. })));
        assert!(g.value(0.2499, 1.0).is_ok());
    }

    #[test]
    fn intrinsic_slope_vanishes_off_the_kink_images() {
        let g = lipschitz_phi_from_beta(LipschitzProfile::abs());
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
        let r = g.wphi_ae_residual(&points, 1e-6, 0.04).unwrap();
        assert!(r < 1e-8, "a.e. slope residual {r:.3e}");
        // The margin gate trips next to the kink image.
        assert!(matches!(
            g.wphi_ae_residual(&[(0.1, 0.001)], 1e-6, 0.04),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn mollified_profiles_flatten_as_the_scale_shrinks() {
        let window = BoxDomain::new(vec![-0.125, -1.0], vec![0.125, 1.0]).unwrap();
        let sweep = mollified_profile_sweep(&[0.1, 0.05, 0.025], &window, &[5, 9]).unwrap();
        assert!(sweep[0] > sweep[1] && sweep[1] > sweep[2], "sweep {sweep:?}");
        assert!(sweep[2] < 1e-2, "finest residual {:.3e}", sweep[2]);
    }

    #[test]
    fn mollification_preserves_constants_and_sup_norms() {
        let s = HorizontalSection::constant(1, vec![1.0, 0.0]).unwrap();
        let m = s.mollify(0.25, 3).unwrap();
        let v = m.value(&[0.2, -0.4, 1.0]);
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
        // Sup norms never grow: kernel weights are a convex combination.
        let varying = HorizontalSection::new(
            1,
            BoxDomain::symmetric(3, 4.0).unwrap(),
            SingularSet::Empty,
            "trig",
            |p: &[f64]| vec![(2.0 * p[1]).sin(), (1.5 * p[0]).cos()],
        )
        .unwrap();
        let m = varying.mollify(0.2, 3).unwrap();
        for p in m.region().lattice(&[4, 4, 4]) {
            let v = m.value(&p);
            let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!(norm <= 2.0f64.sqrt() + 1e-10);
        }
    }

    #[test]
    fn mollification_converges_to_smooth_sections() {
        let varying = HorizontalSection::new(
            1,
            BoxDomain::symmetric(3, 4.0).unwrap(),
            SingularSet::Empty,
            "trig",
            |p: &[f64]| vec![(0.8 * p[1]).sin(), (0.5 * p[0]).cos()],
        )
        .unwrap();
        let probe = vec![0.3, -0.2, 0.6];
        let exact = varying.value(&probe);
        let mut prev = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1] {
            let m = varying.mollify(eps, 3).unwrap();
            let v = m.value(&probe);
            let err = ((v[0] - exact[0]).powi(2) + (v[1] - exact[1]).powi(2)).sqrt();
            assert!(err < prev, "no improvement at eps={eps}: {err:.3e} vs {prev:.3e}");
            prev = err;
        }
        assert!(prev < 5e-2, "finest mollification error {prev:.3e}");
    }

    #[test]
    fn mollification_commutes_with_right_translations() {
        let base = HorizontalSection::new(
            1,
            BoxDomain::symmetric(3, 6.0).unwrap(),
            SingularSet::Empty,
            "trig",
            |p: &[f64]| vec![(0.7 * p[1]).sin() * (0.3 * p[2]).cos(), (0.4 * p[0]).cos()],
        )
        .unwrap();
        let z = HPoint::from_xyt(0.15, -0.2, 0.1);
        let translate = |s: &HorizontalSection| -> HorizontalSection {
            let inner = s.clone();
            let z = z.clone();
            HorizontalSection::new(
                1,
                BoxDomain::symmetric(3, 4.0).unwrap(),
                SingularSet::Empty,
                "translated",
                move |p: &[f64]| {
                    let hp = HPoint::new(p.to_vec()).unwrap();
                    inner.value(hp.mul(&z).unwrap().coords())
                },
            )
            .unwrap()
        };
        let eps = 0.25;
        let route_a = translate(&base).mollify(eps, 3).unwrap();
        let route_b = translate(&base.mollify(eps, 3).unwrap());
        for p in [[0.4, 0.3, 0.5], [-0.6, 0.2, -1.0], [0.0, -0.5, 1.5]] {
            let va = route_a.value(&p);
            let vb = route_b.value(&p);
            assert_abs_diff_eq!(va[0], vb[0], epsilon = 1e-10);
            assert_abs_diff_eq!(va[1], vb[1], epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_sections_enforce_the_resolution_gate() {
        let region = BoxDomain::symmetric(3, 1.0).unwrap();
        let counts = vec![5, 5, 5];
        let values = vec![1.0; 125];
        let s = HorizontalSection::from_grids(region, counts, values.clone(), values).unwrap();
        // Lattice step is 0.5; mollifying at a comparable scale must fail.
        assert!(matches!(s.mollify(0.3, 3), Err(Error::ResolutionViolated { .. })));
    }

    #[test]
    fn scherk_lift_section_is_unit() {
        let s = HorizontalSection::scherk_lift().unwrap();
        for p in [[0.0, 0.2, -0.1, 0.4, 1.0], [0.5, -0.3, 0.25, 0.0, -2.0]] {
            let v = s.value(&p);
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-14);
        }
    }
}
