//! Scalar fields over box domains: closed-form fields with optional exact
//! gradients, grid-sampled fields with multilinear interpolation and lattice
//! differences, and the compactly supported C^2 test profiles used for
//! variations and weak-form checks.

use std::sync::Arc;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// A real-valued field on R^d. `gradient` returns `None` when no closed form
/// is available; callers fall back to finite differences at their own step.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl ScalarField for Arc<dyn ScalarField> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        (**self).gradient(x)
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Closed-form field built from closures.
#[derive(Clone)]
pub struct ClosedField {
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl ClosedField {
    pub fn new<F>(dim: usize, value: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { dim, value: Arc::new(value), gradient: None }
    }

    pub fn with_gradient<F, G>(dim: usize, value: F, gradient: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { dim, value: Arc::new(value), gradient: Some(Arc::new(gradient)) }
    }
}

impl ScalarField for ClosedField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }
}

/// Field sampled on a uniform lattice over a box, evaluated by multilinear
/// interpolation. Gradients interpolate central lattice differences of the
/// samples (one-sided at the boundary), so they are second-order accurate
/// away from the outermost cells.
#[derive(Debug, Clone)]
pub struct GridField {
    bbox: BoxDomain,
    counts: Vec<usize>,
    values: Arc<Vec<f64>>,
}

impl GridField {
    /// `values` in lexicographic order (last axis fastest), one per lattice
    /// node; every axis needs at least two nodes.
    pub fn new(bbox: BoxDomain, counts: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if counts.len() != bbox.dim() {
            return Err(Error::DimensionMismatch { expected: bbox.dim(), got: counts.len() });
        }
        if counts.iter().any(|&c| c < 2) {
            return Err(Error::InvalidGrid("every axis needs at least 2 samples".into()));
        }
        let total: usize = counts.iter().product();
        if values.len() != total {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples for counts {:?}, got {}",
                total,
                counts,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "grid sample" });
        }
        Ok(Self { bbox, counts, values: Arc::new(values) })
    }

    pub fn bbox(&self) -> &BoxDomain {
        &self.bbox
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Lattice step along each axis.
    pub fn steps(&self) -> Vec<f64> {
        (0..self.bbox.dim())
            .map(|ax| self.bbox.extent(ax) / (self.counts[ax] - 1) as f64)
            .collect()
    }

    /// Largest lattice step over all axes.
    pub fn max_step(&self) -> f64 {
        self.steps().into_iter().fold(0.0, f64::max)
    }

    fn node_value(&self, idx: &[usize]) -> f64 {
        let mut flat = 0;
        for (ax, &i) in idx.iter().enumerate() {
            flat = flat * self.counts[ax] + i;
        }
        self.values[flat]
    }

    /// Central difference of the samples along `axis` at a lattice node,
    /// one-sided (first order) on the boundary layers.
    fn node_diff(&self, idx: &[usize], axis: usize) -> f64 {
        let step = self.bbox.extent(axis) / (self.counts[axis] - 1) as f64;
        let i = idx[axis];
        let mut lo = idx.to_vec();
        let mut hi = idx.to_vec();
        if i == 0 {
            hi[axis] = 1;
            (self.node_value(&hi) - self.node_value(idx)) / step
        } else if i == self.counts[axis] - 1 {
            lo[axis] = i - 1;
            (self.node_value(idx) - self.node_value(&lo)) / step
        } else {
            lo[axis] = i - 1;
            hi[axis] = i + 1;
            (self.node_value(&hi) - self.node_value(&lo)) / (2.0 * step)
        }
    }

    /// Cell index and fractional offset per axis, clamped to the lattice.
    fn locate(&self, x: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let mut cell = Vec::with_capacity(x.len());
        let mut frac = Vec::with_capacity(x.len());
        for ax in 0..x.len() {
            let step = self.bbox.extent(ax) / (self.counts[ax] - 1) as f64;
            let u = (x[ax] - self.bbox.lo()[ax]) / step;
            let max_cell = self.counts[ax] - 2;
            let i = (u.floor() as isize).clamp(0, max_cell as isize) as usize;
            frac.push((u - i as f64).clamp(0.0, 1.0));
            cell.push(i);
        }
        (cell, frac)
    }

    fn interpolate<F>(&self, x: &[f64], node: F) -> f64
    where
        F: Fn(&[usize]) -> f64,
    {
        let d = x.len();
        let (cell, frac) = self.locate(x);
        let mut acc = 0.0;
        let mut idx = vec![0usize; d];
        for corner in 0..1usize << d {
            let mut w = 1.0;
            for ax in 0..d {
                let hi = (corner >> ax) & 1 == 1;
                idx[ax] = cell[ax] + hi as usize;
                w *= if hi { frac[ax] } else { 1.0 - frac[ax] };
            }
            if w != 0.0 {
                acc += w * node(&idx);
            }
        }
        acc
    }
}

impl ScalarField for GridField {
    fn dim(&self) -> usize {
        self.bbox.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.interpolate(x, |idx| self.node_value(idx))
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some((0..self.dim()).map(|ax| self.interpolate(x, |idx| self.node_diff(idx, ax))).collect())
    }
}

/// C^2 bump profile (1 - u^2)^3 on |u| < 1, zero outside.
pub fn bump3(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let p = 1.0 - u * u;
        p * p * p
    }
}

/// Derivative of [`bump3`].
pub fn bump3_deriv(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let p = 1.0 - u * u;
        -6.0 * u * p * p
    }
}

/// C^1 plateau cutoff: 1 on [-1/eps, 1/eps], 0 outside (-2/eps, 2/eps),
/// cubic smoothstep ramps in between.
#[derive(Debug, Clone, Copy)]
pub struct PlateauCutoff {
    eps: f64,
}

impl PlateauCutoff {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("cutoff scale must be positive, got {eps}") });
        }
        Ok(Self { eps })
    }

    pub fn plateau_half_width(&self) -> f64 {
        1.0 / self.eps
    }

    pub fn support_half_width(&self) -> f64 {
        2.0 / self.eps
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = t.abs() * self.eps;
        if s <= 1.0 {
            1.0
        } else if s >= 2.0 {
            0.0
        } else {
            let v = 2.0 - s;
            v * v * (3.0 - 2.0 * v)
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let s = t.abs() * self.eps;
        if s <= 1.0 || s >= 2.0 {
            0.0
        } else {
            let v = 2.0 - s;
            6.0 * v * (1.0 - v) * -self.eps * t.signum()
        }
    }
}

/// Compactly supported C^1 test function: a field together with a box that
/// contains its support. Values must vanish on and outside the box boundary.
#[derive(Clone)]
pub struct TestFunction {
    field: Arc<dyn ScalarField>,
    support: BoxDomain,
}

impl TestFunction {
    pub fn new(field: Arc<dyn ScalarField>, support: BoxDomain) -> Result<Self> {
        if field.dim() != support.dim() {
            return Err(Error::DimensionMismatch { expected: support.dim(), got: field.dim() });
        }
        Ok(Self { field, support })
    }

    /// Tensor product of [`bump3`] profiles centered at `center` with the
    /// given per-axis radii; the gradient is closed-form.
    pub fn bump(center: Vec<f64>, radius: Vec<f64>) -> Result<Self> {
        if center.len() != radius.len() || center.is_empty() {
            return Err(Error::DimensionMismatch { expected: center.len().max(1), got: radius.len() });
        }
        if radius.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::InvalidParameter { detail: "bump radii must be positive".into() });
        }
        let support = BoxDomain::centered(&center, &radius)?;
        let d = center.len();
        let (c1, r1) = (center.clone(), radius.clone());
        let (c2, r2) = (center, radius);
        let field = ClosedField::with_gradient(
            d,
            move |x| x.iter().zip(&c1).zip(&r1).map(|((xi, ci), ri)| bump3((xi - ci) / ri)).product(),
            move |x| {
                let u: Vec<f64> =
                    x.iter().zip(&c2).zip(&r2).map(|((xi, ci), ri)| (xi - ci) / ri).collect();
                let vals: Vec<f64> = u.iter().map(|&ui| bump3(ui)).collect();
                (0..d)
                    .map(|ax| {
                        let mut g = bump3_deriv(u[ax]) / r2[ax];
                        for (k, v) in vals.iter().enumerate() {
                            if k != ax {
                                g *= v;
                            }
                        }
                        g
                    })
                    .collect()
            },
        );
        Ok(Self { field: Arc::new(field), support })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn support(&self) -> &BoxDomain {
        &self.support
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.field.value(x)
    }

    /// Closed gradient when the field provides one, otherwise a central
    /// difference at the given step.
    pub fn gradient(&self, x: &[f64], fallback_step: f64) -> Vec<f64> {
        self.field.gradient(x).unwrap_or_else(|| {
            let f = |y: &[f64]| self.field.value(y);
            (0..self.dim()).map(|ax| crate::diff::central_partial(&f, x, ax, fallback_step)).collect()
        })
    }

    /// Largest |value| sampled on the support boundary plus a margin layer;
    /// used by tests to confirm the support box is honest.
    pub fn boundary_defect(&self, samples_per_axis: usize) -> f64 {
        let d = self.dim();
        let lattice = self.support.lattice(&vec![samples_per_axis; d]);
        let mut worst = 0.0f64;
        for p in &lattice {
            let on_boundary = (0..d).any(|ax| {
                p[ax] == self.support.lo()[ax] || p[ax] == self.support.hi()[ax]
            });
            if on_boundary {
                worst = worst.max(self.value(p).abs());
            }
        }
        worst
    }
}

impl ScalarField for TestFunction {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.field.value(x)
    }
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.field.gradient(x)
    }
}

/// Deterministic battery of tensor bumps inside `window`: for each scale
/// fraction, bump radii are that fraction of the window half-extents and the
/// centers run over a `centers_per_axis`-per-axis lattice chosen so every
/// support stays inside the window.
pub fn bump_battery(
    window: &BoxDomain,
    centers_per_axis: usize,
    scale_fractions: &[f64],
) -> Result<Vec<TestFunction>> {
    if centers_per_axis == 0 || scale_fractions.is_empty() {
        return Err(Error::InvalidParameter { detail: "battery needs centers and scales".into() });
    }
    let d = window.dim();
    let mut battery = Vec::new();
    for &frac in scale_fractions {
        if !(frac > 0.0 && frac < 1.0) {
            return Err(Error::InvalidParameter {
                detail: format!("scale fraction must lie in (0, 1), got {frac}"),
            });
        }
        let radius: Vec<f64> = (0..d).map(|ax| 0.5 * frac * window.extent(ax)).collect();
        let inner = BoxDomain::new(
            (0..d).map(|ax| window.lo()[ax] + radius[ax]).collect(),
            (0..d).map(|ax| window.hi()[ax] - radius[ax]).collect(),
        )?;
        for center in inner.lattice(&vec![centers_per_axis; d]) {
            battery.push(TestFunction::bump(center, radius.clone())?);
        }
    }
    Ok(battery)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::central_partial;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_profile_is_c2_at_the_edge() {
        assert_eq!(bump3(1.0), 0.0);
        assert_eq!(bump3_deriv(1.0), 0.0);
        assert_eq!(bump3(0.0), 1.0);
        // second difference across the edge stays O(h): (1-u^2)^3 has a
        // vanishing second derivative at |u| = 1.
        let h = 1e-5;
        let second = (bump3(1.0 - 2.0 * h) - 2.0 * bump3(1.0 - h)) / (h * h);
        assert!(second.abs() < 1e-2, "second difference {second}");
    }

    #[test]
    fn closed_field_reports_gradient() {
        let f = ClosedField::with_gradient(
            2,
            |x| x[0] * x[0] * x[1],
            |x| vec![2.0 * x[0] * x[1], x[0] * x[0]],
        );
        let x = [1.3, -0.7];
        let g = f.gradient(&x).unwrap();
        let val = |p: &[f64]| f.value(p);
        assert_abs_diff_eq!(g[0], central_partial(&val, &x, 0, 1e-5), epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], central_partial(&val, &x, 1, 1e-5), epsilon = 1e-9);
    }

    #[test]
    fn grid_field_reproduces_multilinear_data() {
        // f(x, y) = 2x - 3y + 1 is reproduced exactly by bilinear interpolation.
        let bbox = BoxDomain::new(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap();
        let counts = vec![5, 4];
        let mut values = Vec::new();
        for i in 0..5 {
            for j in 0..4 {
                let x = 0.5 * i as f64;
                let y = -1.0 + 2.0 * j as f64 / 3.0;
                values.push(2.0 * x - 3.0 * y + 1.0);
            }
        }
        let g = GridField::new(bbox, counts, values).unwrap();
        let probe = [0.73, 0.21];
        assert_abs_diff_eq!(g.value(&probe), 2.0 * 0.73 - 3.0 * 0.21 + 1.0, epsilon = 1e-12);
        let grad = g.gradient(&probe).unwrap();
        assert_abs_diff_eq!(grad[0], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(grad[1], -3.0, epsilon = 1e-10);
    }

    #[test]
    fn grid_field_gradient_is_second_order_inside() {
        let bbox = BoxDomain::new(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let f = |x: f64, y: f64| (2.0 * x).sin() * (1.5 * y).cos();
        let build = |m: usize| {
            let mut values = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    let x = -1.0 + 2.0 * i as f64 / (m - 1) as f64;
                    let y = -1.0 + 2.0 * j as f64 / (m - 1) as f64;
                    values.push(f(x, y));
                }
            }
            GridField::new(bbox.clone(), vec![m, m], values).unwrap()
        };
        let exact = 2.0 * (2.0f64 * 0.125).cos() * (1.5f64 * 0.125).cos();
        let coarse = (build(33).gradient(&[0.125, 0.125]).unwrap()[0] - exact).abs();
        let fine = (build(65).gradient(&[0.125, 0.125]).unwrap()[0] - exact).abs();
        assert!(fine < coarse / 3.0, "coarse {coarse:.3e} fine {fine:.3e}");
    }

    #[test]
    fn grid_field_rejects_bad_shapes() {
        let bbox = BoxDomain::new(vec![0.0], vec![1.0]).unwrap();
        assert!(GridField::new(bbox.clone(), vec![1], vec![0.0]).is_err());
        assert!(GridField::new(bbox.clone(), vec![3], vec![0.0, 1.0]).is_err());
        assert!(GridField::new(bbox, vec![2], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn plateau_cutoff_shape() {
        let chi = PlateauCutoff::new(0.5).unwrap();
        assert_eq!(chi.value(0.0), 1.0);
        assert_eq!(chi.value(2.0), 1.0); // plateau reaches 1/eps = 2
        assert_eq!(chi.value(4.0), 0.0); // support ends at 2/eps = 4
        assert_abs_diff_eq!(chi.value(3.0), 0.5, epsilon = 1e-15);
        assert_eq!(chi.deriv(1.0), 0.0);
        let h = 1e-6;
        let fd = (chi.value(3.0 + h) - chi.value(3.0 - h)) / (2.0 * h);
        assert_abs_diff_eq!(chi.deriv(3.0), fd, epsilon = 1e-8);
        assert_abs_diff_eq!(chi.deriv(-3.0), -fd, epsilon = 1e-8);
    }

    #[test]
    fn tensor_bump_support_and_gradient() {
        let psi = TestFunction::bump(vec![0.5, -0.5], vec![1.0, 2.0]).unwrap();
        assert_eq!(psi.value(&[1.5, -0.5]), 0.0);
        assert_eq!(psi.value(&[0.5, 1.5]), 0.0);
        assert!(psi.value(&[0.4, 0.0]) > 0.0);
        let x = [0.2, 0.3];
        let g = psi.gradient(&x, 1e-5);
        let val = |p: &[f64]| psi.value(p);
        assert_abs_diff_eq!(g[0], central_partial(&val, &x, 0, 1e-5), epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], central_partial(&val, &x, 1, 1e-5), epsilon = 1e-9);
        assert_eq!(psi.boundary_defect(7), 0.0);
    }

    #[test]
    fn battery_counts_and_containment() {
        let window = BoxDomain::new(vec![-1.0, -2.0], vec![1.0, 2.0]).unwrap();
        let battery = bump_battery(&window, 2, &[0.5, 0.35, 0.25]).unwrap();
        assert_eq!(battery.len(), 12);
        for psi in &battery {
            assert!(window.contains_box(psi.support()));
        }
        let battery = bump_battery(&window, 5, &[0.5, 0.25, 0.125]).unwrap();
        assert_eq!(battery.len(), 75);
    }
}
