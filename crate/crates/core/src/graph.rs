//! Intrinsic graphs along the first horizontal direction: evaluation,
//! intrinsic gradient, perimeter-type area, horizontal normals, subgraph
//! membership, and the second-order stationarity residual.
//!
//! A graph is a scalar field over base coordinates
//! (eta, v_2..v_n, v_{n+2}..v_{2n}, tau); the graph map sends a base point A
//! to iota(A) * (phi(A), 0, .., 0).

use std::sync::Arc;

use crate::diff::central_partial;
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{ClosedField, GridField, ScalarField};
use crate::heisenberg::{BasePoint, HPoint, HorizontalVector};
use crate::quad::{integrate, QuadratureSpec};

/// Dimensional constant multiplying the area integrand; kept explicit so the
/// normalization convention is visible at every call site.
pub const AREA_NORMALIZATION: f64 = 1.0;

/// Default finite-difference step for gradients of sampled or closed fields
/// without supplied partials.
pub const DEFAULT_GRID_STEP: f64 = 1e-4;

/// Position of an ambient point relative to the subgraph {x_1 < phi}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// The base projection leaves the graph's domain cylinder.
    OutsideCylinder,
}

type WphiFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A graph over a box of base coordinates.
#[derive(Clone)]
pub struct GraphFunction {
    n: usize,
    domain: BoxDomain,
    step: f64,
    field: Arc<dyn ScalarField>,
    wphi_closed: Option<Arc<WphiFn>>,
}

impl GraphFunction {
    pub fn from_field(n: usize, domain: BoxDomain, field: Arc<dyn ScalarField>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter { detail: "group index must be at least 1".into() });
        }
        if domain.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: domain.dim() });
        }
        if field.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: field.dim() });
        }
        Ok(Self { n, domain, step: DEFAULT_GRID_STEP, field, wphi_closed: None })
    }

    /// Attach a closed-form intrinsic gradient, bypassing the
    /// gradient-assembly route in [`Self::wphi`].
    pub fn with_wphi<F>(mut self, wphi: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.wphi_closed = Some(Arc::new(wphi));
        self
    }

    /// Replace the finite-difference step.
    pub fn with_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("step must be positive, got {step}") });
        }
        self.step = step;
        Ok(self)
    }

    /// Entire graph phi = -alpha eta tau / (1 + 2 alpha eta^2), stationary
    /// for every alpha > 0 but not area-minimizing; its intrinsic gradient is
    /// -alpha tau / (1 + 2 alpha eta^2).
    pub fn dgn(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter { detail: format!("alpha must be positive, got {alpha}") });
        }
        let domain = BoxDomain::symmetric(2, 1e6)?;
        let value = move |a: &[f64]| -alpha * a[0] * a[1] / (1.0 + 2.0 * alpha * a[0] * a[0]);
        let grad = move |a: &[f64]| {
            let q = 1.0 + 2.0 * alpha * a[0] * a[0];
            vec![
                alpha * a[1] * (2.0 * alpha * a[0] * a[0] - 1.0) / (q * q),
                -alpha * a[0] / q,
            ]
        };
        let wphi = move |a: &[f64]| vec![-alpha * a[1] / (1.0 + 2.0 * alpha * a[0] * a[0])];
        Ok(Self::from_field(1, domain, Arc::new(ClosedField::with_gradient(2, value, grad)))?
            .with_wphi(wphi))
    }

    /// Vertical plane phi = w eta + c (n = 1); intrinsic gradient is the
    /// constant w.
    pub fn affine(w: f64, c: f64) -> Result<Self> {
        if !w.is_finite() || !c.is_finite() {
            return Err(Error::NonFinite { what: "plane coefficient" });
        }
        let domain = BoxDomain::symmetric(2, 1e6)?;
        let value = move |a: &[f64]| w * a[0] + c;
        let grad = move |_: &[f64]| vec![w, 0.0];
        Ok(Self::from_field(1, domain, Arc::new(ClosedField::with_gradient(2, value, grad)))?
            .with_wphi(move |_| vec![w]))
    }

    /// Graph backed by lattice samples; the domain shrinks by one lattice
    /// step so interpolation and difference stencils stay inside the data.
    pub fn from_grid(n: usize, grid: GridField) -> Result<Self> {
        if grid.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: grid.dim() });
        }
        let step = grid.max_step();
        let domain = grid.bbox().grown(-step)?;
        let mut g = Self::from_field(n, domain, Arc::new(grid))?;
        g.step = step;
        Ok(g)
    }

    /// Lift a classical graph psi of 2n-1 variables to an intrinsic graph
    /// that ignores tau. Differential structure is inherited: the lift's
    /// gradient pads psi's with a zero tau-slot.
    pub fn lift_classical(
        psi: Arc<dyn ScalarField>,
        domain: BoxDomain,
        step: f64,
    ) -> Result<Self> {
        let m = psi.dim();
        if m < 3 || m % 2 == 0 {
            return Err(Error::DimensionMismatch { expected: 3, got: m });
        }
        let n = (m + 1) / 2;
        if domain.dim() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: domain.dim() });
        }
        let p1 = Arc::clone(&psi);
        let p2 = Arc::clone(&psi);
        let field = ClosedField::with_gradient(
            2 * n,
            move |a: &[f64]| p1.value(&a[..m]),
            move |a: &[f64]| {
                let mut g = p2.gradient(&a[..m]).unwrap_or_else(|| {
                    let f = |x: &[f64]| p2.value(x);
                    (0..m).map(|ax| central_partial(&f, &a[..m], ax, step)).collect()
                });
                g.push(0.0);
                g
            },
        );
        Self::from_field(n, domain, Arc::new(field))?.with_step(step)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn value(&self, a: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), 2 * self.n);
        self.field.value(a)
    }

    /// Coordinate gradient, closed-form when the field supplies one.
    pub fn gradient(&self, a: &[f64]) -> Vec<f64> {
        self.field.gradient(a).unwrap_or_else(|| {
            let f = |x: &[f64]| self.field.value(x);
            (0..2 * self.n).map(|ax| central_partial(&f, a, ax, self.step)).collect()
        })
    }

    /// Intrinsic gradient, a vector of length 2n - 1 in the slot order
    /// (X~_2..X~_n, W_{n+1}, Y~_2..Y~_n); for n = 1 the single entry
    /// phi_eta - 4 phi phi_tau.
    pub fn wphi(&self, a: &[f64]) -> Vec<f64> {
        if let Some(w) = &self.wphi_closed {
            return w(a);
        }
        self.wphi_from_gradient(a, &self.gradient(a))
    }

    /// Assemble the intrinsic gradient from a coordinate gradient.
    pub fn wphi_from_gradient(&self, a: &[f64], g: &[f64]) -> Vec<f64> {
        let n = self.n;
        let t = 2 * n - 1; // tau axis
        if n == 1 {
            return vec![g[0] - 4.0 * self.value(a) * g[1]];
        }
        let mut w = Vec::with_capacity(2 * n - 1);
        for k in 0..n - 1 {
            w.push(g[k + 1] + 2.0 * a[n + k] * g[t]);
        }
        w.push(g[0] - 4.0 * self.value(a) * g[t]);
        for k in n..2 * n - 1 {
            w.push(g[k] - 2.0 * a[k - n + 1] * g[t]);
        }
        w
    }

    pub fn wphi_norm_sq(&self, a: &[f64]) -> f64 {
        self.wphi(a).iter().map(|w| w * w).sum()
    }

    /// Perimeter of the subgraph inside the cylinder over `window`:
    /// the integral of sqrt(1 + |intrinsic gradient|^2).
    pub fn area(&self, window: &BoxDomain, spec: &QuadratureSpec) -> Result<f64> {
        if window.dim() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: window.dim() });
        }
        if !self.domain.contains_box(window) {
            return Err(Error::OutsideDomain {
                detail: format!("window {:?}..{:?} leaves the graph domain", window.lo(), window.hi()),
            });
        }
        integrate(spec, window, |a| AREA_NORMALIZATION * (1.0 + self.wphi_norm_sq(a)).sqrt())
    }

    /// Inward horizontal unit normal of the subgraph at the graph point over
    /// `a`: frame coefficients (-1, intrinsic gradient)/sqrt(1 + |.|^2)
    /// distributed over the slots (X_1, X_2.., Y_1, Y_2..).
    pub fn horizontal_normal(&self, a: &[f64]) -> Result<HorizontalVector> {
        let n = self.n;
        let w = self.wphi(a);
        let scale = (1.0 + w.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let mut coeffs = vec![0.0; 2 * n];
        coeffs[0] = -1.0 / scale;
        for j in 2..=n {
            coeffs[j - 1] = w[j - 2] / scale;
        }
        coeffs[n] = w[n - 1] / scale;
        for j in 2..=n {
            coeffs[n + j - 1] = w[n + j - 2] / scale;
        }
        HorizontalVector::new(coeffs)
    }

    /// Locate an ambient point relative to the open subgraph {x_1 < phi}.
    pub fn membership(&self, p: &HPoint) -> Result<Membership> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.n() });
        }
        let (base, s) = BasePoint::from_ambient(p);
        if !self.domain.contains(base.coords()) {
            return Ok(Membership::OutsideCylinder);
        }
        if s < self.value(base.coords()) {
            Ok(Membership::Inside)
        } else {
            Ok(Membership::Outside)
        }
    }

    /// Pointwise minimal-surface residual, always evaluated by central
    /// differences of the intrinsic-gradient field at the graph's step so
    /// that convergence under step refinement is observable.
    ///
    /// For n = 1 this is the intrinsic Laplacian W(W phi); for n >= 2 the
    /// divergence of the normalized intrinsic gradient along the frame
    /// directions of the base.
    pub fn mse_residual(&self, a: &[f64]) -> f64 {
        let n = self.n;
        let h = self.step;
        let t = 2 * n - 1;
        if n == 1 {
            let w = |x: &[f64]| self.wphi(x)[0];
            let dwe = central_partial(&w, a, 0, h);
            let dwt = central_partial(&w, a, 1, h);
            return dwe - 4.0 * self.value(a) * dwt;
        }
        let flux = |x: &[f64], k: usize| {
            let w = self.wphi(x);
            let norm = (1.0 + w.iter().map(|v| v * v).sum::<f64>()).sqrt();
            w[k] / norm
        };
        let mut r = 0.0;
        for k in 0..n - 1 {
            let g = |x: &[f64]| flux(x, k);
            r += central_partial(&g, a, k + 1, h) + 2.0 * a[n + k] * central_partial(&g, a, t, h);
        }
        {
            let g = |x: &[f64]| flux(x, n - 1);
            r += central_partial(&g, a, 0, h)
                - 4.0 * self.value(a) * central_partial(&g, a, t, h);
        }
        for k in n..2 * n - 1 {
            let g = |x: &[f64]| flux(x, k);
            r += central_partial(&g, a, k, h) - 2.0 * a[k - n + 1] * central_partial(&g, a, t, h);
        }
        r
    }

    /// Dilated graph phi_lambda(A) = lambda phi(delta_{1/lambda} A) on the
    /// dilated domain; the intrinsic gradient transports without scaling.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveScale(lambda));
        }
        let n = self.n;
        let inv = 1.0 / lambda;
        let shrink = move |a: &[f64]| {
            let mut b: Vec<f64> = a.iter().map(|c| c * inv).collect();
            b[2 * n - 1] = a[2 * n - 1] * inv * inv;
            b
        };
        let f1 = Arc::clone(&self.field);
        let f2 = Arc::clone(&self.field);
        let step = self.step;
        let field = ClosedField::with_gradient(
            2 * n,
            move |a: &[f64]| lambda * f1.value(&shrink(a)),
            move |a: &[f64]| {
                let b = shrink(a);
                let mut g = f2.gradient(&b).unwrap_or_else(|| {
                    let f = |x: &[f64]| f2.value(x);
                    (0..2 * n).map(|ax| central_partial(&f, &b, ax, step)).collect()
                });
                g[2 * n - 1] *= inv;
                g
            },
        );
        let mut factors = vec![lambda; 2 * n];
        factors[2 * n - 1] = lambda * lambda;
        let mut out = Self::from_field(n, self.domain.scaled(&factors)?, Arc::new(field))?;
        out.step = self.step;
        if let Some(w) = &self.wphi_closed {
            let w = Arc::clone(w);
            out.wphi_closed = Some(Arc::new(move |a: &[f64]| w(&shrink(a))));
        }
        Ok(out)
    }

    /// Largest defect between the supplied coordinate partials and central
    /// differences of the values over the given sample points; `None` when
    /// the field carries no closed gradient.
    pub fn validate_partials(&self, samples: &[Vec<f64>], h: f64) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for a in samples {
            let g = self.field.gradient(a)?;
            let val = |x: &[f64]| self.field.value(x);
            for (ax, gi) in g.iter().enumerate() {
                worst = worst.max((gi - central_partial(&val, a, ax, h)).abs());
            }
        }
        Some(worst)
    }
}

/// Classical graph of log(cos v_2 / cos eta) in the variables
/// (eta, v_2, v_4), a zero-mean-curvature surface on |eta|, |v_2| < pi/2.
pub fn scherk_psi() -> ClosedField {
    ClosedField::with_gradient(
        3,
        |x: &[f64]| (x[1].cos() / x[0].cos()).ln(),
        |x: &[f64]| vec![x[0].tan(), -x[1].tan(), 0.0],
    )
}

/// Residual of the classical minimal-surface operator
/// sum_i d_i (psi_i / sqrt(1 + |grad psi|^2)) at `point`, by central
/// differences of the flux at step `h`.
pub fn classical_lift_residual(psi: &dyn ScalarField, point: &[f64], h: f64) -> f64 {
    let d = psi.dim();
    let value = |x: &[f64]| psi.value(x);
    let grad = |x: &[f64]| {
        psi.gradient(x)
            .unwrap_or_else(|| (0..d).map(|ax| central_partial(&value, x, ax, h)).collect())
    };
    let mut r = 0.0;
    for i in 0..d {
        let flux = |x: &[f64]| {
            let g = grad(x);
            g[i] / (1.0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt()
        };
        r += central_partial(&flux, point, i, h);
    }
    r
}
