//! The n-th Heisenberg group on R^{2n+1}: group law, dilations, homogeneous
//! distance, the left-invariant horizontal frame, and the embedding maps that
//! turn base parameters into graph points along the first horizontal
//! direction.
//!
//! Coordinates are always ordered (x_1..x_n, y_1..y_n, t).

use crate::error::{Error, Result};

/// A point of the n-th Heisenberg group.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    coords: Vec<f64>,
}

impl HPoint {
    /// Build a point from coordinates (x_1..x_n, y_1..y_n, t); the length
    /// must be odd and at least 3, all entries finite.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 || coords.len() % 2 == 0 {
            return Err(Error::DimensionMismatch { expected: 3, got: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "point coordinate" });
        }
        Ok(Self { coords })
    }

    /// First-group convenience constructor (n = 1).
    pub fn from_xyt(x: f64, y: f64, t: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite() && t.is_finite());
        Self { coords: vec![x, y, t] }
    }

    pub fn origin(n: usize) -> Self {
        assert!(n >= 1);
        Self { coords: vec![0.0; 2 * n + 1] }
    }

    pub fn n(&self) -> usize {
        (self.coords.len() - 1) / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// x_j, 1-based.
    pub fn x(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.n());
        self.coords[j - 1]
    }

    /// y_j, 1-based.
    pub fn y(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.n());
        self.coords[self.n() + j - 1]
    }

    pub fn t(&self) -> f64 {
        *self.coords.last().unwrap()
    }

    /// Group product. The center coordinate picks up twice the symplectic
    /// form of the horizontal parts: t + t' + 2 sum_j (y_j x'_j - x_j y'_j).
    pub fn mul(&self, rhs: &HPoint) -> Result<HPoint> {
        let n = self.n();
        if rhs.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rhs.n() });
        }
        let mut out = vec![0.0; 2 * n + 1];
        let mut twist = 0.0;
        for j in 0..n {
            out[j] = self.coords[j] + rhs.coords[j];
            out[n + j] = self.coords[n + j] + rhs.coords[n + j];
            twist += self.coords[n + j] * rhs.coords[j] - self.coords[j] * rhs.coords[n + j];
        }
        out[2 * n] = self.t() + rhs.t() + 2.0 * twist;
        Ok(HPoint { coords: out })
    }

    /// Group inverse: coordinate-wise negation.
    pub fn inverse(&self) -> HPoint {
        HPoint { coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// Anisotropic dilation: horizontal part scales by r, center by r^2.
    pub fn dilate(&self, r: f64) -> Result<HPoint> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveScale(r));
        }
        let n = self.n();
        let mut coords: Vec<f64> = self.coords.iter().map(|c| r * c).collect();
        coords[2 * n] = r * r * self.t();
        Ok(HPoint { coords })
    }

    /// Homogeneous norm max(|z|, |t|^{1/2}) with |z| Euclidean.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        let z2: f64 = self.coords[..2 * n].iter().map(|c| c * c).sum();
        z2.sqrt().max(self.t().abs().sqrt())
    }

    /// Left-invariant homogeneous distance ||P^{-1} Q||.
    pub fn dist_inf(&self, other: &HPoint) -> Result<f64> {
        Ok(self.inverse().mul(other)?.norm_inf())
    }
}

/// One slot of the horizontal frame (X_j or Y_j, 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSlot {
    X(usize),
    Y(usize),
}

/// Frame slots in canonical order X_1..X_n, Y_1..Y_n — the order used by
/// [`HorizontalVector`] coefficients.
pub fn frame_slots(n: usize) -> impl Iterator<Item = FrameSlot> {
    (1..=n).map(FrameSlot::X).chain((1..=n).map(FrameSlot::Y))
}

/// Coordinate coefficients of a frame field at P:
/// X_j = e_{x_j} + 2 y_j e_t, Y_j = e_{y_j} - 2 x_j e_t.
pub fn frame_vector(p: &HPoint, slot: FrameSlot) -> Vec<f64> {
    let n = p.n();
    let mut v = vec![0.0; 2 * n + 1];
    match slot {
        FrameSlot::X(j) => {
            assert!(j >= 1 && j <= n);
            v[j - 1] = 1.0;
            v[2 * n] = 2.0 * p.y(j);
        }
        FrameSlot::Y(j) => {
            assert!(j >= 1 && j <= n);
            v[n + j - 1] = 1.0;
            v[2 * n] = -2.0 * p.x(j);
        }
    }
    v
}

/// All frame vectors at P as columns, in canonical slot order.
pub fn frame_coeffs(p: &HPoint) -> Vec<Vec<f64>> {
    frame_slots(p.n()).map(|s| frame_vector(p, s)).collect()
}

/// A horizontal vector written in frame coefficients (X_1..X_n, Y_1..Y_n).
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalVector {
    coeffs: Vec<f64>,
}

impl HorizontalVector {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: 2, got: coeffs.len() });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "frame coefficient" });
        }
        Ok(Self { coeffs })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient on X_j (1-based).
    pub fn x_coeff(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.n());
        self.coeffs[j - 1]
    }

    /// Coefficient on Y_j (1-based).
    pub fn y_coeff(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.n());
        self.coeffs[self.n() + j - 1]
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &HorizontalVector) -> Result<f64> {
        if other.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: other.n() });
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }

    /// Ambient coordinate vector sum_slots coeff * frame_vector at P.
    pub fn ambient_at(&self, p: &HPoint) -> Result<Vec<f64>> {
        if p.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: p.n() });
        }
        let mut out = vec![0.0; 2 * self.n() + 1];
        for (c, slot) in self.coeffs.iter().zip(frame_slots(self.n())) {
            for (o, f) in out.iter_mut().zip(frame_vector(p, slot)) {
                *o += c * f;
            }
        }
        Ok(out)
    }
}

/// Base parameters of a graph along X_1: coordinates
/// (eta, v_2..v_n, v_{n+2}..v_{2n}, tau), reducing to (eta, tau) for n = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint {
    n: usize,
    coords: Vec<f64>,
}

impl BasePoint {
    pub fn new(n: usize, coords: Vec<f64>) -> Result<Self> {
        if n < 1 || coords.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { what: "base coordinate" });
        }
        Ok(Self { n, coords })
    }

    /// n = 1 convenience constructor.
    pub fn pair(eta: f64, tau: f64) -> Self {
        Self { n: 1, coords: vec![eta, tau] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn eta(&self) -> f64 {
        self.coords[0]
    }

    pub fn tau(&self) -> f64 {
        self.coords[2 * self.n - 1]
    }

    /// v_j for j in 2..=n or n+2..=2n (the slots present for n >= 2).
    pub fn v(&self, j: usize) -> f64 {
        let n = self.n;
        if (2..=n).contains(&j) {
            self.coords[j - 1]
        } else if (n + 2..=2 * n).contains(&j) {
            self.coords[j - 2]
        } else {
            panic!("v_{j} is not a base coordinate for n = {n}");
        }
    }

    /// Embed into the maximal subgroup {x_1 = 0}:
    /// x_j = v_j, y_1 = eta, y_j = v_{n+j}, t = tau.
    pub fn embed(&self) -> HPoint {
        let n = self.n;
        let mut coords = vec![0.0; 2 * n + 1];
        for j in 2..=n {
            coords[j - 1] = self.coords[j - 1];
        }
        coords[n] = self.eta();
        for j in 2..=n {
            coords[n + j - 1] = self.coords[n + j - 2];
        }
        coords[2 * n] = self.tau();
        HPoint { coords }
    }

    /// Graph map: embed() * (s, 0, ..., 0). In coordinates the product only
    /// moves x_1 to s and t to tau + 2 eta s.
    pub fn graph_point(&self, s: f64) -> HPoint {
        let mut p = self.embed();
        p.coords[0] = s;
        let l = p.coords.len();
        p.coords[l - 1] = self.tau() + 2.0 * self.eta() * s;
        p
    }

    /// Inverse of the graph map: recover (base, height) from an ambient
    /// point, with tau = t - 2 x_1 y_1.
    pub fn from_ambient(p: &HPoint) -> (BasePoint, f64) {
        let n = p.n();
        let s = p.coords[0];
        let mut coords = vec![0.0; 2 * n];
        coords[0] = p.y(1);
        for j in 2..=n {
            coords[j - 1] = p.x(j);
            coords[n + j - 2] = p.y(j);
        }
        coords[2 * n - 1] = p.t() - 2.0 * p.x(1) * p.y(1);
        (BasePoint { n, coords }, s)
    }
}
