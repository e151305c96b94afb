//! Axis-aligned boxes: the only domain shape used for integration windows,
//! sample lattices and graph domains.

use crate::error::{Error, Result};

/// Closed axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    /// Build a box from per-axis bounds. Every extent must be positive.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::BadBox {
                detail: format!("bound lengths {} vs {}", lo.len(), hi.len()),
            });
        }
        for (i, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite { what: "box bound" });
            }
            if a >= b {
                return Err(Error::BadBox {
                    detail: format!("axis {i}: lo {a} >= hi {b}"),
                });
            }
        }
        Ok(Self { lo, hi })
    }

    /// Box `[c_i - r_i, c_i + r_i]` around a center.
    pub fn centered(center: &[f64], radius: &[f64]) -> Result<Self> {
        if center.len() != radius.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: radius.len(),
            });
        }
        let lo = center.iter().zip(radius).map(|(c, r)| c - r).collect();
        let hi = center.iter().zip(radius).map(|(c, r)| c + r).collect();
        Self::new(lo, hi)
    }

    /// Symmetric box `[-r, r]^d`.
    pub fn symmetric(dim: usize, r: f64) -> Result<Self> {
        Self::new(vec![-r; dim], vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&a, &b))| v >= a && v <= b)
    }

    /// Membership with a uniform safety margin on every axis.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&v, (&a, &b))| v >= a + margin && v <= b - margin)
    }

    pub fn contains_box(&self, other: &BoxDomain) -> bool {
        other.dim() == self.dim()
            && other
                .lo
                .iter()
                .zip(&other.hi)
                .zip(self.lo.iter().zip(&self.hi))
                .all(|((&olo, &ohi), (&a, &b))| olo >= a && ohi <= b)
    }

    /// Intersection, if non-degenerate.
    pub fn intersect(&self, other: &BoxDomain) -> Result<BoxDomain> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        BoxDomain::new(lo, hi)
    }

    /// Box grown by `margin` on every side (negative shrinks).
    pub fn grown(&self, margin: f64) -> Result<BoxDomain> {
        let lo = self.lo.iter().map(|a| a - margin).collect();
        let hi = self.hi.iter().map(|b| b + margin).collect();
        BoxDomain::new(lo, hi)
    }

    /// Per-axis rescale about the origin by the given positive factors.
    pub fn scaled(&self, factors: &[f64]) -> Result<BoxDomain> {
        if factors.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: factors.len(),
            });
        }
        if let Some(&f) = factors.iter().find(|f| **f <= 0.0) {
            return Err(Error::NonPositiveScale(f));
        }
        let lo = self.lo.iter().zip(factors).map(|(a, f)| a * f).collect();
        let hi = self.hi.iter().zip(factors).map(|(b, f)| b * f).collect();
        BoxDomain::new(lo, hi)
    }

    /// Uniform lattice with `counts[i]` samples per axis, endpoints included
    /// (a single sample sits at the axis midpoint). Lexicographic order.
    pub fn lattice(&self, counts: &[usize]) -> Vec<Vec<f64>> {
        assert_eq!(counts.len(), self.dim(), "lattice counts per axis");
        assert!(counts.iter().all(|&c| c >= 1));
        let total: usize = counts.iter().product();
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.dim()];
        for _ in 0..total {
            let p: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(ax, &i)| {
                    if counts[ax] == 1 {
                        0.5 * (self.lo[ax] + self.hi[ax])
                    } else {
                        self.lo[ax]
                            + self.extent(ax) * (i as f64) / ((counts[ax] - 1) as f64)
                    }
                })
                .collect();
            points.push(p);
            for ax in (0..self.dim()).rev() {
                idx[ax] += 1;
                if idx[ax] < counts[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        points
    }
}
