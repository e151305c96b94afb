//! Gauss-Legendre quadrature over boxes: fixed tensor rules with
//! deterministic parallel accumulation, adaptive bisection refinement, and
//! truncated integrals over the whole real line.

use rayon::prelude::*;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};

/// Integrands sampled below this fraction of their peak are treated as zero
/// when truncating integrals over the real line.
pub const TAIL_CUTOFF_RELATIVE: f64 = 1e-14;

/// Nodes and weights of a Gauss-Legendre rule on [-1, 1], ascending nodes.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial P_k and its derivative at x (|x| < 1 for the
/// derivative formula).
fn legendre_with_deriv(k: usize, x: f64) -> (f64, f64) {
    debug_assert!(k >= 1);
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 1..k {
        let jf = j as f64;
        let p_next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = (k as f64) * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl GaussLegendre {
    /// Build the `order`-point rule. Nodes are the roots of the Legendre
    /// polynomial, found by Newton iteration from cosine initial guesses;
    /// symmetric pairs share one solve.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        if order == 1 {
            return Self { nodes: vec![0.0], weights: vec![2.0] };
        }
        let k = order;
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for i in 0..k.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(k, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(k, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // x is the i-th root from the +1 end; store ascending.
            nodes[k - 1 - i] = x;
            nodes[i] = -x;
            weights[k - 1 - i] = w;
            weights[i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// How an integration window is subdivided.
#[derive(Debug, Clone)]
pub enum Rule {
    /// Uniform tensor grid of `cells` per axis, Gauss-Legendre of `order`
    /// per cell.
    Fixed { order: usize, cells: usize },
    /// Recursive bisection of the longest axis until the two-half refinement
    /// moves the value by at most `tol` (halved per split).
    Adaptive { order: usize, tol: f64, max_depth: u32 },
}

/// Quadrature configuration: a rule plus an optional truncation box that
/// clips the integration window (for integrands supported well inside it).
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub rule: Rule,
    pub truncation: Option<BoxDomain>,
}

impl QuadratureSpec {
    pub fn fixed(order: usize, cells: usize) -> Self {
        assert!(order >= 2, "fixed rule needs order >= 2");
        assert!(cells >= 1, "fixed rule needs at least one cell");
        Self { rule: Rule::Fixed { order, cells }, truncation: None }
    }

    pub fn adaptive(tol: f64) -> Self {
        assert!(tol > 0.0, "adaptive tolerance must be positive");
        Self { rule: Rule::Adaptive { order: 8, tol, max_depth: 48 }, truncation: None }
    }

    /// Default rule sized so the node count stays sane as dimension grows.
    pub fn default_for_dim(dim: usize) -> Self {
        let cells = match dim {
            0 | 1 | 2 => 16,
            3 => 8,
            _ => 4,
        };
        Self::fixed(8, cells)
    }

    pub fn with_truncation(mut self, window: BoxDomain) -> Self {
        self.truncation = Some(window);
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::fixed(8, 16)
    }
}

/// Compensated (Neumaier) summation; immune to benign cancellation between
/// cell contributions of mixed sign.
pub fn neumaier<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Tensor Gauss-Legendre sum over one cell; the caller scales by the cell
/// jacobian (product of half-widths).
fn cell_sum<F: Fn(&[f64]) -> f64 + ?Sized>(
    gl: &GaussLegendre,
    cell_lo: &[f64],
    widths: &[f64],
    f: &F,
) -> f64 {
    let d = cell_lo.len();
    let k = gl.order();
    let n_pts = k.pow(d as u32);
    let mut sum = 0.0;
    let mut x = vec![0.0; d];
    for pi in 0..n_pts {
        let mut rem = pi;
        let mut w = 1.0;
        for ax in (0..d).rev() {
            let i = rem % k;
            rem /= k;
            x[ax] = cell_lo[ax] + 0.5 * widths[ax] * (gl.nodes[i] + 1.0);
            w *= gl.weights[i];
        }
        sum += w * f(&x);
    }
    sum
}

fn fixed_tensor<F: Fn(&[f64]) -> f64 + Sync>(
    gl: &GaussLegendre,
    window: &BoxDomain,
    cells: usize,
    f: &F,
) -> f64 {
    let d = window.dim();
    let n_cells = cells.pow(d as u32);
    let widths: Vec<f64> = (0..d).map(|ax| window.extent(ax) / cells as f64).collect();
    // Indexed parallel map keeps cell order, so the compensated fold below is
    // byte-identical for any thread count.
    let partials: Vec<f64> = (0..n_cells)
        .into_par_iter()
        .map(|ci| {
            let mut rem = ci;
            let mut cell_lo = vec![0.0; d];
            for ax in (0..d).rev() {
                let i = rem % cells;
                rem /= cells;
                cell_lo[ax] = window.lo()[ax] + i as f64 * widths[ax];
            }
            cell_sum(gl, &cell_lo, &widths, f)
        })
        .collect();
    let scale: f64 = widths.iter().map(|w| 0.5 * w).product();
    neumaier(partials) * scale
}

fn single_cell<F: Fn(&[f64]) -> f64 + ?Sized>(gl: &GaussLegendre, b: &BoxDomain, f: &F) -> f64 {
    let widths: Vec<f64> = (0..b.dim()).map(|ax| b.extent(ax)).collect();
    let scale: f64 = widths.iter().map(|w| 0.5 * w).product();
    cell_sum(gl, b.lo(), &widths, f) * scale
}

fn split_longest(b: &BoxDomain) -> (BoxDomain, BoxDomain) {
    let ax = (0..b.dim())
        .max_by(|&i, &j| b.extent(i).partial_cmp(&b.extent(j)).unwrap())
        .unwrap();
    let mid = 0.5 * (b.lo()[ax] + b.hi()[ax]);
    let mut hi1 = b.hi().to_vec();
    hi1[ax] = mid;
    let mut lo2 = b.lo().to_vec();
    lo2[ax] = mid;
    (
        BoxDomain::new(b.lo().to_vec(), hi1).expect("split keeps positive extent"),
        BoxDomain::new(lo2, b.hi().to_vec()).expect("split keeps positive extent"),
    )
}

fn adaptive_refine<F: Fn(&[f64]) -> f64 + ?Sized>(
    gl: &GaussLegendre,
    b: &BoxDomain,
    coarse: f64,
    tol: f64,
    depth: u32,
    f: &F,
) -> Result<f64> {
    let (b1, b2) = split_longest(b);
    let c1 = single_cell(gl, &b1, f);
    let c2 = single_cell(gl, &b2, f);
    let fine = c1 + c2;
    let defect = (fine - coarse).abs();
    // Defects below the rounding floor of the pair are noise, not signal;
    // accepting them caps the floor's total contribution near eps * ||f||_1.
    let floor = 64.0 * f64::EPSILON * (c1.abs() + c2.abs() + coarse.abs());
    if defect <= tol.max(floor) {
        return Ok(fine);
    }
    if depth == 0 {
        return Err(Error::QuadratureDidNotConverge { defect, tol });
    }
    let half_tol = 0.5 * tol;
    Ok(adaptive_refine(gl, &b1, c1, half_tol, depth - 1, f)?
        + adaptive_refine(gl, &b2, c2, half_tol, depth - 1, f)?)
}

/// Integrate `f` over `domain` (clipped by `spec`'s truncation box).
pub fn integrate<F>(spec: &QuadratureSpec, domain: &BoxDomain, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let window = match &spec.truncation {
        Some(t) => domain.intersect(t)?,
        None => domain.clone(),
    };
    match spec.rule {
        Rule::Fixed { order, cells } => {
            Ok(fixed_tensor(&GaussLegendre::new(order), &window, cells, &f))
        }
        Rule::Adaptive { order, tol, max_depth } => {
            let gl = GaussLegendre::new(order);
            let coarse = single_cell(&gl, &window, &f);
            adaptive_refine(&gl, &window, coarse, tol, max_depth, &f)
        }
    }
}

/// Integrate `f` over the whole real line by symmetric truncation: the
/// window doubles until the boundary samples fall below
/// `TAIL_CUTOFF_RELATIVE` of the peak sample, then keeps doubling until the
/// value moves by less than `tol` (relative to max(1, |value|)).
///
/// Assumes the integrand's bulk is reachable from the origin by doubling;
/// suitable for the decaying profiles used here.
pub fn integrate_line<F>(f: F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    assert!(tol > 0.0);
    let mut peak = 0.0f64;
    for i in 0..=16 {
        let s = -1.0 + i as f64 / 8.0;
        peak = peak.max(f(s).abs());
    }
    let mut half = 1.0f64;
    for _ in 0..60 {
        let boundary = f(-half).abs().max(f(half).abs());
        peak = peak.max(boundary);
        if boundary <= TAIL_CUTOFF_RELATIVE * peak.max(f64::MIN_POSITIVE) {
            break;
        }
        half *= 2.0;
    }
    let window_value = |h: f64| -> Result<f64> {
        let b = BoxDomain::new(vec![-h], vec![h])?;
        integrate(&QuadratureSpec::adaptive(tol), &b, |x: &[f64]| f(x[0]))
    };
    let mut value = window_value(half)?;
    for _ in 0..10 {
        half *= 2.0;
        let doubled = window_value(half)?;
        let defect = (doubled - value).abs();
        if defect <= tol * doubled.abs().max(1.0) {
            return Ok(doubled);
        }
        value = doubled;
    }
    Err(Error::QuadratureDidNotConverge { defect: f64::NAN, tol })
}
