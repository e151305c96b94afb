//! Finite-difference stencils used by residual checks and derivative
//! fallbacks. All stencils are second order in the step.

/// Which side a one-sided stencil reaches toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Central first partial along coordinate `axis`.
pub fn central_partial<F: Fn(&[f64]) -> f64 + ?Sized>(
    f: &F,
    x: &[f64],
    axis: usize,
    h: f64,
) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[axis] += h;
    m[axis] -= h;
    (f(&p) - f(&m)) / (2.0 * h)
}

/// Central derivative along an arbitrary direction vector `v`.
pub fn central_directional<F: Fn(&[f64]) -> f64 + ?Sized>(
    f: &F,
    x: &[f64],
    v: &[f64],
    h: f64,
) -> f64 {
    let p: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi + h * vi).collect();
    let m: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi - h * vi).collect();
    (f(&p) - f(&m)) / (2.0 * h)
}

/// Three-point one-sided first partial: `Side::Plus` samples x, x+h, x+2h and
/// never looks behind x (mirrored for `Side::Minus`).
pub fn one_sided_partial<F: Fn(&[f64]) -> f64 + ?Sized>(
    f: &F,
    x: &[f64],
    axis: usize,
    h: f64,
    side: Side,
) -> f64 {
    let s = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    let mut x1 = x.to_vec();
    let mut x2 = x.to_vec();
    x1[axis] += s * h;
    x2[axis] += s * 2.0 * h;
    s * (-3.0 * f(x) + 4.0 * f(&x1) - f(&x2)) / (2.0 * h)
}

/// Observed convergence order from residuals at step h and h/2.
/// Returns +inf when both residuals sit at the roundoff floor.
pub fn observed_order(r_coarse: f64, r_fine: f64, floor: f64) -> f64 {
    let (rc, rf) = (r_coarse.abs(), r_fine.abs());
    if rc <= floor && rf <= floor {
        f64::INFINITY
    } else {
        (rc / rf.max(f64::MIN_POSITIVE)).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn central_matches_closed_form() {
        let f = |x: &[f64]| x[0].sin() * x[1];
        let d = central_partial(&f, &[0.3, 2.0], 0, 1e-5);
        assert_abs_diff_eq!(d, 0.3f64.cos() * 2.0, epsilon = 1e-9);
    }

    #[test]
    fn directional_combines_axes() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[1];
        // d/ds f(x + s v) at s=0 with v = (1, 2) equals 2 x0 + 6.
        let d = central_directional(&f, &[1.5, 0.0], &[1.0, 2.0], 1e-6);
        assert_abs_diff_eq!(d, 9.0, epsilon = 1e-8);
    }

    #[test]
    fn one_sided_is_second_order() {
        let f = |x: &[f64]| x[0].exp();
        let exact = 1.0f64.exp();
        let r1 = (one_sided_partial(&f, &[1.0], 0, 1e-3, Side::Plus) - exact).abs();
        let r2 = (one_sided_partial(&f, &[1.0], 0, 5e-4, Side::Plus) - exact).abs();
        let q = observed_order(r1, r2, 1e-14);
        assert!(q > 1.8, "order {q}");
        // Minus side never samples above x.
        let g = |x: &[f64]| if x[0] > 1.0 { f64::NAN } else { x[0] * x[0] };
        let d = one_sided_partial(&g, &[1.0], 0, 1e-4, Side::Minus);
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn order_floor_reports_infinite() {
        assert!(observed_order(1e-16, 5e-17, 1e-14).is_infinite());
    }
}
