//! Real roots of low-degree real polynomials via companion-matrix eigenvalues.

use nalgebra::DMatrix;

/// Imaginary-part cutoff, scaled by `1 + |root|`.
pub const IMAG_CUTOFF: f64 = 1e-10;

/// Real roots of `Σ coeffs[k]·x^k` (coefficients in ascending degree),
/// sorted ascending. Leading coefficients that vanish relative to the
/// largest one are dropped before forming the companion matrix; exact zero
/// constant terms are factored out as roots at `0`.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].abs() <= 1e-15 * scale {
        hi -= 1;
    }
    let mut lo = 0;
    let mut roots = Vec::new();
    while lo < hi && coeffs[lo] == 0.0 {
        roots.push(0.0);
        lo += 1;
    }
    let c = &coeffs[lo..hi];
    let degree = c.len().saturating_sub(1);
    match degree {
        0 => {}
        1 => roots.push(-c[0] / c[1]),
        _ => {
            let lead = c[degree];
            let mut comp = DMatrix::<f64>::zeros(degree, degree);
            for k in 0..degree {
                comp[(0, k)] = -c[degree - 1 - k] / lead;
            }
            for k in 1..degree {
                comp[(k, k - 1)] = 1.0;
            }
            for z in comp.complex_eigenvalues().iter() {
                if z.im.abs() <= IMAG_CUTOFF * (1.0 + z.re.abs()) {
                    roots.push(polish(c, z.re));
                }
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// Evaluates `Σ c[k] x^k` and its derivative by Horner's rule.
pub fn eval_with_derivative(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

/// A few Newton steps, kept only while they reduce the residual.
fn polish(c: &[f64], mut x: f64) -> f64 {
    let mut best = eval_with_derivative(c, x).0.abs();
    for _ in 0..8 {
        let (p, dp) = eval_with_derivative(c, x);
        if p == 0.0 || dp == 0.0 {
            break;
        }
        let next = x - p / dp;
        let r = eval_with_derivative(c, next).0.abs();
        if r.is_nan() || r >= best {
            break;
        }
        best = r;
        x = next;
    }
    x
}
