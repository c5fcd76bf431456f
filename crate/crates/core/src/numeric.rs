//! Root finding, least squares and integer return windows.

use crate::error::{LabError, Result};

pub const MAX_NEWTON_STEPS: usize = 50;
const MAX_SAFE_STEPS: usize = 200;

/// Plain Newton iteration from `x0`. Stops when the step is below
/// `tol * max(|x|, scale)`; `scale` sets the absolute floor.
pub fn newton<F>(mut f: F, x0: f64, tol: f64, scale: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut x = x0;
    let mut fx = f64::NAN;
    for _ in 0..MAX_NEWTON_STEPS {
        let (v, dv) = f(x);
        fx = v;
        if v == 0.0 {
            return Ok(x);
        }
        if dv == 0.0 || !dv.is_finite() || !v.is_finite() {
            break;
        }
        let step = v / dv;
        x -= step;
        if step.abs() <= tol * x.abs().max(scale) {
            return Ok(x);
        }
    }
    Err(LabError::NoConvergence {
        iterations: MAX_NEWTON_STEPS,
        last: x,
        residual: fx,
    })
}

/// Safeguarded Newton on a sign-changing bracket `[lo, hi]`: Newton steps
/// that leave the bracket (or shrink it too slowly) are replaced by bisection.
pub fn solve_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a).0;
    let fb = f(b).0;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(LabError::NoConvergence {
            iterations: 0,
            last: a,
            residual: fa,
        });
    }
    // orient so that f(a) < 0 < f(b)
    let flip = fa > 0.0;
    let sgn = |v: f64| if flip { -v } else { v };
    let mut x = 0.5 * (a + b);
    let mut last_width = (b - a).abs();
    let mut fx = f64::NAN;
    for _ in 0..MAX_SAFE_STEPS {
        let (v, dv) = f(x);
        fx = v;
        if v == 0.0 {
            return Ok(x);
        }
        if sgn(v) < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let width = (b - a).abs();
        let mut next = x - v / dv;
        let newton_ok =
            dv != 0.0 && next.is_finite() && next > a.min(b) && next < a.max(b) && width < 0.75 * last_width;
        if !newton_ok {
            next = 0.5 * (a + b);
        }
        last_width = width;
        let step = (next - x).abs();
        x = next;
        if step <= tol || width <= tol {
            return Ok(x);
        }
    }
    Err(LabError::NoConvergence {
        iterations: MAX_SAFE_STEPS,
        last: x,
        residual: fx,
    })
}

/// Result of an ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(LabError::InvalidParameter(format!(
            "line fit needs matching samples (got {} and {})",
            xs.len(),
            ys.len()
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(LabError::InvalidParameter(
            "line fit abscissae are all equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    })
}

/// Exponents up to this size use `powi`; larger ones go through logarithms.
pub const DIRECT_POWER_LIMIT: u64 = 50;

/// `x * base^k`. Moderate exponents multiply directly; large ones (or powers
/// that leave the normal range) are formed in log space.
pub fn scaled_power(x: f64, base: f64, k: i64) -> f64 {
    if k.unsigned_abs() <= DIRECT_POWER_LIMIT {
        let p = base.powi(k as i32);
        if p.is_normal() {
            return x * p;
        }
    }
    if x == 0.0 {
        return 0.0;
    }
    let sign = if base < 0.0 && k % 2 != 0 {
        -x.signum()
    } else {
        x.signum()
    };
    sign * (x.abs().ln() + k as f64 * base.abs().ln()).exp()
}

/// `ln |base^k|`.
pub fn ln_power(base: f64, k: i64) -> f64 {
    k as f64 * base.abs().ln()
}

/// Which end of a return window is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// `lo < v <= hi`
    LeftOpen,
    /// `lo <= v < hi`
    RightOpen,
}

impl Window {
    pub fn contains(self, v: f64, lo: f64, hi: f64) -> bool {
        match self {
            Window::LeftOpen => lo < v && v <= hi,
            Window::RightOpen => lo <= v && v < hi,
        }
    }
}

/// The integer `k` with `x * base^k` in the window, for `x > 0`, `base > 1`
/// and `hi / lo == base` (so that `k` is unique). The logarithm gives a
/// first guess which is then corrected by direct multiplication.
pub fn window_exponent(x: f64, base: f64, lo: f64, hi: f64, window: Window) -> Option<i64> {
    if !(x > 0.0) || !(base > 1.0) || !(lo > 0.0) || !(hi > lo) || !x.is_finite() {
        return None;
    }
    let guess = ((lo / x).ln() / base.ln()).floor() as i64;
    // the log guess can be off by one either way at borderline products
    ((guess - 3)..=(guess + 3)).find(|&k| window.contains(scaled_power(x, base, k), lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracketed_solver_finds_cube_root() {
        let r = solve_bracketed(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn bracketed_solver_rejects_missing_sign_change() {
        assert!(solve_bracketed(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn newton_reports_non_convergence() {
        let err = newton(|x| (x * x + 1.0, 2.0 * x), 0.5, 1e-14, 1.0).unwrap_err();
        assert!(matches!(err, LabError::NoConvergence { .. }));
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = line_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-13);
        assert!(fit.slope_stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_exponent_is_unique_and_checked_directly() {
        let mu = 1.02;
        let eps: f64 = 0.02;
        let k = window_exponent(
            8e-6,
            mu,
            (1.0 + eps).powi(2),
            (1.0 + eps).powi(3),
            Window::LeftOpen,
        )
        .unwrap();
        assert_eq!(k, 595);
        for probe in [k - 1, k + 1] {
            let v = scaled_power(8e-6, mu, probe);
            assert!(!Window::LeftOpen.contains(v, (1.0 + eps).powi(2), (1.0 + eps).powi(3)));
        }
    }

    #[test]
    fn scaled_power_survives_overflowing_power() {
        let v = scaled_power(1e-300, 2.0, 1500);
        assert!(v.is_finite());
        let expected = 1500.0 * 2f64.ln() - 300.0 * 10f64.ln();
        assert!((v.ln() - expected).abs() < 1e-9);
    }
}
