//! The seed arc and its forward images near `q`, the local leaves through `q`
//! and `r`, and tangency order estimates.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::model::ModelSystem;
use crate::numeric::{line_fit, newton, scaled_power, solve_bracketed};
use crate::poly::Poly1;

pub const DEFAULT_SEED_DOMAIN: (f64, f64) = (-1.5, 1.5);
const SIGMA_SAMPLES: usize = 2048;

/// Graph `y = y0(x)` over `domain`, crossing the stable axis transversally at
/// `(0, z0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedArc {
    pub domain: (f64, f64),
    pub poly: Poly1,
    pub z0: f64,
    /// `max |y0'|` over the domain.
    pub sigma: f64,
}

impl SeedArc {
    pub fn new(poly: Poly1, domain: (f64, f64)) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo < 0.0 && hi > 1.0 && lo >= -2.0 && hi <= 2.0) {
            return Err(LabError::InvalidParameter(format!(
                "seed domain [{lo}, {hi}] must lie in [-2, 2] and contain 0 and 1 in its interior"
            )));
        }
        if poly.coeffs().is_empty() || poly.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(LabError::InvalidParameter(
                "seed polynomial needs finite coefficients".into(),
            ));
        }
        let mut sigma: f64 = 0.0;
        for i in 0..=SIGMA_SAMPLES {
            let x = lo + (hi - lo) * i as f64 / SIGMA_SAMPLES as f64;
            if !(poly.eval(x) > 0.0) {
                return Err(LabError::InvalidParameter(format!(
                    "seed arc must stay above the unstable axis, y0({x}) = {}",
                    poly.eval(x)
                )));
            }
            sigma = sigma.max(poly.deriv(1, x).abs());
        }
        let z0 = poly.eval(0.0);
        Ok(Self {
            domain,
            poly,
            z0,
            sigma,
        })
    }

    pub fn constant(z0: f64) -> Self {
        Self::new(Poly1::new(vec![z0]), DEFAULT_SEED_DOMAIN).expect("positive constant seed")
    }
}

/// Parameter window of the `n`-th arc `t -> (t + 1, y_n(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcN {
    pub n: u32,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl ArcN {
    pub fn contains(&self, t: f64) -> bool {
        self.t_lo <= t && t <= self.t_hi
    }
}

/// The admissible parameters of the `n`-th arc: the return window intersected
/// with the image of the seed domain.
pub fn arc_window(sys: &ModelSystem, n: u32) -> ArcN {
    let e = sys.epsilon;
    let lo = (1.0 + e).powi(-3);
    let hi = (1.0 + e).powi(3);
    let (d_lo, d_hi) = sys.seed.domain;
    let a = scaled_power(d_lo, sys.mu(), n as i64);
    let b = scaled_power(d_hi, sys.mu(), n as i64);
    ArcN {
        n,
        t_lo: lo.max(a.min(b)) - 1.0,
        t_hi: hi.min(a.max(b)) - 1.0,
    }
}

/// Height of the `n`-th arc and its first two derivatives in `t`.
pub fn arc_height(sys: &ModelSystem, n: u32, t: f64) -> (f64, f64, f64) {
    let k = scaled_power(1.0, sys.lambda(), n as i64);
    let m = scaled_power(1.0, sys.mu(), -(n as i64));
    let s = m * (t + 1.0);
    let p = &sys.seed.poly;
    (k * p.eval(s), k * m * p.deriv(1, s), k * m * m * p.deriv(2, s))
}

/// `y_n(t1) - y_n(t2)` without cancellation.
pub fn arc_height_diff(sys: &ModelSystem, n: u32, t1: f64, t2: f64) -> f64 {
    let k = scaled_power(1.0, sys.lambda(), n as i64);
    let m = scaled_power(1.0, sys.mu(), -(n as i64));
    sys.seed.poly.diff(m * (t1 + 1.0), m * (t2 + 1.0), m * (t1 - t2)) * k
}

/// Point of the `n`-th arc at parameter `t` and the slope `dy/dt` there.
pub fn alpha(sys: &ModelSystem, n: u32, t: f64) -> Result<((f64, f64), f64)> {
    if !arc_window(sys, n).contains(t) {
        return Err(LabError::Domain {
            chart: "arc parameter window",
            x: t + 1.0,
            y: f64::NAN,
        });
    }
    let (y, dy, _) = arc_height(sys, n, t);
    Ok(((t + 1.0, y), dy))
}

fn leaf_newton<F>(mut g: F, seed: f64, limit: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    match newton(&mut g, seed, 1e-14, f64::MIN_POSITIVE) {
        Ok(v) if v.abs() <= limit => Ok(v),
        first => {
            // widen a bracket around the seed until the sign changes
            let mut w = seed.abs().max(1e-12);
            while w <= 2.0 * limit {
                let (lo, hi) = (seed - w, seed + w);
                if g(lo).0.signum() != g(hi).0.signum() {
                    return solve_bracketed(&mut g, lo, hi, 1e-15 * seed.abs().max(1e-300));
                }
                w *= 2.0;
            }
            first.and(Err(LabError::NoConvergence {
                iterations: 0,
                last: seed,
                residual: g(seed).0,
            }))
        }
    }
}

/// Height of the stable leaf through `q` above `q + (x, 0)`: the root `y` of
/// `pr_x(phi(1 + x, y)) = 0` near `-(c/a) x^3`.
pub fn stable_leaf_v(sys: &ModelSystem, x: f64) -> Result<f64> {
    if x.abs() > sys.uq_half_width {
        return Err(LabError::Domain {
            chart: "U(q)",
            x: 1.0 + x,
            y: 0.0,
        });
    }
    let t = &sys.transition;
    let seed = -(t.c / t.a) * x * x * x;
    leaf_newton(
        |y| {
            let j = sys.phi_jet(x, y);
            (j.p1, j.p1_y)
        },
        seed,
        sys.uq_half_width,
    )
}

/// Abscissa of the unstable leaf through `r` at height `1 + offset`.
pub fn unstable_leaf_w(sys: &ModelSystem, offset: f64) -> Result<f64> {
    if offset.abs() > sys.ur_half_width {
        return Err(LabError::Domain {
            chart: "U(r)",
            x: 0.0,
            y: 1.0 + offset,
        });
    }
    let seed = offset / sys.transition.d;
    let t = leaf_newton(
        |t| {
            let j = sys.phi_jet(t, 0.0);
            (j.p2 - 1.0 - offset, j.p2_x)
        },
        seed,
        sys.uq_half_width,
    )?;
    Ok(sys.p1(t, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub order: f64,
    pub coefficient: f64,
    pub order_stderr: f64,
}

/// Fits `d_leaf ~ coefficient * d_point^order` in log-log coordinates.
pub fn tangency_order(samples: &[(f64, f64)]) -> Result<OrderEstimate> {
    if samples.len() < 8 {
        return Err(LabError::InvalidParameter(format!(
            "tangency order needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(l, p)) = samples.iter().find(|(l, p)| !(*l > 0.0) || !(*p > 0.0)) {
        return Err(LabError::Domain {
            chart: "positive distances",
            x: l,
            y: p,
        });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 2.0 * std::f64::consts::LN_10 * (1.0 - 1e-12) {
        return Err(LabError::InvalidParameter(
            "sample distances must span at least two decades".into(),
        ));
    }
    let fit = line_fit(&xs, &ys)?;
    let mean_log: f64 = xs.iter().zip(&ys).map(|(x, y)| y - fit.slope * x).sum::<f64>() / xs.len() as f64;
    Ok(OrderEstimate {
        order: fit.slope,
        coefficient: mean_log.exp(),
        order_stderr: fit.slope_stderr,
    })
}

/// Samples of the stable leaf through `q` at `count` log-spaced offsets in
/// `[x_lo, x_hi]`: (distance to the unstable axis, distance to `q`).
pub fn stable_leaf_samples(sys: &ModelSystem, x_lo: f64, x_hi: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    let (a, b) = (x_lo.ln(), x_hi.ln());
    (0..count)
        .map(|i| {
            let x = (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp();
            let v = stable_leaf_v(sys, x)?;
            Ok((v.abs(), x.hypot(v)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn seed_arc_is_the_zeroth_arc() {
        let sys = ModelSystem::reference();
        let ((x, y), dy) = alpha(&sys, 0, 0.0).unwrap();
        assert_eq!((x, y, dy), (1.0, 0.5, 0.0));
    }

    #[test]
    fn constant_seed_arc_height() {
        let sys = ModelSystem::reference();
        let ((_, y), dy) = alpha(&sys, 10, 0.01).unwrap();
        assert!(close(y, 2.95245e-6, 1e-6));
        assert_eq!(dy, 0.0);
        assert!(alpha(&sys, 10, 0.5).is_err());
    }

    #[test]
    fn seed_validation() {
        assert!(SeedArc::new(Poly1::new(vec![0.5]), (0.2, 1.5)).is_err());
        assert!(SeedArc::new(Poly1::new(vec![0.1, -1.0]), (-1.0, 1.5)).is_err());
        let s = SeedArc::new(Poly1::new(vec![0.5, 0.15]), (-1.5, 1.5)).unwrap();
        assert_eq!(s.z0, 0.5);
        assert!((s.sigma - 0.15).abs() < 1e-15);
    }

    #[test]
    fn stable_leaf_closed_form() {
        let sys = ModelSystem::reference();
        assert_eq!(stable_leaf_v(&sys, 0.0).unwrap(), 0.0);
        let v = stable_leaf_v(&sys, 0.1).unwrap();
        assert!(close(v, -1e-3 / 0.9, 1e-13));
        assert!(close(v, -1.11111e-3, 1e-5));
        for x in [1e-2, 1e-3] {
            let r = stable_leaf_v(&sys, x).unwrap() / (x * x * x);
            assert!((r + 1.0).abs() < 2.0 * x);
        }
        assert!(stable_leaf_v(&sys, -0.05).unwrap() > 0.0);
        assert!(stable_leaf_v(&sys, 0.05).unwrap() < 0.0);
    }

    #[test]
    fn unstable_leaf_closed_form() {
        let sys = ModelSystem::reference();
        assert_eq!(unstable_leaf_w(&sys, 0.0).unwrap(), 0.0);
        assert!(close(unstable_leaf_w(&sys, -0.1).unwrap(), 1e-3, 1e-12));
        let s = 1e-3;
        let r = unstable_leaf_w(&sys, s).unwrap() / (s * s * s);
        assert!(close(r, 1.0 / (-1.0f64).powi(3), 1e-9));
    }

    #[test]
    fn synthetic_orders_are_exact() {
        let quad: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let d = 10f64.powf(-(i as f64) / 3.0);
                (d * d, d)
            })
            .collect();
        let est = tangency_order(&quad).unwrap();
        assert!((est.order - 2.0).abs() < 1e-12 && (est.coefficient - 1.0).abs() < 1e-12);
        let lin: Vec<(f64, f64)> = quad.iter().map(|&(_, d)| (d, d)).collect();
        assert!((tangency_order(&lin).unwrap().order - 1.0).abs() < 1e-12);
        assert!(tangency_order(&lin[..5]).is_err());
        let mut zero = lin.clone();
        zero[3].0 = 0.0;
        assert!(matches!(tangency_order(&zero), Err(LabError::Domain { .. })));
    }

    #[test]
    fn cubic_order_of_the_reference_leaf() {
        let sys = ModelSystem::reference();
        let samples = stable_leaf_samples(&sys, 1e-5, 1e-2, 16).unwrap();
        let est = tangency_order(&samples).unwrap();
        assert!((est.order - 3.0).abs() < 0.02, "{est:?}");
        assert!((est.coefficient - 1.0).abs() < 0.02, "{est:?}");
    }
}
