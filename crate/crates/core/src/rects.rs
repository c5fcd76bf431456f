//! Rectangles framing the S-shaped transition images of the arcs near the
//! tangency point `r`.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::leaves::{arc_height, arc_height_diff, arc_window, ArcN};
use crate::model::{ModelSystem, Rect};
use crate::numeric::{line_fit, solve_bracketed};

/// Transition image of the `n`-th arc at one parameter: abscissa `xi`,
/// ordinate `eta` and their `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcImage {
    pub xi: f64,
    pub dxi: f64,
    pub ddxi: f64,
    pub eta: f64,
    pub deta: f64,
    pub y: f64,
    pub dy: f64,
}

pub fn arc_image(sys: &ModelSystem, n: u32, t: f64) -> ArcImage {
    let (y, dy, ddy) = arc_height(sys, n, t);
    let j = sys.phi_jet(t, y);
    ArcImage {
        xi: j.p1,
        dxi: j.p1_x + j.p1_y * dy,
        ddxi: j.p1_xx + 2.0 * j.p1_xy * dy + j.p1_yy * dy * dy + j.p1_y * ddy,
        eta: j.p2,
        deta: j.p2_x + j.p2_y * dy,
        y,
        dy,
    }
}

/// `xi(t1) - xi(t2)` without cancellation.
pub fn xi_diff(sys: &ModelSystem, n: u32, t1: f64, t2: f64) -> f64 {
    let y1 = arc_height(sys, n, t1).0;
    let y2 = arc_height(sys, n, t2).0;
    sys.p1_diff((t1, y1), (t2, y2), t1 - t2, arc_height_diff(sys, n, t1, t2))
}

/// `eta(t1) - eta(t2)` without cancellation.
pub fn eta_diff(sys: &ModelSystem, n: u32, t1: f64, t2: f64) -> f64 {
    let y1 = arc_height(sys, n, t1).0;
    let y2 = arc_height(sys, n, t2).0;
    sys.p2_diff((t1, y1), (t2, y2), t1 - t2, arc_height_diff(sys, n, t1, t2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnRectangle {
    pub n: u32,
    pub t_minus: f64,
    pub t_plus: f64,
    pub t_tilde_minus: f64,
    pub t_tilde_plus: f64,
    pub rho_n: f64,
    pub rect: Rect,
    /// Distance from the rectangle to the stable axis `x = 0`.
    pub d_n: f64,
    pub w_0n: f64,
    pub h_0n: f64,
    pub window: ArcN,
}

impl SnRectangle {
    /// The four marked points in parameter order.
    pub fn params(&self) -> [f64; 4] {
        [self.t_tilde_minus, self.t_minus, self.t_plus, self.t_tilde_plus]
    }
}

fn half_power(sys: &ModelSystem, n: u32) -> f64 {
    sys.lambda().abs().powf(0.5 * n as f64)
}

/// Parameters where the transition image of the `n`-th arc has a vertical
/// tangent, `(t_minus, t_plus)`.
pub fn vertical_params(sys: &ModelSystem, n: u32) -> Result<(f64, f64)> {
    let t = &sys.transition;
    let window = arc_window(sys, n);
    let y0 = arc_height(sys, n, 0.0).0;
    let q = -t.b * y0 / (3.0 * t.c);
    if !(q > 0.0) {
        return Err(LabError::NoVerticalTangency { n });
    }
    let root = q.sqrt();
    let dxi = |s: f64| {
        let im = arc_image(sys, n, s);
        (im.dxi, im.ddxi)
    };
    let solve = |dir: f64| -> Result<f64> {
        let mut reach = 2.0 * root;
        loop {
            let far = dir * reach;
            if !window.contains(far) {
                return Err(LabError::WindowExceeded { n });
            }
            if dxi(0.0).0.signum() != dxi(far).0.signum() {
                return solve_bracketed(dxi, 0.0, far, 1e-15 * root);
            }
            reach *= 1.5;
        }
    };
    let plus = solve(1.0).map_err(|e| no_tangency(e, n))?;
    let minus = solve(-1.0).map_err(|e| no_tangency(e, n))?;
    if !(minus < 0.0 && 0.0 < plus) {
        return Err(LabError::NoVerticalTangency { n });
    }
    Ok((minus, plus))
}

fn no_tangency(e: LabError, n: u32) -> LabError {
    match e {
        LabError::WindowExceeded { .. } => e,
        _ => LabError::NoVerticalTangency { n },
    }
}

/// Parameters beyond the vertical tangencies whose images share the
/// abscissa of the opposite tangency point.
pub fn extended_params(sys: &ModelSystem, n: u32, t_minus: f64, t_plus: f64) -> Result<(f64, f64)> {
    let window = arc_window(sys, n);
    let span = t_plus - t_minus;
    let solve = |from: f64, other: f64, dir: f64| -> Result<f64> {
        let g = |s: f64| (xi_diff(sys, n, s, other), arc_image(sys, n, s).dxi);
        let g0 = g(from).0;
        let mut reach = 0.25 * span;
        loop {
            let far = from + dir * reach;
            if !window.contains(far) {
                return Err(LabError::WindowExceeded { n });
            }
            if g(far).0.signum() != g0.signum() {
                return solve_bracketed(g, from, far, 1e-15 * span);
            }
            reach *= 1.5;
        }
    };
    let tt_plus = solve(t_plus, t_minus, 1.0)?;
    let tt_minus = solve(t_minus, t_plus, -1.0)?;
    Ok((tt_minus, tt_plus))
}

/// The rectangle framing the S-shaped image between the extended parameters.
pub fn build_sn(sys: &ModelSystem, n: u32) -> Result<SnRectangle> {
    let (t_minus, t_plus) = vertical_params(sys, n)?;
    let (tt_minus, tt_plus) = extended_params(sys, n, t_minus, t_plus)?;
    let ts = [tt_minus, t_minus, t_plus, tt_plus];
    // offsets relative to the image of t_minus keep the width exact
    let anchor = arc_image(sys, n, t_minus);
    let dx: Vec<f64> = ts.iter().map(|&s| xi_diff(sys, n, s, t_minus)).collect();
    let dy: Vec<f64> = ts.iter().map(|&s| eta_diff(sys, n, s, t_minus)).collect();
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rect = Rect::new(
        anchor.xi + min(&dx),
        anchor.xi + max(&dx),
        anchor.eta + min(&dy),
        anchor.eta + max(&dy),
    );
    let w_0n = max(&dx) - min(&dx);
    let h_0n = max(&dy) - min(&dy);
    let d_n = if rect.x_lo > 0.0 {
        rect.x_lo
    } else if rect.x_hi < 0.0 {
        -rect.x_hi
    } else {
        0.0
    };
    for c in rect.corners() {
        if !sys.in_ur(c) {
            return Err(LabError::ChartExit(format!(
                "rectangle for n = {n} leaves U(r) at ({:e}, {:e})",
                c.0, c.1
            )));
        }
    }
    Ok(SnRectangle {
        n,
        t_minus,
        t_plus,
        t_tilde_minus: tt_minus,
        t_tilde_plus: tt_plus,
        rho_n: (tt_plus - t_plus) / half_power(sys, n),
        rect,
        d_n,
        w_0n,
        h_0n,
        window: arc_window(sys, n),
    })
}

/// Smallest `n <= n_max` for which the rectangle can be built.
pub fn first_valid_n(sys: &ModelSystem) -> Option<u32> {
    (0..=sys.n_max()).find(|&n| build_sn(sys, n).is_ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub stderr: f64,
}

/// Exponent `k` in `value ~ |lambda|^{k n}`.
pub fn scaling_fit(pairs: &[(u32, f64)], lambda: f64) -> Result<ScalingFit> {
    if pairs.len() < 5 {
        return Err(LabError::InvalidParameter(format!(
            "scaling fit needs at least 5 pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(&(n, v)) = pairs.iter().find(|p| !(p.1 > 0.0)) {
        return Err(LabError::Domain {
            chart: "positive series values",
            x: n as f64,
            y: v,
        });
    }
    let ll = lambda.abs().ln();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64 * ll).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: fit.slope,
        r_squared: fit.r_squared,
        stderr: fit.slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn vertical_params_closed_form() {
        let sys = ModelSystem::reference();
        let (m, p) = vertical_params(&sys, 10).unwrap();
        let exact = (0.5 * 0.3f64.powi(10) / 3.0).sqrt();
        assert!(close(p, exact, 1e-12) && close(m, -exact, 1e-12));
        assert!(close(p, 9.9204e-4, 1e-4));
    }

    #[test]
    fn extended_params_double_the_vertical_ones() {
        let sys = ModelSystem::reference();
        let (m, p) = vertical_params(&sys, 10).unwrap();
        let (tm, tp) = extended_params(&sys, 10, m, p).unwrap();
        assert!(close(tp, 2.0 * p, 1e-10) && close(tm, 2.0 * m, 1e-10));
        assert!(tm < m && m < 0.0 && 0.0 < p && p < tp);
    }

    #[test]
    fn rectangle_metrics_for_n10() {
        let sys = ModelSystem::reference();
        let sn = build_sn(&sys, 10).unwrap();
        let y = 0.5 * 0.3f64.powi(10);
        assert!(close(sn.w_0n, 4.0 / 3.0 * y * sn.t_plus, 1e-9));
        assert!(close(sn.w_0n, 3.905e-9, 1e-3));
        assert!(close(sn.h_0n, 4.0 * sn.t_plus, 1e-12));
        assert!(close(sn.d_n, 2.9505e-6, 1e-4));
    }

    #[test]
    fn small_n_is_rejected() {
        let sys = ModelSystem::reference();
        assert_eq!(first_valid_n(&sys), Some(5));
        assert!(matches!(
            build_sn(&sys, 4),
            Err(LabError::WindowExceeded { n: 4 })
        ));
    }

    #[test]
    fn wrong_parity_has_no_vertical_tangent() {
        let mut sys = ModelSystem::reference();
        sys.saddle.lambda = -0.3;
        let sys = ModelSystem::new(sys.saddle, sys.transition, sys.seed).unwrap();
        assert!(matches!(
            vertical_params(&sys, 11),
            Err(LabError::NoVerticalTangency { n: 11 })
        ));
        assert!(vertical_params(&sys, 12).is_ok());
    }

    #[test]
    fn scaling_fit_basics() {
        let flat: Vec<(u32, f64)> = (0..6).map(|n| (n, 2.5)).collect();
        assert!(scaling_fit(&flat, 0.3).unwrap().exponent.abs() < 1e-12);
        assert!(scaling_fit(&flat[..4], 0.3).is_err());
        let mut bad = flat.clone();
        bad[2].1 = 0.0;
        assert!(scaling_fit(&bad, 0.3).is_err());
    }
}
