//! Return times to the strip near `q` and the slope bounds along returns.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::model::{validate, ModelSystem};
use crate::numeric::{scaled_power, window_exponent, Window};
use crate::rects::{arc_image, build_sn, first_valid_n, SnRectangle};

/// Absolute slope `|v / u|` of a tangent direction `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slope {
    Finite(f64),
    Vertical,
}

impl Slope {
    pub fn of(u: f64, v: f64) -> Self {
        if u == 0.0 {
            Slope::Vertical
        } else {
            Slope::Finite((v / u).abs())
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Slope::Finite(s) => s,
            Slope::Vertical => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopedPoint {
    pub point: (f64, f64),
    pub slope: f64,
}

/// `slope * (|lambda| / |mu|)^k`, formed in log space.
pub fn push_slope(sys: &ModelSystem, slope: f64, k: i64) -> f64 {
    if slope == 0.0 {
        return 0.0;
    }
    let ratio = (sys.lambda().abs() / sys.mu().abs()).ln();
    (slope.ln() + k as f64 * ratio).exp()
}

fn strip_bounds(sys: &ModelSystem) -> (f64, f64, f64) {
    let e = sys.epsilon;
    (1.0 + e, (1.0 + e).powi(2), (1.0 + e).powi(3))
}

/// Number of linear iterates taking the transition image of `point` into the
/// upper third of the return strip.
pub fn u0(sys: &ModelSystem, point: (f64, f64)) -> Result<i64> {
    let r = sys.r_eps();
    if !r.contains(point) {
        return Err(LabError::Domain {
            chart: "R_eps",
            x: point.0,
            y: point.1,
        });
    }
    let img = sys.apply_phi(point)?;
    if !(img.0 > 0.0) {
        return Err(LabError::WrongQuadrant(img.0));
    }
    let (_, lo, hi) = strip_bounds(sys);
    let k = window_exponent(img.0, sys.mu().abs(), lo, hi, Window::LeftOpen)
        .filter(|&k| k >= 1)
        .ok_or_else(|| {
            LabError::SmallExpandingViolation(format!("no return exponent for abscissa {:e}", img.0))
        })?;
    let back = sys.apply_linear(img, k);
    if !r.contains(back) {
        return Err(LabError::SmallExpandingViolation(format!(
            "f^{k}(phi(x)) = ({:e}, {:e}) is outside R_eps",
            back.0, back.1
        )));
    }
    Ok(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnSlope {
    pub intermediate: Slope,
    pub returned: SlopedPoint,
    pub u0: i64,
}

/// Pushes a nearly horizontal tangent at a strip point through the transition
/// map and back into the strip, checking both slope bounds.
pub fn slope_through_return(sys: &ModelSystem, sp: SlopedPoint) -> Result<ReturnSlope> {
    let e = sys.epsilon;
    let small = e.powf(2.5);
    if !(sp.slope >= 0.0 && sp.slope <= small * (1.0 + 1e-12)) {
        return Err(LabError::InvalidParameter(format!(
            "input slope {:e} exceeds eps^(5/2) = {:e}",
            sp.slope, small
        )));
    }
    let k = u0(sys, sp.point)?;
    let j = sys.jacobian_phi(sp.point)?;
    // either sign of the tangent gives the same absolute slope
    let u = j[0][0] + j[0][1] * sp.slope;
    let v = j[1][0] + j[1][1] * sp.slope;
    let intermediate = Slope::of(u, v);
    let img = sys.phi_local(sp.point.0 - 1.0, sp.point.1);
    let returned = SlopedPoint {
        point: sys.apply_linear(img, k),
        slope: push_slope(sys, intermediate.value(), k),
    };
    if intermediate.value() > 1.0 / small {
        return Err(LabError::LemmaCounterexample(format!(
            "intermediate slope {:e} > eps^(-5/2) = {:e} at ({}, {})",
            intermediate.value(),
            1.0 / small,
            sp.point.0,
            sp.point.1
        )));
    }
    if !(returned.slope <= small) {
        return Err(LabError::LemmaCounterexample(format!(
            "returned slope {:e} > eps^(5/2) = {:e}",
            returned.slope, small
        )));
    }
    Ok(ReturnSlope {
        intermediate,
        returned,
        u0: k,
    })
}

/// Iterates taking the rectangle `S_n` into the upper third of the strip,
/// measured at its right edge.
pub fn i_n(sys: &ModelSystem, sn: &SnRectangle) -> Result<i64> {
    let s_plus = sn.rect.x_hi;
    if !(s_plus > 0.0) {
        return Err(LabError::WrongQuadrant(s_plus));
    }
    let (_, lo, hi) = strip_bounds(sys);
    let k = window_exponent(s_plus, sys.mu().abs(), lo, hi, Window::LeftOpen).ok_or_else(|| {
        LabError::SmallExpandingViolation(format!("no return exponent for s+ = {s_plus:e}"))
    })?;
    let r = sys.r_eps();
    for c in sn.rect.corners() {
        let img = sys.apply_linear(c, k);
        if !r.contains(img) {
            return Err(LabError::SmallExpandingViolation(format!(
                "corner image ({:e}, {:e}) of S_{} is outside R_eps",
                img.0, img.1, sn.n
            )));
        }
    }
    let balance = scaled_power(
        scaled_power(1.0, sys.mu().abs(), k),
        sys.lambda().abs(),
        sn.n as i64,
    );
    if !(0.1..=10.0).contains(&balance) {
        return Err(LabError::SmallExpandingViolation(format!(
            "mu^i_n lambda^n = {balance:e} is not of order one"
        )));
    }
    Ok(k)
}

/// Smallest number of linear iterates putting the abscissa `x` at or beyond
/// `1 + eps`; the image then lies in `[1 + eps, (1 + eps)^3]`.
pub fn j_n(sys: &ModelSystem, x: f64) -> Option<i64> {
    let (lo, _, _) = strip_bounds(sys);
    let mu = sys.mu().abs();
    window_exponent(x, mu, lo, lo * mu, Window::RightOpen)
}

/// Parameter interval of the arc image component with `0 < x <= s` around
/// the rectangle parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaArc {
    pub n: u32,
    pub s: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

const EDGE_BISECTIONS: usize = 80;

/// Walks from `from` in direction `dir` until the image abscissa leaves
/// `(0, s]`; errors if the arc window ends first.
fn beta_end(sys: &ModelSystem, sn: &SnRectangle, s: f64, from: f64, dir: f64) -> Result<f64> {
    let inside = |t: f64| {
        let x = arc_image(sys, sn.n, t).xi;
        x > 0.0 && x <= s
    };
    let w = sn.window;
    let mut good = from;
    let mut h = sn.t_tilde_plus - sn.t_tilde_minus;
    loop {
        let mut next = good + dir * h;
        let clipped = !w.contains(next);
        if clipped {
            next = if dir > 0.0 { w.t_hi } else { w.t_lo };
        }
        if !inside(next) {
            let mut bad = next;
            for _ in 0..EDGE_BISECTIONS {
                let mid = 0.5 * (good + bad);
                if inside(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return Ok(good);
        }
        if clipped {
            return Err(LabError::WindowExceeded { n: sn.n });
        }
        good = next;
        h *= 2.0;
    }
}

pub fn beta_arc(sys: &ModelSystem, sn: &SnRectangle, s: f64) -> Result<BetaArc> {
    if !(sn.rect.x_lo > 0.0 && sn.rect.x_hi <= s) {
        return Err(LabError::InvalidParameter(format!(
            "pr_x(S_{}) = [{:e}, {:e}] is not inside (0, {s:e}]",
            sn.n, sn.rect.x_lo, sn.rect.x_hi
        )));
    }
    Ok(BetaArc {
        n: sn.n,
        s,
        t_lo: beta_end(sys, sn, s, sn.t_tilde_minus, -1.0)?,
        t_hi: beta_end(sys, sn, s, sn.t_tilde_plus, 1.0)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JnSample {
    pub t: f64,
    pub j: i64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JnReport {
    pub n: u32,
    pub s: f64,
    pub beta: BetaArc,
    pub samples: Vec<JnSample>,
    pub max_slope: f64,
    pub bound: f64,
    pub passed: bool,
}

pub const JN_SAMPLES_PER_SIDE: usize = 128;

/// Pushes the arc tangent at sample points of the arc image outside `S_n`
/// back to the strip and compares the largest slope with `eps^(5/2)`.
pub fn jn_slope_check(sys: &ModelSystem, n: u32, s: f64) -> Result<JnReport> {
    let sn = build_sn(sys, n)?;
    let beta = beta_arc(sys, &sn, s)?;
    let bound = sys.epsilon.powf(2.5);
    let r = sys.r_eps();
    let per = JN_SAMPLES_PER_SIDE;
    let mut ts = Vec::with_capacity(2 * per);
    for i in 0..per {
        let f = (i as f64 + 0.5) / per as f64;
        ts.push(beta.t_lo + f * (sn.t_tilde_minus - beta.t_lo));
        ts.push(sn.t_tilde_plus + f * (beta.t_hi - sn.t_tilde_plus));
    }
    ts.sort_by(f64::total_cmp);
    let mut samples = Vec::with_capacity(ts.len());
    let mut max_slope: f64 = 0.0;
    for t in ts {
        let im = arc_image(sys, n, t);
        if sn.rect.contains((im.xi, im.eta)) {
            continue;
        }
        let j = j_n(sys, im.xi)
            .ok_or_else(|| LabError::SmallExpandingViolation(format!("no return exponent at t = {t:e}")))?;
        let landed = sys.apply_linear((im.xi, im.eta), j);
        if !sys.in_chart(landed) {
            return Err(LabError::ChartExit(format!(
                "f^{j} of the arc point at t = {t:e} leaves the linear chart"
            )));
        }
        if !r.contains(landed) {
            return Err(LabError::SmallExpandingViolation(format!(
                "f^{j} of the arc point at t = {t:e} misses R_eps: ({:e}, {:e})",
                landed.0, landed.1
            )));
        }
        let slope = push_slope(sys, Slope::of(im.dxi, im.deta).value(), j);
        max_slope = max_slope.max(slope);
        samples.push(JnSample { t, j, slope });
    }
    Ok(JnReport {
        n,
        s,
        beta,
        passed: max_slope < bound,
        samples,
        max_slope,
        bound,
    })
}

/// Default cutoff grid `0.2, 0.1, 0.05, ...`.
pub fn default_s_grid() -> Vec<f64> {
    (0..24).map(|k| 0.2 * 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SN0 {
    pub s: f64,
    pub n0: u32,
    pub epsilon: f64,
    pub reports: Vec<JnReport>,
}

/// First cutoff `s` on the grid (and the smallest `n0` for it) such that the
/// slope check passes for `n0`, `n0 + 1` and `n0 + 2`. The system is rebuilt
/// with `|mu| = 1 + eps_target`.
pub fn find_s_n0(sys: &ModelSystem, eps_target: f64, s_grid: &[f64]) -> Result<SN0> {
    let sys = sys.with_mu(sys.mu().signum() * (1.0 + eps_target))?;
    let rep = validate(&sys);
    for name in ["tau1_below_inverse_eps", "mu_three_halves_below_inverse_lambda"] {
        if !rep.get(name).is_some_and(|c| c.passed) {
            return Err(LabError::NotFound(format!(
                "standing condition {name} fails at eps = {eps_target}"
            )));
        }
    }
    let first = first_valid_n(&sys).ok_or_else(|| LabError::NotFound("no rectangle can be built".into()))?;
    let n_max = sys.n_max();
    for &s in s_grid {
        let Some(n0) = (first..=n_max)
            .find(|&n| build_sn(&sys, n).is_ok_and(|sn| sn.rect.x_lo > 0.0 && sn.rect.x_hi < s))
        else {
            continue;
        };
        if n0 + 2 > n_max {
            continue;
        }
        let reports: Vec<JnReport> = match (n0..=n0 + 2)
            .map(|n| jn_slope_check(&sys, n, s))
            .collect::<Result<Vec<_>>>()
        {
            Ok(r) => r,
            Err(_) => continue,
        };
        if reports.iter().all(|r| r.passed) {
            return Ok(SN0 {
                s,
                n0,
                epsilon: sys.epsilon,
                reports,
            });
        }
    }
    Err(LabError::NotFound(format!(
        "no cutoff on the grid works at eps = {eps_target}"
    )))
}
