//! Conjugacy invariants: return exponents of the arc crossings, the power law
//! a conjugacy must follow on the unstable manifold, curve intersections for
//! explicitly conjugate pairs, and the cubic order probe.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::leaves::{alpha, SeedArc};
use crate::model::{ModelSystem, TransitionSpec};
use crate::numeric::{line_fit, scaled_power, window_exponent, Window};
use crate::poly::{Monomial, Poly1, Poly2};
use crate::rects::{arc_image, build_sn};

/// Canonical point of the arc image near the tangency: the transition image
/// of the arc point above `q`.
pub fn pick_rn(sys: &ModelSystem, n: u32) -> Result<(f64, f64)> {
    let (p, _) = alpha(sys, n, 0.0)?;
    sys.apply_phi(p)
}

/// The `m` with `pr_x(point) * mu^m` in `(1/mu, 1]`, and `f^m(point)`.
pub fn return_exponent(sys: &ModelSystem, point: (f64, f64)) -> Result<(i64, (f64, f64))> {
    let x = point.0;
    if !(x > 0.0) {
        return Err(LabError::WrongQuadrant(x));
    }
    let mu = sys.mu().abs();
    let m = window_exponent(x, mu, 1.0 / mu, 1.0, Window::LeftOpen).ok_or(LabError::NoConvergence {
        iterations: 0,
        last: x,
        residual: f64::NAN,
    })?;
    Ok((m, sys.apply_linear(point, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnRecord {
    pub n: u32,
    pub r_n: (f64, f64),
    pub m_n: i64,
    pub x_n: (f64, f64),
    pub s_n: f64,
    pub c_n: f64,
}

pub fn return_record(sys: &ModelSystem, n: u32) -> Result<ReturnRecord> {
    let r_n = pick_rn(sys, n)?;
    let (m_n, x_n) = return_exponent(sys, r_n)?;
    let ln_mu = sys.mu().abs().ln();
    let s_n = -r_n.0.ln() / ln_mu;
    let az0 = sys.transition.a * sys.seed.z0;
    let c_n = (az0.ln() + n as f64 * sys.lambda().abs().ln() + s_n * ln_mu).exp();
    Ok(ReturnRecord {
        n,
        r_n,
        m_n,
        x_n,
        s_n,
        c_n,
    })
}

pub fn return_records(sys: &ModelSystem, ns: &[u32]) -> Result<Vec<ReturnRecord>> {
    ns.iter().map(|&n| return_record(sys, n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusFit {
    pub rho: f64,
    pub stderr: f64,
    /// `-ln|lambda| / ln|mu|`
    pub target: f64,
}

/// Slope of the return exponent against `n`.
pub fn modulus_fit(sys: &ModelSystem, ns: &[u32]) -> Result<ModulusFit> {
    if ns.len() < 6 {
        return Err(LabError::InvalidParameter(format!(
            "modulus fit needs at least 6 values of n, got {}",
            ns.len()
        )));
    }
    let recs = return_records(sys, ns)?;
    let xs: Vec<f64> = recs.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = recs.iter().map(|r| r.m_n as f64).collect();
    let fit = line_fit(&xs, &ys)?;
    Ok(ModulusFit {
        rho: fit.slope,
        stderr: fit.slope_stderr,
        target: -sys.lambda().abs().ln() / sys.mu().abs().ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnCn {
    pub n: u32,
    pub s_n: f64,
    pub c_n: f64,
}

pub fn sn_cn_series(sys: &ModelSystem, ns: &[u32]) -> Result<Vec<SnCn>> {
    Ok(return_records(sys, ns)?
        .into_iter()
        .map(|r| SnCn {
            n: r.n,
            s_n: r.s_n,
            c_n: r.c_n,
        })
        .collect())
}

/// Eigenvalue estimates read off the crossings: `lambda` from consecutive
/// abscissa ratios, `mu` from that and the fitted modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenEstimates {
    pub lambda: f64,
    pub mu: f64,
}

pub fn eigen_estimates(sys: &ModelSystem, ns: &[u32]) -> Result<EigenEstimates> {
    let recs = return_records(sys, ns)?;
    let steps: Vec<f64> = recs
        .windows(2)
        .filter(|w| w[1].n == w[0].n + 1)
        .map(|w| (w[1].r_n.0 / w[0].r_n.0).ln())
        .collect();
    if steps.is_empty() {
        return Err(LabError::InvalidParameter(
            "eigenvalue estimate needs consecutive n".into(),
        ));
    }
    let ln_lambda = steps.iter().sum::<f64>() / steps.len() as f64;
    let rho = modulus_fit(sys, ns)?.rho;
    Ok(EigenEstimates {
        lambda: ln_lambda.exp(),
        mu: (-ln_lambda / rho).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub c: f64,
    pub tau: f64,
}

/// Log-log fit `hx = C x^tau`.
pub fn power_fit(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 4 {
        return Err(LabError::InvalidParameter(format!(
            "power fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(LabError::Domain {
            chart: "positive power-law data",
            x,
            y,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < std::f64::consts::LN_10 * (1.0 - 1e-12) {
        return Err(LabError::InvalidParameter(
            "power fit data must span at least one decade".into(),
        ));
    }
    let fit = line_fit(&xs, &ys)?;
    Ok(PowerFit {
        c: fit.intercept.exp(),
        tau: fit.slope,
    })
}

/// How the second system is obtained from the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartMap {
    /// `h = id`
    Identity,
    /// `h(x, y) = (x, beta * y)`
    VerticalScale { beta: f64 },
}

impl ChartMap {
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        match *self {
            ChartMap::Identity => (x, y),
            ChartMap::VerticalScale { beta } => (x, beta * y),
        }
    }

    pub fn inverse(&self, (x, y): (f64, f64)) -> (f64, f64) {
        match *self {
            ChartMap::Identity => (x, y),
            ChartMap::VerticalScale { beta } => (x, y / beta),
        }
    }
}

/// Two systems related by `f1 = h f0 h^-1`, with transition iterate counts
/// differing by `m0_shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyPair {
    pub sys_0: ModelSystem,
    pub sys_1: ModelSystem,
    pub h: ChartMap,
    pub m0_shift: i64,
}

impl ConjugacyPair {
    pub fn identity(sys: &ModelSystem) -> Self {
        Self {
            sys_0: sys.clone(),
            sys_1: sys.clone(),
            h: ChartMap::Identity,
            m0_shift: 0,
        }
    }

    /// Conjugate by `h(x, y) = (x, lambda^-shift y)` and let the second
    /// transition map run `shift` more iterates:
    /// `phi1 = h f^shift phi0 h^-1`.
    pub fn rescaled(sys: &ModelSystem, shift: u32) -> Result<Self> {
        let s = shift as i64;
        let lam = sys.lambda();
        let mu_s = scaled_power(1.0, sys.mu(), s);
        let lam_s = scaled_power(1.0, lam, s);
        let t = &sys.transition;
        let scale_terms = |p: &Poly2, outer: f64| {
            Poly2::new(
                p.terms()
                    .iter()
                    .map(|m| Monomial::new(m.i, m.j, m.coef * outer * lam_s.powi(m.j as i32)))
                    .collect(),
            )
        };
        let transition = TransitionSpec {
            a: t.a * mu_s * lam_s,
            b: t.b * mu_s * lam_s,
            c: t.c * mu_s,
            d: t.d,
            e: t.e * lam_s,
            m0: t.m0 + shift,
            h1: scale_terms(&t.h1, mu_s),
            h2: scale_terms(&t.h2, 1.0),
        };
        let seed = SeedArc::new(
            Poly1::new(sys.seed.poly.coeffs().iter().map(|c| c / lam_s).collect()),
            sys.seed.domain,
        )?;
        let mut sys_1 = ModelSystem::new(sys.saddle, transition, seed)?;
        sys_1.uq_half_width = sys.uq_half_width;
        sys_1.ur_half_width = sys.ur_half_width;
        sys_1.tau_grid = sys.tau_grid;
        let pair = Self {
            sys_0: sys.clone(),
            sys_1,
            h: ChartMap::VerticalScale { beta: 1.0 / lam_s },
            m0_shift: s,
        };
        pair.check_conjugation()?;
        Ok(pair)
    }

    /// Same `h = id` bookkeeping for two unrelated systems.
    pub fn unrelated(sys_0: &ModelSystem, sys_1: &ModelSystem) -> Self {
        Self {
            sys_0: sys_0.clone(),
            sys_1: sys_1.clone(),
            h: ChartMap::Identity,
            m0_shift: 0,
        }
    }

    /// `h f^shift phi0 h^-1` applied to a point near `q`.
    pub fn transported_phi(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        let p = self.sys_0.apply_phi(self.h.inverse(point))?;
        Ok(self.h.apply(self.sys_0.apply_linear(p, self.m0_shift)))
    }

    /// Largest relative mismatch between `phi1` and `h f^shift phi0 h^-1` on a
    /// grid of `U(q)`.
    pub fn conjugation_error(&self) -> Result<f64> {
        let w = 0.9 * self.sys_1.uq_half_width;
        let mut worst: f64 = 0.0;
        for i in 0..=8 {
            for j in 0..=8 {
                let p = (1.0 - w + 2.0 * w * i as f64 / 8.0, -w + 2.0 * w * j as f64 / 8.0);
                if !self.sys_0.in_uq(self.h.inverse(p)) {
                    continue;
                }
                let a = self.sys_1.apply_phi(p)?;
                let b = self.transported_phi(p)?;
                let scale = a.0.abs().max(a.1.abs()).max(1e-300);
                worst = worst.max((a.0 - b.0).abs().max((a.1 - b.1).abs()) / scale);
            }
        }
        Ok(worst)
    }

    fn check_conjugation(&self) -> Result<()> {
        let err = self.conjugation_error()?;
        if err > 1e-12 {
            return Err(LabError::InvalidParameter(format!(
                "conjugation identity fails, relative error {err:e}"
            )));
        }
        Ok(())
    }

    /// Matching abscissae on the unstable axis, `(x, h(x))`: the return
    /// point of each crossing, pulled back by `0..spread_steps` multiples of
    /// `spread` iterates so that the data cover more than one fundamental
    /// domain.
    pub fn correspondence_points(
        &self,
        ns: &[u32],
        spread: i64,
        spread_steps: i64,
    ) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for &n in ns {
            let r0 = pick_rn(&self.sys_0, n)?;
            let r1 = pick_rn(&self.sys_1, n)?;
            let (m, _) = return_exponent(&self.sys_0, r0)?;
            for j in 0..spread_steps {
                let k = m - j * spread;
                let x0 = scaled_power(r0.0, self.sys_0.mu(), k);
                let x1 = scaled_power(r1.0, self.sys_1.mu(), k - self.m0_shift);
                out.push((x0, x1));
            }
        }
        Ok(out)
    }

    /// Constant of the predicted power law `h(x) = C x^tau`.
    pub fn predicted_power_law(&self) -> PowerFit {
        let (s0, s1) = (&self.sys_0, &self.sys_1);
        let tau = s1.lambda().abs().ln() / s0.lambda().abs().ln();
        let az0 = s0.transition.a * s0.seed.z0;
        let az1 = s1.transition.a * s1.seed.z0;
        let c = az1 / (az0.powf(tau) * scaled_power(1.0, s1.mu(), self.m0_shift));
        PowerFit { c, tau }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionCheck {
    pub n: u32,
    pub intersects: bool,
    /// Minimum polyline distance at each resolution, relative to the diameter.
    pub relative_distances: Vec<f64>,
    pub diagnostic: String,
}

pub const INTERSECTION_RESOLUTIONS: [usize; 3] = [256, 512, 1024];

fn arc_polyline(sys: &ModelSystem, n: u32, samples: usize) -> Result<Vec<(f64, f64)>> {
    let sn = build_sn(sys, n)?;
    let (lo, hi) = (sn.t_tilde_minus, sn.t_tilde_plus);
    Ok((0..=samples)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / samples as f64;
            let im = arc_image(sys, n, t);
            (im.xi, im.eta)
        })
        .collect())
}

fn seg_dist((px, py): (f64, f64), (ax, ay): (f64, f64), (bx, by): (f64, f64)) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (px - ax - s * dx).hypot(py - ay - s * dy)
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Minimum distance between two polylines, and whether any segments cross.
fn polyline_contact(p: &[(f64, f64)], q: &[(f64, f64)]) -> (f64, bool) {
    let mut best = f64::INFINITY;
    let mut cross = false;
    for a in p.windows(2) {
        for b in q.windows(2) {
            if segments_cross(a[0], a[1], b[0], b[1]) {
                cross = true;
                best = 0.0;
            }
            if best > 0.0 {
                best = best
                    .min(seg_dist(a[0], b[0], b[1]))
                    .min(seg_dist(a[1], b[0], b[1]))
                    .min(seg_dist(b[0], a[0], a[1]))
                    .min(seg_dist(b[1], a[0], a[1]));
            }
        }
    }
    (best, cross)
}

/// Whether the transported arc image of the first system meets the arc image
/// of the second, tested at three resolutions.
pub fn intersection_check(pair: &ConjugacyPair, n: u32) -> Result<IntersectionCheck> {
    let mut distances = Vec::new();
    let mut diagnostic = String::new();
    let mut all = true;
    for &res in &INTERSECTION_RESOLUTIONS {
        let p: Vec<(f64, f64)> = arc_polyline(&pair.sys_0, n, res)?
            .into_iter()
            .map(|pt| pair.h.apply(pair.sys_0.apply_linear(pt, pair.m0_shift)))
            .collect();
        let q = arc_polyline(&pair.sys_1, n, res)?;
        let range = |v: &[(f64, f64)]| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), pt| {
                (lo.min(pt.0), hi.max(pt.0))
            })
        };
        let ((plo, phi), (qlo, qhi)) = (range(&p), range(&q));
        if phi < qlo || qhi < plo {
            return Ok(IntersectionCheck {
                n,
                intersects: false,
                relative_distances: distances,
                diagnostic: format!(
                    "abscissa ranges [{plo:e}, {phi:e}] and [{qlo:e}, {qhi:e}] do not overlap"
                ),
            });
        }
        let diameter = p.iter().chain(&q).fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |acc, pt| (acc.0.min(pt.0), acc.1.max(pt.0), acc.2.min(pt.1), acc.3.max(pt.1)),
        );
        let diameter = (diameter.1 - diameter.0).hypot(diameter.3 - diameter.2);
        let (dist, cross) = polyline_contact(&p, &q);
        let rel = dist / diameter;
        distances.push(rel);
        let hit = cross || rel <= 1e-9;
        if !hit {
            all = false;
            diagnostic = format!("no contact at {res} samples (relative gap {rel:e})");
        }
    }
    Ok(IntersectionCheck {
        n,
        intersects: all,
        relative_distances: distances,
        diagnostic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderRow {
    pub j: u32,
    pub x_j: f64,
    pub l_j: i64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderProbe {
    pub rows: Vec<OrderRow>,
    pub band: (f64, f64),
    pub width_factor: f64,
    pub extended_width_factor: f64,
    pub stable: bool,
    pub slope: f64,
    pub slope_stderr: f64,
}

fn order_row(sys: &ModelSystem, j: u32) -> Result<OrderRow> {
    let x_j = 0.1 * 0.5f64.powi(j as i32);
    let t = sys.apply_phi((1.0 + x_j, 0.0))?;
    let (l_j, _) = return_exponent(sys, t)?;
    let ratio = scaled_power(1.0, sys.mu().abs(), -l_j) / (x_j * x_j * x_j);
    Ok(OrderRow { j, x_j, l_j, ratio })
}

fn band_of(rows: &[OrderRow]) -> (f64, f64) {
    rows.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.ratio), hi.max(r.ratio))
        })
}

/// Return exponents of the transition images of `q + (x_j, 0)` with
/// `x_j = 0.1 * 2^-j`, and how `mu^-l_j` scales with `x_j`.
pub fn order_probe(sys: &ModelSystem, js: std::ops::RangeInclusive<u32>) -> Result<OrderProbe> {
    let rows = js
        .clone()
        .map(|j| order_row(sys, j))
        .collect::<Result<Vec<_>>>()?;
    if rows.len() < 3 {
        return Err(LabError::InvalidParameter(
            "order probe needs 3 or more points".into(),
        ));
    }
    let band = band_of(&rows);
    let mut extended = rows.clone();
    for j in js.end() + 1..=js.end() + 2 {
        extended.push(order_row(sys, j)?);
    }
    let ext = band_of(&extended);
    let mu = sys.mu().abs();
    let xs: Vec<f64> = rows.iter().map(|r| r.x_j.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| -(r.l_j as f64) * mu.ln()).collect();
    let fit = line_fit(&xs, &ys)?;
    Ok(OrderProbe {
        width_factor: band.1 / band.0,
        extended_width_factor: ext.1 / ext.0,
        stable: ext.1 / ext.0 <= mu * (1.0 + 1e-9),
        band,
        rows,
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_crossing_is_closed_form() {
        let sys = ModelSystem::reference();
        let r = pick_rn(&sys, 10).unwrap();
        assert!((r.0 - 0.5 * 0.3f64.powi(10)).abs() < 1e-20);
        let sn = build_sn(&sys, 10).unwrap();
        assert!(sn.rect.contains(r));
    }

    #[test]
    fn return_exponent_for_n10_is_checked_directly() {
        let sys = ModelSystem::reference();
        let r = pick_rn(&sys, 10).unwrap();
        let (m, x) = return_exponent(&sys, r).unwrap();
        assert!(m == 642 || m == 643);
        assert!(x.0 > 1.0 / 1.02 && x.0 <= 1.0);
        assert_eq!(return_exponent(&sys, (1.0, 0.0)).unwrap().0, 0);
    }

    #[test]
    fn synthetic_power_law() {
        let pts: Vec<(f64, f64)> = (0..16)
            .map(|i| {
                let x = 0.01 * 1.5f64.powi(i);
                (x, 2.0 * x.powf(0.7))
            })
            .collect();
        let fit = power_fit(&pts).unwrap();
        assert!((fit.c - 2.0).abs() < 1e-6 && (fit.tau - 0.7).abs() < 1e-6);
        assert!(power_fit(&pts[..3]).is_err());
    }

    #[test]
    fn rescaled_pair_satisfies_the_conjugation() {
        let sys = ModelSystem::reference();
        let pair = ConjugacyPair::rescaled(&sys, 2).unwrap();
        assert!(pair.conjugation_error().unwrap() < 1e-12);
        assert_eq!(pair.sys_1.transition.m0, 3);
        let pred = pair.predicted_power_law();
        assert!((pred.c - 1.0).abs() < 1e-12 && (pred.tau - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_and_series() {
        let sys = ModelSystem::reference();
        let ns: Vec<u32> = (5..=22).collect();
        let fit = modulus_fit(&sys, &ns).unwrap();
        assert!((fit.target - 60.799).abs() < 1e-3);
        assert!((fit.rho - fit.target).abs() < 0.3, "{fit:?}");
        let series = sn_cn_series(&sys, &ns).unwrap();
        for w in series.windows(2) {
            assert!((w[1].s_n - w[0].s_n - fit.target).abs() < 1e-9);
        }
        assert!(series.iter().all(|r| (r.c_n - 1.0).abs() < 1e-12));
        let est = eigen_estimates(&sys, &ns).unwrap();
        assert!((est.lambda - 0.3).abs() < 1e-12);
        assert!((est.mu - 1.02).abs() < 1e-4);
    }

    #[test]
    fn rescaled_pair_has_identity_power_law_and_meeting_curves() {
        let sys = ModelSystem::reference();
        let pair = ConjugacyPair::rescaled(&sys, 2).unwrap();
        let ns: Vec<u32> = (6..=20).collect();
        let pts = pair.correspondence_points(&ns, 40, 4).unwrap();
        let fit = power_fit(&pts).unwrap();
        assert!(
            (fit.c - 1.0).abs() < 1e-6 && (fit.tau - 1.0).abs() < 1e-6,
            "{fit:?}"
        );
        let check = intersection_check(&pair, 10).unwrap();
        assert!(check.intersects, "{check:?}");
        let a = modulus_fit(&pair.sys_0, &ns).unwrap().rho;
        let b = modulus_fit(&pair.sys_1, &ns).unwrap().rho;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn unrelated_pair_does_not_meet() {
        let sys = ModelSystem::reference();
        let lam = {
            let mut s = sys.clone();
            s.saddle.lambda = 0.5;
            ModelSystem::new(s.saddle, s.transition, s.seed).unwrap()
        };
        let other_check = intersection_check(&ConjugacyPair::unrelated(&sys, &lam), 10).unwrap();
        assert!(!other_check.intersects, "{other_check:?}");
        assert!(!other_check.diagnostic.is_empty());
    }

    #[test]
    fn order_probe_band() {
        let sys = ModelSystem::reference();
        let p = order_probe(&sys, 0..=10).unwrap();
        assert!(p.width_factor <= 1.02 + 1e-12);
        assert!(p.band.0 >= 1.0 - 1e-12 && p.band.1 < 1.02);
        assert!((p.slope - 3.0).abs() < 0.02);
        assert!(p.stable);
    }
}
