//! The piecewise model map: a linear saddle chart around `p = (0, 0)` and a
//! polynomial transition map from a neighbourhood of `q = (1, 0)` to a
//! neighbourhood of `r = (0, 1)`.

use serde::Serialize;

use crate::cases::{self, Region};
use crate::error::{LabError, Result};
use crate::leaves::SeedArc;
use crate::numeric::scaled_power;
use crate::poly::{Monomial, Poly2};

pub const DEFAULT_CHART_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_NEIGHBORHOOD_HALF_WIDTH: f64 = 0.3;
pub const DEFAULT_TAU_GRID: usize = 256;
/// Smallest admissible `|lambda|^{n/2}`; bounds the cancellation error of the
/// rectangle metrics.
pub const MIN_HALF_POWER: f64 = 1e-6;

/// Row-major 2x2 derivative matrix.
pub type Jacobian = [[f64; 2]; 2];

/// Eigenvalues of the saddle and the size of its linearising chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleSpec {
    pub lambda: f64,
    pub mu: f64,
    pub chart_half_width: f64,
}

impl SaddleSpec {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Self {
            lambda,
            mu,
            chart_half_width: DEFAULT_CHART_HALF_WIDTH,
        }
    }
}

/// Jet of the transition map at `q` plus higher order terms, all in local
/// coordinates centred at `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub m0: u32,
    pub h1: Poly2,
    pub h2: Poly2,
}

/// Monomials that the higher order part of the first component may not use.
pub const H1_FORBIDDEN: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (3, 0)];
/// Monomials that the higher order part of the second component may not use.
pub const H2_FORBIDDEN: [(u32, u32); 3] = [(0, 0), (1, 0), (0, 1)];

impl TransitionSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64) -> Self {
        Self {
            a,
            b,
            c,
            d,
            e,
            m0: 1,
            h1: Poly2::default(),
            h2: Poly2::default(),
        }
    }

    fn first_component(&self) -> Poly2 {
        let mut p = Poly2::new(vec![
            Monomial::new(0, 1, self.a),
            Monomial::new(1, 1, self.b),
            Monomial::new(3, 0, self.c),
        ]);
        for t in self.h1.terms() {
            p.push(*t);
        }
        p
    }

    fn second_component(&self) -> Poly2 {
        let mut p = Poly2::new(vec![
            Monomial::new(0, 0, 1.0),
            Monomial::new(1, 0, self.d),
            Monomial::new(0, 1, self.e),
        ]);
        for t in self.h2.terms() {
            p.push(*t);
        }
        p
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        Self {
            x_lo: x_lo.min(x_hi),
            x_hi: x_lo.max(x_hi),
            y_lo: y_lo.min(y_hi),
            y_hi: y_lo.max(y_hi),
        }
    }

    /// Smallest rectangle containing all points.
    pub fn bounding(points: &[(f64, f64)]) -> Self {
        let mut r = Rect {
            x_lo: f64::INFINITY,
            x_hi: f64::NEG_INFINITY,
            y_lo: f64::INFINITY,
            y_hi: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            r.x_lo = r.x_lo.min(x);
            r.x_hi = r.x_hi.max(x);
            r.y_lo = r.y_lo.min(y);
            r.y_hi = r.y_hi.max(y);
        }
        r
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> f64 {
        self.y_hi - self.y_lo
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_lo + self.x_hi), 0.5 * (self.y_lo + self.y_hi))
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        self.x_lo <= x && x <= self.x_hi && self.y_lo <= y && y <= self.y_hi
    }

    /// Containment with slack `tol_x`, `tol_y` on each side.
    pub fn contains_within(&self, (x, y): (f64, f64), tol_x: f64, tol_y: f64) -> bool {
        self.x_lo - tol_x <= x && x <= self.x_hi + tol_x && self.y_lo - tol_y <= y && y <= self.y_hi + tol_y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains((other.x_lo, other.y_lo)) && self.contains((other.x_hi, other.y_hi))
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.x_lo, self.y_lo),
            (self.x_hi, self.y_lo),
            (self.x_hi, self.y_hi),
            (self.x_lo, self.y_hi),
        ]
    }
}

/// Values and partial derivatives of both transition components at one point
/// (local coordinates around `q`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiJet {
    pub p1: f64,
    pub p1_x: f64,
    pub p1_y: f64,
    pub p1_xx: f64,
    pub p1_xy: f64,
    pub p1_yy: f64,
    pub p2: f64,
    pub p2_x: f64,
    pub p2_y: f64,
}

/// The complete computable system.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSystem {
    pub saddle: SaddleSpec,
    pub transition: TransitionSpec,
    pub seed: SeedArc,
    /// `|mu| - 1`
    pub epsilon: f64,
    pub uq_half_width: f64,
    pub ur_half_width: f64,
    pub tau_grid: usize,
    p1: Poly2,
    p2: Poly2,
}

impl ModelSystem {
    /// Builds the system. Only structural problems are rejected here; the
    /// standing conditions are reported by [`validate`].
    pub fn new(saddle: SaddleSpec, transition: TransitionSpec, seed: SeedArc) -> Result<Self> {
        let nums = [
            saddle.lambda,
            saddle.mu,
            transition.a,
            transition.b,
            transition.c,
            transition.d,
            transition.e,
        ];
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(LabError::InvalidParameter("non-finite coefficient".into()));
        }
        if !(saddle.chart_half_width > 0.0) {
            return Err(LabError::InvalidParameter(format!(
                "chart half width must be positive, got {}",
                saddle.chart_half_width
            )));
        }
        if saddle.lambda == 0.0 {
            return Err(LabError::InvalidParameter("lambda must be nonzero".into()));
        }
        if transition.m0 == 0 {
            return Err(LabError::InvalidParameter("m0 must be at least 1".into()));
        }
        let p1 = transition.first_component();
        let p2 = transition.second_component();
        Ok(Self {
            epsilon: saddle.mu.abs() - 1.0,
            saddle,
            transition,
            seed,
            uq_half_width: DEFAULT_NEIGHBORHOOD_HALF_WIDTH,
            ur_half_width: DEFAULT_NEIGHBORHOOD_HALF_WIDTH,
            tau_grid: DEFAULT_TAU_GRID,
            p1,
            p2,
        })
    }

    /// The reference instance used throughout the tests.
    pub fn reference() -> Self {
        Self::new(
            SaddleSpec::new(0.3, 1.02),
            TransitionSpec::new(1.0, -1.0, 1.0, -1.0, 0.0),
            SeedArc::constant(0.5),
        )
        .expect("reference system is well formed")
    }

    pub fn with_neighborhoods(mut self, uq_half_width: f64, ur_half_width: f64) -> Result<Self> {
        if !(uq_half_width > 0.0) || !(ur_half_width > 0.0) {
            return Err(LabError::InvalidParameter(
                "neighbourhood half widths must be positive".into(),
            ));
        }
        self.uq_half_width = uq_half_width;
        self.ur_half_width = ur_half_width;
        Ok(self)
    }

    pub fn with_tau_grid(mut self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidParameter(
                "tau grid needs at least 2 points".into(),
            ));
        }
        self.tau_grid = n;
        Ok(self)
    }

    /// Same system with a different expanding eigenvalue (and so a different
    /// `epsilon`).
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        let mut saddle = self.saddle;
        saddle.mu = mu;
        let mut out = Self::new(saddle, self.transition.clone(), self.seed.clone())?;
        out.uq_half_width = self.uq_half_width;
        out.ur_half_width = self.ur_half_width;
        out.tau_grid = self.tau_grid;
        Ok(out)
    }

    pub fn with_seed(&self, seed: SeedArc) -> Result<Self> {
        let mut out = Self::new(self.saddle, self.transition.clone(), seed)?;
        out.uq_half_width = self.uq_half_width;
        out.ur_half_width = self.ur_half_width;
        out.tau_grid = self.tau_grid;
        Ok(out)
    }

    pub fn lambda(&self) -> f64 {
        self.saddle.lambda
    }

    pub fn mu(&self) -> f64 {
        self.saddle.mu
    }

    /// Largest `n` with `|lambda|^{n/2} >= 1e-6`.
    pub fn n_max(&self) -> u32 {
        let v = 2.0 * MIN_HALF_POWER.ln() / self.saddle.lambda.abs().ln();
        if v.is_finite() && v > 0.0 {
            v.floor() as u32
        } else {
            0
        }
    }

    /// `[1+eps, (1+eps)^3] x [0, eps^3]`
    pub fn r_eps(&self) -> Rect {
        let e = self.epsilon;
        Rect::new(1.0 + e, (1.0 + e).powi(3), 0.0, e.powi(3))
    }

    /// `[(1+eps)^-3, (1+eps)^-1] x [0, eps^3]`
    pub fn r_eps_minus(&self) -> Rect {
        let e = self.epsilon;
        Rect::new((1.0 + e).powi(-3), 1.0 / (1.0 + e), 0.0, e.powi(3))
    }

    /// The return strip used by this system's sign case.
    pub fn return_region(&self) -> Rect {
        match cases::region_for(&self.sign_case()) {
            Region::REpsMinus => self.r_eps_minus(),
            Region::REps => self.r_eps(),
        }
    }

    pub fn sign_case(&self) -> cases::SignCase {
        let t = &self.transition;
        cases::classify(
            sign(t.a),
            sign(t.b) * sign(t.c),
            sign(self.saddle.lambda),
            sign(self.saddle.mu),
        )
    }

    /// `f^k` on the linear chart; `k` may be negative.
    pub fn apply_linear(&self, (x, y): (f64, f64), k: i64) -> (f64, f64) {
        (
            scaled_power(x, self.saddle.mu, k),
            scaled_power(y, self.saddle.lambda, k),
        )
    }

    pub fn in_chart(&self, (x, y): (f64, f64)) -> bool {
        let w = self.saddle.chart_half_width;
        x.abs() <= w && y.abs() <= w
    }

    pub fn in_uq(&self, (x, y): (f64, f64)) -> bool {
        (x - 1.0).abs() <= self.uq_half_width && y.abs() <= self.uq_half_width
    }

    pub fn in_ur(&self, (x, y): (f64, f64)) -> bool {
        x.abs() <= self.ur_half_width && (y - 1.0).abs() <= self.ur_half_width
    }

    /// Transition map in chart coordinates.
    pub fn apply_phi(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        self.check_uq(point)?;
        Ok(self.phi_local(point.0 - 1.0, point.1))
    }

    /// Transition map at local coordinates `(x, y) = point - q`, no domain check.
    pub fn phi_local(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p1.eval(x, y), self.p2.eval(x, y))
    }

    /// First component only, local coordinates.
    pub fn p1(&self, x: f64, y: f64) -> f64 {
        self.p1.eval(x, y)
    }

    /// `P1(x1, y1) - P1(x2, y2)` without cancellation, given the increments.
    pub fn p1_diff(&self, a: (f64, f64), b: (f64, f64), dx: f64, dy: f64) -> f64 {
        self.p1.diff(a, b, dx, dy)
    }

    pub fn p2_diff(&self, a: (f64, f64), b: (f64, f64), dx: f64, dy: f64) -> f64 {
        self.p2.diff(a, b, dx, dy)
    }

    pub fn phi_jet(&self, x: f64, y: f64) -> PhiJet {
        PhiJet {
            p1: self.p1.eval(x, y),
            p1_x: self.p1.deriv(1, 0, x, y),
            p1_y: self.p1.deriv(0, 1, x, y),
            p1_xx: self.p1.deriv(2, 0, x, y),
            p1_xy: self.p1.deriv(1, 1, x, y),
            p1_yy: self.p1.deriv(0, 2, x, y),
            p2: self.p2.eval(x, y),
            p2_x: self.p2.deriv(1, 0, x, y),
            p2_y: self.p2.deriv(0, 1, x, y),
        }
    }

    /// Jacobian of the transition map, rows are components.
    pub fn jacobian_phi(&self, point: (f64, f64)) -> Result<Jacobian> {
        self.check_uq(point)?;
        Ok(self.jacobian_local(point.0 - 1.0, point.1))
    }

    pub fn jacobian_local(&self, x: f64, y: f64) -> Jacobian {
        [
            [self.p1.deriv(1, 0, x, y), self.p1.deriv(0, 1, x, y)],
            [self.p2.deriv(1, 0, x, y), self.p2.deriv(0, 1, x, y)],
        ]
    }

    fn check_uq(&self, point: (f64, f64)) -> Result<()> {
        if self.in_uq(point) {
            Ok(())
        } else {
            Err(LabError::Domain {
                chart: "U(q)",
                x: point.0,
                y: point.1,
            })
        }
    }
}

fn sign(v: f64) -> i8 {
    if v < 0.0 {
        -1
    } else {
        1
    }
}

/// One named standing condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
    pub sign_case: String,
    pub tau: Option<TauBounds>,
}

impl ConditionReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Condition> {
        self.conditions.iter().filter(|c| !c.passed).collect()
    }
}

/// Range of `pr_x(phi(R_eps)) / eps^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauBounds {
    pub tau0: f64,
    pub tau1: f64,
    /// Small-`eps` limit of the lower bound, `c`.
    pub corner_low: f64,
    /// Small-`eps` limit of the upper bound, `a + 27c`.
    pub corner_high: f64,
}

/// Grid estimate of the transition image abscissae over `R_eps`, scaled by
/// `eps^3`. Evaluated without the `U(q)` check so that large `eps` can be
/// diagnosed too.
pub fn tau_bounds(sys: &ModelSystem) -> Result<TauBounds> {
    let r = sys.r_eps();
    let e3 = sys.epsilon.powi(3);
    if !(e3 > 0.0) {
        return Err(LabError::InvalidParameter(
            "expanding eigenvalue must exceed 1 in modulus".into(),
        ));
    }
    let n = sys.tau_grid;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let x = r.x_lo + r.width() * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let y = r.y_lo + r.height() * j as f64 / (n - 1) as f64;
            let v = sys.p1(x - 1.0, y) / e3;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo <= 0.0 {
        return Err(LabError::WrongQuadrant(lo * e3));
    }
    let t = &sys.transition;
    Ok(TauBounds {
        tau0: lo,
        tau1: hi,
        corner_low: t.c,
        corner_high: t.a + 27.0 * t.c,
    })
}

fn cond(name: &str, passed: bool, measured: f64, detail: impl Into<String>) -> Condition {
    Condition {
        name: name.to_string(),
        passed,
        measured,
        detail: detail.into(),
    }
}

/// Checks every standing condition; failures are entries, never errors.
pub fn validate(sys: &ModelSystem) -> ConditionReport {
    let s = &sys.saddle;
    let t = &sys.transition;
    let mut out = Vec::new();
    out.push(cond(
        "eigenvalues",
        0.0 < s.lambda.abs() && s.lambda.abs() < 1.0 && 1.0 < s.mu.abs(),
        s.lambda.abs().ln() / s.mu.abs().ln(),
        format!("0 < |lambda| = {} < 1 < |mu| = {}", s.lambda.abs(), s.mu.abs()),
    ));
    out.push(cond("a_nonzero", t.a != 0.0, t.a, "a != 0"));
    out.push(cond("d_nonzero", t.d != 0.0, t.d, "d != 0"));
    out.push(cond("cubic_c_nonzero", t.c != 0.0, t.c, "c != 0"));
    out.push(cond("EX1", t.b != 0.0, t.b, "extra open condition b != 0"));

    let bad_h1: Vec<String> = H1_FORBIDDEN
        .iter()
        .filter(|&&(i, j)| t.h1.coefficient(i, j) != 0.0)
        .map(|(i, j)| format!("x^{i} y^{j}"))
        .collect();
    out.push(cond(
        "h1_jet",
        bad_h1.is_empty(),
        bad_h1.len() as f64,
        if bad_h1.is_empty() {
            "no low-order monomials".to_string()
        } else {
            format!("forbidden monomials {}", bad_h1.join(", "))
        },
    ));
    let bad_h2: Vec<String> = H2_FORBIDDEN
        .iter()
        .filter(|&&(i, j)| t.h2.coefficient(i, j) != 0.0)
        .map(|(i, j)| format!("x^{i} y^{j}"))
        .collect();
    out.push(cond(
        "h2_jet",
        bad_h2.is_empty(),
        bad_h2.len() as f64,
        if bad_h2.is_empty() {
            "no low-order monomials".to_string()
        } else {
            format!("forbidden monomials {}", bad_h2.join(", "))
        },
    ));
    let tau = tau_bounds(sys);
    let inv_eps = 1.0 / sys.epsilon;
    match &tau {
        Ok(tb) => out.push(cond(
            "tau1_below_inverse_eps",
            tb.tau1 < inv_eps,
            tb.tau1,
            format!("tau1 = {:.4} vs 1/eps = {:.4}", tb.tau1, inv_eps),
        )),
        Err(e) => out.push(cond("tau1_below_inverse_eps", false, f64::NAN, e.to_string())),
    }
    let lhs = s.mu.abs().powf(1.5);
    out.push(cond(
        "mu_three_halves_below_inverse_lambda",
        lhs < 1.0 / s.lambda.abs(),
        lhs,
        format!(
            "|mu|^1.5 = {:.6} vs 1/|lambda| = {:.6}",
            lhs,
            1.0 / s.lambda.abs()
        ),
    ));

    let case = sys.sign_case();
    let ad = cases::adaptability(&case);
    out.push(cond(
        "adaptable",
        ad.adaptable,
        if ad.adaptable { 1.0 } else { 0.0 },
        format!("sign case {}", case.label),
    ));
    ConditionReport {
        conditions: out,
        sign_case: case.label,
        tau: tau.ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn linear_map_examples() {
        let sys = ModelSystem::reference();
        assert_eq!(sys.apply_linear((0.0, 0.0), 17), (0.0, 0.0));
        assert_eq!(sys.apply_linear((1.0, 0.0), 1), (1.02, 0.0));
        let (_, y) = sys.apply_linear((0.0, 0.5), 10);
        assert!(close(y, 0.5 * 0.3f64.powi(10), 1e-14));
        assert!(close(y, 2.95245e-6, 1e-6));
    }

    #[test]
    fn large_exponents_go_through_logs() {
        let sys = ModelSystem::reference();
        let (x, y) = sys.apply_linear((1e-5, 0.5), 595);
        assert!(close(x, 1e-5 * (595.0 * 1.02f64.ln()).exp(), 1e-12));
        assert!(y > 0.0 && y < 1e-300);
        let (x2, _) = sys.apply_linear((x, 0.0), -595);
        assert!(close(x2, 1e-5, 1e-12));
    }

    #[test]
    fn transition_examples() {
        let sys = ModelSystem::reference();
        assert_eq!(sys.apply_phi((1.0, 0.0)).unwrap(), (0.0, 1.0));
        let (x, y) = sys.apply_phi((1.1, 0.0)).unwrap();
        assert!(close(x, 0.001, 1e-12) && close(y, 0.9, 1e-14));
        let (x, y) = sys.apply_phi((1.0, 0.01)).unwrap();
        assert!(close(x, 0.01, 1e-14) && y == 1.0);
        assert!(matches!(sys.apply_phi((2.0, 0.0)), Err(LabError::Domain { .. })));
    }

    #[test]
    fn jacobian_examples() {
        let sys = ModelSystem::reference();
        assert_eq!(sys.jacobian_phi((1.0, 0.0)).unwrap(), [[0.0, 1.0], [-1.0, 0.0]]);
        let j = sys.jacobian_phi((1.1, 0.0)).unwrap();
        assert!(close(j[0][0], 0.03, 1e-12));
        assert!(close(j[0][1], 0.9, 1e-14));
        assert_eq!(j[1], [-1.0, 0.0]);
    }

    #[test]
    fn reference_passes_every_condition() {
        let sys = ModelSystem::reference();
        let rep = validate(&sys);
        assert!(rep.all_passed(), "{:?}", rep.failures());
        assert_eq!(rep.sign_case, "II_{++}");
        let tau = rep.tau.unwrap();
        assert!(close(tau.tau0, 1.0, 1e-9));
        assert!(tau.tau1 > 0.9 * 28.0 && tau.tau1 < 1.1 * 28.0);
        assert_eq!(tau.corner_high, 28.0);
    }

    #[test]
    fn larger_mu_breaks_tau_condition() {
        let sys = ModelSystem::reference().with_mu(1.2).unwrap();
        let rep = validate(&sys);
        assert!(!rep.get("tau1_below_inverse_eps").unwrap().passed);
    }

    #[test]
    fn missing_mixed_term_fails_ex1() {
        let mut sys = ModelSystem::reference();
        sys.transition.b = 0.0;
        let sys = ModelSystem::new(sys.saddle, sys.transition, sys.seed).unwrap();
        let rep = validate(&sys);
        assert!(!rep.get("EX1").unwrap().passed);
    }

    #[test]
    fn forbidden_jet_terms_are_reported() {
        let mut t = TransitionSpec::new(1.0, -1.0, 1.0, -1.0, 0.0);
        t.h1 = Poly2::new(vec![Monomial::new(2, 0, 0.1), Monomial::new(2, 1, 0.3)]);
        t.h2 = Poly2::new(vec![Monomial::new(2, 0, 0.2)]);
        let sys = ModelSystem::new(SaddleSpec::new(0.3, 1.02), t, SeedArc::constant(0.5)).unwrap();
        let rep = validate(&sys);
        assert!(!rep.get("h1_jet").unwrap().passed);
        assert!(rep.get("h2_jet").unwrap().passed);
    }

    #[test]
    fn tau_upper_bound_tracks_a_plus_27c() {
        let mut sys = ModelSystem::reference();
        sys.transition.a = 2.0;
        let sys = ModelSystem::new(sys.saddle, sys.transition, sys.seed).unwrap();
        let tau = tau_bounds(&sys).unwrap();
        assert!(tau.tau1 > 0.9 * 29.0 && tau.tau1 < 1.1 * 29.0);
        assert!(tau.tau0 <= tau.tau1);
    }

    #[test]
    fn n_max_for_reference() {
        assert_eq!(ModelSystem::reference().n_max(), 22);
    }
}
