//! Polynomials in one and two variables with exact derivatives and
//! cancellation-free differences.
//!
//! Rectangle widths are differences of abscissae that agree to many digits,
//! so besides plain evaluation both types expose `diff`, which evaluates
//! `p(a) - p(b)` from an accurately known increment `a - b`.

use serde::{Deserialize, Serialize};

/// One term `coef * x^i * y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
    pub coef: f64,
}

impl Monomial {
    pub fn new(i: u32, j: u32, coef: f64) -> Self {
        Self { i, j, coef }
    }
}

/// Sparse bivariate polynomial.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly2 {
    terms: Vec<Monomial>,
}

/// Univariate polynomial, coefficients in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly1 {
    coeffs: Vec<f64>,
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|m| (n - m) as f64).product()
}

/// `p^k - q^k` given `dpq = p - q`.
pub(crate) fn pow_diff(p: f64, q: f64, dpq: f64, k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for m in 0..k {
        sum += p.powi((k - 1 - m) as i32) * q.powi(m as i32);
    }
    dpq * sum
}

impl Poly2 {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.coef == 0.0)
    }

    pub fn push(&mut self, term: Monomial) {
        self.terms.push(term);
    }

    /// Nonzero coefficient attached to `x^i y^j`, summed over duplicates.
    pub fn coefficient(&self, i: u32, j: u32) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.i == i && t.j == j)
            .map(|t| t.coef)
            .sum()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.deriv(0, 0, x, y)
    }

    /// `∂^{dx}_x ∂^{dy}_y p` at `(x, y)`.
    pub fn deriv(&self, dx: u32, dy: u32, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            if t.i < dx || t.j < dy || t.coef == 0.0 {
                continue;
            }
            let k = falling(t.i, dx) * falling(t.j, dy);
            acc += t.coef * k * x.powi((t.i - dx) as i32) * y.powi((t.j - dy) as i32);
        }
        acc
    }

    /// `p(x1, y1) - p(x2, y2)` given the increments `dx = x1 - x2`, `dy = y1 - y2`.
    pub fn diff(&self, (x1, y1): (f64, f64), (x2, y2): (f64, f64), dx: f64, dy: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            if t.coef == 0.0 {
                continue;
            }
            // x1^i y1^j - x2^i y2^j = x1^i (y1^j - y2^j) + y2^j (x1^i - x2^i)
            let dyj = pow_diff(y1, y2, dy, t.j);
            let dxi = pow_diff(x1, x2, dx, t.i);
            acc += t.coef * (x1.powi(t.i as i32) * dyj + y2.powi(t.j as i32) * dxi);
        }
        acc
    }
}

impl Poly1 {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn deriv(&self, order: u32, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| *k as u32 >= order)
            .map(|(k, &c)| c * falling(k as u32, order) * s.powi(k as i32 - order as i32))
            .sum()
    }

    /// `p(s1) - p(s2)` given `ds = s1 - s2`.
    pub fn diff(&self, s1: f64, s2: f64, ds: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * pow_diff(s1, s2, ds, k as u32))
            .sum()
    }
}
