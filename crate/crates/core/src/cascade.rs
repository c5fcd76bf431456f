//! The cascade of boxes obtained by alternating the transition map with a
//! return to the strip near `q`.
//!
//! Box heights are of order `lambda^{i_n}`, far below the smallest positive
//! double, so boxes are tracked in thin coordinates: an abscissa, plus a
//! vertical offset from the reference unstable arc written as
//! `offset * exp(ln_scale)`. To first order in that offset the transition map
//! moves abscissae like the unstable axis does and multiplies vertical
//! offsets by `K(u) = Q_y - Q_u P_y / P_u`, evaluated on the axis.

use serde::Serialize;

use crate::cases::classify;
use crate::error::{LabError, Result};
use crate::model::{validate, Jacobian, ModelSystem};
use crate::numeric::{ln_power, scaled_power, solve_bracketed, window_exponent, Window};
use crate::rects::{arc_image, build_sn, SnRectangle};
use crate::returns::i_n;

/// Offsets must stay below `exp(THIN_LIMIT)` for the first-order transport.
pub const THIN_LIMIT: f64 = -30.0;
const METRIC_NODES: usize = 65;
const REFINE_NODES: usize = 17;
const MAX_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    Linear(i64),
    Phi,
}

/// Composition of linear iterates and transition maps, applied left to right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MapWord {
    atoms: Vec<Atom>,
}

/// Point near the reference arc: `y = ref_height + offset * exp(ln_scale)`,
/// with `ref_height = ref_mantissa * exp(ref_ln)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinPoint {
    pub x: f64,
    pub offset: f64,
    pub ln_scale: f64,
    pub ref_mantissa: f64,
    pub ref_ln: f64,
}

impl ThinPoint {
    pub fn on_axis(x: f64, offset: f64, ln_scale: f64) -> Self {
        Self {
            x,
            offset,
            ln_scale,
            ref_mantissa: 0.0,
            ref_ln: 0.0,
        }
    }

    /// `ln |y|` of the full ordinate.
    pub fn ln_y(&self) -> f64 {
        log_add(
            self.ref_mantissa.abs().ln() + self.ref_ln,
            self.offset.abs().ln() + self.ln_scale,
        )
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Vertical offset multiplier of the transition map at axis point `u`.
pub fn offset_factor(sys: &ModelSystem, u: f64) -> f64 {
    let j = sys.phi_jet(u, 0.0);
    j.p2_y - j.p2_x * j.p1_y / j.p1_x
}

impl MapWord {
    pub fn new(atoms: Vec<Atom>) -> Self {
        let mut w = Self::default();
        for a in atoms {
            w.push(a);
        }
        w
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Appends an atom, merging consecutive linear iterates.
    pub fn push(&mut self, atom: Atom) {
        if let (Atom::Linear(k), Some(Atom::Linear(prev))) = (atom, self.atoms.last_mut()) {
            *prev += k;
            return;
        }
        self.atoms.push(atom);
    }

    pub fn then(&self, atom: Atom) -> Self {
        let mut w = self.clone();
        w.push(atom);
        w
    }

    pub fn phi_count(&self) -> usize {
        self.atoms.iter().filter(|a| **a == Atom::Phi).count()
    }

    /// Ordinary evaluation with the Jacobian by the chain rule.
    pub fn eval(&self, sys: &ModelSystem, point: (f64, f64)) -> Result<((f64, f64), Jacobian)> {
        let mut p = point;
        let mut jac = [[1.0, 0.0], [0.0, 1.0]];
        for atom in &self.atoms {
            let step = match *atom {
                Atom::Linear(k) => {
                    p = sys.apply_linear(p, k);
                    [
                        [scaled_power(1.0, sys.mu(), k), 0.0],
                        [0.0, scaled_power(1.0, sys.lambda(), k)],
                    ]
                }
                Atom::Phi => {
                    let j = sys.jacobian_phi(p)?;
                    p = sys.apply_phi(p)?;
                    j
                }
            };
            jac = mat_mul(step, jac);
        }
        Ok((p, jac))
    }

    /// `ln |det|` of the word's Jacobian as a sum over atoms.
    pub fn ln_abs_det(&self, sys: &ModelSystem, point: (f64, f64)) -> Result<f64> {
        let mut p = point;
        let mut acc = 0.0;
        for atom in &self.atoms {
            match *atom {
                Atom::Linear(k) => {
                    acc += ln_power(sys.mu() * sys.lambda(), k);
                    p = sys.apply_linear(p, k);
                }
                Atom::Phi => {
                    let j = sys.jacobian_phi(p)?;
                    acc += (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs().ln();
                    p = sys.apply_phi(p)?;
                }
            }
        }
        Ok(acc)
    }

    /// First-order transport of a thin point.
    pub fn eval_thin(&self, sys: &ModelSystem, mut p: ThinPoint) -> Result<ThinPoint> {
        let ln_lambda = sys.lambda().abs().ln();
        for atom in &self.atoms {
            match *atom {
                Atom::Linear(k) => {
                    p.x = scaled_power(p.x, sys.mu(), k);
                    p.ln_scale += k as f64 * ln_lambda;
                    p.ref_ln += k as f64 * ln_lambda;
                }
                Atom::Phi => {
                    if p.ln_y() > THIN_LIMIT {
                        return Err(LabError::Inconclusive(format!(
                            "ordinary coordinate exp({:.1}) too large for first-order transport",
                            p.ln_y()
                        )));
                    }
                    let u = p.x - 1.0;
                    if u.abs() > sys.uq_half_width {
                        return Err(LabError::ChartExit(format!("abscissa {} is outside U(q)", p.x)));
                    }
                    let (x, y) = sys.phi_local(u, 0.0);
                    if !sys.in_ur((x, y)) {
                        return Err(LabError::ChartExit(format!(
                            "transition image ({x:e}, {y}) is outside U(r)"
                        )));
                    }
                    p.offset *= offset_factor(sys, u);
                    p.x = x;
                    p.ref_mantissa = y;
                    p.ref_ln = 0.0;
                }
            }
        }
        Ok(p)
    }

    /// Pulls a current abscissa back to the start of the word. Returns the
    /// starting abscissa and the axis points `u` at which each transition
    /// map acted.
    pub fn pull_back(&self, sys: &ModelSystem, x: f64) -> Result<(f64, Vec<f64>)> {
        let mut x = x;
        let mut us = Vec::with_capacity(self.phi_count());
        for atom in self.atoms.iter().rev() {
            match *atom {
                Atom::Linear(k) => x = scaled_power(x, sys.mu(), -k),
                Atom::Phi => {
                    let w = sys.uq_half_width;
                    let target = x;
                    let u = solve_bracketed(
                        |u| {
                            let j = sys.phi_jet(u, 0.0);
                            (j.p1 - target, j.p1_x)
                        },
                        -w,
                        w,
                        1e-17,
                    )?;
                    us.push(u);
                    x = 1.0 + u;
                }
            }
        }
        us.reverse();
        Ok((x, us))
    }
}

fn mat_mul(a: Jacobian, b: Jacobian) -> Jacobian {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKind {
    RectangleLike,
    ParallelogramLike,
}

/// Data of the first box: the rectangle around the tangency pushed back to
/// the strip by `i_n` linear iterates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinFrame {
    pub n: u32,
    pub i_n: i64,
    pub sn: SnRectangle,
    /// Ordinates of the bottom and top edges before scaling.
    pub y_lo: f64,
    pub y_hi: f64,
    pub ln_scale: f64,
}

/// A box of the cascade. Its top and bottom edges are the images of the first
/// box's edges under `word`; only the abscissa range is stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeBox {
    pub kind: BoxKind,
    pub k: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub word: MapWord,
    pub width: f64,
    /// `ln` of the largest vertical extent.
    pub ln_height: f64,
    /// `ln` of the vertical distance to the reference unstable arc.
    pub ln_distance: f64,
    /// `ln` of the edge slope at the middle abscissa.
    pub ln_edge_slope: f64,
}

/// Thin point on the bottom (`top = false`) or top edge of the first box.
fn edge_point(frame: &ThinFrame, x: f64, top: bool) -> ThinPoint {
    ThinPoint::on_axis(x, if top { frame.y_hi } else { frame.y_lo }, frame.ln_scale)
}

fn chebyshev(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let c = (std::f64::consts::PI * (i as f64 + 0.5) / count as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * c
        })
        .chain([lo, hi])
        .collect()
}

/// `ln` of the vertical extent and of the reference distance at abscissa `x`.
fn ln_extents(sys: &ModelSystem, frame: &ThinFrame, word: &MapWord, x: f64) -> Result<(f64, f64)> {
    let (_, us) = word.pull_back(sys, x)?;
    let mut ln_factor = 0.0;
    for u in us {
        ln_factor += offset_factor(sys, u).abs().ln();
    }
    let ln_linear: f64 = word
        .atoms()
        .iter()
        .map(|a| match a {
            Atom::Linear(k) => ln_power(sys.lambda(), *k),
            Atom::Phi => 0.0,
        })
        .sum();
    let base = frame.ln_scale + ln_linear + ln_factor;
    let bottom = frame.y_lo.abs().min(frame.y_hi.abs());
    Ok(((frame.y_hi - frame.y_lo).abs().ln() + base, bottom.ln() + base))
}

/// Largest vertical extent and largest reference distance over the box,
/// from Chebyshev nodes with one refinement around each maximiser.
pub fn box_metrics(
    sys: &ModelSystem,
    frame: &ThinFrame,
    word: &MapWord,
    x_lo: f64,
    x_hi: f64,
) -> Result<(f64, f64)> {
    let mut nodes = chebyshev(x_lo, x_hi, METRIC_NODES);
    nodes.sort_by(f64::total_cmp);
    let vals = nodes
        .iter()
        .map(|&x| ln_extents(sys, frame, word, x))
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for which in 0..2 {
        let pick = |v: &(f64, f64)| if which == 0 { v.0 } else { v.1 };
        let (idx, _) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| pick(a.1).total_cmp(&pick(b.1)))
            .expect("nonempty nodes");
        let lo = nodes[idx.saturating_sub(1)];
        let hi = nodes[(idx + 1).min(nodes.len() - 1)];
        let mut m = pick(&vals[idx]);
        for x in chebyshev(lo, hi, REFINE_NODES) {
            m = m.max(pick(&ln_extents(sys, frame, word, x)?));
        }
        if which == 0 {
            best.0 = m;
        } else {
            best.1 = m;
        }
    }
    Ok(best)
}

/// `ln` of the slope of the box edges at abscissa `x`.
fn ln_edge_slope(sys: &ModelSystem, word: &MapWord, x: f64) -> Result<f64> {
    let atoms = word.atoms();
    let Some(last_phi) = atoms.iter().rposition(|a| *a == Atom::Phi) else {
        return Ok(f64::NEG_INFINITY);
    };
    let (_, us) = word.pull_back(sys, x)?;
    let u = *us.last().expect("word has a transition");
    let j = sys.phi_jet(u, 0.0);
    let after: i64 = atoms[last_phi + 1..]
        .iter()
        .map(|a| match a {
            Atom::Linear(k) => *k,
            Atom::Phi => 0,
        })
        .sum();
    Ok((j.p2_x / j.p1_x).abs().ln() + after as f64 * (sys.lambda() / sys.mu()).abs().ln())
}

#[allow(clippy::too_many_arguments)]
fn make_box(
    sys: &ModelSystem,
    frame: &ThinFrame,
    kind: BoxKind,
    k: usize,
    x_lo: f64,
    x_hi: f64,
    width: f64,
    word: MapWord,
) -> Result<CascadeBox> {
    let (ln_height, ln_distance) = box_metrics(sys, frame, &word, x_lo, x_hi)?;
    let ln_edge_slope = ln_edge_slope(sys, &word, 0.5 * (x_lo + x_hi))?;
    Ok(CascadeBox {
        kind,
        k,
        x_lo,
        x_hi,
        word,
        width,
        ln_height,
        ln_distance,
        ln_edge_slope,
    })
}

/// First box and its thin frame.
pub fn build_b1(sys: &ModelSystem, sn: &SnRectangle) -> Result<(ThinFrame, CascadeBox)> {
    let i = i_n(sys, sn)?;
    let frame = ThinFrame {
        n: sn.n,
        i_n: i,
        sn: *sn,
        y_lo: sn.rect.y_lo,
        y_hi: sn.rect.y_hi,
        ln_scale: ln_power(sys.lambda(), i),
    };
    let x_lo = scaled_power(sn.rect.x_lo, sys.mu(), i);
    let x_hi = scaled_power(sn.rect.x_hi, sys.mu(), i);
    let width = scaled_power(sn.w_0n, sys.mu(), i);
    let b1 = make_box(
        sys,
        &frame,
        BoxKind::RectangleLike,
        1,
        x_lo,
        x_hi,
        width,
        MapWord::default(),
    )?;
    Ok((frame, b1))
}

/// Whether a rectangle-like box lies in the return strip.
pub fn box_inside_strip(sys: &ModelSystem, frame: &ThinFrame, b: &CascadeBox) -> Result<bool> {
    let r = sys.r_eps();
    if !(b.x_lo >= r.x_lo && b.x_hi <= r.x_hi) {
        return Ok(false);
    }
    let ln_top = 3.0 * sys.epsilon.ln();
    for x in [b.x_lo, b.x_hi] {
        let (x1, _) = b.word.pull_back(sys, x)?;
        for top in [false, true] {
            let p = b.word.eval_thin(sys, edge_point(frame, x1, top))?;
            if p.offset < 0.0 || p.ref_mantissa < 0.0 || p.ln_y() > ln_top {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeStep {
    pub cut: CascadeBox,
    pub u_k: i64,
    pub next: CascadeBox,
    pub next_inside: bool,
    pub x_minus: f64,
    pub x_plus: f64,
}

/// One transition plus return: cut the transition image to the innermost
/// pair of vertex abscissae and bring it back to the strip.
pub fn cascade_step(sys: &ModelSystem, frame: &ThinFrame, b: &CascadeBox) -> Result<CascadeStep> {
    let cut_word = b.word.then(Atom::Phi);
    let mut xs = Vec::with_capacity(4);
    for x in [b.x_lo, b.x_hi] {
        let (x1, _) = b.word.pull_back(sys, x)?;
        for top in [false, true] {
            let p = b.word.eval_thin(sys, edge_point(frame, x1, top))?;
            let u = p.x - 1.0;
            let j = sys.phi_jet(u, 0.0);
            // horizontal displacement of the vertex from the axis image
            let dy = p.offset.signum() * (p.offset.abs().ln() + p.ln_scale).exp()
                + p.ref_mantissa.signum() * (p.ref_mantissa.abs().ln() + p.ref_ln).exp();
            let shift = j.p1_y * dy;
            let img = cut_word.eval_thin(sys, edge_point(frame, x1, top))?;
            xs.push(img.x + shift);
        }
    }
    xs.sort_by(f64::total_cmp);
    let (x_minus, x_plus) = (xs[1], xs[2]);
    if !(x_plus > x_minus && x_minus > 0.0) {
        return Err(LabError::WrongQuadrant(x_minus));
    }
    let e = sys.epsilon;
    let u_k = window_exponent(
        x_plus,
        sys.mu().abs(),
        (1.0 + e).powi(2),
        (1.0 + e).powi(3),
        Window::LeftOpen,
    )
    .ok_or_else(|| LabError::SmallExpandingViolation(format!("no return exponent for {x_plus:e}")))?;
    let cut = make_box(
        sys,
        frame,
        BoxKind::ParallelogramLike,
        b.k,
        x_minus,
        x_plus,
        x_plus - x_minus,
        cut_word.clone(),
    )?;
    let next_word = cut_word.then(Atom::Linear(u_k));
    let lo = scaled_power(x_minus, sys.mu(), u_k);
    let hi = scaled_power(x_plus, sys.mu(), u_k);
    let next = make_box(
        sys,
        frame,
        BoxKind::RectangleLike,
        b.k + 1,
        lo,
        hi,
        scaled_power(x_plus - x_minus, sys.mu(), u_k),
        next_word,
    )?;
    let next_inside = box_inside_strip(sys, frame, &next)?;
    Ok(CascadeStep {
        cut,
        u_k,
        next,
        next_inside,
        x_minus,
        x_plus,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeResult {
    pub n: u32,
    pub epsilon: f64,
    pub frame: Option<ThinFrame>,
    pub boxes: Vec<CascadeBox>,
    /// Return exponents between consecutive boxes.
    pub u: Vec<i64>,
    pub k0: usize,
    /// The step that left the strip.
    pub boundary: Option<CascadeStep>,
    /// Size inequalities that failed for some `k < k0`.
    pub violations: Vec<String>,
}

impl CascadeResult {
    pub fn widths(&self) -> Vec<f64> {
        self.boxes.iter().map(|b| b.width).collect()
    }
}

/// Runs the cascade for one `n` until a box leaves the strip.
pub fn run_cascade(sys: &ModelSystem, n: u32) -> Result<CascadeResult> {
    let mut out = CascadeResult {
        n,
        epsilon: sys.epsilon,
        frame: None,
        boxes: Vec::new(),
        u: Vec::new(),
        k0: 0,
        boundary: None,
        violations: Vec::new(),
    };
    let rep = validate(sys);
    let gate = ["tau1_below_inverse_eps", "mu_three_halves_below_inverse_lambda"];
    if gate.iter().any(|g| !rep.get(g).is_some_and(|c| c.passed)) {
        return Ok(out);
    }
    let case = sys.sign_case();
    if case != classify(1, -1, 1, 1) {
        return Err(LabError::NotAdaptable(format!(
            "{} (the cascade is implemented for positive eigenvalues and a > 0, bc < 0)",
            case.label
        )));
    }
    let sn = build_sn(sys, n)?;
    let (frame, b1) = build_b1(sys, &sn)?;
    out.frame = Some(frame);
    if !box_inside_strip(sys, &frame, &b1)? {
        return Ok(out);
    }
    out.boxes.push(b1);
    while out.boxes.len() < MAX_STEPS {
        let step = cascade_step(sys, &frame, out.boxes.last().expect("nonempty"))?;
        if !step.next_inside {
            out.boundary = Some(step);
            break;
        }
        out.u.push(step.u_k);
        out.boxes.push(step.next);
    }
    out.k0 = out.boxes.len();
    let ln10 = 10f64.ln();
    for w in out.boxes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(b.width >= 10.0 * a.width) {
            out.violations.push(format!("W_{} < 10 W_{}", b.k, a.k));
        }
        if !(b.ln_height <= a.ln_height - ln10) {
            out.violations.push(format!("H_{} > H_{} / 10", b.k, a.k));
        }
        if !(b.ln_distance <= a.ln_distance - ln10) {
            out.violations.push(format!("L_{} > L_{} / 10", b.k, a.k));
        }
    }
    Ok(out)
}

/// Outcome of tracking the arc through a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrossingCount {
    pub crossings: usize,
    pub samples: usize,
}

const CROSSING_SAMPLES: usize = 4096;
const CROSSING_BUDGET: usize = 1 << 16;

/// Counts how many times the image of the `n`-th arc (between the extended
/// parameters, widened by 5%) runs from one vertical side of the box to the
/// other.
pub fn count_crossing_arcs(sys: &ModelSystem, frame: &ThinFrame, b: &CascadeBox) -> Result<CrossingCount> {
    let sn = &frame.sn;
    let n = frame.n;
    let pad = 0.05 * (sn.t_tilde_plus - sn.t_tilde_minus);
    let lo = (sn.t_tilde_minus - pad).max(sn.window.t_lo);
    let hi = (sn.t_tilde_plus + pad).min(sn.window.t_hi);
    let tol = 1e-7 * b.width;
    let place = |t: f64| -> Result<f64> {
        let im = arc_image(sys, n, t);
        let x1 = scaled_power(im.xi, sys.mu(), frame.i_n);
        let p = b
            .word
            .eval_thin(sys, ThinPoint::on_axis(x1, im.eta, frame.ln_scale))?;
        Ok(p.x)
    };
    let mut ts: Vec<f64> = (0..=CROSSING_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / CROSSING_SAMPLES as f64)
        .chain(sn.params())
        .filter(|t| (lo..=hi).contains(t))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut xs = ts.iter().map(|&t| place(t)).collect::<Result<Vec<_>>>()?;
    // refine where consecutive samples jump across most of the box
    let mut used = ts.len();
    let mut i = 0;
    while i + 1 < ts.len() {
        let (a, c) = (xs[i].min(xs[i + 1]), xs[i].max(xs[i + 1]));
        let overlaps = a < b.x_hi && c > b.x_lo;
        if overlaps && c - a > 0.25 * b.width && ts[i + 1] - ts[i] > 1e-15 * (hi - lo) {
            if used >= CROSSING_BUDGET {
                return Err(LabError::Inconclusive(format!(
                    "crossing count for box {} needs more than {CROSSING_BUDGET} samples",
                    b.k
                )));
            }
            let mid = 0.5 * (ts[i] + ts[i + 1]);
            ts.insert(i + 1, mid);
            xs.insert(i + 1, place(mid)?);
            used += 1;
            continue;
        }
        i += 1;
    }
    #[derive(PartialEq, Clone, Copy)]
    enum Side {
        Left,
        Right,
    }
    let mut last: Option<Side> = None;
    let mut crossings = 0;
    for &x in &xs {
        let side = if x <= b.x_lo + tol {
            Some(Side::Left)
        } else if x >= b.x_hi - tol {
            Some(Side::Right)
        } else {
            None
        };
        if let Some(s) = side {
            if last.is_some_and(|l| l != s) {
                crossings += 1;
            }
            last = Some(s);
        }
    }
    Ok(CrossingCount {
        crossings,
        samples: xs.len(),
    })
}
