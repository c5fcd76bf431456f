//! The individual experiments. Each returns its results, assertions, tables
//! and plots; nothing is written here.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use tangency_core::cascade::{count_crossing_arcs, run_cascade, CascadeResult};
use tangency_core::cases::{adaptability, adaptable_count, all_cases, classify};
use tangency_core::config::{Command, ExperimentConfig, Tolerances};
use tangency_core::leaves::{stable_leaf_samples, stable_leaf_v, tangency_order, unstable_leaf_w};
use tangency_core::model::validate;
use tangency_core::moduli::{
    eigen_estimates, intersection_check, modulus_fit, order_probe, power_fit, return_records, ConjugacyPair,
};
use tangency_core::rects::{build_sn, first_valid_n, scaling_fit, SnRectangle};
use tangency_core::returns::{default_s_grid, find_s_n0, slope_through_return, SlopedPoint};
use tangency_core::ModelSystem;

use crate::report::CommandOutput;
use crate::row;
use crate::svg::{emit_svg, Axes, Series};
use crate::table::Table;

pub struct Context {
    pub cfg: ExperimentConfig,
    pub sys: ModelSystem,
    pub seed: u64,
}

impl Context {
    fn tol(&self) -> &Tolerances {
        &self.cfg.tolerances
    }

    /// `range` clipped to the indices where rectangles exist.
    fn valid_ns(&self, (lo, hi): (u32, u32)) -> Vec<u32> {
        let first = first_valid_n(&self.sys).unwrap_or(u32::MAX);
        (lo.max(first)..=hi.min(self.sys.n_max())).collect()
    }
}

pub fn run(ctx: &Context, cmd: Command) -> CommandOutput {
    let name = cmd.name();
    let res = match cmd {
        Command::Validate => validate_cmd(ctx),
        Command::Classify => classify_cmd(ctx),
        Command::Leaves => leaves_cmd(ctx),
        Command::Rects => rects_cmd(ctx),
        Command::Slopes => slopes_cmd(ctx),
        Command::Cascade => cascade_cmd(ctx),
        Command::Moduli => moduli_cmd(ctx),
        Command::Conjugacy => conjugacy_cmd(ctx),
        Command::All => unreachable!("expanded before dispatch"),
    };
    res.unwrap_or_else(|e| {
        let mut out = CommandOutput {
            result: json!({ "error": format!("{e:#}") }),
            ..Default::default()
        };
        out.check(name, "completed", false, None, format!("{e:#}"));
        out
    })
}

fn within(out: &mut CommandOutput, cmd: &str, name: &str, got: f64, want: f64, tol: f64) {
    let ok = (got - want).abs() <= tol;
    out.check(cmd, name, ok, Some(got), format!("{got} vs {want} +/- {tol}"));
}

fn validate_cmd(ctx: &Context) -> Result<CommandOutput> {
    let rep = validate(&ctx.sys);
    let mut out = CommandOutput {
        result: serde_json::to_value(&rep)?,
        ..Default::default()
    };
    let mut t = Table::new("conditions.csv", &["name", "passed", "measured", "detail"]);
    for c in &rep.conditions {
        t.push(row![c.name.as_str(), c.passed, c.measured, c.detail.as_str()]);
        out.check("validate", &c.name, c.passed, Some(c.measured), c.detail.clone());
    }
    out.tables.push(t);
    Ok(out)
}

fn classify_cmd(ctx: &Context) -> Result<CommandOutput> {
    let case = ctx.sys.sign_case();
    let ad = adaptability(&case);
    let cases = all_cases();
    let mut t = Table::new(
        "cases.csv",
        &[
            "label",
            "sign_a",
            "sign_bc",
            "sign_lambda",
            "sign_mu",
            "adaptable",
            "parity",
            "quadrant",
            "needs_f_image",
        ],
    );
    let mut labels = Vec::new();
    for c in &cases {
        let a = adaptability(c);
        t.push(row![
            c.label.as_str(),
            c.sign_a as i64,
            c.sign_bc as i64,
            c.sign_lambda as i64,
            c.sign_mu as i64,
            a.adaptable,
            format!("{:?}", a.n_parity).to_lowercase(),
            format!("{:?}", a.sn_quadrant),
            a.needs_f_image,
        ]);
        labels.push(c.label.clone());
    }
    let round_trip = cases
        .iter()
        .all(|c| classify(c.sign_a, c.sign_bc, c.sign_lambda, c.sign_mu) == *c);
    labels.sort();
    labels.dedup();
    let mut out = CommandOutput {
        result: json!({ "label": case.label, "case": case, "adaptability": ad }),
        ..Default::default()
    };
    out.check(
        "classify",
        "bijection",
        round_trip && labels.len() == 16,
        Some(labels.len() as f64),
        format!("{} distinct labels", labels.len()),
    );
    out.check(
        "classify",
        "adaptable_count",
        adaptable_count() == 9,
        Some(adaptable_count() as f64),
        "9 adaptable cases expected".into(),
    );
    out.check(
        "classify",
        "system_adaptable",
        ad.adaptable,
        None,
        format!("case {}", case.label),
    );
    out.tables.push(t);
    Ok(out)
}

fn leaves_cmd(ctx: &Context) -> Result<CommandOutput> {
    let sys = &ctx.sys;
    let samples = stable_leaf_samples(sys, 1e-5, 1e-2, 16)?;
    let est = tangency_order(&samples)?;
    let mut t = Table::new("leaves.csv", &["x", "v", "leaf_distance", "point_distance"]);
    for i in 0..=64 {
        let x = -0.25 + 0.5 * i as f64 / 64.0;
        let v = stable_leaf_v(sys, x)?;
        t.push(row![x, v, v.abs(), x.hypot(v)]);
    }
    let mut u = Table::new("unstable_leaf.csv", &["offset", "w"]);
    for i in 0..=64 {
        let s = -0.25 + 0.5 * i as f64 / 64.0;
        u.push(row![s, unstable_leaf_w(sys, s)?]);
    }
    let tr = &sys.transition;
    let mut out = CommandOutput {
        result: json!({ "order": est, "samples": samples.len() }),
        ..Default::default()
    };
    within(&mut out, "leaves", "order", est.order, 3.0, ctx.tol().order);
    within(
        &mut out,
        "leaves",
        "coefficient",
        est.coefficient,
        (tr.c / tr.a).abs(),
        ctx.tol().order_coefficient,
    );
    out.tables.extend([t, u]);
    Ok(out)
}

/// Name, accessor, target exponent and tolerance.
type Metric = (&'static str, fn(&SnRectangle) -> f64, f64, f64);

fn rects_cmd(ctx: &Context) -> Result<CommandOutput> {
    let sys = &ctx.sys;
    let (lo, hi) = ctx.cfg.sweep.n_range;
    let built: Vec<(u32, Result<SnRectangle, String>)> = (lo..=hi)
        .into_par_iter()
        .map(|n| (n, build_sn(sys, n).map_err(|e| e.to_string())))
        .collect();
    let mut out = CommandOutput::default();
    let mut t = Table::new(
        "rects.csv",
        &[
            "n",
            "t_minus",
            "t_plus",
            "t_tilde_minus",
            "t_tilde_plus",
            "d_n",
            "w_0n",
            "h_0n",
            "rho_n",
        ],
    );
    let mut rects = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in built {
        match r {
            Ok(sn) => {
                t.push(row![
                    n,
                    sn.t_minus,
                    sn.t_plus,
                    sn.t_tilde_minus,
                    sn.t_tilde_plus,
                    sn.d_n,
                    sn.w_0n,
                    sn.h_0n,
                    sn.rho_n
                ]);
                rects.push(sn);
            }
            Err(e) => failures.push(json!({ "n": n, "error": e })),
        }
    }
    out.check(
        "rects",
        "all_built",
        failures.is_empty(),
        Some(failures.len() as f64),
        format!(
            "{} of {} rectangles failed",
            failures.len(),
            hi.saturating_sub(lo) + 1
        ),
    );
    let tr = &sys.transition;
    let want = (tr.b.abs() * sys.seed.z0 / (3.0 * tr.c.abs())).sqrt();
    let half = |n: u32| sys.lambda().abs().powf(0.5 * n as f64);
    let worst = rects
        .iter()
        .map(|r| (r.t_plus / half(r.n) / want - 1.0).abs())
        .fold(0.0, f64::max);
    out.check(
        "rects",
        "vertical_tangency_scaling",
        worst <= ctx.tol().t_plus_relative,
        Some(worst),
        format!("largest relative deviation of t_plus / |lambda|^(n/2) from {want}"),
    );
    let mut fits = serde_json::Map::new();
    let mut series = Vec::new();
    let metrics: [Metric; 3] = [
        ("d_n", |r| r.d_n, 1.0, ctx.tol().distance_exponent),
        ("w_0n", |r| r.w_0n, 1.5, ctx.tol().width_exponent),
        ("h_0n", |r| r.h_0n, 0.5, ctx.tol().height_exponent),
    ];
    for (name, f, target, tol) in metrics {
        let pairs: Vec<(u32, f64)> = rects.iter().map(|r| (r.n, f(r))).collect();
        match scaling_fit(&pairs, sys.lambda()) {
            Ok(fit) => {
                within(
                    &mut out,
                    "rects",
                    &format!("{name}_exponent"),
                    fit.exponent,
                    target,
                    tol,
                );
                fits.insert(name.into(), serde_json::to_value(fit)?);
                series.push(Series {
                    label: name.to_string(),
                    points: pairs.iter().map(|&(n, v)| (n as f64, v)).collect(),
                    slope: Some(fit.exponent),
                });
            }
            Err(e) => out.check("rects", &format!("{name}_exponent"), false, None, e.to_string()),
        }
    }
    if !series.is_empty() {
        let axes = Axes {
            title: "Rectangle sizes".into(),
            x_label: "n".into(),
            y_label: "size".into(),
            x_log: false,
            y_log: true,
        };
        out.plots.push(("rects.svg".into(), emit_svg(&series, &axes)?));
    }
    out.result = json!({ "fits": fits, "rectangles": rects, "failures": failures });
    out.tables.push(t);
    Ok(out)
}

fn slopes_cmd(ctx: &Context) -> Result<CommandOutput> {
    let sys = &ctx.sys;
    let r = sys.r_eps();
    let small = sys.epsilon.powf(2.5);
    let mut points: Vec<(f64, f64)> = Vec::new();
    for i in 0..32 {
        for j in 0..32 {
            points.push((
                r.x_lo + r.width() * i as f64 / 31.0,
                r.y_lo + r.height() * j as f64 / 31.0,
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..256 {
        points.push((
            rng.random_range(r.x_lo..=r.x_hi),
            rng.random_range(r.y_lo..=r.y_hi),
        ));
    }
    let slopes = [0.0, 0.5 * small, small];
    let results: Vec<_> = points
        .par_iter()
        .flat_map_iter(|&p| {
            slopes.iter().map(move |&s| {
                (
                    p,
                    s,
                    slope_through_return(sys, SlopedPoint { point: p, slope: s }),
                )
            })
        })
        .collect();
    let mut grid = Table::new(
        "slope_grid.csv",
        &["x", "y", "slope_in", "intermediate", "returned", "u0", "ok"],
    );
    let mut bad = Vec::new();
    for (p, s, res) in &results {
        match res {
            Ok(rs) => grid.push(row![
                p.0,
                p.1,
                *s,
                rs.intermediate.value(),
                rs.returned.slope,
                rs.u0,
                true
            ]),
            Err(e) => {
                grid.push(row![p.0, p.1, *s, f64::NAN, f64::NAN, 0i64, false]);
                bad.push(format!("({}, {}) slope {s:e}: {e}", p.0, p.1));
            }
        }
    }
    let mut out = CommandOutput::default();
    out.check(
        "slopes",
        "strip_slope_bounds",
        bad.is_empty(),
        Some((results.len() - bad.len()) as f64 / results.len() as f64),
        bad.first()
            .cloned()
            .unwrap_or_else(|| format!("{} samples", results.len())),
    );
    let grid_s = if ctx.cfg.sweep.s_grid.is_empty() {
        default_s_grid()
    } else {
        ctx.cfg.sweep.s_grid.clone()
    };
    let mut eps_list = vec![sys.epsilon];
    for &e in &ctx.cfg.sweep.eps_grid {
        if !eps_list.iter().any(|v| (v - e).abs() < 1e-15) {
            eps_list.push(e);
        }
    }
    let found: Vec<_> = eps_list
        .par_iter()
        .map(|&e| (e, find_s_n0(sys, e, &grid_s)))
        .collect();
    let mut arcs = Table::new("jn_samples.csv", &["epsilon", "n", "t", "j", "slope"]);
    let mut summary = Vec::new();
    for (i, (e, res)) in found.iter().enumerate() {
        match res {
            Ok(f) => {
                for rep in &f.reports {
                    for smp in &rep.samples {
                        arcs.push(row![*e, rep.n, smp.t, smp.j, smp.slope]);
                    }
                }
                summary.push(json!({
                    "epsilon": e, "s": f.s, "n0": f.n0,
                    "max_slopes": f.reports.iter().map(|r| r.max_slope).collect::<Vec<_>>(),
                    "samples": f.reports.iter().map(|r| r.samples.len()).collect::<Vec<_>>(),
                }));
                if i == 0 {
                    let ok =
                        f.n0 <= sys.n_max() && f.reports.iter().all(|r| r.passed && r.samples.len() >= 200);
                    out.check(
                        "slopes",
                        "arc_slope_bounds",
                        ok,
                        Some(f.n0 as f64),
                        format!("s = {:e}, n0 = {}", f.s, f.n0),
                    );
                }
            }
            Err(err) => {
                summary.push(json!({ "epsilon": e, "error": err.to_string() }));
                if i == 0 {
                    out.check("slopes", "arc_slope_bounds", false, None, err.to_string());
                }
            }
        }
    }
    out.result = json!({ "strip_samples": results.len(), "strip_failures": bad, "cutoffs": summary });
    out.tables.extend([grid, arcs]);
    Ok(out)
}

/// A cascade and the crossing count of each of its boxes.
type CascadeRun = Result<(CascadeResult, Vec<usize>), String>;

fn cascade_cmd(ctx: &Context) -> Result<CommandOutput> {
    let base = &ctx.sys;
    let (lo, hi) = ctx.cfg.sweep.cascade_n_range;
    let jobs: Vec<(f64, u32)> = ctx
        .cfg
        .sweep
        .eps_grid
        .iter()
        .flat_map(|&e| (lo..=hi).map(move |n| (e, n)))
        .collect();
    let runs: Vec<(f64, u32, CascadeRun)> = jobs
        .par_iter()
        .map(|&(e, n)| {
            let res = (|| {
                let sys = base.with_mu(base.mu().signum() * (1.0 + e))?;
                if n > sys.n_max() {
                    return Err(tangency_core::LabError::InvalidParameter(format!(
                        "n = {n} exceeds n_max = {}",
                        sys.n_max()
                    )));
                }
                let res = run_cascade(&sys, n)?;
                let mut counts = Vec::new();
                if res.k0 >= 2 && res.violations.is_empty() {
                    let frame = res.frame.expect("boxes imply a frame");
                    for b in &res.boxes {
                        counts.push(count_crossing_arcs(&sys, &frame, b)?.crossings);
                    }
                }
                Ok((res, counts))
            })();
            (e, n, res.map_err(|err| err.to_string()))
        })
        .collect();
    let mut t = Table::new(
        "cascade.csv",
        &[
            "epsilon",
            "n",
            "k",
            "kind",
            "width",
            "log10_height",
            "log10_distance",
            "u_k",
        ],
    );
    let mut summary = Vec::new();
    let mut witness = None;
    for (e, n, res) in &runs {
        match res {
            Ok((r, counts)) => {
                for (i, b) in r.boxes.iter().enumerate() {
                    let u = r.u.get(i).map(|&u| u.to_string()).unwrap_or_default();
                    t.push(row![
                        *e,
                        *n,
                        b.k,
                        format!("{:?}", b.kind),
                        b.width,
                        b.ln_height / std::f64::consts::LN_10,
                        b.ln_distance / std::f64::consts::LN_10,
                        u
                    ]);
                }
                let ok = r.k0 >= 2
                    && r.violations.is_empty()
                    && counts.len() == r.boxes.len()
                    && counts.iter().all(|&c| c == 3);
                if ok && witness.is_none() {
                    witness = Some((*e, *n, r.k0));
                }
                summary.push(json!({
                    "epsilon": e, "n": n, "k0": r.k0, "u": r.u,
                    "violations": r.violations, "crossings": counts, "passed": ok,
                }));
            }
            Err(err) => summary.push(json!({ "epsilon": e, "n": n, "error": err })),
        }
    }
    let mut out = CommandOutput {
        result: json!({ "runs": summary, "witness": witness.map(|(e, n, k0)| json!({"epsilon": e, "n": n, "k0": k0})) }),
        ..Default::default()
    };
    out.check(
        "cascade",
        "cascade_exists",
        witness.is_some(),
        witness.map(|w| w.2 as f64),
        match witness {
            Some((e, n, k0)) => format!("eps = {e}, n = {n}, k0 = {k0}"),
            None => "no (eps, n) with k0 >= 2, the size inequalities and three crossings".into(),
        },
    );
    out.tables.push(t);
    Ok(out)
}

fn moduli_cmd(ctx: &Context) -> Result<CommandOutput> {
    let sys = &ctx.sys;
    let (lo, hi) = ctx.cfg.sweep.modulus_n_range;
    let ns: Vec<u32> = (lo..=hi.min(sys.n_max())).collect();
    let fit = modulus_fit(sys, &ns)?;
    let recs = return_records(sys, &ns)?;
    let mut t = Table::new("moduli.csv", &["n", "r_n_x", "r_n_y", "m_n", "s_n", "c_n"]);
    for r in &recs {
        t.push(row![r.n, r.r_n.0, r.r_n.1, r.m_n, r.s_n, r.c_n]);
    }
    let mut out = CommandOutput::default();
    within(
        &mut out,
        "moduli",
        "modulus",
        fit.rho,
        fit.target,
        ctx.tol().modulus,
    );
    let worst_step = recs
        .windows(2)
        .map(|w| (w[1].s_n - w[0].s_n - fit.target).abs())
        .fold(0.0, f64::max);
    out.check(
        "moduli",
        "s_n_increments",
        worst_step <= ctx.tol().s_step,
        Some(worst_step),
        format!("largest deviation of s_(n+1) - s_n from {}", fit.target),
    );
    let tail: Vec<_> = recs.iter().filter(|r| r.n >= 15).collect();
    let tail = if tail.is_empty() {
        recs.iter().rev().take(1).collect()
    } else {
        tail
    };
    let worst_c = tail.iter().map(|r| (r.c_n - 1.0).abs()).fold(0.0, f64::max);
    out.check(
        "moduli",
        "c_n_tail",
        worst_c <= ctx.tol().c_n,
        Some(worst_c),
        format!("largest |c_n - 1| for n >= {}", tail[0].n),
    );
    let probe = order_probe(sys, 0..=10)?;
    within(
        &mut out,
        "moduli",
        "order_slope",
        probe.slope,
        3.0,
        ctx.tol().order_slope,
    );
    out.check(
        "moduli",
        "order_band",
        probe.width_factor <= ctx.tol().order_band,
        Some(probe.width_factor),
        format!("band [{}, {}]", probe.band.0, probe.band.1),
    );
    let mut pt = Table::new("order_probe.csv", &["j", "x_j", "l_j", "ratio"]);
    for r in &probe.rows {
        pt.push(row![r.j, r.x_j, r.l_j, r.ratio]);
    }
    let series = Series {
        label: "m(n)".into(),
        points: recs.iter().map(|r| (r.n as f64, r.m_n as f64)).collect(),
        slope: Some(fit.rho),
    };
    let axes = Axes {
        title: "Return exponents".into(),
        x_label: "n".into(),
        y_label: "m(n)".into(),
        x_log: false,
        y_log: false,
    };
    out.plots.push(("moduli.svg".into(), emit_svg(&[series], &axes)?));
    out.result = json!({
        "rho": fit.rho,
        "stderr": fit.stderr,
        "target": fit.target,
        "c_n_tail": tail.iter().map(|r| json!({"n": r.n, "c_n": r.c_n})).collect::<Vec<Value>>(),
        "order_probe": probe,
    });
    out.tables.extend([t, pt]);
    Ok(out)
}

fn conjugacy_cmd(ctx: &Context) -> Result<CommandOutput> {
    let sys = &ctx.sys;
    let tol = ctx.tol();
    let mut out = CommandOutput::default();

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (c, tau) = (rng.random_range(0.2..5.0), rng.random_range(0.3..3.0));
    let synth: Vec<(f64, f64)> = (0..32)
        .map(|_| {
            let x: f64 = 10f64.powf(rng.random_range(-4.0..0.0));
            (x, c * x.powf(tau))
        })
        .collect();
    let sf = power_fit(&synth)?;
    within(&mut out, "conjugacy", "synthetic_c", sf.c, c, tol.power_fit * c);
    within(&mut out, "conjugacy", "synthetic_tau", sf.tau, tau, tol.power_fit);

    let (mlo, mhi) = ctx.cfg.sweep.modulus_n_range;
    let ns: Vec<u32> = (mlo.max(1)..=mhi.min(sys.n_max())).collect();
    let id = ConjugacyPair::identity(sys);
    let idf = power_fit(&id.correspondence_points(&ns, 40, 4)?)?;
    within(&mut out, "conjugacy", "identity_c", idf.c, 1.0, tol.power_fit);
    within(&mut out, "conjugacy", "identity_tau", idf.tau, 1.0, tol.power_fit);

    let pair = ConjugacyPair::rescaled(sys, 2)?;
    let pf = power_fit(&pair.correspondence_points(&ns, 40, 4)?)?;
    let pred = pair.predicted_power_law();
    let gap = (pf.c / pred.c - 1.0).abs();
    out.check(
        "conjugacy",
        "rescaled_constant",
        gap <= tol.lemma_constant,
        Some(gap),
        format!("fitted C {} vs predicted {}", pf.c, pred.c),
    );
    let (m0, m1) = (modulus_fit(&pair.sys_0, &ns)?, modulus_fit(&pair.sys_1, &ns)?);
    let rho_gap = (m1.rho / m0.rho - 1.0).abs();
    out.check(
        "conjugacy",
        "rescaled_modulus",
        rho_gap <= tol.pair_relative,
        Some(rho_gap),
        format!("rho {} vs {}", m0.rho, m1.rho),
    );
    let (e0, e1) = (
        eigen_estimates(&pair.sys_0, &ns)?,
        eigen_estimates(&pair.sys_1, &ns)?,
    );
    let eig_gap = (e1.lambda / e0.lambda - 1.0)
        .abs()
        .max((e1.mu / e0.mu - 1.0).abs());
    out.check(
        "conjugacy",
        "rescaled_eigenvalues",
        eig_gap <= tol.pair_relative,
        Some(eig_gap),
        format!("({}, {}) vs ({}, {})", e0.lambda, e0.mu, e1.lambda, e1.mu),
    );

    let all_valid = ctx.valid_ns((0, u32::MAX));
    let sweep = ctx.valid_ns(ctx.cfg.sweep.n_range);
    let jobs: Vec<(&str, &ConjugacyPair, u32)> = all_valid
        .iter()
        .map(|&n| ("identity", &id, n))
        .chain(sweep.iter().map(|&n| ("rescaled", &pair, n)))
        .collect();
    let checks: Vec<_> = jobs
        .par_iter()
        .map(|&(name, p, n)| (name, n, intersection_check(p, n)))
        .collect();
    let mut t = Table::new(
        "intersections.csv",
        &[
            "pair",
            "n",
            "intersects",
            "gap_256",
            "gap_512",
            "gap_1024",
            "diagnostic",
        ],
    );
    let mut misses = Vec::new();
    for (name, n, res) in checks {
        match res {
            Ok(c) => {
                let g = |i: usize| c.relative_distances.get(i).copied().unwrap_or(f64::NAN);
                t.push(row![
                    name,
                    n,
                    c.intersects,
                    g(0),
                    g(1),
                    g(2),
                    c.diagnostic.as_str()
                ]);
                if !c.intersects {
                    misses.push(format!("{name} n = {n}: {}", c.diagnostic));
                }
            }
            Err(e) => misses.push(format!("{name} n = {n}: {e}")),
        }
    }
    out.check(
        "conjugacy",
        "intersections",
        misses.is_empty() && !all_valid.is_empty(),
        Some(misses.len() as f64),
        misses.first().cloned().unwrap_or_else(|| {
            format!(
                "identity pair on {} indices, rescaled pair on {}",
                all_valid.len(),
                sweep.len()
            )
        }),
    );
    out.result = json!({
        "synthetic": { "c": c, "tau": tau, "fit": sf },
        "identity_fit": idf,
        "rescaled_fit": pf,
        "predicted": pred,
        "rescaled_modulus": [m0.rho, m1.rho],
        "rescaled_eigenvalues": [e0, e1],
        "intersection_misses": misses,
    });
    out.tables.push(t);
    Ok(out)
}
