//! Acceptance suite for the reference system. Prints one line per criterion
//! and exits nonzero if any criterion fails.

use std::process::ExitCode;

use tangency_core::cascade::{count_crossing_arcs, run_cascade};
use tangency_core::cases::{adaptability, adaptable_count, all_cases, classify};
use tangency_core::leaves::{stable_leaf_samples, tangency_order, SeedArc, DEFAULT_SEED_DOMAIN};
use tangency_core::moduli::{
    intersection_check, modulus_fit, order_probe, power_fit, sn_cn_series, ConjugacyPair,
};
use tangency_core::poly::Poly1;
use tangency_core::rects::{build_sn, first_valid_n, scaling_fit, vertical_params};
use tangency_core::returns::{default_s_grid, find_s_n0, slope_through_return, SlopedPoint};
use tangency_core::ModelSystem;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(name: &str, got: f64, want: f64, tol: f64) -> Outcome {
    if (got - want).abs() <= tol {
        Ok(format!("{name} = {got:.6} (target {want} +/- {tol})"))
    } else {
        Err(format!("{name} = {got:.6}, outside {want} +/- {tol}"))
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn reference() -> ModelSystem {
    ModelSystem::reference()
}

fn with_lambda(sys: &ModelSystem, lambda: f64) -> ModelSystem {
    let mut saddle = sys.saddle;
    saddle.lambda = lambda;
    ModelSystem::new(saddle, sys.transition.clone(), sys.seed.clone()).unwrap()
}

fn c1_tangency_order() -> Outcome {
    let sys = reference();
    let samples = stable_leaf_samples(&sys, 1e-5, 1e-2, 16).map_err(|e| e.to_string())?;
    let est = tangency_order(&samples).map_err(|e| e.to_string())?;
    all(vec![
        within("order", est.order, 3.0, 0.02),
        within("coefficient", est.coefficient, 1.0, 0.02),
    ])
}

fn c2_vertical_tangency() -> Outcome {
    let sys = reference();
    let target = 0.40825;
    let mut worst: f64 = 0.0;
    for n in 14..=20 {
        let (_, tp) = vertical_params(&sys, n).map_err(|e| e.to_string())?;
        let ratio = tp / 0.3f64.powf(0.5 * n as f64);
        if !(ratio >= target * 0.98 && ratio <= target * 1.02) {
            return Err(format!("t_plus / lambda^(n/2) = {ratio} at n = {n}"));
        }
        worst = worst.max((ratio / target - 1.0).abs());
    }
    Ok(format!("n = 14..20, worst relative deviation {worst:.2e}"))
}

fn c3_scaling_exponents() -> Outcome {
    let sys = reference();
    let rects = (8..=18)
        .map(|n| build_sn(&sys, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let fit = |f: &dyn Fn(&tangency_core::rects::SnRectangle) -> f64| {
        let pairs: Vec<(u32, f64)> = rects.iter().map(|r| (r.n, f(r))).collect();
        scaling_fit(&pairs, 0.3)
            .map(|s| s.exponent)
            .map_err(|e| e.to_string())
    };
    all(vec![
        within("distance exponent", fit(&|r| r.d_n)?, 1.0, 0.03),
        within("width exponent", fit(&|r| r.w_0n)?, 1.5, 0.05),
        within("height exponent", fit(&|r| r.h_0n)?, 0.5, 0.05),
    ])
}

fn c4_slope_lemma_one() -> Outcome {
    let sys = reference();
    let r = sys.r_eps();
    let e = sys.epsilon;
    let small = e.powf(2.5);
    let mut checked = 0;
    for i in 0..32 {
        for j in 0..32 {
            let p = (
                r.x_lo + r.width() * i as f64 / 31.0,
                r.y_lo + r.height() * j as f64 / 31.0,
            );
            for slope in [0.0, 0.5 * small, small] {
                slope_through_return(&sys, SlopedPoint { point: p, slope })
                    .map_err(|err| format!("({}, {}) slope {slope:e}: {err}", p.0, p.1))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked}/3072 grid points satisfy both slope bounds"))
}

fn c5_slope_lemma_two() -> Outcome {
    let sys = reference();
    let found = find_s_n0(&sys, 0.02, &default_s_grid()).map_err(|e| e.to_string())?;
    if found.n0 > 22 {
        return Err(format!("n0 = {} > 22", found.n0));
    }
    for r in &found.reports {
        if !r.passed || r.samples.len() < 200 {
            return Err(format!(
                "n = {}: max slope {:e} (bound {:e}), {} samples",
                r.n,
                r.max_slope,
                r.bound,
                r.samples.len()
            ));
        }
    }
    let worst = found.reports.iter().map(|r| r.max_slope).fold(0.0, f64::max);
    Ok(format!(
        "s = {:e}, n0 = {}, max slope {worst:e} < {:e}",
        found.s,
        found.n0,
        0.02f64.powf(2.5)
    ))
}

fn c6_cascade() -> Outcome {
    let base = reference();
    let mut tried = Vec::new();
    for eps in [0.02, 0.01, 0.005] {
        let sys = base.with_mu(1.0 + eps).map_err(|e| e.to_string())?;
        for n in (10..=sys.n_max()).rev() {
            let Ok(res) = run_cascade(&sys, n) else { continue };
            if res.k0 < 2 || !res.violations.is_empty() {
                continue;
            }
            let frame = res.frame.expect("frame exists when boxes do");
            let counts: Vec<usize> = res
                .boxes
                .iter()
                .map(|b| count_crossing_arcs(&sys, &frame, b).map(|c| c.crossings))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            if counts.iter().all(|&c| c == 3) {
                return Ok(format!(
                    "eps = {eps}, n = {n}: k0 = {}, size inequalities hold, crossings {counts:?}",
                    res.k0
                ));
            }
            tried.push(format!("eps {eps} n {n}: crossings {counts:?}"));
        }
    }
    Err(format!("no passing (eps, n); {}", tried.join(", ")))
}

fn c7_modulus() -> Outcome {
    let sys = reference();
    let ns: Vec<u32> = (first_valid_n(&sys).unwrap()..=sys.n_max()).collect();
    let fit = modulus_fit(&sys, &ns).map_err(|e| e.to_string())?;
    let half = with_lambda(&sys, 0.5);
    let ns_half: Vec<u32> = (first_valid_n(&half).unwrap()..=half.n_max()).collect();
    let fit_half = modulus_fit(&half, &ns_half).map_err(|e| e.to_string())?;
    let pair = ConjugacyPair::rescaled(&sys, 2).map_err(|e| e.to_string())?;
    let fit_pair = modulus_fit(&pair.sys_1, &ns).map_err(|e| e.to_string())?;
    let rel = (fit_pair.rho / fit.rho - 1.0).abs();
    all(vec![
        within("rho", fit.rho, 60.80, 0.30),
        within("rho (lambda = 0.5)", fit_half.rho, 35.00, 0.30),
        if rel <= 1e-3 {
            Ok(format!(
                "rescaled pair rho {:.6}, relative gap {rel:.1e}",
                fit_pair.rho
            ))
        } else {
            Err(format!("rescaled pair rho {} differs by {rel:e}", fit_pair.rho))
        },
    ])
}

fn c8a_cn_reference() -> Outcome {
    let sys = reference();
    let series = sn_cn_series(&sys, &(5..=22).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let worst = series.iter().map(|r| (r.c_n - 1.0).abs()).fold(0.0, f64::max);
    if worst <= 1e-12 {
        Ok(format!("max |c_n - 1| = {worst:.1e} over n = 5..22"))
    } else {
        Err(format!("max |c_n - 1| = {worst:e}"))
    }
}

fn c8b_cn_tilted() -> Outcome {
    let sys = reference();
    let seed = SeedArc::new(Poly1::new(vec![0.5, 0.15]), DEFAULT_SEED_DOMAIN).unwrap();
    let tilted = sys.with_seed(seed).map_err(|e| e.to_string())?;
    let series =
        sn_cn_series(&tilted, &(15..=tilted.n_max()).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let worst = series
        .iter()
        .map(|r| (r.n, (r.c_n - 1.0).abs()))
        .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
    if worst.1 <= 1e-3 {
        Ok(format!("max |c_n - 1| = {:.1e} for n >= 15", worst.1))
    } else {
        Err(format!(
            "|c_n - 1| = {:.4} at n = {} (c_15 = {:.4})",
            worst.1, worst.0, series[0].c_n
        ))
    }
}

fn c8c_s_steps() -> Outcome {
    let sys = reference();
    let series = sn_cn_series(&sys, &(5..=22).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for w in series.windows(2) {
        let step = w[1].s_n - w[0].s_n;
        within("s step", step, 60.799, 1e-3)?;
        worst = worst.max((step - 60.799).abs());
    }
    Ok(format!("s_(n+1) - s_n within {worst:.1e} of 60.799"))
}

fn c9_power_law() -> Outcome {
    let synth: Vec<(f64, f64)> = (0..24)
        .map(|i| {
            let x = 1e-3 * 1.4f64.powi(i);
            (x, 0.37 * x.powf(1.8))
        })
        .collect();
    let s = power_fit(&synth).map_err(|e| e.to_string())?;
    let sys = reference();
    let ns: Vec<u32> = (6..=20).collect();
    let id = ConjugacyPair::identity(&sys);
    let idf = power_fit(&id.correspondence_points(&ns, 40, 4).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let pair = ConjugacyPair::rescaled(&sys, 2).map_err(|e| e.to_string())?;
    let pf = power_fit(
        &pair
            .correspondence_points(&ns, 40, 4)
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let pred = pair.predicted_power_law();
    let rel = (pf.c / pred.c - 1.0).abs();
    all(vec![
        within("synthetic C", s.c, 0.37, 1e-6),
        within("synthetic tau", s.tau, 1.8, 1e-6),
        within("identity C", idf.c, 1.0, 1e-6),
        within("identity tau", idf.tau, 1.0, 1e-6),
        if rel <= 0.01 {
            Ok(format!("rescaled pair C {:.6} vs predicted {:.6}", pf.c, pred.c))
        } else {
            Err(format!("rescaled pair C {} vs predicted {}", pf.c, pred.c))
        },
    ])
}

fn c10_intersection() -> Outcome {
    let sys = reference();
    let id = ConjugacyPair::identity(&sys);
    let first = first_valid_n(&sys).unwrap();
    for n in first..=sys.n_max() {
        let c = intersection_check(&id, n).map_err(|e| e.to_string())?;
        if !c.intersects {
            return Err(format!("identity pair, n = {n}: {}", c.diagnostic));
        }
    }
    let pair = ConjugacyPair::rescaled(&sys, 2).map_err(|e| e.to_string())?;
    for n in 10..=16 {
        let c = intersection_check(&pair, n).map_err(|e| e.to_string())?;
        if !c.intersects {
            return Err(format!("rescaled pair, n = {n}: {}", c.diagnostic));
        }
    }
    Ok(format!(
        "identity pair n = {first}..{}, rescaled pair n = 10..16",
        sys.n_max()
    ))
}

fn c11_order_probe() -> Outcome {
    let sys = reference();
    let p = order_probe(&sys, 0..=10).map_err(|e| e.to_string())?;
    let span = (p.rows[0].x_j / p.rows.last().unwrap().x_j).log10();
    if span < 3.0 {
        return Err(format!("x_j spans only {span:.2} decades"));
    }
    all(vec![
        within("order slope", p.slope, 3.0, 0.02),
        if p.width_factor <= 1.03 {
            Ok(format!("band factor {:.6}", p.width_factor))
        } else {
            Err(format!("band factor {}", p.width_factor))
        },
    ])
}

fn c12_classification() -> Outcome {
    let cases = all_cases();
    let mut labels: Vec<String> = cases.iter().map(|c| c.label.clone()).collect();
    labels.sort();
    labels.dedup();
    if cases.len() != 16 || labels.len() != 16 {
        return Err(format!(
            "{} tuples, {} distinct labels",
            cases.len(),
            labels.len()
        ));
    }
    for c in &cases {
        let back = classify(c.sign_a, c.sign_bc, c.sign_lambda, c.sign_mu);
        if back != *c {
            return Err(format!("{} does not round-trip", c.label));
        }
    }
    let mut adaptable: Vec<String> = cases
        .iter()
        .filter(|c| adaptability(c).adaptable)
        .map(|c| c.label.clone())
        .collect();
    adaptable.sort();
    let mut expected: Vec<String> = [
        "I_{--}", "II_{++}", "II_{+-}", "II_{-+}", "II_{--}", "III_{-+}", "III_{--}", "IV_{--}", "IV_{+-}",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    expected.sort();
    if adaptable_count() != 9 || adaptable != expected {
        return Err(format!("adaptable set {adaptable:?}"));
    }
    Ok("16 distinct cases, 9 adaptable, set matches".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("1  tangency order", c1_tangency_order),
        ("2  vertical tangency scaling", c2_vertical_tangency),
        ("3  rectangle scaling exponents", c3_scaling_exponents),
        ("4  slope lemma on the strip", c4_slope_lemma_one),
        ("5  slope lemma along arcs", c5_slope_lemma_two),
        ("6  box cascade", c6_cascade),
        ("7  modulus", c7_modulus),
        ("8a c_n for the constant seed", c8a_cn_reference),
        ("8b c_n for the tilted seed", c8b_cn_tilted),
        ("8c s_n increments", c8c_s_steps),
        ("9  conjugacy power law", c9_power_law),
        ("10 intersection of transported arcs", c10_intersection),
        ("11 order probe", c11_order_probe),
        ("12 sign case classification", c12_classification),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
