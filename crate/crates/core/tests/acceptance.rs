//! Acceptance checks. Prints one line per criterion and exits non-zero if
//! any fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use clap::Parser;
use common::{fixtures, goal_mass, product_oracle, unitarity_report, Fixture};
use qtree::amplify::{optimal_iterations, Amplifier};
use qtree::cli::{run, RunConfig};
use qtree::problem::{branching_stats, enumerate_paths, generators};
use qtree::{
    marked_mass, pruned_search, uninformed_search, AmplificationSchedule, MarkPredicate, PipelinePlan, PreparationPlan,
    PruningStage,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn listed(problems: &[String]) -> String {
    if problems.is_empty() {
        String::new()
    } else {
        format!("; {}", problems.join(", "))
    }
}

fn within_time(v: Verdict, started: Instant, limit: Duration) -> Verdict {
    let t = started.elapsed();
    let detail = format!("{}; {:.2}s (limit {}s)", v.detail, t.as_secs_f64(), limit.as_secs());
    Verdict { pass: v.pass && t < limit, detail }
}

/// Every shipped fixture: support and amplitudes of the prepared state
/// equal the product oracle, live paths equal classical enumeration.
fn brute_force_equivalence(fx: &[Fixture]) -> Verdict {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let (mut b1, mut b2, mut b4, mut non_constant, mut dead_end, mut goalless) =
        (false, false, false, false, false, false);
    for f in fx {
        let p = &f.problem;
        let paths = enumerate_paths(p, f.depth);
        if paths.len() > 1 << 14 {
            failures.push(format!("{} has {} paths", f.name, paths.len()));
        }
        let x = PreparationPlan::new(p, f.depth).prepare().unwrap();
        let got: BTreeMap<_, _> = x.entries().unwrap().map(|(k, s)| (k.clone(), (s.node, s.dead, s.amp))).collect();
        let want: BTreeMap<_, _> =
            product_oracle(p, p.root(), f.depth).into_iter().map(|c| (c.path, (c.node, c.dead, c.amp))).collect();
        if got.keys().ne(want.keys()) {
            failures.push(format!("{}: support differs", f.name));
            continue;
        }
        for (path, &(node, dead, amp)) in &got {
            let (wn, wd, wa) = want[path];
            if (node, dead) != (wn, wd) {
                failures.push(format!("{}: {path:?} node/dead differs", f.name));
            }
            worst = worst.max((amp.re - wa).abs()).max(amp.im.abs());
        }
        let live: Vec<_> = got.iter().filter(|(k, v)| !v.1 && k.len() == f.depth).map(|(k, _)| k.clone()).collect();
        let classical: Vec<_> = paths.iter().map(|o| o.path.clone()).collect();
        if live != classical {
            failures.push(format!("{}: live paths differ from enumeration", f.name));
        }

        if let Ok(s) = branching_stats(p, f.depth) {
            let constant = (s.b_avg - s.b_max as f64).abs() < 1e-12;
            b1 |= constant && s.b_max == 1;
            b2 |= constant && s.b_max == 2;
            b4 |= constant && s.b_max == 4;
            non_constant |= !constant;
        }
        dead_end |= got.values().any(|v| v.1);
        goalless |= p.goals().next().is_none();
    }
    let coverage = fx.len() >= 6 && b1 && b2 && b4 && non_constant && dead_end && goalless;
    if !coverage {
        failures.push("fixture coverage incomplete".into());
    }
    within_time(
        verdict(
            failures.is_empty() && worst <= 1e-12,
            format!("{} fixtures, max amplitude error {worst:.1e} (tol 1e-12){}", fx.len(), listed(&failures)),
        ),
        started,
        Duration::from_secs(5),
    )
}

/// Uniform four-path tree with one marked leaf: one iterate gives mass 1.
fn certainty() -> Verdict {
    let p = common::load_fixture("binary_d2");
    let psi = PreparationPlan::new(&p, 2).prepare().unwrap();
    let mark = MarkPredicate::goal(2);
    let mut x = psi.clone();
    Amplifier::new(&p, &psi, mark).unwrap().iterate(&mut x).unwrap();
    let m = marked_mass(&x, &p, &mark);
    verdict((m - 1.0).abs() <= 1e-12, format!("N=4 M=1, mass after one iterate {m:.15} (tol 1e-12)"))
}

fn closed_form(fx: &[Fixture]) -> Verdict {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut checks = 0;
    for f in fx {
        let p = &f.problem;
        let a = goal_mass(p, f.depth).clamp(0.0, 1.0);
        let theta = a.sqrt().asin();
        let psi = PreparationPlan::new(p, f.depth).prepare().unwrap();
        let mark = MarkPredicate::goal(f.depth);
        let mut amp = Amplifier::new(p, &psi, mark).unwrap();
        let mut x = psi.clone();
        for k in 0..=3 * optimal_iterations(a) {
            let want = ((2 * k + 1) as f64 * theta).sin().powi(2);
            worst = worst.max((marked_mass(&x, p, &mark) - want).abs());
            checks += 1;
            amp.iterate(&mut x).unwrap();
        }
    }
    within_time(
        verdict(worst <= 1e-9, format!("{checks} (fixture, k) pairs, max error {worst:.1e} (tol 1e-9)")),
        started,
        Duration::from_secs(10),
    )
}

fn quadratic_scaling() -> Verdict {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    let mut points = Vec::new();
    for d in 4..=14 {
        let n = 1usize << d;
        let p = generators::uniform_tree(2, d, &[n / 3]);
        let out = uninformed_search(&p, d, &AmplificationSchedule::fixed_optimal().with_seed(d as u64)).unwrap();
        let k = out.report.iterations;
        let want = (std::f64::consts::FRAC_PI_4 * (n as f64).sqrt() - 0.5).round() as usize;
        if k != want || out.report.n_paths != n || out.report.n_marked != 1 {
            mismatches.push(format!("d={d}: k={k} want {want}"));
        }
        points.push(((n as f64).ln(), (k as f64).ln()));
    }
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    within_time(
        verdict(
            mismatches.is_empty() && (slope - 0.5).abs() <= 0.05,
            format!("d=4..14, log-log slope {slope:.4} (want 0.5 +/- 0.05){}", listed(&mismatches)),
        ),
        started,
        Duration::from_secs(60),
    )
}

fn unknown_m_search() -> Verdict {
    let started = Instant::now();
    let p = generators::uniform_tree(2, 6, &[41]);
    let n = 64.0f64;
    let budget = 100 * (n.sqrt() as u64 + 1);
    let (mut queries, mut hits) = (0u64, 0);
    let seeds = 200;
    for seed in 0..seeds {
        let out = uninformed_search(&p, 6, &AmplificationSchedule::exponential(seed, budget)).unwrap();
        queries += out.report.oracle_queries;
        if out.solution.as_ref().is_some_and(|s| p.follow(p.root(), s).is_some_and(|t| p.is_goal(t))) {
            hits += 1;
        }
    }
    let mean = queries as f64 / seeds as f64;
    let rate = hits as f64 / seeds as f64;
    within_time(
        verdict(
            mean <= 9.0 * n.sqrt() && rate >= 0.95,
            format!(
                "N=64 M=1, mean queries {mean:.2} (limit {}), success {rate:.3} (min 0.95), budget {budget}",
                9.0 * n.sqrt()
            ),
        ),
        started,
        Duration::from_secs(30),
    )
}

fn unitarity(fx: &[Fixture]) -> Verdict {
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for f in fx {
        if PreparationPlan::new(&f.problem, f.depth).layout.total_width > 16 {
            continue;
        }
        worst = worst.max(unitarity_report(&f.problem, f.depth, 1).worst());
        names.push(f.name.as_str());
    }
    verdict(
        worst <= 1e-12 && !names.is_empty(),
        format!("{} fixtures with total_width <= 16, max deviation {worst:.1e} (tol 1e-12)", names.len()),
    )
}

fn pruning(fx: &[Fixture]) -> Verdict {
    // Four depth-1 subtrees, one satisfying h <= tau: one stage iterate.
    let p = common::load_fixture("quad_prune");
    let plan = PipelinePlan {
        problem: &p,
        depth: 2,
        stages: vec![PruningStage { level: 1, tau: 1.0, iterations: 1 }],
        terminal: AmplificationSchedule::fixed_optimal(),
    };
    let certainty = pruned_search(&plan, 0).unwrap().stages[0].mass_after;

    // The two-subtree variant sits at a = 1/2, a fixed point of the iterate.
    let half = generators::two_subtree_prune();
    let plan = PipelinePlan {
        problem: &half,
        depth: 2,
        stages: vec![PruningStage { level: 1, tau: 1.0, iterations: 1 }],
        terminal: AmplificationSchedule::fixed_optimal(),
    };
    let half_mass = pruned_search(&plan, 0).unwrap().stages[0].mass_after;

    let mut worst = 0.0f64;
    let mut compared = 0;
    for f in fx.iter().filter(|f| f.problem.has_heuristic() && f.depth >= 2) {
        let stages: Vec<_> = (1..f.depth).map(|level| PruningStage { level, tau: 1.0, iterations: 0 }).collect();
        for k in 0..3 {
            let plan = PipelinePlan {
                problem: &f.problem,
                depth: f.depth,
                stages: stages.clone(),
                terminal: AmplificationSchedule::explicit(k),
            };
            let pruned = pruned_search(&plan, 5).unwrap();
            let plain =
                uninformed_search(&f.problem, f.depth, &AmplificationSchedule::explicit(k).with_seed(5)).unwrap();
            let (a, b) = (pruned.terminal.state.unwrap(), plain.state.unwrap());
            if a.support_len() != b.support_len() {
                worst = f64::INFINITY;
            }
            for (path, slot) in b.entries().unwrap() {
                let d = a.amplitude(path).map_or(f64::INFINITY, |x| (x - slot.amp).norm());
                worst = worst.max(d);
            }
            compared += 1;
        }
    }
    verdict(
        (certainty - 1.0).abs() <= 1e-12 && worst <= 1e-12 && compared > 0,
        format!(
            "four-subtree stage mass {certainty:.15} (tol 1e-12; two-subtree variant gives {half_mass:.3}); \
             all-k=0 vs uninformed over {compared} runs, max diff {worst:.1e}"
        ),
    )
}

fn determinism() -> Verdict {
    let fx = |n: &str| common::fixture_dir().join(format!("{n}.problem")).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["prepare".into(), fx("five_leaf"), "--depth".into(), "2".into(), "--state-dump".into()],
        vec![
            "search".into(),
            fx("quaternary_d2"),
            "--depth".into(),
            "2".into(),
            "--policy".into(),
            "exponential_search".into(),
            "--seed".into(),
            "21".into(),
            "--samples".into(),
            "8".into(),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "iddfs".into(),
            fx("route_map"),
            "--depth".into(),
            "4".into(),
            "--seed".into(),
            "2".into(),
            "--format".into(),
            "records".into(),
        ],
        vec![
            "prune".into(),
            fx("grid_5x5"),
            "--depth".into(),
            "8".into(),
            "--stage".into(),
            "4:2:4".into(),
            "--seed".into(),
            "6".into(),
            "--format".into(),
            "records".into(),
        ],
        vec!["greedy".into(), fx("grid_5x5"), "--depth".into(), "8".into(), "--seed".into(), "9".into()],
        vec![
            "compare".into(),
            fx("skewed_d4"),
            "--depth".into(),
            "4".into(),
            "--seeds".into(),
            "6".into(),
            "--format".into(),
            "records".into(),
        ],
        vec!["stats".into(), fx("mixed_tree"), "--depth".into(), "2".into()],
    ];
    let exec = |args: &[String]| {
        let cfg = RunConfig::try_parse_from(std::iter::once("qtree".to_string()).chain(args.iter().cloned())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&cfg, &mut out, &mut err);
        (code, out, err)
    };
    let mut differing = Vec::new();
    for args in &runs {
        let (a, b) = (exec(args), exec(args));
        if a != b || a.1.is_empty() {
            differing.push(args[0].clone());
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} commands run twice, differing: {}",
            runs.len(),
            if differing.is_empty() { "none".into() } else { differing.join(",") }
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn main() {
    let fx = fixtures();
    let criteria: Vec<Criterion<'_>> = vec![
        ("brute-force equivalence", Box::new(|| brute_force_equivalence(&fx))),
        ("certainty for one marked in four", Box::new(certainty)),
        ("amplification closed form", Box::new(|| closed_form(&fx))),
        ("quadratic scaling", Box::new(quadratic_scaling)),
        ("unknown-M exponential search", Box::new(unknown_m_search)),
        ("unitarity proxy", Box::new(|| unitarity(&fx))),
        ("pruning pipeline", Box::new(|| pruning(&fx))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|e| verdict(false, format!("panicked: {e:?}")));
        println!("criterion {} {name}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
