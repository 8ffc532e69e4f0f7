//! Browser bindings. Each exported function takes problem text and returns a
//! JSON document; the plain `*_json` versions are what the tests exercise.

use qtree::amplify::{optimal_iterations, predicted_mass, success_angle, Amplifier};
use qtree::prep::transition_conflicts;
use qtree::report::fmt_path;
use qtree::{
    load_problem, marked_mass, pruned_search, AmplificationSchedule, MarkPredicate, PipelinePlan, PreparationPlan,
    ProblemSpec, PruningStage, TreeState,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest tree the page will tabulate.
pub const MAX_CONFIGURATIONS: usize = 4096;
pub const MAX_DEPTH: usize = 16;
pub const MAX_CURVE_ITERATIONS: usize = 200;

const PRESETS: &[(&str, &str)] = &[
    ("route_map", include_str!("../../core/fixtures/route_map.problem")),
    ("five_leaf", include_str!("../../core/fixtures/five_leaf.problem")),
    ("quad_prune", include_str!("../../core/fixtures/quad_prune.problem")),
    ("binary_d3_goal5", include_str!("../../core/fixtures/binary_d3_goal5.problem")),
    ("dead_end", include_str!("../../core/fixtures/dead_end.problem")),
    ("skewed_d4", include_str!("../../core/fixtures/skewed_d4.problem")),
];

fn parse(text: &str, depth: usize) -> Result<ProblemSpec, String> {
    if depth > MAX_DEPTH {
        return Err(format!("depth {depth} exceeds the demo limit of {MAX_DEPTH}"));
    }
    load_problem(text).map_err(|e| e.to_string())
}

fn prepare(p: &ProblemSpec, depth: usize) -> Result<TreeState, String> {
    let x = PreparationPlan::new(p, depth).prepare().map_err(|e| e.to_string())?;
    if x.support_len() > MAX_CONFIGURATIONS {
        return Err(format!(
            "{} configurations at depth {depth}; the demo shows at most {MAX_CONFIGURATIONS}",
            x.support_len()
        ));
    }
    Ok(x)
}

fn labels(p: &ProblemSpec, path: &[usize]) -> String {
    path.iter().map(|&a| p.action_name(a)).collect::<Vec<_>>().join(" ")
}

pub fn presets_json() -> String {
    let map: serde_json::Map<String, Value> =
        PRESETS.iter().map(|(name, text)| (name.to_string(), Value::from(*text))).collect();
    Value::Object(map).to_string()
}

/// The superposition tree at `depth`: one entry per configuration.
pub fn prepare_json(text: &str, depth: usize) -> Result<String, String> {
    let p = parse(text, depth)?;
    let x = prepare(&p, depth)?;
    let layout = *x.layout();
    let configurations: Vec<Value> = x
        .entries()
        .expect("structured")
        .map(|(path, slot)| {
            json!({
                "path": fmt_path(path),
                "actions": labels(&p, path),
                "node": p.state_name(slot.node),
                "dead": slot.dead,
                "goal": !slot.dead && path.len() == depth && p.is_goal(slot.node),
                "amplitude": slot.amp.re,
                "probability": slot.amp.norm_sqr(),
            })
        })
        .collect();
    let warnings: Vec<String> = transition_conflicts(&p, p.root(), depth)
        .first()
        .map(|c| {
            format!(
                "non-unitary transition model: '{}' and '{}' both reach '{}' under '{}'",
                p.state_name(c.sources.0),
                p.state_name(c.sources.1),
                p.state_name(c.target),
                p.action_name(c.action)
            )
        })
        .into_iter()
        .collect();
    Ok(json!({
        "problem": p.name(),
        "depth": depth,
        "layout": {
            "node_width": layout.node_width,
            "action_width": layout.action_width,
            "total_width": layout.total_width,
            "path_encoded_node_width": layout.path_encoded_node_width(),
        },
        "goal_mass": marked_mass(&x, &p, &MarkPredicate::goal(depth)),
        "configurations": configurations,
        "warnings": warnings,
    })
    .to_string())
}

/// Goal mass after each of `0..=k_max` iterates, simulated and predicted.
pub fn curve_json(text: &str, depth: usize, k_max: usize) -> Result<String, String> {
    let p = parse(text, depth)?;
    let k_max = k_max.min(MAX_CURVE_ITERATIONS);
    let psi = prepare(&p, depth)?;
    let mark = MarkPredicate::goal(depth);
    let a = marked_mass(&psi, &p, &mark);
    let mut amp = Amplifier::new(&p, &psi, mark).map_err(|e| e.to_string())?;
    let mut x = psi.clone();
    let mut points = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        points.push(json!({ "k": k, "measured": marked_mass(&x, &p, &mark), "predicted": predicted_mass(a, k) }));
        amp.iterate(&mut x).map_err(|e| e.to_string())?;
    }
    Ok(json!({
        "a": a,
        "theta": success_angle(a),
        "k_opt": if a > 0.0 { Some(optimal_iterations(a)) } else { None },
        "points": points,
    })
    .to_string())
}

/// One pruning stage at `level` with threshold `tau` and `k` iterates, then
/// extension to `depth`. Leaf probabilities are reported with and without
/// the stage.
pub fn prune_json(text: &str, depth: usize, level: usize, tau: f64, k: usize) -> Result<String, String> {
    let p = parse(text, depth)?;
    let plain = prepare(&p, depth)?;
    let plan = PipelinePlan {
        problem: &p,
        depth,
        stages: vec![PruningStage { level, tau, iterations: k }],
        terminal: AmplificationSchedule::explicit(0),
    };
    let out = pruned_search(&plan, 0).map_err(|e| e.to_string())?;
    let stage = &out.stages[0];
    let goal = MarkPredicate::goal(depth);
    let leaves: Vec<Value> = plain
        .entries()
        .expect("structured")
        .map(|(path, slot)| {
            let after = out.prepared.amplitude(path).map_or(0.0, |a| a.norm_sqr());
            json!({
                "path": fmt_path(path),
                "actions": labels(&p, path),
                "node": p.state_name(slot.node),
                "goal": !slot.dead && path.len() == depth && p.is_goal(slot.node),
                "before": slot.amp.norm_sqr(),
                "after": after,
            })
        })
        .collect();
    Ok(json!({
        "stage": {
            "level": stage.level,
            "tau": stage.tau,
            "k": stage.iterations,
            "mass_before": stage.mass_before,
            "mass_after": stage.mass_after,
            "oracle_queries": stage.oracle_queries,
            "skipped": stage.skipped,
        },
        "goal_mass_uninformed": marked_mass(&plain, &p, &goal),
        "goal_mass_pruned": marked_mass(&out.prepared, &p, &goal),
        "leaves": leaves,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn presets() -> String {
    presets_json()
}

#[wasm_bindgen]
pub fn prepare_tree(problem: &str, depth: u32) -> Result<String, JsValue> {
    js(prepare_json(problem, depth as usize))
}

#[wasm_bindgen]
pub fn amplification_curve(problem: &str, depth: u32, k_max: u32) -> Result<String, JsValue> {
    js(curve_json(problem, depth as usize, k_max as usize))
}

#[wasm_bindgen]
pub fn pruning_stage(problem: &str, depth: u32, level: u32, tau: f64, k: u32) -> Result<String, JsValue> {
    js(prune_json(problem, depth as usize, level as usize, tau, k as usize))
}
