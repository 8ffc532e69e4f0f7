use std::collections::HashMap;
use std::fmt::Write as _;

use super::{ProblemBuilder, ProblemSpec};
use crate::error::{Error, Result};

/// Parses the line-oriented problem format:
///
/// ```text
/// problem <name>
/// actions a0 a1 ...
/// state <id> [<id> ...]
/// root <id>
/// goal <id>              # repeatable
/// edge <state> <action> <state>
/// h <state> <value>      # optional, all-or-nothing
/// ```
///
/// State and action indices follow declaration order. Edges, goals and
/// heuristic lines may reference states declared later in the file.
pub fn load_problem(source: &str) -> Result<ProblemSpec> {
    let lines: Vec<(usize, Vec<&str>)> = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();

    let mut name = None;
    let mut b = ProblemBuilder::default();
    let mut states: HashMap<&str, usize> = HashMap::new();
    let mut actions: HashMap<&str, usize> = HashMap::new();

    // Declarations first so references can point forward.
    for (line, t) in &lines {
        let line = *line;
        match t[0] {
            "problem" => {
                if name.is_some() {
                    return perr(line, "duplicate 'problem' header");
                }
                if t.len() != 2 {
                    return perr(line, "expected 'problem <name>'");
                }
                name = Some(t[1].to_string());
            }
            "actions" => {
                if !actions.is_empty() {
                    return perr(line, "duplicate 'actions' line");
                }
                for &a in &t[1..] {
                    if actions.insert(a, b.action(a)).is_some() {
                        return perr(line, format!("duplicate action '{a}'"));
                    }
                }
            }
            "state" => {
                if t.len() < 2 {
                    return perr(line, "expected 'state <id>'");
                }
                for &s in &t[1..] {
                    if states.insert(s, b.state(s)).is_some() {
                        return perr(line, format!("duplicate state '{s}'"));
                    }
                }
            }
            "root" | "goal" | "edge" | "h" => {}
            other => return perr(line, format!("unknown directive '{other}'")),
        }
    }
    let Some(name) = name else {
        return perr(1, "missing 'problem <name>' header");
    };
    b.name = name;

    let state = |line: usize, id: &str| {
        states.get(id).copied().ok_or_else(|| Error::Parse { line, message: format!("unknown state '{id}'") })
    };

    let mut root_seen = false;
    let mut edge_lines: HashMap<(usize, usize), usize> = HashMap::new();
    let mut h_seen: HashMap<usize, usize> = HashMap::new();
    for (line, t) in &lines {
        let line = *line;
        match t[0] {
            "root" => {
                if t.len() != 2 {
                    return perr(line, "expected 'root <id>'");
                }
                if root_seen {
                    return perr(line, "duplicate 'root' line");
                }
                root_seen = true;
                b.root(state(line, t[1])?);
            }
            "goal" => {
                if t.len() != 2 {
                    return perr(line, "expected 'goal <id>'");
                }
                b.goal(state(line, t[1])?);
            }
            "edge" => {
                if t.len() != 4 {
                    return perr(line, "expected 'edge <state> <action> <state>'");
                }
                let from = state(line, t[1])?;
                let a = *actions
                    .get(t[2])
                    .ok_or_else(|| Error::Parse { line, message: format!("unknown action '{}'", t[2]) })?;
                let to = state(line, t[3])?;
                if let Some(prev) = edge_lines.insert((from, a), line) {
                    return Err(Error::Validation(format!(
                        "line {line}: duplicate edge for state '{}' and action '{}' (first defined on line {prev})",
                        t[1], t[2]
                    )));
                }
                b.edge(from, a, to);
            }
            "h" => {
                if t.len() != 3 {
                    return perr(line, "expected 'h <state> <value>'");
                }
                let s = state(line, t[1])?;
                let v: f64 = t[2]
                    .parse()
                    .map_err(|_| Error::Parse { line, message: format!("invalid heuristic value '{}'", t[2]) })?;
                if h_seen.insert(s, line).is_some() {
                    return perr(line, format!("duplicate heuristic for state '{}'", t[1]));
                }
                b.heuristic(s, v);
            }
            _ => {}
        }
    }
    if !root_seen {
        return Err(Error::Validation("no 'root' line".into()));
    }
    b.build()
}

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, message: message.into() })
}

pub(super) fn render(p: &ProblemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "problem {}", p.name);
    if p.num_actions() > 0 {
        let _ = writeln!(out, "actions {}", p.action_names.join(" "));
    }
    for s in &p.state_names {
        let _ = writeln!(out, "state {s}");
    }
    let _ = writeln!(out, "root {}", p.state_names[p.root]);
    for g in p.goals() {
        let _ = writeln!(out, "goal {}", p.state_names[g]);
    }
    for (s, out_edges) in p.edges.iter().enumerate() {
        for &(a, t) in out_edges {
            let _ = writeln!(out, "edge {} {} {}", p.state_names[s], p.action_names[a], p.state_names[t]);
        }
    }
    if let Some(h) = &p.heuristic {
        for (s, v) in h.iter().enumerate() {
            let _ = writeln!(out, "h {} {}", p.state_names[s], v);
        }
    }
    out
}
