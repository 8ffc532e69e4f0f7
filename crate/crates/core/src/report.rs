//! Flat `key=value` run records and number formatting shared by every output.

use std::fmt::Write as _;

use crate::problem::ActionPath;

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-5, 1e12)`.
pub fn fmt_g12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        return "<>".into();
    }
    let parts: Vec<String> = path.iter().map(|a| a.to_string()).collect();
    format!("<{}>", parts.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// Amplification ran to completion (no sampling verdict).
    Completed,
    Found,
    NotFound,
    NoMarked,
    BudgetExhausted,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Found => "found",
            RunStatus::NotFound => "not_found",
            RunStatus::NoMarked => "no_marked",
            RunStatus::BudgetExhausted => "budget_exhausted",
        }
    }
}

/// Metrics of one amplification run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub label: String,
    pub policy: String,
    pub depth: usize,
    pub n_paths: usize,
    pub n_marked: usize,
    /// Initial success probability `a` (marked mass of the prepared state).
    pub initial_success: f64,
    pub theta: f64,
    pub iterations: usize,
    pub oracle_queries: u64,
    pub rounds: usize,
    pub predicted_final: f64,
    pub measured_final: f64,
    pub samples_drawn: usize,
    pub seed: u64,
    /// `a` was read off the simulated state rather than estimated.
    pub uses_simulator_knowledge: bool,
    pub path_encoded_node_width: u32,
    pub node_width: u32,
    pub total_width: u32,
    pub status: RunStatus,
    pub solution: Option<ActionPath>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(label: impl Into<String>, policy: impl Into<String>, depth: usize, seed: u64) -> Self {
        RunReport {
            label: label.into(),
            policy: policy.into(),
            depth,
            n_paths: 0,
            n_marked: 0,
            initial_success: 0.0,
            theta: 0.0,
            iterations: 0,
            oracle_queries: 0,
            rounds: 0,
            predicted_final: 0.0,
            measured_final: 0.0,
            samples_drawn: 0,
            seed,
            uses_simulator_knowledge: false,
            path_encoded_node_width: 0,
            node_width: 0,
            total_width: 0,
            status: RunStatus::Completed,
            solution: None,
            warnings: Vec::new(),
        }
    }

    /// One line, space separated `key=value` pairs in a fixed order.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "run={} policy={} depth={} n_paths={} n_marked={} a={} theta={} k={} oracle_queries={} rounds={} \
             predicted_final={} measured_final={} samples={} seed={} simulator_knowledge={} \
             path_encoded_node_width={} node_width={} total_width={} status={} solution={} warnings={}",
            self.label,
            self.policy,
            self.depth,
            self.n_paths,
            self.n_marked,
            fmt_g12(self.initial_success),
            fmt_g12(self.theta),
            self.iterations,
            self.oracle_queries,
            self.rounds,
            fmt_g12(self.predicted_final),
            fmt_g12(self.measured_final),
            self.samples_drawn,
            self.seed,
            self.uses_simulator_knowledge,
            self.path_encoded_node_width,
            self.node_width,
            self.total_width,
            self.status.as_str(),
            self.solution.as_deref().map_or("none".into(), fmt_path),
            if self.warnings.is_empty() {
                "none".into()
            } else {
                self.warnings.iter().map(|w| w.replace(' ', "_")).collect::<Vec<_>>().join(";")
            },
        );
        out
    }
}

/// Parses a record back into ordered `(key, value)` pairs.
pub fn parse_record(line: &str) -> Vec<(String, String)> {
    line.split_whitespace().filter_map(|kv| kv.split_once('=')).map(|(k, v)| (k.to_string(), v.to_string())).collect()
}
