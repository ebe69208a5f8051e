//! Run report emitted as JSON on standard error.

use std::time::Duration;

use serde::Serialize;

use crate::encode::PairFormula;
use crate::engine::{HybridPath, RunStats};
use crate::program::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Count,
    Enumerate,
    Hybrid,
    Oracle,
}

/// Instance shape, independent of how it was counted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceShape {
    pub tight: bool,
    pub n_atoms: usize,
    pub n_rules: usize,
    pub n_loop_atoms: usize,
    pub n_copy_vars: usize,
    pub n_clauses_f: usize,
    pub n_clauses_g: usize,
}

impl InstanceShape {
    pub fn of(program: &Program, pair: &PairFormula) -> Self {
        InstanceShape {
            tight: pair.is_tight(),
            n_atoms: program.num_atoms(),
            n_rules: program.rules().len(),
            n_loop_atoms: pair.loop_atoms.len(),
            n_copy_vars: pair.copy_vars().len(),
            n_clauses_f: pair.f.len(),
            n_clauses_g: pair.g.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    /// Decimal count, or `"exceeded"` when enumeration hit its limit.
    pub answer_count: String,
    pub decisions: u64,
    pub propagations: u64,
    pub bcp_seconds: f64,
    pub cache_lookups: u64,
    pub cache_hits: u64,
    pub cache_hit_pct: f64,
    pub cache_entries: u64,
    pub wall_seconds: f64,
    pub tight: bool,
    pub n_atoms: usize,
    pub n_rules: usize,
    pub n_loop_atoms: usize,
    pub n_copy_vars: usize,
    pub n_clauses_f: usize,
    pub n_clauses_g: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hybrid_path: Option<&'static str>,
}

impl RunReport {
    pub fn new(
        mode: Mode,
        answer_count: String,
        stats: &RunStats,
        wall: Duration,
        shape: &InstanceShape,
    ) -> Self {
        RunReport {
            mode,
            answer_count,
            decisions: stats.decisions,
            propagations: stats.propagations,
            bcp_seconds: stats.bcp_time.as_secs_f64(),
            cache_lookups: stats.cache_lookups,
            cache_hits: stats.cache_hits,
            cache_hit_pct: stats.cache_hit_pct(),
            cache_entries: stats.cache_entries,
            wall_seconds: wall.as_secs_f64(),
            tight: shape.tight,
            n_atoms: shape.n_atoms,
            n_rules: shape.n_rules,
            n_loop_atoms: shape.n_loop_atoms,
            n_copy_vars: shape.n_copy_vars,
            n_clauses_f: shape.n_clauses_f,
            n_clauses_g: shape.n_clauses_g,
            hybrid_path: None,
        }
    }

    pub fn with_path(mut self, path: HybridPath) -> Self {
        self.hybrid_path = Some(match path {
            HybridPath::Enumeration => "enumeration",
            HybridPath::Counting => "counting",
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Keys every report carries.
pub const REPORT_KEYS: [&str; 17] = [
    "mode",
    "answer_count",
    "decisions",
    "propagations",
    "bcp_seconds",
    "cache_lookups",
    "cache_hits",
    "cache_hit_pct",
    "cache_entries",
    "wall_seconds",
    "tight",
    "n_atoms",
    "n_rules",
    "n_loop_atoms",
    "n_copy_vars",
    "n_clauses_f",
    "n_clauses_g",
];
