//! Exact answer-set counting for ground normal logic programs.
//!
//! A program is translated into a pair of clause sets: `F`, the clausal form
//! of Clark's completion (plus integrity constraints), and `G`, implications
//! over fresh copy variables of the loop atoms. An assignment to the atoms is
//! an answer set exactly when it satisfies `F` and unit propagation of it on
//! `G` leaves nothing but unit clauses on copy variables. The [`engine`]
//! counts such assignments with a component-caching search over `F ∧ G`.
//!
//! ```
//! use aspcount::{build_pair, engine, parse_program};
//!
//! let program = parse_program("a :- not b. b :- not a. c :- d. d :- c.").unwrap();
//! let pair = build_pair(&program);
//! let (count, _stats) = engine::count(&pair).unwrap();
//! assert_eq!(count, 2u32.into());
//! ```

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod encode;
pub mod engine;
pub mod ingest;
pub mod oracle;
pub mod program;
pub mod report;

pub use analysis::{analyze, build_dep_graph, compute_loop_atoms, is_tight, DepGraph, LoopInfo};
pub use encode::{
    build_pair, clark_completion, copy_operation, emit_dimacs, Cnf, Lit, PairFormula, Var, VarClass,
};
pub use engine::{count, hybrid_count, EngineConfig, RunStats};
pub use ingest::{parse_program, render_program, ParseDiagnostic};
pub use num_bigint::BigUint as BigCount;
pub use program::{AtomId, Program, Rule};

#[cfg(test)]
pub(crate) fn sample_program() -> Program {
    parse_program(
        "a :- not b.\nb :- not a.\nc :- a, b.\nc :- d.\nd :- a.\nd :- b, c.\ne :- not a, not b.",
    )
    .expect("example program parses")
}
