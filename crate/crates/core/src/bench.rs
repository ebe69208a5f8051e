//! Deterministic instance generators: independent choice pairs, directed
//! Hamiltonian cycles, source-target reachability, and seeded random
//! programs for differential testing.
//!
//! Choices are written as negation pairs (`x :- not y. y :- not x.`), so every
//! generated program is an ordinary normal program.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::program::Program;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: node {node} out of range for {n_nodes} nodes")]
    OutOfRange {
        line: usize,
        node: usize,
        n_nodes: usize,
    },
    #[error("line {line}: self-edge on node {node}")]
    SelfEdge { line: usize, node: usize },
}

/// Simple directed graph; no self-edges, no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n_nodes: usize) -> Self {
        Graph {
            n_nodes,
            edges: BTreeSet::new(),
        }
    }

    /// Adds `u -> v`. Panics on self-edges or out-of-range nodes.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n_nodes && v < self.n_nodes, "node out of range");
        assert_ne!(u, v, "self-edges are not allowed");
        self.edges.insert((u, v))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    /// Each ordered pair becomes an edge with probability `p`.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.n_nodes, self.edges.len());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Edge-list format: a header line `n m`, then `m` lines `u v`.
/// Blank lines and `%`/`#` comments are skipped; duplicate edges collapse.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split(['%', '#']).next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let malformed = |line, message: &str| GraphError::Malformed {
        line,
        message: message.to_owned(),
    };
    let (hline, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "missing `n m` header"))?;
    let nums = parse_pair(header).ok_or_else(|| malformed(hline, "expected `n m`"))?;
    let (n, m) = nums;
    let mut g = Graph::new(n);
    let mut seen = 0;
    for (line, l) in lines {
        let (u, v) = parse_pair(l).ok_or_else(|| malformed(line, "expected `u v`"))?;
        for node in [u, v] {
            if node >= n {
                return Err(GraphError::OutOfRange {
                    line,
                    node,
                    n_nodes: n,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfEdge { line, node: u });
        }
        g.add_edge(u, v);
        seen += 1;
    }
    if seen != m {
        return Err(malformed(
            hline,
            &format!("header announces {m} edges, found {seen}"),
        ));
    }
    Ok(g)
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Some((a, b)),
        _ => None,
    }
}

/// `n` independent choices `x_i`/`y_i`; tight, 2^n answer sets.
pub fn gen_choice_chain(n: usize) -> Program {
    let mut p = Program::new();
    for i in 0..n {
        let (x, y) = (format!("x{i}"), format!("y{i}"));
        p.rule(&x, &[], &[&y]);
        p.rule(&y, &[], &[&x]);
    }
    p
}

/// Directed Hamiltonian cycles of `graph`.
///
/// Every edge is chosen in or out. Each node needs exactly one selected
/// outgoing and one selected incoming edge (pairwise exclusions plus a
/// witness atom per node and direction). `r(v)` marks nodes reached from
/// node 0 along selected edges, and every node must be reached. Answer sets
/// correspond one-to-one to Hamiltonian cycles.
pub fn gen_hamiltonian(graph: &Graph) -> Program {
    assert!(
        graph.n_nodes() >= 2,
        "hamiltonian instances need at least two nodes"
    );
    let n = graph.n_nodes();
    let mut p = Program::new();
    let inn = |u: usize, v: usize| format!("in({u},{v})");
    let out = |u: usize, v: usize| format!("out({u},{v})");
    // nodes first so the atom table is stable even without edges
    for v in 0..n {
        p.intern(&format!("r({v})"));
    }
    for (u, v) in graph.edges() {
        p.rule(&inn(u, v), &[], &[&out(u, v)]);
        p.rule(&out(u, v), &[], &[&inn(u, v)]);
    }
    for x in 0..n {
        let succ: Vec<usize> = graph
            .edges()
            .filter(|&(u, _)| u == x)
            .map(|(_, v)| v)
            .collect();
        let pred: Vec<usize> = graph
            .edges()
            .filter(|&(_, v)| v == x)
            .map(|(u, _)| u)
            .collect();
        let has_out = format!("has_out({x})");
        let has_in = format!("has_in({x})");
        for (i, &v) in succ.iter().enumerate() {
            p.rule(&has_out, &[&inn(x, v)], &[]);
            for &w in &succ[i + 1..] {
                p.constraint(&[&inn(x, v), &inn(x, w)], &[]);
            }
        }
        for (i, &u) in pred.iter().enumerate() {
            p.rule(&has_in, &[&inn(u, x)], &[]);
            for &w in &pred[i + 1..] {
                p.constraint(&[&inn(u, x), &inn(w, x)], &[]);
            }
        }
        p.constraint(&[], &[&has_out]);
        p.constraint(&[], &[&has_in]);
    }
    p.rule("r(0)", &[], &[]);
    for (u, v) in graph.edges() {
        p.rule(&format!("r({v})"), &[&format!("r({u})"), &inn(u, v)], &[]);
    }
    for v in 0..n {
        p.constraint(&[], &[&format!("r({v})")]);
    }
    p
}

/// Subsets of intermediate nodes kept up such that `target` is reachable
/// from `source` through up nodes.
pub fn gen_reachability(graph: &Graph, source: usize, target: usize) -> Program {
    let n = graph.n_nodes();
    assert!(source < n && target < n, "source/target out of range");
    assert_ne!(source, target, "source and target must differ");
    let mut p = Program::new();
    for v in 0..n {
        if v != source && v != target {
            let (up, down) = (format!("up({v})"), format!("down({v})"));
            p.rule(&up, &[], &[&down]);
            p.rule(&down, &[], &[&up]);
        }
    }
    let rs = format!("r({source})");
    p.rule(&rs, &[], &[]);
    for (u, v) in graph.edges() {
        let (ru, rv) = (format!("r({u})"), format!("r({v})"));
        if v == source || v == target {
            p.rule(&rv, &[&ru], &[]);
        } else {
            p.rule(&rv, &[&ru, &format!("up({v})")], &[]);
        }
    }
    p.constraint(&[], &[&format!("r({target})")]);
    p
}

#[derive(Debug, Clone, Copy)]
pub struct RandomProgramParams {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_body: usize,
    /// Probability that a body literal is negated.
    pub neg_prob: f64,
    pub max_constraints: usize,
}

impl Default for RandomProgramParams {
    fn default() -> Self {
        RandomProgramParams {
            max_atoms: 12,
            max_rules: 25,
            max_body: 3,
            neg_prob: 0.35,
            max_constraints: 2,
        }
    }
}

/// Seeded random normal program. Roughly half of the instances plant a
/// positive cycle so the family mixes tight and non-tight programs.
pub fn gen_random_program(seed: u64, params: &RandomProgramParams) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_atoms = rng.gen_range(1..=params.max_atoms);
    let n_rules = rng.gen_range(0..=params.max_rules);
    let mut p = Program::new();
    let names: Vec<String> = (0..n_atoms).map(|i| format!("p{i}")).collect();
    for name in &names {
        p.intern(name);
    }
    let mut budget = n_rules;
    if n_atoms >= 1 && budget > 0 && rng.gen_bool(0.5) {
        // positive cycle over a random subset, each edge possibly guarded
        let len = rng.gen_range(1..=n_atoms.min(4));
        let mut cyc: Vec<usize> = (0..n_atoms).collect();
        cyc.shuffle(&mut rng);
        cyc.truncate(len);
        for i in 0..len {
            if budget == 0 {
                break;
            }
            let head = &names[cyc[i]];
            let next = &names[cyc[(i + 1) % len]];
            let mut neg = Vec::new();
            if rng.gen_bool(0.3) {
                neg.push(names[rng.gen_range(0..n_atoms)].as_str());
            }
            p.rule(head, &[next], &neg);
            budget -= 1;
        }
    }
    for _ in 0..budget {
        let head = &names[rng.gen_range(0..n_atoms)];
        let len = rng.gen_range(0..=params.max_body);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for _ in 0..len {
            let a = names[rng.gen_range(0..n_atoms)].as_str();
            if rng.gen_bool(params.neg_prob) {
                neg.push(a);
            } else {
                pos.push(a);
            }
        }
        p.rule(head, &pos, &neg);
    }
    for _ in 0..rng.gen_range(0..=params.max_constraints) {
        if rng.gen_bool(0.5) {
            continue;
        }
        let len = rng.gen_range(1..=2);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for _ in 0..len {
            let a = names[rng.gen_range(0..n_atoms)].as_str();
            if rng.gen_bool(0.5) {
                neg.push(a);
            } else {
                pos.push(a);
            }
        }
        p.constraint(&pos, &neg);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze;

    #[test]
    fn parse_graph_basics() {
        let g = parse_graph("2 1\n0 1").unwrap();
        assert_eq!((g.n_nodes(), g.n_edges()), (2, 1));
        let g = parse_graph("3 3\n0 1\n0 1\n1 2\n").unwrap();
        assert_eq!(g.n_edges(), 2);
        assert!(matches!(
            parse_graph("1 1\n0 0"),
            Err(GraphError::SelfEdge { .. })
        ));
        assert!(matches!(
            parse_graph("2 1\n0 5"),
            Err(GraphError::OutOfRange { node: 5, .. })
        ));
        assert!(matches!(
            parse_graph("2 1\n0 x"),
            Err(GraphError::Malformed { line: 2, .. })
        ));
        assert!(parse_graph("").is_err());
        assert!(parse_graph("2 2\n0 1").is_err());
        assert_eq!(
            parse_graph(&Graph::complete(3).render()).unwrap(),
            Graph::complete(3)
        );
    }

    #[test]
    fn generators_are_deterministic() {
        let params = RandomProgramParams::default();
        for seed in 0..20 {
            let a = crate::ingest::render_program(&gen_random_program(seed, &params));
            let b = crate::ingest::render_program(&gen_random_program(seed, &params));
            assert_eq!(a, b);
        }
        assert_eq!(Graph::random(6, 0.4, 9), Graph::random(6, 0.4, 9));
    }

    #[test]
    fn tightness_of_families() {
        assert!(analyze(&gen_choice_chain(5)).1.is_tight());
        assert!(!analyze(&gen_hamiltonian(&Graph::cycle(3))).1.is_tight());
        assert!(!analyze(&gen_hamiltonian(&Graph::complete(4))).1.is_tight());
        let mut diamond = Graph::new(4);
        for (u, v) in [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2), (2, 1)] {
            diamond.add_edge(u, v);
        }
        assert!(!analyze(&gen_reachability(&diamond, 0, 3)).1.is_tight());
    }

    #[test]
    fn chain_sizes() {
        assert_eq!(gen_choice_chain(0).rules().len(), 0);
        let p = gen_choice_chain(20);
        assert_eq!(p.num_atoms(), 40);
        assert_eq!(p.rules().len(), 40);
    }
}
