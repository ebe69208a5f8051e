//! Ground truth by the book: Gelfond-Lifschitz reduct, least models,
//! exhaustive answer-set counting, and a plain reference unit propagator.
//!
//! Nothing here shares code with the counting engine; tests compare the two.

use num_bigint::BigUint;

use crate::encode::{Clause, Lit, Var, VarTable};
use crate::program::{AtomId, Program};

pub const DEFAULT_ATOM_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("program has {atoms} atoms, above the exhaustive-search cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
}

/// The set of true atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    truth: Vec<bool>,
}

impl Interpretation {
    pub fn empty(n_atoms: usize) -> Self {
        Interpretation {
            truth: vec![false; n_atoms],
        }
    }

    pub fn from_atoms(n_atoms: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut m = Self::empty(n_atoms);
        for a in atoms {
            m.truth[a.index()] = true;
        }
        m
    }

    pub fn from_bits(n_atoms: usize, bits: u64) -> Self {
        Interpretation {
            truth: (0..n_atoms).map(|i| bits >> i & 1 != 0).collect(),
        }
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.truth[a.index()]
    }

    pub fn insert(&mut self, a: AtomId) -> bool {
        !std::mem::replace(&mut self.truth[a.index()], true)
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.truth
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| AtomId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.truth.iter().filter(|&&t| t).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.truth
    }
}

/// A program without negation: `head :- body`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PositiveProgram {
    pub n_atoms: usize,
    pub rules: Vec<(AtomId, Vec<AtomId>)>,
}

pub fn gl_reduct(program: &Program, m: &Interpretation) -> PositiveProgram {
    let rules = program
        .rules()
        .iter()
        .filter(|r| r.body.neg.iter().all(|&c| !m.contains(c)))
        .map(|r| (r.head, r.body.pos.clone()))
        .collect();
    PositiveProgram {
        n_atoms: program.num_atoms(),
        rules,
    }
}

/// Least model by counter-based forward chaining.
pub fn least_model(program: &PositiveProgram) -> Interpretation {
    let mut model = Interpretation::empty(program.n_atoms);
    let mut missing: Vec<usize> = program.rules.iter().map(|(_, b)| b.len()).collect();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); program.n_atoms];
    for (i, (_, body)) in program.rules.iter().enumerate() {
        for &a in body {
            watchers[a.index()].push(i);
        }
    }
    let mut queue: Vec<AtomId> = Vec::new();
    for (i, (head, _)) in program.rules.iter().enumerate() {
        if missing[i] == 0 && model.insert(*head) {
            queue.push(*head);
        }
    }
    while let Some(a) = queue.pop() {
        for &ri in &watchers[a.index()] {
            missing[ri] -= 1;
            if missing[ri] == 0 {
                let head = program.rules[ri].0;
                if model.insert(head) {
                    queue.push(head);
                }
            }
        }
    }
    model
}

/// `m` satisfies every constraint and equals the least model of its reduct.
pub fn is_answer_set(program: &Program, m: &Interpretation) -> bool {
    let t = |a: AtomId| m.contains(a);
    if program.constraints().iter().any(|c| c.body.holds(t)) {
        return false;
    }
    least_model(&gl_reduct(program, m)) == *m
}

pub fn brute_force_count(program: &Program) -> Result<BigUint, OracleError> {
    brute_force_count_capped(program, DEFAULT_ATOM_CAP)
}

pub fn brute_force_count_capped(program: &Program, cap: usize) -> Result<BigUint, OracleError> {
    Ok(BigUint::from(answer_sets_capped(program, cap)?.len()))
}

/// All answer sets, in increasing bit order of their characteristic vectors.
pub fn answer_sets_capped(
    program: &Program,
    cap: usize,
) -> Result<Vec<Interpretation>, OracleError> {
    let n = program.num_atoms();
    if n > cap || n >= 64 {
        return Err(OracleError::CapExceeded { atoms: n, cap });
    }
    Ok((0..1u64 << n)
        .map(|bits| Interpretation::from_bits(n, bits))
        .filter(|m| is_answer_set(program, m))
        .collect())
}

/// Partial assignment over formula variables, indexed by `Var`.
pub type PartialAssignment = [Option<bool>];

/// `φ|τ`: satisfied clauses removed, false literals deleted, and unit
/// clauses propagated to fixpoint. Each literal derived by propagation stays
/// in the result as a unit clause. A conflict yields the single empty clause.
/// The result is a sorted clause multiset.
pub fn residual(cnf: &[Clause], tau: &PartialAssignment) -> Vec<Clause> {
    let mut sigma: Vec<Option<bool>> = tau.to_vec();
    let value = |sigma: &[Option<bool>], l: Lit| {
        sigma
            .get(l.var().index())
            .copied()
            .flatten()
            .map(|v| l.eval(v))
    };
    let mut derived: Vec<Lit> = Vec::new();
    loop {
        let mut changed = false;
        for c in cnf {
            if c.iter().any(|&l| value(&sigma, l) == Some(true)) {
                continue;
            }
            let open: Vec<Lit> = c
                .iter()
                .copied()
                .filter(|&l| value(&sigma, l).is_none())
                .collect();
            match open.as_slice() {
                [] => return vec![Vec::new()],
                [l] => {
                    let idx = l.var().index();
                    if idx >= sigma.len() {
                        sigma.resize(idx + 1, None);
                    }
                    sigma[idx] = Some(l.is_positive());
                    derived.push(*l);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<Clause> = derived.into_iter().map(|l| vec![l]).collect();
    for c in cnf {
        if c.iter().any(|&l| value(&sigma, l) == Some(true)) {
            continue;
        }
        let open: Clause = c
            .iter()
            .copied()
            .filter(|&l| value(&sigma, l).is_none())
            .collect();
        out.push(open);
    }
    out.sort();
    out
}

/// `Copy(P)|τ = ∅`: no conflict, and only unit clauses on copy variables survive.
pub fn copy_residual_is_empty(g: &[Clause], tau: &PartialAssignment, vars: &VarTable) -> bool {
    residual(g, tau)
        .iter()
        .all(|c| c.len() == 1 && vars.is_copy(c[0].var()))
}

/// Assignment over all formula variables that sets atoms from `m` and leaves
/// the rest open.
pub fn atom_assignment(vars: &VarTable, m: &Interpretation) -> Vec<Option<bool>> {
    let mut tau = vec![None; vars.len()];
    for (i, &t) in m.as_slice().iter().enumerate() {
        tau[i] = Some(t);
    }
    tau
}

/// Whether `tau` over atoms extends to a model of `f`, trying every value of
/// the open variables that occur in `f`.
pub fn extends_to_model(f: &[Clause], tau: &PartialAssignment) -> bool {
    let mut open: Vec<Var> = f
        .iter()
        .flatten()
        .map(|l| l.var())
        .filter(|v| tau.get(v.index()).copied().flatten().is_none())
        .collect();
    open.sort_unstable();
    open.dedup();
    assert!(
        open.len() < 24,
        "too many open variables for exhaustive extension"
    );
    let mut full: Vec<Option<bool>> = tau.to_vec();
    let max = open.iter().map(|v| v.index() + 1).max().unwrap_or(0);
    if full.len() < max {
        full.resize(max, None);
    }
    (0..1u32 << open.len()).any(|bits| {
        for (i, v) in open.iter().enumerate() {
            full[v.index()] = Some(bits >> i & 1 != 0);
        }
        f.iter().all(|c| {
            c.iter()
                .any(|&l| full[l.var().index()].map(|v| l.eval(v)) == Some(true))
        })
    })
}
