//! Pair representation of a normal program: `F`, the clausal completion plus
//! constraint clauses, and `G`, the copy-variable implications that track
//! non-circular support of loop atoms.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::ops::Not;

use crate::analysis::{analyze, LoopInfo};
use crate::program::{AtomId, Body, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

/// A literal packed as `var << 1 | negated`, so literals of the same variable
/// are adjacent and sort by variable first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0, "0 is not a DIMACS literal");
        Lit::new(Var((x.unsigned_abs() - 1) as u32), x > 0)
    }

    /// Truth of this literal under a value for its variable.
    #[inline]
    pub fn eval(self, value: bool) -> bool {
        value == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarClass {
    Original,
    BodyAux,
    Copy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrigin {
    Atom(AtomId),
    /// Auxiliary for the `body`-th effective body of `head`.
    Body {
        head: AtomId,
        body: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarInfo {
    pub class: VarClass,
    pub origin: VarOrigin,
}

/// Variable metadata. Original variables come first and share the index of
/// their atom: `Var(i)` is atom `AtomId(i)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarTable {
    vars: Vec<VarInfo>,
    copy_of_atom: Vec<Option<Var>>,
}

impl VarTable {
    pub fn with_atoms(n_atoms: usize) -> Self {
        VarTable {
            vars: (0..n_atoms as u32)
                .map(|i| VarInfo {
                    class: VarClass::Original,
                    origin: VarOrigin::Atom(AtomId(i)),
                })
                .collect(),
            copy_of_atom: vec![None; n_atoms],
        }
    }

    fn push(&mut self, info: VarInfo) -> Var {
        let v = Var(self.vars.len() as u32);
        self.vars.push(info);
        v
    }

    pub fn atom_var(&self, a: AtomId) -> Var {
        debug_assert!(a.index() < self.copy_of_atom.len());
        Var(a.0)
    }

    pub fn copy_var(&self, a: AtomId) -> Option<Var> {
        self.copy_of_atom.get(a.index()).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn info(&self, v: Var) -> VarInfo {
        self.vars[v.index()]
    }

    pub fn class(&self, v: Var) -> VarClass {
        self.vars[v.index()].class
    }

    pub fn is_copy(&self, v: Var) -> bool {
        self.class(v) == VarClass::Copy
    }

    pub fn n_original(&self) -> usize {
        self.copy_of_atom.len()
    }

    pub fn vars_of(&self, class: VarClass) -> impl Iterator<Item = Var> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(move |(_, i)| i.class == class)
            .map(|(i, _)| Var(i as u32))
    }
}

pub type Clause = Vec<Lit>;

/// Set of clauses in canonical form: literals sorted by variable index and
/// duplicate-free, no repeated clauses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cnf {
    clauses: Vec<Clause>,
    seen: HashSet<Clause>,
}

impl Cnf {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a clause, dropping it if tautological. Returns whether it was added.
    pub fn add(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        self.add_inner(lits, false)
    }

    /// Like [`Cnf::add`] but keeps clauses containing `x` and `¬x`.
    pub fn add_keep_tautology(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        self.add_inner(lits, true)
    }

    fn add_inner(&mut self, lits: impl IntoIterator<Item = Lit>, keep_taut: bool) -> bool {
        let mut c: Clause = lits.into_iter().collect();
        c.sort_unstable();
        c.dedup();
        if !keep_taut && c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return false;
        }
        if !self.seen.insert(c.clone()) {
            return false;
        }
        self.clauses.push(c);
        true
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.clauses.iter().flatten().map(|l| l.var())
    }
}

impl FromIterator<Clause> for Cnf {
    fn from_iter<I: IntoIterator<Item = Clause>>(iter: I) -> Self {
        let mut cnf = Cnf::new();
        for c in iter {
            cnf.add_keep_tautology(c);
        }
        cnf
    }
}

fn body_lits(vars: &VarTable, body: &Body) -> Vec<Lit> {
    body.pos
        .iter()
        .map(|&a| vars.atom_var(a).pos())
        .chain(body.neg.iter().map(|&a| vars.atom_var(a).neg()))
        .collect()
}

/// Clausal form of Clark's completion plus one clause per integrity constraint.
///
/// For an atom with `k >= 2` effective bodies, every body of two or more
/// literals gets an auxiliary variable defined by a full biconditional, so
/// the number of models over all variables equals the number of completion
/// models over atoms.
pub fn clark_completion(program: &Program) -> (Cnf, VarTable) {
    let mut vars = VarTable::with_atoms(program.num_atoms());
    let mut cnf = Cnf::new();
    let by_head = program.rules_by_head();

    for a in program.atom_ids() {
        let head = vars.atom_var(a);
        let mut bodies: Vec<&Body> = by_head[a.index()]
            .iter()
            .map(|r| &r.body)
            .filter(|b| !b.is_unsatisfiable())
            .collect();
        bodies.sort();
        bodies.dedup();

        if bodies.iter().any(|b| b.is_empty()) {
            cnf.add([head.pos()]);
            continue;
        }
        match bodies.as_slice() {
            [] => {
                cnf.add([head.neg()]);
            }
            [body] => {
                let lits = body_lits(&vars, body);
                for &l in &lits {
                    cnf.add([head.neg(), l]);
                }
                cnf.add(lits.iter().map(|&l| !l).chain([head.pos()]));
            }
            _ => {
                let mut disjuncts = Vec::with_capacity(bodies.len());
                for (i, body) in bodies.iter().enumerate() {
                    let lits = body_lits(&vars, body);
                    if lits.len() == 1 {
                        disjuncts.push(lits[0]);
                        continue;
                    }
                    let aux = vars.push(VarInfo {
                        class: VarClass::BodyAux,
                        origin: VarOrigin::Body { head: a, body: i },
                    });
                    for &l in &lits {
                        cnf.add([aux.neg(), l]);
                    }
                    cnf.add(lits.iter().map(|&l| !l).chain([aux.pos()]));
                    disjuncts.push(aux.pos());
                }
                cnf.add(disjuncts.iter().copied().chain([head.neg()]));
                for &d in &disjuncts {
                    cnf.add([!d, head.pos()]);
                }
            }
        }
    }

    for c in program.constraints() {
        let lits = body_lits(&vars, &c.body);
        cnf.add(lits.into_iter().map(|l| !l));
    }
    (cnf, vars)
}

/// Allocates one copy variable per loop atom and returns the copy implications:
/// `v' -> v` for each loop atom, and for each rule with a loop-atom head `x`
/// the clause `body' -> x'`, where positive loop atoms of the body are
/// replaced by their copies.
///
/// A rule whose positive body contains its own head yields a clause holding
/// both `x'` and `¬x'`. It is kept: it is what keeps a self-supporting atom
/// from counting as justified (`a :- a.` has the single answer set `{}`).
pub fn copy_operation(program: &Program, info: &LoopInfo, vars: &mut VarTable) -> Cnf {
    let mut g = Cnf::new();
    for &a in &info.loop_atoms {
        let v = vars.push(VarInfo {
            class: VarClass::Copy,
            origin: VarOrigin::Atom(a),
        });
        vars.copy_of_atom[a.index()] = Some(v);
    }
    for &a in &info.loop_atoms {
        let copy = vars.copy_var(a).expect("copy allocated above");
        g.add([copy.neg(), vars.atom_var(a).pos()]);
    }
    for r in program.rules() {
        let Some(head_copy) = vars.copy_var(r.head) else {
            continue;
        };
        if r.is_body_unsatisfiable() {
            continue;
        }
        let lits = r
            .body
            .pos
            .iter()
            .map(|&b| vars.copy_var(b).unwrap_or(vars.atom_var(b)).neg())
            .chain(r.body.neg.iter().map(|&c| vars.atom_var(c).pos()))
            .chain([head_copy.pos()]);
        g.add_keep_tautology(lits);
    }
    g
}

/// `(F, G)` with the variable classification shared by both.
#[derive(Debug, Clone)]
pub struct PairFormula {
    pub f: Cnf,
    pub g: Cnf,
    pub vars: VarTable,
    pub loop_atoms: Vec<AtomId>,
}

impl PairFormula {
    pub fn n_original(&self) -> usize {
        self.vars.n_original()
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn copy_vars(&self) -> Vec<Var> {
        self.vars.vars_of(VarClass::Copy).collect()
    }

    pub fn is_tight(&self) -> bool {
        self.loop_atoms.is_empty()
    }

    /// Clauses of `F` followed by those of `G`.
    pub fn combined(&self) -> impl Iterator<Item = &Clause> {
        self.f.clauses().iter().chain(self.g.clauses())
    }
}

pub fn build_pair(program: &Program) -> PairFormula {
    let (_, info) = analyze(program);
    let (f, mut vars) = clark_completion(program);
    let g = copy_operation(program, &info, &mut vars);
    PairFormula {
        f,
        g,
        vars,
        loop_atoms: info.loop_atoms,
    }
}

/// DIMACS text of `F ∧ G`. Variable classes are declared in leading comment
/// lines (`c orig`, `c aux`, `c copy`), each omitted when its class is empty.
pub fn emit_dimacs(pair: &PairFormula) -> String {
    let mut out = String::new();
    for (tag, class) in [
        ("orig", VarClass::Original),
        ("aux", VarClass::BodyAux),
        ("copy", VarClass::Copy),
    ] {
        let ids: Vec<String> = pair
            .vars
            .vars_of(class)
            .map(|v| (v.0 + 1).to_string())
            .collect();
        if !ids.is_empty() {
            let _ = writeln!(out, "c {tag} {}", ids.join(" "));
        }
    }
    let _ = writeln!(
        out,
        "p cnf {} {}",
        pair.n_vars(),
        pair.f.len() + pair.g.len()
    );
    for c in pair.combined() {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}
