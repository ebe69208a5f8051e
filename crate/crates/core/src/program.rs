//! Ground normal logic programs and their atom symbol table.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

/// Dense index of an interned atom symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Bidirectional map between atom symbols and contiguous ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: HashMap<String, AtomId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `symbol`, allocating the next contiguous id on first sight.
    pub fn intern(&mut self, symbol: &str) -> AtomId {
        if let Some(&id) = self.ids.get(symbol) {
            return id;
        }
        let id = AtomId(self.names.len() as u32);
        self.names.push(symbol.to_owned());
        self.ids.insert(symbol.to_owned(), id);
        id
    }

    pub fn lookup(&self, symbol: &str) -> Option<AtomId> {
        self.ids.get(symbol).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (AtomId(i as u32), n.as_str()))
    }
}

/// A rule body: positive and default-negated atoms, each kept sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Body {
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

impl Body {
    pub fn new(
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        let pos: BTreeSet<_> = pos.into_iter().collect();
        let neg: BTreeSet<_> = neg.into_iter().collect();
        Body {
            pos: pos.into_iter().collect(),
            neg: neg.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    /// True when some atom occurs both positively and negatively, so the body never holds.
    pub fn is_unsatisfiable(&self) -> bool {
        // both lists are sorted
        let (mut i, mut j) = (0, 0);
        while i < self.pos.len() && j < self.neg.len() {
            match self.pos[i].cmp(&self.neg[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Classical truth of the body under the set of true atoms.
    pub fn holds(&self, is_true: impl Fn(AtomId) -> bool) -> bool {
        self.pos.iter().all(|&a| is_true(a)) && self.neg.iter().all(|&a| !is_true(a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: AtomId,
    pub body: Body,
}

impl Rule {
    pub fn new(
        head: AtomId,
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        Rule {
            head,
            body: Body::new(pos, neg),
        }
    }

    pub fn fact(head: AtomId) -> Self {
        Rule {
            head,
            body: Body::default(),
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn is_body_unsatisfiable(&self) -> bool {
        self.body.is_unsatisfiable()
    }
}

/// Headless statement `:- body.`; violated whenever its body holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub body: Body,
}

impl Constraint {
    pub fn new(
        pos: impl IntoIterator<Item = AtomId>,
        neg: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        Constraint {
            body: Body::new(pos, neg),
        }
    }
}

/// A ground normal program. Rules and constraints are sets: inserting a
/// duplicate is a no-op.
#[derive(Debug, Clone, Default)]
pub struct Program {
    atoms: SymbolTable,
    rules: Vec<Rule>,
    constraints: Vec<Constraint>,
    seen_rules: HashSet<Rule>,
    seen_constraints: HashSet<Constraint>,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, symbol: &str) -> AtomId {
        self.atoms.intern(symbol)
    }

    /// Adds a rule; returns false if an identical rule was already present.
    pub fn add_rule(&mut self, rule: Rule) -> bool {
        self.check_ids(
            rule.body
                .pos
                .iter()
                .chain(&rule.body.neg)
                .chain([&rule.head]),
        );
        if !self.seen_rules.insert(rule.clone()) {
            return false;
        }
        self.rules.push(rule);
        true
    }

    pub fn add_constraint(&mut self, constraint: Constraint) -> bool {
        self.check_ids(constraint.body.pos.iter().chain(&constraint.body.neg));
        if !self.seen_constraints.insert(constraint.clone()) {
            return false;
        }
        self.constraints.push(constraint);
        true
    }

    fn check_ids<'a>(&self, ids: impl Iterator<Item = &'a AtomId>) {
        for id in ids {
            assert!(
                id.index() < self.atoms.len(),
                "atom id {} not in symbol table",
                id.0
            );
        }
    }

    /// Convenience for tests and generators: `rule("c", &["a", "b"], &["d"])`.
    pub fn rule(&mut self, head: &str, pos: &[&str], neg: &[&str]) -> bool {
        let head = self.intern(head);
        let pos: Vec<_> = pos.iter().map(|s| self.intern(s)).collect();
        let neg: Vec<_> = neg.iter().map(|s| self.intern(s)).collect();
        self.add_rule(Rule::new(head, pos, neg))
    }

    pub fn constraint(&mut self, pos: &[&str], neg: &[&str]) -> bool {
        let pos: Vec<_> = pos.iter().map(|s| self.intern(s)).collect();
        let neg: Vec<_> = neg.iter().map(|s| self.intern(s)).collect();
        self.add_constraint(Constraint::new(pos, neg))
    }

    pub fn atoms(&self) -> &SymbolTable {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn name(&self, id: AtomId) -> &str {
        self.atoms.name(id)
    }

    pub fn atom_ids(&self) -> impl Iterator<Item = AtomId> {
        (0..self.atoms.len() as u32).map(AtomId)
    }

    /// Rules grouped by head atom, indexed by `AtomId`.
    pub fn rules_by_head(&self) -> Vec<Vec<&Rule>> {
        let mut by_head = vec![Vec::new(); self.num_atoms()];
        for r in &self.rules {
            by_head[r.head.index()].push(r);
        }
        by_head
    }

    /// Checks the program for suspicious statements. Never modifies it.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, r) in self.rules.iter().enumerate() {
            if r.is_body_unsatisfiable() {
                out.push(Diagnostic::BodyUnsatisfiable { rule: i });
            }
        }
        let mut has_rule = vec![false; self.num_atoms()];
        for r in &self.rules {
            has_rule[r.head.index()] = true;
        }
        for (id, _) in self.atoms.iter() {
            if !has_rule[id.index()] {
                out.push(Diagnostic::NeverInHead { atom: id });
            }
        }
        // Duplicates are rejected on insertion; this only fires for programs
        // whose rule list was assembled some other way.
        let mut seen = HashSet::new();
        for (i, r) in self.rules.iter().enumerate() {
            if !seen.insert(r) {
                out.push(Diagnostic::DuplicateRule { rule: i });
            }
        }
        out
    }

    /// Disjoint union; atoms of `other` are renamed with `suffix` appended.
    pub fn disjoint_union(&self, other: &Program, suffix: &str) -> Program {
        let mut out = self.clone();
        let map: Vec<AtomId> = other
            .atoms
            .iter()
            .map(|(_, name)| out.intern(&format!("{name}{suffix}")))
            .collect();
        let m = |a: &AtomId| map[a.index()];
        for r in &other.rules {
            out.add_rule(Rule::new(
                m(&r.head),
                r.body.pos.iter().map(m),
                r.body.neg.iter().map(m),
            ));
        }
        for c in &other.constraints {
            out.add_constraint(Constraint::new(
                c.body.pos.iter().map(m),
                c.body.neg.iter().map(m),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    BodyUnsatisfiable { rule: usize },
    NeverInHead { atom: AtomId },
    DuplicateRule { rule: usize },
}

impl Diagnostic {
    pub fn describe(&self, program: &Program) -> String {
        match *self {
            Diagnostic::BodyUnsatisfiable { rule } => format!(
                "rule {} for `{}` has an atom both positive and negated in its body",
                rule + 1,
                program.name(program.rules()[rule].head)
            ),
            Diagnostic::NeverInHead { atom } => format!(
                "atom `{}` never occurs in a rule head and is always false",
                program.name(atom)
            ),
            Diagnostic::DuplicateRule { rule } => format!("rule {} is a duplicate", rule + 1),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::BodyUnsatisfiable { rule } => write!(f, "body-unsatisfiable rule #{rule}"),
            Diagnostic::NeverInHead { atom } => write!(f, "atom {} never in a head", atom.0),
            Diagnostic::DuplicateRule { rule } => write!(f, "duplicate rule #{rule}"),
        }
    }
}
