//! Component-caching answer-set counter over `F ∧ G`.
//!
//! The search is a plain exact model counter (decide, propagate, split into
//! variable-disjoint components, cache component counts) with two changes:
//! copy variables are never decided, and a residual component made only of
//! copy variables counts zero. Free copy variables contribute a factor of 1
//! and free non-copy variables a factor of 2.

mod cache;
mod stats;

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encode::{Lit, PairFormula, Var};
use cache::ComponentCache;
pub use stats::RunStats;

pub const DEFAULT_CACHE_LIMIT_BYTES: usize = 1 << 30;
pub const DEFAULT_HYBRID_THRESHOLD: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub use_cache: bool,
    pub cache_limit_bytes: usize,
    pub deadline: Option<Instant>,
    /// Randomized tie-breaking among equally scored decision candidates.
    pub seed: Option<u64>,
    /// Keep every decision literal in [`Engine::decision_log`].
    pub log_decisions: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            use_cache: true,
            cache_limit_bytes: DEFAULT_CACHE_LIMIT_BYTES,
            deadline: None,
            seed: None,
            log_decisions: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Budget,
    Cache,
}

/// A resource limit was hit; `stats` covers the work done up to that point.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{}", match .kind {
    LimitKind::Budget => "time budget exhausted",
    LimitKind::Cache => "component cache limit exceeded",
})]
pub struct ResourceLimit {
    pub kind: LimitKind,
    pub stats: RunStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    Decision,
    Propagation,
    Assumption,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailEntry {
    pub lit: Lit,
    pub level: u32,
    pub reason: Reason,
}

/// Index of a clause in the combined `F ∧ G` list.
pub type ClauseId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict(pub ClauseId);

/// Unassigned variables plus the residual clauses that connect them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Component {
    pub vars: Vec<Var>,
    pub clauses: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub components: Vec<Component>,
    /// Unassigned variables in no residual clause.
    pub free_vars: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enumeration {
    ExactCount(BigUint),
    Exceeded(Duration),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridPath {
    Enumeration,
    Counting,
}

pub struct Engine<'p> {
    pair: &'p PairFormula,
    cfg: EngineConfig,
    clauses: Vec<Vec<Lit>>,
    is_copy: Vec<bool>,
    value: Vec<Option<bool>>,
    trail: Vec<TrailEntry>,
    qhead: usize,
    level: u32,
    watches: Vec<Vec<ClauseId>>,
    occurs: Vec<Vec<ClauseId>>,
    root_conflict: bool,
    var_mark: Vec<u32>,
    clause_scope: Vec<u32>,
    clause_seen: Vec<u32>,
    stamp: u32,
    score: Vec<u32>,
    cache: ComponentCache,
    stats: RunStats,
    rng: Option<ChaCha8Rng>,
    decision_log: Vec<Lit>,
}

enum Stop {
    Limit(LimitKind),
    Enough,
}

impl<'p> Engine<'p> {
    pub fn new(pair: &'p PairFormula, cfg: EngineConfig) -> Self {
        let n = pair.n_vars();
        let clauses: Vec<Vec<Lit>> = pair.combined().cloned().collect();
        let mut eng = Engine {
            pair,
            is_copy: (0..n).map(|i| pair.vars.is_copy(Var(i as u32))).collect(),
            value: vec![None; n],
            trail: Vec::with_capacity(n),
            qhead: 0,
            level: 0,
            watches: vec![Vec::new(); 2 * n],
            occurs: vec![Vec::new(); n],
            root_conflict: false,
            var_mark: vec![0; n],
            clause_scope: vec![0; clauses.len()],
            clause_seen: vec![0; clauses.len()],
            stamp: 0,
            score: vec![0; n],
            cache: ComponentCache::new(cfg.cache_limit_bytes),
            stats: RunStats::default(),
            rng: cfg.seed.map(ChaCha8Rng::seed_from_u64),
            decision_log: Vec::new(),
            cfg,
            clauses,
        };
        for (ci, c) in eng.clauses.iter().enumerate() {
            let ci = ci as ClauseId;
            let mut last = None;
            for l in c {
                if last != Some(l.var()) {
                    eng.occurs[l.var().index()].push(ci);
                }
                last = Some(l.var());
            }
            if c.len() >= 2 {
                eng.watches[c[0].code()].push(ci);
                eng.watches[c[1].code()].push(ci);
            }
        }
        for ci in 0..eng.clauses.len() {
            let unit = match eng.clauses[ci].as_slice() {
                [] => {
                    eng.root_conflict = true;
                    continue;
                }
                &[l] => l,
                _ => continue,
            };
            if !eng.enqueue(unit, Reason::Assumption) {
                eng.root_conflict = true;
            }
        }
        eng
    }

    pub fn pair(&self) -> &PairFormula {
        self.pair
    }

    pub fn stats(&self) -> &RunStats {
        &self.stats
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    pub fn decision_log(&self) -> &[Lit] {
        &self.decision_log
    }

    pub fn value(&self, v: Var) -> Option<bool> {
        self.value[v.index()]
    }

    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var().index()].map(|v| l.eval(v))
    }

    pub fn clause(&self, ci: ClauseId) -> &[Lit] {
        &self.clauses[ci as usize]
    }

    pub fn is_copy(&self, v: Var) -> bool {
        self.is_copy[v.index()]
    }

    /// Surviving literals of a clause, sorted; `None` if it is satisfied.
    pub fn residual_clause(&self, ci: ClauseId) -> Option<Vec<Lit>> {
        let c = &self.clauses[ci as usize];
        if c.iter().any(|&l| self.lit_value(l) == Some(true)) {
            return None;
        }
        let mut open: Vec<Lit> = c
            .iter()
            .copied()
            .filter(|&l| self.lit_value(l).is_none())
            .collect();
        open.sort_unstable();
        Some(open)
    }

    /// Asserts a literal at level 0 before counting.
    pub fn assume(&mut self, l: Lit) -> Result<(), Conflict> {
        assert_eq!(self.level, 0, "assumptions are only allowed at level 0");
        if self.root_conflict {
            return Err(Conflict(0));
        }
        self.propagate_literals(&[l])
            .inspect_err(|_| self.root_conflict = true)
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) -> bool {
        match self.lit_value(l) {
            Some(v) => v,
            None => {
                self.value[l.var().index()] = Some(l.is_positive());
                self.trail.push(TrailEntry {
                    lit: l,
                    level: self.level,
                    reason,
                });
                true
            }
        }
    }

    /// Assigns `pending` (as propagation-level facts of the current level)
    /// and runs unit propagation to fixpoint.
    pub fn propagate_literals(&mut self, pending: &[Lit]) -> Result<(), Conflict> {
        let reason = if self.level == 0 {
            Reason::Assumption
        } else {
            Reason::Propagation
        };
        for &l in pending {
            if !self.enqueue(l, reason) {
                return Err(Conflict(u32::MAX));
            }
        }
        self.propagate()
    }

    /// Two-watched-literal unit propagation over the whole clause list.
    fn propagate(&mut self) -> Result<(), Conflict> {
        let start = Instant::now();
        let mut result = Ok(());
        'outer: while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead].lit;
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let val =
                    |l: Lit, value: &[Option<bool>]| value[l.var().index()].map(|v| l.eval(v));
                if val(first, &self.value) == Some(true) {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    if val(c[k], &self.value) != Some(false) {
                        c.swap(1, k);
                        self.watches[c[1].code()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                match val(first, &self.value) {
                    Some(false) => {
                        while i < ws.len() {
                            ws[j] = ws[i];
                            i += 1;
                            j += 1;
                        }
                        ws.truncate(j);
                        self.watches[false_lit.code()] = ws;
                        result = Err(Conflict(ci));
                        break 'outer;
                    }
                    _ => {
                        self.stats.propagations += 1;
                        self.value[first.var().index()] = Some(first.is_positive());
                        self.trail.push(TrailEntry {
                            lit: first,
                            level: self.level,
                            reason: Reason::Propagation,
                        });
                    }
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
        }
        self.stats.bcp_time += start.elapsed();
        result
    }

    fn backtrack(&mut self, mark: usize) {
        for e in self.trail.drain(mark..) {
            self.value[e.lit.var().index()] = None;
        }
        self.qhead = mark;
    }

    fn decide_lit(&mut self, l: Lit) -> Result<(), Conflict> {
        debug_assert!(!self.is_copy(l.var()), "copy variables are never decided");
        self.level += 1;
        self.stats.decisions += 1;
        if self.cfg.log_decisions {
            self.decision_log.push(l);
        }
        self.enqueue(l, Reason::Decision);
        self.propagate()
    }

    fn check_deadline(&self) -> Result<(), Stop> {
        match self.cfg.deadline {
            Some(d) if Instant::now() >= d => Err(Stop::Limit(LimitKind::Budget)),
            _ => Ok(()),
        }
    }

    fn limit_error(&self, kind: LimitKind) -> ResourceLimit {
        ResourceLimit {
            kind,
            stats: self.snapshot_stats(),
        }
    }

    fn snapshot_stats(&self) -> RunStats {
        let mut s = self.stats.clone();
        s.cache_entries = self.cache.len() as u64;
        s.peak_cache_bytes = self.cache.peak_bytes() as u64;
        s
    }

    /// All unassigned variables and all residual clauses.
    pub fn root_component(&self) -> Component {
        Component {
            vars: (0..self.value.len() as u32)
                .map(Var)
                .filter(|&v| self.value(v).is_none())
                .collect(),
            clauses: (0..self.clauses.len() as ClauseId)
                .filter(|&ci| self.residual_clause(ci).is_some())
                .collect(),
        }
    }

    /// Highest residual-occurrence count among unassigned non-copy
    /// variables, smallest index on ties (or a seeded random pick among ties).
    pub fn decide(&mut self, comp: &Component) -> Option<Var> {
        for &ci in &comp.clauses {
            let c = &self.clauses[ci as usize];
            if c.iter()
                .any(|&l| self.value[l.var().index()].map(|v| l.eval(v)) == Some(true))
            {
                continue;
            }
            for &l in c {
                if self.value[l.var().index()].is_none() {
                    self.score[l.var().index()] += 1;
                }
            }
        }
        let mut best: Option<(u32, Var)> = None;
        let mut ties = 0u32;
        for &v in &comp.vars {
            let s = std::mem::take(&mut self.score[v.index()]);
            if self.is_copy(v) || self.value(v).is_some() {
                continue;
            }
            match best {
                Some((bs, _)) if s < bs => {}
                Some((bs, _)) if s == bs => {
                    if let Some(rng) = self.rng.as_mut() {
                        ties += 1;
                        if rng.gen_range(0..=ties) == 0 {
                            best = Some((s, v));
                        }
                    }
                }
                _ => {
                    best = Some((s, v));
                    ties = 0;
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// Connected components of the unassigned variables of `comp`, linked
    /// by co-occurrence in a residual clause of `comp`.
    pub fn decompose(&mut self, comp: &Component) -> Decomposition {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.var_mark.fill(0);
            self.clause_scope.fill(0);
            self.clause_seen.fill(0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        for &ci in &comp.clauses {
            self.clause_scope[ci as usize] = stamp;
        }
        let mut out = Decomposition::default();
        let mut queue: Vec<Var> = Vec::new();
        for &root in &comp.vars {
            if self.value(root).is_some() || self.var_mark[root.index()] == stamp {
                continue;
            }
            self.var_mark[root.index()] = stamp;
            queue.push(root);
            let mut vars = Vec::new();
            let mut clauses = Vec::new();
            while let Some(x) = queue.pop() {
                vars.push(x);
                for &ci in &self.occurs[x.index()] {
                    let cu = ci as usize;
                    if self.clause_scope[cu] != stamp || self.clause_seen[cu] == stamp {
                        continue;
                    }
                    self.clause_seen[cu] = stamp;
                    let c = &self.clauses[cu];
                    if c.iter()
                        .any(|&l| self.value[l.var().index()].map(|v| l.eval(v)) == Some(true))
                    {
                        continue;
                    }
                    clauses.push(ci);
                    for &l in c {
                        let y = l.var();
                        if self.value[y.index()].is_none() && self.var_mark[y.index()] != stamp {
                            self.var_mark[y.index()] = stamp;
                            queue.push(y);
                        }
                    }
                }
            }
            if clauses.is_empty() {
                out.free_vars.extend(vars);
            } else {
                vars.sort_unstable();
                clauses.sort_unstable();
                out.components.push(Component { vars, clauses });
            }
        }
        out
    }

    /// Canonical key: sorted variable ids, then the sorted list of each
    /// residual clause's surviving literal codes.
    fn cache_key(&self, comp: &Component) -> Box<[u8]> {
        const SEP: u32 = u32::MAX;
        let mut lits: Vec<Vec<u32>> = comp
            .clauses
            .iter()
            .filter_map(|&ci| self.residual_clause(ci))
            .map(|c| c.into_iter().map(|l| l.code() as u32).collect())
            .collect();
        lits.sort_unstable();
        let words = comp.vars.len() + 1 + lits.iter().map(|c| c.len() + 1).sum::<usize>();
        let mut key = Vec::with_capacity(words * 4);
        for v in &comp.vars {
            key.extend_from_slice(&v.0.to_le_bytes());
        }
        key.extend_from_slice(&SEP.to_le_bytes());
        for c in lits {
            for code in c {
                key.extend_from_slice(&code.to_le_bytes());
            }
            key.extend_from_slice(&SEP.to_le_bytes());
        }
        key.into_boxed_slice()
    }

    fn free_factor(&self, free: &[Var]) -> BigUint {
        let n = free.iter().filter(|&&v| !self.is_copy(v)).count();
        BigUint::one() << n
    }

    /// Number of assignments to the non-copy variables of `comp` that
    /// satisfy its `F` part and leave no `G` residue.
    pub fn count_component(&mut self, comp: &Component) -> Result<BigUint, ResourceLimit> {
        self.count_rec(comp).map_err(|s| match s {
            Stop::Limit(k) => self.limit_error(k),
            Stop::Enough => unreachable!("counting never stops early"),
        })
    }

    fn count_rec(&mut self, comp: &Component) -> Result<BigUint, Stop> {
        self.check_deadline()?;
        if comp.clauses.is_empty() {
            return Ok(self.free_factor(&comp.vars));
        }
        if comp.vars.iter().all(|&v| self.is_copy(v)) {
            return Ok(BigUint::zero());
        }
        let key = if self.cfg.use_cache {
            let key = self.cache_key(comp);
            self.stats.cache_lookups += 1;
            if let Some(hit) = self.cache.get(&key) {
                self.stats.cache_hits += 1;
                return Ok(hit.clone());
            }
            Some(key)
        } else {
            None
        };
        let v = self
            .decide(comp)
            .expect("component with a non-copy variable has a decision candidate");
        let mut total = BigUint::zero();
        for lit in [v.pos(), v.neg()] {
            let mark = self.trail.len();
            let branch = match self.decide_lit(lit) {
                Err(_) => Ok(BigUint::zero()),
                Ok(()) => self.count_branch(comp),
            };
            self.backtrack(mark);
            self.level -= 1;
            total += branch?;
        }
        if let Some(key) = key {
            self.cache
                .insert(key, total.clone())
                .map_err(|_| Stop::Limit(LimitKind::Cache))?;
        }
        Ok(total)
    }

    fn count_branch(&mut self, comp: &Component) -> Result<BigUint, Stop> {
        let split = self.decompose(comp);
        let mut count = self.free_factor(&split.free_vars);
        for sub in &split.components {
            count *= self.count_rec(sub)?;
            if count.is_zero() {
                break;
            }
        }
        Ok(count)
    }

    /// Exact answer-set count of the pair under the current level-0 assignment.
    pub fn count(&mut self) -> Result<BigUint, ResourceLimit> {
        let out = self.count_top();
        self.stats.cache_entries = self.cache.len() as u64;
        self.stats.peak_cache_bytes = self.cache.peak_bytes() as u64;
        out
    }

    fn count_top(&mut self) -> Result<BigUint, ResourceLimit> {
        if self.root_conflict || self.propagate().is_err() {
            self.root_conflict = true;
            return Ok(BigUint::zero());
        }
        let root = self.root_component();
        self.count_branch(&root).map_err(|s| match s {
            Stop::Limit(k) => self.limit_error(k),
            Stop::Enough => unreachable!("counting never stops early"),
        })
    }

    /// Depth-first enumeration over non-copy variables without caching or
    /// decomposition. Stops as soon as `limit + 1` answer sets have been seen.
    pub fn enumerate_up_to(&mut self, limit: Option<u64>) -> Result<Enumeration, ResourceLimit> {
        let start = Instant::now();
        if self.root_conflict || self.propagate().is_err() {
            self.root_conflict = true;
            return Ok(Enumeration::ExactCount(BigUint::zero()));
        }
        let order: Vec<Var> = (0..self.value.len() as u32)
            .map(Var)
            .filter(|&v| !self.is_copy(v))
            .collect();
        let g_start = self.pair.f.len() as ClauseId;
        let mut found = 0u64;
        match self.enumerate_rec(&order, 0, g_start, &mut found, limit) {
            Ok(()) => Ok(Enumeration::ExactCount(BigUint::from(found))),
            Err(Stop::Enough) => Ok(Enumeration::Exceeded(start.elapsed())),
            Err(Stop::Limit(k)) => Err(self.limit_error(k)),
        }
    }

    fn enumerate_rec(
        &mut self,
        order: &[Var],
        mut next: usize,
        g_start: ClauseId,
        found: &mut u64,
        limit: Option<u64>,
    ) -> Result<(), Stop> {
        self.check_deadline()?;
        while next < order.len() && self.value(order[next]).is_some() {
            next += 1;
        }
        if next == order.len() {
            // F is fully decided; only unsupported copy variables can remain.
            let clean = (g_start..self.clauses.len() as ClauseId)
                .all(|ci| self.residual_clause(ci).is_none());
            if clean {
                *found += 1;
                if limit.is_some_and(|l| *found > l) {
                    return Err(Stop::Enough);
                }
            }
            return Ok(());
        }
        let v = order[next];
        for lit in [v.pos(), v.neg()] {
            let mark = self.trail.len();
            let r = match self.decide_lit(lit) {
                Ok(()) => self.enumerate_rec(order, next + 1, g_start, found, limit),
                Err(_) => Ok(()),
            };
            self.backtrack(mark);
            self.level -= 1;
            r?;
        }
        Ok(())
    }
}

/// Runs `f` on a thread with a large stack; the counter recurses once per
/// decision level.
pub fn with_large_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    const STACK: usize = 512 << 20;
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK)
            .spawn_scoped(s, f)
            .expect("spawn counting thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Answer-set count with default settings.
pub fn count(pair: &PairFormula) -> Result<(BigUint, RunStats), ResourceLimit> {
    count_with(pair, EngineConfig::default())
}

pub fn count_with(
    pair: &PairFormula,
    cfg: EngineConfig,
) -> Result<(BigUint, RunStats), ResourceLimit> {
    let mut eng = Engine::new(pair, cfg);
    let n = eng.count()?;
    Ok((n, eng.stats().clone()))
}

/// Count with `assumptions` asserted at level 0.
pub fn count_assuming(
    pair: &PairFormula,
    assumptions: &[Lit],
    cfg: EngineConfig,
) -> Result<(BigUint, RunStats), ResourceLimit> {
    let mut eng = Engine::new(pair, cfg);
    for &l in assumptions {
        if eng.assume(l).is_err() {
            return Ok((BigUint::zero(), eng.stats().clone()));
        }
    }
    let n = eng.count()?;
    Ok((n, eng.stats().clone()))
}

pub fn enumerate_up_to(
    pair: &PairFormula,
    limit: Option<u64>,
    cfg: EngineConfig,
) -> Result<(Enumeration, RunStats), ResourceLimit> {
    let mut eng = Engine::new(pair, cfg);
    let e = eng.enumerate_up_to(limit)?;
    Ok((e, eng.stats().clone()))
}

#[derive(Debug, Clone)]
pub struct HybridOutcome {
    pub count: BigUint,
    pub stats: RunStats,
    pub path: HybridPath,
}

/// Enumerates up to `threshold` answer sets; if there are more, counts with
/// whatever remains of `budget`. Stats of both phases are summed.
pub fn hybrid_count(
    pair: &PairFormula,
    threshold: u64,
    budget: Option<Duration>,
    cfg: EngineConfig,
) -> Result<HybridOutcome, ResourceLimit> {
    assert!(threshold >= 1, "hybrid threshold must be at least 1");
    let deadline = match (budget, cfg.deadline) {
        (Some(b), Some(d)) => Some(d.min(Instant::now() + b)),
        (Some(b), None) => Some(Instant::now() + b),
        (None, d) => d,
    };
    let cfg = EngineConfig { deadline, ..cfg };
    let (first, enum_stats) = enumerate_up_to(pair, Some(threshold), cfg.clone())?;
    match first {
        Enumeration::ExactCount(count) => Ok(HybridOutcome {
            count,
            stats: enum_stats,
            path: HybridPath::Enumeration,
        }),
        Enumeration::Exceeded(_) => {
            let mut total = enum_stats;
            match count_with(pair, cfg) {
                Ok((count, s)) => {
                    total += &s;
                    Ok(HybridOutcome {
                        count,
                        stats: total,
                        path: HybridPath::Counting,
                    })
                }
                Err(mut e) => {
                    total += &e.stats;
                    e.stats = total;
                    Err(e)
                }
            }
        }
    }
}
