//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails. Thresholds are fixed in the constants below.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use aspcount::bench::{
    gen_choice_chain, gen_hamiltonian, gen_random_program, gen_reachability, Graph,
    RandomProgramParams,
};
use aspcount::encode::{Clause, Lit, PairFormula, Var};
use aspcount::engine::{self, count_assuming, count_with, hybrid_count, EngineConfig, HybridPath};
use aspcount::oracle::{
    atom_assignment, brute_force_count, copy_residual_is_empty, extends_to_model, is_answer_set,
    residual, Interpretation, DEFAULT_ATOM_CAP,
};
use aspcount::report::REPORT_KEYS;
use aspcount::{analyze, build_pair, parse_program, BigCount, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str =
    "a :- not b.\nb :- not a.\nc :- a, b.\nc :- d.\nd :- a.\nd :- b, c.\ne :- not a, not b.\n";

const EXAMPLE_TIME: Duration = Duration::from_secs(1);
const EQUIV_PROGRAMS: u64 = 500;
const EQUIV_MIN_NON_TIGHT: f64 = 0.30;
const EQUIV_TIME: Duration = Duration::from_secs(300);
const ORACLE_PROGRAMS: u64 = 1000;
const ORACLE_TIME: Duration = Duration::from_secs(600);
const SPLIT_PAIRS: u64 = 100;
const UNION_PAIRS: u64 = 100;
const CHAIN_LEN: usize = 30;
const CHAIN_TIME: Duration = Duration::from_secs(1);
const CHAIN_CACHE_BYTES: usize = 64 << 20;
const HYBRID_THRESHOLD: u64 = 100_000;
const HAMILTONIAN_TIME: Duration = Duration::from_secs(5);
const RESIDUAL_TRIPLES: u64 = 200;

const EQUIV_SEED: u64 = 0;
const ORACLE_SEED: u64 = 1_000_000;
const SPLIT_SEED: u64 = 2_000_000;
const UNION_SEED: u64 = 3_000_000;
const RESIDUAL_SEED: u64 = 4_000_000;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn params() -> RandomProgramParams {
    RandomProgramParams::default()
}

fn count(pair: &PairFormula) -> BigCount {
    engine::count(pair)
        .expect("no resource limit in acceptance runs")
        .0
}

fn clause(lits: &[Lit]) -> Clause {
    let mut c = lits.to_vec();
    c.sort();
    c
}

fn f_holds(pair: &PairFormula, tau: &[Option<bool>]) -> bool {
    residual(pair.f.clauses(), tau).iter().all(|c| c.len() == 1)
}

fn example_fidelity() -> Outcome {
    let start = Instant::now();
    let p = parse_program(EXAMPLE).unwrap();
    let pair = build_pair(&p);
    let id = |s: &str| p.atoms().lookup(s).unwrap();
    let v = |s: &str| Var(id(s).0);
    let cp = |s: &str| pair.vars.copy_var(id(s)).unwrap();

    let (_, info) = analyze(&p);
    let loops: BTreeSet<&str> = info.loop_atoms.iter().map(|&a| p.name(a)).collect();
    let loops_ok = loops == BTreeSet::from(["c", "d"]);

    let expected: BTreeSet<Clause> = [
        clause(&[cp("c").neg(), v("c").pos()]),
        clause(&[cp("d").neg(), v("d").pos()]),
        clause(&[v("a").neg(), v("b").neg(), cp("c").pos()]),
        clause(&[cp("d").neg(), cp("c").pos()]),
        clause(&[v("a").neg(), cp("d").pos()]),
        clause(&[v("b").neg(), cp("c").neg(), cp("d").pos()]),
    ]
    .into_iter()
    .collect();
    let actual: BTreeSet<Clause> = pair.g.clauses().iter().map(|c| clause(c)).collect();
    let g_ok = actual == expected && pair.g.len() == 6;

    let tau = |atoms: &[&str]| {
        let m = Interpretation::from_atoms(p.num_atoms(), atoms.iter().map(|&s| id(s)));
        atom_assignment(&pair.vars, &m)
    };
    let g = pair.g.clauses();
    let t1 = copy_residual_is_empty(g, &tau(&["b"]), &pair.vars);
    let t2 = copy_residual_is_empty(g, &tau(&["a", "c", "d"]), &pair.vars);
    let t3 = copy_residual_is_empty(g, &tau(&["b", "c", "d"]), &pair.vars);
    let n = count(&pair);
    let oracle = brute_force_count(&p).unwrap();
    let elapsed = start.elapsed();
    let pass = loops_ok
        && g_ok
        && t1
        && t2
        && !t3
        && n == 2u32.into()
        && oracle == n
        && elapsed < EXAMPLE_TIME;
    outcome(
        pass,
        format!(
            "loops={loops:?} copy_clauses_match={g_ok} tau1_empty={t1} tau2_empty={t2} tau3_empty={t3} \
             count={n} oracle={oracle} time={elapsed:.2?}"
        ),
    )
}

fn equivalence_suite() -> Outcome {
    let start = Instant::now();
    let (mut non_tight, mut checked, mut mismatches, mut aux_checked) = (0u64, 0u64, 0u64, 0u64);
    for seed in EQUIV_SEED..EQUIV_SEED + EQUIV_PROGRAMS {
        let p = gen_random_program(seed, &params());
        let pair = build_pair(&p);
        if !pair.is_tight() {
            non_tight += 1;
        }
        let n = p.num_atoms();
        let n_aux = pair.n_vars() - n - pair.copy_vars().len();
        for bits in 0..1u64 << n {
            let m = Interpretation::from_bits(n, bits);
            let tau = atom_assignment(&pair.vars, &m);
            let models_f = f_holds(&pair, &tau);
            if n_aux <= 8 {
                aux_checked += 1;
                if extends_to_model(pair.f.clauses(), &tau) != models_f {
                    mismatches += 1;
                }
            }
            let lhs = models_f && copy_residual_is_empty(pair.g.clauses(), &tau, &pair.vars);
            if lhs != is_answer_set(&p, &m) {
                mismatches += 1;
            }
            checked += 1;
        }
    }
    let frac = non_tight as f64 / EQUIV_PROGRAMS as f64;
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && frac >= EQUIV_MIN_NON_TIGHT && elapsed < EQUIV_TIME,
        format!(
            "programs={EQUIV_PROGRAMS} non_tight={:.1}% assignments={checked} \
             (exhaustive aux check on {aux_checked}) mismatches={mismatches} time={elapsed:.2?}",
            100.0 * frac
        ),
    )
}

fn small_generator_instances() -> Vec<(String, Program)> {
    let mut out = Vec::new();
    for n in 0..=12 {
        out.push((format!("chain({n})"), gen_choice_chain(n)));
    }
    let mut graphs = vec![
        ("cycle(2)".to_owned(), Graph::cycle(2)),
        ("cycle(3)".to_owned(), Graph::cycle(3)),
        ("cycle(4)".to_owned(), Graph::cycle(4)),
        ("complete(3)".to_owned(), Graph::complete(3)),
    ];
    for seed in 0..40 {
        let n = 3 + (seed as usize % 6);
        graphs.push((format!("random({n},{seed})"), Graph::random(n, 0.35, seed)));
    }
    for (name, g) in &graphs {
        out.push((format!("hamiltonian {name}"), gen_hamiltonian(g)));
        let t = g.n_nodes() - 1;
        out.push((format!("reach {name} 0->{t}"), gen_reachability(g, 0, t)));
    }
    out.retain(|(_, p)| p.num_atoms() <= DEFAULT_ATOM_CAP);
    out
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut wrong = Vec::new();
    for seed in ORACLE_SEED..ORACLE_SEED + ORACLE_PROGRAMS {
        let p = gen_random_program(seed, &params());
        if count(&build_pair(&p)) != brute_force_count(&p).unwrap() {
            wrong.push(format!("seed {seed}"));
        }
    }
    let instances = small_generator_instances();
    let mut non_tight = 0;
    for (name, p) in &instances {
        let pair = build_pair(p);
        non_tight += usize::from(!pair.is_tight());
        if count(&pair) != brute_force_count(p).unwrap() {
            wrong.push(name.clone());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        wrong.is_empty() && elapsed < ORACLE_TIME,
        format!(
            "random={ORACLE_PROGRAMS} generator_instances={} (non-tight {non_tight}) mismatches={} {} time={elapsed:.2?}",
            instances.len(),
            wrong.len(),
            wrong.join(", ")
        ),
    )
}

fn determinism_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut bad = 0;
    for i in 0..SPLIT_PAIRS {
        let p = gen_random_program(SPLIT_SEED + i, &params());
        let pair = build_pair(&p);
        let x = Var(rng.gen_range(0..p.num_atoms() as u32));
        let cfg = EngineConfig::default;
        let whole = count(&pair);
        let pos = count_assuming(&pair, &[x.pos()], cfg()).unwrap().0;
        let neg = count_assuming(&pair, &[x.neg()], cfg()).unwrap().0;
        if whole != pos + neg {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("pairs={SPLIT_PAIRS} violations={bad}"))
}

fn decomposition_identity() -> Outcome {
    let mut bad = 0;
    let mut nonzero = 0;
    for i in 0..UNION_PAIRS {
        let p1 = gen_random_program(UNION_SEED + 2 * i, &params());
        let p2 = gen_random_program(UNION_SEED + 2 * i + 1, &params());
        let joint = p1.disjoint_union(&p2, "_r");
        let (c1, c2) = (count(&build_pair(&p1)), count(&build_pair(&p2)));
        let c = count(&build_pair(&joint));
        if c != &c1 * &c2 {
            bad += 1;
        }
        nonzero += usize::from(c != BigCount::from(0u32));
    }
    outcome(
        bad == 0,
        format!("pairs={UNION_PAIRS} (non-zero products {nonzero}) violations={bad}"),
    )
}

/// Reachability over a 12-node graph: a ring plus chords.
fn reach_block() -> Program {
    let mut g = Graph::cycle(12);
    for (u, v) in [
        (0, 5),
        (1, 4),
        (2, 9),
        (3, 7),
        (4, 1),
        (5, 10),
        (6, 2),
        (7, 11),
        (8, 3),
        (9, 6),
        (10, 8),
        (11, 5),
    ] {
        g.add_edge(u, v);
    }
    gen_reachability(&g, 0, 7)
}

fn cache_transparency() -> Outcome {
    let mut diffs = 0;
    let no_cache = EngineConfig {
        use_cache: false,
        ..EngineConfig::default()
    };
    for seed in ORACLE_SEED..ORACLE_SEED + ORACLE_PROGRAMS {
        let pair = build_pair(&gen_random_program(seed, &params()));
        if count(&pair) != count_with(&pair, no_cache.clone()).unwrap().0 {
            diffs += 1;
        }
    }
    let block = reach_block();
    let doubled = block.disjoint_union(&block, "_dup");
    let pair = build_pair(&doubled);
    let (with, stats) = engine::count(&pair).unwrap();
    let (without, _) = count_with(&pair, no_cache).unwrap();
    let single = count(&build_pair(&block));
    let pass =
        diffs == 0 && with == without && with == &single * &single && stats.cache_hit_pct() > 0.0;
    outcome(
        pass,
        format!(
            "random={ORACLE_PROGRAMS} differences={diffs}; duplicated reachability block: count={with} \
             no_cache={without} hits={}/{} ({:.1}%)",
            stats.cache_hits,
            stats.cache_lookups,
            stats.cache_hit_pct()
        ),
    )
}

fn scaling_smoke() -> Outcome {
    let p = gen_choice_chain(CHAIN_LEN);
    let start = Instant::now();
    let pair = build_pair(&p);
    let cfg = EngineConfig {
        cache_limit_bytes: CHAIN_CACHE_BYTES,
        ..EngineConfig::default()
    };
    let (n, stats) = count_with(&pair, cfg.clone()).unwrap();
    let elapsed = start.elapsed();
    let expected = BigCount::from(1u64 << CHAIN_LEN);
    let h = hybrid_count(&pair, HYBRID_THRESHOLD, None, cfg).unwrap();
    let decisions_bound = 2 * CHAIN_LEN as u64;
    let pass = n == expected
        && elapsed < CHAIN_TIME
        && stats.peak_cache_bytes <= CHAIN_CACHE_BYTES as u64
        && stats.decisions <= decisions_bound
        && h.path == HybridPath::Counting
        && h.count == expected;
    outcome(
        pass,
        format!(
            "count={n} time={elapsed:.2?} decisions={} (bound {decisions_bound}) peak_cache={}B hybrid_path={:?} hybrid_count={}",
            stats.decisions, stats.peak_cache_bytes, h.path, h.count
        ),
    )
}

/// Directed Hamiltonian cycles counted over node orderings starting at 0.
fn hamiltonian_cycles(g: &Graph) -> u64 {
    fn extend(g: &Graph, path: &mut Vec<usize>, used: &mut [bool]) -> u64 {
        let n = g.n_nodes();
        let last = *path.last().unwrap();
        if path.len() == n {
            return u64::from(g.has_edge(last, path[0]));
        }
        let mut total = 0;
        for v in 0..n {
            if !used[v] && g.has_edge(last, v) {
                used[v] = true;
                path.push(v);
                total += extend(g, path, used);
                path.pop();
                used[v] = false;
            }
        }
        total
    }
    let mut used = vec![false; g.n_nodes()];
    used[0] = true;
    extend(g, &mut vec![0], &mut used)
}

fn hamiltonian_sanity() -> Outcome {
    let start = Instant::now();
    let k4 = Graph::complete(4);
    let c3 = Graph::cycle(3);
    let (k4_count, c3_count) = (
        count(&build_pair(&gen_hamiltonian(&k4))),
        count(&build_pair(&gen_hamiltonian(&c3))),
    );
    let (k4_brute, c3_brute) = (hamiltonian_cycles(&k4), hamiltonian_cycles(&c3));
    let elapsed = start.elapsed();
    let pass = k4_count == 6u32.into()
        && c3_count == 1u32.into()
        && k4_count == k4_brute.into()
        && c3_count == c3_brute.into()
        && elapsed < HAMILTONIAN_TIME;
    outcome(
        pass,
        format!("K4={k4_count} (graph brute force {k4_brute}) 3-cycle={c3_count} (graph brute force {c3_brute}) time={elapsed:.2?}"),
    )
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = aspcount::cli::run(args.iter().copied(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn metrics_emitted() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let example = dir.path().join("example.lp");
    std::fs::write(&example, EXAMPLE).unwrap();
    let level0 = dir.path().join("level0.lp");
    std::fs::write(&level0, "a.\nb :- a.\nc :- b, not d.\nd :- not c, e.\n").unwrap();
    let chain = dir.path().join("chain.lp");
    std::fs::write(&chain, aspcount::render_program(&gen_choice_chain(12))).unwrap();

    let mut missing = Vec::new();
    let mut runs = 0;
    let mut level0_decisions = None;
    for (mode, file) in [
        ("count", &example),
        ("enumerate", &example),
        ("hybrid", &example),
        ("hybrid", &chain),
        ("oracle", &example),
        ("count", &level0),
    ] {
        let path = file.to_str().unwrap();
        let args = match mode {
            "hybrid" => vec![
                "aspcount",
                "--stats",
                "json",
                mode,
                path,
                "--threshold",
                "100",
            ],
            _ => vec!["aspcount", "--stats", "json", mode, path],
        };
        let (code, _, err) = run_cli(&args);
        runs += 1;
        let json: serde_json::Value = match serde_json::from_str(err.trim()) {
            Ok(v) if code == 0 => v,
            _ => {
                missing.push(format!("{mode} {path}: exit {code}"));
                continue;
            }
        };
        for key in REPORT_KEYS {
            if json.get(key).is_none() {
                missing.push(format!("{mode}: {key}"));
            }
        }
        if file == &level0 {
            level0_decisions = json["decisions"].as_u64();
        }
    }

    // every random program whose residual is empty after level-0 propagation
    let mut solved_at_root = 0;
    let mut root_decisions = 0;
    for seed in 0..500 {
        let pair = build_pair(&gen_random_program(seed, &params()));
        let mut eng = engine::Engine::new(&pair, EngineConfig::default());
        let root_empty = match eng.propagate_literals(&[]) {
            Err(_) => true,
            Ok(()) => eng.root_component().clauses.is_empty(),
        };
        if root_empty {
            solved_at_root += 1;
            root_decisions += eng.stats().decisions;
            eng.count().unwrap();
            root_decisions += eng.stats().decisions;
        }
    }
    let pass = missing.is_empty()
        && level0_decisions == Some(0)
        && root_decisions == 0
        && solved_at_root > 0;
    outcome(
        pass,
        format!(
            "cli_runs={runs} missing_keys={missing:?} level0_fixture_decisions={level0_decisions:?} \
             random_solved_at_level0={solved_at_root} their_decisions={root_decisions}"
        ),
    )
}

fn random_partial(
    rng: &mut ChaCha8Rng,
    n_atoms: usize,
    n_vars: usize,
    density: f64,
) -> Vec<Option<bool>> {
    let mut tau = vec![None; n_vars];
    for t in tau.iter_mut().take(n_atoms) {
        if rng.gen_bool(density) {
            *t = Some(rng.gen_bool(0.5));
        }
    }
    tau
}

fn is_conflict(r: &[Clause]) -> bool {
    r.iter().any(|c| c.is_empty())
}

/// Triples are drawn until both assignments leave a clause set rather than a
/// conflict. Conflicting pairs are tallied on the side and reported. A third
/// of the triples repeat `tau1`, a third change one atom of a dense `tau1`,
/// and a third draw `tau2` independently.
fn conjunction_soundness() -> Outcome {
    const MAX_DRAWS: u64 = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(RESIDUAL_SEED);
    let (mut triples, mut program) = (0u64, RESIDUAL_SEED);
    let (mut equal_distinct, mut equal_identical, mut violations) = (0, 0, 0);
    let mut near_miss = 0;
    let (mut conflict_pairs, mut conflict_g_differs) = (0, 0);
    while triples < RESIDUAL_TRIPLES {
        let p = gen_random_program(program, &params());
        program += 1;
        let pair = build_pair(&p);
        let n = p.num_atoms();
        let all: Vec<Clause> = pair.combined().cloned().collect();
        let g_of = |t: &[Option<bool>]| residual(pair.g.clauses(), t);
        let mut draw = None;
        for _ in 0..MAX_DRAWS {
            let density = if triples % 3 == 1 { 0.9 } else { 0.3 };
            let t1 = random_partial(&mut rng, n, pair.n_vars(), density);
            let t2 = match triples % 3 {
                0 => t1.clone(),
                1 => {
                    let mut t = t1.clone();
                    let y = rng.gen_range(0..n);
                    t[y] = match t[y] {
                        Some(v) if rng.gen_bool(0.5) => Some(!v),
                        Some(_) => None,
                        None => Some(rng.gen_bool(0.5)),
                    };
                    t
                }
                _ => random_partial(&mut rng, n, pair.n_vars(), density),
            };
            let (j1, j2) = (residual(&all, &t1), residual(&all, &t2));
            if is_conflict(&j1) && is_conflict(&j2) {
                conflict_pairs += 1;
                conflict_g_differs += usize::from(g_of(&t1) != g_of(&t2));
                continue;
            }
            if !is_conflict(&j1) && !is_conflict(&j2) {
                draw = Some((t1, t2, j1 == j2));
                break;
            }
        }
        let Some((t1, t2, joint_equal)) = draw else {
            continue;
        };
        triples += 1;
        near_miss += usize::from(t1 != t2 && triples % 3 == 2);
        if !joint_equal {
            continue;
        }
        if t1 == t2 {
            equal_identical += 1;
        } else {
            equal_distinct += 1;
        }
        let f_same = residual(pair.f.clauses(), &t1) == residual(pair.f.clauses(), &t2);
        if !(f_same && g_of(&t1) == g_of(&t2)) {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && equal_identical + equal_distinct > 0,
        format!(
            "triples={triples} (one-atom perturbations {near_miss}) equal_joint_residuals: distinct_tau={equal_distinct} identical_tau={equal_identical} \
             violations={violations}; set aside: both-conflicting pairs={conflict_pairs} \
             (G residuals differ in {conflict_g_differs})"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("example fidelity", example_fidelity),
        ("alternative definition equivalence", equivalence_suite),
        ("oracle count equivalence", oracle_equivalence),
        ("determinism identity", determinism_identity),
        ("decomposition identity", decomposition_identity),
        ("cache transparency", cache_transparency),
        ("scaling smoke test", scaling_smoke),
        ("hamiltonian sanity", hamiltonian_sanity),
        ("metrics emitted", metrics_emitted),
        ("conjunction soundness", conjunction_soundness),
    ];
    let failed = engine::with_large_stack(|| {
        let mut failed = 0;
        for (i, (name, run)) in criteria.iter().enumerate() {
            let o = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                outcome(false, format!("panicked: {msg}"))
            });
            let tag = if o.pass { "PASS" } else { "FAIL" };
            println!("criterion {:>2} [{tag}] {name}: {}", i + 1, o.detail);
            failed += usize::from(!o.pass);
        }
        failed
    });
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
