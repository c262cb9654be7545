//! End-to-end acceptance checks, one test per criterion. Each prints a
//! `criterion N: pass|fail` line straight to stdout, bypassing capture.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{arb_formula, goal_holds, quant_syms, trial, Gen};
use elfol::kb::KnowledgeBase;
use elfol::lexicon::{load_bundle, witness_model};
use elfol::model::{eval_formula, find_counterexample, model_satisfies, Env, ModelBounds};
use elfol::prover::{prove, validate, ProofStep, ProverConfig};
use elfol::quant::{verify_monotonicity, Monotonicity};
use elfol::reduce::{compare_effort, induced_model, ReductionContext, Reducer};
use elfol::syntax::{parse_formula, render};
use elfol::{Formula, QuantRegistry, QuantSym, Term};
use proptest::test_runner::{Config, TestRunner};

fn report(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} ({detail})\n", if ok { "pass" } else { "fail" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

const SIX: [&str; 7] = ["enter", "conj-drop", "majority", "correct", "correct-back", "compatible", "do"];

/// Proofs of the headline inferences, with their knowledge bases and timings.
fn headline_proofs() -> Vec<(&'static str, KnowledgeBase, Option<ProofStep>, Duration)> {
    let bundle = load_bundle().unwrap();
    let reg = QuantRegistry::builtin();
    let cfg = ProverConfig { timeout_ms: 5000, ..ProverConfig::default() };
    SIX.iter()
        .map(|name| {
            let q = bundle.query(name).unwrap();
            let kb = bundle.query_kb(q);
            let start = Instant::now();
            let r = prove(&kb, &q.goal, &cfg, &reg);
            (*name, kb, r.proof().cloned(), start.elapsed())
        })
        .collect()
}

struct Soundness {
    proved: usize,
    violations: Vec<u64>,
    replay_failures: Vec<u64>,
}

fn soundness_trials(n: u64) -> Soundness {
    let reg = QuantRegistry::builtin();
    let cfg = ProverConfig { max_depth: 6, max_lexical_steps: 2, timeout_ms: 1000 };
    let mut s = Soundness { proved: 0, violations: Vec::new(), replay_failures: Vec::new() };
    for seed in 0..n {
        let t = trial(10_000 + seed);
        let r = prove(&t.kb, &t.goal, &cfg, &reg);
        if let Some(p) = r.proof() {
            s.proved += 1;
            if !goal_holds(&t) {
                s.violations.push(seed);
            }
            if validate(p, &t.kb, &reg).is_err() {
                s.replay_failures.push(seed);
            }
        }
    }
    s
}

#[test]
fn criterion_1_headline_inferences() {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    for (name, kb, proof, elapsed) in headline_proofs() {
        slowest = slowest.max(elapsed);
        let ok = proof.as_ref().is_some_and(|p| {
            p.lexical_steps() <= 2 && validate(p, &kb, &QuantRegistry::builtin()).is_ok()
        }) && elapsed < Duration::from_secs(1);
        if !ok {
            bad.push(name);
        }
    }
    report(1, bad.is_empty(), &format!("{} inferences, slowest {:.1} ms, failing {bad:?}", SIX.len(), slowest.as_secs_f64() * 1e3));
    assert!(bad.is_empty(), "{bad:?}");
}

fn conj_drop(q: QuantSym) -> Formula {
    let x = || vec![Term::var("x")];
    let strong = Formula::quant(q.clone(), "x", Formula::atom("p1", x()), Formula::and(Formula::atom("p2", x()), Formula::atom("p3", x())));
    Formula::implies(strong, Formula::quant(q, "x", Formula::atom("p1", x()), Formula::atom("p2", x())))
}

#[test]
fn criterion_2_conjunct_dropping_is_valid_for_right_up_quantifiers() {
    let reg = QuantRegistry::builtin();
    let bounds = ModelBounds { domain: 1..=4, worlds: 1..=1, ..Default::default() };
    let start = Instant::now();
    let up: Vec<QuantSym> = quant_syms()
        .into_iter()
        .filter(|q| reg.lookup(q).unwrap().profile.right == Monotonicity::Up)
        .collect();
    let mut bad: Vec<String> = up
        .iter()
        .filter(|q| find_counterexample(&conj_drop((*q).clone()), &reg, &bounds).unwrap().is_some())
        .map(|q| q.to_string())
        .collect();
    let control = find_counterexample(&conj_drop(QuantSym::with_param("fewer-than", 2)), &reg, &bounds).unwrap();
    if control.is_none() {
        bad.push("fewer-than 2 has no counterexample".into());
    }
    let elapsed = start.elapsed();
    let ok = bad.is_empty() && up.len() == 6 && elapsed < Duration::from_secs(60);
    report(2, ok, &format!("{} right-up quantifiers, |D|<=4, {:.2} s, problems {bad:?}", up.len(), elapsed.as_secs_f64()));
    assert!(ok);
}

#[test]
fn criterion_3_profiles_verify() {
    let reg = QuantRegistry::builtin();
    let defs = reg.instances();
    let bad: Vec<String> = defs.iter().filter(|d| verify_monotonicity(d, d.profile, 4).is_err()).map(|d| d.symbol().to_string()).collect();
    report(3, bad.is_empty(), &format!("{} quantifiers checked up to 4 elements, failing {bad:?}", defs.len()));
    assert!(bad.is_empty());
}

#[test]
fn criterion_4_soundness_fuzz() {
    let s = soundness_trials(500);
    let ok = s.violations.is_empty() && s.replay_failures.is_empty();
    report(
        4,
        ok,
        &format!("500 trials, {} proved, violations {:?}, replay failures {:?}", s.proved, s.violations, s.replay_failures),
    );
    assert!(ok);
}

fn faithful(seed: u64, n: usize) -> Vec<usize> {
    let reg = QuantRegistry::builtin();
    let mut g = Gen::new(seed);
    let mut bad = Vec::new();
    for i in 0..n {
        let (n, worlds) = (g.pick(&[2usize, 3]), g.pick(&[1usize, 2]));
        let m = g.model(n, worlds);
        let f = g.closed(3);
        let names: Vec<&str> = m.individuals.iter().map(|d| d.name.as_str()).collect();
        let ws: Vec<&str> = m.worlds.iter().map(|w| w.as_str()).collect();
        let ctx = ReductionContext::new(&names, &ws);
        let mut r = Reducer::new(&ctx, &reg).unwrap();
        let reduced = r.formula(&f, ws[0]).unwrap();
        let im = induced_model(&m, &r.table);
        let want = eval_formula(&m, 0, &Env::new(), &f, &reg).unwrap();
        if eval_formula(&im, 0, &Env::new(), &reduced, &reg).ok() != Some(want) {
            bad.push(i);
        }
    }
    bad
}

#[test]
fn criterion_5_reduction() {
    let reg = QuantRegistry::builtin();
    let bad = faithful(5, 200);
    let bundle = load_bundle().unwrap();
    let cfg = ProverConfig { timeout_ms: 20_000, ..ProverConfig::default() };
    let q = bundle.query("conj-drop").unwrap();
    let mut kb = bundle.query_kb(q);
    let consts = ["c1", "c2", "c3", "c4", "c5", "c6"];
    for c in consts {
        kb.signature.constants.insert(c.into());
    }
    let cities = compare_effort(&kb, &q.goal, &ReductionContext::new(&consts, &["w0"]), &cfg, &reg).unwrap();
    let q = bundle.query("compatible").unwrap();
    let ctx = ReductionContext::new(&["a1", "a2"], &["w0", "w1"]).with_access(&[("w0", "w1")]);
    let plan = compare_effort(&bundle.query_kb(q), &q.goal, &ctx, &cfg, &reg).unwrap();
    let shorter = |r: &elfol::reduce::EffortReport| {
        r.extended.proof_len == Some(1) && r.reduced.proof_len.is_some_and(|n| n > 1)
    };
    let ok = bad.is_empty() && shorter(&cities) && shorter(&plan);
    let len = |r: &elfol::reduce::EffortReport| format!("{:?} vs {:?}", r.extended.proof_len, r.reduced.proof_len);
    report(
        5,
        ok,
        &format!("200 formulas, unfaithful {bad:?}; conj-drop {}; compatible {}", len(&cities), len(&plan)),
    );
    assert!(ok);
}

#[test]
fn criterion_6_round_trip_and_replay() {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    let round_trip = runner.run(&arb_formula(), |f| {
        assert_eq!(parse_formula(&render(&f)).unwrap(), f);
        Ok(())
    });
    let headline_ok = headline_proofs().iter().all(|(_, kb, p, _)| {
        p.as_ref().is_some_and(|p| validate(p, kb, &QuantRegistry::builtin()).is_ok())
    });
    let s = soundness_trials(500);
    let ok = round_trip.is_ok() && headline_ok && s.replay_failures.is_empty();
    report(
        6,
        ok,
        &format!("1000 formulas round-trip: {}; headline traces replay: {headline_ok}; {} fuzz traces replay", round_trip.is_ok(), s.proved),
    );
    assert!(ok);
}

#[test]
fn criterion_7_witness_model() {
    let bundle = load_bundle().unwrap();
    let kb = bundle.full_kb();
    let ok = model_satisfies(&witness_model().unwrap(), &kb, &QuantRegistry::builtin()).unwrap();
    report(7, ok, &format!("{} axioms, {} facts, {} schemas", kb.axioms.len(), kb.facts.len(), kb.schemas.len()));
    assert!(ok);
}
