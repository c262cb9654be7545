mod common;

use common::{goal_holds, trial};
use elfol::prover::{prove, validate, ProverConfig, Rule};
use elfol::quant::Monotonicity;
use elfol::{Formula, QuantRegistry};

fn cfg() -> ProverConfig {
    ProverConfig { max_depth: 6, max_lexical_steps: 2, timeout_ms: 1000 }
}

#[test]
fn proofs_are_sound_and_replay() {
    let reg = QuantRegistry::builtin();
    let mut proved = 0;
    for seed in 0..120 {
        let t = trial(seed);
        let r = prove(&t.kb, &t.goal, &cfg(), &reg);
        if let Some(p) = r.proof() {
            proved += 1;
            assert!(goal_holds(&t), "seed {seed}: proved {} which is false in the model", t.goal);
            validate(p, &t.kb, &reg).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        }
    }
    assert!(proved >= 20, "only {proved} goals proved");
}

#[test]
fn search_is_deterministic() {
    let reg = QuantRegistry::builtin();
    for seed in 200..240 {
        let t = trial(seed);
        let a = prove(&t.kb, &t.goal, &cfg(), &reg);
        let b = prove(&t.kb, &t.goal, &cfg(), &reg);
        assert_eq!(a.proof(), b.proof(), "seed {seed}");
        if a.is_proved() {
            assert_eq!(a.explored, b.explored, "seed {seed}");
        }
    }
}

#[test]
fn monotone_steps_use_monotone_quantifiers() {
    let reg = QuantRegistry::builtin();
    let mut seen = 0;
    for seed in 300..420 {
        let t = trial(seed);
        let r = prove(&t.kb, &t.goal, &cfg(), &reg);
        let Some(p) = r.proof() else { continue };
        for step in p.iter().filter(|s| s.rule == Rule::MonotoneQuant) {
            seen += 1;
            let Formula::Quant { q, .. } = &step.formula else { panic!("non-quantified monotone step") };
            assert_ne!(reg.lookup(q).unwrap().profile.right, Monotonicity::None, "{q}");
        }
    }
    assert!(seen > 0);
}
