mod common;

use std::collections::BTreeSet;

use elfol::quant::{eval_quant, verify_monotonicity, Monotonicity, Profile, QuantDef, QuantKind};
use elfol::{QuantRegistry, QuantSym};
use proptest::prelude::*;

const DIRS: [Monotonicity; 3] = [Monotonicity::Up, Monotonicity::Down, Monotonicity::None];

/// Textbook truth conditions, written directly over sets.
fn oracle(name: &str, n: usize, a: &BTreeSet<u8>, b: &BTreeSet<u8>) -> bool {
    let both = a.intersection(b).count();
    match name {
        "all" => a.is_subset(b),
        "some" => both > 0,
        "no" => both == 0,
        "most" => 2 * both > a.len(),
        "at-least" => both >= n,
        "at-most" => both <= n,
        "exactly" => both == n,
        "fewer-than" => both < n,
        _ => unreachable!(),
    }
}

fn def(sym: &QuantSym) -> QuantDef {
    QuantRegistry::builtin().lookup(sym).unwrap()
}

#[test]
fn stored_profiles_verify_and_are_tight() {
    let reg = QuantRegistry::builtin();
    let instances = reg.instances();
    assert_eq!(instances.len(), 4 + 4 * 3);
    for q in instances {
        assert!(verify_monotonicity(&q, q.profile, 4).is_ok(), "{}", q.symbol());
        for d in DIRS {
            if d != q.profile.left && d != Monotonicity::None {
                let claim = Profile::new(d, q.profile.right);
                assert!(verify_monotonicity(&q, claim, 4).is_err(), "{} left {d}", q.symbol());
            }
            if d != q.profile.right && d != Monotonicity::None {
                let claim = Profile::new(q.profile.left, d);
                assert!(verify_monotonicity(&q, claim, 4).is_err(), "{} right {d}", q.symbol());
            }
        }
    }
}

#[test]
fn known_right_profiles() {
    let right = |s: QuantSym| def(&s).profile.right;
    assert_eq!(right(QuantSym::new("all")), Monotonicity::Up);
    assert_eq!(right(QuantSym::new("most")), Monotonicity::Up);
    assert_eq!(right(QuantSym::with_param("at-least", 3)), Monotonicity::Up);
    assert_eq!(right(QuantSym::new("no")), Monotonicity::Down);
    assert_eq!(right(QuantSym::with_param("fewer-than", 2)), Monotonicity::Down);
    assert_eq!(right(QuantSym::with_param("exactly", 2)), Monotonicity::None);
    assert!(QuantRegistry::builtin().verified(&QuantSym::with_param("at-most", 1)).is_ok());
    assert!(matches!(def(&QuantSym::new("most")).kind, QuantKind::Most));
}

fn set() -> impl Strategy<Value = BTreeSet<u8>> {
    prop::collection::btree_set(0u8..6, 0..6)
}

proptest! {
    #[test]
    fn evaluation_matches_set_oracle(q in common::arb_quant(), a in set(), b in set()) {
        let n = q.param.unwrap_or(0) as usize;
        prop_assert_eq!(eval_quant(&def(&q), &a, &b), oracle(&q.name, n, &a, &b));
    }

    #[test]
    fn conservativity(q in common::arb_quant(), a in set(), b in set()) {
        let d = def(&q);
        let inside: BTreeSet<u8> = a.intersection(&b).copied().collect();
        prop_assert_eq!(eval_quant(&d, &a, &b), eval_quant(&d, &a, &inside));
    }

    #[test]
    fn at_least_coherence(n in 1u32..4, a in set(), b in set()) {
        let ev = |name: &str, p: Option<u32>| {
            let sym = match p { Some(k) => QuantSym::with_param(name, k), None => QuantSym::new(name) };
            eval_quant(&def(&sym), &a, &b)
        };
        let at_least = ev("at-least", Some(n));
        prop_assert_eq!(at_least, a.intersection(&b).count() >= n as usize);
        prop_assert_eq!(ev("fewer-than", Some(n)), !at_least);
        prop_assert_eq!(ev("exactly", Some(n)), at_least && ev("at-most", Some(n)));
        prop_assert_eq!(ev("at-least", Some(1)), ev("some", None));
        if n > 1 && at_least {
            prop_assert!(ev("at-least", Some(n - 1)));
        }
    }
}
