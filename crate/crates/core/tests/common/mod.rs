//! Random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use elfol::logic::Name;
use elfol::model::{Individual, IntensionalModel};
use elfol::{Formula, PredExpr, QuantSym, Term};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 3] = ["x", "y", "z"];
pub const CONSTS: [&str; 3] = ["a", "b", "c"];

pub const KB_HEADER: &str = "(declare predicate P 1 Q 1 R 2) (declare modifier very) (declare constant a b c)";

pub fn quant_syms() -> Vec<QuantSym> {
    let mut out: Vec<QuantSym> = ["all", "some", "no", "most"].into_iter().map(QuantSym::new).collect();
    for name in ["at-least", "at-most", "exactly", "fewer-than"] {
        for n in 1..=3 {
            out.push(QuantSym::with_param(name, n));
        }
    }
    out
}

// ---- proptest strategies over the whole syntax -------------------------

pub fn arb_quant() -> impl Strategy<Value = QuantSym> {
    proptest::sample::select(quant_syms())
}

fn arb_var() -> impl Strategy<Value = Name> {
    proptest::sample::select(VARS.to_vec()).prop_map(String::from)
}

pub fn arb_simple_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_var().prop_map(Term::Var),
        proptest::sample::select(CONSTS.to_vec()).prop_map(Term::constant),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("g", vec![a, b])),
        ]
    })
}

/// Formulas using every construct, free variables included.
pub fn arb_formula() -> impl Strategy<Value = Formula> {
    let t = arb_simple_term;
    let leaf = prop_oneof![
        Just(Formula::True),
        t().prop_map(|a| Formula::atom("P", vec![a])),
        t().prop_map(|a| Formula::atom("Q", vec![a])),
        (t(), t()).prop_map(|(a, b)| Formula::atom("R", vec![a, b])),
        (t(), t()).prop_map(|(a, b)| Formula::eq(a, b)),
        t().prop_map(|a| Formula::apply(PredExpr::modified("very", PredExpr::constant("P")), vec![a])),
        t().prop_map(|a| Formula::apply(PredExpr::derived("do", Term::ka(PredExpr::constant("Q"))), vec![a])),
    ];
    leaf.prop_recursive(4, 48, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::equiv(a, b)),
            (arb_var(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (arb_var(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (arb_quant(), arb_var(), inner.clone(), inner.clone()).prop_map(|(q, v, r, b)| Formula::quant(q, v, r, b)),
            inner.clone().prop_map(Formula::possibly),
            inner.clone().prop_map(Formula::necessarily),
            (inner.clone(), t()).prop_map(|(f, a)| Formula::atom("holds", vec![Term::that(f), a])),
            (arb_var(), inner.clone(), t()).prop_map(|(v, f, a)| {
                Formula::apply(PredExpr::derived("do", Term::ka(PredExpr::lambda(vec![v], f))), vec![a])
            }),
            (arb_var(), inner, t()).prop_map(|(v, f, a)| Formula::apply(PredExpr::lambda(vec![v], f), vec![a])),
        ]
    })
}

/// Renames every quantifier-bound variable `v` to `v_r`.
pub fn rename_bound(f: &Formula) -> Formula {
    match f {
        Formula::Quant { q, var, restrictor, body } => {
            let fresh = format!("{var}_r");
            let t = Term::var(&fresh);
            Formula::quant(
                q.clone(),
                fresh,
                elfol::logic::substitute(&rename_bound(restrictor), var, &t),
                elfol::logic::substitute(&rename_bound(body), var, &t),
            )
        }
        Formula::Not(a) => Formula::not(rename_bound(a)),
        Formula::And(a, b) => Formula::and(rename_bound(a), rename_bound(b)),
        Formula::Or(a, b) => Formula::or(rename_bound(a), rename_bound(b)),
        Formula::Implies(a, b) => Formula::implies(rename_bound(a), rename_bound(b)),
        Formula::Equiv(a, b) => Formula::equiv(rename_bound(a), rename_bound(b)),
        Formula::Modal(m, a) => Formula::Modal(*m, Box::new(rename_bound(a))),
        other => other.clone(),
    }
}

// ---- seeded generation of evaluable closed formulas --------------------

/// Closed formulas over P/1, Q/1, R/2, `(mod very P)`, `(mod very Q)`,
/// equality and constants a, b, with quantifiers and modal operators.
pub struct Gen {
    pub rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs[self.rng.gen_range(0..xs.len())].clone()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn term(&mut self, scope: &[Name]) -> Term {
        if !scope.is_empty() && self.chance(0.7) {
            Term::Var(self.pick(scope))
        } else {
            Term::constant(self.pick(&["a", "b"]))
        }
    }

    pub fn atom(&mut self, scope: &[Name]) -> Formula {
        match self.rng.gen_range(0..7) {
            0 | 1 => Formula::atom("P", vec![self.term(scope)]),
            2 | 3 => Formula::atom("Q", vec![self.term(scope)]),
            4 => Formula::atom("R", vec![self.term(scope), self.term(scope)]),
            5 => {
                let base = self.pick(&["P", "Q"]);
                Formula::apply(PredExpr::modified("very", PredExpr::constant(base)), vec![self.term(scope)])
            }
            _ => Formula::eq(self.term(scope), self.term(scope)),
        }
    }

    pub fn formula(&mut self, depth: usize, scope: &mut Vec<Name>) -> Formula {
        if depth == 0 || self.chance(0.25) {
            return self.atom(scope);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0 => Formula::not(self.formula(d, scope)),
            1 => Formula::and(self.formula(d, scope), self.formula(d, scope)),
            2 => Formula::or(self.formula(d, scope), self.formula(d, scope)),
            3 => Formula::implies(self.formula(d, scope), self.formula(d, scope)),
            4 => Formula::equiv(self.formula(d, scope), self.formula(d, scope)),
            5 | 6 => {
                let v = self.pick(&VARS).to_string();
                scope.push(v.clone());
                let q = self.pick(&quant_syms());
                let r = if self.chance(0.3) { Formula::True } else { self.formula(d.min(1), scope) };
                let b = self.formula(d, scope);
                scope.pop();
                Formula::quant(q, v, r, b)
            }
            7 => Formula::possibly(self.formula(d, scope)),
            8 => Formula::necessarily(self.formula(d, scope)),
            _ => {
                let v = self.pick(&VARS).to_string();
                scope.push(v.clone());
                let b = self.formula(d, scope);
                scope.pop();
                if self.chance(0.5) {
                    Formula::forall(v, b)
                } else {
                    Formula::exists(v, b)
                }
            }
        }
    }

    pub fn closed(&mut self, depth: usize) -> Formula {
        self.formula(depth, &mut Vec::new())
    }

    fn extension(&mut self, n: usize, arity: usize, p: f64) -> BTreeSet<Vec<usize>> {
        let tuples: Vec<Vec<usize>> = match arity {
            1 => (0..n).map(|i| vec![i]).collect(),
            _ => (0..n).flat_map(|i| (0..n).map(move |j| vec![i, j])).collect(),
        };
        tuples.into_iter().filter(|_| self.rng.gen_bool(p)).collect()
    }

    /// A model with individuals named after the constants (`a`, `b`, then
    /// `c`, `d`...), random access and random extensions.
    pub fn model(&mut self, individuals: usize, worlds: usize) -> IntensionalModel {
        let names = ["a", "b", "c", "d", "e"];
        let mut m = IntensionalModel {
            worlds: (0..worlds).map(|w| format!("w{w}")).collect(),
            individuals: names[..individuals].iter().map(|n| Individual { name: n.to_string(), reified: false }).collect(),
            ..Default::default()
        };
        for i in 0..worlds {
            for j in 0..worlds {
                if self.chance(0.6) {
                    m.access.insert((i, j));
                }
            }
        }
        for w in 0..worlds {
            let p = self.rng.gen_range(0.2..0.8);
            m.preds.insert(("P".into(), w), self.extension(individuals, 1, p));
            m.preds.insert(("Q".into(), w), self.extension(individuals, 1, p));
            m.preds.insert(("R".into(), w), self.extension(individuals, 2, 0.4));
            for base in ["P", "Q"] {
                m.modified.insert(("very".into(), base.into(), w), self.extension(individuals, 1, 0.4));
            }
        }
        m
    }
}

// ---- soundness trials ---------------------------------------------------

use elfol::kb::KnowledgeBase;
use elfol::model::{eval_formula, Env};
use elfol::QuantRegistry;

/// A model, a knowledge base true in it, and a goal to try.
pub struct Trial {
    pub model: IntensionalModel,
    pub kb: KnowledgeBase,
    pub goal: Formula,
}

fn holds(m: &IntensionalModel, w: usize, f: &Formula) -> bool {
    eval_formula(m, w, &Env::new(), f, &QuantRegistry::builtin()).unwrap()
}

fn everywhere(m: &IntensionalModel, f: &Formula) -> bool {
    (0..m.worlds.len()).all(|w| holds(m, w, f))
}

fn unary(g: &mut Gen) -> PredExpr {
    match g.rng.gen_range(0..4) {
        0 => PredExpr::constant("P"),
        1 => PredExpr::constant("Q"),
        2 => PredExpr::modified("very", PredExpr::constant("P")),
        _ => PredExpr::modified("very", PredExpr::constant("Q")),
    }
}

fn x() -> Term {
    Term::var("x")
}

pub fn trial(seed: u64) -> Trial {
    let mut g = Gen::new(seed);
    let n = g.rng.gen_range(3..=4);
    let worlds = g.rng.gen_range(1..=2);
    let m = g.model(n, worlds);
    let mut kb = KnowledgeBase::parse(KB_HEADER).unwrap();

    let consts: Vec<Term> = CONSTS.iter().map(|c| Term::constant(*c)).collect();
    let mut ground = Vec::new();
    for c in &consts {
        for p in ["P", "Q"] {
            ground.push(Formula::atom(p, vec![c.clone()]));
        }
        ground.push(Formula::apply(PredExpr::modified("very", PredExpr::constant("P")), vec![c.clone()]));
        for d in &consts {
            ground.push(Formula::atom("R", vec![c.clone(), d.clone()]));
        }
    }
    for f in &ground {
        if holds(&m, 0, f) && g.chance(0.7) {
            kb.facts.push(f.clone());
        }
    }
    for _ in 0..30 {
        if kb.facts.len() >= 12 {
            break;
        }
        let f = g.closed(2);
        if holds(&m, 0, &f) {
            kb.facts.push(f);
        }
    }

    let mut tries = 0;
    while kb.axioms.len() < 3 && tries < 40 {
        tries += 1;
        let (a, b) = (unary(&mut g), unary(&mut g));
        let f = match g.rng.gen_range(0..4) {
            0 => Formula::forall("x", Formula::implies(Formula::apply(a, vec![x()]), Formula::apply(b, vec![x()]))),
            1 => Formula::forall("x", Formula::equiv(Formula::apply(a, vec![x()]), Formula::apply(b, vec![x()]))),
            2 => {
                let q = g.pick(&quant_syms());
                let body = Formula::quant(q, "y", Formula::atom("R", vec![x(), Term::var("y")]), Formula::apply(b, vec![Term::var("y")]));
                Formula::forall("x", Formula::implies(Formula::apply(a, vec![x()]), body))
            }
            _ => g.closed(2),
        };
        if everywhere(&m, &f) {
            let name = format!("ax{}", kb.axioms.len());
            kb.add_axiom(name, f);
        }
    }

    let goal = match g.rng.gen_range(0..4) {
        0 => g.pick(&ground),
        1 => g.closed(2),
        2 => {
            let q = g.pick(&quant_syms());
            let (r, b, c) = (unary(&mut g), unary(&mut g), unary(&mut g));
            let strong = Formula::quant(
                q.clone(),
                "x",
                Formula::apply(r.clone(), vec![x()]),
                Formula::and(Formula::apply(b.clone(), vec![x()]), Formula::apply(c, vec![x()])),
            );
            if holds(&m, 0, &strong) {
                kb.facts.push(strong);
            }
            Formula::quant(q, "x", Formula::apply(r, vec![x()]), Formula::apply(b, vec![x()]))
        }
        _ => {
            let parts: Vec<Formula> = (0..2).map(|_| g.pick(&ground)).collect();
            if g.chance(0.5) {
                Formula::conjoin(parts)
            } else {
                Formula::disjoin(parts)
            }
        }
    };
    Trial { model: m, kb, goal }
}

pub fn goal_holds(t: &Trial) -> bool {
    holds(&t.model, 0, &t.goal)
}
