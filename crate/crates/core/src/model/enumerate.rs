use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use thiserror::Error;

use super::{EvalError, Env, Individual, IntensionalModel};
use crate::logic::{canonical_term, Formula, FreeVars, Name, PredExpr, Signature, Term};
use crate::quant::QuantRegistry;
use crate::schema::{enumerate_instances, InstanceBounds, Schema};

/// The symbols a model must interpret.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub preds: BTreeMap<Name, usize>,
    pub funcs: BTreeMap<Name, usize>,
    pub constants: BTreeSet<Name>,
    /// (modifier, predicate constant) pairs and the arity of the result.
    pub modified: BTreeMap<(Name, Name), usize>,
    pub derived: BTreeMap<Name, usize>,
    /// Closed reified terms, canonical, each denoting its own individual.
    pub reified: Vec<Term>,
}

impl Vocabulary {
    pub fn from_signature(sig: &Signature) -> Self {
        let mut modified = BTreeMap::new();
        for m in &sig.modifiers {
            for (p, a) in &sig.predicates {
                modified.insert((m.clone(), p.clone()), *a);
            }
        }
        Vocabulary {
            preds: sig.predicates.clone(),
            funcs: sig.functions.clone(),
            constants: sig.constants.clone(),
            modified,
            derived: sig.operators.clone(),
            reified: Vec::new(),
        }
    }

    /// Exactly the symbols occurring in `f`.
    pub fn of_formula(f: &Formula) -> Self {
        let mut v = Vocabulary::default();
        v.scan_formula(f);
        v
    }

    pub fn restrict_predicates(&mut self, keep: &[Name]) {
        self.preds.retain(|p, _| keep.contains(p));
    }

    fn scan_formula(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::Atom(p, args) => {
                self.scan_pred(p, args.len());
                args.iter().for_each(|a| self.scan_term(a));
            }
            Formula::Eq(a, b) => {
                self.scan_term(a);
                self.scan_term(b);
            }
            Formula::Not(g) | Formula::Modal(_, g) => self.scan_formula(g),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                self.scan_formula(a);
                self.scan_formula(b);
            }
            Formula::Quant { restrictor, body, .. } => {
                self.scan_formula(restrictor);
                self.scan_formula(body);
            }
        }
    }

    fn scan_pred(&mut self, p: &PredExpr, arity: usize) {
        match p {
            PredExpr::Const(name) => {
                self.preds.insert(name.clone(), arity);
            }
            PredExpr::Lambda(_, body) => self.scan_formula(body),
            PredExpr::Modified(m, base) => {
                if let PredExpr::Const(b) = &**base {
                    self.modified.insert((m.clone(), b.clone()), arity);
                } else {
                    self.scan_pred(base, arity);
                }
            }
            PredExpr::TermDerived(op, t) => {
                self.derived.insert(op.clone(), arity);
                self.scan_term(t);
            }
        }
    }

    fn scan_term(&mut self, t: &Term) {
        match t {
            Term::Var(_) => {}
            Term::Const(c) => {
                self.constants.insert(c.clone());
            }
            Term::App(f, args) => {
                self.funcs.insert(f.clone(), args.len());
                args.iter().for_each(|a| self.scan_term(a));
            }
            Term::Ka(p) => {
                self.add_reified(t);
                if let PredExpr::Lambda(_, body) = &**p {
                    self.scan_formula(body);
                } else if let PredExpr::TermDerived(_, inner) = &**p {
                    self.scan_term(inner);
                }
            }
            Term::That(g) => {
                self.add_reified(t);
                self.scan_formula(g);
            }
        }
    }

    fn add_reified(&mut self, t: &Term) {
        if t.is_closed() {
            let c = canonical_term(t);
            if !self.reified.contains(&c) {
                self.reified.push(c);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{count} models exceed the ceiling of {ceiling} ({formula})")]
    Ceiling { count: u128, ceiling: u128, formula: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Clone, Debug)]
pub struct ModelBounds {
    /// Number of plain individuals; reified individuals come on top.
    pub domain: RangeInclusive<usize>,
    pub worlds: RangeInclusive<usize>,
    /// When set, only these predicates get enumerated extensions.
    pub predicates: Option<Vec<Name>>,
    pub ceiling: u128,
}

impl Default for ModelBounds {
    fn default() -> Self {
        ModelBounds { domain: 1..=3, worlds: 1..=1, predicates: None, ceiling: 5_000_000 }
    }
}

#[derive(Clone, Debug)]
enum Axis {
    Access,
    Pred(Name, usize, usize),
    Const(Name),
    Func(Name, usize),
    Modified(Name, Name, usize, usize),
    Derived(Name, usize, usize, usize),
}

/// Every model of a vocabulary with a fixed number of worlds and plain
/// individuals, in mixed-radix order (first axis varies fastest).
#[derive(Clone, Debug)]
pub struct ModelSpace {
    vocab: Vocabulary,
    worlds: usize,
    plain: usize,
    axes: Vec<(Axis, u128)>,
}

fn pow(base: u128, exp: usize) -> u128 {
    u32::try_from(exp).ok().and_then(|e| base.checked_pow(e)).unwrap_or(u128::MAX)
}

fn subsets_of_tuples(n: usize, arity: usize) -> u128 {
    let tuples = pow(n as u128, arity);
    if tuples >= 128 {
        u128::MAX
    } else {
        1u128 << tuples
    }
}

fn tuple(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut t = vec![0; arity];
    for slot in t.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    t
}

impl ModelSpace {
    pub fn new(vocab: &Vocabulary, worlds: usize, plain: usize) -> Self {
        assert!(worlds >= 1 && plain >= 1, "models need a world and an individual");
        let n = plain + vocab.reified.len();
        let mut axes = Vec::new();
        // A single world has no accessibility choices; reflexive one-world
        // frames are covered by two-world frames with an unreachable world.
        let access_radix = if worlds >= 2 { pow(2, worlds * worlds) } else { 1 };
        axes.push((Axis::Access, access_radix));
        for (p, a) in &vocab.preds {
            for w in 0..worlds {
                axes.push((Axis::Pred(p.clone(), w, *a), subsets_of_tuples(n, *a)));
            }
        }
        for c in &vocab.constants {
            axes.push((Axis::Const(c.clone()), n as u128));
        }
        for (f, a) in &vocab.funcs {
            axes.push((Axis::Func(f.clone(), *a), pow(n as u128, pow(n as u128, *a).min(4096) as usize)));
        }
        for ((m, p), a) in &vocab.modified {
            for w in 0..worlds {
                axes.push((Axis::Modified(m.clone(), p.clone(), w, *a), subsets_of_tuples(n, *a)));
            }
        }
        for (op, a) in &vocab.derived {
            for d in 0..n {
                for w in 0..worlds {
                    axes.push((Axis::Derived(op.clone(), d, w, *a), subsets_of_tuples(n, *a)));
                }
            }
        }
        ModelSpace { vocab: vocab.clone(), worlds, plain, axes }
    }

    pub fn count(&self) -> u128 {
        self.axes.iter().fold(1u128, |acc, (_, r)| acc.saturating_mul(*r))
    }

    /// Human-readable product of axis sizes, e.g. `2^4 (access) x 2^2 (p@w0)`.
    pub fn count_formula(&self) -> String {
        let n = self.plain + self.vocab.reified.len();
        let parts: Vec<String> = self
            .axes
            .iter()
            .filter(|(_, r)| *r != 1)
            .map(|(axis, _)| match axis {
                Axis::Access => format!("2^{} (access)", self.worlds * self.worlds),
                Axis::Pred(p, w, a) => format!("2^{} ({p}@w{w})", pow(n as u128, *a)),
                Axis::Const(c) => format!("{n} ({c})"),
                Axis::Func(f, a) => format!("{n}^{} ({f})", pow(n as u128, *a)),
                Axis::Modified(m, p, w, a) => format!("2^{} ({m} {p}@w{w})", pow(n as u128, *a)),
                Axis::Derived(op, d, w, a) => format!("2^{} ({op} #{d}@w{w})", pow(n as u128, *a)),
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" x ")
        }
    }

    pub fn model(&self, mut index: u128) -> IntensionalModel {
        let n = self.plain + self.vocab.reified.len();
        let mut m = IntensionalModel {
            worlds: (0..self.worlds).map(|w| format!("w{w}")).collect(),
            individuals: (0..self.plain)
                .map(|i| Individual { name: format!("d{i}"), reified: false })
                .chain((0..self.vocab.reified.len()).map(|i| Individual { name: format!("k{i}"), reified: true }))
                .collect(),
            ..Default::default()
        };
        for (i, t) in self.vocab.reified.iter().enumerate() {
            m.reified.insert(t.clone(), self.plain + i);
        }
        let extension = |bits: u128, arity: usize| -> BTreeSet<Vec<usize>> {
            (0..pow(n as u128, arity) as usize).filter(|i| bits >> i & 1 == 1).map(|i| tuple(i, n, arity)).collect()
        };
        for (axis, radix) in &self.axes {
            let digit = index % radix;
            index /= radix;
            match axis {
                Axis::Access => {
                    for k in 0..self.worlds * self.worlds {
                        if digit >> k & 1 == 1 {
                            m.access.insert((k / self.worlds, k % self.worlds));
                        }
                    }
                }
                Axis::Pred(p, w, a) => {
                    m.preds.insert((p.clone(), *w), extension(digit, *a));
                }
                Axis::Const(c) => {
                    m.constants.insert(c.clone(), digit as usize);
                }
                Axis::Func(f, a) => {
                    let mut rest = digit;
                    let mut table = BTreeMap::new();
                    for i in 0..pow(n as u128, *a) as usize {
                        table.insert(tuple(i, n, *a), (rest % n as u128) as usize);
                        rest /= n as u128;
                    }
                    m.funcs.insert(f.clone(), table);
                }
                Axis::Modified(md, p, w, a) => {
                    m.modified.insert((md.clone(), p.clone(), *w), extension(digit, *a));
                }
                Axis::Derived(op, d, w, a) => {
                    m.derived.insert((op.clone(), *d, *w), extension(digit, *a));
                }
            }
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = IntensionalModel> + '_ {
        (0..self.count()).map(|i| self.model(i))
    }
}

fn spaces(vocab: &Vocabulary, bounds: &ModelBounds) -> Result<Vec<ModelSpace>, ModelError> {
    let mut vocab = vocab.clone();
    if let Some(keep) = &bounds.predicates {
        vocab.restrict_predicates(keep);
    }
    let mut out = Vec::new();
    let mut total = 0u128;
    for w in bounds.worlds.clone() {
        for n in bounds.domain.clone() {
            let s = ModelSpace::new(&vocab, w, n);
            total = total.saturating_add(s.count());
            if total > bounds.ceiling {
                return Err(ModelError::Ceiling { count: total, ceiling: bounds.ceiling, formula: s.count_formula() });
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Every model of the signature within the bounds, smallest first.
pub fn enumerate_models(sig: &Signature, bounds: &ModelBounds) -> Result<impl Iterator<Item = IntensionalModel>, ModelError> {
    let spaces = spaces(&Vocabulary::from_signature(sig), bounds)?;
    Ok(spaces.into_iter().flat_map(|s| (0..s.count()).map(move |i| s.model(i))))
}

/// The first enumerated model falsifying `f` at world 0, if any.
pub fn find_counterexample(
    f: &Formula,
    registry: &QuantRegistry,
    bounds: &ModelBounds,
) -> Result<Option<IntensionalModel>, ModelError> {
    for space in spaces(&Vocabulary::of_formula(f), bounds)? {
        for i in 0..space.count() {
            let m = space.model(i);
            if !m.eval_in(0, &Env::new(), f, registry)? {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// How a schema fared under bounded model search.
#[derive(Clone, Debug)]
pub struct SchemaValidity {
    pub instances: usize,
    pub models_checked: u128,
    /// The first falsified instance and the model falsifying it.
    pub counterexample: Option<(Formula, IntensionalModel)>,
}

/// Checks every instance of `s` with predicate metavariables bound to fresh
/// predicates named after them (lowercased), formula metavariables to fresh
/// propositional atoms, and quantifier metavariables to admissible registry
/// quantifiers. Stops at the first counterexample.
pub fn schema_counterexample(
    s: &Schema,
    registry: &QuantRegistry,
    bounds: &ModelBounds,
) -> Result<SchemaValidity, ModelError> {
    let mut sig = Signature::default();
    for (p, arity) in &s.pred_vars {
        sig.predicates.insert(p.to_lowercase(), *arity);
    }
    let candidates = s.formula_vars.iter().map(|v| Formula::atom(v.to_lowercase(), vec![])).collect();
    let ib = InstanceBounds { formula_candidates: Some(candidates), ceiling: bounds.ceiling };
    let instances = enumerate_instances(s, &sig, &ib, registry).map_err(EvalError::from)?;
    let mut out = SchemaValidity { instances: instances.len(), models_checked: 0, counterexample: None };
    for f in instances {
        for space in spaces(&Vocabulary::of_formula(&f), bounds)? {
            for i in 0..space.count() {
                let m = space.model(i);
                out.models_checked += 1;
                if !m.eval_in(0, &Env::new(), &f, registry)? {
                    out.counterexample = Some((f, m));
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}
