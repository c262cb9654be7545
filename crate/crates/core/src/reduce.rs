//! Translation of the extended logic into plain first-order logic over an
//! explicit finite domain and set of worlds, and a side-by-side measure of
//! proof effort on both encodings.
//!
//! Quantifiers are expanded by domain closure, so the output has no
//! quantifiers at all: `all` becomes a conjunction over the domain,
//! `(at-least n)` a disjunction over the n-element subsets, and so on.
//! Every predicate gains a final world argument; `poss` and `nec` range
//! over the world constants guarded by `acc` atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde_json::json;
use thiserror::Error;

use crate::kb::KnowledgeBase;
use crate::logic::{beta_apply, canonical_term, substitute_many, Formula, Modality, Name, PredExpr, Term};
use crate::model::{IntensionalModel, Individual};
use crate::prover::{prove, ProofResult, ProverConfig};
use crate::quant::{QuantError, QuantKind, QuantRegistry};

/// The accessibility predicate of the reduced vocabulary.
pub const ACCESS: &str = "acc";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionContext {
    pub domain: Vec<Name>,
    /// The first world is the actual one.
    pub worlds: Vec<Name>,
    pub access: Vec<(Name, Name)>,
}

impl ReductionContext {
    pub fn new(domain: &[&str], worlds: &[&str]) -> Self {
        ReductionContext {
            domain: domain.iter().map(|s| s.to_string()).collect(),
            worlds: worlds.iter().map(|s| s.to_string()).collect(),
            access: Vec::new(),
        }
    }

    pub fn with_access(mut self, pairs: &[(&str, &str)]) -> Self {
        self.access = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        self
    }

    fn check(&self) -> Result<(), ReduceError> {
        if self.domain.is_empty() || self.worlds.is_empty() {
            return Err(ReduceError::EmptyContext);
        }
        let dup = |v: &[Name]| v.iter().collect::<BTreeSet<_>>().len() != v.len();
        if dup(&self.domain) || dup(&self.worlds) {
            return Err(ReduceError::Duplicate);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error("the reduction needs at least one domain constant and one world")]
    EmptyContext,
    #[error("domain or world list has duplicates")]
    Duplicate,
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error("variable `{0}` is not bound by a quantifier")]
    Unbound(Name),
    #[error("modifier applied to `{0}`; only predicate constants can be modified")]
    ModifiedNonConstant(String),
    #[error("term-derived predicate over `{0}`, which does not reduce to a constant")]
    DerivedBase(String),
    #[error("expansion of {what} needs {count} disjuncts, above the ceiling of {ceiling}")]
    Ceiling { what: String, count: u128, ceiling: u128 },
}

/// Fresh symbols introduced by a reduction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideTable {
    /// Constant standing for a reified term (in canonical form).
    pub reified: Vec<(Name, Term)>,
    /// Predicate standing for `(mod m p)`: (fresh, m, p).
    pub modified: Vec<(Name, Name, Name)>,
    /// Predicate standing for `(op c)`: (fresh, op, c).
    pub derived: Vec<(Name, Name, Name)>,
}

pub struct Reducer<'a> {
    ctx: &'a ReductionContext,
    registry: &'a QuantRegistry,
    pub table: SideTable,
    /// Largest number of subsets a single counting expansion may produce.
    pub ceiling: u128,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

fn falsum() -> Formula {
    Formula::not(Formula::True)
}

impl<'a> Reducer<'a> {
    pub fn new(ctx: &'a ReductionContext, registry: &'a QuantRegistry) -> Result<Self, ReduceError> {
        ctx.check()?;
        Ok(Reducer { ctx, registry, table: SideTable::default(), ceiling: 100_000 })
    }

    /// Reduces a closed formula evaluated at world `w`.
    pub fn formula(&mut self, f: &Formula, w: &str) -> Result<Formula, ReduceError> {
        self.at(f, w, &BTreeMap::new())
    }

    fn at(&mut self, f: &Formula, w: &str, env: &BTreeMap<Name, Name>) -> Result<Formula, ReduceError> {
        Ok(match f {
            Formula::True => Formula::True,
            Formula::Atom(PredExpr::Lambda(..), _) => {
                let Formula::Atom(p, args) = f else { unreachable!() };
                self.at(&beta_apply(p, args), w, env)?
            }
            Formula::Atom(p, args) => {
                let mut args = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                args.push(Term::constant(w));
                Formula::atom(self.pred_name(p, env)?, args)
            }
            Formula::Eq(a, b) => Formula::eq(self.term(a, env)?, self.term(b, env)?),
            Formula::Not(g) => Formula::not(self.at(g, w, env)?),
            Formula::And(a, b) => Formula::and(self.at(a, w, env)?, self.at(b, w, env)?),
            Formula::Or(a, b) => Formula::or(self.at(a, w, env)?, self.at(b, w, env)?),
            Formula::Implies(a, b) => Formula::implies(self.at(a, w, env)?, self.at(b, w, env)?),
            Formula::Equiv(a, b) => Formula::equiv(self.at(a, w, env)?, self.at(b, w, env)?),
            Formula::Modal(m, g) => {
                let mut parts = Vec::new();
                for v in &self.ctx.worlds {
                    let acc = Formula::atom(ACCESS, vec![Term::constant(w), Term::constant(v)]);
                    let inner = self.at(g, v, env)?;
                    parts.push(match m {
                        Modality::Possibly => Formula::and(acc, inner),
                        Modality::Necessarily => Formula::implies(acc, inner),
                    });
                }
                match m {
                    Modality::Possibly => Formula::disjoin(parts),
                    Modality::Necessarily => Formula::conjoin(parts),
                }
            }
            Formula::Quant { q, var, restrictor, body } => {
                let def = self.registry.lookup(q)?;
                let mut rs = Vec::new();
                let mut bs = Vec::new();
                for d in &self.ctx.domain {
                    let mut inner = env.clone();
                    inner.insert(var.clone(), d.clone());
                    rs.push(self.at(restrictor, w, &inner)?);
                    bs.push(self.at(body, w, &inner)?);
                }
                let trivial = **restrictor == Formula::True;
                let both: Vec<Formula> = rs
                    .iter()
                    .zip(&bs)
                    .map(|(r, b)| if trivial { b.clone() } else { Formula::and(r.clone(), b.clone()) })
                    .collect();
                let n = def.param.unwrap_or(0) as usize;
                match def.kind {
                    QuantKind::All => Formula::conjoin(
                        rs.into_iter()
                            .zip(bs)
                            .map(|(r, b)| if trivial { b } else { Formula::implies(r, b) })
                            .collect(),
                    ),
                    QuantKind::Some => Formula::disjoin(both),
                    QuantKind::No => Formula::not(Formula::disjoin(both)),
                    QuantKind::AtLeast => self.at_least(n, &both, q)?,
                    QuantKind::AtMost => Formula::not(self.at_least(n + 1, &both, q)?),
                    QuantKind::FewerThan => Formula::not(self.at_least(n, &both, q)?),
                    QuantKind::Exactly => {
                        Formula::and(self.at_least(n, &both, q)?, Formula::not(self.at_least(n + 1, &both, q)?))
                    }
                    QuantKind::Most => {
                        // |R∩B| > |R\B| iff for some k, at least k of each kind but fewer than k of the other.
                        let outside: Vec<Formula> = rs
                            .into_iter()
                            .zip(bs)
                            .map(|(r, b)| if trivial { Formula::not(b) } else { Formula::and(r, Formula::not(b)) })
                            .collect();
                        let mut ks = Vec::new();
                        for k in 1..=self.ctx.domain.len() {
                            ks.push(Formula::and(
                                self.at_least(k, &both, q)?,
                                Formula::not(self.at_least(k, &outside, q)?),
                            ));
                        }
                        Formula::disjoin(ks)
                    }
                }
            }
        })
    }

    /// Some `n` pairwise distinct domain constants satisfy their formula.
    fn at_least(&self, n: usize, items: &[Formula], q: &impl fmt::Display) -> Result<Formula, ReduceError> {
        if n == 0 {
            return Ok(Formula::True);
        }
        let count = binomial(items.len(), n);
        if count > self.ceiling {
            return Err(ReduceError::Ceiling { what: q.to_string(), count, ceiling: self.ceiling });
        }
        let dom = &self.ctx.domain;
        let mut out = Vec::new();
        for subset in (0..items.len()).combinations(n) {
            let mut parts: Vec<Formula> = subset
                .iter()
                .tuple_combinations()
                .map(|(i, j)| Formula::not(Formula::eq(Term::constant(&dom[*i]), Term::constant(&dom[*j]))))
                .collect();
            parts.extend(subset.iter().map(|i| items[*i].clone()));
            out.push(Formula::conjoin(parts));
        }
        Ok(if out.is_empty() { falsum() } else { Formula::disjoin(out) })
    }

    fn pred_name(&mut self, p: &PredExpr, env: &BTreeMap<Name, Name>) -> Result<Name, ReduceError> {
        match p {
            PredExpr::Const(n) => Ok(n.clone()),
            PredExpr::Modified(m, base) => {
                let PredExpr::Const(b) = &**base else { return Err(ReduceError::ModifiedNonConstant(base.to_string())) };
                let fresh = format!("{m}.{b}");
                if !self.table.modified.iter().any(|(f, ..)| *f == fresh) {
                    self.table.modified.push((fresh.clone(), m.clone(), b.clone()));
                }
                Ok(fresh)
            }
            PredExpr::TermDerived(op, t) => {
                let Term::Const(c) = self.term(t, env)? else { return Err(ReduceError::DerivedBase(t.to_string())) };
                let fresh = format!("{op}.{c}");
                if !self.table.derived.iter().any(|(f, ..)| *f == fresh) {
                    self.table.derived.push((fresh.clone(), op.clone(), c));
                }
                Ok(fresh)
            }
            PredExpr::Lambda(..) => unreachable!("lambda atoms are beta-reduced first"),
        }
    }

    fn term(&mut self, t: &Term, env: &BTreeMap<Name, Name>) -> Result<Term, ReduceError> {
        Ok(match t {
            Term::Var(v) => Term::constant(env.get(v).ok_or_else(|| ReduceError::Unbound(v.clone()))?),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::app(f, args.iter().map(|a| self.term(a, env)).collect::<Result<_, _>>()?),
            Term::Ka(_) | Term::That(_) => {
                let values = env.iter().map(|(v, c)| (v.clone(), Term::constant(c))).collect();
                let carrier = substitute_many(&Formula::eq(t.clone(), t.clone()), &values);
                let Formula::Eq(closed, _) = carrier else { unreachable!() };
                let key = canonical_term(&closed);
                if let Some((name, _)) = self.table.reified.iter().find(|(_, k)| *k == key) {
                    return Ok(Term::constant(name));
                }
                let kind = if matches!(t, Term::Ka(_)) { "ka" } else { "that" };
                let name = format!("{kind}.{}", self.table.reified.len() + 1);
                self.table.reified.push((name.clone(), key));
                Term::constant(name)
            }
        })
    }
}

/// Reduces `f` at the actual world.
pub fn reduce(f: &Formula, ctx: &ReductionContext, registry: &QuantRegistry) -> Result<Formula, ReduceError> {
    let w0 = ctx.worlds.first().ok_or(ReduceError::EmptyContext)?.clone();
    Reducer::new(ctx, registry)?.formula(f, &w0)
}

/// A reduced knowledge base and goal. Facts hold at the actual world;
/// each axiom is reduced once per world (as `name@world`); schemas have no
/// first-order counterpart and are dropped. Accessibility pairs and the
/// distinctness of domain constants become facts.
pub fn reduce_kb(
    kb: &KnowledgeBase,
    goal: &Formula,
    ctx: &ReductionContext,
    registry: &QuantRegistry,
) -> Result<(KnowledgeBase, Formula, SideTable), ReduceError> {
    let mut r = Reducer::new(ctx, registry)?;
    let w0 = ctx.worlds[0].clone();
    let mut out = KnowledgeBase::default();
    for (a, b) in &ctx.access {
        out.facts.push(Formula::atom(ACCESS, vec![Term::constant(a), Term::constant(b)]));
    }
    for (a, b) in ctx.domain.iter().tuple_combinations() {
        out.facts.push(Formula::not(Formula::eq(Term::constant(a), Term::constant(b))));
    }
    for f in &kb.facts {
        out.facts.push(r.formula(f, &w0)?);
    }
    for a in &kb.axioms {
        for w in &ctx.worlds {
            out.add_axiom(format!("{}@{w}", a.name), r.formula(&a.formula, w)?);
        }
    }
    let goal = r.formula(goal, &w0)?;
    let sig = &mut out.signature;
    for (p, n) in &kb.signature.predicates {
        sig.predicates.insert(p.clone(), n + 1);
    }
    sig.predicates.insert(ACCESS.into(), 2);
    sig.functions = kb.signature.functions.clone();
    sig.constants = kb.signature.constants.iter().chain(&ctx.domain).chain(&ctx.worlds).cloned().collect();
    sig.constants.extend(r.table.reified.iter().map(|(n, _)| n.clone()));
    Ok((out, goal, r.table))
}

/// The classical one-world model that a reduced formula is read in: worlds
/// become individuals, `acc` holds the accessibility relation, and every
/// predicate takes its world as a last argument. Constants missing from the
/// side table's model are left undefined.
pub fn induced_model(m: &IntensionalModel, table: &SideTable) -> IntensionalModel {
    let mut out = IntensionalModel { worlds: vec!["w".into()], ..Default::default() };
    out.individuals = m.individuals.clone();
    let base = out.individuals.len();
    for w in &m.worlds {
        out.individuals.push(Individual { name: w.clone(), reified: false });
    }
    out.constants = m.constants.clone();
    for (i, w) in m.worlds.iter().enumerate() {
        out.constants.insert(w.clone(), base + i);
    }
    for (name, key) in &table.reified {
        if let Some(d) = m.reified.get(key) {
            out.constants.insert(name.clone(), *d);
        }
    }
    out.funcs = m.funcs.clone();
    out.func_defaults = m.func_defaults.clone();
    let mut add = |p: &Name, w: usize, ext: &BTreeSet<Vec<usize>>| {
        let set = out.preds.entry((p.clone(), 0)).or_default();
        for t in ext {
            let mut t = t.clone();
            t.push(base + w);
            set.insert(t);
        }
    };
    for ((p, w), ext) in &m.preds {
        add(p, *w, ext);
    }
    for ((md, p, w), ext) in &m.modified {
        if let Some((fresh, ..)) = table.modified.iter().find(|(_, a, b)| a == md && b == p) {
            add(fresh, *w, ext);
        }
    }
    let denote = |c: &Name| m.constants.get(c).copied().or_else(|| m.individual(c)).or_else(|| {
        table.reified.iter().find(|(n, _)| n == c).and_then(|(_, key)| m.reified.get(key).copied())
    });
    for ((op, d, w), ext) in &m.derived {
        for (fresh, o, c) in &table.derived {
            if o == op && denote(c) == Some(*d) {
                add(fresh, *w, ext);
            }
        }
    }
    let acc: BTreeSet<Vec<usize>> = m.access.iter().map(|(a, b)| vec![base + a, base + b]).collect();
    if !acc.is_empty() {
        out.preds.insert((ACCESS.into(), 0), acc);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingEffort {
    pub encoding: &'static str,
    pub explored: usize,
    pub proof_len: Option<usize>,
    pub outcome: String,
}

impl EncodingEffort {
    fn from_result(encoding: &'static str, r: &ProofResult) -> Self {
        EncodingEffort { encoding, explored: r.explored, proof_len: r.proof().map(|p| p.proof_len()), outcome: r.label() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "encoding": self.encoding, "explored": self.explored, "proof_len": self.proof_len, "outcome": self.outcome })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffortReport {
    pub extended: EncodingEffort,
    pub reduced: EncodingEffort,
}

impl EffortReport {
    /// Extended proof length over reduced proof length, if both succeeded.
    pub fn ratio(&self) -> Option<f64> {
        match (self.extended.proof_len, self.reduced.proof_len) {
            (Some(a), Some(b)) if b > 0 => Some(a as f64 / b as f64),
            (Some(0), Some(0)) => Some(1.0),
            _ => None,
        }
    }

    /// One JSON record per encoding.
    pub fn to_json_lines(&self) -> String {
        format!("{}\n{}\n", self.extended.to_json(), self.reduced.to_json())
    }
}

impl fmt::Display for EffortReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>10} {:>10}  outcome", "encoding", "explored", "proof_len")?;
        for e in [&self.extended, &self.reduced] {
            let len = e.proof_len.map_or("-".to_string(), |n| n.to_string());
            writeln!(f, "{:<10} {:>10} {:>10}  {}", e.encoding, e.explored, len, e.outcome)?;
        }
        match self.ratio() {
            Some(r) => writeln!(f, "ratio extended:reduced = {r:.3}"),
            None => writeln!(f, "ratio undefined"),
        }
    }
}

/// Proves `goal` from `kb` and from their reductions with the same prover.
pub fn compare_effort(
    kb: &KnowledgeBase,
    goal: &Formula,
    ctx: &ReductionContext,
    cfg: &ProverConfig,
    registry: &QuantRegistry,
) -> Result<EffortReport, ReduceError> {
    let ext = prove(kb, goal, cfg, registry);
    let (rkb, rgoal, _) = reduce_kb(kb, goal, ctx, registry)?;
    let red = prove(&rkb, &rgoal, cfg, registry);
    Ok(EffortReport {
        extended: EncodingEffort::from_result("extended", &ext),
        reduced: EncodingEffort::from_result("reduced", &red),
    })
}
