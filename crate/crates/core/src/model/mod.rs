//! Finite possible-worlds models, a total evaluator, bounded model
//! enumeration and counterexample search.

mod enumerate;
mod text;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kb::KnowledgeBase;
use crate::logic::{canonical_term, substitute_many, Formula, FreeVars, Modality, Name, PredExpr, Term};
use crate::quant::{eval_quant, QuantError, QuantRegistry};
use crate::schema::{enumerate_instances, InstanceBounds, SchemaError};

pub use enumerate::{
    enumerate_models, find_counterexample, schema_counterexample, ModelBounds, ModelError, ModelSpace, SchemaValidity, Vocabulary,
};
pub use text::parse_model;

pub type World = usize;
pub type Ind = usize;
pub type Env = BTreeMap<Name, Ind>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub name: Name,
    pub reified: bool,
}

/// Constant domain across worlds; world 0 is the designated world.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntensionalModel {
    pub worlds: Vec<Name>,
    pub access: BTreeSet<(World, World)>,
    pub individuals: Vec<Individual>,
    /// Constants without an entry denote the individual of the same name.
    pub constants: BTreeMap<Name, Ind>,
    /// Missing (predicate, world) entries are empty extensions.
    pub preds: BTreeMap<(Name, World), BTreeSet<Vec<Ind>>>,
    pub funcs: BTreeMap<Name, BTreeMap<Vec<Ind>, Ind>>,
    pub func_defaults: BTreeMap<Name, Ind>,
    /// (modifier, predicate constant, world) extensions.
    pub modified: BTreeMap<(Name, Name, World), BTreeSet<Vec<Ind>>>,
    /// (operator, individual, world) extensions of term-derived predicates.
    pub derived: BTreeMap<(Name, Ind, World), BTreeSet<Vec<Ind>>>,
    /// Canonical closed reified terms and the individuals they denote.
    pub reified: BTreeMap<Term, Ind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error("modifiers apply only to predicate constants, not `{0}`")]
    ModifiedNonConstant(String),
    #[error("no reified individual for `{0}`")]
    MissingReification(String),
    #[error("variable `?{0}` is unbound")]
    Unbound(Name),
    #[error("constant `{0}` has no denotation")]
    UnknownConstant(Name),
    #[error("function `{0}` is undefined on these arguments")]
    UndefinedFunction(Name),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Marker constant standing for an individual inside a reification key.
fn marker(d: Ind) -> Term {
    Term::Const(format!("@{d}"))
}

impl IntensionalModel {
    pub fn individual(&self, name: &str) -> Option<Ind> {
        self.individuals.iter().position(|i| i.name == name)
    }

    pub fn world(&self, name: &str) -> Option<World> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn domain(&self) -> std::ops::Range<Ind> {
        0..self.individuals.len()
    }

    /// Records that the closed reified term `t` denotes `d`.
    pub fn reify(&mut self, t: &Term, d: Ind) {
        self.individuals[d].reified = true;
        self.reified.insert(canonical_term(t), d);
    }

    fn reification_key(&self, t: &Term, env: &Env) -> Result<Term, EvalError> {
        let mut map = BTreeMap::new();
        for v in t.free_vars() {
            let d = *env.get(&v).ok_or_else(|| EvalError::Unbound(v.clone()))?;
            map.insert(v, marker(d));
        }
        if map.is_empty() {
            return Ok(canonical_term(t));
        }
        // Substitute through a carrier formula to reuse capture-avoidance.
        let carrier = substitute_many(&Formula::Eq(t.clone(), t.clone()), &map);
        let Formula::Eq(t, _) = carrier else { unreachable!() };
        Ok(canonical_term(&t))
    }

    pub fn eval_term(&self, env: &Env, t: &Term) -> Result<Ind, EvalError> {
        match t {
            Term::Var(v) => env.get(v).copied().ok_or_else(|| EvalError::Unbound(v.clone())),
            Term::Const(c) => self
                .constants
                .get(c)
                .copied()
                .or_else(|| self.individual(c))
                .ok_or_else(|| EvalError::UnknownConstant(c.clone())),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.eval_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.funcs
                    .get(f)
                    .and_then(|table| table.get(&vals))
                    .or_else(|| self.func_defaults.get(f))
                    .copied()
                    .ok_or_else(|| EvalError::UndefinedFunction(f.clone()))
            }
            Term::Ka(_) | Term::That(_) => {
                let key = self.reification_key(t, env)?;
                self.reified.get(&key).copied().ok_or_else(|| EvalError::MissingReification(t.to_string()))
            }
        }
    }

    fn holds_atom(&self, w: World, env: &Env, p: &PredExpr, args: &[Ind], reg: &QuantRegistry) -> Result<bool, EvalError> {
        static EMPTY: BTreeSet<Vec<Ind>> = BTreeSet::new();
        Ok(match p {
            PredExpr::Const(name) => self.preds.get(&(name.clone(), w)).unwrap_or(&EMPTY).contains(args),
            PredExpr::Lambda(vars, body) => {
                if vars.len() != args.len() {
                    return Ok(false);
                }
                let mut inner = env.clone();
                for (v, d) in vars.iter().zip(args) {
                    inner.insert(v.clone(), *d);
                }
                self.eval_in(w, &inner, body, reg)?
            }
            PredExpr::Modified(m, base) => match &**base {
                PredExpr::Const(b) => {
                    self.modified.get(&(m.clone(), b.clone(), w)).unwrap_or(&EMPTY).contains(args)
                }
                other => return Err(EvalError::ModifiedNonConstant(other.to_string())),
            },
            PredExpr::TermDerived(op, t) => {
                let d = self.eval_term(env, t)?;
                self.derived.get(&(op.clone(), d, w)).unwrap_or(&EMPTY).contains(args)
            }
        })
    }

    fn eval_in(&self, w: World, env: &Env, f: &Formula, reg: &QuantRegistry) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::True => true,
            Formula::Atom(p, args) => {
                let vals = args.iter().map(|a| self.eval_term(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.holds_atom(w, env, p, &vals, reg)?
            }
            Formula::Eq(a, b) => self.eval_term(env, a)? == self.eval_term(env, b)?,
            Formula::Not(g) => !self.eval_in(w, env, g, reg)?,
            Formula::And(a, b) => self.eval_in(w, env, a, reg)? && self.eval_in(w, env, b, reg)?,
            Formula::Or(a, b) => self.eval_in(w, env, a, reg)? || self.eval_in(w, env, b, reg)?,
            Formula::Implies(a, b) => !self.eval_in(w, env, a, reg)? || self.eval_in(w, env, b, reg)?,
            Formula::Equiv(a, b) => self.eval_in(w, env, a, reg)? == self.eval_in(w, env, b, reg)?,
            Formula::Quant { q, var, restrictor, body } => {
                let def = reg.lookup(q)?;
                let mut a = BTreeSet::new();
                let mut bset = BTreeSet::new();
                let mut inner = env.clone();
                for d in self.domain() {
                    inner.insert(var.clone(), d);
                    if self.eval_in(w, &inner, restrictor, reg)? {
                        a.insert(d);
                    }
                    if self.eval_in(w, &inner, body, reg)? {
                        bset.insert(d);
                    }
                }
                eval_quant(&def, &a, &bset)
            }
            Formula::Modal(m, g) => {
                let mut succ = self.access.iter().filter(|(from, _)| *from == w).map(|(_, to)| *to);
                match m {
                    Modality::Possibly => {
                        let mut any = false;
                        for v in succ.by_ref() {
                            if self.eval_in(v, env, g, reg)? {
                                any = true;
                                break;
                            }
                        }
                        any
                    }
                    Modality::Necessarily => {
                        let mut all = true;
                        for v in succ.by_ref() {
                            if !self.eval_in(v, env, g, reg)? {
                                all = false;
                                break;
                            }
                        }
                        all
                    }
                }
            }
        })
    }

    /// Propositions this model reifies with `that`, as closed formulas.
    pub fn reified_propositions(&self) -> Vec<Formula> {
        self.reified
            .keys()
            .filter_map(|t| match t {
                Term::That(f) if f.is_closed() && !mentions_marker(f) => Some((**f).clone()),
                _ => None,
            })
            .collect()
    }
}

fn mentions_marker(f: &Formula) -> bool {
    f.to_string().contains('@')
}

pub fn eval_formula(
    m: &IntensionalModel,
    w: World,
    env: &Env,
    f: &Formula,
    registry: &QuantRegistry,
) -> Result<bool, EvalError> {
    m.eval_in(w, env, f, registry)
}

/// Axioms and schema instances hold at every world, facts at world 0.
/// Formula metavariables range over the propositions the model reifies.
pub fn model_satisfies(m: &IntensionalModel, kb: &KnowledgeBase, registry: &QuantRegistry) -> Result<bool, EvalError> {
    Ok(first_violation(m, kb, registry)?.is_none())
}

/// The first axiom, schema instance or fact the model falsifies, with its world.
pub fn first_violation(
    m: &IntensionalModel,
    kb: &KnowledgeBase,
    registry: &QuantRegistry,
) -> Result<Option<(Formula, World)>, EvalError> {
    let env = Env::new();
    let worlds = 0..m.worlds.len();
    for a in &kb.axioms {
        for w in worlds.clone() {
            if !m.eval_in(w, &env, &a.formula, registry)? {
                return Ok(Some((a.formula.clone(), w)));
            }
        }
    }
    let bounds = InstanceBounds { formula_candidates: Some(m.reified_propositions()), ..Default::default() };
    for s in &kb.schemas {
        for inst in enumerate_instances(s, &kb.signature, &bounds, registry)? {
            for w in worlds.clone() {
                if !m.eval_in(w, &env, &inst, registry)? {
                    return Ok(Some((inst, w)));
                }
            }
        }
    }
    for f in &kb.facts {
        if !m.eval_in(0, &env, f, registry)? {
            return Ok(Some((f.clone(), 0)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
