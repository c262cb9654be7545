//! Axiom clauses and decomposed facts, shared by search and replay.

use std::collections::BTreeMap;

use super::trace::{ProofStep, Rule};
use crate::logic::{substitute, Formula, Name, Term};

/// Flattened conjuncts, in left-to-right order.
pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        other => vec![other],
    }
}

pub fn disjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Or(a, b) => {
            let mut v = disjuncts(a);
            v.extend(disjuncts(b));
            v
        }
        other => vec![other],
    }
}

/// A usable consequence of an axiom: under any values for `vars`,
/// `premise` implies `conclusion` (or `conclusion` holds outright).
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub vars: Vec<Name>,
    pub premise: Option<Formula>,
    pub conclusion: Formula,
    pub extraction: usize,
}

/// Clauses in a fixed order: universals are stripped, conjunctions split,
/// implications used forwards, equivalences both ways and as a whole.
pub fn axiom_clauses(axiom: &Formula) -> Vec<Clause> {
    let mut out = Vec::new();
    collect(axiom, Vec::new(), 0, &mut out);
    out
}

fn collect(f: &Formula, mut vars: Vec<Name>, elims: usize, out: &mut Vec<Clause>) {
    let (vs, body) = f.strip_universals();
    vars.extend(vs);
    let parts = conjuncts(body);
    if parts.len() > 1 {
        for p in parts {
            collect(p, vars.clone(), elims + 1, out);
        }
        return;
    }
    let clause = |premise: Option<&Formula>, conclusion: &Formula, extraction| Clause {
        vars: vars.clone(),
        premise: premise.cloned(),
        conclusion: conclusion.clone(),
        extraction,
    };
    match body {
        Formula::Implies(a, c) => {
            out.push(clause(Some(a), c, elims));
            let cs = conjuncts(c);
            if cs.len() > 1 {
                for ci in cs {
                    out.push(clause(Some(a), ci, elims + 1));
                }
            }
        }
        Formula::Equiv(l, r) => {
            out.push(clause(Some(r), l, elims));
            out.push(clause(Some(l), r, elims));
            out.push(clause(None, body, elims));
        }
        other => out.push(clause(None, other, elims)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Access {
    Conj(usize),
    Inst(Name),
}

/// A fact or hypothesis, or a part of one reached by conjunction
/// elimination and universal instantiation.
#[derive(Clone, Debug)]
pub struct Entry {
    pub root: Formula,
    pub rule: Rule,
    pub path: Vec<Access>,
    pub vars: Vec<Name>,
    pub body: Formula,
}

pub fn entries(root: &Formula, rule: Rule) -> Vec<Entry> {
    fn walk(root: &Formula, rule: &Rule, f: &Formula, path: Vec<Access>, vars: Vec<Name>, out: &mut Vec<Entry>) {
        out.push(Entry { root: root.clone(), rule: rule.clone(), path: path.clone(), vars: vars.clone(), body: f.clone() });
        let parts = conjuncts(f);
        if parts.len() > 1 {
            for (i, p) in parts.into_iter().enumerate() {
                let mut path = path.clone();
                path.push(Access::Conj(i));
                walk(root, rule, p, path, vars.clone(), out);
            }
        } else if let Some((v, body)) = f.as_universal() {
            let mut path = path;
            path.push(Access::Inst(v.clone()));
            let mut vars = vars;
            vars.push(v.clone());
            walk(root, rule, body, path, vars, out);
        }
    }
    let mut out = Vec::new();
    walk(root, &rule, root, Vec::new(), Vec::new(), &mut out);
    out
}

impl Entry {
    pub fn is_ground(&self) -> bool {
        self.vars.is_empty()
    }

    /// The proof of this entry's body under `values` for its variables,
    /// or `None` if a variable is unbound.
    pub fn proof(&self, values: &BTreeMap<Name, Term>) -> Option<ProofStep> {
        let mut step = ProofStep::leaf(self.rule.clone(), self.root.clone());
        for access in &self.path {
            let next = match access {
                Access::Conj(i) => conjuncts(&step.formula)[*i].clone(),
                Access::Inst(v) => {
                    let (_, body) = step.formula.as_universal()?;
                    let value = values.get(v)?;
                    substitute(body, v, value)
                }
            };
            let rule = match access {
                Access::Conj(_) => Rule::AndElim,
                Access::Inst(_) => Rule::UniversalInstantiation,
            };
            step = ProofStep::node(rule, next, vec![step]);
        }
        Some(step)
    }
}

/// Immediate subformulas, in position order. Terms are not entered:
/// reified propositions are opaque to rewriting.
pub fn children(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Not(g) | Formula::Modal(_, g) => vec![g],
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => vec![a, b],
        Formula::Quant { restrictor, body, .. } => vec![restrictor, body],
        _ => vec![],
    }
}

/// Paths to every proper subformula, outermost first.
pub fn proper_positions(f: &Formula) -> Vec<Vec<usize>> {
    fn walk(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for (i, c) in children(f).into_iter().enumerate() {
            path.push(i);
            out.push(path.clone());
            walk(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

pub fn subformula_at<'f>(f: &'f Formula, path: &[usize]) -> Option<&'f Formula> {
    match path.split_first() {
        None => Some(f),
        Some((i, rest)) => subformula_at(children(f).get(*i)?, rest),
    }
}

/// `f` with the subformula at `path` replaced; no renaming is done, so
/// variables in `by` are captured by the binders above `path`.
pub fn replace_at(f: &Formula, path: &[usize], by: &Formula) -> Formula {
    let Some((i, rest)) = path.split_first() else { return by.clone() };
    let sub = |g: &Formula, j: usize| if *i == j { Box::new(replace_at(g, rest, by)) } else { Box::new(g.clone()) };
    match f {
        Formula::Not(g) => Formula::Not(sub(g, 0)),
        Formula::Modal(m, g) => Formula::Modal(*m, sub(g, 0)),
        Formula::And(a, b) => Formula::And(sub(a, 0), sub(b, 1)),
        Formula::Or(a, b) => Formula::Or(sub(a, 0), sub(b, 1)),
        Formula::Implies(a, b) => Formula::Implies(sub(a, 0), sub(b, 1)),
        Formula::Equiv(a, b) => Formula::Equiv(sub(a, 0), sub(b, 1)),
        Formula::Quant { q, var, restrictor, body } => Formula::Quant {
            q: q.clone(),
            var: var.clone(),
            restrictor: sub(restrictor, 0),
            body: sub(body, 1),
        },
        other => other.clone(),
    }
}

/// Every subformula (including `f`) satisfying `keep`.
pub fn subformulas<'f>(f: &'f Formula, keep: &impl Fn(&Formula) -> bool, out: &mut Vec<&'f Formula>) {
    if keep(f) {
        out.push(f);
    }
    for c in children(f) {
        subformulas(c, keep, out);
    }
}
