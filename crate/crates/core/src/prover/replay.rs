//! Independent re-checking of proof trees, one rule at a time.

use std::collections::BTreeSet;

use thiserror::Error;

use super::clauses::{axiom_clauses, conjuncts, disjuncts, proper_positions, replace_at, subformula_at};
use super::trace::{ProofStep, Rule};
use crate::kb::KnowledgeBase;
use crate::logic::{alpha_equivalent, substitute, Formula, FreeVars, Term};
use crate::quant::{Monotonicity, QuantRegistry};
use crate::schema::{match_conclusion, MatchState, Pattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{rule} step for {formula} does not replay: {reason}")]
pub struct ReplayError {
    pub rule: String,
    pub formula: String,
    pub reason: String,
}

/// Checks that every node of `proof` follows from its children by its rule.
pub fn validate(proof: &ProofStep, kb: &KnowledgeBase, registry: &QuantRegistry) -> Result<(), ReplayError> {
    Replay { kb, registry }.step(proof, &mut Vec::new())
}

struct Replay<'a> {
    kb: &'a KnowledgeBase,
    registry: &'a QuantRegistry,
}

fn same_list(a: &[&Formula], b: &[&Formula]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| alpha_equivalent(*x, *y))
}

fn member(items: &[&Formula], f: &Formula) -> bool {
    items.iter().any(|g| alpha_equivalent(*g, f))
}

impl Replay<'_> {
    fn step(&self, s: &ProofStep, hyps: &mut Vec<Formula>) -> Result<(), ReplayError> {
        let fail = |reason: &str| ReplayError { rule: s.rule.to_string(), formula: s.formula.to_string(), reason: reason.into() };
        let arity = |n: usize| if s.children.len() == n { Ok(()) } else { Err(fail(&format!("expected {n} premises"))) };
        let f = &s.formula;
        let kids = &s.children;
        if s.extraction != 0 && !matches!(s.rule, Rule::AxiomMatch { .. }) {
            return Err(fail("extraction count on a non-axiom step"));
        }
        match &s.rule {
            Rule::FactMatch => {
                arity(0)?;
                if !self.kb.facts.iter().any(|g| alpha_equivalent(g, f)) {
                    return Err(fail("not a fact"));
                }
            }
            Rule::Hypothesis => {
                arity(0)?;
                if !hyps.iter().any(|g| alpha_equivalent(g, f)) {
                    return Err(fail("not an open hypothesis"));
                }
            }
            Rule::Reflexivity => {
                arity(0)?;
                let ok = match f {
                    Formula::True => true,
                    Formula::Eq(a, b) => alpha_equivalent(a, b),
                    _ => false,
                };
                if !ok {
                    return Err(fail("not an identity"));
                }
            }
            Rule::AxiomMatch { axiom, clause } => {
                let ax = self.kb.axiom(axiom).ok_or_else(|| fail("unknown axiom"))?;
                let clauses = axiom_clauses(&ax.formula);
                let c = clauses.get(*clause).ok_or_else(|| fail("no such clause"))?;
                if c.extraction != s.extraction {
                    return Err(fail("extraction count differs from the clause"));
                }
                let pat = Pattern::first_order(self.registry, c.vars.iter().cloned().collect());
                let ok = match &c.premise {
                    None => {
                        arity(0)?;
                        // A closed instance of the clause, possibly under universals.
                        let (_, stripped) = f.strip_universals();
                        !pat.match_formula(&c.conclusion, f, MatchState::default()).is_empty()
                            || !pat.match_formula(&c.conclusion, stripped, MatchState::default()).is_empty()
                    }
                    Some(p) => {
                        arity(1)?;
                        pat.match_formula(&c.conclusion, f, MatchState::default())
                            .into_iter()
                            .any(|st| !pat.match_formula(p, &kids[0].formula, st).is_empty())
                    }
                };
                if !ok {
                    return Err(fail("not an instance of the axiom clause"));
                }
            }
            Rule::ModusPonens => {
                arity(2)?;
                let expected = Formula::implies(kids[1].formula.clone(), f.clone());
                if !alpha_equivalent(&kids[0].formula, &expected) {
                    return Err(fail("first premise is not the implication"));
                }
            }
            Rule::UniversalInstantiation => {
                arity(1)?;
                let (v, body) = kids[0].formula.as_universal().ok_or_else(|| fail("premise is not universal"))?;
                let pat = Pattern::first_order(self.registry, BTreeSet::from([v.clone()]));
                if pat.match_formula(body, f, MatchState::default()).is_empty() {
                    return Err(fail("not an instance"));
                }
            }
            Rule::AndIntro => {
                let parts: Vec<&Formula> = kids.iter().flat_map(|k| conjuncts(&k.formula)).collect();
                if kids.len() < 2 && conjuncts(f).len() < 2 || !same_list(&conjuncts(f), &parts) {
                    return Err(fail("conjuncts do not match the premises"));
                }
            }
            Rule::AndElim => {
                arity(1)?;
                if !member(&conjuncts(&kids[0].formula), f) {
                    return Err(fail("not a conjunct of the premise"));
                }
            }
            Rule::OrIntro => {
                arity(1)?;
                if !member(&disjuncts(f), &kids[0].formula) {
                    return Err(fail("premise is not a disjunct"));
                }
            }
            Rule::OrElim => {
                let Some((first, branches)) = kids.split_first() else { return Err(fail("no premises")) };
                let cases: Vec<Formula> = disjuncts(&first.formula).into_iter().cloned().collect();
                if cases.len() < 2 || cases.len() != branches.len() {
                    return Err(fail("one branch per disjunct is required"));
                }
                self.step(first, hyps)?;
                for (case, b) in cases.into_iter().zip(branches) {
                    if !alpha_equivalent(&b.formula, f) {
                        return Err(fail("branch proves a different formula"));
                    }
                    hyps.push(case);
                    let r = self.step(b, hyps);
                    hyps.pop();
                    r?;
                }
                return Ok(());
            }
            Rule::ImpliesIntro => {
                arity(1)?;
                let Formula::Implies(ante, concl) = f else { return Err(fail("not an implication")) };
                if !alpha_equivalent(&**concl, &kids[0].formula) {
                    return Err(fail("premise is not the consequent"));
                }
                hyps.push((**ante).clone());
                let r = self.step(&kids[0], hyps);
                hyps.pop();
                return r;
            }
            Rule::EquivRewrite => {
                arity(2)?;
                let (_, eq) = kids[0].formula.strip_universals();
                let Formula::Equiv(l, r) = eq else { return Err(fail("first premise is not an equivalence")) };
                let target = &kids[1].formula;
                let ok = proper_positions(f).iter().any(|path| {
                    let sub = subformula_at(f, path).expect("own position");
                    [(l, r), (r, l)].iter().any(|(from, to)| {
                        alpha_equivalent(sub, &**from) && alpha_equivalent(&replace_at(f, path, to), target)
                    })
                });
                if !ok {
                    return Err(fail("no position rewrites to the premise"));
                }
            }
            Rule::SchemaApply(name) => {
                let schema = self.kb.schema(name).ok_or_else(|| fail("unknown schema"))?;
                let ok = match_conclusion(schema, f, self.registry).iter().any(|m| match (m.premise_template(schema), kids.as_slice()) {
                    (None, []) => true,
                    (Some(_), [k]) => !m.complete_against(schema, &k.formula, self.registry).is_empty(),
                    _ => false,
                });
                if !ok {
                    return Err(fail("not an instance of the schema"));
                }
            }
            Rule::MonotoneQuant => {
                arity(1)?;
                let (Formula::Quant { q, var, restrictor, body }, Formula::Quant { q: q2, var: v2, restrictor: r2, body: b2 }) =
                    (f, &kids[0].formula)
                else {
                    return Err(fail("both sides must be quantified"));
                };
                if q != q2 {
                    return Err(fail("quantifiers differ"));
                }
                if var != v2 && kids[0].formula.free_vars().contains(var) {
                    return Err(fail("variable clash"));
                }
                let rename = |g: &Formula| substitute(g, v2, &Term::Var(var.clone()));
                let (r2, b2) = (rename(r2), rename(b2));
                if !alpha_equivalent(&**restrictor, &r2) {
                    return Err(fail("restrictors differ"));
                }
                let dir = self.registry.verified(q).map(|d| d.profile.right).map_err(|e| fail(&e.to_string()))?;
                let ok = match dir {
                    Monotonicity::Up => conjuncts(body).iter().all(|c| member(&conjuncts(&b2), c)),
                    Monotonicity::Down => disjuncts(body).iter().all(|c| member(&disjuncts(&b2), c)),
                    Monotonicity::None => false,
                };
                if !ok {
                    return Err(fail("body change is not licensed by the quantifier's profile"));
                }
            }
        }
        kids.iter().try_for_each(|k| self.step(k, hyps))
    }
}
