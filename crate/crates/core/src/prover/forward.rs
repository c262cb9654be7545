//! Forward saturation: repeatedly applies axioms, schemas and the monotone
//! quantifier rule to known facts until nothing new appears or the round
//! bound is reached.

use std::collections::BTreeMap;

use super::clauses::{axiom_clauses, conjuncts, entries, Entry};
use super::trace::{ProofStep, Rule};
use super::ProverConfig;
use crate::kb::KnowledgeBase;
use crate::logic::{alpha_equivalent, Formula, FreeVars};
use crate::quant::{Monotonicity, QuantRegistry};
use crate::schema::{metavars_in, MatchState, Pattern};

const FACT_CAP: usize = 10_000;

#[derive(Clone, Debug, Default)]
pub struct ForwardResult {
    /// New closed formulas in derivation order, each with its proof.
    pub derived: Vec<(Formula, ProofStep)>,
    pub rounds: usize,
    /// True if the round bound or fact cap stopped saturation early.
    pub exhausted: bool,
}

struct Known {
    proofs: Vec<ProofStep>,
    entries: Vec<(usize, Entry)>,
}

impl Known {
    fn contains(&self, f: &Formula) -> bool {
        self.proofs.iter().any(|p| alpha_equivalent(&p.formula, f))
    }

    fn add(&mut self, p: ProofStep) {
        let i = self.proofs.len();
        self.entries.extend(entries(&p.formula, Rule::FactMatch).into_iter().filter(|e| e.is_ground()).map(|e| (i, e)));
        self.proofs.push(p);
    }

    /// Proof of a ground entry, rooted at the known formula's own proof.
    fn proof_of(&self, i: usize, e: &Entry) -> ProofStep {
        let mut step = e.proof(&BTreeMap::new()).expect("ground entry");
        graft(&mut step, &self.proofs[i]);
        step
    }

    /// Every way `tmpl` (a conjunction of open parts) matches known entries.
    fn solve(&self, tmpl: &Formula, pat: &Pattern, st: MatchState) -> Vec<(ProofStep, MatchState)> {
        let parts = conjuncts(tmpl);
        let mut partial = vec![(Vec::new(), st)];
        for part in &parts {
            let mut next = Vec::new();
            for (proofs, s) in partial {
                for (i, e) in &self.entries {
                    for s2 in pat.match_formula(part, &e.body, s.clone()) {
                        let mut ps: Vec<ProofStep> = proofs.clone();
                        ps.push(self.proof_of(*i, e));
                        next.push((ps, s2));
                    }
                }
            }
            partial = next;
        }
        partial
            .into_iter()
            .map(|(mut ps, s)| {
                let proof = match ps.len() {
                    1 => ps.remove(0),
                    _ => ProofStep::node(Rule::AndIntro, s.apply(tmpl), ps),
                };
                (proof, s)
            })
            .collect()
    }
}

/// Replaces the fact leaf at the bottom of an extraction chain by the
/// proof of the derived formula it names.
fn graft(step: &mut ProofStep, root: &ProofStep) {
    match step.children.first_mut() {
        Some(c) => graft(c, root),
        None => *step = root.clone(),
    }
}

pub fn forward_chain(kb: &KnowledgeBase, cfg: &ProverConfig, registry: &QuantRegistry) -> ForwardResult {
    let mut known = Known { proofs: Vec::new(), entries: Vec::new() };
    for f in &kb.facts {
        if !known.contains(f) {
            known.add(ProofStep::leaf(Rule::FactMatch, f.clone()));
        }
    }
    let initial = known.proofs.len();
    let clauses: Vec<_> = kb
        .axioms
        .iter()
        .flat_map(|a| axiom_clauses(&a.formula).into_iter().enumerate().map(move |(i, c)| (a.name.clone(), i, c)))
        .filter(|(_, _, c)| c.premise.is_some())
        .collect();
    let mut result = ForwardResult::default();
    loop {
        if result.rounds >= cfg.max_depth {
            result.exhausted = true;
            break;
        }
        result.rounds += 1;
        let mut fresh: Vec<ProofStep> = Vec::new();
        let mut push = |p: ProofStep, known: &Known| {
            if p.formula.is_closed() && !known.contains(&p.formula) && !fresh.iter().any(|q| alpha_equivalent(&q.formula, &p.formula)) {
                fresh.push(p);
            }
        };
        for (axiom, index, c) in &clauses {
            let pat = Pattern::first_order(registry, c.vars.iter().cloned().collect());
            let premise = c.premise.as_ref().expect("filtered");
            for (pp, st) in known.solve(premise, &pat, MatchState::default()) {
                let mut step = ProofStep::node(Rule::AxiomMatch { axiom: axiom.clone(), clause: *index }, st.apply(&c.conclusion), vec![pp]);
                step.extraction = c.extraction;
                push(step, &known);
            }
        }
        for s in &kb.schemas {
            let (vars, sides) = s.conclusions();
            let pat = s.pattern(registry, vars.into_iter().collect());
            for (_, concl, premise) in sides {
                let Some(premise) = premise else { continue };
                // A bare formula metavariable would fire on every fact.
                if matches!(premise, Formula::Atom(_, args) if args.is_empty() && metavars_in(premise).iter().any(|n| s.formula_vars.contains(n))) {
                    continue;
                }
                for (pp, st) in known.solve(premise, &pat, MatchState::default()) {
                    let conclusion = st.apply(concl);
                    let open = metavars_in(concl).iter().any(|n| {
                        s.pred_vars.iter().any(|(p, _)| p == n && !st.binding.preds.contains_key(n))
                            || s.formula_vars.iter().any(|p| p == n && !st.binding.formulas.contains_key(n))
                            || s.quant_vars.iter().any(|(p, _)| p == n && !st.binding.quants.contains_key(n))
                    });
                    if !open {
                        push(ProofStep::node(Rule::SchemaApply(s.display_name().to_string()), conclusion, vec![pp]), &known);
                    }
                }
            }
        }
        // Right-up quantifiers lose one conjunct of the body at a time.
        for i in 0..known.proofs.len() {
            let p = &known.proofs[i];
            let Formula::Quant { q, var, restrictor, body } = &p.formula else { continue };
            if !registry.verified(q).is_ok_and(|d| d.profile.right == Monotonicity::Up) {
                continue;
            }
            let parts = conjuncts(body);
            if parts.len() < 2 {
                continue;
            }
            for skip in 0..parts.len() {
                let kept: Vec<Formula> = parts.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, f)| (*f).clone()).collect();
                let weaker = Formula::quant(q.clone(), var.clone(), (**restrictor).clone(), Formula::conjoin(kept));
                push(ProofStep::node(Rule::MonotoneQuant, weaker, vec![p.clone()]), &known);
            }
        }
        // Universally quantified implications among the known formulas.
        for i in 0..known.proofs.len() {
            let conditionals: Vec<Entry> = entries(&known.proofs[i].formula, Rule::FactMatch)
                .into_iter()
                .filter(|e| matches!(e.body, Formula::Implies(..)))
                .collect();
            for e in conditionals {
                let Formula::Implies(ante, concl) = &e.body else { continue };
                let pat = Pattern::first_order(registry, e.vars.iter().cloned().collect());
                for (pp, st) in known.solve(ante, &pat, MatchState::default()) {
                    let Some(mut imp) = e.proof(&st.terms) else { continue };
                    graft(&mut imp, &known.proofs[i]);
                    push(ProofStep::node(Rule::ModusPonens, st.apply(concl), vec![imp, pp]), &known);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for p in fresh {
            known.add(p);
        }
        if known.proofs.len() > FACT_CAP {
            result.exhausted = true;
            break;
        }
    }
    result.derived = known.proofs.split_off(initial).into_iter().map(|p| (p.formula.clone(), p)).collect();
    result
}
