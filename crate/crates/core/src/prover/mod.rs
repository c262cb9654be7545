//! Bounded backward chaining over a knowledge base. Every proof comes back
//! as a [`ProofStep`] tree that [`validate`] can re-check rule by rule.
//!
//! Rules are tried in a fixed order: reflexivity, facts (directly and
//! through universally quantified implications), axioms in file order,
//! schemas, the monotone quantifier rule, then the structural rules.
//! Lexical budgets are searched in increasing order, so the first proof
//! found uses as few axiom and schema applications as the search allows.

mod clauses;
mod forward;
mod replay;
mod trace;
mod unify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

pub use clauses::{axiom_clauses, Clause};
pub use forward::{forward_chain, ForwardResult};
pub use replay::{validate, ReplayError};
pub use trace::{ProofStep, Rule};
pub use unify::{resolve, resolve_formula, unify, unify_terms, Bindings};

use clauses::{conjuncts, disjuncts, entries, proper_positions, replace_at, subformula_at, subformulas, Entry};
use crate::kb::KnowledgeBase;
use crate::logic::{alpha_equivalent, canonical, Formula, FreeVars, Name, QuantSym};
use crate::quant::{Monotonicity, QuantRegistry};
use crate::schema::{match_conclusion, metavars_in, MatchState, Pattern};

const SOLUTION_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    pub max_depth: usize,
    pub max_lexical_steps: usize,
    pub timeout_ms: u64,
}

impl Default for ProverConfig {
    /// Depth 8, 4 lexical steps, and `ELFOL_TIMEOUT_MS` or ten seconds.
    fn default() -> Self {
        let timeout_ms = std::env::var("ELFOL_TIMEOUT_MS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|t| *t > 0)
            .unwrap_or(10_000);
        ProverConfig { max_depth: 8, max_lexical_steps: 4, timeout_ms }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Limit {
    Depth,
    LexicalSteps,
    Timeout,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limit::Depth => "depth",
            Limit::LexicalSteps => "lexical-steps",
            Limit::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(ProofStep),
    /// The search space was exhausted without hitting a bound.
    Failed,
    /// No proof within bounds; the listed bounds cut the search.
    Exhausted(Vec<Limit>),
}

#[derive(Clone, Debug)]
pub struct ProofResult {
    pub outcome: Outcome,
    /// Rule applications attempted.
    pub explored: usize,
}

impl ProofResult {
    pub fn proof(&self) -> Option<&ProofStep> {
        match &self.outcome {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        self.proof().is_some()
    }

    /// `proved`, `failed` or `exhausted(depth,timeout)`.
    pub fn label(&self) -> String {
        match &self.outcome {
            Outcome::Proved(_) => "proved".into(),
            Outcome::Failed => "failed".into(),
            Outcome::Exhausted(ls) => {
                format!("exhausted({})", ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","))
            }
        }
    }
}

/// Tries to prove the closed `goal` from `kb`.
pub fn prove(kb: &KnowledgeBase, goal: &Formula, cfg: &ProverConfig, registry: &QuantRegistry) -> ProofResult {
    Prover::new(kb, cfg, registry).run(goal)
}

struct Prover<'a> {
    kb: &'a KnowledgeBase,
    cfg: &'a ProverConfig,
    registry: &'a QuantRegistry,
    facts: Vec<Entry>,
    clauses: Vec<(Name, usize, Clause)>,
    up_sites: Vec<Formula>,
    down_sites: Vec<Formula>,
    hyps: Vec<Entry>,
    split: Vec<Formula>,
    stack: Vec<(Formula, usize)>,
    profiles: BTreeMap<QuantSym, Option<Monotonicity>>,
    explored: usize,
    hit: BTreeSet<Limit>,
    deadline: Instant,
}

impl<'a> Prover<'a> {
    fn new(kb: &'a KnowledgeBase, cfg: &'a ProverConfig, registry: &'a QuantRegistry) -> Self {
        let facts = kb.facts.iter().flat_map(|f| entries(f, Rule::FactMatch)).collect();
        let clauses = kb
            .axioms
            .iter()
            .flat_map(|a| axiom_clauses(&a.formula).into_iter().enumerate().map(|(i, c)| (a.name.clone(), i, c)))
            .collect();
        let sources: Vec<&Formula> = kb.facts.iter().chain(kb.axioms.iter().map(|a| &a.formula)).collect();
        let sites = |keep: fn(&Formula) -> bool| {
            let mut out: Vec<Formula> = Vec::new();
            for f in &sources {
                let mut found = Vec::new();
                subformulas(f, &keep, &mut found);
                for s in found {
                    if !out.contains(s) {
                        out.push(s.clone());
                    }
                }
            }
            out
        };
        Prover {
            kb,
            cfg,
            registry,
            facts,
            clauses,
            up_sites: sites(|f| matches!(f, Formula::And(..))),
            down_sites: sites(|f| matches!(f, Formula::Or(..))),
            hyps: Vec::new(),
            split: Vec::new(),
            stack: Vec::new(),
            profiles: BTreeMap::new(),
            explored: 0,
            hit: BTreeSet::new(),
            deadline: Instant::now() + Duration::from_millis(cfg.timeout_ms),
        }
    }

    fn run(mut self, goal: &Formula) -> ProofResult {
        for budget in 0..=self.cfg.max_lexical_steps {
            self.hit.clear();
            if let Some(p) = self.prove(goal, 0, budget) {
                return ProofResult { outcome: Outcome::Proved(p), explored: self.explored };
            }
            // A larger budget only helps if this one cut something off.
            if self.hit.contains(&Limit::Timeout) || !self.hit.contains(&Limit::LexicalSteps) {
                break;
            }
        }
        let outcome = match self.hit.is_empty() {
            true => Outcome::Failed,
            false => Outcome::Exhausted(self.hit.iter().copied().collect()),
        };
        ProofResult { outcome, explored: self.explored }
    }

    fn prove(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        if Instant::now() >= self.deadline {
            self.hit.insert(Limit::Timeout);
            return None;
        }
        if depth > self.cfg.max_depth {
            self.hit.insert(Limit::Depth);
            return None;
        }
        let key = (canonical(goal), self.hyps.len());
        if self.stack.contains(&key) {
            return None;
        }
        self.stack.push(key);
        let found = self.expand(goal, depth, budget);
        self.stack.pop();
        found
    }

    fn expand(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        self.reflexivity(goal)
            .or_else(|| self.lookup(goal))
            .or_else(|| self.modus_ponens(goal, depth, budget))
            .or_else(|| self.axioms(goal, depth, budget))
            .or_else(|| self.schemas(goal, depth, budget))
            .or_else(|| self.monotone(goal, depth, budget))
            .or_else(|| self.and_intro(goal, depth, budget))
            .or_else(|| self.or_intro(goal, depth, budget))
            .or_else(|| self.implies_intro(goal, depth, budget))
            .or_else(|| self.equiv_rewrite(goal, depth, budget))
            .or_else(|| self.or_elim(goal, depth, budget))
    }

    fn reflexivity(&mut self, goal: &Formula) -> Option<ProofStep> {
        self.explored += 1;
        let holds = match goal {
            Formula::True => true,
            Formula::Eq(a, b) => alpha_equivalent(a, b),
            _ => false,
        };
        holds.then(|| ProofStep::leaf(Rule::Reflexivity, goal.clone()))
    }

    /// Hypotheses (innermost first) and facts.
    fn known(&self) -> impl Iterator<Item = &Entry> {
        self.hyps.iter().rev().chain(self.facts.iter())
    }

    fn lookup(&mut self, goal: &Formula) -> Option<ProofStep> {
        let mut tried = 0;
        let mut found = None;
        for e in self.known() {
            tried += 1;
            let pat = Pattern::first_order(self.registry, e.vars.iter().cloned().collect());
            if let Some(p) = pat.match_formula(&e.body, goal, MatchState::default()).iter().find_map(|st| e.proof(&st.terms)) {
                found = Some(p);
                break;
            }
        }
        self.explored += tried;
        found
    }

    fn modus_ponens(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let conditionals: Vec<Entry> =
            self.known().filter(|e| matches!(e.body, Formula::Implies(..))).cloned().collect();
        for e in conditionals {
            let Formula::Implies(ante, concl) = &e.body else { continue };
            self.explored += 1;
            let pat = Pattern::first_order(self.registry, e.vars.iter().cloned().collect());
            for st in pat.match_formula(concl, goal, MatchState::default()) {
                for (ante_proof, st) in self.solve(ante, &pat, st, depth + 1, budget) {
                    if let Some(imp) = e.proof(&st.terms) {
                        return Some(ProofStep::node(Rule::ModusPonens, goal.clone(), vec![imp, ante_proof]));
                    }
                }
            }
        }
        None
    }

    fn axioms(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        for i in 0..self.clauses.len() {
            let (axiom, index, clause) = self.clauses[i].clone();
            let pat = Pattern::first_order(self.registry, clause.vars.iter().cloned().collect());
            let matches = pat.match_formula(&clause.conclusion, goal, MatchState::default());
            if matches.is_empty() {
                continue;
            }
            if budget == 0 {
                self.hit.insert(Limit::LexicalSteps);
                return None;
            }
            self.explored += 1;
            let rule = Rule::AxiomMatch { axiom, clause: index };
            for st in matches {
                let children = match &clause.premise {
                    None => Some(vec![]),
                    Some(p) => self.solve(p, &pat, st, depth + 1, budget - 1).into_iter().next().map(|(pp, _)| vec![pp]),
                };
                if let Some(children) = children {
                    let mut step = ProofStep::node(rule, goal.clone(), children);
                    step.extraction = clause.extraction;
                    return Some(step);
                }
            }
        }
        None
    }

    fn schemas(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let kb = self.kb;
        for s in &kb.schemas {
            let matches = match_conclusion(s, goal, self.registry);
            if matches.is_empty() {
                continue;
            }
            if budget == 0 {
                self.hit.insert(Limit::LexicalSteps);
                return None;
            }
            let (vars, _) = s.body.strip_universals();
            let pat = s.pattern(self.registry, vars.into_iter().collect());
            let rule = Rule::SchemaApply(s.display_name().to_string());
            for m in matches {
                self.explored += 1;
                match m.premise_template(s) {
                    None => return Some(ProofStep::leaf(rule, goal.clone())),
                    Some(p) => {
                        if let Some((pp, _)) = self.solve(p, &pat, m.state.clone(), depth + 1, budget - 1).into_iter().next() {
                            return Some(ProofStep::node(rule, goal.clone(), vec![pp]));
                        }
                    }
                }
            }
        }
        None
    }

    fn direction(&mut self, q: &QuantSym) -> Monotonicity {
        let registry = self.registry;
        self.profiles
            .entry(q.clone())
            .or_insert_with(|| registry.verified(q).ok().map(|d| d.profile.right))
            .unwrap_or(Monotonicity::None)
    }

    /// `Q x R B` from `Q x R B'` where `B'` strengthens `B` by conjuncts
    /// (right-up `Q`) or weakens it by disjuncts (right-down `Q`). Candidate
    /// `B'` come from conjunctions or disjunctions in the facts and axioms.
    fn monotone(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let Formula::Quant { q, var, restrictor, body } = goal else { return None };
        let (sites, parts): (Vec<Formula>, fn(&Formula) -> Vec<&Formula>) = match self.direction(q) {
            Monotonicity::Up => (self.up_sites.clone(), conjuncts),
            Monotonicity::Down => (self.down_sites.clone(), disjuncts),
            Monotonicity::None => return None,
        };
        let mut tried = BTreeSet::new();
        for site in &sites {
            let pat = Pattern::first_order(self.registry, site.free_vars());
            for part in parts(site) {
                for st in pat.match_formula(part, body, MatchState::default()) {
                    let wider = st.apply(site);
                    if wider.free_vars().iter().any(|v| v != var) || alpha_equivalent(&wider, &**body) {
                        continue;
                    }
                    let sub = Formula::quant(q.clone(), var.clone(), (**restrictor).clone(), wider);
                    if !tried.insert(canonical(&sub)) {
                        continue;
                    }
                    self.explored += 1;
                    if let Some(p) = self.prove(&sub, depth + 1, budget) {
                        return Some(ProofStep::node(Rule::MonotoneQuant, goal.clone(), vec![p]));
                    }
                }
            }
        }
        None
    }

    fn and_intro(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let parts: Vec<Formula> = conjuncts(goal).into_iter().cloned().collect();
        if parts.len() < 2 {
            return None;
        }
        self.explored += 1;
        let mut left = budget;
        let mut proofs = Vec::new();
        for p in &parts {
            let proof = self.prove(p, depth + 1, left)?;
            left -= proof.lexical_steps();
            proofs.push(proof);
        }
        Some(ProofStep::node(Rule::AndIntro, goal.clone(), proofs))
    }

    fn or_intro(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let parts: Vec<Formula> = disjuncts(goal).into_iter().cloned().collect();
        if parts.len() < 2 {
            return None;
        }
        for p in &parts {
            self.explored += 1;
            if let Some(proof) = self.prove(p, depth + 1, budget) {
                return Some(ProofStep::node(Rule::OrIntro, goal.clone(), vec![proof]));
            }
        }
        None
    }

    fn implies_intro(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let Formula::Implies(ante, concl) = goal else { return None };
        self.explored += 1;
        let assumed = entries(ante, Rule::Hypothesis);
        let n = assumed.len();
        self.hyps.extend(assumed);
        let r = self.prove(concl, depth + 1, budget);
        self.hyps.truncate(self.hyps.len() - n);
        r.map(|p| ProofStep::node(Rule::ImpliesIntro, goal.clone(), vec![p]))
    }

    /// Replaces a proper subformula by the other side of a universally
    /// closed equivalence axiom, in either direction.
    fn equiv_rewrite(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let equivs: Vec<(Name, usize, Clause)> = self
            .clauses
            .iter()
            .filter(|(_, _, c)| c.premise.is_none() && matches!(c.conclusion, Formula::Equiv(..)))
            .cloned()
            .collect();
        if equivs.is_empty() {
            return None;
        }
        for path in proper_positions(goal) {
            let sub = subformula_at(goal, &path).expect("position from this goal").clone();
            for (axiom, index, clause) in &equivs {
                let Formula::Equiv(l, r) = &clause.conclusion else { continue };
                let pat = Pattern::first_order(self.registry, clause.vars.iter().cloned().collect());
                for (from, to, forward) in [(l, r, true), (r, l, false)] {
                    for st in pat.match_formula(from, &sub, MatchState::default()) {
                        if to.free_vars().iter().any(|v| pat.term_vars.contains(v) && !st.terms.contains_key(v)) {
                            continue;
                        }
                        if budget == 0 {
                            self.hit.insert(Limit::LexicalSteps);
                            return None;
                        }
                        self.explored += 1;
                        let replacement = st.apply(to);
                        let rewritten = replace_at(goal, &path, &replacement);
                        let instance = match forward {
                            true => Formula::equiv(sub.clone(), replacement),
                            false => Formula::equiv(replacement, sub.clone()),
                        };
                        let closed = instance.free_vars().into_iter().rev().fold(instance, |f, v| Formula::forall(v, f));
                        if let Some(p) = self.prove(&rewritten, depth + 1, budget - 1) {
                            let mut eq = ProofStep::leaf(Rule::AxiomMatch { axiom: axiom.clone(), clause: *index }, closed);
                            eq.extraction = clause.extraction;
                            return Some(ProofStep::node(Rule::EquivRewrite, goal.clone(), vec![eq, p]));
                        }
                    }
                }
            }
        }
        None
    }

    /// Case split on a known ground disjunction, each used once per branch.
    fn or_elim(&mut self, goal: &Formula, depth: usize, budget: usize) -> Option<ProofStep> {
        let cands: Vec<Entry> =
            self.known().filter(|e| e.is_ground() && matches!(e.body, Formula::Or(..))).cloned().collect();
        for e in cands {
            let key = canonical(&e.body);
            if self.split.contains(&key) {
                continue;
            }
            let Some(disj_proof) = e.proof(&BTreeMap::new()) else { continue };
            self.explored += 1;
            self.split.push(key);
            let mut branches = vec![disj_proof];
            let mut left = budget;
            for d in disjuncts(&e.body) {
                let assumed = entries(d, Rule::Hypothesis);
                let n = assumed.len();
                self.hyps.extend(assumed);
                let r = self.prove(goal, depth + 1, left);
                self.hyps.truncate(self.hyps.len() - n);
                match r {
                    Some(p) => {
                        left -= p.lexical_steps();
                        branches.push(p);
                    }
                    None => break,
                }
            }
            self.split.pop();
            if branches.len() == disjuncts(&e.body).len() + 1 {
                return Some(ProofStep::node(Rule::OrElim, goal.clone(), branches));
            }
        }
        None
    }

    fn instantiated(tmpl: &Formula, pat: &Pattern, st: &MatchState) -> bool {
        let b = &st.binding;
        tmpl.free_vars().iter().all(|v| !pat.term_vars.contains(v) || st.terms.contains_key(v))
            && metavars_in(tmpl).iter().all(|n| {
                (!pat.pred_vars.contains_key(n) || b.preds.contains_key(n))
                    && (!pat.formula_vars.contains(n) || b.formulas.contains_key(n))
                    && (!pat.quant_vars.contains_key(n) || b.quants.contains_key(n))
            })
    }

    /// Proves instances of a premise template. Conjunctions are solved left
    /// to right; an open conjunct is matched against ground known formulas,
    /// a fully bound one is proved outright.
    fn solve(
        &mut self,
        tmpl: &Formula,
        pat: &Pattern,
        st: MatchState,
        depth: usize,
        budget: usize,
    ) -> Vec<(ProofStep, MatchState)> {
        if Self::instantiated(tmpl, pat, &st) {
            let g = st.apply(tmpl);
            return self.prove(&g, depth, budget).map(|p| (p, st)).into_iter().collect();
        }
        let parts = conjuncts(tmpl);
        if parts.len() > 1 {
            let mut partial = vec![(Vec::new(), st, budget)];
            for part in parts {
                let mut next = Vec::new();
                'outer: for (proofs, s, left) in partial {
                    for (p, s2) in self.solve(part, pat, s, depth, left) {
                        let used = p.lexical_steps();
                        let mut ps: Vec<ProofStep> = proofs.clone();
                        ps.push(p);
                        next.push((ps, s2, left - used));
                        if next.len() >= SOLUTION_CAP {
                            break 'outer;
                        }
                    }
                }
                partial = next;
            }
            return partial
                .into_iter()
                .map(|(ps, s, _)| (ProofStep::node(Rule::AndIntro, s.apply(tmpl), ps), s))
                .collect();
        }
        let mut out = Vec::new();
        let mut tried = 0;
        for e in self.known().filter(|e| e.is_ground()) {
            tried += 1;
            for s in pat.match_formula(tmpl, &e.body, st.clone()) {
                if let Some(p) = e.proof(&BTreeMap::new()) {
                    out.push((p, s));
                }
            }
            if out.len() >= SOLUTION_CAP {
                break;
            }
        }
        self.explored += tried;
        out
    }
}

#[cfg(test)]
mod tests;
