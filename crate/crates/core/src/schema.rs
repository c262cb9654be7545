//! Second-order axiom schemas: metavariables over predicates, closed
//! formulas and quantifiers, instantiated under constraints and matched
//! against goals in the higher-order pattern fragment.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::logic::{
    all_vars, alpha_equivalent, beta_apply, fresh_name, substitute_many, Formula, FreeVars, Name,
    PredExpr, QuantSym, Signature, Term,
};
use crate::quant::{Monotonicity, QuantRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantConstraint {
    RightUp,
    RightDown,
    Any,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub name: Option<Name>,
    pub pred_vars: Vec<(Name, usize)>,
    pub formula_vars: Vec<Name>,
    pub quant_vars: Vec<(Name, QuantConstraint)>,
    pub body: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SchemaBinding {
    pub preds: BTreeMap<Name, PredExpr>,
    pub formulas: BTreeMap<Name, Formula>,
    pub quants: BTreeMap<Name, QuantSym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("metavariable `{0}` is not bound")]
    Unbound(Name),
    #[error("`{var}` bound to `{quant}`, which is not {constraint:?}")]
    Constraint { var: Name, quant: String, constraint: QuantConstraint },
    #[error("`{var}` has arity {expected} but its binding has arity {found}")]
    Arity { var: Name, expected: usize, found: usize },
    #[error("formula variable `{0}` must be bound to a closed formula")]
    NotClosed(Name),
    #[error("quantifier error: {0}")]
    Quant(#[from] crate::quant::QuantError),
    #[error("{count} instances exceed the ceiling of {ceiling} ({formula})")]
    Ceiling { count: u128, ceiling: u128, formula: String },
}

impl Schema {
    pub fn new(body: Formula) -> Self {
        Schema { name: None, pred_vars: Vec::new(), formula_vars: Vec::new(), quant_vars: Vec::new(), body }
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("anonymous")
    }

    pub(crate) fn pattern<'a>(&'a self, registry: &'a QuantRegistry, term_vars: BTreeSet<Name>) -> Pattern<'a> {
        Pattern {
            pred_vars: self.pred_vars.iter().cloned().collect(),
            formula_vars: self.formula_vars.iter().cloned().collect(),
            quant_vars: self.quant_vars.iter().cloned().collect(),
            term_vars,
            registry,
        }
    }

    /// The signature extended with this schema's metavariables, for
    /// well-formedness checking of the body.
    pub fn extend_signature(&self, sig: &Signature) -> Signature {
        let mut s = sig.clone();
        for (p, a) in &self.pred_vars {
            s.predicates.insert(p.clone(), *a);
        }
        for f in &self.formula_vars {
            s.predicates.insert(f.clone(), 0);
        }
        for (q, _) in &self.quant_vars {
            s.quantifiers.insert(q.clone(), false);
        }
        s
    }

    /// Candidate conclusions of the body after stripping outer universals:
    /// the consequent of an implication, either side of an equivalence, or
    /// the whole matrix. Each comes with its premise, if any.
    pub fn conclusions(&self) -> (Vec<Name>, Vec<(Side, &Formula, Option<&Formula>)>) {
        let (vars, matrix) = self.body.strip_universals();
        let out = match matrix {
            Formula::Implies(a, c) => vec![(Side::Consequent, &**c, Some(&**a))],
            Formula::Equiv(l, r) => vec![(Side::EquivLeft, &**l, Some(&**r)), (Side::EquivRight, &**r, Some(&**l))],
            other => vec![(Side::Whole, other, None)],
        };
        (vars, out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Consequent,
    EquivLeft,
    EquivRight,
    Whole,
}

impl QuantConstraint {
    pub fn admits(self, registry: &QuantRegistry, q: &QuantSym) -> bool {
        match self {
            QuantConstraint::Any => registry.lookup(q).is_ok(),
            QuantConstraint::RightUp => registry.lookup(q).is_ok_and(|d| d.profile.right == Monotonicity::Up),
            QuantConstraint::RightDown => registry.lookup(q).is_ok_and(|d| d.profile.right == Monotonicity::Down),
        }
    }
}

/// Metavariable bindings plus first-order bindings of stripped universals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchState {
    pub binding: SchemaBinding,
    pub terms: BTreeMap<Name, Term>,
}

impl MatchState {
    /// Replaces every bound metavariable and term variable in `template`.
    pub fn apply(&self, template: &Formula) -> Formula {
        let avoid: BTreeSet<Name> = self
            .binding
            .preds
            .values()
            .flat_map(|p| p.free_vars())
            .chain(self.terms.values().flat_map(|t| t.free_vars()))
            .collect();
        let renamed = rename_binders(template, &avoid);
        // Term variables go through fresh placeholders: substituting values
        // first would expose them to metavariable replacement, substituting
        // them last would hit same-named free variables of predicate bindings.
        let mut used = avoid;
        used.extend(all_vars(&renamed));
        let mut placeholders = BTreeMap::new();
        let mut values = BTreeMap::new();
        for (v, t) in &self.terms {
            let p = fresh_name(v, &used);
            used.insert(p.clone());
            placeholders.insert(v.clone(), Term::Var(p.clone()));
            values.insert(p, t.clone());
        }
        let inst = apply_binding(&substitute_many(&renamed, &placeholders), &self.binding);
        substitute_many(&inst, &values)
    }
}

/// A template with designated metavariables and flexible first-order variables.
pub struct Pattern<'a> {
    pub pred_vars: BTreeMap<Name, usize>,
    pub formula_vars: BTreeSet<Name>,
    pub quant_vars: BTreeMap<Name, QuantConstraint>,
    pub term_vars: BTreeSet<Name>,
    pub registry: &'a QuantRegistry,
}

#[derive(Default)]
struct Scope {
    tmpl: Vec<Name>,
    goal: Vec<Name>,
}

impl Scope {
    fn push(&mut self, t: &[Name], g: &[Name]) {
        self.tmpl.extend(t.iter().cloned());
        self.goal.extend(g.iter().cloned());
    }

    fn pop(&mut self, n: usize) {
        self.tmpl.truncate(self.tmpl.len() - n);
        self.goal.truncate(self.goal.len() - n);
    }

    fn tmpl_index(&self, v: &Name) -> Option<usize> {
        self.tmpl.iter().rposition(|x| x == v)
    }

    fn goal_index(&self, v: &Name) -> Option<usize> {
        self.goal.iter().rposition(|x| x == v)
    }

    /// True if `x` mentions a variable bound inside the goal at this point.
    fn mentions_local<T: FreeVars>(&self, x: &T) -> bool {
        x.free_vars().iter().any(|v| self.goal.contains(v))
    }
}

impl<'a> Pattern<'a> {
    /// A first-order pattern with no metavariables.
    pub fn first_order(registry: &'a QuantRegistry, term_vars: BTreeSet<Name>) -> Self {
        Pattern {
            pred_vars: BTreeMap::new(),
            formula_vars: BTreeSet::new(),
            quant_vars: BTreeMap::new(),
            term_vars,
            registry,
        }
    }

    pub fn match_formula(&self, template: &Formula, target: &Formula, state: MatchState) -> Vec<MatchState> {
        self.formula(template, target, state, &mut Scope::default())
    }

    fn formula(&self, t: &Formula, g: &Formula, st: MatchState, sc: &mut Scope) -> Vec<MatchState> {
        use Formula::*;
        match (t, g) {
            (Atom(PredExpr::Const(phi), args), _) if args.is_empty() && self.formula_vars.contains(phi) => {
                if !g.is_closed() {
                    return vec![];
                }
                let mut st = st;
                match st.binding.formulas.get(phi) {
                    Some(bound) => {
                        if alpha_equivalent(bound, g) {
                            vec![st]
                        } else {
                            vec![]
                        }
                    }
                    None => {
                        st.binding.formulas.insert(phi.clone(), g.clone());
                        vec![st]
                    }
                }
            }
            (Atom(PredExpr::Const(p), args), _) if self.pred_vars.contains_key(p) => self.applied_pred(p, args, g, st, sc),
            (True, True) => vec![st],
            (Atom(p, xs), Atom(q, ys)) => {
                if xs.len() != ys.len() {
                    return vec![];
                }
                let mut states = self.pred(p, q, st, sc);
                for (x, y) in xs.iter().zip(ys) {
                    states = states.into_iter().flat_map(|s| self.term(x, y, s, sc)).collect();
                }
                states
            }
            (Eq(a, b), Eq(c, d)) => self
                .term(a, c, st, sc)
                .into_iter()
                .flat_map(|s| self.term(b, d, s, sc))
                .collect(),
            (Not(a), Not(b)) => self.formula(a, b, st, sc),
            (Modal(m, a), Modal(n, b)) if m == n => self.formula(a, b, st, sc),
            (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Implies(a, b), Implies(c, d)) | (Equiv(a, b), Equiv(c, d)) => {
                self.formula(a, c, st, sc).into_iter().flat_map(|s| self.formula(b, d, s, sc)).collect()
            }
            (Quant { q, var, restrictor, body }, Quant { q: q2, var: v2, restrictor: r2, body: b2 }) => {
                let mut st = st;
                if let Some(constraint) = self.quant_vars.get(&q.name) {
                    match st.binding.quants.get(&q.name) {
                        Some(bound) if bound != q2 => return vec![],
                        Some(_) => {}
                        None => {
                            if !constraint.admits(self.registry, q2) {
                                return vec![];
                            }
                            st.binding.quants.insert(q.name.clone(), q2.clone());
                        }
                    }
                } else if q != q2 {
                    return vec![];
                }
                sc.push(std::slice::from_ref(var), std::slice::from_ref(v2));
                let out = self
                    .formula(restrictor, r2, st, sc)
                    .into_iter()
                    .flat_map(|s| self.formula(body, b2, s, sc))
                    .collect();
                sc.pop(1);
                out
            }
            _ => vec![],
        }
    }

    fn pred(&self, t: &PredExpr, g: &PredExpr, st: MatchState, sc: &mut Scope) -> Vec<MatchState> {
        match (t, g) {
            (PredExpr::Const(p), _) if self.pred_vars.contains_key(p) => {
                if sc.mentions_local(g) {
                    return vec![];
                }
                if let PredExpr::Lambda(vs, _) = g {
                    if vs.len() != self.pred_vars[p] {
                        return vec![];
                    }
                }
                let mut st = st;
                match st.binding.preds.get(p) {
                    Some(bound) => {
                        if alpha_equivalent(bound, g) {
                            vec![st]
                        } else {
                            vec![]
                        }
                    }
                    None => {
                        st.binding.preds.insert(p.clone(), g.clone());
                        vec![st]
                    }
                }
            }
            (PredExpr::Const(a), PredExpr::Const(b)) => {
                if a == b {
                    vec![st]
                } else {
                    vec![]
                }
            }
            (PredExpr::Lambda(xs, f), PredExpr::Lambda(ys, h)) if xs.len() == ys.len() => {
                sc.push(xs, ys);
                let out = self.formula(f, h, st, sc);
                sc.pop(xs.len());
                out
            }
            (PredExpr::Modified(m, a), PredExpr::Modified(n, b)) if m == n => self.pred(a, b, st, sc),
            (PredExpr::TermDerived(o, a), PredExpr::TermDerived(p, b)) if o == p => self.term(a, b, st, sc),
            _ => vec![],
        }
    }

    fn term(&self, t: &Term, g: &Term, st: MatchState, sc: &mut Scope) -> Vec<MatchState> {
        match (t, g) {
            (Term::Var(v), _) if sc.tmpl_index(v).is_some() => match g {
                Term::Var(w) if sc.goal_index(w) == sc.tmpl_index(v) => vec![st],
                _ => vec![],
            },
            (Term::Var(v), _) if self.term_vars.contains(v) => {
                if sc.mentions_local(g) {
                    return vec![];
                }
                let mut st = st;
                match st.terms.get(v) {
                    Some(bound) => {
                        if alpha_equivalent(bound, g) {
                            vec![st]
                        } else {
                            vec![]
                        }
                    }
                    None => {
                        st.terms.insert(v.clone(), g.clone());
                        vec![st]
                    }
                }
            }
            (Term::Var(v), Term::Var(w)) => {
                if v == w && sc.goal_index(w).is_none() {
                    vec![st]
                } else {
                    vec![]
                }
            }
            (Term::Const(a), Term::Const(b)) if a == b => vec![st],
            (Term::App(f, xs), Term::App(h, ys)) if f == h && xs.len() == ys.len() => {
                let mut states = vec![st];
                for (x, y) in xs.iter().zip(ys) {
                    states = states.into_iter().flat_map(|s| self.term(x, y, s, sc)).collect();
                }
                states
            }
            (Term::Ka(p), Term::Ka(q)) => self.pred(p, q, st, sc),
            (Term::That(f), Term::That(h)) => self.formula(f, h, st, sc),
            _ => vec![],
        }
    }

    /// `P(x1..xn)` against a goal formula, `P` a predicate metavariable.
    fn applied_pred(&self, p: &Name, args: &[Term], g: &Formula, st: MatchState, sc: &mut Scope) -> Vec<MatchState> {
        if let Some(bound) = st.binding.preds.get(p) {
            // Instantiate the application and compare; template-bound
            // variables in `args` still refer to the current scope.
            let inst = beta_apply(bound, args);
            return self.formula(&inst, g, st, sc);
        }
        if args.len() != self.pred_vars[p] {
            return vec![];
        }
        // Pattern fragment: distinct variables, each bound by the template.
        let mut vars = Vec::new();
        for a in args {
            match a {
                Term::Var(v) if !vars.contains(v) && (sc.tmpl_index(v).is_some() || self.term_vars.contains(v)) => {
                    vars.push(v.clone())
                }
                _ => return vec![],
            }
        }
        // Per argument, the choices of what it abstracts in the goal.
        let mut choices: Vec<Vec<Term>> = Vec::new();
        for v in &vars {
            if let Some(i) = sc.tmpl_index(v) {
                choices.push(vec![Term::Var(sc.goal[i].clone())]);
            } else if let Some(t) = st.terms.get(v) {
                choices.push(vec![t.clone()]);
            } else {
                let cands: Vec<Term> = subterms(g).into_iter().filter(|t| !sc.mentions_local(t)).collect();
                choices.push(cands);
            }
        }
        let avoid: BTreeSet<Name> = all_vars(g).into_iter().chain(sc.goal.iter().cloned()).collect();
        let mut out = Vec::new();
        for combo in choices.into_iter().multi_cartesian_product() {
            if combo.iter().tuple_combinations().any(|(a, b)| a == b) {
                continue;
            }
            let mut avoid = avoid.clone();
            let mut params = Vec::new();
            let mut body = g.clone();
            for (v, target) in vars.iter().zip(&combo) {
                let z = if avoid.contains(v) { fresh_name(v, &avoid) } else { v.clone() };
                avoid.insert(z.clone());
                body = replace_term(&body, target, &Term::Var(z.clone()));
                params.push(z);
            }
            let lam = PredExpr::Lambda(params, Box::new(body));
            if sc.mentions_local(&lam) {
                continue;
            }
            let mut s = st.clone();
            for (v, target) in vars.iter().zip(&combo) {
                if sc.tmpl_index(v).is_none() {
                    s.terms.insert(v.clone(), target.clone());
                }
            }
            s.binding.preds.insert(p.clone(), eta_reduce(lam));
            out.push(s);
        }
        out
    }
}

/// `λx1..xn. p(x1..xn)` becomes `p`.
fn eta_reduce(p: PredExpr) -> PredExpr {
    if let PredExpr::Lambda(vars, body) = &p {
        if let Formula::Atom(head @ PredExpr::Const(_), args) = &**body {
            let direct = args.len() == vars.len()
                && args.iter().zip(vars).all(|(a, v)| matches!(a, Term::Var(w) if w == v));
            if direct {
                return head.clone();
            }
        }
    }
    p
}

/// Distinct argument-position subterms in order of first occurrence
/// (outside binders), including nested ones.
fn subterms(f: &Formula) -> Vec<Term> {
    fn term(t: &Term, out: &mut Vec<Term>) {
        if !out.contains(t) {
            out.push(t.clone());
        }
        if let Term::App(_, args) = t {
            args.iter().for_each(|a| term(a, out));
        }
    }
    fn formula(f: &Formula, out: &mut Vec<Term>) {
        match f {
            Formula::Atom(_, args) => args.iter().for_each(|a| term(a, out)),
            Formula::Eq(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Not(g) | Formula::Modal(_, g) => formula(g, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                formula(a, out);
                formula(b, out);
            }
            Formula::Quant { restrictor, body, .. } => {
                formula(restrictor, out);
                formula(body, out);
            }
            Formula::True => {}
        }
    }
    let mut out = Vec::new();
    formula(f, &mut out);
    // Variables bound inside `f` cannot be abstracted.
    let free = f.free_vars();
    out.retain(|t| t.free_vars().is_subset(&free));
    out
}

/// Replaces free occurrences of `target` by `by` (structural equality).
pub(crate) fn replace_term(f: &Formula, target: &Term, by: &Term) -> Formula {
    fn t(x: &Term, target: &Term, by: &Term, bound: &mut Vec<Name>) -> Term {
        if x == target && !target.free_vars().iter().any(|v| bound.contains(v)) {
            return by.clone();
        }
        match x {
            Term::App(fname, args) => Term::App(fname.clone(), args.iter().map(|a| t(a, target, by, bound)).collect()),
            Term::Ka(p) => Term::Ka(Box::new(pe(p, target, by, bound))),
            Term::That(g) => Term::That(Box::new(fo(g, target, by, bound))),
            _ => x.clone(),
        }
    }
    fn pe(p: &PredExpr, target: &Term, by: &Term, bound: &mut Vec<Name>) -> PredExpr {
        match p {
            PredExpr::Const(_) => p.clone(),
            PredExpr::Lambda(vs, body) => {
                bound.extend(vs.iter().cloned());
                let b = fo(body, target, by, bound);
                bound.truncate(bound.len() - vs.len());
                PredExpr::Lambda(vs.clone(), Box::new(b))
            }
            PredExpr::Modified(m, base) => PredExpr::Modified(m.clone(), Box::new(pe(base, target, by, bound))),
            PredExpr::TermDerived(o, x) => PredExpr::TermDerived(o.clone(), Box::new(t(x, target, by, bound))),
        }
    }
    fn fo(f: &Formula, target: &Term, by: &Term, bound: &mut Vec<Name>) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::Atom(p, args) => {
                Formula::Atom(pe(p, target, by, bound), args.iter().map(|a| t(a, target, by, bound)).collect())
            }
            Formula::Eq(a, b) => Formula::Eq(t(a, target, by, bound), t(b, target, by, bound)),
            Formula::Not(g) => Formula::not(fo(g, target, by, bound)),
            Formula::Modal(m, g) => Formula::Modal(*m, Box::new(fo(g, target, by, bound))),
            Formula::And(a, b) => Formula::and(fo(a, target, by, bound), fo(b, target, by, bound)),
            Formula::Or(a, b) => Formula::or(fo(a, target, by, bound), fo(b, target, by, bound)),
            Formula::Implies(a, b) => Formula::implies(fo(a, target, by, bound), fo(b, target, by, bound)),
            Formula::Equiv(a, b) => Formula::equiv(fo(a, target, by, bound), fo(b, target, by, bound)),
            Formula::Quant { q, var, restrictor, body } => {
                bound.push(var.clone());
                let r = fo(restrictor, target, by, bound);
                let b = fo(body, target, by, bound);
                bound.pop();
                Formula::quant(q.clone(), var.clone(), r, b)
            }
        }
    }
    fo(f, target, by, &mut Vec::new())
}

/// Renames binders of `f` whose names are in `avoid`.
fn rename_binders(f: &Formula, avoid: &BTreeSet<Name>) -> Formula {
    if avoid.is_empty() {
        return f.clone();
    }
    fn go(f: &Formula, avoid: &BTreeSet<Name>, used: &mut BTreeSet<Name>) -> Formula {
        match f {
            Formula::Quant { q, var, restrictor, body } if avoid.contains(var) => {
                let z = fresh_name(var, used);
                used.insert(z.clone());
                let map = BTreeMap::from([(var.clone(), Term::Var(z.clone()))]);
                let r = go(&substitute_many(restrictor, &map), avoid, used);
                let b = go(&substitute_many(body, &map), avoid, used);
                Formula::quant(q.clone(), z, r, b)
            }
            Formula::Quant { q, var, restrictor, body } => {
                Formula::quant(q.clone(), var.clone(), go(restrictor, avoid, used), go(body, avoid, used))
            }
            Formula::Not(g) => Formula::not(go(g, avoid, used)),
            Formula::Modal(m, g) => Formula::Modal(*m, Box::new(go(g, avoid, used))),
            Formula::And(a, b) => Formula::and(go(a, avoid, used), go(b, avoid, used)),
            Formula::Or(a, b) => Formula::or(go(a, avoid, used), go(b, avoid, used)),
            Formula::Implies(a, b) => Formula::implies(go(a, avoid, used), go(b, avoid, used)),
            Formula::Equiv(a, b) => Formula::equiv(go(a, avoid, used), go(b, avoid, used)),
            other => other.clone(),
        }
    }
    let mut used: BTreeSet<Name> = all_vars(f).union(avoid).cloned().collect();
    go(f, avoid, &mut used)
}

/// Substitutes bound metavariables; unbound ones are left in place.
fn apply_binding(f: &Formula, b: &SchemaBinding) -> Formula {
    fn pe(p: &PredExpr, b: &SchemaBinding) -> PredExpr {
        match p {
            PredExpr::Const(name) => b.preds.get(name).cloned().unwrap_or_else(|| p.clone()),
            PredExpr::Lambda(vs, body) => PredExpr::Lambda(vs.clone(), Box::new(fo(body, b))),
            PredExpr::Modified(m, base) => PredExpr::Modified(m.clone(), Box::new(pe(base, b))),
            PredExpr::TermDerived(o, t) => PredExpr::TermDerived(o.clone(), Box::new(te(t, b))),
        }
    }
    fn te(t: &Term, b: &SchemaBinding) -> Term {
        match t {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| te(a, b)).collect()),
            Term::Ka(p) => Term::Ka(Box::new(pe(p, b))),
            Term::That(g) => Term::That(Box::new(fo(g, b))),
            _ => t.clone(),
        }
    }
    fn fo(f: &Formula, b: &SchemaBinding) -> Formula {
        match f {
            Formula::Atom(PredExpr::Const(phi), args) if args.is_empty() && b.formulas.contains_key(phi) => {
                b.formulas[phi].clone()
            }
            Formula::Atom(PredExpr::Const(p), args) if b.preds.contains_key(p) => {
                let args: Vec<Term> = args.iter().map(|a| te(a, b)).collect();
                beta_apply(&b.preds[p], &args)
            }
            Formula::Atom(p, args) => Formula::Atom(pe(p, b), args.iter().map(|a| te(a, b)).collect()),
            Formula::True => Formula::True,
            Formula::Eq(x, y) => Formula::Eq(te(x, b), te(y, b)),
            Formula::Not(g) => Formula::not(fo(g, b)),
            Formula::Modal(m, g) => Formula::Modal(*m, Box::new(fo(g, b))),
            Formula::And(x, y) => Formula::and(fo(x, b), fo(y, b)),
            Formula::Or(x, y) => Formula::or(fo(x, b), fo(y, b)),
            Formula::Implies(x, y) => Formula::implies(fo(x, b), fo(y, b)),
            Formula::Equiv(x, y) => Formula::equiv(fo(x, b), fo(y, b)),
            Formula::Quant { q, var, restrictor, body } => {
                let q = b.quants.get(&q.name).cloned().unwrap_or_else(|| q.clone());
                Formula::quant(q, var.clone(), fo(restrictor, b), fo(body, b))
            }
        }
    }
    fo(f, b)
}

fn check_binding(s: &Schema, b: &SchemaBinding, registry: &QuantRegistry) -> Result<(), SchemaError> {
    for (p, arity) in &s.pred_vars {
        let pe = b.preds.get(p).ok_or_else(|| SchemaError::Unbound(p.clone()))?;
        if let PredExpr::Lambda(vs, _) = pe {
            if vs.len() != *arity {
                return Err(SchemaError::Arity { var: p.clone(), expected: *arity, found: vs.len() });
            }
        }
    }
    for phi in &s.formula_vars {
        let f = b.formulas.get(phi).ok_or_else(|| SchemaError::Unbound(phi.clone()))?;
        if !f.is_closed() {
            return Err(SchemaError::NotClosed(phi.clone()));
        }
    }
    for (q, constraint) in &s.quant_vars {
        let sym = b.quants.get(q).ok_or_else(|| SchemaError::Unbound(q.clone()))?;
        registry.lookup(sym)?;
        if !constraint.admits(registry, sym) {
            return Err(SchemaError::Constraint { var: q.clone(), quant: sym.to_string(), constraint: *constraint });
        }
    }
    Ok(())
}

/// The schema body with every metavariable replaced; lambda bindings are
/// beta-reduced where applied.
pub fn instantiate(s: &Schema, b: &SchemaBinding, registry: &QuantRegistry) -> Result<Formula, SchemaError> {
    check_binding(s, b, registry)?;
    Ok(MatchState { binding: b.clone(), terms: BTreeMap::new() }.apply(&s.body))
}

/// One way a goal matches a schema conclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaMatch {
    pub side: Side,
    pub state: MatchState,
}

impl SchemaMatch {
    pub fn binding(&self) -> &SchemaBinding {
        &self.state.binding
    }

    fn parts<'s>(&self, s: &'s Schema) -> (&'s Formula, Option<&'s Formula>) {
        let (_, concl) = s.conclusions();
        let (_, c, p) = concl.into_iter().find(|(side, ..)| *side == self.side).expect("side from this schema");
        (c, p)
    }

    /// The conclusion under this match.
    pub fn conclusion(&self, s: &Schema) -> Formula {
        self.state.apply(self.parts(s).0)
    }

    /// The premise template (uninstantiated), if the conclusion has one.
    pub fn premise_template<'s>(&self, s: &'s Schema) -> Option<&'s Formula> {
        self.parts(s).1
    }

    /// The premise with every bound metavariable substituted.
    pub fn premise(&self, s: &Schema) -> Option<Formula> {
        self.premise_template(s).map(|p| self.state.apply(p))
    }

    /// True when the premise mentions no unbound metavariable or stripped universal.
    pub fn is_complete(&self, s: &Schema) -> bool {
        let Some(p) = self.premise_template(s) else { return true };
        let (vars, _) = s.body.strip_universals();
        let mentioned = metavars_in(p);
        let fv = p.free_vars();
        s.pred_vars.iter().all(|(n, _)| !mentioned.contains(n) || self.state.binding.preds.contains_key(n))
            && s.formula_vars.iter().all(|n| !mentioned.contains(n) || self.state.binding.formulas.contains_key(n))
            && s.quant_vars.iter().all(|(n, _)| !mentioned.contains(n) || self.state.binding.quants.contains_key(n))
            && vars.iter().all(|v| !fv.contains(v) || self.state.terms.contains_key(v))
    }

    /// Extends this match so that its premise equals `target`; used to fill
    /// metavariables that occur only in the premise.
    pub fn complete_against(&self, s: &Schema, target: &Formula, registry: &QuantRegistry) -> Vec<SchemaMatch> {
        let Some(p) = self.premise_template(s) else { return vec![] };
        let (vars, _) = s.body.strip_universals();
        let pat = s.pattern(registry, vars.into_iter().collect());
        pat.match_formula(p, target, self.state.clone())
            .into_iter()
            .map(|state| SchemaMatch { side: self.side, state })
            .collect()
    }
}

/// Predicate, formula and quantifier symbol names occurring in `f`.
pub(crate) fn metavars_in(f: &Formula) -> BTreeSet<Name> {
    fn pe(p: &PredExpr, out: &mut BTreeSet<Name>) {
        match p {
            PredExpr::Const(n) => {
                out.insert(n.clone());
            }
            PredExpr::Lambda(_, b) => fo(b, out),
            PredExpr::Modified(_, b) => pe(b, out),
            PredExpr::TermDerived(_, t) => te(t, out),
        }
    }
    fn te(t: &Term, out: &mut BTreeSet<Name>) {
        match t {
            Term::App(_, args) => args.iter().for_each(|a| te(a, out)),
            Term::Ka(p) => pe(p, out),
            Term::That(g) => fo(g, out),
            _ => {}
        }
    }
    fn fo(f: &Formula, out: &mut BTreeSet<Name>) {
        match f {
            Formula::Atom(p, args) => {
                pe(p, out);
                args.iter().for_each(|a| te(a, out));
            }
            Formula::Eq(a, b) => {
                te(a, out);
                te(b, out);
            }
            Formula::Not(g) | Formula::Modal(_, g) => fo(g, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                fo(a, out);
                fo(b, out);
            }
            Formula::Quant { q, restrictor, body, .. } => {
                out.insert(q.name.clone());
                fo(restrictor, out);
                fo(body, out);
            }
            Formula::True => {}
        }
    }
    let mut out = BTreeSet::new();
    fo(f, &mut out);
    out
}

/// Every way `goal` matches a conclusion position of `s`. Metavariables that
/// occur only in the premise stay unbound.
pub fn match_conclusion(s: &Schema, goal: &Formula, registry: &QuantRegistry) -> Vec<SchemaMatch> {
    let (vars, conclusions) = s.conclusions();
    let pat = s.pattern(registry, vars.into_iter().collect());
    let mut out = Vec::new();
    for (side, concl, _) in conclusions {
        for state in pat.match_formula(concl, goal, MatchState::default()) {
            let m = SchemaMatch { side, state };
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct InstanceBounds {
    /// Closed formulas for formula metavariables; `None` means every ground
    /// atom over the signature's predicates and constants.
    pub formula_candidates: Option<Vec<Formula>>,
    pub ceiling: u128,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        InstanceBounds { formula_candidates: None, ceiling: 1_000_000 }
    }
}

/// Every atom `p(c1..cn)` over the signature's predicates and constants.
pub fn ground_atoms(sig: &Signature) -> Vec<Formula> {
    let consts: Vec<Term> = sig.constants.iter().map(|c| Term::Const(c.clone())).collect();
    let mut out = Vec::new();
    for (p, arity) in &sig.predicates {
        if *arity == 0 {
            out.push(Formula::atom(p.clone(), vec![]));
            continue;
        }
        for args in std::iter::repeat(consts.clone()).take(*arity).multi_cartesian_product() {
            out.push(Formula::atom(p.clone(), args));
        }
    }
    out
}

/// All instances with predicate metavariables bound to predicate constants
/// of matching arity, quantifier metavariables to admissible registry
/// quantifiers, and formula metavariables to the bounded candidate set.
pub fn enumerate_instances(
    s: &Schema,
    sig: &Signature,
    bounds: &InstanceBounds,
    registry: &QuantRegistry,
) -> Result<Vec<Formula>, SchemaError> {
    let mut axes: Vec<Vec<Slot>> = Vec::new();
    for (p, arity) in &s.pred_vars {
        axes.push(
            sig.predicates
                .iter()
                .filter(|(_, a)| *a == arity)
                .map(|(name, _)| Slot::Pred(p.clone(), PredExpr::Const(name.clone())))
                .collect(),
        );
    }
    let formulas = match &bounds.formula_candidates {
        Some(c) => c.clone(),
        None if s.formula_vars.is_empty() => Vec::new(),
        None => ground_atoms(sig),
    };
    for phi in &s.formula_vars {
        axes.push(formulas.iter().filter(|f| f.is_closed()).map(|f| Slot::Formula(phi.clone(), f.clone())).collect());
    }
    for (q, c) in &s.quant_vars {
        axes.push(
            registry
                .instances()
                .into_iter()
                .map(|d| d.symbol())
                .filter(|sym| c.admits(registry, sym))
                .map(|sym| Slot::Quant(q.clone(), sym))
                .collect(),
        );
    }
    let count = axes.iter().fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128));
    if count > bounds.ceiling {
        let formula = axes.iter().map(|a| a.len().to_string()).collect::<Vec<_>>().join(" x ");
        return Err(SchemaError::Ceiling { count, ceiling: bounds.ceiling, formula });
    }
    if axes.is_empty() {
        return Ok(vec![s.body.clone()]);
    }
    let mut out = Vec::with_capacity(count as usize);
    for combo in axes.into_iter().multi_cartesian_product() {
        let mut b = SchemaBinding::default();
        for slot in combo {
            match slot {
                Slot::Pred(n, p) => {
                    b.preds.insert(n, p);
                }
                Slot::Formula(n, f) => {
                    b.formulas.insert(n, f);
                }
                Slot::Quant(n, q) => {
                    b.quants.insert(n, q);
                }
            }
        }
        out.push(instantiate(s, &b, registry)?);
    }
    Ok(out)
}

#[derive(Clone)]
enum Slot {
    Pred(Name, PredExpr),
    Formula(Name, Formula),
    Quant(Name, QuantSym),
}

#[cfg(test)]
mod tests;
