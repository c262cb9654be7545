use std::collections::{BTreeMap, BTreeSet};

use super::{Formula, Name, PredExpr, Term};

pub trait FreeVars {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>);

    fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

impl FreeVars for Term {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Ka(p) => p.collect_free(bound, out),
            Term::That(f) => f.collect_free(bound, out),
        }
    }
}

impl FreeVars for PredExpr {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            PredExpr::Const(_) => {}
            PredExpr::Lambda(vars, body) => {
                let n = bound.len();
                bound.extend(vars.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            PredExpr::Modified(_, base) => base.collect_free(bound, out),
            PredExpr::TermDerived(_, t) => t.collect_free(bound, out),
        }
    }
}

impl FreeVars for Formula {
    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::True => {}
            Formula::Atom(p, args) => {
                p.collect_free(bound, out);
                args.iter().for_each(|a| a.collect_free(bound, out));
            }
            Formula::Eq(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Not(f) | Formula::Modal(_, f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant { var, restrictor, body, .. } => {
                bound.push(var.clone());
                restrictor.collect_free(bound, out);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }
}

/// Every variable name occurring anywhere, bound or free.
pub fn all_vars(f: &Formula) -> BTreeSet<Name> {
    fn term(t: &Term, out: &mut BTreeSet<Name>) {
        match t {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| term(a, out)),
            Term::Ka(p) => pred(p, out),
            Term::That(f) => formula(f, out),
        }
    }
    fn pred(p: &PredExpr, out: &mut BTreeSet<Name>) {
        match p {
            PredExpr::Const(_) => {}
            PredExpr::Lambda(vars, body) => {
                out.extend(vars.iter().cloned());
                formula(body, out);
            }
            PredExpr::Modified(_, base) => pred(base, out),
            PredExpr::TermDerived(_, t) => term(t, out),
        }
    }
    fn formula(f: &Formula, out: &mut BTreeSet<Name>) {
        match f {
            Formula::True => {}
            Formula::Atom(p, args) => {
                pred(p, out);
                args.iter().for_each(|a| term(a, out));
            }
            Formula::Eq(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Not(g) | Formula::Modal(_, g) => formula(g, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                formula(a, out);
                formula(b, out);
            }
            Formula::Quant { var, restrictor, body, .. } => {
                out.insert(var.clone());
                formula(restrictor, out);
                formula(body, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    formula(f, &mut out);
    out
}

/// Deterministic fresh name: strips trailing digits from `base` and appends
/// the smallest counter not in `avoid` (`x` -> `x0`, `x1`, ...).
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded counter")
}

type SubstMap = BTreeMap<Name, Term>;

/// Capture-avoiding substitution of `t` for the free occurrences of `var`.
pub fn substitute(f: &Formula, var: &str, t: &Term) -> Formula {
    let mut map = SubstMap::new();
    map.insert(var.to_string(), t.clone());
    substitute_many(f, &map)
}

/// Simultaneous capture-avoiding substitution.
pub fn substitute_many(f: &Formula, map: &BTreeMap<Name, Term>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    subst_formula(f, map)
}

fn range_vars(map: &SubstMap) -> BTreeSet<Name> {
    map.values().flat_map(|t| t.free_vars()).collect()
}

/// Renames binders that would capture a free variable of the substituted terms.
/// Returns the new binder names and the map to use for the scope body.
fn open_binders(
    vars: &[Name],
    map: &SubstMap,
    scope_free: &BTreeSet<Name>,
    scope_all: impl FnOnce() -> BTreeSet<Name>,
) -> (Vec<Name>, SubstMap) {
    let mut inner: SubstMap = map
        .iter()
        .filter(|(k, _)| !vars.contains(k) && scope_free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (vars.to_vec(), inner);
    }
    let captured = range_vars(&inner);
    if !vars.iter().any(|v| captured.contains(v)) {
        return (vars.to_vec(), inner);
    }
    let mut avoid = scope_all();
    avoid.extend(captured.iter().cloned());
    avoid.extend(inner.keys().cloned());
    avoid.extend(vars.iter().cloned());
    let mut renamed = Vec::with_capacity(vars.len());
    for v in vars {
        if captured.contains(v) {
            let fresh = fresh_name(v, &avoid);
            avoid.insert(fresh.clone());
            inner.insert(v.clone(), Term::Var(fresh.clone()));
            renamed.push(fresh);
        } else {
            renamed.push(v.clone());
        }
    }
    (renamed, inner)
}

fn subst_term(t: &Term, map: &SubstMap) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
        Term::Ka(p) => Term::Ka(Box::new(subst_pred(p, map))),
        Term::That(f) => Term::That(Box::new(subst_formula(f, map))),
    }
}

fn subst_pred(p: &PredExpr, map: &SubstMap) -> PredExpr {
    match p {
        PredExpr::Const(_) => p.clone(),
        PredExpr::Lambda(vars, body) => {
            let free = p.free_vars();
            let (vars, inner) = open_binders(vars, map, &free, || all_vars(body));
            if inner.is_empty() {
                return PredExpr::Lambda(vars, body.clone());
            }
            PredExpr::Lambda(vars, Box::new(subst_formula(body, &inner)))
        }
        PredExpr::Modified(m, base) => PredExpr::Modified(m.clone(), Box::new(subst_pred(base, map))),
        PredExpr::TermDerived(op, t) => PredExpr::TermDerived(op.clone(), Box::new(subst_term(t, map))),
    }
}

fn subst_formula(f: &Formula, map: &SubstMap) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::Atom(p, args) => {
            Formula::Atom(subst_pred(p, map), args.iter().map(|a| subst_term(a, map)).collect())
        }
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Not(g) => Formula::not(subst_formula(g, map)),
        Formula::Modal(m, g) => Formula::Modal(*m, Box::new(subst_formula(g, map))),
        Formula::And(a, b) => Formula::and(subst_formula(a, map), subst_formula(b, map)),
        Formula::Or(a, b) => Formula::or(subst_formula(a, map), subst_formula(b, map)),
        Formula::Implies(a, b) => Formula::implies(subst_formula(a, map), subst_formula(b, map)),
        Formula::Equiv(a, b) => Formula::equiv(subst_formula(a, map), subst_formula(b, map)),
        Formula::Quant { q, var, restrictor, body } => {
            let free = f.free_vars();
            let (vars, inner) = open_binders(std::slice::from_ref(var), map, &free, || all_vars(f));
            if inner.is_empty() {
                return f.clone();
            }
            Formula::quant(
                q.clone(),
                vars[0].clone(),
                subst_formula(restrictor, &inner),
                subst_formula(body, &inner),
            )
        }
    }
}

/// Applies a lambda to arguments (beta reduction); other predicate
/// expressions produce a plain atom.
pub fn beta_apply(p: &PredExpr, args: &[Term]) -> Formula {
    match p {
        PredExpr::Lambda(vars, body) if vars.len() == args.len() => {
            let map: SubstMap = vars.iter().cloned().zip(args.iter().cloned()).collect();
            substitute_many(body, &map)
        }
        _ => Formula::Atom(p.clone(), args.to_vec()),
    }
}

/// Alpha-canonical form: bound variables are renamed `#0`, `#1`, ... in
/// binding order. Two expressions are alpha-equivalent iff their canonical
/// forms are equal. `#` never appears in parsed variable names.
pub fn canonical(f: &Formula) -> Formula {
    let mut c = Canon { scope: Vec::new(), next: 0 };
    c.formula(f)
}

struct Canon {
    scope: Vec<(Name, Name)>,
    next: usize,
}

impl Canon {
    fn bind(&mut self, v: &Name) -> Name {
        let fresh = format!("#{}", self.next);
        self.next += 1;
        self.scope.push((v.clone(), fresh.clone()));
        fresh
    }

    fn lookup(&self, v: &Name) -> Name {
        self.scope
            .iter()
            .rev()
            .find(|(orig, _)| orig == v)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| v.clone())
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(v) => Term::Var(self.lookup(v)),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
            Term::Ka(p) => Term::Ka(Box::new(self.pred(p))),
            Term::That(f) => Term::That(Box::new(self.formula(f))),
        }
    }

    fn pred(&mut self, p: &PredExpr) -> PredExpr {
        match p {
            PredExpr::Const(_) => p.clone(),
            PredExpr::Lambda(vars, body) => {
                let n = self.scope.len();
                let vars = vars.iter().map(|v| self.bind(v)).collect();
                let body = self.formula(body);
                self.scope.truncate(n);
                PredExpr::Lambda(vars, Box::new(body))
            }
            PredExpr::Modified(m, base) => PredExpr::Modified(m.clone(), Box::new(self.pred(base))),
            PredExpr::TermDerived(op, t) => PredExpr::TermDerived(op.clone(), Box::new(self.term(t))),
        }
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::Atom(p, args) => Formula::Atom(self.pred(p), args.iter().map(|a| self.term(a)).collect()),
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::Modal(m, g) => Formula::Modal(*m, Box::new(self.formula(g))),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a), self.formula(b)),
            Formula::Equiv(a, b) => Formula::equiv(self.formula(a), self.formula(b)),
            Formula::Quant { q, var, restrictor, body } => {
                let v = self.bind(var);
                let r = self.formula(restrictor);
                let b = self.formula(body);
                self.scope.pop();
                Formula::quant(q.clone(), v, r, b)
            }
        }
    }
}

/// Canonical form of a term (see [`canonical`]).
pub fn canonical_term(t: &Term) -> Term {
    Canon { scope: Vec::new(), next: 0 }.term(t)
}

/// Things that can be compared up to renaming of bound variables.
pub trait AlphaEq {
    fn alpha_eq_in(&self, other: &Self, env: &mut AlphaEnv) -> bool;
}

/// Paired binder stack used while comparing two expressions.
#[derive(Default)]
pub struct AlphaEnv {
    left: Vec<Name>,
    right: Vec<Name>,
}

impl AlphaEnv {
    fn var_eq(&self, a: &Name, b: &Name) -> bool {
        let ia = self.left.iter().rposition(|v| v == a);
        let ib = self.right.iter().rposition(|v| v == b);
        match (ia, ib) {
            (Some(i), Some(j)) => i == j,
            (None, None) => a == b,
            _ => false,
        }
    }
}

impl AlphaEq for Term {
    fn alpha_eq_in(&self, other: &Self, env: &mut AlphaEnv) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => env.var_eq(a, b),
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.alpha_eq_in(y, env))
            }
            (Term::Ka(p), Term::Ka(q)) => p.alpha_eq_in(q, env),
            (Term::That(f), Term::That(g)) => f.alpha_eq_in(g, env),
            _ => false,
        }
    }
}

impl AlphaEq for PredExpr {
    fn alpha_eq_in(&self, other: &Self, env: &mut AlphaEnv) -> bool {
        match (self, other) {
            (PredExpr::Const(a), PredExpr::Const(b)) => a == b,
            (PredExpr::Lambda(xs, f), PredExpr::Lambda(ys, g)) => {
                if xs.len() != ys.len() {
                    return false;
                }
                let (nl, nr) = (env.left.len(), env.right.len());
                env.left.extend(xs.iter().cloned());
                env.right.extend(ys.iter().cloned());
                let ok = f.alpha_eq_in(g, env);
                env.left.truncate(nl);
                env.right.truncate(nr);
                ok
            }
            (PredExpr::Modified(m, p), PredExpr::Modified(n, q)) => m == n && p.alpha_eq_in(q, env),
            (PredExpr::TermDerived(o, s), PredExpr::TermDerived(p, t)) => o == p && s.alpha_eq_in(t, env),
            _ => false,
        }
    }
}

impl AlphaEq for Formula {
    fn alpha_eq_in(&self, other: &Self, env: &mut AlphaEnv) -> bool {
        use Formula::*;
        match (self, other) {
            (True, True) => true,
            (Atom(p, xs), Atom(q, ys)) => {
                p.alpha_eq_in(q, env) && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.alpha_eq_in(y, env))
            }
            (Eq(a, b), Eq(c, d)) => a.alpha_eq_in(c, env) && b.alpha_eq_in(d, env),
            (Not(f), Not(g)) => f.alpha_eq_in(g, env),
            (Modal(m, f), Modal(n, g)) => m == n && f.alpha_eq_in(g, env),
            (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Implies(a, b), Implies(c, d)) | (Equiv(a, b), Equiv(c, d)) => {
                a.alpha_eq_in(c, env) && b.alpha_eq_in(d, env)
            }
            (
                Quant { q, var, restrictor, body },
                Quant { q: q2, var: var2, restrictor: r2, body: b2 },
            ) => {
                if q != q2 {
                    return false;
                }
                env.left.push(var.clone());
                env.right.push(var2.clone());
                let ok = restrictor.alpha_eq_in(r2, env) && body.alpha_eq_in(b2, env);
                env.left.pop();
                env.right.pop();
                ok
            }
            _ => false,
        }
    }
}

/// True iff `a` and `b` differ only in the names of bound variables.
pub fn alpha_equivalent<T: AlphaEq>(a: &T, b: &T) -> bool {
    a.alpha_eq_in(b, &mut AlphaEnv::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn free_vars_of_restricted_quantifier() {
        let fv = f("(quant most ?z (member ?z ?a) (member ?z ?b))").free_vars();
        assert_eq!(fv, ["a", "b"].iter().map(|s| s.to_string()).collect());
        assert_eq!(f("(enter ?x ?y)").free_vars().len(), 2);
        assert!(parse_term("(ka (lambda (?x) (send-off ?x r1)))").unwrap().free_vars().is_empty());
    }

    #[test]
    fn substitution_plain_and_under_that() {
        let g = substitute(&f("(contained-in ?x ?y)"), "x", &Term::constant("b1"));
        assert_eq!(g, f("(contained-in b1 ?y)"));
        let g = substitute(&f("(correct (that (P ?x)))"), "x", &Term::constant("c"));
        assert_eq!(g, f("(correct (that (P c)))"));
    }

    #[test]
    fn substitution_renames_capturing_binder() {
        let g = substitute(&f("(quant all ?x (P ?x) (R ?x ?y))"), "y", &Term::var("x"));
        assert_eq!(g, f("(quant all ?x0 (P ?x0) (R ?x0 ?x))"));
        // Bound occurrences are untouched.
        let h = substitute(&f("(forall ?x (P ?x))"), "x", &Term::constant("a"));
        assert_eq!(h, f("(forall ?x (P ?x))"));
    }

    #[test]
    fn lambda_substitution_avoids_capture() {
        let g = f("((do (ka (lambda (?x) (R ?x ?y)))) ?z)");
        let h = substitute(&g, "y", &Term::var("x"));
        assert_eq!(h, f("((do (ka (lambda (?x0) (R ?x0 ?x)))) ?z)"));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_equivalent(&f("(quant all ?x (P ?x) (Q ?x))"), &f("(quant all ?y (P ?y) (Q ?y))")));
        assert!(alpha_equivalent(
            &parse_term("(ka (lambda (?x) (P ?x)))").unwrap(),
            &parse_term("(ka (lambda (?z) (P ?z)))").unwrap()
        ));
        assert!(!alpha_equivalent(&f("(quant all ?x (P ?x) (Q ?x))"), &f("(quant most ?x (P ?x) (Q ?x))")));
        // Free variables must match by name.
        assert!(!alpha_equivalent(&f("(P ?x)"), &f("(P ?y)")));
        // Shadowing.
        assert!(alpha_equivalent(
            &f("(forall ?x (forall ?x (P ?x)))"),
            &f("(forall ?y (forall ?z (P ?z)))")
        ));
        assert!(!alpha_equivalent(
            &f("(forall ?x (forall ?x (P ?x)))"),
            &f("(forall ?y (forall ?z (P ?y)))")
        ));
    }

    #[test]
    fn canonical_agrees_with_alpha() {
        let pairs = [
            ("(forall ?x (exists ?y (R ?x ?y)))", "(forall ?a (exists ?b (R ?a ?b)))", true),
            ("(forall ?x (exists ?y (R ?x ?y)))", "(forall ?a (exists ?b (R ?b ?a)))", false),
            ("(P ?x)", "(P ?y)", false),
        ];
        for (a, b, expected) in pairs {
            let (a, b) = (f(a), f(b));
            assert_eq!(alpha_equivalent(&a, &b), expected);
            assert_eq!(canonical(&a) == canonical(&b), expected);
        }
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let avoid: BTreeSet<Name> = ["x", "x0"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("x", &avoid), "x1");
        assert_eq!(fresh_name("x0", &BTreeSet::new()), "x0");
    }

    #[test]
    fn beta_reduces_lambda() {
        let p = PredExpr::lambda(vec!["x".into()], f("(send-off ?x r1)"));
        assert_eq!(beta_apply(&p, &[Term::constant("t1")]), f("(send-off t1 r1)"));
    }
}
