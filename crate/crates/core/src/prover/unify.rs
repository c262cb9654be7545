//! First-order unification with occurs check. Free variables are
//! unification variables; variables bound inside formulas are rigid.

use std::collections::BTreeMap;

use crate::logic::{alpha_equivalent, substitute_many, Formula, FreeVars, Name, PredExpr, Term};

pub type Bindings = BTreeMap<Name, Term>;

/// Applies `env` to a term, following chains of bindings.
pub fn resolve(t: &Term, env: &Bindings) -> Term {
    match t {
        Term::Var(v) => match env.get(v) {
            Some(b) => resolve(b, env),
            None => t.clone(),
        },
        Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| resolve(a, env)).collect()),
        Term::Ka(_) | Term::That(_) => {
            if t.free_vars().iter().any(|v| env.contains_key(v)) {
                let full: Bindings = t.free_vars().into_iter().filter_map(|v| env.get(&v).map(|b| (v, resolve(b, env)))).collect();
                let carrier = substitute_many(&Formula::Eq(t.clone(), t.clone()), &full);
                let Formula::Eq(t, _) = carrier else { unreachable!() };
                t
            } else {
                t.clone()
            }
        }
    }
}

pub fn resolve_formula(f: &Formula, env: &Bindings) -> Formula {
    let full: Bindings = f.free_vars().into_iter().filter_map(|v| env.get(&v).map(|_| (v.clone(), resolve(&Term::Var(v), env)))).collect();
    substitute_many(f, &full)
}

#[derive(Default)]
struct Rigid {
    left: Vec<Name>,
    right: Vec<Name>,
}

impl Rigid {
    fn lookup(&self, a: &Name, b: &Name) -> Option<bool> {
        let i = self.left.iter().rposition(|x| x == a);
        let j = self.right.iter().rposition(|x| x == b);
        match (i, j) {
            (None, None) => None,
            (i, j) => Some(i == j),
        }
    }

    fn is_rigid(&self, v: &Name, left: bool) -> bool {
        if left {
            self.left.contains(v)
        } else {
            self.right.contains(v)
        }
    }

    fn mentions_rigid(&self, t: &Term) -> bool {
        t.free_vars().iter().any(|v| self.left.contains(v) || self.right.contains(v))
    }
}

fn occurs(v: &Name, t: &Term, env: &Bindings) -> bool {
    resolve(t, env).free_vars().contains(v)
}

fn bind(v: &Name, t: &Term, env: &mut Bindings, rigid: &Rigid) -> bool {
    let t = resolve(t, env);
    if t == Term::Var(v.clone()) {
        return true;
    }
    if occurs(v, &t, env) || rigid.mentions_rigid(&t) {
        return false;
    }
    env.insert(v.clone(), t);
    true
}

fn terms(a: &Term, b: &Term, env: &mut Bindings, rigid: &mut Rigid) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match rigid.lookup(x, y) {
            Some(same) => same,
            None => {
                let (ra, rb) = (resolve(a, env), resolve(b, env));
                match (&ra, &rb) {
                    (Term::Var(x), _) => bind(x, &rb, env, rigid),
                    (_, Term::Var(y)) => bind(y, &ra, env, rigid),
                    _ => terms(&ra, &rb, env, rigid),
                }
            }
        },
        (Term::Var(x), _) if !rigid.is_rigid(x, true) => match env.get(x).cloned() {
            Some(bound) => terms(&bound, b, env, rigid),
            None => bind(x, b, env, rigid),
        },
        (_, Term::Var(y)) if !rigid.is_rigid(y, false) => match env.get(y).cloned() {
            Some(bound) => terms(a, &bound, env, rigid),
            None => bind(y, a, env, rigid),
        },
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| terms(x, y, env, rigid))
        }
        // Reified terms unify only when alpha-equivalent after substitution.
        (Term::Ka(_), Term::Ka(_)) | (Term::That(_), Term::That(_)) => {
            if rigid.mentions_rigid(a) || rigid.mentions_rigid(b) {
                return a == b;
            }
            alpha_equivalent(&resolve(a, env), &resolve(b, env))
        }
        _ => false,
    }
}

fn preds(a: &PredExpr, b: &PredExpr, env: &mut Bindings, rigid: &mut Rigid) -> bool {
    match (a, b) {
        (PredExpr::Const(x), PredExpr::Const(y)) => x == y,
        (PredExpr::Lambda(xs, f), PredExpr::Lambda(ys, g)) if xs.len() == ys.len() => {
            rigid.left.extend(xs.iter().cloned());
            rigid.right.extend(ys.iter().cloned());
            let ok = formulas(f, g, env, rigid);
            rigid.left.truncate(rigid.left.len() - xs.len());
            rigid.right.truncate(rigid.right.len() - ys.len());
            ok
        }
        (PredExpr::Modified(m, x), PredExpr::Modified(n, y)) => m == n && preds(x, y, env, rigid),
        (PredExpr::TermDerived(o, x), PredExpr::TermDerived(p, y)) => o == p && terms(x, y, env, rigid),
        _ => false,
    }
}

fn formulas(a: &Formula, b: &Formula, env: &mut Bindings, rigid: &mut Rigid) -> bool {
    use Formula::*;
    match (a, b) {
        (True, True) => true,
        (Atom(p, xs), Atom(q, ys)) => {
            xs.len() == ys.len() && preds(p, q, env, rigid) && xs.iter().zip(ys).all(|(x, y)| terms(x, y, env, rigid))
        }
        (Eq(x1, y1), Eq(x2, y2)) => terms(x1, x2, env, rigid) && terms(y1, y2, env, rigid),
        (Not(x), Not(y)) => formulas(x, y, env, rigid),
        (Modal(m, x), Modal(n, y)) => m == n && formulas(x, y, env, rigid),
        (And(a1, b1), And(a2, b2))
        | (Or(a1, b1), Or(a2, b2))
        | (Implies(a1, b1), Implies(a2, b2))
        | (Equiv(a1, b1), Equiv(a2, b2)) => formulas(a1, a2, env, rigid) && formulas(b1, b2, env, rigid),
        (Quant { q, var, restrictor, body }, Quant { q: q2, var: v2, restrictor: r2, body: b2 }) => {
            if q != q2 {
                return false;
            }
            rigid.left.push(var.clone());
            rigid.right.push(v2.clone());
            let ok = formulas(restrictor, r2, env, rigid) && formulas(body, b2, env, rigid);
            rigid.left.pop();
            rigid.right.pop();
            ok
        }
        _ => false,
    }
}

/// Most general unifier of two terms extending `env`.
pub fn unify_terms(a: &Term, b: &Term, env: &Bindings) -> Option<Bindings> {
    let mut env = env.clone();
    terms(a, b, &mut env, &mut Rigid::default()).then_some(env)
}

/// Most general unifier of two formulas extending `env`.
pub fn unify(a: &Formula, b: &Formula, env: &Bindings) -> Option<Bindings> {
    let mut env = env.clone();
    formulas(a, b, &mut env, &mut Rigid::default()).then_some(env)
}
