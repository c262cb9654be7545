//! Abstract syntax of the extended logic and its structural operations.

mod subst;
pub(crate) mod wf;

pub use subst::{
    all_vars, alpha_equivalent, beta_apply, canonical, canonical_term, fresh_name, substitute,
    substitute_many, AlphaEnv, AlphaEq, FreeVars,
};
pub use wf::{
    well_formed, well_formed_sentence, Checkable, Diagnostic, DiagnosticKind, Path, Signature,
    SignatureError,
};

use std::fmt;

pub type Name = String;

/// Individual-denoting expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Const(Name),
    /// Function application; `(f)` with no arguments is distinct from the constant `f`.
    App(Name, Vec<Term>),
    /// `(ka P)`: the kind or action type of a monadic predicate.
    Ka(Box<PredExpr>),
    /// `(that φ)`: the proposition expressed by a sentence.
    That(Box<Formula>),
}

/// Predicate-denoting expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredExpr {
    Const(Name),
    Lambda(Vec<Name>, Box<Formula>),
    /// A predicate modifier applied to a predicate, e.g. `(mod sounds reasonable)`.
    Modified(Name, Box<PredExpr>),
    /// A predicate built from a term, e.g. `(do (ka P))`.
    TermDerived(Name, Box<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantSym {
    pub name: Name,
    pub param: Option<u32>,
}

impl QuantSym {
    pub fn new(name: impl Into<Name>) -> Self {
        QuantSym { name: name.into(), param: None }
    }

    pub fn with_param(name: impl Into<Name>, n: u32) -> Self {
        QuantSym { name: name.into(), param: Some(n) }
    }
}

impl fmt::Display for QuantSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param {
            Some(n) => write!(f, "({} {})", self.name, n),
            None => f.write_str(&self.name),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modality {
    Possibly,
    Necessarily,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// The always-true formula, used as the restrictor of `forall` / `exists`.
    True,
    Atom(PredExpr, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Quant {
        q: QuantSym,
        var: Name,
        restrictor: Box<Formula>,
        body: Box<Formula>,
    },
    Modal(Modality, Box<Formula>),
}

impl Term {
    pub fn var(name: impl Into<Name>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<Name>) -> Self {
        Term::Const(name.into())
    }

    pub fn app(name: impl Into<Name>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn ka(p: PredExpr) -> Self {
        Term::Ka(Box::new(p))
    }

    pub fn that(f: Formula) -> Self {
        Term::That(Box::new(f))
    }

    pub fn is_reified(&self) -> bool {
        matches!(self, Term::Ka(_) | Term::That(_))
    }
}

impl PredExpr {
    pub fn constant(name: impl Into<Name>) -> Self {
        PredExpr::Const(name.into())
    }

    pub fn lambda(vars: Vec<Name>, body: Formula) -> Self {
        PredExpr::Lambda(vars, Box::new(body))
    }

    pub fn modified(modifier: impl Into<Name>, base: PredExpr) -> Self {
        PredExpr::Modified(modifier.into(), Box::new(base))
    }

    pub fn derived(op: impl Into<Name>, arg: Term) -> Self {
        PredExpr::TermDerived(op.into(), Box::new(arg))
    }

    /// Arity under `sig`, or `None` when a symbol is undeclared.
    pub fn arity(&self, sig: &Signature) -> Option<usize> {
        match self {
            PredExpr::Const(p) => sig.predicates.get(p).copied(),
            PredExpr::Lambda(vars, _) => Some(vars.len()),
            PredExpr::Modified(_, base) => base.arity(sig),
            PredExpr::TermDerived(op, _) => sig.operators.get(op).copied(),
        }
    }
}

impl Formula {
    pub fn atom(pred: impl Into<Name>, args: Vec<Term>) -> Self {
        Formula::Atom(PredExpr::Const(pred.into()), args)
    }

    pub fn apply(pred: PredExpr, args: Vec<Term>) -> Self {
        Formula::Atom(pred, args)
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Self {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn quant(q: QuantSym, var: impl Into<Name>, restrictor: Formula, body: Formula) -> Self {
        Formula::Quant {
            q,
            var: var.into(),
            restrictor: Box::new(restrictor),
            body: Box::new(body),
        }
    }

    /// `(forall ?x F)`, i.e. `(quant all ?x true F)`.
    pub fn forall(var: impl Into<Name>, body: Formula) -> Self {
        Formula::quant(QuantSym::new("all"), var, Formula::True, body)
    }

    /// `(exists ?x F)`, i.e. `(quant some ?x true F)`.
    pub fn exists(var: impl Into<Name>, body: Formula) -> Self {
        Formula::quant(QuantSym::new("some"), var, Formula::True, body)
    }

    pub fn possibly(f: Formula) -> Self {
        Formula::Modal(Modality::Possibly, Box::new(f))
    }

    pub fn necessarily(f: Formula) -> Self {
        Formula::Modal(Modality::Necessarily, Box::new(f))
    }

    /// Right-nested conjunction; `True` for an empty list.
    pub fn conjoin(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => {
                let first = parts.remove(0);
                Formula::and(first, Formula::conjoin(parts))
            }
        }
    }

    /// Right-nested disjunction; `(not true)` for an empty list.
    pub fn disjoin(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::not(Formula::True),
            1 => parts.pop().unwrap(),
            _ => {
                let first = parts.remove(0);
                Formula::or(first, Formula::disjoin(parts))
            }
        }
    }

    /// If this is `(quant all ?x true F)`, returns `(x, F)`.
    pub fn as_universal(&self) -> Option<(&Name, &Formula)> {
        match self {
            Formula::Quant { q, var, restrictor, body }
                if q.name == "all" && q.param.is_none() && **restrictor == Formula::True =>
            {
                Some((var, body))
            }
            _ => None,
        }
    }

    /// If this is `(quant some ?x true F)`, returns `(x, F)`.
    pub fn as_existential(&self) -> Option<(&Name, &Formula)> {
        match self {
            Formula::Quant { q, var, restrictor, body }
                if q.name == "some" && q.param.is_none() && **restrictor == Formula::True =>
            {
                Some((var, body))
            }
            _ => None,
        }
    }

    /// Strips leading universals, returning the bound names and the matrix.
    pub fn strip_universals(&self) -> (Vec<Name>, &Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Some((v, body)) = cur.as_universal() {
            vars.push(v.clone());
            cur = body;
        }
        (vars, cur)
    }

    /// Flattens nested conjunctions, left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Flattens nested disjunctions, left to right.
    pub fn disjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Number of AST nodes (formulas, predicate expressions and terms).
    pub fn size(&self) -> usize {
        fn term(t: &Term) -> usize {
            1 + match t {
                Term::Var(_) | Term::Const(_) => 0,
                Term::App(_, args) => args.iter().map(term).sum(),
                Term::Ka(p) => pred(p),
                Term::That(f) => f.size(),
            }
        }
        fn pred(p: &PredExpr) -> usize {
            1 + match p {
                PredExpr::Const(_) => 0,
                PredExpr::Lambda(_, body) => body.size(),
                PredExpr::Modified(_, base) => pred(base),
                PredExpr::TermDerived(_, t) => term(t),
            }
        }
        1 + match self {
            Formula::True => 0,
            Formula::Atom(p, args) => pred(p) + args.iter().map(term).sum::<usize>(),
            Formula::Eq(a, b) => term(a) + term(b),
            Formula::Not(f) | Formula::Modal(_, f) => f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.size() + b.size()
            }
            Formula::Quant { restrictor, body, .. } => restrictor.size() + body.size(),
        }
    }
}
