use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Formula, FreeVars, Name, PredExpr, Term};

/// Declared symbols with their arities. Names are unique across categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub functions: BTreeMap<Name, usize>,
    pub predicates: BTreeMap<Name, usize>,
    pub modifiers: BTreeSet<Name>,
    /// Term-derived predicate operators (e.g. `do`) and the arity of the predicate they yield.
    pub operators: BTreeMap<Name, usize>,
    pub constants: BTreeSet<Name>,
    /// Quantifier symbols; the flag says whether the symbol takes an integer parameter.
    pub quantifiers: BTreeMap<Name, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{name}` already declared as {existing}")]
    Duplicate { name: Name, existing: &'static str },
    #[error("symbol `{0}` is a reserved keyword")]
    Reserved(Name),
}

pub(crate) const KEYWORDS: &[&str] = &[
    "not", "and", "or", "implies", "equiv", "quant", "poss", "nec", "forall", "exists", "lambda",
    "mod", "ka", "kind", "that", "true", "=",
];

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

impl Signature {
    /// An empty signature with the built-in quantifier symbols.
    pub fn new() -> Self {
        let quantifiers = [
            ("all", false),
            ("some", false),
            ("no", false),
            ("most", false),
            ("at-least", true),
            ("at-most", true),
            ("exactly", true),
            ("fewer-than", true),
        ]
        .into_iter()
        .map(|(n, p)| (n.to_string(), p))
        .collect();
        Signature {
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
            modifiers: BTreeSet::new(),
            operators: BTreeMap::new(),
            constants: BTreeSet::new(),
            quantifiers,
        }
    }

    pub fn category(&self, name: &str) -> Option<&'static str> {
        if self.functions.contains_key(name) {
            Some("function")
        } else if self.predicates.contains_key(name) {
            Some("predicate")
        } else if self.modifiers.contains(name) {
            Some("modifier")
        } else if self.operators.contains_key(name) {
            Some("operator")
        } else if self.constants.contains(name) {
            Some("constant")
        } else if self.quantifiers.contains_key(name) {
            Some("quantifier")
        } else {
            None
        }
    }

    fn check_new(&self, name: &str, category: &'static str) -> Result<bool, SignatureError> {
        if KEYWORDS.contains(&name) {
            return Err(SignatureError::Reserved(name.to_string()));
        }
        match self.category(name) {
            None => Ok(true),
            Some(c) if c == category => Ok(false),
            Some(existing) => Err(SignatureError::Duplicate { name: name.to_string(), existing }),
        }
    }

    pub fn declare_function(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if !self.check_new(name, "function")? && self.functions[name] != arity {
            return Err(SignatureError::Duplicate { name: name.into(), existing: "function" });
        }
        self.functions.insert(name.into(), arity);
        Ok(())
    }

    pub fn declare_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if !self.check_new(name, "predicate")? && self.predicates[name] != arity {
            return Err(SignatureError::Duplicate { name: name.into(), existing: "predicate" });
        }
        self.predicates.insert(name.into(), arity);
        Ok(())
    }

    pub fn declare_modifier(&mut self, name: &str) -> Result<(), SignatureError> {
        self.check_new(name, "modifier")?;
        self.modifiers.insert(name.into());
        Ok(())
    }

    pub fn declare_operator(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        if !self.check_new(name, "operator")? && self.operators[name] != arity {
            return Err(SignatureError::Duplicate { name: name.into(), existing: "operator" });
        }
        self.operators.insert(name.into(), arity);
        Ok(())
    }

    pub fn declare_constant(&mut self, name: &str) -> Result<(), SignatureError> {
        self.check_new(name, "constant")?;
        self.constants.insert(name.into());
        Ok(())
    }

    /// Adds every declaration of `other`.
    pub fn merge(&mut self, other: &Signature) -> Result<(), SignatureError> {
        for (n, a) in &other.functions {
            self.declare_function(n, *a)?;
        }
        for (n, a) in &other.predicates {
            self.declare_predicate(n, *a)?;
        }
        for n in &other.modifiers {
            self.declare_modifier(n)?;
        }
        for (n, a) in &other.operators {
            self.declare_operator(n, *a)?;
        }
        for n in &other.constants {
            self.declare_constant(n)?;
        }
        Ok(())
    }

    pub fn unary_predicates(&self) -> impl Iterator<Item = &Name> {
        self.predicates.iter().filter(|(_, a)| **a == 1).map(|(n, _)| n)
    }
}

/// Position of a sub-expression: child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl Path {
    fn child(&self, i: usize) -> Path {
        let mut p = self.0.clone();
        p.push(i);
        Path(p)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "root.{}", parts.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    ArityMismatch { symbol: Name, expected: usize, found: usize },
    UnknownSymbol { symbol: Name, expected: &'static str },
    IllegalRebinding { var: Name },
    OpenThat { var: Name },
    KaNotMonadic { found: usize },
    QuantifierParameter { symbol: Name, expects_param: bool },
    FreeVariable { var: Name },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: Path,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: ", self.path)?;
        match &self.kind {
            DiagnosticKind::ArityMismatch { symbol, expected, found } => {
                write!(f, "`{symbol}` expects {expected} argument(s), got {found}")
            }
            DiagnosticKind::UnknownSymbol { symbol, expected } => write!(f, "unknown {expected} `{symbol}`"),
            DiagnosticKind::IllegalRebinding { var } => write!(f, "variable ?{var} is already bound here"),
            DiagnosticKind::OpenThat { var } => {
                write!(f, "`that` term has variable ?{var} not bound by an enclosing binder")
            }
            DiagnosticKind::KaNotMonadic { found } => write!(f, "`ka` needs a monadic predicate, got arity {found}"),
            DiagnosticKind::QuantifierParameter { symbol, expects_param: true } => {
                write!(f, "quantifier `{symbol}` needs an integer parameter")
            }
            DiagnosticKind::QuantifierParameter { symbol, expects_param: false } => {
                write!(f, "quantifier `{symbol}` takes no parameter")
            }
            DiagnosticKind::FreeVariable { var } => write!(f, "free variable ?{var} in a sentence"),
        }
    }
}

/// Expressions that can be checked against a signature.
pub trait Checkable {
    fn check(&self, cx: &mut Checker<'_>, path: Path);
}

pub struct Checker<'a> {
    sig: &'a Signature,
    bound: Vec<Name>,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, path: &Path, kind: DiagnosticKind) {
        self.out.push(Diagnostic { path: path.clone(), kind });
    }

    fn bind(&mut self, v: &Name, path: &Path) {
        if self.bound.contains(v) {
            self.report(path, DiagnosticKind::IllegalRebinding { var: v.clone() });
        }
        self.bound.push(v.clone());
    }

    fn check_args(&mut self, args: &[Term], path: &Path, first: usize) {
        for (i, a) in args.iter().enumerate() {
            a.check(self, path.child(first + i));
        }
    }
}

impl Checkable for Term {
    fn check(&self, cx: &mut Checker<'_>, path: Path) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                if !cx.sig.constants.contains(c) {
                    cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: c.clone(), expected: "constant" });
                }
            }
            Term::App(fname, args) => {
                match cx.sig.functions.get(fname) {
                    None => cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: fname.clone(), expected: "function" }),
                    Some(&n) if n != args.len() => cx.report(
                        &path,
                        DiagnosticKind::ArityMismatch { symbol: fname.clone(), expected: n, found: args.len() },
                    ),
                    Some(_) => {}
                }
                cx.check_args(args, &path, 0);
            }
            Term::Ka(p) => {
                if let Some(a) = p.arity(cx.sig) {
                    if a != 1 {
                        cx.report(&path, DiagnosticKind::KaNotMonadic { found: a });
                    }
                }
                p.check(cx, path.child(0));
            }
            Term::That(f) => {
                for v in f.free_vars() {
                    if !cx.bound.contains(&v) {
                        cx.report(&path, DiagnosticKind::OpenThat { var: v });
                    }
                }
                f.check(cx, path.child(0));
            }
        }
    }
}

impl Checkable for PredExpr {
    fn check(&self, cx: &mut Checker<'_>, path: Path) {
        match self {
            PredExpr::Const(p) => {
                if !cx.sig.predicates.contains_key(p) {
                    cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: p.clone(), expected: "predicate" });
                }
            }
            PredExpr::Lambda(vars, body) => {
                let n = cx.bound.len();
                for v in vars {
                    cx.bind(v, &path);
                }
                body.check(cx, path.child(0));
                cx.bound.truncate(n);
            }
            PredExpr::Modified(m, base) => {
                if !cx.sig.modifiers.contains(m) {
                    cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: m.clone(), expected: "modifier" });
                }
                base.check(cx, path.child(0));
            }
            PredExpr::TermDerived(op, t) => {
                if !cx.sig.operators.contains_key(op) {
                    cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: op.clone(), expected: "operator" });
                }
                t.check(cx, path.child(0));
            }
        }
    }
}

impl Checkable for Formula {
    fn check(&self, cx: &mut Checker<'_>, path: Path) {
        match self {
            Formula::True => {}
            Formula::Atom(p, args) => {
                if let Some(n) = p.arity(cx.sig) {
                    if n != args.len() {
                        let symbol = match p {
                            PredExpr::Const(name) => name.clone(),
                            PredExpr::Modified(m, _) => m.clone(),
                            PredExpr::TermDerived(op, _) => op.clone(),
                            PredExpr::Lambda(..) => "lambda".into(),
                        };
                        cx.report(&path, DiagnosticKind::ArityMismatch { symbol, expected: n, found: args.len() });
                    }
                }
                p.check(cx, path.child(0));
                cx.check_args(args, &path, 1);
            }
            Formula::Eq(a, b) => {
                a.check(cx, path.child(0));
                b.check(cx, path.child(1));
            }
            Formula::Not(f) | Formula::Modal(_, f) => f.check(cx, path.child(0)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.check(cx, path.child(0));
                b.check(cx, path.child(1));
            }
            Formula::Quant { q, var, restrictor, body } => {
                match cx.sig.quantifiers.get(&q.name) {
                    None => cx.report(&path, DiagnosticKind::UnknownSymbol { symbol: q.name.clone(), expected: "quantifier" }),
                    Some(&parametric) if parametric != q.param.is_some() => cx.report(
                        &path,
                        DiagnosticKind::QuantifierParameter { symbol: q.name.clone(), expects_param: parametric },
                    ),
                    Some(_) => {}
                }
                cx.bind(var, &path);
                restrictor.check(cx, path.child(0));
                body.check(cx, path.child(1));
                cx.bound.pop();
            }
        }
    }
}

/// Every violation in `expr` over `sig`; empty iff well-formed.
pub fn well_formed<E: Checkable + ?Sized>(expr: &E, sig: &Signature) -> Vec<Diagnostic> {
    let mut cx = Checker { sig, bound: Vec::new(), out: Vec::new() };
    expr.check(&mut cx, Path::default());
    cx.out
}

/// [`well_formed`] plus a diagnostic for each free variable: KB entries and
/// queries must be sentences.
pub fn well_formed_sentence(f: &Formula, sig: &Signature) -> Vec<Diagnostic> {
    let mut out = well_formed(f, sig);
    for v in f.free_vars() {
        out.push(Diagnostic { path: Path::default(), kind: DiagnosticKind::FreeVariable { var: v } });
    }
    out
}
