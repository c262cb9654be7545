use std::fmt::{self, Display, Formatter, Write};

use super::{Declaration, Expectation, KbItem, Query};
use crate::logic::{Formula, Modality, PredExpr, Term};
use crate::schema::{QuantConstraint, Schema};

/// Canonical text of any renderable AST.
pub fn render<T: Display + ?Sized>(ast: &T) -> String {
    ast.to_string()
}

fn list<T: Display>(f: &mut Formatter<'_>, head: &str, items: &[T]) -> fmt::Result {
    f.write_char('(')?;
    f.write_str(head)?;
    for it in items {
        write!(f, " {it}")?;
    }
    f.write_char(')')
}

fn pairs(f: &mut Formatter<'_>, kind: &str, items: &[(String, usize)]) -> fmt::Result {
    write!(f, "(declare {kind}")?;
    for (n, a) in items {
        write!(f, " {n} {a}")?;
    }
    f.write_char(')')
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
            Term::App(name, args) => list(f, name, args),
            Term::Ka(p) => write!(f, "(ka {p})"),
            Term::That(g) => write!(f, "(that {g})"),
        }
    }
}

impl Display for PredExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            PredExpr::Const(p) => f.write_str(p),
            PredExpr::Lambda(vars, body) => {
                f.write_str("(lambda (")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_char(' ')?;
                    }
                    write!(f, "?{v}")?;
                }
                write!(f, ") {body})")
            }
            PredExpr::Modified(m, base) => write!(f, "(mod {m} {base})"),
            PredExpr::TermDerived(op, t) => write!(f, "({op} {t})"),
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if let Some((v, body)) = self.as_universal() {
            return write!(f, "(forall ?{v} {body})");
        }
        if let Some((v, body)) = self.as_existential() {
            return write!(f, "(exists ?{v} {body})");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::Atom(PredExpr::Const(p), args) if args.is_empty() => f.write_str(p),
            Formula::Atom(p, args) => list(f, &p.to_string(), args),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Equiv(a, b) => write!(f, "(equiv {a} {b})"),
            Formula::Quant { q, var, restrictor, body } => write!(f, "(quant {q} ?{var} {restrictor} {body})"),
            Formula::Modal(Modality::Possibly, g) => write!(f, "(poss {g})"),
            Formula::Modal(Modality::Necessarily, g) => write!(f, "(nec {g})"),
        }
    }
}

impl Display for QuantConstraint {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantConstraint::RightUp => "right-up",
            QuantConstraint::RightDown => "right-down",
            QuantConstraint::Any => "any",
        })
    }
}

impl Display for Schema {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("(schema")?;
        if let Some(n) = &self.name {
            write!(f, " {n}")?;
        }
        if !self.pred_vars.is_empty() {
            f.write_str(" (pred-vars")?;
            for (p, a) in &self.pred_vars {
                write!(f, " ({p} {a})")?;
            }
            f.write_char(')')?;
        }
        if !self.formula_vars.is_empty() {
            list(f, "formula-vars", &self.formula_vars)?;
        }
        if !self.quant_vars.is_empty() {
            f.write_str(" (quant-vars")?;
            for (q, c) in &self.quant_vars {
                write!(f, " ({q} {c})")?;
            }
            f.write_char(')')?;
        }
        write!(f, " {})", self.body)
    }
}

impl Display for Declaration {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Declaration::Functions(ds) => pairs(f, "function", ds),
            Declaration::Predicates(ds) => pairs(f, "predicate", ds),
            Declaration::Modifiers(ns) => list(f, "declare modifier", ns),
            Declaration::Operators(ds) => pairs(f, "operator", ds),
            Declaration::Constants(ns) => list(f, "declare constant", ns),
        }
    }
}

impl Display for Query {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str("(query")?;
        if let Some(n) = &self.name {
            write!(f, " {n}")?;
        }
        if !self.scenarios.is_empty() {
            f.write_char(' ')?;
            list(f, "scenario", &self.scenarios)?;
        }
        if let Some(uses) = &self.uses {
            f.write_char(' ')?;
            list(f, "uses", uses)?;
        }
        if self.expect == Expectation::NotProvable {
            f.write_str(" (expect not-provable)")?;
        }
        if let Some(k) = self.max_lexical_steps {
            write!(f, " (max-lexical-steps {k})")?;
        }
        write!(f, " {})", self.goal)
    }
}

impl Display for KbItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            KbItem::Declare(d) => d.fmt(f),
            KbItem::Axiom { name: Some(n), formula } => write!(f, "(axiom {n} {formula})"),
            KbItem::Axiom { name: None, formula } => write!(f, "(axiom {formula})"),
            KbItem::Fact(g) => write!(f, "(fact {g})"),
            KbItem::Schema(s) => s.fmt(f),
            KbItem::Query(q) => q.fmt(f),
        }
    }
}
