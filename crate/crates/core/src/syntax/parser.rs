use super::lexer::{read_all, SExpr, Tok};
use super::{Declaration, Expectation, KbItem, ParseError, Query, SourceSpan, Spanned};
use crate::logic::wf::KEYWORDS;
use crate::logic::{Formula, Modality, Name, PredExpr, QuantSym, Term};
use crate::schema::{QuantConstraint, Schema};

pub(crate) type Res<T> = Result<T, ParseError>;

pub(crate) fn err<T>(span: SourceSpan, message: impl Into<String>, expected: &[&str]) -> Res<T> {
    Err(ParseError::new(span, message.into(), expected.iter().map(|s| s.to_string()).collect()))
}

pub(crate) fn found(e: &SExpr) -> String {
    match e {
        SExpr::Atom(t, _) => format!("found {}", t.describe()),
        SExpr::List(items, _) if items.is_empty() => "found empty list".into(),
        SExpr::List(..) => "found a list".into(),
    }
}

pub(super) fn single<T>(text: &str, f: fn(&SExpr) -> Res<T>) -> Res<T> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => f(one),
        [] => err(SourceSpan { start: 0, end: text.len(), line: 1, column: 1 }, "empty input", &["expression"]),
        [_, second, ..] => err(second.span(), "trailing input after expression", &["end of input"]),
    }
}

pub(crate) fn symbol(e: &SExpr) -> Option<&str> {
    match e {
        SExpr::Atom(Tok::Symbol(s), _) => Some(s),
        _ => None,
    }
}

pub(crate) fn name(e: &SExpr, what: &str) -> Res<Name> {
    match symbol(e) {
        Some(s) if !KEYWORDS.contains(&s) => Ok(s.to_string()),
        Some(s) => err(e.span(), format!("keyword `{s}` cannot be used as a {what}"), &[what]),
        None => err(e.span(), found(e), &[what]),
    }
}

fn variable(e: &SExpr) -> Res<Name> {
    match e {
        SExpr::Atom(Tok::Var(v), _) => Ok(v.clone()),
        _ => err(e.span(), found(e), &["?variable"]),
    }
}

pub(crate) fn int(e: &SExpr) -> Res<u32> {
    match e {
        SExpr::Atom(Tok::Int(n), _) => Ok(*n),
        _ => err(e.span(), found(e), &["integer"]),
    }
}

pub(crate) fn list(e: &SExpr) -> Option<&[SExpr]> {
    match e {
        SExpr::List(items, _) => Some(items),
        _ => None,
    }
}

fn arity_check(e: &SExpr, items: &[SExpr], n: usize, form: &str) -> Res<()> {
    if items.len() == n {
        return Ok(());
    }
    let span = if items.len() > n { items[n].span() } else { e.span() };
    let expected = if items.len() > n { "`)`" } else { "more arguments" };
    err(span, format!("`{form}` takes {} argument(s), got {}", n - 1, items.len() - 1), &[expected])
}

pub(crate) fn term(e: &SExpr) -> Res<Term> {
    match e {
        SExpr::Atom(Tok::Var(v), _) => Ok(Term::Var(v.clone())),
        SExpr::Atom(Tok::Symbol(_), _) => Ok(Term::Const(name(e, "term")?)),
        SExpr::Atom(..) => err(e.span(), found(e), &["term"]),
        SExpr::List(items, span) => {
            let Some(head) = items.first() else { return err(*span, "empty list", &["term"]) };
            match symbol(head) {
                Some("ka") | Some("kind") => {
                    arity_check(e, items, 2, "ka")?;
                    Ok(Term::Ka(Box::new(pred_expr(&items[1])?)))
                }
                Some("that") => {
                    arity_check(e, items, 2, "that")?;
                    Ok(Term::That(Box::new(formula(&items[1])?)))
                }
                _ => {
                    let f = name(head, "function symbol")?;
                    let args = items[1..].iter().map(term).collect::<Res<_>>()?;
                    Ok(Term::App(f, args))
                }
            }
        }
    }
}

pub(crate) fn pred_expr(e: &SExpr) -> Res<PredExpr> {
    match e {
        SExpr::Atom(Tok::Symbol(_), _) => Ok(PredExpr::Const(name(e, "predicate")?)),
        SExpr::Atom(..) => err(e.span(), found(e), &["predicate expression"]),
        SExpr::List(items, span) => {
            let Some(head) = items.first() else { return err(*span, "empty list", &["predicate expression"]) };
            match symbol(head) {
                Some("lambda") => {
                    arity_check(e, items, 3, "lambda")?;
                    let Some(vars) = list(&items[1]).filter(|v| !v.is_empty()) else {
                        return err(items[1].span(), found(&items[1]), &["(?variable+)"]);
                    };
                    let vars = vars.iter().map(variable).collect::<Res<Vec<_>>>()?;
                    Ok(PredExpr::Lambda(vars, Box::new(formula(&items[2])?)))
                }
                Some("mod") => {
                    arity_check(e, items, 3, "mod")?;
                    Ok(PredExpr::Modified(name(&items[1], "modifier")?, Box::new(pred_expr(&items[2])?)))
                }
                _ => {
                    arity_check(e, items, 2, "term-derived predicate")?;
                    Ok(PredExpr::TermDerived(name(head, "operator")?, Box::new(term(&items[1])?)))
                }
            }
        }
    }
}

fn quant_sym(e: &SExpr) -> Res<QuantSym> {
    match e {
        SExpr::List(items, _) => {
            arity_check(e, items, 2, "quantifier")?;
            Ok(QuantSym::with_param(name(&items[0], "quantifier")?, int(&items[1])?))
        }
        _ => Ok(QuantSym::new(name(e, "quantifier")?)),
    }
}

fn binary(items: &[SExpr], e: &SExpr, op: &str, mk: fn(Formula, Formula) -> Formula) -> Res<Formula> {
    arity_check(e, items, 3, op)?;
    Ok(mk(formula(&items[1])?, formula(&items[2])?))
}

/// `(and a b c)` nests to the right: `(and a (and b c))`.
fn nary(items: &[SExpr], e: &SExpr, op: &str, mk: fn(Formula, Formula) -> Formula) -> Res<Formula> {
    if items.len() < 3 {
        return err(e.span(), format!("`{op}` needs at least two arguments"), &["formula"]);
    }
    let mut parts = items[1..].iter().map(formula).collect::<Res<Vec<_>>>()?;
    let mut acc = parts.pop().unwrap();
    while let Some(p) = parts.pop() {
        acc = mk(p, acc);
    }
    Ok(acc)
}

pub(crate) fn formula(e: &SExpr) -> Res<Formula> {
    match e {
        SExpr::Atom(Tok::Symbol(s), _) if s == "true" => Ok(Formula::True),
        SExpr::Atom(Tok::Symbol(_), _) => Ok(Formula::Atom(PredExpr::Const(name(e, "formula")?), vec![])),
        SExpr::Atom(..) => err(e.span(), found(e), &["formula"]),
        SExpr::List(items, span) => {
            let Some(head) = items.first() else { return err(*span, "empty list", &["formula"]) };
            match symbol(head) {
                Some("not") => {
                    arity_check(e, items, 2, "not")?;
                    Ok(Formula::not(formula(&items[1])?))
                }
                Some("and") => nary(items, e, "and", Formula::and),
                Some("or") => nary(items, e, "or", Formula::or),
                Some("implies") => binary(items, e, "implies", Formula::implies),
                Some("equiv") => binary(items, e, "equiv", Formula::equiv),
                Some("=") => {
                    arity_check(e, items, 3, "=")?;
                    Ok(Formula::Eq(term(&items[1])?, term(&items[2])?))
                }
                Some("poss") | Some("nec") => {
                    arity_check(e, items, 2, "modal operator")?;
                    let m = if symbol(head) == Some("poss") { Modality::Possibly } else { Modality::Necessarily };
                    Ok(Formula::Modal(m, Box::new(formula(&items[1])?)))
                }
                Some("forall") | Some("exists") => {
                    arity_check(e, items, 3, "quantifier sugar")?;
                    let v = variable(&items[1])?;
                    let body = formula(&items[2])?;
                    Ok(if symbol(head) == Some("forall") { Formula::forall(v, body) } else { Formula::exists(v, body) })
                }
                Some("quant") => {
                    arity_check(e, items, 5, "quant")?;
                    let q = quant_sym(&items[1])?;
                    let v = variable(&items[2])?;
                    Ok(Formula::quant(q, v, formula(&items[3])?, formula(&items[4])?))
                }
                Some("true") => err(head.span(), "`true` takes no arguments", &["formula"]),
                _ => {
                    let p = pred_expr(head)?;
                    let args = items[1..].iter().map(term).collect::<Res<_>>()?;
                    Ok(Formula::Atom(p, args))
                }
            }
        }
    }
}

fn keyword_section<'a>(e: &'a SExpr, key: &str) -> Option<&'a [SExpr]> {
    let items = list(e)?;
    (symbol(items.first()?) == Some(key)).then(|| &items[1..])
}

/// `(schema [name] (pred-vars (P 1) ...) (formula-vars PHI ...) (quant-vars (Q right-up) ...) body)`
pub(super) fn schema(e: &SExpr) -> Res<Schema> {
    let Some(items) = list(e) else { return err(e.span(), found(e), &["(schema ...)"]) };
    if items.first().and_then(symbol) != Some("schema") {
        return err(e.span(), "expected a schema form", &["(schema ...)"]);
    }
    let mut rest = &items[1..];
    let mut s = Schema::new(Formula::True);
    if rest.len() >= 2 {
        if let Some(n) = symbol(&rest[0]) {
            s.name = Some(name(&rest[0], "schema name").map(|_| n.to_string())?);
            rest = &rest[1..];
        }
    }
    let Some((body, sections)) = rest.split_last() else {
        return err(e.span(), "schema has no body", &["formula"]);
    };
    for sec in sections {
        if let Some(vars) = keyword_section(sec, "pred-vars") {
            for v in vars {
                let pair = list(v).filter(|p| p.len() == 2);
                let Some(pair) = pair else { return err(v.span(), found(v), &["(name arity)"]) };
                s.pred_vars.push((name(&pair[0], "predicate variable")?, int(&pair[1])? as usize));
            }
        } else if let Some(vars) = keyword_section(sec, "formula-vars") {
            for v in vars {
                s.formula_vars.push(name(v, "formula variable")?);
            }
        } else if let Some(vars) = keyword_section(sec, "quant-vars") {
            for v in vars {
                let pair = list(v).filter(|p| p.len() == 2);
                let Some(pair) = pair else { return err(v.span(), found(v), &["(name constraint)"]) };
                let c = match symbol(&pair[1]) {
                    Some("right-up") => QuantConstraint::RightUp,
                    Some("right-down") => QuantConstraint::RightDown,
                    Some("any") => QuantConstraint::Any,
                    _ => return err(pair[1].span(), found(&pair[1]), &["right-up", "right-down", "any"]),
                };
                s.quant_vars.push((name(&pair[0], "quantifier variable")?, c));
            }
        } else {
            return err(sec.span(), found(sec), &["(pred-vars ...)", "(formula-vars ...)", "(quant-vars ...)"]);
        }
    }
    s.body = formula(body)?;
    Ok(s)
}

fn declaration(e: &SExpr, items: &[SExpr]) -> Res<Declaration> {
    let Some(kind) = items.get(1) else { return err(e.span(), "empty declaration", &["declaration kind"]) };
    let args = &items[2..];
    if args.is_empty() {
        return err(e.span(), "nothing declared", &["symbol"]);
    }
    // `(declare predicate p 1 q 2 ...)`: name and arity pairs.
    let with_arity = |mk: fn(Vec<(Name, usize)>) -> Declaration| -> Res<Declaration> {
        if args.len() % 2 != 0 {
            return err(e.span(), "expected name and arity pairs", &["arity"]);
        }
        let pairs = args.chunks(2).map(|c| Ok((name(&c[0], "symbol")?, int(&c[1])? as usize))).collect::<Res<_>>()?;
        Ok(mk(pairs))
    };
    let names = |what| args.iter().map(|c| name(c, what)).collect::<Res<Vec<_>>>();
    match symbol(kind) {
        Some("function") => with_arity(Declaration::Functions),
        Some("predicate") => with_arity(Declaration::Predicates),
        Some("operator") => with_arity(Declaration::Operators),
        Some("modifier") => Ok(Declaration::Modifiers(names("modifier")?)),
        Some("constant") => Ok(Declaration::Constants(names("constant")?)),
        _ => err(kind.span(), found(kind), &["function", "predicate", "operator", "modifier", "constant"]),
    }
}

/// `(query [name] (scenario s ...) (uses n ...) (expect provable) (max-lexical-steps k) goal)`
fn query(e: &SExpr, items: &[SExpr]) -> Res<Query> {
    let mut rest = &items[1..];
    let mut q = Query {
        name: None,
        scenarios: Vec::new(),
        uses: None,
        expect: Expectation::Provable,
        max_lexical_steps: None,
        goal: Formula::True,
    };
    if rest.len() >= 2 {
        if symbol(&rest[0]).is_some() {
            q.name = Some(name(&rest[0], "query name")?);
            rest = &rest[1..];
        }
    }
    let Some((goal, options)) = rest.split_last() else { return err(e.span(), "query has no goal", &["formula"]) };
    for opt in options {
        if let Some(v) = keyword_section(opt, "scenario") {
            q.scenarios = v.iter().map(|s| name(s, "scenario name")).collect::<Res<_>>()?;
        } else if let Some(v) = keyword_section(opt, "uses") {
            q.uses = Some(v.iter().map(|s| name(s, "axiom or schema name")).collect::<Res<_>>()?);
        } else if let Some(v) = keyword_section(opt, "expect") {
            q.expect = match v.first().and_then(symbol) {
                Some("provable") if v.len() == 1 => Expectation::Provable,
                Some("not-provable") if v.len() == 1 => Expectation::NotProvable,
                _ => return err(opt.span(), found(opt), &["provable", "not-provable"]),
            };
        } else if let Some(v) = keyword_section(opt, "max-lexical-steps") {
            let [n] = v else { return err(opt.span(), found(opt), &["integer"]) };
            q.max_lexical_steps = Some(int(n)? as usize);
        } else {
            return err(opt.span(), found(opt), &["(scenario ...)", "(uses ...)", "(expect ...)", "(max-lexical-steps n)"]);
        }
    }
    q.goal = formula(goal)?;
    Ok(q)
}

pub(super) fn kb_item(e: &SExpr) -> Res<Spanned<KbItem>> {
    let expected = &["(axiom ...)", "(fact ...)", "(schema ...)", "(declare ...)", "(query ...)"];
    let Some(items) = list(e) else { return err(e.span(), found(e), expected) };
    let Some(head) = items.first() else { return err(e.span(), "empty list", expected) };
    let item = match symbol(head) {
        Some("axiom") => match items.len() {
            2 => KbItem::Axiom { name: None, formula: formula(&items[1])? },
            3 => KbItem::Axiom { name: Some(name(&items[1], "axiom name")?), formula: formula(&items[2])? },
            _ => return err(e.span(), "`axiom` takes an optional name and a formula", &["formula"]),
        },
        Some("fact") => {
            arity_check(e, items, 2, "fact")?;
            KbItem::Fact(formula(&items[1])?)
        }
        Some("schema") => KbItem::Schema(schema(e)?),
        Some("declare") => KbItem::Declare(declaration(e, items)?),
        Some("query") => KbItem::Query(query(e, items)?),
        _ => return err(head.span(), found(head), expected),
    };
    Ok(Spanned { item, span: e.span() })
}
