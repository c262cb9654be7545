//! Textual model files and dumps.
//!
//! ```text
//! (model
//!   (worlds w0 w1)
//!   (access (w0 w1))
//!   (individuals a b k1)
//!   (constant now t2)
//!   (reify k1 (ka (lambda (?x) (send-off ?x r1))))
//!   (pred city w0 (a) (b))      ; `*` instead of a world means every world
//!   (fun end-of (a) b)
//!   (fun-default end-of a)
//!   (mod sounds reasonable w0 (a))
//!   (derived do k1 w0 (a)))
//! ```

use std::collections::BTreeSet;
use std::fmt::{self, Display, Formatter};

use super::{Ind, Individual, IntensionalModel, World};
use crate::syntax::lexer::{read_all, SExpr};
use crate::syntax::parser::{err, found, list, name, symbol, term, Res};
use crate::syntax::ParseError;

fn tuple_list(m: &IntensionalModel, tuples: &[SExpr]) -> Res<BTreeSet<Vec<Ind>>> {
    let mut out = BTreeSet::new();
    for t in tuples {
        let Some(items) = list(t) else { return err(t.span(), found(t), &["(individual ...)"]) };
        out.insert(items.iter().map(|i| individual(m, i)).collect::<Res<Vec<_>>>()?);
    }
    Ok(out)
}

fn individual(m: &IntensionalModel, e: &SExpr) -> Res<Ind> {
    let n = name(e, "individual")?;
    match m.individual(&n) {
        Some(i) => Ok(i),
        None => err(e.span(), format!("unknown individual `{n}`"), &["declared individual"]),
    }
}

fn worlds(m: &IntensionalModel, e: &SExpr) -> Res<Vec<World>> {
    if symbol(e) == Some("*") {
        return Ok((0..m.worlds.len()).collect());
    }
    let n = name(e, "world")?;
    match m.world(&n) {
        Some(w) => Ok(vec![w]),
        None => err(e.span(), format!("unknown world `{n}`"), &["declared world"]),
    }
}

fn need(e: &SExpr, items: &[SExpr], min: usize, form: &str) -> Res<()> {
    if items.len() < min {
        return err(e.span(), format!("`{form}` is missing arguments"), &[form]);
    }
    Ok(())
}

/// Parses a model file. `worlds` and `individuals` must precede their uses.
pub fn parse_model(text: &str) -> Result<IntensionalModel, ParseError> {
    let forms = read_all(text)?;
    let [top] = forms.as_slice() else {
        let span = forms.get(1).map(|f| f.span()).unwrap_or_default();
        return err(span, "expected exactly one model form", &["(model ...)"]);
    };
    let Some(items) = list(top).filter(|i| i.first().and_then(symbol) == Some("model")) else {
        return err(top.span(), found(top), &["(model ...)"]);
    };
    let mut m = IntensionalModel { worlds: vec!["w0".into()], ..Default::default() };
    for sec in &items[1..] {
        let Some(parts) = list(sec).filter(|p| !p.is_empty()) else { return err(sec.span(), found(sec), &["section"]) };
        let args = &parts[1..];
        match symbol(&parts[0]) {
            Some("worlds") => {
                need(sec, parts, 2, "worlds")?;
                m.worlds = args.iter().map(|w| name(w, "world")).collect::<Res<_>>()?;
            }
            Some("individuals") => {
                for i in args {
                    let n = name(i, "individual")?;
                    if m.individual(&n).is_none() {
                        m.individuals.push(Individual { name: n, reified: false });
                    }
                }
            }
            Some("access") => {
                for pair in args {
                    let Some(ends) = list(pair).filter(|p| p.len() == 2) else {
                        return err(pair.span(), found(pair), &["(world world)"]);
                    };
                    let from = worlds(&m, &ends[0])?;
                    let to = worlds(&m, &ends[1])?;
                    for f in &from {
                        for t in &to {
                            m.access.insert((*f, *t));
                        }
                    }
                }
            }
            Some("constant") => {
                need(sec, parts, 3, "constant")?;
                let c = name(&args[0], "constant")?;
                let d = individual(&m, &args[1])?;
                m.constants.insert(c, d);
            }
            Some("reify") => {
                need(sec, parts, 3, "reify")?;
                let n = name(&args[0], "individual")?;
                let d = match m.individual(&n) {
                    Some(d) => d,
                    None => {
                        m.individuals.push(Individual { name: n, reified: true });
                        m.individuals.len() - 1
                    }
                };
                let t = term(&args[1])?;
                if !t.is_reified() {
                    return err(args[1].span(), found(&args[1]), &["(ka ...)", "(that ...)"]);
                }
                m.reify(&t, d);
            }
            Some("pred") => {
                need(sec, parts, 3, "pred")?;
                let p = name(&args[0], "predicate")?;
                let ext = tuple_list(&m, &args[2..])?;
                for w in worlds(&m, &args[1])? {
                    m.preds.entry((p.clone(), w)).or_default().extend(ext.iter().cloned());
                }
            }
            Some("fun") => {
                need(sec, parts, 4, "fun")?;
                let f = name(&args[0], "function")?;
                let Some(ins) = list(&args[1]) else { return err(args[1].span(), found(&args[1]), &["(individual ...)"]) };
                let ins = ins.iter().map(|i| individual(&m, i)).collect::<Res<Vec<_>>>()?;
                let out = individual(&m, &args[2])?;
                m.funcs.entry(f).or_default().insert(ins, out);
            }
            Some("fun-default") => {
                need(sec, parts, 3, "fun-default")?;
                let f = name(&args[0], "function")?;
                let d = individual(&m, &args[1])?;
                m.func_defaults.insert(f, d);
            }
            Some("mod") => {
                need(sec, parts, 4, "mod")?;
                let md = name(&args[0], "modifier")?;
                let p = name(&args[1], "predicate")?;
                let ext = tuple_list(&m, &args[3..])?;
                for w in worlds(&m, &args[2])? {
                    m.modified.entry((md.clone(), p.clone(), w)).or_default().extend(ext.iter().cloned());
                }
            }
            Some("derived") => {
                need(sec, parts, 4, "derived")?;
                let op = name(&args[0], "operator")?;
                let d = individual(&m, &args[1])?;
                let ext = tuple_list(&m, &args[3..])?;
                for w in worlds(&m, &args[2])? {
                    m.derived.entry((op.clone(), d, w)).or_default().extend(ext.iter().cloned());
                }
            }
            _ => {
                return err(
                    parts[0].span(),
                    found(&parts[0]),
                    &["worlds", "individuals", "access", "constant", "reify", "pred", "fun", "fun-default", "mod", "derived"],
                )
            }
        }
    }
    if m.individuals.is_empty() {
        return err(top.span(), "a model needs at least one individual", &["(individuals ...)"]);
    }
    Ok(m)
}

impl IntensionalModel {
    fn ind_name(&self, d: Ind) -> &str {
        &self.individuals[d].name
    }

    fn tuples(&self, ext: &BTreeSet<Vec<Ind>>) -> String {
        ext.iter()
            .map(|t| format!(" ({})", t.iter().map(|d| self.ind_name(*d)).collect::<Vec<_>>().join(" ")))
            .collect()
    }
}

/// Stable, diffable dump in the model file format.
impl Display for IntensionalModel {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(model")?;
        writeln!(f, "  (worlds {})", self.worlds.join(" "))?;
        if !self.access.is_empty() {
            let pairs: Vec<String> =
                self.access.iter().map(|(a, b)| format!("({} {})", self.worlds[*a], self.worlds[*b])).collect();
            writeln!(f, "  (access {})", pairs.join(" "))?;
        }
        let names: Vec<&str> = self.individuals.iter().map(|i| i.name.as_str()).collect();
        write!(f, "  (individuals {})", names.join(" "))?;
        for (c, d) in &self.constants {
            write!(f, "\n  (constant {c} {})", self.ind_name(*d))?;
        }
        let mut reified: Vec<_> = self.reified.iter().collect();
        reified.sort_by_key(|(t, d)| (**d, t.to_string()));
        for (t, d) in reified {
            write!(f, "\n  (reify {} {t})", self.ind_name(*d))?;
        }
        for ((p, w), ext) in &self.preds {
            write!(f, "\n  (pred {p} {}{})", self.worlds[*w], self.tuples(ext))?;
        }
        for (name, table) in &self.funcs {
            for (ins, out) in table {
                let ins: Vec<&str> = ins.iter().map(|d| self.ind_name(*d)).collect();
                write!(f, "\n  (fun {name} ({}) {})", ins.join(" "), self.ind_name(*out))?;
            }
        }
        for (name, d) in &self.func_defaults {
            write!(f, "\n  (fun-default {name} {})", self.ind_name(*d))?;
        }
        for ((m, p, w), ext) in &self.modified {
            write!(f, "\n  (mod {m} {p} {}{})", self.worlds[*w], self.tuples(ext))?;
        }
        for ((op, d, w), ext) in &self.derived {
            write!(f, "\n  (derived {op} {} {}{})", self.ind_name(*d), self.worlds[*w], self.tuples(ext))?;
        }
        write!(f, ")")
    }
}
