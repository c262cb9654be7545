//! Checked knowledge bases: a signature plus named axioms, facts, schemas
//! and queries.

use std::collections::BTreeSet;

use crate::logic::{well_formed_sentence, Formula, Name, Signature};
use crate::schema::Schema;
use crate::syntax::{apply_declarations, parse_kb, KbError, KbItem, Query, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub struct Axiom {
    pub name: Name,
    pub formula: Formula,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
    pub facts: Vec<Formula>,
    pub schemas: Vec<Schema>,
    pub queries: Vec<Query>,
}

impl KnowledgeBase {
    pub fn new(signature: Signature) -> Self {
        KnowledgeBase { signature, ..Default::default() }
    }

    /// Parses and checks a single file against a fresh signature.
    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::default();
        kb.load_str(None, text)?;
        Ok(kb)
    }

    /// Adds the contents of `text`. Declarations extend the signature;
    /// every other item must be well-formed against it.
    pub fn load_str(&mut self, file: Option<&str>, text: &str) -> Result<(), KbError> {
        self.load_sources(&[(file, text)])
    }

    /// Adds several files at once. Declarations from all of them are applied
    /// first, so the order of the files does not matter.
    pub fn load_sources(&mut self, sources: &[(Option<&str>, &str)]) -> Result<(), KbError> {
        let attach = |file: Option<&str>, e: KbError| match file {
            Some(f) => e.with_file(f),
            None => e,
        };
        let mut sig = self.signature.clone();
        let mut parsed = Vec::new();
        for (file, text) in sources {
            let items = parse_kb(text).map_err(|e| attach(*file, KbError::Syntax(e, None)))?;
            apply_declarations(&items, &mut sig).map_err(|e| attach(*file, e))?;
            parsed.push((*file, items));
        }
        let mut staged = KnowledgeBase { signature: sig, ..Default::default() };
        for (file, items) in &parsed {
            for it in items {
                staged.add_item(&it.item, it.span).map_err(|e| attach(*file, e))?;
            }
        }
        self.signature = staged.signature;
        self.axioms.extend(staged.axioms);
        self.facts.extend(staged.facts);
        self.schemas.extend(staged.schemas);
        self.queries.extend(staged.queries);
        Ok(())
    }

    fn add_item(&mut self, item: &KbItem, span: SourceSpan) -> Result<(), KbError> {
        let ill = |mut ds: Vec<crate::logic::Diagnostic>| match ds.is_empty() {
            true => Ok(()),
            false => Err(KbError::IllFormed { file: None, span, diagnostic: ds.remove(0) }),
        };
        match item {
            KbItem::Declare(_) => {}
            KbItem::Axiom { name, formula } => {
                ill(well_formed_sentence(formula, &self.signature))?;
                let name = name.clone().unwrap_or_else(|| format!("axiom-{}", self.axioms.len() + 1));
                self.axioms.push(Axiom { name, formula: formula.clone() });
            }
            KbItem::Fact(f) => {
                ill(well_formed_sentence(f, &self.signature))?;
                self.facts.push(f.clone());
            }
            KbItem::Schema(s) => {
                ill(well_formed_sentence(&s.body, &s.extend_signature(&self.signature)))?;
                let mut s = s.clone();
                if s.name.is_none() {
                    s.name = Some(format!("schema-{}", self.schemas.len() + 1));
                }
                self.schemas.push(s);
            }
            KbItem::Query(q) => {
                ill(well_formed_sentence(&q.goal, &self.signature))?;
                self.queries.push(q.clone());
            }
        }
        Ok(())
    }

    pub fn add_axiom(&mut self, name: impl Into<Name>, formula: Formula) {
        self.axioms.push(Axiom { name: name.into(), formula });
    }

    /// Keeps only the named axioms and schemas; facts are untouched.
    pub fn restrict(&self, uses: &[Name]) -> KnowledgeBase {
        let keep: BTreeSet<&str> = uses.iter().map(String::as_str).collect();
        let mut kb = self.clone();
        kb.axioms.retain(|a| keep.contains(a.name.as_str()));
        kb.schemas.retain(|s| s.name.as_deref().is_some_and(|n| keep.contains(n)));
        kb
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn schema(&self, name: &str) -> Option<&Schema> {
        self.schemas.iter().find(|s| s.name.as_deref() == Some(name))
    }
}
