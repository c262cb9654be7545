use std::fmt::{self, Display, Formatter};

use serde_json::{json, Value};

use crate::logic::{Formula, Name};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    FactMatch,
    /// An assumption introduced by a disjunction case split.
    Hypothesis,
    AxiomMatch { axiom: Name, clause: usize },
    ModusPonens,
    UniversalInstantiation,
    AndIntro,
    AndElim,
    OrIntro,
    OrElim,
    /// Proves the consequent with the antecedent as a hypothesis.
    ImpliesIntro,
    EquivRewrite,
    SchemaApply(Name),
    MonotoneQuant,
    Reflexivity,
}

impl Rule {
    pub fn tag(&self) -> &'static str {
        match self {
            Rule::FactMatch => "fact-match",
            Rule::Hypothesis => "hypothesis",
            Rule::AxiomMatch { .. } => "axiom-match",
            Rule::ModusPonens => "modus-ponens",
            Rule::UniversalInstantiation => "universal-instantiation",
            Rule::AndIntro => "and-intro",
            Rule::AndElim => "and-elim",
            Rule::OrIntro => "or-intro",
            Rule::OrElim => "or-elim",
            Rule::ImpliesIntro => "implies-intro",
            Rule::EquivRewrite => "equiv-rewrite",
            Rule::SchemaApply(_) => "schema-apply",
            Rule::MonotoneQuant => "monotone-quant",
            Rule::Reflexivity => "reflexivity",
        }
    }

    pub fn is_lexical(&self) -> bool {
        matches!(self, Rule::AxiomMatch { .. } | Rule::SchemaApply(_))
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Rule::AxiomMatch { axiom, .. } => write!(f, "axiom-match({axiom})"),
            Rule::SchemaApply(name) => write!(f, "schema-apply({name})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// One node of a proof tree: `formula` follows from `children` by `rule`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: Rule,
    pub formula: Formula,
    pub children: Vec<ProofStep>,
    /// Conjunction eliminations needed to reach an axiom clause; zero elsewhere.
    pub extraction: usize,
}

impl ProofStep {
    pub fn leaf(rule: Rule, formula: Formula) -> Self {
        ProofStep { rule, formula, children: Vec::new(), extraction: 0 }
    }

    pub fn node(rule: Rule, formula: Formula, children: Vec<ProofStep>) -> Self {
        ProofStep { rule, formula, children, extraction: 0 }
    }

    /// Axiom and schema applications in the whole tree.
    pub fn lexical_steps(&self) -> usize {
        usize::from(self.rule.is_lexical()) + self.children.iter().map(|c| c.lexical_steps()).sum::<usize>()
    }

    /// Inference steps: every node except fact and hypothesis lookups,
    /// reflexivity and conjunction introduction, plus the conjunction
    /// eliminations hidden inside axiom matches.
    pub fn proof_len(&self) -> usize {
        let own = match self.rule {
            Rule::FactMatch | Rule::Hypothesis | Rule::Reflexivity | Rule::AndIntro => 0,
            _ => 1 + self.extraction,
        };
        own + self.children.iter().map(|c| c.proof_len()).sum::<usize>()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProofStep> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let s = stack.pop()?;
            stack.extend(s.children.iter().rev());
            Some(s)
        })
    }

    /// Indented text, one step per line: `<rule> [lexical] <formula>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, indent: usize, out: &mut String) {
        let mark = if self.rule.is_lexical() { " [lexical]" } else { "" };
        out.push_str(&format!("{:indent$}{}{} {}\n", "", self.rule, mark, self.formula, indent = indent * 2));
        for c in &self.children {
            c.render_into(indent + 1, out);
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "rule": self.rule.tag(),
            "formula": self.formula.to_string(),
            "lexical_steps": self.lexical_steps(),
            "children": self.children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        });
        match &self.rule {
            Rule::AxiomMatch { axiom, .. } => v["source"] = json!(axiom),
            Rule::SchemaApply(name) => v["source"] = json!(name),
            _ => {}
        }
        v
    }
}

impl Display for ProofStep {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
