//! The bundled freight-scheduling lexicon: declarations, meaning postulates,
//! schemas, per-scenario fact sets, a query suite and a witness model.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde_json::json;

use crate::kb::KnowledgeBase;
use crate::logic::{Formula, Name};
use crate::model::{parse_model, IntensionalModel};
use crate::prover::{prove, ProofResult, ProverConfig};
use crate::quant::QuantRegistry;
use crate::syntax::{Expectation, KbError, ParseError, Query};

/// Shared files, in load order.
pub const BASE_FILES: [(&str, &str); 4] = [
    ("core.elf", include_str!("../lexicon/core.elf")),
    ("axioms.elf", include_str!("../lexicon/axioms.elf")),
    ("schemas.elf", include_str!("../lexicon/schemas.elf")),
    ("queries.elf", include_str!("../lexicon/queries.elf")),
];

/// Scenario fact sets, keyed by the name queries refer to them by.
pub const SCENARIO_FILES: [(&str, &str); 10] = [
    ("enter", include_str!("../lexicon/scenario-enter.elf")),
    ("cities", include_str!("../lexicon/scenario-cities.elf")),
    ("majority", include_str!("../lexicon/scenario-majority.elf")),
    ("time", include_str!("../lexicon/scenario-time.elf")),
    ("time-claim", include_str!("../lexicon/scenario-time-claim.elf")),
    ("plan", include_str!("../lexicon/scenario-plan.elf")),
    ("sounds", include_str!("../lexicon/scenario-sounds.elf")),
    ("do", include_str!("../lexicon/scenario-do.elf")),
    ("hedges", include_str!("../lexicon/scenario-hedges.elf")),
    ("kinds", include_str!("../lexicon/scenario-kinds.elf")),
];

pub const WITNESS_MODEL: &str = include_str!("../lexicon/witness.model");

#[derive(Clone, Debug)]
pub struct Bundle {
    /// Signature, axioms, schemas and queries; no facts.
    pub base: KnowledgeBase,
    pub scenarios: BTreeMap<Name, Vec<Formula>>,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("witness.model: {0}")]
    Model(#[from] ParseError),
    #[error("query `{query}` names unknown scenario `{scenario}`")]
    UnknownScenario { query: String, scenario: Name },
}

pub fn load_bundle() -> Result<Bundle, BundleError> {
    let mut base = KnowledgeBase::default();
    for (file, text) in BASE_FILES {
        base.load_str(Some(file), text)?;
    }
    let mut scenarios = BTreeMap::new();
    for (name, text) in SCENARIO_FILES {
        let mut kb = KnowledgeBase::new(base.signature.clone());
        kb.load_str(Some(&format!("scenario-{name}.elf")), text)?;
        scenarios.insert(name.to_string(), kb.facts);
    }
    for q in &base.queries {
        if let Some(s) = q.scenarios.iter().find(|s| !scenarios.contains_key(*s)) {
            return Err(BundleError::UnknownScenario { query: query_name(q).into(), scenario: s.clone() });
        }
    }
    Ok(Bundle { base, scenarios })
}

pub fn witness_model() -> Result<IntensionalModel, BundleError> {
    Ok(parse_model(WITNESS_MODEL)?)
}

fn query_name(q: &Query) -> &str {
    q.name.as_deref().unwrap_or("<unnamed>")
}

impl Bundle {
    /// Everything in the bundle, with every scenario's facts.
    pub fn full_kb(&self) -> KnowledgeBase {
        let mut kb = self.base.clone();
        kb.facts = self.scenarios.values().flatten().cloned().collect();
        kb
    }

    /// The knowledge a query may use.
    pub fn query_kb(&self, q: &Query) -> KnowledgeBase {
        let mut kb = match &q.uses {
            Some(uses) => self.base.restrict(uses),
            None => self.base.clone(),
        };
        kb.queries.clear();
        kb.facts = q.scenarios.iter().flat_map(|s| self.scenarios[s].iter().cloned()).collect();
        kb
    }

    pub fn query(&self, name: &str) -> Option<&Query> {
        self.base.queries.iter().find(|q| q.name.as_deref() == Some(name))
    }

    pub fn run_query(&self, q: &Query, cfg: &ProverConfig, registry: &QuantRegistry) -> QueryOutcome {
        let kb = self.query_kb(q);
        let start = Instant::now();
        let result = prove(&kb, &q.goal, cfg, registry);
        let elapsed = start.elapsed();
        let lexical_steps = result.proof().map(|p| p.lexical_steps());
        let passed = match q.expect {
            Expectation::Provable => {
                result.is_proved() && q.max_lexical_steps.zip(lexical_steps).is_none_or(|(max, n)| n <= max)
            }
            Expectation::NotProvable => !result.is_proved(),
        };
        QueryOutcome { name: query_name(q).to_string(), expect: q.expect, result, lexical_steps, elapsed, passed }
    }

    pub fn run_suite(&self, cfg: &ProverConfig, registry: &QuantRegistry) -> Vec<QueryOutcome> {
        self.base.queries.iter().map(|q| self.run_query(q, cfg, registry)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct QueryOutcome {
    pub name: String,
    pub expect: Expectation,
    pub result: ProofResult,
    pub lexical_steps: Option<usize>,
    pub elapsed: Duration,
    pub passed: bool,
}

impl QueryOutcome {
    /// Timing is left out so records are identical across runs.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "query": self.name,
            "expect": match self.expect { Expectation::Provable => "provable", Expectation::NotProvable => "not-provable" },
            "outcome": self.result.label(),
            "lexical_steps": self.lexical_steps,
            "proof_len": self.result.proof().map(|p| p.proof_len()),
            "passed": self.passed,
        })
    }
}

/// A fixed-width table of suite outcomes with a closing tally.
pub fn summary_table(outcomes: &[QueryOutcome]) -> String {
    let mut out = format!("{:<14} {:<14} {:<30} {:>7} {:>9}  status\n", "query", "expect", "outcome", "lexical", "ms");
    for o in outcomes {
        let expect = match o.expect {
            Expectation::Provable => "provable",
            Expectation::NotProvable => "not-provable",
        };
        let lex = o.lexical_steps.map_or("-".into(), |n| n.to_string());
        out += &format!(
            "{:<14} {:<14} {:<30} {:>7} {:>9.1}  {}\n",
            o.name,
            expect,
            o.result.label(),
            lex,
            o.elapsed.as_secs_f64() * 1000.0,
            if o.passed { "pass" } else { "FAIL" }
        );
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    out += &format!("{passed}/{} queries passed\n", outcomes.len());
    out
}
