//! The `elfol` command line. [`run`] takes its arguments and output streams
//! explicitly so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::kb::KnowledgeBase;
use crate::lexicon::{load_bundle, summary_table};
use crate::logic::{well_formed_sentence, Formula};
use crate::model::{eval_formula, parse_model, schema_counterexample, Env, ModelBounds};
use crate::prover::{prove, ProverConfig};
use crate::quant::QuantRegistry;
use crate::reduce::{compare_effort, ReductionContext};
use crate::syntax::parse_formula;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "elfol", version, about = "Reasoning in an extended first-order logic")]
pub struct Cli {
    /// Print line-delimited JSON records instead of text.
    #[arg(long, global = true)]
    pub structured: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Bounds {
    /// Maximum proof depth.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: Option<u64>,
    /// Maximum number of axiom and schema applications.
    #[arg(long)]
    pub lexical_steps: Option<usize>,
    /// Search timeout; defaults to ELFOL_TIMEOUT_MS or ten seconds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout_ms: Option<u64>,
}

impl Bounds {
    fn config(&self) -> ProverConfig {
        let mut cfg = ProverConfig::default();
        if let Some(d) = self.depth {
            cfg.max_depth = d as usize;
        }
        if let Some(l) = self.lexical_steps {
            cfg.max_lexical_steps = l;
        }
        if let Some(t) = self.timeout_ms {
            cfg.timeout_ms = t;
        }
        cfg
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Prove a goal from knowledge-base files; exit 1 if no proof within bounds.
    Prove {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        goal: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Evaluate a closed formula in a model file; exit 1 if false.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        /// World to evaluate at (default: the first).
        #[arg(long)]
        world: Option<String>,
    },
    /// Search small models for a counterexample to a schema.
    Validate {
        #[arg(long)]
        schema: String,
        /// Files to find the schema in (default: the bundled lexicon).
        #[arg(long, num_args = 1..)]
        kb: Vec<PathBuf>,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        max_domain: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        max_worlds: u64,
    },
    /// Compare proof effort on the extended and the reduced encoding.
    Reduce {
        #[arg(long, required = true, num_args = 1..)]
        kb: Vec<PathBuf>,
        #[arg(long)]
        goal: String,
        /// Comma-separated domain constants.
        #[arg(long, value_delimiter = ',', required = true)]
        domain: Vec<String>,
        /// Comma-separated worlds; the first is the actual one.
        #[arg(long, value_delimiter = ',', default_value = "w0")]
        worlds: Vec<String>,
        /// Comma-separated accessibility pairs such as `w0:w1`.
        #[arg(long, value_delimiter = ',')]
        access: Vec<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check knowledge-base files for well-formedness only.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the bundled query suite.
    Demo {
        #[command(flatten)]
        bounds: Bounds,
    },
}

struct Failure(String);

type Res<T> = Result<T, Failure>;

fn fail<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure(msg.into()))
}

fn load(files: &[PathBuf]) -> Res<KnowledgeBase> {
    let mut texts = Vec::new();
    for path in files {
        let name = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| Failure(format!("{name}: {e}")))?;
        texts.push((name, text));
    }
    let sources: Vec<(Option<&str>, &str)> = texts.iter().map(|(n, t)| (Some(n.as_str()), t.as_str())).collect();
    let mut kb = KnowledgeBase::default();
    kb.load_sources(&sources).map_err(|e| Failure(e.to_string()))?;
    Ok(kb)
}

fn goal(text: &str, kb: &KnowledgeBase) -> Res<Formula> {
    let f = parse_formula(text).map_err(|e| Failure(format!("--goal:{e}")))?;
    if let Some(d) = well_formed_sentence(&f, &kb.signature).first() {
        return fail(format!("--goal: {d}"));
    }
    Ok(f)
}

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure(format!("writing output: {e}"))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Res<i32> {
    let registry = QuantRegistry::builtin();
    match &cli.command {
        Command::Prove { files, goal: text, bounds } => {
            let kb = load(files)?;
            let g = goal(text, &kb)?;
            let r = prove(&kb, &g, &bounds.config(), &registry);
            if cli.structured {
                if let Some(p) = r.proof() {
                    writeln!(out, "{}", p.to_json()).map_err(io)?;
                }
                writeln!(out, "{}", json!({ "goal": g.to_string(), "outcome": r.label(), "explored": r.explored })).map_err(io)?;
            } else {
                match r.proof() {
                    Some(p) => {
                        write!(out, "{}", p.render()).map_err(io)?;
                        writeln!(out, "proved with {} lexical step(s), proof length {}", p.lexical_steps(), p.proof_len())
                            .map_err(io)?;
                    }
                    None => writeln!(out, "{}: {} after {} rule applications", g, r.label(), r.explored).map_err(io)?,
                }
            }
            Ok(if r.is_proved() { EXIT_OK } else { EXIT_NO })
        }
        Command::Eval { model, formula, world } => {
            let name = model.display().to_string();
            let text = fs::read_to_string(model).map_err(|e| Failure(format!("{name}: {e}")))?;
            let m = parse_model(&text).map_err(|e| Failure(format!("{name}:{e}")))?;
            let f = parse_formula(formula).map_err(|e| Failure(format!("--formula:{e}")))?;
            let w = match world {
                Some(w) => m.world(w).ok_or_else(|| Failure(format!("unknown world `{w}`")))?,
                None => 0,
            };
            let value = eval_formula(&m, w, &Env::new(), &f, &registry).map_err(|e| Failure(e.to_string()))?;
            if cli.structured {
                writeln!(out, "{}", json!({ "formula": f.to_string(), "world": m.worlds[w], "value": value })).map_err(io)?;
            } else {
                writeln!(out, "{value}").map_err(io)?;
            }
            Ok(if value { EXIT_OK } else { EXIT_NO })
        }
        Command::Validate { schema, kb, max_domain, max_worlds } => {
            let kb = match kb.is_empty() {
                true => load_bundle().map_err(|e| Failure(e.to_string()))?.base,
                false => load(kb)?,
            };
            let s = kb.schema(schema).ok_or_else(|| Failure(format!("no schema named `{schema}`")))?;
            let bounds = ModelBounds {
                domain: 1..=*max_domain as usize,
                worlds: 1..=*max_worlds as usize,
                ..Default::default()
            };
            let v = schema_counterexample(s, &registry, &bounds).map_err(|e| Failure(e.to_string()))?;
            if cli.structured {
                let ce = v.counterexample.as_ref().map(|(f, m)| json!({ "instance": f.to_string(), "model": m.to_string() }));
                let rec = json!({ "schema": schema, "instances": v.instances, "models": v.models_checked.to_string(), "counterexample": ce });
                writeln!(out, "{rec}").map_err(io)?;
            } else {
                match &v.counterexample {
                    None => writeln!(out, "valid up to bounds ({} instances, {} models)", v.instances, v.models_checked).map_err(io)?,
                    Some((f, m)) => writeln!(out, "counterexample to {f}\n{m}").map_err(io)?,
                }
            }
            Ok(if v.counterexample.is_none() { EXIT_OK } else { EXIT_NO })
        }
        Command::Reduce { kb, goal: text, domain, worlds, access, bounds } => {
            let kb = load(kb)?;
            let g = goal(text, &kb)?;
            let pairs = access
                .iter()
                .map(|p| p.split_once(':').ok_or_else(|| Failure(format!("--access: expected from:to, got `{p}`"))))
                .collect::<Res<Vec<_>>>()?;
            let doms: Vec<&str> = domain.iter().map(String::as_str).collect();
            let ws: Vec<&str> = worlds.iter().map(String::as_str).collect();
            let ctx = ReductionContext::new(&doms, &ws).with_access(&pairs);
            let report = compare_effort(&kb, &g, &ctx, &bounds.config(), &registry).map_err(|e| Failure(e.to_string()))?;
            if cli.structured {
                write!(out, "{}", report.to_json_lines()).map_err(io)?;
            } else {
                write!(out, "{report}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Check { files } => {
            let kb = load(files)?;
            let msg = format!(
                "ok: {} axioms, {} schemas, {} facts, {} queries",
                kb.axioms.len(),
                kb.schemas.len(),
                kb.facts.len(),
                kb.queries.len()
            );
            if cli.structured {
                writeln!(out, "{}", json!({ "status": "ok", "axioms": kb.axioms.len(), "schemas": kb.schemas.len(), "facts": kb.facts.len(), "queries": kb.queries.len() })).map_err(io)?;
            } else {
                writeln!(out, "{msg}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Demo { bounds } => {
            let bundle = load_bundle().map_err(|e| Failure(e.to_string()))?;
            let outcomes = bundle.run_suite(&bounds.config(), &registry);
            if cli.structured {
                for o in &outcomes {
                    writeln!(out, "{}", o.to_json()).map_err(io)?;
                }
            } else {
                write!(out, "{}", summary_table(&outcomes)).map_err(io)?;
            }
            Ok(if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_NO })
        }
    }
}
