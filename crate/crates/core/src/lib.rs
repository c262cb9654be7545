//! `elfol`: an extended first-order logic for lexical knowledge.
//!
//! The language adds four things to plain FOL: restricted and generalized
//! quantifiers (`most`, `at-least 3`, ...), the modal operators `poss` and
//! `nec`, predicate modifiers (`(mod sounds reasonable)`), and reification of
//! predicates and sentences (`ka`, `that`). Around that language the crate
//! provides:
//!
//! - [`logic`]: the AST, signatures, well-formedness, substitution and alpha-equivalence
//! - [`syntax`]: the s-expression surface syntax (`.elf` files), parser and renderer
//! - [`quant`]: generalized quantifier definitions and a brute-force monotonicity checker
//! - [`model`]: finite possible-worlds models, evaluation and bounded model search
//! - [`schema`]: second-order axiom schemas, instantiation and pattern matching
//! - [`prover`]: a bounded backward-chaining prover and forward saturation, with replayable traces
//! - [`reduce`]: translation into plain FOL and proof-effort comparison
//! - [`lexicon`]: the bundled freight-scheduling lexicon, scenarios and query suite
//! - [`cli`]: the `elfol` command-line front end

pub mod cli;
pub mod kb;
pub mod lexicon;
pub mod logic;
pub mod model;
pub mod prover;
pub mod quant;
pub mod reduce;
pub mod schema;
pub mod syntax;

pub use logic::{Formula, Modality, PredExpr, QuantSym, Signature, Term};
pub use quant::QuantRegistry;
