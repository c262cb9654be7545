//! Load the bundled lexicon, run its query suite, and check the witness
//! model against the whole bundle.

use elfol::lexicon::{load_bundle, summary_table, witness_model};
use elfol::model::model_satisfies;
use elfol::prover::ProverConfig;
use elfol::QuantRegistry;

fn main() {
    let bundle = load_bundle().expect("bundle loads");
    let reg = QuantRegistry::builtin();
    let kb = bundle.full_kb();
    println!(
        "{} axioms, {} schemas, {} scenarios, {} queries",
        kb.axioms.len(),
        kb.schemas.len(),
        bundle.scenarios.len(),
        kb.queries.len()
    );
    print!("{}", summary_table(&bundle.run_suite(&ProverConfig::default(), &reg)));

    let m = witness_model().unwrap();
    println!("witness model satisfies the bundle: {}", model_satisfies(&m, &kb, &reg).unwrap());

    let q = bundle.query("do").unwrap();
    let o = bundle.run_query(q, &ProverConfig::default(), &reg);
    print!("\n{}", o.result.proof().unwrap().render());
}
