//! Evaluate formulas in a hand-written possible-worlds model, then search
//! small models for a countermodel.

use elfol::model::{eval_formula, find_counterexample, parse_model, Env, ModelBounds};
use elfol::syntax::parse_formula;
use elfol::QuantRegistry;

fn main() {
    let m = parse_model(
        "(model (worlds w0 w1) (access (w0 w1))
           (individuals c1 c2 c3 u a1 a2)
           (pred city * (c1) (c2) (c3))
           (pred oj w0 (c1) (c2))
           (pred realize w1 (u a1) (u a2)))",
    )
    .unwrap();
    let reg = QuantRegistry::builtin();
    for text in [
        "(quant most ?c (city ?c) (oj ?c))",
        "(quant (at-least 3) ?c (city ?c) (oj ?c))",
        "(poss (exists ?u (and (realize ?u a1) (realize ?u a2))))",
        "(nec (exists ?u (realize ?u a1)))",
        "(poss (poss (realize u a1)))",
    ] {
        let v = eval_formula(&m, 0, &Env::new(), &parse_formula(text).unwrap(), &reg).unwrap();
        println!("{v:<5} {text}");
    }

    let bounds = ModelBounds { domain: 1..=3, worlds: 1..=2, ..Default::default() };
    let claim = parse_formula("(implies (poss (p a)) (nec (p a)))").unwrap();
    match find_counterexample(&claim, &reg, &bounds).unwrap() {
        Some(ce) => println!("countermodel for {claim}:\n{ce}"),
        None => println!("{claim} holds up to bounds"),
    }
}
