//! Translate into plain first-order logic over a fixed domain and compare
//! proof effort against the extended encoding.

use elfol::kb::KnowledgeBase;
use elfol::prover::ProverConfig;
use elfol::reduce::{compare_effort, reduce, ReductionContext};
use elfol::syntax::parse_formula;
use elfol::QuantRegistry;

fn main() {
    let reg = QuantRegistry::builtin();
    let ctx = ReductionContext::new(&["a", "b"], &["w0", "w1"]).with_access(&[("w0", "w1")]);
    for text in ["(poss (P a))", "(quant most ?x (P ?x) (Q ?x))", "((mod very P) b)"] {
        let f = parse_formula(text).unwrap();
        println!("{text}\n  => {}", reduce(&f, &ctx, &reg).unwrap());
    }

    let kb = KnowledgeBase::parse(
        "(declare predicate city 1 oj 1 big 1) (declare constant c1 c2 c3 c4 c5 c6)
         (fact (quant (at-least 3) ?c (city ?c) (and (oj ?c) (big ?c))))",
    )
    .unwrap();
    let goal = parse_formula("(quant (at-least 3) ?c (city ?c) (oj ?c))").unwrap();
    let six = ReductionContext::new(&["c1", "c2", "c3", "c4", "c5", "c6"], &["w0"]);
    let report = compare_effort(&kb, &goal, &six, &ProverConfig::default(), &reg).unwrap();
    print!("\n{report}");
}
