//! Parse formulas in the surface syntax, render them back, and look at
//! what the parser reports on bad input.

use elfol::syntax::{parse_formula, parse_kb, render};

fn main() {
    let inputs = [
        "(forall ?x (forall ?y (implies (result-state (enter ?x ?y)) (contained-in ?x ?y))))",
        "(quant (at-least 3) ?c (city ?c) (and (oj ?c) (big ?c)))",
        "(poss (exists ?u (exists ?v (and (realize ?u a1) (realize ?v a2)))))",
        "((mod sounds reasonable) p1)",
        "((do (ka (lambda (?x) (send-off ?x r1)))) t1)",
        "(correct (that (= now two-pm)))",
    ];
    for text in inputs {
        let f = parse_formula(text).expect("valid formula");
        let back = render(&f);
        println!("{back}");
        assert_eq!(parse_formula(&back).unwrap(), f);
    }

    for bad in ["(quant most ?x (p ?x))", "(and (p a)", "(forall x (p x))"] {
        println!("{bad:<28} -> {}", parse_formula(bad).unwrap_err());
    }

    let items = parse_kb("(declare predicate p 1) (fact (p a)) (axiom ax (forall ?x (p ?x)))").unwrap();
    for it in &items {
        println!("{}: {}", it.span, it.item);
    }
}
