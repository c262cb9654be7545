//! Schemas: instantiate one by hand, match a goal against its conclusion,
//! and check validity by bounded model search.

use elfol::model::{schema_counterexample, ModelBounds};
use elfol::schema::{instantiate, match_conclusion, SchemaBinding};
use elfol::syntax::{parse_formula, parse_schema};
use elfol::{PredExpr, QuantRegistry, QuantSym};

const CONJ_DROP: &str = "(schema monotone-conj-drop (pred-vars (P1 1) (P2 1) (P3 1)) (quant-vars (Q right-up))
    (implies (quant Q ?x (P1 ?x) (and (P2 ?x) (P3 ?x))) (quant Q ?x (P1 ?x) (P2 ?x))))";

fn main() {
    let reg = QuantRegistry::builtin();
    let s = parse_schema(CONJ_DROP).unwrap();

    let mut b = SchemaBinding::default();
    b.quants.insert("Q".into(), QuantSym::with_param("at-least", 3));
    for (v, p) in [("P1", "city"), ("P2", "oj"), ("P3", "big")] {
        b.preds.insert(v.into(), PredExpr::constant(p));
    }
    println!("instance: {}", instantiate(&s, &b, &reg).unwrap());

    let goal = parse_formula("(quant most ?c (city ?c) (oj ?c))").unwrap();
    for m in match_conclusion(&s, &goal, &reg) {
        println!("match leaves premise {}", m.premise(&s).unwrap());
    }

    let bounds = ModelBounds { domain: 1..=3, ..Default::default() };
    let v = schema_counterexample(&s, &reg, &bounds).unwrap();
    println!("{} instances, {} models, counterexample: {}", v.instances, v.models_checked, v.counterexample.is_some());

    let correct = parse_schema("(schema correct (formula-vars PHI) (equiv (correct (that PHI)) PHI))").unwrap();
    let v = schema_counterexample(&correct, &reg, &bounds).unwrap();
    if let Some((f, m)) = v.counterexample {
        println!("meaning postulates are not logical truths; {f} fails in\n{m}");
    }
}
