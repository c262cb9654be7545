//! Forward chaining to a fixed point, reporting each derived fact with the
//! rule that produced it.

use elfol::kb::KnowledgeBase;
use elfol::prover::{forward_chain, validate, ProverConfig};
use elfol::QuantRegistry;

const KB: &str = "
(declare predicate reasonable 1 person 1 consider 3 feel-that 3 city 1 oj 1 big 1)
(declare function end-of 1) (declare modifier sounds) (declare constant p1 s1 t2)
(schema sounds (pred-vars (P 1))
  (forall ?x (equiv ((mod sounds P) ?x)
    (forall ?s (forall ?t (implies (and (person ?s) (consider ?s ?x ?t)) (feel-that ?s (that (P ?x)) (end-of ?t))))))))
(fact ((mod sounds reasonable) p1))
(fact (person s1))
(fact (consider s1 p1 t2))
(fact (quant most ?c (city ?c) (and (oj ?c) (big ?c))))
";

fn main() {
    let kb = KnowledgeBase::parse(KB).unwrap();
    let reg = QuantRegistry::builtin();
    let r = forward_chain(&kb, &ProverConfig::default(), &reg);
    println!("{} rounds, exhausted: {}", r.rounds, r.exhausted);
    for (f, proof) in &r.derived {
        validate(proof, &kb, &reg).unwrap();
        println!("{:<16} {f}", proof.rule.tag());
    }
}
