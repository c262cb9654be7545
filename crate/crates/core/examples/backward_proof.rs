//! Backward chaining with a lexical-step budget; every trace is re-checked
//! by replay.

use elfol::kb::KnowledgeBase;
use elfol::prover::{prove, validate, ProverConfig};
use elfol::syntax::parse_formula;
use elfol::QuantRegistry;

const KB: &str = "
(declare predicate majority 2 member 2 tanker 1 in-elmira 1)
(declare constant cars tie-coll)
(axiom majority (forall ?a (forall ?b (implies (majority ?a ?b) (quant most ?z (member ?z ?a) (member ?z ?b))))))
(axiom tie-coll (forall ?z (equiv (member ?z tie-coll) (and (tanker ?z) (in-elmira ?z)))))
(fact (majority cars tie-coll))
";

fn main() {
    let kb = KnowledgeBase::parse(KB).unwrap();
    let reg = QuantRegistry::builtin();
    let goal = parse_formula("(quant most ?z (member ?z cars) (tanker ?z))").unwrap();

    let r = prove(&kb, &goal, &ProverConfig::default(), &reg);
    let p = r.proof().expect("provable");
    print!("{}", p.render());
    println!("lexical steps {}, proof length {}, rules tried {}", p.lexical_steps(), p.proof_len(), r.explored);
    validate(p, &kb, &reg).expect("replays");
    println!("{}", p.to_json());

    // With a budget of one lexical step the same goal is out of reach.
    let tight = ProverConfig { max_lexical_steps: 1, ..Default::default() };
    println!("budget 1: {}", prove(&kb, &goal, &tight, &reg).label());
}
