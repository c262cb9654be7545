use super::*;
use crate::logic::Term;
use crate::syntax::parse_formula;

fn f(text: &str) -> Formula {
    parse_formula(text).unwrap()
}

fn kb(text: &str) -> KnowledgeBase {
    KnowledgeBase::parse(text).unwrap()
}

fn proved(kb: &KnowledgeBase, goal: &str) -> ProofStep {
    let reg = QuantRegistry::builtin();
    let r = prove(kb, &f(goal), &ProverConfig::default(), &reg);
    let p = r.proof().unwrap_or_else(|| panic!("{goal}: {}", r.label())).clone();
    validate(&p, kb, &reg).unwrap_or_else(|e| panic!("{e}\n{}", p.render()));
    p
}

const TRAINS: &str = "
(declare predicate result-state 1 contained-in 2 majority 2 member 2 tanker 1 in-elmira 1 city 1 oj 1 big 1)
(declare function enter 2)
(declare constant b1 f1 cars tie-coll)
";

#[test]
fn entering_gives_containment() {
    let k = kb(&format!(
        "{TRAINS}
         (axiom enter (forall ?x (forall ?y (implies (result-state (enter ?x ?y)) (contained-in ?x ?y)))))
         (fact (result-state (enter b1 f1)))"
    ));
    let p = proved(&k, "(contained-in b1 f1)");
    assert_eq!(p.lexical_steps(), 1);
    assert_eq!(p.rule, Rule::AxiomMatch { axiom: "enter".into(), clause: 0 });
    assert!(p.render().starts_with("axiom-match(enter) [lexical] (contained-in b1 f1)\n  fact-match"));
    let reg = QuantRegistry::builtin();
    let r = prove(&k, &f("(contained-in f1 b1)"), &ProverConfig::default(), &reg);
    assert!(!r.is_proved());
}

#[test]
fn conjunct_drop_is_one_monotone_step() {
    let k = kb(&format!("{TRAINS} (fact (quant (at-least 3) ?c (city ?c) (and (oj ?c) (big ?c))))"));
    let p = proved(&k, "(quant (at-least 3) ?c (city ?c) (oj ?c))");
    assert_eq!(p.rule, Rule::MonotoneQuant);
    assert_eq!(p.proof_len(), 1);
    assert_eq!(p.lexical_steps(), 0);
    let p = proved(&k, "(quant (at-least 3) ?c (city ?c) (big ?c))");
    assert_eq!(p.rule, Rule::MonotoneQuant);
}

#[test]
fn right_down_quantifiers_do_not_drop_conjuncts() {
    let k = kb(&format!("{TRAINS} (fact (quant (fewer-than 2) ?c (city ?c) (and (oj ?c) (big ?c))))"));
    let reg = QuantRegistry::builtin();
    let r = prove(&k, &f("(quant (fewer-than 2) ?c (city ?c) (oj ?c))"), &ProverConfig::default(), &reg);
    assert!(!r.is_proved());
    // ...but may weaken the body by disjuncts.
    let k = kb(&format!("{TRAINS} (fact (quant no ?c (city ?c) (or (oj ?c) (big ?c))))"));
    let p = proved(&k, "(quant no ?c (city ?c) (oj ?c))");
    assert_eq!(p.rule, Rule::MonotoneQuant);
}

#[test]
fn majority_needs_two_lexical_steps() {
    let k = kb(&format!(
        "{TRAINS}
         (axiom majority (forall ?a (forall ?b (implies (majority ?a ?b) (quant most ?z (member ?z ?a) (member ?z ?b))))))
         (axiom tie-coll (forall ?z (equiv (member ?z tie-coll) (and (tanker ?z) (in-elmira ?z)))))
         (fact (majority cars tie-coll))"
    ));
    let p = proved(&k, "(quant most ?z (member ?z cars) (tanker ?z))");
    assert!(p.lexical_steps() <= 2, "{}", p.render());
    assert!(p.iter().any(|s| s.rule == Rule::MonotoneQuant));
    proved(&k, "(quant most ?z (member ?z cars) (in-elmira ?z))");
}

#[test]
fn correctness_both_ways() {
    let schema = "(declare predicate correct 1) (declare constant now two-pm)
                  (schema correct (formula-vars PHI) (equiv (correct (that PHI)) PHI))";
    let k = kb(&format!("{schema} (fact (= now two-pm))"));
    let p = proved(&k, "(correct (that (= now two-pm)))");
    assert_eq!(p.lexical_steps(), 1);
    assert_eq!(p.rule, Rule::SchemaApply("correct".into()));
    let k = kb(&format!("{schema} (fact (correct (that (= now two-pm))))"));
    assert_eq!(proved(&k, "(= now two-pm)").lexical_steps(), 1);
}

#[test]
fn compatible_actions_are_jointly_possible() {
    let k = kb("(declare predicate action-type 1 compatible-with 2 realize 2) (declare constant a1 a2)
        (axiom compat (forall ?x (forall ?y (implies (and (action-type ?x) (action-type ?y) (compatible-with ?x ?y))
            (poss (exists ?u (exists ?v (and (realize ?u ?x) (realize ?v ?y)))))))))
        (fact (action-type a1)) (fact (action-type a2)) (fact (compatible-with a1 a2))");
    let p = proved(&k, "(poss (exists ?u (exists ?v (and (realize ?u a1) (realize ?v a2)))))");
    assert_eq!(p.lexical_steps(), 1);
    assert_eq!(p.proof_len(), 1);
    assert_eq!(p.children[0].rule, Rule::AndIntro);
}

#[test]
fn doing_an_action_type() {
    let k = kb("(declare predicate send-off 2) (declare operator do 1) (declare constant t1 r1)
        (schema do-ka (pred-vars (P 1)) (forall ?x (implies ((do (ka P)) ?x) (P ?x))))
        (fact ((do (ka (lambda (?x) (send-off ?x r1)))) t1))");
    let p = proved(&k, "(send-off t1 r1)");
    assert_eq!(p.lexical_steps(), 1);
}

#[test]
fn sounds_schema_backwards() {
    let k = kb("(declare predicate reasonable 1 person 1 consider 3 feel-that 3) (declare function end-of 1)
        (declare modifier sounds) (declare constant p1)
        (schema sounds (pred-vars (P 1))
          (forall ?x (equiv ((mod sounds P) ?x)
            (forall ?s (forall ?t (implies (and (person ?s) (consider ?s ?x ?t)) (feel-that ?s (that (P ?x)) (end-of ?t))))))))
        (fact (forall ?s (forall ?t (implies (and (person ?s) (consider ?s p1 ?t)) (feel-that ?s (that (reasonable p1)) (end-of ?t))))))");
    let p = proved(&k, "((mod sounds reasonable) p1)");
    assert_eq!(p.lexical_steps(), 1);
}

#[test]
fn facts_through_universals_and_case_splits() {
    let k = kb("(declare predicate p 1 q 1 r 1) (declare constant a b)
        (fact (forall ?x (implies (p ?x) (q ?x)))) (fact (p a))
        (fact (or (r a) (r b))) (fact (implies (r a) (q b))) (fact (implies (r b) (q b)))");
    let p = proved(&k, "(q a)");
    assert_eq!(p.rule, Rule::ModusPonens);
    assert_eq!(p.lexical_steps(), 0);
    let p = proved(&k, "(q b)");
    assert_eq!(p.rule, Rule::OrElim);
    proved(&k, "(or (r b) (q a))");
    proved(&k, "(and (p a) (q a))");
}

#[test]
fn exhaustion_is_distinct_from_failure() {
    let reg = QuantRegistry::builtin();
    let k = kb("(declare predicate p 1) (declare constant a)");
    let r = prove(&k, &f("(p a)"), &ProverConfig::default(), &reg);
    assert_eq!(r.outcome, Outcome::Failed);
    let k = kb("(declare predicate p 1 q 1) (declare constant a) (axiom ax (forall ?x (implies (q ?x) (p ?x)))) (fact (q a))");
    let cfg = ProverConfig { max_lexical_steps: 0, ..Default::default() };
    let r = prove(&k, &f("(p a)"), &cfg, &reg);
    assert_eq!(r.outcome, Outcome::Exhausted(vec![Limit::LexicalSteps]));
    assert_eq!(r.label(), "exhausted(lexical-steps)");
    let k = kb("(declare predicate p 1) (declare function s 1) (declare constant a)
        (axiom up (forall ?x (implies (p (s ?x)) (p ?x))))");
    let r = prove(&k, &f("(p a)"), &ProverConfig::default(), &reg);
    assert!(matches!(r.outcome, Outcome::Exhausted(_)), "{:?}", r.outcome);
}

#[test]
fn replay_rejects_tampering() {
    let k = kb(&format!(
        "{TRAINS}
         (axiom enter (forall ?x (forall ?y (implies (result-state (enter ?x ?y)) (contained-in ?x ?y)))))
         (fact (result-state (enter b1 f1)))"
    ));
    let reg = QuantRegistry::builtin();
    let mut p = proved(&k, "(contained-in b1 f1)");
    p.formula = f("(contained-in f1 b1)");
    assert!(validate(&p, &k, &reg).is_err());
    let bogus = ProofStep::leaf(Rule::FactMatch, f("(contained-in b1 f1)"));
    assert!(validate(&bogus, &k, &reg).is_err());
    let fewer = ProofStep::node(
        Rule::MonotoneQuant,
        f("(quant (fewer-than 2) ?c (city ?c) (oj ?c))"),
        vec![ProofStep::leaf(Rule::Hypothesis, f("(quant (fewer-than 2) ?c (city ?c) (and (oj ?c) (big ?c)))"))],
    );
    let err = validate(&fewer, &k, &reg).unwrap_err();
    assert!(err.reason.contains("profile"), "{err}");
}

#[test]
fn structured_trace_fields() {
    let k = kb("(declare predicate p 1) (declare constant a) (fact (p a))");
    let p = proved(&k, "(and (p a) (= a a))");
    let j = p.to_json();
    assert_eq!(j["rule"], "and-intro");
    assert_eq!(j["children"][1]["rule"], "reflexivity");
    assert_eq!(j["lexical_steps"], 0);
}

#[test]
fn forward_saturation() {
    let reg = QuantRegistry::builtin();
    let cfg = ProverConfig::default();
    let empty = forward_chain(&KnowledgeBase::default(), &cfg, &reg);
    assert!(empty.derived.is_empty());
    let k = kb("(declare predicate action-type 1 compatible-with 2 realize 2) (declare constant a1 a2)
        (axiom compat (forall ?x (forall ?y (implies (and (action-type ?x) (action-type ?y) (compatible-with ?x ?y))
            (poss (exists ?u (exists ?v (and (realize ?u ?x) (realize ?v ?y)))))))))
        (fact (action-type a1)) (fact (action-type a2)) (fact (compatible-with a1 a2))");
    let r = forward_chain(&k, &cfg, &reg);
    let want = f("(poss (exists ?u (exists ?v (and (realize ?u a1) (realize ?v a2)))))");
    assert!(r.derived.iter().any(|(g, _)| alpha_equivalent(g, &want)));
    assert!(!r.exhausted);
    for (_, p) in &r.derived {
        validate(p, &k, &reg).unwrap();
    }
}

#[test]
fn forward_sounds_both_directions() {
    let reg = QuantRegistry::builtin();
    let cfg = ProverConfig::default();
    let decl = "(declare predicate reasonable 1 person 1 consider 3 feel-that 3) (declare function end-of 1)
        (declare modifier sounds) (declare constant p1 s1 t2)
        (schema sounds (pred-vars (P 1))
          (forall ?x (equiv ((mod sounds P) ?x)
            (forall ?s (forall ?t (implies (and (person ?s) (consider ?s ?x ?t)) (feel-that ?s (that (P ?x)) (end-of ?t))))))))";
    let k = kb(&format!("{decl} (fact ((mod sounds reasonable) p1)) (fact (person s1)) (fact (consider s1 p1 t2))"));
    let r = forward_chain(&k, &cfg, &reg);
    let want = f("(feel-that s1 (that (reasonable p1)) (end-of t2))");
    assert!(r.derived.iter().any(|(g, _)| alpha_equivalent(g, &want)), "{:?}", r.derived.iter().map(|d| d.0.to_string()).collect::<Vec<_>>());
    let k = kb(&format!(
        "{decl} (fact (forall ?s (forall ?t (implies (and (person ?s) (consider ?s p1 ?t)) (feel-that ?s (that (reasonable p1)) (end-of ?t))))))"
    ));
    let r = forward_chain(&k, &cfg, &reg);
    assert!(r.derived.iter().any(|(g, _)| alpha_equivalent(g, &f("((mod sounds reasonable) p1)"))));
    for (_, p) in &r.derived {
        validate(p, &k, &reg).unwrap();
    }
}

#[test]
fn unification() {
    let none = Bindings::new();
    let s = unify(&f("(contained-in ?x f1)"), &f("(contained-in b1 f1)"), &none).unwrap();
    assert_eq!(s.get("x"), Some(&Term::constant("b1")));
    let ka = crate::syntax::parse_term("(ka (lambda (?x) (send-off ?x r1)))").unwrap();
    let s = unify_terms(&Term::var("v"), &ka, &none).unwrap();
    assert_eq!(s.get("v"), Some(&ka));
    let other = crate::syntax::parse_term("(ka (lambda (?y) (send-off ?y r1)))").unwrap();
    assert!(unify_terms(&ka, &other, &none).is_some());
    assert!(unify_terms(&Term::var("x"), &Term::app("f", vec![Term::var("x")]), &none).is_none());
    let s = unify(&f("(p ?x (g ?y))"), &f("(p (g ?z) ?x)"), &none).unwrap();
    assert_eq!(resolve(&Term::var("x"), &s), resolve(&Term::app("g", vec![Term::var("y")]), &s));
    // Bound variables stay rigid.
    assert!(unify(&f("(forall ?x (p ?x))"), &f("(forall ?y (p ?y))"), &none).is_some());
    assert!(unify(&f("(forall ?x (p ?z))"), &f("(forall ?y (p ?y))"), &none).is_none());
}
