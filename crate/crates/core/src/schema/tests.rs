use super::*;
use crate::quant::QuantKind;
use crate::syntax::{parse_formula, parse_pred_expr, parse_schema};

const CONJ_DROP: &str = "(schema conj-drop (pred-vars (P1 1) (P2 1) (P3 1)) (quant-vars (Q right-up)) \
    (implies (quant Q ?x (P1 ?x) (and (P2 ?x) (P3 ?x))) (quant Q ?x (P1 ?x) (P2 ?x))))";
const DO_KA: &str = "(schema do-ka (pred-vars (P 1)) (forall ?x (implies ((do (ka P)) ?x) (P ?x))))";
const CORRECT: &str = "(schema correct (formula-vars PHI) (equiv (correct (that PHI)) PHI))";

fn f(text: &str) -> Formula {
    parse_formula(text).unwrap()
}

fn binding(preds: &[(&str, &str)], quants: &[(&str, QuantSym)]) -> SchemaBinding {
    SchemaBinding {
        preds: preds.iter().map(|(n, p)| (n.to_string(), parse_pred_expr(p).unwrap())).collect(),
        formulas: BTreeMap::new(),
        quants: quants.iter().map(|(n, q)| (n.to_string(), q.clone())).collect(),
    }
}

#[test]
fn conj_drop_instance() {
    let s = parse_schema(CONJ_DROP).unwrap();
    let b = binding(&[("P1", "city"), ("P2", "oj"), ("P3", "big")], &[("Q", QuantSym::with_param("at-least", 3))]);
    let inst = instantiate(&s, &b, &QuantRegistry::builtin()).unwrap();
    assert_eq!(
        inst,
        f("(implies (quant (at-least 3) ?x (city ?x) (and (oj ?x) (big ?x))) (quant (at-least 3) ?x (city ?x) (oj ?x)))")
    );
}

#[test]
fn constraint_and_arity_errors() {
    let s = parse_schema(CONJ_DROP).unwrap();
    let reg = QuantRegistry::builtin();
    let b = binding(&[("P1", "city"), ("P2", "oj"), ("P3", "big")], &[("Q", QuantSym::with_param("fewer-than", 3))]);
    assert!(matches!(instantiate(&s, &b, &reg), Err(SchemaError::Constraint { .. })));
    let b = binding(
        &[("P1", "city"), ("P2", "(lambda (?a ?b) (r ?a ?b))"), ("P3", "big")],
        &[("Q", QuantSym::new("some"))],
    );
    assert!(matches!(instantiate(&s, &b, &reg), Err(SchemaError::Arity { .. })));
    let b = binding(&[("P1", "city"), ("P2", "oj")], &[("Q", QuantSym::new("some"))]);
    assert_eq!(instantiate(&s, &b, &reg), Err(SchemaError::Unbound("P3".into())));
}

#[test]
fn do_ka_beta_reduces() {
    let s = parse_schema(DO_KA).unwrap();
    let b = binding(&[("P", "(lambda (?x) (send-off ?x r1))")], &[]);
    let inst = instantiate(&s, &b, &QuantRegistry::builtin()).unwrap();
    assert_eq!(
        inst,
        f("(forall ?x (implies ((do (ka (lambda (?x) (send-off ?x r1)))) ?x) (send-off ?x r1)))")
    );
}

#[test]
fn correct_instance() {
    let s = parse_schema(CORRECT).unwrap();
    let mut b = SchemaBinding::default();
    b.formulas.insert("PHI".into(), f("(= now two-pm)"));
    let inst = instantiate(&s, &b, &QuantRegistry::builtin()).unwrap();
    assert_eq!(inst, f("(equiv (correct (that (= now two-pm))) (= now two-pm))"));
    b.formulas.insert("PHI".into(), f("(p ?x)"));
    assert_eq!(instantiate(&s, &b, &QuantRegistry::builtin()), Err(SchemaError::NotClosed("PHI".into())));
}

#[test]
fn match_do_ka_abstracts_each_argument() {
    let s = parse_schema(DO_KA).unwrap();
    let reg = QuantRegistry::builtin();
    let goal = f("(send-off t1 r1)");
    let ms = match_conclusion(&s, &goal, &reg);
    let preds: Vec<String> = ms.iter().map(|m| m.binding().preds["P"].to_string()).collect();
    assert_eq!(preds, vec!["(lambda (?x) (send-off ?x r1))", "(lambda (?x) (send-off t1 ?x))"]);
    for m in &ms {
        assert!(alpha_equivalent(&m.conclusion(&s), &goal));
    }
    assert_eq!(ms[0].premise(&s).unwrap(), f("((do (ka (lambda (?x) (send-off ?x r1)))) t1)"));
}

#[test]
fn match_conj_drop_leaves_p3_open() {
    let s = parse_schema(CONJ_DROP).unwrap();
    let reg = QuantRegistry::builtin();
    let ms = match_conclusion(&s, &f("(quant most ?c (city ?c) (oj ?c))"), &reg);
    assert_eq!(ms.len(), 1);
    let b = ms[0].binding();
    assert_eq!(b.quants["Q"], QuantSym::new("most"));
    assert_eq!(b.preds["P1"], PredExpr::constant("city"));
    assert_eq!(b.preds["P2"], PredExpr::constant("oj"));
    assert!(!b.preds.contains_key("P3"));
    assert!(!ms[0].is_complete(&s));
    let done = ms[0].complete_against(&s, &f("(quant most ?y (city ?y) (and (oj ?y) (big ?y)))"), &reg);
    assert_eq!(done.len(), 1);
    assert!(done[0].is_complete(&s));
    assert_eq!(done[0].binding().preds["P3"], PredExpr::constant("big"));
    // fewer-than is not right-up.
    assert!(match_conclusion(&s, &f("(quant (fewer-than 2) ?c (city ?c) (oj ?c))"), &reg).is_empty());
}

#[test]
fn match_correct_right_to_left() {
    let s = parse_schema(CORRECT).unwrap();
    let ms = match_conclusion(&s, &f("(= now two-pm)"), &QuantRegistry::builtin());
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].side, Side::EquivRight);
    assert_eq!(ms[0].binding().formulas["PHI"], f("(= now two-pm)"));
    assert_eq!(ms[0].premise(&s).unwrap(), f("(correct (that (= now two-pm)))"));
}

#[test]
fn modified_and_quantified_bodies() {
    let s = parse_schema(
        "(schema sounds (pred-vars (P 1)) (forall ?x (equiv ((mod sounds P) ?x) \
         (forall ?s (implies (hear ?s ?x) (P ?x))))))",
    )
    .unwrap();
    let reg = QuantRegistry::builtin();
    let goal = f("((mod sounds reasonable) p1)");
    let ms = match_conclusion(&s, &goal, &reg);
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].premise(&s).unwrap(), f("(forall ?s (implies (hear ?s p1) (reasonable p1)))"));
    let back = match_conclusion(&s, &f("(forall ?s (implies (hear ?s p1) (reasonable p1)))"), &reg);
    assert!(back.iter().any(|m| m.premise(&s).unwrap() == goal));
}

#[test]
fn matching_respects_bound_variables() {
    let s = parse_schema("(schema ex (pred-vars (P 1)) (implies (P a) (forall ?y (P ?y))))").unwrap();
    let reg = QuantRegistry::builtin();
    let ms = match_conclusion(&s, &f("(forall ?z (r ?z ?z))"), &reg);
    assert_eq!(ms.len(), 1);
    assert_eq!(ms[0].premise(&s).unwrap(), f("(r a a)"));
    // A goal whose body mentions an outer bound variable cannot bind a closed metavariable.
    let phi = parse_schema("(schema k (formula-vars PHI) (implies PHI (forall ?y PHI)))").unwrap();
    assert!(match_conclusion(&phi, &f("(forall ?y (p ?y))"), &reg).is_empty());
}

#[test]
fn enumeration_counts() {
    let mut sig = Signature::new();
    sig.declare_predicate("correct", 1).unwrap();
    sig.declare_constant("a").unwrap();
    sig.declare_constant("b").unwrap();
    let reg = QuantRegistry::builtin();
    let s = parse_schema(CORRECT).unwrap();
    assert_eq!(enumerate_instances(&s, &sig, &InstanceBounds::default(), &reg).unwrap().len(), 2);

    let mut sig = Signature::new();
    for p in ["p", "q", "r"] {
        sig.declare_predicate(p, 1).unwrap();
    }
    let mut reg = QuantRegistry::with_kinds(&[QuantKind::Most, QuantKind::AtLeast]);
    reg.enumerate_params = 2..=2;
    let s = parse_schema(CONJ_DROP).unwrap();
    let all = enumerate_instances(&s, &sig, &InstanceBounds::default(), &reg).unwrap();
    assert_eq!(all.len(), 4 * 3 * 3 * 3);
    let again = enumerate_instances(&s, &sig, &InstanceBounds::default(), &reg).unwrap();
    assert_eq!(all, again);

    let tight = InstanceBounds { ceiling: 10, ..Default::default() };
    assert!(matches!(enumerate_instances(&s, &sig, &tight, &reg), Err(SchemaError::Ceiling { .. })));

    let plain = Schema::new(f("(p a)"));
    assert_eq!(enumerate_instances(&plain, &sig, &InstanceBounds::default(), &reg).unwrap(), vec![f("(p a)")]);
}
