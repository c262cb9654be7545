use super::*;
use crate::logic::Signature;
use crate::syntax::{parse_formula, parse_term};

fn f(text: &str) -> Formula {
    parse_formula(text).unwrap()
}

fn reg() -> QuantRegistry {
    QuantRegistry::builtin()
}

fn truth(m: &IntensionalModel, text: &str) -> bool {
    eval_formula(m, 0, &Env::new(), &f(text), &reg()).unwrap()
}

#[test]
fn possibility_needs_an_accessible_world() {
    let mut m = parse_model("(model (individuals a) (pred P w0 (a)))").unwrap();
    assert!(truth(&m, "(P a)"));
    assert!(!truth(&m, "(poss (P a))"));
    assert!(truth(&m, "(nec (not (P a)))"));
    m.access.insert((0, 0));
    assert!(truth(&m, "(poss (P a))"));
}

#[test]
fn quantifiers_count_over_the_domain() {
    let m = parse_model("(model (individuals c1 c2 c3 x) (pred city * (c1) (c2) (c3)) (pred oj w0 (c1) (c2)))").unwrap();
    assert!(truth(&m, "(quant most ?c (city ?c) (oj ?c))"));
    assert!(!truth(&m, "(quant (at-least 3) ?c (city ?c) (oj ?c))"));
    assert!(truth(&m, "(quant (exactly 2) ?c (city ?c) (oj ?c))"));
    assert!(truth(&m, "(forall ?c (implies (oj ?c) (city ?c)))"));
    assert!(truth(&m, "(exists ?c (not (city ?c)))"));
}

#[test]
fn modified_derived_and_reified() {
    let m = parse_model(
        "(model (individuals p1 t1 r1) (reify k (ka (lambda (?x) (send-off ?x r1)))) \
         (mod sounds reasonable w0 (p1)) (derived do k w0 (t1)))",
    )
    .unwrap();
    assert!(truth(&m, "((mod sounds reasonable) p1)"));
    assert!(!truth(&m, "(reasonable p1)"));
    assert!(truth(&m, "((do (ka (lambda (?y) (send-off ?y r1)))) t1)"));
    let missing = eval_formula(&m, 0, &Env::new(), &f("((do (ka busy)) t1)"), &reg());
    assert!(matches!(missing, Err(EvalError::MissingReification(_))));
    let lam = eval_formula(&m, 0, &Env::new(), &f("((mod sounds (lambda (?x) (busy ?x))) p1)"), &reg());
    assert!(matches!(lam, Err(EvalError::ModifiedNonConstant(_))));
}

#[test]
fn functions_and_constants() {
    let m = parse_model("(model (individuals a b) (constant now b) (fun succ (a) b) (fun-default succ a) (pred p w0 (b)))").unwrap();
    assert!(truth(&m, "(p (succ a))"));
    assert!(truth(&m, "(= (succ now) a)"));
    assert!(truth(&m, "(p now)"));
    let undefined = eval_formula(&m, 0, &Env::new(), &f("(p (pred-of a))"), &reg());
    assert!(matches!(undefined, Err(EvalError::UndefinedFunction(_))));
}

#[test]
fn enumeration_counts() {
    let mut sig = Signature::new();
    sig.declare_predicate("p", 1).unwrap();
    let exact = |w: usize, d: usize| ModelBounds { domain: d..=d, worlds: w..=w, ..Default::default() };
    assert_eq!(enumerate_models(&sig, &exact(1, 2)).unwrap().count(), 4);
    assert_eq!(enumerate_models(&sig, &exact(2, 1)).unwrap().count(), 64);
    assert_eq!(enumerate_models(&Signature::new(), &exact(1, 1)).unwrap().count(), 1);
    let all: Vec<_> = enumerate_models(&sig, &exact(1, 2)).unwrap().collect();
    let distinct: BTreeSet<String> = all.iter().map(|m| m.to_string()).collect();
    assert_eq!(distinct.len(), 4);
    let tight = ModelBounds { ceiling: 10, ..exact(2, 1) };
    let Err(ModelError::Ceiling { count, formula, .. }) = enumerate_models(&sig, &tight) else { panic!() };
    assert_eq!(count, 64);
    assert!(formula.contains("2^4 (access)"), "{formula}");
}

#[test]
fn counterexample_search() {
    let up = |q: &str| {
        f(&format!(
            "(implies (quant {q} ?x (p1 ?x) (and (p2 ?x) (p3 ?x))) (quant {q} ?x (p1 ?x) (p2 ?x)))"
        ))
    };
    let bounds = ModelBounds { domain: 1..=4, ..Default::default() };
    assert!(find_counterexample(&up("most"), &reg(), &bounds).unwrap().is_none());
    let cex = find_counterexample(&up("(fewer-than 2)"), &reg(), &bounds).unwrap().expect("counterexample");
    assert!(!truth(&cex, "(implies (quant (fewer-than 2) ?x (p1 ?x) (and (p2 ?x) (p3 ?x))) (quant (fewer-than 2) ?x (p1 ?x) (p2 ?x)))"));
    assert!(find_counterexample(&f("(implies (P a) (P a))"), &reg(), &bounds).unwrap().is_none());
    assert!(find_counterexample(&f("(implies (poss (P a)) (P a))"), &reg(), &ModelBounds { worlds: 1..=2, ..bounds }).unwrap().is_some());
}

#[test]
fn reified_terms_get_their_own_individuals() {
    let g = f("(implies (correct (that (= now two-pm))) (= now two-pm))");
    let cex = find_counterexample(&g, &reg(), &ModelBounds::default()).unwrap().unwrap();
    assert_eq!(cex.reified.len(), 1);
    assert!(cex.individuals.iter().any(|i| i.reified));
}

#[test]
fn satisfaction_of_knowledge_bases() {
    let kb = KnowledgeBase::parse(
        "(declare predicate result-state 1) (declare predicate contained-in 2) (declare function enter 2)
         (axiom (forall ?x (forall ?y (implies (result-state (enter ?x ?y)) (contained-in ?x ?y)))))",
    )
    .unwrap();
    let bad = parse_model("(model (individuals a b e) (fun-default enter e) (pred result-state w0 (e)))").unwrap();
    assert!(!model_satisfies(&bad, &kb, &reg()).unwrap());
    let good = parse_model("(model (individuals a b e) (fun-default enter e) (pred result-state w0 (e)) (pred contained-in w0 (a a) (a b) (a e) (b a) (b b) (b e) (e a) (e b) (e e)))").unwrap();
    assert!(model_satisfies(&good, &kb, &reg()).unwrap());
    assert!(model_satisfies(&bad, &KnowledgeBase::default(), &reg()).unwrap());
    // Axioms must hold at every world, not just w0.
    let two = parse_model("(model (worlds w0 w1) (individuals a b e) (fun-default enter e) (pred result-state w1 (e)))").unwrap();
    assert!(!model_satisfies(&two, &kb, &reg()).unwrap());
}

#[test]
fn correctness_schema_in_models() {
    let kb = KnowledgeBase::parse(
        "(declare predicate correct 1) (declare constant now two-pm)
         (schema (formula-vars PHI) (equiv (correct (that PHI)) PHI))",
    )
    .unwrap();
    let bad = parse_model("(model (individuals now two-pm k) (reify k (that (= now two-pm))) (pred correct w0 (k)))").unwrap();
    assert!(!model_satisfies(&bad, &kb, &reg()).unwrap());
    let good = parse_model("(model (individuals t k) (constant now t) (constant two-pm t) (reify k (that (= now two-pm))) (pred correct w0 (k)))").unwrap();
    assert!(model_satisfies(&good, &kb, &reg()).unwrap());
}

#[test]
fn dump_round_trips() {
    let text = "(model (worlds w0 w1) (access (w0 w1) (w1 w1)) (individuals a b) (constant c a) \
                (reify k (ka p)) (pred p * (a)) (fun f (a) b) (fun-default f a) (mod m p w1 (b)) (derived do k w0 (a)))";
    let m = parse_model(text).unwrap();
    let dumped = m.to_string();
    assert_eq!(parse_model(&dumped).unwrap(), m);
    assert_eq!(parse_model(&dumped).unwrap().to_string(), dumped);
    assert_eq!(m.reified.get(&canonical_term(&parse_term("(ka p)").unwrap())), Some(&2));
}

#[test]
fn bad_model_files_report_spans() {
    let e = parse_model("(model (individuals a) (pred p w9 (a)))").unwrap_err();
    assert_eq!(e.span.column, 32);
    assert!(parse_model("(model (pred p w0 (a)))").is_err());
    assert!(parse_model("(model (individuals a) (reify a b))").is_err());
}
