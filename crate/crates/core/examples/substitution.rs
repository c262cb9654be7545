//! Capture-avoiding substitution, alpha-equivalence and canonical forms,
//! including inside reified terms.

use elfol::logic::{alpha_equivalent, canonical, substitute, FreeVars};
use elfol::syntax::{parse_formula, parse_term};
use elfol::Term;

fn main() {
    let f = parse_formula("(forall ?y (loves ?x ?y))").unwrap();
    // Substituting ?y for ?x must not be captured by the binder.
    let g = substitute(&f, "x", &Term::var("y"));
    println!("{f}  [?x := ?y]  =  {g}");
    assert!(g.free_vars().contains("y"));

    let a = parse_formula("(quant most ?z (member ?z cars) (poss (tanker ?z)))").unwrap();
    let b = parse_formula("(quant most ?w (member ?w cars) (poss (tanker ?w)))").unwrap();
    println!("alpha-equivalent: {}", alpha_equivalent(&a, &b));
    println!("canonical: {}", canonical(&a));

    let k1 = parse_term("(ka (lambda (?x) (send-off ?x r1)))").unwrap();
    let k2 = parse_term("(ka (lambda (?t) (send-off ?t r1)))").unwrap();
    println!("{k1} ~ {k2}: {}", alpha_equivalent(&k1, &k2));

    let h = parse_formula("(feel-that ?s (that (forall ?s (reasonable ?s))) now)").unwrap();
    println!("{}", substitute(&h, "s", &Term::constant("p1")));
}
