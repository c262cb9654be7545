//! Brute-force monotonicity profiles of the built-in generalized quantifiers.

use elfol::quant::{verify_monotonicity, Monotonicity, Profile, QuantRegistry};

fn main() {
    let registry = QuantRegistry::builtin();
    println!("{:<16} {:<8} {:<8} verified", "quantifier", "left", "right");
    for q in registry.instances() {
        let ok = verify_monotonicity(&q, q.profile, 4).is_ok();
        let (left, right) = (format!("{:?}", q.profile.left), format!("{:?}", q.profile.right));
        println!("{:<16} {left:<8} {right:<8} {ok}", q.symbol().to_string());
    }

    // Claiming that `fewer-than 2` is upward monotone in its body fails.
    let fewer = registry.lookup(&elfol::QuantSym::with_param("fewer-than", 2)).unwrap();
    let wrong = Profile::new(Monotonicity::None, Monotonicity::Up);
    match verify_monotonicity(&fewer, wrong, 4) {
        Ok(()) => println!("unexpectedly verified"),
        Err(ce) => println!("fewer-than 2 is not right-up: {ce:?}"),
    }
}
