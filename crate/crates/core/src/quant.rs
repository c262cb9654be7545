//! Generalized quantifiers as relations between a restrictor set A and a
//! body set B. Every built-in depends only on `|A∩B|` and `|A\B|`, so
//! conservativity holds by construction.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::logic::QuantSym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monotonicity {
    Up,
    Down,
    None,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Up => "up",
            Monotonicity::Down => "down",
            Monotonicity::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    pub left: Monotonicity,
    pub right: Monotonicity,
}

impl Profile {
    pub const fn new(left: Monotonicity, right: Monotonicity) -> Self {
        Profile { left, right }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuantKind {
    All,
    Some,
    No,
    Most,
    AtLeast,
    AtMost,
    Exactly,
    FewerThan,
}

impl QuantKind {
    pub fn name(self) -> &'static str {
        match self {
            QuantKind::All => "all",
            QuantKind::Some => "some",
            QuantKind::No => "no",
            QuantKind::Most => "most",
            QuantKind::AtLeast => "at-least",
            QuantKind::AtMost => "at-most",
            QuantKind::Exactly => "exactly",
            QuantKind::FewerThan => "fewer-than",
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, QuantKind::AtLeast | QuantKind::AtMost | QuantKind::Exactly | QuantKind::FewerThan)
    }

    const ALL: [QuantKind; 8] = [
        QuantKind::All,
        QuantKind::Some,
        QuantKind::No,
        QuantKind::Most,
        QuantKind::AtLeast,
        QuantKind::AtMost,
        QuantKind::Exactly,
        QuantKind::FewerThan,
    ];
}

/// A concrete quantifier: kind, parameter and its verified monotonicity profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantDef {
    pub kind: QuantKind,
    pub param: Option<u32>,
    pub profile: Profile,
}

impl QuantDef {
    /// Truth value given `|A∩B|` and `|A\B|`.
    pub fn holds_counts(&self, inter: usize, diff: usize) -> bool {
        let n = self.param.unwrap_or(0) as usize;
        match self.kind {
            QuantKind::All => diff == 0,
            QuantKind::Some => inter > 0,
            QuantKind::No => inter == 0,
            QuantKind::Most => inter > diff,
            QuantKind::AtLeast => inter >= n,
            QuantKind::AtMost => inter <= n,
            QuantKind::Exactly => inter == n,
            QuantKind::FewerThan => inter < n,
        }
    }

    pub fn symbol(&self) -> QuantSym {
        QuantSym { name: self.kind.name().to_string(), param: self.param }
    }
}

/// Claimed profile for a kind and parameter. Degenerate parameters (always
/// true or always false) are monotone in every direction; `up` is stored.
fn builtin_profile(kind: QuantKind, param: Option<u32>) -> Profile {
    use Monotonicity::*;
    let n = param.unwrap_or(0);
    match kind {
        QuantKind::All => Profile::new(Down, Up),
        QuantKind::Some => Profile::new(Up, Up),
        QuantKind::No => Profile::new(Down, Down),
        QuantKind::Most => Profile::new(None, Up),
        QuantKind::AtLeast if n == 0 => Profile::new(Up, Up),
        QuantKind::AtLeast => Profile::new(Up, Up),
        QuantKind::AtMost => Profile::new(Down, Down),
        QuantKind::Exactly if n == 0 => Profile::new(Down, Down),
        QuantKind::Exactly => Profile::new(None, None),
        QuantKind::FewerThan if n == 0 => Profile::new(Up, Up),
        QuantKind::FewerThan => Profile::new(Down, Down),
    }
}

/// A claim about Q(A, B) that the checker found false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// `Q(a, b)` holds, `b ⊆ b_prime` (or the reverse for `down`), but `Q(a, b_prime)` fails.
    Right { direction: Monotonicity, a: Vec<usize>, b: Vec<usize>, b_prime: Vec<usize> },
    /// `Q(a, b)` holds, `a ⊆ a_prime` (or the reverse for `down`), but `Q(a_prime, b)` fails.
    Left { direction: Monotonicity, a: Vec<usize>, a_prime: Vec<usize>, b: Vec<usize> },
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn eval_masks(q: &QuantDef, a: u32, b: u32) -> bool {
    q.holds_counts((a & b).count_ones() as usize, (a & !b).count_ones() as usize)
}

/// Exhaustively checks `claimed` over universes of size `1..=max_n`,
/// returning the first violated instance. `None` directions are not checked.
pub fn verify_monotonicity(q: &QuantDef, claimed: Profile, max_n: usize) -> Result<(), Counterexample> {
    assert!(max_n >= 1 && max_n <= 8, "max_n must be in 1..=8");
    for size in 1..=max_n {
        let full = (1u32 << size) - 1;
        for a in 0..=full {
            for b in 0..=full {
                // Every superset of b: b | extra for extra ⊆ full \ b.
                for big in supersets(b, full) {
                    if claimed.right == Monotonicity::Up && eval_masks(q, a, b) && !eval_masks(q, a, big) {
                        return Err(Counterexample::Right {
                            direction: Monotonicity::Up,
                            a: members(a),
                            b: members(b),
                            b_prime: members(big),
                        });
                    }
                    if claimed.right == Monotonicity::Down && eval_masks(q, a, big) && !eval_masks(q, a, b) {
                        return Err(Counterexample::Right {
                            direction: Monotonicity::Down,
                            a: members(a),
                            b: members(big),
                            b_prime: members(b),
                        });
                    }
                }
                for big in supersets(a, full) {
                    if claimed.left == Monotonicity::Up && eval_masks(q, a, b) && !eval_masks(q, big, b) {
                        return Err(Counterexample::Left {
                            direction: Monotonicity::Up,
                            a: members(a),
                            a_prime: members(big),
                            b: members(b),
                        });
                    }
                    if claimed.left == Monotonicity::Down && eval_masks(q, big, b) && !eval_masks(q, a, b) {
                        return Err(Counterexample::Left {
                            direction: Monotonicity::Down,
                            a: members(big),
                            a_prime: members(a),
                            b: members(b),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn supersets(base: u32, full: u32) -> impl Iterator<Item = u32> {
    let free = full & !base;
    // Standard submask enumeration of `free`, including 0.
    let mut sub = Some(free);
    std::iter::from_fn(move || {
        let s = sub?;
        sub = if s == 0 { None } else { Some((s - 1) & free) };
        Some(base | s)
    })
}

/// `eval_quant` over explicit sets of individuals.
pub fn eval_quant<T: Ord>(q: &QuantDef, a: &std::collections::BTreeSet<T>, b: &std::collections::BTreeSet<T>) -> bool {
    let inter = a.intersection(b).count();
    q.holds_counts(inter, a.len() - inter)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantError {
    #[error("unknown quantifier `{0}`")]
    Unknown(String),
    #[error("quantifier `{0}` needs an integer parameter")]
    MissingParam(String),
    #[error("quantifier `{0}` takes no parameter")]
    UnexpectedParam(String),
    #[error("claimed profile for `{symbol}` fails: {counterexample:?}")]
    ProfileRejected { symbol: String, counterexample: Counterexample },
}

/// Built-in quantifiers. Parametric ones are instantiated on lookup; the
/// `enumerate` range bounds which parameters `instances` lists.
#[derive(Clone, Debug)]
pub struct QuantRegistry {
    kinds: BTreeMap<String, QuantKind>,
    /// Parameters listed by [`QuantRegistry::instances`] for each parametric kind.
    pub enumerate_params: std::ops::RangeInclusive<u32>,
    /// Universe bound for profile verification.
    pub verify_bound: usize,
}

impl Default for QuantRegistry {
    fn default() -> Self {
        QuantRegistry::builtin()
    }
}

impl QuantRegistry {
    pub fn builtin() -> Self {
        QuantRegistry {
            kinds: QuantKind::ALL.iter().map(|k| (k.name().to_string(), *k)).collect(),
            enumerate_params: 1..=3,
            verify_bound: 4,
        }
    }

    /// A registry restricted to the given kinds (`all` and `some` are always kept).
    pub fn with_kinds(kinds: &[QuantKind]) -> Self {
        let mut r = QuantRegistry::builtin();
        r.kinds.retain(|_, k| kinds.contains(k) || matches!(k, QuantKind::All | QuantKind::Some));
        r
    }

    pub fn lookup(&self, sym: &QuantSym) -> Result<QuantDef, QuantError> {
        let kind = *self.kinds.get(&sym.name).ok_or_else(|| QuantError::Unknown(sym.name.clone()))?;
        match (kind.is_parametric(), sym.param) {
            (true, None) => return Err(QuantError::MissingParam(sym.name.clone())),
            (false, Some(_)) => return Err(QuantError::UnexpectedParam(sym.name.clone())),
            _ => {}
        }
        Ok(QuantDef { kind, param: sym.param, profile: builtin_profile(kind, sym.param) })
    }

    /// Registers a definition after checking its profile by brute force.
    pub fn verified(&self, sym: &QuantSym) -> Result<QuantDef, QuantError> {
        let def = self.lookup(sym)?;
        verify_monotonicity(&def, def.profile, self.verify_bound)
            .map_err(|counterexample| QuantError::ProfileRejected { symbol: sym.to_string(), counterexample })?;
        Ok(def)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.kinds.contains_key(name)
    }

    /// Concrete quantifiers in a fixed order, parametric ones over `enumerate_params`.
    pub fn instances(&self) -> Vec<QuantDef> {
        let mut out = Vec::new();
        for kind in QuantKind::ALL {
            if !self.kinds.values().any(|k| *k == kind) {
                continue;
            }
            if kind.is_parametric() {
                for n in self.enumerate_params.clone() {
                    out.push(QuantDef { kind, param: Some(n), profile: builtin_profile(kind, Some(n)) });
                }
            } else {
                out.push(QuantDef { kind, param: None, profile: builtin_profile(kind, None) });
            }
        }
        out
    }
}
