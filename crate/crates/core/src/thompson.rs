//! Thompson's group `F` as dyadic PL maps of `[0, 1]`.
//!
//! Words act on the right: the word `a₁a₂⋯aₘ` applies `a₁` first, so it is
//! realized as `aₘ ∘ ⋯ ∘ a₁`. With this convention the standard generators
//!
//! * `x₀ = (t/2 on [0,½], t − ¼ on [½,¾], 2t − 1 on [¾,1])`,
//! * `x₁` = identity on `[0,½]` and a half-scale copy of `x₀` on `[½,1]`,
//! * `xₙ = x₀^{−(n−1)} ∘ x₁ ∘ x₀^{n−1}` for `n ≥ 2`,
//!
//! satisfy `xᵢ xⱼ xᵢ⁻¹ = xⱼ₊₁` for all `i < j`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::pl::{PlMap, Support};
use crate::rational::{int, is_dyadic, log2_exact, ratio, Rational};
use crate::structured::{
    eta_embed, find_growth_witness, h1_eval, psi_conjugate, GrowthWitness, StructuredMap,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThompsonError {
    #[error("cannot parse `{token}` as a generator power (expected e.g. x0, x1^-1, x2^3)")]
    BadToken { token: String },
    #[error("relation needs i < j, got i = {i}, j = {j}")]
    RelationOrder { i: u32, j: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: u32,
    /// `+1` or `-1`.
    pub exponent: i8,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        Letter {
            index: self.index,
            exponent: -self.exponent,
        }
    }
}

/// A freely reduced word in the generators `xᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ThompsonWord {
    letters: Vec<Letter>,
}

impl ThompsonWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generator(index: u32) -> Self {
        Self::new([Letter { index, exponent: 1 }])
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l.exponent == 1 || l.exponent == -1, "exponent must be ±1");
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ThompsonWord { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        ThompsonWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &ThompsonWord) -> Self {
        Self::new(self.letters.iter().chain(&other.letters).copied())
    }

    /// Largest generator index used, if any.
    pub fn max_index(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.index).max()
    }
}

impl FromStr for ThompsonWord {
    type Err = ThompsonError;

    /// Whitespace- or `*`-separated powers such as `x0 x1^-1 x2^2`; `1`, `e`
    /// or the empty string denote the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for token in s
            .split(|c: char| c.is_whitespace() || c == '*')
            .filter(|t| !t.is_empty())
        {
            if token == "1" || token == "e" {
                continue;
            }
            let bad = || ThompsonError::BadToken {
                token: token.to_string(),
            };
            let body = token.strip_prefix('x').ok_or_else(bad)?;
            let (index, power) = match body.split_once('^') {
                Some((i, p)) => (i, p.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let index: u32 = index.parse().map_err(|_| bad())?;
            let exponent = if power < 0 { -1 } else { 1 };
            for _ in 0..power.unsigned_abs() {
                letters.push(Letter { index, exponent });
            }
        }
        Ok(ThompsonWord::new(letters))
    }
}

impl fmt::Display for ThompsonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", l.index)?;
            if l.exponent < 0 {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

fn x0() -> PlMap {
    PlMap::new(
        vec![
            (int(0), int(0)),
            (ratio(1, 2), ratio(1, 4)),
            (ratio(3, 4), ratio(1, 2)),
            (int(1), int(1)),
        ],
        Rational::one(),
        Rational::one(),
    )
    .expect("x0 is a homeomorphism")
}

fn x1() -> PlMap {
    PlMap::new(
        vec![
            (ratio(1, 2), ratio(1, 2)),
            (ratio(3, 4), ratio(5, 8)),
            (ratio(7, 8), ratio(3, 4)),
            (int(1), int(1)),
        ],
        Rational::one(),
        Rational::one(),
    )
    .expect("x1 is a homeomorphism")
}

/// The PL realization of `xᵢ`.
pub fn generator(i: u32) -> PlMap {
    match i {
        0 => x0(),
        1 => x1(),
        _ => {
            let a = x0();
            let a_inv = a.invert();
            let mut g = x1();
            for _ in 1..i {
                g = a_inv.compose(&g.compose(&a));
            }
            g
        }
    }
}

/// Realizes a word with right action: letters apply from left to right.
pub fn realize(w: &ThompsonWord) -> PlMap {
    let Some(top) = w.max_index() else {
        return PlMap::identity();
    };
    let gens: Vec<PlMap> = (0..=top).map(generator).collect();
    let invs: Vec<PlMap> = gens.iter().map(PlMap::invert).collect();
    w.letters().iter().fold(PlMap::identity(), |acc, l| {
        let g = if l.exponent > 0 {
            &gens[l.index as usize]
        } else {
            &invs[l.index as usize]
        };
        g.compose(&acc)
    })
}

/// Whether `xᵢ xⱼ xᵢ⁻¹ = xⱼ₊₁` holds exactly.
pub fn check_relation(i: u32, j: u32) -> Result<bool, ThompsonError> {
    if i >= j {
        return Err(ThompsonError::RelationOrder { i, j });
    }
    let lhs = ThompsonWord::new([
        Letter {
            index: i,
            exponent: 1,
        },
        Letter {
            index: j,
            exponent: 1,
        },
        Letter {
            index: i,
            exponent: -1,
        },
    ]);
    Ok(realize(&lhs) == generator(j + 1))
}

/// `(i, j, holds)` for every `0 ≤ i < j ≤ j_max`, in row order.
pub fn relation_table(j_max: u32) -> Vec<(u32, u32, bool)> {
    let pairs: Vec<(u32, u32)> = (0..=j_max)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    let mut out: Vec<(u32, u32, bool)> = std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .iter()
            .map(|&(i, j)| s.spawn(move || (i, j, check_relation(i, j).expect("i < j"))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("relation worker panicked"))
            .collect()
    });
    out.sort_by_key(|&(i, j, _)| (i, j));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicCertificate {
    pub breakpoints_dyadic: bool,
    pub slopes_powers_of_two: bool,
    pub support_in_unit_interval: bool,
}

impl DyadicCertificate {
    pub fn all(&self) -> bool {
        self.breakpoints_dyadic && self.slopes_powers_of_two && self.support_in_unit_interval
    }
}

pub fn certify_dyadic(f: &PlMap) -> DyadicCertificate {
    let support_in_unit_interval = match f.support() {
        Support::Empty => true,
        Support::Bounded(s) => s.lo() >= &Rational::zero() && s.hi() <= &Rational::one(),
        Support::Unbounded => false,
    };
    DyadicCertificate {
        breakpoints_dyadic: f.breakpoints().iter().all(is_dyadic),
        slopes_powers_of_two: f.slope_set().iter().all(|s| log2_exact(s).is_some()),
        support_in_unit_interval,
    }
}

/// True when the word represents the identity.
pub fn word_problem(w: &ThompsonWord) -> bool {
    realize(w).is_identity()
}

/// `ψ(η(realize(w)))`, the image of `w` in the quasi-isometry group.
pub fn embed_to_qi(w: &ThompsonWord) -> StructuredMap {
    let lift = eta_lift(w);
    psi_conjugate(&lift).expect("η produces a lift")
}

/// `η(realize(w))`.
pub fn eta_lift(w: &ThompsonWord) -> StructuredMap {
    eta_embed(&realize(w)).expect("realized words are compactly supported and increasing")
}

/// `{h₁(j/d) : 0 ≤ j ≤ d}`; all lie in `[½, ⅔] ⊂ [0, 1)`.
pub fn dyadic_probes(d: u32) -> Vec<Rational> {
    (0..=d as i64)
        .map(|j| h1_eval(&ratio(j, d as i64)))
        .collect()
}

/// A growth witness for the lift of a nontrivial word, found by probing
/// `h₁` of dyadics with denominator 16, then 32, and so on. `None` for words
/// representing the identity.
pub fn embedding_witness(w: &ThompsonWord) -> Option<(StructuredMap, GrowthWitness)> {
    if word_problem(w) {
        return None;
    }
    let lift = eta_lift(w);
    let mut d = 16u32;
    loop {
        if let Some(witness) =
            find_growth_witness(&lift, &dyadic_probes(d)).expect("probes lie in [0, 1)")
        {
            return Some((lift, witness));
        }
        d = d
            .checked_mul(2)
            .expect("a moved dyadic exists for nontrivial words");
    }
}

/// A uniformly random reduced word of length at most `max_len` over
/// `x₀, …, x_{max_index}`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, max_len: usize, max_index: u32) -> ThompsonWord {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len).map(|_| Letter {
        index: rng.gen_range(0..=max_index),
        exponent: if rng.gen_bool(0.5) { 1 } else { -1 },
    });
    ThompsonWord::new(letters)
}
