//! Quasi-isometry constants and checks for finite PL maps.
//!
//! A map `f` is a `C`-quasi-isometric embedding when
//! `C⁻¹|x − y| − C ≤ |f(x) − f(y)| ≤ C|x − y| + C` for all `x, y`. For PL maps
//! with slopes trapped in `(M⁻¹, M)` the constant `C = M` works, which is what
//! [`qi_constant_from_slopes`] returns.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::pl::{Interval, PlMap};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QiError {
    #[error("quasi-isometry constant must exceed 1, got {0}")]
    ConstantTooSmall(Rational),
    #[error("slope bound must exceed 1, got {0}")]
    BoundTooSmall(Rational),
    #[error("iterate count must be at least 2, got {0}")]
    IterateCount(u32),
    #[error("map reverses orientation")]
    OrientationReversing,
}

/// A constant `C > 1` for the quasi-isometry inequality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QiConstant(Rational);

impl QiConstant {
    pub fn new(c: Rational) -> Result<Self, QiError> {
        if c <= Rational::one() {
            return Err(QiError::ConstantTooSmall(c));
        }
        Ok(QiConstant(c))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }
}

/// An `M > 1` with `M⁻¹ < |λ| < M` for every slope it certifies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SlopeBound(Rational);

impl SlopeBound {
    pub fn new(m: Rational) -> Result<Self, QiError> {
        if m <= Rational::one() {
            return Err(QiError::BoundTooSmall(m));
        }
        Ok(SlopeBound(m))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// Strict two-sided check `M⁻¹ < |λ| < M`.
    pub fn certifies(&self, slope: &Rational) -> bool {
        let a = slope.abs();
        a > self.0.recip() && a < self.0
    }
}

const SLOPE_MARGIN: i64 = 2;

/// Largest of `|λ|` and `1/|λ|` over the slope set, i.e. the bi-Lipschitz
/// constant of `f`.
pub fn lipschitz_constant(f: &PlMap) -> Rational {
    f.slope_set()
        .iter()
        .map(|s| {
            let a = s.abs();
            let r = a.recip();
            if a > r {
                a
            } else {
                r
            }
        })
        .max()
        .expect("slope set is never empty")
}

/// Bi-Lipschitz constant scaled by a fixed margin of 2, so every slope lies
/// strictly inside `(M⁻¹, M)`.
pub fn slope_bound(f: &PlMap) -> SlopeBound {
    SlopeBound(lipschitz_constant(f) * int(SLOPE_MARGIN))
}

pub fn qi_constant_from_slopes(f: &PlMap) -> QiConstant {
    QiConstant(slope_bound(f).0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QiCheck {
    Holds,
    /// First pair at which the inequality fails.
    Violated {
        x: Rational,
        y: Rational,
    },
}

impl QiCheck {
    pub fn holds(&self) -> bool {
        matches!(self, QiCheck::Holds)
    }
}

/// Checks the two-sided quasi-isometry inequality at each pair, exactly.
pub fn verify_qi_inequality<F>(eval: F, c: &QiConstant, pairs: &[(Rational, Rational)]) -> QiCheck
where
    F: Fn(&Rational) -> Rational,
{
    let c = c.value();
    let c_inv = c.recip();
    for (x, y) in pairs {
        let d = (x - y).abs();
        let image = (eval(x) - eval(y)).abs();
        let lower = &c_inv * &d - c;
        let upper = c * &d + c;
        if image < lower || image > upper {
            return QiCheck::Violated {
                x: x.clone(),
                y: y.clone(),
            };
        }
    }
    QiCheck::Holds
}

/// Why [`is_trivial_qi`] reported an unbounded displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unbounded {
    EndSlopeNotOne,
    OrientationReversing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triviality {
    /// `sup |f − id| < ∞`, so `[f]` is the identity class.
    Bounded,
    Unbounded(Unbounded),
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Bounded)
    }
}

/// Decides whether `f` lies at bounded distance from the identity.
///
/// For a finite PL map `f − id` is eventually affine on both ends, so the
/// displacement is bounded exactly when both end slopes are 1.
pub fn is_trivial_qi(f: &PlMap) -> Triviality {
    if !f.is_increasing() {
        return Triviality::Unbounded(Unbounded::OrientationReversing);
    }
    if f.left_slope().is_one() && f.right_slope().is_one() {
        Triviality::Bounded
    } else {
        Triviality::Unbounded(Unbounded::EndSlopeNotOne)
    }
}

/// `max |f(x) − x|` over the window; attained at a breakpoint or an endpoint.
pub fn displacement_sup(f: &PlMap, window: &Interval) -> Rational {
    let displacement = |x: &Rational| (f.evaluate(x) - x).abs();
    f.breakpoints()
        .iter()
        .filter(|b| window.contains(b))
        .chain([window.lo(), window.hi()])
        .map(displacement)
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Returns `(|f(a) − a|, |f^k(a) − a|)` for an orientation-preserving `f`.
pub fn iterate_displacement(
    f: &PlMap,
    a: &Rational,
    k: u32,
) -> Result<(Rational, Rational), QiError> {
    if k < 2 {
        return Err(QiError::IterateCount(k));
    }
    if !f.is_increasing() {
        return Err(QiError::OrientationReversing);
    }
    let first = f.evaluate(a);
    let mut current = first.clone();
    for _ in 1..k {
        current = f.evaluate(&current);
    }
    Ok(((first - a).abs(), (current - a).abs()))
}
