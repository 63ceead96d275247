//! Piecewise-linear homeomorphisms of the real line with finitely many
//! breakpoints, in exact arithmetic.
//!
//! A [`PlMap`] is stored in canonical form: the list of `(x, f(x))` pairs at
//! its breakpoints plus the two end slopes. Breakpoints whose two adjacent
//! slopes agree are dropped at construction, so two maps are pointwise equal
//! exactly when their representations are equal. An affine map has no
//! breakpoints and carries its intercept instead.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("slope must be nonzero")]
    ZeroSlope,
    #[error("breakpoints must be strictly increasing (at index {0})")]
    UnsortedBreakpoints(usize),
    #[error("map is not monotone: slopes change sign")]
    NotMonotone,
    #[error("affine map needs equal end slopes, got {left} and {right}")]
    AffineSlopeMismatch { left: Rational, right: Rational },
    #[error("interval lower end {lo} exceeds upper end {hi}")]
    EmptyInterval { lo: Rational, hi: Rational },
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, PlError> {
        if lo > hi {
            return Err(PlError::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Interior membership, for intervals used as open bounds.
    pub fn contains_strictly(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Closure of the set of points a map moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Empty,
    Bounded(Interval),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlMap {
    knots: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
    /// `Some` exactly when `knots` is empty.
    intercept: Option<Rational>,
}

impl PlMap {
    pub fn identity() -> Self {
        Self::affine(Rational::one(), Rational::zero()).expect("slope 1 is nonzero")
    }

    /// `x ↦ slope·x + intercept`.
    pub fn affine(slope: Rational, intercept: Rational) -> Result<Self, PlError> {
        if slope.is_zero() {
            return Err(PlError::ZeroSlope);
        }
        Ok(PlMap {
            knots: Vec::new(),
            left_slope: slope.clone(),
            right_slope: slope,
            intercept: Some(intercept),
        })
    }

    pub fn translation(by: Rational) -> Self {
        Self::affine(Rational::one(), by).expect("slope 1 is nonzero")
    }

    /// `x ↦ −x`.
    pub fn negation() -> Self {
        Self::affine(-Rational::one(), Rational::zero()).expect("slope -1 is nonzero")
    }

    /// Builds a map through the given points, extended by the end slopes.
    ///
    /// The points may include removable breakpoints; they are dropped. An
    /// empty point list is rejected with [`PlError::AffineSlopeMismatch`]
    /// unless the slopes agree, in which case the map passes through the
    /// origin.
    pub fn new(
        points: Vec<(Rational, Rational)>,
        left_slope: Rational,
        right_slope: Rational,
    ) -> Result<Self, PlError> {
        if left_slope.is_zero() || right_slope.is_zero() {
            return Err(PlError::ZeroSlope);
        }
        if points.is_empty() {
            if left_slope != right_slope {
                return Err(PlError::AffineSlopeMismatch {
                    left: left_slope,
                    right: right_slope,
                });
            }
            return Self::affine(left_slope, Rational::zero());
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].0 >= w[1].0 {
                return Err(PlError::UnsortedBreakpoints(i + 1));
            }
        }
        let increasing = left_slope.is_positive();
        let mut slopes = Vec::with_capacity(points.len() + 1);
        slopes.push(left_slope.clone());
        for w in points.windows(2) {
            slopes.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
        }
        slopes.push(right_slope.clone());
        if slopes
            .iter()
            .any(|s| s.is_zero() || s.is_positive() != increasing)
        {
            return Err(PlError::NotMonotone);
        }
        Ok(canonical(points, left_slope, right_slope))
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn left_slope(&self) -> &Rational {
        &self.left_slope
    }

    pub fn right_slope(&self) -> &Rational {
        &self.right_slope
    }

    /// Intercept of an affine map; `None` when the map has breakpoints.
    pub fn intercept(&self) -> Option<&Rational> {
        self.intercept.as_ref()
    }

    pub fn is_affine(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.is_affine()
            && self.left_slope.is_one()
            && self.intercept.as_ref().is_some_and(Zero::is_zero)
    }

    pub fn is_increasing(&self) -> bool {
        self.left_slope.is_positive()
    }

    /// `+1` for orientation-preserving maps, `-1` otherwise.
    pub fn orientation(&self) -> i8 {
        if self.is_increasing() {
            1
        } else {
            -1
        }
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        if let Some(b) = &self.intercept {
            return &self.left_slope * x + b;
        }
        let first = &self.knots[0];
        if x <= &first.0 {
            return &first.1 + &self.left_slope * (x - &first.0);
        }
        let last = self.knots.last().expect("nonempty");
        if x >= &last.0 {
            return &last.1 + &self.right_slope * (x - &last.0);
        }
        // first knot with knot.x > x; x is strictly inside the span
        let i = self.knots.partition_point(|(kx, _)| kx <= x);
        let (x0, y0) = &self.knots[i - 1];
        let (x1, y1) = &self.knots[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Breakpoints `B(f)`, strictly increasing.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.knots.iter().map(|(x, _)| x.clone()).collect()
    }

    /// Slopes in left-to-right order: left end, each segment, right end.
    pub fn slopes(&self) -> Vec<Rational> {
        if self.is_affine() {
            return vec![self.left_slope.clone()];
        }
        let mut out = Vec::with_capacity(self.knots.len() + 1);
        out.push(self.left_slope.clone());
        out.extend(
            self.knots
                .windows(2)
                .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)),
        );
        out.push(self.right_slope.clone());
        out
    }

    /// The slope set `Λ(f)`.
    pub fn slope_set(&self) -> BTreeSet<Rational> {
        self.slopes().into_iter().collect()
    }

    pub fn invert(&self) -> PlMap {
        if let Some(b) = &self.intercept {
            let a = &self.left_slope;
            return PlMap {
                knots: Vec::new(),
                left_slope: a.recip(),
                right_slope: a.recip(),
                intercept: Some(-b / a),
            };
        }
        let mut knots: Vec<_> = self
            .knots
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        let (left_slope, right_slope) = if self.is_increasing() {
            (self.left_slope.recip(), self.right_slope.recip())
        } else {
            knots.reverse();
            (self.right_slope.recip(), self.left_slope.recip())
        };
        PlMap {
            knots,
            left_slope,
            right_slope,
            intercept: None,
        }
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &PlMap) -> PlMap {
        let inner_inv = inner.invert();
        let mut candidates: Vec<Rational> = inner.breakpoints();
        candidates.extend(self.knots.iter().map(|(x, _)| inner_inv.evaluate(x)));
        candidates.sort();
        candidates.dedup();

        let (left_slope, right_slope) = if inner.is_increasing() {
            (
                &inner.left_slope * &self.left_slope,
                &inner.right_slope * &self.right_slope,
            )
        } else {
            (
                &inner.left_slope * &self.right_slope,
                &inner.right_slope * &self.left_slope,
            )
        };
        if candidates.is_empty() {
            let intercept = self.evaluate(&inner.evaluate(&Rational::zero()));
            return PlMap::affine(left_slope, intercept).expect("product of nonzero slopes");
        }
        let points = candidates
            .into_iter()
            .map(|x| {
                let y = self.evaluate(&inner.evaluate(&x));
                (x, y)
            })
            .collect();
        canonical(points, left_slope, right_slope)
    }

    /// `f^k` for any integer `k` (negative powers iterate the inverse).
    pub fn power(&self, k: i64) -> PlMap {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = PlMap::identity();
        for _ in 0..k.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }

    /// `inner⁻¹ ∘ self ∘ inner`.
    pub fn conjugate_by(&self, inner: &PlMap) -> PlMap {
        inner.invert().compose(&self.compose(inner))
    }

    pub fn support(&self) -> Support {
        if let Some(b) = &self.intercept {
            return if self.left_slope.is_one() && b.is_zero() {
                Support::Empty
            } else {
                Support::Unbounded
            };
        }
        let first = &self.knots[0];
        let last = self.knots.last().expect("nonempty");
        if !self.left_slope.is_one()
            || !self.right_slope.is_one()
            || first.0 != first.1
            || last.0 != last.1
        {
            return Support::Unbounded;
        }
        // displacement is linear on each segment and zero on both rays
        let moved = |w: &[(Rational, Rational)]| w[0].0 != w[0].1 || w[1].0 != w[1].1;
        let lo = self.knots.windows(2).position(moved);
        let hi = self.knots.windows(2).rposition(moved);
        match (lo, hi) {
            (Some(lo), Some(hi)) => Support::Bounded(Interval {
                lo: self.knots[lo].0.clone(),
                hi: self.knots[hi + 1].0.clone(),
            }),
            // a canonical non-affine map with zero displacement at every knot
            // would have no slope changes, so this is unreachable
            _ => Support::Empty,
        }
    }
}

/// Drops removable breakpoints; collapses to the affine form when none remain.
fn canonical(
    points: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
) -> PlMap {
    debug_assert!(!points.is_empty());
    let mut slopes = Vec::with_capacity(points.len() + 1);
    slopes.push(left_slope.clone());
    for w in points.windows(2) {
        slopes.push((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0));
    }
    slopes.push(right_slope.clone());
    let anchor = points[0].clone();
    let knots: Vec<_> = points
        .into_iter()
        .enumerate()
        .filter(|(i, _)| slopes[*i] != slopes[*i + 1])
        .map(|(_, p)| p)
        .collect();
    if knots.is_empty() {
        let intercept = &anchor.1 - &left_slope * &anchor.0;
        return PlMap {
            knots,
            right_slope: left_slope.clone(),
            left_slope,
            intercept: Some(intercept),
        };
    }
    PlMap {
        knots,
        left_slope,
        right_slope,
        intercept: None,
    }
}
