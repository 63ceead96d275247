//! Symbolic homeomorphisms with infinitely many breakpoints.
//!
//! Two fixed maps drive the embedding of circle-map lifts into the
//! quasi-isometry group of the line:
//!
//! * `h₀`, odd, the identity on `[0, 1]`, and linear from `[n, n+1]` onto
//!   `[2^{n−1}, 2^n]` for `n ≥ 1`. Its slope grows exponentially.
//! * `h₁ : ℝ → (0, 1)`, with `h₁(n) = 1 − 1/(n+2)` for `n ≥ 0`,
//!   `h₁(−x) = 1 − h₁(x)` and linear between integers.
//!
//! A compactly supported PL map `f` is pushed into `(0, 1)` by `h₁` and
//! repeated on every unit interval (η), giving a lift of a circle map. A lift
//! `f̃` is then conjugated by `h₀` (ψ); the conjugate `f₀ = h₀ f̃ h₀⁻¹` moves
//! the point `2ⁿ(1 + x)` by an amount that doubles with `n`, so it is far
//! from the identity whenever `f̃` is not.
//!
//! Every [`StructuredMap`] evaluates exactly at any rational and enumerates
//! its breakpoints exactly inside any bounded window.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::pl::{Interval, PlMap, Support};
use crate::rational::{floor, floor_i64, frac, int, pow2, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuredError {
    #[error("{0} lies outside (0, 1), the domain of h1 inverse")]
    Domain(Rational),
    #[error("window {0} is not inside the open domain of the map")]
    WindowOutsideDomain(Interval),
    #[error("lift core must satisfy core(1) = core(0) + 1, got core(0) = {at0}, core(1) = {at1}")]
    NotPeriodic { at0: Rational, at1: Rational },
    #[error("lift core must be orientation preserving")]
    OrientationReversing,
    #[error("map is not compactly supported")]
    NotCompactlySupported,
    #[error("expected a periodic lift")]
    NotALift,
    #[error("probe {0} is outside [0, 1)")]
    ProbeOutOfRange(Rational),
    #[error(
        "closed form 2^(n+k)(1+y) = {closed} disagrees with direct evaluation {direct} at n = {n}"
    )]
    ClosedFormMismatch {
        n: u32,
        direct: Rational,
        closed: Rational,
    },
    #[error("growth index must be at least 1")]
    GrowthIndex,
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

pub fn h0_eval(x: &Rational) -> Rational {
    if x.is_negative() {
        return -h0_eval(&-x);
    }
    if x <= &Rational::one() {
        return x.clone();
    }
    let n = floor_i64(x);
    pow2(n - 1) * (Rational::one() + x - int(n))
}

pub fn h0_inverse_eval(y: &Rational) -> Rational {
    if y.is_negative() {
        return -h0_inverse_eval(&-y);
    }
    if y <= &Rational::one() {
        return y.clone();
    }
    // y in [2^e, 2^{e+1}] comes from [e + 1, e + 2]
    let e = floor(y).bits() as i64 - 1;
    int(e + 1) + y / pow2(e) - Rational::one()
}

/// `h₁(n)` for an integer `n ≥ 0`.
fn h1_at(n: &BigInt) -> Rational {
    Rational::one() - Rational::new(BigInt::one(), n + 2)
}

pub fn h1_eval(x: &Rational) -> Rational {
    if x.is_negative() {
        return Rational::one() - h1_eval(&-x);
    }
    let n = floor(x);
    let t = x - Rational::from_integer(n.clone());
    let a = h1_at(&n);
    let b = h1_at(&(n + 1));
    &a + t * (b - &a)
}

pub fn h1_inverse_eval(y: &Rational) -> Result<Rational, StructuredError> {
    if !y.is_positive() || y >= &Rational::one() {
        return Err(StructuredError::Domain(y.clone()));
    }
    if y < &half() {
        return h1_inverse_eval(&(Rational::one() - y)).map(|x| -x);
    }
    // 1/(1 − y) lies in [n + 2, n + 3) exactly when y is in [h₁(n), h₁(n+1))
    let n = floor(&(Rational::one() - y).recip()) - 2;
    let a = h1_at(&n);
    let b = h1_at(&(&n + 1));
    Ok(Rational::from_integer(n) + (y - &a) / (b - a))
}

/// Restriction to `[0, 1]` of a lift `f̃` with `f̃(x + 1) = f̃(x) + 1`.
///
/// Knots always include `x = 0` and `x = 1`; interior knots are genuine slope
/// changes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiftCore {
    knots: Vec<(Rational, Rational)>,
}

impl LiftCore {
    pub fn identity() -> Self {
        Self::translation(Rational::zero())
    }

    pub fn translation(by: Rational) -> Self {
        let at1 = &by + Rational::one();
        LiftCore {
            knots: vec![(Rational::zero(), by), (Rational::one(), at1)],
        }
    }

    /// Takes the restriction of `core` to `[0, 1]`.
    pub fn from_map(core: &PlMap) -> Result<Self, StructuredError> {
        if !core.is_increasing() {
            return Err(StructuredError::OrientationReversing);
        }
        let at0 = core.evaluate(&Rational::zero());
        let at1 = core.evaluate(&Rational::one());
        if at1 != &at0 + Rational::one() {
            return Err(StructuredError::NotPeriodic { at0, at1 });
        }
        let mut ts = vec![Rational::zero(), Rational::one()];
        ts.extend(
            core.breakpoints()
                .into_iter()
                .filter(|b| b.is_positive() && b < &Rational::one()),
        );
        Ok(Self::from_samples(ts, |t| core.evaluate(t)))
    }

    /// Samples `f` at the given points of `[0, 1]`, which must include every
    /// slope change of `f` there.
    fn from_samples<F: Fn(&Rational) -> Rational>(mut ts: Vec<Rational>, f: F) -> Self {
        ts.push(Rational::zero());
        ts.push(Rational::one());
        ts.sort();
        ts.dedup();
        let points: Vec<_> = ts
            .into_iter()
            .map(|t| {
                let v = f(&t);
                (t, v)
            })
            .collect();
        let mut knots = Vec::with_capacity(points.len());
        knots.push(points[0].clone());
        for i in 1..points.len() - 1 {
            let prev = knots.last().expect("nonempty");
            let (ref x, ref y) = points[i];
            let (ref nx, ref ny) = points[i + 1];
            let left = (y - &prev.1) / (x - &prev.0);
            let right = (ny - y) / (nx - x);
            if left != right {
                knots.push(points[i].clone());
            }
        }
        knots.push(points.last().expect("nonempty").clone());
        LiftCore { knots }
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    /// `f̃(0)`.
    pub fn offset(&self) -> &Rational {
        &self.knots[0].1
    }

    fn core_eval(&self, t: &Rational) -> Rational {
        let i = self
            .knots
            .partition_point(|(kx, _)| kx <= t)
            .clamp(1, self.knots.len() - 1);
        let (x0, y0) = &self.knots[i - 1];
        let (x1, y1) = &self.knots[i];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let n = Rational::from_integer(floor(x));
        self.core_eval(&(x - &n)) + n
    }

    pub fn inverse_eval(&self, y: &Rational) -> Rational {
        let n = Rational::from_integer(floor(&(y - self.offset())));
        let target = y - &n;
        let i = self
            .knots
            .partition_point(|(_, ky)| ky <= &target)
            .clamp(1, self.knots.len() - 1);
        let (x0, y0) = &self.knots[i - 1];
        let (x1, y1) = &self.knots[i];
        x0 + (x1 - x0) * (&target - y0) / (y1 - y0) + n
    }

    pub fn inverse(&self) -> LiftCore {
        let ts = self.knots.iter().map(|(_, y)| frac(y)).collect();
        Self::from_samples(ts, |t| self.inverse_eval(t))
    }

    /// The lift `self ∘ inner`.
    pub fn compose(&self, inner: &LiftCore) -> LiftCore {
        let mut ts: Vec<Rational> = inner.knots.iter().map(|(x, _)| x.clone()).collect();
        ts.extend(self.knots.iter().map(|(x, _)| frac(&inner.inverse_eval(x))));
        Self::from_samples(ts, |t| self.eval(&inner.eval(t)))
    }

    /// Slopes of the segments on `[0, 1]`.
    pub fn slope_set(&self) -> BTreeSet<Rational> {
        self.knots
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    /// Breakpoints of the lift reduced into `[0, 1)`.
    pub fn breakpoints_mod_one(&self) -> Vec<Rational> {
        let m = self.knots.len();
        let first = (&self.knots[1].1 - &self.knots[0].1) / (&self.knots[1].0 - &self.knots[0].0);
        let last = (&self.knots[m - 1].1 - &self.knots[m - 2].1)
            / (&self.knots[m - 1].0 - &self.knots[m - 2].0);
        let mut out = Vec::new();
        if first != last {
            out.push(Rational::zero());
        }
        out.extend(self.knots[1..m - 1].iter().map(|(x, _)| x.clone()));
        out
    }

    pub fn is_identity(&self) -> bool {
        self == &LiftCore::identity()
    }
}

/// `η(f)`: the periodized conjugate `n + h₁ f h₁⁻¹(x − n)` of a compactly
/// supported `f`, with its core precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EtaMap {
    inner: PlMap,
    core: LiftCore,
}

impl EtaMap {
    pub fn inner(&self) -> &PlMap {
        &self.inner
    }

    pub fn core(&self) -> &LiftCore {
        &self.core
    }

    /// Evaluation straight from the defining formula.
    pub fn eval_by_formula(&self, x: &Rational) -> Rational {
        if x.is_integer() {
            return x.clone();
        }
        let n = Rational::from_integer(floor(x));
        let t = x - &n;
        let u = h1_inverse_eval(&t).expect("fractional part lies in (0, 1)");
        n + h1_eval(&self.inner.evaluate(&u))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StructuredMap {
    H0,
    H0Inverse,
    /// `h₁ : ℝ → (0, 1)`.
    H1,
    /// `h₁⁻¹ : (0, 1) → ℝ`.
    H1Inverse,
    PeriodicLift(LiftCore),
    EtaEmbed(EtaMap),
    /// `maps[0] ∘ maps[1] ∘ … ∘ maps[last]`; the last entry acts first.
    Composite(Vec<StructuredMap>),
    FinitePart(PlMap),
}

fn integers_in(lo: &Rational, hi: &Rational) -> impl Iterator<Item = BigInt> {
    let start = -floor(&-lo);
    let end = floor(hi);
    num_iter_range(start, end)
}

fn num_iter_range(start: BigInt, end: BigInt) -> impl Iterator<Item = BigInt> {
    let mut cur = start;
    std::iter::from_fn(move || {
        if cur > end {
            return None;
        }
        let out = cur.clone();
        cur += 1;
        Some(out)
    })
}

impl StructuredMap {
    pub fn identity() -> Self {
        StructuredMap::Composite(Vec::new())
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, StructuredError> {
        Ok(match self {
            StructuredMap::H0 => h0_eval(x),
            StructuredMap::H0Inverse => h0_inverse_eval(x),
            StructuredMap::H1 => h1_eval(x),
            StructuredMap::H1Inverse => h1_inverse_eval(x)?,
            StructuredMap::PeriodicLift(core) => core.eval(x),
            StructuredMap::EtaEmbed(eta) => eta.core.eval(x),
            StructuredMap::Composite(maps) => {
                let mut v = x.clone();
                for m in maps.iter().rev() {
                    v = m.eval(&v)?;
                }
                v
            }
            StructuredMap::FinitePart(f) => f.evaluate(x),
        })
    }

    pub fn inverse_eval(&self, y: &Rational) -> Result<Rational, StructuredError> {
        Ok(match self {
            StructuredMap::H0 => h0_inverse_eval(y),
            StructuredMap::H0Inverse => h0_eval(y),
            StructuredMap::H1 => h1_inverse_eval(y)?,
            StructuredMap::H1Inverse => h1_eval(y),
            StructuredMap::PeriodicLift(core) => core.inverse_eval(y),
            StructuredMap::EtaEmbed(eta) => eta.core.inverse_eval(y),
            StructuredMap::Composite(maps) => {
                let mut v = y.clone();
                for m in maps {
                    v = m.inverse_eval(&v)?;
                }
                v
            }
            StructuredMap::FinitePart(f) => f.invert().evaluate(y),
        })
    }

    pub fn inverse(&self) -> StructuredMap {
        match self {
            StructuredMap::H0 => StructuredMap::H0Inverse,
            StructuredMap::H0Inverse => StructuredMap::H0,
            StructuredMap::H1 => StructuredMap::H1Inverse,
            StructuredMap::H1Inverse => StructuredMap::H1,
            StructuredMap::PeriodicLift(core) => StructuredMap::PeriodicLift(core.inverse()),
            StructuredMap::EtaEmbed(eta) => {
                let inner = eta.inner.invert();
                StructuredMap::EtaEmbed(EtaMap {
                    core: eta.core.inverse(),
                    inner,
                })
            }
            StructuredMap::Composite(maps) => {
                StructuredMap::Composite(maps.iter().rev().map(StructuredMap::inverse).collect())
            }
            StructuredMap::FinitePart(f) => StructuredMap::FinitePart(f.invert()),
        }
    }

    pub fn is_increasing(&self) -> bool {
        match self {
            StructuredMap::FinitePart(f) => f.is_increasing(),
            StructuredMap::Composite(maps) => {
                maps.iter().filter(|m| !m.is_increasing()).count() % 2 == 0
            }
            _ => true,
        }
    }

    /// The periodic core, for lift variants.
    pub fn lift_core(&self) -> Option<&LiftCore> {
        match self {
            StructuredMap::PeriodicLift(core) => Some(core),
            StructuredMap::EtaEmbed(eta) => Some(&eta.core),
            _ => None,
        }
    }

    /// Open interval of definition with possibly infinite ends; `None` means
    /// all of ℝ.
    #[allow(clippy::type_complexity)]
    fn domain(&self) -> Result<Option<(Option<Rational>, Option<Rational>)>, StructuredError> {
        match self {
            StructuredMap::H1Inverse => Ok(Some((Some(Rational::zero()), Some(Rational::one())))),
            StructuredMap::Composite(maps) => {
                // pull each map's domain back through the maps acting before
                // it; an endpoint outside their image constrains nothing
                let mut lower: Option<Rational> = None;
                let mut upper: Option<Rational> = None;
                let mut constrained = false;
                for (i, m) in maps.iter().enumerate() {
                    let Some((lo, hi)) = m.domain()? else {
                        continue;
                    };
                    constrained = true;
                    let before = StructuredMap::Composite(maps[i + 1..].to_vec());
                    let pull = |e: Option<Rational>| e.and_then(|e| before.inverse_eval(&e).ok());
                    let ends = [pull(lo), pull(hi)];
                    let [a, b] = if before.is_increasing() {
                        ends
                    } else {
                        [ends[1].clone(), ends[0].clone()]
                    };
                    if let Some(a) = a {
                        lower = Some(lower.map_or(a.clone(), |c| c.max(a)));
                    }
                    if let Some(b) = b {
                        upper = Some(upper.map_or(b.clone(), |d| d.min(b)));
                    }
                }
                if !constrained {
                    return Ok(None);
                }
                Ok(Some((lower, upper)))
            }
            _ => Ok(None),
        }
    }

    fn image(&self, lo: &Rational, hi: &Rational) -> Result<(Rational, Rational), StructuredError> {
        let (a, b) = (self.eval(lo)?, self.eval(hi)?);
        Ok(if a <= b { (a, b) } else { (b, a) })
    }

    /// A finite superset of the breakpoints in `[lo, hi]`.
    fn candidates(&self, lo: &Rational, hi: &Rational) -> Result<Vec<Rational>, StructuredError> {
        Ok(match self {
            StructuredMap::H0 => integers_in(lo, hi)
                .filter(|n| n.abs() >= BigInt::from(2))
                .map(Rational::from_integer)
                .collect(),
            StructuredMap::H0Inverse => {
                let mut out = Vec::new();
                let reach = lo.abs().max(hi.abs());
                let mut p = int(2);
                while p <= reach {
                    for v in [p.clone(), -p.clone()] {
                        if lo <= &v && &v <= hi {
                            out.push(v);
                        }
                    }
                    p *= int(2);
                }
                out
            }
            StructuredMap::H1 => integers_in(lo, hi)
                .filter(|n| !n.is_zero())
                .map(Rational::from_integer)
                .collect(),
            StructuredMap::H1Inverse => {
                let a = h1_inverse_eval(lo)?;
                let b = h1_inverse_eval(hi)?;
                integers_in(&a, &b)
                    .filter(|n| !n.is_zero())
                    .map(|n| h1_eval(&Rational::from_integer(n)))
                    .collect()
            }
            StructuredMap::PeriodicLift(core) => lift_candidates(core, lo, hi),
            StructuredMap::EtaEmbed(eta) => lift_candidates(&eta.core, lo, hi),
            StructuredMap::FinitePart(f) => f
                .breakpoints()
                .into_iter()
                .filter(|b| lo <= b && b <= hi)
                .collect(),
            StructuredMap::Composite(maps) => {
                // B(g ∘ h) ⊆ B(h) ∪ h⁻¹(B(g)), peeled from the innermost map
                let mut acc: Vec<Rational> = Vec::new();
                let mut done = StructuredMap::Composite(Vec::new());
                for (i, m) in maps.iter().enumerate().rev() {
                    let (a, b) = done.image(lo, hi)?;
                    for c in m.candidates(&a, &b)? {
                        acc.push(done.inverse_eval(&c)?);
                    }
                    done = StructuredMap::Composite(maps[i..].to_vec());
                }
                acc
            }
        })
    }

    /// Exact breakpoints inside the window, increasing.
    pub fn breakpoints_in(&self, window: &Interval) -> Result<Vec<Rational>, StructuredError> {
        let (lo, hi) = (window.lo(), window.hi());
        let mut margin = Rational::one();
        if let Some((dlo, dhi)) = self.domain()? {
            if dlo.as_ref().is_some_and(|d| lo <= d) || dhi.as_ref().is_some_and(|d| hi >= d) {
                return Err(StructuredError::WindowOutsideDomain(window.clone()));
            }
            if let Some(d) = dlo {
                margin = margin.min((lo - d) / int(2));
            }
            if let Some(d) = dhi {
                margin = margin.min((d - hi) / int(2));
            }
        }
        let outer_lo = lo - &margin;
        let outer_hi = hi + &margin;
        let mut nodes = self.candidates(&outer_lo, &outer_hi)?;
        nodes.push(outer_lo.clone());
        nodes.push(outer_hi.clone());
        nodes.retain(|c| &outer_lo <= c && c <= &outer_hi);
        nodes.sort();
        nodes.dedup();
        let values = nodes
            .iter()
            .map(|x| self.eval(x))
            .collect::<Result<Vec<_>, _>>()?;
        let slope = |i: usize| (&values[i + 1] - &values[i]) / (&nodes[i + 1] - &nodes[i]);
        Ok((1..nodes.len() - 1)
            .filter(|&i| lo <= &nodes[i] && &nodes[i] <= hi && slope(i - 1) != slope(i))
            .map(|i| nodes[i].clone())
            .collect())
    }
}

fn lift_candidates(core: &LiftCore, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for b in core.breakpoints_mod_one() {
        for n in integers_in(&(lo - &b), &(hi - &b)) {
            out.push(&b + Rational::from_integer(n));
        }
    }
    out
}

/// Lift of a circle map given by its restriction to `[0, 1]`.
pub fn lift_from_circle_core(core: &PlMap) -> Result<StructuredMap, StructuredError> {
    LiftCore::from_map(core).map(StructuredMap::PeriodicLift)
}

/// `η(f)` for a compactly supported, orientation-preserving `f`.
pub fn eta_embed(f: &PlMap) -> Result<StructuredMap, StructuredError> {
    if !f.is_increasing() {
        return Err(StructuredError::OrientationReversing);
    }
    let conj = |t: &Rational| -> Rational {
        if t.is_zero() || t.is_one() {
            return t.clone();
        }
        let u = h1_inverse_eval(t).expect("t in (0, 1)");
        h1_eval(&f.evaluate(&u))
    };
    let core = match f.support() {
        Support::Unbounded => return Err(StructuredError::NotCompactlySupported),
        Support::Empty => LiftCore::identity(),
        Support::Bounded(span) => {
            // slope changes of h₁ f h₁⁻¹ come from B(f), the integers, and
            // their f-preimages; all of them sit inside the support
            let (lo, hi) = (span.lo(), span.hi());
            let inv = f.invert();
            let mut sources: Vec<Rational> = vec![lo.clone(), hi.clone()];
            sources.extend(f.breakpoints());
            for n in integers_in(lo, hi) {
                let n = Rational::from_integer(n);
                sources.push(inv.evaluate(&n));
                sources.push(n);
            }
            let ts = sources.iter().map(h1_eval).collect();
            LiftCore::from_samples(ts, conj)
        }
    };
    Ok(StructuredMap::EtaEmbed(EtaMap {
        inner: f.clone(),
        core,
    }))
}

/// `ψ(f̃) = h₀ ∘ f̃ ∘ h₀⁻¹`.
pub fn psi_conjugate(lift: &StructuredMap) -> Result<StructuredMap, StructuredError> {
    if lift.lift_core().is_none() {
        return Err(StructuredError::NotALift);
    }
    Ok(StructuredMap::Composite(vec![
        StructuredMap::H0,
        lift.clone(),
        StructuredMap::H0Inverse,
    ]))
}

/// The discrete set `B(h₀) ∪ h₀B(f̃) ∪ h₀f̃⁻¹B(h₀)` restricted to a window;
/// it contains every breakpoint of `ψ(f̃)` there.
pub fn psi_breakpoint_cover(core: &LiftCore, window: &Interval) -> Vec<Rational> {
    let (lo, hi) = (window.lo(), window.hi());
    let mut out: Vec<Rational> = integers_in(lo, hi)
        .filter(|n| n.abs() >= BigInt::from(2))
        .map(Rational::from_integer)
        .collect();
    let (a, b) = (h0_inverse_eval(lo), h0_inverse_eval(hi));
    out.extend(lift_candidates(core, &a, &b).iter().map(h0_eval));
    let (fa, fb) = (core.eval(&a), core.eval(&b));
    for n in integers_in(&fa, &fb).filter(|n| n.abs() >= BigInt::from(2)) {
        out.push(h0_eval(&core.inverse_eval(&Rational::from_integer(n))));
    }
    out.retain(|x| window.contains(x));
    out.sort();
    out.dedup();
    out
}

/// A point `x ∈ [0, 1)` moved to the right by the (possibly inverted) lift,
/// with `f̃(x) = k + y`, `0 ≤ y < 1`, and `q = ⌊|f̃(0)|⌋ + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthWitness {
    pub x: Rational,
    pub k: i64,
    pub y: Rational,
    pub q: i64,
    /// The lift moves `x` left, so the witness is for its inverse.
    pub inverted: bool,
}

impl GrowthWitness {
    fn for_core(core: &LiftCore, x: &Rational, inverted: bool) -> Self {
        let v = core.eval(x);
        let k = floor_i64(&v);
        GrowthWitness {
            x: x.clone(),
            k,
            y: &v - int(k),
            q: floor_i64(&core.offset().abs()) + 2,
            inverted,
        }
    }
}

/// First probe moved by the lift; `None` when every probe is fixed, which
/// does not by itself show the lift is the identity.
pub fn find_growth_witness(
    lift: &StructuredMap,
    probes: &[Rational],
) -> Result<Option<GrowthWitness>, StructuredError> {
    let core = lift.lift_core().ok_or(StructuredError::NotALift)?;
    for p in probes {
        if p.is_negative() || p >= &Rational::one() {
            return Err(StructuredError::ProbeOutOfRange(p.clone()));
        }
        let v = core.eval(p);
        if &v > p {
            return Ok(Some(GrowthWitness::for_core(core, p, false)));
        }
        if &v < p {
            return Ok(Some(GrowthWitness::for_core(&core.inverse(), p, true)));
        }
    }
    Ok(None)
}

/// One row of a growth table for `f₀ = ψ(f̃)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: u32,
    pub point: Rational,
    pub value: Rational,
    pub displacement: Rational,
}

/// `f₀` at `2ⁿ(1 + x)`, evaluated directly.
pub fn growth_row(f0: &StructuredMap, x: &Rational, n: u32) -> Result<GrowthRow, StructuredError> {
    let point = pow2(n as i64) * (Rational::one() + x);
    let value = f0.eval(&point)?;
    let displacement = &value - &point;
    Ok(GrowthRow {
        n,
        point,
        value,
        displacement,
    })
}

/// Evaluates `f₀` at `2ⁿ(1 + x)` and checks it against `2^{n+k}(1 + y)`.
///
/// The witness fixes the orientation: an inverted witness measures
/// `ψ(f̃⁻¹) = ψ(f̃)⁻¹`.
pub fn growth_formula(
    lift: &StructuredMap,
    witness: &GrowthWitness,
    n: u32,
) -> Result<GrowthRow, StructuredError> {
    if n == 0 {
        return Err(StructuredError::GrowthIndex);
    }
    let core = lift.lift_core().ok_or(StructuredError::NotALift)?;
    let oriented = if witness.inverted {
        core.inverse()
    } else {
        core.clone()
    };
    let f0 = psi_conjugate(&StructuredMap::PeriodicLift(oriented))?;
    let row = growth_row(&f0, &witness.x, n)?;
    let closed = pow2(n as i64 + witness.k) * (Rational::one() + &witness.y);
    if row.value != closed {
        return Err(StructuredError::ClosedFormMismatch {
            n,
            direct: row.value,
            closed,
        });
    }
    Ok(row)
}

/// `m`, `M` (extreme core slopes), `q`, and the interval `(2^{−q}m, 2^qM)`
/// holding every slope of `ψ(f̃)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateSlopeBounds {
    pub m: Rational,
    pub big_m: Rational,
    pub q: i64,
    pub interval: Interval,
}

pub fn conjugate_slope_bounds(
    lift: &StructuredMap,
) -> Result<ConjugateSlopeBounds, StructuredError> {
    let core = lift.lift_core().ok_or(StructuredError::NotALift)?;
    let slopes = core.slope_set();
    let m = slopes.first().expect("core has a segment").clone();
    let big_m = slopes.last().expect("core has a segment").clone();
    let q = floor_i64(&core.offset().abs()) + 2;
    let interval = Interval::new(&m * pow2(-q), &big_m * pow2(q)).expect("m ≤ M");
    Ok(ConjugateSlopeBounds {
        m,
        big_m,
        q,
        interval,
    })
}
