//! Bounded-slope PL representatives of end-preserving quasi-isometries.
//!
//! Given a black-box `C`-quasi-isometry evaluated at integers, the algorithm
//! walks outward from `x₀ = 0`, picking each `x_k` as the nearest integer whose
//! image strictly exceeds (or, going left, strictly undercuts) the previous
//! one. Every `C³`-th point is kept as a grid node `y_k`, and the output is the
//! PL map interpolating the oracle at the nodes. Its slopes all lie in
//! `[C⁻¹ − C⁻², C + C⁻²]` and it stays within bounded distance of the oracle.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pl::{Interval, PlMap};
use crate::qi::lipschitz_constant;
use crate::qi::qi_constant_from_slopes;
use crate::rational::{ceil_i64, int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle table has no value at {0}")]
    Missing(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("no monotone witness {direction} from {from} within {limit} steps (scanned {first}..={last}); oracle is not an end-preserving C-quasi-isometry")]
    ScanExceeded {
        from: i64,
        direction: Direction,
        limit: u64,
        first: i64,
        last: i64,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("constant {given} is below the minimum {minimum} for this oracle")]
    ConstantTooSmall { given: u32, minimum: u32 },
    #[error("oracle must preserve orientation")]
    OrientationReversing,
    #[error("window size must be positive")]
    EmptyWindow,
}

/// An end-preserving quasi-isometry known only through its values at integers.
pub trait QiOracle {
    fn eval(&self, x: i64) -> Result<Rational, OracleError>;

    /// Integer quasi-isometry constant, at least 2.
    fn constant(&self) -> u32;
}

/// Built-in oracle families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// A finite PL map restricted to the integers.
    Pl(PlMap),
    /// `x + ⌊√|x|⌋·sign(x)`.
    SqrtDrift,
    /// `x + r(x)` with seeded pseudo-random `|r(x)| ≤ amplitude`.
    BoundedNoise { amplitude: u32, seed: u64 },
    /// `2m ↦ 2m + 1`, `2m + 1 ↦ 2m`.
    BlockSwap,
    /// Values given by table; other queries fail.
    Table(BTreeMap<i64, Rational>),
}

impl Family {
    /// The constant each family declares by default.
    pub fn default_constant(&self) -> u32 {
        match self {
            Family::Pl(f) => {
                let c = ceil_i64(qi_constant_from_slopes(f).value());
                c.max(2) as u32
            }
            Family::SqrtDrift => 2,
            Family::BoundedNoise { amplitude, .. } => 2 * amplitude + 1,
            Family::BlockSwap => 3,
            Family::Table(_) => 2,
        }
    }

    /// Smallest constant that still makes the family a quasi-isometry; below
    /// the default for PL maps, whose default carries the slope margin.
    fn minimum_constant(&self) -> u32 {
        match self {
            Family::Pl(f) => (ceil_i64(&lipschitz_constant(f)).max(2)) as u32,
            other => other.default_constant(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Pl(_) => "finite-pl",
            Family::SqrtDrift => "sqrt-drift",
            Family::BoundedNoise { .. } => "bounded-noise",
            Family::BlockSwap => "block-swap",
            Family::Table(_) => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Oracle {
    family: Family,
    c: u32,
}

impl Oracle {
    pub fn new(family: Family) -> Result<Self, ApproxError> {
        let c = family.default_constant();
        Self::with_constant(family, c)
    }

    /// Uses an explicit constant, which must be at least the family's own.
    /// Tables accept any `C ≥ 2`; the caller vouches for it.
    pub fn with_constant(family: Family, c: u32) -> Result<Self, ApproxError> {
        if let Family::Pl(f) = &family {
            if !f.is_increasing() {
                return Err(ApproxError::OrientationReversing);
            }
        }
        let minimum = family.minimum_constant();
        if c < minimum {
            return Err(ApproxError::ConstantTooSmall { given: c, minimum });
        }
        Ok(Oracle { family, c })
    }

    pub fn identity(c: u32) -> Result<Self, ApproxError> {
        Self::with_constant(Family::Pl(PlMap::identity()), c)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }
}

fn noise(amplitude: u32, seed: u64, x: i64) -> Rational {
    const QUARTERS: i64 = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let span = amplitude as i64 * QUARTERS;
    ratio(rng.gen_range(-span..=span), QUARTERS)
}

impl QiOracle for Oracle {
    fn eval(&self, x: i64) -> Result<Rational, OracleError> {
        Ok(match &self.family {
            Family::Pl(f) => f.evaluate(&int(x)),
            Family::SqrtDrift => {
                let root = BigInt::from(x.unsigned_abs()).sqrt();
                let root = root.to_i64().expect("sqrt of i64 fits");
                int(x + x.signum() * root)
            }
            Family::BoundedNoise { amplitude, seed } => int(x) + noise(*amplitude, *seed, x),
            Family::BlockSwap => int(if x.rem_euclid(2) == 0 { x + 1 } else { x - 1 }),
            Family::Table(t) => t.get(&x).cloned().ok_or(OracleError::Missing(x))?,
        })
    }

    fn constant(&self) -> u32 {
        self.c
    }
}

fn scan_limit(c: u32) -> u64 {
    4 * (c as u64) * (c as u64)
}

/// Nearest integer above `x` at which the oracle strictly increases, given
/// `fx = eval(x)`. Returns the witness and its value.
fn witness_from<O: QiOracle + ?Sized>(
    oracle: &O,
    x: i64,
    fx: &Rational,
    direction: Direction,
) -> Result<(i64, Rational), ApproxError> {
    let limit = scan_limit(oracle.constant());
    let step: i64 = match direction {
        Direction::Up => 1,
        Direction::Down => -1,
    };
    for d in 1..=limit as i64 {
        let y = x + step * d;
        let fy = oracle.eval(y)?;
        let found = match direction {
            Direction::Up => &fy > fx,
            Direction::Down => &fy < fx,
        };
        if found {
            return Ok((y, fy));
        }
    }
    Err(ApproxError::ScanExceeded {
        from: x,
        direction,
        limit,
        first: x + step,
        last: x + step * limit as i64,
    })
}

/// Smallest `y > x` with `eval(y) > eval(x)`, scanning at most `4C²` steps.
pub fn monotone_witness_up<O: QiOracle + ?Sized>(oracle: &O, x: i64) -> Result<i64, ApproxError> {
    let fx = oracle.eval(x)?;
    witness_from(oracle, x, &fx, Direction::Up).map(|(y, _)| y)
}

/// Greatest `v < x` with `eval(v) < eval(x)`, scanning at most `4C²` steps.
pub fn monotone_witness_down<O: QiOracle + ?Sized>(oracle: &O, x: i64) -> Result<i64, ApproxError> {
    let fx = oracle.eval(x)?;
    witness_from(oracle, x, &fx, Direction::Down).map(|(v, _)| v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridViolation {
    #[error("oracle not increasing between x_{k} and its predecessor")]
    NotIncreasing { k: i64 },
    #[error("gap y_{k} - y_{} = {gap} outside [{min}, {max}]", k - 1)]
    Gap {
        k: i64,
        gap: i64,
        min: i64,
        max: i64,
    },
}

/// The scan sequence `x_k` for `|k| ≤ N·C³`, and the nodes `y_k = x_{C³k}`
/// for `|k| ≤ N` together with the oracle's values there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationGrid {
    c: u32,
    n: u32,
    x_seq: Vec<i64>,
    x_values: Vec<Rational>,
    max_step: u64,
}

impl ApproximationGrid {
    pub fn constant(&self) -> u32 {
        self.c
    }

    pub fn window(&self) -> u32 {
        self.n
    }

    fn stride(&self) -> i64 {
        (self.c as i64).pow(3)
    }

    fn x_offset(&self) -> i64 {
        self.n as i64 * self.stride()
    }

    /// `x_k` for `|k| ≤ N·C³`.
    pub fn x(&self, k: i64) -> i64 {
        self.x_seq[(k + self.x_offset()) as usize]
    }

    /// `y_k = x_{C³k}` for `|k| ≤ N`.
    pub fn y(&self, k: i64) -> i64 {
        self.x(k * self.stride())
    }

    /// The oracle's value at `y_k`.
    pub fn f_value(&self, k: i64) -> &Rational {
        &self.x_values[(k * self.stride() + self.x_offset()) as usize]
    }

    pub fn x_seq(&self) -> &[i64] {
        &self.x_seq
    }

    pub fn k_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n as i64)..=self.n as i64
    }

    /// `(k, y_k, eval(y_k))` for every node.
    pub fn nodes(&self) -> impl Iterator<Item = (i64, i64, &Rational)> + '_ {
        self.k_range().map(move |k| (k, self.y(k), self.f_value(k)))
    }

    /// Largest distance any single witness scan had to travel.
    pub fn max_step(&self) -> u64 {
        self.max_step
    }

    /// The closed span `[y_{-N}, y_N]`.
    pub fn span(&self) -> (i64, i64) {
        (self.y(-(self.n as i64)), self.y(self.n as i64))
    }

    /// Checks strict monotonicity along the scan and `C³ ≤ y_k − y_{k−1} ≤ 4C⁵`.
    pub fn check(&self) -> Result<(), GridViolation> {
        let offset = self.x_offset();
        for i in 1..self.x_seq.len() {
            if self.x_seq[i] <= self.x_seq[i - 1] || self.x_values[i] <= self.x_values[i - 1] {
                return Err(GridViolation::NotIncreasing {
                    k: i as i64 - offset,
                });
            }
        }
        let c = self.c as i64;
        let (min, max) = (c.pow(3), 4 * c.pow(5));
        for k in (-(self.n as i64) + 1)..=self.n as i64 {
            let gap = self.y(k) - self.y(k - 1);
            if gap < min || gap > max {
                return Err(GridViolation::Gap { k, gap, min, max });
            }
        }
        Ok(())
    }
}

pub fn build_grid<O: QiOracle + ?Sized>(
    oracle: &O,
    n: u32,
) -> Result<ApproximationGrid, ApproxError> {
    if n == 0 {
        return Err(ApproxError::EmptyWindow);
    }
    let c = oracle.constant();
    let reach = n as usize * (c as usize).pow(3);
    let f0 = oracle.eval(0)?;
    let mut max_step = 0u64;

    let mut up = Vec::with_capacity(reach);
    let (mut x, mut fx) = (0i64, f0.clone());
    for _ in 0..reach {
        let (y, fy) = witness_from(oracle, x, &fx, Direction::Up)?;
        max_step = max_step.max((y - x) as u64);
        up.push((y, fy.clone()));
        (x, fx) = (y, fy);
    }

    let mut down = Vec::with_capacity(reach);
    let (mut x, mut fx) = (0i64, f0.clone());
    for _ in 0..reach {
        let (v, fv) = witness_from(oracle, x, &fx, Direction::Down)?;
        max_step = max_step.max((x - v) as u64);
        down.push((v, fv.clone()));
        (x, fx) = (v, fv);
    }

    let mut x_seq = Vec::with_capacity(2 * reach + 1);
    let mut x_values = Vec::with_capacity(2 * reach + 1);
    for (v, fv) in down.into_iter().rev() {
        x_seq.push(v);
        x_values.push(fv);
    }
    x_seq.push(0);
    x_values.push(f0);
    for (y, fy) in up {
        x_seq.push(y);
        x_values.push(fy);
    }
    Ok(ApproximationGrid {
        c,
        n,
        x_seq,
        x_values,
        max_step,
    })
}

/// `[C⁻¹ − C⁻², C + C⁻²]`, the interval holding every slope of the output.
pub fn slope_window(c: u32) -> Interval {
    let c = int(c as i64);
    let c_inv = c.recip();
    let c_inv2 = &c_inv * &c_inv;
    Interval::new(&c_inv - &c_inv2, c + c_inv2).expect("C ≥ 2 gives a proper interval")
}

/// The PL map through `(y_k, eval(y_k))`, extended by its outer segment slopes.
pub fn interpolate(grid: &ApproximationGrid) -> PlMap {
    let points: Vec<_> = grid
        .nodes()
        .map(|(_, y, fy)| (int(y), fy.clone()))
        .collect();
    let first = (&points[1].1 - &points[0].1) / (&points[1].0 - &points[0].0);
    let m = points.len();
    let last = (&points[m - 1].1 - &points[m - 2].1) / (&points[m - 1].0 - &points[m - 2].0);
    PlMap::new(points, first, last).expect("grid values are strictly increasing")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub grid: ApproximationGrid,
    pub map: PlMap,
}

pub fn approximate<O: QiOracle + ?Sized>(oracle: &O, n: u32) -> Result<Approximation, ApproxError> {
    let grid = build_grid(oracle, n)?;
    let map = interpolate(&grid);
    Ok(Approximation { grid, map })
}

pub fn pl_approximate<O: QiOracle + ?Sized>(oracle: &O, n: u32) -> Result<PlMap, ApproxError> {
    approximate(oracle, n).map(|a| a.map)
}

/// `sup |eval(t) − g(t)|` over integers `t` in the grid span.
pub fn agreement_report<O: QiOracle + ?Sized>(
    oracle: &O,
    g: &PlMap,
    grid: &ApproximationGrid,
) -> Result<Rational, OracleError> {
    let (lo, hi) = grid.span();
    let mut sup = int(0);
    for t in lo..=hi {
        let d = (oracle.eval(t)? - g.evaluate(&int(t))).abs();
        if d > sup {
            sup = d;
        }
    }
    Ok(sup)
}

/// `2C·4C⁵ + 2C`: between consecutive nodes both the oracle and the
/// interpolant stay within `C·gap + C` of the shared node value.
pub fn agreement_bound(c: u32) -> Rational {
    let c = c as i64;
    int(8 * c.pow(6) + 2 * c)
}
