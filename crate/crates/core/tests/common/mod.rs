//! Random generators shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use qiline::rational::{int, ratio};
use qiline::structured::LiftCore;
use qiline::{PlMap, Rational};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational<R: Rng>(rng: &mut R, range: i64) -> Rational {
    let q = rng.gen_range(1..=8);
    ratio(rng.gen_range(-range * q..=range * q), q)
}

pub fn positive_slope<R: Rng>(rng: &mut R) -> Rational {
    bounded_slope(rng, 12)
}

/// `p/q` with `1 ≤ p, q ≤ b`.
pub fn bounded_slope<R: Rng>(rng: &mut R, b: i64) -> Rational {
    ratio(rng.gen_range(1..=b), rng.gen_range(1..=b))
}

/// Increasing `n` distinct rationals starting near `start`.
fn increasing<R: Rng>(rng: &mut R, start: Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut x = start;
    for _ in 0..n {
        out.push(x.clone());
        x += ratio(rng.gen_range(1..=24), rng.gen_range(1..=6));
    }
    out
}

/// A random finite PL map with up to `max_knots` knots; decreasing when
/// `allow_reversing` and a coin says so.
pub fn random_pl<R: Rng>(rng: &mut R, max_knots: usize, allow_reversing: bool) -> PlMap {
    random_pl_bounded(rng, max_knots, allow_reversing, 12)
}

/// As [`random_pl`], with slopes `p/q` for `1 ≤ p, q ≤ b`.
pub fn random_pl_bounded<R: Rng>(
    rng: &mut R,
    max_knots: usize,
    allow_reversing: bool,
    b: i64,
) -> PlMap {
    let sign = if allow_reversing && rng.gen_bool(0.3) {
        int(-1)
    } else {
        int(1)
    };
    let n = rng.gen_range(0..=max_knots);
    let left = bounded_slope(rng, b) * &sign;
    if n == 0 {
        return PlMap::affine(left, small_rational(rng, 10)).unwrap();
    }
    let start = small_rational(rng, 10);
    let xs = increasing(rng, start, n);
    let mut y = small_rational(rng, 10);
    let mut points = vec![(xs[0].clone(), y.clone())];
    for w in xs.windows(2) {
        y += bounded_slope(rng, b) * &sign * (&w[1] - &w[0]);
        points.push((w[1].clone(), y.clone()));
    }
    let right = bounded_slope(rng, b) * &sign;
    PlMap::new(points, left, right).unwrap()
}

/// Increasing map with end slopes 1 and possibly a nonzero end translation.
pub fn random_eventually_translation<R: Rng>(rng: &mut R) -> PlMap {
    let n = rng.gen_range(1..=6);
    let start = small_rational(rng, 10);
    let xs = increasing(rng, start, n);
    let mut y = small_rational(rng, 10);
    let mut points = vec![(xs[0].clone(), y.clone())];
    for w in xs.windows(2) {
        y += positive_slope(rng) * (&w[1] - &w[0]);
        points.push((w[1].clone(), y.clone()));
    }
    PlMap::new(points, int(1), int(1)).unwrap()
}

/// Positive weights rescaled to sum to `total`.
fn split<R: Rng>(rng: &mut R, total: &Rational, parts: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=9)).collect();
    let sum: i64 = w.iter().sum();
    w.into_iter().map(|wi| total * ratio(wi, sum)).collect()
}

/// Increasing map that is the identity outside a bounded interval.
pub fn random_compact<R: Rng>(rng: &mut R) -> PlMap {
    let n = rng.gen_range(3..=7);
    let start = small_rational(rng, 4);
    let xs = increasing(rng, start, n);
    let total = &xs[n - 1] - &xs[0];
    let steps = split(rng, &total, n - 1);
    let mut y = xs[0].clone();
    let mut points = vec![(xs[0].clone(), y.clone())];
    for (x, s) in xs[1..].iter().zip(steps) {
        y += s;
        points.push((x.clone(), y.clone()));
    }
    points.last_mut().unwrap().1 = xs[n - 1].clone();
    PlMap::new(points, int(1), int(1)).unwrap()
}

/// Core of a lift with `f̃(0)` in `[−3, 3]`.
pub fn random_lift_core<R: Rng>(rng: &mut R) -> LiftCore {
    let offset = small_rational(rng, 3);
    let interior = rng.gen_range(0..=5);
    let mut ts: Vec<Rational> = (0..interior)
        .map(|_| ratio(rng.gen_range(1..64), 64))
        .collect();
    ts.sort();
    ts.dedup();
    let mut xs = vec![int(0)];
    xs.extend(ts);
    xs.push(int(1));
    let steps = split(rng, &int(1), xs.len() - 1);
    let mut y = offset.clone();
    let mut points = vec![(int(0), y.clone())];
    for (x, s) in xs[1..].iter().zip(steps) {
        y += s;
        points.push((x.clone(), y.clone()));
    }
    points.last_mut().unwrap().1 = &offset + int(1);
    let f = PlMap::new(points, int(1), int(1)).unwrap();
    LiftCore::from_map(&f).unwrap()
}

pub fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

pub fn pl_map() -> impl Strategy<Value = PlMap> {
    seeds().prop_map(|s| random_pl(&mut rng(s), 6, true))
}

pub fn increasing_pl_map() -> impl Strategy<Value = PlMap> {
    seeds().prop_map(|s| random_pl(&mut rng(s), 6, false))
}

pub fn oracle_pl_map() -> impl Strategy<Value = PlMap> {
    seeds().prop_map(|s| random_pl_bounded(&mut rng(s), 6, false, 3))
}

pub fn compact_map() -> impl Strategy<Value = PlMap> {
    seeds().prop_map(|s| random_compact(&mut rng(s)))
}

pub fn lift_core() -> impl Strategy<Value = LiftCore> {
    seeds().prop_map(|s| random_lift_core(&mut rng(s)))
}

pub fn rational(range: i64) -> impl Strategy<Value = Rational> {
    (1i64..=16).prop_flat_map(move |q| (-range * q..=range * q).prop_map(move |p| ratio(p, q)))
}

/// Whether `sup |f − id|` stops changing across four nested windows that all
/// contain every breakpoint, each four times wider than the last. Returns
/// the sups as well.
pub fn displacement_stabilizes(f: &PlMap) -> (bool, Vec<Rational>) {
    use num_traits::Signed;
    use qiline::qi::displacement_sup;
    use qiline::Interval;
    let mut scale = int(1);
    for b in f.breakpoints() {
        scale = scale.max(b.abs() + (f.evaluate(&b) - &b).abs() + int(1));
    }
    let base = scale * int(1000);
    let sups: Vec<Rational> = (1..=4)
        .map(|k| {
            let r = &base * int(4i64.pow(k));
            displacement_sup(f, &Interval::new(-r.clone(), r).unwrap())
        })
        .collect();
    (sups.windows(2).all(|w| w[0] == w[1]), sups)
}
