mod common;

use std::collections::BTreeMap;

use common::{oracle_pl_map, rng};
use proptest::prelude::*;
use qiline::approx::{
    agreement_bound, agreement_report, approximate, build_grid, monotone_witness_down,
    monotone_witness_up, pl_approximate, slope_window, ApproxError, Direction, Family, Oracle,
    OracleError, QiOracle,
};
use qiline::qi::{verify_qi_inequality, QiConstant};
use qiline::rational::{int, ratio};
use qiline::{PlMap, Rational};
use rand::Rng;

fn families() -> Vec<Family> {
    vec![
        Family::Pl(PlMap::identity()),
        Family::Pl(PlMap::affine(int(2), int(0)).unwrap()),
        Family::Pl(
            PlMap::new(
                vec![(int(-40), int(-30)), (int(0), int(0)), (int(25), int(60))],
                int(1),
                ratio(1, 2),
            )
            .unwrap(),
        ),
        Family::SqrtDrift,
        Family::BoundedNoise {
            amplitude: 1,
            seed: 11,
        },
        Family::BoundedNoise {
            amplitude: 3,
            seed: 12,
        },
        Family::BlockSwap,
    ]
}

/// Brute-force check of the quasi-isometry inequality on integer pairs, both
/// far apart and close together.
fn brute_force(oracle: &Oracle, seed: u64) -> bool {
    let mut r = rng(seed);
    let mut pairs = Vec::new();
    for _ in 0..1000 {
        let x = r.gen_range(-1_000_000i64..=1_000_000);
        let y = if r.gen_bool(0.5) {
            r.gen_range(-1_000_000i64..=1_000_000)
        } else {
            x + r.gen_range(-40i64..=40)
        };
        pairs.push((int(x), int(y)));
    }
    let c = QiConstant::new(int(oracle.constant() as i64)).unwrap();
    let eval = |x: &Rational| {
        let n: i64 = x.to_integer().try_into().unwrap();
        oracle.eval(n).unwrap()
    };
    verify_qi_inequality(eval, &c, &pairs).holds()
}

#[test]
fn families_pass_their_declared_constant() {
    for (i, family) in families().into_iter().enumerate() {
        let oracle = Oracle::new(family).unwrap();
        assert!(brute_force(&oracle, i as u64), "{}", oracle.family().name());
    }
}

#[test]
fn witness_examples() {
    let id = Oracle::identity(2).unwrap();
    assert_eq!(monotone_witness_up(&id, 10).unwrap(), 11);
    assert_eq!(monotone_witness_down(&id, 10).unwrap(), 9);
    let swap = Oracle::with_constant(Family::BlockSwap, 3).unwrap();
    assert_eq!(swap.eval(0).unwrap(), int(1));
    assert_eq!(monotone_witness_up(&swap, 0).unwrap(), 2);
    assert_eq!(monotone_witness_down(&swap, 1).unwrap(), -1);
    assert_eq!(swap.eval(-1).unwrap(), int(-2));
    let sqrt = Oracle::new(Family::SqrtDrift).unwrap();
    assert_eq!(monotone_witness_up(&sqrt, 0).unwrap(), 1);
    assert_eq!(monotone_witness_down(&sqrt, 0).unwrap(), -1);
    assert_eq!(sqrt.eval(-1).unwrap(), int(-2));
}

#[test]
fn grid_examples() {
    let id = Oracle::identity(2).unwrap();
    let grid = build_grid(&id, 2).unwrap();
    for k in -16..=16 {
        assert_eq!(grid.x(k), k);
    }
    for k in -2..=2 {
        assert_eq!(grid.y(k), 8 * k);
        assert_eq!(grid.f_value(k), &int(8 * k));
    }
    let double =
        Oracle::with_constant(Family::Pl(PlMap::affine(int(2), int(0)).unwrap()), 2).unwrap();
    let grid = build_grid(&double, 2).unwrap();
    for k in -2..=2 {
        assert_eq!(grid.y(k), 8 * k);
        assert_eq!(grid.f_value(k), &int(16 * k));
    }
}

#[test]
fn approximation_examples() {
    let id = Oracle::identity(2).unwrap();
    assert!(pl_approximate(&id, 4).unwrap().is_identity());
    let double =
        Oracle::with_constant(Family::Pl(PlMap::affine(int(2), int(0)).unwrap()), 2).unwrap();
    let a = approximate(&double, 4).unwrap();
    assert_eq!(a.map, PlMap::affine(int(2), int(0)).unwrap());
    assert_eq!(agreement_report(&double, &a.map, &a.grid).unwrap(), int(0));
    let sqrt = Oracle::new(Family::SqrtDrift).unwrap();
    let a = approximate(&sqrt, 50).unwrap();
    let window = slope_window(2);
    assert_eq!(
        window,
        qiline::Interval::new(ratio(1, 4), ratio(9, 4)).unwrap()
    );
    assert!(a.map.slope_set().iter().all(|s| window.contains(s)));
    let sup = agreement_report(&sqrt, &a.map, &a.grid).unwrap();
    assert!(sup <= int(516), "{sup}");
    assert_eq!(agreement_bound(2), int(516));
}

#[test]
fn determinism() {
    for family in families() {
        let oracle = Oracle::new(family).unwrap();
        let a = approximate(&oracle, 6).unwrap();
        let b = approximate(&oracle, 6).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn table_oracle_reports_missing_integer() {
    let table: BTreeMap<i64, Rational> = (-3..=3).map(|k| (k, int(k))).collect();
    let oracle = Oracle::with_constant(Family::Table(table), 2).unwrap();
    match build_grid(&oracle, 1) {
        Err(ApproxError::Oracle(OracleError::Missing(n))) => assert_eq!(n, 4),
        other => panic!("unexpected {other:?}"),
    }
}

struct Flat;

impl QiOracle for Flat {
    fn eval(&self, _: i64) -> Result<Rational, OracleError> {
        Ok(int(0))
    }
    fn constant(&self) -> u32 {
        2
    }
}

#[test]
fn scan_cap_rejects_contract_violations() {
    match monotone_witness_up(&Flat, 5) {
        Err(ApproxError::ScanExceeded {
            from,
            direction,
            limit,
            first,
            last,
        }) => {
            assert_eq!(
                (from, direction, limit, first, last),
                (5, Direction::Up, 16, 6, 21)
            );
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        monotone_witness_down(&Flat, 0),
        Err(ApproxError::ScanExceeded {
            direction: Direction::Down,
            ..
        })
    ));
}

#[test]
fn constants_below_the_family_minimum_are_rejected() {
    assert!(matches!(
        Oracle::with_constant(Family::BlockSwap, 2),
        Err(ApproxError::ConstantTooSmall {
            given: 2,
            minimum: 3
        })
    ));
    assert!(matches!(
        Oracle::with_constant(Family::Pl(PlMap::negation()), 2),
        Err(ApproxError::OrientationReversing)
    ));
    assert!(matches!(
        Oracle::with_constant(Family::Pl(PlMap::affine(int(3), int(0)).unwrap()), 2),
        Err(ApproxError::ConstantTooSmall { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_pl_oracles(f in oracle_pl_map(), n in 1u32..=6) {
        let oracle = Oracle::new(Family::Pl(f)).unwrap();
        let c = oracle.constant();
        let a = approximate(&oracle, n).unwrap();
        prop_assert!(a.grid.check().is_ok());
        prop_assert!(a.grid.max_step() <= 4 * (c as u64).pow(2));
        let window = slope_window(c);
        prop_assert!(a.map.slope_set().iter().all(|s| window.contains(s)));
        for (_, y, fy) in a.grid.nodes() {
            prop_assert_eq!(&a.map.evaluate(&int(y)), fy);
        }
        prop_assert!(agreement_report(&oracle, &a.map, &a.grid).unwrap() <= agreement_bound(c));
    }
}
