use hardy_moments::divisor::{
    build_divisor_table, cache_path, d3_bruteforce, load_or_build, DivisorTable,
};
use hardy_moments::ComplexValue;
use proptest::prelude::*;
use std::sync::OnceLock;

fn table() -> &'static DivisorTable {
    static T: OnceLock<DivisorTable> = OnceLock::new();
    T.get_or_init(|| build_divisor_table(100_000).unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn small_values() {
    let t = table();
    assert_eq!((t.d(1).unwrap(), t.d3(1).unwrap()), (1, 1));
    for p in [2, 3, 5, 7] {
        assert_eq!(t.d3(p).unwrap(), 3);
    }
    assert_eq!(t.d3(4).unwrap(), 6);
    assert_eq!(t.d3(6).unwrap(), 9);
    assert_eq!(t.d3(8).unwrap(), 10);
    assert_eq!(t.d3(9).unwrap(), 6);
    assert_eq!(t.sum_d3_squared(1).unwrap(), 1);
    assert_eq!(t.sum_d3_squared(10).unwrap(), 371);
}

#[test]
fn sieve_matches_brute_force() {
    let t = table();
    for n in 1..=10_000 {
        assert_eq!(
            u64::from(t.d3(n).unwrap()),
            d3_bruteforce(n).unwrap(),
            "n={n}"
        );
    }
}

#[test]
fn reference_sums() {
    // numpy sieve
    let t = table();
    let sum_d3 = |x: usize| {
        t.d3_slice()[1..=x]
            .iter()
            .map(|&v| u64::from(v))
            .sum::<u64>()
    };
    assert_eq!(sum_d3(1000), 29_425);
    assert_eq!(sum_d3(100_000), 7_518_850);
    assert_eq!(t.sum_d3_squared(100_000).unwrap(), 2_693_126_152);
}

#[test]
fn hyperbola_identity() {
    // sum_{n<=x} d3(n) = sum_{k<=x} D(x/k), D(y) = sum_{j<=y} floor(y/j)
    let t = table();
    let big_d = |y: u64| (1..=y).map(|j| y / j).sum::<u64>();
    let mut running = 0u64;
    for x in 1..=10_000u64 {
        running += u64::from(t.d3(x).unwrap());
        if x % 97 == 0 || x == 10_000 {
            let hyper: u64 = (1..=x).map(|k| big_d(x / k)).sum();
            assert_eq!(running, hyper, "x={x}");
        }
    }
}

#[test]
fn h_special_cases() {
    let t = table();
    for u in [0.0, 0.3, 5.0, 40.0] {
        assert!((t.h_shift(1, u).unwrap().value - 1.0).norm() < 1e-15);
        let want = 2.0 + ComplexValue::from_polar(1.0, -u * 2f64.ln());
        assert!((t.h_shift(2, u).unwrap().value - want).norm() < 1e-14);
    }
    for n in 1..=1000 {
        let h = t.h_shift(n, 0.0).unwrap().value;
        assert_eq!(h, ComplexValue::new(f64::from(t.d3(n).unwrap()), 0.0));
    }
}

#[test]
fn h_is_multiplicative() {
    let t = table();
    for u in [0.0, 0.7, 3.2] {
        for m in 1..=10_000u64 {
            for n in (m + 1)..=10_000 / m {
                if gcd(m, n) != 1 {
                    continue;
                }
                let lhs = t.h_shift(m * n, u).unwrap().value;
                let rhs = t.h_shift(m, u).unwrap().value * t.h_shift(n, u).unwrap().value;
                assert!(
                    (lhs - rhs).norm() <= 1e-10 * f64::from(t.d3(m * n).unwrap()),
                    "m={m} n={n} U={u}"
                );
            }
        }
    }
}

#[test]
fn h_triangle_bound() {
    let t = table();
    for u in [0.0, 1.0, 10.0] {
        for n in 1..=10_000 {
            assert!(t.h_shift(n, u).unwrap().value.norm() <= f64::from(t.d3(n).unwrap()) + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn h_bounded_for_any_shift(n in 1u64..100_000, u in -50.0f64..50.0) {
        let t = table();
        prop_assert!(t.h_shift(n, u).unwrap().value.norm() <= f64::from(t.d3(n).unwrap()) + 1e-9);
    }

    #[test]
    fn divisor_counts_sum_to_d3(n in 1u64..100_000) {
        let t = table();
        let total: u64 = t.divisors_with_counts(n).unwrap().iter().map(|&(_, c)| u64::from(c)).sum();
        prop_assert_eq!(total, u64::from(t.d3(n).unwrap()));
    }
}

#[test]
fn ratio_diagnostic_values() {
    let t = build_divisor_table(1_000_000).unwrap();
    assert_eq!(t.sum_d3_squared(1_000_000).unwrap(), 71_081_856_064);
    let r5 = t.d3_squared_ratio(100_000).unwrap();
    let r6 = t.d3_squared_ratio(1_000_000).unwrap();
    assert!((r5 - 2_693_126_152.0 / (1e5 * 1e5f64.ln().powi(8))).abs() < 1e-18);
    assert!(r6 < r5);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let built = load_or_build(5000, dir.path()).unwrap();
    assert!(cache_path(dir.path(), 5000).exists());
    let loaded = load_or_build(5000, dir.path()).unwrap();
    assert_eq!(built, loaded);
    std::fs::write(cache_path(dir.path(), 5000), b"not a sieve").unwrap();
    assert!(DivisorTable::load(&cache_path(dir.path(), 5000)).is_err());
    assert_eq!(load_or_build(5000, dir.path()).unwrap(), built);
}
