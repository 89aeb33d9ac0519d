use hardy_moments::divisor::{build_divisor_table, DivisorTable};
use hardy_moments::expsum::{
    exp_sum_d3, exp_sum_plain, expsum_scan, find_good_point, good_point_bound, mean_square_exact,
    mean_square_kernel, mean_square_lower_bound, ms_from_samples, ms_quad, quadrature_intervals,
    ratio_scale, sample_grid, ExpSumKernel, MsRule,
};
use hardy_moments::ComplexValue;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn table() -> &'static DivisorTable {
    static T: OnceLock<DivisorTable> = OnceLock::new();
    T.get_or_init(|| build_divisor_table(200_000).unwrap())
}

#[test]
fn zero_frequency_counts_coefficients() {
    let t = table();
    let want: u64 = t.d3_slice()[1001..=2000]
        .iter()
        .map(|&v| u64::from(v))
        .sum();
    assert_eq!(
        exp_sum_d3(0.0, 1000, 2000, t).unwrap(),
        ComplexValue::new(want as f64, 0.0)
    );
    assert_eq!(
        exp_sum_plain(0.0, 1000, 1800).unwrap().value,
        ComplexValue::new(800.0, 0.0)
    );
}

#[test]
fn two_term_expansion() {
    for alpha in [0.3, 1.0, 7.5] {
        let want = 3.0 * ComplexValue::from_polar(1.0, alpha * 3f64.powf(2.0 / 3.0))
            + 6.0 * ComplexValue::from_polar(1.0, alpha * 4f64.powf(2.0 / 3.0));
        let got = exp_sum_d3(alpha, 2, 4, table()).unwrap();
        assert!(
            (got - want).norm() < 1e-13,
            "{got} vs {want}: {:e}",
            (got - want).norm()
        );
    }
}

#[test]
fn triangle_and_conjugation() {
    let t = table();
    let total: f64 = t.d3_slice()[10_001..=20_000]
        .iter()
        .map(|&v| f64::from(v))
        .sum();
    for alpha in [0.5, 3.0 * PI] {
        assert!(exp_sum_d3(alpha, 10_000, 20_000, t).unwrap().norm() <= total);
        let p = exp_sum_plain(alpha, 10_000, 20_000).unwrap().value;
        let m = exp_sum_plain(-alpha, 10_000, 20_000).unwrap().value;
        assert!((p - m.conj()).norm() < 1e-9);
    }
    let plain = exp_sum_plain(3.0 * PI, 10_000, 20_000).unwrap();
    assert!(plain.normalized.unwrap() <= 50.0);
}

#[test]
fn mean_square_edge_cases() {
    let t = table();
    assert_eq!(mean_square_exact(2.0, 2.0, 1000, t).unwrap(), 0.0);
    let k = ExpSumKernel::d3(359, 360, t).unwrap();
    let d = f64::from(t.d3(360).unwrap());
    assert!((mean_square_kernel(1.0, 4.0, &k).unwrap() - 3.0 * d * d).abs() < 1e-9);
}

#[test]
fn mean_square_against_sampled_quadrature() {
    let t = table();
    for n in [1000, 10_000] {
        let exact = mean_square_exact(1.0, 4.0, n, t).unwrap();
        let quad = ms_quad(1.0, 4.0, n, MsRule::Simpson, t).unwrap();
        assert!((exact - quad).abs() <= 1e-6 * exact, "N={n}");
        assert!(exact >= mean_square_lower_bound(1.0, 4.0, n, t).unwrap());
        assert!(exact >= 0.0);
    }
}

#[test]
fn trapezoid_converges_to_the_closed_form() {
    // Second order: doubling the sample count cuts the error by about four.
    let t = table();
    let k = ExpSumKernel::d3(1000, 2000, t).unwrap();
    let exact = mean_square_kernel(1.0, 4.0, &k).unwrap();
    let m = quadrature_intervals(1.0, 4.0, 1000);
    let err = |m: usize| {
        (ms_from_samples(&sample_grid(1.0, 4.0, m, &k), MsRule::Trapezoid) - exact).abs() / exact
    };
    let (e1, e2, e4) = (err(m), err(2 * m), err(4 * m));
    assert!(e1 < 1e-3, "{e1:e}");
    assert!(
        (3.0..5.0).contains(&(e1 / e2)) && (3.0..5.0).contains(&(e2 / e4)),
        "{e1:e} {e2:e} {e4:e}"
    );
}

#[test]
fn scan_is_self_consistent() {
    let t = table();
    let scan = expsum_scan(1.0, 4.0, 1000, true, t).unwrap();
    assert_eq!(ms_from_samples(&scan.grid, scan.rule), scan.ms_quad);
    let min_sq = scan
        .grid
        .iter()
        .map(|(_, s)| s.norm_sqr())
        .fold(f64::MAX, f64::min);
    assert!(scan.ms_exact / 3.0 >= min_sq);
    let (c, v) = scan.good_point.unwrap();
    assert!((1.0..=4.0).contains(&c) && v <= good_point_bound(1000));
    assert!((exp_sum_d3(c, 1000, 2000, t).unwrap().norm() - v).abs() < 1e-9 * v.max(1.0));
    let header_fields = hardy_moments::expsum::ExpSumScan::CSV_HEADER
        .split(',')
        .count();
    assert!(scan
        .csv_rows()
        .all(|r| r.split(',').count() == header_fields));
}

#[test]
fn good_points() {
    let t = table();
    let bound = 100.0 * 1000f64.ln().powf(4.5);
    assert!((good_point_bound(1000) - bound).abs() < 1e-9 * bound);
    for n in [1000, 10_000] {
        let (_, v) = find_good_point(1.0, 4.0, n, t).unwrap();
        assert!(v <= good_point_bound(n));
    }
    let (c, v) = find_good_point(1.0, 1.1, 1000, t).unwrap();
    assert!((1.0..=1.1).contains(&c) && v <= good_point_bound(1000));
}

#[test]
fn mean_square_ratio_across_three_sizes() {
    let t = table();
    let ratios: Vec<f64> = [1000, 10_000, 100_000]
        .iter()
        .map(|&n| mean_square_exact(1.0, 4.0, n, t).unwrap() / ratio_scale(n))
        .collect();
    assert!(ratios.iter().all(|&r| r <= 1.0), "{ratios:?}");
}
