use hardy_moments::quadrature::{
    integrate_moment, integrate_range, integrate_range_with, zero_spacing, MomentKind, PanelRule,
    QuadratureSpec, ZSource,
};
use hardy_moments::zeta::z_value;

const ALL_KINDS: [MomentKind; 6] = [
    MomentKind::M1,
    MomentKind::M2Shift,
    MomentKind::M3Shift,
    MomentKind::M3Conj,
    MomentKind::M4,
    MomentKind::AbsCube,
];

#[test]
fn empty_range_is_zero() {
    let spec = QuadratureSpec::default();
    for kind in ALL_KINDS {
        for x in [0.0, 123.0, 5000.0] {
            let r = integrate_range(kind, 1.0, &spec.with_range(x, x)).unwrap();
            assert_eq!((r.value, r.est_error), (0.0, 0.0));
        }
    }
}

#[test]
fn additivity() {
    let spec = QuadratureSpec::default();
    let whole = integrate_range(MomentKind::M3Shift, 1.0, &spec.with_range(500.0, 1000.0)).unwrap();
    let left = integrate_range(MomentKind::M3Shift, 1.0, &spec.with_range(500.0, 750.0)).unwrap();
    let right = integrate_range(MomentKind::M3Shift, 1.0, &spec.with_range(750.0, 1000.0)).unwrap();
    let gap = (left.value + right.value - whole.value).abs();
    assert!(
        gap <= left.est_error + right.est_error + whole.est_error,
        "gap {gap:e}"
    );
}

#[test]
fn dense_simpson_oracle() {
    // Fixed-step composite Simpson at four times the default density.
    let (a, b) = (500.0, 1000.0);
    let h_max = zero_spacing(b) / (4.0 * 12.0);
    let mut m = ((b - a) / h_max).ceil() as usize;
    m += m % 2;
    let h = (b - a) / m as f64;
    let f = |t: f64| z_value(t).unwrap().powi(3);
    let mut s = f(a) + f(b);
    for j in 1..m {
        s += if j % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * j as f64);
    }
    let oracle = s * h / 3.0;
    let got =
        integrate_moment(MomentKind::M3Shift, 1000.0, 0.0, &QuadratureSpec::default()).unwrap();
    assert!(
        (got.value - oracle).abs() <= 1e-4 * oracle.abs(),
        "{} vs {oracle}",
        got.value
    );
}

#[test]
fn evenness_of_the_cube() {
    let spec = QuadratureSpec::default();
    let full = integrate_range(MomentKind::M3Shift, 0.0, &spec.with_range(-500.0, 500.0)).unwrap();
    let half = integrate_range(MomentKind::M3Shift, 0.0, &spec.with_range(0.0, 500.0)).unwrap();
    assert!((full.value - 2.0 * half.value).abs() <= 1e-8 * full.value.abs());
}

#[test]
fn refinement_converges() {
    for (t, u) in [(1000.0, 0.0), (2000.0, 2.0), (4000.0, 4000f64.powf(0.3))] {
        let base = integrate_moment(MomentKind::M3Shift, t, u, &QuadratureSpec::default()).unwrap();
        let spec = QuadratureSpec {
            points_per_oscillation: 24,
            ..QuadratureSpec::default()
        };
        let finer = integrate_moment(MomentKind::M3Shift, t, u, &spec).unwrap();
        assert!(
            (base.value - finer.value).abs() <= base.est_error,
            "T={t} U={u}"
        );
    }
}

#[test]
fn panel_rules_agree() {
    let gl = QuadratureSpec::default().with_range(1000.0, 1300.0);
    let simpson = QuadratureSpec {
        panel_rule: PanelRule::AdaptiveSimpson,
        ..gl
    };
    let a = integrate_range(MomentKind::M2Shift, 0.3, &gl).unwrap();
    let b = integrate_range(MomentKind::M2Shift, 0.3, &simpson).unwrap();
    assert!((a.value - b.value).abs() <= 1e-7 * a.value.abs());
}

#[test]
fn fast_path_agrees_with_the_oracle_source() {
    let spec = QuadratureSpec::default().with_range(1000.0, 1010.0);
    let fast = integrate_range_with(MomentKind::M3Shift, 1.5, &spec, ZSource::Fast).unwrap();
    let slow = integrate_range_with(MomentKind::M3Shift, 1.5, &spec, ZSource::Oracle).unwrap();
    assert!((fast.value - slow.value).abs() <= 1e-6 * slow.value.abs().max(1.0));
}

#[test]
fn first_moment_bounded_with_sign_change() {
    let spec = QuadratureSpec::default();
    let vals: Vec<f64> = [1000.0, 10_000.0, 100_000.0]
        .iter()
        .map(|&t| {
            integrate_moment(MomentKind::M1, t, 0.0, &spec)
                .unwrap()
                .normalized
                .unwrap()
        })
        .collect();
    assert!(vals.iter().all(|v| v.abs() <= 5.0), "{vals:?}");
    assert!(
        vals.iter().any(|v| *v > 0.0) && vals.iter().any(|v| *v < 0.0),
        "{vals:?}"
    );
}

#[test]
fn fourth_moment_ratio() {
    let spec = QuadratureSpec::default();
    let ratio = |t: f64| {
        integrate_moment(MomentKind::M4, t, 0.0, &spec)
            .unwrap()
            .normalized
            .unwrap()
    };
    let grid: Vec<f64> = [1000.0, 5000.0, 20_000.0]
        .iter()
        .map(|&t| ratio(t))
        .collect();
    for r in &grid {
        assert!((0.7..=1.3).contains(r), "{grid:?}");
    }
    // The ratio peaks near 2e4; the approach to 1 shows at 1e5.
    let far = ratio(100_000.0);
    assert!(
        (far - 1.0).abs() < (grid[2] - 1.0).abs(),
        "{grid:?} then {far}"
    );
}

#[test]
fn abs_cube_ratio_slowly_varying() {
    let spec = QuadratureSpec::default();
    let r: Vec<f64> = [1000.0, 5000.0, 20_000.0]
        .iter()
        .map(|&t| {
            integrate_moment(MomentKind::AbsCube, t, 0.0, &spec)
                .unwrap()
                .normalized
                .unwrap()
        })
        .collect();
    let (lo, hi) = r
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(lo > 0.0 && hi <= 1.25 * lo, "{r:?}");
}

#[test]
fn arguments_are_checked() {
    let spec = QuadratureSpec::default();
    assert!(integrate_moment(MomentKind::M3Shift, 50.0, 0.0, &spec).is_err());
    assert!(integrate_moment(MomentKind::M3Shift, 1000.0, 40.0, &spec).is_err());
    assert!(integrate_moment(MomentKind::M3Shift, 1000.0, f64::NAN, &spec).is_err());
    assert!(integrate_range(MomentKind::M1, 0.0, &spec.with_range(10.0, 5.0)).is_err());
    let coarse = QuadratureSpec {
        points_per_oscillation: 4,
        ..spec
    };
    assert!(integrate_moment(MomentKind::M1, 1000.0, 0.0, &coarse).is_err());
}
