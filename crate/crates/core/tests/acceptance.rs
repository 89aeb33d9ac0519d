//! Acceptance criteria 1-8 at full level. Each test writes one verdict line
//! (plus its measurements) straight to stderr so it shows without
//! `--nocapture`.

use hardy_moments::divisor::{build_divisor_table, DivisorTable};
use hardy_moments::suite::{self, Calibration, CriterionReport, Level, SUITE_TABLE_BOUND};
use std::io::Write;
use std::sync::OnceLock;

fn table() -> &'static DivisorTable {
    static T: OnceLock<DivisorTable> = OnceLock::new();
    T.get_or_init(|| build_divisor_table(SUITE_TABLE_BOUND).unwrap())
}

fn report(r: CriterionReport) {
    let mut text = format!("{}\n", r.line());
    for d in &r.details {
        text.push_str(&format!("    {d}\n"));
    }
    let _ = std::io::stderr().lock().write_all(text.as_bytes());
    assert!(r.passed || r.informational, "{}", r.line());
}

#[test]
fn criterion_1_cubic_formula() {
    report(suite::criterion_1(
        Level::Full,
        &Calibration::default(),
        table(),
    ));
}

#[test]
fn criterion_2_shifted_formula() {
    report(suite::criterion_2(
        Level::Full,
        &Calibration::default(),
        table(),
    ));
}

#[test]
fn criterion_3_saddle_kernel() {
    report(suite::criterion_3(Level::Full));
}

#[test]
fn criterion_4_divisor_layer() {
    report(suite::criterion_4(Level::Full, table()));
}

#[test]
fn criterion_5_mean_square() {
    report(suite::criterion_5(
        Level::Full,
        &Calibration::default(),
        table(),
    ));
}

#[test]
fn criterion_6_moment_sanity() {
    report(suite::criterion_6(Level::Full, &Calibration::default()));
}

#[test]
fn criterion_7_zeta_core() {
    report(suite::criterion_7(Level::Full));
}

#[test]
fn criterion_8_shifted_second_moment() {
    report(suite::criterion_8(Level::Full));
}
