use std::path::Path;
use std::process::{Command, Output};

fn hardy(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .env("HARDY_CACHE_DIR", cache)
        .env("HARDY_THREADS", "2")
        .output()
        .expect("run hardy")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn saddle_at_n_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = hardy(dir.path(), &["saddle", "--n", "1", "--u", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("t_n = 6.283185307"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn sieve_squares_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sieve.csv");
    let o = hardy(
        dir.path(),
        &["sieve", "--n", "10", "--csv", csv.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "d3_sq").unwrap();
    let total: u64 = lines
        .map(|l| l.split(',').nth(col).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 371);
    assert!(dir.path().join("sieve.csv.manifest.json").exists());
}

#[test]
fn compare_writes_a_deterministic_row() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = hardy(
            dir.path(),
            &[
                "compare",
                "--t",
                "2000",
                "--u",
                "0",
                "--csv",
                p.to_str().unwrap(),
            ],
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[7].parse::<f64>().unwrap() <= 5.0);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "compare");
    assert_eq!(manifest["parameters"]["t"], 2000.0);
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["calibration_constants"]["cubic_normalized"], 5.0);
}

#[test]
fn failed_check_exits_one_with_marker() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.json");
    std::fs::write(
        &cal,
        r#"{"constants":{"cubic_normalized":0.001,"cubic_im_leak":5}}"#,
    )
    .unwrap();
    let csv = dir.path().join("c.csv");
    let o = hardy(
        dir.path(),
        &[
            "compare",
            "--t",
            "1000",
            "--u",
            "0",
            "--calibration",
            cal.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().last().unwrap().starts_with("# FAILED"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["z-eval"],
        &["z-eval", "--t", "abc"],
        &["moment", "--kind", "m7", "--t", "1000"],
        &["saddle", "--n", "0", "--u", "1"],
        &["z-eval", "--t", "10", "--method", "rs"],
        &["suite", "--level", "smoke", "--calibrate"],
    ] {
        assert_eq!(hardy(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(hardy(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn z_eval_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("z.json");
    let o = hardy(
        dir.path(),
        &[
            "z-eval",
            "--t",
            "1000",
            "--method",
            "oracle",
            "--json",
            json.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!((v["z"].as_f64().unwrap() - 0.99779463752158661399).abs() < 1e-14);
}

#[test]
fn msq_and_expsum() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let json = dir.path().join("scan.json");
    let o = hardy(
        dir.path(),
        &[
            "msq",
            "--n",
            "1000",
            "--a",
            "1",
            "--b",
            "4",
            "--find-point",
            "--csv",
            csv.to_str().unwrap(),
            "--json",
            json.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap().lines().count(),
        1 + 1201
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["abs_S_at_C"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
    let o = hardy(
        dir.path(),
        &["expsum", "--n", "10000", "--alpha", "9.42477796076938"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("|T| |alpha| / N^(1/3)"));
}
