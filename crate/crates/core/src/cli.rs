//! The `hardy` command line.
//!
//! Exit codes: 0 on success, 1 when a run fails a check or a tolerance,
//! 2 on a usage error.

use crate::divisor::{build_divisor_table, cache_dir, load_or_build, DivisorTable};
use crate::error::{Error, Result};
use crate::explicit::{compare_cubic_moment, MomentComparison, Variant};
use crate::expsum::{exp_sum_d3, exp_sum_plain, expsum_scan, ExpSumScan};
use crate::quadrature::{integrate_moment, MomentKind, MomentResult, PanelRule, QuadratureSpec};
use crate::report::{fmt_f64, write_json, CsvSink, RunManifest, FAILURE_MARKER};
use crate::saddle::{
    formula_term, formula_term_conjugate, solve_saddle, solve_saddle_conjugate, summation_range,
};
use crate::suite::{
    run_suite, Calibration, CriterionReport, Level, CAL_CUBIC_IM_LEAK, CAL_CUBIC_NORMALIZED,
    SUITE_TABLE_BOUND,
};
use crate::zeta::{hardy_z, hardy_z_oracle, ZMethod};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hardy",
    version,
    about = "Shifted cubic moments of Hardy's Z-function"
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write results as CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write results as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate Z(t).
    ZEval {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// rs or oracle
        #[arg(long, default_value = "rs")]
        method: ZMethod,
        /// Working precision of the oracle.
        #[arg(long, default_value_t = crate::zeta::ORACLE_DEFAULT_DIGITS)]
        digits: u32,
    },
    /// Build (or load from the cache) the d3 sieve up to n.
    Sieve {
        #[arg(long)]
        n: u64,
        /// Also write the binary sieve file here.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
    /// Solve for the saddle point t_n and assemble the formula term.
    Saddle {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        u: f64,
        /// Use t (t+U)^2 = 8 pi^3 n^2.
        #[arg(long)]
        conjugate: bool,
    },
    /// Integrate a moment of Z over its canonical range.
    Moment {
        /// m1, m2shift, m3shift, m3conj, m4 or abs3
        #[arg(long)]
        kind: MomentKind,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        u: f64,
        #[arg(long, value_enum, default_value_t = RuleArg::Gl16)]
        rule: RuleArg,
        /// Points per local zero spacing.
        #[arg(long, default_value_t = 12)]
        ppo: u32,
    },
    /// Compare the integrated cubic moment with the explicit sum.
    Compare {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        u: f64,
        /// exact or thm1
        #[arg(long, default_value = "exact")]
        variant: Variant,
        /// Compare int Z(t) Z^2(t+U) instead.
        #[arg(long)]
        conjugate: bool,
        #[arg(long, value_name = "PATH")]
        calibration: Option<PathBuf>,
    },
    /// Evaluate S(alpha, N) over N < n <= N'.
    Expsum {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Upper end N', default 2N.
        #[arg(long)]
        n_prime: Option<u64>,
    },
    /// Mean square of S(alpha, N) over [A, B], closed form and sampled.
    Msq {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Also locate C in [A, B] with small |S(C, N)|.
        #[arg(long)]
        find_point: bool,
    },
    /// Run the acceptance grid.
    Suite {
        #[arg(long, value_enum, default_value_t = LevelArg::Smoke)]
        level: LevelArg,
        /// Write calibration constants from this run (full level only).
        #[arg(long)]
        calibrate: bool,
        #[arg(long, value_name = "PATH")]
        calibration: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Gl16,
    Simpson,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Smoke,
    Full,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Smoke => Level::Smoke,
            LevelArg::Full => Level::Full,
        }
    }
}

/// How a command ended when it did not return an error.
enum Outcome {
    Ok,
    Failed(String),
}

/// Parse `args`, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let mut manifest = RunManifest::new(command_name(&cli.command));
    manifest.outputs.extend(cli.output.csv.iter().cloned());
    manifest.outputs.extend(cli.output.json.iter().cloned());
    let result = dispatch(&cli, &mut manifest);
    let (code, status) = match &result {
        Ok(Outcome::Ok) => (EXIT_OK, "ok".to_string()),
        Ok(Outcome::Failed(why)) => {
            eprintln!("check failed: {why}");
            (EXIT_FAILED, format!("failed: {why}"))
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(p) = &cli.output.csv {
                let _ = append_marker(p, &e.to_string());
            }
            (exit_code(e), format!("error: {e}"))
        }
    };
    manifest.outputs.retain(|p| p.exists());
    if let Err(e) = manifest.finish(&status) {
        eprintln!("error: could not write manifest: {e}");
        return code.max(EXIT_FAILED);
    }
    code
}

/// Exit code for a library error: bad input is a usage error, everything
/// else a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFinite(_)
        | Error::Domain(_)
        | Error::OutOfRange { .. }
        | Error::MethodRange { .. } => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("HARDY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("HARDY_THREADS={v:?} is not a thread count"))?;
    if n == 0 {
        return Err("HARDY_THREADS must be positive".into());
    }
    // A second call in the same process fails harmlessly.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn append_marker(path: &Path, reason: &str) -> Result<()> {
    let text = std::fs::read_to_string(path).unwrap_or_default();
    if text
        .lines()
        .last()
        .is_some_and(|l| l.starts_with(FAILURE_MARKER))
    {
        return Ok(());
    }
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    writeln!(f, "{FAILURE_MARKER}: {}", reason.replace(['\n', '\r'], " "))?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::ZEval { .. } => "z-eval",
        Command::Sieve { .. } => "sieve",
        Command::Saddle { .. } => "saddle",
        Command::Moment { .. } => "moment",
        Command::Compare { .. } => "compare",
        Command::Expsum { .. } => "expsum",
        Command::Msq { .. } => "msq",
        Command::Suite { .. } => "suite",
    }
}

fn calibration_path(explicit: &Option<PathBuf>) -> PathBuf {
    explicit
        .clone()
        .unwrap_or_else(|| cache_dir().join("calibration.json"))
}

fn write_single_csv(out: &OutputArgs, header: &str, row: &str) -> Result<()> {
    if let Some(p) = &out.csv {
        let mut sink = CsvSink::create(p, header)?;
        sink.row(row)?;
    }
    Ok(())
}

fn write_opt_json(out: &OutputArgs, value: &impl serde::Serialize) -> Result<()> {
    match &out.json {
        Some(p) => write_json(p, value),
        None => Ok(()),
    }
}

/// Table covering `bound`, from the cache when one is configured.
fn table_for(bound: u64) -> Result<DivisorTable> {
    if std::env::var_os("HARDY_CACHE_DIR").is_some() {
        load_or_build(bound, &cache_dir())
    } else {
        build_divisor_table(bound)
    }
}

fn dispatch(cli: &Cli, m: &mut RunManifest) -> Result<Outcome> {
    let out = &cli.output;
    match &cli.command {
        &Command::ZEval { t, method, digits } => {
            m.param("t", t);
            m.param("method", method);
            m.param("digits", digits);
            let ev = match method {
                ZMethod::Oracle => hardy_z_oracle(t, digits)?,
                ZMethod::RiemannSiegel => hardy_z(t, method)?,
            };
            println!("Z({t}) = {}", fmt_f64(ev.z));
            println!(
                "method {:?}, est_error {:.3e}, imaginary residue {:.3e}",
                ev.method, ev.est_error, ev.imag_residue
            );
            write_single_csv(
                out,
                "t,z,method,est_error,imag_residue",
                &format!(
                    "{},{},{:?},{},{}",
                    fmt_f64(t),
                    fmt_f64(ev.z),
                    ev.method,
                    fmt_f64(ev.est_error),
                    fmt_f64(ev.imag_residue)
                ),
            )?;
            write_opt_json(out, &ev)?;
            Ok(Outcome::Ok)
        }
        Command::Sieve { n, dump } => {
            let n = *n;
            m.param("n", n);
            m.param("dump", dump);
            let table = if n >= 1 {
                table_for(n)?
            } else {
                build_divisor_table(n)?
            };
            let sum = table.sum_d3_squared(n)?;
            let ratio = if n >= 2 {
                Some(table.d3_squared_ratio(n)?)
            } else {
                None
            };
            println!("bound {n}");
            println!("sum_(n<=x) d3(n)^2 = {sum}");
            if let Some(r) = ratio {
                println!("sum / (x log^8 x) = {r:.10e}");
            }
            if let Some(p) = &out.csv {
                let mut sink = CsvSink::create(p, "n,d,d3,d3_sq,d3sq_prefix")?;
                for k in 1..=n as usize {
                    let d3 = u64::from(table.d3_slice()[k]);
                    sink.row(&format!(
                        "{k},{},{d3},{},{}",
                        table.d_slice()[k],
                        d3 * d3,
                        table.d3sq_prefix()[k]
                    ))?;
                }
            }
            if let Some(p) = dump {
                table.save(p)?;
                m.outputs.push(p.clone());
            }
            write_opt_json(
                out,
                &serde_json::json!({ "bound": n, "sum_d3_squared": sum, "ratio": ratio }),
            )?;
            Ok(Outcome::Ok)
        }
        &Command::Saddle { n, u, conjugate } => {
            m.param("n", n);
            m.param("u", u);
            m.param("conjugate", conjugate);
            let sp = if conjugate {
                solve_saddle_conjugate(n, u)?
            } else {
                solve_saddle(n, u)?
            };
            let table = build_divisor_table(n)?;
            let term = if conjugate {
                formula_term_conjugate(n, u, &table)?
            } else {
                formula_term(n, u, &table)?
            };
            let errs = sp.approximant_errors();
            println!("t_n = {:.17e}", sp.t_n);
            println!(
                "residual {:.3e} after {} iterations",
                sp.residual, sp.iterations
            );
            for (k, (a, e)) in [sp.approx1, sp.approx2, sp.approx3]
                .iter()
                .zip(errs)
                .enumerate()
            {
                println!("approximation {}: {:.17e}  error {:.3e}", k + 1, a, e);
            }
            println!(
                "coefficient {:.10e} {:+.10e}i",
                term.coefficient.re, term.coefficient.im
            );
            println!(
                "exact       {:.10e} {:+.10e}i",
                term.exact_term.re, term.exact_term.im
            );
            println!(
                "leading     {:.10e} {:+.10e}i",
                term.leading_term.re, term.leading_term.im
            );
            write_single_csv(
                out,
                "n,U,t_n,residual,approx1,approx2,approx3,err1,err2,err3",
                &format!(
                    "{n},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(u),
                    fmt_f64(sp.t_n),
                    fmt_f64(sp.residual),
                    fmt_f64(sp.approx1),
                    fmt_f64(sp.approx2),
                    fmt_f64(sp.approx3),
                    fmt_f64(errs[0]),
                    fmt_f64(errs[1]),
                    fmt_f64(errs[2])
                ),
            )?;
            write_opt_json(out, &serde_json::json!({ "saddle": sp, "term": term }))?;
            Ok(Outcome::Ok)
        }
        &Command::Moment {
            kind,
            t,
            u,
            rule,
            ppo,
        } => {
            m.param("kind", kind);
            m.param("t", t);
            m.param("u", u);
            m.param("ppo", ppo);
            let spec = QuadratureSpec {
                points_per_oscillation: ppo,
                panel_rule: match rule {
                    RuleArg::Gl16 => PanelRule::GaussLegendre16,
                    RuleArg::Simpson => PanelRule::AdaptiveSimpson,
                },
                ..QuadratureSpec::default()
            };
            m.param("quadrature", spec);
            let r = integrate_moment(kind, t, u, &spec)?;
            print_moment(&r);
            write_single_csv(
                out,
                "kind,T,U,value,est_error,normalized,evaluations",
                &format!(
                    "{},{},{},{},{},{},{}",
                    kind.name(),
                    fmt_f64(t),
                    fmt_f64(u),
                    fmt_f64(r.value),
                    fmt_f64(r.est_error),
                    r.normalized.map(fmt_f64).unwrap_or_default(),
                    r.evaluations
                ),
            )?;
            write_opt_json(out, &r)?;
            Ok(Outcome::Ok)
        }
        Command::Compare {
            t,
            u,
            variant,
            conjugate,
            calibration,
        } => {
            let (t, u) = (*t, *u);
            m.param("t", t);
            m.param("u", u);
            m.param("variant", variant.name());
            m.param("conjugate", conjugate);
            let cal = Calibration::load_or_default(&calibration_path(calibration))?;
            m.calibration_constants = cal.constants.clone();
            let range = summation_range(t, u)?;
            let table = table_for(range.n_hi.max(2))?;
            let c = compare_cubic_moment(
                t,
                u,
                *variant,
                *conjugate,
                &QuadratureSpec::default(),
                &table,
            )?;
            print_comparison(&c);
            write_single_csv(out, MomentComparison::CSV_HEADER, &c.csv_row())?;
            write_opt_json(out, &c)?;
            let bound = cal.get(CAL_CUBIC_NORMALIZED);
            let im_bound = cal.get(CAL_CUBIC_IM_LEAK) * t.powf(0.75);
            if c.normalized > bound {
                return fail(
                    out,
                    format!("normalized difference {:.4} > {bound}", c.normalized),
                );
            }
            if c.im_leak > im_bound {
                return fail(out, format!("|Im rhs| {:.4} > {im_bound:.4}", c.im_leak));
            }
            Ok(Outcome::Ok)
        }
        &Command::Expsum { n, alpha, n_prime } => {
            let n_prime = n_prime.unwrap_or(2 * n);
            m.param("n", n);
            m.param("n_prime", n_prime);
            m.param("alpha", alpha);
            let table = table_for(n_prime.max(2))?;
            let s = exp_sum_d3(alpha, n, n_prime, &table)?;
            let plain = exp_sum_plain(alpha, n, n_prime)?;
            println!(
                "S({alpha}, {n}) = {} {:+.16e}i  |S| = {:.10e}",
                fmt_f64(s.re),
                s.im,
                s.norm()
            );
            println!("plain sum |T| = {:.10e}", plain.value.norm());
            if let Some(v) = plain.normalized {
                println!("|T| |alpha| / N^(1/3) = {v:.6}");
            }
            write_single_csv(
                out,
                "alpha,N,N_prime,S_re,S_im,abs_S,plain_abs,plain_normalized",
                &format!(
                    "{},{n},{n_prime},{},{},{},{},{}",
                    fmt_f64(alpha),
                    fmt_f64(s.re),
                    fmt_f64(s.im),
                    fmt_f64(s.norm()),
                    fmt_f64(plain.value.norm()),
                    plain.normalized.map(fmt_f64).unwrap_or_default()
                ),
            )?;
            write_opt_json(
                out,
                &serde_json::json!({ "alpha": alpha, "N": n, "N_prime": n_prime, "S": s, "plain": plain }),
            )?;
            Ok(Outcome::Ok)
        }
        &Command::Msq {
            n,
            a,
            b,
            find_point,
        } => {
            m.param("n", n);
            m.param("a", a);
            m.param("b", b);
            m.param("find_point", find_point);
            let table = table_for((2 * n).max(2))?;
            let scan = expsum_scan(a, b, n, find_point, &table)?;
            print_scan(&scan);
            if let Some(p) = &out.csv {
                let mut sink = CsvSink::create(p, ExpSumScan::CSV_HEADER)?;
                for r in scan.csv_rows() {
                    sink.row(&r)?;
                }
            }
            write_opt_json(out, &scan.summary_json())?;
            let rel =
                (scan.ms_exact - scan.ms_quad).abs() / scan.ms_exact.abs().max(f64::MIN_POSITIVE);
            if scan.ms_exact > 0.0 && rel > 1e-6 {
                return fail(
                    out,
                    format!("closed form and quadrature differ by {rel:.2e} (> 1e-6)"),
                );
            }
            Ok(Outcome::Ok)
        }
        Command::Suite {
            level,
            calibrate,
            calibration,
        } => {
            let level = Level::from(*level);
            if *calibrate && level != Level::Full {
                return Err(Error::Domain("--calibrate needs --level full".into()));
            }
            m.param("level", level);
            m.param("calibrate", calibrate);
            let path = calibration_path(calibration);
            let cal = if *calibrate {
                Calibration::default()
            } else {
                Calibration::load_or_default(&path)?
            };
            m.calibration_constants = cal.constants.clone();
            let table = load_or_build(SUITE_TABLE_BOUND, &cache_dir())?;
            run_suite_command(out, level, &cal, &table, *calibrate, &path, m)
        }
    }
}

fn fail(out: &OutputArgs, why: String) -> Result<Outcome> {
    if let Some(p) = &out.csv {
        append_marker(p, &why)?;
    }
    Ok(Outcome::Failed(why))
}

fn run_suite_command(
    out: &OutputArgs,
    level: Level,
    cal: &Calibration,
    table: &DivisorTable,
    calibrate: bool,
    cal_path: &Path,
    m: &mut RunManifest,
) -> Result<Outcome> {
    let mut sink = match &out.csv {
        Some(p) => Some(CsvSink::create(p, "criterion,title,status,elapsed_s")?),
        None => None,
    };
    let reports: Vec<CriterionReport> = run_suite(level, cal, table);
    for r in &reports {
        println!("{}", r.line());
        for d in &r.details {
            println!("    {d}");
        }
        if let Some(s) = sink.as_mut() {
            let status = if r.informational {
                "info"
            } else if r.passed {
                "pass"
            } else {
                "fail"
            };
            s.row(&format!("{},{},{status},{:.3}", r.id, r.title, r.elapsed_s))?;
        }
    }
    write_opt_json(out, &reports)?;
    let failed: Vec<u8> = reports
        .iter()
        .filter(|r| !r.informational && !r.passed)
        .map(|r| r.id)
        .collect();
    if calibrate {
        let new = Calibration::from_reports(&reports);
        new.save(cal_path)?;
        println!("calibration written to {}", cal_path.display());
        m.calibration_constants = new.constants;
        m.outputs.push(cal_path.to_path_buf());
    }
    if failed.is_empty() {
        println!("all criteria passed");
        Ok(Outcome::Ok)
    } else {
        let why = format!("criteria {failed:?} failed");
        if let Some(s) = sink.as_mut() {
            s.fail(&why)?;
        }
        Ok(Outcome::Failed(why))
    }
}

fn print_moment(r: &MomentResult) {
    println!("{} over its range, T = {}, U = {}", r.kind.name(), r.T, r.U);
    println!(
        "value {}  est_error {:.3e}  ({} evaluations)",
        fmt_f64(r.value),
        r.est_error,
        r.evaluations
    );
    if let Some(v) = r.normalized {
        println!("normalized {v:.6}");
    }
}

fn print_comparison(c: &MomentComparison) {
    println!(
        "T = {}, U = {}, variant {}, conjugate {}",
        c.T,
        c.U,
        c.variant.name(),
        c.conjugate
    );
    println!(
        "lhs {}  (est_error {:.2e})",
        fmt_f64(c.lhs),
        c.lhs_est_error
    );
    println!(
        "rhs {} {:+.16e}i  over {} terms",
        fmt_f64(c.rhs.re),
        c.rhs.im,
        c.n_terms
    );
    println!(
        "|lhs - Re rhs| = {:.6e}, normalized {:.6}",
        c.abs_diff, c.normalized
    );
}

fn print_scan(s: &ExpSumScan) {
    println!(
        "N = {}, [A, B] = [{}, {}], {} samples",
        s.N,
        s.A,
        s.B,
        s.grid.len()
    );
    println!("mean square, closed form {}", fmt_f64(s.ms_exact));
    println!(
        "mean square, {:?} quadrature {}",
        s.rule,
        fmt_f64(s.ms_quad)
    );
    println!("ratio to N^(4/3) log^9 N {:.6e}", s.ratio);
    if let Some((c, v)) = s.good_point {
        println!(
            "C = {c:.12}, |S(C, N)| = {v:.6} (bound {:.4e})",
            crate::expsum::good_point_bound(s.N)
        );
    }
}
