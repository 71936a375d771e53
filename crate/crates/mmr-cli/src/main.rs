//! Command-line surface: CSV sweeps of the closed-form robustness curves,
//! single-shot evaluations, and the verification suites.
//!
//! Exit codes: 0 success, 1 verification or runtime failure, 2 usage error.
//! `MMR_THREADS` caps worker threads (0 or unset = automatic); outputs are
//! byte-identical for fixed flags and seed regardless of thread count.

mod sweep;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mmr::bounds::{
    hessian_spectrum, negativity_symmetric, series_ev, series_neg, symmetric_branch_report,
};
use mmr::measures::negativity;
use mmr::noise::{average_entropy_after_measurement, lose_spin};
use mmr::oracle::{oracle_loss_negativity, oracle_measure_entropy};
use mmr::states::{overlap, MicroMacroState};
use mmr::verify::{
    bound_suite, hessian_suite, oracle_suite, series_suite, SuiteReport, VerifyOptions,
    RNG_ALGORITHM,
};

use sweep::{fmt_real, linspace, near_integer, SweepRecord, SweepTable};

#[derive(Parser)]
#[command(
    name = "mmr",
    about = "Micro-macro entangled states: robustness curves, evaluations and verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Produce CSV sweep data for the robustness curves.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Run the verification suites and emit a JSON report.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Single-shot evaluations, JSON output.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Subcommand)]
enum SweepCommand {
    /// Branch entropies of a Dicke pair after one measurement, swept over
    /// the normalized distinctness Δk/N or the normalized center k̄/N.
    Dicke(SweepDickeArgs),
    /// Post-loss negativity of a QA-symmetric pair, swept over ΔM/N or M̄/N.
    Negativity(SweepNegativityArgs),
}

#[derive(Args)]
struct SweepDickeArgs {
    /// Number of spins in the mesoscopic system.
    #[arg(long)]
    n: usize,
    /// Fix k̄/N and sweep Δk/N over [0, 1].
    #[arg(long, conflicts_with = "dk_frac")]
    kbar_frac: Option<f64>,
    /// Fix Δk/N and sweep k̄/N over its feasible range.
    #[arg(long)]
    dk_frac: Option<f64>,
    /// Number of grid points (≥ 2).
    #[arg(long, default_value_t = 51)]
    grid: usize,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct SweepNegativityArgs {
    /// Sweep ΔM/N over [0, 1] with this many points (≥ 2).
    #[arg(long, conflicts_with = "mbar_frac_grid")]
    dm_frac_grid: Option<usize>,
    /// Fixed M̄/N for the ΔM/N sweep.
    #[arg(
        long,
        default_value_t = 0.0,
        allow_negative_numbers = true,
        conflicts_with = "mbar_frac_grid"
    )]
    mbar_frac: f64,
    /// Sweep M̄/N over its feasible range with this many points (≥ 2).
    #[arg(long, requires = "dm_frac")]
    mbar_frac_grid: Option<usize>,
    /// Fixed ΔM/N for the M̄/N sweep.
    #[arg(long)]
    dm_frac: Option<f64>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Every suite.
    All(VerifyArgs),
    /// Closed forms against the dense and sector oracles.
    Oracle(VerifyArgs),
    /// Sampled dominance of the symmetric bound plus the optimizer runs.
    Bound(VerifyArgs),
    /// Gradient and Hessian certificate.
    Hessian(VerifyArgs),
    /// Series expansion coefficients and accuracy.
    Series(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed of every sampled check; reports are deterministic per seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// All robustness quantities of a Dicke pair.
    Dicke(EvalDickeArgs),
    /// Closed-form branch report and negativity at given marginals.
    Symmetric(EvalSymmetricArgs),
    /// Product pair: exact noise results next to the closed forms.
    Product(EvalProductArgs),
    /// Symmetric upper bound and Hessian spectrum at a magnetization pair.
    Max(EvalMaxArgs),
}

#[derive(Args)]
struct EvalDickeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k0: usize,
    #[arg(long)]
    k1: usize,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct EvalSymmetricArgs {
    #[arg(long)]
    p0: f64,
    #[arg(long)]
    p1: f64,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct EvalProductArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    theta0: f64,
    #[arg(long, allow_negative_numbers = true)]
    theta1: f64,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct EvalMaxArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    m0_frac: f64,
    #[arg(long, allow_negative_numbers = true)]
    m1_frac: f64,
    #[arg(long, default_value = "-")]
    out: String,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(SweepCommand::Dicke(args)) => sweep_dicke(args),
        Command::Sweep(SweepCommand::Negativity(args)) => sweep_negativity(args),
        Command::Verify(cmd) => return run_verify(cmd),
        Command::Eval(cmd) => run_eval(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(ExitReason::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(ExitReason::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

enum ExitReason {
    Usage(String),
    Runtime(String),
}

impl From<std::io::Error> for ExitReason {
    fn from(e: std::io::Error) -> Self {
        ExitReason::Runtime(e.to_string())
    }
}

impl From<mmr::Error> for ExitReason {
    fn from(e: mmr::Error) -> Self {
        ExitReason::Runtime(e.to_string())
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("MMR_THREADS") {
        if let Ok(threads) = v.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn write_output(path: &str, data: &[u8]) -> Result<(), ExitReason> {
    if path == "-" {
        std::io::stdout().write_all(data)?;
    } else {
        fs::write(path, data)?;
    }
    Ok(())
}

const INTEGER_TOL: f64 = 1e-9;

fn sweep_dicke(args: SweepDickeArgs) -> Result<(), ExitReason> {
    if args.grid < 2 {
        return Err(ExitReason::Usage("--grid must be at least 2".into()));
    }
    if args.n == 0 {
        return Err(ExitReason::Usage("--n must be positive".into()));
    }
    let n = args.n as f64;
    let frac_ok = |v: f64| (0.0..=1.0).contains(&v);
    let (x_name, fixed, xs): (&'static str, Vec<(&'static str, String)>, Vec<f64>) =
        match (args.kbar_frac, args.dk_frac) {
            (Some(kbar), None) => {
                if !frac_ok(kbar) {
                    return Err(ExitReason::Usage("--kbar-frac must lie in [0, 1]".into()));
                }
                (
                    "dk_frac",
                    vec![("n", format!("{}", args.n)), ("kbar_frac", fmt_real(kbar))],
                    linspace(0.0, 1.0, args.grid),
                )
            }
            (None, Some(dk)) => {
                if !frac_ok(dk) {
                    return Err(ExitReason::Usage("--dk-frac must lie in [0, 1]".into()));
                }
                (
                    "kbar_frac",
                    vec![("n", format!("{}", args.n)), ("dk_frac", fmt_real(dk))],
                    linspace(dk / 2.0, 1.0 - dk / 2.0, args.grid),
                )
            }
            _ => {
                return Err(ExitReason::Usage(
                    "exactly one of --kbar-frac and --dk-frac is required".into(),
                ))
            }
        };

    let mut rows = Vec::new();
    for &x in &xs {
        let (kbar, dk) = match x_name {
            "dk_frac" => (args.kbar_frac.unwrap() * n, x * n),
            _ => (x * n, args.dk_frac.unwrap() * n),
        };
        let (k0f, k1f) = (kbar + dk / 2.0, kbar - dk / 2.0);
        let (k0, k1) = match (
            near_integer(k0f, INTEGER_TOL),
            near_integer(k1f, INTEGER_TOL),
        ) {
            (Some(a), Some(b)) if a >= 0 && b >= 0 && a <= args.n as i64 && b <= args.n as i64 => {
                (a as usize, b as usize)
            }
            _ => {
                eprintln!(
                    "skipping {x_name} = {x}: (k0, k1) = ({k0f}, {k1f}) is not an integer \
                     pair inside 0..={}",
                    args.n
                );
                continue;
            }
        };
        let report = symmetric_branch_report(k0 as f64 / n, k1 as f64 / n)?;
        let series = series_ev(dk / n, kbar / n - 0.5);
        rows.push(SweepRecord {
            x,
            columns: vec![
                k0 as f64,
                k1 as f64,
                report.e_up,
                report.e_down,
                report.avg,
                series,
            ],
        });
    }
    let table = SweepTable {
        x_name,
        fixed,
        column_names: vec!["k0", "k1", "e_up", "e_down", "avg_ev", "series_ev"],
        rows,
    };
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_output(&args.out, &buf)
}

fn sweep_negativity(args: SweepNegativityArgs) -> Result<(), ExitReason> {
    let feasible = |dm: f64, mbar: f64| dm / 2.0 + mbar.abs() <= 0.5 + 1e-12;
    let (x_name, fixed, xs): (&'static str, Vec<(&'static str, String)>, Vec<f64>) =
        match (args.dm_frac_grid, args.mbar_frac_grid) {
            (Some(grid), None) => {
                if grid < 2 {
                    return Err(ExitReason::Usage(
                        "--dm-frac-grid must be at least 2".into(),
                    ));
                }
                if args.mbar_frac.abs() > 0.5 {
                    return Err(ExitReason::Usage(
                        "--mbar-frac must lie in [-1/2, 1/2]".into(),
                    ));
                }
                (
                    "dm_frac",
                    vec![("mbar_frac", fmt_real(args.mbar_frac))],
                    linspace(0.0, 1.0, grid),
                )
            }
            (None, Some(grid)) => {
                if grid < 2 {
                    return Err(ExitReason::Usage(
                        "--mbar-frac-grid must be at least 2".into(),
                    ));
                }
                let dm = args.dm_frac.expect("clap enforces --dm-frac");
                if !(0.0..=1.0).contains(&dm) {
                    return Err(ExitReason::Usage("--dm-frac must lie in [0, 1]".into()));
                }
                let half = (1.0 - dm) / 2.0;
                (
                    "mbar_frac",
                    vec![("dm_frac", fmt_real(dm))],
                    linspace(-half, half, grid),
                )
            }
            _ => {
                return Err(ExitReason::Usage(
                    "exactly one of --dm-frac-grid and --mbar-frac-grid is required".into(),
                ))
            }
        };

    let mut rows = Vec::new();
    for &x in &xs {
        let (dm, mbar) = match x_name {
            "dm_frac" => (x, args.mbar_frac),
            _ => (args.dm_frac.unwrap(), x),
        };
        if !feasible(dm, mbar) {
            eprintln!(
                "skipping {x_name} = {x}: (ΔM/N, M̄/N) = ({dm}, {mbar}) leaves the \
                 marginal box"
            );
            continue;
        }
        let p0 = (0.5 + mbar + dm / 2.0).clamp(0.0, 1.0);
        let p1 = (0.5 + mbar - dm / 2.0).clamp(0.0, 1.0);
        rows.push(SweepRecord {
            x,
            columns: vec![p0, p1, negativity_symmetric(p0, p1)?, series_neg(dm, mbar)],
        });
    }
    let table = SweepTable {
        x_name,
        fixed,
        column_names: vec!["p0_up", "p1_up", "negativity", "series_neg"],
        rows,
    };
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_output(&args.out, &buf)
}

#[derive(Serialize)]
struct VerifyReport {
    rng: &'static str,
    seed: u64,
    suites: Vec<SuiteReport>,
    all_passed: bool,
}

type SuiteFn = fn(&VerifyOptions) -> SuiteReport;

fn run_verify(cmd: VerifyCommand) -> ExitCode {
    let (args, suites): (&VerifyArgs, Vec<SuiteFn>) = match &cmd {
        VerifyCommand::All(a) => (
            a,
            vec![oracle_suite, bound_suite, hessian_suite, |_| series_suite()],
        ),
        VerifyCommand::Oracle(a) => (a, vec![oracle_suite]),
        VerifyCommand::Bound(a) => (a, vec![bound_suite]),
        VerifyCommand::Hessian(a) => (a, vec![hessian_suite]),
        VerifyCommand::Series(a) => (a, vec![|_| series_suite()]),
    };
    let options = VerifyOptions::with_seed(args.seed);
    let suites: Vec<SuiteReport> = suites.into_iter().map(|f| f(&options)).collect();
    let all_passed = suites.iter().all(|s| s.all_passed());
    let report = VerifyReport {
        rng: RNG_ALGORITHM,
        seed: args.seed,
        suites,
        all_passed,
    };
    let mut data = serde_json::to_vec_pretty(&report).expect("report serializes");
    data.push(b'\n');
    if let Err(e) = write_output(&args.out, &data) {
        let msg = match e {
            ExitReason::Usage(m) | ExitReason::Runtime(m) => m,
        };
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        for s in report.suites.iter().filter(|s| !s.all_passed()) {
            eprintln!(
                "suite {}: {}/{} cases passed; first failure: {}",
                s.suite,
                s.passed,
                s.cases,
                s.failures.first().map(String::as_str).unwrap_or("-")
            );
        }
        ExitCode::from(1)
    }
}

#[derive(Serialize)]
struct DickeEvalReport {
    n: usize,
    k0: usize,
    k1: usize,
    lambda: f64,
    spectra_disjoint: bool,
    p_up: f64,
    e_up: f64,
    e_down: f64,
    avg_ev: f64,
    avg_ev_oracle: f64,
    negativity_closed: f64,
    negativity_oracle: f64,
    series_ev: f64,
    series_neg: f64,
}

#[derive(Serialize)]
struct SymmetricEvalReport {
    p0_up: f64,
    p1_up: f64,
    prob_up: f64,
    prob_down: f64,
    e_up: f64,
    e_down: f64,
    avg_ev: f64,
    negativity: f64,
    series_ev: f64,
    series_neg: f64,
}

#[derive(Serialize)]
struct ProductEvalReport {
    n: usize,
    theta0: f64,
    theta1: f64,
    overlap_mag: f64,
    lambda: f64,
    p0_up: f64,
    p1_up: f64,
    avg_ev_exact: f64,
    avg_ev_closed: f64,
    negativity_exact: f64,
    negativity_closed: f64,
    closed_form_error_bound: f64,
}

#[derive(Serialize)]
struct MaxEvalReport {
    n: usize,
    m0_frac: f64,
    m1_frac: f64,
    ev_max: f64,
    negativity_symmetric: f64,
    hessian_a: f64,
    hessian_b: f64,
    hessian_c: f64,
    hessian_eigenvalues: Vec<(f64, usize)>,
    hessian_all_negative: bool,
}

fn run_eval(cmd: EvalCommand) -> Result<(), ExitReason> {
    let (json, out) = match cmd {
        EvalCommand::Dicke(args) => {
            let s = MicroMacroState::dicke_pair(args.n, args.k0, args.k1)?;
            let summary = s.macro_summary();
            let (n, k0, k1) = (args.n as f64, args.k0 as f64, args.k1 as f64);
            let report = symmetric_branch_report(k0 / n, k1 / n)?;
            let doc = DickeEvalReport {
                n: args.n,
                k0: args.k0,
                k1: args.k1,
                lambda: summary.lambda,
                spectra_disjoint: summary.spectra_disjoint,
                p_up: report.prob_up,
                e_up: report.e_up,
                e_down: report.e_down,
                avg_ev: report.avg,
                avg_ev_oracle: oracle_measure_entropy(&s, 1)?.average,
                negativity_closed: negativity_symmetric(k0 / n, k1 / n)?,
                negativity_oracle: oracle_loss_negativity(&s, 1)?,
                series_ev: series_ev((k0 - k1) / n, (k0 + k1) / (2.0 * n) - 0.5),
                series_neg: series_neg((k0 - k1) / n, (k0 + k1) / (2.0 * n) - 0.5),
            };
            (serde_json::to_value(&doc).expect("serializes"), args.out)
        }
        EvalCommand::Symmetric(args) => {
            let report = symmetric_branch_report(args.p0, args.p1)?;
            let dm = args.p0 - args.p1;
            let mbar = (args.p0 + args.p1) / 2.0 - 0.5;
            let doc = SymmetricEvalReport {
                p0_up: args.p0,
                p1_up: args.p1,
                prob_up: report.prob_up,
                prob_down: report.prob_down,
                e_up: report.e_up,
                e_down: report.e_down,
                avg_ev: report.avg,
                negativity: negativity_symmetric(args.p0, args.p1)?,
                series_ev: series_ev(dm, mbar),
                series_neg: series_neg(dm, mbar),
            };
            (serde_json::to_value(&doc).expect("serializes"), args.out)
        }
        EvalCommand::Product(args) => {
            let s = MicroMacroState::product_pair(args.n, args.theta0, args.theta1)?;
            let summary = s.macro_summary();
            let (p0, p1) = (args.theta0.cos().powi(2), args.theta1.cos().powi(2));
            let ov = overlap(s.psi0(), s.psi1())?.norm();
            let doc = ProductEvalReport {
                n: args.n,
                theta0: args.theta0,
                theta1: args.theta1,
                overlap_mag: ov,
                lambda: summary.lambda,
                p0_up: p0,
                p1_up: p1,
                avg_ev_exact: average_entropy_after_measurement(&s)?,
                avg_ev_closed: symmetric_branch_report(p0, p1)?.avg,
                negativity_exact: negativity(&lose_spin(&s, 1)?).value,
                negativity_closed: negativity_symmetric(p0, p1)?,
                closed_form_error_bound: 2.0 * ov,
            };
            (serde_json::to_value(&doc).expect("serializes"), args.out)
        }
        EvalCommand::Max(args) => {
            let spectrum = hessian_spectrum(args.n, 0.5 + args.m0_frac, 0.5 + args.m1_frac)?;
            let doc = MaxEvalReport {
                n: args.n,
                m0_frac: args.m0_frac,
                m1_frac: args.m1_frac,
                ev_max: mmr::bounds::ev_max(args.m0_frac, args.m1_frac)?,
                negativity_symmetric: negativity_symmetric(0.5 + args.m0_frac, 0.5 + args.m1_frac)?,
                hessian_a: spectrum.a,
                hessian_b: spectrum.b,
                hessian_c: spectrum.c,
                hessian_eigenvalues: spectrum.eigenvalues.clone(),
                hessian_all_negative: spectrum.all_negative,
            };
            (serde_json::to_value(&doc).expect("serializes"), args.out)
        }
    };
    let mut data = serde_json::to_vec_pretty(&json).expect("serializes");
    data.push(b'\n');
    write_output(&out, &data)
}
