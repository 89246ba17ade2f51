use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use memloss::circuit::read_circuit;
use memloss::engine::{survival_probability, McOptions};
use memloss::harness::{
    emit_plot, estimate_dstar_scaling, fit_decay, read_csv, run_check, run_sweep, series, DecayFit, FitOptions,
    PlotKind, ScalingReport, Suite, SweepConfig,
};
use memloss::oracle::{evolve, trace_distance};
use memloss::{Circuit, DensityMatrix, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "memloss",
    version,
    about = "Noisy Clifford+reset circuit memory-loss laboratory"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a circuit file for structural problems.
    Validate { circuit: PathBuf },
    /// Monte Carlo estimate of the probability that some Pauli survives.
    Survival {
        circuit: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Trace distance between the outputs for two input states.
    Exact {
        circuit: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Run a verification suite.
    Check {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Defaults to the suite's acceptance size.
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every case, not only failures.
        #[arg(long)]
        verbose: bool,
    },
    /// Run a survival-versus-depth sweep, resuming from an existing CSV.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit decay rates and the d* scaling check.
    Fit {
        results: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.5)]
        slack: f64,
    },
    /// Render a sweep table as SVG.
    Plot {
        results: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::SurvivalVsDepth)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Adjoint,
    Equivalence,
    Lemma1,
    Fact,
    Mixture,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Adjoint => Suite::Adjoint,
            SuiteArg::Equivalence => Suite::Equivalence,
            SuiteArg::Lemma1 => Suite::Lemma1,
            SuiteArg::Fact => Suite::Fact,
            SuiteArg::Mixture => Suite::Mixture,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    SurvivalVsDepth,
    DstarVsN,
}

enum Failure {
    Usage(String),
    Verify(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CAP)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Validate { circuit } => validate(&circuit),
        Cmd::Survival {
            circuit,
            trials,
            seed,
            confidence,
            threads,
        } => {
            let c: Circuit<f64> = read_circuit(&circuit)?;
            let est = survival_probability(
                &c,
                &McOptions {
                    trials,
                    seed,
                    confidence,
                    threads,
                },
            )?;
            print_json(&est)
        }
        Cmd::Exact { circuit, rho, sigma } => {
            let c: Circuit<f64> = read_circuit(&circuit)?;
            let rho = DensityMatrix::read(&rho)?;
            let sigma = DensityMatrix::read(&sigma)?;
            let d = trace_distance(&evolve(&c, &rho)?, &evolve(&c, &sigma)?)?;
            println!("{d:.15e}");
            Ok(())
        }
        Cmd::Check {
            suite,
            instances,
            seed,
            verbose,
        } => check(suite.into(), instances, seed, verbose),
        Cmd::Sweep { config, out, threads } => sweep(&config, out, threads),
        Cmd::Fit {
            results,
            epsilon,
            slack,
        } => fit(&results, epsilon, slack),
        Cmd::Plot { results, kind, out } => {
            let rows = read_csv(&results)?;
            let kind = match kind {
                KindArg::SurvivalVsDepth => PlotKind::SurvivalVsDepth,
                KindArg::DstarVsN => PlotKind::DstarVsN,
            };
            emit_plot(&rows, kind, &out)?;
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let c: Circuit<f64> = read_circuit(path)?;
    let problems = c.validate();
    if problems.is_empty() {
        println!(
            "ok: n={} depth={} gamma={} noise sites={}",
            c.num_qubits(),
            c.depth(),
            c.gamma(),
            c.noise_sites()
        );
        return Ok(());
    }
    for p in &problems {
        println!("{p}");
    }
    Err(Failure::Verify(format!(
        "{} problem(s) in {}",
        problems.len(),
        path.display()
    )))
}

fn check(suite: Suite, instances: Option<usize>, seed: u64, verbose: bool) -> Result<(), Failure> {
    let start = Instant::now();
    let report = run_check(suite, instances.unwrap_or(suite.default_instances()), seed)?;
    for c in &report.cases {
        if verbose || !c.passed {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            println!("{tag} {}: observed {:.6e}, limit {:.6e}", c.label, c.observed, c.limit);
        }
    }
    let failed = report.failures().count();
    println!(
        "{}: {} cases, {} failed, max observed {:.3e}, {:.2?}",
        report.suite,
        report.cases.len(),
        failed,
        report.max_observed(),
        start.elapsed()
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "{} suite: {failed} of {} cases",
            report.suite,
            report.cases.len()
        )))
    }
}

fn sweep(config: &Path, out: Option<PathBuf>, threads: Option<usize>) -> Result<(), Failure> {
    let cfg = SweepConfig::read(config)?;
    let out = out
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Failure::Usage("no output path: pass --out or set `out` in the config".into()))?;
    let existing = if out.exists() { read_csv(&out)? } else { Vec::new() };
    let rows = run_sweep(&cfg, &existing, threads, Some(&out))?;
    eprintln!("{} rows in {}", rows.len(), out.display());
    if let Some(plot) = &cfg.plot {
        if !rows.is_empty() {
            emit_plot(&rows, PlotKind::SurvivalVsDepth, plot)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SeriesFit {
    family: String,
    n: usize,
    gamma: f64,
    #[serde(flatten)]
    fit: Option<DecayFit>,
    error: Option<String>,
}

#[derive(Serialize)]
struct ScalingEntry {
    family: String,
    gamma: f64,
    /// Consistency check only; the asymptotic constants are unknown.
    report: Option<ScalingReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct FitOutput {
    epsilon: f64,
    fits: Vec<SeriesFit>,
    scaling: Vec<ScalingEntry>,
}

fn fit(results: &Path, epsilon: f64, slack: f64) -> Result<(), Failure> {
    let rows = read_csv(results)?;
    let opts = FitOptions {
        epsilon,
        ..Default::default()
    };
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Failure::Usage(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let mut fits = Vec::new();
    for s in series(&rows) {
        let (fit, error) = match fit_decay(&s, &opts) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        fits.push(SeriesFit {
            family: s[0].family.clone(),
            n: s[0].n,
            gamma: s[0].gamma,
            fit,
            error,
        });
    }
    let mut groups: Vec<(String, f64)> = fits.iter().map(|f| (f.family.clone(), f.gamma)).collect();
    groups.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    groups.dedup();
    let scaling = groups
        .into_iter()
        .map(|(family, gamma)| {
            let by_n: Vec<(usize, DecayFit)> = fits
                .iter()
                .filter(|f| f.family == family && f.gamma == gamma)
                .filter_map(|f| f.fit.map(|x| (f.n, x)))
                .collect();
            let (report, error) = match estimate_dstar_scaling(&by_n, slack) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ScalingEntry {
                family,
                gamma,
                report,
                error,
            }
        })
        .collect();
    print_json(&FitOutput { epsilon, fits, scaling })
}
