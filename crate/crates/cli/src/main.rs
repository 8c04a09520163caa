//! `ctn`: command-line driver for Clifford-augmented MPS simulations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctn_core::circuit::Circuit;
use ctn_core::experiments::{
    compare_coolers, compare_k_policies, depth_policies, emit_csv, emit_fidelity_csv, fidelity_scan, fit_angle_growth, page_bound,
    run_circuit, run_doped_circuit, summarize, write_csv, ExperimentConfig, ExperimentKind, TrajectoryRecord,
};
use ctn_core::theory::verify_theorem;
use ctn_core::{double_coset_classes, Cooler, CoolingPolicy, CtnError, TruncationPolicy};

#[derive(Parser, Debug)]
#[command(name = "ctn", version, about = "Clifford-augmented MPS simulations with entanglement cooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a JSON circuit and write one CSV row per rotation.
    Run(RunArgs),
    /// Run a doped-circuit ensemble experiment.
    Experiment(ExperimentArgs),
    /// Build the entangling-class table for k-qubit Cliffords.
    Classes {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        k: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Numerical checks of the purity criterion.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    Theorem {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON report path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Agreement tolerance between closed formula and dense oracle.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value = "exact+heuristic:k=2,d=2")]
    cool: CoolingPolicy,
    #[arg(long, default_value_t = 256)]
    chi_max: usize,
    #[arg(long, default_value_t = 1e-12)]
    cutoff: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Binary snapshot of the final MPS.
    #[arg(long)]
    dump_state: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Doped,
    CompareK,
    Depth,
    Angles,
    Fidelity,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    kind: Kind,
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Number of rotations per realization (default 3n, or 2n for fidelity).
    #[arg(long)]
    t_max: Option<usize>,
    #[arg(long, default_value_t = 10)]
    realizations: usize,
    /// Rotation angles for `angles`, comma separated. Accepts `pi/8`, `3pi/16`, `0.39`.
    #[arg(long, value_delimiter = ',', value_parser = parse_angle)]
    theta: Vec<f64>,
    /// Cooling policy. For `compare-k` and `depth` only its exact flag is
    /// used; the heuristic part is set by the experiment.
    #[arg(long)]
    cool: Option<CoolingPolicy>,
    /// Sweep depth used by `compare-k`.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Depths compared by `depth`.
    #[arg(long, value_delimiter = ',', default_values_t = [1, 5])]
    depths: Vec<usize>,
    /// Bond dimensions for `fidelity` (default 1 ..= 2^(n/2)).
    #[arg(long, value_delimiter = ',')]
    chi: Vec<usize>,
    #[arg(long, default_value_t = 256)]
    chi_max: usize,
    #[arg(long, default_value_t = 1e-12)]
    cutoff: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall time per step in the CSV.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
    /// JSON summary (comparison statistics or angle fit).
    #[arg(long)]
    json: Option<PathBuf>,
}

fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase();
    let Some(idx) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("'{text}' is not an angle"));
    };
    let coeff = match t[..idx].trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{text}'"))?,
    };
    let rest = &t[idx + 2..];
    let div = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| format!("bad divisor in '{text}'"))?,
        None if rest.is_empty() => 1.0,
        None => return Err(format!("'{text}' is not an angle")),
    };
    Ok(coeff * std::f64::consts::PI / div)
}

fn create(path: &Path) -> Result<BufWriter<File>, CtnError> {
    File::create(path).map(BufWriter::new).map_err(|e| CtnError::Io { context: format!("creating {}", path.display()), source: e })
}

fn write_json(value: &impl serde::Serialize, path: &Path) -> Result<(), CtnError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.flush().map_err(|e| CtnError::Io { context: format!("writing {}", path.display()), source: e })
}

fn run(args: RunArgs) -> Result<(), CtnError> {
    let circuit = Circuit::load(&args.circuit)?;
    let truncation = TruncationPolicy::new(args.chi_max, args.cutoff)?;
    let cooler = Cooler::new(args.cool)?;
    let (records, state) = run_circuit(&circuit, &cooler, truncation, args.seed)?;
    match &args.out {
        Some(path) => emit_csv(&records, path)?,
        None => write_csv(&records, io::stdout().lock())?,
    }
    if let Some(path) = &args.dump_state {
        let mut w = create(path)?;
        state.mps().write_snapshot(&mut w)?;
        w.flush().map_err(|e| CtnError::Io { context: format!("writing {}", path.display()), source: e })?;
    }
    let stats = state.stats();
    eprintln!(
        "n={} rotations={} max entropy {:.6} max bond {}",
        circuit.n,
        stats.rotations,
        state.max_entropy(),
        state.mps().bond_dims().into_iter().max().unwrap_or(1)
    );
    Ok(())
}

fn report_steps(records: &[TrajectoryRecord], n: usize) {
    println!("page bound S_b({n}) = {:.4}", page_bound(n));
    println!("{:>30} {:>6} {:>10} {:>10}", "method", "T", "mean S", "stderr");
    for s in summarize(records) {
        println!("{:>30} {:>6} {:>10.5} {:>10.5}", s.method, s.t_count, s.mean, s.stderr);
    }
}

fn experiment(args: ExperimentArgs) -> Result<(), CtnError> {
    let kind = match args.kind {
        Kind::Doped => ExperimentKind::DopedT,
        Kind::CompareK => ExperimentKind::CompareK,
        Kind::Depth => ExperimentKind::DepthScan,
        Kind::Angles => ExperimentKind::AngleScan,
        Kind::Fidelity => ExperimentKind::FidelityScan,
    };
    let mut cfg = ExperimentConfig::new(kind, args.n);
    cfg.t_max = args.t_max.unwrap_or(if kind == ExperimentKind::FidelityScan { 2 * args.n } else { 3 * args.n });
    cfg.realizations = args.realizations;
    cfg.chi_max = args.chi_max;
    cfg.cutoff = args.cutoff;
    cfg.seed = args.seed;
    cfg.timing = args.timing;
    if !args.theta.is_empty() {
        if kind != ExperimentKind::AngleScan {
            return Err(CtnError::InvalidArgument("--theta only applies to the angles experiment".into()));
        }
        cfg.thetas = args.theta.clone();
    } else if kind == ExperimentKind::AngleScan {
        cfg.thetas = [16.0, 8.0, 16.0 / 3.0, 4.0].iter().map(|d| std::f64::consts::PI / d).collect();
    }
    let compare = matches!(kind, ExperimentKind::CompareK | ExperimentKind::DepthScan);
    cfg.cooling = args.cool.unwrap_or(if compare { CoolingPolicy::NONE } else { cfg.cooling });
    cfg.validate()?;

    match kind {
        ExperimentKind::DopedT | ExperimentKind::AngleScan => {
            let records = run_doped_circuit(&cfg)?;
            emit_csv(&records, &args.out)?;
            report_steps(&records, cfg.n);
            if kind == ExperimentKind::AngleScan {
                let fit = fit_angle_growth(&records, cfg.n)?;
                for ((t, a), s) in fit.thetas.iter().zip(&fit.alphas).zip(&fit.stderrs) {
                    println!("theta {t:.5}: alpha {a:.5} ± {s:.5}");
                }
                println!(
                    "fit: slope {:.5} ± {:.5}, intercept {:.5} ± {:.5}, R² {:.4}",
                    fit.fit.slope, fit.fit.slope_stderr, fit.fit.intercept, fit.fit.intercept_stderr, fit.fit.r_squared
                );
                if let Some(path) = &args.json {
                    write_json(&fit, path)?;
                }
            }
        }
        ExperimentKind::CompareK | ExperimentKind::DepthScan => {
            let policies = if kind == ExperimentKind::CompareK {
                compare_k_policies(cfg.cooling, args.depth)?
            } else {
                depth_policies(cfg.cooling, 2, &args.depths)?
            };
            let cmp = compare_coolers(&cfg, &policies)?;
            emit_csv(&cmp.records, &args.out)?;
            report_steps(&cmp.records, cfg.n);
            for i in 1..policies.len() {
                println!("{} vs {}: max per-step |Δ|/σ = {:.3}", policies[0], policies[i], cmp.max_z(0, i));
            }
            if let Some(path) = &args.json {
                write_json(&cmp, path)?;
            }
        }
        ExperimentKind::FidelityScan => {
            let chis = if args.chi.is_empty() { (1..=1usize << (cfg.n / 2)).collect() } else { args.chi.clone() };
            let records = fidelity_scan(&cfg, &chis)?;
            emit_fidelity_csv(&records, &args.out)?;
            println!("{:>6} {:>12}", "chi", "mean F");
            for &chi in &chis {
                let f: Vec<f64> = records.iter().filter(|r| r.chi == chi).map(|r| r.fidelity).collect();
                println!("{chi:>6} {:>12.6}", f.iter().sum::<f64>() / f.len() as f64);
            }
        }
        ExperimentKind::VerifyTheorem => unreachable!("not reachable from the CLI kinds"),
    }
    Ok(())
}

fn classes(k: u8, out: &Path) -> Result<(), CtnError> {
    let table = double_coset_classes(k as usize)?;
    let mut w = create(out)?;
    table.write(&mut w)?;
    w.flush().map_err(|e| CtnError::Io { context: format!("writing {}", out.display()), source: e })?;
    println!("k={k}: {} classes written to {}", table.class_count(), out.display());
    Ok(())
}

/// Returns `Ok(false)` when the numerical checks fail.
fn verify(samples: usize, seed: u64, report: Option<&Path>, tol: f64) -> Result<bool, CtnError> {
    let r = verify_theorem(samples, seed)?;
    println!("samples {}, seed {}", r.samples, r.seed);
    println!("max |formula - oracle| {:.3e}", r.max_formula_gap);
    println!("purity range [{:.8}, {:.8}]", r.min_purity, r.max_purity);
    println!("classification violations {}", r.iff_violations);
    println!(
        "exhaustive search: {} instances, {} with a Clifford disentangler, {} mismatches",
        r.brute_force_instances, r.brute_force_possible, r.brute_force_mismatches
    );
    if let Some(path) = report {
        write_json(&r, path)?;
    }
    let ok = r.passed(tol);
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Experiment(args) => experiment(args).map(|_| true),
        Command::Classes { k, out } => classes(k, &out).map(|_| true),
        Command::Verify { what: VerifyCommand::Theorem { samples, seed, report, tol } } => verify(samples, seed, report.as_deref(), tol),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
