//! Command-line front end: load circuits and noise specs, decide
//! ε-equivalence, and emit human-readable or JSON reports.
//!
//! Exit codes: 0 = equivalent, 1 = not equivalent, 2 = usage/input error,
//! 3 = internal check failure (oracle disagreement or wiring bug).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use aeqc::circuit::{gen_bv, gen_qft, random_noise_spec};
use aeqc::fidelity::{
    self, check_equivalence, fidelity_collective, fidelity_individual, AlgorithmChoice,
    FidelityOptions, FidelityReport, Verdict,
};
use aeqc::{insert_noise, oracle, parse_circuit, parse_noise_spec, Circuit, Error};

const ORACLE_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "aeqc",
    about = "Approximate equivalence checking of noisy quantum circuits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check ε-equivalence of an ideal circuit against a noisy implementation
    Check(CheckArgs),
    /// Run built-in benchmark circuits and report per-algorithm statistics
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Auto,
    Individual,
    Collective,
}

#[derive(Args)]
struct CheckArgs {
    /// Ideal (noise-free) circuit file
    #[arg(long)]
    ideal: PathBuf,
    /// Noisy implementation circuit file
    #[arg(long)]
    noisy: PathBuf,
    /// JSON noise spec applied to the noisy circuit file
    #[arg(long)]
    noise_spec: Option<PathBuf>,
    /// Equivalence threshold: equivalent iff F_J > 1 - epsilon
    #[arg(long)]
    epsilon: f64,
    /// Algorithm selection
    #[arg(long, value_enum, default_value = "auto")]
    algorithm: AlgorithmArg,
    /// Disable early exit; always compute the full fidelity
    #[arg(long)]
    exact: bool,
    /// Cross-check the result against the dense reference oracle
    #[arg(long)]
    oracle: bool,
    /// Worker threads for the per-term algorithm
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write a JSON report to this path
    #[arg(long)]
    json: Option<PathBuf>,
    /// Seed recorded in the report (bench-style runs use it for noise placement)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark family: qft or bv
    family: String,
    /// Qubit count
    n: usize,
    /// Noise count, or an inclusive range like 1..6 (one row per count)
    #[arg(long, default_value = "0")]
    noises: String,
    /// No-error probability of each inserted channel
    #[arg(long, default_value_t = 0.999)]
    p: f64,
    /// Channel kind to insert
    #[arg(long, default_value = "depolarizing")]
    channel: String,
    /// Restrict to one algorithm (default: run both)
    #[arg(long, value_enum)]
    algorithm: Option<AlgorithmArg>,
    /// Seed for noise placement
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Append rows to a CSV file
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads for the per-term algorithm
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => run_check(&args),
        Command::Bench(args) => run_bench(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::OracleDisagreement { .. }
        | Error::ResidualImaginary { .. }
        | Error::Internal(_) => 3,
        _ => 2,
    }
}

fn load_circuit(path: &PathBuf) -> Result<Circuit, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_circuit(&text)
}

fn run_check(args: &CheckArgs) -> Result<ExitCode, Error> {
    let ideal = load_circuit(&args.ideal)?;
    if !ideal.is_ideal() {
        return Err(Error::NoisyCircuit);
    }
    let mut noisy = load_circuit(&args.noisy)?;
    if let Some(spec_path) = &args.noise_spec {
        let text = fs::read_to_string(spec_path)
            .map_err(|e| Error::NoiseSpec(format!("{}: {e}", spec_path.display())))?;
        let spec = parse_noise_spec(&text)?;
        noisy = insert_noise(&noisy, &spec)?;
    }

    let opts = FidelityOptions {
        workers: args.workers.max(1),
        ..Default::default()
    };
    let choice = match args.algorithm {
        AlgorithmArg::Auto => AlgorithmChoice::Auto,
        AlgorithmArg::Individual => AlgorithmChoice::Individual,
        AlgorithmArg::Collective => AlgorithmChoice::Collective,
    };
    let report = check_equivalence(&ideal, &noisy, args.epsilon, choice, !args.exact, &opts)?;

    if args.oracle {
        let dense = oracle::jamiolkowski_fidelity_dense(&ideal, &noisy)?;
        let ok = if report.is_lower_bound {
            dense >= report.raw_fj - ORACLE_AGREEMENT_TOL
        } else {
            (dense - report.raw_fj).abs() <= ORACLE_AGREEMENT_TOL
        };
        if !ok {
            return Err(Error::OracleDisagreement {
                trace_route: dense,
                choi_route: report.raw_fj,
            });
        }
        println!("oracle check: ok (dense fj = {dense:.12})");
    }

    print_report(&report, ideal.dim());
    if let Some(path) = &args.json {
        let json = report_json(&report, args.seed, ideal.dim());
        fs::write(path, serde_json::to_string_pretty(&json).unwrap() + "\n").map_err(|e| {
            Error::NoiseSpec(format!("cannot write {}: {e}", path.display()))
        })?;
    }

    let verdict = report.equivalent.expect("check sets a verdict");
    Ok(if verdict.is_equivalent() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_report(report: &FidelityReport, dim: usize) {
    let verdict = report.equivalent.expect("verdict set");
    let verdict_note = match verdict {
        Verdict::Yes => "equivalent",
        Verdict::YesByBound => "equivalent, certified by an early-exit lower bound",
        Verdict::No => "not equivalent",
    };
    println!("verdict:          {} — {verdict_note}", verdict.as_str());
    if report.is_lower_bound {
        println!(
            "fidelity:         >= {:.12} (lower bound after {}/{} terms)",
            report.fj, report.terms_evaluated, report.total_terms
        );
    } else {
        println!("fidelity:         {:.12}", report.fj);
    }
    if report.clamp_warning() {
        eprintln!(
            "warning: raw fidelity {:.3e} outside [0,1] beyond tolerance; clamped",
            report.raw_fj
        );
    }
    println!(
        "avg fidelity:     {:.12}",
        fidelity::average_fidelity(report.fj, dim)
    );
    println!("cj metric:        {:.12}", fidelity::cj_metric(report.fj));
    println!("epsilon:          {}", report.epsilon.unwrap_or(f64::NAN));
    println!("algorithm:        {}", report.algorithm.as_str());
    println!(
        "terms:            {} / {}",
        report.terms_evaluated, report.total_terms
    );
    println!("peak tdd nodes:   {}", report.peak_nodes);
    println!("wall time:        {:.6} s", report.wall_time);
}

fn report_json(report: &FidelityReport, seed: u64, dim: usize) -> serde_json::Value {
    serde_json::json!({
        "verdict": report.equivalent.expect("verdict set").as_str(),
        "fj": report.fj,
        "is_lower_bound": report.is_lower_bound,
        "epsilon": report.epsilon,
        "algorithm": report.algorithm.as_str(),
        "terms_evaluated": report.terms_evaluated,
        "total_terms": report.total_terms.min(u64::MAX as u128) as u64,
        "avg_fidelity": fidelity::average_fidelity(report.fj, dim),
        "cj": fidelity::cj_metric(report.fj),
        "peak_nodes": report.peak_nodes,
        "wall_time_s": report.wall_time,
        "seed": seed,
    })
}

fn parse_noise_range(s: &str) -> Result<(usize, usize), Error> {
    let parse = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| Error::NoiseSpec(format!("bad noise count `{t}`")))
    };
    if let Some((a, b)) = s.split_once("..") {
        Ok((parse(a)?, parse(b)?))
    } else {
        let k = parse(s)?;
        Ok((k, k))
    }
}

struct BenchRow {
    circuit: String,
    n: usize,
    gates: usize,
    noises: usize,
    fj: f64,
    alg2: Option<(f64, usize)>,
    alg1: Option<(f64, usize)>,
}

fn run_bench(args: &BenchArgs) -> Result<ExitCode, Error> {
    let (lo, hi) = parse_noise_range(&args.noises)?;
    if lo > hi {
        return Err(Error::NoiseSpec(format!(
            "empty noise range {}..{}",
            lo, hi
        )));
    }
    let ideal = match args.family.as_str() {
        "qft" => gen_qft(args.n)?,
        "bv" => gen_bv(args.n, &"1".repeat(args.n.saturating_sub(1)))?,
        other => {
            return Err(Error::NoiseSpec(format!(
                "unknown benchmark family `{other}` (expected qft or bv)"
            )))
        }
    };
    let opts = FidelityOptions {
        workers: args.workers.max(1),
        ..Default::default()
    };
    let run_individual = !matches!(args.algorithm, Some(AlgorithmArg::Collective));
    let run_collective = !matches!(args.algorithm, Some(AlgorithmArg::Individual));

    println!(
        "{:<8} {:>3} {:>5} {:>3}  {:>14}  {:>10} {:>7}  {:>10} {:>7}",
        "circuit", "n", "|G|", "k", "fj", "alg2_s", "nodes2", "alg1_s", "nodes1"
    );
    let mut rows = Vec::new();
    for k in lo..=hi {
        let mut rng = ChaCha12Rng::seed_from_u64(args.seed);
        let spec = random_noise_spec(&mut rng, &ideal, k, &args.channel, args.p);
        let noisy = insert_noise(&ideal, &spec)?;
        let name = format!("{}{}", args.family, args.n);

        let mut fj = f64::NAN;
        let mut alg2 = None;
        let mut alg1 = None;
        if run_collective {
            let t = Instant::now();
            let r = fidelity_collective(&ideal, &noisy, &opts)?;
            alg2 = Some((t.elapsed().as_secs_f64(), r.peak_nodes));
            fj = r.raw_fj;
        }
        if run_individual {
            // the per-term loop is pointless beyond ~1M terms; skip unless
            // explicitly requested
            let terms = fidelity::total_terms(&noisy);
            let forced = matches!(args.algorithm, Some(AlgorithmArg::Individual));
            if terms <= 1 << 20 || forced {
                let t = Instant::now();
                let r = fidelity_individual(&ideal, &noisy, None, &opts)?;
                alg1 = Some((t.elapsed().as_secs_f64(), r.peak_nodes));
                if run_collective && (fj - r.raw_fj).abs() > 1e-9 {
                    return Err(Error::Internal(format!(
                        "algorithms disagree: collective {fj} vs individual {}",
                        r.raw_fj
                    )));
                }
                fj = r.raw_fj;
            }
        }

        let fmt = |x: Option<(f64, usize)>| match x {
            Some((t, nodes)) => format!("{:>10.4} {:>7}", t, nodes),
            None => format!("{:>10} {:>7}", "-", "-"),
        };
        println!(
            "{:<8} {:>3} {:>5} {:>3}  {:>14.9}  {}  {}",
            name,
            args.n,
            ideal.num_gates(),
            k,
            fj,
            fmt(alg2),
            fmt(alg1)
        );
        rows.push(BenchRow {
            circuit: name,
            n: args.n,
            gates: ideal.num_gates(),
            noises: k,
            fj,
            alg2,
            alg1,
        });
    }

    if let Some(path) = &args.csv {
        let mut csv = String::from("circuit,n,gates,noises,fj,alg2_time_s,alg2_nodes,alg1_time_s,alg1_nodes\n");
        for r in &rows {
            let cell = |x: Option<(f64, usize)>| match x {
                Some((t, nodes)) => format!("{t},{nodes}"),
                None => ",".to_string(),
            };
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.circuit,
                r.n,
                r.gates,
                r.noises,
                r.fj,
                cell(r.alg2),
                cell(r.alg1)
            ));
        }
        fs::write(path, csv)
            .map_err(|e| Error::NoiseSpec(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}
