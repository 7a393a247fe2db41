use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use vqe_partition::baranyai::{binomial, pad_and_build_with, FlowEngine, Schedule};
use vqe_partition::oracles::{
    validate_families, validate_schedule, verify_anticommuting_chain, verify_disjoint_commutation,
    verify_jw_against_matrices, verify_sliding_invariance,
};
use vqe_partition::partition::{
    commuting_families, families_to_json, load_coefficients, partition, read_schedule_unchecked,
    residual_families, schedule_to_json, PartitionSummary,
};

#[derive(Parser)]
#[command(
    name = "vqe-partition",
    version,
    about = "Commuting-family partitions for Jordan-Wigner encoded Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Rounding,
    Baseline,
}

impl From<Engine> for FlowEngine {
    fn from(e: Engine) -> Self {
        match e {
            Engine::Rounding => FlowEngine::Rounding,
            Engine::Baseline => FlowEngine::Baseline,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the round schedule of all 4-subsets of N modes.
    Schedule {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "rounding")]
        engine: Engine,
    },
    /// Emit certified commuting families as JSON.
    Families {
        #[arg(long)]
        n: usize,
        /// Coefficients file; zero or absent terms are dropped.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        /// Families JSON destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the oracle suite and print a JSON report.
    Verify {
        /// Add 6-mode matrices and endpoint-sliding checks.
        #[arg(long)]
        deep: bool,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Validate this schedule file instead of a freshly built one.
        #[arg(long)]
        schedule_file: Option<PathBuf>,
    },
    /// Counts, ratios and build times for a list of mode counts.
    Stats {
        #[arg(long, value_delimiter = ',', default_value = "8,12,16,20")]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Exit 2: bad arguments or unreadable input. Exit 1: a check failed.
enum Failure {
    Usage(String),
    Check,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Schedule {
            n,
            format,
            out,
            engine,
        } => run_schedule(n, format, out.as_deref(), engine.into()),
        Command::Families {
            n,
            hamiltonian,
            out,
            format,
        } => run_families(n, hamiltonian.as_deref(), out.as_deref(), format),
        Command::Verify {
            deep,
            n,
            schedule_file,
        } => run_verify(deep, n, schedule_file.as_deref()),
        Command::Stats { n_list, format } => run_stats(&n_list, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn build(n: usize, engine: FlowEngine) -> Result<Schedule, Failure> {
    pad_and_build_with(n, engine).map_err(usage)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

fn run_schedule(
    n: usize,
    format: Format,
    out: Option<&Path>,
    engine: FlowEngine,
) -> Result<(), Failure> {
    let schedule = build(n, engine)?;
    let text = match format {
        Format::Text => schedule.to_text(),
        Format::Json => schedule_to_json(&schedule),
    };
    emit(&text, out)
}

fn summary_text(s: &PartitionSummary) -> String {
    format!(
        "n={} rounds={} families={} dominant={} residual={} dominant_strings={} residual_strings={} \
         max_family_size={} families/C(n-1,3)={}\n{}\n",
        s.n,
        s.rounds,
        s.family_count,
        s.dominant_family_count,
        s.residual_family_count,
        s.dominant_string_count,
        s.residual_string_count,
        s.max_family_size,
        s.family_ratio,
        s.residual_grouping,
    )
}

fn run_families(
    n: usize,
    hamiltonian: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let coeffs = hamiltonian
        .map(load_coefficients)
        .transpose()
        .map_err(usage)?;
    let schedule = build(n, FlowEngine::Rounding)?;
    let report = partition(&schedule, coeffs.as_ref()).map_err(usage)?;
    let summary = match format {
        Format::Text => summary_text(&report.summary),
        Format::Json => {
            let mut s = serde_json::to_string(&report.summary).expect("summary serializes");
            s.push('\n');
            s
        }
    };
    let families = families_to_json(&report.families);
    match out {
        Some(_) => {
            emit(&families, out)?;
            print!("{summary}");
        }
        None => {
            print!("{families}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn run_verify(deep: bool, n: usize, schedule_file: Option<&Path>) -> Result<(), Failure> {
    let schedule = match schedule_file {
        Some(path) => read_schedule_unchecked(path).map_err(usage)?,
        None => build(n, FlowEngine::Rounding)?,
    };
    let disjoint = verify_disjoint_commutation();
    let jw_sizes: &[usize] = if deep { &[4, 5, 6] } else { &[4, 5] };
    let jw: Vec<_> = jw_sizes
        .iter()
        .map(|&k| verify_jw_against_matrices(k))
        .collect();
    let chains: Vec<_> = (1..=8).map(verify_anticommuting_chain).collect();
    let schedule_report = validate_schedule(&schedule);
    // Families are only meaningful on a schedule that passed validation.
    let family_report = if schedule_report.passed {
        let mut families = commuting_families(&schedule).map_err(usage)?;
        families.extend(residual_families(schedule.n, None).map_err(usage)?);
        Some(validate_families(&families))
    } else {
        None
    };
    let sliding = deep.then(|| verify_sliding_invariance(12, 200, 7));

    let passed = disjoint.passed
        && jw.iter().all(|r| r.passed)
        && chains.iter().all(|r| r.passed)
        && schedule_report.passed
        && family_report.as_ref().is_some_and(|r| r.passed)
        && sliding.as_ref().is_none_or(|r| r.passed);
    let report = json!({
        "passed": passed,
        "disjoint_commutation": disjoint,
        "jw_matrices": jw,
        "anticommuting_chains": chains,
        "schedule": schedule_report,
        "families": family_report,
        "sliding_invariance": sliding,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Serialize)]
struct StatsRow {
    n: usize,
    terms: u64,
    strings: u64,
    rounds: usize,
    dominant_families: usize,
    residual_families: usize,
    families_per_c_n1_3: f64,
    strings_per_family: f64,
    dominant_families_per_n3: f64,
    terms_per_n4: f64,
    build_ms: f64,
}

fn run_stats(n_list: &[usize], format: Format) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for &n in n_list {
        let start = Instant::now();
        let schedule = build(n, FlowEngine::Rounding)?;
        let build_ms = start.elapsed().as_secs_f64() * 1e3;
        let dominant = commuting_families(&schedule).map_err(usage)?;
        let residual = residual_families(n, None).map_err(usage)?;
        let terms = binomial(n as u64, 4);
        let strings: usize = dominant.iter().map(|f| f.len()).sum();
        let nf = n as f64;
        rows.push(StatsRow {
            n,
            terms,
            strings: strings as u64,
            rounds: schedule.rounds.len(),
            dominant_families: dominant.len(),
            residual_families: residual.len(),
            families_per_c_n1_3: dominant.len() as f64 / binomial(n as u64 - 1, 3) as f64,
            strings_per_family: strings as f64 / dominant.len() as f64,
            dominant_families_per_n3: dominant.len() as f64 / nf.powi(3),
            terms_per_n4: terms as f64 / nf.powi(4),
            build_ms,
        });
    }
    match format {
        Format::Json => println!("{}", serde_json::to_string(&rows).expect("rows serialize")),
        Format::Text => {
            println!(
                "{:>4} {:>8} {:>9} {:>7} {:>9} {:>9} {:>8} {:>8} {:>9} {:>9} {:>10}",
                "N",
                "terms",
                "strings",
                "rounds",
                "dominant",
                "residual",
                "fam/C",
                "str/fam",
                "fam/N^3",
                "trm/N^4",
                "build_ms"
            );
            for r in &rows {
                println!(
                    "{:>4} {:>8} {:>9} {:>7} {:>9} {:>9} {:>8.3} {:>8.2} {:>9.5} {:>9.5} {:>10.2}",
                    r.n,
                    r.terms,
                    r.strings,
                    r.rounds,
                    r.dominant_families,
                    r.residual_families,
                    r.families_per_c_n1_3,
                    r.strings_per_family,
                    r.dominant_families_per_n3,
                    r.terms_per_n4,
                    r.build_ms
                );
            }
        }
    }
    Ok(())
}
