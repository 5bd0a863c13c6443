use std::path::PathBuf;
use std::process::ExitCode;

use bbf::{config, default_registry, output_dir, run_suite, RunConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use bbf_core::lie::LieAlgebra;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bbf", version, about = "Run verification suites for the BF-theory toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one suite and write <suite>.json and <suite>.csv
    Run {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List registered suites
    List,
    /// Check a structure-constant file for antisymmetry, Jacobi and unimodularity
    CheckAlgebra { file: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = match default_registry() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return code(EXIT_CONFIG);
        }
    };
    match cli.command {
        Command::List => {
            for s in registry.list() {
                println!("{:<13} {}\n{:<13} claim: {}", s.name, s.description, "", s.claim);
            }
            code(EXIT_PASS)
        }
        Command::CheckAlgebra { file } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return code(EXIT_CONFIG);
                }
            };
            let name = file.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            match LieAlgebra::parse(name, &text) {
                Err(e) => {
                    eprintln!("error: {e}");
                    code(EXIT_CONFIG)
                }
                Ok(l) => {
                    let r = l.check();
                    println!("dimension     {}", l.dim());
                    println!("antisymmetric {}", r.antisymmetric);
                    println!("jacobi        {}", r.jacobi);
                    println!("unimodular    {}", r.unimodular);
                    code(if r.antisymmetric && r.jacobi { EXIT_PASS } else { EXIT_FAIL })
                }
            }
        }
        Command::Run { suite, config: path, out } => {
            let setup = || -> Result<_, bbf::ConfigError> {
                let cfg = match &path {
                    Some(p) => RunConfig::load(p)?,
                    None => RunConfig::default(),
                };
                let threads = config::threads_from_env()?;
                Ok((cfg, threads))
            };
            let (cfg, threads) = match setup() {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(EXIT_CONFIG);
                }
            };
            let dir = output_dir(out, &cfg);
            let report = match run_suite(&registry, &suite, cfg, threads) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(EXIT_CONFIG);
                }
            };
            for r in report.failures() {
                let got = r.computed.as_ref().map(|v| v.to_string()).unwrap_or_else(|| "-".into());
                eprintln!("FAIL {}: expected {}, got {}{}", r.id, r.expected, got, r.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default());
            }
            for n in &report.notes {
                println!("note: {n}");
            }
            let passed = report.records.iter().filter(|r| r.pass).count();
            println!("{}: {}/{} checks passed", report.suite, passed, report.records.len());
            match report.write(&dir) {
                Ok((j, c)) => println!("wrote {} and {}", j.display(), c.display()),
                Err(e) => {
                    eprintln!("error: cannot write reports to {}: {e}", dir.display());
                    return code(EXIT_CONFIG);
                }
            }
            code(if report.passed { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}
