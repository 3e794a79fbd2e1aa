use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rigcoh_cli::corpus::{self, EXAMPLES};
use rigcoh_cli::{failed, run_task, Backend, TaskSpec};

#[derive(Parser)]
#[command(name = "rigcoh", version, about = "Rigid cohomology of algebras over F_p by rank stabilization")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a task file (or the name of a built-in example) and write a JSON report.
    Run {
        task: String,
        /// Fail if any degree is unresolved.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum)]
        backend: Option<Backend>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// List the built-in examples.
    Examples,
    /// Run every built-in example and report pass/fail per task.
    Verify {
        #[arg(long)]
        strict: bool,
    },
}

fn load(task: &str) -> Result<(TaskSpec, String, String), String> {
    if std::path::Path::new(task).exists() {
        let (spec, text) = TaskSpec::load(task).map_err(|e| e.to_string())?;
        return Ok((spec, text, task.to_string()));
    }
    match corpus::find(task) {
        Some(ex) => {
            let spec = TaskSpec::from_toml(ex.file, ex.text).map_err(|e| e.to_string())?;
            Ok((spec, ex.text.to_string(), ex.file.to_string()))
        }
        None => Err(format!("{task}: no such file or example")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Examples => {
            for ex in EXAMPLES {
                println!("{:<24} {}", ex.name, ex.description());
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { task, strict, backend, out } => {
            let (spec, text, path) = match load(&task) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = match run_task(&spec, &path, &text, backend) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let json = serde_json::to_string_pretty(&report).expect("serializable");
            match out {
                Some(o) => {
                    if let Err(e) = std::fs::write(&o, json + "\n") {
                        eprintln!("error: {o}: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{json}"),
            }
            for c in report.payload.checks.iter().filter(|c| !c.passed) {
                eprintln!("failed: {} {}", c.name, c.detail);
            }
            if strict && !report.payload.unresolved.is_empty() {
                eprintln!("unresolved degrees: {:?}", report.payload.unresolved);
            }
            if failed(&report, strict) {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            }
        }
        Cmd::Verify { strict } => {
            let mut bad = 0;
            for ex in EXAMPLES {
                let result = TaskSpec::from_toml(ex.file, ex.text).and_then(|s| run_task(&s, ex.file, ex.text, None));
                match result {
                    Ok(r) => {
                        let ok = !failed(&r, strict);
                        bad += usize::from(!ok);
                        println!("{} {:<24} {} ms", if ok { "PASS" } else { "FAIL" }, ex.name, r.timing.wall_clock_ms);
                        for c in r.payload.checks.iter().filter(|c| !c.passed) {
                            println!("     {} {}", c.name, c.detail);
                        }
                    }
                    Err(e) => {
                        bad += 1;
                        println!("FAIL {:<24} {e}", ex.name);
                    }
                }
            }
            if bad == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
