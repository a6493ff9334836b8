use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use qcfa::analysis::{self, Generators, VerifyOptions};
use qcfa::automaton::{read_machine_file, validate_machine, write_machine, write_machine_file, MachineSpec};
use qcfa::scalar::{decimal_string, rational_to_f64};
use qcfa::sim::{default_step_cap, Executor};
use qcfa::zoo::{build_by_name, MACHINE_NAMES};
use qcfa::Error;

#[derive(Parser)]
#[command(name = "qcfa", version, about = "Simulate and analyze two-way finite automata with quantum and classical states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in machine to a spec file and print its k.
    Build {
        /// One of palindrome3, palindrome-qubit, anbn.
        machine: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Output path; the spec goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a machine for well-formedness.
    Validate {
        /// Built-in name or spec file path.
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
    /// Run seeded Monte Carlo trials.
    Run {
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to 10⁴·(n+2)⁴.
        #[arg(long)]
        step_cap: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the step log of one run.
    Trace {
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        step_cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exact per-pass and aggregate halting probabilities of a built-in machine.
    Analyze {
        #[arg(long)]
        machine: String,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Repeat for several inputs.
        #[arg(long, required = true)]
        input: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run all lemma checks and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        gap_max: i64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Use a deliberately broken generator matrix.
        #[arg(long, hide = true)]
        corrupt_matrix: bool,
    },
    /// Mean running time of the aⁿbⁿ machine against input length.
    Scaling {
        #[arg(long, default_value = "anbn")]
        machine: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Comma-separated even lengths m; inputs are a^{m/2}b^{m/2}.
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        lengths: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        step_cap: Option<u64>,
        /// Largest projected total step count.
        #[arg(long, default_value_t = analysis::DEFAULT_SCALING_BUDGET)]
        budget: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Verification failures, as distinct from errors.
struct Failed;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err((out, Failed))) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) => 1,
        Error::Resource(_) => 3,
        _ => 2,
    }
}

type Output = std::result::Result<String, (String, Failed)>;

fn load(machine: &str, epsilon: f64) -> qcfa::Result<MachineSpec> {
    if MACHINE_NAMES.contains(&machine) {
        return build_by_name(machine, epsilon);
    }
    let path = Path::new(machine);
    if path.exists() {
        return read_machine_file(path);
    }
    Err(Error::Parameter(format!(
        "`{machine}` is neither a built-in machine ({}) nor a file",
        MACHINE_NAMES.join(", ")
    )))
}

fn executor(machine: &str, epsilon: f64) -> qcfa::Result<Executor> {
    Executor::new(Arc::new(load(machine, epsilon)?))
}

fn json<T: serde::Serialize>(v: &T) -> qcfa::Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
}

fn exact_cells(r: &BigRational) -> String {
    format!("{r},{}", decimal_string(rational_to_f64(r)))
}

fn execute(command: Command) -> qcfa::Result<Output> {
    let mut out = String::new();
    match command {
        Command::Build { machine, epsilon, out: path } => {
            let spec = build_by_name(&machine, epsilon)?;
            let k = &spec.metadata()["k"];
            match path {
                Some(p) => {
                    write_machine_file(&spec, &p)?;
                    writeln!(out, "wrote {}", p.display()).unwrap();
                    writeln!(out, "k={k}").unwrap();
                }
                None => {
                    out.push_str(&write_machine(&spec)?);
                    eprintln!("k={k}");
                }
            }
        }
        Command::Validate { machine, epsilon } => {
            let spec = load(&machine, epsilon)?;
            let report = validate_machine(&spec);
            if !report.is_ok() {
                return Ok(Err((format!("{report}\n"), Failed)));
            }
            writeln!(out, "ok: {} ({} classical states)", spec.name(), spec.classical_states().len()).unwrap();
        }
        Command::Run { machine, epsilon, input, trials, seed, step_cap, format } => {
            let ex = executor(&machine, epsilon)?;
            let cap = step_cap.unwrap_or_else(|| default_step_cap(input.chars().count()));
            let s = ex.run_trials(&input, trials, seed, cap)?;
            match format {
                Format::Json => out = json(&s)?,
                Format::Csv => {
                    writeln!(out, "trials,accepted,rejected,capped,mean_steps,variance_steps,seed").unwrap();
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        s.trials,
                        s.accepted,
                        s.rejected,
                        s.capped,
                        decimal_string(s.mean_steps),
                        decimal_string(s.variance_steps),
                        s.seed
                    )
                    .unwrap();
                }
            }
        }
        Command::Trace { machine, epsilon, input, seed, step_cap, format } => {
            let t = executor(&machine, epsilon)?.trace(&input, seed, step_cap)?;
            match format {
                Format::Json => out = json(&t)?,
                Format::Csv => {
                    writeln!(out, "step,state,head,symbol,action,outcome").unwrap();
                    for e in &t.entries {
                        let outcome = e.outcome.map(|o| o.to_string()).unwrap_or_default();
                        writeln!(out, "{},{},{},{},{},{}", e.step, e.state, e.head, e.symbol, e.action, outcome).unwrap();
                    }
                    let verdict = t.verdict.map(|v| v.to_string()).unwrap_or_else(|| "running".into());
                    writeln!(out, "# final state={} head={} verdict={verdict}", t.final_state, t.final_head).unwrap();
                }
            }
        }
        Command::Analyze { machine, epsilon, input, format } => {
            let k = load(&machine, epsilon)?.metadata()["k"].clone();
            let mut rows = Vec::new();
            for x in &input {
                let p = analysis::machine_pass_probs(&machine, epsilon, x)?;
                let h = analysis::aggregate_halting(&p)?;
                rows.push((x, p, h));
            }
            match format {
                Format::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|(x, p, h)| {
                            serde_json::json!({
                                "input": x,
                                "k": k,
                                "exact": p.p_rej_is_exact(),
                                "p_rej": p.p_rej.to_string(),
                                "p_rej_decimal": rational_to_f64(&p.p_rej),
                                "p_acc": p.p_acc.to_string(),
                                "accept": h.accept.to_string(),
                                "accept_decimal": rational_to_f64(&h.accept),
                                "reject": h.reject.to_string(),
                                "reject_decimal": rational_to_f64(&h.reject),
                                "expected_iterations": rational_to_f64(&h.expected_iterations),
                            })
                        })
                        .collect();
                    out = json(&v)?;
                }
                Format::Csv => {
                    writeln!(
                        out,
                        "input,k,exact,p_rej,p_rej_decimal,p_acc,p_acc_decimal,accept,accept_decimal,reject,reject_decimal,expected_iterations"
                    )
                    .unwrap();
                    for (x, p, h) in &rows {
                        writeln!(
                            out,
                            "{x},{k},{},{},{},{},{},{}",
                            p.p_rej_is_exact(),
                            exact_cells(&p.p_rej),
                            exact_cells(&p.p_acc),
                            exact_cells(&h.accept),
                            exact_cells(&h.reject),
                            decimal_string(rational_to_f64(&h.expected_iterations))
                        )
                        .unwrap();
                    }
                }
            }
        }
        Command::Verify { n_max, seed, gap_max, format, corrupt_matrix } => {
            let g = if corrupt_matrix { Generators::corrupted() } else { Generators::standard() };
            let opts = VerifyOptions { n_max, seed, gap_max, ..VerifyOptions::default() };
            let rows = analysis::verify_all(&g, &opts)?;
            match format {
                Format::Json => out = json(&rows)?,
                Format::Csv => {
                    writeln!(out, "check,result,detail").unwrap();
                    for r in &rows {
                        let result = if r.passed { "PASS" } else { "FAIL" };
                        writeln!(out, "{},{result},\"{}\"", r.name, r.detail).unwrap();
                    }
                }
            }
            if rows.iter().any(|r| !r.passed) {
                return Ok(Err((out, Failed)));
            }
        }
        Command::Scaling { machine, epsilon, lengths, trials, seed, step_cap, budget, format } => {
            if machine != "anbn" {
                return Err(Error::Parameter(format!("scaling supports only the anbn machine, got `{machine}`")));
            }
            let r = analysis::runtime_scaling(epsilon, &lengths, trials, seed, step_cap, budget)?;
            match format {
                Format::Json => out = json(&r)?,
                Format::Csv => {
                    writeln!(out, "m,trials,accepted,rejected,capped,mean_steps,variance_steps").unwrap();
                    for row in &r.rows {
                        let s = &row.stats;
                        writeln!(
                            out,
                            "{},{},{},{},{},{},{}",
                            row.m,
                            s.trials,
                            s.accepted,
                            s.rejected,
                            s.capped,
                            decimal_string(s.mean_steps),
                            decimal_string(s.variance_steps)
                        )
                        .unwrap();
                    }
                    writeln!(out, "# exponent={}", decimal_string(r.exponent)).unwrap();
                }
            }
        }
    }
    Ok(Ok(out))
}
