use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ifm_core::EventSelector;

use crate::error::{HarnessError, Result};
use crate::report::{run_text, to_json, tsvf_text, RunReport};
use crate::run::{run_protocol, run_scenario, run_tsvf};
use crate::scenario::{bundled, parse_scenario, ProtocolSpec, RepeatChoice, SamplingSpec, ScenarioSpec, BUNDLED};

#[derive(Debug, Parser)]
#[command(name = "ifm", version, about = "Interaction-free measurement simulator")]
struct Cli {
    /// Print the JSON record instead of the table.
    #[arg(long, global = true)]
    json: bool,
    /// Also write report.txt and report.json into this directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact distribution of a scenario, plus sampled counts.
    Run {
        /// Scenario file, or the name of a bundled scenario.
        scenario: String,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Efficiency of the bomb tester over a transmittance grid.
    Sweep {
        #[arg(long, default_value = "T")]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Zeno efficiency against the number of coupling cycles.
    Zeno {
        #[arg(long, default_value_t = 100)]
        max_n: usize,
    },
    /// Joint distribution, conditionals and weak values of the overlapping interferometers.
    Hardy,
    /// Bomb tester repeated on every D1 click.
    Repeat {
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Round limit; unbounded when omitted.
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Analytic)]
        mode: Mode,
    },
    /// Two-state-vector tables of a scenario.
    Tsvf {
        scenario: String,
        /// Event to post-select on; defaults to the scenario's own.
        #[arg(long)]
        postselect: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Analytic,
    Simulated,
}

pub fn load_scenario(name: &str) -> Result<ScenarioSpec> {
    let path = Path::new(name);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{name}: {e}")))?
    } else if let Some(text) = bundled(name) {
        text.to_string()
    } else {
        return Err(HarnessError::NotFound(name.to_string()));
    };
    parse_scenario(&text)
}

/// Zeno cycle counts 1, 2, 5, 10, 20, 50, … up to and including `max_n`.
fn zeno_cycles(max_n: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut decade = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let n = m * decade;
            if n >= max_n {
                break 'outer;
            }
            v.push(n);
        }
        decade *= 10;
    }
    v.push(max_n);
    v
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

enum Output {
    Run(RunReport),
    Tsvf(crate::report::TsvfReport),
}

fn protocol_report(name: &str, protocol: ProtocolSpec) -> Result<Output> {
    let mut r = RunReport::new(name);
    r.protocol = Some(run_protocol(&protocol)?);
    Ok(Output::Run(r))
}

fn execute(command: Command) -> Result<Output> {
    match command {
        Command::Run { scenario, shots, seed } => {
            let loaded = load_scenario(&scenario)?;
            let sampling = match (shots, seed, loaded.sampling) {
                (Some(shots), seed, s) => Some(SamplingSpec {
                    shots,
                    seed: seed.or(s.map(|s| s.seed)).unwrap_or(0),
                }),
                (None, Some(seed), Some(s)) => Some(SamplingSpec { seed, ..s }),
                (None, Some(_), None) => {
                    return Err(HarnessError::BadParam(
                        "--seed needs --shots or a [sampling] table".into(),
                    ))
                }
                (None, None, s) => s,
            };
            if sampling.is_some_and(|s| s.shots == 0) {
                return Err(HarnessError::BadParam("shots must be at least 1".into()));
            }
            Ok(Output::Run(run_scenario(&loaded, sampling)?))
        }
        Command::Sweep { param, from, to, steps } => {
            if !matches!(param.as_str(), "T" | "t" | "transmittance") {
                return Err(HarnessError::BadParam(format!(
                    "cannot sweep `{param}`; only T is supported"
                )));
            }
            if steps == 0 {
                return Err(HarnessError::BadParam("steps must be at least 1".into()));
            }
            protocol_report(
                "sweep",
                ProtocolSpec::EfficiencyFrontier {
                    grid: grid(from, to, steps),
                },
            )
        }
        Command::Zeno { max_n } => {
            if max_n == 0 {
                return Err(HarnessError::BadParam("--max-n must be at least 1".into()));
            }
            protocol_report(
                "zeno",
                ProtocolSpec::Zeno {
                    cycles: zeno_cycles(max_n),
                },
            )
        }
        Command::Hardy => {
            let loaded = parse_scenario(bundled("hardy").expect("bundled"))?;
            Ok(Output::Run(run_scenario(&loaded, None)?))
        }
        Command::Repeat { t, rounds, mode } => protocol_report(
            "repeat",
            ProtocolSpec::EvRepeated {
                transmittance: t,
                max_rounds: rounds,
                mode: match mode {
                    Mode::Analytic => RepeatChoice::Analytic,
                    Mode::Simulated => RepeatChoice::Simulated,
                },
            },
        ),
        Command::Tsvf { scenario, postselect } => {
            let loaded = load_scenario(&scenario)?;
            let post: EventSelector = match postselect {
                Some(text) => text.parse()?,
                None => loaded.circuit.postselection.clone().ok_or_else(|| {
                    HarnessError::BadParam("scenario has no post-selection; pass --postselect".into())
                })?,
            };
            Ok(Output::Tsvf(run_tsvf(&loaded, &post)?))
        }
    }
}

fn write_files(dir: &Path, text: &str, json: &str) -> Result<()> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.txt"), text).map_err(io)?;
    std::fs::write(dir.join("report.json"), json).map_err(io)?;
    Ok(())
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 2 for bad input, 3 for runtime failures.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = execute(cli.command).and_then(|output| {
        let (text, json) = match &output {
            Output::Run(r) => (run_text(r), to_json(r)),
            Output::Tsvf(r) => (tsvf_text(r), to_json(r)),
        };
        if let Some(dir) = &cli.out {
            write_files(dir, &text, &json)?;
        }
        let shown = if cli.json { json } else { text };
        out.write_all(shown.as_bytes())
            .map_err(|e| HarnessError::Io(e.to_string()))
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, HarnessError::NotFound(_)) {
                let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
                let _ = writeln!(err, "bundled scenarios: {}", names.join(", "));
            }
            e.exit_code()
        }
    }
}
