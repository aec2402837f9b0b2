use std::fs;
use std::io::{self, BufReader, Read};
use std::process::ExitCode;

use muledtn_cli::config::{self, ExperimentConfig};
use muledtn_cli::output::OutputFormat;
use muledtn_cli::{commands, CliError};

const USAGE: &str = "\
muledtn - data-mule DTN corridor modeling and fleet sizing

USAGE:
    muledtn <COMMAND> [OPTIONS]

COMMANDS:
    analyze     closed-form metrics for the configured route
    simulate    event-driven simulation with replications
    sweep-n     metrics table over the configured fleet sizes
    sweep-rtt   analytic metrics over target mean round-trip times
    optimize    minimum fleet size meeting the QoS targets
    ingest      fit travel-time statistics from a trip CSV (file or stdin)

OPTIONS:
    --config <PATH>    configuration file (required except for ingest)
    --seed <U64>       override the configured base random seed
    --output <FMT>     csv or json (default json)
    --out <PATH>       write the report to a file instead of stdout
    -h, --help         print this help

EXIT CODES:
    0 success, 1 usage or validation error, 2 I/O error";

struct Invocation {
    command: String,
    config_path: Option<String>,
    seed: Option<u64>,
    format: OutputFormat,
    out: Option<String>,
    /// Optional trace file for `ingest`.
    positional: Option<String>,
}

fn parse_args(args: &[String]) -> Result<Invocation, CliError> {
    let mut iter = args.iter();
    let command = iter
        .next()
        .ok_or_else(|| CliError::Usage("missing command".into()))?
        .clone();
    if command == "-h" || command == "--help" {
        return Ok(Invocation {
            command: "help".into(),
            config_path: None,
            seed: None,
            format: OutputFormat::Json,
            out: None,
            positional: None,
        });
    }
    let mut inv = Invocation {
        command,
        config_path: None,
        seed: None,
        format: OutputFormat::Json,
        out: None,
        positional: None,
    };
    while let Some(arg) = iter.next() {
        let mut value_for = |flag: &str| {
            iter.next()
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("{flag} needs a value")))
        };
        match arg.as_str() {
            "--config" => inv.config_path = Some(value_for("--config")?),
            "--seed" => {
                let raw = value_for("--seed")?;
                inv.seed = Some(raw.parse().map_err(|_| {
                    CliError::Usage(format!("--seed expects an unsigned integer, got `{raw}`"))
                })?);
            }
            "--output" => {
                inv.format = match value_for("--output")?.as_str() {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => {
                        return Err(CliError::Usage(format!(
                            "--output expects `csv` or `json`, got `{other}`"
                        )))
                    }
                };
            }
            "--out" => inv.out = Some(value_for("--out")?),
            "-h" | "--help" => inv.command = "help".into(),
            other if other.starts_with('-') => {
                return Err(CliError::Usage(format!("unknown option `{other}`")));
            }
            other => {
                if inv.positional.is_some() {
                    return Err(CliError::Usage(format!("unexpected argument `{other}`")));
                }
                inv.positional = Some(other.to_string());
            }
        }
    }
    Ok(inv)
}

fn load_config(inv: &Invocation, required: bool) -> Result<ExperimentConfig, CliError> {
    match &inv.config_path {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading config {path}: {e}")))?;
            config::parse(&text)
        }
        None if required => Err(CliError::Usage(format!(
            "`{}` needs --config <PATH>",
            inv.command
        ))),
        None => Ok(ExperimentConfig::default()),
    }
}

fn deliver(inv: &Invocation, text: String) -> Result<(), CliError> {
    match &inv.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let inv = parse_args(args)?;
    match inv.command.as_str() {
        "help" => {
            println!("{USAGE}");
            Ok(())
        }
        "analyze" => {
            let cfg = load_config(&inv, true)?;
            deliver(&inv, commands::analyze(&cfg, inv.format)?)
        }
        "simulate" => {
            let cfg = load_config(&inv, true)?;
            deliver(&inv, commands::simulate(&cfg, inv.seed, inv.format)?)
        }
        "sweep-n" => {
            let cfg = load_config(&inv, true)?;
            deliver(&inv, commands::sweep_n(&cfg, inv.seed, inv.format)?)
        }
        "sweep-rtt" => {
            let cfg = load_config(&inv, true)?;
            deliver(&inv, commands::sweep_rtt(&cfg, inv.format)?)
        }
        "optimize" => {
            let cfg = load_config(&inv, true)?;
            deliver(&inv, commands::optimize(&cfg, inv.format)?)
        }
        "ingest" => {
            let cfg = load_config(&inv, false)?;
            let (text, warnings) = match &inv.positional {
                Some(path) => {
                    let file = fs::File::open(path)
                        .map_err(|e| CliError::Io(format!("opening {path}: {e}")))?;
                    commands::ingest(&cfg, BufReader::new(file), inv.format)?
                }
                None => {
                    let mut buffer = String::new();
                    io::stdin()
                        .read_to_string(&mut buffer)
                        .map_err(|e| CliError::Io(format!("reading stdin: {e}")))?;
                    commands::ingest(&cfg, buffer.as_bytes(), inv.format)?
                }
            };
            for warning in warnings {
                eprintln!("{warning}");
            }
            deliver(&inv, text)
        }
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_usage() {
                eprintln!("\n{USAGE}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
