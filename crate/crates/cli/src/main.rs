mod commands;
mod figures;
mod output;
mod spec;

use clap::{Parser, Subcommand};
use commands::{CliError, CliResult};
use iftr::montecarlo::SimConfig;
use spec::{db_to_linear, Command, Format, ParamSet, RunSpec, Sweep};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Statistics and link performance of the IFTR fading model.
///
/// Results go to stdout (or --out) as CSV or JSON. JSON output can be fed
/// back through --input to repeat a run exactly.
#[derive(Debug, Parser)]
#[command(name = "iftr", version)]
struct Cli {
    /// Average SNR γ̄ (linear unless --db) [default: 1].
    #[arg(long = "gamma-bar", global = true, allow_negative_numbers = true)]
    gamma_bar: Option<f64>,
    /// Power ratio of the specular components to the diffuse one.
    #[arg(long = "K", global = true, default_value_t = 10.0)]
    k: f64,
    /// Specular imbalance Δ in [0, 1].
    #[arg(long, global = true, default_value_t = 0.5)]
    delta: f64,
    /// Shadowing shape of the first specular component.
    #[arg(long, global = true, default_value_t = 8.0)]
    m1: f64,
    /// Shadowing shape of the second specular component.
    #[arg(long, global = true, default_value_t = 5.0)]
    m2: f64,
    /// Number of series terms kept.
    #[arg(long = "J", global = true, default_value_t = 40)]
    terms: usize,
    #[arg(long, global = true, default_value_t = SimConfig::default().seed)]
    seed: u64,
    /// Monte Carlo draws per estimate.
    #[arg(long, global = true, default_value_t = SimConfig::default().num_samples)]
    samples: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Read γ̄, gamma_th and R_th in dB.
    #[arg(long, global = true)]
    db: bool,
    /// Sweep one variable: var:start:stop:points[:db].
    #[arg(long, global = true)]
    sweep: Option<Sweep>,
    /// Add Monte Carlo columns.
    #[arg(long, global = true)]
    mc: bool,
    /// Replay a run from a JSON result file or a bare run description.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Mixture weights A_j, j < J.
    Coeffs,
    /// SNR density on an even grid.
    Pdf {
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// SNR distribution function on an even grid.
    Cdf {
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Generalized MGF E[γ^n e^{sγ}].
    Gmgf {
        #[arg(long, default_value_t = 0.0)]
        n: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
        s: f64,
    },
    /// Moments E[γ^n] for n = 1..=max-order.
    Moments {
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
    /// Amount of fading.
    Aof,
    /// Ergodic capacity in bit/s/Hz.
    Capacity,
    /// P(γ < gamma_th).
    Outage {
        /// Threshold SNR (linear unless --db) [default: 1].
        #[arg(long, allow_negative_numbers = true)]
        gamma_th: Option<f64>,
    },
    /// Outage of an N-branch MRC receiver with L Rayleigh interferers.
    OutageCci {
        #[arg(long = "N", default_value_t = 2)]
        antennas: usize,
        #[arg(long = "L", default_value_t = 1)]
        interferers: usize,
        /// Mean power of each interferer.
        #[arg(long = "P-I", default_value_t = 1.0)]
        interference_power: f64,
        /// SIR threshold (linear unless --db) [default: 1].
        #[arg(long = "R-th", allow_negative_numbers = true)]
        sir_threshold: Option<f64>,
    },
    /// Average BER for Σ α Q(√(βγ)) modulations.
    Ber {
        /// Comma-separated alpha:beta pairs; BPSK is 1:2.
        #[arg(long, default_value = "1:2")]
        modulation: String,
    },
    /// KS distance between J-term and reference CDFs for the Table I rows.
    KsTable {
        #[arg(long, value_delimiter = ',', default_value = "20,30,40")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = iftr::model::REFERENCE_TERMS)]
        reference: usize,
        #[arg(long, default_value_t = 2000)]
        grid_points: usize,
        /// Use --K/--m1/--m2/--delta instead of the Table I rows.
        #[arg(long)]
        custom: bool,
    },
    /// Simulated statistics next to their analytic values.
    Simulate {
        /// Threshold SNR (linear unless --db) [default: 1].
        #[arg(long, allow_negative_numbers = true)]
        gamma_th: Option<f64>,
    },
    /// Data behind figure N (1..=8).
    Figure { number: u8 },
}

fn parse_modulation(s: &str) -> CliResult<Vec<(f64, f64)>> {
    s.split(',')
        .map(|pair| {
            let (a, b) = pair.split_once(':').ok_or_else(|| {
                CliError::Validation(format!("modulation term '{pair}' must be alpha:beta"))
            })?;
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Validation(format!("'{t}' is not a number")))
            };
            Ok((num(a)?, num(b)?))
        })
        .collect()
}

fn build_spec(cli: &Cli) -> CliResult<RunSpec> {
    // unset SNR-like inputs default to 1 (0 dB) whatever the scale
    let snr = |v: Option<f64>| match v {
        Some(v) if cli.db => db_to_linear(v),
        Some(v) => v,
        None => 1.0,
    };
    let command = match cli.command.as_ref() {
        None => {
            return Err(CliError::Validation(
                "a subcommand or --input is required".into(),
            ))
        }
        Some(Sub::Coeffs) => Command::Coeffs,
        Some(&Sub::Pdf { x_max, points }) => Command::Pdf { x_max, points },
        Some(&Sub::Cdf { x_max, points }) => Command::Cdf { x_max, points },
        Some(&Sub::Gmgf { n, s }) => Command::Gmgf { n, s },
        Some(&Sub::Moments { max_order }) => Command::Moments { max_order },
        Some(Sub::Aof) => Command::Aof,
        Some(Sub::Capacity) => Command::Capacity,
        Some(&Sub::Outage { gamma_th }) => Command::Outage {
            gamma_th: snr(gamma_th),
        },
        Some(&Sub::OutageCci {
            antennas,
            interferers,
            interference_power,
            sir_threshold,
        }) => Command::OutageCci {
            antennas,
            interferers,
            interference_power,
            sir_threshold: snr(sir_threshold),
        },
        Some(Sub::Ber { modulation }) => Command::Ber {
            modulation: parse_modulation(modulation)?,
        },
        Some(Sub::KsTable {
            orders,
            reference,
            grid_points,
            custom,
        }) => Command::KsTable {
            orders: orders.clone(),
            reference: *reference,
            grid_points: *grid_points,
            custom: *custom,
        },
        Some(&Sub::Simulate { gamma_th }) => Command::Simulate {
            gamma_th: snr(gamma_th),
        },
        Some(&Sub::Figure { number }) => Command::Figure { number },
    };
    Ok(RunSpec {
        command,
        params: ParamSet {
            gamma_bar: snr(cli.gamma_bar),
            m1: cli.m1,
            m2: cli.m2,
            k: cli.k,
            delta: cli.delta,
        },
        terms: cli.terms,
        seed: cli.seed,
        samples: cli.samples,
        monte_carlo: cli.mc,
        sweep: cli.sweep,
        format: cli.format.unwrap_or(Format::Csv),
    })
}

/// Accepts either a bare run description or a full JSON result document.
fn read_spec(path: &PathBuf, format: Option<Format>) -> CliResult<RunSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let mut inner = match value.get("inputs") {
        Some(inputs) => inputs.clone(),
        None => value,
    };
    if let serde_json::Value::Object(m) = &mut inner {
        m.remove("version");
    }
    let mut spec: RunSpec = serde_json::from_value(inner)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(f) = format {
        spec.format = f;
    }
    Ok(spec)
}

fn execute(cli: &Cli) -> CliResult<()> {
    let spec = match &cli.input {
        Some(path) => read_spec(path, cli.format)?,
        None => build_spec(cli)?,
    };
    let (table, meta) = commands::run(&spec)?;
    let io_err = |e: std::io::Error| match &cli.out {
        Some(p) => CliError::Io(format!("{}: {e}", p.display())),
        None => CliError::Io(e.to_string()),
    };
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(io_err)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    output::write_table(&mut *sink, &table, &spec, &meta).map_err(io_err)?;
    sink.flush().map_err(io_err)?;
    if spec.format == Format::Csv {
        eprintln!("residual_mass={}", output::format_number(meta.residual_mass));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("iftr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
