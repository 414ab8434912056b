//! Command-line front end for `tiqflash`.
//!
//! ```bash
//! tiqflash size -n 6 --vdd 2.5 --gain 38.7 -o design.json
//! tiqflash encode -n 6 --stats -o encoder.fnet
//! tiqflash simulate -d design.json --ramp --rate 1e6 --duration 0.1 -o trace.csv
//! tiqflash analyze -d design.json --dnl --drift -20,25,120 -o report.json
//! tiqflash netlist -d design.json --boosters -o bank.cir
//! tiqflash plot -i trace.csv --kind staircase -o staircase.svg
//! ```
//!
//! Exit status is 0 on success, 1 when the request is invalid and 2 when a
//! computation fails. Diagnostics go to stderr prefixed with `error:`.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

mod commands;
mod plot;

/// Environment variable naming a directory of extra `<name>.json` presets.
pub const PRESET_DIR_ENV: &str = "TIQFLASH_PRESET_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "tiqflash",
    version,
    about = "TIQ flash ADC design and analysis"
)]
struct Cli {
    /// JSON object whose keys mirror the subcommand's long flags; flags
    /// given on the command line take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size a comparator bank against the ideal reference ladder
    Size(SizeArgs),
    /// Generate the fat-tree encoder gate netlist
    Encode(EncodeArgs),
    /// Run a stimulus through a sized converter and write a trace CSV
    Simulate(SimulateArgs),
    /// Linearity and temperature drift report for a design
    Analyze(AnalyzeArgs),
    /// Emit a SPICE netlist of a design
    Netlist(NetlistArgs),
    /// Render a trace or report as SVG
    Plot(PlotArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct SizeArgs {
    /// Resolution in bits
    #[arg(short = 'n', long, value_name = "N")]
    pub bits: Option<u32>,
    /// Supply voltage, V
    #[arg(long, value_name = "V")]
    pub vdd: Option<f64>,
    /// Magnitude of the comparator small-signal gain |A_v|
    #[arg(long, value_name = "GAIN")]
    pub gain: Option<f64>,
    /// Device parameter preset [default: generic-0.25u]
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Width search grid in um as `wmin,wmax,step` [default: 0.5,20,0.05]
    #[arg(long, value_name = "WMIN,WMAX,STEP")]
    pub grid: Option<String>,
    /// Channel length of every device, um [default: 0.25]
    #[arg(long, value_name = "UM")]
    pub length: Option<f64>,
    /// Ladder center voltage [default: threshold of a balanced inverter]
    #[arg(long, value_name = "V")]
    pub center: Option<f64>,
    /// Preference among candidates with equal threshold error
    #[arg(long, value_enum, value_name = "RULE")]
    pub tie_break: Option<TieBreakArg>,
    /// Output design JSON [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub(crate) enum TieBreakArg {
    MinArea,
    LowerThreshold,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct EncodeArgs {
    /// Resolution in bits
    #[arg(short = 'n', long, value_name = "N")]
    pub bits: Option<u32>,
    /// Include the thermometer-to-one-hot stage in the netlist
    #[arg(long)]
    pub fused: bool,
    /// Print gate counts and OR-tree depths
    #[arg(long)]
    pub stats: bool,
    /// Output gate netlist (.fnet) [default: stdout unless --stats]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct SimulateArgs {
    /// Design JSON written by `size`
    #[arg(short, long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    /// Sine stimulus `freq,amplitude,offset` in Hz and V
    #[arg(long, value_name = "F,AMP,OFF", conflicts_with = "ramp")]
    pub sine: Option<String>,
    /// Linear ramp from 0 to VDD over the duration
    #[arg(long)]
    pub ramp: bool,
    /// Sample rate, Hz
    #[arg(long, value_name = "HZ")]
    pub rate: Option<f64>,
    /// Stimulus duration, s
    #[arg(long, value_name = "S")]
    pub duration: Option<f64>,
    /// Evaluate comparators through their transfer curves instead of ideal
    /// thresholds
    #[arg(long)]
    pub analog: bool,
    /// Device parameter preset for --analog [default: generic-0.25u]
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output trace CSV [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct AnalyzeArgs {
    /// Design JSON written by `size`
    #[arg(short, long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    /// Include DNL and INL per code
    #[arg(long)]
    pub dnl: bool,
    /// Include threshold drift at these temperatures, degrees C
    #[arg(long, value_name = "T1,T2,...", allow_hyphen_values = true)]
    pub drift: Option<String>,
    /// Device parameter preset for --drift [default: generic-0.25u]
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output report; `.csv` writes the single requested table, anything
    /// else JSON [default: JSON on stdout]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct NetlistArgs {
    /// Design JSON written by `size`
    #[arg(short, long, value_name = "FILE")]
    pub design: Option<PathBuf>,
    /// Add the two-inverter gain booster to every comparator
    #[arg(long)]
    pub boosters: bool,
    /// Emit `.MODEL` cards from a preset (`generic` is generic-0.25u)
    #[arg(long, value_name = "PRESET")]
    pub model_card: Option<String>,
    /// Also emit the encoder and a top-level TIQ_ADC subcircuit
    #[arg(long)]
    pub encoder: bool,
    /// Gate cells used for the encoder
    #[arg(long, value_enum, value_name = "STYLE")]
    pub gate_style: Option<GateStyleArg>,
    /// NMOS model name [default: NMOS_TIQ]
    #[arg(long, value_name = "NAME")]
    pub model_n: Option<String>,
    /// PMOS model name [default: PMOS_TIQ]
    #[arg(long, value_name = "NAME")]
    pub model_p: Option<String>,
    /// Output SPICE netlist (.cir) [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub(crate) enum GateStyleArg {
    Or2,
    Nand,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub(crate) struct PlotArgs {
    /// Trace CSV, report JSON, or DNL/drift CSV
    #[arg(short, long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Chart to draw
    #[arg(long, value_enum)]
    pub kind: Option<PlotKind>,
    /// Output SVG [default: stdout]
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub(crate) enum PlotKind {
    Staircase,
    Dnl,
    Drift,
}

/// Failure of a command, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files.
    Invalid(String),
    /// A well-formed request that could not be computed or written.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Failed(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<tiqflash::Error> for CliError {
    fn from(e: tiqflash::Error) -> Self {
        if e.is_validation() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Failed(e.to_string())
        }
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

/// Overlays command-line values on the config file: every flag that was
/// given (non-null, or `true` for switches) replaces the file's value.
fn merge<T: Serialize + for<'de> Deserialize<'de>>(cli: T, config: Option<&Value>) -> CliResult<T> {
    let Some(config) = config else { return Ok(cli) };
    let Value::Object(mut merged) = config.clone() else {
        return Err(CliError::Invalid(
            "config file must hold a JSON object".into(),
        ));
    };
    let Value::Object(given) = serde_json::to_value(&cli).expect("arguments serialize") else {
        unreachable!("argument structs serialize to objects")
    };
    for (k, v) in given {
        if !matches!(v, Value::Null | Value::Bool(false)) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Invalid(format!("config file: {e}")))
}

fn read_config(path: &Path) -> CliResult<Value> {
    let text = commands::read_input(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("config file {}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let config = cli.config.as_deref().map(read_config).transpose()?;
    let config = config.as_ref();
    match cli.command {
        Command::Size(a) => commands::size(merge(a, config)?),
        Command::Encode(a) => commands::encode(merge(a, config)?),
        Command::Simulate(a) => commands::simulate(merge(a, config)?),
        Command::Analyze(a) => commands::analyze(merge(a, config)?),
        Command::Netlist(a) => commands::netlist(merge(a, config)?),
        Command::Plot(a) => commands::plot(merge(a, config)?),
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
