use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tiqflash::codes::{self, GateNetlist};
use tiqflash::devices::{DeviceParams, DEFAULT_LENGTH_UM, GENERIC_PRESET};
use tiqflash::metrics::{self, DriftReport, LinearityReport};
use tiqflash::netlist_io::{self, GateStyle, SpiceEmitOptions};
use tiqflash::simulator::{self, AnalogComparator, ComparatorMode, Stimulus, StimulusKind};
use tiqflash::synthesis::{self, BankReport, ComparatorBank, LadderSpec, TieBreak, WidthGrid};

use crate::plot;
use crate::{
    AnalyzeArgs, CliError, CliResult, EncodeArgs, GateStyleArg, NetlistArgs, PlotArgs,
    SimulateArgs, SizeArgs, TieBreakArg, PRESET_DIR_ENV,
};

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| invalid(format!("missing required option {flag}")))
}

pub(crate) fn read_input(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes to `path`, or to stdout when no path was given.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_list(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("{flag}: `{t}` is not a number")))
        })
        .collect()
}

fn parse_fixed<const N: usize>(s: &str, flag: &str, shape: &str) -> CliResult<[f64; N]> {
    parse_list(s, flag)?
        .try_into()
        .map_err(|_| invalid(format!("{flag} expects {shape}")))
}

/// Built-in presets first, then `<name>.json` under the preset directory.
pub(crate) fn load_preset(name: Option<&str>) -> CliResult<DeviceParams> {
    let name = name.unwrap_or(GENERIC_PRESET);
    if let Some(p) = DeviceParams::preset(name) {
        return Ok(p);
    }
    if let Some(dir) = std::env::var_os(PRESET_DIR_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if path.is_file() {
            let text = read_input(&path)?;
            return DeviceParams::from_json(&text)
                .map_err(|e| invalid(format!("preset {}: {e}", path.display())));
        }
    }
    Err(invalid(format!("unknown preset `{name}`")))
}

fn load_bank(path: Option<PathBuf>) -> CliResult<ComparatorBank> {
    let path = required(path, "--design")?;
    let text = read_input(&path)?;
    netlist_io::load_design(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

pub(crate) fn size(a: SizeArgs) -> CliResult<()> {
    let n = required(a.bits, "-n/--bits")?;
    let vdd = required(a.vdd, "--vdd")?;
    let gain = required(a.gain, "--gain")?;
    let params = load_preset(a.preset.as_deref())?;
    let mut grid = WidthGrid::default();
    if let Some(g) = &a.grid {
        let [w_min, w_max, w_step] = parse_fixed(g, "--grid", "wmin,wmax,step")?;
        grid = WidthGrid {
            w_min,
            w_max,
            w_step,
            ..grid
        };
    }
    grid.l_fixed = a.length.unwrap_or(DEFAULT_LENGTH_UM);
    let mut spec = LadderSpec::new(n, vdd, gain);
    if let Some(c) = a.center {
        spec = spec.with_center(c);
    }
    let tie = match a.tie_break {
        Some(TieBreakArg::LowerThreshold) => TieBreak::LowerThreshold,
        Some(TieBreakArg::MinArea) | None => TieBreak::MinArea,
    };
    // Cheap checks first so bad flags fail before the search runs.
    synthesis::compute_ladder(&spec, &params)?;
    grid.validate()?;

    let bank = synthesis::design_bank(&spec, &grid, &params, tie)?;
    emit(a.output.as_deref(), &netlist_io::save_design(&bank))?;
    if a.output.is_some() {
        let r = synthesis::bank_report(&bank);
        println!(
            "{} comparators, V_LSB = {:.4} mV, thresholds {:.6}..{:.6} V, max error {:.3} LSB",
            r.rows,
            bank.ladder.v_lsb * 1e3,
            r.v_min,
            r.v_max,
            r.max_abs_error / bank.ladder.v_lsb
        );
    }
    Ok(())
}

fn stats_text(n: u32, net: &GateNetlist) -> String {
    let s = codes::netlist_stats(net);
    let mut out = String::new();
    writeln!(out, "bits      {n}").unwrap();
    writeln!(out, "inputs    {}", net.n_inputs).unwrap();
    writeln!(
        out,
        "gates     {} (OR2 {}, AND2 {}, NOT {})",
        s.gate_count, s.or_count, s.and_count, s.not_count
    )
    .unwrap();
    writeln!(out, "or depth  {}", s.max_or_depth()).unwrap();
    writeln!(out, "or trees  {}", s.or_gates_per_output.len()).unwrap();
    for k in (0..s.or_gates_per_output.len()).rev() {
        writeln!(
            out,
            "Bit_{k}     {} OR2, depth {}",
            s.or_gates_per_output[k], s.or_depth_per_output[k]
        )
        .unwrap();
    }
    out
}

pub(crate) fn encode(a: EncodeArgs) -> CliResult<()> {
    let n = required(a.bits, "-n/--bits")?;
    let net = if a.fused {
        codes::build_fused_encoder(n)?
    } else {
        codes::build_fat_tree(n)?
    };
    if a.output.is_some() || !a.stats {
        emit(a.output.as_deref(), &netlist_io::netlist_to_text(&net))?;
    }
    if a.stats {
        print!("{}", stats_text(n, &net));
    }
    Ok(())
}

pub(crate) fn simulate(a: SimulateArgs) -> CliResult<()> {
    let kind = match (&a.sine, a.ramp) {
        (Some(_), true) => return Err(invalid("--sine and --ramp are mutually exclusive")),
        (None, false) => return Err(invalid("one of --sine or --ramp is required")),
        (Some(s), false) => {
            let [freq, amplitude, offset] = parse_fixed(s, "--sine", "freq,amplitude,offset")?;
            StimulusKind::Sine {
                amplitude,
                offset,
                freq,
            }
        }
        (None, true) => StimulusKind::Ramp {
            v_start: 0.0,
            v_end: f64::NAN,
        },
    };
    let rate = required(a.rate, "--rate")?;
    let duration = required(a.duration, "--duration")?;
    let bank = load_bank(a.design)?;
    let kind = match kind {
        StimulusKind::Ramp { v_start, .. } => StimulusKind::Ramp {
            v_start,
            v_end: bank.vdd(),
        },
        k => k,
    };
    let stimulus = Stimulus {
        kind,
        sample_rate: rate,
        duration,
    };
    stimulus.validate(bank.vdd())?;
    let mode = if a.analog {
        let params = load_preset(a.preset.as_deref())?;
        ComparatorMode::Analog(AnalogComparator::with_default_booster(bank.vdd(), params))
    } else {
        ComparatorMode::Ideal
    };
    let encoder = codes::build_fat_tree(bank.n_bits)?;
    let trace = simulator::simulate(&bank, &encoder, &stimulus, &mode)?;
    emit(a.output.as_deref(), &trace.to_csv())
}

#[derive(Serialize)]
struct AnalysisReport {
    n_bits: u32,
    vdd: f64,
    v_lsb: f64,
    bank: BankReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    linearity: Option<LinearityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift: Option<DriftReport>,
}

fn is_csv(path: Option<&Path>) -> bool {
    path.and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

pub(crate) fn analyze(a: AnalyzeArgs) -> CliResult<()> {
    let temps = a
        .drift
        .as_deref()
        .map(|s| parse_list(s, "--drift"))
        .transpose()?;
    let csv = is_csv(a.output.as_deref());
    if csv && a.dnl == temps.is_some() {
        return Err(invalid("CSV output needs exactly one of --dnl or --drift"));
    }
    let params = match temps {
        Some(_) => Some(load_preset(a.preset.as_deref())?),
        None => None,
    };
    let bank = load_bank(a.design)?;

    let linearity = a.dnl.then(|| metrics::linearity(&bank));
    let drift = match (&temps, &params) {
        (Some(t), Some(p)) => Some(metrics::bank_temperature_drift(&bank, p, t)?),
        _ => None,
    };
    let text = if csv {
        match (&linearity, &drift) {
            (Some(l), _) => l.to_csv(),
            (_, Some(d)) => d.to_csv(),
            _ => unreachable!("checked above"),
        }
    } else {
        let report = AnalysisReport {
            n_bits: bank.n_bits,
            vdd: bank.vdd(),
            v_lsb: bank.ladder.v_lsb,
            bank: synthesis::bank_report(&bank),
            linearity,
            drift,
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    };
    emit(a.output.as_deref(), &text)
}

pub(crate) fn netlist(a: NetlistArgs) -> CliResult<()> {
    let model_card = match a.model_card.as_deref() {
        None => None,
        Some("generic") => Some(DeviceParams::generic_025u()),
        Some(name) => Some(load_preset(Some(name))?),
    };
    let defaults = SpiceEmitOptions::default();
    let opts = SpiceEmitOptions {
        model_name_n: a.model_n.unwrap_or(defaults.model_name_n),
        model_name_p: a.model_p.unwrap_or(defaults.model_name_p),
        include_boosters: a.boosters,
        include_encoder: a.encoder,
        gate_style: match a.gate_style {
            Some(GateStyleArg::Nand) => GateStyle::NandMapped,
            Some(GateStyleArg::Or2) | None => GateStyle::Or2,
        },
        model_card,
        ..defaults
    };
    opts.validate()?;
    let bank = load_bank(a.design)?;
    let text = netlist_io::emit_spice(&bank, &opts)?;
    emit(a.output.as_deref(), &text)
}

pub(crate) fn plot(a: PlotArgs) -> CliResult<()> {
    let input = required(a.input, "-i/--input")?;
    let kind = required(a.kind, "--kind")?;
    let text = read_input(&input)?;
    let svg = plot::render(kind, &input, &text)?;
    emit(a.output.as_deref(), &svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_lists() {
        assert_eq!(
            parse_fixed::<3>("0.5, 20,0.05", "--grid", "").unwrap(),
            [0.5, 20.0, 0.05]
        );
        assert!(parse_fixed::<3>("0.5,20", "--grid", "").is_err());
        assert!(parse_list("1,x", "--drift").is_err());
        assert_eq!(parse_list("-20,25", "--drift").unwrap(), vec![-20.0, 25.0]);
    }

    #[test]
    fn three_bit_stats() {
        let s = stats_text(3, &codes::build_fat_tree(3).unwrap());
        assert!(s.contains("or depth  2\n"));
        assert!(s.contains("or trees  3\n"));
        for k in 0..3 {
            assert!(s.contains(&format!("Bit_{k}     3 OR2, depth 2\n")), "{s}");
        }
    }
}
