//! Behavioral end-to-end conversion:
//! stimulus -> comparator bank -> one-hot generator -> fat-tree encoder.
//!
//! Sampling is ideal (no track/hold, no aperture error). Comparators are
//! either ideal threshold decisions or evaluated through the static
//! transfer curves of the two comparator inverters plus a gain booster.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::codes::{self, BinaryCode, GateNetlist, ThermometerCode};
use crate::devices::{self, DeviceParams, InverterSpec, DEFAULT_LENGTH_UM};
use crate::synthesis::ComparatorBank;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StimulusKind {
    /// `offset + amplitude * sin(2 pi freq t)`.
    Sine {
        amplitude: f64,
        offset: f64,
        freq: f64,
    },
    /// Linear from `v_start` at the first sample to `v_end` at the last.
    Ramp { v_start: f64, v_end: f64 },
    /// Explicit voltages, one per sample. `duration` must still be positive
    /// but does not change the sample count.
    Samples(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    pub kind: StimulusKind,
    /// Hz.
    pub sample_rate: f64,
    /// s.
    pub duration: f64,
}

impl Stimulus {
    pub fn validate(&self, vdd: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidStimulus(msg));
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad(format!("sample rate must be > 0, got {}", self.sample_rate));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be > 0, got {}", self.duration));
        }
        let in_rails = |v: f64| (0.0..=vdd).contains(&v);
        match &self.kind {
            StimulusKind::Sine {
                amplitude,
                offset,
                freq,
            } => {
                if amplitude.is_nan() || *amplitude < 0.0 || !freq.is_finite() || *freq < 0.0 {
                    return bad("sine needs amplitude >= 0 and freq >= 0".into());
                }
                if !in_rails(offset - amplitude) || !in_rails(offset + amplitude) {
                    return bad(format!(
                        "sine {offset} +/- {amplitude} V exceeds the supply rails [0, {vdd}] V"
                    ));
                }
            }
            StimulusKind::Ramp { v_start, v_end } => {
                if !in_rails(*v_start) || !in_rails(*v_end) {
                    return bad(format!(
                        "ramp {v_start} -> {v_end} V exceeds the supply rails"
                    ));
                }
            }
            StimulusKind::Samples(v) => {
                if v.is_empty() {
                    return bad("sample list is empty".into());
                }
                if let Some(x) = v.iter().find(|&&x| !in_rails(x)) {
                    return bad(format!("sample {x} V exceeds the supply rails"));
                }
            }
        }
        Ok(())
    }

    /// `floor(duration * sample_rate) + 1`, or the list length for
    /// explicit samples.
    pub fn sample_count(&self) -> usize {
        match &self.kind {
            StimulusKind::Samples(v) => v.len(),
            _ => (self.duration * self.sample_rate + 1e-9).floor() as usize + 1,
        }
    }
}

/// `(t, v_in)` pairs at `t_k = k / sample_rate`.
pub fn generate_stimulus(s: &Stimulus, vdd: f64) -> Result<Vec<(f64, f64)>> {
    s.validate(vdd)?;
    let n = s.sample_count();
    let t = |k: usize| k as f64 / s.sample_rate;
    let out = match &s.kind {
        StimulusKind::Sine {
            amplitude,
            offset,
            freq,
        } => (0..n)
            .map(|k| (t(k), offset + amplitude * (2.0 * PI * freq * t(k)).sin()))
            .collect(),
        StimulusKind::Ramp { v_start, v_end } => (0..n)
            .map(|k| {
                let v = if n == 1 {
                    *v_start
                } else if k == n - 1 {
                    *v_end
                } else {
                    v_start + (v_end - v_start) * k as f64 / (n - 1) as f64
                };
                (t(k), v)
            })
            .collect(),
        StimulusKind::Samples(v) => v.iter().enumerate().map(|(k, &x)| (t(k), x)).collect(),
    };
    Ok(out)
}

/// Comparator chain evaluated through inverter transfer curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogComparator {
    /// One inverter of the booster pair; both are identical.
    pub booster: InverterSpec,
    /// Logic decision level applied to the booster output, V.
    pub digitize_at: f64,
    pub params: DeviceParams,
}

impl AnalogComparator {
    /// Minimum-size booster (`wp = wn = 0.5 um`, `L = 0.25 um`) digitized
    /// at `V_DD / 2`.
    pub fn with_default_booster(vdd: f64, params: DeviceParams) -> Self {
        AnalogComparator {
            booster: InverterSpec::from_widths(0.5, 0.5, DEFAULT_LENGTH_UM, vdd)
                .expect("default booster geometry is valid"),
            digitize_at: vdd / 2.0,
            params,
        }
    }

    fn validate(&self, vdd: f64) -> Result<()> {
        self.booster.validate(&self.params)?;
        if !(self.digitize_at > 0.0 && self.digitize_at < vdd) {
            return Err(Error::InvalidParams(format!(
                "digitize_at must lie in (0, {vdd}) V, got {}",
                self.digitize_at
            )));
        }
        Ok(())
    }

    /// Booster output for comparator `first` (input inverter; the second
    /// comparator inverter is identical to it).
    pub fn response(&self, first: &InverterSpec, v_in: f64) -> Result<f64> {
        devices::cascade_response(
            &[*first, *first, self.booster, self.booster],
            &self.params,
            v_in,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparatorMode {
    /// `bit[i] = v_in > v_ref_achieved[i]`.
    Ideal,
    Analog(AnalogComparator),
}

/// Comparator-bank outputs for one input voltage.
pub fn quantize(
    v_in: f64,
    bank: &ComparatorBank,
    mode: &ComparatorMode,
) -> Result<ThermometerCode> {
    let bits = match mode {
        ComparatorMode::Ideal => bank
            .designs
            .iter()
            .map(|d| v_in > d.v_ref_achieved)
            .collect(),
        ComparatorMode::Analog(a) => bank
            .designs
            .iter()
            .map(|d| Ok(a.response(&d.inverter(bank.vdd())?, v_in)? > a.digitize_at))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(ThermometerCode::new(bits))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub v_in: f64,
    pub thermometer: ThermometerCode,
    pub code: BinaryCode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub sample_rate: f64,
    pub records: Vec<TraceRecord>,
}

impl SimTrace {
    pub fn codes(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.code.value).collect()
    }

    /// CSV with header `t_s,v_in_V,code`; voltages and times carry nine
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,v_in_V,code\n");
        for r in &self.records {
            writeln!(out, "{:.8e},{:.8e},{}", r.t, r.v_in, r.code.value).unwrap();
        }
        out
    }
}

/// Runs every stimulus sample through the pipeline. Errors refer to the
/// earliest failing sample.
pub fn simulate(
    bank: &ComparatorBank,
    encoder: &GateNetlist,
    stimulus: &Stimulus,
    mode: &ComparatorMode,
) -> Result<SimTrace> {
    bank.validate()?;
    let m = codes::leaf_count(bank.n_bits);
    if encoder.n_inputs != m {
        return Err(Error::Arity {
            expected: m,
            got: encoder.n_inputs,
        });
    }
    if encoder.outputs.len() != bank.n_bits as usize {
        return Err(Error::Arity {
            expected: bank.n_bits as usize,
            got: encoder.outputs.len(),
        });
    }
    encoder.validate()?;
    if let ComparatorMode::Analog(a) = mode {
        a.validate(bank.vdd())?;
    }
    let samples = generate_stimulus(stimulus, bank.vdd())?;
    let results: Vec<Result<TraceRecord>> = samples
        .par_iter()
        .enumerate()
        .map(|(k, &(t, v_in))| {
            let thermometer = quantize(v_in, bank, mode)?;
            let one_hot = codes::one_hot_from_thermometer(&thermometer).map_err(|e| match e {
                Error::Bubble { index } => Error::BubbleAtSample { sample: k, index },
                other => other,
            })?;
            let code = codes::eval_netlist(encoder, &one_hot)?;
            Ok(TraceRecord {
                t,
                v_in,
                thermometer,
                code,
            })
        })
        .collect();
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SimTrace {
        sample_rate: stimulus.sample_rate,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::{ComparatorDesign, ReferenceLadder};

    fn stim(kind: StimulusKind, rate: f64, duration: f64) -> Stimulus {
        Stimulus {
            kind,
            sample_rate: rate,
            duration,
        }
    }

    fn toy_bank() -> ComparatorBank {
        let refs = vec![1.0, 1.25, 1.5];
        ComparatorBank {
            n_bits: 2,
            ladder: ReferenceLadder {
                n_bits: 2,
                vdd: 2.5,
                v_low: 1.0,
                v_high: 1.5,
                v_lsb: 0.25,
                ideal_refs: refs.clone(),
            },
            designs: refs
                .iter()
                .map(|&v| ComparatorDesign::new(1.0, 1.0, 0.25, v, v))
                .collect(),
        }
    }

    #[test]
    fn ramp_three_samples() {
        let s = stim(
            StimulusKind::Ramp {
                v_start: 0.0,
                v_end: 2.5,
            },
            1.0,
            2.0,
        );
        let v: Vec<f64> = generate_stimulus(&s, 2.5)
            .unwrap()
            .iter()
            .map(|x| x.1)
            .collect();
        assert_eq!(v, vec![0.0, 1.25, 2.5]);
    }

    #[test]
    fn zero_amplitude_sine_is_constant() {
        let s = stim(
            StimulusKind::Sine {
                amplitude: 0.0,
                offset: 1.2,
                freq: 1e4,
            },
            1e6,
            1e-5,
        );
        assert!(generate_stimulus(&s, 2.5)
            .unwrap()
            .iter()
            .all(|x| x.1 == 1.2));
    }

    #[test]
    fn sine_peak_at_quarter_period() {
        let s = stim(
            StimulusKind::Sine {
                amplitude: 0.5,
                offset: 1.25,
                freq: 1e4,
            },
            1e6,
            100e-6,
        );
        let v = generate_stimulus(&s, 2.5).unwrap();
        assert_eq!(v.len(), 101);
        assert!((v[25].0 - 25e-6).abs() < 1e-18);
        assert!((v[25].1 - 1.75).abs() < 1e-12);
    }

    #[test]
    fn sine_beyond_rails_rejected() {
        let s = stim(
            StimulusKind::Sine {
                amplitude: 1.5,
                offset: 1.25,
                freq: 1e4,
            },
            1e6,
            1e-4,
        );
        assert!(matches!(
            generate_stimulus(&s, 2.5),
            Err(Error::InvalidStimulus(_))
        ));
        let s = stim(
            StimulusKind::Ramp {
                v_start: 0.0,
                v_end: 1.0,
            },
            0.0,
            1e-4,
        );
        assert!(matches!(s.validate(2.5), Err(Error::InvalidStimulus(_))));
    }

    #[test]
    fn quantize_extremes_and_midpoints() {
        let bank = toy_bank();
        assert_eq!(
            quantize(0.5, &bank, &ComparatorMode::Ideal)
                .unwrap()
                .popcount(),
            0
        );
        assert_eq!(
            quantize(2.0, &bank, &ComparatorMode::Ideal)
                .unwrap()
                .popcount(),
            3
        );
        assert_eq!(
            quantize(1.125, &bank, &ComparatorMode::Ideal)
                .unwrap()
                .popcount(),
            1
        );
        assert_eq!(
            quantize(1.375, &bank, &ComparatorMode::Ideal)
                .unwrap()
                .popcount(),
            2
        );
        // Equality is not "exceeds".
        assert_eq!(
            quantize(1.25, &bank, &ComparatorMode::Ideal)
                .unwrap()
                .popcount(),
            1
        );
    }

    #[test]
    fn constant_input_constant_code() {
        let bank = toy_bank();
        let net = codes::build_fat_tree(2).unwrap();
        let s = stim(StimulusKind::Samples(vec![1.3; 10]), 1e3, 1.0);
        let trace = simulate(&bank, &net, &s, &ComparatorMode::Ideal).unwrap();
        assert!(trace.codes().iter().all(|&c| c == 2));
    }

    #[test]
    fn encoder_size_must_match() {
        let bank = toy_bank();
        let net = codes::build_fat_tree(3).unwrap();
        let s = stim(StimulusKind::Samples(vec![1.3]), 1e3, 1.0);
        assert_eq!(
            simulate(&bank, &net, &s, &ComparatorMode::Ideal).unwrap_err(),
            Error::Arity {
                expected: 3,
                got: 7
            }
        );
    }

    #[test]
    fn csv_layout() {
        let bank = toy_bank();
        let net = codes::build_fat_tree(2).unwrap();
        let s = stim(StimulusKind::Samples(vec![0.5, 1.3]), 1e6, 1.0);
        let csv = simulate(&bank, &net, &s, &ComparatorMode::Ideal)
            .unwrap()
            .to_csv();
        assert_eq!(
            csv,
            "t_s,v_in_V,code\n0.00000000e0,5.00000000e-1,0\n1.00000000e-6,1.30000000e0,2\n"
        );
    }
}
