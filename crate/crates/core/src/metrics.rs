//! Converter analysis.
//!
//! DNL and INL use the endpoint convention: with transition voltages
//! `V_0 .. V_{m-1}`, `V_LSB = (V_{m-1} - V_0) / (m - 1)`,
//! `DNL_i = (V_{i+1} - V_i) / V_LSB - 1` and `INL` is the running sum of
//! `DNL` starting at 0.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::devices::{self, DeviceParams};
use crate::synthesis::{self, ComparatorBank, LadderSpec, TieBreak, WidthGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub transitions: Vec<f64>,
    /// `m - 1` entries, LSB.
    pub dnl: Vec<f64>,
    /// `m` entries, LSB; `inl[0] = 0`.
    pub inl: Vec<f64>,
    pub max_abs_dnl: f64,
    pub max_abs_inl: f64,
    pub v_lsb_used: f64,
}

impl LinearityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,transition_V,dnl_lsb,inl_lsb\n");
        for (k, (&v, &inl)) in self.transitions.iter().zip(&self.inl).enumerate() {
            let dnl = self
                .dnl
                .get(k)
                .map(|d| format!("{d:.8e}"))
                .unwrap_or_default();
            writeln!(out, "{k},{v:.8e},{dnl},{inl:.8e}").unwrap();
        }
        out
    }
}

/// Endpoint-fit linearity of an ascending list of transition voltages.
pub fn linearity_of(transitions: &[f64]) -> LinearityReport {
    let m = transitions.len();
    let v_lsb = if m >= 2 {
        (transitions[m - 1] - transitions[0]) / (m - 1) as f64
    } else {
        f64::NAN
    };
    let dnl: Vec<f64> = transitions
        .windows(2)
        .map(|w| (w[1] - w[0]) / v_lsb - 1.0)
        .collect();
    let mut inl = Vec::with_capacity(m);
    if m > 0 {
        inl.push(0.0);
        for d in &dnl {
            inl.push(inl[inl.len() - 1] + d);
        }
    }
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    LinearityReport {
        transitions: transitions.to_vec(),
        max_abs_dnl: max_abs(&dnl),
        max_abs_inl: max_abs(&inl),
        dnl,
        inl,
        v_lsb_used: v_lsb,
    }
}

pub fn linearity(bank: &ComparatorBank) -> LinearityReport {
    linearity_of(&bank.thresholds())
}

/// First and last achieved thresholds.
pub fn full_scale(bank: &ComparatorBank) -> (f64, f64) {
    let t = bank.thresholds();
    (
        t.first().copied().unwrap_or(f64::NAN),
        t.last().copied().unwrap_or(f64::NAN),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub t_c: f64,
    pub v_low: f64,
    pub v_high: f64,
    /// Largest `|V_ref(T) - V_ref(T_ref)|` over the bank, V.
    pub max_ref_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub t_ref_c: f64,
    pub entries: Vec<DriftEntry>,
}

impl DriftReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_c,v_low_V,v_high_V,max_ref_shift_V\n");
        for e in &self.entries {
            writeln!(
                out,
                "{:.8e},{:.8e},{:.8e},{:.8e}",
                e.t_c, e.v_low, e.v_high, e.max_ref_shift
            )
            .unwrap();
        }
        out
    }
}

fn bank_thresholds_at(bank: &ComparatorBank, params: &DeviceParams) -> Result<Vec<f64>> {
    bank.designs
        .iter()
        .map(|d| devices::threshold_from_widths(params, bank.vdd(), d.wp / d.l, d.wn / d.l))
        .collect()
}

/// Recomputes every comparator threshold at each temperature with the
/// widths held fixed.
pub fn bank_temperature_drift(
    bank: &ComparatorBank,
    params: &DeviceParams,
    temperatures: &[f64],
) -> Result<DriftReport> {
    let reference = bank_thresholds_at(bank, params)?;
    let entries = temperatures
        .iter()
        .map(|&t_c| {
            let at_t = devices::apply_temperature(params, t_c)?;
            let v = bank_thresholds_at(bank, &at_t)?;
            let shift = v
                .iter()
                .zip(&reference)
                .fold(0.0f64, |a, (x, r)| a.max((x - r).abs()));
            Ok(DriftEntry {
                t_c,
                v_low: v.iter().copied().fold(f64::INFINITY, f64::min),
                v_high: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                max_ref_shift: shift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DriftReport {
        t_ref_c: params.t_ref_c,
        entries,
    })
}

/// Sizes a bank at the reference temperature and reports its drift.
pub fn temperature_drift(
    spec: &LadderSpec,
    grid: &WidthGrid,
    params: &DeviceParams,
    temperatures: &[f64],
) -> Result<DriftReport> {
    let bank = synthesis::design_bank(spec, grid, params, TieBreak::MinArea)?;
    bank_temperature_drift(&bank, params, temperatures)
}

/// Gate levels from comparator outputs to binary code: one AND/NOT level
/// plus `n - 1` OR levels.
pub fn encoder_latency_bound(n_bits: u32) -> Result<usize> {
    if n_bits < 2 {
        return Err(Error::DegenerateResolution);
    }
    Ok(1 + (n_bits as usize - 1))
}
