//! Comparator-bank synthesis.
//!
//! The ideal reference ladder spans `V_center +/- V_DD / (2 |A_v|)` with
//! `2^n - 1` rungs spaced by `V_LSB = (V_H - V_L) / (2^n - 2)`. Each rung is
//! then realized by the width pair whose closed-form inverter threshold is
//! nearest to it, searched over a rectangular width grid at fixed length.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::devices::{self, DeviceParams, InverterSpec, DEFAULT_LENGTH_UM};
use crate::{Error, Result};

/// Largest supported resolution.
pub const MAX_BITS: u32 = 16;
const MAX_GRID_AXIS: usize = 100_000;

/// Inputs of the reference ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderSpec {
    pub n_bits: u32,
    pub vdd: f64,
    /// Target inverter gain magnitude `|A_v|`.
    pub av_mag: f64,
    /// Center threshold; `None` selects the `r = 1` threshold.
    pub v_center: Option<f64>,
}

impl LadderSpec {
    pub fn new(n_bits: u32, vdd: f64, av_mag: f64) -> Self {
        LadderSpec {
            n_bits,
            vdd,
            av_mag,
            v_center: None,
        }
    }

    pub fn with_center(mut self, v_center: f64) -> Self {
        self.v_center = Some(v_center);
        self
    }

    pub fn center(&self, params: &DeviceParams) -> f64 {
        self.v_center
            .unwrap_or_else(|| balanced_threshold(params, self.vdd))
    }
}

/// Threshold of an inverter with `r = 1`.
pub fn balanced_threshold(params: &DeviceParams, vdd: f64) -> f64 {
    (vdd - params.vtp_mag + params.vtn) / 2.0
}

/// Ideal, uniformly spaced comparator thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceLadder {
    pub n_bits: u32,
    pub vdd: f64,
    pub v_low: f64,
    pub v_high: f64,
    pub v_lsb: f64,
    pub ideal_refs: Vec<f64>,
}

pub fn compute_ladder(spec: &LadderSpec, params: &DeviceParams) -> Result<ReferenceLadder> {
    if spec.n_bits < 2 {
        return Err(Error::DegenerateResolution);
    }
    if spec.n_bits > MAX_BITS {
        return Err(Error::InfeasibleLadder(format!(
            "resolution must be <= {MAX_BITS}"
        )));
    }
    if !(spec.av_mag > 0.0 && spec.av_mag.is_finite()) {
        return Err(Error::InfeasibleLadder(format!(
            "gain magnitude must be > 0, got {}",
            spec.av_mag
        )));
    }
    if !(spec.vdd > 0.0 && spec.vdd.is_finite()) {
        return Err(Error::InfeasibleLadder(format!(
            "vdd must be > 0, got {}",
            spec.vdd
        )));
    }
    params.validate()?;
    let center = spec.center(params);
    let half = spec.vdd / (2.0 * spec.av_mag);
    let v_low = center - half;
    let v_high = center + half;
    let band = (params.vtn, spec.vdd - params.vtp_mag);
    if !(band.0 < v_low && v_high < band.1) {
        return Err(Error::InfeasibleLadder(format!(
            "ladder [{v_low}, {v_high}] V lies outside attainable thresholds ({}, {}) V",
            band.0, band.1
        )));
    }
    let rungs = (1usize << spec.n_bits) - 1;
    let steps = (rungs - 1) as f64;
    let v_lsb = (v_high - v_low) / steps;
    let ideal_refs = (0..rungs)
        .map(|i| {
            if i == rungs - 1 {
                v_high
            } else {
                v_low + i as f64 * v_lsb
            }
        })
        .collect();
    Ok(ReferenceLadder {
        n_bits: spec.n_bits,
        vdd: spec.vdd,
        v_low,
        v_high,
        v_lsb,
        ideal_refs,
    })
}

/// Rectangular search space for `(wp, wn)`, um.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthGrid {
    pub w_min: f64,
    pub w_max: f64,
    pub w_step: f64,
    pub l_fixed: f64,
}

impl Default for WidthGrid {
    fn default() -> Self {
        WidthGrid {
            w_min: 0.5,
            w_max: 20.0,
            w_step: 0.05,
            l_fixed: DEFAULT_LENGTH_UM,
        }
    }
}

impl WidthGrid {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.w_min, self.w_max, self.w_step, self.l_fixed]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.w_min <= 0.0 || self.w_min > self.w_max {
            return Err(Error::InvalidGrid(format!(
                "need 0 < w_min <= w_max (w_min = {}, w_max = {})",
                self.w_min, self.w_max
            )));
        }
        if self.w_step <= 0.0 {
            return Err(Error::InvalidGrid("w_step must be > 0".into()));
        }
        if self.l_fixed <= 0.0 {
            return Err(Error::InvalidGrid("l_fixed must be > 0".into()));
        }
        if self.axis_len() > MAX_GRID_AXIS {
            return Err(Error::InvalidGrid(format!(
                "more than {MAX_GRID_AXIS} widths per axis"
            )));
        }
        Ok(())
    }

    fn axis_len(&self) -> usize {
        ((self.w_max - self.w_min) / self.w_step + 1e-9).floor() as usize + 1
    }

    /// Grid widths, each computed as `w_min + i * w_step`.
    pub fn widths(&self) -> Vec<f64> {
        (0..self.axis_len())
            .map(|i| self.w_min + i as f64 * self.w_step)
            .collect()
    }
}

/// One sized inverter and its closed-form threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub wp: f64,
    pub wn: f64,
    pub v_ref: f64,
}

impl Candidate {
    fn area(&self) -> f64 {
        self.wp + self.wn
    }
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.v_ref
        .total_cmp(&b.v_ref)
        .then(a.area().total_cmp(&b.area()))
        .then(a.wp.total_cmp(&b.wp))
}

/// All `(wp, wn)` grid pairs with their thresholds, sorted by threshold,
/// then by total width, then by `wp`.
pub fn enumerate_candidates(
    grid: &WidthGrid,
    params: &DeviceParams,
    vdd: f64,
) -> Result<Vec<Candidate>> {
    grid.validate()?;
    InverterSpec::from_widths(grid.w_min, grid.w_min, grid.l_fixed, vdd)?.validate(params)?;
    let widths = grid.widths();
    let mut out = widths
        .par_iter()
        .flat_map_iter(|&wp| {
            widths.iter().map(move |&wn| {
                devices::threshold_from_widths(params, vdd, wp, wn).map(|v_ref| Candidate {
                    wp,
                    wn,
                    v_ref,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.par_sort_unstable_by(candidate_order);
    Ok(out)
}

/// Resolution of a tie between two candidates equidistant from a rung.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Smaller `wp + wn`, then smaller `wp`.
    #[default]
    MinArea,
    /// The lower threshold.
    LowerThreshold,
}

/// A sized comparator bound to its ladder rung.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparatorDesign {
    pub wp: f64,
    pub wn: f64,
    pub l: f64,
    pub v_ref_achieved: f64,
    pub v_ref_ideal: f64,
    pub abs_error: f64,
}

impl ComparatorDesign {
    pub fn new(wp: f64, wn: f64, l: f64, v_ref_achieved: f64, v_ref_ideal: f64) -> Self {
        ComparatorDesign {
            wp,
            wn,
            l,
            v_ref_achieved,
            v_ref_ideal,
            abs_error: (v_ref_achieved - v_ref_ideal).abs(),
        }
    }

    /// The comparator's input inverter (the second stage is identical).
    pub fn inverter(&self, vdd: f64) -> Result<InverterSpec> {
        InverterSpec::from_widths(self.wp, self.wn, self.l, vdd)
    }
}

/// `2^n - 1` comparators in ascending threshold order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorBank {
    pub n_bits: u32,
    pub ladder: ReferenceLadder,
    pub designs: Vec<ComparatorDesign>,
}

impl ComparatorBank {
    pub fn vdd(&self) -> f64 {
        self.ladder.vdd
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.designs.iter().map(|d| d.v_ref_achieved).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.designs
            .windows(2)
            .all(|w| w[1].v_ref_achieved > w[0].v_ref_achieved)
    }

    /// Checks count, ordering and per-design geometry.
    pub fn validate(&self) -> Result<()> {
        if self.n_bits < 2 {
            return Err(Error::DegenerateResolution);
        }
        if self.n_bits > MAX_BITS {
            return Err(Error::InfeasibleLadder(format!(
                "resolution must be <= {MAX_BITS}"
            )));
        }
        let expected = (1usize << self.n_bits) - 1;
        if self.designs.len() != expected {
            return Err(Error::Arity {
                expected,
                got: self.designs.len(),
            });
        }
        for d in &self.designs {
            devices::TransistorGeom::new(d.wp, d.l)?;
            devices::TransistorGeom::new(d.wn, d.l)?;
        }
        if !self.is_monotone() {
            return Err(Error::InvalidParams(
                "comparator thresholds must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Picks, for every rung in ascending order, the candidate threshold
/// nearest to it.
///
/// A threshold already used by a lower rung is never reused: each rung
/// searches only above the previous pick, and leaves enough distinct
/// thresholds for the rungs still to come. Candidates sharing an exact
/// threshold are represented by the first of them in [`enumerate_candidates`]
/// order, i.e. the smallest one.
pub fn size_comparators(
    ladder: &ReferenceLadder,
    candidates: &[Candidate],
    l: f64,
    tie_break: TieBreak,
) -> Result<ComparatorBank> {
    let sorted_storage;
    let candidates = if candidates
        .windows(2)
        .all(|w| candidate_order(&w[0], &w[1]) != Ordering::Greater)
    {
        candidates
    } else {
        let mut c = candidates.to_vec();
        c.sort_unstable_by(candidate_order);
        sorted_storage = c;
        &sorted_storage
    };

    let rungs = &ladder.ideal_refs;
    let (Some(first), Some(last)) = (candidates.first(), candidates.last()) else {
        return Err(Error::Coverage {
            uncovered: (0..rungs.len()).collect(),
        });
    };
    let uncovered: Vec<usize> = rungs
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < first.v_ref || v > last.v_ref)
        .map(|(i, _)| i)
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::Coverage { uncovered });
    }

    let mut distinct: Vec<&Candidate> = Vec::new();
    for c in candidates {
        if distinct.last().is_none_or(|d| d.v_ref != c.v_ref) {
            distinct.push(c);
        }
    }
    if distinct.len() < rungs.len() {
        return Err(Error::InsufficientResolution {
            needed: rungs.len(),
            available: distinct.len(),
        });
    }

    let mut designs = Vec::with_capacity(rungs.len());
    let mut next_free = 0usize;
    for (i, &ideal) in rungs.iter().enumerate() {
        let hi = distinct.len() - (rungs.len() - i);
        let window = &distinct[next_free..=hi];
        let pos = window.partition_point(|c| c.v_ref < ideal);
        let pick = match (pos.checked_sub(1), (pos < window.len()).then_some(pos)) {
            (Some(below), Some(above)) => {
                let db = ideal - window[below].v_ref;
                let da = window[above].v_ref - ideal;
                match db.total_cmp(&da) {
                    Ordering::Less => below,
                    Ordering::Greater => above,
                    Ordering::Equal => match tie_break {
                        TieBreak::LowerThreshold => below,
                        TieBreak::MinArea => {
                            let (b, a) = (window[below], window[above]);
                            match b.area().total_cmp(&a.area()).then(b.wp.total_cmp(&a.wp)) {
                                Ordering::Greater => above,
                                _ => below,
                            }
                        }
                    },
                }
            }
            (Some(below), None) => below,
            (None, Some(above)) => above,
            (None, None) => unreachable!("window is never empty"),
        };
        let c = window[pick];
        designs.push(ComparatorDesign::new(c.wp, c.wn, l, c.v_ref, ideal));
        next_free += pick + 1;
    }

    Ok(ComparatorBank {
        n_bits: ladder.n_bits,
        ladder: ladder.clone(),
        designs,
    })
}

/// Ladder, candidate enumeration and sizing in one call.
pub fn design_bank(
    spec: &LadderSpec,
    grid: &WidthGrid,
    params: &DeviceParams,
    tie_break: TieBreak,
) -> Result<ComparatorBank> {
    let ladder = compute_ladder(spec, params)?;
    let candidates = enumerate_candidates(grid, params, spec.vdd)?;
    size_comparators(&ladder, &candidates, grid.l_fixed, tie_break)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankReport {
    pub rows: usize,
    pub v_min: f64,
    pub v_max: f64,
    pub max_abs_error: f64,
    pub monotone: bool,
    /// Sum of `wp + wn` over the input inverters, um.
    pub total_width: f64,
}

pub fn bank_report(bank: &ComparatorBank) -> BankReport {
    let d = &bank.designs;
    BankReport {
        rows: d.len(),
        v_min: d.first().map_or(f64::NAN, |x| x.v_ref_achieved),
        v_max: d.last().map_or(f64::NAN, |x| x.v_ref_achieved),
        max_abs_error: d.iter().map(|x| x.abs_error).fold(0.0, f64::max),
        monotone: bank.is_monotone(),
        total_width: d.iter().map(|x| x.wp + x.wn).sum(),
    }
}
