//! Oracles shared by the integration tests. Everything here is coded
//! independently of the library routes it is compared against.

#![allow(dead_code)]

use rand::Rng;
use tiqflash::devices::{self, DeviceParams, InverterSpec};
use tiqflash::synthesis::{self, ComparatorBank, LadderSpec, TieBreak, WidthGrid};

/// Closed-form inverter threshold, coded from scratch.
pub fn threshold_oracle(
    mu_n: f64,
    mu_p: f64,
    vtn: f64,
    vtp: f64,
    vdd: f64,
    wp: f64,
    wn: f64,
) -> f64 {
    let r = (mu_p * wp / (mu_n * wn)).sqrt();
    (r * (vdd - vtp) + vtn) / (1.0 + r)
}

/// Self-crossing of the library VTC, found by bisection on `v_in`.
pub fn vtc_crossing(spec: &InverterSpec, p: &DeviceParams) -> f64 {
    let (mut lo, mut hi) = (p.vtn, spec.vdd - p.vtp_mag);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if devices::inverter_output(spec, p, mid).unwrap() > mid {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Random parameter set with `lambda = 0` and `kprime_p / kprime_n =
/// mu_p / mu_n` (both proportional to mobility), plus a random inverter.
pub fn random_ideal_inverter(rng: &mut impl Rng) -> (InverterSpec, DeviceParams) {
    let mu_n = rng.gen_range(200.0..600.0);
    let mu_p = mu_n * rng.gen_range(0.2..0.8);
    let cox = rng.gen_range(0.1..0.5);
    let vtn = rng.gen_range(0.2..0.7);
    let vtp_mag = rng.gen_range(0.2..0.7);
    let vdd = rng.gen_range(vtn + vtp_mag + 0.5..5.0);
    let p = DeviceParams {
        mu_n,
        mu_p,
        vtn,
        vtp_mag,
        lambda_n: 0.0,
        lambda_p: 0.0,
        kprime_n: mu_n * cox,
        kprime_p: mu_p * cox,
        ..DeviceParams::generic_025u()
    };
    let l = rng.gen_range(0.18..1.0);
    let spec =
        InverterSpec::from_widths(rng.gen_range(0.3..30.0), rng.gen_range(0.3..30.0), l, vdd)
            .unwrap();
    (spec, p)
}

pub fn bank(n_bits: u32, gain: f64, grid: &WidthGrid, p: &DeviceParams) -> ComparatorBank {
    synthesis::design_bank(
        &LadderSpec::new(n_bits, 2.5, gain),
        grid,
        p,
        TieBreak::MinArea,
    )
    .unwrap()
}

pub fn default_bank(n_bits: u32) -> ComparatorBank {
    bank(
        n_bits,
        38.7,
        &WidthGrid::default(),
        &DeviceParams::generic_025u(),
    )
}

/// Thresholds at or below `v` counted by linear scan.
pub fn count_below(thresholds: &[f64], v: f64) -> usize {
    thresholds.iter().filter(|&&t| v > t).count()
}

/// Smallest distance from `target` to any candidate threshold, by linear
/// scan over every grid pair.
pub fn brute_nearest(grid: &WidthGrid, p: &DeviceParams, vdd: f64, target: f64) -> f64 {
    let n = ((grid.w_max - grid.w_min) / grid.w_step + 1e-9).floor() as usize + 1;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let wp = grid.w_min + i as f64 * grid.w_step;
        for j in 0..n {
            let wn = grid.w_min + j as f64 * grid.w_step;
            let v = threshold_oracle(p.mu_n, p.mu_p, p.vtn, p.vtp_mag, vdd, wp, wn);
            best = best.min((v - target).abs());
        }
    }
    best
}
