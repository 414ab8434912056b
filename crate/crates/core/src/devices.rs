//! Device and inverter models.
//!
//! Long-channel square-law MOSFETs with optional channel-length modulation.
//! The closed-form switching threshold of a CMOS inverter is
//!
//! ```text
//! V_ref = (r (V_DD - |V_Tp|) + V_Tn) / (1 + r),   r = sqrt(mu_p W_p / (mu_n W_n))
//! ```
//!
//! and the voltage-transfer curve is obtained by solving drain-current
//! balance of the NMOS/PMOS pair at each input voltage.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Supply voltage of the 0.25 um node.
pub const DEFAULT_VDD: f64 = 2.5;
/// Nominal channel length, um.
pub const DEFAULT_LENGTH_UM: f64 = 0.25;
/// Name of the built-in parameter preset.
pub const GENERIC_PRESET: &str = "generic-0.25u";

const KELVIN_OFFSET: f64 = 273.15;
const VTC_TOL: f64 = 1e-9;
const VTC_MAX_ITER: usize = 200;

/// Process constants shared by every device of a design.
///
/// Threshold voltages are stored as positive magnitudes; `vtp_mag` is
/// `|V_Tp|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Electron mobility, cm^2/(V s).
    pub mu_n: f64,
    /// Hole mobility, cm^2/(V s).
    pub mu_p: f64,
    /// NMOS threshold, V.
    pub vtn: f64,
    /// PMOS threshold magnitude, V.
    pub vtp_mag: f64,
    /// Channel-length modulation, 1/V.
    pub lambda_n: f64,
    pub lambda_p: f64,
    /// Process transconductance, uA/V^2.
    pub kprime_n: f64,
    pub kprime_p: f64,
    /// Reference temperature, degC.
    pub t_ref_c: f64,
    /// Threshold temperature coefficient, V/K.
    pub kappa_vt: f64,
    /// Mobility temperature exponent.
    pub m_mu: f64,
}

impl DeviceParams {
    /// Representative 0.25 um textbook values (`generic-0.25u`).
    ///
    /// `kprime_p` is chosen so that `kprime_p / kprime_n == mu_p / mu_n`,
    /// which keeps the VTC current model consistent with the closed-form
    /// threshold.
    pub fn generic_025u() -> Self {
        DeviceParams {
            mu_n: 400.0,
            mu_p: 150.0,
            vtn: 0.43,
            vtp_mag: 0.40,
            lambda_n: 0.06,
            lambda_p: 0.06,
            kprime_n: 110.0,
            kprime_p: 41.25,
            t_ref_c: 25.0,
            kappa_vt: 1e-3,
            m_mu: 1.5,
        }
    }

    /// Looks up a built-in preset by name.
    pub fn preset(name: &str) -> Option<Self> {
        (name == GENERIC_PRESET).then(Self::generic_025u)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.mu_n,
            self.mu_p,
            self.vtn,
            self.vtp_mag,
            self.lambda_n,
            self.lambda_p,
            self.kprime_n,
            self.kprime_p,
            self.t_ref_c,
            self.kappa_vt,
            self.m_mu,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all fields must be finite".into()));
        }
        if self.mu_n <= 0.0 || self.mu_p <= 0.0 {
            return Err(Error::InvalidParams("mobilities must be > 0".into()));
        }
        if self.kprime_n <= 0.0 || self.kprime_p <= 0.0 {
            return Err(Error::InvalidParams(
                "kprime_n and kprime_p must be > 0".into(),
            ));
        }
        if self.vtn <= 0.0 || self.vtp_mag <= 0.0 {
            return Err(Error::InvalidParams("vtn and vtp_mag must be > 0".into()));
        }
        if self.lambda_n < 0.0 || self.lambda_p < 0.0 {
            return Err(Error::InvalidParams(
                "lambda_n and lambda_p must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Parses a preset document. Unknown keys are rejected; errors carry the
    /// JSON path of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let params: DeviceParams =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("DeviceParams always serializes")
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self::generic_025u()
    }
}

/// Width and length of one transistor, um.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransistorGeom {
    pub w: f64,
    pub l: f64,
}

impl TransistorGeom {
    pub fn new(w: f64, l: f64) -> Result<Self> {
        let g = TransistorGeom { w, l };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w > 0.0 && self.w.is_finite()) || !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "w and l must be positive (w = {}, l = {})",
                self.w, self.l
            )));
        }
        Ok(())
    }

    fn aspect(&self) -> f64 {
        self.w / self.l
    }
}

/// One static CMOS inverter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverterSpec {
    pub pmos: TransistorGeom,
    pub nmos: TransistorGeom,
    pub vdd: f64,
}

impl InverterSpec {
    pub fn new(pmos: TransistorGeom, nmos: TransistorGeom, vdd: f64) -> Self {
        InverterSpec { pmos, nmos, vdd }
    }

    /// Inverter with both devices at length `l`.
    pub fn from_widths(wp: f64, wn: f64, l: f64, vdd: f64) -> Result<Self> {
        Ok(InverterSpec {
            pmos: TransistorGeom::new(wp, l)?,
            nmos: TransistorGeom::new(wn, l)?,
            vdd,
        })
    }

    /// Checks geometry, supply and that both devices can conduct at once.
    pub fn validate(&self, params: &DeviceParams) -> Result<()> {
        self.pmos.validate()?;
        self.nmos.validate()?;
        params.validate()?;
        if !(self.vdd > 0.0 && self.vdd.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "vdd must be > 0, got {}",
                self.vdd
            )));
        }
        if self.vdd <= params.vtn + params.vtp_mag {
            return Err(Error::InvalidParams(format!(
                "vdd = {} V must exceed vtn + |vtp| = {} V",
                self.vdd,
                params.vtn + params.vtp_mag
            )));
        }
        Ok(())
    }
}

/// Sampled static transfer characteristic on a uniform input grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VtcCurve {
    /// `(v_in, v_out)` pairs, v_in strictly increasing over `[0, vdd]`.
    pub samples: Vec<(f64, f64)>,
}

impl VtcCurve {
    /// Linear interpolation of the sampled curve.
    pub fn interpolate(&self, v_in: f64) -> f64 {
        let s = &self.samples;
        if v_in <= s[0].0 {
            return s[0].1;
        }
        let last = s[s.len() - 1];
        if v_in >= last.0 {
            return last.1;
        }
        let idx = s.partition_point(|&(x, _)| x <= v_in);
        let (x0, y0) = s[idx - 1];
        let (x1, y1) = s[idx];
        y0 + (y1 - y0) * (v_in - x0) / (x1 - x0)
    }
}

/// `r = sqrt(mu_p wp / (mu_n wn))`.
pub fn beta_ratio(params: &DeviceParams, wp: f64, wn: f64) -> Result<f64> {
    if !(wp > 0.0 && wp.is_finite()) || !(wn > 0.0 && wn.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "widths must be positive (wp = {wp}, wn = {wn})"
        )));
    }
    Ok(((params.mu_p * wp) / (params.mu_n * wn)).sqrt())
}

fn threshold_for_ratio(params: &DeviceParams, vdd: f64, r: f64) -> f64 {
    (r * (vdd - params.vtp_mag) + params.vtn) / (1.0 + r)
}

/// Closed-form switching threshold of an inverter.
///
/// Uses the device aspect ratios `W/L`, which reduces to the width ratio
/// when both lengths are equal.
pub fn inverter_threshold(spec: &InverterSpec, params: &DeviceParams) -> Result<f64> {
    spec.validate(params)?;
    let r = beta_ratio(params, spec.pmos.aspect(), spec.nmos.aspect())?;
    Ok(threshold_for_ratio(params, spec.vdd, r))
}

/// Threshold of an equal-length inverter from its widths alone.
///
/// Skips the full spec validation; callers on hot paths validate `params`
/// and `vdd` once up front.
pub fn threshold_from_widths(params: &DeviceParams, vdd: f64, wp: f64, wn: f64) -> Result<f64> {
    let r = beta_ratio(params, wp, wn)?;
    Ok(threshold_for_ratio(params, vdd, r))
}

/// Square-law drain current with channel-length modulation, A.
///
/// `k` is the device transconductance `k' W / L` in A/V^2.
fn drain_current(k: f64, vt: f64, lambda: f64, vgs: f64, vds: f64) -> f64 {
    let vov = vgs - vt;
    if vov <= 0.0 {
        return 0.0;
    }
    let clm = 1.0 + lambda * vds;
    if vds < vov {
        k * (vov * vds - 0.5 * vds * vds) * clm
    } else {
        0.5 * k * vov * vov * clm
    }
}

/// Output voltage of a single inverter at one input voltage.
///
/// Bisection on the current-balance residual, which is monotone
/// non-decreasing in `v_out`.
pub fn inverter_output(spec: &InverterSpec, params: &DeviceParams, v_in: f64) -> Result<f64> {
    if !v_in.is_finite() {
        return Err(Error::NumericalFailure { v_in });
    }
    let vdd = spec.vdd;
    if v_in <= params.vtn {
        return Ok(vdd);
    }
    if vdd - v_in <= params.vtp_mag {
        return Ok(0.0);
    }
    let kn = params.kprime_n * 1e-6 * spec.nmos.aspect();
    let kp = params.kprime_p * 1e-6 * spec.pmos.aspect();
    let residual = |v_out: f64| {
        drain_current(kn, params.vtn, params.lambda_n, v_in, v_out)
            - drain_current(kp, params.vtp_mag, params.lambda_p, vdd - v_in, vdd - v_out)
    };
    let (mut lo, mut hi) = (0.0, vdd);
    for _ in 0..VTC_MAX_ITER {
        if hi - lo <= VTC_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let f = residual(mid);
        if f.is_nan() {
            return Err(Error::NumericalFailure { v_in });
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NumericalFailure { v_in })
}

/// Samples the VTC on `grid_points` uniformly spaced inputs over `[0, vdd]`.
pub fn vtc(spec: &InverterSpec, params: &DeviceParams, grid_points: usize) -> Result<VtcCurve> {
    if grid_points < 3 {
        return Err(Error::InvalidGrid(format!(
            "grid_points must be >= 3, got {grid_points}"
        )));
    }
    spec.validate(params)?;
    let last = (grid_points - 1) as f64;
    let samples = (0..grid_points)
        .map(|k| {
            let v_in = if k == grid_points - 1 {
                spec.vdd
            } else {
                spec.vdd * k as f64 / last
            };
            inverter_output(spec, params, v_in).map(|v_out| (v_in, v_out))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VtcCurve { samples })
}

/// Numerically located self-crossing `v_out(v_in) = v_in` of the VTC.
pub fn switching_point(spec: &InverterSpec, params: &DeviceParams) -> Result<f64> {
    spec.validate(params)?;
    let (mut lo, mut hi) = (params.vtn, spec.vdd - params.vtp_mag);
    for _ in 0..VTC_MAX_ITER {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if inverter_output(spec, params, mid)? > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Small-signal gain at the closed-form switching point, both devices in
/// saturation:
///
/// ```text
/// A_v = -(g_mn + g_mp) / (I_D (lambda_n + lambda_p))
/// ```
///
/// with `I_D = k/2 V_ov^2` the saturation current before channel-length
/// modulation (so `lambda I_D` is the output conductance) and
/// `g_m = k V_ov (1 + lambda V_DS)`.
pub fn gain_at_threshold(spec: &InverterSpec, params: &DeviceParams) -> Result<f64> {
    let lambda_sum = params.lambda_n + params.lambda_p;
    if lambda_sum == 0.0 {
        return Err(Error::IdealDevice);
    }
    let v = inverter_threshold(spec, params)?;
    let vov_n = v - params.vtn;
    let vov_p = spec.vdd - v - params.vtp_mag;
    // g_m / I_D per device; the currents are equal at the switching point.
    let gm_n = 2.0 * (1.0 + params.lambda_n * v) / vov_n;
    let gm_p = 2.0 * (1.0 + params.lambda_p * (spec.vdd - v)) / vov_p;
    Ok(-(gm_n + gm_p) / lambda_sum)
}

/// Device values at temperature `t_c`.
///
/// `V_T(T) = V_T(T_ref) - kappa_vt (T - T_ref)` for both threshold
/// magnitudes, and mobilities (with the process transconductances, which
/// are proportional to them) scale as `((T + 273.15) / (T_ref + 273.15))^-m_mu`.
/// The returned set keeps the original `t_ref_c`; it is not meant to be
/// re-scaled.
pub fn apply_temperature(params: &DeviceParams, t_c: f64) -> Result<DeviceParams> {
    params.validate()?;
    if t_c == params.t_ref_c {
        return Ok(*params);
    }
    if !t_c.is_finite() || t_c + KELVIN_OFFSET <= 0.0 {
        return Err(Error::OutOfModelRange { t_c });
    }
    let dt = t_c - params.t_ref_c;
    let vtn = params.vtn - params.kappa_vt * dt;
    let vtp_mag = params.vtp_mag - params.kappa_vt * dt;
    if vtn <= 0.0 || vtp_mag <= 0.0 {
        return Err(Error::OutOfModelRange { t_c });
    }
    let scale = ((t_c + KELVIN_OFFSET) / (params.t_ref_c + KELVIN_OFFSET)).powf(-params.m_mu);
    Ok(DeviceParams {
        vtn,
        vtp_mag,
        mu_n: params.mu_n * scale,
        mu_p: params.mu_p * scale,
        kprime_n: params.kprime_n * scale,
        kprime_p: params.kprime_p * scale,
        ..*params
    })
}

/// Output of a chain of inverters driven by `v_in`.
pub fn cascade_response(stages: &[InverterSpec], params: &DeviceParams, v_in: f64) -> Result<f64> {
    stages
        .iter()
        .try_fold(v_in, |v, stage| inverter_output(stage, params, v))
}

/// DC response of the two-inverter TIQ comparator.
pub fn comparator_dc_response(
    first: &InverterSpec,
    second: &InverterSpec,
    params: &DeviceParams,
    v_in: f64,
) -> Result<f64> {
    first.validate(params)?;
    second.validate(params)?;
    cascade_response(&[*first, *second], params, v_in)
}
