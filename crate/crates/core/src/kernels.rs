//! Spectral kernels: the Gaussian denoising gain and the directional phase
//! filter bank.
//!
//! Every kernel here lives on the centered [`FrequencyGrid`]; moving it to
//! DC-at-corner layout happens in [`crate::stretch`].

use std::f64::consts::PI;

use ndarray::{Array2, Array3, ArrayView2, Axis, Zip};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::grid::FrequencyGrid;

/// Largest direction count for which `direction_bins` yields exactly that many angles.
pub const MAX_DIRECTION_BINS: usize = 179;

/// First direction of every bank, one degree.
pub const MIN_DIRECTION: f64 = PI / 180.0;

/// Full parameter set for one spatial-frequency band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Center of the Gaussian passband over `|u'|`.
    pub mu_1: f64,
    /// Log-domain center of the log-normal passband over `|v'|`.
    pub mu_2: f64,
    pub sigma_1: f64,
    pub sigma_2: f64,
    /// Peak phase of the Gaussian factor after normalization.
    pub s_1: f64,
    /// Peak phase of the log-normal factor after normalization.
    pub s_2: f64,
    pub direction_bins: usize,
    pub sigma_lpf: f64,
    pub thresh_min: f64,
    pub thresh_max: f64,
    /// `true` for binary edge maps, `false` for analog phase.
    pub morph_flag: bool,
}

impl Default for KernelParams {
    /// Starting values that give visible edges on natural images. They are
    /// engineering defaults, not calibrated constants.
    fn default() -> Self {
        Self {
            mu_1: 0.0,
            mu_2: 0.3,
            sigma_1: 0.08,
            sigma_2: 0.7,
            s_1: 0.6,
            s_2: 0.8,
            direction_bins: 10,
            sigma_lpf: 0.1,
            thresh_min: -0.97 * PI / 2.0,
            thresh_max: 0.45 * PI / 2.0,
            morph_flag: true,
        }
    }
}

fn check_finite(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {x}")))
    }
}

fn check_positive(field: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be a positive finite number, got {x}")))
    }
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("mu_1", self.mu_1)?;
        check_finite("mu_2", self.mu_2)?;
        check_positive("sigma_1", self.sigma_1)?;
        check_positive("sigma_2", self.sigma_2)?;
        check_positive("s_1", self.s_1)?;
        check_positive("s_2", self.s_2)?;
        check_bin_count(self.direction_bins)?;
        check_positive("sigma_lpf", self.sigma_lpf)?;
        check_finite("thresh_min", self.thresh_min)?;
        check_finite("thresh_max", self.thresh_max)?;
        if self.morph_flag && self.thresh_min >= self.thresh_max {
            return Err(invalid(
                "thresh_min",
                format!(
                    "must be below thresh_max ({} >= {})",
                    self.thresh_min, self.thresh_max
                ),
            ));
        }
        Ok(())
    }

    /// Upper bound of every phase surface in a bank built from these params.
    pub fn peak_phase(&self) -> f64 {
        self.s_1 * self.s_2
    }
}

/// Directional phase surfaces, one per orientation channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFilterBank {
    /// `height x width x D`, centered layout, radians.
    pub phases: Array3<f64>,
    pub directions: Vec<f64>,
}

impl PhaseFilterBank {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn phase(&self, bin: usize) -> ArrayView2<'_, f64> {
        self.phases.index_axis(Axis(2), bin)
    }
}

/// Gaussian low-pass gain whose half-power radius is `sigma_lpf`.
pub fn build_lowpass(grid: &FrequencyGrid, sigma_lpf: f64) -> Result<Array2<f64>> {
    check_positive("sigma_lpf", sigma_lpf)?;
    let scale = (sigma_lpf * sigma_lpf / std::f64::consts::LN_2).sqrt();
    Ok(grid.rho.mapv(|r| (-0.5 * (r / scale).powi(2)).exp()))
}

fn check_bin_count(d: usize) -> Result<()> {
    if (1..=MAX_DIRECTION_BINS).contains(&d) {
        Ok(())
    } else {
        Err(invalid(
            "direction_bins",
            format!("must be in 1..={MAX_DIRECTION_BINS}, got {d}"),
        ))
    }
}

/// Orientation of each channel: `pi/180 + k*pi/d` for `k` in `0..d`.
///
/// Counts of 180 and above are rejected because the arithmetic sequence
/// would run past `pi` before reaching `d` entries.
pub fn direction_bins(d: usize) -> Result<Vec<f64>> {
    check_bin_count(d)?;
    let span = PI / d as f64;
    Ok((0..d).map(|k| MIN_DIRECTION + k as f64 * span).collect())
}

/// Rotates the grid by `theta`: `u' = u cos + v sin`, `v' = -u sin + v cos`.
pub fn rotate_coords(grid: &FrequencyGrid, theta: f64) -> (Array2<f64>, Array2<f64>) {
    let (sin, cos) = theta.sin_cos();
    let u_prime = Zip::from(&grid.u)
        .and(&grid.v)
        .map_collect(|&u, &v| u * cos + v * sin);
    let v_prime = Zip::from(&grid.u)
        .and(&grid.v)
        .map_collect(|&u, &v| -u * sin + v * cos);
    (u_prime, v_prime)
}

/// Scales `exp(log_density)` so its grid maximum equals `strength`.
///
/// Working in the log domain keeps the ratio finite when the raw density
/// would underflow or overflow. A density that is zero everywhere stays zero.
fn normalize_log_density(log_density: Array2<f64>, strength: f64) -> Array2<f64> {
    let peak = log_density
        .iter()
        .cloned()
        .filter(|x| !x.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Array2::zeros(log_density.raw_dim());
    }
    log_density.mapv_into(|l| strength * (l - peak).exp())
}

/// Gaussian factor over `|u'|`, normalized to peak `s_1`.
pub fn phi1(u_prime: &Array2<f64>, mu_1: f64, sigma_1: f64, s_1: f64) -> Result<Array2<f64>> {
    check_positive("sigma_1", sigma_1)?;
    let log_norm = ((2.0 * PI).sqrt() * sigma_1).ln();
    let log_density = u_prime.mapv(|u| {
        let z = (u.abs() - mu_1) / sigma_1;
        -0.5 * z * z - log_norm
    });
    Ok(normalize_log_density(log_density, s_1))
}

/// Log-normal factor over `|v'|`, normalized to peak `s_2`. Zero at `v' = 0`.
pub fn phi2(v_prime: &Array2<f64>, mu_2: f64, sigma_2: f64, s_2: f64) -> Result<Array2<f64>> {
    check_positive("sigma_2", sigma_2)?;
    let log_norm = ((2.0 * PI).sqrt() * sigma_2).ln();
    let log_density = v_prime.mapv(|v| {
        let r = v.abs();
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_r = r.ln();
        let z = (ln_r - mu_2) / sigma_2;
        -0.5 * z * z - ln_r - log_norm
    });
    Ok(normalize_log_density(log_density, s_2))
}

/// Phase surface `phi1(u') * phi2(v')` for a single orientation.
pub fn directional_phase(
    grid: &FrequencyGrid,
    params: &KernelParams,
    theta: f64,
) -> Result<Array2<f64>> {
    let (u_prime, v_prime) = rotate_coords(grid, theta);
    let mut phase = phi1(&u_prime, params.mu_1, params.sigma_1, params.s_1)?;
    phase *= &phi2(&v_prime, params.mu_2, params.sigma_2, params.s_2)?;
    Ok(phase)
}

pub fn build_filter_bank(grid: &FrequencyGrid, params: &KernelParams) -> Result<PhaseFilterBank> {
    params.validate()?;
    let directions = direction_bins(params.direction_bins)?;
    let surfaces = directions
        .par_iter()
        .map(|&theta| directional_phase(grid, params, theta))
        .collect::<Result<Vec<_>>>()?;

    let mut phases = Array3::zeros((grid.height, grid.width, directions.len()));
    for (mut slot, surface) in phases.axis_iter_mut(Axis(2)).zip(&surfaces) {
        slot.assign(surface);
    }
    Ok(PhaseFilterBank { phases, directions })
}
