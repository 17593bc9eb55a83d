//! Centered spatial-frequency coordinates.
//!
//! The grid samples `[-0.5, 0.5]` with both endpoints included along each
//! axis (numpy `linspace` convention), so for even sizes there is no sample
//! at exactly zero frequency. The first array axis indexes the row frequency
//! `u`, the second the column frequency `v`.

use ndarray::Array2;

use crate::error::{PageError, Result};

const HALF_SPAN: f64 = 0.5;

/// Centered frequency grid with its polar form.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub height: usize,
    pub width: usize,
    /// Row-frequency coordinate, constant along each row.
    pub u: Array2<f64>,
    /// Column-frequency coordinate, constant along each column.
    pub v: Array2<f64>,
    /// `atan2(v, u)`.
    pub theta: Array2<f64>,
    /// `hypot(u, v)`.
    pub rho: Array2<f64>,
}

impl FrequencyGrid {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        build_frequency_grid(height, width)
    }

    pub fn dim(&self) -> (usize, usize) {
        (self.height, self.width)
    }
}

/// Cartesian to polar: returns `(theta, rho)` with `theta = atan2(y, x)`.
pub fn cart2pol(x: f64, y: f64) -> (f64, f64) {
    (y.atan2(x), x.hypot(y))
}

/// `n` evenly spaced samples over `[start, stop]`, endpoints included.
///
/// Samples are `start + k * step` with the last one set to `stop` exactly,
/// which reproduces numpy's `linspace` bit for bit.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (n - 1) as f64;
            let mut out: Vec<f64> = (0..n).map(|k| k as f64 * step + start).collect();
            out[n - 1] = stop;
            out
        }
    }
}

pub fn build_frequency_grid(height: usize, width: usize) -> Result<FrequencyGrid> {
    if height < 2 || width < 2 {
        return Err(PageError::InvalidDimension(format!(
            "frequency grid needs at least 2x2 samples, got {height}x{width}"
        )));
    }
    let us = linspace(-HALF_SPAN, HALF_SPAN, height);
    let vs = linspace(-HALF_SPAN, HALF_SPAN, width);

    let u = Array2::from_shape_fn((height, width), |(i, _)| us[i]);
    let v = Array2::from_shape_fn((height, width), |(_, j)| vs[j]);
    let mut theta = Array2::zeros((height, width));
    let mut rho = Array2::zeros((height, width));
    ndarray::Zip::from(&mut theta)
        .and(&mut rho)
        .and(&u)
        .and(&v)
        .for_each(|t, r, &uu, &vv| {
            let (tt, rr) = cart2pol(uu, vv);
            *t = tt;
            *r = rr;
        });

    Ok(FrequencyGrid {
        height,
        width,
        u,
        v,
        theta,
        rho,
    })
}
