//! End-to-end runs: one band, several bands, or several color channels.

use ndarray::{Array3, ArrayView2, Axis};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{check_shape, invalid, Result};
use crate::grid::build_frequency_grid;
use crate::kernels::{build_filter_bank, build_lowpass, KernelParams};
use crate::morphology::binarize_features;
use crate::stretch::{apply_phase_with, extract_phase, smooth_with, Fft2d, ImagePlane};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    /// Phase in radians, `(-pi, pi]`.
    Analog,
    /// Edge bits stored as 0.0 / 1.0.
    Binary,
}

/// `height x width x D` stack of per-direction features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    pub data: Array3<f64>,
    pub directions: Vec<f64>,
    pub params: KernelParams,
    pub mode: OutputMode,
}

impl FeatureTensor {
    pub fn dim(&self) -> (usize, usize, usize) {
        self.data.dim()
    }

    pub fn bins(&self) -> usize {
        self.directions.len()
    }

    pub fn channel(&self, bin: usize) -> ArrayView2<'_, f64> {
        self.data.index_axis(Axis(2), bin)
    }
}

pub fn page_run(img: &ImagePlane, params: &KernelParams) -> Result<FeatureTensor> {
    params.validate()?;
    let (h, w) = img.dim();
    let grid = build_frequency_grid(h, w)?;
    let lpf = build_lowpass(&grid, params.sigma_lpf)?;
    let bank = build_filter_bank(&grid, params)?;

    let fft = Fft2d::new(h, w);
    let smoothed = smooth_with(&fft, img.pixels(), lpf.view());
    let mut spectrum = smoothed.mapv(|x| Complex64::new(x, 0.0));
    fft.forward(&mut spectrum);

    let channels = (0..bank.len())
        .into_par_iter()
        .map(|d| {
            let field = apply_phase_with(&fft, &spectrum, bank.phase(d));
            let phase = extract_phase(&crate::stretch::ComplexField(field));
            if params.morph_flag {
                Ok(binarize_features(phase.view(), img, params)?.to_f64())
            } else {
                Ok(phase)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut data = Array3::zeros((h, w, bank.len()));
    for (mut slot, ch) in data.axis_iter_mut(Axis(2)).zip(&channels) {
        slot.assign(ch);
    }
    Ok(FeatureTensor {
        data,
        directions: bank.directions,
        params: *params,
        mode: if params.morph_flag {
            OutputMode::Binary
        } else {
            OutputMode::Analog
        },
    })
}

/// Independent run per band, in band order.
pub fn page_run_multiband(img: &ImagePlane, bands: &[KernelParams]) -> Result<Vec<FeatureTensor>> {
    if bands.is_empty() {
        return Err(invalid("bands", "at least one band is required"));
    }
    bands.iter().map(|p| page_run(img, p)).collect()
}

/// Runs each color channel separately. Combining them is left to
/// [`crate::viz::combine_tensors`] / [`crate::viz::composite_channels`].
pub fn page_run_color(channels: &[ImagePlane], params: &KernelParams) -> Result<Vec<FeatureTensor>> {
    if !(1..=4).contains(&channels.len()) {
        return Err(invalid(
            "channels",
            format!("expected 1 to 4 channels, got {}", channels.len()),
        ));
    }
    let dim = channels[0].dim();
    for c in &channels[1..] {
        check_shape(dim, c.dim())?;
    }
    channels.par_iter().map(|c| page_run(c, params)).collect()
}
