//! The stretch operator: forward transform, spectral gain and phase kernel,
//! inverse transform, and the phase of the result.
//!
//! Transforms are unscaled forward and `1/(N*M)` inverse. Kernels arrive in
//! centered layout and are moved to DC-at-corner layout with [`center_shift`].

use std::sync::Arc;

use ndarray::{Array2, ArrayView2, Zip};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_shape, PageError, Result};

/// Real image plane, at least 2x2, finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane(Array2<f64>);

impl ImagePlane {
    pub fn new(pixels: Array2<f64>) -> Result<Self> {
        let (h, w) = pixels.dim();
        if h < 2 || w < 2 {
            return Err(PageError::InvalidDimension(format!(
                "image must be at least 2x2, got {h}x{w}"
            )));
        }
        if let Some(bad) = pixels.iter().find(|x| !x.is_finite()) {
            return Err(PageError::InvalidParameter {
                field: "image",
                reason: format!("pixel values must be finite, found {bad}"),
            });
        }
        Ok(Self(pixels))
    }

    pub fn from_fn(height: usize, width: usize, f: impl FnMut((usize, usize)) -> f64) -> Result<Self> {
        Self::new(Array2::from_shape_fn((height, width), f))
    }

    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn pixels(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Largest pixel value.
    pub fn max(&self) -> f64 {
        self.0.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Complex field on the spatial or spectral grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField(pub Array2<Complex64>);

impl ComplexField {
    pub fn from_real(values: &Array2<f64>) -> Self {
        Self(values.mapv(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn re(&self) -> Array2<f64> {
        self.0.mapv(|c| c.re)
    }

    pub fn im(&self) -> Array2<f64> {
        self.0.mapv(|c| c.im)
    }

    pub fn energy(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Planned row and column transforms for one image shape.
///
/// Plans are shared, so one `Fft2d` can serve many direction bins in parallel.
#[derive(Clone)]
pub struct Fft2d {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2d")
            .field("height", &self.height)
            .field("width", &self.width)
            .finish()
    }
}

impl Fft2d {
    pub fn new(height: usize, width: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            height,
            width,
            row_fwd: planner.plan_fft_forward(width),
            col_fwd: planner.plan_fft_forward(height),
            row_inv: planner.plan_fft_inverse(width),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn forward(&self, data: &mut Array2<Complex64>) {
        self.process(data, false);
    }

    /// Inverse transform including the `1/(N*M)` factor.
    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        self.process(data, true);
        let scale = 1.0 / (self.height * self.width) as f64;
        data.mapv_inplace(|c| c * scale);
    }

    fn process(&self, data: &mut Array2<Complex64>, inverse: bool) {
        assert_eq!(data.dim(), (self.height, self.width), "Fft2d shape mismatch");
        let (row_fft, col_fft) = if inverse {
            (&self.row_inv, &self.col_inv)
        } else {
            (&self.row_fwd, &self.col_fwd)
        };

        let scratch_len = row_fft
            .get_inplace_scratch_len()
            .max(col_fft.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];

        let mut line = vec![Complex64::default(); self.width];
        for mut row in data.rows_mut() {
            line.iter_mut().zip(row.iter()).for_each(|(d, s)| *d = *s);
            row_fft.process_with_scratch(&mut line, &mut scratch);
            row.iter_mut().zip(&line).for_each(|(d, s)| *d = *s);
        }

        line.resize(self.height, Complex64::default());
        for mut col in data.columns_mut() {
            line.iter_mut().zip(col.iter()).for_each(|(d, s)| *d = *s);
            col_fft.process_with_scratch(&mut line, &mut scratch);
            col.iter_mut().zip(&line).for_each(|(d, s)| *d = *s);
        }
    }
}

/// Unscaled 2D DFT of a real image, DC at index `[0, 0]`.
pub fn forward_transform(img: &ImagePlane) -> ComplexField {
    let (h, w) = img.dim();
    let mut data = img.pixels().mapv(|x| Complex64::new(x, 0.0));
    Fft2d::new(h, w).forward(&mut data);
    ComplexField(data)
}

pub fn forward_transform_complex(f: &ComplexField) -> ComplexField {
    let (h, w) = f.dim();
    let mut data = f.0.clone();
    Fft2d::new(h, w).forward(&mut data);
    ComplexField(data)
}

/// Inverse 2D DFT with the `1/(N*M)` factor.
pub fn inverse_transform(f: &ComplexField) -> ComplexField {
    let (h, w) = f.dim();
    let mut data = f.0.clone();
    Fft2d::new(h, w).inverse(&mut data);
    ComplexField(data)
}

/// Moves a centered-layout kernel to DC-at-corner layout.
///
/// Each axis is rolled by `n / 2`, the same placement as numpy's `fftshift`.
pub fn center_shift<T: Clone>(centered: ArrayView2<'_, T>) -> Array2<T> {
    let (h, w) = centered.dim();
    let (sh, sw) = (h / 2, w / 2);
    Array2::from_shape_fn((h, w), |(i, j)| {
        centered[[(i + h - sh) % h, (j + w - sw) % w]].clone()
    })
}

/// Spectral phase multiplier `exp(-j*phase)` in DC-at-corner layout.
///
/// The DC coefficient is pinned to 1. The centered grid has no sample that
/// lands on the DC bin after the shift (even sizes never sample zero
/// frequency), and leaving the neighbouring sample there would rotate the
/// phase of the image mean.
pub fn phase_multiplier(phase: ArrayView2<'_, f64>) -> Array2<Complex64> {
    let mut kernel = center_shift(phase).mapv(|p| Complex64::from_polar(1.0, -p));
    kernel[[0, 0]] = Complex64::new(1.0, 0.0);
    kernel
}

/// First stage of the operator: `Re(IFFT(FFT(img) * lpf))`.
pub fn smooth(img: &ImagePlane, lpf_gain: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    check_shape(img.dim(), lpf_gain.dim())?;
    let (h, w) = img.dim();
    let fft = Fft2d::new(h, w);
    Ok(smooth_with(&fft, img.pixels(), lpf_gain))
}

pub(crate) fn smooth_with(fft: &Fft2d, img: &Array2<f64>, lpf_gain: ArrayView2<'_, f64>) -> Array2<f64> {
    let mut spectrum = img.mapv(|x| Complex64::new(x, 0.0));
    fft.forward(&mut spectrum);
    let gain = center_shift(lpf_gain);
    Zip::from(&mut spectrum).and(&gain).for_each(|s, &g| *s *= g);
    fft.inverse(&mut spectrum);
    spectrum.mapv(|c| c.re)
}

/// Second stage applied to a precomputed spectrum of the smoothed image.
pub(crate) fn apply_phase_with(
    fft: &Fft2d,
    smoothed_spectrum: &Array2<Complex64>,
    phase: ArrayView2<'_, f64>,
) -> Array2<Complex64> {
    let kernel = phase_multiplier(phase);
    let mut out = smoothed_spectrum * &kernel;
    fft.inverse(&mut out);
    out
}

/// Full stretch operator on one phase surface. Both kernels are in centered layout.
pub fn apply_stretch(
    img: &ImagePlane,
    lpf_gain: ArrayView2<'_, f64>,
    phase: ArrayView2<'_, f64>,
) -> Result<ComplexField> {
    check_shape(img.dim(), lpf_gain.dim())?;
    check_shape(img.dim(), phase.dim())?;
    let (h, w) = img.dim();
    let fft = Fft2d::new(h, w);
    let smoothed = smooth_with(&fft, img.pixels(), lpf_gain);
    let mut spectrum = smoothed.mapv(|x| Complex64::new(x, 0.0));
    fft.forward(&mut spectrum);
    Ok(ComplexField(apply_phase_with(&fft, &spectrum, phase)))
}

/// Principal argument in `(-pi, pi]`; the argument of zero is zero.
pub fn angle(c: Complex64) -> f64 {
    if c.re == 0.0 && c.im == 0.0 {
        return 0.0;
    }
    // +0.0 imaginary part keeps negative reals at +pi
    let a = (c.im + 0.0).atan2(c.re);
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

pub fn extract_phase(f: &ComplexField) -> Array2<f64> {
    f.0.mapv(angle)
}
