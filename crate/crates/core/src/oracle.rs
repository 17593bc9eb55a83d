//! Brute-force reference implementations for validating the fast path on
//! small inputs.
//!
//! Nothing here calls into `grid`, `kernels` or `stretch`: coordinates,
//! kernels and transforms are recomputed from their defining formulas with
//! explicit loops.

use std::f64::consts::PI;

use ndarray::Array2;
use rustfft::num_complex::Complex64;

use crate::error::{PageError, Result};
use crate::kernels::KernelParams;
use crate::stretch::ImagePlane;

/// Largest side accepted by the O(N^2 M^2) routines.
pub const ORACLE_MAX_SIDE: usize = 32;

fn guard(h: usize, w: usize) -> Result<()> {
    if h > ORACLE_MAX_SIDE || w > ORACLE_MAX_SIDE {
        Err(PageError::OracleTooLarge {
            height: h,
            width: w,
            max: ORACLE_MAX_SIDE,
        })
    } else {
        Ok(())
    }
}

fn dft2(input: &Array2<Complex64>, sign: f64) -> Array2<Complex64> {
    let (h, w) = input.dim();
    Array2::from_shape_fn((h, w), |(k, l)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..h {
            for y in 0..w {
                // reduce the exponent modulo the period before scaling by 2*pi
                let frac = ((k * x) % h) as f64 / h as f64 + ((l * y) % w) as f64 / w as f64;
                acc += input[[x, y]] * Complex64::from_polar(1.0, sign * 2.0 * PI * frac);
            }
        }
        acc
    })
}

/// Direct evaluation of the unscaled 2D DFT definition.
pub fn naive_dft2(input: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (h, w) = input.dim();
    guard(h, w)?;
    Ok(dft2(input, -1.0))
}

/// Direct inverse DFT including the `1/(N*M)` factor.
pub fn naive_idft2(input: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (h, w) = input.dim();
    guard(h, w)?;
    let scale = 1.0 / (h * w) as f64;
    Ok(dft2(input, 1.0).mapv(|c| c * scale))
}

pub fn naive_dft2_real(input: &Array2<f64>) -> Result<Array2<Complex64>> {
    naive_dft2(&input.mapv(|x| Complex64::new(x, 0.0)))
}

fn axis_coord(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64 - 0.5
}

/// DC-at-corner index `k` reads centered index `(k + ceil(n/2)) mod n`.
fn centered_index(k: usize, n: usize) -> usize {
    (k + n.div_ceil(2)) % n
}

/// Phase surface for one direction, centered layout, straight from the
/// density formulas with max normalization.
pub fn naive_phase_kernel(h: usize, w: usize, params: &KernelParams, theta: f64) -> Array2<f64> {
    let mut f1 = Array2::<f64>::zeros((h, w));
    let mut f2 = Array2::<f64>::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            let u = axis_coord(i, h);
            let v = axis_coord(j, w);
            let up = u * theta.cos() + v * theta.sin();
            let vp = -u * theta.sin() + v * theta.cos();
            let s1 = params.sigma_1;
            f1[[i, j]] = (-(up.abs() - params.mu_1).powi(2) / (2.0 * s1 * s1)).exp()
                / ((2.0 * PI).sqrt() * s1);
            let s2 = params.sigma_2;
            f2[[i, j]] = if vp == 0.0 {
                0.0
            } else {
                (-(vp.abs().ln() - params.mu_2).powi(2) / (2.0 * s2 * s2)).exp()
                    / (vp.abs() * (2.0 * PI).sqrt() * s2)
            };
        }
    }
    let m1 = f1.iter().cloned().fold(0.0, f64::max);
    let m2 = f2.iter().cloned().fold(0.0, f64::max);
    let mut out = Array2::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            out[[i, j]] = params.s_1 * f1[[i, j]] / m1 * params.s_2 * f2[[i, j]] / m2;
        }
    }
    out
}

fn naive_lowpass(h: usize, w: usize, sigma: f64) -> Array2<f64> {
    Array2::from_shape_fn((h, w), |(i, j)| {
        let (u, v) = (axis_coord(i, h), axis_coord(j, w));
        let r2 = u * u + v * v;
        // half power at r == sigma
        2f64.powf(-r2 / (2.0 * sigma * sigma))
    })
}

fn phase_of(c: Complex64) -> f64 {
    if c.re == 0.0 && c.im == 0.0 {
        return 0.0;
    }
    let a = c.im.atan2(c.re);
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Definition-level stretch: smoothing pass, phase kernel per direction,
/// phase extraction. Returns one phase map per direction bin.
pub fn naive_stretch(img: &ImagePlane, params: &KernelParams) -> Result<Vec<Array2<f64>>> {
    let (h, w) = img.dim();
    guard(h, w)?;
    params.validate()?;

    let lpf = naive_lowpass(h, w, params.sigma_lpf);
    let mut spectrum = naive_dft2_real(img.pixels())?;
    for k in 0..h {
        for l in 0..w {
            spectrum[[k, l]] *= lpf[[centered_index(k, h), centered_index(l, w)]];
        }
    }
    let smoothed = naive_idft2(&spectrum)?.mapv(|c| c.re);
    let smoothed_spectrum = naive_dft2_real(&smoothed)?;

    let mut out = Vec::with_capacity(params.direction_bins);
    for d in 0..params.direction_bins {
        let theta = PI / 180.0 + d as f64 * PI / params.direction_bins as f64;
        let phase = naive_phase_kernel(h, w, params, theta);
        let mut spec = smoothed_spectrum.clone();
        for k in 0..h {
            for l in 0..w {
                // the DC coefficient is never rotated
                let p = if k == 0 && l == 0 {
                    0.0
                } else {
                    phase[[centered_index(k, h), centered_index(l, w)]]
                };
                spec[[k, l]] *= Complex64::new(p.cos(), -p.sin());
            }
        }
        out.push(naive_idft2(&spec)?.mapv(phase_of));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_dft() {
        let x = Array2::from_shape_vec((1, 2), vec![3.0, 5.0]).unwrap();
        let s = naive_dft2_real(&x).unwrap();
        assert!((s[[0, 0]] - Complex64::new(8.0, 0.0)).norm() < 1e-12);
        assert!((s[[0, 1]] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let mut x = Array2::zeros((5, 4));
        x[[0, 0]] = 1.0;
        let s = naive_dft2_real(&x).unwrap();
        assert!(s.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn inverse_round_trip() {
        let x = Array2::from_shape_fn((6, 7), |(i, j)| Complex64::new(i as f64, j as f64 * 0.5));
        let back = naive_idft2(&naive_dft2(&x).unwrap()).unwrap();
        assert!((&back - &x).iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn size_guard() {
        let x = Array2::zeros((33, 4));
        assert!(matches!(
            naive_dft2_real(&x),
            Err(PageError::OracleTooLarge { .. })
        ));
        let img = ImagePlane::new(Array2::zeros((4, 40))).unwrap();
        assert!(naive_stretch(&img, &KernelParams::default()).is_err());
    }

    #[test]
    fn centered_index_matches_fftshift() {
        // fftshift(arange(5)) = [3,4,0,1,2]; fftshift(arange(4)) = [2,3,0,1]
        let five: Vec<_> = (0..5).map(|k| centered_index(k, 5)).collect();
        assert_eq!(five, vec![3, 4, 0, 1, 2]);
        let four: Vec<_> = (0..4).map(|k| centered_index(k, 4)).collect();
        assert_eq!(four, vec![2, 3, 0, 1]);
    }

    #[test]
    fn constant_and_zero_images() {
        let p = KernelParams {
            direction_bins: 3,
            ..Default::default()
        };
        let flat = ImagePlane::new(Array2::from_elem((8, 8), 0.3)).unwrap();
        for ch in naive_stretch(&flat, &p).unwrap() {
            assert!(ch.iter().all(|x| x.abs() <= 1e-9));
        }
        let zero = ImagePlane::new(Array2::zeros((8, 8))).unwrap();
        for ch in naive_stretch(&zero, &p).unwrap() {
            assert!(ch.iter().all(|&x| x == 0.0));
        }
    }
}
