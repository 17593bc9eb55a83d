//! Orientation-colored rendering: hue encodes the winning direction bin,
//! brightness the response.

use std::f64::consts::PI;

use ndarray::{Array3, Axis, Zip};

use crate::error::{invalid, PageError, Result};
use crate::pipeline::{FeatureTensor, OutputMode};

/// 8-bit RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn black(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            pixels: vec![[0; 3]; height * width],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    /// Interleaved `RGBRGB...` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }
}

/// HSV with `h` in degrees `[0, 360)`, `s` and `v` in `[0, 1]`.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = (h.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let q = |t: f64| ((t + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

/// Hue in degrees for an orientation in `[0, pi)`.
pub fn direction_hue(theta: f64) -> f64 {
    theta.rem_euclid(PI) / PI * 360.0
}

/// Per pixel: `(winning bin, |response|)`, ties to the lowest bin.
pub fn argmax_bins(t: &FeatureTensor) -> ndarray::Array2<(usize, f64)> {
    let (h, w, _) = t.dim();
    ndarray::Array2::from_shape_fn((h, w), |(i, j)| {
        let lane = t.data.slice(ndarray::s![i, j, ..]);
        lane.iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (d, &x)| {
                if x.abs() > best.1 {
                    (d, x.abs())
                } else {
                    best
                }
            })
    })
}

pub fn colorize_orientation(t: &FeatureTensor) -> RgbImage {
    let (h, w, _) = t.dim();
    let winners = argmax_bins(t);
    let peak = winners.iter().fold(0.0f64, |m, &(_, a)| m.max(a));
    let mut out = RgbImage::black(h, w);
    if peak == 0.0 {
        return out;
    }
    for ((i, j), &(bin, mag)) in winners.indexed_iter() {
        if mag == 0.0 {
            continue;
        }
        let value = match t.mode {
            OutputMode::Analog => mag / peak,
            OutputMode::Binary => 1.0,
        };
        out.pixels[i * w + j] = hsv_to_rgb(direction_hue(t.directions[bin]), 1.0, value);
    }
    out
}

/// Per-bin combination keeping the value of largest magnitude (first tensor wins ties).
pub fn combine_tensors(tensors: &[FeatureTensor]) -> Result<FeatureTensor> {
    let first = tensors
        .first()
        .ok_or_else(|| invalid("tensors", "at least one tensor is required"))?;
    let mut data: Array3<f64> = first.data.clone();
    for t in &tensors[1..] {
        if t.dim() != first.dim() {
            let (a, b, _) = first.dim();
            let (c, d, _) = t.dim();
            return Err(PageError::ShapeMismatch {
                expected: (a, b),
                actual: (c, d),
            });
        }
        if t.dim().2 != first.dim().2 {
            return Err(invalid("tensors", "direction counts differ"));
        }
        Zip::from(&mut data).and(&t.data).for_each(|acc, &x| {
            if x.abs() > acc.abs() {
                *acc = x;
            }
        });
    }
    Ok(FeatureTensor { data, ..first.clone() })
}

pub fn composite_channels(tensors: &[FeatureTensor]) -> Result<RgbImage> {
    Ok(colorize_orientation(&combine_tensors(tensors)?))
}

/// Histogram of winning bins over pixels whose response reaches `floor`.
pub fn winning_bin_histogram(t: &FeatureTensor, floor: f64) -> Vec<usize> {
    let mut hist = vec![0; t.data.len_of(Axis(2))];
    for &(bin, mag) in argmax_bins(t).iter() {
        if mag > 0.0 && mag >= floor {
            hist[bin] += 1;
        }
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelParams;
    use ndarray::Array3;

    fn tensor(data: Array3<f64>, mode: OutputMode) -> FeatureTensor {
        let d = data.dim().2;
        FeatureTensor {
            directions: crate::kernels::direction_bins(d).unwrap(),
            data,
            params: KernelParams {
                direction_bins: d,
                ..Default::default()
            },
            mode,
        }
    }

    #[test]
    fn hsv_primaries() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(120.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(240.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(60.0, 1.0, 0.0), [0, 0, 0]);
    }

    #[test]
    fn all_zero_is_black() {
        let t = tensor(Array3::zeros((4, 5, 3)), OutputMode::Analog);
        let img = colorize_orientation(&t);
        assert_eq!((img.height, img.width), (4, 5));
        assert!(img.pixels.iter().all(|p| *p == [0, 0, 0]));
    }

    #[test]
    fn single_winner_gets_its_hue() {
        let mut data = Array3::zeros((3, 3, 4));
        data[[1, 1, 0]] = 1.0;
        let t = tensor(data, OutputMode::Binary);
        let img = colorize_orientation(&t);
        let expected = hsv_to_rgb(direction_hue(t.directions[0]), 1.0, 1.0);
        assert_eq!(img.get(1, 1), expected);
        assert_eq!(img.get(0, 0), [0, 0, 0]);
    }

    #[test]
    fn ties_go_to_lowest_bin() {
        let mut data = Array3::zeros((2, 2, 3));
        data[[0, 0, 1]] = -0.5;
        data[[0, 0, 2]] = 0.5;
        let t = tensor(data, OutputMode::Analog);
        assert_eq!(argmax_bins(&t)[[0, 0]].0, 1);
    }

    #[test]
    fn composite_rules() {
        let mut a = Array3::zeros((3, 4, 2));
        a[[0, 1, 0]] = 0.4;
        a[[2, 2, 1]] = -1.1;
        let a = tensor(a, OutputMode::Analog);
        let z = tensor(Array3::zeros((3, 4, 2)), OutputMode::Analog);
        assert_eq!(composite_channels(&[a.clone()]).unwrap(), colorize_orientation(&a));
        assert_eq!(
            composite_channels(&[a.clone(), a.clone()]).unwrap(),
            colorize_orientation(&a)
        );
        assert_eq!(
            composite_channels(&[z.clone(), a.clone()]).unwrap(),
            colorize_orientation(&a)
        );
        let other = tensor(Array3::zeros((3, 5, 2)), OutputMode::Analog);
        assert!(composite_channels(&[a, other]).is_err());
        assert!(composite_channels(&[]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn hue_invariant_under_positive_scaling(
            vals in proptest::collection::vec(-3.0..3.0f64, 4 * 4 * 5),
            k in 0.01..50.0f64,
        ) {
            let data = Array3::from_shape_vec((4, 4, 5), vals).unwrap();
            let a = tensor(data.clone(), OutputMode::Analog);
            let b = tensor(data * k, OutputMode::Analog);
            let wa = argmax_bins(&a);
            let wb = argmax_bins(&b);
            for (x, y) in wa.iter().zip(wb.iter()) {
                proptest::prop_assert_eq!(x.0, y.0);
            }
        }
    }
}
