//! Image decode/encode.

use std::path::Path;

use image::{DynamicImage, ImageReader};
use ndarray::{Array2, ArrayView2};
use page_core::{ImagePlane, RgbImage};

/// Luma weights applied by `--gray`.
pub const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Decodes an image into planes normalized to `[0, 1]`: one plane for gray
/// sources, three (R, G, B) for color. Alpha is dropped.
pub fn decode_planes(path: &Path) -> Result<Vec<Array2<f64>>, String> {
    let img = ImageReader::open(path)
        .map_err(|e| e.to_string())?
        .with_guessed_format()
        .map_err(|e| e.to_string())?
        .decode()
        .map_err(|e| e.to_string())?;
    Ok(to_planes(img))
}

pub fn to_planes(img: DynamicImage) -> Vec<Array2<f64>> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let color = img.color();
    let sixteen = color.bytes_per_pixel() / color.channel_count() >= 2;
    if color.has_color() {
        if sixteen {
            let buf = img.into_rgb16();
            (0..3)
                .map(|c| Array2::from_shape_fn((h, w), |(i, j)| buf.get_pixel(j as u32, i as u32)[c] as f64 / 65535.0))
                .collect()
        } else {
            let buf = img.into_rgb8();
            (0..3)
                .map(|c| Array2::from_shape_fn((h, w), |(i, j)| buf.get_pixel(j as u32, i as u32)[c] as f64 / 255.0))
                .collect()
        }
    } else if sixteen {
        let buf = img.into_luma16();
        vec![Array2::from_shape_fn((h, w), |(i, j)| buf.get_pixel(j as u32, i as u32)[0] as f64 / 65535.0)]
    } else {
        let buf = img.into_luma8();
        vec![Array2::from_shape_fn((h, w), |(i, j)| buf.get_pixel(j as u32, i as u32)[0] as f64 / 255.0)]
    }
}

/// Weighted luma of an RGB plane triple; a single plane passes through.
pub fn collapse_luma(planes: &[Array2<f64>]) -> Array2<f64> {
    match planes {
        [r, g, b] => r * LUMA[0] + g * LUMA[1] + b * LUMA[2],
        _ => planes[0].clone(),
    }
}

pub fn load_channels(path: &Path, grayscale: bool) -> Result<Vec<ImagePlane>, String> {
    let planes = decode_planes(path)?;
    let planes = if grayscale {
        vec![collapse_luma(&planes)]
    } else {
        planes
    };
    planes
        .into_iter()
        .map(|p| ImagePlane::new(p).map_err(|e| e.to_string()))
        .collect()
}

/// Analog phase `[-pi, pi]` mapped linearly to `[0, 255]`.
pub fn phase_to_u8(p: f64) -> u8 {
    use std::f64::consts::PI;
    ((p + PI) / (2.0 * PI) * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn bits_to_u8(b: f64) -> u8 {
    if b != 0.0 {
        255
    } else {
        0
    }
}

pub fn encode_gray_png(channel: ArrayView2<'_, f64>, map: fn(f64) -> u8) -> Result<Vec<u8>, String> {
    let (h, w) = channel.dim();
    let bytes: Vec<u8> = channel.iter().map(|&x| map(x)).collect();
    let buf = image::GrayImage::from_raw(w as u32, h as u32, bytes).ok_or("buffer size mismatch")?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| e.to_string())?;
    Ok(out.into_inner())
}

pub fn encode_rgb_png(img: &RgbImage) -> Result<Vec<u8>, String> {
    let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, img.to_bytes())
        .ok_or("buffer size mismatch")?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| e.to_string())?;
    Ok(out.into_inner())
}
