//! `features.tnsr`: raw feature tensor container.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | field                           |
//! |-------|---------------------------------|
//! | 4     | magic `PAGE`                    |
//! | 2     | format version (u16, currently 1) |
//! | 4     | height (u32)                    |
//! | 4     | width (u32)                     |
//! | 4     | bins (u32)                      |
//! | 1     | mode (0 analog, 1 binary)       |
//! | 8 * h * w * bins | f64 values, bin-major, then row, then column |

use ndarray::Array3;
use page_core::{FeatureTensor, OutputMode};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"PAGE";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 4 * 3 + 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TnsrError {
    #[error("not a tensor file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    Version(u16),
    #[error("unknown mode byte {0}")]
    Mode(u8),
    #[error("truncated file: expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("dimension does not fit in u32")]
    TooLarge,
}

/// Decoded tensor file; `data` is `height x width x bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFile {
    pub mode: OutputMode,
    pub data: Array3<f64>,
}

fn mode_byte(mode: OutputMode) -> u8 {
    match mode {
        OutputMode::Analog => 0,
        OutputMode::Binary => 1,
    }
}

pub fn encode_raw(data: &Array3<f64>, mode: OutputMode) -> Result<Vec<u8>, TnsrError> {
    let (h, w, d) = data.dim();
    let dims = [h, w, d]
        .map(|x| u32::try_from(x).map_err(|_| TnsrError::TooLarge));
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for dim in dims {
        out.extend_from_slice(&dim?.to_le_bytes());
    }
    out.push(mode_byte(mode));
    for bin in 0..d {
        for row in 0..h {
            for col in 0..w {
                out.extend_from_slice(&data[[row, col, bin]].to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn encode(t: &FeatureTensor) -> Result<Vec<u8>, TnsrError> {
    encode_raw(&t.data, t.mode)
}

pub fn decode(bytes: &[u8]) -> Result<TensorFile, TnsrError> {
    if bytes.len() < HEADER_LEN {
        return Err(TnsrError::Length {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    if &bytes[0..4] != MAGIC {
        return Err(TnsrError::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(TnsrError::Version(version));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (h, w, d) = (u32_at(6), u32_at(10), u32_at(14));
    let mode = match bytes[18] {
        0 => OutputMode::Analog,
        1 => OutputMode::Binary,
        m => return Err(TnsrError::Mode(m)),
    };
    let expected = h
        .checked_mul(w)
        .and_then(|n| n.checked_mul(d))
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or(TnsrError::TooLarge)?;
    if bytes.len() != expected {
        return Err(TnsrError::Length {
            expected,
            actual: bytes.len(),
        });
    }
    let mut values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut data = Array3::zeros((h, w, d));
    for bin in 0..d {
        for row in 0..h {
            for col in 0..w {
                data[[row, col, bin]] = values.next().unwrap();
            }
        }
    }
    Ok(TensorFile { mode, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let mut data = Array3::zeros((2, 3, 4));
        data[[1, 2, 3]] = 1.5;
        data[[0, 1, 0]] = -2.0;
        let bytes = encode_raw(&data, OutputMode::Binary).unwrap();
        assert_eq!(&bytes[..4], b"PAGE");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..10], &[2, 0, 0, 0]);
        assert_eq!(&bytes[10..14], &[3, 0, 0, 0]);
        assert_eq!(&bytes[14..18], &[4, 0, 0, 0]);
        assert_eq!(bytes[18], 1);
        assert_eq!(bytes.len(), HEADER_LEN + 8 * 24);
        // bin 0, row 0, col 1 is the second value
        let second = f64::from_le_bytes(bytes[HEADER_LEN + 8..HEADER_LEN + 16].try_into().unwrap());
        assert_eq!(second, -2.0);
        // bin 3, row 1, col 2 is the last value
        let last = f64::from_le_bytes(bytes[bytes.len() - 8..].try_into().unwrap());
        assert_eq!(last, 1.5);

        let back = decode(&bytes).unwrap();
        assert_eq!(back.data, data);
        assert_eq!(back.mode, OutputMode::Binary);
    }

    #[test]
    fn rejects_corrupt_files() {
        let data = Array3::from_elem((2, 2, 1), 0.25);
        let bytes = encode_raw(&data, OutputMode::Analog).unwrap();
        assert_eq!(decode(&bytes[..10]).unwrap_err(), TnsrError::Length { expected: HEADER_LEN, actual: 10 });
        assert!(matches!(decode(&bytes[..bytes.len() - 1]), Err(TnsrError::Length { .. })));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(decode(&bad), Err(TnsrError::BadMagic));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert_eq!(decode(&bad), Err(TnsrError::Version(9)));
        let mut bad = bytes;
        bad[18] = 7;
        assert_eq!(decode(&bad), Err(TnsrError::Mode(7)));
    }
}
