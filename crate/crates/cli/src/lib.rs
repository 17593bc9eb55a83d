//! Library side of the `page` command: argument parsing, artifact writing
//! and the `features.tnsr` codec.

pub mod config;
pub mod io;
pub mod tnsr;

use std::fs;
use std::path::{Path, PathBuf};

use page_core::viz::{colorize_orientation, combine_tensors};
use page_core::{page_run_color, FeatureTensor, OutputMode};
use thiserror::Error;

pub use config::{parse_args, Emit, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(clap::Error),
    #[error("invalid value for `{field}`: {reason}")]
    Param { field: String, reason: String },
    #[error("cannot use config {}: {reason}", path.display())]
    Config { path: PathBuf, reason: String },
    #[error("cannot read input {}: {reason}", path.display())]
    Input { path: PathBuf, reason: String },
    #[error("cannot write {}: {reason}", path.display())]
    Output { path: PathBuf, reason: String },
}

impl CliError {
    pub fn param(field: &str, reason: impl Into<String>) -> Self {
        Self::Param {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// 0 for help/version, 2 for usage and parameter errors, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(e) => e.exit_code(),
            Self::Param { .. } | Self::Config { .. } => 2,
            Self::Input { .. } | Self::Output { .. } => 1,
        }
    }
}

/// File name for one direction channel, e.g. `bin_03_68.5.png`.
pub fn bin_file_name(bin: usize, direction: f64) -> String {
    format!("bin_{bin:02}_{:.1}.png", direction.to_degrees())
}

/// Artifacts for one band, in memory: `(relative file name, bytes)`.
pub fn render_band(tensor: &FeatureTensor, emit: &std::collections::BTreeSet<Emit>) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    let bins_wanted = match tensor.mode {
        OutputMode::Analog => emit.contains(&Emit::AnalogBins),
        OutputMode::Binary => emit.contains(&Emit::BinaryBins),
    };
    if bins_wanted {
        let map = match tensor.mode {
            OutputMode::Analog => io::phase_to_u8,
            OutputMode::Binary => io::bits_to_u8,
        };
        for (d, &theta) in tensor.directions.iter().enumerate() {
            files.push((bin_file_name(d, theta), io::encode_gray_png(tensor.channel(d), map)?));
        }
    }
    if emit.contains(&Emit::Overlay) {
        files.push(("overlay.png".into(), io::encode_rgb_png(&colorize_orientation(tensor))?));
    }
    if emit.contains(&Emit::RawTensor) {
        files.push(("features.tnsr".into(), tnsr::encode(tensor).map_err(|e| e.to_string())?));
    }
    Ok(files)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Output {
        path: path.to_owned(),
        reason: e.to_string(),
    })
}

/// Decodes the input, runs every band and writes the requested artifacts.
///
/// Color channels are processed separately and combined per bin, keeping
/// the response of largest magnitude. With more than one band, each band
/// writes into `band_NN/` under the output directory.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let channels = io::load_channels(&config.input_path, config.grayscale).map_err(|reason| CliError::Input {
        path: config.input_path.clone(),
        reason,
    })?;

    let mut outputs = Vec::new();
    for (k, params) in config.bands.iter().enumerate() {
        let per_channel = page_run_color(&channels, params).map_err(|e| CliError::param("params", e.to_string()))?;
        let combined = combine_tensors(&per_channel).map_err(|e| CliError::param("params", e.to_string()))?;
        let dir = if config.bands.len() > 1 {
            config.output_dir.join(format!("band_{k:02}"))
        } else {
            config.output_dir.clone()
        };
        let files = render_band(&combined, &config.emit).map_err(|reason| CliError::Output {
            path: dir.clone(),
            reason,
        })?;
        outputs.push((dir, files));
    }

    let mut written = Vec::new();
    for (dir, files) in outputs {
        fs::create_dir_all(&dir).map_err(|e| CliError::Output {
            path: dir.clone(),
            reason: e.to_string(),
        })?;
        for (name, bytes) in files {
            let path = dir.join(name);
            write_file(&path, &bytes)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_names() {
        assert_eq!(bin_file_name(0, std::f64::consts::PI / 180.0), "bin_00_1.0.png");
        assert_eq!(
            bin_file_name(3, std::f64::consts::PI / 180.0 + 3.0 * std::f64::consts::PI / 8.0),
            "bin_03_68.5.png"
        );
    }
}
