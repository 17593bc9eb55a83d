//! Command-line flags, JSON config files and their merge into a [`RunConfig`].
//!
//! Precedence, lowest to highest: built-in defaults, top-level config
//! parameters, per-band overrides (config `bands` entries and `--band`
//! files), explicit command-line flags.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use page_core::{KernelParams, PageError};
use serde::Deserialize;

use crate::CliError;

/// Artifact kinds a run can write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    #[value(name = "analog_bins")]
    AnalogBins,
    #[value(name = "binary_bins")]
    BinaryBins,
    #[value(name = "overlay")]
    Overlay,
    #[value(name = "raw_tensor")]
    RawTensor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub output_dir: PathBuf,
    pub bands: Vec<KernelParams>,
    pub emit: BTreeSet<Emit>,
    pub grayscale: bool,
}

/// Phase-stretch directional edge extraction.
#[derive(Debug, Parser)]
#[command(name = "page", version, about, allow_negative_numbers = true)]
pub struct Args {
    /// Input image (PNG, PGM/PPM or JPEG)
    pub input: Option<PathBuf>,

    /// Output directory
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,

    /// JSON config file; explicit flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Center frequency of the φ1 Gaussian
    #[arg(long)]
    pub mu1: Option<f64>,
    /// Log-center of the φ2 log-normal
    #[arg(long, allow_hyphen_values = true)]
    pub mu2: Option<f64>,
    /// Width of φ1
    #[arg(long)]
    pub sigma1: Option<f64>,
    /// Width of φ2
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Strength of φ1
    #[arg(long)]
    pub s1: Option<f64>,
    /// Strength of φ2
    #[arg(long)]
    pub s2: Option<f64>,
    /// Number of direction bins (1..=179)
    #[arg(long)]
    pub bins: Option<usize>,
    /// Low-pass denoising width
    #[arg(long = "sigma-lpf")]
    pub sigma_lpf: Option<f64>,
    /// Lower phase threshold (radians)
    #[arg(long = "thresh-min", allow_hyphen_values = true)]
    pub thresh_min: Option<f64>,
    /// Upper phase threshold (radians)
    #[arg(long = "thresh-max", allow_hyphen_values = true)]
    pub thresh_max: Option<f64>,

    /// Binary edge output (default)
    #[arg(long, conflicts_with = "no_morph")]
    pub morph: bool,
    /// Analog phase output
    #[arg(long = "no-morph")]
    pub no_morph: bool,

    /// JSON file with per-band parameter overrides; repeat for several bands
    #[arg(long = "band")]
    pub band: Vec<PathBuf>,

    /// Comma-separated artifacts to write
    #[arg(long, value_enum, value_delimiter = ',')]
    pub emit: Vec<Emit>,

    /// Collapse color input to luma before processing
    #[arg(long)]
    pub gray: bool,
}

/// Parameter fields, all optional, named as on the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub bins: Option<usize>,
    pub sigma_lpf: Option<f64>,
    pub thresh_min: Option<f64>,
    pub thresh_max: Option<f64>,
    pub morph: Option<bool>,
}

impl ParamOverrides {
    pub fn apply(&self, mut p: KernelParams) -> KernelParams {
        macro_rules! set {
            ($src:ident => $dst:ident) => {
                if let Some(x) = self.$src {
                    p.$dst = x;
                }
            };
        }
        set!(mu1 => mu_1);
        set!(mu2 => mu_2);
        set!(sigma1 => sigma_1);
        set!(sigma2 => sigma_2);
        set!(s1 => s_1);
        set!(s2 => s_2);
        set!(bins => direction_bins);
        set!(sigma_lpf => sigma_lpf);
        set!(thresh_min => thresh_min);
        set!(thresh_max => thresh_max);
        set!(morph => morph_flag);
        p
    }
}

/// A band is either inline overrides or a path to a JSON file holding them.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BandSpec {
    File(PathBuf),
    Inline(ParamOverrides),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub bins: Option<usize>,
    pub sigma_lpf: Option<f64>,
    pub thresh_min: Option<f64>,
    pub thresh_max: Option<f64>,
    pub morph: Option<bool>,
    #[serde(default)]
    pub bands: Vec<BandSpec>,
    pub emit: Option<Vec<Emit>>,
    pub gray: Option<bool>,
}

impl ConfigFile {
    fn params(&self) -> ParamOverrides {
        ParamOverrides {
            mu1: self.mu1,
            mu2: self.mu2,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            s1: self.s1,
            s2: self.s2,
            bins: self.bins,
            sigma_lpf: self.sigma_lpf,
            thresh_min: self.thresh_min,
            thresh_max: self.thresh_max,
            morph: self.morph,
        }
    }
}

impl Args {
    fn params(&self) -> ParamOverrides {
        ParamOverrides {
            mu1: self.mu1,
            mu2: self.mu2,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            s1: self.s1,
            s2: self.s2,
            bins: self.bins,
            sigma_lpf: self.sigma_lpf,
            thresh_min: self.thresh_min,
            thresh_max: self.thresh_max,
            morph: match (self.morph, self.no_morph) {
                (true, _) => Some(true),
                (_, true) => Some(false),
                _ => None,
            },
        }
    }
}

/// Maps a library field name to its flag name.
pub fn flag_name(field: &str) -> &str {
    match field {
        "mu_1" => "mu1",
        "mu_2" => "mu2",
        "sigma_1" => "sigma1",
        "sigma_2" => "sigma2",
        "s_1" => "s1",
        "s_2" => "s2",
        "direction_bins" => "bins",
        "sigma_lpf" => "sigma-lpf",
        "thresh_min" => "thresh-min",
        "thresh_max" => "thresh-max",
        other => other,
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: path.to_owned(),
        reason: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_owned(),
        reason: e.to_string(),
    })
}

fn resolve(base: Option<&Path>, p: PathBuf) -> PathBuf {
    match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    }
}

pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(CliError::Usage)?;
    build_config(args)
}

pub fn build_config(args: Args) -> Result<RunConfig, CliError> {
    let (config, config_dir) = match &args.config {
        Some(path) => {
            let cfg: ConfigFile = read_json(path)?;
            (cfg, path.parent().map(Path::to_path_buf))
        }
        None => (ConfigFile::default(), None),
    };
    let config_dir = config_dir.as_deref();

    let input_path = args
        .input
        .clone()
        .or_else(|| config.input.clone().map(|p| resolve(config_dir, p)))
        .ok_or_else(|| CliError::param("input", "no input image given"))?;
    let output_dir = args
        .output
        .clone()
        .or_else(|| config.output.clone().map(|p| resolve(config_dir, p)))
        .ok_or_else(|| CliError::param("output", "no output directory given (-o)"))?;

    let base = config.params().apply(KernelParams::default());
    let mut band_overrides = Vec::new();
    for spec in &config.bands {
        band_overrides.push(match spec {
            BandSpec::Inline(o) => o.clone(),
            BandSpec::File(p) => read_json(&resolve(config_dir, p.clone()))?,
        });
    }
    for p in &args.band {
        band_overrides.push(read_json(p)?);
    }
    if band_overrides.is_empty() {
        band_overrides.push(ParamOverrides::default());
    }

    let flags = args.params();
    let many = band_overrides.len() > 1;
    let bands = band_overrides
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let params = flags.apply(o.apply(base));
            params.validate().map_err(|e| match e {
                PageError::InvalidParameter { field, reason } => CliError::Param {
                    field: flag_name(field).to_string(),
                    reason: if many { format!("band {k}: {reason}") } else { reason },
                },
                other => CliError::param("params", other.to_string()),
            })?;
            Ok(params)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let requested: Vec<Emit> = if !args.emit.is_empty() {
        args.emit.clone()
    } else {
        config.emit.clone().unwrap_or_default()
    };
    let emit: BTreeSet<Emit> = if requested.is_empty() {
        default_emit(&bands)
    } else {
        requested.into_iter().collect()
    };
    check_emit(&emit, &bands)?;

    Ok(RunConfig {
        input_path,
        output_dir,
        bands,
        emit,
        grayscale: args.gray || config.gray.unwrap_or(false),
    })
}

fn default_emit(bands: &[KernelParams]) -> BTreeSet<Emit> {
    let bins = if bands.iter().all(|b| b.morph_flag) {
        Emit::BinaryBins
    } else {
        Emit::AnalogBins
    };
    [bins, Emit::Overlay, Emit::RawTensor].into_iter().collect()
}

/// Per-bin images follow the tensor mode, so their kind must match it.
fn check_emit(emit: &BTreeSet<Emit>, bands: &[KernelParams]) -> Result<(), CliError> {
    for b in bands {
        if b.morph_flag && emit.contains(&Emit::AnalogBins) {
            return Err(CliError::param("emit", "`analog_bins` requires --no-morph"));
        }
        if !b.morph_flag && emit.contains(&Emit::BinaryBins) {
            return Err(CliError::param("emit", "`binary_bins` requires --morph"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        parse_args(std::iter::once("page").chain(args.iter().copied()))
    }

    #[test]
    fn direct_flag_mapping() {
        let c = parse(&["input.png", "-o", "out/", "--bins", "8", "--no-morph", "--emit", "analog_bins"]).unwrap();
        assert_eq!(c.bands.len(), 1);
        assert_eq!(c.bands[0].direction_bins, 8);
        assert!(!c.bands[0].morph_flag);
        assert_eq!(c.emit, [Emit::AnalogBins].into_iter().collect());
        assert_eq!(c.input_path, PathBuf::from("input.png"));
        assert_eq!(c.output_dir, PathBuf::from("out/"));
    }

    #[test]
    fn zero_bins_names_field() {
        let err = parse(&["in.png", "-o", "out", "--bins", "0"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("`bins`"), "{err}");
    }

    #[test]
    fn negative_values_and_lists() {
        let c = parse(&[
            "in.png", "-o", "o", "--thresh-min", "-1.2", "--mu2", "-0.5", "--emit", "overlay,raw_tensor",
        ])
        .unwrap();
        assert_eq!(c.bands[0].thresh_min, -1.2);
        assert_eq!(c.bands[0].mu_2, -0.5);
        assert_eq!(c.emit.len(), 2);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let err = parse(&["in.png", "-o", "o", "--frobnicate"]).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn config_then_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::File::create(&cfg)
            .unwrap()
            .write_all(br#"{"input": "img.png", "output": "out", "bins": 4, "sigma1": 0.2, "gray": true}"#)
            .unwrap();
        let c = parse(&["--config", cfg.to_str().unwrap(), "--bins", "16"]).unwrap();
        assert_eq!(c.bands[0].direction_bins, 16);
        assert_eq!(c.bands[0].sigma_1, 0.2);
        assert!(c.grayscale);
        assert_eq!(c.input_path, dir.path().join("img.png"));
        assert_eq!(c.output_dir, dir.path().join("out"));
    }

    #[test]
    fn bands_from_config_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let band = dir.path().join("fine.json");
        std::fs::write(&band, r#"{"mu1": 0.3}"#).unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(&cfg, r#"{"bands": [{"mu1": 0.1, "bins": 3}, "fine.json"], "sigma2": 0.9}"#).unwrap();
        let extra = dir.path().join("extra.json");
        std::fs::write(&extra, r#"{"sigma1": 0.02}"#).unwrap();
        let c = parse(&[
            "in.png", "-o", "o", "--config", cfg.to_str().unwrap(), "--band", extra.to_str().unwrap(), "--s1", "1.1",
        ])
        .unwrap();
        assert_eq!(c.bands.len(), 3);
        assert_eq!(c.bands[0].mu_1, 0.1);
        assert_eq!(c.bands[0].direction_bins, 3);
        assert_eq!(c.bands[1].mu_1, 0.3);
        assert_eq!(c.bands[2].sigma_1, 0.02);
        assert!(c.bands.iter().all(|b| b.sigma_2 == 0.9 && b.s_1 == 1.1));
    }

    #[test]
    fn bad_config_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        std::fs::write(&cfg, r#"{"binz": 4}"#).unwrap();
        let err = parse(&["in.png", "-o", "o", "--config", cfg.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("binz"), "{err}");
        let missing = dir.path().join("nope.json");
        let err = parse(&["in.png", "-o", "o", "--config", missing.to_str().unwrap()]).unwrap_err();
        assert!(matches!(err, CliError::Config { .. }));
    }

    #[test]
    fn emit_must_match_mode() {
        assert!(parse(&["in.png", "-o", "o", "--emit", "analog_bins"]).is_err());
        assert!(parse(&["in.png", "-o", "o", "--no-morph", "--emit", "binary_bins"]).is_err());
        let c = parse(&["in.png", "-o", "o"]).unwrap();
        assert!(c.emit.contains(&Emit::BinaryBins));
        assert!(c.emit.contains(&Emit::RawTensor));
    }

    #[test]
    fn threshold_order_checked() {
        let err = parse(&["in.png", "-o", "o", "--thresh-min", "1", "--thresh-max", "0.5"]).unwrap_err();
        assert!(err.to_string().contains("thresh-min"), "{err}");
    }
}
