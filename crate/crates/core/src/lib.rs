//! Phase-stretch directional edge features.
//!
//! An image is low-pass filtered in the frequency domain, multiplied by a
//! bank of orientation-selective phase kernels and transformed back; the
//! phase of each result is one direction channel of an `H x W x D` feature
//! tensor. Channels can be binarized with bipolar thresholds and thinning,
//! and rendered with hue encoding orientation.
//!
//! ```
//! use ndarray::Array2;
//! use page_core::{page_run, ImagePlane, KernelParams};
//!
//! let img = ImagePlane::new(Array2::from_shape_fn((32, 32), |(_, j)| (j >= 16) as u8 as f64)).unwrap();
//! let params = KernelParams { direction_bins: 8, morph_flag: false, ..Default::default() };
//! let features = page_run(&img, &params).unwrap();
//! assert_eq!(features.dim(), (32, 32, 8));
//! ```

pub mod error;
pub mod grid;
pub mod kernels;
pub mod morphology;
pub mod oracle;
pub mod pipeline;
pub mod stretch;
pub mod viz;

pub use error::{PageError, Result};
pub use grid::{build_frequency_grid, cart2pol, FrequencyGrid};
pub use kernels::{build_filter_bank, build_lowpass, direction_bins, KernelParams, PhaseFilterBank};
pub use morphology::{binarize_features, BinaryMap, Connectivity};
pub use pipeline::{page_run, page_run_color, page_run_multiband, FeatureTensor, OutputMode};
pub use stretch::{apply_stretch, extract_phase, ComplexField, ImagePlane};
pub use viz::{colorize_orientation, composite_channels, RgbImage};
