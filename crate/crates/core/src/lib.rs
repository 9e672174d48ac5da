//! Resolution limits of classical and quantum imaging.
//!
//! The substrate is a one-dimensional row of pixels that measures the
//! incident light through a POVM diagonal in the photon-number basis. The
//! expected image `I(x|θ)`, normalized to `Pr(x|θ)`, determines the
//! Fisher information `F(θ)` about a parameter `θ` of the scene, and with
//! it the single-shot Cramér-Rao bound `δθ ≥ 1/√F(θ)`.
//!
//! Module map:
//!
//! - [`grid`], [`image`], [`field`], [`povm`], [`detection`]: pixel grid,
//!   images and distributions, photon fields, POVMs, and the Born-rule
//!   engine that turns a field and a POVM into an expected image.
//! - [`substrate`]: ideal counters, `M`-photon absorbers, saturating and
//!   bleeding detectors.
//! - [`scenarios`]: lithography, the Gaussian coherent dot and the double
//!   slit as `θ`-parametrized families.
//! - [`fisher`]: statistical distance, Fisher information, Cramér-Rao and
//!   two-point resolution, and the generator bound.
//! - [`utility`]: deposition rate and `U = F0·D^c`.
//!
//! ```
//! use imres_core::*;
//!
//! // Two-photon lithography on 2000 pixels: F0 ≈ M² = 4.
//! let spec = LithographySpec::new(2, 0.1, PixelGrid::unit(2000)?, 0.5, 0.0)?;
//! let report = fisher_from_images(
//!     |t| {
//!         let s = spec.with_theta(t);
//!         expected_image(&lithography_field(&s)?, &lithography_absorber(&s)?)
//!     },
//!     0.0,
//!     &FisherOptions::default(),
//! )?;
//! assert!((report.fisher - 4.0).abs() < 0.05);
//! assert!((report.resolution - 0.5).abs() < 0.01);
//! # Ok::<(), imres_core::Error>(())
//! ```

pub mod detection;
pub mod error;
pub mod field;
pub mod fisher;
pub mod grid;
pub mod image;
pub mod povm;
pub mod scenarios;
pub mod substrate;
pub mod utility;

pub use detection::{expected_image, outcome_distribution, OutcomeDistribution};
pub use error::{Error, Result};
pub use field::{ClusterField, FieldKind, PhotonFieldModel, PhotonNumberDistribution};
pub use fisher::{
    cramer_rao_resolution, fisher_from_distribution, fisher_from_distribution_family,
    fisher_from_image_derivative, fisher_from_images, generator_bound, generator_variance,
    noon_generator_variance, statistical_distance_increment, two_point_resolution,
    DerivativeMethod, FisherOptions, FisherReport,
};
pub use grid::PixelGrid;
pub use image::{normalize, Image, ProbabilityDistribution};
pub use povm::{BoundaryPolicy, DisplacementKernel, LocalPovm, Povm};
pub use scenarios::{
    double_slit_image, gaussian_dot_field, lithography_absorber, lithography_field,
    lithography_pattern, lithography_pattern_derivative, DoubleSlitSpec, GaussianDotSpec,
    LithographySpec, Scenario,
};
pub use substrate::{bleeding_counter, ideal_counter, m_photon_absorber, saturating_counter, BleedingSpec};
pub use utility::{deposition_rate, utility, DepositionOptions, DepositionReading, UtilityReport};
