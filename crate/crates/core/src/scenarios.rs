//! Parametrized imaging scenarios: `θ ↦` field (or image).
//!
//! * Lithography: an `M`-photon interference pattern
//!   `cos²(Mκℓx + Mθ/2)` recorded by an `M`-photon absorber.
//! * Gaussian dot: coherent light with amplitude
//!   `α_x = α0·exp[−(x − x0)²/2σ²]`, no coherence between pixels; `θ = x0`.
//! * Double slit: far-field fringes `cos²(πθs/λ)` of two point slits with
//!   separation `θ`, captured for `s ∈ [−𝒜, 𝒜]`.

use crate::detection::expected_image;
use crate::error::{Error, Result};
use crate::field::{PhotonFieldModel, PhotonNumberDistribution};
use crate::grid::PixelGrid;
use crate::image::{Image, ProbabilityDistribution};
use crate::povm::{LocalPovm, Povm};
use crate::substrate::m_photon_absorber;

#[derive(Debug, Clone, PartialEq)]
pub struct LithographySpec {
    pub photon_order: usize,
    /// `κℓ`, phase advance per pixel with `κ = 2π/λ`.
    pub kappa_ell: f64,
    pub grid: PixelGrid,
    pub efficiency: f64,
    /// Pattern shift `θ = κℓΔx`.
    pub theta: f64,
}

impl LithographySpec {
    pub fn new(photon_order: usize, kappa_ell: f64, grid: PixelGrid, efficiency: f64, theta: f64) -> Result<Self> {
        let spec = Self {
            photon_order,
            kappa_ell,
            grid,
            efficiency,
            theta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.photon_order == 0 {
            return Err(Error::param("photon_order", "must be at least 1"));
        }
        if !(self.kappa_ell > 0.0 && self.kappa_ell.is_finite()) {
            return Err(Error::param("kappa_ell", format!("must be positive, got {}", self.kappa_ell)));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::param(
                "efficiency",
                format!("must lie in [0, 1], got {}", self.efficiency),
            ));
        }
        if !self.theta.is_finite() {
            return Err(Error::param("theta", "must be finite"));
        }
        Ok(())
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..self.clone() }
    }

    fn phase(&self, coordinate: f64) -> f64 {
        let m = self.photon_order as f64;
        // cos² has period π; reducing the spatial part first keeps the
        // θ-dependence resolvable far from the origin.
        (m * self.kappa_ell * coordinate).rem_euclid(std::f64::consts::PI) + 0.5 * m * self.theta
    }

    /// Fringe period in pixels, `π/(Mκℓ)`.
    pub fn period_pixels(&self) -> f64 {
        std::f64::consts::PI / (self.photon_order as f64 * self.kappa_ell)
    }
}

/// Location distribution `∝ cos²(Mκℓx + Mθ/2)`.
pub fn lithography_pattern(spec: &LithographySpec) -> Result<ProbabilityDistribution> {
    spec.validate()?;
    let weights = spec.grid.coordinates().map(|x| spec.phase(x).cos().powi(2)).collect();
    ProbabilityDistribution::from_weights(spec.grid, weights)
}

/// The pattern together with its exact θ-derivative.
pub fn lithography_pattern_derivative(spec: &LithographySpec) -> Result<(ProbabilityDistribution, Vec<f64>)> {
    let pattern = lithography_pattern(spec)?;
    let m = spec.photon_order as f64;
    let (c, dc): (Vec<f64>, Vec<f64>) = spec
        .grid
        .coordinates()
        .map(|x| {
            let (s, co) = spec.phase(x).sin_cos();
            (co * co, -m * s * co)
        })
        .unzip();
    let z: f64 = c.iter().sum();
    let dz: f64 = dc.iter().sum();
    let derivative = c
        .iter()
        .zip(&dc)
        .map(|(c, dc)| dc / z - c * dz / (z * z))
        .collect();
    Ok((pattern, derivative))
}

/// Probability that `M` photons placed independently and uniformly on `N`
/// pixels all share one pixel, `N^{1−M}`.
pub fn lithography_coincidence(photon_order: usize, n_pixels: usize) -> f64 {
    (n_pixels as f64).powi(1 - photon_order as i32)
}

/// Single-cluster field of `M` photons whose landing pixel follows the
/// interference pattern. The efficiency is not applied here; it belongs
/// to the absorber.
pub fn lithography_field(spec: &LithographySpec) -> Result<PhotonFieldModel> {
    let pattern = lithography_pattern(spec)?;
    PhotonFieldModel::single_cluster_with_coincidence(
        spec.photon_order,
        pattern,
        lithography_coincidence(spec.photon_order, spec.grid.n_pixels()),
    )
}

pub fn lithography_absorber(spec: &LithographySpec) -> Result<Povm> {
    m_photon_absorber(spec.photon_order, spec.efficiency)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDotSpec {
    pub peak_amplitude: f64,
    /// Dot centre `x0` in pixel coordinates.
    pub center: f64,
    /// `σ` in pixel units.
    pub width: f64,
    pub grid: PixelGrid,
}

impl GaussianDotSpec {
    pub fn new(peak_amplitude: f64, center: f64, width: f64, grid: PixelGrid) -> Result<Self> {
        let spec = Self {
            peak_amplitude,
            center,
            width,
            grid,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::param("width", format!("must be positive, got {}", self.width)));
        }
        if !(self.peak_amplitude >= 0.0 && self.peak_amplitude.is_finite()) {
            return Err(Error::param(
                "peak_amplitude",
                format!("must be finite and >= 0, got {}", self.peak_amplitude),
            ));
        }
        if !self.center.is_finite() {
            return Err(Error::param("center", "must be finite"));
        }
        Ok(())
    }

    pub fn with_center(&self, center: f64) -> Self {
        Self { center, ..self.clone() }
    }

    /// `|α_x|² = α0²·exp[−(x − x0)²/σ²]`.
    pub fn mean_photon_number(&self, coordinate: f64) -> f64 {
        let u = (coordinate - self.center) / self.width;
        self.peak_amplitude.powi(2) * (-u * u).exp()
    }

    /// Whether the ±4σ window around the centre stays on the grid.
    pub fn fits_grid(&self) -> bool {
        let first = self.grid.coordinate(0);
        let last = self.grid.coordinate(self.grid.n_pixels() - 1);
        self.center - 4.0 * self.width >= first && self.center + 4.0 * self.width <= last
    }
}

/// Independent Poisson pixels with means `|α_x|²`.
pub fn gaussian_dot_field(spec: &GaussianDotSpec) -> Result<PhotonFieldModel> {
    spec.validate()?;
    let pixels = spec
        .grid
        .coordinates()
        .map(|x| PhotonNumberDistribution::poisson(spec.mean_photon_number(x)))
        .collect::<Result<Vec<_>>>()?;
    PhotonFieldModel::independent(spec.grid, pixels)
}

pub const DEFAULT_FAR_FIELD_SAMPLES: usize = 4096;
pub const MIN_FAR_FIELD_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSlitSpec {
    pub slit_separation: f64,
    pub wavelength: f64,
    pub numerical_aperture: f64,
    pub n_samples: usize,
}

impl DoubleSlitSpec {
    pub fn new(slit_separation: f64, wavelength: f64, numerical_aperture: f64) -> Result<Self> {
        let spec = Self {
            slit_separation,
            wavelength,
            numerical_aperture,
            n_samples: DEFAULT_FAR_FIELD_SAMPLES,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_samples(mut self, n_samples: usize) -> Result<Self> {
        self.n_samples = n_samples;
        self.validate()?;
        Ok(self)
    }

    pub fn with_separation(&self, slit_separation: f64) -> Self {
        Self {
            slit_separation,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.slit_separation.is_finite() {
            return Err(Error::param("slit_separation", "must be finite"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::param("wavelength", format!("must be positive, got {}", self.wavelength)));
        }
        if !(self.numerical_aperture > 0.0 && self.numerical_aperture <= 1.0) {
            return Err(Error::param(
                "numerical_aperture",
                format!("must lie in (0, 1], got {}", self.numerical_aperture),
            ));
        }
        if self.n_samples < MIN_FAR_FIELD_SAMPLES {
            return Err(Error::param(
                "n_samples",
                format!("need at least {MIN_FAR_FIELD_SAMPLES}, got {}", self.n_samples),
            ));
        }
        Ok(())
    }

    /// `s_j = −𝒜 + 2𝒜·j/(n − 1)`.
    pub fn sample_positions(&self) -> impl Iterator<Item = f64> + '_ {
        let a = self.numerical_aperture;
        let last = (self.n_samples - 1) as f64;
        (0..self.n_samples).map(move |j| -a + 2.0 * a * j as f64 / last)
    }

    /// Grid over the captured far field; pixel `j` is sample `s_j`.
    pub fn grid(&self) -> Result<PixelGrid> {
        PixelGrid::new(
            self.n_samples,
            2.0 * self.numerical_aperture / (self.n_samples - 1) as f64,
            0,
        )
    }

    /// The Abbe estimate `0.5·λ/𝒜`.
    pub fn abbe_limit(&self) -> f64 {
        0.5 * self.wavelength / self.numerical_aperture
    }
}

/// `I(s) = cos²(πθs/λ)`, not normalized.
pub fn double_slit_image(spec: &DoubleSlitSpec) -> Result<Image> {
    spec.validate()?;
    let k = std::f64::consts::PI * spec.slit_separation / spec.wavelength;
    let values = spec.sample_positions().map(|s| (k * s).cos().powi(2)).collect();
    Image::new(spec.grid()?, values)
}

/// Any of the three scenarios, parametrized by its own `θ`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Lithography(LithographySpec),
    GaussianDot(GaussianDotSpec),
    DoubleSlit(DoubleSlitSpec),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Lithography(_) => "lithography",
            Scenario::GaussianDot(_) => "gaussian_dot",
            Scenario::DoubleSlit(_) => "double_slit",
        }
    }

    /// The `θ` at which `F0` is evaluated: the pattern shift, the dot
    /// centre, or the slit separation.
    pub fn reference_theta(&self) -> f64 {
        match self {
            Scenario::Lithography(s) => s.theta,
            Scenario::GaussianDot(s) => s.center,
            Scenario::DoubleSlit(s) => s.slit_separation,
        }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        match self {
            Scenario::Lithography(s) => Scenario::Lithography(s.with_theta(theta)),
            Scenario::GaussianDot(s) => Scenario::GaussianDot(s.with_center(theta)),
            Scenario::DoubleSlit(s) => Scenario::DoubleSlit(s.with_separation(theta)),
        }
    }

    /// Photon field at the scenario's current `θ`; `None` for the double
    /// slit, which is modelled directly as an image.
    pub fn field(&self) -> Result<Option<PhotonFieldModel>> {
        match self {
            Scenario::Lithography(s) => lithography_field(s).map(Some),
            Scenario::GaussianDot(s) => gaussian_dot_field(s).map(Some),
            Scenario::DoubleSlit(_) => Ok(None),
        }
    }

    /// Expected image at the scenario's current `θ` through `povm`.
    pub fn image(&self, povm: &Povm) -> Result<Image> {
        match self.field()? {
            Some(field) => expected_image(&field, povm),
            None => match (self, povm) {
                (Scenario::DoubleSlit(s), Povm::Local(LocalPovm::Ideal)) => double_slit_image(s),
                _ => Err(Error::Unsupported(
                    "the double-slit scenario is an intensity model and only supports the ideal substrate".into(),
                )),
            },
        }
    }

    /// `I(x|θ)` for an arbitrary `θ`.
    pub fn image_at(&self, theta: f64, povm: &Povm) -> Result<Image> {
        self.with_theta(theta).image(povm)
    }
}
