//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use imres_core::{
    bleeding_counter, ideal_counter, lithography_absorber, m_photon_absorber, saturating_counter,
    BleedingSpec, BoundaryPolicy, DepositionOptions, DepositionReading, DoubleSlitSpec, FisherOptions,
    GaussianDotSpec, LithographySpec, PixelGrid, Povm, Scenario,
};

use crate::error::CliError;

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    imres_core::scenarios::DEFAULT_FAR_FIELD_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    Lithography {
        photon_order: usize,
        n_pixels: usize,
        kappa_ell: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default = "one")]
        efficiency: f64,
    },
    GaussianDot {
        peak_amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        /// Centred grid; sized to ±(4σ + 8) pixels around the dot when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_pixels: Option<usize>,
        #[serde(default = "one")]
        pixel_width: f64,
    },
    DoubleSlit {
        slit_separation: f64,
        wavelength: f64,
        numerical_aperture: f64,
        #[serde(default = "default_samples")]
        n_samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Clamp,
    Reflect,
    Discard,
}

impl From<Boundary> for BoundaryPolicy {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Clamp => BoundaryPolicy::Clamp,
            Boundary::Reflect => BoundaryPolicy::Reflect,
            Boundary::Discard => BoundaryPolicy::Discard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubstrateConfig {
    Ideal,
    MPhoton {
        order: usize,
        #[serde(default = "one")]
        efficiency: f64,
    },
    Saturating {
        level: usize,
    },
    Bleeding {
        mean_distance: f64,
        #[serde(default = "ideal_base")]
        base: Box<SubstrateConfig>,
        #[serde(default)]
        boundary: Boundary,
    },
}

fn ideal_base() -> Box<SubstrateConfig> {
    Box::new(SubstrateConfig::Ideal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Fisher,
    Resolution,
    TwoPoint,
    Deposition,
    Utility,
    Sweep,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Fisher => "fisher",
            Analysis::Resolution => "resolution",
            Analysis::TwoPoint => "two_point",
            Analysis::Deposition => "deposition",
            Analysis::Utility => "utility",
            Analysis::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsConfig {
    #[serde(default = "default_floor")]
    pub floor_ratio: f64,
    /// Absolute finite-difference step; `1e-5·max(1, |θ|)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default)]
    pub background: f64,
    #[serde(default)]
    pub dark_level: f64,
    #[serde(default = "yes")]
    pub check_step: bool,
}

fn default_floor() -> f64 {
    imres_core::fisher::DEFAULT_FLOOR_RATIO
}

fn yes() -> bool {
    true
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            floor_ratio: default_floor(),
            step: None,
            background: 0.0,
            dark_level: 0.0,
            check_step: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    #[default]
    PerPixel,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityConfig {
    #[serde(default = "one")]
    pub cost_exponent: f64,
    #[serde(default)]
    pub reading: Reading,
    #[serde(default)]
    pub normalize_by_pixels: bool,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        Self {
            cost_exponent: 1.0,
            reading: Reading::default(),
            normalize_by_pixels: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPointConfig {
    pub bracket: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    /// Also write `<stem>.reference.csv` with reference curves.
    #[serde(default)]
    pub reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    /// Defaults to the lithography absorber for lithography and to the
    /// ideal counter otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substrate: Option<SubstrateConfig>,
    pub analysis: Analysis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub utility: UtilityConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_point: Option<TwoPointConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Core validation failures name the scenario field they concern.
fn scenario_error(e: imres_core::Error) -> CliError {
    match e {
        imres_core::Error::InvalidParameter { name, reason } => invalid(format!("scenario.{name}"), reason),
        other => invalid("scenario", other.to_string()),
    }
}

const INTEGER_PARAMETERS: [&str; 5] = ["photon_order", "n_pixels", "n_samples", "order", "level"];

impl ScenarioConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioConfig::Lithography { .. } => "lithography",
            ScenarioConfig::GaussianDot { .. } => "gaussian_dot",
            ScenarioConfig::DoubleSlit { .. } => "double_slit",
        }
    }

    pub fn build(&self) -> Result<Scenario, CliError> {
        match *self {
            ScenarioConfig::Lithography {
                photon_order,
                n_pixels,
                kappa_ell,
                theta,
                efficiency,
            } => {
                let grid = PixelGrid::unit(n_pixels).map_err(|_| invalid("scenario.n_pixels", "must be at least 1"))?;
                if photon_order > 1 && photon_order > n_pixels {
                    return Err(invalid(
                        "scenario.photon_order",
                        format!("{photon_order} photons cannot land on {n_pixels} distinct pixels"),
                    ));
                }
                LithographySpec::new(photon_order, kappa_ell, grid, efficiency, theta)
                    .map(Scenario::Lithography)
                    .map_err(scenario_error)
            }
            ScenarioConfig::GaussianDot {
                peak_amplitude,
                width,
                center,
                n_pixels,
                pixel_width,
            } => {
                if !(pixel_width > 0.0 && pixel_width.is_finite()) {
                    return Err(invalid("scenario.pixel_width", format!("must be positive, got {pixel_width}")));
                }
                if !(width > 0.0 && width.is_finite()) {
                    return Err(invalid("scenario.width", format!("must be positive, got {width}")));
                }
                if !center.is_finite() {
                    return Err(invalid("scenario.center", "must be finite"));
                }
                let n = match n_pixels {
                    Some(n) => n,
                    None => 2 * ((4.0 * width + center.abs()) / pixel_width + 8.0).ceil() as usize + 1,
                };
                let grid = PixelGrid::centered(n, pixel_width).map_err(|_| invalid("scenario.n_pixels", "must be at least 1"))?;
                GaussianDotSpec::new(peak_amplitude, center, width, grid)
                    .map(Scenario::GaussianDot)
                    .map_err(scenario_error)
            }
            ScenarioConfig::DoubleSlit {
                slit_separation,
                wavelength,
                numerical_aperture,
                n_samples,
            } => DoubleSlitSpec::new(slit_separation, wavelength, numerical_aperture)
                .and_then(|s| s.with_samples(n_samples))
                .map(Scenario::DoubleSlit)
                .map_err(scenario_error),
        }
    }

    fn set(&mut self, name: &str, value: f64) -> bool {
        let count = value.round().max(0.0) as usize;
        match self {
            ScenarioConfig::Lithography {
                photon_order,
                n_pixels,
                kappa_ell,
                theta,
                efficiency,
            } => match name {
                "photon_order" => *photon_order = count,
                "n_pixels" => *n_pixels = count,
                "kappa_ell" => *kappa_ell = value,
                "theta" => *theta = value,
                "efficiency" => *efficiency = value,
                _ => return false,
            },
            ScenarioConfig::GaussianDot {
                peak_amplitude,
                width,
                center,
                n_pixels,
                pixel_width,
            } => match name {
                "peak_amplitude" => *peak_amplitude = value,
                "width" => *width = value,
                "center" => *center = value,
                "n_pixels" => *n_pixels = Some(count),
                "pixel_width" => *pixel_width = value,
                _ => return false,
            },
            ScenarioConfig::DoubleSlit {
                slit_separation,
                wavelength,
                numerical_aperture,
                n_samples,
            } => match name {
                "slit_separation" => *slit_separation = value,
                "wavelength" => *wavelength = value,
                "numerical_aperture" => *numerical_aperture = value,
                "n_samples" => *n_samples = count,
                _ => return false,
            },
        }
        true
    }

    /// Reference value of `F0` where one is known in closed form.
    pub fn reference_fisher(&self) -> Option<f64> {
        match *self {
            ScenarioConfig::Lithography { photon_order, .. } => Some((photon_order * photon_order) as f64),
            ScenarioConfig::GaussianDot { width, .. } => Some(2.0 / (width * width)),
            ScenarioConfig::DoubleSlit { .. } => None,
        }
    }
}

impl SubstrateConfig {
    pub fn build(&self) -> Result<Povm, CliError> {
        self.build_at("substrate")
    }

    fn build_at(&self, path: &str) -> Result<Povm, CliError> {
        match self {
            SubstrateConfig::Ideal => Ok(ideal_counter()),
            SubstrateConfig::MPhoton { order, efficiency } => {
                if *order == 0 {
                    return Err(invalid(format!("{path}.order"), "must be at least 1"));
                }
                if !(0.0..=1.0).contains(efficiency) {
                    return Err(invalid(
                        format!("{path}.efficiency"),
                        format!("must lie in [0, 1], got {efficiency}"),
                    ));
                }
                Ok(m_photon_absorber(*order, *efficiency).expect("validated"))
            }
            SubstrateConfig::Saturating { level } => {
                saturating_counter(*level).map_err(|_| invalid(format!("{path}.level"), "must be at least 1"))
            }
            SubstrateConfig::Bleeding {
                mean_distance,
                base,
                boundary,
            } => {
                if !(*mean_distance >= 0.0 && mean_distance.is_finite()) {
                    return Err(invalid(
                        format!("{path}.mean_distance"),
                        format!("must be finite and >= 0, got {mean_distance}"),
                    ));
                }
                if matches!(**base, SubstrateConfig::Bleeding { .. }) {
                    return Err(invalid(format!("{path}.base"), "must not itself bleed"));
                }
                let base = base.build_at(&format!("{path}.base"))?;
                bleeding_counter(BleedingSpec::new(*mean_distance, base).with_boundary((*boundary).into()))
                    .map_err(|e| invalid(format!("{path}.mean_distance"), e.to_string()))
            }
        }
    }

    /// The ideal counterpart used for Fisher ratios: the base of a bleeding
    /// detector, a lossless absorber of the same order, or the ideal counter.
    pub fn reference(&self) -> SubstrateConfig {
        match self {
            SubstrateConfig::Bleeding { base, .. } => (**base).clone(),
            SubstrateConfig::MPhoton { order, .. } => SubstrateConfig::MPhoton {
                order: *order,
                efficiency: 1.0,
            },
            _ => SubstrateConfig::Ideal,
        }
    }

    fn set(&mut self, name: &str, value: f64) -> bool {
        let count = value.round().max(0.0) as usize;
        match self {
            SubstrateConfig::Ideal => false,
            SubstrateConfig::MPhoton { order, efficiency } => match name {
                "order" => {
                    *order = count;
                    true
                }
                "efficiency" => {
                    *efficiency = value;
                    true
                }
                _ => false,
            },
            SubstrateConfig::Saturating { level } => {
                if name == "level" {
                    *level = count;
                }
                name == "level"
            }
            SubstrateConfig::Bleeding { mean_distance, base, .. } => {
                if name == "mean_distance" {
                    *mean_distance = value;
                    true
                } else {
                    base.set(name, value)
                }
            }
        }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let integral = INTEGER_PARAMETERS.contains(&self.parameter_name());
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                let v = match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                };
                if integral {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }

    /// Parameter name with an optional `scenario.`/`substrate.` prefix removed.
    pub fn parameter_name(&self) -> &str {
        self.parameter
            .strip_prefix("scenario.")
            .or_else(|| self.parameter.strip_prefix("substrate."))
            .unwrap_or(&self.parameter)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(invalid("sweep.count", format!("must be at least 2, got {}", self.count)));
        }
        if !self.start.is_finite() {
            return Err(invalid("sweep.start", "must be finite"));
        }
        if !self.stop.is_finite() {
            return Err(invalid("sweep.stop", "must be finite"));
        }
        if self.spacing == Spacing::Log {
            if self.start <= 0.0 {
                return Err(invalid("sweep.start", "log spacing needs a positive start"));
            }
            if self.stop <= 0.0 {
                return Err(invalid("sweep.stop", "log spacing needs a positive stop"));
            }
        }
        Ok(())
    }
}

/// A fully resolved evaluation point.
#[derive(Debug, Clone)]
pub struct Point {
    pub scenario_config: ScenarioConfig,
    pub scenario: Scenario,
    pub povm: Povm,
    pub reference_povm: Povm,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn fisher_options(&self) -> FisherOptions {
        FisherOptions {
            floor_ratio: self.numerics.floor_ratio,
            step: self.numerics.step,
            background: self.numerics.background,
            dark_level: self.numerics.dark_level,
            check_step: self.numerics.check_step,
            ..FisherOptions::default()
        }
    }

    pub fn deposition_options(&self) -> DepositionOptions {
        DepositionOptions {
            reading: match self.utility.reading {
                Reading::PerPixel => DepositionReading::PerPixel,
                Reading::Global => DepositionReading::Global,
            },
            normalize_by_pixels: self.utility.normalize_by_pixels,
        }
    }

    /// Bracket for the two-point search; the double slit defaults to
    /// `(0.1, 0.5)·λ/𝒜`.
    pub fn two_point_bracket(&self) -> Option<(f64, f64)> {
        match (&self.two_point, &self.scenario) {
            (Some(t), _) => Some((t.bracket[0], t.bracket[1])),
            (
                None,
                ScenarioConfig::DoubleSlit {
                    wavelength,
                    numerical_aperture,
                    ..
                },
            ) => {
                let unit = wavelength / numerical_aperture;
                Some((0.1 * unit, 0.5 * unit))
            }
            _ => None,
        }
    }

    /// Evaluation points in sweep order; a single point without a sweep.
    pub fn points(&self) -> Result<Vec<(Option<f64>, Point)>, CliError> {
        match &self.sweep {
            None => Ok(vec![(None, self.point(&self.scenario, self.substrate.as_ref())?)]),
            Some(sweep) => {
                let name = sweep.parameter_name();
                let scoped_substrate = sweep.parameter.starts_with("substrate.");
                sweep
                    .values()
                    .into_iter()
                    .map(|v| {
                        let mut scenario = self.scenario.clone();
                        let mut substrate = self.substrate.clone();
                        let hit = (!scoped_substrate && scenario.set(name, v))
                            || substrate.as_mut().is_some_and(|s| s.set(name, v));
                        if !hit {
                            return Err(invalid(
                                "sweep.parameter",
                                format!(
                                    "\"{}\" is not a parameter of the {} scenario or its substrate",
                                    sweep.parameter,
                                    self.scenario.name()
                                ),
                            ));
                        }
                        Ok((Some(v), self.point(&scenario, substrate.as_ref())?))
                    })
                    .collect()
            }
        }
    }

    fn point(&self, scenario_config: &ScenarioConfig, substrate: Option<&SubstrateConfig>) -> Result<Point, CliError> {
        let scenario = scenario_config.build()?;
        let (povm, reference_povm) = match (substrate, &scenario) {
            (Some(s), _) => (s.build()?, s.reference().build()?),
            (None, Scenario::Lithography(spec)) => (
                lithography_absorber(spec).map_err(scenario_error)?,
                lithography_absorber(&LithographySpec {
                    efficiency: 1.0,
                    ..spec.clone()
                })
                .map_err(scenario_error)?,
            ),
            (None, _) => (ideal_counter(), ideal_counter()),
        };
        if matches!(scenario, Scenario::DoubleSlit(_)) && !matches!(substrate, None | Some(SubstrateConfig::Ideal)) {
            return Err(invalid(
                "substrate",
                "the double_slit scenario is an intensity model and only supports the ideal substrate",
            ));
        }
        Ok(Point {
            scenario_config: scenario_config.clone(),
            scenario,
            povm,
            reference_povm,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let n = &self.numerics;
        if !(n.floor_ratio >= 0.0 && n.floor_ratio < 1.0) {
            return Err(invalid("numerics.floor_ratio", format!("must lie in [0, 1), got {}", n.floor_ratio)));
        }
        if let Some(h) = n.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(invalid("numerics.step", format!("must be positive, got {h}")));
            }
        }
        if !(0.0..=1.0).contains(&n.background) {
            return Err(invalid("numerics.background", format!("must lie in [0, 1], got {}", n.background)));
        }
        if !(n.dark_level >= 0.0 && n.dark_level.is_finite()) {
            return Err(invalid("numerics.dark_level", format!("must be finite and >= 0, got {}", n.dark_level)));
        }
        if !(self.utility.cost_exponent > 0.0 && self.utility.cost_exponent.is_finite()) {
            return Err(invalid(
                "utility.cost_exponent",
                format!("must be positive, got {}", self.utility.cost_exponent),
            ));
        }
        if let Some(format) = &self.output.format {
            if format != "csv" {
                return Err(invalid("output.format", format!("only \"csv\" is supported, got \"{format}\"")));
            }
        }
        match (self.analysis, &self.sweep) {
            (Analysis::Sweep, None) => return Err(invalid("sweep", "required when analysis is \"sweep\"")),
            (Analysis::Sweep, Some(s)) => s.validate()?,
            (a, Some(_)) => {
                return Err(invalid(
                    "sweep",
                    format!("only used with analysis \"sweep\", not \"{}\"", a.name()),
                ))
            }
            (_, None) => {}
        }
        let points = self.points()?;
        let has_field = !matches!(self.scenario, ScenarioConfig::DoubleSlit { .. });
        if matches!(self.analysis, Analysis::Deposition | Analysis::Utility) && !has_field {
            return Err(invalid(
                "analysis",
                format!(
                    "\"{}\" needs a photon field; the double_slit scenario is an intensity model",
                    self.analysis.name()
                ),
            ));
        }
        if matches!(self.analysis, Analysis::Deposition | Analysis::Utility) {
            if points.iter().any(|(_, p)| p.povm.null_outcome().is_none()) {
                return Err(invalid("substrate", "has no null outcome, so the deposition rate is undefined"));
            }
            if self.utility.reading == Reading::Global && points.iter().any(|(_, p)| p.povm.is_bleeding()) {
                return Err(invalid("utility.reading", "the global reading needs a local (non-bleeding) substrate"));
            }
        }
        if self.analysis == Analysis::TwoPoint {
            let Some((lo, hi)) = self.two_point_bracket() else {
                return Err(invalid("two_point.bracket", "required for this scenario"));
            };
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(invalid("two_point.bracket", format!("need 0 < lo < hi, got [{lo}, {hi}]")));
            }
        } else if self.two_point.is_some() {
            return Err(invalid("two_point", "only used with analysis \"two_point\""));
        }
        Ok(())
    }

    /// Output path: `--out`, then `output.path`, then `<stem>.csv` in the
    /// directory named by `IMRES_OUTPUT_DIR` (or the working directory).
    pub fn output_path(&self, config_path: &Path, out: Option<&Path>, default_dir: Option<&Path>) -> PathBuf {
        if let Some(p) = out {
            return p.to_path_buf();
        }
        if let Some(p) = &self.output.path {
            return p.clone();
        }
        let stem = config_path.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "imres".into());
        let mut name = PathBuf::from(stem);
        name.set_extension("csv");
        match default_dir {
            Some(dir) => dir.join(name),
            None => name,
        }
    }
}
