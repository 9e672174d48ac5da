//! Fisher information of parametrized images and the resolution bounds
//! derived from it.
//!
//! Two routes are provided. The distribution route works on the normalized
//! family `Pr(x|θ)`:
//!
//! ```text
//! F(θ) = Σx (∂θ Pr(x|θ))² / Pr(x|θ)
//! ```
//!
//! The image route works on the unnormalized image `I(x|θ)` and keeps the
//! normalization term, which matters whenever `I0` depends on `θ`:
//!
//! ```text
//! F(θ) = Σx (∂θ I(x))² / (I0·I(x)) − (∂θ I0)² / I0²
//! ```
//!
//! Both accept analytic derivatives or compute central differences, with
//! a step-halving check on the latter.

use crate::error::{Error, Result};
use crate::image::{check_background, Image, ProbabilityDistribution};

/// Default `ε/max(Pr)`.
pub const DEFAULT_FLOOR_RATIO: f64 = 1e-12;
/// Default relative step for central differences, `h = 1e-5·max(1, |θ|)`.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-5;
/// Maximum relative change of `F` when the step is halved.
pub const DEFAULT_STEP_TOLERANCE: f64 = 1e-6;
/// Relative bracket width at which the two-point bisection stops.
pub const TWO_POINT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMethod {
    AnalyticDerivative,
    CentralDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherOptions {
    /// Probabilities below `floor_ratio·max(Pr)` are floored there.
    pub floor_ratio: f64,
    /// Central-difference step; `None` picks `1e-5·max(1, |θ|)`.
    pub step: Option<f64>,
    /// Uniform mixing weight `β`: `Pr ← (1 − β)Pr + β/N`.
    pub background: f64,
    /// Intensity added to every pixel of a recorded image before
    /// normalization. Only meaningful on the image route.
    pub dark_level: f64,
    pub check_step: bool,
    pub step_tolerance: f64,
}

impl Default for FisherOptions {
    fn default() -> Self {
        Self {
            floor_ratio: DEFAULT_FLOOR_RATIO,
            step: None,
            background: 0.0,
            dark_level: 0.0,
            check_step: true,
            step_tolerance: DEFAULT_STEP_TOLERANCE,
        }
    }
}

impl FisherOptions {
    pub fn step_for(&self, theta: f64) -> f64 {
        self.step
            .unwrap_or(DEFAULT_RELATIVE_STEP * theta.abs().max(1.0))
    }

    fn validate(&self) -> Result<()> {
        if !(self.floor_ratio >= 0.0 && self.floor_ratio < 1.0) {
            return Err(Error::param(
                "floor",
                format!("floor ratio must lie in [0, 1), got {}", self.floor_ratio),
            ));
        }
        if let Some(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::param("step", format!("must be positive, got {h}")));
            }
        }
        check_background(self.background)?;
        if !(self.dark_level >= 0.0 && self.dark_level.is_finite()) {
            return Err(Error::param(
                "dark_level",
                format!("must be finite and >= 0, got {}", self.dark_level),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FisherReport {
    pub theta: f64,
    pub fisher: f64,
    /// `1/√F`, infinite when `F = 0`.
    pub resolution: f64,
    pub method: DerivativeMethod,
    pub step: Option<f64>,
    /// Floor `ε` applied to `Pr(x)`.
    pub floor: f64,
    /// Relative change of `F` when the step was halved, if checked.
    pub step_change: Option<f64>,
    /// `(∂θ I0)²/I0²`, already subtracted from `fisher` (image route only).
    pub normalization_term: f64,
}

impl FisherReport {
    fn new(theta: f64, fisher: f64, floor: f64, normalization_term: f64) -> Self {
        let fisher = fisher.max(0.0);
        Self {
            theta,
            fisher,
            resolution: if fisher > 0.0 { 1.0 / fisher.sqrt() } else { f64::INFINITY },
            method: DerivativeMethod::AnalyticDerivative,
            step: None,
            floor,
            step_change: None,
            normalization_term,
        }
    }

    /// `F` without the normalization term.
    pub fn naive_fisher(&self) -> f64 {
        self.fisher + self.normalization_term
    }
}

/// `ds² = Σx (p1(x) − p0(x))² / max(p0(x), ε)` with `ε = floor_ratio·max(p0)`.
pub fn statistical_distance_increment(
    p0: &ProbabilityDistribution,
    p1: &ProbabilityDistribution,
    floor_ratio: f64,
) -> Result<f64> {
    p0.grid().ensure_same(p1.grid())?;
    let eps = floor_ratio * p0.max_probability();
    Ok(p0
        .probabilities()
        .iter()
        .zip(p1.probabilities())
        .map(|(a, b)| (b - a).powi(2) / a.max(eps))
        .filter(|t| t.is_finite())
        .sum())
}

/// Distribution route with a supplied derivative `∂θ Pr(x|θ)`.
pub fn fisher_from_distribution(
    distribution: &ProbabilityDistribution,
    derivative: &[f64],
    theta: f64,
    options: &FisherOptions,
) -> Result<FisherReport> {
    options.validate()?;
    if options.dark_level != 0.0 {
        return Err(Error::param(
            "dark_level",
            "an absolute dark level needs an unnormalized image; use the image route",
        ));
    }
    if derivative.len() != distribution.grid().n_pixels() {
        return Err(Error::param(
            "derivative",
            format!(
                "expected {} entries, got {}",
                distribution.grid().n_pixels(),
                derivative.len()
            ),
        ));
    }
    let mixed = distribution.with_background(options.background)?;
    let (floored, eps) = mixed.floored(options.floor_ratio);
    let beta = options.background;
    let fisher = floored
        .probabilities()
        .iter()
        .zip(derivative)
        .map(|(p, d)| ((1.0 - beta) * d).powi(2) / p)
        .filter(|t| t.is_finite())
        .sum();
    Ok(FisherReport::new(theta, fisher, eps, 0.0))
}

fn central_difference<T, F>(family: &F, theta: f64, h: f64, values: fn(&T) -> &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<T>,
{
    let hi = family(theta + h)?;
    let lo = family(theta - h)?;
    Ok(values(&hi)
        .iter()
        .zip(values(&lo))
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect())
}

fn checked_step<F>(theta: f64, options: &FisherOptions, mut at_step: F) -> Result<FisherReport>
where
    F: FnMut(f64) -> Result<FisherReport>,
{
    let h = options.step_for(theta);
    let mut report = at_step(h)?;
    report.method = DerivativeMethod::CentralDifference;
    report.step = Some(h);
    if options.check_step {
        let half = at_step(0.5 * h)?;
        let change = if report.fisher == half.fisher {
            0.0
        } else {
            (report.fisher - half.fisher).abs() / report.fisher.abs().max(half.fisher.abs())
        };
        report.step_change = Some(change);
        if change > options.step_tolerance {
            return Err(Error::StepNotConverged {
                step: h,
                relative_change: change,
            });
        }
    }
    Ok(report)
}

/// Distribution route with a central-difference derivative of `family`.
pub fn fisher_from_distribution_family<F>(family: F, theta: f64, options: &FisherOptions) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<ProbabilityDistribution>,
{
    options.validate()?;
    let p = family(theta)?;
    checked_step(theta, options, |h| {
        let d = central_difference(&family, theta, h, |p: &ProbabilityDistribution| p.probabilities())?;
        fisher_from_distribution(&p, &d, theta, options)
    })
}

/// Image route with a supplied derivative `∂θ I(x|θ)`.
pub fn fisher_from_image_derivative(
    image: &Image,
    derivative: &[f64],
    theta: f64,
    options: &FisherOptions,
) -> Result<FisherReport> {
    options.validate()?;
    let n = image.grid().n_pixels();
    if derivative.len() != n {
        return Err(Error::param(
            "derivative",
            format!("expected {n} entries, got {}", derivative.len()),
        ));
    }
    let raw_total = image.normalization();
    if raw_total <= 0.0 {
        return Err(Error::DegenerateImage);
    }
    // (1 − β)I + β·I0/N + ν keeps I0 for ν = 0 and reproduces the mixed
    // distribution after normalization.
    let beta = options.background;
    let nu = options.dark_level;
    let raw_slope: f64 = derivative.iter().sum();
    let uniform = beta * raw_total / n as f64 + nu;
    let uniform_slope = beta * raw_slope / n as f64;
    let values: Vec<f64> = image.values().iter().map(|v| (1.0 - beta) * v + uniform).collect();
    let slopes: Vec<f64> = derivative.iter().map(|d| (1.0 - beta) * d + uniform_slope).collect();

    let total = raw_total + n as f64 * nu;
    let slope_total = raw_slope;
    let max = values.iter().copied().fold(0.0, f64::max);
    let floor = options.floor_ratio * max;

    let first: f64 = values
        .iter()
        .zip(&slopes)
        .map(|(v, d)| d * d / (total * v.max(floor)))
        .filter(|t| t.is_finite())
        .sum();
    let normalization_term = (slope_total / total).powi(2);
    Ok(FisherReport::new(
        theta,
        first - normalization_term,
        floor / total,
        normalization_term,
    ))
}

/// Image route with a central-difference derivative of `family`.
pub fn fisher_from_images<F>(family: F, theta: f64, options: &FisherOptions) -> Result<FisherReport>
where
    F: Fn(f64) -> Result<Image>,
{
    options.validate()?;
    let image = family(theta)?;
    checked_step(theta, options, |h| {
        let d = central_difference(&family, theta, h, |i: &Image| i.values())?;
        fisher_from_image_derivative(&image, &d, theta, options)
    })
}

/// `δθ_min = 1/√F`.
pub fn cramer_rao_resolution(fisher: f64) -> Result<f64> {
    if fisher > 0.0 && fisher.is_finite() {
        Ok(1.0 / fisher.sqrt())
    } else {
        Err(Error::NotIdentifiable)
    }
}

/// Smallest `θ` with `θ²F(θ) ≥ 1`, found by bisection of
/// `g(θ) = θ²F(θ) − 1` on `bracket`.
pub fn two_point_resolution<F>(mut fisher_curve: F, bracket: (f64, f64)) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param("bracket", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let mut g = |t: f64| -> Result<f64> { Ok(t * t * fisher_curve(t)? - 1.0) };
    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let lo_negative = g_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= TWO_POINT_TOLERANCE * mid.abs().max(f64::MIN_POSITIVE) {
            return Ok(mid);
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if (g_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `4(ΔK)²` in units with `ħ = 1`.
pub fn generator_bound(generator_variance: f64) -> Result<f64> {
    if generator_variance >= 0.0 && generator_variance.is_finite() {
        Ok(4.0 * generator_variance)
    } else {
        Err(Error::param(
            "generator_variance",
            format!("must be finite and >= 0, got {generator_variance}"),
        ))
    }
}

/// Variance of a generator with eigenvalues `k` populated with
/// probabilities `p`, given as `(k, p)` pairs.
pub fn generator_variance(spectrum: &[(f64, f64)]) -> Result<f64> {
    let total: f64 = spectrum.iter().map(|(_, p)| p).sum();
    if spectrum.iter().any(|(_, p)| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDistribution(
            "generator populations must be non-negative and sum to 1".into(),
        ));
    }
    let mean: f64 = spectrum.iter().map(|(k, p)| k * p).sum();
    Ok(spectrum.iter().map(|(k, p)| p * (k - mean).powi(2)).sum())
}

/// `(ΔK)²` for `(|M,0⟩ + e^{iMθ}|0,M⟩)/√2`: the phase is generated by the
/// photon number in one arm, with eigenvalues `0` and `M`.
pub fn noon_generator_variance(photon_order: usize) -> f64 {
    let m = photon_order as f64;
    generator_variance(&[(0.0, 0.5), (m, 0.5)]).expect("balanced two-level spectrum")
}
