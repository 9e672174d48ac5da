//! Recorded images and the probability distributions they normalize to.

use crate::error::{Error, Result};
use crate::grid::PixelGrid;

/// Absolute tolerance on `Σx Pr(x) = 1`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Expected intensity `I(x)` per pixel. The normalization `I0 = Σx I(x)`
/// is always recomputed from the values.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    grid: PixelGrid,
    values: Vec<f64>,
}

impl Image {
    pub fn new(grid: PixelGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_pixels() {
            return Err(Error::param(
                "values",
                format!(
                    "expected {} pixel values, got {}",
                    grid.n_pixels(),
                    values.len()
                ),
            ));
        }
        if let Some((j, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::param(
                "values",
                format!("pixel {j} has invalid intensity {v}"),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `I0 = Σx I(x)`.
    pub fn normalization(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::param("factor", format!("must be >= 0, got {factor}")));
        }
        Self::new(self.grid, self.values.iter().map(|v| v * factor).collect())
    }
}

/// `Pr(x|θ)` over the pixels of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    grid: PixelGrid,
    probabilities: Vec<f64>,
}

impl ProbabilityDistribution {
    pub fn new(grid: PixelGrid, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != grid.n_pixels() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} entries, got {}",
                grid.n_pixels(),
                probabilities.len()
            )));
        }
        if let Some((j, p)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {j} is {p}; probabilities must be non-negative"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        Ok(Self {
            grid,
            probabilities,
        })
    }

    /// Normalizes non-negative weights by their sum.
    pub fn from_weights(grid: PixelGrid, weights: Vec<f64>) -> Result<Self> {
        normalize(&Image::new(grid, weights)?)
    }

    pub fn uniform(grid: PixelGrid) -> Self {
        let n = grid.n_pixels();
        Self {
            grid,
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on pixel index `j`.
    pub fn delta(grid: PixelGrid, j: usize) -> Result<Self> {
        if j >= grid.n_pixels() {
            return Err(Error::param("index", format!("pixel {j} is off the grid")));
        }
        let mut probabilities = vec![0.0; grid.n_pixels()];
        probabilities[j] = 1.0;
        Ok(Self {
            grid,
            probabilities,
        })
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, j: usize) -> f64 {
        self.probabilities[j]
    }

    pub fn max_probability(&self) -> f64 {
        self.probabilities.iter().copied().fold(0.0, f64::max)
    }

    /// `Σx x·Pr(x)` in pixel coordinates.
    pub fn mean_coordinate(&self) -> f64 {
        self.probabilities
            .iter()
            .zip(self.grid.coordinates())
            .map(|(p, x)| p * x)
            .sum()
    }

    /// Faint-image model: `(1 − β)·Pr + β/N`.
    pub fn with_background(&self, beta: f64) -> Result<Self> {
        check_background(beta)?;
        let uniform = beta / self.grid.n_pixels() as f64;
        Ok(Self {
            grid: self.grid,
            probabilities: self
                .probabilities
                .iter()
                .map(|p| (1.0 - beta) * p + uniform)
                .collect(),
        })
    }

    /// Floors entries below `ε = floor_ratio·max(Pr)` at `ε` and
    /// renormalizes. Returns the floored distribution and `ε`.
    pub fn floored(&self, floor_ratio: f64) -> (Self, f64) {
        let eps = floor_ratio * self.max_probability();
        let raw: Vec<f64> = self.probabilities.iter().map(|p| p.max(eps)).collect();
        let total: f64 = raw.iter().sum();
        (
            Self {
                grid: self.grid,
                probabilities: raw.into_iter().map(|p| p / total).collect(),
            },
            eps,
        )
    }
}

pub(crate) fn check_background(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::param(
            "background",
            format!("weight must lie in [0, 1], got {beta}"),
        ))
    }
}

/// `Pr(x) = I(x)/I0`.
pub fn normalize(image: &Image) -> Result<ProbabilityDistribution> {
    let total = image.normalization();
    if total <= 0.0 {
        return Err(Error::DegenerateImage);
    }
    Ok(ProbabilityDistribution {
        grid: image.grid,
        probabilities: image.values.iter().map(|v| v / total).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> PixelGrid {
        PixelGrid::unit(n).unwrap()
    }

    #[test]
    fn uniform_image_normalizes_to_quarters() {
        let img = Image::new(grid(4), vec![1.0; 4]).unwrap();
        assert_eq!(normalize(&img).unwrap().probabilities(), &[0.25; 4]);
    }

    #[test]
    fn delta_image() {
        let img = Image::new(grid(3), vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(normalize(&img).unwrap().probabilities(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_image_is_degenerate() {
        let img = Image::new(grid(3), vec![0.0; 3]).unwrap();
        let err = normalize(&img).unwrap_err();
        assert_eq!(err, Error::DegenerateImage);
        assert_eq!(err.to_string(), "degenerate image: zero total intensity");
    }

    #[test]
    fn classical_lithography_pattern_normalizes() {
        // Direct evaluation of cos²(κℓx) on N = 100 pixels.
        let kl = 0.1;
        let vals: Vec<f64> = (0..100).map(|x| (kl * x as f64).cos().powi(2)).collect();
        let total: f64 = vals.iter().sum();
        let p = normalize(&Image::new(grid(100), vals.clone()).unwrap()).unwrap();
        let s: f64 = p.probabilities().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(p.get(0), p.max_probability());
        assert!((p.get(0) - 1.0 / total).abs() < 1e-15);
        // cos² peaks again at x ≈ π/κℓ ≈ 31.4
        assert!(p.get(31) > p.get(30) && p.get(31) > p.get(33));
    }

    #[test]
    fn rejects_negative_and_mis_sized_values() {
        assert!(Image::new(grid(2), vec![1.0, -0.1]).is_err());
        assert!(Image::new(grid(2), vec![1.0]).is_err());
        assert!(ProbabilityDistribution::new(grid(2), vec![0.5, 0.6]).is_err());
        assert!(ProbabilityDistribution::new(grid(2), vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn floor_and_background() {
        let p = ProbabilityDistribution::new(grid(3), vec![0.0, 1.0, 0.0]).unwrap();
        let (f, eps) = p.floored(1e-12);
        assert_eq!(eps, 1e-12);
        assert!(f.get(0) > 0.0);
        assert!((f.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-15);

        let b = p.with_background(0.3).unwrap();
        assert!((b.get(0) - 0.1).abs() < 1e-15);
        assert!((b.get(1) - 0.8).abs() < 1e-15);
        assert!(p.with_background(1.5).is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_scale_invariant(
            vals in proptest::collection::vec(0.0f64..10.0, 1..40),
            c in 1e-3f64..1e3,
        ) {
            prop_assume!(vals.iter().sum::<f64>() > 1e-6);
            let g = grid(vals.len());
            let img = Image::new(g, vals).unwrap();
            let a = normalize(&img).unwrap();
            let b = normalize(&img.scaled(c).unwrap()).unwrap();
            let total: f64 = a.probabilities().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
