//! Photon-number content of the light reaching the substrate.
//!
//! Only the Fock-diagonal part of `ρ(θ)` matters for substrates whose POVM
//! elements are diagonal in the photon-number basis, so a field is modelled
//! as a distribution over configurations `n⃗ = (n_1, …, n_N)`. Two kinds are
//! supported:
//!
//! * independent pixels, each carrying its own photon-number distribution
//!   (coherent light: a product of Poisson distributions);
//! * a single cluster of `M` photons that lands on one pixel drawn from a
//!   location distribution (lithography states). With probability
//!   `1 − coincidence` the photons are instead dispersed over `M` distinct,
//!   uniformly chosen pixels.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::grid::PixelGrid;
use crate::image::{ProbabilityDistribution, NORMALIZATION_TOLERANCE};

/// Maximum probability mass dropped when truncating a Poisson distribution.
pub const TAIL_MASS: f64 = 1e-12;

/// Distribution of a photon number `n` with finite support
/// `offset..offset + probs.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    offset: usize,
    probs: Vec<f64>,
}

impl PhotonNumberDistribution {
    /// `probs[i]` is the probability of `n = offset + i`.
    pub fn new(offset: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty photon-number support".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "photon-number probabilities must be non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "photon-number probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { offset, probs })
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Definite photon number `n`.
    pub fn fock(n: usize) -> Self {
        Self {
            offset: n,
            probs: vec![1.0],
        }
    }

    /// Poisson distribution with the given mean, truncated so that the
    /// dropped tail mass (both sides together) is below [`TAIL_MASS`], then
    /// renormalized.
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::param(
                "mean",
                format!("Poisson mean must be finite and >= 0, got {mean}"),
            ));
        }
        if mean == 0.0 {
            return Ok(Self::vacuum());
        }
        // Weights relative to the mode; the common factor cancels on
        // renormalization.
        let mode = mean.floor() as usize;
        let half_tail = 0.5 * TAIL_MASS;

        let mut upper = Vec::new();
        let mut w = 1.0;
        let mut sum = 1.0;
        let mut n = mode;
        loop {
            let ratio = mean / (n + 1) as f64;
            // Geometric bound on everything above n.
            let tail = if ratio < 1.0 {
                w * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            if n >= 1 && tail <= half_tail * sum {
                break;
            }
            w *= ratio;
            n += 1;
            sum += w;
            upper.push(w);
        }

        let mut lower = Vec::new();
        let mut w = 1.0;
        let mut n = mode;
        while n > 0 {
            let ratio = n as f64 / mean;
            let tail = if ratio < 1.0 {
                w * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            if tail <= half_tail * sum {
                break;
            }
            w *= ratio;
            n -= 1;
            sum += w;
            lower.push(w);
        }

        let offset = mode - lower.len();
        let probs: Vec<f64> = lower
            .into_iter()
            .rev()
            .chain(std::iter::once(1.0))
            .chain(upper)
            .map(|w| w / sum)
            .collect();
        Ok(Self { offset, probs })
    }

    pub fn min_photons(&self) -> usize {
        self.offset
    }

    pub fn max_photons(&self) -> usize {
        self.offset + self.probs.len() - 1
    }

    pub fn prob(&self, n: usize) -> f64 {
        n.checked_sub(self.offset)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// `(n, P(n))` over the support.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.offset + i, *p))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterField {
    cluster_size: usize,
    location: ProbabilityDistribution,
    coincidence: f64,
}

impl ClusterField {
    pub fn cluster_size(&self) -> usize {
        self.cluster_size
    }

    pub fn location(&self) -> &ProbabilityDistribution {
        &self.location
    }

    /// Probability that all `M` photons share one pixel.
    pub fn coincidence(&self) -> f64 {
        self.coincidence
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    IndependentPixels(Vec<PhotonNumberDistribution>),
    SingleCluster(ClusterField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonFieldModel {
    grid: PixelGrid,
    kind: FieldKind,
}

impl PhotonFieldModel {
    pub fn independent(grid: PixelGrid, pixels: Vec<PhotonNumberDistribution>) -> Result<Self> {
        if pixels.len() != grid.n_pixels() {
            return Err(Error::param(
                "per_pixel_distributions",
                format!(
                    "expected {} distributions, got {}",
                    grid.n_pixels(),
                    pixels.len()
                ),
            ));
        }
        Ok(Self {
            grid,
            kind: FieldKind::IndependentPixels(pixels),
        })
    }

    pub fn vacuum(grid: PixelGrid) -> Self {
        Self {
            grid,
            kind: FieldKind::IndependentPixels(vec![
                PhotonNumberDistribution::vacuum();
                grid.n_pixels()
            ]),
        }
    }

    /// `M` photons that always land together.
    pub fn single_cluster(cluster_size: usize, location: ProbabilityDistribution) -> Result<Self> {
        Self::single_cluster_with_coincidence(cluster_size, location, 1.0)
    }

    /// `M` photons that land together with probability `coincidence`, and
    /// otherwise occupy `M` distinct pixels chosen uniformly.
    pub fn single_cluster_with_coincidence(
        cluster_size: usize,
        location: ProbabilityDistribution,
        coincidence: f64,
    ) -> Result<Self> {
        if cluster_size == 0 {
            return Err(Error::param("cluster_size", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&coincidence) {
            return Err(Error::param(
                "coincidence",
                format!("must lie in [0, 1], got {coincidence}"),
            ));
        }
        let grid = *location.grid();
        if coincidence < 1.0 && cluster_size > grid.n_pixels() {
            return Err(Error::param(
                "cluster_size",
                format!(
                    "{cluster_size} dispersed photons need at least as many pixels, got {}",
                    grid.n_pixels()
                ),
            ));
        }
        Ok(Self {
            grid,
            kind: FieldKind::SingleCluster(ClusterField {
                cluster_size,
                location,
                coincidence,
            }),
        })
    }

    pub fn grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    /// Distribution of `n_x` at pixel index `x`.
    pub fn pixel_marginal(&self, x: usize) -> Cow<'_, PhotonNumberDistribution> {
        match &self.kind {
            FieldKind::IndependentPixels(pixels) => Cow::Borrowed(&pixels[x]),
            FieldKind::SingleCluster(c) => {
                let m = c.cluster_size;
                let together = c.coincidence * c.location.get(x);
                let dispersed = (1.0 - c.coincidence) * m as f64 / self.grid.n_pixels() as f64;
                let mut probs = vec![0.0; m + 1];
                probs[m] += together;
                probs[1] += dispersed;
                probs[0] = (1.0 - together - dispersed).max(0.0);
                Cow::Owned(PhotonNumberDistribution { offset: 0, probs })
            }
        }
    }

    pub fn mean_photon_number(&self, x: usize) -> f64 {
        self.pixel_marginal(x).mean()
    }
}
