//! Substrate measurement models diagonal in the photon-number basis.
//!
//! A POVM is described by outcome values `i_k` and conditional
//! probabilities `q_k(x|n⃗)`. Local POVMs depend only on the photon count
//! `n_x` of the pixel being read; a bleeding POVM reads the local detector
//! of a randomly displaced pixel `x'` and therefore depends on the full
//! configuration.

use crate::error::{Error, Result};
use crate::field::PhotonNumberDistribution;

/// Tolerance on `Σk q_k = 1` when checking user-supplied POVMs.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-9;

/// Per-pixel detector response.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalPovm {
    /// `q_k(n) = δ_{k,n}`, `i_k = k`.
    Ideal,
    /// Binary detector registering an event only when at least `order`
    /// photons are present: `q_0(n) = 1` for `n < M`, `(1 − η)^n` otherwise.
    MPhoton { order: usize, efficiency: f64 },
    /// Photon counter clipping at `level`.
    Saturating { level: usize },
    /// Arbitrary table: `rows[n][k] = q_k(n)`; photon numbers beyond the
    /// last row reuse the last row. Checked when used, not when built.
    Table { values: Vec<f64>, rows: Vec<Vec<f64>> },
}

impl LocalPovm {
    /// Builds a tabulated POVM. Only the shape is validated here.
    pub fn table(values: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() || rows.is_empty() {
            return Err(Error::InvalidPovm("table needs outcomes and at least one row".into()));
        }
        if let Some(n) = rows.iter().position(|r| r.len() != values.len()) {
            return Err(Error::InvalidPovm(format!(
                "row {n} has {} entries, expected {}",
                rows[n].len(),
                values.len()
            )));
        }
        Ok(LocalPovm::Table { values, rows })
    }

    /// Number of outcomes that can occur for photon numbers up to `max_photons`.
    pub fn outcome_count(&self, max_photons: usize) -> usize {
        match self {
            LocalPovm::Ideal => max_photons + 1,
            LocalPovm::MPhoton { .. } => 2,
            LocalPovm::Saturating { level } => level + 1,
            LocalPovm::Table { values, .. } => values.len(),
        }
    }

    pub fn outcome_value(&self, k: usize) -> f64 {
        match self {
            LocalPovm::Table { values, .. } => values.get(k).copied().unwrap_or(0.0),
            _ => k as f64,
        }
    }

    /// `q_k(n)`.
    pub fn conditional(&self, k: usize, n: usize) -> f64 {
        match self {
            LocalPovm::Ideal => f64::from(u8::from(k == n)),
            LocalPovm::MPhoton { order, efficiency } => {
                let q0 = if n < *order {
                    1.0
                } else {
                    (1.0 - efficiency).powi(n as i32)
                };
                match k {
                    0 => q0,
                    1 => 1.0 - q0,
                    _ => 0.0,
                }
            }
            LocalPovm::Saturating { level } => {
                let clipped = n.min(*level);
                f64::from(u8::from(k == clipped))
            }
            LocalPovm::Table { rows, .. } => {
                let row = &rows[n.min(rows.len() - 1)];
                row.get(k).copied().unwrap_or(0.0)
            }
        }
    }

    /// `Σk i_k q_k(n)`.
    pub fn expected_value(&self, n: usize) -> f64 {
        match self {
            LocalPovm::Ideal => n as f64,
            LocalPovm::MPhoton { .. } => self.conditional(1, n),
            LocalPovm::Saturating { level } => n.min(*level) as f64,
            LocalPovm::Table { values, .. } => values
                .iter()
                .enumerate()
                .map(|(k, v)| v * self.conditional(k, n))
                .sum(),
        }
    }

    pub fn has_null_outcome(&self) -> bool {
        self.outcome_value(0) == 0.0
    }

    /// Checks `q_k(n) ∈ [0, 1]` and completeness for one photon number.
    /// The built-in families satisfy both by construction.
    pub fn check(&self, n: usize) -> Result<()> {
        let LocalPovm::Table { values, .. } = self else {
            return Ok(());
        };
        let mut total = 0.0;
        for k in 0..values.len() {
            let q = self.conditional(k, n);
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidPovm(format!(
                    "q_{k}(n = {n}) = {q} lies outside [0, 1]"
                )));
            }
            total += q;
        }
        if (total - 1.0).abs() > COMPLETENESS_TOLERANCE {
            return Err(Error::InvalidPovm(format!(
                "completeness violated at n = {n}: Σk q_k = {total}"
            )));
        }
        Ok(())
    }
}

/// What happens to displacements that leave the substrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// Land on the nearest edge pixel.
    #[default]
    Clamp,
    /// Mirror about the substrate edge.
    Reflect,
    /// Drop them and renormalize over the in-grid displacements.
    Discard,
}

/// Distance distribution `Pr(d)` for `d = 0, 1, 2, …`, Poisson with mean `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementKernel {
    mean_distance: f64,
    distance_probs: Vec<f64>,
}

impl DisplacementKernel {
    pub fn poisson(mean_distance: f64) -> Result<Self> {
        if !(mean_distance >= 0.0 && mean_distance.is_finite()) {
            return Err(Error::param(
                "mean_distance",
                format!("must be finite and >= 0, got {mean_distance}"),
            ));
        }
        let d = PhotonNumberDistribution::poisson(mean_distance)?;
        let distance_probs = (0..=d.max_photons()).map(|k| d.prob(k)).collect();
        Ok(Self {
            mean_distance,
            distance_probs,
        })
    }

    pub fn mean_distance(&self) -> f64 {
        self.mean_distance
    }

    pub fn max_distance(&self) -> usize {
        self.distance_probs.len() - 1
    }

    pub fn distance_probability(&self, d: usize) -> f64 {
        self.distance_probs.get(d).copied().unwrap_or(0.0)
    }

    /// Signed displacement weights: `Pr(0)` at zero, `Pr(d)/2` at `±d`.
    pub fn signed_weight(&self, delta: i64) -> f64 {
        let p = self.distance_probability(delta.unsigned_abs() as usize);
        if delta == 0 {
            p
        } else {
            0.5 * p
        }
    }

    /// Source pixels `x'` read by pixel `x` on an `n`-pixel substrate,
    /// with their weights. Weights sum to one.
    pub fn sources(&self, x: usize, n: usize, policy: BoundaryPolicy) -> Vec<(usize, f64)> {
        let dmax = self.max_distance() as i64;
        // Every policy maps x + δ to a pixel within |δ| of x, so the
        // accumulator can be indexed by offset.
        let mut acc = vec![0.0; 2 * dmax as usize + 1];
        let mut kept = 0.0;
        for delta in -dmax..=dmax {
            let w = self.signed_weight(delta);
            if w == 0.0 {
                continue;
            }
            let target = x as i64 + delta;
            let mapped = match policy {
                BoundaryPolicy::Clamp => Some(target.clamp(0, n as i64 - 1)),
                BoundaryPolicy::Reflect => Some(reflect(target, n) as i64),
                BoundaryPolicy::Discard => (0..n as i64).contains(&target).then_some(target),
            };
            if let Some(src) = mapped {
                kept += w;
                acc[(src - x as i64 + dmax) as usize] += w;
            }
        }
        acc.into_iter()
            .enumerate()
            .filter(|(_, w)| *w > 0.0)
            .map(|(i, w)| ((x as i64 + i as i64 - dmax) as usize, w / kept))
            .collect()
    }
}

/// Half-sample mirror: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
fn reflect(i: i64, n: usize) -> usize {
    let n = n as i64;
    let period = 2 * n;
    let r = i.rem_euclid(period);
    (if r < n { r } else { period - 1 - r }) as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleedingPovm {
    pub(crate) base: Povm,
    pub(crate) kernel: DisplacementKernel,
    pub(crate) boundary: BoundaryPolicy,
}

impl BleedingPovm {
    pub fn base(&self) -> &Povm {
        &self.base
    }

    pub fn kernel(&self) -> &DisplacementKernel {
        &self.kernel
    }

    pub fn boundary(&self) -> BoundaryPolicy {
        self.boundary
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Povm {
    Local(LocalPovm),
    Bleeding(Box<BleedingPovm>),
}

impl Povm {
    /// The innermost per-pixel detector.
    pub fn local(&self) -> &LocalPovm {
        match self {
            Povm::Local(l) => l,
            Povm::Bleeding(b) => b.base.local(),
        }
    }

    pub fn outcome_value(&self, k: usize) -> f64 {
        self.local().outcome_value(k)
    }

    pub fn outcome_count(&self, max_photons: usize) -> usize {
        self.local().outcome_count(max_photons)
    }

    /// `Some(0)` when outcome `k = 0` carries `i_0 = 0` and means "nothing
    /// recorded".
    pub fn null_outcome(&self) -> Option<usize> {
        self.local().has_null_outcome().then_some(0)
    }

    /// `q_k(x|n⃗)` for a full configuration `config[x] = n_x`.
    pub fn conditional(&self, k: usize, x: usize, config: &[usize]) -> f64 {
        match self {
            Povm::Local(l) => l.conditional(k, config[x]),
            Povm::Bleeding(b) => b
                .kernel
                .sources(x, config.len(), b.boundary)
                .into_iter()
                .map(|(src, w)| w * b.base.conditional(k, src, config))
                .sum(),
        }
    }

    pub fn is_bleeding(&self) -> bool {
        matches!(self, Povm::Bleeding(_))
    }

    /// The same detector with any bleeding stripped away.
    pub fn without_bleeding(&self) -> Povm {
        Povm::Local(self.local().clone())
    }
}

impl From<LocalPovm> for Povm {
    fn from(l: LocalPovm) -> Self {
        Povm::Local(l)
    }
}
