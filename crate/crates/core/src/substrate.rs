//! Constructors for the substrate POVM families.

use crate::error::{Error, Result};
use crate::povm::{BleedingPovm, BoundaryPolicy, DisplacementKernel, LocalPovm, Povm};

/// Photon-number resolving detector: `Ê_k(x) = |k⟩⟨k|`, `i_k = k`.
pub fn ideal_counter() -> Povm {
    Povm::Local(LocalPovm::Ideal)
}

/// `M`-photon absorber with efficiency `η`; outcomes `{0, 1}`.
pub fn m_photon_absorber(m: usize, eta: f64) -> Result<Povm> {
    if m == 0 {
        return Err(Error::param("m", "photon order must be at least 1"));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param("eta", format!("efficiency must lie in [0, 1], got {eta}")));
    }
    Ok(Povm::Local(LocalPovm::MPhoton {
        order: m,
        efficiency: eta,
    }))
}

/// Photon counter that records `min(n_x, S)`.
pub fn saturating_counter(s: usize) -> Result<Povm> {
    if s == 0 {
        return Err(Error::param("s", "saturation level must be at least 1"));
    }
    Ok(Povm::Local(LocalPovm::Saturating { level: s }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BleedingSpec {
    pub mean_distance: f64,
    pub base_povm: Povm,
    pub boundary_policy: BoundaryPolicy,
}

impl BleedingSpec {
    pub fn new(mean_distance: f64, base_povm: Povm) -> Self {
        Self {
            mean_distance,
            base_povm,
            boundary_policy: BoundaryPolicy::default(),
        }
    }

    pub fn with_boundary(mut self, policy: BoundaryPolicy) -> Self {
        self.boundary_policy = policy;
        self
    }
}

/// Pixel `x` reports the base detector's outcome at `x'`, where
/// `|x' − x| ~ Poisson(b)` and the sign is chosen uniformly for `d > 0`.
pub fn bleeding_counter(spec: BleedingSpec) -> Result<Povm> {
    let kernel = DisplacementKernel::poisson(spec.mean_distance)?;
    Ok(Povm::Bleeding(Box::new(BleedingPovm {
        base: spec.base_povm,
        kernel,
        boundary: spec.boundary_policy,
    })))
}
