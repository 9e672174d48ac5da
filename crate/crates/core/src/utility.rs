//! Deposition rate and the utility `U = F0·D^c`.

use crate::detection::outcome_distribution;
use crate::error::{Error, Result};
use crate::field::{FieldKind, PhotonFieldModel};
use crate::povm::Povm;

/// How the no-detection element enters the deposition rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepositionReading {
    /// `D = Σx Tr[ρ(𝟙 − Ê0(x))]`: expected number of pixels that register
    /// an event.
    #[default]
    PerPixel,
    /// `D = Σx Tr[ρ(𝟙 − ⊗y Ê0(y))]`, i.e. `N` times the probability that
    /// anything at all is recorded.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DepositionOptions {
    pub reading: DepositionReading,
    /// Divide by `N` so that `0 ≤ D ≤ 1`.
    pub normalize_by_pixels: bool,
}

impl DepositionOptions {
    pub fn normalized() -> Self {
        Self {
            normalize_by_pixels: true,
            ..Self::default()
        }
    }
}

pub fn deposition_rate(field: &PhotonFieldModel, povm: &Povm, options: &DepositionOptions) -> Result<f64> {
    let null = povm.null_outcome().ok_or(Error::NoNullOutcome)?;
    let n = field.grid().n_pixels();
    let raw = match options.reading {
        DepositionReading::PerPixel => match povm {
            // A bleeding pixel fires with the mixture of its sources' rates.
            Povm::Bleeding(b) => {
                let base = (0..n)
                    .map(|x| event_probability(&b.base, field, x, null))
                    .collect::<Result<Vec<_>>>()?;
                (0..n)
                    .map(|x| {
                        b.kernel
                            .sources(x, n, b.boundary)
                            .into_iter()
                            .map(|(src, w)| w * base[src])
                            .sum::<f64>()
                    })
                    .sum()
            }
            Povm::Local(_) => (0..n)
                .map(|x| event_probability(povm, field, x, null))
                .sum::<Result<f64>>()?,
        },
        DepositionReading::Global => n as f64 * (1.0 - nothing_recorded(field, povm, null)?),
    };
    let raw = raw.max(0.0);
    Ok(if options.normalize_by_pixels { raw / n as f64 } else { raw })
}

/// `Tr[ρ(𝟙 − Ê0(x))]` as `Σ_{k≠0} p_k` rather than `1 − p_0`: rates can be tiny.
fn event_probability(povm: &Povm, field: &PhotonFieldModel, x: usize, null: usize) -> Result<f64> {
    let d = outcome_distribution(povm, field, x)?;
    Ok(d.probabilities()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != null)
        .map(|(_, p)| p)
        .sum())
}

/// `Tr[ρ ⊗x Ê0(x)]`.
fn nothing_recorded(field: &PhotonFieldModel, povm: &Povm, null: usize) -> Result<f64> {
    let Povm::Local(local) = povm else {
        return Err(Error::Unsupported(
            "the global deposition reading is only available for local POVMs".into(),
        ));
    };
    let q0 = |photons: usize| local.conditional(null, photons);
    let n = field.grid().n_pixels();
    match field.kind() {
        FieldKind::IndependentPixels(_) => {
            let mut prod = 1.0;
            for x in 0..n {
                prod *= outcome_distribution(povm, field, x)?.prob(null);
            }
            Ok(prod)
        }
        FieldKind::SingleCluster(c) => {
            let m = c.cluster_size();
            let quiet = q0(0);
            let together = q0(m) * quiet.powi(n as i32 - 1);
            let dispersed = q0(1).powi(m as i32) * quiet.powi((n - m.min(n)) as i32);
            Ok(c.coincidence() * together + (1.0 - c.coincidence()) * dispersed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityReport {
    pub fisher_zero: f64,
    pub deposition: f64,
    pub cost_exponent: f64,
    pub utility: f64,
}

impl UtilityReport {
    pub fn new(fisher_zero: f64, deposition: f64, cost_exponent: f64) -> Result<Self> {
        Ok(Self {
            fisher_zero,
            deposition,
            cost_exponent,
            utility: utility(fisher_zero, deposition, cost_exponent)?,
        })
    }
}

/// `U = F0·D^c`.
pub fn utility(fisher_zero: f64, deposition: f64, cost_exponent: f64) -> Result<f64> {
    if !(cost_exponent > 0.0 && cost_exponent.is_finite()) {
        return Err(Error::param(
            "cost_exponent",
            format!("must be positive, got {cost_exponent}"),
        ));
    }
    if !(fisher_zero >= 0.0 && fisher_zero.is_finite()) {
        return Err(Error::param("fisher_zero", format!("must be >= 0, got {fisher_zero}")));
    }
    if !(deposition >= 0.0 && deposition.is_finite()) {
        return Err(Error::param("deposition", format!("must be >= 0, got {deposition}")));
    }
    Ok(fisher_zero * deposition.powf(cost_exponent))
}
