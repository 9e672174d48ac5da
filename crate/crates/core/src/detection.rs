//! Born-rule evaluation of a substrate POVM on a photon field.
//!
//! `p_k(x) = Σ_{n⃗} q_k(x|n⃗) P(n⃗)` and `I(x) = Σk i_k p_k(x)`. Local POVMs
//! only see the marginal of `n_x`, so the sum runs over that marginal
//! (which for cluster fields is obtained by enumerating cluster locations).
//! Bleeding POVMs are mixtures of the base detector over source pixels.

use crate::error::{Error, Result};
use crate::field::{PhotonFieldModel, PhotonNumberDistribution};
use crate::image::Image;
use crate::povm::{LocalPovm, Povm};

/// Probabilities `p_k(x)` of each outcome at one pixel, with the outcome
/// values `i_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// `p_k`, zero for outcomes that cannot occur.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σk i_k p_k`.
    pub fn expectation(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(i, p)| i * p).sum()
    }
}

fn check_on_support(povm: &LocalPovm, marginal: &PhotonNumberDistribution) -> Result<()> {
    if matches!(povm, LocalPovm::Table { .. }) {
        for (n, _) in marginal.iter() {
            povm.check(n)?;
        }
    }
    Ok(())
}

fn local_outcomes(povm: &LocalPovm, marginal: &PhotonNumberDistribution) -> Result<Vec<f64>> {
    check_on_support(povm, marginal)?;
    let count = povm.outcome_count(marginal.max_photons());
    let mut probs = vec![0.0; count];
    match povm {
        LocalPovm::Ideal => {
            for (n, p) in marginal.iter() {
                probs[n] += p;
            }
        }
        LocalPovm::Saturating { level } => {
            for (n, p) in marginal.iter() {
                probs[n.min(*level)] += p;
            }
        }
        _ => {
            for (n, p) in marginal.iter() {
                for (k, slot) in probs.iter_mut().enumerate() {
                    *slot += p * povm.conditional(k, n);
                }
            }
        }
    }
    Ok(probs)
}

fn outcome_probs(povm: &Povm, field: &PhotonFieldModel, x: usize) -> Result<Vec<f64>> {
    match povm {
        Povm::Local(local) => local_outcomes(local, &field.pixel_marginal(x)),
        Povm::Bleeding(b) => {
            let mut mixed: Vec<f64> = Vec::new();
            for (src, w) in b.kernel().sources(x, field.grid().n_pixels(), b.boundary()) {
                let base = outcome_probs(b.base(), field, src)?;
                if base.len() > mixed.len() {
                    mixed.resize(base.len(), 0.0);
                }
                for (slot, p) in mixed.iter_mut().zip(base) {
                    *slot += w * p;
                }
            }
            Ok(mixed)
        }
    }
}

/// `k ↦ p_k(x)` at pixel index `x`.
pub fn outcome_distribution(
    povm: &Povm,
    field: &PhotonFieldModel,
    x: usize,
) -> Result<OutcomeDistribution> {
    if x >= field.grid().n_pixels() {
        return Err(Error::param("x", format!("pixel {x} is off the grid")));
    }
    let probs = outcome_probs(povm, field, x)?;
    let values = (0..probs.len()).map(|k| povm.outcome_value(k)).collect();
    Ok(OutcomeDistribution { values, probs })
}

/// `I(x) = Σk i_k p_k(x)` for every pixel.
pub fn expected_image(field: &PhotonFieldModel, povm: &Povm) -> Result<Image> {
    let values = image_values(field, povm)?;
    Image::new(*field.grid(), values)
}

fn image_values(field: &PhotonFieldModel, povm: &Povm) -> Result<Vec<f64>> {
    let n = field.grid().n_pixels();
    match povm {
        Povm::Local(local) => (0..n)
            .map(|x| {
                let marginal = field.pixel_marginal(x);
                check_on_support(local, &marginal)?;
                Ok(marginal
                    .iter()
                    .map(|(photons, p)| p * local.expected_value(photons))
                    .sum())
            })
            .collect(),
        Povm::Bleeding(b) => {
            // The image observable is linear in the outcome values, so the
            // bled image is the base image averaged over source pixels.
            let base = image_values(field, b.base())?;
            Ok((0..n)
                .map(|x| {
                    b.kernel()
                        .sources(x, n, b.boundary())
                        .into_iter()
                        .map(|(src, w)| w * base[src])
                        .sum()
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PixelGrid;
    use crate::image::ProbabilityDistribution;
    use crate::povm::{BoundaryPolicy, DisplacementKernel, BleedingPovm};

    fn ideal() -> Povm {
        Povm::Local(LocalPovm::Ideal)
    }

    #[test]
    fn uniform_single_photon_cluster_under_ideal_counter() {
        let g = PixelGrid::unit(4).unwrap();
        let f = PhotonFieldModel::single_cluster(1, ProbabilityDistribution::uniform(g)).unwrap();
        let img = expected_image(&f, &ideal()).unwrap();
        assert_eq!(img.values(), &[0.25; 4]);
    }

    #[test]
    fn two_photon_cluster_under_two_photon_absorber() {
        let g = PixelGrid::unit(5).unwrap();
        let f = PhotonFieldModel::single_cluster(2, ProbabilityDistribution::delta(g, 2).unwrap())
            .unwrap();
        let povm = Povm::Local(LocalPovm::MPhoton { order: 2, efficiency: 0.5 });
        let img = expected_image(&f, &povm).unwrap();
        assert_eq!(img.values(), &[0.0, 0.0, 0.75, 0.0, 0.0]);
    }

    #[test]
    fn vacuum_gives_null_outcome_everywhere() {
        let f = PhotonFieldModel::vacuum(PixelGrid::unit(3).unwrap());
        for x in 0..3 {
            let d = outcome_distribution(&ideal(), &f, x).unwrap();
            assert_eq!(d.prob(0), 1.0);
        }
    }

    #[test]
    fn saturating_counter_clips() {
        let g = PixelGrid::unit(1).unwrap();
        let f = PhotonFieldModel::independent(g, vec![PhotonNumberDistribution::fock(5)]).unwrap();
        let povm = Povm::Local(LocalPovm::Saturating { level: 3 });
        let d = outcome_distribution(&povm, &f, 0).unwrap();
        assert_eq!(d.prob(3), 1.0);
        assert_eq!(d.probabilities().len(), 4);
    }

    #[test]
    fn single_photon_cluster_over_two_pixels() {
        // Enumerate both cluster locations: the photon is at x w.p. 1/2.
        let g = PixelGrid::unit(2).unwrap();
        let f = PhotonFieldModel::single_cluster(1, ProbabilityDistribution::uniform(g)).unwrap();
        for x in 0..2 {
            let d = outcome_distribution(&ideal(), &f, x).unwrap();
            assert_eq!(d.prob(0), 0.5);
            assert_eq!(d.prob(1), 0.5);
        }
    }

    #[test]
    fn poisson_pixels_under_ideal_counter_give_their_means() {
        let g = PixelGrid::unit(3).unwrap();
        let means = [0.5, 3.0, 12.25];
        let f = PhotonFieldModel::independent(
            g,
            means.iter().map(|m| PhotonNumberDistribution::poisson(*m).unwrap()).collect(),
        )
        .unwrap();
        let img = expected_image(&f, &ideal()).unwrap();
        for (v, m) in img.values().iter().zip(means) {
            assert!((v - m).abs() < 1e-11 * m);
        }
    }

    #[test]
    fn invalid_table_povm_is_reported() {
        let g = PixelGrid::unit(2).unwrap();
        let f = PhotonFieldModel::independent(
            g,
            vec![PhotonNumberDistribution::fock(1), PhotonNumberDistribution::fock(0)],
        )
        .unwrap();
        let out_of_range = Povm::Local(
            LocalPovm::table(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![-0.5, 1.5]]).unwrap(),
        );
        assert!(matches!(expected_image(&f, &out_of_range), Err(Error::InvalidPovm(_))));
        let incomplete = Povm::Local(
            LocalPovm::table(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![0.5, 0.49]]).unwrap(),
        );
        assert!(matches!(
            outcome_distribution(&incomplete, &f, 0),
            Err(Error::InvalidPovm(_))
        ));
        // Not on the support of pixel 1 (vacuum), so pixel 1 is fine.
        assert!(outcome_distribution(&incomplete, &f, 1).is_ok());
    }

    #[test]
    fn bleeding_outcomes_are_mixtures() {
        let g = PixelGrid::unit(3).unwrap();
        let f = PhotonFieldModel::independent(
            g,
            vec![
                PhotonNumberDistribution::fock(0),
                PhotonNumberDistribution::fock(4),
                PhotonNumberDistribution::fock(0),
            ],
        )
        .unwrap();
        let povm = Povm::Bleeding(Box::new(BleedingPovm {
            base: ideal(),
            kernel: DisplacementKernel::poisson(1.0).unwrap(),
            boundary: BoundaryPolicy::Clamp,
        }));
        let d = outcome_distribution(&povm, &f, 1).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!((d.prob(4) - (-1.0f64).exp()).abs() < 1e-12);
        let img = expected_image(&f, &povm).unwrap();
        assert!((img.values()[1] - d.expectation()).abs() < 1e-12);
    }
}
