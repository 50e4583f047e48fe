use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::Dataset;
use crate::error::{invalid_param, Result};

/// Ground-truth role of a generated column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureRole {
    Informative,
    Combination,
    Probe,
}

impl FeatureRole {
    /// Informative columns and their linear combinations both carry signal.
    pub fn is_relevant(self) -> bool {
        !matches!(self, FeatureRole::Probe)
    }
}

/// Parameters of the MADELON-style generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MadelonConfig {
    pub samples: usize,
    pub informative: usize,
    pub combinations: usize,
    pub probes: usize,
    /// Number of Gaussian clusters, each on a distinct hypercube vertex when
    /// possible. `None` uses every vertex, `2^informative`.
    pub clusters: Option<usize>,
    /// Standard deviation of each cluster around its vertex.
    pub noise_scale: f64,
    pub seed: u64,
}

impl MadelonConfig {
    /// 200 samples, 5 informative, 5 combinations, 20 probes.
    pub fn desk(seed: u64) -> Self {
        Self {
            samples: 200,
            informative: 5,
            combinations: 5,
            probes: 20,
            clusters: None,
            noise_scale: 0.5,
            seed,
        }
    }

    /// 2000 samples, 5 informative, 15 combinations, 480 probes.
    pub fn paper(seed: u64) -> Self {
        Self {
            samples: 2000,
            informative: 5,
            combinations: 15,
            probes: 480,
            clusters: None,
            noise_scale: 0.5,
            seed,
        }
    }

    pub fn features(&self) -> usize {
        self.informative + self.combinations + self.probes
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub roles: Vec<FeatureRole>,
}

/// Two-class data in the style of MADELON: Gaussian clusters on the vertices
/// of a `±1` hypercube, randomly labeled half `+1` half `−1`, plus random
/// linear combinations of the informative columns and pure-noise probes.
/// Column order is shuffled; `roles` records the truth.
pub fn generate_madelon_like(config: &MadelonConfig) -> Result<SyntheticData> {
    let MadelonConfig {
        samples: n,
        informative,
        combinations,
        probes,
        noise_scale,
        seed,
        ..
    } = *config;
    if n < 2 {
        return Err(invalid_param(format!("need at least 2 samples, got {n}")));
    }
    if informative == 0 && combinations > 0 {
        return Err(invalid_param(
            "combinations need at least one informative feature",
        ));
    }
    if config.features() == 0 {
        return Err(invalid_param("the generator needs at least one feature"));
    }
    if informative > 30 {
        return Err(invalid_param(format!(
            "at most 30 informative features, got {informative}"
        )));
    }
    if !(noise_scale >= 0.0) || !noise_scale.is_finite() {
        return Err(invalid_param(format!(
            "noise scale must be nonnegative, got {noise_scale}"
        )));
    }
    let vertices = 1usize << informative;
    let clusters = config.clusters.unwrap_or(vertices);
    if clusters < 2 {
        return Err(invalid_param(format!(
            "need at least 2 clusters, got {clusters}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertex_ids: Vec<usize> = (0..vertices).collect();
    vertex_ids.shuffle(&mut rng);
    let centers: Vec<usize> = (0..clusters).map(|c| vertex_ids[c % vertices]).collect();
    let mut cluster_labels: Vec<usize> = (0..clusters)
        .map(|c| usize::from(c >= clusters / 2))
        .collect();
    cluster_labels.shuffle(&mut rng);
    let mut assignment: Vec<usize> = (0..n).map(|i| i % clusters).collect();
    assignment.shuffle(&mut rng);

    let d = config.features();
    let mut raw = Array2::<f64>::zeros((n, d));
    for (i, &c) in assignment.iter().enumerate() {
        for j in 0..informative {
            let coord = if centers[c] >> j & 1 == 1 { 1.0 } else { -1.0 };
            let z: f64 = StandardNormal.sample(&mut rng);
            raw[[i, j]] = coord + noise_scale * z;
        }
    }
    for m in 0..combinations {
        let coefficients: Vec<f64> = (0..informative)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        for i in 0..n {
            raw[[i, informative + m]] = (0..informative)
                .map(|j| coefficients[j] * raw[[i, j]])
                .sum();
        }
    }
    for p in 0..probes {
        for i in 0..n {
            raw[[i, informative + combinations + p]] = StandardNormal.sample(&mut rng);
        }
    }

    let base_roles: Vec<FeatureRole> = std::iter::repeat(FeatureRole::Informative)
        .take(informative)
        .chain(std::iter::repeat(FeatureRole::Combination).take(combinations))
        .chain(std::iter::repeat(FeatureRole::Probe).take(probes))
        .collect();
    let mut permutation: Vec<usize> = (0..d).collect();
    permutation.shuffle(&mut rng);
    let features = raw.select(ndarray::Axis(1), &permutation);
    let roles = permutation.iter().map(|&p| base_roles[p]).collect();

    let labels = assignment.iter().map(|&c| cluster_labels[c]).collect();
    let names = (0..d).map(|j| format!("f{j}")).collect();
    let dataset = Dataset::new("madelon-like", features, labels, names, vec![true; d])?
        .with_class_names(vec!["-1".into(), "1".into()])?;
    Ok(SyntheticData { dataset, roles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_shape() {
        let data = generate_madelon_like(&MadelonConfig::paper(0)).unwrap();
        assert_eq!(data.dataset.n_samples(), 2000);
        assert_eq!(data.dataset.n_features(), 500);
        assert_eq!(
            data.roles
                .iter()
                .filter(|r| **r == FeatureRole::Informative)
                .count(),
            5
        );
        assert_eq!(
            data.roles
                .iter()
                .filter(|r| **r == FeatureRole::Combination)
                .count(),
            15
        );
    }

    #[test]
    fn no_distractors_means_all_informative() {
        let config = MadelonConfig {
            combinations: 0,
            probes: 0,
            ..MadelonConfig::desk(3)
        };
        let data = generate_madelon_like(&config).unwrap();
        assert!(data.roles.iter().all(|r| *r == FeatureRole::Informative));
    }

    #[test]
    fn desk_preset_is_reproducible() {
        let a = generate_madelon_like(&MadelonConfig::desk(11)).unwrap();
        let b = generate_madelon_like(&MadelonConfig::desk(11)).unwrap();
        assert_eq!(a.roles, b.roles);
        assert_eq!(a.dataset, b.dataset);
        let c = generate_madelon_like(&MadelonConfig::desk(12)).unwrap();
        assert_ne!(a.dataset.features(), c.dataset.features());
    }

    #[test]
    fn labels_are_roughly_balanced() {
        let data = generate_madelon_like(&MadelonConfig::desk(5)).unwrap();
        let ones = data.dataset.labels().iter().filter(|&&y| y == 1).count();
        assert!((60..=140).contains(&ones), "{ones}");
        assert_eq!(data.dataset.n_classes(), 2);
    }

    #[test]
    fn combination_columns_are_exact_linear_maps() {
        let config = MadelonConfig {
            probes: 0,
            combinations: 2,
            ..MadelonConfig::desk(8)
        };
        let data = generate_madelon_like(&config).unwrap();
        let x = data.dataset.features();
        let inf: Vec<usize> = (0..x.ncols())
            .filter(|&j| data.roles[j] == FeatureRole::Informative)
            .collect();
        let comb = data
            .roles
            .iter()
            .position(|r| *r == FeatureRole::Combination)
            .unwrap();
        // Least squares of the combination on the informative block leaves no residual.
        let a = nalgebra::DMatrix::from_fn(x.nrows(), inf.len(), |i, j| x[[i, inf[j]]]);
        let b = nalgebra::DVector::from_fn(x.nrows(), |i, _| x[[i, comb]]);
        let coef = a.clone().svd(true, true).solve(&b, 1e-12).unwrap();
        assert!((a * coef - b).amax() < 1e-9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_madelon_like(&MadelonConfig {
            samples: 1,
            ..MadelonConfig::desk(0)
        })
        .is_err());
        assert!(generate_madelon_like(&MadelonConfig {
            noise_scale: -1.0,
            ..MadelonConfig::desk(0)
        })
        .is_err());
        assert!(generate_madelon_like(&MadelonConfig {
            informative: 0,
            ..MadelonConfig::desk(0)
        })
        .is_err());
    }
}
