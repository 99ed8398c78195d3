//! Quasi-processes: step paths rebuilt from uniformly permuted increments of
//! one observed path.
//!
//! Permutations are stored 0-based. Permutation `i` of a set is drawn from its
//! own random stream `(seed, i)`, so a set can be materialized up front or
//! regenerated one member at a time with identical results.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{IncrementSeries, StepPath};
use crate::rng;

/// A bijection of `{0, .., n-1}`; entry `k` is the index of the increment used
/// as the `k`-th step of the quasi-path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Builds a permutation from 0-based indices, checking bijectivity.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let perm = Self(mapping);
        if !perm.is_bijection() {
            return Err(Error::Validation(format!(
                "{:?} is not a permutation of 0..{}",
                perm.0,
                perm.0.len()
            )));
        }
        Ok(perm)
    }

    /// Builds a permutation from 1-based indices `{1, .., n}`.
    pub fn from_one_based(mapping: &[usize]) -> Result<Self> {
        if mapping.contains(&0) {
            return Err(Error::Validation("1-based permutation contains 0".into()));
        }
        Self::new(mapping.iter().map(|&i| i - 1).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_bijection(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &i in &self.0 {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }
}

/// Uniform random permutation of `{0, .., n-1}` by Fisher-Yates.
///
/// `random_range` draws unbiased bounded integers, so each of the `n!`
/// outcomes has probability exactly `1 / n!`.
pub fn sample_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut mapping: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        mapping.swap(i, j);
    }
    debug_assert!(Permutation(mapping.clone()).is_bijection());
    Permutation(mapping)
}

/// Member `index` of the permutation set with the given seed.
pub fn permutation_at(n: usize, seed: u64, index: usize) -> Permutation {
    let mut rng = rng::stream(seed, rng::tag::PERMUTATIONS, index as u64);
    sample_permutation(n, &mut rng)
}

/// Warning text when `n / alpha >= 1`, i.e. the ensemble is small relative to
/// the number of increments.
pub fn ensemble_size_warning(n: usize, alpha: usize) -> Option<String> {
    (n >= alpha).then(|| {
        format!(
            "ensemble size alpha = {alpha} is not large relative to n = {n} (n / alpha = {:.3})",
            n as f64 / alpha as f64
        )
    })
}

/// `alpha` i.i.d. uniform permutations (drawn with replacement).
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSet {
    perms: Vec<Permutation>,
    seed: u64,
    warning: Option<String>,
}

impl PermutationSet {
    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

pub fn sample_permutation_set(n: usize, alpha: usize, seed: u64) -> PermutationSet {
    let warning = ensemble_size_warning(n, alpha);
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    let perms = (0..alpha).map(|i| permutation_at(n, seed, i)).collect();
    PermutationSet {
        perms,
        seed,
        warning,
    }
}

/// `values[k] = u0 + sum_{j < k} deltas[perm[j]]`.
pub fn build_quasi_path(u0: f64, inc: &IncrementSeries, perm: &Permutation) -> Result<StepPath> {
    if perm.len() != inc.len() {
        return Err(Error::LengthMismatch {
            expected: inc.len(),
            got: perm.len(),
        });
    }
    let deltas = inc.deltas();
    Ok(StepPath::accumulate(
        u0,
        perm.as_slice().iter().map(|&i| &deltas[i]),
        inc.scheme(),
    ))
}

/// An ensemble of `alpha` quasi-paths of one increment series.
///
/// Members are regenerated on demand from `(seed, index)`, so only O(n) memory
/// per member in flight is needed.
#[derive(Debug, Clone)]
pub struct QuasiEnsemble<'a> {
    u0: f64,
    increments: &'a IncrementSeries,
    seed: u64,
    alpha: usize,
    identity: bool,
}

impl<'a> QuasiEnsemble<'a> {
    pub fn new(u0: f64, increments: &'a IncrementSeries, alpha: usize, seed: u64) -> Self {
        Self {
            u0,
            increments,
            seed,
            alpha,
            identity: false,
        }
    }

    /// Ensemble whose members all use the identity permutation, i.e. copies of
    /// the observed path.
    pub fn identity(u0: f64, increments: &'a IncrementSeries, alpha: usize) -> Self {
        Self {
            u0,
            increments,
            seed: 0,
            alpha,
            identity: true,
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn increments(&self) -> &IncrementSeries {
        self.increments
    }

    pub fn permutation(&self, index: usize) -> Permutation {
        if self.identity {
            Permutation::identity(self.increments.len())
        } else {
            permutation_at(self.increments.len(), self.seed, index)
        }
    }

    pub fn path(&self, index: usize) -> StepPath {
        build_quasi_path(self.u0, self.increments, &self.permutation(index))
            .expect("ensemble permutations match the series length")
    }

    pub fn materialize(&self) -> Vec<StepPath> {
        (0..self.alpha).map(|i| self.path(i)).collect()
    }

    pub fn warning(&self) -> Option<String> {
        ensemble_size_warning(self.increments.len(), self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{path_from_increments, SamplingScheme};
    use std::collections::HashMap;

    fn series(deltas: &[f64]) -> IncrementSeries {
        IncrementSeries::new(SamplingScheme::new(1.0, deltas.len()).unwrap(), deltas.to_vec())
            .unwrap()
    }

    #[test]
    fn singleton_is_identity() {
        let mut rng = rng::stream(1, 0, 0);
        for _ in 0..10 {
            assert_eq!(sample_permutation(1, &mut rng), Permutation::identity(1));
        }
    }

    #[test]
    fn s3_frequencies_are_uniform() {
        let mut rng = rng::stream(2024, 9, 0);
        let draws = 60_000;
        let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(sample_permutation(3, &mut rng).0).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = 10_000.0;
        let band = 4.0 * (expected * 5.0 / 6.0_f64).sqrt();
        let mut chi2 = 0.0;
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() < band, "count {c}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // chi-square upper 0.001 quantile, 5 degrees of freedom
        assert!(chi2 < 20.515, "chi2 = {chi2}");
    }

    #[test]
    fn same_stream_same_permutation() {
        assert_eq!(permutation_at(50, 3, 7), permutation_at(50, 3, 7));
        assert_ne!(permutation_at(50, 3, 7), permutation_at(50, 3, 8));
    }

    #[test]
    fn set_warns_when_alpha_not_above_n() {
        let set = sample_permutation_set(100, 10, 1);
        assert_eq!(set.len(), 10);
        assert!(set.warning().unwrap().contains("n / alpha = 10"));
        assert!(sample_permutation_set(10, 1000, 1).warning().is_none());
    }

    #[test]
    fn set_of_singletons() {
        let set = sample_permutation_set(1, 5, 11);
        assert_eq!(set.perms(), vec![Permutation::identity(1); 5].as_slice());
    }

    #[test]
    fn set_members_are_bijections_and_may_repeat() {
        let set = sample_permutation_set(3, 1000, 5);
        assert_eq!(set.len(), 1000);
        assert!(set.perms().iter().all(Permutation::is_bijection));
        let distinct: std::collections::HashSet<_> = set.perms().iter().collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn identity_quasi_path_is_the_observed_path() {
        let inc = series(&[1.5, -0.25, 3.0, -4.0]);
        let q = build_quasi_path(10.0, &inc, &Permutation::identity(4)).unwrap();
        assert_eq!(q, path_from_increments(10.0, &inc));
    }

    #[test]
    fn hand_built_quasi_path() {
        let inc = series(&[1.0, -2.0, 3.0]);
        let perm = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let q = build_quasi_path(10.0, &inc, &perm).unwrap();
        assert_eq!(q.values(), &[10.0, 13.0, 14.0, 12.0]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let inc = series(&[1.0, -2.0, 3.0]);
        assert!(matches!(
            build_quasi_path(0.0, &inc, &Permutation::identity(2)),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn invalid_mappings_are_rejected() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn streamed_and_materialized_ensembles_agree() {
        let inc = series(&[1.0, -2.0, 3.0, 0.5, -0.75, 2.0]);
        let ens = QuasiEnsemble::new(4.0, &inc, 20, 77);
        let set = sample_permutation_set(6, 20, 77);
        let materialized = ens.materialize();
        for (i, perm) in set.perms().iter().enumerate() {
            assert_eq!(materialized[i], build_quasi_path(4.0, &inc, perm).unwrap());
            assert_eq!(ens.path(i), materialized[i]);
        }
    }
}
