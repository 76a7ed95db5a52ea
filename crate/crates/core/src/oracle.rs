//! Reference computations used to check the ensemble scorer.
//!
//! Everything here works on the full dataset or by direct enumeration and
//! shares no code path with the scorer beyond the data types:
//! consistent neighbors over full-dataset kNN sets, a literal triple-loop
//! scorer, the consistent-neighbor proportion metric, and Monte Carlo probes
//! of the two density properties of adaptive spheres.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{
    EnsembleModel, Label, MultiViewDataset, SampleSet, SconeParams, ScoreVector, Variant,
    ViewMatrix,
};
use crate::neighborhoods::{compute_radii, f_spherical};
use crate::scorer::{par_map, stream_rng, CoMembership};

fn distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc.sqrt()
}

/// The `k` rows of `view` nearest to `query`, ties to the lower index.
fn brute_knn(view: &ViewMatrix, query: &[f64], k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = (0..view.rows())
        .map(|j| (distance(query, view.row(j)), j))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.truncate(k);
    all.into_iter().map(|(_, j)| j).collect()
}

/// Instances that are among `x`'s `k` nearest neighbors in every view.
///
/// Returned in ascending order. `x` itself is included when it ranks within
/// `k` of itself in every view.
pub fn consistent_neighbors(dataset: &MultiViewDataset, x: usize, k: usize) -> Result<Vec<usize>> {
    let n = dataset.instance_count();
    if k > n {
        return Err(Error::KExceedsN { k, n });
    }
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, n });
    }
    let mut common: Option<BTreeSet<usize>> = None;
    for view in dataset.views() {
        let knn: BTreeSet<usize> = brute_knn(view, view.row(x), k).into_iter().collect();
        common = Some(match common {
            None => knn,
            Some(c) => c.intersection(&knn).copied().collect(),
        });
    }
    Ok(common.unwrap_or_default().into_iter().collect())
}

/// Literal transcription of the consistency score: for every instance, every
/// member and every sample, multiply the per-view indicators.
///
/// Radii are recomputed here from the member's indices by all-pairs search.
pub fn naive_score(
    dataset: &MultiViewDataset,
    members: &[SampleSet],
    params: &SconeParams,
) -> Result<ScoreVector> {
    let n = dataset.instance_count();
    let psi = params.psi;
    let k = params.effective_k();
    let mut counts = vec![0u64; n];
    for member in members {
        if member.indices.len() != psi {
            return Err(Error::Invariant("member size differs from psi".into()));
        }
        if let Some(&bad) = member.indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        let radii: Vec<Vec<f64>> = dataset
            .views()
            .iter()
            .map(|view| {
                (0..psi)
                    .map(|i| {
                        (0..psi)
                            .filter(|&j| j != i)
                            .map(|j| {
                                distance(view.row(member.indices[i]), view.row(member.indices[j]))
                            })
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        for (x, count) in counts.iter_mut().enumerate() {
            for i in 0..psi {
                let mut product = 1u64;
                for (v, view) in dataset.views().iter().enumerate() {
                    let query = view.row(x);
                    let samples = member.indices.iter().map(|&s| view.row(s));
                    let mut ranked: Vec<(f64, usize)> =
                        samples.map(|s| distance(query, s)).zip(0..psi).collect();
                    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                    let in_knn = ranked[..k].iter().any(|&(_, j)| j == i);
                    let inside = match params.variant {
                        Variant::Voronoi => true,
                        _ => distance(query, view.row(member.indices[i])) <= radii[v][i],
                    };
                    product *= u64::from(in_knn && inside);
                }
                *count += product;
            }
        }
    }
    ScoreVector::from_counts(counts, (psi * members.len()) as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProportionReport {
    /// Mean percentage over the instances that were not skipped.
    pub mean_percent: f64,
    /// `(instance, percentage)` for each evaluated instance.
    pub per_instance: Vec<(usize, f64)>,
    /// Instances whose consistent-neighbor set was empty.
    pub skipped: Vec<usize>,
}

/// Share of each instance's consistent neighbors that are also among its
/// `k_repr` most similar instances under `similarity_row`.
///
/// `similarity_row(x)` returns the similarity of `x` to every instance. The
/// instance itself is excluded from both sets; ties in similarity go to the
/// lower index.
pub fn proportion_with_similarity(
    dataset: &MultiViewDataset,
    k_oracle: usize,
    instances: &[usize],
    k_repr: usize,
    similarity_row: impl Fn(usize) -> Vec<f64>,
) -> Result<ProportionReport> {
    let n = dataset.instance_count();
    let mut per_instance = Vec::new();
    let mut skipped = Vec::new();
    for &x in instances {
        let cn: Vec<usize> = consistent_neighbors(dataset, x, k_oracle)?
            .into_iter()
            .filter(|&y| y != x)
            .collect();
        if cn.is_empty() {
            skipped.push(x);
            continue;
        }
        let sims = similarity_row(x);
        if sims.len() != n {
            return Err(Error::Invariant("similarity row has wrong length".into()));
        }
        let mut ranked: Vec<usize> = (0..n).filter(|&y| y != x).collect();
        ranked.sort_by(|&a, &b| sims[b].total_cmp(&sims[a]).then(a.cmp(&b)));
        let top: BTreeSet<usize> = ranked.into_iter().take(k_repr).collect();
        let hit = cn.iter().filter(|y| top.contains(y)).count();
        per_instance.push((x, 100.0 * hit as f64 / cn.len() as f64));
    }
    if per_instance.is_empty() {
        let index = skipped.first().copied().unwrap_or(0);
        return Err(Error::EmptyConsistentSet { index });
    }
    let mean_percent = per_instance.iter().map(|p| p.1).sum::<f64>() / per_instance.len() as f64;
    Ok(ProportionReport {
        mean_percent,
        per_instance,
        skipped,
    })
}

/// Consistent-neighbor proportion with the ensemble's co-membership similarity.
pub fn proportion_consistent(
    dataset: &MultiViewDataset,
    model: &EnsembleModel,
    k_oracle: usize,
    normal_indices: &[usize],
    k_repr: usize,
) -> Result<ProportionReport> {
    let co = CoMembership::build(model, dataset)?;
    proportion_with_similarity(dataset, k_oracle, normal_indices, k_repr, |x| co.row(x))
}

/// Source of single-view points for the membership probes.
pub trait PointGenerator: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Uniform distribution on an axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl UniformBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    /// Cube of the given side length centered at `center`.
    pub fn cube(center: &[f64], side: f64) -> Self {
        Self {
            lo: center.iter().map(|c| c - side / 2.0).collect(),
            hi: center.iter().map(|c| c + side / 2.0).collect(),
        }
    }
}

impl PointGenerator for UniformBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&lo, &hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipEstimate {
    pub trials: usize,
    pub hits_sparse: usize,
    pub hits_dense: usize,
    pub p_sparse: f64,
    pub p_dense: f64,
    /// One-sided two-proportion z-test p-value for `p_sparse > p_dense`.
    pub p_value: f64,
}

const STREAM_DEGENERACY: u64 = u64::MAX;

fn check_generator(generator: &dyn PointGenerator, seed: u64) -> Result<()> {
    let mut rng = stream_rng(seed, STREAM_DEGENERACY);
    let first = generator.sample(&mut rng);
    if (0..63).all(|_| generator.sample(&mut rng) == first) {
        return Err(Error::DegenerateGenerator);
    }
    Ok(())
}

fn membership_trial(
    generator: &dyn PointGenerator,
    probe: &[f64],
    shared: &[f64],
    psi: usize,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let mut rows = Vec::with_capacity(psi);
    rows.push(shared.to_vec());
    rows.extend((1..psi).map(|_| generator.sample(rng)));
    let samples = ViewMatrix::from_rows(&rows)?;
    let radii = compute_radii(&samples)?;
    Ok(f_spherical(probe, 0, &samples, &radii, k))
}

/// Monte Carlo estimate of `P(f(probe; shared) = 1)` when the other `psi − 1`
/// samples come from each generator.
///
/// Both generators consume the same per-trial random streams, so swapping
/// them swaps the two estimates exactly.
#[allow(clippy::too_many_arguments)]
pub fn estimate_membership_probability(
    sparse: &dyn PointGenerator,
    dense: &dyn PointGenerator,
    probe: &[f64],
    shared_sample: &[f64],
    psi: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MembershipEstimate> {
    if psi < 2 {
        return Err(Error::PsiTooSmall { psi });
    }
    if k == 0 {
        return Err(Error::KZero);
    }
    if k > psi {
        return Err(Error::KExceedsPsi { k, psi });
    }
    if trials < 1000 {
        return Err(Error::Usage(format!(
            "{trials} trials; at least 1000 are needed"
        )));
    }
    for g in [sparse, dense] {
        if g.dim() != probe.len() || shared_sample.len() != probe.len() {
            return Err(Error::BadConfig(
                "generator, probe and sample dimensions differ".into(),
            ));
        }
        check_generator(g, seed)?;
    }
    let outcomes = par_map(trials, |trial| -> Result<(bool, bool)> {
        let a = membership_trial(
            sparse,
            probe,
            shared_sample,
            psi,
            k,
            &mut stream_rng(seed, trial as u64),
        )?;
        let b = membership_trial(
            dense,
            probe,
            shared_sample,
            psi,
            k,
            &mut stream_rng(seed, trial as u64),
        )?;
        Ok((a, b))
    });
    let (mut hits_sparse, mut hits_dense) = (0, 0);
    for o in outcomes {
        let (a, b) = o?;
        hits_sparse += usize::from(a);
        hits_dense += usize::from(b);
    }
    let p_sparse = hits_sparse as f64 / trials as f64;
    let p_dense = hits_dense as f64 / trials as f64;
    Ok(MembershipEstimate {
        trials,
        hits_sparse,
        hits_dense,
        p_sparse,
        p_dense,
        p_value: one_sided_two_proportion(hits_sparse, hits_dense, trials),
    })
}

/// P-value of `H1: p_a > p_b` with pooled-variance normal approximation.
pub fn one_sided_two_proportion(hits_a: usize, hits_b: usize, trials: usize) -> f64 {
    let n = trials as f64;
    let (pa, pb) = (hits_a as f64 / n, hits_b as f64 / n);
    let pooled = (hits_a + hits_b) as f64 / (2.0 * n);
    let se = (pooled * (1.0 - pooled) * 2.0 / n).sqrt();
    if se == 0.0 {
        return if pa > pb { 0.0 } else { 1.0 };
    }
    let z = (pa - pb) / se;
    1.0 - Normal::standard().cdf(z)
}

/// Mean number of normal instances inside each sample's sphere, per view.
pub fn cross_view_neighborhood_counts(
    dataset: &MultiViewDataset,
    labels: &[Label],
    sample_indices: &[usize],
) -> Result<Vec<f64>> {
    let n = dataset.instance_count();
    if labels.len() != n {
        return Err(Error::Usage(format!(
            "{} labels for {n} instances",
            labels.len()
        )));
    }
    if let Some(&bad) = sample_indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    dataset
        .views()
        .iter()
        .map(|view| {
            let samples = view.select_rows(sample_indices);
            let radii = compute_radii(&samples)?;
            let total: usize = (0..samples.rows())
                .map(|i| {
                    (0..n)
                        .filter(|&y| labels[y] == Label::Normal)
                        .filter(|&y| distance(view.row(y), samples.row(i)) <= radii[i])
                        .count()
                })
                .sum();
            Ok(total as f64 / samples.rows() as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::{fit, sample_set, score_members};
    use proptest::prelude::*;
    use rand::Rng;

    fn view(rows: &[Vec<f64>]) -> ViewMatrix {
        ViewMatrix::from_rows(rows).unwrap()
    }

    fn scattered(n: usize, salt: u64) -> Vec<Vec<f64>> {
        let mut rng = stream_rng(salt, 0);
        (0..n)
            .map(|_| vec![rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0])
            .collect()
    }

    #[test]
    fn single_view_is_plain_knn() {
        let rows = scattered(30, 1);
        let d = MultiViewDataset::new(vec![view(&rows)]).unwrap();
        let mut knn = brute_knn(d.view(0), &rows[7], 5);
        knn.sort_unstable();
        assert_eq!(consistent_neighbors(&d, 7, 5).unwrap(), knn);
        assert!(knn.contains(&7));
    }

    #[test]
    fn duplicated_views_match_single_view() {
        let rows = scattered(30, 2);
        let one = MultiViewDataset::new(vec![view(&rows)]).unwrap();
        let two = MultiViewDataset::new(vec![view(&rows), view(&rows)]).unwrap();
        for x in [0, 13, 29] {
            assert_eq!(
                consistent_neighbors(&one, x, 6).unwrap(),
                consistent_neighbors(&two, x, 6).unwrap()
            );
        }
    }

    #[test]
    fn disagreeing_views_leave_only_self() {
        // 20 points: two clusters of 10 per view, with the cluster memberships
        // of everyone except x = 0 arranged so that x's neighbors differ
        let mut v1 = Vec::new();
        let mut v2 = Vec::new();
        for i in 0..20 {
            let j = i as f64 * 0.01;
            v1.push(if i < 10 {
                vec![j, 0.0]
            } else {
                vec![50.0 + j, 0.0]
            });
            // in view 2, x (0) sits with instances 10..19; 1..9 sit elsewhere
            v2.push(if i == 0 || i >= 10 {
                vec![j, 5.0]
            } else {
                vec![80.0 + j, 5.0]
            });
        }
        let d = MultiViewDataset::new(vec![view(&v1), view(&v2)]).unwrap();
        let k = 10;
        let a: BTreeSet<usize> = brute_knn(d.view(0), d.view(0).row(0), k)
            .into_iter()
            .collect();
        let b: BTreeSet<usize> = brute_knn(d.view(1), d.view(1).row(0), k)
            .into_iter()
            .collect();
        let expected: Vec<usize> = a.intersection(&b).copied().collect();
        assert_eq!(expected, vec![0]);
        assert_eq!(consistent_neighbors(&d, 0, k).unwrap(), vec![0]);
    }

    #[test]
    fn k_bounds() {
        let d = MultiViewDataset::new(vec![view(&scattered(10, 3))]).unwrap();
        assert!(matches!(
            consistent_neighbors(&d, 0, 11),
            Err(Error::KExceedsN { .. })
        ));
        assert_eq!(
            consistent_neighbors(&d, 4, 10).unwrap(),
            (0..10).collect::<Vec<_>>()
        );
    }

    #[test]
    fn naive_score_with_vacuous_knn() {
        let rows = scattered(40, 4);
        let d = MultiViewDataset::new(vec![view(&rows)]).unwrap();
        let members = vec![sample_set(&d, vec![3, 9, 21, 30]).unwrap()];
        let s = naive_score(&d, &members, &SconeParams::new(4, 4, 1, 0)).unwrap();
        for x in 0..40 {
            let inside = members[0]
                .indices
                .iter()
                .zip(&members[0].radii[0])
                .filter(|(&i, &r)| distance(&rows[x], &rows[i]) <= r)
                .count();
            assert_eq!(s.counts()[x], inside as u64);
        }
        let mut far = rows.clone();
        far.push(vec![1e6, 1e6]);
        let d = MultiViewDataset::new(vec![view(&far)]).unwrap();
        let s = naive_score(&d, &members, &SconeParams::new(4, 2, 1, 0)).unwrap();
        assert_eq!(s.counts()[40], 0);
    }

    #[test]
    fn perfect_similarity_gives_full_proportion() {
        let rows = scattered(80, 5);
        let d = MultiViewDataset::new(vec![view(&rows), view(&rows)]).unwrap();
        let k = 15;
        let report = proportion_with_similarity(&d, k, &[0, 10, 20], k - 1, |x| {
            (0..80).map(|y| -distance(&rows[x], &rows[y])).collect()
        })
        .unwrap();
        assert_eq!(report.mean_percent, 100.0);
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn random_similarity_gives_chance_proportion() {
        let n = 500;
        let rows = scattered(n, 6);
        let rows2 = scattered(n, 7);
        let d = MultiViewDataset::new(vec![view(&rows), view(&rows2)]).unwrap();
        let (k_oracle, k_repr) = (200, 100);
        let instances: Vec<usize> = (0..n).step_by(10).collect();
        let report = proportion_with_similarity(&d, k_oracle, &instances, k_repr, |x| {
            let mut rng = stream_rng(99, x as u64);
            (0..n).map(|_| rng.random::<f64>()).collect()
        })
        .unwrap();
        let expected = 100.0 * k_repr as f64 / (n - 1) as f64;
        assert!(
            (report.mean_percent - expected).abs() < 4.0,
            "{} vs {expected}",
            report.mean_percent
        );
    }

    #[test]
    fn identical_generators_agree() {
        let g = UniformBox::cube(&[0.0, 0.0], 2.0);
        let e = estimate_membership_probability(&g, &g, &[0.1, 0.0], &[0.0, 0.0], 8, 1, 1000, 3)
            .unwrap();
        assert_eq!(e.p_sparse, e.p_dense);
    }

    #[test]
    fn far_probe_is_never_inside() {
        let sparse = UniformBox::cube(&[0.0, 0.0], 2.0);
        let dense = UniformBox::cube(&[0.0, 0.0], 0.5);
        let e = estimate_membership_probability(
            &sparse,
            &dense,
            &[50.0, 50.0],
            &[0.0, 0.0],
            8,
            1,
            1000,
            1,
        )
        .unwrap();
        assert_eq!((e.p_sparse, e.p_dense), (0.0, 0.0));
    }

    #[test]
    fn degenerate_generator_is_rejected() {
        let point = UniformBox::new(vec![1.0, 1.0], vec![1.0, 1.0]);
        let ok = UniformBox::cube(&[0.0, 0.0], 1.0);
        assert!(matches!(
            estimate_membership_probability(&ok, &point, &[0.0, 0.0], &[0.0, 0.0], 4, 1, 1000, 0),
            Err(Error::DegenerateGenerator)
        ));
    }

    #[test]
    fn sparser_region_gives_higher_membership() {
        let side = 2.0;
        let sparse = UniformBox::cube(&[0.0, 0.0], side);
        let dense = UniformBox::cube(&[0.0, 0.0], side / 10f64.sqrt());
        let e = estimate_membership_probability(
            &sparse,
            &dense,
            &[0.1, 0.0],
            &[0.0, 0.0],
            8,
            1,
            5000,
            17,
        )
        .unwrap();
        assert!(e.p_sparse > e.p_dense);
        assert!(e.p_value < 0.01);
    }

    #[test]
    fn duplicated_views_give_identical_counts() {
        let rows = scattered(60, 8);
        let d = MultiViewDataset::new(vec![view(&rows), view(&rows)]).unwrap();
        let labels = vec![Label::Normal; 60];
        let counts = cross_view_neighborhood_counts(&d, &labels, &[1, 5, 9, 33]).unwrap();
        assert_eq!(counts[0], counts[1]);
        assert!(counts[0] >= 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn consistent_neighbors_grow_with_k(seed in any::<u64>(), x in 0usize..40, k in 1usize..39) {
            let d = MultiViewDataset::new(vec![view(&scattered(40, seed)), view(&scattered(40, seed ^ 1))]).unwrap();
            let small: BTreeSet<usize> = consistent_neighbors(&d, x, k).unwrap().into_iter().collect();
            let large: BTreeSet<usize> = consistent_neighbors(&d, x, k + 1).unwrap().into_iter().collect();
            prop_assert!(small.is_subset(&large));
            prop_assert_eq!(consistent_neighbors(&d, x, 40).unwrap().len(), 40);
        }

        #[test]
        fn swapping_generators_swaps_estimates(seed in any::<u64>(), side in 0.2f64..3.0) {
            let a = UniformBox::cube(&[0.0, 0.0], 2.0);
            let b = UniformBox::cube(&[0.0, 0.0], side);
            let ab = estimate_membership_probability(&a, &b, &[0.05, 0.02], &[0.0, 0.0], 6, 2, 1000, seed).unwrap();
            let ba = estimate_membership_probability(&b, &a, &[0.05, 0.02], &[0.0, 0.0], 6, 2, 1000, seed).unwrap();
            prop_assert_eq!(ab.p_sparse, ba.p_dense);
            prop_assert_eq!(ab.p_dense, ba.p_sparse);
        }

        #[test]
        fn naive_matches_fast_scorer(seed in any::<u64>(), n in 10usize..80, psi in 2usize..10, k in 1usize..10, t in 1usize..5) {
            let psi = psi.min(n);
            let k = k.min(psi);
            let d = MultiViewDataset::new(vec![view(&scattered(n, seed)), view(&scattered(n, !seed))]).unwrap();
            for variant in Variant::ALL {
                let p = SconeParams::new(psi, k, t, seed).with_variant(variant);
                let model = fit(&d, &p).unwrap();
                prop_assert_eq!(
                    naive_score(&d, &model.members, &p).unwrap(),
                    score_members(&d, &model.members, &p).unwrap()
                );
            }
        }
    }
}
