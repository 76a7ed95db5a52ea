//! Ensemble fitting and consistency scoring.
//!
//! Member `j` draws its `psi` indices from a ChaCha stream selected by
//! `(seed, j)`, so members can be built in any order. Scores are accumulated
//! as integer hit counts and divided once, which keeps them bit-identical for
//! any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{EnsembleModel, MultiViewDataset, SampleSet, SconeParams, ScoreVector};
use crate::neighborhoods::{compute_radii, BinaryEmbedding, PreparedMember};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Runs `f` on a pool of `threads` workers, or the global pool when `None`.
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Invariant(format!("cannot start worker pool: {e}"))),
    }
}

/// Runs `f`; without the `parallel` feature all work is sequential anyway.
#[cfg(not(feature = "parallel"))]
pub fn with_threads<T>(threads: Option<usize>, f: impl FnOnce() -> T) -> Result<T> {
    if threads == Some(0) {
        return Err(Error::Usage("thread count must be at least 1".into()));
    }
    Ok(f())
}

/// RNG for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `psi` distinct indices out of `n` for member `member` of the ensemble.
pub fn draw_member_indices(n: usize, psi: usize, seed: u64, member: usize) -> Vec<usize> {
    let mut rng = stream_rng(seed, member as u64);
    rand::seq::index::sample(&mut rng, n, psi).into_vec()
}

/// Builds a sample set from explicit indices, computing radii in every view.
pub fn sample_set(dataset: &MultiViewDataset, indices: Vec<usize>) -> Result<SampleSet> {
    let n = dataset.instance_count();
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let radii = dataset
        .views()
        .iter()
        .map(|view| compute_radii(&view.select_rows(&indices)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet { indices, radii })
}

pub fn fit(dataset: &MultiViewDataset, params: &SconeParams) -> Result<EnsembleModel> {
    params.validate(dataset)?;
    let n = dataset.instance_count();
    let members = par_map(params.t, |j| {
        sample_set(dataset, draw_member_indices(n, params.psi, params.seed, j))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleModel {
        params: *params,
        members,
        fingerprint: dataset.fingerprint(),
    })
}

fn prepare(members: &[SampleSet], dataset: &MultiViewDataset) -> Result<Vec<PreparedMember>> {
    members
        .iter()
        .map(|m| PreparedMember::new(m, dataset))
        .collect()
}

/// Consistency scores of every instance against the given members.
///
/// Does not check a fingerprint; [`score_dataset`] is the checked entry point.
pub fn score_members(
    dataset: &MultiViewDataset,
    members: &[SampleSet],
    params: &SconeParams,
) -> Result<ScoreVector> {
    let prepared = prepare(members, dataset)?;
    let psi = params.psi;
    if prepared.iter().any(|m| m.psi() != psi) {
        return Err(Error::Invariant("member size differs from psi".into()));
    }
    let k = params.effective_k();
    let use_radius = params.uses_radius();
    let counts = par_map(dataset.instance_count(), |x| {
        let mut distances = Vec::with_capacity(psi);
        let mut candidates = Vec::with_capacity(psi);
        let mut hits = Vec::with_capacity(psi);
        for member in &prepared {
            member.consistent_samples(
                |v| dataset.view(v).row(x),
                k,
                use_radius,
                &mut distances,
                &mut candidates,
                &mut hits,
            );
        }
        hits.len() as u64
    });
    ScoreVector::from_counts(counts, (psi * members.len()) as u64)
}

pub fn score_dataset(model: &EnsembleModel, dataset: &MultiViewDataset) -> Result<ScoreVector> {
    model.check_dataset(dataset)?;
    score_members(dataset, &model.members, &model.params)
}

/// Fits and scores in one call.
pub fn fit_score(dataset: &MultiViewDataset, params: &SconeParams) -> Result<ScoreVector> {
    let model = fit(dataset, params)?;
    score_dataset(&model, dataset)
}

impl EnsembleModel {
    pub fn indicator(
        &self,
        dataset: &MultiViewDataset,
        member: usize,
        x: usize,
        i: usize,
    ) -> Result<bool> {
        Ok(self.embedding(dataset, member, x)?.column(i))
    }

    pub fn embedding(
        &self,
        dataset: &MultiViewDataset,
        member: usize,
        x: usize,
    ) -> Result<BinaryEmbedding> {
        self.check_dataset(dataset)?;
        let m = self.members.get(member).ok_or(Error::IndexOutOfRange {
            index: member,
            n: self.members.len(),
        })?;
        crate::neighborhoods::embed_phi(dataset, x, m, &self.params)
    }
}

/// For every instance, the sorted list of `(member, sample)` cells with `F = 1`,
/// encoded as `member * psi + sample`.
#[derive(Clone, Debug)]
pub struct CoMembership {
    cells: Vec<Vec<u32>>,
    t: usize,
}

impl CoMembership {
    pub fn build(model: &EnsembleModel, dataset: &MultiViewDataset) -> Result<Self> {
        model.check_dataset(dataset)?;
        let prepared = prepare(&model.members, dataset)?;
        let psi = model.params.psi;
        let k = model.params.effective_k();
        let use_radius = model.params.uses_radius();
        let cells = par_map(dataset.instance_count(), |x| {
            let mut distances = Vec::with_capacity(psi);
            let mut candidates = Vec::with_capacity(psi);
            let mut hits = Vec::new();
            let mut cells = Vec::new();
            for (j, member) in prepared.iter().enumerate() {
                hits.clear();
                member.consistent_samples(
                    |v| dataset.view(v).row(x),
                    k,
                    use_radius,
                    &mut distances,
                    &mut candidates,
                    &mut hits,
                );
                cells.extend(hits.iter().map(|&i| (j * psi + i) as u32));
            }
            cells
        });
        Ok(Self {
            cells,
            t: model.members.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self, x: usize) -> &[u32] {
        &self.cells[x]
    }

    fn shared(&self, a: usize, b: usize) -> usize {
        let (mut p, mut q) = (
            self.cells[a].iter().peekable(),
            self.cells[b].iter().peekable(),
        );
        let mut count = 0;
        while let (Some(&&x), Some(&&y)) = (p.peek(), q.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    p.next();
                }
                std::cmp::Ordering::Greater => {
                    q.next();
                }
                std::cmp::Ordering::Equal => {
                    count += 1;
                    p.next();
                    q.next();
                }
            }
        }
        count
    }

    /// Mean number of consistent neighborhoods shared by `a` and `b` per member.
    pub fn similarity(&self, a: usize, b: usize) -> f64 {
        self.shared(a, b) as f64 / self.t as f64
    }

    pub fn row(&self, a: usize) -> Vec<f64> {
        (0..self.cells.len())
            .map(|b| self.similarity(a, b))
            .collect()
    }
}

/// `(1/t) Σ_j Σ_i F(a, i | S_j) · F(b, i | S_j)`.
pub fn co_membership_similarity(
    model: &EnsembleModel,
    dataset: &MultiViewDataset,
    a: usize,
    b: usize,
) -> Result<f64> {
    model.check_dataset(dataset)?;
    let n = dataset.instance_count();
    for idx in [a, b] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let psi = model.params.psi;
    let k = model.params.effective_k();
    let use_radius = model.params.uses_radius();
    let (mut distances, mut candidates) = (Vec::new(), Vec::new());
    let mut shared = 0usize;
    for member in &model.members {
        let prepared = PreparedMember::new(member, dataset)?;
        let mut hits_a = Vec::with_capacity(psi);
        let mut hits_b = Vec::with_capacity(psi);
        prepared.consistent_samples(
            |v| dataset.view(v).row(a),
            k,
            use_radius,
            &mut distances,
            &mut candidates,
            &mut hits_a,
        );
        prepared.consistent_samples(
            |v| dataset.view(v).row(b),
            k,
            use_radius,
            &mut distances,
            &mut candidates,
            &mut hits_b,
        );
        shared += hits_a.iter().filter(|i| hits_b.contains(i)).count();
    }
    Ok(shared as f64 / model.members.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Variant, ViewMatrix};
    use proptest::prelude::*;

    fn line_dataset(n: usize) -> MultiViewDataset {
        let v1: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i * i % 7) as f64]).collect();
        let v2: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![(i * 3 % 11) as f64, i as f64 * 0.5])
            .collect();
        MultiViewDataset::new(vec![
            ViewMatrix::from_rows(&v1).unwrap(),
            ViewMatrix::from_rows(&v2).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn fit_shape_contract() {
        let d = line_dataset(1000);
        let model = fit(&d, &SconeParams::new(8, 3, 200, 42)).unwrap();
        assert_eq!(model.members.len(), 200);
        for m in &model.members {
            assert_eq!(m.indices.len(), 8);
            let mut sorted = m.indices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 8);
            assert_eq!(m.radii.len(), 2);
            assert!(m.radii.iter().all(|r| r.len() == 8));
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let d = line_dataset(300);
        let p = SconeParams::new(8, 3, 50, 42);
        assert_eq!(fit(&d, &p).unwrap(), fit(&d, &p).unwrap());
        let other = fit(&d, &SconeParams::new(8, 3, 50, 43)).unwrap();
        assert_ne!(fit(&d, &p).unwrap().members, other.members);
    }

    #[test]
    fn psi_equal_to_n_takes_everything() {
        let d = line_dataset(8);
        let model = fit(&d, &SconeParams::new(8, 3, 1, 7)).unwrap();
        let mut idx = model.members[0].indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn fit_propagates_validation() {
        let d = line_dataset(10);
        assert!(matches!(
            fit(&d, &SconeParams::new(1, 1, 1, 0)),
            Err(Error::PsiTooSmall { .. })
        ));
    }

    fn single_view(rows: &[[f64; 2]]) -> MultiViewDataset {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        MultiViewDataset::new(vec![ViewMatrix::from_rows(&rows).unwrap()]).unwrap()
    }

    #[test]
    fn hand_computed_scores() {
        // samples at 0,1,2; instance 3 falls only in s0's sphere; instance 4 is far away
        let d = single_view(&[[0.0, 0.0], [4.0, 0.0], [0.0, 5.0], [1.0, 0.0], [40.0, 40.0]]);
        let params = SconeParams::new(3, 1, 1, 0);
        let members = vec![sample_set(&d, vec![0, 1, 2]).unwrap()];
        let s = score_members(&d, &members, &params).unwrap();
        assert_eq!(s.consistency()[3], 1.0 / 3.0);
        assert_eq!(s.consistency()[4], 0.0);
        assert_eq!(s.anomaly_scores()[4], 1.0);
        assert_eq!(s.denominator(), 3);
    }

    #[test]
    fn fingerprint_mismatch_is_rejected() {
        let d = line_dataset(50);
        let model = fit(&d, &SconeParams::new(4, 2, 3, 1)).unwrap();
        let other = line_dataset(51);
        assert!(matches!(
            score_dataset(&model, &other),
            Err(Error::FingerprintMismatch { .. })
        ));
        assert!(matches!(
            co_membership_similarity(&model, &other, 0, 1),
            Err(Error::FingerprintMismatch { .. })
        ));
    }

    #[test]
    fn self_similarity_equals_hit_rate() {
        let d = line_dataset(120);
        let p = SconeParams::new(8, 3, 20, 5);
        let model = fit(&d, &p).unwrap();
        let scores = score_dataset(&model, &d).unwrap();
        let cm = CoMembership::build(&model, &d).unwrap();
        for a in [0, 17, 63, 119] {
            let expected = scores.counts()[a] as f64 / p.t as f64;
            assert_eq!(
                co_membership_similarity(&model, &d, a, a).unwrap(),
                expected
            );
            assert_eq!(cm.similarity(a, a), expected);
        }
        for (a, b) in [(0, 1), (5, 90), (33, 34)] {
            assert_eq!(
                cm.similarity(a, b),
                co_membership_similarity(&model, &d, a, b).unwrap()
            );
        }
    }

    #[test]
    fn duplicates_share_maximal_similarity() {
        let mut rows: Vec<[f64; 2]> = (0..30).map(|i| [i as f64 * 0.37, (i % 5) as f64]).collect();
        rows.push(rows[10]);
        let d = single_view(&rows);
        let model = fit(&d, &SconeParams::new(6, 2, 40, 9)).unwrap();
        let cm = CoMembership::build(&model, &d).unwrap();
        assert_eq!(cm.similarity(10, 30), cm.similarity(10, 10));
        assert!(cm.row(10).iter().all(|&s| s <= cm.similarity(10, 10)));
    }

    #[test]
    fn disjoint_clusters_share_nothing() {
        // cluster A near the origin, cluster B near (100, 100); brute-force
        // the per-member indicator matrices of one instance from each cluster
        let mut rows = Vec::new();
        for i in 0..10 {
            rows.push([(i % 3) as f64 * 0.1, (i / 3) as f64 * 0.1]);
        }
        for i in 0..10 {
            rows.push([100.0 + (i % 3) as f64 * 0.1, 100.0 + (i / 3) as f64 * 0.1]);
        }
        let d = single_view(&rows);
        let p = SconeParams::new(4, 1, 25, 3);
        let model = fit(&d, &p).unwrap();
        let (a, b) = (4, 14);
        for j in 0..p.t {
            let ea = model.embedding(&d, j, a).unwrap();
            let eb = model.embedding(&d, j, b).unwrap();
            assert!((0..p.psi).all(|i| !(ea.column(i) && eb.column(i))));
        }
        assert_eq!(co_membership_similarity(&model, &d, a, b).unwrap(), 0.0);
    }

    #[test]
    fn one_nn_variant_equals_spherical_with_k1() {
        let d = line_dataset(200);
        let a = fit_score(&d, &SconeParams::new(8, 1, 30, 2)).unwrap();
        let b = fit_score(
            &d,
            &SconeParams::new(8, 5, 30, 2).with_variant(Variant::Spherical1nn),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_change_scores() {
        let d = line_dataset(500);
        let p = SconeParams::new(16, 3, 40, 11);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| fit_score(&d, &p).unwrap())
        };
        assert_eq!(run(1), run(7));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn sampling_is_without_replacement(n in 2usize..400, psi_seed in 0usize..1000, seed in any::<u64>(), j in 0usize..1000) {
            let psi = 2 + psi_seed % (n - 1);
            let idx = draw_member_indices(n, psi, seed, j);
            prop_assert_eq!(idx.len(), psi);
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), psi);
            prop_assert!(idx.iter().all(|&i| i < n));
        }

        #[test]
        fn scores_are_quantized_and_bounded(
            rows in prop::collection::vec(prop::array::uniform2(-20.0f64..20.0), 10..60),
            psi in 2usize..10,
            k in 1usize..10,
            t in 1usize..6,
            seed in any::<u64>(),
        ) {
            let psi = psi.min(rows.len());
            let k = k.min(psi);
            let d = single_view(&rows);
            let p = SconeParams::new(psi, k, t, seed);
            let model = fit(&d, &p).unwrap();
            let s = score_dataset(&model, &d).unwrap();
            let denom = (psi * t) as f64;
            for (c, &count) in s.consistency().iter().zip(s.counts()) {
                prop_assert!((0.0..=1.0).contains(c));
                prop_assert_eq!(*c, count as f64 / denom);
                prop_assert!((*c * denom - (*c * denom).round()).abs() < 1e-9);
            }
            // every sampled point lies in its own sphere when samples are distinct
            let distinct = {
                let mut r: Vec<_> = rows.iter().map(|p| (p[0].to_bits(), p[1].to_bits())).collect();
                r.sort_unstable();
                r.dedup();
                r.len() == rows.len()
            };
            if distinct {
                for m in &model.members {
                    for &i in &m.indices {
                        prop_assert!(s.counts()[i] >= 1);
                    }
                }
            }
        }
    }
}
