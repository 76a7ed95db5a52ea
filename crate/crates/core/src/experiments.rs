//! Experiment drivers shared by the command-line tool, the acceptance suite and the demo.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::evaluation::{overall_auc, per_type_auc};
use crate::model::{Label, MultiViewDataset, SconeParams, Variant};
use crate::oracle::{
    cross_view_neighborhood_counts, estimate_membership_probability, proportion_consistent,
    MembershipEstimate, ProportionReport, UniformBox,
};
use crate::scorer::{draw_member_indices, fit, fit_score, stream_rng};
use crate::synthetic::{synthetic_benchmark, AnomalyCounts, DensityMode, LabeledDataset};

const STREAM_PROBE_NORMALS: u64 = 0x5c0e_0101;

/// Search grid for `psi`: powers of two from 2 to 256.
pub const PSI_GRID: [usize; 8] = [2, 4, 8, 16, 32, 64, 128, 256];
/// Search grid for `k`.
pub const K_GRID: [usize; 8] = [1, 3, 5, 7, 11, 21, 51, 101];

#[derive(Clone, Debug, PartialEq)]
pub struct AucReport {
    pub overall: f64,
    pub per_type: BTreeMap<Label, f64>,
}

pub fn score_and_evaluate(data: &LabeledDataset, params: &SconeParams) -> Result<AucReport> {
    let scores = fit_score(&data.dataset, params)?.anomaly_scores();
    Ok(AucReport {
        overall: overall_auc(&scores, &data.labels)?,
        per_type: per_type_auc(&scores, &data.labels),
    })
}

/// AUC on the default synthetic benchmark for each seed; the seed drives both data and model.
pub fn synthetic_aucs(
    mode: DensityMode,
    seeds: &[u64],
    params: &SconeParams,
) -> Result<Vec<AucReport>> {
    seeds
        .iter()
        .map(|&seed| {
            let data = synthetic_benchmark(mode, AnomalyCounts::default(), seed)?;
            score_and_evaluate(&data, &SconeParams { seed, ..*params })
        })
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub variant: Variant,
    pub aucs: Vec<f64>,
    pub mean: f64,
}

/// Scores each dataset with every variant, in [`Variant::ALL`] order.
pub fn ablation(datasets: &[LabeledDataset], params: &SconeParams) -> Result<Vec<AblationRow>> {
    if datasets.is_empty() {
        return Err(Error::Usage("ablation needs at least one dataset".into()));
    }
    Variant::ALL
        .iter()
        .map(|&variant| {
            let p = params.with_variant(variant);
            let aucs = datasets
                .iter()
                .map(|d| {
                    let scores = fit_score(&d.dataset, &p)?.anomaly_scores();
                    overall_auc(&scores, &d.labels)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AblationRow {
                variant,
                mean: mean(&aucs),
                aucs,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodCountReport {
    pub draws: usize,
    /// Mean number of normals inside a sample's sphere, per view.
    pub view_means: Vec<f64>,
    /// `(max − min) / min` over `view_means`.
    pub relative_difference: f64,
}

/// Per-view sphere populations of normal instances, averaged over `draws`
/// independent subsamples of size `psi`.
pub fn neighborhood_counts(
    data: &LabeledDataset,
    psi: usize,
    draws: usize,
    seed: u64,
) -> Result<NeighborhoodCountReport> {
    if draws == 0 {
        return Err(Error::Usage("draws must be positive".into()));
    }
    let n = data.dataset.instance_count();
    crate::model::validate_params(&SconeParams::new(psi, 1, draws, seed), n)?;
    let mut sums = vec![0.0; data.dataset.view_count()];
    for d in 0..draws {
        let indices = draw_member_indices(n, psi, seed, d);
        let counts = cross_view_neighborhood_counts(&data.dataset, &data.labels, &indices)?;
        for (s, c) in sums.iter_mut().zip(counts) {
            *s += c;
        }
    }
    let view_means: Vec<f64> = sums.iter().map(|s| s / draws as f64).collect();
    let lo = view_means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = view_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let relative_difference = if lo > 0.0 {
        (hi - lo) / lo
    } else {
        f64::INFINITY
    };
    Ok(NeighborhoodCountReport {
        draws,
        view_means,
        relative_difference,
    })
}

/// Side of the sparse square in [`density_probe`].
pub const PROBE_SPARSE_SIDE: f64 = 2.0;
/// The probe point; the shared sample sits at the origin.
pub const PROBE_POINT: [f64; 2] = [0.1, 0.0];

/// Membership probability of a probe near a sample surrounded by uniform
/// points on a square of side 2 (sparse) against a square of `density_ratio`
/// times the density (dense), both centred on the sample.
pub fn density_probe(
    density_ratio: f64,
    psi: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MembershipEstimate> {
    if !(density_ratio.is_finite() && density_ratio > 0.0) {
        return Err(Error::BadConfig("density ratio must be positive".into()));
    }
    let sparse = UniformBox::cube(&[0.0, 0.0], PROBE_SPARSE_SIDE);
    let dense = UniformBox::cube(&[0.0, 0.0], PROBE_SPARSE_SIDE / density_ratio.sqrt());
    estimate_membership_probability(
        &sparse,
        &dense,
        &PROBE_POINT,
        &[0.0, 0.0],
        psi,
        k,
        trials,
        seed,
    )
}

/// `count` normal instances chosen uniformly without replacement, in ascending order.
pub fn pick_normal_probes(data: &LabeledDataset, count: usize, seed: u64) -> Result<Vec<usize>> {
    let normals = data.indices_of(Label::Normal);
    if count > normals.len() {
        return Err(Error::CountExceedsN {
            count,
            available: normals.len(),
        });
    }
    let mut rng = stream_rng(seed, STREAM_PROBE_NORMALS);
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, normals.len(), count)
        .into_iter()
        .map(|i| normals[i])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Share of consistent neighbors (at `k_oracle`) recovered among the
/// `k_repr` instances most often co-assigned with each probe.
pub fn proportion(
    data: &LabeledDataset,
    params: &SconeParams,
    k_oracle: usize,
    probes: usize,
    k_repr: usize,
) -> Result<ProportionReport> {
    let model = fit(&data.dataset, params)?;
    let picked = pick_normal_probes(data, probes, params.seed)?;
    proportion_consistent(&data.dataset, &model, k_oracle, &picked, k_repr)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub best: SconeParams,
    pub best_auc: f64,
    /// Every evaluated `(psi, k, auc)`, in search order.
    pub evaluated: Vec<(usize, usize, f64)>,
}

/// Exhaustive search over [`PSI_GRID`] × [`K_GRID`] (skipping `psi > n` and
/// `k > psi`) for the best labelled AUC; ties keep the earlier candidate.
pub fn grid_search(
    dataset: &MultiViewDataset,
    labels: &[Label],
    base: &SconeParams,
) -> Result<GridResult> {
    let n = dataset.instance_count();
    let mut evaluated = Vec::new();
    let mut best: Option<(SconeParams, f64)> = None;
    for &psi in PSI_GRID.iter().filter(|&&p| p <= n) {
        for &k in K_GRID.iter().filter(|&&k| k <= psi) {
            let p = SconeParams { psi, k, ..*base };
            let auc = overall_auc(&fit_score(dataset, &p)?.anomaly_scores(), labels)?;
            evaluated.push((psi, k, auc));
            if best.is_none_or(|(_, b)| auc > b) {
                best = Some((p, auc));
            }
        }
    }
    let (best, best_auc) = best.ok_or(Error::PsiTooSmall { psi: n })?;
    Ok(GridResult {
        best,
        best_auc,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_picks_are_distinct_normals() {
        let data = synthetic_benchmark(DensityMode::Varied, AnomalyCounts::default(), 3).unwrap();
        let p = pick_normal_probes(&data, 20, 3).unwrap();
        assert_eq!(p.len(), 20);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!(p.iter().all(|&i| data.labels[i] == Label::Normal));
        assert!(pick_normal_probes(&data, 971, 3).is_err());
    }

    #[test]
    fn grid_respects_bounds() {
        let counts = AnomalyCounts {
            normal: 40,
            attribute: 2,
            class: 2,
            class_attribute: 2,
        };
        let data = synthetic_benchmark(DensityMode::Uniform, counts, 1).unwrap();
        let g = grid_search(&data.dataset, &data.labels, &SconeParams::new(8, 3, 5, 1)).unwrap();
        assert!(g.evaluated.iter().all(|&(psi, k, _)| psi <= 46 && k <= psi));
        // psi 2, 4, 8, 16, 32 admit 1, 2, 4, 5, 6 values of k
        assert_eq!(g.evaluated.len(), 1 + 2 + 4 + 5 + 6);
        assert!(g.evaluated.iter().all(|e| e.2 <= g.best_auc));
    }

    #[test]
    fn equal_views_give_zero_count_difference() {
        let data = synthetic_benchmark(DensityMode::Uniform, AnomalyCounts::default(), 0).unwrap();
        let same = MultiViewDataset::new(vec![
            data.dataset.view(0).clone(),
            data.dataset.view(0).clone(),
        ])
        .unwrap();
        let dup = LabeledDataset {
            dataset: same,
            ..data
        };
        let r = neighborhood_counts(&dup, 8, 5, 0).unwrap();
        assert_eq!(r.relative_difference, 0.0);
    }
}
