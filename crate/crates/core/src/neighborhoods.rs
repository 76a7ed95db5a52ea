//! Per-view geometry of sampled neighborhoods.
//!
//! Every sample point `s_i` in a view owns a sphere whose radius is the
//! distance to its nearest fellow sample. An instance `x` belongs to that
//! sphere when it lies inside it *and* `s_i` is among the `k` samples nearest
//! to `x`. The multi-view indicator is the product of the per-view
//! indicators: `x` belongs to `s_i`'s consistent neighborhood only if it does
//! so in every view.
//!
//! Distances are exact Euclidean. Ties in nearest-sample ranking go to the
//! lower sample index.

use crate::error::{Error, Result};
use crate::model::{MultiViewDataset, SampleSet, SconeParams, ViewMatrix};

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from each sample to its nearest other sample.
pub fn compute_radii(samples: &ViewMatrix) -> Result<Vec<f64>> {
    let psi = samples.rows();
    if psi < 2 {
        return Err(Error::FewerThanTwoSamples { count: psi });
    }
    let mut radii = vec![f64::INFINITY; psi];
    for i in 0..psi {
        for j in (i + 1)..psi {
            let d = euclidean(samples.row(i), samples.row(j));
            radii[i] = radii[i].min(d);
            radii[j] = radii[j].min(d);
        }
    }
    Ok(radii)
}

/// Position of sample `i` in the nearest-first ordering of `distances`.
#[inline]
fn rank_of(distances: &[f64], i: usize) -> usize {
    let di = distances[i];
    distances
        .iter()
        .enumerate()
        .filter(|&(j, &dj)| dj < di || (dj == di && j < i))
        .count()
}

/// Indices of the `k` samples nearest to `x`, nearest first.
pub fn knn_among_samples(x: &[f64], samples: &ViewMatrix, k: usize) -> Result<Vec<usize>> {
    let psi = samples.rows();
    if k > psi {
        return Err(Error::KExceedsPsi { k, psi });
    }
    let mut order: Vec<(f64, usize)> = (0..psi)
        .map(|j| (euclidean(x, samples.row(j)), j))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(order.into_iter().take(k).map(|(_, j)| j).collect())
}

/// Single-view spherical indicator of `x` for sample `i`.
pub fn f_spherical(x: &[f64], i: usize, samples: &ViewMatrix, radii: &[f64], k: usize) -> bool {
    let distances: Vec<f64> = (0..samples.rows())
        .map(|j| euclidean(x, samples.row(j)))
        .collect();
    distances[i] <= radii[i] && rank_of(&distances, i) < k
}

/// Single-view Voronoi indicator: `i` is the nearest sample to `x`.
pub fn f_voronoi(x: &[f64], i: usize, samples: &ViewMatrix) -> bool {
    let distances: Vec<f64> = (0..samples.rows())
        .map(|j| euclidean(x, samples.row(j)))
        .collect();
    rank_of(&distances, i) == 0
}

/// Per-view membership of one instance in each of the `psi` neighborhoods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryEmbedding {
    /// `bits[v][i]` is the view-`v` indicator for sample `i`.
    pub bits: Vec<Vec<bool>>,
}

impl BinaryEmbedding {
    /// Multi-view indicator for sample `i` (AND down column `i`).
    pub fn column(&self, i: usize) -> bool {
        self.bits.iter().all(|row| row[i])
    }

    pub fn row_count(&self, v: usize) -> usize {
        self.bits[v].iter().filter(|&&b| b).count()
    }

    pub fn is_origin(&self) -> bool {
        self.bits.iter().flatten().all(|&b| !b)
    }
}

/// A sample set with its sample coordinates gathered per view.
#[derive(Clone, Debug)]
pub struct PreparedMember {
    points: Vec<ViewMatrix>,
    radii: Vec<Vec<f64>>,
}

impl PreparedMember {
    pub fn new(member: &SampleSet, dataset: &MultiViewDataset) -> Result<Self> {
        member.check_against(dataset)?;
        Ok(Self {
            points: dataset
                .views()
                .iter()
                .map(|view| view.select_rows(&member.indices))
                .collect(),
            radii: member.radii.clone(),
        })
    }

    pub fn psi(&self) -> usize {
        self.radii.first().map_or(0, Vec::len)
    }

    pub fn points(&self, v: usize) -> &ViewMatrix {
        &self.points[v]
    }

    pub fn radii(&self, v: usize) -> &[f64] {
        &self.radii[v]
    }

    /// Per-view indicator row for `x_v` in view `v`.
    pub fn view_row(&self, v: usize, x_v: &[f64], k: usize, use_radius: bool) -> Vec<bool> {
        let samples = &self.points[v];
        let distances: Vec<f64> = (0..samples.rows())
            .map(|j| euclidean(x_v, samples.row(j)))
            .collect();
        (0..samples.rows())
            .map(|i| view_member(&distances, &self.radii[v], i, k, use_radius))
            .collect()
    }

    /// Appends to `out` every sample `i` with multi-view indicator 1 for the
    /// instance whose per-view coordinates are given by `x_view`.
    ///
    /// `distances` and `candidates` are scratch buffers.
    pub fn consistent_samples<'a>(
        &self,
        x_view: impl Fn(usize) -> &'a [f64],
        k: usize,
        use_radius: bool,
        distances: &mut Vec<f64>,
        candidates: &mut Vec<usize>,
        out: &mut Vec<usize>,
    ) {
        let psi = self.psi();
        candidates.clear();
        candidates.extend(0..psi);
        for (v, samples) in self.points.iter().enumerate() {
            let x = x_view(v);
            distances.clear();
            distances.extend((0..psi).map(|j| euclidean(x, samples.row(j))));
            let radii = &self.radii[v];
            candidates.retain(|&i| view_member(distances, radii, i, k, use_radius));
            if candidates.is_empty() {
                return;
            }
        }
        out.extend_from_slice(candidates);
    }
}

#[inline]
fn view_member(distances: &[f64], radii: &[f64], i: usize, k: usize, use_radius: bool) -> bool {
    (!use_radius || distances[i] <= radii[i]) && rank_of(distances, i) < k
}

/// Multi-view indicator of instance `x` (a row of `dataset`) for sample `i` of `member`.
pub fn f_multiview(
    dataset: &MultiViewDataset,
    x: usize,
    i: usize,
    member: &SampleSet,
    params: &SconeParams,
) -> Result<bool> {
    Ok(embed_phi(dataset, x, member, params)?.column(i))
}

/// Full `V × psi` indicator matrix of instance `x` against `member`.
pub fn embed_phi(
    dataset: &MultiViewDataset,
    x: usize,
    member: &SampleSet,
    params: &SconeParams,
) -> Result<BinaryEmbedding> {
    let n = dataset.instance_count();
    if x >= n {
        return Err(Error::IndexOutOfRange { index: x, n });
    }
    let prepared = PreparedMember::new(member, dataset)?;
    let k = params.effective_k();
    let bits = (0..dataset.view_count())
        .map(|v| prepared.view_row(v, dataset.view(v).row(x), k, params.uses_radius()))
        .collect();
    Ok(BinaryEmbedding { bits })
}
