//! Synthetic multi-view data: Gaussian clusters driven by one latent
//! assignment shared across views, plus the three anomaly injectors and the
//! feature-split view constructor used for single-table datasets.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Label, LabelVector, MultiViewDataset, ViewMatrix};
use crate::scorer::stream_rng;

const SEP: f64 = 80.0;
const STREAM_CLUSTERS: u64 = 0x5c0e_0001;
const STREAM_ATTRIBUTE: u64 = 0x5c0e_0002;
const STREAM_CLASS: u64 = 0x5c0e_0003;
const STREAM_CLASS_ATTRIBUTE: u64 = 0x5c0e_0004;
const STREAM_SPLIT: u64 = 0x5c0e_0005;

/// A dataset with ground truth and, for generated data, the latent cluster of each row.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub dataset: MultiViewDataset,
    pub labels: LabelVector,
    pub clusters: Option<Vec<usize>>,
}

impl LabeledDataset {
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn indices_of(&self, label: Label) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DensityMode {
    Uniform,
    Varied,
}

impl std::str::FromStr for DensityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(DensityMode::Uniform),
            "varied" => Ok(DensityMode::Varied),
            other => Err(Error::Usage(format!("unknown density mode '{other}'"))),
        }
    }
}

/// Gaussian-cluster generator settings.
///
/// `centers[v][c]` and `stds[v][c]` give cluster `c`'s mean and standard
/// deviation in view `v`. Row `i` belongs to cluster `i % clusters`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    pub n_normal: usize,
    pub centers: Vec<Vec<Vec<f64>>>,
    pub stds: Vec<Vec<f64>>,
}

impl ClusterConfig {
    /// Three 2-D clusters per view with centers 80 apart.
    ///
    /// Varied mode uses standard deviations 0.3, 1.0 and 2.5, rotated in the
    /// second view so a cluster that is dense in one view is not dense in the
    /// other. Uniform mode uses 1.0 everywhere.
    pub fn two_view(mode: DensityMode, n_normal: usize) -> Self {
        Self::two_view_with_separation(mode, n_normal, SEP)
    }

    pub fn two_view_with_separation(mode: DensityMode, n_normal: usize, sep: f64) -> Self {
        let h = sep * 0.85;
        let centers = vec![
            vec![vec![0.0, 0.0], vec![sep, 0.0], vec![sep / 2.0, h]],
            vec![vec![0.0, sep], vec![h, sep / 2.0], vec![0.0, 0.0]],
        ];
        let stds = match mode {
            DensityMode::Uniform => vec![vec![1.0; 3], vec![1.0; 3]],
            DensityMode::Varied => vec![vec![0.3, 1.0, 2.5], vec![1.0, 2.5, 0.3]],
        };
        Self {
            n_normal,
            centers,
            stds,
        }
    }

    pub fn cluster_count(&self) -> usize {
        self.centers.first().map_or(0, Vec::len)
    }

    fn check(&self) -> Result<()> {
        let c = self.cluster_count();
        if self.centers.is_empty() || c == 0 {
            return Err(Error::BadConfig("no clusters".into()));
        }
        if self.stds.len() != self.centers.len() {
            return Err(Error::BadConfig(format!(
                "{} views of centers but {} views of stds",
                self.centers.len(),
                self.stds.len()
            )));
        }
        for (v, (centers, stds)) in self.centers.iter().zip(&self.stds).enumerate() {
            if centers.len() != c || stds.len() != c {
                return Err(Error::BadConfig(format!(
                    "view {v} has {} centers and {} stds, expected {c}",
                    centers.len(),
                    stds.len()
                )));
            }
            let dim = centers[0].len();
            if dim == 0 || centers.iter().any(|m| m.len() != dim) {
                return Err(Error::BadConfig(format!(
                    "view {v} centers disagree on dimension"
                )));
            }
            if stds.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                return Err(Error::BadConfig(format!(
                    "view {v} has a negative or non-finite std"
                )));
            }
        }
        Ok(())
    }
}

/// Draws `config.n_normal` instances, all labelled normal.
pub fn make_two_view_clusters(config: &ClusterConfig, seed: u64) -> Result<LabeledDataset> {
    config.check()?;
    let n = config.n_normal;
    if n == 0 {
        return Err(Error::BadConfig("n_normal must be positive".into()));
    }
    let c = config.cluster_count();
    let clusters: Vec<usize> = (0..n).map(|i| i % c).collect();
    let mut rng = stream_rng(seed, STREAM_CLUSTERS);
    let mut views = Vec::with_capacity(config.centers.len());
    for (centers, stds) in config.centers.iter().zip(&config.stds) {
        let dim = centers[0].len();
        let mut data = Vec::with_capacity(n * dim);
        for &cluster in &clusters {
            for &mean in &centers[cluster] {
                let z: f64 = rng.sample(StandardNormal);
                data.push(mean + stds[cluster] * z);
            }
        }
        views.push(ViewMatrix::new(n, dim, data)?);
    }
    Ok(LabeledDataset {
        dataset: MultiViewDataset::new(views)?,
        labels: vec![Label::Normal; n],
        clusters: Some(clusters),
    })
}

/// Instance counts for the full synthetic benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnomalyCounts {
    pub normal: usize,
    pub attribute: usize,
    pub class: usize,
    pub class_attribute: usize,
}

impl Default for AnomalyCounts {
    fn default() -> Self {
        Self {
            normal: 970,
            attribute: 10,
            class: 10,
            class_attribute: 10,
        }
    }
}

impl AnomalyCounts {
    pub fn total(&self) -> usize {
        self.normal + self.attribute + self.class + self.class_attribute
    }
}

/// Two-view cluster data with all three anomaly types injected.
///
/// Generates `counts.total()` cluster rows, then turns `attribute` of them
/// into attribute anomalies, `class_attribute / 2` pairs into
/// class-attribute anomalies and `class / 2` pairs into class anomalies.
pub fn synthetic_benchmark(
    mode: DensityMode,
    counts: AnomalyCounts,
    seed: u64,
) -> Result<LabeledDataset> {
    let mut config = ClusterConfig::two_view(mode, 0);
    config.n_normal = counts.total();
    synthetic_benchmark_from(&config, counts, seed)
}

/// As [`synthetic_benchmark`] with explicit cluster settings; `config.n_normal` is ignored.
pub fn synthetic_benchmark_from(
    config: &ClusterConfig,
    counts: AnomalyCounts,
    seed: u64,
) -> Result<LabeledDataset> {
    if !counts.class.is_multiple_of(2) || !counts.class_attribute.is_multiple_of(2) {
        return Err(Error::BadConfig(
            "class and class-attribute counts must be even (they come in pairs)".into(),
        ));
    }
    let mut config = config.clone();
    config.n_normal = counts.total();
    let base = make_two_view_clusters(&config, seed)?;
    let (data, _) = inject_attribute_anomalies(&base, counts.attribute, seed)?;
    let (data, _) = inject_class_attribute_anomalies(&data, counts.class_attribute / 2, seed)?;
    let (data, _) = inject_class_anomalies(&data, counts.class / 2, seed)?;
    Ok(data)
}

fn uniform_row(rng: &mut ChaCha8Rng, ranges: &[(f64, f64)], out: &mut [f64]) {
    for (x, &(lo, hi)) in out.iter_mut().zip(ranges) {
        let u: f64 = rng.random();
        *x = lo + (hi - lo) * u;
    }
}

fn pick_normals(data: &LabeledDataset, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    let normals = data.indices_of(Label::Normal);
    if count > normals.len() {
        return Err(Error::CountExceedsN {
            count,
            available: normals.len(),
        });
    }
    Ok(rand::seq::index::sample(rng, normals.len(), count)
        .into_iter()
        .map(|i| normals[i])
        .collect())
}

/// Replaces every view of `count` normal instances with uniform draws over
/// each feature's observed range.
pub fn inject_attribute_anomalies(
    data: &LabeledDataset,
    count: usize,
    seed: u64,
) -> Result<(LabeledDataset, Vec<usize>)> {
    let mut rng = stream_rng(seed, STREAM_ATTRIBUTE);
    let chosen = pick_normals(data, count, &mut rng)?;
    let mut out = data.clone();
    let ranges: Vec<Vec<(f64, f64)>> = data
        .dataset
        .views()
        .iter()
        .map(ViewMatrix::column_ranges)
        .collect();
    for &i in &chosen {
        for (view, ranges) in out.dataset.views_mut().iter_mut().zip(&ranges) {
            uniform_row(&mut rng, ranges, view.row_mut(i));
        }
        out.labels[i] = Label::Attribute;
    }
    Ok((out, chosen))
}

/// Pairs of normal instances from different latent clusters, when clusters are known.
fn pick_pairs(
    data: &LabeledDataset,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    if data.dataset.view_count() < 2 {
        return Err(Error::SingleViewDataset);
    }
    let mut normals = data.indices_of(Label::Normal);
    let shortfall = || Error::PairsExceedN {
        pairs,
        needed: 2 * pairs,
        available: data.count(Label::Normal),
    };
    if 2 * pairs > normals.len() {
        return Err(shortfall());
    }
    normals.shuffle(rng);
    let mut used = vec![false; normals.len()];
    let mut out = Vec::with_capacity(pairs);
    for a in 0..normals.len() {
        if out.len() == pairs {
            break;
        }
        if used[a] {
            continue;
        }
        let partner = (a + 1..normals.len()).find(|&b| {
            !used[b]
                && data
                    .clusters
                    .as_ref()
                    .is_none_or(|c| c[normals[a]] != c[normals[b]])
        });
        if let Some(b) = partner {
            used[a] = true;
            used[b] = true;
            out.push((normals[a], normals[b]));
        }
    }
    if out.len() < pairs {
        return Err(shortfall());
    }
    Ok(out)
}

/// A uniformly chosen nonempty proper subset of `0..views`.
fn proper_view_subset(views: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    loop {
        let mask: Vec<bool> = (0..views).map(|_| rng.random()).collect();
        let ones = mask.iter().filter(|&&b| b).count();
        if ones > 0 && ones < views {
            return mask;
        }
    }
}

fn swap_rows(view: &mut ViewMatrix, a: usize, b: usize) {
    let ra = view.row(a).to_vec();
    let rb = view.row(b).to_vec();
    view.row_mut(a).copy_from_slice(&rb);
    view.row_mut(b).copy_from_slice(&ra);
}

/// Swaps features between instance pairs in a nonempty proper subset of views.
pub fn inject_class_anomalies(
    data: &LabeledDataset,
    pair_count: usize,
    seed: u64,
) -> Result<(LabeledDataset, Vec<usize>)> {
    let mut rng = stream_rng(seed, STREAM_CLASS);
    let pairs = pick_pairs(data, pair_count, &mut rng)?;
    let mut out = data.clone();
    let mut changed = Vec::with_capacity(2 * pairs.len());
    for (a, b) in pairs {
        let mask = proper_view_subset(out.dataset.view_count(), &mut rng);
        swap_views(&mut out, a, b, &mask);
        out.labels[a] = Label::Class;
        out.labels[b] = Label::Class;
        changed.extend([a, b]);
    }
    Ok((out, changed))
}

/// Swaps instance pairs in a nonempty proper subset of views, then replaces
/// their features in the remaining views with uniform draws.
pub fn inject_class_attribute_anomalies(
    data: &LabeledDataset,
    pair_count: usize,
    seed: u64,
) -> Result<(LabeledDataset, Vec<usize>)> {
    let mut rng = stream_rng(seed, STREAM_CLASS_ATTRIBUTE);
    let pairs = pick_pairs(data, pair_count, &mut rng)?;
    let ranges: Vec<Vec<(f64, f64)>> = data
        .dataset
        .views()
        .iter()
        .map(ViewMatrix::column_ranges)
        .collect();
    let mut out = data.clone();
    let mut changed = Vec::with_capacity(2 * pairs.len());
    for (a, b) in pairs {
        let mask = proper_view_subset(out.dataset.view_count(), &mut rng);
        swap_views(&mut out, a, b, &mask);
        for (v, view) in out.dataset.views_mut().iter_mut().enumerate() {
            if !mask[v] {
                uniform_row(&mut rng, &ranges[v], view.row_mut(a));
                uniform_row(&mut rng, &ranges[v], view.row_mut(b));
            }
        }
        out.labels[a] = Label::ClassAttribute;
        out.labels[b] = Label::ClassAttribute;
        changed.extend([a, b]);
    }
    Ok((out, changed))
}

fn swap_views(data: &mut LabeledDataset, a: usize, b: usize, mask: &[bool]) {
    for (view, &swap) in data.dataset.views_mut().iter_mut().zip(mask) {
        if swap {
            swap_rows(view, a, b);
        }
    }
}

/// Column indices of each view after a seeded shuffle, split into `views`
/// consecutive chunks whose sizes differ by at most one.
pub fn feature_partition(features: usize, views: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if views == 0 || features < views {
        return Err(Error::TooFewFeatures { features, views });
    }
    let mut columns: Vec<usize> = (0..features).collect();
    columns.shuffle(&mut stream_rng(seed, STREAM_SPLIT));
    let (base, extra) = (features / views, features % views);
    let mut out = Vec::with_capacity(views);
    let mut start = 0;
    for v in 0..views {
        let len = base + usize::from(v < extra);
        out.push(columns[start..start + len].to_vec());
        start += len;
    }
    Ok(out)
}

/// Splits a single-view table into `views` views by feature subsets.
pub fn split_views(matrix: &ViewMatrix, views: usize, seed: u64) -> Result<MultiViewDataset> {
    let partition = feature_partition(matrix.dim(), views, seed)?;
    let out = partition
        .iter()
        .map(|cols| {
            let mut data = Vec::with_capacity(matrix.rows() * cols.len());
            for i in 0..matrix.rows() {
                let row = matrix.row(i);
                data.extend(cols.iter().map(|&c| row[c]));
            }
            ViewMatrix::new(matrix.rows(), cols.len(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    MultiViewDataset::new(out)
}
