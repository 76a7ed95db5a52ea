//! Shared data types: datasets, parameters, fitted ensembles, scores and labels.

use std::fmt;

use crate::error::{Error, Result};

/// Dense row-major `rows × dim` matrix holding one view of a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct ViewMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl ViewMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::InconsistentDataset(format!(
                "view buffer holds {} values, expected {rows} x {dim}",
                data.len()
            )));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InconsistentDataset(format!(
                "row {bad} has {} features, expected {dim}",
                rows[bad].len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            dim,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Gathers the given rows into a new contiguous matrix.
    pub fn select_rows(&self, indices: &[usize]) -> ViewMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        ViewMatrix {
            rows: indices.len(),
            dim: self.dim,
            data,
        }
    }

    /// Per-column `(min, max)`.
    pub fn column_ranges(&self) -> Vec<(f64, f64)> {
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for i in 0..self.rows {
            for (r, &x) in ranges.iter_mut().zip(self.row(i)) {
                r.0 = r.0.min(x);
                r.1 = r.1.max(x);
            }
        }
        ranges
    }
}

/// `N` aligned instances observed through `V` views.
///
/// Row `i` of every view describes the same underlying instance.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<ViewMatrix>,
}

impl MultiViewDataset {
    pub fn new(views: Vec<ViewMatrix>) -> Result<Self> {
        let first = views.first().ok_or(Error::EmptyDataset)?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        for (v, view) in views.iter().enumerate() {
            if view.rows() != n {
                return Err(Error::InconsistentDataset(format!(
                    "view {v} has {} rows, view 0 has {n}",
                    view.rows()
                )));
            }
            if view.dim() == 0 {
                return Err(Error::EmptyDataset);
            }
            if let Some(pos) = view.as_slice().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteValue {
                    location: format!(
                        "view {v}, row {}, column {}",
                        pos / view.dim(),
                        pos % view.dim()
                    ),
                });
            }
        }
        Ok(Self { views })
    }

    pub fn instance_count(&self) -> usize {
        self.views[0].rows()
    }

    pub fn view_count(&self) -> usize {
        self.views.len()
    }

    pub fn view(&self, v: usize) -> &ViewMatrix {
        &self.views[v]
    }

    pub fn views(&self) -> &[ViewMatrix] {
        &self.views
    }

    pub fn dims(&self) -> Vec<usize> {
        self.views.iter().map(ViewMatrix::dim).collect()
    }

    pub(crate) fn views_mut(&mut self) -> &mut [ViewMatrix] {
        &mut self.views
    }

    /// Rescales every feature of every view to `[0, 1]`; constant features map to 0.
    pub fn min_max_normalized(&self) -> MultiViewDataset {
        let views = self
            .views
            .iter()
            .map(|view| {
                let ranges = view.column_ranges();
                let mut out = view.clone();
                for i in 0..out.rows() {
                    for (x, &(lo, hi)) in out.row_mut(i).iter_mut().zip(&ranges) {
                        *x = if hi > lo { (*x - lo) / (hi - lo) } else { 0.0 };
                    }
                }
                out
            })
            .collect();
        MultiViewDataset { views }
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut hash = Fnv1a::new();
        for view in &self.views {
            hash.write(&(view.rows() as u64).to_le_bytes());
            hash.write(&(view.dim() as u64).to_le_bytes());
            for x in view.as_slice() {
                hash.write(&x.to_bits().to_le_bytes());
            }
        }
        Fingerprint {
            instance_count: self.instance_count(),
            dims: self.dims(),
            checksum: hash.finish(),
        }
    }
}

struct Fnv1a(u64);

impl Fnv1a {
    fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Identifies the dataset a model was fitted on: shape plus a 64-bit content checksum.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub instance_count: usize,
    pub dims: Vec<usize>,
    pub checksum: u64,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        write!(
            f,
            "n={} dims={} checksum={:016x}",
            self.instance_count,
            dims.join(","),
            self.checksum
        )
    }
}

/// How per-view membership of an instance in a sample's neighborhood is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Adaptive-radius sphere intersected with the k nearest samples.
    Spherical,
    /// Nearest-sample cell, no radius.
    Voronoi,
    /// `Spherical` with k fixed to 1.
    Spherical1nn,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Spherical, Variant::Spherical1nn, Variant::Voronoi];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Spherical => "spherical",
            Variant::Voronoi => "voronoi",
            Variant::Spherical1nn => "spherical-1nn",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "spherical" => Ok(Variant::Spherical),
            "voronoi" | "vd" => Ok(Variant::Voronoi),
            "spherical-1nn" | "1nn" => Ok(Variant::Spherical1nn),
            other => Err(Error::Usage(format!("unknown variant '{other}'"))),
        }
    }
}

/// Ensemble parameters: subsample size `psi`, neighbor count `k`, ensemble size `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SconeParams {
    pub psi: usize,
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for SconeParams {
    fn default() -> Self {
        Self {
            psi: 8,
            k: 3,
            t: 200,
            seed: 0,
            variant: Variant::Spherical,
        }
    }
}

impl SconeParams {
    pub fn new(psi: usize, k: usize, t: usize, seed: u64) -> Self {
        Self {
            psi,
            k,
            t,
            seed,
            variant: Variant::Spherical,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// The k actually used for neighbor selection.
    pub fn effective_k(&self) -> usize {
        match self.variant {
            Variant::Spherical => self.k,
            Variant::Spherical1nn | Variant::Voronoi => 1,
        }
    }

    /// Whether membership also requires lying inside the sample's radius.
    pub fn uses_radius(&self) -> bool {
        self.variant != Variant::Voronoi
    }

    pub fn validate(&self, dataset: &MultiViewDataset) -> Result<()> {
        validate_params(self, dataset.instance_count())
    }
}

/// Checks the parameter bounds against a dataset of `n` instances.
pub fn validate_params(params: &SconeParams, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if params.psi < 2 {
        return Err(Error::PsiTooSmall { psi: params.psi });
    }
    if params.psi > n {
        return Err(Error::PsiExceedsN { psi: params.psi, n });
    }
    if params.k == 0 {
        return Err(Error::KZero);
    }
    if params.k > params.psi {
        return Err(Error::KExceedsPsi {
            k: params.k,
            psi: params.psi,
        });
    }
    if params.t == 0 {
        return Err(Error::EnsembleSizeZero);
    }
    Ok(())
}

/// One ensemble member: `psi` distinct instance indices plus their per-view radii.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub indices: Vec<usize>,
    /// `radii[v][i]` is the radius of sample `i` in view `v`.
    pub radii: Vec<Vec<f64>>,
}

impl SampleSet {
    pub fn psi(&self) -> usize {
        self.indices.len()
    }

    pub(crate) fn check_against(&self, dataset: &MultiViewDataset) -> Result<()> {
        let n = dataset.instance_count();
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        if self.radii.len() != dataset.view_count()
            || self.radii.iter().any(|r| r.len() != self.indices.len())
        {
            return Err(Error::InconsistentDataset(
                "sample radii do not match the dataset's views".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted ensemble of `t` sample sets.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleModel {
    pub params: SconeParams,
    pub members: Vec<SampleSet>,
    pub fingerprint: Fingerprint,
}

impl EnsembleModel {
    pub fn check_dataset(&self, dataset: &MultiViewDataset) -> Result<()> {
        let actual = dataset.fingerprint();
        if actual != self.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.fingerprint.to_string(),
                actual: actual.to_string(),
            });
        }
        Ok(())
    }
}

/// Per-instance consistency `C̄ ∈ [0, 1]`, stored as exact hit counts over `psi · t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    counts: Vec<u64>,
    denominator: u64,
}

impl ScoreVector {
    pub fn from_counts(counts: Vec<u64>, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Invariant("score denominator is zero".into()));
        }
        if let Some(c) = counts.iter().find(|&&c| c > denominator) {
            return Err(Error::Invariant(format!("count {c} exceeds {denominator}")));
        }
        Ok(Self {
            counts,
            denominator,
        })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of `(member, sample)` pairs with `F = 1` per instance.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `psi · t`.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn consistency(&self) -> Vec<f64> {
        let d = self.denominator as f64;
        self.counts.iter().map(|&c| c as f64 / d).collect()
    }

    /// `1 − C̄`; higher is more anomalous.
    pub fn anomaly_scores(&self) -> Vec<f64> {
        anomaly_scores(&self.consistency())
    }
}

/// Turns consistency scores into anomaly scores (`1 − C̄`).
pub fn anomaly_scores(consistency: &[f64]) -> Vec<f64> {
    consistency.iter().map(|c| 1.0 - c).collect()
}

/// Ground-truth instance type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Normal,
    Attribute,
    Class,
    ClassAttribute,
}

impl Label {
    pub const ANOMALY_TYPES: [Label; 3] = [Label::Attribute, Label::Class, Label::ClassAttribute];

    pub fn code(self) -> u8 {
        match self {
            Label::Normal => 0,
            Label::Attribute => 1,
            Label::Class => 2,
            Label::ClassAttribute => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Label> {
        match code {
            0 => Some(Label::Normal),
            1 => Some(Label::Attribute),
            2 => Some(Label::Class),
            3 => Some(Label::ClassAttribute),
            _ => None,
        }
    }

    pub fn is_anomaly(self) -> bool {
        self != Label::Normal
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Normal => "normal",
            Label::Attribute => "attribute",
            Label::Class => "class",
            Label::ClassAttribute => "class-attribute",
        }
    }
}

pub type LabelVector = Vec<Label>;

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(n: usize) -> MultiViewDataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, 0.5]).collect();
        MultiViewDataset::new(vec![ViewMatrix::from_rows(&rows).unwrap()]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_params(&SconeParams::new(8, 3, 200, 0), 1000).is_ok());
        assert!(matches!(
            validate_params(&SconeParams::new(1, 1, 1, 0), 100),
            Err(Error::PsiTooSmall { psi: 1 })
        ));
        assert!(matches!(
            validate_params(&SconeParams::new(4, 5, 1, 0), 100),
            Err(Error::KExceedsPsi { k: 5, psi: 4 })
        ));
        assert!(matches!(
            validate_params(&SconeParams::new(200, 3, 1, 0), 100),
            Err(Error::PsiExceedsN { .. })
        ));
        assert!(matches!(
            validate_params(&SconeParams::new(2, 1, 1, 0), 0),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            validate_params(&SconeParams::new(4, 2, 0, 0), 10),
            Err(Error::EnsembleSizeZero)
        ));
    }

    #[test]
    fn one_nn_variant_forces_k() {
        let p = SconeParams::new(8, 5, 10, 0).with_variant(Variant::Spherical1nn);
        assert_eq!(p.effective_k(), 1);
        assert!(p.uses_radius());
        assert!(!p.with_variant(Variant::Voronoi).uses_radius());
    }

    #[test]
    fn rejects_ragged_and_non_finite_views() {
        let a = ViewMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let b = ViewMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(matches!(
            MultiViewDataset::new(vec![a.clone(), b]),
            Err(Error::InconsistentDataset(_))
        ));
        let c = ViewMatrix::from_rows(&[vec![0.0], vec![f64::NAN]]).unwrap();
        assert!(matches!(
            MultiViewDataset::new(vec![a, c]),
            Err(Error::NonFiniteValue { .. })
        ));
        assert!(matches!(
            MultiViewDataset::new(vec![]),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = dataset(5);
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.views_mut()[0].row_mut(3)[1] = 0.25;
        assert_ne!(a.fingerprint().checksum, b.fingerprint().checksum);
        assert_eq!(a.fingerprint().dims, vec![2]);
    }

    #[test]
    fn anomaly_score_orientation() {
        assert_eq!(anomaly_scores(&[1.0, 0.0, 0.25]), vec![0.0, 1.0, 0.75]);
    }

    #[test]
    fn normalization_maps_to_unit_range() {
        let d = dataset(5).min_max_normalized();
        assert_eq!(d.view(0).row(4), &[1.0, 0.0]);
        assert_eq!(d.view(0).row(0), &[0.0, 0.0]);
    }

    #[test]
    fn label_codes_round_trip() {
        for code in 0..4 {
            assert_eq!(Label::from_code(code).unwrap().code(), code);
        }
        assert!(Label::from_code(4).is_none());
    }
}
