//! Spherical consistent-neighborhood ensembles (SCoNE) for multi-view anomaly detection.
//!
//! An ensemble of `t` random subsamples, each of `psi` instances, defines
//! adaptive-radius spheres in every view. An instance is scored by how often
//! it falls inside the *same* sample's sphere in all views at once; normal
//! instances do so often, anomalies of every type rarely.
//!
//! ```
//! use scone::{fit, score_dataset, MultiViewDataset, SconeParams, ViewMatrix};
//!
//! let v1: Vec<Vec<f64>> = (0..50).map(|i| vec![(i % 10) as f64, (i / 10) as f64]).collect();
//! let v2: Vec<Vec<f64>> = (0..50).map(|i| vec![(i / 10) as f64, (i % 10) as f64]).collect();
//! let data = MultiViewDataset::new(vec![
//!     ViewMatrix::from_rows(&v1).unwrap(),
//!     ViewMatrix::from_rows(&v2).unwrap(),
//! ])
//! .unwrap();
//! let model = fit(&data, &SconeParams::new(8, 3, 100, 42)).unwrap();
//! let scores = score_dataset(&model, &data).unwrap();
//! assert_eq!(scores.len(), 50);
//! ```

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod io;
pub mod model;
pub mod neighborhoods;
pub mod oracle;
pub mod scorer;
pub mod synthetic;

pub use error::{Error, Result};
pub use model::{
    anomaly_scores, validate_params, EnsembleModel, Fingerprint, Label, LabelVector,
    MultiViewDataset, SampleSet, SconeParams, ScoreVector, Variant, ViewMatrix,
};
pub use scorer::{co_membership_similarity, fit, fit_score, score_dataset, CoMembership};
