//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: score a generated two-view dataset, inspect
//! one ensemble member's spheres, and run the sparse-versus-dense membership
//! probe. Results are returned as JSON strings.

use std::fmt::Write;

use scone::evaluation::{overall_auc, per_type_auc};
use scone::experiments::density_probe;
use scone::synthetic::{synthetic_benchmark, AnomalyCounts, DensityMode, LabeledDataset};
use scone::{fit, score_dataset, EnsembleModel, Error, SconeParams, Variant};
use wasm_bindgen::prelude::*;

fn push_numbers(out: &mut String, values: impl IntoIterator<Item = f64>) {
    out.push('[');
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").unwrap();
    }
    out.push(']');
}

fn push_points(out: &mut String, data: &LabeledDataset) {
    out.push('[');
    for (v, view) in data.dataset.views().iter().enumerate() {
        if v > 0 {
            out.push(',');
        }
        push_numbers(out, view.as_slice().iter().copied());
    }
    out.push(']');
}

/// A generated dataset with its fitted ensemble.
pub struct Session {
    data: LabeledDataset,
    model: EnsembleModel,
    anomaly: Vec<f64>,
}

impl Session {
    pub fn new(
        mode: &str,
        seed: u64,
        psi: usize,
        k: usize,
        t: usize,
        variant: &str,
    ) -> Result<Self, Error> {
        let mode: DensityMode = mode.parse()?;
        let variant: Variant = variant.parse()?;
        let data = synthetic_benchmark(mode, AnomalyCounts::default(), seed)?;
        let params = SconeParams::new(psi, k, t, seed).with_variant(variant);
        let model = fit(&data.dataset, &params)?;
        let anomaly = score_dataset(&model, &data.dataset)?.anomaly_scores();
        Ok(Self {
            data,
            model,
            anomaly,
        })
    }

    /// `{"dims", "points": [view][x0, y0, x1, …], "labels", "anomaly", "auc", "per_type"}`.
    pub fn summary_json(&self) -> Result<String, Error> {
        let mut out = String::from("{\"dims\":");
        push_numbers(&mut out, self.data.dataset.dims().iter().map(|&d| d as f64));
        out.push_str(",\"points\":");
        push_points(&mut out, &self.data);
        out.push_str(",\"labels\":");
        push_numbers(
            &mut out,
            self.data.labels.iter().map(|l| f64::from(l.code())),
        );
        out.push_str(",\"anomaly\":");
        push_numbers(&mut out, self.anomaly.iter().copied());
        write!(
            out,
            ",\"auc\":{}",
            overall_auc(&self.anomaly, &self.data.labels)?
        )
        .unwrap();
        out.push_str(",\"per_type\":{");
        for (i, (label, auc)) in per_type_auc(&self.anomaly, &self.data.labels)
            .iter()
            .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            write!(out, "\"{}\":{auc}", label.name()).unwrap();
        }
        out.push_str("}}");
        Ok(out)
    }

    /// `{"indices", "radii": [view][…], "hits": [instance][sample]}` where `hits`
    /// lists, per instance, the samples whose spheres it falls in consistently.
    pub fn member_json(&self, member: usize) -> Result<String, Error> {
        let m = self
            .model
            .members
            .get(member)
            .ok_or(Error::IndexOutOfRange {
                index: member,
                n: self.model.members.len(),
            })?;
        let mut out = String::from("{\"indices\":");
        push_numbers(&mut out, m.indices.iter().map(|&i| i as f64));
        out.push_str(",\"radii\":[");
        for (v, r) in m.radii.iter().enumerate() {
            if v > 0 {
                out.push(',');
            }
            push_numbers(&mut out, r.iter().copied());
        }
        out.push_str("],\"hits\":[");
        for x in 0..self.data.dataset.instance_count() {
            if x > 0 {
                out.push(',');
            }
            let phi = self.model.embedding(&self.data.dataset, member, x)?;
            push_numbers(
                &mut out,
                (0..m.psi()).filter(|&i| phi.column(i)).map(|i| i as f64),
            );
        }
        out.push_str("]}");
        Ok(out)
    }

    pub fn member_count(&self) -> usize {
        self.model.members.len()
    }
}

/// `{"trials", "p_sparse", "p_dense", "p_value"}`.
pub fn probe_json(
    density_ratio: f64,
    psi: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<String, Error> {
    let e = density_probe(density_ratio, psi, k, trials, seed)?;
    Ok(format!(
        "{{\"trials\":{},\"p_sparse\":{},\"p_dense\":{},\"p_value\":{}}}",
        e.trials, e.p_sparse, e.p_dense, e.p_value
    ))
}

fn js(e: Error) -> JsError {
    JsError::new(&format!("{}: {e}", e.code()))
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(
        mode: &str,
        seed: u32,
        psi: usize,
        k: usize,
        t: usize,
        variant: &str,
    ) -> Result<Demo, JsError> {
        Session::new(mode, u64::from(seed), psi, k, t, variant)
            .map(|session| Demo { session })
            .map_err(js)
    }

    pub fn summary(&self) -> Result<String, JsError> {
        self.session.summary_json().map_err(js)
    }

    pub fn member(&self, member: usize) -> Result<String, JsError> {
        self.session.member_json(member).map_err(js)
    }

    #[wasm_bindgen(js_name = memberCount)]
    pub fn member_count(&self) -> usize {
        self.session.member_count()
    }
}

#[wasm_bindgen(js_name = densityProbe)]
pub fn density_probe_js(
    density_ratio: f64,
    psi: usize,
    k: usize,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    probe_json(density_ratio, psi, k, trials, u64::from(seed)).map_err(js)
}
