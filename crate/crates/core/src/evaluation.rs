//! AUC with midrank ties, per-type AUC, ROC points and the runtime scaling harness.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::{Label, SconeParams};
use crate::scorer;
use crate::synthetic::{make_two_view_clusters, ClusterConfig};

/// `P(score(anomaly) > score(normal)) + ½ P(equal)`, via midranks.
pub fn auc(scores: &[f64], is_anomaly: &[bool]) -> Result<f64> {
    if scores.len() != is_anomaly.len() {
        return Err(Error::Usage(format!(
            "{} scores but {} labels",
            scores.len(),
            is_anomaly.len()
        )));
    }
    let positives = is_anomaly.iter().filter(|&&y| y).count();
    let negatives = scores.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // twice the rank sum keeps midranks integral
    let mut doubled_rank_sum: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // 1-based ranks start+1 ..= end, midrank (start + 1 + end) / 2
        let doubled_midrank = (start + 1 + end) as u128;
        let pos_in_group = order[start..end].iter().filter(|&&i| is_anomaly[i]).count() as u128;
        doubled_rank_sum += doubled_midrank * pos_in_group;
        start = end;
    }
    let p = positives as u128;
    // 2U = 2R - P(P+1)
    let doubled_u = doubled_rank_sum - p * (p + 1);
    Ok(doubled_u as f64 / (2 * positives * negatives) as f64)
}

/// One `(false positive rate, true positive rate)` point per distinct threshold,
/// starting at `(0, 0)`.
pub fn roc_points(scores: &[f64], is_anomaly: &[bool]) -> Result<Vec<(f64, f64)>> {
    let positives = is_anomaly.iter().filter(|&&y| y).count();
    let negatives = is_anomaly.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut idx = 0;
    while idx < order.len() {
        let threshold = scores[order[idx]];
        while idx < order.len() && scores[order[idx]] == threshold {
            if is_anomaly[order[idx]] {
                tp += 1;
            } else {
                fp += 1;
            }
            idx += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    Ok(points)
}

/// AUC of all anomalies against normals.
pub fn overall_auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    let y: Vec<bool> = labels.iter().map(|l| l.is_anomaly()).collect();
    auc(scores, &y)
}

/// AUC of each anomaly type against normals; types absent from `labels` are omitted.
pub fn per_type_auc(scores: &[f64], labels: &[Label]) -> BTreeMap<Label, f64> {
    let mut out = BTreeMap::new();
    for kind in Label::ANOMALY_TYPES {
        let (s, y): (Vec<f64>, Vec<bool>) = scores
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == kind || l == Label::Normal)
            .map(|(&s, &l)| (s, l == kind))
            .unzip();
        if let Ok(value) = auc(&s, &y) {
            out.insert(kind, value);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkRow {
    pub n: usize,
    pub median_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkTable {
    pub rows: Vec<BenchmarkRow>,
    /// Least-squares slope of `ln(time)` against `ln(n)`; absent for fewer than two sizes.
    pub slope: Option<f64>,
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Times `fit` + `score_dataset` for each dataset size.
///
/// `config.n_normal` is overridden by each size. Data generation is not timed.
pub fn runtime_benchmark(
    sizes: &[usize],
    params: &SconeParams,
    config: &ClusterConfig,
    repetitions: usize,
) -> Result<BenchmarkTable> {
    if repetitions < 3 {
        return Err(Error::Usage("repetitions must be at least 3".into()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage(
            "benchmark sizes must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut cfg = config.clone();
        cfg.n_normal = n;
        let data = make_two_view_clusters(&cfg, params.seed)?.dataset;
        let mut times = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let start = Instant::now();
            let model = scorer::fit(&data, params)?;
            let scores = scorer::score_dataset(&model, &data)?;
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(scores);
        }
        rows.push(BenchmarkRow {
            n,
            median_seconds: median(&mut times),
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.median_seconds))
        .collect();
    Ok(BenchmarkTable {
        slope: loglog_slope(&points),
        rows,
    })
}
