//! Properties of the two-view benchmark fixture checked on a single draw.

use scone::evaluation::per_type_auc;
use scone::oracle::consistent_neighbors;
use scone::synthetic::{synthetic_benchmark, AnomalyCounts, DensityMode};
use scone::{fit_score, Label, SconeParams};

#[test]
fn class_anomalies_have_no_consistent_neighbors() {
    let d = synthetic_benchmark(DensityMode::Varied, AnomalyCounts::default(), 0).unwrap();
    let size = |i: usize| consistent_neighbors(&d.dataset, i, 50).unwrap().len();
    let class: Vec<usize> = d.indices_of(Label::Class).into_iter().map(size).collect();
    let normal: Vec<usize> = d
        .indices_of(Label::Normal)
        .into_iter()
        .step_by(10)
        .map(size)
        .collect();
    let class_mean = class.iter().sum::<usize>() as f64 / class.len() as f64;
    let normal_mean = normal.iter().sum::<usize>() as f64 / normal.len() as f64;
    // the set always contains the instance itself
    assert!(class.iter().all(|&c| c <= 2), "{class:?}");
    assert!(
        normal_mean >= 4.0 * class_mean,
        "{normal_mean} vs {class_mean}"
    );
}

#[test]
fn class_attribute_anomalies_score_below_normal_tail() {
    let d = synthetic_benchmark(DensityMode::Varied, AnomalyCounts::default(), 0).unwrap();
    let c = fit_score(&d.dataset, &SconeParams::new(8, 3, 200, 0))
        .unwrap()
        .consistency();
    let mut normal: Vec<f64> = d.indices_of(Label::Normal).iter().map(|&i| c[i]).collect();
    normal.sort_by(f64::total_cmp);
    let p5 = normal[normal.len() / 20];
    for i in d.indices_of(Label::ClassAttribute) {
        assert!(c[i] < p5, "instance {i}: {} >= {p5}", c[i]);
    }
}

#[test]
fn perfect_scorer_separates_every_type() {
    let d = synthetic_benchmark(DensityMode::Varied, AnomalyCounts::default(), 0).unwrap();
    let oracle: Vec<f64> = d
        .labels
        .iter()
        .map(|l| f64::from(u8::from(l.is_anomaly())))
        .collect();
    let m = per_type_auc(&oracle, &d.labels);
    assert_eq!(m.len(), 3);
    assert!(m.values().all(|&v| v == 1.0), "{m:?}");
}
