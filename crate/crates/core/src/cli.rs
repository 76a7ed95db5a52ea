//! The `scone` command-line tool.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 internal invariant
//! violation. Failures print one line, `error[CODE]: message`, on stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::evaluation::{overall_auc, per_type_auc, roc_points, runtime_benchmark};
use crate::experiments::{self, mean};
use crate::io::{self, load_manifest, LoadedDataset};
use crate::model::{Label, SconeParams, Variant};
use crate::scorer::{fit, score_dataset, with_threads};
use crate::synthetic::{synthetic_benchmark, AnomalyCounts, ClusterConfig, DensityMode};

#[derive(Parser, Debug)]
#[command(
    name = "scone",
    version,
    about = "Multi-view anomaly detection with spherical consistent neighborhoods"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SCONE_THREADS")]
    threads: Option<usize>,
    /// Output layout for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Aligned columns.
    Table,
    /// Comma-separated rows with a header, full precision.
    Rows,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the two-view synthetic benchmark (features, labels, manifest).
    Generate(GenerateArgs),
    /// Fit an ensemble on a dataset and write its scores.
    FitScore(FitScoreArgs),
    /// Score a dataset with a saved model.
    Score(ScoreArgs),
    /// Overall and per-type AUC of a scores file.
    Evaluate(EvaluateArgs),
    /// Compare the spherical, 1-NN and Voronoi variants.
    Ablate(AblateArgs),
    /// Runtime against dataset size, with the log-log slope.
    Benchmark(BenchmarkArgs),
    /// Share of consistent neighbors recovered by co-membership similarity.
    Proportion(ProportionArgs),
    /// Cross-view sphere populations and the density membership probe.
    Theorems(TheoremArgs),
}

/// Seed list: `3`, `1,5,9` or a half-open range `0..20`.
#[derive(Clone, Debug, PartialEq)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> std::result::Result<Seeds, String> {
    let bad = |_| format!("invalid seed list '{s}'");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(bad)?,
            b.trim().parse().map_err(bad)?,
        );
        if a >= b {
            return Err(format!("empty seed range '{s}'"));
        }
        return Ok(Seeds((a..b).collect()));
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(bad))
        .collect::<std::result::Result<_, _>>()
        .map(Seeds)
}

fn parse_sizes(s: &str) -> std::result::Result<Sizes, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| format!("invalid size list '{s}'"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Sizes)
}

#[derive(Clone, Debug, PartialEq)]
struct Sizes(Vec<usize>);

fn parse_mode(s: &str) -> std::result::Result<DensityMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Sample size per ensemble member.
    #[arg(long, default_value_t = 8)]
    psi: usize,
    /// Nearest samples an instance may belong to.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Ensemble size.
    #[arg(long, default_value_t = 200)]
    t: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// spherical, spherical-1nn or voronoi.
    #[arg(long, default_value = "spherical", value_parser = parse_variant)]
    variant: Variant,
}

impl ModelArgs {
    fn params(&self) -> SconeParams {
        SconeParams::new(self.psi, self.k, self.t, self.seed).with_variant(self.variant)
    }
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long, default_value_t = 970)]
    normal: usize,
    #[arg(long, default_value_t = 10)]
    attribute: usize,
    /// Must be even.
    #[arg(long, default_value_t = 10)]
    class: usize,
    /// Must be even.
    #[arg(long, default_value_t = 10)]
    class_attribute: usize,
}

impl CountArgs {
    fn counts(&self) -> AnomalyCounts {
        AnomalyCounts {
            normal: self.normal,
            attribute: self.attribute,
            class: self.class,
            class_attribute: self.class_attribute,
        }
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// uniform or varied.
    #[arg(long, default_value = "varied", value_parser = parse_mode)]
    mode: DensityMode,
    #[arg(long = "seed", default_value = "0", value_parser = parse_seeds)]
    seeds: Seeds,
    #[command(flatten)]
    counts: CountArgs,
    /// Output directory; with several seeds each gets a `seed-<n>` subdirectory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FitScoreArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// Scores file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also save the fitted model here.
    #[arg(long = "model")]
    model_out: Option<PathBuf>,
    /// Min-max rescale every feature before fitting.
    #[arg(long)]
    normalize: bool,
    /// Pick psi and k by labelled AUC over the search grid.
    #[arg(long)]
    grid: bool,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Must match the setting used when fitting.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    scores: PathBuf,
    /// Labels file; defaults to the label column of the scores file.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Write ROC points (fpr,tpr) here.
    #[arg(long)]
    roc: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AblateArgs {
    /// Labelled dataset; without it the synthetic benchmark is generated per seed.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value = "varied", value_parser = parse_mode)]
    mode: DensityMode,
    #[arg(long, default_value = "0..20", value_parser = parse_seeds)]
    seeds: Seeds,
    #[arg(long, default_value_t = 8)]
    psi: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    t: usize,
    /// Model seed when a manifest is given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[arg(long, default_value = "10000,30000,100000", value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value = "uniform", value_parser = parse_mode)]
    mode: DensityMode,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct ProportionArgs {
    #[arg(long, default_value = "varied", value_parser = parse_mode)]
    mode: DensityMode,
    #[command(flatten)]
    model: ModelArgs,
    /// Neighborhood size of the consistent-neighbor oracle.
    #[arg(long, default_value_t = 200)]
    k_oracle: usize,
    /// Number of normal instances probed.
    #[arg(long, default_value_t = 20)]
    normals: usize,
    /// Most-similar instances compared against; defaults to `--k-oracle`.
    #[arg(long)]
    k_repr: Option<usize>,
}

#[derive(Args, Debug)]
struct TheoremArgs {
    #[arg(long, default_value = "varied", value_parser = parse_mode)]
    mode: DensityMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    psi: usize,
    /// Subsamples averaged in the sphere-population comparison.
    #[arg(long, default_value_t = 50)]
    draws: usize,
    /// Allowed relative difference between views.
    #[arg(long, default_value_t = 0.15)]
    tolerance: f64,
    /// Monte Carlo trials of the membership probe.
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    #[arg(long, default_value_t = 10.0)]
    density_ratio: f64,
    #[arg(long, default_value_t = 1)]
    probe_k: usize,
    /// Significance level of the probe.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
}

/// A table printed either aligned or as comma-separated rows.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Text(String),
    Real(f64),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl Cell {
    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Cell::Text(s), _) => s.clone(),
            (Cell::Real(x), Format::Rows) => format!("{x}"),
            (Cell::Real(x), Format::Table) => format!("{x:.4}"),
        }
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(Cell::from($x)),*] };
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.render(format)).collect())
            .collect();
        let mut out = String::new();
        match format {
            Format::Rows => {
                out.push_str(&self.headers.join(","));
                out.push('\n');
                for r in &cells {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
            }
            Format::Table => {
                let widths: Vec<usize> = (0..self.headers.len())
                    .map(|c| {
                        cells
                            .iter()
                            .map(|r| r[c].len())
                            .chain([self.headers[c].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |fields: Vec<&str>| {
                    let mut s = String::new();
                    for (c, f) in fields.iter().enumerate() {
                        if c > 0 {
                            s.push_str("  ");
                        }
                        write!(s, "{f:<w$}", w = widths[c]).unwrap();
                    }
                    s.trim_end().to_string() + "\n"
                };
                out.push_str(&line(self.headers.clone()));
                for r in &cells {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
            }
        }
        out
    }
}

struct Ctx<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn print(&mut self, table: &Table) -> Result<()> {
        self.out.write_all(table.render(self.format).as_bytes())?;
        Ok(())
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}")?;
        Ok(())
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let format = cli.format;
    let command = cli.command;
    let result = with_threads(cli.threads, move || dispatch(command, format))
        .and_then(|r| r)
        .and_then(|text| out.write_all(text.as_bytes()).map_err(Error::from));
    let _ = out.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, format: Format) -> Result<String> {
    let mut buffer = Vec::new();
    let mut ctx = Ctx {
        format,
        out: &mut buffer,
    };
    match command {
        Command::Generate(a) => generate(&mut ctx, a),
        Command::FitScore(a) => fit_score(&mut ctx, a),
        Command::Score(a) => score(&mut ctx, a),
        Command::Evaluate(a) => evaluate(&mut ctx, a),
        Command::Ablate(a) => ablate(&mut ctx, a),
        Command::Benchmark(a) => benchmark(&mut ctx, a),
        Command::Proportion(a) => proportion(&mut ctx, a),
        Command::Theorems(a) => theorems(&mut ctx, a),
    }?;
    String::from_utf8(buffer).map_err(|e| Error::Invariant(e.to_string()))
}

fn mode_name(mode: DensityMode) -> &'static str {
    match mode {
        DensityMode::Uniform => "uniform",
        DensityMode::Varied => "varied",
    }
}

fn generate(ctx: &mut Ctx, a: GenerateArgs) -> Result<()> {
    let mut table = Table::new(&["seed", "instances", "anomalies", "manifest"]);
    let several = a.seeds.0.len() > 1;
    for &seed in &a.seeds.0 {
        let data = synthetic_benchmark(a.mode, a.counts.counts(), seed)?;
        let dir = if several {
            a.out.join(format!("seed-{seed}"))
        } else {
            a.out.clone()
        };
        let name = format!("synthetic-{}-seed-{seed}", mode_name(a.mode));
        let manifest = io::save_dataset(&dir, Some(&name), &data.dataset, Some(&data.labels))?;
        let anomalies = data.labels.iter().filter(|l| l.is_anomaly()).count();
        table.push(row![
            seed,
            data.labels.len(),
            anomalies,
            manifest.display().to_string()
        ]);
    }
    ctx.print(&table)
}

fn load(manifest: &Path, normalize: bool) -> Result<LoadedDataset> {
    let mut loaded = load_manifest(manifest)?;
    if normalize {
        loaded.dataset = loaded.dataset.min_max_normalized();
    }
    Ok(loaded)
}

fn fit_score(ctx: &mut Ctx, a: FitScoreArgs) -> Result<()> {
    let loaded = load(&a.manifest, a.normalize)?;
    let mut params = a.model.params();
    if a.grid {
        let labels = loaded
            .labels
            .as_deref()
            .ok_or_else(|| Error::Usage("--grid needs a labelled dataset".into()))?;
        let grid = experiments::grid_search(&loaded.dataset, labels, &params)?;
        let mut table = Table::new(&["psi", "k", "auc"]);
        for &(psi, k, auc) in &grid.evaluated {
            table.push(row![psi, k, auc]);
        }
        ctx.print(&table)?;
        params = grid.best;
    }
    let model = fit(&loaded.dataset, &params)?;
    let scores = score_dataset(&model, &loaded.dataset)?;
    io::save_scores(&a.out, &scores, loaded.labels.as_deref())?;
    if let Some(path) = &a.model_out {
        io::save_model(path, &model)?;
    }
    let auc_cell = match &loaded.labels {
        Some(labels) => Cell::Real(overall_auc(&scores.anomaly_scores(), labels)?),
        None => Cell::from("-"),
    };
    let mut table = Table::new(&[
        "instances",
        "views",
        "psi",
        "k",
        "t",
        "seed",
        "variant",
        "auc",
    ]);
    table.push(vec![
        Cell::from(loaded.dataset.instance_count()),
        Cell::from(loaded.dataset.view_count()),
        Cell::from(params.psi),
        Cell::from(params.k),
        Cell::from(params.t),
        Cell::from(params.seed),
        Cell::from(params.variant.name()),
        auc_cell,
    ]);
    ctx.print(&table)
}

fn score(ctx: &mut Ctx, a: ScoreArgs) -> Result<()> {
    let model = io::load_model(&a.model)?;
    let loaded = load(&a.manifest, a.normalize)?;
    let scores = score_dataset(&model, &loaded.dataset)?;
    io::save_scores(&a.out, &scores, loaded.labels.as_deref())?;
    ctx.line(&format!("scored {} instances", scores.len()))
}

fn evaluate(ctx: &mut Ctx, a: EvaluateArgs) -> Result<()> {
    let table_in = io::load_scores(&a.scores)?;
    let labels = match &a.labels {
        Some(path) => {
            let labels = io::read_labels(path)?;
            if labels.len() != table_in.anomaly.len() {
                return Err(Error::RowCountMismatch {
                    path: path.clone(),
                    expected: table_in.anomaly.len(),
                    found: labels.len(),
                });
            }
            labels
        }
        None => table_in
            .labels
            .clone()
            .ok_or_else(|| Error::Usage("scores file has no labels; pass --labels".into()))?,
    };
    let scores = &table_in.anomaly;
    let mut table = Table::new(&["type", "count", "auc"]);
    let positives = labels.iter().filter(|l| l.is_anomaly()).count();
    table.push(row!["overall", positives, overall_auc(scores, &labels)?]);
    let per_type = per_type_auc(scores, &labels);
    for kind in Label::ANOMALY_TYPES {
        let count = labels.iter().filter(|&&l| l == kind).count();
        match per_type.get(&kind) {
            Some(&v) => table.push(row![kind.name(), count, v]),
            None => table.push(row![kind.name(), count, "-"]),
        }
    }
    if let Some(path) = &a.roc {
        let y: Vec<bool> = labels.iter().map(|l| l.is_anomaly()).collect();
        let mut text = String::from("fpr,tpr\n");
        for (fpr, tpr) in roc_points(scores, &y)? {
            writeln!(text, "{fpr},{tpr}").unwrap();
        }
        std::fs::write(path, text)?;
    }
    ctx.print(&table)
}

fn ablate(ctx: &mut Ctx, a: AblateArgs) -> Result<()> {
    let (datasets, seeds) = match &a.manifest {
        Some(path) => {
            let loaded = load_manifest(path)?;
            let labels = loaded
                .labels
                .ok_or_else(|| Error::Usage("ablation needs a labelled dataset".into()))?;
            let data = crate::synthetic::LabeledDataset {
                dataset: loaded.dataset,
                labels,
                clusters: None,
            };
            (vec![data], vec![a.seed])
        }
        None => {
            let data = a
                .seeds
                .0
                .iter()
                .map(|&s| synthetic_benchmark(a.mode, AnomalyCounts::default(), s))
                .collect::<Result<Vec<_>>>()?;
            (data, a.seeds.0.clone())
        }
    };
    let mut rows = Vec::new();
    for (data, &seed) in datasets.iter().zip(&seeds) {
        let p = SconeParams::new(a.psi, a.k, a.t, seed);
        rows.push(experiments::ablation(std::slice::from_ref(data), &p)?);
    }
    let mut table = Table::new(&["variant", "runs", "mean_auc", "min_auc", "max_auc"]);
    for (v, variant) in Variant::ALL.iter().enumerate() {
        let aucs: Vec<f64> = rows.iter().map(|r| r[v].mean).collect();
        let lo = aucs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = aucs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        table.push(row![variant.name(), aucs.len(), mean(&aucs), lo, hi]);
    }
    ctx.print(&table)
}

fn benchmark(ctx: &mut Ctx, a: BenchmarkArgs) -> Result<()> {
    let config = ClusterConfig::two_view(a.mode, 0);
    let result = runtime_benchmark(&a.sizes.0, &a.model.params(), &config, a.repetitions)?;
    let mut table = Table::new(&["n", "median_seconds"]);
    for r in &result.rows {
        table.push(row![r.n, r.median_seconds]);
    }
    ctx.print(&table)?;
    let mut slope = Table::new(&["loglog_slope"]);
    slope.push(match result.slope {
        Some(s) => row![s],
        None => row!["-"],
    });
    ctx.print(&slope)
}

fn proportion(ctx: &mut Ctx, a: ProportionArgs) -> Result<()> {
    let params = a.model.params();
    let data = synthetic_benchmark(a.mode, AnomalyCounts::default(), params.seed)?;
    let k_repr = a.k_repr.unwrap_or(a.k_oracle);
    let report = experiments::proportion(&data, &params, a.k_oracle, a.normals, k_repr)?;
    if ctx.format == Format::Rows {
        let mut per = Table::new(&["instance", "percent"]);
        for &(x, p) in &report.per_instance {
            per.push(row![x, p]);
        }
        ctx.print(&per)?;
    }
    let mut table = Table::new(&["probes", "skipped", "k_oracle", "k_repr", "mean_percent"]);
    table.push(row![
        a.normals,
        report.skipped.len(),
        a.k_oracle,
        k_repr,
        report.mean_percent
    ]);
    ctx.print(&table)
}

fn theorems(ctx: &mut Ctx, a: TheoremArgs) -> Result<()> {
    let data = synthetic_benchmark(a.mode, AnomalyCounts::default(), a.seed)?;
    let counts = experiments::neighborhood_counts(&data, a.psi, a.draws, a.seed)?;
    let probe = experiments::density_probe(a.density_ratio, a.psi, a.probe_k, a.trials, a.seed)?;
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };

    let mut views = Table::new(&["view", "mean_normals_in_sphere"]);
    for (v, m) in counts.view_means.iter().enumerate() {
        views.push(row![v + 1, *m]);
    }
    ctx.print(&views)?;

    let mut table = Table::new(&["check", "statistic", "value", "threshold", "result"]);
    table.push(row![
        "cross-view sphere populations",
        "relative_difference",
        counts.relative_difference,
        a.tolerance,
        verdict(counts.relative_difference <= a.tolerance),
    ]);
    table.push(row![
        "sparse region membership",
        "p_sparse",
        probe.p_sparse,
        "-",
        "-",
    ]);
    table.push(row![
        "dense region membership",
        "p_dense",
        probe.p_dense,
        "-",
        "-"
    ]);
    table.push(row![
        "sparse above dense",
        "p_value",
        probe.p_value,
        a.alpha,
        verdict(probe.p_sparse > probe.p_dense && probe.p_value < a.alpha),
    ]);
    ctx.print(&table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("3").unwrap(), Seeds(vec![3]));
        assert_eq!(parse_seeds("1, 5,9").unwrap(), Seeds(vec![1, 5, 9]));
        assert_eq!(parse_seeds("0..4").unwrap(), Seeds(vec![0, 1, 2, 3]));
        assert!(parse_seeds("4..4").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn table_layouts() {
        let mut t = Table::new(&["name", "value"]);
        t.push(row!["a", 0.5]);
        t.push(row!["longer", 1.0 / 3.0]);
        assert_eq!(
            t.render(Format::Rows),
            "name,value\na,0.5\nlonger,0.3333333333333333\n"
        );
        assert_eq!(
            t.render(Format::Table),
            "name    value\na       0.5000\nlonger  0.3333\n"
        );
    }

    #[test]
    fn usage_errors_exit_with_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["scone", "no-such-command"], &mut out, &mut err), 1);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["scone", "--help"], &mut out, &mut err), 0);
    }
}
