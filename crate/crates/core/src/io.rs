//! File formats.
//!
//! * feature file: comma-separated numbers, one instance per line, optional
//!   single header line (detected when the first line is not all numeric)
//! * labels file: one integer per line, `0` normal, `1` attribute, `2` class,
//!   `3` class-attribute
//! * manifest: `key = value` lines; `view` repeated once per view in order,
//!   optional `labels` and `name`; `#` starts a comment; relative paths are
//!   resolved against the manifest's directory
//! * scores: CSV with header `index,consistency,anomaly_score[,label]`
//! * model: line-oriented text, see [`save_model`]
//!
//! Numbers are written with Rust's shortest round-trip formatting, so every
//! saved value reads back bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{
    validate_params, EnsembleModel, Fingerprint, Label, LabelVector, MultiViewDataset, SampleSet,
    SconeParams, ScoreVector, Variant, ViewMatrix,
};

pub const MODEL_MAGIC: &str = "scone-model";
pub const MODEL_VERSION: u32 = 1;

fn read_to_string(path: &Path) -> Result<String> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads one view's feature file.
pub fn read_feature_csv(path: &Path) -> Result<ViewMatrix> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(None)
        .from_reader(text.as_bytes());
    let mut dim = None;
    let mut data = Vec::new();
    let mut rows = 0usize;
    for (record_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(record_no as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if rows == 0 && dim.is_none() && record_no == 0 => continue,
            Err(e) => {
                let column = record
                    .iter()
                    .position(|f| f.parse::<f64>().is_err())
                    .unwrap_or(0);
                return Err(parse_error(
                    path,
                    line,
                    format!("column {}: {e}", column + 1),
                ));
            }
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(parse_error(
                    path,
                    line,
                    format!("expected {d} fields, found {}", values.len()),
                ))
            }
            Some(_) => {}
        }
        if let Some(col) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue {
                location: format!("{} row {} column {}", path.display(), rows + 1, col + 1),
            });
        }
        data.extend(values);
        rows += 1;
    }
    ViewMatrix::new(rows, dim.unwrap_or(0), data)
}

pub fn write_feature_csv(path: &Path, view: &ViewMatrix) -> Result<()> {
    let mut out = String::with_capacity(view.rows() * view.dim() * 20);
    for i in 0..view.rows() {
        for (j, x) in view.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{x}").expect("write to String");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_labels(path: &Path) -> Result<LabelVector> {
    let text = read_to_string(path)?;
    let mut labels = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let label = line
            .parse::<u8>()
            .ok()
            .and_then(Label::from_code)
            .ok_or_else(|| parse_error(path, no as u64 + 1, format!("invalid label '{line}'")))?;
        labels.push(label);
    }
    Ok(labels)
}

pub fn write_labels(path: &Path, labels: &[Label]) -> Result<()> {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        writeln!(out, "{}", l.code()).expect("write to String");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parsed manifest with paths resolved.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    pub name: Option<String>,
    pub views: Vec<PathBuf>,
    pub labels: Option<PathBuf>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut manifest = Manifest::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| parse_error(path, no as u64 + 1, "expected 'key = value'"))?;
            if value.is_empty() {
                return Err(parse_error(
                    path,
                    no as u64 + 1,
                    format!("empty value for '{key}'"),
                ));
            }
            match key {
                "name" => manifest.name = Some(value.to_string()),
                "view" => manifest.views.push(base.join(value)),
                "labels" => manifest.labels = Some(base.join(value)),
                other => {
                    return Err(parse_error(
                        path,
                        no as u64 + 1,
                        format!("unknown key '{other}'"),
                    ))
                }
            }
        }
        if manifest.views.is_empty() {
            return Err(parse_error(path, 0, "manifest lists no views"));
        }
        Ok(manifest)
    }

    /// Writes the manifest; paths are written as given.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        if let Some(name) = &self.name {
            writeln!(out, "name = {name}").expect("write to String");
        }
        for v in &self.views {
            writeln!(out, "view = {}", v.display()).expect("write to String");
        }
        if let Some(l) = &self.labels {
            writeln!(out, "labels = {}", l.display()).expect("write to String");
        }
        fs::write(path, out)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedDataset {
    pub name: Option<String>,
    pub dataset: MultiViewDataset,
    pub labels: Option<LabelVector>,
}

pub fn load_manifest(path: &Path) -> Result<LoadedDataset> {
    let manifest = Manifest::read(path)?;
    let mut views = Vec::with_capacity(manifest.views.len());
    for view_path in &manifest.views {
        let view = read_feature_csv(view_path)?;
        if let Some(first) = views.first().map(ViewMatrix::rows) {
            if view.rows() != first {
                return Err(Error::RowCountMismatch {
                    path: view_path.clone(),
                    expected: first,
                    found: view.rows(),
                });
            }
        }
        views.push(view);
    }
    let dataset = MultiViewDataset::new(views)?;
    let labels = match &manifest.labels {
        Some(p) => {
            let labels = read_labels(p)?;
            if labels.len() != dataset.instance_count() {
                return Err(Error::RowCountMismatch {
                    path: p.clone(),
                    expected: dataset.instance_count(),
                    found: labels.len(),
                });
            }
            Some(labels)
        }
        None => None,
    };
    Ok(LoadedDataset {
        name: manifest.name,
        dataset,
        labels,
    })
}

/// Writes `view1.csv … viewV.csv`, `labels.txt` (when given) and `manifest.txt` into `dir`.
pub fn save_dataset(
    dir: &Path,
    name: Option<&str>,
    dataset: &MultiViewDataset,
    labels: Option<&[Label]>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest {
        name: name.map(str::to_string),
        ..Manifest::default()
    };
    for (v, view) in dataset.views().iter().enumerate() {
        let file = format!("view{}.csv", v + 1);
        write_feature_csv(&dir.join(&file), view)?;
        manifest.views.push(PathBuf::from(file));
    }
    if let Some(labels) = labels {
        write_labels(&dir.join("labels.txt"), labels)?;
        manifest.labels = Some(PathBuf::from("labels.txt"));
    }
    let path = dir.join("manifest.txt");
    manifest.write(&path)?;
    Ok(path)
}

pub fn render_scores(scores: &ScoreVector, labels: Option<&[Label]>) -> Result<String> {
    if let Some(l) = labels {
        if l.len() != scores.len() {
            return Err(Error::Usage(format!(
                "{} labels for {} scores",
                l.len(),
                scores.len()
            )));
        }
    }
    let mut out = String::with_capacity(scores.len() * 48);
    out.push_str("index,consistency,anomaly_score");
    if labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, (c, a)) in scores
        .consistency()
        .into_iter()
        .zip(scores.anomaly_scores())
        .enumerate()
    {
        write!(out, "{i},{c},{a}").expect("write to String");
        if let Some(l) = labels {
            write!(out, ",{}", l[i].code()).expect("write to String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn save_scores(path: &Path, scores: &ScoreVector, labels: Option<&[Label]>) -> Result<()> {
    fs::write(path, render_scores(scores, labels)?)?;
    Ok(())
}

/// Contents of a scores file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub consistency: Vec<f64>,
    pub anomaly: Vec<f64>,
    pub labels: Option<LabelVector>,
}

pub fn load_scores(path: &Path) -> Result<ScoreTable> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .map(|(_, h)| h.trim())
        .ok_or_else(|| parse_error(path, 1, "missing header"))?;
    let has_labels = match header {
        "index,consistency,anomaly_score" => false,
        "index,consistency,anomaly_score,label" => true,
        other => return Err(parse_error(path, 1, format!("unexpected header '{other}'"))),
    };
    let mut table = ScoreTable {
        consistency: Vec::new(),
        anomaly: Vec::new(),
        labels: has_labels.then(Vec::new),
    };
    for (no, line) in lines {
        let line_no = no as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 + usize::from(has_labels) {
            return Err(parse_error(path, line_no, "wrong number of fields"));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| parse_error(path, line_no, "bad index"))?;
        if index != table.consistency.len() {
            return Err(parse_error(
                path,
                line_no,
                format!("index {index} out of order"),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_error(path, line_no, format!("bad number '{s}'")))
        };
        table.consistency.push(num(fields[1])?);
        table.anomaly.push(num(fields[2])?);
        if let Some(labels) = table.labels.as_mut() {
            let label = fields[3]
                .parse::<u8>()
                .ok()
                .and_then(Label::from_code)
                .ok_or_else(|| parse_error(path, line_no, "bad label"))?;
            labels.push(label);
        }
    }
    Ok(table)
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v}").expect("write to String");
    }
    out
}

/// Serialized model:
///
/// ```text
/// scone-model 1
/// params psi=8 k=3 t=200 seed=42 variant=spherical
/// fingerprint n=1000 dims=2,2 checksum=00112233aabbccdd
/// member indices=4,17,...
/// radii 0.5,0.25,...          (one line per view)
/// ...
/// end
/// ```
pub fn render_model(model: &EnsembleModel) -> String {
    let p = &model.params;
    let mut out = String::new();
    writeln!(out, "{MODEL_MAGIC} {MODEL_VERSION}").unwrap();
    writeln!(
        out,
        "params psi={} k={} t={} seed={} variant={}",
        p.psi, p.k, p.t, p.seed, p.variant
    )
    .unwrap();
    writeln!(out, "fingerprint {}", model.fingerprint).unwrap();
    for m in &model.members {
        writeln!(out, "member indices={}", join(&m.indices)).unwrap();
        for r in &m.radii {
            writeln!(out, "radii {}", join(r)).unwrap();
        }
    }
    out.push_str("end\n");
    out
}

pub fn save_model(path: &Path, model: &EnsembleModel) -> Result<()> {
    fs::write(path, render_model(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<EnsembleModel> {
    parse_model(&read_to_string(path)?)
}

fn corrupt(line: usize, message: impl std::fmt::Display) -> Error {
    Error::CorruptModel(format!("line {line}: {message}"))
}

fn fields<'a>(line: &'a str, no: usize, keyword: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let rest = line
        .strip_prefix(keyword)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| corrupt(no, format!("expected '{keyword}'")))?;
    rest.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .ok_or_else(|| corrupt(no, format!("bad field '{kv}'")))
        })
        .collect()
}

fn field<'a>(fields: &[(&'a str, &'a str)], key: &str, no: usize) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| corrupt(no, format!("missing '{key}'")))
}

fn parse_list<T: std::str::FromStr>(s: &str, no: usize) -> Result<Vec<T>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.parse()
                .map_err(|_| corrupt(no, format!("bad value '{x}'")))
        })
        .collect()
}

pub fn parse_model(text: &str) -> Result<EnsembleModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::CorruptModel(format!("truncated: missing {what}")))
    };

    let (no, header) = next("header")?;
    let version = header
        .strip_prefix(MODEL_MAGIC)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| corrupt(no, "not a model file"))?;
    if version != MODEL_VERSION.to_string() {
        return Err(Error::VersionMismatch {
            expected: MODEL_VERSION,
            found: version.to_string(),
        });
    }

    let (no, line) = next("params")?;
    let f = fields(line, no, "params")?;
    let num = |key: &str| -> Result<u64> {
        field(&f, key, no)?
            .parse()
            .map_err(|_| corrupt(no, format!("bad '{key}'")))
    };
    let params = SconeParams {
        psi: num("psi")? as usize,
        k: num("k")? as usize,
        t: num("t")? as usize,
        seed: num("seed")?,
        variant: field(&f, "variant", no)?
            .parse::<Variant>()
            .map_err(|_| corrupt(no, "bad variant"))?,
    };

    let (no, line) = next("fingerprint")?;
    if !line.starts_with("fingerprint") {
        return Err(corrupt(no, "missing fingerprint"));
    }
    let f = fields(line, no, "fingerprint")?;
    let fingerprint = Fingerprint {
        instance_count: field(&f, "n", no)?
            .parse()
            .map_err(|_| corrupt(no, "bad 'n'"))?,
        dims: parse_list(field(&f, "dims", no)?, no)?,
        checksum: u64::from_str_radix(field(&f, "checksum", no)?, 16)
            .map_err(|_| corrupt(no, "bad checksum"))?,
    };
    let n = fingerprint.instance_count;
    let views = fingerprint.dims.len();
    if views == 0 || fingerprint.dims.contains(&0) {
        return Err(corrupt(no, "fingerprint has no views"));
    }
    validate_params(&params, n).map_err(|e| corrupt(no, e))?;

    let mut members = Vec::with_capacity(params.t);
    loop {
        let (no, line) = next("end marker")?;
        if line == "end" {
            break;
        }
        let f = fields(line, no, "member")?;
        let indices: Vec<usize> = parse_list(field(&f, "indices", no)?, no)?;
        if indices.len() != params.psi {
            return Err(corrupt(no, "member size differs from psi"));
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != indices.len() || indices.iter().any(|&i| i >= n) {
            return Err(corrupt(no, "member indices must be distinct and below n"));
        }
        let mut radii = Vec::with_capacity(views);
        for _ in 0..views {
            let (no, line) = next("radii")?;
            let values = line
                .strip_prefix("radii ")
                .ok_or_else(|| corrupt(no, "expected 'radii'"))?;
            let r: Vec<f64> = parse_list(values, no)?;
            if r.len() != params.psi || r.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(corrupt(no, "radii must be psi finite non-negative values"));
            }
            radii.push(r);
        }
        members.push(SampleSet { indices, radii });
    }
    if members.len() != params.t {
        return Err(Error::CorruptModel(format!(
            "expected {} members, found {}",
            params.t,
            members.len()
        )));
    }
    if lines.next().is_some() {
        return Err(Error::CorruptModel("trailing content after end".into()));
    }
    Ok(EnsembleModel {
        params,
        members,
        fingerprint,
    })
}
