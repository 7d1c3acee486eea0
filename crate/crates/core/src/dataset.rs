//! Tabular ingestion, attribute orientation and robust scaling.
//!
//! A dataset is described by a sidecar schema file with one line per
//! attribute (`name,direction`, direction one of `high`, `low`, `none`) and
//! an optional label line (`label,<column>,<anomalous-literal>[,<normal-literal>]`).
//! Blank lines and lines starting with `#` are ignored.
//!
//! Attributes with direction `low` are negated by [`orient`] so that every
//! directional attribute indicates anomality through high values.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    High,
    Low,
    None,
}

impl Direction {
    pub fn is_directional(self) -> bool {
        !matches!(self, Direction::None)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::High => "high",
            Direction::Low => "low",
            Direction::None => "none",
        }
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(Direction::High),
            "low" => Ok(Direction::Low),
            "none" => Ok(Direction::None),
            other => Err(Error::Schema(format!(
                "unknown direction \"{other}\" (expected high, low or none)"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    pub name: String,
    pub direction: Direction,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Normal,
    Anomalous,
}

impl Label {
    pub fn is_anomalous(self) -> bool {
        matches!(self, Label::Anomalous)
    }
}

/// Which CSV column holds the class label and how its values map to [`Label`].
///
/// Without a `normal` literal every non-empty value other than the anomalous
/// literal counts as normal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpec {
    pub column: String,
    pub anomalous: String,
    pub normal: Option<String>,
}

impl LabelSpec {
    pub fn new(column: impl Into<String>, anomalous: impl Into<String>) -> Self {
        Self {
            column: column.into(),
            anomalous: anomalous.into(),
            normal: None,
        }
    }

    pub fn with_normal(mut self, normal: impl Into<String>) -> Self {
        self.normal = Some(normal.into());
        self
    }

    fn decode(&self, value: &str) -> Option<Label> {
        if value == self.anomalous {
            return Some(Label::Anomalous);
        }
        match &self.normal {
            Some(n) if value == n => Some(Label::Normal),
            Some(_) => None,
            None if value.is_empty() => None,
            None => Some(Label::Normal),
        }
    }

    fn encode(&self, label: Label) -> &str {
        match label {
            Label::Anomalous => &self.anomalous,
            Label::Normal => self.normal.as_deref().unwrap_or("0"),
        }
    }
}

/// Attribute list plus optional label column, as read from a schema file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub attributes: Vec<AttributeSpec>,
    pub label: Option<LabelSpec>,
}

impl Schema {
    pub fn new(attributes: Vec<AttributeSpec>, label: Option<LabelSpec>) -> Result<Self> {
        let schema = Self { attributes, label };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<()> {
        check_unique_names(&self.attributes)?;
        if let Some(label) = &self.label {
            if self.attributes.iter().any(|a| a.name == label.column) {
                return Err(Error::Schema(format!(
                    "label column \"{}\" is also declared as an attribute",
                    label.column
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut attributes = Vec::new();
        let mut label = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match fields.as_slice() {
                ["label", column, anomalous, rest @ ..] if rest.len() <= 1 => {
                    if label.is_some() {
                        return Err(Error::Schema(format!("line {}: second label line", lineno + 1)));
                    }
                    let mut spec = LabelSpec::new(*column, *anomalous);
                    if let [normal] = rest {
                        spec = spec.with_normal(*normal);
                    }
                    label = Some(spec);
                }
                [name, direction] => {
                    attributes.push(AttributeSpec::new(*name, direction.parse()?));
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "line {}: expected `name,direction` or `label,<column>,<anomalous>`",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(attributes, label)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for a in &self.attributes {
            out.push_str(&format!("{},{}\n", a.name, a.direction));
        }
        if let Some(l) = &self.label {
            out.push_str(&format!("label,{},{}", l.column, l.anomalous));
            if let Some(n) = &l.normal {
                out.push(',');
                out.push_str(n);
            }
            out.push('\n');
        }
        out
    }
}

fn check_unique_names(attrs: &[AttributeSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in attrs {
        if !seen.insert(a.name.as_str()) {
            return Err(Error::Schema(format!("duplicate attribute \"{}\"", a.name)));
        }
    }
    Ok(())
}

/// Numeric records with their attribute schema and optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<AttributeSpec>,
    records: Matrix,
    labels: Option<Vec<Label>>,
}

impl Dataset {
    pub fn new(schema: Vec<AttributeSpec>, records: Matrix, labels: Option<Vec<Label>>) -> Result<Self> {
        check_unique_names(&schema)?;
        if records.cols() != schema.len() && !(records.rows() == 0 && records.cols() == 0) {
            return Err(Error::DimensionMismatch {
                expected: schema.len(),
                found: records.cols(),
            });
        }
        if let Some(labels) = &labels {
            if labels.len() != records.rows() {
                return Err(Error::DimensionMismatch {
                    expected: records.rows(),
                    found: labels.len(),
                });
            }
        }
        if records.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("records must be finite"));
        }
        let records = if records.rows() == 0 {
            Matrix::zeros(0, schema.len())
        } else {
            records
        };
        Ok(Self {
            schema,
            records,
            labels,
        })
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn records(&self) -> &Matrix {
        &self.records
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn n_records(&self) -> usize {
        self.records.rows()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.len()
    }

    /// `true` for every attribute whose direction is `high` or `low`.
    pub fn directional_mask(&self) -> Vec<bool> {
        self.schema.iter().map(|a| a.direction.is_directional()).collect()
    }

    fn indices_with(&self, label: Label) -> Vec<usize> {
        match &self.labels {
            Some(ls) => (0..ls.len()).filter(|&i| ls[i] == label).collect(),
            None if label == Label::Normal => (0..self.n_records()).collect(),
            None => Vec::new(),
        }
    }

    /// Indices of normal records; every record when the dataset is unlabelled.
    pub fn normal_indices(&self) -> Vec<usize> {
        self.indices_with(Label::Normal)
    }

    pub fn anomalous_indices(&self) -> Vec<usize> {
        self.indices_with(Label::Anomalous)
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            records: self.records.select_rows(indices),
            labels: self
                .labels
                .as_ref()
                .map(|ls| indices.iter().map(|&i| ls[i]).collect()),
        }
    }

    pub fn with_records(&self, records: Matrix) -> Result<Self> {
        Self::new(self.schema.clone(), records, self.labels.clone())
    }

    pub fn with_schema(&self, schema: Vec<AttributeSpec>) -> Result<Self> {
        Self::new(schema, self.records.clone(), self.labels.clone())
    }

    pub fn without_labels(&self) -> Self {
        Self {
            labels: None,
            ..self.clone()
        }
    }

    pub fn read_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        parse_csv(file, &schema.attributes, schema.label.as_ref())
    }
}

/// Parses CSV text with a header row into a [`Dataset`].
///
/// Every header column must be a schema attribute or the label column, and
/// every schema attribute must be present. Records are stored in schema
/// order. Row numbers in errors count data rows from 1.
pub fn parse_csv<R: Read>(
    reader: R,
    attributes: &[AttributeSpec],
    label: Option<&LabelSpec>,
) -> Result<Dataset> {
    check_unique_names(attributes)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Schema("missing header row".into()));
    }

    let mut attr_pos = vec![None; attributes.len()];
    let mut label_pos = None;
    for (pos, col) in header.iter().enumerate() {
        if let Some(j) = attributes.iter().position(|a| a.name == col) {
            if attr_pos[j].replace(pos).is_some() {
                return Err(Error::Schema(format!("column \"{col}\" appears twice in header")));
            }
        } else if label.is_some_and(|l| l.column == col) {
            label_pos = Some(pos);
        } else {
            return Err(Error::Schema(format!("header column \"{col}\" is not in the schema")));
        }
    }
    let attr_pos: Vec<usize> = attr_pos
        .into_iter()
        .zip(attributes)
        .map(|(p, a)| p.ok_or_else(|| Error::Schema(format!("attribute \"{}\" missing from header", a.name))))
        .collect::<Result<_>>()?;
    if let Some(l) = label {
        if label_pos.is_none() {
            return Err(Error::Schema(format!("label column \"{}\" missing from header", l.column)));
        }
    }

    let mut data = Vec::new();
    let mut labels = label.map(|_| Vec::new());
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Csv(format!("row {row}: {e}")))?;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        for (a, &pos) in attributes.iter().zip(&attr_pos) {
            let cell = &rec[pos];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: a.name.clone(),
                message: format!("\"{cell}\" is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: a.name.clone(),
                    message: format!("\"{cell}\" is not a finite number"),
                });
            }
            data.push(v);
        }
        if let (Some(spec), Some(pos), Some(out)) = (label, label_pos, labels.as_mut()) {
            let cell = &rec[pos];
            let l = spec.decode(cell).ok_or_else(|| Error::Parse {
                row,
                column: spec.column.clone(),
                message: format!("unknown label value \"{cell}\""),
            })?;
            out.push(l);
        }
        n += 1;
    }
    Dataset::new(attributes.to_vec(), Matrix::new(n, attributes.len(), data)?, labels)
}

/// Serializes a dataset as CSV. Labels, when present, go in the last column
/// using the literals of `label`; the column defaults to `label` with `1`/`0`.
pub fn to_csv(ds: &Dataset, label: Option<&LabelSpec>) -> String {
    let default_label = LabelSpec::new("label", "1").with_normal("0");
    let label_spec = label.unwrap_or(&default_label);
    let mut wtr = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<&str> = ds.schema.iter().map(|a| a.name.as_str()).collect();
    if ds.labels.is_some() {
        header.push(&label_spec.column);
    }
    // Writing to a Vec cannot fail.
    wtr.write_record(&header).expect("in-memory write");
    for (i, row) in ds.records.iter_rows().enumerate() {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        if let Some(ls) = &ds.labels {
            fields.push(label_spec.encode(ls[i]).to_string());
        }
        wtr.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Negates every `low` attribute and marks it `high`.
pub fn orient(ds: &Dataset) -> Dataset {
    let flip: Vec<bool> = ds.schema.iter().map(|a| a.direction == Direction::Low).collect();
    if !flip.contains(&true) {
        return ds.clone();
    }
    let mut records = ds.records.clone();
    for i in 0..records.rows() {
        for (v, &f) in records.row_mut(i).iter_mut().zip(&flip) {
            if f {
                *v = -*v;
            }
        }
    }
    let schema = ds
        .schema
        .iter()
        .map(|a| match a.direction {
            Direction::Low => AttributeSpec::new(a.name.clone(), Direction::High),
            _ => a.clone(),
        })
        .collect();
    Dataset {
        schema,
        records,
        labels: ds.labels.clone(),
    }
}

/// Per-attribute midhinge and semi-interquartile range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub midhinge: Vec<f64>,
    pub semi_iqr: Vec<f64>,
}

impl ScalingParams {
    pub fn n_attributes(&self) -> usize {
        self.midhinge.len()
    }

    pub fn transform(&self, records: &Matrix) -> Result<Matrix> {
        if records.cols() != self.n_attributes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_attributes(),
                found: records.cols(),
            });
        }
        let mut out = records.clone();
        for i in 0..out.rows() {
            self.transform_row(out.row_mut(i));
        }
        Ok(out)
    }

    #[inline]
    pub fn transform_row(&self, row: &mut [f64]) {
        for ((v, &c), &s) in row.iter_mut().zip(&self.midhinge).zip(&self.semi_iqr) {
            *v = (*v - c) / s;
        }
    }
}

/// Linear-interpolation quantile on sorted values: position `(n-1)·q`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Fits midhinge/semi-IQR scaling on the records of `train`.
///
/// A zero semi-IQR falls back to half the range, then to 1.
pub fn fit_scaler(train: &Dataset) -> Result<ScalingParams> {
    fit_scaler_matrix(&train.records)
}

pub fn fit_scaler_matrix(records: &Matrix) -> Result<ScalingParams> {
    if records.rows() < 2 {
        return Err(Error::InsufficientData(format!(
            "scaling needs at least 2 training records, got {}",
            records.rows()
        )));
    }
    let m = records.cols();
    let mut midhinge = Vec::with_capacity(m);
    let mut semi_iqr = Vec::with_capacity(m);
    for j in 0..m {
        let mut col = records.column(j);
        col.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&col, 0.25);
        let q3 = quantile_sorted(&col, 0.75);
        let mut spread = (q3 - q1) / 2.0;
        if spread <= 0.0 {
            spread = (col[col.len() - 1] - col[0]) / 2.0;
        }
        if spread <= 0.0 {
            spread = 1.0;
        }
        midhinge.push((q1 + q3) / 2.0);
        semi_iqr.push(spread);
    }
    Ok(ScalingParams { midhinge, semi_iqr })
}

pub fn apply_scaler(ds: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    let records = params.transform(&ds.records)?;
    Ok(Dataset {
        schema: ds.schema.clone(),
        records,
        labels: ds.labels.clone(),
    })
}
