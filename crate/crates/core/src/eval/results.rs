//! Result files.
//!
//! Cross-validation results: `dataset,detector,variant,fold,auroc` with one
//! row per fold (`fold` = 1, 2, …) followed by a `mean` row. A single
//! train/test split is written as one row with `fold` = `holdout`.
//!
//! Sweep results: `family,shift,detector,k,variant,mean_auroc,replicates`.

use std::io::Read;

use crate::error::{Error, Result};
use crate::eval::cv::{ExperimentResult, SweepCell};

pub const RESULTS_HEADER: [&str; 5] = ["dataset", "detector", "variant", "fold", "auroc"];
pub const SWEEP_HEADER: [&str; 7] = ["family", "shift", "detector", "k", "variant", "mean_auroc", "replicates"];

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut w = writer();
    w.write_record(RESULTS_HEADER).expect("in-memory write");
    for r in results {
        let mut row = |fold: String, auroc: f64| {
            w.write_record([&r.dataset, &r.detector, &r.variant, &fold, &format!("{auroc}")])
                .expect("in-memory write");
        };
        if let [single] = r.fold_aurocs[..] {
            row("holdout".into(), single);
            continue;
        }
        for (f, a) in r.fold_aurocs.iter().enumerate() {
            row((f + 1).to_string(), *a);
        }
        row("mean".into(), r.mean_auroc);
    }
    finish(w)
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    let mut w = writer();
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for c in cells {
        w.write_record([
            c.family.as_str(),
            &format!("{}", c.shift),
            &c.detector,
            &c.k,
            &c.variant,
            &format!("{}", c.mean_auroc()),
            &c.aurocs.len().to_string(),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub detector: String,
    pub variant: String,
    pub fold: String,
    pub auroc: f64,
}

impl ResultRow {
    /// `detector:variant`.
    pub fn column(&self) -> String {
        format!("{}:{}", self.detector, self.variant)
    }
}

pub fn read_results<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(Error::Schema(format!(
            "results header must be `{}`",
            RESULTS_HEADER.join(",")
        )));
    }
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| Error::Csv(format!("row {}: {e}", i + 1)))?;
            let auroc = rec[4].parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: "auroc".into(),
                message: format!("\"{}\" is not a number", &rec[4]),
            })?;
            Ok(ResultRow {
                dataset: rec[0].to_string(),
                detector: rec[1].to_string(),
                variant: rec[2].to_string(),
                fold: rec[3].to_string(),
                auroc,
            })
        })
        .collect()
}

/// Mean AUROC per dataset and `detector:variant` column, in first-appearance order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub datasets: Vec<String>,
    pub columns: Vec<String>,
    /// `values[dataset][column]`
    pub values: Vec<Vec<Option<f64>>>,
}

impl SummaryTable {
    pub fn from_rows(rows: &[ResultRow]) -> Self {
        let mut t = Self::default();
        for r in rows.iter().filter(|r| r.fold == "mean" || r.fold == "holdout") {
            t.insert(&r.dataset, &r.column(), r.auroc);
        }
        t
    }

    pub fn from_results(results: &[ExperimentResult]) -> Self {
        let mut t = Self::default();
        for r in results {
            t.insert(&r.dataset, &format!("{}:{}", r.detector, r.variant), r.mean_auroc);
        }
        t
    }

    fn insert(&mut self, dataset: &str, column: &str, value: f64) {
        let c = match self.columns.iter().position(|c| c == column) {
            Some(c) => c,
            None => {
                self.columns.push(column.to_string());
                for row in &mut self.values {
                    row.push(None);
                }
                self.columns.len() - 1
            }
        };
        let d = match self.datasets.iter().position(|d| d == dataset) {
            Some(d) => d,
            None => {
                self.datasets.push(dataset.to_string());
                self.values.push(vec![None; self.columns.len()]);
                self.datasets.len() - 1
            }
        };
        self.values[d][c] = Some(value);
    }

    /// Paired values of two columns over datasets where both are present.
    pub fn paired(&self, a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let find = |name: &str| {
            self.columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::invalid(format!("no results for column `{name}`")))
        };
        let (ia, ib) = (find(a)?, find(b)?);
        Ok(self
            .values
            .iter()
            .filter_map(|row| Some((row[ia]?, row[ib]?)))
            .unzip())
    }

    /// Table with one row per dataset and a `best` column naming the top
    /// variant of each detector.
    pub fn render(&self) -> String {
        let name_w = self.datasets.iter().map(String::len).max().unwrap_or(0).max(7);
        let col_w = self.columns.iter().map(String::len).max().unwrap_or(0).max(6);
        let mut out = format!("{:<name_w$}", "dataset");
        for c in &self.columns {
            out.push_str(&format!("  {c:>col_w$}"));
        }
        out.push_str("  best\n");
        for (d, row) in self.datasets.iter().zip(&self.values) {
            out.push_str(&format!("{d:<name_w$}"));
            for v in row {
                match v {
                    Some(v) => out.push_str(&format!("  {v:>col_w$.3}")),
                    None => out.push_str(&format!("  {:>col_w$}", "-")),
                }
            }
            out.push_str("  ");
            out.push_str(&self.best_of(row).join(" "));
            out.push('\n');
        }
        out
    }

    fn best_of(&self, row: &[Option<f64>]) -> Vec<String> {
        let mut detectors: Vec<&str> = Vec::new();
        for c in &self.columns {
            let det = c.split(':').next().unwrap_or(c);
            if !detectors.contains(&det) {
                detectors.push(det);
            }
        }
        detectors
            .into_iter()
            .filter_map(|det| {
                self.columns
                    .iter()
                    .zip(row)
                    .filter(|(c, _)| c.split(':').next() == Some(det))
                    .filter_map(|(c, v)| v.map(|v| (c, v)))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(c, _)| c.clone())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(ds: &str, det: &str, var: &str, folds: Vec<f64>) -> ExperimentResult {
        ExperimentResult::new(ds, (det.into(), var.into()), folds)
    }

    #[test]
    fn results_round_trip_through_summary() {
        let rs = vec![
            result("a", "nnd", "absolute", vec![0.5, 0.7]),
            result("a", "nnd", "ramp", vec![0.8, 0.9]),
            result("b", "nnd", "ramp", vec![0.75]),
        ];
        let text = results_csv(&rs);
        assert!(text.starts_with("dataset,detector,variant,fold,auroc\n"));
        assert_eq!(text.lines().count(), 1 + 3 + 3 + 1);
        assert!(text.contains("b,nnd,ramp,holdout,0.75"));
        let rows = read_results(text.as_bytes()).unwrap();
        let t = SummaryTable::from_rows(&rows);
        assert_eq!(t, SummaryTable::from_results(&rs));
        assert_eq!(t.datasets, vec!["a", "b"]);
        let (x, y) = t.paired("nnd:ramp", "nnd:absolute").unwrap();
        assert_eq!(x.len(), 1);
        assert!((x[0] - 0.85).abs() < 1e-12 && (y[0] - 0.6).abs() < 1e-12);
        assert!(t.paired("nnd:ramp", "alp:ramp").is_err());
        let table = t.render();
        assert!(table.lines().nth(1).unwrap().ends_with("nnd:ramp"));
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(read_results("a,b\n1,2\n".as_bytes()).is_err());
    }
}
