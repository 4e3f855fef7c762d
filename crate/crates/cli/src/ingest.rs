//! CSV input: a `group` column, a `y` column and any number of covariates.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use robust_ancova::{Dataset, Matrix, Vector};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IngestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("non-numeric value `{value}` at line {line}, column {column} (`{name}`)")]
    NonNumericValue { line: u64, column: usize, name: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

/// A dataset together with the names needed to report on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub data: Dataset<f64>,
    /// Original group labels; label `k` of the dataset is `labels[k - 1]`.
    pub labels: Vec<String>,
    pub covariate_names: Vec<String>,
}

impl Ingested {
    /// Human-readable name of design column `j` (group indicators first).
    pub fn design_column_name(&self, j: usize) -> String {
        let a = self.labels.len();
        if j < a {
            format!("group `{}`", self.labels[j])
        } else {
            match self.covariate_names.get(j - a) {
                Some(name) => format!("covariate `{name}`"),
                None => format!("column {j}"),
            }
        }
    }
}

pub fn ingest_csv(path: &Path) -> Result<Ingested, IngestError> {
    let file = File::open(path)
        .map_err(|e| IngestError::Io { path: path.display().to_string(), message: e.to_string() })?;
    read_csv(file)
}

fn parse_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
        _ => e.to_string(),
    };
    IngestError::Parse { line, message }
}

pub fn read_csv<R: Read>(input: R) -> Result<Ingested, IngestError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader.headers().map_err(parse_error)?.clone();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let group_col = find("group")?;
    let y_col = find("y")?;
    let cov_cols: Vec<usize> = (0..header.len()).filter(|&j| j != group_col && j != y_col).collect();
    let covariate_names: Vec<String> = cov_cols.iter().map(|&j| header[j].to_string()).collect();

    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut groups = Vec::new();
    let mut y = Vec::new();
    let mut z = Vec::new();
    for record in reader.records() {
        let record = record.map_err(parse_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |j: usize| -> Result<f64, IngestError> {
            let raw = &record[j];
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(IngestError::NonNumericValue {
                    line,
                    column: j + 1,
                    name: header[j].to_string(),
                    value: raw.to_string(),
                }),
            }
        };
        let label = &record[group_col];
        if label.is_empty() {
            return Err(IngestError::Parse { line, message: "empty group label".into() });
        }
        let g = match index.get(label) {
            Some(&g) => g,
            None => {
                labels.push(label.to_string());
                index.insert(label.to_string(), labels.len());
                labels.len()
            }
        };
        groups.push(g);
        y.push(number(y_col)?);
        for &j in &cov_cols {
            z.push(number(j)?);
        }
    }
    if y.is_empty() {
        return Err(IngestError::Invalid("no data rows".into()));
    }
    let n = y.len();
    let covariates = Matrix::from_row_major(n, cov_cols.len(), z).map_err(|e| IngestError::Invalid(e.to_string()))?;
    let response = Vector::from_vec(y).map_err(|e| IngestError::Invalid(e.to_string()))?;
    let data = Dataset::new(response, groups, covariates).map_err(|e| IngestError::Invalid(e.to_string()))?;
    Ok(Ingested { data, labels, covariate_names })
}

/// Writes the dataset back as CSV with columns `group,y,<covariates>`. Reals use
/// the shortest representation that reads back to the same value.
pub fn write_csv<W: Write>(ingested: &Ingested, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["group".to_string(), "y".to_string()];
    header.extend(ingested.covariate_names.iter().cloned());
    w.write_record(&header)?;
    let d = &ingested.data;
    for i in 0..d.len() {
        let mut row = vec![ingested.labels[d.group_of()[i] - 1].clone(), d.response()[i].to_string()];
        row.extend(d.covariates().row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()
}
