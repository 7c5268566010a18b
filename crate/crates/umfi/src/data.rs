//! Tabular data: column-major matrices, responses, named datasets, CSV I/O.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Whether the response is modelled by regression or classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Regression,
    Classification,
}

/// Column-major numeric matrix. Every stored value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    cols: Vec<Vec<f64>>,
}

impl Matrix {
    /// Builds a matrix from equally long, finite columns.
    pub fn from_columns(cols: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = cols.first().map_or(0, Vec::len);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::LengthMismatch {
                    left: n_rows,
                    right: col.len(),
                });
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: i + 1,
                    column: format!("column {j}"),
                });
            }
        }
        Ok(Self { n_rows, cols })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    /// Replaces column `j`; the new column must match in length and be finite.
    pub fn set_col(&mut self, j: usize, col: Vec<f64>) -> Result<()> {
        if col.len() != self.n_rows {
            return Err(Error::LengthMismatch {
                left: self.n_rows,
                right: col.len(),
            });
        }
        if let Some(i) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i + 1,
                column: format!("column {j}"),
            });
        }
        self.cols[j] = col;
        Ok(())
    }

    /// Row `i` as an owned vector (the storage is column-major).
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|c| c[i]).collect()
    }
}

/// Observed response values.
#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Regression(Vec<f64>),
    /// Labels are contiguous in `0..classes.len()`; `classes[label]` is the
    /// original value as written in the source file.
    Classification {
        labels: Vec<usize>,
        classes: Vec<String>,
    },
}

impl Response {
    pub fn len(&self) -> usize {
        match self {
            Response::Regression(y) => y.len(),
            Response::Classification { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> TaskKind {
        match self {
            Response::Regression(_) => TaskKind::Regression,
            Response::Classification { .. } => TaskKind::Classification,
        }
    }

    /// Builds a classification response from raw label strings. Distinct
    /// values are ordered numerically when they all parse as numbers and
    /// lexicographically otherwise, then encoded as 0, 1, ...
    pub fn classification_from_strings(raw: &[String]) -> Result<Self> {
        let mut classes: Vec<String> = raw
            .iter()
            .cloned()
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        if classes.len() < 2 {
            return Err(Error::SingleClass);
        }
        let all_numeric = classes.iter().all(|s| s.parse::<f64>().is_ok_and(f64::is_finite));
        if all_numeric {
            classes.sort_by(|a, b| {
                a.parse::<f64>()
                    .unwrap()
                    .total_cmp(&b.parse::<f64>().unwrap())
            });
        } else {
            classes.sort();
        }
        let labels = raw
            .iter()
            .map(|s| classes.iter().position(|c| c == s).unwrap())
            .collect();
        Ok(Response::Classification { labels, classes })
    }
}

/// A set of feature column indices, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FeatureSubset {
    indices: Vec<usize>,
}

impl FeatureSubset {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(p: usize) -> Self {
        Self {
            indices: (0..p).collect(),
        }
    }

    pub fn singleton(j: usize) -> Self {
        Self { indices: vec![j] }
    }

    /// This subset plus one more feature.
    pub fn with(&self, j: usize) -> Self {
        let mut indices = self.indices.clone();
        match indices.binary_search(&j) {
            Ok(_) => {}
            Err(pos) => indices.insert(pos, j),
        }
        Self { indices }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// All indices in `0..p` that are not in this subset.
    pub fn complement(&self, p: usize) -> Self {
        Self {
            indices: (0..p).filter(|j| !self.contains(*j)).collect(),
        }
    }
}

/// Copies the selected columns (ascending index order) into a new matrix.
pub fn subset_matrix(matrix: &Matrix, subset: &FeatureSubset) -> Result<Matrix> {
    let p = matrix.n_cols();
    let mut cols = Vec::with_capacity(subset.len());
    for &j in subset.indices() {
        if j >= p {
            return Err(Error::IndexOutOfRange { index: j, p });
        }
        cols.push(matrix.col(j).to_vec());
    }
    if cols.is_empty() {
        // An empty selection still carries the row count.
        return Ok(Matrix {
            n_rows: matrix.n_rows(),
            cols: vec![],
        });
    }
    Matrix::from_columns(cols)
}

/// A named feature matrix with its response column.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub matrix: Matrix,
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub response: Response,
}

impl Dataset {
    pub fn new(
        matrix: Matrix,
        feature_names: Vec<String>,
        response_name: String,
        response: Response,
    ) -> Result<Self> {
        if feature_names.len() != matrix.n_cols() {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: matrix.n_cols(),
            });
        }
        if response.len() != matrix.n_rows() {
            return Err(Error::LengthMismatch {
                left: response.len(),
                right: matrix.n_rows(),
            });
        }
        let mut seen = HashSet::new();
        for name in feature_names.iter().chain(std::iter::once(&response_name)) {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        if matrix.n_rows() < 2 {
            return Err(Error::TooFewRows {
                got: matrix.n_rows(),
                min: 2,
            });
        }
        if matrix.n_cols() == 0 {
            return Err(Error::EmptyFeatureSet);
        }
        Ok(Self {
            matrix,
            feature_names,
            response_name,
            response,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn task(&self) -> TaskKind {
        self.response.task()
    }
}

/// Loads a CSV with a header row. The named response column is split off;
/// every remaining column becomes a feature, in file order.
pub fn load_csv(path: impl AsRef<Path>, response_name: &str, task: TaskKind) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let response_idx = headers
        .iter()
        .position(|h| h == response_name)
        .ok_or_else(|| Error::MissingColumn(response_name.to_owned()))?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != response_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }

    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); feature_names.len()];
    let mut raw_response: Vec<String> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let mut k = 0;
        for (j, field) in record.iter().enumerate() {
            if j == response_idx {
                raw_response.push(field.to_owned());
                continue;
            }
            let column = headers[j].clone();
            let value: f64 = field
                .parse()
                .map_err(|_| Error::NonNumeric { row, column: column.clone() })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row, column });
            }
            cols[k].push(value);
            k += 1;
        }
        if record.len() != headers.len() {
            return Err(Error::InvalidInput(format!(
                "row {row} has {} fields, expected {}",
                record.len(),
                headers.len()
            )));
        }
    }

    let response = match task {
        TaskKind::Regression => {
            let mut y = Vec::with_capacity(raw_response.len());
            for (i, field) in raw_response.iter().enumerate() {
                let value: f64 = field.parse().map_err(|_| Error::NonNumeric {
                    row: i + 1,
                    column: response_name.to_owned(),
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        row: i + 1,
                        column: response_name.to_owned(),
                    });
                }
                y.push(value);
            }
            Response::Regression(y)
        }
        TaskKind::Classification => Response::classification_from_strings(&raw_response)?,
    };

    Dataset::new(
        Matrix::from_columns(cols)?,
        feature_names,
        response_name.to_owned(),
        response,
    )
}

/// Loads every column of a headed CSV as a numeric feature column.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<(Matrix, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if headers.is_empty() {
        return Err(Error::EmptyFeatureSet);
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        for (j, field) in record.iter().enumerate() {
            let column = headers[j].clone();
            let value: f64 = field
                .parse()
                .map_err(|_| Error::NonNumeric { row, column: column.clone() })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row, column });
            }
            cols[j].push(value);
        }
    }
    Ok((Matrix::from_columns(cols)?, headers))
}

fn format_value(v: f64) -> String {
    // `Display` for f64 is the shortest representation that round-trips.
    let mut s = String::new();
    write!(s, "{v}").unwrap();
    s
}

/// Writes a dataset back to CSV: features in order, response column last.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header: Vec<&str> = dataset.feature_names.iter().map(String::as_str).collect();
    header.push(&dataset.response_name);
    writer.write_record(&header)?;
    for i in 0..dataset.n_rows() {
        let mut record: Vec<String> = dataset
            .matrix
            .columns()
            .iter()
            .map(|c| format_value(c[i]))
            .collect();
        match &dataset.response {
            Response::Regression(y) => record.push(format_value(y[i])),
            Response::Classification { labels, classes } => {
                record.push(classes[labels[i]].clone())
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(Error::Io)?;
    Ok(())
}

/// Writes a feature-only matrix to CSV with the given header names.
pub fn write_matrix_csv(matrix: &Matrix, names: &[String], path: impl AsRef<Path>) -> Result<()> {
    if names.len() != matrix.n_cols() {
        return Err(Error::LengthMismatch {
            left: names.len(),
            right: matrix.n_cols(),
        });
    }
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(names)?;
    for i in 0..matrix.n_rows() {
        let record: Vec<String> = matrix
            .columns()
            .iter()
            .map(|c| format_value(c[i]))
            .collect();
        writer.write_record(&record)?;
    }
    writer.flush().map_err(Error::Io)?;
    Ok(())
}
