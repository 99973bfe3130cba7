use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `n x d` observation matrix with column names; rows are samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    names: Vec<String>,
}

pub(crate) fn default_names(d: usize) -> Vec<String> {
    (0..d).map(|j| format!("x{j}")).collect()
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, names: Vec<String>) -> Result<Self> {
        if names.len() != x.ncols() {
            return Err(Error::DimensionMismatch { expected: x.ncols(), got: names.len() });
        }
        if x.nrows() == 0 {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            let (row, col) = (pos % x.nrows(), pos / x.nrows());
            return Err(Error::Data(format!("non-finite value at row {row}, column {col}")));
        }
        Ok(Self { x, names })
    }

    pub fn from_matrix(x: DMatrix<f64>) -> Result<Self> {
        let names = default_names(x.ncols());
        Self::new(x, names)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.x
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn means(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.x.column_iter().map(|c| c.sum() / n).collect()
    }

    /// Per-column variance with denominator `n`.
    pub fn variances(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.x
            .column_iter()
            .map(|c| {
                let m = c.sum() / n;
                c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n
            })
            .collect()
    }

    /// Centers each column and scales it to unit variance (denominator `n`).
    pub fn standardize(&self) -> Result<Dataset> {
        let means = self.means();
        let vars = self.variances();
        let mut x = self.x.clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            if !(vars[j] > 0.0) {
                return Err(Error::DegenerateData(format!("column {} is constant", self.names[j])));
            }
            let sd = vars[j].sqrt();
            col.apply(|v| *v = (*v - means[j]) / sd);
        }
        Ok(Dataset { x, names: self.names.clone() })
    }

    pub fn scale_columns(&self, factors: &[f64]) -> Dataset {
        let mut x = self.x.clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col *= factors[j];
        }
        Dataset { x, names: self.names.clone() }
    }

    /// Dataset whose column `j` is column `cols[j]` of `self`.
    pub fn select_columns(&self, cols: &[usize]) -> Dataset {
        let x = DMatrix::from_fn(self.n(), cols.len(), |i, j| self.x[(i, cols[j])]);
        Dataset { x, names: cols.iter().map(|&c| self.names[c].clone()).collect() }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let x = DMatrix::from_fn(rows.len(), self.d(), |i, j| self.x[(rows[i], j)]);
        Dataset { x, names: self.names.clone() }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.names)?;
        for row in self.x.row_iter() {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Dataset> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
        let names: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
        if names.is_empty() || names.iter().all(|s| s.is_empty()) {
            return Err(Error::Parse { line: 1, msg: "missing header row".into() });
        }
        let d = names.len();
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            if rec.len() != d {
                return Err(Error::Parse { line, msg: format!("expected {d} fields, found {}", rec.len()) });
            }
            for cell in rec.iter() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse { line, msg: format!("non-numeric cell {cell:?}") })?;
                if !v.is_finite() {
                    return Err(Error::Parse { line, msg: format!("non-finite cell {cell:?}") });
                }
                values.push(v);
            }
        }
        if values.is_empty() {
            return Err(Error::Parse { line: 2, msg: "no data rows".into() });
        }
        let n = values.len() / d;
        Dataset::new(DMatrix::from_row_slice(n, d, &values), names)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}
