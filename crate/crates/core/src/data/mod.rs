//! Column-typed tables, sufficient statistics and synthetic data.

pub(crate) mod contingency;
pub(crate) mod correlation;
mod fit;

pub use contingency::{configurations, contingency_counts, ContingencyTable};
pub use correlation::{correlation_matrix, partial_correlation, partial_from_correlation, residuals};
pub use fit::{fit_mle, forward_sample, FittedNetwork, Local};

use std::collections::{BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Column {
    /// Factor with an ordered level list and per-row level indices.
    Categorical { levels: Vec<String>, codes: Vec<u32> },
    Numeric(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical { codes, .. } => codes.len(),
            Column::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Discrete,
    Continuous,
}

impl std::str::FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(DataKind::Discrete),
            "continuous" => Ok(DataKind::Continuous),
            other => Err(Error::InvalidArgument(format!("unknown data type '{other}'"))),
        }
    }
}

/// A homogeneous table: every column categorical or every column numeric.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    columns: Vec<Column>,
    kind: DataKind,
    n: usize,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if names.is_empty() || names.len() != columns.len() {
            return Err(Error::Data("a dataset needs one name per column and at least one column".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !crate::graph::valid_label(name) {
                return Err(Error::InvalidLabel(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }
        let n = columns[0].len();
        let mut categorical = 0;
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != n {
                return Err(Error::Data(format!("column '{name}' has {} rows, expected {n}", col.len())));
            }
            match col {
                Column::Categorical { levels, codes } => {
                    categorical += 1;
                    if levels.len() < 2 {
                        return Err(Error::Data(format!("column '{name}' has fewer than two levels")));
                    }
                    if codes.iter().any(|&c| c as usize >= levels.len()) {
                        return Err(Error::Data(format!("column '{name}' has codes outside its levels")));
                    }
                }
                Column::Numeric(v) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Data(format!("column '{name}' has non-finite values")));
                    }
                }
            }
        }
        let kind = match categorical {
            0 => DataKind::Continuous,
            c if c == columns.len() => DataKind::Discrete,
            _ => return Err(Error::MixedData),
        };
        Ok(Dataset { names, index, columns, kind, n })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn kind(&self) -> DataKind {
        self.kind
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// Number of levels of a categorical column (0 for numeric ones).
    pub fn n_levels(&self, i: usize) -> usize {
        match &self.columns[i] {
            Column::Categorical { levels, .. } => levels.len(),
            Column::Numeric(_) => 0,
        }
    }

    pub fn levels(&self, i: usize) -> &[String] {
        match &self.columns[i] {
            Column::Categorical { levels, .. } => levels,
            Column::Numeric(_) => &[],
        }
    }

    /// Level codes of a categorical column; empty for numeric columns.
    pub fn codes(&self, i: usize) -> &[u32] {
        match &self.columns[i] {
            Column::Categorical { codes, .. } => codes,
            Column::Numeric(_) => &[],
        }
    }

    /// Values of a numeric column; empty for categorical columns.
    pub fn values(&self, i: usize) -> &[f64] {
        match &self.columns[i] {
            Column::Numeric(v) => v,
            Column::Categorical { .. } => &[],
        }
    }

    pub(crate) fn require(&self, kind: DataKind, what: &str) -> Result<()> {
        if self.kind != kind {
            let needed = match kind {
                DataKind::Discrete => "discrete",
                DataKind::Continuous => "continuous",
            };
            return Err(Error::DataType(what.to_string(), needed));
        }
        Ok(())
    }

    /// The same data with columns in the given order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset> {
        let mut cols = Vec::with_capacity(names.len());
        for name in names {
            cols.push(self.columns[self.index_of(name.as_ref())?].clone());
        }
        Dataset::new(names.iter().map(|s| s.as_ref().to_string()).collect(), cols)
    }

    /// Reads delimited text with a header row. Columns that parse entirely as
    /// numbers are numeric unless `hint` forces discrete; the delimiter is
    /// detected among comma, tab and semicolon unless given.
    pub fn load(path: impl AsRef<Path>, hint: Option<DataKind>, delimiter: Option<u8>) -> Result<Dataset> {
        let mut text = String::new();
        std::fs::File::open(path.as_ref())?.read_to_string(&mut text)?;
        Dataset::parse(&text, hint, delimiter)
    }

    pub fn parse(text: &str, hint: Option<DataKind>, delimiter: Option<u8>) -> Result<Dataset> {
        let header = text.lines().next().unwrap_or("").trim();
        if header.is_empty() {
            return Err(Error::Data("empty file".into()));
        }
        let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(header));
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Data(format!("row {}: {e}", row + 2)))?;
            if record.len() != names.len() {
                return Err(Error::Data(format!(
                    "ragged row {}: {} fields, expected {}",
                    row + 2,
                    record.len(),
                    names.len()
                )));
            }
            for (col, field) in raw.iter_mut().zip(record.iter()) {
                col.push(field.to_string());
            }
        }
        if raw.first().is_none_or(|c| c.is_empty()) {
            return Err(Error::Data("no data rows".into()));
        }

        let numeric: Vec<Option<Vec<f64>>> = raw
            .iter()
            .map(|col| col.iter().map(|s| s.parse::<f64>().ok()).collect::<Option<Vec<f64>>>())
            .collect();
        let all_numeric = numeric.iter().all(Option::is_some);
        let any_numeric = numeric.iter().any(Option::is_some);
        let kind = match hint {
            Some(k) => k,
            None if all_numeric => DataKind::Continuous,
            None if any_numeric => return Err(Error::MixedData),
            None => DataKind::Discrete,
        };
        let columns = match kind {
            DataKind::Continuous => numeric
                .into_iter()
                .zip(&names)
                .map(|(c, name)| {
                    c.map(Column::Numeric)
                        .ok_or_else(|| Error::Data(format!("column '{name}' is not numeric")))
                })
                .collect::<Result<Vec<_>>>()?,
            DataKind::Discrete => raw.into_iter().map(factor).collect(),
        };
        Dataset::new(names, columns)
    }

    pub fn write(&self, path: impl AsRef<Path>, delimiter: u8) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file), delimiter)
    }

    pub fn write_to<W: Write>(&self, sink: W, delimiter: u8) -> Result<()> {
        let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(sink);
        w.write_record(&self.names)?;
        let mut row = Vec::with_capacity(self.columns.len());
        for r in 0..self.n {
            row.clear();
            for col in &self.columns {
                row.push(match col {
                    Column::Categorical { levels, codes } => levels[codes[r] as usize].clone(),
                    Column::Numeric(v) => format!("{}", v[r]),
                });
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn detect_delimiter(header: &str) -> u8 {
    b",\t;"
        .iter()
        .copied()
        .max_by_key(|&d| header.bytes().filter(|&b| b == d).count())
        .filter(|&d| header.as_bytes().contains(&d))
        .unwrap_or(b',')
}

/// Sorted level list and codes for a text column.
fn factor(values: Vec<String>) -> Column {
    let levels: Vec<String> = values.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let lookup: HashMap<&str, u32> = levels.iter().enumerate().map(|(i, l)| (l.as_str(), i as u32)).collect();
    let codes = values.iter().map(|v| lookup[v.as_str()]).collect();
    Column::Categorical { levels, codes }
}
