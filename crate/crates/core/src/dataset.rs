//! Ingestion of study-pair tables and the bundled RCT DUPLICATE dataset.
//!
//! Schema (UTF-8, header required, `#` starts a comment line):
//!
//! ```text
//! label,design,margin_hr,rct_hr,rct_lo,rct_hi,rwe_hr,rwe_lo,rwe_hi,medicare_available
//! ```

use std::collections::HashSet;
use std::io::Read;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::study::{Design, StudyEffect, StudyPair};

pub const BUNDLED_CSV: &str = include_str!("../data/rct_duplicate.csv");

pub const COLUMNS: [&str; 10] =
    ["label", "design", "margin_hr", "rct_hr", "rct_lo", "rct_hi", "rwe_hr", "rwe_lo", "rwe_hi", "medicare_available"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Bundled,
    Path(PathBuf),
}

impl std::str::FromStr for DataSource {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s == "bundled" { DataSource::Bundled } else { DataSource::Path(s.into()) })
    }
}

/// Ordered collection of study pairs with unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pairs: Vec<StudyPair>,
}

pub fn load_dataset(source: &DataSource) -> Result<Dataset> {
    match source {
        DataSource::Bundled => Ok(Dataset::bundled()),
        DataSource::Path(p) => Dataset::from_path(p),
    }
}

impl Dataset {
    pub fn new(pairs: Vec<StudyPair>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, p) in pairs.iter().enumerate() {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::Ingestion {
                    row: i + 1,
                    column: Some("label".into()),
                    message: format!("duplicate label `{}`", p.label),
                });
            }
        }
        Ok(Dataset { pairs })
    }

    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_CSV.as_bytes()).expect("bundled dataset is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let headers =
            rdr.headers().map_err(|e| Error::Ingestion { row: 0, column: None, message: e.to_string() })?.clone();
        let mut index = [0usize; COLUMNS.len()];
        for (slot, name) in index.iter_mut().zip(COLUMNS) {
            *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::Ingestion {
                row: 0,
                column: Some(name.into()),
                message: "missing column in header".into(),
            })?;
        }

        let mut pairs = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| Error::Ingestion { row, column: None, message: e.to_string() })?;
            let field = |k: usize| record.get(index[k]).unwrap_or("");
            let err = |k: usize, message: String| Error::Ingestion { row, column: Some(COLUMNS[k].into()), message };
            let number = |k: usize| -> Result<f64> {
                let v: f64 = field(k).parse().map_err(|_| err(k, format!("`{}` is not a number", field(k))))?;
                if v > 0.0 && v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(k, format!("must be positive, got {v}")))
                }
            };

            let label = field(0).to_string();
            if label.is_empty() {
                return Err(err(0, "empty label".into()));
            }
            let design: Design = field(1).parse().map_err(|e: Error| err(1, e.to_string()))?;
            let margin = number(2)?;
            let original = StudyEffect::new(number(3)?, number(4)?, number(5)?)
                .map_err(|e| err(3, format!("original study: {e}")))?;
            let replication = StudyEffect::new(number(6)?, number(7)?, number(8)?)
                .map_err(|e| err(6, format!("replication study: {e}")))?;
            let medicare = match field(9).to_ascii_lowercase().as_str() {
                "true" => true,
                "false" => false,
                other => return Err(err(9, format!("expected true or false, got `{other}`"))),
            };
            let pair = StudyPair::new(label, design, margin, original, replication, medicare)
                .map_err(|e| err(2, e.to_string()))?;
            pairs.push(pair);
        }
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[StudyPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, StudyPair> {
        self.pairs.iter()
    }

    pub fn get(&self, label: &str) -> Option<&StudyPair> {
        self.pairs.iter().find(|p| p.label.eq_ignore_ascii_case(label))
    }

    /// Copy without the listed labels (case-insensitive).
    pub fn without(&self, labels: &[String]) -> Dataset {
        let pairs =
            self.pairs.iter().filter(|p| !labels.iter().any(|l| l.eq_ignore_ascii_case(&p.label))).cloned().collect();
        Dataset { pairs }
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a StudyPair;
    type IntoIter = std::slice::Iter<'a, StudyPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}
