//! CHD study data: CSV ingestion, complete-case filtering, group and sex
//! partitions, and feature-subset projection.
//!
//! The study works on seven numeric explanatory variables plus a binary
//! label (1 = event within the follow-up window). A row survives ingestion
//! only when all seven features and the label are present; sex may be
//! missing and then merely drops the row from per-sex analyses.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::Matrix;

/// Number of study variables X1..X7.
pub const NUM_VARIABLES: usize = 7;

/// Canonical variable names in index order X1..X7.
pub const VARIABLE_NAMES: [&str; NUM_VARIABLES] = [
    "age",
    "tot_chol",
    "sys_bp",
    "dia_bp",
    "bmi",
    "heart_rate",
    "cigs_per_day",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

impl std::str::FromStr for Sex {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Sex::Male),
            "female" | "f" => Ok(Sex::Female),
            other => Err(format!("unknown sex {other:?}")),
        }
    }
}

/// One complete-case row: seven features, label, optional sex tag.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientRecord {
    pub features: [f64; NUM_VARIABLES],
    pub chd: u8,
    pub sex: Option<Sex>,
}

/// Maps canonical column roles to CSV header names.
///
/// Defaults follow the public Kaggle export of the Framingham study:
/// `age, totChol, sysBP, diaBP, BMI, heartRate, cigsPerDay, TenYearCHD, male`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnMap {
    pub features: [String; NUM_VARIABLES],
    pub label: String,
    /// Indicator column with 1 = male, 0 = female. Optional.
    pub sex: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            features: [
                "age".into(),
                "totChol".into(),
                "sysBP".into(),
                "diaBP".into(),
                "BMI".into(),
                "heartRate".into(),
                "cigsPerDay".into(),
            ],
            label: "TenYearCHD".into(),
            sex: Some("male".into()),
        }
    }
}

impl ColumnMap {
    /// Apply overrides keyed by canonical name (`age`, ..., `cigs_per_day`,
    /// `chd`, `sex`).
    pub fn with_overrides(mut self, overrides: &HashMap<String, String>) -> Result<Self> {
        for (key, value) in overrides {
            match key.as_str() {
                "chd" | "label" => self.label = value.clone(),
                "sex" => self.sex = Some(value.clone()),
                other => {
                    let idx = VARIABLE_NAMES
                        .iter()
                        .position(|n| *n == other)
                        .ok_or_else(|| Error::MissingColumn { name: other.into() })?;
                    self.features[idx] = value.clone();
                }
            }
        }
        Ok(self)
    }
}

/// Complete-case dataset over an (optionally projected) variable subset.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    sex: Vec<Option<Sex>>,
    /// 1-based original variable indices of the retained columns, ascending.
    var_indices: Vec<usize>,
}

fn parse_cell(raw: &str) -> std::result::Result<Option<f64>, ()> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    trimmed.parse::<f64>().map(Some).map_err(|_| ())
}

/// Read a CSV file and keep the rows complete on all seven features and the
/// label. Row order is preserved. A missing sex cell keeps the row with
/// `sex = None`.
pub fn ingest_csv(path: impl AsRef<Path>, columns: &ColumnMap) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::DataFile {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);

    let header = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { name: name.into() })
    };
    let feature_cols: Vec<usize> = columns
        .features
        .iter()
        .map(|n| find(n))
        .collect::<Result<_>>()?;
    let label_col = find(&columns.label)?;
    let sex_col = match &columns.sex {
        Some(name) => Some(find(name)?),
        None => None,
    };

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut sex = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let cell = |col: usize| record.get(col).unwrap_or("");

        let mut row = [0.0; NUM_VARIABLES];
        let mut complete = true;
        for (slot, &col) in row.iter_mut().zip(&feature_cols) {
            match parse_cell(cell(col)) {
                Ok(Some(v)) if v.is_finite() => *slot = v,
                Ok(_) => {
                    complete = false;
                    break;
                }
                Err(()) => {
                    return Err(Error::BadCell {
                        row: row_idx + 2, // 1-based, after the header line
                        column: header.get(col).unwrap_or("?").to_string(),
                        value: cell(col).to_string(),
                    });
                }
            }
        }
        if !complete {
            continue;
        }
        let label = match parse_cell(cell(label_col)) {
            Ok(Some(v)) if v == 0.0 || v == 1.0 => v as u8,
            Ok(None) => continue,
            _ => {
                return Err(Error::BadCell {
                    row: row_idx + 2,
                    column: columns.label.clone(),
                    value: cell(label_col).to_string(),
                });
            }
        };
        let row_sex = match sex_col {
            Some(col) => match parse_cell(cell(col)) {
                Ok(Some(v)) if v == 1.0 => Some(Sex::Male),
                Ok(Some(v)) if v == 0.0 => Some(Sex::Female),
                _ => None,
            },
            None => None,
        };
        features.push(row.to_vec());
        labels.push(label);
        sex.push(row_sex);
    }

    Ok(Dataset {
        features,
        labels,
        sex,
        var_indices: (1..=NUM_VARIABLES).collect(),
    })
}

impl Dataset {
    /// Build from in-memory rows carrying all seven variables.
    pub fn from_records(records: Vec<PatientRecord>) -> Self {
        let mut features = Vec::with_capacity(records.len());
        let mut labels = Vec::with_capacity(records.len());
        let mut sex = Vec::with_capacity(records.len());
        for r in records {
            features.push(r.features.to_vec());
            labels.push(r.chd);
            sex.push(r.sex);
        }
        Dataset {
            features,
            labels,
            sex,
            var_indices: (1..=NUM_VARIABLES).collect(),
        }
    }

    /// Build from raw parts; `var_indices` are ascending 1-based originals.
    pub fn from_parts(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        sex: Vec<Option<Sex>>,
        var_indices: Vec<usize>,
    ) -> Self {
        assert_eq!(features.len(), labels.len());
        assert_eq!(features.len(), sex.len());
        for row in &features {
            assert_eq!(row.len(), var_indices.len());
        }
        Dataset {
            features,
            labels,
            sex,
            var_indices,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Count of positive (label 1) rows.
    pub fn n1(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    /// Count of negative (label 0) rows.
    pub fn n2(&self) -> usize {
        self.n() - self.n1()
    }

    /// Number of retained feature columns.
    pub fn p(&self) -> usize {
        self.var_indices.len()
    }

    /// Ascending 1-based original indices of the retained variables.
    pub fn var_indices(&self) -> &[usize] {
        &self.var_indices
    }

    /// Canonical names of the retained variables.
    pub fn feature_names(&self) -> Vec<&'static str> {
        self.var_indices
            .iter()
            .map(|&i| VARIABLE_NAMES[i - 1])
            .collect()
    }

    pub fn feature_row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn sex_of(&self, i: usize) -> Option<Sex> {
        self.sex[i]
    }

    /// Row indices of the positive group, in dataset order.
    pub fn group1_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == 1).collect()
    }

    /// Row indices of the negative group, in dataset order.
    pub fn group2_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == 0).collect()
    }

    /// Proportion of positive rows.
    pub fn prevalence(&self) -> Result<f64> {
        if self.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(self.n1() as f64 / self.n() as f64)
    }

    /// Rows whose sex tag equals `sex`; order preserved.
    pub fn filter_by_sex(&self, sex: Sex) -> Dataset {
        let keep: Vec<usize> = (0..self.n()).filter(|&i| self.sex[i] == Some(sex)).collect();
        self.subset_rows(&keep)
    }

    fn subset_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: rows.iter().map(|&i| self.features[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            sex: rows.iter().map(|&i| self.sex[i]).collect(),
            var_indices: self.var_indices.clone(),
        }
    }

    /// Keep only the variables with the given 1-based original indices.
    /// Labels and sex tags are untouched; columns come out in ascending
    /// index order.
    pub fn project(&self, vars: &[usize]) -> Result<Dataset> {
        if vars.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut wanted: Vec<usize> = vars.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        let positions: Vec<usize> = wanted
            .iter()
            .map(|&v| {
                self.var_indices
                    .iter()
                    .position(|&have| have == v)
                    .ok_or(Error::VariableOutOfRange {
                        index: v,
                        max: NUM_VARIABLES,
                    })
            })
            .collect::<Result<_>>()?;
        let features = self
            .features
            .iter()
            .map(|row| positions.iter().map(|&c| row[c]).collect())
            .collect();
        Ok(Dataset {
            features,
            labels: self.labels.clone(),
            sex: self.sex.clone(),
            var_indices: wanted,
        })
    }

    /// Feature matrix of the given rows, in the given order.
    pub fn matrix_of(&self, rows: &[usize]) -> Matrix {
        let picked: Vec<Vec<f64>> = rows.iter().map(|&i| self.features[i].clone()).collect();
        Matrix::from_rows(&picked)
    }

    /// Labels of the given rows, in the given order.
    pub fn labels_of(&self, rows: &[usize]) -> Vec<u8> {
        rows.iter().map(|&i| self.labels[i]).collect()
    }

    /// Stable fingerprint over shape and content, for run manifests.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(u64::to_le_bytes(self.n() as u64));
        hasher.update(u64::to_le_bytes(self.p() as u64));
        for &v in &self.var_indices {
            hasher.update(u64::to_le_bytes(v as u64));
        }
        for (row, (&label, &sex)) in self.features.iter().zip(self.labels.iter().zip(&self.sex)) {
            for x in row {
                hasher.update(x.to_le_bytes());
            }
            hasher.update([label]);
            hasher.update([match sex {
                None => 2u8,
                Some(Sex::Male) => 1,
                Some(Sex::Female) => 0,
            }]);
        }
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const HEADER: &str = "male,age,education,cigsPerDay,totChol,sysBP,diaBP,BMI,heartRate,TenYearCHD";

    fn row(sex: u8, age: f64, chd: u8) -> String {
        format!("{sex},{age},4,10,200,120,80,25.5,70,{chd}")
    }

    #[test]
    fn ingest_keeps_complete_rows_in_order() {
        let content = format!(
            "{HEADER}\n{}\n{}\n{}\n",
            row(1, 40.0, 1),
            "0,50,2,5,,130,85,27,75,0", // missing totChol
            row(0, 60.0, 0),
        );
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.feature_row(0)[0], 40.0);
        assert_eq!(d.feature_row(1)[0], 60.0);
        assert_eq!(d.n1(), 1);
        assert_eq!(d.n2(), 1);
    }

    #[test]
    fn ingest_treats_na_as_missing() {
        let content = format!("{HEADER}\n0,50,2,5,NA,130,85,27,75,0\n{}\n", row(1, 33.0, 1));
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.n(), 1);
    }

    #[test]
    fn ingest_header_only_gives_empty_dataset() {
        let f = write_csv(&format!("{HEADER}\n"));
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.n(), 0);
        assert!(matches!(d.prevalence(), Err(Error::EmptyDataset)));
    }

    #[test]
    fn ingest_rejects_junk_cell() {
        let content = format!("{HEADER}\n1,forty,4,10,200,120,80,25.5,70,1\n");
        let f = write_csv(&content);
        match ingest_csv(f.path(), &ColumnMap::default()) {
            Err(Error::BadCell { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "age");
                assert_eq!(value, "forty");
            }
            other => panic!("expected BadCell, got {other:?}"),
        }
    }

    #[test]
    fn ingest_missing_column_is_reported() {
        let f = write_csv("age,TenYearCHD\n40,1\n");
        match ingest_csv(f.path(), &ColumnMap::default()) {
            Err(Error::MissingColumn { name }) => assert_eq!(name, "totChol"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn ingest_missing_file_names_path() {
        match ingest_csv("/no/such/file.csv", &ColumnMap::default()) {
            Err(Error::DataFile { path, .. }) => assert!(path.contains("no/such")),
            other => panic!("expected DataFile, got {other:?}"),
        }
    }

    #[test]
    fn ingest_is_deterministic() {
        let content = format!("{HEADER}\n{}\n{}\n", row(1, 40.0, 1), row(0, 50.0, 0));
        let f = write_csv(&content);
        let a = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        let b = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn missing_sex_keeps_row_but_leaves_per_sex_analyses() {
        let content = format!("{HEADER}\n,40,4,10,200,120,80,25.5,70,1\n{}\n", row(1, 50.0, 0));
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.filter_by_sex(Sex::Male).n(), 1);
        assert_eq!(d.filter_by_sex(Sex::Female).n(), 0);
    }

    #[test]
    fn prevalence_all_positive() {
        let content = format!("{HEADER}\n{}\n{}\n", row(1, 40.0, 1), row(0, 50.0, 1));
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        assert_eq!(d.prevalence().unwrap(), 1.0);
    }

    #[test]
    fn group_counts_partition_after_any_filter() {
        let content = format!(
            "{HEADER}\n{}\n{}\n{}\n{}\n",
            row(1, 40.0, 1),
            row(1, 45.0, 0),
            row(0, 50.0, 1),
            row(0, 55.0, 0),
        );
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        for subset in [d.clone(), d.filter_by_sex(Sex::Male), d.filter_by_sex(Sex::Female)] {
            assert_eq!(subset.n1() + subset.n2(), subset.n());
        }
        assert_eq!(d.filter_by_sex(Sex::Male).n(), 2);
    }

    #[test]
    fn project_selects_columns_ascending() {
        let content = format!("{HEADER}\n{}\n{}\n", row(1, 40.0, 1), row(0, 50.0, 0));
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        let proj = d.project(&[7, 1, 4]).unwrap();
        assert_eq!(proj.p(), 3);
        assert_eq!(proj.var_indices(), &[1, 4, 7]);
        assert_eq!(proj.feature_names(), vec!["age", "dia_bp", "cigs_per_day"]);
        // age, diaBP, cigsPerDay of the first row
        assert_eq!(proj.feature_row(0), &[40.0, 80.0, 10.0]);
        // labels untouched: prevalence is invariant under projection
        assert_eq!(proj.prevalence().unwrap(), d.prevalence().unwrap());
    }

    #[test]
    fn project_identity_and_bounds() {
        let content = format!("{HEADER}\n{}\n", row(1, 40.0, 1));
        let f = write_csv(&content);
        let d = ingest_csv(f.path(), &ColumnMap::default()).unwrap();
        let all = d.project(&[1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert_eq!(all.feature_row(0), d.feature_row(0));
        assert!(matches!(d.project(&[]), Err(Error::EmptySubset)));
        assert!(matches!(
            d.project(&[8]),
            Err(Error::VariableOutOfRange { index: 8, .. })
        ));
    }

    #[test]
    fn column_map_overrides() {
        let map = ColumnMap::default()
            .with_overrides(&HashMap::from([
                ("age".to_string(), "AGE_YRS".to_string()),
                ("chd".to_string(), "outcome".to_string()),
            ]))
            .unwrap();
        assert_eq!(map.features[0], "AGE_YRS");
        assert_eq!(map.label, "outcome");
        assert!(ColumnMap::default()
            .with_overrides(&HashMap::from([("bogus".to_string(), "x".to_string())]))
            .is_err());
    }
}
