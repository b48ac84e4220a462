//! Raw table ingestion: CSV loading, duplicate removal, imputation.

use std::collections::HashSet;
use std::path::Path;

use crate::data::schema::{ColumnRole, FeatureSchema};
use crate::error::{Error, Result};

/// Sentinel strings treated as missing values on ingest.
const MISSING_SENTINELS: [&str; 3] = ["", "NA", "NaN"];

#[derive(Debug, Clone)]
pub enum ColumnValues {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_missing(&self) -> bool {
        match self {
            ColumnValues::Numeric(v) => v.iter().any(Option::is_none),
            ColumnValues::Categorical(v) => v.iter().any(Option::is_none),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RawColumn {
    pub name: String,
    pub values: ColumnValues,
}

/// Parsed table: feature columns in CSV order plus the raw label strings.
/// The label column is validated on load and never has missing values.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
    pub labels: Vec<String>,
    pub n_rows: usize,
}

fn is_missing(field: &str) -> bool {
    MISSING_SENTINELS.contains(&field)
}

/// Load a CSV against a schema. The header must agree with the schema's
/// column set exactly (mark ignorable columns as `dropped`). Exact duplicate
/// rows are removed, keeping the first occurrence.
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Data(format!("cannot read header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();

    // header and schema must describe the same column set
    for name in &header {
        if schema.role(name).is_none() {
            return Err(Error::Data(format!(
                "column {name:?} in {} is not in the schema",
                path.display()
            )));
        }
    }
    for name in schema.column_names() {
        if !header.iter().any(|h| h == name) {
            return Err(Error::Data(format!(
                "schema column {name:?} missing from {}",
                path.display()
            )));
        }
    }

    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut records: Vec<Vec<String>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("row {}: {e}", row_idx + 2)))?;
        if record.len() != header.len() {
            return Err(Error::Data(format!(
                "row {}: {} fields, expected {}",
                row_idx + 2,
                record.len(),
                header.len()
            )));
        }
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if seen.insert(fields.clone()) {
            records.push(fields);
        }
    }
    let n_rows = records.len();

    let mut columns = Vec::new();
    let mut labels = Vec::with_capacity(n_rows);
    for (col_idx, name) in header.iter().enumerate() {
        let role = schema.role(name).expect("checked above");
        match role {
            ColumnRole::Dropped => {}
            ColumnRole::Label => {
                for (row_idx, rec) in records.iter().enumerate() {
                    let field = &rec[col_idx];
                    if field != schema.benign_value() && field != schema.attack_value() {
                        return Err(Error::Data(format!(
                            "row {}, column {name:?}: label value {field:?} is neither \
                             {:?} nor {:?}",
                            row_idx + 2,
                            schema.benign_value(),
                            schema.attack_value()
                        )));
                    }
                    labels.push(field.clone());
                }
            }
            ColumnRole::Numeric => {
                let mut values = Vec::with_capacity(n_rows);
                for (row_idx, rec) in records.iter().enumerate() {
                    let field = &rec[col_idx];
                    if is_missing(field) {
                        values.push(None);
                    } else {
                        let v: f64 = field.parse().map_err(|_| {
                            Error::Data(format!(
                                "row {}, column {name:?}: cannot parse {field:?} as a number",
                                row_idx + 2
                            ))
                        })?;
                        values.push(Some(v));
                    }
                }
                columns.push(RawColumn { name: name.clone(), values: ColumnValues::Numeric(values) });
            }
            ColumnRole::OrdinalCategorical | ColumnRole::NominalCategorical => {
                let values = records
                    .iter()
                    .map(|rec| {
                        let field = &rec[col_idx];
                        if is_missing(field) { None } else { Some(field.clone()) }
                    })
                    .collect();
                columns.push(RawColumn {
                    name: name.clone(),
                    values: ColumnValues::Categorical(values),
                });
            }
        }
    }
    Ok(RawTable { columns, labels, n_rows })
}

/// Fill missing values: numeric columns take the mean of observed values,
/// categorical columns the mode (ties broken lexicographically).
pub fn impute(table: &RawTable) -> Result<RawTable> {
    let mut out = table.clone();
    for column in &mut out.columns {
        match &mut column.values {
            ColumnValues::Numeric(values) => {
                let observed: Vec<f64> = values.iter().flatten().copied().collect();
                if observed.is_empty() {
                    return Err(Error::Config(format!(
                        "column {:?} has no observed values to impute from",
                        column.name
                    )));
                }
                let mean = observed.iter().sum::<f64>() / observed.len() as f64;
                for v in values.iter_mut() {
                    if v.is_none() {
                        *v = Some(mean);
                    }
                }
            }
            ColumnValues::Categorical(values) => {
                let mut counts: std::collections::BTreeMap<&String, usize> =
                    std::collections::BTreeMap::new();
                for v in values.iter().flatten() {
                    *counts.entry(v).or_insert(0) += 1;
                }
                if counts.is_empty() {
                    return Err(Error::Config(format!(
                        "column {:?} has no observed values to impute from",
                        column.name
                    )));
                }
                // max count; BTreeMap iteration order breaks ties lexicographically
                let mode = counts
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                    .map(|(name, _)| (*name).clone())
                    .expect("non-empty");
                for v in values.iter_mut() {
                    if v.is_none() {
                        *v = Some(mode.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric_col(name: &str, values: Vec<Option<f64>>) -> RawColumn {
        RawColumn { name: name.into(), values: ColumnValues::Numeric(values) }
    }

    fn cat_col(name: &str, values: Vec<Option<&str>>) -> RawColumn {
        RawColumn {
            name: name.into(),
            values: ColumnValues::Categorical(
                values.into_iter().map(|v| v.map(str::to_string)).collect(),
            ),
        }
    }

    #[test]
    fn impute_numeric_mean() {
        let table = RawTable {
            columns: vec![numeric_col("x", vec![Some(1.0), None, Some(3.0)])],
            labels: vec!["benign".into(); 3],
            n_rows: 3,
        };
        let out = impute(&table).unwrap();
        match &out.columns[0].values {
            ColumnValues::Numeric(v) => assert_eq!(v, &vec![Some(1.0), Some(2.0), Some(3.0)]),
            ColumnValues::Categorical(_) => panic!("wrong column kind"),
        }
    }

    #[test]
    fn impute_categorical_mode() {
        let table = RawTable {
            columns: vec![cat_col("c", vec![Some("a"), Some("a"), None, Some("b")])],
            labels: vec!["benign".into(); 4],
            n_rows: 4,
        };
        let out = impute(&table).unwrap();
        match &out.columns[0].values {
            ColumnValues::Categorical(v) => assert_eq!(v[2].as_deref(), Some("a")),
            ColumnValues::Numeric(_) => panic!("wrong column kind"),
        }
    }

    #[test]
    fn impute_mode_tie_is_lexicographic() {
        let table = RawTable {
            columns: vec![cat_col("c", vec![Some("y"), Some("x"), None])],
            labels: vec!["benign".into(); 3],
            n_rows: 3,
        };
        let out = impute(&table).unwrap();
        match &out.columns[0].values {
            ColumnValues::Categorical(v) => assert_eq!(v[2].as_deref(), Some("x")),
            ColumnValues::Numeric(_) => panic!("wrong column kind"),
        }
    }

    #[test]
    fn impute_all_missing_is_config_error() {
        let table = RawTable {
            columns: vec![numeric_col("x", vec![None, None])],
            labels: vec!["benign".into(); 2],
            n_rows: 2,
        };
        assert!(matches!(impute(&table), Err(Error::Config(_))));
    }
}
