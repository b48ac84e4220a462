//! Turn an imputed `RawTable` into a numeric `Dataset`.

use crate::data::schema::{ColumnRole, FeatureSchema};
use crate::data::table::{ColumnValues, RawTable};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Encode features and map labels to {0, 1}. Ordinal columns expand to one
/// one-hot indicator per frozen category; nominal columns become the integer
/// code of the value's position in the frozen list; numeric columns pass
/// through. Columns appear in table (CSV header) order.
pub fn encode(table: &RawTable, schema: &FeatureSchema) -> Result<Dataset> {
    let n = table.n_rows;
    let mut feature_names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();

    for column in &table.columns {
        if column.values.has_missing() {
            return Err(Error::Data(format!(
                "column {:?} still has missing values; impute before encoding",
                column.name
            )));
        }
        let role = schema
            .role(&column.name)
            .ok_or_else(|| Error::Data(format!("column {:?} not in schema", column.name)))?;
        match (role, &column.values) {
            (ColumnRole::Numeric, ColumnValues::Numeric(values)) => {
                feature_names.push(column.name.clone());
                columns.push(values.iter().map(|v| v.expect("imputed")).collect());
            }
            (ColumnRole::OrdinalCategorical, ColumnValues::Categorical(values)) => {
                let cats = schema.categories(&column.name).ok_or_else(|| {
                    Error::Config(format!("no frozen categories for column {:?}", column.name))
                })?;
                let mut indicator = vec![vec![0.0; n]; cats.len()];
                for (row, value) in values.iter().enumerate() {
                    let value = value.as_ref().expect("imputed");
                    let pos = cats.iter().position(|c| c == value).ok_or_else(|| {
                        Error::Data(format!(
                            "unseen category {value:?} in column {:?}",
                            column.name
                        ))
                    })?;
                    indicator[pos][row] = 1.0;
                }
                for (cat, col) in cats.iter().zip(indicator) {
                    feature_names.push(format!("{}={cat}", column.name));
                    columns.push(col);
                }
            }
            (ColumnRole::NominalCategorical, ColumnValues::Categorical(values)) => {
                let cats = schema.categories(&column.name).ok_or_else(|| {
                    Error::Config(format!("no frozen categories for column {:?}", column.name))
                })?;
                let mut codes = Vec::with_capacity(n);
                for value in values {
                    let value = value.as_ref().expect("imputed");
                    let pos = cats.iter().position(|c| c == value).ok_or_else(|| {
                        Error::Data(format!(
                            "unseen category {value:?} in column {:?}",
                            column.name
                        ))
                    })?;
                    codes.push(pos as f64);
                }
                feature_names.push(column.name.clone());
                columns.push(codes);
            }
            (role, _) => {
                return Err(Error::Config(format!(
                    "column {:?}: role {role:?} does not match the parsed column kind",
                    column.name
                )));
            }
        }
    }

    let mut features = Matrix::zeros(n, columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            features.set(i, j, v);
        }
    }
    let labels: Vec<u8> = table
        .labels
        .iter()
        .map(|l| {
            if l == schema.benign_value() {
                Ok(0u8)
            } else if l == schema.attack_value() {
                Ok(1u8)
            } else {
                Err(Error::Data(format!("unmapped label value {l:?}")))
            }
        })
        .collect::<Result<_>>()?;
    Dataset::new(features, labels, feature_names)
}
