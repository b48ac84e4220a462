//! Column roles and the schema file.
//!
//! The schema maps each CSV column to a role. Following the source pipeline,
//! ordinal columns are one-hot encoded and nominal columns are integer-coded;
//! the roles are configurable per column, so either convention is available.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::data::table::{ColumnValues, RawTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Numeric,
    /// One-hot encoded over the frozen category list.
    OrdinalCategorical,
    /// Integer-coded by position in the frozen category list.
    NominalCategorical,
    Label,
    Dropped,
}

impl ColumnRole {
    fn parse(s: &str) -> Result<ColumnRole> {
        match s {
            "numeric" => Ok(ColumnRole::Numeric),
            "ordinal" => Ok(ColumnRole::OrdinalCategorical),
            "nominal" => Ok(ColumnRole::NominalCategorical),
            "label" => Ok(ColumnRole::Label),
            "dropped" => Ok(ColumnRole::Dropped),
            other => Err(Error::Config(format!(
                "unknown column role {other:?} (expected numeric|ordinal|nominal|label|dropped)"
            ))),
        }
    }
}

/// Per-column roles plus the label value mapping. Category lists for
/// categorical columns are frozen either from the schema file or on the first
/// table they are fitted to (order of first appearance).
#[derive(Debug, Clone)]
pub struct FeatureSchema {
    roles: BTreeMap<String, ColumnRole>,
    label_column: String,
    benign_value: String,
    attack_value: String,
    categories: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    label_column: String,
    #[serde(default = "default_benign")]
    benign_value: String,
    #[serde(default = "default_attack")]
    attack_value: String,
    columns: BTreeMap<String, String>,
    #[serde(default)]
    categories: BTreeMap<String, Vec<String>>,
}

fn default_benign() -> String {
    "benign".into()
}

fn default_attack() -> String {
    "attack".into()
}

impl FeatureSchema {
    pub fn new(
        columns: Vec<(String, ColumnRole)>,
        label_column: &str,
        benign_value: &str,
        attack_value: &str,
    ) -> Result<FeatureSchema> {
        let mut roles = BTreeMap::new();
        for (name, role) in columns {
            if role == ColumnRole::Label && name != label_column {
                return Err(Error::Config(format!(
                    "column {name:?} marked label but label_column is {label_column:?}"
                )));
            }
            if roles.insert(name.clone(), role).is_some() {
                return Err(Error::Config(format!("duplicate column {name:?} in schema")));
            }
        }
        roles.insert(label_column.to_string(), ColumnRole::Label);
        if benign_value == attack_value {
            return Err(Error::Config("benign and attack label values must differ".into()));
        }
        Ok(FeatureSchema {
            roles,
            label_column: label_column.to_string(),
            benign_value: benign_value.to_string(),
            attack_value: attack_value.to_string(),
            categories: BTreeMap::new(),
        })
    }

    pub fn from_toml_str(text: &str) -> Result<FeatureSchema> {
        let file: SchemaFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("schema file: {e}")))?;
        let mut columns = Vec::new();
        for (name, role) in &file.columns {
            columns.push((name.clone(), ColumnRole::parse(role)?));
        }
        let mut schema =
            FeatureSchema::new(columns, &file.label_column, &file.benign_value, &file.attack_value)?;
        for (col, cats) in file.categories {
            schema.set_categories(&col, cats)?;
        }
        Ok(schema)
    }

    pub fn from_toml_file(path: &Path) -> Result<FeatureSchema> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read schema {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn benign_value(&self) -> &str {
        &self.benign_value
    }

    pub fn attack_value(&self) -> &str {
        &self.attack_value
    }

    pub fn role(&self, column: &str) -> Option<ColumnRole> {
        self.roles.get(column).copied()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.roles.keys().map(String::as_str)
    }

    pub fn categories(&self, column: &str) -> Option<&[String]> {
        self.categories.get(column).map(Vec::as_slice)
    }

    pub fn set_categories(&mut self, column: &str, cats: Vec<String>) -> Result<()> {
        match self.roles.get(column) {
            Some(ColumnRole::OrdinalCategorical) | Some(ColumnRole::NominalCategorical) => {}
            _ => {
                return Err(Error::Config(format!(
                    "categories given for non-categorical column {column:?}"
                )))
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &cats {
            if !seen.insert(c) {
                return Err(Error::Config(format!(
                    "duplicate category {c:?} for column {column:?}"
                )));
            }
        }
        self.categories.insert(column.to_string(), cats);
        Ok(())
    }

    /// Freeze category lists for any categorical column that does not have
    /// one yet, in order of first appearance in `table`. Missing markers are
    /// ignored; already-frozen lists are left alone.
    pub fn freeze_categories(&mut self, table: &RawTable) -> Result<()> {
        for column in &table.columns {
            let role = self.roles.get(&column.name);
            if !matches!(
                role,
                Some(ColumnRole::OrdinalCategorical) | Some(ColumnRole::NominalCategorical)
            ) || self.categories.contains_key(&column.name)
            {
                continue;
            }
            let values = match &column.values {
                ColumnValues::Categorical(v) => v,
                ColumnValues::Numeric(_) => {
                    return Err(Error::Config(format!(
                        "column {:?} is numeric in the data but categorical in the schema",
                        column.name
                    )))
                }
            };
            let mut cats = Vec::new();
            for v in values.iter().flatten() {
                if !cats.iter().any(|c| c == v) {
                    cats.push(v.clone());
                }
            }
            self.categories.insert(column.name.clone(), cats);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_schema_file() {
        let text = r#"
label_column = "Label"
benign_value = "Benign"
attack_value = "Attack"

[columns]
duration = "numeric"
proto = "nominal"
state = "ordinal"
notes = "dropped"

[categories]
state = ["low", "high"]
"#;
        let schema = FeatureSchema::from_toml_str(text).unwrap();
        assert_eq!(schema.role("duration"), Some(ColumnRole::Numeric));
        assert_eq!(schema.role("proto"), Some(ColumnRole::NominalCategorical));
        assert_eq!(schema.role("Label"), Some(ColumnRole::Label));
        assert_eq!(schema.categories("state").unwrap(), ["low", "high"]);
        assert_eq!(schema.benign_value(), "Benign");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"
label_column = "Label"
surprise = 1

[columns]
a = "numeric"
"#;
        assert!(FeatureSchema::from_toml_str(text).is_err());
    }

    #[test]
    fn unknown_role_rejected() {
        let text = r#"
label_column = "Label"

[columns]
a = "continuous"
"#;
        assert!(matches!(FeatureSchema::from_toml_str(text), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_categories_rejected() {
        let text = r#"
label_column = "Label"

[columns]
a = "ordinal"

[categories]
a = ["x", "x"]
"#;
        assert!(FeatureSchema::from_toml_str(text).is_err());
    }
}
