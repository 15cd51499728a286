//! Pipeline configuration, stored as TOML:
//!
//! ```toml
//! k = 5
//! quasi_identifiers = ["org:role"]
//! vectorization = "msa"           # or "naive"
//! utility_notion = "class_count"  # or "size_balance"
//! level_weights = [1.0, 0.5]
//! drop_singletons = true
//!
//! [input]
//! case_column = "case"
//! activity_column = "activity"
//!
//! [hierarchies]
//! activity = "activity.csv"
//! "org:role" = ["role_a.csv", "role_b.csv"]
//! ```
//!
//! Hierarchy paths are relative to the configuration file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::log_model::WILDCARD;
use crate::selector::UtilityNotion;
use crate::vectorizer::Strategy;

use super::csv_log::LogCsvSpec;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
enum OneOrMany {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

impl From<OneOrMany> for Vec<PathBuf> {
    fn from(v: OneOrMany) -> Self {
        match v {
            OneOrMany::One(p) => vec![p],
            OneOrMany::Many(ps) => ps,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
struct RawHierarchies {
    activity: OneOrMany,
    #[serde(flatten)]
    attributes: BTreeMap<String, OneOrMany>,
}

/// Candidate hierarchy files per perspective, as written in the config.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HierarchyFiles {
    pub activity: Vec<PathBuf>,
    pub attributes: BTreeMap<String, Vec<PathBuf>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default = "default_case")]
    pub case_column: String,
    #[serde(default = "default_activity")]
    pub activity_column: String,
    /// All remaining header columns when absent.
    #[serde(default)]
    pub attribute_columns: Option<Vec<String>>,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
}

fn default_case() -> String {
    "case".into()
}
fn default_activity() -> String {
    "activity".into()
}
fn default_delimiter() -> char {
    ','
}

impl Default for InputSpec {
    fn default() -> Self {
        InputSpec {
            case_column: default_case(),
            activity_column: default_activity(),
            attribute_columns: None,
            delimiter: default_delimiter(),
        }
    }
}

impl InputSpec {
    pub fn delimiter_byte(&self) -> Result<u8> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| Error::Config(format!("delimiter `{}` is not ASCII", self.delimiter)))
    }

    /// Column mapping for a concrete input file.
    pub fn csv_spec(&self, path: &Path, wildcard: &str) -> Result<LogCsvSpec> {
        let delimiter = self.delimiter_byte()?;
        let mut spec = match &self.attribute_columns {
            Some(cols) => {
                let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
                let mut s = LogCsvSpec::new(&self.case_column, &self.activity_column, &cols);
                s.delimiter = delimiter;
                s
            }
            None => LogCsvSpec::infer(path, &self.case_column, &self.activity_column, delimiter)?,
        };
        spec.wildcard = wildcard.to_string();
        Ok(spec)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    k: usize,
    #[serde(default)]
    quasi_identifiers: Vec<String>,
    hierarchies: RawHierarchies,
    #[serde(default)]
    vectorization: Strategy,
    #[serde(default)]
    utility_notion: UtilityNotion,
    #[serde(default)]
    level_weights: Vec<f64>,
    #[serde(default)]
    drop_singletons: bool,
    #[serde(default)]
    attribute_costs: BTreeMap<String, usize>,
    #[serde(default)]
    input: InputSpec,
    #[serde(default)]
    wildcard_literal: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub k: usize,
    pub quasi_identifiers: Vec<String>,
    /// Paths as written in the file.
    pub hierarchy_files: HierarchyFiles,
    pub vectorization: Strategy,
    pub utility_notion: UtilityNotion,
    pub level_weights: Vec<f64>,
    pub drop_singletons: bool,
    pub attribute_costs: BTreeMap<String, usize>,
    pub input: InputSpec,
    pub wildcard_literal: String,
    /// Directory that relative hierarchy paths are resolved against.
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let config = PipelineConfig {
            k: raw.k,
            quasi_identifiers: raw.quasi_identifiers,
            hierarchy_files: HierarchyFiles {
                activity: raw.hierarchies.activity.into(),
                attributes: raw
                    .hierarchies
                    .attributes
                    .into_iter()
                    .map(|(k, v)| (k, v.into()))
                    .collect(),
            },
            vectorization: raw.vectorization,
            utility_notion: raw.utility_notion,
            level_weights: raw.level_weights,
            drop_singletons: raw.drop_singletons,
            attribute_costs: raw.attribute_costs,
            input: raw.input,
            wildcard_literal: raw.wildcard_literal.unwrap_or_else(|| WILDCARD.to_string()),
            base_dir: base_dir.to_path_buf(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.hierarchy_files.activity.is_empty() {
            return Err(Error::Config("no activity hierarchy configured".into()));
        }
        for qi in &self.quasi_identifiers {
            if self
                .hierarchy_files
                .attributes
                .get(qi)
                .is_none_or(Vec::is_empty)
            {
                return Err(Error::Config(format!(
                    "quasi-identifier `{qi}` has no hierarchy file"
                )));
            }
        }
        if let Some(w) = self
            .level_weights
            .iter()
            .find(|w| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Config(format!(
                "level weight {w} is not a non-negative number"
            )));
        }
        if self.wildcard_literal.is_empty() {
            return Err(Error::Config("wildcard literal must not be empty".into()));
        }
        self.input.delimiter_byte()?;
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}
