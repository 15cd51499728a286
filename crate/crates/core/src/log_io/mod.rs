//! Reading and writing event logs, hierarchy files and pipeline
//! configuration.

mod config;
mod csv_log;
mod hierarchy_file;
mod xes;

use std::path::Path;

use unicode_normalization::UnicodeNormalization;

pub use config::{HierarchyFiles, InputSpec, PipelineConfig};
pub use csv_log::{read_log_csv, write_log_csv, LogCsvSpec, ORIGIN_COLUMN};
pub use hierarchy_file::{load_hierarchy, read_hierarchy, read_hierarchy_with, write_hierarchy};
pub use xes::{parse_xes, read_log_xes};

pub use crate::hierarchy::HierarchyTable;

use crate::error::Result;
use crate::log_model::{EventLog, WILDCARD};

/// NFC form of a label, with the configured wildcard literal mapped to the
/// internal wildcard.
pub(crate) fn normalize(cell: &str, wildcard: &str) -> String {
    let s: String = cell.nfc().collect();
    if s == wildcard {
        WILDCARD.to_string()
    } else {
        s
    }
}

pub(crate) fn is_xes(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("xes"))
}

/// Reads a log, picking the format from the file extension. CSV files use
/// `spec`; XES files ignore it.
pub fn read_log(path: &Path, spec: &LogCsvSpec) -> Result<EventLog> {
    if is_xes(path) {
        read_log_xes(path)
    } else {
        read_log_csv(path, spec)
    }
}
