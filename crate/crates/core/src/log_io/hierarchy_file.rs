use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchyTable, Perspective};
use crate::log_model::WILDCARD;

use super::csv_log::csv_error;
use super::normalize;

/// Reads a header-less hierarchy CSV (one row per leaf, leaf first, root
/// last) using the default wildcard literal.
pub fn read_hierarchy(path: &Path) -> Result<HierarchyTable> {
    read_hierarchy_with(path, WILDCARD)
}

/// Like [`read_hierarchy`] with a custom wildcard literal. Files whose first
/// line contains `;` but no `,` are read with `;` as delimiter.
pub fn read_hierarchy_with(path: &Path, wildcard: &str) -> Result<HierarchyTable> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let first = text.lines().next().unwrap_or_default();
    let delimiter = if first.contains(';') && !first.contains(',') {
        b';'
    } else {
        b','
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let rows = reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(|c| normalize(c, wildcard)).collect())
                .map_err(|e| csv_error(path, e))
        })
        .collect::<Result<Vec<Vec<String>>>>()?;
    HierarchyTable::from_rows(rows)
}

pub fn load_hierarchy(path: &Path, perspective: Perspective, wildcard: &str) -> Result<Hierarchy> {
    Ok(Hierarchy::new(
        perspective,
        read_hierarchy_with(path, wildcard)?,
    ))
}

pub fn write_hierarchy(table: &HierarchyTable, path: &Path, wildcard: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    for row in table.rows() {
        let cells = row
            .iter()
            .map(|c| if c == WILDCARD { wildcard } else { c.as_str() });
        writer.write_record(cells).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
