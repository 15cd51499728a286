use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::log_model::{Event, EventLog, Trace, MISSING, WILDCARD};

use super::normalize;

/// Column that carries origin indices in logs written by this crate.
pub const ORIGIN_COLUMN: &str = "origin_index";

/// Column mapping of a log CSV file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCsvSpec {
    pub case_column: String,
    pub activity_column: String,
    pub attribute_columns: Vec<String>,
    pub delimiter: u8,
    /// Column holding origin indices. Without it every row is an original
    /// event and gets its position in the trace as origin index.
    pub origin_column: Option<String>,
    /// Literal used for the wildcard in the file.
    pub wildcard: String,
}

impl LogCsvSpec {
    pub fn new(case_column: &str, activity_column: &str, attribute_columns: &[&str]) -> Self {
        LogCsvSpec {
            case_column: case_column.to_string(),
            activity_column: activity_column.to_string(),
            attribute_columns: attribute_columns.iter().map(|s| s.to_string()).collect(),
            delimiter: b',',
            origin_column: None,
            wildcard: WILDCARD.to_string(),
        }
    }

    /// Takes every header column other than the case, activity and origin
    /// columns as an attribute. The origin column is used when present.
    pub fn infer(
        path: &Path,
        case_column: &str,
        activity_column: &str,
        delimiter: u8,
    ) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(|h| normalize(h, WILDCARD))
            .collect();
        let has_origin = header.iter().any(|h| h == ORIGIN_COLUMN);
        let attributes: Vec<&str> = header
            .iter()
            .map(String::as_str)
            .filter(|h| *h != case_column && *h != activity_column && *h != ORIGIN_COLUMN)
            .collect();
        let mut spec = LogCsvSpec::new(case_column, activity_column, &attributes);
        spec.delimiter = delimiter;
        spec.origin_column = has_origin.then(|| ORIGIN_COLUMN.to_string());
        Ok(spec)
    }

    pub fn with_origin_column(mut self) -> Self {
        self.origin_column = Some(ORIGIN_COLUMN.to_string());
        self
    }

    pub fn with_wildcard(mut self, literal: &str) -> Self {
        self.wildcard = literal.to_string();
        self
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        let all = [&self.case_column, &self.activity_column]
            .into_iter()
            .chain(&self.attribute_columns)
            .chain(&self.origin_column);
        for name in all {
            if !seen.insert(name) {
                return Err(Error::Config(format!(
                    "column `{name}` mapped more than once"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    if !e.is_io_error() {
        return Error::Csv(e);
    }
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Internal(format!("csv: {other:?}")),
    }
}

/// Rows are grouped into traces by case id, in order of first appearance;
/// row order gives event order. Empty attribute cells become the missing
/// value literal.
pub fn read_log_csv(path: &Path, spec: &LogCsvSpec) -> Result<EventLog> {
    spec.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .flexible(true)
        .from_reader(File::open(path).map_err(|e| Error::io(path, e))?);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| normalize(h, WILDCARD))
        .collect();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let case_col = column(&spec.case_column)?;
    let act_col = column(&spec.activity_column)?;
    let attr_cols = spec
        .attribute_columns
        .iter()
        .map(|c| column(c))
        .collect::<Result<Vec<_>>>()?;
    let origin_col = spec.origin_column.as_deref().map(column).transpose()?;

    let mut order: Vec<String> = Vec::new();
    let mut events: HashMap<String, Vec<Event>> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let case = normalize(&record[case_col], &spec.wildcard);
        let activity = normalize(&record[act_col], &spec.wildcard);
        if activity.is_empty() {
            return Err(Error::InvalidLog(format!("line {line}: empty activity")));
        }
        let attributes = attr_cols
            .iter()
            .map(|&c| match &record[c] {
                "" => MISSING.to_string(),
                v => normalize(v, &spec.wildcard),
            })
            .collect();
        let trace = events.entry(case.clone()).or_insert_with(|| {
            order.push(case);
            Vec::new()
        });
        let origin_index = match origin_col {
            None => Some(trace.len()),
            Some(c) => match record[c].trim() {
                "" => None,
                v => Some(v.parse::<usize>().map_err(|_| {
                    Error::InvalidLog(format!("line {line}: origin index `{v}` is not a number"))
                })?),
            },
        };
        trace.push(Event::new(activity, attributes, origin_index));
    }
    if order.is_empty() {
        return Err(Error::EmptyLog);
    }
    let traces = order
        .into_iter()
        .map(|case| {
            let evs = events.remove(&case).unwrap_or_default();
            Trace::new(case, evs)
        })
        .collect();
    EventLog::new(spec.attribute_columns.clone(), traces)
}

pub fn write_log_csv(log: &EventLog, path: &Path, spec: &LogCsvSpec) -> Result<()> {
    spec.validate()?;
    if log.schema() != spec.attribute_columns.as_slice() {
        return Err(Error::Config(format!(
            "log schema {:?} does not match the attribute columns {:?}",
            log.schema(),
            spec.attribute_columns
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .delimiter(spec.delimiter)
        .from_writer(file);
    let cell = |v: &str| -> String {
        if v == WILDCARD {
            spec.wildcard.clone()
        } else {
            v.to_string()
        }
    };
    let mut header = vec![spec.case_column.clone(), spec.activity_column.clone()];
    header.extend(spec.attribute_columns.iter().cloned());
    header.extend(spec.origin_column.iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| csv_error(path, e))?;
    for trace in log.traces() {
        for event in &trace.events {
            let mut row = vec![trace.case_id.clone(), cell(&event.activity)];
            row.extend(event.attributes.iter().map(|v| cell(v)));
            if spec.origin_column.is_some() {
                row.push(
                    event
                        .origin_index
                        .map(|i| i.to_string())
                        .unwrap_or_default(),
                );
            }
            writer.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))
}
