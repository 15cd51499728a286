//! Events, traces and logs, plus the variant and equivalence-class views over
//! them.
//!
//! Attribute values of an event are stored positionally, aligned with the
//! schema of the log that owns the event. All string comparison is exact;
//! the readers in [`crate::log_io`] normalize every label to NFC on the way
//! in.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// The wildcard label that roots every hierarchy and fills inserted events.
pub const WILDCARD: &str = "⋆";

/// Reserved literal for attribute values absent from the source data.
pub const MISSING: &str = "⊥";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub activity: String,
    /// Values in schema order.
    pub attributes: Vec<String>,
    /// Position of the event in the trace as it was read, before any
    /// wildcard events were inserted.
    pub origin_index: Option<usize>,
}

impl Event {
    pub fn new(
        activity: impl Into<String>,
        attributes: Vec<String>,
        origin_index: Option<usize>,
    ) -> Self {
        Event {
            activity: activity.into(),
            attributes,
            origin_index,
        }
    }

    /// An inserted event carrying the wildcard everywhere.
    pub fn wildcard(width: usize) -> Self {
        Event {
            activity: WILDCARD.to_string(),
            attributes: vec![WILDCARD.to_string(); width],
            origin_index: None,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.origin_index.is_none()
            && self.activity == WILDCARD
            && self.attributes.iter().all(|v| v == WILDCARD)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub case_id: String,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(case_id: impl Into<String>, events: Vec<Event>) -> Self {
        Trace {
            case_id: case_id.into(),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The activity sequence, wildcards included.
    pub fn control_flow(&self) -> Vec<&str> {
        self.events.iter().map(|e| e.activity.as_str()).collect()
    }

    /// Events that stem from the input trace, i.e. everything that carries
    /// an origin index.
    pub fn original_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.origin_index.is_some())
    }
}

/// Free-function form of [`Trace::control_flow`] with owned labels.
pub fn control_flow(trace: &Trace) -> Vec<String> {
    trace.events.iter().map(|e| e.activity.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventLog {
    schema: Vec<String>,
    traces: Vec<Trace>,
}

impl EventLog {
    /// Builds a log after checking schema conformance, case id uniqueness
    /// and origin index ordering.
    pub fn new(schema: Vec<String>, traces: Vec<Trace>) -> Result<Self> {
        let mut names = HashSet::new();
        for name in &schema {
            if !names.insert(name.as_str()) {
                return Err(Error::InvalidLog(format!(
                    "attribute `{name}` listed twice in schema"
                )));
            }
        }
        let mut cases = HashSet::new();
        for trace in &traces {
            if !cases.insert(trace.case_id.as_str()) {
                return Err(Error::InvalidLog(format!(
                    "case id `{}` used by more than one trace",
                    trace.case_id
                )));
            }
            let mut last: Option<usize> = None;
            for event in &trace.events {
                if event.attributes.len() != schema.len() {
                    return Err(Error::InvalidLog(format!(
                        "trace `{}`: event has {} attribute values, schema has {}",
                        trace.case_id,
                        event.attributes.len(),
                        schema.len()
                    )));
                }
                if let Some(idx) = event.origin_index {
                    if last.is_some_and(|prev| prev >= idx) {
                        return Err(Error::InvalidLog(format!(
                            "trace `{}`: origin indices are not strictly increasing",
                            trace.case_id
                        )));
                    }
                    last = Some(idx);
                }
            }
        }
        Ok(EventLog { schema, traces })
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Trace>) {
        (self.schema, self.traces)
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn trace(&self, case_id: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.case_id == case_id)
    }

    pub fn max_trace_len(&self) -> usize {
        self.traces.iter().map(Trace::len).max().unwrap_or(0)
    }

    /// Replaces the traces while keeping the schema. Used by transformations
    /// that preserve schema conformance by construction.
    pub(crate) fn with_traces(&self, traces: Vec<Trace>) -> Self {
        EventLog {
            schema: self.schema.clone(),
            traces,
        }
    }
}

/// Distinct control-flows with their multiplicities, in order of first
/// appearance.
pub fn variants(log: &EventLog) -> Vec<(Vec<String>, usize)> {
    let mut index: HashMap<Vec<&str>, usize> = HashMap::new();
    let mut out: Vec<(Vec<String>, usize)> = Vec::new();
    for trace in log.traces() {
        let cf = trace.control_flow();
        match index.get(&cf) {
            Some(&i) => out[i].1 += 1,
            None => {
                index.insert(cf.clone(), out.len());
                out.push((cf.into_iter().map(str::to_string).collect(), 1));
            }
        }
    }
    out
}

/// Identity of an equivalence class: the control-flow plus the value
/// sequence of every selected attribute.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub control_flow: Vec<String>,
    pub attributes: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Debug)]
pub struct EquivalenceClass<'a> {
    pub signature: Signature,
    pub members: Vec<&'a Trace>,
}

impl EquivalenceClass<'_> {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Resolves attribute names to schema positions, deduplicated and in schema
/// order so that signatures do not depend on how the caller listed them.
pub(crate) fn resolve_selected<S: AsRef<str>>(
    log: &EventLog,
    selected: &[S],
) -> Result<Vec<usize>> {
    let mut idx = selected
        .iter()
        .map(|s| log.attribute_index(s.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

fn signature_of(log: &EventLog, trace: &Trace, selected: &[usize]) -> Signature {
    Signature {
        control_flow: control_flow(trace),
        attributes: selected
            .iter()
            .map(|&i| {
                (
                    log.schema()[i].clone(),
                    trace
                        .events
                        .iter()
                        .map(|e| e.attributes[i].clone())
                        .collect(),
                )
            })
            .collect(),
    }
}

/// Groups traces into equivalence classes over the control-flow and the
/// selected attributes. Classes come out in order of first appearance.
pub fn partition<'a, S: AsRef<str>>(
    log: &'a EventLog,
    selected: &[S],
) -> Result<Vec<EquivalenceClass<'a>>> {
    let selected = resolve_selected(log, selected)?;
    let mut index: HashMap<Signature, usize> = HashMap::new();
    let mut classes: Vec<EquivalenceClass<'a>> = Vec::new();
    for trace in log.traces() {
        let sig = signature_of(log, trace, &selected);
        match index.get(&sig) {
            Some(&i) => classes[i].members.push(trace),
            None => {
                index.insert(sig.clone(), classes.len());
                classes.push(EquivalenceClass {
                    signature: sig,
                    members: vec![trace],
                });
            }
        }
    }
    Ok(classes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KReport {
    pub k: usize,
    pub satisfied: bool,
    /// Sizes of all classes, in partition order.
    pub class_sizes: Vec<usize>,
    /// Classes smaller than k.
    pub violations: Vec<(Signature, usize)>,
}

pub fn validate_k<S: AsRef<str>>(log: &EventLog, selected: &[S], k: usize) -> Result<KReport> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let classes = partition(log, selected)?;
    let class_sizes: Vec<usize> = classes.iter().map(EquivalenceClass::size).collect();
    let violations: Vec<(Signature, usize)> = classes
        .into_iter()
        .filter(|c| c.size() < k)
        .map(|c| {
            let size = c.size();
            (c.signature, size)
        })
        .collect();
    Ok(KReport {
        k,
        satisfied: violations.is_empty(),
        class_sizes,
        violations,
    })
}

/// Keeps only the traces whose variant occurs at least twice.
pub fn drop_singleton_variants(log: &EventLog) -> EventLog {
    let mut counts: HashMap<Vec<&str>, usize> = HashMap::new();
    for trace in log.traces() {
        *counts.entry(trace.control_flow()).or_default() += 1;
    }
    let kept = log
        .traces()
        .iter()
        .filter(|t| counts[&t.control_flow()] >= 2)
        .cloned()
        .collect();
    log.with_traces(kept)
}
