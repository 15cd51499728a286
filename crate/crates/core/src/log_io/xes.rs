//! Minimal XES reader: traces, events and their string attributes.
//! Extensions, globals, classifiers and typed (non-string) attributes are
//! skipped.

use std::path::Path;

use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::log_model::{Event, EventLog, Trace, MISSING, WILDCARD};

use super::normalize;

const CONCEPT_NAME: &str = "concept:name";

pub fn read_log_xes(path: &Path) -> Result<EventLog> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_xes(&text)
}

#[derive(Default)]
struct PendingTrace {
    case_id: Option<String>,
    events: Vec<Vec<(String, String)>>,
}

fn string_attribute(el: &BytesStart<'_>) -> Result<Option<(String, String)>> {
    let mut key = None;
    let mut value = None;
    for attr in el.attributes() {
        let attr = attr.map_err(|e| Error::MalformedXml(e.to_string()))?;
        let v = attr
            .unescape_value()
            .map_err(|e| Error::MalformedXml(e.to_string()))?;
        match attr.key.as_ref() {
            b"key" => key = Some(normalize(&v, WILDCARD)),
            b"value" => value = Some(normalize(&v, WILDCARD)),
            _ => {}
        }
    }
    Ok(key.zip(value))
}

pub fn parse_xes(text: &str) -> Result<EventLog> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut traces: Vec<PendingTrace> = Vec::new();
    let mut current: Option<PendingTrace> = None;

    loop {
        let ev = reader.read_event().map_err(|e| {
            Error::MalformedXml(format!("at byte {}: {e}", reader.buffer_position()))
        })?;
        let (el, empty) = match &ev {
            XmlEvent::Start(el) => (Some(el), false),
            XmlEvent::Empty(el) => (Some(el), true),
            XmlEvent::End(_) => {
                let name = stack.pop().unwrap_or_default();
                if name == b"trace" {
                    traces.extend(current.take());
                }
                continue;
            }
            XmlEvent::Eof => break,
            _ => continue,
        };
        let Some(el) = el else { continue };
        let name = el.name().as_ref().to_vec();
        let parent = stack.last().map(Vec::as_slice);
        match (name.as_slice(), parent) {
            (b"trace", Some(b"log")) => {
                let t = PendingTrace::default();
                if empty {
                    traces.push(t);
                } else {
                    current = Some(t);
                }
            }
            (b"event", Some(b"trace")) => {
                if let Some(t) = current.as_mut() {
                    t.events.push(Vec::new());
                }
            }
            (b"string", Some(b"trace")) => {
                if let (Some((k, v)), Some(t)) = (string_attribute(el)?, current.as_mut()) {
                    if k == CONCEPT_NAME {
                        t.case_id = Some(v);
                    }
                }
            }
            (b"string", Some(b"event")) => {
                if let (Some(kv), Some(t)) = (string_attribute(el)?, current.as_mut()) {
                    if let Some(e) = t.events.last_mut() {
                        e.push(kv);
                    }
                }
            }
            _ => {}
        }
        if !empty {
            stack.push(name);
        }
    }
    if !stack.is_empty() {
        return Err(Error::MalformedXml("unexpected end of document".into()));
    }

    // Schema: attribute names in order of first appearance.
    let mut schema: Vec<String> = Vec::new();
    for t in &traces {
        for e in &t.events {
            for (k, _) in e {
                if k != CONCEPT_NAME && !schema.contains(k) {
                    schema.push(k.clone());
                }
            }
        }
    }

    let mut out = Vec::with_capacity(traces.len());
    for (n, t) in traces.into_iter().enumerate() {
        if t.events.is_empty() {
            continue;
        }
        let case_id = t.case_id.unwrap_or_else(|| format!("trace-{}", n + 1));
        let mut events = Vec::with_capacity(t.events.len());
        for (i, attrs) in t.events.into_iter().enumerate() {
            let activity = attrs
                .iter()
                .find(|(k, _)| k == CONCEPT_NAME)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::MissingConceptName {
                    case_id: case_id.clone(),
                    event: i,
                })?;
            let values = schema
                .iter()
                .map(|name| {
                    attrs
                        .iter()
                        .find(|(k, _)| k == name)
                        .map_or_else(|| MISSING.to_string(), |(_, v)| v.clone())
                })
                .collect();
            events.push(Event::new(activity, values, Some(i)));
        }
        out.push(Trace::new(case_id, events));
    }
    if out.is_empty() {
        return Err(Error::EmptyLog);
    }
    EventLog::new(schema, out)
}
