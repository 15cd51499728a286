//! Utility measures for anonymized logs: remaining variants, handover
//! graphs and the preservation of generalized handovers.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::Hierarchy;
use crate::log_model::{variants, Event, EventLog};

pub fn remaining_variants(log: &EventLog) -> usize {
    variants(log).len()
}

/// Directly-follows relation between the values of one attribute.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HandoverGraph {
    pub attribute: String,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), usize>,
}

pub fn handover_graph(log: &EventLog, attribute: &str) -> Result<HandoverGraph> {
    let idx = log.attribute_index(attribute)?;
    let mut g = HandoverGraph {
        attribute: attribute.to_string(),
        ..Default::default()
    };
    for trace in log.traces() {
        for e in &trace.events {
            g.nodes.insert(e.attributes[idx].clone());
        }
        for pair in trace.events.windows(2) {
            let key = (
                pair[0].attributes[idx].clone(),
                pair[1].attributes[idx].clone(),
            );
            *g.edges.entry(key).or_default() += 1;
        }
    }
    Ok(g)
}

/// One handover occurrence: the original values of two consecutive events
/// and the values the same two events carry after generalization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HandoverPair {
    pub original: (String, String),
    pub generalized: (String, String),
    pub case_id: String,
    /// Origin index of the first event of the pair.
    pub position: usize,
}

/// Preservation of one generalized handover:
///
/// ```text
/// p = ([1 - α(e1')/α(⋆) + α(e1)/α(⋆)] + [1 - α(e2')/α(⋆) + α(e2)/α(⋆)]) / 2
/// ```
pub fn handover_preservation(pair: &HandoverPair, h: &Hierarchy) -> Result<f64> {
    let root = h.alpha(crate::log_model::WILDCARD)? as f64;
    let side = |orig: &str, gen: &str| -> Result<f64> {
        Ok(1.0 - h.alpha(gen)? as f64 / root + h.alpha(orig)? as f64 / root)
    };
    let left = side(&pair.original.0, &pair.generalized.0)?;
    let right = side(&pair.original.1, &pair.generalized.1)?;
    Ok((left + right) / 2.0)
}

type ValuePair = (String, String);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Every handover occurrence counts once.
    #[default]
    Occurrences,
    /// Every distinct (original, generalized) value pair counts once.
    DistinctPairs,
}

/// Links every consecutive pair of original events to the events with the
/// same origin indices in the anonymized trace.
pub fn handover_pairs(
    original: &EventLog,
    anonymized: &EventLog,
    attribute: &str,
) -> Result<Vec<HandoverPair>> {
    let oi = original.attribute_index(attribute)?;
    let ai = anonymized.attribute_index(attribute)?;
    let by_case: HashMap<&str, HashMap<usize, &Event>> = anonymized
        .traces()
        .iter()
        .map(|t| {
            (
                t.case_id.as_str(),
                t.events
                    .iter()
                    .filter_map(|e| e.origin_index.map(|i| (i, e)))
                    .collect(),
            )
        })
        .collect();

    let mut pairs = Vec::new();
    for trace in original.traces() {
        let linked = by_case.get(trace.case_id.as_str());
        let lookup = |pos: usize, e: &Event| -> Result<&Event> {
            let broken = || Error::LinkageBroken {
                case_id: trace.case_id.clone(),
                index: pos,
            };
            let idx = e.origin_index.ok_or_else(broken)?;
            linked.and_then(|m| m.get(&idx)).copied().ok_or_else(broken)
        };
        for (pos, w) in trace.events.windows(2).enumerate() {
            let (a, b) = (lookup(pos, &w[0])?, lookup(pos + 1, &w[1])?);
            pairs.push(HandoverPair {
                original: (w[0].attributes[oi].clone(), w[1].attributes[oi].clone()),
                generalized: (a.attributes[ai].clone(), b.attributes[ai].clone()),
                case_id: trace.case_id.clone(),
                position: w[0].origin_index.unwrap_or(pos),
            });
        }
    }
    Ok(pairs)
}

/// Mean handover preservation in percent. A log without handovers has lost
/// nothing and scores 100.
pub fn handover_precision(
    original: &EventLog,
    anonymized: &EventLog,
    attribute: &str,
    h: &Hierarchy,
    aggregation: Aggregation,
) -> Result<f64> {
    let pairs = handover_pairs(original, anonymized, attribute)?;
    let scores: Vec<f64> = match aggregation {
        Aggregation::Occurrences => pairs
            .iter()
            .map(|p| handover_preservation(p, h))
            .collect::<Result<_>>()?,
        Aggregation::DistinctPairs => {
            let distinct: BTreeSet<(&ValuePair, &ValuePair)> = pairs
                .iter()
                .map(|p| (&p.original, &p.generalized))
                .collect();
            distinct
                .into_iter()
                .map(|(o, g)| {
                    handover_preservation(
                        &HandoverPair {
                            original: o.clone(),
                            generalized: g.clone(),
                            case_id: String::new(),
                            position: 0,
                        },
                        h,
                    )
                })
                .collect::<Result<_>>()?
        }
    };
    if scores.is_empty() {
        return Ok(100.0);
    }
    Ok(100.0 * scores.iter().sum::<f64>() / scores.len() as f64)
}

fn dot_id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering with nodes and edges in lexicographic order.
pub fn to_dot(g: &HandoverGraph) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "digraph {} {{",
        dot_id(&format!("handover_{}", g.attribute))
    )
    .unwrap();
    for n in &g.nodes {
        writeln!(out, "    {};", dot_id(n)).unwrap();
    }
    for ((from, to), count) in &g.edges {
        writeln!(
            out,
            "    {} -> {} [label=\"{count}\"];",
            dot_id(from),
            dot_id(to)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn export_dot(g: &HandoverGraph, path: &Path) -> Result<()> {
    std::fs::write(path, to_dot(g)).map_err(|e| Error::io(path, e))
}
