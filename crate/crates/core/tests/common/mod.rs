//! Random logs and hierarchies, plus a from-scratch k-anonymity oracle that
//! shares no code with the library's partitioning.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use pmdg::log_model::{Event, EventLog, Trace, WILDCARD};
use pmdg::{Hierarchy, HierarchySet, HierarchyTable, Perspective};
use rand::seq::SliceRandom;
use rand::Rng;

pub const STAR: &str = "⋆";

/// Hierarchy rows together with the per-level lookup tables the oracle uses.
#[derive(Clone, Debug)]
pub struct RandomHierarchy {
    pub rows: Vec<Vec<String>>,
    /// `maps[level][leaf]`
    pub maps: Vec<HashMap<String, String>>,
}

impl RandomHierarchy {
    pub fn depth(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn get(&self, value: &str, level: usize) -> String {
        if value == STAR {
            return STAR.to_string();
        }
        self.maps[level][value].clone()
    }

    pub fn build(&self, perspective: Perspective) -> Hierarchy {
        Hierarchy::new(
            perspective,
            HierarchyTable::from_rows(self.rows.clone()).unwrap(),
        )
    }
}

/// Random full-domain hierarchy over `leaves`. Interior labels sometimes
/// repeat the label below them; with `suppress` some values reach the
/// wildcard early.
pub fn random_hierarchy<R: Rng>(
    rng: &mut R,
    leaves: &[String],
    depth: usize,
    prefix: &str,
    suppress: bool,
) -> RandomHierarchy {
    let mut rows: Vec<Vec<String>> = leaves.iter().map(|l| vec![l.clone()]).collect();
    for level in 1..=depth {
        let mut distinct: Vec<String> = rows.iter().map(|r| r[level - 1].clone()).collect();
        distinct.sort();
        distinct.dedup();
        let groups = (distinct.len() / 2).max(1);
        let parent: HashMap<String, String> = distinct
            .into_iter()
            .map(|label| {
                let up = if level == depth || label == STAR {
                    STAR.to_string()
                } else {
                    match rng.gen_range(0..10) {
                        0 | 1 => label.clone(),
                        2 if suppress => STAR.to_string(),
                        _ => format!("{prefix}{level}g{}", rng.gen_range(0..groups)),
                    }
                };
                (label, up)
            })
            .collect();
        for r in &mut rows {
            let up = parent[&r[level - 1]].clone();
            r.push(up);
        }
    }
    let maps = (0..=depth)
        .map(|level| {
            rows.iter()
                .map(|r| (r[0].clone(), r[level].clone()))
                .collect()
        })
        .collect();
    RandomHierarchy { rows, maps }
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub traces: (usize, usize),
    pub max_attributes: usize,
    pub max_depth: usize,
    pub max_len: usize,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub log: EventLog,
    pub activity: RandomHierarchy,
    pub attributes: BTreeMap<String, RandomHierarchy>,
}

impl Instance {
    pub fn hierarchy_set(&self) -> HierarchySet {
        HierarchySet::new(
            self.activity.build(Perspective::Activity),
            self.attributes
                .iter()
                .map(|(name, h)| h.build(Perspective::Attribute(name.clone()))),
        )
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.attributes.keys().cloned().collect()
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, shape: &Shape) -> Instance {
    let n = rng.gen_range(shape.traces.0..=shape.traces.1);
    let n_attr = rng.gen_range(0..=shape.max_attributes);
    let activities: Vec<String> = (0..rng.gen_range(2..=6))
        .map(|i| format!("act{i}"))
        .collect();
    let schema: Vec<String> = (0..n_attr).map(|i| format!("attr{i}")).collect();
    let domains: Vec<Vec<String>> = schema
        .iter()
        .map(|a| {
            (0..rng.gen_range(1..=4))
                .map(|v| format!("{a}v{v}"))
                .collect()
        })
        .collect();

    // A small pool of control-flows so that variants repeat.
    let pool: Vec<Vec<String>> = (0..rng.gen_range(1..=6))
        .map(|_| {
            (0..rng.gen_range(1..=shape.max_len))
                .map(|_| activities.choose(rng).unwrap().clone())
                .collect()
        })
        .collect();
    let traces = (0..n)
        .map(|t| {
            let cf = pool.choose(rng).unwrap();
            let events = cf
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let values = domains
                        .iter()
                        .map(|d| d.choose(rng).unwrap().clone())
                        .collect();
                    Event::new(a.clone(), values, Some(i))
                })
                .collect();
            Trace::new(format!("c{t}"), events)
        })
        .collect();
    let log = EventLog::new(schema.clone(), traces).unwrap();

    let depth = rng.gen_range(1..=shape.max_depth);
    let activity = random_hierarchy(rng, &activities, depth, "A", true);
    let attributes = schema
        .iter()
        .zip(&domains)
        .map(|(name, d)| {
            let depth = rng.gen_range(1..=shape.max_depth);
            (
                name.clone(),
                random_hierarchy(rng, d, depth, &format!("{name}_"), false),
            )
        })
        .collect();
    Instance {
        log,
        activity,
        attributes,
    }
}

/// Class sizes of `log` keyed by control-flow and the listed attributes,
/// exactly as they appear.
pub fn oracle_class_sizes(log: &EventLog, attributes: &[String]) -> Vec<usize> {
    let cols: Vec<usize> = attributes
        .iter()
        .map(|a| log.schema().iter().position(|s| s == a).unwrap())
        .collect();
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    for t in log.traces() {
        let mut key: Vec<String> = t.events.iter().map(|e| e.activity.clone()).collect();
        for &c in &cols {
            key.push("|".into());
            key.extend(t.events.iter().map(|e| e.attributes[c].clone()));
        }
        *counts.entry(key).or_default() += 1;
    }
    counts.into_values().collect()
}

pub fn oracle_is_k_anonymous(log: &EventLog, attributes: &[String], k: usize) -> bool {
    oracle_class_sizes(log, attributes)
        .into_iter()
        .all(|s| s >= k)
}

/// Generalizes `log` with the instance's lookup tables. A suppressed
/// activity takes the event's attributes down with it.
pub fn oracle_generalize(
    inst: &Instance,
    log: &EventLog,
    activity_level: usize,
    levels: &BTreeMap<String, usize>,
) -> EventLog {
    let traces = log
        .traces()
        .iter()
        .map(|t| {
            let events = t
                .events
                .iter()
                .map(|e| {
                    let act = inst.activity.get(&e.activity, activity_level);
                    let values = log
                        .schema()
                        .iter()
                        .zip(&e.attributes)
                        .map(|(name, v)| {
                            if act == STAR {
                                STAR.to_string()
                            } else {
                                match levels.get(name) {
                                    Some(&l) => inst.attributes[name].get(v, l),
                                    None => v.clone(),
                                }
                            }
                        })
                        .collect();
                    Event::new(act, values, e.origin_index)
                })
                .collect();
            Trace::new(t.case_id.clone(), events)
        })
        .collect();
    EventLog::new(log.schema().to_vec(), traces).unwrap()
}

pub fn distinct_control_flows(log: &EventLog) -> usize {
    log.traces()
        .iter()
        .map(|t| {
            t.events
                .iter()
                .map(|e| e.activity.as_str())
                .collect::<Vec<_>>()
        })
        .collect::<HashSet<_>>()
        .len()
}

pub fn assert_wildcard_constant() {
    assert_eq!(WILDCARD, STAR);
}
