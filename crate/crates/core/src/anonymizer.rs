//! Full-domain generalization search.
//!
//! The control-flow is generalized first: the activity level is the lowest
//! one at which the log is k-anonymous on control-flow alone. With that level
//! fixed, the lattice of attribute levels is walked bottom-up, one cost tier
//! at a time, and the first tier containing a k-anonymous node decides the
//! result.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{apply_to_log, Hierarchy, HierarchySet};
use crate::log_model::{validate_k, EventLog, WILDCARD};

/// One generalization level per perspective; a node of the search lattice.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelVector {
    pub activity: usize,
    pub attributes: BTreeMap<String, usize>,
}

impl LevelVector {
    pub fn zero<S: AsRef<str>>(attributes: &[S]) -> Self {
        LevelVector {
            activity: 0,
            attributes: attributes
                .iter()
                .map(|a| (a.as_ref().to_string(), 0))
                .collect(),
        }
    }

    /// Total amount of generalization with unit cost per level.
    pub fn cost(&self) -> usize {
        self.activity + self.attributes.values().sum::<usize>()
    }

    /// Componentwise `self >= other` over the same perspectives.
    pub fn dominates(&self, other: &LevelVector) -> bool {
        self.activity >= other.activity
            && self.attributes.len() == other.attributes.len()
            && other
                .attributes
                .iter()
                .all(|(k, v)| self.attributes.get(k).is_some_and(|s| s >= v))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Per-attribute cost of one generalization level. Missing entries
    /// cost 1.
    pub attribute_costs: BTreeMap<String, usize>,
}

#[derive(Clone, Debug)]
pub struct LatticeSearchResult {
    pub chosen: LevelVector,
    pub anonymized: EventLog,
    /// Sizes of all equivalence classes of the anonymized log.
    pub class_report: Vec<usize>,
    pub nodes_evaluated: usize,
    pub warnings: Vec<String>,
}

/// Reference check: generalize, partition and compare class sizes with k.
pub fn satisfies<S: AsRef<str>>(
    log: &EventLog,
    levels: &LevelVector,
    hierarchies: &HierarchySet,
    quasi_identifiers: &[S],
    k: usize,
) -> Result<bool> {
    let generalized = apply_to_log(log, levels, hierarchies)?;
    Ok(validate_k(&generalized, quasi_identifiers, k)?.satisfied)
}

/// Every cell of the log pre-generalized to every level and interned, so
/// that evaluating a lattice node only hashes integer sequences.
struct Encoded {
    /// `activity[level][trace]` holds one id per event; id 0 is the wildcard.
    activity: Vec<Vec<Vec<u32>>>,
    /// `attributes[a][level][trace]`, in quasi-identifier order.
    attributes: Vec<Vec<Vec<Vec<u32>>>>,
}

fn encode_column<'a>(
    log: &'a EventLog,
    h: &Hierarchy,
    cell: impl Fn(&'a crate::log_model::Event) -> &'a str,
) -> Result<Vec<Vec<Vec<u32>>>> {
    (0..=h.depth())
        .map(|level| {
            let mut ids: HashMap<&str, u32> = HashMap::new();
            ids.insert(WILDCARD, 0);
            log.traces()
                .iter()
                .map(|t| {
                    t.events
                        .iter()
                        .map(|e| {
                            let g = h.generalize(cell(e), level)?;
                            let next = ids.len() as u32;
                            Ok(*ids.entry(g).or_insert(next))
                        })
                        .collect::<Result<Vec<u32>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

impl Encoded {
    fn new(
        log: &EventLog,
        hierarchies: &HierarchySet,
        quasi_identifiers: &[String],
    ) -> Result<Self> {
        let activity = encode_column(log, &hierarchies.activity, |e| e.activity.as_str())?;
        let attributes = quasi_identifiers
            .iter()
            .map(|name| {
                let idx = log.attribute_index(name)?;
                encode_column(log, hierarchies.attribute(name)?, move |e| {
                    e.attributes[idx].as_str()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Encoded {
            activity,
            attributes,
        })
    }

    fn class_sizes(&self, activity_level: usize, attribute_levels: &[usize]) -> Vec<usize> {
        let acts = &self.activity[activity_level];
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::with_capacity(acts.len());
        for (t, act) in acts.iter().enumerate() {
            let mut key = Vec::with_capacity(act.len() * (1 + attribute_levels.len()));
            key.extend_from_slice(act);
            for (a, &level) in attribute_levels.iter().enumerate() {
                let vals = &self.attributes[a][level][t];
                // A suppressed activity suppresses the whole event.
                key.extend(
                    act.iter()
                        .zip(vals)
                        .map(|(&x, &v)| if x == 0 { 0 } else { v }),
                );
            }
            *counts.entry(key).or_default() += 1;
        }
        counts.into_values().collect()
    }

    fn satisfies(&self, activity_level: usize, attribute_levels: &[usize], k: usize) -> bool {
        self.class_sizes(activity_level, attribute_levels)
            .into_iter()
            .all(|s| s >= k)
    }
}

fn check_size(log: &EventLog, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if log.len() < k {
        return Err(Error::InsufficientTraces {
            traces: log.len(),
            k,
        });
    }
    Ok(())
}

/// Lowest activity level at which the control-flow alone is k-anonymous.
pub fn search_control_flow(log: &EventLog, activity: &Hierarchy, k: usize) -> Result<usize> {
    check_size(log, k)?;
    let encoded = encode_column(log, activity, |e| e.activity.as_str())?;
    let enc = Encoded {
        activity: encoded,
        attributes: vec![],
    };
    first_control_flow_level(&enc, activity.depth(), k).map(|(level, _)| level)
}

fn first_control_flow_level(enc: &Encoded, depth: usize, k: usize) -> Result<(usize, usize)> {
    for level in 0..=depth {
        if enc.satisfies(level, &[], k) {
            return Ok((level, level + 1));
        }
    }
    Err(Error::InvalidLog(
        "no activity level is k-anonymous; traces must be vectorized to a common length".into(),
    ))
}

/// Attribute level vectors of the lattice, ordered by cost and then
/// lexicographically, grouped into tiers of equal cost.
fn lattice_tiers(depths: &[usize], costs: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut nodes: Vec<Vec<usize>> = vec![vec![]];
    for &d in depths {
        nodes = nodes
            .into_iter()
            .flat_map(|prefix| {
                (0..=d).map(move |l| {
                    let mut n = prefix.clone();
                    n.push(l);
                    n
                })
            })
            .collect();
    }
    let cost = |n: &Vec<usize>| n.iter().zip(costs).map(|(l, c)| l * c).sum::<usize>();
    nodes.sort_by(|a, b| cost(a).cmp(&cost(b)).then_with(|| a.cmp(b)));
    let mut tiers: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut current = None;
    for n in nodes {
        let c = cost(&n);
        if current != Some(c) {
            tiers.push(Vec::new());
            current = Some(c);
        }
        tiers.last_mut().unwrap().push(n);
    }
    tiers
}

pub fn search<S: AsRef<str>>(
    log: &EventLog,
    hierarchies: &HierarchySet,
    quasi_identifiers: &[S],
    k: usize,
) -> Result<LatticeSearchResult> {
    search_with(
        log,
        hierarchies,
        quasi_identifiers,
        k,
        &SearchOptions::default(),
    )
}

pub fn search_with<S: AsRef<str>>(
    log: &EventLog,
    hierarchies: &HierarchySet,
    quasi_identifiers: &[S],
    k: usize,
    options: &SearchOptions,
) -> Result<LatticeSearchResult> {
    check_size(log, k)?;
    let mut qis: Vec<String> = quasi_identifiers
        .iter()
        .map(|s| s.as_ref().to_string())
        .collect();
    qis.sort();
    qis.dedup();

    let enc = Encoded::new(log, hierarchies, &qis)?;
    let (activity_level, mut nodes_evaluated) =
        first_control_flow_level(&enc, hierarchies.activity.depth(), k)?;

    let depths = qis
        .iter()
        .map(|q| hierarchies.attribute(q).map(Hierarchy::depth))
        .collect::<Result<Vec<_>>>()?;
    let costs: Vec<usize> = qis
        .iter()
        .map(|q| options.attribute_costs.get(q).copied().unwrap_or(1))
        .collect();

    let mut chosen = None;
    for tier in lattice_tiers(&depths, &costs) {
        nodes_evaluated += tier.len();
        let hit = tier
            .par_iter()
            .map(|node| enc.satisfies(activity_level, node, k))
            .collect::<Vec<bool>>();
        if let Some(pos) = hit.iter().position(|&h| h) {
            chosen = Some(tier[pos].clone());
            break;
        }
    }
    // The all-max node collapses every attribute to the wildcard, which is
    // exactly the control-flow check that phase one already passed.
    let chosen = chosen.expect("all-max attribute node must satisfy k-anonymity");

    let mut warnings = Vec::new();
    if !qis.is_empty() && depths.iter().any(|&d| d > 0) && chosen == depths {
        warnings.push(
            "attribute generalization reached the root for every quasi-identifier".to_string(),
        );
    }

    let levels = LevelVector {
        activity: activity_level,
        attributes: qis.iter().cloned().zip(chosen).collect(),
    };
    let anonymized = apply_to_log(log, &levels, hierarchies)?;
    let report = validate_k(&anonymized, &qis, k)?;
    if !report.satisfied {
        return Err(Error::Internal(format!(
            "chosen levels {levels:?} do not yield {k}-anonymity"
        )));
    }
    Ok(LatticeSearchResult {
        chosen: levels,
        anonymized,
        class_report: report.class_sizes,
        nodes_evaluated,
        warnings,
    })
}
