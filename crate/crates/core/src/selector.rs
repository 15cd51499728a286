//! Hierarchy selection by estimated utility, and syntactic hierarchy
//! generation.
//!
//! Each candidate hierarchy is scored on its own: the log is partitioned on
//! that single perspective generalized to one level at a time, each level
//! gets a utility, and the utilities are summed with per-level weights. The
//! candidate with the largest total wins.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchyTable, Perspective};
use crate::log_model::{EventLog, WILDCARD};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityNotion {
    /// More classes keep more of the original variance.
    #[default]
    ClassCount,
    /// Evenly sized classes score higher: `1 / (1 + std dev of sizes)`.
    SizeBalance,
}

impl FromStr for UtilityNotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class_count" => Ok(UtilityNotion::ClassCount),
            "size_balance" => Ok(UtilityNotion::SizeBalance),
            other => Err(Error::Config(format!(
                "unknown utility notion `{other}` (expected class_count or size_balance)"
            ))),
        }
    }
}

impl fmt::Display for UtilityNotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtilityNotion::ClassCount => "class_count",
            UtilityNotion::SizeBalance => "size_balance",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilityProfile {
    /// Utility of levels 1..=depth.
    pub per_level: Vec<f64>,
    pub weights: Vec<f64>,
    pub total: f64,
}

/// Sizes of the classes obtained from one perspective at one level.
fn single_perspective_classes(log: &EventLog, h: &Hierarchy, level: usize) -> Result<Vec<usize>> {
    let column = match h.perspective() {
        Perspective::Activity => None,
        Perspective::Attribute(name) => Some(log.attribute_index(name)?),
    };
    let mut counts: HashMap<Vec<&str>, usize> = HashMap::new();
    for trace in log.traces() {
        let key = trace
            .events
            .iter()
            .map(|e| {
                let v = match column {
                    None => &e.activity,
                    Some(i) => &e.attributes[i],
                };
                h.generalize(v, level)
            })
            .collect::<Result<Vec<&str>>>()?;
        *counts.entry(key).or_default() += 1;
    }
    Ok(counts.into_values().collect())
}

pub fn level_utility(
    log: &EventLog,
    h: &Hierarchy,
    level: usize,
    notion: UtilityNotion,
) -> Result<f64> {
    let sizes = single_perspective_classes(log, h, level)?;
    Ok(match notion {
        UtilityNotion::ClassCount => sizes.len() as f64,
        UtilityNotion::SizeBalance => {
            if sizes.is_empty() {
                return Ok(1.0);
            }
            let n = sizes.len() as f64;
            let mean = sizes.iter().sum::<usize>() as f64 / n;
            let var = sizes
                .iter()
                .map(|&s| (s as f64 - mean).powi(2))
                .sum::<f64>()
                / n;
            1.0 / (1.0 + var.sqrt())
        }
    })
}

/// Weights for levels 1..=depth: all ones when none are given, otherwise
/// extended with the last weight (or truncated) to the depth.
pub fn extend_weights(weights: &[f64], depth: usize) -> Vec<f64> {
    let last = weights.last().copied().unwrap_or(1.0);
    (0..depth)
        .map(|j| weights.get(j).copied().unwrap_or(last))
        .collect()
}

pub fn score_hierarchy(
    log: &EventLog,
    h: &Hierarchy,
    weights: &[f64],
    notion: UtilityNotion,
) -> Result<UtilityProfile> {
    let weights = extend_weights(weights, h.depth());
    let per_level = (1..=h.depth())
        .map(|j| level_utility(log, h, j, notion))
        .collect::<Result<Vec<f64>>>()?;
    let total = per_level.iter().zip(&weights).map(|(u, w)| u * w).sum();
    Ok(UtilityProfile {
        per_level,
        weights,
        total,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Index of the winner among the candidates.
    pub index: usize,
    pub profiles: Vec<UtilityProfile>,
}

/// Picks the candidate with the largest weighted utility. Ties go to the
/// shallower hierarchy, then to the earlier candidate.
pub fn select(
    log: &EventLog,
    candidates: &[Hierarchy],
    weights: &[f64],
    notion: UtilityNotion,
) -> Result<Selection> {
    let Some(first) = candidates.first() else {
        return Err(Error::Config("no candidate hierarchies given".into()));
    };
    if let Some(other) = candidates
        .iter()
        .find(|h| h.perspective() != first.perspective())
    {
        return Err(Error::Config(format!(
            "candidate hierarchies mix perspectives `{}` and `{}`",
            first.perspective(),
            other.perspective()
        )));
    }
    let profiles = candidates
        .iter()
        .map(|h| score_hierarchy(log, h, weights, notion))
        .collect::<Result<Vec<_>>>()?;
    let mut index = 0;
    for i in 1..candidates.len() {
        let better = profiles[i].total > profiles[index].total
            || (profiles[i].total == profiles[index].total
                && candidates[i].depth() < candidates[index].depth());
        if better {
            index = i;
        }
    }
    Ok(Selection { index, profiles })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntacticScheme {
    /// Level j drops the last j whitespace-separated tokens.
    TokenSuffixDrop,
    /// Level j drops the first j whitespace-separated tokens.
    TokenPrefixDrop,
    /// Level j masks the last j * width characters with '-'.
    CharSuffixMask { width: usize },
}

fn syntactic_value(value: &str, level: usize, scheme: SyntacticScheme) -> String {
    if level == 0 {
        return value.to_string();
    }
    match scheme {
        SyntacticScheme::TokenSuffixDrop | SyntacticScheme::TokenPrefixDrop => {
            let tokens: Vec<&str> = value.split_whitespace().collect();
            if level >= tokens.len() {
                return WILDCARD.to_string();
            }
            let kept = match scheme {
                SyntacticScheme::TokenSuffixDrop => &tokens[..tokens.len() - level],
                _ => &tokens[level..],
            };
            kept.join(" ")
        }
        SyntacticScheme::CharSuffixMask { width } => {
            let chars: Vec<char> = value.chars().collect();
            let masked = level * width;
            if masked >= chars.len() {
                return WILDCARD.to_string();
            }
            let keep = chars.len() - masked;
            chars[..keep]
                .iter()
                .copied()
                .chain(std::iter::repeat_n('-', masked))
                .collect()
        }
    }
}

/// Builds a hierarchy by progressively suppressing parts of each value.
/// Values run out at different levels; once suppressed entirely they are the
/// wildcard, and the last level is the wildcard for everyone.
pub fn syntactic_hierarchy<S: AsRef<str>>(
    perspective: Perspective,
    values: &[S],
    scheme: SyntacticScheme,
) -> Result<Hierarchy> {
    let values: BTreeSet<&str> = values.iter().map(AsRef::as_ref).collect();
    if values.is_empty() {
        return Err(Error::Config(
            "cannot build a hierarchy without values".into(),
        ));
    }
    if let SyntacticScheme::CharSuffixMask { width: 0 } = scheme {
        return Err(Error::Config("mask width must be positive".into()));
    }
    let steps = |v: &str| match scheme {
        SyntacticScheme::TokenSuffixDrop | SyntacticScheme::TokenPrefixDrop => {
            v.split_whitespace().count()
        }
        SyntacticScheme::CharSuffixMask { width } => v.chars().count().div_ceil(width),
    };
    let depth = values.iter().map(|v| steps(v)).max().unwrap_or(0).max(1);
    let rows = values
        .iter()
        .map(|v| (0..=depth).map(|j| syntactic_value(v, j, scheme)).collect())
        .collect();
    Ok(Hierarchy::new(
        perspective,
        HierarchyTable::from_rows(rows)?,
    ))
}
