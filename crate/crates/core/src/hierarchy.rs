//! Generalization hierarchies.
//!
//! A hierarchy is a table with one row per leaf value. Column `j` of a row is
//! the value the leaf takes at generalization level `j`; the last column is
//! always the wildcard. Lookups always go through the leaf's row, so a label
//! may repeat across columns (a value that stays unchanged for a level) or
//! even appear at several levels without ambiguity.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::anonymizer::LevelVector;
use crate::error::{Error, Result};
use crate::log_model::{Event, EventLog, Trace, MISSING, WILDCARD};

/// Which part of an event a hierarchy generalizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Perspective {
    Activity,
    Attribute(String),
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perspective::Activity => f.write_str("activity"),
            Perspective::Attribute(name) => f.write_str(name),
        }
    }
}

/// Validated rows of a hierarchy file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyTable {
    rows: Vec<Vec<String>>,
    depth: usize,
}

impl HierarchyTable {
    /// Checks the rows form a tree rooted in the wildcard: equal width,
    /// wildcard in the last column, distinct leaves, and every level maps
    /// functionally onto the next one.
    pub fn from_rows(rows: Vec<Vec<String>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::EmptyHierarchy);
        };
        let width = first.len();
        let mut leaves = HashSet::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InconsistentDepth {
                    row: i + 1,
                    expected: width,
                    found: row.len(),
                });
            }
            if width < 2 || row[width - 1] != WILDCARD {
                return Err(Error::MissingRoot {
                    row: i + 1,
                    leaf: row.first().cloned().unwrap_or_default(),
                });
            }
            if !leaves.insert(row[0].as_str()) {
                return Err(Error::DuplicateLeaf(row[0].clone()));
            }
        }
        for level in 0..width - 1 {
            let mut parent: HashMap<&str, &str> = HashMap::new();
            for row in &rows {
                let (child, up) = (row[level].as_str(), row[level + 1].as_str());
                if child == WILDCARD && up != WILDCARD {
                    return Err(Error::NonFunctionalLevel {
                        level,
                        value: child.to_string(),
                        first: WILDCARD.to_string(),
                        second: up.to_string(),
                    });
                }
                match parent.get(child) {
                    Some(&seen) if seen != up => {
                        return Err(Error::NonFunctionalLevel {
                            level,
                            value: child.to_string(),
                            first: seen.to_string(),
                            second: up.to_string(),
                        });
                    }
                    _ => {
                        parent.insert(child, up);
                    }
                }
            }
        }
        Ok(HierarchyTable {
            rows,
            depth: width - 1,
        })
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Number of levels above the leaves.
    pub fn depth(&self) -> usize {
        self.depth
    }
}

#[derive(Clone, Debug)]
pub struct Hierarchy {
    perspective: Perspective,
    table: HierarchyTable,
    leaf_row: HashMap<String, usize>,
    alpha: HashMap<String, usize>,
    leaf_count: usize,
    level_of: HashMap<String, usize>,
}

impl Hierarchy {
    /// Wraps a table for one perspective. Attribute hierarchies without a row
    /// for the missing-value literal get one that keeps it unchanged up to the
    /// root; that row is not counted by [`Hierarchy::alpha`].
    pub fn new(perspective: Perspective, table: HierarchyTable) -> Self {
        let mut table = table;
        let user_leaves = table.rows.len();
        let has_missing = table.rows.iter().any(|r| r[0] == MISSING);
        if matches!(perspective, Perspective::Attribute(_)) && !has_missing {
            let mut row = vec![MISSING.to_string(); table.depth];
            row.push(WILDCARD.to_string());
            table.rows.push(row);
        }

        let leaf_row = table
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r[0].clone(), i))
            .collect();

        let mut alpha: HashMap<String, usize> = HashMap::new();
        let mut level_of: HashMap<String, usize> = HashMap::new();
        for (i, row) in table.rows.iter().enumerate() {
            let counted = i < user_leaves;
            let mut seen = HashSet::new();
            for (level, value) in row.iter().enumerate() {
                let lowest = level_of.entry(value.clone()).or_insert(level);
                *lowest = (*lowest).min(level);
                if value != WILDCARD && seen.insert(value.as_str()) {
                    let slot = alpha.entry(value.clone()).or_insert(0);
                    if counted {
                        *slot += 1;
                    }
                }
            }
        }
        // The injected missing-value leaf still represents itself.
        if let Some(a) = alpha.get_mut(MISSING) {
            *a = (*a).max(1);
        }

        Hierarchy {
            perspective,
            table,
            leaf_row,
            alpha,
            leaf_count: user_leaves,
            level_of,
        }
    }

    pub fn perspective(&self) -> &Perspective {
        &self.perspective
    }

    pub fn table(&self) -> &HierarchyTable {
        &self.table
    }

    pub fn depth(&self) -> usize {
        self.table.depth
    }

    pub fn is_leaf(&self, value: &str) -> bool {
        self.leaf_row.contains_key(value)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &str> {
        self.table.rows.iter().map(|r| r[0].as_str())
    }

    /// Lowest level at which `value` occurs anywhere in the table.
    pub fn level_of(&self, value: &str) -> Option<usize> {
        self.level_of.get(value).copied()
    }

    fn unknown(&self, value: &str) -> Error {
        Error::UnknownValue {
            attribute: self.perspective.to_string(),
            value: value.to_string(),
        }
    }

    /// Value of leaf `value` at `level`. The wildcard generalizes to itself.
    pub fn generalize(&self, value: &str, level: usize) -> Result<&str> {
        if level > self.depth() {
            return Err(Error::LevelOutOfRange {
                perspective: self.perspective.to_string(),
                level,
                depth: self.depth(),
            });
        }
        if value == WILDCARD {
            return Ok(WILDCARD);
        }
        let row = self
            .leaf_row
            .get(value)
            .ok_or_else(|| self.unknown(value))?;
        Ok(&self.table.rows[*row][level])
    }

    /// Number of leaves a value stands for. `alpha(⋆)` is the leaf count.
    pub fn alpha(&self, value: &str) -> Result<usize> {
        if value == WILDCARD {
            return Ok(self.leaf_count);
        }
        self.alpha
            .get(value)
            .copied()
            .ok_or_else(|| self.unknown(value))
    }
}

/// One activity hierarchy plus hierarchies keyed by attribute name.
#[derive(Clone, Debug)]
pub struct HierarchySet {
    pub activity: Hierarchy,
    pub attributes: BTreeMap<String, Hierarchy>,
}

impl HierarchySet {
    pub fn new(activity: Hierarchy, attributes: impl IntoIterator<Item = Hierarchy>) -> Self {
        let attributes = attributes
            .into_iter()
            .map(|h| (h.perspective().to_string(), h))
            .collect();
        HierarchySet {
            activity,
            attributes,
        }
    }

    pub fn attribute(&self, name: &str) -> Result<&Hierarchy> {
        self.attributes
            .get(name)
            .ok_or_else(|| Error::Config(format!("no hierarchy for attribute `{name}`")))
    }

    /// The all-max level vector over the given attributes.
    pub fn top(&self, attributes: &[String]) -> Result<LevelVector> {
        let mut levels = LevelVector::zero(attributes);
        levels.activity = self.activity.depth();
        for name in attributes {
            levels
                .attributes
                .insert(name.clone(), self.attribute(name)?.depth());
        }
        Ok(levels)
    }
}

/// Generalizes a whole log at the given levels.
///
/// Inserted wildcard events are left alone. An event whose activity becomes
/// the wildcard is suppressed entirely: all of its attribute values become
/// the wildcard as well, while it keeps its origin index. Attributes not
/// mentioned in `levels` are copied unchanged.
pub fn apply_to_log(
    log: &EventLog,
    levels: &LevelVector,
    hierarchies: &HierarchySet,
) -> Result<EventLog> {
    let mut columns = Vec::with_capacity(levels.attributes.len());
    for (name, &level) in &levels.attributes {
        let idx = log.attribute_index(name)?;
        let h = hierarchies.attribute(name)?;
        if level > h.depth() {
            return Err(Error::LevelOutOfRange {
                perspective: name.clone(),
                level,
                depth: h.depth(),
            });
        }
        columns.push((idx, h, level));
    }
    let activity = &hierarchies.activity;

    let traces = log
        .traces()
        .iter()
        .map(|trace| {
            let events = trace
                .events
                .iter()
                .map(|event| {
                    if event.is_wildcard() {
                        return Ok(event.clone());
                    }
                    let label = activity.generalize(&event.activity, levels.activity)?;
                    if label == WILDCARD {
                        return Ok(Event {
                            activity: WILDCARD.to_string(),
                            attributes: vec![WILDCARD.to_string(); event.attributes.len()],
                            origin_index: event.origin_index,
                        });
                    }
                    let mut attributes = event.attributes.clone();
                    for &(idx, h, level) in &columns {
                        attributes[idx] = h.generalize(&event.attributes[idx], level)?.to_string();
                    }
                    Ok(Event {
                        activity: label.to_string(),
                        attributes,
                        origin_index: event.origin_index,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Trace::new(trace.case_id.clone(), events))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(log.with_traces(traces))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::log_model::fixtures::clinical;
    use proptest::prelude::*;

    fn rows(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn table_validation() {
        let t = table(&[
            &["CT Scan", "Radiology Scan", "⋆"],
            &["MRI Scan", "Radiology Scan", "⋆"],
        ]);
        assert_eq!(t.depth(), 2);
        assert!(matches!(
            HierarchyTable::from_rows(rows(&[&["x", "a", "⋆"], &["y", "a", "⋆"], &["x", "b", "⋆"]])),
            Err(Error::DuplicateLeaf(l)) if l == "x"
        ));
        assert!(matches!(
            HierarchyTable::from_rows(rows(&[&["x", "a", "⋆"], &["y", "⋆"]])),
            Err(Error::InconsistentDepth { row: 2, .. })
        ));
        assert!(matches!(
            HierarchyTable::from_rows(rows(&[&["x", "a", "b"]])),
            Err(Error::MissingRoot { row: 1, .. })
        ));
        assert!(matches!(
            HierarchyTable::from_rows(rows(&[&["x", "a", "p", "⋆"], &["y", "a", "q", "⋆"]])),
            Err(Error::NonFunctionalLevel { level: 1, .. })
        ));
        assert!(matches!(
            HierarchyTable::from_rows(rows(&[&["x", "⋆", "a", "⋆"]])),
            Err(Error::NonFunctionalLevel { level: 1, .. })
        ));
        assert!(matches!(
            HierarchyTable::from_rows(vec![]),
            Err(Error::EmptyHierarchy)
        ));
    }

    #[test]
    fn generalize_by_level() {
        let act = clinical_activity();
        assert_eq!(act.generalize("MRI Scan", 1).unwrap(), "Radiology Scan");
        assert_eq!(act.generalize("Register", 1).unwrap(), "Register");
        for leaf in ["Register", "Vitals", "CT Scan"] {
            assert_eq!(act.generalize(leaf, 0).unwrap(), leaf);
        }
        let role = clinical_role();
        assert_eq!(role.generalize("GP", role.depth()).unwrap(), WILDCARD);
        assert!(matches!(
            role.generalize("Nurse", 1),
            Err(Error::UnknownValue { attribute, .. }) if attribute == "Role"
        ));
        assert!(role.generalize("GP", 3).is_err());
        assert_eq!(role.generalize(WILDCARD, 1).unwrap(), WILDCARD);
    }

    #[test]
    fn missing_value_row_is_injected() {
        let role = clinical_role();
        assert!(role.is_leaf(MISSING));
        assert_eq!(role.generalize(MISSING, 1).unwrap(), MISSING);
        assert_eq!(role.generalize(MISSING, 2).unwrap(), WILDCARD);
        assert_eq!(role.alpha(MISSING).unwrap(), 1);
        assert_eq!(role.alpha(WILDCARD).unwrap(), 3);
        // Activities never carry the missing literal.
        assert!(!clinical_activity().is_leaf(MISSING));
    }

    #[test]
    fn alpha_counts_leaves() {
        let role = clinical_role();
        assert_eq!(role.alpha("Medical Staff").unwrap(), 2);
        assert_eq!(role.alpha("Admin Staff").unwrap(), 1);
        assert_eq!(role.alpha("GP").unwrap(), 1);
        assert_eq!(role.alpha(WILDCARD).unwrap(), 3);
        assert!(role.alpha("Board").is_err());

        // 27 member states under "EU".
        let mut r: Vec<Vec<String>> = (0..27)
            .map(|i| vec![format!("C{i}"), "EU".into(), "⋆".into()])
            .collect();
        r.push(vec!["Norway".into(), "EFTA".into(), "⋆".into()]);
        let h = Hierarchy::new(
            Perspective::Attribute("country".into()),
            HierarchyTable::from_rows(r).unwrap(),
        );
        assert_eq!(h.alpha("EU").unwrap(), 27);
        assert_eq!(h.alpha(WILDCARD).unwrap(), 28);
        assert_eq!(h.level_of("EU"), Some(1));
    }

    #[test]
    fn repeated_labels_count_once() {
        let act = clinical_activity();
        assert_eq!(act.alpha("Register").unwrap(), 1);
        assert_eq!(act.alpha("Radiology Scan").unwrap(), 2);
        assert_eq!(act.level_of("Register"), Some(0));
    }

    #[test]
    fn apply_clinical_levels() {
        let log = clinical();
        let set = clinical_set();
        let mut levels = LevelVector::zero(&["Role".to_string()]);
        assert_eq!(apply_to_log(&log, &levels, &set).unwrap(), log);

        levels.activity = 1;
        levels.attributes.insert("Role".into(), 1);
        let out = apply_to_log(&log, &levels, &set).unwrap();
        let t07 = &out.traces()[0];
        assert_eq!(
            t07.control_flow(),
            vec!["Register", "⋆", "Consultation", "Radiology Scan"]
        );
        // Suppressed event: every attribute is the wildcard, origin kept.
        assert_eq!(t07.events[1].attributes, vec!["⋆", "⋆"]);
        assert_eq!(t07.events[1].origin_index, Some(1));
        assert_eq!(
            t07.events[2].attributes,
            vec!["Day Clinic", "Medical Staff"]
        );
    }

    #[test]
    fn apply_all_max_wildcards_everything() {
        let log = clinical();
        let set = clinical_set();
        let top = set
            .top(&["Location".to_string(), "Role".to_string()])
            .unwrap();
        let out = apply_to_log(&log, &top, &set).unwrap();
        for t in out.traces() {
            for e in &t.events {
                assert_eq!(e.activity, WILDCARD);
                assert!(e.attributes.iter().all(|v| v == WILDCARD));
                assert!(e.origin_index.is_some());
            }
        }
    }

    fn arb_table() -> impl Strategy<Value = HierarchyTable> {
        // Leaves l0..ln, each level halves the index space, then the root.
        (1usize..12, 1usize..4).prop_map(|(n, depth)| {
            let rows = (0..n)
                .map(|i| {
                    let mut row = vec![format!("l{i}")];
                    for level in 1..depth {
                        row.push(format!("g{level}_{}", i >> level));
                    }
                    row.push(WILDCARD.to_string());
                    row
                })
                .collect();
            HierarchyTable::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn generalization_paths_compose(t in arb_table()) {
            let h = Hierarchy::new(Perspective::Attribute("a".into()), t);
            let leaves: Vec<String> = h.leaves().map(str::to_string).collect();
            for leaf in &leaves {
                prop_assert_eq!(h.generalize(leaf, h.depth()).unwrap(), WILDCARD);
                for i in 0..=h.depth() {
                    for j in i..=h.depth() {
                        // Any other leaf sharing the level-i value also shares level j.
                        let gi = h.generalize(leaf, i).unwrap();
                        for other in &leaves {
                            if h.generalize(other, i).unwrap() == gi {
                                prop_assert_eq!(
                                    h.generalize(other, j).unwrap(),
                                    h.generalize(leaf, j).unwrap()
                                );
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn alpha_is_additive(t in arb_table()) {
            let h = Hierarchy::new(Perspective::Attribute("a".into()), t);
            // alpha of each node equals the sum over its distinct children.
            for level in 1..=h.depth() {
                let mut children: HashMap<String, HashSet<String>> = HashMap::new();
                for leaf in h.leaves().filter(|l| *l != MISSING) {
                    children
                        .entry(h.generalize(leaf, level).unwrap().to_string())
                        .or_default()
                        .insert(h.generalize(leaf, level - 1).unwrap().to_string());
                }
                for (node, kids) in children {
                    let sum: usize = kids.iter().map(|c| h.alpha(c).unwrap()).sum();
                    prop_assert_eq!(h.alpha(&node).unwrap(), sum);
                }
            }
        }
    }
}
