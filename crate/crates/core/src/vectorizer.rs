//! Trace vectorization: bring every trace to the same length by inserting
//! wildcard events, either at the end or where a multiple alignment of the
//! control-flows puts gaps.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::log_model::{variants, Event, EventLog, Trace, WILDCARD};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Msa,
    Naive,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "msa" => Ok(Strategy::Msa),
            "naive" => Ok(Strategy::Naive),
            other => Err(Error::Config(format!(
                "unknown vectorization strategy `{other}` (expected msa or naive)"
            ))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Msa => "msa",
            Strategy::Naive => "naive",
        })
    }
}

pub fn vectorize(log: &EventLog, strategy: Strategy) -> EventLog {
    match strategy {
        Strategy::Msa => vectorize_msa(log),
        Strategy::Naive => vectorize_naive(log),
    }
}

/// Output columns of every aligned sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlignmentColumnMap {
    /// One strictly increasing position list per input sequence.
    pub positions: Vec<Vec<usize>>,
    pub aligned_length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    /// Sequence element placed into the current profile column.
    Both,
    /// Profile column without an element of the sequence.
    ColumnOnly,
    /// Sequence element in a freshly inserted column.
    SequenceOnly,
}

/// Global alignment of `seq` against profile columns. Maximizes the number
/// of elements landing in a column that already holds the same label, then
/// the number of shared columns (i.e. minimizes the aligned length). Among
/// equal alignments the gaps of the shorter side are placed as early as
/// possible.
fn align_to_profile(columns: &[BTreeSet<&str>], seq: &[&str]) -> (usize, Vec<Step>) {
    let (n, m) = (columns.len(), seq.len());
    // (matches, shared columns)
    let mut score = vec![vec![(0usize, 0usize); m + 1]; n + 1];
    let matches = |i: usize, j: usize| seq[j] != WILDCARD && columns[i].contains(seq[j]);
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                continue;
            }
            let mut best = (0, 0);
            if i > 0 && j > 0 {
                let (a, b) = score[i - 1][j - 1];
                best = best.max((a + usize::from(matches(i - 1, j - 1)), b + 1));
            }
            if i > 0 {
                best = best.max(score[i - 1][j]);
            }
            if j > 0 {
                best = best.max(score[i][j - 1]);
            }
            score[i][j] = best;
        }
    }

    // Walking backwards, steps that put a gap into the shorter side are
    // taken last so those gaps end up early in the alignment.
    let seq_is_shorter = m <= n;
    let mut steps = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = score[i][j];
        let diag = i > 0 && j > 0 && {
            let (a, b) = score[i - 1][j - 1];
            (a + usize::from(matches(i - 1, j - 1)), b + 1) == here
        };
        let column_only = i > 0 && score[i - 1][j] == here;
        let sequence_only = j > 0 && score[i][j - 1] == here;
        let step = if diag {
            Step::Both
        } else if seq_is_shorter {
            // A column-only step is a gap in the sequence.
            if sequence_only {
                Step::SequenceOnly
            } else {
                debug_assert!(column_only);
                Step::ColumnOnly
            }
        } else if column_only {
            Step::ColumnOnly
        } else {
            debug_assert!(sequence_only);
            Step::SequenceOnly
        };
        match step {
            Step::Both => {
                i -= 1;
                j -= 1;
            }
            Step::ColumnOnly => i -= 1,
            Step::SequenceOnly => j -= 1,
        }
        steps.push(step);
    }
    steps.reverse();
    (score[n][m].0, steps)
}

fn singleton_columns<'a>(seq: &[&'a str]) -> Vec<BTreeSet<&'a str>> {
    seq.iter()
        .map(|&l| {
            let mut c = BTreeSet::new();
            if l != WILDCARD {
                c.insert(l);
            }
            c
        })
        .collect()
}

/// Pairwise alignment of two label sequences; a label in `a` and a label in
/// `b` may share a column whether or not they are equal.
pub fn align_pair(a: &[&str], b: &[&str]) -> AlignmentColumnMap {
    let (_, steps) = align_to_profile(&singleton_columns(a), b);
    let mut pa = Vec::with_capacity(a.len());
    let mut pb = Vec::with_capacity(b.len());
    for (col, step) in steps.iter().enumerate() {
        match step {
            Step::Both => {
                pa.push(col);
                pb.push(col);
            }
            Step::ColumnOnly => pa.push(col),
            Step::SequenceOnly => pb.push(col),
        }
    }
    AlignmentColumnMap {
        positions: vec![pa, pb],
        aligned_length: steps.len(),
    }
}

/// Number of matched labels in an optimal pairwise alignment.
fn pair_score(a: &[&str], b: &[&str]) -> usize {
    align_to_profile(&singleton_columns(a), b).0
}

/// Progressive multiple alignment with a center-star guide.
///
/// Sequences are taken in the given order. The center is the sequence with
/// the largest summed pairwise match score (first one on ties); the others
/// are then aligned one by one against the growing profile, and columns are
/// never removed once inserted.
pub fn align_multiple(seqs: &[Vec<&str>]) -> AlignmentColumnMap {
    if seqs.is_empty() {
        return AlignmentColumnMap {
            positions: vec![],
            aligned_length: 0,
        };
    }
    let n = seqs.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let scores: Vec<usize> = pairs
        .par_iter()
        .map(|&(i, j)| pair_score(&seqs[i], &seqs[j]))
        .collect();
    let mut totals = vec![0usize; n];
    for (&(i, j), s) in pairs.iter().zip(&scores) {
        totals[i] += s;
        totals[j] += s;
    }
    let center = (0..n)
        .max_by(|&x, &y| totals[x].cmp(&totals[y]).then(y.cmp(&x)))
        .unwrap();

    let mut columns = singleton_columns(&seqs[center]);
    // rows[s][c] = index of the element of sequence s in column c
    let mut rows: HashMap<usize, Vec<Option<usize>>> = HashMap::new();
    rows.insert(center, (0..seqs[center].len()).map(Some).collect());

    for s in (0..n).filter(|&s| s != center) {
        let seq = &seqs[s];
        let (_, steps) = align_to_profile(&columns, seq);
        let mut row = Vec::with_capacity(steps.len());
        let (mut col, mut elem) = (0, 0);
        for step in steps {
            match step {
                Step::Both => {
                    if seq[elem] != WILDCARD {
                        columns[col].insert(seq[elem]);
                    }
                    row.push(Some(elem));
                    col += 1;
                    elem += 1;
                }
                Step::ColumnOnly => {
                    row.push(None);
                    col += 1;
                }
                Step::SequenceOnly => {
                    let mut c = BTreeSet::new();
                    if seq[elem] != WILDCARD {
                        c.insert(seq[elem]);
                    }
                    columns.insert(col, c);
                    for other in rows.values_mut() {
                        other.insert(col, None);
                    }
                    row.push(Some(elem));
                    col += 1;
                    elem += 1;
                }
            }
        }
        rows.insert(s, row);
    }

    let positions = (0..n)
        .map(|s| {
            rows[&s]
                .iter()
                .enumerate()
                .filter_map(|(c, e)| e.map(|_| c))
                .collect()
        })
        .collect();
    AlignmentColumnMap {
        positions,
        aligned_length: columns.len(),
    }
}

/// Pads every trace at the end up to the longest trace.
pub fn vectorize_naive(log: &EventLog) -> EventLog {
    let width = log.schema().len();
    let target = log.max_trace_len();
    let traces = log
        .traces()
        .iter()
        .map(|t| {
            let mut events = t.events.clone();
            events.resize_with(target, || Event::wildcard(width));
            Trace::new(t.case_id.clone(), events)
        })
        .collect();
    log.with_traces(traces)
}

/// Inserts wildcard events where the multiple alignment of the distinct
/// control-flows has gaps. Variants are ordered by descending multiplicity,
/// then lexicographically, before alignment.
pub fn vectorize_msa(log: &EventLog) -> EventLog {
    let mut vars = variants(log);
    vars.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let seqs: Vec<Vec<&str>> = vars
        .iter()
        .map(|(cf, _)| cf.iter().map(String::as_str).collect())
        .collect();
    let map = align_multiple(&seqs);
    let by_variant: HashMap<&[String], &Vec<usize>> = vars
        .iter()
        .map(|(cf, _)| cf.as_slice())
        .zip(&map.positions)
        .collect();

    let width = log.schema().len();
    let traces = log
        .traces()
        .iter()
        .map(|t| {
            let cf: Vec<String> = t.events.iter().map(|e| e.activity.clone()).collect();
            let positions = by_variant[cf.as_slice()];
            let mut events: Vec<Event> = (0..map.aligned_length)
                .map(|_| Event::wildcard(width))
                .collect();
            for (event, &p) in t.events.iter().zip(positions) {
                events[p] = event.clone();
            }
            Trace::new(t.case_id.clone(), events)
        })
        .collect();
    log.with_traces(traces)
}
