//! End-to-end anonymization run: preprocess, vectorize, select hierarchies,
//! search, self-check, write.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anonymizer::{search_with, LevelVector, SearchOptions};
use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchySet, Perspective};
use crate::log_io::{load_hierarchy, read_log, write_log_csv, LogCsvSpec, PipelineConfig};
use crate::log_model::{drop_singleton_variants, validate_k, EventLog};
use crate::metrics::remaining_variants;
use crate::selector::{select, UtilityProfile};
use crate::vectorizer::{vectorize, Strategy};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenHierarchy {
    /// Path as written in the configuration.
    pub file: String,
    pub candidates: usize,
    /// Weighted utility of every candidate, when there was a choice.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utilities: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub traces_read: usize,
    pub traces_anonymized: usize,
    pub variants_original: usize,
    pub variants_anonymized: usize,
    pub aligned_length: usize,
    pub equivalence_classes: usize,
    pub min_class_size: usize,
    /// class size -> number of classes of that size
    pub class_size_histogram: BTreeMap<usize, usize>,
    pub nodes_evaluated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    pub input_digest: String,
    pub output_digest: String,
    pub k: usize,
    pub quasi_identifiers: Vec<String>,
    pub vectorization: Strategy,
    pub hierarchies: BTreeMap<String, ChosenHierarchy>,
    pub levels: LevelVector,
    pub metrics: MetricSummary,
    pub warnings: Vec<String>,
    /// Wall-clock milliseconds per stage. The only field that varies
    /// between identical runs.
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn load_candidates(
    config: &PipelineConfig,
    files: &[std::path::PathBuf],
    perspective: &Perspective,
) -> Result<Vec<Hierarchy>> {
    files
        .iter()
        .map(|f| {
            load_hierarchy(
                &config.resolve(f),
                perspective.clone(),
                &config.wildcard_literal,
            )
        })
        .collect()
}

/// Picks one hierarchy among the configured candidates of a perspective.
fn choose(
    config: &PipelineConfig,
    log: &EventLog,
    files: &[std::path::PathBuf],
    perspective: Perspective,
) -> Result<(Hierarchy, ChosenHierarchy)> {
    let mut candidates = load_candidates(config, files, &perspective)?;
    let (index, utilities) = if candidates.len() > 1 {
        let sel = select(
            log,
            &candidates,
            &config.level_weights,
            config.utility_notion,
        )?;
        let totals = sel
            .profiles
            .iter()
            .map(|p: &UtilityProfile| p.total)
            .collect();
        (sel.index, totals)
    } else {
        (0, Vec::new())
    };
    let chosen = ChosenHierarchy {
        file: files[index].display().to_string(),
        candidates: candidates.len(),
        utilities,
    };
    Ok((candidates.swap_remove(index), chosen))
}

/// Everything `run_pipeline` computes, before anything is written.
pub struct PipelineOutcome {
    pub anonymized: EventLog,
    pub output_spec: LogCsvSpec,
    pub manifest: RunManifest,
}

pub fn anonymize_log(config: &PipelineConfig, input: &Path) -> Result<PipelineOutcome> {
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1e3);
        clock = Instant::now();
    };

    let spec = if crate::log_io::is_xes(input) {
        None
    } else {
        Some(config.input.csv_spec(input, &config.wildcard_literal)?)
    };
    let log = match &spec {
        Some(s) => read_log(input, s)?,
        None => read_log(input, &LogCsvSpec::new("case", "activity", &[]))?,
    };
    let traces_read = log.len();
    for qi in &config.quasi_identifiers {
        log.attribute_index(qi)?;
    }
    lap("read", &mut timings);

    let log = if config.drop_singletons {
        drop_singleton_variants(&log)
    } else {
        log
    };
    if log.len() < config.k {
        return Err(Error::InsufficientTraces {
            traces: log.len(),
            k: config.k,
        });
    }
    let variants_original = remaining_variants(&log);
    lap("preprocess", &mut timings);

    let vectorized = vectorize(&log, config.vectorization);
    lap("vectorize", &mut timings);

    let mut chosen = BTreeMap::new();
    let (activity, info) = choose(
        config,
        &vectorized,
        &config.hierarchy_files.activity,
        Perspective::Activity,
    )?;
    chosen.insert(Perspective::Activity.to_string(), info);
    let mut attribute_hierarchies = Vec::new();
    for qi in &config.quasi_identifiers {
        let files = &config.hierarchy_files.attributes[qi];
        let (h, info) = choose(
            config,
            &vectorized,
            files,
            Perspective::Attribute(qi.clone()),
        )?;
        chosen.insert(qi.clone(), info);
        attribute_hierarchies.push(h);
    }
    let hierarchies = HierarchySet::new(activity, attribute_hierarchies);
    lap("select", &mut timings);

    let options = SearchOptions {
        attribute_costs: config.attribute_costs.clone(),
    };
    let result = search_with(
        &vectorized,
        &hierarchies,
        &config.quasi_identifiers,
        config.k,
        &options,
    )?;
    lap("search", &mut timings);

    let check = validate_k(&result.anonymized, &config.quasi_identifiers, config.k)?;
    if !check.satisfied {
        return Err(Error::Internal(
            "anonymized log failed the k-anonymity self-check".into(),
        ));
    }
    let mut histogram = BTreeMap::new();
    for &s in &check.class_sizes {
        *histogram.entry(s).or_insert(0) += 1;
    }
    lap("validate", &mut timings);

    let mut quasi_identifiers = config.quasi_identifiers.clone();
    quasi_identifiers.sort();
    quasi_identifiers.dedup();

    let output_spec = match spec {
        Some(s) => s.with_origin_column(),
        None => {
            let cols: Vec<&str> = result
                .anonymized
                .schema()
                .iter()
                .map(String::as_str)
                .collect();
            LogCsvSpec::new("case", "activity", &cols)
                .with_origin_column()
                .with_wildcard(&config.wildcard_literal)
        }
    };

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: String::new(),
        input_digest: sha256_file(input)?,
        output_digest: String::new(),
        k: config.k,
        quasi_identifiers,
        vectorization: config.vectorization,
        hierarchies: chosen,
        levels: result.chosen.clone(),
        metrics: MetricSummary {
            traces_read,
            traces_anonymized: result.anonymized.len(),
            variants_original,
            variants_anonymized: remaining_variants(&result.anonymized),
            aligned_length: result.anonymized.max_trace_len(),
            equivalence_classes: check.class_sizes.len(),
            min_class_size: check.class_sizes.iter().copied().min().unwrap_or(0),
            class_size_histogram: histogram,
            nodes_evaluated: result.nodes_evaluated,
        },
        warnings: result.warnings,
        timings_ms: timings,
    };
    Ok(PipelineOutcome {
        anonymized: result.anonymized,
        output_spec,
        manifest,
    })
}

/// Runs the whole pipeline and writes the anonymized log to `output` and
/// the manifest to `manifest_path`.
pub fn run_pipeline(
    config_path: &Path,
    input: &Path,
    output: &Path,
    manifest_path: &Path,
) -> Result<RunManifest> {
    let config = PipelineConfig::load(config_path)?;
    let started = Instant::now();
    let PipelineOutcome {
        anonymized,
        output_spec,
        mut manifest,
    } = anonymize_log(&config, input)?;
    write_log_csv(&anonymized, output, &output_spec)?;
    manifest.config_digest = sha256_file(config_path)?;
    manifest.output_digest = sha256_file(output)?;
    manifest
        .timings_ms
        .insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    std::fs::write(manifest_path, manifest.to_json()).map_err(|e| Error::io(manifest_path, e))?;
    Ok(manifest)
}
