//! Command-line front end. Every stage of the pipeline is its own
//! subcommand; `anonymize` runs them all.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::hierarchy::Perspective;
use crate::log_io::{load_hierarchy, read_log, write_log_csv, InputSpec, LogCsvSpec};
use crate::log_model::{drop_singleton_variants, validate_k, EventLog, WILDCARD};
use crate::metrics::{
    export_dot, handover_graph, handover_precision, remaining_variants, to_dot, Aggregation,
};
use crate::pipeline::run_pipeline;
use crate::selector::{select, UtilityNotion};
use crate::vectorizer::{vectorize, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "pmdg",
    version,
    about = "k-anonymize multi-perspective event logs by generalization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// How CSV logs are laid out.
#[derive(Debug, Clone, Args)]
pub struct LogFormat {
    #[arg(long, default_value = "case")]
    pub case_column: String,
    #[arg(long, default_value = "activity")]
    pub activity_column: String,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Literal that stands for the wildcard in input and output files.
    #[arg(long, default_value = WILDCARD)]
    pub wildcard_literal: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drop trace variants that occur only once.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Pad traces to a common length with wildcard events.
    Vectorize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "msa")]
        strategy: Strategy,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Score candidate hierarchies for one perspective and pick the best.
    SelectHierarchy {
        #[arg(long = "in")]
        input: PathBuf,
        /// `activity` or an attribute name.
        #[arg(long)]
        perspective: String,
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<PathBuf>,
        #[arg(long, default_value = "class_count")]
        notion: UtilityNotion,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Run the whole pipeline from a configuration file.
    Anonymize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Manifest path; defaults to `<out>.manifest.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check k-anonymity; exits 1 when violated.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long = "attr", value_delimiter = ',')]
        attributes: Vec<String>,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Utility metrics.
    #[command(subcommand)]
    Metrics(MetricsCommand),
}

#[derive(Debug, Subcommand)]
pub enum MetricsCommand {
    /// Number of distinct control-flow variants.
    Variants {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Share of handover information kept by the anonymized log, in percent.
    HandoverPrecision {
        #[arg(long)]
        original: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "attr")]
        attribute: String,
        #[arg(long)]
        hierarchy: PathBuf,
        /// Average over distinct value pairs instead of occurrences.
        #[arg(long)]
        distinct_pairs: bool,
        #[command(flatten)]
        format: LogFormat,
    },
    /// Directed handover graph; Graphviz to `--dot` or stdout.
    HandoverGraph {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "attr")]
        attribute: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        format: LogFormat,
    },
}

impl LogFormat {
    fn input_spec(&self) -> InputSpec {
        InputSpec {
            case_column: self.case_column.clone(),
            activity_column: self.activity_column.clone(),
            attribute_columns: None,
            delimiter: self.delimiter,
        }
    }

    fn read(&self, path: &Path) -> Result<(EventLog, LogCsvSpec)> {
        let spec = if crate::log_io::is_xes(path) {
            LogCsvSpec::new(&self.case_column, &self.activity_column, &[])
                .with_wildcard(&self.wildcard_literal)
        } else {
            self.input_spec().csv_spec(path, &self.wildcard_literal)?
        };
        let log = read_log(path, &spec)?;
        // XES logs get their column list from the parsed schema.
        let spec = if crate::log_io::is_xes(path) {
            let cols: Vec<&str> = log.schema().iter().map(String::as_str).collect();
            let mut s = LogCsvSpec::new(&self.case_column, &self.activity_column, &cols)
                .with_wildcard(&self.wildcard_literal);
            s.delimiter = self.input_spec().delimiter_byte()?;
            s
        } else {
            spec
        };
        Ok((log, spec))
    }

    fn write(&self, log: &EventLog, path: &Path, spec: LogCsvSpec) -> Result<()> {
        write_log_csv(log, path, &spec.with_origin_column())
    }
}

fn perspective(name: &str) -> Perspective {
    if name == "activity" {
        Perspective::Activity
    } else {
        Perspective::Attribute(name.to_string())
    }
}

fn fmt_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Executes one command. `Ok(false)` means the command ran but its check
/// failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Preprocess { input, out, format } => {
            let (log, spec) = format.read(&input)?;
            let kept = drop_singleton_variants(&log);
            eprintln!("kept {} of {} traces", kept.len(), log.len());
            format.write(&kept, &out, spec)?;
        }
        Command::Vectorize {
            input,
            out,
            strategy,
            format,
        } => {
            let (log, spec) = format.read(&input)?;
            let v = vectorize(&log, strategy);
            eprintln!("aligned length {}", v.max_trace_len());
            format.write(&v, &out, spec)?;
        }
        Command::SelectHierarchy {
            input,
            perspective: name,
            candidates,
            notion,
            weights,
            format,
        } => {
            let (log, _) = format.read(&input)?;
            let p = perspective(&name);
            if let Perspective::Attribute(a) = &p {
                log.attribute_index(a)?;
            }
            let hierarchies = candidates
                .iter()
                .map(|f| load_hierarchy(f, p.clone(), &format.wildcard_literal))
                .collect::<Result<Vec<_>>>()?;
            let selection = select(&log, &hierarchies, &weights, notion)?;
            println!("candidate\tdepth\ttotal\tper_level");
            for (i, (file, profile)) in candidates.iter().zip(&selection.profiles).enumerate() {
                println!(
                    "{i}:{}\t{}\t{:.4}\t{}",
                    file.display(),
                    hierarchies[i].depth(),
                    profile.total,
                    fmt_row(&profile.per_level)
                );
            }
            println!("selected {}", candidates[selection.index].display());
        }
        Command::Anonymize {
            config,
            input,
            out,
            report,
        } => {
            let report = report.unwrap_or_else(|| {
                let mut s = out.clone().into_os_string();
                s.push(".manifest.json");
                PathBuf::from(s)
            });
            let m = run_pipeline(&config, &input, &out, &report)?;
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "k={} classes={} min_class={} variants {} -> {} nodes_evaluated={}",
                m.k,
                m.metrics.equivalence_classes,
                m.metrics.min_class_size,
                m.metrics.variants_original,
                m.metrics.variants_anonymized,
                m.metrics.nodes_evaluated
            );
        }
        Command::Validate {
            input,
            k,
            attributes,
            format,
        } => {
            if k == 0 {
                return Err(Error::Config("k must be at least 1".into()));
            }
            let (log, _) = format.read(&input)?;
            let report = validate_k(&log, &attributes, k)?;
            let min = report.class_sizes.iter().min().copied().unwrap_or(0);
            println!(
                "{} k={k} classes={} min_class={min} violations={}",
                if report.satisfied {
                    "satisfied"
                } else {
                    "violated"
                },
                report.class_sizes.len(),
                report.violations.len()
            );
            return Ok(report.satisfied);
        }
        Command::Metrics(m) => match m {
            MetricsCommand::Variants { input, format } => {
                let (log, _) = format.read(&input)?;
                println!("{}", remaining_variants(&log));
            }
            MetricsCommand::HandoverPrecision {
                original,
                input,
                attribute,
                hierarchy,
                distinct_pairs,
                format,
            } => {
                let (orig, _) = format.read(&original)?;
                let (anon, _) = format.read(&input)?;
                let h = load_hierarchy(
                    &hierarchy,
                    Perspective::Attribute(attribute.clone()),
                    &format.wildcard_literal,
                )?;
                let aggregation = if distinct_pairs {
                    Aggregation::DistinctPairs
                } else {
                    Aggregation::Occurrences
                };
                let p = handover_precision(&orig, &anon, &attribute, &h, aggregation)?;
                println!("{p:.1}");
            }
            MetricsCommand::HandoverGraph {
                input,
                attribute,
                dot,
                format,
            } => {
                let (log, _) = format.read(&input)?;
                let g = handover_graph(&log, &attribute)?;
                match dot {
                    Some(path) => export_dot(&g, &path)?,
                    None => print!("{}", to_dot(&g)),
                }
            }
        },
    }
    Ok(true)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("PMDG_THREADS") else {
        return Ok(());
    };
    let n: usize =
        v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
            Error::Config(format!("PMDG_THREADS=`{v}` is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

/// Parses the process arguments, runs the command and returns the exit
/// status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("pmdg: {e}");
            e.exit_code()
        }
    }
}
