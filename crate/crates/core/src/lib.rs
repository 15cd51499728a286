//! k-anonymity for event logs whose events carry attributes besides the
//! activity. Traces are aligned to a common length, then activities and
//! attributes are generalized along value hierarchies until every
//! combination of control-flow and selected attribute sequences is shared
//! by at least k traces.

pub mod anonymizer;
pub mod cli;
pub mod error;
pub mod hierarchy;
pub mod log_io;
pub mod log_model;
pub mod metrics;
pub mod pipeline;
pub mod selector;
pub mod vectorizer;

pub use anonymizer::{search, search_with, LevelVector, SearchOptions};
pub use error::{Error, Result};
pub use hierarchy::{apply_to_log, Hierarchy, HierarchySet, HierarchyTable, Perspective};
pub use log_model::{validate_k, Event, EventLog, Trace, MISSING, WILDCARD};
pub use vectorizer::{vectorize, Strategy};
