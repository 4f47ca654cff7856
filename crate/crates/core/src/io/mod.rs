//! Dataset and parameter documents, empirical estimation and reports.

mod counts;
mod params_doc;
mod report;
mod scc_doc;

pub use counts::{estimate_from_counts, estimate_from_table, parse_counts, write_counts, CountsTable};
pub use params_doc::{parse_params, parse_params_value, params_to_value, serialize_params};
pub use report::{
    classification_to_value, recovery_to_value, report_to_value, to_canonical_string, witness_to_value,
};
pub use scc_doc::{parse_scc, parse_scc_with, serialize_scc};
