//! Score-file ingest, reports, plots and the `itemfair` command-line tool,
//! on top of the `no_std` analysis core in `itemfair-core`.

pub mod cli;
pub mod csv_format;
pub mod report;
pub mod svg;

pub use csv_format::{parse_score_csv, write_score_csv, CsvError};
pub use report::{ClassicEntry, Report};
pub use svg::render_plane;
