//! Standard-library companion to `gofres-core`: JSON documents for graphs
//! and curves, CSV/JSON/text reports, SVG plots and the `gofres`
//! command-line tool.

pub mod cli;
pub mod format;
pub mod io;
pub mod report;
pub mod svg;

pub use format::fmt_e;
