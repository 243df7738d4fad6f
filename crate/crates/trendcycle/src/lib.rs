//! CSV ingestion, tabular reports, simulation and the command-line front end
//! for [`trendcycle_core`].

pub mod cli;
pub mod io;
pub mod simulate;
pub mod study;
pub mod table;
