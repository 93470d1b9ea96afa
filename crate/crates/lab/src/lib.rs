//! File formats, scans, the acceptance suite and the command-line front end
//! for `semiflat-core`.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod grid_io;
pub mod model_file;
pub mod output;
pub mod radii;
pub mod sampling;
pub mod scan;
pub mod table;

#[cfg(test)]
mod tests;
