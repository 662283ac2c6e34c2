//! Lane-parallel Smith-Waterman protein database search.
//!
//! A library and CLI for exact local-alignment scoring of a protein query
//! against a length-sorted sequence database. Alignments run on one of
//! three lane-parallel kernels — two inter-sequence variants that score one
//! subject per lane, and an intra-sequence striped variant — all verified
//! to return exactly the scalar dynamic-programming scores. Searches fan
//! out over a worker pool with guided chunk scheduling and report
//! throughput in billions of cell updates per second.

pub mod cli;
pub mod dbindex;
pub mod engine;
mod error;
pub mod kernels;
mod lanes;
pub mod scoring;
pub mod seq;

pub use error::{Error, Result};
