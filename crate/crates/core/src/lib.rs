// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod forest;
pub mod importance;
pub mod ingest;
pub mod model;
pub mod seed;
pub mod synth;
mod textfmt;
pub mod tree;
