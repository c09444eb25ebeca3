//! Ecological nestedness analysis of bipartite trade networks.
//!
//! Pipeline: transaction records ([`ingest`]) are aggregated into normalized
//! product × country import and export matrices, binarized at a trade
//! threshold ([`mutualistic`]), packed into their coldest row/column ordering
//! ([`nestedness`]), compared with random matrices of the same shape and fill
//! ([`null_models`]) and turned into rankings of countries and products
//! ([`rankings`]). [`report`] drives the pipeline from the command line.

pub mod ingest;
pub mod matrix;
pub mod mutualistic;
pub mod nestedness;
pub mod null_models;
pub mod rankings;
pub mod report;

pub use ingest::{TradeMatrixPair, TradeRecord};
pub use matrix::DenseMatrix;
pub use mutualistic::{BinaryMatrix, Flow};
pub use nestedness::{analyze, pack, NestednessResult, OptimizerBudget, Ordering};
