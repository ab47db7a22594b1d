//! Heavy-tail distribution analysis for procurement-style transaction data.
//!
//! The pipeline aggregates tender records into three series (supplier
//! revenues, authority spendings, bidder counts), fits exponential,
//! power-law, and Zipf models to their tails, checks the fits with a
//! parametric-bootstrap Kolmogorov–Smirnov test, measures concentration via
//! Lorenz/Gini and top shares, and solves the matching constrained
//! maximum-entropy problems (Shannon and Tsallis) with sample generators.

pub mod concentration;
pub mod distributions;
pub mod error;
pub mod gof;
pub mod ingest;
pub mod maxent;
pub mod report;
pub mod seeding;
pub mod tailfit;

pub use error::{Error, Result};
