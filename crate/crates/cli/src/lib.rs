//! Experiment harness for digital-analog spin-chain simulations.

pub mod config;
pub mod error;
pub mod experiments;
pub mod observables;
pub mod output;
