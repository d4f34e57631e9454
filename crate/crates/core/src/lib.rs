//! Classical simulation toolkit for hybrid digital-analog protocols.
//!
//! A shallow circuit `D` sandwiching an analog block `H_A` realizes the
//! effective Hamiltonian `D† H_A D`. This crate compiles such Hamiltonians
//! exactly at the level of Pauli sums ([`pauli`]), builds the digital blocks
//! used by the cluster-field, cluster-Ising and four-body protocols
//! ([`circuits`]), simulates the resulting dynamics on dense state vectors
//! ([`engine`]), and provides the supporting physics: ion-chain coupling
//! synthesis ([`ionchain`]), stochastic dephasing ([`noise`]) and
//! strong-zero-mode analysis ([`zeromode`]).

pub mod circuits;
pub mod engine;
mod error;
pub mod ionchain;
pub mod models;
pub mod noise;
pub mod par;
pub mod pauli;
pub mod rng;
pub mod zeromode;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
