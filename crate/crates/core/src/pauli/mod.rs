//! Pauli strings and Pauli sums with exact conjugation by gates.
//!
//! A string is stored in symplectic form: bit `j` of the `x` plane and of the
//! `z` plane encode the letter on site `j` (`Y` is `x = z = 1`), plus a global
//! phase in `{1, i, -1, -i}`. Sums keep phase-free canonical strings as keys.

mod gate;
mod string;
mod sum;
mod text;

pub use gate::Gate;
pub use string::{Pauli, PauliString, Phase};
pub use sum::{PauliSum, DEFAULT_PRUNE_THRESHOLD, HERMITIAN_TOL, MATRIX_SITE_CAP};

pub(crate) use gate::snap_unit;
