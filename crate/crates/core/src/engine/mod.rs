//! Dense state-vector dynamics.
//!
//! Basis index bit `j` is the computational state of site `j`. Static
//! Hamiltonians are propagated with a Chebyshev expansion of `exp(-iHt)`;
//! time-dependent ones with midpoint-frozen steps refined by Richardson
//! extrapolation.

mod check;
pub mod dense;
mod evolve;
mod expm;
mod operator;
mod schedule;
mod state;

pub use check::{effective_evolution_check, run_analog, AnalogBlock, EffectiveCheck};
pub use evolve::{evolve, evolve_operator, evolve_static, evolve_times};
pub use operator::PauliOperator;
pub use schedule::{Coefficient, HamiltonianSchedule, Profile, RampProfile, ScheduleTerm};
pub use state::StateVector;

/// Largest register the engine will allocate.
pub const MAX_ENGINE_SITES: usize = 24;
/// Default integration tolerance (state-norm distance).
pub const DEFAULT_TOL: f64 = 1e-8;

pub(crate) fn check_sites(num_sites: usize) -> crate::Result<()> {
    if num_sites > MAX_ENGINE_SITES {
        return Err(crate::Error::TooManySites {
            requested: num_sites,
            limit: MAX_ENGINE_SITES,
        });
    }
    Ok(())
}

/// `⟨ψ|O|ψ⟩` for Hermitian `O`.
pub fn expect(psi: &StateVector, observable: &crate::pauli::PauliSum) -> crate::Result<f64> {
    psi.expect(observable)
}
