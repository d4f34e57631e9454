//! Dense reference implementations, independent of the state-vector kernels.
//!
//! Everything here goes through [`PauliSum::to_matrix`] (explicit Kronecker
//! products) and full eigendecompositions, so it is only usable for small
//! systems.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::state::StateVector;
use crate::circuits::Circuit;
use crate::error::Result;
use crate::pauli::{Gate, Pauli, PauliString, PauliSum};

/// Full unitary of one gate.
pub fn gate_matrix(gate: &Gate, num_sites: usize) -> Result<DMatrix<Complex64>> {
    gate.validate(num_sites)?;
    let id = PauliString::identity(num_sites);
    let one = |site, p| PauliString::single(num_sites, site, p);
    let rot = |g: PauliString, phi: f64| -> Result<PauliSum> {
        let mut s = PauliSum::new(num_sites).with_threshold(0.0);
        s.add_term(id.clone(), phi.cos())?;
        s.add_term(g, Complex64::new(0.0, -phi.sin()))?;
        Ok(s)
    };
    let sum = match *gate {
        Gate::Rx { site, theta } => rot(one(site, Pauli::X)?, theta / 2.0)?,
        Gate::Ry { site, theta } => rot(one(site, Pauli::Y)?, theta / 2.0)?,
        Gate::Rz { site, theta } => rot(one(site, Pauli::Z)?, theta / 2.0)?,
        Gate::Xx {
            first,
            second,
            theta,
        } => rot(
            PauliString::from_sparse(num_sites, &[(first, Pauli::X), (second, Pauli::X)])?,
            theta,
        )?,
        Gate::H { site } => PauliSum::from_real_terms(
            num_sites,
            [
                (one(site, Pauli::X)?, FRAC_1_SQRT_2),
                (one(site, Pauli::Z)?, FRAC_1_SQRT_2),
            ],
        )?,
    };
    sum.to_matrix()
}

/// Unitary of a whole circuit (first gate rightmost).
pub fn circuit_matrix(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.num_sites();
    let dim = 1usize << n.min(crate::pauli::MATRIX_SITE_CAP);
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for g in circuit.gates() {
        u = gate_matrix(g, n)? * u;
    }
    Ok(u)
}

/// `exp(-iHt)` by diagonalization.
pub fn hermitian_expm(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|e| Complex64::new(0.0, -e * t).exp()),
    ));
    v * phases * v.adjoint()
}

/// Lowest eigenvalue and an orthonormal basis of its eigenspace.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub energy: f64,
    pub vectors: Vec<DVector<Complex64>>,
}

/// Eigenvalues within `1e-9` of the minimum count as degenerate.
pub fn ground_space(h: &PauliSum) -> Result<GroundSpace> {
    let eig = h.to_matrix()?.symmetric_eigen();
    let e0 = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let vectors = (0..eig.eigenvalues.len())
        .filter(|&k| eig.eigenvalues[k] - e0 < 1e-9)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    Ok(GroundSpace {
        energy: e0,
        vectors,
    })
}

/// Weight of `psi` in the ground space of `h`.
pub fn ground_fidelity(psi: &StateVector, h: &PauliSum) -> Result<f64> {
    let gs = ground_space(h)?;
    let v = DVector::from_column_slice(psi.amplitudes());
    Ok(gs.vectors.iter().map(|g| g.dotc(&v).norm_sqr()).sum())
}

/// `min_φ ‖a - e^{iφ} b‖_F`.
pub fn phase_invariant_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let tr: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let ph = if tr.norm() > 0.0 { tr / tr.norm() } else { Complex64::new(1.0, 0.0) };
    (a - b * ph).norm()
}
