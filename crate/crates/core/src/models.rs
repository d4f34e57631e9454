//! Native and effective Hamiltonians of the three protocols.
//!
//! Coupling matrices are symmetric `L x L` with a zero diagonal; each
//! unordered pair contributes `J_ij X_i X_j` once.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

fn string(num_sites: usize, letters: &[(usize, Pauli)]) -> Result<PauliString> {
    PauliString::from_sparse(num_sites, letters)
}

/// `J_ij = J exp(-(|i-j| - 1)/ξ)`, so nearest neighbours couple with `J`.
pub fn exponential_couplings(num_sites: usize, j: f64, xi: f64) -> Result<DMatrix<f64>> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::InvalidArgument(format!("decay length {xi}")));
    }
    Ok(DMatrix::from_fn(num_sites, num_sites, |a, b| {
        if a == b {
            0.0
        } else {
            let d = a.abs_diff(b) as f64;
            j * (-(d - 1.0) / xi).exp()
        }
    }))
}

/// Nearest neighbours `j`, next-nearest `j_prime`, nothing further.
pub fn truncated_couplings(num_sites: usize, j: f64, j_prime: f64) -> DMatrix<f64> {
    DMatrix::from_fn(num_sites, num_sites, |a, b| match a.abs_diff(b) {
        1 => j,
        2 => j_prime,
        _ => 0.0,
    })
}

pub fn check_couplings(couplings: &DMatrix<f64>) -> Result<()> {
    let n = couplings.nrows();
    if couplings.ncols() != n {
        return Err(Error::InvalidArgument("coupling matrix is not square".into()));
    }
    for a in 0..n {
        for b in 0..n {
            let v = couplings[(a, b)];
            if !v.is_finite() || (v - couplings[(b, a)]).abs() > 1e-12 * v.abs().max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "coupling matrix not finite and symmetric at ({a}, {b})"
                )));
            }
        }
    }
    Ok(())
}

/// Mean of `J_{i,i+1}`.
pub fn mean_nearest_neighbour(couplings: &DMatrix<f64>) -> f64 {
    let n = couplings.nrows();
    (0..n - 1).map(|i| couplings[(i, i + 1)]).sum::<f64>() / (n - 1) as f64
}

/// `Σ_{i<j} J_ij X_i X_j`.
pub fn ising_xx(couplings: &DMatrix<f64>) -> Result<PauliSum> {
    check_couplings(couplings)?;
    let n = couplings.nrows();
    let mut h = PauliSum::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if couplings[(a, b)] != 0.0 {
                h.add_term(string(n, &[(a, Pauli::X), (b, Pauli::X)])?, couplings[(a, b)])?;
            }
        }
    }
    Ok(h)
}

/// `Σ_j weights_j P_j` for a single-site letter `P`.
pub fn one_body(letter: Pauli, weights: &[f64]) -> Result<PauliSum> {
    let n = weights.len();
    let mut h = PauliSum::new(n);
    for (j, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            h.add_term(PauliString::single(n, j, letter)?, w)?;
        }
    }
    Ok(h)
}

/// `Σ g_j Z_j + Σ h_j X_j`.
pub fn field_hamiltonian(g: &[f64], h: &[f64]) -> Result<PauliSum> {
    if g.len() != h.len() {
        return Err(Error::LengthMismatch {
            left: g.len(),
            right: h.len(),
        });
    }
    one_body(Pauli::Z, g)?.add(&one_body(Pauli::X, h)?)
}

/// `X_{j-1} Z_j X_{j+1}` with indices taken modulo `L`.
pub fn cluster_stabilizer(num_sites: usize, j: usize) -> Result<PauliString> {
    let l = num_sites;
    string(l, &[((j + l - 1) % l, Pauli::X), (j, Pauli::Z), ((j + 1) % l, Pauli::X)])
}

/// `-Σ g_j X_{j-1} Z_j X_{j+1} + Σ h_j X_j`, periodic indices.
pub fn cluster_field_target(g: &[f64], h: &[f64]) -> Result<PauliSum> {
    if g.len() != h.len() {
        return Err(Error::LengthMismatch {
            left: g.len(),
            right: h.len(),
        });
    }
    let l = g.len();
    let mut out = one_body(Pauli::X, h)?;
    for (j, &gj) in g.iter().enumerate() {
        if gj != 0.0 {
            out.add_term(cluster_stabilizer(l, j)?, -gj)?;
        }
    }
    Ok(out)
}

/// Analog cluster-Ising Hamiltonian `Σ J_ij X_i X_j + ξ g Σ_bulk Z_j`.
pub fn cluster_ising_analog(couplings: &DMatrix<f64>, g: f64, xi: f64) -> Result<PauliSum> {
    let n = couplings.nrows();
    let mut field = vec![0.0; n];
    for f in field.iter_mut().take(n - 1).skip(1) {
        *f = xi * g;
    }
    ising_xx(couplings)?.add(&one_body(Pauli::Z, &field)?)
}

/// `-g Σ_bulk X_{j-1} Z_j X_{j+1} + Σ J_ij X_i X_j`, open chain.
pub fn cluster_ising_target(couplings: &DMatrix<f64>, g: f64) -> Result<PauliSum> {
    let n = couplings.nrows();
    let mut h = ising_xx(couplings)?;
    for j in 1..n - 1 {
        h.add_term(cluster_stabilizer(n, j)?, -g)?;
    }
    Ok(h)
}

/// Open-chain analog TFIM `J Σ X_j X_{j+1} + J' Σ X_j X_{j+2} + g Σ Z_j`.
pub fn four_body_analog(num_sites: usize, j: f64, j_prime: f64, g: f64) -> Result<PauliSum> {
    ising_xx(&truncated_couplings(num_sites, j, j_prime))?
        .add(&one_body(Pauli::Z, &vec![g; num_sites])?)
}

/// `J Σ X_{j-1} Y_j Y_{j+1} X_{j+2} + J' Σ Z_j Z_{j+2} + h Σ X_j`, periodic
/// four-body sum over `j = 1..L-1` (1-based), open `Z Z` sum over `j = 1..L-2`.
pub fn four_body_target(num_sites: usize, j: f64, j_prime: f64, h: f64) -> Result<PauliSum> {
    let l = num_sites;
    let mut out = one_body(Pauli::X, &vec![h; l])?;
    for s in 0..l - 1 {
        let sites = [(s + l - 1) % l, s % l, (s + 1) % l, (s + 2) % l];
        out.add_term(
            string(
                l,
                &[
                    (sites[0], Pauli::X),
                    (sites[1], Pauli::Y),
                    (sites[2], Pauli::Y),
                    (sites[3], Pauli::X),
                ],
            )?,
            j,
        )?;
    }
    for s in 0..l - 2 {
        out.add_term(string(l, &[(s, Pauli::Z), (s + 2, Pauli::Z)])?, j_prime)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_model_nn_equals_j() {
        let c = exponential_couplings(6, 2.0, 1.5).unwrap();
        assert_eq!(mean_nearest_neighbour(&c), 2.0);
        assert!((c[(0, 2)] - 2.0 * (-1.0f64 / 1.5).exp()).abs() < 1e-15);
        assert_eq!(c[(3, 3)], 0.0);
    }

    #[test]
    fn pairs_counted_once() {
        let h = ising_xx(&truncated_couplings(3, 1.0, 0.0)).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(
            h.coefficient(&PauliString::from_letters("XXI").unwrap()).re,
            1.0
        );
    }

    #[test]
    fn asymmetric_couplings_rejected() {
        let mut c = truncated_couplings(3, 1.0, 0.0);
        c[(0, 1)] = 0.5;
        assert!(ising_xx(&c).is_err());
    }
}
