//! Strong zero modes of the cluster-Ising chain.
//!
//! The chain Hamiltonian is
//! `H = -g Σ_{i=1}^{L-2} X_{i-1} Z_i X_{i+1} + J Σ X_i X_{i+1} - J_NNN Σ X_i X_{i+2}`
//! on an open chain of even length. With this sign of the Ising term the edge
//! operator [`ZeroModeSpec::psi_operator`] commutes with `H` up to a single
//! string at the far end of the chain. Flipping the sign of `J` is a unitary
//! relabelling (`Z` on every other site) that leaves `Z_0 X_1`, the cluster
//! and NNN terms, and hence every autocorrelator, unchanged.

mod autocorr;
mod lifetime;

pub use autocorr::{
    autocorr_exact, autocorr_sampled, autocorr_spectral, basis_traces, sample_indices,
    single_string, variance_identity_check, AutocorrEstimate, AutocorrOptions, BulkBasis,
    ProductBasis, VarianceCheck,
};
pub use lifetime::{lifetime, lifetime_from_series, Lifetime};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroModeSpec {
    pub num_sites: usize,
    pub g: f64,
    pub j: f64,
    pub j_nnn: f64,
}

/// `[Ψ, H]` and its coefficient 2-norm.
#[derive(Clone, Debug)]
pub struct CommutatorResidual {
    pub norm: f64,
    pub commutator: PauliSum,
}

impl ZeroModeSpec {
    pub fn new(num_sites: usize, g: f64, j: f64, j_nnn: f64) -> Result<Self> {
        if num_sites < 4 || !num_sites.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "zero-mode chains need an even length of at least 4, got {num_sites}"
            )));
        }
        if !(g.is_finite() && g > 0.0) || !j.is_finite() || !j_nnn.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "couplings g = {g}, J = {j}, J_NNN = {j_nnn}"
            )));
        }
        Ok(ZeroModeSpec {
            num_sites,
            g,
            j,
            j_nnn,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.j / self.g
    }

    fn pair(&self, a: usize, b: usize) -> Result<PauliString> {
        PauliString::from_sparse(self.num_sites, &[(a, Pauli::X), (b, Pauli::X)])
    }

    pub fn cluster_hamiltonian(&self) -> Result<PauliSum> {
        let l = self.num_sites;
        let mut h = PauliSum::new(l);
        for i in 1..l - 1 {
            h.add_term(crate::models::cluster_stabilizer(l, i)?, -self.g)?;
        }
        Ok(h)
    }

    pub fn ising_hamiltonian(&self) -> Result<PauliSum> {
        let mut h = PauliSum::new(self.num_sites);
        for i in 0..self.num_sites - 1 {
            h.add_term(self.pair(i, i + 1)?, self.j)?;
        }
        Ok(h)
    }

    pub fn nnn_hamiltonian(&self) -> Result<PauliSum> {
        let mut h = PauliSum::new(self.num_sites);
        for i in 0..self.num_sites - 2 {
            h.add_term(self.pair(i, i + 2)?, -self.j_nnn)?;
        }
        Ok(h)
    }

    pub fn hamiltonian(&self) -> Result<PauliSum> {
        self.cluster_hamiltonian()?
            .add(&self.ising_hamiltonian()?)?
            .add(&self.nnn_hamiltonian()?)
    }

    /// Sublattice parities `(Z_0 Z_2 …, Z_1 Z_3 …)`.
    pub fn parities(&self) -> Result<(PauliString, PauliString)> {
        let l = self.num_sites;
        let even: Vec<_> = (0..l).step_by(2).map(|s| (s, Pauli::Z)).collect();
        let odd: Vec<_> = (1..l).step_by(2).map(|s| (s, Pauli::Z)).collect();
        Ok((
            PauliString::from_sparse(l, &even)?,
            PauliString::from_sparse(l, &odd)?,
        ))
    }

    /// `X_0`, `X_{L-1}`, `Z_0 X_1`, `X_{L-2} Z_{L-1}`.
    pub fn edge_modes(&self) -> Result<[PauliString; 4]> {
        let l = self.num_sites;
        Ok([
            PauliString::single(l, 0, Pauli::X)?,
            PauliString::single(l, l - 1, Pauli::X)?,
            PauliString::from_sparse(l, &[(0, Pauli::Z), (1, Pauli::X)])?,
            PauliString::from_sparse(l, &[(l - 2, Pauli::X), (l - 1, Pauli::Z)])?,
        ])
    }

    /// `N² = (1 - r²) / (1 - r^{2L-3})` with `r = J/g`; `2/(2L-3)` at `|r| = 1`.
    pub fn normalization(&self) -> f64 {
        let r = self.ratio();
        let p = 2 * self.num_sites as i32 - 3;
        if (r.abs() - 1.0).abs() < 1e-12 {
            return 2.0 / p as f64;
        }
        (1.0 - r * r) / (1.0 - r.powi(p))
    }

    /// `Ψ = N Σ_{j=0}^{L-2} r^j (Z_0 … Z_j) X_{j+1}`.
    pub fn psi_operator(&self) -> Result<PauliSum> {
        let l = self.num_sites;
        let n = self.normalization().sqrt();
        let r = self.ratio();
        let mut psi = PauliSum::new(l).with_threshold(0.0);
        for j in 0..l - 1 {
            let mut letters: Vec<(usize, Pauli)> = (0..=j).map(|k| (k, Pauli::Z)).collect();
            letters.push((j + 1, Pauli::X));
            psi.add_term(PauliString::from_sparse(l, &letters)?, n * r.powi(j as i32))?;
        }
        Ok(psi)
    }

    /// `[Ψ, H_cluster + H_Ising]`, computed symbolically.
    pub fn commutator_residual(&self) -> Result<CommutatorResidual> {
        if self.j_nnn != 0.0 {
            return Err(Error::InvalidArgument(
                "the residual closed form assumes J_NNN = 0".into(),
            ));
        }
        let h = self.cluster_hamiltonian()?.add(&self.ising_hamiltonian()?)?;
        // Cancelling pairs leave rounding residue near machine epsilon.
        let floor = 1e-14 * (self.g.abs() + self.j.abs());
        let c = self.psi_operator()?.commutator(&h)?.with_threshold(floor);
        Ok(CommutatorResidual {
            norm: c.hs_norm(),
            commutator: c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn spec(l: usize, r: f64) -> ZeroModeSpec {
        ZeroModeSpec::new(l, 1.0, r, 0.0).unwrap()
    }

    #[test]
    fn normalization_values() {
        assert!((spec(12, 0.5).normalization() - 0.75 / (1.0 - 0.5f64.powi(21))).abs() < 1e-15);
        assert!((spec(12, 1.0).normalization() - 2.0 / 21.0).abs() < 1e-15);
        assert_eq!(spec(8, 0.0).normalization(), 1.0);
        assert!(ZeroModeSpec::new(5, 1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn psi_terms() {
        let p = spec(4, 0.5).psi_operator().unwrap();
        assert_eq!(p.len(), 3);
        let n = spec(4, 0.5).normalization().sqrt();
        let c = |s: &str| p.coefficient(&PauliString::from_letters(s).unwrap()).re;
        assert!((c("ZXII") - n).abs() < 1e-15);
        assert!((c("ZZXI") - 0.5 * n).abs() < 1e-15);
        assert!((c("ZZZX") - 0.25 * n).abs() < 1e-15);
        let trivial = spec(6, 0.0).psi_operator().unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial.hs_norm(), 1.0);
    }

    #[test]
    fn psi_square_norm_follows_series() {
        // Σ coefficients² = N² (1 - r^{2L-2}) / (1 - r²).
        for (l, r) in [(4, 0.5), (8, 0.3), (12, 0.9)] {
            let s = spec(l, r);
            let want = s.normalization() * (1.0 - r.powi(2 * l as i32 - 2)) / (1.0 - r * r);
            assert!((s.psi_operator().unwrap().hs_norm().powi(2) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn residual_is_single_far_end_string() {
        for l in [4, 6, 8, 10] {
            for r in [0.1, 0.3, 0.5, 0.9] {
                let s = spec(l, r);
                let res = s.commutator_residual().unwrap();
                assert_eq!(res.commutator.len(), 1);
                let (p, c) = res.commutator.terms().next().unwrap();
                let mut letters: Vec<_> = (0..l - 2).map(|k| (k, Pauli::Z)).collect();
                letters.push((l - 2, Pauli::Y));
                assert_eq!(*p, PauliString::from_sparse(l, &letters).unwrap());
                assert_eq!(p.weight(), l - 1);
                let closed = 2.0 * s.normalization().sqrt() * s.j * r.powi(l as i32 - 2);
                assert!((*c - Complex64::new(0.0, closed)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn opposite_ising_sign_breaks_cancellation() {
        let s = spec(6, 0.3);
        let flipped = ZeroModeSpec { j: -0.3, ..s };
        let h = s.cluster_hamiltonian().unwrap().add(&flipped.ising_hamiltonian().unwrap()).unwrap();
        let c = s.psi_operator().unwrap().commutator(&h).unwrap();
        assert!(c.len() > 1);
    }

    #[test]
    fn symmetry_and_edge_mode_algebra() {
        let s = ZeroModeSpec::new(8, 1.0, 0.3, 0.1).unwrap();
        let (f1, f2) = s.parities().unwrap();
        let f = f1.multiply(&f2).unwrap();
        let cluster = s.cluster_hamiltonian().unwrap();
        let full = s.hamiltonian().unwrap();
        for m in s.edge_modes().unwrap() {
            let m = PauliSum::from(m);
            assert!(m.commutator(&cluster).unwrap().is_empty());
            assert!(!m.terms().next().unwrap().0.commutes(&f).unwrap());
        }
        let [x0, xl, _, _] = s.edge_modes().unwrap();
        assert!(PauliSum::from(x0).commutator(&full).unwrap().is_empty());
        assert!(PauliSum::from(xl).commutator(&full).unwrap().is_empty());
        for (p, _) in s.psi_operator().unwrap().terms() {
            assert!(!p.commutes(&f).unwrap());
        }
    }
}
