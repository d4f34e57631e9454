use num_complex::Complex64;

use super::operator::PauliOperator;
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::pauli::{Gate, PauliSum};

/// Imaginary parts of expectation values above this are an error.
const EXPECT_IMAG_TOL: f64 = 1e-10;
/// Norm drift that may be silently renormalized.
pub(crate) const RENORM_LIMIT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_sites: usize) -> Result<Self> {
        StateVector::basis(num_sites, 0)
    }

    pub fn basis(num_sites: usize, index: usize) -> Result<Self> {
        super::check_sites(num_sites)?;
        let dim = 1usize << num_sites;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_sites} sites"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_sites, amps })
    }

    /// Product state from normalized single-site vectors, site 0 first.
    pub fn product(sites: &[[Complex64; 2]]) -> Result<Self> {
        let n = sites.len();
        super::check_sites(n)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for (j, v) in sites.iter().enumerate() {
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("site {j} vector not normalized")));
            }
            // The new site is the highest bit so far.
            let mut next = Vec::with_capacity(amps.len() * 2);
            next.extend(amps.iter().map(|a| a * v[0]));
            next.extend(amps.iter().map(|a| a * v[1]));
            amps = next;
        }
        Ok(StateVector { num_sites: n, amps })
    }

    pub fn from_amplitudes(num_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        super::check_sites(num_sites)?;
        if amps.len() != 1usize << num_sites {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {num_sites} sites",
                amps.len()
            )));
        }
        let s = StateVector { num_sites, amps };
        if (s.norm() - 1.0).abs() > RENORM_LIMIT {
            return Err(Error::NormDrift((s.norm() - 1.0).abs()));
        }
        Ok(s)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<Complex64> {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_len(other.num_sites)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: n,
            });
        }
        Ok(())
    }

    /// Renormalize if the drift is tiny, otherwise report it.
    pub(crate) fn renormalize_checked(&mut self) -> Result<()> {
        let n = self.norm();
        let drift = (n - 1.0).abs();
        if drift > RENORM_LIMIT {
            return Err(Error::NormDrift(drift));
        }
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_sites)?;
        match *gate {
            Gate::Xx {
                first,
                second,
                theta,
            } => {
                let c = crate::pauli::snap_unit(theta.cos());
                let s = crate::pauli::snap_unit(theta.sin());
                let mis = Complex64::new(0.0, -s);
                let (bf, mask) = (1usize << first, (1usize << first) | (1usize << second));
                for b in 0..self.amps.len() {
                    if b & bf == 0 {
                        let (i, j) = (b, b ^ mask);
                        let (a0, a1) = (self.amps[i], self.amps[j]);
                        self.amps[i] = a0 * c + a1 * mis;
                        self.amps[j] = a1 * c + a0 * mis;
                    }
                }
            }
            _ => {
                let m = gate.single_qubit_matrix().expect("single-qubit gate");
                let bit = 1usize << gate.targets().0;
                for b in 0..self.amps.len() {
                    if b & bit == 0 {
                        let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                        self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.check_len(circuit.num_sites())?;
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩`; errors if `O` is not Hermitian or the result is not real.
    pub fn expect(&self, observable: &PauliSum) -> Result<f64> {
        self.check_len(observable.num_sites())?;
        if !observable.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        let op = PauliOperator::new(observable)?;
        let v = op.expectation(&self.amps);
        if v.im.abs() > EXPECT_IMAG_TOL {
            return Err(Error::InvalidArgument(format!(
                "expectation value has imaginary part {:e}",
                v.im
            )));
        }
        Ok(v.re)
    }
}
