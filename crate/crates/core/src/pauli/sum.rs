use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::gate::{snap_unit, Gate};
use super::string::{Pauli, PauliString, Phase};
use crate::circuits::Circuit;
use crate::error::{Error, Result};

pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;
/// Imaginary parts below this count as zero in Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest system [`PauliSum::to_matrix`] will assemble.
pub const MATRIX_SITE_CAP: usize = 12;

/// A complex-weighted sum of phase-free Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    num_sites: usize,
    terms: BTreeMap<PauliString, Complex64>,
    threshold: f64,
}

impl PauliSum {
    pub fn new(num_sites: usize) -> Self {
        PauliSum {
            num_sites,
            terms: BTreeMap::new(),
            threshold: DEFAULT_PRUNE_THRESHOLD,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.prune();
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Build from real coefficients; the result is Hermitian.
    pub fn from_real_terms<I>(num_sites: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut s = PauliSum::new(num_sites);
        for (p, c) in terms {
            s.add_term(p, Complex64::new(c, 0.0))?;
        }
        Ok(s)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coef * p`, folding the phase of `p` into the coefficient.
    pub fn add_term(&mut self, p: PauliString, coef: impl Into<Complex64>) -> Result<()> {
        if p.num_sites() != self.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: p.num_sites(),
            });
        }
        let (key, phase) = p.split_phase();
        let c = coef.into() * phase.to_complex();
        let total = self.terms.get(&key).copied().unwrap_or_default() + c;
        if total.norm() <= self.threshold {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, total);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Coefficient of `p` (its phase accounted for), zero if absent.
    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        let (key, phase) = p.clone().split_phase();
        self.terms
            .get(&key)
            .map(|c| c * phase.conj().to_complex())
            .unwrap_or_default()
    }

    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliString::identity(self.num_sites))
    }

    pub fn prune(&mut self) {
        let t = self.threshold;
        self.terms.retain(|_, c| c.norm() > t);
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.values().all(|c| c.im.abs() <= HERMITIAN_TOL)
    }

    /// Real coefficients; errors if any imaginary part survives.
    pub fn real_terms(&self) -> Result<Vec<(PauliString, f64)>> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        Ok(self.terms.iter().map(|(p, c)| (p.clone(), c.re)).collect())
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> PauliSum {
        let f = factor.into();
        let mut out = PauliSum::new(self.num_sites).with_threshold(self.threshold);
        for (p, c) in &self.terms {
            out.terms.insert(p.clone(), c * f);
        }
        out.prune();
        out
    }

    fn check_len(&self, other: &PauliSum) -> Result<()> {
        if self.num_sites != other.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: other.num_sites,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_len(other)?;
        let mut out = PauliSum::new(self.num_sites).with_threshold(self.threshold);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.multiply(b)?, ca * cb)?;
            }
        }
        Ok(out)
    }

    /// `[self, other]`, computed term by term from anticommuting pairs.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_len(other)?;
        let mut out = PauliSum::new(self.num_sites).with_threshold(self.threshold);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if !a.commutes(b)? {
                    out.add_term(a.multiply(b)?, ca * cb * 2.0)?;
                }
            }
        }
        Ok(out)
    }

    /// Largest coefficient difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &PauliSum) -> Result<f64> {
        let d = self.sub(other)?.with_threshold(0.0);
        Ok(d.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// `sqrt(Tr(O†O) / 2^L)`.
    pub fn hs_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `U† O U` for a single gate `U`.
    pub fn conjugate_by_gate(&self, gate: &Gate) -> Result<PauliSum> {
        gate.validate(self.num_sites)?;
        let mut out = PauliSum::new(self.num_sites).with_threshold(self.threshold);
        match gate.generator(self.num_sites)? {
            None => {
                let (site, _) = gate.targets();
                for (p, c) in &self.terms {
                    let mut q = p.clone();
                    let mut coef = *c;
                    match p.letter(site) {
                        Pauli::X => q.set(site, Pauli::Z),
                        Pauli::Z => q.set(site, Pauli::X),
                        Pauli::Y => coef = -coef,
                        Pauli::I => {}
                    }
                    out.add_term(q, coef)?;
                }
            }
            Some((g, phi)) => {
                // U = exp(-iφG); for {P,G} = 0, U†PU = cos2φ P - i sin2φ P G.
                let cs = snap_unit((2.0 * phi).cos());
                let sn = snap_unit((2.0 * phi).sin());
                for (p, c) in &self.terms {
                    if p.commutes(&g)? {
                        out.add_term(p.clone(), *c)?;
                        continue;
                    }
                    if cs != 0.0 {
                        out.add_term(p.clone(), c * cs)?;
                    }
                    if sn != 0.0 {
                        let q = p.multiply(&g)?;
                        out.add_term(q, c * sn * Phase::MINUS_I.to_complex())?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `C† O C` where the circuit's gates act in time order.
    pub fn conjugate_by_circuit(&self, circuit: &Circuit) -> Result<PauliSum> {
        if circuit.num_sites() != self.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: circuit.num_sites(),
            });
        }
        let mut out = self.clone();
        for gate in circuit.gates().iter().rev() {
            out = out.conjugate_by_gate(gate)?;
        }
        Ok(out)
    }

    /// Dense matrix by explicit Kronecker products; site `j` is bit `j`.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.num_sites > MATRIX_SITE_CAP {
            return Err(Error::TooManySites {
                requested: self.num_sites,
                limit: MATRIX_SITE_CAP,
            });
        }
        let dim = 1usize << self.num_sites;
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in &self.terms {
            m += string_matrix(p) * *c;
        }
        Ok(m)
    }

    /// Real dense matrix, available when every term has real matrix elements.
    pub fn to_real_matrix(&self) -> Result<Option<DMatrix<f64>>> {
        let m = self.to_matrix()?;
        if m.iter().any(|z| z.im.abs() > HERMITIAN_TOL) {
            return Ok(None);
        }
        Ok(Some(m.map(|z| z.re)))
    }
}

impl From<PauliString> for PauliSum {
    fn from(p: PauliString) -> Self {
        let mut s = PauliSum::new(p.num_sites());
        s.add_term(p, 1.0).expect("length matches by construction");
        s
    }
}

fn letter_matrix(p: Pauli) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

fn string_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, p.phase().to_complex());
    for site in 0..p.num_sites() {
        m = letter_matrix(p.letter(site)).kronecker(&m);
    }
    m
}
