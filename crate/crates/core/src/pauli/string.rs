use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;
pub(crate) type Words = SmallVec<[u64; 1]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub(crate) fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub(crate) fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// `i^k` for `k` in `0..4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u32 {
        self.0 as u32
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// A tensor product of single-site Paulis with a unit phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    num_sites: usize,
    x: Words,
    z: Words,
    phase: Phase,
}

fn word_count(num_sites: usize) -> usize {
    num_sites.div_ceil(WORD_BITS).max(1)
}

impl PauliString {
    pub fn identity(num_sites: usize) -> Self {
        let w = word_count(num_sites);
        PauliString {
            num_sites,
            x: smallvec![0; w],
            z: smallvec![0; w],
            phase: Phase::ONE,
        }
    }

    /// Parse letters like `"XZXII"`; character `j` is site `j`.
    pub fn from_letters(letters: &str) -> Result<Self> {
        let chars: Vec<char> = letters.chars().collect();
        let mut p = PauliString::identity(chars.len());
        for (site, c) in chars.into_iter().enumerate() {
            let letter = Pauli::from_char(c).ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unknown Pauli letter {c:?}"),
            })?;
            p.set(site, letter);
        }
        Ok(p)
    }

    /// Identity except for the listed `(site, letter)` pairs.
    pub fn from_sparse(num_sites: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = PauliString::identity(num_sites);
        for &(site, letter) in letters {
            if site >= num_sites {
                return Err(Error::SiteOutOfRange { site, num_sites });
            }
            p.set(site, letter);
        }
        Ok(p)
    }

    /// Single-site operator on `site`.
    pub fn single(num_sites: usize, site: usize, letter: Pauli) -> Result<Self> {
        PauliString::from_sparse(num_sites, &[(site, letter)])
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Split off the phase: `self = phase * canonical`.
    pub fn split_phase(mut self) -> (PauliString, Phase) {
        let ph = self.phase;
        self.phase = Phase::ONE;
        (self, ph)
    }

    pub fn letter(&self, site: usize) -> Pauli {
        assert!(site < self.num_sites, "site {site} out of range");
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub(crate) fn set(&mut self, site: usize, letter: Pauli) {
        let (w, b) = (site / WORD_BITS, site % WORD_BITS);
        let (x, z) = letter.bits();
        let m = 1u64 << b;
        self.x[w] = (self.x[w] & !m) | if x { m } else { 0 };
        self.z[w] = (self.z[w] & !m) | if z { m } else { 0 };
    }

    pub fn letters(&self) -> String {
        (0..self.num_sites).map(|j| self.letter(j).to_char()).collect()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_sites)
            .filter(|&j| self.letter(j) != Pauli::I)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Number of `Y` letters.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.num_sites != other.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: other.num_sites,
            });
        }
        Ok(())
    }

    /// Operator product `self * other`, phase tracked exactly.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut exp = self.phase.exponent() + other.phase.exponent();
        let mut x = Words::with_capacity(self.x.len());
        let mut z = Words::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            exp += (x1 & z1).count_ones() + (x2 & z2).count_ones();
            exp += 2 * (z1 & x2).count_ones();
            exp += 3 * (x3 & z3).count_ones();
            x.push(x3);
            z.push(z3);
        }
        Ok(PauliString {
            num_sites: self.num_sites,
            x,
            z,
            phase: Phase::from_exponent(exp),
        })
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        Ok(parity == 0)
    }

    /// `(x, z)` bit masks for strings of at most 64 sites.
    pub fn masks(&self) -> Result<(u64, u64)> {
        if self.num_sites > WORD_BITS {
            return Err(Error::TooManySites {
                requested: self.num_sites,
                limit: WORD_BITS,
            });
        }
        Ok((self.x[0], self.z[0]))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase.exponent() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.letters())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn single_matrix(p: Pauli) -> Matrix2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match p {
            Pauli::I => Matrix2::new(l, o, o, l),
            Pauli::X => Matrix2::new(o, l, l, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(l, o, o, -l),
        }
    }

    #[test]
    fn single_site_products_match_matrices() {
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                let pa = PauliString::single(1, 0, a).unwrap();
                let pb = PauliString::single(1, 0, b).unwrap();
                let prod = pa.multiply(&pb).unwrap();
                let expect = single_matrix(a) * single_matrix(b);
                let got = single_matrix(prod.letter(0)) * prod.phase().to_complex();
                assert!((expect - got).norm() < 1e-15, "{a:?}{b:?}");
                let commute = (single_matrix(a) * single_matrix(b)
                    - single_matrix(b) * single_matrix(a))
                .norm()
                    < 1e-15;
                assert_eq!(pa.commutes(&pb).unwrap(), commute);
            }
        }
    }

    #[test]
    fn letters_round_trip_and_weight() {
        let p = PauliString::from_letters("XZYII").unwrap();
        assert_eq!(p.letters(), "XZYII");
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![0, 1, 2]);
        assert_eq!(p.y_count(), 1);
        assert!(PauliString::from_letters("XQ").is_err());
    }

    #[test]
    fn multiword_strings() {
        let mut a = PauliString::identity(130);
        a.set(0, Pauli::X);
        a.set(129, Pauli::Z);
        let mut b = PauliString::identity(130);
        b.set(129, Pauli::X);
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.letter(129), Pauli::Y);
        assert_eq!(ab.phase(), Phase::I);
        assert!(!a.commutes(&b).unwrap());
        assert!(a.masks().is_err());
    }

    #[test]
    fn length_mismatch_is_error() {
        let a = PauliString::identity(3);
        let b = PauliString::identity(4);
        assert!(matches!(a.multiply(&b), Err(Error::LengthMismatch { .. })));
    }
}
