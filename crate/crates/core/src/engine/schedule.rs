use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Time profile multiplying a term's weight.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Constant,
    Profile(Profile),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant => write!(f, "Constant"),
            Coefficient::Profile(_) => write!(f, "Profile(..)"),
        }
    }
}

/// `weight * profile(t) * string`.
#[derive(Clone, Debug)]
pub struct ScheduleTerm {
    pub string: PauliString,
    pub weight: f64,
    pub coefficient: Coefficient,
}

impl ScheduleTerm {
    pub fn value(&self, t: f64) -> f64 {
        match &self.coefficient {
            Coefficient::Constant => self.weight,
            Coefficient::Profile(f) => self.weight * f(t),
        }
    }
}

/// A Hermitian Hamiltonian with real, possibly time-dependent, coefficients.
#[derive(Clone, Debug)]
pub struct HamiltonianSchedule {
    num_sites: usize,
    terms: Vec<ScheduleTerm>,
}

impl HamiltonianSchedule {
    pub fn new(num_sites: usize) -> Self {
        HamiltonianSchedule {
            num_sites,
            terms: Vec::new(),
        }
    }

    pub fn from_static(h: &PauliSum) -> Result<Self> {
        let mut s = HamiltonianSchedule::new(h.num_sites());
        for (p, c) in h.real_terms()? {
            s.push(p, c, Coefficient::Constant)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, string: PauliString, weight: f64, coefficient: Coefficient) -> Result<()> {
        if string.num_sites() != self.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: string.num_sites(),
            });
        }
        let (string, phase) = string.split_phase();
        let w = phase.to_complex() * weight;
        if w.im != 0.0 {
            return Err(Error::NotHermitian);
        }
        self.terms.push(ScheduleTerm {
            string,
            weight: w.re,
            coefficient,
        });
        Ok(())
    }

    /// Add every term of a static sum scaled by `profile`.
    pub fn push_sum(&mut self, sum: &PauliSum, coefficient: Coefficient) -> Result<()> {
        for (p, c) in sum.real_terms()? {
            self.push(p, c, coefficient.clone())?;
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn terms(&self) -> &[ScheduleTerm] {
        &self.terms
    }

    pub fn is_static(&self) -> bool {
        self.terms
            .iter()
            .all(|t| matches!(t.coefficient, Coefficient::Constant))
    }

    /// The Hamiltonian frozen at time `t`.
    pub fn at(&self, t: f64) -> Result<PauliSum> {
        let mut h = PauliSum::new(self.num_sites);
        for term in &self.terms {
            let v = term.value(t);
            if !v.is_finite() {
                return Err(Error::NonFinite(t));
            }
            h.add_term(term.string.clone(), v)?;
        }
        Ok(h)
    }

    /// `C† H(t) C` term by term; profiles are carried along unchanged.
    pub fn conjugate_by(&self, circuit: &Circuit) -> Result<HamiltonianSchedule> {
        let mut out = HamiltonianSchedule::new(self.num_sites);
        for term in &self.terms {
            let image = PauliSum::from(term.string.clone()).conjugate_by_circuit(circuit)?;
            for (p, c) in image.real_terms()? {
                out.push(p, term.weight * c, term.coefficient.clone())?;
            }
        }
        Ok(out)
    }
}

/// Monotone interpolation shapes `s: [0, 1] → [0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampProfile {
    Linear,
    #[default]
    Smoothstep,
    Cosine,
}

impl RampProfile {
    /// Clamped to `[0, 1]` outside the unit interval.
    pub fn eval(self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            RampProfile::Linear => u,
            RampProfile::Smoothstep => u * u * (3.0 - 2.0 * u),
            RampProfile::Cosine => 0.5 * (1.0 - (std::f64::consts::PI * u).cos()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Gate;

    #[test]
    fn ramps_are_monotone_with_fixed_ends() {
        for r in [RampProfile::Linear, RampProfile::Smoothstep, RampProfile::Cosine] {
            assert_eq!(r.eval(0.0), 0.0);
            assert!((r.eval(1.0) - 1.0).abs() < 1e-15);
            let mut last = 0.0;
            for k in 1..=100 {
                let v = r.eval(k as f64 / 100.0);
                assert!(v >= last);
                last = v;
            }
        }
    }

    #[test]
    fn conjugated_schedule_tracks_profiles() {
        let mut s = HamiltonianSchedule::new(2);
        let ramp: Profile = Arc::new(|t| t * t);
        s.push(PauliString::from_letters("ZI").unwrap(), 0.5, Coefficient::Profile(ramp))
            .unwrap();
        s.push(PauliString::from_letters("IX").unwrap(), 1.0, Coefficient::Constant)
            .unwrap();
        let c = Circuit::from_gates(2, [Gate::xx(0, 1, 0.3), Gate::h(1)]).unwrap();
        let conj = s.conjugate_by(&c).unwrap();
        for t in [0.0, 0.4, 2.0] {
            let direct = s.at(t).unwrap().conjugate_by_circuit(&c).unwrap();
            assert!(direct.max_abs_diff(&conj.at(t).unwrap()).unwrap() < 1e-14);
        }
        assert!(!conj.is_static());
    }

    #[test]
    fn non_finite_profile_is_reported() {
        let mut s = HamiltonianSchedule::new(1);
        let bad: Profile = Arc::new(|t| 1.0 / t);
        s.push(PauliString::from_letters("Z").unwrap(), 1.0, Coefficient::Profile(bad))
            .unwrap();
        assert!(matches!(s.at(0.0), Err(Error::NonFinite(_))));
    }
}
