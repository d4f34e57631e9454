use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::string::{Pauli, PauliString};
use crate::error::{Error, Result};

/// Native gates. Rotations are `R_n(θ) = exp(-iθ n·σ/2)`, the two-qubit gate
/// is `XX(θ) = exp(-iθ X⊗X)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rx { site: usize, theta: f64 },
    Ry { site: usize, theta: f64 },
    Rz { site: usize, theta: f64 },
    H { site: usize },
    Xx { first: usize, second: usize, theta: f64 },
}

const SNAP: f64 = 1e-14;

/// Snap values within rounding of `0` or `±1` to the exact value.
pub(crate) fn snap_unit(v: f64) -> f64 {
    if v.abs() < SNAP {
        0.0
    } else if (v - 1.0).abs() < SNAP {
        1.0
    } else if (v + 1.0).abs() < SNAP {
        -1.0
    } else {
        v
    }
}

impl Gate {
    pub fn rx(site: usize, theta: f64) -> Gate {
        Gate::Rx { site, theta }
    }
    pub fn ry(site: usize, theta: f64) -> Gate {
        Gate::Ry { site, theta }
    }
    pub fn rz(site: usize, theta: f64) -> Gate {
        Gate::Rz { site, theta }
    }
    pub fn h(site: usize) -> Gate {
        Gate::H { site }
    }
    pub fn xx(first: usize, second: usize, theta: f64) -> Gate {
        Gate::Xx {
            first,
            second,
            theta,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Ry { .. } => "RY",
            Gate::Rz { .. } => "RZ",
            Gate::H { .. } => "H",
            Gate::Xx { .. } => "XX",
        }
    }

    /// Target sites; the second entry is set only for two-qubit gates.
    pub fn targets(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Rx { site, .. } | Gate::Ry { site, .. } | Gate::Rz { site, .. } => (site, None),
            Gate::H { site } => (site, None),
            Gate::Xx { first, second, .. } => (first, Some(second)),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { theta, .. }
            | Gate::Ry { theta, .. }
            | Gate::Rz { theta, .. }
            | Gate::Xx { theta, .. } => Some(theta),
            Gate::H { .. } => None,
        }
    }

    pub fn validate(&self, num_sites: usize) -> Result<()> {
        let (a, b) = self.targets();
        for site in std::iter::once(a).chain(b) {
            if site >= num_sites {
                return Err(Error::SiteOutOfRange { site, num_sites });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidGate(format!("XX with repeated target {a}")));
        }
        if let Some(theta) = self.angle() {
            if !theta.is_finite() {
                return Err(Error::InvalidGate(format!(
                    "{} with non-finite angle",
                    self.kind_name()
                )));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx { site, theta } => Gate::Rx { site, theta: -theta },
            Gate::Ry { site, theta } => Gate::Ry { site, theta: -theta },
            Gate::Rz { site, theta } => Gate::Rz { site, theta: -theta },
            Gate::H { site } => Gate::H { site },
            Gate::Xx {
                first,
                second,
                theta,
            } => Gate::Xx {
                first,
                second,
                theta: -theta,
            },
        }
    }

    /// `(G, φ)` with the gate equal to `exp(-iφG)`; `None` for Hadamard.
    pub(crate) fn generator(&self, num_sites: usize) -> Result<Option<(PauliString, f64)>> {
        self.validate(num_sites)?;
        Ok(match *self {
            Gate::Rx { site, theta } => {
                Some((PauliString::single(num_sites, site, Pauli::X)?, theta / 2.0))
            }
            Gate::Ry { site, theta } => {
                Some((PauliString::single(num_sites, site, Pauli::Y)?, theta / 2.0))
            }
            Gate::Rz { site, theta } => {
                Some((PauliString::single(num_sites, site, Pauli::Z)?, theta / 2.0))
            }
            Gate::Xx {
                first,
                second,
                theta,
            } => Some((
                PauliString::from_sparse(num_sites, &[(first, Pauli::X), (second, Pauli::X)])?,
                theta,
            )),
            Gate::H { .. } => None,
        })
    }

    /// Dense 2x2 matrix for single-qubit gates, row major.
    pub(crate) fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match *self {
            Gate::Rx { theta, .. } => {
                let (s, co) = (snap_unit((theta / 2.0).sin()), snap_unit((theta / 2.0).cos()));
                Some([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
            }
            Gate::Ry { theta, .. } => {
                let (s, co) = (snap_unit((theta / 2.0).sin()), snap_unit((theta / 2.0).cos()));
                Some([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
            }
            Gate::Rz { theta, .. } => {
                let (s, co) = (snap_unit((theta / 2.0).sin()), snap_unit((theta / 2.0).cos()));
                Some([[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]])
            }
            Gate::H { .. } => {
                let h = FRAC_1_SQRT_2;
                Some([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
            }
            Gate::Xx { .. } => None,
        }
    }
}
