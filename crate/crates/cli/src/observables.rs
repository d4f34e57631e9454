//! Named observables of the three protocols, all in the effective frame.

use dahsim_core::models::cluster_stabilizer;
use dahsim_core::pauli::{Pauli, PauliString, PauliSum};

use crate::error::{HarnessError, Result};

fn string(l: usize, letters: &[(usize, Pauli)]) -> Result<PauliString> {
    Ok(PauliString::from_sparse(l, letters)?)
}

/// `Σ_{j=1}^{L-2} X_j`.
pub fn bulk_magnetization(l: usize) -> Result<PauliSum> {
    let mut s = PauliSum::new(l);
    for j in 1..l - 1 {
        s.add_term(string(l, &[(j, Pauli::X)])?, 1.0)?;
    }
    Ok(s)
}

/// `X_0 Y_1 Z_2 … Z_{L-3} Y_{L-2} X_{L-1}`.
pub fn string_order(l: usize) -> Result<PauliString> {
    let mut letters = vec![(0, Pauli::X), (1, Pauli::Y)];
    letters.extend((2..l - 2).map(|j| (j, Pauli::Z)));
    letters.push((l - 2, Pauli::Y));
    letters.push((l - 1, Pauli::X));
    string(l, &letters)
}

/// `X_0 X_{L-1}`.
pub fn edge_correlation(l: usize) -> Result<PauliString> {
    string(l, &[(0, Pauli::X), (l - 1, Pauli::X)])
}

/// Stabilizer of an open chain: `Z_0 X_1` and `X_{L-2} Z_{L-1}` at the ends,
/// `X_{j-1} Z_j X_{j+1}` in the bulk.
pub fn open_stabilizer(l: usize, j: usize) -> Result<PauliString> {
    if j == 0 {
        string(l, &[(0, Pauli::Z), (1, Pauli::X)])
    } else if j == l - 1 {
        string(l, &[(l - 2, Pauli::X), (l - 1, Pauli::Z)])
    } else {
        Ok(cluster_stabilizer(l, j)?)
    }
}

/// `½ (X_1 - Z_0 Y_1 - Y_1 Z_2 - Z_0 X_1 Z_2)` on four sites.
pub fn upsilon() -> Result<PauliSum> {
    let terms = [("IXII", 0.5), ("ZYII", -0.5), ("IYZI", -0.5), ("ZXZI", -0.5)];
    let mut s = PauliSum::new(4);
    for (letters, c) in terms {
        s.add_term(PauliString::from_letters(letters)?, c)?;
    }
    Ok(s)
}

/// Named Hermitian observables with unique names.
#[derive(Clone, Debug, Default)]
pub struct ObservableSet {
    entries: Vec<(String, PauliSum)>,
}

impl ObservableSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, op: impl Into<PauliSum>) -> Result<()> {
        let op = op.into();
        if self.entries.iter().any(|(n, _)| n == name) {
            return Err(HarnessError::Output(format!("duplicate observable name {name}")));
        }
        if !op.is_hermitian() {
            return Err(HarnessError::Output(format!("observable {name} is not Hermitian")));
        }
        self.entries.push((name.to_string(), op));
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &PauliSum)> {
        self.entries.iter().map(|(n, o)| (n.as_str(), o))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
