//! Gate sequences and the digital blocks of the three protocols.
//!
//! Gates in a [`Circuit`] are stored in the order they act on the state. A
//! block written as an operator product `A B` (with `B` acting first) is
//! therefore built by pushing `B`'s gates before `A`'s. Builders take 0-based
//! sites.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Gate;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_sites: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_sites: usize) -> Self {
        Circuit {
            num_sites,
            gates: Vec::new(),
        }
    }

    pub fn from_gates<I: IntoIterator<Item = Gate>>(num_sites: usize, gates: I) -> Result<Self> {
        let mut c = Circuit::new(num_sites);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_sites)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `self` followed in time by `next`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit> {
        if next.num_sites != self.num_sites {
            return Err(Error::LengthMismatch {
                left: self.num_sites,
                right: next.num_sites,
            });
        }
        let mut c = self.clone();
        c.gates.extend_from_slice(&next.gates);
        Ok(c)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_sites: self.num_sites,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let doc = CircuitDoc {
            num_sites: self.num_sites,
            gates: self
                .gates
                .iter()
                .map(|g| {
                    let (a, b) = g.targets();
                    GateDoc {
                        kind: g.kind_name().to_string(),
                        targets: std::iter::once(a).chain(b).collect(),
                        theta: g.angle(),
                    }
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDoc = serde_json::from_str(text)?;
        let mut c = Circuit::new(doc.num_sites);
        for g in doc.gates {
            c.push(g.into_gate()?)?;
        }
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    #[serde(rename = "L")]
    num_sites: usize,
    gates: Vec<GateDoc>,
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

impl GateDoc {
    fn into_gate(self) -> Result<Gate> {
        let bad = |m: &str| Error::InvalidGate(format!("{}: {m}", self.kind));
        let theta = || self.theta.ok_or_else(|| bad("missing theta"));
        let one = || match self.targets.as_slice() {
            [s] => Ok(*s),
            _ => Err(bad("expected one target")),
        };
        match self.kind.to_ascii_uppercase().as_str() {
            "RX" => Ok(Gate::rx(one()?, theta()?)),
            "RY" => Ok(Gate::ry(one()?, theta()?)),
            "RZ" => Ok(Gate::rz(one()?, theta()?)),
            "H" => Ok(Gate::h(one()?)),
            "XX" => match self.targets.as_slice() {
                [a, b] => Ok(Gate::xx(*a, *b, theta()?)),
                _ => Err(bad("expected two targets")),
            },
            _ => Err(bad("unknown gate kind")),
        }
    }
}

fn require_sites(num_sites: usize, min: usize, what: &str) -> Result<()> {
    if num_sites < min {
        return Err(Error::InvalidArgument(format!(
            "{what} needs at least {min} sites, got {num_sites}"
        )));
    }
    Ok(())
}

/// Digital blocks of the cluster-field protocol.
///
/// `d1 = (Π XX(π/4)) (Π H)`: the Hadamard layer `prep` acts first, then the
/// periodic entangling layer. `entangler` alone maps the field Hamiltonian
/// `Σ g Z + h X` onto `-Σ g X Z X + Σ h X`; `prep` takes the register reset
/// state `|1…1⟩` to `|↓x…↓x⟩`.
#[derive(Clone, Debug)]
pub struct ClusterFieldBlocks {
    pub prep: Circuit,
    pub entangler: Circuit,
    pub d1: Circuit,
    pub d2: Circuit,
}

pub fn cluster_field_blocks(num_sites: usize) -> Result<ClusterFieldBlocks> {
    require_sites(num_sites, 3, "cluster-field blocks")?;
    let l = num_sites;
    let prep = Circuit::from_gates(l, (0..l).map(Gate::h))?;
    let entangler = Circuit::from_gates(l, (0..l).map(|j| Gate::xx(j, (j + 1) % l, FRAC_PI_4)))?;
    let d1 = prep.then(&entangler)?;
    let d2 = Circuit::from_gates(l, (0..l).map(Gate::h))?;
    Ok(ClusterFieldBlocks {
        prep,
        entangler,
        d1,
        d2,
    })
}

/// Digital blocks of the cluster-Ising protocol.
#[derive(Clone, Debug)]
pub struct ClusterIsingBlocks {
    pub d0: Circuit,
    pub d1: Circuit,
    pub d2: Circuit,
}

/// Open chain of `XX(π/4)` on neighbouring pairs.
pub fn cluster_ising_entangler(num_sites: usize) -> Result<Circuit> {
    Circuit::from_gates(
        num_sites,
        (0..num_sites.saturating_sub(1)).map(|j| Gate::xx(j, j + 1, FRAC_PI_4)),
    )
}

/// `d0` flips the listed sites with `Ry(π)` and then rotates sites `1` and
/// `L-2` into the x basis; `d2` applies `Rx(-π/2)` on both chain ends.
pub fn cluster_ising_blocks(num_sites: usize, flips: &[usize]) -> Result<ClusterIsingBlocks> {
    require_sites(num_sites, 4, "cluster-Ising blocks")?;
    let l = num_sites;
    let mut d0 = Circuit::new(l);
    for &s in flips {
        d0.push(Gate::ry(s, PI))?;
    }
    d0.push(Gate::ry(1, FRAC_PI_2))?;
    d0.push(Gate::ry(l - 2, FRAC_PI_2))?;
    let d1 = cluster_ising_entangler(l)?;
    let d2 = Circuit::from_gates(l, [Gate::rx(0, -FRAC_PI_2), Gate::rx(l - 1, -FRAC_PI_2)])?;
    Ok(ClusterIsingBlocks { d0, d1, d2 })
}

/// Each site flipped independently with probability 1/2, keyed by `(seed, sample)`.
pub fn random_flips(num_sites: usize, seed: u64, sample: u64) -> Vec<usize> {
    (0..num_sites)
        .filter(|&s| rng::draw_u64(seed, sample, s as u64) >> 63 == 1)
        .collect()
}

/// Random flips, then `Ry(π/2)` on every site with `site % 2 == parity`.
///
/// The result is an eigenstate of every stabilizer centred on the other
/// sublattice, which gives nonzero bulk autocorrelators.
pub fn sublattice_prep(num_sites: usize, parity: usize, flips: &[usize]) -> Result<Circuit> {
    let mut c = Circuit::new(num_sites);
    for &s in flips {
        c.push(Gate::ry(s, PI))?;
    }
    for s in (0..num_sites).filter(|s| s % 2 == parity % 2) {
        c.push(Gate::ry(s, FRAC_PI_2))?;
    }
    Ok(c)
}

/// Prepares, from `|0…0⟩`, the effective-frame state with every cluster
/// stabilizer (edges included) equal to `+1`.
pub fn cluster_ground_state_prep(num_sites: usize) -> Result<Circuit> {
    require_sites(num_sites, 4, "cluster ground state")?;
    let l = num_sites;
    let mut c = Circuit::new(l);
    c.push(Gate::rx(0, FRAC_PI_2))?;
    c.push(Gate::rx(l - 1, FRAC_PI_2))?;
    for s in 1..l - 1 {
        c.push(Gate::ry(s, PI))?;
    }
    c.then(&cluster_ising_entangler(l)?.inverse())
}

/// Final-layer choices for the four-body protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FourBodyAnalysis {
    /// Hadamards on sites 1 and 3 (1-based).
    H13,
    /// Hadamards on sites 2 and 4 (1-based).
    H24,
    /// Disentangling layer for the full four-body expectation value; `L = 4` only.
    Upsilon,
}

#[derive(Clone, Debug)]
pub struct FourBodyBlocks {
    pub d0: Circuit,
    pub d1: Circuit,
    pub d2: Circuit,
}

/// `d1 = (Π H)(Π XX(π/4))` with a periodic XX layer acting first.
pub fn four_body_entangler(num_sites: usize) -> Result<Circuit> {
    let l = num_sites;
    let xx = Circuit::from_gates(l, (0..l).map(|j| Gate::xx(j, (j + 1) % l, FRAC_PI_4)))?;
    xx.then(&Circuit::from_gates(l, (0..l).map(Gate::h))?)
}

pub fn four_body_blocks(num_sites: usize, analysis: FourBodyAnalysis) -> Result<FourBodyBlocks> {
    require_sites(num_sites, 4, "four-body blocks")?;
    let l = num_sites;
    let d0 = Circuit::from_gates(l, [Gate::rx(1, -FRAC_PI_2), Gate::rx(2, -FRAC_PI_2)])?;
    let d1 = four_body_entangler(l)?;
    let d2 = match analysis {
        FourBodyAnalysis::H13 => Circuit::from_gates(l, [Gate::h(0), Gate::h(2)])?,
        FourBodyAnalysis::H24 => Circuit::from_gates(l, [Gate::h(1), Gate::h(3)])?,
        FourBodyAnalysis::Upsilon => {
            if l != 4 {
                return Err(Error::InvalidArgument(format!(
                    "the four-body disentangling layer is defined for 4 sites, got {l}"
                )));
            }
            let mut c = d1.inverse();
            for s in 0..l {
                c.push(Gate::h(s))?;
            }
            c.push(Gate::xx(0, 1, FRAC_PI_8))?;
            c.push(Gate::xx(1, 2, FRAC_PI_8))?;
            c.push(Gate::rx(0, -FRAC_PI_2))?;
            c
        }
    };
    Ok(FourBodyBlocks { d0, d1, d2 })
}

/// One step of an echo sequence.
#[derive(Clone, Debug)]
pub enum EchoStep {
    /// Analog evolution with transverse-field sign `xi` for `duration`.
    Evolve { xi: f64, duration: f64 },
    Pulse(Circuit),
}

#[derive(Clone, Debug)]
pub struct EchoSchedule {
    pub steps: Vec<EchoStep>,
}

impl EchoSchedule {
    pub fn total_duration(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| match s {
                EchoStep::Evolve { duration, .. } => *duration,
                EchoStep::Pulse(_) => 0.0,
            })
            .sum()
    }
}

/// Global `Rx(π)` on every site.
pub fn global_pi_pulse(num_sites: usize) -> Result<Circuit> {
    Circuit::from_gates(num_sites, (0..num_sites).map(|s| Gate::rx(s, PI)))
}

/// `t/2` at `ξ = +1`, π pulse, `t/2` at `ξ = -1`, π pulse.
pub fn cpmg_wrap(num_sites: usize, t: f64) -> Result<EchoSchedule> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("echo duration {t}")));
    }
    let pulse = global_pi_pulse(num_sites)?;
    Ok(EchoSchedule {
        steps: vec![
            EchoStep::Evolve {
                xi: 1.0,
                duration: t / 2.0,
            },
            EchoStep::Pulse(pulse.clone()),
            EchoStep::Evolve {
                xi: -1.0,
                duration: t / 2.0,
            },
            EchoStep::Pulse(pulse),
        ],
    })
}
