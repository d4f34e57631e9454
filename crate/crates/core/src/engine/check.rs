use super::evolve::evolve;
use super::schedule::HamiltonianSchedule;
use super::state::StateVector;
use crate::circuits::{cpmg_wrap, Circuit, EchoStep};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// The analog part of a digital-analog sequence.
#[derive(Clone, Debug)]
pub enum AnalogBlock {
    /// Evolve under the schedule from `0` to `t`.
    Plain(HamiltonianSchedule),
    /// Echo-wrapped: `t/2` under `plus`, global π pulse, `t/2` under `minus`,
    /// global π pulse. Equivalent to `t` under `plus` up to a global phase.
    Echo {
        plus: HamiltonianSchedule,
        minus: HamiltonianSchedule,
    },
}

impl AnalogBlock {
    pub fn num_sites(&self) -> usize {
        match self {
            AnalogBlock::Plain(h) => h.num_sites(),
            AnalogBlock::Echo { plus, .. } => plus.num_sites(),
        }
    }

    /// The Hamiltonian whose conjugate is the effective generator.
    pub fn generator(&self) -> &HamiltonianSchedule {
        match self {
            AnalogBlock::Plain(h) => h,
            AnalogBlock::Echo { plus, .. } => plus,
        }
    }
}

/// Apply the analog block for total duration `t`.
pub fn run_analog(psi: &mut StateVector, block: &AnalogBlock, t: f64, tol: f64) -> Result<()> {
    match block {
        AnalogBlock::Plain(h) => evolve(psi, h, 0.0, t, tol),
        AnalogBlock::Echo { plus, minus } => {
            let mut elapsed = 0.0;
            for step in cpmg_wrap(psi.num_sites(), t)?.steps {
                match step {
                    EchoStep::Evolve { xi, duration } => {
                        let h = if xi > 0.0 { plus } else { minus };
                        evolve(psi, h, elapsed, elapsed + duration, tol)?;
                        elapsed += duration;
                    }
                    EchoStep::Pulse(c) => psi.apply_circuit(&c)?,
                }
            }
            Ok(())
        }
    }
}

/// Observable value reached two ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveCheck {
    /// `⟨O⟩` on `D2 · analog(t) · D1 |ψ0⟩`.
    pub path: f64,
    /// `⟨(D2 D1)† O (D2 D1)⟩` on `exp(-i D1† H D1 t) |ψ0⟩`.
    pub direct: f64,
}

pub fn effective_evolution_check(
    psi0: &StateVector,
    d1: &Circuit,
    analog: &AnalogBlock,
    d2: &Circuit,
    t: f64,
    observable: &PauliSum,
    tol: f64,
) -> Result<EffectiveCheck> {
    let n = psi0.num_sites();
    for m in [d1.num_sites(), d2.num_sites(), analog.num_sites(), observable.num_sites()] {
        if m != n {
            return Err(Error::LengthMismatch { left: n, right: m });
        }
    }
    let mut phys = psi0.clone();
    phys.apply_circuit(d1)?;
    run_analog(&mut phys, analog, t, tol)?;
    phys.apply_circuit(d2)?;
    let path = phys.expect(observable)?;

    let h_eff = analog.generator().conjugate_by(d1)?;
    let mut eff = psi0.clone();
    evolve(&mut eff, &h_eff, 0.0, t, tol)?;
    let mapped = observable.conjugate_by_circuit(&d1.then(d2)?)?;
    let direct = eff.expect(&mapped)?;
    Ok(EffectiveCheck { path, direct })
}
