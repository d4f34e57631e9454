//! Four-spin ring with simultaneous one-, two- and four-body terms.

use dahsim_core::circuits::{four_body_blocks, FourBodyAnalysis, FourBodyBlocks};
use dahsim_core::engine::{evolve_static, StateVector};
use dahsim_core::models;
use dahsim_core::pauli::{Pauli, PauliString, PauliSum};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::observables;
use crate::output::{num, Table};

pub const ANALYSES: [FourBodyAnalysis; 3] = [FourBodyAnalysis::H13, FourBodyAnalysis::H24, FourBodyAnalysis::Upsilon];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourBodyParams {
    pub j: f64,
    pub j_prime: f64,
    pub h: f64,
}

impl FourBodyParams {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        let c = &cfg.couplings;
        FourBodyParams {
            j: c.j.unwrap_or(1.0),
            j_prime: c.j_prime.unwrap_or(0.39),
            h: c.h.unwrap_or(1.0),
        }
    }

    /// Analog TFIM whose transverse field becomes `h Σ X` after the entangler.
    pub fn analog(&self, l: usize) -> Result<PauliSum> {
        Ok(models::four_body_analog(l, self.j, self.j_prime, self.h)?)
    }
}

/// A single-qubit readout and the effective string it measures.
#[derive(Clone, Debug)]
pub struct Readout {
    pub analysis: FourBodyAnalysis,
    pub site: usize,
    /// `V† Z_site V` with `V = D2 D1`.
    pub effective: PauliSum,
    pub name: String,
}

fn sum_name(op: &PauliSum) -> String {
    let mut parts = Vec::new();
    for (p, c) in op.terms() {
        let c = c.re;
        let coef = if (c.abs() - 1.0).abs() < 1e-12 {
            if c > 0.0 { "+".to_string() } else { "-".to_string() }
        } else {
            format!("{c:+}*")
        };
        parts.push(format!("{coef}{}", p.letters()));
    }
    parts.join("")
}

pub fn readouts(l: usize) -> Result<Vec<Readout>> {
    let mut out = Vec::new();
    for analysis in ANALYSES {
        let blocks = four_body_blocks(l, analysis)?;
        let v = blocks.d1.then(&blocks.d2)?;
        let sites: Vec<usize> = match analysis {
            FourBodyAnalysis::Upsilon => vec![1],
            _ => (0..l).collect(),
        };
        for site in sites {
            let z = PauliSum::from(PauliString::single(l, site, Pauli::Z)?);
            let effective = z.conjugate_by_circuit(&v)?;
            let name = match analysis {
                FourBodyAnalysis::Upsilon => "Upsilon".to_string(),
                _ => sum_name(&effective),
            };
            out.push(Readout {
                analysis,
                site,
                effective,
                name,
            });
        }
    }
    Ok(out)
}

pub struct FourBodyRun {
    pub times: Vec<f64>,
    pub readouts: Vec<Readout>,
    /// `path[k][r]`: readout `r` at time `k`, from the gate-level sequence.
    pub path: Vec<Vec<f64>>,
    /// Same quantities from direct evolution under the effective Hamiltonian.
    pub direct: Vec<Vec<f64>>,
}

impl FourBodyRun {
    pub fn max_discrepancy(&self) -> f64 {
        self.path
            .iter()
            .flatten()
            .zip(self.direct.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn run(l: usize, params: FourBodyParams, times: &[f64], tol: f64) -> Result<FourBodyRun> {
    let readouts = readouts(l)?;
    let blocks: Vec<FourBodyBlocks> = ANALYSES.iter().map(|&a| four_body_blocks(l, a)).collect::<dahsim_core::Result<_>>()?;
    let base = &blocks[0];
    let h_a = params.analog(l)?;
    let h_eff = h_a.conjugate_by_circuit(&base.d1)?;

    let mut phys = StateVector::zero(l)?;
    phys.apply_circuit(&base.d0)?;
    phys.apply_circuit(&base.d1)?;
    let mut eff = StateVector::zero(l)?;
    eff.apply_circuit(&base.d0)?;

    let z: Vec<PauliSum> = (0..l)
        .map(|s| PauliString::single(l, s, Pauli::Z).map(PauliSum::from))
        .collect::<dahsim_core::Result<_>>()?;
    let mut now = 0.0;
    let mut path = Vec::with_capacity(times.len());
    let mut direct = Vec::with_capacity(times.len());
    for &t in times {
        evolve_static(&mut phys, &h_a, t - now, tol)?;
        evolve_static(&mut eff, &h_eff, t - now, tol)?;
        now = t;
        let mut row = Vec::with_capacity(readouts.len());
        for r in &readouts {
            let k = ANALYSES.iter().position(|&a| a == r.analysis).expect("known analysis");
            let mut out = phys.clone();
            out.apply_circuit(&blocks[k].d2)?;
            row.push(out.expect(&z[r.site])?);
        }
        path.push(row);
        direct.push(readouts.iter().map(|r| eff.expect(&r.effective)).collect::<dahsim_core::Result<_>>()?);
    }
    Ok(FourBodyRun {
        times: times.to_vec(),
        readouts,
        path,
        direct,
    })
}

pub fn table(run: &FourBodyRun) -> Table {
    let mut header = vec!["Jt".to_string()];
    let mut seen = Vec::new();
    let mut keep = Vec::new();
    for (k, r) in run.readouts.iter().enumerate() {
        if !seen.contains(&r.name) {
            seen.push(r.name.clone());
            header.push(r.name.clone());
            keep.push(k);
        }
    }
    header.push("Upsilon_direct".into());
    header.push("max_path_direct_diff".into());
    let ups = run.readouts.iter().position(|r| r.name == "Upsilon").expect("Upsilon readout");
    let mut t = Table::new("four_body", &header);
    for (i, &time) in run.times.iter().enumerate() {
        let mut row = vec![num(time)];
        row.extend(keep.iter().map(|&k| num(run.path[i][k])));
        row.push(num(run.direct[i][ups]));
        let diff = run.path[i]
            .iter()
            .zip(&run.direct[i])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        row.push(num(diff));
        t.push(row);
    }
    t
}

pub fn run_four_body(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let params = FourBodyParams::from_config(cfg);
    let times = cfg.times()?;
    let r = run(cfg.l(), params, &times, cfg.tol())?;
    Ok(vec![table(&r)])
}

/// `Υ` as an effective-frame operator.
pub fn upsilon_operator() -> Result<PauliSum> {
    observables::upsilon()
}
