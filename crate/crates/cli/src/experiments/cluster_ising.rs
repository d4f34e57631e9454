//! Stabilizer correlators `G_j(t) = ⟨S_j(t)⟩⟨S_j(0)⟩` of the cluster-Ising
//! chain, averaged over random product states or started from the cluster
//! ground state.

use dahsim_core::circuits::{
    cluster_ground_state_prep, cluster_ising_blocks, global_pi_pulse, random_flips, Circuit,
};
use dahsim_core::engine::{evolve, HamiltonianSchedule, StateVector};
use dahsim_core::models;
use dahsim_core::noise::{DephasingModel, TrajectoryStats};
use dahsim_core::par::{self, ExecPolicy};
use dahsim_core::pauli::{Pauli, PauliString, PauliSum};
use nalgebra::DMatrix;

use crate::config::{ExperimentConfig, SpamScale};
use crate::error::{HarnessError, Result};
use crate::observables::open_stabilizer;
use crate::output::{num, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    InfiniteTemperature,
    GroundState,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::InfiniteTemperature => "infinite_T",
            Variant::GroundState => "ground_state",
        }
    }
}

/// Everything shared by the states of one `g/J` point.
pub struct IsingSetup {
    pub num_sites: usize,
    pub g: f64,
    pub plus: HamiltonianSchedule,
    pub minus: HamiltonianSchedule,
    pub d1: Circuit,
    pub d2: Circuit,
    pulse: Circuit,
    /// `V† Z_j V = sign_j S_j`.
    pub signs: Vec<f64>,
    pub noise: Option<DephasingModel>,
    pub explicit_echo: bool,
    pub tol: f64,
}

impl IsingSetup {
    pub fn new(couplings: &DMatrix<f64>, g: f64, tol: f64) -> Result<Self> {
        let l = couplings.nrows();
        let plus = HamiltonianSchedule::from_static(&models::cluster_ising_analog(couplings, g, 1.0)?)?;
        let minus = HamiltonianSchedule::from_static(&models::cluster_ising_analog(couplings, g, -1.0)?)?;
        let blocks = cluster_ising_blocks(l, &[])?;
        let v = blocks.d1.then(&blocks.d2)?;
        let mut signs = Vec::with_capacity(l);
        for j in 0..l {
            let z = PauliSum::from(PauliString::single(l, j, Pauli::Z)?);
            let mapped = z.conjugate_by_circuit(&v)?;
            let s = open_stabilizer(l, j)?;
            let c = mapped.coefficient(&s);
            if mapped.len() != 1 || (c.norm() - 1.0).abs() > 1e-12 || c.im.abs() > 1e-12 {
                return Err(HarnessError::Output(format!(
                    "readout on site {j} does not measure the stabilizer {}",
                    s.letters()
                )));
            }
            signs.push(c.re);
        }
        Ok(IsingSetup {
            num_sites: l,
            g,
            plus,
            minus,
            d1: blocks.d1,
            d2: blocks.d2,
            pulse: global_pi_pulse(l)?,
            signs,
            noise: None,
            explicit_echo: false,
            tol,
        })
    }

    pub fn with_noise(mut self, noise: Option<DephasingModel>) -> Self {
        self.explicit_echo |= noise.is_some();
        self.noise = noise;
        self
    }

    pub fn with_explicit_echo(mut self, on: bool) -> Self {
        self.explicit_echo = on || self.noise.is_some();
        self
    }

    fn readout(&self, psi: &StateVector, z: &[PauliSum]) -> Result<Vec<f64>> {
        let mut out = psi.clone();
        out.apply_circuit(&self.d2)?;
        z.iter()
            .zip(&self.signs)
            .map(|(op, s)| Ok(s * out.expect(op)?))
            .collect()
    }

    /// `⟨S_j(t)⟩` for every time (outer) and site (inner), starting from
    /// `d0 |0…0⟩`. `trajectory` selects the dephasing record.
    pub fn stabilizer_traces(&self, d0: &Circuit, times: &[f64], trajectory: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let l = self.num_sites;
        let z: Vec<PauliSum> = (0..l)
            .map(|j| PauliString::single(l, j, Pauli::Z).map(PauliSum::from))
            .collect::<dahsim_core::Result<_>>()?;
        let mut start = StateVector::zero(l)?;
        start.apply_circuit(d0)?;
        start.apply_circuit(&self.d1)?;
        let initial = self.readout(&start, &z)?;
        let mut traces = Vec::with_capacity(times.len());
        if self.explicit_echo {
            let horizon = times.last().copied().unwrap_or(0.0);
            let flips = match &self.noise {
                Some(m) => m.trajectory_insertions(horizon, trajectory),
                None => Vec::new(),
            };
            for &t in times {
                let mut psi = start.clone();
                self.segment(&mut psi, &self.plus, 0.0, t / 2.0, &flips)?;
                psi.apply_circuit(&self.pulse)?;
                self.segment(&mut psi, &self.minus, t / 2.0, t, &flips)?;
                psi.apply_circuit(&self.pulse)?;
                traces.push(self.readout(&psi, &z)?);
            }
        } else {
            let mut psi = start;
            let mut now = 0.0;
            for &t in times {
                evolve(&mut psi, &self.plus, now, t, self.tol)?;
                now = t;
                traces.push(self.readout(&psi, &z)?);
            }
        }
        Ok((initial, traces))
    }

    fn segment(
        &self,
        psi: &mut StateVector,
        h: &HamiltonianSchedule,
        t0: f64,
        t1: f64,
        flips: &[dahsim_core::noise::PhaseFlip],
    ) -> Result<()> {
        match &self.noise {
            Some(m) => m.evolve_noisy(psi, h, t0, t1, flips, self.tol)?,
            None => evolve(psi, h, t0, t1, self.tol)?,
        }
        Ok(())
    }
}

/// Per-state samples of `G_j(t)` and their statistics.
pub struct CorrelatorRun {
    pub g_over_j: f64,
    pub variant: Variant,
    pub times: Vec<f64>,
    pub num_sites: usize,
    /// One row per (state, trajectory): `G_j(0)` in the first `L` entries,
    /// then `G_j(t_k)` at `(k + 1) * L + j`.
    pub samples: Vec<Vec<f64>>,
    pub stats: TrajectoryStats,
    pub states: usize,
}

impl CorrelatorRun {
    pub fn g(&self, k: usize, j: usize) -> f64 {
        self.stats.mean[(k + 1) * self.num_sites + j]
    }

    pub fn stderr(&self, k: usize, j: usize) -> f64 {
        self.stats.stderr[(k + 1) * self.num_sites + j]
    }

    /// `G_j(0)`.
    pub fn initial(&self, j: usize) -> f64 {
        self.stats.mean[j]
    }

    /// Per-state time average over `[a, b]`, then mean and standard error.
    pub fn window_average(&self, a: f64, b: f64) -> Result<TrajectoryStats> {
        let ks: Vec<usize> = (0..self.times.len())
            .filter(|&k| self.times[k] >= a - 1e-12 && self.times[k] <= b + 1e-12)
            .collect();
        if ks.is_empty() {
            return Err(HarnessError::config("sampling.window", "no output times inside the window"));
        }
        let l = self.num_sites;
        let per_state: Vec<Vec<f64>> = self
            .samples
            .iter()
            .map(|s| {
                (0..l)
                    .map(|j| ks.iter().map(|&k| s[(k + 1) * l + j]).sum::<f64>() / ks.len() as f64)
                    .collect()
            })
            .collect();
        stats_of(&per_state)
    }
}

/// Sample statistics; a single sample gets zero standard error.
fn stats_of(samples: &[Vec<f64>]) -> Result<TrajectoryStats> {
    if samples.len() == 1 {
        return Ok(TrajectoryStats {
            mean: samples[0].clone(),
            stderr: vec![0.0; samples[0].len()],
            count: 1,
        });
    }
    Ok(TrajectoryStats::from_samples(samples)?)
}

/// Runs `states` initial states (each with `trajectories` noise records).
#[allow(clippy::too_many_arguments)]
pub fn run_variant(
    setup: &IsingSetup,
    variant: Variant,
    times: &[f64],
    states: usize,
    trajectories: usize,
    seed: u64,
    g_over_j: f64,
    policy: ExecPolicy,
) -> Result<CorrelatorRun> {
    let l = setup.num_sites;
    let states = match variant {
        Variant::GroundState => 1,
        Variant::InfiniteTemperature => states,
    };
    let ground = cluster_ground_state_prep(l)?;
    let items = states * trajectories;
    let samples = par::try_map_indexed(items, policy, |item| -> Result<Vec<f64>> {
        let state = item / trajectories;
        let d0 = match variant {
            Variant::GroundState => ground.clone(),
            Variant::InfiniteTemperature => {
                cluster_ising_blocks(l, &random_flips(l, seed, state as u64))?.d0
            }
        };
        let (initial, traces) = setup.stabilizer_traces(&d0, times, item as u64)?;
        let mut out: Vec<f64> = initial.iter().map(|b| b * b).collect();
        for row in &traces {
            out.extend(row.iter().zip(&initial).map(|(a, b)| a * b));
        }
        Ok(out)
    })?;
    let stats = stats_of(&samples)?;
    Ok(CorrelatorRun {
        g_over_j,
        variant,
        times: times.to_vec(),
        num_sites: l,
        samples,
        stats,
        states,
    })
}

pub fn correlator_table(runs: &[CorrelatorRun], scale: Option<SpamScale>) -> Table {
    let l = runs.first().map_or(0, |r| r.num_sites);
    let mut header: Vec<String> = ["g_over_J", "variant", "Jt", "G_left_tilde", "G_right_tilde"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if scale.is_some() {
        header.push("G_left_overlay".into());
        header.push("G_right_overlay".into());
    }
    header.extend((1..=l).map(|j| format!("G_{j}")));
    header.extend((1..=l).map(|j| format!("stderr_{j}")));
    header.push("S".into());
    let mut t = Table::new("cluster_ising", &header);
    for r in runs {
        // The run's own t = 0 value; exactly 1 without noise.
        let (n_left, n_right) = (r.initial(0), r.initial(l - 1));
        for k in 0..r.times.len() {
            let gl = r.g(k, 0) / n_left;
            let gr = r.g(k, l - 1) / n_right;
            let mut row = vec![num(r.g_over_j), r.variant.label().to_string(), num(r.times[k]), num(gl), num(gr)];
            if let Some(s) = scale {
                row.push(num(gl * s.left));
                row.push(num(gr * s.right));
            }
            row.extend((0..l).map(|j| num(r.g(k, j))));
            row.extend((0..l).map(|j| num(r.stderr(k, j))));
            row.push(r.states.to_string());
            t.push(row);
        }
    }
    t
}

pub fn window_table(runs: &[CorrelatorRun], window: [f64; 2]) -> Result<Table> {
    let mut t = Table::new("cluster_ising_window", &["g_over_J", "variant", "site", "G", "stderr", "S"]);
    for r in runs {
        let w = r.window_average(window[0], window[1])?;
        for j in 0..r.num_sites {
            t.push(vec![
                num(r.g_over_j),
                r.variant.label().to_string(),
                (j + 1).to_string(),
                num(w.mean[j]),
                num(w.stderr[j]),
                r.states.to_string(),
            ]);
        }
    }
    Ok(t)
}

pub fn run_cluster_ising(cfg: &ExperimentConfig, policy: ExecPolicy) -> Result<(Vec<Table>, &'static str)> {
    let l = cfg.l();
    let (couplings, source) = cfg.coupling_matrix()?;
    let times = cfg.times()?;
    let s = &cfg.sampling;
    let noise = match &cfg.noise {
        Some(n) => Some(
            n.to_model(l, 2.0 * std::f64::consts::PI * cfg.unit_hz.unwrap_or(200.0))
                .map_err(|e| HarnessError::config("noise", e.to_string()))?,
        ),
        None => None,
    };
    let trajectories = cfg.noise.as_ref().map_or(1, |n| n.trajectories);
    let mut runs = Vec::new();
    for &ratio in cfg.couplings.g_over_j.as_deref().unwrap_or(&[3.3]) {
        let setup = IsingSetup::new(&couplings, ratio, cfg.tol())?
            .with_noise(noise.clone())
            .with_explicit_echo(s.explicit_echo.unwrap_or(false));
        let samples = s.samples.unwrap_or(50);
        runs.push(run_variant(&setup, Variant::InfiniteTemperature, &times, samples, trajectories, cfg.seed(), ratio, policy)?);
        if s.ground_state.unwrap_or(true) {
            runs.push(run_variant(&setup, Variant::GroundState, &times, 1, trajectories, cfg.seed(), ratio, policy)?);
        }
    }
    let mut tables = vec![correlator_table(&runs, cfg.spam_scale)];
    if let Some(w) = s.window {
        tables.push(window_table(&runs, w)?);
    }
    Ok((tables, source))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readout_maps_to_stabilizers() {
        let j = models::exponential_couplings(6, 1.0, 1.0).unwrap();
        let s = IsingSetup::new(&j, 2.0, 1e-10).unwrap();
        assert_eq!(s.signs.len(), 6);
    }

    #[test]
    fn echo_and_direct_agree() {
        let j = models::exponential_couplings(6, 1.0, 1.0).unwrap();
        let times = [0.0, 0.9, 2.0];
        let direct = IsingSetup::new(&j, 2.0, 1e-11).unwrap();
        let echo = IsingSetup::new(&j, 2.0, 1e-11).unwrap().with_explicit_echo(true);
        let d0 = cluster_ising_blocks(6, &[0, 3]).unwrap().d0;
        let (a0, a) = direct.stabilizer_traces(&d0, &times, 0).unwrap();
        let (b0, b) = echo.stabilizer_traces(&d0, &times, 0).unwrap();
        assert_eq!(a0, b0);
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn initial_correlators() {
        let j = models::exponential_couplings(6, 1.0, 1.0).unwrap();
        let setup = IsingSetup::new(&j, 3.3, 1e-10).unwrap();
        let r = run_variant(&setup, Variant::InfiniteTemperature, &[0.0], 8, 1, 5, 3.3, ExecPolicy::Sequential).unwrap();
        assert!((r.g(0, 0) - 1.0).abs() < 1e-12 && (r.g(0, 5) - 1.0).abs() < 1e-12);
        for j in 1..5 {
            assert!(r.g(0, j).abs() < 1e-12);
        }
        let gs = run_variant(&setup, Variant::GroundState, &[0.0], 1, 1, 5, 3.3, ExecPolicy::Sequential).unwrap();
        for j in 0..6 {
            assert!((gs.g(0, j) - 1.0).abs() < 1e-12);
        }
    }
}
