//! Stochastic phase-flip unravelling of single-qubit dephasing.
//!
//! Time is cut into slices of length `Δt`. After each slice every site
//! receives a `Z` flip independently with probability `p_i = γ_i Δt / 2`, so a
//! trajectory average reproduces coherence decay `(1 - γΔt)^n ≈ exp(-γt)`.
//! Draws are addressed by `(seed, trajectory, slice, site)` and do not depend
//! on evaluation order.

use serde::{Deserialize, Serialize};

use crate::engine::{evolve, HamiltonianSchedule, StateVector};
use crate::error::{Error, Result};
use crate::par::{self, ExecPolicy};
use crate::pauli::Gate;
use crate::rng;

/// Measured single-qubit dephasing rates of the twelve-ion chain, in 1/s.
pub const PAPER_DEPHASING_RATES: [f64; 12] = [
    14.0, 39.0, 55.0, 44.0, 46.0, 60.0, 49.0, 51.0, 42.0, 36.0, 40.0, 24.0,
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaUnit {
    #[default]
    PerS,
    PerUs,
}

/// JSON form of the dephasing model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub gamma_unit: GammaUnit,
    pub dt_us: f64,
    pub seed: u64,
    pub trajectories: usize,
}

impl NoiseConfig {
    /// Model in dimensionless time `τ = ω t` for a frequency unit `ω` in rad/s.
    ///
    /// A single rate is broadcast to every site.
    pub fn to_model(&self, num_sites: usize, omega_unit: f64) -> Result<DephasingModel> {
        let per_s = match self.gamma_unit {
            GammaUnit::PerS => 1.0,
            GammaUnit::PerUs => 1e6,
        };
        let rates: Vec<f64> = match self.gamma.len() {
            1 => vec![self.gamma[0]; num_sites],
            n if n == num_sites => self.gamma.clone(),
            n => {
                return Err(Error::InvalidArgument(format!(
                    "{n} dephasing rates for {num_sites} sites"
                )))
            }
        };
        let rates: Vec<f64> = rates.iter().map(|g| g * per_s / omega_unit).collect();
        DephasingModel::new(rates, self.dt_us * 1e-6 * omega_unit, self.seed)
    }
}

/// A `Z` flip on `site` at the end of slice `slice`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PhaseFlip {
    pub slice: usize,
    pub site: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DephasingModel {
    rates: Vec<f64>,
    dt: f64,
    seed: u64,
}

impl DephasingModel {
    pub fn new(rates: Vec<f64>, dt: f64, seed: u64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("slice length {dt}")));
        }
        for (site, &g) in rates.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidArgument(format!("rate {g} on site {site}")));
            }
            let p = g * dt / 2.0;
            if p > 1.0 {
                return Err(Error::ProbabilityOutOfRange {
                    site,
                    probability: p,
                });
            }
        }
        Ok(DephasingModel { rates, dt, seed })
    }

    pub fn num_sites(&self) -> usize {
        self.rates.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn flip_probability(&self, site: usize) -> f64 {
        self.rates[site] * self.dt / 2.0
    }

    /// Number of slices needed to cover `horizon`.
    pub fn num_slices(&self, horizon: f64) -> usize {
        (horizon / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Uniform draw for one `(trajectory, slice, site)` cell.
    pub fn draw(&self, trajectory: u64, slice: usize, site: usize) -> f64 {
        let counter = (slice * self.num_sites() + site) as u64;
        rng::draw_uniform(self.seed, trajectory, counter)
    }

    /// All flips of one trajectory up to `horizon`, ordered by slice then site.
    pub fn trajectory_insertions(&self, horizon: f64, trajectory: u64) -> Vec<PhaseFlip> {
        let mut out = Vec::new();
        let l = self.num_sites();
        let mut stream = rng::stream(self.seed, trajectory);
        for slice in 0..self.num_slices(horizon) {
            for site in 0..l {
                let u = rng::unit_f64(rand::RngCore::next_u64(&mut stream));
                if u < self.flip_probability(site) {
                    out.push(PhaseFlip { slice, site });
                }
            }
        }
        out
    }

    /// Evolve from `t0` to `t1`, inserting the flips whose slice ends in
    /// `(t0, t1]`. Slice `k` ends at `(k + 1) Δt`.
    pub fn evolve_noisy(
        &self,
        psi: &mut StateVector,
        h: &HamiltonianSchedule,
        t0: f64,
        t1: f64,
        flips: &[PhaseFlip],
        tol: f64,
    ) -> Result<()> {
        let eps = 1e-12 * self.dt;
        let mut now = t0;
        let mut slice = (t0 / self.dt).floor().max(0.0) as usize;
        loop {
            let end = (slice + 1) as f64 * self.dt;
            if end > t1 + eps {
                break;
            }
            if end > t0 + eps {
                evolve(psi, h, now, end.max(now), tol)?;
                now = end.max(now);
                for f in flips.iter().filter(|f| f.slice == slice) {
                    psi.apply_gate(&Gate::rz(f.site, std::f64::consts::PI))?;
                }
            }
            slice += 1;
        }
        if t1 > now {
            evolve(psi, h, now, t1, tol)?;
        }
        Ok(())
    }
}

/// Mean and standard error per output slot.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub count: usize,
}

impl TrajectoryStats {
    /// Sample mean and `s / sqrt(M)` with the `M - 1` variance, in slot order.
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        let width = samples[0].len();
        if samples.iter().any(|s| s.len() != width) {
            return Err(Error::InvalidArgument("ragged samples".into()));
        }
        let mut mean = vec![0.0; width];
        for s in samples {
            for (a, v) in mean.iter_mut().zip(s) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= m as f64);
        let stderr = (0..width)
            .map(|k| {
                if m < 2 {
                    return 0.0;
                }
                let var = samples.iter().map(|s| (s[k] - mean[k]).powi(2)).sum::<f64>()
                    / (m - 1) as f64;
                (var / m as f64).sqrt()
            })
            .collect();
        Ok(TrajectoryStats {
            mean,
            stderr,
            count: m,
        })
    }
}

/// Average `run(trajectory)` over `0..trajectories`.
pub fn trajectory_average<F>(trajectories: usize, policy: ExecPolicy, run: F) -> Result<TrajectoryStats>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync + Send,
{
    let samples = par::try_map_indexed(trajectories, policy, |k| run(k as u64))?;
    TrajectoryStats::from_samples(&samples)
}
