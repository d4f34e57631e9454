//! Adiabatic preparation of the open-chain cluster state and stitching it
//! into a ring.
//!
//! The analog block is `Σ g_j(t) Z_j + h_j(t) X_j`. The periodic `XX(π/4)`
//! layer maps it onto `-Σ g_j X_{j-1} Z_j X_{j+1} + Σ h_j X_j`, so an open
//! chain is obtained by holding the edge couplings `g_1 = g_L = 0`.

use std::sync::Arc;

use dahsim_core::circuits::{cluster_field_blocks, Circuit, ClusterFieldBlocks};
use dahsim_core::engine::dense::ground_fidelity;
use dahsim_core::engine::{evolve, Coefficient, HamiltonianSchedule, Profile, RampProfile, StateVector};
use dahsim_core::models::cluster_stabilizer;
use dahsim_core::pauli::{Pauli, PauliString, PauliSum};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::observables::{self, ObservableSet};
use crate::output::{num, Table};

/// Largest chain for which the dense ground-state fidelity is reported.
pub const FIDELITY_SITE_CAP: usize = 8;

/// Piecewise ramp of the four field groups.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldRamp {
    pub g: f64,
    pub h: f64,
    pub profile: RampProfile,
    pub prep_end: f64,
    pub stitch_end: f64,
}

/// `(g_bulk, h_bulk, g_edge, h_edge)` at time `t`.
impl FieldRamp {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        FieldRamp {
            g: cfg.couplings.g.unwrap_or(1.0),
            h: cfg.couplings.h.unwrap_or(1.0),
            profile: cfg.ramp.profile.unwrap_or_default(),
            prep_end: cfg.ramp.prep_end.unwrap_or(10.0),
            stitch_end: cfg.ramp.stitch_end.unwrap_or(19.0),
        }
    }

    fn fraction(&self, t: f64, start: f64, end: f64) -> f64 {
        if end <= start {
            return if t >= end { 1.0 } else { 0.0 };
        }
        self.profile.eval((t - start) / (end - start))
    }

    pub fn at(&self, t: f64) -> [f64; 4] {
        let s = self.fraction(t, 0.0, self.prep_end);
        let u = self.fraction(t, self.prep_end, self.stitch_end);
        [self.g * s, self.h * (1.0 - s), self.g * u, self.h * (1.0 - u)]
    }

    /// Analog schedule `Σ g_j(t) Z_j + h_j(t) X_j` on `l` sites.
    pub fn schedule(&self, l: usize) -> Result<HamiltonianSchedule> {
        let mut sched = HamiltonianSchedule::new(l);
        for (slot, letter) in [(0, Pauli::Z), (1, Pauli::X), (2, Pauli::Z), (3, Pauli::X)] {
            let ramp = *self;
            let f: Profile = Arc::new(move |t| ramp.at(t)[slot]);
            let sites: Vec<usize> = if slot < 2 { (1..l - 1).collect() } else { vec![0, l - 1] };
            for j in sites {
                sched.push(PauliString::single(l, j, letter)?, 1.0, Coefficient::Profile(f.clone()))?;
            }
        }
        Ok(sched)
    }
}

/// Effective-frame observables of both stages.
pub fn observables(l: usize) -> Result<ObservableSet> {
    let mut set = ObservableSet::new();
    set.push("Sigma_x", observables::bulk_magnetization(l)?)?;
    set.push("O_s", observables::string_order(l)?)?;
    set.push("E_1L", observables::edge_correlation(l)?)?;
    set.push("S_1", cluster_stabilizer(l, 0)?)?;
    set.push("S_L", cluster_stabilizer(l, l - 1)?)?;
    // Two-body edge forms used in the figure caption.
    set.push("S_1_zx", PauliString::from_sparse(l, &[(0, Pauli::Z), (1, Pauli::X)])?)?;
    set.push("S_L_xz", PauliString::from_sparse(l, &[(l - 2, Pauli::X), (l - 1, Pauli::Z)])?)?;
    Ok(set)
}

/// One output time of the combined run.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPoint {
    pub gt: f64,
    pub fields: [f64; 4],
    /// Same order as [`observables`].
    pub values: Vec<f64>,
    pub fidelity: Option<f64>,
}

pub struct FieldRun {
    pub ramp: FieldRamp,
    pub names: Vec<String>,
    pub points: Vec<FieldPoint>,
}

impl FieldRun {
    pub fn value(&self, k: usize, name: &str) -> f64 {
        let i = self.names.iter().position(|n| n == name).expect("known observable");
        self.points[k].values[i]
    }
}

/// Output grid `0, step, …` up to `end`, always including `prep_end` and `end`.
pub fn output_grid(step: f64, prep_end: f64, end: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let n = (end / step).round() as usize;
    for k in 0..=n {
        let t = (k as f64 * step).min(end);
        grid.push(t);
    }
    grid.push(prep_end);
    grid.push(end);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}

/// Physical-frame form of an effective observable measured after `d2`.
fn physical(op: &PauliSum, readout: &Circuit) -> Result<PauliSum> {
    Ok(op.conjugate_by_circuit(&readout.inverse())?)
}

/// Runs the protocol from `gt = 0` to `end` and records observables on `grid`.
pub fn run(l: usize, ramp: FieldRamp, grid: &[f64], tol: f64) -> Result<FieldRun> {
    let blocks: ClusterFieldBlocks = cluster_field_blocks(l)?;
    let sched = ramp.schedule(l)?;
    let obs = observables(l)?;
    // Physical state = entangler · ψ_eff; readout frame W = d2 · entangler.
    let readout = blocks.entangler.then(&blocks.d2)?;
    let mapped: Vec<PauliSum> = obs.iter().map(|(_, o)| physical(o, &readout)).collect::<Result<_>>()?;
    let back = blocks.entangler.inverse();

    let mut psi = StateVector::basis(l, (1usize << l) - 1)?;
    psi.apply_circuit(&blocks.d1)?;
    let mut now = 0.0;
    let mut points = Vec::with_capacity(grid.len());
    for &gt in grid {
        evolve(&mut psi, &sched, now, gt, tol)?;
        now = gt;
        let mut out = psi.clone();
        out.apply_circuit(&blocks.d2)?;
        let values = mapped.iter().map(|m| out.expect(m)).collect::<dahsim_core::Result<Vec<_>>>()?;
        let fidelity = if l <= FIDELITY_SITE_CAP {
            let h_eff = sched.at(gt)?.conjugate_by_circuit(&blocks.entangler)?;
            let mut eff = psi.clone();
            eff.apply_circuit(&back)?;
            Some(ground_fidelity(&eff, &h_eff)?)
        } else {
            None
        };
        points.push(FieldPoint {
            gt,
            fields: ramp.at(gt),
            values,
            fidelity,
        });
    }
    Ok(FieldRun {
        ramp,
        names: obs.names().map(str::to_string).collect(),
        points,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), num)
}

pub fn cluster_field_table(run: &FieldRun) -> Table {
    let mut t = Table::new(
        "cluster_field",
        &["gt", "Sigma_x", "O_s", "g_bulk", "h_bulk", "g_edge", "h_edge", "fidelity"],
    );
    let g = run.ramp.g;
    for (k, p) in run.points.iter().enumerate() {
        if p.gt > run.ramp.prep_end + 1e-12 {
            break;
        }
        t.push(vec![
            num(p.gt),
            num(run.value(k, "Sigma_x")),
            num(run.value(k, "O_s")),
            num(p.fields[0] / g),
            num(p.fields[1] / g),
            num(p.fields[2] / g),
            num(p.fields[3] / g),
            opt(p.fidelity),
        ]);
    }
    t
}

pub fn stitch_table(run: &FieldRun) -> Table {
    let mut t = Table::new("stitch", &["gt", "E_1L", "S_1", "S_L", "S_1_zx", "S_L_xz", "O_s", "g_edge", "h_edge", "fidelity"]);
    let g = run.ramp.g;
    for (k, p) in run.points.iter().enumerate() {
        if p.gt < run.ramp.prep_end - 1e-12 {
            continue;
        }
        t.push(vec![
            num(p.gt),
            num(run.value(k, "E_1L")),
            num(run.value(k, "S_1")),
            num(run.value(k, "S_L")),
            num(run.value(k, "S_1_zx")),
            num(run.value(k, "S_L_xz")),
            num(run.value(k, "O_s")),
            num(p.fields[2] / g),
            num(p.fields[3] / g),
            opt(p.fidelity),
        ]);
    }
    t
}

pub fn run_cluster_field(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let ramp = FieldRamp::from_config(cfg);
    let grid = output_grid(cfg.ramp.step.unwrap_or(0.5), ramp.prep_end, ramp.prep_end);
    let run = run(cfg.l(), ramp, &grid, cfg.tol())?;
    Ok(vec![cluster_field_table(&run)])
}

pub fn run_stitch(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let ramp = FieldRamp::from_config(cfg);
    let grid = output_grid(cfg.ramp.step.unwrap_or(0.5), ramp.prep_end, ramp.stitch_end);
    let run = run(cfg.l(), ramp, &grid, cfg.tol())?;
    Ok(vec![cluster_field_table(&run), stitch_table(&run)])
}
