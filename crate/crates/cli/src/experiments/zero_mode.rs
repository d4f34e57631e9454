//! Prethermal lifetimes of the edge mode and the sampling-variance study.

use dahsim_core::models;
use dahsim_core::par::ExecPolicy;
use dahsim_core::pauli::{Pauli, PauliString, PauliSum};
use nalgebra::DMatrix;
use dahsim_core::zeromode::{
    autocorr_exact, autocorr_sampled, autocorr_spectral, basis_traces, lifetime_from_series,
    sample_indices, AutocorrEstimate, AutocorrOptions, BulkBasis, Lifetime, ZeroModeSpec,
};

use crate::config::{ExperimentConfig, Method};
use crate::error::Result;
use crate::output::{num, Table};

/// `Z_0 X_1`, the bare left edge mode.
pub fn edge_operator(spec: &ZeroModeSpec) -> Result<PauliString> {
    let [_, _, zx, _] = spec.edge_modes()?;
    Ok(zx)
}

/// One point of the lifetime sweep.
#[derive(Clone, Debug)]
pub struct LifetimePoint {
    pub j_nnn_over_g: f64,
    pub estimate: AutocorrEstimate,
    pub lifetime: Lifetime,
}

#[allow(clippy::too_many_arguments)]
pub fn lifetime_sweep(
    l: usize,
    g: f64,
    j_over_g: f64,
    j_nnn_over_g: &[f64],
    times: &[f64],
    method: Method,
    samples: usize,
    basis: BulkBasis,
    threshold: f64,
    seed: u64,
    opts: &AutocorrOptions,
) -> Result<Vec<LifetimePoint>> {
    let mut out = Vec::with_capacity(j_nnn_over_g.len());
    for (k, &x) in j_nnn_over_g.iter().enumerate() {
        let spec = ZeroModeSpec::new(l, g, j_over_g * g, x * g)?;
        let h = spec.hamiltonian()?;
        let a = PauliSum::from(edge_operator(&spec)?);
        let estimate = match method {
            Method::Spectral => AutocorrEstimate {
                times: times.to_vec(),
                values: autocorr_spectral(&a, &h, times, opts.policy)?,
                stderr: vec![0.0; times.len()],
                samples: 1 << l,
                basis,
                seed: None,
            },
            Method::Exact => autocorr_exact(&a, &h, times, basis, opts)?,
            Method::Sampled => autocorr_sampled(&a, &h, times, samples, basis, seed.wrapping_add(k as u64), opts)?,
        };
        let lifetime = lifetime_from_series(&estimate.times, &estimate.values, threshold)?;
        out.push(LifetimePoint {
            j_nnn_over_g: x,
            estimate,
            lifetime,
        });
    }
    Ok(out)
}

pub fn lifetime_tables(points: &[LifetimePoint], g: f64) -> Vec<Table> {
    let mut tau = Table::new("zm_lifetime", &["J_NNN_over_g", "tau", "censored", "horizon"]);
    let mut series = Table::new("zm_autocorr", &["J_NNN_over_g", "t", "G", "stderr", "S", "basis", "seed"]);
    for p in points {
        let horizon = p.estimate.times.last().copied().unwrap_or(0.0) * g;
        let row = match p.lifetime {
            Lifetime::Crossed(t) => vec![num(p.j_nnn_over_g), num(t * g), "false".into(), num(horizon)],
            Lifetime::Censored { .. } => vec![num(p.j_nnn_over_g), "NA".into(), "true".into(), num(horizon)],
        };
        tau.push(row);
        let e = &p.estimate;
        let seed = e.seed.map_or_else(|| "NA".to_string(), |s| s.to_string());
        for k in 0..e.times.len() {
            series.push(vec![
                num(p.j_nnn_over_g),
                num(e.times[k] * g),
                num(e.values[k]),
                num(e.stderr[k]),
                e.samples.to_string(),
                e.basis.label().into(),
                seed.clone(),
            ]);
        }
    }
    vec![tau, series]
}

pub fn run_zm_lifetime(cfg: &ExperimentConfig, policy: ExecPolicy) -> Result<Vec<Table>> {
    let c = &cfg.couplings;
    let s = &cfg.sampling;
    let g = c.g.unwrap_or(1.0);
    let opts = AutocorrOptions { tol: cfg.tol(), policy };
    // The grid is in units of 1/g.
    let times: Vec<f64> = cfg.times()?.iter().map(|t| t / g).collect();
    let points = lifetime_sweep(
        cfg.l(),
        g,
        c.j_over_g.unwrap_or(0.3),
        c.j_nnn_over_g.as_deref().unwrap_or(&[0.05, 0.1, 0.15, 0.2]),
        &times,
        s.method.unwrap_or(Method::Spectral),
        s.samples.unwrap_or(64),
        s.bulk_basis.unwrap_or(BulkBasis::Z),
        s.threshold.unwrap_or(0.3),
        cfg.seed(),
        &opts,
    )?;
    Ok(lifetime_tables(&points, g))
}

/// `mean_t |G_S - G| / mean_t |G|`.
pub fn relative_error(estimate: &[f64], exact: &[f64]) -> f64 {
    let num: f64 = estimate.iter().zip(exact).map(|(a, b)| (a - b).abs()).sum();
    let den: f64 = exact.iter().map(|b| b.abs()).sum();
    num / den
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Repeated small-sample estimates of one basis.
#[derive(Clone, Debug)]
pub struct RepeatSet {
    pub basis: BulkBasis,
    pub samples: usize,
    /// Per repeat, `G_S(t)` on the grid.
    pub estimates: Vec<Vec<f64>>,
    /// Per repeat, the standard error averaged over the grid.
    pub mean_stderr: Vec<f64>,
    pub relative_errors: Vec<f64>,
}

impl RepeatSet {
    /// Spread of the time-averaged estimate across repeats.
    pub fn estimator_std(&self) -> f64 {
        let avg: Vec<f64> = self
            .estimates
            .iter()
            .map(|e| e.iter().sum::<f64>() / e.len() as f64)
            .collect();
        mean_std(&avg).1
    }

    /// Per-time variance of `G_S` across repeats, averaged over the grid.
    pub fn pooled_variance(&self) -> f64 {
        let nt = self.estimates[0].len();
        (0..nt)
            .map(|k| {
                let col: Vec<f64> = self.estimates.iter().map(|e| e[k]).collect();
                mean_std(&col).1.powi(2)
            })
            .sum::<f64>()
            / nt as f64
    }
}

pub struct VarianceStudy {
    pub times: Vec<f64>,
    pub exact: Vec<f64>,
    pub sets: Vec<RepeatSet>,
}

fn repeat_seed(seed: u64, basis: BulkBasis, size: usize, repeat: usize) -> u64 {
    let b = match basis {
        BulkBasis::Z => 0u64,
        BulkBasis::X => 1,
    };
    seed ^ (b << 62) ^ ((size as u64) << 40) ^ repeat as u64
}

fn summarize(values: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = values.len() as f64;
    let nt = values[0].len();
    let mut mean = vec![0.0; nt];
    for v in values {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n;
        }
    }
    let stderr: f64 = (0..nt)
        .map(|k| {
            let var = values.iter().map(|v| (v[k] - mean[k]).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        })
        .sum::<f64>()
        / nt as f64;
    (mean, stderr)
}

/// Z-bulk estimates drawn from the full enumeration cache; X-bulk estimates
/// from fresh sampled runs. `z_sizes` lists the sample sizes of the Z study.
pub fn sampling_variance(
    h: &PauliSum,
    times: &[f64],
    samples: usize,
    z_sizes: &[usize],
    repeats: usize,
    seed: u64,
    opts: &AutocorrOptions,
) -> Result<VarianceStudy> {
    let l = h.num_sites();
    let a = PauliSum::from(PauliString::from_sparse(l, &[(0, Pauli::Z), (1, Pauli::X)])?);
    let all: Vec<usize> = (0..1usize << l).collect();
    let cache = basis_traces(&a, h, times, BulkBasis::Z, &all, opts)?;
    let (exact, _) = summarize(&cache);

    let mut sets = Vec::new();
    let mut sizes = vec![samples];
    sizes.extend(z_sizes.iter().copied().filter(|&n| n != samples));
    for &size in &sizes {
        let mut set = RepeatSet {
            basis: BulkBasis::Z,
            samples: size,
            estimates: Vec::new(),
            mean_stderr: Vec::new(),
            relative_errors: Vec::new(),
        };
        for r in 0..repeats {
            let idx = sample_indices(l, size, repeat_seed(seed, BulkBasis::Z, size, r));
            let traces: Vec<Vec<f64>> = idx.iter().map(|&i| cache[i].clone()).collect();
            let (mean, se) = summarize(&traces);
            set.relative_errors.push(relative_error(&mean, &exact));
            set.mean_stderr.push(se);
            set.estimates.push(mean);
        }
        sets.push(set);
    }

    let mut x = RepeatSet {
        basis: BulkBasis::X,
        samples,
        estimates: Vec::new(),
        mean_stderr: Vec::new(),
        relative_errors: Vec::new(),
    };
    for r in 0..repeats {
        let e = autocorr_sampled(&a, h, times, samples, BulkBasis::X, repeat_seed(seed, BulkBasis::X, samples, r), opts)?;
        x.relative_errors.push(relative_error(&e.values, &exact));
        x.mean_stderr.push(e.stderr.iter().sum::<f64>() / e.stderr.len() as f64);
        x.estimates.push(e.values);
    }
    sets.insert(1, x);
    Ok(VarianceStudy {
        times: times.to_vec(),
        exact,
        sets,
    })
}

pub fn variance_tables(study: &VarianceStudy) -> Vec<Table> {
    let mut per = Table::new("sampling_variance", &["repeat", "basis", "S", "relative_error"]);
    let mut summary = Table::new(
        "sampling_variance_summary",
        &["basis", "S", "repeats", "mean_rel_error", "std_rel_error", "estimator_std", "mean_stderr"],
    );
    for set in &study.sets {
        for (r, e) in set.relative_errors.iter().enumerate() {
            per.push(vec![r.to_string(), set.basis.label().into(), set.samples.to_string(), num(*e)]);
        }
        let (m, sd) = mean_std(&set.relative_errors);
        let (se, _) = mean_std(&set.mean_stderr);
        summary.push(vec![
            set.basis.label().into(),
            set.samples.to_string(),
            set.relative_errors.len().to_string(),
            num(m),
            num(sd),
            num(set.estimator_std()),
            num(se),
        ]);
    }
    let mut exact = Table::new("sampling_variance_exact", &["Jt", "G"]);
    for (t, g) in study.times.iter().zip(&study.exact) {
        exact.push(vec![num(*t), num(*g)]);
    }
    vec![per, summary, exact]
}

/// `Σ J_ij X_i X_j − (g/J) Σ X Z X`, with `J_ij` in units of the mean
/// nearest-neighbour coupling.
pub fn variance_hamiltonian(couplings: &DMatrix<f64>, g_over_j: f64) -> Result<PauliSum> {
    Ok(models::cluster_ising_target(couplings, g_over_j)?)
}

pub fn run_sampling_variance(cfg: &ExperimentConfig, policy: ExecPolicy) -> Result<Vec<Table>> {
    let s = &cfg.sampling;
    let g_over_j = cfg.couplings.g_over_j.as_ref().and_then(|v| v.first().copied()).unwrap_or(0.5);
    let (couplings, _) = cfg.coupling_matrix()?;
    let h = variance_hamiltonian(&couplings, g_over_j)?;
    let opts = AutocorrOptions { tol: cfg.tol(), policy };
    let study = sampling_variance(
        &h,
        &cfg.times()?,
        s.samples.unwrap_or(10),
        s.sample_sizes.as_deref().unwrap_or(&[10, 40]),
        s.repeats.unwrap_or(100),
        cfg.seed(),
        &opts,
    )?;
    Ok(variance_tables(&study))
}
