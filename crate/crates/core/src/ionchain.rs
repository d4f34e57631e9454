//! Spin-spin couplings of a linear ion chain driven near its transverse modes.
//!
//! Positions are in units of `ℓ = (e²/4πε₀ m ω_z²)^{1/3}`; the transverse
//! Hessian is in units of `m ω_z²`. Frequencies are angular throughout, and
//! Hz values are converted with `2π` only at the JSON boundary.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 200;
/// Default minimum `|μ + ω_1 - ω_k|`: `2π × 100 Hz`.
pub const DEFAULT_RESONANCE_GUARD: f64 = 2.0 * PI * 100.0;

/// Relative Rabi amplitudes used for the twelve-ion cluster-Ising chain.
pub const PAPER_RABI_CLUSTER_ISING: [f64; 12] = [
    0.904, 0.605, 0.515, 0.466, 0.499, 0.524, 0.534, 0.512, 0.504, 0.456, 0.508, 0.588,
];
/// Relative Rabi amplitudes used for the four-body chain.
pub const PAPER_RABI_FOUR_BODY: [f64; 12] = [
    0.844, 0.580, 0.444, 0.438, 0.452, 0.485, 0.476, 0.497, 0.440, 0.437, 0.486, 0.523,
];

/// Chain parameters in angular units.
#[derive(Clone, Debug, PartialEq)]
pub struct IonChainSpec {
    pub num_ions: usize,
    pub omega_z: f64,
    pub omega_x: f64,
    pub rabi: Vec<f64>,
    /// Detuning from the lowest transverse mode.
    pub mu: f64,
    pub eta0: f64,
    /// Target mean nearest-neighbour coupling.
    pub target_nn: f64,
    pub resonance_guard: f64,
}

/// JSON form of [`IonChainSpec`], frequencies in Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonChainConfig {
    #[serde(rename = "N")]
    pub num_ions: usize,
    pub omega_z_hz: f64,
    pub omega_x_hz: f64,
    pub mu_hz: f64,
    pub eta0: f64,
    pub omega_rel: Vec<f64>,
    #[serde(rename = "J_target_hz")]
    pub j_target_hz: f64,
    #[serde(default)]
    pub guard_hz: Option<f64>,
}

impl IonChainConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> Result<IonChainSpec> {
        let w = 2.0 * PI;
        let spec = IonChainSpec {
            num_ions: self.num_ions,
            omega_z: w * self.omega_z_hz,
            omega_x: w * self.omega_x_hz,
            rabi: self.omega_rel.clone(),
            mu: w * self.mu_hz,
            eta0: self.eta0,
            target_nn: w * self.j_target_hz,
            resonance_guard: self.guard_hz.map_or(DEFAULT_RESONANCE_GUARD, |g| w * g),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl IonChainSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.num_ions < 2 {
            return bad(format!("need at least 2 ions, got {}", self.num_ions));
        }
        if self.rabi.len() != self.num_ions {
            return bad(format!(
                "{} Rabi amplitudes for {} ions",
                self.rabi.len(),
                self.num_ions
            ));
        }
        for (name, v) in [
            ("omega_z", self.omega_z),
            ("omega_x", self.omega_x),
            ("eta0", self.eta0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.omega_x <= self.omega_z {
            return bad("omega_x must exceed omega_z".into());
        }
        if !self.mu.is_finite() || !self.target_nn.is_finite() || self.rabi.iter().any(|r| !r.is_finite()) {
            return bad("non-finite chain parameter".into());
        }
        Ok(())
    }
}

fn residual(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let coulomb: f64 = (0..u.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let d = u[i] - u[j];
                    d.signum() / (d * d)
                })
                .sum();
            u[i] - coulomb
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dimensionless axial equilibrium, sorted ascending and symmetric about 0.
pub fn equilibrium_positions(num_ions: usize) -> Result<Vec<f64>> {
    if num_ions < 1 {
        return Err(Error::InvalidArgument("empty chain".into()));
    }
    let n = num_ions;
    // Uniform start with the known minimum-spacing scaling.
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Vec<f64> = (0..n)
        .map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * spacing)
        .collect();
    let mut r = residual(&u);
    for _ in 0..NEWTON_MAX_ITER {
        if max_abs(&r) <= NEWTON_TOL {
            break;
        }
        let jac = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0 + (0..n)
                    .filter(|&k| k != i)
                    .map(|k| 2.0 / (u[i] - u[k]).abs().powi(3))
                    .sum::<f64>()
            } else {
                -2.0 / (u[i] - u[j]).abs().powi(3)
            }
        });
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&r))
            .ok_or(Error::NoConvergence {
                iterations: 0,
                residual: max_abs(&r),
            })?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, s)| a - lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let rt = residual(&trial);
                if max_abs(&rt) < max_abs(&r) || lambda < 1e-6 {
                    u = trial;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::NoConvergence {
                    iterations: 0,
                    residual: max_abs(&r),
                });
            }
        }
    }
    if max_abs(&r) > NEWTON_TOL {
        return Err(Error::NoConvergence {
            iterations: NEWTON_MAX_ITER,
            residual: max_abs(&r),
        });
    }
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
    Ok(sym)
}

/// Transverse normal modes, ascending in frequency.
#[derive(Clone, Debug)]
pub struct TransverseModes {
    /// Angular frequencies `ω_1 ≤ … ≤ ω_N`.
    pub frequencies: Vec<f64>,
    /// Column `k` is the participation vector `b_{·k}`.
    pub vectors: DMatrix<f64>,
}

pub fn transverse_modes(positions: &[f64], spec: &IonChainSpec) -> Result<TransverseModes> {
    let n = positions.len();
    if n != spec.num_ions {
        return Err(Error::LengthMismatch {
            left: spec.num_ions,
            right: n,
        });
    }
    let beta2 = (spec.omega_x / spec.omega_z).powi(2);
    let k = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            beta2
                - (0..n)
                    .filter(|&m| m != i)
                    .map(|m| 1.0 / (positions[i] - positions[m]).abs().powi(3))
                    .sum::<f64>()
        } else {
            1.0 / (positions[i] - positions[j]).abs().powi(3)
        }
    });
    let eig = k.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut frequencies = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        if lambda <= 0.0 {
            return Err(Error::UnstableChain {
                mode: col,
                eigenvalue: lambda,
            });
        }
        frequencies.push(spec.omega_z * lambda.sqrt());
        let mut v = eig.eigenvectors.column(idx).into_owned();
        // Fix the sign so the largest component is positive.
        let imax = v.iamax();
        if v[imax] < 0.0 {
            v = -v;
        }
        vectors.set_column(col, &v);
    }
    Ok(TransverseModes {
        frequencies,
        vectors,
    })
}

/// `J_ij = Σ_k η0² b_ik b_jk Ω_i Ω_j / (2(μ + ω_1 - ω_k))`, rescaled so the
/// mean nearest-neighbour coupling equals the target.
pub fn coupling_matrix(modes: &TransverseModes, spec: &IonChainSpec) -> Result<DMatrix<f64>> {
    let n = spec.num_ions;
    let w1 = modes.frequencies[0];
    let mut j = DMatrix::zeros(n, n);
    for (k, &wk) in modes.frequencies.iter().enumerate() {
        let denom = spec.mu + w1 - wk;
        if denom.abs() <= spec.resonance_guard {
            return Err(Error::Resonance {
                mode: k,
                denominator: denom,
                guard: spec.resonance_guard,
            });
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    j[(a, b)] += spec.eta0.powi(2)
                        * modes.vectors[(a, k)]
                        * modes.vectors[(b, k)]
                        * spec.rabi[a]
                        * spec.rabi[b]
                        / (2.0 * denom);
                }
            }
        }
    }
    let mean = crate::models::mean_nearest_neighbour(&j);
    if mean == 0.0 || !mean.is_finite() {
        return Err(Error::InvalidArgument(
            "mean nearest-neighbour coupling vanishes; cannot rescale".into(),
        ));
    }
    Ok(j * (spec.target_nn / mean))
}

/// Equilibrium, modes and rescaled couplings in one call.
pub fn chain_couplings(spec: &IonChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let u = equilibrium_positions(spec.num_ions)?;
    let modes = transverse_modes(&u, spec)?;
    coupling_matrix(&modes, spec)
}

/// CSV with 1-based row and column headers; values converted to Hz.
pub fn coupling_csv(j: &DMatrix<f64>) -> String {
    let n = j.nrows();
    let mut out = String::from("J_hz");
    for c in 0..n {
        out.push_str(&format!(",{}", c + 1));
    }
    out.push('\n');
    for r in 0..n {
        out.push_str(&format!("{}", r + 1));
        for c in 0..n {
            out.push_str(&format!(",{:.10e}", j[(r, c)] / (2.0 * PI)));
        }
        out.push('\n');
    }
    out
}
