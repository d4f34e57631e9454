use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{evolve_times, PauliOperator, StateVector, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::noise::TrajectoryStats;
use crate::par::{self, ExecPolicy};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng;

/// Single-site basis for sites outside the observable's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BulkBasis {
    #[serde(rename = "Z_BULK")]
    Z,
    #[serde(rename = "X_BULK")]
    X,
}

impl BulkBasis {
    pub fn label(self) -> &'static str {
        match self {
            BulkBasis::Z => "Z_BULK",
            BulkBasis::X => "X_BULK",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AutocorrOptions {
    pub tol: f64,
    pub policy: ExecPolicy,
}

impl Default for AutocorrOptions {
    fn default() -> Self {
        AutocorrOptions {
            tol: DEFAULT_TOL,
            policy: ExecPolicy::Parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrEstimate {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub samples: usize,
    pub basis: BulkBasis,
    /// `None` for full enumeration.
    pub seed: Option<u64>,
}

impl AutocorrEstimate {
    /// `t, G, stderr, S, basis, seed` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,G,stderr,S,basis,seed\n");
        let seed = self.seed.map_or_else(|| "exact".to_string(), |s| s.to_string());
        for k in 0..self.times.len() {
            out.push_str(&format!(
                "{},{:.12e},{:.6e},{},{},{}\n",
                self.times[k],
                self.values[k],
                self.stderr[k],
                self.samples,
                self.basis.label(),
                seed
            ));
        }
        out
    }
}

/// The observable of an autocorrelator: one Pauli string with a real weight.
pub fn single_string(a: &PauliSum) -> Result<(PauliString, f64)> {
    let terms = a.real_terms()?;
    match terms.as_slice() {
        [(p, c)] if !p.is_identity() => Ok((p.clone(), *c)),
        _ => Err(Error::InvalidArgument(
            "the observable must be a single non-identity Pauli string".into(),
        )),
    }
}

/// Product eigenbasis: the observable's own letter on its support, the bulk
/// axis elsewhere. Basis index bit `j` selects the `-1` eigenstate on site `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductBasis {
    axes: Vec<Pauli>,
}

impl ProductBasis {
    pub fn for_observable(a: &PauliString, bulk: BulkBasis) -> Self {
        let fill = match bulk {
            BulkBasis::Z => Pauli::Z,
            BulkBasis::X => Pauli::X,
        };
        let axes = (0..a.num_sites())
            .map(|j| match a.letter(j) {
                Pauli::I => fill,
                p => p,
            })
            .collect();
        ProductBasis { axes }
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn state(&self, index: usize) -> Result<StateVector> {
        let h = FRAC_1_SQRT_2;
        let c = |re, im| Complex64::new(re, im);
        let sites: Vec<[Complex64; 2]> = self
            .axes
            .iter()
            .enumerate()
            .map(|(j, axis)| {
                let minus = (index >> j) & 1 == 1;
                match (axis, minus) {
                    (Pauli::X, false) => [c(h, 0.0), c(h, 0.0)],
                    (Pauli::X, true) => [c(h, 0.0), c(-h, 0.0)],
                    (Pauli::Y, false) => [c(h, 0.0), c(0.0, h)],
                    (Pauli::Y, true) => [c(h, 0.0), c(0.0, -h)],
                    (_, false) => [c(1.0, 0.0), c(0.0, 0.0)],
                    (_, true) => [c(0.0, 0.0), c(1.0, 0.0)],
                }
            })
            .collect();
        StateVector::product(&sites)
    }

    /// Eigenvalue of `a` (phase-free) on basis state `index`.
    pub fn eigenvalue(&self, a: &PauliString, index: usize) -> f64 {
        let flips = a
            .support()
            .into_iter()
            .filter(|&j| (index >> j) & 1 == 1)
            .count();
        if flips % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// `X_a(t) = a ⟨a|A(t)|a⟩` for each basis state in `indices`, at every time.
pub fn basis_traces(
    a: &PauliSum,
    h: &PauliSum,
    times: &[f64],
    basis: BulkBasis,
    indices: &[usize],
    opts: &AutocorrOptions,
) -> Result<Vec<Vec<f64>>> {
    let (p, weight) = single_string(a)?;
    if h.num_sites() != p.num_sites() {
        return Err(Error::LengthMismatch {
            left: p.num_sites(),
            right: h.num_sites(),
        });
    }
    if !h.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be finite, non-negative and sorted".into()));
    }
    let pb = ProductBasis::for_observable(&p, basis);
    let h_op = PauliOperator::new(h)?.with_spectrum_estimate();
    let a_op = PauliOperator::new(&PauliSum::from(p.clone()))?;
    par::try_map_indexed(indices.len(), opts.policy, |k| {
        let idx = indices[k];
        let psi = pb.state(idx)?;
        let eig = pb.eigenvalue(&p, idx) * weight;
        let mut out = vec![0.0; times.len()];
        evolve_times(&psi, &h_op, times, opts.tol, |k, s| {
            out[k] = eig * weight * a_op.expectation(s.amplitudes()).re;
            Ok(())
        })?;
        Ok(out)
    })
}

/// `2^{-L} Σ_a a ⟨a|A(t)|a⟩` over every basis state.
pub fn autocorr_exact(
    a: &PauliSum,
    h: &PauliSum,
    times: &[f64],
    basis: BulkBasis,
    opts: &AutocorrOptions,
) -> Result<AutocorrEstimate> {
    let l = a.num_sites();
    if l > 16 {
        return Err(Error::TooManySites {
            requested: l,
            limit: 16,
        });
    }
    let indices: Vec<usize> = (0..1usize << l).collect();
    let traces = basis_traces(a, h, times, basis, &indices, opts)?;
    let mut values = vec![0.0; times.len()];
    for tr in &traces {
        for (v, x) in values.iter_mut().zip(tr) {
            *v += x;
        }
    }
    values.iter_mut().for_each(|v| *v /= indices.len() as f64);
    Ok(AutocorrEstimate {
        times: times.to_vec(),
        values,
        stderr: vec![0.0; times.len()],
        samples: indices.len(),
        basis,
        seed: None,
    })
}

/// Uniform basis indices drawn with replacement, keyed by `(seed, sample)`.
pub fn sample_indices(num_sites: usize, samples: usize, seed: u64) -> Vec<usize> {
    let mask = if num_sites >= 64 { u64::MAX } else { (1u64 << num_sites) - 1 };
    (0..samples)
        .map(|s| (rng::draw_u64(seed, s as u64, 0) & mask) as usize)
        .collect()
}

/// Monte Carlo estimate from `samples` uniformly drawn basis states.
pub fn autocorr_sampled(
    a: &PauliSum,
    h: &PauliSum,
    times: &[f64],
    samples: usize,
    basis: BulkBasis,
    seed: u64,
    opts: &AutocorrOptions,
) -> Result<AutocorrEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 samples are needed for a standard error, got {samples}"
        )));
    }
    let indices = sample_indices(a.num_sites(), samples, seed);
    let traces = basis_traces(a, h, times, basis, &indices, opts)?;
    let stats = TrajectoryStats::from_samples(&traces)?;
    Ok(AutocorrEstimate {
        times: times.to_vec(),
        values: stats.mean,
        stderr: stats.stderr,
        samples,
        basis,
        seed: Some(seed),
    })
}

/// `signs[b]` and `src[b]` with `(P v)[b] = phase · signs[b] · v[src[b]]`.
fn string_action(p: &PauliString) -> Result<(Vec<usize>, Vec<f64>, Complex64)> {
    let (x, z) = p.masks()?;
    let dim = 1usize << p.num_sites();
    let (x, z) = (x as usize, z as usize);
    let src: Vec<usize> = (0..dim).map(|b| b ^ x).collect();
    let signs = (0..dim)
        .map(|b| if (z & (b ^ x)).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let phase = crate::pauli::Phase::from_exponent(p.y_count()).to_complex();
    Ok((src, signs, phase))
}

/// `G(t) = 2^{-L} Σ_{mn} |⟨m|A|n⟩|² cos((E_m - E_n) t)` from a dense
/// eigendecomposition of `H`. Suited to long times; `L ≤ 12`.
pub fn autocorr_spectral(a: &PauliSum, h: &PauliSum, times: &[f64], policy: ExecPolicy) -> Result<Vec<f64>> {
    let (p, weight) = single_string(a)?;
    let l = p.num_sites();
    let dim = 1usize << l;
    let (src, signs, _) = string_action(&p)?;
    // Weights and frequencies of all pairs m ≤ n with non-negligible overlap.
    let (energies, w) = match h.to_real_matrix()? {
        Some(hr) => {
            let eig = hr.symmetric_eigen();
            let v = eig.eigenvectors;
            let av = DMatrix::from_fn(dim, dim, |b, k| signs[b] * v[(src[b], k)]);
            let b = v.transpose() * av;
            (eig.eigenvalues.as_slice().to_vec(), b.map(|x| x * x))
        }
        None => {
            let eig = h.to_matrix()?.symmetric_eigen();
            let v = eig.eigenvectors;
            let av = DMatrix::from_fn(dim, dim, |b, k| v[(src[b], k)] * signs[b]);
            let b = v.adjoint() * av;
            (eig.eigenvalues.as_slice().to_vec(), b.map(|x| x.norm_sqr()))
        }
    };
    let mut constant = 0.0;
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for m in 0..dim {
        constant += w[(m, m)];
        for n in m + 1..dim {
            let wt = w[(m, n)] + w[(n, m)];
            if wt > 1e-15 {
                let omega = energies[m] - energies[n];
                if omega.abs() < 1e-12 {
                    constant += wt;
                } else {
                    pairs.push((omega, wt));
                }
            }
        }
    }
    let scale = weight * weight / dim as f64;
    Ok(par::map_indexed(times.len(), policy, |k| {
        let t = times[k];
        let osc: f64 = pairs.iter().map(|(om, wt)| wt * (om * t).cos()).sum();
        scale * (constant + osc)
    }))
}

/// Two routes to the single-state variance `Var(X_s)` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceCheck {
    /// Population variance of `X_s` over all basis states, from state evolution.
    pub empirical: f64,
    /// `Σ_{diagonal P} c_P² - G²` from the dense Heisenberg operator.
    pub analytic: f64,
    pub g: f64,
}

pub fn variance_identity_check(
    a: &PauliSum,
    h: &PauliSum,
    t: f64,
    basis: BulkBasis,
    opts: &AutocorrOptions,
) -> Result<VarianceCheck> {
    let (p, weight) = single_string(a)?;
    let l = p.num_sites();
    if l > 10 {
        return Err(Error::TooManySites {
            requested: l,
            limit: 10,
        });
    }
    let dim = 1usize << l;
    let indices: Vec<usize> = (0..dim).collect();
    let traces = basis_traces(a, h, &[t], basis, &indices, opts)?;
    let xs: Vec<f64> = traces.iter().map(|v| v[0]).collect();
    let mean = xs.iter().sum::<f64>() / dim as f64;
    let empirical = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / dim as f64;

    // M = A(t) A(0) with A(t) = U† A U, rotated into the product basis.
    let u = crate::engine::dense::hermitian_expm(&h.to_matrix()?, t);
    let am = a.to_matrix()?;
    let m = u.adjoint() * &am * &u * &am;
    let pb = ProductBasis::for_observable(&p, basis);
    let r = DMatrix::from_fn(dim, dim, |row, col| {
        pb.state(col).map(|s| s.amplitudes()[row]).unwrap_or_default()
    });
    let rotated = r.adjoint() * m * r;
    let mut d: Vec<f64> = (0..dim).map(|s| rotated[(s, s)].re).collect();
    // Walsh-Hadamard transform: c_P = 2^{-L} Σ_s (-1)^{|P & s|} d_s.
    let mut span = 1;
    while span < dim {
        for block in (0..dim).step_by(2 * span) {
            for i in block..block + span {
                let (x, y) = (d[i], d[i + span]);
                d[i] = x + y;
                d[i + span] = x - y;
            }
        }
        span *= 2;
    }
    let coeffs: Vec<f64> = d.iter().map(|v| v / dim as f64).collect();
    let g = coeffs[0];
    let analytic = coeffs.iter().map(|c| c * c).sum::<f64>() - g * g;
    let _ = weight;
    Ok(VarianceCheck {
        empirical,
        analytic,
        g,
    })
}
