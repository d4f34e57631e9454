use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::par;
use crate::pauli::PauliSum;

/// Registers at least this large are split across threads.
const PARALLEL_MIN_DIM: usize = 1 << 14;
const CHUNK: usize = 1 << 12;
const LANCZOS_STEPS: usize = 48;

/// Terms sharing one x mask: `P|b⟩ = i^{#Y} (-1)^{|z & b|} |b ^ x⟩`.
#[derive(Clone, Debug)]
struct Group {
    x: usize,
    z: Vec<usize>,
    coef: Vec<Complex64>,
}

/// A Pauli sum compiled for fast matrix-vector products.
#[derive(Clone, Debug)]
pub struct PauliOperator {
    num_sites: usize,
    shift: Complex64,
    groups: Vec<Group>,
    bound: f64,
    /// Chebyshev window `[shift + center - radius, shift + center + radius]`.
    center: f64,
    radius: f64,
    parallel: bool,
}

impl PauliOperator {
    pub fn new(sum: &PauliSum) -> Result<Self> {
        super::check_sites(sum.num_sites())?;
        let mut shift = Complex64::new(0.0, 0.0);
        let mut groups: Vec<Group> = Vec::new();
        let mut bound = 0.0;
        for (p, c) in sum.terms() {
            if p.is_identity() {
                shift += c;
                continue;
            }
            let (x, z) = p.masks()?;
            let (x, z) = (x as usize, z as usize);
            let c = c * crate::pauli::Phase::from_exponent(p.y_count()).to_complex();
            bound += c.norm();
            match groups.iter_mut().find(|g| g.x == x) {
                Some(g) => {
                    g.z.push(z);
                    g.coef.push(c);
                }
                None => groups.push(Group {
                    x,
                    z: vec![z],
                    coef: vec![c],
                }),
            }
        }
        Ok(PauliOperator {
            num_sites: sum.num_sites(),
            shift,
            groups,
            bound,
            center: 0.0,
            radius: bound,
            parallel: cfg!(feature = "parallel"),
        })
    }

    /// Force the sequential kernel (used for benchmarking both paths).
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel && cfg!(feature = "parallel");
        self
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// Coefficient of the identity term.
    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    /// Sum of absolute non-identity coefficients; bounds `‖H - shift‖`.
    pub fn spectral_bound(&self) -> f64 {
        self.bound
    }

    /// Narrow the Chebyshev window to a Lanczos estimate of the spectrum of a
    /// Hermitian operator, padded by the Ritz residuals and 2 % of its width.
    /// Pays off for long evolutions; the window never exceeds the plain bound.
    pub fn with_spectrum_estimate(mut self) -> Self {
        let dim = 1usize << self.num_sites;
        let steps = dim.min(LANCZOS_STEPS);
        if dim < 64 || self.bound == 0.0 {
            return self;
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| {
                state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
                Complex64::new((z >> 11) as f64 / (1u64 << 53) as f64 - 0.5, 0.0)
            })
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        let mut prev = vec![zero; dim];
        let mut w = vec![zero; dim];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut b_prev = 0.0;
        for _ in 0..steps {
            self.apply_traceless(&v, &mut w, 1.0);
            let a: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
            for i in 0..dim {
                w[i] -= v[i] * a + prev[i] * b_prev;
            }
            let b = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            alpha.push(a);
            beta.push(b);
            if b < 1e-12 * self.bound {
                break;
            }
            std::mem::swap(&mut prev, &mut v);
            for i in 0..dim {
                v[i] = w[i] / b;
            }
            b_prev = b;
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let last = beta[m - 1];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..m {
            let theta = eig.eigenvalues[k];
            let res = (last * eig.eigenvectors[(m - 1, k)]).abs();
            lo = lo.min(theta - res);
            hi = hi.max(theta + res);
        }
        let pad = 0.02 * (hi - lo);
        let radius = 0.5 * (hi - lo) + pad;
        if radius.is_finite() && radius < self.bound {
            self.center = 0.5 * (hi + lo);
            self.radius = radius;
        }
        self
    }

    /// Half-width of the Chebyshev window.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Midpoint of the Chebyshev window.
    pub fn offset(&self) -> Complex64 {
        self.shift + self.center
    }

    /// `out = factor * (H - offset) ψ`.
    pub(crate) fn apply_centered(&self, psi: &[Complex64], out: &mut [Complex64], factor: f64) {
        self.apply_traceless(psi, out, factor);
        if self.center != 0.0 {
            let c = factor * self.center;
            for (o, p) in out.iter_mut().zip(psi) {
                *o -= p * c;
            }
        }
    }

    /// `out = factor * (H - shift) ψ`.
    pub fn apply_traceless(&self, psi: &[Complex64], out: &mut [Complex64], factor: f64) {
        debug_assert_eq!(psi.len(), out.len());
        let parallel = self.parallel && psi.len() >= PARALLEL_MIN_DIM;
        par::for_each_chunk_mut(out, CHUNK, parallel, |offset, chunk| {
            #[cfg(target_arch = "x86_64")]
            if std::arch::is_x86_feature_detected!("popcnt") {
                // SAFETY: the feature was detected at runtime.
                unsafe { self.kernel_popcnt(psi, offset, chunk, factor) };
                return;
            }
            self.kernel(psi, offset, chunk, factor);
        });
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "popcnt")]
    unsafe fn kernel_popcnt(&self, psi: &[Complex64], offset: usize, chunk: &mut [Complex64], factor: f64) {
        self.kernel(psi, offset, chunk, factor)
    }

    #[inline(always)]
    fn kernel(&self, psi: &[Complex64], offset: usize, chunk: &mut [Complex64], factor: f64) {
        chunk.fill(Complex64::new(0.0, 0.0));
        for g in &self.groups {
            if let [z] = g.z[..] {
                let c = g.coef[0] * factor;
                let real = c.im == 0.0;
                let src_block = &psi[(offset ^ g.x) & !(chunk.len() - 1)..][..chunk.len()];
                let low = g.x & (chunk.len() - 1);
                if real {
                    for (k, o) in chunk.iter_mut().enumerate() {
                        let src = (offset + k) ^ g.x;
                        let w = c.re - 2.0 * c.re * ((z & src).count_ones() & 1) as f64;
                        *o += src_block[k ^ low] * w;
                    }
                } else {
                    for (k, o) in chunk.iter_mut().enumerate() {
                        let src = (offset + k) ^ g.x;
                        let sign = 1.0 - 2.0 * ((z & src).count_ones() & 1) as f64;
                        *o += c * (src_block[k ^ low] * sign);
                    }
                }
                continue;
            }
            for (k, o) in chunk.iter_mut().enumerate() {
                let src = (offset + k) ^ g.x;
                let mut w = Complex64::new(0.0, 0.0);
                for (z, c) in g.z.iter().zip(&g.coef) {
                    if (z & src).count_ones() & 1 == 0 {
                        w += c;
                    } else {
                        w -= c;
                    }
                }
                *o += w * factor * psi[src];
            }
        }
    }

    /// `out = H ψ`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        self.apply_traceless(psi, out, 1.0);
        for (o, p) in out.iter_mut().zip(psi) {
            *o += self.shift * p;
        }
    }

    /// `⟨ψ|H|ψ⟩` (complex, for Hermiticity diagnostics).
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply(psi, &mut out);
        psi.iter().zip(&out).map(|(a, b)| a.conj() * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliString};
    use nalgebra::DVector;

    #[test]
    fn matvec_matches_dense() {
        let terms = [("XYZI", 0.3), ("IIII", -0.7), ("ZZII", 1.1), ("YIYX", 0.25), ("XIIX", -0.5)];
        let h = PauliSum::from_real_terms(
            4,
            terms.iter().map(|(s, c)| (PauliString::from_letters(s).unwrap(), *c)),
        )
        .unwrap();
        let psi: Vec<Complex64> = (0..16)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let op = PauliOperator::new(&h).unwrap();
        let mut out = vec![Complex64::new(0.0, 0.0); 16];
        op.apply(&psi, &mut out);
        let want = h.to_matrix().unwrap() * DVector::from_column_slice(&psi);
        assert!((DVector::from_column_slice(&out) - want).norm() < 1e-13);
        assert!((op.spectral_bound() - 2.15).abs() < 1e-15);
    }

    #[test]
    fn lanczos_window_covers_spectrum() {
        let l = 8;
        let mut h = PauliSum::new(l);
        for j in 0..l - 1 {
            h.add_term(PauliString::from_sparse(l, &[(j, Pauli::X), (j + 1, Pauli::X)]).unwrap(), 1.0).unwrap();
            h.add_term(PauliString::from_sparse(l, &[(j, Pauli::Z)]).unwrap(), 0.3 + 0.1 * j as f64).unwrap();
        }
        for j in 1..l - 1 {
            let s = PauliString::from_sparse(l, &[(j - 1, Pauli::X), (j, Pauli::Z), (j + 1, Pauli::Y)]).unwrap();
            h.add_term(s, -0.4).unwrap();
        }
        h.add_term(PauliString::identity(l), 2.5).unwrap();
        let op = PauliOperator::new(&h).unwrap().with_spectrum_estimate();
        assert!(op.radius() < op.spectral_bound());
        let e = h.to_matrix().unwrap().symmetric_eigenvalues();
        let c = op.offset().re;
        assert!(e.max() <= c + op.radius() && e.min() >= c - op.radius());
        assert!(op.radius() < 0.6 * (e.max() - e.min()));
    }
}
