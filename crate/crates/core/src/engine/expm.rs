use num_complex::Complex64;

use super::operator::PauliOperator;

/// Largest `‖H‖ dt` handled by one Chebyshev expansion.
const X_MAX: f64 = 40.0;
/// Truncation target for Chebyshev propagation; far below any user tolerance
/// so that norm drift never reaches the renormalization limit.
pub(crate) const CHEB_TOL: f64 = 1e-13;

/// `J_0(x) ..= J_n(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 Σ J_2k = 1`.
pub(crate) fn bessel_sequence(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = n.max(x.ceil() as usize) + 1;
    let mut start = top + (40.0 * top as f64).sqrt() as usize + 20;
    start += start % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-30;
    for k in (1..=start).rev() {
        vals[k - 1] = (2.0 * k as f64 / x) * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            vals[k - 1..].iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}

/// Expansion coefficients of `exp(∓i x Ĥ)` truncated once the Bessel tail
/// drops below `tol`.
fn coefficients(x: f64, tol: f64, backward: bool) -> Vec<Complex64> {
    let nmax = (x + 10.0 * x.cbrt() + 30.0) as usize;
    let j = bessel_sequence(x, nmax);
    let mut tail = 0.0;
    let mut order = nmax;
    for k in (1..=nmax).rev() {
        tail += 2.0 * j[k].abs();
        if tail > tol {
            order = k;
            break;
        }
    }
    // exp(-i x Ĥ) = Σ (2 - δ_k0) (-i)^k J_k(x) T_k(Ĥ).
    let sign = if backward { -1.0 } else { 1.0 };
    (0..=order)
        .map(|k| {
            let m = if k == 0 { 1.0 } else { 2.0 };
            let ph = match k % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -sign),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, sign),
            };
            ph * (m * j[k])
        })
        .collect()
}

/// Largest `‖H‖ t` spanned by one shared expansion in [`propagate_many`].
pub(crate) const X_MANY: f64 = 400.0;

/// `exp(-i H t_k) ψ` for every offset `t_k ≥ 0` from a single Chebyshev
/// recurrence. Offsets must satisfy `radius · t_k ≤ X_MANY`.
pub(crate) fn propagate_many(op: &PauliOperator, psi: &[Complex64], offsets: &[f64], tol: f64) -> Vec<Vec<Complex64>> {
    let r = op.radius();
    let shift = op.offset();
    let dim = psi.len();
    let zero = Complex64::new(0.0, 0.0);
    let coefs: Vec<Vec<Complex64>> = offsets
        .iter()
        .map(|&t| {
            debug_assert!(t >= 0.0 && r * t <= X_MANY * (1.0 + 1e-12));
            if r == 0.0 || t == 0.0 {
                vec![Complex64::new(1.0, 0.0)]
            } else {
                coefficients(r * t, tol.min(CHEB_TOL), false)
            }
        })
        .collect();
    let order = coefs.iter().map(|c| c.len() - 1).max().unwrap_or(0);
    let mut acc: Vec<Vec<Complex64>> = coefs.iter().map(|c| psi.iter().map(|p| c[0] * p).collect()).collect();
    if order > 0 {
        let mut prev = psi.to_vec();
        let mut cur = vec![zero; dim];
        let mut next = vec![zero; dim];
        op.apply_centered(&prev, &mut cur, 1.0 / r);
        for k in 1..=order {
            if k > 1 {
                op.apply_centered(&cur, &mut next, 2.0 / r);
                for i in 0..dim {
                    next[i] -= prev[i];
                }
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
            for (a, c) in acc.iter_mut().zip(&coefs) {
                if let Some(&ck) = c.get(k) {
                    for (x, v) in a.iter_mut().zip(&cur) {
                        *x += ck * v;
                    }
                }
            }
        }
    }
    for (a, &t) in acc.iter_mut().zip(offsets) {
        let global = (Complex64::new(0.0, -t) * shift).exp();
        a.iter_mut().for_each(|x| *x *= global);
    }
    acc
}

/// `ψ ← exp(-i H dt) ψ`. Returns the number of matrix-vector products.
pub(crate) fn propagate(op: &PauliOperator, psi: &mut [Complex64], dt: f64, tol: f64) -> usize {
    if dt == 0.0 {
        return 0;
    }
    let r = op.radius();
    let shift = op.offset();
    if r == 0.0 {
        let ph = (Complex64::new(0.0, -dt) * shift).exp();
        psi.iter_mut().for_each(|a| *a *= ph);
        return 0;
    }
    let nsub = ((r * dt.abs()) / X_MAX).ceil().max(1.0) as usize;
    let h = dt / nsub as f64;
    let x = r * h.abs();
    let tol_sub = tol.min(CHEB_TOL) / nsub as f64;
    let coef = coefficients(x, tol_sub, h < 0.0);
    let global = (Complex64::new(0.0, -h) * shift).exp();
    let dim = psi.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut prev = vec![zero; dim];
    let mut cur = vec![zero; dim];
    let mut next = vec![zero; dim];
    let mut acc = vec![zero; dim];
    let mut matvecs = 0;
    for _ in 0..nsub {
        prev.copy_from_slice(psi);
        op.apply_centered(&prev, &mut cur, 1.0 / r);
        matvecs += 1;
        for i in 0..dim {
            acc[i] = coef[0] * prev[i] + coef[1] * cur[i];
        }
        for c in coef.iter().skip(2) {
            op.apply_centered(&cur, &mut next, 2.0 / r);
            matvecs += 1;
            for i in 0..dim {
                next[i] -= prev[i];
                acc[i] += c * next[i];
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        for i in 0..dim {
            psi[i] = acc[i] * global;
        }
    }
    matvecs
}
