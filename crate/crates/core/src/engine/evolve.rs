use num_complex::Complex64;

use super::expm::{propagate, propagate_many, CHEB_TOL, X_MANY};
use super::operator::PauliOperator;
use super::schedule::HamiltonianSchedule;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Step counts beyond this report [`Error::StepUnderflow`].
const MAX_STEPS: usize = 1 << 22;
/// Initial step length for time-dependent schedules.
const INITIAL_STEP: f64 = 0.25;

fn check_args(psi: &StateVector, num_sites: usize, span: f64, tol: f64) -> Result<()> {
    if psi.num_sites() != num_sites {
        return Err(Error::LengthMismatch {
            left: psi.num_sites(),
            right: num_sites,
        });
    }
    if !(span.is_finite() && span >= 0.0) {
        return Err(Error::InvalidArgument(format!("evolution span {span}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    Ok(())
}

/// `ψ ← exp(-iHt) ψ` for a static Hermitian `H`.
pub fn evolve_static(psi: &mut StateVector, h: &PauliSum, t: f64, tol: f64) -> Result<()> {
    check_args(psi, h.num_sites(), t, tol)?;
    if !h.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let op = PauliOperator::new(h)?;
    propagate(&op, psi.amplitudes_mut(), t, tol.min(CHEB_TOL));
    psi.renormalize_checked()
}

/// `ψ ← exp(-iHt) ψ` for an already compiled operator.
pub fn evolve_operator(psi: &mut StateVector, op: &PauliOperator, t: f64, tol: f64) -> Result<()> {
    check_args(psi, op.num_sites(), t, tol)?;
    propagate(op, psi.amplitudes_mut(), t, tol.min(CHEB_TOL));
    psi.renormalize_checked()
}

/// Largest `2^L × times` block held in memory by [`evolve_times`].
const MANY_BUDGET: usize = 1 << 23;

/// Calls `visit(k, ψ(t_k))` for sorted times `t_k ≥ 0`, with
/// `ψ(t) = exp(-iHt) ψ`. Nearby times share one Chebyshev recurrence.
pub fn evolve_times<F>(psi: &StateVector, op: &PauliOperator, times: &[f64], tol: f64, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &StateVector) -> Result<()>,
{
    let l = psi.num_sites();
    check_args(psi, op.num_sites(), 0.0, tol)?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be finite, non-negative and sorted".into()));
    }
    let r = op.radius().max(f64::MIN_POSITIVE);
    let per_block = (MANY_BUDGET >> l).max(1);
    let mut base = psi.clone();
    let mut now = 0.0;
    let mut k = 0;
    while k < times.len() {
        // Start the block at the first time, then add times within reach.
        propagate(op, base.amplitudes_mut(), times[k] - now, tol.min(CHEB_TOL));
        base.renormalize_checked()?;
        now = times[k];
        let mut end = k + 1;
        while end < times.len() && end - k < per_block && r * (times[end] - now) <= X_MANY {
            end += 1;
        }
        let offsets: Vec<f64> = times[k..end].iter().map(|t| t - now).collect();
        for (i, amps) in propagate_many(op, base.amplitudes(), &offsets, tol).into_iter().enumerate() {
            let mut s = StateVector::from_amplitudes(l, amps)?;
            s.renormalize_checked()?;
            visit(k + i, &s)?;
            if k + i + 1 == end {
                base = s;
            }
        }
        now = times[end - 1];
        k = end;
    }
    Ok(())
}

fn midpoint_steps(
    psi: &[Complex64],
    h: &HamiltonianSchedule,
    t0: f64,
    span: f64,
    steps: usize,
) -> Result<Vec<Complex64>> {
    let mut out = psi.to_vec();
    let dt = span / steps as f64;
    for k in 0..steps {
        let op = PauliOperator::new(&h.at(t0 + (k as f64 + 0.5) * dt)?)?;
        propagate(&op, &mut out, dt, CHEB_TOL);
    }
    Ok(out)
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `ψ(t1)` from `ψ(t0)` under `H(t)`.
///
/// Static schedules use a single Chebyshev propagation. Otherwise the step
/// count doubles and each level is combined with the previous one as
/// `(4ψ_2n - ψ_n)/3`. The result is accepted once two successive midpoint
/// solutions differ by less than `3 tol`, or two successive combinations by
/// less than `tol`.
pub fn evolve(
    psi: &mut StateVector,
    h: &HamiltonianSchedule,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<()> {
    let span = t1 - t0;
    check_args(psi, h.num_sites(), span, tol)?;
    if span == 0.0 {
        return Ok(());
    }
    if h.is_static() {
        return evolve_static(psi, &h.at(t0)?, span, tol);
    }
    let mut n = ((span / INITIAL_STEP).ceil() as usize).max(2);
    let mut coarse = midpoint_steps(psi.amplitudes(), h, t0, span, n)?;
    let mut last: Option<Vec<Complex64>> = None;
    loop {
        n *= 2;
        if n > MAX_STEPS {
            return Err(Error::StepUnderflow { tol, steps: n / 2 });
        }
        let fine = midpoint_steps(psi.amplitudes(), h, t0, span, n)?;
        let rich: Vec<Complex64> = fine.iter().zip(&coarse).map(|(f, c)| (f * 4.0 - c) / 3.0).collect();
        let done = distance(&fine, &coarse) < 3.0 * tol || last.as_ref().is_some_and(|r| distance(&rich, r) < tol);
        if done {
            psi.amplitudes_mut().copy_from_slice(&rich);
            return psi.renormalize_checked();
        }
        coarse = fine;
        last = Some(rich);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::dense;
    use crate::engine::schedule::{Coefficient, Profile};
    use crate::pauli::PauliString;
    use nalgebra::DVector;
    use std::sync::Arc;

    fn ps(s: &str) -> PauliString {
        PauliString::from_letters(s).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let dim = 1 << n;
        let mut v: Vec<Complex64> = (0..dim)
            .map(|k| {
                let a = crate::rng::draw_uniform(seed, 0, 2 * k as u64) - 0.5;
                let b = crate::rng::draw_uniform(seed, 0, 2 * k as u64 + 1) - 0.5;
                Complex64::new(a, b)
            })
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(n, v).unwrap()
    }

    #[test]
    fn chebyshev_matches_dense_exponential() {
        let h = PauliSum::from_real_terms(
            4,
            [
                (ps("XXII"), 1.0),
                (ps("IYYI"), -0.7),
                (ps("IIZZ"), 0.4),
                (ps("ZIIX"), 2.1),
                (ps("IIII"), 0.3),
                (ps("XZYI"), 0.9),
            ],
        )
        .unwrap();
        let psi0 = random_state(4, 3);
        for t in [0.01, 0.7, 13.0, 120.0] {
            let mut psi = psi0.clone();
            evolve_static(&mut psi, &h, t, 1e-12).unwrap();
            let u = dense::hermitian_expm(&h.to_matrix().unwrap(), t);
            let want = u * DVector::from_column_slice(psi0.amplitudes());
            let got = DVector::from_column_slice(psi.amplitudes());
            assert!((got - want).norm() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn shared_expansion_matches_dense_exponential() {
        let h = PauliSum::from_real_terms(
            4,
            [(ps("XXII"), 1.0), (ps("IYYI"), -0.7), (ps("ZIIX"), 2.1), (ps("IIII"), 0.3)],
        )
        .unwrap();
        let op = PauliOperator::new(&h).unwrap();
        let psi0 = random_state(4, 5);
        // Spans several blocks and includes repeated times.
        let times = [0.0, 0.0, 0.3, 5.0, 5.0, 90.0, 200.0, 201.5, 400.0];
        let mut seen = 0;
        evolve_times(&psi0, &op, &times, 1e-12, |k, psi| {
            let u = dense::hermitian_expm(&h.to_matrix().unwrap(), times[k]);
            let want = u * DVector::from_column_slice(psi0.amplitudes());
            let got = DVector::from_column_slice(psi.amplitudes());
            assert!((got - want).norm() < 1e-10, "t = {}", times[k]);
            assert_eq!(k, seen);
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, times.len());
        assert!(evolve_times(&psi0, &op, &[1.0, 0.5], 1e-10, |_, _| Ok(())).is_err());
    }

    #[test]
    fn time_dependent_converges_to_fine_reference() {
        let mut s = HamiltonianSchedule::new(2);
        let f: Profile = Arc::new(|t: f64| (1.3 * t).sin());
        s.push(ps("XI"), 1.0, Coefficient::Profile(f)).unwrap();
        s.push(ps("ZZ"), 0.8, Coefficient::Constant).unwrap();
        let g: Profile = Arc::new(|t: f64| t);
        s.push(ps("IY"), 0.5, Coefficient::Profile(g)).unwrap();
        let psi0 = random_state(2, 9);
        let mut psi = psi0.clone();
        evolve(&mut psi, &s, 0.0, 2.0, 1e-10).unwrap();
        // Reference: many dense midpoint steps with Richardson on top.
        let reference = |n: usize| {
            let mut v = DVector::from_column_slice(psi0.amplitudes());
            let dt = 2.0 / n as f64;
            for k in 0..n {
                let hm = s.at((k as f64 + 0.5) * dt).unwrap().to_matrix().unwrap();
                v = dense::hermitian_expm(&hm, dt) * v;
            }
            v
        };
        let (a, b) = (reference(4000), reference(8000));
        let want = (b * Complex64::new(4.0, 0.0) - a) / Complex64::new(3.0, 0.0);
        let got = DVector::from_column_slice(psi.amplitudes());
        assert!((got - want).norm() < 1e-9);
    }

    #[test]
    fn bad_arguments() {
        let h = PauliSum::from_real_terms(1, [(ps("Z"), 1.0)]).unwrap();
        let mut psi = StateVector::zero(1).unwrap();
        assert!(evolve_static(&mut psi, &h, -1.0, 1e-8).is_err());
        assert!(evolve_static(&mut psi, &h, 1.0, 0.0).is_err());
        let mut wrong = StateVector::zero(2).unwrap();
        assert!(evolve_static(&mut wrong, &h, 1.0, 1e-8).is_err());
    }
}
