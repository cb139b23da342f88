//! Closed forms for the W-like family that is symmetric under permutations
//! of the odd-position qubits and, separately, of the even-position qubits.
//!
//! The target is `f (|10..0> + |0010..0> + ...) + m (|010..0> + ...)`, with
//! amplitude `f` on every odd position (1-based) and `m` on every even one,
//! normalized by `(q/2)(f^2 + m^2) = 1`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::qstate::StateVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvenOddError {
    #[error("q = {0} must be even and at least 4")]
    BadQubitCount(usize),
    #[error("(q/2)(f^2 + m^2) = {0}, expected 1")]
    NotNormalized(f64),
    #[error("f = m = 0")]
    Degenerate,
    #[error("need at least 3 sweep points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenOddSpec {
    q: usize,
    f: f64,
    m: f64,
}

impl EvenOddSpec {
    pub fn new(q: usize, f: f64, m: f64) -> Result<Self, EvenOddError> {
        check_q(q)?;
        let n = q as f64 / 2.0 * (f * f + m * m);
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(EvenOddError::NotNormalized(n));
        }
        Ok(Self { q, f, m })
    }

    /// Spec with the given odd amplitude and the non-negative even
    /// amplitude fixed by normalization.
    pub fn from_odd_amplitude(q: usize, f: f64) -> Result<Self, EvenOddError> {
        check_q(q)?;
        let m2 = 2.0 / q as f64 - f * f;
        if m2 < -1e-15 {
            return Err(EvenOddError::NotNormalized(q as f64 / 2.0 * f * f));
        }
        Self::new(q, f, m2.max(0.0).sqrt())
    }

    /// The W state itself: `f = m = 1/sqrt(q)`.
    pub fn w_point(q: usize) -> Result<Self, EvenOddError> {
        let a = 1.0 / (q as f64).sqrt();
        Self::new(q, a, a)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Dense amplitudes of the target; qubit 0 (the first, odd position)
    /// is the most significant bit.
    pub fn state(&self) -> StateVector {
        let q = self.q;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        for k in 0..q {
            let a = if k % 2 == 0 { self.f } else { self.m };
            amps[1 << (q - 1 - k)] = Complex64::new(a, 0.0);
        }
        StateVector::from_amplitudes(q, amps).expect("q <= MAX_DENSE_QUBITS checked by caller")
    }
}

fn check_q(q: usize) -> Result<(), EvenOddError> {
    if q < 4 || !q.is_multiple_of(2) {
        return Err(EvenOddError::BadQubitCount(q));
    }
    Ok(())
}

/// Squared amplitude ratio of the odd-position factor.
///
/// Evaluated in a rationalized form in which the `f^2` prefactor of the
/// numerator cancels the one in the denominator, so `f -> 0` (limit 0) and
/// `m -> 0` (limit `2/(q-2)`) need no special casing. The even-position
/// ratio is `ra_sq_closed(m, f, q)`.
pub fn ra_sq_closed(f: f64, m: f64, q: usize) -> Result<f64, EvenOddError> {
    check_q(q)?;
    if f == 0.0 && m == 0.0 {
        return Err(EvenOddError::Degenerate);
    }
    let qf = q as f64;
    let (f2, m2) = (f * f, m * m);
    let k = (qf - 8.0) * qf + 8.0;
    let root = (f2 * f2 * qf * qf + 2.0 * f2 * m2 * k + m2 * m2 * qf * qf).sqrt();
    let bracket = qf * (f2 * qf * qf + 2.0 * m2 * k) / (root + m2 * qf) - k;
    Ok((bracket / (4.0 * (qf - 2.0) * (qf - 1.0))).max(0.0))
}

/// The two bracketed stationarity conditions in `r_a`, `r_b`.
pub fn stationarity_residuals(f: f64, m: f64, q: usize, ra: f64, rb: f64) -> [f64; 2] {
    let qf = q as f64;
    let sgn = (f * m).signum();
    let fm = f * m;
    [
        2.0 * fm - m * m * qf * ra * rb * sgn - (qf - 2.0) * fm * ra * ra,
        2.0 * fm - f * f * qf * ra * rb * sgn - (qf - 2.0) * fm * rb * rb,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenOddResult {
    pub ra_sq: f64,
    pub rb_sq: f64,
    /// `cos(theta_a - theta_b)`, equal to `sgn(f m)`.
    pub cos_relation: f64,
    pub d2_norm: f64,
}

pub fn evenodd_distance(spec: &EvenOddSpec) -> Result<EvenOddResult, EvenOddError> {
    let (q, f, m) = (spec.q, spec.f, spec.m);
    let ra_sq = ra_sq_closed(f, m, q)?;
    let rb_sq = ra_sq_closed(m, f, q)?;
    let (ra, rb) = (ra_sq.sqrt(), rb_sq.sqrt());
    let qf = q as f64;
    let overlap = qf
        * (1.0 / (1.0 + ra_sq)).powf(qf / 4.0)
        * (1.0 / (1.0 + rb_sq)).powf(qf / 4.0)
        * (2.0 * (f * m).abs() * ra * rb + f * f * ra_sq + m * m * rb_sq).sqrt();
    let cos_relation = if f * m < 0.0 { -1.0 } else { 1.0 };
    Ok(EvenOddResult {
        ra_sq,
        rb_sq,
        cos_relation,
        d2_norm: 2.0 - overlap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenOddRow {
    pub f: f64,
    pub m: f64,
    pub d2_norm: f64,
    pub is_w_point: bool,
}

/// `n_points` odd amplitudes evenly spaced over `[0, sqrt(2/q)]` plus the
/// `f = m` point, sorted by `f`.
pub fn evenodd_sweep(q: usize, n_points: usize) -> Result<Vec<EvenOddRow>, EvenOddError> {
    check_q(q)?;
    if n_points < 3 {
        return Err(EvenOddError::TooFewPoints(n_points));
    }
    let top = (2.0 / q as f64).sqrt();
    let mut specs: Vec<(EvenOddSpec, bool)> = (0..n_points)
        .map(|i| {
            let f = if i + 1 == n_points {
                top
            } else {
                top * i as f64 / (n_points - 1) as f64
            };
            EvenOddSpec::from_odd_amplitude(q, f).map(|s| (s, false))
        })
        .collect::<Result<_, _>>()?;
    specs.push((EvenOddSpec::w_point(q)?, true));
    specs.sort_by(|a, b| a.0.f.total_cmp(&b.0.f));
    specs
        .par_iter()
        .map(|(spec, w)| {
            evenodd_distance(spec).map(|res| EvenOddRow {
                f: spec.f,
                m: spec.m,
                d2_norm: res.d2_norm,
                is_w_point: *w,
            })
        })
        .collect()
}
