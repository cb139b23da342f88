//! Brute-force closest product state, with no symmetry assumed.
//!
//! Each start sweeps over the qubits and replaces one factor at a time by
//! its exact optimum with the others held fixed: the normalized contraction
//! of the target against every other factor. The overlap magnitude never
//! decreases along a run.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::qstate::{superpose_dicke, FVector, ProductQubit, QStateError, StateVector};
use crate::solver::{multistart_solve, SolveError};

pub const MAX_ORACLE_QUBITS: usize = 10;
pub const DEFAULT_ORACLE_STARTS: usize = 32;
pub const MAX_SWEEPS: usize = 500;

/// Sweeps whose overlap gain stays below this count towards convergence.
pub const GAIN_TOL: f64 = 1e-13;

/// Fubini-Study angle per qubit below which two optima are the same.
pub const OPTIMUM_ANGLE_TOL: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{q} qubits exceeds the oracle limit of {MAX_ORACLE_QUBITS}")]
    TooLarge { q: usize },
    #[error("target norm {0} is not 1")]
    NotNormalized(f64),
    #[error("n_starts must be at least 1")]
    NoStarts,
    #[error(transparent)]
    State(#[from] QStateError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub g_max: f64,
    pub d2_unnorm: f64,
    pub d2_norm: f64,
    pub best_product: Vec<ProductQubit>,
    pub n_distinct_optima: usize,
}

/// One alternating-ascent run.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentRun {
    pub factors: Vec<[Complex64; 2]>,
    pub overlap: f64,
    pub sweeps: usize,
    /// Overlap magnitude after every single-qubit update.
    pub history: Vec<f64>,
}

/// Contracts `psi` with `conj(factors[j])` for every qubit `j != keep`,
/// leaving the two-component vector on qubit `keep`.
fn contract_except(psi: &[Complex64], factors: &[[Complex64; 2]], keep: usize) -> [Complex64; 2] {
    let q = factors.len();
    let mut buf = psi.to_vec();
    // Qubit j sits at bit (q - 1 - j); contract from the least significant end
    // so the remaining qubits keep their relative order.
    let mut kept_below = 0usize;
    for j in (0..q).rev() {
        if j == keep {
            kept_below += 1;
            continue;
        }
        let low = 1usize << kept_below;
        let [c0, c1] = [factors[j][0].conj(), factors[j][1].conj()];
        let half = buf.len() / 2;
        let mut next = Vec::with_capacity(half);
        for hi in 0..half / low {
            for lo in 0..low {
                let i0 = (hi * 2) * low + lo;
                next.push(c0 * buf[i0] + c1 * buf[i0 + low]);
            }
        }
        buf = next;
    }
    [buf[0], buf[1]]
}

/// Alternating ascent from the given factors.
pub fn ascend(psi: &StateVector, mut factors: Vec<[Complex64; 2]>) -> AscentRun {
    let amps = psi.amplitudes();
    let q = psi.q();
    let mut history = Vec::new();
    let mut overlap = 0.0f64;
    let mut quiet = 0;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let before = overlap;
        for k in 0..q {
            let v = contract_except(amps, &factors, k);
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if n > 0.0 {
                factors[k] = [v[0] / n, v[1] / n];
            }
            // With factor k at its optimum the overlap equals |v|.
            overlap = n;
            history.push(n);
        }
        if overlap - before < GAIN_TOL {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    AscentRun {
        factors,
        overlap,
        sweeps,
        history,
    }
}

fn random_factors(q: usize, seed: u64, index: u64) -> Vec<[Complex64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..q)
        .map(|_| {
            ProductQubit::new(rng.random_range(0.0..PI), rng.random_range(0.0..TAU)).amplitudes()
        })
        .collect()
}

fn same_product(a: &[[Complex64; 2]], b: &[[Complex64; 2]]) -> bool {
    a.iter().zip(b).all(|(x, y)| {
        let fid = (x[0].conj() * y[0] + x[1].conj() * y[1]).norm().min(1.0);
        fid.acos() < OPTIMUM_ANGLE_TOL
    })
}

pub fn oracle_min_distance(
    psi: &StateVector,
    n_starts: usize,
    seed: u64,
) -> Result<OracleResult, OracleError> {
    let q = psi.q();
    if q > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { q });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(OracleError::NotNormalized(norm));
    }
    if n_starts == 0 {
        return Err(OracleError::NoStarts);
    }
    let runs: Vec<AscentRun> = (0..n_starts as u64)
        .into_par_iter()
        .map(|i| ascend(psi, random_factors(q, seed, i)))
        .collect();

    let best =
        runs.iter().enumerate().fold(
            0usize,
            |b, (i, run)| if run.overlap > runs[b].overlap { i } else { b },
        );
    let g_max = runs[best].overlap.min(1.0);

    let mut optima: Vec<&[[Complex64; 2]]> = Vec::new();
    for run in runs.iter().filter(|r| r.overlap >= g_max - 1e-9) {
        if !optima.iter().any(|o| same_product(o, &run.factors)) {
            optima.push(&run.factors);
        }
    }

    Ok(OracleResult {
        g_max,
        d2_unnorm: 1.0 - g_max * g_max,
        d2_norm: 2.0 * (1.0 - g_max),
        best_product: runs[best]
            .factors
            .iter()
            .map(|v| ProductQubit::from_vector(*v))
            .collect(),
        n_distinct_optima: optima.len(),
    })
}

/// `|d2_norm(symmetric solver) - d2_norm(oracle)|` for one f-vector.
pub fn symmetric_gap(f: &FVector, n_starts: usize, seed: u64) -> Result<f64, OracleError> {
    if f.q() > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { q: f.q() });
    }
    let solved = multistart_solve(f, n_starts, seed)?;
    let psi = superpose_dicke(f)?;
    let oracle = oracle_min_distance(&psi, n_starts, seed)?;
    Ok((solved.winner.distances().d2_norm - oracle.d2_norm).abs())
}
