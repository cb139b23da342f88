//! Target states, product states and overlaps.
//!
//! Basis indices follow the bit-string order `i j k ...` with qubit 0 as the
//! most significant bit, so `|0101>` on four qubits is index 5.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Largest qubit count for which a dense amplitude vector is materialized.
pub const MAX_DENSE_QUBITS: usize = 20;

/// Tolerance on the unit norm of constructed coefficient vectors.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QStateError {
    #[error("coefficient vector is identically zero")]
    AllZero,
    #[error("expected {expected} coefficients, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("coefficient vector contains NaN or infinity")]
    NonFinite,
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("excitation number {p} outside [0, {q}]")]
    OutOfRange { q: usize, p: usize },
    #[error("states live on {left} and {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{q} qubits exceeds the dense limit of {limit}")]
    TooLarge { q: usize, limit: usize },
}

/// Binomial coefficient as a float; exact for every q used here.
pub fn binomial(q: usize, p: usize) -> f64 {
    num_integer::binomial(q as u64, p as u64) as f64
}

/// Real Dicke-basis coefficients `f_0..f_q` of a normalized symmetric target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FVector {
    q: usize,
    coeffs: Vec<f64>,
}

impl FVector {
    /// Scales `raw` to unit Euclidean norm.
    pub fn new(q: usize, raw: &[f64]) -> Result<Self, QStateError> {
        if q < 2 {
            return Err(QStateError::TooFewQubits(q));
        }
        if raw.len() != q + 1 {
            return Err(QStateError::BadLength {
                expected: q + 1,
                got: raw.len(),
            });
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(QStateError::NonFinite);
        }
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QStateError::AllZero);
        }
        Ok(Self {
            q,
            coeffs: raw.iter().map(|x| x / norm).collect(),
        })
    }

    /// Builds the target from coefficients given with the combinatoric
    /// factors already absorbed, i.e. `raw[p]` is proportional to
    /// `sqrt(C(q,p)) f_p`. The result is normalized as a state.
    pub fn from_weighted(q: usize, raw: &[f64]) -> Result<Self, QStateError> {
        if raw.len() != q + 1 {
            return Err(QStateError::BadLength {
                expected: q + 1,
                got: raw.len(),
            });
        }
        let bare: Vec<f64> = raw
            .iter()
            .enumerate()
            .map(|(p, x)| x / binomial(q, p).sqrt())
            .collect();
        Self::new(q, &bare)
    }

    /// Single Dicke component `|D_p>`.
    pub fn dicke(q: usize, p: usize) -> Result<Self, QStateError> {
        if p > q {
            return Err(QStateError::OutOfRange { q, p });
        }
        let mut raw = vec![0.0; q + 1];
        raw[p] = 1.0;
        Self::new(q, &raw)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn first(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn last(&self) -> f64 {
        self.coeffs[self.q]
    }

    pub fn weighted(&self) -> WeightedFVector {
        weight_fvector(self)
    }

    pub fn stats(&self) -> FStats {
        fvector_stats(self)
    }

    /// Number of entries that are not exactly zero.
    pub fn support(&self) -> usize {
        self.coeffs.iter().filter(|x| **x != 0.0).count()
    }
}

/// Coefficients with the Dicke combinatorics absorbed: `sqrt(C(q,p)) f_p`.
/// This is what the g-functions consume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedFVector {
    q: usize,
    weighted: Vec<f64>,
}

impl WeightedFVector {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn values(&self) -> &[f64] {
        &self.weighted
    }

    /// Inverse of the weighting, recovering the bare coefficients.
    pub fn unweighted(&self) -> Vec<f64> {
        self.weighted
            .iter()
            .enumerate()
            .map(|(p, w)| w / binomial(self.q, p).sqrt())
            .collect()
    }
}

pub fn make_fvector(q: usize, raw: &[f64]) -> Result<FVector, QStateError> {
    FVector::new(q, raw)
}

pub fn weight_fvector(f: &FVector) -> WeightedFVector {
    let q = f.q;
    WeightedFVector {
        q,
        weighted: f
            .coeffs
            .iter()
            .enumerate()
            .map(|(p, x)| binomial(q, p).sqrt() * x)
            .collect(),
    }
}

/// Mean and spread of an f-vector.
///
/// The mean divides by `q + 1` while the spread divides by `q`; neither the
/// population nor the sample variance, but the estimator used for the
/// entanglement-versus-spread study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FStats {
    pub mean: f64,
    pub variance: f64,
}

pub fn fvector_stats(f: &FVector) -> FStats {
    let q = f.q as f64;
    let mean = f.coeffs.iter().sum::<f64>() / (q + 1.0);
    let variance = f.coeffs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / q;
    FStats { mean, variance }
}

/// Dense amplitude vector over `2^q` basis states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    q: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(q: usize, amplitudes: Vec<Complex64>) -> Result<Self, QStateError> {
        if q > MAX_DENSE_QUBITS {
            return Err(QStateError::TooLarge {
                q,
                limit: MAX_DENSE_QUBITS,
            });
        }
        if amplitudes.len() != 1 << q {
            return Err(QStateError::BadLength {
                expected: 1 << q,
                got: amplitudes.len(),
            });
        }
        Ok(Self { q, amplitudes })
    }

    /// Normalized superposition of computational basis states.
    pub fn from_basis_terms(q: usize, terms: &[(usize, f64)]) -> Result<Self, QStateError> {
        if q > MAX_DENSE_QUBITS {
            return Err(QStateError::TooLarge {
                q,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << q];
        for &(index, c) in terms {
            if index >= amps.len() {
                return Err(QStateError::BadLength {
                    expected: amps.len(),
                    got: index + 1,
                });
            }
            amps[index] += c;
        }
        let mut s = Self::from_amplitudes(q, amps)?;
        let n = s.norm();
        if n == 0.0 {
            return Err(QStateError::AllZero);
        }
        s.scale(Complex64::new(1.0 / n, 0.0));
        Ok(s)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amplitudes {
            *a *= c;
        }
    }
}

/// Single-qubit state `(cos(alpha/2), e^{i beta} sin(alpha/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductQubit {
    pub alpha: f64,
    pub beta: f64,
}

impl ProductQubit {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.beta)]
    }

    /// Recovers the angles of a nonzero two-component vector, discarding
    /// its norm and overall phase.
    pub fn from_vector(v: [Complex64; 2]) -> Self {
        let (m0, m1) = (v[0].norm(), v[1].norm());
        let alpha = 2.0 * m1.atan2(m0);
        let beta = if m0 == 0.0 || m1 == 0.0 {
            0.0
        } else {
            (v[1].arg() - v[0].arg()).rem_euclid(std::f64::consts::TAU)
        };
        Self { alpha, beta }
    }
}

pub fn dicke_state(q: usize, p: usize) -> Result<StateVector, QStateError> {
    if p > q {
        return Err(QStateError::OutOfRange { q, p });
    }
    if q > MAX_DENSE_QUBITS {
        return Err(QStateError::TooLarge {
            q,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let amp = 1.0 / binomial(q, p).sqrt();
    let amplitudes = (0..1usize << q)
        .map(|i| {
            if i.count_ones() as usize == p {
                Complex64::new(amp, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(StateVector { q, amplitudes })
}

/// `sum_p f_p |D_p>`, filled directly from the popcount of each index.
pub fn superpose_dicke(f: &FVector) -> Result<StateVector, QStateError> {
    let q = f.q;
    if q > MAX_DENSE_QUBITS {
        return Err(QStateError::TooLarge {
            q,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let per_sector: Vec<f64> = (0..=q)
        .map(|p| f.coeffs[p] / binomial(q, p).sqrt())
        .collect();
    let amplitudes = (0..1usize << q)
        .map(|i| Complex64::new(per_sector[i.count_ones() as usize], 0.0))
        .collect();
    Ok(StateVector { q, amplitudes })
}

pub fn product_state(
    qubits: &[ProductQubit],
    global_phase: f64,
) -> Result<StateVector, QStateError> {
    let q = qubits.len();
    if q > MAX_DENSE_QUBITS {
        return Err(QStateError::TooLarge {
            q,
            limit: MAX_DENSE_QUBITS,
        });
    }
    let mut amps = vec![Complex64::from_polar(1.0, global_phase)];
    for qubit in qubits {
        let [a0, a1] = qubit.amplitudes();
        amps = amps.iter().flat_map(|x| [x * a0, x * a1]).collect();
    }
    Ok(StateVector {
        q,
        amplitudes: amps,
    })
}

/// `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64, QStateError> {
    if a.q != b.q {
        return Err(QStateError::DimensionMismatch {
            left: a.q,
            right: b.q,
        });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn fvector_normalization() {
        let f = FVector::new(4, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        let f = FVector::new(4, &[1.0; 5]).unwrap();
        for x in f.coeffs() {
            assert_abs_diff_eq!(*x, 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        }
        let f = FVector::new(4, &[3.0, 0.0, 4.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeffs()[2], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn fvector_errors() {
        assert_eq!(FVector::new(4, &[0.0; 5]), Err(QStateError::AllZero));
        assert_eq!(
            FVector::new(4, &[1.0; 4]),
            Err(QStateError::BadLength {
                expected: 5,
                got: 4
            })
        );
        assert_eq!(
            FVector::new(2, &[1.0, f64::NAN, 0.0]),
            Err(QStateError::NonFinite)
        );
        assert_eq!(
            FVector::new(2, &[1.0, f64::INFINITY, 0.0]),
            Err(QStateError::NonFinite)
        );
        assert_eq!(
            FVector::new(1, &[1.0, 0.0]),
            Err(QStateError::TooFewQubits(1))
        );
    }

    #[test]
    fn weighting() {
        let w = FVector::dicke(4, 2).unwrap().weighted();
        assert_abs_diff_eq!(w.values()[2], 6f64.sqrt(), epsilon = 1e-15);
        let w = FVector::dicke(4, 0).unwrap().weighted();
        assert_eq!(w.values(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
        let w = FVector::dicke(2, 1).unwrap().weighted();
        assert_abs_diff_eq!(w.values()[1], 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn from_weighted_undoes_weighting() {
        let f = FVector::from_weighted(4, &[1.0; 5]).unwrap();
        let w = f.weighted();
        let first = w.values()[0];
        for x in w.values() {
            assert_abs_diff_eq!(*x, first, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            f.coeffs().iter().map(|x| x * x).sum::<f64>(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn dicke_examples() {
        let d = dicke_state(2, 1).unwrap();
        let s = FRAC_1_SQRT_2;
        for (a, want) in d.amplitudes().iter().zip([0.0, s, s, 0.0]) {
            assert_abs_diff_eq!(a.re, want, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
        let d = dicke_state(4, 0).unwrap();
        assert_eq!(d.amplitudes()[0], c(1.0));
        assert!(d.amplitudes()[1..].iter().all(|a| *a == c(0.0)));
        let d = dicke_state(3, 2).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for (i, a) in d.amplitudes().iter().enumerate() {
            let want = if [3, 5, 6].contains(&i) { t } else { 0.0 };
            assert_abs_diff_eq!(a.re, want, epsilon = 1e-15);
        }
        assert_eq!(
            dicke_state(3, 4),
            Err(QStateError::OutOfRange { q: 3, p: 4 })
        );
    }

    #[test]
    fn superposition_examples() {
        let f = FVector::dicke(4, 2).unwrap();
        assert_eq!(superpose_dicke(&f).unwrap(), dicke_state(4, 2).unwrap());
        let ghz = FVector::new(4, &[1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let psi = superpose_dicke(&ghz).unwrap();
        assert_abs_diff_eq!(psi.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[15].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_examples() {
        let up = product_state(&[ProductQubit::new(0.0, 1.3); 4], 0.0).unwrap();
        assert_abs_diff_eq!(up.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(up.norm(), 1.0, epsilon = 1e-15);

        let one = ProductQubit::new(PI, 0.0).amplitudes();
        assert_abs_diff_eq!(one[0].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one[1].norm(), 1.0, epsilon = 1e-15);

        let plus = product_state(&[ProductQubit::new(PI / 2.0, 0.0); 2], 0.0).unwrap();
        for a in plus.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn overlap_examples() {
        let d = dicke_state(4, 2).unwrap();
        assert_abs_diff_eq!(overlap(&d, &d).unwrap().re, 1.0, epsilon = 1e-14);
        let zero = dicke_state(4, 0).unwrap();
        assert_eq!(overlap(&zero, &d).unwrap(), c(0.0));
        // r^2 = 1/3 means cos(alpha/2) = sqrt(3)/2.
        let w_prod = product_state(&[ProductQubit::new(PI / 3.0, 0.0); 4], 0.0).unwrap();
        let ov = overlap(&dicke_state(4, 1).unwrap(), &w_prod).unwrap();
        assert_abs_diff_eq!(ov.norm(), 0.75f64.powf(1.5), epsilon = 1e-14);
        assert!(matches!(
            overlap(&d, &dicke_state(3, 1).unwrap()),
            Err(QStateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stats_examples() {
        let s = FVector::new(4, &[1.0; 5]).unwrap().stats();
        assert_abs_diff_eq!(s.variance, 0.0, epsilon = 1e-30);
        for p in [2, 0] {
            let s = FVector::dicke(4, p).unwrap().stats();
            assert_abs_diff_eq!(s.mean, 0.2, epsilon = 1e-15);
            assert_abs_diff_eq!(s.variance, 0.2, epsilon = 1e-15);
        }
    }

    #[test]
    fn product_qubit_roundtrip() {
        let pq = ProductQubit::new(1.1, 4.0);
        let [a, b] = pq.amplitudes();
        let phase = Complex64::from_polar(2.0, 0.7);
        let back = ProductQubit::from_vector([a * phase, b * phase]);
        assert_abs_diff_eq!(back.alpha, 1.1, epsilon = 1e-14);
        assert_abs_diff_eq!(back.beta, 4.0, epsilon = 1e-14);
    }
}
