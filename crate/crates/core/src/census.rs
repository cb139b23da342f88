//! Random f-vector ensembles and the tally of solution types over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::qstate::FVector;
use crate::solver::{default_starts, multistart_solve, CensusClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sampler {
    /// Uniform on the unit sphere in `q + 1` dimensions.
    UniformSphere,
    /// Uniform on the non-negative orthant of the sphere.
    NonNegativeSphere,
    /// Integer entries drawn uniformly from `-4..=4` (rejecting all-zero).
    SmallInteger,
}

/// How a sampled coefficient vector is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// The sample is `f_p` itself.
    Bare,
    /// The sample is `sqrt(C(q,p)) f_p` up to normalization.
    Weighted,
}

/// Largest magnitude drawn by [`Sampler::SmallInteger`].
pub const SMALL_INTEGER_RANGE: i32 = 4;

/// Deterministic 64-bit mix of a run seed and an item index.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        ^ index
            .wrapping_add(0x9E37_79B9_7F4A_7C15)
            .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_raw<R: Rng>(q: usize, sampler: Sampler, rng: &mut R) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = match sampler {
            Sampler::UniformSphere => (0..=q).map(|_| rng.sample(StandardNormal)).collect(),
            Sampler::NonNegativeSphere => (0..=q)
                .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
                .collect(),
            Sampler::SmallInteger => (0..=q)
                .map(|_| rng.random_range(-SMALL_INTEGER_RANGE..=SMALL_INTEGER_RANGE) as f64)
                .collect(),
        };
        if raw.iter().any(|x| *x != 0.0) {
            return raw;
        }
    }
}

pub fn sample_fvector<R: Rng>(
    q: usize,
    sampler: Sampler,
    convention: Convention,
    rng: &mut R,
) -> FVector {
    let raw = sample_raw(q, sampler, rng);
    match convention {
        Convention::Bare => FVector::new(q, &raw),
        Convention::Weighted => FVector::from_weighted(q, &raw),
    }
    .expect("sampled vectors are finite and nonzero")
}

/// The `index`-th f-vector of the ensemble keyed by `seed`.
pub fn ensemble_member(
    q: usize,
    seed: u64,
    index: u64,
    sampler: Sampler,
    convention: Convention,
) -> FVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    sample_fvector(q, sampler, convention, &mut rng)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CensusCounts {
    pub real_interior: usize,
    pub real_interior_zero_eig: usize,
    pub complex_interior: usize,
    pub boundary_r0: usize,
    pub boundary_rinf: usize,
    /// States for which no candidate could be produced.
    pub failed: usize,
}

impl CensusCounts {
    pub fn get(&self, class: CensusClass) -> usize {
        match class {
            CensusClass::RealInterior => self.real_interior,
            CensusClass::RealInteriorZeroEig => self.real_interior_zero_eig,
            CensusClass::ComplexInterior => self.complex_interior,
            CensusClass::BoundaryR0 => self.boundary_r0,
            CensusClass::BoundaryRInf => self.boundary_rinf,
        }
    }

    fn bump(&mut self, class: Option<CensusClass>) {
        match class {
            Some(CensusClass::RealInterior) => self.real_interior += 1,
            Some(CensusClass::RealInteriorZeroEig) => self.real_interior_zero_eig += 1,
            Some(CensusClass::ComplexInterior) => self.complex_interior += 1,
            Some(CensusClass::BoundaryR0) => self.boundary_r0 += 1,
            Some(CensusClass::BoundaryRInf) => self.boundary_rinf += 1,
            None => self.failed += 1,
        }
    }

    pub fn total(&self) -> usize {
        CensusClass::ALL.iter().map(|c| self.get(*c)).sum::<usize>() + self.failed
    }

    pub fn fraction(&self, class: CensusClass) -> f64 {
        self.get(class) as f64 / self.total().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub q: usize,
    pub n_states: usize,
    pub seed: u64,
    pub sampler: Sampler,
    pub convention: Convention,
    pub n_starts: usize,
    pub counts: CensusCounts,
    /// Per-state class in sampling order; `None` marks a failed solve.
    pub classes: Vec<Option<CensusClass>>,
}

/// Census in the weighted convention with the default multistart size.
pub fn census(q: usize, n_states: usize, seed: u64, sampler: Sampler) -> CensusReport {
    census_with(
        q,
        n_states,
        seed,
        sampler,
        Convention::Weighted,
        default_starts(q),
    )
}

pub fn census_with(
    q: usize,
    n_states: usize,
    seed: u64,
    sampler: Sampler,
    convention: Convention,
    n_starts: usize,
) -> CensusReport {
    let classes: Vec<Option<CensusClass>> = (0..n_states as u64)
        .into_par_iter()
        .map(|i| {
            let f = ensemble_member(q, seed, i, sampler, convention);
            multistart_solve(&f, n_starts, mix_seed(seed, i))
                .ok()
                .map(|s| s.census_class)
        })
        .collect();
    let mut counts = CensusCounts::default();
    for c in &classes {
        counts.bump(*c);
    }
    CensusReport {
        q,
        n_states,
        seed,
        sampler,
        convention,
        n_starts,
        counts,
        classes,
    }
}
