//! Geometric measure of entanglement for permutation-symmetric multi-qubit
//! pure states.
//!
//! A symmetric state is a superposition of Dicke states, `sum_p f_p |D_p>`.
//! Its closest product state can be taken symmetric too, so the search runs
//! over four real parameters instead of `2q`. [`solver`] finds and classifies
//! the stationary points; [`oracle`] is an unrestricted product-state search
//! used to cross-check it.

pub mod census;
pub mod evenodd;
pub mod experiments;
pub mod oracle;
pub mod qstate;
pub mod solver;
pub mod symmetric;

pub use census::{census, census_with, CensusCounts, CensusReport, Convention, Sampler};
pub use evenodd::{
    evenodd_distance, evenodd_sweep, EvenOddError, EvenOddResult, EvenOddRow, EvenOddSpec,
};
pub use experiments::{
    variance_study, wedge_check, Family, VarianceRow, VarianceStudyConfig, WedgeBin,
};
pub use oracle::{oracle_min_distance, symmetric_gap, OracleError, OracleResult};
pub use qstate::{
    dicke_state, product_state, superpose_dicke, FStats, FVector, ProductQubit, QStateError,
    StateVector, WeightedFVector,
};
pub use solver::{
    dicke_sweep, multistart_solve, multistart_solve_with, CensusClass, DickeRow, ExtremumKind,
    ExtremumReport, SolveError, SolveSummary, SolverOptions, Winner,
};
pub use symmetric::{
    distance_sq, hessian_at, DistancePair, HessianParts, SymParams, SymmetricError,
};
