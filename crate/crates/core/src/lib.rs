//! Finding involutions with small support by powering up elements of even
//! order, in symmetric and alternating groups and in matrix groups over
//! finite fields of odd characteristic.
//!
//! The crate also computes the proportion of such elements exactly (for
//! permutations, with big-integer cycle counting) and by Monte Carlo
//! sampling, and evaluates the chain of analytic lower bounds on it.

pub mod bounds;
pub mod error;
pub mod exact;
pub mod field;
pub mod group;
pub mod matrix;
pub mod monte_carlo;
pub mod perm;
pub mod poly;
pub mod sampler;

pub use bounds::{
    bound_chain, bound_chain_alternating, cycle_sum, family_constants, theorem_check,
    validate_hypotheses, BoundChain, Epsilon, Family, FamilyConstants, HypothesisReport, SumMode,
    TheoremCheck,
};
pub use error::{Error, Result};
pub use exact::{
    a_not, brute_force_proportion, c_not, count_restricted, p_exact, p_tilde_exact, s_not,
    ExactProportion, ParityCountPair, SupportDistribution,
};
pub use field::FiniteField;
pub use group::{enumerate_group, GroupElement, ProductReplacement};
pub use matrix::{
    element_exponent_multiple, exponent_multiple, involution_from_element,
    minus_one_eigenspace_dim, ExponentMultiple, Matrix,
};
pub use monte_carlo::{
    estimate_matrix_proportion, estimate_perm_proportion, find_small_involution, wilson_interval,
    Estimate, EstimateRecord, FindOutcome, FindResult, InvolutionSource, MatrixSource, PermSource,
};
pub use perm::{CycleProfile, Parity, PermGroup, Permutation};
pub use sampler::{sample_uniform_gl, sample_uniform_sl, FamilyTag, GroupKind, GroupSpec};
