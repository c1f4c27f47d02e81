//! Minimax lower bounds for ratio-cost worst-case minimization on finite
//! instances.
//!
//! Given a finite design space (rows) and state space (columns) with a
//! benchmark matrix β ≥ 0 and an algorithm matrix A > 0, the per-cell cost
//! is the ratio β/A and the designer's worst case is
//! `min_design max_state β/A`. Randomizing the adversary over states gives
//! two lower-bound objectives on that value:
//!
//! - **EOR** (expectation-over-ratios): `E_d[β/A]`, the classic bound from
//!   swapping min and max against a mixed adversary;
//! - **ROE** (ratio-of-expectations): `E_d[β]/E_d[A]`, which is equally
//!   valid as a lower bound and usually far easier to manipulate, since
//!   numerator and denominator average independently.
//!
//! The crate computes both bounds exactly at desk scale — the EOR game via
//! a dense zero-sum LP, the ROE game via a parametric root find on the
//! auxiliary payoff β − λ·A — and ships a verifier that certifies the whole
//! inequality chain numerically on any instance, plus generators for
//! rent-or-buy (ski-rental) games, seeded random corpora, and
//! constant-ratio edge cases.

pub mod error;
pub mod generators;
pub mod instance;
pub mod ratio;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use instance::{
    load_instance, make_distribution, point_mass, Distribution, GameInstance, Matrix,
    ToleranceConfig,
};
pub use ratio::{
    act_second_min, dominance_witness, eor_lower_bound, eor_value, fraction_compare,
    fraction_monotonicity, pure_minimax, ratio_cost, ratio_matrix, roe_lower_bound, roe_value,
    worst_state_pure, RatioValue,
};
pub use solver::{
    adversary_sup_roe_fixed_design, best_adversary_eor, best_adversary_roe, zero_sum_value,
    GameSolution, SolveResult,
};
pub use verify::{
    check_dominance, check_eor_chain, check_roe_chain, check_weak_equalities,
    check_weak_equalities_deep, verify_instance, ChainReport, CheckStatus, FaultInjection,
    VerifyOptions, VerifyRun,
};
