//! Pure evaluation of the ratio cost and its two mixed-state objectives.
//!
//! For a design row with benchmark entries b and algorithm entries a, the
//! per-state cost is the ratio b/a. A mixture over states can be scored two
//! ways: expectation-over-ratios (EOR), `Σ w·(b/a)`, or
//! ratio-of-expectations (ROE), `(Σ w·b)/(Σ w·a)`. Both collapse to the
//! plain ratio on point masses, and both yield valid lower bounds on the
//! pure worst-case minimax value.

use crate::error::{Error, Result};
use crate::instance::{Distribution, GameInstance, Matrix, ToleranceConfig};
use crate::solver::SolveResult;

/// A ratio value together with the pure actions that achieved it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioValue {
    pub value: f64,
    /// State achieving the row maximum, when a maximization happened.
    pub argmax_state: Option<usize>,
    /// Design achieving the minimum, when a minimization happened.
    pub argmin_design: Option<usize>,
}

/// benchmark(design,state) / algorithm(design,state).
pub fn ratio_cost(inst: &GameInstance, design: usize, state: usize) -> Result<f64> {
    inst.check_design(design)?;
    inst.check_state(state)?;
    Ok(inst.benchmark().get(design, state) / inst.algorithm().get(design, state))
}

/// The full m×n table of per-cell ratios.
pub fn ratio_matrix(inst: &GameInstance) -> Matrix {
    Matrix::from_fn(inst.num_designs(), inst.num_states(), |r, c| {
        inst.benchmark().get(r, c) / inst.algorithm().get(r, c)
    })
}

fn check_dist(inst: &GameInstance, dist: &Distribution) -> Result<()> {
    if dist.len() != inst.num_states() {
        return Err(Error::validation(format!(
            "distribution has {} weights but instance has {} states",
            dist.len(),
            inst.num_states()
        )));
    }
    Ok(())
}

/// Expectation-over-ratios for a fixed design: Σ_s w_s · (b_s / a_s).
pub fn eor_value(inst: &GameInstance, design: usize, dist: &Distribution) -> Result<f64> {
    inst.check_design(design)?;
    check_dist(inst, dist)?;
    Ok(eor_on_weights(inst, design, dist.weights()))
}

/// Ratio-of-expectations for a fixed design: (Σ_s w_s·b_s) / (Σ_s w_s·a_s).
pub fn roe_value(inst: &GameInstance, design: usize, dist: &Distribution) -> Result<f64> {
    inst.check_design(design)?;
    check_dist(inst, dist)?;
    Ok(roe_on_weights(inst, design, dist.weights()))
}

// Left-to-right accumulation keeps point masses exact: a weight vector with
// a single 1 entry reproduces the cell ratio bit-for-bit.
pub(crate) fn eor_on_weights(inst: &GameInstance, design: usize, w: &[f64]) -> f64 {
    let b = inst.benchmark().row(design);
    let a = inst.algorithm().row(design);
    let mut acc = 0.0;
    for s in 0..w.len() {
        acc += w[s] * (b[s] / a[s]);
    }
    acc
}

pub(crate) fn roe_on_weights(inst: &GameInstance, design: usize, w: &[f64]) -> f64 {
    let b = inst.benchmark().row(design);
    let a = inst.algorithm().row(design);
    let mut num = 0.0;
    let mut den = 0.0;
    for s in 0..w.len() {
        num += w[s] * b[s];
        den += w[s] * a[s];
    }
    num / den
}

/// Worst pure state for a fixed design: max_s ratio_cost(design, s).
/// Ties break to the lowest state index.
pub fn worst_state_pure(inst: &GameInstance, design: usize) -> Result<RatioValue> {
    inst.check_design(design)?;
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for s in 0..inst.num_states() {
        let r = inst.benchmark().get(design, s) / inst.algorithm().get(design, s);
        if r > best {
            best = r;
            arg = s;
        }
    }
    Ok(RatioValue { value: best, argmax_state: Some(arg), argmin_design: None })
}

/// The pure min-max value: min over designs of the worst pure state.
/// Ties break to the lowest design index.
pub fn pure_minimax(inst: &GameInstance) -> RatioValue {
    let mut best = f64::INFINITY;
    let mut arg_design = 0;
    let mut arg_state = 0;
    for d in 0..inst.num_designs() {
        let row = worst_state_pure(inst, d).expect("design index in range");
        if row.value < best {
            best = row.value;
            arg_design = d;
            arg_state = row.argmax_state.expect("non-empty state space");
        }
    }
    RatioValue { value: best, argmax_state: Some(arg_state), argmin_design: Some(arg_design) }
}

/// Lower bound from a fixed mixture under the EOR objective:
/// min over designs of `eor_value`.
pub fn eor_lower_bound(inst: &GameInstance, dist: &Distribution) -> Result<SolveResult> {
    check_dist(inst, dist)?;
    let (value, design) = min_over_designs(inst, dist.weights(), eor_on_weights);
    Ok(SolveResult {
        value,
        adversary_dist: dist.clone(),
        best_design: design,
        iterations: 0,
        residual: 0.0,
    })
}

/// Lower bound from a fixed mixture under the ROE objective:
/// min over designs of `roe_value`.
pub fn roe_lower_bound(inst: &GameInstance, dist: &Distribution) -> Result<SolveResult> {
    check_dist(inst, dist)?;
    let (value, design) = min_over_designs(inst, dist.weights(), roe_on_weights);
    Ok(SolveResult {
        value,
        adversary_dist: dist.clone(),
        best_design: design,
        iterations: 0,
        residual: 0.0,
    })
}

fn min_over_designs(
    inst: &GameInstance,
    w: &[f64],
    eval: fn(&GameInstance, usize, &[f64]) -> f64,
) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for d in 0..inst.num_designs() {
        let v = eval(inst, d, w);
        if v < best {
            best = v;
            arg = d;
        }
    }
    (best, arg)
}

/// A supported index whose element ratio dominates the mixture's ROE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceWitness {
    pub index: usize,
    /// Set when the numerator vector has a zero on the support; the witness
    /// guarantee is still checked empirically in that case.
    pub zero_numerator_on_support: bool,
}

/// Finds a supported index ω with s(ω)/t(ω) ≥ (Σ dist·s)/(Σ dist·t).
///
/// The witness is the supported index with the largest element ratio,
/// lowest index first. Numerator entries must be non-negative (zeros are
/// tolerated and flagged), denominator entries strictly positive.
pub fn dominance_witness(
    svec: &[f64],
    tvec: &[f64],
    dist: &Distribution,
) -> Result<DominanceWitness> {
    if svec.len() != dist.len() || tvec.len() != dist.len() {
        return Err(Error::validation(format!(
            "dominance inputs sized {}/{} but distribution has {} weights",
            svec.len(),
            tvec.len(),
            dist.len()
        )));
    }
    for (i, &t) in tvec.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::validation(format!("tvec[{i}] = {t}: must be finite and > 0")));
        }
    }
    for (i, &s) in svec.iter().enumerate() {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::validation(format!("svec[{i}] = {s}: must be finite and >= 0")));
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    let mut zero_flag = false;
    for i in dist.support() {
        if svec[i] == 0.0 {
            zero_flag = true;
        }
        let r = svec[i] / tvec[i];
        if r > best {
            best = r;
            arg = Some(i);
        }
    }
    Ok(DominanceWitness {
        index: arg.expect("distribution support is non-empty"),
        zero_numerator_on_support: zero_flag,
    })
}

/// Relation between the two anchor ratios of a fraction comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioOrder {
    Less,
    Equal,
    Greater,
}

/// Report for the re-weighted fraction comparison.
///
/// With A = a1/a2, B = b1/b2 and Q = (κ·a1 + b1)/(κ·a2 + b2), the blended
/// ratio Q always lies between A and B (collapsing to A when A = B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionCompare {
    pub a: f64,
    pub b: f64,
    pub q: f64,
    pub ordering: RatioOrder,
    pub holds: bool,
}

fn check_positive(label: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::validation(format!("{label} = {v}: must be finite and > 0")));
    }
    Ok(())
}

pub fn fraction_compare(
    kappa: f64,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    tol: &ToleranceConfig,
) -> Result<FractionCompare> {
    for (label, v) in [("kappa", kappa), ("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
        check_positive(label, v)?;
    }
    let a = a1 / a2;
    let b = b1 / b2;
    let q = (kappa * a1 + b1) / (kappa * a2 + b2);
    let eff = tol.gap(a.abs().max(b.abs()).max(q.abs()));
    let ordering = if (a - b).abs() <= eff {
        RatioOrder::Equal
    } else if a > b {
        RatioOrder::Greater
    } else {
        RatioOrder::Less
    };
    let holds = q >= a.min(b) - eff && q <= a.max(b) + eff;
    Ok(FractionCompare { a, b, q, ordering, holds })
}

/// Direction the blended ratio Q(κ) is expected to move along a κ grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Constant,
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub a: f64,
    pub b: f64,
    /// Q evaluated at each grid point.
    pub samples: Vec<f64>,
    pub trend: Trend,
    pub holds: bool,
}

/// Checks that Q(κ) = (κ·a1 + b1)/(κ·a2 + b2) moves monotonically along
/// `kappa_grid`: non-decreasing when A ≥ B, constant when A = B,
/// non-increasing when A ≤ B (all within tolerance).
pub fn fraction_monotonicity(
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
    kappa_grid: &[f64],
    tol: &ToleranceConfig,
) -> Result<MonotonicityReport> {
    for (label, v) in [("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
        check_positive(label, v)?;
    }
    if kappa_grid.len() < 2 {
        return Err(Error::validation("kappa grid needs at least 2 points"));
    }
    for (i, &k) in kappa_grid.iter().enumerate() {
        check_positive("kappa grid entry", k)?;
        if i > 0 && k <= kappa_grid[i - 1] {
            return Err(Error::validation(format!(
                "kappa grid must be strictly increasing (violated at index {i})"
            )));
        }
    }
    let a = a1 / a2;
    let b = b1 / b2;
    let samples: Vec<f64> =
        kappa_grid.iter().map(|&k| (k * a1 + b1) / (k * a2 + b2)).collect();
    let eff = tol.gap(a.abs().max(b.abs()));
    let trend = if (a - b).abs() <= eff {
        Trend::Constant
    } else if a > b {
        Trend::Increasing
    } else {
        Trend::Decreasing
    };
    let holds = samples.windows(2).all(|w| match trend {
        Trend::Increasing => w[1] >= w[0] - eff,
        Trend::Constant => (w[1] - w[0]).abs() <= eff,
        Trend::Decreasing => w[1] <= w[0] + eff,
    });
    Ok(MonotonicityReport { a, b, samples, trend, holds })
}

/// Minimum element ratio of a list of positive pairs, lowest index first.
///
/// This equals the minimum over all probability vectors ξ of
/// (ξ·a)/(ξ·b): mixing the pairs can never beat the best single pair.
pub fn act_second_min(pairs: &[(f64, f64)]) -> Result<(f64, usize)> {
    if pairs.is_empty() {
        return Err(Error::validation("act_second_min needs a non-empty pair list"));
    }
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
            return Err(Error::validation(format!(
                "pair[{i}] = ({a}, {b}): entries must be finite and > 0"
            )));
        }
    }
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let r = a / b;
        if r < best {
            best = r;
            arg = i;
        }
    }
    Ok((best, arg))
}
