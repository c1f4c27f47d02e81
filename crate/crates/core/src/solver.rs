//! Optimal adversary distributions for the EOR matrix game and the ROE
//! fractional game.
//!
//! The core primitive is a zero-sum matrix game solver: the adversary picks
//! a distribution d over columns, the designer best-responds with a row,
//! and the value is `max_d min_row E_d[M(row,·)]`. It is solved as a small
//! dense LP (tableau simplex over the designer side, adversary distribution
//! read off the duals) and certified by replaying both strategies against
//! the original matrix: the reported residual is the duality gap.
//!
//! The ROE game `sup_d min_design E_d[β]/E_d[A]` reduces to root finding:
//! with all algorithm entries positive, the value g(λ) of the auxiliary
//! game with payoff β − λ·A is strictly decreasing in λ, and the ROE value
//! is its unique root. Bisection on [min ratio, max ratio] converges
//! unconditionally.

use crate::error::{Error, Result};
use crate::instance::{Distribution, GameInstance, Matrix, ToleranceConfig};
use crate::ratio::{ratio_matrix, roe_on_weights, worst_state_pure};

/// Result of a bound computation: the value, the adversary mixture that
/// achieves it, and the designer's best response, plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    /// The adversary distribution over states achieving `value`.
    pub adversary_dist: Distribution,
    /// Designer best response to `adversary_dist` (lowest index on ties).
    pub best_design: usize,
    /// LP pivots, or bisection steps for the ROE solve. 0 for closed forms.
    pub iterations: usize,
    /// Certificate slack: duality gap for game solves, |g(λ*)| for ROE.
    pub residual: f64,
}

/// Full solution of a zero-sum matrix game (column player maximizes).
#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    pub value: f64,
    /// Optimal maximizer distribution over columns.
    pub maximizer: Distribution,
    /// Argmin row against `maximizer` (lowest index on ties).
    pub minimizer_design: usize,
    /// Optimal minimizer mixture over rows (the LP's primal side).
    pub minimizer_mixture: Vec<f64>,
    pub iterations: usize,
    /// Duality gap between the two replayed strategies.
    pub residual: f64,
}

/// Solves `max_d min_row Σ_col d[col]·M(row,col)` to within `tol.lp_tol`.
///
/// The returned value is the replayed best response to the maximizer
/// distribution, so `min_row E_d[M(row,·)] >= value` holds by construction
/// and the residual bounds the distance to the true game value.
pub fn zero_sum_value(matrix: &Matrix, tol: &ToleranceConfig) -> Result<GameSolution> {
    let m = matrix.rows();
    let n = matrix.cols();
    for r in 0..m {
        for c in 0..n {
            if !matrix.get(r, c).is_finite() {
                return Err(Error::validation(format!(
                    "game matrix entry [{r}][{c}] = {} is not finite",
                    matrix.get(r, c)
                )));
            }
        }
    }

    // Degenerate games have pure solutions; skip the LP.
    if m == 1 {
        let mut arg = 0;
        for c in 0..n {
            if matrix.get(0, c) > matrix.get(0, arg) {
                arg = c;
            }
        }
        return Ok(GameSolution {
            value: matrix.get(0, arg),
            maximizer: Distribution::point_mass(arg, n)?,
            minimizer_design: 0,
            minimizer_mixture: vec![1.0],
            iterations: 0,
            residual: 0.0,
        });
    }
    if n == 1 {
        let mut arg = 0;
        for r in 0..m {
            if matrix.get(r, 0) < matrix.get(arg, 0) {
                arg = r;
            }
        }
        let mut mix = vec![0.0; m];
        mix[arg] = 1.0;
        return Ok(GameSolution {
            value: matrix.get(arg, 0),
            maximizer: Distribution::point_mass(0, 1)?,
            minimizer_design: arg,
            minimizer_mixture: mix,
            iterations: 0,
            residual: 0.0,
        });
    }

    let lp = solve_designer_lp(matrix, tol)?;

    let d = Distribution::normalize(&lp.col_prices)?;
    let q_sum: f64 = lp.row_weights.iter().sum();
    let minimizer_mixture: Vec<f64> =
        lp.row_weights.iter().map(|&y| (y / q_sum).max(0.0)).collect();

    // Replay both strategies against the original matrix.
    let mut lo = f64::INFINITY;
    let mut best_row = 0;
    for r in 0..m {
        let mut dot = 0.0;
        for c in 0..n {
            dot += d.weight(c) * matrix.get(r, c);
        }
        if dot < lo {
            lo = dot;
            best_row = r;
        }
    }
    let mut hi = f64::NEG_INFINITY;
    for c in 0..n {
        let mut dot = 0.0;
        for r in 0..m {
            dot += minimizer_mixture[r] * matrix.get(r, c);
        }
        hi = hi.max(dot);
    }

    let residual = (hi - lo).max(0.0);
    if residual > tol.lp_tol {
        return Err(Error::solver(format!(
            "zero-sum certificate gap {residual:.3e} exceeds lp_tol {:.3e} \
             ({m}x{n} game, {} pivots)",
            tol.lp_tol, lp.iterations
        )));
    }

    Ok(GameSolution {
        value: lo,
        maximizer: d,
        minimizer_design: best_row,
        minimizer_mixture,
        iterations: lp.iterations,
        residual,
    })
}

struct LpSolution {
    row_weights: Vec<f64>,
    col_prices: Vec<f64>,
    iterations: usize,
}

/// Designer-side LP in canonical form. After shifting the matrix positive
/// and scaling entries into (0,1], `max Σ y` s.t. `Mᵀy <= 1, y >= 0` has
/// the slack basis feasible, so no phase-1 is needed. The adversary's
/// optimal distribution appears as the dual prices of the column
/// constraints.
fn solve_designer_lp(matrix: &Matrix, tol: &ToleranceConfig) -> Result<LpSolution> {
    const EPS_COST: f64 = 1e-12;
    const EPS_PIVOT: f64 = 1e-11;

    let m = matrix.rows();
    let n = matrix.cols();
    let min = matrix.min_entry();
    let shift = if min < 1.0 { 1.0 - min } else { 0.0 };
    let scale = matrix.max_entry() + shift;

    // Tableau: n constraint rows + objective row; m structural columns,
    // n slacks, rhs. Row i holds column i of the (shifted, scaled) game.
    let width = m + n + 1;
    let mut t = vec![vec![0.0; width]; n + 1];
    for i in 0..n {
        for j in 0..m {
            t[i][j] = (matrix.get(j, i) + shift) / scale;
        }
        t[i][m + i] = 1.0;
        t[i][m + n] = 1.0;
    }
    for j in 0..m {
        t[n][j] = -1.0;
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    let bland_after = 2 * (m + n) + 16;
    let mut iters = 0;
    loop {
        // Entering column: most negative reduced cost, falling back to
        // Bland's rule if the run gets long (anti-cycling).
        let mut enter = None;
        if iters <= bland_after {
            let mut best = -EPS_COST;
            for j in 0..m + n {
                if t[n][j] < best {
                    best = t[n][j];
                    enter = Some(j);
                }
            }
        } else {
            for j in 0..m + n {
                if t[n][j] < -EPS_COST {
                    enter = Some(j);
                    break;
                }
            }
        }
        let Some(enter) = enter else { break };

        // Ratio test; ties leave the smallest basis index.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..n {
            if t[i][enter] > EPS_PIVOT {
                let ratio = t[i][m + n] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio - 1e-15
                            || (ratio <= best_ratio + 1e-15 && basis[i] < basis[cur])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return Err(Error::solver("designer LP unbounded; game matrix is degenerate"));
        };

        iters += 1;
        if iters > tol.max_lp_iters {
            return Err(Error::solver(format!(
                "simplex exceeded max_lp_iters = {} on a {m}x{n} game",
                tol.max_lp_iters
            )));
        }

        // Pivot.
        let p = t[leave][enter];
        for j in 0..width {
            t[leave][j] /= p;
        }
        for i in 0..n + 1 {
            if i != leave && t[i][enter] != 0.0 {
                let f = t[i][enter];
                for j in 0..width {
                    t[i][j] -= f * t[leave][j];
                }
                t[i][enter] = 0.0;
            }
        }
        basis[leave] = enter;
    }

    let mut row_weights = vec![0.0; m];
    for i in 0..n {
        if basis[i] < m {
            row_weights[basis[i]] = t[i][m + n].max(0.0);
        }
    }
    let col_prices: Vec<f64> = (0..n).map(|c| t[n][m + c].max(0.0)).collect();
    Ok(LpSolution { row_weights, col_prices, iterations: iters })
}

/// EOR sup-inf: the value of the matrix game on the per-cell ratio table.
pub fn best_adversary_eor(inst: &GameInstance, tol: &ToleranceConfig) -> Result<SolveResult> {
    let sol = zero_sum_value(&ratio_matrix(inst), tol)?;
    Ok(SolveResult {
        value: sol.value,
        adversary_dist: sol.maximizer,
        best_design: sol.minimizer_design,
        iterations: sol.iterations,
        residual: sol.residual,
    })
}

fn linearized(inst: &GameInstance, lambda: f64) -> Matrix {
    Matrix::from_fn(inst.num_designs(), inst.num_states(), |r, c| {
        inst.benchmark().get(r, c) - lambda * inst.algorithm().get(r, c)
    })
}

/// Auxiliary game value g(λ) for the parametric ROE reduction.
pub fn linearized_game_value(
    inst: &GameInstance,
    lambda: f64,
    tol: &ToleranceConfig,
) -> Result<GameSolution> {
    zero_sum_value(&linearized(inst, lambda), tol)
}

/// ROE sup-inf: `sup_d min_design E_d[β]/E_d[A]`, solved by bisecting the
/// root of g(λ). The root find terminates when |g| <= abs_tol or the
/// bracket width drops to abs_tol, whichever happens first.
///
/// The returned value is the ROE best response to the located adversary
/// mixture, not the raw bisection point: that value is a valid lower bound
/// on the true optimum by construction (so it can never poke above the
/// pure minimax value by solver noise), and replaying the mixture through
/// `roe_lower_bound` reproduces it bit for bit. The residual records
/// |g| at the bisection point.
pub fn best_adversary_roe(inst: &GameInstance, tol: &ToleranceConfig) -> Result<SolveResult> {
    let ratios = ratio_matrix(inst);
    let mut lo = ratios.min_entry();
    let mut hi = ratios.max_entry();

    let mut iters = 0;
    loop {
        if iters >= tol.max_bisection_iters {
            return Err(Error::solver(format!(
                "ROE bisection did not converge in {} iterations (bracket [{lo}, {hi}])",
                tol.max_bisection_iters
            )));
        }
        let lambda = 0.5 * (lo + hi);
        let sol = linearized_game_value(inst, lambda, tol)?;
        iters += 1;
        if sol.value.abs() <= tol.abs_tol || (hi - lo) <= tol.abs_tol {
            let weights = sol.maximizer.weights();
            let mut best = f64::INFINITY;
            let mut best_design = 0;
            for d in 0..inst.num_designs() {
                let v = roe_on_weights(inst, d, weights);
                if v < best {
                    best = v;
                    best_design = d;
                }
            }
            return Ok(SolveResult {
                value: best,
                adversary_dist: sol.maximizer,
                best_design,
                iterations: iters,
                residual: sol.value.abs(),
            });
        }
        if sol.value > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }
}

/// For a fixed design, the supremum of ROE over all mixtures of states.
/// This equals the worst pure state: mixing states never helps the
/// adversary once the designer is fixed. Returns (value, witness state).
pub fn adversary_sup_roe_fixed_design(inst: &GameInstance, design: usize) -> Result<(f64, usize)> {
    let row = worst_state_pure(inst, design)?;
    Ok((row.value, row.argmax_state.expect("non-empty state space")))
}
