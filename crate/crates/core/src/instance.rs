//! Finite problem instances: design space, state space, benchmark and
//! algorithm matrices, and probability distributions over states.
//!
//! An instance is a pair of m×n matrices over a labelled design space
//! (rows) and state space (columns). The `benchmark` matrix holds the
//! numerator of the per-cell cost ratio, the `algorithm` matrix the
//! denominator. Every algorithm entry must be strictly positive so that
//! every ratio is finite.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum drift of a weight vector's sum from 1 before it is rejected.
pub const DIST_SUM_TOL: f64 = 1e-12;

/// Dense row-major matrix of f64 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from nested rows. Rejects empty or ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::validation("matrix must have at least one row and one column"));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::validation(format!(
                    "ragged matrix: row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// On-disk JSON shape of an instance.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    name: String,
    designs: Vec<String>,
    states: Vec<String>,
    benchmark: Vec<Vec<f64>>,
    algorithm: Vec<Vec<f64>>,
    /// Generator provenance; loaders preserve it but never interpret it.
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<serde_json::Value>,
}

/// A validated finite game instance.
///
/// Rows of both matrices follow the `designs` order, columns the `states`
/// order. Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    name: String,
    designs: Vec<String>,
    states: Vec<String>,
    benchmark: Matrix,
    algorithm: Matrix,
    generator: Option<serde_json::Value>,
}

impl GameInstance {
    pub fn new(
        name: impl Into<String>,
        designs: Vec<String>,
        states: Vec<String>,
        benchmark: Vec<Vec<f64>>,
        algorithm: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::with_generator(name, designs, states, benchmark, algorithm, None)
    }

    pub fn with_generator(
        name: impl Into<String>,
        designs: Vec<String>,
        states: Vec<String>,
        benchmark: Vec<Vec<f64>>,
        algorithm: Vec<Vec<f64>>,
        generator: Option<serde_json::Value>,
    ) -> Result<Self> {
        if designs.is_empty() {
            return Err(Error::validation("designs: must list at least one design"));
        }
        if states.is_empty() {
            return Err(Error::validation("states: must list at least one state"));
        }
        let m = designs.len();
        let n = states.len();
        let benchmark = check_shape("benchmark", &benchmark, m, n)?;
        let algorithm = check_shape("algorithm", &algorithm, m, n)?;
        for r in 0..m {
            for c in 0..n {
                let b = benchmark.get(r, c);
                if !b.is_finite() || b < 0.0 {
                    return Err(Error::validation(format!(
                        "benchmark[{r}][{c}] = {b}: entries must be finite and >= 0"
                    )));
                }
                let a = algorithm.get(r, c);
                if !a.is_finite() || a <= 0.0 {
                    return Err(Error::validation(format!(
                        "algorithm[{r}][{c}] = {a}: entries must be finite and > 0 \
                         (this tool requires every entry positive, which is stronger than \
                         the minimal condition of one design row with all-positive entries)"
                    )));
                }
                if !(b / a).is_finite() {
                    return Err(Error::validation(format!(
                        "ratio benchmark[{r}][{c}] / algorithm[{r}][{c}] = {b} / {a} \
                         overflows; every cell ratio must be finite"
                    )));
                }
            }
        }
        Ok(GameInstance {
            name: name.into(),
            designs,
            states,
            benchmark,
            algorithm,
            generator,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn designs(&self) -> &[String] {
        &self.designs
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Number of designs (rows).
    pub fn num_designs(&self) -> usize {
        self.designs.len()
    }

    /// Number of states (columns).
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn benchmark(&self) -> &Matrix {
        &self.benchmark
    }

    pub fn algorithm(&self) -> &Matrix {
        &self.algorithm
    }

    pub fn generator_meta(&self) -> Option<&serde_json::Value> {
        self.generator.as_ref()
    }

    pub fn check_design(&self, design: usize) -> Result<()> {
        if design >= self.num_designs() {
            return Err(Error::index(format!(
                "design {design} out of range (instance has {} designs)",
                self.num_designs()
            )));
        }
        Ok(())
    }

    pub fn check_state(&self, state: usize) -> Result<()> {
        if state >= self.num_states() {
            return Err(Error::index(format!(
                "state {state} out of range (instance has {} states)",
                self.num_states()
            )));
        }
        Ok(())
    }

    /// Serializes to the instance file format (pretty JSON, stable key order).
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            name: self.name.clone(),
            designs: self.designs.clone(),
            states: self.states.clone(),
            benchmark: self.benchmark.to_rows(),
            algorithm: self.algorithm.to_rows(),
            generator: self.generator.clone(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("instance serialization");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        GameInstance::with_generator(
            file.name,
            file.designs,
            file.states,
            file.benchmark,
            file.algorithm,
            file.generator,
        )
    }
}

fn check_shape(field: &str, rows: &[Vec<f64>], m: usize, n: usize) -> Result<Matrix> {
    if rows.len() != m {
        return Err(Error::validation(format!(
            "dimension mismatch: {field} has {} rows, expected {m} (one per design)",
            rows.len()
        )));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::validation(format!(
                "dimension mismatch: {field} row {i} has {} columns, expected {n} (one per state)",
                r.len()
            )));
        }
    }
    Matrix::from_rows(rows)
}

/// Reads and validates an instance from a byte stream of the JSON format.
pub fn load_instance(mut source: impl Read) -> Result<GameInstance> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse(format!("read failed: {e}")))?;
    GameInstance::from_json(&text)
}

/// On-disk JSON shape of a distribution.
#[derive(Serialize, Deserialize)]
struct DistFile {
    weights: Vec<f64>,
}

/// A probability vector over a finite index set.
///
/// Weights are non-negative and sum to 1 (input sums may drift from 1 by at
/// most [`DIST_SUM_TOL`]; anything further off is rejected rather than
/// silently renormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validates `weights` as a distribution over a space of `space_size`
    /// indices.
    pub fn new(weights: Vec<f64>, space_size: usize) -> Result<Self> {
        if weights.len() != space_size {
            return Err(Error::validation(format!(
                "distribution has {} weights, expected {space_size}",
                weights.len()
            )));
        }
        let mut sum = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::validation(format!("weights[{i}] = {w}: must be finite")));
            }
            if w < 0.0 {
                return Err(Error::validation(format!("weights[{i}] = {w}: must be >= 0")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > DIST_SUM_TOL {
            return Err(Error::validation(format!(
                "weights sum = {sum}, must be within {DIST_SUM_TOL} of 1"
            )));
        }
        let mut weights = weights;
        if sum != 1.0 {
            for w in &mut weights {
                *w /= sum;
            }
        }
        Ok(Distribution { weights })
    }

    /// The point mass at `index` in a space of `space_size` indices.
    pub fn point_mass(index: usize, space_size: usize) -> Result<Self> {
        if index >= space_size {
            return Err(Error::index(format!(
                "point mass index {index} out of range for space of size {space_size}"
            )));
        }
        let mut weights = vec![0.0; space_size];
        weights[index] = 1.0;
        Ok(Distribution { weights })
    }

    pub fn uniform(space_size: usize) -> Result<Self> {
        if space_size == 0 {
            return Err(Error::validation("uniform distribution needs a non-empty space"));
        }
        Ok(Distribution { weights: vec![1.0 / space_size as f64; space_size] })
    }

    /// Normalizes raw non-negative weights (used by solvers; not a file
    /// loader, so drift beyond [`DIST_SUM_TOL`] is fine here).
    pub(crate) fn normalize(raw: &[f64]) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::validation(format!("cannot normalize weights with sum {sum}")));
        }
        let weights = raw.iter().map(|w| (w / sum).max(0.0)).collect();
        Ok(Distribution { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Indices with strictly positive weight.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, _)| i)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&DistFile { weights: self.weights.clone() })
            .expect("distribution serialization");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = file.weights.len();
        Distribution::new(file.weights, n)
    }
}

/// Validates `weights` against `space_size` and builds a [`Distribution`].
pub fn make_distribution(weights: Vec<f64>, space_size: usize) -> Result<Distribution> {
    Distribution::new(weights, space_size)
}

/// The point mass at `index` over `space_size` indices.
pub fn point_mass(index: usize, space_size: usize) -> Result<Distribution> {
    Distribution::point_mass(index, space_size)
}

/// Tolerances and iteration limits shared by the solvers and the verifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute tolerance for inequality and equality checks.
    pub abs_tol: f64,
    /// Relative tolerance; applies only to comparisons at magnitude > 1.
    pub rel_tol: f64,
    /// Iteration cap for the root bracketing in the ROE solve.
    pub max_bisection_iters: usize,
    /// Certificate slack allowed on a zero-sum game solution.
    pub lp_tol: f64,
    /// Pivot cap for a single zero-sum solve.
    pub max_lp_iters: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_bisection_iters: 200,
            lp_tol: 1e-10,
            max_lp_iters: 10_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("lp_tol", self.lp_tol),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::validation(format!("{label} = {v}: must be > 0")));
            }
        }
        if self.max_bisection_iters < 1 || self.max_lp_iters < 1 {
            return Err(Error::validation("iteration limits must be >= 1"));
        }
        Ok(())
    }

    /// Effective comparison tolerance at the given magnitude: `abs_tol`
    /// throughout, widened by `rel_tol` only when |scale| exceeds 1.
    pub fn gap(&self, scale: f64) -> f64 {
        if scale.abs() > 1.0 {
            self.abs_tol.max(self.rel_tol * scale.abs())
        } else {
            self.abs_tol
        }
    }
}
