//! Benchmark instance generators: the rent-or-buy (ski rental) game,
//! seeded random instances, and constant-ratio edge cases.
//!
//! All randomness comes from ChaCha8 seeded with a caller-supplied 64-bit
//! seed, so identical parameters produce identical instances on every
//! platform. The generator name and parameters are embedded in the
//! instance metadata; loaders carry the metadata through untouched.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::instance::{Distribution, GameInstance};

const PRNG_NAME: &str = "chacha8";

/// Parameters for the rent-or-buy instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkiRentalParams {
    /// Purchase price b in rent units, at least 2.
    pub buy_cost: u32,
    /// Number of possible stopping days, at least buy_cost + 1 so that
    /// never buying is not weakly optimal everywhere.
    pub horizon: u32,
}

/// Builds the rent-or-buy game. Designs are purchase thresholds
/// i ∈ {1..horizon+1} (buy at the start of day i; horizon+1 never buys),
/// states are adversary stopping days j ∈ {1..horizon}.
///
/// The benchmark holds the designer's incurred cost, the algorithm matrix
/// the offline optimal cost min(j, b), so each cell ratio is the classic
/// competitive ratio and is always at least 1. This is the cost-problem
/// orientation (designer cost over offline optimum), recorded in the
/// instance name.
pub fn gen_ski_rental(p: SkiRentalParams) -> Result<GameInstance> {
    if p.buy_cost < 2 {
        return Err(Error::validation(format!(
            "buy_cost = {}: must be at least 2",
            p.buy_cost
        )));
    }
    if p.horizon < p.buy_cost + 1 {
        return Err(Error::validation(format!(
            "horizon = {}: must be at least buy_cost + 1 = {}",
            p.horizon,
            p.buy_cost + 1
        )));
    }
    let b = p.buy_cost as f64;
    let h = p.horizon as usize;

    let mut designs: Vec<String> = (1..=h).map(|i| format!("threshold-{i}")).collect();
    designs.push("never-buy".to_string());
    let states: Vec<String> = (1..=h).map(|j| format!("day-{j}")).collect();

    let mut benchmark = Vec::with_capacity(h + 1);
    let mut algorithm = Vec::with_capacity(h + 1);
    for i in 1..=h + 1 {
        let mut brow = Vec::with_capacity(h);
        let mut arow = Vec::with_capacity(h);
        for j in 1..=h {
            let designer_cost = if j < i { j as f64 } else { (i - 1) as f64 + b };
            brow.push(designer_cost);
            arow.push((j as f64).min(b));
        }
        benchmark.push(brow);
        algorithm.push(arow);
    }

    GameInstance::with_generator(
        format!("ski-rental-b{}-h{}-cost-over-opt", p.buy_cost, p.horizon),
        designs,
        states,
        benchmark,
        algorithm,
        Some(json!({
            "kind": "ski-rental",
            "buy_cost": p.buy_cost,
            "horizon": p.horizon,
            "orientation": "designer-cost-over-offline-opt",
        })),
    )
}

/// Seeded random instance with entries drawn uniformly from [lo, hi).
pub fn gen_random(m: usize, n: usize, seed: u64, lo: f64, hi: f64) -> Result<GameInstance> {
    if m < 1 || n < 1 {
        return Err(Error::validation("instance needs at least one design and one state"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::validation(format!(
            "entry range [{lo}, {hi}): need 0 < lo < hi"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize| -> Vec<Vec<f64>> {
        (0..count).map(|_| (0..n).map(|_| rng.random_range(lo..hi)).collect()).collect()
    };
    let benchmark = draw(m);
    let algorithm = draw(m);
    GameInstance::with_generator(
        format!("random-{m}x{n}-seed{seed}-{PRNG_NAME}"),
        (0..m).map(|i| format!("d{i}")).collect(),
        (0..n).map(|j| format!("s{j}")).collect(),
        benchmark,
        algorithm,
        Some(json!({
            "kind": "random",
            "designs": m,
            "states": n,
            "seed": seed,
            "lo": lo,
            "hi": hi,
            "prng": PRNG_NAME,
        })),
    )
}

/// Seeded instance with benchmark = c · algorithm, so every cell ratio —
/// and every derived bound — equals c.
pub fn gen_constant_ratio(m: usize, n: usize, c: f64, seed: u64) -> Result<GameInstance> {
    if m < 1 || n < 1 {
        return Err(Error::validation("instance needs at least one design and one state"));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::validation(format!("ratio c = {c}: must be finite and > 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let algorithm: Vec<Vec<f64>> =
        (0..m).map(|_| (0..n).map(|_| rng.random_range(0.5..5.0)).collect()).collect();
    let benchmark: Vec<Vec<f64>> =
        algorithm.iter().map(|row| row.iter().map(|&a| c * a).collect()).collect();
    GameInstance::with_generator(
        format!("const-ratio-{m}x{n}-c{c}-seed{seed}-{PRNG_NAME}"),
        (0..m).map(|i| format!("d{i}")).collect(),
        (0..n).map(|j| format!("s{j}")).collect(),
        benchmark,
        algorithm,
        Some(json!({
            "kind": "constant-ratio",
            "ratio": c,
            "designs": m,
            "states": n,
            "seed": seed,
            "prng": PRNG_NAME,
        })),
    )
}

/// The standard verification corpus: `count` seeded random instances with
/// dimensions drawn from 1..=max_dim and entries from [lo, hi).
pub fn corpus(count: usize, max_dim: usize, lo: f64, hi: f64, seed: u64) -> Vec<GameInstance> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let m = master.random_range(1..=max_dim);
            let n = master.random_range(1..=max_dim);
            let inst_seed = master.random::<u64>();
            let inst = gen_random(m, n, inst_seed, lo, hi).expect("corpus parameters are valid");
            // Re-label so the corpus position is visible in reports.
            GameInstance::with_generator(
                format!("corpus-{k}-{}", inst.name()),
                inst.designs().to_vec(),
                inst.states().to_vec(),
                inst.benchmark().to_rows(),
                inst.algorithm().to_rows(),
                inst.generator_meta().cloned(),
            )
            .expect("corpus instance is valid")
        })
        .collect()
}

/// `count` seeded random distributions over a space of `n` indices,
/// sampled uniformly from the simplex via exponential spacings.
pub fn random_distributions(n: usize, count: usize, seed: u64) -> Vec<Distribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_simplex(&mut rng, n)).collect()
}

pub(crate) fn sample_simplex(rng: &mut ChaCha8Rng, n: usize) -> Distribution {
    let mut raw = vec![0.0; n];
    let mut sum = 0.0;
    for w in &mut raw {
        let u: f64 = rng.random();
        *w = -(1.0 - u).ln();
        sum += *w;
    }
    if sum <= 0.0 {
        return Distribution::uniform(n).expect("n >= 1");
    }
    Distribution::normalize(&raw).expect("positive sum")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::make_distribution;
    use crate::ratio::{eor_value, pure_minimax, ratio_cost, roe_value, worst_state_pure};

    #[test]
    fn ski_rental_b2_h3_table() {
        let inst = gen_ski_rental(SkiRentalParams { buy_cost: 2, horizon: 3 }).unwrap();
        assert_eq!(inst.num_designs(), 4);
        assert_eq!(inst.num_states(), 3);
        assert_eq!(
            inst.benchmark().to_rows(),
            vec![
                vec![2.0, 2.0, 2.0],
                vec![1.0, 3.0, 3.0],
                vec![1.0, 2.0, 4.0],
                vec![1.0, 2.0, 3.0],
            ]
        );
        for d in 0..4 {
            assert_eq!(inst.algorithm().row(d), &[1.0, 2.0, 2.0]);
        }
        assert_eq!(pure_minimax(&inst).value, 1.5);
    }

    #[test]
    fn ski_rental_threshold_b_matches_deterministic_ratio() {
        for b in [2u32, 4, 8] {
            let inst = gen_ski_rental(SkiRentalParams { buy_cost: b, horizon: 2 * b }).unwrap();
            let row = worst_state_pure(&inst, (b - 1) as usize).unwrap();
            assert_eq!(row.value, 2.0 - 1.0 / b as f64, "b = {b}");
        }
    }

    #[test]
    fn ski_rental_first_day_column_is_raw_benchmark() {
        let inst = gen_ski_rental(SkiRentalParams { buy_cost: 3, horizon: 5 }).unwrap();
        for d in 0..inst.num_designs() {
            assert_eq!(inst.algorithm().get(d, 0), 1.0);
            assert_eq!(
                ratio_cost(&inst, d, 0).unwrap(),
                inst.benchmark().get(d, 0)
            );
        }
    }

    #[test]
    fn ski_rental_param_validation() {
        assert!(gen_ski_rental(SkiRentalParams { buy_cost: 1, horizon: 5 }).is_err());
        assert!(gen_ski_rental(SkiRentalParams { buy_cost: 3, horizon: 3 }).is_err());
    }

    #[test]
    fn random_generation_is_deterministic() {
        let a = gen_random(2, 2, 7, 0.1, 10.0).unwrap();
        let b = gen_random(2, 2, 7, 0.1, 10.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = gen_random(2, 2, 8, 0.1, 10.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_1x1_pure_value() {
        let inst = gen_random(1, 1, 3, 0.1, 10.0).unwrap();
        let expect = inst.benchmark().get(0, 0) / inst.algorithm().get(0, 0);
        assert_eq!(pure_minimax(&inst).value, expect);
    }

    #[test]
    fn random_rejects_bad_range() {
        assert!(gen_random(2, 2, 0, 0.0, 1.0).is_err());
        assert!(gen_random(2, 2, 0, 2.0, 1.0).is_err());
        assert!(gen_random(0, 2, 0, 0.1, 1.0).is_err());
    }

    #[test]
    fn constant_ratio_collapses_eor_and_roe() {
        let inst = gen_constant_ratio(3, 4, 0.4, 11).unwrap();
        assert!((pure_minimax(&inst).value - 0.4).abs() <= 1e-12);
        let dists = [
            Distribution::uniform(4).unwrap(),
            make_distribution(vec![0.7, 0.1, 0.1, 0.1], 4).unwrap(),
            Distribution::point_mass(2, 4).unwrap(),
        ];
        for d in 0..inst.num_designs() {
            for dist in &dists {
                let eor = eor_value(&inst, d, dist).unwrap();
                let roe = roe_value(&inst, d, dist).unwrap();
                assert!((eor - 0.4).abs() <= 1e-12);
                assert!((roe - 0.4).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn generator_metadata_survives_round_trip() {
        let inst = gen_random(2, 3, 42, 0.1, 10.0).unwrap();
        let meta = inst.generator_meta().unwrap();
        assert_eq!(meta["prng"], "chacha8");
        let back = GameInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back.generator_meta(), inst.generator_meta());
    }

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = corpus(20, 12, 0.1, 10.0, 2024);
        let b = corpus(20, 12, 0.1, 10.0, 2024);
        assert_eq!(a, b);
        for inst in &a {
            assert!(inst.num_designs() >= 1 && inst.num_designs() <= 12);
            assert!(inst.num_states() >= 1 && inst.num_states() <= 12);
        }
    }

    #[test]
    fn random_distributions_are_valid_and_deterministic() {
        let a = random_distributions(5, 10, 99);
        let b = random_distributions(5, 10, 99);
        assert_eq!(a, b);
        for d in &a {
            assert_eq!(d.len(), 5);
            let sum: f64 = d.weights().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
    }
}
