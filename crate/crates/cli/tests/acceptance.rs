//! Acceptance suite: every release criterion as one test, run at the
//! stated tolerance, printing one pass/fail line per criterion.
//!
//! The corpus used throughout is 1,000 seeded random instances with
//! dimensions up to 12x12 and entries uniform in (0.1, 10). The ski-rental
//! golden values are cross-checked against a support-enumeration
//! equilibrium oracle and a brute-force simplex grid before being asserted
//! against the solvers.

use std::fs;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratiobound::generators::{corpus, gen_ski_rental, random_distributions, SkiRentalParams};
use ratiobound::verify::{
    check_eor_chain_with_faults, check_roe_chain_with_faults, check_weak_equalities, CheckStatus,
    FaultInjection,
};
use ratiobound::{
    act_second_min, adversary_sup_roe_fixed_design, best_adversary_eor, best_adversary_roe,
    dominance_witness, eor_lower_bound, eor_value, fraction_compare, fraction_monotonicity,
    make_distribution, point_mass, pure_minimax, ratio_cost, ratio_matrix, roe_lower_bound,
    roe_value, worst_state_pure, Distribution, GameInstance, Matrix, ToleranceConfig,
};

const CORPUS_SEED: u64 = 20240;
const ABS_TOL: f64 = 1e-9;

fn corpus_1000() -> Vec<GameInstance> {
    corpus(1000, 12, 0.1, 10.0, CORPUS_SEED)
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

#[test]
fn criterion_01_equal_ratio_identity_to_machine_precision() {
    let inst = GameInstance::new(
        "equal-ratio-fractions",
        vec!["d0".into()],
        vec!["s0".into(), "s1".into()],
        vec![vec![4.0, 2.0]],
        vec![vec![10.0, 5.0]],
    )
    .unwrap();
    let half = make_distribution(vec![0.5, 0.5], 2).unwrap();
    assert_eq!(eor_value(&inst, 0, &half).unwrap(), 0.4);
    assert_eq!(roe_value(&inst, 0, &half).unwrap(), 0.4);
    println!("acceptance criterion 1 (equal-ratio EOR = ROE identity): PASS");
}

#[test]
fn criterion_02_mixed_state_supremum_dominates_sampled_mixtures() {
    for (k, inst) in corpus_1000().iter().enumerate() {
        let m = inst.num_designs();
        let n = inst.num_states();
        let sups: Vec<_> = (0..m).map(|d| worst_state_pure(inst, d).unwrap()).collect();

        // 10^5 random mixtures per instance, shared across designs.
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ k as u64);
        let mut weights = vec![0.0; n];
        let mut sampled_max = vec![f64::NEG_INFINITY; m];
        for _ in 0..100_000 {
            let mut sum = 0.0;
            for w in weights.iter_mut() {
                let u: f64 = rng.random();
                *w = -(1.0 - u).ln();
                sum += *w;
            }
            for w in weights.iter_mut() {
                *w /= sum;
            }
            for d in 0..m {
                let b = inst.benchmark().row(d);
                let a = inst.algorithm().row(d);
                let mut num = 0.0;
                let mut den = 0.0;
                for s in 0..n {
                    num += weights[s] * b[s];
                    den += weights[s] * a[s];
                }
                let roe = num / den;
                if roe > sampled_max[d] {
                    sampled_max[d] = roe;
                }
            }
        }

        // The inline evaluation above must agree with the public API (the
        // constructor may renormalize by one ulp, hence the tiny slack).
        let dist = Distribution::new(weights.clone(), n).unwrap();
        for d in 0..m {
            let b = inst.benchmark().row(d);
            let a = inst.algorithm().row(d);
            let mut num = 0.0;
            let mut den = 0.0;
            for s in 0..n {
                num += weights[s] * b[s];
                den += weights[s] * a[s];
            }
            let api = roe_value(inst, d, &dist).unwrap();
            let manual = num / den;
            assert!((api - manual).abs() <= 1e-12 * (1.0 + manual.abs()));
        }

        for d in 0..m {
            assert!(
                sampled_max[d] <= sups[d].value + ABS_TOL,
                "{}: design {d} sampled {} > sup {}",
                inst.name(),
                sampled_max[d],
                sups[d].value
            );
            let pm = point_mass(sups[d].argmax_state.unwrap(), n).unwrap();
            assert_eq!(
                roe_value(inst, d, &pm).unwrap(),
                sups[d].value,
                "{}: design {d} point mass must attain the supremum exactly",
                inst.name()
            );
        }
    }
    println!("acceptance criterion 2 (sampled mixtures never beat the pure supremum): PASS");
}

#[test]
fn criterion_03_bound_chains_hold_on_corpus() {
    let tol = tol();
    for (k, inst) in corpus_1000().iter().enumerate() {
        let pure = pure_minimax(inst).value;
        let roe_sup = best_adversary_roe(inst, &tol).unwrap().value;
        let eor_sup = best_adversary_eor(inst, &tol).unwrap().value;
        assert!(
            pure - roe_sup >= -ABS_TOL,
            "{}: pure {pure} < roe sup {roe_sup}",
            inst.name()
        );
        assert!(
            pure - eor_sup >= -ABS_TOL,
            "{}: pure {pure} < eor sup {eor_sup}",
            inst.name()
        );
        let dists = random_distributions(inst.num_states(), 5, 0xD15 + k as u64);
        for dist in &dists {
            let roe_lb = roe_lower_bound(inst, dist).unwrap().value;
            let eor_lb = eor_lower_bound(inst, dist).unwrap().value;
            assert!(
                roe_sup - roe_lb >= -ABS_TOL,
                "{}: roe sup {roe_sup} < lb {roe_lb}",
                inst.name()
            );
            assert!(
                eor_sup - eor_lb >= -ABS_TOL,
                "{}: eor sup {eor_sup} < lb {eor_lb}",
                inst.name()
            );
        }
        // The verifier's own grading of both chains must agree.
        let no_faults = FaultInjection::default();
        let eor_report = check_eor_chain_with_faults(inst, &dists, &tol, no_faults).unwrap();
        assert_eq!(eor_report.overall, CheckStatus::Pass, "{}", eor_report.to_text());
        let roe_report = check_roe_chain_with_faults(inst, &dists, &tol, no_faults).unwrap();
        assert_eq!(roe_report.overall, CheckStatus::Pass, "{}", roe_report.to_text());
    }
    println!("acceptance criterion 3 (pure >= sup-inf >= fixed-mixture bound, EOR and ROE): PASS");
}

#[test]
fn criterion_04_three_way_minmax_equality_on_corpus() {
    let tol = tol();
    for inst in corpus_1000() {
        let pure = pure_minimax(&inst).value;
        let minmax_eor = (0..inst.num_designs())
            .map(|d| worst_state_pure(&inst, d).unwrap().value)
            .fold(f64::INFINITY, f64::min);
        let minmax_roe = (0..inst.num_designs())
            .map(|d| adversary_sup_roe_fixed_design(&inst, d).unwrap().0)
            .fold(f64::INFINITY, f64::min);
        assert!((pure - minmax_eor).abs() <= ABS_TOL, "{}", inst.name());
        assert!((pure - minmax_roe).abs() <= ABS_TOL, "{}", inst.name());
        let report = check_weak_equalities(&inst, &tol).unwrap();
        assert_eq!(report.overall, CheckStatus::Pass, "{}", report.to_text());
    }
    println!("acceptance criterion 4 (pure = minmax EOR = minmax ROE): PASS");
}

#[test]
fn criterion_05_dominance_witness_on_corpus() {
    for (k, inst) in corpus_1000().iter().enumerate() {
        for dist in random_distributions(inst.num_states(), 100, 0xD0D0 + k as u64) {
            for d in 0..inst.num_designs() {
                let witness =
                    dominance_witness(inst.benchmark().row(d), inst.algorithm().row(d), &dist)
                        .unwrap();
                let witness_ratio = ratio_cost(inst, d, witness.index).unwrap();
                let roe = roe_value(inst, d, &dist).unwrap();
                assert!(
                    witness_ratio >= roe - ABS_TOL,
                    "{}: design {d} witness {} < roe {}",
                    inst.name(),
                    witness_ratio,
                    roe
                );
            }
        }
    }
    println!("acceptance criterion 5 (dominance witness ratio >= ROE): PASS");
}

#[test]
fn criterion_06_fraction_rules_and_mixture_minimum() {
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF2AC);
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    for case in 0..10_000 {
        let mut draw = || rng.random_range(0.1..10.0);
        let (kappa, a1, a2, b1, b2) = (draw(), draw(), draw(), draw(), draw());
        let compare = fraction_compare(kappa, a1, a2, b1, b2, &tol).unwrap();
        assert!(compare.holds, "case {case}: {compare:?}");
        // The blend stays between the two anchor ratios at the raw
        // tolerance, independent of the report's comparison widening.
        assert!(
            compare.q >= compare.a.min(compare.b) - ABS_TOL
                && compare.q <= compare.a.max(compare.b) + ABS_TOL,
            "case {case}: {compare:?}"
        );
        let mono = fraction_monotonicity(a1, a2, b1, b2, &grid, &tol).unwrap();
        assert!(mono.holds, "case {case}: {mono:?}");
        for w in mono.samples.windows(2) {
            let step = w[1] - w[0];
            let ok = if mono.a > mono.b {
                step >= -ABS_TOL
            } else if mono.a < mono.b {
                step <= ABS_TOL
            } else {
                step.abs() <= ABS_TOL
            };
            assert!(ok, "case {case}: {mono:?}");
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xAC75);
    for case in 0..1000 {
        let len = rng.random_range(1..=12);
        let pairs: Vec<(f64, f64)> = (0..len)
            .map(|_| (rng.random_range(0.1..10.0), rng.random_range(0.1..10.0)))
            .collect();
        let (min_ratio, _) = act_second_min(&pairs).unwrap();
        // Brute force over 10^4 mixtures; the simplex vertices are in the
        // candidate set, which is where the minimum lives.
        let mut brute = f64::INFINITY;
        for i in 0..len {
            brute = brute.min(pairs[i].0 / pairs[i].1);
        }
        for _ in 0..10_000 {
            let raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let sum: f64 = raw.iter().sum();
            let num: f64 = pairs.iter().zip(&raw).map(|(&(a, _), &x)| x / sum * a).sum();
            let den: f64 = pairs.iter().zip(&raw).map(|(&(_, b), &x)| x / sum * b).sum();
            brute = brute.min(num / den);
        }
        assert!(
            (brute - min_ratio).abs() <= ABS_TOL,
            "case {case}: brute {brute} vs act_second_min {min_ratio}"
        );
    }
    println!("acceptance criterion 6 (fraction rules and mixture minimum): PASS");
}

#[test]
fn criterion_07_ski_rental_eor_cross_check() {
    let tol = tol();

    let ski23 = gen_ski_rental(SkiRentalParams { buy_cost: 2, horizon: 3 }).unwrap();
    assert_eq!(pure_minimax(&ski23).value, 1.5, "pure must be 2 - 1/b exactly");
    let closed23 = 1.0 / (1.0 - 0.5f64.powi(2)); // 4/3
    let oracle23 = support_enumeration_value(&ratio_matrix(&ski23)).expect("equilibrium");
    assert!((oracle23 - closed23).abs() <= 1e-9, "oracle {oracle23}");
    let solved23 = best_adversary_eor(&ski23, &tol).unwrap().value;
    assert!((solved23 - closed23).abs() <= 1e-6, "solver {solved23}");

    let ski48 = gen_ski_rental(SkiRentalParams { buy_cost: 4, horizon: 8 }).unwrap();
    let closed48 = 256.0 / 175.0; // 1/(1-(3/4)^4)
    let oracle48 = support_enumeration_value(&ratio_matrix(&ski48)).expect("equilibrium");
    assert!((oracle48 - closed48).abs() <= 1e-9, "oracle {oracle48}");
    let solved48 = best_adversary_eor(&ski48, &tol).unwrap().value;
    assert!((solved48 - closed48).abs() <= 1e-6, "solver {solved48}");

    println!("acceptance criterion 7 (ski-rental EOR values match closed forms): PASS");
}

#[test]
fn criterion_08_ski_rental_roe_fractional_solve() {
    let inst = gen_ski_rental(SkiRentalParams { buy_cost: 2, horizon: 3 }).unwrap();
    let sol = best_adversary_roe(&inst, &tol()).unwrap();
    assert!((sol.value - 4.0 / 3.0).abs() <= 1e-6, "lambda {}", sol.value);

    // Adversary support must be {day 1, day 3} at weight 1/2 each.
    let w = sol.adversary_dist.weights();
    assert!((w[0] - 0.5).abs() <= 1e-6, "dist {w:?}");
    assert!(w[1].abs() <= 1e-6, "dist {w:?}");
    assert!((w[2] - 0.5).abs() <= 1e-6, "dist {w:?}");

    // Independent grid search over the 2-simplex at resolution 1e-3.
    let b = inst.benchmark();
    let a = inst.algorithm();
    let steps = 1000;
    let mut grid_best = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let d = [
                i as f64 / steps as f64,
                j as f64 / steps as f64,
                (steps - i - j) as f64 / steps as f64,
            ];
            let v = (0..4)
                .map(|r| {
                    let num: f64 = (0..3).map(|s| d[s] * b.get(r, s)).sum();
                    let den: f64 = (0..3).map(|s| d[s] * a.get(r, s)).sum();
                    num / den
                })
                .fold(f64::INFINITY, f64::min);
            grid_best = grid_best.max(v);
        }
    }
    assert!((grid_best - 4.0 / 3.0).abs() <= 2.5e-3, "grid {grid_best}");
    assert!(grid_best <= sol.value + 1e-6, "grid beat the solved value");

    println!("acceptance criterion 8 (ski-rental ROE solve and adversary support): PASS");
}

#[test]
fn criterion_09_perturbed_solver_outputs_fail_verification() {
    let tol = tol();
    let instances: Vec<GameInstance> = corpus_1000().into_iter().take(5).collect();
    let offsets = [1e-7, -1e-7];
    // Each named solver output, perturbed in each direction, must trip at
    // least one check on at least one corpus instance.
    for (target, eor_side) in [
        ("pure_minimax", true),
        ("eor_sup_inf", true),
        ("roe_sup_inf", false),
        ("eor_lower_bound", true),
        ("roe_lower_bound", false),
    ] {
        for &offset in &offsets {
            let faults = match target {
                "pure_minimax" => FaultInjection { pure_offset: offset, ..Default::default() },
                "eor_sup_inf" | "roe_sup_inf" => {
                    FaultInjection { sup_offset: offset, ..Default::default() }
                }
                _ => FaultInjection { bound_offset: offset, ..Default::default() },
            };
            let mut tripped = false;
            for (k, inst) in instances.iter().enumerate() {
                let dists = random_distributions(inst.num_states(), 3, 0xFA17 + k as u64);
                let report = if eor_side {
                    check_eor_chain_with_faults(inst, &dists, &tol, faults).unwrap()
                } else {
                    check_roe_chain_with_faults(inst, &dists, &tol, faults).unwrap()
                };
                if report.overall == CheckStatus::Fail {
                    tripped = true;
                    break;
                }
            }
            assert!(tripped, "perturbing {target} by {offset} went unnoticed");
        }
    }
    println!("acceptance criterion 9 (verifier fails under 1e-7 perturbations): PASS");
}

#[test]
fn criterion_10_cli_reports_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_ratiobound");
    let dir = std::env::temp_dir().join(format!("ratiobound-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();

    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("binary runs");
        (out.status.code().unwrap_or(-1), out.stdout)
    };

    // Generated files are byte-identical across runs.
    let gen_a = dir.join("gen-a.json");
    let gen_b = dir.join("gen-b.json");
    for path in [&gen_a, &gen_b] {
        let (code, _) = run(&[
            "gen", "random", "--designs", "6", "--states", "5", "--seed", "31",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&gen_a).unwrap(), fs::read(&gen_b).unwrap());

    // Solve and verify reports are byte-identical across runs.
    let inst = gen_a.to_str().unwrap();
    for args in [
        vec!["solve", inst, "--objective", "roe"],
        vec!["solve", inst, "--objective", "eor"],
        vec!["verify", inst, "--random-dists", "5", "--seed", "11"],
        vec!["verify", inst, "--random-dists", "3", "--seed", "4", "--deep",
             "--deep-samples", "2000"],
    ] {
        let (code_a, out_a) = run(&args);
        let (code_b, out_b) = run(&args);
        assert_eq!(code_a, 0, "args {args:?}");
        assert_eq!(code_b, 0);
        assert_eq!(out_a, out_b, "non-deterministic output for {args:?}");
    }
    println!("acceptance criterion 10 (byte-identical CLI reports): PASS");
}

// ---------------------------------------------------------------------------
// Independent oracle: support-enumeration equilibrium search. Solves the
// equalization linear systems for every equal-size support pair and accepts
// when both strategies are non-negative and no unilateral deviation helps.

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col];
        for j in col..n {
            a[col][j] /= p;
        }
        b[col] /= p;
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in col..n {
                    a[r][j] -= f * a[col][j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some(b)
}

fn support_enumeration_value(m: &Matrix) -> Option<f64> {
    let rows = m.rows();
    let cols = m.cols();
    for rmask in 1u32..(1 << rows) {
        let rset: Vec<usize> = (0..rows).filter(|r| rmask >> r & 1 == 1).collect();
        let k = rset.len();
        for cmask in 1u32..(1 << cols) {
            if (cmask.count_ones() as usize) != k {
                continue;
            }
            let cset: Vec<usize> = (0..cols).filter(|c| cmask >> c & 1 == 1).collect();

            let size = k + 1;
            let mut a = vec![vec![0.0; size]; size];
            let mut b = vec![0.0; size];
            for (i, &r) in rset.iter().enumerate() {
                for (j, &c) in cset.iter().enumerate() {
                    a[i][j] = m.get(r, c);
                }
                a[i][k] = -1.0;
            }
            for j in 0..k {
                a[k][j] = 1.0;
            }
            b[k] = 1.0;
            let Some(sol) = solve_linear(a, b) else { continue };
            let v = sol[k];
            if sol[..k].iter().any(|&x| x < -1e-9) {
                continue;
            }

            let mut a2 = vec![vec![0.0; size]; size];
            let mut b2 = vec![0.0; size];
            for (j, &c) in cset.iter().enumerate() {
                for (i, &r) in rset.iter().enumerate() {
                    a2[j][i] = m.get(r, c);
                }
                a2[j][k] = -1.0;
            }
            for i in 0..k {
                a2[k][i] = 1.0;
            }
            b2[k] = 1.0;
            let Some(sol2) = solve_linear(a2, b2) else { continue };
            if sol2[..k].iter().any(|&x| x < -1e-9) || (v - sol2[k]).abs() > 1e-7 {
                continue;
            }

            let mut d = vec![0.0; cols];
            for (j, &c) in cset.iter().enumerate() {
                d[c] = sol[j].max(0.0);
            }
            let rows_ok = (0..rows)
                .all(|r| (0..cols).map(|c| m.get(r, c) * d[c]).sum::<f64>() >= v - 1e-7);
            let mut q = vec![0.0; rows];
            for (i, &r) in rset.iter().enumerate() {
                q[r] = sol2[i].max(0.0);
            }
            let cols_ok = (0..cols)
                .all(|c| (0..rows).map(|r| q[r] * m.get(r, c)).sum::<f64>() <= v + 1e-7);
            if rows_ok && cols_ok {
                return Some(v);
            }
        }
    }
    None
}
