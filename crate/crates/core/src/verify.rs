//! Numerical certification of the lower-bound chains on a given instance.
//!
//! Each check function recomputes the quantities of one chain — the pure
//! min-max value, a sup-inf game value, and fixed-mixture lower bounds —
//! and grades every inequality of the chain, recording the measured slack.
//! Witness replay checks confirm that every reported value is reproduced
//! by the strategy that allegedly achieves it, which is what makes the
//! verifier falsifiable: nudging any solver output breaks its replay.
//!
//! A solver failure downgrades the affected checks to `unverified` rather
//! than `failed`, keeping numerical trouble distinguishable from an actual
//! inequality violation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::generators::sample_simplex;
use crate::instance::{Distribution, GameInstance, ToleranceConfig};
use crate::ratio::{
    dominance_witness, eor_lower_bound, eor_value, pure_minimax, ratio_cost, roe_lower_bound,
    roe_on_weights, roe_value, worst_state_pure,
};
use crate::solver::{adversary_sup_roe_fixed_design, best_adversary_eor, best_adversary_roe};

/// Outcome of a single check or of a whole report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check could not be evaluated (solver failure), which is
    /// reported separately from a violated inequality.
    Unverified,
}

/// A labelled computed value.
#[derive(Debug, Clone, Serialize)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
}

/// One graded relation. Slack is lhs − rhs; a `>=` relation passes when
/// slack >= −tolerance, an `==` relation when |slack| <= tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub relation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Report for one bound chain on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub instance: String,
    pub chain: String,
    pub quantities: Vec<Quantity>,
    pub checks: Vec<Check>,
    pub overall: CheckStatus,
}

impl ChainReport {
    fn new(instance: &str, chain: &str) -> Self {
        ChainReport {
            instance: instance.to_string(),
            chain: chain.to_string(),
            quantities: Vec::new(),
            checks: Vec::new(),
            overall: CheckStatus::Pass,
        }
    }

    fn quantity(&mut self, label: impl Into<String>, value: f64) {
        self.quantities.push(Quantity { label: label.into(), value });
    }

    fn check_ge(&mut self, relation: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) {
        let slack = lhs - rhs;
        let status = if slack >= -tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check {
            relation: relation.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            status,
            note: None,
        });
    }

    fn check_eq(&mut self, relation: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) {
        let slack = lhs - rhs;
        let status = if slack.abs() <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check {
            relation: relation.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            slack: Some(slack),
            status,
            note: None,
        });
    }

    fn check_unverified(&mut self, relation: impl Into<String>, note: String) {
        self.checks.push(Check {
            relation: relation.into(),
            lhs: None,
            rhs: None,
            slack: None,
            status: CheckStatus::Unverified,
            note: Some(note),
        });
    }

    fn note_last(&mut self, note: impl Into<String>) {
        if let Some(last) = self.checks.last_mut() {
            last.note = Some(note.into());
        }
    }

    fn finish(mut self) -> Self {
        self.overall = summarize(self.checks.iter().map(|c| c.status));
        self
    }

    /// Fixed-width plain-text rendering. Values print with 12 significant
    /// digits, the same precision used by the JSON text consistency tests.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("instance: {}\n", self.instance));
        out.push_str(&format!("chain:    {}\n", self.chain));
        out.push_str("quantities:\n");
        for q in &self.quantities {
            out.push_str(&format!("  {:<58} {:>20}\n", q.label, format_sig(q.value, 12)));
        }
        out.push_str("checks:\n");
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Unverified => "unverified",
            };
            let fmt_opt = |v: Option<f64>| match v {
                Some(v) => format_sig(v, 12),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "  [{:<10}] {:<70} lhs {:>20} rhs {:>20} slack {:>20}\n",
                status,
                c.relation,
                fmt_opt(c.lhs),
                fmt_opt(c.rhs),
                fmt_opt(c.slack),
            ));
            if let Some(note) = &c.note {
                out.push_str(&format!("               note: {note}\n"));
            }
        }
        let overall = match self.overall {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Unverified => "unverified",
        };
        out.push_str(&format!("overall: {overall}\n"));
        out
    }
}

fn summarize(statuses: impl Iterator<Item = CheckStatus>) -> CheckStatus {
    let mut overall = CheckStatus::Pass;
    for s in statuses {
        match s {
            CheckStatus::Fail => return CheckStatus::Fail,
            CheckStatus::Unverified => overall = CheckStatus::Unverified,
            CheckStatus::Pass => {}
        }
    }
    overall
}

/// Formats with `sig` significant digits in plain decimal notation.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exp).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

/// Additive offsets injected into solver outputs before grading.
///
/// All-zero in normal operation. Non-zero offsets exist so the verifier can
/// demonstrate that it fails when fed wrong values (and so tests can prove
/// the tolerances are not vacuous).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaultInjection {
    pub pure_offset: f64,
    pub sup_offset: f64,
    pub bound_offset: f64,
}

impl FaultInjection {
    pub fn uniform(offset: f64) -> Self {
        FaultInjection { pure_offset: offset, sup_offset: offset, bound_offset: offset }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Objective {
    Eor,
    Roe,
}

impl Objective {
    fn label(self) -> &'static str {
        match self {
            Objective::Eor => "eor",
            Objective::Roe => "roe",
        }
    }
}

/// Grades `pure >= eor_sup_inf >= eor_lower_bound(d)` for each fixed d.
pub fn check_eor_chain(
    inst: &GameInstance,
    fixed_dists: &[Distribution],
    tol: &ToleranceConfig,
) -> Result<ChainReport> {
    check_chain(inst, fixed_dists, tol, Objective::Eor, FaultInjection::default())
}

/// Grades `pure >= roe_sup_inf >= roe_lower_bound(d)` for each fixed d.
pub fn check_roe_chain(
    inst: &GameInstance,
    fixed_dists: &[Distribution],
    tol: &ToleranceConfig,
) -> Result<ChainReport> {
    check_chain(inst, fixed_dists, tol, Objective::Roe, FaultInjection::default())
}

pub fn check_eor_chain_with_faults(
    inst: &GameInstance,
    fixed_dists: &[Distribution],
    tol: &ToleranceConfig,
    faults: FaultInjection,
) -> Result<ChainReport> {
    check_chain(inst, fixed_dists, tol, Objective::Eor, faults)
}

pub fn check_roe_chain_with_faults(
    inst: &GameInstance,
    fixed_dists: &[Distribution],
    tol: &ToleranceConfig,
    faults: FaultInjection,
) -> Result<ChainReport> {
    check_chain(inst, fixed_dists, tol, Objective::Roe, faults)
}

fn check_chain(
    inst: &GameInstance,
    fixed_dists: &[Distribution],
    tol: &ToleranceConfig,
    objective: Objective,
    faults: FaultInjection,
) -> Result<ChainReport> {
    let obj = objective.label();
    let mut report = ChainReport::new(inst.name(), &format!("{obj}-lower-bound-chain"));

    let pure = pure_minimax(inst);
    let pure_v = pure.value + faults.pure_offset;
    report.quantity("pure_minimax", pure_v);
    let d_star = pure.argmin_design.expect("pure minimax records its design");
    let s_star = pure.argmax_state.expect("pure minimax records its state");
    let witness = ratio_cost(inst, d_star, s_star)?;
    report.check_eq(
        format!("pure_minimax attained by cell ({d_star},{s_star})"),
        pure_v,
        witness,
        tol.gap(pure_v.abs().max(witness.abs())),
    );

    let sup = match objective {
        Objective::Eor => best_adversary_eor(inst, tol),
        Objective::Roe => best_adversary_roe(inst, tol),
    };
    let sup_v = match &sup {
        Ok(result) => {
            let v = result.value + faults.sup_offset;
            report.quantity(format!("{obj}_sup_inf"), v);
            report.quantity(format!("{obj}_sup_inf_residual"), result.residual);
            report.check_ge(
                format!("pure_minimax >= {obj}_sup_inf"),
                pure_v,
                v,
                tol.gap(pure_v.abs().max(v.abs())),
            );
            let replay = match objective {
                Objective::Eor => eor_lower_bound(inst, &result.adversary_dist)?.value,
                Objective::Roe => roe_lower_bound(inst, &result.adversary_dist)?.value,
            };
            report.check_eq(
                format!("{obj}_sup_inf reproduced by replaying its adversary mixture"),
                v,
                replay,
                10.0 * tol.gap(v.abs().max(replay.abs())),
            );
            Some(v)
        }
        Err(e) => {
            report.check_unverified(
                format!("pure_minimax >= {obj}_sup_inf"),
                format!("solver failed: {e}"),
            );
            None
        }
    };

    for (k, dist) in fixed_dists.iter().enumerate() {
        let lb = match objective {
            Objective::Eor => eor_lower_bound(inst, dist)?,
            Objective::Roe => roe_lower_bound(inst, dist)?,
        };
        let lb_v = lb.value + faults.bound_offset;
        report.quantity(format!("{obj}_lower_bound[{k}]"), lb_v);
        match sup_v {
            Some(sup_v) => report.check_ge(
                format!("{obj}_sup_inf >= {obj}_lower_bound[{k}]"),
                sup_v,
                lb_v,
                tol.gap(sup_v.abs().max(lb_v.abs())),
            ),
            None => report.check_unverified(
                format!("{obj}_sup_inf >= {obj}_lower_bound[{k}]"),
                "sup-inf solve failed".to_string(),
            ),
        }
        report.check_ge(
            format!("pure_minimax >= {obj}_lower_bound[{k}]"),
            pure_v,
            lb_v,
            tol.gap(pure_v.abs().max(lb_v.abs())),
        );
        let replay = match objective {
            Objective::Eor => eor_value(inst, lb.best_design, dist)?,
            Objective::Roe => roe_value(inst, lb.best_design, dist)?,
        };
        report.check_eq(
            format!("{obj}_lower_bound[{k}] attained by design {}", lb.best_design),
            lb_v,
            replay,
            tol.gap(lb_v.abs().max(replay.abs())),
        );
    }

    Ok(report.finish())
}

/// Grades the three-way equality of min-max values: the pure value, the
/// min over designs of the mixed-state EOR supremum, and the min over
/// designs of the mixed-state ROE supremum.
///
/// Both inner suprema are realized by the worst pure state (the EOR
/// objective is linear in the mixture, and the ROE supremum collapses to
/// the pure maximum once the design is fixed), so this check is exact.
pub fn check_weak_equalities(inst: &GameInstance, tol: &ToleranceConfig) -> Result<ChainReport> {
    weak_equalities_impl(inst, tol, None)
}

/// [`check_weak_equalities`] plus a sampled confirmation: per design, the
/// maximum of `samples` random-mixture ROE values must not exceed the pure
/// supremum, and the point mass at the witness state must attain it
/// exactly. The mixture pool is shared across designs.
pub fn check_weak_equalities_deep(
    inst: &GameInstance,
    tol: &ToleranceConfig,
    samples: usize,
    seed: u64,
) -> Result<ChainReport> {
    weak_equalities_impl(inst, tol, Some((samples, seed)))
}

fn weak_equalities_impl(
    inst: &GameInstance,
    tol: &ToleranceConfig,
    deep: Option<(usize, u64)>,
) -> Result<ChainReport> {
    let mut report = ChainReport::new(inst.name(), "weak-minmax-equalities");
    let pure = pure_minimax(inst).value;

    let m = inst.num_designs();
    let mut inner_eor = vec![0.0; m];
    let mut inner_roe = vec![0.0; m];
    let mut roe_witness = vec![0usize; m];
    for d in 0..m {
        // The EOR supremum over mixtures is attained at a vertex.
        inner_eor[d] = worst_state_pure(inst, d)?.value;
        let (v, state) = adversary_sup_roe_fixed_design(inst, d)?;
        inner_roe[d] = v;
        roe_witness[d] = state;
    }
    let minmax_eor = inner_eor.iter().copied().fold(f64::INFINITY, f64::min);
    let minmax_roe = inner_roe.iter().copied().fold(f64::INFINITY, f64::min);

    report.quantity("pure_minimax", pure);
    report.quantity("minmax_mixed_eor", minmax_eor);
    report.quantity("minmax_mixed_roe", minmax_roe);
    report.check_eq(
        "pure_minimax == min over designs of sup over mixtures (EOR)",
        pure,
        minmax_eor,
        tol.gap(pure.abs().max(minmax_eor.abs())),
    );
    report.check_eq(
        "pure_minimax == min over designs of sup over mixtures (ROE)",
        pure,
        minmax_roe,
        tol.gap(pure.abs().max(minmax_roe.abs())),
    );

    if let Some((samples, seed)) = deep {
        let n = inst.num_states();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sampled_max = vec![f64::NEG_INFINITY; m];
        for _ in 0..samples {
            let mix = sample_simplex(&mut rng, n);
            let w = mix.weights();
            for d in 0..m {
                let v = roe_on_weights(inst, d, w);
                if v > sampled_max[d] {
                    sampled_max[d] = v;
                }
            }
        }
        for d in 0..m {
            report.check_ge(
                format!("design {d}: ROE sup >= max of {samples} sampled mixtures"),
                inner_roe[d],
                sampled_max[d],
                tol.gap(inner_roe[d].abs().max(sampled_max[d].abs())),
            );
            let pm = Distribution::point_mass(roe_witness[d], n)?;
            let attained = roe_value(inst, d, &pm)?;
            report.check_eq(
                format!("design {d}: point mass at state {} attains ROE sup exactly", roe_witness[d]),
                attained,
                inner_roe[d],
                0.0,
            );
        }
    }

    Ok(report.finish())
}

/// Grades the dominance-witness guarantee per (design, distribution):
/// the witness's pure ratio is at least the mixture's ROE.
pub fn check_dominance(
    inst: &GameInstance,
    dists: &[Distribution],
    tol: &ToleranceConfig,
) -> Result<ChainReport> {
    let mut report = ChainReport::new(inst.name(), "roe-dominance-witness");
    for (k, dist) in dists.iter().enumerate() {
        for d in 0..inst.num_designs() {
            let witness =
                dominance_witness(inst.benchmark().row(d), inst.algorithm().row(d), dist)?;
            let witness_ratio = ratio_cost(inst, d, witness.index)?;
            let roe = roe_value(inst, d, dist)?;
            report.check_ge(
                format!("design {d} / dist {k}: witness state {} ratio >= ROE", witness.index),
                witness_ratio,
                roe,
                tol.gap(witness_ratio.abs().max(roe.abs())),
            );
            if witness.zero_numerator_on_support {
                report.note_last("support contains zero-benchmark states; guarantee checked empirically");
            }
        }
    }
    Ok(report.finish())
}

/// Options for the full verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Run the sampled mixed-state confirmation in the weak-equality check.
    pub deep: bool,
    pub deep_samples: usize,
    pub deep_seed: u64,
    pub faults: FaultInjection,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            deep: false,
            deep_samples: 100_000,
            deep_seed: 0,
            faults: FaultInjection::default(),
        }
    }
}

/// All chain reports for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRun {
    pub instance: String,
    pub reports: Vec<ChainReport>,
    pub overall: CheckStatus,
}

impl VerifyRun {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.reports.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&r.to_text());
        }
        let overall = match self.overall {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Unverified => "unverified",
        };
        out.push_str(&format!("\nverify overall: {overall}\n"));
        out
    }
}

/// Runs every chain check on `inst` with the given fixed distributions.
pub fn verify_instance(
    inst: &GameInstance,
    dists: &[Distribution],
    tol: &ToleranceConfig,
    opts: &VerifyOptions,
) -> Result<VerifyRun> {
    let mut reports = Vec::new();
    reports.push(check_eor_chain_with_faults(inst, dists, tol, opts.faults)?);
    reports.push(check_roe_chain_with_faults(inst, dists, tol, opts.faults)?);
    reports.push(if opts.deep {
        check_weak_equalities_deep(inst, tol, opts.deep_samples, opts.deep_seed)?
    } else {
        check_weak_equalities(inst, tol)?
    });
    reports.push(check_dominance(inst, dists, tol)?);
    let overall = summarize(reports.iter().map(|r| r.overall));
    Ok(VerifyRun { instance: inst.name().to_string(), reports, overall })
}
