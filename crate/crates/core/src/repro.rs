//! Self-checking experiments behind `prophet repro <claim>`.
//!
//! Each claim runs on the library's own instances and reports one line per
//! check with the measured value and the bound it is held to.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::benchmark::{iid_optimal_online_min, optimal_online_max, optimal_online_min_one_exchange, ArrivalOrder};
use crate::error::{Error, Result};
use crate::exact::{evaluate_exact, single_threshold_candidates, sweep_single_threshold};
use crate::instances::{
    gen_075_hard, gen_min_exchange_hard, gen_one_threshold_hard, min_iid_distribution, random_instance,
    random_non_increasing_schedule,
};
use crate::rng::StreamRng;
use crate::schedule::{alpha_closed_form, alpha_factors, theorem1_schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    Thm1Alphas,
    Thm3SingleThreshold,
    Thm2Ratio075,
    TwoThreshold59,
    Thm4MinIid,
    Thm5Exchange,
    Prop2Check,
}

impl Claim {
    pub const ALL: [Claim; 7] = [
        Claim::Thm1Alphas,
        Claim::Thm3SingleThreshold,
        Claim::Thm2Ratio075,
        Claim::TwoThreshold59,
        Claim::Thm4MinIid,
        Claim::Thm5Exchange,
        Claim::Prop2Check,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Claim::Thm1Alphas => "thm1-alphas",
            Claim::Thm3SingleThreshold => "thm3-single-threshold",
            Claim::Thm2Ratio075 => "thm2-075",
            Claim::TwoThreshold59 => "two-threshold-59",
            Claim::Thm4MinIid => "thm4-min-iid",
            Claim::Thm5Exchange => "thm5-exchange",
            Claim::Prop2Check => "prop2-check",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::UnknownClaim {
                got: s.to_string(),
                valid: Claim::ALL.map(Claim::id).join(", "),
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub requirement: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, label: impl Into<String>, value: f64, requirement: impl Into<String>, passed: bool) {
        self.0.push(Check {
            label: label.into(),
            value,
            requirement: requirement.into(),
            passed,
        });
    }
}

pub fn run_claim(claim: Claim) -> Result<ClaimReport> {
    let mut c = Checks(Vec::new());
    match claim {
        Claim::Thm1Alphas => alpha_checks(&mut c)?,
        Claim::Thm3SingleThreshold => single_threshold_checks(&mut c)?,
        Claim::Thm2Ratio075 => optimal_075_checks(&mut c)?,
        Claim::TwoThreshold59 => two_threshold(&mut c)?,
        Claim::Thm4MinIid => min_iid_checks(&mut c)?,
        Claim::Thm5Exchange => exchange_checks(&mut c)?,
        Claim::Prop2Check => pass_inequality_checks(&mut c)?,
    }
    Ok(ClaimReport {
        claim: claim.id().to_string(),
        passed: c.0.iter().all(|x| x.passed),
        checks: c.0,
    })
}

fn alpha_checks(c: &mut Checks) -> Result<()> {
    let two = alpha_factors(2)?;
    let err = (two[0] - 5.0 / 9.0).abs().max((two[1] - 1.0 / 3.0).abs());
    c.add("alpha(2) vs [5/9, 1/3]", err, "<= 1e-12", err <= 1e-12);
    let mut worst: f64 = 0.0;
    for n in (1..=100).chain([1000, 10_000]) {
        for (k, a) in alpha_factors(n)?.iter().enumerate() {
            worst = worst.max((alpha_closed_form(n, k + 1)? - a).abs());
        }
    }
    c.add(
        "recurrence vs closed form, n in 1..100,1000,10000",
        worst,
        "<= 1e-10",
        worst <= 1e-10,
    );
    let gap = (alpha_factors(10_000)?[0] - (1.0 - (-1.0f64).exp())).abs();
    c.add("|alpha_1(10^4) - (1 - 1/e)|", gap, "<= 1e-4", gap <= 1e-4);
    Ok(())
}

fn single_threshold_checks(c: &mut Checks) -> Result<()> {
    for n in [4, 10, 50] {
        let inst = gen_one_threshold_hard(n)?;
        let best = sweep_single_threshold(&inst, &single_threshold_candidates(&inst))?;
        let opt_err = (best.opt_value - 2.0).abs();
        c.add(format!("n={n} OPT - 2"), opt_err, "<= 1e-12", opt_err <= 1e-12);
        let bound = 0.5 + 1.0 / (2.0 * n as f64);
        c.add(
            format!("n={n} best single-threshold ratio (T={})", best.threshold),
            best.ratio,
            format!("<= {bound} + 1e-9"),
            best.ratio <= bound + 1e-9,
        );
    }
    Ok(())
}

fn optimal_075_checks(c: &mut Checks) -> Result<()> {
    for eps in [0.1, 0.01, 0.001] {
        let inst = gen_075_hard(eps)?;
        let ratio = optimal_online_max(&inst)?.ratio_to(inst.opt());
        c.add(
            format!("eps={eps} optimal online ratio"),
            ratio,
            format!("in [0.75, {}]", 0.75 + eps),
            (0.75..=0.75 + eps).contains(&ratio),
        );
        let closed = (1.5 - eps / 2.0) / (2.0 - eps);
        let diff = (ratio - closed).abs();
        c.add(
            format!("eps={eps} |ratio - (1.5 - eps/2)/(2 - eps)|"),
            diff,
            "<= 1e-9",
            diff <= 1e-9,
        );
    }
    Ok(())
}

fn two_threshold(c: &mut Checks) -> Result<()> {
    let inst = gen_075_hard(0.01)?;
    let report = evaluate_exact(&inst, &theorem1_schedule(2, inst.opt())?)?;
    c.add(
        "two-threshold exact ratio",
        report.ratio,
        ">= 5/9 - 1e-9 (hence > 0.5)",
        report.ratio >= 5.0 / 9.0 - 1e-9,
    );
    Ok(())
}

fn min_iid_checks(c: &mut Checks) -> Result<()> {
    for n in 5..=30usize {
        let d = min_iid_distribution(n)?;
        let opt = crate::instances::gen_min_iid_hard(n)?.opt();
        let ratio = iid_optimal_online_min(&d, n)?.ratio_to(opt);
        let bound = 1.11f64.powi(n as i32) / 6.0;
        if n == 30 {
            c.add(
                "n=30 optimal online / offline",
                ratio,
                format!(">= {bound:.4}"),
                ratio >= bound,
            );
        }
        c.add(
            format!("n={n} ratio / (1.11^n / 6)"),
            ratio / bound,
            ">= 1",
            ratio / bound >= 1.0,
        );
    }
    Ok(())
}

fn exchange_checks(c: &mut Checks) -> Result<()> {
    for eps in [0.1, 0.02] {
        let inst = gen_min_exchange_hard(eps)?;
        let opt = inst.opt();
        let fixed = optimal_online_min_one_exchange(&inst, ArrivalOrder::Fixed)?;
        c.add(
            format!("eps={eps} fixed-order exchange value"),
            fixed.value,
            format!(">= {eps} - 1e-9"),
            fixed.value >= eps - 1e-9,
        );
        let ratio = fixed.ratio_to(opt);
        let bound = 1.0 / (2.0 * eps);
        c.add(
            format!("eps={eps} fixed-order ratio"),
            ratio,
            format!(">= {bound}"),
            ratio >= bound * (1.0 - 1e-9),
        );
        let random = optimal_online_min_one_exchange(&inst, ArrivalOrder::Random)?;
        let ratio = random.ratio_to(opt);
        let bound = 1.0 / (12.0 * eps);
        c.add(
            format!("eps={eps} random-order ratio"),
            ratio,
            format!(">= {bound:.4}"),
            ratio >= bound,
        );
    }
    Ok(())
}

/// Largest `θ(k+1) − q₋ᵢ(k)` over 1000 random instances with random
/// non-increasing schedules.
pub fn pass_inequality_worst_gap(instances: usize, seed: u64) -> Result<f64> {
    let mut rng = StreamRng::new(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..instances {
        let n = 2 + rng.below(6) as usize;
        let inst = random_instance(&mut rng, n, 3);
        let sched = random_non_increasing_schedule(&mut rng, &inst);
        let report = evaluate_exact(&inst, &sched)?;
        for row in &report.pass.q_minus {
            for (k0, q) in row.iter().enumerate() {
                worst = worst.max(report.pass.theta[k0 + 1] - q);
            }
        }
    }
    Ok(worst)
}

fn pass_inequality_checks(c: &mut Checks) -> Result<()> {
    let worst = pass_inequality_worst_gap(1000, 0x5eed_0002)?;
    c.add(
        "max theta(k+1) - q_-i(k) over 1000 instances",
        worst,
        "<= 1e-12",
        worst <= 1e-12,
    );
    Ok(())
}
