//! Randomized property audits with seeded, reproducible trials.

use std::fmt;
use std::str::FromStr;

use dualutil_core::du::{
    choquet_evaluate, comonotonic_additivity_residual, mean_preference_check, rdu_evaluate,
};
use dualutil_core::eu::{self, mixture_affinity_residual};
use dualutil_core::StepQuantile;
use rand::Rng;
use serde_json::{json, Value};

use crate::gen::{self, TrialRng};
use crate::json::{betas_value, distortion_value, measure_value, number, numbers, quantile_value, utility_value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    EuAffinity,
    ComonoAdd,
    RduChoquet,
    RiskAversion,
    MeanPref,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::EuAffinity, Suite::ComonoAdd, Suite::RduChoquet, Suite::RiskAversion, Suite::MeanPref];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EuAffinity => "eu-affinity",
            Suite::ComonoAdd => "comono-add",
            Suite::RduChoquet => "rdu-choquet",
            Suite::RiskAversion => "risk-aversion",
            Suite::MeanPref => "mean-pref",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::EuAffinity => 1e-12,
            _ => 1e-10,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of eu-affinity, comono-add, rdu-choquet, risk-aversion, mean-pref"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub seed: u64,
    pub trials: u64,
    pub tolerance: f64,
}

/// Outcome of one trial: its residual and the instance that produced it.
struct Trial {
    residual: f64,
    instance: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub suite: Suite,
    pub config: AuditConfig,
    pub max_residual: f64,
    pub failures: u64,
    /// The first failing trial and its instance.
    pub violation: Option<(u64, Value)>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> Value {
        let violation = match &self.violation {
            Some((trial, instance)) => json!({ "trial": trial, "instance": instance }),
            None => Value::Null,
        };
        json!({
            "suite": self.suite.name(),
            "seed": self.config.seed,
            "trials": self.config.trials,
            "tolerance": number(self.config.tolerance),
            "max_residual": number(self.max_residual),
            "failures": self.failures,
            "passed": self.passed(),
            "violation": violation,
        })
    }
}

pub fn run(suite: Suite, config: &AuditConfig) -> AuditReport {
    let mut report = AuditReport { suite, config: config.clone(), max_residual: 0.0, failures: 0, violation: None };
    for t in 0..config.trials {
        let rng = &mut gen::trial_rng(config.seed, t);
        let trial = match suite {
            Suite::EuAffinity => eu_affinity(rng),
            Suite::ComonoAdd => comono_add(rng),
            Suite::RduChoquet => rdu_choquet(rng),
            Suite::RiskAversion => risk_aversion(rng),
            Suite::MeanPref => mean_pref(rng, config.tolerance),
        };
        let failed = !(trial.residual <= config.tolerance);
        if trial.residual > report.max_residual || trial.residual.is_nan() {
            report.max_residual = trial.residual;
        }
        if failed {
            report.failures += 1;
            report.violation.get_or_insert((t, trial.instance));
        }
    }
    report
}

fn eu_affinity(rng: &mut TrialRng) -> Trial {
    let u = gen::utility(rng, 6);
    let (mu, nu) = (gen::measure(rng, 8), gen::measure(rng, 8));
    let alpha = rng_unit(rng);
    let residual = mixture_affinity_residual(&u, &mu, &nu, alpha).expect("scalar probability measures");
    let instance = json!({
        "u": utility_value(&u), "mu": measure_value(&mu), "nu": measure_value(&nu), "alpha": number(alpha),
    });
    Trial { residual, instance }
}

fn comono_add(rng: &mut TrialRng) -> Trial {
    let w = gen::distortion(rng);
    let (phi, psi) = (gen::quantile(rng, 10), gen::quantile(rng, 10));
    let (alpha, beta) = (5.0 * rng_unit(rng), 5.0 * rng_unit(rng));
    let residual = comonotonic_additivity_residual(&w, &phi, &psi, alpha, beta).expect("nonnegative coefficients");
    let instance = json!({
        "w": distortion_value(&w), "phi": quantile_value(&phi), "psi": quantile_value(&psi),
        "alpha": number(alpha), "beta": number(beta),
    });
    Trial { residual, instance }
}

fn rdu_choquet(rng: &mut TrialRng) -> Trial {
    let w = gen::distortion(rng);
    let mu = gen::measure(rng, 15);
    let rdu = rdu_evaluate(&w, &mu.quantile().expect("scalar measure"));
    let choquet = choquet_evaluate(&w, &mu).expect("normalized distortion");
    let instance = json!({ "w": distortion_value(&w), "measure": measure_value(&mu) });
    Trial { residual: (rdu - choquet).abs(), instance }
}

/// Shortfall of the coarsening below the original, for a concave distortion
/// against a random quantile and for a concave utility against a random
/// measure and partition.
fn risk_aversion(rng: &mut TrialRng) -> Trial {
    let w = gen::concave_distortion(rng);
    let phi = gen::quantile(rng, 12);
    let betas = gen::betas(rng, &phi);
    let coarse = phi.coarsen(&betas).expect("betas are levels of phi");
    let dual = rdu_evaluate(&w, &phi) - rdu_evaluate(&w, &coarse);

    let u = gen::concave_utility(rng, 6);
    let mu = gen::measure(rng, 10);
    let part = gen::partition(rng, 4);
    let fine = eu::evaluate(&u, &mu).expect("scalar measure");
    let primal = fine - eu::evaluate(&u, &mu.coarsen(&part).expect("scalar measure")).expect("scalar measure");

    let instance = json!({
        "w": distortion_value(&w), "quantile": quantile_value(&phi), "betas": betas_value(&betas),
        "u": utility_value(&u), "measure": measure_value(&mu), "cuts": numbers(part.cuts()),
    });
    Trial { residual: dual.max(primal).max(0.0), instance }
}

/// Compares `mean_preference_check` with the empirical test "no prospect is
/// strictly better than its mean" over 100 random prospects. Residual 0 on
/// agreement, 1 on disagreement.
fn mean_pref(rng: &mut TrialRng, tolerance: f64) -> Trial {
    let w = if rng.random_bool(0.5) { gen::dominating_distortion(rng) } else { gen::violating_distortion(rng) };
    let prospects: Vec<StepQuantile> = (0..100).map(|_| gen::quantile(rng, 6)).collect();
    let claimed = mean_preference_check(&w).expect("normalized distortion");
    let empirical = prospects.iter().all(|q| rdu_evaluate(&w, q) <= q.mean() + tolerance);
    let instance = json!({ "w": distortion_value(&w), "claimed": claimed, "empirical": empirical });
    Trial { residual: if claimed == empirical { 0.0 } else { 1.0 }, instance }
}

fn rng_unit(rng: &mut TrialRng) -> f64 {
    rng.random_range(0..=1000) as f64 / 1000.0
}
