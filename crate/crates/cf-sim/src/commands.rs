//! Command implementations. Each returns an [`OutputTable`]; writing it out
//! is left to the caller.

use cf_core::analysis::{power_law_tail_bound, spread_vector};
use cf_core::channel::lane_id;
use cf_core::exec::Executor;
use cf_core::experiments::{
    ks_test_cos2, run_bounds_vs_power, run_scheduled_sum_rate, run_sum_rate_vs_users, run_unit_vector_probability,
    ExperimentConfig, SummaryRow,
};
use cf_core::rate::{
    alpha_mmse, computation_rate, computation_rate_alpha, quadratic_form, quadratic_form_pairwise, rate_from_f,
};
use cf_core::search::{candidate_search, exhaustive_search, solve};
use cf_core::special::normal_cdf;
use cf_core::stats::ks_statistic;
use cf_core::{sample_channel, ChannelVector, CoefficientVector, GramMatrix, PowerConfig, RngStream};
use serde_json::{json, Value};

use crate::config::{echo_campaign, Campaign, RateSettings, SearchSettings};
use crate::table::{Cell, OutputTable};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Kolmogorov-Smirnov critical value at the 1% level, times `sqrt(n)`.
pub const KS_CRITICAL: f64 = 1.63;

fn stamp(table: &mut OutputTable, command: &str, config: Value) {
    table.metadata.insert("command".into(), json!(command));
    table.metadata.insert("version".into(), json!(VERSION));
    table.metadata.insert("config".into(), config);
}

fn format_coefficients(a: &CoefficientVector) -> String {
    let parts: Vec<String> = a.as_slice().iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn channel(h: &[f64]) -> Result<ChannelVector, CliError> {
    ChannelVector::new(h.to_vec()).map_err(|e| CliError::Usage(format!("--h: {e}")))
}

fn power(p: f64) -> Result<PowerConfig, CliError> {
    PowerConfig::new(p).map_err(|e| CliError::Usage(format!("--power: {e}")))
}

/// `alpha_mmse`, `f(a)` and the computation rate for one `(h, a)` pair.
pub fn rate(s: &RateSettings) -> Result<OutputTable, CliError> {
    let h = channel(&s.h)?;
    let a = CoefficientVector::new(s.a.clone()).map_err(|e| CliError::Usage(format!("--a: {e}")))?;
    let p = power(s.power)?;
    let alpha = alpha_mmse(&h, &a, p)?;
    let f = quadratic_form(&h, &a, p)?;
    let r = computation_rate(&h, &a, p)?;
    let mut t = OutputTable::new(["alpha_mmse", "f", "rate_bits"]);
    t.push(vec![alpha.into(), f.into(), r.bits().into()]);
    stamp(&mut t, "rate", s.echo());
    Ok(t)
}

/// Rate-maximizing coefficient vector for one channel.
pub fn search(s: &SearchSettings) -> Result<OutputTable, CliError> {
    let h = channel(&s.h)?;
    let p = power(s.power)?;
    let res = solve(&h, p, s.solver, s.budget)?;
    let mut t = OutputTable::new([
        "a_opt",
        "f",
        "rate_bits",
        "candidates_examined",
        "unit_vector",
        "solver",
    ]);
    t.push(vec![
        format_coefficients(&res.coefficients).into(),
        res.f_value.into(),
        res.rate.bits().into(),
        res.candidates_examined.into(),
        res.is_unit().into(),
        res.solver.name().into(),
    ]);
    stamp(&mut t, "search", s.echo());
    Ok(t)
}

/// Long-format table: one row per grid point and statistic.
pub fn summary_table(rows: &[SummaryRow]) -> OutputTable {
    let mut t = OutputTable::new([
        "users",
        "relays",
        "power",
        "group_size",
        "norm_sq",
        "statistic",
        "mean",
        "std_error",
        "trials",
        "solver",
    ]);
    for r in rows {
        t.push(vec![
            r.users.into(),
            r.relays.into(),
            r.power.into(),
            r.group_size.into(),
            r.norm_sq.into(),
            r.statistic.into(),
            r.mean.into(),
            r.std_error.into(),
            r.trials.into(),
            r.solver.as_str().into(),
        ]);
    }
    t
}

fn campaign_table(campaign: Campaign, cfg: &ExperimentConfig, rows: &[SummaryRow]) -> OutputTable {
    let mut t = summary_table(rows);
    stamp(&mut t, campaign.name(), echo_campaign(cfg));
    t
}

pub fn prob_unit<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<OutputTable, CliError> {
    let rows = run_unit_vector_probability(cfg, exec)?;
    Ok(campaign_table(Campaign::ProbUnit, cfg, &rows))
}

pub fn sumrate<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<OutputTable, CliError> {
    let rows = run_sum_rate_vs_users(cfg, exec)?;
    Ok(campaign_table(Campaign::SumRate, cfg, &rows))
}

pub fn schedule<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<OutputTable, CliError> {
    let rows = run_scheduled_sum_rate(cfg, exec)?;
    Ok(campaign_table(Campaign::Schedule, cfg, &rows))
}

/// One row per power: lower bound, empirical optimal-CF sum-rate, upper bound.
pub fn bounds<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<OutputTable, CliError> {
    let rows = run_bounds_vs_power(cfg, exec)?;
    let mut t = OutputTable::new([
        "relays",
        "power",
        "lower",
        "lower_se",
        "empirical",
        "empirical_se",
        "upper",
        "violation_rate",
        "trials",
        "solver",
    ]);
    for &p in &cfg.powers {
        let find = |stat: &str| {
            rows.iter()
                .find(|r| r.power == Some(p) && r.statistic == stat)
                .ok_or_else(|| CliError::Compute(format!("missing {stat} row for power {p}")))
        };
        let lower = find("lower_bound")?;
        let emp = find("optimal_sum_rate")?;
        let upper = find("upper_bound")?;
        let viol = find("lower_bound_violation_rate")?;
        t.push(vec![
            cfg.relays.into(),
            p.into(),
            lower.mean.into(),
            lower.std_error.into(),
            emp.mean.into(),
            emp.std_error.into(),
            upper.mean.into(),
            viol.mean.into(),
            emp.trials.into(),
            emp.solver.as_str().into(),
        ]);
    }
    stamp(&mut t, Campaign::Bounds.name(), echo_campaign(cfg));
    Ok(t)
}

const TAG_VALIDATE_KS: u64 = 101;
const TAG_VALIDATE_IDENTITY: u64 = 102;
const TAG_VALIDATE_SOLVERS: u64 = 103;
const TAG_VALIDATE_NORMAL: u64 = 104;

/// Relative tolerance for the algebraic identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Relative tolerance for the closed-form power-law check.
pub const POWER_LAW_TOL: f64 = 1e-12;
/// Channels per `(L, P)` in the solver agreement check.
const SOLVER_INSTANCES: u64 = 200;

fn rel_err(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

struct Check {
    name: &'static str,
    users: Option<usize>,
    power: Option<f64>,
    detail: String,
    statistic: f64,
    threshold: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.statistic < self.threshold
    }
}

/// Statistical and identity self-checks. The table lists every check; the
/// second value is `false` if any of them failed.
///
/// `cfg.users` are the dimensions for the distribution checks, `cfg.trials`
/// the sample size and `cfg.powers` the powers for the identity checks.
pub fn validate(cfg: &ExperimentConfig) -> Result<(OutputTable, bool), CliError> {
    let n = cfg.trials;
    let ks_threshold = KS_CRITICAL / (n as f64).sqrt();
    let mut checks = Vec::new();

    for &l in &cfg.users {
        if l < 2 {
            continue;
        }
        let mut choices = vec![("e1", CoefficientVector::unit(l, 0))];
        if let Some(v) = spread_vector(2, l) {
            choices.push(("[1,1,0,...]", CoefficientVector::new(v)?));
        }
        for (k, (label, a)) in choices.iter().enumerate() {
            let mut rng = RngStream::new(cfg.seed, lane_id(&[TAG_VALIDATE_KS, l as u64, k as u64]), 0);
            let d = ks_test_cos2(l, n as usize, a, &mut rng)?;
            checks.push(Check {
                name: "ks_cos2_beta",
                users: Some(l),
                power: None,
                detail: format!("a={label}"),
                statistic: d,
                threshold: ks_threshold,
            });
        }

        let mut rng = RngStream::new(cfg.seed, lane_id(&[TAG_VALIDATE_NORMAL, l as u64]), 0);
        let mut entries = Vec::with_capacity(n as usize);
        while entries.len() < n as usize {
            entries.extend_from_slice(sample_channel(l, &mut rng)?.as_slice());
        }
        entries.truncate(n as usize);
        let d = ks_statistic(&mut entries, normal_cdf);
        checks.push(Check {
            name: "ks_channel_normal",
            users: Some(l),
            power: None,
            detail: String::new(),
            statistic: d,
            threshold: ks_threshold,
        });
    }

    for &p in &cfg.powers {
        let pw = power(p)?;
        let mut worst = 0.0f64;
        let mut rng = RngStream::new(cfg.seed, lane_id(&[TAG_VALIDATE_IDENTITY, p.to_bits()]), 0);
        for i in 0..n {
            let l = 2 + (i % 7) as usize;
            let h = sample_channel(l, &mut rng)?;
            let a = random_coefficients(l, &mut rng);
            let f1 = quadratic_form(&h, &a, pw)?;
            let f2 = quadratic_form_pairwise(&h, &a, pw)?;
            let f3 = GramMatrix::new(&h, pw).quadratic_form(&a)?;
            let r_direct = computation_rate(&h, &a, pw)?.bits();
            let r_from_f = rate_from_f(f1, &h, pw)?.bits();
            let r_alpha = computation_rate_alpha(&h, &a, pw, alpha_mmse(&h, &a, pw)?)?.bits();
            worst = worst
                .max(rel_err(f1, f2))
                .max(rel_err(f1, f3))
                .max(rel_err(r_direct, r_from_f))
                .max(rel_err(r_direct, r_alpha));
        }
        checks.push(Check {
            name: "rate_identities",
            users: None,
            power: Some(p),
            detail: "L=2..8".into(),
            statistic: worst,
            threshold: IDENTITY_TOL,
        });

        let mut worst = 0.0f64;
        for l in 2..=6usize {
            let lane = lane_id(&[TAG_VALIDATE_SOLVERS, l as u64, p.to_bits()]);
            for i in 0..SOLVER_INSTANCES {
                let mut rng = RngStream::new(cfg.seed, lane, i);
                let h = sample_channel(l, &mut rng)?;
                let ex = exhaustive_search(&h, pw)?;
                let cand = candidate_search(&h, pw)?;
                worst = worst.max(rel_err(ex.rate.bits(), cand.rate.bits()));
            }
        }
        checks.push(Check {
            name: "solver_agreement",
            users: None,
            power: Some(p),
            detail: "L=2..6".into(),
            statistic: worst,
            threshold: IDENTITY_TOL,
        });
    }

    let mut worst = 0.0f64;
    for s in [2u64, 3, 4, 9] {
        for l in 4..=64usize {
            let got = power_law_tail_bound(s as f64, l)?.raw;
            let want = (1.0 / s as f64).powf((l as f64 - 1.0) / 2.0 - 1.0);
            worst = worst.max(rel_err(got, want));
        }
    }
    checks.push(Check {
        name: "power_law_identity",
        users: None,
        power: None,
        detail: "s=2,3,4,9 L=4..64".into(),
        statistic: worst,
        threshold: POWER_LAW_TOL,
    });

    let mut t = OutputTable::new(["check", "users", "power", "detail", "statistic", "threshold", "passed"]);
    let mut all = true;
    for c in &checks {
        all &= c.passed();
        t.push(vec![
            c.name.into(),
            c.users.into(),
            c.power.into(),
            Cell::Text(c.detail.clone()),
            c.statistic.into(),
            c.threshold.into(),
            c.passed().into(),
        ]);
    }
    stamp(&mut t, Campaign::Validate.name(), echo_campaign(cfg));
    Ok((t, all))
}

fn random_coefficients(l: usize, rng: &mut RngStream) -> CoefficientVector {
    loop {
        let v: Vec<i64> = (0..l).map(|_| (rng.uniform() * 7.0).floor() as i64 - 3).collect();
        if let Ok(a) = CoefficientVector::new(v) {
            return a;
        }
    }
}
