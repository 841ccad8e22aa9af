//! Monte Carlo campaigns.
//!
//! Every campaign walks a parameter grid. Each grid point gets its own lane
//! id (hashed from the campaign tag and the point's parameters) and each
//! trial within the point its own stream index, so results depend only on
//! the configuration and seed. Aggregation happens in trial order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::{
    cosine_tail_bound, power_law_tail_bound, spread_vector, sum_rate_lower_bound, sum_rate_upper_bound,
    union_bound_nonunit,
};
use crate::channel::lane_id;
use crate::exec::Executor;
use crate::rate::quadratic_form;
use crate::search::{is_unit_vector, solve, Solver, SolverKind, DEFAULT_NODE_BUDGET};
use crate::special::reg_inc_beta;
use crate::stats::{ks_statistic, mean_and_se};
use crate::{sample_channel, ChannelVector, CoefficientVector, Error, PowerConfig, Result, RngStream};

const TAG_UNIT: u64 = 1;
const TAG_SUM_RATE: u64 = 2;
const TAG_SCHEDULE: u64 = 3;
const TAG_BOUNDS: u64 = 4;

/// Parameters shared by all campaigns. Each campaign reads the fields it
/// needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Number of simultaneously transmitting users `L` (or total population
    /// for scheduling runs).
    pub users: Vec<usize>,
    pub relays: usize,
    pub powers: Vec<f64>,
    /// Trials per grid point (slots for scheduling runs use `slots`).
    pub trials: u64,
    pub seed: u64,
    pub solver: Solver,
    /// Users scheduled per slot.
    pub group_size: usize,
    pub slots: u64,
    /// `|a|^2` values for the fixed-vector and bound curves.
    pub norm_sq: Vec<u64>,
    /// Node budget for the exhaustive solver.
    pub budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            users: alloc::vec![4, 8, 16, 32],
            relays: 4,
            powers: alloc::vec![10.0],
            trials: 1000,
            seed: 1,
            solver: Solver::Auto,
            group_size: 3,
            slots: 10_000,
            norm_sq: alloc::vec![2, 4, 9],
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1"));
        }
        if self.users.is_empty() || self.users.contains(&0) {
            return Err(Error::InvalidConfig(
                "users must be a non-empty list of positive integers",
            ));
        }
        if self.relays == 0 {
            return Err(Error::InvalidConfig("relays must be at least 1"));
        }
        if self.powers.is_empty() {
            return Err(Error::InvalidConfig("at least one power is required"));
        }
        for &p in &self.powers {
            PowerConfig::new(p)?;
        }
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be at least 1"));
        }
        Ok(())
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            solver: self.solver,
            budget: self.budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub solver: Solver,
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            solver: Solver::Auto,
            budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// One aggregated statistic at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub users: Option<usize>,
    pub relays: Option<usize>,
    pub power: Option<f64>,
    pub group_size: Option<usize>,
    pub norm_sq: Option<u64>,
    pub statistic: &'static str,
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    /// Which solver(s) produced the underlying trials; `"-"` for analytic rows.
    pub solver: String,
}

#[derive(Debug, Clone, Copy, Default)]
struct Point {
    users: Option<usize>,
    relays: Option<usize>,
    power: Option<f64>,
    group_size: Option<usize>,
}

impl Point {
    fn row(&self, statistic: &'static str, samples: &[f64], solver: &str) -> SummaryRow {
        let (mean, std_error) = mean_and_se(samples);
        SummaryRow {
            users: self.users,
            relays: self.relays,
            power: self.power,
            group_size: self.group_size,
            norm_sq: None,
            statistic,
            mean,
            std_error,
            trials: samples.len() as u64,
            solver: String::from(solver),
        }
    }

    fn analytic(&self, statistic: &'static str, value: f64, norm_sq: Option<u64>) -> SummaryRow {
        SummaryRow {
            users: self.users,
            relays: self.relays,
            power: self.power,
            group_size: self.group_size,
            norm_sq,
            statistic,
            mean: value,
            std_error: 0.0,
            trials: 0,
            solver: String::from("-"),
        }
    }
}

/// Counts how often each solver ran.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverUsage {
    pub exhaustive: u64,
    pub candidate: u64,
}

impl SolverUsage {
    fn record(&mut self, kind: SolverKind) {
        match kind {
            SolverKind::Exhaustive => self.exhaustive += 1,
            SolverKind::Candidate => self.candidate += 1,
            SolverKind::UnitBaseline => {}
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.exhaustive > 0, self.candidate > 0) {
            (true, true) => "exhaustive+candidate",
            (true, false) => "exhaustive",
            (false, true) => "candidate",
            (false, false) => "-",
        }
    }
}

/// One network realization: every relay's choice and the resulting rates.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRateSample {
    /// Rate of each user, bits.
    pub user_rates: Vec<f64>,
    pub sum: f64,
    pub relay_rates: Vec<f64>,
    pub coefficients: Vec<CoefficientVector>,
    pub unit_flags: Vec<bool>,
    /// Whether the relays' coefficient matrix has rank `min(M, L)`.
    /// Diagnostic only.
    pub full_rank: bool,
    pub solvers: Vec<SolverKind>,
}

/// Per-user rates: user `l` gets the minimum computation rate over relays
/// whose combination involves `l`, or zero when no relay involves it.
pub fn user_rates_from_choices(
    users: usize,
    relay_rates: &[f64],
    coefficients: &[CoefficientVector],
) -> Result<Vec<f64>> {
    if relay_rates.len() != coefficients.len() {
        return Err(Error::DimensionMismatch {
            expected: coefficients.len(),
            found: relay_rates.len(),
        });
    }
    let mut rates: Vec<Option<f64>> = alloc::vec![None; users];
    for (rate, a) in relay_rates.iter().zip(coefficients) {
        if a.len() != users {
            return Err(Error::DimensionMismatch {
                expected: users,
                found: a.len(),
            });
        }
        for (l, &coef) in a.as_slice().iter().enumerate() {
            if coef != 0 {
                rates[l] = Some(rates[l].map_or(*rate, |r: f64| r.min(*rate)));
            }
        }
    }
    Ok(rates.into_iter().map(|r| r.unwrap_or(0.0)).collect())
}

/// Each relay picks its rate-maximizing vector for its own channel; the
/// users' rates follow from [`user_rates_from_choices`].
pub fn evaluate_sum_rate(channels: &[ChannelVector], power: PowerConfig, opts: SolveOptions) -> Result<SumRateSample> {
    let users = channels.first().ok_or(Error::InvalidDimension)?.len();
    let mut relay_rates = Vec::with_capacity(channels.len());
    let mut coefficients = Vec::with_capacity(channels.len());
    let mut unit_flags = Vec::with_capacity(channels.len());
    let mut solvers = Vec::with_capacity(channels.len());
    for h in channels {
        if h.len() != users {
            return Err(Error::DimensionMismatch {
                expected: users,
                found: h.len(),
            });
        }
        let res = solve(h, power, opts.solver, opts.budget)?;
        relay_rates.push(res.rate.bits());
        unit_flags.push(is_unit_vector(&res.coefficients));
        solvers.push(res.solver);
        coefficients.push(res.coefficients);
    }
    let user_rates = user_rates_from_choices(users, &relay_rates, &coefficients)?;
    let sum = user_rates.iter().sum();
    let full_rank = integer_rank(&coefficients) == channels.len().min(users);
    Ok(SumRateSample {
        user_rates,
        sum,
        relay_rates,
        coefficients,
        unit_flags,
        full_rank,
        solvers,
    })
}

/// Draws `relays` channels of length `users` and evaluates the sum-rate.
pub fn trial_sum_rate(
    users: usize,
    relays: usize,
    power: PowerConfig,
    opts: SolveOptions,
    rng: &mut RngStream,
) -> Result<SumRateSample> {
    let channels = sample_channels(users, relays, rng)?;
    evaluate_sum_rate(&channels, power, opts)
}

fn sample_channels(users: usize, relays: usize, rng: &mut RngStream) -> Result<Vec<ChannelVector>> {
    if relays == 0 {
        return Err(Error::InvalidDimension);
    }
    (0..relays).map(|_| sample_channel(users, rng)).collect()
}

/// Rank of an integer matrix given by rows (fraction-free elimination).
pub fn integer_rank(rows: &[CoefficientVector]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.as_slice().iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in (rank + 1)..m.len() {
            let factor = m[r][col];
            if factor == 0 {
                continue;
            }
            let (top, rest) = m.split_at_mut(r);
            let pivot_row = &top[rank];
            let row = &mut rest[0];
            let lead = pivot_row[col];
            let mut g = 0i128;
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = *x * lead - p * factor;
                g = gcd(g, *x);
            }
            if g > 1 {
                row[col..].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn collect_trials<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| e.in_trial(i as u64)))
        .collect()
}

fn to_f64(flag: bool) -> f64 {
    if flag {
        1.0
    } else {
        0.0
    }
}

/// Grid of `(L, P)` pairs in configuration order.
fn grid(cfg: &ExperimentConfig) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for &p in &cfg.powers {
        for &l in &cfg.users {
            out.push((l, p));
        }
    }
    out
}

struct UnitTrial {
    non_unit: bool,
    kind: SolverKind,
    /// `f(a_s) <= f(e_1)` for each configured `|a|^2`.
    fixed_wins: Vec<bool>,
}

/// Probability that a single relay's optimal vector is not a unit vector,
/// plus the fixed-vector comparison `Pr(f(a) <= f(e_1))` and the analytic
/// bounds at each configured `|a|^2`.
pub fn run_unit_vector_probability<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<SummaryRow>> {
    cfg.validate()?;
    let opts = cfg.solve_options();
    let points = grid(cfg);
    let mut rows = Vec::new();
    for (idx, &(users, p)) in points.iter().enumerate() {
        exec.progress(idx, points.len(), &format!("prob-unit L={users} P={p}"));
        let power = PowerConfig::new(p)?;
        let point = Point {
            users: Some(users),
            power: Some(p),
            ..Point::default()
        };
        let fixed: Vec<(u64, CoefficientVector)> = cfg
            .norm_sq
            .iter()
            .filter(|&&s| s >= 2)
            .filter_map(|&s| {
                let v = CoefficientVector::new(spread_vector(s, users)?).ok()?;
                Some((s, v))
            })
            .collect();
        let lane = lane_id(&[TAG_UNIT, users as u64, p.to_bits()]);
        let results = exec.map_indexed(cfg.trials, |t| -> Result<UnitTrial> {
            let mut rng = RngStream::new(cfg.seed, lane, t);
            let h = sample_channel(users, &mut rng)?;
            let res = solve(&h, power, opts.solver, opts.budget)?;
            let f_e1 = quadratic_form(&h, &CoefficientVector::unit(users, 0), power)?;
            let fixed_wins = fixed
                .iter()
                .map(|(_, a)| quadratic_form(&h, a, power).map(|f| f <= f_e1))
                .collect::<Result<_>>()?;
            Ok(UnitTrial {
                non_unit: !res.is_unit(),
                kind: res.solver,
                fixed_wins,
            })
        });
        let trials = collect_trials(results)?;

        let mut usage = SolverUsage::default();
        trials.iter().for_each(|t| usage.record(t.kind));
        let flags: Vec<f64> = trials.iter().map(|t| to_f64(t.non_unit)).collect();
        rows.push(point.row("p_nonunit", &flags, usage.label()));

        for (k, (s, _)) in fixed.iter().enumerate() {
            let wins: Vec<f64> = trials.iter().map(|t| to_f64(t.fixed_wins[k])).collect();
            let mut row = point.row("p_fixed_beats_unit", &wins, "-");
            row.norm_sq = Some(*s);
            rows.push(row);
        }
        for &s in cfg.norm_sq.iter().filter(|&&s| s >= 2) {
            if users >= 2 {
                let b = cosine_tail_bound(s as f64, users)?;
                rows.push(point.analytic("cosine_tail_bound", b.value, Some(s)));
            }
            if users >= 4 {
                let b = power_law_tail_bound(s as f64, users)?;
                rows.push(point.analytic("power_law_tail_bound", b.value, Some(s)));
                rows.push(point.analytic("power_law_tail_bound_raw", b.raw, Some(s)));
            }
        }
        if users >= 4 {
            let b = union_bound_nonunit(users, power, users as f64)?;
            rows.push(point.analytic("union_bound_nonunit", b.value, None));
            rows.push(point.analytic("union_bound_nonunit_raw", b.raw, None));
        }
    }
    Ok(rows)
}

/// Mean sum-rate of `M` relays versus the number of simultaneous users.
pub fn run_sum_rate_vs_users<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<SummaryRow>> {
    cfg.validate()?;
    let opts = cfg.solve_options();
    let relays = cfg.relays;
    let points = grid(cfg);
    let mut rows = Vec::new();
    for (idx, &(users, p)) in points.iter().enumerate() {
        exec.progress(idx, points.len(), &format!("sumrate L={users} P={p}"));
        let power = PowerConfig::new(p)?;
        let lane = lane_id(&[TAG_SUM_RATE, users as u64, relays as u64, p.to_bits()]);
        let results = exec.map_indexed(cfg.trials, |t| {
            let mut rng = RngStream::new(cfg.seed, lane, t);
            trial_sum_rate(users, relays, power, opts, &mut rng)
        });
        let samples = collect_trials(results)?;
        let mut usage = SolverUsage::default();
        samples.iter().flat_map(|s| &s.solvers).for_each(|&k| usage.record(k));
        let label = usage.label();
        let point = Point {
            users: Some(users),
            relays: Some(relays),
            power: Some(p),
            ..Point::default()
        };
        let sums: Vec<f64> = samples.iter().map(|s| s.sum).collect();
        let unit: Vec<f64> = samples
            .iter()
            .map(|s| s.unit_flags.iter().filter(|&&u| u).count() as f64 / relays as f64)
            .collect();
        let rank: Vec<f64> = samples.iter().map(|s| to_f64(s.full_rank)).collect();
        rows.push(point.row("sum_rate", &sums, label));
        rows.push(point.row("unit_fraction", &unit, label));
        rows.push(point.row("full_rank_fraction", &rank, label));
    }
    Ok(rows)
}

/// Users scheduled in `slot`: `{(slot k + j) mod L : j < k}`, ascending.
pub fn round_robin_schedule(users: usize, group_size: usize, slot: u64) -> Result<Vec<usize>> {
    if group_size == 0 || group_size > users {
        return Err(Error::InvalidConfig(
            "group size must be between 1 and the number of users",
        ));
    }
    let l = users as u128;
    let start = (slot as u128 * group_size as u128) % l;
    let mut group: Vec<usize> = (0..group_size as u128).map(|j| ((start + j) % l) as usize).collect();
    group.sort_unstable();
    Ok(group)
}

/// Round-robin scheduling: each slot `k` users out of a population of `L`
/// transmit over fresh channels to `M` relays.
pub fn run_scheduled_sum_rate<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<SummaryRow>> {
    cfg.validate()?;
    if cfg.slots == 0 {
        return Err(Error::InvalidConfig("slots must be at least 1"));
    }
    let opts = cfg.solve_options();
    let relays = cfg.relays;
    let k = cfg.group_size;
    let points = grid(cfg);
    let mut rows = Vec::new();
    for (idx, &(users, p)) in points.iter().enumerate() {
        exec.progress(idx, points.len(), &format!("schedule L={users} k={k} P={p}"));
        round_robin_schedule(users, k, 0)?;
        let power = PowerConfig::new(p)?;
        let lane = lane_id(&[TAG_SCHEDULE, users as u64, relays as u64, p.to_bits(), k as u64]);
        let results = exec.map_indexed(cfg.slots, |slot| {
            let mut rng = RngStream::new(cfg.seed, lane, slot);
            let group = round_robin_schedule(users, k, slot)?;
            let sample = trial_sum_rate(k, relays, power, opts, &mut rng)?;
            Ok((group, sample))
        });
        let slots = collect_trials(results)?;

        let mut usage = SolverUsage::default();
        let mut totals = alloc::vec![0.0; users];
        let mut sums = Vec::with_capacity(slots.len());
        for (group, sample) in &slots {
            sample.solvers.iter().for_each(|&s| usage.record(s));
            for (&u, &r) in group.iter().zip(&sample.user_rates) {
                totals[u] += r;
            }
            sums.push(sample.sum);
        }
        let per_user: Vec<f64> = totals.iter().map(|t| t / cfg.slots as f64).collect();
        let worst = per_user.iter().copied().fold(f64::INFINITY, f64::min);
        let label = usage.label();
        let point = Point {
            users: Some(users),
            relays: Some(relays),
            power: Some(p),
            group_size: Some(k),
        };
        rows.push(point.row("sum_rate", &sums, label));
        rows.push(point.row("user_throughput", &per_user, label));
        let mut min_row = point.analytic("min_user_throughput", worst, None);
        min_row.trials = cfg.slots;
        min_row.solver = String::from(label);
        rows.push(min_row);
    }
    Ok(rows)
}

/// Square systems (`L = M`): optimal-CF sum-rate against the interference
/// lower bound on the same draws and the analytic ceiling.
pub fn run_bounds_vs_power<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Vec<SummaryRow>> {
    cfg.validate()?;
    let m = cfg.relays;
    if m < 2 {
        return Err(Error::InvalidConfig("bounds need at least 2 relays"));
    }
    if cfg.powers.iter().any(|&p| p < 3.0) {
        return Err(Error::InvalidConfig("bounds need power of at least 3"));
    }
    let opts = cfg.solve_options();
    let mut rows = Vec::new();
    for (idx, &p) in cfg.powers.iter().enumerate() {
        exec.progress(idx, cfg.powers.len(), &format!("bounds M={m} P={p}"));
        let power = PowerConfig::new(p)?;
        let lane = lane_id(&[TAG_BOUNDS, m as u64, p.to_bits()]);
        let results = exec.map_indexed(cfg.trials, |t| -> Result<(f64, f64, SolverUsage)> {
            let mut rng = RngStream::new(cfg.seed, lane, t);
            let channels = sample_channels(m, m, &mut rng)?;
            let lower = sum_rate_lower_bound(&channels, power)?.value;
            let sample = evaluate_sum_rate(&channels, power, opts)?;
            let mut usage = SolverUsage::default();
            sample.solvers.iter().for_each(|&s| usage.record(s));
            Ok((lower, sample.sum, usage))
        });
        let trials = collect_trials(results)?;
        let mut usage = SolverUsage::default();
        for (_, _, u) in &trials {
            usage.exhaustive += u.exhaustive;
            usage.candidate += u.candidate;
        }
        let label = usage.label();
        let lower: Vec<f64> = trials.iter().map(|t| t.0).collect();
        let optimal: Vec<f64> = trials.iter().map(|t| t.1).collect();
        let violations: Vec<f64> = trials.iter().map(|t| to_f64(t.0 > t.1)).collect();
        let point = Point {
            users: Some(m),
            relays: Some(m),
            power: Some(p),
            ..Point::default()
        };
        rows.push(point.row("lower_bound", &lower, label));
        rows.push(point.row("optimal_sum_rate", &optimal, label));
        rows.push(point.analytic("upper_bound", sum_rate_upper_bound(m, power)?.value, None));
        rows.push(point.row("lower_bound_violation_rate", &violations, label));
    }
    Ok(rows)
}

/// KS statistic of the squared cosine `(a.h)^2 / (|a|^2 |h|^2)` over `n`
/// Gaussian channels against `Beta(1/2, (L-1)/2)`.
pub fn ks_test_cos2(users: usize, n: usize, a: &CoefficientVector, rng: &mut RngStream) -> Result<f64> {
    if n < 100 {
        return Err(Error::Domain("need at least 100 samples"));
    }
    if users < 2 {
        return Err(Error::Domain("need at least 2 users"));
    }
    if a.len() != users {
        return Err(Error::DimensionMismatch {
            expected: users,
            found: a.len(),
        });
    }
    let a_sq = a.norm_sq() as f64;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let h = sample_channel(users, rng)?;
        let d: f64 = h.as_slice().iter().zip(a.as_slice()).map(|(x, &y)| x * y as f64).sum();
        samples.push(d * d / (a_sq * h.norm_sq()));
    }
    let b = (users as f64 - 1.0) / 2.0;
    let mut failure = None;
    let d = ks_statistic(&mut samples, |x| match reg_inc_beta(x.clamp(0.0, 1.0), 0.5, b) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(d),
    }
}
