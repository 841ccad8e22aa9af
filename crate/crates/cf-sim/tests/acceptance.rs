//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Thresholds and sample sizes are fixed here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cf_core::analysis::{cosine_tail_bound, power_law_tail_bound, spread_vector};
use cf_core::channel::lane_id;
use cf_core::exec::Sequential;
use cf_core::experiments::{
    run_bounds_vs_power, run_scheduled_sum_rate, run_sum_rate_vs_users, run_unit_vector_probability, ExperimentConfig,
    SummaryRow,
};
use cf_core::rate::{alpha_mmse, computation_rate, computation_rate_alpha, quadratic_form, quadratic_form_pairwise};
use cf_core::search::{candidate_search, exhaustive_search, Solver};
use cf_core::{sample_channel, ChannelVector, CoefficientVector, GramMatrix, PowerConfig, RngStream};
use cf_sim::commands::summary_table;
use cf_sim::exec::RayonExecutor;
use statrs::distribution::{Beta, ContinuousCDF};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn within_time(limit: Duration, start: Instant, mut out: Outcome) -> Outcome {
    let took = start.elapsed();
    out.detail = format!(
        "{}; {:.2}s (limit {}s)",
        out.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    out.passed &= took < limit;
    out
}

fn rel_err(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

fn rng(tag: u64, parts: &[u64], stream: u64) -> RngStream {
    let mut key = vec![tag];
    key.extend_from_slice(parts);
    RngStream::new(SEED, lane_id(&key), stream)
}

fn random_coefficients(l: usize, rng: &mut RngStream, span: i64) -> CoefficientVector {
    loop {
        let v: Vec<i64> = (0..l)
            .map(|_| (rng.uniform() * (2 * span + 1) as f64).floor() as i64 - span)
            .collect();
        if let Ok(a) = CoefficientVector::new(v) {
            return a;
        }
    }
}

/// `a' G a` with `G = (1 + P|h|^2) I - P h h'` built entry by entry.
fn gram_oracle(h: &[f64], a: &[i64], p: f64) -> f64 {
    let h_sq: f64 = h.iter().map(|x| x * x).sum();
    let mut total = 0.0;
    for i in 0..h.len() {
        for j in 0..h.len() {
            let g = if i == j { 1.0 + p * h_sq } else { 0.0 } - p * h[i] * h[j];
            total += a[i] as f64 * g * a[j] as f64;
        }
    }
    total
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut r = rng(1, &[], 0);
    let n = 10_000;
    for i in 0..n {
        let l = 2 + i % 7;
        let p = [1.0, 10.0, 100.0][(i / 7) % 3];
        let pw = PowerConfig::new(p).unwrap();
        let h = sample_channel(l, &mut r).unwrap();
        let a = random_coefficients(l, &mut r, 3);
        let oracle = gram_oracle(h.as_slice(), a.as_slice(), p);
        let forms = [
            quadratic_form(&h, &a, pw).unwrap(),
            quadratic_form_pairwise(&h, &a, pw).unwrap(),
            GramMatrix::new(&h, pw).quadratic_form(&a).unwrap(),
        ];
        for f in forms {
            worst = worst.max(rel_err(f, oracle));
        }
        let snr = 1.0 + p * h.norm_sq();
        let expected = (0.5 * (snr / oracle).log2()).max(0.0);
        worst = worst.max(rel_err(computation_rate(&h, &a, pw).unwrap().bits(), expected));
    }
    within_time(
        Duration::from_secs(10),
        start,
        Outcome::new(
            worst <= 1e-9,
            format!("{n} instances, max rel err {worst:.2e} (tol 1e-9)"),
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut increases = 0;
    let mut r = rng(2, &[], 0);
    let n = 1000;
    for i in 0..n {
        let l = 2 + i % 7;
        let p = [1.0, 10.0, 100.0][(i / 7) % 3];
        let pw = PowerConfig::new(p).unwrap();
        let h = sample_channel(l, &mut r).unwrap();
        let a = if i % 2 == 0 {
            exhaustive_search(&h, pw).unwrap().coefficients
        } else {
            random_coefficients(l, &mut r, 2)
        };
        let alpha = alpha_mmse(&h, &a, pw).unwrap();
        let best = computation_rate_alpha(&h, &a, pw, alpha).unwrap().bits();
        for scale in [1.001, 0.999] {
            let perturbed = computation_rate_alpha(&h, &a, pw, alpha * scale).unwrap().bits();
            if perturbed > best {
                increases += 1;
            }
        }
    }
    within_time(
        Duration::from_secs(5),
        start,
        Outcome::new(
            increases == 0,
            format!("{n} instances, {increases} rate increases under +-0.1% alpha"),
        ),
    )
}

/// Criteria 3 and 4 share their trials.
fn criteria_3_and_4() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut violations = 0;
    let mut searched = 0;
    for l in 2..=6usize {
        for p in [1.0, 10.0, 100.0] {
            let pw = PowerConfig::new(p).unwrap();
            for t in 0..500 {
                let mut r = rng(3, &[l as u64, p.to_bits()], t);
                let h = sample_channel(l, &mut r).unwrap();
                let ex = exhaustive_search(&h, pw).unwrap();
                let cand = candidate_search(&h, pw).unwrap();
                worst = worst.max(rel_err(ex.rate.bits(), cand.rate.bits()));
                for res in [&ex, &cand] {
                    searched += 1;
                    if !strongest_has_max_entry(&h, &res.coefficients) {
                        violations += 1;
                    }
                }
            }
        }
    }
    let c3 = within_time(
        Duration::from_secs(120),
        start,
        Outcome::new(
            worst <= 1e-9,
            format!("7500 channels, max rel rate gap {worst:.2e} (tol 1e-9)"),
        ),
    );
    let c4 = Outcome::new(
        violations == 0,
        format!("{violations} violations in {searched} searched vectors"),
    );
    (c3, c4)
}

fn strongest_has_max_entry(h: &ChannelVector, a: &CoefficientVector) -> bool {
    let hs = h.as_slice();
    let strongest = (0..hs.len()).fold(0, |b, i| if hs[i].abs() > hs[b].abs() { i } else { b });
    let max_entry = a.as_slice().iter().map(|x| x.abs()).max().unwrap();
    a.as_slice()[strongest].abs() == max_entry
}

fn ks_against(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let c = cdf(x);
        d.max(c - i as f64 / n).max((i + 1) as f64 / n - c)
    })
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let n = 10_000usize;
    let threshold = 1.63 / (n as f64).sqrt();
    let mut parts = Vec::new();
    let mut ok = true;
    for l in [4usize, 16] {
        let beta = Beta::new(0.5, (l as f64 - 1.0) / 2.0).unwrap();
        let choices = [
            CoefficientVector::unit(l, 0),
            CoefficientVector::new(spread_vector(2, l).unwrap()).unwrap(),
        ];
        for (k, a) in choices.iter().enumerate() {
            let mut r = rng(5, &[l as u64, k as u64], 0);
            let a_sq = a.norm_sq() as f64;
            let mut xs: Vec<f64> = (0..n)
                .map(|_| {
                    let h = sample_channel(l, &mut r).unwrap();
                    let d: f64 = h.as_slice().iter().zip(a.as_slice()).map(|(x, &y)| x * y as f64).sum();
                    d * d / (a_sq * h.norm_sq())
                })
                .collect();
            let d = ks_against(&mut xs, |x| beta.cdf(x));
            ok &= d < threshold;
            parts.push(format!("L={l} a#{k} D={d:.4}"));
        }
    }
    within_time(
        Duration::from_secs(10),
        start,
        Outcome::new(ok, format!("{} (threshold {threshold:.4})", parts.join(", "))),
    )
}

fn criterion_6() -> Outcome {
    let n = 10_000u64;
    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    let mut checked = 0;
    for l in [4usize, 8, 16] {
        for s in [2u64, 4, 9] {
            let a = CoefficientVector::new(spread_vector(s, l).unwrap()).unwrap();
            let e1 = CoefficientVector::unit(l, 0);
            let wins = (0..n)
                .filter(|&t| {
                    let mut r = rng(6, &[l as u64, s], t);
                    let h = sample_channel(l, &mut r).unwrap();
                    gram_oracle(h.as_slice(), a.as_slice(), 10.0) <= gram_oracle(h.as_slice(), e1.as_slice(), 10.0)
                })
                .count();
            let p_hat = wins as f64 / n as f64;
            let se = (p_hat * (1.0 - p_hat) / n as f64).sqrt();
            let phi = 1.0 - 1.0 / s as f64;
            let cosine_oracle = 1.0 - Beta::new(0.5, (l as f64 - 1.0) / 2.0).unwrap().cdf(phi);
            let cosine = cosine_tail_bound(s as f64, l).unwrap().value;
            ok &= rel_err(cosine, cosine_oracle) < 1e-9;
            let mut bounds = vec![cosine];
            if l >= 5 {
                bounds.push(power_law_tail_bound(s as f64, l).unwrap().value);
            }
            for b in bounds {
                checked += 1;
                let margin = b + 3.0 * se - p_hat;
                worst_margin = worst_margin.min(margin);
                ok &= margin >= 0.0;
            }
        }
    }
    Outcome::new(
        ok,
        format!("{checked} bound checks, smallest margin bound+3SE-empirical = {worst_margin:.3e}"),
    )
}

fn stat<'a>(rows: &'a [SummaryRow], statistic: &str) -> Vec<&'a SummaryRow> {
    rows.iter().filter(|r| r.statistic == statistic).collect()
}

fn criterion_7(exec: &RayonExecutor) -> Outcome {
    let cfg = ExperimentConfig {
        users: vec![4, 8, 16, 32],
        powers: vec![10.0],
        trials: 10_000,
        seed: SEED,
        solver: Solver::Exhaustive,
        ..ExperimentConfig::default()
    };
    let rows = run_unit_vector_probability(&cfg, exec).unwrap();
    let p = stat(&rows, "p_nonunit");
    let mut monotone = true;
    for w in p.windows(2) {
        let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        monotone &= w[1].mean <= w[0].mean + 2.0 * se;
    }
    let last = p.last().unwrap().mean;
    let values: Vec<String> = p.iter().map(|r| format!("{:.4}", r.mean)).collect();
    Outcome::new(
        monotone && last < 0.2,
        format!(
            "P(non-unit) over L=4,8,16,32: [{}]; monotone={monotone}; L=32 value {last:.4} (< 0.2)",
            values.join(", ")
        ),
    )
}

fn criterion_8_config() -> ExperimentConfig {
    ExperimentConfig {
        users: vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 24, 32, 48, 64],
        relays: 4,
        powers: vec![10.0],
        trials: 1000,
        seed: SEED,
        solver: Solver::Auto,
        ..ExperimentConfig::default()
    }
}

fn criterion_8(exec: &RayonExecutor) -> Outcome {
    let cfg = criterion_8_config();
    let rows = run_sum_rate_vs_users(&cfg, exec).unwrap();
    let s = stat(&rows, "sum_rate");
    let peak_idx = (0..s.len()).fold(0, |b, i| if s[i].mean > s[b].mean { i } else { b });
    let peak = s[peak_idx];
    let l_star = peak.users.unwrap();
    let tail = s.last().unwrap().mean;
    let interior = peak_idx > 0 && peak_idx + 1 < s.len();
    Outcome::new(
        interior && l_star <= 10 && tail < 0.5 * peak.mean,
        format!(
            "peak {:.4} at L*={l_star} (interior={interior}); L=64 {:.4} = {:.1}% of peak (< 50%)",
            peak.mean,
            tail,
            100.0 * tail / peak.mean
        ),
    )
}

fn criterion_9(exec: &RayonExecutor) -> Outcome {
    let sched = ExperimentConfig {
        users: vec![12, 120],
        relays: 3,
        powers: vec![10.0],
        group_size: 3,
        slots: 10_000,
        seed: SEED,
        ..ExperimentConfig::default()
    };
    let rows = run_scheduled_sum_rate(&sched, exec).unwrap();
    let s = stat(&rows, "sum_rate");
    let (s12, s120) = (s[0].mean, s[1].mean);
    let unsched_cfg = ExperimentConfig {
        users: vec![120],
        relays: 3,
        powers: vec![10.0],
        trials: 1000,
        seed: SEED,
        ..ExperimentConfig::default()
    };
    let unsched = stat(&run_sum_rate_vs_users(&unsched_cfg, exec).unwrap(), "sum_rate")[0].mean;
    let drift = (s120 - s12).abs() / s12;
    let ratio = s120 / unsched;
    Outcome::new(
        drift <= 0.05 && ratio >= 2.0,
        format!(
            "scheduled L=12 {s12:.4}, L=120 {s120:.4} (drift {:.2}% <= 5%); unscheduled L=120 {unsched:.4}, ratio {ratio:.2} (>= 2)",
            100.0 * drift
        ),
    )
}

fn criterion_10(exec: &RayonExecutor) -> Outcome {
    let cfg = ExperimentConfig {
        relays: 4,
        powers: vec![10.0, 100.0],
        trials: 1000,
        seed: SEED,
        ..ExperimentConfig::default()
    };
    let rows = run_bounds_vs_power(&cfg, exec).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &p in &cfg.powers {
        let get = |name: &str| rows.iter().find(|r| r.power == Some(p) && r.statistic == name).unwrap();
        let lower = get("lower_bound").mean;
        let optimal = get("optimal_sum_rate").mean;
        let upper = get("upper_bound").mean;
        let upper_oracle = p.log2() / (1.0 + 1.0 / 4.0) + p.log2().log2();
        let violations = get("lower_bound_violation_rate").mean;
        let sandwich = lower <= optimal && optimal <= upper && rel_err(upper, upper_oracle) < 1e-12;
        let this = sandwich && violations < 0.01;
        ok &= this;
        parts.push(format!(
            "P={p}: {lower:.3} <= {optimal:.3} <= {upper:.3} sandwich={sandwich}, per-draw violations {:.1}% (< 1%)",
            100.0 * violations
        ));
    }
    Outcome::new(ok, parts.join("; "))
}

fn criterion_11() -> Outcome {
    let mut worst = 0.0f64;
    for s in [2u64, 3, 4, 9] {
        for l in 4..=64usize {
            let got = power_law_tail_bound(s as f64, l).unwrap().raw;
            let want = (1.0 / s as f64).powf((l as f64 - 1.0) / 2.0 - 1.0);
            worst = worst.max(rel_err(got, want));
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("max rel err {worst:.2e} over s=2,3,4,9, L=4..64 (tol 1e-12)"),
    )
}

fn criterion_12() -> Outcome {
    let cfg = criterion_8_config();
    let csv_with = |threads| {
        let exec = RayonExecutor::new(threads, false).unwrap();
        summary_table(&run_sum_rate_vs_users(&cfg, &exec).unwrap()).to_csv_string()
    };
    let one = csv_with(1);
    let four = csv_with(4);
    let seq = summary_table(&run_sum_rate_vs_users(&cfg, &Sequential).unwrap()).to_csv_string();
    Outcome::new(
        one == four && one == seq,
        format!("1-thread, 4-thread and sequential CSV identical ({} bytes)", one.len()),
    )
}

fn main() -> ExitCode {
    let exec = RayonExecutor::from_env(false).expect("thread pool");
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, title: &str, out: Outcome| {
        println!(
            "criterion {n:>2} {}: {title}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
        results.push((n, out));
    };
    report(1, "f forms and rate identity", criterion_1());
    report(2, "MMSE scaling optimality", criterion_2());
    let (c3, c4) = criteria_3_and_4();
    report(3, "candidate vs exhaustive search", c3);
    report(4, "strongest user carries a maximal entry", c4);
    report(5, "squared-cosine Beta law (KS)", criterion_5());
    report(6, "fixed-vector tail bounds", criterion_6());
    report(7, "non-unit probability decays", criterion_7(&exec));
    report(8, "sum-rate peak and decay", criterion_8(&exec));
    report(9, "round-robin scheduling", criterion_9(&exec));
    report(10, "sum-rate bound sandwich", criterion_10(&exec));
    report(11, "power-law bound identity", criterion_11());
    report(12, "determinism across thread counts", criterion_12());
    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
