//! Search for the coefficient vector that maximizes the computation rate,
//! i.e. the nonzero integer minimizer of `f(a) = a' G a`.
//!
//! Two solvers are provided:
//!
//! * [`exhaustive_search`] is exact. It is a depth-first sphere-decoding
//!   enumeration over the Cholesky factor of `G` with the bound shrinking to
//!   the best value seen, seeded with the best unit vector. Every integer
//!   point with `f(a)` not above the optimum is visited, so the result is the
//!   global minimizer.
//! * [`candidate_search`] sweeps `a(alpha) = round(alpha h)` over `alpha > 0`.
//!   The rounded vector only changes where some `alpha |h_i|` crosses a
//!   half-integer, so one evaluation per breakpoint interval covers the
//!   family. The optimal vector is always a member of it.
//!
//! Results are canonical (`h.a >= 0`) and ties are broken by
//! `(f, |a|^2, lexicographic entries)` ascending.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::rate::{self, f_from_parts, quadratic_form, rate_from_f, GramMatrix};
use crate::{ChannelVector, CoefficientVector, Error, PowerConfig, RateValue, Result};

/// Default cap on enumeration nodes for the exhaustive solver.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Relative slack applied to the pruning bound so that float rounding in the
/// Cholesky partial sums cannot drop an exact tie.
const BOUND_SLACK: f64 = 1e-9;

/// Solver policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Exhaustive,
    Candidate,
    /// Exhaustive while within the node budget, candidate sweep otherwise.
    Auto,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Exhaustive => "exhaustive",
            Solver::Candidate => "candidate",
            Solver::Auto => "auto",
        }
    }
}

impl core::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Solver::Exhaustive),
            "candidate" => Ok(Solver::Candidate),
            "auto" => Ok(Solver::Auto),
            _ => Err(Error::InvalidConfig("solver must be exhaustive, candidate or auto")),
        }
    }
}

/// Which routine actually produced a [`SearchResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Exhaustive,
    Candidate,
    UnitBaseline,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Candidate => "candidate",
            SolverKind::UnitBaseline => "unit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub coefficients: CoefficientVector,
    pub f_value: f64,
    pub rate: RateValue,
    pub candidates_examined: u64,
    pub solver: SolverKind,
}

impl SearchResult {
    pub fn is_unit(&self) -> bool {
        is_unit_vector(&self.coefficients)
    }
}

/// True iff exactly one entry is `+-1` and the rest are zero.
pub fn is_unit_vector(a: &CoefficientVector) -> bool {
    let mut ones = 0;
    for &x in a.as_slice() {
        match x {
            0 => {}
            1 | -1 => ones += 1,
            _ => return false,
        }
    }
    ones == 1
}

/// Total order used for tie-breaking between candidates.
fn compare(f1: f64, a1: &CoefficientVector, f2: f64, a2: &CoefficientVector) -> Ordering {
    f1.total_cmp(&f2)
        .then_with(|| a1.norm_sq().cmp(&a2.norm_sq()))
        .then_with(|| a1.as_slice().cmp(a2.as_slice()))
}

struct Incumbent {
    a: CoefficientVector,
    f: f64,
}

impl Incumbent {
    fn offer(&mut self, a: CoefficientVector, f: f64) -> bool {
        if compare(f, &a, self.f, &self.a) == Ordering::Less {
            self.a = a;
            self.f = f;
            true
        } else {
            false
        }
    }

    fn finish(self, h: &ChannelVector, power: PowerConfig, examined: u64, solver: SolverKind) -> Result<SearchResult> {
        let rate = rate_from_f(self.f, h, power)?;
        Ok(SearchResult {
            coefficients: self.a,
            f_value: self.f,
            rate,
            candidates_examined: examined,
            solver,
        })
    }
}

/// The strongest user's unit vector `+-e_i`, `i = argmax |h_i|` (smallest
/// index on ties), with `f = 1 + P(|h|^2 - h_i^2)`.
pub fn best_unit_vector(h: &ChannelVector, power: PowerConfig) -> Result<SearchResult> {
    h.require_nonzero()?;
    let i = h.strongest();
    let a = CoefficientVector::unit(h.len(), i).aligned_with(h);
    let f = quadratic_form(h, &a, power)?;
    Incumbent { a, f }.finish(h, power, h.len() as u64, SolverKind::UnitBaseline)
}

/// Exact minimizer of `f` with the default node budget.
pub fn exhaustive_search(h: &ChannelVector, power: PowerConfig) -> Result<SearchResult> {
    exhaustive_search_with_budget(h, power, DEFAULT_NODE_BUDGET)
}

/// Exact minimizer of `f`; fails with [`Error::BudgetExceeded`] once more
/// than `budget` enumeration nodes have been visited.
pub fn exhaustive_search_with_budget(h: &ChannelVector, power: PowerConfig, budget: u64) -> Result<SearchResult> {
    h.require_nonzero()?;
    let n = h.len();

    // Enumerate the weakest users first (top of the tree): their projected
    // ellipsoid is nearly round and admits few points.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h.as_slice()[j].abs().total_cmp(&h.as_slice()[i].abs()).then(i.cmp(&j)));
    let permuted = ChannelVector::new(order.iter().map(|&i| h.as_slice()[i]).collect())?;
    let r = GramMatrix::new(&permuted, power).cholesky_upper()?;

    let seed = best_unit_vector(h, power)?;
    let mut walk = Enumeration {
        h,
        power,
        n,
        r,
        order,
        coords: alloc::vec![0; n],
        best: Incumbent {
            a: seed.coefficients,
            f: seed.f_value,
        },
        bound: 0.0,
        nodes: 0,
        leaves: 0,
        budget,
    };
    walk.bound = walk.best.f * (1.0 + BOUND_SLACK);
    walk.descend(n - 1, 0.0)?;
    let examined = walk.leaves;
    walk.best.finish(h, power, examined, SolverKind::Exhaustive)
}

struct Enumeration<'a> {
    h: &'a ChannelVector,
    power: PowerConfig,
    n: usize,
    /// Upper Cholesky factor of the permuted Gram matrix, row-major.
    r: Vec<f64>,
    /// `order[k]` is the original index of permuted coordinate `k`.
    order: Vec<usize>,
    coords: Vec<i64>,
    best: Incumbent,
    bound: f64,
    nodes: u64,
    leaves: u64,
    budget: u64,
}

impl Enumeration<'_> {
    fn descend(&mut self, level: usize, partial: f64) -> Result<()> {
        let n = self.n;
        let rii = self.r[level * n + level];
        let mut center = 0.0;
        for j in (level + 1)..n {
            center -= self.r[level * n + j] / rii * self.coords[j] as f64;
        }
        let top = level == n - 1;

        let start = libm::round(center) as i64;
        let mut up = start;
        let mut down = start - 1;
        let mut up_open = true;
        let mut down_open = !(top && down < 0);
        while up_open || down_open {
            // Next closest value to the center.
            let take_up = match (up_open, down_open) {
                (true, true) => (up as f64 - center).abs() <= (center - down as f64).abs(),
                (u, _) => u,
            };
            let x = if take_up { up } else { down };
            let offset = x as f64 - center;
            let value = partial + rii * rii * offset * offset;
            if value > self.bound {
                if take_up {
                    up_open = false;
                } else {
                    down_open = false;
                }
                continue;
            }
            if take_up {
                up += 1;
            } else {
                down -= 1;
                if top && down < 0 {
                    down_open = false;
                }
            }

            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget });
            }
            self.coords[level] = x;
            if level == 0 {
                self.visit_leaf()?;
            } else {
                self.descend(level - 1, value)?;
            }
        }
        self.coords[level] = 0;
        Ok(())
    }

    fn visit_leaf(&mut self) -> Result<()> {
        if self.coords.iter().all(|&x| x == 0) {
            return Ok(());
        }
        self.leaves += 1;
        let mut entries = alloc::vec![0; self.n];
        for (k, &orig) in self.order.iter().enumerate() {
            entries[orig] = self.coords[k];
        }
        let a = CoefficientVector::new(entries)?.aligned_with(self.h);
        let f = quadratic_form(self.h, &a, self.power)?;
        if self.best.offer(a, f) {
            self.bound = self.best.f * (1.0 + BOUND_SLACK);
        }
        Ok(())
    }
}

/// Best vector among `round(alpha h)`, `alpha > 0`, plus the strongest
/// user's unit vector.
///
/// The optimal scaling satisfies `alpha* |h_i| < sqrt(1 + P|h|^2)` for every
/// `i`, so only breakpoints `alpha = (k + 1/2)/|h_i|` below
/// `sqrt(1 + P|h|^2) / max|h_i|` matter. At most `L * ceil(radius) + 1`
/// vectors are evaluated.
pub fn candidate_search(h: &ChannelVector, power: PowerConfig) -> Result<SearchResult> {
    h.require_nonzero()?;
    let hs = h.as_slice();
    let p = power.get();
    let h_sq = h.norm_sq();
    let radius = rate::search_radius(h, power);
    let radius_sq = radius * radius;
    let h_max = hs.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut breakpoints: Vec<(f64, usize)> = Vec::new();
    for (i, &x) in hs.iter().enumerate() {
        let mag = x.abs();
        if mag == 0.0 {
            continue;
        }
        let limit = radius * mag / h_max;
        let mut k = 0.0;
        while k + 0.5 < limit {
            breakpoints.push(((k + 0.5) / mag, i));
            k += 1.0;
        }
    }
    breakpoints.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let unit = best_unit_vector(h, power)?;
    let mut best = Incumbent {
        a: unit.coefficients,
        f: unit.f_value,
    };
    let mut examined = 1u64;

    // Magnitudes of round(alpha |h|); signs of h restored on materialization.
    let mut mags = alloc::vec![0i64; hs.len()];
    let mut a_sq = 0.0;
    let mut proj = 0.0;
    let mut idx = 0;
    while idx < breakpoints.len() {
        let alpha = breakpoints[idx].0;
        while idx < breakpoints.len() && breakpoints[idx].0 == alpha {
            let i = breakpoints[idx].1;
            let m = mags[i];
            a_sq += (2 * m + 1) as f64;
            proj += hs[i].abs();
            mags[i] = m + 1;
            idx += 1;
        }
        if a_sq >= radius_sq {
            continue;
        }
        examined += 1;
        let approx = f_from_parts(a_sq, h_sq, proj, p);
        if approx <= best.f * (1.0 + BOUND_SLACK) {
            let entries = hs
                .iter()
                .zip(&mags)
                .map(|(&x, &m)| if x < 0.0 { -m } else { m })
                .collect();
            let a = CoefficientVector::new(entries)?.aligned_with(h);
            let f = quadratic_form(h, &a, power)?;
            best.offer(a, f);
        }
    }
    best.finish(h, power, examined, SolverKind::Candidate)
}

/// Runs `solver`, falling back from exhaustive to candidate under
/// [`Solver::Auto`] when the node budget is exhausted.
pub fn solve(h: &ChannelVector, power: PowerConfig, solver: Solver, budget: u64) -> Result<SearchResult> {
    match solver {
        Solver::Exhaustive => exhaustive_search_with_budget(h, power, budget),
        Solver::Candidate => candidate_search(h, power),
        Solver::Auto => match exhaustive_search_with_budget(h, power, budget) {
            Err(Error::BudgetExceeded { .. }) => candidate_search(h, power),
            other => other,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ch(v: &[f64]) -> ChannelVector {
        ChannelVector::new(v.to_vec()).unwrap()
    }

    fn pw(p: f64) -> PowerConfig {
        PowerConfig::new(p).unwrap()
    }

    #[test]
    fn aligned_pair_channel() {
        let h = ch(&[1.0, 1.0]);
        for res in [
            exhaustive_search(&h, pw(10.0)).unwrap(),
            candidate_search(&h, pw(10.0)).unwrap(),
        ] {
            assert_eq!(res.coefficients.as_slice(), &[1, 1]);
            assert_eq!(res.f_value, 2.0);
            assert!((res.rate.bits() - 0.5 * 10.5f64.log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_unit_channel() {
        for p in [0.1, 1.0, 100.0] {
            let h = ch(&[1.0, 0.0, 0.0]);
            let res = exhaustive_search(&h, pw(p)).unwrap();
            assert_eq!(res.coefficients.as_slice(), &[1, 0, 0]);
            assert_eq!(res.f_value, 1.0);
        }
    }

    #[test]
    fn tiny_power_picks_strongest_unit() {
        let h = ch(&[0.1, -2.0, 0.5]);
        for res in [
            exhaustive_search(&h, pw(1e-6)).unwrap(),
            candidate_search(&h, pw(1e-6)).unwrap(),
        ] {
            assert!(res.is_unit());
            assert_eq!(res.coefficients.argmax_abs(), vec![1]);
        }
    }

    #[test]
    fn scaled_unit_channel_candidate() {
        for c in [0.3, -4.0, 17.5] {
            let h = ch(&[0.0, c, 0.0]);
            let res = candidate_search(&h, pw(10.0)).unwrap();
            assert_eq!(res.coefficients.canonical().as_slice(), &[0, 1, 0]);
        }
    }

    #[test]
    fn degenerate_channel_rejected() {
        let h = ch(&[0.0, 0.0]);
        assert_eq!(exhaustive_search(&h, pw(1.0)), Err(Error::DegenerateChannel));
        assert_eq!(candidate_search(&h, pw(1.0)), Err(Error::DegenerateChannel));
        assert_eq!(best_unit_vector(&h, pw(1.0)), Err(Error::DegenerateChannel));
    }

    #[test]
    fn best_unit_examples() {
        let res = best_unit_vector(&ch(&[0.1, -2.0, 0.5]), pw(1.0)).unwrap();
        assert_eq!(res.coefficients.as_slice(), &[0, -1, 0]);
        let res = best_unit_vector(&ch(&[1.0, 1.0]), pw(1.0)).unwrap();
        assert_eq!(res.coefficients.as_slice(), &[1, 0]);
        assert_eq!(res.f_value, 2.0);
    }

    #[test]
    fn best_unit_dominates_other_units() {
        let h = ch(&[0.7, -1.3, 0.2, 1.1]);
        let p = pw(5.0);
        let best = best_unit_vector(&h, p).unwrap();
        for j in 0..4 {
            let f = quadratic_form(&h, &CoefficientVector::unit(4, j), p).unwrap();
            assert!(best.f_value <= f);
        }
    }

    #[test]
    fn unit_vector_predicate() {
        let v = |e: &[i64]| CoefficientVector::new(e.to_vec()).unwrap();
        assert!(is_unit_vector(&v(&[0, 1, 0])));
        assert!(is_unit_vector(&v(&[0, -1, 0])));
        assert!(!is_unit_vector(&v(&[1, 1, 0])));
        assert!(!is_unit_vector(&v(&[0, 2, 0])));
    }

    #[test]
    fn budget_is_enforced() {
        let h = ch(&[0.9, -1.1, 0.4, 1.3, 0.2]);
        assert_eq!(
            exhaustive_search_with_budget(&h, pw(100.0), 3),
            Err(Error::BudgetExceeded { budget: 3 })
        );
        let auto = solve(&h, pw(100.0), Solver::Auto, 3).unwrap();
        assert_eq!(auto.solver, SolverKind::Candidate);
        let exact = solve(&h, pw(100.0), Solver::Auto, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(exact.solver, SolverKind::Exhaustive);
        assert!((auto.rate.bits() - exact.rate.bits()).abs() < 1e-9);
    }

    #[test]
    fn negated_channel_gives_same_canonical_optimum() {
        let h = ch(&[0.8, -1.7, 0.45, 1.2]);
        let neg = ch(&[-0.8, 1.7, -0.45, -1.2]);
        let a = exhaustive_search(&h, pw(30.0)).unwrap();
        let b = exhaustive_search(&neg, pw(30.0)).unwrap();
        assert_eq!(a.coefficients.canonical(), b.coefficients.canonical());
        assert_eq!(a.f_value, b.f_value);
    }

    #[test]
    fn solver_names_parse() {
        for s in [Solver::Exhaustive, Solver::Candidate, Solver::Auto] {
            assert_eq!(s.name().parse::<Solver>().unwrap(), s);
        }
        assert!("lll".parse::<Solver>().is_err());
    }
}
