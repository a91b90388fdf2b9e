//! Level-`m` Euler polygons on the dyadic grid and their a-priori bounds.
//!
//! With `h = a / 2^m` the level-`m` iterates are
//!
//! ```text
//! x^m_0     = x0
//! x^m_{k+1} = x^m_k + h f(t0 + k h, x^m_k)
//! ```
//!
//! Consecutive levels satisfy `|x^{m+1}_d - x^m_d| <= C / 2^m` at every common
//! node `d`, with
//!
//! ```text
//! alpha = a L / 2^m
//! beta  = a^2 L (M + 1) / 2^(2m + 2)
//! C     = a (M + 1) (e^(aL) (1 + aL) - 1) / 4
//! ```
//!
//! so the level-`m` values lie within `C / 2^(m-1)` of the limit function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dyadic::MAX_LEVEL;
use crate::error::{Error, Result};
use crate::problem::Problem;

/// Absolute cushion for the exact-in-reals inequalities checked on
/// floating-point data: `1e-9 + 1e-12 * max(|lhs|, |rhs|)`.
pub fn fp_slack(lhs: f64, rhs: f64) -> f64 {
    1e-9 + 1e-12 * lhs.abs().max(rhs.abs())
}

/// `lhs <= rhs` up to [`fp_slack`].
pub fn le_with_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + fp_slack(lhs, rhs)
}

/// Number of random node pairs checked by [`containment_check`].
pub const CONTAINMENT_PAIR_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridLimits {
    /// Largest number of stored values (`2^m + 1`) a build may allocate.
    pub max_values: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        GridLimits {
            max_values: 1 << 26,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EulerGrid {
    level: u32,
    values: Vec<f64>,
    problem: Problem,
}

impl EulerGrid {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// `values()[k]` is the iterate at `t0 + a k / 2^m`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn step(&self) -> f64 {
        self.problem.a() / (1u64 << self.level) as f64
    }

    /// Absolute time of node `k`.
    pub fn node_time(&self, k: u64) -> f64 {
        node_time(&self.problem, self.level, k)
    }
}

fn node_time(p: &Problem, m: u32, k: u64) -> f64 {
    p.t0() + p.a() * (k as f64 / (1u64 << m) as f64)
}

fn check_build_level(m: u32, limits: GridLimits) -> Result<()> {
    if !(1..=MAX_LEVEL).contains(&m) {
        return Err(Error::Domain(format!(
            "grid level must be in [1, {MAX_LEVEL}], got {m}"
        )));
    }
    let count = (1u64 << m) + 1;
    if count > limits.max_values as u64 {
        return Err(Error::Capacity {
            detail: format!(
                "level {m} needs {count} values, limit is {}",
                limits.max_values
            ),
            best_bound: None,
        });
    }
    Ok(())
}

fn run_recursion(p: &Problem, m: u32, check_containment: bool) -> Result<Vec<f64>> {
    let n = 1u64 << m;
    let h = p.a() / n as f64;
    let (x0, big_m) = (p.x0(), p.m_bound());
    let mut values = Vec::with_capacity(n as usize + 1);
    values.push(x0);
    let mut x = x0;
    for k in 0..n {
        let t = node_time(p, m, k);
        x += h * p.f(t, x)?;
        if check_containment {
            let offset = p.a() * ((k + 1) as f64 / n as f64);
            let drift = (x - x0).abs();
            let allowed = big_m * offset;
            if !le_with_slack(drift, allowed) {
                return Err(Error::HypothesisViolation {
                    t: node_time(p, m, k + 1),
                    x,
                    detail: format!(
                        "Euler iterate left U at node {} of level {m}: |x - x0| = {drift} > M (t - t0) = {allowed}; M is understated",
                        k + 1
                    ),
                });
            }
        }
        values.push(x);
    }
    Ok(values)
}

/// Builds the level-`m` Euler polygon, calling `f` exactly `2^m` times in
/// ascending node order. Fails if an iterate leaves `U`.
pub fn build_grid(p: &Problem, m: u32) -> Result<EulerGrid> {
    build_grid_with_limits(p, m, GridLimits::default())
}

pub fn build_grid_with_limits(p: &Problem, m: u32, limits: GridLimits) -> Result<EulerGrid> {
    check_build_level(m, limits)?;
    Ok(EulerGrid {
        level: m,
        values: run_recursion(p, m, true)?,
        problem: p.clone(),
    })
}

/// Like [`build_grid`] but without the containment check, so that a grid can
/// be produced (and diagnosed with [`containment_check`]) even when the
/// claimed `M` is too small.
pub fn build_grid_unchecked(p: &Problem, m: u32) -> Result<EulerGrid> {
    check_build_level(m, GridLimits::default())?;
    Ok(EulerGrid {
        level: m,
        values: run_recursion(p, m, false)?,
        problem: p.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub ok: bool,
    /// Node maximizing `|x_k - x0| - M (t_k - t0)`.
    pub worst_node: u64,
    pub worst_node_time: f64,
    pub worst_node_excess: f64,
    pub pairs_checked: usize,
    /// Pair maximizing `|x_k - x_j| - M |t_k - t_j|`.
    pub worst_pair: (u64, u64),
    pub worst_pair_excess: f64,
}

/// Checks `|x_k - x0| <= M (t_k - t0)` at every node and
/// `|x_k - x_j| <= M |t_k - t_j|` on sampled node pairs (all pairs when there
/// are at most [`CONTAINMENT_PAIR_SAMPLES`] of them).
pub fn containment_check(g: &EulerGrid, seed: u64) -> ContainmentReport {
    let p = &g.problem;
    let n = 1u64 << g.level;
    let frac = |k: u64| k as f64 / n as f64;
    let (x0, big_m, a) = (p.x0(), p.m_bound(), p.a());

    let mut ok = true;
    let mut worst_node = 0;
    let mut worst_node_excess = f64::NEG_INFINITY;
    for (k, &v) in g.values.iter().enumerate() {
        let k = k as u64;
        let drift = (v - x0).abs();
        let allowed = big_m * a * frac(k);
        ok &= le_with_slack(drift, allowed);
        if drift - allowed > worst_node_excess {
            worst_node_excess = drift - allowed;
            worst_node = k;
        }
    }

    let mut worst_pair = (0, 0);
    let mut worst_pair_excess = f64::NEG_INFINITY;
    let mut check_pair = |k: u64, j: u64, ok: &mut bool| {
        let diff = (g.values[k as usize] - g.values[j as usize]).abs();
        let allowed = big_m * a * frac(k.abs_diff(j));
        *ok &= le_with_slack(diff, allowed);
        if diff - allowed > worst_pair_excess {
            worst_pair_excess = diff - allowed;
            worst_pair = (k, j);
        }
    };
    let total_pairs = (n + 1) * n / 2;
    let pairs_checked = if total_pairs <= CONTAINMENT_PAIR_SAMPLES as u64 {
        for k in 0..=n {
            for j in k + 1..=n {
                check_pair(k, j, &mut ok);
            }
        }
        total_pairs as usize
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..CONTAINMENT_PAIR_SAMPLES {
            let k = rng.gen_range(0..=n);
            let j = rng.gen_range(0..=n);
            check_pair(k, j, &mut ok);
        }
        CONTAINMENT_PAIR_SAMPLES
    };

    ContainmentReport {
        ok,
        worst_node,
        worst_node_time: g.node_time(worst_node),
        worst_node_excess,
        pairs_checked,
        worst_pair,
        worst_pair_excess,
    }
}

/// The constants `alpha`, `beta`, `C` at level `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundModel {
    pub level: u32,
    pub alpha: f64,
    pub beta: f64,
    pub c_const: f64,
}

impl BoundModel {
    /// `C / 2^m`, the bound on inter-level deltas.
    pub fn delta_bound(&self) -> f64 {
        self.c_const / (1u64 << self.level) as f64
    }

    /// `C / 2^(m-1)`, the distance from the level-`m` values to the limit.
    pub fn tail_bound(&self) -> f64 {
        self.c_const / (1u64 << (self.level - 1)) as f64
    }
}

pub fn bound_constants(p: &Problem, m: u32) -> Result<BoundModel> {
    if !(1..=MAX_LEVEL).contains(&m) {
        return Err(Error::Domain(format!(
            "bound level must be in [1, {MAX_LEVEL}], got {m}"
        )));
    }
    let (a, big_m, l) = (p.a(), p.m_bound(), p.l_const());
    let al = a * l;
    let growth = al.exp();
    let c_const = a * (big_m + 1.0) * (growth * (1.0 + al) - 1.0) / 4.0;
    if !c_const.is_finite() {
        return Err(Error::Range(format!(
            "C overflows for a L = {al} (e^(aL) = {growth})"
        )));
    }
    let scale = (1u64 << m) as f64;
    Ok(BoundModel {
        level: m,
        alpha: al / scale,
        beta: a * a * l * (big_m + 1.0) / (4.0 * scale * scale),
        c_const,
    })
}

/// `C / 2^(m-1)`.
pub fn tail_bound(p: &Problem, m: u32) -> Result<f64> {
    Ok(bound_constants(p, m)?.tail_bound())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub level: u32,
    /// `deltas[k] = |x^{m+1}_{2k} - x^m_k|`.
    pub deltas: Vec<f64>,
    pub max_delta: f64,
    pub bound: f64,
    pub bound_satisfied: bool,
}

/// Compares the level-`m` grid with the level-`m+1` grid at their common nodes.
pub fn refinement_report(coarse: &EulerGrid, fine: &EulerGrid) -> Result<ConvergenceReport> {
    if fine.level != coarse.level + 1 {
        return Err(Error::Usage(format!(
            "refinement needs consecutive levels, got {} and {}",
            coarse.level, fine.level
        )));
    }
    if !coarse.problem.same_as(&fine.problem) {
        return Err(Error::Usage(
            "grids were built from different problems".into(),
        ));
    }
    let deltas: Vec<f64> = coarse
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| (fine.values[2 * k] - v).abs())
        .collect();
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let bound = bound_constants(&coarse.problem, coarse.level)?.delta_bound();
    Ok(ConvergenceReport {
        level: coarse.level,
        max_delta,
        bound,
        bound_satisfied: le_with_slack(max_delta, bound),
        deltas,
    })
}
