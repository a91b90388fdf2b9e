//! Dense output over `[t0, t0 + a]` with a certified error bound per value.
//!
//! At level `m` the value returned for `t` is the grid value at the nearest
//! level-`m` node `d`. The limit function moves by at most `M |t - d|`
//! between `d` and `t`, and the grid value at `d` is within `C / 2^(m-1)` of
//! the limit, so each evaluation carries the bound
//! `C / 2^(m-1) + M |t - d| <= C / 2^(m-1) + M a / 2^(m+1)`.

use serde::Serialize;

use crate::dyadic::{nearest_at_level, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::euler_grid::{bound_constants, build_grid, le_with_slack, BoundModel, EulerGrid};
use crate::problem::Problem;
use crate::rk4::rk4_at_times;

/// Number of equal intervals sampled by [`cross_check`] (33 probe times).
pub const CROSS_CHECK_INTERVALS: usize = 32;

#[derive(Debug, Clone)]
pub struct Solution {
    grid: EulerGrid,
    bounds: BoundModel,
    eval_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub bound: f64,
}

fn interpolation_term(p: &Problem, m: u32) -> f64 {
    p.m_bound() * p.a() / 2f64.powi(m as i32 + 1)
}

fn total_bound(p: &Problem, bounds: &BoundModel) -> f64 {
    bounds.tail_bound() + interpolation_term(p, bounds.level)
}

impl Solution {
    pub fn new(grid: EulerGrid) -> Result<Self> {
        let bounds = bound_constants(grid.problem(), grid.level())?;
        let eval_bound = total_bound(grid.problem(), &bounds);
        Ok(Solution {
            grid,
            bounds,
            eval_bound,
        })
    }

    /// Builds the level-`m` grid and wraps it.
    pub fn build(p: &Problem, m: u32) -> Result<Self> {
        Self::new(build_grid(p, m)?)
    }

    pub fn grid(&self) -> &EulerGrid {
        &self.grid
    }

    pub fn problem(&self) -> &Problem {
        self.grid.problem()
    }

    pub fn level(&self) -> u32 {
        self.grid.level()
    }

    pub fn bounds(&self) -> &BoundModel {
        &self.bounds
    }

    /// Worst-case bound over the whole window.
    pub fn eval_bound(&self) -> f64 {
        self.eval_bound
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let p = self.problem();
        if !(p.t0()..=p.t_end()).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                p.t0(),
                p.t_end()
            )));
        }
        Ok((t - p.t0()).clamp(0.0, p.a()))
    }

    pub fn evaluate(&self, t: f64) -> Result<Evaluation> {
        let offset = self.check_time(t)?;
        let p = self.problem();
        let m = self.level();
        let d = nearest_at_level(offset, m, p.a())?;
        let k = d.at_level(m)? as usize;
        Ok(Evaluation {
            value: self.grid.values()[k],
            bound: self.bounds.tail_bound() + p.m_bound() * (offset - d.value(p.a())).abs(),
        })
    }

    /// Documented ceiling for [`Solution::derivative_residual`] at probe width `h`:
    /// `2 B / h + L (M + 1) h + L B` with `B` the window-wide evaluation bound.
    pub fn residual_bound(&self, h: f64) -> f64 {
        let p = self.problem();
        let b = self.eval_bound;
        2.0 * b / h + p.l_const() * (p.m_bound() + 1.0) * h + p.l_const() * b
    }

    /// `|(x(t+h) - x(t)) / h - f(t, x(t))|` using evaluated values only.
    ///
    /// Uses the forward quotient when `t + h` is inside the window and the
    /// backward quotient over `[t - h, t]` otherwise. `h` may not be finer
    /// than four grid steps.
    pub fn derivative_residual(&self, t: f64, h: f64) -> Result<f64> {
        let p = self.problem();
        let floor = p.a() / 2f64.powi(self.level() as i32 - 2);
        if !(h.is_finite() && h >= floor) {
            return Err(Error::Usage(format!(
                "probe width {h} below the floor a/2^(m-2) = {floor}"
            )));
        }
        self.check_time(t)?;
        let here = self.evaluate(t)?.value;
        let slope = if t + h <= p.t_end() {
            (self.evaluate(t + h)?.value - here) / h
        } else if t - h >= p.t0() {
            (here - self.evaluate(t - h)?.value) / h
        } else {
            return Err(Error::Domain(format!(
                "probe of width {h} around t = {t} leaves the window"
            )));
        };
        Ok((slope - p.f(t, here)?).abs())
    }

    pub fn sample_table(&self, n: usize) -> Result<Vec<SampleRow>> {
        if n < 2 {
            return Err(Error::Usage(format!("sample count must be >= 2, got {n}")));
        }
        let p = self.problem();
        (0..=n)
            .map(|i| {
                let t = if i == n {
                    p.t_end()
                } else {
                    p.t0() + p.a() * (i as f64 / n as f64)
                };
                let e = self.evaluate(t)?;
                Ok(SampleRow {
                    t,
                    x: e.value,
                    bound: e.bound,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub t: f64,
    pub x: f64,
    pub bound: f64,
}

/// Least level `m >= 1` with `C / 2^(m-1) + M a / 2^(m+1) <= eps`.
pub fn choose_level(p: &Problem, eps: f64) -> Result<u32> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Usage(format!("tolerance must be > 0, got {eps}")));
    }
    let mut best = f64::INFINITY;
    for m in 1..=MAX_LEVEL {
        let b = total_bound(p, &bound_constants(p, m)?);
        if b <= eps {
            return Ok(m);
        }
        best = best.min(b);
    }
    Err(Error::Capacity {
        detail: format!(
            "tolerance {eps:e} unreachable at level {MAX_LEVEL}; best achievable bound is {best:e}"
        ),
        best_bound: Some(best),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub times: Vec<f64>,
    pub euler: Vec<f64>,
    pub oracle: Vec<f64>,
    pub max_discrepancy: f64,
    /// Richardson estimate of the RK4 error, `C_RK * steps^-4`.
    pub oracle_error: f64,
    pub eval_bound: f64,
    pub allowance: f64,
    pub passed: bool,
}

/// Compares the solution against an independent RK4 run at 33 equally spaced
/// times. The oracle error is estimated from a second run with twice the
/// steps: `(16/15) |y_N - y_2N|`.
pub fn cross_check(p: &Problem, s: &Solution, oracle_steps: usize) -> Result<CrossCheck> {
    let needed = 1usize << s.level();
    if oracle_steps < needed {
        return Err(Error::Usage(format!(
            "oracle needs at least 2^m = {needed} steps, got {oracle_steps}"
        )));
    }
    let n = CROSS_CHECK_INTERVALS;
    let times: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                p.t_end()
            } else {
                p.t0() + p.a() * (i as f64 / n as f64)
            }
        })
        .collect();
    let per_interval = oracle_steps.div_ceil(n);
    let oracle = rk4_at_times(p, &times, per_interval)?;
    let refined = rk4_at_times(p, &times, 2 * per_interval)?;
    let oracle_error = oracle
        .iter()
        .zip(&refined)
        .map(|(a, b)| (a - b).abs() * 16.0 / 15.0)
        .fold(0.0, f64::max);

    let euler = times
        .iter()
        .map(|&t| s.evaluate(t).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let max_discrepancy = euler
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let allowance = s.eval_bound() + oracle_error;
    Ok(CrossCheck {
        passed: le_with_slack(max_discrepancy, allowance),
        times,
        euler,
        oracle,
        max_discrepancy,
        oracle_error,
        eval_bound: s.eval_bound(),
        allowance,
    })
}
