use std::fs::File;
use std::io::{self, BufWriter, Write};

use dyadic_ivp::report::{format_real, write_convergence_rows, write_sample_table};
use dyadic_ivp::{
    build_grid, build_grid_unchecked, choose_level, containment_check, cross_check,
    refinement_report, validate_problem, Error, Problem, ProblemFile, Solution,
    DEFAULT_VALIDATION_RESOLUTION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_CAPACITY: u8 = 3;
pub const EXIT_PROPERTY: u8 = 4;

const MODULUS_PAIRS: usize = 1000;
const RESIDUAL_PROBES: usize = 16;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::RhsFailure { .. } | Error::HypothesisViolation { .. } => EXIT_HYPOTHESIS,
        Error::Capacity { .. } | Error::Range(_) => EXIT_CAPACITY,
        _ => EXIT_CONFIG,
    }
}

fn fail(e: Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(&e)
}

fn load(cfg: &RunConfig) -> Result<Problem, Error> {
    ProblemFile::load(&cfg.problem)?.into_problem()
}

fn output(cfg: &RunConfig) -> Result<Box<dyn Write>, Error> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn required_level(cfg: &RunConfig) -> Result<u32, Error> {
    cfg.level
        .ok_or_else(|| Error::Usage("--level is required for this command".into()))
}

pub fn solve(cfg: &RunConfig) -> u8 {
    match run_solve(cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn run_solve(cfg: &RunConfig) -> Result<(), Error> {
    let p = load(cfg)?;
    let report = validate_problem(&p, DEFAULT_VALIDATION_RESOLUTION)?;
    if !report.passed() {
        let (t, x) = if report.bound_ok {
            report.worst_points[1]
        } else {
            report.worst_points[0]
        };
        return Err(Error::HypothesisViolation {
            t,
            x,
            detail: format!(
                "sampled max |f| = {} (M = {}), Lipschitz estimate = {} (L = {})",
                report.max_abs_f_sampled,
                p.m_bound(),
                report.lipschitz_estimate,
                p.l_const()
            ),
        });
    }
    let level = match (cfg.level, cfg.tol) {
        (Some(m), _) => m,
        (None, Some(tol)) => choose_level(&p, tol)?,
        (None, None) => return Err(Error::Usage("solve needs --tol or --level".into())),
    };
    let s = Solution::build(&p, level)?;
    let rows = s.sample_table(cfg.samples)?;
    write_sample_table(output(cfg)?, &rows)?;

    let b = s.bounds();
    eprintln!("level: {level}");
    eprintln!("eval_bound: {}", format_real(s.eval_bound()));
    eprintln!("alpha: {}", format_real(b.alpha));
    eprintln!("beta: {}", format_real(b.beta));
    eprintln!("C: {}", format_real(b.c_const));
    Ok(())
}

pub fn converge(cfg: &RunConfig) -> u8 {
    match run_converge(cfg) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("error: inter-level bound violated");
            EXIT_PROPERTY
        }
        Err(e) => fail(e),
    }
}

fn run_converge(cfg: &RunConfig) -> Result<bool, Error> {
    let (lo, hi) = (cfg.min_level.unwrap_or(3), cfg.max_level.unwrap_or(11));
    if lo >= hi {
        return Err(Error::Usage(format!(
            "--min-level ({lo}) must be below --max-level ({hi})"
        )));
    }
    let p = load(cfg)?;
    let mut reports = Vec::new();
    let mut coarse = build_grid(&p, lo)?;
    for m in lo..hi {
        let fine = build_grid(&p, m + 1)?;
        reports.push(refinement_report(&coarse, &fine)?);
        coarse = fine;
    }
    write_convergence_rows(output(cfg)?, &reports)?;
    Ok(reports.iter().all(|r| r.bound_satisfied))
}

pub fn verify(cfg: &RunConfig) -> u8 {
    match run_verify(cfg) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_PROPERTY,
        Err(e) => fail(e),
    }
}

struct Checklist {
    out: Box<dyn Write>,
    all_ok: bool,
}

impl Checklist {
    fn record(&mut self, name: &str, ok: bool, detail: String) -> Result<(), Error> {
        self.all_ok &= ok;
        let tag = if ok { "PASS" } else { "FAIL" };
        writeln!(self.out, "{tag} {name}: {detail}")?;
        Ok(())
    }
}

fn run_verify(cfg: &RunConfig) -> Result<bool, Error> {
    let level = required_level(cfg)?;
    if level < 2 {
        return Err(Error::Usage(
            "verify needs --level >= 2 (the residual probe must span four grid steps)".into(),
        ));
    }
    let p = load(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut list = Checklist {
        out: output(cfg)?,
        all_ok: true,
    };

    let v = validate_problem(&p, DEFAULT_VALIDATION_RESOLUTION)?;
    list.record(
        "validation",
        v.passed(),
        format!(
            "max |f| = {} vs M = {}; Lipschitz estimate = {} vs L = {}",
            format_real(v.max_abs_f_sampled),
            format_real(p.m_bound()),
            format_real(v.lipschitz_estimate),
            format_real(p.l_const())
        ),
    )?;

    let grid = build_grid_unchecked(&p, level)?;
    let c = containment_check(&grid, cfg.seed);
    list.record(
        "containment",
        c.ok,
        format!(
            "worst node {} (t = {}) excess {}; {} pairs checked",
            c.worst_node,
            format_real(c.worst_node_time),
            format_real(c.worst_node_excess),
            c.pairs_checked
        ),
    )?;

    let s = Solution::new(grid)?;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..MODULUS_PAIRS {
        let t = rng.gen_range(p.t0()..=p.t_end());
        let u = rng.gen_range(p.t0()..=p.t_end());
        let diff = (s.evaluate(t)?.value - s.evaluate(u)?.value).abs();
        worst_gap = worst_gap.max(diff - (p.m_bound() * (t - u).abs() + 2.0 * s.eval_bound()));
    }
    list.record(
        "lipschitz-modulus",
        worst_gap <= 0.0,
        format!(
            "{MODULUS_PAIRS} pairs, worst slack {}",
            format_real(worst_gap)
        ),
    )?;

    // widest of a/2^(m-4) capped at a/2, never finer than the a/2^(m-2) floor
    let floor = p.a() / 2f64.powi(level as i32 - 2);
    let h = (p.a() / 2f64.powi(level as i32 - 4))
        .min(p.a() / 2.0)
        .max(floor);
    let ceiling = s.residual_bound(h);
    let mut worst = 0.0f64;
    for _ in 0..RESIDUAL_PROBES {
        let t = p.t0() + rng.gen_range(0.0..=1.0) * (p.a() - h);
        worst = worst.max(s.derivative_residual(t.min(p.t_end()), h)?);
    }
    list.record(
        "derivative-residual",
        worst <= ceiling,
        format!(
            "{RESIDUAL_PROBES} probes, h = {}, worst {} <= {}",
            format_real(h),
            format_real(worst),
            format_real(ceiling)
        ),
    )?;

    let cc = cross_check(&p, &s, 4usize << level)?;
    list.record(
        "cross-check",
        cc.passed,
        format!(
            "max discrepancy {} vs allowance {}",
            format_real(cc.max_discrepancy),
            format_real(cc.allowance)
        ),
    )?;
    list.out.flush()?;
    Ok(list.all_ok)
}

pub fn compare(cfg: &RunConfig) -> u8 {
    match run_compare(cfg) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_PROPERTY,
        Err(e) => fail(e),
    }
}

fn run_compare(cfg: &RunConfig) -> Result<bool, Error> {
    let level = required_level(cfg)?;
    let p = load(cfg)?;
    let s = Solution::build(&p, level)?;
    let steps = 4usize << level;
    let cc = cross_check(&p, &s, steps)?;
    let mut out = output(cfg)?;
    writeln!(out, "level: {level}")?;
    writeln!(out, "oracle_steps: {steps}")?;
    writeln!(out, "max_discrepancy: {}", format_real(cc.max_discrepancy))?;
    writeln!(out, "eval_bound: {}", format_real(cc.eval_bound))?;
    writeln!(out, "oracle_error: {}", format_real(cc.oracle_error))?;
    writeln!(out, "allowance: {}", format_real(cc.allowance))?;
    writeln!(out, "result: {}", if cc.passed { "pass" } else { "fail" })?;
    out.flush()?;
    Ok(cc.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(exit_code(&Error::Usage("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::InvalidProblem("x".into())), EXIT_CONFIG);
        let hv = Error::HypothesisViolation {
            t: 0.0,
            x: 0.0,
            detail: String::new(),
        };
        assert_eq!(exit_code(&hv), EXIT_HYPOTHESIS);
        let rf = Error::RhsFailure {
            t: 0.0,
            x: 0.0,
            message: String::new(),
        };
        assert_eq!(exit_code(&rf), EXIT_HYPOTHESIS);
        let cap = Error::Capacity {
            detail: String::new(),
            best_bound: None,
        };
        assert_eq!(exit_code(&cap), EXIT_CAPACITY);
    }
}
