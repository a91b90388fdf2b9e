//! The initial value problem `x' = f(t, x)`, `x(t0) = x0` on `[t0, t0 + a]`,
//! together with the claimed bounds `|f| <= M` and the 1-norm Lipschitz
//! constant `L` on the rectangle `U = [t0, t0 + a] x [x0 - M a, x0 + M a]`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, EvalError, Expr};

/// Default per-axis resolution for [`validate_problem`].
pub const DEFAULT_VALIDATION_RESOLUTION: usize = 64;

/// A scalar right-hand side `f(t, x)`.
///
/// Implementations must be safe to call concurrently.
pub trait Rhs: Send + Sync {
    fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError>;
}

impl<F> Rhs for F
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        let v = self(t, x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::new(format!("non-finite value {v}")))
        }
    }
}

impl Rhs for Expr {
    fn eval(&self, t: f64, x: f64) -> Result<f64, EvalError> {
        Expr::eval(self, t, x)
    }
}

#[derive(Clone)]
pub struct Problem {
    rhs: Arc<dyn Rhs>,
    t0: f64,
    x0: f64,
    a: f64,
    m_bound: f64,
    l_const: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("t0", &self.t0)
            .field("x0", &self.x0)
            .field("a", &self.a)
            .field("m_bound", &self.m_bound)
            .field("l_const", &self.l_const)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        rhs: impl Rhs + 'static,
        t0: f64,
        x0: f64,
        a: f64,
        m_bound: f64,
        l_const: f64,
    ) -> Result<Self> {
        Self::with_shared_rhs(Arc::new(rhs), t0, x0, a, m_bound, l_const)
    }

    pub fn with_shared_rhs(
        rhs: Arc<dyn Rhs>,
        t0: f64,
        x0: f64,
        a: f64,
        m_bound: f64,
        l_const: f64,
    ) -> Result<Self> {
        for (name, v) in [("t0", t0), ("x0", x0)] {
            if !v.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        for (name, v) in [("a", a), ("M", m_bound), ("L", l_const)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(t0 + a).is_finite() || !(m_bound * a).is_finite() {
            return Err(Error::InvalidProblem(
                "window or rectangle overflows".into(),
            ));
        }
        Ok(Problem {
            rhs,
            t0,
            x0,
            a,
            m_bound,
            l_const,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    /// Window length.
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn t_end(&self) -> f64 {
        self.t0 + self.a
    }
    /// Claimed bound M on |f| over U.
    pub fn m_bound(&self) -> f64 {
        self.m_bound
    }
    /// Claimed Lipschitz constant L over U.
    pub fn l_const(&self) -> f64 {
        self.l_const
    }

    /// Evaluates `f` at absolute time `t`, mapping failures to [`Error::RhsFailure`].
    pub fn f(&self, t: f64, x: f64) -> Result<f64> {
        self.rhs.eval(t, x).map_err(|e| Error::rhs(t, x, e))
    }

    /// True when both problems share the same right-hand side and parameters.
    pub fn same_as(&self, other: &Problem) -> bool {
        Arc::ptr_eq(&self.rhs, &other.rhs)
            && self.t0.to_bits() == other.t0.to_bits()
            && self.x0.to_bits() == other.x0.to_bits()
            && self.a.to_bits() == other.a.to_bits()
            && self.m_bound.to_bits() == other.m_bound.to_bits()
            && self.l_const.to_bits() == other.l_const.to_bits()
    }

    /// Same problem with a different claimed M.
    pub fn with_m_bound(&self, m_bound: f64) -> Result<Self> {
        Self::with_shared_rhs(
            self.rhs.clone(),
            self.t0,
            self.x0,
            self.a,
            m_bound,
            self.l_const,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub t_lo: f64,
    pub t_hi: f64,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl Rect {
    pub fn contains(&self, t: f64, x: f64) -> bool {
        (self.t_lo..=self.t_hi).contains(&t) && (self.x_lo..=self.x_hi).contains(&x)
    }
}

/// The hypothesis rectangle `U`.
pub fn rect_of(p: &Problem) -> Rect {
    let half = p.m_bound * p.a;
    Rect {
        t_lo: p.t0,
        t_hi: p.t0 + p.a,
        x_lo: p.x0 - half,
        x_hi: p.x0 + half,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub max_abs_f_sampled: f64,
    pub lipschitz_estimate: f64,
    pub bound_ok: bool,
    pub lipschitz_ok: bool,
    /// `(t, x)` of the largest sampled |f|, then both ends of the steepest
    /// adjacent pair.
    pub worst_points: Vec<(f64, f64)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.bound_ok && self.lipschitz_ok
    }
}

fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    // i/n is rounded once, so nested lattices share their common points bit for bit
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / n as f64)
            }
        })
        .collect()
}

/// Spot-checks the claimed M and L on an `(n+1) x (n+1)` uniform lattice over U.
///
/// The Lipschitz estimate is the largest difference quotient over
/// horizontally and vertically adjacent lattice points. Sampling can only
/// under-estimate the true suprema, so a passing report is necessary but not
/// sufficient for the hypotheses to hold.
pub fn validate_problem(p: &Problem, n: usize) -> Result<ValidationReport> {
    if n < 2 {
        return Err(Error::Usage(format!(
            "validation resolution must be >= 2, got {n}"
        )));
    }
    let u = rect_of(p);
    let ts = lattice(u.t_lo, u.t_hi, n);
    let xs = lattice(u.x_lo, u.x_hi, n);

    let mut values = vec![0.0; (n + 1) * (n + 1)];
    for (i, &t) in ts.iter().enumerate() {
        for (j, &x) in xs.iter().enumerate() {
            values[i * (n + 1) + j] = p.rhs.eval(t, x).map_err(|e| Error::HypothesisViolation {
                t,
                x,
                detail: format!("rhs not evaluable inside U: {e}"),
            })?;
        }
    }
    let at = |i: usize, j: usize| values[i * (n + 1) + j];

    let mut max_abs = 0.0_f64;
    let mut max_pt = (ts[0], xs[0]);
    let mut lip = 0.0_f64;
    let mut lip_pair = ((ts[0], xs[0]), (ts[0], xs[0]));
    for i in 0..=n {
        for j in 0..=n {
            let v = at(i, j);
            if v.abs() > max_abs {
                max_abs = v.abs();
                max_pt = (ts[i], xs[j]);
            }
            if i < n {
                let q = (at(i + 1, j) - v).abs() / (ts[i + 1] - ts[i]);
                if q > lip {
                    lip = q;
                    lip_pair = ((ts[i], xs[j]), (ts[i + 1], xs[j]));
                }
            }
            if j < n {
                let q = (at(i, j + 1) - v).abs() / (xs[j + 1] - xs[j]);
                if q > lip {
                    lip = q;
                    lip_pair = ((ts[i], xs[j]), (ts[i], xs[j + 1]));
                }
            }
        }
    }

    Ok(ValidationReport {
        max_abs_f_sampled: max_abs,
        lipschitz_estimate: lip,
        bound_ok: max_abs <= p.m_bound,
        lipschitz_ok: lip <= p.l_const,
        worst_points: vec![max_pt, lip_pair.0, lip_pair.1],
    })
}

/// On-disk problem description: `{"f": "x", "t0": 0, "x0": 1, "a": 0.5, "M": 2, "L": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub f: String,
    pub t0: f64,
    pub x0: f64,
    pub a: f64,
    #[serde(rename = "M")]
    pub m_bound: f64,
    #[serde(rename = "L")]
    pub l_const: f64,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidProblem(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidProblem(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn into_problem(self) -> Result<Problem> {
        let rhs = expr::parse(&self.f)?;
        Problem::new(rhs, self.t0, self.x0, self.a, self.m_bound, self.l_const)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_problem(m: f64) -> Problem {
        Problem::new(|_t: f64, x: f64| x, 0.0, 1.0, 0.5, m, 1.0).unwrap()
    }

    #[test]
    fn rect_examples() {
        let zero = |_t: f64, _x: f64| 0.0;
        let r = rect_of(&Problem::new(zero, 0.0, 1.0, 0.5, 2.0, 1.0).unwrap());
        assert_eq!((r.t_lo, r.t_hi, r.x_lo, r.x_hi), (0.0, 0.5, 0.0, 2.0));
        let r = rect_of(&Problem::new(zero, 1.0, 0.0, 1.0, 1.0, 1.0).unwrap());
        assert_eq!((r.t_lo, r.t_hi, r.x_lo, r.x_hi), (1.0, 2.0, -1.0, 1.0));
        let r = rect_of(&Problem::new(zero, 0.0, 0.0, 1.0, 0.25, 1.0).unwrap());
        assert_eq!((r.t_lo, r.t_hi, r.x_lo, r.x_hi), (0.0, 1.0, -0.25, 0.25));
        assert_eq!(r.x_hi - r.x_lo, 2.0 * 0.25 * 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let zero = |_t: f64, _x: f64| 0.0;
        assert!(Problem::new(zero, 0.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(Problem::new(zero, 0.0, 0.0, 1.0, -1.0, 1.0).is_err());
        assert!(Problem::new(zero, 0.0, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(Problem::new(zero, f64::NAN, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Problem::new(zero, 0.0, 0.0, f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn validate_zero_function() {
        let p = Problem::new(|_t: f64, _x: f64| 0.0, 0.0, 0.0, 1.0, 0.3, 0.7).unwrap();
        let r = validate_problem(&p, 8).unwrap();
        assert_eq!(r.max_abs_f_sampled, 0.0);
        assert_eq!(r.lipschitz_estimate, 0.0);
        assert!(r.bound_ok && r.lipschitz_ok);
    }

    #[test]
    fn validate_exp_problem() {
        let r = validate_problem(&exp_problem(2.0), 16).unwrap();
        assert_eq!(r.max_abs_f_sampled, 2.0);
        assert_eq!(r.worst_points[0].1, 2.0);
        assert_eq!(r.lipschitz_estimate, 1.0);
        assert!(r.bound_ok && r.lipschitz_ok);
    }

    #[test]
    fn validate_flags_understated_bound() {
        // U = [0, 0.5] x [0.75, 1.25]; largest |f| on the top edge
        let r = validate_problem(&exp_problem(0.5), 16).unwrap();
        assert!(!r.bound_ok);
        assert_eq!(r.max_abs_f_sampled, 1.25);
        assert_eq!(r.worst_points[0].1, 1.25);
    }

    #[test]
    fn validate_reports_rhs_failure_location() {
        let p = Problem::new(expr::parse("1/(x-1)").unwrap(), 0.0, 1.0, 0.5, 2.0, 1.0).unwrap();
        match validate_problem(&p, 4) {
            Err(Error::HypothesisViolation { x, .. }) => assert_eq!(x, 1.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(validate_problem(&p, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn problem_file_round_trip() {
        let text = r#"{"f": "x", "t0": 0.0, "x0": 1.0, "a": 0.5, "M": 2.0, "L": 1.0}"#;
        let pf = ProblemFile::from_json(text).unwrap();
        assert_eq!(pf.m_bound, 2.0);
        let p = pf.clone().into_problem().unwrap();
        assert_eq!(p.f(0.0, 1.25).unwrap(), 1.25);
        let back = ProblemFile::from_json(&serde_json::to_string(&pf).unwrap()).unwrap();
        assert_eq!(back, pf);
    }

    #[test]
    fn problem_file_errors() {
        assert!(matches!(
            ProblemFile::from_json(r#"{"f": "x"}"#),
            Err(Error::InvalidProblem(_))
        ));
        let bad =
            ProblemFile::from_json(r#"{"f": "x+", "t0": 0, "x0": 1, "a": 0.5, "M": 2, "L": 1}"#)
                .unwrap();
        assert!(matches!(bad.into_problem(), Err(Error::Parse(_))));
    }
}
