//! Exact indices into the dyadic set `{ a k / 2^m : 0 <= k <= 2^m }`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Finest supported refinement level.
pub const MAX_LEVEL: u32 = 40;

/// A dyadic point `a * k / 2^m` in canonical form: either `(0, 0)` or `k` odd.
/// `m` is then the first level whose grid contains the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DyadicPoint {
    k: u64,
    m: u32,
}

fn check_level(m: u32) -> Result<()> {
    if m > MAX_LEVEL {
        return Err(Error::Domain(format!(
            "level {m} exceeds the maximum {MAX_LEVEL}"
        )));
    }
    Ok(())
}

impl DyadicPoint {
    /// Reduces `k / 2^m` to lowest terms.
    pub fn canonicalize(k: u64, m: u32) -> Result<Self> {
        check_level(m)?;
        if k > 1u64 << m {
            return Err(Error::Domain(format!("index {k} outside [0, 2^{m}]")));
        }
        if k == 0 {
            return Ok(DyadicPoint { k: 0, m: 0 });
        }
        let shift = k.trailing_zeros().min(m);
        Ok(DyadicPoint {
            k: k >> shift,
            m: m - shift,
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Canonical level `m_d`.
    pub fn level(&self) -> u32 {
        self.m
    }

    /// Index of this point on the level-`m` grid.
    pub fn at_level(&self, m: u32) -> Result<u64> {
        check_level(m)?;
        if m < self.m {
            return Err(Error::Level {
                k: self.k,
                m: self.m,
                requested: m,
            });
        }
        Ok(self.k << (m - self.m))
    }

    /// Fraction of the window, `k / 2^m` (exact in double precision).
    pub fn fraction(&self) -> f64 {
        self.k as f64 / (1u64 << self.m) as f64
    }

    /// Offset from the window start for window length `a`.
    pub fn value(&self, a: f64) -> f64 {
        a * self.fraction()
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.k, self.m)
    }
}

/// Level-`m` grid point nearest to offset `t` in `[0, a]`; ties go to even `k`.
pub fn nearest_at_level(t: f64, m: u32, a: f64) -> Result<DyadicPoint> {
    check_level(m)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!(
            "window length {a} must be finite and > 0"
        )));
    }
    if !(0.0..=a).contains(&t) {
        return Err(Error::Domain(format!("offset {t} outside [0, {a}]")));
    }
    let n = 1u64 << m;
    let scaled = (t / a) * n as f64;
    let k = (scaled.round_ties_even() as u64).min(n);
    DyadicPoint::canonicalize(k, m)
}
