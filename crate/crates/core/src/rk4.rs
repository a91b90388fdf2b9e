//! Classical fixed-step fourth-order Runge-Kutta, kept independent of the
//! Euler construction so it can serve as a cross-check oracle.

use crate::error::Result;
use crate::problem::Problem;

/// Integrates from `(t_start, x_start)` to `t_stop` with `steps` equal steps.
pub fn rk4_integrate(
    p: &Problem,
    t_start: f64,
    x_start: f64,
    t_stop: f64,
    steps: usize,
) -> Result<f64> {
    let h = (t_stop - t_start) / steps as f64;
    let mut x = x_start;
    for i in 0..steps {
        let t = t_start + h * i as f64;
        let k1 = p.f(t, x)?;
        let k2 = p.f(t + 0.5 * h, x + 0.5 * h * k1)?;
        let k3 = p.f(t + 0.5 * h, x + 0.5 * h * k2)?;
        let k4 = p.f(t + h, x + h * k3)?;
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    Ok(x)
}

/// Solution at each of `times` (ascending, starting at `t0`), taking
/// `steps_per_interval` steps between consecutive times.
pub fn rk4_at_times(p: &Problem, times: &[f64], steps_per_interval: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let Some(&first) = times.first() else {
        return Ok(out);
    };
    let mut x = p.x0();
    if first != p.t0() {
        x = rk4_integrate(p, p.t0(), x, first, steps_per_interval)?;
    }
    out.push(x);
    for w in times.windows(2) {
        x = rk4_integrate(p, w[0], x, w[1], steps_per_interval)?;
        out.push(x);
    }
    Ok(out)
}
