//! CSV output for sample tables and convergence studies.

use std::io::Write;

use crate::error::Result;
use crate::euler_grid::ConvergenceReport;
use crate::solution::SampleRow;

/// Formats `v` with 17 significant digits, like C's `%.17g`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    strip_zeros(&format!("{v:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `t,x,bound` rows.
pub fn write_sample_table<W: Write>(out: W, rows: &[SampleRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "bound"])?;
    for r in rows {
        w.write_record([format_real(r.t), format_real(r.x), format_real(r.bound)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `level,max_delta,bound,satisfied` rows.
pub fn write_convergence_rows<W: Write>(out: W, reports: &[ConvergenceReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "max_delta", "bound", "satisfied"])?;
    for r in reports {
        w.write_record([
            r.level.to_string(),
            format_real(r.max_delta),
            format_real(r.bound),
            r.bound_satisfied.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
