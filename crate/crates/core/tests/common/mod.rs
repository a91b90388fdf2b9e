#![allow(dead_code)]

use dyadic_ivp::expr::{BinOp, Expr, Func, Var};
use dyadic_ivp::{parse, Problem};
use rand::Rng;

pub struct CatalogEntry {
    pub name: &'static str,
    pub problem: Problem,
    /// Exact solution, where one is known in closed form.
    pub exact: fn(f64) -> f64,
}

pub fn constant() -> CatalogEntry {
    CatalogEntry {
        name: "constant f = 2",
        problem: Problem::new(parse("2").unwrap(), 0.0, 0.0, 1.0, 2.0, 1.0).unwrap(),
        exact: |t| 2.0 * t,
    }
}

pub fn linear() -> CatalogEntry {
    CatalogEntry {
        name: "linear f = t",
        problem: Problem::new(parse("t").unwrap(), 0.0, 0.0, 1.0, 1.0, 1.0).unwrap(),
        exact: |t| t * t / 2.0,
    }
}

pub fn exponential() -> CatalogEntry {
    CatalogEntry {
        name: "exponential f = x",
        problem: Problem::new(parse("x").unwrap(), 0.0, 1.0, 0.5, 2.0, 1.0).unwrap(),
        exact: f64::exp,
    }
}

/// x' = sin(x), x(0) = 1: tan(x/2) = tan(1/2) e^t.
pub fn sine() -> CatalogEntry {
    CatalogEntry {
        name: "sine f = sin(x)",
        problem: Problem::new(parse("sin(x)").unwrap(), 0.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
        exact: |t| 2.0 * ((0.5f64).tan() * t.exp()).atan(),
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![constant(), linear(), exponential(), sine()]
}

/// Random expression tree over t, x, small literals and the supported
/// functions, chosen so evaluation stays finite on moderate inputs most of
/// the time.
pub fn random_expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Expr::var(Var::T),
            1 => Expr::var(Var::X),
            _ => Expr::num((rng.gen_range(0.0..10.0f64) * 1000.0).round() / 1000.0),
        };
    }
    match rng.gen_range(0..7) {
        0 => Expr::negate(random_expr(rng, depth - 1)),
        1 => {
            let f = Func::ALL[rng.gen_range(0..Func::ALL.len())];
            Expr::call(f, random_expr(rng, depth - 1))
        }
        2 => Expr::binary(
            BinOp::Pow,
            random_expr(rng, depth - 1),
            Expr::num(rng.gen_range(0..4) as f64),
        ),
        k => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k - 3];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
    }
}

/// Both finite and bit-identical, or both failing.
pub fn same_eval(a: &Expr, b: &Expr, t: f64, x: f64) -> bool {
    match (a.eval(t, x), b.eval(t, x)) {
        (Ok(u), Ok(v)) => u.to_bits() == v.to_bits(),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}
