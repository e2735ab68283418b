//! Dense univariate polynomials (ascending coefficients) and real root
//! isolation, used for exact sup-norms of polynomial derivatives.

use super::Expr;

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    if c.is_empty() {
        c.push(0.0);
    }
    c
}

fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    let n = a.len().max(b.len());
    let c = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + sign * b.get(i).copied().unwrap_or(0.0))
        .collect();
    trim(c)
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trim(c)
}

/// Coefficients of `e` if it is a polynomial in `t`; `None` otherwise.
pub fn from_expr(e: &Expr) -> Option<Vec<f64>> {
    Some(match e {
        Expr::Var => vec![0.0, 1.0],
        Expr::Const(c) => vec![*c],
        Expr::Neg(x) => from_expr(x)?.into_iter().map(|c| -c).collect(),
        Expr::Add(a, b) => add(&from_expr(a)?, &from_expr(b)?, 1.0),
        Expr::Sub(a, b) => add(&from_expr(a)?, &from_expr(b)?, -1.0),
        Expr::Mul(a, b) => mul(&from_expr(a)?, &from_expr(b)?),
        Expr::Div(a, b) => {
            let den = from_expr(b)?;
            if den.len() != 1 || den[0] == 0.0 {
                return None;
            }
            from_expr(a)?.into_iter().map(|c| c / den[0]).collect()
        }
        Expr::Pow(x, n) => {
            let base = from_expr(x)?;
            let mut acc = vec![1.0];
            for _ in 0..*n {
                acc = mul(&acc, &base);
            }
            acc
        }
        Expr::Call(..) => return None,
    })
}

pub fn degree(c: &[f64]) -> usize {
    trim(c.to_vec()).len() - 1
}

pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    trim(c.iter().enumerate().skip(1).map(|(i, k)| i as f64 * k).collect())
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots of `c` in the open interval `(lo, hi)`, ascending. Roots are
/// isolated between consecutive critical points and refined by bisection.
pub fn real_roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(c.to_vec());
    if c.len() <= 1 || !(lo < hi) {
        return Vec::new();
    }
    let mut cuts = vec![lo];
    cuts.extend(real_roots_in(&derivative(&c), lo, hi));
    cuts.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (f0, f1) = (eval(&c, x0), eval(&c, x1));
        let r = if f0 == 0.0 {
            Some(x0)
        } else if f0 * f1 < 0.0 {
            Some(bisect(&c, x0, x1))
        } else {
            None
        };
        if let Some(r) = r {
            if r > lo && r < hi && roots.last().map_or(true, |&p| r > p) {
                roots.push(r);
            }
        }
    }
    roots
}

/// `max |c(x)|` over the closed interval `[lo, hi]`.
pub fn sup_abs_on(c: &[f64], lo: f64, hi: f64) -> f64 {
    let mut best = eval(c, lo).abs().max(eval(c, hi).abs());
    for r in real_roots_in(&derivative(c), lo, hi) {
        best = best.max(eval(c, r).abs());
    }
    best
}
