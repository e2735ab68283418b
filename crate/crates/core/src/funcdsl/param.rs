use crate::error::{Error, Result};

/// A map of `[0, 1]` into `[0, 1]` that parameterizes the kernel family.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamFunction {
    Identity,
    Constant(f64),
    /// `λ ↦ λ^p`, `p >= 0` (with `0^0 = 1`).
    Power(f64),
    /// Piecewise-linear interpolation through `(λ, ψ)` knots spanning `[0, 1]`.
    Table(Vec<(f64, f64)>),
}

const TABLE_SAMPLES: usize = 10_000;

impl ParamFunction {
    pub fn constant(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidParamFunction(format!("constant {c} outside [0, 1]")));
        }
        Ok(ParamFunction::Constant(c))
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidParamFunction(format!("power exponent {p} must be >= 0")));
        }
        Ok(ParamFunction::Power(p))
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParamFunction(m));
        if knots.len() < 2 {
            return bad("table needs at least two knots".into());
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return bad("table knots must start at λ = 0 and end at λ = 1".into());
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return bad("table λ values must be strictly increasing".into());
        }
        if let Some(k) = knots.iter().find(|k| !(0.0..=1.0).contains(&k.1)) {
            return bad(format!("table value {} outside [0, 1]", k.1));
        }
        for i in 0..=TABLE_SAMPLES {
            let v = interpolate(&knots, i as f64 / TABLE_SAMPLES as f64);
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("table value {v} outside [0, 1]"));
            }
        }
        Ok(ParamFunction::Table(knots))
    }

    /// `ψ(λ)`; errors when `λ ∉ [0, 1]`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange(lambda));
        }
        Ok(self.value(lambda))
    }

    fn value(&self, lambda: f64) -> f64 {
        match self {
            ParamFunction::Identity => lambda,
            ParamFunction::Constant(c) => *c,
            ParamFunction::Power(p) => lambda.powf(*p),
            // knots are validated, the clamp only absorbs rounding
            ParamFunction::Table(knots) => interpolate(knots, lambda).clamp(0.0, 1.0),
        }
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= x).clamp(1, knots.len() - 1);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
