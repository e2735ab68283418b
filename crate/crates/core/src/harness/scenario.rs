use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calculus::QuadratureConfig;
use crate::error::{Error, Result};
use crate::funcdsl::{DifferentiableFn, ParamFunction};
use crate::inequality::TheoremId;
use crate::kernel::{KernelParams, WeightPair};
use crate::timescale::TimeScale;

/// Parameter function as written in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PsiSpec {
    Identity,
    Constant { value: f64 },
    Power { exponent: f64 },
    Table { points: Vec<[f64; 2]> },
}

impl PsiSpec {
    pub fn build(&self) -> Result<ParamFunction> {
        match self {
            PsiSpec::Identity => Ok(ParamFunction::Identity),
            PsiSpec::Constant { value } => ParamFunction::constant(*value),
            PsiSpec::Power { exponent } => ParamFunction::power(*exponent),
            PsiSpec::Table { points } => ParamFunction::table(points.iter().map(|p| (p[0], p[1])).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub timescale: Vec<[f64; 2]>,
    pub window: [f64; 2],
    /// Expressions keyed by role: `f`, `p`, `q` and `w` (defaults to `t`).
    pub functions: BTreeMap<String, String>,
    pub lambda: f64,
    pub psi: PsiSpec,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub checks: Vec<TheoremId>,
}

/// A validated scenario with everything parsed and the kernel built.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub ts: TimeScale,
    pub a: f64,
    pub b: f64,
    pub f: Option<DifferentiableFn>,
    pub p: Option<DifferentiableFn>,
    pub q: Option<DifferentiableFn>,
    pub kernel: KernelParams,
}

fn invalid(field: &str, message: impl ToString) -> Error {
    Error::Validation { field: field.to_string(), message: message.to_string() }
}

impl Prepared {
    pub fn cfg(&self) -> &QuadratureConfig {
        &self.scenario.quadrature
    }

    pub fn need(&self, role: &str) -> Result<&DifferentiableFn> {
        let slot = match role {
            "f" => &self.f,
            "p" => &self.p,
            _ => &self.q,
        };
        slot.as_ref().ok_or_else(|| invalid("functions", format!("`{role}` is missing")))
    }
}

/// Checks every scenario invariant and builds the numeric objects.
pub fn validate(s: &Scenario) -> Result<Prepared> {
    let ts = TimeScale::from_pairs(&s.timescale).map_err(|e| invalid("timescale", e))?;
    if !(0.0..=1.0).contains(&s.lambda) {
        return Err(invalid("lambda", format!("{} is outside [0, 1]", s.lambda)));
    }
    let [a, b] = s.window;
    let a = ts.snap(a).map_err(|e| invalid("window", e))?;
    let b = ts.snap(b).map_err(|e| invalid("window", e))?;
    if !(a < b) {
        return Err(invalid("window", format!("needs a < b, got [{a}, {b}]")));
    }
    s.quadrature.validate().map_err(|e| invalid("quadrature", e))?;
    let psi = s.psi.build().map_err(|e| invalid("psi", e))?;

    let mut parsed = BTreeMap::new();
    for (role, text) in &s.functions {
        if !matches!(role.as_str(), "f" | "p" | "q" | "w") {
            return Err(invalid("functions", format!("unknown role `{role}`")));
        }
        let g = DifferentiableFn::parse(text).map_err(|e| invalid(&format!("functions.{role}"), e))?;
        parsed.insert(role.clone(), g);
    }
    for id in &s.checks {
        let roles: &[&str] = if id.is_trapezoid() { &["f"] } else { &["p", "q"] };
        for r in roles {
            if !parsed.contains_key(*r) {
                return Err(invalid("functions", format!("`{r}` is required by {id}")));
            }
        }
    }
    let w = parsed.remove("w").unwrap_or_else(DifferentiableFn::identity);
    let kernel = KernelParams::new(&ts, a, b, s.lambda, psi, WeightPair::new(w))
        .map_err(|e| invalid("functions.w", e))?;
    Ok(Prepared {
        scenario: s.clone(),
        ts,
        a,
        b,
        f: parsed.remove("f"),
        p: parsed.remove("p"),
        q: parsed.remove("q"),
        kernel,
    })
}

fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    format!("line {line}, column {col}")
}

/// Parses scenario text: JSON when `json` is set, TOML otherwise.
pub fn parse_scenario(text: &str, json: bool) -> Result<Scenario> {
    if json {
        serde_json::from_str(text).map_err(|e| Error::ScenarioParse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    } else {
        toml::from_str(text).map_err(|e| Error::ScenarioParse {
            location: e.span().map_or_else(|| "unknown".into(), |s| line_col(text, s.start)),
            message: e.message().to_string(),
        })
    }
}

/// Reads, parses and validates a scenario file (`.json` or TOML).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let s = parse_scenario(&text, json)?;
    validate(&s)?;
    Ok(s)
}
