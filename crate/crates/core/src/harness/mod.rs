//! Scenario files, seeded generation, parallel suite execution and reports.

mod generate;
mod report;
mod scenario;

use std::panic::{self, AssertUnwindSafe};

use serde::{Deserialize, Serialize};

pub use generate::{generate_scenarios, Profile};
pub use report::{emit_report, read_ndjson, Format};
pub use scenario::{load_scenario, parse_scenario, validate, Prepared, PsiSpec, Scenario};

use crate::error::{Error, Result};
use crate::funcdsl::ParamFunction;
use crate::identity;
use crate::inequality::{self as ineq, InequalityReport, TheoremId};
use crate::kernel::{KernelParams, WeightPair};

/// Relative agreement required between a classical bound and the general
/// form it is a special case of.
pub const REDUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Inequality(InequalityReport),
    Identity {
        t: f64,
        lhs: f64,
        rhs_kernel_part: f64,
        rhs_sigma_part: f64,
        residual: f64,
        tolerance: f64,
        pass: bool,
    },
    Error {
        kind: String,
        message: String,
        /// A corollary precondition that the scenario does not meet, as
        /// opposed to a computation failure.
        hypothesis_gap: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub scenario_id: String,
    /// A theorem id, or `identity` for residual sweeps.
    pub check: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl SuiteRecord {
    fn error(scenario_id: &str, check: &str, e: &Error) -> Self {
        SuiteRecord {
            scenario_id: scenario_id.to_string(),
            check: check.to_string(),
            outcome: Outcome::Error {
                kind: e.kind().to_string(),
                message: e.to_string(),
                hypothesis_gap: e.is_hypothesis_gap(),
            },
        }
    }

    pub fn passed(&self) -> Option<bool> {
        match &self.outcome {
            Outcome::Inequality(r) => Some(r.pass),
            Outcome::Identity { pass, .. } => Some(*pass),
            Outcome::Error { .. } => None,
        }
    }

    pub fn margin(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Inequality(r) => Some(r.margin),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub worst_margin: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub records: Vec<SuiteRecord>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn from_records(records: Vec<SuiteRecord>, seed: Option<u64>) -> Self {
        let mut summary = Summary { seed, ..Summary::default() };
        for r in &records {
            match r.passed() {
                Some(true) => summary.passed += 1,
                Some(false) => summary.failed += 1,
                None => summary.errored += 1,
            }
            if let Some(m) = r.margin() {
                summary.worst_margin = Some(summary.worst_margin.map_or(m, |w: f64| w.min(m)));
            }
        }
        SuiteReport { records, summary }
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteRecord> {
        self.records.iter().filter(|r| r.passed() == Some(false))
    }
}

/// Evaluates one check against a prepared scenario.
pub fn run_check(p: &Prepared, id: TheoremId) -> Result<InequalityReport> {
    let (ts, kp, cfg) = (&p.ts, &p.kernel, p.cfg());
    let lambda = p.scenario.lambda;
    match id {
        TheoremId::Trapezoid => ineq::trapezoid_verify(p.need("f")?, kp, ts, cfg),
        TheoremId::TrapezoidReal => ineq::trapezoid_corollary_real(p.need("f")?, kp, ts, cfg),
        TheoremId::TrapezoidH2 => ineq::trapezoid_corollary_wt(p.need("f")?, kp, ts, cfg),
        TheoremId::TrapezoidLinear => ineq::trapezoid_corollary_linear(p.need("f")?, lambda, ts, p.a, p.b, cfg),
        TheoremId::TrapezoidInteger => ineq::trapezoid_corollary_integer(p.need("f")?, kp, ts, cfg),
        TheoremId::Gruss => ineq::gruss_verify(p.need("p")?, p.need("q")?, kp, ts, cfg),
        TheoremId::GrussReal => ineq::gruss_corollary_real(p.need("p")?, p.need("q")?, kp, ts, cfg),
        TheoremId::GrussInteger => ineq::gruss_corollary_integer(p.need("p")?, p.need("q")?, kp, ts, cfg),
        TheoremId::GrussClassicWeight => {
            ineq::gruss_corollary_classic(p.need("p")?, p.need("q")?, lambda, ts, p.a, p.b, cfg)
        }
        TheoremId::ClassicTrapezoid => ineq::pachpatte_trapezoid(p.need("f")?, ts, p.a, p.b, cfg),
        TheoremId::ClassicGruss => ineq::pachpatte_gruss(p.need("p")?, p.need("q")?, ts, p.a, p.b, cfg),
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn guarded<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    panic::catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|payload| Err(Error::Domain(format!("check panicked: {}", panic_message(payload)))))
}

/// Records for every requested check of one scenario. Never fails: errors
/// and panics become error records.
pub fn scenario_records(s: &Scenario) -> Vec<SuiteRecord> {
    let prepared = match guarded(|| validate(s)) {
        Ok(p) => p,
        Err(e) => return s.checks.iter().map(|id| SuiteRecord::error(&s.id, id.as_str(), &e)).collect(),
    };
    s.checks
        .iter()
        .map(|&id| match guarded(|| run_check(&prepared, id)) {
            Ok(r) => SuiteRecord { scenario_id: s.id.clone(), check: id.to_string(), outcome: Outcome::Inequality(r) },
            Err(e) => SuiteRecord::error(&s.id, id.as_str(), &e),
        })
        .collect()
}

/// Runs every `(scenario, check)` pair on a pool of `parallelism` workers;
/// records keep input order.
pub fn run_suite(scenarios: &[Scenario], parallelism: usize) -> Result<SuiteReport> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let nested: Vec<Vec<SuiteRecord>> = pool.install(|| scenarios.par_iter().map(scenario_records).collect());
    Ok(SuiteReport::from_records(nested.into_iter().flatten().collect(), None))
}

/// Identity residual records at every probe point of the scenario window.
pub fn identity_records(s: &Scenario) -> Vec<SuiteRecord> {
    let run = || -> Result<Vec<SuiteRecord>> {
        let p = validate(s)?;
        let f = p.need("f")?;
        let discrete = p.ts.restrict(p.a, p.b)?.is_discrete();
        let sweep = identity::montgomery_sweep(f, &p.kernel, &p.ts, p.cfg())?;
        Ok(sweep
            .into_iter()
            .map(|r| {
                let tolerance = identity::residual_tolerance(discrete, r.lhs, p.cfg());
                SuiteRecord {
                    scenario_id: s.id.clone(),
                    check: "identity".into(),
                    outcome: Outcome::Identity {
                        t: r.t,
                        lhs: r.lhs,
                        rhs_kernel_part: r.rhs_kernel_part,
                        rhs_sigma_part: r.rhs_sigma_part,
                        residual: r.residual,
                        tolerance,
                        pass: r.residual.abs() <= tolerance,
                    },
                }
            })
            .collect())
    };
    guarded(run).unwrap_or_else(|e| vec![SuiteRecord::error(&s.id, "identity", &e)])
}

/// A classical bound next to the general form evaluated at `λ = 0`,
/// `ψ = id`, `w = t` on the same window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub classical: InequalityReport,
    pub general: Vec<InequalityReport>,
    /// `general = factor · classical` on both sides.
    pub factor: f64,
    pub worst_gap: f64,
    pub coherent: bool,
}

/// Compares `pach1.1` with `thm3.2` (factor 2), or `pach1.2` with `thm3.7`
/// and `cor3.10` (factor `2(b-a)²`).
pub fn reduce(s: &Scenario, check: TheoremId) -> Result<Reduction> {
    let p = validate(s)?;
    let (ts, a, b, cfg) = (&p.ts, p.a, p.b, p.cfg());
    ineq::require_continuous(ts, a, b)?;
    let kp = KernelParams::new(ts, a, b, 0.0, ParamFunction::Identity, WeightPair::identity())?;
    let (classical, general, factor) = match check {
        TheoremId::ClassicTrapezoid => {
            let f = p.need("f")?;
            (ineq::pachpatte_trapezoid(f, ts, a, b, cfg)?, vec![ineq::trapezoid_verify(f, &kp, ts, cfg)?], 2.0)
        }
        TheoremId::ClassicGruss => {
            let (f, g) = (p.need("p")?, p.need("q")?);
            let general = vec![
                ineq::gruss_verify(f, g, &kp, ts, cfg)?,
                ineq::gruss_corollary_classic(f, g, 0.0, ts, a, b, cfg)?,
            ];
            (ineq::pachpatte_gruss(f, g, ts, a, b, cfg)?, general, 2.0 * (b - a) * (b - a))
        }
        other => return Err(Error::InvalidConfig(format!("{other} is not a classical check"))),
    };
    let gap = |x: f64, y: f64| (x - factor * y).abs() / (1.0 + x.abs());
    let worst_gap = general
        .iter()
        .flat_map(|g| [gap(g.lhs, classical.lhs), gap(g.rhs, classical.rhs)])
        .fold(0.0, f64::max);
    Ok(Reduction { classical, general, factor, worst_gap, coherent: worst_gap <= REDUCTION_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScale;
    use std::collections::BTreeMap;

    fn pach(f: &str) -> Scenario {
        Scenario {
            id: "pach".into(),
            timescale: vec![[0.0, 1.0]],
            window: [0.0, 1.0],
            functions: BTreeMap::from([("f".into(), f.into()), ("p".into(), "t".into()), ("q".into(), "t".into())]),
            lambda: 0.0,
            psi: PsiSpec::Identity,
            quadrature: Default::default(),
            checks: vec![TheoremId::ClassicTrapezoid],
        }
    }

    #[test]
    fn empty_suite() {
        let r = run_suite(&[], 2).unwrap();
        assert!(r.records.is_empty());
        assert_eq!(r.summary, Summary::default());
    }

    #[test]
    fn single_classical_record() {
        let r = run_suite(&[pach("t^2")], 1).unwrap();
        assert_eq!(r.records.len(), 1);
        let Outcome::Inequality(rep) = &r.records[0].outcome else { panic!() };
        assert!((rep.lhs - 1.0 / 6.0).abs() < 1e-12 && (rep.rhs - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!((r.summary.passed, r.summary.failed, r.summary.errored), (1, 0, 0));
    }

    #[test]
    fn shift_gap_is_an_error_record_not_a_failure() {
        // ψ(λ) = 1/3 on {0, 1, 2}: shift a + (b-a)/3 is not an integer
        let mut s = pach("t^2");
        s.timescale = vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]];
        s.window = [0.0, 2.0];
        s.psi = PsiSpec::Constant { value: 1.0 / 3.0 };
        s.checks = vec![TheoremId::TrapezoidH2, TheoremId::Trapezoid];
        let r = run_suite(&[s], 1).unwrap();
        let Outcome::Error { kind, hypothesis_gap, .. } = &r.records[0].outcome else { panic!("{:?}", r.records[0]) };
        assert_eq!(kind, "ShiftNotInScale");
        assert!(hypothesis_gap);
        assert_eq!((r.summary.passed, r.summary.failed, r.summary.errored), (1, 0, 1));
    }

    #[test]
    fn invalid_scenario_does_not_hide_others() {
        let mut bad = pach("t^2");
        bad.id = "bad".into();
        bad.lambda = 2.0;
        let r = run_suite(&[bad, pach("t^3")], 4).unwrap();
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.records[0].scenario_id, "bad");
        assert_eq!(r.records[1].passed(), Some(true));
    }

    #[test]
    fn summary_matches_tallies() {
        let scen = generate_scenarios(3, 20, Profile::Mixed);
        let r = run_suite(&scen, 3).unwrap();
        let s = &r.summary;
        assert_eq!(s.passed + s.failed + s.errored, r.records.len());
        let ids: Vec<_> = r.records.iter().map(|r| r.scenario_id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted, "input order is preserved");
    }

    #[test]
    fn reductions_are_coherent() {
        let red = reduce(&pach("t^2"), TheoremId::ClassicTrapezoid).unwrap();
        assert!(red.coherent, "{red:?}");
        assert_eq!(red.factor, 2.0);
        let red = reduce(&pach("t"), TheoremId::ClassicGruss).unwrap();
        assert!(red.coherent, "{red:?}");
        assert!((red.classical.lhs - 1.0 / 12.0).abs() < 1e-12);
        assert!(matches!(reduce(&pach("t"), TheoremId::Gruss), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn identity_sweep_records() {
        let mut s = pach("sin(t)");
        s.lambda = 0.4;
        let recs = identity_records(&s);
        assert_eq!(recs.len(), identity::probe_points(&TimeScale::interval(0.0, 1.0).unwrap(), 0.0, 1.0).len());
        assert!(recs.iter().all(|r| r.passed() == Some(true)));
    }
}
