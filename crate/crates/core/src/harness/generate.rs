//! Seeded random scenarios.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scenario::{PsiSpec, Scenario};
use crate::calculus::QuadratureConfig;
use crate::error::Error;
use crate::inequality::TheoremId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Discrete,
    Continuous,
    Mixed,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Discrete => "discrete",
            Profile::Continuous => "continuous",
            Profile::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "discrete" => Ok(Profile::Discrete),
            "continuous" => Ok(Profile::Continuous),
            "mixed" => Ok(Profile::Mixed),
            _ => Err(Error::InvalidConfig(format!("unknown profile `{s}`"))),
        }
    }
}

/// Uniform draw rounded to two decimals, so generated files stay readable.
fn dec2(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let k = rng.gen_range((lo * 100.0).round() as i64..=(hi * 100.0).round() as i64);
    k as f64 / 100.0
}

fn nonzero_dec2(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = dec2(rng, lo, hi);
        if v != 0.0 {
            return v;
        }
    }
}

fn polynomial(rng: &mut ChaCha8Rng) -> String {
    let degree = rng.gen_range(1..=4);
    let mut out = String::new();
    for k in 0..=degree {
        let c = if k == degree { nonzero_dec2(rng, -2.0, 2.0) } else { dec2(rng, -2.0, 2.0) };
        if c == 0.0 {
            continue;
        }
        let mono = match k {
            0 => format!("{}", c.abs()),
            1 => format!("{}*t", c.abs()),
            _ => format!("{}*t^{k}", c.abs()),
        };
        if out.is_empty() {
            out = if c < 0.0 { format!("-{mono}") } else { mono };
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
            out.push_str(&mono);
        }
    }
    out
}

fn catalog_function(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 | 1 => polynomial(rng),
        2 => format!("sin({}*t)", nonzero_dec2(rng, -1.0, 1.0)),
        _ => format!("exp({}*t)", nonzero_dec2(rng, -1.0, 1.0)),
    }
}

fn weight(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..3) {
        0 => "t".into(),
        1 => format!("{}*(t + t^3/10)", dec2(rng, 0.5, 2.0)),
        _ => "exp(t/4)".into(),
    }
}

fn psi(rng: &mut ChaCha8Rng) -> PsiSpec {
    match rng.gen_range(0..4) {
        0 => PsiSpec::Identity,
        1 => PsiSpec::Constant { value: dec2(rng, 0.0, 1.0) },
        2 => PsiSpec::Power { exponent: dec2(rng, 0.5, 3.0) },
        _ => {
            let mid = dec2(rng, 0.1, 0.9);
            PsiSpec::Table {
                points: vec![[0.0, dec2(rng, 0.0, 1.0)], [mid, dec2(rng, 0.0, 1.0)], [1.0, dec2(rng, 0.0, 1.0)]],
            }
        }
    }
}

/// `(pairs, a, b)` for each profile.
fn scale(rng: &mut ChaCha8Rng, profile: Profile) -> (Vec<[f64; 2]>, f64, f64) {
    match profile {
        Profile::Discrete => {
            let start = rng.gen_range(-2..=2) as f64;
            let n = rng.gen_range(3..=12) as f64;
            let b = start + n - 1.0;
            // two extension points past b keep σ(b) and σ²(b - 1) genuine
            let pairs = (0..(n as usize + 2)).map(|k| [start + k as f64; 2]).collect();
            (pairs, start, b)
        }
        Profile::Continuous => {
            let lo = dec2(rng, -2.0, 2.0);
            let hi = lo + dec2(rng, 0.5, 4.0);
            (vec![[lo, hi]], lo, hi)
        }
        Profile::Mixed => {
            let segments = rng.gen_range(1..=3);
            let mut points = rng.gen_range(0..=4);
            if segments == 1 && points == 0 {
                points = 1;
            }
            let mut kinds = vec![true; segments - 1];
            kinds.extend(std::iter::repeat(false).take(points));
            kinds.shuffle(rng);
            let lo = dec2(rng, -2.0, 1.0);
            let mut x = lo + dec2(rng, 0.3, 2.0);
            let mut pairs = vec![[lo, x]];
            for is_segment in kinds {
                let start = x + dec2(rng, 0.2, 1.5);
                x = if is_segment { start + dec2(rng, 0.3, 2.0) } else { start };
                pairs.push([start, x]);
            }
            let b = pairs.last().unwrap()[0];
            let ext = x + dec2(rng, 0.2, 1.5);
            pairs.push([ext, ext]);
            (pairs, lo, b)
        }
    }
}

fn checks(profile: Profile, w_is_t: bool) -> Vec<TheoremId> {
    use TheoremId::*;
    let mut out = vec![Trapezoid, Gruss];
    match profile {
        Profile::Continuous => out.extend([TrapezoidReal, TrapezoidLinear, GrussReal, GrussClassicWeight]),
        Profile::Discrete => out.extend([TrapezoidLinear, TrapezoidInteger, GrussInteger]),
        Profile::Mixed => {}
    }
    if w_is_t {
        out.push(TrapezoidH2);
    }
    out
}

/// `count` scenarios drawn from one ChaCha8 stream seeded with `seed`.
pub fn generate_scenarios(seed: u64, count: usize, profile: Profile) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (timescale, a, b) = scale(&mut rng, profile);
            let w = weight(&mut rng);
            let mut functions = BTreeMap::new();
            functions.insert("f".to_string(), catalog_function(&mut rng));
            functions.insert("p".to_string(), catalog_function(&mut rng));
            functions.insert("q".to_string(), catalog_function(&mut rng));
            let w_is_t = w == "t";
            functions.insert("w".to_string(), w);
            Scenario {
                id: format!("{profile}-{seed}-{i:04}"),
                timescale,
                window: [a, b],
                functions,
                lambda: (rng.gen_range(0..=1000) as f64) / 1000.0,
                psi: psi(&mut rng),
                quadrature: QuadratureConfig::default(),
                checks: checks(profile, w_is_t),
            }
        })
        .collect()
}
