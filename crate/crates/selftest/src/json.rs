//! JSON encodings.
//!
//! Bell expressions come in two shapes:
//!
//! ```json
//! {"parties": 3, "terms": [{"settings": [1, 1, 1], "coeff": 1}, ...]}
//! {"parties": 3, "pi_coeffs": [0, 0, -1, ...]}
//! ```
//!
//! `settings` lists one entry per party: 0 when the party is absent, else 1
//! or 2. A coefficient is either a JSON number or an exact element of
//! ℚ(√2) written `{"rat": [p, q], "rad2": [r, s]}` for `p/q + (r/s)√2`.
//! Integers that do not fit in 64 bits are written as decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use selftest_core::bell::{builtin, Coeff, GeneralBellExpression, PIBellExpression};
use selftest_core::linalg::CMatrix;
use selftest_core::moment::NpaBound;
use selftest_core::seesaw::SeesawRun;
use selftest_core::synth::{ExactSynthesis, SynthesisFlag, SynthesisResult, SynthesisStatus};
use selftest_core::{Rad2, StateVector};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] selftest_core::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn from_str_part(s: &str) -> Self {
        s.parse::<i64>().map_or_else(|_| Int::Big(s.to_string()), Int::Small)
    }

    fn to_big(&self) -> Result<BigInt, JsonError> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => BigInt::from_str(s).map_err(|_| JsonError::Invalid(format!("`{s}` is not an integer"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ExactJson {
    rat: [Int; 2],
    rad2: [Int; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Number(f64),
    Exact(ExactJson),
}

fn rad2_json(r: &Rad2) -> ExactJson {
    let [p, q, a, b] = r.to_string_parts().map(|s| Int::from_str_part(&s));
    ExactJson { rat: [p, q], rad2: [a, b] }
}

fn rad2_from_json(e: &ExactJson) -> Result<Rad2, JsonError> {
    let ratio = |n: &Int, d: &Int| -> Result<BigRational, JsonError> {
        let d = d.to_big()?;
        if d == BigInt::from(0) {
            return Err(JsonError::Invalid("zero denominator in exact coefficient".into()));
        }
        Ok(BigRational::new(n.to_big()?, d))
    };
    Ok(Rad2::new(ratio(&e.rat[0], &e.rat[1])?, ratio(&e.rad2[0], &e.rad2[1])?))
}

fn coeff_json(c: &Coeff) -> CoeffJson {
    match c {
        Coeff::Exact(r) => CoeffJson::Exact(rad2_json(r)),
        Coeff::Float(x) => CoeffJson::Number(*x),
    }
}

fn coeff_from_json(c: &CoeffJson) -> Result<Coeff, JsonError> {
    match c {
        // Integral numbers stay exact so local bounds are computed exactly.
        CoeffJson::Number(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Ok(Coeff::int(*x as i64)),
        CoeffJson::Number(x) if x.is_finite() => Ok(Coeff::Float(*x)),
        CoeffJson::Number(_) => Err(JsonError::Invalid("coefficient is not finite".into())),
        CoeffJson::Exact(e) => Ok(Coeff::Exact(rad2_from_json(e)?)),
    }
}

pub fn rad2_to_value(r: &Rad2) -> Value {
    serde_json::to_value(rad2_json(r)).expect("plain data")
}

pub fn rad2_from_value(v: &Value) -> Result<Rad2, JsonError> {
    rad2_from_json(&serde_json::from_value(v.clone())?)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    settings: Vec<u8>,
    coeff: CoeffJson,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralJson {
    parties: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PiJson {
    parties: usize,
    pi_coeffs: Vec<CoeffJson>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BellJson {
    Pi(PiJson),
    General(GeneralJson),
}

pub fn general_to_value(g: &GeneralBellExpression) -> Value {
    let terms = g
        .terms()
        .map(|(s, c)| TermJson { settings: s.to_vec(), coeff: coeff_json(c) })
        .collect();
    serde_json::to_value(GeneralJson { parties: g.parties(), terms }).expect("plain data")
}

pub fn pi_to_value(b: &PIBellExpression) -> Value {
    let pi_coeffs = b.coeffs().iter().map(coeff_json).collect();
    serde_json::to_value(PiJson { parties: b.parties(), pi_coeffs }).expect("plain data")
}

/// Reads either shape; permutationally invariant input is expanded.
pub fn bell_from_str(text: &str) -> Result<GeneralBellExpression, JsonError> {
    match serde_json::from_str::<BellJson>(text)? {
        BellJson::Pi(p) => {
            let coeffs = p.pi_coeffs.iter().map(coeff_from_json).collect::<Result<Vec<_>, _>>()?;
            Ok(PIBellExpression::new(p.parties, coeffs)?.expand())
        }
        BellJson::General(g) => {
            let mut out = GeneralBellExpression::new(g.parties);
            for t in &g.terms {
                if t.settings.len() != g.parties {
                    return Err(JsonError::Invalid(format!(
                        "term {:?} has {} settings for {} parties",
                        t.settings,
                        t.settings.len(),
                        g.parties
                    )));
                }
                out.add_term(&t.settings, coeff_from_json(&t.coeff)?)?;
            }
            Ok(out)
        }
    }
}

/// A built-in name (case-insensitive) or a path to a JSON file.
pub fn load_inequality(name_or_path: &str) -> Result<GeneralBellExpression, JsonError> {
    if let Some(g) = builtin::by_name(name_or_path) {
        return Ok(g);
    }
    let path = std::path::Path::new(name_or_path);
    if !path.exists() {
        return Err(JsonError::Invalid(format!(
            "unknown inequality `{name_or_path}`; built-ins are {} (or give a JSON file)",
            builtin::NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| JsonError::Invalid(format!("{}: {e}", path.display())))?;
    bell_from_str(&text)
}

fn status_str(s: SynthesisStatus) -> &'static str {
    match s {
        SynthesisStatus::Feasible => "feasible",
        SynthesisStatus::Infeasible => "infeasible",
    }
}

pub fn flag_str(f: SynthesisFlag) -> &'static str {
    match f {
        SynthesisFlag::NoViolation => "no_violation",
        SynthesisFlag::EigenstateNotMaximal => "eigenstate_not_maximal",
    }
}

fn exact_value(e: &ExactSynthesis) -> Value {
    json!({
        "q_over_l": rad2_to_value(&e.q),
        "b": e.b.iter().map(rad2_to_value).collect::<Vec<_>>(),
        "eta": e.eta.iter().map(rad2_to_value).collect::<Vec<_>>(),
        "dual_objective": rad2_to_value(&e.dual_objective),
    })
}

pub fn synthesis_to_value(r: &SynthesisResult) -> Value {
    json!({
        "phi": r.phi,
        "phi_over_pi": r.phi / std::f64::consts::PI,
        "options": {
            "no_marginals": r.options.no_marginals,
            "setting_symmetric": r.options.setting_symmetric,
            "stationarity": format!("{:?}", r.options.stationarity).to_lowercase(),
        },
        "status": status_str(r.status),
        "q": r.q,
        "local_bound": r.local_bound,
        "q_over_l": r.q_over_l(),
        "top_eigenvalue": r.top_eigenvalue,
        "inequality": pi_to_value(&r.b),
        "eta": r.eta,
        "flags": r.flags.iter().map(|f| flag_str(*f)).collect::<Vec<_>>(),
        "primal_residual": r.primal_residual,
        "duality_gap": r.duality_gap,
        "exact": r.exact.as_ref().map(exact_value),
    })
}

fn complex_pair(z: &num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn matrix_value(m: &CMatrix) -> Value {
    json!([
        [complex_pair(&m[(0, 0)]), complex_pair(&m[(0, 1)])],
        [complex_pair(&m[(1, 0)]), complex_pair(&m[(1, 1)])],
    ])
}

fn state_value(s: &StateVector) -> Value {
    json!(s.amplitudes().iter().map(complex_pair).collect::<Vec<_>>())
}

/// Observables are written as X–Z plane angles (`cos θ Z + sin θ X`) when
/// every one of them is planar, and as 2×2 complex matrices (`[re, im]`
/// pairs) otherwise. The state is a list of `[re, im]` amplitudes.
pub fn seesaw_to_value(r: &SeesawRun, rng_seed: u64, seeds: usize) -> Value {
    let observables = match r.planar_angles(1e-9) {
        Some(angles) => json!({ "kind": "angles", "values": angles.iter().map(|(a, b)| [a, b]).collect::<Vec<_>>() }),
        None => json!({
            "kind": "matrices",
            "values": r.observables.iter().map(|[a, b]| [matrix_value(a), matrix_value(b)]).collect::<Vec<_>>(),
        }),
    };
    json!({
        "value": r.value,
        "rng": rng_seed,
        "seeds": seeds,
        "best_seed": r.seed_index,
        "iterations": r.iterations,
        "observables": observables,
        "state": state_value(&r.state),
    })
}

pub fn npa_to_value(b: &NpaBound) -> Value {
    json!({
        "upper_bound": b.value,
        "primal": b.primal,
        "certified": b.certified,
        "status": b.solution.status.as_str(),
        "iterations": b.solution.iterations,
        "primal_residual": b.solution.primal_residual,
    })
}
