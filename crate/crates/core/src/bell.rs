//! Two-setting, binary-outcome Bell expressions.
//!
//! A [`GeneralBellExpression`] maps setting tuples `(x₁, …, x_N)` with
//! `xᵢ ∈ {0, 1, 2}` to coefficients, where `0` stands for "party absent"
//! (the identity). A [`PIBellExpression`] is the permutationally invariant
//! special case, stored as one coefficient per (order, number of second
//! settings) pair:
//!
//! ```text
//! [α₁ α₂ ; α₁₁ α₁₂ α₂₂ ; α₁₁₁ α₁₁₂ α₁₂₂ α₂₂₂ ; …]
//! ```
//!
//! For three parties these are the nine coefficients `b₁ … b₉`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::exact::Rad2;

/// A Bell coefficient: exact in ℚ(√2) when the input allows, float otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(Rad2),
    Float(f64),
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Exact(Rad2::zero())
    }

    pub fn int(v: i64) -> Self {
        Coeff::Exact(Rad2::int(v))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => r.to_f64(),
            Coeff::Float(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Float(x) => *x == 0.0,
        }
    }

    pub fn as_exact(&self) -> Option<&Rad2> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Float(_) => None,
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(a) => Coeff::Exact(-a.clone()),
            Coeff::Float(x) => Coeff::Float(-x),
        }
    }

    /// Exact comparison when both sides are exact, float comparison otherwise.
    pub fn compare(&self, other: &Coeff) -> Ordering {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a.cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()).unwrap_or(Ordering::Equal),
        }
    }
}

impl From<f64> for Coeff {
    fn from(x: f64) -> Self {
        Coeff::Float(x)
    }
}

impl From<Rad2> for Coeff {
    fn from(r: Rad2) -> Self {
        Coeff::Exact(r)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) => write!(f, "{r}"),
            Coeff::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Correlator polynomial over setting tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralBellExpression {
    parties: usize,
    terms: BTreeMap<Vec<u8>, Coeff>,
}

impl GeneralBellExpression {
    pub fn new(parties: usize) -> Self {
        Self { parties, terms: BTreeMap::new() }
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Adds `coeff` to the term with the given settings. Zero sums are dropped.
    pub fn add_term(&mut self, settings: &[u8], coeff: Coeff) -> Result<()> {
        if settings.len() != self.parties {
            return Err(Error::WrongPartyCount { expected: self.parties, found: settings.len() });
        }
        if let Some(&bad) = settings.iter().find(|&&s| s > 2) {
            return Err(Error::InvalidSetting(bad));
        }
        let entry = self.terms.entry(settings.to_vec()).or_insert_with(Coeff::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(settings);
        }
        Ok(())
    }

    pub fn with_term(mut self, settings: &[u8], coeff: impl Into<Coeff>) -> Result<Self> {
        self.add_term(settings, coeff.into())?;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Coeff)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, settings: &[u8]) -> Coeff {
        self.terms.get(settings).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coeff::is_exact)
    }

    pub fn scaled(&self, factor: &Coeff) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), v.mul(factor)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { parties: self.parties, terms }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, v) in other.terms() {
            out.add_term(k, v.clone())?;
        }
        Ok(out)
    }

    /// Float coefficients, one per term in key order.
    pub fn float_terms(&self) -> Vec<(Vec<u8>, f64)> {
        self.terms.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect()
    }

    /// Value of the expression on a deterministic strategy.
    pub fn evaluate(&self, strategy: &DeterministicStrategy) -> Coeff {
        let mut total = Coeff::zero();
        for (settings, coeff) in &self.terms {
            let sign = strategy.correlator(settings);
            let term = if sign > 0 { coeff.clone() } else { coeff.neg() };
            total = total.add(&term);
        }
        total
    }

    pub fn evaluate_f64(&self, strategy: &DeterministicStrategy) -> f64 {
        self.terms.iter().map(|(s, c)| c.to_f64() * f64::from(strategy.correlator(s))).sum()
    }

    /// Sum of absolute coefficients, the algebraic maximum.
    pub fn algebraic_max(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).sum()
    }
}

/// Outcomes `(A₁, A₂)` of every party; setting 0 always yields +1.
///
/// Ordered lexicographically over `(A₁, A₂, B₁, B₂, …)` with +1 before −1,
/// which is the order of [`DeterministicStrategy::from_index`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    outcomes: Vec<[i8; 2]>,
}

impl Ord for DeterministicStrategy {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |s: &Self| s.outcomes.iter().flat_map(|p| p.iter().map(|&o| o < 0)).collect::<Vec<bool>>();
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for DeterministicStrategy {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DeterministicStrategy {
    pub fn new(outcomes: Vec<[i8; 2]>) -> Result<Self> {
        for pair in &outcomes {
            for &o in pair {
                if o != 1 && o != -1 {
                    return Err(Error::InvalidInput(format!("outcome {o} is not ±1")));
                }
            }
        }
        Ok(Self { outcomes })
    }

    /// Strategy number `index` in lexicographic order over
    /// `(A₁, A₂, B₁, B₂, …)`, with +1 ordered before −1.
    pub fn from_index(parties: usize, index: u64) -> Self {
        let bits = 2 * parties;
        let outcomes = (0..parties)
            .map(|p| {
                let o = |slot: usize| -> i8 {
                    if (index >> (bits - 1 - slot)) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                };
                [o(2 * p), o(2 * p + 1)]
            })
            .collect();
        Self { outcomes }
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    pub fn outcomes(&self) -> &[[i8; 2]] {
        &self.outcomes
    }

    pub fn outcome(&self, party: usize, setting: u8) -> i8 {
        match setting {
            0 => 1,
            s => self.outcomes[party][usize::from(s - 1)],
        }
    }

    pub fn correlator(&self, settings: &[u8]) -> i8 {
        settings.iter().enumerate().map(|(p, &s)| self.outcome(p, s)).product()
    }
}

/// Permutationally invariant two-setting expression.
#[derive(Clone, Debug, PartialEq)]
pub struct PIBellExpression {
    parties: usize,
    coeffs: Vec<Coeff>,
}

/// Number of PI coefficients for `parties` parties: Σₖ (k + 1), k = 1..N.
pub fn pi_len(parties: usize) -> usize {
    parties * (parties + 3) / 2
}

/// Position of the coefficient for correlators of `order` parties of which
/// `twos` use the second setting.
pub fn pi_index(order: usize, twos: usize) -> usize {
    debug_assert!(order >= 1 && twos <= order);
    // orders 1..order-1 contribute 2 + 3 + … + order entries
    (order - 1) * (order + 2) / 2 + twos
}

impl PIBellExpression {
    pub fn new(parties: usize, coeffs: Vec<Coeff>) -> Result<Self> {
        if parties == 0 {
            return Err(Error::InvalidInput("a Bell expression needs at least one party".into()));
        }
        if coeffs.len() != pi_len(parties) {
            return Err(Error::DimensionMismatch { expected: pi_len(parties), found: coeffs.len() });
        }
        Ok(Self { parties, coeffs })
    }

    pub fn from_f64(parties: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(parties, coeffs.iter().map(|&x| Coeff::Float(x)).collect())
    }

    pub fn from_ints(parties: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(parties, coeffs.iter().map(|&x| Coeff::int(x)).collect())
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(Coeff::to_f64).collect()
    }

    /// Symmetric sum over all placements of each correlator.
    pub fn expand(&self) -> GeneralBellExpression {
        let mut g = GeneralBellExpression::new(self.parties);
        for settings in all_settings(self.parties) {
            let (order, twos) = order_and_twos(&settings);
            if order == 0 {
                continue;
            }
            let c = &self.coeffs[pi_index(order, twos)];
            if !c.is_zero() {
                g.add_term(&settings, c.clone()).expect("settings are well-formed");
            }
        }
        g
    }

    /// Inverse of [`expand`](Self::expand); fails unless `g` is symmetric.
    pub fn symmetrize(g: &GeneralBellExpression) -> Result<Self> {
        let n = g.parties();
        let mut coeffs: Vec<Option<Coeff>> = vec![None; pi_len(n)];
        if !g.coefficient(&vec![0; n]).is_zero() {
            return Err(Error::NotPermutationInvariant("constant term has no PI slot".into()));
        }
        for settings in all_settings(n) {
            let (order, twos) = order_and_twos(&settings);
            if order == 0 {
                continue;
            }
            let c = g.coefficient(&settings);
            let slot = &mut coeffs[pi_index(order, twos)];
            match slot {
                None => *slot = Some(c),
                Some(prev) => {
                    if prev.compare(&c) != Ordering::Equal {
                        return Err(Error::NotPermutationInvariant(format!(
                            "coefficient of {settings:?} is {c}, expected {prev}"
                        )));
                    }
                }
            }
        }
        Self::new(n, coeffs.into_iter().map(|c| c.unwrap_or_else(Coeff::zero)).collect())
    }

    pub fn value(&self, components: &[i64]) -> Coeff {
        self.coeffs
            .iter()
            .zip(components)
            .fold(Coeff::zero(), |acc, (c, &e)| acc.add(&c.mul(&Coeff::int(e))))
    }
}

fn order_and_twos(settings: &[u8]) -> (usize, usize) {
    let order = settings.iter().filter(|&&s| s != 0).count();
    let twos = settings.iter().filter(|&&s| s == 2).count();
    (order, twos)
}

/// Every tuple in `{0,1,2}^N`, lexicographic.
pub fn all_settings(parties: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = 3usize.pow(parties as u32);
    (0..total).map(move |mut idx| {
        let mut s = vec![0u8; parties];
        for p in (0..parties).rev() {
            s[p] = (idx % 3) as u8;
            idx /= 3;
        }
        s
    })
}

/// The symmetrized components `E_λ`: for each PI slot, the sum of all
/// correlators of that type under strategy `λ`.
pub fn symmetrized_components(strategy: &DeterministicStrategy) -> Vec<i64> {
    let n = strategy.parties();
    let mut e = vec![0i64; pi_len(n)];
    for settings in all_settings(n) {
        let (order, twos) = order_and_twos(&settings);
        if order > 0 {
            e[pi_index(order, twos)] += i64::from(strategy.correlator(&settings));
        }
    }
    e
}

/// Three-party components, matching the nine displayed sums `E_{λ,1..9}`.
pub fn symmetrized_components3(strategy: &DeterministicStrategy) -> Result<[i64; 9]> {
    if strategy.parties() != 3 {
        return Err(Error::WrongPartyCount { expected: 3, found: strategy.parties() });
    }
    let e = symmetrized_components(strategy);
    let mut out = [0i64; 9];
    out.copy_from_slice(&e);
    Ok(out)
}

/// Exact local maximum together with every maximizing strategy.
#[derive(Clone, Debug)]
pub struct LocalBound {
    pub value: Coeff,
    pub maximizers: Vec<DeterministicStrategy>,
}

/// Maximum of `g` over all `4^N` deterministic strategies.
///
/// Exact expressions are compared exactly; float expressions treat values
/// within `1e-12` (relative) of the maximum as ties.
pub fn local_bound(g: &GeneralBellExpression) -> LocalBound {
    let n = g.parties();
    let count = 1u64 << (2 * n);
    if g.is_exact() {
        let mut best: Option<Coeff> = None;
        let mut arg = Vec::new();
        for idx in 0..count {
            let s = DeterministicStrategy::from_index(n, idx);
            let v = g.evaluate(&s);
            match best.as_ref().map(|b| v.compare(b)) {
                None | Some(Ordering::Greater) => {
                    best = Some(v);
                    arg.clear();
                    arg.push(s);
                }
                Some(Ordering::Equal) => arg.push(s),
                Some(Ordering::Less) => {}
            }
        }
        LocalBound { value: best.unwrap_or_else(Coeff::zero), maximizers: arg }
    } else {
        let values: Vec<f64> =
            (0..count).map(|i| g.evaluate_f64(&DeterministicStrategy::from_index(n, i))).collect();
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * best.abs().max(1.0);
        let maximizers = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= best - tol)
            .map(|(i, _)| DeterministicStrategy::from_index(n, i as u64))
            .collect();
        LocalBound { value: Coeff::Float(best), maximizers }
    }
}

/// Orbits of deterministic strategies under party permutations.
///
/// Each party plays one of four local types `(A₁, A₂) ∈ {±1}²`; an orbit is a
/// multiset of types, so there are `C(N + 3, N)` of them. Representatives
/// list the types in non-decreasing order.
pub fn strategy_classes(parties: usize) -> Vec<(DeterministicStrategy, u64)> {
    const TYPES: [[i8; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parties);
    fn rec(
        parties: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<(DeterministicStrategy, u64)>,
    ) {
        if current.len() == parties {
            let outcomes = current.iter().map(|&t| TYPES[t]).collect();
            let mut counts = [0u64; 4];
            for &t in current.iter() {
                counts[t] += 1;
            }
            let mult = factorial(parties as u64) / counts.iter().map(|&c| factorial(c)).product::<u64>();
            out.push((DeterministicStrategy { outcomes }, mult));
            return;
        }
        for t in start..4 {
            current.push(t);
            rec(parties, t, current, out);
            current.pop();
        }
    }
    rec(parties, 0, &mut current, &mut out);
    out
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Built-in inequalities.
pub mod builtin {
    use super::*;

    /// `A₁B₁C₁ − A₁B₂C₂ − A₂B₁C₂ − A₂B₂C₁ ≤ 2`.
    pub fn mermin3() -> PIBellExpression {
        PIBellExpression::from_ints(3, &[0, 0, 0, 0, 0, 1, 0, -1, 0]).expect("static layout")
    }

    /// Four-party MABK, `[0 0; 0 0 0; 0 0 0 0; 1 1 −1 −1 1] ≤ 4`.
    pub fn mabk4() -> PIBellExpression {
        PIBellExpression::from_ints(4, &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, -1, -1, 1]).expect("static layout")
    }

    /// Sum of two cluster-state inequalities (parties A, B, C, D), `≤ 4`.
    pub fn toth() -> GeneralBellExpression {
        let mut g = GeneralBellExpression::new(4);
        let terms: [([u8; 4], i64); 8] = [
            ([1, 0, 1, 2], 1),
            ([2, 1, 2, 2], 1),
            ([1, 0, 2, 1], 1),
            ([2, 1, 1, 1], -1),
            ([0, 2, 1, 2], 1),
            ([2, 1, 2, 2], 1),
            ([0, 2, 2, 1], 1),
            ([2, 1, 1, 1], -1),
        ];
        for (s, c) in terms {
            g.add_term(&s, Coeff::int(c)).expect("static layout");
        }
        g
    }

    /// W-state inequality at φ = 0.09275644π, normalized to local bound 1.
    pub fn w_b1() -> PIBellExpression {
        PIBellExpression::from_f64(
            3,
            &[
                -0.28155401,
                0.03986104,
                -0.18252567,
                -0.18252567,
                0.15080767,
                -0.47003882,
                -0.28751315,
                0.17656653,
                -0.04204495,
            ],
        )
        .expect("static layout")
    }

    /// Measurement angle of [`w_b1`], in units of π.
    pub const W_B1_PHI_OVER_PI: f64 = 0.09275644;

    /// W-state inequality at φ = π/4 with local bound `872 − 48√2`, quantum
    /// value 964.
    pub fn w_b2() -> PIBellExpression {
        let r = |p: i64, s: i64| Coeff::Exact(Rad2::from_parts(p, 1, s, 1));
        PIBellExpression::new(
            3,
            alloc::vec![
                r(336, -160),
                r(336, -160),
                r(-132, -6),
                r(-304, 30),
                r(-132, -6),
                r(30, 89),
                r(102, -83),
                r(102, -83),
                r(30, 89),
            ],
        )
        .expect("static layout")
    }

    /// Marginal-free W-state inequality at φ = π/4; local bound 6, quantum 7.
    pub fn w_b3() -> PIBellExpression {
        let q = |r: i64, s: i64| Coeff::Exact(Rad2::from_parts(0, 1, r, s));
        PIBellExpression::new(
            3,
            alloc::vec![
                Coeff::int(0),
                Coeff::int(0),
                Coeff::int(-1),
                Coeff::int(-2),
                Coeff::int(-1),
                q(3, 4),
                q(-1, 4),
                q(-1, 4),
                q(3, 4),
            ],
        )
        .expect("static layout")
    }

    pub const NAMES: [&str; 6] = ["mermin", "mabk", "toth", "b1", "b2", "b3"];

    pub fn by_name(name: &str) -> Option<GeneralBellExpression> {
        match name.to_ascii_lowercase().as_str() {
            "mermin" | "mermin3" => Some(mermin3().expand()),
            "mabk" | "mabk4" => Some(mabk4().expand()),
            "toth" => Some(toth()),
            "b1" => Some(w_b1().expand()),
            "b2" => Some(w_b2().expand()),
            "b3" => Some(w_b3().expand()),
            _ => None,
        }
    }
}
