//! Moment matrices for N parties with two ±1-valued observables each.
//!
//! Words are products of observables. Observables of different parties
//! commute and every observable squares to the identity, so a word reduces
//! to one alternating letter sequence per party: `𝟙, A₁, A₂, A₁A₂, A₂A₁,
//! A₁A₂A₁, …`. Such a per-party sequence is encoded as a small integer
//! (`0` for the identity, `2(len−1) + first letter` otherwise), which makes
//! the graded lexicographic order coincide with the integer order.
//!
//! All shipped states and observables are real, so moments are real and a
//! word is identified with its adjoint. The moment matrix is then a real
//! symmetric matrix indexed by a word list `S`, with entry `(i, j)` holding
//! `⟨Sᵢ† Sⱼ⟩`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::bell::GeneralBellExpression;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Matrix};
use crate::qubit::{apply_on_site, StateVector};
use crate::sdp::{describe, SdpConstraint, SdpEntry, SdpInstance, SdpSettings, SdpSolution, SdpSolver, SdpStatus};

/// Longest per-party sequence a word can hold.
pub const MAX_PARTY_LEN: usize = 127;
/// Most parties a word can hold (one byte each in the packed key).
pub const MAX_PARTIES: usize = 8;

fn code_of(len: usize, first: u8) -> u8 {
    if len == 0 {
        0
    } else {
        (2 * (len - 1)) as u8 + first
    }
}

fn len_of(code: u8) -> usize {
    (code as usize + 1) / 2
}

fn first_of(code: u8) -> u8 {
    if code == 0 {
        0
    } else if code % 2 == 1 {
        1
    } else {
        2
    }
}

fn last_of(code: u8) -> u8 {
    let (len, first) = (len_of(code), first_of(code));
    if len % 2 == 1 {
        first
    } else {
        3 - first
    }
}

/// Letters of a per-party code, e.g. `A₁A₂A₁ → [1, 2, 1]`.
fn letters_of(code: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(len_of(code));
    let mut l = first_of(code);
    for _ in 0..len_of(code) {
        out.push(l);
        l = 3 - l;
    }
    out
}

/// Reverses a per-party sequence.
fn adjoint_code(code: u8) -> u8 {
    code_of(len_of(code), last_of(code))
}

/// Product of two reduced per-party sequences.
fn multiply_codes(a: u8, b: u8) -> Result<u8> {
    let mut v = letters_of(a);
    for l in letters_of(b) {
        if v.last() == Some(&l) {
            v.pop();
        } else {
            v.push(l);
        }
    }
    if v.len() > MAX_PARTY_LEN {
        return Err(Error::NonRepresentable(format!("per-party word of length {}", v.len())));
    }
    Ok(code_of(v.len(), v.first().copied().unwrap_or(0)))
}

/// A reduced product of observables, one alternating sequence per party.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorWord {
    codes: Vec<u8>,
}

impl OperatorWord {
    pub fn identity(parties: usize) -> Self {
        Self { codes: vec![0; parties] }
    }

    /// Reduces raw letters `(party, setting)` in the given order.
    pub fn canonical_form(parties: usize, letters: &[(usize, u8)]) -> Result<Self> {
        if parties == 0 || parties > MAX_PARTIES {
            return Err(Error::InvalidInput(format!("{parties} parties (supported 1..={MAX_PARTIES})")));
        }
        let mut codes = vec![0u8; parties];
        for &(p, s) in letters {
            if p >= parties {
                return Err(Error::WrongPartyCount { expected: parties, found: p + 1 });
            }
            if s != 1 && s != 2 {
                return Err(Error::InvalidSetting(s));
            }
            codes[p] = multiply_codes(codes[p], code_of(1, s))?;
        }
        Ok(Self { codes })
    }

    /// Word measured by a Bell correlator: setting `xₚ` on party `p`, `0` absent.
    pub fn from_settings(settings: &[u8]) -> Result<Self> {
        let letters: Vec<(usize, u8)> =
            settings.iter().enumerate().filter(|(_, &s)| s != 0).map(|(p, &s)| (p, s)).collect();
        Self::canonical_form(settings.len(), &letters)
    }

    /// Builds a word from per-party letter lists, reducing each.
    pub fn from_party_letters(per_party: &[&[u8]]) -> Result<Self> {
        let letters: Vec<(usize, u8)> =
            per_party.iter().enumerate().flat_map(|(p, ls)| ls.iter().map(move |&s| (p, s))).collect();
        Self::canonical_form(per_party.len(), &letters)
    }

    pub fn parties(&self) -> usize {
        self.codes.len()
    }

    pub fn is_identity(&self) -> bool {
        self.codes.iter().all(|&c| c == 0)
    }

    pub fn party_letters(&self, party: usize) -> Vec<u8> {
        letters_of(self.codes[party])
    }

    pub fn party_len(&self, party: usize) -> usize {
        len_of(self.codes[party])
    }

    pub fn max_party_len(&self) -> usize {
        self.codes.iter().map(|&c| len_of(c)).max().unwrap_or(0)
    }

    pub fn adjoint(&self) -> Self {
        Self { codes: self.codes.iter().map(|&c| adjoint_code(c)).collect() }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// `self · other`.
    pub fn mul(&self, other: &OperatorWord) -> Result<Self> {
        if self.parties() != other.parties() {
            return Err(Error::WrongPartyCount { expected: self.parties(), found: other.parties() });
        }
        let codes = self.codes.iter().zip(&other.codes).map(|(&a, &b)| multiply_codes(a, b)).collect::<Result<_>>()?;
        Ok(Self { codes })
    }

    /// Packed key, one byte per party with party 0 most significant.
    pub fn key(&self) -> u64 {
        self.codes.iter().fold(0u64, |acc, &c| (acc << 8) | c as u64)
    }

    /// Representative of `{w, w†}`: the one with the smaller key.
    pub fn real_representative(&self) -> Self {
        let adj = self.adjoint();
        if adj.key() < self.key() {
            adj
        } else {
            self.clone()
        }
    }

    /// Applies the word to a state, rightmost letter first.
    pub fn apply(&self, state: &[Complex64], observables: &[[CMatrix; 2]]) -> Vec<Complex64> {
        let n = self.parties();
        let mut v = state.to_vec();
        for p in 0..n {
            for &l in self.party_letters(p).iter().rev() {
                v = apply_on_site(&v, n, p, &observables[p][(l - 1) as usize]);
            }
        }
        v
    }

    /// `⟨ψ|w|ψ⟩` for explicit observables.
    pub fn expectation(&self, state: &StateVector, observables: &[[CMatrix; 2]]) -> Result<Complex64> {
        if observables.len() != self.parties() || state.parties() != self.parties() {
            return Err(Error::WrongPartyCount { expected: self.parties(), found: observables.len() });
        }
        let v = self.apply(state.amplitudes(), observables);
        Ok(state.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, &c) in self.codes.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name = (b'A' + p as u8) as char;
            for l in letters_of(c) {
                write!(f, "{name}{l}")?;
            }
        }
        Ok(())
    }
}

/// Named word sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceLevel {
    /// Per party `{𝟙, A₁, A₂, A₁A₂, A₂A₁}`.
    Local2,
    /// Local2 plus `A₁A₂A₁` per party.
    Local2Plus,
    /// Local2 for exactly four parties.
    Local2FourParty,
}

impl SequenceLevel {
    pub const ALL: [SequenceLevel; 3] = [SequenceLevel::Local2, SequenceLevel::Local2Plus, SequenceLevel::Local2FourParty];

    pub fn name(&self) -> &'static str {
        match self {
            SequenceLevel::Local2 => "local2",
            SequenceLevel::Local2Plus => "local2plus",
            SequenceLevel::Local2FourParty => "local2_4party",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.name() == name)
            .ok_or_else(|| Error::UnknownLevel(String::from(name)))
    }

    fn party_codes(&self) -> &'static [u8] {
        match self {
            SequenceLevel::Local2 | SequenceLevel::Local2FourParty => &[0, 1, 2, 3, 4],
            SequenceLevel::Local2Plus => &[0, 1, 2, 3, 4, 5],
        }
    }
}

impl fmt::Display for SequenceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered word set: per-party words in graded lexicographic order, party 0
/// most significant.
pub fn build_sequence_set(level: SequenceLevel, parties: usize) -> Result<Vec<OperatorWord>> {
    if level == SequenceLevel::Local2FourParty && parties != 4 {
        return Err(Error::WrongPartyCount { expected: 4, found: parties });
    }
    if parties == 0 || parties > MAX_PARTIES {
        return Err(Error::InvalidInput(format!("{parties} parties")));
    }
    let per = level.party_codes();
    let total = per.len().pow(parties as u32);
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut codes = vec![0u8; parties];
        for p in (0..parties).rev() {
            codes[p] = per[idx % per.len()];
            idx /= per.len();
        }
        out.push(OperatorWord { codes });
    }
    Ok(out)
}

/// Equality-class structure of a moment matrix.
#[derive(Clone, Debug)]
pub struct MomentMatrixStructure {
    parties: usize,
    level: Option<SequenceLevel>,
    words: Vec<OperatorWord>,
    /// Representative word per class.
    moments: Vec<OperatorWord>,
    index: BTreeMap<u64, usize>,
    /// Class of each upper-triangle entry, row-major packed.
    entry_class: Vec<u32>,
    positions: Vec<Vec<(u32, u32)>>,
    identity_class: usize,
    complex_moments: usize,
}

fn packed(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + j
}

impl MomentMatrixStructure {
    pub fn for_level(level: SequenceLevel, parties: usize) -> Result<Self> {
        let words = build_sequence_set(level, parties)?;
        let mut s = Self::build(words)?;
        s.level = Some(level);
        Ok(s)
    }

    /// Canonicalizes every entry `Sᵢ† Sⱼ` and groups equal moments.
    pub fn build(words: Vec<OperatorWord>) -> Result<Self> {
        let n = words.len();
        let Some(first) = words.first() else {
            return Err(Error::InvalidInput("empty word set".into()));
        };
        let parties = first.parties();
        {
            let mut seen = BTreeMap::new();
            for w in &words {
                if w.parties() != parties {
                    return Err(Error::WrongPartyCount { expected: parties, found: w.parties() });
                }
                if seen.insert(w.key(), ()).is_some() {
                    return Err(Error::InvalidInput(format!("duplicate word {w}")));
                }
            }
        }
        let adjoints: Vec<OperatorWord> = words.iter().map(|w| w.adjoint()).collect();
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut complex: BTreeMap<u64, ()> = BTreeMap::new();
        let mut moments = Vec::new();
        let mut positions: Vec<Vec<(u32, u32)>> = Vec::new();
        let mut entry_class = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let w = adjoints[i].mul(&words[j])?;
                complex.insert(w.key(), ());
                complex.insert(w.adjoint().key(), ());
                let rep = w.real_representative();
                let key = rep.key();
                let k = *index.entry(key).or_insert_with(|| {
                    moments.push(rep);
                    positions.push(Vec::new());
                    moments.len() - 1
                });
                positions[k].push((i as u32, j as u32));
                entry_class.push(k as u32);
            }
        }
        let identity_class = *index
            .get(&OperatorWord::identity(parties).key())
            .ok_or_else(|| Error::InvalidInput("word set lacks a diagonal".into()))?;
        Ok(Self {
            parties,
            level: None,
            words,
            moments,
            index,
            entry_class,
            positions,
            identity_class,
            complex_moments: complex.len(),
        })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn level(&self) -> Option<SequenceLevel> {
        self.level
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[OperatorWord] {
        &self.words
    }

    pub fn num_classes(&self) -> usize {
        self.moments.len()
    }

    pub fn class_word(&self, class: usize) -> &OperatorWord {
        &self.moments[class]
    }

    pub fn positions(&self, class: usize) -> &[(u32, u32)] {
        &self.positions[class]
    }

    pub fn identity_class(&self) -> usize {
        self.identity_class
    }

    pub fn entry_count(&self) -> usize {
        self.entry_class.len()
    }

    /// Distinct moments when `w` and `w†` are kept apart.
    pub fn complex_moment_count(&self) -> usize {
        self.complex_moments
    }

    /// One equality per redundant entry plus one fixing the identity moment.
    pub fn constraint_count(&self) -> usize {
        self.entry_count() - self.num_classes() + 1
    }

    pub fn class_of_entry(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entry_class[packed(self.order(), i, j)] as usize
    }

    /// Canonical word at `(i, j)`; the `(j, i)` word is its adjoint.
    pub fn word_at(&self, i: usize, j: usize) -> Result<OperatorWord> {
        self.words[i].adjoint().mul(&self.words[j])
    }

    pub fn class_of_word(&self, w: &OperatorWord) -> Option<usize> {
        if w.parties() != self.parties {
            return None;
        }
        self.index.get(&w.real_representative().key()).copied()
    }

    /// Class weight `Σ` over entries, counting off-diagonal ones twice.
    pub fn class_weight(&self, class: usize) -> f64 {
        self.positions[class].iter().map(|&(i, j)| if i == j { 1.0 } else { 2.0 }).sum()
    }

    /// Largest spread between entries of one class in a numeric matrix.
    pub fn class_spread(&self, gamma: &Matrix) -> f64 {
        let mut worst: f64 = 0.0;
        for ps in &self.positions {
            let (i0, j0) = ps[0];
            let v0 = gamma[(i0 as usize, j0 as usize)];
            for &(i, j) in ps {
                worst = worst.max((gamma[(i as usize, j as usize)] - v0).abs());
                worst = worst.max((gamma[(j as usize, i as usize)] - v0).abs());
            }
        }
        worst
    }

    /// Real moment matrix `Re⟨ψ|Sᵢ†Sⱼ|ψ⟩` of an explicit scenario.
    pub fn numeric_moment_matrix(&self, state: &StateVector, observables: &[[CMatrix; 2]]) -> Result<Matrix> {
        if state.parties() != self.parties || observables.len() != self.parties {
            return Err(Error::WrongPartyCount { expected: self.parties, found: observables.len() });
        }
        let vecs: Vec<Vec<Complex64>> = self.words.iter().map(|w| w.apply(state.amplitudes(), observables)).collect();
        let n = self.order();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: Complex64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a.conj() * b).sum();
                g[(i, j)] = v.re;
                g[(j, i)] = v.re;
            }
        }
        Ok(g)
    }

    /// Class values read from a numeric matrix (weighted averages).
    pub fn class_values(&self, gamma: &Matrix) -> Vec<f64> {
        (0..self.num_classes())
            .map(|k| {
                let mut acc = 0.0;
                for &(i, j) in &self.positions[k] {
                    let (i, j) = (i as usize, j as usize);
                    acc += if i == j { gamma[(i, i)] } else { gamma[(i, j)] + gamma[(j, i)] };
                }
                acc / self.class_weight(k)
            })
            .collect()
    }

    /// Restates `f` over class indices, failing on words outside the matrix.
    pub fn embed(&self, f: &MomentFunctional) -> Result<Vec<(usize, f64)>> {
        if f.parties() != self.parties {
            return Err(Error::WrongPartyCount { expected: self.parties, found: f.parties() });
        }
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        for (w, c) in f.terms() {
            let k = self.class_of_word(w).ok_or_else(|| Error::NonRepresentable(format!("{w}")))?;
            *out.entry(k).or_insert(0.0) += c;
        }
        Ok(out.into_iter().collect())
    }

    /// `Σ c_w Γ_w` on a numeric matrix.
    pub fn evaluate(&self, f: &MomentFunctional, gamma: &Matrix) -> Result<f64> {
        let values = self.class_values(gamma);
        Ok(self.embed(f)?.iter().map(|&(k, c)| c * values[k]).sum())
    }

    fn spread_entries(&self, coeffs: &[(usize, f64)]) -> Vec<SdpEntry> {
        let mut out = Vec::new();
        for &(k, c) in coeffs {
            if c == 0.0 {
                continue;
            }
            let w = self.class_weight(k);
            for &(i, j) in &self.positions[k] {
                out.push(SdpEntry::new(i as usize, j as usize, c / w));
            }
        }
        out
    }

    /// SDP over the moment matrix: minimize `objective` subject to the class
    /// ties, unit identity moment, and `extra` equalities `f(Γ) = value`.
    ///
    /// Constraint order: identity fixes (one per diagonal entry), class ties,
    /// then `extra` in the given order.
    pub fn sdp_instance(&self, objective: &MomentFunctional, extra: &[(MomentFunctional, f64)]) -> Result<SdpInstance> {
        let n = self.order();
        let mut inst = SdpInstance::new(n);
        inst.objective = self.spread_entries(&self.embed(objective)?);
        for &(i, j) in &self.positions[self.identity_class] {
            inst.constraints.push(SdpConstraint { entries: vec![SdpEntry::new(i as usize, j as usize, 1.0)], rhs: 1.0 });
        }
        for (k, ps) in self.positions.iter().enumerate() {
            if k == self.identity_class {
                continue;
            }
            let (i0, j0) = ps[0];
            let m0 = if i0 == j0 { 1.0 } else { 2.0 };
            for &(i, j) in &ps[1..] {
                let m = if i == j { 1.0 } else { 2.0 };
                inst.constraints.push(SdpConstraint {
                    entries: vec![
                        SdpEntry::new(i as usize, j as usize, 1.0 / m),
                        SdpEntry::new(i0 as usize, j0 as usize, -1.0 / m0),
                    ],
                    rhs: 0.0,
                });
            }
        }
        for (f, value) in extra {
            inst.constraints.push(SdpConstraint { entries: self.spread_entries(&self.embed(f)?), rhs: *value });
        }
        Ok(inst)
    }

    /// Index of the first `extra` constraint in [`sdp_instance`](Self::sdp_instance).
    pub fn first_extra_constraint(&self) -> usize {
        self.constraint_count()
    }
}

/// Real linear functional on moments, with `w` and `w†` merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentFunctional {
    parties: usize,
    terms: BTreeMap<OperatorWord, f64>,
}

impl MomentFunctional {
    pub fn new(parties: usize) -> Self {
        Self { parties, terms: BTreeMap::new() }
    }

    pub fn constant(parties: usize, value: f64) -> Self {
        let mut f = Self::new(parties);
        f.add(&OperatorWord::identity(parties), value);
        f
    }

    /// Bell expression as a functional over correlator words.
    pub fn from_bell(g: &GeneralBellExpression) -> Result<Self> {
        let mut f = Self::new(g.parties());
        for (settings, c) in g.terms() {
            f.add(&OperatorWord::from_settings(settings)?, c.to_f64());
        }
        Ok(f)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Adds `c·⟨w⟩`; in the real setting `⟨w⟩` and `⟨w†⟩` coincide.
    pub fn add(&mut self, w: &OperatorWord, c: f64) {
        let rep = w.real_representative();
        let entry = self.terms.entry(rep.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&rep);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OperatorWord, f64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &OperatorWord) -> f64 {
        self.terms.get(&w.real_representative()).copied().unwrap_or(0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { parties: self.parties, terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    /// `Σ c_w Re⟨ψ|w|ψ⟩` for an explicit scenario.
    pub fn evaluate_on(&self, state: &StateVector, observables: &[[CMatrix; 2]]) -> Result<f64> {
        let mut acc = 0.0;
        for (w, c) in self.terms() {
            acc += c * w.expectation(state, observables)?.re;
        }
        Ok(acc)
    }
}

/// Real functional from a Bell expression, checked against a structure.
pub fn embed_functional(g: &GeneralBellExpression, structure: &MomentMatrixStructure) -> Result<MomentFunctional> {
    let f = MomentFunctional::from_bell(g)?;
    structure.embed(&f)?;
    Ok(f)
}

/// Certified SDP upper bound on the quantum value of a Bell expression.
#[derive(Clone, Debug)]
pub struct NpaBound {
    /// Upper bound from the certified dual, or the primal value if none.
    pub value: f64,
    pub primal: f64,
    pub certified: bool,
    pub solution: SdpSolution,
}

pub fn npa_upper_bound(g: &GeneralBellExpression, structure: &MomentMatrixStructure, settings: &SdpSettings) -> Result<NpaBound> {
    let f = embed_functional(g, structure)?;
    let inst = structure.sdp_instance(&f.scaled(-1.0), &[])?;
    let (solution, _) = SdpSolver::new(inst)?.solve(settings, None);
    match solution.status {
        SdpStatus::Infeasible => return Err(Error::Infeasible),
        SdpStatus::MaxIterations if solution.relative_gap() > 1e3 * settings.tol => {
            return Err(Error::Numerical(describe(&solution)));
        }
        _ => {}
    }
    let primal = -solution.primal_objective;
    Ok(NpaBound {
        value: solution.dual_bound.map_or(primal, |d| -d),
        primal,
        certified: solution.dual_bound.is_some(),
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::builtin;
    use crate::linalg::symmetric_eigen;
    use crate::qubit::zx_observables;

    fn w(parties: usize, letters: &[(usize, u8)]) -> OperatorWord {
        OperatorWord::canonical_form(parties, letters).unwrap()
    }

    #[test]
    fn reduction_rules() {
        assert!(w(1, &[(0, 1), (0, 1)]).is_identity());
        assert!(w(1, &[(0, 1), (0, 2), (0, 2), (0, 1)]).is_identity());
        let x = w(3, &[(1, 2), (0, 1), (2, 1), (0, 1)]);
        assert_eq!(x.party_letters(0), Vec::<u8>::new());
        assert_eq!(x.party_letters(1), vec![2]);
        assert_eq!(x.party_letters(2), vec![1]);
        assert_eq!(format!("{x}"), "B2 C1");
    }

    #[test]
    fn codes_roundtrip_letters() {
        for code in 0u8..40 {
            let letters = letters_of(code);
            let again = w(1, &letters.iter().map(|&l| (0, l)).collect::<Vec<_>>());
            assert_eq!(again.codes[0], code);
            assert_eq!(letters_of(adjoint_code(code)), letters.iter().rev().copied().collect::<Vec<_>>());
        }
    }

    #[test]
    fn multiplication_matches_letter_reduction() {
        for a in 0u8..12 {
            for b in 0u8..12 {
                let mut raw: Vec<(usize, u8)> = letters_of(a).into_iter().map(|l| (0, l)).collect();
                raw.extend(letters_of(b).into_iter().map(|l| (0, l)));
                assert_eq!(multiply_codes(a, b).unwrap(), w(1, &raw).codes[0], "{a} {b}");
            }
        }
    }

    #[test]
    fn sequence_set_sizes() {
        assert_eq!(build_sequence_set(SequenceLevel::Local2, 3).unwrap().len(), 125);
        assert_eq!(build_sequence_set(SequenceLevel::Local2Plus, 3).unwrap().len(), 216);
        assert_eq!(build_sequence_set(SequenceLevel::Local2FourParty, 4).unwrap().len(), 625);
        assert!(build_sequence_set(SequenceLevel::Local2FourParty, 3).is_err());
        assert!(matches!(SequenceLevel::parse("level9"), Err(Error::UnknownLevel(_))));
    }

    #[test]
    fn sequence_set_is_graded_lex() {
        let s = build_sequence_set(SequenceLevel::Local2, 1).unwrap();
        let names: Vec<String> = s.iter().map(|w| format!("{w}")).collect();
        assert_eq!(names, ["1", "A1", "A2", "A1A2", "A2A1"]);
        let s3 = build_sequence_set(SequenceLevel::Local2, 3).unwrap();
        assert!(s3.windows(2).all(|p| p[0].key() < p[1].key()));
    }

    #[test]
    fn single_party_hand_worked() {
        let one = OperatorWord::identity(1);
        let a1 = w(1, &[(0, 1)]);
        let a2 = w(1, &[(0, 2)]);
        let s = MomentMatrixStructure::build(vec![one.clone(), a1.clone(), a2.clone()]).unwrap();
        // Entries: 1, A1, A2 / 1, A1A2 / 1 → classes {1, A1, A2, A1A2~A2A1}.
        assert_eq!(s.num_classes(), 4);
        assert_eq!(s.complex_moment_count(), 5);
        assert_eq!(s.word_at(1, 2).unwrap(), w(1, &[(0, 1), (0, 2)]));
        assert_eq!(s.word_at(2, 1).unwrap(), w(1, &[(0, 2), (0, 1)]));
        assert_eq!(s.word_at(1, 2).unwrap().adjoint(), s.word_at(2, 1).unwrap());
        assert_eq!(s.class_of_entry(0, 0), s.identity_class());
        assert_eq!(s.class_of_entry(2, 2), s.identity_class());
        assert_eq!(s.constraint_count(), 6 - 4 + 1);
    }

    #[test]
    fn diagonal_is_identity() {
        let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 3).unwrap();
        for i in 0..s.order() {
            assert_eq!(s.class_of_entry(i, i), s.identity_class());
        }
        assert_eq!(s.positions(s.identity_class()).len(), s.order());
    }

    #[test]
    fn mermin_embeds_on_four_words() {
        let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 3).unwrap();
        let f = embed_functional(&builtin::mermin3().expand(), &s).unwrap();
        assert_eq!(f.num_terms(), 4);
        assert!(f.terms().all(|(_, c)| c.abs() == 1.0));
        let c = s.embed(&MomentFunctional::constant(3, 1.0)).unwrap();
        assert_eq!(c, vec![(s.identity_class(), 1.0)]);
    }

    #[test]
    fn long_words_are_not_representable() {
        let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 3).unwrap();
        let long = w(3, &[(0, 1), (0, 2), (0, 1), (0, 2), (0, 1)]);
        let mut f = MomentFunctional::new(3);
        f.add(&long, 1.0);
        match s.embed(&f) {
            Err(Error::NonRepresentable(name)) => assert_eq!(name, "A1A2A1A2A1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numeric_gamma_oracle() {
        let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 3).unwrap();
        let state = StateVector::w();
        let obs = zx_observables(3);
        let g = s.numeric_moment_matrix(&state, &obs).unwrap();
        let eig = symmetric_eigen(&g);
        assert!(eig.values[0] > -1e-9);
        assert!(s.class_spread(&g) < 1e-10);
        let bell = builtin::w_b3().expand();
        let f = MomentFunctional::from_bell(&bell).unwrap();
        let direct = crate::qubit::expectation(&state, &crate::qubit::bell_operator(&bell, &obs).unwrap()).unwrap();
        assert!((s.evaluate(&f, &g).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn sdp_instance_counts() {
        let s = MomentMatrixStructure::for_level(SequenceLevel::Local2, 2).unwrap();
        let f = MomentFunctional::constant(2, 1.0);
        let inst = s.sdp_instance(&f, &[(f.clone(), 1.0)]).unwrap();
        assert_eq!(inst.constraints.len(), s.constraint_count() + 1);
        assert_eq!(s.first_extra_constraint(), inst.constraints.len() - 1);
    }
}
