//! N-qubit states, Pauli words, planar observables and Bell operators.
//!
//! Tensor products are big-endian: party 0 is the most significant qubit, so
//! the basis label `|b₀ b₁ … b_{N-1}⟩` sits at index `Σ bₖ 2^{N-1-k}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bell::GeneralBellExpression;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::math::{cos, sin, sqrt};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(Error::InvalidSymbol(c)),
        }
    }

    pub fn matrix(self) -> CMatrix {
        match self {
            Pauli::I => CMatrix::identity(2),
            Pauli::X => CMatrix::from_rows(2, vec![ZERO, ONE, ONE, ZERO]),
            Pauli::Y => CMatrix::from_rows(2, vec![ZERO, -I, I, ZERO]),
            Pauli::Z => CMatrix::from_rows(2, vec![ONE, ZERO, ZERO, -ONE]),
        }
    }
}

/// `v·σ` for a real Bloch vector.
pub fn bloch_operator(v: [f64; 3]) -> CMatrix {
    CMatrix::from_rows(
        2,
        vec![
            Complex64::new(v[2], 0.0),
            Complex64::new(v[0], -v[1]),
            Complex64::new(v[0], v[1]),
            Complex64::new(-v[2], 0.0),
        ],
    )
}

/// Pure state of `parties` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    parties: usize,
}

impl StateVector {
    /// Validates length `2^parties` and unit norm (within `1e-12`).
    pub fn new(parties: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << parties {
            return Err(Error::DimensionMismatch { expected: 1 << parties, found: amplitudes.len() });
        }
        let norm = sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum());
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, parties })
    }

    /// Normalizes first; fails only on the zero vector or a bad length.
    pub fn normalized(parties: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum());
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(parties, amplitudes)
    }

    pub fn from_real(parties: usize, amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(parties, amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state from a bit string such as `"010"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let parties = bits.chars().count();
        let mut index = 0usize;
        for c in bits.chars() {
            index = index * 2
                + match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::InvalidSymbol(other)),
                };
        }
        let mut amps = vec![ZERO; 1 << parties];
        amps[index] = ONE;
        Self::new(parties, amps)
    }

    /// `(|001⟩ + |010⟩ + |100⟩)/√3`.
    pub fn w() -> Self {
        Self::from_real(3, &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]).expect("static state")
    }

    /// `(|011⟩ + |101⟩ + |110⟩)/√3`.
    pub fn w_bar() -> Self {
        Self::from_real(3, &[0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]).expect("static state")
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(parties: usize) -> Self {
        let mut amps = vec![0.0; 1 << parties];
        amps[0] = 1.0;
        amps[(1 << parties) - 1] = 1.0;
        Self::from_real(parties, &amps).expect("static state")
    }

    /// Four-qubit linear cluster state `(|0000⟩ + |0011⟩ + |1100⟩ − |1111⟩)/2`.
    pub fn cluster() -> Self {
        let mut amps = [0.0; 16];
        amps[0b0000] = 1.0;
        amps[0b0011] = 1.0;
        amps[0b1100] = 1.0;
        amps[0b1111] = -1.0;
        Self::from_real(4, &amps).expect("static state")
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Multiplies by the global phase that makes the largest amplitude real
    /// and positive.
    pub fn fix_phase(&self) -> StateVector {
        let pivot = self
            .amplitudes
            .iter()
            .fold(ZERO, |best, &a| if a.norm_sqr() > best.norm_sqr() + 1e-12 { a } else { best });
        if pivot == ZERO {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        Self { amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(), parties: self.parties }
    }

    /// Largest imaginary part after [`fix_phase`](Self::fix_phase).
    pub fn imaginary_residue(&self) -> f64 {
        self.fix_phase().amplitudes.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Applies `ops[k]` to qubit `k`.
    pub fn apply_local(&self, ops: &[CMatrix]) -> Result<StateVector> {
        if ops.len() != self.parties {
            return Err(Error::WrongPartyCount { expected: self.parties, found: ops.len() });
        }
        let mut amps = self.amplitudes.clone();
        for (site, op) in ops.iter().enumerate() {
            if op.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
            }
            amps = apply_on_site(&amps, self.parties, site, op);
        }
        StateVector::normalized(self.parties, amps)
    }

    pub fn apply(&self, op: &HermitianOperator) -> Result<Vec<Complex64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        Ok(op.matrix().apply(&self.amplitudes))
    }
}

/// Applies a 2×2 operator to one qubit of a `sites`-qubit amplitude vector.
pub fn apply_on_site(amps: &[Complex64], sites: usize, site: usize, op: &CMatrix) -> Vec<Complex64> {
    let stride = 1usize << (sites - 1 - site);
    let mut out = vec![ZERO; amps.len()];
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (amps[base], amps[base | stride]);
        out[base] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        out[base | stride] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
    out
}

/// Hermitian operator on `parties` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    parties: usize,
}

impl HermitianOperator {
    /// Validates shape and Hermiticity within `1e-12`.
    pub fn new(parties: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.dim() != 1 << parties {
            return Err(Error::DimensionMismatch { expected: 1 << parties, found: matrix.dim() });
        }
        let err = matrix.hermiticity_error();
        if err > 1e-12 {
            return Err(Error::NotHermitian(err));
        }
        Ok(Self { matrix, parties })
    }

    pub fn zero(parties: usize) -> Self {
        Self { matrix: CMatrix::zeros(1 << parties), parties }
    }

    pub fn identity(parties: usize) -> Self {
        Self { matrix: CMatrix::identity(1 << parties), parties }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let mut m = self.matrix.clone();
        m.add_scaled(&other.matrix, ONE);
        Ok(Self { matrix: m, parties: self.parties })
    }

    pub fn scaled(&self, s: f64) -> HermitianOperator {
        Self { matrix: self.matrix.scale(Complex64::new(s, 0.0)), parties: self.parties }
    }

    pub fn compose(&self, other: &HermitianOperator) -> CMatrix {
        self.matrix.mul(&other.matrix)
    }
}

/// `cos φ·Z + sin φ·X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarObservable {
    pub angle: f64,
}

impl PlanarObservable {
    pub fn new(angle: f64) -> Self {
        Self { angle }
    }

    pub fn bloch(&self) -> [f64; 3] {
        [sin(self.angle), 0.0, cos(self.angle)]
    }

    pub fn matrix(&self) -> CMatrix {
        bloch_operator(self.bloch())
    }
}

/// Tensor product of single-qubit Paulis, e.g. `"ZXI"`.
pub fn build_pauli_word(letters: &str) -> Result<HermitianOperator> {
    let paulis = letters.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
    pauli_product(&paulis)
}

pub fn pauli_product(paulis: &[Pauli]) -> Result<HermitianOperator> {
    if paulis.is_empty() || paulis.len() > 8 {
        return Err(Error::InvalidInput(format!("Pauli word of length {}", paulis.len())));
    }
    let mut m = CMatrix::identity(1);
    for p in paulis {
        m = m.kron(&p.matrix());
    }
    Ok(HermitianOperator { matrix: m, parties: paulis.len() })
}

pub fn observable_matrix(o: PlanarObservable) -> HermitianOperator {
    HermitianOperator { matrix: o.matrix(), parties: 1 }
}

/// Two observables (settings 1 and 2) for every party.
pub type LocalObservables = Vec<[CMatrix; 2]>;

pub fn planar_observables(angles: &[(f64, f64)]) -> LocalObservables {
    angles
        .iter()
        .map(|&(a1, a2)| [PlanarObservable::new(a1).matrix(), PlanarObservable::new(a2).matrix()])
        .collect()
}

/// Same `(Z-role, X-role)` pair, `Z` and `X`, on every party.
pub fn zx_observables(parties: usize) -> LocalObservables {
    (0..parties).map(|_| [Pauli::Z.matrix(), Pauli::X.matrix()]).collect()
}

/// `Σ c(x) ⊗ₖ A_{k,xₖ}`, with setting 0 the identity.
pub fn bell_operator(g: &GeneralBellExpression, observables: &[[CMatrix; 2]]) -> Result<HermitianOperator> {
    let n = g.parties();
    if observables.len() != n {
        return Err(Error::WrongPartyCount { expected: n, found: observables.len() });
    }
    for obs in observables {
        for o in obs {
            if o.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: o.dim() });
            }
            let err = o.hermiticity_error();
            if err > 1e-12 {
                return Err(Error::NotHermitian(err));
            }
        }
    }
    let id = CMatrix::identity(2);
    let mut total = CMatrix::zeros(1 << n);
    for (settings, coeff) in g.terms() {
        let mut term = CMatrix::identity(1);
        for (k, &s) in settings.iter().enumerate() {
            let site = if s == 0 { &id } else { &observables[k][usize::from(s - 1)] };
            term = term.kron(site);
        }
        total.add_scaled(&term, Complex64::new(coeff.to_f64(), 0.0));
    }
    // Symmetrize away rounding so the Hermitian check is exact.
    let sym = {
        let adj = total.adjoint();
        let mut s = total.clone();
        s.add_scaled(&adj, ONE);
        s.scale(Complex64::new(0.5, 0.0))
    };
    Ok(HermitianOperator { matrix: sym, parties: n })
}

/// `⟨s|A|s⟩`.
pub fn expectation(s: &StateVector, a: &HermitianOperator) -> Result<f64> {
    let av = s.apply(a)?;
    let v: Complex64 = s.amplitudes.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    Ok(v.re)
}

/// Largest eigenvalue with a unit eigenvector.
pub fn top_eigenpair(a: &HermitianOperator) -> (f64, StateVector) {
    let (values, vectors) = hermitian_eigen(a.matrix());
    let k = values.len() - 1;
    let v = StateVector::normalized(a.parties, vectors[k].clone()).expect("eigenvectors are nonzero");
    (values[k], v.fix_phase())
}

/// All eigenvalues, ascending.
pub fn spectrum(a: &HermitianOperator) -> Vec<f64> {
    hermitian_eigen(a.matrix()).0
}

/// `cos(π/4 − φ/2)·𝟙 − i·sin(π/4 − φ/2)·Y`, a real rotation by `π/4 − φ/2`.
///
/// Conjugation `U·M·U†` takes `cos φ Z + sin φ X` to `X` and
/// `cos(φ − π/2) Z + sin(φ − π/2) X` to `Z`.
pub fn rotation_for_angle(phi: f64) -> CMatrix {
    let theta = core::f64::consts::FRAC_PI_4 - phi / 2.0;
    let (c, s) = (cos(theta), sin(theta));
    // -i·s·Y = [[0, -s], [s, 0]]
    CMatrix::from_real(2, &[c, -s, s, c])
}

/// Hadamard gate.
pub fn hadamard() -> CMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real(2, &[h, h, h, -h])
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = sqrt(v.iter().map(|x| x * x).sum());
    if n < 1e-12 {
        return Err(Error::InvalidInput("zero Bloch vector".into()));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// Unitary `V` with `V (a₁·σ) V† = Z` and `V (a₂·σ) V† = X` for orthogonal
/// Bloch vectors `a₁`, `a₂`.
pub fn frame_unitary(a1: [f64; 3], a2: [f64; 3]) -> Result<CMatrix> {
    let a1 = unit(a1)?;
    let a2 = unit(a2)?;
    let dot: f64 = a1.iter().zip(&a2).map(|(x, y)| x * y).sum();
    if dot.abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("settings are not orthogonal (cos = {dot:.3e})")));
    }
    // Remove the small residual overlap of numerically found settings.
    let a2 = unit([a2[0] - dot * a1[0], a2[1] - dot * a1[1], a2[2] - dot * a1[2]])?;
    let a3 = cross(a1, a2);
    // Rows are the images of x, y, z: O·a₂ = x, O·a₃ = y, O·a₁ = z.
    let o = [a2, a3, a1];
    let q = quaternion_from_rotation(&o);
    // exp(-iθ n·σ/2) realizes the rotation with quaternion (cos θ/2, n sin θ/2).
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Ok(CMatrix::from_rows(
        2,
        vec![
            Complex64::new(w, -z),
            Complex64::new(-y, -x),
            Complex64::new(y, -x),
            Complex64::new(w, z),
        ],
    ))
}

fn quaternion_from_rotation(m: &[[f64; 3]; 3]) -> [f64; 4] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let q = if tr > 0.0 {
        let s = sqrt(tr + 1.0) * 2.0;
        [0.25 * s, (m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s]
    } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
        let s = sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
        [(m[2][1] - m[1][2]) / s, 0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s]
    } else if m[1][1] > m[2][2] {
        let s = sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
        [(m[0][2] - m[2][0]) / s, (m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s]
    } else {
        let s = sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
        [(m[1][0] - m[0][1]) / s, (m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s]
    };
    let n = sqrt(q.iter().map(|x| x * x).sum());
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

/// Bloch vector of a 2×2 traceless Hermitian operator.
pub fn bloch_vector(op: &CMatrix) -> [f64; 3] {
    [op[(1, 0)].re, op[(1, 0)].im, op[(0, 0)].re]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::builtin;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    /// `a ≈ e^{iθ} b` for some θ.
    fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        let n = a.dim();
        let (mut r, mut c) = (0, 0);
        for i in 0..n {
            for j in 0..n {
                if b[(i, j)].norm() > b[(r, c)].norm() {
                    r = i;
                    c = j;
                }
            }
        }
        let phase = a[(r, c)] / b[(r, c)];
        close(a, &b.scale(phase), tol)
    }

    #[test]
    fn pauli_word_z_ii_is_diagonal() {
        let op = build_pauli_word("ZII").unwrap();
        for i in 0..8 {
            let want = if i < 4 { 1.0 } else { -1.0 };
            assert_eq!(op.matrix()[(i, i)], Complex64::new(want, 0.0));
            for j in 0..8 {
                if i != j {
                    assert_eq!(op.matrix()[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn xxx_flips_all_bits() {
        let out = StateVector::basis("000").unwrap().apply(&build_pauli_word("XXX").unwrap()).unwrap();
        let want = StateVector::basis("111").unwrap();
        assert_eq!(out, want.amplitudes());
    }

    #[test]
    fn invalid_symbol() {
        assert_eq!(build_pauli_word("XQ"), Err(Error::InvalidSymbol('Q')));
    }

    #[test]
    fn observable_special_angles() {
        assert!(close(&PlanarObservable::new(0.0).matrix(), &Pauli::Z.matrix(), 1e-15));
        assert!(close(&PlanarObservable::new(PI / 2.0).matrix(), &Pauli::X.matrix(), 1e-15));
        let mut zx = Pauli::Z.matrix();
        zx.add_scaled(&Pauli::X.matrix(), ONE);
        assert!(close(&PlanarObservable::new(PI / 4.0).matrix(), &zx.scale(Complex64::new(FRAC_1_SQRT_2, 0.0)), 1e-15));
    }

    #[test]
    fn reference_states_have_listed_support() {
        let ghz3 = StateVector::ghz(3);
        let nz: Vec<usize> = (0..8).filter(|&i| ghz3.amplitudes()[i] != ZERO).collect();
        assert_eq!(nz, [0, 7]);
        let ghz4 = StateVector::ghz(4);
        let nz: Vec<usize> = (0..16).filter(|&i| ghz4.amplitudes()[i] != ZERO).collect();
        assert_eq!(nz, [0, 15]);
        let cl = StateVector::cluster();
        let nz: Vec<(usize, f64)> =
            (0..16).filter(|&i| cl.amplitudes()[i] != ZERO).map(|i| (i, cl.amplitudes()[i].re)).collect();
        assert_eq!(nz, [(0, 0.5), (3, 0.5), (12, 0.5), (15, -0.5)]);
        for s in [StateVector::w(), StateVector::w_bar(), ghz3, ghz4, cl] {
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            StateVector::new(2, vec![ONE, ZERO, ZERO]),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(matches!(StateVector::new(1, vec![ONE, ONE]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn mermin_on_ghz3_with_x_y() {
        let obs: LocalObservables = (0..3).map(|_| [Pauli::X.matrix(), Pauli::Y.matrix()]).collect();
        let b = bell_operator(&builtin::mermin3().expand(), &obs).unwrap();
        assert!((expectation(&StateVector::ghz(3), &b).unwrap() - 4.0).abs() < 1e-12);
        let (top, v) = top_eigenpair(&b);
        assert!((top - 4.0).abs() < 1e-10);
        assert!(v.overlap(&StateVector::ghz(3)).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn zero_expression_gives_zero_operator() {
        let g = GeneralBellExpression::new(3);
        let b = bell_operator(&g, &zx_observables(3)).unwrap();
        assert_eq!(b, HermitianOperator::zero(3));
    }

    #[test]
    fn bell_operator_rejects_wrong_party_count() {
        let g = builtin::mermin3().expand();
        assert!(matches!(bell_operator(&g, &zx_observables(2)), Err(Error::WrongPartyCount { .. })));
    }

    #[test]
    fn top_eigenpair_of_z() {
        let (v, s) = top_eigenpair(&build_pauli_word("Z").unwrap());
        assert!((v - 1.0).abs() < 1e-12);
        assert!(s.overlap(&StateVector::basis("0").unwrap()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn rotation_maps_planar_pair_to_x_and_z() {
        let phi = 0.09275644 * PI;
        let u = rotation_for_angle(phi);
        let m1 = PlanarObservable::new(phi).matrix();
        let m2 = PlanarObservable::new(phi - PI / 2.0).matrix();
        assert!(close(&u.mul(&m1).mul(&u.adjoint()), &Pauli::X.matrix(), 1e-12));
        assert!(close(&u.mul(&m2).mul(&u.adjoint()), &Pauli::Z.matrix(), 1e-12));
        assert!(close(&rotation_for_angle(PI / 2.0), &CMatrix::identity(2), 1e-15));
    }

    #[test]
    fn frame_unitary_matches_hadamard_rotation() {
        let phi = 0.09275644 * PI;
        let m1 = PlanarObservable::new(phi);
        let m2 = PlanarObservable::new(phi - PI / 2.0);
        let v = frame_unitary(m1.bloch(), m2.bloch()).unwrap();
        assert!(equal_up_to_phase(&v, &hadamard().mul(&rotation_for_angle(phi)), 1e-12));
        assert!(close(&v.mul(&m1.matrix()).mul(&v.adjoint()), &Pauli::Z.matrix(), 1e-12));
    }

    #[test]
    fn frame_unitary_rejects_parallel() {
        assert!(frame_unitary([0.0, 0.0, 1.0], [0.0, 0.6, 0.8]).is_err());
    }

    #[test]
    fn apply_on_site_matches_kron() {
        let s = StateVector::w();
        let x = Pauli::X.matrix();
        let id = CMatrix::identity(2);
        let full = id.kron(&x).kron(&id);
        let a = apply_on_site(s.amplitudes(), 3, 1, &x);
        let b = full.apply(s.amplitudes());
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-15);
        }
    }
}
