//! Device-independent fidelity bounds through a virtual local SWAP.
//!
//! Each party's box is coupled to a trusted qubit in `|0⟩` by a swap circuit
//! whose box-side gates are the party's own observables, `A₁` playing `Z` and
//! `A₂` playing `X`. With the ancilla starting in `|0⟩` the circuit acts as
//!
//! ```text
//! |ψ⟩|0⟩ ↦ K₀|ψ⟩|0⟩ + K₁|ψ⟩|1⟩,   K₀ = (𝟙 + A₁)/2,   K₁ = A₂(𝟙 − A₁)/2,
//! ```
//!
//! so the ancillas end up in `ρ_ab = ⟨⊗ₖ K_{bₖ}† K_{aₖ}⟩` and the fidelity
//! `⟨ψ̄|ρ|ψ̄⟩` is a linear functional of moments. Minimizing it over moment
//! matrices with a prescribed Bell value gives a certified lower bound.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::bell::{builtin, local_bound, GeneralBellExpression};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::math::{cos, sin};
use crate::moment::{MomentFunctional, MomentMatrixStructure, OperatorWord};
use crate::qubit::{apply_on_site, bell_operator, expectation, frame_unitary, hadamard, zx_observables, PlanarObservable, Pauli, StateVector};
use crate::sdp::{SdpConstraint, SdpEntry, SdpInstance, SdpSettings, SdpSolution, SdpSolver, SdpStatus, WarmStart};

pub use crate::qubit::rotation_for_angle;

/// Reference state, the inequality that self-tests it, and the settings
/// realizing the maximal violation.
#[derive(Clone, Debug)]
pub struct SwapTarget {
    name: String,
    /// Reference in the frame where every party measures `Z` then `X`.
    reference: StateVector,
    physical_state: StateVector,
    settings: Vec<[[f64; 3]; 2]>,
    inequality: GeneralBellExpression,
    baseline: f64,
    angle: Option<f64>,
}

fn planar_bloch(angle: f64) -> [f64; 3] {
    PlanarObservable::new(angle).bloch()
}

fn equatorial(angle: f64) -> [f64; 3] {
    [cos(angle), sin(angle), 0.0]
}

impl SwapTarget {
    /// Rotates `state` into the frame where party `k` measures
    /// `settings[k] = (a₁, a₂)` as `(Z, X)`.
    pub fn new(
        name: &str,
        state: StateVector,
        settings: Vec<[[f64; 3]; 2]>,
        inequality: GeneralBellExpression,
        baseline: f64,
    ) -> Result<Self> {
        let n = state.parties();
        if settings.len() != n {
            return Err(Error::WrongPartyCount { expected: n, found: settings.len() });
        }
        if inequality.parties() != n {
            return Err(Error::WrongPartyCount { expected: n, found: inequality.parties() });
        }
        let frames = settings.iter().map(|[a1, a2]| frame_unitary(*a1, *a2)).collect::<Result<Vec<_>>>()?;
        let reference = state.apply_local(&frames)?.fix_phase();
        let residue = reference.imaginary_residue();
        if residue > 1e-10 {
            return Err(Error::InvalidInput(format!("reference state is not real in the measurement frame ({residue:.2e})")));
        }
        let real: Vec<f64> = reference.amplitudes().iter().map(|a| a.re).collect();
        let reference = StateVector::from_real(n, &real)?;
        Ok(Self { name: name.to_string(), reference, physical_state: state, settings, inequality, baseline, angle: None })
    }

    fn planar_w(name: &str, inequality: GeneralBellExpression, phi: f64) -> Self {
        let pair = [planar_bloch(phi), planar_bloch(phi - FRAC_PI_2)];
        let mut t = Self::new(name, StateVector::w(), vec![pair; 3], inequality, 4.0 / 9.0).expect("static target");
        t.angle = Some(phi);
        t
    }

    /// Rotated W state with the `b1` inequality at its optimal angle.
    pub fn w_b1() -> Self {
        Self::planar_w("W/B1", builtin::w_b1().expand(), builtin::W_B1_PHI_OVER_PI * PI)
    }

    pub fn w_b2() -> Self {
        Self::planar_w("W/B2", builtin::w_b2().expand(), FRAC_PI_4)
    }

    pub fn w_b3() -> Self {
        Self::planar_w("W/B3", builtin::w_b3().expand(), FRAC_PI_4)
    }

    /// GHZ₃ with Mermin measured in `X`, `Y`.
    pub fn ghz3_mermin() -> Self {
        let pair = [equatorial(0.0), equatorial(FRAC_PI_2)];
        Self::new("GHZ3/Mermin", StateVector::ghz(3), vec![pair; 3], builtin::mermin3().expand(), 0.5).expect("static target")
    }

    /// GHZ₄ with MABK measured in the equatorial plane.
    pub fn ghz4_mabk() -> Self {
        let pair = [equatorial(-PI / 16.0), equatorial(7.0 * PI / 16.0)];
        Self::new("GHZ4/MABK", StateVector::ghz(4), vec![pair; 4], builtin::mabk4().expand(), 0.5).expect("static target")
    }

    /// Linear cluster state with the summed cluster inequalities.
    pub fn cluster_toth() -> Self {
        let (x, y, z) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        let settings = vec![[z, x], [y, z], [x, y], [[0.0, -1.0, 0.0], x]];
        Self::new("CL/Toth", StateVector::cluster(), settings, builtin::toth(), 0.25).expect("static target")
    }

    pub const NAMES: [&'static str; 6] = ["W", "W2", "W3", "GHZ3", "GHZ4", "CL"];

    /// `W` (with B1), `W2`, `W3`, `GHZ3`, `GHZ4`, `CL`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "W" | "W1" => Some(Self::w_b1()),
            "W2" => Some(Self::w_b2()),
            "W3" => Some(Self::w_b3()),
            "GHZ3" => Some(Self::ghz3_mermin()),
            "GHZ4" => Some(Self::ghz4_mabk()),
            "CL" => Some(Self::cluster_toth()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parties(&self) -> usize {
        self.reference.parties()
    }

    pub fn reference(&self) -> &StateVector {
        &self.reference
    }

    pub fn physical_state(&self) -> &StateVector {
        &self.physical_state
    }

    pub fn settings(&self) -> &[[[f64; 3]; 2]] {
        &self.settings
    }

    pub fn inequality(&self) -> &GeneralBellExpression {
        &self.inequality
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Measurement angle of planar targets.
    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    pub fn local_bound(&self) -> f64 {
        local_bound(&self.inequality).value.to_f64()
    }

    /// Bell value of the reference measured in `Z`, `X`.
    pub fn reference_value(&self) -> Result<f64> {
        expectation(&self.reference, &bell_operator(&self.inequality, &zx_observables(self.parties()))?)
    }
}

/// Per-party `K_b† K_a` as `(letters, coefficient)` pairs.
fn kraus_product(a: u8, b: u8) -> &'static [(&'static [u8], f64)] {
    match (a, b) {
        (0, 0) => &[(&[], 0.5), (&[1], 0.5)],
        (1, 1) => &[(&[], 0.5), (&[1], -0.5)],
        // K₀†K₁ = (A₂ − A₂A₁ + A₁A₂ − A₁A₂A₁)/4
        (1, 0) => &[(&[2], 0.25), (&[2, 1], -0.25), (&[1, 2], 0.25), (&[1, 2, 1], -0.25)],
        // K₁†K₀ = (A₂ + A₂A₁ − A₁A₂ − A₁A₂A₁)/4
        _ => &[(&[2], 0.25), (&[2, 1], 0.25), (&[1, 2], -0.25), (&[1, 2, 1], -0.25)],
    }
}

/// `⟨ψ̄|ρ_swap|ψ̄⟩` as a functional over moments.
pub fn fidelity_functional(reference: &StateVector) -> Result<MomentFunctional> {
    let n = reference.parties();
    if reference.imaginary_residue() > 1e-10 {
        return Err(Error::InvalidInput("fidelity functional needs a real reference state".into()));
    }
    let psi: Vec<f64> = reference.fix_phase().amplitudes().iter().map(|a| a.re).collect();
    let dim = 1usize << n;
    let mut f = MomentFunctional::new(n);
    for a in 0..dim {
        if psi[a] == 0.0 {
            continue;
        }
        for b in 0..dim {
            let weight = psi[a] * psi[b];
            if weight == 0.0 {
                continue;
            }
            // Expand ⊗ₖ K_{bₖ}†K_{aₖ} term by term.
            let mut terms: Vec<(Vec<Vec<u8>>, f64)> = vec![(Vec::new(), weight)];
            for k in 0..n {
                let bit = |x: usize| ((x >> (n - 1 - k)) & 1) as u8;
                let factors = kraus_product(bit(a), bit(b));
                let mut next = Vec::with_capacity(terms.len() * factors.len());
                for (letters, c) in &terms {
                    for (l, fc) in factors {
                        let mut ls = letters.clone();
                        ls.push(l.to_vec());
                        next.push((ls, c * fc));
                    }
                }
                terms = next;
            }
            for (letters, c) in terms {
                let refs: Vec<&[u8]> = letters.iter().map(|v| v.as_slice()).collect();
                f.add(&OperatorWord::from_party_letters(&refs)?, c);
            }
        }
    }
    Ok(f)
}

/// Applies `op` to `target` when `control` is `|1⟩`.
fn apply_controlled(amps: &[Complex64], sites: usize, control: usize, target: usize, op: &CMatrix) -> Vec<Complex64> {
    let applied = apply_on_site(amps, sites, target, op);
    let mask = 1usize << (sites - 1 - control);
    amps.iter().zip(&applied).enumerate().map(|(i, (a, b))| if i & mask != 0 { *b } else { *a }).collect()
}

/// Fidelity of the swapped-out ancillas with `reference`, by simulating the
/// circuits on box ⊗ ancilla (`2N` qubits).
pub fn simulate_swap_fidelity(reference: &StateVector, state: &StateVector, observables: &[[CMatrix; 2]]) -> Result<f64> {
    let n = state.parties();
    if reference.parties() != n || observables.len() != n {
        return Err(Error::WrongPartyCount { expected: n, found: observables.len() });
    }
    let sites = 2 * n;
    // Box qubits first, ancillas after, all ancillas in |0⟩.
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << sites];
    for (i, a) in state.amplitudes().iter().enumerate() {
        amps[i << n] = *a;
    }
    let h = hadamard();
    for k in 0..n {
        let anc = n + k;
        amps = apply_on_site(&amps, sites, anc, &h);
        amps = apply_controlled(&amps, sites, anc, k, &observables[k][0]);
        amps = apply_on_site(&amps, sites, anc, &h);
        amps = apply_controlled(&amps, sites, anc, k, &observables[k][1]);
    }
    // ρ_ab = Σ_box v[box, a] v̄[box, b]; F = Σ ψ̄_a* ρ_ab ψ̄_b = Σ_box |Σ_a ψ̄_a* v[box, a]|².
    let dim = 1usize << n;
    let psi = reference.amplitudes();
    let mut fidelity = 0.0;
    for bx in 0..dim {
        let s: Complex64 = (0..dim).map(|a| psi[a].conj() * amps[(bx << n) | a]).sum();
        fidelity += s.norm_sqr();
    }
    Ok(fidelity)
}

/// How the Bell value enters the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellConstraintMode {
    /// `B(Γ) = Q`.
    Equality,
    /// `B(Γ) ≥ Q`, through a nonnegative slack on an extra diagonal entry.
    AtLeast,
}

impl BellConstraintMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BellConstraintMode::Equality => "equality",
            BellConstraintMode::AtLeast => "at_least",
        }
    }
}

/// One solved point of a fidelity curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityPoint {
    pub q: f64,
    /// Certified lower bound on the fidelity (dual bound), or the primal
    /// value when no certificate is available.
    pub f: f64,
    pub primal: f64,
    pub certified: bool,
    pub status: SdpStatus,
    pub primal_residual: f64,
    pub relative_gap: f64,
    pub iterations: usize,
}

impl FidelityPoint {
    fn from_solution(q: f64, sol: &SdpSolution) -> Self {
        Self {
            q,
            f: sol.dual_bound.unwrap_or(sol.primal_objective),
            primal: sol.primal_objective,
            certified: sol.dual_bound.is_some(),
            status: sol.status,
            primal_residual: sol.primal_residual,
            relative_gap: sol.relative_gap(),
            iterations: sol.iterations,
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.status != SdpStatus::Optimal
    }
}

/// Minimum-fidelity program for one target, reusable across Bell values.
#[derive(Clone, Debug)]
pub struct FidelityProblem {
    solver: SdpSolver,
    bell_row: usize,
    mode: BellConstraintMode,
    order: usize,
    bell_abs_sum: f64,
}

impl FidelityProblem {
    pub fn new(target: &SwapTarget, structure: &MomentMatrixStructure, mode: BellConstraintMode) -> Result<Self> {
        let instance = fidelity_instance(target, structure, mode, 0.0)?;
        let bell_row = instance.constraints.len() - 1;
        let order = structure.order();
        let bell_abs_sum = target.inequality().float_terms().iter().map(|(_, c)| c.abs()).sum();
        Ok(Self { solver: SdpSolver::new(instance)?, bell_row, mode, order, bell_abs_sum })
    }

    pub fn instance(&self) -> &SdpInstance {
        self.solver.instance()
    }

    pub fn mode(&self) -> BellConstraintMode {
        self.mode
    }

    /// Sets the Bell value without solving (e.g. before exporting).
    pub fn set_bell_value(&mut self, q: f64) -> Result<()> {
        self.solver.set_rhs(self.bell_row, q)?;
        if self.mode == BellConstraintMode::AtLeast {
            // Moments are bounded by one, so the slack is at most Σ|c| − Q.
            let slack = (self.bell_abs_sum - q).max(0.0);
            self.solver.set_trace_bound(Some(self.order as f64 + slack));
        }
        Ok(())
    }

    pub fn solve(&mut self, q: f64, settings: &SdpSettings, warm: Option<&WarmStart>) -> Result<(FidelityPoint, WarmStart)> {
        self.set_bell_value(q)?;
        let (sol, ws) = self.solver.solve(settings, warm);
        Ok((FidelityPoint::from_solution(q, &sol), ws))
    }
}

/// The SDP `min F(Γ)` over `Γ ⪰ 0` with class ties, unit identity moment and
/// the Bell constraint last.
pub fn fidelity_instance(
    target: &SwapTarget,
    structure: &MomentMatrixStructure,
    mode: BellConstraintMode,
    q: f64,
) -> Result<SdpInstance> {
    if structure.parties() != target.parties() {
        return Err(Error::WrongPartyCount { expected: target.parties(), found: structure.parties() });
    }
    let fidelity = fidelity_functional(target.reference())?;
    let bell = MomentFunctional::from_bell(target.inequality())?;
    let mut inst = structure.sdp_instance(&fidelity, &[(bell, q)])?;
    if mode == BellConstraintMode::AtLeast {
        let n = inst.order;
        let bell_row = inst.constraints.pop().expect("bell row present");
        inst.order = n + 1;
        for i in 0..n {
            inst.constraints.push(SdpConstraint { entries: vec![SdpEntry::new(i, n, 0.5)], rhs: 0.0 });
        }
        let mut entries = bell_row.entries;
        entries.push(SdpEntry::new(n, n, -1.0));
        inst.constraints.push(SdpConstraint { entries, rhs: bell_row.rhs });
    }
    Ok(inst)
}

pub fn min_fidelity(
    target: &SwapTarget,
    q: f64,
    structure: &MomentMatrixStructure,
    mode: BellConstraintMode,
    settings: &SdpSettings,
) -> Result<FidelityPoint> {
    let mut problem = FidelityProblem::new(target, structure, mode)?;
    Ok(problem.solve(q, settings, None)?.0)
}

/// Minimal certified fidelity along a grid of Bell values.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityCurve {
    pub target: String,
    pub baseline: f64,
    pub level: String,
    pub mode: BellConstraintMode,
    pub rows: Vec<FidelityPoint>,
}

impl FidelityCurve {
    pub fn new(target: &SwapTarget, structure: &MomentMatrixStructure, mode: BellConstraintMode, mut rows: Vec<FidelityPoint>) -> Self {
        rows.sort_by(|a, b| a.q.total_cmp(&b.q));
        Self {
            target: target.name().to_string(),
            baseline: target.baseline(),
            level: structure.level().map_or_else(|| "custom".to_string(), |l| l.name().to_string()),
            mode,
            rows,
        }
    }

    /// Rows with a converged, certified value.
    pub fn solved(&self) -> impl Iterator<Item = &FidelityPoint> {
        self.rows.iter().filter(|r| r.status == SdpStatus::Optimal)
    }

    /// Largest drop between consecutive solved rows (0 when nondecreasing).
    pub fn max_decrease(&self) -> f64 {
        let solved: Vec<&FidelityPoint> = self.solved().collect();
        solved.windows(2).map(|w| (w[0].f - w[1].f).max(0.0)).fold(0.0, f64::max)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.max_decrease() <= tol
    }

    /// First grid value whose fidelity exceeds the baseline.
    pub fn baseline_crossing(&self) -> Option<f64> {
        self.solved().find(|r| r.f > self.baseline).map(|r| r.q)
    }

    pub fn has_flagged_rows(&self) -> bool {
        self.rows.iter().any(FidelityPoint::is_flagged)
    }
}

/// Sequential curve with warm starts between neighbouring points.
pub fn curve(
    target: &SwapTarget,
    grid: &[f64],
    structure: &MomentMatrixStructure,
    mode: BellConstraintMode,
    settings: &SdpSettings,
) -> Result<FidelityCurve> {
    let mut problem = FidelityProblem::new(target, structure, mode)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut warm: Option<WarmStart> = None;
    for &q in grid {
        let (point, ws) = problem.solve(q, settings, warm.as_ref())?;
        warm = (point.status == SdpStatus::Optimal).then_some(ws);
        rows.push(point);
    }
    Ok(FidelityCurve::new(target, structure, mode, rows))
}

/// `|⟨ψ̄|0…0⟩|²`, the fidelity of an all-zero product box.
pub fn product_zero_fidelity(reference: &StateVector) -> f64 {
    reference.amplitudes()[0].norm_sqr()
}

/// Observables `(Z, X)` conjugated by a common single-qubit unitary.
pub fn rotated_zx(parties: usize, u: &CMatrix) -> Vec<[CMatrix; 2]> {
    let ud = u.adjoint();
    (0..parties)
        .map(|_| [ud.mul(&Pauli::Z.matrix()).mul(u), ud.mul(&Pauli::X.matrix()).mul(u)])
        .collect()
}
