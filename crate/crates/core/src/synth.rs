//! Linear-programming synthesis of three-party PI Bell inequalities that are
//! maximally violated by the W state.
//!
//! Both parties' settings are orthogonal planar observables at angles `φ`
//! and `φ − π/2`. The Bell operator is written in two bases: over the
//! setting correlators with coefficients `b`, and over Pauli correlators
//! (`Z`, `X`) with coefficients `η = R(φ)·b`. The program maximizes
//! `⟨W|B|W⟩ = η₁ − η₃ + 2η₅ − η₆ + 2η₈` subject to the local bound
//! `Σᵢ E_{λ,i} bᵢ ≤ 1` for every strategy class, three conditions that make
//! `|W⟩` an eigenvector, and one stationarity condition in `φ`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bell::{local_bound, strategy_classes, symmetrized_components3, Coeff, PIBellExpression};
use crate::error::{Error, Result};
use crate::exact::Rad2;
use crate::linalg::Matrix;
use crate::lp::{LinearProgram, LpScalar, LpSolution, LpStatus, VarBound};
use crate::math::{cos, sin, sqrt};
use crate::qubit::{bell_operator, expectation, planar_observables, spectrum, StateVector};

/// `⟨W|B|W⟩` as a row over `η`.
pub const W_VALUE_ROW: [i64; 9] = [1, 0, -1, 0, 2, -1, 0, 2, 0];

/// Rows over `η` that vanish iff `|W⟩` is an eigenvector: the overlaps with
/// `|W̄⟩`, `|000⟩` and `|111⟩`, up to positive factors.
pub const EIGENSTATE_ROWS: [[i64; 9]; 3] =
    [[0, 2, 0, 0, 0, 0, -2, 0, 1], [0, 1, 0, 2, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0, 0, -1, 0]];

fn int<T: LpScalar>(k: i64) -> T {
    let mut out = T::zero();
    let one = T::one();
    for _ in 0..k.unsigned_abs() {
        out = out.add(&one);
    }
    if k < 0 {
        out.neg()
    } else {
        out
    }
}

/// `R(c, s)` with `ηᵢ = Σⱼ Rᵢⱼ bⱼ`, over any scalar field.
pub fn r_table<T: LpScalar>(c: &T, s: &T) -> Vec<Vec<T>> {
    let z = T::zero();
    let m = |a: &T, b: &T| a.mul(b);
    let (c2, s2, sc) = (m(c, c), m(s, s), m(s, c));
    let (c3, s3) = (m(&c2, c), m(&s2, s));
    let (sc2, s2c) = (m(s, &c2), m(&s2, c));
    let k = |v: i64, x: &T| int::<T>(v).mul(x);
    let c2ms2 = c2.sub(&s2);
    let c_c2m2s2 = c.mul(&c2.sub(&k(2, &s2)));
    let s_s2m2c2 = s.mul(&s2.sub(&k(2, &c2)));
    vec![
        vec![c.clone(), s.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![s.clone(), c.neg(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), c2.clone(), k(2, &sc), s2.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), sc.clone(), c2ms2.neg(), sc.neg(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), s2.clone(), k(-2, &sc), c2.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), c3.clone(), k(3, &sc2), k(3, &s2c), s3.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), sc2.clone(), c_c2m2s2.neg(), s_s2m2c2.clone(), s2c.neg()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), s2c.clone(), s_s2m2c2.clone(), c_c2m2s2.clone(), sc2.clone()],
        vec![z.clone(), z.clone(), z.clone(), z.clone(), z, s3, k(-3, &s2c), k(3, &sc2), c3.neg()],
    ]
}

/// The 9×9 matrix `R(φ)`.
pub fn r_matrix(phi: f64) -> Matrix {
    let t = r_table(&cos(phi), &sin(phi));
    Matrix::from_rows(9, 9, t.into_iter().flatten().collect())
}

pub fn eigenstate_constraints() -> Matrix {
    Matrix::from_rows(3, 9, EIGENSTATE_ROWS.iter().flatten().map(|&x| x as f64).collect())
}

fn stationarity_row_generic<T: LpScalar>(c: &T, s: &T) -> Vec<T> {
    let sc = s.mul(c);
    let k = |v: i64, x: &T| int::<T>(v).mul(x);
    let d = k(4, &c.mul(c).sub(&s.mul(s)));
    vec![sc.neg(), T::zero(), k(2, &sc), d.clone(), k(4, &sc), k(3, &sc), d, k(2, &sc), T::zero()]
}

/// `sc(−η₁ + 2η₃ + 4η₅ + 3η₆ + 2η₈) + 4(c² − s²)(η₄ + η₇)` as a row over `η`.
pub fn stationarity_constraint(phi: f64) -> [f64; 9] {
    let row = stationarity_row_generic(&cos(phi), &sin(phi));
    let mut out = [0.0; 9];
    out.copy_from_slice(&row);
    out
}

fn derivative_rows_generic<T: LpScalar>(c: &T, s: &T) -> [Vec<T>; 2] {
    let k = |v: i64, x: &T| int::<T>(v).mul(x);
    let (c2, s2, sc) = (c.mul(c), s.mul(s), s.mul(c));
    let z = T::zero();
    // ∂/∂δ₁
    let r1 = vec![
        s.neg(),
        z.clone(),
        k(6, &sc),
        k(2, &s2.sub(&k(2, &c2))),
        z.clone(),
        s.mul(&k(7, &c2).sub(&k(2, &s2))),
        k(2, c).mul(&k(7, &s2).sub(&k(2, &c2))),
        k(3, s).mul(&s2.sub(&k(2, &c2))),
        z.clone(),
    ];
    // ∂/∂δ₂
    let r2 = vec![
        z.clone(),
        c.clone(),
        z.clone(),
        k(2, &k(2, &s2).sub(&c2)),
        k(-6, &sc),
        z,
        k(3, c).mul(&k(2, &s2).sub(&c2)),
        k(2, s).mul(&k(2, &s2).sub(&k(7, &c2))),
        c.mul(&k(2, &c2).sub(&k(7, &s2))),
    ];
    [r1, r2]
}

/// The two first-order conditions in the angle perturbations, as rows over `b`.
pub fn derivative_constraints_b(phi: f64) -> Matrix {
    let [r1, r2] = derivative_rows_generic(&cos(phi), &sin(phi));
    Matrix::from_rows(2, 9, r1.into_iter().chain(r2).collect())
}

/// How the angle-optimality condition enters the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Stationarity {
    /// The single combined row over `η`.
    #[default]
    Combined,
    /// Both perturbation derivatives as rows over `b`.
    Derivatives,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SynthesisOptions {
    /// Forces `b₁ = b₂ = 0` and `η₁ = η₂ = 0`.
    pub no_marginals: bool,
    /// Forces invariance under exchanging settings 1 and 2:
    /// `b₁ = b₂`, `b₃ = b₅`, `b₆ = b₉`, `b₇ = b₈`.
    pub setting_symmetric: bool,
    pub stationarity: Stationarity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthesisStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthesisFlag {
    /// `Q ≤ L`: the program found no violation.
    NoViolation,
    /// `⟨W|B|W⟩` is below the top eigenvalue of the Bell operator.
    EigenstateNotMaximal,
}

/// Exact optimum at `φ = π/4`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSynthesis {
    pub q: Rad2,
    pub b: Vec<Rad2>,
    pub eta: Vec<Rad2>,
    pub dual_objective: Rad2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub phi: f64,
    pub options: SynthesisOptions,
    pub status: SynthesisStatus,
    pub b: PIBellExpression,
    pub eta: [f64; 9],
    /// Quantum value `⟨W|B|W⟩`; with the local bound fixed to 1 this is `Q/L`.
    pub q: f64,
    /// Local bound of `b` recomputed by enumeration.
    pub local_bound: f64,
    /// Top eigenvalue of the Bell operator at the synthesis angles.
    pub top_eigenvalue: f64,
    pub flags: Vec<SynthesisFlag>,
    pub primal_residual: f64,
    pub duality_gap: f64,
    pub exact: Option<ExactSynthesis>,
}

impl SynthesisResult {
    pub fn q_over_l(&self) -> f64 {
        match self.status {
            SynthesisStatus::Feasible => self.q / self.local_bound,
            SynthesisStatus::Infeasible => 1.0,
        }
    }

    pub fn is_flagged(&self) -> bool {
        self.status == SynthesisStatus::Infeasible || !self.flags.is_empty()
    }
}

/// Variables: `b₁…b₉` then `η₁…η₉`, all free.
fn build_lp<T: LpScalar>(c: &T, s: &T, opts: &SynthesisOptions) -> LinearProgram<T> {
    let mut lp = LinearProgram::<T>::new(18);
    lp.bounds = vec![VarBound::Free; 18];
    for (j, &v) in W_VALUE_ROW.iter().enumerate() {
        lp.objective[9 + j] = int(v);
    }
    for (strategy, _) in strategy_classes(3) {
        let e = symmetrized_components3(&strategy).expect("three parties");
        let mut row = vec![T::zero(); 18];
        for (j, &v) in e.iter().enumerate() {
            row[j] = int(v);
        }
        lp.inequalities.push((row, T::one()));
    }
    let r = r_table(c, s);
    for (i, ri) in r.iter().enumerate() {
        let mut row = vec![T::zero(); 18];
        for (j, v) in ri.iter().enumerate() {
            row[j] = v.clone();
        }
        row[9 + i] = T::one().neg();
        lp.equalities.push((row, T::zero()));
    }
    let over_eta = |coeffs: &[T]| {
        let mut row = vec![T::zero(); 18];
        for (j, v) in coeffs.iter().enumerate() {
            row[9 + j] = v.clone();
        }
        row
    };
    for er in EIGENSTATE_ROWS {
        let coeffs: Vec<T> = er.iter().map(|&v| int(v)).collect();
        lp.equalities.push((over_eta(&coeffs), T::zero()));
    }
    match opts.stationarity {
        Stationarity::Combined => {
            lp.equalities.push((over_eta(&stationarity_row_generic(c, s)), T::zero()));
        }
        Stationarity::Derivatives => {
            for d in derivative_rows_generic(c, s) {
                let mut row = d;
                row.resize(18, T::zero());
                lp.equalities.push((row, T::zero()));
            }
        }
    }
    let unit = |idx: usize| {
        let mut row = vec![T::zero(); 18];
        row[idx] = T::one();
        row
    };
    if opts.no_marginals {
        for idx in [0, 1, 9, 10] {
            lp.equalities.push((unit(idx), T::zero()));
        }
    }
    if opts.setting_symmetric {
        for (a, b) in [(0, 1), (2, 4), (5, 8), (6, 7)] {
            let mut row = unit(a);
            row[b] = T::one().neg();
            lp.equalities.push((row, T::zero()));
        }
    }
    lp
}

fn check_phi(phi: f64) -> Result<()> {
    if !(-1e-12..=PI / 4.0 + 1e-12).contains(&phi) {
        return Err(Error::InvalidInput(alloc::format!("φ = {phi} outside [0, π/4]")));
    }
    Ok(())
}

/// Solves the synthesis program at angle `phi` in floating point.
pub fn synthesize(phi: f64, opts: SynthesisOptions) -> Result<SynthesisResult> {
    check_phi(phi)?;
    let lp = build_lp(&cos(phi), &sin(phi), &opts);
    let sol = lp.solve()?;
    finish(phi, opts, &lp, &sol, None)
}

/// Solves the program at `φ = π/4` over ℚ(√2), then reports the float view
/// alongside the exact optimum.
pub fn synthesize_exact(opts: SynthesisOptions) -> Result<SynthesisResult> {
    let half_root2 = Rad2::from_parts(0, 1, 1, 2);
    let lp = build_lp(&half_root2, &half_root2, &opts);
    let sol = lp.solve()?;
    let exact = match sol.status {
        LpStatus::Optimal => Some(ExactSynthesis {
            q: sol.objective.clone(),
            b: sol.primal[..9].to_vec(),
            eta: sol.primal[9..].to_vec(),
            dual_objective: lp.dual_objective(&sol),
        }),
        _ => None,
    };
    let flp = build_lp(&cos(PI / 4.0), &sin(PI / 4.0), &opts);
    let fsol = LpSolution {
        status: sol.status,
        objective: sol.objective.to_f64(),
        primal: sol.primal.iter().map(Rad2::to_f64).collect(),
        dual_inequalities: sol.dual_inequalities.iter().map(Rad2::to_f64).collect(),
        dual_equalities: sol.dual_equalities.iter().map(Rad2::to_f64).collect(),
        pivots: sol.pivots,
    };
    let mut out = finish(PI / 4.0, opts, &flp, &fsol, exact)?;
    if let Some(ex) = &out.exact {
        let coeffs = ex.b.iter().cloned().map(Coeff::Exact).collect();
        out.b = PIBellExpression::new(3, coeffs)?;
    }
    Ok(out)
}

fn finish(
    phi: f64,
    opts: SynthesisOptions,
    lp: &LinearProgram<f64>,
    sol: &LpSolution<f64>,
    exact: Option<ExactSynthesis>,
) -> Result<SynthesisResult> {
    match sol.status {
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Infeasible => {
            return Ok(SynthesisResult {
                phi,
                options: opts,
                status: SynthesisStatus::Infeasible,
                b: PIBellExpression::from_f64(3, &[0.0; 9])?,
                eta: [0.0; 9],
                q: 0.0,
                local_bound: 1.0,
                top_eigenvalue: 0.0,
                flags: Vec::new(),
                primal_residual: 0.0,
                duality_gap: 0.0,
                exact,
            })
        }
        LpStatus::Optimal => {}
    }
    let b: Vec<f64> = sol.primal[..9].to_vec();
    let mut eta = [0.0; 9];
    eta.copy_from_slice(&sol.primal[9..]);
    let q = W_VALUE_ROW.iter().zip(&eta).map(|(&w, e)| w as f64 * e).sum::<f64>();
    let b_expr = PIBellExpression::from_f64(3, &b)?;
    let local = local_bound(&b_expr.expand()).value.to_f64();
    let op = bell_operator(&b_expr.expand(), &planar_observables(&[(phi, phi - PI / 2.0); 3]))?;
    let w_energy = expectation(&StateVector::w(), &op)?;
    let top = *spectrum(&op).last().expect("nonempty spectrum");
    let mut flags = Vec::new();
    if q / local <= 1.0 + 1e-9 {
        flags.push(SynthesisFlag::NoViolation);
    }
    if w_energy < top - 1e-9 * top.abs().max(1.0) {
        flags.push(SynthesisFlag::EigenstateNotMaximal);
    }
    Ok(SynthesisResult {
        phi,
        options: opts,
        status: SynthesisStatus::Feasible,
        b: b_expr,
        eta,
        q,
        local_bound: local,
        top_eigenvalue: top,
        flags,
        primal_residual: lp.primal_residual(&sol.primal),
        duality_gap: (lp.dual_objective(sol) - sol.objective).abs(),
        exact,
    })
}

/// `⟨W|B(φ₁, φ₂)|W⟩` by dense algebra, with every party measuring at
/// `(φ₁, φ₂)`.
pub fn w_expectation(b: &PIBellExpression, phi1: f64, phi2: f64) -> Result<f64> {
    let op = bell_operator(&b.expand(), &planar_observables(&[(phi1, phi2); 3]))?;
    expectation(&StateVector::w(), &op)
}

/// One row of a φ-scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub phi: f64,
    pub q_over_l: f64,
    pub status: SynthesisStatus,
    pub flags: Vec<SynthesisFlag>,
}

impl From<&SynthesisResult> for ScanPoint {
    fn from(r: &SynthesisResult) -> Self {
        Self { phi: r.phi, q_over_l: r.q_over_l(), status: r.status, flags: r.flags.clone() }
    }
}

/// `n` uniform points over `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn scan(grid: &[f64], opts: SynthesisOptions) -> Result<Vec<ScanPoint>> {
    grid.iter().map(|&phi| synthesize(phi, opts).map(|r| ScanPoint::from(&r))).collect()
}

/// Golden-section search for the largest `Q/L` on `[lo, hi]`.
pub fn refine_peak(lo: f64, hi: f64, tol: f64, opts: SynthesisOptions) -> Result<SynthesisResult> {
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let f = |x: f64| synthesize(x, opts).map(|r| r.q_over_l());
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    synthesize((a + b) / 2.0, opts)
}
