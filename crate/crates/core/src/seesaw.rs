//! See-saw search for large Bell values with qubit observables.
//!
//! Starting from random observables, alternate between the top eigenvector
//! of the Bell operator and, party by party, the observable that is optimal
//! for the current state and the other parties' observables. Both steps
//! never decrease the value.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::GeneralBellExpression;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::math::{atan2, cos, sin, sqrt};
use crate::qubit::{apply_on_site, bell_operator, bloch_operator, bloch_vector, frame_unitary, top_eigenpair, StateVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeesawConfig {
    pub num_seeds: usize,
    pub max_iters: usize,
    pub convergence_tol: f64,
    pub rng_seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { num_seeds: 50, max_iters: 500, convergence_tol: 1e-10, rng_seed: 0 }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_seeds == 0 || self.max_iters == 0 {
            return Err(Error::InvalidInput("seed and iteration counts must be positive".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidInput("convergence tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of one random start.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub seed_index: usize,
    pub value: f64,
    pub state: StateVector,
    pub observables: Vec<[CMatrix; 2]>,
    pub iterations: usize,
    /// Value after every half-step, starting with the first state update.
    pub history: Vec<f64>,
}

impl SeesawRun {
    /// Largest decrease between consecutive recorded values.
    pub fn max_decrease(&self) -> f64 {
        self.history.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max)
    }

    /// `(A₁, A₂)` as planar angles when every observable lies in the X–Z plane.
    pub fn planar_angles(&self, tol: f64) -> Option<Vec<(f64, f64)>> {
        self.observables
            .iter()
            .map(|[a, b]| Some((planar_angle(a, tol)?, planar_angle(b, tol)?)))
            .collect()
    }

    /// Same run in local frames where each party's first observable is `Z`
    /// and the second lies in the X–Z plane with a nonnegative X component.
    /// The state is rotated along, so the value is unchanged.
    pub fn canonical_frame(&self) -> Result<SeesawRun> {
        let frames = self.observables.iter().map(|[a, b]| canonical_unitary(a, b)).collect::<Result<Vec<_>>>()?;
        let observables = self
            .observables
            .iter()
            .zip(&frames)
            .map(|([a, b], v)| [conjugate(v, a), conjugate(v, b)])
            .collect();
        let state = self.state.apply_local(&frames)?;
        Ok(SeesawRun { state, observables, ..self.clone() })
    }
}

fn conjugate(v: &CMatrix, a: &CMatrix) -> CMatrix {
    v.mul(a).mul(&v.adjoint())
}

fn traceless_direction(a: &CMatrix) -> Option<[f64; 3]> {
    let v = bloch_vector(a);
    let n = sqrt(v.iter().map(|x| x * x).sum());
    ((a[(0, 0)] + a[(1, 1)]).norm() < 1e-9 && n > 1e-9).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Unitary taking `a` to `Z` and `b` into the X–Z plane; identity when
/// neither observable has a direction (both `±𝟙`).
fn canonical_unitary(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (z, other) = match (traceless_direction(a), traceless_direction(b)) {
        (Some(z), other) => (z, other),
        (None, Some(z)) => (z, None),
        (None, None) => return Ok(CMatrix::identity(2)),
    };
    let dot = |u: [f64; 3], w: [f64; 3]| u.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>();
    let perp = |w: [f64; 3]| {
        let d = dot(w, z);
        [w[0] - d * z[0], w[1] - d * z[1], w[2] - d * z[2]]
    };
    let mut x = other.map(perp).unwrap_or([0.0; 3]);
    if dot(x, x) < 1e-18 {
        // Parallel or missing second direction: any perpendicular axis.
        let e = if z[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        x = perp(e);
    }
    frame_unitary(z, x)
}

/// Angle `θ` with `A = cos θ Z + sin θ X`, if `A` is of that form.
pub fn planar_angle(a: &CMatrix, tol: f64) -> Option<f64> {
    let v = bloch_vector(a);
    let trace = a[(0, 0)] + a[(1, 1)];
    if trace.norm() > tol || v[1].abs() > tol || a[(0, 1)].im.abs() > tol {
        return None;
    }
    Some(atan2(v[0], v[2]))
}

fn random_observable(rng: &mut ChaCha8Rng) -> CMatrix {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = sqrt((1.0 - z * z).max(0.0));
    bloch_operator([r * cos(phi), r * sin(phi), z])
}

/// `sign(E)` of a 2×2 Hermitian matrix, zero eigenvalues mapped to `+1`.
fn polar_sign(e: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(e);
    let mut out = CMatrix::zeros(2);
    for (lam, v) in values.iter().zip(&vectors) {
        let s = if *lam >= 0.0 { 1.0 } else { -1.0 };
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] += v[i] * v[j].conj() * s;
            }
        }
    }
    // Clean rounding so the result is exactly Hermitian.
    let adj = out.adjoint();
    out.add_scaled(&adj, Complex64::new(1.0, 0.0));
    out.scale(Complex64::new(0.5, 0.0))
}

/// Effective operator of `(party, setting)`: `⟨ψ|B|ψ⟩ = Tr(A E) + const`.
fn effective_operator(
    g: &GeneralBellExpression,
    state: &StateVector,
    observables: &[[CMatrix; 2]],
    party: usize,
    setting: u8,
) -> CMatrix {
    let n = g.parties();
    let psi = state.amplitudes();
    let stride = 1usize << (n - 1 - party);
    let mut r = CMatrix::zeros(2);
    for (settings, c) in g.terms() {
        if settings[party] != setting {
            continue;
        }
        let mut phi = psi.to_vec();
        for (j, &s) in settings.iter().enumerate() {
            if j != party && s != 0 {
                phi = apply_on_site(&phi, n, j, &observables[j][usize::from(s - 1)]);
            }
        }
        let c = c.to_f64();
        // R_ba = Σ_rest ψ̄[rest, a] φ[rest, b]
        for base in 0..psi.len() {
            if base & stride != 0 {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    let ia = base | (a * stride);
                    let ib = base | (b * stride);
                    r[(b, a)] += psi[ia].conj() * phi[ib] * c;
                }
            }
        }
    }
    let adj = r.adjoint();
    r.add_scaled(&adj, Complex64::new(1.0, 0.0));
    r.scale(Complex64::new(0.5, 0.0))
}

fn value_of(g: &GeneralBellExpression, state: &StateVector, observables: &[[CMatrix; 2]]) -> Result<f64> {
    crate::qubit::expectation(state, &bell_operator(g, observables)?)
}

/// Runs one random start, seeded by `cfg.rng_seed + seed_index`.
pub fn seesaw_run(g: &GeneralBellExpression, cfg: &SeesawConfig, seed_index: usize) -> Result<SeesawRun> {
    let n = g.parties();
    if n == 0 || n > 4 {
        return Err(Error::InvalidInput("see-saw supports one to four parties".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(seed_index as u64));
    let mut observables: Vec<[CMatrix; 2]> = (0..n).map(|_| [random_observable(&mut rng), random_observable(&mut rng)]).collect();
    let mut history = Vec::new();
    let mut state;
    let mut value;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (top, v) = top_eigenpair(&bell_operator(g, &observables)?);
        state = v;
        value = top;
        let before = history.last().copied();
        history.push(value);
        for k in 0..n {
            for x in 0..2u8 {
                let e = effective_operator(g, &state, &observables, k, x + 1);
                observables[k][usize::from(x)] = polar_sign(&e);
            }
        }
        value = value_of(g, &state, &observables)?;
        history.push(value);
        let converged = before.is_some_and(|b| value - b < cfg.convergence_tol);
        if converged || iterations >= cfg.max_iters {
            break;
        }
    }
    let (top, v) = top_eigenpair(&bell_operator(g, &observables)?);
    if top >= value {
        state = v;
        value = top;
        history.push(value);
    }
    Ok(SeesawRun { seed_index, value, state, observables, iterations, history })
}

/// Largest value, ties broken by the lower seed index.
pub fn best_run(runs: Vec<SeesawRun>) -> Option<SeesawRun> {
    runs.into_iter().reduce(|best, r| if r.value > best.value { r } else { best })
}

pub fn seesaw_optimize(g: &GeneralBellExpression, cfg: &SeesawConfig) -> Result<SeesawRun> {
    cfg.validate()?;
    let runs = (0..cfg.num_seeds).map(|i| seesaw_run(g, cfg, i)).collect::<Result<Vec<_>>>()?;
    Ok(best_run(runs).expect("at least one seed"))
}
