//! Dense two-phase simplex: Bland's rule in exact arithmetic; in floating
//! point a two-pass ratio test and a final rebuild of the tableau from the data.
//!
//! The solver is generic over [`LpScalar`], implemented for `f64` (with a
//! pivot tolerance) and for [`Rad2`] (exact). Problems are stated as
//!
//! ```text
//! maximize  c·x   subject to   A x ≤ a,   B x = b,   xⱼ ≥ 0 or free.
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::exact::Rad2;

/// Ordered field used by the simplex tableau.
pub trait LpScalar: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Strictly positive beyond the pivot tolerance.
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool {
        self.neg().is_positive()
    }
    fn is_negligible(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }
    fn less_than(&self, other: &Self) -> bool {
        other.sub(self).is_positive()
    }
    fn to_f64(&self) -> f64;
    /// Whether the tableau drifts from the data and should be rebuilt from
    /// the final basis.
    const INEXACT: bool = false;
}

/// Pivot and feasibility tolerance of the floating-point simplex.
pub const F64_EPS: f64 = 1e-11;

impl LpScalar for f64 {
    const INEXACT: bool = true;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_positive(&self) -> bool {
        *self > F64_EPS
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for Rad2 {
    fn zero() -> Self {
        Rad2::zero()
    }
    fn one() -> Self {
        Rad2::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_positive(&self) -> bool {
        self.signum() == core::cmp::Ordering::Greater
    }
    fn to_f64(&self) -> f64 {
        Rad2::to_f64(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub inequalities: Vec<(Vec<T>, T)>,
    pub equalities: Vec<(Vec<T>, T)>,
    pub bounds: Vec<VarBound>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub objective: T,
    pub primal: Vec<T>,
    /// Multipliers of the inequality rows (nonnegative at optimum).
    pub dual_inequalities: Vec<T>,
    /// Multipliers of the equality rows.
    pub dual_equalities: Vec<T>,
    pub pivots: usize,
}

impl<T: LpScalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![T::zero(); num_vars],
            inequalities: Vec::new(),
            equalities: Vec::new(),
            bounds: vec![VarBound::NonNegative; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.bounds.len() });
        }
        for (row, _) in self.inequalities.iter().chain(&self.equalities) {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn primal_residual(&self, x: &[T]) -> f64 {
        let dot = |row: &[T]| row.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
        let mut worst: f64 = 0.0;
        for (row, rhs) in &self.inequalities {
            worst = worst.max(dot(row).sub(rhs).to_f64());
        }
        for (row, rhs) in &self.equalities {
            worst = worst.max(dot(row).sub(rhs).to_f64().abs());
        }
        for (xj, b) in x.iter().zip(&self.bounds) {
            if *b == VarBound::NonNegative {
                worst = worst.max(-xj.to_f64());
            }
        }
        worst
    }

    /// `a·y_ineq + b·y_eq`, the dual objective.
    pub fn dual_objective(&self, sol: &LpSolution<T>) -> T {
        let mut total = T::zero();
        for ((_, rhs), y) in self.inequalities.iter().zip(&sol.dual_inequalities) {
            total = total.add(&rhs.mul(y));
        }
        for ((_, rhs), y) in self.equalities.iter().zip(&sol.dual_equalities) {
            total = total.add(&rhs.mul(y));
        }
        total
    }

    /// Largest violation of dual feasibility: `Aᵀy + Bᵀz ≥ c` (equality for
    /// free variables) and `y ≥ 0`.
    pub fn dual_residual(&self, sol: &LpSolution<T>) -> f64 {
        let n = self.num_vars();
        let mut worst: f64 = 0.0;
        for y in &sol.dual_inequalities {
            worst = worst.max(-y.to_f64());
        }
        for j in 0..n {
            let mut s = self.objective[j].neg();
            for ((row, _), y) in self.inequalities.iter().zip(&sol.dual_inequalities) {
                s = s.add(&row[j].mul(y));
            }
            for ((row, _), z) in self.equalities.iter().zip(&sol.dual_equalities) {
                s = s.add(&row[j].mul(z));
            }
            let v = s.to_f64();
            worst = worst.max(match self.bounds[j] {
                VarBound::NonNegative => -v,
                VarBound::Free => v.abs(),
            });
        }
        worst
    }

    pub fn solve(&self) -> Result<LpSolution<T>> {
        self.validate()?;
        Tableau::build(self).run(self)
    }
}

struct Tableau<T> {
    /// `m` constraint rows followed by the objective row; last column is the RHS.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Structural columns, then slacks, then artificials from here on.
    first_artificial: usize,
    width: usize,
    /// Column whose original coefficients form `e_i` for row `i`.
    unit_col: Vec<usize>,
    /// `-1` when row `i` was negated to make its RHS nonnegative.
    flipped: Vec<bool>,
    /// Structural column(s) of each original variable: `(plus, minus)`.
    var_cols: Vec<(usize, Option<usize>)>,
    pivots: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let n = lp.num_vars();
        let mut var_cols = Vec::with_capacity(n);
        let mut col = 0;
        for b in &lp.bounds {
            match b {
                VarBound::NonNegative => {
                    var_cols.push((col, None));
                    col += 1;
                }
                VarBound::Free => {
                    var_cols.push((col, Some(col + 1)));
                    col += 2;
                }
            }
        }
        let n_struct = col;
        let m_le = lp.inequalities.len();
        let m_eq = lp.equalities.len();
        let m = m_le + m_eq;
        let first_slack = n_struct;
        let first_artificial = first_slack + m_le;
        // One artificial per row that has no usable slack.
        let mut flipped = vec![false; m];
        let mut needs_artificial = vec![false; m];
        for (i, (_, rhs)) in lp.inequalities.iter().enumerate() {
            if rhs.is_negative() {
                flipped[i] = true;
                needs_artificial[i] = true;
            }
        }
        for (k, (_, rhs)) in lp.equalities.iter().enumerate() {
            flipped[m_le + k] = rhs.is_negative();
            needs_artificial[m_le + k] = true;
        }
        let n_art = needs_artificial.iter().filter(|&&x| x).count();
        let width = first_artificial + n_art + 1;
        let mut rows = vec![vec![T::zero(); width]; m + 1];
        let mut basis = vec![0; m];
        let mut unit_col = vec![0; m];
        let mut art = first_artificial;
        for i in 0..m {
            let (coeffs, rhs) = if i < m_le { &lp.inequalities[i] } else { &lp.equalities[i - m_le] };
            let sign = |v: &T| if flipped[i] { v.neg() } else { v.clone() };
            for (j, a) in coeffs.iter().enumerate() {
                let (p, q) = var_cols[j];
                rows[i][p] = sign(a);
                if let Some(q) = q {
                    rows[i][q] = sign(&a.neg());
                }
            }
            rows[i][width - 1] = sign(rhs);
            if i < m_le {
                rows[i][first_slack + i] = sign(&T::one());
            }
            if needs_artificial[i] {
                rows[i][art] = T::one();
                basis[i] = art;
                unit_col[i] = art;
                art += 1;
            } else {
                basis[i] = first_slack + i;
                unit_col[i] = first_slack + i;
            }
        }
        Self { rows, basis, first_artificial, width, unit_col, flipped, var_cols, pivots: 0 }
    }

    /// A fresh tableau with `basis` brought in by Gauss-Jordan elimination
    /// with partial pivoting, or `None` when that basis is singular or no
    /// longer feasible on the original data.
    fn reinvert(lp: &LinearProgram<T>, basis: &[usize]) -> Option<Self> {
        let mut t = Self::build(lp);
        let m = t.m();
        let rhs = t.width - 1;
        let mut placed = vec![false; m];
        let first_artificial = t.first_artificial;
        for &col in basis.iter().filter(|&&c| c < first_artificial) {
            let r = (0..m)
                .filter(|&i| !placed[i])
                .max_by(|&a, &b| t.rows[a][col].to_f64().abs().total_cmp(&t.rows[b][col].to_f64().abs()))?;
            if t.rows[r][col].is_negligible() {
                return None;
            }
            t.pivot(r, col);
            placed[r] = true;
        }
        let feasible = (0..m).all(|i| {
            let v = t.rows[i][rhs].to_f64();
            if t.basis[i] >= t.first_artificial {
                v.abs() <= 1e3 * F64_EPS
            } else {
                v >= -1e3 * F64_EPS
            }
        });
        feasible.then_some(t)
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.div(&p);
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c].clone();
            if f == T::zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if *pv != T::zero() {
                    *v = v.sub(&f.mul(pv));
                }
            }
            // Keep the pivot column exact.
            row[c] = T::zero();
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Sets the objective row to reduced costs of `cost` (to be maximized):
    /// row = c_B B⁻¹ A − c, so a negative entry means the column improves.
    fn price(&mut self, cost: &[T]) {
        let m = self.m();
        let mut obj: Vec<T> = cost.iter().map(|c| c.neg()).collect();
        obj.push(T::zero());
        for i in 0..m {
            let cb = &cost[self.basis[i]];
            if *cb == T::zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.rows[i]) {
                *o = o.add(&cb.mul(v));
            }
        }
        self.rows[m] = obj;
    }

    /// Two-pass ratio test: the bound is relaxed by the feasibility
    /// tolerance, then the largest pivot within that bound wins. Small
    /// pivots are what make the tableau drift.
    fn harris_row(&self, c: usize) -> Option<usize> {
        let rhs = self.width - 1;
        let slack = 1e2 * F64_EPS;
        let candidates = || (0..self.m()).filter(move |&i| self.rows[i][c].is_positive());
        let bound = candidates()
            .map(|i| (self.rows[i][rhs].to_f64().max(0.0) + slack) / self.rows[i][c].to_f64())
            .fold(f64::INFINITY, f64::min);
        candidates()
            .filter(|&i| self.rows[i][rhs].to_f64().max(0.0) / self.rows[i][c].to_f64() <= bound)
            .max_by(|&a, &b| self.rows[a][c].to_f64().total_cmp(&self.rows[b][c].to_f64()).then(self.basis[b].cmp(&self.basis[a])))
    }

    /// Bland's rule iterations; `allowed` bounds the entering columns.
    fn optimize(&mut self, allowed: usize) -> LpStatus {
        let m = self.m();
        let rhs = self.width - 1;
        loop {
            let entering = (0..allowed).find(|&j| self.rows[m][j].is_negative());
            let Some(c) = entering else {
                return LpStatus::Optimal;
            };
            if T::INEXACT {
                match self.harris_row(c) {
                    None => return LpStatus::Unbounded,
                    Some(r) => self.pivot(r, c),
                }
                continue;
            }
            let mut leave: Option<(usize, T)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rows[i][rhs].div(a);
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio.less_than(&br) || (!br.less_than(&ratio) && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match leave {
                None => return LpStatus::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
        let m = self.m();
        let rhs = self.width - 1;
        let n_cols = self.width - 1;
        let infeasible = |pivots| LpSolution {
            status: LpStatus::Infeasible,
            objective: T::zero(),
            primal: vec![T::zero(); lp.num_vars()],
            dual_inequalities: vec![T::zero(); lp.inequalities.len()],
            dual_equalities: vec![T::zero(); lp.equalities.len()],
            pivots,
        };
        if self.first_artificial < n_cols {
            // Phase 1: maximize −Σ artificials.
            let mut cost = vec![T::zero(); n_cols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = T::one().neg();
            }
            self.price(&cost);
            if self.optimize(n_cols) == LpStatus::Unbounded {
                return Err(Error::Numerical("phase-one objective unbounded".into()));
            }
            let phase1 = self.rows[m][rhs].clone();
            if phase1.is_negative() {
                return Ok(infeasible(self.pivots));
            }
            // Drive zero-level artificials out of the basis where possible.
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(c) = (0..self.first_artificial).find(|&j| !self.rows[i][j].is_negligible()) {
                        self.pivot(i, c);
                    }
                }
            }
        }
        // Phase 2.
        let mut cost = vec![T::zero(); n_cols];
        for (j, &(p, q)) in self.var_cols.iter().enumerate() {
            cost[p] = lp.objective[j].clone();
            if let Some(q) = q {
                cost[q] = lp.objective[j].neg();
            }
        }
        self.price(&cost);
        let mut status = self.optimize(self.first_artificial);
        // Rounding builds up along the pivot path. Rebuild the tableau from
        // the data at the final basis and keep pivoting until the fresh
        // reduced costs agree that it is optimal.
        if T::INEXACT {
            for _ in 0..4 {
                if status != LpStatus::Optimal {
                    break;
                }
                let Some(mut fresh) = Self::reinvert(lp, &self.basis) else {
                    break;
                };
                fresh.pivots += self.pivots;
                fresh.price(&cost);
                let before = fresh.pivots;
                status = fresh.optimize(fresh.first_artificial);
                let settled = fresh.pivots == before;
                self = fresh;
                if settled {
                    break;
                }
            }
        }
        if status == LpStatus::Unbounded {
            return Ok(LpSolution { status, ..infeasible(self.pivots) });
        }
        let mut values = vec![T::zero(); n_cols];
        for i in 0..m {
            values[self.basis[i]] = self.rows[i][rhs].clone();
        }
        let primal: Vec<T> = self
            .var_cols
            .iter()
            .map(|&(p, q)| match q {
                Some(q) => values[p].sub(&values[q]),
                None => values[p].clone(),
            })
            .collect();
        // y_i = c_B B⁻¹ e_i, read from the reduced cost of the unit column.
        let duals: Vec<T> = (0..m)
            .map(|i| {
                let col = self.unit_col[i];
                let y = self.rows[m][col].add(&cost[col]);
                if self.flipped[i] {
                    y.neg()
                } else {
                    y
                }
            })
            .collect();
        let objective = lp
            .objective
            .iter()
            .zip(&primal)
            .fold(T::zero(), |acc, (c, x)| acc.add(&c.mul(x)));
        let m_le = lp.inequalities.len();
        Ok(LpSolution {
            status,
            objective,
            primal,
            dual_inequalities: duals[..m_le].to_vec(),
            dual_equalities: duals[m_le..].to_vec(),
            pivots: self.pivots,
        })
    }
}
