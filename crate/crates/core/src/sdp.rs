//! Single-block semidefinite programs and a first-order splitting solver.
//!
//! An [`SdpInstance`] is
//!
//! ```text
//! minimize ⟨C, X⟩   subject to   ⟨Aᵢ, X⟩ = bᵢ,   X ⪰ 0,
//! ```
//!
//! with `C` and `Aᵢ` symmetric and stored by their upper-triangle entries, so
//! that `⟨A, X⟩ = Σᵢ Aᵢᵢ Xᵢᵢ + 2 Σ_{i<j} Aᵢⱼ Xᵢⱼ`.
//!
//! The solver alternates a Frobenius projection onto the affine set with a
//! projection onto the PSD cone (ADMM / Douglas–Rachford with
//! over-relaxation). The affine projection is exact and cheap because the
//! constraints are first classified: single-entry *fixes*, two-entry *ties*
//! forcing equal entries, and a small number of *general* rows. Entries tied
//! together form classes, and projection reduces to weighted class averages
//! followed by a correction in the span of the general rows.
//!
//! Every solve reports a certified bound from a repaired dual slack: see
//! [`SdpSolution::dual_bound`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, symmetric_eigen, symmetric_eigen_in_place, Matrix};
use crate::math::sqrt;

/// One upper-triangle entry `(row ≤ col)` of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpEntry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl SdpEntry {
    pub fn new(row: usize, col: usize, value: f64) -> Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        Self { row, col, value }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConstraint {
    pub entries: Vec<SdpEntry>,
    pub rhs: f64,
}

/// `min ⟨C, X⟩` over `X ⪰ 0` of order `order` with linear equalities.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpInstance {
    pub order: usize,
    pub objective: Vec<SdpEntry>,
    pub constraints: Vec<SdpConstraint>,
}

fn multiplicity(e: &SdpEntry) -> f64 {
    if e.row == e.col {
        1.0
    } else {
        2.0
    }
}

/// `⟨A, X⟩` for `A` given by upper entries and `X` dense row-major.
pub fn sparse_inner(entries: &[SdpEntry], n: usize, x: &[f64]) -> f64 {
    entries.iter().map(|e| e.value * multiplicity(e) * x[e.row * n + e.col]).sum()
}

impl SdpInstance {
    pub fn new(order: usize) -> Self {
        Self { order, objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order;
        let check = |e: &SdpEntry, what: &str| -> Result<()> {
            if e.row > e.col {
                return Err(Error::InvalidInput(format!("{what}: entry ({}, {}) below the diagonal", e.row, e.col)));
            }
            if e.col >= n {
                return Err(Error::InvalidInput(format!("{what}: index {} outside order {n}", e.col)));
            }
            if !e.value.is_finite() {
                return Err(Error::InvalidInput(format!("{what}: non-finite value")));
            }
            Ok(())
        };
        for e in &self.objective {
            check(e, "objective")?;
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInput(format!("constraint {k}: non-finite right-hand side")));
            }
            for e in &c.entries {
                check(e, &format!("constraint {k}"))?;
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        sparse_inner(&self.objective, self.order, x)
    }

    /// Largest `|⟨Aᵢ, X⟩ − bᵢ|`.
    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| (sparse_inner(&c.entries, self.order, x) - c.rhs).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpSettings {
    /// Relative target for residuals and the primal/dual gap.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial penalty; `None` picks from the data.
    pub rho: Option<f64>,
    /// Over-relaxation factor in `(0, 2)`.
    pub alpha: f64,
    /// Iterations between convergence checks and penalty updates.
    pub check_every: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tol: 1e-6, max_iters: 50_000, rho: None, alpha: 1.6, check_every: 50 }
    }
}

impl SdpSettings {
    pub fn high_accuracy() -> Self {
        Self { tol: 1e-8, max_iters: 200_000, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIterations,
}

impl SdpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SdpStatus::Optimal => "optimal",
            SdpStatus::Infeasible => "infeasible",
            SdpStatus::MaxIterations => "max_iterations",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// `⟨C, X⟩` at the affine-feasible iterate.
    pub primal_objective: f64,
    /// Certified lower bound on the optimum (`None` if no trace bound is
    /// available to absorb a negative dual-slack eigenvalue).
    pub dual_bound: Option<f64>,
    /// PSD iterate, dense row-major.
    pub x: Vec<f64>,
    /// Largest constraint violation of the PSD iterate.
    pub primal_residual: f64,
    /// Relative dual residual at the last check.
    pub dual_residual: f64,
    /// Most negative eigenvalue of the affine-feasible iterate (≤ 0).
    pub psd_violation: f64,
    pub iterations: usize,
    pub rho: f64,
}

impl SdpSolution {
    /// `|primal − dual| / (1 + |primal| + |dual|)`, infinite without a bound.
    pub fn relative_gap(&self) -> f64 {
        match self.dual_bound {
            Some(d) => (self.primal_objective - d).abs() / (1.0 + self.primal_objective.abs() + d.abs()),
            None => f64::INFINITY,
        }
    }

    /// The bound brackets the primal value up to `slack`.
    pub fn weak_duality_holds(&self, slack: f64) -> bool {
        self.dual_bound.map_or(true, |d| d <= self.primal_objective + slack)
    }
}

/// Iterates to resume from.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: f64,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Upper-triangle entry `(i, j)` with `i ≤ j`.
#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + j
}

/// Exact Frobenius projection onto the affine set of an instance.
#[derive(Clone, Debug)]
struct AffineProjector {
    n: usize,
    /// Class of every packed upper entry.
    class_of: Vec<u32>,
    /// `(row, col)` per packed index.
    coords: Vec<(u32, u32)>,
    weight: Vec<f64>,
    fixed: Vec<Option<f64>>,
    /// General rows over classes: sparse `(class, coefficient)` lists.
    rows: Vec<Vec<(usize, f64)>>,
    /// Fixed-class contributions already folded in: rhs_eff = rhs − Σ fixed.
    row_fixed_part: Vec<f64>,
    /// Which original constraint each general row came from.
    row_source: Vec<usize>,
    /// Pseudo-inverse of `G W⁻¹ Gᵀ`.
    gram_pinv: Vec<f64>,
    /// Original constraint index → role, used to update right-hand sides.
    fix_source: BTreeMap<usize, (usize, f64)>,
    rhs: Vec<f64>,
    /// Sum of fixed diagonal values when every diagonal entry is fixed.
    trace_bound: Option<f64>,
}

enum Kind {
    Fix(usize, f64),
    Tie(usize, usize),
    General,
}

const MAX_GENERAL_ROWS: usize = 4000;

impl AffineProjector {
    fn build(inst: &SdpInstance) -> Result<Self> {
        let n = inst.order;
        let np = n * (n + 1) / 2;
        let mut coords = Vec::with_capacity(np);
        for i in 0..n {
            for j in i..n {
                coords.push((i as u32, j as u32));
            }
        }
        let merged = |c: &SdpConstraint| -> Vec<(usize, f64)> {
            let mut m: BTreeMap<usize, f64> = BTreeMap::new();
            for e in &c.entries {
                *m.entry(packed(n, e.row, e.col)).or_insert(0.0) += e.value * multiplicity(e);
            }
            m.into_iter().filter(|(_, v)| *v != 0.0).collect()
        };
        let mut kinds = Vec::with_capacity(inst.constraints.len());
        let mut uf = UnionFind::new(np);
        for c in &inst.constraints {
            let m = merged(c);
            let kind = match m.as_slice() {
                [(p, a)] => Kind::Fix(*p, c.rhs / a),
                [(p, a), (q, b)] if c.rhs == 0.0 && (a + b).abs() <= 1e-14 * a.abs().max(b.abs()) => Kind::Tie(*p, *q),
                _ => Kind::General,
            };
            if let Kind::Tie(p, q) = kind {
                uf.union(p, q);
            }
            kinds.push((kind, m));
        }
        let mut class_id = vec![usize::MAX; np];
        let mut class_of = vec![0u32; np];
        let mut weight = Vec::new();
        for e in 0..np {
            let r = uf.find(e);
            if class_id[r] == usize::MAX {
                class_id[r] = weight.len();
                weight.push(0.0);
            }
            let k = class_id[r];
            class_of[e] = k as u32;
            let (i, j) = coords[e];
            weight[k] += if i == j { 1.0 } else { 2.0 };
        }
        let nc = weight.len();
        let mut fixed: Vec<Option<f64>> = vec![None; nc];
        let mut fix_source = BTreeMap::new();
        let mut general = Vec::new();
        for (idx, (kind, m)) in kinds.into_iter().enumerate() {
            match kind {
                Kind::Fix(p, v) => {
                    let k = class_of[p] as usize;
                    let a = m[0].1;
                    fix_source.insert(idx, (k, a));
                    match fixed[k] {
                        None => fixed[k] = Some(v),
                        Some(prev) if (prev - v).abs() <= 1e-12 * (1.0 + v.abs()) => {}
                        Some(_) => return Err(Error::Infeasible),
                    }
                }
                Kind::Tie(..) => {}
                Kind::General => general.push((idx, m)),
            }
        }
        if general.len() > MAX_GENERAL_ROWS {
            return Err(Error::Numerical(format!(
                "{} general constraints exceed the dense projector limit {MAX_GENERAL_ROWS}",
                general.len()
            )));
        }
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(general.len());
        let mut row_source = Vec::with_capacity(general.len());
        let mut row_fixed_part = Vec::with_capacity(general.len());
        for (idx, m) in general {
            let mut by_class: BTreeMap<usize, f64> = BTreeMap::new();
            let mut fixed_part = 0.0;
            for (p, a) in m {
                let k = class_of[p] as usize;
                match fixed[k] {
                    Some(v) => fixed_part += a * v,
                    None => *by_class.entry(k).or_insert(0.0) += a,
                }
            }
            rows.push(by_class.into_iter().filter(|(_, a)| *a != 0.0).collect());
            row_source.push(idx);
            row_fixed_part.push(fixed_part);
        }
        // The row coefficients act on entries; per class they sum over members,
        // each entry counted with its multiplicity. In class coordinates
        // y_k, ⟨row, X⟩ = Σ_k g_k y_k, while ‖X‖² = Σ_k w_k y_k².
        let kr = rows.len();
        let mut gram = Matrix::zeros(kr, kr);
        for a in 0..kr {
            let ra: BTreeMap<usize, f64> = rows[a].iter().cloned().collect();
            for b in a..kr {
                let s: f64 = rows[b]
                    .iter()
                    .filter_map(|(k, gb)| ra.get(k).map(|ga| ga * gb / weight[*k]))
                    .sum();
                gram[(a, b)] = s;
                gram[(b, a)] = s;
            }
        }
        let gram_pinv = pseudo_inverse(&gram);
        let rhs = inst.constraints.iter().map(|c| c.rhs).collect();
        let trace_bound = {
            let mut t = 0.0;
            let mut ok = true;
            for i in 0..n {
                match fixed[class_of[packed(n, i, i)] as usize] {
                    Some(v) => t += v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            ok.then_some(t)
        };
        Ok(Self {
            n,
            class_of,
            coords,
            weight,
            fixed,
            rows,
            row_fixed_part,
            row_source,
            gram_pinv,
            fix_source,
            rhs,
            trace_bound,
        })
    }

    fn num_classes(&self) -> usize {
        self.weight.len()
    }

    /// Only valid for general rows; fixes feed into every row and need a rebuild.
    fn set_general_rhs(&mut self, constraint: usize, value: f64) {
        self.rhs[constraint] = value;
    }

    /// Class averages of a dense symmetric matrix.
    fn class_means(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut acc = vec![0.0; self.num_classes()];
        for (e, &(i, j)) in self.coords.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            let k = self.class_of[e] as usize;
            if i == j {
                acc[k] += v[i * n + i];
            } else {
                acc[k] += v[i * n + j] + v[j * n + i];
            }
        }
        for (a, w) in acc.iter_mut().zip(&self.weight) {
            *a /= w;
        }
        acc
    }

    /// Projects class values onto the affine set (or its linear part).
    fn correct(&self, y: &mut [f64], homogeneous: bool) {
        for (k, f) in self.fixed.iter().enumerate() {
            if let Some(v) = f {
                y[k] = if homogeneous { 0.0 } else { *v };
            }
        }
        let kr = self.rows.len();
        if kr == 0 {
            return;
        }
        let mut resid = vec![0.0; kr];
        for r in 0..kr {
            let g: f64 = self.rows[r].iter().map(|&(k, a)| a * y[k]).sum();
            let target = if homogeneous { 0.0 } else { self.rhs[self.row_source[r]] - self.row_fixed_part[r] };
            resid[r] = g - target;
        }
        let mut lam = vec![0.0; kr];
        for a in 0..kr {
            lam[a] = (0..kr).map(|b| self.gram_pinv[a * kr + b] * resid[b]).sum();
        }
        for r in 0..kr {
            for &(k, a) in &self.rows[r] {
                y[k] -= a * lam[r] / self.weight[k];
            }
        }
    }

    fn scatter(&self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        for (e, &(i, j)) in self.coords.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            let v = y[self.class_of[e] as usize];
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }

    fn project(&self, v: &[f64], out: &mut [f64], homogeneous: bool) {
        let mut y = self.class_means(v);
        self.correct(&mut y, homogeneous);
        self.scatter(&y, out);
    }
}

fn pseudo_inverse(m: &Matrix) -> Vec<f64> {
    let k = m.rows();
    if k == 0 {
        return Vec::new();
    }
    let eig = symmetric_eigen(m);
    let top = eig.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = 1e-12 * top.max(1e-300);
    let mut out = vec![0.0; k * k];
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam.abs() <= cut {
            continue;
        }
        let v = eig.vector(idx);
        for a in 0..k {
            for b in 0..k {
                out[a * k + b] += v[a] * v[b] / lam;
            }
        }
    }
    out
}

fn frob(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

fn frob_diff(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Scratch for PSD projections.
struct EigenWork {
    w: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
}

impl EigenWork {
    fn new(n: usize) -> Self {
        Self { w: vec![0.0; n * n], d: vec![0.0; n], e: vec![0.0; n] }
    }

    /// Eigen-decomposes `v` (symmetrized); returns the smallest eigenvalue.
    fn decompose(&mut self, n: usize, v: &[f64]) -> f64 {
        for i in 0..n {
            for j in 0..n {
                self.w[i * n + j] = 0.5 * (v[i * n + j] + v[j * n + i]);
            }
        }
        symmetric_eigen_in_place(n, &mut self.w, &mut self.d, &mut self.e);
        self.d.first().copied().unwrap_or(0.0)
    }

    /// Writes `Π_psd(v)` into `out` after [`decompose`](Self::decompose).
    fn psd_part(&self, n: usize, v: &[f64], out: &mut [f64]) {
        let pos = self.d.iter().filter(|&&l| l > 0.0).count();
        if pos <= n / 2 {
            out.iter_mut().for_each(|x| *x = 0.0);
            for k in (n - pos)..n {
                rank_one(n, self.d[k], &self.w[k * n..(k + 1) * n], out);
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = 0.5 * (v[i * n + j] + v[j * n + i]);
                }
            }
            for k in 0..(n - pos) {
                rank_one(n, -self.d[k], &self.w[k * n..(k + 1) * n], out);
            }
        }
    }
}

fn rank_one(n: usize, scale: f64, v: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let s = scale * v[i];
        if s == 0.0 {
            continue;
        }
        let row = &mut out[i * n..(i + 1) * n];
        for (o, vj) in row.iter_mut().zip(v) {
            *o += s * vj;
        }
    }
}

/// Reusable solver: analyzes the constraint structure once, then solves
/// repeatedly (e.g. along a grid of right-hand sides) with warm starts.
#[derive(Clone, Debug)]
pub struct SdpSolver {
    instance: SdpInstance,
    projector: AffineProjector,
    c: Vec<f64>,
    c_scale: f64,
    trace_hint: Option<f64>,
}

impl SdpSolver {
    pub fn new(instance: SdpInstance) -> Result<Self> {
        instance.validate()?;
        let projector = AffineProjector::build(&instance)?;
        let n = instance.order;
        let mut c = vec![0.0; n * n];
        for e in &instance.objective {
            c[e.row * n + e.col] += e.value;
            if e.row != e.col {
                c[e.col * n + e.row] += e.value;
            }
        }
        let norm = frob(&c);
        let c_scale = if norm > 0.0 { norm } else { 1.0 };
        for x in &mut c {
            *x /= c_scale;
        }
        Ok(Self { instance, projector, c, c_scale, trace_hint: None })
    }

    pub fn instance(&self) -> &SdpInstance {
        &self.instance
    }

    pub fn num_classes(&self) -> usize {
        self.projector.num_classes()
    }

    pub fn num_general_rows(&self) -> usize {
        self.projector.rows.len()
    }

    /// Declares an a-priori bound on `Tr X` over the feasible set, used to
    /// certify the dual when the diagonal is not fully fixed.
    pub fn with_trace_bound(mut self, bound: f64) -> Self {
        self.trace_hint = Some(bound);
        self
    }

    pub fn set_trace_bound(&mut self, bound: Option<f64>) {
        self.trace_hint = bound;
    }

    /// Fixed diagonal sum or the declared bound, whichever is smaller.
    pub fn trace_bound(&self) -> Option<f64> {
        match (self.projector.trace_bound, self.trace_hint) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Changes the right-hand side of one general or fixing constraint.
    pub fn set_rhs(&mut self, constraint: usize, value: f64) -> Result<()> {
        if constraint >= self.instance.constraints.len() {
            return Err(Error::InvalidInput(format!("no constraint {constraint}")));
        }
        let is_general = self.projector.row_source.contains(&constraint);
        let is_fix = self.projector.fix_source.contains_key(&constraint);
        if !is_general && !is_fix {
            if value != 0.0 {
                return Err(Error::InvalidInput(format!("constraint {constraint} is an equality tie")));
            }
            return Ok(());
        }
        if is_fix {
            // Fixed values feed into general rows; rebuild for simplicity.
            self.instance.constraints[constraint].rhs = value;
            self.projector = AffineProjector::build(&self.instance)?;
            return Ok(());
        }
        self.instance.constraints[constraint].rhs = value;
        self.projector.set_general_rhs(constraint, value);
        Ok(())
    }

    /// Certified lower bound from the scaled dual estimate `−ρU`.
    fn dual_bound(&self, x_aff: &[f64], s_est: &[f64], work: &mut EigenWork) -> Option<f64> {
        let n = self.instance.order;
        let diff: Vec<f64> = self.c.iter().zip(s_est).map(|(c, s)| c - s).collect();
        let mut null_part = vec![0.0; n * n];
        self.projector.project(&diff, &mut null_part, true);
        let s: Vec<f64> = s_est.iter().zip(&null_part).map(|(a, b)| a + b).collect();
        let lam_min = work.decompose(n, &s);
        let base: f64 = self.c.iter().zip(&s).zip(x_aff).map(|((c, s), x)| (c - s) * x).sum();
        let bound = if lam_min >= 0.0 {
            Some(base)
        } else {
            self.trace_bound().map(|t| base + lam_min * t)
        };
        bound.map(|b| b * self.c_scale)
    }

    pub fn solve(&self, settings: &SdpSettings, warm: Option<&WarmStart>) -> (SdpSolution, WarmStart) {
        let n = self.instance.order;
        let nn = n * n;
        let mut work = EigenWork::new(n);
        let (mut z, mut u, mut rho) = match warm {
            Some(w) if w.z.len() == nn && w.u.len() == nn => (w.z.clone(), w.u.clone(), w.rho),
            _ => {
                let mut z = vec![0.0; nn];
                for i in 0..n {
                    z[i * n + i] = 1.0;
                }
                (z, vec![0.0; nn], settings.rho.unwrap_or(1.0 / (n as f64).max(1.0)))
            }
        };
        let alpha = settings.alpha;
        let mut x = vec![0.0; nn];
        let mut v = vec![0.0; nn];
        let mut z_prev = z.clone();
        let mut status = SdpStatus::MaxIterations;
        let mut iterations = 0;
        let mut rd_rel = f64::INFINITY;
        let mut best_bound: Option<f64> = None;
        let mut rp_history: Vec<f64> = Vec::new();
        for it in 1..=settings.max_iters {
            iterations = it;
            for k in 0..nn {
                v[k] = z[k] - u[k] - self.c[k] / rho;
            }
            self.projector.project(&v, &mut x, false);
            for k in 0..nn {
                v[k] = alpha * x[k] + (1.0 - alpha) * z[k] + u[k];
            }
            z_prev.copy_from_slice(&z);
            work.decompose(n, &v);
            work.psd_part(n, &v, &mut z);
            for k in 0..nn {
                u[k] = v[k] - z[k];
            }
            if it % settings.check_every != 0 && it != settings.max_iters {
                continue;
            }
            let rp = frob_diff(&x, &z);
            let rd = rho * frob_diff(&z, &z_prev);
            let xn = frob(&x).max(frob(&z));
            let un = rho * frob(&u);
            let rp_rel = rp / (1.0 + xn);
            rd_rel = rd / (1.0 + un);
            rp_history.push(rp_rel);
            if rp_rel < settings.tol && rd_rel < settings.tol {
                let s_est: Vec<f64> = u.iter().map(|ui| -rho * ui).collect();
                let bound = self.dual_bound(&x, &s_est, &mut work);
                let primal = dot(&self.c, &x) * self.c_scale;
                best_bound = bound;
                if let Some(d) = bound {
                    if (primal - d).abs() / (1.0 + primal.abs() + d.abs()) < settings.tol {
                        status = SdpStatus::Optimal;
                        break;
                    }
                }
            }
            // Residual balancing.
            if rp_rel > 10.0 * rd_rel {
                rho *= 2.0;
                u.iter_mut().for_each(|ui| *ui /= 2.0);
            } else if rd_rel > 10.0 * rp_rel {
                rho /= 2.0;
                u.iter_mut().for_each(|ui| *ui *= 2.0);
            }
        }
        if status != SdpStatus::Optimal && looks_infeasible(&rp_history) {
            status = SdpStatus::Infeasible;
        }
        let s_est: Vec<f64> = u.iter().map(|ui| -rho * ui).collect();
        if status != SdpStatus::Optimal {
            best_bound = self.dual_bound(&x, &s_est, &mut work);
        }
        let psd_violation = work.decompose(n, &x).min(0.0);
        let solution = SdpSolution {
            status,
            primal_objective: dot(&self.c, &x) * self.c_scale,
            dual_bound: best_bound,
            primal_residual: self.instance.constraint_residual(&z),
            dual_residual: rd_rel,
            psd_violation,
            x: z.clone(),
            iterations,
            rho,
        };
        (solution, WarmStart { z, u, rho })
    }
}

/// Primal residual that stopped shrinking at a clearly nonzero level.
fn looks_infeasible(history: &[f64]) -> bool {
    if history.len() < 20 {
        return false;
    }
    let last = history[history.len() - 1];
    let earlier = history[history.len() - 10];
    last > 1e-4 && last > 0.5 * earlier
}

/// One-shot solve.
pub fn solve_sdp(instance: &SdpInstance, settings: &SdpSettings) -> Result<SdpSolution> {
    let solver = SdpSolver::new(instance.clone())?;
    Ok(solver.solve(settings, None).0)
}

/// Human-readable summary used in error messages and logs.
pub fn describe(sol: &SdpSolution) -> String {
    format!(
        "{} after {} iterations: primal {:.9}, bound {}, residual {:.2e}, gap {:.2e}",
        sol.status.as_str(),
        sol.iterations,
        sol.primal_objective,
        sol.dual_bound.map_or("none".into(), |d| format!("{d:.9}")),
        sol.primal_residual,
        sol.relative_gap()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix(i: usize, j: usize, v: f64) -> SdpConstraint {
        // ⟨E, X⟩ = v where E has a single upper entry chosen so X_ij = v.
        let m = if i == j { 1.0 } else { 0.5 };
        SdpConstraint { entries: vec![SdpEntry::new(i, j, m)], rhs: v }
    }

    #[test]
    fn trace_with_one_fixed_diagonal() {
        let mut p = SdpInstance::new(2);
        p.objective = vec![SdpEntry::new(0, 0, 1.0), SdpEntry::new(1, 1, 1.0)];
        p.constraints.push(fix(0, 0, 1.0));
        let s = solve_sdp(&p, &SdpSettings::high_accuracy()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-8, "{}", s.primal_objective);
    }

    #[test]
    fn correlation_matrix_extreme() {
        // max X₀₁ over 3×3 unit-diagonal PSD matrices.
        let mut p = SdpInstance::new(3);
        p.objective = vec![SdpEntry::new(0, 1, -0.5)];
        for i in 0..3 {
            p.constraints.push(fix(i, i, 1.0));
        }
        let s = solve_sdp(&p, &SdpSettings::high_accuracy()).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.primal_objective + 1.0).abs() < 1e-8);
        let d = s.dual_bound.unwrap();
        assert!((d + 1.0).abs() < 1e-8 && s.weak_duality_holds(1e-9));
    }

    #[test]
    fn elliptope_triangle() {
        // min X₀₁ + X₀₂ + X₁₂ with unit diagonal → −3/2.
        let mut p = SdpInstance::new(3);
        p.objective = vec![SdpEntry::new(0, 1, 0.5), SdpEntry::new(0, 2, 0.5), SdpEntry::new(1, 2, 0.5)];
        for i in 0..3 {
            p.constraints.push(fix(i, i, 1.0));
        }
        let s = solve_sdp(&p, &SdpSettings::high_accuracy()).unwrap();
        assert!((s.primal_objective + 1.5).abs() < 1e-8, "{}", s.primal_objective);
    }

    #[test]
    fn ties_and_general_rows() {
        // X₀₁ = X₁₂ (tie), X₀₁ + X₀₂ = 0.5 (general), unit diagonal; minimize X₀₂.
        let mut p = SdpInstance::new(3);
        p.objective = vec![SdpEntry::new(0, 2, 0.5)];
        for i in 0..3 {
            p.constraints.push(fix(i, i, 1.0));
        }
        p.constraints.push(SdpConstraint {
            entries: vec![SdpEntry::new(0, 1, 1.0), SdpEntry::new(1, 2, -1.0)],
            rhs: 0.0,
        });
        p.constraints.push(SdpConstraint {
            entries: vec![SdpEntry::new(0, 1, 0.5), SdpEntry::new(0, 2, 0.5)],
            rhs: 0.5,
        });
        let solver = SdpSolver::new(p.clone()).unwrap();
        assert_eq!(solver.num_general_rows(), 1);
        let (s, _) = solver.solve(&SdpSettings::high_accuracy(), None);
        assert_eq!(s.status, SdpStatus::Optimal);
        // With a = X₀₁ = X₁₂ and c = X₀₂ = 0.5 − a, the determinant
        // 1 − 2a² + 2a²c − c² vanishes at the optimum; bisect for its root.
        let det = |a: f64| {
            let c = 0.5 - a;
            1.0 - 2.0 * a * a + 2.0 * a * a * c - c * c
        };
        let (mut lo, mut hi) = (0.5, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if det(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = 0.5 - lo;
        assert!((s.primal_objective - want).abs() < 1e-7, "{} vs {want}", s.primal_objective);
        assert!(s.primal_residual < 1e-7);
    }

    #[test]
    fn conflicting_fixes_are_infeasible() {
        let mut p = SdpInstance::new(2);
        p.constraints.push(fix(0, 0, 1.0));
        p.constraints.push(fix(0, 0, 2.0));
        assert!(matches!(SdpSolver::new(p), Err(Error::Infeasible)));
    }

    #[test]
    fn psd_infeasibility_detected() {
        // Unit diagonal with X₀₁ = 2 is not PSD.
        let mut p = SdpInstance::new(2);
        p.constraints.push(fix(0, 0, 1.0));
        p.constraints.push(fix(1, 1, 1.0));
        p.constraints.push(fix(0, 1, 2.0));
        let settings = SdpSettings { max_iters: 5000, ..SdpSettings::default() };
        let s = solve_sdp(&p, &settings).unwrap();
        assert_eq!(s.status, SdpStatus::Infeasible);
    }

    #[test]
    fn below_diagonal_rejected() {
        let mut p = SdpInstance::new(2);
        p.objective = vec![SdpEntry { row: 1, col: 0, value: 1.0 }];
        assert!(p.validate().is_err());
    }

    #[test]
    fn packed_index_is_dense() {
        let n = 5;
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                assert_eq!(packed(n, i, j), k);
                k += 1;
            }
        }
    }
}
