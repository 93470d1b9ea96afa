//! Complex Monge-Ampère equation `det(½δ + u_{jk̄}) = (½)^m e^{f + εu}` on the
//! flat torus `[0,1)^{2m}`, `m ∈ {1, 2}`.
//!
//! Real coordinates are ordered `(x1, y1, x2, y2)` with `z_j = x_j + i y_j`,
//! stored with the last axis fastest. Second derivatives use the compact
//! three-point stencil on the diagonal and the four-point cross stencil off
//! it. Newton steps are solved by BiCGSTAB with the exact Fourier inverse of
//! the constant-coefficient part as right preconditioner. All reductions run
//! sequentially in index order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C;
use thiserror::Error;

use crate::fft::Fft;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaError {
    #[error("complex dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("grid size must be a power of two ≥ 4, got {0}")]
    BadGridSize(usize),
    #[error("grid has {got} values, expected {expected}")]
    GridLength { expected: usize, got: usize },
    #[error("non-finite grid value")]
    NonFinite,
    #[error("tolerance and iteration limit must be positive")]
    BadTolerance,
    #[error("perturbation parameter must be finite and non-negative, got {0}")]
    BadEpsilon(f64),
    #[error("right-hand side is incompatible: grid mean of e^f - 1 is {0}")]
    Incompatible(f64),
    #[error("Newton did not converge in {iterations} iterations (residual {residual})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("step damping underflowed at residual {0}")]
    DampingUnderflow(f64),
    #[error("initial guess is not admissible (ω0 + i∂∂̄u not positive)")]
    NotPositive,
    #[error("linear solver stalled after {iterations} iterations (relative residual {relative})")]
    LinearSolver { iterations: usize, relative: f64 },
}

/// Relative tolerance of the inner linear solves.
pub const KRYLOV_TOL: f64 = 1e-10;
const KRYLOV_MAX: usize = 500;
const MIN_DAMPING: f64 = 1.0 / (1u64 << 30) as f64;

/// Periodic grid with `n` points per real axis on `[0,1)^{2m}`.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    m: usize,
    n: usize,
    dims: usize,
    len: usize,
    strides: [usize; 4],
    inv_h2: f64,
    symbol: Vec<f64>,
    fft: Fft,
}

/// Signed index offsets of the forward and backward neighbours along each axis.
struct Offsets {
    p: [isize; 4],
    m: [isize; 4],
}

/// Complex Hessian `u_{jk̄}` at one node (`h22`, `h12` vanish when `m = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexHessian {
    pub h11: f64,
    pub h22: f64,
    pub h12: C,
}

impl ComplexHessian {
    /// `det(½δ + H)`.
    pub fn det_shifted(&self, m: usize) -> f64 {
        if m == 1 {
            0.5 + self.h11
        } else {
            (0.5 + self.h11) * (0.5 + self.h22) - self.h12.norm_sqr()
        }
    }

    /// Smallest eigenvalue of `½δ + H`.
    pub fn min_eigenvalue(&self, m: usize) -> f64 {
        if m == 1 {
            return 0.5 + self.h11;
        }
        let (a, d) = (0.5 + self.h11, 0.5 + self.h22);
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + self.h12.norm_sqr()).sqrt()
    }

    /// `tr_{ω0} ω = 2·tr(½δ + H)`.
    pub fn trace(&self, m: usize) -> f64 {
        m as f64 + 2.0 * (self.h11 + if m == 2 { self.h22 } else { 0.0 })
    }
}

impl TorusGrid {
    pub fn new(m: usize, n: usize) -> Result<Self, MaError> {
        if m != 1 && m != 2 {
            return Err(MaError::BadDimension(m));
        }
        if n < 4 {
            return Err(MaError::BadGridSize(n));
        }
        let fft = Fft::new(n).ok_or(MaError::BadGridSize(n))?;
        let dims = 2 * m;
        let len = n.pow(dims as u32);
        let mut strides = [0usize; 4];
        for (a, s) in strides.iter_mut().enumerate().take(dims) {
            *s = n.pow((dims - 1 - a) as u32);
        }
        let inv_h2 = (n * n) as f64;
        let axis_symbol: Vec<f64> = (0..n)
            .map(|k| {
                let s = (core::f64::consts::PI * k as f64 / n as f64).sin();
                -4.0 * s * s * inv_h2
            })
            .collect();
        let symbol = (0..len)
            .map(|i| (0..dims).map(|a| axis_symbol[(i / strides[a]) % n]).sum())
            .collect();
        Ok(TorusGrid { m, n, dims, len, strides, inv_h2, symbol, fft })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Coordinates of node `i` in units of the grid spacing.
    pub fn coords(&self, i: usize) -> [usize; 4] {
        let mut c = [0; 4];
        for (a, ca) in c.iter_mut().enumerate().take(self.dims) {
            *ca = (i / self.strides[a]) % self.n;
        }
        c
    }

    /// Node position in `[0,1)^{2m}` (unused axes are 0).
    pub fn point(&self, i: usize) -> [f64; 4] {
        self.coords(i).map(|c| c as f64 / self.n as f64)
    }

    fn offsets(&self, c: &[usize; 4]) -> Offsets {
        let mut o = Offsets { p: [0; 4], m: [0; 4] };
        for a in 0..self.dims {
            self.update_offset(&mut o, c, a);
        }
        o
    }

    #[inline]
    fn update_offset(&self, o: &mut Offsets, c: &[usize; 4], a: usize) {
        let s = self.strides[a] as isize;
        let wrap = (self.n as isize - 1) * s;
        o.p[a] = if c[a] + 1 == self.n { -wrap } else { s };
        o.m[a] = if c[a] == 0 { wrap } else { -s };
    }

    /// Calls `f(i, offsets)` for every node in storage order.
    fn for_each_node(&self, mut f: impl FnMut(usize, &Offsets)) {
        let mut c = [0usize; 4];
        let mut o = self.offsets(&c);
        for i in 0..self.len {
            f(i, &o);
            let mut a = self.dims;
            while a > 0 {
                a -= 1;
                c[a] += 1;
                if c[a] == self.n {
                    c[a] = 0;
                    self.update_offset(&mut o, &c, a);
                } else {
                    self.update_offset(&mut o, &c, a);
                    break;
                }
            }
        }
    }

    #[inline]
    fn d2(&self, u: &[f64], i: usize, o: &Offsets, a: usize) -> f64 {
        let at = |d: isize| u[(i as isize + d) as usize];
        (at(o.p[a]) - 2.0 * u[i] + at(o.m[a])) * self.inv_h2
    }

    #[inline]
    fn dmix(&self, u: &[f64], i: usize, o: &Offsets, a: usize, b: usize) -> f64 {
        let at = |d: isize| u[(i as isize + d) as usize];
        (at(o.p[a] + o.p[b]) - at(o.p[a] + o.m[b]) - at(o.m[a] + o.p[b]) + at(o.m[a] + o.m[b]))
            * 0.25
            * self.inv_h2
    }

    #[inline]
    fn hessian_at(&self, u: &[f64], i: usize, o: &Offsets) -> ComplexHessian {
        let h11 = 0.25 * (self.d2(u, i, o, 0) + self.d2(u, i, o, 1));
        if self.m == 1 {
            return ComplexHessian { h11, h22: 0.0, h12: C::new(0.0, 0.0) };
        }
        let h22 = 0.25 * (self.d2(u, i, o, 2) + self.d2(u, i, o, 3));
        let re = self.dmix(u, i, o, 0, 2) + self.dmix(u, i, o, 1, 3);
        let im = self.dmix(u, i, o, 0, 3) - self.dmix(u, i, o, 1, 2);
        ComplexHessian { h11, h22, h12: C::new(0.25 * re, 0.25 * im) }
    }

    /// Central-difference complex Hessian of `u` at node `i`.
    pub fn complex_hessian(&self, u: &[f64], i: usize) -> ComplexHessian {
        self.hessian_at(u, i, &self.offsets(&self.coords(i)))
    }

    /// Complex Hessian at every node.
    pub fn complex_hessians(&self, u: &[f64]) -> Vec<ComplexHessian> {
        let mut out = Vec::with_capacity(self.len);
        self.for_each_node(|i, o| out.push(self.hessian_at(u, i, o)));
        out
    }

    /// Discrete Laplacian (sum of the three-point second differences).
    pub fn laplacian(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len);
        self.for_each_node(|i, o| out.push((0..self.dims).map(|a| self.d2(u, i, o, a)).sum()));
        out
    }

    /// Solves `(c·¼Δ_h - σ) x = r` exactly in Fourier space; the constant
    /// mode uses `σ0` instead of `σ`, and is set to zero when `σ0 = 0`.
    pub fn constant_coefficient_solve(&self, r: &[f64], c: f64, sigma: f64, sigma0: f64) -> Vec<f64> {
        let mut buf: Vec<C> = r.iter().map(|&v| C::new(v, 0.0)).collect();
        self.fft.transform_grid(&mut buf, self.dims, false);
        buf[0] = if sigma0 == 0.0 { C::new(0.0, 0.0) } else { buf[0] / -sigma0 };
        for (b, s) in buf.iter_mut().zip(&self.symbol).skip(1) {
            *b /= 0.25 * c * s - sigma;
        }
        self.fft.transform_grid(&mut buf, self.dims, true);
        let scale = 1.0 / self.len as f64;
        buf.iter().map(|b| b.re * scale).collect()
    }

    fn check_grid(&self, v: &[f64]) -> Result<(), MaError> {
        if v.len() != self.len {
            return Err(MaError::GridLength { expected: self.len, got: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(MaError::NonFinite);
        }
        Ok(())
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn project_mean_zero(u: &mut [f64]) {
    let c = mean(u);
    u.iter_mut().for_each(|x| *x -= c);
}

/// A discretized Monge-Ampère instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusProblem {
    pub m: usize,
    pub n: usize,
    pub f: Vec<f64>,
    pub epsilon_perturb: f64,
    pub newton_tol: f64,
    pub max_iters: usize,
}

impl TorusProblem {
    pub fn new(m: usize, n: usize, f: Vec<f64>) -> Result<Self, MaError> {
        let p = TorusProblem { m, n, f, epsilon_perturb: 0.0, newton_tol: 1e-10, max_iters: 50 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon_perturb = eps;
        self
    }

    pub fn with_tolerance(mut self, tol: f64, max_iters: usize) -> Self {
        self.newton_tol = tol;
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<TorusGrid, MaError> {
        let grid = TorusGrid::new(self.m, self.n)?;
        grid.check_grid(&self.f)?;
        if !(self.epsilon_perturb >= 0.0 && self.epsilon_perturb.is_finite()) {
            return Err(MaError::BadEpsilon(self.epsilon_perturb));
        }
        if !(self.newton_tol > 0.0) || self.max_iters == 0 {
            return Err(MaError::BadTolerance);
        }
        Ok(grid)
    }

    /// Copy with `f` replaced by its compatibility normalization.
    pub fn normalized(mut self) -> Self {
        self.f = normalize_compatibility(&self.f).0;
        self
    }
}

/// Result of a Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: Vec<f64>,
    pub residual_inf: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of `½δ + u_{jk̄}` over all nodes.
    pub positivity_margin: f64,
    /// Smallest discrete `tr_{ω0} ω = m + ½Δu` over all nodes.
    pub trace_min: f64,
    /// Constant `c` in `det(½δ + u_{jk̄}) = (½)^m e^{f+c}` solved for alongside `u`
    /// when `ε = 0` (the discrete compatibility defect); 0 for `ε > 0`.
    pub shift: f64,
    /// Sup-norm residual after every accepted Newton step of the final stage,
    /// starting with the initial one.
    pub residual_history: Vec<f64>,
}

/// `f - c` with `c` such that the grid sum of `e^{f-c} - 1` vanishes; returns `(f', c)`.
pub fn normalize_compatibility(f: &[f64]) -> (Vec<f64>, f64) {
    if f.is_empty() {
        return (Vec::new(), 0.0);
    }
    let fmax = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s = |c: f64| f.iter().map(|&x| (x - c).exp()).sum::<f64>() / f.len() as f64;
    // log-mean-exp start, then Newton on φ(c) = mean e^{f-c} - 1, φ' = -mean e^{f-c}.
    let mut c = fmax + s(fmax).ln();
    for _ in 0..50 {
        let v = s(c);
        let dc = (v - 1.0) / v;
        c += dc;
        if dc.abs() <= 1e-16 * c.abs().max(1.0) {
            break;
        }
    }
    (f.iter().map(|&x| x - c).collect(), c)
}

/// Exact solution of the linearization at `u = 0`, `Δ_h u = 2(e^f - 1)`, with mean zero.
/// For `m = 1` this is the full equation.
pub fn solve_linearized(m: usize, n: usize, f: &[f64]) -> Result<Vec<f64>, MaError> {
    let grid = TorusGrid::new(m, n)?;
    grid.check_grid(f)?;
    let rhs: Vec<f64> = f.iter().map(|&x| 2.0 * x.exp_m1()).collect();
    let mr = mean(&rhs);
    if mr.abs() > 1e-10 * sup_norm(&rhs).max(1e-300) && mr.abs() > 1e-14 {
        return Err(MaError::Incompatible(mr / 2.0));
    }
    // c·¼Δ with c = 4 gives Δ.
    Ok(grid.constant_coefficient_solve(&rhs, 4.0, 0.0, 0.0))
}

/// Grid values of `det(½δ + u_{jk̄})`.
pub fn discrete_det(grid: &TorusGrid, u: &[f64]) -> Vec<f64> {
    grid.complex_hessians(u).iter().map(|h| h.det_shifted(grid.m())).collect()
}

/// Grid sum of `det(½δ + u_{jk̄}) - (½)^m` and the sum of its absolute values.
pub fn mass_defect(grid: &TorusGrid, u: &[f64]) -> (f64, f64) {
    let base = 0.5f64.powi(grid.m() as i32);
    let d = discrete_det(grid, u);
    (d.iter().map(|x| x - base).sum(), d.iter().map(|x| (x - base).abs()).sum())
}

struct NewtonState<'a> {
    grid: &'a TorusGrid,
    f: &'a [f64],
    eps: f64,
}

struct Eval {
    residual: Vec<f64>,
    hess: Vec<ComplexHessian>,
    rhs_weight: Vec<f64>,
    min_eig: f64,
}

impl NewtonState<'_> {
    fn evaluate(&self, u: &[f64], shift: f64) -> Eval {
        let g = self.grid;
        let m = g.m();
        let base = 0.5f64.powi(m as i32);
        let hess = g.complex_hessians(u);
        let mut residual = vec![0.0; g.len()];
        let mut rhs_weight = vec![0.0; g.len()];
        let mut min_eig = f64::INFINITY;
        for (i, h) in hess.iter().enumerate() {
            let w = base * (self.f[i] + self.eps * u[i] + shift).exp();
            residual[i] = h.det_shifted(m) - w;
            rhs_weight[i] = w;
            min_eig = min_eig.min(h.min_eigenvalue(m));
        }
        Eval { residual, hess, rhs_weight, min_eig }
    }

    /// `J v` for the Jacobian at the evaluated point, with the bordered
    /// constant-mode column when `ε = 0`.
    fn apply(&self, ev: &Eval, v: &[f64], out: &mut [f64]) {
        let g = self.grid;
        let bordered = if self.eps == 0.0 { mean(v) } else { 0.0 };
        g.for_each_node(|i, o| {
            let hv = g.hessian_at(v, i, o);
            let lin = if g.m() == 1 {
                hv.h11
            } else {
                let h = &ev.hess[i];
                // tr(adj(½δ + H)·H[v])
                (0.5 + h.h22) * hv.h11 + (0.5 + h.h11) * hv.h22 - 2.0 * (h.h12 * hv.h12.conj()).re
            };
            out[i] = lin - ev.rhs_weight[i] * (self.eps * v[i] + bordered);
        });
    }

    fn precondition(&self, ev: &Eval, r: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let c = if g.m() == 1 {
            1.0
        } else {
            ev.hess.iter().map(|h| 1.0 + h.h11 + h.h22).sum::<f64>() / (2.0 * g.len() as f64)
        };
        let wbar = mean(&ev.rhs_weight);
        let sigma = self.eps * wbar;
        let sigma0 = if self.eps == 0.0 { wbar } else { sigma };
        g.constant_coefficient_solve(r, c, sigma, sigma0)
    }

    /// Right-preconditioned BiCGSTAB for `J y = b`.
    fn linear_solve(&self, ev: &Eval, b: &[f64]) -> Result<Vec<f64>, MaError> {
        let len = b.len();
        let bnorm = dot(b, b).sqrt();
        let mut x = vec![0.0; len];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let r_hat = b.to_vec();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; len];
        let mut p = vec![0.0; len];
        let mut t = vec![0.0; len];
        let mut rel = 1.0;
        for it in 1..=KRYLOV_MAX {
            let rho_new = dot(&r_hat, &r);
            if rho_new == 0.0 {
                return Err(MaError::LinearSolver { iterations: it, relative: rel });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..len {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let y = self.precondition(ev, &p);
            self.apply(ev, &y, &mut v);
            alpha = rho / dot(&r_hat, &v);
            for i in 0..len {
                x[i] += alpha * y[i];
                r[i] -= alpha * v[i];
            }
            rel = dot(&r, &r).sqrt() / bnorm;
            if rel < KRYLOV_TOL {
                return Ok(x);
            }
            let z = self.precondition(ev, &r);
            self.apply(ev, &z, &mut t);
            let tt = dot(&t, &t);
            omega = if tt == 0.0 { 0.0 } else { dot(&t, &r) / tt };
            for i in 0..len {
                x[i] += omega * z[i];
                r[i] -= omega * t[i];
            }
            rel = dot(&r, &r).sqrt() / bnorm;
            if rel < KRYLOV_TOL {
                return Ok(x);
            }
            if omega == 0.0 {
                break;
            }
        }
        Err(MaError::LinearSolver { iterations: KRYLOV_MAX, relative: rel })
    }

    /// Damped Newton at fixed `ε` from `(u, shift)`; returns accepted-step count.
    fn run(
        &self,
        u: &mut Vec<f64>,
        shift: &mut f64,
        tol: f64,
        max_iters: usize,
        history: &mut Vec<f64>,
    ) -> Result<(usize, Eval), MaError> {
        let mut ev = self.evaluate(u, *shift);
        if !(ev.min_eig > 0.0) {
            return Err(MaError::NotPositive);
        }
        let mut res = sup_norm(&ev.residual);
        if history.is_empty() {
            history.push(res);
        }
        let mut iters = 0;
        while res >= tol {
            if iters == max_iters {
                return Err(MaError::MaxIterations { iterations: iters, residual: res });
            }
            let b: Vec<f64> = ev.residual.iter().map(|x| -x).collect();
            let mut y = self.linear_solve(&ev, &b)?;
            let dc = if self.eps == 0.0 {
                let c = mean(&y);
                y.iter_mut().for_each(|x| *x -= c);
                c
            } else {
                0.0
            };
            let mut lambda = 1.0;
            loop {
                let trial: Vec<f64> = u.iter().zip(&y).map(|(a, b)| a + lambda * b).collect();
                let trial_shift = *shift + lambda * dc;
                let tev = self.evaluate(&trial, trial_shift);
                let tres = sup_norm(&tev.residual);
                if tev.min_eig > 0.0 && tres <= res {
                    *u = trial;
                    if self.eps == 0.0 {
                        project_mean_zero(u);
                    }
                    *shift = trial_shift;
                    ev = tev;
                    res = tres;
                    break;
                }
                lambda *= 0.5;
                if lambda < MIN_DAMPING {
                    return Err(MaError::DampingUnderflow(res));
                }
            }
            iters += 1;
            history.push(res);
        }
        Ok((iters, ev))
    }
}

fn finish(grid: &TorusGrid, u: Vec<f64>, ev: &Eval, iterations: usize, shift: f64, history: Vec<f64>) -> Solution {
    let m = grid.m();
    let trace_min = ev.hess.iter().map(|h| h.trace(m)).fold(f64::INFINITY, f64::min);
    Solution {
        residual_inf: sup_norm(&ev.residual),
        u,
        iterations,
        positivity_margin: ev.min_eig,
        trace_min,
        shift,
        residual_history: history,
    }
}

/// Solves the perturbed equation `det(½δ + u_{jk̄}) = (½)^m e^{f+εu}`, `ε > 0`, from `u = 0`.
pub fn solve_perturbed(problem: &TorusProblem) -> Result<Solution, MaError> {
    let grid = problem.validate()?;
    if problem.epsilon_perturb <= 0.0 {
        return Err(MaError::BadEpsilon(problem.epsilon_perturb));
    }
    let state = NewtonState { grid: &grid, f: &problem.f, eps: problem.epsilon_perturb };
    let mut u = vec![0.0; grid.len()];
    let mut shift = 0.0;
    let mut history = Vec::new();
    let (iters, ev) = state.run(&mut u, &mut shift, problem.newton_tol, problem.max_iters, &mut history)?;
    Ok(finish(&grid, u, &ev, iters, 0.0, history))
}

/// The continuation schedule `1, ½, …, 2⁻²⁰` followed by `0`.
pub fn epsilon_schedule() -> Vec<f64> {
    (0..=20).map(|k| 0.5f64.powi(k)).chain(core::iter::once(0.0)).collect()
}

/// Solves `det(½δ + u_{jk̄}) = (½)^m e^{f}` by continuation in `ε` from `u = 0`.
pub fn solve_cma(problem: &TorusProblem) -> Result<Solution, MaError> {
    let grid = problem.validate()?;
    solve_cma_from(problem, &vec![0.0; grid.len()])
}

/// [`solve_cma`] from a given admissible initial guess.
///
/// Intermediate stages stop at `√tol`; the final `ε = 0` stage solves for
/// mean-zero `u` together with the constant [`Solution::shift`]. The
/// iteration limit applies to each stage.
pub fn solve_cma_from(problem: &TorusProblem, u0: &[f64]) -> Result<Solution, MaError> {
    let grid = problem.validate()?;
    grid.check_grid(u0)?;
    let tol = problem.newton_tol;
    let stage_tol = tol.max(tol.sqrt());
    let mut u = u0.to_vec();
    let mut shift = 0.0;
    let mut total = 0;
    let mut history = Vec::new();
    let schedule = epsilon_schedule();
    let mut last_eps = 0.0;
    for &eps in &schedule {
        if eps == 0.0 {
            shift = last_eps * mean(&u);
            project_mean_zero(&mut u);
        } else if last_eps > 0.0 {
            // keep ε·mean(u) fixed across the halving
            let c = mean(&u) * (last_eps / eps - 1.0);
            u.iter_mut().for_each(|x| *x += c);
        }
        let state = NewtonState { grid: &grid, f: &problem.f, eps };
        let stage = if eps == 0.0 { tol } else { stage_tol };
        history.clear();
        let (iters, ev) = state.run(&mut u, &mut shift, stage, problem.max_iters, &mut history)?;
        total += iters;
        last_eps = eps;
        if eps == 0.0 {
            return Ok(finish(&grid, u, &ev, total, shift, history));
        }
    }
    unreachable!("the schedule ends with 0")
}
