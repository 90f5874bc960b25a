//! Constrained norm minimization: `min ||z||_P  s.t.  ||y - Az||_2 <= eps`.
//!
//! The solver alternates the proximal map of the penalty norm with the
//! Euclidean projection onto the feasibility ball, glued by a
//! Douglas-Rachford fixed-point correction. The projection is computed in
//! the singular basis of `A`: a scalar secular equation in the constraint
//! multiplier, solved by safeguarded Newton/bisection. With `eps = 0` the
//! ball degenerates and the projection targets the affine set `Az = y`
//! directly.
//!
//! A slow projected-subgradient reference solver is included for
//! cross-checking objectives; it shares only the feasibility projection
//! with the main path.

use crate::error::{Error, Result};
use crate::group::GroupPartition;
use crate::linalg::{norm2, scale, sub, svd, Mat, Svd};
use crate::norms::{eval_norm, NormSpec};

/// Problem data: measurement matrix, observations, noise bound, penalty.
#[derive(Clone, Debug)]
pub struct RecoveryProblem {
    pub a: Mat,
    pub y: Vec<f64>,
    pub eps: f64,
    pub spec: NormSpec,
    pub partition: GroupPartition,
}

impl RecoveryProblem {
    pub fn new(
        a: Mat,
        y: Vec<f64>,
        eps: f64,
        spec: NormSpec,
        partition: GroupPartition,
    ) -> Result<Self> {
        if a.cols() != partition.n() {
            return Err(Error::DimensionMismatch { expected: partition.n(), got: a.cols() });
        }
        if y.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: y.len() });
        }
        if eps < 0.0 {
            return Err(Error::InvalidRange { name: "eps" });
        }
        Ok(RecoveryProblem { a, y, eps, spec, partition })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Proximal step size.
    pub tau: f64,
    /// Fixed-point residual tolerance.
    pub tol: f64,
    /// Allowed constraint violation at the reported result.
    pub feas_tol: f64,
    pub max_iters: usize,
    /// Douglas-Rachford relaxation parameter.
    pub relaxation: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tau: 1.0, tol: 1e-9, feas_tol: 1e-8, max_iters: 20_000, relaxation: 1.0 }
    }
}

/// Solver output; `x_hat` is the best feasible iterate seen.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub x_hat: Vec<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `eps - ||y - A x_hat||_2`; nonnegative up to `feas_tol` on success.
    pub constraint_slack: f64,
    /// `||x_hat||_P`.
    pub objective: f64,
    pub converged: bool,
}

/// Proximal map `argmin_z 0.5 ||z - v||^2 + tau ||z||_P`.
///
/// l1 soft-thresholds entrywise; the group LASSO shrinks each block's norm
/// by `tau` (times its weight), zeroing blocks below it; the sparse group
/// LASSO composes the two: entrywise at `(1-mu) tau`, then blockwise at
/// `mu tau`. Tree norms have no closed-form prox here.
pub fn prox_penalty(spec: &NormSpec, p: &GroupPartition, v: &[f64], tau: f64) -> Result<Vec<f64>> {
    if tau <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "tau" });
    }
    if v.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: v.len() });
    }
    match spec {
        NormSpec::L1 => Ok(v.iter().map(|&x| soft(x, tau)).collect()),
        NormSpec::GroupLasso { weights } => {
            if let Some(w) = weights {
                if w.len() != p.num_groups() {
                    return Err(Error::DimensionMismatch {
                        expected: p.num_groups(),
                        got: w.len(),
                    });
                }
            }
            let mut z = vec![0.0; v.len()];
            for (gid, group) in p.groups().iter().enumerate() {
                let wt = weights.as_ref().map_or(1.0, |w| w[gid]);
                block_shrink(v, group, tau * wt, &mut z);
            }
            Ok(z)
        }
        NormSpec::SparseGroupLasso { mu } => {
            let soft_level = (1.0 - mu) * tau;
            let stage1: Vec<f64> = v.iter().map(|&x| soft(x, soft_level)).collect();
            let mut z = vec![0.0; v.len()];
            for group in p.groups() {
                block_shrink(&stage1, group, mu * tau, &mut z);
            }
            Ok(z)
        }
        NormSpec::TreeStructured { .. } => Err(Error::UnsupportedNorm),
    }
}

#[inline]
fn soft(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

fn block_shrink(v: &[f64], group: &[usize], t: f64, out: &mut [f64]) {
    let nrm = group.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt();
    if nrm > t {
        let s = (nrm - t) / nrm;
        for &i in group {
            out[i] = v[i] * s;
        }
    }
    // Below the threshold the whole block stays zero.
}

/// How far `(v - z)/tau` sits outside the subdifferential of `||.||_P` at
/// `z`. Zero (up to rounding) certifies the prox output; used by the test
/// suites as an oracle independent of the prox formulas.
pub fn prox_optimality_violation(
    spec: &NormSpec,
    p: &GroupPartition,
    v: &[f64],
    z: &[f64],
    tau: f64,
) -> Result<f64> {
    if tau <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "tau" });
    }
    let w: Vec<f64> = v.iter().zip(z).map(|(a, b)| (a - b) / tau).collect();
    let mut worst: f64 = 0.0;
    match spec {
        NormSpec::L1 => {
            for (wi, zi) in w.iter().zip(z) {
                if *zi != 0.0 {
                    worst = worst.max((wi - zi.signum()).abs());
                } else {
                    worst = worst.max((wi.abs() - 1.0).max(0.0));
                }
            }
        }
        NormSpec::GroupLasso { weights } => {
            for (gid, group) in p.groups().iter().enumerate() {
                let wt = weights.as_ref().map_or(1.0, |w| w[gid]);
                let wg: Vec<f64> = group.iter().map(|&i| w[i]).collect();
                let zg: Vec<f64> = group.iter().map(|&i| z[i]).collect();
                let zn = norm2(&zg);
                if zn > 0.0 {
                    // w_G must equal wt * z_G / ||z_G||.
                    for (wi, zi) in wg.iter().zip(&zg) {
                        worst = worst.max((wi - wt * zi / zn).abs());
                    }
                } else {
                    worst = worst.max((norm2(&wg) - wt).max(0.0));
                }
            }
        }
        NormSpec::SparseGroupLasso { mu } => {
            for group in p.groups() {
                let wg: Vec<f64> = group.iter().map(|&i| w[i]).collect();
                let zg: Vec<f64> = group.iter().map(|&i| z[i]).collect();
                let zn = norm2(&zg);
                if zn > 0.0 {
                    // Subtract the l2 part, divide out (1-mu), and check an
                    // l1 subgradient remains.
                    for ((wi, zi), &idx) in wg.iter().zip(&zg).zip(group) {
                        let u = wi - mu * zi / zn;
                        if *mu == 1.0 {
                            worst = worst.max(u.abs());
                        } else if z[idx] != 0.0 {
                            worst = worst.max((u / (1.0 - mu) - z[idx].signum()).abs());
                        } else {
                            worst = worst.max(((u / (1.0 - mu)).abs() - 1.0).max(0.0));
                        }
                    }
                } else {
                    // Membership in (1-mu) B_inf + mu B_2: the l2 distance
                    // from w_G to the cube is ||soft(w_G, 1-mu)||.
                    let resid: Vec<f64> = wg.iter().map(|&x| soft(x, 1.0 - mu)).collect();
                    worst = worst.max((norm2(&resid) - mu).max(0.0));
                }
            }
        }
        NormSpec::TreeStructured { .. } => return Err(Error::UnsupportedNorm),
    }
    Ok(worst)
}

/// Euclidean projection onto `{z : ||y - Az||_2 <= eps}`, with the SVD of
/// `A` computed once per problem.
#[derive(Debug)]
pub struct FeasibleProjector {
    svd: Svd,
    y: Vec<f64>,
    eps: f64,
    /// `Uᵀ y` in the singular basis.
    c: Vec<f64>,
    /// `||y - U Uᵀ y||`: unreachable measurement energy.
    y_perp: f64,
    n: usize,
}

const FEAS_REL_TOL: f64 = 1e-9;

impl FeasibleProjector {
    pub fn new(a: &Mat, y: &[f64], eps: f64) -> Result<Self> {
        if y.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: y.len() });
        }
        if eps < 0.0 {
            return Err(Error::InvalidRange { name: "eps" });
        }
        let s = svd(a);
        let c: Vec<f64> = (0..s.rank())
            .map(|j| (0..a.rows()).map(|i| s.u.get(i, j) * y[i]).sum())
            .collect();
        let y_norm_sq: f64 = y.iter().map(|v| v * v).sum();
        let c_sq: f64 = c.iter().map(|v| v * v).sum();
        let y_perp = (y_norm_sq - c_sq).max(0.0).sqrt();
        // The ball is empty when even the least-squares residual exceeds eps.
        if y_perp > eps + FEAS_REL_TOL * (1.0 + y_norm_sq.sqrt()) {
            return Err(Error::InfeasibleProblem);
        }
        Ok(FeasibleProjector { svd: s, y: y.to_vec(), eps, c, y_perp, n: a.cols() })
    }

    pub fn residual_norm(&self, z: &[f64], a: &Mat) -> f64 {
        norm2(&sub(&self.y, &a.matvec(z)))
    }

    /// Coordinates of `v` in the row-space basis.
    fn v_parallel(&self, v: &[f64]) -> Vec<f64> {
        (0..self.svd.rank())
            .map(|j| (0..self.n).map(|i| self.svd.v.get(i, j) * v[i]).sum())
            .collect()
    }

    fn assemble(&self, v: &[f64], vpar: &[f64], zhat: &[f64]) -> Vec<f64> {
        // z = v + V (zhat - vpar): row-space coordinates move, the
        // null-space component of v is untouched.
        let mut z = v.to_vec();
        for j in 0..self.svd.rank() {
            let delta = zhat[j] - vpar[j];
            for (i, zi) in z.iter_mut().enumerate() {
                *zi += self.svd.v.get(i, j) * delta;
            }
        }
        z
    }

    /// Squared constraint residual along the solution path
    /// `z(lam) = argmin ||z - v||^2 + lam ||Az - y||^2`.
    fn phi(&self, w: &[f64], lam: f64) -> f64 {
        let mut s = self.y_perp * self.y_perp;
        for (wi, sig) in w.iter().zip(&self.svd.sigma) {
            let den = 1.0 + lam * sig * sig;
            s += wi / (den * den);
        }
        s
    }

    fn phi_prime(&self, w: &[f64], lam: f64) -> f64 {
        let mut s = 0.0;
        for (wi, sig) in w.iter().zip(&self.svd.sigma) {
            let s2 = sig * sig;
            let den = 1.0 + lam * s2;
            s += -2.0 * wi * s2 / (den * den * den);
        }
        s
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let vpar = self.v_parallel(v);
        let r = self.svd.rank();

        if self.eps <= self.y_perp + 1e-300 || self.eps == 0.0 {
            // Degenerate ball: project onto the least-squares affine set,
            // z-hat_j = c_j / sigma_j.
            let zhat: Vec<f64> =
                (0..r).map(|j| self.c[j] / self.svd.sigma[j]).collect();
            return self.assemble(v, &vpar, &zhat);
        }

        // w_i = (sigma_i vpar_i - c_i)^2 drives the secular equation.
        let w: Vec<f64> = (0..r)
            .map(|j| {
                let t = self.svd.sigma[j] * vpar[j] - self.c[j];
                t * t
            })
            .collect();
        let eps_sq = self.eps * self.eps;
        if self.phi(&w, 0.0) <= eps_sq {
            return v.to_vec();
        }

        // phi is convex and decreasing in lam >= 0, so Newton from the left
        // converges monotonically; a bisection bracket guards rounding.
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while self.phi(&w, hi) > eps_sq {
            hi *= 2.0;
            if hi > 1e300 {
                break;
            }
        }
        let mut lam = lo;
        for _ in 0..200 {
            let val = self.phi(&w, lam) - eps_sq;
            if val.abs() <= 1e-14 * eps_sq.max(1e-300) {
                break;
            }
            if val > 0.0 {
                lo = lam;
            } else {
                hi = lam;
            }
            let deriv = self.phi_prime(&w, lam);
            let mut next = if deriv < 0.0 { lam - val / deriv } else { 0.5 * (lo + hi) };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - lam).abs() <= f64::EPSILON * lam.abs() {
                break;
            }
            lam = next;
        }

        let zhat: Vec<f64> = (0..r)
            .map(|j| {
                let s2 = self.svd.sigma[j] * self.svd.sigma[j];
                (vpar[j] + lam * self.svd.sigma[j] * self.c[j]) / (1.0 + lam * s2)
            })
            .collect();
        self.assemble(v, &vpar, &zhat)
    }
}

/// Solve the recovery problem by Douglas-Rachford splitting between the
/// penalty prox and the feasibility projection. Iterates stop when both the
/// primal residual `||p_k - z_k||` and the dual residual `||z_k - z_{k-1}||/tau`
/// fall below `tol`; the best feasible iterate by objective is returned
/// either way, with `converged` marking which case occurred.
pub fn recover(prob: &RecoveryProblem, opts: &SolverOptions) -> Result<RecoveryResult> {
    let n = prob.partition.n();
    // Zero is feasible with minimal norm; settle it without iterating.
    if norm2(&prob.y) <= prob.eps {
        return Ok(RecoveryResult {
            x_hat: vec![0.0; n],
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            constraint_slack: prob.eps - norm2(&prob.y),
            objective: 0.0,
            converged: true,
        });
    }
    let projector = FeasibleProjector::new(&prob.a, &prob.y, prob.eps)?;

    let mut w = vec![0.0; n];
    let mut z_prev: Option<Vec<f64>> = None;
    // Seed the incumbent with a feasible point so the result is feasible
    // even if the iteration budget is exhausted immediately.
    let mut best_x = projector.project(&vec![0.0; n]);
    let mut best_obj = eval_norm(&prob.spec, &prob.partition, &best_x)?;
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for it in 0..opts.max_iters {
        iterations = it + 1;
        let z = prox_penalty(&prob.spec, &prob.partition, &w, opts.tau)?;
        let refl: Vec<f64> = z.iter().zip(&w).map(|(zi, wi)| 2.0 * zi - wi).collect();
        let p = projector.project(&refl);

        primal = norm2(&sub(&p, &z));
        for ((wi, pi), zi) in w.iter_mut().zip(&p).zip(&z) {
            *wi += opts.relaxation * (pi - zi);
        }
        dual = match &z_prev {
            Some(prev) => norm2(&sub(&z, prev)) / opts.tau,
            None => f64::INFINITY,
        };
        z_prev = Some(z);

        // p is feasible by construction; keep the best objective seen.
        let obj = eval_norm(&prob.spec, &prob.partition, &p)?;
        if obj < best_obj {
            best_obj = obj;
            best_x = p;
        }

        if primal < opts.tol && dual < opts.tol {
            converged = true;
            break;
        }
    }

    let slack = prob.eps - projector.residual_norm(&best_x, &prob.a);
    Ok(RecoveryResult {
        x_hat: best_x,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        constraint_slack: slack,
        objective: best_obj,
        converged,
    })
}

fn subgradient(spec: &NormSpec, p: &GroupPartition, z: &[f64]) -> Result<Vec<f64>> {
    let mut g = vec![0.0; z.len()];
    match spec {
        NormSpec::L1 => {
            for (gi, zi) in g.iter_mut().zip(z) {
                *gi = zi.signum() * f64::from(*zi != 0.0);
            }
        }
        NormSpec::GroupLasso { weights } => {
            for (gid, group) in p.groups().iter().enumerate() {
                let wt = weights.as_ref().map_or(1.0, |w| w[gid]);
                let zn = group.iter().map(|&i| z[i] * z[i]).sum::<f64>().sqrt();
                if zn > 0.0 {
                    for &i in group {
                        g[i] = wt * z[i] / zn;
                    }
                }
            }
        }
        NormSpec::SparseGroupLasso { mu } => {
            for group in p.groups() {
                let zn = group.iter().map(|&i| z[i] * z[i]).sum::<f64>().sqrt();
                for &i in group {
                    let l1_part = z[i].signum() * f64::from(z[i] != 0.0);
                    let l2_part = if zn > 0.0 { z[i] / zn } else { 0.0 };
                    g[i] = (1.0 - mu) * l1_part + mu * l2_part;
                }
            }
        }
        NormSpec::TreeStructured { .. } => return Err(Error::UnsupportedNorm),
    }
    Ok(g)
}

/// Projected-subgradient reference solver with a geometrically decaying
/// step and restarts from the incumbent. Slow but algorithmically
/// independent of the Douglas-Rachford path; used to cross-check
/// objectives.
pub fn recover_subgradient(prob: &RecoveryProblem, total_iters: usize) -> Result<RecoveryResult> {
    let n = prob.partition.n();
    if norm2(&prob.y) <= prob.eps {
        return Ok(RecoveryResult {
            x_hat: vec![0.0; n],
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            constraint_slack: prob.eps - norm2(&prob.y),
            objective: 0.0,
            converged: true,
        });
    }
    let projector = FeasibleProjector::new(&prob.a, &prob.y, prob.eps)?;
    let mut z = projector.project(&vec![0.0; n]);
    let mut best_obj = eval_norm(&prob.spec, &prob.partition, &z)?;
    let mut best_z = z.clone();

    let stages = 60;
    let per_stage = (total_iters / stages).max(1);
    let eta0 = 0.5 * (1.0 + norm2(&z));
    for stage in 0..stages {
        let eta = eta0 * 0.7f64.powi(stage as i32);
        for _ in 0..per_stage {
            let g = subgradient(&prob.spec, &prob.partition, &z)?;
            let trial = sub(&z, &scale(&g, eta));
            z = projector.project(&trial);
            let obj = eval_norm(&prob.spec, &prob.partition, &z)?;
            if obj < best_obj {
                best_obj = obj;
                best_z = z.clone();
            }
        }
        z = best_z.clone();
    }

    let slack = prob.eps - projector.residual_norm(&best_z, &prob.a);
    Ok(RecoveryResult {
        x_hat: best_z,
        iterations: stages * per_stage,
        primal_residual: 0.0,
        dual_residual: 0.0,
        constraint_slack: slack,
        objective: best_obj,
        converged: true,
    })
}
