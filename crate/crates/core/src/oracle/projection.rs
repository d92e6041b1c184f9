//! Exact weighted projection onto the flow polytope (optionally intersected
//! with affine inequality rows) by a primal active-set method.
//!
//! This is the dense workhorse behind the reference oracle. It shares no
//! solver logic with the conditional-gradient path: the polytope is handled
//! through its equality system and dense KKT solves rather than dynamic
//! programming.

use crate::dims::Dimensions;
use crate::error::{Error, Result};
use crate::linalg::{solve_square, SquareMatrix};
use crate::mdp::{InitialDistribution, TransitionKernel};
use crate::tolling::SparseRow;

/// Equality system `E y = f` describing the feasible flow polytope
/// (together with `y >= 0`).
#[derive(Debug, Clone)]
pub struct FlowPolytope {
    dims: Dimensions,
    eq_rows: Vec<SparseRow>,
    f: Vec<f64>,
    /// Per-column incidence: (equality row, coefficient).
    col_eq: Vec<Vec<(usize, f64)>>,
}

impl FlowPolytope {
    pub fn new(kernel: &TransitionKernel, p0: &InitialDistribution) -> Result<Self> {
        let dims = kernel.dims();
        if p0.states() != dims.states {
            return Err(Error::dim("initial distribution does not match kernel".to_string()));
        }
        let n = dims.flat_len();
        let num_rows = (dims.horizon + 1) * dims.states;
        let mut eq_rows: Vec<SparseRow> = vec![Vec::new(); num_rows];
        let mut f = vec![0.0; num_rows];

        // initial-mass rows: sum_a y[0][s][a] = p_s
        for s in 0..dims.states {
            for a in 0..dims.actions {
                eq_rows[s].push((dims.idx(0, s, a), 1.0));
            }
            f[s] = p0.as_slice()[s];
        }
        // flow rows: sum_a y[t+1][s][a] - sum_{s',a} P[t][s][s'][a] y[t][s'][a] = 0
        for t in 0..dims.horizon {
            for s in 0..dims.states {
                let r = dims.states + t * dims.states + s;
                for a in 0..dims.actions {
                    eq_rows[r].push((dims.idx(t + 1, s, a), 1.0));
                }
                for src in 0..dims.states {
                    for a in 0..dims.actions {
                        let prob = kernel.prob(t, s, src, a);
                        if prob != 0.0 {
                            eq_rows[r].push((dims.idx(t, src, a), -prob));
                        }
                    }
                }
            }
        }

        let mut col_eq: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in eq_rows.iter().enumerate() {
            for &(c, v) in row {
                col_eq[c].push((r, v));
            }
        }
        Ok(Self { dims, eq_rows, f, col_eq })
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn num_eq_rows(&self) -> usize {
        self.eq_rows.len()
    }

    pub fn eq_rows(&self) -> &[SparseRow] {
        &self.eq_rows
    }

    /// Max-norm equality residual of `y`.
    pub fn eq_residual(&self, y: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (row, &fi) in self.eq_rows.iter().zip(&self.f) {
            let v: f64 = row.iter().map(|&(c, coeff)| coeff * y[c]).sum();
            worst = worst.max((v - fi).abs());
        }
        worst
    }
}

/// Result of one projection: the projected point and the KKT multipliers of
/// the active constraints (`nu` on equalities, `lambda >= 0` on inequality
/// rows, `mu >= 0` on the active lower bounds).
#[derive(Debug, Clone)]
pub struct Projection {
    pub y: Vec<f64>,
    pub nu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

/// Warm-startable active-set projector onto
/// `{ y : E y = f, y >= 0, A y <= b }` in the diagonal metric
/// `||v||_w^2 = sum_i w_i v_i^2`.
pub struct Projector {
    poly: FlowPolytope,
    weights: Vec<f64>,
    extra_rows: Vec<SparseRow>,
    extra_b: Vec<f64>,
    col_extra: Vec<Vec<(usize, f64)>>,
    y: Vec<f64>,
    bound_active: Vec<bool>,
    row_active: Vec<bool>,
}

impl Projector {
    /// `start` must satisfy the equality system, the bounds, and the extra
    /// rows (to working tolerance).
    pub fn new(
        poly: FlowPolytope,
        weights: Vec<f64>,
        extra_rows: Vec<SparseRow>,
        extra_b: Vec<f64>,
        start: Vec<f64>,
    ) -> Result<Self> {
        let n = poly.dims.flat_len();
        if weights.len() != n || start.len() != n {
            return Err(Error::dim("projector weight/start length mismatch".to_string()));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::validation("projection weights must be positive".to_string()));
        }
        if extra_rows.len() != extra_b.len() {
            return Err(Error::dim("extra rows and bounds length mismatch".to_string()));
        }
        let mut col_extra: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in extra_rows.iter().enumerate() {
            for &(c, v) in row {
                col_extra[c].push((r, v));
            }
        }
        let scale = start.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let bound_active: Vec<bool> = start.iter().map(|&v| v <= 1e-12 * scale).collect();
        let row_active = extra_rows
            .iter()
            .zip(&extra_b)
            .map(|(row, &b)| {
                let v: f64 = row.iter().map(|&(c, coeff)| coeff * start[c]).sum();
                (v - b).abs() <= 1e-11 * scale.max(b.abs())
            })
            .collect();
        Ok(Self {
            poly,
            weights,
            extra_rows,
            extra_b,
            col_extra,
            y: start,
            bound_active,
            row_active,
        })
    }

    pub fn polytope(&self) -> &FlowPolytope {
        &self.poly
    }

    pub fn current(&self) -> &[f64] {
        &self.y
    }

    fn extra_value(&self, r: usize, y: &[f64]) -> f64 {
        self.extra_rows[r].iter().map(|&(c, v)| v * y[c]).sum()
    }

    /// Solves the equality-constrained projection for the current working
    /// set. Returns the candidate point and the stacked multipliers `u`.
    fn solve_eqp(&self, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = z.len();
        let re = self.poly.num_eq_rows();
        let active_rows: Vec<usize> =
            (0..self.extra_rows.len()).filter(|&r| self.row_active[r]).collect();
        let m = re + active_rows.len();
        let mut act_pos = vec![usize::MAX; self.extra_rows.len()];
        for (pos, &r) in active_rows.iter().enumerate() {
            act_pos[r] = re + pos;
        }

        let mut mat = SquareMatrix::zeros(m);
        let mut rhs = vec![0.0; m];
        for i in 0..n {
            if self.bound_active[i] {
                continue;
            }
            let wi = self.weights[i];
            let zi = z[i];
            // entries of column i across all active B rows
            let eq_entries = &self.poly.col_eq[i];
            let extra_entries = &self.col_extra[i];
            let mut touched: Vec<(usize, f64)> =
                Vec::with_capacity(eq_entries.len() + extra_entries.len());
            touched.extend(eq_entries.iter().copied());
            for &(r, v) in extra_entries {
                if act_pos[r] != usize::MAX {
                    touched.push((act_pos[r], v));
                }
            }
            for &(r1, v1) in &touched {
                rhs[r1] += v1 * zi;
                for &(r2, v2) in &touched {
                    *mat.at_mut(r1, r2) += v1 * v2 / wi;
                }
            }
        }
        for r in 0..re {
            rhs[r] -= self.poly.f[r];
        }
        for (pos, &r) in active_rows.iter().enumerate() {
            rhs[re + pos] -= self.extra_b[r];
        }

        let u = solve_square(&mat, &rhs)?;

        // y = z - W^{-1} B' u on free coordinates
        let mut y = vec![0.0; n];
        for i in 0..n {
            if self.bound_active[i] {
                continue;
            }
            let mut bt = 0.0;
            for &(r, v) in &self.poly.col_eq[i] {
                bt += v * u[r];
            }
            for &(r, v) in &self.col_extra[i] {
                if act_pos[r] != usize::MAX {
                    bt += v * u[act_pos[r]];
                }
            }
            y[i] = z[i] - bt / self.weights[i];
        }
        Ok((y, u))
    }

    /// Projects `z` onto the polyhedron in the weighted metric, starting
    /// from the warm iterate and working set of the previous call.
    pub fn project(&mut self, z: &[f64]) -> Result<Projection> {
        let n = z.len();
        if n != self.y.len() {
            return Err(Error::dim("projection input length mismatch".to_string()));
        }
        let re = self.poly.num_eq_rows();
        let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let tol_zero = 1e-13 * scale;
        let wz_scale = z
            .iter()
            .zip(&self.weights)
            .fold(1.0f64, |m, (zi, wi)| m.max((zi * wi).abs()));
        let tol_dual = 1e-10 * wz_scale;

        let max_iters = 4 * (n + self.extra_rows.len() + re) + 64;
        for _ in 0..max_iters {
            let (cand, u) = self.solve_eqp(z)?;

            // blocking constraints along y -> cand
            let mut alpha = 1.0f64;
            let mut blocker: Option<BlockId> = None;
            for i in 0..n {
                if self.bound_active[i] || cand[i] >= -tol_zero {
                    continue;
                }
                let denom = self.y[i] - cand[i];
                if denom > 0.0 {
                    let a = (self.y[i] / denom).clamp(0.0, 1.0);
                    if a < alpha {
                        alpha = a;
                        blocker = Some(BlockId::Bound(i));
                    }
                }
            }
            for r in 0..self.extra_rows.len() {
                if self.row_active[r] {
                    continue;
                }
                let g_new = self.extra_value(r, &cand) - self.extra_b[r];
                if g_new <= tol_zero {
                    continue;
                }
                let g_cur = self.extra_value(r, &self.y) - self.extra_b[r];
                let denom = g_new - g_cur;
                if denom > 0.0 {
                    let a = ((-g_cur) / denom).clamp(0.0, 1.0);
                    if a < alpha {
                        alpha = a;
                        blocker = Some(BlockId::Row(r));
                    }
                }
            }

            if let Some(block) = blocker {
                for i in 0..n {
                    if !self.bound_active[i] {
                        self.y[i] += alpha * (cand[i] - self.y[i]);
                        if self.y[i] < 0.0 {
                            self.y[i] = 0.0;
                        }
                    }
                }
                match block {
                    BlockId::Bound(i) => {
                        self.bound_active[i] = true;
                        self.y[i] = 0.0;
                    }
                    BlockId::Row(r) => self.row_active[r] = true,
                }
                continue;
            }

            // candidate is feasible: adopt it and check dual feasibility
            self.y = cand;
            for i in 0..n {
                if self.bound_active[i] || self.y[i] < 0.0 {
                    self.y[i] = 0.0;
                }
            }

            let mut worst = -tol_dual;
            let mut release: Option<BlockId> = None;
            for i in 0..n {
                if !self.bound_active[i] {
                    continue;
                }
                // mu_i = (B'u)_i - w_i z_i at y_i = 0
                let mut bt = 0.0;
                for &(r, v) in &self.poly.col_eq[i] {
                    bt += v * u[r];
                }
                for &(r, v) in &self.col_extra[i] {
                    if self.row_active[r] {
                        bt += v * self.lookup_row_multiplier(&u, r);
                    }
                }
                let mu = bt - self.weights[i] * z[i];
                if mu < worst {
                    worst = mu;
                    release = Some(BlockId::Bound(i));
                }
            }
            {
                let mut pos = re;
                for r in 0..self.extra_rows.len() {
                    if !self.row_active[r] {
                        continue;
                    }
                    let lam = u[pos];
                    if lam < worst {
                        worst = lam;
                        release = Some(BlockId::Row(r));
                    }
                    pos += 1;
                }
            }

            match release {
                Some(BlockId::Bound(i)) => {
                    self.bound_active[i] = false;
                }
                Some(BlockId::Row(r)) => {
                    self.row_active[r] = false;
                }
                None => {
                    return Ok(self.assemble_result(z, &u));
                }
            }
        }
        Err(Error::validation(
            "active-set projection exceeded its iteration budget".to_string(),
        ))
    }

    fn lookup_row_multiplier(&self, u: &[f64], row: usize) -> f64 {
        let re = self.poly.num_eq_rows();
        let mut pos = re;
        for r in 0..self.extra_rows.len() {
            if self.row_active[r] {
                if r == row {
                    return u[pos];
                }
                pos += 1;
            }
        }
        0.0
    }

    fn assemble_result(&self, z: &[f64], u: &[f64]) -> Projection {
        let re = self.poly.num_eq_rows();
        let nu = u[..re].to_vec();
        let mut lambda = vec![0.0; self.extra_rows.len()];
        let mut pos = re;
        for r in 0..self.extra_rows.len() {
            if self.row_active[r] {
                lambda[r] = u[pos].max(0.0);
                pos += 1;
            }
        }
        let mut mu = vec![0.0; z.len()];
        for i in 0..z.len() {
            if !self.bound_active[i] {
                continue;
            }
            let mut bt = 0.0;
            for &(r, v) in &self.poly.col_eq[i] {
                bt += v * nu[r];
            }
            for &(r, v) in &self.col_extra[i] {
                bt += v * lambda[r];
            }
            mu[i] = (bt - self.weights[i] * z[i]).max(0.0);
        }
        Projection { y: self.y.clone(), nu, lambda, mu }
    }
}

enum BlockId {
    Bound(usize),
    Row(usize),
}
