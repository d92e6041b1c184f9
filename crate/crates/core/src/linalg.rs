//! Small dense linear-algebra helpers used by the reference oracle and the
//! operator-norm computation. Instances are desk-scale, so plain row-major
//! `Vec<f64>` storage with partial-pivot elimination is sufficient.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// y += alpha * x
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Square dense matrix, row-major.
#[derive(Debug, Clone)]
pub struct SquareMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `M x = rhs` in place via Gaussian elimination with partial
/// pivoting. Falls back to a minimum-norm solution through complete
/// pivoting when the system is (numerically) rank deficient, which happens
/// for degenerate active sets; the minimum-norm multipliers are the ones
/// the oracle reports in that case.
pub fn solve_square(m: &SquareMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.n;
    if rhs.len() != n {
        return Err(Error::dim(format!("rhs length {} vs matrix order {n}", rhs.len())));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let scale = m.data.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let pivot_tol = scale * 1e-13 * n as f64;

    let mut a = m.data.clone();
    let mut x = rhs.to_vec();
    let mut rank_deficient = false;

    for col in 0..n {
        let mut best = col;
        let mut best_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > best_val {
                best = row;
                best_val = v;
            }
        }
        if best_val <= pivot_tol {
            rank_deficient = true;
            break;
        }
        if best != col {
            for j in 0..n {
                a.swap(col * n + j, best * n + j);
            }
            x.swap(col, best);
        }
        let piv = a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / piv;
            if f == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for j in (col + 1)..n {
                a[row * n + j] -= f * a[col * n + j];
            }
            x[row] -= f * x[col];
        }
    }

    if rank_deficient {
        return solve_min_norm(m, rhs);
    }

    for col in (0..n).rev() {
        let mut v = x[col];
        for j in (col + 1)..n {
            v -= a[col * n + j] * x[j];
        }
        x[col] = v / a[col * n + col];
    }
    Ok(x)
}

/// Minimum-norm solution of a consistent (possibly rank-deficient) square
/// system, via elimination with complete pivoting. Returns a validation
/// error when the system is inconsistent beyond tolerance.
fn solve_min_norm(m: &SquareMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut b = rhs.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();

    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let tol = scale * 1e-12 * n as f64;

    let mut rank = 0;
    for k in 0..n {
        let mut best = (k, k);
        let mut best_val = 0.0;
        for i in k..n {
            for j in k..n {
                let v = a[i * n + j].abs();
                if v > best_val {
                    best = (i, j);
                    best_val = v;
                }
            }
        }
        if best_val <= tol {
            break;
        }
        let (pi, pj) = best;
        if pi != k {
            for j in 0..n {
                a.swap(k * n + j, pi * n + j);
            }
            b.swap(k, pi);
        }
        if pj != k {
            for i in 0..n {
                a.swap(i * n + k, i * n + pj);
            }
            col_perm.swap(k, pj);
        }
        let piv = a[k * n + k];
        for i in (k + 1)..n {
            let f = a[i * n + k] / piv;
            if f == 0.0 {
                continue;
            }
            a[i * n + k] = 0.0;
            for j in (k + 1)..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            b[i] -= f * b[k];
        }
        rank = k + 1;
    }

    let rhs_scale = rhs.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for item in b.iter().skip(rank) {
        if item.abs() > rhs_scale * 1e-8 {
            return Err(Error::validation(format!(
                "singular KKT system is inconsistent (residual {item:e})"
            )));
        }
    }

    // Particular solution: free (permuted) variables beyond `rank` set to zero.
    let back_substitute = |free: &[f64], b_head: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; n];
        y[rank..n].copy_from_slice(free);
        for k in (0..rank).rev() {
            let mut v = b_head[k];
            for j in (k + 1)..n {
                v -= a[k * n + j] * y[j];
            }
            y[k] = v / a[k * n + k];
        }
        y
    };

    let nfree = n - rank;
    let y0 = back_substitute(&vec![0.0; nfree], &b);

    // Null-space basis columns, then project y0 onto the orthogonal
    // complement to obtain the minimum-norm solution.
    let y_min = if nfree == 0 {
        y0
    } else {
        let zeros = vec![0.0; rank.max(n)];
        let mut basis = Vec::with_capacity(nfree);
        for f in 0..nfree {
            let mut e = vec![0.0; nfree];
            e[f] = 1.0;
            basis.push(back_substitute(&e, &zeros[..n.min(zeros.len())]));
        }
        let mut gram = SquareMatrix::zeros(nfree);
        let mut proj = vec![0.0; nfree];
        for i in 0..nfree {
            for j in 0..nfree {
                *gram.at_mut(i, j) = dot(&basis[i], &basis[j]);
            }
            proj[i] = dot(&basis[i], &y0);
        }
        let coeff = solve_square(&gram, &proj)?;
        let mut y = y0;
        for (c, col) in coeff.iter().zip(&basis) {
            axpy(-c, col, &mut y);
        }
        y
    };

    let mut x = vec![0.0; n];
    for (k, &orig) in col_perm.iter().enumerate() {
        x[orig] = y_min[k];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_well_conditioned_system() {
        let mut m = SquareMatrix::zeros(3);
        let rows = [[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                *m.at_mut(i, j) = rows[i][j];
            }
        }
        let x = solve_square(&m, &[1.0, 2.0, 3.0]).unwrap();
        // verify M x = rhs
        for i in 0..3 {
            let got: f64 = (0..3).map(|j| rows[i][j] * x[j]).sum();
            assert!((got - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_consistent_system_gets_a_solution() {
        // rows 0 and 1 identical
        let mut m = SquareMatrix::zeros(2);
        *m.at_mut(0, 0) = 1.0;
        *m.at_mut(0, 1) = 1.0;
        *m.at_mut(1, 0) = 1.0;
        *m.at_mut(1, 1) = 1.0;
        let x = solve_square(&m, &[2.0, 2.0]).unwrap();
        // minimum-norm solution of x0 + x1 = 2
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!((x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rank_deficient_inconsistent_system_is_rejected() {
        let mut m = SquareMatrix::zeros(2);
        *m.at_mut(0, 0) = 1.0;
        *m.at_mut(0, 1) = 1.0;
        *m.at_mut(1, 0) = 1.0;
        *m.at_mut(1, 1) = 1.0;
        assert!(solve_square(&m, &[1.0, 2.0]).is_err());
    }
}
