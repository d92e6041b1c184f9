//! Affine population constraints `A y <= b` over the flattened occupancy
//! tensor, tolls over the constraint rows, and the cached operator norm
//! that governs the admissible dual step size.

use std::io::{BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};

/// Sparse row of a constraint matrix: (flat column, coefficient) pairs.
pub type SparseRow = Vec<(usize, f64)>;

/// Affine constraint set `{ y : A y - b <= 0 }` with `C` rows over the
/// `(T+1)*S*A`-dimensional flattened tensor. The operator 2-norm of `A` is
/// computed once by singular-value (power) iteration and cached.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    rows: Vec<SparseRow>,
    b: Vec<f64>,
    cols: usize,
    norm: f64,
}

impl ConstraintSet {
    pub fn from_rows(rows: Vec<SparseRow>, b: Vec<f64>, cols: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("constraint set needs at least one row".to_string()));
        }
        if rows.len() != b.len() {
            return Err(Error::dim(format!(
                "{} constraint rows but {} bounds",
                rows.len(),
                b.len()
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                if c >= cols {
                    return Err(Error::dim(format!(
                        "row {r} references column {c}, matrix has {cols} columns"
                    )));
                }
                if !v.is_finite() {
                    return Err(Error::validation(format!("row {r} has a non-finite coefficient")));
                }
            }
        }
        let norm = operator_norm(&rows, cols, 1e-12, 50_000);
        if !(norm > 0.0) {
            return Err(Error::validation("constraint matrix must be nonzero".to_string()));
        }
        Ok(Self { rows, b, cols, norm })
    }

    /// Builds from (row, flat column, value) triplets plus the bound vector.
    pub fn from_triplets(
        triplets: &[(usize, usize, f64)],
        b: Vec<f64>,
        cols: usize,
    ) -> Result<Self> {
        let mut rows: Vec<SparseRow> = vec![Vec::new(); b.len()];
        for &(r, c, v) in triplets {
            if r >= b.len() {
                return Err(Error::dim(format!("triplet row {r} out of range ({} rows)", b.len())));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(rows, b, cols)
    }

    /// Loads the JSON triplet document
    /// `{"rows": C, "cols": N, "triplets": [[r, c, v], ...], "b": [...]}`.
    pub fn from_triplet_reader(reader: impl Read) -> Result<Self> {
        let doc: TripletDoc = serde_json::from_reader(BufReader::new(reader))?;
        if doc.b.len() != doc.rows {
            return Err(Error::Config(format!(
                "triplet document declares {} rows but b has {} entries",
                doc.rows,
                doc.b.len()
            )));
        }
        let triplets: Vec<(usize, usize, f64)> =
            doc.triplets.iter().map(|t| (t.0, t.1, t.2)).collect();
        Self::from_triplets(&triplets, doc.b, doc.cols)
    }

    pub fn from_triplet_file(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_triplet_reader(file)
    }

    pub fn to_triplet_doc(&self) -> TripletDoc {
        let mut triplets = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                triplets.push((r, c, v));
            }
        }
        TripletDoc { rows: self.rows.len(), cols: self.cols, triplets, b: self.b.clone() }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn bounds(&self) -> &[f64] {
        &self.b
    }

    /// Cached operator 2-norm of `A`.
    pub fn operator_norm(&self) -> f64 {
        self.norm
    }

    /// Recomputes the operator norm by power iteration (used to audit the
    /// cached value).
    pub fn recompute_operator_norm(&self) -> f64 {
        operator_norm(&self.rows, self.cols, 1e-12, 50_000)
    }

    /// `A y`.
    pub fn matvec(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.cols {
            return Err(Error::dim(format!(
                "matvec input has length {}, expected {}",
                y.len(),
                self.cols
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| v * y[c]).sum())
            .collect())
    }

    /// `A' tau`, the per-coordinate cost offset induced by a toll.
    pub fn t_matvec(&self, tau: &[f64]) -> Result<Vec<f64>> {
        if tau.len() != self.rows.len() {
            return Err(Error::dim(format!(
                "toll has length {}, expected {} rows",
                tau.len(),
                self.rows.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (row, &t) in self.rows.iter().zip(tau) {
            if t == 0.0 {
                continue;
            }
            for &(c, v) in row {
                out[c] += v * t;
            }
        }
        Ok(out)
    }

    /// `A y - b`.
    pub fn residual(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.matvec(y)?;
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        Ok(r)
    }

    /// `[A y - b]_+`, the per-row constraint violation.
    pub fn violation(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.residual(y)?;
        for v in &mut r {
            *v = v.max(0.0);
        }
        Ok(r)
    }

    /// Euclidean norm of the violation vector.
    pub fn violation_norm(&self, y: &[f64]) -> Result<f64> {
        Ok(norm2(&self.violation(y)?))
    }
}

/// Serialized sparse-triplet form of a constraint set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripletDoc {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
}

/// Operator 2-norm of a sparse matrix by power iteration on `A'A`, run to
/// the given relative tolerance on the Rayleigh quotient.
fn operator_norm(rows: &[SparseRow], cols: usize, rel_tol: f64, max_iters: usize) -> f64 {
    // deterministic start with decaying components so no eigenvector is
    // missed by symmetry
    let mut v: Vec<f64> = (0..cols).map(|i| 1.0 + 1.0 / (i + 2) as f64).collect();
    let nv = norm2(&v);
    for x in &mut v {
        *x /= nv;
    }

    let mut sigma2_prev = 0.0f64;
    for _ in 0..max_iters {
        // u = A v; w = A' u
        let mut w = vec![0.0; cols];
        let mut sigma2 = 0.0;
        for row in rows {
            let ui: f64 = row.iter().map(|&(c, coeff)| coeff * v[c]).sum();
            sigma2 += ui * ui;
            for &(c, coeff) in row {
                w[c] += coeff * ui;
            }
        }
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        if (sigma2 - sigma2_prev).abs() <= rel_tol * sigma2.max(f64::MIN_POSITIVE) {
            return sigma2.sqrt();
        }
        sigma2_prev = sigma2;
    }
    sigma2_prev.sqrt()
}

/// Nonnegative toll vector, one entry per constraint row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Toll(Vec<f64>);

impl Toll {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::validation("toll entries must be nonnegative and finite".to_string()));
        }
        Ok(Self(values))
    }

    pub fn zeros(rows: usize) -> Self {
        Self(vec![0.0; rows])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.0)
    }

    /// Total toll `sum_i tau_i` (entries are nonnegative).
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }
}

/// Elementwise Euclidean projection onto the nonnegative orthant.
pub fn project_nonneg(values: &[f64]) -> Toll {
    Toll(values.iter().map(|&v| v.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_row_set() -> ConstraintSet {
        // A = [[1, 0, 1], [0, 2, 0]], b = [1, 1]
        ConstraintSet::from_rows(
            vec![vec![(0, 1.0), (2, 1.0)], vec![(1, 2.0)]],
            vec![1.0, 1.0],
            3,
        )
        .unwrap()
    }

    #[test]
    fn matvec_and_transpose_agree_with_dense_arithmetic() {
        let cons = two_row_set();
        let y = [1.0, 2.0, 3.0];
        assert_eq!(cons.matvec(&y).unwrap(), vec![4.0, 4.0]);
        let tau = [0.5, 0.25];
        assert_eq!(cons.t_matvec(&tau).unwrap(), vec![0.5, 0.5, 0.5]);
        // <A y, tau> == <y, A' tau>
        let lhs = dot(&cons.matvec(&y).unwrap(), &tau);
        let rhs = dot(&y, &cons.t_matvec(&tau).unwrap());
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn violation_is_positive_part_of_residual() {
        let cons = two_row_set();
        let v = cons.violation(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
    }

    #[test]
    fn operator_norm_matches_hand_computed_singular_value() {
        // A = [[3, 0], [4, 0]] has ||A||_2 = 5
        let cons = ConstraintSet::from_rows(
            vec![vec![(0, 3.0)], vec![(0, 4.0)]],
            vec![0.0, 0.0],
            2,
        )
        .unwrap();
        assert!((cons.operator_norm() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn cached_norm_matches_recomputation() {
        let cons = two_row_set();
        let rel = (cons.operator_norm() - cons.recompute_operator_norm()).abs()
            / cons.operator_norm();
        assert!(rel < 1e-6);
    }

    #[test]
    fn capacity_style_norm_is_sqrt_action_count() {
        // one row per state summing 3 actions: ||A||_2 = sqrt(3)
        let rows = (0..4)
            .map(|s| (0..3).map(|a| (s * 3 + a, 1.0)).collect())
            .collect();
        let cons = ConstraintSet::from_rows(rows, vec![1.0; 4], 12).unwrap();
        assert!((cons.operator_norm() - 3.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn project_nonneg_clamps_and_is_projection() {
        use rand::{Rng, SeedableRng};
        assert_eq!(project_nonneg(&[-1.0, 2.0]).as_slice(), &[0.0, 2.0]);
        assert_eq!(project_nonneg(&[0.0, 0.0]).as_slice(), &[0.0, 0.0]);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = project_nonneg(&v);
            let dist_p: f64 = v.iter().zip(p.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
            // any other nonnegative point is at least as far
            let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0)).collect();
            let dist_w: f64 = v.iter().zip(&w).map(|(a, b)| (a - b).powi(2)).sum();
            assert!(dist_p <= dist_w + 1e-12);
        }
    }

    #[test]
    fn triplet_round_trip_preserves_structure() {
        let cons = two_row_set();
        let doc = cons.to_triplet_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let back = ConstraintSet::from_triplet_reader(text.as_bytes()).unwrap();
        assert_eq!(back.num_rows(), cons.num_rows());
        assert_eq!(back.bounds(), cons.bounds());
        let y = [0.3, 0.7, 0.1];
        assert_eq!(back.matvec(&y).unwrap(), cons.matvec(&y).unwrap());
    }

    #[test]
    fn negative_toll_rejected() {
        assert!(Toll::new(vec![0.1, -0.2]).is_err());
        assert!(Toll::new(vec![0.1, 0.2]).is_ok());
    }
}
