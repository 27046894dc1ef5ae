//! Small dense helpers shared by the tensor, symbol and search code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Largest absolute deviation from symmetry.
pub fn asymmetry(m: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &Matrix) -> Vec<f64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mean - rad, mean + rad]
        }
        _ => {
            let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            ev
        }
    }
}

/// Eigen-decomposition of a symmetric matrix with eigenpairs sorted by
/// ascending eigenvalue.
pub fn sym_eigen_sorted(m: &Matrix) -> (Vec<f64>, Matrix) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Orthonormal (Euclidean) basis of the complement of `v`, as columns.
pub fn orthogonal_complement(v: &Vector) -> Matrix {
    let n = v.len();
    let mut basis: Vec<Vector> = Vec::with_capacity(n);
    let norm = v.norm();
    basis.push(v / norm);
    for k in 0..n {
        let mut w = Vector::zeros(n);
        w[k] = 1.0;
        for b in &basis {
            let proj = b.dot(&w);
            w -= b * proj;
        }
        let wn = w.norm();
        if wn > 1e-8 {
            basis.push(w / wn);
        }
        if basis.len() == n {
            break;
        }
    }
    let mut out = Matrix::zeros(n, n - 1);
    for (k, b) in basis.iter().skip(1).enumerate() {
        out.set_column(k, b);
    }
    out
}

/// Numerical rank from singular values above `rel_tol` times the largest.
pub fn numerical_rank(m: &Matrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |acc, &s| acc.max(s));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Null space basis of `m` (columns), from singular vectors whose singular
/// value is at most `abs_tol`.
pub fn null_space(m: &Matrix, abs_tol: f64) -> Matrix {
    let n = m.ncols();
    // pad to square so the full right singular basis is available
    let rows = m.nrows().max(n);
    let mut sq = Matrix::zeros(rows, n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let cols: Vec<Vector> = (0..n)
        .filter(|&i| svd.singular_values[i] <= abs_tol)
        .map(|i| vt.row(i).transpose())
        .collect();
    let mut out = Matrix::zeros(n, cols.len());
    for (k, c) in cols.iter().enumerate() {
        out.set_column(k, c);
    }
    out
}

pub fn unit(n: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[k] = 1.0;
    v
}

/// Row-major nested vectors, for reports.
pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Inverse of [`rows`]; `None` for ragged or empty input.
pub fn from_rows(rows: &[Vec<f64>]) -> Option<Matrix> {
    let r = rows.len();
    let c = rows.first()?.len();
    if c == 0 || rows.iter().any(|row| row.len() != c) {
        return None;
    }
    Some(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn minkowski(dim: usize) -> Matrix {
    let mut g = Matrix::identity(dim, dim);
    g[(0, 0)] = -1.0;
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = Vector::from_vec(vec![1.0, 2.0, -0.5, 0.3]);
        let c = orthogonal_complement(&v);
        assert_eq!(c.ncols(), 3);
        assert!((c.transpose() * &c - Matrix::identity(3, 3)).norm() < 1e-12);
        assert!((c.transpose() * v).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_rank_one() {
        let l = Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        let m = &l * l.transpose();
        assert_eq!(null_space(&m, 1e-10).ncols(), 3);
    }

    #[test]
    fn two_by_two_eigenvalues_match_general_path() {
        let m = Matrix::from_row_slice(2, 2, &[2.0, 0.7, 0.7, -1.0]);
        let fast = sym_eigenvalues(&m);
        let (slow, _) = sym_eigen_sorted(&m);
        assert!((fast[0] - slow[0]).abs() < 1e-12 && (fast[1] - slow[1]).abs() < 1e-12);
    }
}
