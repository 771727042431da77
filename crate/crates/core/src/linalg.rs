//! Dense exact linear algebra over `Q` plus thin `f64` bridges to nalgebra.
//!
//! Matrices are row-major `Vec<QVec>`. Dimensions here are small (tens at
//! most), so plain Gaussian elimination is used throughout.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, fmt_q, from_f64, to_f64, QVec, Q};

pub type QMat = Vec<QVec>;

pub fn identity(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

pub fn zeros(rows: usize, cols: usize) -> QMat {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn diag(d: &[Q]) -> QMat {
    let mut m = zeros(d.len(), d.len());
    for (i, x) in d.iter().enumerate() {
        m[i][i] = x.clone();
    }
    m
}

pub fn transpose(m: &[QVec]) -> QMat {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &[QVec], b: &[QVec]) -> QMat {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).fold(Q::zero(), |acc, (x, brow)| acc + x * &brow[j])).collect())
        .collect()
}

pub fn mat_vec(a: &[QVec], v: &[Q]) -> QVec {
    a.iter().map(|row| dot(row, v)).collect()
}

/// `vᵗ A w`.
pub fn bilinear(a: &[QVec], v: &[Q], w: &[Q]) -> Q {
    dot(v, &mat_vec(a, w))
}

pub fn quad_form(a: &[QVec], v: &[Q]) -> Q {
    bilinear(a, v, v)
}

pub fn scale_mat(a: &[QVec], c: &Q) -> QMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn is_symmetric(a: &[QVec]) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Column `j` of a row-major matrix.
pub fn column(m: &[QVec], j: usize) -> QVec {
    m.iter().map(|r| r[j].clone()).collect()
}

/// Builds a row-major matrix whose columns are the given vectors.
pub fn from_columns(cols: &[QVec]) -> QMat {
    transpose(cols)
}

/// Row echelon reduction; returns (reduced matrix, pivot columns).
fn rref(m: &[QVec]) -> (QMat, Vec<usize>) {
    let mut a: QMat = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Q::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &[QVec]) -> usize {
    rref(m).1.len()
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel(m: &[QVec], cols: usize) -> Vec<QVec> {
    if m.is_empty() {
        return identity(cols);
    }
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn det(m: &[QVec]) -> Q {
    let n = m.len();
    let mut a: QMat = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let delta = &f * &a[c][j];
                    a[i][j] -= delta;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &[QVec]) -> Result<QMat> {
    let n = m.len();
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::RankDeficient);
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `M x = b`; `None` when inconsistent. Free variables are set to 0.
pub fn solve(m: &[QVec], b: &[Q]) -> Option<QVec> {
    let cols = m.first().map_or(0, Vec::len);
    let aug: QMat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][cols].clone();
    }
    Some(x)
}

/// Exact `A = L D Lᵗ` with unit lower-triangular `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldl {
    pub l: QMat,
    pub d: QVec,
}

/// Exact LDLᵗ decomposition; fails with `NotPositiveDefinite` on the first
/// non-positive pivot.
pub fn ldl(a: &[QVec]) -> Result<Ldl> {
    let n = a.len();
    if !is_symmetric(a) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    let mut l = identity(n);
    let mut d: QVec = vec![Q::zero(); n];
    for j in 0..n {
        let mut dj = a[j][j].clone();
        for k in 0..j {
            dj -= &l[j][k] * &l[j][k] * &d[k];
        }
        if !dj.is_positive() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: fmt_q(&dj) });
        }
        for i in j + 1..n {
            let mut s = a[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k] * &d[k];
            }
            l[i][j] = s / &dj;
        }
        d[j] = dj;
    }
    Ok(Ldl { l, d })
}

pub fn to_dmatrix(m: &[QVec]) -> DMatrix<f64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |i, j| to_f64(&m[i][j]))
}

/// Exact rational image of a double matrix, symmetrized when square and
/// nearly symmetric so that downstream exact PD checks are meaningful.
pub fn from_dmatrix(m: &DMatrix<f64>) -> QMat {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| from_f64(m[(i, j)])).collect()).collect()
}

pub fn symmetric_from_dmatrix(m: &DMatrix<f64>) -> QMat {
    let s = (m + m.transpose()) * 0.5;
    from_dmatrix(&s)
}
