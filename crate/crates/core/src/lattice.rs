//! Lattice bases, exact LLL reduction and integer kernel computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::norm::ExactNorm;
use crate::rational::{self, qr, round_half_up, QVec, Q};

/// A full-rank lattice `L = B·Zᵏ` in `Qⁿ`, stored by its `k` basis columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBasis", into = "RawBasis")]
pub struct LatticeBasis {
    columns: Vec<QVec>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawBasis {
    #[serde(with = "rational::serde_q::mat")]
    columns: Vec<QVec>,
}

impl TryFrom<RawBasis> for LatticeBasis {
    type Error = Error;

    fn try_from(raw: RawBasis) -> Result<Self> {
        LatticeBasis::new(raw.columns)
    }
}

impl From<LatticeBasis> for RawBasis {
    fn from(b: LatticeBasis) -> Self {
        RawBasis { columns: b.columns }
    }
}

impl LatticeBasis {
    /// Rejects rank-deficient input.
    pub fn new(columns: Vec<QVec>) -> Result<Self> {
        let dim = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidArgument("basis columns have different lengths".into()));
        }
        if columns.len() > dim || linalg::rank(&columns) < columns.len() {
            return Err(Error::RankDeficient);
        }
        Ok(LatticeBasis { columns, dim })
    }

    pub fn from_int_columns(cols: &[&[i64]]) -> Result<Self> {
        Self::new(cols.iter().map(|c| rational::qvec(c)).collect())
    }

    pub fn identity(n: usize) -> Self {
        LatticeBasis { columns: linalg::identity(n), dim: n }
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank `k`.
    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn is_square(&self) -> bool {
        self.dim == self.columns.len()
    }

    pub fn columns(&self) -> &[QVec] {
        &self.columns
    }

    /// Row-major `n × k` basis matrix.
    pub fn matrix(&self) -> QMat {
        linalg::from_columns(&self.columns)
    }

    /// `Bᵗ A B` for a symmetric `A`.
    pub fn gram_with(&self, a: &[QVec]) -> QMat {
        let ab: Vec<QVec> = self.columns.iter().map(|c| linalg::mat_vec(a, c)).collect();
        self.columns.iter().map(|ci| ab.iter().map(|abj| rational::dot(ci, abj)).collect()).collect()
    }

    pub fn gram(&self) -> QMat {
        self.columns.iter().map(|ci| self.columns.iter().map(|cj| rational::dot(ci, cj)).collect()).collect()
    }

    /// `det(L) = sqrt(det(BᵗB))`.
    pub fn det(&self) -> ExactNorm {
        ExactNorm::sqrt(linalg::det(&self.gram()))
    }

    /// Lattice vector with the given integer coefficients.
    pub fn point(&self, coeffs: &[BigInt]) -> QVec {
        let mut v = vec![Q::zero(); self.dim];
        for (c, col) in coeffs.iter().zip(&self.columns) {
            if c.is_zero() {
                continue;
            }
            let cq = Q::from_integer(c.clone());
            for (vi, bi) in v.iter_mut().zip(col) {
                *vi += &cq * bi;
            }
        }
        v
    }

    /// Rational coefficients `c` with `B c = x`, if `x` lies in the span.
    pub fn coords_of(&self, x: &[Q]) -> Option<QVec> {
        linalg::solve(&self.matrix(), x)
    }

    /// Exact lattice membership.
    pub fn contains(&self, x: &[Q]) -> bool {
        self.coords_of(x).is_some_and(|c| c.iter().all(Q::is_integer))
    }

    /// Basis `B U` for an integer matrix `U` given by columns.
    pub fn transformed(&self, u_cols: &[Vec<BigInt>]) -> LatticeBasis {
        LatticeBasis { columns: u_cols.iter().map(|c| self.point(c)).collect(), dim: self.dim }
    }

    /// Dual basis `B⁻ᵗ` (square lattices only).
    pub fn dual(&self) -> Result<LatticeBasis> {
        if !self.is_square() {
            return Err(Error::InvalidArgument("dual lattice requires a square basis".into()));
        }
        let inv_t = linalg::transpose(&linalg::inverse(&self.matrix())?);
        Ok(LatticeBasis { columns: linalg::transpose(&inv_t), dim: self.dim })
    }
}

/// LLL-reduces `B` for the Euclidean inner product (`δ = 3/4`).
pub fn lll_reduce(basis: &LatticeBasis) -> LatticeBasis {
    let u = lll_gram(&basis.gram());
    basis.transformed(&u)
}

/// Exact LLL on a Gram matrix. Returns the unimodular transform as columns:
/// the reduced basis is `B·U`.
pub fn lll_gram(gram: &[QVec]) -> Vec<Vec<BigInt>> {
    let k = gram.len();
    let delta = qr(3, 4);
    let mut g: QMat = gram.to_vec();
    let mut u: Vec<Vec<BigInt>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    if k <= 1 {
        return u;
    }
    let (mut mu, mut bstar) = gram_schmidt(&g);
    let mut i = 1;
    while i < k {
        for j in (0..i).rev() {
            let r = round_half_up(&mu[i][j]);
            if !r.is_zero() {
                // b_i <- b_i - r b_j
                for row in 0..k {
                    let t = &u[j][row] * &r;
                    u[i][row] -= t;
                }
                g = transformed_gram(gram, &u);
                let (m2, b2) = gram_schmidt(&g);
                mu = m2;
                bstar = b2;
            }
        }
        let lhs = bstar[i].clone();
        let rhs = (&delta - &mu[i][i - 1] * &mu[i][i - 1]) * &bstar[i - 1];
        if lhs >= rhs {
            i += 1;
        } else {
            u.swap(i, i - 1);
            g = transformed_gram(gram, &u);
            let (m2, b2) = gram_schmidt(&g);
            mu = m2;
            bstar = b2;
            i = (i - 1).max(1);
        }
    }
    u
}

/// `Uᵗ G U` with `U` given by columns.
fn transformed_gram(g: &[QVec], u: &[Vec<BigInt>]) -> QMat {
    let uq: Vec<QVec> = u.iter().map(|c| rational::int_vec_to_q(c)).collect();
    let gu: Vec<QVec> = uq.iter().map(|c| linalg::mat_vec(g, c)).collect();
    uq.iter().map(|ci| gu.iter().map(|gj| rational::dot(ci, gj)).collect()).collect()
}

/// Gram–Schmidt coefficients and squared lengths from a Gram matrix.
pub fn gram_schmidt(g: &[QVec]) -> (QMat, QVec) {
    let k = g.len();
    let mut mu = linalg::zeros(k, k);
    let mut bstar: QVec = vec![Q::zero(); k];
    for i in 0..k {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for l in 0..j {
                s -= &mu[j][l] * &mu[i][l] * &bstar[l];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut b = g[i][i].clone();
        for l in 0..i {
            b -= &mu[i][l] * &mu[i][l] * &bstar[l];
        }
        bstar[i] = b;
        mu[i][i] = Q::one();
    }
    (mu, bstar)
}

/// Integer column reduction: returns `U` (columns) unimodular with `N U`
/// in column echelon form, and the number `r` of nonzero echelon columns.
/// Columns `r..k` of `U` are a basis of the integer kernel of `N`.
pub fn column_echelon(n: &[Vec<BigInt>], k: usize) -> (Vec<Vec<BigInt>>, usize) {
    let mut u: Vec<Vec<BigInt>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    // w[c] = column c of N U
    let mut w: Vec<Vec<BigInt>> = (0..k).map(|c| n.iter().map(|row| row[c].clone()).collect()).collect();
    let mut r = 0;
    for row in 0..n.len() {
        if r == k {
            break;
        }
        loop {
            // pick the column >= r with smallest nonzero |entry|
            let piv = (r..k).filter(|&c| !w[c][row].is_zero()).min_by(|&a, &b| w[a][row].abs().cmp(&w[b][row].abs()));
            let Some(p) = piv else { break };
            w.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for c in r + 1..k {
                if w[c][row].is_zero() {
                    continue;
                }
                let f = w[c][row].div_floor(&w[r][row]);
                for x in 0..w[c].len() {
                    let t = &w[r][x] * &f;
                    w[c][x] -= t;
                }
                for x in 0..k {
                    let t = &u[r][x] * &f;
                    u[c][x] -= t;
                }
                if !w[c][row].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < k && !w[r][row].is_zero() {
            r += 1;
        }
    }
    (u, r)
}

/// Integer basis of `{z ∈ Zᵏ : N z = 0}` for a rational matrix `N`.
pub fn integer_kernel(n: &[QVec], k: usize) -> Vec<Vec<BigInt>> {
    let ints: Vec<Vec<BigInt>> = n.iter().map(|row| clear_denominators(row)).collect();
    let (u, r) = column_echelon(&ints, k);
    u[r..].to_vec()
}

/// Scales a rational vector to a primitive integer vector.
pub fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Basis (integer coordinates) of `Zᵏ ∩ span_Q(vectors)`.
pub fn saturate(vectors: &[QVec], k: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // orthogonal complement of span(vectors) = kernel of the matrix whose rows are the vectors
    let complement = linalg::kernel(vectors, k);
    if complement.is_empty() {
        return (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    }
    integer_kernel(&complement, k)
}

/// Integer solutions of `⟨w, z⟩ = rhs`: a particular solution and a
/// kernel basis, or `None` if `gcd(w)` does not divide `rhs`.
pub fn solve_integer_row(w: &[BigInt], rhs: &BigInt) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let k = w.len();
    let (u, r) = column_echelon(&[w.to_vec()], k);
    if r == 0 {
        return if rhs.is_zero() { Some((vec![BigInt::zero(); k], u)) } else { None };
    }
    let g: BigInt = w.iter().zip(&u[0]).map(|(a, b)| a * b).sum();
    if !rhs.is_multiple_of(&g) {
        return None;
    }
    let f = rhs / &g;
    let particular = u[0].iter().map(|x| x * &f).collect();
    Some((particular, u[1..].to_vec()))
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(ToPrimitive::to_i64).collect()
}
