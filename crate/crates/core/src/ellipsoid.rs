//! Ellipsoids `E(A, a) = {x : (x−a)ᵗA(x−a) ≤ 1}` and their inscribed
//! parallelepipeds.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{self, Ldl, QMat};
use crate::norm::ExactNorm;
use crate::rational::{self, QVec, Q};

/// Result of [`cholesky`]: a float factor `V` with `A = VᵗV` and the exact
/// LDLᵗ decomposition certifying positive definiteness.
#[derive(Clone, Debug)]
pub struct Cholesky {
    /// Upper-triangular `V` with `A = VᵗV`.
    pub factor: DMatrix<f64>,
    pub ldl: Ldl,
}

/// Cholesky factorization `A = VᵗV`.
pub fn cholesky(a: &[QVec]) -> Result<Cholesky> {
    let ldl = linalg::ldl(a)?;
    let n = a.len();
    // V = sqrt(D) Lᵗ
    let factor = DMatrix::from_fn(n, n, |i, j| {
        if j < i {
            0.0
        } else {
            rational::to_f64(&ldl.d[i]).sqrt() * rational::to_f64(&ldl.l[j][i])
        }
    });
    Ok(Cholesky { factor, ldl })
}

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let nf = n as f64;
    (nf / 2.0 * std::f64::consts::PI.ln() - ln_gamma(nf / 2.0 + 1.0)).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    #[serde(with = "rational::serde_q::mat")]
    shape: QMat,
    #[serde(with = "rational::serde_q::vec")]
    center: QVec,
}

impl Ellipsoid {
    /// Validates that `shape` is symmetric positive definite.
    pub fn new(shape: QMat, center: QVec) -> Result<Self> {
        if shape.len() != center.len() {
            return Err(Error::DimensionMismatch { expected: shape.len(), got: center.len() });
        }
        linalg::ldl(&shape)?;
        Ok(Ellipsoid { shape, center })
    }

    pub fn centered(shape: QMat) -> Result<Self> {
        let n = shape.len();
        Self::new(shape, vec![Q::zero(); n])
    }

    /// `radius · B₂ⁿ`.
    pub fn ball(n: usize, radius: &Q) -> Self {
        let s = Q::from_integer(1.into()) / (radius * radius);
        Ellipsoid { shape: linalg::scale_mat(&linalg::identity(n), &s), center: vec![Q::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn shape(&self) -> &QMat {
        &self.shape
    }

    pub fn center(&self) -> &QVec {
        &self.center
    }

    pub fn is_centered(&self) -> bool {
        rational::is_zero_vec(&self.center)
    }

    /// `c · E` about its center (shape `A / c²`).
    pub fn scaled(&self, c: &Q) -> Self {
        assert!(c.is_positive());
        let s = Q::from_integer(1.into()) / (c * c);
        Ellipsoid { shape: linalg::scale_mat(&self.shape, &s), center: self.center.clone() }
    }

    pub fn translated(&self, t: &[Q]) -> Self {
        Ellipsoid { shape: self.shape.clone(), center: rational::add(&self.center, t) }
    }

    /// `(x−a)ᵗA(x−a)`.
    pub fn quad(&self, x: &[Q]) -> Q {
        linalg::quad_form(&self.shape, &rational::sub(x, &self.center))
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.quad(x) <= Q::from_integer(1.into())
    }

    /// Exact gauge `‖x−a‖_A = sqrt((x−a)ᵗA(x−a))`.
    pub fn gauge(&self, x: &[Q]) -> ExactNorm {
        ExactNorm::sqrt(self.quad(x))
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        cholesky(&self.shape)
    }

    pub fn shape_f64(&self) -> DMatrix<f64> {
        linalg::to_dmatrix(&self.shape)
    }

    pub fn center_f64(&self) -> DVector<f64> {
        DVector::from_vec(rational::vec_to_f64(&self.center))
    }

    /// `vol(B₂ⁿ) · det(A)^{-1/2}`.
    pub fn volume(&self) -> f64 {
        let det = rational::to_f64(&linalg::det(&self.shape));
        unit_ball_volume(self.dim()) / det.sqrt()
    }

    /// `E(A)* = E(A⁻¹)`; exact on origin-centered ellipsoids.
    pub fn polar(&self) -> Result<Self> {
        if !self.is_centered() {
            return Err(Error::NonCentered);
        }
        Ok(Ellipsoid { shape: linalg::inverse(&self.shape)?, center: self.center.clone() })
    }

    /// Half-width of `E` along a unit direction: `sqrt(uᵗA⁻¹u)`, i.e. the
    /// support function `h_E(u) − ⟨u, a⟩`.
    pub fn support_radius_f64(&self, u: &[f64]) -> f64 {
        let inv = self.shape_f64().try_inverse().expect("PD shape is invertible");
        let v = DVector::from_column_slice(u);
        (v.transpose() * inv * &v)[(0, 0)].max(0.0).sqrt()
    }

    /// `P = {x : |⟨b_i, x⟩_A| ≤ 1/√n}` with `b_i` the columns of `V⁻¹`.
    pub fn inscribed_parallelepiped(&self) -> Result<Parallelepiped> {
        if !self.is_centered() {
            return Err(Error::NonCentered);
        }
        let chol = self.cholesky()?;
        Ok(Parallelepiped::from_factor(chol.factor, self.center_f64()))
    }
}

/// A parallelepiped `c + {Σ θ_i g_i : |θ_i| ≤ 1/2}` that tiles space under the
/// lattice spanned by its generators `g_i`.
#[derive(Clone, Debug)]
pub struct Parallelepiped {
    /// Generators `g_i = (2/√n)·b_i` as matrix columns.
    generators: DMatrix<f64>,
    /// `V` with `‖y‖_P = √n·max_i |(V y)_i|`.
    factor: DMatrix<f64>,
    center: DVector<f64>,
}

impl Parallelepiped {
    fn from_factor(factor: DMatrix<f64>, center: DVector<f64>) -> Self {
        let n = factor.nrows();
        let b = factor.clone().try_inverse().expect("Cholesky factor is invertible");
        let generators = b * (2.0 / (n as f64).sqrt());
        Parallelepiped { generators, factor, center }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    /// Gauge of `y` (relative to the center) with respect to `P − c`.
    pub fn gauge(&self, y: &DVector<f64>) -> f64 {
        let n = self.dim() as f64;
        let v = &self.factor * (y - &self.center);
        n.sqrt() * v.amax()
    }

    /// Point `c + Σ z_i g_i` of the tiling lattice.
    pub fn tile_center(&self, z: &[i64]) -> DVector<f64> {
        let zf = DVector::from_iterator(z.len(), z.iter().map(|&x| x as f64));
        &self.center + &self.generators * zf
    }

    /// Real tiling coordinates of `y`: `z` with `y = c + Σ z_i g_i`.
    pub fn tiling_coords(&self, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim() as f64;
        &self.factor * (y - &self.center) * (n.sqrt() / 2.0)
    }

    /// `(2/√n)ⁿ det(A)^{-1/2}`.
    pub fn volume(&self) -> f64 {
        self.generators.determinant().abs()
    }

    /// Half-widths along each generator direction: `‖g_i‖/2`.
    pub fn half_edges(&self) -> Vec<f64> {
        self.generators.column_iter().map(|c| c.norm() / 2.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};
    use std::f64::consts::PI;

    fn diag(d: &[Q]) -> Ellipsoid {
        Ellipsoid::centered(linalg::diag(d)).unwrap()
    }

    #[test]
    fn cholesky_examples() {
        let id = cholesky(&linalg::identity(3)).unwrap();
        assert!((id.factor.clone() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let d = cholesky(&linalg::diag(&[q(4), q(9)])).unwrap();
        assert!((d.factor[(0, 0)] - 2.0).abs() < 1e-15 && (d.factor[(1, 1)] - 3.0).abs() < 1e-15);
        let a = vec![vec![q(2), q(1)], vec![q(1), q(2)]];
        let c = cholesky(&a).unwrap();
        assert_eq!(c.ldl.d, vec![q(2), qr(3, 2)]);
        let back = c.factor.transpose() * &c.factor;
        assert!((back - linalg::to_dmatrix(&a)).amax() < 1e-12);
        assert!(cholesky(&[vec![q(0)]].to_vec()).is_err());
    }

    #[test]
    fn volume_examples() {
        assert!((diag(&[q(1), q(1)]).volume() - PI).abs() < 1e-12);
        assert!((diag(&[qr(1, 4), qr(1, 4)]).volume() - 4.0 * PI).abs() < 1e-12);
        let v = diag(&[q(1), q(4), q(9)]).volume();
        assert!((v - 4.0 * PI / 3.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn volume_scales_homogeneously() {
        let e = Ellipsoid::centered(vec![vec![q(2), q(1)], vec![q(1), q(3)]]).unwrap();
        let c = qr(7, 3);
        let ratio = e.scaled(&c).volume() / e.volume();
        assert!((ratio / (7.0f64 / 3.0).powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_examples() {
        let e = diag(&[q(4), q(1)]);
        assert_eq!(e.polar().unwrap(), diag(&[qr(1, 4), q(1)]));
        let id = diag(&[q(1), q(1)]);
        assert_eq!(id.polar().unwrap(), id);
        let shifted = id.translated(&[q(1), q(0)]);
        assert_eq!(shifted.polar(), Err(Error::NonCentered));
    }

    #[test]
    fn parallelepiped_of_disk_is_square() {
        let p = diag(&[q(1), q(1)]).inscribed_parallelepiped().unwrap();
        let h = p.half_edges();
        for x in h {
            assert!((x - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
        assert!((p.volume() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parallelepiped_of_scaled_ball_is_cube() {
        let n = 3;
        let e = Ellipsoid::centered(linalg::scale_mat(&linalg::identity(n), &qr(1, 3))).unwrap();
        let p = e.inscribed_parallelepiped().unwrap();
        for x in p.half_edges() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parallelepiped_of_stretched_ellipse() {
        let p = diag(&[q(1), qr(1, 4)]).inscribed_parallelepiped().unwrap();
        let h = p.half_edges();
        assert!((h[0] - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((h[1] - 2.0 / 2f64.sqrt()).abs() < 1e-12);
    }
}
