//! Convex bodies behind oracles: weak membership, strong separation,
//! support functions and the weak distance (gauge) oracle.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::norm::{enclose_f64, ExactNorm};
use crate::rational::{self, from_f64, lower_bound_f64, q, sqrt_ceil, sqrt_floor, to_f64, upper_bound_f64, QVec, Q};

/// `(a₀, r, R)`: `a₀ + r·B₂ⁿ ⊆ K ⊆ a₀ + R·B₂ⁿ`. An inner radius of zero
/// means only the outer ball is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Centering {
    #[serde(with = "rational::serde_q::vec")]
    pub center: QVec,
    #[serde(with = "rational::serde_q")]
    pub inner: Q,
    #[serde(with = "rational::serde_q")]
    pub outer: Q,
}

impl Centering {
    pub fn origin(n: usize, inner: Q, outer: Q) -> Self {
        Centering { center: vec![Q::zero(); n], inner, outer }
    }
}

/// Answer of a strong separation oracle at a point `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Separation {
    Inside,
    /// `c ≠ 0` with `⟨c, y⟩ ≤ ⟨c, x⟩` for every `y ∈ K`.
    Cut(Vec<f64>),
    /// The body is empty.
    Empty,
}

/// A convex body presented by oracles. Points are `f64` on the numeric
/// paths and exact rationals wherever a certificate is produced.
pub trait ConvexBody: Send + Sync {
    fn dim(&self) -> usize;

    fn centering(&self) -> Centering;

    /// Weak membership: `true` only if `x` is within about `slack` of `K`,
    /// `false` only if `x` is not deep inside `K`.
    fn contains(&self, x: &[f64], slack: f64) -> bool;

    fn separate(&self, x: &[f64]) -> Separation;

    /// `(h_K(u), argmax)` when available in closed form.
    fn support(&self, _dir: &[f64]) -> Option<(f64, Vec<f64>)> {
        None
    }

    /// Exact membership for rational points.
    fn contains_exact(&self, _x: &[Q]) -> Option<bool> {
        None
    }

    /// Exact gauge `‖x‖_K` (requires `0 ∈ int K`).
    fn exact_gauge(&self, _x: &[Q]) -> Option<ExactNorm> {
        None
    }

    /// Exact width `h_K(y) + h_K(−y)`.
    fn exact_width(&self, _y: &[Q]) -> Option<ExactNorm> {
        None
    }

    /// Gauge in floating point with a relative error bound, when known.
    fn gauge_f64(&self, _x: &[f64]) -> Option<(f64, f64)> {
        None
    }

    /// Exact restriction to `{p + W z}` in `z` coordinates (columns of `W`
    /// given as vectors). `None` when no closed form exists.
    fn restrict_exact(&self, _p: &[Q], _w: &[QVec]) -> Option<Result<Box<dyn ConvexBody>>> {
        None
    }

    fn is_empty(&self) -> bool {
        false
    }

    fn is_symmetric(&self) -> bool {
        false
    }

    /// `(r₀, R₀)` with `r₀·B₂ⁿ ⊆ K ⊆ R₀·B₂ⁿ`, i.e. `‖x‖/R₀ ≤ ‖x‖_K ≤ ‖x‖/r₀`.
    fn gauge_bounds(&self) -> Result<(Q, Q)> {
        let c = self.centering();
        let shift = sqrt_ceil(&rational::norm2_sq(&c.center), &Q::new(1.into(), 1_000_000.into()));
        let inner = &c.inner - &shift;
        if !inner.is_positive() {
            return Err(Error::InvalidBody("the origin is not interior with a known margin".into()));
        }
        Ok((inner, &c.outer + shift))
    }

    /// Weak distance oracle: a rational within `eps` of `‖x‖_K`.
    fn distance(&self, x: &[Q], eps: &Q) -> Result<Q> {
        if let Some(g) = self.exact_gauge(x) {
            return Ok(g.approx(eps));
        }
        if rational::is_zero_vec(x) {
            return Ok(Q::zero());
        }
        let (r0, big_r) = self.gauge_bounds()?;
        let norm_lo = sqrt_floor(&rational::norm2_sq(x), eps);
        let norm_hi = sqrt_ceil(&rational::norm2_sq(x), eps);
        let mut lo = &norm_lo / &big_r;
        let mut hi = &norm_hi / &r0;
        if self.contains_exact(x).is_some() {
            // bisection on exact membership of x / t
            while &hi - &lo > *eps {
                let mid = (&lo + &hi) / q(2);
                let y = rational::scale(x, &(Q::one() / &mid));
                if self.contains_exact(&y).unwrap_or(false) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok((lo + hi) / q(2));
        }
        let xf = rational::vec_to_f64(x);
        if let Some((g, rel)) = self.gauge_f64(&xf) {
            let (a, b) = enclose_f64(g, rel);
            if &b - &a <= *eps {
                return Ok((a + b) / q(2));
            }
        }
        Err(Error::InexactGauge)
    }
}

fn f64_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn f64_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `p` of an ℓ_p ball.
#[derive(Clone, Debug, PartialEq)]
pub enum LpIndex {
    Finite(Q),
    Infinity,
}

impl LpIndex {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" {
            return Ok(LpIndex::Infinity);
        }
        let p = rational::parse_q(&t)?;
        if p < Q::one() {
            return Err(Error::InvalidBody(format!("p must be at least 1, got {s}")));
        }
        Ok(LpIndex::Finite(p))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            LpIndex::Finite(p) => to_f64(p),
            LpIndex::Infinity => f64::INFINITY,
        }
    }

    /// Integer value of `p`, if any.
    pub fn integer(&self) -> Option<u32> {
        match self {
            LpIndex::Finite(p) if p.is_integer() => p.to_integer().to_u32(),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            LpIndex::Finite(p) => rational::fmt_q(p),
            LpIndex::Infinity => "inf".into(),
        }
    }
}

/// `scale · B_pⁿ`.
#[derive(Clone, Debug)]
pub struct LpBall {
    n: usize,
    p: LpIndex,
    scale: Q,
    scale_f: f64,
    inner: Q,
    outer: Q,
}

impl LpBall {
    pub fn new(n: usize, p: LpIndex, scale: Q) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::InvalidBody("ℓp ball scale must be positive".into()));
        }
        if n == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        let tol = Q::new(BigInt::one(), BigInt::from(1_000_000_000u64));
        let s2 = &scale * &scale;
        let nq = q(n as i64);
        let (inner, outer) = match (&p, p.integer()) {
            (LpIndex::Infinity, _) => (scale.clone(), sqrt_ceil(&(&s2 * &nq), &tol)),
            (_, Some(1)) => (sqrt_floor(&(&s2 / &nq), &tol), scale.clone()),
            (_, Some(2)) => (scale.clone(), scale.clone()),
            _ => {
                let pf = p.to_f64();
                let e = 0.5 - 1.0 / pf;
                let f = (n as f64).powf(e);
                let sf = to_f64(&scale);
                if pf >= 2.0 {
                    (scale.clone(), upper_bound_f64(sf * f))
                } else {
                    (lower_bound_f64(sf * f), scale.clone())
                }
            }
        };
        Ok(LpBall { n, scale_f: to_f64(&scale), p, scale, inner, outer })
    }

    pub fn p(&self) -> &LpIndex {
        &self.p
    }

    pub fn scale(&self) -> &Q {
        &self.scale
    }

    /// `‖x‖_p` in floating point.
    fn norm_f64(&self, x: &[f64]) -> f64 {
        lp_norm_f64(x, self.p.to_f64())
    }
}

pub(crate) fn lp_norm_f64(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return f64_norm(x);
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl ConvexBody for LpBall {
    fn dim(&self) -> usize {
        self.n
    }

    fn centering(&self) -> Centering {
        Centering::origin(self.n, self.inner.clone(), self.outer.clone())
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.norm_f64(x) <= self.scale_f * (1.0 + slack / to_f64(&self.outer))
    }

    fn separate(&self, x: &[f64]) -> Separation {
        if self.norm_f64(x) <= self.scale_f {
            return Separation::Inside;
        }
        let c: Vec<f64> = match &self.p {
            LpIndex::Infinity => {
                let (i, _) = x
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
                let mut c = vec![0.0; self.n];
                c[i] = x[i].signum();
                c
            }
            LpIndex::Finite(_) => {
                let pf = self.p.to_f64();
                let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                x.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() * (v.abs() / m).powf(pf - 1.0) }).collect()
            }
        };
        Separation::Cut(c)
    }

    fn support(&self, dir: &[f64]) -> Option<(f64, Vec<f64>)> {
        let n = self.n;
        let s = self.scale_f;
        match &self.p {
            LpIndex::Infinity => {
                let x: Vec<f64> = dir.iter().map(|d| if *d >= 0.0 { s } else { -s }).collect();
                Some((f64_dot(dir, &x), x))
            }
            LpIndex::Finite(_) if self.p.integer() == Some(1) => {
                let (i, _) = dir
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
                let mut x = vec![0.0; n];
                x[i] = if dir[i] >= 0.0 { s } else { -s };
                Some((s * dir[i].abs(), x))
            }
            LpIndex::Finite(_) => {
                let pf = self.p.to_f64();
                let qf = pf / (pf - 1.0);
                let dn = lp_norm_f64(dir, qf);
                if dn == 0.0 {
                    return Some((0.0, vec![0.0; n]));
                }
                let x: Vec<f64> = dir.iter().map(|d| s * d.signum() * (d.abs() / dn).powf(qf - 1.0)).collect();
                Some((s * dn, x))
            }
        }
    }

    fn contains_exact(&self, x: &[Q]) -> Option<bool> {
        self.exact_gauge(x).map(|g| g.le_q(&Q::one()))
    }

    fn exact_gauge(&self, x: &[Q]) -> Option<ExactNorm> {
        let inv = Q::one() / &self.scale;
        match (&self.p, self.p.integer()) {
            (LpIndex::Infinity, _) => {
                let m = x.iter().map(rational::abs).max().unwrap_or_else(Q::zero);
                Some(ExactNorm::rational(m * inv))
            }
            (_, Some(1)) => {
                let s: Q = x.iter().map(rational::abs).sum();
                Some(ExactNorm::rational(s * inv))
            }
            (_, Some(k)) => {
                let s: Q = x.iter().map(|v| num_traits::pow(rational::abs(v), k as usize)).sum();
                Some(ExactNorm::root(s, k).scaled(&inv))
            }
            _ => None,
        }
    }

    fn exact_width(&self, y: &[Q]) -> Option<ExactNorm> {
        let two_s = &self.scale * q(2);
        match (&self.p, self.p.integer()) {
            (LpIndex::Infinity, _) => {
                let s: Q = y.iter().map(rational::abs).sum();
                Some(ExactNorm::rational(s * two_s))
            }
            (_, Some(1)) => {
                let m = y.iter().map(rational::abs).max().unwrap_or_else(Q::zero);
                Some(ExactNorm::rational(m * two_s))
            }
            (_, Some(2)) => Some(ExactNorm::sqrt(rational::norm2_sq(y)).scaled(&two_s)),
            _ => None,
        }
    }

    fn gauge_f64(&self, x: &[f64]) -> Option<(f64, f64)> {
        Some((self.norm_f64(x) / self.scale_f, 1e-12))
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// `{x : A x ≤ b}`, bounded. Carries its vertex list.
#[derive(Clone, Debug)]
pub struct Polytope {
    a: QMat,
    b: QVec,
    vertices: Vec<QVec>,
    a_f: Vec<Vec<f64>>,
    b_f: Vec<f64>,
    row_norms: Vec<f64>,
    vertices_f: Vec<Vec<f64>>,
    centering: Centering,
    origin_interior: bool,
}

impl Polytope {
    /// A polytope with the origin strictly inside (every `b_i > 0`).
    pub fn new(a: QMat, b: QVec) -> Result<Self> {
        if b.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidBody("polytope needs 0 strictly inside (all b_i > 0)".into()));
        }
        let p = Self::general(a, b)?;
        if p.vertices.is_empty() {
            return Err(Error::InvalidBody("polytope is empty".into()));
        }
        Ok(p)
    }

    /// Any bounded `{x : A x ≤ b}`, possibly empty or lower dimensional.
    pub fn general(a: QMat, b: QVec) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidBody("A and b must have the same positive number of rows".into()));
        }
        let n = a[0].len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidBody("rows of A must have equal positive length".into()));
        }
        if a.iter().any(|r| rational::is_zero_vec(r)) {
            return Err(Error::InvalidBody("A has a zero row".into()));
        }
        if linalg::rank(&a) < n || has_recession_ray(&a) {
            return Err(Error::InvalidBody("polytope is unbounded".into()));
        }
        let vertices = enumerate_vertices(&a, &b);
        let origin_interior = b.iter().all(Signed::is_positive);
        let centering = polytope_centering(&a, &b, &vertices, origin_interior, n);
        let a_f: Vec<Vec<f64>> = a.iter().map(|r| rational::vec_to_f64(r)).collect();
        let row_norms = a_f.iter().map(|r| f64_norm(r)).collect();
        Ok(Polytope {
            b_f: rational::vec_to_f64(&b),
            vertices_f: vertices.iter().map(|v| rational::vec_to_f64(v)).collect(),
            a_f,
            row_norms,
            a,
            b,
            vertices,
            centering,
            origin_interior,
        })
    }

    /// `{x : |⟨a_i, x⟩| ≤ 1}` for the given normals.
    pub fn symmetric(normals: &[QVec]) -> Result<Self> {
        let mut a = Vec::with_capacity(2 * normals.len());
        for v in normals {
            a.push(v.clone());
            a.push(rational::neg(v));
        }
        let b = vec![Q::one(); a.len()];
        Self::new(a, b)
    }

    pub fn a(&self) -> &QMat {
        &self.a
    }

    pub fn b(&self) -> &QVec {
        &self.b
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    fn is_symmetric_set(&self) -> bool {
        self.vertices.iter().all(|v| {
            let m = rational::neg(v);
            self.vertices.contains(&m)
        })
    }

    fn max_violation(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, row) in self.a_f.iter().enumerate() {
            let v = (f64_dot(row, x) - self.b_f[i]) / self.row_norms[i];
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

fn subsets(m: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), f);
}

/// Whether `{d : A d ≤ 0}` contains a nonzero direction (rank(A) = n).
fn has_recession_ray(a: &[QVec]) -> bool {
    let n = a[0].len();
    if n == 1 {
        let pos = a.iter().any(|r| r[0].is_positive());
        let neg = a.iter().any(|r| r[0].is_negative());
        return !(pos && neg);
    }
    let mut found = false;
    subsets(a.len(), n - 1, &mut |idx| {
        if found {
            return;
        }
        let rows: QMat = idx.iter().map(|&i| a[i].clone()).collect();
        let ker = linalg::kernel(&rows, n);
        if ker.len() != 1 {
            return;
        }
        let d = &ker[0];
        for sign in [Q::one(), -Q::one()] {
            let dd = rational::scale(d, &sign);
            if a.iter().all(|r| !rational::dot(r, &dd).is_positive()) {
                found = true;
            }
        }
    });
    found
}

fn enumerate_vertices(a: &[QVec], b: &[Q]) -> Vec<QVec> {
    let n = a[0].len();
    let mut out: Vec<QVec> = Vec::new();
    subsets(a.len(), n, &mut |idx| {
        let rows: QMat = idx.iter().map(|&i| a[i].clone()).collect();
        if linalg::det(&rows).is_zero() {
            return;
        }
        let rhs: QVec = idx.iter().map(|&i| b[i].clone()).collect();
        let Some(x) = linalg::solve(&rows, &rhs) else { return };
        if a.iter().zip(b).all(|(r, bi)| rational::dot(r, &x) <= *bi) && !out.contains(&x) {
            out.push(x);
        }
    });
    out.sort();
    out
}

fn polytope_centering(a: &[QVec], b: &[Q], vertices: &[QVec], origin_interior: bool, n: usize) -> Centering {
    let tol = Q::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    if vertices.is_empty() {
        return Centering::origin(n, Q::zero(), Q::zero());
    }
    let center: QVec = if origin_interior {
        vec![Q::zero(); n]
    } else {
        let k = q(vertices.len() as i64);
        (0..n).map(|j| vertices.iter().map(|v| v[j].clone()).sum::<Q>() / &k).collect()
    };
    let far = vertices.iter().map(|v| rational::norm2_sq(&rational::sub(v, &center))).max().unwrap();
    let outer = sqrt_ceil(&far, &tol);
    // distance from the center to each facet hyperplane
    let inner = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let s = bi - rational::dot(r, &center);
            if !s.is_positive() {
                return Q::zero();
            }
            sqrt_floor(&(&s * &s / rational::norm2_sq(r)), &tol)
        })
        .min()
        .unwrap();
    Centering { center, inner, outer }
}

impl ConvexBody for Polytope {
    fn dim(&self) -> usize {
        self.a[0].len()
    }

    fn centering(&self) -> Centering {
        self.centering.clone()
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        !self.vertices.is_empty() && self.max_violation(x).1 <= slack
    }

    fn separate(&self, x: &[f64]) -> Separation {
        if self.vertices.is_empty() {
            return Separation::Empty;
        }
        let (i, v) = self.max_violation(x);
        if v <= 0.0 {
            Separation::Inside
        } else {
            Separation::Cut(self.a_f[i].clone())
        }
    }

    fn support(&self, dir: &[f64]) -> Option<(f64, Vec<f64>)> {
        let mut best: Option<(f64, &Vec<f64>)> = None;
        for v in &self.vertices_f {
            let h = f64_dot(dir, v);
            if best.map_or(true, |(b, _)| h > b) {
                best = Some((h, v));
            }
        }
        best.map(|(h, v)| (h, v.clone()))
    }

    fn contains_exact(&self, x: &[Q]) -> Option<bool> {
        Some(!self.vertices.is_empty() && self.a.iter().zip(&self.b).all(|(r, bi)| rational::dot(r, x) <= *bi))
    }

    fn exact_gauge(&self, x: &[Q]) -> Option<ExactNorm> {
        if !self.origin_interior {
            return None;
        }
        let g = self.a.iter().zip(&self.b).map(|(r, bi)| rational::dot(r, x) / bi).max().unwrap().max(Q::zero());
        Some(ExactNorm::rational(g))
    }

    fn exact_width(&self, y: &[Q]) -> Option<ExactNorm> {
        if self.vertices.is_empty() {
            return Some(ExactNorm::zero());
        }
        let vals: Vec<Q> = self.vertices.iter().map(|v| rational::dot(v, y)).collect();
        let hi = vals.iter().max().unwrap();
        let lo = vals.iter().min().unwrap();
        Some(ExactNorm::rational(hi - lo))
    }

    fn gauge_f64(&self, x: &[f64]) -> Option<(f64, f64)> {
        if !self.origin_interior {
            return None;
        }
        let g = self.a_f.iter().zip(&self.b_f).map(|(r, b)| f64_dot(r, x) / b).fold(0.0f64, f64::max);
        Some((g, 1e-12))
    }

    fn restrict_exact(&self, p: &[Q], w: &[QVec]) -> Option<Result<Box<dyn ConvexBody>>> {
        // {z : (A W) z ≤ b − A p}
        if w.is_empty() {
            return None;
        }
        let aw: QMat = self.a.iter().map(|r| w.iter().map(|c| rational::dot(r, c)).collect()).collect();
        let bp: QVec = self.a.iter().zip(&self.b).map(|(r, bi)| bi - rational::dot(r, p)).collect();
        // drop rows that vanish on the subspace (they only decide emptiness)
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (r, bi) in aw.into_iter().zip(bp) {
            if rational::is_zero_vec(&r) {
                if bi.is_negative() {
                    return Some(Ok(Box::new(EmptyBody { n: w.len() })));
                }
            } else {
                rows.push(r);
                rhs.push(bi);
            }
        }
        Some(Polytope::general(rows, rhs).map(|p| {
            if p.vertices.is_empty() {
                Box::new(EmptyBody { n: w.len() }) as Box<dyn ConvexBody>
            } else {
                Box::new(p) as Box<dyn ConvexBody>
            }
        }))
    }

    fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn is_symmetric(&self) -> bool {
        self.is_symmetric_set()
    }
}

/// The empty body in dimension `n`.
#[derive(Clone, Debug)]
pub struct EmptyBody {
    pub n: usize,
}

impl ConvexBody for EmptyBody {
    fn dim(&self) -> usize {
        self.n
    }

    fn centering(&self) -> Centering {
        Centering::origin(self.n, Q::zero(), Q::zero())
    }

    fn contains(&self, _x: &[f64], _slack: f64) -> bool {
        false
    }

    fn separate(&self, _x: &[f64]) -> Separation {
        Separation::Empty
    }

    fn contains_exact(&self, _x: &[Q]) -> Option<bool> {
        Some(false)
    }

    fn is_empty(&self) -> bool {
        true
    }
}

/// An ellipsoid as a body, with cached inverse and floating copies.
#[derive(Clone, Debug)]
pub struct EllipsoidBody {
    e: Ellipsoid,
    inv: QMat,
    a_f: DMatrix<f64>,
    inv_f: DMatrix<f64>,
    c_f: DVector<f64>,
    inner: Q,
    outer: Q,
    outer_f: f64,
}

impl EllipsoidBody {
    pub fn new(e: Ellipsoid) -> Result<Self> {
        let inv = linalg::inverse(e.shape())?;
        let a_f = e.shape_f64();
        let eig = a_f.clone().symmetric_eigenvalues();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &v in eig.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let inner = lower_bound_f64((1.0 / hi.sqrt()) * (1.0 - 1e-9));
        let outer_f = (1.0 / lo.sqrt()) * (1.0 + 1e-9);
        Ok(EllipsoidBody {
            inv_f: linalg::to_dmatrix(&inv),
            c_f: e.center_f64(),
            inner,
            outer: upper_bound_f64(outer_f),
            outer_f,
            a_f,
            inv,
            e,
        })
    }

    pub fn ellipsoid(&self) -> &Ellipsoid {
        &self.e
    }

    fn quad_f64(&self, x: &[f64]) -> f64 {
        let d = DVector::from_column_slice(x) - &self.c_f;
        (d.transpose() * &self.a_f * &d)[(0, 0)]
    }
}

impl ConvexBody for EllipsoidBody {
    fn dim(&self) -> usize {
        self.e.dim()
    }

    fn centering(&self) -> Centering {
        Centering { center: self.e.center().clone(), inner: self.inner.clone(), outer: self.outer.clone() }
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.quad_f64(x).max(0.0).sqrt() <= 1.0 + slack / self.outer_f
    }

    fn separate(&self, x: &[f64]) -> Separation {
        if self.quad_f64(x) <= 1.0 {
            return Separation::Inside;
        }
        let d = DVector::from_column_slice(x) - &self.c_f;
        Separation::Cut((&self.a_f * d).iter().copied().collect())
    }

    fn support(&self, dir: &[f64]) -> Option<(f64, Vec<f64>)> {
        let u = DVector::from_column_slice(dir);
        let iu = &self.inv_f * &u;
        let s = u.dot(&iu).max(0.0).sqrt();
        let c = u.dot(&self.c_f);
        if s == 0.0 {
            return Some((c, self.c_f.iter().copied().collect()));
        }
        let x = &self.c_f + iu / s;
        Some((c + s, x.iter().copied().collect()))
    }

    fn contains_exact(&self, x: &[Q]) -> Option<bool> {
        Some(self.e.contains(x))
    }

    fn exact_gauge(&self, x: &[Q]) -> Option<ExactNorm> {
        if self.e.is_centered() {
            Some(self.e.gauge(x))
        } else {
            None
        }
    }

    fn exact_width(&self, y: &[Q]) -> Option<ExactNorm> {
        Some(ExactNorm::sqrt(linalg::quad_form(&self.inv, y) * q(4)))
    }

    fn gauge_f64(&self, x: &[f64]) -> Option<(f64, f64)> {
        // ‖x‖_K solves α t² + 2β t − γ = 0 for the shifted ellipsoid
        let xv = DVector::from_column_slice(x);
        let ax = &self.a_f * &xv;
        let alpha = 1.0 - (self.c_f.transpose() * &self.a_f * &self.c_f)[(0, 0)];
        if alpha <= 0.0 {
            return None;
        }
        let beta = ax.dot(&self.c_f);
        let gamma = ax.dot(&xv);
        let t = (-beta + (beta * beta + alpha * gamma).max(0.0).sqrt()) / alpha;
        Some((t, 1e-10))
    }

    fn restrict_exact(&self, p: &[Q], w: &[QVec]) -> Option<Result<Box<dyn ConvexBody>>> {
        if w.is_empty() {
            return None;
        }
        Some(restrict_ellipsoid(&self.e, p, w))
    }

    fn is_symmetric(&self) -> bool {
        self.e.is_centered()
    }
}

/// `{z : (p + W z − a)ᵗ A (p + W z − a) ≤ 1}` as an ellipsoid, a point or
/// the empty set.
fn restrict_ellipsoid(e: &Ellipsoid, p: &[Q], w: &[QVec]) -> Result<Box<dyn ConvexBody>> {
    let k = w.len();
    let a = e.shape();
    let d = rational::sub(p, e.center());
    let aw: Vec<QVec> = w.iter().map(|c| linalg::mat_vec(a, c)).collect();
    let m: QMat = w.iter().map(|ci| aw.iter().map(|awj| rational::dot(ci, awj)).collect()).collect();
    let g: QVec = aw.iter().map(|awj| rational::dot(&d, awj)).collect();
    // minimizer z₀ = −M⁻¹ g, value c₀ = dᵗAd − gᵗM⁻¹g
    let minv = linalg::inverse(&m)?;
    let z0 = rational::neg(&linalg::mat_vec(&minv, &g));
    let c0 = linalg::quad_form(a, &d) - linalg::quad_form(&minv, &g);
    let rest = Q::one() - c0;
    if rest.is_negative() {
        return Ok(Box::new(EmptyBody { n: k }));
    }
    if rest.is_zero() {
        return Ok(Box::new(point_body(&z0)?));
    }
    let shape = linalg::scale_mat(&m, &(Q::one() / rest));
    Ok(Box::new(EllipsoidBody::new(Ellipsoid::new(shape, z0)?)?))
}

/// `{z}` as a degenerate polytope.
pub fn point_body(z: &[Q]) -> Result<Polytope> {
    let k = z.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..k {
        let mut e = vec![Q::zero(); k];
        e[i] = Q::one();
        b.push(z[i].clone());
        a.push(e.clone());
        b.push(-z[i].clone());
        a.push(rational::neg(&e));
    }
    Polytope::general(a, b)
}

/// Concrete bodies with analytic oracles.
#[derive(Clone, Debug)]
pub enum ConcreteBody {
    Lp(LpBall),
    Polytope(Polytope),
    Ellipsoid(EllipsoidBody),
    /// `K + s`.
    Shifted(Box<ConcreteBody>, QVec),
}

impl ConcreteBody {
    pub fn lp(n: usize, p: LpIndex, scale: Q) -> Result<Self> {
        Ok(ConcreteBody::Lp(LpBall::new(n, p, scale)?))
    }

    pub fn polytope(a: QMat, b: QVec) -> Result<Self> {
        Ok(ConcreteBody::Polytope(Polytope::new(a, b)?))
    }

    pub fn ellipsoid(e: Ellipsoid) -> Result<Self> {
        Ok(ConcreteBody::Ellipsoid(EllipsoidBody::new(e)?))
    }

    /// `K + s`; polytopes and ellipsoids absorb the shift exactly.
    pub fn shifted(self, s: QVec) -> Result<Self> {
        if s.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: s.len() });
        }
        if rational::is_zero_vec(&s) {
            return Ok(self);
        }
        match self {
            ConcreteBody::Polytope(p) => {
                let b: QVec = p.a.iter().zip(&p.b).map(|(r, bi)| bi + rational::dot(r, &s)).collect();
                Ok(ConcreteBody::Polytope(Polytope::general(p.a.clone(), b)?))
            }
            ConcreteBody::Ellipsoid(e) => ConcreteBody::ellipsoid(e.e.translated(&s)),
            ConcreteBody::Shifted(inner, t) => Ok(ConcreteBody::Shifted(inner, rational::add(&t, &s))),
            other => Ok(ConcreteBody::Shifted(Box::new(other), s)),
        }
    }

    fn inner(&self) -> &dyn ConvexBody {
        match self {
            ConcreteBody::Lp(b) => b,
            ConcreteBody::Polytope(b) => b,
            ConcreteBody::Ellipsoid(b) => b,
            ConcreteBody::Shifted(b, _) => b.as_ref(),
        }
    }

    fn shift(&self) -> Option<&QVec> {
        match self {
            ConcreteBody::Shifted(_, s) => Some(s),
            _ => None,
        }
    }

    fn unshift_f(&self, x: &[f64]) -> Vec<f64> {
        match self.shift() {
            Some(s) => x.iter().zip(s).map(|(a, b)| a - to_f64(b)).collect(),
            None => x.to_vec(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConcreteBody::Lp(_) => "lp",
            ConcreteBody::Polytope(_) => "polytope",
            ConcreteBody::Ellipsoid(_) => "ellipsoid",
            ConcreteBody::Shifted(..) => "shifted",
        }
    }
}

impl ConvexBody for ConcreteBody {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn centering(&self) -> Centering {
        let mut c = self.inner().centering();
        if let Some(s) = self.shift() {
            c.center = rational::add(&c.center, s);
        }
        c
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        self.inner().contains(&self.unshift_f(x), slack)
    }

    fn separate(&self, x: &[f64]) -> Separation {
        self.inner().separate(&self.unshift_f(x))
    }

    fn support(&self, dir: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (h, x) = self.inner().support(dir)?;
        match self.shift() {
            Some(s) => {
                let sf = rational::vec_to_f64(s);
                Some((h + f64_dot(dir, &sf), x.iter().zip(&sf).map(|(a, b)| a + b).collect()))
            }
            None => Some((h, x)),
        }
    }

    fn contains_exact(&self, x: &[Q]) -> Option<bool> {
        match self.shift() {
            Some(s) => self.inner().contains_exact(&rational::sub(x, s)),
            None => self.inner().contains_exact(x),
        }
    }

    fn exact_gauge(&self, x: &[Q]) -> Option<ExactNorm> {
        match self.shift() {
            Some(_) => None,
            None => self.inner().exact_gauge(x),
        }
    }

    fn exact_width(&self, y: &[Q]) -> Option<ExactNorm> {
        self.inner().exact_width(y)
    }

    fn gauge_f64(&self, x: &[f64]) -> Option<(f64, f64)> {
        match self.shift() {
            Some(_) => None,
            None => self.inner().gauge_f64(x),
        }
    }

    fn restrict_exact(&self, p: &[Q], w: &[QVec]) -> Option<Result<Box<dyn ConvexBody>>> {
        match self.shift() {
            Some(s) => self.inner().restrict_exact(&rational::sub(p, s), w),
            None => self.inner().restrict_exact(p, w),
        }
    }

    fn is_empty(&self) -> bool {
        self.inner().is_empty()
    }

    fn is_symmetric(&self) -> bool {
        self.shift().is_none() && self.inner().is_symmetric()
    }
}

/// `K ∩ {p + W z}` in the coordinates `z`. Separating directions are the
/// parent's cuts pulled back by `Wᵗ`.
pub struct Sliced<'a> {
    body: &'a dyn ConvexBody,
    p: QVec,
    w: Vec<QVec>,
    p_f: DVector<f64>,
    w_f: DMatrix<f64>,
    centering: Centering,
    empty: bool,
}

impl<'a> Sliced<'a> {
    /// Slice through `p` spanned by the columns `w` (linearly independent).
    pub fn new(body: &'a dyn ConvexBody, p: QVec, w: Vec<QVec>) -> Result<Self> {
        let n = body.dim();
        if p.len() != n || w.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: p.len() });
        }
        let k = w.len();
        let w_f = DMatrix::from_fn(n, k, |i, j| to_f64(&w[j][i]));
        let p_f = DVector::from_vec(rational::vec_to_f64(&p));
        let c = body.centering();
        let a0 = DVector::from_vec(rational::vec_to_f64(&c.center));
        let outer = to_f64(&c.outer);
        let (z0, residual, sigma_min) = if k == 0 {
            (DVector::zeros(0), (&a0 - &p_f).norm(), 1.0)
        } else {
            let svd = w_f.clone().svd(true, true);
            let z0 = svd.solve(&(&a0 - &p_f), 1e-14).expect("least squares");
            let res = (&w_f * &z0 + &p_f - &a0).norm();
            let smin = svd.singular_values.iter().fold(f64::INFINITY, |m, &s| m.min(s));
            (z0, res, smin)
        };
        let rho2 = outer * outer - residual * residual;
        let empty = body.is_empty() || rho2 < -1e-12 * outer * outer;
        let rz = rho2.max(0.0).sqrt() / sigma_min;
        let centering = Centering {
            center: z0.iter().map(|&v| from_f64(v)).collect(),
            inner: Q::zero(),
            outer: upper_bound_f64(rz * (1.0 + 1e-9) + 1e-12),
        };
        Ok(Sliced { body, p, w, p_f, w_f, centering, empty })
    }

    /// Ambient point `p + W z`.
    pub fn lift(&self, z: &[Q]) -> QVec {
        let mut x = self.p.clone();
        for (zi, c) in z.iter().zip(&self.w) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += zi * ci;
            }
        }
        x
    }

    pub fn lift_f64(&self, z: &[f64]) -> Vec<f64> {
        let x = &self.p_f + &self.w_f * DVector::from_column_slice(z);
        x.iter().copied().collect()
    }

    /// Slice coordinates of an ambient point of the subspace.
    pub fn coords(&self, x: &[Q]) -> Option<QVec> {
        let d = rational::sub(x, &self.p);
        linalg::solve(&linalg::from_columns(&self.w), &d)
    }
}

impl ConvexBody for Sliced<'_> {
    fn dim(&self) -> usize {
        self.w.len()
    }

    fn centering(&self) -> Centering {
        self.centering.clone()
    }

    fn contains(&self, z: &[f64], slack: f64) -> bool {
        !self.empty && self.body.contains(&self.lift_f64(z), slack)
    }

    fn separate(&self, z: &[f64]) -> Separation {
        if self.empty {
            return Separation::Empty;
        }
        match self.body.separate(&self.lift_f64(z)) {
            Separation::Inside => Separation::Inside,
            Separation::Empty => Separation::Empty,
            Separation::Cut(c) => {
                let cz = self.w_f.transpose() * DVector::from_vec(c.clone());
                let scale = f64_norm(&c) * self.w_f.norm().max(1.0);
                if cz.norm() <= 1e-12 * scale {
                    Separation::Empty
                } else {
                    Separation::Cut(cz.iter().copied().collect())
                }
            }
        }
    }

    fn contains_exact(&self, z: &[Q]) -> Option<bool> {
        if self.empty {
            return Some(false);
        }
        self.body.contains_exact(&self.lift(z))
    }

    fn is_empty(&self) -> bool {
        self.empty
    }
}

/// Separation oracle for `K ∩ {x : A x = b}` (Lemma-style slice); the
/// subspace must be nonempty.
pub fn slice_separation<'a>(body: &'a dyn ConvexBody, a: &[QVec], b: &[Q]) -> Result<Sliced<'a>> {
    let n = body.dim();
    let p = if a.is_empty() {
        vec![Q::zero(); n]
    } else {
        linalg::solve(a, b).ok_or_else(|| Error::InvalidArgument("affine subspace is empty".into()))?
    };
    let w = if a.is_empty() { linalg::identity(n) } else { linalg::kernel(a, n) };
    Sliced::new(body, p, w)
}

/// Restriction to `{p + W z}`: exact for concrete bodies, otherwise the
/// separation-oracle slice.
pub fn restrict<'a>(body: &'a dyn ConvexBody, p: &[Q], w: &[QVec]) -> Result<Box<dyn ConvexBody + 'a>> {
    if let Some(r) = body.restrict_exact(p, w) {
        return r;
    }
    Ok(Box::new(Sliced::new(body, p.to_vec(), w.to_vec())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qr, qvec};

    fn ball(n: usize, p: &str) -> ConcreteBody {
        ConcreteBody::lp(n, LpIndex::parse(p).unwrap(), q(1)).unwrap()
    }

    #[test]
    fn lp_gauges_are_exact() {
        let x = qvec(&[3, -4]);
        assert_eq!(ball(2, "2").exact_gauge(&x).unwrap(), ExactNorm::rational(q(5)));
        assert_eq!(ball(2, "1").exact_gauge(&x).unwrap(), ExactNorm::rational(q(7)));
        assert_eq!(ball(2, "inf").exact_gauge(&x).unwrap(), ExactNorm::rational(q(4)));
        let b3 = ball(2, "3");
        assert_eq!(b3.exact_gauge(&x).unwrap(), ExactNorm::root(q(91), 3));
    }

    #[test]
    fn lp_centering_brackets() {
        let c = ball(4, "inf").centering();
        assert_eq!(c.inner, q(1));
        assert!(c.outer >= q(2) && c.outer < qr(2001, 1000));
        let c1 = ball(4, "1").centering();
        assert!(c1.inner <= qr(1, 2) && c1.inner > qr(499, 1000));
    }

    #[test]
    fn sandwich_along_axes() {
        for body in [ball(3, "1"), ball(3, "2"), ball(3, "inf"), ball(3, "3/2")] {
            let c = body.centering();
            let (r, big_r) = (to_f64(&c.inner), to_f64(&c.outer));
            for i in 0..3 {
                let mut u = vec![0.0; 3];
                u[i] = r - 1e-6;
                assert!(body.contains(&u, 0.0));
                u[i] = big_r + 1e-3;
                assert!(!body.contains(&u, 0.0));
            }
        }
    }

    #[test]
    fn polytope_gauge_and_vertices() {
        let p = ConcreteBody::polytope(vec![qvec(&[-1, 0]), qvec(&[0, -1]), qvec(&[1, 1])], vec![q(1), q(1), q(1)])
            .unwrap();
        let ConcreteBody::Polytope(ref poly) = p else { unreachable!() };
        assert_eq!(poly.vertices().len(), 3);
        assert_eq!(p.exact_gauge(&qvec(&[2, 2])).unwrap(), ExactNorm::rational(q(4)));
        assert!(ConcreteBody::polytope(vec![qvec(&[1, 0]), qvec(&[-1, 0])], vec![q(1), q(1)]).is_err());
        assert!(ConcreteBody::polytope(vec![qvec(&[1])], vec![q(0)]).is_err());
    }

    #[test]
    fn shifted_polytope_membership_is_exact() {
        let cube =
            ConcreteBody::polytope(vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[0, -1])], vec![q(1); 4])
                .unwrap()
                .shifted(qvec(&[1, 1]))
                .unwrap();
        assert_eq!(cube.contains_exact(&qvec(&[2, 0])), Some(true));
        assert_eq!(cube.contains_exact(&qvec(&[-1, 0])), Some(false));
        assert_eq!(cube.centering().center.len(), 2);
    }

    #[test]
    fn distance_by_bisection_on_shifted_ball() {
        let b = ball(2, "2").shifted(vec![qr(1, 2), q(0)]).unwrap();
        let eps = qr(1, 1000);
        let d = b.distance(&qvec(&[3, 0]), &eps).unwrap();
        // ‖(3,0)‖ relative to the disk centred at (1/2, 0): 3 / 1.5 = 2
        assert!((to_f64(&d) - 2.0).abs() <= 1e-3);
    }

    #[test]
    fn shifted_ellipsoid_float_gauge() {
        let e = Ellipsoid::new(linalg::identity(2), vec![qr(1, 2), q(0)]).unwrap();
        let b = ConcreteBody::ellipsoid(e).unwrap();
        let (g, _) = b.gauge_f64(&[3.0, 0.0]).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slice_examples() {
        let b3 = ball(3, "2");
        let s = slice_separation(&b3, &[qvec(&[0, 0, 1])], &[q(0)]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&[0.6, 0.6], 0.0));
        assert!(!s.contains(&[0.8, 0.8], 0.0));

        let b2 = ball(2, "2");
        let s = slice_separation(&b2, &[qvec(&[1, 0])], &[q(2)]).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.separate(&[0.0]), Separation::Empty);

        let cube = ball(3, "inf");
        let s = slice_separation(&cube, &[qvec(&[1, 1, 1])], &[q(0)]).unwrap();
        let z = s.coords(&[qr(1, 2), qr(-1, 2), q(0)]).unwrap();
        assert_eq!(s.contains_exact(&z), Some(true));
        assert!(s.contains(&rational::vec_to_f64(&z), 0.0));
    }

    #[test]
    fn exact_restriction_of_ellipsoid_and_polytope() {
        let e = ConcreteBody::ellipsoid(Ellipsoid::ball(2, &q(1))).unwrap();
        let line = restrict(&e, &qvec(&[0, 1]), &[qvec(&[1, 0])]).unwrap();
        // tangent line touches the disk in a single point
        assert_eq!(line.contains_exact(&[q(0)]), Some(true));
        assert_eq!(line.contains_exact(&[qr(1, 100)]), Some(false));
        let miss = restrict(&e, &qvec(&[0, 2]), &[qvec(&[1, 0])]).unwrap();
        assert!(miss.is_empty());

        let cube =
            ConcreteBody::polytope(vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[0, -1])], vec![q(1); 4])
                .unwrap();
        let seg = restrict(&cube, &qvec(&[0, 1]), &[qvec(&[1, 0])]).unwrap();
        assert_eq!(seg.contains_exact(&[q(1)]), Some(true));
        assert_eq!(seg.contains_exact(&[qr(3, 2)]), Some(false));
    }

    #[test]
    fn widths() {
        let y = qvec(&[1, 2]);
        assert_eq!(ball(2, "inf").exact_width(&y).unwrap(), ExactNorm::rational(q(6)));
        assert_eq!(ball(2, "1").exact_width(&y).unwrap(), ExactNorm::rational(q(4)));
        assert_eq!(ball(2, "2").exact_width(&y).unwrap(), ExactNorm::sqrt(q(20)));
    }

    #[test]
    fn separation_cuts_are_valid() {
        for body in [ball(2, "1"), ball(2, "2"), ball(2, "inf"), ball(2, "3")] {
            let x = [1.3, -0.9];
            let Separation::Cut(c) = body.separate(&x) else { panic!("outside point") };
            let (h, _) = body.support(&c).unwrap();
            assert!(h <= f64_dot(&c, &x) + 1e-12);
        }
    }
}
