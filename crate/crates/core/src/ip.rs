//! Integer feasibility `K ∩ L ≠ ∅` by basis refinement, ellipsoidal
//! localization and branching on hyperplanes orthogonal to a short vector
//! of the dual lattice in the width norm.
//!
//! Every node works in the coefficient coordinates of its own lattice, so
//! the lattice is always `Zᵏ`; Euclidean geometry of the original space is
//! carried by a Gram matrix together with an enclosing ball.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::body::{restrict, ConvexBody};
use crate::convex::{gls_round, minimize, AffineMax, FloatEllipsoid, Rounding, Stop};
use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::lattice::{saturate, solve_integer_row, LatticeBasis};
use crate::linalg::{self, QMat};
use crate::mell::{build_cover, rational_ellipsoid, CoverBudget, DifferencePolar};
use crate::rational::{self, lower_bound_f64, q, serde_q, to_f64, upper_bound_f64, QVec, Q};
use crate::solvers::{shortest_vectors, EnumCovering, LatticeEnumerator};
use crate::voronoi::{svp_ellip, EnumCap, InnerProduct, PreparedLattice};

/// Number of branching hyperplanes allowed past the lower end of the range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FBound {
    /// `n(n+1)√n`, guaranteed by the sandwiching ellipsoid.
    Safe,
    /// `n^{4/3}·(1 + ln n)`; no guarantee, for experiments only.
    Rudelson,
}

impl FBound {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "safe" => Ok(FBound::Safe),
            "rudelson" => Ok(FBound::Rudelson),
            _ => Err(Error::InvalidArgument(format!("unknown flatness bound '{s}'"))),
        }
    }

    pub fn value(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            FBound::Safe => nf * (nf + 1.0) * nf.sqrt(),
            FBound::Rudelson => nf.powf(4.0 / 3.0) * (1.0 + nf.ln()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlatnessConfig {
    pub f_bound: FBound,
    pub max_nodes: usize,
    pub cap: EnumCap,
}

impl Default for FlatnessConfig {
    fn default() -> Self {
        FlatnessConfig { f_bound: FBound::Safe, max_nodes: 100_000, cap: EnumCap::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IpStatus {
    Feasible,
    Infeasible,
    BudgetExceeded,
}

#[derive(Clone, Debug, Serialize)]
pub struct IpResult {
    pub status: IpStatus,
    /// A point of `K ∩ L` when feasible.
    #[serde(serialize_with = "ser_opt_vec")]
    pub point: Option<QVec>,
    /// Its coefficients in the input basis.
    #[serde(serialize_with = "ser_opt_int")]
    pub coeffs: Option<Vec<BigInt>>,
    pub nodes: usize,
    pub max_depth: usize,
}

fn ser_opt_vec<S: serde::Serializer>(v: &Option<QVec>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => serde_q::vec::serialize(v, s),
        None => s.serialize_none(),
    }
}

fn ser_opt_int<S: serde::Serializer>(v: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_ints(v, s),
        None => s.serialize_none(),
    }
}

fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), s)
}

/// The lattice `origin + Σ zᵢ·colᵢ` of a node, its Gram matrix, and a ball
/// `{‖z − a0‖_G² ≤ r2}` containing the body.
#[derive(Clone, Debug)]
struct Frame {
    origin: QVec,
    cols: Vec<QVec>,
    gram: QMat,
    a0: QVec,
    r2: Q,
}

impl Frame {
    fn root(body: &dyn ConvexBody, lattice: &LatticeBasis) -> Result<Self> {
        let n = body.dim();
        if lattice.dim() != n || !lattice.is_square() {
            return Err(Error::InvalidArgument("a full-rank lattice of the body's dimension is required".into()));
        }
        let c = body.centering();
        let a0 = lattice
            .coords_of(&c.center)
            .ok_or_else(|| Error::InvalidArgument("centre outside the lattice span".into()))?;
        Ok(Frame {
            origin: vec![Q::zero(); n],
            cols: lattice.columns().to_vec(),
            gram: lattice.gram(),
            a0,
            r2: &c.outer * &c.outer,
        })
    }

    fn dim(&self) -> usize {
        self.cols.len()
    }

    fn lift(&self, z: &[Q]) -> QVec {
        let mut x = self.origin.clone();
        for (zi, c) in z.iter().zip(&self.cols) {
            for (xi, ci) in x.iter_mut().zip(c) {
                *xi += zi * ci;
            }
        }
        x
    }

    /// The frame of `{p + U w}` with integer `p` and columns `U`; `None`
    /// when the affine subspace misses the enclosing ball.
    fn restrict(&self, p: &[BigInt], u: &[Vec<BigInt>]) -> Result<Option<Frame>> {
        let pq = rational::int_vec_to_q(p);
        let uq: Vec<QVec> = u.iter().map(|c| rational::int_vec_to_q(c)).collect();
        let gu: Vec<QVec> = uq.iter().map(|c| linalg::mat_vec(&self.gram, c)).collect();
        let gram: QMat = uq.iter().map(|a| gu.iter().map(|b| rational::dot(a, b)).collect()).collect();
        let d = rational::sub(&self.a0, &pq);
        let rhs: QVec = gu.iter().map(|g| rational::dot(g, &d)).collect();
        let w = if uq.is_empty() { Vec::new() } else { linalg::solve(&gram, &rhs).ok_or(Error::RankDeficient)? };
        let mut off = rational::neg(&d);
        for (wi, c) in w.iter().zip(&uq) {
            for (oi, ci) in off.iter_mut().zip(c) {
                *oi += wi * ci;
            }
        }
        let r2 = &self.r2 - linalg::quad_form(&self.gram, &off);
        if r2.is_negative() {
            return Ok(None);
        }
        let cols = uq
            .iter()
            .map(|c| {
                let mut v = vec![Q::zero(); self.origin.len()];
                for (ci, col) in c.iter().zip(&self.cols) {
                    for (vi, x) in v.iter_mut().zip(col) {
                        *vi += ci * x;
                    }
                }
                v
            })
            .collect();
        Ok(Some(Frame { origin: self.lift(&pq), cols, gram, a0: w, r2 }))
    }
}

enum Refined {
    Infeasible,
    /// A sublattice of lower rank through `p` spanned by columns `u`.
    Sub {
        p: Vec<BigInt>,
        u: Vec<Vec<BigInt>>,
    },
    Unchanged,
}

/// CVP gate and the sublattice generated by vectors of length at most `2R`.
fn refine(frame: &Frame, cap: EnumCap) -> Result<Refined> {
    let k = frame.dim();
    let lat = PreparedLattice::new(&LatticeBasis::identity(k), &InnerProduct::new(frame.gram.clone())?)?;
    let (d2, ties) = lat.cvp(&frame.a0)?;
    if d2 > frame.r2 {
        return Ok(Refined::Infeasible);
    }
    let p = ties[0].coeffs.clone();
    // span{v : ‖v‖ ≤ 2R} is spanned by the minima λᵢ ≤ 2R
    let bound = q(4) * &frame.r2;
    let short: Vec<_> = lat.successive_minima(cap)?.into_iter().filter(|(d, _)| *d <= bound).collect();
    if short.len() == k {
        return Ok(Refined::Unchanged);
    }
    let vs: Vec<QVec> = short.iter().map(|(_, v)| v.point.clone()).collect();
    Ok(Refined::Sub { p, u: saturate(&vs, k) })
}

/// Outcome of [`refine_basis`] in the original coordinates.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Refinement {
    /// The closest lattice point to the centre is farther than the radius.
    Infeasible,
    /// `K ∩ L ⊆ shift + sublattice`; the sublattice is `L` itself when no
    /// refinement applies.
    Refined {
        #[serde(with = "serde_q::vec")]
        shift: QVec,
        sublattice: LatticeBasis,
    },
}

/// Replace `L` by `L ∩ span{v : ‖v‖ ≤ 2R}` shifted to the lattice point
/// nearest the centre.
pub fn refine_basis(body: &dyn ConvexBody, lattice: &LatticeBasis, cap: EnumCap) -> Result<Refinement> {
    let root = Frame::root(body, lattice)?;
    match refine(&root, cap)? {
        Refined::Infeasible => Ok(Refinement::Infeasible),
        Refined::Unchanged => Ok(Refinement::Refined { shift: root.origin.clone(), sublattice: lattice.clone() }),
        Refined::Sub { p, u } => {
            let shift = root.lift(&rational::int_vec_to_q(&p));
            if u.is_empty() {
                return Ok(Refinement::Refined { shift, sublattice: LatticeBasis::new(Vec::new())? });
            }
            let cols = u.iter().map(|c| rational::sub(&root.lift(&rational::int_vec_to_q(c)), &root.origin)).collect();
            Ok(Refinement::Refined { shift, sublattice: LatticeBasis::new(cols)? })
        }
    }
}

/// Which localization case produced the branching direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatnessCase {
    SmallVolume,
    Sandwich,
}

/// A dual lattice vector `y` (in coefficients of the dual basis) and the
/// integer levels `⟨y, z⟩ = j` that may meet the body.
#[derive(Clone, Debug, Serialize)]
pub struct Flatness {
    pub case: FlatnessCase,
    #[serde(serialize_with = "ser_ints")]
    pub coeffs: Vec<BigInt>,
    /// `y` as a vector of the ambient space, so the levels are `⟨y, x⟩`.
    #[serde(with = "serde_q::vec")]
    pub direction: QVec,
    pub lower: i64,
    pub upper: i64,
    #[serde(serialize_with = "ser_ints")]
    pub levels: Vec<BigInt>,
}

/// `sup_{x ∈ K} ⟨u, x⟩` within `eps`, closed form when available.
fn support_value(body: &dyn ConvexBody, u: &[f64], eps: f64) -> Result<f64> {
    if let Some((h, _)) = body.support(u) {
        return Ok(h);
    }
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    Ok(-minimize(body, &AffineMax::linear(neg), eps, None, |_, _| Stop::Continue)?.value)
}

fn rational_shape(m: &DMatrix<f64>) -> Result<QMat> {
    Ok(rational_ellipsoid(m)?.shape().clone())
}

fn int_range(lo: f64, hi: f64) -> Vec<BigInt> {
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Vec::new();
    }
    let a = lo.ceil() as i64;
    let b = hi.floor() as i64;
    (a..=b).map(BigInt::from).collect()
}

fn dot_int(y: &[BigInt], x: &[f64]) -> f64 {
    y.iter().zip(x).map(|(a, b)| a.to_f64().unwrap_or(f64::NAN) * b).sum()
}

/// The branching direction of a body in `Zᵏ` coordinates (k ≥ 2).
fn branch_direction(
    body: &dyn ConvexBody,
    config: &FlatnessConfig,
) -> Result<Option<(FlatnessCase, Vec<BigInt>, i64, i64, Vec<BigInt>)>> {
    let k = body.dim();
    let kf = k as f64;
    let vol_eps = (1.0 / (4.0 * kf)).powi(k as i32);
    match gls_round(body, vol_eps)? {
        Rounding::Empty => Ok(None),
        Rounding::SmallVolume(e) => {
            let delta = 1e-9 * (e.p.trace() / kf).max(1e-300);
            let p = &e.p + DMatrix::identity(k, k) * delta;
            let (_, ys) = svp_ellip(&LatticeBasis::identity(k), &InnerProduct::new(rational_shape(&p)?)?)?;
            let y = ys[0].coeffs.clone();
            let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
            let yv = nalgebra::DVector::from_vec(yf.clone());
            let half = yv.dot(&(&p * &yv)).max(0.0).sqrt() * (1.0 + 1e-9) + 1e-9;
            let mid = dot_int(&y, e.c.as_slice());
            let levels = int_range(mid - half, mid + half);
            Ok(Some((FlatnessCase::SmallVolume, y, (mid - half).floor() as i64, (mid + half).ceil() as i64, levels)))
        }
        Rounding::Sandwich(e) => sandwich_direction(body, &e, config).map(Some),
    }
}

fn sandwich_direction(
    body: &dyn ConvexBody,
    e: &FloatEllipsoid,
    config: &FlatnessConfig,
) -> Result<(FlatnessCase, Vec<BigInt>, i64, i64, Vec<BigInt>)> {
    let k = body.dim();
    let kf = k as f64;
    let ratio = (kf + 1.0) * kf.sqrt();
    let eig = e.p.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    if !(lmin > 0.0) {
        return Err(Error::InvalidBody("degenerate sandwiching ellipsoid".into()));
    }
    // K − K ⊆ 2E and K − K ⊇ 2E/ratio, loosened for rounding in the ellipsoid method
    let slackf = 1.1;
    let inner = lower_bound_f64(1.0 / (2.0 * lmax.sqrt() * slackf));
    let outer = upper_bound_f64(ratio * slackf / (2.0 * lmin.sqrt()));
    let polar = DifferencePolar::with_radii(body, 1e-9, inner, outer);
    // tiles of E*/2 ⊆ (K − K)*, or the single ellipsoid containing it
    let tile = Ellipsoid::centered(rational_shape(&(&e.p * 4.0))?)?;
    let cover = match build_cover(&polar, &tile, &CoverBudget::new(k, 1.0)?)?.covering() {
        Some(c) => EnumCovering::from_covering(&c, "width-tiles"),
        None => {
            let c = ratio * slackf / 2.0;
            let shape = rational_shape(&(&e.p / (c * c)))?;
            EnumCovering::new(Ellipsoid::centered(shape)?, vec![vec![Q::zero(); k]], "width-sandwich")?
        }
    };
    let mut en = LatticeEnumerator::new(&polar, &LatticeBasis::identity(k), cover, config.cap)?;
    let report = shortest_vectors(&mut en, &Q::one())?;
    let tol = Q::new(1.into(), BigInt::from(1_000_000_000u64));
    let mut best: Option<(Q, Vec<BigInt>)> = None;
    for v in report.result {
        let w = polar.distance(&v.point, &tol)?;
        if best.as_ref().map_or(true, |(bw, _)| w < *bw) {
            best = Some((w, v.coeffs));
        }
    }
    let (_, y) = best.ok_or(Error::IterationBudgetExceeded(0))?;
    let yf: Vec<f64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let neg: Vec<f64> = yf.iter().map(|v| -v).collect();
    let sup = support_value(body, &yf, 1e-6)?;
    let inf = -support_value(body, &neg, 1e-6)?;
    // u ≤ sup ≤ u + 1 and l − 1 ≤ inf ≤ l
    let u = sup - 0.5;
    let l = inf + 0.5;
    let f = config.f_bound.value(k);
    let lo = l - 1.0;
    let hi = (u + 1.0).min(l + f + 1.0);
    Ok((FlatnessCase::Sandwich, y, l.round() as i64, u.round() as i64, int_range(lo, hi)))
}

/// Branching direction for `K` and `L` (square basis).
pub fn flatness_direction(
    body: &dyn ConvexBody,
    lattice: &LatticeBasis,
    config: &FlatnessConfig,
) -> Result<Option<Flatness>> {
    let root = Frame::root(body, lattice)?;
    let local = restrict(body, &root.origin, &root.cols)?;
    if local.is_empty() {
        return Ok(None);
    }
    let Some((case, coeffs, lower, upper, levels)) = branch_direction(&*local, config)? else {
        return Ok(None);
    };
    // ⟨y, z⟩ = ⟨B⁻ᵗ y, B z⟩
    let bt = linalg::transpose(&linalg::from_columns(lattice.columns()));
    let direction = linalg::solve(&bt, &rational::int_vec_to_q(&coeffs)).ok_or(Error::RankDeficient)?;
    Ok(Some(Flatness { case, coeffs, direction, lower, upper, levels }))
}

enum Outcome {
    Found(QVec),
    Empty,
    Budget,
}

struct Search<'r> {
    root: &'r dyn ConvexBody,
    config: &'r FlatnessConfig,
    max_depth_allowed: usize,
    nodes: usize,
    max_depth: usize,
}

impl Search<'_> {
    fn verify(&self, x: &[Q]) -> bool {
        match self.root.contains_exact(x) {
            Some(b) => b,
            None => self.root.contains(&rational::vec_to_f64(x), 1e-9),
        }
    }

    fn node(&mut self, body: &dyn ConvexBody, frame: Frame, depth: usize) -> Result<Outcome> {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        if self.nodes > self.config.max_nodes || depth > self.max_depth_allowed {
            return Ok(Outcome::Budget);
        }
        if body.is_empty() {
            return Ok(Outcome::Empty);
        }
        let k = frame.dim();
        match refine(&frame, self.config.cap)? {
            Refined::Infeasible => return Ok(Outcome::Empty),
            Refined::Sub { p, u } => {
                if u.is_empty() {
                    let x = frame.lift(&rational::int_vec_to_q(&p));
                    return Ok(if self.verify(&x) { Outcome::Found(x) } else { Outcome::Empty });
                }
                let Some(child_frame) = frame.restrict(&p, &u)? else {
                    return Ok(Outcome::Empty);
                };
                let child = restrict(body, &rational::int_vec_to_q(&p), &int_cols(&u))?;
                return self.node(&*child, child_frame, depth);
            }
            Refined::Unchanged => {}
        }
        if k == 1 {
            return self.interval(body, &frame);
        }
        let Some((_, y, _, _, levels)) = branch_direction(body, self.config)? else {
            return Ok(Outcome::Empty);
        };
        let mut exhausted = false;
        for j in levels {
            let Some((p, u)) = solve_integer_row(&y, &j) else {
                continue;
            };
            let Some(child_frame) = frame.restrict(&p, &u)? else {
                continue;
            };
            let child = restrict(body, &rational::int_vec_to_q(&p), &int_cols(&u))?;
            match self.node(&*child, child_frame, depth + 1)? {
                Outcome::Found(x) => return Ok(Outcome::Found(x)),
                Outcome::Empty => {}
                Outcome::Budget => {
                    exhausted = true;
                    if self.nodes > self.config.max_nodes {
                        break;
                    }
                }
            }
        }
        Ok(if exhausted { Outcome::Budget } else { Outcome::Empty })
    }

    /// One-dimensional base case: every integer of the interval, checked
    /// exactly against the original body.
    fn interval(&mut self, body: &dyn ConvexBody, frame: &Frame) -> Result<Outcome> {
        let hi = support_value(body, &[1.0], 1e-9)?;
        let lo = -support_value(body, &[-1.0], 1e-9)?;
        let margin = 1e-7 * (1.0 + lo.abs() + hi.abs());
        // the enclosing ball bounds the range as well
        let g = to_f64(&frame.gram[0][0]);
        let rad = (to_f64(&frame.r2) / g).sqrt() * (1.0 + 1e-9) + 1e-9;
        let a = to_f64(&frame.a0[0]);
        let candidates = int_range((lo - margin).max(a - rad), (hi + margin).min(a + rad));
        for z in candidates {
            let x = frame.lift(&[Q::from_integer(z)]);
            if self.verify(&x) {
                return Ok(Outcome::Found(x));
            }
        }
        Ok(Outcome::Empty)
    }
}

fn int_cols(u: &[Vec<BigInt>]) -> Vec<QVec> {
    u.iter().map(|c| rational::int_vec_to_q(c)).collect()
}

/// Decide whether `K ∩ L` is empty; a returned point lies in `L` exactly
/// and in `K` by the body's exact membership test when it has one.
pub fn ip_feasible(body: &dyn ConvexBody, lattice: &LatticeBasis, config: &FlatnessConfig) -> Result<IpResult> {
    let n = body.dim();
    let root = Frame::root(body, lattice)?;
    let mut search = Search { root: body, config, max_depth_allowed: n, nodes: 0, max_depth: 0 };
    let outcome = if n == 0 {
        Outcome::Empty
    } else {
        let local = restrict(body, &root.origin, &root.cols)?;
        search.node(&*local, root, 0)?
    };
    let (status, point) = match outcome {
        Outcome::Found(x) => (IpStatus::Feasible, Some(x)),
        Outcome::Empty => (IpStatus::Infeasible, None),
        Outcome::Budget => (IpStatus::BudgetExceeded, None),
    };
    let coeffs = point.as_ref().and_then(|x| lattice.coords_of(x)).map(|c| c.iter().map(|v| v.to_integer()).collect());
    Ok(IpResult { status, point, coeffs, nodes: search.nodes, max_depth: search.max_depth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{ConcreteBody, LpIndex, Polytope};
    use crate::rational::{qr, qvec};

    fn disk(r: Q, c: &[Q]) -> ConcreteBody {
        let e = Ellipsoid::new(linalg::scale_mat(&linalg::identity(2), &(Q::one() / (&r * &r))), c.to_vec()).unwrap();
        ConcreteBody::ellipsoid(e).unwrap()
    }

    #[test]
    fn disk_between_lattice_points_is_infeasible() {
        let c = vec![qr(1, 2), qr(1, 2)];
        let res = ip_feasible(&disk(qr(2, 5), &c), &LatticeBasis::identity(2), &FlatnessConfig::default()).unwrap();
        assert_eq!(res.status, IpStatus::Infeasible);
        let res = ip_feasible(&disk(qr(70, 100), &c), &LatticeBasis::identity(2), &FlatnessConfig::default()).unwrap();
        assert_eq!(res.status, IpStatus::Infeasible);
    }

    #[test]
    fn disk_reaching_corners_is_feasible() {
        let c = vec![qr(1, 2), qr(1, 2)];
        for r in [qr(3, 4), qr(71, 100)] {
            let res = ip_feasible(&disk(r, &c), &LatticeBasis::identity(2), &FlatnessConfig::default()).unwrap();
            assert_eq!(res.status, IpStatus::Feasible);
            let x = res.point.unwrap();
            assert!(x.iter().all(Q::is_integer));
            assert!(disk(qr(3, 4), &c).contains_exact(&x).unwrap());
        }
    }

    #[test]
    fn long_basis_vector_is_dropped() {
        let l = LatticeBasis::from_int_columns(&[&[1, 0], &[0, 100]]).unwrap();
        let ball = ConcreteBody::lp(2, LpIndex::Finite(q(2)), q(1)).unwrap();
        match refine_basis(&ball, &l, EnumCap::default()).unwrap() {
            Refinement::Refined { shift, sublattice } => {
                assert_eq!(shift, qvec(&[0, 0]));
                assert_eq!(sublattice.rank(), 1);
                assert_eq!(sublattice.columns()[0].iter().map(rational::abs).collect::<Vec<_>>(), qvec(&[1, 0]));
            }
            r => panic!("{r:?}"),
        }
        let unchanged = refine_basis(&ball, &LatticeBasis::identity(2), EnumCap::default()).unwrap();
        assert!(matches!(unchanged, Refinement::Refined { ref sublattice, .. } if sublattice.rank() == 2));
    }

    #[test]
    fn far_ball_fails_the_closest_point_gate() {
        let b = disk(qr(1, 10), &[qr(1, 2), qr(1, 2)]);
        assert!(matches!(
            refine_basis(&b, &LatticeBasis::identity(2), EnumCap::default()).unwrap(),
            Refinement::Infeasible
        ));
    }

    #[test]
    fn unit_square_is_flat_along_an_axis() {
        let a = vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[0, -1])];
        let b = vec![q(1), q(0), q(1), q(0)];
        let sq = ConcreteBody::Polytope(Polytope::general(a, b).unwrap());
        let f = flatness_direction(&sq, &LatticeBasis::identity(2), &FlatnessConfig::default()).unwrap().unwrap();
        assert_eq!(f.case, FlatnessCase::Sandwich);
        let nz: Vec<_> = f.coeffs.iter().filter(|c| !c.is_zero()).collect();
        assert_eq!(nz.len(), 1);
        assert!(nz[0].abs().is_one());
        assert!(f.levels.len() <= 3 + FBound::Safe.value(2) as usize);
        let w = sq.exact_width(&f.direction).unwrap();
        assert_eq!(w.cmp_q(&q(1)), std::cmp::Ordering::Equal);
    }

    #[test]
    fn thin_triangle_needs_branching() {
        let a = vec![qvec(&[0, -1]), qvec(&[1, 3]), qvec(&[-1, 3])];
        let b = vec![qr(-1, 10), qr(29, 10), qr(-1, 10)];
        let t = ConcreteBody::Polytope(Polytope::general(a, b).unwrap());
        let res = ip_feasible(&t, &LatticeBasis::identity(2), &FlatnessConfig::default()).unwrap();
        let brute = brute_force(&t, 5);
        assert_eq!(res.status == IpStatus::Feasible, brute);
    }

    fn brute_force(body: &ConcreteBody, r: i64) -> bool {
        (-r..=r).any(|i| (-r..=r).any(|j| body.contains_exact(&qvec(&[i, j])).unwrap()))
    }
}
