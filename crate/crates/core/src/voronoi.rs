//! Exact lattice algorithms for an inner product `⟨x, y⟩_A = xᵗAy`:
//! Fincke–Pohst enumeration, closest and shortest vectors, Voronoi-relevant
//! vectors, enumeration of translated ellipsoids by a walk over relevant
//! vectors, and successive minima.
//!
//! Everything runs in the coefficient space of an LLL-reduced basis with
//! exact rationals; results are reported in the coefficients of the input
//! basis.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeBasis};
use crate::linalg::{self, Ldl, QMat};
use crate::rational::{self, round_half_up, QVec, Q};

/// `⟨x, y⟩_A` for a symmetric positive definite `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    a: QMat,
}

impl InnerProduct {
    pub fn new(a: QMat) -> Result<Self> {
        linalg::ldl(&a)?;
        Ok(InnerProduct { a })
    }

    pub fn euclidean(n: usize) -> Self {
        InnerProduct { a: linalg::identity(n) }
    }

    pub fn matrix(&self) -> &QMat {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn norm_sq(&self, x: &[Q]) -> Q {
        linalg::quad_form(&self.a, x)
    }
}

/// Maximum number of points an enumeration may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnumCap(pub usize);

impl Default for EnumCap {
    fn default() -> Self {
        EnumCap(1_000_000)
    }
}

/// A lattice vector with its coefficients in the input basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub coeffs: Vec<BigInt>,
    pub point: QVec,
}

impl Serialize for LatticePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LatticePoint", 2)?;
        st.serialize_field("coeffs", &self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())?;
        st.serialize_field("point", &rational::vec_strings(&self.point))?;
        st.end()
    }
}

enum Visit {
    Continue,
    Shrink(Q),
}

/// Exact Schnorr–Euchner enumeration of `{z : (z−c)ᵗG(z−c) ≤ r²}` for
/// `G = L D Lᵗ`. The visitor may shrink the radius.
fn enumerate_coeffs(ldl: &Ldl, c: &[Q], r2: Q, visit: &mut dyn FnMut(&[BigInt], &Q) -> Result<Visit>) -> Result<()> {
    let k = c.len();
    if k == 0 {
        if !r2.is_negative() {
            visit(&[], &Q::zero())?;
        }
        return Ok(());
    }
    let mut z = vec![BigInt::zero(); k];
    let mut bound = r2;
    descend(ldl, c, k - 1, Q::zero(), &mut z, &mut bound, visit)
}

fn descend(
    ldl: &Ldl,
    c: &[Q],
    i: usize,
    acc: Q,
    z: &mut Vec<BigInt>,
    bound: &mut Q,
    visit: &mut dyn FnMut(&[BigInt], &Q) -> Result<Visit>,
) -> Result<()> {
    let k = c.len();
    let mut center = c[i].clone();
    for j in i + 1..k {
        center -= &ldl.l[j][i] * (Q::from_integer(z[j].clone()) - &c[j]);
    }
    let d = &ldl.d[i];
    let z0 = round_half_up(&center);
    // zig-zag outward from the nearest integer; each side stops once the
    // contribution exceeds the remaining budget
    let mut up = z0.clone();
    let mut down = &z0 - BigInt::one();
    let (mut up_open, mut down_open) = (true, true);
    let mut take_up = true;
    while up_open || down_open {
        let use_up = if up_open && down_open { take_up } else { up_open };
        let zi = if use_up { up.clone() } else { down.clone() };
        let diff = Q::from_integer(zi.clone()) - &center;
        let total = &acc + d * &diff * &diff;
        if total > *bound {
            if use_up {
                up_open = false;
            } else {
                down_open = false;
            }
        } else {
            z[i] = zi;
            if i == 0 {
                match visit(z, &total)? {
                    Visit::Continue => {}
                    Visit::Shrink(b) => *bound = b,
                }
            } else {
                descend(ldl, c, i - 1, total, z, bound, visit)?;
            }
            if use_up {
                up += 1;
            } else {
                down -= 1;
            }
        }
        if up_open && down_open {
            take_up = !take_up;
        }
    }
    z[i] = BigInt::zero();
    Ok(())
}

/// A lattice together with an inner product, prepared for exact
/// enumeration: LLL-reduced Gram form and its LDLᵗ factorization.
#[derive(Clone, Debug)]
pub struct PreparedLattice {
    basis: LatticeBasis,
    ip: InnerProduct,
    /// Gram matrix `BᵗAB` in input coefficients.
    gram: QMat,
    gram_inv: QMat,
    /// Columns `A b_j`.
    ab: Vec<QVec>,
    /// Unimodular `U` (columns) and its inverse.
    u: Vec<Vec<BigInt>>,
    u_inv: QMat,
    reduced: QMat,
    ldl: Ldl,
    float: FloatForm,
}

/// A target split into reduced coordinates `c'` and the squared distance
/// from the target to the span of the lattice.
struct Target {
    c: QVec,
    residual: Q,
}

impl PreparedLattice {
    pub fn new(basis: &LatticeBasis, ip: &InnerProduct) -> Result<Self> {
        if basis.dim() != ip.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: ip.dim() });
        }
        let gram = basis.gram_with(ip.matrix());
        let gram_inv = linalg::inverse(&gram)?;
        let ab: Vec<QVec> = basis.columns().iter().map(|c| linalg::mat_vec(ip.matrix(), c)).collect();
        let u = lattice::lll_gram(&gram);
        let uq: Vec<QVec> = u.iter().map(|c| rational::int_vec_to_q(c)).collect();
        let umat = linalg::from_columns(&uq);
        let u_inv = linalg::inverse(&umat)?;
        let reduced = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&umat), &gram), &umat);
        let ldl = linalg::ldl(&reduced)?;
        // U⁻¹ G⁻¹ (A B)ᵗ maps a target to reduced coordinates
        let abt: QMat = linalg::transpose(&linalg::from_columns(&ab));
        let to_reduced = linalg::mat_mul(&linalg::mat_mul(&u_inv, &gram_inv), &abt);
        let float = FloatForm::new(&to_reduced, &reduced, &ldl);
        Ok(PreparedLattice { basis: basis.clone(), ip: ip.clone(), gram, gram_inv, ab, u, u_inv, reduced, ldl, float })
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    fn target(&self, t: &[Q]) -> Target {
        // coefficients of the A-orthogonal projection of t onto span(B)
        let bat: QVec = self.ab.iter().map(|abj| rational::dot(abj, t)).collect();
        let c = linalg::mat_vec(&self.gram_inv, &bat);
        let residual = self.ip.norm_sq(t) - linalg::quad_form(&self.gram, &c);
        Target { c: linalg::mat_vec(&self.u_inv, &c), residual }
    }

    fn to_input(&self, zr: &[BigInt]) -> Vec<BigInt> {
        let k = zr.len();
        (0..k).map(|i| (0..k).map(|j| &self.u[j][i] * &zr[j]).sum()).collect()
    }

    fn point_of(&self, zr: &[BigInt]) -> LatticePoint {
        let coeffs = self.to_input(zr);
        let point = self.basis.point(&coeffs);
        LatticePoint { coeffs, point }
    }

    /// `{y ∈ L : (y−t)ᵗA(y−t) ≤ r²}` by depth-first enumeration.
    pub fn fincke_pohst(&self, t: &[Q], r2: &Q, cap: EnumCap) -> Result<Vec<LatticePoint>> {
        let tg = self.target(t);
        let budget = r2 - &tg.residual;
        let mut out = Vec::new();
        if budget.is_negative() {
            return Ok(out);
        }
        enumerate_coeffs(&self.ldl, &tg.c, budget, &mut |z, _| {
            if out.len() >= cap.0 {
                return Err(Error::CapExceeded { cap: cap.0, found: out.len() });
            }
            out.push(self.point_of(z));
            Ok(Visit::Continue)
        })?;
        out.sort();
        Ok(out)
    }

    /// Squared distance of a Babai-style rounding, an upper bound for CVP.
    fn rounding_bound(&self, tg: &Target) -> Q {
        let z: Vec<BigInt> = tg.c.iter().map(round_half_up).collect();
        let d: QVec = z.iter().zip(&tg.c).map(|(z, c)| Q::from_integer(z.clone()) - c).collect();
        linalg::quad_form(&self.reduced, &d)
    }

    /// Closest vectors in reduced coordinates: `(squared distance within
    /// the span, all minimizers)`.
    fn cvp_reduced(&self, tg: &Target) -> Result<(Q, Vec<Vec<BigInt>>)> {
        let mut best = self.rounding_bound(tg);
        let mut ties: Vec<Vec<BigInt>> = Vec::new();
        enumerate_coeffs(&self.ldl, &tg.c, best.clone(), &mut |z, d| {
            if *d < best {
                best = d.clone();
                ties.clear();
                ties.push(z.to_vec());
                return Ok(Visit::Shrink(best.clone()));
            }
            ties.push(z.to_vec());
            Ok(Visit::Continue)
        })?;
        Ok((best, ties))
    }

    /// All closest lattice vectors to `x` and the squared distance.
    pub fn cvp(&self, x: &[Q]) -> Result<(Q, Vec<LatticePoint>)> {
        let tg = self.target(x);
        let (d, ties) = self.cvp_reduced(&tg)?;
        let mut pts: Vec<LatticePoint> = ties.iter().map(|z| self.point_of(z)).collect();
        pts.sort();
        Ok((d + tg.residual, pts))
    }

    /// `λ₁²` and all shortest nonzero vectors.
    pub fn svp(&self) -> Result<(Q, Vec<LatticePoint>)> {
        let k = self.rank();
        let mut best = (0..k).map(|i| self.reduced[i][i].clone()).min().expect("nonzero rank");
        let mut ties: Vec<Vec<BigInt>> = Vec::new();
        let zero = vec![Q::zero(); k];
        enumerate_coeffs(&self.ldl, &zero, best.clone(), &mut |z, d| {
            if z.iter().all(Zero::is_zero) {
                return Ok(Visit::Continue);
            }
            if *d < best {
                best = d.clone();
                ties.clear();
                ties.push(z.to_vec());
                return Ok(Visit::Shrink(best.clone()));
            }
            ties.push(z.to_vec());
            Ok(Visit::Continue)
        })?;
        let mut pts: Vec<LatticePoint> = ties.iter().map(|z| self.point_of(z)).collect();
        pts.sort();
        Ok((best, pts))
    }

    /// Linearly independent lattice vectors greedily achieving the
    /// successive minima among vectors of squared norm at most `r2`.
    pub fn short_independent(&self, r2: &Q, cap: EnumCap) -> Result<Vec<(Q, LatticePoint)>> {
        let k = self.rank();
        let zero = vec![Q::zero(); k];
        let mut all: Vec<(Q, Vec<BigInt>)> = Vec::new();
        enumerate_coeffs(&self.ldl, &zero, r2.clone(), &mut |z, d| {
            if z.iter().all(Zero::is_zero) {
                return Ok(Visit::Continue);
            }
            if all.len() >= cap.0 {
                return Err(Error::CapExceeded { cap: cap.0, found: all.len() });
            }
            all.push((d.clone(), z.to_vec()));
            Ok(Visit::Continue)
        })?;
        let mut pts: Vec<(Q, LatticePoint)> = all.into_iter().map(|(d, z)| (d, self.point_of(&z))).collect();
        pts.sort();
        let mut chosen: Vec<(Q, LatticePoint)> = Vec::new();
        let mut rows: Vec<QVec> = Vec::new();
        for (d, p) in pts {
            if chosen.len() == k {
                break;
            }
            rows.push(rational::int_vec_to_q(&p.coeffs));
            if linalg::rank(&rows) == rows.len() {
                chosen.push((d, p));
            } else {
                rows.pop();
            }
        }
        Ok(chosen)
    }

    /// `(λ_i², v_i)` for `i = 1..k`.
    pub fn successive_minima(&self, cap: EnumCap) -> Result<Vec<(Q, LatticePoint)>> {
        let k = self.rank();
        let max_diag = (0..k).map(|i| self.reduced[i][i].clone()).max().expect("nonzero rank");
        let mut r2 = (0..k).map(|i| self.reduced[i][i].clone()).min().unwrap();
        loop {
            if r2 > max_diag {
                r2 = max_diag.clone();
            }
            let found = self.short_independent(&r2, cap)?;
            if found.len() == k {
                return Ok(found);
            }
            r2 = &r2 * rational::q(2);
        }
    }
}

/// A prepared lattice with its Voronoi-relevant vectors.
#[derive(Clone, Debug)]
pub struct VoronoiData {
    lattice: PreparedLattice,
    /// Relevant vectors in reduced coordinates, closed under negation.
    relevant: Vec<Vec<BigInt>>,
    relevant_i: Vec<Vec<i64>>,
    relevant_f: Vec<Vec<f64>>,
}

impl VoronoiData {
    /// For every nonzero coset of `L/2L`, keeps `±v` when they are the only
    /// minimizers of the coset.
    pub fn new(basis: &LatticeBasis, ip: &InnerProduct) -> Result<Self> {
        let lattice = PreparedLattice::new(basis, ip)?;
        let k = lattice.rank();
        if k > 20 {
            return Err(Error::InvalidArgument("too many cosets for relevant-vector search".into()));
        }
        let half = Q::new(BigInt::one(), BigInt::from(2));
        let mut relevant: Vec<Vec<BigInt>> = Vec::new();
        for mask in 1u32..(1u32 << k) {
            let s: Vec<BigInt> = (0..k).map(|i| BigInt::from((mask >> i) & 1)).collect();
            let c: QVec = s.iter().map(|x| -(Q::from_integer(x.clone()) * &half)).collect();
            let tg = Target { c, residual: Q::zero() };
            let (_, ties) = lattice.cvp_reduced(&tg)?;
            if ties.len() == 2 {
                for z in ties {
                    relevant.push(z.iter().zip(&s).map(|(zi, si)| si + zi * 2).collect());
                }
            }
        }
        relevant.sort();
        let relevant_i: Vec<Vec<i64>> = relevant
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| x.to_i64().ok_or(Error::InvalidArgument("relevant vector out of range".into())))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let relevant_f: Vec<Vec<f64>> = relevant_i.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
        Ok(VoronoiData { lattice, relevant, relevant_i, relevant_f })
    }

    pub fn lattice(&self) -> &PreparedLattice {
        &self.lattice
    }

    pub fn relevant_vectors(&self) -> Vec<LatticePoint> {
        let mut v: Vec<LatticePoint> = self.relevant.iter().map(|z| self.lattice.point_of(z)).collect();
        v.sort();
        v
    }

    /// `{y ∈ L : (y−t)ᵗA(y−t) ≤ r²}` by breadth-first search over
    /// relevant-vector steps from a closest vector of `t`. The walk runs in
    /// floating point over a slightly larger radius; points whose float
    /// distance is within rounding of `r²` are decided exactly.
    pub fn enumerate(&self, t: &[Q], r2: &Q, cap: EnumCap) -> Result<Vec<LatticePoint>> {
        let lat = &self.lattice;
        let form = &lat.float;
        // the exact projection is needed up front only when L does not span
        let mut exact = None;
        let (c, budget_f) = if lat.rank() == lat.basis.dim() {
            let tf: Vec<f64> = t.iter().map(rational::to_f64).collect();
            (form.target.iter().map(|r| dot_f(r, &tf)).collect::<Vec<f64>>(), rational::to_f64(r2))
        } else {
            let tg = lat.target(t);
            let budget = r2 - &tg.residual;
            if budget.is_negative() {
                return Ok(Vec::new());
            }
            let c = tg.c.iter().map(rational::to_f64).collect();
            let b = rational::to_f64(&budget);
            exact = Some((tg, budget));
            (c, b)
        };
        let limit = budget_f * (1.0 + 1e-9) + 1e-9 * form.scale;
        let Some(seed) = form.closest(&c, limit) else {
            return Ok(Vec::new());
        };
        let k = lat.rank();
        let rel_g: Vec<Vec<f64>> = self.relevant_f.iter().map(|v| form.apply(v)).collect();
        let rel_norm: Vec<f64> = self.relevant_f.iter().zip(&rel_g).map(|(v, g)| dot_f(v, g)).collect();
        let diff = |z: &[i64]| -> Vec<f64> { z.iter().zip(&c).map(|(&a, b)| a as f64 - b).collect() };
        let g0 = form.apply(&diff(&seed));
        let d0 = dot_f(&diff(&seed), &g0);
        let mut seen: HashSet<Vec<i64>> = HashSet::from([seed.clone()]);
        let mut queue: VecDeque<(Vec<i64>, f64, Vec<f64>)> = VecDeque::from([(seed.clone(), d0, g0.clone())]);
        let mut found: Vec<(Vec<i64>, f64)> = vec![(seed, d0)];
        while let Some((z, d, g)) = queue.pop_front() {
            for (j, v) in self.relevant_i.iter().enumerate() {
                let y: Vec<i64> = z.iter().zip(v).map(|(a, b)| a + b).collect();
                if seen.contains(&y) {
                    continue;
                }
                // ‖y−c‖² = ‖z−c‖² + 2 vᵗG'(z−c) + vᵗG'v
                let dy = d + 2.0 * dot_f(&self.relevant_f[j], &g) + rel_norm[j];
                if dy <= limit {
                    if found.len() >= cap.0 {
                        return Err(Error::CapExceeded { cap: cap.0, found: found.len() });
                    }
                    seen.insert(y.clone());
                    let gy: Vec<f64> = g.iter().zip(&rel_g[j]).map(|(a, b)| a + b).collect();
                    found.push((y.clone(), dy));
                    queue.push_back((y, dy, gy));
                }
            }
        }
        // points farther than the rounding band from the boundary are
        // decided by their float distance, the rest exactly
        let sure = budget_f * (1.0 - 1e-9) - 1e-9 * form.scale;
        let mut exact_target = exact;
        let mut out = Vec::new();
        for (z, dz) in found {
            let zb: Vec<BigInt> = z.iter().map(|&v| BigInt::from(v)).collect();
            let inside = if dz <= sure {
                true
            } else {
                let (tg, budget) = exact_target.get_or_insert_with(|| {
                    let tg = lat.target(t);
                    let budget = r2 - &tg.residual;
                    (tg, budget)
                });
                let d: QVec = zb.iter().zip(&tg.c).map(|(a, b)| Q::from_integer(a.clone()) - b).collect();
                linalg::quad_form(&lat.reduced, &d) <= *budget
            };
            if inside {
                out.push(lat.point_of(&zb));
            }
        }
        debug_assert!(out.iter().all(|p| p.coeffs.len() == k));
        out.sort();
        Ok(out)
    }
}

fn dot_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Floating-point copy of a reduced form `G = L D Lᵗ` for the search
/// phase of the relevant-vector walk.
#[derive(Clone, Debug)]
struct FloatForm {
    /// Reduced coordinates of the projection of a target onto the span.
    target: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    l: Vec<Vec<f64>>,
    d: Vec<f64>,
    scale: f64,
}

impl FloatForm {
    fn new(target: &[QVec], g: &[QVec], ldl: &Ldl) -> Self {
        let conv =
            |m: &[QVec]| -> Vec<Vec<f64>> { m.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect() };
        let g = conv(g);
        let scale = (0..g.len()).map(|i| g[i][i]).fold(0.0, f64::max);
        FloatForm { target: conv(target), l: conv(&ldl.l), d: ldl.d.iter().map(rational::to_f64).collect(), g, scale }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.g.iter().map(|r| dot_f(r, v)).collect()
    }

    /// A closest integer vector to `c` if its squared distance is at most
    /// `limit`, by Schnorr–Euchner with a shrinking radius.
    fn closest(&self, c: &[f64], limit: f64) -> Option<Vec<i64>> {
        let k = c.len();
        if k == 0 {
            return Some(Vec::new());
        }
        let mut z = vec![0i64; k];
        let mut best: Option<Vec<i64>> = None;
        let mut bound = limit;
        self.descend(c, k - 1, 0.0, &mut z, &mut bound, &mut best);
        best
    }

    fn descend(&self, c: &[f64], i: usize, acc: f64, z: &mut [i64], bound: &mut f64, best: &mut Option<Vec<i64>>) {
        let k = c.len();
        let mut center = c[i];
        for j in i + 1..k {
            center -= self.l[j][i] * (z[j] as f64 - c[j]);
        }
        let z0 = center.round() as i64;
        let (mut up, mut down) = (z0, z0 - 1);
        let (mut up_open, mut down_open) = (true, true);
        let mut take_up = true;
        while up_open || down_open {
            let use_up = if up_open && down_open { take_up } else { up_open };
            let zi = if use_up { up } else { down };
            let diff = zi as f64 - center;
            let total = acc + self.d[i] * diff * diff;
            if total > *bound {
                if use_up {
                    up_open = false;
                } else {
                    down_open = false;
                }
                continue;
            }
            if use_up {
                up += 1;
            } else {
                down -= 1;
            }
            if up_open && down_open {
                take_up = !take_up;
            }
            z[i] = zi;
            if i == 0 {
                *bound = total;
                *best = Some(z.to_vec());
            } else {
                self.descend(c, i - 1, total, z, bound, best);
            }
        }
    }
}

/// `{y ∈ L : (y−t)ᵗA(y−t) ≤ r²}` by Fincke–Pohst.
pub fn fincke_pohst_enum(
    basis: &LatticeBasis,
    ip: &InnerProduct,
    t: &[Q],
    r2: &Q,
    cap: EnumCap,
) -> Result<Vec<LatticePoint>> {
    PreparedLattice::new(basis, ip)?.fincke_pohst(t, r2, cap)
}

pub fn relevant_vectors(basis: &LatticeBasis, ip: &InnerProduct) -> Result<VoronoiData> {
    VoronoiData::new(basis, ip)
}

/// All closest vectors to `x` under `A`, with the squared distance.
pub fn cvp_ellip(basis: &LatticeBasis, ip: &InnerProduct, x: &[Q]) -> Result<(Q, Vec<LatticePoint>)> {
    PreparedLattice::new(basis, ip)?.cvp(x)
}

/// `λ₁²` and all shortest nonzero vectors under `A`.
pub fn svp_ellip(basis: &LatticeBasis, ip: &InnerProduct) -> Result<(Q, Vec<LatticePoint>)> {
    PreparedLattice::new(basis, ip)?.svp()
}

/// `L ∩ (E(A) + t)` for an origin-centered ellipsoid `E(A)`.
pub fn ellipsoid_enum(
    basis: &LatticeBasis,
    e: &crate::ellipsoid::Ellipsoid,
    t: &[Q],
    cap: EnumCap,
) -> Result<Vec<LatticePoint>> {
    if !e.is_centered() {
        return Err(Error::NonCentered);
    }
    let ip = InnerProduct::new(e.shape().clone())?;
    VoronoiData::new(basis, &ip)?.enumerate(t, &Q::one(), cap)
}

pub fn successive_minima(basis: &LatticeBasis, ip: &InnerProduct, cap: EnumCap) -> Result<Vec<(Q, LatticePoint)>> {
    PreparedLattice::new(basis, ip)?.successive_minima(cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qvec};

    fn z2() -> LatticeBasis {
        LatticeBasis::identity(2)
    }

    fn pts(v: &[LatticePoint]) -> Vec<QVec> {
        v.iter().map(|p| p.point.clone()).collect()
    }

    #[test]
    fn fincke_pohst_examples() {
        let id = InnerProduct::euclidean(2);
        let r = fincke_pohst_enum(&z2(), &id, &qvec(&[0, 0]), &q(1), EnumCap::default()).unwrap();
        assert_eq!(r.len(), 5);
        let r = fincke_pohst_enum(&z2(), &id, &[qr(1, 2), qr(1, 2)], &qr(1, 2), EnumCap::default()).unwrap();
        assert_eq!(pts(&r), vec![qvec(&[0, 0]), qvec(&[0, 1]), qvec(&[1, 0]), qvec(&[1, 1])]);
        let l = LatticeBasis::from_int_columns(&[&[2, 0], &[0, 1]]).unwrap();
        let r = fincke_pohst_enum(&l, &id, &qvec(&[0, 0]), &q(4), EnumCap::default()).unwrap();
        assert_eq!(r.len(), 7);
        assert!(pts(&r).contains(&qvec(&[-2, 0])) && pts(&r).contains(&qvec(&[0, -2])));
    }

    #[test]
    fn cap_is_an_error() {
        let id = InnerProduct::euclidean(2);
        let err = fincke_pohst_enum(&z2(), &id, &qvec(&[0, 0]), &q(100), EnumCap(10)).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { cap: 10, .. }));
    }

    #[test]
    fn relevant_vector_examples() {
        let v = relevant_vectors(&z2(), &InnerProduct::euclidean(2)).unwrap();
        assert_eq!(pts(&v.relevant_vectors()), vec![qvec(&[-1, 0]), qvec(&[0, -1]), qvec(&[0, 1]), qvec(&[1, 0])]);
        let hex = InnerProduct::new(vec![vec![q(1), qr(1, 2)], vec![qr(1, 2), q(1)]]).unwrap();
        assert_eq!(relevant_vectors(&z2(), &hex).unwrap().relevant_vectors().len(), 6);
        let z3 = relevant_vectors(&LatticeBasis::identity(3), &InnerProduct::euclidean(3)).unwrap();
        assert_eq!(z3.relevant_vectors().len(), 6);
    }

    #[test]
    fn cvp_examples() {
        let id = InnerProduct::euclidean(2);
        let (_, s) = cvp_ellip(&z2(), &id, &[qr(1, 2), q(0)]).unwrap();
        assert_eq!(pts(&s), vec![qvec(&[0, 0]), qvec(&[1, 0])]);
        let (d, s) = cvp_ellip(&z2(), &id, &[qr(1, 2), qr(1, 2)]).unwrap();
        assert_eq!((d, s.len()), (qr(1, 2), 4));
        let l = LatticeBasis::from_int_columns(&[&[2, 0], &[0, 1]]).unwrap();
        let (d, s) = cvp_ellip(&l, &id, &[q(1), qr(1, 5)]).unwrap();
        assert_eq!(d, qr(26, 25));
        assert_eq!(pts(&s), vec![qvec(&[0, 0]), qvec(&[2, 0])]);
    }

    #[test]
    fn svp_examples() {
        let (l1, s) = svp_ellip(&LatticeBasis::identity(3), &InnerProduct::euclidean(3)).unwrap();
        assert_eq!((l1, s.len()), (q(1), 6));
        let aniso = InnerProduct::new(linalg::diag(&[q(1), q(100)])).unwrap();
        let (l1, s) = svp_ellip(&z2(), &aniso).unwrap();
        assert_eq!(l1, q(1));
        assert_eq!(pts(&s), vec![qvec(&[-1, 0]), qvec(&[1, 0])]);
    }

    #[test]
    fn ellipsoid_enum_examples() {
        let e = crate::ellipsoid::Ellipsoid::ball(2, &q(1));
        assert_eq!(ellipsoid_enum(&z2(), &e, &qvec(&[0, 0]), EnumCap::default()).unwrap().len(), 5);
        let small = crate::ellipsoid::Ellipsoid::ball(2, &qr(1, 2));
        assert!(ellipsoid_enum(&z2(), &small, &[qr(1, 2), qr(1, 2)], EnumCap::default()).unwrap().is_empty());
    }

    #[test]
    fn successive_minima_examples() {
        let m = successive_minima(&LatticeBasis::identity(3), &InnerProduct::euclidean(3), EnumCap::default()).unwrap();
        assert!(m.iter().all(|(d, _)| *d == q(1)));
        let l = LatticeBasis::from_int_columns(&[&[1, 0], &[0, 3]]).unwrap();
        let m = successive_minima(&l, &InnerProduct::euclidean(2), EnumCap::default()).unwrap();
        assert_eq!(m.iter().map(|(d, _)| d.clone()).collect::<Vec<_>>(), vec![q(1), q(9)]);
    }

    #[test]
    fn non_square_lattice_uses_residual() {
        // the line spanned by (1, 1) in the plane
        let l = LatticeBasis::new(vec![qvec(&[1, 1])]).unwrap();
        let id = InnerProduct::euclidean(2);
        let (d, s) = cvp_ellip(&l, &id, &qvec(&[1, 0])).unwrap();
        assert_eq!(d, q(1));
        assert_eq!(s.len(), 2);
        let v = VoronoiData::new(&l, &id).unwrap();
        let r = v.enumerate(&qvec(&[0, 0]), &q(2), EnumCap::default()).unwrap();
        assert_eq!(r.len(), 3);
    }
}
