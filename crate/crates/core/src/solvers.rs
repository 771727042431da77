//! Lattice problems in general norms: enumeration of lattice points in a
//! scaled convex body through an ellipsoid covering, shortest and closest
//! vectors by a doubling search, and lattice-point counts of translates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{ConcreteBody, ConvexBody, LpIndex};
use crate::convex::RngState;
use crate::ellipsoid::Ellipsoid;
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::mell::{build_cover, lp_m_ellipsoid, m_ellipsoid, CoverBudget, CoverOutcome, Covering, MellConfig};
use crate::rational::{self, q, serde_q, sqrt_floor, QVec, Q};
use crate::voronoi::{EnumCap, InnerProduct, LatticePoint, PreparedLattice, VoronoiData};

/// `K ⊆ ⋃_{s ∈ T} s + E` for an origin-centred ellipsoid `E`.
#[derive(Clone, Debug, Serialize)]
pub struct EnumCovering {
    pub ellipsoid: Ellipsoid,
    #[serde(with = "serde_q::mat")]
    pub translates: Vec<QVec>,
    pub source: String,
}

impl EnumCovering {
    pub fn new(ellipsoid: Ellipsoid, translates: Vec<QVec>, source: &str) -> Result<Self> {
        if !ellipsoid.is_centered() {
            return Err(Error::NonCentered);
        }
        if translates.is_empty() || translates.iter().any(|t| t.len() != ellipsoid.dim()) {
            return Err(Error::InvalidArgument("covering needs translates of the ellipsoid's dimension".into()));
        }
        Ok(EnumCovering { ellipsoid, translates, source: source.into() })
    }

    /// Covering by the inflated tiles of a tiling.
    pub fn from_covering(c: &Covering, source: &str) -> Self {
        EnumCovering { ellipsoid: c.covering_ellipsoid(), translates: c.translates().to_vec(), source: source.into() }
    }

    /// A covering for a concrete body: a single enclosing ellipsoid where
    /// one is known in closed form, a tiling of the analytic ℓp ellipsoid
    /// for `p < 2`, and the randomized M-ellipsoid for polytopes.
    pub fn for_body(body: &ConcreteBody, seed: Option<u64>) -> Result<Self> {
        let n = body.dim();
        match body {
            ConcreteBody::Lp(b) => {
                let e = lp_m_ellipsoid(n, b.p())?.scaled(b.scale());
                let encloses = match b.p() {
                    LpIndex::Infinity => true,
                    LpIndex::Finite(p) => *p >= q(2),
                };
                if encloses {
                    return Self::new(e, vec![vec![Q::zero(); n]], "lp-enclosing");
                }
                match build_cover(body, &e, &CoverBudget::primal(n))? {
                    CoverOutcome::Covering(c) => Ok(Self::from_covering(&c, "lp-tiling")),
                    CoverOutcome::ExceedsBudget { tiles_found, hard_cap } => {
                        Err(Error::BudgetExceeded { budget: hard_cap as usize, needed: tiles_found as u128 })
                    }
                }
            }
            ConcreteBody::Ellipsoid(b) => {
                let e = b.ellipsoid();
                Self::new(Ellipsoid::centered(e.shape().clone())?, vec![e.center().clone()], "ellipsoid")
            }
            ConcreteBody::Shifted(inner, s) => {
                let mut c = Self::for_body(inner, seed)?;
                for t in &mut c.translates {
                    *t = rational::add(t, s);
                }
                Ok(c)
            }
            ConcreteBody::Polytope(_) => {
                let seed = seed.ok_or_else(|| {
                    Error::InvalidArgument("a seed is required to build an M-ellipsoid covering of a polytope".into())
                })?;
                let r = m_ellipsoid(body, &mut RngState::new(seed), &MellConfig::default_for(n))?;
                Ok(Self::from_covering(&r.covering, "m-ellipsoid"))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.translates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.translates.is_empty()
    }
}

/// Arguments of one enumeration `{y ∈ L : ‖y − x‖_K ≤ d}` up to `ε`.
pub struct EnumRequest<'a> {
    pub body: &'a dyn ConvexBody,
    pub lattice: &'a LatticeBasis,
    pub center: QVec,
    pub distance: Q,
    pub epsilon: Q,
}

/// Enumeration over a fixed body, lattice and covering; the Voronoi data
/// of the covering ellipsoid is computed once and reused.
pub struct LatticeEnumerator<'a> {
    body: &'a dyn ConvexBody,
    basis: LatticeBasis,
    cover: EnumCovering,
    voronoi: VoronoiData,
    cap: EnumCap,
    calls: usize,
    scanned: usize,
}

impl<'a> LatticeEnumerator<'a> {
    pub fn new(body: &'a dyn ConvexBody, basis: &LatticeBasis, cover: EnumCovering, cap: EnumCap) -> Result<Self> {
        let n = body.dim();
        if basis.dim() != n || cover.ellipsoid.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: basis.dim() });
        }
        if !basis.is_square() {
            return Err(Error::InvalidArgument("a full-rank lattice is required".into()));
        }
        let ip = InnerProduct::new(cover.ellipsoid.shape().clone())?;
        let voronoi = VoronoiData::new(basis, &ip)?;
        Ok(LatticeEnumerator { body, basis: basis.clone(), cover, voronoi, cap, calls: 0, scanned: 0 })
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn body(&self) -> &'a dyn ConvexBody {
        self.body
    }

    pub fn covering(&self) -> &EnumCovering {
        &self.cover
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn points_scanned(&self) -> usize {
        self.scanned
    }

    /// `S` with `{y : ‖y−x‖_K ≤ d} ⊆ S ⊆ {y : ‖y−x‖_K ≤ d + ε}`, sorted by
    /// coefficients. Any `ε > 0` is accepted.
    pub fn enumerate(&mut self, x: &[Q], d: &Q, eps: &Q) -> Result<Vec<LatticePoint>> {
        if d.is_negative() {
            return Err(Error::InvalidArgument("distance must be nonnegative".into()));
        }
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("slack must be positive".into()));
        }
        self.calls += 1;
        let mut candidates: BTreeMap<Vec<BigInt>, LatticePoint> = BTreeMap::new();
        if d.is_zero() {
            if let Some(c) = self.basis.coords_of(x).filter(|c| c.iter().all(Q::is_integer)) {
                let coeffs: Vec<BigInt> = c.iter().map(|v| v.to_integer()).collect();
                candidates.insert(coeffs.clone(), LatticePoint { coeffs, point: x.to_vec() });
            }
        } else {
            let r2 = d * d;
            let cap = self.cap;
            let voronoi = &self.voronoi;
            let found: Vec<Result<Vec<LatticePoint>>> = self
                .cover
                .translates
                .par_iter()
                .map(|s| voronoi.enumerate(&rational::add(x, &rational::scale(s, d)), &r2, cap))
                .collect();
            for part in found {
                let part = part?;
                self.scanned += part.len();
                if self.scanned > cap.0 {
                    return Err(Error::CapExceeded { cap: cap.0, found: self.scanned });
                }
                for p in part {
                    candidates.entry(p.coeffs.clone()).or_insert(p);
                }
            }
        }
        let half = eps / q(2);
        let limit = d + &half;
        let body = self.body;
        let kept: Vec<Result<Option<LatticePoint>>> = candidates
            .into_values()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|p| {
                let g = body.distance(&rational::sub(&p.point, x), &half)?;
                Ok((g <= limit).then_some(p))
            })
            .collect();
        let mut out = Vec::new();
        for k in kept {
            if let Some(p) = k? {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// One-shot enumeration.
pub fn lattice_enum(req: &EnumRequest<'_>, cover: EnumCovering, cap: EnumCap) -> Result<Vec<LatticePoint>> {
    let mut en = LatticeEnumerator::new(req.body, req.lattice, cover, cap)?;
    en.enumerate(&req.center, &req.distance, &req.epsilon)
}

/// Outcome of [`shortest_vectors`] or [`closest_vectors`].
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub result: Vec<LatticePoint>,
    /// `d` when the doubling search stopped.
    #[serde(with = "serde_q")]
    pub final_distance: Q,
    /// `t`, the Euclidean optimum over the outer radius.
    #[serde(with = "serde_q")]
    pub seed_distance: Q,
    /// `d + t`, the radius of the last enumeration.
    #[serde(with = "serde_q")]
    pub last_radius: Q,
    /// `m`, the smallest approximate distance among candidates.
    #[serde(with = "serde_q")]
    pub filter_threshold: Q,
    pub doublings: usize,
    pub enumeration_calls: usize,
    pub points_scanned: usize,
}

const MAX_DOUBLINGS: usize = 200;

fn check_eps(eps: &Q) -> Result<()> {
    if !(eps.is_positive() && *eps <= Q::one()) {
        return Err(Error::InvalidArgument("ε must lie in (0, 1]".into()));
    }
    Ok(())
}

/// `t = ⌊‖z‖⌋ / R` from an exact squared Euclidean length.
fn seed_distance(norm_sq: &Q, outer: &Q) -> Q {
    let tol = norm_sq / Q::from_integer(BigInt::from(1_000_000));
    sqrt_floor(norm_sq, &tol) / outer
}

/// Doubling search from `t`, final enumeration at `d + t`, and the filter
/// `D_K(y − x, εt/4) ≤ m + εt/2`.
fn doubling_search(en: &mut LatticeEnumerator<'_>, x: &[Q], t: Q, eps: &Q, exclude_zero: bool) -> Result<SolveReport> {
    let calls0 = en.calls();
    let scanned0 = en.points_scanned();
    let strip = |v: Vec<LatticePoint>| -> Vec<LatticePoint> {
        if exclude_zero {
            v.into_iter().filter(|p| !rational::is_zero_vec(&p.point)).collect()
        } else {
            v
        }
    };
    let mut d = t.clone();
    let mut doublings = 0;
    loop {
        let u = strip(en.enumerate(x, &d, &t)?);
        if !u.is_empty() {
            break;
        }
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::IterationBudgetExceeded(MAX_DOUBLINGS));
        }
        d = &d * q(2);
    }
    let last_radius = &d + &t;
    let u = strip(en.enumerate(x, &last_radius, &t)?);
    let acc = eps * &t / q(4);
    let body = en.body();
    let dist: Vec<Q> =
        u.par_iter().map(|p| body.distance(&rational::sub(&p.point, x), &acc)).collect::<Result<Vec<Q>>>()?;
    let m = dist.iter().min().cloned().expect("nonempty candidate set");
    let limit = &m + eps * &t / q(2);
    let result = u.into_iter().zip(dist).filter(|(_, g)| *g <= limit).map(|(p, _)| p).collect();
    Ok(SolveReport {
        result,
        final_distance: d,
        seed_distance: t,
        last_radius,
        filter_threshold: m,
        doublings,
        enumeration_calls: en.calls() - calls0,
        points_scanned: en.points_scanned() - scanned0,
    })
}

/// `SVP(K, L) ⊆ S ⊆ SVP_ε(K, L)` for a well-centred body.
pub fn shortest_vectors(en: &mut LatticeEnumerator<'_>, eps: &Q) -> Result<SolveReport> {
    check_eps(eps)?;
    let n = en.basis().dim();
    let (lambda_sq, _) = PreparedLattice::new(en.basis(), &InnerProduct::euclidean(n))?.svp()?;
    let (_, outer) = en.body().gauge_bounds()?;
    let t = seed_distance(&lambda_sq, &outer);
    doubling_search(en, &vec![Q::zero(); n], t, eps, true)
}

/// `CVP(K, L, x) ⊆ S ⊆ CVP_ε(K, L, x)`.
pub fn closest_vectors(en: &mut LatticeEnumerator<'_>, x: &[Q], eps: &Q) -> Result<SolveReport> {
    check_eps(eps)?;
    let n = en.basis().dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    if let Some(c) = en.basis().coords_of(x).filter(|c| c.iter().all(Q::is_integer)) {
        let coeffs = c.iter().map(|v| v.to_integer()).collect();
        return Ok(SolveReport {
            result: vec![LatticePoint { coeffs, point: x.to_vec() }],
            final_distance: Q::zero(),
            seed_distance: Q::zero(),
            last_radius: Q::zero(),
            filter_threshold: Q::zero(),
            doublings: 0,
            enumeration_calls: 0,
            points_scanned: 0,
        });
    }
    let (dist_sq, _) = PreparedLattice::new(en.basis(), &InnerProduct::euclidean(n))?.cvp(x)?;
    let (_, outer) = en.body().gauge_bounds()?;
    let t = seed_distance(&dist_sq, &outer);
    doubling_search(en, x, t, eps, false)
}

/// Whether `vol(K ∩ −K) ≥ γ⁻ⁿ vol(K)` is known analytically: `γ = 1` for
/// symmetric bodies.
pub fn known_gamma(body: &dyn ConvexBody) -> Option<Q> {
    body.is_symmetric().then(Q::one)
}

/// Exact counts `|(K + x) ∩ L|` for a list of shifts.
#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    #[serde(with = "serde_q::mat")]
    pub shifts: Vec<QVec>,
    pub counts: Vec<usize>,
    /// `max` over the shifts, a lower bound on `G(K, L)`.
    pub max_count: usize,
    pub checks: Vec<BoundCheck>,
}

/// Evaluation of one counting inequality.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub lemma: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Counts by enumeration at distance 1 and an exact gauge filter.
pub fn count_g(en: &mut LatticeEnumerator<'_>, shifts: &[QVec]) -> Result<CountReport> {
    let eps = Q::new(BigInt::one(), BigInt::from(100));
    let mut counts = Vec::with_capacity(shifts.len());
    for x in shifts {
        let s = en.enumerate(x, &Q::one(), &eps)?;
        let mut c = 0;
        for p in &s {
            let g = en.body().exact_gauge(&rational::sub(&p.point, x)).ok_or(Error::InexactGauge)?;
            if g.le_q(&Q::one()) {
                c += 1;
            }
        }
        counts.push(c);
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    Ok(CountReport { shifts: shifts.to_vec(), counts, max_count, checks: Vec::new() })
}
