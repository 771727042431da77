//! M-ellipsoids: analytic ones for ℓp balls, randomized generation from
//! tilted inertial ellipsoids, covering by parallelepiped tilings and the
//! certify-or-restart loop.

use std::collections::{HashSet, VecDeque};
use std::f64::consts::{E, PI};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::body::{Centering, ConvexBody, LpIndex, Separation};
use crate::convex::{
    estimate_moments, hit_and_run, minimize, AffineMax, LogconcaveDensity, MomentEstimate, RngState, SamplerConfig,
    Stop,
};
use crate::ellipsoid::{Ellipsoid, Parallelepiped};
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::norm::ExactNorm;
use crate::rational::{self, from_f64, lower_bound_f64, q, to_f64, upper_bound_f64, QVec, Q};

/// `n^{1/2−1/p}·B₂ⁿ`: contains `B_pⁿ` for `p ≥ 2`, inscribed for `p ≤ 2`.
pub fn lp_m_ellipsoid(n: usize, p: &LpIndex) -> Result<Ellipsoid> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let nq = q(n as i64);
    // shape is n^{2/p − 1}·I
    let s = match (p, p.integer()) {
        (LpIndex::Infinity, _) => Q::one() / nq,
        (_, Some(1)) => nq,
        (_, Some(2)) => Q::one(),
        _ => {
            let pf = p.to_f64();
            let v = (n as f64).powf(2.0 / pf - 1.0);
            // round so that the ball stays outside (p > 2) or inside (p < 2)
            if pf > 2.0 {
                lower_bound_f64(v)
            } else {
                upper_bound_f64(v)
            }
        }
    };
    Ellipsoid::centered(linalg::scale_mat(&linalg::identity(n), &s))
}

/// Translate budget `ceil((√(8πe)·H)ⁿ)` of a covering attempt.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverBudget {
    pub h: f64,
    pub hard_cap: u64,
}

impl CoverBudget {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if !(h >= 1.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("H must be at least 1, got {h}")));
        }
        let cap = ((8.0 * PI * E).sqrt() * h).powi(n as i32).ceil();
        let hard_cap = if cap >= u64::MAX as f64 { u64::MAX } else { cap as u64 };
        Ok(CoverBudget { h, hard_cap: hard_cap.max(1) })
    }

    /// `H = 13e`, the primal check.
    pub fn primal(n: usize) -> Self {
        Self::new(n, 13.0 * E).expect("valid constant")
    }

    /// `H = 25e·13`, the dual check.
    pub fn dual(n: usize) -> Self {
        Self::new(n, 25.0 * E * 13.0).expect("valid constant")
    }
}

/// `K ⊆ ⋃_{x ∈ T} x + (1+slack)·P ⊆ ⋃_{x ∈ T} x + (1+slack)·E`.
#[derive(Clone, Debug, Serialize)]
pub struct Covering {
    ellipsoid: Ellipsoid,
    #[serde(skip)]
    parallelepiped: Parallelepiped,
    #[serde(skip)]
    origin: DVector<f64>,
    /// Integer coordinates in the tiling lattice, sorted.
    tiles: Vec<Vec<i64>>,
    #[serde(with = "rational::serde_q::mat")]
    translates: Vec<QVec>,
    #[serde(with = "rational::serde_q")]
    slack: Q,
    intersection_queries: usize,
}

impl Covering {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn ellipsoid(&self) -> &Ellipsoid {
        &self.ellipsoid
    }

    pub fn tiles(&self) -> &[Vec<i64>] {
        &self.tiles
    }

    pub fn translates(&self) -> &[QVec] {
        &self.translates
    }

    pub fn slack(&self) -> &Q {
        &self.slack
    }

    pub fn intersection_queries(&self) -> usize {
        self.intersection_queries
    }

    /// `(1+slack)·E`, the body whose translates cover `K`.
    pub fn covering_ellipsoid(&self) -> Ellipsoid {
        self.ellipsoid.scaled(&(Q::one() + &self.slack))
    }

    /// Whether `y` lies in some inflated tile.
    pub fn covers(&self, y: &[f64]) -> bool {
        let n = y.len();
        let yv = DVector::from_column_slice(y);
        let rel = &yv - &self.origin;
        let z = self.parallelepiped.tiling_coords(&(&rel + self.parallelepiped.center()));
        let base: Vec<i64> = z.iter().map(|v| v.round() as i64).collect();
        let limit = 1.0 + to_f64(&self.slack);
        let gauge = |t: &[i64]| {
            let c = &self.origin + self.parallelepiped.tile_center(t) - self.parallelepiped.center();
            self.parallelepiped.gauge(&(&yv - c + self.parallelepiped.center()))
        };
        let set: HashSet<&[i64]> = self.tiles.iter().map(|t| t.as_slice()).collect();
        // the nearest tile first, then its 3ⁿ neighbourhood
        if set.contains(base.as_slice()) && gauge(&base) <= limit {
            return true;
        }
        let mut offs = vec![-1i64; n];
        loop {
            let t: Vec<i64> = base.iter().zip(&offs).map(|(b, o)| b + o).collect();
            if set.contains(t.as_slice()) && gauge(&t) <= limit {
                return true;
            }
            let mut i = 0;
            while i < n {
                offs[i] += 1;
                if offs[i] <= 1 {
                    break;
                }
                offs[i] = -1;
                i += 1;
            }
            if i == n {
                return false;
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoverOutcome {
    Covering(Covering),
    /// More than `hard_cap` tiles meet `K`, so `N(K, E) > Hⁿ`.
    ExceedsBudget {
        tiles_found: usize,
        hard_cap: u64,
    },
}

impl CoverOutcome {
    pub fn covering(self) -> Option<Covering> {
        match self {
            CoverOutcome::Covering(c) => Some(c),
            CoverOutcome::ExceedsBudget { .. } => None,
        }
    }
}

/// Weak intersection oracle: `true` if `inf_K ‖y − x‖_P ≤ 1 + eps` is
/// certified, `false` if `inf_K ‖y − x‖_P > 1`.
pub fn intersects_tile(body: &dyn ConvexBody, factor: &DMatrix<f64>, x: &DVector<f64>, eps: f64) -> Result<bool> {
    let n = x.len();
    let xs: Vec<f64> = x.iter().copied().collect();
    if body.contains(&xs, 0.0) {
        return Ok(true);
    }
    let sn = (n as f64).sqrt();
    let mut pieces = Vec::with_capacity(2 * n);
    for i in 0..n {
        let row: Vec<f64> = factor.row(i).iter().map(|v| v * sn).collect();
        let off = -row.iter().zip(&xs).map(|(a, b)| a * b).sum::<f64>();
        pieces.push((row.clone(), off));
        pieces.push((row.iter().map(|v| -v).collect(), -off));
    }
    let f = AffineMax::new(pieces);
    let opt = minimize(body, &f, eps / 2.0, None, |best, lower| {
        if best <= 1.0 + eps || lower > 1.0 {
            Stop::Halt
        } else {
            Stop::Continue
        }
    })?;
    Ok(opt.value <= 1.0 + eps)
}

/// Breadth-first tiling of `K` by translates of the parallelepiped
/// inscribed in `E`, anchored at the centre of `K`.
pub fn build_cover(body: &dyn ConvexBody, e: &Ellipsoid, budget: &CoverBudget) -> Result<CoverOutcome> {
    let n = body.dim();
    if e.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: e.dim() });
    }
    let p = e.inscribed_parallelepiped()?;
    let origin = DVector::from_vec(rational::vec_to_f64(&body.centering().center));
    let eps = 1.0 / n as f64;
    let zero = vec![0i64; n];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    let mut tiles = Vec::new();
    let mut queries = 0usize;
    while let Some(z) = queue.pop_front() {
        let x = &origin + p.tile_center(&z);
        queries += 1;
        if !intersects_tile(body, p.factor(), &x, eps)? {
            continue;
        }
        tiles.push(z.clone());
        if tiles.len() as u64 > budget.hard_cap {
            return Ok(CoverOutcome::ExceedsBudget { tiles_found: tiles.len(), hard_cap: budget.hard_cap });
        }
        let mut next = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [-1, 1] {
                let mut y = z.clone();
                y[i] += s;
                next.push(y);
            }
        }
        next.sort();
        for y in next {
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    tiles.sort();
    let translates = tiles.iter().map(|z| rational::vec_from_f64((&origin + p.tile_center(z)).as_slice())).collect();
    Ok(CoverOutcome::Covering(Covering {
        ellipsoid: e.clone(),
        parallelepiped: p,
        origin,
        tiles,
        translates,
        slack: Q::new(BigInt::one(), BigInt::from(n)),
        intersection_queries: queries,
    }))
}

/// `(h_K(u), maximizer)`, in closed form when available.
fn support_point(body: &dyn ConvexBody, u: &[f64], eps: f64) -> Result<(f64, Vec<f64>)> {
    if let Some(s) = body.support(u) {
        return Ok(s);
    }
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    let opt = minimize(body, &AffineMax::linear(neg), eps, None, |_, _| Stop::Continue)?;
    Ok((-opt.value, opt.witness))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(K − K)* = {x : h_K(x) + h_K(−x) ≤ 1}`.
pub struct DifferencePolar<'a> {
    body: &'a dyn ConvexBody,
    eps: f64,
    centering: Centering,
}

impl<'a> DifferencePolar<'a> {
    /// `eps` is the accuracy of the whole width evaluation; each of the
    /// two support evaluations gets `eps/4`.
    pub fn new(body: &'a dyn ConvexBody, eps: f64) -> Result<Self> {
        let c = body.centering();
        if c.inner <= Q::zero() {
            return Err(Error::InvalidBody("an inner radius is needed for the polar body".into()));
        }
        let inner = Q::one() / (q(2) * &c.outer);
        let outer = Q::one() / (q(2) * &c.inner);
        Ok(DifferencePolar { body, eps, centering: Centering::origin(body.dim(), inner, outer) })
    }

    /// With known radii `inner·B₂ⁿ ⊆ (K − K)* ⊆ outer·B₂ⁿ`.
    pub fn with_radii(body: &'a dyn ConvexBody, eps: f64, inner: Q, outer: Q) -> Self {
        DifferencePolar { body, eps, centering: Centering::origin(body.dim(), inner, outer) }
    }

    fn width(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (hp, yp) = support_point(self.body, x, self.eps / 4.0)?;
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (hm, ym) = support_point(self.body, &neg, self.eps / 4.0)?;
        Ok((hp + hm, yp.iter().zip(&ym).map(|(a, b)| a - b).collect()))
    }
}

impl ConvexBody for DifferencePolar<'_> {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn centering(&self) -> Centering {
        self.centering.clone()
    }

    fn contains(&self, x: &[f64], slack: f64) -> bool {
        match self.width(x) {
            Ok((w, _)) => w <= 1.0 + slack * to_f64(&self.centering.inner).max(1e-12),
            Err(_) => false,
        }
    }

    fn separate(&self, x: &[f64]) -> Separation {
        match self.width(x) {
            Ok((w, _)) if w <= 1.0 => Separation::Inside,
            Ok((_, g)) => Separation::Cut(g),
            Err(_) => Separation::Empty,
        }
    }

    fn exact_gauge(&self, x: &[Q]) -> Option<ExactNorm> {
        self.body.exact_width(x)
    }

    fn gauge_f64(&self, x: &[f64]) -> Option<(f64, f64)> {
        let (w, _) = self.width(x).ok()?;
        (w > 0.0).then(|| (w, self.eps / w + 1e-12))
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// `n·conv{K − b, b − K}* = {s : |⟨s, y − b⟩| ≤ n for all y ∈ K}`.
pub struct SymmetricPolar<'a> {
    body: &'a dyn ConvexBody,
    b: Vec<f64>,
    scale: f64,
    eps: f64,
    centering: Centering,
}

impl<'a> SymmetricPolar<'a> {
    pub fn new(body: &'a dyn ConvexBody, b: &[f64], scale: f64, eps: f64) -> Result<Self> {
        let c = body.centering();
        let cf = rational::vec_to_f64(&c.center);
        let off = cf.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let r = to_f64(&c.inner) - off;
        if r <= 0.0 {
            return Err(Error::InvalidBody("the reference point is not deep inside the body".into()));
        }
        let big_r = to_f64(&c.outer) + off;
        let centering = Centering::origin(body.dim(), lower_bound_f64(scale / big_r), upper_bound_f64(scale / r));
        Ok(SymmetricPolar { body, b: b.to_vec(), scale, eps, centering })
    }

    /// `(max(h(s), h(−s)) − ⟨·, b⟩, cut direction)`.
    fn extent(&self, s: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (hp, yp) = support_point(self.body, s, self.eps)?;
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let (hm, ym) = support_point(self.body, &neg, self.eps)?;
        let sb = dot(s, &self.b);
        let up = hp - sb;
        let down = hm + sb;
        if up >= down {
            Ok((up, yp.iter().zip(&self.b).map(|(y, b)| y - b).collect()))
        } else {
            Ok((down, ym.iter().zip(&self.b).map(|(y, b)| b - y).collect()))
        }
    }
}

impl ConvexBody for SymmetricPolar<'_> {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn centering(&self) -> Centering {
        self.centering.clone()
    }

    fn contains(&self, s: &[f64], slack: f64) -> bool {
        match self.extent(s) {
            Ok((h, _)) => h <= self.scale * (1.0 + slack * to_f64(&self.centering.inner).max(1e-12)),
            Err(_) => false,
        }
    }

    fn separate(&self, s: &[f64]) -> Separation {
        match self.extent(s) {
            Ok((h, _)) if h <= self.scale => Separation::Inside,
            Ok((_, g)) => Separation::Cut(g),
            Err(_) => Separation::Empty,
        }
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Sampling schedule and thresholds of the M-ellipsoid pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct MellConfig {
    pub h_primal: f64,
    pub h_dual: f64,
    pub restarts: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub centroid_samples: usize,
    /// Relative accuracy and constant of the moment estimate.
    pub moment_eps: f64,
    pub moment_c: f64,
}

impl MellConfig {
    pub fn default_for(n: usize) -> Self {
        let s = SamplerConfig::default_for(n);
        MellConfig {
            h_primal: 13.0 * E,
            h_dual: 25.0 * E * 13.0,
            restarts: 20,
            burn_in: s.burn_in,
            thinning: s.thinning,
            centroid_samples: 200 * n,
            moment_eps: 0.25,
            moment_c: 4.0,
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig { burn_in: self.burn_in, thinning: self.thinning }
    }
}

/// Mean of uniform samples, accepted only if the `2n` probes
/// `b ± 3r/(4(n+1))·e_i` pass the membership oracle.
pub fn estimate_centroid(
    body: &dyn ConvexBody,
    rng: &mut RngState,
    samples: usize,
    config: &SamplerConfig,
) -> Result<Option<Vec<f64>>> {
    let n = body.dim();
    let c = body.centering();
    let r = to_f64(&c.inner);
    if r <= 0.0 {
        return Err(Error::InvalidBody("an inner radius is needed to certify the centroid".into()));
    }
    let start = rational::vec_to_f64(&c.center);
    let pts = hit_and_run(&LogconcaveDensity::uniform(body), rng, &start, config, samples.max(1))?;
    let mut b = vec![0.0; n];
    for p in &pts {
        for (bi, pi) in b.iter_mut().zip(p) {
            *bi += pi;
        }
    }
    for bi in &mut b {
        *bi /= pts.len() as f64;
    }
    let nf = n as f64;
    let step = 3.0 * r / (4.0 * (nf + 1.0));
    let slack = r / (4.0 * (nf + 1.0) * nf.sqrt());
    for i in 0..n {
        for s in [-1.0, 1.0] {
            let mut y = b.clone();
            y[i] += s * step;
            if !body.contains(&y, slack) {
                return Ok(None);
            }
        }
    }
    Ok(Some(b))
}

/// `E(A)` with `A` the inverse empirical covariance of the density.
#[derive(Clone, Debug)]
pub struct InertialEstimate {
    pub ellipsoid: Ellipsoid,
    pub moments: MomentEstimate,
}

pub fn estimate_inertial_ellipsoid(
    density: &LogconcaveDensity<'_>,
    rng: &mut RngState,
    eps: f64,
    c: f64,
    config: &SamplerConfig,
) -> Result<InertialEstimate> {
    let moments = estimate_moments(density, rng, eps, c, config)?;
    let inv = moments.covariance.clone().try_inverse().ok_or(Error::DegenerateCovariance)?;
    let ellipsoid = rational_ellipsoid(&inv)?;
    Ok(InertialEstimate { ellipsoid, moments })
}

/// Rounds a float PD matrix to a short-denominator rational shape.
pub fn rational_ellipsoid(m: &DMatrix<f64>) -> Result<Ellipsoid> {
    let n = m.nrows();
    let scale = m.amax();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::DegenerateCovariance);
    }
    let k = 30 - scale.log2().ceil() as i32;
    let den = 2f64.powi(k);
    let round = |v: f64| -> Q {
        let num = from_f64((v * den).round());
        if k >= 0 {
            num / Q::from_integer(BigInt::one() << k as usize)
        } else {
            num * Q::from_integer(BigInt::one() << (-k) as usize)
        }
    };
    let mut shape: QMat = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = round(0.5 * (m[(i, j)] + m[(j, i)]));
            shape[i][j] = v.clone();
            shape[j][i] = v;
        }
    }
    Ellipsoid::centered(shape).map_err(|_| Error::DegenerateCovariance)
}

/// `√n·E(cov(f_s)⁻¹)` for `s` uniform in `n·conv{K − b, b − K}*`.
pub fn m_gen(body: &dyn ConvexBody, b: &[f64], rng: &mut RngState, config: &MellConfig) -> Result<Ellipsoid> {
    let n = body.dim();
    let nf = n as f64;
    let polar = SymmetricPolar::new(body, b, nf, 1e-6)?;
    let zero = vec![0.0; n];
    let s = hit_and_run(&LogconcaveDensity::uniform(&polar), rng, &zero, &config.sampler(), 1)?.remove(0);
    let density = LogconcaveDensity::tilted(body, &s);
    let est = estimate_inertial_ellipsoid(&density, rng, config.moment_eps, config.moment_c, &config.sampler())?;
    Ok(est.ellipsoid.scaled(&from_f64(nf.sqrt())))
}

/// Certified M-ellipsoid with both coverings.
#[derive(Clone, Debug, Serialize)]
pub struct MEllipsoidResult {
    pub ellipsoid: Ellipsoid,
    pub covering: Covering,
    pub dual_covering: Covering,
    pub primal_budget: CoverBudget,
    pub dual_budget: CoverBudget,
    pub attempts: usize,
}

/// Runs both covering checks for a candidate `E`; `None` if either
/// exceeds its budget.
pub fn certify(body: &dyn ConvexBody, e: &Ellipsoid, config: &MellConfig) -> Result<Option<(Covering, Covering)>> {
    let n = body.dim();
    let primal = CoverBudget::new(n, config.h_primal)?;
    let Some(cover) = build_cover(body, e, &primal)?.covering() else {
        return Ok(None);
    };
    let dual_body = DifferencePolar::new(body, 1e-6)?;
    let dual = CoverBudget::new(n, config.h_dual)?;
    let Some(dual_cover) = build_cover(&dual_body, &e.polar()?, &dual)?.covering() else {
        return Ok(None);
    };
    Ok(Some((cover, dual_cover)))
}

/// Centroid, candidate, primal and dual covering checks; restarts on any
/// failed step up to `config.restarts` times.
pub fn m_ellipsoid(body: &dyn ConvexBody, rng: &mut RngState, config: &MellConfig) -> Result<MEllipsoidResult> {
    let n = body.dim();
    let sampler = config.sampler();
    for attempt in 1..=config.restarts {
        let Some(b) = estimate_centroid(body, rng, config.centroid_samples, &sampler)? else {
            continue;
        };
        let e = match m_gen(body, &b, rng, config) {
            Ok(e) => e,
            Err(Error::DegenerateCovariance) => continue,
            Err(err) => return Err(err),
        };
        if let Some((covering, dual_covering)) = certify(body, &e, config)? {
            return Ok(MEllipsoidResult {
                ellipsoid: e,
                covering,
                dual_covering,
                primal_budget: CoverBudget::new(n, config.h_primal)?,
                dual_budget: CoverBudget::new(n, config.h_dual)?,
                attempts: attempt,
            });
        }
    }
    Err(Error::RestartBudgetExceeded(config.restarts))
}
