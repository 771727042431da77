//! Brute-force reference oracles.
//!
//! Everything here scans a coefficient box and evaluates exact gauges point
//! by point. It shares no search logic with the solvers, so the two can be
//! compared set against set.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::instance::{BodySpec, Instance};
use crate::lattice::LatticeBasis;
use crate::linalg;
use crate::norm::ExactNorm;
use crate::rational::{self, q, qr, QVec, Q};
use crate::solvers::BoundCheck;
use crate::voronoi::LatticePoint;

/// Limit on the number of coefficient vectors a brute-force scan may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BruteForceBudget {
    pub max_candidates: usize,
}

impl Default for BruteForceBudget {
    fn default() -> Self {
        BruteForceBudget { max_candidates: 1_000_000 }
    }
}

impl BruteForceBudget {
    pub fn new(max_candidates: usize) -> Result<Self> {
        if max_candidates == 0 {
            return Err(Error::InvalidArgument("brute-force budget must be positive".into()));
        }
        Ok(BruteForceBudget { max_candidates })
    }
}

/// Integer box containing the coefficients of every lattice vector within
/// Euclidean distance `radius` of `center`.
struct CoefficientBox {
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
}

impl CoefficientBox {
    /// `|z_i − c_i| = |⟨row_i(B⁻¹), y − x⟩| ≤ ‖row_i‖·radius`.
    fn new(lattice: &LatticeBasis, center: &[Q], radius: &Q, budget: BruteForceBudget) -> Result<Self> {
        if !lattice.is_square() {
            return Err(Error::InvalidArgument("brute-force oracles need a full-rank lattice".into()));
        }
        let inv = linalg::inverse(&lattice.matrix())?;
        let c = linalg::mat_vec(&inv, center);
        let tol = qr(1, 1_000_000);
        let mut lo = Vec::with_capacity(c.len());
        let mut hi = Vec::with_capacity(c.len());
        let mut needed: u128 = 1;
        for (row, ci) in inv.iter().zip(&c) {
            let reach = rational::sqrt_ceil(&rational::norm2_sq(row), &tol) * radius;
            let l = (ci - &reach).floor().to_integer();
            let h = (ci + &reach).ceil().to_integer();
            let width = (&h - &l + 1u32).to_u128().unwrap_or(u128::MAX);
            needed = needed.saturating_mul(width);
            lo.push(l);
            hi.push(h);
        }
        if needed > budget.max_candidates as u128 {
            return Err(Error::BudgetExceeded { budget: budget.max_candidates, needed });
        }
        Ok(CoefficientBox { lo, hi })
    }

    /// Visits every coefficient vector in lexicographic order until `f`
    /// returns `false`.
    fn scan(&self, lattice: &LatticeBasis, mut f: impl FnMut(LatticePoint) -> Result<bool>) -> Result<()> {
        let n = self.lo.len();
        let mut z = self.lo.clone();
        loop {
            let point = lattice.point(&z);
            if !f(LatticePoint { coeffs: z.clone(), point })? {
                return Ok(());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                z[i] += 1u32;
                if z[i] <= self.hi[i] {
                    break;
                }
                z[i] = self.lo[i].clone();
            }
        }
    }
}

fn gauge(body: &dyn ConvexBody, v: &[Q]) -> Result<ExactNorm> {
    body.exact_gauge(v).ok_or(Error::InexactGauge)
}

/// `{y ∈ L : ‖y − x‖_K ≤ d}`, sorted by coefficients.
pub fn brute_enum(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    x: &[Q],
    d: &Q,
    budget: BruteForceBudget,
) -> Result<Vec<LatticePoint>> {
    Ok(brute_gauges(lattice, body, x, d, budget)?.into_iter().map(|(p, _)| p).collect())
}

fn brute_gauges(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    x: &[Q],
    d: &Q,
    budget: BruteForceBudget,
) -> Result<Vec<(LatticePoint, ExactNorm)>> {
    if x.len() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: x.len() });
    }
    let (_, outer) = body.gauge_bounds()?;
    let bx = CoefficientBox::new(lattice, x, &(outer * d), budget)?;
    let mut out = Vec::new();
    bx.scan(lattice, |p| {
        let g = gauge(body, &rational::sub(&p.point, x))?;
        if g.le_q(d) {
            out.push((p, g));
        }
        Ok(true)
    })?;
    out.sort_by(|a, b| a.0.coeffs.cmp(&b.0.coeffs));
    Ok(out)
}

/// Exact optimum and every minimizer.
#[derive(Clone, Debug, Serialize)]
pub struct BruteOptimum {
    #[serde(serialize_with = "ser_norm")]
    pub value: ExactNorm,
    pub minimizers: Vec<LatticePoint>,
}

fn ser_norm<S: serde::Serializer>(v: &ExactNorm, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn minimize(candidates: Vec<(LatticePoint, ExactNorm)>) -> Option<BruteOptimum> {
    let value = candidates.iter().map(|(_, g)| g).min()?.clone();
    let minimizers = candidates.into_iter().filter(|(_, g)| *g == value).map(|(p, _)| p).collect();
    Some(BruteOptimum { value, minimizers })
}

/// `λ₁(K, L)` and all shortest nonzero vectors.
pub fn brute_svp(lattice: &LatticeBasis, body: &dyn ConvexBody, budget: BruteForceBudget) -> Result<BruteOptimum> {
    let tol = qr(1, 1_000_000);
    let mut radius: Option<Q> = None;
    for b in lattice.columns() {
        for v in [b.clone(), rational::neg(b)] {
            let g = gauge(body, &v)?.approx_upper(&tol);
            if radius.as_ref().is_none_or(|r| g < *r) {
                radius = Some(g);
            }
        }
    }
    let radius = radius.ok_or_else(|| Error::InvalidArgument("empty basis".into()))?;
    let origin = vec![Q::zero(); lattice.dim()];
    let mut cands = brute_gauges(lattice, body, &origin, &radius, budget)?;
    cands.retain(|(p, _)| !rational::is_zero_vec(&p.point));
    minimize(cands).ok_or_else(|| Error::InvalidArgument("no nonzero vector found".into()))
}

/// `d_K(L, x)` and all closest vectors.
pub fn brute_cvp(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    x: &[Q],
    budget: BruteForceBudget,
) -> Result<BruteOptimum> {
    if x.len() != lattice.dim() {
        return Err(Error::DimensionMismatch { expected: lattice.dim(), got: x.len() });
    }
    let c = lattice.coords_of(x).ok_or(Error::RankDeficient)?;
    let z: Vec<BigInt> = c.iter().map(rational::round_half_up).collect();
    let y = lattice.point(&z);
    let radius = gauge(body, &rational::sub(&y, x))?.approx_upper(&qr(1, 1_000_000));
    let cands = brute_gauges(lattice, body, x, &radius, budget)?;
    minimize(cands).ok_or_else(|| Error::InvalidArgument("rounding point was not found".into()))
}

/// Sorted gauges `‖y − x‖_K` of the lattice points within `d` of `x`.
pub fn brute_gauge_profile(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    x: &[Q],
    d: &Q,
    budget: BruteForceBudget,
) -> Result<Vec<ExactNorm>> {
    let mut g: Vec<ExactNorm> = brute_gauges(lattice, body, x, d, budget)?.into_iter().map(|(_, g)| g).collect();
    g.sort();
    Ok(g)
}

/// `|(sK + x) ∩ L|` for each shift `x`.
pub fn brute_count(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    scale: &Q,
    shifts: &[QVec],
    budget: BruteForceBudget,
) -> Result<Vec<usize>> {
    shifts.iter().map(|x| Ok(brute_enum(lattice, body, x, scale, budget)?.len())).collect()
}

/// First lattice point of `K` in lexicographic coefficient order. Works for
/// any body with exact membership, wherever its centre lies.
pub fn brute_ip(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    budget: BruteForceBudget,
) -> Result<Option<LatticePoint>> {
    let bx = match support_box(lattice, body, budget)? {
        Some(bx) => bx,
        None => {
            let c = body.centering();
            CoefficientBox::new(lattice, &c.center, &c.outer, budget)?
        }
    };
    let mut found = None;
    bx.scan(lattice, |p| {
        let inside =
            body.contains_exact(&p.point).ok_or_else(|| Error::InvalidBody("exact membership is required".into()))?;
        if inside {
            found = Some(p);
        }
        Ok(!inside)
    })?;
    Ok(found)
}

/// Coefficient box from the support function: `z_i = ⟨row_i(B⁻¹), y⟩`
/// ranges over `[−h_K(−row_i), h_K(row_i)]`.
fn support_box(
    lattice: &LatticeBasis,
    body: &dyn ConvexBody,
    budget: BruteForceBudget,
) -> Result<Option<CoefficientBox>> {
    if !lattice.is_square() {
        return Err(Error::InvalidArgument("brute-force oracles need a full-rank lattice".into()));
    }
    let inv = linalg::inverse(&lattice.matrix())?;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut needed: u128 = 1;
    for row in &inv {
        let r = rational::vec_to_f64(row);
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let (Some((up, _)), Some((down, _))) = (body.support(&r), body.support(&neg)) else {
            return Ok(None);
        };
        let pad = |v: f64| 1e-9 * (1.0 + v.abs());
        let l = BigInt::from((-down - pad(down)).floor() as i64);
        let h = BigInt::from((up + pad(up)).ceil() as i64);
        needed = needed.saturating_mul((&h - &l + 1u32).to_u128().unwrap_or(0));
        lo.push(l);
        hi.push(h);
    }
    if needed > budget.max_candidates as u128 {
        return Err(Error::BudgetExceeded { budget: budget.max_candidates, needed });
    }
    Ok(Some(CoefficientBox { lo, hi }))
}

/// Counting inequalities that can be checked against exact counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    /// `G(dK, L) ≤ (γ(1 + 2d/λ₁(K, L)))ⁿ`.
    Lambda1Bound,
    /// `G(tK, L) ≤ (4t + 2)ⁿ G(K, L)`.
    SmoothScaling,
    /// `vol(K)/det(L) ≤ G(K, L) ≤ max{1, μ(K, L)ⁿ} 2ⁿ vol(K)/det(L)`.
    PointsVolume,
}

impl Lemma {
    pub fn name(self) -> &'static str {
        match self {
            Lemma::Lambda1Bound => "lambda1-bd",
            Lemma::SmoothScaling => "gkl-smooth",
            Lemma::PointsVolume => "lt-pts-vol",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Lemma::Lambda1Bound, Lemma::SmoothScaling, Lemma::PointsVolume]
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown lemma {s:?}")))
    }
}

/// Quantities of `(K, L)` known in closed form.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AnalyticData {
    pub lambda1: Option<f64>,
    pub volume: Option<f64>,
    pub covering_radius: Option<f64>,
    /// `γ` with `vol(K ∩ −K) ≥ γ⁻ⁿ vol(K)`.
    pub gamma: Option<f64>,
}

/// Largest exact count over the sampled shifts of `scale·K`. Since it is a
/// lower bound on `G(scale·K, L)`, upper bounds are checked on it directly
/// and lower bounds pass whenever some sampled shift reaches them.
#[derive(Clone, Debug, Serialize)]
pub struct ScaledCount {
    #[serde(with = "rational::serde_q")]
    pub scale: Q,
    pub max_count: usize,
}

/// Sample data for [`check_bounds`].
#[derive(Clone, Debug, Serialize)]
pub struct BoundInput {
    pub n: usize,
    pub det: f64,
    pub counts: Vec<ScaledCount>,
    pub analytic: AnalyticData,
}

impl BoundInput {
    /// Exact counts of `s·K + x` over the given scales and shifts.
    pub fn sample(
        lattice: &LatticeBasis,
        body: &dyn ConvexBody,
        scales: &[Q],
        shifts: &[QVec],
        analytic: AnalyticData,
        budget: BruteForceBudget,
    ) -> Result<Self> {
        let top = scales.iter().max().ok_or_else(|| Error::InvalidArgument("no scales given".into()))?;
        let mut max_counts = vec![0usize; scales.len()];
        for x in shifts {
            let gauges = brute_gauge_profile(lattice, body, x, top, budget)?;
            for (m, s) in max_counts.iter_mut().zip(scales) {
                *m = (*m).max(gauges.partition_point(|g| g.le_q(s)));
            }
        }
        let counts =
            scales.iter().zip(max_counts).map(|(s, m)| ScaledCount { scale: s.clone(), max_count: m }).collect();
        Ok(BoundInput { n: lattice.dim(), det: lattice.det().to_f64(), counts, analytic })
    }
}

fn missing(what: &str, lemma: Lemma) -> Error {
    Error::MissingAnalyticData(format!("{what} is required for {}", lemma.name()))
}

fn check(lemma: Lemma, what: String, lhs: f64, rhs: f64) -> BoundCheck {
    // counts are exact; the slack only absorbs rounding in the right side
    let pass = lhs <= rhs * (1.0 + 1e-12);
    BoundCheck { lemma: format!("{} {what}", lemma.name()), lhs, rhs, pass }
}

/// Evaluates one inequality on every applicable scale.
pub fn check_bounds(input: &BoundInput, lemma: Lemma) -> Result<Vec<BoundCheck>> {
    let n = input.n as i32;
    let mut out = Vec::new();
    match lemma {
        Lemma::Lambda1Bound => {
            let l1 = input.analytic.lambda1.ok_or_else(|| missing("lambda1", lemma))?;
            let gamma = input.analytic.gamma.ok_or_else(|| missing("gamma", lemma))?;
            for c in &input.counts {
                let d = rational::to_f64(&c.scale);
                let rhs = (gamma * (1.0 + 2.0 * d / l1)).powi(n);
                out.push(check(lemma, format!("d={}", rational::fmt_q(&c.scale)), c.max_count as f64, rhs));
            }
        }
        Lemma::SmoothScaling => {
            let base =
                input.counts.iter().find(|c| c.scale == q(1)).ok_or_else(|| missing("a count at scale 1", lemma))?;
            for c in input.counts.iter().filter(|c| c.scale != q(1)) {
                let t = rational::to_f64(&c.scale);
                let rhs = (4.0 * t + 2.0).powi(n) * base.max_count as f64;
                out.push(check(lemma, format!("t={}", rational::fmt_q(&c.scale)), c.max_count as f64, rhs));
            }
        }
        Lemma::PointsVolume => {
            let vol = input.analytic.volume.ok_or_else(|| missing("volume", lemma))?;
            let mu = input.analytic.covering_radius.ok_or_else(|| missing("covering radius", lemma))?;
            for c in &input.counts {
                let s = rational::to_f64(&c.scale);
                let ratio = vol * s.powi(n) / input.det;
                let scale = rational::fmt_q(&c.scale);
                out.push(check(lemma, format!("lower s={scale}"), ratio, c.max_count as f64));
                let rhs = (mu / s).powi(n).max(1.0) * 2f64.powi(n) * ratio;
                out.push(check(lemma, format!("upper s={scale}"), c.max_count as f64, rhs));
            }
        }
    }
    Ok(out)
}

/// A reference result frozen as a golden file.
#[derive(Clone, Debug, Serialize)]
pub struct Fixture {
    pub name: String,
    pub command: String,
    pub instance: Value,
    pub result: Value,
}

impl Fixture {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixtures serialize");
        s.push('\n');
        s
    }
}

fn lp(n: usize, p: &str) -> BodySpec {
    BodySpec::lp(n, p, q(1))
}

fn disk(r: Q) -> BodySpec {
    let a = Q::from_integer(1.into()) / (&r * &r);
    BodySpec::Ellipsoid {
        shape: vec![vec![a.clone(), Q::zero()], vec![Q::zero(), a]],
        center: vec![qr(1, 2), qr(1, 2)],
    }
}

fn instance_value(inst: &Instance) -> Value {
    serde_json::from_str(&inst.to_json()).expect("instances serialize")
}

fn enum_fixture(name: &str, inst: Instance, budget: BruteForceBudget) -> Result<Fixture> {
    let body = inst.body()?;
    let x = inst.target.clone().unwrap_or_else(|| vec![Q::zero(); inst.lattice.dim()]);
    let pts = brute_enum(&inst.lattice, &body, &x, inst.distance()?, budget)?;
    Ok(Fixture {
        name: name.into(),
        command: "enum".into(),
        instance: instance_value(&inst),
        result: json!({ "count": pts.len(), "points": pts }),
    })
}

fn svp_fixture(name: &str, inst: Instance, budget: BruteForceBudget) -> Result<Fixture> {
    let opt = brute_svp(&inst.lattice, &inst.body()?, budget)?;
    Ok(Fixture {
        name: name.into(),
        command: "svp".into(),
        instance: instance_value(&inst),
        result: serde_json::to_value(&opt).expect("serializes"),
    })
}

fn cvp_fixture(name: &str, inst: Instance, budget: BruteForceBudget) -> Result<Fixture> {
    let opt = brute_cvp(&inst.lattice, &inst.body()?, inst.target()?, budget)?;
    Ok(Fixture {
        name: name.into(),
        command: "cvp".into(),
        instance: instance_value(&inst),
        result: serde_json::to_value(&opt).expect("serializes"),
    })
}

fn ip_fixture(name: &str, inst: Instance, budget: BruteForceBudget) -> Result<Fixture> {
    let found = brute_ip(&inst.lattice, &inst.body()?, budget)?;
    Ok(Fixture {
        name: name.into(),
        command: "ip".into(),
        instance: instance_value(&inst),
        result: json!({ "feasible": found.is_some(), "first_point": found }),
    })
}

/// The reference corpus, generated deterministically.
pub fn golden_fixtures() -> Result<Vec<Fixture>> {
    let b = BruteForceBudget::default();
    let z = LatticeBasis::identity;
    let with = |l: LatticeBasis, body: BodySpec, target: Option<QVec>, d: Option<Q>| Instance {
        target,
        distance: d,
        ..Instance::new(l, body)
    };
    let hex_gram = BodySpec::Ellipsoid { shape: vec![vec![q(1), qr(1, 2)], vec![qr(1, 2), q(1)]], center: Vec::new() };
    Ok(vec![
        enum_fixture("enum_z2_l2_d1", with(z(2), lp(2, "2"), None, Some(q(1))), b)?,
        enum_fixture("enum_z2_l1_d2", with(z(2), lp(2, "1"), None, Some(q(2))), b)?,
        enum_fixture("enum_z3_linf_d1", with(z(3), lp(3, "inf"), None, Some(q(1))), b)?,
        svp_fixture("svp_z2_l2", with(z(2), lp(2, "2"), None, None), b)?,
        svp_fixture("svp_z2_l1", with(z(2), lp(2, "1"), None, None), b)?,
        svp_fixture("svp_hexagonal_gram", with(z(2), hex_gram, None, None), b)?,
        cvp_fixture("cvp_z2_deep_hole", with(z(2), lp(2, "2"), Some(vec![qr(1, 2), qr(1, 2)]), None), b)?,
        ip_fixture("ip_disk_r2_5", with(z(2), disk(qr(2, 5)), None, None), b)?,
        ip_fixture("ip_disk_r3_4", with(z(2), disk(qr(3, 4)), None, None), b)?,
        ip_fixture("ip_disk_r0_70", with(z(2), disk(qr(70, 100)), None, None), b)?,
        ip_fixture("ip_disk_r0_71", with(z(2), disk(qr(71, 100)), None, None), b)?,
        enum_fixture(
            "enum_shifted_l1_z3",
            with(z(3), lp(3, "1"), Some(vec![qr(1, 5), q(0), qr(-1, 3)]), Some(qr(3, 2))),
            b,
        )?,
        svp_fixture(
            "svp_skew_linf",
            with(LatticeBasis::from_int_columns(&[&[2, 1], &[1, 3]])?, lp(2, "inf"), None, None),
            b,
        )?,
    ])
}

/// Writes every fixture to `dir/<name>.json` and returns the paths.
pub fn write_fixtures(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    golden_fixtures()?
        .into_iter()
        .map(|f| {
            let path = dir.join(format!("{}.json", f.name));
            std::fs::write(&path, f.to_json()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
