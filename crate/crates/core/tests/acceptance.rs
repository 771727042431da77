//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mlat::body::{ConcreteBody, ConvexBody, LpIndex, Polytope};
use mlat::convex::{LogconcaveDensity, RngState, SamplerConfig};
use mlat::ellipsoid::{unit_ball_volume, Ellipsoid};
use mlat::ip::{ip_feasible, FlatnessConfig, IpStatus};
use mlat::lattice::{lll_reduce, LatticeBasis};
use mlat::linalg;
use mlat::mell::{
    build_cover, estimate_inertial_ellipsoid, lp_m_ellipsoid, m_ellipsoid, CoverBudget, CoverOutcome, MellConfig,
};
use mlat::norm::ExactNorm;
use mlat::oracle::{brute_enum, brute_ip, brute_svp, check_bounds, AnalyticData, BoundInput, BruteForceBudget, Lemma};
use mlat::rational::{self, q, qr, QVec, Q};
use mlat::solvers::{closest_vectors, shortest_vectors, EnumCovering, LatticeEnumerator};
use mlat::voronoi::{ellipsoid_enum, fincke_pohst_enum, relevant_vectors, EnumCap, InnerProduct, LatticePoint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn budget() -> BruteForceBudget {
    BruteForceBudget::default()
}

fn points(v: &[LatticePoint]) -> Vec<QVec> {
    let mut p: Vec<QVec> = v.iter().map(|x| x.point.clone()).collect();
    p.sort();
    p
}

fn gauge(body: &dyn ConvexBody, v: &[Q]) -> ExactNorm {
    body.exact_gauge(v).expect("corpus bodies have exact gauges")
}

fn lp(n: usize, p: &str) -> ConcreteBody {
    ConcreteBody::lp(n, LpIndex::parse(p).unwrap(), q(1)).unwrap()
}

fn random_basis(n: usize, rng: &mut ChaCha8Rng) -> LatticeBasis {
    loop {
        let cols: Vec<QVec> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-5..=5))).collect()).collect();
        if let Ok(b) = LatticeBasis::new(cols) {
            let b = lll_reduce(&b);
            // keep the brute-force boxes small
            if b.det().to_f64() <= 60.0 {
                return b;
            }
        }
    }
}

fn random_symmetric_polytope(n: usize, rng: &mut ChaCha8Rng) -> ConcreteBody {
    loop {
        let m = if n == 2 { 3 } else { n + rng.gen_range(1..=2) };
        let normals: Vec<QVec> = (0..m).map(|_| (0..n).map(|_| qr(rng.gen_range(-3..=3), 2)).collect()).collect();
        if linalg::rank(&normals) < n {
            continue;
        }
        if let Ok(p) = Polytope::symmetric(&normals) {
            return ConcreteBody::Polytope(p);
        }
    }
}

/// One instance of the general-norm corpus.
struct Case {
    label: String,
    lattice: LatticeBasis,
    body: ConcreteBody,
    cover: EnumCovering,
    target: QVec,
    distance: Q,
    eps: Q,
}

fn random_point(lattice: &LatticeBasis, rng: &mut ChaCha8Rng) -> QVec {
    let c: QVec = (0..lattice.dim()).map(|_| qr(rng.gen_range(0..24), 24)).collect();
    linalg::mat_vec(&lattice.matrix(), &c)
}

fn corpus() -> &'static [Case] {
    static CORPUS: std::sync::OnceLock<Vec<Case>> = std::sync::OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut out = Vec::new();
        for i in 0..120 {
            let n = 2 + i % 3;
            let kind = (i / 3) % 4;
            let lattice = random_basis(n, &mut rng);
            let (name, body) = match kind {
                0 => ("l1", lp(n, "1")),
                1 => ("l2", lp(n, "2")),
                2 => ("linf", lp(n, "inf")),
                _ => ("sym-polytope", random_symmetric_polytope(n, &mut rng)),
            };
            let cover = EnumCovering::for_body(&body, Some(i as u64)).unwrap();
            let l1 = brute_svp(&lattice, &body, budget()).unwrap().value;
            let target = random_point(&lattice, &mut rng);
            let mut distance = l1.approx(&qr(1, 100)) * qr(rng.gen_range(4..=24), 8);
            while brute_enum(&lattice, &body, &target, &distance, budget()).map_or(true, |s| s.len() > 10_000) {
                distance /= q(2);
            }
            let eps = if i % 2 == 0 { qr(1, 10) } else { qr(1, 100) };
            out.push(Case { label: format!("#{i} n={n} {name}"), lattice, body, cover, target, distance, eps });
        }
        out
    })
}

fn enumerator(c: &Case) -> LatticeEnumerator<'_> {
    LatticeEnumerator::new(&c.body, &c.lattice, c.cover.clone(), EnumCap(1_000_000)).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cases = corpus();
    let mut failures = Vec::new();
    for c in cases {
        let s = points(&enumerator(c).enumerate(&c.target, &c.distance, &c.eps).unwrap());
        let inner = points(&brute_enum(&c.lattice, &c.body, &c.target, &c.distance, budget()).unwrap());
        let outer = points(&brute_enum(&c.lattice, &c.body, &c.target, &(&c.distance + &c.eps), budget()).unwrap());
        if !inner.iter().all(|y| s.binary_search(y).is_ok()) || !s.iter().all(|y| outer.binary_search(y).is_ok()) {
            failures.push(c.label.clone());
        }
    }
    let secs = start.elapsed();
    outcome(
        failures.is_empty() && secs < Duration::from_secs(120),
        format!(
            "{}/{} sandwiches hold, {:.1}s incl. corpus setup (limit 120s) {failures:?}",
            cases.len() - failures.len(),
            cases.len(),
            secs.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let cases = corpus();
    let mut failures = Vec::new();
    for c in cases {
        let r = shortest_vectors(&mut enumerator(c), &c.eps).unwrap();
        let truth = brute_svp(&c.lattice, &c.body, budget()).unwrap();
        let l1 = &truth.value;
        let s = points(&r.result);
        let complete = points(&truth.minimizers).iter().all(|y| s.binary_search(y).is_ok());
        let limit = l1.scaled(&(Q::one() + &c.eps));
        let tight = r.result.iter().all(|y| !rational::is_zero_vec(&y.point) && gauge(&c.body, &y.point) <= limit);
        let doubling = l1.scaled(&q(2)).cmp_q(&r.final_distance).is_ge();
        let last = l1.scaled(&q(3)).cmp_q(&r.last_radius).is_ge();
        if !(complete && tight && doubling && last) {
            failures.push(format!("{} complete={complete} tight={tight} d<=2l1={doubling} r<=3l1={last}", c.label));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{}/{} SVP instances exact, d <= 2 lambda1 and radius <= 3 lambda1 {failures:?}",
            cases.len() - failures.len(),
            cases.len()
        ),
    )
}

fn cvp_check(c: &Case, x: &[Q], en: &mut LatticeEnumerator<'_>) -> Result<Vec<QVec>, String> {
    let r = closest_vectors(en, x, &c.eps).map_err(|e| e.to_string())?;
    let truth = mlat::oracle::brute_cvp(&c.lattice, &c.body, x, budget()).map_err(|e| e.to_string())?;
    let s = points(&r.result);
    if !points(&truth.minimizers).iter().all(|y| s.binary_search(y).is_ok()) {
        return Err("missing minimizer".into());
    }
    let limit = truth.value.scaled(&(Q::one() + &c.eps));
    if !r.result.iter().all(|y| gauge(&c.body, &rational::sub(&y.point, x)) <= limit) {
        return Err("vector beyond (1+eps) d".into());
    }
    Ok(s)
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut checked = 0;
    for c in corpus() {
        let n = c.lattice.dim();
        let mut en = enumerator(c);
        let l1 = brute_svp(&c.lattice, &c.body, budget()).unwrap().value;
        let v = c.lattice.point(&(0..n).map(|_| rng.gen_range(-3..=3).into()).collect::<Vec<_>>());
        let hole = rational::add(&v, &linalg::mat_vec(&c.lattice.matrix(), &vec![qr(1, 2); n]));
        let dir: QVec = (0..n).map(|_| qr(rng.gen_range(-12..=12), 12)).collect();
        let near = if rational::is_zero_vec(&dir) {
            v.clone()
        } else {
            let s = l1.approx(&qr(1, 1000)) * qr(2, 5) / gauge(&c.body, &dir).approx_upper(&qr(1, 1000));
            rational::add(&v, &rational::scale(&dir, &s))
        };
        let w = c.lattice.point(&(0..n).map(|_| rng.gen_range(-2..=2).into()).collect::<Vec<_>>());
        for (kind, x) in [("half-integer", hole), ("near", near), ("lattice", v.clone())] {
            checked += 1;
            let base = match cvp_check(c, &x, &mut en) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("{} {kind}: {e}", c.label));
                    continue;
                }
            };
            let moved = rational::add(&x, &w);
            match cvp_check(c, &moved, &mut en) {
                Ok(s) => {
                    let mut shifted: Vec<QVec> = base.iter().map(|y| rational::add(y, &w)).collect();
                    shifted.sort();
                    if shifted != s {
                        failures.push(format!("{} {kind}: not translation equivariant", c.label));
                    }
                }
                Err(e) => failures.push(format!("{} {kind} shifted: {e}", c.label)),
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{}/{checked} targets exact and equivariant {failures:?}", checked - failures.len()),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut relevant_ok = true;
    for i in 0..200 {
        let n = 1 + i % 4;
        let lattice = random_basis(n, &mut rng);
        let shape = loop {
            let m: Vec<QVec> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
            if linalg::det(&m) != q(0) {
                let r = rng.gen_range(1..=4);
                break linalg::scale_mat(&linalg::mat_mul(&linalg::transpose(&m), &m), &qr(1, r * r));
            }
        };
        let e = Ellipsoid::centered(shape.clone()).unwrap();
        let ip = InnerProduct::new(shape).unwrap();
        let t = random_point(&lattice, &mut rng);
        let a = points(&ellipsoid_enum(&lattice, &e, &t, EnumCap(100_000)).unwrap());
        let b = points(&fincke_pohst_enum(&lattice, &ip, &t, &q(1), EnumCap(100_000)).unwrap());
        if a != b {
            failures.push(i);
        }
        let rel = relevant_vectors(&lattice, &ip).unwrap().relevant_vectors().len();
        relevant_ok &= rel <= 2 * ((1 << n) - 1);
    }
    let z2 =
        points(&relevant_vectors(&LatticeBasis::identity(2), &InnerProduct::euclidean(2)).unwrap().relevant_vectors());
    let z2_ok = z2
        == points(
            &[[1, 0], [-1, 0], [0, 1], [0, -1]].map(|v| LatticePoint { coeffs: vec![], point: rational::qvec(&v) }),
        );
    outcome(
        failures.is_empty() && relevant_ok && z2_ok,
        format!(
            "{}/200 set equalities, relevant bound {relevant_ok}, Z2 relevant = {{±e1, ±e2}} {z2_ok} {failures:?}",
            200 - failures.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = Vec::new();
    let mut checks = 0;
    for n in 1..=4usize {
        let mut lattices = vec![("Z", LatticeBasis::identity(n))];
        lattices.push(("random-a", random_basis(n, &mut rng)));
        lattices.push(("random-b", random_basis(n, &mut rng)));
        for (lname, lattice) in &lattices {
            for (kname, p) in [("cube", "inf"), ("ball", "2"), ("cross", "1")] {
                let body = lp(n, p);
                let l1 = brute_svp(lattice, &body, budget()).unwrap().value.to_f64();
                let nf = n as f64;
                let volume = match p {
                    "inf" => 2f64.powi(n as i32),
                    "2" => unit_ball_volume(n),
                    _ => 2f64.powi(n as i32) / (1..=n).product::<usize>() as f64,
                };
                // exact for Zⁿ, otherwise half the sum of the basis gauges
                let mu = if *lname == "Z" {
                    match p {
                        "inf" => 0.5,
                        "2" => nf.sqrt() / 2.0,
                        _ => nf / 2.0,
                    }
                } else {
                    lattice.columns().iter().map(|b| gauge(&body, b).to_f64()).sum::<f64>() / 2.0
                };
                let analytic = AnalyticData {
                    lambda1: Some(l1),
                    volume: Some(volume),
                    covering_radius: Some(mu),
                    gamma: Some(1.0),
                };
                let mut shifts = vec![vec![Q::zero(); n]];
                shifts.extend((0..20).map(|_| random_point(lattice, &mut rng)));
                let scales = [qr(1, 2), q(1), q(2), q(3)];
                let input = BoundInput::sample(lattice, &body, &scales, &shifts, analytic, budget()).unwrap();
                for lemma in [Lemma::Lambda1Bound, Lemma::SmoothScaling, Lemma::PointsVolume] {
                    for c in check_bounds(&input, lemma).unwrap() {
                        checks += 1;
                        if !c.pass {
                            violations.push(format!("n={n} {lname} {kname} {}: {} > {}", c.lemma, c.lhs, c.rhs));
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("{checks} inequality checks, {} violations {violations:?}", violations.len()),
    )
}

fn uniform_in(body: &str, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match body {
        "inf" => (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        "1" => {
            let e: Vec<f64> = (0..=n).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = e.iter().sum();
            (0..n).map(|i| if rng.gen() { e[i] / total } else { -e[i] / total }).collect()
        }
        _ => loop {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                return x;
            }
        },
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut notes = Vec::new();
    let mut pass = true;
    let mut cases: Vec<(String, &str, usize, Ellipsoid)> = (2..=4)
        .map(|n| {
            (
                format!("(Binf^{n}, sqrt({n}) B2^{n})"),
                "inf",
                n,
                Ellipsoid::centered(linalg::scale_mat(&linalg::identity(n), &qr(1, n as i64))).unwrap(),
            )
        })
        .collect();
    cases.push(("(B1^3, lp ellipsoid)".into(), "1", 3, lp_m_ellipsoid(3, &LpIndex::parse("1").unwrap()).unwrap()));
    cases.push(("(B2^2, B2^2)".into(), "2", 2, Ellipsoid::ball(2, &q(1))));
    for (label, p, n, e) in cases {
        let body = lp(n, p);
        let budget = CoverBudget::primal(n);
        let cover = match build_cover(&body, &e, &budget).unwrap() {
            CoverOutcome::Covering(c) => c,
            CoverOutcome::ExceedsBudget { tiles_found, .. } => {
                pass = false;
                notes.push(format!("{label}: exceeded budget with {tiles_found} tiles"));
                continue;
            }
        };
        let slack_ok = *cover.slack() <= qr(1, n as i64);
        let missed = (0..10_000).filter(|_| !cover.covers(&uniform_in(p, n, &mut rng))).count();
        let size_ok = (cover.len() as u64) <= budget.hard_cap;
        pass &= slack_ok && missed == 0 && size_ok;
        notes.push(format!("{label}: |T|={} <= {} , {missed} uncovered samples", cover.len(), budget.hard_cap));
    }
    let big = ConcreteBody::lp(2, LpIndex::parse("2").unwrap(), q(10)).unwrap();
    let forced = matches!(
        build_cover(&big, &Ellipsoid::ball(2, &q(1)), &CoverBudget::new(2, 1.0).unwrap()).unwrap(),
        CoverOutcome::ExceedsBudget { .. }
    );
    pass &= forced;
    notes.push(format!("(10 B2^2, B2^2, H=1) exceeds budget: {forced}"));
    let secs = start.elapsed();
    pass &= secs < Duration::from_secs(180);
    outcome(pass, format!("{} ; {:.1}s (limit 180s)", notes.join("; "), secs.as_secs_f64()))
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (label, n, p) in [("B2^4", 4, "2"), ("Binf^3", 3, "inf"), ("B1^3", 3, "1")] {
        let body = lp(n, p);
        let cfg = MellConfig::default_for(n);
        let ok = (0..10u64).filter(|&s| m_ellipsoid(&body, &mut RngState::new(s), &cfg).is_ok()).count();
        pass &= ok >= 7;
        notes.push(format!("{label} {ok}/10"));
    }
    let square = lp(2, "inf");
    let est = estimate_inertial_ellipsoid(
        &LogconcaveDensity::uniform(&square),
        &mut RngState::new(7),
        0.25,
        // N = c·n²/ε² = 10⁴
        10_000.0 * 0.25 * 0.25 / 4.0,
        &SamplerConfig::default_for(2),
    )
    .unwrap();
    let cov = &est.moments.covariance;
    let err = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (cov[(i, j)] - if i == j { 1.0 / 3.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    pass &= err <= 0.05;
    notes.push(format!("[-1,1]^2 covariance max error {err:.4} from {} samples", est.moments.samples));
    outcome(pass, notes.join("; "))
}

fn random_polytope(n: usize, rng: &mut ChaCha8Rng) -> Polytope {
    loop {
        let m = 2 * n + rng.gen_range(0..3);
        let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-12..=12)).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..m {
            let row: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=4)).collect();
            if row.iter().all(|&x| x == 0) {
                continue;
            }
            let dot: i64 = row.iter().zip(&c).map(|(x, y)| x * y).sum();
            let l1: i64 = row.iter().map(|x| x.abs()).sum();
            // centre c/4, offsets from slightly infeasible to roomy
            let s = rng.gen_range(-2..=10);
            a.push(row.iter().map(|&x| q(x)).collect::<QVec>());
            b.push(qr(4 * dot + s * l1, 16));
        }
        if let Ok(p) = Polytope::general(a, b) {
            if !p.vertices().is_empty() {
                return p;
            }
        }
    }
}

fn disk(r: Q) -> ConcreteBody {
    let a = Q::one() / (&r * &r);
    let e = Ellipsoid::new(vec![vec![a.clone(), q(0)], vec![q(0), a]], vec![qr(1, 2), qr(1, 2)]).unwrap();
    ConcreteBody::ellipsoid(e).unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = FlatnessConfig::default();
    let mut notes = Vec::new();
    let mut disagreements = Vec::new();
    let mut max_nodes = 0;
    let mut run = |label: String, body: &ConcreteBody, lattice: &LatticeBasis| -> bool {
        // wide polytopes at n = 4 need a few million candidates
        let want = brute_ip(lattice, body, BruteForceBudget::new(50_000_000).unwrap()).unwrap().is_some();
        let got = ip_feasible(body, lattice, &cfg).unwrap();
        max_nodes = max_nodes.max(got.nodes);
        let witness_ok = got.point.as_ref().is_none_or(|p| body.contains_exact(p).unwrap() && lattice.contains(p));
        let agree = got.status != IpStatus::BudgetExceeded && (got.status == IpStatus::Feasible) == want && witness_ok;
        if !agree {
            disagreements.push(format!("{label}: brute {want}, solver {:?}", got.status));
        }
        want
    };
    for n in 2..=4 {
        let mut feasible = 0;
        for i in 0..50 {
            let body = ConcreteBody::Polytope(random_polytope(n, &mut rng));
            feasible += run(format!("n={n} #{i}"), &body, &LatticeBasis::identity(n)) as usize;
        }
        notes.push(format!("n={n}: {feasible}/50 feasible"));
    }
    for (r, label) in [(qr(70, 100), "0.70"), (qr(71, 100), "0.71"), (qr(2, 5), "2/5"), (qr(3, 4), "3/4")] {
        let f = run(format!("disk r={label}"), &disk(r), &LatticeBasis::identity(2));
        notes.push(format!("disk r={label} feasible={f}"));
    }
    outcome(
        disagreements.is_empty() && max_nodes <= cfg.max_nodes,
        format!("{}; max nodes {max_nodes} (cap {}) {disagreements:?}", notes.join(", "), cfg.max_nodes),
    )
}

fn criterion_9() -> Outcome {
    fn payloads() -> Vec<(&'static str, String)> {
        let json = |v: serde_json::Value| v.to_string();
        let z2 = LatticeBasis::identity(2);
        let l1 = lp(2, "1");
        let mut en =
            LatticeEnumerator::new(&l1, &z2, EnumCovering::for_body(&l1, None).unwrap(), EnumCap::default()).unwrap();
        let svp = serde_json::to_value(shortest_vectors(&mut en, &qr(1, 10)).unwrap()).unwrap();
        let cvp = serde_json::to_value(closest_vectors(&mut en, &[qr(1, 2), qr(1, 3)], &qr(1, 10)).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hex = random_symmetric_polytope(2, &mut rng);
        let basis = random_basis(2, &mut rng);
        let cover = EnumCovering::for_body(&hex, Some(17)).unwrap();
        let mut en = LatticeEnumerator::new(&hex, &basis, cover.clone(), EnumCap::default()).unwrap();
        let polytope_enum = serde_json::to_value(en.enumerate(&[qr(1, 3), q(0)], &q(2), &qr(1, 10)).unwrap()).unwrap();
        let mell =
            serde_json::to_value(m_ellipsoid(&lp(3, "1"), &mut RngState::new(5), &MellConfig::default_for(3)).unwrap())
                .unwrap();
        let cov = serde_json::to_value(
            build_cover(&l1, &lp_m_ellipsoid(2, &LpIndex::parse("1").unwrap()).unwrap(), &CoverBudget::primal(2))
                .unwrap(),
        )
        .unwrap();
        let ip =
            serde_json::to_value(ip_feasible(&disk(qr(71, 100)), &z2, &FlatnessConfig::default()).unwrap()).unwrap();
        let fixtures = serde_json::to_value(mlat::oracle::golden_fixtures().unwrap()).unwrap();
        vec![
            ("svp", json(svp)),
            ("cvp", json(cvp)),
            ("seeded polytope covering", json(serde_json::to_value(&cover).unwrap())),
            ("seeded polytope enum", json(polytope_enum)),
            ("seeded mell", json(mell)),
            ("cover", json(cov)),
            ("ip", json(ip)),
            ("oracle", json(fixtures)),
        ]
    }
    let a = payloads();
    let b = payloads();
    let differing: Vec<&str> = a.iter().zip(&b).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0).collect();
    outcome(differing.is_empty(), format!("{} payloads compared, differing: {differing:?}", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("lattice enumeration sandwich", criterion_1),
        ("SVP correctness", criterion_2),
        ("CVP correctness", criterion_3),
        ("l2 engine", criterion_4),
        ("counting bounds", criterion_5),
        ("covering validity", criterion_6),
        ("M-ellipsoid pipeline", criterion_7),
        ("integer feasibility", criterion_8),
        ("determinism", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|w| id.contains(w.as_str()) || name.contains(w.as_str())) {
            continue;
        }
        let t = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as usize;
        let line = format!("{id} {name}: {verdict} [{:.1}s] {}", t.elapsed().as_secs_f64(), o.detail);
        println!("{line}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
