use mlat::body::{ConcreteBody, ConvexBody, LpIndex};
use mlat::ellipsoid::Ellipsoid;
use mlat::instance::{BodySpec, Instance};
use mlat::ip::{ip_feasible, FlatnessConfig, IpStatus};
use mlat::lattice::{lll_reduce, LatticeBasis};
use mlat::linalg;
use mlat::mell::{build_cover, CoverBudget};
use mlat::norm::ExactNorm;
use mlat::oracle::{brute_cvp, brute_enum, brute_ip, BruteForceBudget};
use mlat::rational::{self, q, qr, QVec, Q};
use mlat::solvers::{lattice_enum, EnumCovering, EnumRequest};
use mlat::voronoi::{
    cvp_ellip, ellipsoid_enum, fincke_pohst_enum, relevant_vectors, EnumCap, InnerProduct, LatticePoint,
};
use proptest::prelude::*;

fn basis_strategy(n: usize) -> impl Strategy<Value = LatticeBasis> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, n), n)
        .prop_filter_map("singular", |cols| {
            let cols: Vec<QVec> = cols.iter().map(|c| rational::qvec(c)).collect();
            LatticeBasis::new(cols).ok()
        })
        .prop_map(|b| lll_reduce(&b))
}

fn point_strategy(n: usize) -> impl Strategy<Value = QVec> {
    prop::collection::vec((-40i64..=40, 1i64..=8), n).prop_map(|v| v.into_iter().map(|(a, b)| qr(a, b)).collect())
}

fn spd_strategy(n: usize) -> impl Strategy<Value = Vec<QVec>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n).prop_filter_map("singular", move |m| {
        let m: Vec<QVec> = m.iter().map(|r| rational::qvec(r)).collect();
        if linalg::det(&m) == q(0) {
            return None;
        }
        Some(linalg::mat_mul(&linalg::transpose(&m), &m))
    })
}

fn points(v: &[LatticePoint]) -> Vec<QVec> {
    let mut p: Vec<QVec> = v.iter().map(|x| x.point.clone()).collect();
    p.sort();
    p
}

fn lp(n: usize, p: &str) -> ConcreteBody {
    ConcreteBody::lp(n, LpIndex::parse(p).unwrap(), q(1)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn lll_preserves_the_lattice(cols in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 3)) {
        let cols: Vec<QVec> = cols.iter().map(|c| rational::qvec(c)).collect();
        prop_assume!(linalg::det(&cols) != q(0));
        let b = LatticeBasis::new(cols).unwrap();
        let r = lll_reduce(&b);
        prop_assert_eq!(r.det(), b.det());
        for c in r.columns() {
            prop_assert!(b.contains(c));
        }
        for c in b.columns() {
            prop_assert!(r.contains(c));
        }
    }

    #[test]
    fn exact_norms_order_like_floats(a in 1i64..10_000, b in 1i64..10_000, i in 1u32..=4, j in 1u32..=4) {
        let x = ExactNorm::root(qr(a, 100), i);
        let y = ExactNorm::root(qr(b, 100), j);
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 * fx.max(fy) {
            prop_assert_eq!(x < y, fx < fy);
        }
    }

    #[test]
    fn rationals_round_trip_through_strings(n in -1_000_000i64..1_000_000, d in 1i64..100_000) {
        let x = qr(n, d);
        prop_assert_eq!(rational::parse_q(&rational::fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn voronoi_enum_matches_fincke_pohst(b in basis_strategy(3), a in spd_strategy(3), t in point_strategy(3), r in 1i64..=6) {
        let e = Ellipsoid::centered(linalg::scale_mat(&a, &qr(1, r * r))).unwrap();
        let ip = InnerProduct::new(e.shape().clone()).unwrap();
        let cap = EnumCap(20_000);
        let fp = fincke_pohst_enum(&b, &ip, &t, &q(1), cap).unwrap();
        let vo = ellipsoid_enum(&b, &e, &t, cap).unwrap();
        prop_assert_eq!(points(&fp), points(&vo));
    }

    #[test]
    fn relevant_vectors_are_few_and_symmetric(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let b = loop {
            let cols: Vec<QVec> = (0..n)
                .map(|_| (0..n).map(|_| q(rand::Rng::gen_range(&mut rng, -5..=5))).collect())
                .collect();
            if let Ok(b) = LatticeBasis::new(cols) {
                break lll_reduce(&b);
            }
        };
        let rel = relevant_vectors(&b, &InnerProduct::euclidean(n)).unwrap().relevant_vectors();
        prop_assert!(rel.len() <= 2 * ((1usize << n) - 1));
        let pts = points(&rel);
        for p in &pts {
            prop_assert!(pts.contains(&rational::neg(p)));
        }
    }

    #[test]
    fn l2_cvp_is_translation_equivariant(b in basis_strategy(3), x in point_strategy(3), z in prop::collection::vec(-4i64..=4, 3)) {
        let ip = InnerProduct::euclidean(3);
        let v = b.point(&z.iter().map(|&c| c.into()).collect::<Vec<_>>());
        let (d0, s0) = cvp_ellip(&b, &ip, &x).unwrap();
        let (d1, s1) = cvp_ellip(&b, &ip, &rational::add(&x, &v)).unwrap();
        prop_assert_eq!(d0, d1);
        let shifted: Vec<QVec> = points(&s0).iter().map(|p| rational::add(p, &v)).collect();
        let mut shifted = shifted;
        shifted.sort();
        prop_assert_eq!(shifted, points(&s1));
    }

    #[test]
    fn brute_force_agrees_with_fincke_pohst(b in basis_strategy(2), a in spd_strategy(2), t in point_strategy(2)) {
        let e = Ellipsoid::centered(linalg::scale_mat(&a, &qr(1, 9))).unwrap();
        let body = ConcreteBody::ellipsoid(e.clone()).unwrap();
        let ip = InnerProduct::new(e.shape().clone()).unwrap();
        let fp = fincke_pohst_enum(&b, &ip, &t, &q(1), EnumCap(20_000)).unwrap();
        let bf = brute_enum(&b, &body, &t, &q(1), BruteForceBudget::default()).unwrap();
        prop_assert_eq!(points(&fp), points(&bf));
    }

    #[test]
    fn l2_cvp_matches_brute_force(b in basis_strategy(2), x in point_strategy(2)) {
        let (d2, s) = cvp_ellip(&b, &InnerProduct::euclidean(2), &x).unwrap();
        let bf = brute_cvp(&b, &lp(2, "2"), &x, BruteForceBudget::default()).unwrap();
        prop_assert_eq!(ExactNorm::sqrt(d2), bf.value);
        prop_assert_eq!(points(&s), points(&bf.minimizers));
    }

    #[test]
    fn instances_round_trip(b in basis_strategy(2), t in point_strategy(2), num in 1i64..50, den in 1i64..50) {
        let inst = Instance {
            target: Some(t),
            distance: Some(qr(num, den)),
            ..Instance::new(b, BodySpec::lp(2, "inf", qr(num, den)))
        };
        prop_assert_eq!(Instance::parse(&inst.to_json()).unwrap(), inst);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn general_norm_enum_is_sandwiched(b in basis_strategy(2), x in point_strategy(2), p in prop::sample::select(vec!["1", "inf", "2"]), d in 1i64..=8) {
        let body = lp(2, p);
        let d = qr(d, 2);
        let eps = qr(1, 10);
        let cover = EnumCovering::for_body(&body, Some(1)).unwrap();
        let req = EnumRequest { body: &body, lattice: &b, center: x.clone(), distance: d.clone(), epsilon: eps.clone() };
        let s = points(&lattice_enum(&req, cover, EnumCap(100_000)).unwrap());
        let budget = BruteForceBudget::default();
        let inner = points(&brute_enum(&b, &body, &x, &d, budget).unwrap());
        let outer = points(&brute_enum(&b, &body, &x, &(&d + &eps), budget).unwrap());
        for y in &inner {
            prop_assert!(s.contains(y));
        }
        for y in &s {
            prop_assert!(outer.contains(y));
        }
    }

    #[test]
    fn ip_agrees_with_brute_force_on_disks(cx in -20i64..=20, cy in -20i64..=20, r in 1i64..=20) {
        let r = qr(r, 20);
        let a = Q::from_integer(1.into()) / (&r * &r);
        let e = Ellipsoid::new(vec![vec![a.clone(), q(0)], vec![q(0), a]], vec![qr(cx, 8), qr(cy, 8)]).unwrap();
        let body = ConcreteBody::ellipsoid(e).unwrap();
        let z2 = LatticeBasis::identity(2);
        let want = brute_ip(&z2, &body, BruteForceBudget::default()).unwrap().is_some();
        let got = ip_feasible(&body, &z2, &FlatnessConfig::default()).unwrap();
        prop_assert_eq!(got.status == IpStatus::Feasible, want);
        if let Some(p) = got.point {
            prop_assert!(body.contains_exact(&p).unwrap());
        }
    }

    #[test]
    fn coverings_cover_sampled_points(seed in any::<u64>()) {
        let body = lp(2, "2");
        let cover = build_cover(&body, &Ellipsoid::ball(2, &q(1)), &CoverBudget::primal(2)).unwrap().covering().unwrap();
        let mut rng = mlat::convex::RngState::new(seed);
        for _ in 0..200 {
            let u = rng.unit_vector(2);
            let s = rng.uniform().sqrt();
            let y: Vec<f64> = u.iter().map(|c| c * s).collect();
            prop_assert!(cover.covers(&y));
        }
    }
}
