use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use mlat::body::{ConcreteBody, ConvexBody, LpIndex};
use mlat::convex::RngState;
use mlat::ellipsoid::Ellipsoid;
use mlat::error::{Error, Result};
use mlat::instance::Instance;
use mlat::ip::{ip_feasible, FBound, FlatnessConfig};
use mlat::linalg;
use mlat::mell::{build_cover, lp_m_ellipsoid, m_ellipsoid, CoverBudget, MellConfig};
use mlat::rational::{self, Q};
use mlat::solvers::{closest_vectors, lattice_enum, shortest_vectors, EnumCovering, EnumRequest, LatticeEnumerator};
use mlat::voronoi::{cvp_ellip, relevant_vectors, svp_ellip, EnumCap, InnerProduct};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Command, Common};

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorReport>,
    exit_code: i32,
    peak_points: usize,
    timings: BTreeMap<&'static str, f64>,
}

#[derive(Serialize)]
struct ErrorReport {
    class: &'static str,
    message: String,
}

/// Phase timer and point counter shared by the handlers.
#[derive(Default)]
struct Run {
    timings: BTreeMap<&'static str, f64>,
    peak_points: usize,
}

impl Run {
    fn phase<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let r = f();
        *self.timings.entry(name).or_default() += t.elapsed().as_secs_f64();
        r
    }

    fn points(&mut self, n: usize) {
        self.peak_points = self.peak_points.max(n);
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Svp(_) => "svp",
        Command::Cvp(_) => "cvp",
        Command::Enum(_) => "enum",
        Command::EnumEllipsoid(_) => "enum-ellipsoid",
        Command::SvpL2(_) => "svp-l2",
        Command::CvpL2(_) => "cvp-l2",
        Command::Mell(_) => "mell",
        Command::Cover { .. } => "cover",
        Command::Ip { .. } => "ip",
        Command::Oracle { .. } => "oracle",
    }
}

fn config(cmd: &Command) -> Value {
    let common = |c: &Common| serde_json::to_value(c).expect("config serializes");
    match cmd {
        Command::Svp(c)
        | Command::Cvp(c)
        | Command::Enum(c)
        | Command::EnumEllipsoid(c)
        | Command::SvpL2(c)
        | Command::CvpL2(c)
        | Command::Mell(c) => common(c),
        Command::Cover { common: c, h, ball_radius } => {
            let mut v = common(c);
            v["h"] = json!(h);
            v["ball_radius"] = json!(ball_radius);
            v
        }
        Command::Ip { common: c, fbound, max_nodes } => {
            let mut v = common(c);
            v["fbound"] = json!(fbound);
            v["max_nodes"] = json!(max_nodes);
            v
        }
        Command::Oracle { out } => json!({ "out": out }),
    }
}

fn out_path(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::Svp(c)
        | Command::Cvp(c)
        | Command::Enum(c)
        | Command::EnumEllipsoid(c)
        | Command::SvpL2(c)
        | Command::CvpL2(c)
        | Command::Mell(c)
        | Command::Cover { common: c, .. }
        | Command::Ip { common: c, .. } => c.out.clone(),
        Command::Oracle { .. } => None,
    }
}

/// Runs one command and returns the report text, where to write it, and
/// the exit code.
pub fn run(cmd: &Command) -> (String, Option<PathBuf>, i32) {
    let mut run = Run::default();
    let outcome = execute(cmd, &mut run);
    let (result, error, code) = match outcome {
        Ok(v) => (Some(v), None, 0),
        Err(e) => {
            eprintln!("mlat: {e}");
            let code = e.exit_code();
            (None, Some(ErrorReport { class: e.class(), message: e.to_string() }), code)
        }
    };
    let report = RunReport {
        command: name(cmd),
        config: config(cmd),
        result,
        error,
        exit_code: code,
        peak_points: run.peak_points,
        timings: run.timings,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    (text, out_path(cmd), code)
}

fn execute(cmd: &Command, run: &mut Run) -> Result<Value> {
    if let Command::Oracle { out } = cmd {
        let paths = run.phase("oracle", || mlat::oracle::write_fixtures(out))?;
        run.points(paths.len());
        let names: Vec<String> =
            paths.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect();
        return Ok(json!({ "fixtures": names }));
    }
    let common = match cmd {
        Command::Svp(c)
        | Command::Cvp(c)
        | Command::Enum(c)
        | Command::EnumEllipsoid(c)
        | Command::SvpL2(c)
        | Command::CvpL2(c)
        | Command::Mell(c)
        | Command::Cover { common: c, .. }
        | Command::Ip { common: c, .. } => c,
        Command::Oracle { .. } => unreachable!(),
    };
    if !common.parallel {
        // an already initialised pool is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(1).build_global();
    }
    let eps = rational::parse_q(&common.epsilon)?;
    let cap = match common.cap {
        Some(0) => return Err(Error::InvalidArgument("--cap must be positive".into())),
        Some(c) => EnumCap(c),
        None => EnumCap::default(),
    };
    let inst = run.phase("parse", || Instance::load(&common.instance))?;
    let body = inst.body()?;
    let lattice = &inst.lattice;
    let n = lattice.dim();
    let zero = vec![Q::from_integer(0.into()); n];
    match cmd {
        Command::Svp(_) | Command::Cvp(_) => {
            let cover = run.phase("covering", || EnumCovering::for_body(&body, common.seed))?;
            let translates = cover.len();
            let mut en = LatticeEnumerator::new(&body, lattice, cover, cap)?;
            let r = if matches!(cmd, Command::Svp(_)) {
                run.phase("solve", || shortest_vectors(&mut en, &eps))?
            } else {
                let x = inst.target()?.clone();
                run.phase("solve", || closest_vectors(&mut en, &x, &eps))?
            };
            run.points(r.points_scanned);
            Ok(json!({ "covering_translates": translates, "solve": r }))
        }
        Command::Enum(_) => {
            let cover = run.phase("covering", || EnumCovering::for_body(&body, common.seed))?;
            let req = EnumRequest {
                body: &body,
                lattice,
                center: inst.target.clone().unwrap_or(zero),
                distance: inst.distance()?.clone(),
                epsilon: eps,
            };
            let pts = run.phase("enumerate", || lattice_enum(&req, cover, cap))?;
            run.points(pts.len());
            Ok(json!({ "count": pts.len(), "points": pts }))
        }
        Command::EnumEllipsoid(_) => {
            let (ip, center) = quadratic_form(&body)?;
            let t = inst.target.clone().unwrap_or(zero);
            let t = rational::add(&t, &center);
            let vd = run.phase("voronoi", || relevant_vectors(lattice, &ip))?;
            let pts = run.phase("enumerate", || vd.enumerate(&t, &Q::from_integer(1.into()), cap))?;
            run.points(pts.len());
            Ok(json!({ "relevant_vectors": vd.relevant_vectors().len(), "count": pts.len(), "points": pts }))
        }
        Command::SvpL2(_) | Command::CvpL2(_) => {
            let (ip, center) = quadratic_form(&body)?;
            if !rational::is_zero_vec(&center) {
                return Err(Error::NonCentered);
            }
            let (d2, v) = if matches!(cmd, Command::SvpL2(_)) {
                run.phase("solve", || svp_ellip(lattice, &ip))?
            } else {
                let x = inst.target()?.clone();
                run.phase("solve", || cvp_ellip(lattice, &ip, &x))?
            };
            run.points(v.len());
            Ok(json!({ "distance_sq": rational::fmt_q(&d2), "vectors": v }))
        }
        Command::Mell(_) => {
            let seed = require_seed(common)?;
            let cfg = MellConfig::default_for(n);
            let r = run.phase("m_ellipsoid", || m_ellipsoid(&body, &mut RngState::new(seed), &cfg))?;
            run.points(r.covering.len().max(r.dual_covering.len()));
            Ok(json!({ "config": cfg, "m_ellipsoid": r }))
        }
        Command::Cover { h, ball_radius, .. } => {
            let e = match ball_radius {
                Some(r) => Ellipsoid::ball(n, &rational::parse_q(r)?),
                None => analytic_ellipsoid(&body)?,
            };
            let budget = CoverBudget::new(n, *h)?;
            let out = run.phase("cover", || build_cover(&body, &e, &budget))?;
            if let mlat::mell::CoverOutcome::Covering(c) = &out {
                run.points(c.len());
            }
            Ok(json!({ "ellipsoid": e, "budget": budget, "outcome": out }))
        }
        Command::Ip { fbound, max_nodes, .. } => {
            if *max_nodes == 0 {
                return Err(Error::InvalidArgument("--max-nodes must be positive".into()));
            }
            let cfg = FlatnessConfig { f_bound: FBound::parse(fbound)?, max_nodes: *max_nodes, cap };
            let r = run.phase("ip", || ip_feasible(&body, lattice, &cfg))?;
            run.points(r.nodes);
            Ok(json!({ "f_bound_value": cfg.f_bound.value(n), "ip": r }))
        }
        Command::Oracle { .. } => unreachable!(),
    }
}

fn require_seed(c: &Common) -> Result<u64> {
    c.seed.ok_or_else(|| Error::InvalidArgument("this command is randomized; pass --seed".into()))
}

/// `(A, c)` with `K = {x : (x − c)ᵗ A (x − c) ≤ 1}`.
fn quadratic_form(body: &ConcreteBody) -> Result<(InnerProduct, Vec<Q>)> {
    match body {
        ConcreteBody::Lp(b) if *b.p() == LpIndex::parse("2")? => {
            let s = b.scale();
            let a = linalg::scale_mat(&linalg::identity(body.dim()), &(Q::from_integer(1.into()) / (s * s)));
            Ok((InnerProduct::new(a)?, vec![Q::from_integer(0.into()); body.dim()]))
        }
        ConcreteBody::Ellipsoid(e) => {
            Ok((InnerProduct::new(e.ellipsoid().shape().clone())?, e.ellipsoid().center().clone()))
        }
        _ => Err(Error::InvalidBody(format!("{} is not an ellipsoid", body.kind()))),
    }
}

/// The closed-form covering ellipsoid of an ℓp ball or the body itself.
fn analytic_ellipsoid(body: &ConcreteBody) -> Result<Ellipsoid> {
    match body {
        ConcreteBody::Lp(b) => Ok(lp_m_ellipsoid(body.dim(), b.p())?.scaled(b.scale())),
        ConcreteBody::Ellipsoid(e) => Ellipsoid::centered(e.ellipsoid().shape().clone()),
        _ => Err(Error::InvalidArgument(format!(
            "no closed-form ellipsoid for a {}; pass --ball-radius or use `mell`",
            body.kind()
        ))),
    }
}
