//! Oracle-based convex optimization and sampling: the central-cut
//! ellipsoid method for affine-max objectives, shallow-cut rounding,
//! hit-and-run sampling of exponentially tilted uniform densities and
//! moment estimation.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::body::{ConvexBody, Separation};
use crate::ellipsoid::unit_ball_volume;
use crate::error::{Error, Result};
use crate::rational::{self, from_f64, to_f64, Q};

/// `f(x) = max_i ⟨a_i, x⟩ + c_i`.
#[derive(Clone, Debug)]
pub struct AffineMax {
    pieces: Vec<(Vec<f64>, f64)>,
}

impl AffineMax {
    pub fn new(pieces: Vec<(Vec<f64>, f64)>) -> Self {
        assert!(!pieces.is_empty());
        AffineMax { pieces }
    }

    pub fn linear(a: Vec<f64>) -> Self {
        AffineMax { pieces: vec![(a, 0.0)] }
    }

    /// Value and the gradient of an active piece.
    pub fn eval(&self, x: &[f64]) -> (f64, &[f64]) {
        let mut best = f64::NEG_INFINITY;
        let mut grad: &[f64] = &self.pieces[0].0;
        for (a, c) in &self.pieces {
            let v = a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + c;
            if v > best {
                best = v;
                grad = a;
            }
        }
        (best, grad)
    }

    fn single(&self) -> Option<(&[f64], f64)> {
        match self.pieces.as_slice() {
            [(a, c)] => Some((a, *c)),
            _ => None,
        }
    }
}

/// Outcome of [`weak_optimize_linear`].
#[derive(Clone, Debug)]
pub struct Optimum {
    /// `ω` with `|ω − inf_K f| ≤ ε`.
    pub value: f64,
    /// Certified lower bound on `inf_K f`.
    pub lower: f64,
    /// A point of `K` (up to oracle slack) with `f(x̂) ≤ ω + ε`.
    pub witness: Vec<f64>,
    pub iterations: usize,
}

impl Optimum {
    pub fn omega(&self) -> Q {
        from_f64(self.value)
    }
}

/// Starting ellipsoid `{x : (x−c)ᵗP⁻¹(x−c) ≤ 1}` for the ellipsoid method.
#[derive(Clone, Debug)]
pub struct FloatEllipsoid {
    pub p: DMatrix<f64>,
    pub c: DVector<f64>,
}

impl FloatEllipsoid {
    pub fn ball(center: &[f64], radius: f64) -> Self {
        let n = center.len();
        FloatEllipsoid { p: DMatrix::identity(n, n) * (radius * radius), c: DVector::from_column_slice(center) }
    }

    /// Circumscribed ball from the body's centering certificate.
    pub fn around(body: &dyn ConvexBody) -> Self {
        let c = body.centering();
        let r = to_f64(&c.outer) * (1.0 + 1e-9) + 1e-12;
        Self::ball(&rational::vec_to_f64(&c.center), r)
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.p.determinant().max(0.0).sqrt()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let d = DVector::from_column_slice(x) - &self.c;
        match self.p.clone().cholesky() {
            Some(ch) => d.dot(&ch.solve(&d)) <= 1.0 + tol,
            None => false,
        }
    }

    /// `max_{y ∈ E} ⟨g, y − c⟩ = sqrt(gᵗPg)`.
    fn half_width(&self, g: &DVector<f64>) -> f64 {
        g.dot(&(&self.p * g)).max(0.0).sqrt()
    }

    /// Cut keeping `{y : ⟨g, y − c⟩ ≤ −α·sqrt(gᵗPg)}`, `α ∈ (−1/n, 1)`.
    fn cut(&mut self, g: &DVector<f64>, alpha: f64) {
        let n = self.dim() as f64;
        let s = self.half_width(g);
        if s == 0.0 {
            return;
        }
        let b = (&self.p * g) / s;
        if self.dim() == 1 {
            // interval [c − a, c + a] cut at c − α a
            let a = self.p[(0, 0)].sqrt();
            let dir = b[0].signum();
            let lo = self.c[0] - a;
            let hi = self.c[0] + a;
            let cut_at = self.c[0] - alpha * a * dir;
            let (nlo, nhi) = if dir > 0.0 { (lo, cut_at) } else { (cut_at, hi) };
            self.c[0] = (nlo + nhi) / 2.0;
            let half = ((nhi - nlo) / 2.0).max(0.0);
            self.p[(0, 0)] = half * half;
            return;
        }
        self.c -= &b * ((1.0 + n * alpha) / (n + 1.0));
        let f = n * n / (n * n - 1.0) * (1.0 - alpha * alpha);
        let k = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        self.p = (&self.p - &b * b.transpose() * k) * f;
        self.p = (&self.p + self.p.transpose()) * 0.5;
    }
}

fn iteration_budget(n: usize, ratio: f64) -> usize {
    let nf = n as f64;
    (50.0 * nf * nf * ratio.max(std::f64::consts::E).ln()) as usize + 1000
}

/// Termination request from the caller of [`minimize`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stop {
    Continue,
    Halt,
}

/// Central-cut ellipsoid method on `min_K f` with an optional early-exit
/// rule that sees `(best value, certified lower bound)`.
pub fn minimize(
    body: &dyn ConvexBody,
    f: &AffineMax,
    eps: f64,
    start: Option<FloatEllipsoid>,
    mut stop: impl FnMut(f64, f64) -> Stop,
) -> Result<Optimum> {
    let n = body.dim();
    let mut e = start.unwrap_or_else(|| FloatEllipsoid::around(body));
    let c = body.centering();
    let r_in = to_f64(&c.inner);
    let r_eff = if r_in > 0.0 { r_in.min(eps) } else { eps };
    let budget = iteration_budget(n, to_f64(&c.outer).max(1.0) / (r_eff * eps.min(1.0)).max(1e-300));
    let mut best = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut witness: Option<Vec<f64>> = None;
    for it in 0..budget {
        let x: Vec<f64> = e.c.iter().copied().collect();
        match body.separate(&x) {
            Separation::Empty => return Err(Error::InvalidBody("body is empty".into())),
            Separation::Cut(g) => {
                let g = DVector::from_vec(g);
                if e.half_width(&g) == 0.0 {
                    return Err(Error::IterationBudgetExceeded(it));
                }
                e.cut(&g, 0.0);
            }
            Separation::Inside => {
                let (v, grad) = f.eval(&x);
                let g = DVector::from_column_slice(grad);
                if v < best {
                    best = v;
                    witness = Some(x);
                }
                let hw = e.half_width(&g);
                lower = lower.max(v - hw);
                if best - lower <= eps || stop(best, lower) == Stop::Halt {
                    return Ok(Optimum { value: best, lower, witness: witness.unwrap(), iterations: it + 1 });
                }
                if hw == 0.0 {
                    return Ok(Optimum { value: best, lower: best, witness: witness.unwrap(), iterations: it + 1 });
                }
                e.cut(&g, 0.0);
            }
        }
    }
    Err(Error::IterationBudgetExceeded(budget))
}

/// `ω` with `|ω − inf_K f| ≤ ε` for an affine-max objective.
pub fn weak_optimize_linear(body: &dyn ConvexBody, f: &AffineMax, eps: f64) -> Result<Optimum> {
    if let Some((a, c)) = f.single() {
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        if let Some((h, x)) = body.support(&neg) {
            return Ok(Optimum { value: c - h, lower: c - h, witness: x, iterations: 0 });
        }
    }
    minimize(body, f, eps, None, |_, _| Stop::Continue)
}

/// `h_K(u) = sup_K ⟨u, x⟩` within `eps`, by closed form or optimization.
pub fn support_value(body: &dyn ConvexBody, u: &[f64], eps: f64) -> Result<f64> {
    if let Some((h, _)) = body.support(u) {
        return Ok(h);
    }
    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
    let opt = minimize(body, &AffineMax::linear(neg), eps, None, |_, _| Stop::Continue)?;
    Ok(-opt.value)
}

/// Result of [`gls_round`]; both ellipsoids are `t + E` with
/// `E = {x : xᵗQ⁻¹x ≤ 1}` held in `ellipsoid.p`.
#[derive(Clone, Debug)]
pub enum Rounding {
    /// `K ⊆ t + E` and `vol(E) ≤ ε`.
    SmallVolume(FloatEllipsoid),
    /// `t + E/((n+1)√n) ⊆ K ⊆ t + E`.
    Sandwich(FloatEllipsoid),
    /// The separation oracle reported an empty body.
    Empty,
}

/// Shallow-cut ellipsoid method: either certifies a small enclosing volume
/// or a sandwiching ellipsoid with ratio `(n+1)√n`.
pub fn gls_round(body: &dyn ConvexBody, eps: f64) -> Result<Rounding> {
    let n = body.dim();
    let nf = n as f64;
    let mut e = FloatEllipsoid::around(body);
    let outer = to_f64(&body.centering().outer).max(1e-300);
    let budget = (20.0 * nf * nf * (outer * nf / eps).max(std::f64::consts::E).ln()).ceil() as usize + 100;
    for _ in 0..budget {
        if e.volume() <= eps {
            return Ok(Rounding::SmallVolume(e));
        }
        let t: Vec<f64> = e.c.iter().copied().collect();
        match body.separate(&t) {
            Separation::Empty => return Ok(Rounding::Empty),
            Separation::Cut(g) => {
                e.cut(&DVector::from_vec(g), 0.0);
                continue;
            }
            Separation::Inside => {}
        }
        let eig = e.p.clone().symmetric_eigen();
        let mut cut: Option<(DVector<f64>, f64)> = None;
        'probe: for i in 0..n {
            let axis = eig.eigenvectors.column(i) * eig.eigenvalues[i].max(0.0).sqrt() / (nf + 1.0);
            for sign in [1.0, -1.0] {
                let z = &e.c + &axis * sign;
                let zs: Vec<f64> = z.iter().copied().collect();
                match body.separate(&zs) {
                    Separation::Inside => {}
                    Separation::Empty => return Ok(Rounding::Empty),
                    Separation::Cut(g) => {
                        let g = DVector::from_vec(g);
                        let s = e.half_width(&g);
                        if s == 0.0 {
                            continue;
                        }
                        let beta = g.dot(&(&z - &e.c)) / s;
                        cut = Some((g, -beta));
                        break 'probe;
                    }
                }
            }
        }
        match cut {
            None => return Ok(Rounding::Sandwich(e)),
            Some((g, alpha)) => {
                let lim = 1.0 / (nf + 1.0);
                e.cut(&g, alpha.clamp(-lim, 1.0 - 1e-12));
            }
        }
    }
    Err(Error::IterationBudgetExceeded(budget))
}

/// Seeded ChaCha stream: identical seeds give bit-identical samples.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { seed, rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// Independent child stream.
    pub fn fork(&mut self) -> RngState {
        RngState::new(self.rng.gen())
    }
}

/// Density proportional to `e^{⟨s, x⟩}` on `K`.
#[derive(Clone, Copy)]
pub struct LogconcaveDensity<'a> {
    pub body: &'a dyn ConvexBody,
    pub tilt: Option<&'a [f64]>,
}

impl<'a> LogconcaveDensity<'a> {
    pub fn uniform(body: &'a dyn ConvexBody) -> Self {
        LogconcaveDensity { body, tilt: None }
    }

    pub fn tilted(body: &'a dyn ConvexBody, s: &'a [f64]) -> Self {
        LogconcaveDensity { body, tilt: Some(s) }
    }

    /// Whether `sup_K f ≤ e^{2n} f(0)`, i.e. `h_K(s) ≤ 2n`.
    pub fn is_bounded_tilt(&self) -> Result<bool> {
        let Some(s) = self.tilt else { return Ok(true) };
        let n = self.body.dim() as f64;
        Ok(support_value(self.body, s, 0.1)? <= 2.0 * n + 0.1)
    }
}

/// Hit-and-run schedule.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub thinning: usize,
}

impl SamplerConfig {
    /// `burn-in = 1000·n²`, `thinning = 10·n`.
    pub fn default_for(n: usize) -> Self {
        SamplerConfig { burn_in: 1000 * n * n, thinning: 10 * n }
    }
}

/// Largest `t ∈ [0, hi]` with `x + t u` accepted by the membership oracle,
/// by bisection to relative width `1e-9`.
fn chord_end(body: &dyn ConvexBody, x: &[f64], u: &[f64], hi: f64, slack: f64) -> Result<f64> {
    let at = |t: f64| -> Vec<f64> { x.iter().zip(u).map(|(a, b)| a + t * b).collect() };
    if body.contains(&at(hi), slack) {
        return Err(Error::LineSearchFailure);
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    let width = hi * 1e-9;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if body.contains(&at(mid), slack) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Draws `t` on `[a, b]` with density `∝ e^{σt}` by inverse CDF.
fn exp_on_interval(rng: &mut RngState, a: f64, b: f64, sigma: f64) -> f64 {
    let len = b - a;
    let u = rng.uniform();
    if len <= 0.0 {
        return a;
    }
    if (sigma * len).abs() < 1e-12 {
        return a + u * len;
    }
    if sigma < 0.0 {
        a + (u * (sigma * len).exp_m1()).ln_1p() / sigma
    } else {
        b - (u * (-sigma * len).exp_m1()).ln_1p() / (-sigma)
    }
}

/// Hit-and-run chain started at `start` (inside `K`).
pub fn hit_and_run(
    density: &LogconcaveDensity<'_>,
    rng: &mut RngState,
    start: &[f64],
    config: &SamplerConfig,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    let body = density.body;
    let n = body.dim();
    let c = body.centering();
    let r_in = to_f64(&c.inner);
    let slack = if r_in > 0.0 { r_in * 1e-6 } else { 0.0 };
    let center = rational::vec_to_f64(&c.center);
    let outer = to_f64(&c.outer);
    if !body.contains(start, slack) {
        return Err(Error::LineSearchFailure);
    }
    let mut x = start.to_vec();
    let mut out = Vec::with_capacity(count);
    let total = config.burn_in + count * config.thinning.max(1);
    for step in 0..total {
        let u = rng.unit_vector(n);
        let dist = x.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let hi = 2.0 * (outer + dist) + 1e-9;
        let tp = chord_end(body, &x, &u, hi, slack)?;
        let neg: Vec<f64> = u.iter().map(|v| -v).collect();
        let tm = -chord_end(body, &x, &neg, hi, slack)?;
        let sigma = density.tilt.map_or(0.0, |s| s.iter().zip(&u).map(|(a, b)| a * b).sum());
        let t = exp_on_interval(rng, tm, tp, sigma);
        for (xi, ui) in x.iter_mut().zip(&u) {
            *xi += t * ui;
        }
        if step >= config.burn_in && (step - config.burn_in + 1) % config.thinning.max(1) == 0 {
            out.push(x.clone());
        }
    }
    Ok(out)
}

/// Empirical mean and covariance.
#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub relative_error: f64,
    pub samples: usize,
}

/// Sample count `N = ceil(C·n²/ε²)`.
pub fn moment_sample_count(n: usize, eps: f64, c: f64) -> usize {
    (c * (n * n) as f64 / (eps * eps)).ceil() as usize
}

pub fn mean_and_covariance(points: &[Vec<f64>]) -> (DVector<f64>, DMatrix<f64>) {
    let n = points[0].len();
    let m = points.len() as f64;
    let mut mean = DVector::zeros(n);
    for p in points {
        mean += DVector::from_column_slice(p);
    }
    mean /= m;
    let mut cov = DMatrix::zeros(n, n);
    for p in points {
        let d = DVector::from_column_slice(p) - &mean;
        cov += &d * d.transpose();
    }
    cov /= m;
    (mean, cov)
}

/// Mean and covariance of the density from `N(ε)` hit-and-run samples.
pub fn estimate_moments(
    density: &LogconcaveDensity<'_>,
    rng: &mut RngState,
    eps: f64,
    c: f64,
    config: &SamplerConfig,
) -> Result<MomentEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument("relative accuracy must lie in (0, 1)".into()));
    }
    let n = density.body.dim();
    let count = moment_sample_count(n, eps, c);
    let start = rational::vec_to_f64(&density.body.centering().center);
    let pts = hit_and_run(density, rng, &start, config, count)?;
    let (mean, covariance) = mean_and_covariance(&pts);
    if covariance.clone().cholesky().is_none() {
        return Err(Error::DegenerateCovariance);
    }
    Ok(MomentEstimate { mean, covariance, relative_error: eps, samples: count })
}
