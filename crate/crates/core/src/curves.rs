//! Polyline curves on T², max-norm length, curve iteration with adaptive
//! refinement, v-segments, crossing detection and the Z-property checks.

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::lattice::cone_norm_constants;
use crate::linalg::{norm_euclid, norm_max, Vec2};
use crate::map::{MapSpec, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Consecutive vertices must be closer than this in the max norm.
pub const MAX_SEGMENT: f64 = 0.25;
pub const DEFAULT_VERTEX_BUDGET: usize = 2_000_000;

/// A polyline on the torus stored through a lift in which consecutive
/// vertices are nearest representatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCurve {
    lift: Vec<Vec2>,
    refine_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub direction: CrossingDirection,
    pub extent: f64,
    pub crossed: bool,
}

impl TorusCurve {
    pub fn new(lift: Vec<Vec2>, refine_tol: f64) -> Result<Self> {
        if lift.len() < 2 {
            return Err(Error::InvalidInput("a curve needs at least two vertices".into()));
        }
        if !(refine_tol > 0.0) {
            return Err(Error::InvalidInput("refinement tolerance must be positive".into()));
        }
        for (i, w) in lift.windows(2).enumerate() {
            let step = norm_max([w[1][0] - w[0][0], w[1][1] - w[0][1]]);
            if !step.is_finite() || step >= MAX_SEGMENT {
                return Err(Error::InvalidInput(format!("segment {i} has max-norm length {step} >= {MAX_SEGMENT}")));
            }
        }
        Ok(TorusCurve { lift, refine_tol })
    }

    /// Unwraps torus points by choosing nearest representatives.
    pub fn from_torus_points(points: &[TorusPoint], refine_tol: f64) -> Result<Self> {
        let mut lift: Vec<Vec2> = Vec::with_capacity(points.len());
        for p in points {
            let v = match lift.last() {
                None => p.as_array(),
                Some(q) => [q[0] + nearest_offset(p.x - q[0]), q[1] + nearest_offset(p.y - q[1])],
            };
            lift.push(v);
        }
        TorusCurve::new(lift, refine_tol)
    }

    /// Straight segment from `a` to `b` in lift coordinates, subdivided.
    pub fn segment(a: Vec2, b: Vec2, refine_tol: f64) -> Result<Self> {
        let len = norm_max([b[0] - a[0], b[1] - a[1]]);
        let pieces = ((len / (0.8 * MAX_SEGMENT)).ceil() as usize).max(1);
        let lift = (0..=pieces)
            .map(|i| {
                let s = i as f64 / pieces as f64;
                [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
            })
            .collect();
        TorusCurve::new(lift, refine_tol)
    }

    pub fn lift(&self) -> &[Vec2] {
        &self.lift
    }

    pub fn refine_tol(&self) -> f64 {
        self.refine_tol
    }

    pub fn len(&self) -> usize {
        self.lift.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lift.is_empty()
    }

    pub fn vertices(&self) -> Vec<TorusPoint> {
        self.lift.iter().map(|v| TorusPoint::new(v[0], v[1])).collect()
    }

    fn segments(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.lift.windows(2).map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]])
    }

    pub fn length_max_norm(&self) -> f64 {
        self.segments().map(norm_max).sum()
    }

    pub fn length_euclid(&self) -> f64 {
        self.segments().map(norm_euclid).sum()
    }

    /// Extent of the lift along x (index 0) or y (index 1).
    pub fn extent(&self) -> [f64; 2] {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.lift {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        [hi[0] - lo[0], hi[1] - lo[1]]
    }

    pub fn crossing(&self, direction: CrossingDirection) -> CrossingReport {
        let e = self.extent();
        let extent = match direction {
            CrossingDirection::Horizontal => e[0],
            CrossingDirection::Vertical => e[1],
        };
        CrossingReport {
            direction,
            extent,
            crossed: extent > 1.0,
        }
    }

    /// Segment-wise tangency to the closed cone {|u₂| ≤ θ|u₁|}.
    pub fn tangent_to_horizontal(&self, theta: f64) -> bool {
        self.segments().all(|s| s[1].abs() <= theta * s[0].abs() * (1.0 + 1e-12))
    }

    /// Shifts the lift by an integer vector so the first vertex lies in [0,1)².
    fn recentered(mut self) -> Self {
        let shift = [self.lift[0][0].floor(), self.lift[0][1].floor()];
        for v in &mut self.lift {
            v[0] -= shift[0];
            v[1] -= shift[1];
        }
        self
    }
}

fn nearest_offset(d: f64) -> f64 {
    d - d.round()
}

pub fn length_max_norm(curve: &TorusCurve) -> f64 {
    curve.length_max_norm()
}

/// Straight v-segment through `base` in direction `dir` (closed vertical
/// cone of aperture α), of max-norm length ℓ = α/(5e_v).
pub fn v_segment(spec: &MapSpec, base: TorusPoint, dir: Vec2, alpha: f64) -> Result<TorusCurve> {
    if dir == [0.0, 0.0] {
        return Err(Error::InvalidInput("zero direction".into()));
    }
    if dir[1].abs() < alpha * dir[0].abs() * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!("direction {dir:?} is not in the vertical cone of aperture {alpha}")));
    }
    let consts = cone_norm_constants(spec.matrix(), alpha)?;
    let ell = alpha / (5.0 * consts.e_v);
    if ell <= 1.0 {
        return Err(Error::Precondition(format!(
            "v-segment length alpha/(5 e_v) = {ell} must exceed 1 (alpha = {alpha}, e_v = {})",
            consts.e_v
        )));
    }
    let m = norm_max(dir);
    let u = [dir[0] / m, dir[1] / m];
    let a = base.as_array();
    TorusCurve::segment(a, [a[0] + ell * u[0], a[1] + ell * u[1]], 1e-9)
}

/// Image of a curve with adaptive midpoint insertion; also returns, for each
/// image vertex, the lift point it is the image of.
pub fn iterate_curve_with_sources(spec: &MapSpec, curve: &TorusCurve, refine_tol: f64, budget: usize) -> Result<(TorusCurve, Vec<Vec2>)> {
    struct Ctx<'a> {
        spec: &'a MapSpec,
        tol: f64,
        budget: usize,
        out: Vec<Vec2>,
        src: Vec<Vec2>,
    }
    fn refine(c: &mut Ctx, p0: Vec2, p1: Vec2, f0: Vec2, f1: Vec2, depth: u32) -> Result<()> {
        let pm = [0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1])];
        let fm = c.spec.apply_lift(pm);
        let sag = norm_max([fm[0] - 0.5 * (f0[0] + f1[0]), fm[1] - 0.5 * (f0[1] + f1[1])]);
        let chord = norm_max([f1[0] - f0[0], f1[1] - f0[1]]);
        if depth >= 60 || (sag < c.tol && chord < MAX_SEGMENT) {
            if c.out.len() >= c.budget {
                return Err(Error::Budget {
                    required: c.out.len() as u64 + 1,
                    budget: c.budget as u64,
                });
            }
            c.out.push(f1);
            c.src.push(p1);
            return Ok(());
        }
        refine(c, p0, pm, f0, fm, depth + 1)?;
        refine(c, pm, p1, fm, f1, depth + 1)
    }
    let lift = curve.lift();
    let f_first = spec.apply_lift(lift[0]);
    let mut ctx = Ctx {
        spec,
        tol: refine_tol,
        budget,
        out: vec![f_first],
        src: vec![lift[0]],
    };
    let mut f_prev = f_first;
    for w in lift.windows(2) {
        let f1 = spec.apply_lift(w[1]);
        refine(&mut ctx, w[0], w[1], f_prev, f1, 0)?;
        f_prev = f1;
    }
    let image = TorusCurve::new(ctx.out, refine_tol)?.recentered();
    Ok((image, ctx.src))
}

pub fn iterate_curve(spec: &MapSpec, curve: &TorusCurve, refine_tol: f64) -> Result<TorusCurve> {
    iterate_curve_with_sources(spec, curve, refine_tol, DEFAULT_VERTEX_BUDGET).map(|r| r.0)
}

fn section3_windows(spec: &MapSpec) -> Result<(f64, f64, f64)> {
    if spec.profile().section3_params().is_none() {
        return Err(Error::Precondition("the check needs a section-3 family map".into()));
    }
    let t = spec.t();
    Ok((t.powf(-0.4), t.powf(-0.6), spec.profile().delta()))
}

/// Distance to the critical points exceeds δ/4 (the set 𝒢′).
fn in_g_prime(spec: &MapSpec, x: f64, delta: f64) -> bool {
    spec.profile().distance_to_critical_points(x) > 0.25 * delta
}

fn sample_g_prime(spec: &MapSpec, rng: &mut ChaCha8Rng, delta: f64) -> TorusPoint {
    loop {
        let x: f64 = rng.gen();
        if in_g_prime(spec, x, delta) {
            return TorusPoint::new(x, rng.gen());
        }
    }
}

/// Samples 𝒢′ and checks (Z1) the window geometry, (Z2) the cone mapping
/// Df(Δʰ_{4/θ₁}) ⊂ Δʰ_{θ₂}, (Z3) ‖Df u‖ ≥ t^(1/2) on Δʰ_{θ₂} and the curve
/// consequence ℓ_m(f(γ)) > 4 for `n_curves` polylines of length t^(−3/10).
pub fn z_properties_check(spec: &MapSpec, n_samples: usize, n_curves: usize, seed: u64) -> Result<Certificate> {
    let (theta1, theta2, delta) = section3_windows(spec)?;
    let t = spec.t();
    let r = t.powf(-7.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Z1: 𝒢 sits inside 𝒢′, with the gap between boundaries larger than r.
    let gap = delta - 0.25 * delta;
    let z1 = if gap > r {
        Certificate::proven("Z1")
    } else {
        Certificate::refuted("Z1", Witness::new("d(boundary G, boundary C_delta/2) > r", "window gap too small").values(gap, r))
    }
    .with_margin("boundary_distance", gap)
    .with_margin("r", r);

    let wide = 4.0 / theta1;
    let fractions = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut z2_worst = 0.0f64;
    let mut z2_witness = None;
    let mut z3_worst = f64::INFINITY;
    let mut z3_witness = None;
    let root_t = t.sqrt();
    for _ in 0..n_samples {
        let p = sample_g_prime(spec, &mut rng, delta);
        let j = spec.jacobian(p);
        let extra: f64 = rng.gen_range(-1.0..=1.0);
        for &f in fractions.iter().chain(std::iter::once(&extra)) {
            let u = [1.0, f * wide];
            let w = j.apply(u);
            let ratio = w[1].abs() / (theta2 * w[0].abs());
            if ratio > z2_worst {
                z2_worst = ratio;
                if ratio > 1.0 {
                    z2_witness = Some(
                        Witness::new("Df(x)(cone 4/theta1) in cone theta2", "image slope exceeds theta2")
                            .at(p.as_array())
                            .with_vector(u)
                            .values(w[1].abs() / w[0].abs(), theta2),
                    );
                }
            }
            let u = [1.0, f * theta2];
            let g = norm_max(j.apply(u));
            if g < z3_worst {
                z3_worst = g;
                if g < root_t {
                    z3_witness = Some(
                        Witness::new("|Df(x)u| >= t^(1/2) on cone theta2", "expansion too weak")
                            .at(p.as_array())
                            .with_vector(u)
                            .values(g, root_t),
                    );
                }
            }
        }
    }
    let z2 = match z2_witness {
        Some(w) => Certificate::refuted("Z2", w),
        None => Certificate::proven("Z2"),
    }
    .with_margin("worst_slope_over_theta2", z2_worst)
    .with_margin("theta2", theta2);
    let z3 = match z3_witness {
        Some(w) => Certificate::refuted("Z3", w),
        None => Certificate::proven("Z3"),
    }
    .with_margin("min_expansion_over_sqrt_t", z3_worst / root_t);

    let target = t.powf(-0.3);
    let mut curve_worst = f64::INFINITY;
    let mut curve_witness = None;
    let mut made = 0;
    while made < n_curves {
        let x0: f64 = rng.gen();
        let xs = [x0, x0 + 0.5 * target, x0 + target];
        if !xs.iter().all(|&x| in_g_prime(spec, x, delta)) || spec.profile().distance_to_critical_points(x0 + 0.5 * target) < target {
            continue;
        }
        let y0: f64 = rng.gen();
        let pieces = 8;
        let mut lift = vec![[x0, y0]];
        for _ in 0..pieces {
            let last = *lift.last().expect("non-empty");
            let dx = target / pieces as f64;
            lift.push([last[0] + dx, last[1] + rng.gen_range(-1.0..=1.0) * theta2 * dx]);
        }
        let curve = TorusCurve::new(lift, 1e-9)?;
        let image = iterate_curve(spec, &curve, 1e-6)?;
        let len = image.length_max_norm();
        if len < curve_worst {
            curve_worst = len;
            if len <= 4.0 {
                curve_witness = Some(Witness::new("l_m(f(gamma)) > 4", "image curve too short").at([x0, y0]).values(len, 4.0));
            }
        }
        made += 1;
    }
    let z3c = match curve_witness {
        Some(w) => Certificate::refuted("Z3_curves", w),
        None => Certificate::proven("Z3_curves"),
    }
    .with_margin("min_image_length", curve_worst);

    let mut cert = Certificate::aggregate("z_properties", vec![z1, z2, z3, z3c]);
    cert.margins.insert("theta1".into(), theta1);
    cert.margins.insert("theta2".into(), theta2);
    cert.margins.insert("delta".into(), delta);
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingRun {
    pub start: TorusPoint,
    pub first_crossing: Option<usize>,
    /// Max-norm length of the crossing image.
    pub crossing_length: Option<f64>,
    /// Smallest one-step growth factor among steps taken with the whole
    /// curve inside 𝒢′.
    pub min_growth_in_g_prime: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingExperiment {
    pub r: f64,
    pub max_steps: usize,
    pub runs: Vec<CrossingRun>,
    pub success_fraction: f64,
    /// histogram[n] counts runs whose first crossing happened at step n.
    pub histogram: Vec<u64>,
    pub min_growth_in_g_prime: f64,
}

/// Below this max-norm length the curve is carried as a tangent vector at
/// the orbit point; f64 cannot resolve shorter polylines on the torus.
pub const TANGENT_PHASE_LENGTH: f64 = 1e-6;

fn crossing_run(spec: &MapSpec, start: TorusPoint, r: f64, max_steps: usize, delta: f64, mut snapshots: Option<&mut Vec<TorusCurve>>) -> CrossingRun {
    let mut run = CrossingRun {
        start,
        first_crossing: None,
        crossing_length: None,
        min_growth_in_g_prime: None,
        error: None,
    };
    let note_growth = |g: f64, run: &mut CrossingRun| {
        run.min_growth_in_g_prime = Some(run.min_growth_in_g_prime.map_or(g, |m: f64| m.min(g)));
    };
    let mut p = start;
    let mut v: Vec2 = [1.0, 0.0];
    let mut ell = r;
    let mut curve: Option<TorusCurve> = None;
    for n in 1..=max_steps {
        match curve.take() {
            None => {
                let w = spec.jacobian(p).apply(v);
                let g = norm_max(w);
                if delta > 0.0 && in_g_prime(spec, p.x, delta) {
                    note_growth(g, &mut run);
                }
                ell *= g;
                v = [w[0] / g, w[1] / g];
                p = spec.apply(p);
                if ell >= TANGENT_PHASE_LENGTH {
                    let a = p.as_array();
                    let h = 0.5 * ell;
                    match TorusCurve::segment([a[0] - h * v[0], a[1] - h * v[1]], [a[0] + h * v[0], a[1] + h * v[1]], 1e-9) {
                        Ok(c) => {
                            if let Some(sink) = snapshots.as_deref_mut() {
                                sink.push(c.clone());
                            }
                            if c.crossing(CrossingDirection::Horizontal).crossed {
                                run.first_crossing = Some(n);
                                run.crossing_length = Some(c.length_max_norm());
                                return run;
                            }
                            curve = Some(c);
                        }
                        Err(e) => {
                            run.error = Some(e.to_string());
                            return run;
                        }
                    }
                }
            }
            Some(c) => {
                let before = c.length_max_norm();
                let inside = delta > 0.0 && c.lift().iter().all(|q| in_g_prime(spec, q[0], delta));
                let tol = (1e-3 * before).clamp(1e-12, 1e-4);
                match iterate_curve(spec, &c, tol) {
                    Ok(img) => {
                        let after = img.length_max_norm();
                        if inside {
                            note_growth(after / before, &mut run);
                        }
                        if let Some(sink) = snapshots.as_deref_mut() {
                            sink.push(img.clone());
                        }
                        if img.crossing(CrossingDirection::Horizontal).crossed {
                            run.first_crossing = Some(n);
                            run.crossing_length = Some(after);
                            return run;
                        }
                        curve = Some(img);
                    }
                    Err(e) => {
                        run.error = Some(e.to_string());
                        return run;
                    }
                }
            }
        }
    }
    run
}

fn section3_delta(spec: &MapSpec) -> f64 {
    if spec.profile().section3_params().is_some() {
        spec.profile().delta()
    } else {
        0.0
    }
}

/// Start point of run `i`: stream `i` of a ChaCha generator seeded by `seed`.
pub fn crossing_start(seed: u64, i: usize) -> TorusPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    TorusPoint::new(rng.gen(), rng.gen())
}

/// The polylines of one crossing run, from the end of the tangent phase up
/// to the first crossing (or the last step).
pub fn crossing_snapshots(spec: &MapSpec, start: TorusPoint, r: f64, max_steps: usize) -> (CrossingRun, Vec<TorusCurve>) {
    let mut out = Vec::new();
    let run = crossing_run(spec, start, r, max_steps, section3_delta(spec), Some(&mut out));
    (run, out)
}

/// Lemma 3.4 surrogate: from uniform start points, a horizontal curve of
/// max-norm length `r` is iterated until its lift spans more than 1 in x.
pub fn crossing_experiment(spec: &MapSpec, r: f64, n_seeds: usize, max_steps: usize, seed: u64) -> CrossingExperiment {
    let delta = section3_delta(spec);
    let starts: Vec<TorusPoint> = (0..n_seeds).map(|i| crossing_start(seed, i)).collect();
    let go = |p: &TorusPoint| crossing_run(spec, *p, r, max_steps, delta, None);
    #[cfg(feature = "parallel")]
    let runs: Vec<CrossingRun> = {
        use rayon::prelude::*;
        starts.par_iter().map(go).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<CrossingRun> = starts.iter().map(go).collect();
    let mut histogram = vec![0u64; max_steps + 1];
    for n in runs.iter().filter_map(|r| r.first_crossing) {
        histogram[n] += 1;
    }
    let successes = runs.iter().filter(|r| r.first_crossing.is_some()).count();
    let min_growth = runs.iter().filter_map(|r| r.min_growth_in_g_prime).fold(f64::INFINITY, f64::min);
    CrossingExperiment {
        r,
        max_steps,
        success_fraction: successes as f64 / n_seeds.max(1) as f64,
        runs,
        histogram,
        min_growth_in_g_prime: min_growth,
    }
}
