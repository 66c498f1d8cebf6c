//! Horizontal/vertical cones, the backward estimates NH1–NH4, the functional
//! I(x̄, u; fⁿ) and the counts of vertical pullbacks.

use crate::certificate::{Certificate, MarginTracker, Witness};
use crate::combinatorics;
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::lattice::{cone_norm_constants, ConeConstants, IntegerMatrix2};
use crate::linalg::{norm_max, normalize_max, Vec2};
use crate::map::{MapSpec, TorusPoint};
use crate::profile::Region;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    Horizontal,
    Vertical,
}

/// Cone of a non-zero vector; the boundary |u₂| = α|u₁| is horizontal.
pub fn cone_of(u: Vec2, alpha: f64) -> Cone {
    if u[1].abs() <= alpha * u[0].abs() {
        Cone::Horizontal
    } else {
        Cone::Vertical
    }
}

pub fn in_cone(u: Vec2, alpha: f64, which: Cone) -> Result<bool> {
    if u == [0.0, 0.0] {
        return Err(Error::InvalidInput("cone membership of the zero vector".into()));
    }
    Ok(cone_of(u, alpha) == which)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarSign {
    Plus,
    Minus,
    Both,
}

impl StarSign {
    /// Whether a point of the given region lies in 𝒢^{*(u)}.
    pub fn admits(self, region: Region) -> bool {
        matches!(
            (self, region),
            (StarSign::Both, Region::GoodMinus | Region::GoodPlus)
                | (StarSign::Plus, Region::GoodPlus)
                | (StarSign::Minus, Region::GoodMinus)
        )
    }
}

/// Sign of −w₁/w₂ for w = E⁻¹u; a zero coordinate carries both signs.
pub fn star_sign(u: Vec2, e: &IntegerMatrix2) -> Result<StarSign> {
    if u == [0.0, 0.0] {
        return Err(Error::InvalidInput("star sign of the zero vector".into()));
    }
    // The adjugate has the sign pattern of E⁻¹ up to the sign of det, which
    // cancels in the ratio.
    let adj = e.adjugate();
    let w1 = adj[0][0] as f64 * u[0] + adj[0][1] as f64 * u[1];
    let w2 = adj[1][0] as f64 * u[0] + adj[1][1] as f64 * u[1];
    Ok(if w1 == 0.0 || w2 == 0.0 {
        StarSign::Both
    } else if -w1 / w2 > 0.0 {
        StarSign::Plus
    } else {
        StarSign::Minus
    })
}

/// A point with a max-norm unit tangent vector and its cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub point: TorusPoint,
    pub u: Vec2,
    pub cone: Cone,
}

impl TangentSample {
    pub fn new(point: TorusPoint, u: Vec2, alpha: f64) -> Result<Self> {
        let u = normalize_max(u).ok_or_else(|| Error::InvalidInput("zero tangent vector".into()))?;
        Ok(TangentSample { point, u, cone: cone_of(u, alpha) })
    }
}

/// State carried along a pre-orbit: the normalized pullback of u, the log of
/// its norm and the log of the accumulated |det|.
#[derive(Debug, Clone, Copy)]
struct Pullback {
    v: Vec2,
    log_norm: f64,
    log_det: f64,
}

impl Pullback {
    fn start(u: Vec2) -> Self {
        Pullback { v: u, log_norm: 0.0, log_det: 0.0 }
    }

    fn step(&self, spec: &MapSpec, y: &TorusPoint) -> Self {
        let m = spec.inverse_jacobian(*y);
        let w = m.apply(self.v);
        let n = norm_max(w);
        Pullback {
            v: [w[0] / n, w[1] / n],
            log_norm: self.log_norm + n.ln(),
            log_det: self.log_det + m.det().abs().ln(),
        }
    }
}

fn require_unit(u: Vec2) -> Result<()> {
    if (norm_max(u) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("u = {u:?} is not a max-norm unit vector")));
    }
    Ok(())
}

/// I(x̄, u; fⁿ) = Σ_{ȳ ∈ f⁻ⁿ(x̄)} log‖(Dfⁿ(ȳ))⁻¹u‖ / |det Dfⁿ(ȳ)|.
///
/// Every leaf has weight d⁻ⁿ; the accumulated determinant along each path is
/// checked against it.
pub fn i_value(spec: &MapSpec, p: TorusPoint, u: Vec2, n: usize, budget: u64) -> Result<f64> {
    require_unit(u)?;
    let d = spec.degree() as f64;
    let expected_log_det = -(n as f64) * d.ln();
    let (sum, worst) = spec.reduce_tree(
        p,
        n,
        budget,
        Pullback::start(u),
        &|s: &Pullback, y| s.step(spec, y),
        &|s: &Pullback| (s.log_norm, (s.log_det - expected_log_det).abs()),
        (0.0, 0.0),
        &|a: (f64, f64), b: (f64, f64)| (a.0 + b.0, a.1.max(b.1)),
    )?;
    assert!(worst < 1e-9 * (1.0 + n as f64), "Jacobian determinant drifted by {worst}");
    Ok(sum * d.powi(-(n as i32)))
}

/// Both sides of the decomposition of I(x̄, u; f^{kn}) into weighted
/// I(ȳ, w; f^k) terms.
pub fn convexity_check(spec: &MapSpec, p: TorusPoint, u: Vec2, n: usize, k: usize, budget: u64) -> Result<Certificate> {
    require_unit(u)?;
    let lhs = i_value(spec, p, u, n * k, budget)?;
    let d = spec.degree() as f64;
    let mut rhs = 0.0;
    for i in 0..n {
        let mut part = 0.0;
        let mut err = None;
        spec.walk_tree(
            p,
            k * i,
            budget,
            (p, Pullback::start(u)),
            &|s: &(TorusPoint, Pullback), y| (*y, s.1.step(spec, y)),
            &mut |s: &(TorusPoint, Pullback)| match i_value(spec, s.0, s.1.v, k, budget) {
                Ok(v) => part += v,
                Err(e) => err = Some(e),
            },
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        rhs += part * d.powi(-((k * i) as i32));
    }
    let diff = (lhs - rhs).abs();
    if diff <= 1e-9 * lhs.abs().max(1.0) {
        Ok(Certificate::proven("convexity").with_margin("abs_difference", diff))
    } else {
        Ok(Certificate::refuted(
            "convexity",
            Witness::new("I(x,u;f^(kn)) decomposition", format!("lhs = {lhs}, rhs = {rhs}"))
                .at(p.as_array())
                .with_vector(u)
                .values(lhs, rhs),
        ))
    }
}

/// Vertical pullbacks among the d^{3n} depth-3n pre-orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardStats {
    pub n: usize,
    pub leaves: u64,
    pub g_n: u64,
    pub b_n: u64,
    pub a_n: f64,
    pub i_value: f64,
}

pub fn backward_stats(spec: &MapSpec, p: TorusPoint, u: Vec2, alpha: f64, n: usize, budget: u64) -> Result<BackwardStats> {
    let u = normalize_max(u).ok_or_else(|| Error::InvalidInput("zero tangent vector".into()))?;
    let depth = 3 * n;
    let (leaves, g, log_sum) = spec.reduce_tree(
        p,
        depth,
        budget,
        Pullback::start(u),
        &|s: &Pullback, y| s.step(spec, y),
        &|s: &Pullback| (1u64, (cone_of(s.v, alpha) == Cone::Vertical) as u64, s.log_norm),
        (0u64, 0u64, 0.0),
        &|a: (u64, u64, f64), b: (u64, u64, f64)| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    )?;
    Ok(BackwardStats {
        n,
        leaves,
        g_n: g,
        b_n: leaves - g,
        a_n: g as f64 / leaves as f64,
        i_value: log_sum / leaves as f64,
    })
}

/// Depth-3 vertical count.
pub fn count_vertical(spec: &MapSpec, p: TorusPoint, u: Vec2, alpha: f64) -> Result<BackwardStats> {
    backward_stats(spec, p, u, alpha, 1, u64::MAX)
}

/// count_vertical over sample pairs, asserting g ≥ v₁ for vertical u and
/// g ≥ v₂ for horizontal u.
pub fn check_count_floors(spec: &MapSpec, alpha: f64, samples: &[TangentSample]) -> Result<Certificate> {
    let e = spec.matrix();
    let (v1, v2) = combinatorics::counting_floors(e.tau1(), e.tau2())?;
    let (v1, v2) = (to_f64(&v1.into()), to_f64(&v2.into()));
    let mut margins = MarginTracker::default();
    for s in samples {
        let st = count_vertical(spec, s.point, s.u, alpha)?;
        let floor = match cone_of(s.u, alpha) {
            Cone::Vertical => v1,
            Cone::Horizontal => v2,
        };
        let key = match cone_of(s.u, alpha) {
            Cone::Vertical => "g_minus_v1",
            Cone::Horizontal => "g_minus_v2",
        };
        margins.observe(key, st.g_n as f64 - floor);
        if (st.g_n as f64) < floor {
            return Ok(Certificate::refuted(
                "count_floors",
                Witness::new(key, format!("{} of {} depth-3 pullbacks vertical", st.g_n, st.leaves))
                    .at(s.point.as_array())
                    .with_vector(s.u)
                    .values(st.g_n as f64, floor),
            ));
        }
    }
    Ok(margins.into_certificate(Certificate::proven("count_floors")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnRow {
    pub n: usize,
    pub a_n: f64,
    /// p(τ₂)(1 − cⁿ).
    pub bound: f64,
    pub bound_exact: String,
    pub holds: bool,
}

pub fn a_n_sequence(spec: &MapSpec, p: TorusPoint, u: Vec2, n_max: usize, alpha: f64, budget: u64) -> Result<Vec<AnRow>> {
    let tau2 = spec.matrix().tau2();
    let pr = combinatorics::ratio_p(tau2)?;
    let c = combinatorics::ratio_c(tau2);
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let st = backward_stats(spec, p, u, alpha, n, budget)?;
        let mut cn = crate::exact::Q::from_integer(1.into());
        for _ in 0..n {
            cn *= &c;
        }
        let bound = &pr * (crate::exact::Q::from_integer(1.into()) - cn);
        let b = to_f64(&bound);
        rows.push(AnRow {
            n,
            a_n: st.a_n,
            bound: b,
            bound_exact: crate::exact::render(&bound),
            holds: st.a_n >= b,
        });
    }
    Ok(rows)
}

/// Radical-inverse low-discrepancy sequence.
pub fn halton(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Deterministic (point, direction) sample for the C_χ estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub points: usize,
    pub directions: usize,
    pub alpha: f64,
}

impl SampleSpec {
    pub fn reference(alpha: f64) -> Self {
        SampleSpec { points: 512, directions: 16, alpha }
    }

    /// Axes, the four cone-boundary directions (±1/α, ±1) up to sign, then
    /// equally spaced angles in [0, π).
    pub fn directions(&self) -> Vec<Vec2> {
        let mut dirs = vec![[1.0, 0.0], [0.0, 1.0], [1.0 / self.alpha, 1.0], [-1.0 / self.alpha, 1.0]];
        let extra = self.directions.saturating_sub(dirs.len());
        for i in 0..extra {
            let th = std::f64::consts::PI * (i as f64 + 0.5) / extra as f64;
            dirs.push(normalize_max([th.cos(), th.sin()]).expect("unit circle"));
        }
        dirs.truncate(self.directions);
        dirs
    }

    pub fn points(&self) -> Vec<TorusPoint> {
        (1..=self.points as u64).map(|i| TorusPoint::new(halton(i, 2), halton(i, 3))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiLower {
    pub n: usize,
    pub value: f64,
    pub argmin_point: TorusPoint,
    pub argmin_u: Vec2,
    pub samples: usize,
    /// The infimum runs over finitely many samples, so this is an upper
    /// estimate of the true infimum at this n.
    pub heuristic: bool,
}

/// min over the sample of (1/n)·I(x̄, u; fⁿ).
pub fn c_chi_lower(spec: &MapSpec, n: usize, sample: &SampleSpec, budget: u64) -> Result<ChiLower> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let mut best = ChiLower {
        n,
        value: f64::INFINITY,
        argmin_point: TorusPoint::new(0.0, 0.0),
        argmin_u: [1.0, 0.0],
        samples: 0,
        heuristic: true,
    };
    let dirs = sample.directions();
    for p in sample.points() {
        for u in &dirs {
            let v = i_value(spec, p, *u, n, budget)? / n as f64;
            best.samples += 1;
            if v < best.value {
                best.value = v;
                best.argmin_point = p;
                best.argmin_u = *u;
            }
        }
    }
    Ok(best)
}

/// Draw a max-norm unit vector in the chosen cone; `edge` forces a cone
/// boundary direction.
fn sample_in_cone(rng: &mut ChaCha8Rng, alpha: f64, cone: Cone, edge: bool) -> Vec2 {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    match cone {
        Cone::Vertical => {
            // |u₁| < 1/α strictly: the boundary belongs to the horizontal cone.
            let s = if edge { (1.0 / alpha).next_down() } else { rng.gen_range(-1.0..1.0) / alpha };
            [s * sign, sign]
        }
        Cone::Horizontal => {
            let s: f64 = if edge { 1.0 } else { rng.gen_range(-1.0..=1.0) };
            let v = [1.0, s * alpha];
            let v = normalize_max(v).expect("non-zero");
            [v[0] * sign, v[1] * sign]
        }
    }
}

/// Sampled verification of NH1–NH4 for (Df_t)⁻¹.
///
/// Half of the points are drawn uniformly, half inside the critical windows.
pub fn check_nh(spec: &MapSpec, alpha: f64, n_samples: usize, seed: u64) -> Result<Certificate> {
    let prof = spec.profile();
    let (a, b, t) = (prof.slope_floor(), prof.slope_ceil(), spec.t());
    if !(t > 2.0 * alpha / a) {
        return Err(Error::Precondition(format!("t = {t} must exceed 2 alpha / a = {}", 2.0 * alpha / a)));
    }
    let cc: ConeConstants = cone_norm_constants(spec.matrix(), alpha)?;
    let (ev, eh) = (cc.e_v, cc.e_h);
    let nh2_good = ev * (a - alpha / t) * t / alpha;
    let nh2_crit = ev / alpha;
    let nh4_star = eh;
    let nh4_other = eh / ((b + 1.0 / t) * t);
    let rel = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tr = MarginTracker::default();
    let crit = prof.critical_points().to_vec();
    let delta = prof.delta();
    for i in 0..n_samples {
        let x = if i % 2 == 0 {
            rng.gen::<f64>()
        } else {
            crit[rng.gen_range(0..crit.len())] + rng.gen_range(-delta..=delta)
        };
        let p = TorusPoint::new(x, rng.gen());
        let region = prof.classify_point(p.as_array()).region;
        let inv = spec.inverse_jacobian(p);
        for k in 0..8 {
            let edge = k < 2;
            // NH1, NH2 on vertical vectors.
            let u = sample_in_cone(&mut rng, alpha, Cone::Vertical, edge);
            let w = inv.apply(u);
            let nw = norm_max(w);
            if region != Region::Critical {
                let slack = (w[1].abs() - alpha * w[0].abs()) / nw;
                tr.observe("nh1_vertical_slack", slack);
                if slack <= 0.0 {
                    return Ok(nh_refuted("NH1", p, u, slack, 0.0));
                }
                tr.observe("nh2_good_ratio_minus_one", nw / nh2_good - 1.0);
                if nw < nh2_good * (1.0 - rel) {
                    return Ok(nh_refuted("NH2 (good)", p, u, nw, nh2_good));
                }
            } else {
                tr.observe("nh2_critical_ratio_minus_one", nw / nh2_crit - 1.0);
                if nw < nh2_crit * (1.0 - rel) {
                    return Ok(nh_refuted("NH2 (critical)", p, u, nw, nh2_crit));
                }
            }
            // NH3, NH4 on horizontal vectors.
            let u = sample_in_cone(&mut rng, alpha, Cone::Horizontal, edge);
            let w = inv.apply(u);
            let nw = norm_max(w);
            let star = star_sign(u, spec.matrix())?;
            if star.admits(region) {
                let slack = (w[1].abs() - alpha * w[0].abs()) / nw;
                tr.observe("nh3_vertical_slack", slack);
                if slack <= 0.0 {
                    return Ok(nh_refuted("NH3", p, u, slack, 0.0));
                }
                tr.observe("nh4_star_ratio_minus_one", nw / nh4_star - 1.0);
                if nw < nh4_star * (1.0 - rel) {
                    return Ok(nh_refuted("NH4 (G*)", p, u, nw, nh4_star));
                }
            } else {
                tr.observe("nh4_other_ratio_minus_one", nw / nh4_other - 1.0);
                if nw < nh4_other * (1.0 - rel) {
                    return Ok(nh_refuted("NH4 (elsewhere)", p, u, nw, nh4_other));
                }
            }
        }
    }
    let cert = Certificate::proven("nh")
        .with_margin("nh2_good_bound", nh2_good)
        .with_margin("nh2_critical_bound", nh2_crit)
        .with_margin("nh4_other_bound", nh4_other)
        .with_note(format!("e_v = {}, e_h = {}", cc.e_v_exact, cc.e_h_exact));
    Ok(tr.into_certificate(cert))
}

fn nh_refuted(check: &str, p: TorusPoint, u: Vec2, observed: f64, bound: f64) -> Certificate {
    Certificate::refuted(
        "nh",
        Witness::new(check, "sampled inequality fails").at(p.as_array()).with_vector(u).values(observed, bound),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix2;
    use crate::map::DeltaMode;

    fn e() -> IntegerMatrix2 {
        IntegerMatrix2::new(3, 4, 0, 1).unwrap()
    }

    fn reference(t: f64) -> MapSpec {
        MapSpec::theorem_a(e(), 1.0, 2.2, DeltaMode::Adapted, [1, 3], t).unwrap()
    }

    #[test]
    fn cone_examples() {
        assert!(in_cone([1.0, 0.0], 3.0, Cone::Horizontal).unwrap());
        assert!(in_cone([0.0, 1.0], 3.0, Cone::Vertical).unwrap());
        assert!(in_cone([1.0, 3.0], 3.0, Cone::Horizontal).unwrap());
        assert!(in_cone([0.0, 0.0], 3.0, Cone::Horizontal).is_err());
        assert_eq!(star_sign([0.0, 1.0], &e()).unwrap(), StarSign::Plus);
        assert_eq!(star_sign([1.0, 0.0], &e()).unwrap(), StarSign::Both);
    }

    #[test]
    fn linear_i_value() {
        let spec = reference(0.0);
        let v = i_value(&spec, TorusPoint::new(0.3, 0.4), [0.0, 1.0], 1, 100).unwrap();
        assert!((v - (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert_eq!(i_value(&spec, TorusPoint::new(0.3, 0.4), [0.0, 1.0], 0, 100).unwrap(), 0.0);
        assert!(i_value(&spec, TorusPoint::new(0.3, 0.4), [0.0, 0.5], 1, 100).is_err());
    }

    #[test]
    fn i_value_is_even_in_u() {
        let spec = reference(1e3);
        let p = TorusPoint::new(0.37, 0.81);
        for u in [[1.0, 0.3], [-0.2, 1.0]] {
            let a = i_value(&spec, p, u, 4, 1000).unwrap();
            let b = i_value(&spec, p, [-u[0], -u[1]], 4, 1000).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn convexity_small_cases() {
        let spec = reference(1e3);
        let p = TorusPoint::new(0.21, 0.66);
        for (n, k) in [(1, 1), (2, 2), (2, 3)] {
            let c = convexity_check(&spec, p, [0.5, 1.0], n, k, 1_000_000).unwrap();
            assert!(c.is_proven(), "{c:?}");
        }
    }

    #[test]
    fn pullback_composition_matches_inverse_product() {
        let spec = reference(1e3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x0 = TorusPoint::new(rng.gen(), rng.gen());
            let mut path = vec![x0];
            for _ in 0..3 {
                let pre = spec.preimages(*path.last().unwrap());
                path.push(pre[rng.gen_range(0..pre.len())]);
            }
            // Df³(y₃) = Df(y₁)·Df(y₂)·Df(y₃).
            let fwd = spec.jacobian(path[1]).mul(&spec.jacobian(path[2])).mul(&spec.jacobian(path[3]));
            // The computed determinant cancels catastrophically; |det| = 27.
            let inv = crate::linalg::Mat2::new(fwd.d / 27.0, -fwd.b / 27.0, -fwd.c / 27.0, fwd.a / 27.0);
            let mut v = [0.3, 1.0];
            for y in &path[1..] {
                v = spec.inverse_jacobian(*y).apply(v);
            }
            let direct = inv.apply([0.3, 1.0]);
            let scale = inv.norm_max();
            assert!((v[0] - direct[0]).abs() <= 1e-9 * scale && (v[1] - direct[1]).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn nh_on_reference() {
        let spec = reference(1e3);
        let c = check_nh(&spec, 1.5, 2000, 1).unwrap();
        assert!(c.is_proven(), "{c:?}");
        assert!(c.margins["nh1_vertical_slack"] > 0.0);
        let edge = reference(3.0);
        assert!(matches!(check_nh(&edge, 1.5, 10, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn floors_on_reference() {
        let spec = reference(1e3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<TangentSample> = (0..60)
            .map(|i| {
                let cone = if i % 2 == 0 { Cone::Vertical } else { Cone::Horizontal };
                let u = sample_in_cone(&mut rng, 1.5, cone, i % 6 < 2);
                TangentSample::new(TorusPoint::new(rng.gen(), rng.gen()), u, 1.5).unwrap()
            })
            .collect();
        let c = check_count_floors(&spec, 1.5, &samples).unwrap();
        assert!(c.is_proven(), "{c:?}");
    }

    #[test]
    fn a_n_rows() {
        let spec = reference(1e3);
        let rows = a_n_sequence(&spec, TorusPoint::new(0.4, 0.2), [1.0, 0.0], 2, 1.5, 1_000_000).unwrap();
        assert_eq!(rows[0].a_n, 0.0);
        assert_eq!(rows[1].bound_exact, "14/27");
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
    }

    #[test]
    fn halton_prefix() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 3), 2.0 / 3.0);
        assert_eq!(halton(3, 2), 0.75);
    }

    #[test]
    fn sample_directions_cover_axes_and_edges() {
        let s = SampleSpec::reference(1.5);
        let d = s.directions();
        assert_eq!(d.len(), 16);
        assert!(d.iter().all(|u| (norm_max(*u) - 1.0).abs() < 1e-15));
        assert_eq!(cone_of(d[2], 1.5), Cone::Horizontal);
    }
}
