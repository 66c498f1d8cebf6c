//! The circle profile s, its critical windows and good intervals.
//!
//! s is defined through its derivative: on each interval between consecutive
//! critical points s′ is a constant slope, blended to zero at the critical
//! points by a ramp over windows of half-width δ. The value is anchored by
//! s(0) = s₀ and the slopes are balanced so that ∫s′ = 0.

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Blend function on a half-window, u = distance to the critical point / δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramp {
    /// q(u) = u²(3 − 2u); s′ vanishes to second order at critical points.
    Smoothstep,
    /// ρ(u) = 1 − (1 − u)³; s′ is odd and linear through critical points.
    Cubic,
}

impl Ramp {
    fn value(self, u: f64) -> f64 {
        match self {
            Ramp::Smoothstep => u * u * (3.0 - 2.0 * u),
            Ramp::Cubic => 1.0 - (1.0 - u).powi(3),
        }
    }

    fn derivative(self, u: f64) -> f64 {
        match self {
            Ramp::Smoothstep => 6.0 * u * (1.0 - u),
            Ramp::Cubic => 3.0 * (1.0 - u).powi(2),
        }
    }

    /// ∫₀ᵘ ramp.
    fn integral(self, u: f64) -> f64 {
        match self {
            Ramp::Smoothstep => u * u * u - 0.5 * u.powi(4),
            Ramp::Cubic => u - 0.25 * (1.0 - (1.0 - u).powi(4)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// τ₂ + 1 critical points j/(τ₂+1) with alternating, growing slopes.
    TheoremA,
    /// Two critical points p = 1/4, q = 3/4 and window half-width 2t^(−3/10).
    Section3,
}

/// Serialized form; loading re-runs construction and checks the slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDoc {
    pub kind: ProfileKind,
    pub tau2: u32,
    pub a0: f64,
    pub kappa: f64,
    pub delta: f64,
    pub s0: [i64; 2],
    pub critical_points: Vec<[i64; 2]>,
    pub slopes: Vec<f64>,
    pub slope_floor: f64,
    pub slope_ceil: f64,
    #[serde(default)]
    pub section3: Option<Section3Params>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section3Params {
    pub m: i64,
    pub k: i64,
    pub t: f64,
    pub slope_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ProfileDoc", try_from = "ProfileDoc")]
pub struct ShearProfile {
    kind: ProfileKind,
    tau2: u32,
    a0: f64,
    kappa: f64,
    delta: f64,
    s0: [i64; 2],
    critical_exact: Vec<[i64; 2]>,
    critical: Vec<f64>,
    slopes: Vec<f64>,
    ramp: Ramp,
    section3: Option<Section3Params>,
    /// ∫ from c₀ to c_j of s′, for j = 0..=n (last entry closes the period).
    primitive: Vec<f64>,
    /// s(x) = anchor + F(lift of x into [c₀, c₀+1)).
    anchor: f64,
    a: f64,
    b: f64,
}

/// Region of the torus determined by the x-coordinate alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Critical,
    GoodMinus,
    GoodPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRegion {
    pub region: Region,
    /// Within δ/2 of a critical point (the inner windows 𝒞_δ).
    pub inner_critical: bool,
    /// Index of the interval J_j containing x.
    pub interval: usize,
}

/// Window half-width used by default for Theorem A profiles: 1/(4τ₂(τ₂+1)).
pub fn default_delta(tau2: u32) -> f64 {
    let t = tau2 as f64;
    1.0 / (4.0 * t * (t + 1.0))
}

fn reduced(num: i64, den: i64) -> [i64; 2] {
    let g = num_integer::gcd(num, den).max(1);
    let s = if den < 0 { -1 } else { 1 };
    [s * num / g, s * den / g]
}

/// Circle distance on ℝ/ℤ.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl ShearProfile {
    /// Theorem A profile with τ₂ + 1 critical points.
    ///
    /// Slopes ā_j = (−1)^(j+1)·a0·κ^j for j < τ₂; the last slope ā_τ₂ is
    /// solved from Σā_j = 0, which makes s periodic (all intervals have equal
    /// length). The growth |ā_{j+1}| ≥ 2|ā_j| then holds for j ≤ τ₂ − 2 and all
    /// magnitudes are distinct; if a check fails κ is increased and the
    /// construction retried.
    pub fn build(tau2: u32, a0: f64, kappa: f64, delta: f64, s0: [i64; 2]) -> Result<Self> {
        if tau2 < 3 {
            return Err(Error::Profile(format!("tau2 = {tau2} < 3")));
        }
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::Profile(format!("base slope a0 = {a0} must be positive")));
        }
        if !(kappa > 2.0 && kappa.is_finite()) {
            return Err(Error::Profile(format!("growth kappa = {kappa} must exceed 2")));
        }
        let n = tau2 as usize + 1;
        let width = 1.0 / n as f64;
        if !(delta > 0.0 && width - 2.0 * delta > 0.5 * width) {
            return Err(Error::Profile(format!(
                "delta = {delta} violates 1/(tau2+1) - 2 delta > 1/(2(tau2+1))"
            )));
        }
        check_s0(s0)?;
        let mut k = kappa;
        let mut diagnostics = Vec::new();
        for _ in 0..8 {
            match theorem_a_slopes(tau2, a0, k) {
                Ok(slopes) => {
                    let critical_exact: Vec<[i64; 2]> =
                        (0..n).map(|j| reduced(j as i64, n as i64)).collect();
                    return Self::assemble(
                        ProfileKind::TheoremA,
                        tau2,
                        a0,
                        k,
                        delta,
                        s0,
                        critical_exact,
                        slopes,
                        Ramp::Smoothstep,
                        None,
                    );
                }
                Err(msg) => {
                    diagnostics.push(format!("kappa = {k}: {msg}"));
                    k *= 1.25;
                }
            }
        }
        Err(Error::Profile(format!(
            "slope invariants failed after retries: {}",
            diagnostics.join("; ")
        )))
    }

    /// Two-critical-point profile of the §3 family E = [[m, k(m−1)], [0, 1]].
    ///
    /// δ = 2t^(−3/10); on the good region |s′| = σ with
    /// σ = slope_fraction · 2δ/(k(m−1)), so k(m−1)|s′| < 4t^(−3/10) holds on
    /// 𝒞 whenever slope_fraction < 1.
    pub fn section3(m: i64, k: i64, t: f64, slope_fraction: f64, s0: [i64; 2]) -> Result<Self> {
        if m < 3 || k < 1 {
            return Err(Error::Profile(format!("section 3 family needs m >= 3, k >= 1 (got m={m}, k={k})")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Profile(format!("t = {t} must be positive")));
        }
        let delta = 2.0 * t.powf(-0.3);
        if !(delta < 0.25) {
            return Err(Error::Profile(format!(
                "delta(t) = 2 t^(-3/10) = {delta} is not below 1/4; windows around 1/4 and 3/4 would overlap"
            )));
        }
        if !(slope_fraction > 0.0) {
            return Err(Error::Profile("slope_fraction must be positive".into()));
        }
        check_s0(s0)?;
        let sigma = slope_fraction * 2.0 * delta / (k * (m - 1)) as f64;
        Self::assemble(
            ProfileKind::Section3,
            m as u32,
            sigma,
            1.0,
            delta,
            s0,
            vec![[1, 4], [3, 4]],
            vec![sigma, -sigma],
            Ramp::Cubic,
            Some(Section3Params { m, k, t, slope_fraction }),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: ProfileKind,
        tau2: u32,
        a0: f64,
        kappa: f64,
        delta: f64,
        s0: [i64; 2],
        critical_exact: Vec<[i64; 2]>,
        slopes: Vec<f64>,
        ramp: Ramp,
        section3: Option<Section3Params>,
    ) -> Result<Self> {
        let critical: Vec<f64> = critical_exact.iter().map(|c| c[0] as f64 / c[1] as f64).collect();
        let mut p = ShearProfile {
            kind,
            tau2,
            a0,
            kappa,
            delta,
            s0,
            critical_exact,
            critical,
            a: slopes.iter().fold(f64::INFINITY, |m, s| m.min(s.abs())),
            b: slopes.iter().fold(0.0, |m, s| m.max(s.abs())),
            slopes,
            ramp,
            section3,
            primitive: Vec::new(),
            anchor: 0.0,
        };
        let n = p.critical.len();
        let mut acc = 0.0;
        p.primitive.push(0.0);
        for j in 0..n {
            acc += p.interval_integral(j);
            p.primitive.push(acc);
        }
        let scale = p.slopes.iter().map(|s| s.abs()).sum::<f64>();
        if acc.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::Profile(format!("slopes are not balanced: integral of s' = {acc}")));
        }
        let zero_lift = if p.critical[0] == 0.0 { 0.0 } else { 1.0 };
        p.anchor = p.s0_f64() - p.primitive_lifted(zero_lift);
        Ok(p)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
    pub fn tau2(&self) -> u32 {
        self.tau2
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn s0(&self) -> [i64; 2] {
        self.s0
    }
    pub fn s0_f64(&self) -> f64 {
        self.s0[0] as f64 / self.s0[1] as f64
    }
    pub fn critical_points(&self) -> &[f64] {
        &self.critical
    }
    pub fn critical_points_exact(&self) -> &[[i64; 2]] {
        &self.critical_exact
    }
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }
    /// Slope floor a = min |ā_j|.
    pub fn slope_floor(&self) -> f64 {
        self.a
    }
    /// Slope ceiling b = max |ā_j|.
    pub fn slope_ceil(&self) -> f64 {
        self.b
    }
    pub fn section3_params(&self) -> Option<Section3Params> {
        self.section3
    }
    pub fn ramp(&self) -> Ramp {
        self.ramp
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Smallest gap between distinct slope magnitudes.
    pub fn min_slope_gap(&self) -> f64 {
        let mut mags: Vec<f64> = self.slopes.iter().map(|s| s.abs()).collect();
        mags.sort_by(f64::total_cmp);
        mags.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    fn interval_len(&self, j: usize) -> f64 {
        let n = self.critical.len();
        let next = if j + 1 < n { self.critical[j + 1] } else { self.critical[0] + 1.0 };
        next - self.critical[j]
    }

    fn interval_integral(&self, j: usize) -> f64 {
        let len = self.interval_len(j);
        self.slopes[j] * (len - 2.0 * self.delta + 2.0 * self.delta * self.ramp.integral(1.0))
    }

    /// Locate x (any real) as (interval j, offset r = x̃ − c_j) with
    /// x̃ the lift of x into [c₀, c₀ + 1).
    fn locate(&self, x: f64) -> (usize, f64) {
        let c0 = self.critical[0];
        let mut xl = (x - c0).rem_euclid(1.0) + c0;
        if xl >= c0 + 1.0 {
            xl = c0;
        }
        // Critical points are few (τ₂ + 1); a binary search keeps large m cheap.
        let j = match self.critical.binary_search_by(|c| c.total_cmp(&xl)) {
            Ok(j) => j,
            Err(i) => i - 1,
        };
        (j, xl - self.critical[j])
    }

    fn primitive_lifted(&self, xl: f64) -> f64 {
        let (j, r) = self.locate(xl);
        self.primitive[j] + self.slopes[j] * self.ramp_primitive(j, r)
    }

    /// ∫₀^r of the normalized ramp shape on interval j.
    fn ramp_primitive(&self, j: usize, r: f64) -> f64 {
        let (len, d) = (self.interval_len(j), self.delta);
        let half = d * self.ramp.integral(1.0);
        if r <= d {
            d * self.ramp.integral(r / d)
        } else if r <= len - d {
            half + (r - d)
        } else {
            half + (len - 2.0 * d) + (half - d * self.ramp.integral(((len - r) / d).max(0.0)))
        }
    }

    pub fn eval_s(&self, x: f64) -> f64 {
        let (j, r) = self.locate(x);
        self.anchor + self.primitive[j] + self.slopes[j] * self.ramp_primitive(j, r)
    }

    pub fn eval_s_prime(&self, x: f64) -> f64 {
        let (j, r) = self.locate(x);
        let u = r.min(self.interval_len(j) - r) / self.delta;
        if u >= 1.0 {
            self.slopes[j]
        } else {
            self.slopes[j] * self.ramp.value(u)
        }
    }

    pub fn eval_s_second(&self, x: f64) -> f64 {
        let (j, r) = self.locate(x);
        let len = self.interval_len(j);
        let d = self.delta;
        if r < d && r <= len - r {
            self.slopes[j] * self.ramp.derivative(r / d) / d
        } else if len - r < d {
            -self.slopes[j] * self.ramp.derivative((len - r) / d) / d
        } else {
            0.0
        }
    }

    /// Distance from x to the nearest critical point on the circle.
    pub fn distance_to_critical_points(&self, x: f64) -> f64 {
        let (j, r) = self.locate(x);
        r.min(self.interval_len(j) - r)
    }

    /// Distance from x to the critical region 𝒞 (zero inside it).
    pub fn distance_to_critical_region(&self, x: f64) -> f64 {
        (self.distance_to_critical_points(x) - self.delta).max(0.0)
    }

    pub fn classify_x(&self, x: f64) -> PointRegion {
        let (j, r) = self.locate(x);
        let dist = r.min(self.interval_len(j) - r);
        let region = if dist <= self.delta {
            Region::Critical
        } else if self.slopes[j] > 0.0 {
            Region::GoodPlus
        } else {
            Region::GoodMinus
        };
        PointRegion {
            region,
            inner_critical: dist <= 0.5 * self.delta,
            interval: j,
        }
    }

    /// Region of a torus point (x̄ = (x, y); only x matters).
    pub fn classify_point(&self, p: [f64; 2]) -> PointRegion {
        self.classify_x(p[0])
    }

    pub fn regions(&self) -> RegionDecomposition {
        let d = self.delta;
        let n = self.critical.len();
        let mut r = RegionDecomposition {
            delta: d,
            centers: self.critical_exact.clone(),
            critical: Vec::new(),
            inner_critical: Vec::new(),
            good_minus: Vec::new(),
            good_plus: Vec::new(),
        };
        for j in 0..n {
            let c = self.critical[j];
            r.critical.push([c - d, c + d]);
            r.inner_critical.push([c - 0.5 * d, c + 0.5 * d]);
            let good = [c + d, c + self.interval_len(j) - d];
            if self.slopes[j] > 0.0 {
                r.good_plus.push(good);
            } else {
                r.good_minus.push(good);
            }
        }
        r
    }

    /// Monotone enclosure of s over a real interval of length < 1.
    ///
    /// s is monotone between consecutive critical points, so the extrema over
    /// [lo, hi] are attained at the endpoints or at critical points inside.
    pub fn s_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut vmin = self.eval_s(lo).min(self.eval_s(hi));
        let mut vmax = self.eval_s(lo).max(self.eval_s(hi));
        let start = lo.floor() as i64 - 1;
        let end = hi.ceil() as i64 + 1;
        for shift in start..=end {
            for &c in &self.critical {
                let x = c + shift as f64;
                if x > lo && x < hi {
                    let v = self.eval_s(c);
                    vmin = vmin.min(v);
                    vmax = vmax.max(v);
                }
            }
        }
        (vmin, vmax)
    }

    /// Bound on |s′| over a real interval: b unless the interval sits inside
    /// one half-window, where the ramp is monotone in the distance.
    pub fn s_prime_abs_bound(&self, lo: f64, hi: f64) -> f64 {
        if hi - lo >= 0.5 * self.delta {
            return self.b;
        }
        let (j0, _) = self.locate(lo);
        let (j1, _) = self.locate(hi);
        if j0 != j1 {
            return self.b;
        }
        self.eval_s_prime(lo).abs().max(self.eval_s_prime(hi).abs()).max(
            // the plateau value is reached if the interval crosses a ramp end
            if self.distance_to_critical_points(0.5 * (lo + hi)) >= self.delta - (hi - lo) {
                self.slopes[j0].abs()
            } else {
                0.0
            },
        )
    }
}

fn check_s0(s0: [i64; 2]) -> Result<()> {
    if s0[1] <= 0 || s0[0] <= 0 || s0[0] >= s0[1] {
        return Err(Error::Profile(format!(
            "s0 = {}/{} must be a rational in (0,1)",
            s0[0], s0[1]
        )));
    }
    Ok(())
}

fn theorem_a_slopes(tau2: u32, a0: f64, kappa: f64) -> std::result::Result<Vec<f64>, String> {
    let n = tau2 as usize;
    let mut slopes: Vec<f64> = (0..n)
        .map(|j| {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sign * a0 * kappa.powi(j as i32)
        })
        .collect();
    let last = -slopes.iter().sum::<f64>();
    slopes.push(last);
    let expected_sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    if last.signum() != expected_sign {
        return Err(format!("balancing slope {last} has the wrong sign"));
    }
    for j in 0..n.saturating_sub(1) {
        if slopes[j + 1].abs() < 2.0 * slopes[j].abs() {
            return Err(format!("growth fails between slopes {j} and {}", j + 1));
        }
    }
    let mut mags: Vec<f64> = slopes.iter().map(|s| s.abs()).collect();
    mags.sort_by(f64::total_cmp);
    if mags.windows(2).any(|w| w[1] - w[0] <= 1e-9 * w[1]) {
        return Err("two slopes share a magnitude".into());
    }
    Ok(slopes)
}

impl From<ShearProfile> for ProfileDoc {
    fn from(p: ShearProfile) -> Self {
        ProfileDoc {
            kind: p.kind,
            tau2: p.tau2,
            a0: p.a0,
            kappa: p.kappa,
            delta: p.delta,
            s0: p.s0,
            critical_points: p.critical_exact,
            slope_floor: p.a,
            slope_ceil: p.b,
            slopes: p.slopes,
            section3: p.section3,
        }
    }
}

impl TryFrom<ProfileDoc> for ShearProfile {
    type Error = Error;
    fn try_from(doc: ProfileDoc) -> Result<Self> {
        let p = match (doc.kind, doc.section3) {
            (ProfileKind::TheoremA, _) => ShearProfile::build(doc.tau2, doc.a0, doc.kappa, doc.delta, doc.s0)?,
            (ProfileKind::Section3, Some(s)) => ShearProfile::section3(s.m, s.k, s.t, s.slope_fraction, doc.s0)?,
            (ProfileKind::Section3, None) => {
                return Err(Error::Profile("section3 profile document lacks its parameters".into()))
            }
        };
        let same = p.slopes.len() == doc.slopes.len()
            && p.slopes.iter().zip(&doc.slopes).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
        if !same {
            return Err(Error::Profile("stored slopes do not match the construction parameters".into()));
        }
        Ok(p)
    }
}

/// Interval unions (lift coordinates, possibly extending below 0) describing
/// 𝒞, 𝒞_δ, 𝒢⁻ and 𝒢⁺ as products with T¹.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDecomposition {
    pub delta: f64,
    pub centers: Vec<[i64; 2]>,
    pub critical: Vec<[f64; 2]>,
    pub inner_critical: Vec<[f64; 2]>,
    pub good_minus: Vec<[f64; 2]>,
    pub good_plus: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSlopeStats {
    pub interval: usize,
    pub slope: f64,
    pub min_abs_good: f64,
    pub max_abs_good: f64,
    pub max_abs_window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeBoundsReport {
    pub a: f64,
    pub b: f64,
    pub per_interval: Vec<IntervalSlopeStats>,
    pub certificate: Certificate,
}

/// Dense-sampling check that |s′| ≤ b everywhere and |s′| ≥ a on 𝒢.
pub fn slope_bounds_report(p: &ShearProfile, samples_per_interval: usize) -> SlopeBoundsReport {
    let n = p.critical.len();
    let mut per_interval = Vec::with_capacity(n);
    let mut cert: Option<Certificate> = None;
    let (a, b) = (p.a, p.b);
    let tol = 1e-12 * b.max(1.0);
    let mut worst_low = f64::INFINITY;
    let mut worst_high = f64::INFINITY;
    for j in 0..n {
        let len = p.interval_len(j);
        let mut st = IntervalSlopeStats {
            interval: j,
            slope: p.slopes[j],
            min_abs_good: f64::INFINITY,
            max_abs_good: 0.0,
            max_abs_window: 0.0,
        };
        for i in 0..=samples_per_interval {
            let r = len * i as f64 / samples_per_interval as f64;
            let x = p.critical[j] + r;
            let v = p.eval_s_prime(x).abs();
            let good = r.min(len - r) > p.delta;
            if good {
                st.min_abs_good = st.min_abs_good.min(v);
                st.max_abs_good = st.max_abs_good.max(v);
                worst_low = worst_low.min(v - a);
                if v < a - tol && cert.is_none() {
                    cert = Some(Certificate::refuted(
                        "slope_bounds",
                        Witness::new("|s'|>=a on G", "slope below floor on the good region")
                            .at([x.rem_euclid(1.0), 0.0])
                            .values(v, a),
                    ));
                }
            } else {
                st.max_abs_window = st.max_abs_window.max(v);
            }
            worst_high = worst_high.min(b - v);
            if v > b + tol && cert.is_none() {
                cert = Some(Certificate::refuted(
                    "slope_bounds",
                    Witness::new("|s'|<=b", "slope above ceiling").at([x.rem_euclid(1.0), 0.0]).values(v, b),
                ));
            }
        }
        per_interval.push(st);
    }
    let certificate = cert.unwrap_or_else(|| {
        Certificate::proven("slope_bounds")
            .with_margin("good_min_minus_a", worst_low)
            .with_margin("b_minus_max", worst_high)
    });
    SlopeBoundsReport { a, b, per_interval, certificate }
}
