//! Integer matrix analysis: elementary divisors, spectrum class, the preimage
//! coset lattice E⁻¹ℤ²/ℤ², the cone parameter α and the constants e_v, e_h.

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::exact::{from_f64, to_f64, Q};
use crate::linalg::{Mat2, Vec2};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A non-singular 2×2 integer matrix `[[e11, e12], [e21, e22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct IntegerMatrix2 {
    e11: i64,
    e12: i64,
    e21: i64,
    e22: i64,
}

/// Entries are capped so that determinants and adjugate products fit in i64.
const ENTRY_LIMIT: i64 = 1 << 30;

impl IntegerMatrix2 {
    pub fn new(e11: i64, e12: i64, e21: i64, e22: i64) -> Result<Self> {
        if [e11, e12, e21, e22].iter().any(|e| e.abs() > ENTRY_LIMIT) {
            return Err(Error::InvalidInput(format!(
                "matrix entries must be at most 2^30 in absolute value"
            )));
        }
        let m = IntegerMatrix2 { e11, e12, e21, e22 };
        if m.det() == 0 {
            return Err(Error::SingularMatrix);
        }
        Ok(m)
    }

    pub fn e11(&self) -> i64 {
        self.e11
    }
    pub fn e12(&self) -> i64 {
        self.e12
    }
    pub fn e21(&self) -> i64 {
        self.e21
    }
    pub fn e22(&self) -> i64 {
        self.e22
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.e11, self.e12], [self.e21, self.e22]]
    }

    pub fn det(&self) -> i64 {
        self.e11 * self.e22 - self.e12 * self.e21
    }

    pub fn trace(&self) -> i64 {
        self.e11 + self.e22
    }

    /// Degree d = |det E| of the induced torus covering.
    pub fn degree(&self) -> u64 {
        self.det().unsigned_abs()
    }

    pub fn tau1(&self) -> u64 {
        let g = self.e11.gcd(&self.e12).gcd(&self.e21).gcd(&self.e22);
        g.unsigned_abs()
    }

    pub fn tau2(&self) -> u64 {
        self.degree() / self.tau1()
    }

    pub fn is_homothety(&self) -> bool {
        self.e12 == 0 && self.e21 == 0 && self.e11 == self.e22
    }

    /// Adjugate `[[e22, −e12], [−e21, e11]]`, so that E⁻¹ = adj / det.
    pub fn adjugate(&self) -> [[i64; 2]; 2] {
        [[self.e22, -self.e12], [-self.e21, self.e11]]
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2::new(self.e11 as f64, self.e12 as f64, self.e21 as f64, self.e22 as f64)
    }

    pub fn inverse_mat2(&self) -> Mat2 {
        let det = self.det() as f64;
        let adj = self.adjugate();
        Mat2::new(
            adj[0][0] as f64 / det,
            adj[0][1] as f64 / det,
            adj[1][0] as f64 / det,
            adj[1][1] as f64 / det,
        )
    }

    /// E⁻¹ applied to an exact vector.
    pub fn inverse_apply_exact(&self, u: &[Q; 2]) -> [Q; 2] {
        let adj = self.adjugate();
        let det = Q::from_integer(self.det().into());
        [
            (Q::from_integer(adj[0][0].into()) * &u[0] + Q::from_integer(adj[0][1].into()) * &u[1])
                / &det,
            (Q::from_integer(adj[1][0].into()) * &u[0] + Q::from_integer(adj[1][1].into()) * &u[1])
                / &det,
        ]
    }
}

impl TryFrom<[[i64; 2]; 2]> for IntegerMatrix2 {
    type Error = Error;
    fn try_from(r: [[i64; 2]; 2]) -> Result<Self> {
        IntegerMatrix2::new(r[0][0], r[0][1], r[1][0], r[1][1])
    }
}

impl From<IntegerMatrix2> for [[i64; 2]; 2] {
    fn from(m: IntegerMatrix2) -> Self {
        m.rows()
    }
}

impl std::fmt::Display for IntegerMatrix2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.e11, self.e12, self.e21, self.e22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divisors {
    pub tau1: u64,
    pub tau2: u64,
    pub degree: u64,
}

/// Elementary divisors (τ₁, τ₂) and degree d = τ₁τ₂ = |det E|.
///
/// This is the raw computation; homotheties are filtered separately by
/// [`check_theorem_a_admissible`].
pub fn elementary_divisors(e: &IntegerMatrix2) -> Divisors {
    Divisors {
        tau1: e.tau1(),
        tau2: e.tau2(),
        degree: e.degree(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectrum {
    /// 1 or −1 is a root of λ² − tr·λ + det.
    HasPmOneEigenvalue,
    /// Real eigenvalues, neither equal to ±1.
    HyperbolicSpectrum,
    ComplexSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub homothety: bool,
    pub spectrum: Spectrum,
    /// Which of ±1 is an eigenvalue (1 takes precedence if both are).
    pub pm_one: Option<i64>,
}

pub fn classify_matrix(e: &IntegerMatrix2) -> Classification {
    let (tr, det) = (e.trace() as i128, e.det() as i128);
    let pm_one = if 1 - tr + det == 0 {
        Some(1)
    } else if 1 + tr + det == 0 {
        Some(-1)
    } else {
        None
    };
    let disc = tr * tr - 4 * det;
    let spectrum = match (pm_one, disc < 0) {
        (Some(_), _) => Spectrum::HasPmOneEigenvalue,
        (None, true) => Spectrum::ComplexSpectrum,
        (None, false) => Spectrum::HyperbolicSpectrum,
    };
    Classification {
        homothety: e.is_homothety(),
        spectrum,
        pm_one,
    }
}

/// The d distinct cosets of E⁻¹ℤ²/ℤ², stored exactly as numerators over
/// the common denominator |det E|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreimageLattice {
    pub denominator: u64,
    /// Numerator pairs in `0..denominator`, sorted lexicographically.
    pub numerators: Vec<[u64; 2]>,
    pub tau1: u64,
    pub tau2: u64,
    pub x_spacing_regular: bool,
}

impl PreimageLattice {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn offset_exact(&self, i: usize) -> [Q; 2] {
        let d = Q::from_integer(self.denominator.into());
        let [a, b] = self.numerators[i];
        [Q::from_integer(a.into()) / &d, Q::from_integer(b.into()) / &d]
    }

    pub fn offsets_f64(&self) -> Vec<Vec2> {
        let d = self.denominator as f64;
        self.numerators
            .iter()
            .map(|&[a, b]| [a as f64 / d, b as f64 / d])
            .collect()
    }
}

/// Enumerate E⁻¹k mod 1 for k ∈ {0..D−1}² (D = |det E|) and deduplicate.
pub fn preimage_lattice(e: &IntegerMatrix2) -> PreimageLattice {
    let d = e.degree() as i64;
    let adj = e.adjugate();
    let sign = e.det().signum();
    let mut seen = std::collections::BTreeSet::new();
    'outer: for k1 in 0..d {
        for k2 in 0..d {
            let n1 = (sign * (adj[0][0] * k1 + adj[0][1] * k2)).rem_euclid(d);
            let n2 = (sign * (adj[1][0] * k1 + adj[1][1] * k2)).rem_euclid(d);
            seen.insert([n1 as u64, n2 as u64]);
            if seen.len() as i64 == d {
                break 'outer;
            }
        }
    }
    let numerators: Vec<[u64; 2]> = seen.into_iter().collect();
    let (tau1, tau2) = (e.tau1(), e.tau2());
    let mut columns: BTreeMap<u64, u64> = BTreeMap::new();
    for n in &numerators {
        *columns.entry(n[0]).or_default() += 1;
    }
    // τ₂ columns at x = i/τ₂ (numerator i·τ₁), each holding τ₁ points.
    let x_spacing_regular = columns.len() as u64 == tau2
        && columns
            .iter()
            .all(|(&x, &count)| count == tau1 && x % tau1 == 0);
    PreimageLattice {
        denominator: d as u64,
        numerators,
        tau1,
        tau2,
        x_spacing_regular,
    }
}

/// The shape requirements of the Theorem A construction: a non-homothety
/// with e12 ≠ 0, τ₂ ≥ 3 and a regular preimage lattice.
pub fn check_theorem_a_admissible(e: &IntegerMatrix2) -> Result<()> {
    require_shear_type(e)?;
    if e.tau2() < 3 {
        return Err(Error::Inadmissible(format!(
            "tau2 = {} < 3 (Theorem A needs tau2 >= 3)",
            e.tau2()
        )));
    }
    if !preimage_lattice(e).x_spacing_regular {
        return Err(Error::Inadmissible(
            "preimage lattice x-coordinates are not tau2 equally spaced columns".into(),
        ));
    }
    Ok(())
}

fn require_shear_type(e: &IntegerMatrix2) -> Result<()> {
    if e.is_homothety() {
        return Err(Error::Inadmissible(format!("{e} is a homothety")));
    }
    if e.e12() == 0 {
        return Err(Error::Inadmissible(format!(
            "{e} has e12 = 0; the vertical direction is then invariant"
        )));
    }
    Ok(())
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// α|w₁| − |w₂| for w = adj·ray: positive iff the E⁻¹-image of the ray lies
/// in the interior of the horizontal cone.
fn ray_slack(adj: &[[i64; 2]; 2], ray: &[Q; 2], alpha: &Q) -> (Q, [Q; 2]) {
    let w1 = qi(adj[0][0]) * &ray[0] + qi(adj[0][1]) * &ray[1];
    let w2 = qi(adj[1][0]) * &ray[0] + qi(adj[1][1]) * &ray[1];
    (alpha * w1.abs() - w2.abs(), [w1, w2])
}

/// Exact check of E⁻¹Δ_α^v ⊂ Int(Δ_α^h) (closure included).
pub fn admissible_alpha(e: &IntegerMatrix2, alpha: f64) -> Result<Certificate> {
    require_shear_type(e)?;
    let name = "admissible_alpha";
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Ok(Certificate::refuted(
            name,
            Witness::new("alpha>1", format!("alpha = {alpha} violates the standing assumption alpha > 1"))
                .values(alpha, 1.0),
        ));
    }
    let a = from_f64(alpha);
    let adj = e.adjugate();
    let rays = [
        ("boundary(1,+alpha)", [Q::one(), a.clone()]),
        ("boundary(1,-alpha)", [Q::one(), -a.clone()]),
        ("interior(0,1)", [Q::zero(), Q::one()]),
    ];
    let mut worst_ratio = Q::zero();
    for (label, ray) in &rays {
        let (slack, w) = ray_slack(&adj, ray, &a);
        if !slack.is_positive() {
            let ratio = if w[0].is_zero() {
                f64::INFINITY
            } else {
                to_f64(&(w[1].abs() / w[0].abs()))
            };
            return Ok(Certificate::refuted(
                name,
                Witness::new(
                    *label,
                    format!("E^-1 image of the ray has |w2|/|w1| = {ratio} >= alpha = {alpha}"),
                )
                .with_vector([to_f64(&ray[0]), to_f64(&ray[1])])
                .values(ratio, alpha),
            ));
        }
        let ratio = w[1].abs() / w[0].abs();
        if ratio > worst_ratio {
            worst_ratio = ratio;
        }
    }
    // On u = (s, 1), |s| ≤ 1/α, the factors A = αw₁ − w₂ and B = αw₁ + w₂
    // are affine; A·B > 0 on the whole segment iff neither changes sign.
    let inv = Q::one() / &a;
    let factor = |s: &Q, plus: bool| -> Q {
        let w1 = qi(adj[0][0]) * s + qi(adj[0][1]);
        let w2 = qi(adj[1][0]) * s + qi(adj[1][1]);
        if plus {
            &a * w1 + w2
        } else {
            &a * w1 - w2
        }
    };
    for plus in [false, true] {
        let lo = factor(&-inv.clone(), plus);
        let hi = factor(&inv, plus);
        if lo.signum() != hi.signum() {
            // Zero of the affine factor inside the cone: a non-included ray.
            let s = &lo * (&inv + &inv) / (&lo - &hi) - &inv;
            return Ok(Certificate::refuted(
                name,
                Witness::new("cone-interior", "a ray inside the vertical cone maps to the horizontal cone boundary")
                    .with_vector([to_f64(&s), 1.0]),
            ));
        }
    }
    Ok(Certificate::proven(name).with_margin("alpha_minus_worst_slope", alpha - to_f64(&worst_ratio)))
}

/// Smallest α in `candidates` (scanned in increasing order) that is admissible.
pub fn alpha_scan(e: &IntegerMatrix2, candidates: &[f64]) -> Result<Option<f64>> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(f64::total_cmp);
    for a in sorted {
        if admissible_alpha(e, a)?.is_proven() {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Bisection for the infimum of admissible α to absolute tolerance `tol`,
/// returning an admissible upper end. `None` if nothing up to 2⁴⁰ passes.
pub fn minimal_alpha(e: &IntegerMatrix2, tol: f64) -> Result<Option<f64>> {
    let mut hi = 2.0;
    while !admissible_alpha(e, hi)?.is_proven() {
        hi *= 2.0;
        if hi > 1.1e12 {
            return Ok(None);
        }
    }
    let mut lo = 1.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if admissible_alpha(e, mid)?.is_proven() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeConstants {
    pub alpha: f64,
    pub e_v: f64,
    pub e_h: f64,
    /// Max-norm unit vectors attaining the two infima.
    pub e_v_argmin: Vec2,
    pub e_h_argmin: Vec2,
    /// Exact values rendered as "num/den" (α is taken as its exact binary value).
    pub e_v_exact: String,
    pub e_h_exact: String,
}

/// Minimum of max(|w₁|, |w₂|) for w = adj·(p + s·q), s ∈ [lo, hi].
///
/// The objective is convex and piecewise linear in s, so the minimum sits at
/// an endpoint, a zero of a coordinate, or where |w₁| = |w₂|.
fn segment_min(adj: &[[i64; 2]; 2], p: [Q; 2], q: [Q; 2], lo: Q, hi: Q) -> (Q, Q) {
    let lin = |row: usize| -> (Q, Q) {
        let c0 = qi(adj[row][0]) * &p[0] + qi(adj[row][1]) * &p[1];
        let c1 = qi(adj[row][0]) * &q[0] + qi(adj[row][1]) * &q[1];
        (c0, c1)
    };
    let (a0, a1) = lin(0);
    let (b0, b1) = lin(1);
    let mut candidates = vec![lo.clone(), hi.clone()];
    let mut root = |c0: Q, c1: Q| {
        if !c1.is_zero() {
            let s = -c0 / c1;
            if s >= lo && s <= hi {
                candidates.push(s);
            }
        }
    };
    root(a0.clone(), a1.clone());
    root(b0.clone(), b1.clone());
    root(&a0 - &b0, &a1 - &b1);
    root(&a0 + &b0, &a1 + &b1);
    let mut best: Option<(Q, Q)> = None;
    for s in candidates {
        let w1 = (&a0 + &a1 * &s).abs();
        let w2 = (&b0 + &b1 * &s).abs();
        let v = if w1 > w2 { w1 } else { w2 };
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, s));
        }
    }
    best.expect("at least the endpoints are candidates")
}

/// e_v and e_h: infima of ‖E⁻¹u‖_max over max-norm unit u in each cone.
pub fn cone_norm_constants(e: &IntegerMatrix2, alpha: f64) -> Result<ConeConstants> {
    if !admissible_alpha(e, alpha)?.is_proven() {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} is not admissible for {e}"
        )));
    }
    Ok(cone_norm_constants_unchecked(e, alpha))
}

/// Same minimization without the admissibility precondition (α > 1 only).
pub fn cone_norm_constants_unchecked(e: &IntegerMatrix2, alpha: f64) -> ConeConstants {
    let adj = e.adjugate();
    let det = qi(e.det()).abs();
    let a = from_f64(alpha);
    let inv = Q::one() / &a;
    let (one, zero) = (Q::one(), Q::zero());
    let vertical = [one.clone(), zero.clone()];
    let horizontal = [zero.clone(), one.clone()];
    let e1 = [one.clone(), zero.clone()];
    let e2 = [zero.clone(), one.clone()];

    // Vertical cone closure: u = (s, 1), |s| ≤ 1/α.
    let (v_val, v_s) = segment_min(&adj, e2.clone(), vertical.clone(), -inv.clone(), inv.clone());
    let e_v = v_val / &det;

    // Horizontal cone: u = (1, s), |s| ≤ 1; u = (s, 1), 1/α ≤ |s| ≤ 1.
    let segments = [
        (e1.clone(), horizontal.clone(), -one.clone(), one.clone(), true),
        (e2.clone(), vertical.clone(), inv.clone(), one.clone(), false),
        (e2.clone(), vertical.clone(), -one.clone(), -inv.clone(), false),
    ];
    let mut best: Option<(Q, Vec2)> = None;
    for (p, q, lo, hi, first_axis) in segments {
        let (val, s) = segment_min(&adj, p, q, lo, hi);
        let u = if first_axis { [1.0, to_f64(&s)] } else { [to_f64(&s), 1.0] };
        if best.as_ref().is_none_or(|(bv, _)| val < *bv) {
            best = Some((val, u));
        }
    }
    let (h_val, h_u) = best.expect("three segments");
    let e_h = h_val / &det;
    ConeConstants {
        alpha,
        e_v: to_f64(&e_v),
        e_h: to_f64(&e_h),
        e_v_argmin: [to_f64(&v_s), 1.0],
        e_h_argmin: h_u,
        e_v_exact: crate::exact::render(&e_v),
        e_h_exact: crate::exact::render(&e_h),
    }
}
