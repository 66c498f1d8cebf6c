//! Exact rational evaluation of the counting floors, the vertical ratio
//! p(τ₂), the exponent coefficients I₁, I₂, J and the §3 thresholds.
//!
//! Nothing in this module touches floating point.

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::exact::{render, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

fn qn(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// ⌊(τ₂ − 1)/2⌋.
pub fn half_floor(tau2: u64) -> i64 {
    ((tau2 - 1) / 2) as i64
}

fn check_tau2(tau2: u64) -> Result<()> {
    if tau2 < 3 {
        return Err(Error::InvalidInput(format!("tau2 = {tau2} < 3")));
    }
    Ok(())
}

/// The τ₂-only floors v₁(τ₂), v₂(τ₂).
fn floors_tau2(tau2: u64) -> (BigInt, BigInt) {
    let t = BigInt::from(tau2);
    let h = BigInt::from(half_floor(tau2));
    let one = BigInt::one();
    let tm = &t - &one;
    let v1 = tm.pow(3) + &tm * (BigInt::from(3) * &h + &one) - &h * &h;
    let v2 = &v1 - (&tm - &h).pow(3);
    (v1, v2)
}

/// Vertical-vector floors among the d³ depth-3 pullbacks:
/// v₁ = τ₁³v₁(τ₂) for a vertical start, v₂ = τ₁³v₂(τ₂) for a horizontal one.
pub fn counting_floors(tau1: u64, tau2: u64) -> Result<(BigInt, BigInt)> {
    check_tau2(tau2)?;
    if tau1 == 0 {
        return Err(Error::InvalidInput("tau1 must be positive".into()));
    }
    let (v1, v2) = floors_tau2(tau2);
    let c = BigInt::from(tau1).pow(3);
    Ok((&c * v1, c * v2))
}

/// c = ((τ₂ − 1 − ⌊(τ₂−1)/2⌋)/τ₂)³.
pub fn ratio_c(tau2: u64) -> Q {
    let h = half_floor(tau2);
    let t = tau2 as i64;
    let base = qf(t - 1 - h, t);
    &base * &base * &base
}

/// e = v₂(τ₂)/τ₂³.
pub fn ratio_e(tau2: u64) -> Q {
    let (_, v2) = floors_tau2(tau2);
    Q::new(v2, BigInt::from(tau2).pow(3))
}

/// p(τ₂) = v₂/(τ₂³ − (v₁ − v₂)).
pub fn ratio_p(tau2: u64) -> Result<Q> {
    check_tau2(tau2)?;
    let (v1, v2) = floors_tau2(tau2);
    let den = BigInt::from(tau2).pow(3) - (v1 - &v2);
    Ok(Q::new(v2, den))
}

/// N(τ₂) and D(τ₂) with p = 1 + N/D.
pub fn n_and_d(tau2: u64) -> (BigInt, BigInt) {
    let t = BigInt::from(tau2);
    let h = BigInt::from(half_floor(tau2));
    let one = BigInt::one();
    let n = BigInt::from(-3) * &t * &t + BigInt::from(3) * &t - &one + (&t - &one) * (BigInt::from(3) * &h + &one) - &h * &h;
    let d = t.pow(3) - (&t - &one - &h).pow(3);
    (n, d)
}

/// All coefficients attached to (τ₁, τ₂).
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatoricsTable {
    pub tau1: u64,
    pub tau2: u64,
    pub v1: BigInt,
    pub v2: BigInt,
    pub vv_d: Q,
    pub vh_d: Q,
    pub vv_d2: Q,
    pub vh_d2: Q,
    pub c: Q,
    pub e: Q,
    pub p: Q,
    pub c1: Q,
    pub c2: Q,
    pub i1: Q,
    pub i2: Q,
    pub j: Q,
    pub e1: Q,
    pub e2: Q,
    pub e3: Q,
    pub s: Q,
    /// S with E₃ taken literally from its printed second line, which drops
    /// (1 − p)·h·(c₁ − c₂)/τ₂² relative to the expansion of pI₁ + (1−p)I₂.
    pub s_as_printed: Q,
}

impl CombinatoricsTable {
    pub const COLUMNS: [&'static str; 21] = [
        "tau1", "tau2", "v1", "v2", "vv_d", "vh_d", "vv_d2", "vh_d2", "c", "e", "p", "c1", "c2", "I1", "I2", "J", "E1",
        "E2", "E3", "S", "S_as_printed",
    ];

    /// Values rendered as "num/den" (integers without a slash).
    pub fn rendered(&self) -> Vec<String> {
        let mut out = vec![self.tau1.to_string(), self.tau2.to_string(), self.v1.to_string(), self.v2.to_string()];
        for q in [
            &self.vv_d, &self.vh_d, &self.vv_d2, &self.vh_d2, &self.c, &self.e, &self.p, &self.c1, &self.c2, &self.i1,
            &self.i2, &self.j, &self.e1, &self.e2, &self.e3, &self.s, &self.s_as_printed,
        ] {
            out.push(render(q));
        }
        out
    }
}

pub fn coefficient_table(tau1: u64, tau2: u64) -> Result<CombinatoricsTable> {
    check_tau2(tau2)?;
    if tau1 == 0 || tau2 % tau1 != 0 {
        return Err(Error::InvalidInput(format!("tau1 = {tau1} must divide tau2 = {tau2}")));
    }
    let (v1, v2) = counting_floors(tau1, tau2)?;
    let h = half_floor(tau2);
    let (t1, t2) = (tau1 as i64, tau2 as i64);
    let d = qn(t1 * t2);
    let d2 = &d * &d;
    let vv_d = qn(t1 * (t2 - 1));
    let vh_d = qn(t1 * h);
    let vv_d2 = qn(t1 * t1 * ((t2 - 1) * (t2 - 1) + h));
    let vh_d2 = qn(t1 * t1 * (h * (2 * t2 - 1 - h) + h));
    let c = ratio_c(tau2);
    let e = ratio_e(tau2);
    let p = ratio_p(tau2)?;
    let c1 = Q::one() - qf(1, t2);
    let c2 = -(Q::one() - qf(h, t2));
    let gap = &c1 - &c2;
    let tail = (qn(2) * &d2 - Q::one()) / &d2 * &c2 - Q::one() / (&d2 * qn(t2));
    let i1 = &c1 + &gap * (&vv_d / &d + &vv_d2 / &d2) + &tail;
    let i2 = &c2 + &gap * (&vh_d / &d + &vh_d2 / &d2) + &tail;
    let j = &p * &i1 + (Q::one() - &p) * &i2;
    let e1 = &p * &gap;
    let e2 = &gap * qf(1, t2) * (&p * qn(t2 - 1 - h) + qn(h));
    let tt = qf(1, t2 * t2);
    let e3 = &gap * &tt * (&p * qn((t2 - 1) * (t2 - 1) - h * (2 * t2 - 1 - h)) + qn(h * (2 * t2 - h)));
    let e3_printed =
        &gap * &tt * (&p * qn((t2 - 1) * (t2 - 1) - h * (2 * (t2 - 1) - h)) + qn(h * (2 * t2 - 1 - h)));
    let three_c2 = qn(3) * &c2;
    let s = &e1 + &e2 + &e3 + &three_c2;
    let s_as_printed = &e1 + &e2 + &e3_printed + &three_c2;
    Ok(CombinatoricsTable {
        tau1,
        tau2,
        v1,
        v2,
        vv_d,
        vh_d,
        vv_d2,
        vh_d2,
        c,
        e,
        p,
        c1,
        c2,
        i1,
        i2,
        j,
        e1,
        e2,
        e3,
        s,
        s_as_printed,
    })
}

/// p(τ₂) > 1/2 on 3..=max and p(τ₂) > 2/3 on 5..=max.
pub fn certify_p_bounds(tau2_max: u64) -> Result<Certificate> {
    check_tau2(tau2_max)?;
    let half = qf(1, 2);
    let two_thirds = qf(2, 3);
    let mut worst_half: Option<Q> = None;
    let mut worst_two_thirds: Option<Q> = None;
    for tau2 in 3..=tau2_max {
        let p = ratio_p(tau2)?;
        let m = &p - &half;
        if !m.is_positive() {
            return Ok(refute_p(tau2, &p, "p(tau2) > 1/2"));
        }
        if worst_half.as_ref().is_none_or(|w| &m < w) {
            worst_half = Some(m);
        }
        if tau2 >= 5 {
            let m = &p - &two_thirds;
            if !m.is_positive() {
                return Ok(refute_p(tau2, &p, "p(tau2) > 2/3 for tau2 >= 5"));
            }
            if worst_two_thirds.as_ref().is_none_or(|w| &m < w) {
                worst_two_thirds = Some(m);
            }
        }
    }
    let mut cert = Certificate::proven("p_bounds")
        .with_margin("min_p_minus_half", crate::exact::to_f64(worst_half.as_ref().expect("range non-empty")))
        .with_note(format!("exhaustive exact scan over 3..={tau2_max}"));
    if let Some(w) = worst_two_thirds {
        cert = cert
            .with_margin("min_p_minus_two_thirds", crate::exact::to_f64(&w))
            .with_note(format!("min p - 2/3 = {}", render(&w)));
    }
    Ok(cert)
}

fn refute_p(tau2: u64, p: &Q, check: &str) -> Certificate {
    Certificate::refuted(
        "p_bounds",
        Witness::new(check, format!("tau2 = {tau2}, p = {}", render(p))).values(crate::exact::to_f64(p), 0.0),
    )
}

/// One row of the S/J scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SjRow {
    pub tau2: u64,
    pub s: String,
    pub j: String,
}

/// S(τ₂) > 0 and J(τ₂) > 0 (τ₁ = 1) on 3..=max.
///
/// For τ₁ > 1 the difference J − S = −(c₂ + 1/τ₂)/d² is still positive, so
/// S > 0 covers every τ₁.
pub fn certify_j_positive(tau2_max: u64) -> Result<(Certificate, Vec<SjRow>)> {
    check_tau2(tau2_max)?;
    let mut rows = Vec::with_capacity(tau2_max as usize);
    let mut min_s: Option<Q> = None;
    for tau2 in 3..=tau2_max {
        let tb = coefficient_table(1, tau2)?;
        rows.push(SjRow {
            tau2,
            s: render(&tb.s),
            j: render(&tb.j),
        });
        for (name, v) in [("S(tau2) > 0", &tb.s), ("J(tau2) > 0", &tb.j)] {
            if !v.is_positive() {
                let cert = Certificate::refuted(
                    "j_positive",
                    Witness::new(name, format!("tau2 = {tau2}, S = {}, J = {}", render(&tb.s), render(&tb.j)))
                        .values(crate::exact::to_f64(v), 0.0),
                );
                return Ok((cert, rows));
            }
        }
        if min_s.as_ref().is_none_or(|m| &tb.s < m) {
            min_s = Some(tb.s);
        }
    }
    let min_s = min_s.expect("range non-empty");
    let cert = Certificate::proven("j_positive")
        .with_margin("min_S", crate::exact::to_f64(&min_s))
        .with_note(format!("exhaustive exact scan over 3..={tau2_max}; min S = {}", render(&min_s)));
    Ok((cert, rows))
}

/// Status of the two intermediate bounds 0 > N > −2τ₂² and D ≥ 4(τ₂²+2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NdBounds {
    pub n_bound_failures: Vec<u64>,
    pub d_bound_failures: Vec<u64>,
}

pub fn nd_bounds(tau2_lo: u64, tau2_hi: u64) -> NdBounds {
    let mut out = NdBounds {
        n_bound_failures: Vec::new(),
        d_bound_failures: Vec::new(),
    };
    for tau2 in tau2_lo.max(3)..=tau2_hi {
        let (n, d) = n_and_d(tau2);
        let t = BigInt::from(tau2);
        if !(n < BigInt::zero() && n > BigInt::from(-2) * &t * &t) {
            out.n_bound_failures.push(tau2);
        }
        if d < BigInt::from(4) * (&t * &t + BigInt::from(2)) {
            out.d_bound_failures.push(tau2);
        }
    }
    out
}

/// A quantity c·t^k recorded symbolically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TPower {
    pub name: String,
    pub coefficient: String,
    pub exponent: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub m: i64,
    pub delta0: String,
    pub lhs: String,
    pub rhs: String,
    pub qualifies: bool,
    /// ⌊(1 + 7δ₀)/(28δ₀)⌋.
    pub big_t: String,
    /// (1 − 7δ₀)/(1 + 7δ₀).
    pub measure_bound: String,
    pub powers: Vec<TPower>,
}

/// (⌊(m−1)/2⌋ − 1)/(⌊(m−1)/2⌋ + 1) > 1 − δ₀, plus the t-power constants.
pub fn theorem_b_thresholds(m: i64, delta0: &Q) -> Result<ThresholdReport> {
    if m < 3 {
        return Err(Error::InvalidInput(format!("m = {m} < 3")));
    }
    if !(delta0.is_positive() && delta0 < &Q::one()) {
        return Err(Error::InvalidInput(format!("delta0 = {} must lie in (0,1)", render(delta0))));
    }
    let h = (m - 1) / 2;
    let lhs = qf(h - 1, h + 1);
    let rhs = Q::one() - delta0;
    let seven = qn(7) * delta0;
    let big_t = ((Q::one() + &seven) / (qn(28) * delta0)).floor();
    let measure_bound = (Q::one() - &seven) / (Q::one() + &seven);
    let pw = |name: &str, c: &str, k: &str| TPower {
        name: name.into(),
        coefficient: c.into(),
        exponent: k.into(),
    };
    Ok(ThresholdReport {
        m,
        delta0: render(delta0),
        qualifies: lhs > rhs,
        lhs: render(&lhs),
        rhs: render(&rhs),
        big_t: render(&big_t),
        measure_bound: render(&measure_bound),
        powers: vec![
            pw("delta", "2", "-3/10"),
            pw("r", "1", "-7"),
            pw("theta1", "1", "-2/5"),
            pw("theta2", "1", "-3/5"),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floors_examples() {
        let (v1, v2) = counting_floors(1, 3).unwrap();
        assert_eq!((v1, v2), (BigInt::from(15), BigInt::from(14)));
        let (v1, v2) = counting_floors(1, 5).unwrap();
        assert_eq!((v1, v2), (BigInt::from(88), BigInt::from(80)));
        let (a, b) = counting_floors(1, 4).unwrap();
        let (c, d) = counting_floors(2, 4).unwrap();
        assert_eq!((c, d), (a * 8, b * 8));
    }

    #[test]
    fn p_examples() {
        assert_eq!(ratio_p(3).unwrap(), qf(7, 13));
        assert_eq!(ratio_p(5).unwrap(), qf(80, 117));
        let p4 = ratio_p(4).unwrap();
        assert!(p4 > qf(1, 2) && p4 < qf(2, 3), "p(4) = {}", render(&p4));
        assert_eq!(ratio_c(3), qf(1, 27));
        assert_eq!(ratio_e(3), qf(14, 27));
    }

    #[test]
    fn reference_table() {
        let t = coefficient_table(1, 3).unwrap();
        assert_eq!((t.c1.clone(), t.c2.clone()), (qf(2, 3), qf(-2, 3)));
        assert_eq!(t.i1, Q::one());
        assert_eq!(t.i2, qf(-7, 9));
        assert_eq!(t.j, qf(7, 39));
        assert_eq!(t.s, qf(50, 351));
        assert_eq!(&t.j - &t.s, qf(1, 27));
        assert_eq!(t.s_as_printed, qf(26, 351));
    }

    #[test]
    fn identities_over_range() {
        for tau2 in 3..200u64 {
            let p = ratio_p(tau2).unwrap();
            assert_eq!(p, ratio_e(tau2) / (Q::one() - ratio_c(tau2)));
            let (n, d) = n_and_d(tau2);
            assert_eq!(p, Q::one() + Q::new(n, d));
            for tau1 in [1u64, 2, 3] {
                if tau2 % tau1 != 0 {
                    continue;
                }
                let t = coefficient_table(tau1, tau2).unwrap();
                let d = qn((tau1 * tau2) as i64);
                assert_eq!(t.j, &t.s - (&t.c2 + qf(1, tau2 as i64)) / (&d * &d));
                let gap = &t.c1 - &t.c2;
                let lhs = &t.i1 - &t.i2;
                let rhs = &gap * (Q::one() + (&t.vv_d - &t.vh_d) / &d + (&t.vv_d2 - &t.vh_d2) / (&d * &d));
                assert_eq!(lhs, rhs);
                let h = qn(half_floor(tau2) as i64);
                let drop = (Q::one() - &t.p) * h * gap / qn((tau2 * tau2) as i64);
                assert_eq!(&t.s - &t.s_as_printed, drop);
            }
        }
    }

    #[test]
    fn certificates_small_range() {
        assert!(certify_p_bounds(500).unwrap().is_proven());
        let (c, rows) = certify_j_positive(200).unwrap();
        assert!(c.is_proven());
        assert_eq!(rows[0].s, "50/351");
        assert_eq!(rows.len(), 198);
    }

    #[test]
    fn nd_bound_status() {
        let r = nd_bounds(3, 1000);
        assert!(r.n_bound_failures.is_empty());
        assert_eq!(r.d_bound_failures, vec![3, 4]);
    }

    #[test]
    fn thresholds() {
        let r = theorem_b_thresholds(41, &qf(1, 10)).unwrap();
        assert!(r.qualifies);
        assert_eq!(r.lhs, "19/21");
        let r = theorem_b_thresholds(41, &qf(1, 1000)).unwrap();
        assert_eq!(r.big_t, "35");
        let r = theorem_b_thresholds(5, &qf(1, 10)).unwrap();
        assert!(!r.qualifies);
        assert_eq!(r.lhs, "1/3");
        assert!(theorem_b_thresholds(41, &Q::one()).is_err());
    }

    proptest! {
        #[test]
        fn p_strictly_between_half_and_one(tau2 in 3u64..5000) {
            let p = ratio_p(tau2).unwrap();
            prop_assert!(p > qf(1, 2) && p < Q::one());
        }
    }
}
