//! Certificate that no point of 𝒞 has its next two images in 𝒞.
//!
//! Write u = f_x(x, y). Then f(x, y) = (u, (e22(u + i) − det·x)/e12) for an
//! integer i, so the x-coordinate of f²(x, y) is
//!
//!   g(x, u) = tr·u − det·x + e12·t·s(u)  (mod 1),
//!
//! which does not involve y. For fixed x the map y ↦ u covers the circle, so
//! 𝒞 ∩ f⁻¹𝒞 ∩ f⁻²𝒞 is empty exactly when g avoids 𝒞_x on 𝒞_x × 𝒞_x. The
//! check subdivides that product of windows with interval enclosures of g.

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::map::{MapSpec, TorusPoint};
use crate::profile::{Region, ShearProfile};

pub const DEFAULT_MAX_DEPTH: u32 = 18;
const DEFAULT_MAX_BOXES: u64 = 20_000_000;

#[derive(Debug, Clone, Copy)]
struct Cell {
    x: Interval,
    u: Interval,
    depth: u32,
}

/// Gap between a real interval and the lifted critical windows, or `None`
/// when they meet.
fn gap_to_critical(p: &ShearProfile, g: Interval) -> Option<f64> {
    if g.width() >= 1.0 {
        return None;
    }
    let d = p.delta();
    let mut gap = f64::INFINITY;
    let first = g.lo.floor() as i64 - 1;
    let last = g.hi.floor() as i64 + 1;
    for n in first..=last {
        for &c in p.critical_points() {
            let (lo, hi) = (c + n as f64 - d, c + n as f64 + d);
            if lo <= g.hi && g.lo <= hi {
                return None;
            }
            gap = gap.min((lo - g.hi).max(g.lo - hi));
        }
    }
    Some(gap)
}

struct Checker<'a> {
    spec: &'a MapSpec,
    tr: f64,
    det: f64,
    e12t: f64,
}

impl Checker<'_> {
    fn g_point(&self, x: f64, u: f64) -> f64 {
        self.tr * u - self.det * x + self.e12t * self.spec.profile().eval_s(u)
    }

    fn g_enclosure(&self, c: &Cell) -> Interval {
        let p = self.spec.profile();
        let (slo, shi) = p.s_range(c.u.lo, c.u.hi);
        let pad = 1e-12 * (1.0 + p.slope_ceil());
        let s = Interval::new(slo, shi).inflate(pad);
        c.u.scale(self.tr) - c.x.scale(self.det) + s.scale(self.e12t)
    }

    fn defect(&self, x: f64, u: f64) -> f64 {
        let p = self.spec.profile();
        p.distance_to_critical_region(x) + p.distance_to_critical_region(u) + p.distance_to_critical_region(self.g_point(x, u))
    }

    /// Lift (x, u) to a torus point and confirm the triple membership by
    /// plain forward evaluation.
    fn verify(&self, x: f64, u: f64) -> Option<TorusPoint> {
        let e = self.spec.matrix();
        let p = self.spec.profile();
        let y = (u - e.e11() as f64 * x) / e.e12() as f64 - self.spec.t() * p.eval_s(x);
        let p0 = TorusPoint::new(x, y);
        let p1 = self.spec.apply(p0);
        let p2 = self.spec.apply(p1);
        let all = [p0, p1, p2].iter().all(|q| p.classify_point(q.as_array()).region == Region::Critical);
        all.then_some(p0)
    }

    /// Compass search on the summed distance to 𝒞 from (x, u).
    fn search(&self, mut x: f64, mut u: f64, scale: f64) -> Option<TorusPoint> {
        let mut f = self.defect(x, u);
        let mut h = scale;
        let mut iters = 0;
        while h > 1e-15 * scale.max(1e-300) && iters < 20_000 {
            iters += 1;
            if f == 0.0 {
                if let Some(p) = self.verify(x, u) {
                    return Some(p);
                }
            }
            let mut moved = false;
            for (dx, du) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                let v = self.defect(x + dx, u + du);
                if v < f {
                    x += dx;
                    u += du;
                    f = v;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        if f == 0.0 {
            self.verify(x, u)
        } else {
            None
        }
    }
}

pub fn triple_critical_check(spec: &MapSpec, max_depth: u32) -> Result<Certificate> {
    triple_critical_check_with_budget(spec, max_depth, DEFAULT_MAX_BOXES)
}

pub fn triple_critical_check_with_budget(spec: &MapSpec, max_depth: u32, max_boxes: u64) -> Result<Certificate> {
    let e = spec.matrix();
    let p = spec.profile();
    if !(p.delta() > 0.0) {
        return Err(Error::Precondition("critical region is empty (delta = 0)".into()));
    }
    if e.e12() == 0 {
        return Err(Error::Precondition("triple-critical check needs e12 != 0".into()));
    }
    let ck = Checker {
        spec,
        tr: e.trace() as f64,
        det: e.det() as f64,
        e12t: e.e12() as f64 * spec.t(),
    };
    let d = p.delta();
    let windows: Vec<Interval> = p.critical_points().iter().map(|&c| Interval::new(c - d, c + d)).collect();
    let mut stack: Vec<Cell> = Vec::new();
    for wx in &windows {
        for wu in &windows {
            stack.push(Cell { x: *wx, u: *wu, depth: 0 });
        }
    }
    let mut processed: u64 = 0;
    let mut deepest = 0;
    let mut min_gap = f64::INFINITY;
    let mut undecided: Vec<Cell> = Vec::new();
    while let Some(c) = stack.pop() {
        processed += 1;
        if processed > max_boxes {
            return Ok(Certificate::unknown(
                "triple_critical",
                format!("box budget exhausted with {} boxes pending", stack.len() + 1),
                max_boxes,
            ));
        }
        deepest = deepest.max(c.depth);
        let g = ck.g_enclosure(&c);
        if let Some(gap) = gap_to_critical(p, g) {
            min_gap = min_gap.min(gap);
            continue;
        }
        let (xm, um) = (c.x.mid(), c.u.mid());
        if ck.defect(xm, um) == 0.0 {
            if let Some(w) = ck.verify(xm, um) {
                return Ok(refuted(spec, w));
            }
        }
        if c.depth >= max_depth {
            undecided.push(c);
            continue;
        }
        let wx = ck.det.abs() * c.x.width();
        let wu = (ck.tr.abs() + ck.e12t.abs() * p.s_prime_abs_bound(c.u.lo, c.u.hi)) * c.u.width();
        let depth = c.depth + 1;
        if wx >= wu {
            let (a, b) = c.x.split();
            stack.push(Cell { x: b, u: c.u, depth });
            stack.push(Cell { x: a, u: c.u, depth });
        } else {
            let (a, b) = c.u.split();
            stack.push(Cell { x: c.x, u: b, depth });
            stack.push(Cell { x: c.x, u: a, depth });
        }
    }
    if undecided.is_empty() {
        return Ok(Certificate::proven("triple_critical")
            .with_margin("min_gap_to_critical", min_gap)
            .with_margin("boxes", processed as f64)
            .with_margin("max_depth_used", deepest as f64));
    }
    let stride = (undecided.len() / 64).max(1);
    for c in undecided.iter().step_by(stride) {
        let scale = c.x.width().max(c.u.width());
        if let Some(w) = ck.search(c.x.mid(), c.u.mid(), scale) {
            return Ok(refuted(spec, w));
        }
    }
    Ok(Certificate::unknown(
        "triple_critical",
        format!("{} boxes undecided at depth {max_depth}; local search found no witness", undecided.len()),
        processed,
    ))
}

fn refuted(spec: &MapSpec, w: TorusPoint) -> Certificate {
    let f1 = spec.apply(w);
    let f2 = spec.apply(f1);
    Certificate::refuted(
        "triple_critical",
        Witness::new(
            "C ∩ f⁻¹C ∩ f⁻²C = ∅",
            format!("f(p) = ({:.17}, {:.17}), f²(p) = ({:.17}, {:.17})", f1.x, f1.y, f2.x, f2.y),
        )
        .at(w.as_array()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix2;
    use crate::map::DeltaMode;
    use rand::{Rng, SeedableRng};

    fn spec(t: f64, s0: [i64; 2], delta: DeltaMode) -> MapSpec {
        let e = IntegerMatrix2::new(3, 4, 0, 1).unwrap();
        MapSpec::theorem_a(e, 1.0, 2.2, delta, s0, t).unwrap()
    }

    #[test]
    fn reduction_matches_forward_map() {
        let sp = spec(37.0, [1, 3], DeltaMode::Default);
        let ck = Checker { spec: &sp, tr: 4.0, det: 3.0, e12t: 4.0 * 37.0 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = TorusPoint::new(rng.gen(), rng.gen());
            let p1 = sp.apply(p);
            let p2 = sp.apply(p1);
            let g = ck.g_point(p.x, p1.x);
            let diff = (g - p2.x).rem_euclid(1.0);
            assert!(diff.min(1.0 - diff) < 1e-8, "{g} vs {}", p2.x);
        }
    }

    #[test]
    fn integer_t_with_half_anchor_has_fixed_critical_point() {
        // (0, 0) ↦ (4·t/2, t/2) ≡ (0, 0) for even t.
        let sp = spec(1000.0, [1, 2], DeltaMode::Adapted);
        let cert = triple_critical_check(&sp, 12).unwrap();
        assert!(cert.is_refuted(), "{cert:?}");
        let w = cert.witness().unwrap().point.unwrap();
        let p0 = TorusPoint::new(w[0], w[1]);
        for q in [p0, sp.apply(p0), sp.iterate(p0, 2)] {
            assert_eq!(sp.profile().classify_x(q.x).region, Region::Critical);
        }
    }

    #[test]
    fn reference_third_anchor_is_proven() {
        let sp = spec(1000.0, [1, 3], DeltaMode::Adapted);
        let cert = triple_critical_check(&sp, DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.is_proven(), "{cert:?}");
    }

    #[test]
    fn wide_windows_are_refuted_or_unknown() {
        let sp = spec(1000.0, [1, 3], DeltaMode::Default);
        let cert = triple_critical_check(&sp, 10).unwrap();
        assert!(!cert.is_proven());
    }

    #[test]
    fn gap_helper() {
        let p = ShearProfile::build(3, 1.0, 2.2, 0.01, [1, 3]).unwrap();
        assert!(gap_to_critical(&p, Interval::new(0.1, 0.2)).is_some());
        assert!(gap_to_critical(&p, Interval::new(0.2, 0.245)).is_none());
        assert!(gap_to_critical(&p, Interval::new(-0.005, 0.001)).is_none());
        assert!(gap_to_critical(&p, Interval::new(5.1, 6.5)).is_none());
    }
}
