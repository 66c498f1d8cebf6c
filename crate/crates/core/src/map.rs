//! The endomorphism f_t = E ∘ h_t of T², with h_t(x, y) = (x, y + t·s(x)).

use crate::certificate::{Certificate, Witness};
use crate::error::{Error, Result};
use crate::lattice::{preimage_lattice, IntegerMatrix2, PreimageLattice};
use crate::linalg::{Mat2, Vec2};
use crate::profile::{default_delta, Region, ShearProfile};
use serde::{Deserialize, Serialize};

/// Default leaf budget for preimage trees.
pub const DEFAULT_TREE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

impl TorusPoint {
    /// Reduce (x, y) into [0,1)².
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint { x: wrap(x), y: wrap(y) }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Max-norm distance on the torus.
    pub fn distance(&self, o: &TorusPoint) -> f64 {
        crate::profile::circle_distance(self.x, o.x).max(crate::profile::circle_distance(self.y, o.y))
    }
}

/// x mod 1 in [0, 1), guarding against `rem_euclid` returning 1.0.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// How the critical-window half-width δ is chosen for a Theorem A spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum DeltaMode {
    /// 1/(4τ₂(τ₂+1)).
    Default,
    Fixed(f64),
    /// min(default, 1/(64(1 + |e12|·t·b))): the image of a window under one
    /// step of the shear stays well inside a period.
    Adapted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MapSpecDoc {
    matrix: IntegerMatrix2,
    profile: ShearProfile,
    t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MapSpecDoc", try_from = "MapSpecDoc")]
pub struct MapSpec {
    e: IntegerMatrix2,
    profile: ShearProfile,
    t: f64,
    lattice: PreimageLattice,
    offsets: Vec<Vec2>,
    e_f: Mat2,
    e_inv: Mat2,
}

impl From<MapSpec> for MapSpecDoc {
    fn from(m: MapSpec) -> Self {
        MapSpecDoc { matrix: m.e, profile: m.profile, t: m.t }
    }
}

impl TryFrom<MapSpecDoc> for MapSpec {
    type Error = Error;
    fn try_from(d: MapSpecDoc) -> Result<Self> {
        MapSpec::new(d.matrix, d.profile, d.t)
    }
}

impl MapSpec {
    pub fn new(e: IntegerMatrix2, profile: ShearProfile, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("t = {t} must be a finite non-negative real")));
        }
        let lattice = preimage_lattice(&e);
        let offsets = lattice.offsets_f64();
        Ok(MapSpec {
            e_f: e.to_mat2(),
            e_inv: e.inverse_mat2(),
            e,
            profile,
            t,
            lattice,
            offsets,
        })
    }

    /// Theorem A spec: profile with τ₂ taken from E.
    pub fn theorem_a(
        e: IntegerMatrix2,
        a0: f64,
        kappa: f64,
        delta: DeltaMode,
        s0: [i64; 2],
        t: f64,
    ) -> Result<Self> {
        crate::lattice::check_theorem_a_admissible(&e)?;
        let tau2 = e.tau2() as u32;
        let base = default_delta(tau2);
        let d = match delta {
            DeltaMode::Default => base,
            DeltaMode::Fixed(v) => v,
            DeltaMode::Adapted => {
                // b does not depend on δ, so a probe profile gives it.
                let probe = ShearProfile::build(tau2, a0, kappa, base, s0)?;
                let b = probe.slope_ceil();
                base.min(1.0 / (64.0 * (1.0 + e.e12().unsigned_abs() as f64 * t * b)))
            }
        };
        let profile = ShearProfile::build(tau2, a0, kappa, d, s0)?;
        MapSpec::new(e, profile, t)
    }

    /// §3 family E = [[m, k(m−1)], [0, 1]] with the two-critical-point profile.
    pub fn section3(m: i64, k: i64, t: f64, slope_fraction: f64, s0: [i64; 2]) -> Result<Self> {
        let e = IntegerMatrix2::new(m, k * (m - 1), 0, 1)?;
        let profile = ShearProfile::section3(m, k, t, slope_fraction, s0)?;
        MapSpec::new(e, profile, t)
    }

    pub fn matrix(&self) -> &IntegerMatrix2 {
        &self.e
    }
    pub fn profile(&self) -> &ShearProfile {
        &self.profile
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn degree(&self) -> u64 {
        self.e.degree()
    }
    pub fn lattice(&self) -> &PreimageLattice {
        &self.lattice
    }

    /// Same E and profile, another t.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        MapSpec::new(self.e, self.profile.clone(), t)
    }

    /// f_t on the lift ℝ² (no reduction).
    pub fn apply_lift(&self, p: Vec2) -> Vec2 {
        let y = p[1] + self.t * self.profile.eval_s(p[0]);
        self.e_f.apply([p[0], y])
    }

    pub fn apply(&self, p: TorusPoint) -> TorusPoint {
        let q = self.apply_lift([p.x, p.y]);
        TorusPoint::new(q[0], q[1])
    }

    pub fn iterate(&self, p: TorusPoint, n: usize) -> TorusPoint {
        (0..n).fold(p, |q, _| self.apply(q))
    }

    /// Df_t(x̄) = E·[[1, 0], [t·s′(x), 1]].
    pub fn jacobian(&self, p: TorusPoint) -> Mat2 {
        self.jacobian_at_x(p.x)
    }

    pub fn jacobian_at_x(&self, x: f64) -> Mat2 {
        let ts = self.t * self.profile.eval_s_prime(x);
        let e = &self.e_f;
        Mat2::new(e.a + e.b * ts, e.b, e.c + e.d * ts, e.d)
    }

    /// (Df_t(x̄))⁻¹ = [[1, 0], [−t·s′(x), 1]]·E⁻¹, in closed form.
    pub fn inverse_jacobian(&self, p: TorusPoint) -> Mat2 {
        let ts = self.t * self.profile.eval_s_prime(p.x);
        let m = &self.e_inv;
        Mat2::new(m.a, m.b, m.c - ts * m.a, m.d - ts * m.b)
    }

    /// All d preimages, ordered by lattice offset.
    pub fn preimages(&self, p: TorusPoint) -> Vec<TorusPoint> {
        let mut out = Vec::with_capacity(self.offsets.len());
        self.preimages_into(p, &mut out);
        out
    }

    fn preimages_into(&self, p: TorusPoint, out: &mut Vec<TorusPoint>) {
        out.clear();
        let w = self.e_inv.apply([p.x, p.y]);
        for o in &self.offsets {
            let x = wrap(w[0] + o[0]);
            let y = w[1] + o[1] - self.t * self.profile.eval_s(x);
            out.push(TorusPoint::new(x, y));
        }
    }

    /// The preimage in 𝒢 farthest from 𝒞 and its distance.
    pub fn far_preimage(&self, p: TorusPoint) -> (TorusPoint, f64) {
        self.preimages(p)
            .into_iter()
            .map(|q| (q, self.profile.distance_to_critical_region(q.x)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("degree is at least one")
    }

    pub fn region_counts(&self, p: TorusPoint) -> RegionCounts {
        let mut c = RegionCounts::default();
        for q in self.preimages(p) {
            match self.profile.classify_x(q.x).region {
                Region::Critical => c.critical += 1,
                Region::GoodMinus => c.good_minus += 1,
                Region::GoodPlus => c.good_plus += 1,
            }
        }
        c
    }

    /// Streaming depth-first preimage tree.
    pub fn preimage_tree(&self, root: TorusPoint, depth: usize, budget: u64) -> Result<PreimageTree<'_>> {
        check_budget(self.degree(), depth, budget)?;
        Ok(PreimageTree::new(self, root, depth))
    }

    /// Depth-first fold over the pre-orbit tree with per-node state.
    ///
    /// `step` maps the parent state and a child point to the child state;
    /// `leaf` receives the state at every depth-`depth` node, in tree order.
    /// Returns the number of leaves.
    pub fn walk_tree<S, F, L>(&self, root: TorusPoint, depth: usize, budget: u64, state: S, step: &F, leaf: &mut L) -> Result<u64>
    where
        F: Fn(&S, &TorusPoint) -> S,
        L: FnMut(&S),
    {
        check_budget(self.degree(), depth, budget)?;
        let mut scratch = vec![Vec::with_capacity(self.offsets.len()); depth];
        let mut count = 0;
        self.walk_rec(root, depth, &state, step, leaf, &mut scratch, &mut count);
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk_rec<S, F, L>(&self, p: TorusPoint, left: usize, state: &S, step: &F, leaf: &mut L, scratch: &mut [Vec<TorusPoint>], count: &mut u64)
    where
        F: Fn(&S, &TorusPoint) -> S,
        L: FnMut(&S),
    {
        if left == 0 {
            *count += 1;
            leaf(state);
            return;
        }
        let (level, rest) = scratch.split_first_mut().expect("one buffer per level");
        self.preimages_into(p, level);
        for i in 0..level.len() {
            let q = level[i];
            let s = step(state, &q);
            self.walk_rec(q, left - 1, &s, step, leaf, rest, count);
        }
    }

    /// Map-reduce over the leaves of the pre-orbit tree.
    ///
    /// Depth-one branches run in parallel with the `parallel` feature; the
    /// branch results are combined left to right, so the result does not
    /// depend on scheduling.
    #[allow(clippy::too_many_arguments)]
    pub fn reduce_tree<S, A, F, M, C>(&self, root: TorusPoint, depth: usize, budget: u64, state: S, step: &F, map: &M, zero: A, combine: &C) -> Result<A>
    where
        S: Send + Sync,
        A: Clone + Send + Sync,
        F: Fn(&S, &TorusPoint) -> S + Sync,
        M: Fn(&S) -> A + Sync,
        C: Fn(A, A) -> A + Sync,
    {
        check_budget(self.degree(), depth, budget)?;
        if depth == 0 {
            return Ok(combine(zero, map(&state)));
        }
        let branch = |q: &TorusPoint| -> A {
            let s = step(&state, q);
            let mut acc = Some(zero.clone());
            self.walk_tree(*q, depth - 1, u64::MAX, s, step, &mut |leaf_state: &S| {
                let a = acc.take().expect("accumulator present");
                acc = Some(combine(a, map(leaf_state)));
            })
            .expect("budget already checked");
            acc.expect("accumulator present")
        };
        let children = self.preimages(root);
        #[cfg(feature = "parallel")]
        let parts: Vec<A> = {
            use rayon::prelude::*;
            children.par_iter().map(branch).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<A> = children.iter().map(branch).collect();
        Ok(parts.into_iter().fold(zero, |a, b| combine(a, b)))
    }
}

fn check_budget(d: u64, depth: usize, budget: u64) -> Result<()> {
    let required = (d as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::Budget {
            required: required.min(u64::MAX as u128) as u64,
            budget,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub good_minus: usize,
    pub good_plus: usize,
    pub critical: usize,
}

/// Iterator over the pre-orbits (x̄₀, x̄₁, …, x̄_n), f(x̄_{i+1}) = x̄_i, in
/// depth-first order. Memory is one sibling list per level.
pub struct PreimageTree<'a> {
    spec: &'a MapSpec,
    depth: usize,
    root: TorusPoint,
    levels: Vec<(Vec<TorusPoint>, usize)>,
    started: bool,
    done: bool,
}

impl<'a> PreimageTree<'a> {
    fn new(spec: &'a MapSpec, root: TorusPoint, depth: usize) -> Self {
        PreimageTree {
            spec,
            depth,
            root,
            levels: Vec::with_capacity(depth),
            started: false,
            done: false,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn branching(&self) -> u64 {
        self.spec.degree()
    }

    pub fn root(&self) -> TorusPoint {
        self.root
    }

    fn current(&self, level: usize) -> TorusPoint {
        if level == 0 {
            self.root
        } else {
            let (pts, i) = &self.levels[level - 1];
            pts[*i]
        }
    }

    fn descend(&mut self) {
        while self.levels.len() < self.depth {
            let p = self.current(self.levels.len());
            self.levels.push((self.spec.preimages(p), 0));
        }
    }

    fn path(&self) -> Vec<TorusPoint> {
        (0..=self.depth).map(|l| self.current(l)).collect()
    }
}

impl Iterator for PreimageTree<'_> {
    type Item = Vec<TorusPoint>;

    fn next(&mut self) -> Option<Vec<TorusPoint>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
            if self.depth == 0 {
                self.done = true;
            }
            return Some(self.path());
        }
        loop {
            let Some((pts, i)) = self.levels.last_mut() else {
                self.done = true;
                return None;
            };
            *i += 1;
            if *i < pts.len() {
                break;
            }
            self.levels.pop();
        }
        self.descend();
        Some(self.path())
    }
}

/// Lemma-level distribution check over sample points: each point has at
/// least τ₁⌊(τ₂−1)/2⌋ preimages in each of 𝒢⁻, 𝒢⁺, at most τ₁ in 𝒞, and a
/// preimage at distance > 1/(8(d+1)) from 𝒞.
pub fn check_preimage_distribution(spec: &MapSpec, points: &[TorusPoint]) -> Certificate {
    let tau1 = spec.matrix().tau1() as usize;
    let tau2 = spec.matrix().tau2() as usize;
    let floor = tau1 * ((tau2 - 1) / 2);
    let far_bound = 1.0 / (8.0 * (spec.degree() as f64 + 1.0));
    let mut min_good = usize::MAX;
    let mut max_crit = 0;
    let mut min_far = f64::INFINITY;
    for p in points {
        let c = spec.region_counts(*p);
        min_good = min_good.min(c.good_minus).min(c.good_plus);
        max_crit = max_crit.max(c.critical);
        if c.good_minus < floor || c.good_plus < floor {
            return Certificate::refuted(
                "preimage_distribution",
                Witness::new("good preimage floor", format!("counts {c:?}, floor {floor}"))
                    .at(p.as_array())
                    .values(c.good_minus.min(c.good_plus) as f64, floor as f64),
            );
        }
        if c.critical > tau1 {
            return Certificate::refuted(
                "preimage_distribution",
                Witness::new("critical preimage ceiling", format!("counts {c:?}, ceiling {tau1}"))
                    .at(p.as_array())
                    .values(c.critical as f64, tau1 as f64),
            );
        }
        let (q, dist) = spec.far_preimage(*p);
        min_far = min_far.min(dist);
        if dist <= far_bound {
            return Certificate::refuted(
                "preimage_distribution",
                Witness::new("far preimage", format!("best preimage {:?}", q.as_array()))
                    .at(p.as_array())
                    .values(dist, far_bound),
            );
        }
    }
    Certificate::proven("preimage_distribution")
        .with_margin("good_count_minus_floor", min_good as f64 - floor as f64)
        .with_margin("critical_ceiling_minus_count", tau1 as f64 - max_crit as f64)
        .with_margin("far_distance_minus_bound", min_far - far_bound)
        .with_note(format!("{} sample points", points.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference(t: f64) -> MapSpec {
        let e = IntegerMatrix2::new(3, 4, 0, 1).unwrap();
        MapSpec::theorem_a(e, 1.0, 2.2, DeltaMode::Fixed(0.02), [1, 2], t).unwrap()
    }

    #[test]
    fn linear_at_t_zero() {
        let spec = reference(0.0);
        let p = TorusPoint::new(0.3, 0.7);
        let q = spec.apply(p);
        assert!((q.x - wrap(0.9 + 2.8)).abs() < 1e-15 && (q.y - 0.7).abs() < 1e-15);
        let xs: Vec<f64> = spec.preimages(p).iter().map(|q| q.x).collect();
        let mut sorted = xs.clone();
        sorted.sort_by(f64::total_cmp);
        for w in sorted.windows(2) {
            assert!((w[1] - w[0] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn formula_at_zero() {
        let spec = reference(1.0);
        let q = spec.apply(TorusPoint::new(0.0, 0.2));
        let y = 0.2 + 0.5;
        assert!((q.x - wrap(4.0 * y)).abs() < 1e-14);
        assert!((q.y - wrap(y)).abs() < 1e-14);
    }

    #[test]
    fn jacobian_properties() {
        let spec = reference(1e3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let p = TorusPoint::new(rng.gen(), rng.gen());
            let j = spec.jacobian(p);
            assert!((j.det() - 3.0).abs() < 1e-12 * j.norm_max().powi(2).max(1.0));
            let prod = j.mul(&spec.inverse_jacobian(p));
            assert!((prod.a - 1.0).abs() < 1e-9 && prod.b.abs() < 1e-9 && prod.c.abs() < 1e-6 && (prod.d - 1.0).abs() < 1e-9);
        }
        assert_eq!(spec.jacobian(TorusPoint::new(0.25, 0.1)), spec.matrix().to_mat2());
    }

    #[test]
    fn section3_jacobian_entry() {
        let spec = MapSpec::section3(3, 2, 1e4, 0.8, [1, 3]).unwrap();
        let x = 0.5;
        let sp = spec.profile().eval_s_prime(x);
        let j = spec.jacobian(TorusPoint::new(x, 0.0));
        assert_eq!(j.c, 1e4 * sp);
        assert!((j.a - (3.0 + 4.0 * 1e4 * sp)).abs() < 1e-12);
        assert_eq!((j.b, j.d), (4.0, 1.0));
    }

    #[test]
    fn preimages_round_trip() {
        let spec = reference(1e3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let p = TorusPoint::new(rng.gen(), rng.gen());
            let pre = spec.preimages(p);
            assert_eq!(pre.len(), 3);
            for q in pre {
                assert!(spec.apply(q).distance(&p) < 1e-10);
            }
        }
    }

    #[test]
    fn tree_iterator_and_walk_agree() {
        let spec = reference(10.0);
        let root = TorusPoint::new(0.1, 0.2);
        let leaves: Vec<Vec<TorusPoint>> = spec.preimage_tree(root, 6, 1000).unwrap().collect();
        assert_eq!(leaves.len(), 729);
        let mut walked = Vec::new();
        spec.walk_tree(root, 6, 1000, root, &|_, q| *q, &mut |s| walked.push(*s)).unwrap();
        assert_eq!(walked.len(), 729);
        for (path, w) in leaves.iter().zip(&walked) {
            assert_eq!(path.len(), 7);
            assert_eq!(path[6], *w);
            for i in 0..6 {
                assert!(spec.apply(path[i + 1]).distance(&path[i]) < 1e-9);
            }
        }
        assert!(matches!(spec.preimage_tree(root, 7, 1000), Err(Error::Budget { required: 2187, .. })));
        let again: Vec<Vec<TorusPoint>> = spec.preimage_tree(root, 6, 1000).unwrap().collect();
        assert_eq!(leaves, again);
        assert_eq!(spec.preimage_tree(root, 0, 1).unwrap().count(), 1);
    }

    #[test]
    fn reduce_matches_walk() {
        let spec = reference(100.0);
        let root = TorusPoint::new(0.6, 0.4);
        let total = spec
            .reduce_tree(root, 5, 1000, 0.0f64, &|s, q| s + q.x, &|s| *s, 0.0, &|a, b| a + b)
            .unwrap();
        let mut seq = 0.0;
        spec.walk_tree(root, 5, 1000, 0.0f64, &|s, q| s + q.x, &mut |s| seq += *s).unwrap();
        assert!((total - seq).abs() < 1e-9);
    }

    #[test]
    fn distribution_on_reference() {
        let spec = reference(1e3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<TorusPoint> = (0..2000).map(|_| TorusPoint::new(rng.gen(), rng.gen())).collect();
        let cert = check_preimage_distribution(&spec, &pts);
        assert!(cert.is_proven(), "{cert:?}");
        let (_, d) = spec.far_preimage(TorusPoint::new(0.25, 0.0));
        assert!(d > 1.0 / 32.0);
    }

    #[test]
    fn json_roundtrip() {
        let spec = reference(1e3);
        let s = serde_json::to_string(&spec).unwrap();
        let back: MapSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn adapted_delta_shrinks_with_t() {
        let e = IntegerMatrix2::new(3, 4, 0, 1).unwrap();
        let a = MapSpec::theorem_a(e, 1.0, 2.2, DeltaMode::Adapted, [1, 3], 1e2).unwrap();
        let b = MapSpec::theorem_a(e, 1.0, 2.2, DeltaMode::Adapted, [1, 3], 1e4).unwrap();
        assert!(b.profile().delta() < a.profile().delta());
        assert!(a.profile().delta() <= default_delta(3));
    }
}
