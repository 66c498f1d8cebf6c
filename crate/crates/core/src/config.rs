//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Every key has a default (the
//! reference run), and [`RunConfig::canonical`] lists all keys with their
//! resolved values; its SHA-256 is the config hash stamped on every output.

use crate::error::{Error, Result};
use crate::exact::{parse_decimal, Q};
use crate::lattice::IntegerMatrix2;
use crate::map::DeltaMode;
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub matrix: [i64; 4],
    pub extra_matrices: Vec<[i64; 4]>,
    pub a0: f64,
    pub kappa: f64,
    pub delta: DeltaMode,
    pub s0: [i64; 2],
    pub alpha: f64,
    pub t: f64,
    pub t_grid: Vec<f64>,
    pub nh_samples: usize,
    pub preimage_samples: usize,
    pub floor_samples: usize,
    pub triple_max_depth: u32,
    pub chi_n: usize,
    pub chi_points: usize,
    pub chi_directions: usize,
    pub exp_points: usize,
    pub exp_steps: usize,
    pub domination_segments: usize,
    pub section3_m: i64,
    pub section3_k: i64,
    pub section3_t: f64,
    pub delta0: String,
    pub z_samples: usize,
    pub z_curves: usize,
    pub curve_seeds: usize,
    pub curve_max_steps: usize,
    pub tau2_max: u64,
    pub table_tau2_max: u64,
    pub budget: u64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            matrix: [3, 4, 0, 1],
            extra_matrices: vec![[2, 1, 1, 1], [5, 0, 0, 1], [2, 0, 0, 2], [4, 1, 1, 2]],
            a0: 1.0,
            kappa: 2.2,
            delta: DeltaMode::Adapted,
            s0: [1, 3],
            alpha: 1.5,
            t: 1e3,
            t_grid: vec![1e2, 1e3, 1e4],
            nh_samples: 2000,
            preimage_samples: 10_000,
            floor_samples: 100,
            triple_max_depth: 18,
            chi_n: 3,
            chi_points: 512,
            chi_directions: 16,
            exp_points: 100,
            exp_steps: 100_000,
            domination_segments: 200,
            section3_m: 41,
            section3_k: 1,
            section3_t: 1e4,
            delta0: "0.1".into(),
            z_samples: 1000,
            z_curves: 50,
            curve_seeds: 100,
            curve_max_steps: 20,
            tau2_max: 10_000,
            table_tau2_max: 100,
            budget: crate::map::DEFAULT_TREE_BUDGET,
            seed: 1,
        }
    }
}

const KEYS: [&str; 31] = [
    "matrix",
    "extra_matrices",
    "a0",
    "kappa",
    "delta",
    "s0",
    "alpha",
    "t",
    "t_grid",
    "nh_samples",
    "preimage_samples",
    "floor_samples",
    "triple_max_depth",
    "chi_n",
    "chi_points",
    "chi_directions",
    "exp_points",
    "exp_steps",
    "domination_segments",
    "section3_m",
    "section3_k",
    "section3_t",
    "delta0",
    "z_samples",
    "z_curves",
    "curve_seeds",
    "curve_max_steps",
    "tau2_max",
    "table_tau2_max",
    "budget",
    "seed",
];

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = {value}: {what}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, v, "not a number of the expected kind"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = parse_num(key, v)?;
    if !x.is_finite() {
        return Err(bad(key, v, "must be finite"));
    }
    Ok(x)
}

fn parse_matrix(key: &str, v: &str) -> Result<[i64; 4]> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 4 {
        return Err(bad(key, v, "expected four integers a b c d for [[a,b],[c,d]]"));
    }
    let mut m = [0i64; 4];
    for (slot, p) in m.iter_mut().zip(&parts) {
        *slot = parse_num(key, p)?;
    }
    Ok(m)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let out: Result<Vec<f64>> = v.split(',').map(|p| parse_f64(key, p.trim())).collect();
    let out = out?;
    if out.is_empty() {
        return Err(bad(key, v, "empty list"));
    }
    Ok(out)
}

/// Parses `a,b,c` (comma separated) as a t grid.
pub fn parse_t_grid(v: &str) -> Result<Vec<f64>> {
    let g = parse_list("t_grid", v)?;
    if g.iter().any(|&t| t < 0.0) {
        return Err(bad("t_grid", v, "t must be non-negative"));
    }
    Ok(g)
}

fn render_f64(x: f64) -> String {
    format!("{x:?}")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key {key}", lineno + 1)));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key {key}", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "matrix" => self.matrix = parse_matrix(key, v)?,
            "extra_matrices" => {
                self.extra_matrices = if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(';').map(|m| parse_matrix(key, m.trim())).collect::<Result<_>>()?
                }
            }
            "a0" => self.a0 = parse_f64(key, v)?,
            "kappa" => self.kappa = parse_f64(key, v)?,
            "delta" => {
                self.delta = match v {
                    "default" => DeltaMode::Default,
                    "adapted" => DeltaMode::Adapted,
                    other => DeltaMode::Fixed(parse_f64(key, other)?),
                }
            }
            "s0" => {
                let (n, d) = v.split_once('/').ok_or_else(|| bad(key, v, "expected a fraction n/d"))?;
                self.s0 = [parse_num(key, n.trim())?, parse_num(key, d.trim())?];
            }
            "alpha" => self.alpha = parse_f64(key, v)?,
            "t" => self.t = parse_f64(key, v)?,
            "t_grid" => self.t_grid = parse_t_grid(v)?,
            "nh_samples" => self.nh_samples = parse_num(key, v)?,
            "preimage_samples" => self.preimage_samples = parse_num(key, v)?,
            "floor_samples" => self.floor_samples = parse_num(key, v)?,
            "triple_max_depth" => self.triple_max_depth = parse_num(key, v)?,
            "chi_n" => self.chi_n = parse_num(key, v)?,
            "chi_points" => self.chi_points = parse_num(key, v)?,
            "chi_directions" => self.chi_directions = parse_num(key, v)?,
            "exp_points" => self.exp_points = parse_num(key, v)?,
            "exp_steps" => self.exp_steps = parse_num(key, v)?,
            "domination_segments" => self.domination_segments = parse_num(key, v)?,
            "section3_m" => self.section3_m = parse_num(key, v)?,
            "section3_k" => self.section3_k = parse_num(key, v)?,
            "section3_t" => self.section3_t = parse_f64(key, v)?,
            "delta0" => self.delta0 = v.to_string(),
            "z_samples" => self.z_samples = parse_num(key, v)?,
            "z_curves" => self.z_curves = parse_num(key, v)?,
            "curve_seeds" => self.curve_seeds = parse_num(key, v)?,
            "curve_max_steps" => self.curve_max_steps = parse_num(key, v)?,
            "tau2_max" => self.tau2_max = parse_num(key, v)?,
            "table_tau2_max" => self.table_tau2_max = parse_num(key, v)?,
            "budget" => self.budget = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            _ => unreachable!("key list checked by the caller"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        IntegerMatrix2::new(self.matrix[0], self.matrix[1], self.matrix[2], self.matrix[3])
            .map_err(|e| Error::Config(format!("matrix: {e}")))?;
        if self.s0[1] == 0 {
            return Err(Error::Config("s0: zero denominator".into()));
        }
        self.delta0_exact()?;
        if self.tau2_max < 3 || self.table_tau2_max < 3 {
            return Err(Error::Config("tau2 ceilings must be at least 3".into()));
        }
        if self.chi_n == 0 || self.exp_steps == 0 {
            return Err(Error::Config("chi_n and exp_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn matrix(&self) -> Result<IntegerMatrix2> {
        let m = self.matrix;
        IntegerMatrix2::new(m[0], m[1], m[2], m[3])
    }

    pub fn delta0_exact(&self) -> Result<Q> {
        parse_decimal(&self.delta0).ok_or_else(|| bad("delta0", &self.delta0, "expected a decimal number"))
    }

    /// Every key with its resolved value, one `key = value` per line.
    pub fn canonical(&self) -> String {
        let m = |a: &[i64; 4]| format!("{} {} {} {}", a[0], a[1], a[2], a[3]);
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("matrix", m(&self.matrix));
        put("extra_matrices", self.extra_matrices.iter().map(m).collect::<Vec<_>>().join("; "));
        put("a0", render_f64(self.a0));
        put("kappa", render_f64(self.kappa));
        put(
            "delta",
            match self.delta {
                DeltaMode::Default => "default".into(),
                DeltaMode::Adapted => "adapted".into(),
                DeltaMode::Fixed(v) => render_f64(v),
            },
        );
        put("s0", format!("{}/{}", self.s0[0], self.s0[1]));
        put("alpha", render_f64(self.alpha));
        put("t", render_f64(self.t));
        put("t_grid", self.t_grid.iter().map(|t| render_f64(*t)).collect::<Vec<_>>().join(","));
        put("nh_samples", self.nh_samples.to_string());
        put("preimage_samples", self.preimage_samples.to_string());
        put("floor_samples", self.floor_samples.to_string());
        put("triple_max_depth", self.triple_max_depth.to_string());
        put("chi_n", self.chi_n.to_string());
        put("chi_points", self.chi_points.to_string());
        put("chi_directions", self.chi_directions.to_string());
        put("exp_points", self.exp_points.to_string());
        put("exp_steps", self.exp_steps.to_string());
        put("domination_segments", self.domination_segments.to_string());
        put("section3_m", self.section3_m.to_string());
        put("section3_k", self.section3_k.to_string());
        put("section3_t", render_f64(self.section3_t));
        put("delta0", self.delta0.clone());
        put("z_samples", self.z_samples.to_string());
        put("z_curves", self.z_curves.to_string());
        put("curve_seeds", self.curve_seeds.to_string());
        put("curve_max_steps", self.curve_max_steps.to_string());
        put("tau2_max", self.tau2_max.to_string());
        put("table_tau2_max", self.table_tau2_max.to_string());
        put("budget", self.budget.to_string());
        put("seed", self.seed.to_string());
        out
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let cfg = RunConfig::default();
        let again = RunConfig::parse(&cfg.canonical()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn comments_and_overrides() {
        let cfg = RunConfig::parse("# reference\nmatrix = 2 1 1 1  # cat map\n\nt_grid = 10, 100\ndelta = 0.01\n").unwrap();
        assert_eq!(cfg.matrix, [2, 1, 1, 1]);
        assert_eq!(cfg.t_grid, vec![10.0, 100.0]);
        assert_eq!(cfg.delta, DeltaMode::Fixed(0.01));
        assert_ne!(cfg.hash(), RunConfig::default().hash());
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["nonsense", "colour = red", "t = 1\nt = 2", "matrix = 1 2 3", "matrix = 1 2 2 4", "s0 = 1/0", "delta0 = x"] {
            assert!(matches!(RunConfig::parse(text), Err(Error::Config(_))), "{text}");
        }
    }
}
