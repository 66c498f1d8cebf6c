//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the page parses it and draws on a
//! canvas.

use serde::Serialize;
use torus_nuh::lattice::IntegerMatrix2;
use torus_nuh::lyapunov::forward_exponent;
use torus_nuh::map::{DeltaMode, MapSpec, TorusPoint};
use torus_nuh::profile::Region;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsValue> {
    serde_json::to_string(v).map_err(js_err)
}

fn spec(e: [i32; 4], t: f64) -> Result<MapSpec, JsValue> {
    let m = IntegerMatrix2::new(e[0].into(), e[1].into(), e[2].into(), e[3].into()).map_err(js_err)?;
    MapSpec::theorem_a(m, 1.0, 2.2, DeltaMode::Adapted, [1, 3], t).map_err(js_err)
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Critical => "critical",
        Region::GoodMinus => "good_minus",
        Region::GoodPlus => "good_plus",
    }
}

#[derive(Serialize)]
struct ProfilePlot {
    x: Vec<f64>,
    s: Vec<f64>,
    s_prime: Vec<f64>,
    critical: Vec<[f64; 2]>,
    slope_floor: f64,
    slope_ceil: f64,
    delta: f64,
}

/// Samples s and s′ on [0, 1) for the profile attached to [[a,b],[c,d]].
#[wasm_bindgen]
pub fn profile_plot(a: i32, b: i32, c: i32, d: i32, t: f64, samples: usize) -> Result<String, JsValue> {
    let sp = spec([a, b, c, d], t)?;
    let p = sp.profile();
    let n = samples.clamp(16, 20_000);
    let x: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let plot = ProfilePlot {
        s: x.iter().map(|&v| p.eval_s(v)).collect(),
        s_prime: x.iter().map(|&v| p.eval_s_prime(v)).collect(),
        x,
        critical: p.regions().critical,
        slope_floor: p.slope_floor(),
        slope_ceil: p.slope_ceil(),
        delta: p.delta(),
    };
    to_json(&plot)
}

#[derive(Serialize)]
struct ScanRow {
    t: f64,
    chi_plus: f64,
    chi_minus: f64,
    log_t: f64,
}

/// χ⁺ and χ⁻ along one orbit from (x, y) for each t in `ts`.
#[wasm_bindgen]
pub fn exponent_scan(a: i32, b: i32, c: i32, d: i32, ts: Vec<f64>, x: f64, y: f64, steps: usize) -> Result<String, JsValue> {
    let steps = steps.clamp(100, 1_000_000);
    let mut rows = Vec::with_capacity(ts.len());
    for t in ts {
        let sp = spec([a, b, c, d], t)?;
        let est = forward_exponent(&sp, TorusPoint::new(x, y), steps);
        rows.push(ScanRow {
            t,
            chi_plus: est.chi_plus,
            chi_minus: est.chi_minus,
            log_t: t.ln(),
        });
    }
    to_json(&rows)
}

#[derive(Serialize)]
struct TreeNode {
    depth: usize,
    parent: Option<usize>,
    x: f64,
    y: f64,
    region: &'static str,
}

/// Breadth-first preimage tree of (x, y) up to `depth` (at most 4096 nodes
/// on the last level).
#[wasm_bindgen]
pub fn preimage_tree(a: i32, b: i32, c: i32, d: i32, t: f64, x: f64, y: f64, depth: usize) -> Result<String, JsValue> {
    let sp = spec([a, b, c, d], t)?;
    let deg = sp.degree() as usize;
    let mut nodes = vec![TreeNode {
        depth: 0,
        parent: None,
        x: TorusPoint::new(x, y).x,
        y: TorusPoint::new(x, y).y,
        region: region_name(sp.profile().classify_x(x).region),
    }];
    let mut level = vec![0usize];
    for k in 1..=depth {
        if level.len() * deg > 4096 {
            break;
        }
        let mut next = Vec::with_capacity(level.len() * deg);
        for &i in &level {
            for q in sp.preimages(TorusPoint::new(nodes[i].x, nodes[i].y)) {
                next.push(nodes.len());
                nodes.push(TreeNode {
                    depth: k,
                    parent: Some(i),
                    x: q.x,
                    y: q.y,
                    region: region_name(sp.profile().classify_x(q.x).region),
                });
            }
        }
        level = next;
    }
    to_json(&nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_return_json() {
        let p: serde_json::Value = serde_json::from_str(&profile_plot(3, 4, 0, 1, 1e3, 64).unwrap()).unwrap();
        assert_eq!(p["x"].as_array().unwrap().len(), 64);
        let s: serde_json::Value = serde_json::from_str(&exponent_scan(3, 4, 0, 1, vec![1e2, 1e3], 0.2, 0.3, 2000).unwrap()).unwrap();
        let row = &s[1];
        let sum = row["chi_plus"].as_f64().unwrap() + row["chi_minus"].as_f64().unwrap();
        assert!((sum - 3f64.ln()).abs() < 1e-9);
        let t: serde_json::Value = serde_json::from_str(&preimage_tree(3, 4, 0, 1, 1e3, 0.2, 0.3, 3).unwrap()).unwrap();
        assert_eq!(t.as_array().unwrap().len(), 1 + 3 + 9 + 27);
    }
}
