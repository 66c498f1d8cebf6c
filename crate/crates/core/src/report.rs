//! Report commands: each builds its inputs from a [`RunConfig`], runs the
//! checks and returns the files to write (CSV tables and JSON documents)
//! together with an aggregate certificate when the command certifies
//! anything.
//!
//! Every file starts with the config hash and seed (JSON documents carry them
//! in a `provenance` object). Nothing time-dependent is written, so equal
//! configs give byte-identical files.

use crate::certificate::{Certificate, Witness};
use crate::combinatorics::{
    certify_j_positive, certify_p_bounds, coefficient_table, nd_bounds, theorem_b_thresholds, CombinatoricsTable,
};
use crate::config::RunConfig;
use crate::cone::{c_chi_lower, check_count_floors, check_nh, SampleSpec, TangentSample};
use crate::curves::{crossing_experiment, crossing_snapshots, crossing_start, z_properties_check};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::lattice::{
    admissible_alpha, check_theorem_a_admissible, classify_matrix, cone_norm_constants, elementary_divisors,
    minimal_alpha, preimage_lattice, IntegerMatrix2, Spectrum,
};
use crate::lyapunov::{backward_exponent, default_theta_grid, domination_detector, nuh_verdict, section3_estimates, PreOrbitSampler};
use crate::map::{check_preimage_distribution, MapSpec, TorusPoint};
use crate::profile::slope_bounds_report;
use crate::triple::triple_critical_check;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub command: &'static str,
    pub artifacts: Vec<Artifact>,
    pub certificate: Option<Certificate>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        self.certificate.as_ref().map_or(0, Certificate::exit_code)
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
struct Provenance<'a> {
    command: &'a str,
    config_hash: String,
    seed: u64,
    version: &'a str,
}

fn provenance<'a>(cfg: &RunConfig, command: &'a str) -> Provenance<'a> {
    Provenance {
        command,
        config_hash: cfg.hash(),
        seed: cfg.seed,
        version: VERSION,
    }
}

/// The `# config_hash=…, seed=…` line that opens every CSV file.
pub fn csv_header(cfg: &RunConfig, command: &str) -> String {
    format!("# config_hash={}, seed={}, command={command}, version={VERSION}\n", cfg.hash(), cfg.seed)
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
    prefix: String,
}

impl Table {
    fn new(cfg: &RunConfig, command: &str, columns: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(columns).map_err(csv_err)?;
        Ok(Table {
            writer,
            prefix: csv_header(cfg, command),
        })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(csv_err)
    }

    fn finish(self, name: &str) -> Result<Artifact> {
        let body = self.writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?;
        Ok(Artifact {
            name: name.into(),
            contents: self.prefix + &body,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn json_artifact<T: Serialize>(cfg: &RunConfig, command: &str, name: &str, body: &T) -> Result<Artifact> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        provenance: Provenance<'a>,
        #[serde(flatten)]
        body: &'a T,
    }
    let doc = Doc {
        provenance: provenance(cfg, command),
        body,
    };
    let mut contents = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    contents.push('\n');
    Ok(Artifact {
        name: name.into(),
        contents,
    })
}

#[derive(Serialize)]
struct CertificateBody<'a> {
    certificate: &'a Certificate,
}

fn f(x: f64) -> String {
    format!("{x:?}")
}

/// Precondition failures inside a pipeline stage become a refuted stage;
/// budget exhaustion becomes an unknown one.
fn stage(name: &str, r: Result<Certificate>) -> Result<Certificate> {
    match r {
        Ok(c) => Ok(c),
        Err(Error::Budget { required, budget }) => Ok(Certificate::unknown(name, format!("needs {required}"), budget)),
        Err(Error::Precondition(msg)) => Ok(Certificate::refuted(name, Witness::new("precondition", msg))),
        Err(e) => Err(e),
    }
}

fn theorem_a_spec(cfg: &RunConfig, t: f64) -> Result<MapSpec> {
    let e = cfg.matrix()?;
    check_theorem_a_admissible(&e)?;
    MapSpec::theorem_a(e, cfg.a0, cfg.kappa, cfg.delta, cfg.s0, t)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<TorusPoint> {
    (0..n).map(|_| TorusPoint::new(rng.gen(), rng.gen())).collect()
}

/// Elementary divisors, classification and preimage-lattice shape for the
/// configured matrix and the extra matrices.
pub fn cmd_divisors(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(
        cfg,
        "divisors",
        &["a", "b", "c", "d", "tau1", "tau2", "degree", "spectrum", "pm_one", "homothety", "regular_x_spacing", "theorem_a", "min_alpha"],
    )?;
    let mut summary = Vec::new();
    let mut all = vec![cfg.matrix];
    all.extend(cfg.extra_matrices.iter().copied());
    for m in all {
        let e = IntegerMatrix2::new(m[0], m[1], m[2], m[3])?;
        let dv = elementary_divisors(&e);
        let cl = classify_matrix(&e);
        let lat = preimage_lattice(&e);
        let admissible = check_theorem_a_admissible(&e);
        let min_alpha = match &admissible {
            Ok(()) => minimal_alpha(&e, 1e-6)?.map(f).unwrap_or_else(|| "none".into()),
            Err(_) => String::new(),
        };
        let spectrum = match cl.spectrum {
            Spectrum::HasPmOneEigenvalue => "pm_one_eigenvalue",
            Spectrum::HyperbolicSpectrum => "hyperbolic",
            Spectrum::ComplexSpectrum => "complex",
        };
        let verdict = match &admissible {
            Ok(()) => "admissible".to_string(),
            Err(err) => format!("rejected: {err}"),
        };
        summary.push(format!("{e}: (tau1, tau2, d) = ({}, {}, {}), {spectrum}, {verdict}", dv.tau1, dv.tau2, dv.degree));
        table.row([
            m[0].to_string(),
            m[1].to_string(),
            m[2].to_string(),
            m[3].to_string(),
            dv.tau1.to_string(),
            dv.tau2.to_string(),
            dv.degree.to_string(),
            spectrum.to_string(),
            cl.pm_one.map(|v| v.to_string()).unwrap_or_default(),
            cl.homothety.to_string(),
            lat.x_spacing_regular.to_string(),
            verdict,
            min_alpha,
        ])?;
    }
    Ok(CommandOutput {
        command: "divisors",
        artifacts: vec![table.finish("divisors.csv")?],
        certificate: None,
        summary,
    })
}

fn certify_at(cfg: &RunConfig, t: f64) -> Result<Certificate> {
    let e = cfg.matrix()?;
    let spec = theorem_a_spec(cfg, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut stages = vec![admissible_alpha(&e, cfg.alpha)?];
    stages.push(match cone_norm_constants(&e, cfg.alpha) {
        Ok(k) => Certificate::proven("cone_norm_constants").with_margin("e_v", k.e_v).with_margin("e_h", k.e_h),
        Err(err) => stage("cone_norm_constants", Err(err))?,
    });
    stages.push(slope_bounds_report(spec.profile(), 256).certificate);
    stages.push(check_preimage_distribution(&spec, &random_points(&mut rng, cfg.preimage_samples)));
    stages.push(stage("check_nh", check_nh(&spec, cfg.alpha, cfg.nh_samples, cfg.seed))?);
    stages.push(stage("triple_critical", triple_critical_check(&spec, cfg.triple_max_depth))?);
    let mut samples = Vec::with_capacity(cfg.floor_samples);
    for i in 0..cfg.floor_samples {
        let p = TorusPoint::new(rng.gen(), rng.gen());
        let s: f64 = rng.gen_range(-1.0..1.0);
        let u = if i % 2 == 0 { [s / cfg.alpha, 1.0] } else { [1.0, s * cfg.alpha] };
        samples.push(TangentSample::new(p, u, cfg.alpha)?);
    }
    stages.push(stage("count_floors", check_count_floors(&spec, cfg.alpha, &samples))?);
    let mut cert = Certificate::aggregate("certify", stages);
    cert.margins.insert("t".into(), t);
    Ok(cert)
}

/// The Theorem A pipeline at the configured t.
pub fn cmd_certify(cfg: &RunConfig) -> Result<CommandOutput> {
    let cert = certify_at(cfg, cfg.t)?;
    let summary = cert
        .children
        .iter()
        .map(|c| format!("{:<22} {}", c.name, c.verdict.label()))
        .chain(std::iter::once(format!("{:<22} {}", "aggregate", cert.verdict.label())))
        .collect();
    Ok(CommandOutput {
        command: "certify",
        artifacts: vec![json_artifact(cfg, "certify", "certificate.json", &CertificateBody { certificate: &cert })?],
        certificate: Some(cert),
        summary,
    })
}

/// One row per t in the grid: stage verdicts, the sampled C_χ estimate and
/// the J(τ₂)·log t reference line.
pub fn cmd_scan_t(cfg: &RunConfig) -> Result<CommandOutput> {
    let e = cfg.matrix()?;
    let j = coefficient_table(e.tau1(), e.tau2())?.j;
    let j_f = to_f64(&j);
    let mut table = Table::new(
        cfg,
        "scan-t",
        &["t", "log_t", "check_nh", "triple_critical", "count_floors", "aggregate", "c_chi_lower", "chi_n", "J", "J_exact", "J_log_t"],
    )?;
    let sample = SampleSpec {
        points: cfg.chi_points,
        directions: cfg.chi_directions,
        alpha: cfg.alpha,
    };
    let mut certs = Vec::new();
    let mut summary = Vec::new();
    for &t in &cfg.t_grid {
        let cert = certify_at(cfg, t)?;
        let spec = theorem_a_spec(cfg, t)?;
        let chi = c_chi_lower(&spec, cfg.chi_n, &sample, cfg.budget)?;
        let verdict = |name: &str| cert.children.iter().find(|c| c.name == name).map_or("missing", |c| c.verdict.label());
        let lt = t.ln();
        summary.push(format!("t = {t:e}: {} (C_chi lower {:.4}, J log t {:.4})", cert.verdict.label(), chi.value, j_f * lt));
        table.row([
            f(t),
            f(lt),
            verdict("check_nh").into(),
            verdict("triple_critical").into(),
            verdict("count_floors").into(),
            cert.verdict.label().into(),
            f(chi.value),
            cfg.chi_n.to_string(),
            f(j_f),
            crate::exact::render(&j),
            f(j_f * lt),
        ])?;
        let mut cert = cert;
        cert.name = format!("t={}", f(t));
        certs.push(cert);
    }
    let agg = Certificate::aggregate("scan_t", certs);
    Ok(CommandOutput {
        command: "scan-t",
        artifacts: vec![
            table.finish("scan_t.csv")?,
            json_artifact(cfg, "scan-t", "scan_t_certificates.json", &CertificateBody { certificate: &agg })?,
        ],
        certificate: Some(agg),
        summary,
    })
}

/// Forward exponents on random points, pre-orbit growth rates and the
/// domination diagnostic, for the configured map at t.
pub fn cmd_exponents(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = theorem_a_spec(cfg, cfg.t)?;
    let log_d = (spec.degree() as f64).ln();
    let nuh = nuh_verdict(&spec, cfg.exp_points, cfg.exp_steps, cfg.seed, None);
    let mut table = Table::new(
        cfg,
        "exponents",
        &["index", "x", "y", "chi_plus", "chi_minus", "sum", "log_d", "se_plus", "se_minus", "nuh"],
    )?;
    for (i, p) in nuh.points.iter().enumerate() {
        table.row([
            i.to_string(),
            f(p.point.x),
            f(p.point.y),
            f(p.chi_plus),
            f(p.chi_minus),
            f(p.chi_plus + p.chi_minus),
            f(log_d),
            f(p.se_plus),
            f(p.se_minus),
            p.nuh.to_string(),
        ])?;
    }
    let start = nuh.points.first().map_or(TorusPoint::new(0.5, 0.5), |p| p.point);
    let backward = backward_exponent(&PreOrbitSampler::new(&spec, cfg.seed), start, (cfg.exp_steps / 20).max(100), 20);
    let grid = default_theta_grid();
    let anosov = MapSpec::new(IntegerMatrix2::new(2, 1, 1, 1)?, spec.profile().clone(), 0.0)?;
    let dom_control = domination_detector(&anosov, &[8, 16, 32], &grid, cfg.domination_segments, cfg.seed);
    let dom_shear = domination_detector(&spec, &[8, 16, 32], &grid, cfg.domination_segments, cfg.seed);

    #[derive(Serialize)]
    struct Summary<'a> {
        t: f64,
        points: usize,
        steps: usize,
        log_d: f64,
        fraction_nuh: f64,
        max_sum_error: f64,
        backward: &'a crate::lyapunov::BackwardReport,
        domination_anosov_control: &'a crate::lyapunov::DominationReport,
        domination_shear: &'a crate::lyapunov::DominationReport,
    }
    let body = Summary {
        t: cfg.t,
        points: cfg.exp_points,
        steps: cfg.exp_steps,
        log_d,
        fraction_nuh: nuh.fraction_nuh,
        max_sum_error: nuh.max_sum_error,
        backward: &backward,
        domination_anosov_control: &dom_control,
        domination_shear: &dom_shear,
    };
    let summary = vec![
        format!("NUH fraction {:.3} over {} points, N = {}", nuh.fraction_nuh, cfg.exp_points, cfg.exp_steps),
        format!("max |chi+ + chi- - log d| = {:.2e}", nuh.max_sum_error),
        format!("pre-orbit growth rate median {:.4}", backward.median),
        format!("invariant constant cone: Anosov control {}, shear {}", dom_control.dominated, dom_shear.dominated),
    ];
    Ok(CommandOutput {
        command: "exponents",
        artifacts: vec![table.finish("exponents.csv")?, json_artifact(cfg, "exponents", "exponents_summary.json", &body)?],
        certificate: None,
        summary,
    })
}

/// Exact coefficient table for τ₁ = 1 up to `table_tau2_max`, the p and J
/// certificates up to `tau2_max`, and the §3 thresholds.
pub fn cmd_combinatorics(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut table = Table::new(cfg, "combinatorics", &CombinatoricsTable::COLUMNS)?;
    for tau2 in 3..=cfg.table_tau2_max {
        table.row(coefficient_table(1, tau2)?.rendered())?;
    }
    let p_cert = certify_p_bounds(cfg.tau2_max)?;
    let (j_cert, _) = certify_j_positive(cfg.tau2_max)?;
    let nd = nd_bounds(3, cfg.table_tau2_max);
    let thresholds = theorem_b_thresholds(cfg.section3_m, &cfg.delta0_exact()?)?;
    let agg = Certificate::aggregate("combinatorics", vec![p_cert, j_cert]);

    #[derive(Serialize)]
    struct Body<'a> {
        certificate: &'a Certificate,
        n_bound_failures: &'a [u64],
        d_bound_failures: &'a [u64],
        thresholds: &'a crate::combinatorics::ThresholdReport,
    }
    let body = Body {
        certificate: &agg,
        n_bound_failures: &nd.n_bound_failures,
        d_bound_failures: &nd.d_bound_failures,
        thresholds: &thresholds,
    };
    let summary = vec![
        format!("p bounds and J > 0 for tau2 <= {}: {}", cfg.tau2_max, agg.verdict.label()),
        format!("D >= 4(tau2^2+2) fails at tau2 in {:?}", nd.d_bound_failures),
        format!(
            "m = {}: lhs {} vs 1 - delta0 = {}, qualifies {}, T = {}",
            thresholds.m, thresholds.lhs, thresholds.rhs, thresholds.qualifies, thresholds.big_t
        ),
    ];
    Ok(CommandOutput {
        command: "combinatorics",
        artifacts: vec![
            table.finish("combinatorics.csv")?,
            json_artifact(cfg, "combinatorics", "combinatorics_certificates.json", &body)?,
        ],
        certificate: Some(agg),
        summary,
    })
}

/// §3 family: derivative estimates, Z-properties, the crossing experiment
/// (with the t = 0 control) and polyline snapshots of the first run.
pub fn cmd_curves(cfg: &RunConfig) -> Result<CommandOutput> {
    let (m, k, t) = (cfg.section3_m, cfg.section3_k, cfg.section3_t);
    let spec = MapSpec::section3(m, k, t, 0.8, [1, 3])?;
    let r = t.powf(-7.0);
    let estimates = section3_estimates(m, k, t, cfg.z_samples, cfg.seed)?;
    let z = z_properties_check(&spec, cfg.z_samples, cfg.z_curves, cfg.seed)?;
    let crossing = crossing_experiment(&spec, r, cfg.curve_seeds, cfg.curve_max_steps, cfg.seed);
    let control = crossing_experiment(&spec.with_t(0.0)?, r, cfg.curve_seeds, cfg.curve_max_steps, cfg.seed);
    let (_, snapshots) = crossing_snapshots(&spec, crossing_start(cfg.seed, 0), r, cfg.curve_max_steps);
    let delta0 = to_f64(&cfg.delta0_exact()?);
    let exps = nuh_verdict(&spec, cfg.exp_points.min(100), (cfg.exp_steps / 10).max(1000), cfg.seed, Some(delta0));

    let mut table = Table::new(
        cfg,
        "curves",
        &["run", "x", "y", "first_crossing", "crossing_length", "min_growth_in_g_prime", "control_first_crossing"],
    )?;
    for (i, (run, ctl)) in crossing.runs.iter().zip(&control.runs).enumerate() {
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        table.row([
            i.to_string(),
            f(run.start.x),
            f(run.start.y),
            run.first_crossing.map(|n| n.to_string()).unwrap_or_default(),
            opt(run.crossing_length),
            opt(run.min_growth_in_g_prime),
            ctl.first_crossing.map(|n| n.to_string()).unwrap_or_default(),
        ])?;
    }
    let cert = Certificate::aggregate("curves", vec![estimates, z]);

    #[derive(Serialize)]
    struct Body<'a> {
        m: i64,
        k: i64,
        t: f64,
        r: f64,
        certificate: &'a Certificate,
        success_fraction: f64,
        histogram: &'a [u64],
        min_growth_in_g_prime: f64,
        sqrt_t: f64,
        control_success_fraction: f64,
        fraction_above_threshold: Option<f64>,
        threshold: Option<f64>,
        pliss_surrogate_fraction: Option<f64>,
        pliss_reference: Option<f64>,
    }
    let body = Body {
        m,
        k,
        t,
        r,
        certificate: &cert,
        success_fraction: crossing.success_fraction,
        histogram: &crossing.histogram,
        min_growth_in_g_prime: crossing.min_growth_in_g_prime,
        sqrt_t: t.sqrt(),
        control_success_fraction: control.success_fraction,
        fraction_above_threshold: exps.fraction_above_threshold,
        threshold: exps.threshold,
        pliss_surrogate_fraction: exps.pliss_surrogate_fraction,
        pliss_reference: exps.pliss_reference,
    };
    #[derive(Serialize)]
    struct Snapshots<'a> {
        run: usize,
        curves: &'a [crate::curves::TorusCurve],
    }
    let summary = vec![
        format!("section-3 checks (m = {m}, k = {k}, t = {t:e}): {}", cert.verdict.label()),
        format!("crossing success {:.2} over {} runs (t = 0 control {:.2})", crossing.success_fraction, cfg.curve_seeds, control.success_fraction),
    ];
    Ok(CommandOutput {
        command: "curves",
        artifacts: vec![
            table.finish("crossing.csv")?,
            json_artifact(cfg, "curves", "curves_summary.json", &body)?,
            json_artifact(cfg, "curves", "curve_snapshots.json", &Snapshots { run: 0, curves: &snapshots })?,
        ],
        certificate: Some(cert),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            nh_samples: 200,
            preimage_samples: 500,
            floor_samples: 10,
            chi_points: 16,
            chi_directions: 6,
            exp_points: 4,
            exp_steps: 4000,
            domination_segments: 40,
            z_samples: 50,
            z_curves: 3,
            curve_seeds: 4,
            tau2_max: 50,
            table_tau2_max: 10,
            ..RunConfig::default()
        }
    }

    #[test]
    fn divisors_rows() {
        let out = cmd_divisors(&small()).unwrap();
        let csv = &out.artifact("divisors.csv").unwrap().contents;
        assert!(csv.starts_with("# config_hash="));
        assert!(csv.contains("\n3,4,0,1,1,3,3,pm_one_eigenvalue,1,false,true,admissible,"));
        assert!(csv.contains("2,0,0,2,2,2,4,"));
        assert!(csv.lines().any(|l| l.starts_with("2,0,0,2") && l.contains("rejected")));
    }

    #[test]
    fn certify_reference_and_negative_control() {
        let out = cmd_certify(&small()).unwrap();
        assert_eq!(out.exit_code(), 0, "{:?}", out.certificate);
        // Below t = 2α/a the NH stage has no footing.
        let low = RunConfig { t: 2.0, ..small() };
        assert_eq!(cmd_certify(&low).unwrap().exit_code(), 2);
    }

    #[test]
    fn combinatorics_spot_values() {
        let out = cmd_combinatorics(&small()).unwrap();
        let csv = &out.artifact("combinatorics.csv").unwrap().contents;
        let p_col = CombinatoricsTable::COLUMNS.iter().position(|c| *c == "p").unwrap();
        let row = |tau2: &str| csv.lines().find(|l| l.starts_with(&format!("1,{tau2},"))).unwrap().split(',').collect::<Vec<_>>()[p_col].to_string();
        assert_eq!(row("3"), "7/13");
        assert_eq!(row("5"), "80/117");
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn csv_bodies_are_reproducible() {
        let cfg = small();
        let a = cmd_exponents(&cfg).unwrap();
        let b = cmd_exponents(&cfg).unwrap();
        assert_eq!(a.artifacts, b.artifacts);
        let csv = &a.artifact("exponents.csv").unwrap().contents;
        for line in csv.lines().skip(2) {
            let cols: Vec<&str> = line.split(',').collect();
            let (sum, log_d): (f64, f64) = (cols[5].parse().unwrap(), cols[6].parse().unwrap());
            assert!((sum - log_d).abs() < 1e-9);
        }
    }
}
