use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use torus_nuh::config::{parse_t_grid, RunConfig};
use torus_nuh::report::{self, CommandOutput};

#[derive(Parser)]
#[command(name = "torus-nuh", version, about = "Certificates and experiments for shear-deformed torus endomorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file; defaults to the reference run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Leaf budget for preimage trees.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Comma-separated t values, e.g. 100,1000,10000.
    #[arg(long, global = true)]
    t_grid: Option<String>,
    #[arg(long, global = true)]
    tau2_max: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Elementary divisors and classification of the configured matrices.
    Divisors,
    /// Run the certification pipeline at the configured t.
    Certify,
    /// Certify and estimate C_chi across the t grid.
    ScanT,
    /// Lyapunov exponents, pre-orbit growth and the domination diagnostic.
    Exponents,
    /// Exact coefficient tables and certificates.
    Combinatorics,
    /// Section-3 family: estimates, Z-properties and the crossing experiment.
    Curves,
    /// Print the resolved configuration.
    ShowConfig,
}

fn load(common: &Common) -> Result<RunConfig, String> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(b) = common.budget {
        cfg.budget = b;
    }
    if let Some(g) = &common.t_grid {
        cfg.t_grid = parse_t_grid(g).map_err(|e| e.to_string())?;
    }
    if let Some(m) = common.tau2_max {
        cfg.tau2_max = m;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write(out: &CommandOutput, dir: &Path) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for a in &out.artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.contents).map_err(|e| format!("{}: {e}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, String> {
    let cfg = load(&cli.common)?;
    let result = match cli.command {
        Command::ShowConfig => {
            print!("# config_hash={}\n{}", cfg.hash(), cfg.canonical());
            return Ok(0);
        }
        Command::Divisors => report::cmd_divisors(&cfg),
        Command::Certify => report::cmd_certify(&cfg),
        Command::ScanT => report::cmd_scan_t(&cfg),
        Command::Exponents => report::cmd_exponents(&cfg),
        Command::Combinatorics => report::cmd_combinatorics(&cfg),
        Command::Curves => report::cmd_curves(&cfg),
    };
    let out = result.map_err(|e| e.to_string())?;
    for line in &out.summary {
        println!("{line}");
    }
    write(&out, &cli.common.out)?;
    Ok(out.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
