use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nearhole::experiments::{
    self, csv_string, emit_path_report, emit_report, limits_csv, load_config, run_regime_path, run_sweep, solve_point,
    toy_csv, ExperimentConfig, Ladder, PathSpec, SweepSpec,
};
use nearhole::Error;

#[derive(Parser)]
#[command(name = "nearhole", version, about = "Laplace Dirichlet solver for a small hole near a flat boundary")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Single solve at [solver].eps
    Solve(Common),
    /// ε-grid from [sweep]
    Sweep(Common),
    /// Regime path with extrapolated limits, from [path]
    Path(Common),
    /// Limiting energy and flux values
    Limits(Common),
    /// Conformal-map oracle at the [toy] points
    Toy(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// nodes on the hole (the arc gets twice as many)
    #[arg(long)]
    nodes: Option<usize>,
    /// self-convergence tolerance between N and 2N
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn load(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = load_config(&c.config)?;
    if let Some(n) = c.nodes {
        cfg.solver.nodes = n;
    }
    if let Some(t) = c.tol {
        if !(t > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {t}")));
        }
        cfg.solver.tol = Some(t);
    }
    if let Some(k) = c.threads {
        if k == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(cfg)
}

fn ladder(cfg: &ExperimentConfig) -> Result<Ladder, Error> {
    Ok(Ladder::new(&cfg.problem()?, cfg.discretization()?, cfg.solver.max_nodes.max(cfg.solver.nodes)))
}

fn missing(section: &str) -> Error {
    Error::Config(format!("config has no [{section}] section"))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Solve(c) => {
            let cfg = load(&c)?;
            let eps = cfg.solver.eps.ok_or_else(|| Error::Config("solve needs solver.eps".into()))?;
            let l = ladder(&cfg)?;
            let row = solve_point(&l, cfg.regime()?, (eps[0], eps[1]), cfg.solver.tol);
            emit_report(&c.out, "solve", std::slice::from_ref(&row))?;
            print!("{}", csv_string(std::slice::from_ref(&row)));
            if row.status.starts_with("failed") {
                return Err(Error::SingularSystem(row.cond_est));
            }
            if !row.is_ok() && row.status != "unconverged" {
                return Err(Error::Inadmissible(row.status));
            }
        }
        Cmd::Sweep(c) => {
            let cfg = load(&c)?;
            let spec = SweepSpec::from_section(cfg.sweep.as_ref().ok_or_else(|| missing("sweep"))?, cfg.regime()?)?;
            let l = ladder(&cfg)?;
            let rows = run_sweep(&spec, &l, cfg.solver.tol);
            for r in rows.iter().filter(|r| !r.is_ok()) {
                eprintln!("eps = ({:e}, {:e}): {}", r.eps1, r.eps2, r.status);
            }
            emit_report(&c.out, "sweep", &rows)?;
            eprintln!("{} rows written to {}", rows.len(), c.out.display());
        }
        Cmd::Path(c) => {
            let cfg = load(&c)?;
            let spec = PathSpec::from_section(cfg.path.as_ref().ok_or_else(|| missing("path"))?, cfg.regime()?)?;
            let l = ladder(&cfg)?;
            let res = run_regime_path(&spec, &l, cfg.solver.tol)?;
            emit_path_report(&c.out, "path", &res)?;
            print!("{}", res.summary_csv());
        }
        Cmd::Limits(c) => {
            let cfg = load(&c)?;
            let eps2 = cfg
                .path
                .as_ref()
                .and_then(|p| p.eps2)
                .or(cfg.solver.eps.map(|e| e[1]))
                .unwrap_or(f64::NAN);
            let text = limits_csv(&ladder(&cfg)?, eps2)?;
            std::fs::create_dir_all(&c.out)?;
            std::fs::write(c.out.join("limits.csv"), &text)?;
            print!("{text}");
        }
        Cmd::Toy(c) => {
            let cfg = load(&c)?;
            let sec = cfg.toy.as_ref().ok_or_else(|| missing("toy"))?;
            let text = toy_csv(sec, experiments::ExperimentConfig::inner_data(&cfg)?)?;
            std::fs::create_dir_all(&c.out)?;
            std::fs::write(c.out.join("toy.csv"), &text)?;
            print!("{text}");
        }
    }
    Ok(())
}
