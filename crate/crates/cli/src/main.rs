use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mzsplit::bench::{self, Convergence, ExperimentResult, ReferenceSpec, RunConfig};
use mzsplit::spectral::{write_dump, DumpHeader, Wavefunction};
use mzsplit::Error;

#[derive(Parser)]
#[command(name = "mzsplit", version, about = "Magnus-Zassenhaus propagators: experiments and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// One run against the cached reference; prints a CSV row.
    Run,
    /// Every scheme and step count against one reference.
    Table,
    /// Self-convergence slope over the given step counts.
    Converge,
    /// Build (or load) the reference solution.
    Reference {
        /// Also compare against a run with twice the steps.
        #[arg(long)]
        check: bool,
    },
    /// Run the built-in property checks.
    Verify,
    /// Evolve and write the final state (and snapshots) as MZWF files.
    Dump,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    preset: Option<String>,
    /// mz2, mz4, mz6 or a comma list.
    #[arg(long, global = true)]
    scheme: Option<String>,
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    grid_points: Option<String>,
    /// A step count or a comma list.
    #[arg(long, global = true)]
    steps: Option<String>,
    #[arg(long, global = true)]
    t_final: Option<String>,
    #[arg(long, global = true)]
    gl_nodes: Option<String>,
    /// auto, a count, or adaptive[:max].
    #[arg(long, global = true)]
    lanczos_w2: Option<String>,
    #[arg(long, global = true)]
    lanczos_w3: Option<String>,
    /// Step h = eps^sigma / sigma-mult.
    #[arg(long, global = true)]
    sigma: Option<String>,
    #[arg(long, global = true)]
    sigma_mult: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Keep every k-th state.
    #[arg(long, global = true)]
    snapshots: Option<String>,
    /// `key = value` file; flags win over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<String>,
    #[arg(short, long, global = true)]
    verbose: bool,
}

enum Failure {
    Usage(String),
    Verification,
    Numerical(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            Error::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

fn build_config(opts: &Opts) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &opts.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.merge_config_str(&text)?;
    }
    let flags = [
        ("preset", &opts.preset),
        ("scheme", &opts.scheme),
        ("eps", &opts.eps),
        ("grid_points", &opts.grid_points),
        ("steps", &opts.steps),
        ("t_final", &opts.t_final),
        ("gl_nodes", &opts.gl_nodes),
        ("lanczos_w2", &opts.lanczos_w2),
        ("lanczos_w3", &opts.lanczos_w3),
        ("sigma", &opts.sigma),
        ("sigma_mult", &opts.sigma_mult),
        ("snapshots", &opts.snapshots),
        ("jobs", &opts.jobs),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(p) = &opts.out {
        cfg.out = Some(p.clone());
    }
    if let Some(p) = &opts.cache_dir {
        cfg.cache_dir = p.clone();
    }
    cfg.validate()?;
    if let Some(w) = bench::resolution_warning(cfg.eps, cfg.n_grid) {
        log::warn!("{w}");
    }
    Ok(cfg)
}

fn summary(rows: &[ExperimentResult]) {
    for r in rows {
        eprintln!(
            "{} N={} h={:.4e}: L2 error {:.3e}, energy error {:.3e}, drift {:.1e}, {:.2} s",
            r.scheme, r.n_steps, r.h, r.l2_error, r.energy_error, r.norm_drift, r.wall_seconds
        );
    }
}

fn single_scheme(cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.schemes.len() != 1 || cfg.step_counts().len() != 1 {
        return Err(Failure::Usage("this command takes one scheme and one step count".into()));
    }
    Ok(())
}

fn write_state(path: &Path, cfg: &RunConfig, t: f64, u: &Wavefunction<f64>) -> Result<(), Failure> {
    let g = u.grid();
    let header = DumpHeader { n_points: u.len() as u64, eps: cfg.eps, t, x_min: g.x_min(), x_max: g.x_max() };
    let mut f = fs::File::create(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))?;
    write_dump(&mut f, &header, u.values())
        .and_then(|_| f.flush())
        .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = build_config(&cli.opts)?;
    match &cli.command {
        Command::Run | Command::Table => {
            if matches!(cli.command, Command::Run) {
                single_scheme(&cfg)?;
            }
            let rows = bench::run_table(&cfg)?;
            summary(&rows);
            bench::emit_csv(cfg.out.as_deref(), &rows)?;
        }
        Command::Converge => {
            if cfg.schemes.len() != 1 {
                return Err(Failure::Usage("converge takes one scheme".into()));
            }
            let problem = cfg.preset.build(cfg.eps, cfg.n_grid)?;
            let Convergence { rows, used, slope } = bench::run_convergence(
                &problem,
                cfg.propagator_config(cfg.schemes[0]),
                cfg.t0,
                cfg.t_final(),
                &cfg.step_counts(),
                cfg.jobs,
            )?;
            summary(&rows);
            bench::emit_csv(cfg.out.as_deref(), &rows)?;
            eprintln!("fitted slope {slope:.3} over {} of {} points", used.len(), rows.len());
        }
        Command::Reference { check } => {
            let problem = cfg.preset.build(cfg.eps, cfg.n_grid)?;
            let max_steps = cfg.step_counts().into_iter().max().unwrap_or(1);
            let spec = ReferenceSpec::for_sweep(cfg.preset, cfg.eps, cfg.n_grid, cfg.t0, cfg.t_final(), max_steps);
            let u = bench::make_reference(&spec, &problem, Some(&cfg.cache_dir))?;
            println!("reference {} ({} steps) in {}", spec.key(), spec.n_steps, cfg.cache_dir.display());
            if *check {
                let d = bench::reference_self_consistency(&spec, &problem, &u)?;
                println!("doubling the steps moves it by {d:.3e} in L2");
            }
        }
        Command::Verify => {
            let outcomes = bench::verify()?;
            for c in &outcomes {
                println!("{} {:<48} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured);
            }
            if outcomes.iter().any(|c| !c.passed) {
                return Err(Failure::Verification);
            }
        }
        Command::Dump => {
            single_scheme(&cfg)?;
            let out = cfg.out.clone().ok_or_else(|| Failure::Usage("dump needs --out".into()))?;
            let problem = cfg.preset.build(cfg.eps, cfg.n_grid)?;
            let n = cfg.step_counts()[0];
            let (ev, _) = bench::evolve_problem(&problem, cfg.propagator_config(cfg.schemes[0]), cfg.t0, cfg.t_final(), n)?;
            write_state(&out, &cfg, cfg.t_final(), &ev.state)?;
            for (i, (t, u)) in ev.snapshots.iter().enumerate() {
                let mut name = out.clone().into_os_string();
                name.push(format!(".{i:05}"));
                write_state(Path::new(&name), &cfg, *t, u)?;
            }
            eprintln!("wrote {} ({} snapshots)", out.display(), ev.snapshots.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.opts.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
