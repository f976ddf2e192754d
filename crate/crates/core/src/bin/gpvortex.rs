use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gpvortex::config::ConfigBuilder;
use gpvortex::dynamics::{run_preservation, BackendChoice};
use gpvortex::experiment::{self, ResolutionStudy};
use gpvortex::fd::FdLaplacian;
use gpvortex::grid::{Grid1D, Grid2D, Layout};
use gpvortex::verify::Suite;
use gpvortex::{Error, Result};

/// Steady-vortex preservation experiments for the 2D Gross-Pitaevskii equation.
#[derive(Parser)]
#[command(name = "gpvortex", version)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Padé density: r,rho,rho_prime.
    Profile {
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value_t = 2001)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical density profile: s,g,r,rho_num.
    Bvp {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative deviation of Padé densities from the numerical profile.
    ProfileError {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        q: Vec<usize>,
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric grid nodes: i,x,h,w.
    Grid {
        #[arg(long = "L", default_value_t = 20.0)]
        l: f64,
        #[arg(long, default_value_t = 0.05)]
        hmin: f64,
        #[arg(long, default_value_t = 0.2)]
        mean: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-dimensional FD Laplacian factor in coordinate format.
    Laplacian {
        #[arg(long = "L", default_value_t = 2.0)]
        l: f64,
        #[arg(long, default_value_t = 0.1)]
        hmin: f64,
        #[arg(long, default_value_t = 0.4)]
        mean: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fourier truncation errors of the regularity family: q,ell,c,M,l2_error.
    Regularity {
        #[arg(long = "L", default_value_t = 20.0)]
        l: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128, 256])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1024)]
        reference: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steady-vortex run: t,R,rel_error,mass,energy.
    Preserve {
        #[command(flatten)]
        run: RunArgs,
        /// Also store the final spectral field for `eval-points`.
        #[arg(long)]
        save_field: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral runs with m and the step count raised together: m,tau,t,R,rel_error.
    Resolution {
        #[command(flatten)]
        run: RunArgs,
        /// Mode counts; tau applies to the first and scales as 1/m.
        #[arg(long = "modes", value_delimiter = ',', default_values_t = [100usize, 200, 400])]
        modes: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral run evaluated on geometric grids: hmin,t,R,rel_error.
    NonuniformEval {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates a stored field at listed points: x,y,re,im.
    EvalPoints {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the acceptance checks and prints a PASS/FAIL table.
    Verify {
        /// Restrict to these criteria (1-11).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Run parameters: a config file, then `--set` pairs, then explicit flags.
#[derive(Args, Default)]
struct RunArgs {
    /// Flat key = value file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    backend: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    hmin: Option<String>,
    #[arg(long)]
    mean: Option<String>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long = "T")]
    t: Option<String>,
    #[arg(long)]
    disks: Option<String>,
    #[arg(long)]
    eval: Option<String>,
    #[arg(long)]
    eval_hmin: Option<String>,
    #[arg(long)]
    eval_mean: Option<String>,
    #[arg(long)]
    cadence: Option<String>,
    #[arg(long)]
    energy: Option<String>,
}

impl RunArgs {
    fn builder(&self, defaults: &[(&str, &str)]) -> Result<ConfigBuilder> {
        let mut b = ConfigBuilder::default();
        for (k, v) in defaults {
            b.apply(k, v)?;
        }
        if let Some(path) = &self.config {
            b.apply_text(&read(path)?)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("--set expects key=value, got '{kv}'")))?;
            b.apply(k, v)?;
        }
        let flags = [
            ("backend", &self.backend),
            ("L", &self.l),
            ("m", &self.m),
            ("grid", &self.grid),
            ("hmin", &self.hmin),
            ("mean", &self.mean),
            ("profile", &self.profile),
            ("tau", &self.tau),
            ("T", &self.t),
            ("disks", &self.disks),
            ("eval", &self.eval),
            ("eval_hmin", &self.eval_hmin),
            ("eval_mean", &self.eval_mean),
            ("cadence", &self.cadence),
            ("energy", &self.energy),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                b.apply(k, v)?;
            }
        }
        Ok(b)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn finish(mut out: Box<dyn Write>) -> Result<()> {
    out.flush().map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Profile { q, rmax, n, out } => {
            let mut w = output(&out)?;
            experiment::write_profile(&mut w, q, rmax, n)?;
            finish(w)?;
        }
        Command::Bvp { n, out } => {
            let mut w = output(&out)?;
            experiment::write_bvp(&mut w, n)?;
            finish(w)?;
        }
        Command::ProfileError { q, n, rmax, out } => {
            let mut w = output(&out)?;
            experiment::write_profile_error(&mut w, &q, n, rmax)?;
            finish(w)?;
        }
        Command::Grid { l, hmin, mean, out } => {
            let mut w = output(&out)?;
            experiment::write_grid(&mut w, l, hmin, mean)?;
            finish(w)?;
        }
        Command::Laplacian { l, hmin, mean, out } => {
            let g = Grid1D::build_geometric(l, hmin, mean)?;
            let lap = FdLaplacian::assemble(&Grid2D::square(g, Layout::Physical))?;
            let mut w = output(&out)?;
            lap.dump_coordinate(&mut w).map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))?;
            finish(w)?;
        }
        Command::Regularity { l, m, reference, out } => {
            let mut w = output(&out)?;
            experiment::write_regularity(&mut w, l, &m, reference)?;
            finish(w)?;
        }
        Command::Preserve { run, save_field, out } => {
            let cfg = run.builder(&[])?.build()?;
            if save_field.is_some() && cfg.backend != BackendChoice::Spectral {
                return Err(Error::InvalidInput("--save-field needs the spectral backend".into()));
            }
            let mut w = output(&out)?;
            let result = run_preservation(&cfg)?;
            experiment::write_preservation(&mut w, &result)?;
            finish(w)?;
            if let Some(path) = save_field {
                let mut f = output(&Some(path))?;
                experiment::write_field(&mut f, cfg.l, cfg.m, &result.final_field.values)?;
                finish(f)?;
            }
        }
        Command::Resolution { run, modes, out } => {
            let base = run.builder(&[("tau", "0.02")])?.build()?;
            let study = ResolutionStudy { base, modes };
            study.validate()?;
            let mut w = output(&out)?;
            experiment::write_resolution(&mut w, &study)?;
            finish(w)?;
        }
        Command::NonuniformEval { run, out } => {
            let defaults = [("m", "200"), ("eval", "nonuniform"), ("eval_hmin", "0.05,0.1,0.2"), ("energy", "false")];
            let cfg = run.builder(&defaults)?.build()?;
            let mut w = output(&out)?;
            experiment::write_nonuniform_eval(&mut w, &run_preservation(&cfg)?)?;
            finish(w)?;
        }
        Command::EvalPoints { field, points, out } => {
            let f = experiment::read_field(&read(&field)?)?;
            let pts = experiment::read_points(&read(&points)?)?;
            let mut w = output(&out)?;
            experiment::write_eval_points(&mut w, &f, &pts)?;
            finish(w)?;
        }
        Command::Verify { only } => {
            let ids: Vec<u8> = if only.is_empty() { (1..=11).collect() } else { only };
            if let Some(bad) = ids.iter().find(|&&id| !(1..=11).contains(&id)) {
                return Err(Error::InvalidInput(format!("criterion {bad} does not exist (1-11)")));
            }
            let suite = Suite::new();
            let mut all = true;
            for id in ids {
                let r = suite.run(id);
                println!("{}", r.line());
                all &= r.passed;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invalid_input() { 2 } else { 3 })
        }
    }
}
