//! Flat `key = value` run configuration.
//!
//! ```text
//! # TSFD on a stretched grid
//! backend = fd
//! grid = geometric
//! hmin = 0.05
//! mean = 0.2
//! L = 20
//! profile = pade4
//! tau = 0.01
//! T = 10
//! disks = 2, 5, 10, 20, 30
//! ```
//!
//! `eval = nonuniform` together with `eval_hmin = 0.05, 0.1` adds one
//! evaluation set per listed `h_min` (spectral backend only).

use crate::dynamics::{BackendChoice, EvalChoice, FdGrid, PreserveConfig};
use crate::error::{Error, Result};

/// Keys understood by [`ConfigBuilder::apply`].
pub const KEYS: [&str; 15] = [
    "backend",
    "L",
    "m",
    "grid",
    "hmin",
    "mean",
    "profile",
    "tau",
    "T",
    "disks",
    "eval",
    "eval_hmin",
    "eval_mean",
    "cadence",
    "energy",
];

/// Pending evaluation settings; resolved once all keys are known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigBuilder {
    pub config: PreserveConfig,
    grid: String,
    hmin: f64,
    mean: f64,
    eval: String,
    eval_hmin: Vec<f64>,
    eval_mean: f64,
}

impl Default for ConfigBuilder {
    fn default() -> Self {
        ConfigBuilder {
            config: PreserveConfig::default(),
            grid: "geometric".into(),
            hmin: 0.05,
            mean: 0.2,
            eval: "grid".into(),
            eval_hmin: vec![0.05],
            eval_mean: 0.4,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::invalid(format!("{key}: cannot parse '{value}'")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| number(key, v)).collect()
}

impl ConfigBuilder {
    /// Sets one key. Unknown keys are rejected.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let c = &mut self.config;
        match key.trim() {
            "backend" => {
                c.backend = match value {
                    "spectral" => BackendChoice::Spectral,
                    "fd" => BackendChoice::Fd,
                    _ => return Err(Error::invalid(format!("backend must be spectral or fd, got '{value}'"))),
                }
            }
            "L" => c.l = number("L", value)?,
            "m" => c.m = number("m", value)?,
            "grid" => match value {
                "uniform" | "geometric" => self.grid = value.into(),
                _ => return Err(Error::invalid(format!("grid must be uniform or geometric, got '{value}'"))),
            },
            "hmin" => self.hmin = number("hmin", value)?,
            "mean" => self.mean = number("mean", value)?,
            "profile" => c.profile = value.parse()?,
            "tau" => c.tau = number("tau", value)?,
            "T" => c.t_final = number("T", value)?,
            "disks" => c.disks = list("disks", value)?,
            "eval" => match value {
                "grid" | "nonuniform" => self.eval = value.into(),
                _ => return Err(Error::invalid(format!("eval must be grid or nonuniform, got '{value}'"))),
            },
            "eval_hmin" => self.eval_hmin = list("eval_hmin", value)?,
            "eval_mean" => self.eval_mean = number("eval_mean", value)?,
            "cadence" => c.cadence = number("cadence", value)?,
            "energy" => {
                c.energy = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(Error::invalid(format!("energy must be true or false, got '{value}'"))),
                }
            }
            other => {
                return Err(Error::invalid(format!("unknown key '{other}' (known: {})", KEYS.join(", "))));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| Error::invalid(format!("line {}: expected key = value", n + 1)))?;
            self.apply(k, v).map_err(|e| match e {
                Error::InvalidInput(m) => Error::invalid(format!("line {}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Resolves grid and evaluation choices and validates the result.
    pub fn build(&self) -> Result<PreserveConfig> {
        let mut c = self.config.clone();
        c.fd_grid = match self.grid.as_str() {
            "uniform" => FdGrid::Uniform,
            _ => FdGrid::Geometric { hmin: self.hmin, mean: self.mean },
        };
        c.evals = match self.eval.as_str() {
            "grid" => vec![EvalChoice::Grid],
            _ => self.eval_hmin.iter().map(|&hmin| EvalChoice::Nonuniform { hmin, mean: self.eval_mean }).collect(),
        };
        c.validate()?;
        Ok(c)
    }
}

/// Parses a whole configuration file.
pub fn parse_config(text: &str) -> Result<PreserveConfig> {
    let mut b = ConfigBuilder::default();
    b.apply_text(text)?;
    b.build()
}

/// `key=value` pairs of a configuration, in [`KEYS`] order, for CSV headers.
pub fn describe(c: &PreserveConfig) -> String {
    let backend = match c.backend {
        BackendChoice::Spectral => "spectral",
        BackendChoice::Fd => "fd",
    };
    let grid = match (c.backend, c.fd_grid) {
        (BackendChoice::Spectral, _) => String::new(),
        (_, FdGrid::Uniform) => " grid=uniform".to_string(),
        (_, FdGrid::Geometric { hmin, mean }) => format!(" grid=geometric hmin={hmin} mean={mean}"),
    };
    let disks: Vec<String> = c.disks.iter().map(|d| d.to_string()).collect();
    let evals: Vec<String> = c.evals.iter().map(|e| e.label()).collect();
    format!(
        "backend={backend} L={} m={}{grid} profile={} tau={} T={} disks={} eval={} cadence={} energy={}",
        c.l,
        c.m,
        c.profile.label(),
        c.tau,
        c.t_final,
        disks.join(","),
        evals.join(","),
        c.cadence,
        c.energy
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ProfileChoice;

    #[test]
    fn parses_a_full_file() {
        let c = parse_config(
            "# comment\nbackend = fd\n grid=geometric\nhmin = 0.1 # trailing\nmean=0.4\nL=10\nprofile=num:1000\n\
             tau=0.02\nT=1\ndisks=2,5\ncadence=5\nenergy=false\n",
        )
        .unwrap();
        assert_eq!(c.backend, BackendChoice::Fd);
        assert_eq!(c.fd_grid, FdGrid::Geometric { hmin: 0.1, mean: 0.4 });
        assert_eq!(c.l, 10.0);
        assert_eq!(c.profile, ProfileChoice::Numerical(1000));
        assert_eq!(c.steps().unwrap(), 50);
        assert_eq!(c.disks, vec![2.0, 5.0]);
        assert_eq!(c.cadence, 5);
        assert!(!c.energy);
    }

    #[test]
    fn nonuniform_evaluation_sets() {
        let c = parse_config("m=200\neval=nonuniform\neval_hmin=0.05,0.1,0.2\n").unwrap();
        assert_eq!(c.evals.len(), 3);
        assert_eq!(c.evals[2], EvalChoice::Nonuniform { hmin: 0.2, mean: 0.4 });
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_config("L=20\nbogus=1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_config("tau=0.03\nT=1\n").unwrap_err().is_invalid_input());
        assert!(parse_config("no equals sign\n").is_err());
        assert!(parse_config("backend=fd\neval=nonuniform\n").is_err());
    }

    #[test]
    fn description_round_trips_the_essentials() {
        let d = describe(&PreserveConfig::default());
        assert!(d.starts_with("backend=spectral L=20 m=400"));
        assert!(d.contains("profile=pade4 tau=0.01 T=10 disks=2,5,10,20,30 eval=grid"));
    }
}
