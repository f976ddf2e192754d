//! CSV drivers behind the `gpvortex` subcommands.
//!
//! Every table starts with a `#` comment line recording the parameters,
//! followed by a header row. Numbers use the shortest round-trip decimal
//! form, so identical inputs give byte-identical files.

use std::io::Write;

use crate::bvp::{relative_error_curve, solve_profile};
use crate::config::describe;
use crate::dynamics::{run_preservation, EvalChoice, PreservationRun, PreserveConfig};
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::pade::build_pade;
use crate::spectral::{physical_block, physical_grid, truncation_study, SpectralField};
use crate::verify::regularity_params;
use crate::C64;

fn io(e: std::io::Error) -> Error {
    Error::invalid(format!("cannot write output: {e}"))
}

/// `r,rho,rho_prime` on `n` equispaced radii in `[0, r_max]`.
pub fn write_profile(out: &mut dyn Write, q: usize, r_max: f64, n: usize) -> Result<()> {
    if !(r_max > 0.0) || n < 2 {
        return Err(Error::invalid("profile needs rmax > 0 and n >= 2"));
    }
    let p = build_pade(q)?;
    writeln!(out, "# profile q={q} rmax={r_max} n={n}").map_err(io)?;
    writeln!(out, "r,rho,rho_prime").map_err(io)?;
    for i in 0..n {
        let r = r_max * i as f64 / (n - 1) as f64;
        writeln!(out, "{r},{},{}", p.rho(r), p.rho_prime(r)).map_err(io)?;
    }
    Ok(())
}

/// `s,g,r,rho_num` at every node; the last radius is `inf`.
pub fn write_bvp(out: &mut dyn Write, n: usize) -> Result<()> {
    let prof = solve_profile(n)?;
    writeln!(out, "# bvp n={n} newton_iterations={} residual={:e}", prof.newton_iterations(), prof.discrete_residual())
        .map_err(io)?;
    writeln!(out, "s,g,r,rho_num").map_err(io)?;
    for (i, g) in prof.g().iter().enumerate() {
        let r = prof.radii().get(i).copied().unwrap_or(f64::INFINITY);
        writeln!(out, "{},{g},{r},{}", prof.s(i), g * g).map_err(io)?;
    }
    Ok(())
}

/// `r,rel_error` of `ρ_q` against the `N`-subdivision numerical profile
/// for each listed `q`, one column per order.
pub fn write_profile_error(out: &mut dyn Write, qs: &[usize], n: usize, r_max: f64) -> Result<()> {
    let num = solve_profile(n)?;
    let curves = qs
        .iter()
        .map(|&q| build_pade(q).map(|p| relative_error_curve(|r| p.rho(r), &num, r_max)))
        .collect::<Result<Vec<_>>>()?;
    let qs_txt: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
    writeln!(out, "# profile-error q={} n={n} rmax={r_max}", qs_txt.join(",")).map_err(io)?;
    let cols: Vec<String> = qs.iter().map(|q| format!("rel_error_q{q}")).collect();
    writeln!(out, "r,{}", cols.join(",")).map_err(io)?;
    for i in 0..curves.first().map_or(0, Vec::len) {
        let vals: Vec<String> = curves.iter().map(|c| c[i].1.to_string()).collect();
        writeln!(out, "{},{}", curves[0][i].0, vals.join(",")).map_err(io)?;
    }
    Ok(())
}

/// `i,x,h,w` of the geometric grid; `h` is the step to the next node.
pub fn write_grid(out: &mut dyn Write, l: f64, hmin: f64, mean: f64) -> Result<()> {
    let g = Grid1D::build_geometric(l, hmin, mean)?;
    writeln!(out, "# grid L={l} hmin={hmin} mean={mean} points={} stretch={}", g.len(), g.stretch_ratio())
        .map_err(io)?;
    writeln!(out, "i,x,h,w").map_err(io)?;
    for (i, (x, w)) in g.nodes().iter().zip(g.weights()).enumerate() {
        let h = g.steps().get(i).map_or(String::new(), |h| h.to_string());
        writeln!(out, "{i},{x},{h},{w}").map_err(io)?;
    }
    Ok(())
}

/// `q,ell,c,M,l2_error` for the five family members; `M = m²`.
pub fn write_regularity(out: &mut dyn Write, l: f64, m_list: &[usize], m_ref: usize) -> Result<()> {
    let rows = truncation_study(&regularity_params()?, m_list, m_ref, l)?;
    let ms: Vec<String> = m_list.iter().map(|m| m.to_string()).collect();
    writeln!(out, "# regularity L={l} m={} reference={m_ref}", ms.join(",")).map_err(io)?;
    writeln!(out, "q,ell,c,M,l2_error").map_err(io)?;
    for r in rows {
        let ell = r.params.ell.map_or("inf".to_string(), |e| e.to_string());
        writeln!(out, "{},{ell},{},{},{}", r.params.q, r.params.c, r.modes * r.modes, r.l2_error).map_err(io)?;
    }
    Ok(())
}

/// `t,R,rel_error,mass,energy` for a run with one evaluation set. The
/// energy column is empty when it was not recorded.
pub fn write_preservation(out: &mut dyn Write, run: &PreservationRun) -> Result<()> {
    if run.errors.len() != 1 {
        return Err(Error::invalid("the preserve table holds exactly one evaluation set"));
    }
    writeln!(out, "# preserve {} mass0={}", describe(&run.config), run.initial_mass).map_err(io)?;
    writeln!(out, "t,R,rel_error,mass,energy").map_err(io)?;
    for (k, t) in run.times.iter().enumerate() {
        let energy = run.energy[k].map_or(String::new(), |e| e.to_string());
        for (d, r) in run.config.disks.iter().enumerate() {
            writeln!(out, "{t},{r},{},{},{energy}", run.errors[0][k][d], run.mass[k]).map_err(io)?;
        }
    }
    Ok(())
}

/// `hmin,t,R,rel_error`, one block per geometric evaluation grid.
pub fn write_nonuniform_eval(out: &mut dyn Write, run: &PreservationRun) -> Result<()> {
    writeln!(out, "# nonuniform-eval {}", describe(&run.config)).map_err(io)?;
    writeln!(out, "hmin,t,R,rel_error").map_err(io)?;
    for (e, choice) in run.config.evals.iter().enumerate() {
        let hmin = match choice {
            EvalChoice::Nonuniform { hmin, .. } => hmin.to_string(),
            EvalChoice::Grid => "grid".to_string(),
        };
        for (k, t) in run.times.iter().enumerate() {
            for (d, r) in run.config.disks.iter().enumerate() {
                writeln!(out, "{hmin},{t},{r},{}", run.errors[e][k][d]).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Spectral runs with `m` doubled and `τ` halved together, from `(m₀, τ₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionStudy {
    pub base: PreserveConfig,
    pub modes: Vec<usize>,
}

impl ResolutionStudy {
    /// Configuration for `m`, with `τ = τ₀ m₀ / m`.
    pub fn config(&self, m: usize) -> PreserveConfig {
        let m0 = self.modes[0] as f64;
        PreserveConfig { m, tau: self.base.tau * m0 / m as f64, ..self.base.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::invalid("resolution study needs at least one mode count"));
        }
        self.modes.iter().try_for_each(|&m| self.config(m).validate())
    }
}

/// `m,tau,t,R,rel_error` for each resolution.
pub fn write_resolution(out: &mut dyn Write, study: &ResolutionStudy) -> Result<()> {
    study.validate()?;
    let ms: Vec<String> = study.modes.iter().map(|m| m.to_string()).collect();
    writeln!(out, "# resolution m={} {}", ms.join(","), describe(&study.base)).map_err(io)?;
    writeln!(out, "m,tau,t,R,rel_error").map_err(io)?;
    for &m in &study.modes {
        let cfg = study.config(m);
        let run = run_preservation(&cfg)?;
        for (k, t) in run.times.iter().enumerate() {
            for (d, r) in cfg.disks.iter().enumerate() {
                writeln!(out, "{m},{},{t},{r},{}", cfg.tau, run.errors[0][k][d]).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Writes the closed physical block of an `n`-mode mirrored field as
/// `x,y,re,im`, readable by [`read_field`].
pub fn write_field(out: &mut dyn Write, l: f64, n: usize, mirrored: &[C64]) -> Result<()> {
    let phys = physical_block(mirrored, n);
    writeln!(out, "# field L={l} n={n}").map_err(io)?;
    writeln!(out, "x,y,re,im").map_err(io)?;
    for ((x, y), v) in physical_grid(l, n)?.points().zip(phys) {
        writeln!(out, "{x},{y},{},{}", v.re, v.im).map_err(io)?;
    }
    Ok(())
}

fn data_rows(text: &str, columns: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == columns => rows.push(v),
            Err(_) if !header_seen && rows.is_empty() => header_seen = true,
            _ => return Err(Error::invalid(format!("line {}: expected {columns} numeric columns", i + 1))),
        }
    }
    Ok(rows)
}

/// Reads a file produced by [`write_field`] into its Fourier series.
pub fn read_field(text: &str) -> Result<SpectralField> {
    let meta = text
        .lines()
        .find(|l| l.starts_with("# field"))
        .ok_or_else(|| Error::invalid("field file lacks its '# field L=.. n=..' line"))?;
    let get = |key: &str| -> Result<&str> {
        meta.split_whitespace()
            .find_map(|w| w.strip_prefix(key))
            .ok_or_else(|| Error::invalid(format!("field file lacks {key}")))
    };
    let l: f64 = get("L=")?.parse().map_err(|_| Error::invalid("bad L in field file"))?;
    let n: usize = get("n=")?.parse().map_err(|_| Error::invalid("bad n in field file"))?;
    let rows = data_rows(text, 4)?;
    let values: Vec<C64> = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
    SpectralField::from_physical(l, n, &values)
}

/// Reads `x,y` rows (an optional header is skipped).
pub fn read_points(text: &str) -> Result<Vec<(f64, f64)>> {
    Ok(data_rows(text, 2)?.into_iter().map(|r| (r[0], r[1])).collect())
}

/// `x,y,re,im` of a stored field at arbitrary points.
pub fn write_eval_points(out: &mut dyn Write, field: &SpectralField, points: &[(f64, f64)]) -> Result<()> {
    let vals = field.eval_at_points(points)?;
    writeln!(out, "# eval-points L={} n={} points={}", field.half_width(), field.modes_per_axis(), points.len())
        .map_err(io)?;
    writeln!(out, "x,y,re,im").map_err(io)?;
    for ((x, y), v) in points.iter().zip(vals) {
        writeln!(out, "{x},{y},{},{}", v.re, v.im).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_vortex, ProfileChoice};
    use crate::spectral::mirrored_grid;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn profile_table() {
        let t = text(|o| write_profile(o, 2, 10.0, 11));
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "# profile q=2 rmax=10 n=11");
        assert_eq!(lines[1], "r,rho,rho_prime");
        assert_eq!(lines.len(), 13);
        assert!(lines[2].starts_with("0,0,0"));
    }

    #[test]
    fn grid_table_has_one_row_per_node() {
        let t = text(|o| write_grid(o, 20.0, 0.05, 0.2));
        assert_eq!(t.lines().count(), 2 + 201);
        assert!(t.lines().last().unwrap().starts_with("200,20,,"));
    }

    #[test]
    fn field_round_trip_and_evaluation() {
        let (l, n) = (4.0, 16);
        let d = ProfileChoice::Pade(4).build().unwrap();
        let f = build_vortex(&mirrored_grid(l, n).unwrap(), &d).unwrap();
        let t = text(|o| write_field(o, l, n, &f.values));
        let field = read_field(&t).unwrap();
        let direct = SpectralField::from_samples(l, n, &f.values).unwrap();
        for (a, b) in field.modes().iter().zip(direct.modes()) {
            assert_eq!(a, b);
        }
        let pts = read_points("x,y\n0.5,0.5\n-4,-4\n").unwrap();
        let out = text(|o| write_eval_points(o, &field, &pts));
        assert_eq!(out.lines().count(), 4);
        assert!(read_points("x,y\n1,2,3\n").is_err());
    }

    #[test]
    fn preserve_table_is_deterministic() {
        let cfg = PreserveConfig { m: 32, l: 8.0, tau: 0.1, t_final: 0.3, disks: vec![2.0, 5.0], ..Default::default() };
        let a = text(|o| write_preservation(o, &run_preservation(&cfg)?));
        let b = text(|o| write_preservation(o, &run_preservation(&cfg)?));
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 2 + 3 * 2);
        assert_eq!(a.lines().nth(1).unwrap(), "t,R,rel_error,mass,energy");
    }

    #[test]
    fn resolution_scales_the_step() {
        let s = ResolutionStudy {
            base: PreserveConfig { tau: 0.02, t_final: 1.0, ..Default::default() },
            modes: vec![100, 200, 400],
        };
        assert_eq!(s.config(400).tau, 0.005);
        assert!(s.validate().is_ok());
    }
}
