//! Strang splitting of the Gross-Pitaevskii flow, vortex initial data, the
//! relative error on disks and steady-vortex preservation runs.

use crate::bvp::{solve_profile, RadialProfile};
use crate::error::{Error, Result};
use crate::fd::FdKinetic;
use crate::grid::{Closure, Grid1D, Grid2D, Layout};
use crate::krylov::LanczosOptions;
use crate::pade::{build_pade, PadeProfile};
use crate::spectral::{self, FamilyParams, SpectralField, SpectralKinetic};
use crate::C64;

/// Bound on `|ψ|` during steady-vortex runs; exceeding it means the run blew up.
pub const AMPLITUDE_GUARD: f64 = 1.5;

/// Samples of `ψ` on a grid at time `t`.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub grid: Grid2D,
    pub values: Vec<C64>,
    pub time: f64,
}

impl WaveField {
    pub fn new(grid: Grid2D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "{} samples do not fit a {}x{} grid",
                values.len(),
                grid.nx(),
                grid.ny()
            )));
        }
        Ok(WaveField { grid, values, time: 0.0 })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Exact potential flow: `v ← exp(iτ(1 - |v|²)/2) v`.
pub fn potential_step(values: &mut [C64], tau: f64) {
    for v in values.iter_mut() {
        let phase = 0.5 * tau * (1.0 - v.norm_sqr());
        *v *= C64::from_polar(1.0, phase);
    }
}

/// Kinetic sub-flow on a particular spatial discretisation.
#[derive(Debug, Clone)]
pub enum Backend {
    /// Mirrored Fourier modes with exact phases.
    Spectral(SpectralKinetic),
    /// Nonuniform finite differences with Lanczos exp-action.
    Fd(Box<FdKinetic>),
}

impl Backend {
    pub fn spectral(l: f64, n: usize) -> Result<Self> {
        Ok(Backend::Spectral(SpectralKinetic::new(l, n)?))
    }

    pub fn fd(grid: &Grid2D, opts: LanczosOptions) -> Result<Self> {
        Ok(Backend::Fd(Box::new(FdKinetic::new(grid, opts)?)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Spectral(_) => "spectral",
            Backend::Fd(_) => "fd",
        }
    }

    /// Grid on which fields for this backend live.
    pub fn grid(&self) -> Result<Grid2D> {
        match self {
            Backend::Spectral(s) => spectral::mirrored_grid(s.half_width(), s.modes_per_axis()),
            Backend::Fd(f) => Ok(f.laplacian().grid().clone()),
        }
    }

    fn check(&self, field: &WaveField) -> Result<()> {
        let ok = match self {
            Backend::Spectral(s) => {
                field.grid.layout == Layout::Mirrored
                    && field.grid.nx() == s.modes_per_axis()
                    && field.grid.ny() == s.modes_per_axis()
            }
            Backend::Fd(f) => {
                let g = f.laplacian().grid();
                field.grid.layout == Layout::Physical && field.grid.nx() == g.nx() && field.grid.ny() == g.ny()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("field grid does not match the {} backend", self.name())))
        }
    }

    /// `exp(τ A)` applied in place.
    pub fn kinetic(&self, values: &mut [C64], tau: f64) -> Result<()> {
        match self {
            Backend::Spectral(s) => {
                s.step(values, tau);
                Ok(())
            }
            Backend::Fd(f) => f.step(values, tau).map(|_| ()),
        }
    }

    /// Discrete mass of the physical domain.
    pub fn mass(&self, values: &[C64]) -> f64 {
        match self {
            Backend::Spectral(s) => s.mass(values),
            Backend::Fd(f) => f.mass(values),
        }
    }

    /// Energy diagnostic of the physical domain.
    pub fn energy(&self, values: &[C64]) -> f64 {
        match self {
            Backend::Spectral(s) => s.energy(values),
            Backend::Fd(f) => f.energy(values),
        }
    }
}

/// One Strang step: half potential, full kinetic, half potential.
pub fn strang_step(u: &mut WaveField, tau: f64, backend: &Backend) -> Result<()> {
    backend.check(u)?;
    potential_step(&mut u.values, 0.5 * tau);
    backend.kinetic(&mut u.values, tau)?;
    potential_step(&mut u.values, 0.5 * tau);
    u.time += tau;
    Ok(())
}

/// Radial density used to seed a vortex.
#[derive(Debug, Clone)]
pub enum Density {
    Pade(PadeProfile),
    Numerical(RadialProfile),
}

impl Density {
    pub fn rho(&self, r: f64) -> f64 {
        match self {
            Density::Pade(p) => p.rho(r),
            Density::Numerical(p) => p.rho(r),
        }
    }
}

/// Which density seeds the vortex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileChoice {
    Pade(usize),
    /// Boundary-value solution on `N` subdivisions.
    Numerical(usize),
}

impl ProfileChoice {
    pub fn build(self) -> Result<Density> {
        match self {
            ProfileChoice::Pade(q) => Ok(Density::Pade(build_pade(q)?)),
            ProfileChoice::Numerical(n) => Ok(Density::Numerical(solve_profile(n)?)),
        }
    }

    pub fn label(self) -> String {
        match self {
            ProfileChoice::Pade(q) => format!("pade{q}"),
            ProfileChoice::Numerical(n) => format!("num{n}"),
        }
    }
}

impl std::str::FromStr for ProfileChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(q) = s.strip_prefix("pade") {
            let q = q.parse().map_err(|_| Error::invalid(format!("bad profile '{s}'")))?;
            return Ok(ProfileChoice::Pade(q));
        }
        if let Some(n) = s.strip_prefix("num") {
            let n = n.trim_start_matches(':');
            let n = if n.is_empty() {
                5000
            } else {
                n.parse().map_err(|_| Error::invalid(format!("bad profile '{s}'")))?
            };
            return Ok(ProfileChoice::Numerical(n));
        }
        Err(Error::invalid(format!("unknown profile '{s}' (expected pade2|pade3|pade4|num[:N])")))
    }
}

/// `√ρ(r) e^{iθ}` at a point; exactly zero at the origin.
pub fn vortex_value(density: &Density, x: f64, y: f64) -> C64 {
    let r = x.hypot(y);
    C64::from_polar(density.rho(r).max(0.0).sqrt(), y.atan2(x))
}

/// Samples the straight vortex on `grid`. Mirrored grids are filled from the
/// closed physical block so the extension is exactly even.
pub fn build_vortex(grid: &Grid2D, density: &Density) -> Result<WaveField> {
    let values = match grid.layout {
        Layout::Physical => grid.points().map(|(x, y)| vortex_value(density, x, y)).collect(),
        Layout::Mirrored => {
            let n = grid.nx();
            let l = -grid.gx.bounds().0;
            let phys: Vec<C64> =
                spectral::physical_grid(l, n)?.points().map(|(x, y)| vortex_value(density, x, y)).collect();
            spectral::mirror_extend(&phys, n)?
        }
    };
    WaveField::new(grid.clone(), values)
}

/// `max_{0 < r_i ≤ R} |ψ_n - ψ₀| / |ψ₀|` over paired samples.
pub fn relative_error(psi_n: &[C64], psi_0: &[C64], radii: &[f64], disk: f64) -> Result<f64> {
    if !(disk > 0.0) {
        return Err(Error::invalid(format!("disk radius must be positive, got {disk}")));
    }
    let mut found = false;
    let mut worst = 0.0_f64;
    for ((a, b), &r) in psi_n.iter().zip(psi_0).zip(radii) {
        if r > 0.0 && r <= disk {
            found = true;
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    if found {
        Ok(worst)
    } else {
        Err(Error::invalid(format!("no evaluation point with 0 < r <= {disk}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Spectral,
    Fd,
}

/// Grid family for the finite-difference backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdGrid {
    /// `m` equispaced points per axis.
    Uniform,
    Geometric {
        hmin: f64,
        mean: f64,
    },
}

/// Where the error metric is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalChoice {
    /// The backend's own nodes in the physical domain.
    Grid,
    /// Nodes of a geometric grid, reached by evaluating the Fourier series.
    Nonuniform { hmin: f64, mean: f64 },
}

impl EvalChoice {
    pub fn label(&self) -> String {
        match self {
            EvalChoice::Grid => "grid".into(),
            EvalChoice::Nonuniform { hmin, mean } => format!("geometric:{hmin}:{mean}"),
        }
    }
}

/// Full description of a preservation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PreserveConfig {
    pub backend: BackendChoice,
    pub l: f64,
    /// Spectral: modes per axis of the mirrored domain. Uniform FD: points per axis.
    pub m: usize,
    pub fd_grid: FdGrid,
    pub profile: ProfileChoice,
    pub tau: f64,
    pub t_final: f64,
    pub disks: Vec<f64>,
    pub evals: Vec<EvalChoice>,
    /// Record diagnostics every `cadence` steps (and always at the end).
    pub cadence: usize,
    pub energy: bool,
    pub lanczos: LanczosOptions,
}

/// Default disk radii; the largest covers the whole physical square.
pub const DEFAULT_DISKS: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 30.0];

impl Default for PreserveConfig {
    fn default() -> Self {
        PreserveConfig {
            backend: BackendChoice::Spectral,
            l: 20.0,
            m: 400,
            fd_grid: FdGrid::Geometric { hmin: 0.05, mean: 0.2 },
            profile: ProfileChoice::Pade(4),
            tau: 0.01,
            t_final: 10.0,
            disks: DEFAULT_DISKS.to_vec(),
            evals: vec![EvalChoice::Grid],
            cadence: 1,
            energy: true,
            lanczos: LanczosOptions::default(),
        }
    }
}

impl PreserveConfig {
    /// Number of steps, requiring `T/τ` to be an integer.
    pub fn steps(&self) -> Result<usize> {
        if !(self.tau > 0.0 && self.t_final > 0.0) {
            return Err(Error::invalid("tau and T must be positive"));
        }
        let n = (self.t_final / self.tau).round();
        if (n * self.tau - self.t_final).abs() > 1e-9 * self.t_final || n < 1.0 {
            return Err(Error::invalid(format!("T/tau = {} is not an integer", self.t_final / self.tau)));
        }
        Ok(n as usize)
    }

    /// Checks every parameter before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.steps()?;
        if !(self.l > 0.0) {
            return Err(Error::invalid(format!("L must be positive, got {}", self.l)));
        }
        if self.disks.is_empty() || self.disks.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::invalid("disk radii must be positive"));
        }
        if self.evals.is_empty() {
            return Err(Error::invalid("at least one evaluation set is needed"));
        }
        if self.cadence == 0 {
            return Err(Error::invalid("cadence must be at least 1"));
        }
        match self.profile {
            ProfileChoice::Pade(q) if !(2..=4).contains(&q) => {
                return Err(Error::invalid(format!("Padé order must be 2, 3 or 4, got {q}")))
            }
            ProfileChoice::Numerical(n) if n < crate::bvp::MIN_SUBDIVISIONS => {
                return Err(Error::invalid(format!("profile N = {n} is too small")))
            }
            _ => {}
        }
        match self.backend {
            BackendChoice::Spectral => {
                if self.m < 4 || !self.m.is_multiple_of(2) {
                    return Err(Error::invalid(format!("spectral m must be even and >= 4, got {}", self.m)));
                }
            }
            BackendChoice::Fd => {
                if self.evals.iter().any(|e| *e != EvalChoice::Grid) {
                    return Err(Error::invalid("off-grid evaluation needs the spectral backend"));
                }
                match self.fd_grid {
                    FdGrid::Uniform if self.m < 3 => {
                        return Err(Error::invalid(format!("fd m must be >= 3, got {}", self.m)))
                    }
                    FdGrid::Geometric { hmin, mean } if !(hmin > 0.0 && hmin < mean && mean < self.l) => {
                        return Err(Error::invalid("need 0 < hmin < mean < L"))
                    }
                    _ => {}
                }
            }
        }
        for e in &self.evals {
            if let EvalChoice::Nonuniform { hmin, mean } = *e {
                if !(hmin > 0.0 && hmin < mean && mean < self.l) {
                    return Err(Error::invalid("need 0 < eval hmin < eval mean < L"));
                }
            }
        }
        Ok(())
    }

    pub fn fd_grid_1d(&self) -> Result<Grid1D> {
        match self.fd_grid {
            FdGrid::Uniform => Grid1D::build_uniform(self.l, self.m, Closure::Closed),
            FdGrid::Geometric { hmin, mean } => Grid1D::build_geometric(self.l, hmin, mean),
        }
    }
}

/// Points at which the error is measured together with the exact `ψ₀`.
#[derive(Debug, Clone)]
pub struct EvalSet {
    pub choice: EvalChoice,
    pub radii: Vec<f64>,
    pub psi0: Vec<C64>,
    source: EvalSource,
}

#[derive(Debug, Clone)]
enum EvalSource {
    /// Indices into the field samples.
    Nodes(Vec<usize>),
    /// Tensor grid evaluated through the Fourier series.
    Tensor { xs: Vec<f64>, ys: Vec<f64> },
}

impl EvalSet {
    fn build(choice: EvalChoice, grid: &Grid2D, density: &Density, l: f64) -> Result<Self> {
        let (points, source): (Vec<(f64, f64)>, EvalSource) = match choice {
            EvalChoice::Grid => {
                // Mirrored grids: the nodes of [-L, L)², i.e. the first n/2 per axis.
                let (nx, ny) = match grid.layout {
                    Layout::Physical => (grid.nx(), grid.ny()),
                    Layout::Mirrored => (grid.nx() / 2, grid.ny() / 2),
                };
                let mut pts = Vec::with_capacity(nx * ny);
                let mut idx = Vec::with_capacity(nx * ny);
                for iy in 0..ny {
                    for ix in 0..nx {
                        pts.push((grid.gx.nodes()[ix], grid.gy.nodes()[iy]));
                        idx.push(grid.index(ix, iy));
                    }
                }
                (pts, EvalSource::Nodes(idx))
            }
            EvalChoice::Nonuniform { hmin, mean } => {
                let g = Grid1D::build_geometric(l, hmin, mean)?;
                let xs = g.nodes().to_vec();
                let pts = xs.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
                (pts, EvalSource::Tensor { xs: xs.clone(), ys: xs })
            }
        };
        Ok(EvalSet {
            choice,
            radii: points.iter().map(|&(x, y)| x.hypot(y)).collect(),
            psi0: points.iter().map(|&(x, y)| vortex_value(density, x, y)).collect(),
            source,
        })
    }

    fn sample(&self, field: &WaveField, spectral: Option<&SpectralField>) -> Result<Vec<C64>> {
        match &self.source {
            EvalSource::Nodes(idx) => Ok(idx.iter().map(|&i| field.values[i]).collect()),
            EvalSource::Tensor { xs, ys } => spectral
                .ok_or_else(|| Error::invalid("off-grid evaluation needs the spectral backend"))?
                .eval_tensor(xs, ys),
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Recorded diagnostics of one run.
#[derive(Debug, Clone)]
pub struct PreservationRun {
    pub config: PreserveConfig,
    pub times: Vec<f64>,
    /// `errors[e][k][d]`: evaluation set `e`, record `k`, disk `d`.
    pub errors: Vec<Vec<Vec<f64>>>,
    pub mass: Vec<f64>,
    pub initial_mass: f64,
    pub energy: Vec<Option<f64>>,
    pub final_field: WaveField,
}

impl PreservationRun {
    /// `max_n |m_n - m_0| / m_0`.
    pub fn mass_drift(&self) -> f64 {
        self.mass.iter().map(|m| ((m - self.initial_mass) / self.initial_mass).abs()).fold(0.0, f64::max)
    }

    /// Error series of evaluation set `e` on disk `d`.
    pub fn series(&self, e: usize, d: usize) -> Vec<f64> {
        self.errors[e].iter().map(|rec| rec[d]).collect()
    }
}

/// Runs `T/τ` Strang steps from the steady vortex, recording the relative
/// error on every disk and evaluation set, the mass and optionally the energy.
pub fn run_preservation(cfg: &PreserveConfig) -> Result<PreservationRun> {
    cfg.validate()?;
    let n_steps = cfg.steps()?;
    let density = cfg.profile.build()?;
    let backend = match cfg.backend {
        BackendChoice::Spectral => Backend::spectral(cfg.l, cfg.m)?,
        BackendChoice::Fd => {
            let g = cfg.fd_grid_1d()?;
            Backend::fd(&Grid2D::square(g, Layout::Physical), cfg.lanczos)?
        }
    };
    let grid = backend.grid()?;
    let mut field = build_vortex(&grid, &density)?;
    let sets = cfg.evals.iter().map(|&e| EvalSet::build(e, &grid, &density, cfg.l)).collect::<Result<Vec<_>>>()?;
    let needs_modes = sets.iter().any(|s| matches!(s.source, EvalSource::Tensor { .. }));
    let initial_mass = backend.mass(&field.values);

    let mut run = PreservationRun {
        config: cfg.clone(),
        times: Vec::new(),
        errors: vec![Vec::new(); sets.len()],
        mass: Vec::new(),
        initial_mass,
        energy: Vec::new(),
        final_field: field.clone(),
    };
    for step in 1..=n_steps {
        strang_step(&mut field, cfg.tau, &backend)?;
        field.time = step as f64 * cfg.tau;
        if step % cfg.cadence != 0 && step != n_steps {
            continue;
        }
        if !field.is_finite() || field.max_abs() > AMPLITUDE_GUARD {
            return Err(Error::Numerical(format!(
                "|psi| left the admissible range at t = {} (max {})",
                field.time,
                field.max_abs()
            )));
        }
        let modes = if needs_modes { Some(SpectralField::from_samples(cfg.l, cfg.m, &field.values)?) } else { None };
        for (e, set) in sets.iter().enumerate() {
            let vals = set.sample(&field, modes.as_ref())?;
            let rec = cfg
                .disks
                .iter()
                .map(|&r| relative_error(&vals, &set.psi0, &set.radii, r))
                .collect::<Result<Vec<_>>>()?;
            run.errors[e].push(rec);
        }
        run.times.push(field.time);
        run.mass.push(backend.mass(&field.values));
        run.energy.push(cfg.energy.then(|| backend.energy(&field.values)));
    }
    run.final_field = field;
    Ok(run)
}

/// Observed temporal order from runs with `τ`, `τ/2`, `τ/4` on the spectral
/// backend: `log₂(‖u_τ - u_{τ/2}‖ / ‖u_{τ/2} - u_{τ/4}‖)`.
pub fn richardson_order(p: FamilyParams, l: f64, n: usize, tau: f64, t_final: f64) -> Result<f64> {
    let backend = Backend::spectral(l, n)?;
    let grid = backend.grid()?;
    let init = WaveField::new(grid, spectral::mirror_extend(&spectral::regularity_family(p, l, n)?, n)?)?;
    let run = |dt: f64| -> Result<Vec<C64>> {
        let steps = (t_final / dt).round() as usize;
        let mut f = init.clone();
        for _ in 0..steps {
            strang_step(&mut f, dt, &backend)?;
        }
        Ok(f.values)
    };
    let a = run(tau)?;
    let b = run(0.5 * tau)?;
    let c = run(0.25 * tau)?;
    let diff = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>().sqrt();
    Ok((diff(&a, &b) / diff(&b, &c)).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn potential_step_keeps_modulus() {
        let mut v = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.3, -0.4), C64::new(-1.2, 0.5)];
        let before: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        potential_step(&mut v, 0.7);
        assert_eq!(v[0], C64::new(1.0, 0.0));
        assert_eq!(v[1], C64::new(0.0, 0.0));
        for (z, b) in v.iter().zip(before) {
            assert!((z.norm() - b).abs() <= f64::EPSILON * b.max(1.0));
        }
    }

    #[test]
    fn vortex_samples() {
        let d = ProfileChoice::Pade(4).build().unwrap();
        let g = Grid2D::square(Grid1D::build_geometric(5.0, 0.1, 0.5).unwrap(), Layout::Physical);
        let f = build_vortex(&g, &d).unwrap();
        let c = g.nx() / 2;
        assert_eq!(f.values[g.index(c, c)], C64::new(0.0, 0.0));
        let v = vortex_value(&d, 0.0, 2.0);
        assert!((v.arg() - PI / 2.0).abs() < 1e-15);
        assert!((v.norm() - d.rho(2.0).sqrt()).abs() < 1e-15);
        assert_eq!(vortex_value(&d, 3.0, 0.0).arg(), 0.0);
    }

    #[test]
    fn relative_error_examples() {
        let psi0 = vec![C64::new(0.0, 0.0), C64::new(0.5, 0.5), C64::new(-0.2, 0.9)];
        let r = vec![0.0, 1.0, 2.0];
        assert_eq!(relative_error(&psi0, &psi0, &r, 5.0).unwrap(), 0.0);
        let scaled: Vec<C64> = psi0.iter().map(|z| z * 1.25).collect();
        assert!((relative_error(&scaled, &psi0, &r, 5.0).unwrap() - 0.25).abs() < 1e-15);
        let phi: f64 = 0.3;
        let rot: Vec<C64> = psi0.iter().map(|z| z * C64::from_polar(1.0, phi)).collect();
        let want = 2.0 * (phi / 2.0).sin().abs();
        assert!((relative_error(&rot, &psi0, &r, 5.0).unwrap() - want).abs() < 1e-15);
        assert!(relative_error(&psi0, &psi0, &r, 0.5).is_err());
    }

    #[test]
    fn background_is_a_fixed_point() {
        let spec = Backend::spectral(10.0, 32).unwrap();
        let g = Grid2D::square(Grid1D::build_geometric(5.0, 0.1, 0.5).unwrap(), Layout::Physical);
        let fd = Backend::fd(&g, LanczosOptions::default()).unwrap();
        for b in [spec, fd] {
            let grid = b.grid().unwrap();
            let mut f = WaveField::new(grid.clone(), vec![C64::new(1.0, 0.0); grid.len()]).unwrap();
            for _ in 0..3 {
                strang_step(&mut f, 0.05, &b).unwrap();
            }
            assert!(f.values.iter().all(|v| *v == C64::new(1.0, 0.0)), "{}", b.name());
        }
    }

    #[test]
    fn backend_mismatch_is_rejected() {
        let spec = Backend::spectral(10.0, 32).unwrap();
        let g = Grid2D::square(Grid1D::build_uniform(10.0, 17, Closure::Closed).unwrap(), Layout::Physical);
        let mut f = WaveField::new(g.clone(), vec![C64::new(1.0, 0.0); g.len()]).unwrap();
        assert!(strang_step(&mut f, 0.1, &spec).unwrap_err().is_invalid_input());
    }

    #[test]
    fn energy_of_constant_states() {
        let spec = Backend::spectral(3.0, 16).unwrap();
        let g = Grid2D::square(Grid1D::build_geometric(3.0, 0.1, 0.5).unwrap(), Layout::Physical);
        let fd = Backend::fd(&g, LanczosOptions::default()).unwrap();
        for b in [spec, fd] {
            let n = b.grid().unwrap().len();
            assert!(b.energy(&vec![C64::new(1.0, 0.0); n]).abs() < 1e-14);
            assert!((b.energy(&vec![C64::new(0.0, 0.0); n]) - 0.25 * 36.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_backward_returns_the_start() {
        let d = ProfileChoice::Pade(4).build().unwrap();
        let spec = Backend::spectral(8.0, 32).unwrap();
        let g = Grid2D::square(Grid1D::build_geometric(4.0, 0.1, 0.4).unwrap(), Layout::Physical);
        let fd = Backend::fd(&g, LanczosOptions::default()).unwrap();
        for b in [spec, fd] {
            let f0 = build_vortex(&b.grid().unwrap(), &d).unwrap();
            let mut f = f0.clone();
            strang_step(&mut f, 0.02, &b).unwrap();
            strang_step(&mut f, -0.02, &b).unwrap();
            let err = f.values.iter().zip(&f0.values).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
            assert!(err < 1e-11, "{}: {err}", b.name());
        }
    }

    #[test]
    fn profile_choice_parsing() {
        assert_eq!("pade3".parse::<ProfileChoice>().unwrap(), ProfileChoice::Pade(3));
        assert_eq!("num".parse::<ProfileChoice>().unwrap(), ProfileChoice::Numerical(5000));
        assert_eq!("num:800".parse::<ProfileChoice>().unwrap(), ProfileChoice::Numerical(800));
        assert!("bogus".parse::<ProfileChoice>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = PreserveConfig { tau: 0.03, t_final: 1.0, ..Default::default() };
        assert!(c.validate().is_err());
        c.tau = 0.01;
        assert!(c.validate().is_ok());
        c.backend = BackendChoice::Fd;
        c.evals = vec![EvalChoice::Nonuniform { hmin: 0.05, mean: 0.4 }];
        assert!(c.validate().is_err());
    }

    #[test]
    fn short_runs_record_every_step() {
        let cfg = PreserveConfig {
            m: 64,
            tau: 0.05,
            t_final: 0.5,
            disks: vec![2.0, 30.0],
            evals: vec![EvalChoice::Grid, EvalChoice::Nonuniform { hmin: 0.2, mean: 1.0 }],
            ..Default::default()
        };
        let run = run_preservation(&cfg).unwrap();
        assert_eq!(run.times.len(), 10);
        assert_eq!(run.errors.len(), 2);
        assert!(run.mass_drift() < 1e-12);
        assert!(run.energy.iter().all(|e| e.is_some()));
        let s = run.series(0, 0);
        assert!(s.iter().all(|v| v.is_finite() && *v > 0.0));

        let fd = PreserveConfig {
            backend: BackendChoice::Fd,
            l: 10.0,
            fd_grid: FdGrid::Geometric { hmin: 0.1, mean: 0.4 },
            cadence: 5,
            ..cfg
        };
        let fd = PreserveConfig { evals: vec![EvalChoice::Grid], ..fd };
        let run = run_preservation(&fd).unwrap();
        assert_eq!(run.times, vec![0.25, 0.5]);
        assert!(run.mass_drift() < 1e-12);
    }

    #[test]
    fn strang_splitting_is_second_order() {
        let p = FamilyParams::new(10.0, Some(5.0), 0).unwrap();
        let order = richardson_order(p, 20.0, 64, 0.02, 0.5).unwrap();
        assert!((order - 2.0).abs() < 0.2, "{order}");
    }
}
