//! Mirrored Fourier representation on `Ω = [-L, 3L)²`.
//!
//! A field on the closed physical square `[-L, L]²` is reflected about
//! `x = L` and `y = L`. With `n` modes per axis the mirrored grid has step
//! `h = 4L/n`; the physical block holds `n/2 + 1` nodes per axis and node
//! `j > n/2` of the extension takes the value of node `n - j`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft2::Fft2;
use crate::grid::{Closure, Grid1D, Grid2D, Layout};
use crate::pade::{build_pade, PadeProfile};
use crate::C64;

fn check_modes(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("mode count per axis must be even and >= 4, got {n}")));
    }
    Ok(())
}

/// Periodic grid of the mirrored domain with `n` nodes per axis.
pub fn mirrored_grid(l: f64, n: usize) -> Result<Grid2D> {
    check_modes(n)?;
    let g = Grid1D::uniform(-l, 3.0 * l, n, Closure::Periodic)?;
    Ok(Grid2D::square(g, Layout::Mirrored))
}

/// Closed physical grid `[-L, L]²` underlying an `n`-mode mirrored grid.
pub fn physical_grid(l: f64, n: usize) -> Result<Grid2D> {
    check_modes(n)?;
    let g = Grid1D::uniform(-l, l, n / 2 + 1, Closure::Closed)?;
    Ok(Grid2D::square(g, Layout::Physical))
}

/// Index in the physical block of mirrored index `j`.
#[inline]
pub fn reflect(j: usize, n: usize) -> usize {
    if j <= n / 2 {
        j
    } else {
        n - j
    }
}

/// Even extension of `(n/2+1)²` closed physical samples to `n²` periodic ones.
pub fn mirror_extend(physical: &[C64], n: usize) -> Result<Vec<C64>> {
    check_modes(n)?;
    let p = n / 2 + 1;
    if physical.len() != p * p {
        return Err(Error::invalid(format!(
            "expected {}x{} physical samples for {n} modes, got {}",
            p,
            p,
            physical.len()
        )));
    }
    let mut out = Vec::with_capacity(n * n);
    for jy in 0..n {
        let ry = reflect(jy, n);
        for jx in 0..n {
            out.push(physical[ry * p + reflect(jx, n)]);
        }
    }
    Ok(out)
}

/// Closed physical block of a mirrored field.
pub fn physical_block(mirrored: &[C64], n: usize) -> Vec<C64> {
    let p = n / 2 + 1;
    (0..p).flat_map(|jy| (0..p).map(move |jx| mirrored[jy * n + jx])).collect()
}

/// Signed frequency of FFT bin `idx`: `{-n/2, …, n/2 - 1}`.
#[inline]
pub fn frequency(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Wavenumber `k = 2π ν / (4L)` of FFT bin `idx`.
#[inline]
pub fn wavenumber(idx: usize, n: usize, l: f64) -> f64 {
    2.0 * PI * frequency(idx, n) as f64 / (4.0 * l)
}

/// Trigonometric polynomial `u(x, y) = Σ c_k e^{i(k₁(x+L) + k₂(y+L))}`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    l: f64,
    n: usize,
    modes: Vec<C64>,
}

impl SpectralField {
    /// Coefficients of the interpolant of `n × n` mirrored samples.
    pub fn from_samples(l: f64, n: usize, samples: &[C64]) -> Result<Self> {
        check_modes(n)?;
        if samples.len() != n * n {
            return Err(Error::invalid("sample count does not match the mode count"));
        }
        let mut modes = samples.to_vec();
        Fft2::new(n, n).forward(&mut modes);
        let s = 1.0 / (n * n) as f64;
        modes.iter_mut().for_each(|c| *c *= s);
        Ok(SpectralField { l, n, modes })
    }

    /// Mirrors closed physical samples and transforms them.
    pub fn from_physical(l: f64, n: usize, physical: &[C64]) -> Result<Self> {
        Self::from_samples(l, n, &mirror_extend(physical, n)?)
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn modes_per_axis(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[C64] {
        &self.modes
    }

    /// Values on the mirrored grid.
    pub fn to_samples(&self) -> Vec<C64> {
        let mut v: Vec<C64> = self.modes.iter().map(|c| c * (self.n * self.n) as f64).collect();
        Fft2::new(self.n, self.n).inverse(&mut v);
        v
    }

    /// Exact kinetic flow: mode `k` gains `e^{-iτ|k|²/2}`.
    pub fn kinetic_step(&mut self, tau: f64) {
        let n = self.n;
        let k: Vec<f64> = (0..n).map(|i| wavenumber(i, n, self.l)).collect();
        for (iy, row) in self.modes.chunks_mut(n).enumerate() {
            for (ix, c) in row.iter_mut().enumerate() {
                *c *= C64::from_polar(1.0, -0.5 * tau * (k[ix] * k[ix] + k[iy] * k[iy]));
            }
        }
    }

    /// `Σ |c|²`; equals the mean of `|u|²` over the mirrored grid.
    pub fn mode_energy(&self) -> f64 {
        self.modes.iter().map(|c| c.norm_sqr()).sum()
    }

    fn check_points(&self, pts: impl Iterator<Item = f64>) -> Result<()> {
        let (lo, hi) = (-self.l, 3.0 * self.l);
        for v in pts {
            if !(v >= lo && v < hi) {
                return Err(Error::invalid(format!("evaluation coordinate {v} lies outside [{lo}, {hi})")));
            }
        }
        Ok(())
    }

    fn phases(&self, coord: f64) -> Vec<C64> {
        (0..self.n).map(|i| C64::from_polar(1.0, wavenumber(i, self.n, self.l) * (coord + self.l))).collect()
    }

    /// Direct summation of the series at arbitrary points.
    pub fn eval_at_points(&self, pts: &[(f64, f64)]) -> Result<Vec<C64>> {
        self.check_points(pts.iter().flat_map(|p| [p.0, p.1]))?;
        let n = self.n;
        Ok(pts
            .par_iter()
            .map(|&(x, y)| {
                let ex = self.phases(x);
                let ey = self.phases(y);
                self.modes
                    .chunks(n)
                    .zip(&ey)
                    .map(|(row, e)| row.iter().zip(&ex).map(|(c, f)| c * f).sum::<C64>() * e)
                    .sum()
            })
            .collect())
    }

    /// Evaluation on the tensor grid `xs × ys` (row-major, `x` fastest),
    /// by two successive one-dimensional sums.
    pub fn eval_tensor(&self, xs: &[f64], ys: &[f64]) -> Result<Vec<C64>> {
        self.check_points(xs.iter().chain(ys).copied())?;
        let n = self.n;
        let ex: Vec<Vec<C64>> = xs.iter().map(|&x| self.phases(x)).collect();
        let ey: Vec<Vec<C64>> = ys.iter().map(|&y| self.phases(y)).collect();
        // t[ky][a] = Σ_kx c[ky][kx] e^{i kx x_a}
        let t: Vec<Vec<C64>> = self
            .modes
            .par_chunks(n)
            .map(|row| ex.iter().map(|e| row.iter().zip(e).map(|(c, f)| c * f).sum()).collect())
            .collect();
        let na = xs.len();
        Ok(ey
            .par_iter()
            .flat_map_iter(|e| {
                let mut acc = vec![C64::new(0.0, 0.0); na];
                for (ky, f) in e.iter().enumerate() {
                    for (a, v) in t[ky].iter().enumerate() {
                        acc[a] += v * f;
                    }
                }
                acc
            })
            .collect())
    }

    /// Coefficients kept by truncation to `m` modes per axis, zero elsewhere.
    pub fn truncated(&self, m: usize) -> Result<SpectralField> {
        check_modes(m)?;
        if m > self.n {
            return Err(Error::invalid("cannot truncate to more modes than available"));
        }
        let half = (m / 2) as i64;
        let keep = |i: usize| {
            let f = frequency(i, self.n);
            f >= -half && f < half
        };
        let n = self.n;
        let modes = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, c)| if keep(i % n) && keep(i / n) { *c } else { C64::new(0.0, 0.0) })
            .collect();
        Ok(SpectralField { l: self.l, n, modes })
    }
}

/// Returns a copy of `s` advanced by the exact kinetic flow over `τ`.
pub fn kinetic_step_spectral(s: &SpectralField, tau: f64) -> SpectralField {
    let mut out = s.clone();
    out.kinetic_step(tau);
    out
}

/// Kinetic propagator acting on mirrored samples in place.
#[derive(Debug, Clone)]
pub struct SpectralKinetic {
    l: f64,
    n: usize,
    fft: Fft2,
    k2: Vec<f64>,
}

impl SpectralKinetic {
    pub fn new(l: f64, n: usize) -> Result<Self> {
        check_modes(n)?;
        if !(l > 0.0) {
            return Err(Error::invalid(format!("half-width must be positive, got {l}")));
        }
        let k: Vec<f64> = (0..n).map(|i| wavenumber(i, n, l)).collect();
        let k2 = (0..n * n).map(|i| k[i % n] * k[i % n] + k[i / n] * k[i / n]).collect();
        Ok(SpectralKinetic { l, n, fft: Fft2::new(n, n), k2 })
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn modes_per_axis(&self) -> usize {
        self.n
    }

    /// `u ← mean + F⁻¹[e^{-iτ|k|²/2} F(u - mean)]`. The mean is the
    /// invariant `k = 0` mode; splitting it off keeps constants exact.
    pub fn step(&self, u: &mut [C64], tau: f64) {
        let mean = u.iter().sum::<C64>() / (u.len() as f64);
        u.iter_mut().for_each(|v| *v -= mean);
        self.fft.forward(u);
        for (c, k2) in u.iter_mut().zip(&self.k2) {
            *c *= C64::from_polar(1.0, -0.5 * tau * k2);
        }
        self.fft.inverse(u);
        u.iter_mut().for_each(|v| *v += mean);
    }

    /// Physical-domain mass `h² Σ|u|² / 4` (trapezoidal on `[-L, L]²`).
    pub fn mass(&self, u: &[C64]) -> f64 {
        let h = 4.0 * self.l / self.n as f64;
        h * h * u.iter().map(|v| v.norm_sqr()).sum::<f64>() / 4.0
    }

    /// `∂u/∂x` and `∂u/∂y` on the mirrored grid (Nyquist derivative zeroed).
    pub fn gradient(&self, u: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let n = self.n;
        let mut c = u.to_vec();
        self.fft.forward(&mut c);
        let k: Vec<f64> = (0..n).map(|i| if i == n / 2 { 0.0 } else { wavenumber(i, n, self.l) }).collect();
        let mut dx = c.clone();
        let mut dy = c;
        for i in 0..n * n {
            dx[i] *= C64::new(0.0, k[i % n]);
            dy[i] *= C64::new(0.0, k[i / n]);
        }
        self.fft.inverse(&mut dx);
        self.fft.inverse(&mut dy);
        (dx, dy)
    }

    /// `½∫|∇u|² + ¼∫(1 - |u|²)²` over the physical domain.
    pub fn energy(&self, u: &[C64]) -> f64 {
        let (dx, dy) = self.gradient(u);
        let h = 4.0 * self.l / self.n as f64;
        let s: f64 = (0..u.len())
            .map(|i| 0.5 * (dx[i].norm_sqr() + dy[i].norm_sqr()) + 0.25 * (1.0 - u[i].norm_sqr()).powi(2))
            .sum();
        h * h * s / 4.0
    }
}

/// Width parameter of the regularity family; `None` means ℓ = ∞.
pub type Width = Option<f64>;

/// One member `(q, ℓ, c)` of the regularity family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub q: f64,
    pub ell: Width,
    pub c: u8,
}

impl FamilyParams {
    pub fn new(q: f64, ell: Width, c: u8) -> Result<Self> {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::invalid(format!("exponent q must be >= 1, got {q}")));
        }
        if let Some(e) = ell {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::invalid(format!("width must be positive or infinite, got {e}")));
            }
        }
        if c > 1 {
            return Err(Error::invalid(format!("phase switch must be 0 or 1, got {c}")));
        }
        Ok(FamilyParams { q, ell, c })
    }

    /// `(1 - (1 - ρ₄^{q/2}) g) e^{c i θ g}` with `g = e^{-r²/ℓ²}`.
    pub fn value(&self, rho4: &PadeProfile, x: f64, y: f64) -> C64 {
        let r2 = x * x + y * y;
        let g = self.ell.map_or(1.0, |e| (-r2 / (e * e)).exp());
        let theta = y.atan2(x);
        let amp = 1.0 - (1.0 - rho4.rho(r2.sqrt()).powf(0.5 * self.q)) * g;
        C64::from_polar(amp, self.c as f64 * theta * g)
    }

    pub fn label(&self) -> String {
        let ell = self.ell.map_or("inf".to_string(), |e| format!("{e}"));
        format!("q={} ell={} c={}", self.q, ell, self.c)
    }
}

/// Samples the family on the closed physical grid of an `n`-mode expansion.
pub fn regularity_family(p: FamilyParams, l: f64, n: usize) -> Result<Vec<C64>> {
    let rho4 = build_pade(4)?;
    let g = physical_grid(l, n)?;
    Ok(g.points().map(|(x, y)| p.value(&rho4, x, y)).collect())
}

/// One row of the truncation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRow {
    pub params: FamilyParams,
    pub modes: usize,
    pub l2_error: f64,
}

/// L² distance between the `m_ref`-mode interpolant of each family member
/// and its truncation to each `m` in `m_list`.
///
/// On the reference grid the trapezoidal norm of a trigonometric
/// polynomial equals `(4L)² Σ|c|²`, so the error is the discarded tail.
pub fn truncation_study(params: &[FamilyParams], m_list: &[usize], m_ref: usize, l: f64) -> Result<Vec<TruncationRow>> {
    let m_max = m_list.iter().copied().max().unwrap_or(0);
    if m_ref < 4 * m_max {
        return Err(Error::invalid(format!(
            "reference resolution {m_ref} must be at least four times the largest truncation {m_max}"
        )));
    }
    for &m in m_list {
        check_modes(m)?;
    }
    let mut rows = Vec::new();
    for &p in params {
        let field = SpectralField::from_physical(l, m_ref, &regularity_family(p, l, m_ref)?)?;
        for &m in m_list {
            let tail = discarded_energy(&field, m);
            rows.push(TruncationRow { params: p, modes: m, l2_error: 4.0 * l * tail.sqrt() });
        }
    }
    Ok(rows)
}

fn discarded_energy(field: &SpectralField, m: usize) -> f64 {
    let n = field.n;
    let half = (m / 2) as i64;
    let keep = |i: usize| {
        let f = frequency(i, n);
        f >= -half && f < half
    };
    field.modes.iter().enumerate().filter(|(i, _)| !(keep(i % n) && keep(i / n))).map(|(_, c)| c.norm_sqr()).sum()
}

/// Log-log slopes `-Δlog e / Δlog m` between consecutive rows.
pub fn convergence_slopes(rows: &[TruncationRow]) -> Vec<f64> {
    rows.windows(2)
        .map(|w| -(w[1].l2_error / w[0].l2_error).ln() / (w[1].modes as f64 / w[0].modes as f64).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(l: f64, n: usize, f: impl Fn(f64, f64) -> C64) -> Vec<C64> {
        physical_grid(l, n).unwrap().points().map(|(x, y)| f(x, y)).collect()
    }

    #[test]
    fn mirror_is_even_and_restricts_back() {
        let (l, n) = (2.0, 8);
        let phys = sample(l, n, |x, y| C64::new(x, y * y));
        let m = mirror_extend(&phys, n).unwrap();
        assert_eq!(physical_block(&m, n), phys);
        let g = mirrored_grid(l, n).unwrap();
        let xs = g.gx.nodes();
        // u(2L - x) = u(x) at every pair of mirrored nodes
        for jy in 0..n {
            for jx in 1..n {
                let partner = n - jx;
                assert!((xs[jx] + xs[partner] - 2.0 * l).abs() < 1e-12);
                assert_eq!(m[jy * n + jx], m[jy * n + partner]);
            }
        }
        // tent: f(x) = x on the seam row
        assert_eq!(m[n / 2].re, l);
        assert_eq!(m[n / 2 + 1].re, m[n / 2 - 1].re);
    }

    #[test]
    fn constants_survive_everything() {
        let (l, n) = (3.0, 16);
        let phys = vec![C64::new(0.7, -0.2); (n / 2 + 1) * (n / 2 + 1)];
        let mut f = SpectralField::from_physical(l, n, &phys).unwrap();
        f.kinetic_step(0.37);
        let v = f.eval_at_points(&[(0.3, -1.1), (2.9, 2.2)]).unwrap();
        assert!(v.iter().all(|z| (z - C64::new(0.7, -0.2)).norm() < 1e-14));
        let kin = SpectralKinetic::new(l, n).unwrap();
        let mut u = vec![C64::new(1.0, 0.0); n * n];
        kin.step(&mut u, 0.5);
        assert!(u.iter().all(|z| *z == C64::new(1.0, 0.0)));
    }

    #[test]
    fn single_mode_gains_the_exact_phase() {
        let (l, n) = (PI / 2.0, 16);
        let g = mirrored_grid(l, n).unwrap();
        let k1 = wavenumber(3, n, l);
        let k2 = wavenumber(n - 2, n, l);
        let u: Vec<C64> = g.points().map(|(x, y)| C64::from_polar(1.0, k1 * (x + l) + k2 * (y + l))).collect();
        let mut f = SpectralField::from_samples(l, n, &u).unwrap();
        let tau = 0.25;
        f.kinetic_step(tau);
        let c = f.modes()[(n - 2) * n + 3];
        let want = C64::from_polar(1.0, -0.5 * tau * (k1 * k1 + k2 * k2));
        assert!((c - want).norm() < 1e-13);
    }

    #[test]
    fn flows_compose_and_conserve_mass() {
        let (l, n) = (4.0, 32);
        let phys = sample(l, n, |x, y| C64::from_polar((-(x * x + y * y) / 3.0).exp(), x));
        let f = SpectralField::from_physical(l, n, &phys).unwrap();
        let a = kinetic_step_spectral(&kinetic_step_spectral(&f, 0.1), 0.25);
        let b = kinetic_step_spectral(&f, 0.35);
        let err = a.modes().iter().zip(b.modes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
        assert!(((a.mode_energy() - f.mode_energy()) / f.mode_energy()).abs() < 1e-13);

        let kin = SpectralKinetic::new(l, n).unwrap();
        let mut u = mirror_extend(&phys, n).unwrap();
        let m0 = kin.mass(&u);
        for _ in 0..20 {
            kin.step(&mut u, 0.05);
        }
        assert!(((kin.mass(&u) - m0) / m0).abs() < 1e-13);
    }

    #[test]
    fn point_evaluation_matches_inverse_transform() {
        let (l, n) = (5.0, 24);
        let phys = sample(l, n, |x, y| C64::new((0.4 * x).cos() * (y / 5.0).tanh(), x * y / 25.0));
        let f = SpectralField::from_physical(l, n, &phys).unwrap();
        let g = mirrored_grid(l, n).unwrap();
        let pts: Vec<_> = g.points().collect();
        let direct = f.eval_at_points(&pts).unwrap();
        let samples = f.to_samples();
        let err = direct.iter().zip(&samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        let tensor = f.eval_tensor(g.gx.nodes(), g.gy.nodes()).unwrap();
        let err = tensor.iter().zip(&samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(f.eval_at_points(&[(3.0 * l, 0.0)]).is_err());
        assert!(f.eval_at_points(&[(0.0, -l - 1e-9)]).is_err());
    }

    #[test]
    fn family_members() {
        let rho4 = build_pade(4).unwrap();
        let straight = FamilyParams::new(1.0, None, 1).unwrap();
        let v = straight.value(&rho4, 0.0, 2.0);
        assert!((v.norm() - rho4.rho(2.0).sqrt()).abs() < 1e-15);
        assert!((v.arg() - PI / 2.0).abs() < 1e-15);
        for p in [FamilyParams::new(10.0, Some(5.0), 0).unwrap(), FamilyParams::new(3.0, Some(2.0), 1).unwrap()] {
            assert_eq!(p.value(&rho4, 0.0, 0.0), C64::new(0.0, 0.0));
        }
        assert!(FamilyParams::new(0.5, None, 0).is_err());
        assert!(FamilyParams::new(1.0, Some(-1.0), 0).is_err());
        assert!(FamilyParams::new(1.0, None, 2).is_err());
    }

    #[test]
    fn truncation_to_the_reference_is_exact() {
        let p = [FamilyParams::new(10.0, Some(5.0), 0).unwrap()];
        let rows = truncation_study(&p, &[16, 32], 128, 20.0).unwrap();
        assert!(rows[1].l2_error < rows[0].l2_error);
        let field = SpectralField::from_physical(20.0, 64, &regularity_family(p[0], 20.0, 64).unwrap()).unwrap();
        assert_eq!(discarded_energy(&field, 64), 0.0);
        assert!(truncation_study(&p, &[64], 128, 20.0).unwrap_err().is_invalid_input());
    }
}
