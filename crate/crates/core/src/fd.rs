//! Nonuniform finite-difference Laplacian with Neumann closure, its
//! trapezoidal symmetrisation and the exp-action kinetic propagator.

use std::io::Write;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{Closure, Grid1D, Grid2D, GridKind};
use crate::krylov::{expmv, LanczosOptions, LanczosStats};
use crate::C64;

/// Tolerance for the symmetry certificate of `W A`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Tridiagonal three-point operator on one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil1D {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Stencil1D {
    /// Nonuniform second-derivative stencil; the end rows are
    /// `(-2/h₁², 2/h₁²)` and its mirror image.
    pub fn new(grid: &Grid1D) -> Result<Self> {
        if grid.kind() == GridKind::Uniform(Closure::Periodic) {
            return Err(Error::invalid("finite differences need a closed grid"));
        }
        let h = grid.steps();
        let m = grid.len();
        if m < 3 {
            return Err(Error::invalid(format!("finite differences need m >= 3, got {m}")));
        }
        if let Some(bad) = h.iter().find(|&&s| !(s > 0.0)) {
            return Err(Error::invalid(format!("degenerate step {bad}")));
        }
        let mut lower = vec![0.0; m];
        let mut upper = vec![0.0; m];
        upper[0] = 2.0 / (h[0] * h[0]);
        lower[m - 1] = 2.0 / (h[m - 2] * h[m - 2]);
        for i in 1..m - 1 {
            let (hl, hr) = (h[i - 1], h[i]);
            lower[i] = 2.0 / (hl * (hl + hr));
            upper[i] = 2.0 / (hr * (hl + hr));
        }
        // -2/(h_{i-1} h_i) equals -(lower + upper); written this way the
        // row sums vanish in floating point as well.
        let diag = lower.iter().zip(&upper).map(|(l, u)| -(l + u)).collect();
        Ok(Stencil1D { lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `(i, j)` of the dense matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.lower[i]
        } else if i + 1 == j {
            self.upper[i]
        } else {
            0.0
        }
    }

    /// `out = A x` on a strided line; the neighbour sum is formed first.
    #[inline]
    fn apply_line(&self, x: &[C64], out: &mut [C64], offset: usize, stride: usize, add: bool) {
        let m = self.len();
        for i in 0..m {
            let at = |k: usize| x[offset + k * stride];
            let nb = match i {
                0 => at(1) * self.upper[0],
                _ if i == m - 1 => at(m - 2) * self.lower[m - 1],
                _ => at(i - 1) * self.lower[i] + at(i + 1) * self.upper[i],
            };
            let v = nb + at(i) * self.diag[i];
            let o = &mut out[offset + i * stride];
            if add {
                *o += v;
            } else {
                *o = v;
            }
        }
    }

    /// `max |(WA)_{ij} - (WA)_{ji}|` and `max |WA|` for weights `w`.
    pub fn symmetry_defect(&self, w: &[f64]) -> (f64, f64) {
        let m = self.len();
        let mut defect = 0.0_f64;
        let mut size = 0.0_f64;
        for i in 0..m {
            size = size.max((w[i] * self.diag[i]).abs());
            if i + 1 < m {
                let a = w[i] * self.upper[i];
                let b = w[i + 1] * self.lower[i + 1];
                defect = defect.max((a - b).abs());
                size = size.max(a.abs()).max(b.abs());
            }
        }
        (defect, size)
    }
}

/// Two-dimensional operator `I ⊗ A_x + A_y ⊗ I` with tensor weights.
#[derive(Debug, Clone)]
pub struct FdLaplacian {
    grid: Grid2D,
    sx: Stencil1D,
    sy: Stencil1D,
    w: Vec<f64>,
}

impl FdLaplacian {
    pub fn assemble(grid: &Grid2D) -> Result<Self> {
        let sx = Stencil1D::new(&grid.gx)?;
        let sy = Stencil1D::new(&grid.gy)?;
        Ok(FdLaplacian { grid: grid.clone(), sx, sy, w: grid.weights() })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn stencil_x(&self) -> &Stencil1D {
        &self.sx
    }

    pub fn stencil_y(&self) -> &Stencil1D {
        &self.sy
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `out = A x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for iy in 0..ny {
            self.sx.apply_line(x, out, iy * nx, 1, false);
        }
        for ix in 0..nx {
            self.sy.apply_line(x, out, ix, nx, true);
        }
    }

    /// Applies only the `x` (or `y`) factor.
    pub fn apply_axis(&self, x: &[C64], out: &mut [C64], along_x: bool) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        if along_x {
            for iy in 0..ny {
                self.sx.apply_line(x, out, iy * nx, 1, false);
            }
        } else {
            for ix in 0..nx {
                self.sy.apply_line(x, out, ix, nx, false);
            }
        }
    }

    /// `max |(WA)_{ij} - (WA)_{ji}|` and `max |WA|` over the 2D operator.
    pub fn symmetry_defect(&self) -> (f64, f64) {
        let (wx, wy) = (self.grid.gx.weights(), self.grid.gy.weights());
        let (nx, ny) = (wx.len(), wy.len());
        let (sx, sy) = (&self.sx, &self.sy);
        let mut defect = 0.0_f64;
        let mut size = 0.0_f64;
        for iy in 0..ny {
            for ix in 0..nx {
                let w = wx[ix] * wy[iy];
                size = size.max((w * (sx.diag[ix] + sy.diag[iy])).abs());
                if ix + 1 < nx {
                    let a = w * sx.upper[ix];
                    let b = wx[ix + 1] * wy[iy] * sx.lower[ix + 1];
                    defect = defect.max((a - b).abs());
                    size = size.max(a.abs()).max(b.abs());
                }
                if iy + 1 < ny {
                    let a = w * sy.upper[iy];
                    let b = wx[ix] * wy[iy + 1] * sy.lower[iy + 1];
                    defect = defect.max((a - b).abs());
                    size = size.max(a.abs()).max(b.abs());
                }
            }
        }
        (defect, size)
    }

    /// Certifies that `W A` is symmetric and returns `A_w = W^{1/2} A W^{-1/2}`.
    pub fn symmetrize(&self) -> Result<SymmetricLaplacian<'_>> {
        let (defect, size) = self.symmetry_defect();
        if defect > SYMMETRY_TOL * size {
            return Err(Error::Asymmetric { asymmetry: defect / size, tolerance: SYMMETRY_TOL });
        }
        Ok(SymmetricLaplacian { lap: self, sqrt_w: self.w.iter().map(|w| w.sqrt()).collect() })
    }

    /// Dense `A` (small grids only).
    pub fn dense(&self) -> DMatrix<f64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let n = nx * ny;
        let mut a = DMatrix::zeros(n, n);
        for iy in 0..ny {
            for ix in 0..nx {
                let row = iy * nx + ix;
                for jx in ix.saturating_sub(1)..(ix + 2).min(nx) {
                    a[(row, iy * nx + jx)] += self.sx.entry(ix, jx);
                }
                for jy in iy.saturating_sub(1)..(iy + 2).min(ny) {
                    a[(row, jy * nx + ix)] += self.sy.entry(iy, jy);
                }
            }
        }
        a
    }

    /// Writes the `x` factor `A₁` as `row col value` lines (1-based).
    pub fn dump_coordinate<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let m = self.sx.len();
        writeln!(out, "% {m} {m}")?;
        for i in 0..m {
            for j in i.saturating_sub(1)..(i + 2).min(m) {
                writeln!(out, "{} {} {:e}", i + 1, j + 1, self.sx.entry(i, j))?;
            }
        }
        Ok(())
    }
}

/// `A_w = W^{1/2} A W^{-1/2}`, symmetric by construction of the weights.
#[derive(Debug, Clone)]
pub struct SymmetricLaplacian<'a> {
    lap: &'a FdLaplacian,
    sqrt_w: Vec<f64>,
}

impl SymmetricLaplacian<'_> {
    /// `z = W^{1/2} y`.
    pub fn to_weighted(&self, y: &[C64]) -> Vec<C64> {
        y.iter().zip(&self.sqrt_w).map(|(v, s)| v * s).collect()
    }

    /// `y = W^{-1/2} z`.
    pub fn from_weighted(&self, z: &[C64]) -> Vec<C64> {
        z.iter().zip(&self.sqrt_w).map(|(v, s)| v / s).collect()
    }

    /// Dense `A_w` (small grids only).
    pub fn dense(&self) -> DMatrix<f64> {
        let mut a = self.lap.dense();
        let n = a.nrows();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] *= self.sqrt_w[i] / self.sqrt_w[j];
            }
        }
        a
    }
}

/// Kinetic sub-flow `y ↦ exp((iτ/2) A) y` by Lanczos exp-action.
#[derive(Debug, Clone)]
pub struct FdKinetic {
    lap: FdLaplacian,
    opts: LanczosOptions,
}

impl FdKinetic {
    pub fn new(grid: &Grid2D, opts: LanczosOptions) -> Result<Self> {
        let lap = FdLaplacian::assemble(grid)?;
        lap.symmetrize()?;
        Ok(FdKinetic { lap, opts })
    }

    pub fn laplacian(&self) -> &FdLaplacian {
        &self.lap
    }

    /// Advances `y` by `τ` in place.
    pub fn step(&self, y: &mut [C64], tau: f64) -> Result<LanczosStats> {
        let apply = |x: &[C64], out: &mut [C64]| self.lap.apply(x, out);
        let (z, stats) = expmv(&apply, self.lap.weights(), y, 0.5 * tau, &self.opts)?;
        y.copy_from_slice(&z);
        Ok(stats)
    }

    /// Discrete mass `wᵀ|y|²`.
    pub fn mass(&self, y: &[C64]) -> f64 {
        self.lap.weights().iter().zip(y).map(|(w, v)| w * v.norm_sqr()).sum()
    }

    /// `½∫|∇y|² + ¼∫(1 - |y|²)²` with centred nonuniform first differences
    /// (zero normal derivative on the boundary) and trapezoidal weights.
    pub fn energy(&self, y: &[C64]) -> f64 {
        let g = self.lap.grid();
        let (nx, ny) = (g.nx(), g.ny());
        let dx = first_difference(g.gx.steps());
        let dy = first_difference(g.gy.steps());
        let w = self.lap.weights();
        let mut e = 0.0;
        for iy in 0..ny {
            for ix in 0..nx {
                let i = iy * nx + ix;
                let gx = derivative(&dx, ix, |k| y[iy * nx + k]);
                let gy = derivative(&dy, iy, |k| y[k * nx + ix]);
                let d = 0.5 * (gx.norm_sqr() + gy.norm_sqr()) + 0.25 * (1.0 - y[i].norm_sqr()).powi(2);
                e += w[i] * d;
            }
        }
        e
    }
}

/// Coefficients `(c₋, c₀, c₊)` of the centred first derivative per node;
/// the end nodes get zero rows.
fn first_difference(h: &[f64]) -> Vec<(f64, f64, f64)> {
    let m = h.len() + 1;
    let mut c = vec![(0.0, 0.0, 0.0); m];
    for i in 1..m - 1 {
        let (hl, hr) = (h[i - 1], h[i]);
        c[i] = (-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr)));
    }
    c
}

fn derivative(c: &[(f64, f64, f64)], i: usize, at: impl Fn(usize) -> C64) -> C64 {
    if i == 0 || i + 1 == c.len() {
        return C64::new(0.0, 0.0);
    }
    let (a, b, d) = c[i];
    at(i - 1) * a + at(i) * b + at(i + 1) * d
}

/// Dense `exp((iτ/2) A_w)` acting on `W^{1/2} y`, mapped back; an
/// independent check of the Lanczos propagator on small grids.
pub fn dense_kinetic_step(lap: &FdLaplacian, y: &[C64], tau: f64) -> Result<Vec<C64>> {
    if lap.len() > 4096 {
        return Err(Error::invalid("dense propagation is limited to 4096 unknowns"));
    }
    let sym = lap.symmetrize()?;
    let aw = sym.dense().map(|v| C64::new(0.0, 0.5 * tau * v));
    let e = aw.exp();
    let z = nalgebra::DVector::from_vec(sym.to_weighted(y));
    let out: Vec<C64> = (e * z).iter().copied().collect();
    Ok(sym.from_weighted(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Layout;

    fn geometric2d(l: f64) -> Grid2D {
        Grid2D::square(Grid1D::build_geometric(l, 0.05, 0.2).unwrap(), Layout::Physical)
    }

    #[test]
    fn uniform_interior_stencil() {
        let g = Grid1D::build_uniform(1.0, 11, Closure::Closed).unwrap();
        let s = Stencil1D::new(&g).unwrap();
        let h2 = 0.2 * 0.2;
        assert!((s.lower()[4] * h2 - 1.0).abs() < 1e-12);
        assert!((s.diag()[4] * h2 + 2.0).abs() < 1e-12);
        assert!((s.upper()[4] * h2 - 1.0).abs() < 1e-12);
        assert!((s.upper()[0] * h2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_on_quadratics_and_constants() {
        let g = Grid2D::square(Grid1D::build_geometric(5.0, 0.1, 0.5).unwrap(), Layout::Physical);
        let lap = FdLaplacian::assemble(&g).unwrap();
        let ones = vec![C64::new(1.0, 0.0); lap.len()];
        let mut out = vec![C64::new(9.0, 9.0); lap.len()];
        lap.apply(&ones, &mut out);
        assert!(out.iter().all(|v| *v == C64::new(0.0, 0.0)));
        let x2: Vec<C64> = g.points().map(|(x, _)| C64::new(x * x, 0.0)).collect();
        lap.apply_axis(&x2, &mut out, true);
        let nx = g.nx();
        for iy in 0..g.ny() {
            for ix in 1..nx - 1 {
                assert!((out[iy * nx + ix].re - 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn weighted_operator_is_symmetric() {
        let lap = FdLaplacian::assemble(&geometric2d(20.0)).unwrap();
        let (defect, size) = lap.symmetry_defect();
        assert!(defect <= SYMMETRY_TOL * size, "{defect} vs {size}");
        assert!(lap.symmetrize().is_ok());
    }

    #[test]
    fn symmetrized_uniform_4x4() {
        // A_w differs from A only in the couplings with the end nodes, by √2
        let g = Grid1D::build_uniform(1.5, 4, Closure::Closed).unwrap();
        let g2 = Grid2D::new(g.clone(), Grid1D::build_uniform(1.0, 3, Closure::Closed).unwrap(), Layout::Physical);
        let lap = FdLaplacian::assemble(&g2).unwrap();
        let aw = lap.symmetrize().unwrap().dense();
        assert!((&aw - aw.transpose()).amax() < 1e-12);
        let s = Stencil1D::new(&g).unwrap();
        let a01 = s.entry(0, 1);
        // middle row: nodes 4, 5, 6 are ix = 0, 1, 2 with x-weights h/2, h, h
        assert!((aw[(4, 5)] - a01 / 2f64.sqrt()).abs() < 1e-12);
        assert!((aw[(5, 4)] - a01 / 2f64.sqrt()).abs() < 1e-12);
        assert!((aw[(5, 6)] - s.entry(1, 2)).abs() < 1e-12);
    }

    #[test]
    fn symmetrized_spectrum_is_nonpositive() {
        let g = Grid2D::square(Grid1D::build_uniform(1.0, 8, Closure::Closed).unwrap(), Layout::Physical);
        let lap = FdLaplacian::assemble(&g).unwrap();
        let aw = lap.symmetrize().unwrap().dense();
        let sym = (&aw + aw.transpose()) * 0.5;
        let eig = nalgebra::SymmetricEigen::new(sym);
        assert!(eig.eigenvalues.iter().all(|&l| l <= 1e-10));
    }

    #[test]
    fn lanczos_agrees_with_dense_exponential() {
        let g = Grid2D::square(Grid1D::build_geometric(4.0, 0.2, 0.5).unwrap(), Layout::Physical);
        let kin = FdKinetic::new(&g, LanczosOptions::default()).unwrap();
        let y0: Vec<C64> = g.points().map(|(x, y)| C64::new((-(x * x + y * y) / 4.0).exp(), x / 4.0)).collect();
        for tau in [0.01, 0.1, 1.0] {
            let mut y = y0.clone();
            kin.step(&mut y, tau).unwrap();
            let want = dense_kinetic_step(kin.laplacian(), &y0, tau).unwrap();
            let err = y.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "tau={tau}: {err}");
        }
    }

    #[test]
    fn kinetic_step_conserves_mass() {
        let g = geometric2d(5.0);
        let kin = FdKinetic::new(&g, LanczosOptions::default()).unwrap();
        let mut y: Vec<C64> =
            g.points().map(|(x, y)| C64::from_polar(1.0 - (-(x * x + y * y)).exp(), y.atan2(x))).collect();
        let m0 = kin.mass(&y);
        for _ in 0..50 {
            kin.step(&mut y, 0.01).unwrap();
        }
        assert!(((kin.mass(&y) - m0) / m0).abs() < 1e-12);
    }

    #[test]
    fn constants_are_stationary() {
        let g = geometric2d(5.0);
        let kin = FdKinetic::new(&g, LanczosOptions::default()).unwrap();
        let mut y = vec![C64::new(1.0, 0.0); g.len()];
        kin.step(&mut y, 0.3).unwrap();
        assert!(y.iter().all(|v| *v == C64::new(1.0, 0.0)));
    }

    #[test]
    fn coordinate_dump_lists_the_tridiagonal() {
        let g = Grid2D::square(Grid1D::build_uniform(1.0, 5, Closure::Closed).unwrap(), Layout::Physical);
        let lap = FdLaplacian::assemble(&g).unwrap();
        let mut buf = Vec::new();
        lap.dump_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 13);
    }
}
