//! Numerical vortex profile from the compactified amplitude equation.
//!
//! With `s = r/(1+r)` and `g(s) = f(r)`, the amplitude `f = √ρ` satisfies
//!
//! ```text
//! (s-1)⁴ g'' + 2(s-1)³ g' - (s-1)³/s g' - (s-1)²/s² g + (1-g²) g = 0
//! ```
//!
//! on `(0, 1]` with `g(0) = 0`, `g(1) = 1`. It is discretised with central
//! differences on `s_i = i/N` and solved by damped Newton iteration.

use crate::error::{Error, Result};

/// Smallest accepted number of subdivisions.
pub const MIN_SUBDIVISIONS: usize = 100;
const MAX_NEWTON: usize = 100;
const MAX_HALVINGS: usize = 20;
const UPDATE_TOL: f64 = 1e-12;

/// Tabulated solution `g(s_i)`, i = 0..=N, and the derived density.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    n: usize,
    g: Vec<f64>,
    /// `r_i = s_i/(1-s_i)` for i = 0..N-1.
    r: Vec<f64>,
    newton_iterations: usize,
}

struct Coefficients {
    second: Vec<f64>,
    first: Vec<f64>,
    zeroth: Vec<f64>,
}

impl Coefficients {
    fn new(n: usize) -> Self {
        let mut c = Coefficients {
            second: Vec::with_capacity(n - 1),
            first: Vec::with_capacity(n - 1),
            zeroth: Vec::with_capacity(n - 1),
        };
        for i in 1..n {
            let s = i as f64 / n as f64;
            let t = s - 1.0;
            c.second.push(t.powi(4));
            c.first.push(2.0 * t.powi(3) - t.powi(3) / s);
            c.zeroth.push(-(t * t) / (s * s));
        }
        c
    }
}

/// Interior residuals `F_i`, i = 1..N-1, for the full vector `g_0..g_N`.
fn residual(c: &Coefficients, g: &[f64], h: f64) -> Vec<f64> {
    (1..g.len() - 1)
        .map(|i| {
            let k = i - 1;
            let (gm, g0, gp) = (g[i - 1], g[i], g[i + 1]);
            c.second[k] * (gp - 2.0 * g0 + gm) / (h * h)
                + c.first[k] * (gp - gm) / (2.0 * h)
                + c.zeroth[k] * g0
                + (1.0 - g0 * g0) * g0
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::Numerical("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Numerical("singular tridiagonal system".into()));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Solves the profile equation on `N` subdivisions.
pub fn solve_profile(n: usize) -> Result<RadialProfile> {
    if n < MIN_SUBDIVISIONS {
        return Err(Error::invalid(format!(
            "N = {n} is too small to resolve the vortex core (need N >= {MIN_SUBDIVISIONS})"
        )));
    }
    let h = 1.0 / n as f64;
    let coeff = Coefficients::new(n);
    // g⁰(s) = s meets both boundary values.
    let mut g: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut f = residual(&coeff, &g, h);
    let mut fnorm = max_abs(&f);

    for iteration in 1..=MAX_NEWTON {
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let (a, b) = (coeff.second[k], coeff.first[k]);
            let gi = g[k + 1];
            lower[k] = a / (h * h) - b / (2.0 * h);
            diag[k] = -2.0 * a / (h * h) + coeff.zeroth[k] + 1.0 - 3.0 * gi * gi;
            upper[k] = a / (h * h) + b / (2.0 * h);
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;

        let mut step = 1.0;
        let mut trial = g.clone();
        let mut trial_f;
        let mut halvings = 0;
        loop {
            for (k, d) in delta.iter().enumerate() {
                trial[k + 1] = g[k + 1] + step * d;
            }
            trial_f = residual(&coeff, &trial, h);
            let tn = max_abs(&trial_f);
            if tn < fnorm || halvings == MAX_HALVINGS || tn == 0.0 {
                fnorm = tn;
                break;
            }
            step *= 0.5;
            halvings += 1;
        }
        g = trial;
        f = trial_f;
        let update = step * max_abs(&delta);
        if update <= UPDATE_TOL {
            let r = (0..n).map(|i| {
                let s = i as f64 * h;
                s / (1.0 - s)
            });
            return Ok(RadialProfile { n, g, r: r.collect(), newton_iterations: iteration });
        }
    }
    Err(Error::NewtonDivergence { iterations: MAX_NEWTON, residual: fnorm })
}

impl RadialProfile {
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    pub fn newton_iterations(&self) -> usize {
        self.newton_iterations
    }

    /// Node values `g_0..g_N`.
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    /// Mapped radii `r_0..r_{N-1}` (the node `s = 1` maps to infinity).
    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    /// Max-norm discrete residual over the interior nodes.
    pub fn discrete_residual(&self) -> f64 {
        let h = 1.0 / self.n as f64;
        max_abs(&residual(&Coefficients::new(self.n), &self.g, h))
    }

    /// Piecewise-linear interpolation of `g²` in `r`; beyond the last finite
    /// node the interpolation runs in `s` towards `g(1)² = 1`.
    pub fn rho(&self, r: f64) -> f64 {
        let last = self.n - 1;
        let r_last = self.r[last];
        if r <= 0.0 {
            return self.g[0] * self.g[0];
        }
        if r <= r_last {
            // first node with r_i >= r
            let j = self.r.partition_point(|&x| x < r);
            if self.r[j] == r {
                return self.g[j] * self.g[j];
            }
            let (r0, r1) = (self.r[j - 1], self.r[j]);
            let (v0, v1) = (self.g[j - 1].powi(2), self.g[j].powi(2));
            let t = (r - r0) / (r1 - r0);
            return v0 + t * (v1 - v0);
        }
        if r.is_infinite() {
            return 1.0;
        }
        let s = r / (1.0 + r);
        let s0 = self.s(last);
        let (v0, v1) = (self.g[last].powi(2), self.g[self.n].powi(2));
        let t = ((s - s0) / (1.0 - s0)).min(1.0);
        v0 + t * (v1 - v0)
    }

    /// Max-norm difference to a finer solution at the shared nodes.
    pub fn max_difference(&self, finer: &RadialProfile) -> Result<f64> {
        if !finer.n.is_multiple_of(self.n) {
            return Err(Error::invalid("finer grid must refine the coarse one by an integer factor"));
        }
        let stride = finer.n / self.n;
        Ok((0..=self.n).map(|i| (self.g[i] - finer.g[i * stride]).abs()).fold(0.0, f64::max))
    }
}

/// `|ρ(r) - ρ_num(r)| / ρ_num(r)` at the numerical nodes with `0 < r_i ≤ r_max`.
pub fn relative_error_curve(rho: impl Fn(f64) -> f64, profile: &RadialProfile, r_max: f64) -> Vec<(f64, f64)> {
    profile
        .radii()
        .iter()
        .enumerate()
        .filter(|(_, &r)| r > 0.0 && r <= r_max)
        .map(|(i, &r)| {
            let num = profile.g[i] * profile.g[i];
            (r, (rho(r) - num).abs() / num)
        })
        .collect()
}

/// Observed orders `log2(e_k / e_{k+1})` from successive differences of a
/// doubling sequence of solutions.
pub fn self_convergence_orders(ns: &[usize]) -> Result<Vec<f64>> {
    let sols = ns.iter().map(|&n| solve_profile(n)).collect::<Result<Vec<_>>>()?;
    let diffs = sols.windows(2).map(|w| w[0].max_difference(&w[1])).collect::<Result<Vec<_>>>()?;
    Ok(diffs.windows(2).map(|d| (d[0] / d[1]).log2()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pade::build_pade;

    #[test]
    fn rejects_coarse_grids() {
        assert!(solve_profile(50).unwrap_err().is_invalid_input());
    }

    #[test]
    fn thomas_matches_dense_solution() {
        // [2 1 0; 1 3 1; 0 1 4] x = [3, 5, 5] → x = [1, 1, 1]
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[2.0, 3.0, 4.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn converged_profile_properties() {
        let p = solve_profile(1000).unwrap();
        let g = p.g();
        assert_eq!(g[0], 0.0);
        assert_eq!(g[1000], 1.0);
        assert!(p.discrete_residual() <= 1e-10, "{}", p.discrete_residual());
        assert!(g.windows(2).all(|w| w[1] >= w[0] - 1e-10));
        assert!(g.iter().all(|&v| (0.0..=1.0 + 1e-10).contains(&v)));
    }

    #[test]
    fn interpolation_reproduces_nodes_and_limits() {
        let p = solve_profile(500).unwrap();
        assert_eq!(p.rho(0.0), 0.0);
        for i in [1, 7, 250, 499] {
            let r = p.radii()[i];
            assert_eq!(p.rho(r), p.g()[i] * p.g()[i]);
        }
        let r_last = *p.radii().last().unwrap();
        assert!(p.rho(r_last * 10.0) <= 1.0);
        assert!(p.rho(r_last * 10.0) >= p.rho(r_last));
        assert_eq!(p.rho(f64::INFINITY), 1.0);
    }

    #[test]
    fn most_nodes_lie_in_the_core_region() {
        let p = solve_profile(5000).unwrap();
        let inside = p.radii().iter().filter(|&&r| r <= 20.0).count();
        assert!(inside as f64 / p.radii().len() as f64 > 0.95);
    }

    #[test]
    fn pade4_is_close_to_the_numerical_profile() {
        let p = solve_profile(2000).unwrap();
        let pade = build_pade(4).unwrap();
        let curve = relative_error_curve(|r| pade.rho(r), &p, 20.0);
        let worst = curve.iter().map(|c| c.1).fold(0.0, f64::max);
        assert!(worst < 1e-3, "{worst}");
    }
}
