//! One- and two-dimensional tensor grids with trapezoidal weights.

use crate::error::{Error, Result};

/// Whether the last node closes the interval or wraps around to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// `m` nodes including both end points, `h = (b - a)/(m - 1)`.
    Closed,
    /// `m` nodes on `[a, b)`, `h = (b - a)/m`; the step past the last node
    /// wraps to `a`.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind {
    Uniform(Closure),
    /// Steps grow by `1 + delta` away from the origin node.
    Geometric {
        delta: f64,
    },
}

/// Strictly increasing node set with its steps and quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x: Vec<f64>,
    h: Vec<f64>,
    w: Vec<f64>,
    kind: GridKind,
    lo: f64,
    hi: f64,
}

/// Acceptable range for the stretch ratio `K = h_max / h_min`.
pub const STRETCH_RANGE: (f64, f64) = (2.0, 50.0);

impl Grid1D {
    /// Equispaced grid on `[a, b]` (closed) or `[a, b)` (periodic).
    pub fn uniform(a: f64, b: f64, m: usize, closure: Closure) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("a grid needs at least 2 points, got {m}")));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::invalid(format!("invalid interval [{a}, {b}]")));
        }
        let len = b - a;
        let (x, h) = match closure {
            Closure::Closed => {
                let step = len / (m - 1) as f64;
                let mut x: Vec<f64> = (0..m).map(|i| a + i as f64 * step).collect();
                x[m - 1] = b;
                let h = x.windows(2).map(|p| p[1] - p[0]).collect();
                (x, h)
            }
            Closure::Periodic => {
                let step = len / m as f64;
                let x: Vec<f64> = (0..m).map(|i| a + i as f64 * step).collect();
                let mut h: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
                h.push(b - x[m - 1]);
                (x, h)
            }
        };
        let w = match closure {
            Closure::Closed => trapezoid(&h),
            // periodic trapezoid: each node owns the average of its two steps
            Closure::Periodic => (0..m).map(|i| 0.5 * (h[(i + m - 1) % m] + h[i])).collect(),
        };
        Ok(Grid1D { x, h, w, kind: GridKind::Uniform(closure), lo: a, hi: b })
    }

    /// Closed or periodic uniform grid on the symmetric interval `[-L, L]`.
    pub fn build_uniform(l: f64, m: usize, closure: Closure) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::invalid(format!("half-width must be positive, got {l}")));
        }
        Self::uniform(-l, l, m, closure)
    }

    /// Symmetric stretched grid on `[-L, L]` with the origin as a node.
    ///
    /// Each half has `n = round(L / mean)` steps `h_1 = h_min`,
    /// `h_{i+1} = (1 + δ) h_i` with δ chosen so the steps add up to `L`.
    pub fn build_geometric(l: f64, h_min: f64, mean: f64) -> Result<Self> {
        if !(h_min > 0.0 && h_min < mean && mean < l) {
            return Err(Error::invalid(format!(
                "need 0 < h_min < mean < L, got h_min = {h_min}, mean = {mean}, L = {l}"
            )));
        }
        let n = (l / mean).round() as usize;
        if h_min * n as f64 >= l {
            return Err(Error::invalid(format!(
                "no stretching reaches L = {l}: {n} steps of h_min = {h_min} already cover it"
            )));
        }
        let delta = solve_ratio(l, h_min, n)?;
        Ok(Self::geometric_from(l, h_min, 1.0 + delta, n))
    }

    fn geometric_from(l: f64, h1: f64, ratio: f64, n: usize) -> Self {
        let mut half = Vec::with_capacity(n);
        let mut step = h1;
        for _ in 0..n {
            half.push(step);
            step *= ratio;
        }
        // absorb the bisection residue so the last node sits on L
        let sum: f64 = half.iter().sum();
        let scale = l / sum;
        for s in &mut half {
            *s *= scale;
        }
        let mut right = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        right.push(0.0);
        for s in &half {
            acc += s;
            right.push(acc);
        }
        right[n] = l;
        let mut x: Vec<f64> = right[1..].iter().rev().map(|v| -v).collect();
        x.extend_from_slice(&right);
        let h: Vec<f64> = x.windows(2).map(|p| p[1] - p[0]).collect();
        let w = trapezoid(&h);
        Grid1D { x, h, w, kind: GridKind::Geometric { delta: ratio - 1.0 }, lo: -l, hi: l }
    }

    /// Nested refinement: every step is split in two so that the ratio
    /// becomes `(1 + δ)^{1/2}` and all old nodes are kept.
    pub fn refine(&self) -> Result<Self> {
        match self.kind {
            GridKind::Geometric { delta } => {
                let n = (self.x.len() - 1) / 2;
                let r = (1.0 + delta).sqrt();
                let h1 = self.h[n] / (1.0 + r);
                Ok(Self::geometric_from(self.hi, h1, r, 2 * n))
            }
            GridKind::Uniform(closure) => {
                let m = match closure {
                    Closure::Closed => 2 * self.x.len() - 1,
                    Closure::Periodic => 2 * self.x.len(),
                };
                Self::uniform(self.lo, self.hi, m, closure)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Steps `h_i = x_{i+1} - x_i`; periodic grids carry the wrap step last.
    pub fn steps(&self) -> &[f64] {
        &self.h
    }

    /// Trapezoidal weights, summing to the interval length.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `K = h_max / h_min`.
    pub fn stretch_ratio(&self) -> f64 {
        let (lo, hi) = self.h.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &s| (a.min(s), b.max(s)));
        hi / lo
    }

    /// True if `K` lies in [`STRETCH_RANGE`] or the grid is uniform.
    pub fn stretch_ok(&self) -> bool {
        match self.kind {
            GridKind::Uniform(_) => true,
            GridKind::Geometric { .. } => {
                let k = self.stretch_ratio();
                k >= STRETCH_RANGE.0 && k <= STRETCH_RANGE.1
            }
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, GridKind::Uniform(_))
    }

    /// Trapezoidal integral of nodal samples.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(f).map(|(w, v)| w * v).sum()
    }
}

/// `w = ½[h_1, h_1 + h_2, …, h_{m-1}]`.
pub fn trapezoid(h: &[f64]) -> Vec<f64> {
    let m = h.len() + 1;
    let mut w = vec![0.0; m];
    for (i, s) in h.iter().enumerate() {
        w[i] += 0.5 * s;
        w[i + 1] += 0.5 * s;
    }
    w
}

/// Bisection for δ in `h_min((1+δ)ⁿ - 1)/δ = L`.
fn solve_ratio(l: f64, h_min: f64, n: usize) -> Result<f64> {
    let total = |d: f64| h_min * ((1.0 + d).powi(n as i32) - 1.0) / d;
    let (mut lo, mut hi) = (1e-12, 1.0);
    if total(hi) < l {
        return Err(Error::invalid(format!("stretching beyond a factor 2 per step would be needed to reach L = {l}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < l {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Storage layout of a two-dimensional field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Samples of the physical domain `[-L, L]²`.
    Physical,
    /// Periodic samples of the mirrored domain `[-L, 3L)²`.
    Mirrored,
}

/// Tensor product grid; samples are stored row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub gx: Grid1D,
    pub gy: Grid1D,
    pub layout: Layout,
}

impl Grid2D {
    pub fn new(gx: Grid1D, gy: Grid1D, layout: Layout) -> Self {
        Grid2D { gx, gy, layout }
    }

    pub fn square(g: Grid1D, layout: Layout) -> Self {
        Grid2D { gx: g.clone(), gy: g, layout }
    }

    pub fn nx(&self) -> usize {
        self.gx.len()
    }

    pub fn ny(&self) -> usize {
        self.gy.len()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx() + ix
    }

    /// Node coordinates in storage order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gy.nodes().iter().flat_map(move |&y| self.gx.nodes().iter().map(move |&x| (x, y)))
    }

    /// Tensor-product weights in storage order.
    pub fn weights(&self) -> Vec<f64> {
        self.gy.weights().iter().flat_map(|&wy| self.gx.weights().iter().map(move |&wx| wx * wy)).collect()
    }
}
