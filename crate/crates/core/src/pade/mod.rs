//! Diagonal Padé approximations of the steady-vortex density.
//!
//! The density of a straight vortex solves
//!
//! ```text
//! ρ'' + ρ'/r - (ρ')²/(2ρ) - 2ρ/r² + 2(1-ρ)ρ = 0,   ρ(0) = 0, ρ(∞) = 1,
//! ```
//!
//! and is approximated by the even rational function
//!
//! ```text
//!          a_1 r² + … + a_q r^{2q}
//! ρ_q(r) = ---------------------------------------------
//!          1 + b_1 r² + … + b_{q-1} r^{2q-2} + a_q r^{2q}
//! ```
//!
//! whose 2q-1 free coefficients cancel the lowest 2q-1 powers of the
//! residual numerator. All coefficients are explicit functions of `a_1`,
//! which is itself a root of an integer polynomial (quadratic, quintic or
//! octic for q = 2, 3, 4).

mod residual;
mod scalar;

pub use residual::{residual_coefficients, residual_coefficients_exact};

use num::{BigRational, ToPrimitive};

use crate::error::{Error, Result};
use scalar::Scalar;

/// Integer polynomial (highest degree first) whose root is `a_1`, with the
/// spurious `a_1²` factor already removed.
pub fn a1_polynomial(q: usize) -> Result<&'static [i64]> {
    match q {
        // (8 a_1 + 1)(32 a_1 - 11)
        2 => Ok(&[256, -56, -11]),
        3 => Ok(&[21233664, -9732096, -62464, 137856, 62772, -1247]),
        4 => Ok(&[
            1292033536819200,
            -2530164294549504,
            1853440540016640,
            -642522859438080,
            107808283328512,
            -8028170208256,
            248539665024,
            1297120628,
            9325957,
        ]),
        _ => Err(unsupported(q)),
    }
}

fn unsupported(q: usize) -> Error {
    Error::invalid(format!("unsupported Padé order q = {q}; expected 2, 3 or 4"))
}

/// Closed-form elimination of every coefficient in terms of `a_1`.
///
/// Returns `(a, b)` with `a = [a_1, …, a_q]` and `b = [b_1, …, b_{q-1}]`.
fn coefficients_from_a1<T: Scalar>(q: usize, a1: &T) -> Result<(Vec<T>, Vec<T>)> {
    let i = T::int;
    let a1 = a1.clone();
    let p1 = a1.clone();
    let p2 = a1.clone() * a1.clone();
    let p3 = p2.clone() * a1.clone();
    let p4 = p3.clone() * a1.clone();
    let p5 = p4.clone() * a1.clone();
    let div = |num: T, den: T, what: &str| -> Result<T> {
        if den.is_zero() {
            Err(Error::Numerical(format!("vanishing denominator for {what}")))
        } else {
            Ok(num / den)
        }
    };
    let a2_of = |b1: &T| a1.clone() * (b1.clone() - T::ratio(1, 4));
    let a3_of =
        |b1: &T, b2: &T| a1.clone() * (i(192) * b2.clone() - i(48) * b1.clone() + i(16) * a1.clone() + i(5)) / i(192);
    match q {
        2 => {
            let b1 = div(i(5) - i(32) * p1.clone(), i(48) - i(192) * p1, "b_1")?;
            let a2 = a2_of(&b1);
            Ok((vec![a1.clone(), a2], vec![b1]))
        }
        3 => {
            let b1 = div(
                i(2304) * p3 + i(656) * p2.clone() - i(421) * p1.clone() - i(28),
                i(7680) * p2.clone() - i(1680) * p1.clone() - i(330),
                "b_1",
            )?;
            let b2 = div(
                i(768) * p1.clone() * b1.clone() - i(120) * b1.clone() - i(384) * p2 + i(8) * p1.clone() + i(7),
                i(4608) * p1 - i(1152),
                "b_2",
            )?;
            let a2 = a2_of(&b1);
            let a3 = a3_of(&b1, &b2);
            Ok((vec![a1.clone(), a2, a3], vec![b1, b2]))
        }
        4 => {
            // The quintic ratio eliminates r^12; the cubic ratio printed for
            // b_1 alongside the q = 4 table belongs to q = 3.
            let b1 = div(
                i(722731008) * p5.clone() - i(326467584) * p4.clone() - i(13427712) * p3.clone()
                    + i(11551104) * p2.clone()
                    + i(834006) * p1.clone()
                    - i(12183),
                i(2972712960) * p5 - i(1362493440) * p4 - i(8744960) * p3.clone()
                    + i(19299840) * p2.clone()
                    + i(8788080) * p1.clone()
                    - i(174580),
                "b_1",
            )?;
            let b2 = div(
                (i(737280) * p3.clone() + i(209920) * p2.clone() - i(134720) * p1.clone() - i(8960)) * b1.clone()
                    - i(364544) * p3
                    + i(70144) * p2.clone()
                    + i(18256) * p1.clone()
                    + i(393),
                i(2457600) * p2.clone() - i(537600) * p1.clone() - i(105600),
                "b_2",
            )?;
            let b3 = div(
                (i(61440) * p1.clone() - i(9600)) * b2.clone()
                    + (i(-30720) * p2.clone() + i(640) * p1.clone() + i(560)) * b1.clone()
                    + i(8448) * p2.clone()
                    - i(1056) * p1.clone()
                    - i(21),
                i(368640) * p1.clone() - i(92160),
                "b_3",
            )?;
            let a4 = (i(4608) * p1.clone() * b3.clone() - i(1152) * p1.clone() * b2.clone()
                + (i(384) * p2.clone() + i(120) * p1.clone()) * b1.clone()
                - i(128) * p2
                - i(7) * p1)
                / i(4608);
            let a2 = a2_of(&b1);
            let a3 = a3_of(&b1, &b2);
            Ok((vec![a1.clone(), a2, a3, a4], vec![b1, b2, b3]))
        }
        _ => Err(unsupported(q)),
    }
}

/// Diagonal Padé profile `ρ_q`.
#[derive(Debug, Clone)]
pub struct PadeProfile {
    q: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    /// High-precision `a_1` (exact for q = 2, ≥ 75 digits otherwise).
    a1_exact: BigRational,
}

/// Threshold on `u = r²` above which evaluation switches to `v = 1/u`; the
/// `u` form loses digits to cancellation in the derivatives as `u` grows.
const LARGE_U: f64 = 4.0;

/// Samples used to decide whether a candidate root is physical.
const VALIDATION_POINTS: usize = 10_000;
const VALIDATION_RMAX: f64 = 100.0;

/// Builds `ρ_q` for q ∈ {2, 3, 4}.
pub fn build_pade(q: usize) -> Result<PadeProfile> {
    let poly = a1_polynomial(q)?;
    if q == 2 {
        let a1 = BigRational::new(11.into(), 32.into());
        debug_assert!(scalar::horner(poly, &a1).is_zero());
        return PadeProfile::from_exact_a1(q, a1);
    }
    let mut rejected = Vec::new();
    for root in bracket_roots(poly, 0.2, 0.5) {
        let exact = scalar::refine_root(poly, root);
        match PadeProfile::from_exact_a1(q, exact) {
            Ok(p) if p.is_physical() => return Ok(p),
            Ok(_) => rejected.push(root),
            Err(_) => rejected.push(root),
        }
    }
    Err(Error::NoAdmissibleRoot(format!(
        "q = {q}: candidates {rejected:?} in [0.2, 0.5] all fail the positivity/monotonicity test"
    )))
}

/// Sign-change bracketing on a fine scan followed by bisection.
fn bracket_roots(poly: &[i64], lo: f64, hi: f64) -> Vec<f64> {
    const SCAN: usize = 30_000;
    let f = |x: f64| poly.iter().fold(0.0, |acc, &c| acc * x + c as f64);
    let mut roots = Vec::new();
    let step = (hi - lo) / SCAN as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for k in 1..=SCAN {
        let x1 = lo + k as f64 * step;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            while b - a > 1e-15 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

impl PadeProfile {
    fn from_exact_a1(q: usize, a1: BigRational) -> Result<Self> {
        let (a, b) = coefficients_from_a1(q, &a1)?;
        let to_f64 = |x: &BigRational| {
            x.to_f64().filter(|v| v.is_finite()).ok_or_else(|| Error::Numerical("non-finite Padé coefficient".into()))
        };
        let a = a.iter().map(to_f64).collect::<Result<Vec<_>>>()?;
        let b = b.iter().map(to_f64).collect::<Result<Vec<_>>>()?;
        if a[0] <= 0.0 {
            return Err(Error::Numerical(format!("a_1 = {} is not positive", a[0])));
        }
        Ok(PadeProfile { q, a, b, a1_exact: a1 })
    }

    /// Positive, below one and strictly increasing on the validation sample.
    fn is_physical(&self) -> bool {
        let h = VALIDATION_RMAX / VALIDATION_POINTS as f64;
        (1..=VALIDATION_POINTS).all(|k| {
            let r = k as f64 * h;
            let rho = self.rho(r);
            rho > 0.0 && rho < 1.0 && self.rho_prime(r) > 0.0
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Numerator coefficients `a_1..a_q`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Denominator coefficients `b_1..b_{q-1}` (the top coefficient is `a_q`).
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub(crate) fn a1_exact(&self) -> &BigRational {
        &self.a1_exact
    }

    /// `(a, b)` in rational arithmetic from the stored `a_1`; exact for q = 2.
    pub fn exact_coefficients(&self) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
        coefficients_from_a1(self.q, &self.a1_exact)
    }

    /// Value of the `a_1` polynomial at the stored `a_1`, relative to the
    /// magnitude of its leading term there.
    pub fn root_residual(&self) -> f64 {
        let poly = a1_polynomial(self.q).expect("order validated at construction");
        let a1 = self.a[0];
        let value = scalar::horner(poly, &self.a1_exact).to_f64().unwrap_or(f64::NAN);
        let lead = poly[0] as f64 * a1.powi(poly.len() as i32 - 1);
        (value / lead).abs()
    }

    /// `(P, Q)` coefficient arrays in `u = r²`, constant term first.
    fn polys(&self) -> (Vec<f64>, Vec<f64>) {
        let mut p = vec![0.0];
        p.extend_from_slice(&self.a);
        let mut d = vec![1.0];
        d.extend_from_slice(&self.b);
        d.push(self.a[self.q - 1]);
        (p, d)
    }

    /// Value, first and second derivative of `R(u) = P(u)/Q(u)`.
    fn rational_u(&self, u: f64) -> (f64, f64, f64) {
        let (p, d) = self.polys();
        let (p0, p1, p2) = poly_eval3(&p, u);
        let (q0, q1, q2) = poly_eval3(&d, u);
        let r0 = p0 / q0;
        let num1 = p1 * q0 - p0 * q1;
        let r1 = num1 / (q0 * q0);
        let r2 = ((p2 * q0 - p0 * q2) * q0 - 2.0 * q1 * num1) / (q0 * q0 * q0);
        (r0, r1, r2)
    }

    /// Same as [`Self::rational_u`] but in `v = 1/u`, for large radii.
    /// Returns `(R, R_v, R_vv)`.
    fn rational_v(&self, v: f64) -> (f64, f64, f64) {
        let (p, d) = self.polys();
        // v^q P(1/v) and v^q Q(1/v): reverse the coefficient order.
        let pr: Vec<f64> = p.iter().rev().copied().collect();
        let dr: Vec<f64> = d.iter().rev().copied().collect();
        let (p0, p1, p2) = poly_eval3(&pr, v);
        let (q0, q1, q2) = poly_eval3(&dr, v);
        let r0 = p0 / q0;
        let num1 = p1 * q0 - p0 * q1;
        let r1 = num1 / (q0 * q0);
        let r2 = ((p2 * q0 - p0 * q2) * q0 - 2.0 * q1 * num1) / (q0 * q0 * q0);
        (r0, r1, r2)
    }

    /// `ρ_q(r)`.
    pub fn rho(&self, r: f64) -> f64 {
        let u = r * r;
        if u > LARGE_U {
            self.rational_v(1.0 / u).0
        } else {
            self.rational_u(u).0
        }
    }

    /// Exact derivative `dρ_q/dr` (quotient rule on the coefficients).
    pub fn rho_prime(&self, r: f64) -> f64 {
        let u = r * r;
        if u > LARGE_U {
            let v = 1.0 / u;
            let (_, rv, _) = self.rational_v(v);
            // dR/du = -v² R_v, dρ/dr = 2r dR/du
            -2.0 * r * v * v * rv
        } else {
            2.0 * r * self.rational_u(u).1
        }
    }

    /// Exact second derivative `d²ρ_q/dr²`.
    pub fn rho_second(&self, r: f64) -> f64 {
        let u = r * r;
        let (ru, ruu) = if u > LARGE_U {
            let v = 1.0 / u;
            let (_, rv, rvv) = self.rational_v(v);
            (-v * v * rv, 2.0 * v * v * v * rv + v.powi(4) * rvv)
        } else {
            let (_, r1, r2) = self.rational_u(u);
            (r1, r2)
        };
        2.0 * ru + 4.0 * u * ruu
    }

    /// Left-hand side of the radial density equation evaluated on `ρ_q`.
    pub fn ode_residual(&self, r: f64) -> f64 {
        let rho = self.rho(r);
        let d1 = self.rho_prime(r);
        let d2 = self.rho_second(r);
        d2 + d1 / r - d1 * d1 / (2.0 * rho) - 2.0 * rho / (r * r) + 2.0 * (1.0 - rho) * rho
    }
}

/// Horner evaluation of a polynomial (constant term first) and its first two
/// derivatives.
fn poly_eval3(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p0, mut p1, mut p2) = (0.0, 0.0, 0.0);
    for &ck in c.iter().rev() {
        p2 = p2 * x + 2.0 * p1;
        p1 = p1 * x + p0;
        p0 = p0 * x + ck;
    }
    (p0, p1, p2)
}

/// Convenience: `ρ_q` evaluated with [`build_pade`] defaults.
pub fn eval_rho(p: &PadeProfile, r: f64) -> f64 {
    p.rho(r)
}

pub fn eval_rho_prime(p: &PadeProfile, r: f64) -> f64 {
    p.rho_prime(r)
}

/// Unique positive zero of `ρ_2'`, found by bisection on a sign change of
/// the exact derivative.
pub fn rho2_maximum(p: &PadeProfile) -> Result<f64> {
    if p.q != 2 {
        return Err(Error::invalid("the overshoot maximum only exists for q = 2"));
    }
    let (mut lo, mut hi) = (1.0, 100.0);
    if p.rho_prime(lo) <= 0.0 || p.rho_prime(hi) >= 0.0 {
        return Err(Error::Numerical("ρ_2' does not change sign on [1, 100]".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p.rho_prime(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
