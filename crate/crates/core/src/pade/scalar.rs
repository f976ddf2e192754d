use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

/// Field operations shared by `f64` and exact rationals, so the Padé closed
/// forms are written once.
pub(crate) trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn int(v: i64) -> Self;
    fn ratio(n: i64, d: i64) -> Self;
    fn is_zero(&self) -> bool;
}

impl Scalar for f64 {
    fn int(v: i64) -> Self {
        v as f64
    }
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    fn int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Exact Horner evaluation of an integer polynomial (highest degree first).
pub(crate) fn horner(poly: &[i64], x: &BigRational) -> BigRational {
    poly.iter().fold(BigRational::zero(), |acc, &c| acc * x + BigRational::int(c))
}

fn horner_derivative(poly: &[i64], x: &BigRational) -> BigRational {
    let n = poly.len() - 1;
    poly[..n]
        .iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (k, &c)| acc * x + BigRational::int(c * (n - k) as i64))
}

/// Bits kept when rounding Newton iterates to dyadic rationals.
const PRECISION_BITS: u32 = 256;

fn round_dyadic(x: &BigRational, scale: &BigRational) -> BigRational {
    (x * scale).round() / scale
}

/// Newton polish of a simple root in exact arithmetic, rounding every
/// iterate to a 2^-256 grid so denominators stay bounded.
pub(crate) fn refine_root(poly: &[i64], start: f64) -> BigRational {
    let scale = BigRational::from_integer(BigInt::one() << PRECISION_BITS);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (PRECISION_BITS - 8));
    let mut x = BigRational::from_float(start).expect("finite start");
    for _ in 0..20 {
        let d = horner_derivative(poly, &x);
        if Zero::is_zero(&d) {
            break;
        }
        let step = horner(poly, &x) / d;
        x = round_dyadic(&(&x - &step), &scale);
        if step.abs() < tol {
            break;
        }
    }
    x
}
