//! Exact residual numerator of the density equation for a Padé profile.
//!
//! Writing `u = r²` and `ρ = P(u)/Q(u)`, multiplying the density equation by
//! `u ρ Q⁴ / 2` gives the polynomial
//!
//! ```text
//! N(u) = 2u P Q D + 2u² P [(P''Q - P Q'') Q - 2 Q' D] - u² D² - P² Q² + u (Q - P) P² Q,
//! D    = P'Q - P Q',
//! ```
//!
//! which is divisible by `u²`. The reported residual is `N(u)/u²` expanded
//! in powers of `r²`; its `r²` coefficient is `a_1² - 4a_1²b_1 + 4a_1a_2`.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use super::{coefficients_from_a1, PadeProfile};
use crate::error::{Error, Result};

type Poly = Vec<BigRational>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        })
        .collect();
    trim(out)
}

fn scale(a: &Poly, s: i64) -> Poly {
    let s = BigRational::from_integer(BigInt::from(s));
    a.iter().map(|c| c * &s).collect()
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    add(a, &scale(b, -1))
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn deriv(a: &Poly) -> Poly {
    if a.len() <= 1 {
        return vec![BigRational::zero()];
    }
    let out = a.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect();
    trim(out)
}

/// Multiply by `u^k`.
fn shift(a: &Poly, k: usize) -> Poly {
    let mut out = vec![BigRational::zero(); k];
    out.extend(a.iter().cloned());
    out
}

/// Bits retained when the coefficients derive from a numerically refined
/// root (q = 3, 4). Roughly 96 decimal digits.
const COEFF_BITS: u32 = 320;

/// Exact residual coefficients of `r^{2k}`, k = 1..=k_max.
///
/// For q = 2 the arithmetic is exact in rationals. For q = 3, 4 the
/// coefficients come from a 256-bit root and are rounded to 320 bits before
/// the (exact) polynomial algebra, so the cancelled terms vanish to ~1e-70.
pub fn residual_coefficients_exact(p: &PadeProfile, k_max: usize) -> Result<Vec<BigRational>> {
    let q = p.q();
    if k_max < 2 * q {
        return Err(Error::invalid(format!("k_max = {k_max} must exceed the {} cancelled terms", 2 * q - 1)));
    }
    let (a, b) = coefficients_from_a1::<BigRational>(q, p.a1_exact())?;
    let (a, b) = if q > 2 {
        let s = BigRational::from_integer(BigInt::one() << COEFF_BITS);
        let round = |x: &BigRational| (x * &s).round() / &s;
        (a.iter().map(round).collect::<Vec<_>>(), b.iter().map(round).collect::<Vec<_>>())
    } else {
        (a, b)
    };

    let mut pp: Poly = vec![BigRational::zero()];
    pp.extend(a.iter().cloned());
    let mut qq: Poly = vec![BigRational::one()];
    qq.extend(b.iter().cloned());
    qq.push(a[q - 1].clone());

    let p1 = deriv(&pp);
    let p2 = deriv(&p1);
    let q1 = deriv(&qq);
    let q2 = deriv(&q1);
    let d = sub(&mul(&p1, &qq), &mul(&pp, &q1));

    let term1 = scale(&shift(&mul(&mul(&pp, &qq), &d), 1), 2);
    let inner = sub(&mul(&sub(&mul(&p2, &qq), &mul(&pp, &q2)), &qq), &scale(&mul(&q1, &d), 2));
    let term2 = scale(&shift(&mul(&pp, &inner), 2), 2);
    let term3 = shift(&mul(&d, &d), 2);
    let pq = mul(&pp, &qq);
    let term4 = mul(&pq, &pq);
    let term5 = shift(&mul(&mul(&sub(&qq, &pp), &mul(&pp, &pp)), &qq), 1);

    let n = sub(&add(&add(&term1, &term2), &term5), &add(&term3, &term4));

    if n.iter().take(2).any(|c| !c.is_zero()) {
        return Err(Error::Numerical("residual numerator is not divisible by u²".into()));
    }
    Ok((1..=k_max).map(|k| n.get(k + 2).cloned().unwrap_or_else(BigRational::zero)).collect())
}

/// Residual coefficients of `r^{2k}`, k = 1..=k_max, rounded to `f64`.
///
/// The first `2q - 1` entries are the conditions that determine the
/// profile and vanish; the rest are the irreducible remainder.
pub fn residual_coefficients(p: &PadeProfile, k_max: usize) -> Result<Vec<f64>> {
    residual_coefficients_exact(p, k_max)?
        .iter()
        .map(|c| c.to_f64().ok_or_else(|| Error::Numerical("coefficient overflow".into())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::build_pade;
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    // Reference values from an independent symbolic computation: the density
    // equation in u = r², multiplied by u ρ Q⁴ / 2 and cancelled, evaluated
    // at 90-digit coefficients of each profile.
    #[test]
    fn q2_residual_matches_symbolic_values() {
        let p = build_pade(2).unwrap();
        let c = residual_coefficients_exact(&p, 7).unwrap();
        assert!(c[..3].iter().all(Zero::is_zero));
        assert_eq!(c[3], rat(-2783, 37_748_736));
        assert_eq!(c[4], rat(-3751, 226_492_416));
        assert_eq!(c[5], rat(-6655, 7_247_757_312));
        assert!(c[6].is_zero());
    }

    #[test]
    fn q3_q4_tails_match_symbolic_values() {
        let cases: [(usize, &[f64]); 2] = [
            (3, &[2.019387935e-8, 6.131105049e-9, 6.522610514e-10, 2.924844744e-11]),
            (
                4,
                &[
                    9.5794685e-12,
                    2.6270931e-12,
                    2.4426008e-13,
                    1.0474893e-14,
                    2.1132601e-16,
                    1.4907502e-18,
                    -3.7396604e-21,
                ],
            ),
        ];
        for (q, tail) in cases {
            let p = build_pade(q).unwrap();
            let c = residual_coefficients(&p, 4 * q).unwrap();
            let head = 2 * q - 1;
            for (k, v) in c[..head].iter().enumerate() {
                assert!(v.abs() < 1e-60, "q={q} k={}: {v}", k + 1);
            }
            for (got, want) in c[head..head + tail.len()].iter().zip(tail) {
                assert!(((got - want) / want).abs() < 1e-5, "q={q}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn k_max_must_exceed_the_cancelled_terms() {
        let p = build_pade(3).unwrap();
        assert!(residual_coefficients(&p, 5).unwrap_err().is_invalid_input());
        assert_eq!(residual_coefficients(&p, 6).unwrap().len(), 6);
    }
}
