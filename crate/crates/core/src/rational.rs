//! Exact rationals and p-adic valuations on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored reduced with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp(x: &Rational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(vp_int(x.numer(), p) - vp_int(x.denom(), p))
}

/// Residue of a p-integral rational in F_p.
pub fn residue_mod_p(x: &Rational, p: u64) -> Result<u64> {
    if let Some(v) = vp(x, p) {
        if v < 0 {
            return Err(Error::Domain(format!("{x} is not {p}-integral")));
        }
    }
    let pb = BigInt::from(p);
    let num = x.numer().mod_floor(&pb).to_u64().unwrap();
    let den = x.denom().mod_floor(&pb).to_u64().unwrap();
    Ok(num * inv_mod(den, p) % p)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

/// Parses `a`, `-a`, `a/b`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn to_i64(x: &Rational) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q))
}

pub fn is_positive(x: &Rational) -> bool {
    x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(vp(&rat(12, 5), 2), Some(2));
        assert_eq!(vp(&rat(3, 50), 5), Some(-2));
        assert_eq!(vp(&int(0), 3), None);
    }

    #[test]
    fn residues() {
        assert_eq!(residue_mod_p(&rat(1, 2), 3).unwrap(), 2);
        assert_eq!(residue_mod_p(&int(-1), 5).unwrap(), 4);
        assert!(residue_mod_p(&rat(1, 3), 3).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(int(3).to_string(), "3");
        assert_eq!(rat(2, 4).to_string(), "1/2");
    }
}
