//! Dense univariate polynomials with rational coefficients.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

/// Coefficients from the constant term upwards; never has trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * b;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// `(g, s)` with `g = gcd(self, m)` monic and `s · self ≡ g (mod m)`.
    pub fn gcd_inverse(&self, m: &Self) -> (Self, Self) {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Self::zero(), Self::constant(Rational::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.is_zero() {
            return (r0, s0);
        }
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    /// Formats with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let body = match k {
                0 => abs.to_string(),
                _ => {
                    let pow = if k == 1 { var.to_string() } else { format!("{var}^{k}") };
                    if abs.is_one() {
                        pow
                    } else {
                        format!("{abs}*{pow}")
                    }
                }
            };
            out.push_str(&body);
        }
        out
    }

    /// Parses sums of terms `c`, `c*v^k`, `c v`, `v^k`, `-v`; the symbol `p`
    /// stands for the given prime when `p` is supplied.
    pub fn parse(s: &str, var: char, p: Option<u64>) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes: Vec<char> = compact.chars().collect();
        for i in 1..bytes.len() {
            if (bytes[i] == '+' || bytes[i] == '-') && bytes[i - 1] != '^' && bytes[i - 1] != '*' {
                terms.push(bytes[start..i].iter().collect::<String>());
                start = i;
            }
        }
        terms.push(bytes[start..].iter().collect::<String>());
        let mut acc = Self::zero();
        for t in terms {
            acc = acc.add(&parse_term(&t, var, p).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{m} in polynomial {s:?}")),
                other => other,
            })?);
        }
        Ok(acc)
    }
}

fn parse_term(t: &str, var: char, p: Option<u64>) -> Result<QPoly> {
    let bad = || Error::Parse(format!("bad term {t:?}"));
    let (sign, body) = match t.strip_prefix('-') {
        Some(r) => (-Rational::one(), r),
        None => (Rational::one(), t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef_part, var_part) = match body.find(var) {
        Some(pos) => (&body[..pos], Some(&body[pos + var.len_utf8()..])),
        None => (body, None),
    };
    let coef_part = coef_part.strip_suffix('*').unwrap_or(coef_part);
    let coef = match coef_part {
        "" => Rational::one(),
        "p" => Rational::from_integer(p.ok_or_else(bad)?.into()),
        c => {
            if let Some(c) = c.strip_suffix("*p") {
                parse_rational(c)? * Rational::from_integer(p.ok_or_else(bad)?.into())
            } else {
                parse_rational(c)?
            }
        }
    };
    let k = match var_part {
        None => 0,
        Some("") => 1,
        Some(rest) => rest.strip_prefix('^').and_then(|e| e.parse::<usize>().ok()).ok_or_else(bad)?,
    };
    Ok(QPoly::monomial(sign * coef, k))
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn arithmetic() {
        let a = QPoly::from_ints(&[-1, 0, 1]);
        let b = QPoly::from_ints(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, QPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(q.mul(&b), a);
        assert_eq!(a.eval(&int(3)), int(8));
    }

    #[test]
    fn inverse_modulo() {
        let m = QPoly::from_ints(&[-3, 0, 1]);
        let a = QPoly::from_ints(&[1, 2]);
        let (g, s) = a.gcd_inverse(&m);
        assert_eq!(g, QPoly::constant(int(1)));
        assert_eq!(a.mul(&s).rem(&m), QPoly::constant(int(1)));
    }

    #[test]
    fn text_round_trip() {
        let f = QPoly::parse("w^3 - 7w^2 + 14*w - 7", 'w', None).unwrap();
        assert_eq!(f, QPoly::from_ints(&[-7, 14, -7, 1]));
        assert_eq!(f.display_with("w"), "w^3 - 7*w^2 + 14*w - 7");
        assert_eq!(QPoly::parse(&f.display_with("w"), 'w', None).unwrap(), f);
        assert_eq!(QPoly::parse("y^2 - p", 'y', Some(5)).unwrap(), QPoly::from_ints(&[-5, 0, 1]));
        assert_eq!(QPoly::parse("-1/2*w", 'w', None).unwrap(), QPoly::monomial(rat(-1, 2), 1));
        assert!(QPoly::parse("w^", 'w', None).is_err());
        assert!(QPoly::parse("", 'w', None).is_err());
    }
}
