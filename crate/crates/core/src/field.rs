//! Exact fields: the rationals and totally ramified extensions `Q(ϖ)` given
//! by an Eisenstein polynomial, with the valuation normalized by `v(p) = 1`.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::rational::{is_prime, residue_mod_p, vp, Rational};

/// A field given as a context object; elements carry no reference to it.
pub trait Field {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    // The field is a context object, so the conversion needs `self`.
    #[allow(clippy::wrong_self_convention)]
    fn from_rational(&self, q: &Rational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero; callers pivot on nonzero entries only.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
}

/// Element of an Eisenstein extension: a polynomial in the uniformizer of
/// degree below `e`.
pub type NfElem = QPoly;

/// `Q[x]/(g)` for an Eisenstein polynomial `g` of degree `e` at `p`.
///
/// The completion at the unique prime above `p` is the totally ramified
/// extension of `Q_p` cut out by `g`; the class `ϖ` of `x` is a uniformizer and
/// `v(Σ c_i ϖ^i) = min_i (v_p(c_i) + i/e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisensteinExt {
    p: u64,
    modulus: QPoly,
    var: char,
}

impl EisensteinExt {
    pub fn new(p: u64, modulus: QPoly) -> Result<Self> {
        Self::with_var(p, modulus, 'w')
    }

    pub fn with_var(p: u64, modulus: QPoly, var: char) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        check_eisenstein(&modulus, p)?;
        Ok(Self { p, modulus, var })
    }

    /// The degree-one extension `Q` itself, with uniformizer `p`.
    pub fn rationals(p: u64) -> Result<Self> {
        Self::new(p, QPoly::from_ints(&[-(p as i64), 1]))
    }

    /// `Q(√(p u))` for a `p`-adic unit `u`.
    pub fn sqrt_p(p: u64) -> Result<Self> {
        Self::new(p, QPoly::from_ints(&[-(p as i64), 0, 1]))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn modulus(&self) -> &QPoly {
        &self.modulus
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn uniformizer(&self) -> NfElem {
        self.reduce(&QPoly::x())
    }

    pub fn reduce(&self, a: &QPoly) -> NfElem {
        a.rem(&self.modulus)
    }

    /// Value of `f(x)` for a rational polynomial `f`.
    pub fn eval_poly(&self, f: &QPoly, x: &NfElem) -> NfElem {
        f.coeffs().iter().rev().fold(self.zero(), |acc, c| self.add(&self.mul(&acc, x), &QPoly::constant(c.clone())))
    }

    /// `v(a)` with `v(p) = 1`; `None` for zero.
    pub fn valuation(&self, a: &NfElem) -> Option<Rational> {
        let e = self.e() as i64;
        a.coeffs()
            .iter()
            .enumerate()
            .filter_map(|(i, c)| vp(c, self.p).map(|v| Rational::new((v * e + i as i64).into(), e.into())))
            .min()
    }

    pub fn is_integral(&self, a: &NfElem) -> bool {
        self.valuation(a).is_none_or(|v| v >= Rational::zero())
    }

    pub fn is_unit(&self, a: &NfElem) -> bool {
        self.valuation(a).is_some_and(|v| v.is_zero())
    }

    /// Image in the residue field `F_p` of an integral element.
    pub fn residue(&self, a: &NfElem) -> Result<u64> {
        if !self.is_integral(a) {
            return Err(Error::Domain(format!("{} is not integral", self.fmt_elem(a))));
        }
        residue_mod_p(&a.coeff(0), self.p)
    }

    pub fn fmt_elem(&self, a: &NfElem) -> String {
        a.display_with(&self.var.to_string())
    }

    pub fn parse_elem(&self, s: &str) -> Result<NfElem> {
        Ok(self.reduce(&QPoly::parse(s, self.var, Some(self.p))?))
    }
}

impl Field for EisensteinExt {
    type Elem = NfElem;

    fn zero(&self) -> NfElem {
        QPoly::zero()
    }
    fn one(&self) -> NfElem {
        QPoly::constant(Rational::one())
    }
    fn from_rational(&self, q: &Rational) -> NfElem {
        QPoly::constant(q.clone())
    }
    fn add(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.add(b)
    }
    fn sub(&self, a: &NfElem, b: &NfElem) -> NfElem {
        a.sub(b)
    }
    fn mul(&self, a: &NfElem, b: &NfElem) -> NfElem {
        if self.e() == 1 {
            return QPoly::constant(a.coeff(0) * b.coeff(0));
        }
        a.mul(b).rem(&self.modulus)
    }
    fn neg(&self, a: &NfElem) -> NfElem {
        a.neg()
    }
    fn inv(&self, a: &NfElem) -> NfElem {
        assert!(!a.is_zero(), "inverse of zero");
        if self.e() == 1 {
            return QPoly::constant(a.coeff(0).recip());
        }
        let (g, s) = a.gcd_inverse(&self.modulus);
        assert!(g.degree() == Some(0), "Eisenstein polynomials are irreducible");
        s
    }
    fn is_zero(&self, a: &NfElem) -> bool {
        a.is_zero()
    }
}

/// Monic, non-leading coefficients divisible by `p`, constant term of valuation exactly one.
pub fn check_eisenstein(g: &QPoly, p: u64) -> Result<()> {
    let bad = |why: &str| Err(Error::Domain(format!("{} is not Eisenstein at {p}: {why}", g.display_with("x"))));
    let Some(deg) = g.degree() else { return bad("zero polynomial") };
    if deg == 0 {
        return bad("constant");
    }
    if !g.is_monic() {
        return bad("not monic");
    }
    if vp(&g.coeff(0), p) != Some(1) {
        return bad("constant term must have valuation 1");
    }
    for k in 1..deg {
        if let Some(v) = vp(&g.coeff(k), p) {
            if v < 1 {
                return bad("middle coefficients must be divisible by p");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn eisenstein_gate() {
        assert!(check_eisenstein(&QPoly::from_ints(&[-3, 0, 1]), 3).is_ok());
        assert!(check_eisenstein(&QPoly::from_ints(&[-9, 0, 1]), 3).is_err());
        assert!(check_eisenstein(&QPoly::from_ints(&[-3, 1, 1]), 3).is_err());
        assert!(check_eisenstein(&QPoly::from_ints(&[3, 3, 1]), 3).is_ok());
        assert!(EisensteinExt::new(4, QPoly::from_ints(&[-2, 1])).is_err());
    }

    #[test]
    fn valuations_in_sqrt_p() {
        let k = EisensteinExt::sqrt_p(5).unwrap();
        let w = k.uniformizer();
        assert_eq!(k.valuation(&w), Some(rat(1, 2)));
        assert_eq!(k.valuation(&k.mul(&w, &w)), Some(int(1)));
        let two_w = k.add(&w, &w);
        assert_eq!(k.valuation(&two_w), Some(rat(1, 2)));
        assert_eq!(EisensteinExt::sqrt_p(2).unwrap().valuation(&two_w), Some(rat(3, 2)));
        assert_eq!(k.valuation(&k.zero()), None);
        let u = k.parse_elem("1 + w").unwrap();
        assert!(k.is_unit(&u));
        assert_eq!(k.mul(&u, &k.inv(&u)), k.one());
        assert_eq!(k.residue(&u).unwrap(), 1);
    }

    #[test]
    fn cyclotomic_roots() {
        // Q(ζ_5) with ϖ = ζ − 1 is Eisenstein at 5 and contains every ζ^k − 1.
        let k = EisensteinExt::new(5, QPoly::from_ints(&[5, 10, 10, 5, 1])).unwrap();
        let zeta = k.add(&k.uniformizer(), &k.one());
        let mut z = k.one();
        for _ in 0..5 {
            z = k.mul(&z, &zeta);
        }
        assert_eq!(z, k.one());
        assert_eq!(k.valuation(&k.uniformizer()), Some(rat(1, 4)));
    }
}
