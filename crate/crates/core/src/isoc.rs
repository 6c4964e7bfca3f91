//! Isocrystals in standard monomial form.
//!
//! The operator is `φ(b_j) = c_j p^{a_j} b_{perm(j)}` with rational `p`-units
//! `c_j`. Along a cycle `C` of length `s`, `φ^s` acts on the lattice spanned by
//! `C` as `p^{Σ_C a_j}` times a unit, so `C` is isotypic of slope `Σ_C a_j / s`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::RationalField;
use crate::linalg::{identity, mat_mul, Matrix};
use crate::polycalc::{ConcavePolygon, NewtonVector};
use crate::rational::{from_usize, int, vp, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    /// Index of `perm(j)`, zero-based.
    pub target: usize,
    pub exponent: i64,
    pub unit: Rational,
    /// Inertia label; meaningful modulo the label modulus of the isocrystal.
    pub label: u32,
}

impl Slot {
    pub fn new(target: usize, exponent: i64) -> Self {
        Self { target, exponent, unit: Rational::one(), label: 0 }
    }

    pub fn labelled(target: usize, exponent: i64, label: u32) -> Self {
        Self { target, exponent, unit: Rational::one(), label }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardIsocrystal {
    p: u64,
    slots: Vec<Slot>,
    label_modulus: u32,
    /// The residue field has `p^f` elements; only the Frobenius power matters.
    residue_degree: u32,
}

impl StandardIsocrystal {
    /// Validates that `perm` is a bijection, the units are `p`-adic units and
    /// `label(perm(j)) = label(j) + 1` modulo `label_modulus`.
    pub fn new(p: u64, slots: Vec<Slot>, label_modulus: u32) -> Result<Self> {
        let h = slots.len();
        if label_modulus == 0 {
            return Err(Error::Invariant("label modulus must be positive".into()));
        }
        let mut seen = vec![false; h];
        for (j, s) in slots.iter().enumerate() {
            if s.target >= h || std::mem::replace(&mut seen[s.target], true) {
                return Err(Error::Invariant(format!("slot {} does not define a permutation", j + 1)));
            }
            if vp(&s.unit, p) != Some(0) {
                return Err(Error::Invariant(format!("unit of slot {} is not a {p}-adic unit", j + 1)));
            }
            if s.label >= label_modulus {
                return Err(Error::Invariant(format!("label of slot {} exceeds its modulus", j + 1)));
            }
        }
        for (j, s) in slots.iter().enumerate() {
            if slots[s.target].label != (s.label + 1) % label_modulus {
                return Err(Error::Invariant(format!(
                    "φ must shift labels by one: slot {} has label {}, its image {} has label {}",
                    j + 1,
                    s.label,
                    s.target + 1,
                    slots[s.target].label
                )));
            }
        }
        Ok(Self { p, slots, label_modulus, residue_degree: 1 })
    }

    /// Unlabelled isocrystal from a permutation and exponents.
    pub fn from_perm(p: u64, perm: &[usize], exponents: &[i64]) -> Result<Self> {
        if perm.len() != exponents.len() {
            return Err(Error::Domain("permutation and exponents differ in length".into()));
        }
        Self::new(p, perm.iter().zip(exponents).map(|(&t, &a)| Slot::new(t, a)).collect(), 1)
    }

    pub fn with_residue_degree(mut self, f: u32) -> Result<Self> {
        if f == 0 {
            return Err(Error::Invariant("residue degree must be positive".into()));
        }
        self.residue_degree = f;
        Ok(self)
    }

    pub fn residue_degree(&self) -> u32 {
        self.residue_degree
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn height(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn label_modulus(&self) -> u32 {
        self.label_modulus
    }

    /// `v_p(det φ) = Σ a_j`.
    pub fn dimension(&self) -> i64 {
        self.slots.iter().map(|s| s.exponent).sum()
    }

    /// Cycles of the permutation, each starting at its smallest slot, ordered by that slot.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.height()];
        let mut out = Vec::new();
        for start in 0..self.height() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cyc.push(j);
                j = self.slots[j].target;
            }
            out.push(cyc);
        }
        out
    }

    pub fn cycle_slope(&self, cycle: &[usize]) -> Rational {
        let sum: i64 = cycle.iter().map(|&j| self.slots[j].exponent).sum();
        Rational::new(sum.into(), (cycle.len() as i64).into())
    }

    /// `(slope, height)` with equal slopes merged, ascending by slope.
    pub fn slope_decomposition(&self) -> Vec<(Rational, usize)> {
        let mut acc: BTreeMap<Rational, usize> = BTreeMap::new();
        for c in self.cycles() {
            *acc.entry(self.cycle_slope(&c)).or_insert(0) += c.len();
        }
        acc.into_iter().collect()
    }

    /// Negated slopes in non-increasing order.
    pub fn newton_polygon(&self) -> NewtonVector {
        NewtonVector::from_unsorted(
            self.slope_decomposition().into_iter().flat_map(|(s, h)| std::iter::repeat_n(-s, h)).collect(),
        )
    }

    /// `p^m φ`.
    pub fn shift(&self, m: i64) -> Self {
        let slots = self.slots.iter().map(|s| Slot { exponent: s.exponent + m, ..s.clone() }).collect();
        Self { slots, ..self.clone() }
    }

    /// Dual isocrystal `f ↦ σ ∘ f ∘ V` in the dual basis: `φ^∨(b_j^*) = c_j^{-1} p^{1 − a_j} b_{perm(j)}^*`.
    pub fn dual_isocrystal(&self) -> Self {
        let slots =
            self.slots.iter().map(|s| Slot { exponent: 1 - s.exponent, unit: s.unit.recip(), ..s.clone() }).collect();
        Self { slots, ..self.clone() }
    }

    /// The lattice spanned by `p^{s_j} b_j`, in its own standard basis.
    ///
    /// It is `φ`-stable exactly when `a_j + s_j ≥ s_{target(j)}` for every slot.
    pub fn scaled_sublattice(&self, scaling: &[i64]) -> Result<Self> {
        if scaling.len() != self.height() || scaling.iter().any(|&s| s < 0) {
            return Err(Error::Domain(format!("need {} nonnegative scaling exponents", self.height())));
        }
        let mut slots = self.slots.clone();
        for (j, s) in slots.iter_mut().enumerate() {
            let exponent = s.exponent + scaling[j] - scaling[s.target];
            if exponent < 0 {
                return Err(Error::Domain(format!("the scaled lattice is not stable under φ at slot {}", j + 1)));
            }
            s.exponent = exponent;
        }
        Ok(Self { slots, ..self.clone() })
    }

    /// Slots of `other` are appended after those of `self`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.label_modulus != other.label_modulus || self.residue_degree != other.residue_degree
        {
            return Err(Error::Domain("direct sum of isocrystals over different data".into()));
        }
        let h = self.height();
        let mut slots = self.slots.clone();
        slots.extend(other.slots.iter().map(|s| Slot { target: s.target + h, ..s.clone() }));
        Ok(Self { slots, ..self.clone() })
    }

    /// Whether `d` divides the height.
    pub fn check_coefficient_height(&self, d: usize) -> bool {
        d > 0 && self.height().is_multiple_of(d)
    }

    /// Sub-isocrystal on a `perm`-stable slot set, renumbered in increasing order.
    pub fn restrict_to(&self, slots: &[usize]) -> Result<Self> {
        let index: BTreeMap<usize, usize> = slots.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut out = Vec::with_capacity(slots.len());
        for &j in slots {
            let s = self.slots.get(j).ok_or_else(|| Error::Domain(format!("no slot {}", j + 1)))?;
            let target = *index
                .get(&s.target)
                .ok_or_else(|| Error::Precondition(format!("slot set not φ-stable at slot {}", j + 1)))?;
            out.push(Slot { target, ..s.clone() });
        }
        Ok(Self { slots: out, ..self.clone() })
    }

    /// Matrix of `φ` in the standard basis (column `j` is the image of `b_j`).
    pub fn matrix(&self) -> Matrix<Rational> {
        let h = self.height();
        let mut m = Matrix::filled(h, h, Rational::zero());
        let p = int(self.p as i64);
        for (j, s) in self.slots.iter().enumerate() {
            m.set(s.target, j, &s.unit * pow(&p, s.exponent));
        }
        m
    }
}

fn pow(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// Newton polygon of the isocrystal `(K_0^h, A σ)` for a matrix with
/// `σ`-fixed rational entries, computed from the `p`-adic Newton polygon of
/// the characteristic polynomial of `A^f` and scaled by `1/f`.
pub fn charpoly_newton(a: &Matrix<Rational>, p: u64, f: u32) -> Result<NewtonVector> {
    if a.rows() != a.cols() {
        return Err(Error::Domain("characteristic polynomial of a non-square matrix".into()));
    }
    if f == 0 {
        return Err(Error::Domain("f must be positive".into()));
    }
    let field = RationalField;
    let mut pow_a = identity(&field, a.rows());
    for _ in 0..f {
        pow_a = mat_mul(&field, &pow_a, a);
    }
    let coeffs = charpoly(&pow_a);
    if coeffs[0].is_zero() {
        return Err(Error::Domain("singular matrix".into()));
    }
    let points: Vec<(Rational, Rational)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| vp(c, p).map(|v| (from_usize(i), int(v)))).collect();
    // Lower convex hull, read as the upper hull of the negated valuations.
    let negated: Vec<_> = points.iter().map(|(x, y)| (x.clone(), -y)).collect();
    let v0 = negated[0].1.clone();
    let shifted: Vec<_> = negated.iter().map(|(x, y)| (x.clone(), y - &v0)).collect();
    let hull = ConcavePolygon::concave_envelope(&shifted)?;
    // Upper-hull slope s over length m: m roots of valuation s, isocrystal slope s/f.
    let fr = Rational::from_integer(f.into());
    let mut entries = Vec::new();
    for (s, m) in hull.slopes() {
        let mult: usize = m.to_integer().try_into().expect("integral multiplicity");
        entries.extend(std::iter::repeat_n(-&s / &fr, mult));
    }
    Ok(NewtonVector::from_unsorted(entries))
}

/// Coefficients `c_0, ..., c_n` of `det(x I − a)` by Faddeev–LeVerrier.
pub fn charpoly(a: &Matrix<Rational>) -> Vec<Rational> {
    let n = a.rows();
    let field = RationalField;
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = Matrix::filled(n, n, Rational::zero());
    for k in 1..=n {
        for i in 0..n {
            let v = m.get(i, i) + &coeffs[n - k + 1];
            m.set(i, i, v);
        }
        m = mat_mul(&field, a, &m);
        let trace = (0..n).fold(Rational::zero(), |acc, i| acc + m.get(i, i));
        coeffs[n - k] = -trace / int(k as i64);
    }
    coeffs
}

impl fmt::Display for StandardIsocrystal {
    /// One line per slot: `j -> perm(j) : p^a * c vlabel l` (labels only when the modulus exceeds one).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, s) in self.slots.iter().enumerate() {
            write!(f, "{} -> {} : p^{} * {}", j + 1, s.target + 1, s.exponent, s.unit)?;
            if self.label_modulus > 1 {
                write!(f, " vlabel {}", s.label)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parses one slot line `j -> k : p^a * c [vlabel l]`; returns `(j, slot)` zero-based.
pub fn parse_slot_line(line: &str) -> Result<(usize, Slot)> {
    let bad = |why: &str| Error::Parse(format!("{why} in slot line {line:?}"));
    let (lhs, rhs) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    let (j, k) = lhs.split_once("->").ok_or_else(|| bad("missing '->'"))?;
    let j: usize = j.trim().parse().map_err(|_| bad("bad source slot"))?;
    let k: usize = k.trim().parse().map_err(|_| bad("bad target slot"))?;
    if j == 0 || k == 0 {
        return Err(bad("slots are numbered from 1"));
    }
    let (body, label) = match rhs.split_once("vlabel") {
        Some((b, l)) => (b, Some(l.trim().parse::<u32>().map_err(|_| bad("bad vlabel"))?)),
        None => (rhs, None),
    };
    let (pw, unit) = match body.split_once('*') {
        Some((a, c)) => (a.trim(), crate::rational::parse_rational(c)?),
        None => (body.trim(), Rational::one()),
    };
    let exponent: i64 = pw
        .strip_prefix("p^")
        .ok_or_else(|| bad("expected p^a"))?
        .trim()
        .trim_matches(|c| c == '(' || c == ')')
        .parse()
        .map_err(|_| bad("bad exponent"))?;
    Ok((j - 1, Slot { target: k - 1, exponent, unit, label: label.unwrap_or(0) }))
}

/// Parses the slot lines of a standard isocrystal.
pub fn parse_isocrystal(p: u64, text: &str, label_modulus: u32) -> Result<StandardIsocrystal> {
    let mut slots: BTreeMap<usize, Slot> = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (j, s) = parse_slot_line(line)?;
        if slots.insert(j, s).is_some() {
            return Err(Error::Parse(format!("slot {} defined twice", j + 1)));
        }
    }
    if slots.keys().copied().ne(0..slots.len()) {
        return Err(Error::Parse("slots must be numbered 1..h without gaps".into()));
    }
    StandardIsocrystal::new(p, slots.into_values().collect(), label_modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ex24(p: u64) -> StandardIsocrystal {
        StandardIsocrystal::from_perm(p, &[1, 0], &[0, 1]).unwrap()
    }

    fn ex211() -> StandardIsocrystal {
        // e1, f1, e2, f2 with e1 ↦ p f1, f1 ↦ e1, e2 ↦ f2, f2 ↦ p e2.
        StandardIsocrystal::new(
            3,
            vec![Slot::labelled(1, 1, 0), Slot::labelled(0, 0, 1), Slot::labelled(3, 0, 0), Slot::labelled(2, 1, 1)],
            2,
        )
        .unwrap()
    }

    #[test]
    fn dimensions() {
        assert_eq!(ex24(3).dimension(), 1);
        assert_eq!(StandardIsocrystal::from_perm(3, &[0, 1], &[0, 0]).unwrap().dimension(), 0);
        assert_eq!(ex211().dimension(), 2);
    }

    #[test]
    fn slopes() {
        assert_eq!(ex24(3).slope_decomposition(), vec![(rat(1, 2), 2)]);
        assert_eq!(ex211().slope_decomposition(), vec![(rat(1, 2), 4)]);
        let fixed = StandardIsocrystal::from_perm(3, &[0], &[1]).unwrap();
        assert_eq!(fixed.slope_decomposition(), vec![(int(1), 1)]);
    }

    #[test]
    fn newton_polygons() {
        assert_eq!(ex24(3).newton_polygon().to_string(), "(-1/2,-1/2)");
        assert_eq!(ex24(3).shift(-1).newton_polygon().to_string(), "(1/2,1/2)");
        assert_eq!(ex24(3).shift(-1).slope_decomposition(), vec![(rat(-1, 2), 2)]);
        let etale = StandardIsocrystal::from_perm(3, &[1, 2, 0], &[0, 0, 0]).unwrap();
        assert_eq!(etale.newton_polygon().to_string(), "(0,0,0)");
        assert_eq!(ex24(3).shift(1).shift(-1), ex24(3));
        assert_eq!(ex24(3).shift(0), ex24(3));
    }

    #[test]
    fn duals() {
        assert_eq!(ex24(3).dual_isocrystal().slope_decomposition(), vec![(rat(1, 2), 2)]);
        let two = StandardIsocrystal::from_perm(3, &[0, 1], &[0, 1]).unwrap();
        assert_eq!(two.dual_isocrystal().slope_decomposition(), two.slope_decomposition());
        let third = StandardIsocrystal::from_perm(3, &[1, 2, 0], &[1, 0, 0]).unwrap();
        assert_eq!(third.dual_isocrystal().slope_decomposition(), vec![(rat(2, 3), 3)]);
    }

    #[test]
    fn sums_and_heights() {
        let d2 = ex24(3).direct_sum(&ex24(3)).unwrap();
        assert!(d2.check_coefficient_height(2));
        assert_eq!(d2.height(), 4);
        assert!(!StandardIsocrystal::from_perm(3, &[1, 2, 0], &[0, 0, 0]).unwrap().check_coefficient_height(2));
    }

    #[test]
    fn label_rule_enforced() {
        let bad = StandardIsocrystal::new(3, vec![Slot::labelled(1, 0, 0), Slot::labelled(0, 0, 0)], 2);
        assert!(bad.is_err());
        let unit = StandardIsocrystal::new(3, vec![Slot { unit: int(3), ..Slot::new(0, 0) }], 1);
        assert!(unit.is_err());
    }

    #[test]
    fn charpoly_route() {
        let m = ex24(5).matrix();
        assert_eq!(charpoly(&m), vec![int(-5), int(0), int(1)]);
        assert_eq!(charpoly_newton(&m, 5, 1).unwrap().to_string(), "(-1/2,-1/2)");
        let diag = StandardIsocrystal::from_perm(5, &[0, 1], &[0, 1]).unwrap().matrix();
        assert_eq!(charpoly_newton(&diag, 5, 1).unwrap().to_string(), "(0,-1)");
        assert_eq!(charpoly_newton(&ex211().matrix(), 3, 2).unwrap(), ex211().newton_polygon());
        let singular = Matrix::filled(2, 2, int(0));
        assert!(charpoly_newton(&singular, 5, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = ex211();
        let text = m.to_string();
        assert!(text.starts_with("1 -> 2 : p^1 * 1 vlabel 0\n"));
        assert_eq!(parse_isocrystal(3, &text, 2).unwrap(), m);
        assert!(parse_isocrystal(3, "1 -> 1 : p^0\n3 -> 3 : p^0", 1).is_err());
    }
}
