//! Finite-length modules over discrete valuation rings `Z_(p)[ϖ]/(g)`.
//!
//! Matrices have entries in an [`EisensteinExt`]; a matrix is integral when
//! every entry has nonnegative valuation. Lengths are counted in copies of the
//! residue field, so `O_K/(b)` has length `e · v(b)`.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{EisensteinExt, Field, NfElem};
use crate::isoc::StandardIsocrystal;
use crate::linalg::{self, Matrix};
use crate::poly::QPoly;
use crate::rational::{from_usize, int, is_integer, Rational};

/// `u · m · v = diag(diagonal)` with `u`, `v` invertible over the ring.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Elementary divisors by increasing valuation, zeros last; length `min(rows, cols)`.
    pub diagonal: Vec<NfElem>,
    pub u: Matrix<NfElem>,
    pub u_inv: Matrix<NfElem>,
    pub v: Matrix<NfElem>,
}

fn check_integral(k: &EisensteinExt, m: &Matrix<NfElem>) -> Result<()> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !k.is_integral(m.get(r, c)) {
                return Err(Error::Domain(format!(
                    "entry ({}, {}) = {} is not integral",
                    r + 1,
                    c + 1,
                    k.fmt_elem(m.get(r, c))
                )));
            }
        }
    }
    Ok(())
}

fn add_row_multiple(k: &EisensteinExt, m: &mut Matrix<NfElem>, target: usize, source: usize, c: &NfElem) {
    for j in 0..m.cols() {
        let v = k.add(m.get(target, j), &k.mul(c, m.get(source, j)));
        m.set(target, j, v);
    }
}

fn add_col_multiple(k: &EisensteinExt, m: &mut Matrix<NfElem>, target: usize, source: usize, c: &NfElem) {
    for i in 0..m.rows() {
        let v = k.add(m.get(i, target), &k.mul(c, m.get(i, source)));
        m.set(i, target, v);
    }
}

/// Smith normal form by minimal-valuation pivoting.
pub fn smith_normal_form(k: &EisensteinExt, m: &Matrix<NfElem>) -> Result<Snf> {
    check_integral(k, m)?;
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = linalg::identity(k, rows);
    let mut u_inv = linalg::identity(k, rows);
    let mut v = linalg::identity(k, cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        let mut best: Option<(Rational, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(val) = k.valuation(a.get(i, j)) {
                    if best.as_ref().is_none_or(|b| val < b.0) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((_, i, j)) = best else { break };
        a.swap_rows(t, i);
        u.swap_rows(t, i);
        u_inv.swap_cols(t, i);
        a.swap_cols(t, j);
        v.swap_cols(t, j);
        let inv = k.inv(a.get(t, t));
        for i in t + 1..rows {
            if k.is_zero(a.get(i, t)) {
                continue;
            }
            let c = k.mul(a.get(i, t), &inv);
            let neg = k.neg(&c);
            add_row_multiple(k, &mut a, i, t, &neg);
            add_row_multiple(k, &mut u, i, t, &neg);
            add_col_multiple(k, &mut u_inv, t, i, &c);
        }
        for j in t + 1..cols {
            if k.is_zero(a.get(t, j)) {
                continue;
            }
            let neg = k.neg(&k.mul(a.get(t, j), &inv));
            add_col_multiple(k, &mut a, j, t, &neg);
            add_col_multiple(k, &mut v, j, t, &neg);
        }
    }
    let diagonal = (0..steps).map(|t| a.get(t, t).clone()).collect();
    Ok(Snf { diagonal, u, u_inv, v })
}

/// A length together with the ring it is measured over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Length {
    pub value: u64,
    pub ring: String,
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self.value, self.ring)
    }
}

pub fn ring_name(k: &EisensteinExt) -> String {
    if k.e() == 1 {
        format!("Z_({})", k.p())
    } else {
        let var = k.var().to_string();
        format!("Z_({})[{var}]/({})", k.p(), k.modulus().display_with(&var))
    }
}

/// `lg O/(b) = e · v(b)`.
pub fn element_length(k: &EisensteinExt, b: &NfElem) -> Result<u64> {
    let v = k.valuation(b).ok_or_else(|| Error::Domain("length of O/(0) is infinite".into()))?;
    let scaled = v * from_usize(k.e());
    if scaled < Rational::zero() || !is_integer(&scaled) {
        return Err(Error::Domain(format!("{} is not integral", k.fmt_elem(b))));
    }
    Ok(scaled.to_integer().try_into().expect("length fits in u64"))
}

/// Length of the cokernel of `m: O^cols → O^rows`.
pub fn cokernel_length(k: &EisensteinExt, m: &Matrix<NfElem>) -> Result<Length> {
    let snf = smith_normal_form(k, m)?;
    let nonzero: Vec<&NfElem> = snf.diagonal.iter().filter(|d| !k.is_zero(d)).collect();
    if nonzero.len() < m.rows() {
        return Err(Error::Domain("the cokernel has infinite length".into()));
    }
    let value = nonzero.into_iter().map(|d| element_length(k, d)).sum::<Result<u64>>()?;
    Ok(Length { value, ring: ring_name(k) })
}

/// `deg X = Σ v(b_i)` for `ω_X ≅ ⊕ O_K/(b_i)`.
pub fn degree_of_pgroup(k: &EisensteinExt, annihilators: &[NfElem]) -> Result<Rational> {
    annihilators.iter().try_fold(Rational::zero(), |acc, b| {
        let v = k.valuation(b).ok_or_else(|| Error::Domain("zero annihilator".into()))?;
        if v < Rational::zero() {
            return Err(Error::Domain(format!("{} is not integral", k.fmt_elem(b))));
        }
        Ok(acc + v)
    })
}

/// `deg X + deg X^∨ = ht X`.
pub fn degree_duality_holds(height: u64, degree: &Rational, dual_degree: &Rational) -> bool {
    degree + dual_degree == Rational::from_integer(height.into())
}

/// The ring `O_F ⊗ W(k)` at one inertia embedding, presented by a rational
/// Eisenstein polynomial in `y`, together with a field `K` containing all
/// roots of that polynomial as explicit polynomials in its uniformizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedTower {
    inner: EisensteinExt,
    outer: EisensteinExt,
    roots: Vec<NfElem>,
}

impl RamifiedTower {
    pub fn new(inner: EisensteinExt, outer: EisensteinExt, roots: Vec<NfElem>) -> Result<Self> {
        if inner.p() != outer.p() {
            return Err(Error::Domain("tower levels over different primes".into()));
        }
        if roots.len() != inner.e() {
            return Err(Error::Domain(format!("expected {} roots, got {}", inner.e(), roots.len())));
        }
        for (l, r) in roots.iter().enumerate() {
            if !outer.eval_poly(inner.modulus(), r).is_zero() {
                return Err(Error::Domain(format!("{} is not a root of {}", outer.fmt_elem(r), inner.modulus())));
            }
            if roots[..l].contains(r) {
                return Err(Error::Domain("roots must be distinct".into()));
            }
        }
        Ok(Self { inner, outer, roots })
    }

    /// `y^2 + b y + c`, split over the field it defines: roots `w` and `−b − w`.
    pub fn quadratic(p: u64, b: i64, c: i64) -> Result<Self> {
        let g = QPoly::from_ints(&[c, b, 1]);
        let outer = EisensteinExt::new(p, g.clone())?;
        let w = outer.uniformizer();
        let other = outer.sub(&outer.from_rational(&int(-b)), &w);
        Self::new(EisensteinExt::with_var(p, g, 'y')?, outer, vec![w, other])
    }

    /// `y − p`: the unramified case, a single embedding.
    pub fn trivial(p: u64) -> Result<Self> {
        let g = QPoly::from_ints(&[-(p as i64), 1]);
        let outer = EisensteinExt::new(p, g.clone())?;
        let root = outer.from_rational(&int(p as i64));
        Self::new(EisensteinExt::with_var(p, g, 'y')?, outer, vec![root])
    }

    /// Minimal polynomial of `ζ − 1` for a primitive `p`-th (or 8th, at `p = 2`) root of unity;
    /// the roots are `ζ^k − 1` for `k` prime to the order.
    pub fn cyclotomic(p: u64) -> Result<Self> {
        let (g, exponents): (QPoly, Vec<usize>) = match p {
            2 => (QPoly::from_ints(&[2, 4, 6, 4, 1]), vec![1, 3, 5, 7]),
            3 => (QPoly::from_ints(&[3, 3, 1]), vec![1, 2]),
            5 => (QPoly::from_ints(&[5, 10, 10, 5, 1]), vec![1, 2, 3, 4]),
            _ => return Err(Error::Unsupported(format!("no cyclotomic tower of degree at most 4 at {p}"))),
        };
        let outer = EisensteinExt::new(p, g.clone())?;
        let zeta = outer.add(&outer.uniformizer(), &outer.one());
        let roots = exponents
            .iter()
            .map(|&k| {
                let z = (0..k).fold(outer.one(), |acc, _| outer.mul(&acc, &zeta));
                outer.sub(&z, &outer.one())
            })
            .collect();
        Self::new(EisensteinExt::with_var(p, g, 'y')?, outer, roots)
    }

    /// `y^3 − 7y^2 + 14y − 7`, the minimal polynomial of `2 − (ζ_7 + ζ_7^{-1})`.
    pub fn real_cyclotomic7() -> Result<Self> {
        let g = QPoly::from_ints(&[-7, 14, -7, 1]);
        let k = EisensteinExt::new(7, g.clone())?;
        let two = k.from_rational(&int(2));
        let eta = k.sub(&two, &k.uniformizer());
        let eta2 = k.sub(&k.mul(&eta, &eta), &two);
        let eta3 = k.sub(&k.mul(&eta, &k.mul(&eta, &eta)), &k.mul(&k.from_rational(&int(3)), &eta));
        let roots = [eta, eta2, eta3].iter().map(|x| k.sub(&two, x)).collect();
        Self::new(EisensteinExt::with_var(7, g, 'y')?, k, roots)
    }

    pub fn inner(&self) -> &EisensteinExt {
        &self.inner
    }

    pub fn outer(&self) -> &EisensteinExt {
        &self.outer
    }

    pub fn roots(&self) -> &[NfElem] {
        &self.roots
    }

    /// `d′`, the number of embeddings over the fixed inertia embedding.
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// `τ′_l(a)` for every `l`.
    pub fn embed(&self, a: &NfElem) -> Vec<NfElem> {
        self.roots.iter().map(|r| self.outer.eval_poly(a, r)).collect()
    }

    /// Matrix over `K` of multiplication by `a` on `O_K ⊗ inner` in the basis `1, y, ..., y^{d′−1}`.
    pub fn multiplication_matrix(&self, a: &NfElem) -> Matrix<NfElem> {
        let k = &self.outer;
        let n = self.degree();
        let a = self.inner.reduce(a);
        let mut m = Matrix::filled(n, n, k.zero());
        for c in 0..n {
            let product = self.inner.mul(&a, &QPoly::monomial(Rational::one(), c));
            for r in 0..n {
                m.set(r, c, k.from_rational(&product.coeff(r)));
            }
        }
        m
    }
}

/// Basis of `O^dim`, as columns of a unimodular matrix, whose first `s`
/// columns span the saturation of the first `s` given vectors, for every `s`.
pub fn adapted_basis(k: &EisensteinExt, vectors: &[Vec<NfElem>], dim: usize) -> Result<Matrix<NfElem>> {
    let m = vectors.len();
    let mut e = Matrix::filled(dim, m, k.zero());
    for (c, v) in vectors.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            e.set(r, c, x.clone());
        }
    }
    let mut u = linalg::identity(k, dim);
    for t in 0..m {
        let pivot = (t..dim)
            .filter_map(|i| k.valuation(e.get(i, t)).map(|v| (v, i)))
            .min()
            .ok_or_else(|| Error::Domain("vectors are linearly dependent".into()))?
            .1;
        e.swap_rows(t, pivot);
        u.swap_rows(t, pivot);
        let inv = k.inv(e.get(t, t));
        for i in t + 1..dim {
            if k.is_zero(e.get(i, t)) {
                continue;
            }
            let neg = k.neg(&k.mul(e.get(i, t), &inv));
            add_row_multiple(k, &mut e, i, t, &neg);
            add_row_multiple(k, &mut u, i, t, &neg);
        }
    }
    Ok(linalg::inverse(k, &u).expect("elementary row operations are invertible"))
}

/// Lengths of `g′(P_I)` for one subset `I` of embeddings, by three routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPartLengths {
    pub subset: Vec<usize>,
    /// `lg P/R′P − lg P/(P_I + R′P)`, both from Smith normal forms over `O_K`.
    pub direct: u64,
    /// `e · Σ_{l ∈ I} v(τ′_l(a_j))` read off the triangular matrices in an adapted basis.
    pub machinery: u64,
    /// `(|I|/d′) · lg Q_{O_K}`.
    pub formula: Rational,
    /// `lg Q_{O_K}` from the elementary divisors over the inner ring.
    pub total: u64,
    /// `lg Q_{O_K}` from the Smith normal form of the base-changed relation matrix.
    pub total_oracle: u64,
}

impl EigenPartLengths {
    pub fn agrees(&self) -> bool {
        self.direct == self.machinery
            && Rational::from_integer(self.direct.into()) == self.formula
            && self.total == self.total_oracle
    }
}

/// A finite-length module `Q = coker(R^r → R^r)` over the inner ring `R` of a tower.
#[derive(Clone, Debug)]
pub struct InnerQuotient {
    tower: RamifiedTower,
    /// Elementary divisors of the relation matrix over `R`.
    divisors: Vec<NfElem>,
    /// Relation matrix base-changed to `O_K`, of size `r d′`.
    relations: Matrix<NfElem>,
    /// Eigenvectors of `y` on `O_K^{r d′}`, grouped by root.
    eigenvectors: Vec<Vec<Vec<NfElem>>>,
    total_oracle: u64,
}

impl InnerQuotient {
    pub fn new(tower: RamifiedTower, relations: &Matrix<NfElem>) -> Result<Self> {
        let inner = tower.inner();
        let r = relations.rows();
        if relations.cols() != r || r == 0 {
            return Err(Error::Domain("relations must form a nonempty square matrix".into()));
        }
        let snf = smith_normal_form(inner, relations)?;
        if snf.diagonal.iter().any(|d| inner.is_zero(d)) {
            return Err(Error::Domain("the quotient does not have finite length".into()));
        }
        let k = tower.outer();
        let dd = tower.degree();
        let n = r * dd;
        let mut big = Matrix::filled(n, n, k.zero());
        for i in 0..r {
            for j in 0..r {
                let block = tower.multiplication_matrix(relations.get(i, j));
                for a in 0..dd {
                    for b in 0..dd {
                        big.set(i * dd + a, j * dd + b, block.get(a, b).clone());
                    }
                }
            }
        }
        let y = tower.multiplication_matrix(&inner.uniformizer());
        let eigenvectors = tower
            .roots()
            .iter()
            .map(|root| {
                let mut shifted = y.clone();
                for a in 0..dd {
                    let v = k.sub(shifted.get(a, a), root);
                    shifted.set(a, a, v);
                }
                let line = linalg::kernel(k, &shifted);
                debug_assert_eq!(line.len(), 1);
                (0..r)
                    .map(|block| {
                        let mut v = vec![k.zero(); n];
                        for (a, x) in line[0].iter().enumerate() {
                            v[block * dd + a] = x.clone();
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let total_oracle = cokernel_length(k, &big)?.value;
        Ok(Self { tower, divisors: snf.diagonal, relations: big, eigenvectors, total_oracle })
    }

    pub fn tower(&self) -> &RamifiedTower {
        &self.tower
    }

    pub fn divisors(&self) -> &[NfElem] {
        &self.divisors
    }

    /// `lg Q_{O_K} = e · Σ_j Σ_l v(τ′_l(a_j))`.
    pub fn total_length(&self) -> Result<u64> {
        let k = self.tower.outer();
        self.divisors.iter().flat_map(|a| self.tower.embed(a)).map(|t| element_length(k, &t)).sum()
    }

    pub fn lengths(&self, subset: &[usize]) -> Result<EigenPartLengths> {
        let k = self.tower.outer();
        let dd = self.tower.degree();
        if subset.iter().any(|&l| l >= dd) || subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("{subset:?} is not an increasing subset of 0..{dd}")));
        }
        let n = self.relations.rows();

        let direct = if subset.is_empty() {
            0
        } else {
            let span: Vec<Vec<NfElem>> = subset.iter().flat_map(|&l| self.eigenvectors[l].clone()).collect();
            let basis = adapted_basis(k, &span, n)?;
            let mut gens = Matrix::filled(n, span.len() + n, k.zero());
            for r in 0..n {
                for c in 0..span.len() {
                    gens.set(r, c, basis.get(r, c).clone());
                }
                for c in 0..n {
                    gens.set(r, span.len() + c, self.relations.get(r, c).clone());
                }
            }
            self.total_oracle - cokernel_length(k, &gens)?.value
        };

        let order: Vec<usize> = subset.iter().copied().chain((0..dd).filter(|l| !subset.contains(l))).collect();
        let line: Vec<Vec<NfElem>> = order.iter().map(|&l| self.eigenvectors[l][0][..dd].to_vec()).collect();
        let basis = adapted_basis(k, &line, dd)?;
        let basis_inv = linalg::inverse(k, &basis).expect("adapted bases are invertible");
        let mut machinery = 0;
        for a in &self.divisors {
            let mult = self.tower.multiplication_matrix(a);
            let tri = linalg::mat_mul(k, &basis_inv, &linalg::mat_mul(k, &mult, &basis));
            let images = self.tower.embed(a);
            for r in 0..dd {
                for c in 0..r {
                    if !k.is_zero(tri.get(r, c)) {
                        return Err(Error::Internal("multiplication is not triangular in the adapted basis".into()));
                    }
                }
                if *tri.get(r, r) != images[order[r]] {
                    return Err(Error::Internal("diagonal of the adapted matrix differs from τ′(a)".into()));
                }
            }
            for s in 0..subset.len() {
                machinery += element_length(k, tri.get(s, s))?;
            }
        }

        let total = self.total_length()?;
        let formula = from_usize(subset.len()) / from_usize(dd) * Rational::from_integer(total.into());
        Ok(EigenPartLengths {
            subset: subset.to_vec(),
            direct,
            machinery,
            formula,
            total,
            total_oracle: self.total_oracle,
        })
    }

    /// Lengths for every subset of embeddings, in binary counting order.
    pub fn all_subsets(&self) -> Result<Vec<EigenPartLengths>> {
        let dd = self.tower.degree();
        (0u32..1 << dd).map(|bits| self.lengths(&(0..dd).filter(|l| bits >> l & 1 == 1).collect::<Vec<_>>())).collect()
    }
}

/// Images of `a′ = ϖ_K ⊗ 1 + 1 ⊗ π` under the two embeddings, for `K = F = Q_p(√p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonInnerDemo {
    pub p: u64,
    pub images: Vec<String>,
    pub valuations: Vec<Option<Rational>>,
}

impl NonInnerDemo {
    /// Whether the images have different valuations, which is what breaks the length formula.
    pub fn valuations_differ(&self) -> bool {
        self.valuations.windows(2).any(|w| w[0] != w[1])
    }
}

pub fn non_inner_element_demo(p: u64) -> Result<NonInnerDemo> {
    let tower = RamifiedTower::quadratic(p, 0, -(p as i64))?;
    let k = tower.outer();
    let w = k.uniformizer();
    let images: Vec<NfElem> = tower.roots().iter().map(|r| k.add(&w, r)).collect();
    Ok(NonInnerDemo {
        p,
        valuations: images.iter().map(|x| k.valuation(x)).collect(),
        images: images.iter().map(|x| k.fmt_elem(x)).collect(),
    })
}

/// Whether the per-component lengths of `C = ⊕_i C_i` are all `ht X / f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentLengthReport {
    pub lengths: Vec<u64>,
    pub height: u64,
    pub expected: Rational,
    pub constant: bool,
}

pub fn component_length_check(lengths: &[u64]) -> ComponentLengthReport {
    let height: u64 = lengths.iter().sum();
    let expected = Rational::new(height.into(), (lengths.len().max(1) as u64).into());
    let constant = lengths.iter().all(|&l| Rational::from_integer(l.into()) == expected);
    ComponentLengthReport { lengths: lengths.to_vec(), height, expected, constant }
}

/// Component lengths of `M/M′` for the sublattice `M′` spanned by `p^{s_j} b_j`.
pub fn sublattice_cokernel(lattice: &StandardIsocrystal, scaling: &[i64]) -> Result<Vec<u64>> {
    lattice.scaled_sublattice(scaling)?;
    let mut out = vec![0u64; lattice.label_modulus() as usize];
    for (s, &k) in lattice.slots().iter().zip(scaling) {
        out[s.label as usize] += k as u64;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn sqrt_p(p: u64) -> EisensteinExt {
        EisensteinExt::sqrt_p(p).unwrap()
    }

    fn mat(k: &EisensteinExt, rows: &[&[&str]]) -> Matrix<NfElem> {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| k.parse_elem(s).unwrap()).collect()).collect(),
            rows[0].len(),
        )
    }

    #[test]
    fn smith_forms() {
        let k = sqrt_p(3);
        let m = mat(&k, &[&["w", "1"], &["0", "w"]]);
        let snf = smith_normal_form(&k, &m).unwrap();
        let vals: Vec<_> = snf.diagonal.iter().map(|d| k.valuation(d).unwrap()).collect();
        assert_eq!(vals, vec![int(0), int(1)]);
        let prod = linalg::mat_mul(&k, &snf.u, &linalg::mat_mul(&k, &m, &snf.v));
        assert_eq!(prod.get(0, 1), &k.zero());
        assert_eq!(prod.get(1, 0), &k.zero());
        assert_eq!(linalg::mat_mul(&k, &snf.u, &snf.u_inv), linalg::identity(&k, 2));
        let diag = mat(&k, &[&["w", "0"], &["0", "3"]]);
        assert_eq!(
            smith_normal_form(&k, &diag).unwrap().diagonal,
            diag.to_rows().iter().enumerate().map(|(i, r)| r[i].clone()).collect::<Vec<_>>()
        );
        let deficient = mat(&k, &[&["w", "w"], &["1", "1"]]);
        assert!(k.is_zero(&smith_normal_form(&k, &deficient).unwrap().diagonal[1]));
        assert!(cokernel_length(&k, &deficient).is_err());
    }

    #[test]
    fn lengths_and_degrees() {
        let k = sqrt_p(5);
        let w = k.uniformizer();
        let p = k.from_rational(&int(5));
        assert_eq!(element_length(&k, &w).unwrap(), 1);
        assert_eq!(element_length(&k, &p).unwrap(), 2);
        assert_eq!(element_length(&k, &k.one()).unwrap(), 0);
        assert_eq!(degree_of_pgroup(&k, &[w.clone(), p]).unwrap(), rat(3, 2));
        assert_eq!(degree_of_pgroup(&k, &[]).unwrap(), int(0));
        assert!(degree_of_pgroup(&k, &[k.zero()]).is_err());
        assert!(degree_duality_holds(2, &rat(1, 2), &rat(3, 2)));
        assert_eq!(
            cokernel_length(&k, &Matrix::from_rows(vec![vec![w]], 1)).unwrap().to_string(),
            "1 over Z_(5)[w]/(w^2 - 5)"
        );
    }

    #[test]
    fn catalogue_towers_split() {
        for t in [
            RamifiedTower::cyclotomic(2).unwrap(),
            RamifiedTower::cyclotomic(3).unwrap(),
            RamifiedTower::cyclotomic(5).unwrap(),
            RamifiedTower::real_cyclotomic7().unwrap(),
            RamifiedTower::quadratic(2, 2, 2).unwrap(),
            RamifiedTower::trivial(3).unwrap(),
        ] {
            assert_eq!(t.degree(), t.inner().e());
        }
    }

    #[test]
    fn eigen_part_of_uniformizer() {
        let tower = RamifiedTower::quadratic(3, 0, -3).unwrap();
        let y = tower.inner().uniformizer();
        let q = InnerQuotient::new(tower, &Matrix::from_rows(vec![vec![y]], 1)).unwrap();
        let one = q.lengths(&[0]).unwrap();
        assert_eq!((one.direct, one.machinery, one.total), (1, 1, 2));
        assert!(one.agrees());
        assert_eq!(q.lengths(&[]).unwrap().direct, 0);
        assert_eq!(q.lengths(&[0, 1]).unwrap().direct, 2);
        assert!(q.all_subsets().unwrap().iter().all(EigenPartLengths::agrees));
    }

    #[test]
    fn eigen_parts_rank_two() {
        let tower = RamifiedTower::cyclotomic(5).unwrap();
        let inner = tower.inner().clone();
        let e = |s: &str| inner.parse_elem(s).unwrap();
        let g = Matrix::from_rows(vec![vec![e("y^2"), e("1 + y")], vec![e("5"), e("y^3 + 5")]], 2);
        let q = InnerQuotient::new(tower, &g).unwrap();
        assert!(q.all_subsets().unwrap().iter().all(EigenPartLengths::agrees));
    }

    #[test]
    fn non_inner_elements() {
        let odd = non_inner_element_demo(3).unwrap();
        assert_eq!(odd.images, vec!["2*w".to_string(), "0".to_string()]);
        assert_eq!(odd.valuations, vec![Some(rat(1, 2)), None]);
        assert!(odd.valuations_differ());
        assert_eq!(non_inner_element_demo(2).unwrap().valuations[0], Some(rat(3, 2)));
    }

    #[test]
    fn component_lengths() {
        assert!(!component_length_check(&[0, 1]).constant);
        assert!(component_length_check(&[1, 1]).constant);
        assert!(component_length_check(&[3]).constant);
    }
}
