//! Models of `p`-divisible groups over `O_K` with an action of `O_F`.
//!
//! A model is a Dieudonné lattice `D` over `W(k)` with monomial `φ`, where
//! `pD ⊆ φD ⊆ D` forces every exponent into `{0, 1}`, together with a direct
//! summand `L ⊆ D ⊗ O_K` playing the role of `ω_{H^∨}`. Its reduction must be
//! `VD/pD`, the span of the basis vectors with exponent 1. Then
//! `dim H^∨ = rank L` and `dim H = ht − rank L`.
//!
//! The associated filtered isocrystal is `(D[1/p], p^{-1}φ)` with
//! `Fil^0 = L ⊗ K` and `Fil^{-1}` everything, so its jumps lie in `{−1, 0}`.

use std::fmt;
use std::str::FromStr;

use crate::dvrmod::smith_normal_form;
use crate::error::{Error, Result};
use crate::field::{EisensteinExt, Field, NfElem};
use crate::filisoc::{CoefficientField, FilteredIsocrystalCx, Filtration, RamifiedAction, SubspaceData, WaReport};
use crate::isoc::{Slot, StandardIsocrystal};
use crate::linalg::Matrix;
use crate::poly::QPoly;
use crate::polycalc::{self, NewtonVector, PolygonTriple};
use crate::rational::{from_usize, int, inv_mod, Rational};

/// Which Dieudonné theory the lattice is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variance::Covariant => "covariant",
            Variance::Contravariant => "contravariant",
        })
    }
}

impl FromStr for Variance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "covariant" => Ok(Variance::Covariant),
            "contravariant" => Ok(Variance::Contravariant),
            other => Err(Error::Parse(format!("unknown variance {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DieudonneLift {
    lattice: StandardIsocrystal,
    coeff: CoefficientField,
    ramified: RamifiedAction,
    base: EisensteinExt,
    /// Images of the uniformizer of `F` under its embeddings into `K`; empty when `F` is unramified.
    roots: Vec<NfElem>,
    /// Generators of `L`, as coordinate vectors in the standard basis.
    fil_lattice: Vec<Vec<NfElem>>,
    rank: usize,
    variance: Variance,
}

impl DieudonneLift {
    /// Checks the lattice conditions, that `L` is a direct summand and the reduction condition.
    pub fn new(
        lattice: StandardIsocrystal,
        coeff: CoefficientField,
        ramified: RamifiedAction,
        base: EisensteinExt,
        roots: Vec<NfElem>,
        fil_lattice: Vec<Vec<NfElem>>,
    ) -> Result<Self> {
        let h = lattice.height();
        if let Some(j) = lattice.slots().iter().position(|s| !(0..=1).contains(&s.exponent)) {
            return Err(Error::Model(format!(
                "slot {} has exponent {}; pD ⊆ φD ⊆ D needs exponents 0 or 1",
                j + 1,
                lattice.slots()[j].exponent
            )));
        }
        if base.p() != lattice.p() {
            return Err(Error::Model("base field and lattice over different primes".into()));
        }
        if fil_lattice.iter().any(|v| v.len() != h) {
            return Err(Error::Model(format!("generators of L must have {h} coordinates")));
        }
        let rank = summand_rank(&base, &fil_lattice, h)?;
        let lift = Self { lattice, coeff, ramified, base, roots, fil_lattice, rank, variance: Variance::Covariant };
        lift.check_reduction()?;
        Ok(lift)
    }

    pub fn with_variance(mut self, variance: Variance) -> Self {
        self.variance = variance;
        self
    }

    pub fn lattice(&self) -> &StandardIsocrystal {
        &self.lattice
    }

    pub fn coeff(&self) -> &CoefficientField {
        &self.coeff
    }

    pub fn ramified(&self) -> &RamifiedAction {
        &self.ramified
    }

    pub fn base(&self) -> &EisensteinExt {
        &self.base
    }

    pub fn roots(&self) -> &[NfElem] {
        &self.roots
    }

    pub fn fil_lattice(&self) -> &[Vec<NfElem>] {
        &self.fil_lattice
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn height(&self) -> usize {
        self.lattice.height()
    }

    /// `dim H^∨ = rank L`.
    pub fn codimension(&self) -> usize {
        self.rank
    }

    /// `dim H = ht − rank L`.
    pub fn dimension(&self) -> usize {
        self.height() - self.rank
    }

    /// Row-reduced basis over `F_p` of the image of `L` in `D ⊗ k`.
    pub fn reduction(&self) -> Result<Vec<Vec<u64>>> {
        let p = self.base.p();
        let rows = self
            .fil_lattice
            .iter()
            .map(|v| v.iter().map(|x| self.base.residue(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(echelon_mod_p(rows, p))
    }

    /// Same lattice with the same `φ`, and `L` with the same reduction.
    pub fn same_reduction(&self, other: &Self) -> Result<bool> {
        Ok(self.lattice == other.lattice && self.reduction()? == other.reduction()?)
    }

    fn check_reduction(&self) -> Result<()> {
        let expected: Vec<usize> = (0..self.height()).filter(|&j| self.lattice.slots()[j].exponent == 1).collect();
        let reduction = self.reduction()?;
        let outside =
            reduction.iter().any(|row| row.iter().enumerate().any(|(j, &x)| x != 0 && !expected.contains(&j)));
        if outside || reduction.len() != expected.len() {
            let slots: Vec<usize> = expected.iter().map(|j| j + 1).collect();
            return Err(Error::Model(format!(
                "the reduction of L must be VD/pD, the span of slots {slots:?} with exponent 1"
            )));
        }
        Ok(())
    }

    /// `(D[1/p], p^{-1}φ)` with `Fil^0 = L ⊗ K`.
    pub fn to_filtered_isocrystal(&self) -> Result<FilteredIsocrystalCx> {
        let h = self.height();
        let k = &self.base;
        let all: Vec<Vec<NfElem>> =
            (0..h).map(|j| (0..h).map(|i| if i == j { k.one() } else { k.zero() }).collect()).collect();
        let steps = match self.rank {
            0 => vec![(-1, all)],
            r if r == h => vec![(0, all)],
            _ => vec![(-1, all), (0, self.fil_lattice.clone())],
        };
        let data = SubspaceData { base: k.clone(), roots: self.roots.clone(), steps };
        let obj = FilteredIsocrystalCx::new(
            self.lattice.shift(-1),
            self.coeff.clone(),
            self.ramified.clone(),
            Filtration::Subspaces(data),
        )?;
        if !obj.has_pdiv_jumps() {
            return Err(Error::Model("filtration jumps outside {-1, 0}".into()));
        }
        Ok(obj)
    }

    /// `t_H = t_N = −dim H`, then weak admissibility of the associated object.
    pub fn verify_wa(&self) -> Result<PdivReport> {
        let obj = self.to_filtered_isocrystal()?;
        Ok(PdivReport {
            dimension: self.dimension(),
            t_newton: obj.t_newton(),
            t_hodge: obj.t_hodge(),
            wa: obj.weak_admissibility()?,
        })
    }

    /// Newton, Hodge and HN polygons; all end at `dim H / d`.
    pub fn polygons(&self) -> Result<PolygonTriple> {
        let obj = self.to_filtered_isocrystal()?;
        if !obj.is_weakly_admissible()? {
            return Err(Error::Model("the associated filtered isocrystal is not weakly admissible".into()));
        }
        let triple =
            PolygonTriple { newt: obj.newton()?.to_polygon(), hdg: obj.hodge()?.to_polygon(), hn: obj.hn_polygon()? };
        let end = from_usize(self.dimension()) / from_usize(obj.d());
        if [&triple.newt, &triple.hdg, &triple.hn].iter().any(|p| *p.end_value() != end) {
            return Err(Error::Internal(format!("polygons do not all end at dim H/d = {end}")));
        }
        Ok(triple)
    }

    /// Model of the dual group: exponents `1 − a_j`, inverse units, `Π^T` and `L^⊥`.
    pub fn dual_model(&self) -> Result<Self> {
        let k = &self.base;
        let h = self.height();
        let perp = if self.rank == 0 {
            (0..h).map(|j| (0..h).map(|i| if i == j { k.one() } else { k.zero() }).collect()).collect()
        } else {
            let g = Matrix::from_rows(self.fil_lattice.clone(), h);
            let snf = smith_normal_form(k, &g)?;
            (self.rank..h).map(|c| snf.v.column(c)).collect()
        };
        let ramified = match &self.ramified {
            RamifiedAction::Operator(pi) => RamifiedAction::Operator(pi.transpose()),
            other => other.clone(),
        };
        let dual = Self::new(
            self.lattice.dual_isocrystal(),
            self.coeff.clone(),
            ramified,
            self.base.clone(),
            self.roots.clone(),
            perp,
        )?;
        Ok(dual.with_variance(self.variance.flip()))
    }

    /// `D ⊕ D′` with `L ⊕ L′`; both models must share `F`, `K` and the roots.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.coeff != other.coeff || self.base != other.base || self.roots != other.roots {
            return Err(Error::Model("direct sum of models with different coefficient data".into()));
        }
        if self.variance != other.variance {
            return Err(Error::Model("direct sum of models written in different variances".into()));
        }
        let (h, h2) = (self.height(), other.height());
        let ramified = match (&self.ramified, &other.ramified) {
            (RamifiedAction::Symbolic, RamifiedAction::Symbolic) => RamifiedAction::Symbolic,
            (RamifiedAction::Blocks(a), RamifiedAction::Blocks(b)) => RamifiedAction::Blocks(
                a.iter().cloned().chain(b.iter().map(|blk| blk.iter().map(|j| j + h).collect())).collect(),
            ),
            (RamifiedAction::Operator(a), RamifiedAction::Operator(b)) => {
                let mut m = Matrix::filled(h + h2, h + h2, Rational::from_integer(0.into()));
                for r in 0..h {
                    for c in 0..h {
                        m.set(r, c, a.get(r, c).clone());
                    }
                }
                for r in 0..h2 {
                    for c in 0..h2 {
                        m.set(h + r, h + c, b.get(r, c).clone());
                    }
                }
                RamifiedAction::Operator(m)
            }
            _ => return Err(Error::Unsupported("direct sum of models with different ramified actions".into())),
        };
        let k = &self.base;
        let pad = |v: &Vec<NfElem>, before: usize, after: usize| -> Vec<NfElem> {
            std::iter::repeat_n(k.zero(), before)
                .chain(v.iter().cloned())
                .chain(std::iter::repeat_n(k.zero(), after))
                .collect()
        };
        let fil = self
            .fil_lattice
            .iter()
            .map(|v| pad(v, 0, h2))
            .chain(other.fil_lattice.iter().map(|v| pad(v, h, 0)))
            .collect();
        let sum = Self::new(
            self.lattice.direct_sum(&other.lattice)?,
            self.coeff.clone(),
            ramified,
            self.base.clone(),
            self.roots.clone(),
            fil,
        )?;
        Ok(sum.with_variance(self.variance))
    }

    /// Compares the polygons of the dual model with the duals of the polygons, and
    /// for polarised objects also checks that all three are symmetric.
    pub fn duality_check(&self, polarised: bool) -> Result<DualityReport> {
        let own = self.polygons()?;
        let dual = self.dual_model()?.polygons()?;
        let expected = own.dual();
        Ok(DualityReport {
            newt: dual.newt == expected.newt,
            hdg: dual.hdg == expected.hdg,
            hn: dual.hn == expected.hn,
            symmetric: polarised.then(|| own.is_symmetric()),
            polygons: own,
            dual_polygons: dual,
        })
    }
}

/// Rank of the span of `gens`, after checking that the span is a direct summand.
fn summand_rank(k: &EisensteinExt, gens: &[Vec<NfElem>], h: usize) -> Result<usize> {
    if gens.is_empty() {
        return Ok(0);
    }
    for v in gens {
        if let Some(x) = v.iter().find(|x| !k.is_integral(x)) {
            return Err(Error::Model(format!("generator entry {} of L is not integral", k.fmt_elem(x))));
        }
    }
    let snf = smith_normal_form(k, &Matrix::from_rows(gens.to_vec(), h))?;
    let nonzero: Vec<&NfElem> = snf.diagonal.iter().filter(|d| !k.is_zero(d)).collect();
    if nonzero.iter().any(|d| !k.is_unit(d)) {
        return Err(Error::Model("L is not a direct summand of the lattice".into()));
    }
    Ok(nonzero.len())
}

/// Nonzero rows of the reduced row echelon form over `F_p`.
pub fn echelon_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else { continue };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][c] % p, p);
        for x in rows[rank].iter_mut() {
            *x = *x % p * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_multiple_of(p) {
                let factor = row[c] % p;
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x % p + p - factor * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdivReport {
    pub dimension: usize,
    pub t_newton: i64,
    pub t_hodge: i64,
    pub wa: WaReport,
}

impl PdivReport {
    pub fn holds(&self) -> bool {
        let d = -(self.dimension as i64);
        self.t_newton == d && self.t_hodge == d && self.wa.admissible
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub newt: bool,
    pub hdg: bool,
    pub hn: bool,
    /// Present for polarised inputs.
    pub symmetric: Option<bool>,
    pub polygons: PolygonTriple,
    pub dual_polygons: PolygonTriple,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.newt && self.hdg && self.hn && self.symmetric != Some(false)
    }
}

/// `(1/d) Σ_i (1^{(n − r_i)}, 0^{(r_i)})` with `r_i = dim D_i / φ D_{i−1}`.
///
/// For monomial `φ`, `r_i` is the sum of the exponents of the slots labelled `i − 1`,
/// since those slots map into component `i`. Needs `d` equal to the label modulus and
/// exponents in `{0, 1}`.
pub fn hodge_unramified(lattice: &StandardIsocrystal, d: usize) -> Result<NewtonVector> {
    if d == 0 || d != lattice.label_modulus() as usize {
        return Err(Error::Unsupported(format!(
            "the unramified recipe needs d = f = {}, got {d}",
            lattice.label_modulus()
        )));
    }
    if !lattice.check_coefficient_height(d) {
        return Err(Error::Domain(format!("height {} is not divisible by {d}", lattice.height())));
    }
    if lattice.slots().iter().any(|s| !(0..=1).contains(&s.exponent)) {
        return Err(Error::Model("exponents must be 0 or 1".into()));
    }
    let n = lattice.height() / d;
    let mut r = vec![0usize; d];
    for s in lattice.slots() {
        r[(s.label as usize + 1) % d] += s.exponent as usize;
    }
    let parts: Vec<NewtonVector> = r.iter().map(|&ri| polycalc::ones_then_zeros(n - ri, n)).collect();
    polycalc::average(&parts)
}

fn unit_vector(k: &EisensteinExt, h: usize, j: usize) -> Vec<NfElem> {
    (0..h).map(|i| if i == j { k.one() } else { k.zero() }).collect()
}

/// `L` spanned by the basis vectors with exponent 1, over `K = Q_p`.
fn standard_lift(lattice: StandardIsocrystal, coeff: CoefficientField) -> Result<DieudonneLift> {
    let base = EisensteinExt::rationals(lattice.p())?;
    let h = lattice.height();
    let gens = (0..h).filter(|&j| lattice.slots()[j].exponent == 1).map(|j| unit_vector(&base, h, j)).collect();
    DieudonneLift::new(lattice, coeff, RamifiedAction::Symbolic, base, Vec::new(), gens)
}

/// Two lifts over `K = Q_p(√p)` of the same group over `k`, with `F = Q_p(√p)`
/// acting through `e_1 ↦ e_2, e_2 ↦ p e_1` on two copies; their Hodge polygons
/// are `(1/2, 1/2)` and `(1, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RamifiedLiftPair {
    /// `L` is the `√p`-eigenline of `Π` in both copies.
    pub same_eigenvalue: DieudonneLift,
    /// `L` uses the `√p`-eigenline in the first copy and the `−√p`-eigenline in the second.
    pub mixed_eigenvalues: DieudonneLift,
}

pub fn ramified_lift_pair(p: u64) -> Result<RamifiedLiftPair> {
    let lattice =
        StandardIsocrystal::new(p, vec![Slot::new(1, 0), Slot::new(0, 1), Slot::new(3, 0), Slot::new(2, 1)], 1)?;
    let pi_int = p as i64;
    let pi_rows: Vec<Vec<Rational>> = [[0, pi_int, 0, 0], [1, 0, 0, 0], [0, 0, 0, pi_int], [0, 0, 1, 0]]
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    let pi = Matrix::from_rows(pi_rows, 4);
    let coeff = CoefficientField::new(p, 1, QPoly::from_ints(&[-pi_int, 0, 1]))?;
    let k = EisensteinExt::sqrt_p(p)?;
    let w = k.uniformizer();
    let roots = vec![w.clone(), k.neg(&w)];
    let line = |sign: &NfElem, first: bool| -> Vec<NfElem> {
        let entry = k.mul(sign, &w);
        if first {
            vec![entry, k.one(), k.zero(), k.zero()]
        } else {
            vec![k.zero(), k.zero(), entry, k.one()]
        }
    };
    let (plus, minus) = (k.one(), k.neg(&k.one()));
    let build = |second: &NfElem| {
        DieudonneLift::new(
            lattice.clone(),
            coeff.clone(),
            RamifiedAction::Operator(pi.clone()),
            k.clone(),
            roots.clone(),
            vec![line(&plus, true), line(second, false)],
        )
    };
    Ok(RamifiedLiftPair { same_eigenvalue: build(&plus)?, mixed_eigenvalues: build(&minus)? })
}

/// Lattices `M ⊇ M′` for `F = Q_{p^2}` on `e_1, f_1, e_2, f_2`, stored contravariantly,
/// with `M/M′` generated by `f_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnramifiedIsogeny {
    /// `e_1 ↦ p f_1, f_1 ↦ e_1, e_2 ↦ f_2, f_2 ↦ p e_2`.
    pub larger: DieudonneLift,
    pub smaller: DieudonneLift,
    /// `M′` is spanned by `p^{s_j} b_j`.
    pub scaling: Vec<i64>,
}

impl UnramifiedIsogeny {
    /// Lengths of `M/M′` in each inertia component.
    pub fn cokernel_components(&self) -> Result<Vec<u64>> {
        crate::dvrmod::sublattice_cokernel(self.larger.lattice(), &self.scaling)
    }
}

pub fn unramified_isogeny(p: u64) -> Result<UnramifiedIsogeny> {
    let larger = StandardIsocrystal::new(
        p,
        vec![Slot::labelled(1, 1, 0), Slot::labelled(0, 0, 1), Slot::labelled(3, 0, 0), Slot::labelled(2, 1, 1)],
        2,
    )?;
    let scaling = vec![0, 1, 0, 0];
    let smaller = larger.scaled_sublattice(&scaling)?;
    let coeff = CoefficientField::unramified(p, 2)?;
    Ok(UnramifiedIsogeny {
        larger: standard_lift(larger, coeff.clone())?.with_variance(Variance::Contravariant),
        smaller: standard_lift(smaller, coeff)?.with_variance(Variance::Contravariant),
        scaling,
    })
}

/// Height 3 over `Q_p`: `b_1` fixed with exponent 0, `b_2 ↦ p b_3 ↦ p b_2`, and
/// `L = ⟨b_2 + p b_3⟩`. Newton `(1, 1/2, 1/2)` and Hodge `(1, 1, 0)` touch at `(1, 1)`.
pub fn worked_split(p: u64) -> Result<DieudonneLift> {
    let lattice = StandardIsocrystal::from_perm(p, &[0, 2, 1], &[0, 1, 0])?;
    let k = EisensteinExt::rationals(p)?;
    let gen = vec![k.zero(), k.one(), k.from_rational(&int(p as i64))];
    DieudonneLift::new(lattice, CoefficientField::unramified(p, 1)?, RamifiedAction::Symbolic, k, Vec::new(), vec![gen])
}

/// `φ = p` on every basis vector and `L` the whole lattice: `dim H = 0`.
pub fn etale(p: u64, height: usize) -> Result<DieudonneLift> {
    let perm: Vec<usize> = (0..height).collect();
    let lattice = StandardIsocrystal::from_perm(p, &perm, &vec![1; height])?;
    standard_lift(lattice, CoefficientField::unramified(p, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nv(s: &str) -> NewtonVector {
        s.parse().unwrap()
    }

    #[test]
    fn ramified_pair_golden() {
        for p in [2, 3, 5] {
            let pair = ramified_lift_pair(p).unwrap();
            assert!(pair.same_eigenvalue.same_reduction(&pair.mixed_eigenvalues).unwrap());
            let h0 = pair.same_eigenvalue.polygons().unwrap();
            let h1 = pair.mixed_eigenvalues.polygons().unwrap();
            assert_eq!(h0.hdg, nv("(1/2,1/2)").to_polygon());
            assert_eq!(h1.hdg, nv("(1,0)").to_polygon());
            assert_eq!(h1.hdg.to_string(), "(0,0);(1,1);(2,1)");
            for t in [&h0, &h1] {
                assert_eq!(t.newt, nv("(1/2,1/2)").to_polygon());
                assert_eq!(t.hn, nv("(1/2,1/2)").to_polygon());
                assert_eq!(*t.newt.end_value(), int(1));
            }
            assert!(pair.same_eigenvalue.verify_wa().unwrap().holds());
            assert!(pair.mixed_eigenvalues.verify_wa().unwrap().holds());
        }
    }

    #[test]
    fn reduction_gate() {
        let pair = ramified_lift_pair(3).unwrap();
        let k = pair.same_eigenvalue.base().clone();
        let w = k.uniformizer();
        // (1, w, 0, 0) and (0, 0, 1, w) reduce to b_1 and b_3, which have exponent 0.
        let bad = vec![vec![k.one(), w.clone(), k.zero(), k.zero()], vec![k.zero(), k.zero(), k.one(), w]];
        let err = DieudonneLift::new(
            pair.same_eigenvalue.lattice().clone(),
            pair.same_eigenvalue.coeff().clone(),
            pair.same_eigenvalue.ramified().clone(),
            k.clone(),
            pair.same_eigenvalue.roots().to_vec(),
            bad,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Model(_)));
        let not_summand = vec![vec![k.zero(), k.from_rational(&int(3)), k.zero(), k.zero()]];
        assert!(matches!(
            DieudonneLift::new(
                pair.same_eigenvalue.lattice().clone(),
                pair.same_eigenvalue.coeff().clone(),
                RamifiedAction::Symbolic,
                k,
                Vec::new(),
                not_summand
            ),
            Err(Error::Model(_))
        ));
        let wide = StandardIsocrystal::from_perm(3, &[0], &[2]).unwrap();
        assert!(standard_lift(wide, CoefficientField::unramified(3, 1).unwrap()).is_err());
    }

    #[test]
    fn unramified_recipe() {
        let iso = unramified_isogeny(3).unwrap();
        assert_eq!(hodge_unramified(iso.larger.lattice(), 2).unwrap(), nv("(1,0)"));
        assert_eq!(hodge_unramified(iso.smaller.lattice(), 2).unwrap(), nv("(1/2,1/2)"));
        assert_eq!(iso.cokernel_components().unwrap(), vec![0, 1]);
        assert_eq!(iso.larger.polygons().unwrap().hdg, nv("(1,0)").to_polygon());
        assert_eq!(iso.smaller.polygons().unwrap().hdg, nv("(1/2,1/2)").to_polygon());
        assert!(hodge_unramified(iso.larger.lattice(), 1).is_err());
        let all_one = StandardIsocrystal::from_perm(3, &[1, 0], &[1, 1]).unwrap();
        assert_eq!(hodge_unramified(&all_one, 1).unwrap(), nv("(0,0)"));
        let all_zero = StandardIsocrystal::from_perm(3, &[1, 0], &[0, 0]).unwrap();
        assert_eq!(hodge_unramified(&all_zero, 1).unwrap(), nv("(1,1)"));
    }

    #[test]
    fn worked_split_polygons() {
        let t = worked_split(3).unwrap().polygons().unwrap();
        assert_eq!(t.newt, nv("(1,1/2,1/2)").to_polygon());
        assert_eq!(t.hdg, nv("(1,1,0)").to_polygon());
        assert_eq!(t.hn.to_string(), "(0,0);(1,1);(3,2)");
    }

    #[test]
    fn etale_and_dual() {
        let e = etale(5, 3).unwrap();
        let t = e.polygons().unwrap();
        assert_eq!(t.newt, nv("(0,0,0)").to_polygon());
        assert_eq!(t.hdg, t.newt);
        assert!(e.verify_wa().unwrap().holds());
        let m = e.dual_model().unwrap();
        assert_eq!(m.dimension(), 3);
        assert_eq!(m.variance(), Variance::Contravariant);
        assert_eq!(m.polygons().unwrap().newt, nv("(1,1,1)").to_polygon());
    }

    #[test]
    fn duality_reports() {
        for lift in [
            ramified_lift_pair(3).unwrap().mixed_eigenvalues,
            ramified_lift_pair(3).unwrap().same_eigenvalue,
            worked_split(3).unwrap(),
            etale(3, 2).unwrap(),
        ] {
            let report = lift.duality_check(false).unwrap();
            assert!(report.holds(), "{report:?}");
        }
        let ex = ramified_lift_pair(3).unwrap().mixed_eigenvalues.duality_check(true).unwrap();
        assert_eq!(ex.symmetric, Some(true));
        let split = worked_split(3).unwrap().duality_check(true).unwrap();
        assert_eq!(split.symmetric, Some(false));
        assert!(!split.holds());
        assert_eq!(split.polygons.hdg.dual(), nv("(1,0,0)").to_polygon());
    }

    #[test]
    fn fp_echelon() {
        assert_eq!(echelon_mod_p(vec![vec![2, 4], vec![1, 2]], 3), vec![vec![1, 2]]);
        assert_eq!(echelon_mod_p(vec![vec![0, 3]], 3), Vec::<Vec<u64>>::new());
    }
}
