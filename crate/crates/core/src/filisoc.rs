//! Filtered isocrystals with coefficients in a finite extension `F` of `Q_p`.
//!
//! The `F`-action is split into its inertia part, recorded by slot labels
//! modulo `f_F`, and its totally ramified part, the action of a uniformizer
//! `Π` of `F`. Embeddings `τ: F → K` are indexed by `τ = v + f_F · l`, where
//! `v` is the inertia embedding and `l` picks the root `r_l` of the Eisenstein
//! polynomial of `F` that `τ(Π)` maps to.
//!
//! Filtrations come at two fidelity tiers. Profile data lists the graded
//! dimensions of every `N_τ`, plus optionally those of each subobject.
//! Subspace data gives explicit `Fil^i` over an Eisenstein extension `K`, from
//! which all induced filtrations are computed exactly.
//!
//! Subobjects are the slot sets closed under `φ` and `Π`. When the isocrystal
//! has two isomorphic simple summands there are more subobjects than these,
//! and verdicts are labelled as certified over this standard family only.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{check_eisenstein, EisensteinExt, Field, NfElem, RationalField};
use crate::filvect::GradedProfile;
use crate::isoc::StandardIsocrystal;
use crate::linalg::{self, Matrix};
use crate::poly::QPoly;
use crate::polycalc::{self, ConcavePolygon, NewtonVector, Point};
use crate::rational::{from_usize, int, Rational};

/// Slot sets are bitmasks.
pub const MAX_HEIGHT: usize = 64;
const MAX_SUBOBJECTS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientField {
    p: u64,
    inertia: usize,
    /// Eisenstein polynomial of `F` over its maximal unramified subfield.
    eisenstein: QPoly,
    involution: Option<Vec<usize>>,
}

impl CoefficientField {
    pub fn new(p: u64, inertia: usize, eisenstein: QPoly) -> Result<Self> {
        if inertia == 0 {
            return Err(Error::Domain("inertia degree must be positive".into()));
        }
        check_eisenstein(&eisenstein, p)?;
        Ok(Self { p, inertia, eisenstein, involution: None })
    }

    /// `F = Q_{p^f}`, with uniformizer `p` (polynomial `y − p`).
    pub fn unramified(p: u64, inertia: usize) -> Result<Self> {
        Self::new(p, inertia, QPoly::from_ints(&[-(p as i64), 1]))
    }

    /// Attaches the permutation `τ ↦ τ*` of embeddings used for polarisations.
    pub fn with_involution(mut self, involution: Vec<usize>) -> Result<Self> {
        let d = self.degree();
        if involution.len() != d
            || involution.iter().any(|&t| t >= d)
            || involution.iter().enumerate().any(|(t, &s)| involution[s] != t)
        {
            return Err(Error::Invariant(format!("{involution:?} is not an involution of 0..{d}")));
        }
        self.involution = Some(involution);
        Ok(self)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `f(F|Q_p)`.
    pub fn inertia(&self) -> usize {
        self.inertia
    }

    /// `e(F|Q_p)`.
    pub fn ramification(&self) -> usize {
        self.eisenstein.degree().unwrap_or(1)
    }

    /// `d = [F : Q_p]`.
    pub fn degree(&self) -> usize {
        self.inertia * self.ramification()
    }

    pub fn eisenstein(&self) -> &QPoly {
        &self.eisenstein
    }

    pub fn involution(&self) -> Option<&[usize]> {
        self.involution.as_deref()
    }

    pub fn embedding(&self, inertia_index: usize, root_index: usize) -> usize {
        inertia_index + self.inertia * root_index
    }

    pub fn inertia_of(&self, tau: usize) -> usize {
        tau % self.inertia
    }

    pub fn root_of(&self, tau: usize) -> usize {
        tau / self.inertia
    }
}

/// How the uniformizer of `F` acts beyond the inertia labels.
#[derive(Clone, Debug, PartialEq)]
pub enum RamifiedAction {
    /// No constraint is tracked: every `φ`-stable slot set counts as `F`-stable.
    Symbolic,
    /// Slot groups mixed by `Π`; stable sets are unions of whole groups.
    Blocks(Vec<Vec<usize>>),
    /// An explicit rational matrix of `Π`, commuting with `φ` and killed by the Eisenstein polynomial.
    Operator(Matrix<Rational>),
}

/// Graded dimensions per embedding, with optional subobject profiles keyed by slot mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileData {
    pub per_tau: Vec<GradedProfile>,
    pub table: Option<BTreeMap<u64, Vec<GradedProfile>>>,
}

/// Explicit filtration steps `(i, spanning vectors of Fil^i)` in increasing `i`.
///
/// `Fil^i` equals the next listed step above `i`, is zero past the last step,
/// and the first step must be the whole space.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceData {
    pub base: EisensteinExt,
    /// Images `τ(Π)` for `l = 0..e_F`; empty when `F` is unramified.
    pub roots: Vec<NfElem>,
    pub steps: Vec<(i64, Vec<Vec<NfElem>>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Filtration {
    Profiles(ProfileData),
    Subspaces(SubspaceData),
}

impl Filtration {
    pub fn tier_name(&self) -> &'static str {
        match self {
            Filtration::Profiles(_) => "profiles",
            Filtration::Subspaces(_) => "subspaces",
        }
    }
}

#[derive(Debug)]
struct SubspaceCache {
    /// `[τ][step]`: echelon basis of `Fil^i ∩ N_τ`.
    tau_steps: Vec<Vec<Vec<Vec<NfElem>>>>,
}

#[derive(Clone, Debug)]
pub struct FilteredIsocrystalCx {
    isocrystal: StandardIsocrystal,
    coeff: CoefficientField,
    ramified: RamifiedAction,
    filtration: Filtration,
    cache: Option<Arc<SubspaceCache>>,
}

impl PartialEq for FilteredIsocrystalCx {
    fn eq(&self, other: &Self) -> bool {
        self.isocrystal == other.isocrystal
            && self.coeff == other.coeff
            && self.ramified == other.ramified
            && self.filtration == other.filtration
    }
}

/// A `φ`- and `F`-stable slot set with its induced filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subobject {
    pub mask: u64,
    pub profiles: Vec<GradedProfile>,
    pub t_newton: i64,
    pub t_hodge: i64,
}

impl Subobject {
    pub fn slots(&self) -> Vec<usize> {
        slots_of(self.mask)
    }

    pub fn height(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// `(ht/d, −t_N/d)`.
    pub fn hn_point(&self, d: usize) -> Point {
        let d = from_usize(d);
        (from_usize(self.height()) / &d, int(-self.t_newton) / d)
    }

    /// Weakly admissible as a subobject of a weakly admissible object.
    pub fn is_balanced(&self) -> bool {
        self.t_hodge == self.t_newton
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every subobject is a standard slot set.
    Complete,
    /// Isomorphic simple summands exist; only standard slot sets were checked.
    StandardFamily,
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coverage::Complete => "complete",
            Coverage::StandardFamily => "certified over the standard family",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaReport {
    pub admissible: bool,
    pub coverage: Coverage,
    pub t_newton: i64,
    pub t_hodge: i64,
    /// First subobject with `t_H > t_N`.
    pub violation: Option<Subobject>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HnData {
    pub polygon: ConcavePolygon,
    /// Nonzero steps of the filtration, ending with the whole object.
    pub filtration: Vec<Subobject>,
}

impl HnData {
    /// Slopes `−Δt_N / Δht` of the graded pieces.
    pub fn graded_slopes(&self) -> Vec<Rational> {
        let mut prev = (0usize, 0i64);
        self.filtration
            .iter()
            .map(|s| {
                let slope = int(-(s.t_newton - prev.1)) / from_usize(s.height() - prev.0);
                prev = (s.height(), s.t_newton);
                slope
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub hn: ConcavePolygon,
    pub newt: ConcavePolygon,
    pub hdg: ConcavePolygon,
    /// First abscissa where HN exceeds Newt.
    pub hn_above_newt: Option<Rational>,
    /// First abscissa where Newt exceeds Hdg.
    pub newt_above_hdg: Option<Rational>,
    pub ends_agree: bool,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.hn_above_newt.is_none() && self.newt_above_hdg.is_none() && self.ends_agree
    }
}

/// Everything computed from one subobject enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants {
    pub newt: NewtonVector,
    pub hdg: NewtonVector,
    pub wa: WaReport,
    /// Present when the object is weakly admissible.
    pub hn: Option<HnData>,
}

pub fn slots_of(mask: u64) -> Vec<usize> {
    (0..MAX_HEIGHT).filter(|j| mask >> j & 1 == 1).collect()
}

pub fn mask_of(slots: &[usize]) -> u64 {
    slots.iter().fold(0, |m, &j| m | 1 << j)
}

fn full_mask(h: usize) -> u64 {
    if h == MAX_HEIGHT {
        u64::MAX
    } else {
        (1u64 << h) - 1
    }
}

/// Re-indexes the bits of `mask` lying in `within` to consecutive positions.
fn compress(mask: u64, within: &[usize]) -> u64 {
    within.iter().enumerate().fold(0, |m, (i, &j)| if mask >> j & 1 == 1 { m | 1 << i } else { m })
}

fn expand(mask: u64, within: &[usize]) -> u64 {
    within.iter().enumerate().fold(0, |m, (i, &j)| if mask >> i & 1 == 1 { m | 1 << j } else { m })
}

/// Profile with `dim Fil^{i_k} = dims[k]`, constant between listed indices.
fn graded_from_steps(indices: &[i64], dims: &[usize]) -> GradedProfile {
    GradedProfile::new(
        indices.iter().zip(dims).enumerate().map(|(k, (&i, &n))| (i, n - dims.get(k + 1).copied().unwrap_or(0))),
    )
}

fn rational_matrix_in(k: &EisensteinExt, m: &Matrix<Rational>) -> Matrix<NfElem> {
    m.map(|x| k.from_rational(x))
}

fn eval_at_matrix(g: &QPoly, m: &Matrix<Rational>) -> Matrix<Rational> {
    let f = RationalField;
    let n = m.rows();
    let mut acc = Matrix::filled(n, n, Rational::zero());
    for c in g.coeffs().iter().rev() {
        acc = linalg::mat_mul(&f, &acc, m);
        for i in 0..n {
            let v = acc.get(i, i) + c;
            acc.set(i, i, v);
        }
    }
    acc
}

impl FilteredIsocrystalCx {
    pub fn new(
        isocrystal: StandardIsocrystal,
        coeff: CoefficientField,
        ramified: RamifiedAction,
        filtration: Filtration,
    ) -> Result<Self> {
        let mut obj = Self { isocrystal, coeff, ramified, filtration, cache: None };
        obj.validate_shape()?;
        obj.validate_ramified()?;
        match &obj.filtration {
            Filtration::Profiles(data) => obj.validate_profiles(data)?,
            Filtration::Subspaces(data) => obj.cache = Some(Arc::new(obj.build_cache(data)?)),
        }
        Ok(obj)
    }

    pub fn isocrystal(&self) -> &StandardIsocrystal {
        &self.isocrystal
    }

    pub fn coeff(&self) -> &CoefficientField {
        &self.coeff
    }

    pub fn ramified(&self) -> &RamifiedAction {
        &self.ramified
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn height(&self) -> usize {
        self.isocrystal.height()
    }

    pub fn d(&self) -> usize {
        self.coeff.degree()
    }

    /// `n = h/d`, the dimension of each `N_τ`.
    pub fn n(&self) -> usize {
        self.height() / self.d()
    }

    fn validate_shape(&self) -> Result<()> {
        let h = self.height();
        if h == 0 {
            return Err(Error::Invariant("empty object".into()));
        }
        if h > MAX_HEIGHT {
            return Err(Error::Unsupported(format!("height {h} exceeds {MAX_HEIGHT}")));
        }
        if self.isocrystal.p() != self.coeff.p() {
            return Err(Error::Invariant("isocrystal and coefficient field over different primes".into()));
        }
        if !self.isocrystal.check_coefficient_height(self.d()) {
            return Err(Error::Invariant(format!("height {h} is not divisible by [F:Q_p] = {}", self.d())));
        }
        if self.isocrystal.label_modulus() as usize != self.coeff.inertia() {
            return Err(Error::Invariant(format!(
                "slot labels are taken mod {} but f(F|Q_p) = {}",
                self.isocrystal.label_modulus(),
                self.coeff.inertia()
            )));
        }
        Ok(())
    }

    fn validate_ramified(&self) -> Result<()> {
        let h = self.height();
        match &self.ramified {
            RamifiedAction::Symbolic => Ok(()),
            RamifiedAction::Blocks(blocks) => {
                let mut seen = BTreeSet::new();
                for b in blocks {
                    for &j in b {
                        if j >= h || !seen.insert(j) {
                            return Err(Error::Invariant(format!("ramified blocks overlap or exceed slot {h}")));
                        }
                    }
                }
                Ok(())
            }
            RamifiedAction::Operator(pi) => {
                if pi.rows() != h || pi.cols() != h {
                    return Err(Error::Invariant("ramified operator has the wrong size".into()));
                }
                let slots = self.isocrystal.slots();
                for r in 0..h {
                    for c in 0..h {
                        if !pi.get(r, c).is_zero() && slots[r].label != slots[c].label {
                            return Err(Error::Invariant(format!(
                                "ramified operator mixes inertia labels (slots {} and {})",
                                c + 1,
                                r + 1
                            )));
                        }
                    }
                }
                let f = RationalField;
                let phi = self.isocrystal.matrix();
                if linalg::mat_mul(&f, &phi, pi) != linalg::mat_mul(&f, pi, &phi) {
                    return Err(Error::Invariant("ramified operator does not commute with φ".into()));
                }
                if eval_at_matrix(self.coeff.eisenstein(), pi).to_rows().iter().flatten().any(|x| !x.is_zero()) {
                    return Err(Error::Invariant("the Eisenstein polynomial of F does not kill the operator".into()));
                }
                Ok(())
            }
        }
    }

    fn validate_profiles(&self, data: &ProfileData) -> Result<()> {
        let (d, n) = (self.d(), self.n());
        if data.per_tau.len() != d {
            return Err(Error::Invariant(format!("expected {d} embedding profiles, got {}", data.per_tau.len())));
        }
        if let Some(tau) = data.per_tau.iter().position(|p| p.total_dim() != n) {
            return Err(Error::Invariant(format!("profile of embedding {tau} does not have dimension {n}")));
        }
        if let Some(table) = &data.table {
            let full = full_mask(self.height());
            for (&mask, profiles) in table {
                let size = mask.count_ones() as usize;
                if mask & !full != 0 || !size.is_multiple_of(d) {
                    return Err(Error::Invariant(format!("subobject {:?} is not a valid slot set", slots_of(mask))));
                }
                if profiles.len() != d || profiles.iter().any(|p| p.total_dim() != size / d) {
                    return Err(Error::Invariant(format!(
                        "subobject {:?} needs {d} profiles of dimension {}",
                        slots_of(mask),
                        size / d
                    )));
                }
                for (p, q) in profiles.iter().zip(&data.per_tau) {
                    if !p.is_subprofile_of(q) {
                        return Err(Error::Invariant(format!(
                            "profile of subobject {:?} exceeds the object",
                            slots_of(mask)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn build_cache(&self, data: &SubspaceData) -> Result<SubspaceCache> {
        let k = &data.base;
        let (h, d, n) = (self.height(), self.d(), self.n());
        if k.p() != self.coeff.p() {
            return Err(Error::Invariant("base field over a different prime".into()));
        }
        if data.steps.is_empty() {
            return Err(Error::Invariant("a filtration needs at least one step".into()));
        }
        if data.steps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Invariant("filtration indices must increase".into()));
        }
        for (i, span) in &data.steps {
            if span.iter().any(|v| v.len() != h) {
                return Err(Error::Invariant(format!("Fil^{i} has vectors of the wrong length")));
            }
        }
        if linalg::span_dim(k, &data.steps[0].1, h) != h {
            return Err(Error::Invariant(format!("Fil^{} must be the whole space", data.steps[0].0)));
        }
        for w in data.steps.windows(2) {
            if !linalg::is_subspace(k, &w[1].1, &w[0].1, h) {
                return Err(Error::Invariant(format!("Fil^{} is not contained in Fil^{}", w[1].0, w[0].0)));
            }
        }
        let e = self.coeff.ramification();
        let pi = match (&self.ramified, e) {
            (_, 1) => {
                if !data.roots.is_empty() {
                    return Err(Error::Invariant("roots given for an unramified coefficient field".into()));
                }
                None
            }
            (RamifiedAction::Operator(pi), _) => Some(rational_matrix_in(k, pi)),
            _ => {
                return Err(Error::Unsupported(
                    "explicit subspaces over a ramified F need the matrix of its uniformizer".into(),
                ))
            }
        };
        if pi.is_some() {
            if data.roots.len() != e {
                return Err(Error::Invariant(format!("expected {e} roots of the Eisenstein polynomial")));
            }
            for (l, r) in data.roots.iter().enumerate() {
                if !k.eval_poly(self.coeff.eisenstein(), r).is_zero() {
                    return Err(Error::Invariant(format!("root {l} does not satisfy the Eisenstein polynomial")));
                }
                if data.roots[..l].contains(r) {
                    return Err(Error::Invariant("Eisenstein roots must be distinct".into()));
                }
            }
        }
        let labels: Vec<usize> = self.isocrystal.slots().iter().map(|s| s.label as usize).collect();
        let tau_space = |tau: usize| -> Vec<Vec<NfElem>> {
            let v = self.coeff.inertia_of(tau);
            let coords: Vec<usize> = (0..h).filter(|&j| labels[j] == v).collect();
            let unit = |j: usize| {
                let mut u = vec![k.zero(); h];
                u[j] = k.one();
                u
            };
            let Some(pi) = &pi else { return coords.iter().map(|&j| unit(j)).collect() };
            let r = &data.roots[self.coeff.root_of(tau)];
            let rows = coords
                .iter()
                .map(|&a| {
                    coords.iter().map(|&b| if a == b { k.sub(pi.get(a, b), r) } else { pi.get(a, b).clone() }).collect()
                })
                .collect();
            linalg::kernel(k, &Matrix::from_rows(rows, coords.len()))
                .into_iter()
                .map(|small| {
                    let mut v = vec![k.zero(); h];
                    for (x, &j) in small.into_iter().zip(&coords) {
                        v[j] = x;
                    }
                    v
                })
                .collect()
        };
        let mut tau_steps = Vec::with_capacity(d);
        for tau in 0..d {
            let space = tau_space(tau);
            if space.len() != n {
                return Err(Error::Invariant(format!(
                    "embedding {tau} eigenspace has dimension {} instead of {n}",
                    space.len()
                )));
            }
            tau_steps
                .push(data.steps.iter().map(|(_, span)| linalg::intersect(k, span, &space, h)).collect::<Vec<_>>());
        }
        for (s, (i, span)) in data.steps.iter().enumerate() {
            let total: usize = tau_steps.iter().map(|t| t[s].len()).sum();
            if total != linalg::span_dim(k, span, h) {
                return Err(Error::Invariant(format!("Fil^{i} is not stable under F")));
            }
        }
        Ok(SubspaceCache { tau_steps })
    }

    /// `t_N = dim(N, φ)`.
    pub fn t_newton(&self) -> i64 {
        self.isocrystal.dimension()
    }

    /// `t_H = Σ_τ deg Fil^• N_τ`.
    pub fn t_hodge(&self) -> i64 {
        self.profiles().iter().map(GradedProfile::degree).sum()
    }

    /// Graded dimensions of `Fil^• N_τ` for every embedding.
    pub fn profiles(&self) -> Vec<GradedProfile> {
        match &self.filtration {
            Filtration::Profiles(data) => data.per_tau.clone(),
            Filtration::Subspaces(data) => self.subspace_profiles(data, full_mask(self.height())),
        }
    }

    /// Smallest and largest jump over all embeddings.
    pub fn jump_range(&self) -> (i64, i64) {
        let profiles = self.profiles();
        let jumps: Vec<i64> = profiles.iter().flat_map(|p| p.jumps().collect::<Vec<_>>()).collect();
        (*jumps.iter().min().unwrap(), *jumps.iter().max().unwrap())
    }

    /// Whether all jumps lie in `{−1, 0}`, as for filtered isocrystals of p-divisible groups.
    pub fn has_pdiv_jumps(&self) -> bool {
        let (lo, hi) = self.jump_range();
        lo >= -1 && hi <= 0
    }

    /// `x ↦ (1/d) Newt(N, φ)(d x)`, as a vector of length `n`.
    pub fn newton(&self) -> Result<NewtonVector> {
        let d = self.d();
        let mut entries = Vec::with_capacity(self.n());
        for (slope, h) in self.isocrystal.slope_decomposition() {
            if h % d != 0 {
                return Err(Error::Invariant(format!(
                    "slope {slope} occurs with multiplicity {h}, not divisible by {d}"
                )));
            }
            entries.extend(std::iter::repeat_n(-slope, h / d));
        }
        Ok(NewtonVector::from_unsorted(entries))
    }

    /// `(1/d) Σ_τ type(Fil^• N_τ)`.
    pub fn hodge(&self) -> Result<NewtonVector> {
        let types: Vec<NewtonVector> = self.profiles().iter().map(GradedProfile::type_of).collect();
        polycalc::average(&types)
    }

    fn subspace_profiles(&self, data: &SubspaceData, mask: u64) -> Vec<GradedProfile> {
        let cache = self.cache.as_ref().expect("subspace data always carries its cache");
        let k = &data.base;
        let h = self.height();
        let outside: Vec<usize> = (0..h).filter(|&j| mask >> j & 1 == 0).collect();
        let indices: Vec<i64> = data.steps.iter().map(|(i, _)| *i).collect();
        cache
            .tau_steps
            .iter()
            .map(|steps| {
                let dims: Vec<usize> = steps
                    .iter()
                    .map(|basis| {
                        if basis.is_empty() || outside.is_empty() {
                            return basis.len();
                        }
                        let rows = outside.iter().map(|&j| basis.iter().map(|v| v[j].clone()).collect()).collect();
                        basis.len() - linalg::rank(k, &Matrix::from_rows(rows, basis.len()))
                    })
                    .collect();
                graded_from_steps(&indices, &dims)
            })
            .collect()
    }

    /// Induced filtration profiles of the slot set `mask` (assumed stable).
    pub fn subobject_profiles(&self, mask: u64) -> Result<Vec<GradedProfile>> {
        let full = full_mask(self.height());
        if mask == 0 {
            return Ok(vec![GradedProfile::zero(); self.d()]);
        }
        match &self.filtration {
            Filtration::Subspaces(data) => Ok(self.subspace_profiles(data, mask)),
            Filtration::Profiles(data) if mask == full => Ok(data.per_tau.clone()),
            Filtration::Profiles(data) => data
                .table
                .as_ref()
                .ok_or_else(|| Error::Unsupported("profile data without a subobject table".into()))?
                .get(&mask)
                .cloned()
                .ok_or_else(|| Error::Unsupported(format!("no profiles supplied for subobject {:?}", one_based(mask)))),
        }
    }

    /// Smallest stable slot set containing slot `j`.
    pub fn closure_of(&self, j: usize) -> u64 {
        let h = self.height();
        let slots = self.isocrystal.slots();
        let mut mask = 0u64;
        let mut stack = vec![j];
        while let Some(a) = stack.pop() {
            if mask >> a & 1 == 1 {
                continue;
            }
            mask |= 1 << a;
            stack.push(slots[a].target);
            match &self.ramified {
                RamifiedAction::Symbolic => {}
                RamifiedAction::Blocks(blocks) => {
                    if let Some(b) = blocks.iter().find(|b| b.contains(&a)) {
                        stack.extend(b.iter().copied());
                    }
                }
                RamifiedAction::Operator(pi) => stack.extend((0..h).filter(|&r| !pi.get(r, a).is_zero())),
            }
        }
        mask
    }

    pub fn is_stable(&self, mask: u64) -> bool {
        slots_of(mask).into_iter().all(|j| self.closure_of(j) & !mask == 0)
    }

    /// All stable slot sets, ordered by size and then by mask.
    pub fn stable_masks(&self) -> Result<Vec<u64>> {
        let atoms: BTreeSet<u64> = (0..self.height()).map(|j| self.closure_of(j)).collect();
        let mut all: HashSet<u64> = HashSet::from([0]);
        for a in atoms {
            let grown: Vec<u64> = all.iter().map(|s| s | a).collect();
            all.extend(grown);
            if all.len() > MAX_SUBOBJECTS {
                return Err(Error::Unsupported(format!("more than {MAX_SUBOBJECTS} standard subobjects")));
            }
        }
        let mut masks: Vec<u64> = all.into_iter().collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        Ok(masks)
    }

    /// Standard subobjects with their induced filtrations, including `0` and the whole object.
    pub fn subobjects(&self) -> Result<Vec<Subobject>> {
        let slots = self.isocrystal.slots();
        self.stable_masks()?
            .into_par_iter()
            .map(|mask| {
                let profiles = self.subobject_profiles(mask)?;
                Ok(Subobject {
                    mask,
                    t_newton: slots_of(mask).iter().map(|&j| slots[j].exponent).sum(),
                    t_hodge: profiles.iter().map(GradedProfile::degree).sum(),
                    profiles,
                })
            })
            .collect()
    }

    pub fn coverage(&self) -> Coverage {
        let mut slopes = BTreeSet::new();
        for c in self.isocrystal.cycles() {
            let sum: i64 = c.iter().map(|&j| self.isocrystal.slots()[j].exponent).sum();
            if (c.len() as i64).gcd(&sum) != 1 || !slopes.insert(self.isocrystal.cycle_slope(&c)) {
                return Coverage::StandardFamily;
            }
        }
        Coverage::Complete
    }

    fn wa_from(&self, subs: &[Subobject]) -> WaReport {
        let (t_newton, t_hodge) = (self.t_newton(), self.t_hodge());
        let violation = subs.iter().find(|s| s.t_hodge > s.t_newton).cloned();
        WaReport {
            admissible: t_newton == t_hodge && violation.is_none(),
            coverage: self.coverage(),
            t_newton,
            t_hodge,
            violation,
        }
    }

    pub fn weak_admissibility(&self) -> Result<WaReport> {
        Ok(self.wa_from(&self.subobjects()?))
    }

    pub fn is_weakly_admissible(&self) -> Result<bool> {
        Ok(self.weak_admissibility()?.admissible)
    }

    fn hn_from(&self, subs: &[Subobject]) -> Result<HnData> {
        let d = self.d();
        let balanced: Vec<&Subobject> = subs.iter().filter(|s| s.is_balanced()).collect();
        let points: Vec<Point> = balanced.iter().map(|s| s.hn_point(d)).collect();
        let polygon = ConcavePolygon::concave_envelope(&points)?;
        let mut filtration: Vec<Subobject> = Vec::new();
        for vertex in &polygon.breakpoints_with_ends()[1..] {
            let below = filtration.last().map_or(0, |s| s.mask);
            let step =
                balanced.iter().find(|s| s.mask & below == below && s.hn_point(d) == *vertex).ok_or_else(|| {
                    Error::Internal(format!("no nested subobject realizes the vertex {}", polycalc::fmt_point(vertex)))
                })?;
            filtration.push((*step).clone());
        }
        Ok(HnData { polygon, filtration })
    }

    /// HN polygon and filtration over the weakly admissible standard subobjects.
    pub fn hn(&self) -> Result<HnData> {
        let subs = self.subobjects()?;
        let wa = self.wa_from(&subs);
        if !wa.admissible {
            return Err(Error::Precondition("the HN polygon needs a weakly admissible object".into()));
        }
        self.hn_from(&subs)
    }

    pub fn hn_polygon(&self) -> Result<ConcavePolygon> {
        Ok(self.hn()?.polygon)
    }

    pub fn hn_filtration(&self) -> Result<Vec<Subobject>> {
        Ok(self.hn()?.filtration)
    }

    /// Newt, Hdg, the w.a. verdict and, when admissible, HN from a single enumeration.
    pub fn invariants(&self) -> Result<Invariants> {
        let subs = self.subobjects()?;
        let wa = self.wa_from(&subs);
        let hn = if wa.admissible { Some(self.hn_from(&subs)?) } else { None };
        Ok(Invariants { newt: self.newton()?, hdg: self.hodge()?, wa, hn })
    }

    /// `HN ≤ Newt ≤ Hdg` with a shared end point.
    pub fn inequality_chain(&self) -> Result<ChainReport> {
        let inv = self.invariants()?;
        let hn = inv
            .hn
            .ok_or_else(|| Error::Precondition("the inequality chain needs a weakly admissible object".into()))?
            .polygon;
        chain_report(hn, inv.newt.to_polygon(), inv.hdg.to_polygon())
    }

    /// The subobject on a stable slot set, with the induced filtration.
    pub fn restrict(&self, mask: u64) -> Result<Self> {
        self.check_stable(mask)?;
        let slots = slots_of(mask);
        let filtration = match &self.filtration {
            Filtration::Profiles(data) => Filtration::Profiles(ProfileData {
                per_tau: self.subobject_profiles(mask)?,
                table: self.sub_table(data, &slots, |m| Some(expand(m, &slots)), 0)?,
            }),
            Filtration::Subspaces(data) => {
                let k = &data.base;
                let h = self.height();
                let coordinate_span: Vec<Vec<NfElem>> = slots
                    .iter()
                    .map(|&j| {
                        let mut u = vec![k.zero(); h];
                        u[j] = k.one();
                        u
                    })
                    .collect();
                let steps = data
                    .steps
                    .iter()
                    .map(|(i, span)| {
                        let inter = linalg::intersect(k, span, &coordinate_span, h);
                        (*i, inter.into_iter().map(|v| slots.iter().map(|&j| v[j].clone()).collect()).collect())
                    })
                    .collect();
                Filtration::Subspaces(SubspaceData { base: k.clone(), roots: data.roots.clone(), steps })
            }
        };
        self.part_on(&slots, filtration)
    }

    /// The quotient by a stable slot set, realized on the complementary slots.
    pub fn quotient(&self, mask: u64) -> Result<Self> {
        self.check_stable(mask)?;
        let rest = slots_of(full_mask(self.height()) & !mask);
        let filtration = match &self.filtration {
            Filtration::Profiles(data) => {
                let sub = self.subobject_profiles(mask)?;
                let per_tau =
                    data.per_tau.iter().zip(&sub).map(|(a, b)| a.quotient_profile(b)).collect::<Result<Vec<_>>>()?;
                let table = match &data.table {
                    None => None,
                    Some(_) => Some(
                        self.sub_table(data, &rest, |m| Some(expand(m, &rest) | mask), mask)?
                            .unwrap_or_default()
                            .into_iter()
                            .map(|(m, profs)| {
                                let q = profs
                                    .iter()
                                    .zip(&sub)
                                    .map(|(a, b)| a.quotient_profile(b))
                                    .collect::<Result<Vec<_>>>()?;
                                Ok((m, q))
                            })
                            .collect::<Result<BTreeMap<_, _>>>()?,
                    ),
                };
                Filtration::Profiles(ProfileData { per_tau, table })
            }
            Filtration::Subspaces(data) => {
                let steps = data
                    .steps
                    .iter()
                    .map(|(i, span)| {
                        let projected: Vec<Vec<NfElem>> =
                            span.iter().map(|v| rest.iter().map(|&j| v[j].clone()).collect()).collect();
                        (*i, linalg::span_basis(&data.base, &projected, rest.len()))
                    })
                    .collect();
                Filtration::Subspaces(SubspaceData { base: data.base.clone(), roots: data.roots.clone(), steps })
            }
        };
        self.part_on(&rest, filtration)
    }

    fn check_stable(&self, mask: u64) -> Result<()> {
        let full = full_mask(self.height());
        if mask == 0 || mask == full || mask & !full != 0 || !self.is_stable(mask) {
            return Err(Error::Precondition(format!("{:?} is not a proper nonzero stable slot set", one_based(mask))));
        }
        Ok(())
    }

    /// Table entries for the stable subsets of `part`, looked up at `lift(m)` in the ambient table.
    fn sub_table(
        &self,
        data: &ProfileData,
        part: &[usize],
        lift: impl Fn(u64) -> Option<u64>,
        ambient_floor: u64,
    ) -> Result<Option<BTreeMap<u64, Vec<GradedProfile>>>> {
        if data.table.is_none() {
            return Ok(None);
        }
        let full_part = full_mask(part.len());
        let mut out = BTreeMap::new();
        for m in self.stable_masks()? {
            if m & ambient_floor != ambient_floor {
                continue;
            }
            let local = compress(m & !ambient_floor, part);
            if expand(local, part) | ambient_floor != m || local == 0 || local == full_part {
                continue;
            }
            if let Some(target) = lift(local) {
                out.insert(local, self.subobject_profiles(target)?);
            }
        }
        Ok(Some(out))
    }

    fn part_on(&self, part: &[usize], filtration: Filtration) -> Result<Self> {
        let isocrystal = self.isocrystal.restrict_to(part)?;
        let ramified = match &self.ramified {
            RamifiedAction::Symbolic => RamifiedAction::Symbolic,
            RamifiedAction::Blocks(blocks) => RamifiedAction::Blocks(
                blocks
                    .iter()
                    .map(|b| part.iter().enumerate().filter(|(_, j)| b.contains(j)).map(|(i, _)| i).collect::<Vec<_>>())
                    .filter(|b| !b.is_empty())
                    .collect(),
            ),
            RamifiedAction::Operator(pi) => RamifiedAction::Operator(Matrix::from_rows(
                part.iter().map(|&r| part.iter().map(|&c| pi.get(r, c).clone()).collect()).collect(),
                part.len(),
            )),
        };
        Self::new(isocrystal, self.coeff.clone(), ramified, filtration)
    }

    /// The same object described by profile data, with the full subobject table.
    pub fn to_profile_tier(&self) -> Result<Self> {
        let full = full_mask(self.height());
        let table = self
            .subobjects()?
            .into_iter()
            .filter(|s| s.mask != 0 && s.mask != full)
            .map(|s| (s.mask, s.profiles))
            .collect();
        let filtration = Filtration::Profiles(ProfileData { per_tau: self.profiles(), table: Some(table) });
        Self::new(self.isocrystal.clone(), self.coeff.clone(), self.ramified.clone(), filtration)
    }
}

/// Builds the chain report for given polygons.
pub fn chain_report(hn: ConcavePolygon, newt: ConcavePolygon, hdg: ConcavePolygon) -> Result<ChainReport> {
    let ends_agree = hn.end_point() == newt.end_point() && newt.end_point() == hdg.end_point();
    Ok(ChainReport {
        hn_above_newt: hn.first_excess(&newt)?,
        newt_above_hdg: newt.first_excess(&hdg)?,
        ends_agree,
        hn,
        newt,
        hdg,
    })
}

/// One-based slot numbers, as shown to users.
pub fn one_based(mask: u64) -> Vec<usize> {
    slots_of(mask).into_iter().map(|j| j + 1).collect()
}
