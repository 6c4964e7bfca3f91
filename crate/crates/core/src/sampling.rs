//! Seeded random instances for property checks, fuzzing and benchmarks.
//!
//! [`instance_rng`] gives every instance index its own ChaCha stream, so a
//! campaign run in parallel reproduces the serial one exactly.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dieudonne::DieudonneLift;
use crate::dvrmod::{InnerQuotient, RamifiedTower};
use crate::error::{Error, Result};
use crate::field::{EisensteinExt, Field, NfElem};
use crate::filisoc::{CoefficientField, FilteredIsocrystalCx, Filtration, RamifiedAction, SubspaceData};
use crate::hnfilt::{dual_point, touching_points, TorsionProfile, ViolationKind};
use crate::isoc::{Slot, StandardIsocrystal};
use crate::linalg::{self, Matrix};
use crate::poly::QPoly;
use crate::polycalc::{ConcavePolygon, NewtonVector, Point};
use crate::rational::{from_usize, int, rat, Rational};

/// Independent stream `index` of the generator seeded by `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_unit(rng: &mut impl Rng, p: u64) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-4..=4);
        if n != 0 && !n.unsigned_abs().is_multiple_of(p) {
            return int(n);
        }
    }
}

/// A random composition of `total` into positive parts.
fn composition(rng: &mut impl Rng, total: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = total;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        parts.push(k);
        left -= k;
    }
    parts
}

/// Cycles of lengths divisible by `f` with `blocks · f` slots in total.
fn random_cycles(rng: &mut impl Rng, f: usize, blocks: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    composition(rng, blocks).into_iter().map(|k| (0..k * f).map(|_| rng.gen_range(lo..=hi)).collect()).collect()
}

/// Places the cycles on shuffled slot positions; position `t` of a cycle gets label `t mod f`.
fn layout(rng: &mut impl Rng, p: u64, cycles: &[Vec<i64>], f: usize) -> Result<StandardIsocrystal> {
    let h: usize = cycles.iter().map(Vec::len).sum();
    let mut pos: Vec<usize> = (0..h).collect();
    pos.shuffle(rng);
    let mut slots: Vec<Option<Slot>> = vec![None; h];
    let mut next = 0;
    for c in cycles {
        let idx = &pos[next..next + c.len()];
        for (t, &a) in c.iter().enumerate() {
            slots[idx[t]] = Some(Slot {
                target: idx[(t + 1) % c.len()],
                exponent: a,
                unit: random_unit(rng, p),
                label: (t % f) as u32,
            });
        }
        next += c.len();
    }
    StandardIsocrystal::new(p, slots.into_iter().map(|s| s.expect("every position is filled")).collect(), f as u32)
}

fn small_prime(rng: &mut impl Rng) -> u64 {
    *[3u64, 5, 7].choose(rng).unwrap()
}

/// Shape of a random model over an unramified `F = Q_{p^f}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftShape {
    pub p: u64,
    pub inertia: usize,
    /// Height of the random part in units of `inertia`.
    pub blocks: usize,
    /// Extra cycles of `F`-height one with every exponent 0 (slope 1 after the shift).
    pub multiplicative: usize,
    /// Extra cycles of `F`-height one with every exponent 1 (slope 0).
    pub etale: usize,
    /// Work over `K = Q_p(√p)` instead of `Q_p`.
    pub ramified_base: bool,
}

impl LiftShape {
    /// `n = h / f`.
    pub fn n(&self) -> usize {
        self.blocks + self.multiplicative + self.etale
    }

    /// A random shape with `n ≤ max_n` and height at most 12.
    pub fn random(rng: &mut impl Rng, max_n: usize) -> Self {
        let inertia = rng.gen_range(1..=4usize);
        let n = rng.gen_range(1..=max_n.min(12 / inertia).max(1));
        Self { p: small_prime(rng), inertia, blocks: n, multiplicative: 0, etale: 0, ramified_base: rng.gen_bool(0.3) }
    }
}

/// A model whose `L` is spanned by `b_j + ϖ Σ c_{jk} b_k` over the slots `j` with
/// exponent 1, the sum running over exponent-0 slots with the same label.
pub fn random_lift(rng: &mut impl Rng, shape: &LiftShape) -> Result<DieudonneLift> {
    let f = shape.inertia;
    let mut cycles = random_cycles(rng, f, shape.blocks, 0, 1);
    cycles.extend(std::iter::repeat_n(vec![0; f], shape.multiplicative));
    cycles.extend(std::iter::repeat_n(vec![1; f], shape.etale));
    let lattice = layout(rng, shape.p, &cycles, f)?;
    let base = if shape.ramified_base { EisensteinExt::sqrt_p(shape.p)? } else { EisensteinExt::rationals(shape.p)? };
    let fil = perturbed_hodge_lattice(rng, &lattice, &base);
    DieudonneLift::new(
        lattice,
        CoefficientField::unramified(shape.p, f)?,
        RamifiedAction::Symbolic,
        base,
        Vec::new(),
        fil,
    )
}

fn perturbed_hodge_lattice(rng: &mut impl Rng, lattice: &StandardIsocrystal, k: &EisensteinExt) -> Vec<Vec<NfElem>> {
    let slots = lattice.slots();
    let pi = k.uniformizer();
    let mut gens = Vec::new();
    for (j, sj) in slots.iter().enumerate().filter(|(_, s)| s.exponent == 1) {
        let mut v = vec![k.zero(); slots.len()];
        v[j] = k.one();
        for (i, si) in slots.iter().enumerate() {
            if si.exponent == 0 && si.label == sj.label {
                v[i] = k.mul(&k.from_rational(&int(rng.gen_range(-2..=2))), &pi);
            }
        }
        gens.push(v);
    }
    gens
}

/// Shape of a random filtered isocrystal with a generic filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectShape {
    pub p: u64,
    pub inertia: usize,
    /// 1, or 2 for `F = Q_{p^f}(√(cp))` acting through an explicit operator.
    pub ramification: usize,
    /// `dim N_τ`.
    pub n: usize,
    /// Range of the exponents of `φ`.
    pub exponents: (i64, i64),
}

impl ObjectShape {
    /// A random shape with `d ≤ 4`, `n ≤ max_n` and height at most 8.
    pub fn random(rng: &mut impl Rng, max_n: usize) -> Self {
        let ramification = if rng.gen_bool(0.4) { 2 } else { 1 };
        let inertia = rng.gen_range(1..=4 / ramification);
        let d = ramification * inertia;
        let n = rng.gen_range(1..=max_n.min(8 / d).max(1));
        let lo = rng.gen_range(-1..=0);
        Self { p: small_prime(rng), inertia, ramification, n, exponents: (lo, lo + rng.gen_range(1..=2)) }
    }

    pub fn d(&self) -> usize {
        self.inertia * self.ramification
    }
}

/// A filtered isocrystal with `t_H = t_N` and a random flag in every `N_τ`;
/// it need not be weakly admissible.
pub fn random_object(rng: &mut impl Rng, shape: &ObjectShape) -> Result<FilteredIsocrystalCx> {
    let (p, f, n) = (shape.p, shape.inertia, shape.n);
    let (lo, hi) = shape.exponents;
    let cycles = random_cycles(rng, f, n, lo, hi);
    let base_lattice = layout(rng, p, &cycles, f)?;
    let (lattice, coeff, ramified, k, roots) = match shape.ramification {
        1 => {
            let k = if rng.gen_bool(0.5) { EisensteinExt::rationals(p)? } else { EisensteinExt::sqrt_p(p)? };
            (base_lattice, CoefficientField::unramified(p, f)?, RamifiedAction::Symbolic, k, Vec::new())
        }
        2 => {
            let c = loop {
                let c: i64 = *[1, -1, 2].choose(rng).unwrap();
                if !c.unsigned_abs().is_multiple_of(p) {
                    break c;
                }
            };
            let g = QPoly::from_ints(&[-c * p as i64, 0, 1]);
            let (lattice, pi) = tensor_with_quadratic(&base_lattice, c * p as i64)?;
            let k = EisensteinExt::new(p, g.clone())?;
            let w = k.uniformizer();
            let roots = vec![w.clone(), k.neg(&w)];
            (lattice, CoefficientField::new(p, f, g)?, RamifiedAction::Operator(pi), k, roots)
        }
        e => return Err(Error::Unsupported(format!("random objects with ramification {e}"))),
    };
    let h = lattice.height();
    let d = coeff.degree();
    let t_newton = lattice.dimension();
    let mut jumps: Vec<Vec<i64>> = (0..d).map(|_| (0..n).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    let mut total: i64 = jumps.iter().flatten().sum();
    while total != t_newton {
        let (tau, a) = (rng.gen_range(0..d), rng.gen_range(0..n));
        let step = (t_newton - total).signum();
        let moved = jumps[tau][a] + step;
        if (lo - 1..=hi + 1).contains(&moved) {
            jumps[tau][a] = moved;
            total += step;
        }
    }
    let mut flags: Vec<Vec<(i64, Vec<NfElem>)>> = Vec::with_capacity(d);
    for (tau, tau_jumps) in jumps.iter().enumerate() {
        let basis = embedding_basis(&lattice, &coeff, &k, &roots, tau);
        let vectors = random_basis_change(rng, &k, &basis, h);
        flags.push(tau_jumps.iter().copied().zip(vectors).collect());
    }
    let mut indices: Vec<i64> = jumps.iter().flatten().copied().collect();
    indices.sort_unstable();
    indices.dedup();
    let steps = indices
        .iter()
        .map(|&i| {
            let span = flags.iter().flatten().filter(|(j, _)| *j >= i).map(|(_, v)| v.clone()).collect();
            (i, span)
        })
        .collect();
    FilteredIsocrystalCx::new(lattice, coeff, ramified, Filtration::Subspaces(SubspaceData { base: k, roots, steps }))
}

/// `B ⊗ O_F` for `F = Q_{p^f}(√m)`: slots `2j, 2j+1` carry `b_j ⊗ 1, b_j ⊗ y`, and `Π` is `y`.
fn tensor_with_quadratic(base: &StandardIsocrystal, m: i64) -> Result<(StandardIsocrystal, Matrix<Rational>)> {
    let h = 2 * base.height();
    let slots =
        base.slots().iter().flat_map(|s| (0..2).map(move |t| Slot { target: 2 * s.target + t, ..s.clone() })).collect();
    let lattice = StandardIsocrystal::new(base.p(), slots, base.label_modulus())?;
    let mut pi = Matrix::filled(h, h, Rational::zero());
    for j in 0..base.height() {
        pi.set(2 * j + 1, 2 * j, Rational::one());
        pi.set(2 * j, 2 * j + 1, int(m));
    }
    Ok((lattice, pi))
}

/// Basis of `N_τ`: unit vectors of label `τ mod f`, or `r b_j ⊗ 1 + b_j ⊗ y` for the root `r` of `τ`.
fn embedding_basis(
    lattice: &StandardIsocrystal,
    coeff: &CoefficientField,
    k: &EisensteinExt,
    roots: &[NfElem],
    tau: usize,
) -> Vec<Vec<NfElem>> {
    let h = lattice.height();
    let label = coeff.inertia_of(tau) as u32;
    let unit = |j: usize, x: NfElem| {
        let mut v = vec![k.zero(); h];
        v[j] = x;
        v
    };
    if roots.is_empty() {
        return (0..h).filter(|&j| lattice.slots()[j].label == label).map(|j| unit(j, k.one())).collect();
    }
    let r = &roots[coeff.root_of(tau)];
    (0..h / 2)
        .filter(|&j| lattice.slots()[2 * j].label == label)
        .map(|j| {
            let mut v = unit(2 * j, r.clone());
            v[2 * j + 1] = k.one();
            v
        })
        .collect()
}

/// Random invertible recombination of `basis` with small coefficients `a + b ϖ`.
fn random_basis_change(rng: &mut impl Rng, k: &EisensteinExt, basis: &[Vec<NfElem>], h: usize) -> Vec<Vec<NfElem>> {
    let pi = k.uniformizer();
    loop {
        let vectors: Vec<Vec<NfElem>> = (0..basis.len())
            .map(|_| {
                let mut v = vec![k.zero(); h];
                for b in basis {
                    let c = k.add(
                        &k.from_rational(&int(rng.gen_range(-2..=2))),
                        &k.mul(&k.from_rational(&int(rng.gen_range(-1..=1))), &pi),
                    );
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = k.add(x, &k.mul(&c, y));
                    }
                }
                v
            })
            .collect();
        if linalg::span_dim(k, &vectors, h) == basis.len() {
            return vectors;
        }
    }
}

/// Rejection-samples [`random_object`] until it is weakly admissible.
pub fn random_wa_object(rng: &mut impl Rng, shape: &ObjectShape, tries: usize) -> Result<FilteredIsocrystalCx> {
    for _ in 0..tries {
        let obj = random_object(rng, shape)?;
        if obj.is_weakly_admissible()? {
            return Ok(obj);
        }
    }
    Err(Error::Inconclusive(format!("no weakly admissible object of shape {shape:?} in {tries} tries")))
}

/// Where a campaign instance came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// The filtered isocrystal of a random model over an unramified `F`.
    Lift,
    /// A generic filtration over an unramified `F`.
    Unramified,
    /// A generic filtration over a ramified `F`.
    Ramified,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub kind: InstanceKind,
    /// Whether the object was converted to profile data.
    pub profile_tier: bool,
    pub object: FilteredIsocrystalCx,
}

/// A weakly admissible object with `n ≤ max_n` and `d ≤ 4`, half of them as profile data.
pub fn random_wa_instance(rng: &mut impl Rng, max_n: usize) -> Result<Instance> {
    let kind = *[InstanceKind::Lift, InstanceKind::Unramified, InstanceKind::Ramified].choose(rng).unwrap();
    let object = match kind {
        InstanceKind::Lift => {
            let shape = LiftShape::random(rng, max_n);
            random_lift(rng, &shape)?.to_filtered_isocrystal()?
        }
        InstanceKind::Unramified | InstanceKind::Ramified => {
            let mut shape = ObjectShape::random(rng, max_n);
            shape.ramification = if kind == InstanceKind::Ramified { 2 } else { 1 };
            shape.inertia = shape.inertia.min(4 / shape.ramification);
            shape.n = shape.n.min(8 / shape.d()).max(1);
            random_wa_object(rng, &shape, 200)?
        }
    };
    let profile_tier = rng.gen_bool(0.5);
    let object = if profile_tier { object.to_profile_tier()? } else { object };
    Ok(Instance { kind, profile_tier, object })
}

/// A weakly admissible object together with a break point of Newt lying on Hdg.
#[derive(Clone, Debug)]
pub struct ReducibleInstance {
    pub object: FilteredIsocrystalCx,
    pub z: Point,
}

/// Models with forced multiplicative or étale parts, and occasionally generic
/// objects that happen to touch; a random candidate point is chosen.
pub fn random_reducible_instance(rng: &mut impl Rng) -> Result<ReducibleInstance> {
    loop {
        let object = if rng.gen_bool(0.8) {
            let inertia = rng.gen_range(1..=3usize);
            let budget = (12 / inertia).min(6);
            let multiplicative = rng.gen_range(0..=2usize.min(budget - 1));
            let etale = if multiplicative == 0 { 1 } else { rng.gen_range(0..=1usize) };
            let room = budget.saturating_sub(multiplicative + etale);
            if room == 0 {
                continue;
            }
            let shape = LiftShape {
                p: small_prime(rng),
                inertia,
                blocks: rng.gen_range(1..=room),
                multiplicative,
                etale,
                ramified_base: rng.gen_bool(0.3),
            };
            random_lift(rng, &shape)?.to_filtered_isocrystal()?
        } else {
            let shape = ObjectShape::random(rng, 4);
            match random_wa_object(rng, &shape, 50) {
                Ok(obj) => obj,
                Err(Error::Inconclusive(_)) => continue,
                Err(e) => return Err(e),
            }
        };
        let newt = object.newton()?.to_polygon();
        let hdg = object.hodge()?.to_polygon();
        let candidates = touching_points(&newt, &hdg)?;
        let Some(z) = candidates.choose(rng).cloned() else { continue };
        let object = if rng.gen_bool(0.3) { object.to_profile_tier()? } else { object };
        return Ok(ReducibleInstance { object, z });
    }
}

/// `X ⊕ X^∨` for a random model `X` with a multiplicative part, with a touching
/// point `z` such that `z ≠ z^∨`.
#[derive(Clone, Debug)]
pub struct PolarisedInstance {
    pub model: DieudonneLift,
    pub z: Point,
}

pub fn random_polarised_instance(rng: &mut impl Rng) -> Result<PolarisedInstance> {
    loop {
        let inertia = rng.gen_range(1..=2usize);
        let multiplicative = rng.gen_range(1..=2usize);
        let shape = LiftShape {
            p: small_prime(rng),
            inertia,
            blocks: rng.gen_range(1..=(6 / inertia - multiplicative).clamp(1, 2)),
            multiplicative,
            etale: 0,
            ramified_base: rng.gen_bool(0.3),
        };
        let x = random_lift(rng, &shape)?;
        let dual = x.dual_model()?.with_variance(x.variance());
        let model = x.direct_sum(&dual)?;
        // random blocks may lengthen the slope-1 segment, so read z off the polygons
        let polys = model.polygons()?;
        let (n, end) = polys.newt.end_point().clone();
        let candidates: Vec<Point> =
            touching_points(&polys.newt, &polys.hdg)?.into_iter().filter(|z| dual_point(&n, &end, z) != *z).collect();
        if let Some(z) = candidates.choose(rng).cloned() {
            return Ok(PolarisedInstance { model, z });
        }
    }
}

/// A profile built so that the torsion simulation at `z` must return `expected`.
#[derive(Clone, Debug)]
pub struct SyntheticProfile {
    pub profile: TorsionProfile,
    pub z: Point,
    /// `(d x, d y)` for `z = (x, y)`.
    pub expected: (Rational, Rational),
    /// Whether the simulation has to pass to the dual profile first.
    pub expect_dualized: bool,
}

/// Random concave limit with slopes in `[0, 1]` and break points on the lattice
/// `(1/d)Z × (1/de)Z`, given as `(slope, length in units of 1/d)` pairs.
fn random_limit(rng: &mut impl Rng, n: usize, d: usize, e: usize) -> Option<Vec<(Rational, usize)>> {
    let units = composition(rng, n * d);
    if units.len() < 2 {
        return None;
    }
    let segs: Vec<(Rational, usize)> = units
        .iter()
        .map(|&l| {
            let top = (l * e) as i64;
            (rat(rng.gen_range(0..=top), top), l)
        })
        .collect();
    segs.windows(2).all(|w| w[0].0 > w[1].0).then_some(segs)
}

/// Profile of depth `depth` whose levels are `envelope(limit ∪ {z_i})` with
/// `z_i = z + (β m_i / i d)(1, μ)` and `m_i = min(i, C)`; the first level may run
/// straight through `z`. When `μ` equals the slope of the limit just before `z`,
/// half of the profiles are returned dualized, which exercises the dualizing branch.
pub fn random_torsion_profile(rng: &mut impl Rng, depth: u32) -> Result<SyntheticProfile> {
    if depth < 3 {
        return Err(Error::Domain("synthetic profiles need depth at least 3".into()));
    }
    loop {
        let d = rng.gen_range(1..=4usize);
        let e = rng.gen_range(1..=2usize);
        let n = rng.gen_range(2..=6usize);
        let Some(segs) = random_limit(rng, n, d, e) else { continue };
        let slopes: Vec<(Rational, Rational)> =
            segs.iter().map(|(s, l)| (s.clone(), rat(*l as i64, d as i64))).collect();
        let limit = ConcavePolygon::from_slopes(&slopes)?;
        let cut = rng.gen_range(1..segs.len());
        let z = limit.breakpoints_with_ends()[cut].clone();
        let (s_minus, s_plus) = (&segs[cut - 1].0, &segs[cut].0);
        let room = n * d - (0..cut).map(|i| segs[i].1).sum::<usize>();
        let mut candidates = Vec::new();
        for beta in 1..=room.min(6) as i64 {
            for alpha in 0..=beta {
                let mu = rat(alpha, beta);
                if mu > *s_plus && mu <= *s_minus {
                    candidates.push((alpha, beta));
                }
            }
        }
        let Some(&(alpha, beta)) = candidates.choose(rng) else { continue };
        let mu = rat(alpha, beta);
        let dd = from_usize(d);
        let along = |t: Rational| (&z.0 + &t, &z.1 + &t * &mu);
        let cap = rng.gen_range(1..=depth - 2);
        let mut points: Vec<Point> = limit.breakpoints_with_ends().to_vec();
        let mut level1_points = points.clone();
        level1_points.push(along(rat(beta, 1) / &dd));
        let back = &z.0 - rat(beta, 1) / &dd;
        if rng.gen_bool(0.5) && back > Rational::zero() {
            level1_points.push(along(-(rat(beta, 1) / &dd)));
        }
        let mut levels = BTreeMap::new();
        levels.insert(1, ConcavePolygon::concave_envelope(&level1_points)?);
        for i in 2..=depth {
            let m = i.min(cap) as i64;
            let zi = along(rat(beta * m, i as i64) / &dd);
            points.push(zi);
            let renorm = ConcavePolygon::concave_envelope(&points)?;
            points.pop();
            levels.insert(i, renorm.unrescale(i.into())?);
        }
        let profile = TorsionProfile::new(n, d as u64, e as u64, levels, limit.clone())?;
        if !crate::hnfilt::check_torsion_profile(&profile)?.holds() {
            continue;
        }
        // Dualizing only leaves the reduced situation when μ continues the limit's slope before z.
        let dualize = mu == *s_minus && rng.gen_bool(0.5);
        let (profile, z) = if dualize {
            let zd = dual_point(limit.domain_end(), limit.end_value(), &z);
            (profile.dual(), zd)
        } else {
            (profile, z)
        };
        let expected = (&z.0 * &dd, &z.1 * &dd);
        return Ok(SyntheticProfile { profile, z, expected, expect_dualized: dualize });
    }
}

/// Towers of degree at most 4 with explicit roots.
pub fn tower_catalogue() -> Result<Vec<RamifiedTower>> {
    Ok(vec![
        RamifiedTower::trivial(2)?,
        RamifiedTower::trivial(3)?,
        RamifiedTower::trivial(5)?,
        RamifiedTower::quadratic(3, 0, -3)?,
        RamifiedTower::quadratic(3, 3, 3)?,
        RamifiedTower::quadratic(5, 0, 5)?,
        RamifiedTower::quadratic(2, 2, 2)?,
        RamifiedTower::cyclotomic(2)?,
        RamifiedTower::cyclotomic(3)?,
        RamifiedTower::cyclotomic(5)?,
        RamifiedTower::real_cyclotomic7()?,
    ])
}

/// A finite-length quotient of `R^r` over the inner ring of a catalogue tower.
pub fn random_inner_quotient(rng: &mut impl Rng, towers: &[RamifiedTower]) -> Result<InnerQuotient> {
    loop {
        let tower = towers.choose(rng).expect("nonempty catalogue").clone();
        let inner = tower.inner().clone();
        let deg = inner.e();
        let r = rng.gen_range(1..=if tower.degree() >= 4 { 2 } else { 3 });
        let y = inner.uniformizer();
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let coeffs: Vec<i64> = (0..deg).map(|_| rng.gen_range(-2..=2)).collect();
                let mut x = inner.reduce(&QPoly::from_ints(&coeffs));
                if i == j {
                    for _ in 0..rng.gen_range(0..=2) {
                        x = inner.mul(&x, &y);
                    }
                }
                row.push(x);
            }
            rows.push(row);
        }
        match InnerQuotient::new(tower, &Matrix::from_rows(rows, r)) {
            Ok(q) => return Ok(q),
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Concave polygon with up to `max_segments` segments and small rational data.
pub fn random_polygon(rng: &mut impl Rng, max_segments: usize) -> ConcavePolygon {
    let k = rng.gen_range(1..=max_segments);
    let mut slopes: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(-8..=12), rng.gen_range(1..=4))).collect();
    slopes.sort_by(|a, b| b.cmp(a));
    slopes.dedup();
    let segs: Vec<(Rational, Rational)> =
        slopes.into_iter().map(|s| (s, rat(rng.gen_range(1..=6), rng.gen_range(1..=3)))).collect();
    ConcavePolygon::from_slopes(&segs).expect("strictly decreasing slopes and positive lengths")
}

/// A polygon with slopes in `[0, 1]` lying on or above `level`, with the same end point.
///
/// `level` must have slopes in `[0, 1]`, so that it lies below `min(x, end value)`.
pub fn random_hodge_above(rng: &mut impl Rng, level: &ConcavePolygon) -> Result<ConcavePolygon> {
    let (n, y) = level.end_point().clone();
    let mut pts = level.breakpoints_with_ends().to_vec();
    for _ in 0..rng.gen_range(0..=3) {
        let x = &n * rat(rng.gen_range(1..=11), 12);
        let low = level.eval(&x)?;
        let high = if x < y { x.clone() } else { y.clone() };
        pts.push((x, &low + (high - &low) * rat(rng.gen_range(0..=4), 4)));
    }
    ConcavePolygon::concave_envelope(&pts)
}

/// Random monomial isocrystal of height at most `max_height` with exponents in `[-2, 3]`.
pub fn random_isocrystal(rng: &mut impl Rng, p: u64, max_height: usize) -> Result<StandardIsocrystal> {
    let h = rng.gen_range(1..=max_height);
    let cycles = random_cycles(rng, 1, h, -2, 3);
    layout(rng, p, &cycles, 1)?.with_residue_degree(rng.gen_range(1..=3))
}

/// A hand-made profile breaking exactly one of the checks, with the abscissa where it is detected.
#[derive(Clone, Debug)]
pub struct ViolationFixture {
    pub name: &'static str,
    pub profile: TorsionProfile,
    /// Hodge polygon for the check against level 1, when that is the one broken.
    pub hodge: Option<ConcavePolygon>,
    pub kind: ViolationKind,
    pub abscissa: Rational,
}

fn vector_polygon(entries: &[Rational]) -> ConcavePolygon {
    NewtonVector::new(entries.to_vec()).expect("non-increasing entries").to_polygon()
}

/// Levels with slopes `(1, 1/2 + 1/4i, 1/2 − 1/4i)` converging to `(1, 1/2, 1/2)`, `d = 4`.
pub fn converging_profile(depth: u32) -> Result<TorsionProfile> {
    let levels = (1..=depth)
        .map(|i| {
            let c = rat(1, 4 * i as i64);
            let v = vector_polygon(&[int(1), rat(1, 2) + &c, rat(1, 2) - &c]);
            Ok((i, v.unrescale(i.into())?))
        })
        .collect::<Result<_>>()?;
    TorsionProfile::new(3, 4, 1, levels, vector_polygon(&[int(1), rat(1, 2), rat(1, 2)]))
}

/// One fixture per kind of profile failure, each a small edit of [`converging_profile`].
pub fn violation_fixtures() -> Result<Vec<ViolationFixture>> {
    let base = converging_profile(4)?;
    let poly = |s: &str| s.parse::<ConcavePolygon>();
    let with = |edits: Vec<(u32, ConcavePolygon)>| -> Result<TorsionProfile> {
        let mut levels = base.levels().clone();
        for (i, renorm) in edits {
            levels.insert(i, renorm.unrescale(i.into())?);
        }
        TorsionProfile::new(3, 4, 1, levels, base.limit().clone())
    };
    let (one, two) = (base.renormalised(1)?, base.renormalised(2)?);
    Ok(vec![
        ViolationFixture {
            name: "swapped-levels",
            profile: with(vec![(1, two), (2, one.clone())])?,
            hodge: None,
            kind: ViolationKind::Monotonicity { fine: 1, coarse: 2 },
            abscissa: int(2),
        },
        ViolationFixture {
            name: "limit-above-level",
            profile: with(vec![(3, vector_polygon(&[rat(3, 4), rat(3, 4), rat(1, 2)]))])?,
            hodge: None,
            kind: ViolationKind::LimitAbove { level: 3 },
            abscissa: int(1),
        },
        ViolationFixture {
            name: "steep-first-level",
            profile: with(vec![(1, poly("(0,0);(1,5/4);(3,2)")?)])?,
            hodge: None,
            kind: ViolationKind::FirstLevelSlope,
            abscissa: int(0),
        },
        ViolationFixture {
            name: "first-level-above-hodge",
            profile: base.clone(),
            hodge: Some(vector_polygon(&[int(1), rat(5, 8), rat(3, 8)])),
            kind: ViolationKind::AboveHodge,
            abscissa: int(2),
        },
        ViolationFixture {
            name: "wrong-end-value",
            profile: with(vec![(2, poly("(0,0);(1,1);(3,9/4)")?)])?,
            hodge: None,
            kind: ViolationKind::EndValue { level: 2 },
            abscissa: int(3),
        },
        ViolationFixture {
            name: "off-lattice-break",
            profile: with(vec![(1, poly("(0,0);(1,1);(2,15/8);(3,2)")?)])?,
            hodge: None,
            kind: ViolationKind::BreakLattice { level: 1 },
            abscissa: int(2),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hnfilt::{check_first_level_below_hodge, check_torsion_profile, simulate_torsion_split};

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u32> = (0..4).map(|i| instance_rng(9, i).gen()).collect();
        let b: Vec<u32> = (0..4).map(|i| instance_rng(9, i).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn lifts_are_admissible() {
        for i in 0..40 {
            let mut rng = instance_rng(1, i);
            let shape = LiftShape::random(&mut rng, 4);
            let lift = random_lift(&mut rng, &shape).unwrap();
            assert!(lift.verify_wa().unwrap().holds(), "{lift:?}");
        }
    }

    #[test]
    fn generic_objects_are_well_formed() {
        let mut found = 0;
        for i in 0..40 {
            let mut rng = instance_rng(2, i);
            let shape = ObjectShape::random(&mut rng, 3);
            let obj = random_object(&mut rng, &shape).unwrap();
            assert_eq!(obj.t_newton(), obj.t_hodge());
            assert_eq!(obj.d(), shape.d());
            found += usize::from(obj.is_weakly_admissible().unwrap());
        }
        assert!(found > 0);
    }

    #[test]
    fn synthetic_profiles_simulate() {
        let mut dualized = 0;
        for i in 0..60 {
            let mut rng = instance_rng(3, i);
            let s = random_torsion_profile(&mut rng, 8).unwrap();
            let trace = simulate_torsion_split(&s.profile, &s.z).unwrap_or_else(|e| {
                let lv: Vec<String> = s
                    .profile
                    .levels()
                    .keys()
                    .map(|&i| format!("{i}: {}", s.profile.renormalised(i).unwrap()))
                    .collect();
                panic!("{e}: limit {} z {:?} levels {lv:#?}", s.profile.limit(), s.z)
            });
            assert_eq!(trace.answer, s.expected);
            assert_eq!(trace.dualized, s.expect_dualized);
            dualized += usize::from(trace.dualized);
        }
        assert!(dualized > 0);
    }

    #[test]
    fn fixtures_fail_where_expected() {
        for fx in violation_fixtures().unwrap() {
            let report = match &fx.hodge {
                Some(h) => check_first_level_below_hodge(&fx.profile, h).unwrap(),
                None => check_torsion_profile(&fx.profile).unwrap(),
            };
            let v = report.first().unwrap_or_else(|| panic!("{} passed", fx.name));
            assert_eq!((&v.kind, &v.abscissa), (&fx.kind, &fx.abscissa), "{}", fx.name);
        }
        assert!(check_torsion_profile(&converging_profile(4).unwrap()).unwrap().holds());
    }

    #[test]
    fn polarised_sums_are_self_dual() {
        for i in 0..6 {
            let mut rng = instance_rng(4, i);
            let inst = random_polarised_instance(&mut rng).unwrap();
            let report = inst.model.duality_check(true).unwrap();
            assert!(report.holds(), "{report:?}");
        }
    }
}
