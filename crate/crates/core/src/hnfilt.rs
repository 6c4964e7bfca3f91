//! Hodge-Newton reducibility and the splitting it forces.
//!
//! Polygon-level tools work on [`ConcavePolygon`]s directly. Object-level
//! splits cut a [`FilteredIsocrystalCx`] along the slot set carrying the
//! Newton slopes before a touching point and recompute every polygon of the
//! two parts from scratch.
//!
//! The torsion simulation replays only the height and degree bookkeeping of
//! the argument that builds a sub-`p`-divisible group from the break points of
//! the torsion levels. The finite flat group schemes themselves, and the
//! flatness arguments about them, are outside what any finite computation can
//! witness, so a successful trace certifies that bookkeeping and nothing more.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::filisoc::{chain_report, mask_of, slots_of, FilteredIsocrystalCx};
use crate::polycalc::{fmt_point, ConcavePolygon, Point, PolygonTriple};
use crate::rational::{from_usize, is_integer, Rational};

/// Harder-Narasimhan polygons of the torsion levels `H[p^i]` and of `H` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionProfile {
    n: usize,
    d: u64,
    e: u64,
    /// Level `i` lives on `[0, i n]`.
    levels: BTreeMap<u32, ConcavePolygon>,
    limit: ConcavePolygon,
}

impl TorsionProfile {
    pub fn new(n: usize, d: u64, e: u64, levels: BTreeMap<u32, ConcavePolygon>, limit: ConcavePolygon) -> Result<Self> {
        if n == 0 || d == 0 || e == 0 {
            return Err(Error::Invariant("n, d and e must be positive".into()));
        }
        if *limit.domain_end() != from_usize(n) {
            return Err(Error::Invariant(format!("the limit polygon must live on [0,{n}]")));
        }
        if !levels.contains_key(&1) {
            return Err(Error::Invariant("level 1 is required".into()));
        }
        for (&i, poly) in &levels {
            if i == 0 || *poly.domain_end() != from_usize(n * i as usize) {
                return Err(Error::Invariant(format!("level {i} must live on [0,{}]", n * i as usize)));
            }
        }
        Ok(Self { n, d, e, levels, limit })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn levels(&self) -> &BTreeMap<u32, ConcavePolygon> {
        &self.levels
    }

    pub fn limit(&self) -> &ConcavePolygon {
        &self.limit
    }

    pub fn level(&self, i: u32) -> Result<&ConcavePolygon> {
        self.levels.get(&i).ok_or_else(|| Error::Domain(format!("level {i} is not stored")))
    }

    pub fn first_level(&self) -> &ConcavePolygon {
        &self.levels[&1]
    }

    /// `x ↦ (1/i) HN(H[p^i])(i x)` on `[0, n]`.
    pub fn renormalised(&self, i: u32) -> Result<ConcavePolygon> {
        self.level(i)?.rescale(i.into())
    }

    /// The profile of the dual group: every polygon replaced by its dual.
    pub fn dual(&self) -> Self {
        Self {
            levels: self.levels.iter().map(|(&i, p)| (i, p.dual())).collect(),
            limit: self.limit.dual(),
            ..self.clone()
        }
    }
}

/// What went wrong in a profile check, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A renormalised level ends somewhere other than the limit.
    EndValue { level: u32 },
    /// Level `coarse` lies above level `fine`, where `coarse` is a multiple of `fine`.
    Monotonicity { fine: u32, coarse: u32 },
    /// The limit lies above a renormalised level.
    LimitAbove { level: u32 },
    /// A slope of the first level outside `[0, 1]`.
    FirstLevelSlope,
    /// A break point of a renormalised level off the lattice `(1/id)Z × (1/ide)Z`.
    BreakLattice { level: u32 },
    /// The gap to the limit grows along a doubling chain.
    GapGrowth { fine: u32, coarse: u32 },
    /// The first level lies above the Hodge polygon.
    AboveHodge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub abscissa: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            ViolationKind::EndValue { level } => format!("level {level} has the wrong end value"),
            ViolationKind::Monotonicity { fine, coarse } => {
                format!("renormalised level {coarse} lies above level {fine}")
            }
            ViolationKind::LimitAbove { level } => format!("the limit lies above renormalised level {level}"),
            ViolationKind::FirstLevelSlope => "level 1 has a slope outside [0,1]".to_string(),
            ViolationKind::BreakLattice { level } => format!("level {level} has a break point off the lattice"),
            ViolationKind::GapGrowth { fine, coarse } => {
                format!("the gap to the limit grows from level {fine} to level {coarse}")
            }
            ViolationKind::AboveHodge => "level 1 lies above the Hodge polygon".to_string(),
        };
        write!(f, "{what} at x = {}", self.abscissa)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileReport {
    pub violations: Vec<Violation>,
}

impl ProfileReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Abscissa where `upper − lower` is largest (the first such breakpoint).
fn widest_gap(upper: &ConcavePolygon, lower: &ConcavePolygon) -> Result<(Rational, Rational)> {
    let mut xs: Vec<Rational> =
        upper.breakpoints_with_ends().iter().chain(lower.breakpoints_with_ends()).map(|p| p.0.clone()).collect();
    xs.sort();
    xs.dedup();
    let mut best: Option<(Rational, Rational)> = None;
    for x in xs {
        let gap = upper.eval(&x)? - lower.eval(&x)?;
        if best.as_ref().is_none_or(|b| gap > b.1) {
            best = Some((x, gap));
        }
    }
    Ok(best.expect("polygons have endpoints"))
}

/// Monotonicity of renormalised levels, the limit below all of them, shared end
/// values, level-1 slopes in `[0, 1]`, the break-point lattice, and gaps to the
/// limit that do not grow along doubling chains.
pub fn check_torsion_profile(profile: &TorsionProfile) -> Result<ProfileReport> {
    let mut violations = Vec::new();
    let n = from_usize(profile.n);
    let renorm: BTreeMap<u32, ConcavePolygon> =
        profile.levels.keys().map(|&i| Ok((i, profile.renormalised(i)?))).collect::<Result<_>>()?;
    for (&i, r) in &renorm {
        if r.end_value() != profile.limit.end_value() {
            violations.push(Violation { kind: ViolationKind::EndValue { level: i }, abscissa: n.clone() });
        }
    }
    for (&i, fine) in &renorm {
        for (&j, coarse) in renorm.range(i + 1..) {
            if j % i == 0 {
                if let Some(x) = coarse.first_excess(fine)? {
                    violations
                        .push(Violation { kind: ViolationKind::Monotonicity { fine: i, coarse: j }, abscissa: x });
                }
            }
        }
    }
    for (&i, r) in &renorm {
        if let Some(x) = profile.limit.first_excess(r)? {
            violations.push(Violation { kind: ViolationKind::LimitAbove { level: i }, abscissa: x });
        }
    }
    let first = profile.first_level();
    for (a, b) in first.segments() {
        let slope = (&b.1 - &a.1) / (&b.0 - &a.0);
        if slope < Rational::zero() || slope > Rational::one() {
            violations.push(Violation { kind: ViolationKind::FirstLevelSlope, abscissa: a.0.clone() });
            break;
        }
    }
    for (&i, r) in &renorm {
        let id = from_usize(i as usize) * Rational::from_integer(profile.d.into());
        let ide = &id * Rational::from_integer(profile.e.into());
        if let Some((x, _)) =
            r.break_points().into_iter().find(|(x, y)| !is_integer(&(x * &id)) || !is_integer(&(y * &ide)))
        {
            violations.push(Violation { kind: ViolationKind::BreakLattice { level: i }, abscissa: x });
        }
    }
    for (&i, fine) in &renorm {
        let Some(coarse) = renorm.get(&(2 * i)) else { continue };
        let (_, before) = widest_gap(fine, &profile.limit)?;
        let (x, after) = widest_gap(coarse, &profile.limit)?;
        if after > before {
            violations.push(Violation { kind: ViolationKind::GapGrowth { fine: i, coarse: 2 * i }, abscissa: x });
        }
    }
    Ok(ProfileReport { violations })
}

/// The first torsion level lies below the Hodge polygon.
pub fn check_first_level_below_hodge(profile: &TorsionProfile, hdg: &ConcavePolygon) -> Result<ProfileReport> {
    let first = profile.first_level();
    let mut violations = Vec::new();
    if let Some(x) = first.first_excess(hdg)? {
        violations.push(Violation { kind: ViolationKind::AboveHodge, abscissa: x });
    } else if first.end_value() != hdg.end_value() {
        violations.push(Violation { kind: ViolationKind::AboveHodge, abscissa: hdg.domain_end().clone() });
    }
    Ok(ProfileReport { violations })
}

/// Break points of `newt` lying on `hdg`.
pub fn touching_points(newt: &ConcavePolygon, hdg: &ConcavePolygon) -> Result<Vec<Point>> {
    if !newt.leq(hdg)? {
        return Err(Error::Precondition(format!("Newt {newt} does not lie below Hdg {hdg}")));
    }
    Ok(newt.break_points().into_iter().filter(|z| hdg.lies_on(z)).collect())
}

/// `z` is a break point of `hn` and lies on the first torsion level.
pub fn break_point_on_first_level(hn: &ConcavePolygon, first_level: &ConcavePolygon, z: &Point) -> bool {
    hn.is_break_point(z) && first_level.lies_on(z)
}

/// The end of a leading slope-1 segment and the start of a trailing slope-0
/// segment, when these are interior break points.
///
/// Every first level with slopes in `[0, 1]` lying above `hn` with the same end
/// point passes through them.
pub fn canonical_break_points(hn: &ConcavePolygon) -> Vec<Point> {
    let breaks = hn.break_points();
    let mut out = Vec::new();
    let segs: Vec<(Point, Point)> = hn.segments().map(|(a, b)| (a.clone(), b.clone())).collect();
    let slope = |(a, b): &(Point, Point)| (&b.1 - &a.1) / (&b.0 - &a.0);
    if let Some(first) = segs.first() {
        if slope(first).is_one() && breaks.contains(&first.1) {
            out.push(first.1.clone());
        }
    }
    if let Some(last) = segs.last() {
        if slope(last).is_zero() && breaks.contains(&last.0) && !out.contains(&last.0) {
            out.push(last.0.clone());
        }
    }
    out
}

/// Polygons of the parts of a split and of the original object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub z: Point,
    /// Slots of the subobject, zero-based.
    pub slots: Vec<usize>,
    pub original: PolygonTriple,
    /// Recomputed from the subobject.
    pub sub: PolygonTriple,
    /// Recomputed from the quotient.
    pub quotient: PolygonTriple,
}

impl SplitResult {
    /// Whether restrictions of the original polygons equal those of the parts.
    pub fn parts_match(&self) -> Result<bool> {
        Ok(self.original.restrict(&self.z.0)? == self.sub && self.original.rest_after(&self.z)? == self.quotient)
    }

    pub fn reassembles(&self) -> Result<bool> {
        Ok(self.sub.join(&self.quotient)? == self.original)
    }
}

impl fmt::Display for SplitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "z = {}", fmt_point(&self.z))?;
        let slots: Vec<String> = self.slots.iter().map(|j| (j + 1).to_string()).collect();
        writeln!(f, "subobject slots: {}", slots.join(","))?;
        write_table(f, &[("whole", &self.original), ("sub", &self.sub), ("quot", &self.quotient)])
    }
}

/// One row per part with columns padded to a common width.
fn write_table(f: &mut fmt::Formatter<'_>, rows: &[(&str, &PolygonTriple)]) -> fmt::Result {
    let mut cells = vec![["part".to_string(), "Newt".into(), "Hdg".into(), "HN".into()]];
    for (name, t) in rows {
        cells.push([name.to_string(), t.newt.to_string(), t.hdg.to_string(), t.hn.to_string()]);
    }
    let widths: Vec<usize> = (0..4).map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    for row in &cells {
        let padded: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        writeln!(f, "{}", padded.join("  ").trim_end())?;
    }
    Ok(())
}

/// Newton, Hodge and HN polygons of a weakly admissible object.
pub fn polygons_of(obj: &FilteredIsocrystalCx) -> Result<PolygonTriple> {
    Ok(PolygonTriple { newt: obj.newton()?.to_polygon(), hdg: obj.hodge()?.to_polygon(), hn: obj.hn_polygon()? })
}

/// Slots whose Newton slope comes before the abscissa `x` of a Newton break point.
fn slots_before(obj: &FilteredIsocrystalCx, newt: &ConcavePolygon, x: &Rational) -> Result<u64> {
    let threshold = newt.left_slope(x).ok_or_else(|| Error::Precondition(format!("no Newton slope before x = {x}")))?;
    let iso = obj.isocrystal();
    let mut slots = Vec::new();
    for cycle in iso.cycles() {
        if -iso.cycle_slope(&cycle) >= threshold {
            slots.extend(cycle);
        }
    }
    slots.sort();
    if from_usize(slots.len()) != x * from_usize(obj.d()) {
        return Err(Error::Internal(format!("slot count {} does not match x = {x}", slots.len())));
    }
    Ok(mask_of(&slots))
}

/// Splits a weakly admissible object at a break point of its Newton polygon
/// lying on its Hodge polygon.
pub fn split_at(obj: &FilteredIsocrystalCx, z: &Point) -> Result<SplitResult> {
    if !obj.is_weakly_admissible()? {
        return Err(Error::Precondition("the object is not weakly admissible".into()));
    }
    let original = polygons_of(obj)?;
    if !touching_points(&original.newt, &original.hdg)?.contains(z) {
        return Err(Error::Precondition(format!("{} is not a Newton break point on the Hodge polygon", fmt_point(z))));
    }
    let mask = slots_before(obj, &original.newt, &z.0)?;
    if !obj.is_stable(mask) {
        return Err(Error::Internal("the slots before z are not stable under F".into()));
    }
    let (sub_obj, quot_obj) = (obj.restrict(mask)?, obj.quotient(mask)?);
    if sub_obj.t_hodge() != sub_obj.t_newton() {
        return Err(Error::Internal(format!(
            "induced filtration has t_H = {} but t_N = {}",
            sub_obj.t_hodge(),
            sub_obj.t_newton()
        )));
    }
    for (name, part) in [("subobject", &sub_obj), ("quotient", &quot_obj)] {
        if !part.is_weakly_admissible()? {
            return Err(Error::Internal(format!("the {name} is not weakly admissible")));
        }
    }
    if !original.hn.is_break_point(z) {
        return Err(Error::Internal(format!("{} is not a break point of HN", fmt_point(z))));
    }
    let result = SplitResult {
        z: z.clone(),
        slots: slots_of(mask),
        original,
        sub: polygons_of(&sub_obj)?,
        quotient: polygons_of(&quot_obj)?,
    };
    if !result.parts_match()? {
        return Err(Error::Internal("part polygons differ from the restricted polygons".into()));
    }
    Ok(result)
}

/// A split together with what was certified about it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCertificate {
    pub split: SplitResult,
    /// Whether `z` is a break point of the limit and lies on the first torsion level,
    /// when a profile was supplied.
    pub first_level: Option<bool>,
}

impl SplitCertificate {
    /// HN ≤ Newt ≤ Hdg on both parts, with the expected end values.
    pub fn parts_satisfy_chain(&self) -> Result<bool> {
        let mut ok = true;
        for t in [&self.split.sub, &self.split.quotient] {
            ok &= chain_report(t.hn.clone(), t.newt.clone(), t.hdg.clone())?.holds();
        }
        let total = self.split.original.newt.end_value();
        ok &= *self.split.sub.newt.end_value() == self.split.z.1;
        ok &= *self.split.quotient.newt.end_value() == total - &self.split.z.1;
        Ok(ok)
    }
}

/// The full splitting pipeline at a touching point `z`.
pub fn reduce(obj: &FilteredIsocrystalCx, z: &Point, profile: Option<&TorsionProfile>) -> Result<SplitCertificate> {
    let newt = obj.newton()?.to_polygon();
    let hdg = obj.hodge()?.to_polygon();
    let candidates = touching_points(&newt, &hdg)?;
    if candidates.is_empty() {
        return Err(Error::Precondition("no candidate z: the object is not Hodge-Newton reducible".into()));
    }
    let split = split_at(obj, z)?;
    let first_level = profile.map(|p| break_point_on_first_level(p.limit(), p.first_level(), z));
    Ok(SplitCertificate { split, first_level })
}

/// Three-part split of a polarised object at `z` and its dual point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarisedSplit {
    pub z: Point,
    pub z_dual: Point,
    pub first: PolygonTriple,
    /// `None` when `z` is self-dual.
    pub middle: Option<PolygonTriple>,
    pub last: PolygonTriple,
}

impl PolarisedSplit {
    /// The last part is dual to the first and the middle part is symmetric.
    pub fn duality_holds(&self) -> bool {
        self.last == self.first.dual() && self.middle.as_ref().is_none_or(PolygonTriple::is_symmetric)
    }
}

impl fmt::Display for PolarisedSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "z = {}, dual z = {}", fmt_point(&self.z), fmt_point(&self.z_dual))?;
        let mut rows = vec![("1", &self.first)];
        if let Some(m) = &self.middle {
            rows.push(("2", m));
        }
        rows.push(("3", &self.last));
        write_table(f, &rows)?;
        writeln!(f, "part 3 dual to part 1: {}", self.last == self.first.dual())
    }
}

/// `(N − x, N − x + y − P(N))` for polygons on `[0, N]` ending at `P(N)`.
pub fn dual_point(domain_end: &Rational, end_value: &Rational, z: &Point) -> Point {
    let x = domain_end - &z.0;
    let y = &x + &z.1 - end_value;
    (x, y)
}

pub fn polarised_split(obj: &FilteredIsocrystalCx, z: &Point) -> Result<PolarisedSplit> {
    let whole = polygons_of(obj)?;
    if !whole.is_symmetric() {
        return Err(Error::Precondition("polarised splits need symmetric polygons".into()));
    }
    let zd = dual_point(whole.newt.domain_end(), whole.newt.end_value(), z);
    let (z, zd) = if z.0 <= zd.0 { (z.clone(), zd) } else { (zd, z.clone()) };
    let first_split = split_at(obj, &z)?;
    if z == zd {
        return Ok(PolarisedSplit { z_dual: zd, z, first: first_split.sub, middle: None, last: first_split.quotient });
    }
    let second_split = split_at(obj, &zd)?;
    let inner = mask_of(&first_split.slots);
    let outer = mask_of(&second_split.slots);
    let quotient = obj.quotient(inner)?;
    let rest: Vec<usize> = (0..obj.height()).filter(|j| inner >> j & 1 == 0).collect();
    let local: Vec<usize> = rest.iter().enumerate().filter(|(_, &j)| outer >> j & 1 == 1).map(|(i, _)| i).collect();
    let middle = polygons_of(&quotient.restrict(mask_of(&local))?)?;
    Ok(PolarisedSplit { z, z_dual: zd, first: first_split.sub, middle: Some(middle), last: second_split.quotient })
}

/// One level of the torsion simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: u32,
    /// The break point of the renormalised level where slopes drop below `μ`.
    pub point: Point,
    /// `ht G_i = i d x_i`.
    pub height: Rational,
    /// `deg G_i = i d y_i`.
    pub degree: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationTrace {
    /// Whether the simulation ran on the dual profile.
    pub dualized: bool,
    /// The point the simulation ran at (dual coordinates when dualized).
    pub z: Point,
    pub first_break: Point,
    pub mu: Rational,
    pub levels: Vec<LevelRecord>,
    /// `a_i = ht G_{i+1} − ht G_i`.
    pub increments: Vec<Rational>,
    /// Index from which the increments are constant.
    pub stable_from: u32,
    /// `(ht K_i, deg K_i)` for `K_i = G_{i + i_0} / G_{i_0}`.
    pub kernels: Vec<(Rational, Rational)>,
    /// `(ht H_1, dim H_1)` in the original coordinates.
    pub answer: (Rational, Rational),
}

impl fmt::Display for SimulationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dualized: {}", self.dualized)?;
        writeln!(f, "z: {}", fmt_point(&self.z))?;
        writeln!(f, "z1: {}", fmt_point(&self.first_break))?;
        writeln!(f, "mu: {}", self.mu)?;
        for (idx, r) in self.levels.iter().enumerate() {
            let inc = self.increments.get(idx).map_or("-".to_string(), ToString::to_string);
            writeln!(
                f,
                "level {}: z_i = {}, ht G = {}, deg G = {}, a = {inc}",
                r.level,
                fmt_point(&r.point),
                r.height,
                r.degree
            )?;
        }
        writeln!(f, "stable from: {}", self.stable_from)?;
        for (i, (ht, deg)) in self.kernels.iter().enumerate() {
            writeln!(f, "K_{}: ht = {ht}, deg = {deg}", i + 1)?;
        }
        write!(f, "answer: ht = {}, dim = {}", self.answer.0, self.answer.1)
    }
}

/// Break point of `poly` with all slopes before it at least `mu` and all after it below `mu`.
fn threshold_point(poly: &ConcavePolygon, mu: &Rational) -> Option<Point> {
    poly.break_points()
        .into_iter()
        .find(|(x, _)| poly.left_slope(x).is_some_and(|s| s >= *mu) && poly.right_slope(x).is_some_and(|s| s < *mu))
}

/// Replays the height and degree bookkeeping that produces a sub-`p`-divisible
/// group of height `d x` and dimension `d y` from a break point `z = (x, y)` of
/// the limit polygon lying on the first torsion level.
///
/// Levels must be stored contiguously from 1. Too few levels to see the
/// increments stabilise at `d x` gives [`Error::Inconclusive`].
pub fn simulate_torsion_split(profile: &TorsionProfile, z: &Point) -> Result<SimulationTrace> {
    let report = check_torsion_profile(profile)?;
    if let Some(v) = report.first() {
        return Err(Error::Precondition(format!("profile check failed: {v}")));
    }
    if !break_point_on_first_level(profile.limit(), profile.first_level(), z) {
        return Err(Error::Precondition(format!(
            "{} must be a break point of the limit lying on level 1",
            fmt_point(z)
        )));
    }
    let depth = *profile.levels.keys().last().unwrap();
    if profile.levels.len() != depth as usize {
        return Err(Error::Precondition("levels must be stored contiguously from 1".into()));
    }

    let first = profile.first_level();
    let reduced = first.is_break_point(z)
        || match (first.right_slope(&z.0), profile.limit.right_slope(&z.0)) {
            (Some(level), Some(limit)) => level > limit,
            _ => false,
        };
    let (work, wz, dualized) = if reduced {
        (profile.clone(), z.clone(), false)
    } else {
        let dual = profile.dual();
        let zd = dual_point(profile.limit.domain_end(), profile.limit.end_value(), z);
        (dual, zd, true)
    };
    let first = work.first_level();
    if dualized {
        let right = first.right_slope(&wz.0);
        let limit = work.limit.right_slope(&wz.0);
        if !(first.is_break_point(&wz) || matches!((right, limit), (Some(a), Some(b)) if a > b)) {
            return Err(Error::Internal("the dual profile is not in the reduced situation".into()));
        }
    }

    let first_break = first
        .break_points()
        .into_iter()
        .find(|(x, _)| *x >= wz.0)
        .ok_or_else(|| Error::Precondition("level 1 has no break point at or after z".into()))?;
    let mu = first.left_slope(&first_break.0).expect("interior break points have a left slope");

    let d = Rational::from_integer(work.d.into());
    let mut levels = Vec::new();
    for &i in work.levels.keys() {
        let r = work.renormalised(i)?;
        let point = threshold_point(&r, &mu).ok_or_else(|| {
            Error::Precondition(format!("level {i} has no break point where slopes drop below μ = {mu}"))
        })?;
        if point.0 < wz.0 || point.0 > first_break.0 || !first.lies_on(&point) {
            return Err(Error::Precondition(format!(
                "level {i}: z_i = {} is not on level 1 between z and z1",
                fmt_point(&point)
            )));
        }
        let scale = from_usize(i as usize) * &d;
        let height = &point.0 * &scale;
        if !is_integer(&height) {
            return Err(Error::Precondition(format!("level {i}: ht G_i = {height} is not an integer")));
        }
        let degree = &point.1 * &scale;
        levels.push(LevelRecord { level: i, point, height, degree });
    }
    let increments: Vec<Rational> = levels.windows(2).map(|w| &w[1].height - &w[0].height).collect();
    if let Some(k) = increments.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Precondition(format!("increments increase after level {}", k + 2)));
    }
    if increments.len() < 2 {
        return Err(Error::Inconclusive(format!("depth {depth} is too shallow to observe stabilisation")));
    }
    let last = increments.last().unwrap().clone();
    let tail_start = increments.iter().rposition(|a| *a != last).map_or(0, |k| k + 1);
    if tail_start + 2 > increments.len() {
        return Err(Error::Inconclusive(format!("increments have not stabilised by depth {depth}")));
    }
    if last != &wz.0 * &d {
        return Err(Error::Inconclusive(format!(
            "increments stabilise at {last} by depth {depth}, not at d x = {}",
            &wz.0 * &d
        )));
    }
    let stable_from = levels[tail_start].level;
    let base = &levels[tail_start];
    let mut kernels = Vec::new();
    for (k, rec) in levels[tail_start + 1..].iter().enumerate() {
        let i = from_usize(k + 1);
        let ht = &rec.height - &base.height;
        let deg = &rec.degree - &base.degree;
        if ht != &i * &d * &wz.0 || deg != &i * &d * &wz.1 {
            return Err(Error::Precondition(format!("K_{}: (ht, deg) = ({ht}, {deg}) does not match i d z", k + 1)));
        }
        kernels.push((ht, deg));
    }
    let answer = if dualized { (&d * &z.0, &d * &z.1) } else { (&d * &wz.0, &d * &wz.1) };
    Ok(SimulationTrace { dualized, z: wz, first_break, mu, levels, increments, stable_from, kernels, answer })
}
