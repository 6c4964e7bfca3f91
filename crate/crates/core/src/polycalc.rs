//! Concave polygons and Newton vectors over the rationals.
//!
//! A [`ConcavePolygon`] is stored as its list of genuine breakpoints, starting
//! at `(0,0)`. Every constructor merges collinear segments, so two polygons are
//! equal exactly when they are equal as functions.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_usize, is_integer, parse_rational, Rational};

pub type Point = (Rational, Rational);

/// A non-increasing finite sequence of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NewtonVector {
    entries: Vec<Rational>,
}

impl NewtonVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invariant(format!("entries not non-increasing: {}", fmt_tuple(&entries))));
        }
        Ok(Self { entries })
    }

    /// Sorts the entries into non-increasing order.
    pub fn from_unsorted(mut entries: Vec<Rational>) -> Self {
        entries.sort_by(|a, b| b.cmp(a));
        Self { entries }
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn to_polygon(&self) -> ConcavePolygon {
        let mut pts = Vec::with_capacity(self.len() + 1);
        let mut y = Rational::zero();
        pts.push((Rational::zero(), y.clone()));
        for (i, a) in self.entries.iter().enumerate() {
            y += a;
            pts.push((from_usize(i + 1), y.clone()));
        }
        ConcavePolygon::normalized(pts)
    }

    /// Accepts polygons whose breakpoints all have integer abscissa.
    pub fn from_polygon(p: &ConcavePolygon) -> Result<Self> {
        let mut entries = Vec::new();
        for ((x0, y0), (x1, y1)) in p.segments() {
            if !is_integer(x0) || !is_integer(x1) {
                return Err(Error::Domain(format!("polygon {p} has a non-integral breakpoint abscissa")));
            }
            let slope = (y1 - y0) / (x1 - x0);
            let len = (x1 - x0).to_integer();
            let len: usize = len.try_into().map_err(|_| Error::Domain("segment too long".into()))?;
            entries.extend(std::iter::repeat_n(slope, len));
        }
        Ok(Self { entries })
    }
}

impl fmt::Display for NewtonVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_tuple(&self.entries))
    }
}

impl FromStr for NewtonVector {
    type Err = Error;

    /// Parses `(a1,a2,...)`; `()` is the empty vector.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected (a1,...,an), got {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Self::empty());
        }
        let entries = inner.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

fn fmt_tuple(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Piecewise-linear concave function on `[0, N]` with `P(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConcavePolygon {
    pts: Vec<Point>,
}

impl ConcavePolygon {
    pub fn empty() -> Self {
        Self { pts: vec![(Rational::zero(), Rational::zero())] }
    }

    /// Drops collinear interior points. Assumes a valid concave point list.
    fn normalized(pts: Vec<Point>) -> Self {
        let mut out: Vec<Point> = Vec::with_capacity(pts.len());
        for p in pts {
            while out.len() >= 2 {
                let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
                if slope(a, b) == slope(b, &p) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Self { pts: out }
    }

    /// Validates and normalizes an explicit breakpoint list.
    pub fn from_breakpoints(pts: Vec<Point>) -> Result<Self> {
        match pts.first() {
            Some((x, y)) if x.is_zero() && y.is_zero() => {}
            _ => return Err(Error::Invariant("polygon must start at (0,0)".into())),
        }
        for w in pts.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Invariant("breakpoint abscissae must increase strictly".into()));
            }
        }
        for w in pts.windows(3) {
            if slope(&w[0], &w[1]) < slope(&w[1], &w[2]) {
                return Err(Error::Invariant(format!("not concave at ({},{})", w[1].0, w[1].1)));
            }
        }
        Ok(Self::normalized(pts))
    }

    /// Segments given as `(slope, length)` in strictly decreasing slope order.
    pub fn from_slopes(slopes: &[(Rational, Rational)]) -> Result<Self> {
        let mut pts = vec![(Rational::zero(), Rational::zero())];
        for (i, (s, m)) in slopes.iter().enumerate() {
            if *m <= Rational::zero() {
                return Err(Error::Domain(format!("non-positive multiplicity {m}")));
            }
            if i > 0 && slopes[i - 1].0 <= *s {
                return Err(Error::Domain("slopes must be strictly decreasing".into()));
            }
            let (x, y) = pts.last().unwrap().clone();
            pts.push((x + m, y + s * m));
        }
        Ok(Self { pts })
    }

    pub fn breakpoints_with_ends(&self) -> &[Point] {
        &self.pts
    }

    pub fn domain_end(&self) -> &Rational {
        &self.pts.last().unwrap().0
    }

    pub fn end_value(&self) -> &Rational {
        &self.pts.last().unwrap().1
    }

    pub fn end_point(&self) -> &Point {
        self.pts.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.len() == 1
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.pts.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// `(slope, length)` of every segment, left to right.
    pub fn slopes(&self) -> Vec<(Rational, Rational)> {
        self.segments().map(|(a, b)| (slope(a, b), &b.0 - &a.0)).collect()
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if *x < Rational::zero() || x > self.domain_end() {
            return Err(Error::Domain(format!("x = {x} outside [0, {}]", self.domain_end())));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &Rational) -> Rational {
        for (a, b) in self.segments() {
            if x <= &b.0 {
                return &a.1 + slope(a, b) * (x - &a.0);
            }
        }
        self.end_value().clone()
    }

    /// Slope of the segment immediately to the right of `x` (None at the end).
    pub fn right_slope(&self, x: &Rational) -> Option<Rational> {
        self.segments().find(|(_, b)| x < &b.0).filter(|(a, _)| &a.0 <= x).map(|(a, b)| slope(a, b))
    }

    /// Slope of the segment immediately to the left of `x` (None at 0).
    pub fn left_slope(&self, x: &Rational) -> Option<Rational> {
        self.segments().find(|(a, b)| &a.0 < x && x <= &b.0).map(|(a, b)| slope(a, b))
    }

    fn check_same_domain(&self, other: &Self) -> Result<()> {
        if self.domain_end() != other.domain_end() {
            return Err(Error::Domain(format!("polygons on [0,{}] and [0,{}]", self.domain_end(), other.domain_end())));
        }
        Ok(())
    }

    /// Union of breakpoint abscissae of both polygons, sorted.
    fn common_abscissae(&self, other: &Self) -> Vec<Rational> {
        let mut xs: Vec<Rational> = self.pts.iter().chain(other.pts.iter()).map(|p| p.0.clone()).collect();
        xs.sort();
        xs.dedup();
        xs
    }

    /// The partial order: lies below everywhere and shares the end point.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same_domain(other)?;
        Ok(self.end_value() == other.end_value() && self.first_excess(other)?.is_none())
    }

    /// Smallest abscissa where `self` lies strictly above `other`.
    pub fn first_excess(&self, other: &Self) -> Result<Option<Rational>> {
        self.check_same_domain(other)?;
        Ok(self.common_abscissae(other).into_iter().find(|x| self.eval_unchecked(x) > other.eval_unchecked(x)))
    }

    /// Pointwise `self <= other` without the end-point requirement.
    pub fn below(&self, other: &Self) -> Result<bool> {
        Ok(self.first_excess(other)?.is_none())
    }

    /// Largest vertical gap `self - other` over the common breakpoints.
    pub fn sup_gap(&self, other: &Self) -> Result<Rational> {
        self.check_same_domain(other)?;
        Ok(self.common_abscissae(other).iter().map(|x| self.eval_unchecked(x) - other.eval_unchecked(x)).max().unwrap())
    }

    /// Least concave function through `(0,0)` dominating all points.
    pub fn concave_envelope(points: &[Point]) -> Result<Self> {
        if !points.iter().any(|(x, y)| x.is_zero() && y.is_zero()) {
            return Err(Error::Domain("envelope points must contain (0,0)".into()));
        }
        let mut pts: Vec<Point> = points.to_vec();
        if pts.iter().any(|(x, _)| *x < Rational::zero()) {
            return Err(Error::Domain("negative abscissa".into()));
        }
        pts.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        pts.dedup_by(|b, a| a.0 == b.0);
        if pts[0].1 > Rational::zero() {
            return Err(Error::Domain("a point above the origin at x = 0".into()));
        }
        let mut hull: Vec<Point> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
                // drop b unless it lies strictly above the chord a-p
                if slope(a, b) <= slope(a, &p) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Ok(Self::normalized(hull))
    }

    /// `x ↦ (1/d) P(d x)` on `[0, N/d]`.
    pub fn rescale(&self, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("rescale by zero".into()));
        }
        let d = Rational::from_integer(d.into());
        Ok(Self { pts: self.pts.iter().map(|(x, y)| (x / &d, y / &d)).collect() })
    }

    /// Inverse of [`rescale`](Self::rescale): `x ↦ d P(x/d)` on `[0, dN]`.
    pub fn unrescale(&self, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("rescale by zero".into()));
        }
        let d = Rational::from_integer(d.into());
        Ok(Self { pts: self.pts.iter().map(|(x, y)| (x * &d, y * &d)).collect() })
    }

    /// `x ↦ x + P(N − x) − P(N)`.
    pub fn dual(&self) -> Self {
        let (n, pn) = self.end_point().clone();
        let pts = self
            .pts
            .iter()
            .rev()
            .map(|(x, y)| {
                let xd = &n - x;
                let yd = &xd + y - &pn;
                (xd, yd)
            })
            .collect();
        Self { pts }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.dual()
    }

    /// `P` restricted to `[0, x0]`.
    pub fn restrict(&self, x0: &Rational) -> Result<Self> {
        let y0 = self.eval(x0)?;
        let mut pts: Vec<Point> = self.pts.iter().filter(|(x, _)| x < x0).cloned().collect();
        pts.push((x0.clone(), y0));
        Ok(Self::normalized(pts))
    }

    /// `t ↦ P(t + x) − y` on `[0, N − x]`, for `z = (x, y)` on `P`.
    pub fn rest_after(&self, z: &Point) -> Result<Self> {
        let (x, y) = z;
        if !self.lies_on(z) {
            return Err(Error::Precondition(format!("({x},{y}) does not lie on {self}")));
        }
        let mut pts = vec![(Rational::zero(), Rational::zero())];
        pts.extend(self.pts.iter().filter(|(px, _)| px > x).map(|(px, py)| (px - x, py - y)));
        Ok(Self::normalized(pts))
    }

    /// Joins `self` with `rest` shifted to start at the end of `self`.
    pub fn join(&self, rest: &Self) -> Result<Self> {
        let (x0, y0) = self.end_point().clone();
        let mut pts = self.pts.clone();
        pts.extend(rest.pts.iter().skip(1).map(|(x, y)| (x + &x0, y + &y0)));
        Self::from_breakpoints(pts)
    }

    /// Polygon of the union of the slope multisets (the direct-sum polygon).
    pub fn merge(&self, other: &Self) -> Self {
        let mut segs = self.slopes();
        segs.extend(other.slopes());
        segs.sort_by(|a, b| b.0.cmp(&a.0));
        let mut pts = vec![(Rational::zero(), Rational::zero())];
        for (s, m) in segs {
            let (x, y) = pts.last().unwrap().clone();
            pts.push((x + &m, y + s * m));
        }
        Self::normalized(pts)
    }

    /// Pointwise sum of polygons with a common domain, divided by their number.
    pub fn average(polys: &[Self]) -> Result<Self> {
        let first = polys.first().ok_or_else(|| Error::Domain("average of nothing".into()))?;
        for p in polys {
            first.check_same_domain(p)?;
        }
        let mut xs: Vec<Rational> = polys.iter().flat_map(|p| p.pts.iter().map(|q| q.0.clone())).collect();
        xs.sort();
        xs.dedup();
        let d = from_usize(polys.len());
        let pts = xs
            .into_iter()
            .map(|x| {
                let s = polys.iter().fold(Rational::zero(), |acc, p| acc + p.eval_unchecked(&x));
                (x, s / &d)
            })
            .collect();
        Ok(Self::normalized(pts))
    }

    /// Interior breakpoints only.
    pub fn break_points(&self) -> Vec<Point> {
        if self.pts.len() <= 2 {
            return Vec::new();
        }
        self.pts[1..self.pts.len() - 1].to_vec()
    }

    pub fn lies_on(&self, z: &Point) -> bool {
        matches!(self.eval(&z.0), Ok(y) if y == z.1)
    }

    pub fn is_break_point(&self, z: &Point) -> bool {
        self.break_points().contains(z)
    }
}

/// Entrywise positional average of Newton vectors of equal length.
pub fn average(vs: &[NewtonVector]) -> Result<NewtonVector> {
    let first = vs.first().ok_or_else(|| Error::Domain("average of nothing".into()))?;
    if vs.iter().any(|v| v.len() != first.len()) {
        return Err(Error::Domain("average of Newton vectors of different lengths".into()));
    }
    let d = from_usize(vs.len());
    let entries =
        (0..first.len()).map(|i| vs.iter().fold(Rational::zero(), |acc, v| acc + &v.entries[i]) / &d).collect();
    NewtonVector::new(entries)
}

fn slope(a: &Point, b: &Point) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

impl fmt::Display for ConcavePolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pts.iter().map(|(x, y)| format!("({x},{y})")).collect();
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for ConcavePolygon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pts = s.trim().split(';').map(parse_point).collect::<Result<Vec<_>>>()?;
        Self::from_breakpoints(pts)
    }
}

/// Parses `(x,y)` or `x,y`.
pub fn parse_point(s: &str) -> Result<Point> {
    let t = s.trim();
    let t = t.strip_prefix('(').map(|r| r.strip_suffix(')').unwrap_or(r)).unwrap_or(t);
    let (x, y) = t.split_once(',').ok_or_else(|| Error::Parse(format!("expected a point x,y, got {s:?}")))?;
    Ok((parse_rational(x)?, parse_rational(y)?))
}

pub fn fmt_point(z: &Point) -> String {
    format!("({},{})", z.0, z.1)
}

impl From<&NewtonVector> for ConcavePolygon {
    fn from(v: &NewtonVector) -> Self {
        v.to_polygon()
    }
}

/// Newton, Hodge and Harder-Narasimhan polygons of one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonTriple {
    pub newt: ConcavePolygon,
    pub hdg: ConcavePolygon,
    pub hn: ConcavePolygon,
}

impl PolygonTriple {
    pub fn dual(&self) -> Self {
        Self { newt: self.newt.dual(), hdg: self.hdg.dual(), hn: self.hn.dual() }
    }

    pub fn is_symmetric(&self) -> bool {
        self.newt.is_symmetric() && self.hdg.is_symmetric() && self.hn.is_symmetric()
    }

    /// All three polygons restricted to `[0, x]`.
    pub fn restrict(&self, x: &Rational) -> Result<Self> {
        Ok(Self { newt: self.newt.restrict(x)?, hdg: self.hdg.restrict(x)?, hn: self.hn.restrict(x)? })
    }

    /// All three polygons after `z`, which must lie on each of them.
    pub fn rest_after(&self, z: &Point) -> Result<Self> {
        Ok(Self { newt: self.newt.rest_after(z)?, hdg: self.hdg.rest_after(z)?, hn: self.hn.rest_after(z)? })
    }

    pub fn join(&self, rest: &Self) -> Result<Self> {
        Ok(Self { newt: self.newt.join(&rest.newt)?, hdg: self.hdg.join(&rest.hdg)?, hn: self.hn.join(&rest.hn)? })
    }
}

impl fmt::Display for PolygonTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Newt: {}", self.newt)?;
        writeln!(f, "Hdg: {}", self.hdg)?;
        write!(f, "HN: {}", self.hn)
    }
}

/// The Newton vector `(1^(k), 0^(n-k))`.
pub fn ones_then_zeros(k: usize, n: usize) -> NewtonVector {
    let entries = (0..n).map(|i| if i < k { Rational::one() } else { Rational::zero() }).collect();
    NewtonVector { entries }
}
