//! Filtered vector spaces, seen through their graded dimensions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::polycalc::NewtonVector;
use crate::rational::{from_usize, int, Rational};

/// Graded dimensions `i ↦ dim gr^i` of a finite, exhaustive, separated filtration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedProfile {
    graded: BTreeMap<i64, usize>,
}

impl GradedProfile {
    /// Zero entries are dropped.
    pub fn new(graded: impl IntoIterator<Item = (i64, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, n) in graded {
            if n > 0 {
                *map.entry(i).or_insert(0) += n;
            }
        }
        Self { graded: map }
    }

    /// The trivial filtration of an `n`-dimensional space concentrated in degree `jump`.
    pub fn concentrated(jump: i64, n: usize) -> Self {
        Self::new([(jump, n)])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds the profile from `dim Fil^i` for every listed `i`; dimensions
    /// must be non-increasing in `i`, the first one is the total dimension and
    /// `Fil^i = 0` beyond the last listed index.
    pub fn from_fil_dims(dims: &[(i64, usize)]) -> Result<Self> {
        let mut graded = Vec::new();
        for (k, &(i, n)) in dims.iter().enumerate() {
            let next = dims.get(k + 1).map(|&(_, m)| m).unwrap_or(0);
            if next > n {
                return Err(Error::Invariant(format!("filtration increases after index {i}")));
            }
            if let Some(&(j, _)) = dims.get(k + 1) {
                if j != i + 1 {
                    return Err(Error::Invariant("filtration indices must be consecutive".into()));
                }
            }
            graded.push((i, n - next));
        }
        Ok(Self::new(graded))
    }

    pub fn total_dim(&self) -> usize {
        self.graded.values().sum()
    }

    pub fn graded(&self) -> &BTreeMap<i64, usize> {
        &self.graded
    }

    pub fn get(&self, jump: i64) -> usize {
        self.graded.get(&jump).copied().unwrap_or(0)
    }

    pub fn jumps(&self) -> impl Iterator<Item = i64> + '_ {
        self.graded.keys().copied()
    }

    /// `dim Fil^i`.
    pub fn fil_dim(&self, i: i64) -> usize {
        self.graded.range(i..).map(|(_, n)| n).sum()
    }

    /// `(−i_1^(n_1), ..., −i_m^(n_m))` for jumps `i_1 < ... < i_m`.
    pub fn type_of(&self) -> NewtonVector {
        let entries = self.graded.iter().flat_map(|(&i, &n)| std::iter::repeat_n(int(-i), n)).collect();
        NewtonVector::new(entries).expect("ascending jumps give non-increasing type")
    }

    /// `Σ i · dim gr^i`.
    pub fn degree(&self) -> i64 {
        self.graded.iter().map(|(&i, &n)| i * n as i64).sum()
    }

    pub fn is_subprofile_of(&self, other: &Self) -> bool {
        self.graded.iter().all(|(&i, &n)| n <= other.get(i))
    }

    /// Componentwise difference `n_i − n'_i`.
    pub fn quotient_profile(&self, sub: &Self) -> Result<Self> {
        if !sub.is_subprofile_of(self) {
            return Err(Error::Domain(format!("{sub} is not componentwise below {self}")));
        }
        Ok(Self::new(self.graded.iter().map(|(&i, &n)| (i, n - sub.get(i)))))
    }

    /// Componentwise sum, the profile of a direct sum.
    pub fn sum(&self, other: &Self) -> Self {
        Self::new(self.graded.iter().chain(other.graded.iter()).map(|(&i, &n)| (i, n)))
    }

    /// Shifts every jump by `m`.
    pub fn shift(&self, m: i64) -> Self {
        Self::new(self.graded.iter().map(|(&i, &n)| (i + m, n)))
    }
}

/// Outcome of comparing a subspace's degree with the type of the ambient filtration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubspaceBound {
    /// `−deg(sub) ≤ type(F)(dim sub)`.
    pub holds: bool,
    /// `type(sub)` equals `type(F)` restricted to `[0, dim sub]`.
    pub equality: bool,
}

/// Degree bound for a subspace with induced filtration.
///
/// `sub` must be a legal profile of a subspace: componentwise below `f`.
pub fn subspace_degree_bound(f: &GradedProfile, sub: &GradedProfile) -> Result<SubspaceBound> {
    if !sub.is_subprofile_of(f) {
        return Err(Error::Precondition(format!("{sub} is not a subobject profile of {f}")));
    }
    let tf = f.type_of().to_polygon();
    let n_sub = from_usize(sub.total_dim());
    let bound: Rational = tf.eval(&n_sub)?;
    let holds = int(-sub.degree()) <= bound;
    let equality = sub.type_of().to_polygon() == tf.restrict(&n_sub)?;
    Ok(SubspaceBound { holds, equality })
}

impl fmt::Display for GradedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.graded.iter().map(|(i, n)| format!("{i}:{n}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for GradedProfile {
    type Err = Error;

    /// `jump:dim` comma list; the empty string is the zero profile.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::zero());
        }
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (i, n) =
                part.split_once(':').ok_or_else(|| Error::Parse(format!("expected jump:dim, got {part:?}")))?;
            let i: i64 = i.trim().parse().map_err(|_| Error::Parse(format!("bad jump {i:?}")))?;
            let n: usize = n.trim().parse().map_err(|_| Error::Parse(format!("bad dimension {n:?}")))?;
            if n == 0 {
                return Err(Error::Parse(format!("zero graded dimension at jump {i}")));
            }
            if pairs.iter().any(|&(j, _)| j == i) {
                return Err(Error::Parse(format!("jump {i} listed twice")));
            }
            pairs.push((i, n));
        }
        Ok(Self::new(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(s: &str) -> GradedProfile {
        s.parse().unwrap()
    }

    #[test]
    fn types() {
        assert_eq!(gp("-1:2,0:1").type_of().to_string(), "(1,1,0)");
        assert_eq!(gp("0:4").type_of().to_string(), "(0,0,0,0)");
        assert_eq!(gp("-2:1,1:1").type_of().to_string(), "(2,-1)");
    }

    #[test]
    fn degrees() {
        assert_eq!(gp("-1:2,0:1").degree(), -2);
        assert_eq!(gp("0:5").degree(), 0);
        assert_eq!(gp("1:3").degree(), 3);
    }

    #[test]
    fn subspace_bound() {
        let f = gp("-1:2,0:1");
        assert_eq!(subspace_degree_bound(&f, &gp("0:1")).unwrap(), SubspaceBound { holds: true, equality: false });
        assert_eq!(subspace_degree_bound(&f, &f).unwrap(), SubspaceBound { holds: true, equality: true });
        assert_eq!(subspace_degree_bound(&f, &gp("-1:1")).unwrap(), SubspaceBound { holds: true, equality: true });
        assert!(subspace_degree_bound(&f, &gp("1:1")).is_err());
    }

    #[test]
    fn quotients() {
        assert_eq!(gp("-1:2,0:1").quotient_profile(&gp("-1:1")).unwrap(), gp("-1:1,0:1"));
        assert_eq!(gp("-1:2,0:1").quotient_profile(&gp("-1:2,0:1")).unwrap(), GradedProfile::zero());
        assert_eq!(gp("-1:2,0:2").quotient_profile(&gp("0:2")).unwrap(), gp("-1:2"));
        assert!(gp("0:1").quotient_profile(&gp("0:2")).is_err());
    }

    #[test]
    fn fil_dims_round_trip() {
        let f = gp("-1:2,0:1");
        assert_eq!(f.fil_dim(-1), 3);
        assert_eq!(f.fil_dim(0), 1);
        assert_eq!(f.fil_dim(1), 0);
        assert_eq!(GradedProfile::from_fil_dims(&[(-1, 3), (0, 1)]).unwrap(), f);
        assert!(GradedProfile::from_fil_dims(&[(-1, 1), (0, 2)]).is_err());
    }

    #[test]
    fn text_form() {
        assert_eq!(gp("0:1,-1:2").to_string(), "-1:2,0:1");
        assert!("-1:0".parse::<GradedProfile>().is_err());
        assert!("x".parse::<GradedProfile>().is_err());
        assert_eq!(gp("").total_dim(), 0);
    }
}
