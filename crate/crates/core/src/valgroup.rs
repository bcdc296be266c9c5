//! The value groups `Z^r`, ordered lexicographically with the rightmost
//! coordinate most significant.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValGroupError {
    #[error("value-group elements have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("the value group is trivial")]
    TrivialGroup,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// An element of `Z^r`.
///
/// The `Ord` impl compares the last coordinate first and panics on a length
/// mismatch; [`ValGroupElement::try_compare`] is the checked form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValGroupElement(Vec<i64>);

impl ValGroupElement {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "value-group elements have rank >= 1");
        ValGroupElement(coords)
    }

    pub fn zero(rank: usize) -> Self {
        ValGroupElement(vec![0; rank.max(1)])
    }

    /// The i-th unit vector.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank.max(1)];
        v[i] = 1;
        ValGroupElement(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn try_compare(&self, other: &Self) -> Result<Ordering, ValGroupError> {
        if self.0.len() != other.0.len() {
            return Err(ValGroupError::LengthMismatch(self.0.len(), other.0.len()));
        }
        Ok(self.0.iter().rev().cmp(other.0.iter().rev()))
    }

    /// True iff every coordinate of `self - other` is divisible by `modulus`.
    pub fn congruent(&self, other: &Self, modulus: u64) -> bool {
        let m = modulus as i64;
        self.0.iter().zip(&other.0).all(|(a, b)| (a - b).rem_euclid(m) == 0)
    }

    pub fn scale(&self, n: i64) -> Self {
        ValGroupElement(self.0.iter().map(|x| x * n).collect())
    }
}

impl PartialOrd for ValGroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValGroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_compare(other).expect("comparing value-group elements of different rank")
    }
}

impl fmt::Display for ValGroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for ValGroupElement {
    type Err = ValGroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ValGroupError::InvalidArgument(format!("not a value-group tuple: {s:?}"));
        let inner = s.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let coords =
            inner.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
        Ok(ValGroupElement::new(coords))
    }
}

impl Add for &ValGroupElement {
    type Output = ValGroupElement;

    fn add(self, rhs: &ValGroupElement) -> ValGroupElement {
        assert_eq!(self.0.len(), rhs.0.len());
        ValGroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ValGroupElement {
    type Output = ValGroupElement;

    fn sub(self, rhs: &ValGroupElement) -> ValGroupElement {
        assert_eq!(self.0.len(), rhs.0.len());
        ValGroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ValGroupElement {
    type Output = ValGroupElement;

    fn neg(self) -> ValGroupElement {
        self.scale(-1)
    }
}

impl Mul<&ValGroupElement> for i64 {
    type Output = ValGroupElement;

    fn mul(self, rhs: &ValGroupElement) -> ValGroupElement {
        rhs.scale(self)
    }
}

/// A coset of `p^d Γ` in `Γ`, represented by its componentwise reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    modulus: u64,
    rep: ValGroupElement,
}

impl ResidueClass {
    pub fn new(g: &ValGroupElement, modulus: u64) -> Self {
        assert!(modulus >= 1);
        let m = modulus as i64;
        ResidueClass { modulus, rep: ValGroupElement(g.0.iter().map(|x| x.rem_euclid(m)).collect()) }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rep(&self) -> &ValGroupElement {
        &self.rep
    }

    pub fn contains(&self, g: &ValGroupElement) -> bool {
        g.rank() == self.rep.rank() && g.congruent(&self.rep, self.modulus)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.rep, self.modulus)
    }
}

/// The value group of a tower: `Z^rank`, or the trivial group (stored as
/// rank 1 with every element zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueGroup {
    rank: usize,
    trivial: bool,
}

impl ValueGroup {
    /// `Z^rank`, `rank >= 1`.
    pub fn lattice(rank: usize) -> Self {
        assert!(rank >= 1);
        ValueGroup { rank, trivial: false }
    }

    pub fn trivial() -> Self {
        ValueGroup { rank: 1, trivial: true }
    }

    /// Value group of a tower of the given depth.
    pub fn for_depth(depth: usize) -> Self {
        if depth == 0 {
            Self::trivial()
        } else {
            Self::lattice(depth)
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Number of free coordinates.
    pub fn free_rank(&self) -> usize {
        if self.trivial {
            0
        } else {
            self.rank
        }
    }

    pub fn zero(&self) -> ValGroupElement {
        ValGroupElement::zero(self.rank)
    }

    fn check(&self, g: &ValGroupElement) -> Result<(), ValGroupError> {
        if g.rank() != self.rank {
            return Err(ValGroupError::LengthMismatch(self.rank, g.rank()));
        }
        Ok(())
    }

    /// Some `β < γ`: decrement the first coordinate.
    pub fn find_below(&self, g: &ValGroupElement) -> Result<ValGroupElement, ValGroupError> {
        if self.trivial {
            return Err(ValGroupError::TrivialGroup);
        }
        self.check(g)?;
        Ok(g - &ValGroupElement::unit(self.rank, 0))
    }

    /// `γ₀ = min{γ_1, ..., γ_r, 0}`; every `γ < γ₀` then has `n_i γ < γ_i`.
    pub fn uniform_below(&self, gammas: &[ValGroupElement], ns: &[u64]) -> Result<ValGroupElement, ValGroupError> {
        if gammas.len() != ns.len() {
            return Err(ValGroupError::LengthMismatch(gammas.len(), ns.len()));
        }
        if gammas.is_empty() {
            return Err(ValGroupError::InvalidArgument("empty list".into()));
        }
        if ns.contains(&0) {
            return Err(ValGroupError::InvalidArgument("multipliers must be positive".into()));
        }
        let mut m = self.zero();
        for g in gammas {
            self.check(g)?;
            if *g < m {
                m = g.clone();
            }
        }
        Ok(m)
    }

    /// A greatest-by-rule `a` with `n·a < bound`, `n >= 1`.
    ///
    /// Coordinates are fixed from the most significant one down: if the top
    /// coordinate of `bound` is a multiple of `n` the top coordinate of `a` is
    /// the quotient and the rest is chosen recursively; otherwise it is the
    /// floor quotient and the remaining coordinates are zero. In rank 1 this
    /// is the maximum `floor((bound - 1) / n)`.
    pub fn max_scaled_below(&self, n: u64, bound: &ValGroupElement) -> Result<ValGroupElement, ValGroupError> {
        if n == 0 {
            return Err(ValGroupError::InvalidArgument("multiplier must be positive".into()));
        }
        self.check(bound)?;
        if self.trivial {
            return if bound.0[0] > 0 { Ok(self.zero()) } else { Err(ValGroupError::TrivialGroup) };
        }
        let n = n as i64;
        let mut out = vec![0i64; self.rank];
        for k in (0..self.rank).rev() {
            let b = bound.0[k];
            if k == 0 {
                out[0] = (b - 1).div_euclid(n);
                break;
            }
            let q = b.div_euclid(n);
            out[k] = q;
            if q * n < b {
                break;
            }
        }
        Ok(ValGroupElement(out))
    }

    /// `count` elements `γ_1 > γ_2 > ...`, all below `gamma0` and congruent
    /// to `alpha0` modulo `pd`.
    pub fn descending_congruent(
        &self,
        alpha0: &ValGroupElement,
        gamma0: &ValGroupElement,
        pd: u64,
        count: usize,
    ) -> Result<Vec<ValGroupElement>, ValGroupError> {
        if self.trivial {
            return Err(ValGroupError::TrivialGroup);
        }
        if count == 0 {
            return Err(ValGroupError::InvalidArgument("count must be >= 1".into()));
        }
        if pd == 0 {
            return Err(ValGroupError::InvalidArgument("modulus must be positive".into()));
        }
        self.check(alpha0)?;
        self.check(gamma0)?;
        let delta = self.max_scaled_below(pd, &(gamma0 - alpha0))?;
        let step = ValGroupElement::unit(self.rank, 0).scale(pd as i64);
        let mut cur = alpha0 + &delta.scale(pd as i64);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(cur.clone());
            cur = &cur - &step;
        }
        Ok(out)
    }

    /// All classes of `Γ/p^dΓ`, in increasing order of their reduced
    /// representatives. There are `pd^{free_rank}` of them.
    pub fn all_residues(&self, pd: u64) -> Vec<ResidueClass> {
        all_residues(pd, self.free_rank(), self.rank)
    }
}

fn all_residues(pd: u64, m: usize, rank: usize) -> Vec<ResidueClass> {
    let rank = rank.max(m).max(1);
    let mut out = Vec::new();
    let total = pd.pow(m as u32);
    for idx in 0..total {
        let mut coords = vec![0i64; rank];
        let mut x = idx;
        // idx enumerates in rightmost-most-significant order
        for c in coords.iter_mut().take(m) {
            *c = (x % pd) as i64;
            x /= pd;
        }
        out.push(ResidueClass { modulus: pd, rep: ValGroupElement(coords) });
    }
    out
}

/// Classes of `Γ/p^dΓ` (effective rank `m`) not in `used`, ordered like the
/// value group. Elements of `used` with a different modulus never match.
pub fn missing_residues(used: &[ResidueClass], pd: u64, m: usize) -> Vec<ResidueClass> {
    let rank = used.iter().map(|r| r.rep.rank()).max().unwrap_or(m).max(m).max(1);
    all_residues(pd, m, rank).into_iter().filter(|c| !used.iter().any(|u| u.modulus == pd && u.rep == c.rep)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[i64]) -> ValGroupElement {
        ValGroupElement::new(v.to_vec())
    }

    #[test]
    fn compare_rightmost_first() {
        assert_eq!(g(&[5, 0]).try_compare(&g(&[-3, 1])).unwrap(), Ordering::Less);
        assert_eq!(g(&[2, 1]).try_compare(&g(&[7, 1])).unwrap(), Ordering::Less);
        assert_eq!(g(&[0, 0]).try_compare(&g(&[0, 0])).unwrap(), Ordering::Equal);
        assert_eq!(g(&[0]).try_compare(&g(&[0, 0])).unwrap_err(), ValGroupError::LengthMismatch(1, 2));
    }

    #[test]
    fn find_below_examples() {
        let z = ValueGroup::lattice(1);
        assert_eq!(z.find_below(&g(&[0])).unwrap(), g(&[-1]));
        assert_eq!(z.find_below(&g(&[-4])).unwrap(), g(&[-5]));
        assert_eq!(ValueGroup::lattice(2).find_below(&g(&[3, 2])).unwrap(), g(&[2, 2]));
        assert_eq!(ValueGroup::trivial().find_below(&g(&[0])).unwrap_err(), ValGroupError::TrivialGroup);
    }

    #[test]
    fn uniform_below_examples() {
        let z = ValueGroup::lattice(1);
        assert_eq!(z.uniform_below(&[g(&[3]), g(&[-2])], &[2, 5]).unwrap(), g(&[-2]));
        assert_eq!(z.uniform_below(&[g(&[1])], &[1]).unwrap(), g(&[0]));
        let z2 = ValueGroup::lattice(2);
        assert_eq!(z2.uniform_below(&[g(&[0, 1]), g(&[2, -1])], &[3, 3]).unwrap(), g(&[2, -1]));
        assert!(matches!(z.uniform_below(&[g(&[1])], &[1, 2]), Err(ValGroupError::LengthMismatch(1, 2))));
    }

    #[test]
    fn descending_congruent_examples() {
        let z = ValueGroup::lattice(1);
        assert_eq!(z.descending_congruent(&g(&[2]), &g(&[0]), 3, 2).unwrap(), vec![g(&[-1]), g(&[-4])]);
        assert_eq!(z.descending_congruent(&g(&[0]), &g(&[0]), 2, 1).unwrap(), vec![g(&[-2])]);
        let z2 = ValueGroup::lattice(2);
        assert_eq!(z2.descending_congruent(&g(&[1, 0]), &g(&[0, 0]), 2, 2).unwrap(), vec![g(&[-1, 0]), g(&[-3, 0])]);
        assert_eq!(
            ValueGroup::trivial().descending_congruent(&g(&[0]), &g(&[0]), 2, 1).unwrap_err(),
            ValGroupError::TrivialGroup
        );
    }

    #[test]
    fn missing_residue_examples() {
        let used = [ResidueClass::new(&g(&[1]), 3), ResidueClass::new(&g(&[0]), 3)];
        assert_eq!(missing_residues(&used, 3, 1), vec![ResidueClass::new(&g(&[2]), 3)]);
        let all2 = [ResidueClass::new(&g(&[0]), 2), ResidueClass::new(&g(&[1]), 2)];
        assert!(missing_residues(&all2, 2, 1).is_empty());
        assert_eq!(missing_residues(&[], 2, 1).len(), 2);
        assert_eq!(missing_residues(&[], 2, 1)[0], ResidueClass::new(&g(&[0]), 2));
        assert_eq!(ValueGroup::lattice(2).all_residues(3).len(), 9);
        assert_eq!(ValueGroup::trivial().all_residues(5).len(), 1);
    }

    #[test]
    fn max_scaled_below_rule() {
        let z = ValueGroup::lattice(1);
        assert_eq!(z.max_scaled_below(2, &g(&[-1])).unwrap(), g(&[-1]));
        assert_eq!(z.max_scaled_below(3, &g(&[-2])).unwrap(), g(&[-1]));
        assert_eq!(z.max_scaled_below(3, &g(&[0])).unwrap(), g(&[-1]));
        assert_eq!(z.max_scaled_below(3, &g(&[1])).unwrap(), g(&[0]));
        let z2 = ValueGroup::lattice(2);
        assert_eq!(z2.max_scaled_below(2, &g(&[-1, 0])).unwrap(), g(&[-1, 0]));
        assert_eq!(z2.max_scaled_below(2, &g(&[7, 3])).unwrap(), g(&[0, 1]));
        for b in [g(&[-1, 0]), g(&[7, 3]), g(&[0, -4]), g(&[5, 6])] {
            let a = z2.max_scaled_below(2, &b).unwrap();
            assert!(a.scale(2) < b);
        }
    }

    #[test]
    fn display_and_parse() {
        let x = g(&[3, -1]);
        assert_eq!(x.to_string(), "(3,-1)");
        assert_eq!("(3,-1)".parse::<ValGroupElement>().unwrap(), x);
        assert!("3,1".parse::<ValGroupElement>().is_err());
        assert_eq!(ResidueClass::new(&g(&[-1]), 3).to_string(), "(2) mod 3");
    }
}
