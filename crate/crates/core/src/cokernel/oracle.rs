//! Brute-force image membership over Laurent polynomials in one variable.
//!
//! Tuples are enumerated by an index whose base-`p` digits are the
//! coefficients: the first variable is most significant, and inside one
//! entry the coefficient of `t^{bound}` is most significant. The returned
//! witness is always the one of smallest index, whatever the number of jobs.

use std::collections::HashMap;
use std::thread;

use crate::addpoly::AdditivePoly;
use crate::field_tower::TowerElement;

use super::CokernelError;

/// Largest number of tuples a single-target scan may visit.
pub const ORACLE_LIMIT: u128 = 100_000_000;
/// Largest number of tuples an [`ImageTable`] may hold.
pub const TABLE_LIMIT: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Yes(Vec<TowerElement>),
    NoWithinBound,
}

impl OracleResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, OracleResult::Yes(_))
    }
}

struct Space<'a> {
    poly: &'a AdditivePoly,
    /// `t^e` for `e = -bound ..= bound`.
    powers: Vec<TowerElement>,
    total: u64,
}

impl<'a> Space<'a> {
    fn new(poly: &'a AdditivePoly, bound: u32, limit: u128) -> Result<Self, CokernelError> {
        let tower = poly.tower();
        if tower.depth() != 1 {
            return Err(CokernelError::UnsupportedTower(tower.depth()));
        }
        let digits = (2 * bound as u128 + 1) * poly.nvars() as u128;
        let total = (tower.p() as u128).checked_pow(digits.min(200) as u32).unwrap_or(u128::MAX);
        if total > limit {
            return Err(CokernelError::SearchTooLarge(total));
        }
        let b = bound as i64;
        let powers = (-b..=b).map(|e| tower.monomial(&[e])).collect();
        Ok(Space { poly, powers, total: total as u64 })
    }

    fn tuple(&self, mut index: u64) -> Vec<TowerElement> {
        let k = self.poly.tower();
        let p = k.p() as u64;
        let mut out = vec![k.zero(); self.poly.nvars()];
        for entry in out.iter_mut().rev() {
            for power in &self.powers {
                let c = index % p;
                index /= p;
                if c != 0 {
                    *entry = &*entry + &(&k.from_int(c as i64) * power);
                }
            }
        }
        out
    }

    fn image(&self, index: u64) -> TowerElement {
        self.poly.evaluate(&self.tuple(index)).expect("arity matches")
    }

    /// Splits `0..total` into at most `jobs` contiguous ranges.
    fn ranges(&self, jobs: usize) -> Vec<(u64, u64)> {
        let jobs = jobs.max(1) as u64;
        let chunk = self.total.div_ceil(jobs).max(1);
        (0..jobs).map(|j| (j * chunk, ((j + 1) * chunk).min(self.total))).filter(|(lo, hi)| lo < hi).collect()
    }
}

/// Whether `target` is `P(a)` for a tuple of Laurent polynomials supported
/// on `[-bound, bound]`.
pub fn oracle_image_contains(
    poly: &AdditivePoly,
    target: &TowerElement,
    bound: u32,
    jobs: usize,
) -> Result<OracleResult, CokernelError> {
    if target.tower() != poly.tower() {
        return Err(CokernelError::AddPoly(crate::addpoly::AddPolyError::TowerMismatch));
    }
    let space = Space::new(poly, bound, ORACLE_LIMIT)?;
    let hit = thread::scope(|scope| {
        let handles: Vec<_> = space
            .ranges(jobs)
            .into_iter()
            .map(|(lo, hi)| {
                let space = &space;
                scope.spawn(move || (lo..hi).find(|&i| &space.image(i) == target))
            })
            .collect();
        handles.into_iter().filter_map(|h| h.join().expect("oracle worker panicked")).min()
    });
    Ok(match hit {
        Some(i) => OracleResult::Yes(space.tuple(i)),
        None => OracleResult::NoWithinBound,
    })
}

/// The whole image of a bounded search space, for repeated queries.
pub struct ImageTable {
    tuples: Vec<Vec<TowerElement>>,
    images: HashMap<TowerElement, u64>,
    first_index: Vec<u64>,
}

impl ImageTable {
    pub fn build(poly: &AdditivePoly, bound: u32, jobs: usize) -> Result<Self, CokernelError> {
        let space = Space::new(poly, bound, TABLE_LIMIT)?;
        let parts: Vec<HashMap<TowerElement, u64>> = thread::scope(|scope| {
            let handles: Vec<_> = space
                .ranges(jobs)
                .into_iter()
                .map(|(lo, hi)| {
                    let space = &space;
                    scope.spawn(move || {
                        let mut m = HashMap::new();
                        for i in lo..hi {
                            m.entry(space.image(i)).or_insert(i);
                        }
                        m
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
        });
        let mut images: HashMap<TowerElement, u64> = HashMap::new();
        for part in parts {
            for (img, i) in part {
                images.entry(img).and_modify(|j| *j = (*j).min(i)).or_insert(i);
            }
        }
        let mut first_index: Vec<u64> = images.values().copied().collect();
        first_index.sort_unstable();
        let tuples = first_index.iter().map(|&i| space.tuple(i)).collect();
        Ok(ImageTable { tuples, images, first_index })
    }

    /// Number of distinct images.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn contains(&self, target: &TowerElement) -> OracleResult {
        match self.images.get(target) {
            Some(i) => {
                let pos = self.first_index.binary_search(i).expect("indices are recorded");
                OracleResult::Yes(self.tuples[pos].clone())
            }
            None => OracleResult::NoWithinBound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Tower;

    fn russell() -> AdditivePoly {
        let k = Tower::new(3, &["t"]).unwrap();
        AdditivePoly::new(&k, &["x", "y"], [(0, 0, k.one()), (0, 1, k.var(0)), (1, 1, k.from_int(-1))]).unwrap()
    }

    #[test]
    fn russell_examples() {
        let p = russell();
        let k = p.tower().clone();
        let target = k.parse("t^-1 + t^-2").unwrap();
        assert_eq!(
            oracle_image_contains(&p, &target, 1, 1).unwrap(),
            OracleResult::Yes(vec![k.parse("t^-1").unwrap(), k.zero()])
        );
        let miss = k.parse("t^-1").unwrap();
        assert_eq!(oracle_image_contains(&p, &miss, 2, 4).unwrap(), OracleResult::NoWithinBound);
    }

    #[test]
    fn identity_map_hits_everything() {
        let k = Tower::new(2, &["t"]).unwrap();
        let p = AdditivePoly::new(&k, &["x"], [(0, 0, k.one())]).unwrap();
        let target = k.parse("t + 1/t").unwrap();
        assert_eq!(oracle_image_contains(&p, &target, 1, 2).unwrap(), OracleResult::Yes(vec![target.clone()]));
        let table = ImageTable::build(&p, 2, 3).unwrap();
        assert_eq!(table.len(), 32);
        assert_eq!(table.contains(&target), OracleResult::Yes(vec![target]));
    }

    #[test]
    fn jobs_do_not_change_the_witness() {
        let p = russell();
        let k = p.tower().clone();
        let target = k.parse("t + t^3 + 2").unwrap();
        let one = oracle_image_contains(&p, &target, 1, 1).unwrap();
        assert!(one.is_yes());
        for jobs in [2, 3, 7] {
            assert_eq!(oracle_image_contains(&p, &target, 1, jobs).unwrap(), one);
        }
        assert_eq!(ImageTable::build(&p, 1, 5).unwrap().contains(&target), one);
    }

    #[test]
    fn guards() {
        let p = russell();
        assert!(matches!(oracle_image_contains(&p, &p.tower().one(), 9, 1), Err(CokernelError::SearchTooLarge(_))));
        let k2 = Tower::new(2, &["t", "u"]).unwrap();
        let q = AdditivePoly::new(&k2, &["x"], [(0, 0, k2.one())]).unwrap();
        assert_eq!(oracle_image_contains(&q, &k2.one(), 1, 1).unwrap_err(), CokernelError::UnsupportedTower(2));
    }
}
