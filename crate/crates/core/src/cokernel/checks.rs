//! Sampled checks of the valuation identity and of non-membership.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::addpoly::AdditivePoly;
use crate::field_tower::{Tower, TowerElement};
use crate::valgroup::ValGroupElement;
use crate::valuation::{val, val_nonzero, Val};

use super::{combine, CokernelCertificate, CokernelError};

/// An element of valuation exactly `gamma`: `t^gamma` times a unit.
fn with_valuation<R: Rng>(tower: &Tower, gamma: &ValGroupElement, rng: &mut R) -> TowerElement {
    let depth = tower.depth();
    let mut unit = tower.from_int(rng.gen_range(1..tower.p() as i64));
    for _ in 0..rng.gen_range(0..3) {
        // monomials with nonnegative exponents and a positive outermost one
        let mut exps: Vec<i64> = (0..depth).map(|_| rng.gen_range(0..3)).collect();
        exps[depth - 1] += 1;
        let c = tower.from_int(rng.gen_range(0..tower.p() as i64));
        unit = &unit + &(&c * &tower.monomial(&exps));
    }
    &unit * &tower.monomial_with_valuation(gamma)
}

/// `n` random entries, each zero with probability 1/8 and otherwise of
/// valuation with every coordinate in `[lo, hi]`.
pub fn random_tuple<R: Rng>(tower: &Tower, n: usize, lo: i64, hi: i64, rng: &mut R) -> Vec<TowerElement> {
    (0..n)
        .map(|_| {
            if rng.gen_range(0..8) == 0 {
                tower.zero()
            } else {
                let gamma = ValGroupElement::new((0..tower.depth()).map(|_| rng.gen_range(lo..=hi)).collect());
                with_valuation(tower, &gamma, rng)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub samples: usize,
    /// Samples with `v(Q(a)) < C₀`.
    pub checked: usize,
    pub skipped: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

/// For random tuples with `v(Q(a)) < C₀`, checks that
/// `v(Q(a)) = v(b_i) + p^d v(a_i)` for exactly one `i`.
pub fn tt_valuation_identity_check(
    q: &[AdditivePoly],
    c0: &ValGroupElement,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport, CokernelError> {
    let poly = combine(q)?;
    let tower = poly.tower().clone();
    if tower.depth() == 0 {
        return Err(CokernelError::TrivialTower);
    }
    let lead = poly.principal_part();
    let p = tower.p() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IdentityReport { samples, checked: 0, skipped: 0, passed: true, counterexample: None };
    for _ in 0..samples {
        let a = random_tuple(&tower, poly.nvars(), -30, 30, &mut rng);
        let Val::Finite(va) = val(&poly.evaluate(&a)?) else {
            report.skipped += 1;
            continue;
        };
        if va >= *c0 {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let hits = lead
            .terms
            .iter()
            .filter(|lt| !a[lt.var].is_zero())
            .filter(|lt| {
                let rhs = &val_nonzero(&lt.coeff) + &val_nonzero(&a[lt.var]).scale(p.pow(lt.m));
                rhs == va
            })
            .count();
        if hits != 1 {
            let shown: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            report.passed = false;
            report.counterexample = Some(format!("a = ({}), v(Q(a)) = {va}, matches = {hits}", shown.join(", ")));
            break;
        }
    }
    Ok(report)
}

/// Structural checks on the representatives of an infinite-cokernel
/// certificate: strictly descending valuations below `C₀`, all in the
/// missing class, and `v(e_i - e_j) = v(e_j)` for `i < j`.
pub fn check_representatives(cert: &CokernelCertificate) -> bool {
    let Some(ell) = &cert.missing_residue else {
        return cert.representatives.is_empty();
    };
    let vals: Vec<Val> = cert.representatives.iter().map(val).collect();
    let below = vals.iter().all(|v| matches!(v, Val::Finite(g) if *g < cert.c0 && ell.contains(g)));
    let descending = vals.windows(2).all(|w| w[0] > w[1]);
    let differences = (0..vals.len())
        .all(|i| (i + 1..vals.len()).all(|j| val(&(&cert.representatives[i] - &cert.representatives[j])) == vals[j]));
    below && descending && differences
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonMembershipReport {
    pub samples: usize,
    /// Pairs `(i, j)` with `P(a) = e_i - e_j` for some sampled `a`.
    pub hits: Vec<(usize, usize)>,
}

impl NonMembershipReport {
    pub fn passed(&self) -> bool {
        self.hits.is_empty()
    }
}

/// Evaluates `P` on random tuples and looks for any `e_i - e_j`, `i < j`.
pub fn sampled_non_membership(
    poly: &AdditivePoly,
    reps: &[TowerElement],
    samples: usize,
    seed: u64,
) -> Result<NonMembershipReport, CokernelError> {
    let tower = poly.tower().clone();
    if tower.depth() == 0 {
        return Err(CokernelError::TrivialTower);
    }
    let mut diffs = HashMap::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            diffs.entry(&reps[i] - &reps[j]).or_insert((i, j));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = Vec::new();
    for _ in 0..samples {
        let a = random_tuple(&tower, poly.nvars(), -30, 30, &mut rng);
        if let Some(&pair) = diffs.get(&poly.evaluate(&a)?) {
            hits.push(pair);
        }
    }
    hits.sort_unstable();
    hits.dedup();
    Ok(NonMembershipReport { samples, hits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cokernel::certify_infinite_cokernel;

    #[test]
    fn random_tuples_have_requested_valuations() {
        let k = Tower::new(3, &["t", "u"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            for x in random_tuple(&k, 3, -5, 5, &mut rng) {
                if let Val::Finite(g) = val(&x) {
                    assert!(g.coords().iter().all(|c| (-5..=5).contains(c)));
                }
            }
        }
    }

    #[test]
    fn single_polynomial_identity() {
        let k = Tower::new(3, &["t"]).unwrap();
        let g = AdditivePoly::univariate(&k, [(0, k.one()), (1, k.var(0))]).unwrap();
        let a = k.parse("1/t").unwrap();
        let img = g.evaluate(std::slice::from_ref(&a)).unwrap();
        assert_eq!(val(&img), Val::Finite(ValGroupElement::new(vec![-2])));
        let c0 = ValGroupElement::new(vec![-3]);
        let report = tt_valuation_identity_check(&[g], &c0, 500, 1).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.checked > 0);
    }

    #[test]
    fn russell_sampled_checks() {
        let k = Tower::new(3, &["t"]).unwrap();
        let p =
            AdditivePoly::new(&k, &["x", "y"], [(0, 0, k.one()), (0, 1, k.var(0)), (1, 1, k.from_int(-1))]).unwrap();
        let cert = certify_infinite_cokernel(&p, 6, false).unwrap();
        assert!(check_representatives(&cert));
        let report = tt_valuation_identity_check(&cert.dk.g, &cert.c0, 1000, 9).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(sampled_non_membership(&p, &cert.representatives, 1000, 5).unwrap().passed());
    }
}
