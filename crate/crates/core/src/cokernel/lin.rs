//! One-variable additive polynomials as `pexp -> coeff` maps.

use std::collections::BTreeMap;

use crate::addpoly::AdditivePoly;
use crate::field_tower::{Tower, TowerElement};

pub(crate) type Lin = BTreeMap<u32, TowerElement>;

pub(crate) fn of_var(p: &AdditivePoly, var: usize) -> Lin {
    p.var_terms(var).map(|(j, c)| (j, c.clone())).collect()
}

pub(crate) fn of_univariate(p: &AdditivePoly) -> Lin {
    of_var(p, 0)
}

pub(crate) fn add_into(acc: &mut Lin, other: &Lin) {
    for (j, c) in other {
        let sum = match acc.remove(j) {
            Some(a) => &a + c,
            None => c.clone(),
        };
        if !sum.is_zero() {
            acc.insert(*j, sum);
        }
    }
}

/// `l(r X)`: coefficient `c_j r^{p^j}`.
pub(crate) fn scale_input(l: &Lin, r: &TowerElement) -> Lin {
    l.iter().map(|(&j, c)| (j, c * &r.pth_power(j))).filter(|(_, c)| !c.is_zero()).collect()
}

/// `l(u X^{p^e})`: coefficient `c_j u^{p^j}` moved to p-exponent `j + e`.
pub(crate) fn substitute(l: &Lin, u: &TowerElement, e: u32) -> Lin {
    l.iter().map(|(&j, c)| (j + e, c * &u.pth_power(j))).collect()
}

pub(crate) fn to_poly(tower: &Tower, l: &Lin) -> AdditivePoly {
    AdditivePoly::univariate(tower, l.iter().map(|(&j, c)| (j, c.clone()))).expect("nonzero one-variable polynomial")
}
