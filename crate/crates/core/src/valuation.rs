//! The tower valuation and valuation bases over `k^{p^d}`.
//!
//! On `F_p(t_1..t_r)` the valuation takes a polynomial in the outermost
//! variable `t_r` to `(v(a_{i0}), i0)` where `i0` is the lowest index with a
//! nonzero coefficient, extended to fractions by `v(n/d) = v(n) - v(d)`. So
//! `v(t_i)` is the i-th unit vector and `Z^r` is ordered from the right.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field_tower::{Tower, TowerElement};
use crate::linalg::{self, Matrix};
use crate::valgroup::{ResidueClass, ValGroupElement, ValueGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValuationError {
    #[error("element {0} is zero")]
    ZeroElement(usize),
    #[error("elements are not linearly independent over k^(p^{0})")]
    NotIndependent(u32),
    #[error("valuations are not pairwise distinct modulo p^{0}")]
    NotValuationIndependent(u32),
    #[error("elements belong to different towers")]
    TowerMismatch,
}

/// A valuation: a value-group element, or `∞` for zero. `∞` is the greatest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Val {
    Finite(ValGroupElement),
    Infinite,
}

impl Val {
    pub fn finite(&self) -> Option<&ValGroupElement> {
        match self {
            Val::Finite(g) => Some(g),
            Val::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinite)
    }

    /// Sum with the `∞ + x = ∞` convention.
    pub fn add(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Finite(a), Val::Finite(b)) => Val::Finite(a + b),
            _ => Val::Infinite,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Finite(a), Val::Finite(b)) => a.cmp(b),
            (Val::Finite(_), Val::Infinite) => Ordering::Less,
            (Val::Infinite, Val::Finite(_)) => Ordering::Greater,
            (Val::Infinite, Val::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(g) => g.fmt(f),
            Val::Infinite => f.write_str("inf"),
        }
    }
}

/// The valuation of an element of its own tower.
pub fn val(a: &TowerElement) -> Val {
    match a.raw_valuation() {
        Some(v) => Val::Finite(ValGroupElement::new(v)),
        None => Val::Infinite,
    }
}

/// Finite valuation of a nonzero element.
pub(crate) fn val_nonzero(a: &TowerElement) -> ValGroupElement {
    ValGroupElement::new(a.raw_valuation().expect("nonzero element"))
}

/// Nonzero elements whose valuations are pairwise distinct modulo `p^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationBasis {
    elements: Vec<TowerElement>,
    d: u32,
    valuations: Vec<ValGroupElement>,
}

impl ValuationBasis {
    pub fn new(elements: Vec<TowerElement>, d: u32) -> Result<Self, ValuationError> {
        if let Some(i) = elements.iter().position(|e| e.is_zero()) {
            return Err(ValuationError::ZeroElement(i));
        }
        let valuations: Vec<_> = elements.iter().map(val_nonzero).collect();
        if !distinct_mod(&valuations, pd_of(&elements, d)) {
            return Err(ValuationError::NotValuationIndependent(d));
        }
        Ok(ValuationBasis { elements, d, valuations })
    }

    pub fn elements(&self) -> &[TowerElement] {
        &self.elements
    }

    pub fn valuations(&self) -> &[ValGroupElement] {
        &self.valuations
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn pd_of(elements: &[TowerElement], d: u32) -> u64 {
    elements.first().map_or(1, |e| e.frobenius_exponent(d))
}

fn distinct_mod(vals: &[ValGroupElement], pd: u64) -> bool {
    let classes: BTreeSet<ResidueClass> = vals.iter().map(|v| ResidueClass::new(v, pd)).collect();
    classes.len() == vals.len()
}

/// Result of [`ValuationContext::eliminate_to_valuation_basis`]:
/// `basis[i] = sum_j transform[i][j]^{p^d} * input[j]`.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub basis: ValuationBasis,
    pub transform: Matrix,
}

impl Elimination {
    /// Rebuilds the input from the basis through the inverse transform, with
    /// entries applied as `p^d`-th powers.
    pub fn reconstruct_input(&self, tower: &Tower) -> Option<Vec<TowerElement>> {
        let inv = linalg::inverse(tower, &self.transform)?;
        let inv_q = linalg::frobenius(&inv, self.basis.d);
        Some(
            inv_q
                .iter()
                .map(|row| row.iter().zip(self.basis.elements()).fold(tower.zero(), |acc, (a, c)| &acc + &(a * c)))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub samples: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexEquality {
    /// `[k : k^{p^d}]`, counted as the size of the monomial valuation basis.
    pub field_index: u64,
    /// `[Γ : p^d Γ]`, counted by enumerating residue classes.
    pub group_index: u64,
}

impl IndexEquality {
    pub fn agree(&self) -> bool {
        self.field_index == self.group_index
    }
}

/// A tower together with its valuation.
#[derive(Debug, Clone)]
pub struct ValuationContext {
    tower: Tower,
    group: ValueGroup,
}

impl ValuationContext {
    pub fn new(tower: &Tower) -> Self {
        ValuationContext { tower: tower.clone(), group: ValueGroup::for_depth(tower.depth()) }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn group(&self) -> &ValueGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn val(&self, a: &TowerElement) -> Val {
        val(a)
    }

    /// Samples random pairs and checks `w(ab) = w(a) + w(b)`,
    /// `w(a + b) >= min(w(a), w(b))` and `w(1) = 0`.
    pub fn valuation_axioms_check(&self, samples: usize, seed: u64) -> AxiomReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fail = |msg: String| AxiomReport { samples, passed: false, counterexample: Some(msg) };
        if val(&self.tower.one()) != Val::Finite(self.group.zero()) {
            return fail("w(1) != 0".into());
        }
        for _ in 0..samples {
            let a = self.sample(&mut rng);
            let b = self.sample(&mut rng);
            let (va, vb) = (val(&a), val(&b));
            if val(&(&a * &b)) != va.add(&vb) {
                return fail(format!("w(ab) != w(a) + w(b) for a = {a}, b = {b}"));
            }
            if val(&(&a + &b)) < va.clone().min(vb) {
                return fail(format!("w(a + b) < min for a = {a}, b = {b}"));
            }
        }
        AxiomReport { samples, passed: true, counterexample: None }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> TowerElement {
        match rng.gen_range(0..10) {
            0 => self.tower.zero(),
            // force cancellation of leading terms now and then
            1 if self.tower.depth() > 0 => {
                let x = self.tower.random(rng, 2);
                let m = self.tower.monomial(&vec![rng.gen_range(-2..=2); self.tower.depth()]);
                &(&x * &m) + &self.tower.from_int(rng.gen_range(0..self.tower.p() as i64))
            }
            _ => self.tower.random(rng, 3),
        }
    }

    /// The monomials `t^j`, `0 <= j_i < p^d`, in increasing valuation order.
    pub fn standard_basis(&self, d: u32) -> ValuationBasis {
        let pd = (self.tower.p() as u64).pow(d);
        let elements: Vec<TowerElement> =
            self.group.all_residues(pd).iter().map(|r| self.tower.monomial_with_valuation(r.rep())).collect();
        ValuationBasis::new(elements, d).expect("monomials have distinct valuations")
    }

    /// Iterated product construction: a `k^p`-valuation basis built one
    /// variable at a time as `{b x^j : 0 <= j < p}`, then raised to level `d`
    /// through `u_{ij} = g_i e_j^{p^{d-1}}`.
    pub fn product_construction(&self, d: u32) -> Vec<TowerElement> {
        let p = self.tower.p() as i64;
        let mut e = vec![self.tower.one()];
        for i in 0..self.tower.depth() {
            let x = self.tower.var(i);
            e = e.iter().flat_map(|b| (0..p).map(|j| b * &x.powi(j).unwrap()).collect::<Vec<_>>()).collect();
        }
        let mut g = e.clone();
        for level in 2..=d {
            g = g.iter().flat_map(|gi| e.iter().map(|ej| gi * &ej.pth_power(level - 1)).collect::<Vec<_>>()).collect();
        }
        if d == 0 {
            g = vec![self.tower.one()];
        }
        g
    }

    /// True iff the valuations are pairwise distinct modulo `p^d`.
    pub fn is_valuation_independent(&self, elems: &[TowerElement], d: u32) -> Result<bool, ValuationError> {
        self.check_elements(elems)?;
        let vals: Vec<_> = elems.iter().map(val_nonzero).collect();
        Ok(distinct_mod(&vals, (self.tower.p() as u64).pow(d)))
    }

    fn check_elements(&self, elems: &[TowerElement]) -> Result<(), ValuationError> {
        if elems.iter().any(|e| e.tower() != &self.tower) {
            return Err(ValuationError::TowerMismatch);
        }
        if let Some(i) = elems.iter().position(|e| e.is_zero()) {
            return Err(ValuationError::ZeroElement(i));
        }
        Ok(())
    }

    /// Coordinate matrix over `k`: row `i` holds `a_{ij}` with
    /// `b_i = sum_j a_{ij}^{p^d} u_j`, columns ordered by basis monomial.
    pub fn coordinate_matrix(&self, b: &[TowerElement], d: u32) -> (Vec<ValGroupElement>, Matrix) {
        let rows: Vec<BTreeMap<ValGroupElement, TowerElement>> = b.iter().map(|x| x.decompose(d)).collect();
        let cols: Vec<ValGroupElement> =
            rows.iter().flat_map(|r| r.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let m = rows
            .iter()
            .map(|r| cols.iter().map(|c| r.get(c).cloned().unwrap_or_else(|| self.tower.zero())).collect())
            .collect();
        (cols, m)
    }

    /// Turns a `k^{p^d}`-independent family into a valuation basis of the
    /// same `k^{p^d}`-span by successive elimination of minimal-valuation
    /// coordinates. Rows are processed in input order.
    pub fn eliminate_to_valuation_basis(&self, b: &[TowerElement], d: u32) -> Result<Elimination, ValuationError> {
        self.check_elements(b)?;
        let (_, coords) = self.coordinate_matrix(b, d);
        if linalg::rank(&self.tower, &coords) < b.len() {
            return Err(ValuationError::NotIndependent(d));
        }
        let q = (self.tower.p() as u64).pow(d);
        let n = b.len();
        let mut rows: Vec<BTreeMap<ValGroupElement, TowerElement>> = b.iter().map(|x| x.decompose(d)).collect();
        let mut transform = linalg::identity(&self.tower, n);
        for k in 0..n {
            // v(a^q u_j) = q v(a) + j; unique minimum since the j are distinct mod q
            let (pivot, pivot_coeff) = rows[k]
                .iter()
                .min_by(|(j1, a1), (j2, a2)| {
                    let v1 = &val_nonzero(a1).scale(q as i64) + j1;
                    let v2 = &val_nonzero(a2).scale(q as i64) + j2;
                    v1.cmp(&v2)
                })
                .map(|(j, a)| (j.clone(), a.clone()))
                .ok_or(ValuationError::NotIndependent(d))?;
            let pinv = pivot_coeff.inv().expect("stored coordinates are nonzero");
            for i in k + 1..n {
                let Some(a) = rows[i].get(&pivot) else { continue };
                let lambda = a * &pinv;
                let pivot_row = rows[k].clone();
                for (j, c) in pivot_row {
                    let entry = rows[i].remove(&j).unwrap_or_else(|| self.tower.zero());
                    let updated = &entry - &(&lambda * &c);
                    if !updated.is_zero() {
                        rows[i].insert(j, updated);
                    }
                }
                let tk = transform[k].clone();
                for (dst, src) in transform[i].iter_mut().zip(&tk) {
                    *dst = &*dst - &(&lambda * src);
                }
            }
        }
        let elements: Vec<TowerElement> =
            rows.iter().map(|r| crate::field_tower::recompose(&self.tower, r, d)).collect();
        let basis = ValuationBasis::new(elements, d).map_err(|_| ValuationError::NotIndependent(d))?;
        Ok(Elimination { basis, transform })
    }

    /// `[k : k^{p^d}]` and `[Γ : p^d Γ]`, computed independently.
    pub fn index_equality(&self, d: u32) -> IndexEquality {
        let pd = (self.tower.p() as u64).pow(d);
        IndexEquality {
            field_index: self.standard_basis(d).len() as u64,
            group_index: self.group.all_residues(pd).len() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, vars: &[&str]) -> ValuationContext {
        ValuationContext::new(&Tower::new(p, vars).unwrap())
    }

    fn g(v: &[i64]) -> ValGroupElement {
        ValGroupElement::new(v.to_vec())
    }

    #[test]
    fn val_examples() {
        let c3 = ctx(3, &["t"]);
        assert_eq!(c3.val(&c3.tower().var(0)), Val::Finite(g(&[1])));
        assert_eq!(c3.val(&c3.tower().zero()), Val::Infinite);
        let c2 = ctx(2, &["t"]);
        let a = c2.tower().parse("(t^2+t^3)/(1+t)").unwrap();
        assert_eq!(c2.val(&a), Val::Finite(g(&[2])));
        let c22 = ctx(2, &["t", "u"]);
        let b = c22.tower().parse("t*u^2 + t^3*u^2").unwrap();
        assert_eq!(c22.val(&b), Val::Finite(g(&[1, 2])));
        assert_eq!(c22.val(&c22.tower().parse("1/u + t").unwrap()), Val::Finite(g(&[0, -1])));
        let f5 = ctx(5, &[]);
        assert_eq!(f5.val(&f5.tower().from_int(3)), Val::Finite(g(&[0])));
    }

    #[test]
    fn axioms_small_cases() {
        let c3 = ctx(3, &["t"]);
        let t = c3.tower().var(0);
        assert_eq!(c3.val(&(&t + &(-&t))), Val::Infinite);
        let c2 = ctx(2, &["t"]);
        let u = c2.tower().parse("1+t").unwrap();
        assert_eq!(c2.val(&(&u * &u)), Val::Finite(g(&[0])));
        assert!(c3.valuation_axioms_check(300, 1).passed);
        assert!(ctx(2, &["t", "u"]).valuation_axioms_check(200, 2).passed);
    }

    #[test]
    fn standard_basis_examples() {
        let c2 = ctx(2, &["t"]);
        let b = c2.standard_basis(2);
        let names: Vec<String> = b.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["1", "t", "t^2", "t^3"]);
        assert_eq!(b.valuations(), &[g(&[0]), g(&[1]), g(&[2]), g(&[3])]);

        assert_eq!(ctx(3, &["t"]).standard_basis(1).len(), 3);

        let c22 = ctx(2, &["t", "u"]);
        let b = c22.standard_basis(1);
        let names: Vec<String> = b.elements().iter().map(|e| e.to_string()).collect();
        assert_eq!(names, ["1", "t", "u", "(t)*u"]);
        assert_eq!(b.valuations(), &[g(&[0, 0]), g(&[1, 0]), g(&[0, 1]), g(&[1, 1])]);
    }

    #[test]
    fn product_construction_matches_standard_basis() {
        for (p, vars) in [(2, vec!["t"]), (3, vec!["t"]), (2, vec!["t", "u"])] {
            let c = ctx(p, &vars);
            for d in 1..=3 {
                if p == 3 && vars.len() == 1 && d == 3 {
                    continue;
                }
                let prod: BTreeSet<String> = c.product_construction(d).iter().map(|e| e.to_string()).collect();
                let std: BTreeSet<String> = c.standard_basis(d).elements().iter().map(|e| e.to_string()).collect();
                assert_eq!(prod, std, "p={p} vars={vars:?} d={d}");
            }
        }
    }

    #[test]
    fn independence_examples() {
        let c2 = ctx(2, &["t"]);
        let k = c2.tower().clone();
        let p = |s: &str| k.parse(s).unwrap();
        assert!(c2.is_valuation_independent(&[p("1"), p("t")], 1).unwrap());
        assert!(!c2.is_valuation_independent(&[p("1"), p("1+t")], 1).unwrap());
        assert!(!c2.is_valuation_independent(&[p("t"), p("t^3")], 1).unwrap());
        assert_eq!(c2.is_valuation_independent(&[p("t"), p("0")], 1).unwrap_err(), ValuationError::ZeroElement(1));
    }

    #[test]
    fn elimination_examples() {
        let c2 = ctx(2, &["t"]);
        let k = c2.tower().clone();
        let p = |s: &str| k.parse(s).unwrap();

        let e = c2.eliminate_to_valuation_basis(&[p("1"), p("1+t")], 1).unwrap();
        assert_eq!(e.basis.elements(), &[p("1"), p("t")]);
        assert_eq!(e.transform, vec![vec![p("1"), p("0")], vec![p("1"), p("1")]]);

        let e = c2.eliminate_to_valuation_basis(&[p("t")], 1).unwrap();
        assert_eq!(e.basis.elements(), &[p("t")]);
        assert_eq!(e.transform, vec![vec![p("1")]]);

        let e = c2.eliminate_to_valuation_basis(&[p("t"), p("t+t^2")], 1).unwrap();
        assert_eq!(e.basis.elements(), &[p("t"), p("t^2")]);
        assert_eq!(e.transform, vec![vec![p("1"), p("0")], vec![p("1"), p("1")]]);
        assert_eq!(e.reconstruct_input(&k).unwrap(), vec![p("t"), p("t+t^2")]);
    }

    #[test]
    fn elimination_rejects_dependent_input() {
        let c2 = ctx(2, &["t"]);
        let k = c2.tower().clone();
        let p = |s: &str| k.parse(s).unwrap();
        // t^2 * t = t^3: dependent over k^2
        assert_eq!(
            c2.eliminate_to_valuation_basis(&[p("t"), p("t^3")], 1).unwrap_err(),
            ValuationError::NotIndependent(1)
        );
        assert_eq!(
            c2.eliminate_to_valuation_basis(&[p("1"), p("t"), p("1+t^5")], 1).unwrap_err(),
            ValuationError::NotIndependent(1)
        );
    }

    #[test]
    fn index_equality_examples() {
        let e = ctx(3, &["t"]).index_equality(1);
        assert_eq!((e.field_index, e.group_index), (3, 3));
        let e = ctx(2, &["t", "u"]).index_equality(1);
        assert_eq!((e.field_index, e.group_index), (4, 4));
        let e = ctx(5, &[]).index_equality(1);
        assert_eq!((e.field_index, e.group_index), (1, 1));
    }
}
