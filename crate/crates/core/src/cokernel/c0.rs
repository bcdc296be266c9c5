//! The constant `C₀` below which `v(P(a)) = v(c_i) + p^{m_i} v(a_i)`.
//!
//! Each existential choice in the recursion is resolved by
//! [`ValueGroup::max_scaled_below`]; a choice with no constraints is `0`.

use std::collections::HashMap;

use crate::addpoly::AdditivePoly;
use crate::valgroup::{ValGroupElement, ValueGroup};
use crate::valuation::val_nonzero;

use super::CokernelError;

/// `C₀` for a polynomial whose leading-term progressions are disjoint.
pub fn lemma_constant(poly: &AdditivePoly) -> Result<ValGroupElement, CokernelError> {
    if poly.tower().depth() == 0 {
        return Err(CokernelError::TrivialTower);
    }
    if !poly.progressions_disjoint() {
        return Err(CokernelError::HypothesisUnverified);
    }
    let nvars = poly.nvars();
    let mut solver = Solver {
        poly,
        group: ValueGroup::for_depth(poly.tower().depth()),
        p: poly.tower().p() as u64,
        memo: HashMap::new(),
    };
    Ok(solver.constant((1u32 << nvars) - 1))
}

/// `C₀` for a list of one-variable polynomials of common degree `p^d`
/// with leading valuations distinct modulo `p^d`, read as
/// `Q(T_1..T_s) = sum g_i(T_i)`.
pub fn c0_constant(q: &[AdditivePoly]) -> Result<ValGroupElement, CokernelError> {
    let combined = super::combine(q)?;
    let pp = combined.principal_part();
    if pp.terms.iter().any(|t| t.m != pp.d()) {
        return Err(CokernelError::NotDkShaped("degrees differ".into()));
    }
    lemma_constant(&combined)
}

struct Solver<'a> {
    poly: &'a AdditivePoly,
    group: ValueGroup,
    p: u64,
    memo: HashMap<u32, ValGroupElement>,
}

struct Lead {
    m: u32,
    v: ValGroupElement,
}

impl Solver<'_> {
    fn below(&self, n: u64, bound: &ValGroupElement) -> ValGroupElement {
        self.group.max_scaled_below(n, bound).expect("nontrivial value group")
    }

    fn lead(&self, var: usize) -> Lead {
        let (m, c) = self.poly.var_terms(var).last().expect("every variable has a term");
        Lead { m, v: val_nonzero(c) }
    }

    fn constant(&mut self, mask: u32) -> ValGroupElement {
        if let Some(c) = self.memo.get(&mask) {
            return c.clone();
        }
        let vars: Vec<usize> = (0..self.poly.nvars()).filter(|i| mask & (1 << i) != 0).collect();
        let c = if vars.len() == 1 { self.single(vars[0]) } else { self.multi(mask, &vars) };
        self.memo.insert(mask, c.clone());
        c
    }

    fn single(&self, var: usize) -> ValGroupElement {
        let Lead { m, v: vm } = self.lead(var);
        let pm = self.p.pow(m);
        let terms: Vec<(u32, ValGroupElement)> = self.poly.var_terms(var).map(|(i, b)| (i, val_nonzero(b))).collect();
        let a = terms
            .iter()
            .filter(|(i, _)| *i != m)
            .map(|(i, vb)| self.below(pm - self.p.pow(*i), &(vb - &vm)))
            .min()
            .unwrap_or_else(|| self.group.zero());
        let b = terms.iter().map(|(i, vb)| &a.scale(self.p.pow(*i) as i64) + vb).min().expect("at least one term");
        self.group.find_below(&b).expect("nontrivial value group")
    }

    fn multi(&mut self, mask: u32, vars: &[usize]) -> ValGroupElement {
        let leads: Vec<Lead> = vars.iter().map(|&i| self.lead(i)).collect();

        // non-principal monomials lambda T_j^{p^e}, e < m_j, with their a_lambda
        let mut lower = Vec::new();
        for (k, &j) in vars.iter().enumerate() {
            let Lead { m, v: vc } = &leads[k];
            for (e, lambda) in self.poly.var_terms(j).filter(|(e, _)| e < m) {
                let vl = val_nonzero(lambda);
                let a = self.below(self.p.pow(*m) - self.p.pow(e), &(&vl - vc));
                lower.push((e, vl, a));
            }
        }

        let c3 = lower
            .iter()
            .flat_map(|(e, vl, a)| {
                let rhs = vl + &a.scale(self.p.pow(*e) as i64);
                leads.iter().map(move |li| (li, rhs.clone()))
            })
            .map(|(li, rhs)| self.below(self.p.pow(li.m), &(&rhs - &li.v)))
            .min()
            .unwrap_or_else(|| self.group.zero());

        let mut c2: Option<ValGroupElement> = None;
        for li in &leads {
            for lj in &leads {
                let bound = &(&li.v + &c3.scale(self.p.pow(li.m) as i64)) - &lj.v;
                let cand = self.below(self.p.pow(lj.m), &bound);
                c2 = Some(c2.map_or(cand.clone(), |c| c.min(cand)));
            }
        }
        let c2 = c2.expect("at least two variables");

        let c1 = vars
            .iter()
            .flat_map(|&i| self.poly.var_terms(i).collect::<Vec<_>>())
            .map(|(j, c)| &val_nonzero(c) + &c2.scale(self.p.pow(j) as i64))
            .min()
            .expect("at least one term");

        let mut c0 = c1;
        // every proper nonempty sub-mask
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            let b = self.constant(sub);
            if b < c0 {
                c0 = b;
            }
            sub = (sub - 1) & mask;
        }
        c0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::Tower;

    fn g(v: &[i64]) -> ValGroupElement {
        ValGroupElement::new(v.to_vec())
    }

    #[test]
    fn single_variable_examples() {
        let k = Tower::new(3, &["t"]).unwrap();
        let p = AdditivePoly::univariate(&k, [(0, k.one()), (1, k.var(0))]).unwrap();
        assert_eq!(lemma_constant(&p).unwrap(), g(&[-3]));
        let cube = AdditivePoly::univariate(&k, [(1, k.one())]).unwrap();
        assert_eq!(lemma_constant(&cube).unwrap(), g(&[-1]));
    }

    #[test]
    fn russell_dk_output() {
        let k = Tower::new(3, &["t"]).unwrap();
        let g1 = AdditivePoly::univariate(&k, [(0, k.one()), (1, k.var(0))]).unwrap();
        let g2 = AdditivePoly::univariate(&k, [(1, k.from_int(-1))]).unwrap();
        assert_eq!(c0_constant(&[g1, g2]).unwrap(), g(&[-6]));
    }

    #[test]
    fn rejects_overlapping_progressions() {
        let k = Tower::new(3, &["t"]).unwrap();
        let g1 = AdditivePoly::univariate(&k, [(1, k.one())]).unwrap();
        let g2 = AdditivePoly::univariate(&k, [(1, k.from_int(2))]).unwrap();
        assert_eq!(c0_constant(&[g1, g2]).unwrap_err(), CokernelError::HypothesisUnverified);
    }
}
