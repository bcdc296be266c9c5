//! Infinitude certificates for `k / P(k)`.
//!
//! [`dk_decompose`] rewrites `im P` as `g_1(k) + ... + g_s(k)` with all `g_i`
//! of degree `p^d` and leading valuations distinct modulo `p^d`. When
//! `s < p^{md}` some residue class `ℓ` misses every `v(b_i)`, and elements of
//! valuation `≡ ℓ` below the constant `C₀` lie outside the image; pairwise
//! differences of the emitted representatives therefore stay outside it too.

mod c0;
mod checks;
mod lin;
mod oracle;

use serde::Serialize;
use thiserror::Error;

use crate::addpoly::{AddPolyError, AdditivePoly, PolyJson};
use crate::field_tower::{Tower, TowerElement};
use crate::linalg::{self, Matrix};
use crate::valgroup::{missing_residues, ResidueClass, ValGroupElement, ValueGroup};
use crate::valuation::{val_nonzero, ValuationContext, ValuationError};

pub use c0::{c0_constant, lemma_constant};
pub use checks::{
    check_representatives, random_tuple, sampled_non_membership, tt_valuation_identity_check, IdentityReport,
    NonMembershipReport,
};
pub use oracle::{oracle_image_contains, ImageTable, OracleResult, ORACLE_LIMIT, TABLE_LIMIT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CokernelError {
    #[error("leading-term progressions overlap and nowhere-vanishing was not asserted")]
    HypothesisUnverified,
    #[error("principal part has degree p^0; the map is surjective")]
    DegreeZero,
    #[error("leading coefficients are linearly dependent over k^(p^d)")]
    LeadingCoefficientsDependent,
    #[error("the tower has no transcendental variable")]
    TrivialTower,
    #[error("input is not decomposition-shaped: {0}")]
    NotDkShaped(String),
    #[error("search space of {0} tuples exceeds the limit")]
    SearchTooLarge(u128),
    #[error("the oracle needs a tower of depth 1, got depth {0}")]
    UnsupportedTower(usize),
    #[error(transparent)]
    AddPoly(#[from] AddPolyError),
}

/// How the nowhere-vanishing hypothesis on the principal part was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    ProgressionsDisjoint,
    Asserted,
}

#[derive(Debug, Clone)]
pub struct DkDecomposition {
    pub d: u32,
    pub g: Vec<AdditivePoly>,
    /// `(b_i, v(b_i))`, the leading coefficients of `g`.
    pub leading: Vec<(TowerElement, ValGroupElement)>,
    pub r_matrix: Matrix,
    pub s_matrix: Matrix,
    pub h_tilde: Vec<AdditivePoly>,
    pub hypothesis: Hypothesis,
}

impl DkDecomposition {
    pub fn s(&self) -> usize {
        self.g.len()
    }

    pub fn tower(&self) -> &Tower {
        self.g[0].tower()
    }

    /// `Q(X_1..X_s) = sum g_i(X_i)`.
    pub fn q_poly(&self) -> AdditivePoly {
        combine(&self.g).expect("decomposition polynomials share a tower")
    }

    /// `r s = I`, `g_i(X) = sum_j h̃_j(r_ij X)` and `h̃_i(X) = sum_j g_j(s_ij X)`.
    pub fn identities_hold(&self) -> bool {
        let k = self.tower();
        let n = self.s();
        if linalg::mat_mul(k, &self.r_matrix, &self.s_matrix) != linalg::identity(k, n) {
            return false;
        }
        let g: Vec<lin::Lin> = self.g.iter().map(lin::of_univariate).collect();
        let h: Vec<lin::Lin> = self.h_tilde.iter().map(lin::of_univariate).collect();
        let forward = |i: usize| mix(&h, &self.r_matrix[i]);
        let backward = |i: usize| mix(&g, &self.s_matrix[i]);
        (0..n).all(|i| forward(i) == g[i] && backward(i) == h[i])
    }
}

/// `sum_j polys_j(row_j X)`.
fn mix(polys: &[lin::Lin], row: &[TowerElement]) -> lin::Lin {
    let mut acc = lin::Lin::new();
    for (l, r) in polys.iter().zip(row) {
        lin::add_into(&mut acc, &lin::scale_input(l, r));
    }
    acc
}

/// Sum of one-variable polynomials in fresh variables `X1, X2, ...`.
pub fn combine(polys: &[AdditivePoly]) -> Result<AdditivePoly, CokernelError> {
    let Some(first) = polys.first() else {
        return Err(CokernelError::NotDkShaped("empty list".into()));
    };
    if polys.iter().any(|q| q.nvars() != 1) {
        return Err(CokernelError::NotDkShaped("expected one-variable polynomials".into()));
    }
    let tower = first.tower();
    let vars: Vec<String> = (1..=polys.len()).map(|i| format!("X{i}")).collect();
    let terms = polys
        .iter()
        .enumerate()
        .flat_map(|(i, q)| q.var_terms(0).map(move |(j, c)| (i, j, c.clone())).collect::<Vec<_>>());
    Ok(AdditivePoly::new(tower, &vars, terms)?)
}

/// Decomposes `im P` into `s` polynomials of common degree `p^d`.
pub fn dk_decompose(poly: &AdditivePoly, assume_nowhere_vanishing: bool) -> Result<DkDecomposition, CokernelError> {
    let tower = poly.tower();
    if tower.depth() == 0 {
        return Err(CokernelError::TrivialTower);
    }
    let pp = poly.principal_part();
    let d = pp.d();
    if d == 0 {
        return Err(CokernelError::DegreeZero);
    }
    let hypothesis = if poly.progressions_disjoint() {
        Hypothesis::ProgressionsDisjoint
    } else if assume_nowhere_vanishing {
        Hypothesis::Asserted
    } else {
        return Err(CokernelError::HypothesisUnverified);
    };

    let ctx = ValuationContext::new(tower);
    let mut h_lin = Vec::new();
    for lt in &pp.terms {
        let f = lin::of_var(poly, lt.var);
        let e = d - lt.m;
        for u in ctx.standard_basis(e).elements() {
            h_lin.push(lin::substitute(&f, u, e));
        }
    }
    let c_tilde: Vec<TowerElement> = h_lin.iter().map(|h| h[&d].clone()).collect();
    let elim = ctx.eliminate_to_valuation_basis(&c_tilde, d).map_err(|e| match e {
        ValuationError::NotIndependent(_) | ValuationError::ZeroElement(_) => {
            CokernelError::LeadingCoefficientsDependent
        }
        ValuationError::NotValuationIndependent(_) | ValuationError::TowerMismatch => {
            unreachable!("elimination output is checked")
        }
    })?;
    let r_matrix = elim.transform;
    let s_matrix = linalg::inverse(tower, &r_matrix).expect("elimination transforms are unitriangular");

    let mut g = Vec::new();
    let mut leading = Vec::new();
    for (row, b) in r_matrix.iter().zip(elim.basis.elements()) {
        let gi = mix(&h_lin, row);
        debug_assert_eq!(gi.keys().last(), Some(&d));
        debug_assert_eq!(&gi[&d], b);
        leading.push((b.clone(), val_nonzero(b)));
        g.push(lin::to_poly(tower, &gi));
    }
    let h_tilde = h_lin.iter().map(|h| lin::to_poly(tower, h)).collect();
    Ok(DkDecomposition { d, g, leading, r_matrix, s_matrix, h_tilde, hypothesis })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    InfiniteCokernel,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct CokernelCertificate {
    pub verdict: Verdict,
    /// `s = sum_i p^{m(d - m_i)}`.
    pub s: u64,
    /// `p^{md}`.
    pub capacity: u64,
    /// Number of variables of the input polynomial.
    pub nvars: usize,
    pub missing_residue: Option<ResidueClass>,
    pub c0: ValGroupElement,
    pub representatives: Vec<TowerElement>,
    /// `(p^m - 1) | (r - 1)`, recorded when `s = p^{md}`.
    pub divisibility: Option<bool>,
    pub dk: DkDecomposition,
}

impl CokernelCertificate {
    pub fn pd(&self) -> u64 {
        (self.dk.tower().p() as u64).pow(self.dk.d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.json_repr()).expect("plain data serializes")
    }

    fn json_repr(&self) -> CertificateJson {
        let strings = |m: &Matrix| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        CertificateJson {
            verdict: self.verdict,
            hypothesis: self.dk.hypothesis,
            s: self.s,
            capacity: self.capacity,
            d: self.dk.d,
            missing_residue: self
                .missing_residue
                .as_ref()
                .map(|r| ResidueJson { rep: r.rep().coords().to_vec(), modulus: r.modulus() }),
            c0: self.c0.coords().to_vec(),
            divisibility: self.divisibility,
            representatives: self.representatives.iter().map(|e| e.to_string()).collect(),
            dk: DkJson {
                g: self.dk.g.iter().map(|q| q.to_json_repr()).collect(),
                leading: self
                    .dk
                    .leading
                    .iter()
                    .map(|(b, v)| LeadingJson { coeff: b.to_string(), valuation: v.coords().to_vec() })
                    .collect(),
                r_matrix: strings(&self.dk.r_matrix),
                s_matrix: strings(&self.dk.s_matrix),
                h_tilde: self.dk.h_tilde.iter().map(|q| q.to_json_repr()).collect(),
            },
        }
    }
}

#[derive(Serialize)]
struct CertificateJson {
    verdict: Verdict,
    hypothesis: Hypothesis,
    s: u64,
    capacity: u64,
    d: u32,
    missing_residue: Option<ResidueJson>,
    c0: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    divisibility: Option<bool>,
    representatives: Vec<String>,
    dk: DkJson,
}

#[derive(Serialize)]
struct ResidueJson {
    rep: Vec<i64>,
    modulus: u64,
}

#[derive(Serialize)]
struct LeadingJson {
    coeff: String,
    valuation: Vec<i64>,
}

#[derive(Serialize)]
struct DkJson {
    g: Vec<PolyJson>,
    leading: Vec<LeadingJson>,
    r_matrix: Vec<Vec<String>>,
    s_matrix: Vec<Vec<String>>,
    h_tilde: Vec<PolyJson>,
}

/// Builds the certificate, with `count` representatives when `s < p^{md}`.
pub fn certify_infinite_cokernel(
    poly: &AdditivePoly,
    count: usize,
    assume_nowhere_vanishing: bool,
) -> Result<CokernelCertificate, CokernelError> {
    let dk = dk_decompose(poly, assume_nowhere_vanishing)?;
    let tower = poly.tower();
    let p = tower.p() as u64;
    let m = tower.depth();
    let d = dk.d;
    let pd = p.pow(d);
    let capacity = pd.pow(m as u32);
    let s = poly.principal_part().terms.iter().map(|lt| p.pow(m as u32 * (d - lt.m))).sum::<u64>();
    debug_assert_eq!(s as usize, dk.s());
    let c0 = c0_constant(&dk.g)?;
    let group = ValueGroup::for_depth(m);

    if s < capacity {
        let used: Vec<ResidueClass> = dk.leading.iter().map(|(_, v)| ResidueClass::new(v, pd)).collect();
        let ell = missing_residues(&used, pd, m).into_iter().next().expect("s < p^{md} leaves a class free");
        let representatives = if count == 0 {
            Vec::new()
        } else {
            group
                .descending_congruent(ell.rep(), &c0, pd, count)
                .expect("nontrivial value group")
                .iter()
                .map(|g| tower.monomial_with_valuation(g))
                .collect()
        };
        Ok(CokernelCertificate {
            verdict: Verdict::InfiniteCokernel,
            s,
            capacity,
            nvars: poly.nvars(),
            missing_residue: Some(ell),
            c0,
            representatives,
            divisibility: None,
            dk,
        })
    } else {
        let pm1 = p.pow(m as u32) - 1;
        let divides = (poly.nvars() as u64 - 1).is_multiple_of(pm1);
        debug_assert!(divides || dk.hypothesis == Hypothesis::Asserted);
        Ok(CokernelCertificate {
            verdict: Verdict::Inconclusive,
            s,
            capacity,
            nvars: poly.nvars(),
            missing_residue: None,
            c0,
            representatives: Vec::new(),
            divisibility: Some(divides),
            dk,
        })
    }
}
