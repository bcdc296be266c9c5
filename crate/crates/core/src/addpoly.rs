//! Additive polynomials `P = sum c_ij T_i^{p^j}` over a tower field.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field_tower::{FieldError, ParseError, Tower, TowerElement};
use crate::valgroup::ResidueClass;
use crate::valuation::val_nonzero;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AddPolyError {
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("term ({var}, {pexp}) has zero coefficient")]
    ZeroCoefficient { var: usize, pexp: u32 },
    #[error("term ({var}, {pexp}) given twice")]
    DuplicateTerm { var: usize, pexp: u32 },
    #[error("unknown polynomial variable {0:?}")]
    UnknownVariable(String),
    #[error("invalid variable list: {0}")]
    BadVariables(String),
    #[error("polynomial has no terms")]
    Empty,
    #[error("coefficient lies in a different tower")]
    TowerMismatch,
    #[error("p-exponent {0} is too large")]
    ExponentTooLarge(u32),
    #[error("bad coefficient {src:?}: {err}")]
    Coefficient { src: String, err: ParseError },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Largest accepted p-exponent; keeps `p^j` degrees well inside `u64`.
pub const MAX_PEXP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditivePoly {
    tower: Tower,
    vars: Vec<String>,
    terms: BTreeMap<(usize, u32), TowerElement>,
}

/// Leading term `c_i T_i^{p^{m_i}}` of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    pub var: usize,
    pub m: u32,
    pub coeff: TowerElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalPart {
    pub terms: Vec<LeadingTerm>,
}

impl PrincipalPart {
    /// `d = max m_i`.
    pub fn d(&self) -> u32 {
        self.terms.iter().map(|t| t.m).max().unwrap_or(0)
    }
}

impl AdditivePoly {
    pub fn new<S: AsRef<str>>(
        tower: &Tower,
        vars: &[S],
        terms: impl IntoIterator<Item = (usize, u32, TowerElement)>,
    ) -> Result<Self, AddPolyError> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        if vars.is_empty() {
            return Err(AddPolyError::BadVariables("no variables".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !crate::field_tower::is_identifier(v) {
                return Err(AddPolyError::BadVariables(format!("{v:?} is not an identifier")));
            }
            if !seen.insert(v) || tower.var_index(v).is_some() {
                return Err(AddPolyError::BadVariables(format!("{v:?} is repeated or clashes with the tower")));
            }
        }
        let mut map = BTreeMap::new();
        for (var, pexp, coeff) in terms {
            if var >= vars.len() {
                return Err(AddPolyError::ArityMismatch { expected: vars.len(), got: var + 1 });
            }
            if pexp > MAX_PEXP {
                return Err(AddPolyError::ExponentTooLarge(pexp));
            }
            if coeff.tower() != tower {
                return Err(AddPolyError::TowerMismatch);
            }
            if coeff.is_zero() {
                return Err(AddPolyError::ZeroCoefficient { var, pexp });
            }
            if map.insert((var, pexp), coeff).is_some() {
                return Err(AddPolyError::DuplicateTerm { var, pexp });
            }
        }
        if map.is_empty() {
            return Err(AddPolyError::Empty);
        }
        Ok(AdditivePoly { tower: tower.clone(), vars, terms: map })
    }

    /// One-variable polynomial `sum c_j X^{p^j}` from `(pexp, coeff)` pairs.
    pub fn univariate(
        tower: &Tower,
        terms: impl IntoIterator<Item = (u32, TowerElement)>,
    ) -> Result<Self, AddPolyError> {
        Self::new(tower, &["X"], terms.into_iter().map(|(j, c)| (0, j, c)))
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Terms in canonical order: by variable, then p-exponent.
    pub fn terms(&self) -> impl Iterator<Item = (usize, u32, &TowerElement)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn coeff(&self, var: usize, pexp: u32) -> Option<&TowerElement> {
        self.terms.get(&(var, pexp))
    }

    /// Terms of one variable as `(pexp, coeff)`.
    pub fn var_terms(&self, var: usize) -> impl Iterator<Item = (u32, &TowerElement)> {
        self.terms.range((var, 0)..=(var, u32::MAX)).map(|(&(_, j), c)| (j, c))
    }

    /// `sum c_ij a_i^{p^j}`.
    pub fn evaluate(&self, a: &[TowerElement]) -> Result<TowerElement, AddPolyError> {
        if a.len() != self.nvars() {
            return Err(AddPolyError::ArityMismatch { expected: self.nvars(), got: a.len() });
        }
        if a.iter().any(|x| x.tower() != &self.tower) {
            return Err(AddPolyError::TowerMismatch);
        }
        Ok(self.terms().fold(self.tower.zero(), |acc, (i, j, c)| &acc + &(c * &a[i].pth_power(j))))
    }

    pub fn principal_part(&self) -> PrincipalPart {
        let mut lead: BTreeMap<usize, (u32, &TowerElement)> = BTreeMap::new();
        for (i, j, c) in self.terms() {
            lead.insert(i, (j, c));
        }
        PrincipalPart {
            terms: lead.into_iter().map(|(var, (m, c))| LeadingTerm { var, m, coeff: c.clone() }).collect(),
        }
    }

    /// The principal part as a polynomial in the same variables.
    pub fn principal_poly(&self) -> AdditivePoly {
        let terms = self.principal_part().terms.into_iter().map(|t| (t.var, t.m, t.coeff));
        AdditivePoly::new(&self.tower, &self.vars, terms).expect("principal part of a valid polynomial")
    }

    pub fn is_separable(&self) -> bool {
        self.terms.keys().any(|&(_, j)| j == 0)
    }

    /// Whether `v(c_i) + p^{m_i} Γ` are pairwise disjoint over the leading
    /// terms, i.e. `v(c_i) ≢ v(c_i')` modulo `p^{min(m_i, m_i')}`. A variable
    /// without terms makes the principal part vanish on a coordinate axis, so
    /// the answer is then false.
    pub fn progressions_disjoint(&self) -> bool {
        let pp = self.principal_part();
        if pp.terms.len() < self.nvars() {
            return false;
        }
        let p = self.tower.p() as u64;
        let vals: Vec<_> = pp.terms.iter().map(|t| val_nonzero(&t.coeff)).collect();
        for a in 0..pp.terms.len() {
            for b in a + 1..pp.terms.len() {
                let modulus = p.pow(pp.terms[a].m.min(pp.terms[b].m));
                if ResidueClass::new(&vals[a], modulus).contains(&vals[b]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_repr()).expect("plain data serializes")
    }

    pub(crate) fn to_json_repr(&self) -> PolyJson {
        PolyJson {
            p: self.tower.p(),
            tower: self.tower.vars().to_vec(),
            vars: self.vars.clone(),
            terms: self
                .terms()
                .map(|(i, j, c)| TermJson { var: self.vars[i].clone(), pexp: j, coeff: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(src: &str) -> Result<Self, AddPolyError> {
        let repr: PolyJson = serde_json::from_str(src).map_err(|e| AddPolyError::Json(e.to_string()))?;
        let tower = Tower::new(repr.p, &repr.tower)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in &repr.terms {
            let var = repr
                .vars
                .iter()
                .position(|v| v == &t.var)
                .ok_or_else(|| AddPolyError::UnknownVariable(t.var.clone()))?;
            let coeff = tower.parse(&t.coeff).map_err(|err| AddPolyError::Coefficient { src: t.coeff.clone(), err })?;
            terms.push((var, t.pexp, coeff));
        }
        AdditivePoly::new(&tower, &repr.vars, terms)
    }
}

impl fmt::Display for AdditivePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.tower.p() as u64;
        let parts: Vec<String> = self
            .terms()
            .map(|(i, j, c)| {
                let mono = match j {
                    0 => self.vars[i].clone(),
                    _ => format!("{}^{}", self.vars[i], p.pow(j)),
                };
                if c.is_one() {
                    mono
                } else {
                    format!("({c})*{mono}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct PolyJson {
    p: u32,
    tower: Vec<String>,
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    var: String,
    pexp: u32,
    coeff: String,
}
