//! Interval bounds on essential dimension, with the rules that produced them.

use serde::Serialize;
use thiserror::Error;

use crate::addpoly::AdditivePoly;
use crate::cokernel::{certify_infinite_cokernel, CokernelCertificate, CokernelError, Verdict};
use crate::field_tower::Tower;
use crate::pgroup::{self, FiniteGroup, PGroupError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EdimError {
    #[error("inconsistent profile: {0}")]
    InconsistentProfile(String),
    #[error("polynomial has no degree-1 term")]
    NotSeparable,
    #[error("leading-term progressions overlap and nowhere-vanishing was not asserted")]
    HypothesisUnverified,
    #[error("no witness degree fits in 64 bits")]
    Unsatisfiable,
    #[error("{0} is not a power of {1}")]
    NotPowerOfP(u64, u32),
    #[error("Weil restriction needs a smooth unipotent profile and degree >= 1")]
    BadRestriction,
    #[error(transparent)]
    Cokernel(CokernelError),
    #[error(transparent)]
    PGroup(#[from] PGroupError),
}

impl From<CokernelError> for EdimError {
    fn from(e: CokernelError) -> Self {
        match e {
            CokernelError::HypothesisUnverified => EdimError::HypothesisUnverified,
            other => EdimError::Cokernel(other),
        }
    }
}

/// Structure data of a smooth unipotent group `G` with split part `G_s`
/// and `H = G / G_s`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnipotentProfile {
    pub dim: u32,
    pub split_part_dim: u32,
    /// `|H / H^0| = p^n`.
    pub n: u32,
    /// cckp-kernel length of `G / G_s`, when known.
    pub l: Option<u32>,
    pub is_split: Option<bool>,
    pub is_wound_witnessed: bool,
    pub char_zero: bool,
    /// `G` is commutative and killed by `p`.
    pub commutative_p_torsion: bool,
}

impl UnipotentProfile {
    fn wound_dim(&self) -> u32 {
        self.dim - self.split_part_dim
    }

    /// Known not to be split: declared so, a witnessed wound part of
    /// positive dimension, or a nontrivial component group.
    fn known_not_split(&self) -> bool {
        self.is_split == Some(false) || (self.is_wound_witnessed && self.dim > self.split_part_dim) || self.n > 0
    }

    fn validate(&self) -> Result<(), EdimError> {
        let bad = |m: &str| Err(EdimError::InconsistentProfile(m.into()));
        if self.split_part_dim > self.dim {
            return bad("split part larger than the group");
        }
        if self.l.is_some_and(|l| l > self.wound_dim()) {
            return bad("cckp length exceeds dim(G/G_s)");
        }
        if self.is_split == Some(true) {
            if self.dim != self.split_part_dim || self.n > 0 {
                return bad("a split group equals its split part and is connected");
            }
            if self.is_wound_witnessed && self.dim > 0 {
                return bad("a nontrivial group cannot be both split and wound");
            }
        }
        if self.char_zero && self.n > 0 {
            return bad("component exponent is zero in characteristic zero");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum GroupProfile {
    FinitePGroup(FiniteGroup),
    SmoothUnipotent(UnipotentProfile),
}

#[derive(Debug, Clone, Default)]
pub struct FieldContext {
    pub finite: bool,
    /// Caller's assertion that the field is geometric over a perfect field.
    pub geometric_over_perfect: bool,
    /// A concrete `F_p(t_1..t_r)`; it witnesses geometricity by its shape.
    pub tower: Option<Tower>,
}

impl FieldContext {
    fn validate(&self) -> Result<(), EdimError> {
        if let Some(t) = &self.tower {
            if self.finite != (t.depth() == 0) {
                return Err(EdimError::InconsistentProfile(format!("{t} finite flag is wrong")));
            }
        }
        Ok(())
    }

    fn geometric(&self) -> bool {
        self.geometric_over_perfect || self.tower.is_some()
    }

    fn is_prime_field(&self) -> Option<u32> {
        self.tower.as_ref().filter(|t| t.depth() == 0).map(|t| t.p())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrailEntry {
    pub rule: String,
    pub cite: String,
    pub inputs: String,
    pub value: Contribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Contribution {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdBoundReport {
    pub lower: u32,
    /// `None` is `∞`.
    pub upper: Option<u32>,
    pub trail: Vec<TrailEntry>,
}

impl EdBoundReport {
    fn new() -> Self {
        EdBoundReport { lower: 0, upper: None, trail: Vec::new() }
    }

    fn apply(&mut self, rule: &str, cite: &str, inputs: String, lower: Option<u32>, upper: Option<u32>) {
        if let Some(l) = lower {
            self.lower = self.lower.max(l);
        }
        if let Some(u) = upper {
            self.upper = Some(self.upper.map_or(u, |v| v.min(u)));
        }
        self.trail.push(TrailEntry {
            rule: rule.into(),
            cite: cite.into(),
            inputs,
            value: Contribution { lower, upper },
        });
    }

    pub fn is_exact(&self) -> bool {
        self.upper == Some(self.lower)
    }

    pub fn cites(&self, rule: &str) -> bool {
        self.trail.iter().any(|t| t.rule == rule)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Applies every rule that fits and intersects the intervals.
pub fn bound(profile: &GroupProfile, field: &FieldContext) -> Result<EdBoundReport, EdimError> {
    field.validate()?;
    let mut r = EdBoundReport::new();
    match profile {
        GroupProfile::SmoothUnipotent(u) => unipotent_rules(u, field, &mut r)?,
        GroupProfile::FinitePGroup(g) => pgroup_rules(g, field, &mut r)?,
    }
    if r.upper.is_some_and(|u| r.lower > u) {
        return Err(EdimError::InconsistentProfile(format!(
            "rules give lower {} above upper {}",
            r.lower,
            r.upper.unwrap_or_default()
        )));
    }
    Ok(r)
}

fn unipotent_rules(u: &UnipotentProfile, field: &FieldContext, r: &mut EdBoundReport) -> Result<(), EdimError> {
    u.validate()?;
    if u.char_zero && field.tower.is_some() {
        return Err(EdimError::InconsistentProfile("a tower field has positive characteristic".into()));
    }
    let w = u.wound_dim();
    if u.char_zero {
        r.apply("R1", "characteristic zero: unipotent groups are split", "char_zero".into(), None, Some(0));
    }
    r.apply(
        "R2",
        "ed <= n + dim(G/G_s)",
        format!("n={}, dim={}, split_part_dim={}", u.n, u.dim, u.split_part_dim),
        None,
        Some(u.n + w),
    );
    if let Some(l) = u.l {
        r.apply("R3", "ed <= cckp-kernel length of G/G_s", format!("l={l}"), None, Some(l));
    }
    r.apply("R4", "ed <= dim(G/G_s)", format!("dim={}, split_part_dim={}", u.dim, u.split_part_dim), None, Some(w));
    let dim_one = w == 1 && u.n == 0;
    if !field.finite && !u.char_zero && (u.commutative_p_torsion || dim_one) {
        let inputs = if u.commutative_p_torsion { "commutative, killed by p" } else { "dim(G/G_s)=1, connected" };
        r.apply("R5", "commutative p-torsion over an infinite field: ed <= 1", inputs.into(), None, Some(1));
    }
    if u.is_split == Some(true) {
        r.apply("R6", "split groups have ed = 0", "is_split".into(), Some(0), Some(0));
    }
    let not_split = u.known_not_split();
    if field.geometric() && not_split && !u.char_zero {
        r.apply("R7", "geometric field: ed = 0 iff split", "geometric, not split".into(), Some(1), None);
        if dim_one {
            r.apply(
                "R8",
                "dimension one over a geometric field: ed = 1 unless split",
                "dim(G/G_s)=1, n=0".into(),
                Some(1),
                Some(1),
            );
        }
    }
    Ok(())
}

fn pgroup_rules(g: &FiniteGroup, field: &FieldContext, r: &mut EdBoundReport) -> Result<(), EdimError> {
    if let Some(t) = &field.tower {
        if t.p() != g.p() {
            return Err(EdimError::InconsistentProfile(format!(
                "{}-group over a field of characteristic {}",
                g.p(),
                t.p()
            )));
        }
    }
    let n = pgroup::ledet_bound(g);
    r.apply("R9", "ed <= log_p |G|", format!("|G|={}", g.order()), None, Some(n));
    let f = pgroup::frattini(g)?;
    let jly = pgroup::jly_bound(g, field.finite)?;
    let fin = if field.finite { "finite" } else { "infinite" };
    r.apply(
        "R9",
        "ed <= e + 1 (infinite k), e + 2 (finite k)",
        format!("|Phi(G)|={}, {fin} k", f.phi_order),
        None,
        Some(jly),
    );
    if let Some(b) = pgroup::elementary_bound(g, field.finite) {
        r.apply("R9", "elementary: ed <= 1 (infinite k), 2 (finite k)", format!("elementary, {fin} k"), None, Some(b));
    }
    if field.is_prime_field() == Some(g.p()) {
        let lb = pgroup::pgl2_lower_bound(g);
        if lb > 0 {
            r.apply(
                "R9",
                "|G| > |PGL_2(F_p)| rules out ed <= 1 over F_p",
                format!("|G|={} > {}", g.order(), pgroup::pgl2_order(g.p())),
                Some(lb),
                None,
            );
        }
    }
    if field.geometric() && g.order() > 1 {
        r.apply("R7", "geometric field: ed = 0 iff split", "nontrivial finite group".into(), Some(1), None);
    }
    Ok(())
}

/// Upper bound for `B` from `1 -> A -> B -> C -> 1` with `A` central:
/// `ed(B) <= ed(C) + ed(A)`.
pub fn combine_central(c: &EdBoundReport, a: &EdBoundReport) -> EdBoundReport {
    let mut r = EdBoundReport::new();
    let upper = c.upper.zip(a.upper).map(|(x, y)| x + y);
    r.trail.push(TrailEntry {
        rule: "R10".into(),
        cite: "ed(B) <= ed(C) + ed(A), A central".into(),
        inputs: format!("upper(C)={}, upper(A)={}", show(c.upper), show(a.upper)),
        value: Contribution { lower: None, upper },
    });
    r.upper = upper;
    r
}

fn show(u: Option<u32>) -> String {
    u.map_or_else(|| "inf".into(), |x| x.to_string())
}

/// Dimension bookkeeping for the Weil restriction along an extension of
/// the given degree. Splitness and woundness are preserved; the cckp
/// length is not tracked and becomes unknown unless `degree = 1`.
pub fn weil_restrict_profile(profile: &GroupProfile, degree: u32) -> Result<GroupProfile, EdimError> {
    let GroupProfile::SmoothUnipotent(u) = profile else {
        return Err(EdimError::BadRestriction);
    };
    if degree == 0 {
        return Err(EdimError::BadRestriction);
    }
    if degree == 1 {
        return Ok(profile.clone());
    }
    Ok(GroupProfile::SmoothUnipotent(UnipotentProfile {
        dim: u.dim * degree,
        split_part_dim: u.split_part_dim * degree,
        n: u.n * degree,
        l: None,
        ..u.clone()
    }))
}

/// Least `m` with `ext_degree * dim_g < base_p_index * p^m - 1`.
pub fn specialness_witness_degree(dim_g: u64, ext_degree: u64, base_p_index: u64, p: u32) -> Result<u32, EdimError> {
    if !crate::field_tower::is_prime(p) {
        return Err(EdimError::PGroup(PGroupError::BadPrime(p as u64)));
    }
    let mut x = base_p_index;
    while x > 1 && x.is_multiple_of(p as u64) {
        x /= p as u64;
    }
    if x != 1 {
        return Err(EdimError::NotPowerOfP(base_p_index, p));
    }
    let lhs = ext_degree.checked_mul(dim_g).ok_or(EdimError::Unsatisfiable)?;
    let mut cap = base_p_index;
    for m in 0..64 {
        if lhs < cap.saturating_sub(1) {
            return Ok(m);
        }
        cap = cap.checked_mul(p as u64).ok_or(EdimError::Unsatisfiable)?;
    }
    Err(EdimError::Unsatisfiable)
}

#[derive(Debug, Clone)]
pub struct H1Report {
    /// `dim G = r - 1` for `G = ker P`.
    pub dim: u64,
    /// `p^m - 1` with `p^m = [k : k^p]`.
    pub threshold: u64,
    pub certificate: CokernelCertificate,
}

impl H1Report {
    pub fn is_infinite(&self) -> bool {
        self.certificate.verdict == Verdict::InfiniteCokernel
    }

    /// `dim < p^m - 1` forces an infinite verdict.
    pub fn implication_holds(&self) -> bool {
        self.dim >= self.threshold || self.is_infinite()
    }
}

/// Decides whether `H^1(k, ker P) = k / P(k)` is certified infinite.
pub fn h1_infinite(poly: &AdditivePoly, count: usize, assume_nowhere_vanishing: bool) -> Result<H1Report, EdimError> {
    if !poly.is_separable() {
        return Err(EdimError::NotSeparable);
    }
    let certificate = certify_infinite_cokernel(poly, count, assume_nowhere_vanishing)?;
    let k = poly.tower();
    let threshold = (k.p() as u64).pow(k.depth() as u32) - 1;
    let report = H1Report { dim: poly.nvars() as u64 - 1, threshold, certificate };
    debug_assert!(report.implication_holds());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unip(dim: u32, split: u32, n: u32) -> UnipotentProfile {
        UnipotentProfile { dim, split_part_dim: split, n, ..Default::default() }
    }

    fn geometric() -> FieldContext {
        FieldContext { finite: false, geometric_over_perfect: true, tower: None }
    }

    #[test]
    fn dimension_one_wound() {
        let u = UnipotentProfile { is_split: Some(false), ..unip(1, 0, 0) };
        let r = bound(&GroupProfile::SmoothUnipotent(u), &geometric()).unwrap();
        assert_eq!((r.lower, r.upper), (1, Some(1)));
        assert!(r.cites("R8"));
        let w = UnipotentProfile { is_wound_witnessed: true, ..unip(1, 0, 0) };
        let r = bound(&GroupProfile::SmoothUnipotent(w), &geometric()).unwrap();
        assert!(r.is_exact() && r.lower == 1);
    }

    #[test]
    fn rule_arithmetic() {
        let u = UnipotentProfile { l: Some(2), ..unip(5, 2, 1) };
        let r = bound(&GroupProfile::SmoothUnipotent(u), &FieldContext::default()).unwrap();
        assert_eq!((r.lower, r.upper), (0, Some(2)));
        assert!(r.cites("R3"));
        let split = UnipotentProfile { is_split: Some(true), ..unip(2, 2, 0) };
        let r = bound(&GroupProfile::SmoothUnipotent(split), &geometric()).unwrap();
        assert_eq!((r.lower, r.upper), (0, Some(0)));
    }

    #[test]
    fn elementary_over_prime_field() {
        let g = FiniteGroup::from_spec("abelian:3,3,3").unwrap();
        let fp = FieldContext {
            finite: true,
            geometric_over_perfect: false,
            tower: Some(Tower::new(3, &[] as &[&str]).unwrap()),
        };
        let r = bound(&GroupProfile::FinitePGroup(g.clone()), &fp).unwrap();
        assert_eq!((r.lower, r.upper), (2, Some(2)));
        let ft =
            FieldContext { finite: false, geometric_over_perfect: false, tower: Some(Tower::new(3, &["t"]).unwrap()) };
        let r = bound(&GroupProfile::FinitePGroup(g), &ft).unwrap();
        assert_eq!((r.lower, r.upper), (1, Some(1)));
    }

    #[test]
    fn inconsistent_profiles() {
        let cases = [
            unip(1, 2, 0),
            UnipotentProfile { l: Some(3), ..unip(3, 1, 0) },
            UnipotentProfile { is_split: Some(true), ..unip(2, 1, 0) },
            UnipotentProfile { is_split: Some(true), is_wound_witnessed: true, ..unip(1, 1, 0) },
            UnipotentProfile { is_split: Some(true), char_zero: false, ..unip(0, 0, 1) },
        ];
        for u in cases {
            let e = bound(&GroupProfile::SmoothUnipotent(u.clone()), &geometric());
            assert!(matches!(e, Err(EdimError::InconsistentProfile(_))), "{u:?}");
        }
        let bad_field =
            FieldContext { finite: true, geometric_over_perfect: false, tower: Some(Tower::new(2, &["t"]).unwrap()) };
        assert!(bound(&GroupProfile::SmoothUnipotent(unip(1, 0, 0)), &bad_field).is_err());
    }

    #[test]
    fn weil_restriction() {
        let u = UnipotentProfile { is_wound_witnessed: true, is_split: Some(false), ..unip(1, 0, 0) };
        let GroupProfile::SmoothUnipotent(r) =
            weil_restrict_profile(&GroupProfile::SmoothUnipotent(u.clone()), 3).unwrap()
        else {
            panic!()
        };
        assert_eq!(r, UnipotentProfile { dim: 3, ..u.clone() });
        let s = UnipotentProfile { is_split: Some(true), ..unip(2, 2, 0) };
        let GroupProfile::SmoothUnipotent(r) =
            weil_restrict_profile(&GroupProfile::SmoothUnipotent(s.clone()), 2).unwrap()
        else {
            panic!()
        };
        assert_eq!((r.dim, r.split_part_dim, r.is_split), (4, 4, Some(true)));
        let GroupProfile::SmoothUnipotent(r) =
            weil_restrict_profile(&GroupProfile::SmoothUnipotent(u.clone()), 1).unwrap()
        else {
            panic!()
        };
        assert_eq!(r, u);
    }

    #[test]
    fn witness_degrees() {
        assert_eq!(specialness_witness_degree(1, 1, 3, 3).unwrap(), 0);
        assert_eq!(specialness_witness_degree(2, 3, 2, 2).unwrap(), 2);
        assert_eq!(specialness_witness_degree(0, 5, 3, 3).unwrap(), 0);
        assert_eq!(specialness_witness_degree(1, 1, 6, 2).unwrap_err(), EdimError::NotPowerOfP(6, 2));
    }

    #[test]
    fn h1_examples() {
        let k3 = Tower::new(3, &["t"]).unwrap();
        let russell =
            AdditivePoly::new(&k3, &["x", "y"], [(0, 0, k3.one()), (0, 1, k3.var(0)), (1, 1, k3.from_int(-1))])
                .unwrap();
        let rep = h1_infinite(&russell, 3, false).unwrap();
        assert!(rep.is_infinite() && rep.implication_holds());
        assert_eq!((rep.dim, rep.threshold), (1, 2));

        let k2 = Tower::new(2, &["t"]).unwrap();
        let boundary =
            AdditivePoly::new(&k2, &["x", "y"], [(0, 0, k2.one()), (0, 1, k2.var(0)), (1, 1, k2.one())]).unwrap();
        let rep = h1_infinite(&boundary, 3, false).unwrap();
        assert!(!rep.is_infinite());
        assert_eq!((rep.dim, rep.threshold), (1, 1));

        let cube = AdditivePoly::new(&k3, &["x"], [(0, 1, k3.one())]).unwrap();
        assert_eq!(h1_infinite(&cube, 1, false).unwrap_err(), EdimError::NotSeparable);
    }
}
