//! Finite p-groups given by permutations or abelian invariants.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::field_tower::is_prime;

/// Largest group order the closure will enumerate.
pub const MAX_ORDER: usize = 10_000;
/// Largest order for which Φ(G) is also computed from homomorphisms to `Z/p`.
pub const ORACLE_MAX_ORDER: usize = 512;
const MAX_DEGREE: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PGroupError {
    #[error("group order exceeds {0}")]
    TooLarge(usize),
    #[error("group of order {0} is not a {1}-group")]
    NotPGroup(usize, u32),
    #[error("{0} is not a prime")]
    BadPrime(u64),
    #[error("bad group spec: {0}")]
    BadSpec(String),
    #[error("Frattini computations disagree: orders {0} and {1}")]
    FrattiniDisagreement(usize, usize),
}

/// A permutation of `{0, ..., n-1}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u16>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u16).collect())
    }

    /// From disjoint or overlapping cycles on 1-based points, composed left
    /// to right.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PGroupError> {
        let mut acc = Perm::identity(n);
        for cycle in cycles {
            let mut c = Perm::identity(n);
            let mut seen = HashSet::new();
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n {
                    return Err(PGroupError::BadSpec(format!("point {x} outside 1..={n}")));
                }
                if !seen.insert(x) {
                    return Err(PGroupError::BadSpec(format!("point {x} repeated in a cycle")));
                }
                let y = cycle[(k + 1) % cycle.len()];
                c.0[x - 1] = (y - 1) as u16;
            }
            acc = acc.mul(&c);
        }
        Ok(acc)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `self` first, then `other`.
    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u16; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u16;
        }
        Perm(out)
    }

    pub fn pow(&self, e: u64) -> Perm {
        let mut acc = Perm::identity(self.degree());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `x^-1 y^-1 x y`.
    pub fn commutator(&self, other: &Perm) -> Perm {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push((x + 1).to_string());
                x = self.0[x] as usize;
            }
            write!(f, "({})", cycle.join(" "))?;
            wrote = true;
        }
        if !wrote {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// Elements of a subgroup in discovery order, with membership lookup.
#[derive(Debug, Clone)]
struct Closure {
    gens: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl Closure {
    fn trivial(n: usize) -> Self {
        let id = Perm::identity(n);
        Closure { gens: Vec::new(), index: HashMap::from([(id.clone(), 0)]), elements: vec![id] }
    }

    fn contains(&self, x: &Perm) -> bool {
        self.index.contains_key(x)
    }

    fn generate(n: usize, gens: &[Perm], limit: usize) -> Result<Self, PGroupError> {
        let mut c = Closure::trivial(n);
        c.extend(gens, limit)?;
        Ok(c)
    }

    /// Adds generators and saturates under right multiplication, which in a
    /// finite group yields the generated subgroup.
    fn extend(&mut self, new: &[Perm], limit: usize) -> Result<(), PGroupError> {
        let before = self.gens.len();
        self.gens.extend(new.iter().filter(|g| !self.index.contains_key(*g)).cloned());
        if self.gens.len() == before {
            return Ok(());
        }
        let mut queue: VecDeque<usize> = (0..self.elements.len()).collect();
        while let Some(i) = queue.pop_front() {
            for g in &self.gens {
                let y = self.elements[i].mul(g);
                if !self.index.contains_key(&y) {
                    if self.elements.len() >= limit {
                        return Err(PGroupError::TooLarge(limit));
                    }
                    self.index.insert(y.clone(), self.elements.len());
                    queue.push_back(self.elements.len());
                    self.elements.push(y);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    p: u32,
    gens: Vec<Perm>,
    closure: Closure,
}

impl FiniteGroup {
    /// The group generated by permutations of `{1..degree}`, which must be
    /// a `p`-group of order at most [`MAX_ORDER`].
    pub fn closure(p: u32, degree: usize, gens: Vec<Perm>) -> Result<Self, PGroupError> {
        if !is_prime(p) {
            return Err(PGroupError::BadPrime(p as u64));
        }
        if degree > MAX_DEGREE || gens.iter().any(|g| g.degree() != degree) {
            return Err(PGroupError::BadSpec(format!("generators must act on 1..={degree} (at most {MAX_DEGREE})")));
        }
        let closure = Closure::generate(degree, &gens, MAX_ORDER)?;
        let order = closure.elements.len();
        if p_log(order as u64, p as u64).is_none() {
            return Err(PGroupError::NotPGroup(order, p));
        }
        Ok(FiniteGroup { p, gens, closure })
    }

    pub fn trivial(p: u32) -> Result<Self, PGroupError> {
        Self::closure(p, 1, Vec::new())
    }

    /// `Z/a_1 x ... x Z/a_k` with every `a_i` a power of one prime; each
    /// factor acts as a cycle on its own block of points.
    pub fn abelian(invariants: &[u64]) -> Result<Self, PGroupError> {
        let Some(&first) = invariants.iter().find(|&&a| a > 1) else {
            return Err(PGroupError::BadSpec("need an invariant > 1 to fix the prime".into()));
        };
        let p = smallest_prime_factor(first);
        let mut degree = 0usize;
        for &a in invariants {
            if a == 0 || p_log(a, p).is_none() {
                return Err(PGroupError::NotPGroup(a as usize, p as u32));
            }
            degree += a as usize;
        }
        if degree > MAX_DEGREE {
            return Err(PGroupError::TooLarge(MAX_ORDER));
        }
        let order = invariants.iter().try_fold(1u64, |acc, &a| acc.checked_mul(a).filter(|&o| o <= MAX_ORDER as u64));
        if order.is_none() {
            return Err(PGroupError::TooLarge(MAX_ORDER));
        }
        let mut gens = Vec::new();
        let mut start = 1;
        for &a in invariants {
            if a > 1 {
                let cycle: Vec<usize> = (start..start + a as usize).collect();
                gens.push(Perm::from_cycles(degree, &[cycle])?);
            }
            start += a as usize;
        }
        Self::closure(p as u32, degree.max(1), gens)
    }

    /// Parses `cyclic:27`, `abelian:3,3,9` or `perm:p=2;(1 2)(3 4),(1 3)`.
    pub fn from_spec(spec: &str) -> Result<Self, PGroupError> {
        let bad = |msg: &str| PGroupError::BadSpec(format!("{spec:?}: {msg}"));
        let (kind, body) = spec.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let int = |s: &str| s.trim().parse::<u64>().map_err(|_| bad("expected a positive integer"));
        match kind.trim() {
            "cyclic" => Self::abelian(&[int(body)?]),
            "abelian" => Self::abelian(&body.split(',').map(int).collect::<Result<Vec<_>, _>>()?),
            "perm" => {
                let (head, gens) = body.split_once(';').ok_or_else(|| bad("missing ';'"))?;
                let p = head.trim().strip_prefix("p=").ok_or_else(|| bad("expected p=<prime>"))?;
                let p = int(p)?;
                if p > u32::MAX as u64 {
                    return Err(PGroupError::BadPrime(p));
                }
                let cycles_per_gen: Vec<Vec<Vec<usize>>> =
                    gens.split(',').filter(|g| !g.trim().is_empty()).map(parse_cycles).collect::<Result<_, _>>()?;
                let degree = cycles_per_gen.iter().flatten().flatten().copied().max().unwrap_or(1);
                if degree > MAX_DEGREE {
                    return Err(bad("point too large"));
                }
                let perms =
                    cycles_per_gen.iter().map(|c| Perm::from_cycles(degree, c)).collect::<Result<Vec<_>, _>>()?;
                Self::closure(p as u32, degree, perms)
            }
            _ => Err(bad("unknown kind")),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.closure.elements.len()
    }

    /// `n` with `|G| = p^n`.
    pub fn log_order(&self) -> u32 {
        p_log(self.order() as u64, self.p as u64).expect("order is a power of p")
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn elements(&self) -> &[Perm] {
        &self.closure.elements
    }

    fn degree(&self) -> usize {
        self.closure.elements[0].degree()
    }

    pub fn is_abelian(&self) -> bool {
        self.gens.iter().all(|a| self.gens.iter().all(|b| a.mul(b) == b.mul(a)))
    }

    /// Every element satisfies `x^p = 1`.
    pub fn has_exponent_p(&self) -> bool {
        self.elements().iter().all(|x| x.pow(self.p as u64).is_identity())
    }

    /// Abelian of exponent dividing `p`.
    pub fn is_elementary(&self) -> bool {
        self.is_abelian() && self.has_exponent_p()
    }
}

fn parse_cycles(src: &str) -> Result<Vec<Vec<usize>>, PGroupError> {
    let bad = || PGroupError::BadSpec(format!("bad permutation {src:?}"));
    let mut out = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        let inner_end = rest.find(')').ok_or_else(bad)?;
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let body = &inner[..inner_end - 1];
        let points =
            body.split_whitespace().map(|s| s.parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
        if !points.is_empty() {
            out.push(points);
        }
        rest = rest[inner_end + 1..].trim_start();
    }
    Ok(out)
}

/// `n` with `x = p^n`, if any.
fn p_log(mut x: u64, p: u64) -> Option<u32> {
    let mut n = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        n += 1;
    }
    (x == 1).then_some(n)
}

fn smallest_prime_factor(n: u64) -> u64 {
    (2..).find(|d| n.is_multiple_of(*d) || d * d > n).map(|d| if n.is_multiple_of(d) { d } else { n }).expect("n > 1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrattiniData {
    pub phi_order: usize,
    /// `|Φ(G)| = p^e`.
    pub e: u32,
    pub quotient_rank: u32,
    /// Order found by the homomorphism computation, when it ran.
    pub oracle_order: Option<usize>,
    pub quotient_elementary: bool,
}

/// Φ(G) as the subgroup generated by all commutators and all `p`-th powers.
pub fn frattini_subgroup(g: &FiniteGroup) -> Vec<Perm> {
    let mut phi = Closure::trivial(g.degree());
    let p = g.p as u64;
    for x in g.elements() {
        let xp = x.pow(p);
        if !phi.contains(&xp) {
            phi.extend(&[xp], MAX_ORDER).expect("subgroup of a bounded group");
        }
    }
    for x in g.elements() {
        for y in g.elements() {
            let c = x.commutator(y);
            if !phi.contains(&c) {
                phi.extend(&[c], MAX_ORDER).expect("subgroup of a bounded group");
            }
        }
    }
    let mut out = phi.elements;
    out.sort();
    out
}

/// Φ(G) as the intersection of the kernels of all nonzero homomorphisms
/// `G -> Z/p`, found by trying every assignment on the generators.
pub fn frattini_by_kernels(g: &FiniteGroup) -> Result<Vec<Perm>, PGroupError> {
    if g.order() > ORACLE_MAX_ORDER {
        return Err(PGroupError::TooLarge(ORACLE_MAX_ORDER));
    }
    let p = g.p as u64;
    let k = g.gens.len() as u32;
    let total = p.checked_pow(k).filter(|&t| t <= 1 << 20).ok_or(PGroupError::TooLarge(ORACLE_MAX_ORDER))?;
    let index = &g.closure.index;
    let mut in_all = vec![true; g.order()];
    let mut any = false;
    for code in 1..total {
        let mut vals = Vec::with_capacity(k as usize);
        let mut c = code;
        for _ in 0..k {
            vals.push(c % p);
            c /= p;
        }
        let Some(phi) = homomorphism(g, &vals, index) else { continue };
        any = true;
        for (slot, v) in in_all.iter_mut().zip(&phi) {
            *slot &= *v == 0;
        }
    }
    let mut out: Vec<Perm> = if any {
        g.elements().iter().zip(&in_all).filter(|(_, &keep)| keep).map(|(x, _)| x.clone()).collect()
    } else {
        // only the trivial group has no nonzero homomorphism to Z/p
        g.elements().to_vec()
    };
    out.sort();
    Ok(out)
}

/// Extends generator values to a map on all of `G` along the Cayley graph;
/// `None` when two paths disagree.
fn homomorphism(g: &FiniteGroup, vals: &[u64], index: &HashMap<Perm, usize>) -> Option<Vec<u64>> {
    let p = g.p as u64;
    let mut phi = vec![u64::MAX; g.order()];
    phi[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gen, v) in g.gens.iter().zip(vals) {
            let j = index[&g.elements()[i].mul(gen)];
            let want = (phi[i] + v) % p;
            if phi[j] == u64::MAX {
                phi[j] = want;
                queue.push_back(j);
            } else if phi[j] != want {
                return None;
            }
        }
    }
    Some(phi)
}

/// Φ(G) by both routes (the second only up to order [`ORACLE_MAX_ORDER`]).
pub fn frattini(g: &FiniteGroup) -> Result<FrattiniData, PGroupError> {
    let phi = frattini_subgroup(g);
    let oracle = match frattini_by_kernels(g) {
        Ok(other) => {
            if other != phi {
                return Err(PGroupError::FrattiniDisagreement(phi.len(), other.len()));
            }
            Some(other.len())
        }
        Err(PGroupError::TooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    let p = g.p as u64;
    let e = p_log(phi.len() as u64, p).expect("subgroup order divides a p-power");
    let phi_set: HashSet<&Perm> = phi.iter().collect();
    let quotient_elementary = g.elements().iter().all(|x| phi_set.contains(&x.pow(p)))
        && g.gens.iter().all(|a| g.gens.iter().all(|b| phi_set.contains(&a.commutator(b))));
    Ok(FrattiniData {
        phi_order: phi.len(),
        e,
        quotient_rank: g.log_order() - e,
        oracle_order: oracle,
        quotient_elementary,
    })
}

/// `ed(G) <= n` for `|G| = p^n`.
pub fn ledet_bound(g: &FiniteGroup) -> u32 {
    g.log_order()
}

/// `e + 1` over an infinite field, `e + 2` over a finite one, `|Φ(G)| = p^e`.
pub fn jly_bound(g: &FiniteGroup, base_field_finite: bool) -> Result<u32, PGroupError> {
    let e = frattini(g)?.e;
    Ok(if base_field_finite { e + 2 } else { e + 1 })
}

/// `2` over a finite field and `1` over an infinite one for elementary
/// groups; `None` otherwise.
pub fn elementary_bound(g: &FiniteGroup, base_field_finite: bool) -> Option<u32> {
    g.is_elementary().then_some(if base_field_finite { 2 } else { 1 })
}

/// `|PGL_2(F_p)| = p(p^2 - 1)`.
pub fn pgl2_order(p: u32) -> u64 {
    let p = p as u64;
    p * (p * p - 1)
}

/// Over `F_p`: `2` when `G` is elementary of rank `>= 3`, since then
/// `|G| >= p^3 > |PGL_2(F_p)|` and `G` cannot embed there; `0` otherwise.
pub fn pgl2_lower_bound(g: &FiniteGroup) -> u32 {
    if g.is_elementary() && g.log_order() >= 3 && g.order() as u64 > pgl2_order(g.p) {
        2
    } else {
        0
    }
}
