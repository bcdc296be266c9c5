//! Recursive value representation and the level-indexed arithmetic on it.
//!
//! A value at level 0 is a residue mod p. A value at level `k >= 1` is a
//! reduced fraction `num/den` of dense polynomials in the k-th variable whose
//! coefficients are level `k - 1` values. Fractions are kept canonical: the
//! gcd of numerator and denominator is 1 and the denominator is monic, so
//! structural equality is field equality.

use std::cmp::max;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum Value {
    Base(u32),
    Frac(Box<Frac>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Frac {
    /// Ascending coefficients, no trailing zeros; empty means zero.
    pub num: Vec<Value>,
    /// Ascending coefficients, monic, never empty.
    pub den: Vec<Value>,
}

/// Sparse coordinates `(index, value)` as produced by [`Level::decompose`].
type Coords = Vec<(Vec<u32>, Value)>;
/// Inner coordinates keyed by (outer index, power of x^q).
type ByPower = BTreeMap<(usize, usize), Coords>;

/// Arithmetic at one level of the tower.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Level {
    pub p: u32,
    pub level: usize,
}

impl Level {
    pub fn new(p: u32, level: usize) -> Self {
        Level { p, level }
    }

    /// Coefficient field of the polynomials at this level.
    pub fn sub(self) -> Level {
        debug_assert!(self.level > 0);
        Level { p: self.p, level: self.level - 1 }
    }

    pub fn zero(self) -> Value {
        if self.level == 0 {
            Value::Base(0)
        } else {
            Value::Frac(Box::new(Frac { num: Vec::new(), den: vec![self.sub().one()] }))
        }
    }

    pub fn one(self) -> Value {
        self.from_int(1)
    }

    pub fn from_int(self, n: i64) -> Value {
        let r = n.rem_euclid(self.p as i64) as u32;
        self.from_residue(r)
    }

    pub fn from_residue(self, r: u32) -> Value {
        debug_assert!(r < self.p);
        if self.level == 0 {
            Value::Base(r)
        } else {
            let s = self.sub();
            let c = s.from_residue(r);
            let num = if r == 0 { Vec::new() } else { vec![c] };
            Value::Frac(Box::new(Frac { num, den: vec![s.one()] }))
        }
    }

    /// The variable of this level, as an element of this level.
    pub fn var(self) -> Value {
        let s = self.sub();
        Value::Frac(Box::new(Frac { num: vec![s.zero(), s.one()], den: vec![s.one()] }))
    }

    /// Embeds a value from level `self.level - 1`.
    pub fn embed(self, c: Value) -> Value {
        let s = self.sub();
        let num = if s.is_zero(&c) { Vec::new() } else { vec![c] };
        Value::Frac(Box::new(Frac { num, den: vec![s.one()] }))
    }

    pub fn is_zero(self, a: &Value) -> bool {
        match a {
            Value::Base(x) => *x == 0,
            Value::Frac(f) => f.num.is_empty(),
        }
    }

    pub fn is_one(self, a: &Value) -> bool {
        match a {
            Value::Base(x) => *x == 1,
            Value::Frac(f) => f.den.len() == 1 && f.num.len() == 1 && self.sub().is_one(&f.num[0]),
        }
    }

    /// Returns the level-0 residue if `a` is a constant.
    pub fn as_residue(self, a: &Value) -> Option<u32> {
        match a {
            Value::Base(x) => Some(*x),
            Value::Frac(f) => {
                if f.num.is_empty() {
                    Some(0)
                } else if f.num.len() == 1 && f.den.len() == 1 {
                    self.sub().as_residue(&f.num[0])
                } else {
                    None
                }
            }
        }
    }

    fn frac(self, a: &Value) -> &Frac {
        match a {
            Value::Frac(f) => f,
            Value::Base(_) => unreachable!("base value at level {}", self.level),
        }
    }

    fn base(self, a: &Value) -> u32 {
        match a {
            Value::Base(x) => *x,
            Value::Frac(_) => unreachable!("fraction at level 0"),
        }
    }

    pub fn add(self, a: &Value, b: &Value) -> Value {
        if self.level == 0 {
            return Value::Base((self.base(a) + self.base(b)) % self.p);
        }
        let (fa, fb) = (self.frac(a), self.frac(b));
        if fa.num.is_empty() {
            return b.clone();
        }
        if fb.num.is_empty() {
            return a.clone();
        }
        let s = self.sub();
        if fa.den == fb.den {
            let num = s.poly_add(&fa.num, &fb.num);
            return self.make_frac(num, fa.den.clone());
        }
        let num = s.poly_add(&s.poly_mul(&fa.num, &fb.den), &s.poly_mul(&fb.num, &fa.den));
        let den = s.poly_mul(&fa.den, &fb.den);
        self.make_frac(num, den)
    }

    pub fn neg(self, a: &Value) -> Value {
        if self.level == 0 {
            let x = self.base(a);
            return Value::Base(if x == 0 { 0 } else { self.p - x });
        }
        let f = self.frac(a);
        let s = self.sub();
        Value::Frac(Box::new(Frac { num: s.poly_neg(&f.num), den: f.den.clone() }))
    }

    pub fn sub_values(self, a: &Value, b: &Value) -> Value {
        self.add(a, &self.neg(b))
    }

    pub fn mul(self, a: &Value, b: &Value) -> Value {
        if self.level == 0 {
            return Value::Base(((self.base(a) as u64 * self.base(b) as u64) % self.p as u64) as u32);
        }
        let (fa, fb) = (self.frac(a), self.frac(b));
        if fa.num.is_empty() || fb.num.is_empty() {
            return self.zero();
        }
        let s = self.sub();
        // cross-cancel before multiplying keeps the operands small
        let g1 = s.poly_gcd(&fa.num, &fb.den);
        let g2 = s.poly_gcd(&fb.num, &fa.den);
        let an = s.poly_div_exact(&fa.num, &g1);
        let bd = s.poly_div_exact(&fb.den, &g1);
        let bn = s.poly_div_exact(&fb.num, &g2);
        let ad = s.poly_div_exact(&fa.den, &g2);
        let num = s.poly_mul(&an, &bn);
        let den = s.poly_mul(&ad, &bd);
        // already coprime; only the leading coefficient needs fixing
        self.normalize_den(num, den)
    }

    pub fn inv(self, a: &Value) -> Option<Value> {
        if self.is_zero(a) {
            return None;
        }
        if self.level == 0 {
            return Some(Value::Base(pow_mod(self.base(a), (self.p - 2) as u64, self.p)));
        }
        let f = self.frac(a);
        Some(self.normalize_den(f.den.clone(), f.num.clone()))
    }

    pub fn div(self, a: &Value, b: &Value) -> Option<Value> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(self, a: &Value, e: i64) -> Option<Value> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Some(acc)
    }

    /// `a^q` for `q` a power of p. Canonical form is preserved, no gcd needed.
    pub fn frobenius(self, a: &Value, q: u64) -> Value {
        if self.level == 0 || q == 1 {
            return a.clone();
        }
        let f = self.frac(a);
        let s = self.sub();
        Value::Frac(Box::new(Frac { num: s.poly_frobenius(&f.num, q), den: s.poly_frobenius(&f.den, q) }))
    }

    /// Inverse of [`Level::frobenius`]; `None` when `a` is not a q-th power.
    pub fn frobenius_root(self, a: &Value, q: u64) -> Option<Value> {
        if self.level == 0 || q == 1 {
            return Some(a.clone());
        }
        let f = self.frac(a);
        let s = self.sub();
        Some(Value::Frac(Box::new(Frac {
            num: s.poly_frobenius_root(&f.num, q)?,
            den: s.poly_frobenius_root(&f.den, q)?,
        })))
    }

    /// Builds a canonical fraction from arbitrary `num` and nonzero `den`.
    pub fn make_frac(self, num: Vec<Value>, den: Vec<Value>) -> Value {
        debug_assert!(!den.is_empty());
        let s = self.sub();
        if num.is_empty() {
            return self.zero();
        }
        if den.len() == 1 {
            return self.normalize_den(num, den);
        }
        let g = s.poly_gcd(&num, &den);
        if g.len() > 1 {
            let num = s.poly_div_exact(&num, &g);
            let den = s.poly_div_exact(&den, &g);
            self.normalize_den(num, den)
        } else {
            self.normalize_den(num, den)
        }
    }

    /// Makes the denominator monic; assumes `gcd(num, den) = 1`.
    fn normalize_den(self, num: Vec<Value>, den: Vec<Value>) -> Value {
        let s = self.sub();
        let lc = den.last().expect("nonzero denominator");
        if s.is_one(lc) {
            return Value::Frac(Box::new(Frac { num, den }));
        }
        let lci = s.inv(lc).expect("leading coefficient is nonzero");
        Value::Frac(Box::new(Frac { num: s.poly_scale(&num, &lci), den: s.poly_scale(&den, &lci) }))
    }

    // ---- dense polynomials with coefficients at this level ----

    pub fn poly_trim(self, mut a: Vec<Value>) -> Vec<Value> {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
        a
    }

    pub fn poly_add(self, a: &[Value], b: &[Value]) -> Vec<Value> {
        let n = max(a.len(), b.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        self.poly_trim(out)
    }

    pub fn poly_neg(self, a: &[Value]) -> Vec<Value> {
        a.iter().map(|c| self.neg(c)).collect()
    }

    pub fn poly_scale(self, a: &[Value], c: &Value) -> Vec<Value> {
        if self.is_zero(c) {
            return Vec::new();
        }
        if self.is_one(c) {
            return a.to_vec();
        }
        a.iter().map(|x| self.mul(x, c)).collect()
    }

    pub fn poly_mul(self, a: &[Value], b: &[Value]) -> Vec<Value> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        if a.len() == 1 {
            return self.poly_scale(b, &a[0]);
        }
        if b.len() == 1 {
            return self.poly_scale(a, &b[0]);
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.is_zero(y) {
                    continue;
                }
                let t = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        self.poly_trim(out)
    }

    pub fn poly_pow(self, a: &[Value], mut e: u64) -> Vec<Value> {
        let mut acc = vec![self.one()];
        let mut sq = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.poly_mul(&sq, &sq);
            }
        }
        acc
    }

    /// Euclidean division; `b` must be nonzero.
    pub fn poly_divrem(self, a: &[Value], b: &[Value]) -> (Vec<Value>, Vec<Value>) {
        debug_assert!(!b.is_empty());
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let lb = b.last().unwrap();
        let lbi = self.inv(lb).unwrap();
        let monic_b = self.is_one(lb);
        let mut rem = a.to_vec();
        let mut quot = vec![self.zero(); a.len() - b.len() + 1];
        while rem.len() >= b.len() {
            let shift = rem.len() - b.len();
            let lr = rem.last().unwrap();
            let c = if monic_b { lr.clone() } else { self.mul(lr, &lbi) };
            for (i, bc) in b.iter().enumerate() {
                if self.is_zero(bc) {
                    continue;
                }
                let t = self.mul(&c, bc);
                rem[shift + i] = self.sub_values(&rem[shift + i], &t);
            }
            quot[shift] = c;
            rem = self.poly_trim(rem);
        }
        (self.poly_trim(quot), rem)
    }

    pub fn poly_div_exact(self, a: &[Value], b: &[Value]) -> Vec<Value> {
        if b.len() == 1 && self.is_one(&b[0]) {
            return a.to_vec();
        }
        let (q, r) = self.poly_divrem(a, b);
        debug_assert!(r.is_empty(), "inexact polynomial division");
        q
    }

    pub fn poly_monic(self, a: Vec<Value>) -> Vec<Value> {
        match a.last() {
            None => a,
            Some(lc) if self.is_one(lc) => a,
            Some(lc) => {
                let lci = self.inv(lc).unwrap();
                self.poly_scale(&a, &lci)
            }
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn poly_gcd(self, a: &[Value], b: &[Value]) -> Vec<Value> {
        let one_like = |p: &[Value]| p.len() == 1;
        if one_like(a) && !b.is_empty() || one_like(b) && !a.is_empty() {
            return vec![self.one()];
        }
        let (mut x, mut y) = if a.len() >= b.len() { (a.to_vec(), b.to_vec()) } else { (b.to_vec(), a.to_vec()) };
        while !y.is_empty() {
            let (_, r) = self.poly_divrem(&x, &y);
            x = y;
            y = self.poly_monic(r);
        }
        self.poly_monic(x)
    }

    pub fn poly_frobenius(self, a: &[Value], q: u64) -> Vec<Value> {
        if a.is_empty() {
            return Vec::new();
        }
        let q = q as usize;
        let mut out = vec![self.zero(); (a.len() - 1) * q + 1];
        for (i, c) in a.iter().enumerate() {
            if !self.is_zero(c) {
                out[i * q] = self.frobenius(c, q as u64);
            }
        }
        out
    }

    pub fn poly_frobenius_root(self, a: &[Value], q: u64) -> Option<Vec<Value>> {
        if a.is_empty() {
            return Some(Vec::new());
        }
        let q = q as usize;
        if !(a.len() - 1).is_multiple_of(q) {
            return None;
        }
        let mut out = Vec::with_capacity((a.len() - 1) / q + 1);
        for (i, c) in a.iter().enumerate() {
            if i % q == 0 {
                out.push(self.frobenius_root(c, q as u64)?);
            } else if !self.is_zero(c) {
                return None;
            }
        }
        Some(out)
    }

    /// Lowest nonzero index and the valuation of that coefficient, concatenated.
    pub fn valuation(self, a: &Value) -> Option<Vec<i64>> {
        match a {
            Value::Base(x) => (*x != 0).then(Vec::new),
            Value::Frac(f) => {
                let vn = self.sub().poly_valuation(&f.num)?;
                let vd = self.sub().poly_valuation(&f.den).expect("nonzero denominator");
                Some(vn.iter().zip(&vd).map(|(x, y)| x - y).collect())
            }
        }
    }

    fn poly_valuation(self, a: &[Value]) -> Option<Vec<i64>> {
        let (i0, c) = a.iter().enumerate().find(|(_, c)| !self.is_zero(c))?;
        let mut v = self.valuation(c).expect("nonzero coefficient");
        v.push(i0 as i64);
        Some(v)
    }

    /// Coordinates of `a` over the q-th powers in the monomial basis
    /// `x_1^{j_1}...x_level^{j_level}`, `0 <= j_i < q`: `a = sum c_J^q x^J`.
    pub fn decompose(self, a: &Value, q: u64) -> Vec<(Vec<u32>, Value)> {
        if self.is_zero(a) {
            return Vec::new();
        }
        if self.level == 0 {
            return vec![(Vec::new(), a.clone())];
        }
        let f = self.frac(a);
        let s = self.sub();
        let qs = q as usize;
        // a = num*den^(q-1) / den^q
        let num = if f.den.len() == 1 { f.num.clone() } else { s.poly_mul(&f.num, &s.poly_pow(&f.den, q - 1)) };
        let mut buckets: BTreeMap<Vec<u32>, Vec<Value>> = BTreeMap::new();
        for (i, c) in num.iter().enumerate() {
            if s.is_zero(c) {
                continue;
            }
            let (j, k) = ((i % qs) as u32, i / qs);
            for (mut idx, coord) in s.decompose(c, q) {
                idx.push(j);
                let poly = buckets.entry(idx).or_default();
                if poly.len() <= k {
                    poly.resize(k + 1, s.zero());
                }
                poly[k] = s.add(&poly[k], &coord);
            }
        }
        buckets
            .into_iter()
            .filter_map(|(idx, poly)| {
                let poly = s.poly_trim(poly);
                (!poly.is_empty()).then(|| (idx, self.make_frac(poly, f.den.clone())))
            })
            .collect()
    }

    /// Inverse of [`Level::decompose`], for indices in `[0, q)`. Coordinates
    /// sharing a denominator are summed numerator-wise, coefficient by
    /// coefficient one level down, so each distinct denominator costs one gcd.
    pub fn recompose(self, coords: &[(Vec<u32>, Value)], q: u64) -> Value {
        if self.level == 0 {
            return coords.iter().fold(self.zero(), |acc, (_, c)| self.add(&acc, c));
        }
        let s = self.sub();
        let qs = q as usize;
        // per denominator: (outer index j, power k) -> inner coordinates
        let mut groups: Vec<(&Vec<Value>, ByPower)> = Vec::new();
        for (idx, c) in coords {
            if self.is_zero(c) {
                continue;
            }
            let (inner, j) = idx.split_at(idx.len() - 1);
            let f = self.frac(c);
            let pos = match groups.iter().position(|(d, _)| *d == &f.den) {
                Some(pos) => pos,
                None => {
                    groups.push((&f.den, BTreeMap::new()));
                    groups.len() - 1
                }
            };
            for (k, a) in f.num.iter().enumerate() {
                if !s.is_zero(a) {
                    groups[pos].1.entry((j[0] as usize, k)).or_default().push((inner.to_vec(), a.clone()));
                }
            }
        }
        groups.into_iter().fold(self.zero(), |acc, (den, terms)| {
            let mut num = Vec::new();
            for ((j, k), inner) in terms {
                let i = k * qs + j;
                if num.len() <= i {
                    num.resize(i + 1, s.zero());
                }
                num[i] = s.add(&num[i], &s.recompose(&inner, q));
            }
            let term = self.make_frac(s.poly_trim(num), s.poly_frobenius(den, q));
            self.add(&acc, &term)
        })
    }
}

pub(crate) fn pow_mod(b: u32, mut e: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64;
    let mut base = b as u64 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc as u32
}
