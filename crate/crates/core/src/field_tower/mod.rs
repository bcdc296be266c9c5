//! Exact arithmetic in `k = F_p(t_1, ..., t_r)`.
//!
//! Elements are stored recursively: an element of `F_p(t_1..t_r)` is a reduced
//! fraction of polynomials in `t_r` over `F_p(t_1..t_{r-1})`. The innermost
//! variable is `t_1`, the outermost `t_r`.

mod arith;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

pub(crate) use arith::{Level, Value};
pub(crate) use parse::is_identifier;
pub use parse::ParseError;

use crate::valgroup::ValGroupElement;

/// Largest supported characteristic.
pub const MAX_PRIME: u32 = 13;
/// Largest supported number of transcendental variables.
pub const MAX_DEPTH: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not a prime in [2, {MAX_PRIME}]")]
    BadPrime(u32),
    #[error("tower depth {0} exceeds {MAX_DEPTH}")]
    TooDeep(usize),
    #[error("invalid variable name {0:?}")]
    BadVariable(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different towers")]
    TowerMismatch,
    #[error("element is not a p^{0}-th power")]
    NotAPthPower(u32),
}

/// Characteristic and variable names of a tower `F_p(t_1, ..., t_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerDesc {
    p: u32,
    vars: Vec<String>,
}

impl TowerDesc {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of transcendental variables, `r`.
    pub fn depth(&self) -> usize {
        self.vars.len()
    }

    /// Length of value-group vectors: the depth, or 1 for `F_p` itself.
    pub fn rank(&self) -> usize {
        self.depth().max(1)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// Shared handle to a [`TowerDesc`].
#[derive(Debug, Clone)]
pub struct Tower(Arc<TowerDesc>);

impl Tower {
    pub fn new<S: AsRef<str>>(p: u32, vars: &[S]) -> Result<Self, FieldError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(FieldError::BadPrime(p));
        }
        if vars.len() > MAX_DEPTH {
            return Err(FieldError::TooDeep(vars.len()));
        }
        let mut names: Vec<String> = Vec::with_capacity(vars.len());
        for v in vars {
            let v = v.as_ref();
            if !parse::is_identifier(v) {
                return Err(FieldError::BadVariable(v.to_string()));
            }
            if names.iter().any(|n| n == v) {
                return Err(FieldError::DuplicateVariable(v.to_string()));
            }
            names.push(v.to_string());
        }
        Ok(Tower(Arc::new(TowerDesc { p, vars: names })))
    }

    pub(crate) fn level(&self) -> Level {
        Level::new(self.p, self.depth())
    }

    pub fn zero(&self) -> TowerElement {
        self.wrap(self.level().zero())
    }

    pub fn one(&self) -> TowerElement {
        self.wrap(self.level().one())
    }

    pub fn from_int(&self, n: i64) -> TowerElement {
        self.wrap(self.level().from_int(n))
    }

    /// The variable `t_{i+1}` (zero-based index).
    pub fn var(&self, i: usize) -> TowerElement {
        assert!(i < self.depth(), "variable index {i} out of range");
        let mut v = Level::new(self.p, i + 1).var();
        for lvl in i + 2..=self.depth() {
            v = Level::new(self.p, lvl).embed(v);
        }
        self.wrap(v)
    }

    /// The monomial `t_1^{e_1} ... t_r^{e_r}`; `exps` may be shorter than the depth.
    pub fn monomial(&self, exps: &[i64]) -> TowerElement {
        assert!(exps.len() <= self.depth() || exps.iter().all(|&e| e == 0));
        let mut acc = self.one();
        for (i, &e) in exps.iter().enumerate() {
            if e != 0 {
                acc = &acc * &self.var(i).powi(e).expect("variables are nonzero");
            }
        }
        acc
    }

    /// Monomial whose valuation is the given value-group element.
    pub fn monomial_with_valuation(&self, g: &ValGroupElement) -> TowerElement {
        if self.depth() == 0 {
            return self.one();
        }
        self.monomial(g.coords())
    }

    pub fn parse(&self, src: &str) -> Result<TowerElement, ParseError> {
        parse::parse_element(self, src)
    }

    /// A random element: numerator and denominator of degree `<= max_deg` in
    /// every variable. Denominators are nonzero; the result may be zero.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: usize) -> TowerElement {
        self.wrap(random_value(self.level(), rng, max_deg))
    }

    /// A random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, max_deg: usize) -> TowerElement {
        loop {
            let x = self.random(rng, max_deg);
            if !x.is_zero() {
                return x;
            }
        }
    }

    pub(crate) fn wrap(&self, v: Value) -> TowerElement {
        TowerElement { tower: self.clone(), v }
    }
}

fn random_value<R: Rng + ?Sized>(lvl: Level, rng: &mut R, max_deg: usize) -> Value {
    if lvl.level == 0 {
        return Value::Base(rng.gen_range(0..lvl.p));
    }
    let num = random_poly(lvl.sub(), rng, max_deg, true);
    let den = if rng.gen_bool(0.4) { vec![lvl.sub().one()] } else { random_poly(lvl.sub(), rng, max_deg, false) };
    lvl.make_frac(num, den)
}

fn random_poly<R: Rng + ?Sized>(s: Level, rng: &mut R, max_deg: usize, allow_zero: bool) -> Vec<Value> {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let coeffs: Vec<Value> = (0..=deg)
            .map(|_| if rng.gen_bool(0.3) { s.zero() } else { random_value(s, rng, max_deg.min(1)) })
            .collect();
        let coeffs = s.poly_trim(coeffs);
        if allow_zero || !coeffs.is_empty() {
            return coeffs;
        }
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Tower {}

impl Hash for Tower {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Deref for Tower {
    type Target = TowerDesc;

    fn deref(&self) -> &TowerDesc {
        &self.0
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.vars.is_empty() {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}({})", self.p, self.vars.join(","))
        }
    }
}

/// Arithmetic operation selector for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An exact element of a tower field, always in canonical form.
#[derive(Clone)]
pub struct TowerElement {
    tower: Tower,
    v: Value,
}

/// Checked binary arithmetic.
pub fn arith(a: &TowerElement, b: &TowerElement, op: ArithOp) -> Result<TowerElement, FieldError> {
    if a.tower != b.tower {
        return Err(FieldError::TowerMismatch);
    }
    let l = a.tower.level();
    let v = match op {
        ArithOp::Add => l.add(&a.v, &b.v),
        ArithOp::Sub => l.sub_values(&a.v, &b.v),
        ArithOp::Mul => l.mul(&a.v, &b.v),
        ArithOp::Div => l.div(&a.v, &b.v).ok_or(FieldError::DivisionByZero)?,
    };
    Ok(a.tower.wrap(v))
}

impl TowerElement {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.tower.level().is_zero(&self.v)
    }

    pub fn is_one(&self) -> bool {
        self.tower.level().is_one(&self.v)
    }

    /// The residue mod p if this element is a constant.
    pub fn as_constant(&self) -> Option<u32> {
        self.tower.level().as_residue(&self.v)
    }

    pub fn inv(&self) -> Result<TowerElement, FieldError> {
        self.tower.level().inv(&self.v).map(|v| self.tower.wrap(v)).ok_or(FieldError::DivisionByZero)
    }

    pub fn powi(&self, e: i64) -> Result<TowerElement, FieldError> {
        self.tower.level().pow(&self.v, e).map(|v| self.tower.wrap(v)).ok_or(FieldError::DivisionByZero)
    }

    /// `p^d` as an exponent for this tower.
    pub fn frobenius_exponent(&self, d: u32) -> u64 {
        (self.tower.p as u64).pow(d)
    }

    /// `a^{p^d}`.
    pub fn pth_power(&self, d: u32) -> TowerElement {
        let q = self.frobenius_exponent(d);
        self.tower.wrap(self.tower.level().frobenius(&self.v, q))
    }

    /// The unique `x` with `x^{p^d} = self`.
    pub fn pth_root(&self, d: u32) -> Result<TowerElement, FieldError> {
        let q = self.frobenius_exponent(d);
        self.tower.level().frobenius_root(&self.v, q).map(|v| self.tower.wrap(v)).ok_or(FieldError::NotAPthPower(d))
    }

    /// Coordinates over `k^{p^d}` in the monomial basis: returns `{j -> a_j}`
    /// with `self = sum_j a_j^{p^d} t^j`, `0 <= j_i < p^d`. Keys are the
    /// exponent vectors (equivalently, the valuations of the basis monomials);
    /// zero coordinates are omitted.
    pub fn decompose(&self, d: u32) -> BTreeMap<ValGroupElement, TowerElement> {
        let q = self.frobenius_exponent(d);
        let rank = self.tower.rank();
        self.tower
            .level()
            .decompose(&self.v, q)
            .into_iter()
            .map(|(idx, c)| {
                let mut coords: Vec<i64> = idx.into_iter().map(i64::from).collect();
                coords.resize(rank, 0);
                (ValGroupElement::new(coords), self.tower.wrap(c))
            })
            .collect()
    }

    /// Valuation vector, or `None` for zero.
    pub(crate) fn raw_valuation(&self) -> Option<Vec<i64>> {
        let mut v = self.tower.level().valuation(&self.v)?;
        if v.is_empty() {
            v.push(0);
        }
        Some(v)
    }
}

/// Inverse of [`TowerElement::decompose`].
pub fn recompose(tower: &Tower, coords: &BTreeMap<ValGroupElement, TowerElement>, d: u32) -> TowerElement {
    let q = (tower.p() as u64).pow(d);
    let depth = tower.depth();
    let in_range = |j: &ValGroupElement| {
        j.coords().iter().enumerate().all(|(i, &c)| if i < depth { (0..q as i64).contains(&c) } else { c == 0 })
    };
    if depth == 0 || !coords.keys().all(in_range) {
        return coords
            .iter()
            .fold(tower.zero(), |acc, (j, a)| &acc + &(&a.pth_power(d) * &tower.monomial_with_valuation(j)));
    }
    let flat: Vec<(Vec<u32>, Value)> =
        coords.iter().map(|(j, a)| (j.coords()[..depth].iter().map(|&c| c as u32).collect(), a.v.clone())).collect();
    tower.wrap(tower.level().recompose(&flat, q))
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        self.tower == other.tower && self.v == other.v
    }
}

impl Eq for TowerElement {}

impl Hash for TowerElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state)
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_value(&self.tower, self.tower.depth(), &self.v))
    }
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self, self.tower)
    }
}

// Operator impls panic on tower mismatch or division by zero; use [`arith`]
// for the checked form.
macro_rules! binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl $tr<&TowerElement> for &TowerElement {
            type Output = TowerElement;

            fn $m(self, rhs: &TowerElement) -> TowerElement {
                arith(self, rhs, $op).expect(concat!("tower ", stringify!($m)))
            }
        }

        impl $tr<TowerElement> for TowerElement {
            type Output = TowerElement;

            fn $m(self, rhs: TowerElement) -> TowerElement {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl std::ops::Div<&TowerElement> for &TowerElement {
    type Output = TowerElement;

    fn div(self, rhs: &TowerElement) -> TowerElement {
        arith(self, rhs, ArithOp::Div).expect("tower division")
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;

    fn neg(self) -> TowerElement {
        self.tower.wrap(self.tower.level().neg(&self.v))
    }
}

impl Neg for TowerElement {
    type Output = TowerElement;

    fn neg(self) -> TowerElement {
        -&self
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}
