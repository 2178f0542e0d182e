//! Exact field arithmetic.
//!
//! Two implementations of [`Field`] are provided:
//!
//! - [`FiniteField`]: GF(p) and GF(p^m) for q = p^m up to 2^20 elements. An
//!   element is stored as the integer `c0 + c1*p + ... + c_{m-1}*p^(m-1)`
//!   where `c0 + c1*x + ...` is its residue modulo the defining polynomial.
//!   Multiplication goes through discrete-log tables built at construction.
//! - [`Rationals`]: arbitrary precision fractions in lowest terms.
//!
//! Elements carry no reference to their field; every operation is a method on
//! the field value, so the same `u32` may be read in different fields.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

/// Largest finite field we build tables for.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value {0} is not an element of this field")]
    NotInField(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("a field with {0} elements is larger than supported")]
    TooLarge(u64),
    #[error("zero has no square class")]
    ZeroSquareClass,
    #[error("operation needs odd characteristic")]
    EvenCharacteristic,
    #[error("field has no Frobenius involution (expected GF(q^2))")]
    NoFrobenius,
    #[error("cannot parse field element `{0}`")]
    Parse(String),
    #[error("invalid field spec: {0}")]
    Spec(String),
    #[error("cannot compute the squarefree part of {0}")]
    Unfactorable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A coset of k^x modulo squares.
///
/// Over a finite field of odd order there are exactly two classes. Over the
/// rationals a class is named by its squarefree integer representative; the
/// class of squares is always [`SquareClass::Trivial`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    Trivial,
    NonResidue,
    Squarefree(BigInt),
}

impl SquareClass {
    pub fn is_trivial(&self) -> bool {
        matches!(self, SquareClass::Trivial)
    }

    /// Product in k^x / k^x2.
    ///
    /// # Panics
    /// If a finite-field class is combined with a rational one.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        use SquareClass::*;
        match (self, other) {
            (Trivial, c) | (c, Trivial) => c.clone(),
            (NonResidue, NonResidue) => Trivial,
            (Squarefree(a), Squarefree(b)) => {
                let g = a.gcd(b);
                let v = (a / &g) * (b / &g);
                if v.is_one() {
                    Trivial
                } else {
                    Squarefree(v)
                }
            }
            _ => panic!("mixed finite and rational square classes"),
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SquareClass::Trivial => write!(f, "trivial"),
            SquareClass::NonResidue => write!(f, "nonresidue"),
            SquareClass::Squarefree(d) => write!(f, "{d}"),
        }
    }
}

/// Serializable description of a field, as used in JSON files and on the
/// command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSpec {
    Finite { p: u32, m: u32, modulus: Option<Vec<u32>> },
    Rational,
}

impl FieldSpec {
    /// `{"p": 3, "m": 2, "modulus": [1,0,1]}` or `{"rational": true}`.
    pub fn from_json(v: &Value) -> Result<FieldSpec, FieldError> {
        let obj = v
            .as_object()
            .ok_or_else(|| FieldError::Spec("expected a JSON object".into()))?;
        if obj.get("rational").and_then(Value::as_bool) == Some(true) {
            return Ok(FieldSpec::Rational);
        }
        let p = obj
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| FieldError::Spec("missing `p`".into()))?;
        let m = obj.get("m").and_then(Value::as_u64).unwrap_or(1);
        let modulus = match obj.get("modulus") {
            None | Some(Value::Null) => None,
            Some(Value::Array(cs)) => Some(
                cs.iter()
                    .map(|c| {
                        c.as_u64()
                            .map(|c| c as u32)
                            .ok_or_else(|| FieldError::Spec("modulus coefficients must be integers".into()))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Some(_) => return Err(FieldError::Spec("`modulus` must be an array".into())),
        };
        Ok(FieldSpec::Finite { p: p as u32, m: m as u32, modulus })
    }

    pub fn to_json(&self) -> Value {
        match self {
            FieldSpec::Rational => json!({ "rational": true }),
            FieldSpec::Finite { p, m, modulus } => {
                if *m == 1 {
                    json!({ "p": p })
                } else {
                    json!({ "p": p, "m": m, "modulus": modulus })
                }
            }
        }
    }

    /// Command-line syntax: `p=7`, `p=3,m=2`, `q=9`, `rational`.
    pub fn parse_cli(s: &str) -> Result<FieldSpec, FieldError> {
        let s = s.trim();
        if s == "rational" || s == "q" || s == "Q" {
            return Ok(FieldSpec::Rational);
        }
        let mut p = None;
        let mut m = 1u32;
        let mut q = None;
        for part in s.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| FieldError::Spec(format!("expected key=value in `{part}`")))?;
            let val: u64 = val
                .trim()
                .parse()
                .map_err(|_| FieldError::Spec(format!("bad number in `{part}`")))?;
            match key.trim() {
                "p" => p = Some(val),
                "m" => m = val as u32,
                "q" => q = Some(val),
                other => return Err(FieldError::Spec(format!("unknown key `{other}`"))),
            }
        }
        if let Some(q) = q {
            let (p, m) = prime_power(q).ok_or(FieldError::Spec(format!("{q} is not a prime power")))?;
            return Ok(FieldSpec::Finite { p: p as u32, m, modulus: None });
        }
        let p = p.ok_or_else(|| FieldError::Spec("missing p".into()))?;
        Ok(FieldSpec::Finite { p: p as u32, m, modulus: None })
    }
}

/// Arithmetic in an exact field.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    /// Number of elements, `None` when infinite.
    fn order(&self) -> Option<u64>;
    /// Whether `a` is a canonical encoding of an element of this field.
    fn contains(&self, a: &Self::Elem) -> bool;

    fn square_class(&self, a: &Self::Elem) -> Result<SquareClass, FieldError>;
    /// A square root of `a` if one exists; of the two roots the one with the
    /// smaller canonical encoding is returned.
    fn sqrt(&self, a: &Self::Elem) -> Result<Option<Self::Elem>, FieldError>;
    /// `a -> a^q` on GF(q^2).
    fn frobenius(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;

    /// All elements in canonical order, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    /// Deterministic map from 64 random bits to an element.
    fn element_from_bits(&self, bits: u64) -> Self::Elem;

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem, FieldError>;
    fn elem_to_json(&self, a: &Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem, FieldError>;
    fn spec(&self) -> FieldSpec;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        let inv = self.inv(b).ok_or(FieldError::DivisionByZero)?;
        Ok(self.mul(a, &inv))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Checked binary operation.
    fn arith(&self, a: &Self::Elem, b: &Self::Elem, op: ArithOp) -> Result<Self::Elem, FieldError> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(FieldError::NotInField(format!("{x:?}")));
            }
        }
        Ok(match op {
            ArithOp::Add => self.add(a, b),
            ArithOp::Sub => self.sub(a, b),
            ArithOp::Mul => self.mul(a, b),
            ArithOp::Div => self.div(a, b)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Finite fields
// ---------------------------------------------------------------------------

#[derive(Clone)]
pub struct FiniteField(Arc<GfInner>);

struct GfInner {
    p: u32,
    m: u32,
    q: u32,
    /// Monic, constant-first, length m + 1.
    modulus: Vec<u32>,
    /// exp[k] = g^k for k in 0..2(q-1).
    exp: Vec<u32>,
    /// log[a] for a != 0.
    log: Vec<u32>,
    neg: Vec<u32>,
    /// Full addition table when m > 1 and q is small.
    add: Option<Vec<u32>>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "GF({})", self.0.p)
        } else {
            write!(f, "GF({}^{}; modulus {:?})", self.0.p, self.0.m, self.0.modulus)
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^m` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Polynomials over GF(p) as constant-first coefficient vectors. Only used to
/// set up the tables.
mod gfp {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap() as u64;
            let shift = r.len() - 1 - dm;
            for (k, &c) in m.iter().enumerate() {
                let sub = lead * c as u64 % p as u64;
                r[shift + k] = ((r[shift + k] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    /// Monic polynomials of exact degree `d`, non-leading coefficients
    /// enumerated lexicographically with the constant term most significant.
    pub fn monic_of_degree(d: usize, p: u32) -> impl Iterator<Item = Vec<u32>> {
        let total = (p as u64).pow(d as u32);
        (0..total).map(move |mut idx| {
            let mut c = vec![0u32; d + 1];
            c[d] = 1;
            for k in (0..d).rev() {
                c[k] = (idx % p as u64) as u32;
                idx /= p as u64;
            }
            c
        })
    }

    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let d = f.len() - 1;
        if d == 0 {
            return false;
        }
        for e in 1..=d / 2 {
            for g in monic_of_degree(e, p) {
                if rem_monic(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

impl FiniteField {
    /// GF(p).
    pub fn prime(p: u32) -> Result<FiniteField, FieldError> {
        FiniteField::with_modulus(p, vec![0, 1])
    }

    /// GF(p^m) with the default modulus: the monic irreducible of degree m
    /// whose coefficient tuple (constant term first) is lexicographically
    /// smallest.
    pub fn new(p: u32, m: u32) -> Result<FiniteField, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if m == 0 {
            return Err(FieldError::InvalidModulus("degree must be positive".into()));
        }
        if (p as u64).checked_pow(m).is_none_or(|q| q > MAX_FIELD_ORDER) {
            return Err(FieldError::TooLarge((p as u64).saturating_pow(m)));
        }
        if m == 1 {
            return FiniteField::prime(p);
        }
        let modulus = gfp::monic_of_degree(m as usize, p)
            .find(|f| gfp::is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        FiniteField::with_modulus(p, modulus)
    }

    /// GF(q) for a prime power q, default modulus.
    pub fn gf(q: u64) -> Result<FiniteField, FieldError> {
        let (p, m) = prime_power(q).ok_or(FieldError::Spec(format!("{q} is not a prime power")))?;
        FiniteField::new(p as u32, m)
    }

    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<FiniteField, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(FieldError::InvalidModulus("modulus must be monic of positive degree".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::InvalidModulus("coefficients must lie in [0, p)".into()));
        }
        let m = (modulus.len() - 1) as u32;
        let q64 = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if q64 > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q64));
        }
        if m > 1 && !gfp::is_irreducible(&modulus, p) {
            return Err(FieldError::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        let q = q64 as u32;
        let digits = |mut a: u32| -> Vec<u32> {
            let mut d = vec![0u32; m as usize];
            for c in d.iter_mut() {
                *c = a % p;
                a /= p;
            }
            d
        };
        let encode = |d: &[u32]| -> u32 { d.iter().rev().fold(0u32, |acc, &c| acc * p + c) };
        let slow_mul = |a: u32, b: u32| -> u32 {
            if m == 1 {
                return ((a as u64 * b as u64) % p as u64) as u32;
            }
            let prod = gfp::mul(&gfp::trim(digits(a)), &gfp::trim(digits(b)), p);
            let mut r = gfp::rem_monic(&prod, &modulus, p);
            r.resize(m as usize, 0);
            encode(&r)
        };

        // Find a generator of the multiplicative group.
        let mut exp = Vec::new();
        for cand in 2..q.max(3) {
            if cand >= q {
                break;
            }
            let mut powers = Vec::with_capacity((q - 1) as usize);
            let mut x = 1u32;
            loop {
                powers.push(x);
                x = slow_mul(x, cand);
                if x == 1 || powers.len() as u32 > q - 1 {
                    break;
                }
            }
            if powers.len() as u32 == q - 1 {
                exp = powers;
                break;
            }
        }
        if q == 2 {
            exp = vec![1];
        }
        let mut log = vec![0u32; q as usize];
        for (k, &x) in exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let doubled: Vec<u32> = exp.iter().chain(exp.iter()).copied().collect();
        let neg: Vec<u32> = (0..q)
            .map(|a| encode(&digits(a).iter().map(|&c| (p - c) % p).collect::<Vec<_>>()))
            .collect();
        let add = (m > 1 && q <= 1024).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                let da = digits(a);
                for b in 0..q {
                    let db = digits(b);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = encode(&s);
                }
            }
            t
        });
        Ok(FiniteField(Arc::new(GfInner { p, m, q, modulus, exp: doubled, log, neg, add })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.m
    }

    pub fn size(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Coefficients of `a`, constant term first.
    pub fn coefficients(&self, mut a: u32) -> Vec<u32> {
        let mut d = vec![0u32; self.0.m as usize];
        for c in d.iter_mut() {
            *c = a % self.0.p;
            a /= self.0.p;
        }
        d
    }

    pub fn from_coefficients(&self, cs: &[u32]) -> Result<u32, FieldError> {
        if cs.len() > self.0.m as usize || cs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::NotInField(format!("{cs:?}")));
        }
        Ok(cs.iter().rev().fold(0u32, |acc, &c| acc * self.0.p + c))
    }

    /// Discrete log with respect to the table generator.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.0.log[a as usize])
    }

    /// The generator used for the log tables; it is the primitive element
    /// with the smallest encoding.
    pub fn primitive_element(&self) -> u32 {
        self.0.exp[if self.0.q == 2 { 0 } else { 1 }]
    }

    /// For GF(q^2), the subfield order q.
    pub fn half_order(&self) -> Option<u32> {
        self.0.m.is_multiple_of(2).then(|| self.0.p.pow(self.0.m / 2))
    }

    /// Canonical representative of a square class: 1 for the trivial class;
    /// the smallest non-residue for prime fields; the table generator for
    /// extensions.
    pub fn square_class_representative(&self, c: &SquareClass) -> Option<u32> {
        match c {
            SquareClass::Trivial => Some(1),
            SquareClass::NonResidue if self.0.p != 2 => {
                if self.0.m == 1 {
                    (1..self.0.q).find(|&a| self.0.log[a as usize] % 2 == 1)
                } else {
                    Some(self.primitive_element())
                }
            }
            _ => None,
        }
    }
}

impl Field for FiniteField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.0.p as i64) as u32
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let g = &*self.0;
        if g.m == 1 {
            let s = a + b;
            if s >= g.p {
                s - g.p
            } else {
                s
            }
        } else if let Some(t) = &g.add {
            t[(*a * g.q + *b) as usize]
        } else {
            let (mut x, mut y, mut out, mut place) = (*a, *b, 0u32, 1u32);
            for _ in 0..g.m {
                out += ((x % g.p + y % g.p) % g.p) * place;
                x /= g.p;
                y /= g.p;
                place *= g.p;
            }
            out
        }
    }

    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.0.neg[*b as usize])
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let g = &*self.0;
        if g.m == 1 {
            return ((*a as u64 * *b as u64) % g.p as u64) as u32;
        }
        g.exp[(g.log[*a as usize] + g.log[*b as usize]) as usize]
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        self.0.neg[*a as usize]
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let g = &*self.0;
        let qm1 = g.q - 1;
        Some(g.exp[((qm1 - g.log[*a as usize]) % qm1) as usize])
    }

    fn characteristic(&self) -> u64 {
        self.0.p as u64
    }

    fn order(&self) -> Option<u64> {
        Some(self.0.q as u64)
    }

    fn contains(&self, a: &u32) -> bool {
        *a < self.0.q
    }

    fn square_class(&self, a: &u32) -> Result<SquareClass, FieldError> {
        if self.0.p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if *a == 0 {
            return Err(FieldError::ZeroSquareClass);
        }
        // Euler's criterion: a^((q-1)/2) = 1 iff the discrete log is even.
        Ok(if self.0.log[*a as usize].is_multiple_of(2) {
            SquareClass::Trivial
        } else {
            SquareClass::NonResidue
        })
    }

    fn sqrt(&self, a: &u32) -> Result<Option<u32>, FieldError> {
        if self.0.p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if *a == 0 {
            return Ok(Some(0));
        }
        let k = self.0.log[*a as usize];
        if k % 2 == 1 {
            return Ok(None);
        }
        let r = self.0.exp[(k / 2) as usize];
        Ok(Some(r.min(self.neg(&r))))
    }

    fn frobenius(&self, a: &u32) -> Result<u32, FieldError> {
        let half = self.half_order().ok_or(FieldError::NoFrobenius)?;
        if *a == 0 {
            return Ok(0);
        }
        let qm1 = (self.0.q - 1) as u64;
        let k = (self.0.log[*a as usize] as u64 * half as u64) % qm1;
        Ok(self.0.exp[k as usize])
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.0.q).collect())
    }

    fn element_from_bits(&self, bits: u64) -> u32 {
        (bits % self.0.q as u64) as u32
    }

    fn format(&self, a: &u32) -> String {
        if self.0.m == 1 {
            a.to_string()
        } else {
            let cs: Vec<String> = self.coefficients(*a).iter().map(u32::to_string).collect();
            format!("[{}]", cs.join(","))
        }
    }

    fn parse(&self, s: &str) -> Result<u32, FieldError> {
        let s = s.trim();
        if s.starts_with('[') {
            let v: Value = serde_json::from_str(s).map_err(|_| FieldError::Parse(s.into()))?;
            return self.elem_from_json(&v).map_err(|_| FieldError::Parse(s.into()));
        }
        let n: i64 = s.parse().map_err(|_| FieldError::Parse(s.into()))?;
        Ok(self.from_i64(n))
    }

    fn elem_to_json(&self, a: &u32) -> Value {
        if self.0.m == 1 {
            json!(a)
        } else {
            json!(self.coefficients(*a))
        }
    }

    fn elem_from_json(&self, v: &Value) -> Result<u32, FieldError> {
        match v {
            Value::Number(n) => {
                let n = n.as_i64().ok_or_else(|| FieldError::Parse(n.to_string()))?;
                Ok(self.from_i64(n))
            }
            Value::Array(cs) => {
                let cs = cs
                    .iter()
                    .map(|c| c.as_i64().map(|c| c.rem_euclid(self.0.p as i64) as u32))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| FieldError::Parse(v.to_string()))?;
                self.from_coefficients(&cs)
            }
            _ => Err(FieldError::Parse(v.to_string())),
        }
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Finite {
            p: self.0.p,
            m: self.0.m,
            modulus: (self.0.m > 1).then(|| self.0.modulus.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

/// Squarefree part of a nonzero integer, sign included.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt, FieldError> {
    const TRIAL_LIMIT: u64 = 1_000_000;
    let mut rest = n.abs();
    let mut out = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut d = 2u64;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > rest {
            if !rest.is_one() {
                out *= &rest;
            }
            return Ok(out);
        }
        if d > TRIAL_LIMIT {
            break;
        }
        let mut odd = false;
        while (&rest % &dd).is_zero() {
            rest /= &dd;
            odd = !odd;
        }
        if odd {
            out *= &dd;
        }
        d += 1;
    }
    // Every prime factor of `rest` exceeds the trial limit.
    let root = rest.sqrt();
    if &root * &root == rest {
        return Ok(out);
    }
    let cube = BigInt::from(TRIAL_LIMIT).pow(3);
    if rest < cube {
        out *= &rest;
        return Ok(out);
    }
    Err(FieldError::Unfactorable(n.to_string()))
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn contains(&self, a: &BigRational) -> bool {
        a.denom().is_positive() && a.numer().gcd(a.denom()).is_one()
    }

    fn square_class(&self, a: &BigRational) -> Result<SquareClass, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroSquareClass);
        }
        // n/d and n*d differ by the square d^2.
        let s = squarefree_part(&(a.numer() * a.denom()))?;
        Ok(if s.is_one() { SquareClass::Trivial } else { SquareClass::Squarefree(s) })
    }

    fn sqrt(&self, a: &BigRational) -> Result<Option<BigRational>, FieldError> {
        Ok(match (exact_sqrt(a.numer()), exact_sqrt(a.denom())) {
            (Some(n), Some(d)) => Some(BigRational::new(n, d)),
            _ => None,
        })
    }

    fn frobenius(&self, _a: &BigRational) -> Result<BigRational, FieldError> {
        Err(FieldError::NoFrobenius)
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }

    fn element_from_bits(&self, bits: u64) -> BigRational {
        let num = (bits % 19) as i64 - 9;
        let den = ((bits >> 8) % 4) as i64 + 1;
        BigRational::new(num.into(), den.into())
    }

    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn parse(&self, s: &str) -> Result<BigRational, FieldError> {
        let s = s.trim();
        let bad = || FieldError::Parse(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(BigRational::new(n, d))
    }

    fn elem_to_json(&self, a: &BigRational) -> Value {
        json!(format!("{}/{}", a.numer(), a.denom()))
    }

    fn elem_from_json(&self, v: &Value) -> Result<BigRational, FieldError> {
        match v {
            Value::String(s) => self.parse(s),
            Value::Number(n) => n
                .as_i64()
                .map(|n| self.from_i64(n))
                .ok_or_else(|| FieldError::Parse(n.to_string())),
            _ => Err(FieldError::Parse(v.to_string())),
        }
    }

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
}

impl Rationals {
    pub fn to_f64(&self, a: &BigRational) -> Option<f64> {
        a.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f = FiniteField::prime(7).unwrap();
        assert_eq!(f.arith(&3, &5, ArithOp::Add).unwrap(), 1);
        assert_eq!(f.inv(&3), Some(5));
        assert_eq!(f.arith(&3, &0, ArithOp::Div), Err(FieldError::DivisionByZero));
        assert!(matches!(f.arith(&9, &1, ArithOp::Add), Err(FieldError::NotInField(_))));
    }

    #[test]
    fn gf9_default_modulus_and_reduction() {
        let f = FiniteField::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        let x = f.from_coefficients(&[0, 1]).unwrap();
        assert_eq!(f.mul(&x, &x), 2);
    }

    #[test]
    fn frobenius_on_gf9() {
        let f = FiniteField::new(3, 2).unwrap();
        let x = f.from_coefficients(&[0, 1]).unwrap();
        let two_x = f.from_coefficients(&[0, 2]).unwrap();
        assert_eq!(f.frobenius(&x).unwrap(), two_x);
        for a in 0..3 {
            assert_eq!(f.frobenius(&a).unwrap(), a);
        }
        for a in f.elements().unwrap() {
            assert_eq!(f.frobenius(&f.frobenius(&a).unwrap()).unwrap(), a);
        }
        let p7 = FiniteField::prime(7).unwrap();
        assert_eq!(p7.frobenius(&3), Err(FieldError::NoFrobenius));
    }

    #[test]
    fn square_classes_and_roots_mod_7() {
        let f = FiniteField::prime(7).unwrap();
        assert_eq!(f.square_class(&2).unwrap(), SquareClass::Trivial);
        assert_eq!(f.square_class(&3).unwrap(), SquareClass::NonResidue);
        assert_eq!(f.sqrt(&2).unwrap(), Some(3));
        assert_eq!(f.sqrt(&3).unwrap(), None);
        assert_eq!(f.sqrt(&1).unwrap(), Some(1));
        assert_eq!(f.square_class(&0), Err(FieldError::ZeroSquareClass));
        assert_eq!(f.square_class_representative(&SquareClass::NonResidue), Some(3));
    }

    #[test]
    fn even_characteristic_rejected() {
        let f = FiniteField::new(2, 2).unwrap();
        assert_eq!(f.square_class(&1), Err(FieldError::EvenCharacteristic));
        assert_eq!(f.sqrt(&1), Err(FieldError::EvenCharacteristic));
    }

    #[test]
    fn rational_square_classes() {
        let q = Rationals;
        assert_eq!(q.square_class(&q.from_i64(8)).unwrap(), SquareClass::Squarefree(2.into()));
        assert_eq!(q.square_class(&q.parse("9/4").unwrap()).unwrap(), SquareClass::Trivial);
        assert_eq!(q.square_class(&q.parse("-3/2").unwrap()).unwrap(), SquareClass::Squarefree((-6).into()));
        assert_eq!(q.sqrt(&q.parse("9/4").unwrap()).unwrap(), Some(q.parse("3/2").unwrap()));
        assert_eq!(q.sqrt(&q.from_i64(2)).unwrap(), None);
    }

    #[test]
    fn squarefree_part_of_large_prime_product() {
        let p = BigInt::from(1_000_003u64);
        let n = &p * &p * BigInt::from(12);
        assert_eq!(squarefree_part(&n).unwrap(), BigInt::from(3));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(matches!(FiniteField::with_modulus(5, vec![1, 0, 1]), Err(FieldError::InvalidModulus(_))));
        assert!(matches!(FiniteField::prime(9), Err(FieldError::NotPrime(9))));
    }

    #[test]
    fn field_spec_json_and_cli() {
        let spec = FieldSpec::from_json(&json!({"p": 3, "m": 2, "modulus": [1, 0, 1]})).unwrap();
        assert_eq!(spec, FieldSpec::Finite { p: 3, m: 2, modulus: Some(vec![1, 0, 1]) });
        assert_eq!(FieldSpec::from_json(&json!({"rational": true})).unwrap(), FieldSpec::Rational);
        assert_eq!(FieldSpec::parse_cli("q=9").unwrap(), FieldSpec::Finite { p: 3, m: 2, modulus: None });
        assert_eq!(FieldSpec::parse_cli("p=7").unwrap(), FieldSpec::Finite { p: 7, m: 1, modulus: None });
    }

    #[test]
    fn element_text_roundtrip() {
        let f = FiniteField::new(5, 2).unwrap();
        for a in f.elements().unwrap() {
            assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
            assert_eq!(f.elem_from_json(&f.elem_to_json(&a)).unwrap(), a);
        }
        let q = Rationals;
        let a = q.parse("-7/3").unwrap();
        assert_eq!(q.elem_from_json(&q.elem_to_json(&a)).unwrap(), a);
    }
}
