//! Arithmetic in GF(p^h).
//!
//! Elements are identified by their canonical index: the element whose
//! polynomial coefficients `β_0 .. β_{h-1}` satisfy `Σ β_i p^i = n` has
//! index `n`. The index doubles as the serialization format, so the map
//! `n -> element` ([`FieldParams::sigma`]) is the identity on storage and
//! only the digit expansion is computed on demand.
//!
//! For `h > 1` the field is built on the lexicographically smallest monic
//! irreducible polynomial of degree `h` (ordered by coefficient index), so
//! every matrix built on top of it is reproducible byte for byte.
//!
//! Multiplication goes through log/antilog tables built once per field.
//! [`FieldParams::mul_poly`] is the plain polynomial-product path the tables
//! are checked against.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// An element of GF(q), stored as its canonical index in `[0, q-1]`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    // exp has 2(q-1) entries so log a + log b never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// A finite field GF(p^h). Cheap to clone; the arithmetic tables are shared.
#[derive(Clone)]
pub struct FieldParams {
    p: u32,
    h: u32,
    q: u32,
    reduction_poly: Vec<u32>,
    tables: Arc<Tables>,
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.h == other.h && self.reduction_poly == other.reduction_poly
    }
}

impl Eq for FieldParams {}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("q", &self.q)
            .field("reduction_poly", &self.reduction_poly)
            .finish()
    }
}

/// `p^h` for `h > 1`, bare `p` for prime fields.
impl fmt::Display for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.h == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.h)
        }
    }
}

impl FromStr for FieldParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadFieldSpec(s.to_string());
        let s = s.trim();
        let (p, h) = match s.split_once('^') {
            Some((p, h)) => (
                p.trim().parse::<u64>().map_err(|_| bad())?,
                h.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (s.parse::<u64>().map_err(|_| bad())?, 1),
        };
        make_field(p, h)
    }
}

/// Builds GF(p^h). Fails on a non-prime `p`, `h < 1`, or `p^h > 2^16`.
pub fn make_field(p: u64, h: u32) -> Result<FieldParams> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if h < 1 {
        return Err(Error::BadDegree(h));
    }
    let q = (p as u128)
        .checked_pow(h)
        .filter(|&q| q <= MAX_ORDER as u128)
        .ok_or(Error::FieldTooLarge {
            p,
            h,
            cap: MAX_ORDER,
        })? as u32;
    let p = p as u32;
    let reduction_poly = if h == 1 {
        vec![0, 1]
    } else {
        find_reduction_poly(p, h)?
    };
    let mut field = FieldParams {
        p,
        h,
        q,
        reduction_poly,
        tables: Arc::new(Tables {
            exp: Vec::new(),
            log: Vec::new(),
        }),
    };
    field.tables = Arc::new(field.build_tables());
    Ok(field)
}

/// Builds the field with `q` elements, `q` a prime power.
pub fn field_of_order(q: u64) -> Result<FieldParams> {
    let (p, h) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    make_field(p, h)
}

/// Splits `q` into `(p, h)` with `q = p^h`, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut h = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        h += 1;
    }
    (rest == 1).then_some((p, h))
}

pub fn is_prime(n: u64) -> bool {
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

impl FieldParams {
    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients of the reduction polynomial, constant term first.
    /// For prime fields this is `x` and plays no role in arithmetic.
    pub fn reduction_poly(&self) -> &[u32] {
        &self.reduction_poly
    }

    /// The element with index `n`, i.e. whose base-p digits are the
    /// polynomial coefficients.
    pub fn sigma(&self, n: u64) -> Result<FieldElement> {
        if n >= self.q as u64 {
            return Err(Error::ElementOutOfRange { index: n, q: self.q });
        }
        Ok(FieldElement(n as u32))
    }

    /// Alias of [`sigma`](Self::sigma) for call sites that read better with it.
    pub fn element(&self, n: u64) -> Result<FieldElement> {
        self.sigma(n)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Polynomial coefficients `β_0 .. β_{h-1}` of `a`.
    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let mut n = a.0;
        (0..self.h)
            .map(|_| {
                let d = n % self.p;
                n /= self.p;
                d
            })
            .collect()
    }

    /// Inverse of [`digits`](Self::digits). Digits beyond `h` or `>= p` are rejected.
    pub fn from_digits(&self, digits: &[u32]) -> Result<FieldElement> {
        if digits.len() > self.h as usize || digits.iter().any(|&d| d >= self.p) {
            return Err(Error::OutOfRange(format!(
                "digit vector {digits:?} is not an element of GF({})",
                self.q
            )));
        }
        let n = digits.iter().rev().fold(0u64, |acc, &d| acc * self.p as u64 + d as u64);
        self.sigma(n)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.h == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.h == 1 {
            return FieldElement((a.0 + self.p - b.0) % self.p);
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + self.p - y) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    fn digitwise(&self, a: FieldElement, b: FieldElement, op: impl Fn(u32, u32) -> u32) -> FieldElement {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.h {
            out += op(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize])
    }

    /// Multiplication by polynomial product and reduction, without tables.
    pub fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.h == 1 {
            return FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let h = self.h as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * h - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % self.p as u64;
            }
        }
        // x^h = -(r_0 + r_1 x + ... + r_{h-1} x^{h-1})
        let p = self.p as u64;
        for top in (h..2 * h - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, &r) in self.reduction_poly[..h].iter().enumerate() {
                let idx = top - h + i;
                prod[idx] = (prod[idx] + (p - c) * r as u64) % p;
            }
        }
        let n = prod[..h].iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32);
        FieldElement(n)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let t = &self.tables;
        let order = self.q - 1;
        Ok(FieldElement(t.exp[((order - t.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let t = &self.tables;
        let order = (self.q - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElement(t.exp[l as usize])
    }

    fn pow_poly(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> Tables {
        let q = self.q as usize;
        let order = self.q as u64 - 1;
        let factors = prime_factors(order);
        let generator = (1..self.q)
            .map(FieldElement)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| order == 1 || self.pow_poly(g, order / r) != FieldElement::ONE)
            })
            .expect("every finite field has a primitive element");
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![0u32; q];
        let mut x = FieldElement::ONE;
        for i in 0..q - 1 {
            exp[i] = x.0;
            exp[i + q - 1] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly(x, generator);
        }
        Tables { exp, log }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn trim(poly: &mut Vec<u32>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is prime and small; Fermat is enough.
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Remainder of `a` divided by `b` over GF(p). Coefficients are constant term first.
pub fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.iter().map(|&c| c % p).collect();
    let mut b: Vec<u32> = b.iter().map(|&c| c % p).collect();
    trim(&mut r);
    trim(&mut b);
    assert!(!(b.len() == 1 && b[0] == 0), "polynomial division by zero");
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db], p) as u64;
    let p64 = p as u64;
    while r.len() > db && r.iter().any(|&c| c != 0) {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv % p64;
        for (i, &bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = ((r[idx] as u64 + p64 - c * bc as u64 % p64) % p64) as u32;
        }
        r.pop();
        if r.is_empty() {
            r.push(0);
        }
        trim(&mut r);
    }
    r
}

/// Irreducibility over GF(p) by trial division with every monic polynomial
/// of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let mut poly: Vec<u32> = poly.iter().map(|&c| c % p).collect();
    trim(&mut poly);
    let deg = poly.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut n = low;
            for _ in 0..d {
                divisor.push((n % p as u64) as u32);
                n /= p as u64;
            }
            divisor.push(1);
            let r = poly_rem(&poly, &divisor, p);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The monic irreducible polynomial of degree `h` over GF(p) with the
/// smallest coefficient index `Σ c_i p^i`.
pub fn find_reduction_poly(p: u32, h: u32) -> Result<Vec<u32>> {
    if h < 2 {
        return Err(Error::BadDegree(h));
    }
    let count = (p as u64).pow(h);
    for low in 0..count {
        let mut poly = Vec::with_capacity(h as usize + 1);
        let mut n = low;
        for _ in 0..h {
            poly.push((n % p as u64) as u32);
            n /= p as u64;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return Ok(poly);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
