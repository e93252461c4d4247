//! Finite fields `GF(q)` of odd characteristic.
//!
//! Elements are `u32` codes in `0..q`. For prime fields the code is the
//! residue. For `q = p^e` with `e > 1` the base-`p` digits of the code,
//! least significant first, are the coefficients of a polynomial of degree
//! `< e` reduced modulo a fixed monic irreducible polynomial: the
//! lexicographically smallest one, so the encoding is reproducible.

use std::fmt;

use crate::error::{invalid, Error, Result};

/// Largest order accepted for proper extension fields.
pub const MAX_EXTENSION_ORDER: u64 = 121;

/// Largest prime accepted for prime fields (keeps products inside `u64`
/// accumulators for every supported dimension).
pub const MAX_PRIME: u64 = 1 << 16;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    /// Low-order coefficients of the monic modulus (empty for prime fields).
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

/// Polynomials over `GF(p)` as little-endian coefficient vectors.
fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db], p - 2, p);
    while a.len() > db {
        let top = *a.last().expect("nonempty");
        if top != 0 {
            let f = top * lead_inv % p;
            let shift = a.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - f * c % p) % p;
            }
        }
        a.pop();
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn digits(mut code: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for d in out.iter_mut() {
        *d = code % p;
        code /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the
/// base-`p` digits of `code`.
fn monic(code: u64, p: u64, deg: usize) -> Vec<u64> {
    let mut c = digits(code, p, deg);
    c.push(1);
    c
}

/// Irreducible iff no monic factor of degree `1..=deg/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d as u32) {
            let g = monic(code, p, d);
            if poly_rem(f.to_vec(), &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        let Some((p, e)) = prime_power(q) else {
            return invalid(format!("{q} is not a prime power"));
        };
        if p == 2 {
            return invalid("characteristic 2 is not supported");
        }
        if e == 1 {
            if p > MAX_PRIME {
                return invalid(format!(
                    "prime {p} exceeds the supported maximum {MAX_PRIME}"
                ));
            }
            return Ok(FiniteField {
                p,
                e,
                q,
                modulus: Vec::new(),
                tables: None,
            });
        }
        if q > MAX_EXTENSION_ORDER {
            return invalid(format!(
                "extension fields are capped at order {MAX_EXTENSION_ORDER}"
            ));
        }
        let deg = e as usize;
        let modulus = (0..q)
            .map(|code| monic(code, p, deg))
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        let mut field = FiniteField {
            p,
            e,
            q,
            modulus: modulus[..deg].to_vec(),
            tables: None,
        };
        field.tables = Some(field.build_tables(&modulus));
        Ok(field)
    }

    fn build_tables(&self, modulus: &[u64]) -> Tables {
        let (p, q, deg) = (self.p, self.q as usize, self.e as usize);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let mut neg = vec![0; q];
        for a in 0..q {
            let da = digits(a as u64, p, deg);
            neg[a] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p) as u32;
            for b in 0..q {
                let db = digits(b as u64, p, deg);
                let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u32;
                let mut prod = vec![0u64; 2 * deg - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(prod, modulus, p);
                r.resize(deg, 0);
                mul[a * q + b] = undigits(&r, p) as u32;
            }
        }
        let mut inv = vec![0; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field") as u32;
        }
        Tables { add, mul, neg, inv }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.tables.is_none()
    }

    /// Monic modulus, little-endian, including the leading 1.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        if self.e > 1 {
            m.push(1);
        }
        m
    }

    pub fn contains(&self, x: u32) -> bool {
        (x as u64) < self.q
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// The element `-1`.
    pub fn minus_one(&self) -> u32 {
        self.neg(1)
    }

    /// Image of an integer under `Z -> GF(p) <= GF(q)`.
    pub fn from_int(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            None => ((a as u64 + b as u64) % self.p) as u32,
            Some(t) => t.add[a as usize * self.q as usize + b as usize],
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match &self.tables {
            None => ((self.p - a as u64) % self.p) as u32,
            Some(t) => t.neg[a as usize],
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            None => (a as u64 * b as u64 % self.p) as u32,
            Some(t) => t.mul[a as usize * self.q as usize + b as usize],
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.tables {
            None => pow_mod(a as u64, self.p - 2, self.p) as u32,
            Some(t) => t.inv[a as usize],
        })
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u32) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let n = self.q - 1;
        let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        Ok(*divisors
            .iter()
            .find(|&&d| self.pow(a, d) == 1)
            .expect("a^(q-1) = 1"))
    }

    /// Smallest code generating the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        (1..self.q as u32)
            .find(|&a| self.element_order(a).ok() == Some(self.q - 1))
            .expect("cyclic multiplicative group")
    }

    /// Codes of `1, x, .., x^{e-1}`: a basis over the prime field.
    pub fn prime_field_basis(&self) -> Vec<u32> {
        (0..self.e).map(|i| self.p.pow(i) as u32).collect()
    }
}
