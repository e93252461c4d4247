//! Square matrices over `GF(q)` and extraction of `g^{|g|/2}` without
//! knowing `|g|`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::field::FiniteField;
use crate::poly::{characteristic_polynomial, irreducible_factor_degrees};

/// Largest dimension accepted by the big-exponent powering path.
pub const MAX_POWER_DIMENSION: usize = 64;

#[derive(Clone)]
pub struct Matrix {
    field: Arc<FiniteField>,
    n: usize,
    entries: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries && self.field == other.field
    }
}

impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.field.order().hash(state);
        self.entries.hash(state);
    }
}

impl Matrix {
    pub fn zero(field: &Arc<FiniteField>, n: usize) -> Self {
        Matrix {
            field: field.clone(),
            n,
            entries: vec![0; n * n],
        }
    }

    pub fn identity(field: &Arc<FiniteField>, n: usize) -> Self {
        Self::scalar(field, n, 1)
    }

    pub fn scalar(field: &Arc<FiniteField>, n: usize, lambda: u32) -> Self {
        let mut m = Self::zero(field, n);
        for i in 0..n {
            m.entries[i * n + i] = lambda;
        }
        m
    }

    pub fn diagonal(field: &Arc<FiniteField>, diag: &[u32]) -> Result<Self> {
        let n = diag.len();
        let mut m = Self::zero(field, n);
        for (i, &d) in diag.iter().enumerate() {
            if !field.contains(d) {
                return invalid(format!("{d} is not an element of GF({})", field.order()));
            }
            m.entries[i * n + i] = d;
        }
        Ok(m)
    }

    /// Builds an `n x n` matrix from row-major element codes.
    pub fn from_entries(field: &Arc<FiniteField>, n: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n * n {
            return invalid(format!("expected {} entries, got {}", n * n, entries.len()));
        }
        if let Some(&bad) = entries.iter().find(|&&x| !field.contains(x)) {
            return invalid(format!("{bad} is not an element of GF({})", field.order()));
        }
        Ok(Matrix {
            field: field.clone(),
            n,
            entries,
        })
    }

    pub fn from_rows(field: &Arc<FiniteField>, rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("matrix rows must all have length n");
        }
        Self::from_entries(field, n, rows.concat())
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        assert!(self.field.contains(x));
        self.entries[i * self.n + j] = x;
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .all(|(k, &x)| x == u32::from(k / n == k % n))
    }

    fn check_same(&self, other: &Matrix) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        assert!(self.field == other.field, "field mismatch");
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        let f = &self.field;
        Matrix {
            field: f.clone(),
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            n: self.n,
            entries: self.entries.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.check_same(other);
        let mut out = vec![0; self.n * self.n];
        mul_into(&self.field, self.n, &self.entries, &other.entries, &mut out);
        Matrix {
            field: self.field.clone(),
            n: self.n,
            entries: out,
        }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Matrix {
            field: self.field.clone(),
            n,
            entries,
        }
    }

    /// Reduces a copy to row echelon form; returns `(rank, determinant)`.
    fn eliminate(&self) -> (usize, u32) {
        let f = &self.field;
        let n = self.n;
        let mut m = self.entries.clone();
        let mut det = 1;
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    m.swap(piv * n + j, rank * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[rank * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in rank + 1..n {
                let factor = f.mul(m[r * n + col], pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let x = f.mul(factor, m[rank * n + j]);
                    m[r * n + j] = f.sub(m[r * n + j], x);
                }
            }
            rank += 1;
        }
        (rank, if rank < n { 0 } else { det })
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn determinant(&self) -> u32 {
        self.eliminate().1
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        let f = &self.field;
        let n = self.n;
        let mut m = self.entries.clone();
        let mut inv = Matrix::identity(f, n).entries;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| m[r * n + col] != 0)
                .ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = f.inv(m[col * n + col])?;
            for j in 0..n {
                m[col * n + j] = f.mul(m[col * n + j], pinv);
                inv[col * n + j] = f.mul(inv[col * n + j], pinv);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m[r * n + col];
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    let a = f.mul(factor, m[col * n + j]);
                    m[r * n + j] = f.sub(m[r * n + j], a);
                    let b = f.mul(factor, inv[col * n + j]);
                    inv[r * n + j] = f.sub(inv[r * n + j], b);
                }
            }
        }
        Ok(Matrix {
            field: f.clone(),
            n,
            entries: inv,
        })
    }

    /// Left-to-right binary powering.
    /// Sliding-window exponentiation with a window of four bits.
    pub fn pow(&self, e: &BigUint) -> Matrix {
        const W: u64 = 4;
        let bits = e.bits();
        if bits == 0 {
            return Matrix::identity(&self.field, self.n);
        }
        // odd[k] = self^(2k+1)
        let sq = self.mul(self);
        let mut odd = vec![self.clone()];
        for k in 1..(1usize << (W - 1)) {
            odd.push(odd[k - 1].mul(&sq));
        }
        let mut acc: Option<Matrix> = None;
        let mut i = bits as i64 - 1;
        while i >= 0 {
            if !e.bit(i as u64) {
                acc = acc.map(|a| a.mul(&a));
                i -= 1;
                continue;
            }
            let mut lo = (i - W as i64 + 1).max(0);
            while !e.bit(lo as u64) {
                lo += 1;
            }
            let mut val = 0usize;
            for b in (lo..=i).rev() {
                val = (val << 1) | e.bit(b as u64) as usize;
            }
            let mut a = acc.take();
            for _ in lo..=i {
                a = a.map(|x| x.mul(&x));
            }
            let piece = &odd[val >> 1];
            acc = Some(match a {
                Some(x) => x.mul(piece),
                None => piece.clone(),
            });
            i = lo - 1;
        }
        acc.expect("nonzero exponent")
    }

    pub fn pow_u64(&self, e: u64) -> Matrix {
        self.pow(&BigUint::from(e))
    }

    /// Text form: a header `n q`, then `n` rows of element codes.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.field.order());
        for row in self.entries.chunks(self.n.max(1)) {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the text form, building the field from the header.
    pub fn parse_text(text: &str) -> Result<Matrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let (n, q) = parse_header2(header)?;
        let field = Arc::new(FiniteField::new(q)?);
        let body: Vec<&str> = lines.collect();
        Self::parse_body(&field, n, &body)
    }

    /// Parses `n` rows of element codes.
    pub fn parse_body(field: &Arc<FiniteField>, n: usize, rows: &[&str]) -> Result<Matrix> {
        if rows.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let before = entries.len();
            for tok in row.split_whitespace() {
                entries.push(
                    tok.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))?,
                );
            }
            if entries.len() - before != n {
                return Err(Error::Parse(format!(
                    "row {row:?} does not have {n} entries"
                )));
            }
        }
        Self::from_entries(field, n, entries).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub(crate) fn parse_header2(line: &str) -> Result<(usize, u64)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse(format!(
            "expected header \"n q\", got {line:?}"
        )));
    }
    let n = toks[0]
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
    let q = toks[1]
        .parse()
        .map_err(|e| Error::Parse(format!("bad field order: {e}")))?;
    Ok((n, q))
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix over GF({}) ", self.field.order())?;
        let rows: Vec<&[u32]> = self.entries.chunks(self.n.max(1)).collect();
        write!(f, "{rows:?}")
    }
}

/// `s mod p` for `s < 2^16` via a precomputed `floor(2^32 / p) + 1`.
#[inline]
fn reduce16(s: u32, p: u32, magic: u64) -> u32 {
    let q = ((s as u64 * magic) >> 32) as u32;
    s - q * p
}

const LANES: usize = 16;

/// `b` is stored with row stride `w`, a multiple of [`LANES`], zero padded.
#[inline(always)]
fn mul_u16(n: usize, p: u32, a: &[u16], b: &[u16], w: usize, out: &mut [u32]) {
    let magic = (1u64 << 32) / p as u64 + 1;
    let mut acc = vec![0u16; w];
    for i in 0..n {
        acc.fill(0);
        for k in 0..n {
            let x = a[i * n + k];
            let row = &b[k * w..(k + 1) * w];
            for (s, y) in acc.chunks_exact_mut(LANES).zip(row.chunks_exact(LANES)) {
                for l in 0..LANES {
                    s[l] = s[l].wrapping_add(x.wrapping_mul(y[l]));
                }
            }
        }
        for (o, &s) in out[i * n..(i + 1) * n].iter_mut().zip(&acc) {
            *o = reduce16(s as u32, p, magic);
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn mul_u16_avx2(n: usize, p: u32, a: &[u16], b: &[u16], w: usize, out: &mut [u32]) {
    mul_u16(n, p, a, b, w, out)
}

fn mul_into(field: &FiniteField, n: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    if !field.is_prime_field() {
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = field.add(acc, field.mul(a[i * n + k], b[k * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
        return;
    }
    let p = field.order();
    let bound = (p - 1) * (p - 1) * (n as u64);
    // narrowest accumulator that cannot overflow; u16 lanes vectorize on baseline x86-64
    if bound < u16::MAX as u64 {
        let a16: Vec<u16> = a.iter().map(|&x| x as u16).collect();
        let w = n.div_ceil(LANES) * LANES;
        let mut b16 = vec![0u16; n * w];
        for (dst, src) in b16.chunks_exact_mut(w).zip(b.chunks_exact(n)) {
            for (d, &x) in dst.iter_mut().zip(src) {
                *d = x as u16;
            }
        }
        #[cfg(target_arch = "x86_64")]
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            unsafe { mul_u16_avx2(n, p as u32, &a16, &b16, w, out) };
            return;
        }
        mul_u16(n, p as u32, &a16, &b16, w, out);
    } else if bound < u32::MAX as u64 {
        let mut acc = vec![0u32; n];
        for i in 0..n {
            acc.fill(0);
            for k in 0..n {
                let x = a[i * n + k];
                if x == 0 {
                    continue;
                }
                for (s, &y) in acc.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                    *s = s.wrapping_add(x.wrapping_mul(y));
                }
            }
            for (o, &s) in out[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                *o = s % p as u32;
            }
        }
    } else {
        let mut acc = vec![0u64; n];
        for i in 0..n {
            acc.fill(0);
            for k in 0..n {
                let x = a[i * n + k] as u64;
                if x == 0 {
                    continue;
                }
                for (s, &y) in acc.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                    *s = s.wrapping_add(x.wrapping_mul(y as u64));
                }
            }
            for (o, &s) in out[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                *o = (s % p) as u32;
            }
        }
    }
}

/// A multiple `E` of the order of every element of `GL_n(q)`, split as
/// `E = 2^s * u` with `u` odd.
///
/// `E = p^k * lcm(q^i - 1 : 1 <= i <= n)` where `p^k` is the least power of
/// the characteristic that is at least `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentMultiple {
    n: usize,
    q: u64,
    exponent: BigUint,
    two_part: u64,
    odd_part: BigUint,
}

impl ExponentMultiple {
    pub fn exponent(&self) -> &BigUint {
        &self.exponent
    }

    /// `s = v_2(E)`.
    pub fn two_part(&self) -> u64 {
        self.two_part
    }

    /// `u = E / 2^s`.
    pub fn odd_part(&self) -> &BigUint {
        &self.odd_part
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field_order(&self) -> u64 {
        self.q
    }
}

fn build_exponent_multiple(
    n: usize,
    field: &FiniteField,
    degrees: impl Iterator<Item = usize>,
) -> ExponentMultiple {
    let p = BigUint::from(field.characteristic());
    let q = BigUint::from(field.order());
    let mut p_power = BigUint::one();
    while p_power < BigUint::from(n) {
        p_power *= &p;
    }
    let mut lcm = BigUint::one();
    for d in degrees {
        lcm = lcm.lcm(&(q.pow(d as u32) - 1u32));
    }
    let exponent = p_power * lcm;
    let two_part = exponent.trailing_zeros().expect("E > 0");
    let odd_part = &exponent >> two_part as usize;
    ExponentMultiple {
        n,
        q: field.order(),
        exponent,
        two_part,
        odd_part,
    }
}

pub fn exponent_multiple(n: usize, field: &FiniteField) -> Result<ExponentMultiple> {
    if n == 0 {
        return invalid("dimension must be at least 1");
    }
    Ok(build_exponent_multiple(n, field, 1..=n))
}

/// A multiple of the order of one element `g`, usually far smaller than
/// [`exponent_multiple`]: `p^k * lcm(q^d - 1)` over the degrees `d` of the
/// irreducible factors of the characteristic polynomial of `g`. It divides
/// the group-wide multiple, and feeding it to [`involution_from_element`]
/// gives the same involution.
pub fn element_exponent_multiple(g: &Matrix) -> Result<ExponentMultiple> {
    if g.dim() == 0 {
        return invalid("dimension must be at least 1");
    }
    let cp = characteristic_polynomial(g);
    let degrees = irreducible_factor_degrees(g.field(), &cp);
    Ok(build_exponent_multiple(
        g.dim(),
        g.field(),
        degrees.into_iter(),
    ))
}

/// `g^{|g|/2}` for an invertible `g`, or `None` when `g` has odd order.
///
/// Raises `g` to the odd part `u` of the exponent multiple, which leaves the
/// 2-part `h` of `g`; the last non-identity square of `h` is the involution.
pub fn involution_from_element(g: &Matrix, em: &ExponentMultiple) -> Result<Option<Matrix>> {
    if em.n != g.dim() || em.q != g.field().order() {
        return Err(Error::ExponentMismatch {
            em_n: em.n,
            em_q: em.q,
            n: g.dim(),
            q: g.field().order(),
        });
    }
    if g.dim() > MAX_POWER_DIMENSION {
        return invalid(format!(
            "dimension {} exceeds the powering cap {MAX_POWER_DIMENSION}",
            g.dim()
        ));
    }
    if !g.is_invertible() {
        return Err(Error::Singular);
    }
    let mut h = g.pow(&em.odd_part);
    if h.is_identity() {
        return Ok(None);
    }
    for _ in 0..em.two_part {
        let sq = h.mul(&h);
        if sq.is_identity() {
            return Ok(Some(h));
        }
        h = sq;
    }
    panic!("g^u did not reach the identity within v_2(E) squarings; E is not an exponent multiple");
}

/// Dimension of the `(-1)`-eigenspace of an involution (or the identity),
/// computed as `rank(t - I)`.
pub fn minus_one_eigenspace_dim(t: &Matrix) -> Result<usize> {
    if !t.mul(t).is_identity() {
        return Err(Error::NotAnInvolution);
    }
    Ok(t.sub(&Matrix::identity(t.field(), t.dim())).rank())
}

/// Order by repeated multiplication; for small groups only.
pub fn order_by_iteration(g: &Matrix, limit: u64) -> Option<u64> {
    let mut h = g.clone();
    for k in 1..=limit {
        if h.is_identity() {
            return Some(k);
        }
        h = h.mul(g);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn gf(q: u64) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    #[test]
    fn exponent_multiple_examples() {
        let f3 = gf(3);
        let em = exponent_multiple(1, &f3).unwrap();
        assert_eq!(
            (em.exponent().clone(), em.two_part()),
            (BigUint::from(2u32), 1)
        );
        assert_eq!(em.odd_part(), &BigUint::one());

        let em = exponent_multiple(2, &f3).unwrap();
        assert_eq!(em.exponent(), &BigUint::from(24u32));
        assert_eq!(em.two_part(), 3);
        assert_eq!(em.odd_part(), &BigUint::from(3u32));
        assert!(exponent_multiple(0, &f3).is_err());
    }

    #[test]
    fn involution_examples() {
        let f = gf(3);
        let em = exponent_multiple(2, &f).unwrap();
        let minus = Matrix::scalar(&f, 2, f.minus_one());
        assert_eq!(
            involution_from_element(&minus, &em).unwrap(),
            Some(minus.clone())
        );
        let id = Matrix::identity(&f, 2);
        assert_eq!(involution_from_element(&id, &em).unwrap(), None);
        let d = Matrix::diagonal(&f, &[2, 1]).unwrap();
        assert_eq!(involution_from_element(&d, &em).unwrap(), Some(d.clone()));

        let wrong = exponent_multiple(3, &f).unwrap();
        assert!(matches!(
            involution_from_element(&d, &wrong),
            Err(Error::ExponentMismatch { .. })
        ));
        let singular = Matrix::zero(&f, 2);
        assert_eq!(
            involution_from_element(&singular, &em),
            Err(Error::Singular)
        );
    }

    #[test]
    fn eigenspace_examples() {
        let f = gf(7);
        assert_eq!(
            minus_one_eigenspace_dim(&Matrix::identity(&f, 3)).unwrap(),
            0
        );
        let minus = Matrix::scalar(&f, 3, f.minus_one());
        assert_eq!(minus_one_eigenspace_dim(&minus).unwrap(), 3);
        let d = Matrix::diagonal(&f, &[6, 1, 1]).unwrap();
        assert_eq!(minus_one_eigenspace_dim(&d).unwrap(), 1);
        let not_inv = Matrix::diagonal(&f, &[3, 1, 1]).unwrap();
        assert_eq!(
            minus_one_eigenspace_dim(&not_inv),
            Err(Error::NotAnInvolution)
        );
    }

    #[test]
    fn basic_linear_algebra() {
        let f = gf(5);
        assert_eq!(Matrix::identity(&f, 4).determinant(), 1);
        assert_eq!(Matrix::zero(&f, 4).rank(), 0);
        let m = Matrix::from_rows(&f, &[vec![1, 2], vec![3, 4]]).unwrap();
        // det = 4 - 6 = -2 = 3 mod 5
        assert_eq!(m.determinant(), 3);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(inv.mul(&m).is_identity());
        let sing = Matrix::from_rows(&f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(sing.rank(), 1);
        assert_eq!(sing.determinant(), 0);
        assert_eq!(sing.inverse(), Err(Error::Singular));
        assert!(Matrix::from_rows(&f, &[vec![1, 5], vec![0, 1]]).is_err());
    }

    #[test]
    fn u64_accumulator_path() {
        // p large enough to force the u64 accumulator
        let f = gf(65521);
        let m = Matrix::from_rows(&f, &[vec![65520, 65519], vec![3, 65520]]).unwrap();
        let sq = m.mul(&m);
        let naive = |i: usize, j: usize| {
            ((0..2)
                .map(|k| m.get(i, k) as u64 * m.get(k, j) as u64)
                .sum::<u64>()
                % 65521) as u32
        };
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(sq.get(i, j), naive(i, j));
            }
        }
        assert!(m.mul(&m.inverse().unwrap()).is_identity());
    }

    #[test]
    fn text_roundtrip() {
        let f = gf(9);
        let m = Matrix::from_rows(&f, &[vec![0, 3, 8], vec![1, 1, 1], vec![5, 0, 2]]).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("3 9\n"));
        assert_eq!(Matrix::parse_text(&text).unwrap(), m);
        assert!(Matrix::parse_text("2 3\n1 0\n0").is_err());
        assert!(Matrix::parse_text("2 3\n1 0\n0 3").is_err());
        assert!(Matrix::parse_text("2 4\n1 0\n0 1").is_err());
    }

    fn naive_mul(a: &Matrix, b: &Matrix) -> Matrix {
        let f = a.field();
        let n = a.dim();
        let mut out = Matrix::zero(f, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for k in 0..n {
                    acc = f.add(acc, f.mul(a.get(i, k), b.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    #[test]
    fn kernels_match_naive_product() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for (q, n) in [(3, 17), (7, 20), (9, 5), (251, 33), (65521, 9)] {
            let f = gf(q);
            let mut rand_m = || {
                let e = (0..n * n).map(|_| rng.random_range(0..q as u32)).collect();
                Matrix::from_entries(&f, n, e).unwrap()
            };
            let (a, b) = (rand_m(), rand_m());
            assert_eq!(a.mul(&b), naive_mul(&a, &b), "q={q} n={n}");
        }
    }

    #[test]
    fn windowed_power_matches_repeated_product() {
        let f = gf(5);
        let g = Matrix::from_rows(&f, &[vec![1, 2, 0], vec![3, 4, 1], vec![0, 1, 1]]).unwrap();
        let mut naive = Matrix::identity(&f, 3);
        for e in 0u64..300 {
            assert_eq!(g.pow_u64(e), naive, "e={e}");
            naive = naive.mul(&g);
        }
    }

    #[test]
    fn element_multiple_divides_group_multiple() {
        let f = gf(3);
        let gens = crate::sampler::gl_generators(2, &f);
        let group = crate::group::enumerate_group(&gens, 100).unwrap();
        let em = exponent_multiple(2, &f).unwrap();
        for g in &group {
            let e = element_exponent_multiple(g).unwrap();
            assert!((em.exponent() % e.exponent()).is_zero());
            assert!(g.pow(e.exponent()).is_identity());
            assert_eq!(
                involution_from_element(g, &e).unwrap(),
                involution_from_element(g, &em).unwrap()
            );
        }
    }
}
