//! Univariate polynomials over `GF(q)`: characteristic polynomials and the
//! degrees of irreducible factors (distinct-degree factorization).
//!
//! Coefficients are little-endian field codes with no trailing zeros; the
//! zero polynomial is the empty vector.

use crate::field::FiniteField;
use crate::matrix::Matrix;

type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn deg(a: &[u32]) -> Option<usize> {
    a.len().checked_sub(1)
}

fn sub(f: &FiniteField, a: &[u32], b: &[u32]) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = f.sub(x, y);
    }
    trim(out)
}

fn mul(f: &FiniteField, a: &[u32], b: &[u32]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder; `b` must be nonzero.
fn div_rem(f: &FiniteField, a: &[u32], b: &[u32]) -> (Poly, Poly) {
    let db = deg(b).expect("nonzero divisor");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    let mut q = vec![0; a.len().saturating_sub(db).max(1)];
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        q[dr - db] = c;
        for (i, &y) in b.iter().enumerate() {
            r[dr - db + i] = f.sub(r[dr - db + i], f.mul(c, y));
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn rem(f: &FiniteField, a: &[u32], b: &[u32]) -> Poly {
    div_rem(f, a, b).1
}

fn monic(f: &FiniteField, a: Poly) -> Poly {
    match a.last() {
        Some(&lead) => {
            let inv = f.inv(lead).expect("nonzero");
            a.iter().map(|&x| f.mul(x, inv)).collect()
        }
        None => a,
    }
}

fn gcd(f: &FiniteField, a: &[u32], b: &[u32]) -> Poly {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, x)
}

fn pow_mod(f: &FiniteField, base: &[u32], mut e: u64, m: &[u32]) -> Poly {
    let mut acc = vec![1];
    let mut b = rem(f, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Characteristic polynomial `det(xI - g)`, monic of degree `n`, via a
/// similarity reduction to upper Hessenberg form.
pub fn characteristic_polynomial(g: &Matrix) -> Vec<u32> {
    let f = g.field().as_ref();
    let n = g.dim();
    let mut h: Vec<Vec<u32>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(i, j)).collect())
        .collect();
    for m in 1..n {
        let Some(piv) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if piv != m {
            h.swap(piv, m);
            for row in h.iter_mut() {
                row.swap(piv, m);
            }
        }
        let inv = f.inv(h[m][m - 1]).expect("pivot is nonzero");
        for k in m + 1..n {
            let u = f.mul(h[k][m - 1], inv);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                h[k][j] = f.sub(h[k][j], f.mul(u, h[m][j]));
            }
            for row in h.iter_mut() {
                row[m] = f.add(row[m], f.mul(u, row[k]));
            }
        }
    }
    // p_m = (x - h_mm) p_{m-1} - sum_i h_{m-i,m} (prod_{j=m-i+1}^{m} h_{j,j-1}) p_{m-i-1}, 1-based
    let at = |i: usize, j: usize| h[i - 1][j - 1];
    let mut ps: Vec<Poly> = vec![vec![1]];
    for m in 1..=n {
        let mut pm = mul(f, &[f.neg(at(m, m)), 1], &ps[m - 1]);
        let mut prod = 1;
        for i in 1..m {
            prod = f.mul(prod, at(m - i + 1, m - i));
            let c = f.mul(at(m - i, m), prod);
            if c != 0 {
                pm = sub(f, &pm, &mul(f, &[c], &ps[m - i - 1]));
            }
        }
        ps.push(pm);
    }
    ps.pop().expect("n + 1 entries")
}

/// The distinct degrees of the irreducible factors of a nonconstant polynomial.
pub fn irreducible_factor_degrees(field: &FiniteField, poly: &[u32]) -> Vec<usize> {
    let x: Poly = vec![0, 1];
    let mut rest = monic(field, trim(poly.to_vec()));
    let mut h = rem(field, &x, &rest);
    let mut out = Vec::new();
    let mut d = 1;
    while deg(&rest).unwrap_or(0) >= 2 * d {
        h = pow_mod(field, &h, field.order(), &rest);
        let mut g = gcd(field, &rest, &sub(field, &h, &x));
        if deg(&g).unwrap_or(0) > 0 {
            out.push(d);
            // strip every power of the degree-d factors
            while deg(&g).unwrap_or(0) > 0 {
                rest = div_rem(field, &rest, &g).0;
                g = gcd(field, &rest, &g);
            }
            h = rem(field, &h, &rest);
        }
        d += 1;
    }
    if let Some(r) = deg(&rest).filter(|&r| r > 0) {
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn gf(q: u64) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    #[test]
    fn charpoly_small() {
        let f = gf(5);
        // [[1,2],[3,4]]: x^2 - 5x - 2 = x^2 + 3 over GF(5)
        let m = Matrix::from_rows(&f, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(characteristic_polynomial(&m), vec![3, 0, 1]);
        let i3 = Matrix::identity(&f, 3);
        // (x - 1)^3 = x^3 - 3x^2 + 3x - 1
        assert_eq!(characteristic_polynomial(&i3), vec![4, 3, 2, 1]);
    }

    #[test]
    fn charpoly_annihilates() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for q in [3, 7, 9, 25] {
            let f = gf(q);
            for n in 1..7 {
                let g = crate::sampler::sample_uniform_gl(n, &f, &mut rng);
                let cp = characteristic_polynomial(&g);
                assert_eq!(cp.len(), n + 1);
                let mut acc = Matrix::zero(&f, n);
                for &c in cp.iter().rev() {
                    acc = acc.mul(&g).add(&Matrix::scalar(&f, n, c));
                }
                assert!(acc == Matrix::zero(&f, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn factor_degrees() {
        let f = gf(3);
        // x^2 + 1 is irreducible over GF(3)
        assert_eq!(irreducible_factor_degrees(&f, &[1, 0, 1]), vec![2]);
        // (x - 1)^3 (x^2 + 1)^2
        let a = mul(&f, &[2, 1], &mul(&f, &[2, 1], &[2, 1]));
        let b = mul(&f, &[1, 0, 1], &[1, 0, 1]);
        assert_eq!(irreducible_factor_degrees(&f, &mul(&f, &a, &b)), vec![1, 2]);
        // x^3 - x - 1 is irreducible over GF(3)
        assert_eq!(irreducible_factor_degrees(&f, &[2, 2, 0, 1]), vec![3]);
        assert_eq!(irreducible_factor_degrees(&f, &[0, 1]), vec![1]);
    }
}
