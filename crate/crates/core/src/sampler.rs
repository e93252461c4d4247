//! Random elements of matrix groups: exact uniform sampling from `GL_n(q)`
//! and `SL_n(q)`, and product replacement for groups given by generators.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::Family;
use crate::error::{invalid, Error, Result};
use crate::field::FiniteField;
use crate::group::{ProductReplacement, DEFAULT_BURN_IN, DEFAULT_SLOTS};
use crate::matrix::{parse_header2, Matrix};

/// Which row of the classical-group table a group belongs to, and whether
/// it lies strictly between the quasisimple group `S` and the full `X`.
/// Always declared by the user, never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyTag {
    pub family: Family,
    pub strictly_between: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Gl,
    Sl,
    Generators(Vec<Matrix>),
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: usize,
    pub field: Arc<FiniteField>,
    pub family: Option<FamilyTag>,
}

impl GroupSpec {
    pub fn gl(n: usize, field: &Arc<FiniteField>) -> Self {
        GroupSpec {
            kind: GroupKind::Gl,
            n,
            field: field.clone(),
            family: None,
        }
    }

    pub fn sl(n: usize, field: &Arc<FiniteField>) -> Self {
        GroupSpec {
            kind: GroupKind::Sl,
            ..Self::gl(n, field)
        }
    }

    pub fn from_generators(generators: Vec<Matrix>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return invalid("generator list is empty");
        };
        let (n, field) = (first.dim(), first.field().clone());
        for g in &generators {
            if g.dim() != n || g.field() != &field {
                return invalid("generators differ in dimension or field");
            }
            if !g.is_invertible() {
                return invalid("generators must be invertible");
            }
        }
        Ok(GroupSpec {
            kind: GroupKind::Generators(generators),
            n,
            field,
            family: None,
        })
    }

    pub fn with_family(mut self, family: Family, strictly_between: bool) -> Self {
        self.family = Some(FamilyTag {
            family,
            strictly_between,
        });
        self
    }

    /// True when samples are exactly uniform.
    pub fn is_uniform(&self) -> bool {
        !matches!(self.kind, GroupKind::Generators(_))
    }

    /// Generators of the group (standard ones for `GL`/`SL`).
    pub fn generators(&self) -> Vec<Matrix> {
        match &self.kind {
            GroupKind::Gl => gl_generators(self.n, &self.field),
            GroupKind::Sl => sl_generators(self.n, &self.field),
            GroupKind::Generators(g) => g.clone(),
        }
    }

    /// One sample with a caller-owned stream; uniform kinds only.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matrix> {
        match self.kind {
            GroupKind::Gl => Ok(sample_uniform_gl(self.n, &self.field, rng)),
            GroupKind::Sl => Ok(sample_uniform_sl(self.n, &self.field, rng)),
            GroupKind::Generators(_) => invalid("generator-defined groups have no uniform sampler"),
        }
    }

    /// A sampler owning its random stream.
    pub fn sampler(&self, seed: u64) -> Result<MatrixSampler> {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        match &self.kind {
            GroupKind::Generators(gens) => Ok(MatrixSampler::Stream(ProductReplacement::new(
                gens,
                DEFAULT_SLOTS,
                DEFAULT_BURN_IN,
                rng,
            )?)),
            _ => Ok(MatrixSampler::Uniform {
                spec: self.clone(),
                rng,
            }),
        }
    }
}

pub enum MatrixSampler {
    Uniform { spec: GroupSpec, rng: ChaCha8Rng },
    Stream(ProductReplacement<Matrix, ChaCha8Rng>),
}

impl MatrixSampler {
    pub fn next_element(&mut self) -> Result<Matrix> {
        match self {
            MatrixSampler::Uniform { spec, rng } => spec.sample_uniform(rng),
            MatrixSampler::Stream(pr) => Ok(pr.next_element()),
        }
    }
}

fn random_matrix<R: Rng + ?Sized>(n: usize, field: &Arc<FiniteField>, rng: &mut R) -> Matrix {
    let q = field.order() as u32;
    let entries = (0..n * n).map(|_| rng.random_range(0..q)).collect();
    Matrix::from_entries(field, n, entries).expect("entries in range")
}

/// Uniform element of `GL_n(q)` by rejection from uniform `n x n` matrices.
/// Acceptance probability is `prod (1 - q^-i) > 0.28` for odd `q`.
pub fn sample_uniform_gl<R: Rng + ?Sized>(
    n: usize,
    field: &Arc<FiniteField>,
    rng: &mut R,
) -> Matrix {
    loop {
        let m = random_matrix(n, field, rng);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Uniform element of `SL_n(q)`: a uniform `GL` element with its first row
/// scaled by the inverse determinant. Each `SL` element has exactly `q - 1`
/// preimages.
pub fn sample_uniform_sl<R: Rng + ?Sized>(
    n: usize,
    field: &Arc<FiniteField>,
    rng: &mut R,
) -> Matrix {
    let mut g = sample_uniform_gl(n, field, rng);
    let scale = field.inv(g.determinant()).expect("invertible");
    for j in 0..n {
        let x = field.mul(scale, g.get(0, j));
        g.set(0, j, x);
    }
    g
}

/// Elementary transvections `I + b E_ij` for `i != j` and `b` running over a
/// basis of `GF(q)` over its prime field. These generate `SL_n(q)`.
pub fn sl_generators(n: usize, field: &Arc<FiniteField>) -> Vec<Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for &b in &field.prime_field_basis() {
                let mut t = Matrix::identity(field, n);
                t.set(i, j, b);
                gens.push(t);
            }
        }
    }
    if gens.is_empty() {
        gens.push(Matrix::identity(field, n));
    }
    gens
}

/// [`sl_generators`] plus `diag(w, 1, .., 1)` for a primitive element `w`.
pub fn gl_generators(n: usize, field: &Arc<FiniteField>) -> Vec<Matrix> {
    let mut d = vec![1; n];
    d[0] = field.primitive_element();
    let mut gens = vec![Matrix::diagonal(field, &d).expect("valid diagonal")];
    if n > 1 {
        gens.extend(sl_generators(n, field));
    }
    gens
}

/// Parses a generator file: `n q count`, then `count` matrices in the matrix
/// text format separated by blank lines. Each matrix may repeat the `n q`
/// header.
pub fn parse_generator_file(text: &str) -> Result<Vec<Matrix>> {
    let mut lines = text.lines();
    let header = lines
        .by_ref()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse("empty generator file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(Error::Parse(format!(
            "expected header \"n q count\", got {header:?}"
        )));
    }
    let parse = |t: &str| {
        t.parse::<u64>()
            .map_err(|e| Error::Parse(format!("bad header field {t:?}: {e}")))
    };
    let (n, q, count) = (
        parse(toks[0])? as usize,
        parse(toks[1])?,
        parse(toks[2])? as usize,
    );
    let field = Arc::new(FiniteField::new(q)?);

    let rest: Vec<&str> = lines.collect();
    let blocks: Vec<Vec<&str>> = rest
        .split(|l| l.trim().is_empty())
        .filter(|b| !b.is_empty())
        .map(|b| b.to_vec())
        .collect();
    if blocks.len() != count {
        return Err(Error::Parse(format!(
            "header announces {count} matrices, found {}",
            blocks.len()
        )));
    }
    blocks
        .iter()
        .map(|block| {
            let body: &[&str] = if block.len() == n + 1 {
                let (bn, bq) = parse_header2(block[0])?;
                if bn != n || bq != q {
                    return Err(Error::Parse(format!(
                        "matrix header \"{bn} {bq}\" disagrees with file header"
                    )));
                }
                &block[1..]
            } else {
                block
            };
            Matrix::parse_body(&field, n, body)
        })
        .collect()
}

pub fn write_generator_file(generators: &[Matrix]) -> String {
    let (n, q) = generators
        .first()
        .map(|g| (g.dim(), g.field().order()))
        .unwrap_or((0, 0));
    let mut out = format!("{n} {q} {}\n", generators.len());
    for g in generators {
        out.push('\n');
        out.push_str(&g.to_text());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_group;

    fn gf(q: u64) -> Arc<FiniteField> {
        Arc::new(FiniteField::new(q).unwrap())
    }

    #[test]
    fn standard_generator_orders() {
        let f3 = gf(3);
        assert_eq!(
            enumerate_group(&gl_generators(2, &f3), 1000).unwrap().len(),
            48
        );
        assert_eq!(
            enumerate_group(&sl_generators(2, &f3), 1000).unwrap().len(),
            24
        );
        let f5 = gf(5);
        assert_eq!(
            enumerate_group(&sl_generators(2, &f5), 1000).unwrap().len(),
            120
        );
        // |SL_2(9)| = 9 * 80 = 720
        let f9 = gf(9);
        assert_eq!(
            enumerate_group(&sl_generators(2, &f9), 10_000)
                .unwrap()
                .len(),
            720
        );
        assert_eq!(
            enumerate_group(&gl_generators(1, &f5), 100).unwrap().len(),
            4
        );
    }

    #[test]
    fn sl_samples_have_det_one() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..5 {
            for _ in 0..20 {
                assert_eq!(sample_uniform_sl(n, &f, &mut rng).determinant(), 1);
                assert!(sample_uniform_gl(n, &f, &mut rng).is_invertible());
            }
        }
        let one = sample_uniform_sl(1, &f, &mut rng);
        assert!(one.is_identity());
    }

    #[test]
    fn generator_file_roundtrip() {
        let f = gf(3);
        let gens = gl_generators(2, &f);
        let text = write_generator_file(&gens);
        assert_eq!(parse_generator_file(&text).unwrap(), gens);
        // headerless blocks are accepted too
        let bare = "2 3 2\n1 1\n0 1\n\n0 1\n2 0\n";
        let parsed = parse_generator_file(bare).unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].get(1, 0), 2);
        assert!(parse_generator_file("2 3 3\n1 1\n0 1\n").is_err());
        assert!(parse_generator_file("2 3 1\n2 5\n1 1\n0 1\n").is_err());
    }

    #[test]
    fn spec_from_generators_validates() {
        let f = gf(3);
        assert!(GroupSpec::from_generators(vec![]).is_err());
        assert!(GroupSpec::from_generators(vec![Matrix::zero(&f, 2)]).is_err());
        let mixed = vec![Matrix::identity(&f, 2), Matrix::identity(&f, 3)];
        assert!(GroupSpec::from_generators(mixed).is_err());
        let spec = GroupSpec::from_generators(gl_generators(2, &f)).unwrap();
        assert!(!spec.is_uniform());
        assert!(spec
            .sample_uniform(&mut ChaCha8Rng::seed_from_u64(0))
            .is_err());
    }
}
