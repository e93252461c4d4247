//! Permutations on `{1..n}`, their cycle structure, and the involution
//! obtained by raising an even-order permutation to half its order.
//!
//! Points are 1-based in every external representation (cycle notation,
//! the text format) and 0-based in the image array.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which group a permutation sample is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PermGroup {
    /// The full symmetric group.
    Sn,
    /// The alternating group.
    An,
}

impl FromStr for PermGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sn" | "s" | "symmetric" => Ok(PermGroup::Sn),
            "an" | "a" | "alternating" => Ok(PermGroup::An),
            other => Err(Error::Parse(format!("unknown permutation group {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl BitXor for Parity {
    type Output = Parity;

    fn bitxor(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// 2-adic valuation of a positive integer.
pub fn two_adic_valuation(c: usize) -> u32 {
    debug_assert!(c > 0);
    c.trailing_zeros()
}

/// Total number of points on cycles of each 2-adic valuation, plus the
/// number of cycles (fixed points included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleProfile {
    pub by_valuation: BTreeMap<u32, usize>,
    pub cycle_count: usize,
}

impl CycleProfile {
    /// Largest valuation present, `None` for the empty permutation.
    pub fn max_valuation(&self) -> Option<u32> {
        self.by_valuation.keys().next_back().copied()
    }

    pub fn points(&self) -> usize {
        self.by_valuation.values().sum()
    }
}

/// A permutation of `{1..n}` stored by its image array.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return invalid(format!("image list is not a bijection on {n} points"));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return invalid("points are 1-based; 0 is not a point");
        }
        Self::from_images(images.iter().map(|&x| x - 1).collect())
    }

    /// Builds a permutation of `n` points from disjoint cycles given with
    /// 1-based points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n {
                    return invalid(format!("point {x} outside 1..={n}"));
                }
                if used[x - 1] {
                    return invalid(format!("point {x} appears in more than one cycle"));
                }
                used[x - 1] = true;
                let y = cycle[(i + 1) % cycle.len()];
                images[x - 1] = y - 1;
            }
        }
        // Out-of-range successors were rejected when visited as points.
        Ok(Permutation { images })
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return invalid("permutation degree must be at least 1");
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Ok(Permutation { images })
    }

    /// Uniformly random even permutation, by rejection on parity.
    pub fn random_alternating<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n < 3 {
            return invalid("alternating sampling needs n >= 3");
        }
        loop {
            let g = Self::random(n, rng)?;
            if g.parity() == Parity::Even {
                return Ok(g);
            }
        }
    }

    pub fn random_in<R: Rng + ?Sized>(group: PermGroup, n: usize, rng: &mut R) -> Result<Self> {
        match group {
            PermGroup::Sn => Self::random(n, rng),
            PermGroup::An => Self::random_alternating(n, rng),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based image array.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of the 1-based point `x`.
    pub fn image_of(&self, x: usize) -> usize {
        self.images[x - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Applies `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// Disjoint cycles with 0-based points, each starting at its smallest
    /// point. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles().iter().map(Vec::len).collect()
    }

    pub fn cycle_profile(&self) -> CycleProfile {
        let mut by_valuation = BTreeMap::new();
        let lengths = self.cycle_lengths();
        for &c in &lengths {
            *by_valuation.entry(two_adic_valuation(c)).or_insert(0) += c;
        }
        CycleProfile {
            by_valuation,
            cycle_count: lengths.len(),
        }
    }

    pub fn has_even_order(&self) -> bool {
        self.cycle_lengths().iter().any(|c| c % 2 == 0)
    }

    /// Order as the lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycle_lengths()
            .into_iter()
            .fold(BigUint::one(), |acc, c| acc.lcm(&BigUint::from(c)))
    }

    /// `g^{|g|/2}`, computed from the cycle structure alone.
    ///
    /// Only cycles whose length has the maximal 2-adic valuation survive;
    /// each such cycle of length `c` becomes the product of transpositions
    /// `(x_i x_{i+c/2})`. Returns `None` when `g` has odd order.
    pub fn involution_power(&self) -> Option<Permutation> {
        let cycles = self.cycles();
        let a_max = cycles
            .iter()
            .map(|c| two_adic_valuation(c.len()))
            .max()
            .unwrap_or(0);
        if a_max == 0 {
            return None;
        }
        let mut images: Vec<usize> = (0..self.degree()).collect();
        for cycle in cycles
            .iter()
            .filter(|c| two_adic_valuation(c.len()) == a_max)
        {
            let half = cycle.len() / 2;
            for i in 0..half {
                let (x, y) = (cycle[i], cycle[i + half]);
                images[x] = y;
                images[y] = x;
            }
        }
        Some(Permutation { images })
    }

    /// Number of moved points.
    pub fn support_size(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i != x)
            .count()
    }

    pub fn parity(&self) -> Parity {
        let cycles = self.cycles().len();
        if (self.degree() - cycles) % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Two-line text form: `n`, then the 1-based images.
    pub fn to_text(&self) -> String {
        let imgs: Vec<String> = self.images.iter().map(|x| (x + 1).to_string()).collect();
        format!("{}\n{}\n", self.degree(), imgs.join(" "))
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty permutation text".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad degree: {e}")))?;
        let images = tokens
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad image {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if images.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} images, found {}",
                images.len()
            )));
        }
        Self::from_one_based(&images)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            let pts: Vec<String> = cycle.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}
