//! Generic group elements, exhaustive closure of small groups, and the
//! product replacement random walk.

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::perm::Permutation;

/// Default closure cap for [`enumerate_group`].
pub const DEFAULT_ENUMERATION_CAP: usize = 200_000;

/// Default number of product replacement slots.
pub const DEFAULT_SLOTS: usize = 10;

/// Default number of product replacement steps before sampling.
pub const DEFAULT_BURN_IN: usize = 100;

pub trait GroupElement: Clone + Eq + Hash {
    fn op(&self, other: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_identity(&self) -> bool;
    /// The identity of the group containing `self`.
    fn identity_like(&self) -> Self;
}

impl GroupElement for Permutation {
    fn op(&self, other: &Self) -> Self {
        self.then(other)
    }

    fn inv(&self) -> Self {
        self.inverse()
    }

    fn is_identity(&self) -> bool {
        Permutation::is_identity(self)
    }

    fn identity_like(&self) -> Self {
        Permutation::identity(self.degree())
    }
}

impl GroupElement for Matrix {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn inv(&self) -> Self {
        self.inverse().expect("group elements are invertible")
    }

    fn is_identity(&self) -> bool {
        Matrix::is_identity(self)
    }

    fn identity_like(&self) -> Self {
        Matrix::identity(self.field(), self.dim())
    }
}

/// All elements of `<generators>`, by breadth-first closure under right
/// multiplication by the generators. The identity comes first.
pub fn enumerate_group<E: GroupElement>(generators: &[E], cap: usize) -> Result<Vec<E>> {
    let Some(first) = generators.first() else {
        return invalid("at least one generator is required");
    };
    let identity = first.identity_like();
    let mut seen: HashSet<E> = HashSet::from([identity.clone()]);
    let mut order = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.op(g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded(cap));
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Product replacement: a random walk on tuples of group elements whose
/// entries are approximately uniform after burn-in. Heuristic only.
#[derive(Debug, Clone)]
pub struct ProductReplacement<E, R> {
    slots: Vec<E>,
    rng: R,
}

impl<E: GroupElement, R: Rng> ProductReplacement<E, R> {
    /// Fills `slots` entries by cycling through the generators, then runs
    /// `burn_in` steps. The slot count is raised to at least
    /// `max(10, generators + 2)`.
    pub fn new(generators: &[E], slots: usize, burn_in: usize, rng: R) -> Result<Self> {
        if generators.is_empty() {
            return invalid("product replacement needs a nonempty generator list");
        }
        let count = slots.max(DEFAULT_SLOTS).max(generators.len() + 2);
        let slots = generators.iter().cycle().take(count).cloned().collect();
        let mut pr = ProductReplacement { slots, rng };
        for _ in 0..burn_in {
            pr.step();
        }
        Ok(pr)
    }

    /// Replaces slot `i` by one of `s_i s_j`, `s_i s_j^-1`, `s_j s_i`,
    /// `s_j^-1 s_i` for distinct random `i`, `j`; returns `i`.
    pub fn step(&mut self) -> usize {
        let k = self.slots.len();
        let i = self.rng.random_range(0..k);
        let mut j = self.rng.random_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let other = if self.rng.random_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inv()
        };
        self.slots[i] = if self.rng.random_bool(0.5) {
            self.slots[i].op(&other)
        } else {
            other.op(&self.slots[i])
        };
        i
    }

    /// One step, then a copy of a uniformly chosen slot.
    pub fn next_element(&mut self) -> E {
        self.step();
        let k = self.rng.random_range(0..self.slots.len());
        self.slots[k].clone()
    }

    pub fn slots(&self) -> &[E] {
        &self.slots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        let cs: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(n, &cs).unwrap()
    }

    #[test]
    fn enumerate_s4() {
        let gens = [p(4, &[&[1, 2]]), p(4, &[&[1, 2, 3, 4]])];
        let all = enumerate_group(&gens, 1000).unwrap();
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        assert_eq!(enumerate_group(&gens, 10), Err(Error::CapExceeded(10)));
        assert!(enumerate_group::<Permutation>(&[], 10).is_err());
    }

    #[test]
    fn pr_stays_in_group() {
        let gens = [p(5, &[&[1, 2, 3]]), p(5, &[&[3, 4, 5]])];
        let group: HashSet<_> = enumerate_group(&gens, 1000).unwrap().into_iter().collect();
        assert_eq!(group.len(), 60);
        let mut pr = ProductReplacement::new(&gens, 10, 50, ChaCha8Rng::seed_from_u64(3)).unwrap();
        for _ in 0..500 {
            assert!(group.contains(&pr.next_element()));
        }
    }

    #[test]
    fn pr_order_two_generator() {
        let t = p(3, &[&[1, 2]]);
        let mut pr =
            ProductReplacement::new(&[t.clone()], 10, 20, ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(pr.slots().len(), 10);
        for _ in 0..200 {
            let x = pr.next_element();
            assert!(x == t || x.is_identity());
        }
    }

    #[test]
    fn pr_deterministic() {
        let gens = [p(6, &[&[1, 2]]), p(6, &[&[1, 2, 3, 4, 5, 6]])];
        let run = || {
            let mut pr =
                ProductReplacement::new(&gens, 12, 30, ChaCha8Rng::seed_from_u64(77)).unwrap();
            (0..20).map(|_| pr.next_element()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
        assert!(ProductReplacement::<Permutation, _>::new(
            &[],
            10,
            0,
            ChaCha8Rng::seed_from_u64(0)
        )
        .is_err());
    }
}
