//! Multilinear multivariate polynomials over GF(2) in algebraic normal form.
//!
//! A polynomial is a set of monomials combined by XOR; a monomial is a subset
//! of the variables combined by AND (the empty subset is the constant 1).
//! Because x^2 = x over GF(2) the representation is canonical: two
//! polynomials are equal as functions iff their monomial sets are equal.

use std::collections::HashSet;

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// A multilinear monomial: bit i of the mask set means variable `x_{i+1}`
/// appears. The empty mask is the constant 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    mask: BitVec,
}

impl Monomial {
    pub fn new(mask: BitVec) -> Self {
        Monomial { mask }
    }

    /// The constant monomial 1.
    pub fn one(nvars: u32) -> Self {
        Monomial {
            mask: BitVec::zeros(nvars),
        }
    }

    pub fn variable(nvars: u32, index: u32) -> Self {
        Monomial {
            mask: BitVec::from_indices(nvars, &[index]),
        }
    }

    pub fn from_vars(nvars: u32, vars: &[u32]) -> Self {
        Monomial {
            mask: BitVec::from_indices(nvars, vars),
        }
    }

    #[inline]
    pub fn mask(&self) -> &BitVec {
        &self.mask
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Value at `point`: AND over the monomial's variables.
    #[inline]
    pub fn eval(&self, point: &BitVec) -> bool {
        self.mask.is_subset_of(point)
    }
}

/// A polynomial in algebraic normal form: a duplicate-free set of monomials.
///
/// The set container gives O(1) expected XOR-insertion with cancellation;
/// iteration order is unspecified, so anything order-sensitive
/// (serialization, display) goes through [`Anf::sorted_monomials`].
#[derive(Clone, Debug)]
pub struct Anf {
    nvars: u32,
    monomials: HashSet<Monomial>,
}

impl PartialEq for Anf {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.monomials == other.monomials
    }
}

impl Eq for Anf {}

impl Anf {
    /// The zero polynomial (empty monomial set).
    pub fn zero(nvars: u32) -> Self {
        Anf {
            nvars,
            monomials: HashSet::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one(nvars: u32) -> Self {
        let mut p = Self::zero(nvars);
        p.toggle(Monomial::one(nvars));
        p
    }

    /// The single variable `x_{index+1}`.
    pub fn variable(nvars: u32, index: u32) -> Self {
        let mut p = Self::zero(nvars);
        p.toggle(Monomial::variable(nvars, index));
        p
    }

    /// Build from monomials, cancelling duplicates pairwise (GF(2)).
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(nvars: u32, iter: I) -> Self {
        let mut p = Self::zero(nvars);
        for m in iter {
            p.toggle(m);
        }
        p
    }

    #[inline]
    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    #[inline]
    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    #[inline]
    pub fn contains(&self, m: &Monomial) -> bool {
        self.monomials.contains(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Monomial> {
        self.monomials.iter()
    }

    /// XOR a monomial in: inserts it, or cancels an existing copy.
    #[inline]
    pub fn toggle(&mut self, m: Monomial) {
        debug_assert_eq!(m.mask().len(), self.nvars);
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    /// Monomials in canonical order (lexicographic on mask words).
    pub fn sorted_monomials(&self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> = self.monomials.iter().cloned().collect();
        v.sort();
        v
    }

    /// Evaluate at `point`: XOR over monomials of AND over their variables.
    pub fn eval(&self, point: &BitVec) -> Result<bool> {
        if point.len() != self.nvars {
            return Err(Error::dimension("polynomial evaluation", self.nvars, point.len()));
        }
        Ok(self
            .monomials
            .iter()
            .fold(false, |acc, m| acc ^ m.eval(point)))
    }

    /// GF(2) sum: symmetric difference of the monomial sets.
    pub fn add(&self, other: &Anf) -> Result<Anf> {
        if other.nvars != self.nvars {
            return Err(Error::dimension("polynomial sum", self.nvars, other.nvars));
        }
        let (mut big, small) = if self.monomial_count() >= other.monomial_count() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for m in small.monomials.iter() {
            big.toggle(m.clone());
        }
        Ok(big)
    }

    /// Maximum monomial degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.monomials.iter().map(|m| m.degree()).max()
    }

    /// Full truth table (index = point, bit i of the index = variable i+1),
    /// via the subset-sum (Moebius) transform. Guarded to small widths.
    pub fn truth_table(&self) -> Result<Vec<bool>> {
        if self.nvars > 24 {
            return Err(Error::Parameter(format!(
                "truth table limited to 24 variables, got {}",
                self.nvars
            )));
        }
        let size = 1usize << self.nvars;
        let mut t = vec![false; size];
        for m in self.monomials.iter() {
            t[m.mask().to_u64() as usize] ^= true;
        }
        for v in 0..self.nvars {
            let bit = 1usize << v;
            for x in 0..size {
                if x & bit != 0 {
                    let lower = t[x ^ bit];
                    t[x] ^= lower;
                }
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_anf(nvars: u32, max_monomials: usize, rng: &mut ChaCha8Rng) -> Anf {
        let count = rng.gen_range(0..=max_monomials);
        Anf::from_monomials(
            nvars,
            (0..count).map(|_| Monomial::new(BitVec::random(nvars, rng))),
        )
    }

    #[test]
    fn eval_examples() {
        // x1*x2 + x3 at 110 -> 1
        let p = Anf::from_monomials(
            3,
            [Monomial::from_vars(3, &[0, 1]), Monomial::variable(3, 2)],
        );
        assert!(p.eval(&BitVec::from_bit_str("110")).unwrap());
        // constant 1 at anything -> 1
        let one = Anf::one(3);
        assert!(one.eval(&BitVec::from_bit_str("000")).unwrap());
        assert!(one.eval(&BitVec::from_bit_str("111")).unwrap());
        // x1 + x1 cancels to zero
        let mut p = Anf::variable(1, 0);
        p.toggle(Monomial::variable(1, 0));
        assert!(p.is_zero());
        assert!(!p.eval(&BitVec::from_bit_str("1")).unwrap());
        // dimension guard
        assert!(one.eval(&BitVec::zeros(2)).is_err());
    }

    #[test]
    fn add_examples() {
        let x = |i| Anf::variable(3, i);
        let p = x(0).add(&x(1)).unwrap();
        let q = x(1).add(&x(2)).unwrap();
        assert_eq!(p.add(&q).unwrap(), x(0).add(&x(2)).unwrap());
        assert!(p.add(&p).unwrap().is_zero());
        assert_eq!(p.add(&Anf::zero(3)).unwrap(), p);
        assert!(p.add(&Anf::zero(2)).is_err());
    }

    #[test]
    fn degree_examples() {
        let p = Anf::from_monomials(
            3,
            [Monomial::from_vars(3, &[0, 1, 2]), Monomial::variable(3, 0)],
        );
        assert_eq!(p.degree(), Some(3));
        assert_eq!(Anf::one(3).degree(), Some(0));
        let lin = Anf::variable(3, 0).add(&Anf::variable(3, 1)).unwrap();
        assert_eq!(lin.degree(), Some(1));
        assert_eq!(Anf::zero(3).degree(), None);
    }

    #[test]
    fn canonical_form_matches_pointwise_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let v = rng.gen_range(1..=10u32);
            let p = random_anf(v, 12, &mut rng);
            let q = random_anf(v, 12, &mut rng);
            let tp = p.truth_table().unwrap();
            let tq = q.truth_table().unwrap();
            assert_eq!(p == q, tp == tq, "canonical form vs pointwise, v={v}");
            // and the truth table agrees with direct evaluation
            for x in 0..(1u64 << v) {
                let point = BitVec::from_u64(v, x);
                assert_eq!(tp[x as usize], p.eval(&point).unwrap());
            }
        }
    }

    proptest! {
        #[test]
        fn add_is_linear_homomorphism(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = rng.gen_range(1..=8u32);
            let p = random_anf(v, 10, &mut rng);
            let q = random_anf(v, 10, &mut rng);
            let r = random_anf(v, 10, &mut rng);
            let pq = p.add(&q).unwrap();
            prop_assert_eq!(&pq, &q.add(&p).unwrap());
            prop_assert_eq!(
                pq.add(&r).unwrap(),
                p.add(&q.add(&r).unwrap()).unwrap()
            );
            for x in 0..(1u64 << v) {
                let point = BitVec::from_u64(v, x);
                prop_assert_eq!(
                    pq.eval(&point).unwrap(),
                    p.eval(&point).unwrap() ^ q.eval(&point).unwrap()
                );
            }
        }
    }
}
