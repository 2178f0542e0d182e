//! Seeded random generators, words and group elements.
//!
//! The stream is SplitMix64 started from the 64-bit seed as its state:
//!
//! ```text
//! state += 0x9e3779b97f4a7c15
//! z = state
//! z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//! z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//! output z ^ (z >> 31)
//! ```
//!
//! A uniform choice among `n` options is `output % n`; a field element is
//! `Field::element_from_bits(output)` (for GF(q): `output % q`).

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::field::Field;
use crate::forms::GroupKind;
use crate::generators::{all_tokens, eval_word, GenError, Token, Word};
use crate::linalg::Matrix;

pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: SplitMix64::from_seed(seed.to_le_bytes()) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform-ish index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn element<F: Field>(&mut self, f: &F) -> F::Elem {
        f.element_from_bits(self.next_u64())
    }

    pub fn nonzero<F: Field>(&mut self, f: &F) -> F::Elem {
        loop {
            let e = self.element(f);
            if !f.is_zero(&e) {
                return e;
            }
        }
    }

    /// A generator of `kind` chosen uniformly among the token families, with
    /// a random parameter.
    pub fn token<F: Field>(&mut self, kind: GroupKind, f: &F) -> Token<F::Elem> {
        let shapes = all_tokens(kind, f, &f.one());
        match &shapes[self.below(shapes.len())] {
            Token::X { row, col, .. } => Token::x(*row, *col, self.element(f)),
            other => other.clone(),
        }
    }

    pub fn word<F: Field>(&mut self, kind: GroupKind, f: &F, len: usize) -> Word<F::Elem> {
        Word::new(kind, (0..len).map(|_| self.token(kind, f)).collect())
    }

    /// A random diagonal element of `kind`: `diag(a, mu/a)` with `alpha`
    /// in front for odd orthogonal kinds (`mu = alpha^2`) and `mu = 1` for
    /// isometry kinds.
    pub fn diagonal<F: Field>(&mut self, kind: GroupKind, f: &F) -> Matrix<F> {
        let l = kind.size();
        let mut entries = Vec::with_capacity(kind.dim());
        let mu = if kind.is_odd_orthogonal() {
            let alpha = if kind.is_isometry_group() {
                if self.below(2) == 0 {
                    f.one()
                } else {
                    f.neg(&f.one())
                }
            } else {
                self.nonzero(f)
            };
            entries.push(alpha.clone());
            f.mul(&alpha, &alpha)
        } else if kind.is_isometry_group() {
            f.one()
        } else {
            self.nonzero(f)
        };
        let a: Vec<F::Elem> = (0..l).map(|_| self.nonzero(f)).collect();
        entries.extend(a.iter().cloned());
        entries.extend(a.iter().map(|x| f.div(&mu, x).expect("nonzero")));
        Matrix::diagonal(f, &entries)
    }

    /// `word1 * diagonal * word2` with 20 to 60 generators in total.
    pub fn element_of<F: Field>(&mut self, kind: GroupKind, f: &F) -> Result<Matrix<F>, GenError> {
        let total = 20 + self.below(41);
        let split = self.below(total + 1);
        let w1 = self.word(kind, f, split);
        let w2 = self.word(kind, f, total - split);
        let d = self.diagonal(kind, f);
        Ok(eval_word(f, &w1)?.mul(&d)?.mul(&eval_word(f, &w2)?)?)
    }
}
