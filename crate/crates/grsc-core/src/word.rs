//! Signed letters and words in the free monoid on S and its inverses.

use std::fmt;

/// A letter `s` or `s⁻¹`, packed as `2·index + (1 if positive)`.
///
/// The derived order sorts by alphabet index first and puts the inverse
/// before the positive letter at equal index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u32);

impl Letter {
    pub fn new(index: u32, positive: bool) -> Self {
        Letter(index * 2 + positive as u32)
    }

    pub fn pos(index: u32) -> Self {
        Letter::new(index, true)
    }

    pub fn neg(index: u32) -> Self {
        Letter::new(index, false)
    }

    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn sign(self) -> i64 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "{}", self.index())
        } else {
            write!(f, "-{}", self.index())
        }
    }
}

/// A finite sequence of letters. Not necessarily reduced.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn into_vec(self) -> Vec<Letter> {
        self.0
    }

    /// Plain concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        self.0.iter().rev().map(|l| l.inverse()).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(f), Some(l)) if self.len() > 1 => *f != l.inverse(),
                _ => true,
            }
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Free reduction of the product `self · other`.
    pub fn mul_reduced(&self, other: &Word) -> Word {
        let mut out = self.free_reduce().0;
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Splits a reduced word as `conjugator · core · conjugator⁻¹` with the
    /// core cyclically reduced and the conjugator maximal.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let w = &self.0;
        let n = w.len();
        let mut k = 0;
        while 2 * k + 1 < n && w[k] == w[n - 1 - k].inverse() {
            k += 1;
        }
        (Word(w[k..n - k].to_vec()), Word(w[..k].to_vec()))
    }

    /// Left rotation by `k` positions.
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let k = k % self.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Offset of the lexicographically least rotation (first one on ties).
    pub fn least_rotation(&self) -> usize {
        let n = self.len();
        let w = &self.0;
        (0..n)
            .min_by(|&i, &j| {
                let a = w[i..].iter().chain(&w[..i]);
                let b = w[j..].iter().chain(&w[..j]);
                a.cmp(b)
            })
            .unwrap_or(0)
    }

    /// Lexicographically least word among all rotations of `self` and of its inverse.
    pub fn canonical_cyclic(&self) -> Word {
        let a = self.rotate(self.least_rotation());
        let inv = self.inverse();
        let b = inv.rotate(inv.least_rotation());
        a.min(b)
    }

    /// Smallest `p` dividing `len` such that the word is invariant under rotation by `p`.
    pub fn cyclic_period(&self) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        // prefix function on the word; the primitive root has length n - pi[n-1]
        // whenever that divides n.
        let w = &self.0;
        let mut pi = vec![0usize; n];
        for i in 1..n {
            let mut k = pi[i - 1];
            while k > 0 && w[i] != w[k] {
                k = pi[k - 1];
            }
            if w[i] == w[k] {
                k += 1;
            }
            pi[i] = k;
        }
        let p = n - pi[n - 1];
        if n.is_multiple_of(p) {
            p
        } else {
            n
        }
    }

    /// `Some((root, k))` when the word is `root^k` with `k ≥ 2`.
    pub fn proper_power(&self) -> Option<(Word, usize)> {
        let p = self.cyclic_period();
        if p == 0 || p == self.len() {
            None
        } else {
            Some((Word(self.0[..p].to_vec()), self.len() / p))
        }
    }

    /// Exponent sum of each generator.
    pub fn exponent_vector(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            v[l.index() as usize] += l.sign();
        }
        v
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &[i32]) -> Word {
        s.iter()
            .map(|&x| Letter::new(x.unsigned_abs() - 1, x > 0))
            .collect()
    }

    #[test]
    fn free_reduction_examples() {
        // a b b⁻¹ c -> a c
        assert_eq!(w(&[1, 2, -2, 3]).free_reduce(), w(&[1, 3]));
        assert_eq!(w(&[1, -1]).free_reduce(), Word::empty());
        assert_eq!(w(&[1, 2, 3]).free_reduce(), w(&[1, 2, 3]));
    }

    #[test]
    fn cyclic_reduction_examples() {
        let (core, conj) = w(&[1, 2, 3, -2, -1]).cyclic_reduce();
        assert_eq!(core, w(&[3]));
        assert_eq!(conj, w(&[1, 2]));
        let (core, conj) = w(&[1, 2, -1, -2]).cyclic_reduce();
        assert_eq!(core, w(&[1, 2, -1, -2]));
        assert!(conj.is_empty());
    }

    #[test]
    fn inverse_sorts_first() {
        assert!(Letter::neg(0) < Letter::pos(0));
        assert!(Letter::pos(0) < Letter::neg(1));
    }

    #[test]
    fn powers() {
        assert_eq!(w(&[1, 2, 1, 2]).proper_power(), Some((w(&[1, 2]), 2)));
        assert_eq!(w(&[1, 1, 2]).proper_power(), None);
        assert_eq!(w(&[1; 7]).proper_power(), Some((w(&[1]), 7)));
    }

    #[test]
    fn canonical_is_rotation_and_inversion_invariant() {
        let r = w(&[1, 1, -3, -2, -2, -1, -2]);
        let c = r.canonical_cyclic();
        for k in 0..r.len() {
            assert_eq!(r.rotate(k).canonical_cyclic(), c);
            assert_eq!(r.rotate(k).inverse().canonical_cyclic(), c);
        }
    }
}
