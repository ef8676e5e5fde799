//! Dense square bit matrices stored as packed `u64` rows.

use std::fmt;

const WORD: usize = 64;

/// An `n × n` boolean matrix with rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(WORD).max(1);
        Self {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n);
        for x in 0..n {
            m.set(x, x);
        }
        m
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words_per_row(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[u64] {
        &self.data[x * self.words..(x + 1) * self.words]
    }

    #[inline]
    pub fn row_mut(&mut self, x: usize) -> &mut [u64] {
        &mut self.data[x * self.words..(x + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[x * self.words + y / WORD] >> (y % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.data[x * self.words + y / WORD] |= 1 << (y % WORD);
    }

    #[inline]
    pub fn clear(&mut self, x: usize, y: usize) {
        self.data[x * self.words + y / WORD] &= !(1 << (y % WORD));
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_count(&self, x: usize) -> usize {
        self.row(x).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.n);
        for (x, y) in self.ones() {
            t.set(y, x);
        }
        t
    }

    /// In-place union with `other`.
    pub fn union_with(&mut self, other: &BitMatrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &BitMatrix) -> bool {
        self.data.iter().zip(&other.data).any(|(a, b)| a & b != 0)
    }

    /// Iterates the set positions of row `x` in ascending order.
    pub fn row_ones(&self, x: usize) -> RowOnes<'_> {
        RowOnes::new(self.row(x))
    }

    /// All set positions in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| self.row_ones(x).map(move |y| (x, y)))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({})", self.n)?;
        for x in 0..self.n {
            let line: String = (0..self.n)
                .map(|y| if self.get(x, y) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Popcount of the bitwise AND of two packed rows.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as u64)
        .sum()
}

pub struct RowOnes<'a> {
    row: &'a [u64],
    word: usize,
    bits: u64,
}

impl<'a> RowOnes<'a> {
    fn new(row: &'a [u64]) -> Self {
        let bits = row.first().copied().unwrap_or(0);
        Self { row, word: 0, bits }
    }
}

impl Iterator for RowOnes<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let t = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * WORD + t);
            }
            self.word += 1;
            if self.word >= self.row.len() {
                return None;
            }
            self.bits = self.row[self.word];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_across_word_boundary() {
        let mut m = BitMatrix::new(130);
        m.set(0, 63);
        m.set(0, 64);
        m.set(129, 129);
        assert!(m.get(0, 63) && m.get(0, 64) && m.get(129, 129));
        assert!(!m.get(0, 65));
        assert_eq!(m.row_ones(0).collect::<Vec<_>>(), vec![63, 64]);
        assert_eq!(m.count_ones(), 3);
        m.clear(0, 64);
        assert_eq!(m.row_count(0), 1);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let mut m = BitMatrix::new(5);
        m.set(0, 3);
        m.set(4, 1);
        let t = m.transpose();
        assert!(t.get(3, 0) && t.get(1, 4));
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn and_count_matches_manual() {
        let mut m = BitMatrix::new(70);
        for y in [1, 5, 66, 69] {
            m.set(0, y);
        }
        for y in [5, 66, 68] {
            m.set(1, y);
        }
        assert_eq!(and_count(m.row(0), m.row(1)), 2);
    }
}
