//! Packed bit vectors over GF(2) and incremental Gaussian elimination.

use std::ops::{BitXor, BitXorAssign};

const WORD: usize = 64;

/// Bit vector of fixed length indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gf2Vector {
    words: Vec<u64>,
    len: usize,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn lowest_set_bit(&self) -> Option<usize> {
        self.lowest_set_bit_from(0)
    }

    fn lowest_set_bit_from(&self, word: usize) -> Option<usize> {
        self.words[word..]
            .iter()
            .position(|&w| w != 0)
            .map(|k| (word + k) * WORD + self.words[word + k].trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + b)
            })
        })
    }
}

impl BitXorAssign<&Gf2Vector> for Gf2Vector {
    fn bitxor_assign(&mut self, rhs: &Gf2Vector) {
        assert_eq!(self.len, rhs.len, "GF(2) vectors of different length");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor for &Gf2Vector {
    type Output = Gf2Vector;

    fn bitxor(self, rhs: &Gf2Vector) -> Gf2Vector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

/// Row-echelon basis built one vector at a time.
///
/// Every stored row's pivot is its lowest set bit, so reducing a vector
/// against the basis only ever clears its current lowest bit.
#[derive(Debug, Clone)]
pub struct Gf2Eliminator {
    len: usize,
    rows: Vec<Gf2Vector>,
    pivot_row: Vec<Option<usize>>,
}

impl Gf2Eliminator {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
            pivot_row: vec![None; len],
        }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after elimination; zero iff `v` is in the span.
    pub fn reduce(&self, v: &Gf2Vector) -> Gf2Vector {
        let mut r = v.clone();
        let mut word = 0;
        while let Some(bit) = r.lowest_set_bit_from(word) {
            match self.pivot_row[bit] {
                Some(row) => r ^= &self.rows[row],
                None => return r,
            }
            word = bit / WORD;
        }
        r
    }

    pub fn is_independent(&self, v: &Gf2Vector) -> bool {
        !self.reduce(v).is_zero()
    }

    /// Adds `v` if it is independent of the stored rows; returns whether it was.
    pub fn insert(&mut self, v: &Gf2Vector) -> bool {
        assert_eq!(v.len(), self.len, "GF(2) vector of wrong length");
        let r = self.reduce(v);
        match r.lowest_set_bit() {
            Some(pivot) => {
                self.pivot_row[pivot] = Some(self.rows.len());
                self.rows.push(r);
                true
            }
            None => false,
        }
    }
}

/// Rank of a set of GF(2) vectors.
pub fn gf2_rank<'a>(vectors: impl IntoIterator<Item = &'a Gf2Vector>) -> usize {
    let mut elim: Option<Gf2Eliminator> = None;
    for v in vectors {
        elim.get_or_insert_with(|| Gf2Eliminator::new(v.len())).insert(v);
    }
    elim.map_or(0, |e| e.rank())
}
