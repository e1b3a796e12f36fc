//! Dense bit matrix backing explicit relations.

const WORD_BITS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD_BITS);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        let mut m = Self::empty(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        let w = self.words[r * self.words_per_row + c / WORD_BITS];
        w >> (c % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, on: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.words_per_row + c / WORD_BITS];
        if on {
            *w |= 1 << (c % WORD_BITS);
        } else {
            *w &= !(1 << (c % WORD_BITS));
        }
    }
}
