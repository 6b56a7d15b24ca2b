//! Dense GF(2) matrices, used to cross-check encoders against explicit
//! generator matrices.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.data[r * self.words_per_row + c / 64];
        if value {
            *word |= 1 << (c % 64);
        } else {
            *word &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// Row vector times matrix: `u · G`.
    pub fn left_mul(&self, u: &[u8]) -> Vec<u8> {
        assert_eq!(u.len(), self.rows);
        let mut acc = vec![0u64; self.words_per_row];
        for (r, &bit) in u.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= w;
                }
            }
        }
        (0..self.cols)
            .map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8)
            .collect()
    }

    /// The submatrix made of the first `cols` columns.
    pub fn column_prefix(&self, cols: usize) -> BitMatrix {
        assert!(cols <= self.cols);
        let mut out = BitMatrix::zeros(self.rows, cols);
        for r in 0..self.rows {
            for c in 0..cols {
                if self.get(r, c) {
                    out.set(r, c, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let w = self.words_per_row;
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pivot) = (rank..self.rows).find(|&r| m[r * w + word] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                for t in 0..w {
                    m.swap(pivot * w + t, rank * w + t);
                }
            }
            for r in 0..self.rows {
                if r != rank && m[r * w + word] & bit != 0 {
                    for t in 0..w {
                        m[r * w + t] ^= m[rank * w + t];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// One line per row of `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rank_and_product() {
        let mut m = BitMatrix::zeros(3, 70);
        for i in 0..3 {
            m.set(i, i * 30, true);
        }
        assert_eq!(m.rank(), 3);
        assert_eq!(m.left_mul(&[1, 0, 1])[60], 1);
        assert_eq!(m.left_mul(&[1, 0, 1])[30], 0);
    }

    #[test]
    fn dependent_rows() {
        let mut m = BitMatrix::zeros(3, 4);
        for (r, row) in ["1100", "0110", "1010"].iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                m.set(r, c, ch == '1');
            }
        }
        assert_eq!(m.rank(), 2);
        assert_eq!(m.to_text(), "1100\n0110\n1010\n");
        assert_eq!(m.column_prefix(2).to_text(), "11\n01\n10\n");
    }
}
