/// Square boolean matrix stored as packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    size: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(size: usize) -> Self {
        let words = size.div_ceil(64);
        BitMatrix {
            size,
            words,
            data: vec![0; words * size],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Sets bit `(i, j)`; returns whether it was previously clear.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.data[i * self.words + j / 64];
        let mask = 1u64 << (j % 64);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    pub fn set_row_all(&mut self, i: usize) -> bool {
        let mut changed = false;
        for j in 0..self.size {
            changed |= self.set(i, j);
        }
        changed
    }

    /// ORs row `src` into row `dst`; returns whether `dst` grew.
    pub fn or_row_into(&mut self, src: &[u64], dst: usize) -> bool {
        let mut changed = false;
        let row = &mut self.data[dst * self.words..(dst + 1) * self.words];
        for (d, s) in row.iter_mut().zip(src) {
            let merged = *d | *s;
            changed |= merged != *d;
            *d = merged;
        }
        changed
    }

    /// Makes the matrix symmetric by OR-ing it with its transpose.
    pub fn symmetrize(&mut self) -> bool {
        let mut changed = false;
        for i in 0..self.size {
            for j in (i + 1)..self.size {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a != b {
                    self.set(i, j);
                    self.set(j, i);
                    changed = true;
                }
            }
        }
        changed
    }

    pub fn iter_row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_symmetrize() {
        let mut m = BitMatrix::new(70);
        assert!(m.set(3, 66));
        assert!(!m.set(3, 66));
        assert!(m.get(3, 66) && !m.get(66, 3));
        assert!(m.symmetrize());
        assert!(m.get(66, 3));
        assert_eq!(m.iter_row(3).collect::<Vec<_>>(), vec![66]);
        let src = m.row(66).to_vec();
        assert!(m.or_row_into(&src, 0));
        assert!(m.get(0, 3));
    }
}
