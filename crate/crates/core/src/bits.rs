/// Fixed-length bitset over `u64` words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut b = BitSet { words: vec![!0; len.div_ceil(64)], len };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn intersect_count(&self, other: &BitSet) -> u64 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Copies `len` bits starting at `start` into a fresh set.
    pub fn slice(&self, start: usize, len: usize) -> BitSet {
        let mut out = BitSet::new(len);
        if start.is_multiple_of(64) {
            let w0 = start / 64;
            let n = out.words.len();
            out.words.copy_from_slice(&self.words[w0..w0 + n]);
            out.trim();
        } else {
            for i in 0..len {
                if self.get(start + i) {
                    out.set(i);
                }
            }
        }
        out
    }

    /// Writes `row` at bit offset `start`.
    pub fn write_slice(&mut self, start: usize, row: &BitSet) {
        if start.is_multiple_of(64) {
            let w0 = start / 64;
            let n = row.words.len();
            if row.len.is_multiple_of(64) {
                self.words[w0..w0 + n].copy_from_slice(&row.words);
                return;
            }
        }
        for i in row.iter_ones() {
            self.set(start + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = BitSet::new(130);
        a.set(0);
        a.set(64);
        a.set(129);
        assert_eq!(a.count_ones(), 3);
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        let f = BitSet::full(130);
        assert_eq!(f.count_ones(), 130);
        assert_eq!(a.intersect_count(&f), 3);
        let s = a.slice(64, 66);
        assert_eq!(s.iter_ones().collect::<Vec<_>>(), vec![0, 65]);
        let s2 = a.slice(1, 64);
        assert_eq!(s2.iter_ones().collect::<Vec<_>>(), vec![63]);
        let mut w = BitSet::new(256);
        w.write_slice(128, &s);
        assert_eq!(w.iter_ones().collect::<Vec<_>>(), vec![128, 193]);
    }
}
