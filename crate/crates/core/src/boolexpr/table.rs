//! Packed truth tables.
//!
//! A table of arity `m` stores `2^m` bits. Bit `i` is the function value on the
//! assignment whose `j`-th variable is `(i >> j) & 1`, so variable 0 is the
//! least significant index bit. Unused high bits of a single-word table are
//! always zero, which keeps derived equality and hashing sound.

use std::fmt;

/// Alternating runs of `2^k` ones and `2^k` zeros, starting with ones.
const RUNS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    arity: u32,
    words: Vec<u64>,
}

fn word_count(arity: u32) -> usize {
    if arity <= 6 {
        1
    } else {
        1 << (arity - 6)
    }
}

fn tail_mask(arity: u32) -> u64 {
    if arity >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << arity)) - 1
    }
}

/// Keeps the bits of `w` whose index has bit `pos` equal to `b`, packed into the low 32 bits.
fn compress(w: u64, pos: u32, b: bool) -> u64 {
    let g = 1u32 << pos;
    let mut x = if b { w >> g } else { w } & RUNS[pos as usize];
    for s in pos..5 {
        x = (x | (x >> (1u32 << s))) & RUNS[s as usize + 1];
    }
    x
}

impl TruthTable {
    pub fn constant(arity: u32, value: bool) -> Self {
        let fill = if value { u64::MAX } else { 0 };
        let mut words = vec![fill; word_count(arity)];
        words[0] &= tail_mask(arity);
        TruthTable { arity, words }
    }

    /// The projection onto variable `pos`.
    pub fn variable(arity: u32, pos: u32) -> Self {
        assert!(pos < arity, "variable position {pos} out of arity {arity}");
        let words = if pos < 6 {
            let w = !RUNS[pos as usize] & tail_mask(arity);
            vec![w; word_count(arity)]
        } else {
            let block = 1usize << (pos - 6);
            (0..word_count(arity))
                .map(|i| if (i / block) % 2 == 1 { u64::MAX } else { 0 })
                .collect()
        };
        TruthTable { arity, words }
    }

    pub fn from_fn(arity: u32, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = TruthTable::constant(arity, false);
        for i in 0..t.len() {
            if f(i) {
                t.words[i >> 6] |= 1 << (i & 63);
            }
        }
        t
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn len(&self) -> usize {
        1usize << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> bool {
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn not(&self) -> Self {
        let mask = tail_mask(self.arity);
        TruthTable {
            arity: self.arity,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        TruthTable {
            arity: self.arity,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &Self) -> Self {
        debug_assert_eq!(self.arity, other.arity);
        TruthTable {
            arity: self.arity,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn constant_value(&self) -> Option<bool> {
        let ones = self.count_ones();
        if ones == 0 {
            Some(false)
        } else if ones == self.len() as u64 {
            Some(true)
        } else {
            None
        }
    }

    /// The table with variable `pos` fixed to `value`; the remaining variables keep their order.
    pub fn cofactor(&self, pos: u32, value: bool) -> Self {
        assert!(pos < self.arity);
        let arity = self.arity - 1;
        let words = if pos >= 6 {
            let block = 1usize << (pos - 6);
            let offset = if value { block } else { 0 };
            self.words
                .chunks(2 * block)
                .flat_map(|c| c[offset..offset + block].iter().copied())
                .collect()
        } else if self.arity <= 6 {
            vec![compress(self.words[0], pos, value) & tail_mask(arity)]
        } else {
            self.words
                .chunks(2)
                .map(|c| compress(c[0], pos, value) | (compress(c[1], pos, value) << 32))
                .collect()
        };
        TruthTable { arity, words }
    }

    pub fn depends_on(&self, pos: u32) -> bool {
        self.cofactor(pos, false) != self.cofactor(pos, true)
    }

    pub fn is_monotone(&self) -> bool {
        (0..self.arity).all(|p| {
            let lo = self.cofactor(p, false);
            let hi = self.cofactor(p, true);
            lo.words.iter().zip(&hi.words).all(|(l, h)| l & !h == 0)
        })
    }

    /// For a monotone table, the larger of the biggest minimal true point and the
    /// biggest complement of a maximal false point. These are the prime implicant
    /// and prime implicate sizes, hence a lower bound on decision-tree depth.
    pub fn monotone_certificate_bound(&self) -> u32 {
        let m = self.arity;
        let full = self.len() - 1;
        let mut best = 0;
        for i in 0..self.len() {
            if self.get(i) {
                let minimal = (0..m).all(|j| i >> j & 1 == 0 || !self.get(i & !(1 << j)));
                if minimal {
                    best = best.max((i as u64).count_ones());
                }
            } else {
                let maximal = (0..m).all(|j| i >> j & 1 == 1 || self.get(i | (1 << j)));
                if maximal {
                    best = best.max(((full & !i) as u64).count_ones());
                }
            }
        }
        best
    }

    /// Bits in index order, e.g. `0001` for a two-variable conjunction.
    pub fn to_bit_string(&self) -> String {
        (0..self.len()).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity <= 8 {
            write!(f, "TruthTable({})", self.to_bit_string())
        } else {
            write!(f, "TruthTable(arity={}, ones={})", self.arity, self.count_ones())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_cofactor(t: &TruthTable, pos: u32, value: bool) -> TruthTable {
        TruthTable::from_fn(t.arity() - 1, |i| {
            let low = i & ((1 << pos) - 1);
            let high = (i >> pos) << (pos + 1);
            t.get(low | high | (usize::from(value) << pos))
        })
    }

    #[test]
    fn conjunction_bits() {
        let x = TruthTable::variable(2, 0);
        let y = TruthTable::variable(2, 1);
        assert_eq!(x.and(&y).to_bit_string(), "0001");
        assert_eq!(x.or(&y).to_bit_string(), "0111");
        assert_eq!(TruthTable::constant(0, true).to_bit_string(), "1");
    }

    #[test]
    fn constants_have_clean_tails() {
        assert_eq!(TruthTable::constant(3, true).count_ones(), 8);
        assert_eq!(TruthTable::constant(3, true).not(), TruthTable::constant(3, false));
        assert_eq!(TruthTable::constant(8, true).count_ones(), 256);
    }

    #[test]
    fn certificate_bound_of_and_or() {
        let t = (0..4).fold(TruthTable::constant(4, true), |acc, p| acc.and(&TruthTable::variable(4, p)));
        assert_eq!(t.monotone_certificate_bound(), 4);
        let t = (0..4).fold(TruthTable::constant(4, false), |acc, p| acc.or(&TruthTable::variable(4, p)));
        assert_eq!(t.monotone_certificate_bound(), 4);
    }

    proptest! {
        #[test]
        fn cofactor_matches_bitwise_definition(arity in 1u32..10, seed in any::<u64>(), value: bool) {
            let mut state = seed;
            let t = TruthTable::from_fn(arity, |_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 63 == 1
            });
            for pos in 0..arity {
                prop_assert_eq!(t.cofactor(pos, value), naive_cofactor(&t, pos, value));
            }
        }

        #[test]
        fn variable_tables_match_index_bits(arity in 1u32..10) {
            for pos in 0..arity {
                let t = TruthTable::variable(arity, pos);
                for i in 0..t.len() {
                    prop_assert_eq!(t.get(i), (i >> pos) & 1 == 1);
                }
            }
        }
    }
}
