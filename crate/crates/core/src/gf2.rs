//! Linear algebra over GF(2).
//!
//! Vectors are packed into `u64` words, bit `i` at word `i / 64`, position
//! `i % 64`. Matrices are stored row-major as a list of packed rows so that
//! elimination steps are word-wise XORs.
//!
//! Every public operation is read-only on its inputs: elimination always runs
//! on a private copy. Pivoting is deterministic (lowest row index carrying a
//! one in the current column), so [`BitMatrix::solve`] returns the same
//! solution on every platform.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.mask_tail();
        v
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector with ones exactly at `support`.
    ///
    /// # Panics
    /// Panics if an index is `>= len`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
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
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// In-place addition (XOR).
    ///
    /// # Panics
    /// Panics if the lengths differ.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "or of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Inner product over GF(2): parity of the common support.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            core::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Returns a copy extended by `extra` zero bits.
    pub fn extended(&self, extra: usize) -> Self {
        let mut v = Self::zeros(self.len + extra);
        v.words[..self.words.len()].copy_from_slice(&self.words);
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Parses a string of `0`/`1` characters. ASCII whitespace is skipped.
impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_ascii_whitespace() => {}
                c => return Err(Error::BadBit(c)),
            }
        }
        Ok(Self::from_bools(&bits))
    }
}

/// A dense matrix over GF(2).
///
/// Entry `(i, j) = 1` iff bit `j` participates in check `i` when the matrix is
/// read as a parity-check matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from packed rows.
    ///
    /// All rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                op: "from_rows",
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds a matrix from the sorted or unsorted support of every row.
    pub fn from_row_supports(cols: usize, supports: &[&[usize]]) -> Self {
        let data = supports
            .iter()
            .map(|s| BitVector::from_support(cols, s))
            .collect::<Vec<_>>();
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row].set(col, value)
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Syndrome-style product `H · x`.
    pub fn mul_vec(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mat_vec_mul",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// `self · otherᵀ`; entry `(i, j)` is the overlap parity of row `i` of
    /// `self` and row `j` of `other`.
    pub fn mul_transpose(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op: "mul_transpose",
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.rows);
        for (i, a) in self.data.iter().enumerate() {
            for (j, b) in other.data.iter().enumerate() {
                if a.dot(b) {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        forward_eliminate(&mut work, self.cols).len()
    }

    /// Solves `self · x = b`.
    ///
    /// Returns `Ok(None)` for an inconsistent system. Free variables are set to
    /// zero after Gauss-Jordan elimination, so the result is deterministic.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                op: "solve",
                expected: self.rows,
                found: b.len(),
            });
        }
        Ok(solve_rows(&self.data, self.cols, b))
    }

    /// True iff `v` is a linear combination of the rows.
    pub fn in_rowspace(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "in_rowspace",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut work = self.data.clone();
        let base = forward_eliminate(&mut work, self.cols).len();
        work.push(v.clone());
        Ok(forward_eliminate(&mut work, self.cols).len() == base)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.data {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Forward elimination in place. Returns the pivot column of each pivot row;
/// pivot rows end up at the top in ascending pivot order.
fn forward_eliminate(rows: &mut [BitVector], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..cols {
        if prow == rows.len() {
            break;
        }
        let Some(found) = (prow..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(prow, found);
        let (head, tail) = rows.split_at_mut(prow + 1);
        let pivot = &head[prow];
        for r in tail.iter_mut() {
            if r.get(col) {
                r.xor_assign(pivot);
            }
        }
        pivots.push(col);
        prow += 1;
    }
    pivots
}

/// Gauss-Jordan on the augmented system `[rows | b]`.
pub(crate) fn solve_rows(rows: &[BitVector], cols: usize, b: &BitVector) -> Option<BitVector> {
    let mut aug: Vec<BitVector> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = r.extended(1);
            if b.get(i) {
                a.set(cols, true);
            }
            a
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..cols {
        if prow == aug.len() {
            break;
        }
        let Some(found) = (prow..aug.len()).find(|&r| aug[r].get(col)) else {
            continue;
        };
        aug.swap(prow, found);
        let pivot = aug[prow].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != prow && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        prow += 1;
    }

    // a zero row with a one in the augmented column is a contradiction
    if aug[prow..].iter().any(|r| r.get(cols)) {
        return None;
    }
    let mut x = BitVector::zeros(cols);
    for (r, &col) in pivots.iter().enumerate() {
        if aug[r].get(cols) {
            x.set(col, true);
        }
    }
    Some(x)
}

/// Echelon basis of a matrix's rowspace, for repeated membership queries.
///
/// Building the basis costs one elimination; each query afterwards is a
/// single reduction pass over the basis rows.
#[derive(Clone, Debug)]
pub struct RowspaceBasis {
    cols: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowspaceBasis {
    pub fn new(m: &BitMatrix) -> Self {
        let mut rows = m.data.clone();
        let pivots = forward_eliminate(&mut rows, m.cols);
        rows.truncate(pivots.len());
        Self {
            cols: m.cols,
            rows,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "rowspace contains",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut w = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w.get(p) {
                w.xor_assign(row);
            }
        }
        Ok(w.is_zero())
    }
}

/// Renders a vector as a `0`/`1` string.
pub fn to_bit_string(v: &BitVector) -> String {
    use core::fmt::Write;
    let mut s = String::with_capacity(v.len());
    let _ = write!(s, "{v}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn hamming() -> BitMatrix {
        BitMatrix::from_row_supports(7, &[&[0, 3, 5, 6], &[1, 3, 4, 6], &[2, 4, 5, 6]])
    }

    /// Every vector in the row span, by enumerating all row subsets.
    fn span(m: &BitMatrix) -> BTreeSet<Vec<bool>> {
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << m.rows()) {
            let mut acc = BitVector::zeros(m.cols());
            for i in 0..m.rows() {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(m.row(i));
                }
            }
            out.insert((0..m.cols()).map(|j| acc.get(j)).collect());
        }
        out
    }

    fn brute_rank(m: &BitMatrix) -> usize {
        span(m).len().trailing_zeros() as usize
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                move |rows| {
                    BitMatrix::from_rows(c, rows.iter().map(|b| BitVector::from_bools(b)).collect())
                        .unwrap()
                },
            )
        })
    }

    #[test]
    fn syndrome_of_unit_errors() {
        let h = hamming();
        let s0 = h.mul_vec(&BitVector::unit(7, 0)).unwrap();
        assert!(s0.get(0));
        assert_eq!(s0.support(), vec![0]);
        let s1 = h.mul_vec(&BitVector::unit(7, 1)).unwrap();
        assert_eq!(s1.support(), vec![1]);
        assert!(h.mul_vec(&BitVector::zeros(7)).unwrap().is_zero());
    }

    #[test]
    fn mul_vec_rejects_wrong_length() {
        let err = hamming().mul_vec(&BitVector::zeros(6)).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                op: "mat_vec_mul",
                expected: 7,
                found: 6
            }
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(hamming().rank(), 3);
        assert_eq!(brute_rank(&hamming()), 3);
    }

    #[test]
    fn rank_leaves_input_untouched() {
        let h = hamming();
        let before = h.clone();
        let _ = h.rank();
        assert_eq!(h, before);
    }

    #[test]
    fn solve_examples() {
        let b: BitVector = "1011".parse().unwrap();
        assert_eq!(BitMatrix::identity(4).solve(&b).unwrap(), Some(b));

        let a = BitMatrix::from_row_supports(2, &[&[0, 1], &[0, 1]]);
        assert_eq!(a.solve(&"10".parse().unwrap()).unwrap(), None);

        let h = hamming();
        let s = h.mul_vec(&BitVector::unit(7, 0)).unwrap();
        let x = h.solve(&s).unwrap().unwrap();
        assert_eq!(h.mul_vec(&x).unwrap(), s);

        assert!(h.solve(&BitVector::zeros(2)).is_err());
    }

    #[test]
    fn solve_sets_free_variables_to_zero() {
        // x0 + x1 = 1: pivot on x0, x1 free
        let a = BitMatrix::from_row_supports(2, &[&[0, 1]]);
        let x = a.solve(&"1".parse().unwrap()).unwrap().unwrap();
        assert_eq!(x.to_string(), "10");
    }

    #[test]
    fn rowspace_examples() {
        let h = hamming();
        assert!(h.in_rowspace(&BitVector::zeros(7)).unwrap());
        for i in 0..3 {
            assert!(h.in_rowspace(h.row(i)).unwrap());
        }
        assert!(!h.in_rowspace(&BitVector::unit(7, 0)).unwrap());
        let e0: Vec<bool> = (0..7).map(|j| j == 0).collect();
        assert!(!span(&h).contains(&e0));
    }

    #[test]
    fn bit_string_round_trip() {
        let v: BitVector = "0100000".parse().unwrap();
        assert_eq!(v.support(), vec![1]);
        assert_eq!(to_bit_string(&v), "0100000");
        assert_eq!("01x".parse::<BitVector>(), Err(Error::BadBit('x')));
    }

    #[test]
    fn ones_masks_tail() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(v.iter_ones().last(), Some(69));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rank_matches_span_oracle(m in arb_matrix(4, 5)) {
            prop_assert_eq!(m.rank(), brute_rank(&m));
        }

        #[test]
        fn rowspace_matches_span_oracle(m in arb_matrix(4, 5), bits in proptest::collection::vec(any::<bool>(), 5)) {
            let v = BitVector::from_bools(&bits[..m.cols()]);
            let expected = span(&m).contains(&bits[..m.cols()]);
            prop_assert_eq!(m.in_rowspace(&v).unwrap(), expected);
            prop_assert_eq!(RowspaceBasis::new(&m).contains(&v).unwrap(), expected);
        }

        #[test]
        fn solve_is_sound_and_complete(m in arb_matrix(4, 5), bits in proptest::collection::vec(any::<bool>(), 4)) {
            let b = BitVector::from_bools(&bits[..m.rows()]);
            // b is reachable iff it lies in the column span, i.e. the row span of mᵀ
            let reachable = span(&m.transpose()).contains(&bits[..m.rows()]);
            match m.solve(&b).unwrap() {
                Some(x) => {
                    prop_assert!(reachable);
                    prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
                }
                None => prop_assert!(!reachable),
            }
        }

        #[test]
        fn rank_is_transpose_invariant(m in arb_matrix(12, 12)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }

        #[test]
        fn xor_is_self_inverse(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let v = BitVector::from_bools(&bits);
            let mut w = v.clone();
            w.xor_assign(&v);
            prop_assert!(w.is_zero());
            prop_assert!(v.weight() <= v.len());
        }
    }
}
