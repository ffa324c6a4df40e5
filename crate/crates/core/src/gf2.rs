//! Word-packed GF(2) vectors and column-oriented matrices.
//!
//! A [`BinaryVector`] stores `len` bits in `u64` words, bit `i` living in word
//! `i / 64` at position `i % 64`. Bits past `len` are always zero, so two vectors
//! compare equal exactly when their words do.
//!
//! A [`BinaryMatrix`] is a list of columns, matching the way payload vectors
//! arrive at a node one packet at a time. Rank and solving go through
//! [`Eliminator`], an incremental Gaussian eliminator keyed by the lowest set bit
//! of each stored vector.

use std::fmt;

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot combine an empty list of vectors")]
    Empty,
}

const WORD_BITS: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A vector over GF(2) with a fixed bit length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    /// Standard basis vector `e_bit`.
    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from packed words, clearing anything past `len`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(word_count(len), 0);
        let mut v = Self { len, words };
        v.canonicalize();
        v
    }

    /// Parses a string of `0`/`1` characters; index 0 is the first character.
    pub fn parse_bits(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bits(&b))
    }

    /// Draws a vector whose bits are i.i.d. Bernoulli(1/2).
    ///
    /// Consumes exactly `ceil(len / 64)` calls to `next_u64`, word `i` coming from
    /// draw `i`; high bits of the last draw are discarded.
    pub fn random_bernoulli<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..word_count(len)).map(|_| rng.next_u64()).collect();
        Self::from_words(len, words)
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
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit, if any.
    pub fn lowest_set_bit(&self) -> Option<usize> {
        self.lowest_set_bit_from_word(0)
    }

    #[inline]
    fn lowest_set_bit_from_word(&self, start_word: usize) -> Option<usize> {
        self.words[start_word..]
            .iter()
            .position(|&w| w != 0)
            .map(|off| {
                let w = start_word + off;
                w * WORD_BITS + self.words[w].trailing_zeros() as usize
            })
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + bit)
            })
        })
    }

    /// `self ^= other`.
    pub fn xor_assign(&mut self, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        self.xor_words_from(other, 0);
        Ok(())
    }

    /// XOR of words `start_word..`; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn xor_words_from(&mut self, other: &Self, start_word: usize) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words[start_word..]
            .iter_mut()
            .zip(&other.words[start_word..])
        {
            *a ^= *b;
        }
    }

    pub fn and(&self, other: &Self) -> Result<Self, Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    fn canonicalize(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({self})")
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// XOR of the vectors whose mask bit is set.
pub fn xor_combine(vectors: &[BinaryVector], mask: &BinaryVector) -> Result<BinaryVector, Gf2Error> {
    xor_combine_by(vectors, |v| v, mask)
}

/// [`xor_combine`] over any slice, projecting each item onto the vector to sum.
pub fn xor_combine_by<T>(
    items: &[T],
    project: impl Fn(&T) -> &BinaryVector,
    mask: &BinaryVector,
) -> Result<BinaryVector, Gf2Error> {
    let first = items.first().ok_or(Gf2Error::Empty)?;
    if mask.len() != items.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: items.len(),
            found: mask.len(),
        });
    }
    let len = project(first).len();
    if let Some(bad) = items.iter().map(&project).find(|v| v.len() != len) {
        return Err(Gf2Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    let mut out = BinaryVector::zeros(len);
    for i in mask.ones() {
        out.xor_words_from(project(&items[i]), 0);
    }
    Ok(out)
}

/// [`xor_combine`] over vectors stored back to back in `words`, each
/// `stride` words long and `len` bits wide.
pub fn xor_combine_packed(
    words: &[u64],
    stride: usize,
    len: usize,
    mask: &BinaryVector,
) -> Result<BinaryVector, Gf2Error> {
    if stride != word_count(len) {
        return Err(Gf2Error::DimensionMismatch {
            expected: word_count(len),
            found: stride,
        });
    }
    if mask.len() * stride != words.len() {
        return Err(Gf2Error::DimensionMismatch {
            expected: words.len() / stride.max(1),
            found: mask.len(),
        });
    }
    let mut out = vec![0u64; stride];
    for i in mask.ones() {
        for (o, w) in out.iter_mut().zip(&words[i * stride..(i + 1) * stride]) {
            *o ^= *w;
        }
    }
    Ok(BinaryVector::from_words(len, out))
}

/// A GF(2) matrix stored as columns of a common length `rows`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    columns: Vec<BinaryVector>,
}

impl BinaryMatrix {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<BinaryVector>) -> Result<Self, Gf2Error> {
        let mut m = Self::new(rows);
        for c in columns {
            m.push_column(c)?;
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            columns: (0..n).map(|i| BinaryVector::unit(n, i)).collect(),
        }
    }

    pub fn push_column(&mut self, column: BinaryVector) -> Result<(), Gf2Error> {
        if column.len() != self.rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.rows,
                found: column.len(),
            });
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[BinaryVector] {
        &self.columns
    }

    pub fn rank(&self) -> usize {
        let mut elim = Eliminator::new(self.rows, 0);
        for c in &self.columns {
            if elim.is_full() {
                break;
            }
            elim.insert(c.clone(), None);
        }
        elim.rank()
    }
}

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Vec<BinaryVector>),
    Underdetermined { rank: usize },
}

/// Solves for the `rows` unknown symbols given one coded symbol per column.
///
/// Column `j` says that the XOR of the unknowns on its support equals `symbols[j]`.
pub fn solve(matrix: &BinaryMatrix, symbols: &[BinaryVector]) -> Result<SolveOutcome, Gf2Error> {
    if symbols.len() != matrix.column_count() {
        return Err(Gf2Error::DimensionMismatch {
            expected: matrix.column_count(),
            found: symbols.len(),
        });
    }
    let width = symbols.first().map_or(0, BinaryVector::len);
    if let Some(bad) = symbols.iter().find(|s| s.len() != width) {
        return Err(Gf2Error::DimensionMismatch {
            expected: width,
            found: bad.len(),
        });
    }
    let mut elim = Eliminator::new(matrix.rows(), width);
    for (c, y) in matrix.columns().iter().zip(symbols) {
        if elim.is_full() {
            break;
        }
        elim.insert(c.clone(), Some(y.clone()));
    }
    Ok(match elim.solution() {
        Some(x) => SolveOutcome::Solved(x),
        None => SolveOutcome::Underdetermined { rank: elim.rank() },
    })
}

/// Incremental Gaussian elimination over GF(2).
///
/// Each stored row has a distinct pivot, its lowest set bit. An optional
/// right-hand side symbol rides along with every row and receives the same XORs.
#[derive(Clone, Debug)]
pub struct Eliminator {
    dim: usize,
    symbol_width: usize,
    pivot_row: Vec<Option<usize>>,
    rows: Vec<BinaryVector>,
    rhs: Vec<BinaryVector>,
}

impl Eliminator {
    /// `symbol_width` is the bit width of right-hand sides; rows inserted with
    /// `None` carry a zero symbol.
    pub fn new(dim: usize, symbol_width: usize) -> Self {
        Self {
            dim,
            symbol_width,
            pivot_row: vec![None; dim],
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Reduces `v` against the stored rows; keeps it if it is innovative.
    ///
    /// Returns `true` when the rank grew. Panics if `v.len() != dim`.
    pub fn insert(&mut self, mut v: BinaryVector, rhs: Option<BinaryVector>) -> bool {
        assert_eq!(v.len(), self.dim, "eliminator dimension mismatch");
        let mut y = rhs.unwrap_or_else(|| BinaryVector::zeros(self.symbol_width));
        let mut word = 0;
        while let Some(p) = v.lowest_set_bit_from_word(word) {
            word = p / WORD_BITS;
            match self.pivot_row[p] {
                Some(r) => {
                    v.xor_words_from(&self.rows[r], word);
                    if self.symbol_width > 0 {
                        y.xor_words_from(&self.rhs[r], 0);
                    }
                }
                None => {
                    self.pivot_row[p] = Some(self.rows.len());
                    self.rows.push(v);
                    self.rhs.push(y);
                    return true;
                }
            }
        }
        false
    }

    /// Back-substitutes so every stored row is free of other rows' pivots.
    pub fn reduce(&mut self) {
        let mut targets = Vec::new();
        for p in (0..self.dim).rev() {
            let Some(r) = self.pivot_row[p] else { continue };
            targets.clear();
            targets.extend(self.rows[r].ones().skip(1).filter_map(|j| self.pivot_row[j]));
            if targets.is_empty() {
                continue;
            }
            let mut row = std::mem::replace(&mut self.rows[r], BinaryVector::zeros(0));
            let mut sym = std::mem::replace(&mut self.rhs[r], BinaryVector::zeros(0));
            for &t in &targets {
                row.xor_words_from(&self.rows[t], (p + 1) / WORD_BITS);
                if self.symbol_width > 0 {
                    sym.xor_words_from(&self.rhs[t], 0);
                }
            }
            self.rows[r] = row;
            self.rhs[r] = sym;
        }
    }

    /// Unknowns uniquely determined by the rows so far, with their values.
    ///
    /// Call after [`Eliminator::reduce`]; a coordinate is pinned exactly when the
    /// reduced system holds its unit vector.
    pub fn pinned(&self) -> impl Iterator<Item = (usize, &BinaryVector)> + '_ {
        self.pivot_row
            .iter()
            .enumerate()
            .filter_map(move |(p, r)| r.map(|r| (p, r)))
            .filter(move |&(_, r)| self.rows[r].count_ones() == 1)
            .map(move |(p, r)| (p, &self.rhs[r]))
    }

    /// Values of all unknowns when the system has full rank.
    pub fn solution(&mut self) -> Option<Vec<BinaryVector>> {
        if !self.is_full() {
            return None;
        }
        self.reduce();
        Some(
            self.pivot_row
                .iter()
                .map(|r| self.rhs[r.expect("full rank")].clone())
                .collect(),
        )
    }
}

/// Textbook row reduction on a dense boolean copy of the matrix.
///
/// Slow and deliberately unrelated to the packed kernel; used as a test oracle.
pub fn naive_rank(matrix: &BinaryMatrix) -> usize {
    let rows = matrix.rows();
    let cols = matrix.column_count();
    let mut a: Vec<Vec<bool>> = (0..rows)
        .map(|r| matrix.columns().iter().map(|c| c.get(r)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| a[r][col]) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in 0..rows {
            if r != rank && a[r][col] {
                for c in col..cols {
                    let bit = a[rank][c];
                    a[r][c] ^= bit;
                }
            }
        }
        rank += 1;
    }
    rank
}
