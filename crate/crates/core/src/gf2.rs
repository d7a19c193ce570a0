//! Binary linear codes over GF(2).
//!
//! Bit vectors are word-packed ([`Bits`]); all linear algebra reduces to XOR
//! and popcount on those words. Decoding is bounded-distance: a word within
//! `t = ⌊(d-1)/2⌋` flips of a codeword is corrected, anything else is reported
//! as [`DecodeStatus::Uncorrectable`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("generator rows are linearly dependent (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("row length {got} does not match code length {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("declared distance {declared} but minimum codeword weight is {actual}")]
    DistanceMismatch { declared: usize, actual: usize },
    #[error("more than one codeword agrees with the unerased positions")]
    AmbiguousErasure,
    #[error("no codeword agrees with the unerased positions")]
    InconsistentErasure,
    #[error("code file line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// Word-packed bit vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            b.set(i, true);
        }
        b
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut b = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                b.set(i, true);
            }
        }
        b
    }

    /// Builds from the low `len` bits of `value` (bit `i` of the vector is bit `i` of the integer).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= 64);
        let mut b = Self::zeros(len);
        if len > 0 {
            b.words[0] = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        }
        b
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Self::zeros(len);
        for i in idx {
            b.set(i, true);
        }
        b
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
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.ones_iter().collect()
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn restrict(&self, positions: &[usize]) -> Bits {
        Bits::from_fn(positions.len(), |k| self.get(positions[k]))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut b = Bits::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                _ => {
                    return Err(CodeError::Format { line: 0, msg: format!("bad bit character {c:?}") })
                }
            }
        }
        Ok(b)
    }
}

/// Row-reduces `rows` in place (reduced row echelon form). Returns the pivot columns,
/// one per surviving row; zero rows are dropped.
pub fn rref(rows: &mut Vec<Bits>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else { continue };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Bits], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : row · x = 0 for every row}`.
pub fn null_space(rows: &[Bits], ncols: usize) -> Vec<Bits> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = Bits::zeros(ncols);
            v.set(f, true);
            for (row, &p) in m.iter().zip(&pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// True if every row of `inner` lies in the row space of `outer`.
pub fn row_space_contains(outer: &[Bits], inner: &[Bits], ncols: usize) -> bool {
    let base = rank(outer, ncols);
    let mut all = outer.to_vec();
    all.extend_from_slice(inner);
    rank(&all, ncols) == base
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DecodeStatus {
    Corrected,
    Uncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub codeword: Bits,
    pub errors: BTreeSet<usize>,
    pub status: DecodeStatus,
}

impl DecodeResult {
    pub fn is_corrected(&self) -> bool {
        self.status == DecodeStatus::Corrected
    }
}

/// Syndrome table sizes up to this many parity bits are precomputed.
const TABLE_MAX_PARITY: usize = 15;

/// Binary linear `[n, k, d]` code with generator and parity-check matrices.
#[derive(Clone)]
pub struct BinaryCode {
    n: usize,
    generator: Vec<Bits>,
    parity: Vec<Bits>,
    dist: usize,
    table: Option<HashMap<u64, Bits>>,
}

impl fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryCode[{}, {}, {}]", self.n, self.k(), self.dist)
    }
}

impl BinaryCode {
    /// Builds a code from generator rows. The distance is computed exhaustively when
    /// `k ≤ 20`; otherwise `declared_dist` must be given.
    pub fn from_generator(n: usize, generator: Vec<Bits>) -> Result<Self, CodeError> {
        Self::build(n, generator, None)
    }

    pub fn with_declared_distance(
        n: usize,
        generator: Vec<Bits>,
        dist: usize,
    ) -> Result<Self, CodeError> {
        Self::build(n, generator, Some(dist))
    }

    fn build(n: usize, generator: Vec<Bits>, declared: Option<usize>) -> Result<Self, CodeError> {
        for g in &generator {
            if g.len() != n {
                return Err(CodeError::LengthMismatch { got: g.len(), expected: n });
            }
        }
        let r = rank(&generator, n);
        if r != generator.len() {
            return Err(CodeError::RankDeficient { rank: r, expected: generator.len() });
        }
        let parity = null_space(&generator, n);
        let k = generator.len();
        let dist = if k <= 20 {
            let actual = min_weight(&generator, n);
            if let Some(d) = declared {
                if n <= 16 && d != actual {
                    return Err(CodeError::DistanceMismatch { declared: d, actual });
                }
            }
            actual
        } else {
            declared.unwrap_or(1)
        };
        let mut code = Self { n, generator, parity, dist, table: None };
        if code.parity.len() <= TABLE_MAX_PARITY {
            code.table = Some(code.build_table());
        }
        Ok(code)
    }

    /// Parses the text format: a header line `n k d` followed by `k` generator rows of 0/1.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines
            .next()
            .ok_or(CodeError::Format { line: 1, msg: "missing header `n k d`".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| CodeError::Format { line: hl, msg: e.to_string() })?;
        let [n, k, d] = nums[..] else {
            return Err(CodeError::Format { line: hl, msg: "header must be `n k d`".into() });
        };
        let mut rows = Vec::with_capacity(k);
        for (ln, l) in lines {
            let row: Bits =
                l.parse().map_err(|_| CodeError::Format { line: ln, msg: "bad row".into() })?;
            if row.len() != n {
                return Err(CodeError::Format {
                    line: ln,
                    msg: format!("row has {} bits, expected {n}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(CodeError::Format {
                line: hl,
                msg: format!("expected {k} generator rows, found {}", rows.len()),
            });
        }
        Self::with_declared_distance(n, rows, d)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.n, self.k(), self.dist);
        for g in &self.generator {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Hamming `[7,4,3]`: parity-check column `j` (1-based) is `j` written in binary.
    pub fn hamming7() -> Self {
        let parity: Vec<Bits> = (0..3)
            .map(|bit| Bits::from_fn(7, |col| ((col + 1) >> (2 - bit)) & 1 == 1))
            .collect();
        let generator = null_space(&parity, 7);
        let code = Self::from_generator(7, generator).expect("hamming generator");
        debug_assert_eq!(code.dist, 3);
        code
    }

    pub fn repetition(n: usize) -> Self {
        Self::from_generator(n, vec![Bits::ones(n)]).expect("repetition")
    }

    pub fn full_space(n: usize) -> Self {
        let rows = (0..n).map(|i| Bits::from_indices(n, [i])).collect();
        Self::from_generator(n, rows).expect("full space")
    }

    pub fn even_weight(n: usize) -> Self {
        Self::repetition(n).dual()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generator.len()
    }

    pub fn dist(&self) -> usize {
        self.dist
    }

    /// Maximum number of correctable flips.
    pub fn t(&self) -> usize {
        self.dist.saturating_sub(1) / 2
    }

    pub fn generator(&self) -> &[Bits] {
        &self.generator
    }

    pub fn parity_check(&self) -> &[Bits] {
        &self.parity
    }

    pub fn dual(&self) -> BinaryCode {
        if self.parity.is_empty() {
            return Self {
                n: self.n,
                generator: Vec::new(),
                parity: self.generator.clone(),
                dist: 0,
                table: None,
            };
        }
        Self::from_generator(self.n, self.parity.clone()).expect("parity rows are independent")
    }

    /// Row-space containment `self ⊆ other`.
    pub fn is_subcode_of(&self, other: &BinaryCode) -> bool {
        self.n == other.n && row_space_contains(&other.generator, &self.generator, self.n)
    }

    pub fn same_code(&self, other: &BinaryCode) -> bool {
        self.is_subcode_of(other) && other.is_subcode_of(self)
    }

    pub fn contains(&self, word: &Bits) -> bool {
        self.syndrome(word) == 0
    }

    /// Syndrome packed as an integer (bit `i` = parity check `i`). Only valid for `n - k ≤ 64`.
    pub fn syndrome(&self, word: &Bits) -> u64 {
        self.parity
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, h)| acc | ((h.dot(word) as u64) << i))
    }

    pub fn codewords(&self) -> Vec<Bits> {
        span(&self.generator, self.n)
    }

    pub fn encode(&self, message: &Bits) -> Bits {
        let mut out = Bits::zeros(self.n);
        for (i, g) in self.generator.iter().enumerate() {
            if message.get(i) {
                out.xor_assign(g);
            }
        }
        out
    }

    fn build_table(&self) -> HashMap<u64, Bits> {
        let mut table = HashMap::new();
        table.insert(0, Bits::zeros(self.n));
        for w in 1..=self.t() {
            for_each_combination(self.n, w, |idx| {
                let e = Bits::from_indices(self.n, idx.iter().copied());
                table.entry(self.syndrome(&e)).or_insert(e);
            });
        }
        table
    }

    /// Minimum-weight error of weight at most `t` with the given syndrome.
    pub fn error_for_syndrome(&self, syndrome: u64) -> Option<Bits> {
        match &self.table {
            Some(t) => t.get(&syndrome).cloned(),
            None => self.search_error(syndrome),
        }
    }

    fn search_error(&self, syndrome: u64) -> Option<Bits> {
        if syndrome == 0 {
            return Some(Bits::zeros(self.n));
        }
        for w in 1..=self.t() {
            let mut found = None;
            for_each_combination(self.n, w, |idx| {
                if found.is_none() {
                    let e = Bits::from_indices(self.n, idx.iter().copied());
                    if self.syndrome(&e) == syndrome {
                        found = Some(e);
                    }
                }
            });
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Bounded-distance syndrome decoding.
    pub fn syndrome_decode(&self, word: &Bits) -> DecodeResult {
        assert_eq!(word.len(), self.n, "word length");
        let s = self.syndrome(word);
        let err = self.error_for_syndrome(s);
        match err {
            Some(e) => DecodeResult {
                codeword: word.xor(&e),
                errors: e.support(),
                status: DecodeStatus::Corrected,
            },
            None => DecodeResult {
                codeword: word.clone(),
                errors: BTreeSet::new(),
                status: DecodeStatus::Uncorrectable,
            },
        }
    }

    /// Recovers the unique codeword agreeing with `word` on every position not in `erased`.
    pub fn erasure_decode(&self, word: &Bits, erased: &BTreeSet<usize>) -> Result<DecodeResult, CodeError> {
        assert_eq!(word.len(), self.n, "word length");
        let unknown: Vec<usize> = erased.iter().copied().collect();
        // H·(known + Σ x_u e_u) = 0  ⇒  Σ x_u H_u = H·known
        let mut known = word.clone();
        for &u in &unknown {
            known.set(u, false);
        }
        let m = unknown.len();
        // augmented rows: one per parity check, columns = unknowns + rhs
        let mut rows: Vec<Bits> = self
            .parity
            .iter()
            .map(|h| {
                let mut r = Bits::zeros(m + 1);
                for (c, &u) in unknown.iter().enumerate() {
                    if h.get(u) {
                        r.set(c, true);
                    }
                }
                if h.dot(&known) {
                    r.set(m, true);
                }
                r
            })
            .collect();
        let pivots = rref(&mut rows, m + 1);
        if pivots.contains(&m) {
            return Err(CodeError::InconsistentErasure);
        }
        if pivots.len() < m {
            return Err(CodeError::AmbiguousErasure);
        }
        let mut codeword = known;
        for (row, &p) in rows.iter().zip(&pivots) {
            if row.get(m) {
                codeword.set(unknown[p], true);
            }
        }
        let errors = word.xor(&codeword).support();
        Ok(DecodeResult { codeword, errors, status: DecodeStatus::Corrected })
    }
}

impl BinaryCode {
    /// Solves `H·e = syndrome` for `e` supported on `support`. Returns one solution and a
    /// basis of the solutions of the homogeneous system (codewords supported on `support`).
    pub fn solve_on_support(&self, syndrome: u64, support: &[usize]) -> Result<(Bits, Vec<Bits>), CodeError> {
        let m = support.len();
        let mut rows: Vec<Bits> = self
            .parity
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let mut r = Bits::from_fn(m + 1, |c| c < m && h.get(support[c]));
                r.set(m, syndrome >> i & 1 == 1);
                r
            })
            .collect();
        let pivots = rref(&mut rows, m + 1);
        if pivots.contains(&m) {
            return Err(CodeError::InconsistentErasure);
        }
        let mut particular = Bits::zeros(self.n);
        for (row, &p) in rows.iter().zip(&pivots) {
            if row.get(m) {
                particular.set(support[p], true);
            }
        }
        let kernel = (0..m)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = Bits::zeros(self.n);
                v.set(support[f], true);
                for (row, &p) in rows.iter().zip(&pivots) {
                    if row.get(f) {
                        v.set(support[p], true);
                    }
                }
                v
            })
            .collect();
        Ok((particular, kernel))
    }
}

/// All `2^k` elements of the row space.
pub fn span(rows: &[Bits], n: usize) -> Vec<Bits> {
    let mut out = vec![Bits::zeros(n)];
    for r in rows {
        let extra: Vec<Bits> = out.iter().map(|c| c.xor(r)).collect();
        out.extend(extra);
    }
    out
}

fn min_weight(rows: &[Bits], n: usize) -> usize {
    span(rows, n).iter().map(Bits::weight).filter(|&w| w > 0).min().unwrap_or(0)
}

/// Calls `f` on every increasing `k`-subset of `0..n`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 && idx[0] == n - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A code `C` together with a subcode `S ⊆ C` of codimension one: the two cosets of
/// `S` in `C` carry the logical values 0 and 1.
#[derive(Debug, Clone)]
pub struct CosetCode {
    pub code: BinaryCode,
    pub sub: BinaryCode,
    coset_rep: Bits,
}

impl CosetCode {
    pub fn new(code: BinaryCode, sub: BinaryCode) -> Option<Self> {
        if !sub.is_subcode_of(&code) || code.k() != sub.k() + 1 {
            return None;
        }
        let coset_rep = code
            .generator()
            .iter()
            .find(|g| !sub.contains(g))
            .cloned()
            .expect("codimension one");
        Some(Self { code, sub, coset_rep })
    }

    /// Logical value of a codeword of `code`.
    pub fn value(&self, codeword: &Bits) -> u8 {
        u8::from(!self.sub.contains(codeword))
    }

    /// Representative codeword carrying value 1.
    pub fn one_rep(&self) -> &Bits {
        &self.coset_rep
    }

    /// Codewords of the coset carrying `value`.
    pub fn coset(&self, value: u8) -> Vec<Bits> {
        let mut words = self.sub.codewords();
        if value == 1 {
            for w in &mut words {
                w.xor_assign(&self.coset_rep);
            }
        }
        words
    }

    pub fn encode_single(&self, value: u8, sub_message: &Bits) -> Bits {
        let mut w = self.sub.encode(sub_message);
        if value == 1 {
            w.xor_assign(&self.coset_rep);
        }
        w
    }

    /// Decodes `n` blocks of `n` bits twice: each block to a bit, then the bit word to the
    /// final value.
    pub fn double_decode(&self, blocks: &[Bits]) -> DoubleDecode {
        let n = self.code.n();
        assert_eq!(blocks.len(), n, "need one block per position");
        let mut second_level = BTreeMap::new();
        let mut uncorrectable_blocks = BTreeSet::new();
        let mut word = Bits::zeros(n);
        for (j, block) in blocks.iter().enumerate() {
            let r = self.code.syndrome_decode(block);
            if !r.is_corrected() {
                uncorrectable_blocks.insert(j);
                continue;
            }
            if !r.errors.is_empty() {
                second_level.insert(j, r.errors.clone());
            }
            word.set(j, self.value(&r.codeword) == 1);
        }
        // Blocks that could not be decoded are treated as erasures at the first level.
        let first = if uncorrectable_blocks.is_empty() {
            self.code.syndrome_decode(&word)
        } else {
            match self.code.erasure_decode(&word, &uncorrectable_blocks) {
                Ok(r) => DecodeResult {
                    codeword: r.codeword,
                    errors: uncorrectable_blocks.iter().copied().collect(),
                    status: DecodeStatus::Corrected,
                },
                Err(_) => DecodeResult {
                    codeword: word.clone(),
                    errors: uncorrectable_blocks.clone(),
                    status: DecodeStatus::Uncorrectable,
                },
            }
        };
        // Undecodable blocks are reported even when erasure recovery still produced a value.
        let status = if !uncorrectable_blocks.is_empty() {
            DoubleStatus::UncorrectableLevel2(uncorrectable_blocks.clone())
        } else if first.is_corrected() {
            DoubleStatus::Ok
        } else {
            DoubleStatus::UncorrectableLevel1
        };
        DoubleDecode {
            value: self.value(&first.codeword),
            second_level,
            first_level: first.errors,
            status,
        }
    }

    /// Single-level variant: decode one word directly.
    pub fn single_decode(&self, word: &Bits) -> DoubleDecode {
        let r = self.code.syndrome_decode(word);
        let ok = r.is_corrected();
        DoubleDecode {
            value: self.value(&r.codeword),
            second_level: BTreeMap::new(),
            first_level: r.errors,
            status: if ok { DoubleStatus::Ok } else { DoubleStatus::UncorrectableLevel1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DoubleStatus {
    Ok,
    UncorrectableLevel1,
    /// Blocks whose second-level word was not decodable.
    UncorrectableLevel2(BTreeSet<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DoubleDecode {
    pub value: u8,
    /// Block index → flipped positions inside that block.
    pub second_level: BTreeMap<usize, BTreeSet<usize>>,
    /// Positions of blocks whose decoded bit was wrong.
    pub first_level: BTreeSet<usize>,
    pub status: DoubleStatus,
}

impl DoubleDecode {
    pub fn is_ok(&self) -> bool {
        self.status == DoubleStatus::Ok
    }
}

/// Two-level decode for a self-dual-containing code: logical cosets are those of `dual(code)`.
pub fn double_decode(code: &BinaryCode, blocks: &[Bits]) -> DoubleDecode {
    CosetCode::new(code.clone(), code.dual())
        .expect("code must contain its dual with codimension one")
        .double_decode(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn hamming_parameters() {
        let h = BinaryCode::hamming7();
        assert_eq!((h.n(), h.k(), h.dist(), h.t()), (7, 4, 3, 1));
        for g in h.generator() {
            for p in h.parity_check() {
                assert!(!g.dot(p));
            }
        }
        assert_eq!(rank(h.parity_check(), 7), 3);
    }

    #[test]
    fn hamming_dual_is_simplex_inside_hamming() {
        let h = BinaryCode::hamming7();
        let d = h.dual();
        assert_eq!((d.k(), d.dist()), (3, 4));
        assert!(d.is_subcode_of(&h));
        assert!(d.dual().same_code(&h));
    }

    #[test]
    fn repetition_dual_is_even_weight() {
        let d = BinaryCode::repetition(3).dual();
        assert_eq!((d.k(), d.dist()), (2, 2));
        assert!(d.codewords().iter().all(|c| c.weight() % 2 == 0));
    }

    #[test]
    fn full_space_dual_is_zero_code() {
        let d = BinaryCode::full_space(5).dual();
        assert_eq!(d.k(), 0);
        assert!(d.parity_check().len() == 5);
    }

    #[test]
    fn syndrome_decode_examples() {
        let h = BinaryCode::hamming7();
        let r = h.syndrome_decode(&b("0000000"));
        assert!(r.is_corrected() && r.errors.is_empty());
        let r = h.syndrome_decode(&b("0100000"));
        assert_eq!(r.codeword, b("0000000"));
        assert_eq!(r.errors, BTreeSet::from([1]));
        let r = h.syndrome_decode(&b("1100000"));
        assert!(h.contains(&r.codeword));
        assert_ne!(r.codeword, b("0000000"));
        assert_eq!(r.errors.len(), 1);
    }

    #[test]
    fn erasure_examples() {
        let h = BinaryCode::hamming7();
        let cw = b("1010101");
        assert!(h.contains(&cw));
        let r = h.erasure_decode(&cw, &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(r.codeword, cw);
        let r = h.erasure_decode(&cw, &BTreeSet::new()).unwrap();
        assert_eq!(r.codeword, cw);
        // positions {0,1,2}: 1110000 is a codeword, so two completions exist
        assert!(h.contains(&b("1110000")));
        assert_eq!(
            h.erasure_decode(&b("0000000"), &BTreeSet::from([0, 1, 2])),
            Err(CodeError::AmbiguousErasure)
        );
    }

    #[test]
    fn double_decode_examples() {
        let h = BinaryCode::hamming7();
        let zeros = vec![Bits::zeros(7); 7];
        let r = double_decode(&h, &zeros);
        assert_eq!(r.value, 0);
        assert!(r.second_level.is_empty() && r.first_level.is_empty());

        let mut ones = vec![Bits::ones(7); 7];
        ones[2].flip(4);
        let r = double_decode(&h, &ones);
        assert_eq!(r.value, 1);
        assert_eq!(r.second_level, BTreeMap::from([(2, BTreeSet::from([4]))]));
        assert!(r.first_level.is_empty());

        let mut blocks = vec![Bits::zeros(7); 7];
        blocks[4] = b("1110000"); // weight-3 word of logical value 1
        let r = double_decode(&h, &blocks);
        assert_eq!(r.value, 0);
        assert_eq!(r.first_level, BTreeSet::from([4]));
    }

    #[test]
    fn combinations_count() {
        let mut c = 0;
        for_each_combination(7, 3, |_| c += 1);
        assert_eq!(c, 35);
        let mut c = 0;
        for_each_combination(4, 0, |_| c += 1);
        assert_eq!(c, 1);
    }

    #[test]
    fn parse_round_trip() {
        let h = BinaryCode::hamming7();
        let back = BinaryCode::parse(&h.to_text()).unwrap();
        assert!(back.same_code(&h));
        assert!(matches!(BinaryCode::parse("7 1 3\n1111111\n"), Err(CodeError::DistanceMismatch { .. })));
        assert!(matches!(BinaryCode::parse("3 1 3\n11\n"), Err(CodeError::Format { line: 2, .. })));
    }
}
