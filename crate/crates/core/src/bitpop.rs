//! Bit-string genotypes, populations and the pairwise Hamming diversity.
//!
//! Positions are numbered `0..n` left to right in the text form. Storage is
//! packed into `u64` words so distances reduce to popcounts.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Fixed-length binary genotype with a cached ones count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
    ones: usize,
}

impl BitString {
    pub fn all_zeros(len: usize) -> Self {
        BitString {
            words: vec![0; word_count(len)],
            len,
            ones: 0,
        }
    }

    pub fn all_ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(len)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitString {
            words,
            len,
            ones: len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitString::all_zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.words[i / WORD] |= 1 << (i % WORD);
            }
        }
        s.ones = bits.iter().filter(|&&b| b).count();
        s
    }

    /// Builds a string of length `len` whose zeros sit exactly at `zero_positions`.
    pub fn with_zeros_at(len: usize, zero_positions: &[usize]) -> Result<Self> {
        let mut s = BitString::all_ones(len);
        for &p in zero_positions {
            if p >= len {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    size: len,
                });
            }
            s.set(p, false);
        }
        Ok(s)
    }

    /// Parses the `{0,1}` text form, position 0 leftmost.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("unexpected character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(BitString::from_bits(&bits))
    }

    /// Wraps raw words; bits beyond `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(word_count(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        let ones = words.iter().map(|w| w.count_ones() as usize).sum();
        BitString { words, len, ones }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of one bits, `|x|_1`.
    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        if *w & bit == 0 {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
        *w ^= bit;
    }

    pub fn complement(&self) -> BitString {
        let words = self.words.iter().map(|w| !w).collect();
        BitString::from_words(words, self.len)
    }

    /// Positions holding a zero, ascending.
    pub fn zero_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| !self.get(i)).collect()
    }

    /// Positions holding a one, ascending.
    pub fn one_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Overwrites the contents with `other` without reallocating.
    pub fn copy_from(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        self.words.copy_from_slice(&other.words);
        self.ones = other.ones;
    }

    /// Mutable word access for bulk operators; callers must restore the
    /// cached count with [`BitString::recount`].
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub(crate) fn recount(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
        self.ones = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }

    /// Iterates positions where `self` and `other` differ (equal lengths assumed).
    pub fn diff_positions<'a>(&'a self, other: &'a BitString) -> impl Iterator<Item = usize> + 'a {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .flat_map(|(wi, (a, b))| SetBits(a ^ b).map(move |b| wi * WORD + b))
    }
}

struct SetBits(u64);

impl Iterator for SetBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        BitString::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Hamming distance `H(x, y)`.
pub fn hamming(x: &BitString, y: &BitString) -> Result<usize> {
    if x.len != y.len {
        return Err(Error::LengthMismatch {
            left: x.len,
            right: y.len,
        });
    }
    Ok(hamming_unchecked(x, y))
}

#[inline]
pub(crate) fn hamming_unchecked(x: &BitString, y: &BitString) -> usize {
    x.words
        .iter()
        .zip(&y.words)
        .map(|(a, b)| (a ^ b).count_ones() as usize)
        .sum()
}

/// Multiset of equal-length genotypes with per-position zero counts and the
/// cached diversity `S = sum_i 2 m_i (mu - m_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Population {
    members: Vec<BitString>,
    zero_counts: Vec<u32>,
    diversity: u64,
    len: usize,
}

impl Population {
    pub fn new(members: Vec<BitString>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::invalid("population must not be empty"))?;
        let len = first.len();
        if let Some(bad) = members.iter().find(|m| m.len() != len) {
            return Err(Error::LengthMismatch {
                left: len,
                right: bad.len(),
            });
        }
        if members.len() > u32::MAX as usize {
            return Err(Error::invalid("population too large"));
        }
        let mut zero_counts = vec![0u32; len];
        for m in &members {
            for (i, count) in zero_counts.iter_mut().enumerate() {
                if !m.get(i) {
                    *count += 1;
                }
            }
        }
        let mu = members.len() as u64;
        let diversity = zero_counts
            .iter()
            .map(|&c| 2 * c as u64 * (mu - c as u64))
            .sum();
        Ok(Population {
            members,
            zero_counts,
            diversity,
            len,
        })
    }

    /// Reads a fixture: one genotype per line, blank lines and `#` comments ignored.
    pub fn load_fixture(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Population::parse_fixture(&text).map_err(|(line, message)| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Parses fixture text; errors carry the 1-based line number.
    pub fn parse_fixture(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut members = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let member = BitString::parse(line).map_err(|e| (idx + 1, e))?;
            if let Some(first) = members.first() {
                let first: &BitString = first;
                if first.len() != member.len() {
                    return Err((
                        idx + 1,
                        format!("length {} differs from {}", member.len(), first.len()),
                    ));
                }
            }
            members.push(member);
        }
        Population::new(members).map_err(|e| (0, e.to_string()))
    }

    pub fn to_fixture_string(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    /// Population size `mu`.
    #[inline]
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Genotype length `n`.
    #[inline]
    pub fn genotype_len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    #[inline]
    pub fn member(&self, i: usize) -> &BitString {
        &self.members[i]
    }

    #[inline]
    pub fn zero_counts(&self) -> &[u32] {
        &self.zero_counts
    }

    /// Cached `S(P)`.
    #[inline]
    pub fn diversity(&self) -> u64 {
        self.diversity
    }

    /// `S_P(y)`: summed distance from `y` to every member, in O(n).
    pub fn diversity_contribution(&self, y: &BitString) -> Result<u64> {
        self.check_len(y)?;
        let mu = self.size() as u64;
        Ok(self
            .zero_counts
            .iter()
            .enumerate()
            .map(|(i, &m)| if y.get(i) { m as u64 } else { mu - m as u64 })
            .sum())
    }

    /// Diversity the population would have if `incoming` replaced the member
    /// at `victim`; the population is left untouched.
    pub fn diversity_after_replace(&self, victim: usize, incoming: &BitString) -> Result<u64> {
        self.check_index(victim)?;
        self.check_len(incoming)?;
        Ok(self.diversity_after_replace_unchecked(victim, incoming))
    }

    pub(crate) fn diversity_after_replace_unchecked(
        &self,
        victim: usize,
        incoming: &BitString,
    ) -> u64 {
        let mu = self.size() as i64;
        let old = &self.members[victim];
        let mut delta: i64 = 0;
        for i in old.diff_positions(incoming) {
            let m = self.zero_counts[i] as i64;
            // A zero arriving raises m_i by one, a zero leaving lowers it.
            delta += if incoming.get(i) {
                2 * (2 * m - mu - 1)
            } else {
                2 * (mu - 2 * m - 1)
            };
        }
        (self.diversity as i64 + delta) as u64
    }

    /// Swaps in `incoming` at `victim`, updating caches in O(n).
    pub fn replace(&mut self, victim: usize, incoming: BitString) -> Result<()> {
        self.check_index(victim)?;
        self.check_len(&incoming)?;
        self.replace_unchecked(victim, &incoming);
        Ok(())
    }

    pub(crate) fn replace_unchecked(&mut self, victim: usize, incoming: &BitString) {
        let mu = self.size() as i64;
        let mut diversity = self.diversity as i64;
        let old = &self.members[victim];
        for i in old.diff_positions(incoming) {
            let m = self.zero_counts[i] as i64;
            if incoming.get(i) {
                diversity += 2 * (2 * m - mu - 1);
                self.zero_counts[i] -= 1;
            } else {
                diversity += 2 * (mu - 2 * m - 1);
                self.zero_counts[i] += 1;
            }
        }
        self.diversity = diversity as u64;
        self.members[victim].copy_from(incoming);
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.size() {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.size(),
            });
        }
        Ok(())
    }

    fn check_len(&self, y: &BitString) -> Result<()> {
        if y.len() != self.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: y.len(),
            });
        }
        Ok(())
    }
}

/// Largest plateau diversity: `k*mu` zeros spread as evenly as possible over `n` positions.
pub fn max_plateau_diversity(n: usize, k: usize, mu: usize) -> Result<u64> {
    if k > n || mu == 0 {
        return Err(Error::invalid(format!(
            "need 0 <= k <= n and mu >= 1 (n={n}, k={k}, mu={mu})"
        )));
    }
    if n == 0 {
        return Ok(0);
    }
    let (n, mu) = (n as u64, mu as u64);
    let zeros = k as u64 * mu;
    let (base, extra) = (zeros / n, zeros % n);
    let spread = |m: u64| 2 * m * (mu - m);
    Ok(extra * spread(base + 1) + (n - extra) * spread(base))
}
