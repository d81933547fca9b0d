//! Words of the unital free semigroup on `n` generators and their graded indexing.

use std::fmt;

use crate::error::{Error, Result};

/// A word `g_{i_1} … g_{i_k}` over the alphabet `1..=n`; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    n: usize,
    letters: Vec<u32>,
}

impl Word {
    pub fn new(n: usize, letters: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("alphabet size must be at least 1"));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > n) {
            return Err(Error::arg(format!("letter {bad} outside 1..={n}")));
        }
        Ok(Word { n, letters })
    }

    /// The identity word `g_0`.
    pub fn identity(n: usize) -> Self {
        Word {
            n,
            letters: Vec::new(),
        }
    }

    pub fn letter(n: usize, i: u32) -> Result<Self> {
        Word::new(n, vec![i])
    }

    pub fn alphabet(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.same_alphabet(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word { n: self.n, letters })
    }

    pub fn reverse(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { n: self.n, letters }
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.n == other.n && other.letters.starts_with(&self.letters)
    }

    /// Prefix quotient `β\α`: the `γ` with `β = αγ`, or `None` when `α` is not a prefix of `β`.
    pub fn divide(beta: &Word, alpha: &Word) -> Result<Option<Word>> {
        beta.same_alphabet(alpha)?;
        if alpha.is_prefix_of(beta) {
            Ok(Some(Word {
                n: beta.n,
                letters: beta.letters[alpha.len()..].to_vec(),
            }))
        } else {
            Ok(None)
        }
    }

    fn same_alphabet(&self, other: &Word) -> Result<()> {
        if self.n != other.n {
            return Err(Error::arg(format!(
                "alphabet mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Parses `"e"`, digit strings (n ≤ 9) or dot-separated letters.
    pub fn parse(s: &str, n: usize) -> Result<Word> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::identity(n));
        }
        let letters: Vec<u32> = if s.contains('.') || n > 9 {
            s.split('.')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::arg(format!("bad word {s:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::arg(format!("bad word {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Word::new(n, letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let sep = if self.n <= 9 { "" } else { "." };
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// Number of words of length at most `m`.
pub fn count(n: usize, m: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::arg("alphabet size must be at least 1"));
    }
    let mut total: usize = 0;
    let mut layer: usize = 1;
    for k in 0..=m {
        if k > 0 {
            layer = layer
                .checked_mul(n)
                .ok_or_else(|| Error::arg("word count overflows"))?;
        }
        total = total
            .checked_add(layer)
            .ok_or_else(|| Error::arg("word count overflows"))?;
    }
    Ok(total)
}

/// All words of length ≤ m in graded-lexicographic order.
pub fn enumerate(n: usize, m: usize) -> Result<Vec<Word>> {
    let idx = GradedIndex::new(n, m)?;
    Ok((0..idx.len()).map(|i| idx.word(i)).collect())
}

/// Bijection between words of length ≤ m and `0..count(n, m)`.
///
/// Within a degree, words are ordered lexicographically with `1 < 2 < … < n`,
/// so the rank of a word is its letter sequence read in base `n` (digit `l − 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIndex {
    n: usize,
    m: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

impl GradedIndex {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let total = count(n, m)?;
        let mut offsets = Vec::with_capacity(m + 2);
        let mut powers = Vec::with_capacity(m + 1);
        let (mut off, mut p) = (0usize, 1usize);
        for k in 0..=m {
            if k > 0 {
                p *= n;
            }
            offsets.push(off);
            powers.push(p);
            off += p;
        }
        offsets.push(total);
        Ok(GradedIndex {
            n,
            m,
            offsets,
            powers,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.offsets[self.m + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of words of length ≤ k (k ≤ m).
    pub fn len_upto(&self, k: usize) -> usize {
        self.offsets[k + 1]
    }

    pub fn degree_start(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn power(&self, k: usize) -> usize {
        self.powers[k]
    }

    pub fn degree(&self, idx: usize) -> usize {
        match self.offsets.binary_search(&idx) {
            Ok(k) => k.min(self.m),
            Err(k) => k - 1,
        }
    }

    /// `(degree, rank within degree)`.
    pub fn split(&self, idx: usize) -> (usize, usize) {
        let k = self.degree(idx);
        (k, idx - self.offsets[k])
    }

    pub fn join(&self, degree: usize, rank: usize) -> usize {
        self.offsets[degree] + rank
    }

    pub fn index(&self, w: &Word) -> Result<usize> {
        if w.n != self.n {
            return Err(Error::arg("alphabet mismatch"));
        }
        if w.len() > self.m {
            return Err(Error::arg(format!("word {w} exceeds degree {}", self.m)));
        }
        Ok(self.index_of_letters(&w.letters))
    }

    pub fn index_of_letters(&self, letters: &[u32]) -> usize {
        let rank = letters
            .iter()
            .fold(0usize, |r, &l| r * self.n + (l as usize - 1));
        self.offsets[letters.len()] + rank
    }

    pub fn word(&self, idx: usize) -> Word {
        let (k, mut rank) = self.split(idx);
        let mut letters = vec![0u32; k];
        for pos in (0..k).rev() {
            letters[pos] = (rank % self.n) as u32 + 1;
            rank /= self.n;
        }
        Word { n: self.n, letters }
    }

    /// Index of `αβ` from the indices of `α` and `β`, or `None` past the top degree.
    pub fn concat(&self, a: usize, b: usize) -> Option<usize> {
        let (ka, ra) = self.split(a);
        let (kb, rb) = self.split(b);
        if ka + kb > self.m {
            return None;
        }
        Some(self.join(ka + kb, ra * self.powers[kb] + rb))
    }

    /// Index of the length-`j` prefix.
    pub fn prefix(&self, idx: usize, j: usize) -> usize {
        let (k, r) = self.split(idx);
        self.join(j, r / self.powers[k - j])
    }

    /// Index of the suffix that remains after removing the length-`j` prefix.
    pub fn suffix_after(&self, idx: usize, j: usize) -> usize {
        let (k, r) = self.split(idx);
        self.join(k - j, r % self.powers[k - j])
    }

    pub fn reverse(&self, idx: usize) -> usize {
        let (k, mut r) = self.split(idx);
        let mut out = 0usize;
        for _ in 0..k {
            out = out * self.n + r % self.n;
            r /= self.n;
        }
        self.join(k, out)
    }

    /// Index of `g_i α` (letter `i` in `1..=n`).
    pub fn prepend(&self, i: usize, idx: usize) -> Option<usize> {
        let (k, r) = self.split(idx);
        if k >= self.m {
            return None;
        }
        Some(self.join(k + 1, (i - 1) * self.powers[k] + r))
    }

    /// Index of `α g_i`.
    pub fn append(&self, idx: usize, i: usize) -> Option<usize> {
        let (k, r) = self.split(idx);
        if k >= self.m {
            return None;
        }
        Some(self.join(k + 1, r * self.n + (i - 1)))
    }

    /// Whether `p` is a prefix of `w`.
    pub fn is_prefix(&self, p: usize, w: usize) -> bool {
        let (kp, _) = self.split(p);
        let (kw, _) = self.split(w);
        kp <= kw && self.prefix(w, kp) == p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order_for_two_letters() {
        let ws: Vec<String> = enumerate(2, 2)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(ws, ["e", "1", "2", "11", "12", "21", "22"]);
    }

    #[test]
    fn index_arithmetic_matches_words() {
        let g = GradedIndex::new(3, 3).unwrap();
        for a in 0..g.len_upto(1) {
            for b in 0..g.len_upto(2) {
                let wa = g.word(a);
                let wb = g.word(b);
                let cat = wa.concat(&wb).unwrap();
                assert_eq!(g.concat(a, b), Some(g.index(&cat).unwrap()));
            }
        }
        for i in 0..g.len() {
            let w = g.word(i);
            assert_eq!(g.reverse(i), g.index(&w.reverse()).unwrap());
            for j in 0..=w.len() {
                let pre = Word::new(3, w.letters()[..j].to_vec()).unwrap();
                let suf = Word::new(3, w.letters()[j..].to_vec()).unwrap();
                assert_eq!(g.prefix(i, j), g.index(&pre).unwrap());
                assert_eq!(g.suffix_after(i, j), g.index(&suf).unwrap());
            }
        }
    }

    #[test]
    fn wide_alphabet_serializes_with_dots() {
        let w = Word::new(12, vec![1, 12, 3]).unwrap();
        assert_eq!(w.to_string(), "1.12.3");
        assert_eq!(Word::parse("1.12.3", 12).unwrap(), w);
    }
}
