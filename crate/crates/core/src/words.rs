//! Alphabets and words: the vertices of the rooted tree X* and its truncations.
//!
//! A [`Word`] is packed into a single `u64`: the length sits in the top four
//! bits and the letters fill the low nibbles, first letter most significant.
//! The derived integer order is therefore length first, then lexicographic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported alphabet; letters must render as single digits.
pub const MAX_ALPHABET: usize = 10;
/// Longest word that fits in the packed representation.
pub const MAX_WORD_LEN: usize = 15;

const LEN_SHIFT: u32 = 60;
const CODE_MASK: u64 = (1 << LEN_SHIFT) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet size {0} unsupported (need 2 <= k <= {MAX_ALPHABET})")]
    BadAlphabet(usize),
    #[error("letter {letter} out of range for alphabet of size {k}")]
    LetterOutOfRange { letter: u8, k: usize },
    #[error("word longer than {MAX_WORD_LEN} letters")]
    TooLong,
    #[error("malformed word {0:?}")]
    Malformed(String),
}

/// The finite set X = {0, …, k−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    k: u8,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Self, WordError> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(WordError::BadAlphabet(k));
        }
        Ok(Alphabet { k: k as u8 })
    }

    pub fn size(self) -> usize {
        self.k as usize
    }

    pub fn letters(self) -> impl Iterator<Item = u8> + Clone {
        0..self.k
    }

    /// Number of words of length `n`.
    pub fn count(self, n: usize) -> usize {
        self.size().pow(n as u32)
    }

    /// All words of length `n` in lexicographic order.
    pub fn words(self, n: usize) -> Vec<Word> {
        enumerate_words(self, n)
    }

    /// Words of every length `0..=n`, shortest first.
    pub fn words_up_to(self, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|m| self.words(m)).collect()
    }

    pub fn check(self, w: Word) -> Result<Word, WordError> {
        for x in w.letters() {
            if x >= self.k {
                return Err(WordError::LetterOutOfRange { letter: x, k: self.size() });
            }
        }
        Ok(w)
    }

    pub fn parse_word(self, s: &str) -> Result<Word, WordError> {
        self.check(s.parse()?)
    }
}

/// All k^n words of length `n`, lexicographically ordered.
pub fn enumerate_words(alphabet: Alphabet, n: usize) -> Vec<Word> {
    assert!(n <= MAX_WORD_LEN, "word length {n} exceeds {MAX_WORD_LEN}");
    let k = alphabet.size();
    (0..alphabet.count(n)).map(|i| Word::from_index(k, n, i)).collect()
}

/// Splits `w` into its length-`m` prefix and the remaining suffix.
pub fn split_prefix(w: Word, m: usize) -> (Word, Word) {
    assert!(m <= w.len(), "split at {m} beyond word of length {}", w.len());
    (w.prefix(m), w.drop_prefix(m))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(u64);

impl Word {
    pub const EMPTY: Word = Word(0);

    fn pack(len: usize, code: u64) -> Word {
        debug_assert!(len <= MAX_WORD_LEN);
        Word(((len as u64) << LEN_SHIFT) | code)
    }

    pub fn from_letters(letters: &[u8]) -> Result<Word, WordError> {
        if letters.len() > MAX_WORD_LEN {
            return Err(WordError::TooLong);
        }
        let mut code = 0u64;
        for &x in letters {
            if x >= 16 {
                return Err(WordError::LetterOutOfRange { letter: x, k: MAX_ALPHABET });
            }
            code = (code << 4) | x as u64;
        }
        Ok(Word::pack(letters.len(), code))
    }

    pub fn letter_word(x: u8) -> Word {
        Word::pack(1, x as u64)
    }

    /// The `i`-th word of length `n` in lexicographic order over `k` letters.
    pub fn from_index(k: usize, n: usize, mut index: usize) -> Word {
        let mut code = 0u64;
        for pos in (0..n).rev() {
            code |= ((index % k) as u64) << (4 * (n - 1 - pos));
            index /= k;
        }
        Word::pack(n, code)
    }

    /// Position of this word among words of the same length over `k` letters.
    pub fn index(self, k: usize) -> usize {
        self.letters().fold(0, |acc, x| acc * k + x as usize)
    }

    pub fn len(self) -> usize {
        (self.0 >> LEN_SHIFT) as usize
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn code(self) -> u64 {
        self.0 & CODE_MASK
    }

    pub fn letter(self, i: usize) -> u8 {
        let n = self.len();
        assert!(i < n, "letter {i} of word of length {n}");
        ((self.code() >> (4 * (n - 1 - i))) & 0xF) as u8
    }

    pub fn first(self) -> Option<u8> {
        (!self.is_empty()).then(|| self.letter(0))
    }

    pub fn last(self) -> Option<u8> {
        (!self.is_empty()).then(|| (self.code() & 0xF) as u8)
    }

    pub fn letters(self) -> impl Iterator<Item = u8> + Clone {
        (0..self.len()).map(move |i| self.letter(i))
    }

    pub fn prefix(self, m: usize) -> Word {
        let n = self.len();
        assert!(m <= n);
        Word::pack(m, self.code() >> (4 * (n - m)))
    }

    /// The word with its first `m` letters removed.
    pub fn drop_prefix(self, m: usize) -> Word {
        let n = self.len();
        assert!(m <= n);
        let rest = n - m;
        let mask = if rest == 0 { 0 } else { (1u64 << (4 * rest)) - 1 };
        Word::pack(rest, self.code() & mask)
    }

    /// The word without its last letter.
    pub fn parent(self) -> Word {
        self.prefix(self.len() - 1)
    }

    pub fn push(self, x: u8) -> Word {
        let n = self.len();
        assert!(n < MAX_WORD_LEN, "word too long");
        Word::pack(n + 1, (self.code() << 4) | x as u64)
    }

    pub fn prepend(self, x: u8) -> Word {
        let n = self.len();
        assert!(n < MAX_WORD_LEN, "word too long");
        Word::pack(n + 1, ((x as u64) << (4 * n)) | self.code())
    }

    pub fn concat(self, other: Word) -> Word {
        let n = self.len() + other.len();
        assert!(n <= MAX_WORD_LEN, "word too long");
        Word::pack(n, (self.code() << (4 * other.len())) | other.code())
    }

    pub fn is_prefix_of(self, other: Word) -> bool {
        self.len() <= other.len() && other.prefix(self.len()) == self
    }

    /// First position `< m` where `self` and `other` differ, comparing the
    /// length-`m` prefixes of both.
    pub fn first_difference(self, other: Word, m: usize) -> Option<usize> {
        let diff = self.prefix(m).code() ^ other.prefix(m).code();
        if diff == 0 {
            return None;
        }
        let nibble = (63 - diff.leading_zeros()) as usize / 4;
        Some(m - 1 - nibble)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("e");
        }
        for x in self.letters() {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Word, WordError> {
        if s == "e" {
            return Ok(Word::EMPTY);
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(WordError::Malformed(s.to_string()));
        }
        let letters: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        Word::from_letters(&letters)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
