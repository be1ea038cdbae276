//! Finite words over small alphabets, periods and exponents, and
//! depth-first generation of α+-free words.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ALPHABET: u32 = 26;

/// Renders letter `i` as `0`-`9` then `a`-`p`.
pub fn letter_char(letter: u8) -> char {
    if letter < 10 {
        (b'0' + letter) as char
    } else {
        (b'a' + letter - 10) as char
    }
}

fn char_letter(c: char) -> Option<u8> {
    match c {
        '0'..='9' => Some(c as u8 - b'0'),
        'a'..='p' => Some(c as u8 - b'a' + 10),
        _ => None,
    }
}

/// A finite word over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "WordRepr", into = "WordRepr")]
pub struct Word {
    symbols: Vec<u8>,
    alphabet_size: u32,
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    letters: String,
    alphabet_size: u32,
}

impl From<Word> for WordRepr {
    fn from(w: Word) -> Self {
        WordRepr { letters: w.to_string(), alphabet_size: w.alphabet_size }
    }
}

impl TryFrom<WordRepr> for Word {
    type Error = Error;
    fn try_from(r: WordRepr) -> Result<Self> {
        Word::parse(&r.letters, r.alphabet_size)
    }
}

impl Word {
    pub fn new(symbols: Vec<u8>, alphabet_size: u32) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
            return Err(Error::BadAlphabet(alphabet_size));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as u32 >= alphabet_size) {
            return Err(Error::LetterOutOfRange { letter: bad as u32, alphabet_size });
        }
        Ok(Word { symbols, alphabet_size })
    }

    pub fn empty(alphabet_size: u32) -> Result<Self> {
        Word::new(Vec::new(), alphabet_size)
    }

    /// Parses a digit string over an alphabet of the given size.
    pub fn parse(s: &str, alphabet_size: u32) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| char_letter(c).ok_or_else(|| Error::ParseWord(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols, alphabet_size)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn factor(&self, start: usize, len: usize) -> Word {
        Word { symbols: self.symbols[start..start + len].to_vec(), alphabet_size: self.alphabet_size }
    }

    pub fn reversed(&self) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        Word { symbols, alphabet_size: self.alphabet_size }
    }

    /// Number of distinct letters actually occurring.
    pub fn letter_count(&self) -> usize {
        letter_mask(&self.symbols).count_ones() as usize
    }
}

pub(crate) fn letter_mask(symbols: &[u8]) -> u32 {
    symbols.iter().fold(0u32, |m, &s| m | (1 << s))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{}", letter_char(s))?;
        }
        Ok(())
    }
}

/// Parses a digit string, taking the alphabet to be `{0, .., max letter}`.
impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| char_letter(c).ok_or_else(|| Error::ParseWord(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let size = symbols.iter().max().map_or(1, |&m| m as u32 + 1);
        Word::new(symbols, size)
    }
}

/// Non-negative rational in lowest terms, compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub const FIVE_QUARTERS: Rational = Rational { num: 5, den: 4 };

    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Rational { num: num / g, den: den / g }
    }

    pub fn integer(n: u64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `len / period > self`, without building the fraction.
    fn exceeded_by(&self, len: usize, period: usize) -> bool {
        (len as u128) * (self.den as u128) > (self.num as u128) * (period as u128)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        ((self.num as u128) * (other.den as u128)).cmp(&((other.num as u128) * (self.den as u128)))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadExponent(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: u64 = n.parse().map_err(|_| bad())?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

pub fn smallest_period(w: &Word) -> Result<usize> {
    let s = w.symbols();
    if s.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok((1..=s.len()).find(|&p| (p..s.len()).all(|i| s[i] == s[i - p])).unwrap())
}

pub fn exponent(w: &Word) -> Result<Rational> {
    let p = smallest_period(w)?;
    Ok(Rational::new(w.len() as u64, p as u64))
}

fn check_alpha(alpha: Rational) -> Result<()> {
    if alpha < Rational::integer(1) {
        return Err(Error::BadExponent(alpha.to_string()));
    }
    Ok(())
}

/// True when some suffix of `s` has exponent strictly above `alpha`.
///
/// For each candidate period `p` the longest suffix with that period is
/// measured; its exponent bounds every shorter suffix with period `p`.
pub(crate) fn suffix_exceeds(s: &[u8], alpha: Rational) -> bool {
    let n = s.len();
    for p in 1..n {
        // a suffix of period p has length at most n, so exponent <= n/p
        if !alpha.exceeded_by(n, p) {
            break;
        }
        let run = (p..n).rev().take_while(|&i| s[i] == s[i - p]).count();
        if alpha.exceeded_by(run + p, p) {
            return true;
        }
    }
    false
}

/// Whether no factor of `w` has exponent strictly greater than `alpha`.
pub fn is_alpha_plus_free(w: &Word, alpha: Rational) -> Result<bool> {
    check_alpha(alpha)?;
    let s = w.symbols();
    Ok((1..=s.len()).all(|end| !suffix_exceeds(&s[..end], alpha)))
}

/// Depth-first, lexicographic stream of the non-empty α+-free words over
/// `{0, .., k-1}` of length at most `max_len`.
#[derive(Debug, Clone)]
pub struct FreeWords {
    k: u8,
    alpha: Rational,
    max_len: usize,
    buf: Vec<u8>,
    floor: usize,
    started: bool,
    accepted: bool,
}

impl FreeWords {
    pub fn new(k: u32, alpha: Rational, max_len: usize) -> Result<Self> {
        Self::with_prefix(k, alpha, max_len, Vec::new())
    }

    /// Restricts the stream to the subtree below `prefix` (which is not
    /// itself emitted). The prefix must already be free.
    pub fn with_prefix(k: u32, alpha: Rational, max_len: usize, prefix: Vec<u8>) -> Result<Self> {
        check_alpha(alpha)?;
        if k == 0 || k > MAX_ALPHABET {
            return Err(Error::BadAlphabet(k));
        }
        Ok(FreeWords { k: k as u8, alpha, max_len, floor: prefix.len(), buf: prefix, started: false, accepted: true })
    }

    /// Advances to the next free node and returns its letters.
    fn advance(&mut self, floor: usize) -> Option<&[u8]> {
        loop {
            if !self.started {
                self.started = true;
                if self.buf.len() >= self.max_len {
                    return None;
                }
                self.buf.push(0);
            } else if self.accepted && self.buf.len() < self.max_len {
                self.buf.push(0);
            } else {
                loop {
                    if self.buf.len() <= floor {
                        return None;
                    }
                    let last = self.buf.last_mut().unwrap();
                    *last += 1;
                    if *last < self.k {
                        break;
                    }
                    self.buf.pop();
                }
            }
            self.accepted = !suffix_exceeds(&self.buf, self.alpha);
            if self.accepted {
                return Some(&self.buf);
            }
        }
    }
}

impl Iterator for FreeWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let k = self.k as u32;
        let floor = self.floor;
        self.advance(floor).map(|s| Word { symbols: s.to_vec(), alphabet_size: k })
    }
}

pub fn generate_free_words(k: u32, alpha: Rational, max_len: usize) -> Result<FreeWords> {
    FreeWords::new(k, alpha, max_len)
}

/// Number of α+-free words of each length `0..=max_len`.
pub fn count_free_words(k: u32, alpha: Rational, max_len: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; max_len + 1];
    counts[0] = 1;
    for w in generate_free_words(k, alpha, max_len)? {
        counts[w.len()] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    // Independent oracle: every factor, smallest period by direct definition.
    fn brute_free(s: &[u8], alpha: Rational) -> bool {
        for i in 0..s.len() {
            for j in i + 1..=s.len() {
                let f = &s[i..j];
                let p = (1..=f.len()).find(|&p| f.iter().zip(&f[p..]).all(|(a, b)| a == b)).unwrap();
                if Rational::new(f.len() as u64, p as u64) > alpha {
                    return false;
                }
            }
        }
        true
    }

    fn all_words(k: u8, n: usize) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..k).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn periods() {
        assert_eq!(smallest_period(&w("0101")).unwrap(), 2);
        assert_eq!(smallest_period(&w("011")).unwrap(), 3);
        assert_eq!(smallest_period(&w("01010")).unwrap(), 2);
        assert_eq!(smallest_period(&Word::empty(2).unwrap()), Err(Error::EmptyWord));
    }

    #[test]
    fn exponents() {
        assert_eq!(exponent(&w("0101")).unwrap(), r(2, 1));
        assert_eq!(exponent(&w("01010")).unwrap(), r(5, 2));
        assert_eq!(exponent(&w("01234")).unwrap(), r(1, 1));
        assert!(exponent(&Word::empty(3).unwrap()).is_err());
    }

    #[test]
    fn rational_exact_order() {
        assert_eq!(r(10, 8), r(5, 4));
        assert!(r(6, 5) < r(5, 4));
        assert!(r(7, 5) > r(5, 4));
        assert_eq!("5/4".parse::<Rational>().unwrap(), r(5, 4));
        assert_eq!("2".parse::<Rational>().unwrap(), r(2, 1));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn five_quarters_free() {
        assert!(is_alpha_plus_free(&w("012340"), r(5, 4)).unwrap());
        assert!(!is_alpha_plus_free(&w("0123401"), r(5, 4)).unwrap());
        assert!(!is_alpha_plus_free(&w("00"), r(5, 4)).unwrap());
        // exponent exactly alpha is allowed
        assert!(is_alpha_plus_free(&w("00"), r(2, 1)).unwrap());
        assert!(is_alpha_plus_free(&w("01234"), r(1, 2)).is_err());
    }

    #[test]
    fn generator_examples() {
        let words: Vec<_> = generate_free_words(5, r(5, 4), 2).unwrap().collect();
        assert_eq!(words.iter().filter(|w| w.len() == 1).count(), 5);
        assert_eq!(words.iter().filter(|w| w.len() == 2).count(), 20);
        let unary: Vec<String> = generate_free_words(1, r(2, 1), 2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(unary, ["0", "00"]);
        assert_eq!(count_free_words(5, r(5, 4), 2).unwrap(), [1, 5, 20]);
        assert_eq!(count_free_words(5, r(5, 4), 3).unwrap(), [1, 5, 20, 60]);
        assert_eq!(count_free_words(2, r(2, 1), 3).unwrap(), [1, 2, 4, 6]);
        assert_eq!(count_free_words(3, r(2, 1), 0).unwrap(), [1]);
    }

    #[test]
    fn generator_matches_filter_oracle() {
        for (k, alpha) in [(2u8, r(2, 1)), (3, r(2, 1)), (3, r(7, 4)), (4, r(7, 5)), (5, r(5, 4)), (2, r(5, 2))] {
            let n = 6;
            let generated: Vec<Vec<u8>> =
                generate_free_words(k as u32, alpha, n).unwrap().map(|w| w.symbols().to_vec()).collect();
            let mut expected = Vec::new();
            for len in 1..=n {
                expected.extend(all_words(k, len).into_iter().filter(|s| brute_free(s, alpha)));
            }
            expected.sort();
            // depth-first preorder is lexicographic order
            assert_eq!(generated, expected, "k={k} alpha={alpha}");
        }
    }

    #[test]
    fn prefix_subtree() {
        let full: Vec<Word> = generate_free_words(3, r(2, 1), 4).unwrap().collect();
        let sub: Vec<Word> = FreeWords::with_prefix(3, r(2, 1), 4, vec![1]).unwrap().collect();
        let expected: Vec<Word> = full.into_iter().filter(|w| w.len() > 1 && w.symbols()[0] == 1).collect();
        assert_eq!(sub, expected);
    }

    #[test]
    fn five_quarters_counts_grow() {
        let c = count_free_words(5, r(5, 4), 10).unwrap();
        for i in 1..c.len() - 1 {
            assert!(c[i + 1] > c[i], "{c:?}");
        }
    }

    proptest! {
        #[test]
        fn period_bounds(s in proptest::collection::vec(0u8..3, 1..20)) {
            let word = Word::new(s.clone(), 3).unwrap();
            let p = smallest_period(&word).unwrap();
            prop_assert!(p >= 1 && p <= s.len());
            let e = exponent(&word).unwrap();
            prop_assert!(e >= Rational::integer(1));
            prop_assert_eq!(e == Rational::integer(1), p == s.len());
        }

        #[test]
        fn freeness_is_factorial(s in proptest::collection::vec(0u8..3, 1..16), i in 0usize..16, j in 0usize..16) {
            let alpha = r(7, 4);
            let word = Word::new(s.clone(), 3).unwrap();
            let (i, j) = (i.min(s.len()), j.min(s.len()));
            let (i, j) = (i.min(j), i.max(j));
            if is_alpha_plus_free(&word, alpha).unwrap() {
                prop_assert!(is_alpha_plus_free(&word.factor(i, j - i), alpha).unwrap());
            }
            prop_assert_eq!(is_alpha_plus_free(&word, alpha).unwrap(), brute_free(&s, alpha));
        }

        #[test]
        fn word_json_roundtrip(s in proptest::collection::vec(0u8..16, 0..20)) {
            let word = Word::new(s, 16).unwrap();
            let json = serde_json::to_string(&word).unwrap();
            prop_assert_eq!(serde_json::from_str::<Word>(&json).unwrap(), word);
        }
    }
}
