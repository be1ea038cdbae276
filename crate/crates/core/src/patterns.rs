//! Patterns over variables `A`..`Z`, occurrence search, the doubled-pattern
//! enumeration pipeline and n-splitted factors.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{letter_mask, Word};

/// A pattern in canonical form: variables are numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Pattern {
    vars: Vec<u8>,
    var_count: usize,
}

impl Pattern {
    /// Renames the symbols of `raw` in order of first appearance.
    ///
    /// Returns `None` for an empty sequence.
    pub fn canonicalize<T: PartialEq>(raw: &[T]) -> Option<Pattern> {
        if raw.is_empty() {
            return None;
        }
        let mut seen: Vec<&T> = Vec::new();
        let vars = raw
            .iter()
            .map(|s| match seen.iter().position(|t| *t == s) {
                Some(i) => i as u8,
                None => {
                    seen.push(s);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Some(Pattern { vars, var_count: seen.len() })
    }

    pub fn vars(&self) -> &[u8] {
        &self.vars
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Occurrences of each variable.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.var_count];
        for &v in &self.vars {
            c[v as usize] += 1;
        }
        c
    }

    pub fn reverse(&self) -> Pattern {
        let mirrored: Vec<u8> = self.vars.iter().rev().copied().collect();
        Pattern::canonicalize(&mirrored).unwrap()
    }

    pub fn is_doubled(&self) -> bool {
        self.counts().iter().all(|&c| c >= 2)
    }

    /// Whether the first `k` symbols are `k` distinct variables.
    pub fn has_distinct_prefix(&self, k: usize) -> bool {
        // canonical form: distinct prefix means the prefix reads 0, 1, .., k-1
        k <= self.len() && self.vars[..k].iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    /// Length of the longest prefix made of distinct variables.
    pub fn distinct_prefix_len(&self) -> usize {
        self.vars.iter().enumerate().take_while(|&(i, &v)| v as usize == i).count()
    }

    /// The pattern read as a word over its own variables.
    pub fn as_word(&self) -> Word {
        Word::new(self.vars.clone(), self.var_count.max(1) as u32).unwrap()
    }
}

pub fn var_name(v: usize) -> char {
    (b'A' + v as u8) as char
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.vars {
            write!(f, "{}", var_name(v as usize))?;
        }
        Ok(())
    }
}

/// Parses an uppercase string and canonicalizes it.
impl FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_uppercase()) {
            return Err(Error::ParsePattern(s.to_string()));
        }
        Ok(Pattern::canonicalize(s.as_bytes()).unwrap())
    }
}

impl TryFrom<String> for Pattern {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        let p: Pattern = s.parse()?;
        if p.to_string() != s {
            return Err(Error::ParsePattern(s));
        }
        Ok(p)
    }
}

impl From<Pattern> for String {
    fn from(p: Pattern) -> String {
        p.to_string()
    }
}

/// A non-erasing morphism witnessing `h(p)` as a factor starting at `start`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub start: usize,
    /// Image of each variable, indexed by variable.
    pub images: Vec<Word>,
}

impl Occurrence {
    /// Total length of `h(p)`.
    pub fn image_len(&self, p: &Pattern) -> usize {
        p.vars().iter().map(|&v| self.images[v as usize].len()).sum()
    }

    /// Concatenates the images along `p`.
    pub fn apply(&self, p: &Pattern) -> Vec<u8> {
        p.vars().iter().flat_map(|&v| self.images[v as usize].symbols().iter().copied()).collect()
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "start={}", self.start)?;
        for (v, img) in self.images.iter().enumerate() {
            write!(f, " {}={}", var_name(v), img)?;
        }
        Ok(())
    }
}

struct Search<'a> {
    pattern: &'a [u8],
    counts: Vec<usize>,
    /// position at which the last variable first appears
    last_intro: usize,
    text: &'a [u8],
    cap: usize,
    /// occurrences must end inside `end_lo..=end_hi`
    end_lo: usize,
    end_hi: usize,
    start: usize,
    img_start: Vec<usize>,
    img_len: Vec<usize>,
    /// |h(p)| with every unbound variable counted as length 1
    total_min: usize,
}

impl<'a> Search<'a> {
    fn new(p: &'a Pattern, text: &'a [u8], cap: usize, end_lo: usize, end_hi: usize) -> Self {
        let last = (p.var_count - 1) as u8;
        Search {
            pattern: &p.vars,
            counts: p.counts(),
            last_intro: p.vars.iter().position(|&v| v == last).unwrap(),
            text,
            cap,
            end_lo,
            end_hi,
            start: 0,
            img_start: vec![0; p.var_count],
            img_len: vec![0; p.var_count],
            total_min: p.len(),
        }
    }

    fn at(&mut self, start: usize) -> bool {
        self.start = start;
        self.total_min = self.pattern.len();
        self.img_len.iter_mut().for_each(|l| *l = 0);
        self.extend(0, start)
    }

    fn extend(&mut self, i: usize, pos: usize) -> bool {
        if i == self.pattern.len() {
            return pos >= self.end_lo;
        }
        let v = self.pattern[i] as usize;
        let bound = self.img_len[v];
        if bound > 0 {
            let from = self.img_start[v];
            return pos + bound <= self.end_hi
                && self.text[pos..pos + bound] == self.text[from..from + bound]
                && self.extend(i + 1, pos + bound);
        }
        let base = self.total_min;
        let count = self.counts[v];
        // largest total the occurrence may reach
        let room = self.cap.min(self.end_hi - self.start);
        if base > room {
            return false;
        }
        let max_len = 1 + (room - base) / count;
        let min_len = if i == self.last_intro {
            // every length is now fixed: the end lands at start + total
            let need = self.end_lo.saturating_sub(self.start + base);
            1 + need.div_ceil(count)
        } else {
            1
        };
        for len in min_len..=max_len {
            self.img_start[v] = pos;
            self.img_len[v] = len;
            self.total_min = base + (len - 1) * count;
            if self.extend(i + 1, pos + len) {
                return true;
            }
        }
        self.img_len[v] = 0;
        self.total_min = base;
        false
    }

    fn occurrence(&self, alphabet_size: u32) -> Occurrence {
        let images = (0..self.img_len.len())
            .map(|v| {
                let s = self.img_start[v];
                Word::new(self.text[s..s + self.img_len[v]].to_vec(), alphabet_size).unwrap()
            })
            .collect();
        Occurrence { start: self.start, images }
    }
}

/// Least occurrence of `p` in `w` (by start, then by image lengths in
/// variable order) with `|h(p)| <= max_image_total` (default `|w|`).
pub fn find_occurrence(p: &Pattern, w: &Word, max_image_total: Option<usize>) -> Option<Occurrence> {
    let text = w.symbols();
    let cap = max_image_total.unwrap_or(text.len());
    let mut search = Search::new(p, text, cap, 0, text.len());
    search_starts(&mut search, 0, text.len(), p.len())?;
    let occ = search.occurrence(w.alphabet_size());
    debug_assert_eq!(occ.apply(p)[..], text[occ.start..occ.start + occ.image_len(p)]);
    Some(occ)
}

fn search_starts(search: &mut Search<'_>, first: usize, end_hi: usize, min_len: usize) -> Option<usize> {
    if min_len > end_hi || min_len > search.cap {
        return None;
    }
    (first..=end_hi - min_len).find(|&s| search.at(s))
}

/// Least occurrence of `p` in `text` whose image ends inside
/// `end_lo..=end_hi`, with `|h(p)| <= cap`. Returns the start and the image
/// length of each variable.
pub(crate) fn occurrence_ending_in(
    p: &Pattern,
    text: &[u8],
    end_lo: usize,
    end_hi: usize,
    cap: usize,
) -> Option<(usize, Vec<usize>)> {
    let mut search = Search::new(p, text, cap, end_lo, end_hi);
    let start = search_starts(&mut search, end_lo.saturating_sub(cap), end_hi, p.len())?;
    Some((start, search.img_len.clone()))
}

pub(crate) fn occurrence_ending_at(p: &Pattern, text: &[u8], end: usize, cap: usize) -> Option<(usize, Vec<usize>)> {
    occurrence_ending_in(p, text, end, end, cap)
}

/// A doubled pattern `sub` with an occurrence in a pattern read as a word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Containment {
    pub sub: Pattern,
    pub occurrence: Occurrence,
}

/// Searches `p`, read as a word over its variables, for an occurrence of a
/// doubled pattern with at most `max_vars` variables.
///
/// Any occurrence of a doubled `q` in which several variables share an image
/// yields an occurrence of the doubled pattern obtained by merging them, so
/// it is enough to cut factors of `p` into blocks and read off the pattern
/// of equal blocks. The least such pattern (by length, then lexicographic)
/// is returned with its least occurrence.
pub fn pattern_contains_doubled(p: &Pattern, max_vars: usize) -> Option<Containment> {
    let host = p.vars();
    let mut best: Option<Pattern> = None;
    let mut blocks: Vec<u8> = Vec::new();
    let mut ids: Vec<&[u8]> = Vec::new();
    for start in 0..host.len() {
        block_patterns(host, start, max_vars, &mut blocks, &mut ids, &mut best);
    }
    let sub = best?;
    let occurrence = find_occurrence(&sub, &p.as_word(), None).expect("block factorization is an occurrence");
    Some(Containment { sub, occurrence })
}

fn block_patterns<'h>(
    host: &'h [u8],
    pos: usize,
    max_vars: usize,
    blocks: &mut Vec<u8>,
    ids: &mut Vec<&'h [u8]>,
    best: &mut Option<Pattern>,
) {
    for end in pos + 1..=host.len() {
        let block = &host[pos..end];
        let known = ids.iter().position(|b| *b == block);
        let id = match known {
            Some(i) => i,
            None if ids.len() < max_vars => {
                ids.push(block);
                ids.len() - 1
            }
            None => continue,
        };
        blocks.push(id as u8);
        if best.as_ref().is_none_or(|b| blocks.len() <= b.len()) {
            let candidate = Pattern::canonicalize(blocks).unwrap();
            if candidate.is_doubled() && best.as_ref().is_none_or(|b| (b.len(), b) > (candidate.len(), &candidate)) {
                *best = Some(candidate);
            }
            block_patterns(host, end, max_vars, blocks, ids, best);
        }
        blocks.pop();
        if known.is_none() {
            ids.pop();
        }
    }
}

/// A contiguous factor of a pattern that is itself doubled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubledFactor {
    pub offset: usize,
    pub len: usize,
    /// canonical form of the factor
    pub pattern: Pattern,
}

/// Shortest (then leftmost) factor of `p` that is a doubled pattern.
pub fn find_doubled_factor(p: &Pattern) -> Option<DoubledFactor> {
    let vars = p.vars();
    (2..=vars.len()).find_map(|len| {
        (0..=vars.len() - len).find_map(|offset| {
            let pattern = Pattern::canonicalize(&vars[offset..offset + len]).unwrap();
            pattern.is_doubled().then_some(DoubledFactor { offset, len, pattern })
        })
    })
}

/// Canonical patterns on `v` variables in which every variable occurs twice.
pub fn twice_each_patterns(v: usize) -> Vec<Pattern> {
    fn rec(v: usize, buf: &mut Vec<u8>, counts: &mut Vec<u8>, out: &mut Vec<Pattern>) {
        if buf.len() == 2 * v {
            out.push(Pattern { vars: buf.clone(), var_count: v });
            return;
        }
        for x in 0..counts.len() {
            if counts[x] < 2 {
                counts[x] += 1;
                buf.push(x as u8);
                rec(v, buf, counts, out);
                buf.pop();
                counts[x] -= 1;
            }
        }
        if counts.len() < v {
            counts.push(1);
            buf.push((counts.len() - 1) as u8);
            rec(v, buf, counts, out);
            buf.pop();
            counts.pop();
        }
    }
    let mut out = Vec::new();
    rec(v, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Length of the distinct-variable prefix for which the series method
/// handles length-`2v` patterns on `v` variables.
pub fn series_prefix_len(v: usize) -> Result<usize> {
    match v {
        4 => Ok(4),
        5 => Ok(3),
        _ => Err(Error::UnsupportedVarCount(v)),
    }
}

/// Stage-by-stage counts of [`enumerate_remaining`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub candidates: usize,
    pub after_prefix: usize,
    pub after_containment: usize,
    pub remaining: usize,
}

/// Doubled patterns on `v` ∈ {4, 5} variables not settled by the series
/// method nor by containing a doubled pattern on fewer variables, one per
/// reversal class.
pub fn enumerate_remaining(v: usize) -> Result<Vec<Pattern>> {
    enumerate_remaining_with_stats(v).map(|(p, _)| p)
}

pub fn enumerate_remaining_with_stats(v: usize) -> Result<(Vec<Pattern>, EnumerationStats)> {
    let k = series_prefix_len(v)?;
    let candidates = twice_each_patterns(v);
    let n_candidates = candidates.len();
    // the reverse of a prefix-covered pattern has the same avoidability index
    let uncovered: Vec<Pattern> =
        candidates.into_iter().filter(|p| !p.has_distinct_prefix(k) && !p.reverse().has_distinct_prefix(k)).collect();
    let after_prefix = uncovered.len();
    let mut kept: Vec<Pattern> =
        uncovered.into_par_iter().filter(|p| pattern_contains_doubled(p, v - 1).is_none()).collect();
    let after_containment = kept.len();
    kept.retain(|p| *p <= p.reverse());
    kept.sort();
    let stats = EnumerationStats { candidates: n_candidates, after_prefix, after_containment, remaining: kept.len() };
    Ok((kept, stats))
}

/// Whether `|w|` is a multiple of `n` and each of the `n` equal blocks
/// contains every letter of `w`.
pub fn is_n_splitted(w: &Word, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroBlocks);
    }
    Ok(splitted(w.symbols(), n))
}

fn splitted(s: &[u8], n: usize) -> bool {
    if !s.len().is_multiple_of(n) {
        return false;
    }
    let all = letter_mask(s);
    let block = s.len() / n;
    block > 0 && s.chunks(block).all(|c| letter_mask(c) == all)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittedReport {
    pub factor: Word,
    pub offset: usize,
    pub n: usize,
    pub depth: usize,
}

/// Follows the inductive argument that a word of length `n^k` on `k`
/// letters has an n-splitted factor: either `w` is n-splitted, or some
/// block misses a letter and uses at most `k - 1` letters.
pub fn find_splitted_factor(w: &Word, n: usize) -> Result<SplittedReport> {
    if n == 0 {
        return Err(Error::ZeroBlocks);
    }
    let letters = w.letter_count();
    let expected = (n as u128).checked_pow(letters as u32);
    if letters == 0 || expected != Some(w.len() as u128) {
        return Err(Error::SplittedPrecondition { len: w.len(), letters, n });
    }
    let s = w.symbols();
    let (mut lo, mut len, mut depth) = (0, s.len(), 0);
    while !splitted(&s[lo..lo + len], n) {
        let all = letter_mask(&s[lo..lo + len]);
        len /= n;
        let i = (0..n).find(|&i| letter_mask(&s[lo + i * len..lo + (i + 1) * len]) != all).unwrap();
        lo += i * len;
        depth += 1;
    }
    Ok(SplittedReport { factor: w.factor(lo, len), offset: lo, n, depth })
}

/// Reads a 2-splitted word as a pattern whose occurrence maps each
/// variable to a single letter.
pub fn splitted_to_pattern(w: &Word) -> Result<(Pattern, Occurrence)> {
    if !splitted(w.symbols(), 2) {
        return Err(Error::NotSplitted(w.to_string()));
    }
    let p = Pattern::canonicalize(w.symbols()).unwrap();
    let mut images = vec![None; p.var_count()];
    for (&v, &letter) in p.vars().iter().zip(w.symbols()) {
        images[v as usize] = Some(Word::new(vec![letter], w.alphabet_size()).unwrap());
    }
    let images = images.into_iter().map(Option::unwrap).collect();
    Ok((p, Occurrence { start: 0, images }))
}
