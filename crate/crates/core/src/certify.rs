//! Uniform binary morphisms, bounded checks that their images of
//! (5/4)+-free words avoid a pattern, and factor-complexity counting.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{find_occurrence, occurrence_ending_at, occurrence_ending_in, Occurrence, Pattern};
use crate::series::{certify_avoidable, certify_threeavoidable, first_violation, Attempt};
use crate::words::{FreeWords, Rational, Word};

/// Preimage exponent bound: preimages are (5/4)+-free.
pub const PREIMAGE_EXPONENT: Rational = Rational::FIVE_QUARTERS;
pub const DEFAULT_MAX_PREIMAGE_LEN: usize = 6;

/// A `q`-uniform morphism from `{0, .., k-1}` to binary words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub images: Vec<Word>,
    pub uniform_len: usize,
}

impl Morphism {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let q = images.first().map(Word::len).ok_or_else(|| Error::Morphism("no images".into()))?;
        if q == 0 {
            return Err(Error::Morphism("empty image".into()));
        }
        if let Some((d, w)) = images.iter().enumerate().find(|(_, w)| w.len() != q) {
            return Err(Error::Morphism(format!("image of {d} has length {} instead of {q}", w.len())));
        }
        if images.iter().any(|w| w.alphabet_size() != 2) {
            return Err(Error::Morphism("images must be binary".into()));
        }
        Ok(Morphism { images, uniform_len: q })
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    /// Parses lines `d -> bits`; `#` starts a comment. Letters must be
    /// `0..k-1`, each defined once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut images: Vec<Option<Word>> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: &str| Error::Morphism(format!("line {}: {why}: {raw:?}", n + 1));
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| bad("expected `d -> bits`"))?;
            let d: usize = lhs.trim().parse().map_err(|_| bad("bad letter"))?;
            let bits = rhs.trim();
            if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(bad("image must be a non-empty binary string"));
            }
            if d >= images.len() {
                images.resize(d + 1, None);
            }
            if images[d].is_some() {
                return Err(bad("letter defined twice"));
            }
            images[d] = Some(Word::parse(bits, 2)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(d, w)| w.ok_or_else(|| Error::Morphism(format!("no image for letter {d}"))))
            .collect::<Result<Vec<_>>>()?;
        Morphism::new(images)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        let mut out = Vec::with_capacity(w.len() * self.uniform_len);
        for &s in w.symbols() {
            let img = self
                .images
                .get(s as usize)
                .ok_or(Error::LetterOutOfRange { letter: s as u32, alphabet_size: self.images.len() as u32 })?;
            out.extend_from_slice(img.symbols());
        }
        Word::new(out, 2)
    }

    /// Every letter sent to `0^q`.
    pub fn constant(domain_size: usize, q: usize) -> Self {
        let zero = Word::new(vec![0; q], 2).unwrap();
        Morphism { images: vec![zero; domain_size], uniform_len: q }
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (d, img) in self.images.iter().enumerate() {
            writeln!(f, "{d} -> {img}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: usize,
    pub pattern: Pattern,
    pub morphism: Morphism,
    /// Avoidability exponent as printed alongside the morphism.
    pub ae: f64,
}

const CORPUS: [(&str, f64, &str); 10] = [
    ("ABACBDCD", 1.381966011, include_str!("../data/morphisms/01_ABACBDCD.txt")),
    ("ABACDBDC", 1.333333333, include_str!("../data/morphisms/02_ABACDBDC.txt")),
    ("ABACDCBD", 1.340090632, include_str!("../data/morphisms/03_ABACDCBD.txt")),
    ("ABCADBDC", 1.292893219, include_str!("../data/morphisms/04_ABCADBDC.txt")),
    ("ABCADCBD", 1.295597743, include_str!("../data/morphisms/05_ABCADCBD.txt")),
    ("ABCADCDB", 1.327621756, include_str!("../data/morphisms/06_ABCADCDB.txt")),
    ("ABCBDADC", 1.302775638, include_str!("../data/morphisms/07_ABCBDADC.txt")),
    ("ABACBDCEDE", 1.366025404, include_str!("../data/morphisms/08_ABACBDCEDE.txt")),
    ("ABACDBCEDE", 1.302775638, include_str!("../data/morphisms/09_ABACDBCEDE.txt")),
    ("ABACDBDECE", 1.320416579, include_str!("../data/morphisms/10_ABACDBDECE.txt")),
];

/// The ten sporadic doubled patterns with their morphisms, numbered from 1.
pub fn corpus() -> Vec<CorpusEntry> {
    CORPUS
        .iter()
        .enumerate()
        .map(|(i, &(pattern, ae, text))| CorpusEntry {
            id: i + 1,
            pattern: pattern.parse().expect("corpus pattern"),
            morphism: Morphism::parse(text).expect("corpus morphism"),
            ae,
        })
        .collect()
}

/// Looks an entry up by number (`1`..`10`) or by pattern.
pub fn corpus_entry(key: &str) -> Result<CorpusEntry> {
    let all = corpus();
    let found = match key.parse::<usize>() {
        Ok(id) => all.into_iter().find(|e| e.id == id),
        Err(_) => all.into_iter().find(|e| e.pattern.to_string() == key),
    };
    found.ok_or_else(|| Error::UnknownEntry(key.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum Outcome {
    /// No occurrence within the caps.
    Pass,
    Counterexample {
        preimage: Word,
        image: Word,
        occurrence: Occurrence,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pattern: Pattern,
    pub morphism_id: String,
    pub uniform_len: usize,
    pub max_preimage_len: usize,
    pub image_cap: usize,
    /// Preimages examined, in lexicographic order, up to and including a
    /// counterexample.
    pub preimages_checked: usize,
    pub outcome: Outcome,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} morphism={} q={} preimages<={} cap={} checked={}: ",
            self.pattern,
            self.morphism_id,
            self.uniform_len,
            self.max_preimage_len,
            self.image_cap,
            self.preimages_checked
        )?;
        match &self.outcome {
            Outcome::Pass => write!(f, "pass (no occurrence up to the caps)"),
            Outcome::Counterexample { preimage, occurrence, .. } => {
                write!(f, "counterexample preimage={preimage} {occurrence}")
            }
        }
    }
}

/// Checks `m(w)` for occurrences of `p` with `|h(p)| <= image_cap`, over
/// every (5/4)+-free `w` of length at most `max_preimage_len`.
///
/// Preimages are visited in lexicographic order, so every proper prefix of
/// a word precedes it; only occurrences ending in the image of the last
/// letter need to be searched. The reported counterexample is the first
/// one in that order, whatever the number of worker threads.
pub fn verify(
    p: &Pattern,
    morphism: &Morphism,
    morphism_id: &str,
    max_preimage_len: usize,
    image_cap: usize,
) -> Result<VerificationReport> {
    let preimages: Vec<Word> =
        FreeWords::new(morphism.domain_size() as u32, PREIMAGE_EXPONENT, max_preimage_len)?.collect();
    let q = morphism.uniform_len;
    let first_bad = preimages.par_iter().position_first(|w| {
        let image = morphism.apply(w).expect("preimage over the morphism domain");
        let text = image.symbols();
        occurrence_ending_in(p, text, text.len() - q + 1, text.len(), image_cap).is_some()
    });
    let (checked, outcome) = match first_bad {
        None => (preimages.len(), Outcome::Pass),
        Some(i) => {
            let preimage = preimages[i].clone();
            let image = morphism.apply(&preimage)?;
            let occurrence = find_occurrence(p, &image, Some(image_cap)).expect("occurrence found in last block");
            (i + 1, Outcome::Counterexample { preimage, image, occurrence })
        }
    };
    Ok(VerificationReport {
        pattern: p.clone(),
        morphism_id: morphism_id.to_string(),
        uniform_len: q,
        max_preimage_len,
        image_cap,
        preimages_checked: checked,
        outcome,
    })
}

pub fn verify_entry(entry: &CorpusEntry, max_preimage_len: usize, image_cap: usize) -> Result<VerificationReport> {
    verify(&entry.pattern, &entry.morphism, &entry.id.to_string(), max_preimage_len, image_cap)
}

/// `n_i` for `i = 0..=up_to`: words over `m` letters with no occurrence of
/// `p`. The prefix tree is explored depth first, one subtree per first
/// letter in parallel; after each letter only occurrences ending at it are
/// searched.
pub fn count_avoiding(p: &Pattern, m: u32, up_to: usize) -> Result<Vec<u64>> {
    if m == 0 || m > crate::words::MAX_ALPHABET {
        return Err(Error::BadAlphabet(m));
    }
    let mut counts = vec![0u64; up_to + 1];
    counts[0] = 1;
    if up_to == 0 {
        return Ok(counts);
    }
    let shards: Vec<Vec<u64>> = (0..m as u8)
        .into_par_iter()
        .map(|first| {
            let mut local = vec![0u64; up_to + 1];
            let mut buf = Vec::with_capacity(up_to);
            buf.push(first);
            extend_avoiding(p, m as u8, up_to, &mut buf, &mut local);
            local
        })
        .collect();
    for shard in shards {
        for (c, s) in counts.iter_mut().zip(shard) {
            *c += s;
        }
    }
    Ok(counts)
}

fn extend_avoiding(p: &Pattern, m: u8, up_to: usize, buf: &mut Vec<u8>, counts: &mut [u64]) {
    let n = buf.len();
    if occurrence_ending_at(p, buf, n, n).is_some() {
        return;
    }
    counts[n] += 1;
    if n == up_to {
        return;
    }
    for c in 0..m {
        buf.push(c);
        extend_avoiding(p, m, up_to, buf, counts);
        buf.pop();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub pattern: Pattern,
    pub m: u32,
    pub attempt: Attempt,
    pub counts: Vec<u64>,
    /// `x0^-i` for each length.
    pub bounds: Vec<f64>,
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Compares brute-force counts with the growth bound of the best
/// conclusive series strategy.
pub fn cross_check(p: &Pattern, m: u32, up_to: usize) -> Result<CrossCheck> {
    let report = if m == 3 { certify_threeavoidable(p)? } else { certify_avoidable(p, m)? };
    let attempt = report.best().cloned().ok_or(Error::NoRoot)?;
    let root = attempt.result.root.unwrap();
    let counts = count_avoiding(p, m, up_to)?;
    let bounds = (0..=up_to).map(|i| root.powi(-(i as i32))).collect();
    let violation = first_violation(root, &counts);
    Ok(CrossCheck {
        pattern: p.clone(),
        m,
        attempt,
        counts,
        bounds,
        holds: violation.is_none(),
        first_violation: violation,
    })
}
