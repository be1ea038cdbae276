use std::collections::HashSet;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use patavoid::certify::{corpus, Morphism};
use patavoid::words::{self, Rational, Word};

const DIGESTS: [(&str, &str); 10] = [
    ("01_ABACBDCD.txt", "356a3732f8a9902c7cdbf1f64c971fac702ba07dd811e180ddfcdc786e58b80f"),
    ("02_ABACDBDC.txt", "dc43e5466665ad0005e404ac40f94db443e218ce7d977c260501fb2be4f441ce"),
    ("03_ABACDCBD.txt", "fc10717d3b318b763f5c7bd556b8162a3045d0ebf13d206d4c9e4149135563a3"),
    ("04_ABCADBDC.txt", "afd92e5205de1ba19a8d11796c10a00b9e38b1366613582231374e49dc579719"),
    ("05_ABCADCBD.txt", "e234af1d7d9f28c6d5a490bb4a462ee8526cf649cad129245fe5ca32966e75cb"),
    ("06_ABCADCDB.txt", "08ef344fc861fc4ea4f766226502dbe1a16be265bbb0c25bf93a67635d26fee2"),
    ("07_ABCBDADC.txt", "1497085ae5a3f9e40bdb32ac177ef7c81bdec9b58dfeeb4a03c7980d7ac9b595"),
    ("08_ABACBDCEDE.txt", "20e6eb212309e427e175e10fea0f002abb6125211909bebcf5b560ca2813568f"),
    ("09_ABACDBCEDE.txt", "63bcd6fa27bd35d77eb6bff92ba6dcbd975dfc1da621bdbdbcb2a3b3205c0a4a"),
    ("10_ABACDBDECE.txt", "dcca5cd515a84ae1897a2289be22df371f1dcd9bcaa31f93eb8d2e0ac2363c69"),
];

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/morphisms"))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn files_match_pinned_digests() {
    for (name, digest) in DIGESTS {
        let bytes = fs::read(data_dir().join(name)).unwrap();
        assert_eq!(hex(&Sha256::digest(&bytes)), digest, "{name}");
    }
    assert_eq!(fs::read_dir(data_dir()).unwrap().count(), DIGESTS.len());
}

#[test]
fn embedded_corpus_matches_files() {
    let entries = corpus();
    for (e, (name, _)) in entries.iter().zip(DIGESTS) {
        assert!(name.contains(&e.pattern.to_string()), "{name} vs {}", e.pattern);
        let text = fs::read_to_string(data_dir().join(name)).unwrap();
        assert_eq!(Morphism::parse(&text).unwrap(), e.morphism);
        assert!(text.starts_with(&format!("# {}: {}-uniform", e.pattern, e.morphism.uniform_len)));
    }
}

#[test]
fn morphisms_are_well_formed() {
    let lengths: Vec<usize> = corpus().iter().map(|e| e.morphism.uniform_len).collect();
    assert_eq!(lengths, [17, 33, 28, 21, 22, 26, 33, 15, 18, 22]);
    for e in corpus() {
        let m = &e.morphism;
        assert_eq!(m.domain_size(), 5, "{}", e.pattern);
        let distinct: HashSet<&Word> = m.images.iter().collect();
        assert_eq!(distinct.len(), m.domain_size(), "{}: repeated image", e.pattern);
        for img in &m.images {
            assert_eq!(img.len(), m.uniform_len);
            assert!(img.symbols().iter().all(|&b| b < 2));
        }
    }
}

/// Images of long (5/4)+-free words: a cheap look beyond the default
/// preimage bound, checking only that the image is a binary word of the
/// expected length and has no long run.
#[test]
fn images_of_free_words_have_bounded_runs() {
    let preimages: Vec<Word> =
        words::generate_free_words(5, Rational::FIVE_QUARTERS, 8).unwrap().filter(|w| w.len() == 8).take(50).collect();
    assert_eq!(preimages.len(), 50);
    for e in corpus() {
        for w in &preimages {
            let image = e.morphism.apply(w).unwrap();
            assert_eq!(image.len(), 8 * e.morphism.uniform_len);
            let longest = image.symbols().chunk_by(|a, b| a == b).map(<[u8]>::len).max().unwrap();
            assert!(longest < e.morphism.uniform_len, "{}: run of {longest}", e.pattern);
        }
    }
}
