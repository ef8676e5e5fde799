use scheme_forge::generators::{circulant_candidates, enumerate_circulant, EnumerateOptions};
use scheme_forge::scheme::verify_identities;

/// n = 2..=8 agree with an independent brute force over all set partitions
/// of {1..n-1}; larger n pin the multiplier-orbit search for stability.
const COUNTS: [(usize, usize); 19] = [
    (2, 1),
    (3, 2),
    (4, 3),
    (5, 3),
    (6, 7),
    (7, 4),
    (8, 10),
    (9, 7),
    (10, 10),
    (11, 4),
    (12, 27),
    (13, 5),
    (14, 10),
    (15, 18),
    (16, 25),
    (17, 4),
    (18, 37),
    (19, 5),
    (20, 28),
];

#[test]
fn circulant_counts_are_stable() {
    let opts = EnumerateOptions::default();
    for (n, want) in COUNTS {
        let got: Vec<_> = enumerate_circulant(n, &opts).unwrap().collect();
        assert_eq!(got.len(), want, "n = {n}");
        for (i, s) in got.iter().enumerate() {
            assert_eq!(s.name(), format!("circ-n{n}-{i}"));
            assert!(verify_identities(s).is_ok(), "{}", s.name());
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let opts = EnumerateOptions::default();
    for n in [8, 12, 15] {
        let a = circulant_candidates(n, &opts).unwrap();
        let b = circulant_candidates(n, &opts).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(a, sorted);
    }
}

#[test]
fn explicit_multiplier_group() {
    // squares mod 13 (order 6) have two orbits: residues and non-residues
    let opts = EnumerateOptions {
        multipliers: Some(vec![4]),
        max_orbits: 10,
    };
    let found: Vec<_> = enumerate_circulant(13, &opts).unwrap().collect();
    let ds: Vec<usize> = found.iter().map(|s| s.d()).collect();
    assert_eq!(ds, vec![1, 2]);
    let bad = EnumerateOptions {
        multipliers: Some(vec![2, 4]),
        max_orbits: 10,
    };
    assert!(enumerate_circulant(12, &bad).is_err());
}
