#[path = "support/oracles.rs"]
mod oracles;

use std::collections::BTreeSet;

use proptest::prelude::*;
use warden_core::phonology::{
    decode_binary, encode_binary, find_inventory, hamming, load_phoible, rank_proxies, MergePolicy, PhonologyError,
    SegmentUniverse,
};
use warden_core::PhonemeInventory;

const SAMPLE: &str = include_str!("fixtures/phoible_sample.csv");

#[test]
fn load_merges_by_code() {
    let union = load_phoible(SAMPLE, MergePolicy::UnionByCode).unwrap();
    let codes: Vec<&str> = union.iter().map(|i| i.language_code.as_str()).collect();
    assert_eq!(codes, vec!["eng", "sun", "wrr", "xxxx1234"]);
    let sun = find_inventory(&union, "sun").unwrap();
    assert_eq!(sun.segments.len(), 11);
    assert!(sun.segments.contains("ə"));

    let first = load_phoible(SAMPLE, MergePolicy::FirstInventory).unwrap();
    assert_eq!(find_inventory(&first, "Sundanese").unwrap().segments.len(), 10);
    assert!(find_inventory(&first, "wardaman").is_some());
}

#[test]
fn load_errors() {
    assert!(matches!(
        load_phoible("InventoryID,LanguageName\n1,x\n", MergePolicy::UnionByCode),
        Err(PhonologyError::MissingColumn(_))
    ));
    assert!(matches!(
        load_phoible("InventoryID,ISO6393,LanguageName,Phoneme\n", MergePolicy::UnionByCode),
        Err(PhonologyError::EmptyTable)
    ));
}

#[test]
fn rank_sample() {
    let inv = load_phoible(SAMPLE, MergePolicy::UnionByCode).unwrap();
    let ranking = rank_proxies("wrr", &["eng", "sun"], &inv).unwrap();
    // Universe: a b d e i m n u v ð ŋ ɡ ə ʒ.
    assert_eq!(ranking.universe_size, 14);
    let got: Vec<(&str, usize)> = ranking
        .entries
        .iter()
        .map(|e| (e.language_code.as_str(), e.distance))
        .collect();
    assert_eq!(got, vec![("sun", 2), ("eng", 9)]);
    assert!((ranking.entries[0].normalized - 2.0 / 14.0).abs() < 1e-12);
    assert_eq!(ranking.best().unwrap().language_name, "Sundanese");
    assert!(matches!(
        rank_proxies("zzz", &["eng"], &inv),
        Err(PhonologyError::UnknownLanguage(_))
    ));
}

fn arb_set() -> impl Strategy<Value = BTreeSet<String>> {
    prop::collection::btree_set((0u32..150).prop_map(|i| format!("p{i}")), 0..80)
}

fn inventory(code: String, segments: BTreeSet<String>) -> PhonemeInventory {
    PhonemeInventory {
        language_name: code.to_uppercase(),
        language_code: code,
        segments,
    }
}

proptest! {
    #[test]
    fn hamming_equals_symmetric_difference(a in arb_set(), b in arb_set()) {
        let ia = inventory("a".into(), a.clone());
        let ib = inventory("b".into(), b.clone());
        let u = SegmentUniverse::from_inventories([&ia, &ib]);
        let va = encode_binary(&ia, &u).unwrap();
        let vb = encode_binary(&ib, &u).unwrap();
        prop_assert_eq!(hamming(&va, &vb).unwrap(), oracles::set_difference_size(&a, &b));
        prop_assert_eq!(decode_binary(&va, &u), a);
    }

    #[test]
    fn ranking_equals_brute_force(target in arb_set(), cands in prop::collection::vec(arb_set(), 1..12)) {
        let mut inventories = vec![inventory("t".into(), target.clone())];
        let mut brute = Vec::new();
        for (i, s) in cands.iter().enumerate() {
            let code = format!("c{:02}", (i * 7) % 12);
            if inventories.iter().any(|x| x.language_code == code) {
                continue;
            }
            inventories.push(inventory(code.clone(), s.clone()));
            brute.push((code, s.clone()));
        }
        let codes: Vec<&str> = brute.iter().map(|(c, _)| c.as_str()).collect();
        let ranking = rank_proxies("t", &codes, &inventories).unwrap();
        let got: Vec<(String, usize)> = ranking.entries.iter().map(|e| (e.language_code.clone(), e.distance)).collect();
        prop_assert_eq!(got, oracles::brute_rank(&target, &brute));
    }
}
