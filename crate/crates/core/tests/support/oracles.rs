//! Brute-force reference implementations. Deliberately naive and written
//! without reference to the library's code paths.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Edit distance from the textbook full (n+1) x (m+1) recurrence table.
pub fn dp_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn oracle_cer(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let m = a.len().max(b.len());
    if m == 0 {
        0.0
    } else {
        dp_distance(&a, &b) as f64 / m as f64
    }
}

/// Minimal view of a dictionary entry for the matcher oracle.
#[derive(Debug, Clone)]
pub struct OracleEntry {
    pub id: String,
    pub forms: Vec<String>,
}

/// (entry id, matched form, cer, is_affix)
pub type OracleHit = (String, String, f64, bool);

/// Exhaustive scan: score every form of every entry, keep each entry's best
/// form, filter by `cer < tau`, sort by (cer, id), truncate to k, then append
/// positional affix hits (body of length >= 2, proper prefix/suffix) for
/// entries not already present, sorted by (cer, id).
pub fn brute_match_word(word: &str, entries: &[OracleEntry], k: usize, tau: f64) -> Vec<OracleHit> {
    let mut scored: Vec<OracleHit> = Vec::new();
    for e in entries {
        let mut best: Option<(String, f64)> = None;
        for f in &e.forms {
            let c = oracle_cer(word, f);
            match &best {
                Some((_, b)) if *b <= c => {}
                _ => best = Some((f.clone(), c)),
            }
        }
        let (f, c) = best.unwrap();
        if c < tau {
            scored.push((e.id.clone(), f, c, false));
        }
    }
    scored.sort_by(|x, y| x.2.partial_cmp(&y.2).unwrap().then(x.0.cmp(&y.0)));
    scored.truncate(k);

    let word_len = word.chars().count();
    let mut affix: Vec<OracleHit> = Vec::new();
    for e in entries {
        if scored.iter().any(|s| s.0 == e.id) {
            continue;
        }
        let head = &e.forms[0];
        let prefix = head.ends_with('-') && !head.starts_with('-');
        let suffix = head.starts_with('-') && !head.ends_with('-');
        if !prefix && !suffix {
            continue;
        }
        for f in &e.forms {
            let hit = if prefix && f.ends_with('-') && !f.starts_with('-') {
                let body = &f[..f.len() - 1];
                let n = body.chars().count();
                n >= 2 && n < word_len && word.starts_with(body)
            } else if suffix && f.starts_with('-') && !f.ends_with('-') {
                let body = &f[1..];
                let n = body.chars().count();
                n >= 2 && n < word_len && word.ends_with(body)
            } else {
                false
            };
            if hit {
                affix.push((e.id.clone(), f.clone(), oracle_cer(word, f), true));
                break;
            }
        }
    }
    affix.sort_by(|x, y| x.2.partial_cmp(&y.2).unwrap().then(x.0.cmp(&y.0)));
    scored.extend(affix);
    scored
}

/// |A xor B| on plain sets.
pub fn set_difference_size(a: &BTreeSet<String>, b: &BTreeSet<String>) -> usize {
    a.symmetric_difference(b).count()
}

/// Candidates sorted by (|target xor candidate|, code).
pub fn brute_rank(target: &BTreeSet<String>, candidates: &[(String, BTreeSet<String>)]) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = candidates
        .iter()
        .map(|(code, set)| (code.clone(), set_difference_size(target, set)))
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// (file, start, end) of one utterance.
pub type Span = (String, u64, u64);

/// Reference packing: per file in name order, utterances in (start, end)
/// order; a group closes as soon as adding the next utterance would stretch
/// first-start..max-end beyond `max`. Returns groups of input indices.
pub fn brute_pack(spans: &[Span], max: u64) -> Vec<Vec<usize>> {
    let mut files: Vec<&str> = spans.iter().map(|s| s.0.as_str()).collect();
    files.sort();
    files.dedup();
    let mut groups = Vec::new();
    for f in files {
        let mut idx: Vec<usize> = (0..spans.len()).filter(|&i| spans[i].0 == f).collect();
        idx.sort_by_key(|&i| (spans[i].1, spans[i].2, i));
        let mut cur: Vec<usize> = Vec::new();
        for i in idx {
            if let Some(&first) = cur.first() {
                let start = spans[first].1;
                let end = cur.iter().map(|&j| spans[j].2).max().unwrap().max(spans[i].2);
                if end - start <= max {
                    cur.push(i);
                    continue;
                }
                groups.push(std::mem::take(&mut cur));
            }
            cur.push(i);
        }
        if !cur.is_empty() {
            groups.push(cur);
        }
    }
    groups
}
