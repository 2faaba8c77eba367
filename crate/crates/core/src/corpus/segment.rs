use std::collections::BTreeMap;

use super::{Sample, Utterance};

/// Input-length ceiling of the ASR model, in milliseconds.
pub const DEFAULT_MAX_DURATION_MS: u64 = 30_000;

struct Open<'a> {
    members: Vec<&'a Utterance>,
    start: u64,
    end: u64,
}

impl Open<'_> {
    fn close(self, file: &str, index: usize, max_duration_ms: u64) -> Sample {
        let join = |f: &dyn Fn(&Utterance) -> Option<&str>| {
            self.members
                .iter()
                .filter_map(|u| f(u))
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        };
        Sample {
            id: format!("{file}#{index}"),
            source_file: file.to_owned(),
            utterance_ids: self.members.iter().map(|u| u.id.clone()).collect(),
            span_start_ms: self.start,
            span_end_ms: self.end,
            transcription: join(&|u| Some(u.transcription.as_str())),
            translation: join(&|u| u.translation.as_deref()),
            oversize_flag: self.end - self.start > max_duration_ms,
        }
    }
}

/// Greedy left-to-right packing of utterances into samples whose span
/// (first start to last end, gaps included) stays within `max_duration_ms`.
///
/// Files are processed in name order and utterances in time order within a
/// file; a sample never spans two files. An utterance longer than the budget
/// on its own becomes a singleton sample with `oversize_flag` set.
pub fn concatenate_segments(utterances: &[Utterance], max_duration_ms: u64) -> Vec<Sample> {
    let mut by_file: BTreeMap<&str, Vec<&Utterance>> = BTreeMap::new();
    for u in utterances {
        by_file.entry(u.source_file.as_str()).or_default().push(u);
    }

    let mut samples = Vec::new();
    for (file, mut list) in by_file {
        list.sort_by(|a, b| (a.start_ms, a.end_ms, &a.id).cmp(&(b.start_ms, b.end_ms, &b.id)));
        let mut index = 0;
        let mut open: Option<Open> = None;
        for u in list {
            if let Some(cur) = open.as_mut() {
                let end = cur.end.max(u.end_ms);
                if end - cur.start <= max_duration_ms {
                    cur.end = end;
                    cur.members.push(u);
                    continue;
                }
                let done = open.take().expect("open sample");
                samples.push(done.close(file, index, max_duration_ms));
                index += 1;
            }
            open = Some(Open {
                members: vec![u],
                start: u.start_ms,
                end: u.end_ms,
            });
        }
        if let Some(done) = open {
            samples.push(done.close(file, index, max_duration_ms));
        }
    }
    samples
}
