use std::collections::HashMap;

use roxmltree::{Document, Node};

use super::{CorpusError, Utterance};
use crate::text::{collapse_whitespace, nfc_trim};

/// Names of the two tiers to extract. Matching prefers an exact `TIER_ID`
/// and falls back to a unique case-insensitive match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierNames {
    pub transcription: String,
    pub translation: String,
}

impl Default for TierNames {
    fn default() -> Self {
        Self {
            transcription: "transcription".into(),
            translation: "translation".into(),
        }
    }
}

enum Anchor<'a> {
    Slots(&'a str, &'a str),
    Ref(&'a str),
}

struct RawAnnotation<'a> {
    id: &'a str,
    anchor: Anchor<'a>,
    value: String,
}

fn annotations<'a>(tier: Node<'a, 'a>) -> Result<Vec<RawAnnotation<'a>>, CorpusError> {
    let mut out = Vec::new();
    for wrapper in tier.children().filter(|n| n.has_tag_name("ANNOTATION")) {
        for ann in wrapper.children().filter(Node::is_element) {
            let id = ann
                .attribute("ANNOTATION_ID")
                .ok_or_else(|| CorpusError::MalformedDocument("annotation without ANNOTATION_ID".into()))?;
            let anchor = match ann.tag_name().name() {
                "ALIGNABLE_ANNOTATION" => {
                    let r1 = ann.attribute("TIME_SLOT_REF1");
                    let r2 = ann.attribute("TIME_SLOT_REF2");
                    match (r1, r2) {
                        (Some(a), Some(b)) => Anchor::Slots(a, b),
                        _ => {
                            return Err(CorpusError::MalformedDocument(format!(
                                "alignable annotation {id} lacks time slot references"
                            )))
                        }
                    }
                }
                "REF_ANNOTATION" => Anchor::Ref(ann.attribute("ANNOTATION_REF").ok_or_else(|| {
                    CorpusError::MalformedDocument(format!("ref annotation {id} lacks ANNOTATION_REF"))
                })?),
                other => {
                    return Err(CorpusError::MalformedDocument(format!(
                        "unexpected element {other} in ANNOTATION"
                    )))
                }
            };
            let value = ann
                .children()
                .find(|n| n.has_tag_name("ANNOTATION_VALUE"))
                .and_then(|n| n.text())
                .unwrap_or("");
            out.push(RawAnnotation {
                id,
                anchor,
                value: collapse_whitespace(&nfc_trim(value)),
            });
        }
    }
    Ok(out)
}

fn find_tier<'a>(root: Node<'a, 'a>, name: &str) -> Result<Node<'a, 'a>, CorpusError> {
    let tiers: Vec<_> = root.children().filter(|n| n.has_tag_name("TIER")).collect();
    if let Some(t) = tiers.iter().find(|t| t.attribute("TIER_ID") == Some(name)) {
        return Ok(*t);
    }
    let folded: Vec<_> = tiers
        .iter()
        .filter(|t| {
            t.attribute("TIER_ID")
                .is_some_and(|id| id.to_lowercase() == name.to_lowercase())
        })
        .collect();
    match folded.as_slice() {
        [one] => Ok(**one),
        _ => Err(CorpusError::MissingTier(name.to_owned())),
    }
}

struct Timeline<'a> {
    slots: HashMap<&'a str, Option<u64>>,
    anchors: HashMap<&'a str, &'a Anchor<'a>>,
}

impl Timeline<'_> {
    fn slot(&self, annotation: &str, slot: &str) -> Result<u64, CorpusError> {
        match self.slots.get(slot) {
            Some(Some(ms)) => Ok(*ms),
            _ => Err(CorpusError::UnresolvedTimeSlot {
                annotation: annotation.to_owned(),
                slot: slot.to_owned(),
            }),
        }
    }

    /// Resolves an annotation's span, following REF_ANNOTATION chains up to
    /// their alignable parent.
    fn span(&self, id: &str) -> Result<(u64, u64), CorpusError> {
        let mut current = id;
        for _ in 0..64 {
            match self.anchors.get(current) {
                Some(Anchor::Slots(a, b)) => return Ok((self.slot(id, a)?, self.slot(id, b)?)),
                Some(Anchor::Ref(parent)) => current = parent,
                None => {
                    return Err(CorpusError::MalformedDocument(format!(
                        "annotation {id} references unknown annotation {current}"
                    )))
                }
            }
        }
        Err(CorpusError::MalformedDocument(format!(
            "reference cycle at annotation {id}"
        )))
    }
}

/// Extracts one [`Utterance`] per non-empty annotation on the transcription
/// tier, in time order. Translations are attached by `ANNOTATION_REF`, or
/// failing that by an annotation on the translation tier with exactly the
/// same span. All other tiers are ignored.
pub fn parse_eaf(document: &str, source_file: &str, tiers: &TierNames) -> Result<Vec<Utterance>, CorpusError> {
    let doc = Document::parse(document).map_err(|e| CorpusError::MalformedDocument(e.to_string()))?;
    let root = doc.root_element();
    if !root.has_tag_name("ANNOTATION_DOCUMENT") {
        return Err(CorpusError::MalformedDocument(format!(
            "root element is {}, expected ANNOTATION_DOCUMENT",
            root.tag_name().name()
        )));
    }
    let time_order = root
        .children()
        .find(|n| n.has_tag_name("TIME_ORDER"))
        .ok_or_else(|| CorpusError::MalformedDocument("missing TIME_ORDER".into()))?;

    let mut slots = HashMap::new();
    for slot in time_order.children().filter(|n| n.has_tag_name("TIME_SLOT")) {
        let id = slot
            .attribute("TIME_SLOT_ID")
            .ok_or_else(|| CorpusError::MalformedDocument("TIME_SLOT without TIME_SLOT_ID".into()))?;
        let value = match slot.attribute("TIME_VALUE") {
            Some(v) => Some(v.trim().parse::<u64>().map_err(|_| {
                CorpusError::MalformedDocument(format!("time slot {id} has non-integer TIME_VALUE {v:?}"))
            })?),
            None => None,
        };
        slots.insert(id, value);
    }

    let transcription_tier = find_tier(root, &tiers.transcription)?;
    let translation_tier = find_tier(root, &tiers.translation)?;

    // References may point into any tier, so index every annotation.
    let mut all = Vec::new();
    for tier in root.children().filter(|n| n.has_tag_name("TIER")) {
        all.push((tier, annotations(tier)?));
    }
    let mut timeline = Timeline {
        slots,
        anchors: HashMap::new(),
    };
    for (_, anns) in &all {
        for a in anns {
            timeline.anchors.insert(a.id, &a.anchor);
        }
    }

    let tier_anns = |t: Node| {
        all.iter()
            .find(|(n, _)| *n == t)
            .map(|(_, a)| a.as_slice())
            .unwrap_or_default()
    };

    let mut by_ref: HashMap<&str, &str> = HashMap::new();
    let mut by_span: HashMap<(u64, u64), &str> = HashMap::new();
    for a in tier_anns(translation_tier) {
        if a.value.is_empty() {
            continue;
        }
        match a.anchor {
            Anchor::Ref(parent) => {
                by_ref.entry(parent).or_insert(&a.value);
            }
            Anchor::Slots(..) => {
                by_span.entry(timeline.span(a.id)?).or_insert(&a.value);
            }
        }
    }

    let mut utterances = Vec::new();
    for (order, a) in tier_anns(transcription_tier).iter().enumerate() {
        let (start_ms, end_ms) = timeline.span(a.id)?;
        if a.value.is_empty() {
            continue;
        }
        if end_ms <= start_ms {
            log::warn!(
                "{source_file}: skipping annotation {} with empty span {start_ms}..{end_ms}",
                a.id
            );
            continue;
        }
        let translation = by_ref
            .get(a.id)
            .or_else(|| by_span.get(&(start_ms, end_ms)))
            .map(|s| (*s).to_owned());
        utterances.push((
            order,
            Utterance {
                id: format!("{source_file}:{}", a.id),
                source_file: source_file.to_owned(),
                start_ms,
                end_ms,
                transcription: a.value.clone(),
                translation,
            },
        ));
    }
    utterances.sort_by_key(|(order, u)| (u.start_ms, u.end_ms, *order));
    Ok(utterances.into_iter().map(|(_, u)| u).collect())
}
