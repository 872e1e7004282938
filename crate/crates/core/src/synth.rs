//! Seeded synthetic citation corpora for benchmarks and end-to-end tests.
//!
//! Two generators are provided. [`planted_cue_fixture`] builds a small
//! corpus where each class carries five exclusive cue words at an exact
//! 50:1 frequency skew against the other classes combined, so the top of
//! each class's term table is known in advance. [`citation_fixture`]
//! builds an arbitrarily large corpus from class-specific phrase templates
//! plus shared neutral filler; phrase planting rates are tiered so keyness
//! varies across retained collocates while each tier mixes one
//! affect-bearing phrase with two affect-neutral ones, keeping affect
//! uncorrelated with keyness by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::corpus::{CitationStatement, LabeledCorpus, Subcorpus};

/// Citation function classes used by the generated corpora.
pub const CLASSES: [&str; 3] = ["supporting", "disputing", "mentioning"];

/// A phrase planted into statements of one class: its in-sentence rendering
/// (function-word glue around exactly three content words), the three
/// content words that survive stopword removal, and its planting rate in
/// statements per thousand.
#[derive(Debug, Clone, Copy)]
pub struct PlantedPhrase {
    pub rendering: &'static str,
    pub content: [&'static str; 3],
    pub per_mille: u32,
}

const fn phrase(
    rendering: &'static str,
    content: [&'static str; 3],
    per_mille: u32,
) -> PlantedPhrase {
    PlantedPhrase {
        rendering,
        content,
        per_mille,
    }
}

/// Three planting tiers per class; each tier holds one phrase built around
/// a sentiment-bearing word (the same lexicon value band throughout the
/// class) and two phrases of words absent from the bundled lexicon.
pub const SUPPORTING_PHRASES: [PlantedPhrase; 9] = [
    phrase("were consistent with the previous studies", ["consistent", "previous", "studies"], 160),
    phrase("were similar to the results obtained", ["similar", "results", "obtained"], 160),
    phrase("matched the observations in this work", ["matched", "observations", "work"], 160),
    phrase("were more reliable than the baseline estimates", ["reliable", "baseline", "estimates"], 100),
    phrase("were repeated in the independent cohort", ["repeated", "independent", "cohort"], 100),
    phrase("followed the same temporal pattern", ["followed", "temporal", "pattern"], 100),
    phrase("were coherent with the mechanistic explanation", ["coherent", "mechanistic", "explanation"], 55),
    phrase("were echoed in the longitudinal series", ["echoed", "longitudinal", "series"], 55),
    phrase("were mirrored by the parallel experiments", ["mirrored", "parallel", "experiments"], 55),
];

pub const DISPUTING_PHRASES: [PlantedPhrase; 9] = [
    phrase("were inconsistent with the previous reports", ["inconsistent", "previous", "reports"], 160),
    phrase("were in contrast to the previous findings", ["contrast", "previous", "findings"], 160),
    phrase("differed from the trends reported there", ["differed", "trends", "reported"], 160),
    phrase("were unreliable under the calibration procedure", ["unreliable", "calibration", "procedure"], 100),
    phrase("were divergent from the numerical predictions", ["divergent", "numerical", "predictions"], 100),
    phrase("departed from the simulation outputs", ["departed", "simulation", "outputs"], 100),
    phrase("were questionable for the statistical assumptions", ["questionable", "statistical", "assumptions"], 55),
    phrase("deviated from the reference intervals", ["deviated", "reference", "intervals"], 55),
    phrase("varied from the predicted slopes", ["varied", "predicted", "slopes"], 55),
];

pub const MENTIONING_PHRASES: [PlantedPhrase; 9] = [
    phrase("were focused on the sampling protocol", ["focused", "sampling", "protocol"], 160),
    phrase("were performed as described previously", ["performed", "described", "previously"], 160),
    phrase("were widely used in the workflows", ["widely", "used", "workflows"], 160),
    phrase("were detailed in the supplementary materials", ["detailed", "supplementary", "materials"], 100),
    phrase("were reviewed in the annual survey", ["reviewed", "annual", "survey"], 100),
    phrase("were randomized during the enrollment phase", ["randomized", "enrollment", "phase"], 100),
    phrase("were comprehensive in the screening criteria", ["comprehensive", "screening", "criteria"], 55),
    phrase("were implemented with the software toolkit", ["implemented", "software", "toolkit"], 55),
    phrase("were developed for the imaging platform", ["developed", "imaging", "platform"], 55),
];

/// Planted phrases for one class, tiers ordered high to low rate.
pub fn class_phrases(label: &str) -> &'static [PlantedPhrase; 9] {
    match label {
        "supporting" => &SUPPORTING_PHRASES,
        "disputing" => &DISPUTING_PHRASES,
        "mentioning" => &MENTIONING_PHRASES,
        other => panic!("no phrase set for class {other:?}"),
    }
}

/// Adjective-like modifiers for filler slots; none carry lexicon affect.
pub const FILLER_MODIFIERS: [&str; 48] = [
    "serum", "plasma", "renal", "cortical", "thermal", "spectral", "kinetic",
    "spatial", "regional", "neural", "hepatic", "synaptic", "basal", "axial",
    "lateral", "ventral", "dorsal", "distal", "proximal", "luminal",
    "epithelial", "vascular", "microbial", "fungal", "viral", "genomic",
    "proteomic", "metabolic", "enzymatic", "cellular", "molecular",
    "structural", "acoustic", "optical", "magnetic", "seismic", "orbital",
    "glacial", "coastal", "fluvial", "sedimentary", "alpine", "arterial",
    "venous", "gastric", "dermal", "ocular", "skeletal",
];

/// Head nouns for filler slots; none carry lexicon affect.
pub const FILLER_NOUNS: [&str; 48] = [
    "profiles", "gradients", "spectra", "densities", "currents", "voltages",
    "isotopes", "titers", "biomarkers", "transcripts", "lysates", "aliquots",
    "fractions", "micrographs", "waveforms", "histograms", "contours",
    "lattices", "monolayers", "suspensions", "dilutions", "extracts",
    "residues", "pellets", "filtrates", "eluates", "membranes", "vesicles",
    "organoids", "biofilms", "colonies", "cultures", "specimens", "slides",
    "probes", "primers", "reagents", "buffers", "solvents", "catalysts",
    "polymers", "composites", "alloys", "ceramics", "coatings", "films",
    "fibers", "granules",
];

/// Verbs for filler-only statements; none carry lexicon affect.
pub const FILLER_VERBS: [&str; 20] = [
    "tabulated", "recorded", "collected", "assessed", "quantified",
    "monitored", "tracked", "profiled", "assayed", "computed", "digitized",
    "imaged", "sequenced", "incubated", "centrifuged", "filtered",
    "titrated", "diluted", "pipetted", "weighed",
];

fn pick<'a>(rng: &mut ChaCha12Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn class_rng(seed: u64, class_index: usize, stream: u64) -> ChaCha12Rng {
    // distinct deterministic stream per (class, purpose)
    let mix = seed
        .wrapping_add((class_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0x2545_F491_4F6C_DD1D));
    ChaCha12Rng::seed_from_u64(mix)
}

/// One statement whose only content words are rotating filler.
fn filler_statement(rng: &mut ChaCha12Rng) -> String {
    let m1 = pick(rng, &FILLER_MODIFIERS);
    let n1 = pick(rng, &FILLER_NOUNS);
    let verb = pick(rng, &FILLER_VERBS);
    let m2 = pick(rng, &FILLER_MODIFIERS);
    let n2 = pick(rng, &FILLER_NOUNS);
    let m3 = pick(rng, &FILLER_MODIFIERS);
    let n3 = pick(rng, &FILLER_NOUNS);
    let cite = rng.gen_range(1..100);
    format!("The {m1} {n1} in the {m2} {n2} were {verb} over the {m3} {n3} [{cite}].")
}

/// One statement carrying a planted phrase between rotating filler words.
fn planted_statement(rng: &mut ChaCha12Rng, phrase: &PlantedPhrase) -> String {
    let m1 = pick(rng, &FILLER_MODIFIERS);
    let n1 = pick(rng, &FILLER_NOUNS);
    let m2 = pick(rng, &FILLER_MODIFIERS);
    let n2 = pick(rng, &FILLER_NOUNS);
    let cite = rng.gen_range(1..100);
    format!(
        "The {m1} {n1} {rendering} in the {m2} {n2} [{cite}].",
        rendering = phrase.rendering
    )
}

/// Builds a three-class corpus of `per_class` statements per class from
/// tiered phrase templates plus shared neutral filler. Fully determined by
/// `per_class` and `seed`.
pub fn citation_fixture(per_class: usize, seed: u64) -> LabeledCorpus {
    let mut statements = Vec::with_capacity(per_class * CLASSES.len());
    for (class_index, label) in CLASSES.iter().enumerate() {
        let phrases = class_phrases(label);
        // exact per-phrase counts, placement shuffled across the class
        let mut schedule: Vec<Option<usize>> = Vec::with_capacity(per_class);
        for (p, ph) in phrases.iter().enumerate() {
            let count = per_class * ph.per_mille as usize / 1000;
            schedule.extend(std::iter::repeat(Some(p)).take(count));
        }
        assert!(
            schedule.len() <= per_class,
            "phrase rates exceed one per statement"
        );
        schedule.resize(per_class, None);
        let mut shuffle_rng = class_rng(seed, class_index, 1);
        for i in 0..schedule.len() {
            let j = i + shuffle_rng.gen_range(0..schedule.len() - i);
            schedule.swap(i, j);
        }

        let mut text_rng = class_rng(seed, class_index, 2);
        for (i, slot) in schedule.iter().enumerate() {
            let text = match slot {
                Some(p) => planted_statement(&mut text_rng, &phrases[*p]),
                None => filler_statement(&mut text_rng),
            };
            statements.push(
                CitationStatement::new(format!("{label}-{i:06}"), text, *label)
                    .expect("generated statement is non-empty"),
            );
        }
    }
    LabeledCorpus::new(statements).expect("generated corpus is well-formed")
}

/// Five class-exclusive cue words per class; every cue appears exactly 100
/// times in its own class and exactly once in each other class, a 50:1
/// skew against the other classes combined.
pub const PLANTED_CUES: [(&str, [&str; 5]); 3] = [
    ("supporting", ["confirmed", "consistent", "agrees", "supported", "demonstrating"]),
    ("disputing", ["contrast", "differ", "contradict", "failed", "inconsistent"]),
    ("mentioning", ["reviewed", "developed", "focused", "randomized", "implemented"]),
];

/// Occurrences of each cue word inside its own class's statements.
pub const CUE_OWN_COUNT: usize = 100;
/// Occurrences of each cue word inside each other class's statements.
pub const CUE_FOREIGN_COUNT: usize = 1;

const PLANTED_PER_CLASS: usize = 200;

/// Builds the 3 × 200 corpus with class-exclusive cue words at an exact
/// 50:1 skew. Fully determined by `seed`.
pub fn planted_cue_fixture(seed: u64) -> LabeledCorpus {
    let mut statements = Vec::with_capacity(PLANTED_PER_CLASS * CLASSES.len());
    for (class_index, &(label, cues)) in PLANTED_CUES.iter().enumerate() {
        // 5 cues x 100 occurrences = 500 slots over 200 statements: the
        // first 100 statements take three cue words, the rest take two
        let mut cue_slots: Vec<&str> = Vec::with_capacity(cues.len() * CUE_OWN_COUNT);
        for cue in cues {
            cue_slots.extend(std::iter::repeat(cue).take(CUE_OWN_COUNT));
        }
        let mut shuffle_rng = class_rng(seed, class_index, 3);
        for i in 0..cue_slots.len() {
            let j = i + shuffle_rng.gen_range(0..cue_slots.len() - i);
            cue_slots.swap(i, j);
        }

        // one cue word from every other class, each planted exactly once
        let foreign: Vec<&str> = PLANTED_CUES
            .iter()
            .filter(|(other, _)| *other != label)
            .flat_map(|(_, cues)| cues.iter().copied())
            .collect();

        let mut text_rng = class_rng(seed, class_index, 4);
        let mut next_slot = 0;
        for i in 0..PLANTED_PER_CLASS {
            let take = if i < 100 { 3 } else { 2 };
            let picked = &cue_slots[next_slot..next_slot + take];
            next_slot += take;
            let m1 = pick(&mut text_rng, &FILLER_MODIFIERS);
            let n1 = pick(&mut text_rng, &FILLER_NOUNS);
            let m2 = pick(&mut text_rng, &FILLER_MODIFIERS);
            let n2 = pick(&mut text_rng, &FILLER_NOUNS);
            let cite = text_rng.gen_range(1..100);
            let cue_run = picked.join(" and ");
            // statements 0..9 additionally carry one foreign cue word
            let tail = if i < foreign.len() {
                format!(" given the {} notes", foreign[i])
            } else {
                String::new()
            };
            let text = format!(
                "The {m1} {n1} {cue_run} the {m2} {n2}{tail} [{cite}]."
            );
            statements.push(
                CitationStatement::new(format!("{label}-{i:04}"), text, label)
                    .expect("generated statement is non-empty"),
            );
        }
        assert_eq!(next_slot, cue_slots.len());
    }
    LabeledCorpus::new(statements).expect("generated corpus is well-formed")
}

/// A single-label corpus of filler statements, for partition and merge
/// exercises where class structure is irrelevant.
pub fn synthetic_subcorpus(n: usize, seed: u64) -> Subcorpus {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let statements = (0..n)
        .map(|i| {
            CitationStatement::new(format!("synth-{i:06}"), filler_statement(&mut rng), "all")
                .expect("generated statement is non-empty")
        })
        .collect();
    Subcorpus::new("all", statements).expect("generated subcorpus is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::AffectLexicon;
    use crate::text::{normalized_tokens, remove_stopwords, tokenize, StopwordSet};

    fn all_phrases() -> Vec<&'static PlantedPhrase> {
        SUPPORTING_PHRASES
            .iter()
            .chain(DISPUTING_PHRASES.iter())
            .chain(MENTIONING_PHRASES.iter())
            .collect()
    }

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(citation_fixture(50, 7), citation_fixture(50, 7));
        assert_eq!(planted_cue_fixture(7), planted_cue_fixture(7));
        assert_ne!(citation_fixture(50, 7), citation_fixture(50, 8));
    }

    #[test]
    fn corpus_shapes() {
        let corpus = citation_fixture(40, 1);
        assert_eq!(corpus.len(), 120);
        let parts = corpus.partition();
        assert_eq!(parts.len(), 3);
        for class in CLASSES {
            assert_eq!(parts[class].len(), 40);
        }

        let planted = planted_cue_fixture(1);
        assert_eq!(planted.len(), 600);
        for part in planted.partition().values() {
            assert_eq!(part.len(), 200);
        }

        let sub = synthetic_subcorpus(500, 3);
        assert_eq!(sub.len(), 500);
        assert_eq!(sub.label(), "all");
    }

    #[test]
    fn statements_have_reasonable_length() {
        let corpus = citation_fixture(30, 2);
        for s in corpus.statements() {
            let n = tokenize(&s.text).len();
            assert!((10..=25).contains(&n), "statement had {n} tokens: {}", s.text);
        }
    }

    /// Each phrase rendering must reduce to exactly its three content words
    /// under the default stopword list; this pins the phrase/stopword
    /// contract the keyness fixtures rely on.
    #[test]
    fn phrase_renderings_reduce_to_their_content_words() {
        let stops = StopwordSet::default_english();
        for ph in all_phrases() {
            let seq = normalized_tokens("p", ph.rendering);
            let kept = remove_stopwords(&seq, &stops);
            assert_eq!(
                kept.tokens(),
                &ph.content,
                "rendering {:?} did not reduce to {:?}",
                ph.rendering,
                ph.content
            );
        }
    }

    /// Tier symmetry: within each class, every planting tier pairs one
    /// lexicon-scored word (one shared value per class) with two phrases
    /// whose words all miss the lexicon.
    #[test]
    fn tiers_mix_one_affect_phrase_with_two_neutral() {
        let lex = AffectLexicon::default_bundled().unwrap();
        for class in CLASSES {
            let phrases = class_phrases(class);
            let mut class_value = None;
            for tier in phrases.chunks(3) {
                let mut affect_words = Vec::new();
                for ph in tier {
                    for word in ph.content {
                        if let Some(value) = lex.entry(word) {
                            affect_words.push((word, value));
                        }
                    }
                }
                assert_eq!(
                    affect_words.len(),
                    1,
                    "{class} tier {:?} should hold exactly one lexicon word, found {affect_words:?}",
                    tier.iter().map(|p| p.content).collect::<Vec<_>>()
                );
                let value = affect_words[0].1;
                if let Some(prev) = class_value {
                    assert_eq!(value, prev, "{class} mixes lexicon value bands");
                }
                class_value = Some(value);
            }
        }
    }

    #[test]
    fn filler_pools_are_affect_free_and_stopword_free() {
        let lex = AffectLexicon::default_bundled().unwrap();
        let stops = StopwordSet::default_english();
        let pools = FILLER_MODIFIERS
            .iter()
            .chain(FILLER_NOUNS.iter())
            .chain(FILLER_VERBS.iter());
        for word in pools {
            assert!(lex.entry(word).is_none(), "filler {word:?} is in the lexicon");
            assert!(!stops.contains(word), "filler {word:?} is a stopword");
        }
    }

    #[test]
    fn filler_pools_do_not_overlap_planted_words() {
        let mut planted: Vec<&str> = all_phrases().iter().flat_map(|p| p.content).collect();
        for (_, cues) in PLANTED_CUES {
            planted.extend(cues);
        }
        for word in FILLER_MODIFIERS.iter().chain(FILLER_NOUNS.iter()).chain(FILLER_VERBS.iter()) {
            assert!(!planted.contains(word), "filler {word:?} collides with a planted word");
        }
    }

    #[test]
    fn cue_words_hit_exact_planting_counts() {
        let corpus = planted_cue_fixture(42);
        let parts = corpus.partition();
        for (own_label, cues) in PLANTED_CUES {
            for cue in cues {
                for (label, part) in &parts {
                    let count: usize = part
                        .statements()
                        .iter()
                        .map(|s| {
                            normalized_tokens(&s.id, &s.text)
                                .tokens()
                                .iter()
                                .filter(|t| *t == cue)
                                .count()
                        })
                        .sum();
                    let expected = if label == own_label {
                        CUE_OWN_COUNT
                    } else {
                        CUE_FOREIGN_COUNT
                    };
                    assert_eq!(
                        count, expected,
                        "cue {cue:?} counted {count} times in class {label}"
                    );
                }
            }
        }
    }

    #[test]
    fn cue_words_are_class_exclusive() {
        let mut seen = std::collections::BTreeSet::new();
        for (_, cues) in PLANTED_CUES {
            for cue in cues {
                assert!(seen.insert(cue), "cue {cue:?} appears in two classes");
            }
        }
    }
}
