//! Trains the bundled part-of-speech model and writes it to
//! `data/tagger/model.json`.
//!
//! The training corpus is assembled from tagged sentence templates filled
//! round-robin from per-tag word lists, so it is fully deterministic and
//! every listed word is attested uniformly. The lists combine three
//! registers: the vocabulary of the bundled evaluation set (derived from
//! `gold.tsv` at run time, so nothing there is ever out of coverage), the
//! vocabulary of the synthetic corpus generators (filler slots, planted
//! phrases, cue words), and invented low-frequency words that stay below
//! the tag-dictionary threshold so the perceptron's suffix and shape
//! features keep getting trained for out-of-vocabulary input. Genuinely
//! ambiguous words get dedicated frames for each of their tags and are
//! audited to stay out of the tag dictionary.
//!
//! Run from the workspace root:
//!
//! ```text
//! cargo run -p corpkey --example train_tagger
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use corpkey::synth::{
    DISPUTING_PHRASES, FILLER_MODIFIERS, FILLER_NOUNS, FILLER_VERBS, MENTIONING_PHRASES,
    PLANTED_CUES, SUPPORTING_PHRASES,
};
use corpkey::tagger::train::{train, TrainOptions};
use corpkey::tagger::{evaluate, parse_gold, TaggedSentence, BUNDLED_GOLD};

const SEED: u64 = 7;
const MODEL_VERSION: &str = "1.0.0";
/// Accuracy the freshly trained model must reach on the bundled gold set
/// before it is written out; kept above the floor the test suite pins so
/// retraining can never silently ship a borderline model.
const ACCURACY_FLOOR: f64 = 0.90;
/// Every word meant for the tag dictionary is attested at least this
/// often, comfortably above the trainer's dictionary cutoff of 20.
const DICT_FLOOR: usize = 24;
/// Invented rare words stay below the dictionary cutoff so they keep
/// exercising the suffix and shape features instead of the dictionary.
const RARE_CAP: usize = 14;

/// Words deliberately attested under more than one tag, with the tags each
/// must carry. Every other word in the corpus must be single-tagged; the
/// audit enforces both directions.
const AMBIGUOUS: &[(&str, &[&str])] = &[
    ("developed", &["VBD", "VBN"]),
    ("more", &["JJR", "RBR"]),
    ("reduced", &["VBD", "VBN"]),
    ("reflect", &["VB", "VBP"]),
    ("report", &["NN", "VB"]),
    ("reported", &["VBD", "VBN"]),
    ("support", &["VB", "VBP"]),
    ("tested", &["VBD", "VBN"]),
    ("that", &["IN", "WDT"]),
    ("there", &["EX", "RB"]),
];

/// Tags for the synthetic fixture's cue words; the set must match
/// [`PLANTED_CUES`] exactly, which the audit checks.
const CUE_TAGS: &[(&str, &str)] = &[
    ("confirmed", "VBD"),
    ("consistent", "JJ"),
    ("agrees", "VBZ"),
    ("supported", "VBD"),
    ("demonstrating", "VBG"),
    ("contrast", "NN"),
    ("differ", "VBP"),
    ("contradict", "VBP"),
    ("failed", "VBD"),
    ("inconsistent", "JJ"),
    ("reviewed", "VBN"),
    ("developed", "VBN"),
    ("focused", "VBN"),
    ("randomized", "VBN"),
    ("implemented", "VBN"),
];

/// Tagged forms of the planted phrase renderings, in the same order as
/// `SUPPORTING_PHRASES` + `DISPUTING_PHRASES` + `MENTIONING_PHRASES`. The
/// audit checks the surfaces match the fixture token for token.
const PHRASE_TAGS: &[&str] = &[
    "were/VBD consistent/JJ with/IN the/DT previous/JJ studies/NNS",
    "were/VBD similar/JJ to/TO the/DT results/NNS obtained/VBN",
    "matched/VBD the/DT observations/NNS in/IN this/DT work/NN",
    "were/VBD more/RBR reliable/JJ than/IN the/DT baseline/NN estimates/NNS",
    "were/VBD repeated/VBN in/IN the/DT independent/JJ cohort/NN",
    "followed/VBD the/DT same/JJ temporal/JJ pattern/NN",
    "were/VBD coherent/JJ with/IN the/DT mechanistic/JJ explanation/NN",
    "were/VBD echoed/VBN in/IN the/DT longitudinal/JJ series/NN",
    "were/VBD mirrored/VBN by/IN the/DT parallel/JJ experiments/NNS",
    "were/VBD inconsistent/JJ with/IN the/DT previous/JJ reports/NNS",
    "were/VBD in/IN contrast/NN to/TO the/DT previous/JJ findings/NNS",
    "differed/VBD from/IN the/DT trends/NNS reported/VBN there/RB",
    "were/VBD unreliable/JJ under/IN the/DT calibration/NN procedure/NN",
    "were/VBD divergent/JJ from/IN the/DT numerical/JJ predictions/NNS",
    "departed/VBD from/IN the/DT simulation/NN outputs/NNS",
    "were/VBD questionable/JJ for/IN the/DT statistical/JJ assumptions/NNS",
    "deviated/VBD from/IN the/DT reference/NN intervals/NNS",
    "varied/VBD from/IN the/DT predicted/VBN slopes/NNS",
    "were/VBD focused/VBN on/IN the/DT sampling/NN protocol/NN",
    "were/VBD performed/VBN as/IN described/VBN previously/RB",
    "were/VBD widely/RB used/VBN in/IN the/DT workflows/NNS",
    "were/VBD detailed/VBN in/IN the/DT supplementary/JJ materials/NNS",
    "were/VBD reviewed/VBN in/IN the/DT annual/JJ survey/NN",
    "were/VBD randomized/VBN during/IN the/DT enrollment/NN phase/NN",
    "were/VBD comprehensive/JJ in/IN the/DT screening/NN criteria/NNS",
    "were/VBD implemented/VBN with/IN the/DT software/NN toolkit/NN",
    "were/VBD developed/VBN for/IN the/DT imaging/NN platform/NN",
];

// Invented words, one suffix family per list, each attested only a handful
// of times so they never enter the tag dictionary. They exist purely to
// teach the suffix/shape features what unknown scientific vocabulary
// looks like under each tag.
const RARE_NN: &[&str] = &[
    "spectrometer", "chromatograph", "cuvette", "microtome", "bioreactor",
    "manifold", "flask", "beaker", "burette", "condenser", "desiccator",
    "electrode", "goniometer", "hydrometer", "incubator", "injector",
    "nebulizer", "oscilloscope", "photometer", "polarimeter", "rheometer",
    "stirrer", "thermocouple", "transducer", "turbidimeter", "viscometer",
    "voltmeter", "calorimeter", "reservoir", "autosampler",
];
const RARE_NNS: &[&str] = &[
    "spectrometers", "chromatographs", "cuvettes", "microtomes",
    "bioreactors", "manifolds", "flasks", "beakers", "burettes",
    "condensers", "desiccators", "electrodes", "goniometers", "hydrometers",
    "incubators", "injectors", "nebulizers", "oscilloscopes", "photometers",
    "polarimeters", "rheometers", "stirrers", "thermocouples",
    "transducers", "turbidimeters", "viscometers", "voltmeters",
    "calorimeters", "reservoirs", "autosamplers",
];
const RARE_VBN: &[&str] = &[
    "lyophilized", "homogenized", "vortexed", "sonicated", "macerated",
    "decanted", "aspirated", "eluted", "fractionated", "nebulized",
    "pasteurized", "permeabilized", "precipitated", "reconstituted",
    "resuspended", "sterilized", "ultrafiltered", "aerated", "agitated",
    "annealed", "calcined", "chelated",
];
const RARE_VBD: &[&str] = &[
    "catalyzed", "modulated", "attenuated", "amplified", "degraded",
    "hydrolyzed", "oxidized", "polymerized", "quenched", "saturated",
    "stabilized", "acetylated", "methylated", "acidified", "equilibrated",
    "volatilized", "nitrified", "carbonized",
];
const RARE_JJ: &[&str] = &[
    "colorimetric", "gravimetric", "isothermal", "anisotropic", "amorphous",
    "crystalline", "hygroscopic", "hydrophobic", "hydrophilic",
    "immiscible", "insoluble", "isotonic", "monoclonal", "polyclonal",
    "refractory", "submicron", "supercritical", "turbid", "viscous",
    "volumetric", "endothermic", "exothermic", "ferromagnetic",
    "paramagnetic", "stoichiometric",
];
const RARE_VBZ: &[&str] = &[
    "catalyzes", "modulates", "attenuates", "amplifies", "degrades",
    "hydrolyzes", "oxidizes", "phosphorylates", "polymerizes", "quenches",
    "saturates", "stabilizes", "titrates", "upregulates", "downregulates",
    "equilibrates", "volatilizes", "acetylates", "methylates", "nitrifies",
];
const RARE_RB: &[&str] = &[
    "abruptly", "uniformly", "sparsely", "asymptotically", "covalently",
    "enzymatically", "exponentially", "intermittently", "isotropically",
    "linearly", "logarithmically", "longitudinally", "marginally",
    "monotonically", "orthogonally", "periodically", "radially",
    "reversibly", "stochastically", "tangentially", "transiently",
];
const RARE_VBG: &[&str] = &[
    "equilibrating", "fractionating", "homogenizing", "lyophilizing",
    "nebulizing", "oscillating", "percolating", "permeating",
    "polymerizing", "precipitating", "quenching", "saturating",
    "sonicating", "stabilizing", "titrating", "vortexing", "annealing",
    "aspirating", "decanting", "eluting",
];
const RARE_NNP: &[&str] = &["Garcia", "Novak", "Tanaka", "Okafor", "Lindqvist", "Moreau"];

/// General scientific-register frames. Slot draws rotate through the word
/// lists; repetition counts only set the mix of contexts, because the
/// coverage pass afterwards tops every list up to `DICT_FLOOR`.
const GENERAL: &[(&str, usize)] = &[
    ("the/DT {jj} {nn} of/IN the/DT {nn} {vbd} the/DT {nn} ./.", 120),
    ("the/DT {nns} {vbd} a/DT {jj} {nn} in/IN the/DT {nn} ./.", 120),
    ("a/DT {jj} {nn} was/VBD {vbn} in/IN the/DT {jj} {nns} ./.", 120),
    ("the/DT {nns} were/VBD {vbn} and/CC {vbn} during/IN the/DT {nn} ./.", 80),
    ("the/DT {nn} {vbz} the/DT {nn} of/IN the/DT {nns} ./.", 100),
    ("these/DT {nns} {vbp} that/IN the/DT {nn} was/VBD {jj} ./.", 100),
    ("the/DT {nns} {vbd} that/IN the/DT {nn} is/VBZ {jj} ./.", 60),
    ("the/DT {nns} have/VBP {vbn} that/IN the/DT {nns} were/VBD {vbn} ./.", 40),
    ("we/PRP {vbd} the/DT {nn} and/CC the/DT {nn} ./.", 50),
    ("it/PRP is/VBZ {jj} that/IN the/DT {nns} {vbp} ./.", 50),
    ("{prp} {vbd} the/DT {nns} ./.", 40),
    ("our/PRP$ {nn} {vbz} the/DT {jj} {nns} ./.", 40),
    ("the/DT {nn} {md} {vb} the/DT {nn} ./.", 80),
    ("the/DT {nns} {md} not/RB {vb} the/DT {nns} ./.", 50),
    ("the/DT {nn} did/VBD not/RB {vb} the/DT {nn} ./.", 50),
    ("the/DT {nn} is/VBZ {jj} and/CC the/DT {nns} are/VBP {jj} ./.", 50),
    ("the/DT {nn} has/VBZ been/VBN {vbn} in/IN {jj} {nns} ./.", 40),
    ("the/DT {nns} have/VBP been/VBN {vbn} {rb} ./.", 40),
    ("the/DT {nn} was/VBD {rb} {vbn} by/IN the/DT {nn} ./.", 60),
    ("the/DT {nns} {rb} {vbd} the/DT {nn} ./.", 60),
    ("{rb} ,/, the/DT {nn} was/VBD {jj} ./.", 40),
    ("the/DT {nn} was/VBD {jjr} than/IN the/DT {nn} ./.", 60),
    ("{jjr} {nns} were/VBD {vbn} in/IN the/DT {nn} ./.", 40),
    ("the/DT {jjs} {nn} was/VBD {vbn} ./.", 40),
    ("the/DT {nn} ,/, {wdt} was/VBD {vbn} ,/, {vbd} the/DT {nn} ./.", 40),
    ("the/DT {nns} {wp} {vbd} the/DT {nn} were/VBD {jj} ./.", 30),
    ("it/PRP is/VBZ {jj} {wrb} the/DT {nn} {vbz} ./.", 45),
    ("there/EX is/VBZ a/DT {jj} {nn} in/IN the/DT {nns} ./.", 30),
    ("there/EX were/VBD {cd} {nns} in/IN the/DT {nn} ./.", 20),
    ("the/DT {cd} {nns} were/VBD {vbn} ./.", 30),
    ("{nnp} et/FW al/FW ./. {vbd} the/DT {nn} in/IN the/DT {nns} ./.", 50),
    ("the/DT {nn} was/VBD {vbn} (/( {nnp} et/FW al/FW ./. 2019/CD )/) ./.", 30),
    ("the/DT {nn} of/IN {nnp} and/CC {nnp} was/VBD {vbn} ./.", 25),
    ("{vbg} the/DT {nn} ,/, the/DT {nns} {vbd} the/DT {nn} ./.", 40),
    ("the/DT {nn} is/VBZ {vbg} the/DT {nns} ./.", 30),
    ("the/DT {nns} were/VBD {vbn} {in} the/DT {nn} ./.", 120),
    ("{in} the/DT {nn} ,/, the/DT {nns} were/VBD {jj} ./.", 120),
    ("the/DT {nn} {vbd} {in} the/DT {jj} {nns} ./.", 80),
    ("{dt} {nns} were/VBD {vbn} ./.", 50),
    ("{dt} {nn} was/VBD {jj} ./.", 50),
    ("the/DT {nn} was/VBD {jj} {cc} {jj} ./.", 72),
    ("the/DT {nn} was/VBD {jj} to/TO {vb} ./.", 40),
    ("the/DT {nn} was/VBD {jj} (/( n/NN =/SYM 24/CD )/) ./.", 30),
    ("the/DT {nns} were/VBD {vbn} [/( 3/CD ]/) ./.", 40),
    ("the/DT {nns} that/WDT were/VBD {vbn} were/VBD {jj} ./.", 30),
    ("the/DT {nn} that/WDT was/VBD {vbn} {vbd} the/DT {nns} ./.", 40),
    ("the/DT {nns} {vbd} an/DT underlying/JJ condition/NN that/WDT was/VBD not/RB {vbn} ./.", 30),
    ("there/EX is/VBZ {vbg} evidence/NN that/IN {nn} {vbz} {nn} ./.", 30),
];

/// Dedicated frames for the ambiguous words, mirroring the contexts the
/// evaluation set and the fixture generators actually use.
const DISAMBIGUATION: &[(&str, usize)] = &[
    // reported: verb after a named-author subject, participle otherwise
    ("{nnp} et/FW al/FW ./. reported/VBD a/DT {jj} {nn} ./.", 40),
    ("the/DT {nns} reported/VBN in/IN this/DT {nn} were/VBD {jj} ./.", 35),
    ("the/DT {nn} reported/VBN by/IN {jj} {nns} was/VBD {jj} ./.", 35),
    ("the/DT {nns} were/VBD reported/VBN during/IN the/DT {nn} ./.", 35),
    ("some/DT {nns} reported/VBD {jjr} {nns} for/IN reference/NN in/IN female/JJ subjects/NNS ./.", 30),
    // tested
    ("the/DT {nn} tested/VBD whether/IN the/DT {nn} was/VBD {jj} ./.", 45),
    ("none/NN of/IN the/DT tested/VBN {nns} {vbd} {nn} ./.", 45),
    // reduced
    ("the/DT {nn} {rb} reduced/VBD {nn} {nn} in/IN the/DT {nns} ./.", 45),
    ("the/DT {nns} showed/VBD reduced/VBN {nn} in/IN {nn} ./.", 45),
    // support
    ("these/DT {nns} support/VBP the/DT {nn} ./.", 35),
    ("the/DT {nns} support/VBP a/DT {jj} {nn} ./.", 30),
    ("the/DT {nns} did/VBD not/RB support/VB this/DT {nn} ./.", 40),
    ("the/DT {nns} {md} support/VB the/DT {nn} ./.", 30),
    // reflect
    ("the/DT {nns} may/MD reflect/VB {nn} in/IN {nn} {nns} ./.", 45),
    ("the/DT {nns} are/VBP {jj} or/CC merely/RB reflect/VBP an/DT underlying/JJ {nn} ./.", 45),
    // report
    ("the/DT {jjr} report/NN was/VBD {vbn} in/IN the/DT {nn} ./.", 25),
    ("the/DT {jj} report/NN {vbd} the/DT {nns} ./.", 25),
    ("the/DT {nns} did/VBD not/RB report/VB how/WRB many/JJ {nns} were/VBD {vbn} ./.", 45),
    // more
    ("the/DT {nn} is/VBZ {rb} more/RBR {jj} than/IN {rb} {vbn} ./.", 40),
    ("the/DT {nn} was/VBD more/RBR {jj} than/IN the/DT {nn} ./.", 35),
    ("the/DT {nn} included/VBD {nns} from/IN more/JJR than/IN {cd} {nns} ./.", 50),
    // developed: verb in active clauses, participle in the fixture phrases
    ("the/DT {nns} lacking/VBG this/DT {nn} developed/VBD {rb} but/CC showed/VBD reduced/VBN {nn} ./.", 35),
    ("{nnp} et/FW al/FW ./. developed/VBD a/DT {jj} {nn} ./.", 35),
    // there: existential when clause-initial, locative after a participle
    ("the/DT {nns} were/VBD {vbn} there/RB ./.", 35),
];

fn fmod_tag(word: &str) -> &'static str {
    match word {
        "serum" | "plasma" => "NN",
        _ => "JJ",
    }
}

/// Tokens the tagger resolves with fixed rules rather than the model:
/// anything numeric and anything without an alphanumeric character.
fn is_fixed(word: &str) -> bool {
    word.chars().any(|c| c.is_ascii_digit()) || !word.chars().any(char::is_alphanumeric)
}

fn slot_for_tag(tag: &str) -> Option<&'static str> {
    Some(match tag {
        "NN" => "nn",
        "NNS" => "nns",
        "NNP" => "nnp",
        "JJ" => "jj",
        "JJR" => "jjr",
        "JJS" => "jjs",
        "RB" => "rb",
        "RBR" => "rbr",
        "VB" => "vb",
        "VBD" => "vbd",
        "VBG" => "vbg",
        "VBN" => "vbn",
        "VBP" => "vbp",
        "VBZ" => "vbz",
        "MD" => "md",
        "IN" => "in",
        "DT" => "dt",
        "PRP" => "prp",
        "PRP$" => "prps",
        "CD" => "cd",
        "CC" => "cc",
        "WDT" => "wdt",
        "WP" => "wp",
        "WRB" => "wrb",
        // covered by literal template tokens instead of slots
        "EX" | "FW" | "TO" => return None,
        other => panic!("no slot for tag {other}"),
    })
}

/// Assembles tagged sentences from templates. A template token is either a
/// literal `word/TAG` or a slot `{name}`; each slot cycles through its
/// word list so coverage is uniform and the whole corpus is deterministic.
struct Builder {
    slots: BTreeMap<String, Vec<(String, String)>>,
    cursors: BTreeMap<String, usize>,
    sentences: Vec<TaggedSentence>,
    counts: BTreeMap<(String, String), usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            slots: BTreeMap::new(),
            cursors: BTreeMap::new(),
            sentences: Vec::new(),
            counts: BTreeMap::new(),
        }
    }

    fn add_slot(&mut self, name: &str, entries: Vec<(String, String)>) {
        assert!(!entries.is_empty(), "slot {{{name}}} has no entries");
        let replaced = self.slots.insert(name.to_string(), entries);
        assert!(replaced.is_none(), "slot {{{name}}} defined twice");
    }

    fn fill(&mut self, template: &str, reps: usize) {
        for _ in 0..reps {
            let mut sentence: TaggedSentence = Vec::new();
            for piece in template.split_whitespace() {
                let (word, tag) = match piece.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
                    Some(name) => {
                        let list = self
                            .slots
                            .get(name)
                            .unwrap_or_else(|| panic!("unknown slot {{{name}}}"));
                        let cursor = self.cursors.entry(name.to_string()).or_insert(0);
                        let entry = list[*cursor % list.len()].clone();
                        *cursor += 1;
                        entry
                    }
                    None => {
                        let (w, t) = piece
                            .rsplit_once('/')
                            .unwrap_or_else(|| panic!("literal without a tag: {piece}"));
                        (w.to_string(), t.to_string())
                    }
                };
                *self
                    .counts
                    .entry((word.to_lowercase(), tag.clone()))
                    .or_insert(0) += 1;
                sentence.push((word, tag));
            }
            self.sentences.push(sentence);
        }
    }

    fn count(&self, word: &str, tag: &str) -> usize {
        self.counts
            .get(&(word.to_lowercase(), tag.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn min_count(&self, slot: &str) -> usize {
        self.slots[slot]
            .iter()
            .map(|(w, t)| self.count(w, t))
            .min()
            .expect("slot is non-empty")
    }

    /// Adds repetitions of `template` until every word in `slot` is
    /// attested at least `DICT_FLOOR` times.
    fn top_up(&mut self, slot: &str, template: &str) {
        while self.min_count(slot) < DICT_FLOOR {
            self.fill(template, 8);
        }
    }
}

fn surface(word: &str, tag: &str) -> String {
    if tag == "NNP" {
        let mut chars = word.chars();
        match chars.next() {
            Some(first) => first.to_uppercase().chain(chars).collect(),
            None => String::new(),
        }
    } else {
        word.to_string()
    }
}

fn build_corpus(gold: &[TaggedSentence]) -> Builder {
    let ambiguous: BTreeMap<&str, &[&str]> = AMBIGUOUS.iter().copied().collect();

    // tag inventory of the gold set, keyed by lowercased surface
    let mut gold_tags: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for sentence in gold {
        for (word, tag) in sentence {
            if !is_fixed(word) {
                gold_tags
                    .entry(word.to_lowercase())
                    .or_default()
                    .insert(tag.clone());
            }
        }
    }
    for (word, tags) in &gold_tags {
        if tags.len() > 1 {
            assert!(
                ambiguous.contains_key(word.as_str()),
                "gold word {word:?} carries tags {tags:?} but is not in the ambiguity table"
            );
        }
    }

    // per-tag word lists: every unambiguous gold word, so nothing the
    // evaluation set uses can end up out of coverage
    let mut derived: BTreeMap<&'static str, Vec<(String, String)>> = BTreeMap::new();
    for (word, tags) in &gold_tags {
        if ambiguous.contains_key(word.as_str()) {
            continue;
        }
        let tag = tags.iter().next().expect("tag set is non-empty");
        if let Some(slot) = slot_for_tag(tag) {
            derived
                .entry(slot)
                .or_default()
                .push((surface(word, tag), tag.clone()));
        }
    }
    // spelled-out numerals; the gold set only uses digit forms, which the
    // fixed rules cover, but real text has both
    derived
        .entry("cd")
        .or_default()
        .extend(["two", "three", "five"].map(|w| (w.to_string(), "CD".to_string())));

    let mut b = Builder::new();
    for (slot, entries) in derived {
        b.add_slot(slot, entries);
    }

    // fixture vocabulary: filler slots and cue words from the synthetic
    // corpus generators
    b.add_slot(
        "fmod",
        FILLER_MODIFIERS
            .iter()
            .map(|w| (w.to_string(), fmod_tag(w).to_string()))
            .collect(),
    );
    b.add_slot(
        "fnoun",
        FILLER_NOUNS
            .iter()
            .map(|w| (w.to_string(), "NNS".to_string()))
            .collect(),
    );
    b.add_slot(
        "fverb",
        FILLER_VERBS
            .iter()
            .map(|w| (w.to_string(), "VBN".to_string()))
            .collect(),
    );
    let tagged_cues: BTreeSet<&str> = CUE_TAGS.iter().map(|(w, _)| *w).collect();
    let fixture_cues: BTreeSet<&str> = PLANTED_CUES
        .iter()
        .flat_map(|(_, cues)| cues.iter().copied())
        .collect();
    assert_eq!(
        tagged_cues, fixture_cues,
        "cue tag table out of sync with the fixture's planted cues"
    );
    b.add_slot(
        "cue",
        CUE_TAGS
            .iter()
            .map(|(w, t)| (w.to_string(), t.to_string()))
            .collect(),
    );

    for (name, words, tag) in [
        ("rare_nn", RARE_NN, "NN"),
        ("rare_nns", RARE_NNS, "NNS"),
        ("rare_vbn", RARE_VBN, "VBN"),
        ("rare_vbd", RARE_VBD, "VBD"),
        ("rare_jj", RARE_JJ, "JJ"),
        ("rare_vbz", RARE_VBZ, "VBZ"),
        ("rare_rb", RARE_RB, "RB"),
        ("rare_vbg", RARE_VBG, "VBG"),
        ("rare_nnp", RARE_NNP, "NNP"),
    ] {
        for word in words {
            let key = word.to_lowercase();
            assert!(
                !gold_tags.contains_key(&key),
                "rare word {word} collides with the gold vocabulary"
            );
        }
        b.add_slot(
            name,
            words.iter().map(|w| (w.to_string(), tag.to_string())).collect(),
        );
    }

    for (template, reps) in GENERAL {
        b.fill(template, *reps);
    }
    for (template, reps) in DISAMBIGUATION {
        b.fill(template, *reps);
    }

    // the synthetic fixture register: filler statements, planted phrases,
    // and cue statements, in the exact token shapes the generators emit
    b.fill(
        "the/DT {fmod} {fnoun} in/IN the/DT {fmod} {fnoun} were/VBD {fverb} \
         over/IN the/DT {fmod} {fnoun} [/( 3/CD ]/) ./.",
        500,
    );
    let fixture_phrases = SUPPORTING_PHRASES
        .iter()
        .chain(DISPUTING_PHRASES.iter())
        .chain(MENTIONING_PHRASES.iter());
    let mut tagged_phrases = PHRASE_TAGS.iter();
    for phrase in fixture_phrases {
        let tagged = tagged_phrases
            .next()
            .expect("a tagged form for every planted phrase");
        let stripped: Vec<&str> = tagged
            .split_whitespace()
            .map(|piece| piece.rsplit_once('/').expect("tagged token").0)
            .collect();
        assert_eq!(
            stripped.join(" "),
            phrase.rendering,
            "tagged phrase out of sync with the fixture rendering"
        );
        b.fill(
            &format!("the/DT {{fmod}} {{fnoun}} {tagged} in/IN the/DT {{fmod}} {{fnoun}} [/( 9/CD ]/) ./."),
            25,
        );
    }
    assert!(tagged_phrases.next().is_none(), "extra tagged phrases");
    b.fill(
        "the/DT {fmod} {fnoun} {cue} and/CC {cue} the/DT {fmod} {fnoun} [/( 6/CD ]/) ./.",
        150,
    );
    b.fill(
        "the/DT {fmod} {fnoun} {cue} and/CC {cue} and/CC {cue} the/DT {fmod} {fnoun} ./.",
        100,
    );
    b.fill(
        "the/DT {fmod} {fnoun} {cue} and/CC {cue} the/DT {fmod} {fnoun} \
         given/IN the/DT {cue} notes/NNS ./.",
        40,
    );
    b.fill("the/DT {nns} differ/VBP in/IN the/DT {nn} ./.", 30);
    b.fill("higher/JJR {fnoun} were/VBD {fverb} in/IN the/DT {fnoun} ./.", 30);

    // rare words: enough occurrences to learn the suffix families, never
    // enough to enter the dictionary
    let rare_frames: &[(&str, &[&str])] = &[
        ("rare_nn", &[
            "the/DT {rare_nn} was/VBD {vbn} in/IN the/DT {nn} ./.",
            "the/DT {jj} {rare_nn} {vbz} the/DT {nns} ./.",
        ]),
        ("rare_nns", &[
            "the/DT {fmod} {rare_nns} were/VBD {fverb} in/IN the/DT {nn} ./.",
            "the/DT {rare_nns} {vbd} the/DT {nn} ./.",
        ]),
        ("rare_vbn", &[
            "the/DT {nns} were/VBD {rare_vbn} and/CC {fverb} ./.",
            "the/DT {nn} was/VBD {rare_vbn} by/IN the/DT {nn} ./.",
        ]),
        ("rare_vbd", &[
            "the/DT {nns} {rare_vbd} the/DT {nn} ./.",
            "{nnp} et/FW al/FW ./. {rare_vbd} the/DT {nns} ./.",
        ]),
        ("rare_jj", &[
            "the/DT {rare_jj} {nns} were/VBD {vbn} ./.",
            "the/DT {nn} was/VBD {rare_jj} ./.",
        ]),
        ("rare_vbz", &[
            "the/DT {nn} {rare_vbz} the/DT {nns} ./.",
            "the/DT {nn} {rare_vbz} {rb} ./.",
        ]),
        ("rare_rb", &[
            "the/DT {nns} were/VBD {rare_rb} {vbn} ./.",
            "the/DT {nn} {rare_rb} {vbd} the/DT {nn} ./.",
        ]),
        ("rare_vbg", &[
            "the/DT {nn} is/VBZ {rare_vbg} the/DT {nns} ./.",
            "{rare_vbg} the/DT {nn} ,/, we/PRP {vbd} the/DT {nns} ./.",
        ]),
        ("rare_nnp", &[
            "{rare_nnp} et/FW al/FW ./. {vbd} the/DT {nn} ./.",
            "the/DT {nn} was/VBD {vbn} (/( {rare_nnp} et/FW al/FW ./. 2014/CD )/) ./.",
        ]),
    ];
    for (slot, frames) in rare_frames {
        let len = b.slots[*slot].len();
        b.fill(frames[0], 4 * len);
        b.fill(frames[1], 3 * len);
    }

    // coverage pass: every dictionary-intended list reaches DICT_FLOOR
    let top_ups: &[(&str, &str)] = &[
        ("nn", "the/DT {nn} was/VBD {vbn} in/IN the/DT {nn} ./."),
        ("nns", "the/DT {nns} were/VBD {vbn} in/IN the/DT {nns} ./."),
        ("jj", "the/DT {nn} was/VBD {jj} and/CC {jj} ./."),
        ("jjr", "the/DT {nn} was/VBD {jjr} than/IN the/DT {nn} ./."),
        ("jjs", "the/DT {jjs} {nn} was/VBD {vbn} ./."),
        ("rb", "the/DT {nns} were/VBD {rb} {vbn} ./."),
        ("rbr", "the/DT {nns} {vbd} {rbr} than/IN the/DT {nns} ./."),
        ("vb", "the/DT {nns} {md} {vb} the/DT {nn} ./."),
        ("vbd", "the/DT {nns} {vbd} the/DT {nn} ./."),
        ("vbg", "the/DT {nn} is/VBZ {vbg} the/DT {nns} ./."),
        ("vbn", "the/DT {nn} was/VBD {vbn} by/IN the/DT {nn} ./."),
        ("vbp", "these/DT {nns} {vbp} the/DT {nn} ./."),
        ("vbz", "the/DT {nn} {vbz} the/DT {nn} ./."),
        ("md", "the/DT {nn} {md} {vb} ./."),
        ("in", "the/DT {nns} were/VBD {vbn} {in} the/DT {nn} ./."),
        ("dt", "{dt} {nn} was/VBD {jj} ./."),
        ("prp", "{prp} {vbd} the/DT {nn} ./."),
        ("prps", "{prps} {nns} were/VBD {jj} ./."),
        ("nnp", "{nnp} et/FW al/FW ./. {vbd} the/DT {nn} ./."),
        ("cd", "the/DT {cd} {nns} were/VBD {vbn} ./."),
        ("cc", "the/DT {nn} was/VBD {jj} {cc} {jj} ./."),
        ("wdt", "the/DT {nn} ,/, {wdt} was/VBD {vbn} ,/, {vbd} the/DT {nn} ./."),
        ("wp", "the/DT {nns} {wp} {vbd} the/DT {nn} were/VBD {jj} ./."),
        ("wrb", "it/PRP is/VBZ {jj} {wrb} the/DT {nn} {vbz} ./."),
        (
            "fmod",
            "the/DT {fmod} {fnoun} in/IN the/DT {fmod} {fnoun} were/VBD {fverb} \
             over/IN the/DT {fmod} {fnoun} [/( 3/CD ]/) ./.",
        ),
        (
            "fnoun",
            "the/DT {fmod} {fnoun} in/IN the/DT {fmod} {fnoun} were/VBD {fverb} \
             over/IN the/DT {fmod} {fnoun} [/( 3/CD ]/) ./.",
        ),
        (
            "fverb",
            "the/DT {fmod} {fnoun} in/IN the/DT {fmod} {fnoun} were/VBD {fverb} \
             over/IN the/DT {fmod} {fnoun} [/( 3/CD ]/) ./.",
        ),
        (
            "cue",
            "the/DT {fmod} {fnoun} {cue} and/CC {cue} the/DT {fmod} {fnoun} [/( 6/CD ]/) ./.",
        ),
    ];
    let slot_names: BTreeSet<&str> = b.slots.keys().map(|s| s.as_str()).collect();
    let topped: BTreeSet<&str> = top_ups.iter().map(|(s, _)| *s).collect();
    for slot in &slot_names {
        assert!(
            topped.contains(slot) || slot.starts_with("rare_"),
            "slot {{{slot}}} has no coverage template"
        );
    }
    for (slot, template) in top_ups {
        b.top_up(slot, template);
    }
    b
}

/// Everything that must hold before the corpus is worth training on.
fn audit(b: &Builder, gold: &[TaggedSentence]) {
    let ambiguous: BTreeMap<&str, &[&str]> = AMBIGUOUS.iter().copied().collect();

    // attestation levels: dictionary-intended words above the cutoff,
    // rare words below it
    for (name, entries) in &b.slots {
        let rare = name.starts_with("rare_");
        for (word, tag) in entries {
            let n = b.count(word, tag);
            if rare {
                assert!(
                    (5..=RARE_CAP).contains(&n),
                    "rare word {word}/{tag} attested {n} times, outside 5..={RARE_CAP}"
                );
            } else if !ambiguous.contains_key(word.to_lowercase().as_str()) {
                assert!(
                    n >= DICT_FLOOR,
                    "slot {{{name}}} word {word}/{tag} attested only {n} times"
                );
            }
        }
    }

    // exactly the declared words are multi-tagged, with balanced tag mixes
    // so none of them slips into the tag dictionary
    let mut by_word: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for ((word, tag), n) in &b.counts {
        if !is_fixed(word) {
            *by_word.entry(word).or_default().entry(tag).or_insert(0) += n;
        }
    }
    for (word, tags) in &by_word {
        if tags.len() > 1 {
            assert!(
                ambiguous.contains_key(word),
                "{word} is attested as {tags:?} but is not in the ambiguity table"
            );
        }
    }
    for (word, expected) in AMBIGUOUS {
        let tags = by_word
            .get(word)
            .unwrap_or_else(|| panic!("ambiguous word {word} never attested"));
        let got: BTreeSet<&str> = tags.keys().copied().collect();
        let want: BTreeSet<&str> = expected.iter().copied().collect();
        assert_eq!(got, want, "{word} attested under the wrong tag set");
        let total: usize = tags.values().sum();
        let largest = *tags.values().max().expect("non-empty");
        let smallest = *tags.values().min().expect("non-empty");
        assert!(
            smallest >= 15,
            "{word}: minority tag attested only {smallest} times"
        );
        assert!(
            (largest as f64) / (total as f64) <= 0.93,
            "{word}: dominant tag at {largest}/{total}, close to the dictionary cutoff"
        );
    }

    // every (word, tag) pair the evaluation set uses is attested
    let mut missing = BTreeSet::new();
    for sentence in gold {
        for (word, tag) in sentence {
            if !is_fixed(word) && b.count(word, tag) == 0 {
                missing.insert(format!("{}/{}", word.to_lowercase(), tag));
            }
        }
    }
    assert!(
        missing.is_empty(),
        "gold pairs never attested in the training corpus: {missing:?}"
    );
}

fn main() {
    let gold = parse_gold(BUNDLED_GOLD, "bundled gold set").expect("bundled gold set parses");
    let b = build_corpus(&gold);
    let tokens: usize = b.sentences.iter().map(|s| s.len()).sum();
    println!(
        "corpus: {} sentences, {} tokens, {} distinct word/tag pairs",
        b.sentences.len(),
        tokens,
        b.counts.len()
    );
    audit(&b, &gold);

    let opts = TrainOptions {
        seed: SEED,
        version: MODEL_VERSION.to_string(),
        provenance: format!(
            "greedy averaged perceptron trained on a generated scientific-register \
             corpus; examples/train_tagger.rs, seed {SEED}"
        ),
        ..TrainOptions::default()
    };
    let model = train(&b.sentences, &opts);

    let report = evaluate(&model, &gold);
    println!(
        "gold accuracy: {}/{} = {:.4}",
        report.correct,
        report.total,
        report.accuracy()
    );
    for sentence in &gold {
        let words: Vec<String> = sentence.iter().map(|(w, _)| w.clone()).collect();
        let predicted = model.tag_words(&words);
        for ((word, want), got) in sentence.iter().zip(&predicted) {
            if want != got {
                println!("  miss: {word} gold {want} predicted {got}");
            }
        }
    }
    assert!(
        report.accuracy() >= ACCURACY_FLOOR,
        "trained model fell below the evaluation floor"
    );

    // behaviors the library test suite pins
    let tag = |words: &[&str]| {
        let owned: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        model.tag_words(&owned)
    };
    assert_eq!(tag(&["higher"]), ["JJR"]);
    assert_eq!(tag(&["the", "results", "differ"]), ["DT", "NNS", "VBP"]);

    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/tagger/model.json");
    model.save(&out).expect("model written");
    let bytes = std::fs::metadata(&out).map(|m| m.len()).unwrap_or(0);
    println!("wrote {} ({} KiB)", out.display(), bytes / 1024);
}
