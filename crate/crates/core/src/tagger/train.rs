//! Averaged-perceptron training. Not part of the analysis runtime: the
//! bundled model is produced offline by `examples/train_tagger.rs` and
//! only loaded at run time.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::{features, hard_tag, norm_word, TaggedSentence, TaggerModel, END, PTB_TAGSET, START};

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub iterations: usize,
    pub seed: u64,
    /// A word enters the tag dictionary only with at least this many
    /// occurrences...
    pub tagdict_min_freq: usize,
    /// ...and at least this share of them under a single tag.
    pub tagdict_dominance: f64,
    pub version: String,
    pub provenance: String,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            iterations: 5,
            seed: 1,
            tagdict_min_freq: 20,
            tagdict_dominance: 0.97,
            version: "1.0.0".to_string(),
            provenance: String::new(),
        }
    }
}

/// Sparse weight state during training; collapsed to averaged weights at
/// the end.
struct Perceptron {
    weights: HashMap<String, HashMap<String, f64>>,
    totals: HashMap<(String, String), f64>,
    stamps: HashMap<(String, String), u64>,
    classes: Vec<String>,
    updates: u64,
}

impl Perceptron {
    fn new(classes: Vec<String>) -> Self {
        Perceptron {
            weights: HashMap::new(),
            totals: HashMap::new(),
            stamps: HashMap::new(),
            classes,
            updates: 0,
        }
    }

    fn predict(&self, feats: &[String]) -> String {
        let mut scores: HashMap<&str, f64> = HashMap::new();
        for feat in feats {
            if let Some(per_class) = self.weights.get(feat) {
                for class in &self.classes {
                    if let Some(w) = per_class.get(class) {
                        *scores.entry(class.as_str()).or_insert(0.0) += w;
                    }
                }
            }
        }
        self.classes
            .iter()
            .map(|c| (scores.get(c.as_str()).copied().unwrap_or(0.0), c.as_str()))
            .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(b.1)))
            .map(|(_, c)| c.to_string())
            .expect("classes non-empty")
    }

    fn bump(&mut self, feat: &str, class: &str, delta: f64) {
        let key = (feat.to_string(), class.to_string());
        let w = self
            .weights
            .entry(feat.to_string())
            .or_default()
            .entry(class.to_string())
            .or_insert(0.0);
        let stamp = self.stamps.entry(key.clone()).or_insert(0);
        *self.totals.entry(key).or_insert(0.0) += (self.updates - *stamp) as f64 * *w;
        *stamp = self.updates;
        *w += delta;
    }

    fn update(&mut self, truth: &str, guess: &str, feats: &[String]) {
        self.updates += 1;
        if truth == guess {
            return;
        }
        for feat in feats {
            self.bump(feat, truth, 1.0);
            self.bump(feat, guess, -1.0);
        }
    }

    /// Averages each weight over the whole training run, rounding to three
    /// decimals and dropping zeros, which shrinks the model file without
    /// measurable accuracy cost.
    fn averaged(mut self) -> BTreeMap<String, BTreeMap<String, f64>> {
        let mut out: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        let denominator = self.updates.max(1) as f64;
        for (feat, per_class) in &self.weights {
            for (class, w) in per_class {
                let key = (feat.clone(), class.clone());
                let stamp = self.stamps.get(&key).copied().unwrap_or(0);
                let total = self.totals.remove(&key).unwrap_or(0.0)
                    + (self.updates - stamp) as f64 * w;
                let avg = (total / denominator * 1000.0).round() / 1000.0;
                if avg != 0.0 {
                    out.entry(feat.clone()).or_default().insert(class.clone(), avg);
                }
            }
        }
        out
    }
}

/// Builds the dictionary of frequent, effectively unambiguous words that
/// bypass the perceptron entirely.
fn build_tagdict(sentences: &[TaggedSentence], opts: &TrainOptions) -> BTreeMap<String, String> {
    let mut counts: HashMap<String, HashMap<String, usize>> = HashMap::new();
    for sentence in sentences {
        for (word, tag) in sentence {
            if hard_tag(word).is_some() {
                continue;
            }
            *counts
                .entry(norm_word(word))
                .or_default()
                .entry(tag.clone())
                .or_insert(0) += 1;
        }
    }
    let mut dict = BTreeMap::new();
    for (word, tag_counts) in counts {
        let total: usize = tag_counts.values().sum();
        if total < opts.tagdict_min_freq {
            continue;
        }
        let (best_tag, best_count) = tag_counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .expect("non-empty tag counts");
        if *best_count as f64 / total as f64 >= opts.tagdict_dominance {
            dict.insert(word, best_tag.clone());
        }
    }
    dict
}

/// Trains a model with the greedy averaged-perceptron algorithm:
/// sentence-shuffled epochs, updates only on tokens not covered by hard
/// rules or the tag dictionary, context rolled forward with predicted tags
/// so training matches test conditions. Deterministic for fixed
/// (sentences, options).
pub fn train(sentences: &[TaggedSentence], opts: &TrainOptions) -> TaggerModel {
    let tagdict = build_tagdict(sentences, opts);
    let mut classes: BTreeSet<String> = BTreeSet::new();
    for sentence in sentences {
        for (_, tag) in sentence {
            classes.insert(tag.clone());
        }
    }
    let mut model = Perceptron::new(classes.iter().cloned().collect());

    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.iterations {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &sentences[si];
            let words: Vec<&String> = sentence.iter().map(|(w, _)| w).collect();
            let mut context: Vec<String> = Vec::with_capacity(words.len() + 4);
            context.extend(START.iter().map(|s| s.to_string()));
            context.extend(words.iter().map(|w| norm_word(w)));
            context.extend(END.iter().map(|s| s.to_string()));

            let mut p1 = START[0].to_string();
            let mut p2 = START[1].to_string();
            for (i, (word, gold)) in sentence.iter().enumerate() {
                let guess = if let Some(t) = hard_tag(word) {
                    t.to_string()
                } else if let Some(t) = tagdict.get(&context[i + 2]) {
                    t.clone()
                } else {
                    let feats = features(i, word, &context, &p1, &p2);
                    let guess = model.predict(&feats);
                    model.update(gold, &guess, &feats);
                    guess
                };
                p2 = std::mem::replace(&mut p1, guess);
            }
        }
    }

    let weights = model.averaged();
    let tagset: BTreeSet<String> = PTB_TAGSET.iter().map(|s| s.to_string()).collect();
    let file_classes: BTreeSet<String> = weights
        .values()
        .flat_map(|m| m.keys().cloned())
        .collect();
    TaggerModel {
        version: opts.version.clone(),
        provenance: opts.provenance.clone(),
        tagset,
        tagdict: tagdict.into_iter().collect(),
        weights: weights
            .into_iter()
            .map(|(f, per_class)| (f, per_class.into_iter().collect()))
            .collect(),
        classes: file_classes.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagger::evaluate;

    fn tagged(pairs: &[(&str, &str)]) -> TaggedSentence {
        pairs
            .iter()
            .map(|(w, t)| (w.to_string(), t.to_string()))
            .collect()
    }

    fn tiny_corpus() -> Vec<TaggedSentence> {
        let mut sentences = Vec::new();
        let nouns_pl = ["results", "studies", "findings", "samples"];
        let verbs = ["differ", "agree", "vary", "improve"];
        for n in nouns_pl {
            for v in verbs {
                sentences.push(tagged(&[("the", "DT"), (n, "NNS"), (v, "VBP"), (".", ".")]));
                sentences.push(tagged(&[
                    ("these", "DT"),
                    (n, "NNS"),
                    ("often", "RB"),
                    (v, "VBP"),
                    (".", "."),
                ]));
            }
        }
        sentences
    }

    #[test]
    fn learns_a_tiny_grammar() {
        let corpus = tiny_corpus();
        let opts = TrainOptions {
            tagdict_min_freq: 100, // force the perceptron to carry everything
            ..TrainOptions::default()
        };
        let model = train(&corpus, &opts);
        let report = evaluate(&model, &corpus);
        assert!(report.accuracy() > 0.95, "accuracy {}", report.accuracy());
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = tiny_corpus();
        let opts = TrainOptions::default();
        let m1 = train(&corpus, &opts);
        let m2 = train(&corpus, &opts);
        assert_eq!(m1.to_json(), m2.to_json());
    }

    #[test]
    fn tagdict_requires_dominance() {
        // "lead" appears 30x as NN and 30x as VB: never in the dict
        let mut corpus = Vec::new();
        for _ in 0..30 {
            corpus.push(tagged(&[("the", "DT"), ("lead", "NN")]));
            corpus.push(tagged(&[("they", "PRP"), ("lead", "VB")]));
        }
        let dict = build_tagdict(&corpus, &TrainOptions::default());
        assert!(!dict.contains_key("lead"));
        assert_eq!(dict.get("the").map(String::as_str), Some("DT"));
    }

    #[test]
    fn trained_model_round_trips_through_json() {
        let model = train(&tiny_corpus(), &TrainOptions::default());
        let json = model.to_json();
        let reloaded = TaggerModel::parse_json(&json, "<t>").unwrap();
        let words: Vec<String> = ["the", "results", "differ", "."]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(model.tag_words(&words), reloaded.tag_words(&words));
    }
}
