use std::collections::HashMap;
use std::sync::Arc;

use proptest::prelude::*;

use patcher_core::attention::{attention_difference, object_attention, pairwise_mean_abs_diff};
use patcher_core::backends::sim::{SimWorld, SimWorldConfig};
use patcher_core::backends::{BackendError, Embedder};
use patcher_core::detection::classify;
use patcher_core::domain::{validate_prompt, CandidateSource, FeatureCandidate, FeatureKind, TrailEntry};
use patcher_core::enhancement::{prune_tree, substitute, HyponymTree};
use patcher_core::extraction::Extractor;
use patcher_core::lexicon::Lexicon;
use patcher_core::{ObjectEntity, ObjectStatus, Prompt, RepairOutcome, RepairStatus, TokenAttentionPair};

const NOUNS: &[&str] = &["cat", "dog", "elephant", "apple", "umbrella", "owl", "horse", "bird", "giraffe"];

fn brute_difference(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for x in a {
        for y in b {
            sum += (x - y).abs();
        }
    }
    sum / (a.len() * b.len()) as f64
}

fn brute_pairwise(s: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            sum += (s[i] - s[j]).abs();
            pairs += 1;
        }
    }
    sum / pairs as f64
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn scores(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 1..max)
}

proptest! {
    #[test]
    fn difference_matches_all_pairs(a in scores(12), b in scores(12)) {
        let d = attention_difference(&a, &b).unwrap();
        prop_assert!(close(d, brute_difference(&a, &b)), "{d} vs {}", brute_difference(&a, &b));
        prop_assert!(d >= 0.0);
        prop_assert!(close(d, attention_difference(&b, &a).unwrap()));
    }

    #[test]
    fn difference_is_shift_invariant(a in scores(8), b in scores(8), shift in -5.0f64..5.0) {
        let sa: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let sb: Vec<f64> = b.iter().map(|x| x + shift).collect();
        let d = attention_difference(&a, &b).unwrap();
        prop_assert!((d - attention_difference(&sa, &sb).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pairwise_matches_all_pairs(s in prop::collection::vec(0.0f64..10.0, 2..20)) {
        let d = pairwise_mean_abs_diff(&s).unwrap();
        prop_assert!(close(d, brute_pairwise(&s)));
    }

    #[test]
    fn object_attention_is_mean_of_selection(
        s in prop::collection::vec(0.0f64..10.0, 1..16),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..6),
    ) {
        let taps: Vec<TokenAttentionPair> =
            s.iter().enumerate().map(|(token_index, &score)| TokenAttentionPair { token_index, score }).collect();
        let idx: Vec<usize> = picks.iter().map(|p| p.index(s.len())).collect();
        let mean = idx.iter().map(|&i| s[i]).sum::<f64>() / idx.len() as f64;
        prop_assert!(close(object_attention(&taps, &idx).unwrap(), mean));
    }
}

#[derive(Debug, Clone)]
struct FixedEmbeddings(HashMap<String, Vec<f64>>);

impl Embedder for FixedEmbeddings {
    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError> {
        Ok(self.0[text].clone())
    }
}

/// Random tree: node i > 0 hangs under a uniformly chosen earlier node.
fn random_tree() -> impl Strategy<Value = (HyponymTree, FixedEmbeddings)> {
    (1usize..25)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), n + 1),
            )
        })
        .prop_map(|(parents, vecs)| {
            let mut tree = HyponymTree::single("n0", "s0");
            for (i, p) in parents.iter().enumerate() {
                tree.add_child(p.index(i + 1), format!("n{}", i + 1), format!("s{}", i + 1));
            }
            let mut vecs = vecs;
            vecs[0] = vec![1.0, 0.0, 0.0];
            let map = vecs.into_iter().enumerate().map(|(i, v)| (format!("n{i}"), v)).collect();
            (tree, FixedEmbeddings(map))
        })
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let n = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n(a) == 0.0 || n(b) == 0.0 {
        0.0
    } else {
        dot / (n(a) * n(b))
    }
}

proptest! {
    #[test]
    fn pruning_keeps_exactly_similar_ancestries((tree, emb) in random_tree(), threshold in -0.5f64..0.9) {
        let pruned = prune_tree(tree.clone(), &emb, threshold).unwrap();
        prop_assert!(pruned.violations(Some(threshold)).is_empty(), "{:?}", pruned.violations(Some(threshold)));
        let root = &emb.0["n0"];
        for (id, node) in pruned.nodes().iter().enumerate().skip(1) {
            let mut keep = true;
            let mut cur = Some(id);
            while let Some(c) = cur.filter(|&c| c != 0) {
                keep &= cos(&emb.0[&pruned.node(c).lemma], root) >= threshold;
                cur = pruned.node(c).parent;
            }
            prop_assert_eq!(!node.pruned, keep, "node {}", id);
        }
    }

    #[test]
    fn stricter_pruning_keeps_a_subset((tree, emb) in random_tree(), lo in -0.5f64..0.9, step in 0.0f64..0.5) {
        let loose = prune_tree(tree.clone(), &emb, lo).unwrap();
        let strict = prune_tree(tree, &emb, lo + step).unwrap();
        for (a, b) in loose.nodes().iter().zip(strict.nodes()) {
            prop_assert!(!(a.pruned && !b.pruned));
        }
        prop_assert!(strict.unpruned_count() <= loose.unpruned_count());
    }
}

fn expected_article(word: &str) -> &'static str {
    if "aeiou".contains(&word[..1]) {
        "an"
    } else {
        "a"
    }
}

proptest! {
    #[test]
    fn substitution_fixes_article_and_reverses(
        a in prop::sample::select(NOUNS),
        b in prop::sample::select(NOUNS),
        r in prop::sample::select(NOUNS),
    ) {
        prop_assume!(a != b && r != a && r != b);
        let lex = Arc::new(Lexicon::bundled());
        let extractor = Extractor::builtin(lex.clone());
        let text = format!("{} {a} and a {b}", expected_article(a));
        let p = Prompt::new("p", text.clone(), &lex);
        let objects = extractor.extract(&p).unwrap();
        let target = objects.iter().find(|o| o.concept == a).unwrap();
        let q = substitute(&p, target, r, &lex).unwrap();
        prop_assert_eq!(&q.text, &format!("{} {r} and a {b}", expected_article(r)));
        prop_assert!(validate_prompt(&q).is_empty());

        let back_target = extractor.extract(&q).unwrap().into_iter().find(|o| o.concept == r).unwrap();
        let back = substitute(&q, &back_target, a, &lex).unwrap();
        prop_assert_eq!(back.text, text);
    }

    #[test]
    fn raising_threshold_only_adds_neglect(
        sims in prop::collection::vec(0.0f64..1.0, 1..8),
        t1 in 0.01f64..0.99,
        t2 in 0.01f64..0.99,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let objects: Vec<ObjectEntity> = sims
            .iter()
            .enumerate()
            .map(|(i, _)| ObjectEntity {
                phrase: format!("o{i}"),
                head_lemma: format!("o{i}"),
                concept: format!("o{i}"),
                span: (i, i),
                status: ObjectStatus::Unknown,
            })
            .collect();
        let loose = classify("p", &objects, &sims, lo);
        let strict = classify("p", &objects, &sims, hi);
        for (a, b) in loose.entries.iter().zip(&strict.entries) {
            if a.object.status == ObjectStatus::Neglected {
                prop_assert_eq!(b.object.status, ObjectStatus::Neglected);
            }
            prop_assert_eq!(a.object.status == ObjectStatus::Neglected, a.similarity < lo);
        }
        prop_assert_eq!(loose.neglected.len() + loose.correct.len(), sims.len());
    }

    #[test]
    fn more_salience_never_lowers_share(
        cat in 0.01f64..2.0,
        dog in 0.01f64..2.0,
        boost in 0.0f64..2.0,
    ) {
        let lex = Arc::new(Lexicon::bundled());
        let shares_with = |cat: f64| {
            let mut cfg = SimWorldConfig::new(0.3);
            cfg.salience.insert("cat".into(), cat);
            cfg.salience.insert("dog".into(), dog);
            let world = SimWorld::new(cfg, lex.clone(), None).unwrap();
            world.shares(&Prompt::new("p", "a cat and a dog", &lex)).1
        };
        let before = shares_with(cat);
        let after = shares_with(cat + boost);
        prop_assert!((before.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(close(before[0], cat / (cat + dog)));
        prop_assert!(after[0] >= before[0] - 1e-12);
        prop_assert!(after[1] <= before[1] + 1e-12);
    }
}

fn trail_entry() -> impl Strategy<Value = TrailEntry> {
    (
        prop::sample::select(vec![FeatureKind::Color, FeatureKind::Shape, FeatureKind::Hyponym, FeatureKind::Rewrite]),
        prop::sample::select(NOUNS),
        prop::option::of(0.0f64..5.0),
        any::<bool>(),
    )
        .prop_map(|(kind, word, att_diff, passed)| TrailEntry {
            candidate: FeatureCandidate {
                kind,
                phrase: format!("small {word}"),
                target: word.to_string(),
                att_diff,
                source: if kind == FeatureKind::Hyponym { CandidateSource::Taxonomy } else { CandidateSource::Llm },
            },
            prompt: format!("a small {word}, by the sea"),
            passed,
            att_diff,
        })
}

proptest! {
    #[test]
    fn outcome_survives_json(
        words in prop::collection::vec(prop::sample::select(NOUNS), 1..6),
        trail in prop::collection::vec(trail_entry(), 0..6),
        status in prop::sample::select(vec![RepairStatus::AlreadyCorrect, RepairStatus::Repaired, RepairStatus::BestEffort]),
    ) {
        let text = words.iter().map(|w| format!("a {w}")).collect::<Vec<_>>().join(" and ");
        let outcome = RepairOutcome {
            status,
            final_prompt: Prompt::new("id-1", text, &Lexicon::bundled()),
            attempts: trail.len() + 1,
            final_att_diff: trail.last().and_then(|e| e.att_diff),
            trail,
        };
        let json = serde_json::to_string(&outcome).unwrap();
        let back: RepairOutcome = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, outcome);
    }
}
