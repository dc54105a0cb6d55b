//! Deterministic stand-in for the whole model stack.
//!
//! Each object gets an effective salience: its base salience, plus a bonus
//! for every modifier word in its phrase, plus a bonus per taxonomy level when
//! it is a hyponym of a base concept. Object tokens share the normalized
//! salience of their object; an object appears in the image when its share
//! reaches the appearance threshold. Image references spell out the present
//! concepts, so similarity is a pure function of its arguments.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hasher;
use std::sync::Arc;

use fnv::FnvHasher;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BackendError, Embedder, Generator, Scorer, SuggestRequest, Suggester, TemplateKind};
use crate::domain::{GenerationRecord, ObjectEntity, Prompt, TokenAttentionPair};
use crate::enhancement::substitute::concept_words;
use crate::enhancement::templates::split_semicolon_list;
use crate::enhancement::tree::build_hyponym_tree;
use crate::enhancement::wordnet::WordNet;
use crate::extraction::Extractor;
use crate::lexicon::{Lexicon, Pos};

const BUNDLED_WORLD: &str = include_str!("../../data/sim_world.json");

pub const DEFAULT_SALIENCE: f64 = 0.1;
pub const NON_OBJECT_SCORE: f64 = 0.01;
pub const PRESENT_SIMILARITY: f64 = 0.9;
pub const ABSENT_SIMILARITY: f64 = 0.1;
pub const JITTER: f64 = 0.02;
/// Similarity of text that names no object.
pub const BARE_TEXT_SIMILARITY: f64 = 0.5;
const HASH_DIM: usize = 32;
const FAMILY_WEIGHT: f64 = 0.9;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("cannot parse world file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read world file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponymLink {
    pub base: String,
    pub depth: usize,
}

/// Serializable world parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimWorldConfig {
    pub salience: BTreeMap<String, f64>,
    #[serde(default)]
    pub modifier_bonus: BTreeMap<String, f64>,
    #[serde(default)]
    pub depth_bonus: f64,
    pub appearance_threshold: f64,
    #[serde(default)]
    pub seed: u64,
    /// Explicit hyponym registrations; taxonomy-derived ones are added on
    /// construction when a WordNet is supplied.
    #[serde(default)]
    pub hyponyms: BTreeMap<String, HyponymLink>,
    /// Concepts whose meaning drifted away from their base (embedded apart).
    #[serde(default)]
    pub drifted: BTreeSet<String>,
    #[serde(default)]
    pub suggestions: BTreeMap<TemplateKind, BTreeMap<String, Vec<String>>>,
}

impl SimWorldConfig {
    pub fn new(appearance_threshold: f64) -> Self {
        SimWorldConfig {
            salience: BTreeMap::new(),
            modifier_bonus: BTreeMap::new(),
            depth_bonus: 0.0,
            appearance_threshold,
            seed: 0,
            hyponyms: BTreeMap::new(),
            drifted: BTreeSet::new(),
            suggestions: BTreeMap::new(),
        }
    }

    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_WORLD).expect("bundled world is valid JSON")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SimWorldConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn suggest(&mut self, kind: TemplateKind, object: &str, items: &[&str]) -> &mut Self {
        self.suggestions
            .entry(kind)
            .or_default()
            .insert(object.to_string(), items.iter().map(|s| s.to_string()).collect());
        self
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |v: f64| !(v.is_finite() && v >= 0.0);
        if let Some((k, v)) = self.salience.iter().find(|(_, v)| bad(**v)) {
            return Err(SimError::InvalidWorld(format!("salience of {k:?} is {v}")));
        }
        if let Some((k, v)) = self.modifier_bonus.iter().find(|(_, v)| bad(**v)) {
            return Err(SimError::InvalidWorld(format!("modifier bonus of {k:?} is {v}")));
        }
        if bad(self.depth_bonus) {
            return Err(SimError::InvalidWorld(format!("depth bonus {}", self.depth_bonus)));
        }
        let tau = self.appearance_threshold;
        if !(tau > 0.0 && tau < 1.0) {
            return Err(SimError::InvalidWorld(format!("appearance threshold {tau} outside (0, 1)")));
        }
        Ok(())
    }
}

fn fnv(parts: &[&str], seed: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write_u64(seed);
    for p in parts {
        h.write(p.as_bytes());
        h.write_u8(0x1f);
    }
    h.finish()
}

#[derive(Debug, Clone)]
pub struct SimWorld {
    cfg: SimWorldConfig,
    extractor: Extractor,
    families: HashMap<String, usize>,
    family_count: usize,
}

impl SimWorld {
    /// Build a world. With a taxonomy, every hyponym (to `max_depth`) of each
    /// salience concept is registered unless already registered.
    pub fn new(
        mut cfg: SimWorldConfig,
        lexicon: Arc<Lexicon>,
        taxonomy: Option<(&WordNet, usize)>,
    ) -> Result<Self, SimError> {
        cfg.validate()?;
        let extractor = Extractor::builtin(lexicon);
        let norm = |s: &str| concept_words(s, extractor.lexicon()).join(" ");
        cfg.drifted = cfg.drifted.iter().map(|d| norm(d)).collect();
        if let Some((wordnet, max_depth)) = taxonomy {
            let bases: Vec<String> = cfg.salience.keys().cloned().collect();
            for base in bases {
                let Ok(tree) = build_hyponym_tree(&base, wordnet, max_depth) else { continue };
                let mut drifted = vec![false; tree.len()];
                for (id, node) in tree.nodes().iter().enumerate().skip(1) {
                    let key = norm(&node.lemma);
                    drifted[id] = cfg.drifted.contains(&key) || node.parent.is_some_and(|p| drifted[p]);
                    if drifted[id] {
                        cfg.drifted.insert(key.clone());
                    }
                    if key != base && !cfg.salience.contains_key(&key) {
                        cfg.hyponyms.entry(key).or_insert(HyponymLink { base: base.clone(), depth: node.depth });
                    }
                }
            }
        }
        let mut families = HashMap::new();
        let mut next = 0;
        for key in cfg.salience.keys() {
            if !cfg.hyponyms.contains_key(key) {
                families.insert(key.clone(), next);
                next += 1;
            }
        }
        for (key, link) in &cfg.hyponyms {
            if cfg.drifted.contains(key) {
                continue;
            }
            let mut base = &link.base;
            for _ in 0..8 {
                match cfg.hyponyms.get(base) {
                    Some(l) => base = &l.base,
                    None => break,
                }
            }
            let fam = match families.get(base) {
                Some(&f) => f,
                None => {
                    families.insert(base.clone(), next);
                    next += 1;
                    next - 1
                }
            };
            families.insert(key.clone(), fam);
        }
        for key in &cfg.drifted {
            families.insert(key.clone(), next);
            next += 1;
        }
        Ok(SimWorld { cfg, extractor, families, family_count: next })
    }

    /// The bundled world over the bundled lexicon and WordNet fixture.
    pub fn bundled() -> Self {
        Self::new(
            SimWorldConfig::bundled(),
            Arc::new(Lexicon::bundled()),
            Some((&WordNet::bundled(), 6)),
        )
        .expect("bundled world is valid")
    }

    pub fn config(&self) -> &SimWorldConfig {
        &self.cfg
    }

    pub fn extractor(&self) -> &Extractor {
        &self.extractor
    }

    /// Canonical concept key of a text: leading determiners dropped, last
    /// word lemmatised.
    pub fn concept_key(&self, text: &str) -> String {
        let p = Prompt::new("", text, self.extractor.lexicon());
        let lex = self.extractor.lexicon();
        let skip = p.tokens.iter().take_while(|t| lex.tags(&t.lemma).contains(Pos::Det)).count();
        let rest = p.tokens[skip..].iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
        concept_words(&rest, lex).join(" ")
    }

    /// Base concept and depth of a registered hyponym.
    pub fn hyponym_link(&self, concept: &str) -> Option<&HyponymLink> {
        self.cfg.hyponyms.get(concept)
    }

    fn base_salience(&self, o: &ObjectEntity) -> f64 {
        if let Some(&s) = self.cfg.salience.get(&o.concept) {
            return s;
        }
        if let Some(link) = self.cfg.hyponyms.get(&o.concept) {
            if let Some(&s) = self.cfg.salience.get(&link.base) {
                return s;
            }
        }
        self.cfg.salience.get(&o.head_lemma).copied().unwrap_or(DEFAULT_SALIENCE)
    }

    /// Salience of `o` as it appears in `p`.
    pub fn effective_salience(&self, o: &ObjectEntity, p: &Prompt) -> f64 {
        let lex = self.extractor.lexicon();
        let concept: BTreeSet<&str> = o.concept.split(' ').collect();
        let mut s = self.base_salience(o);
        for t in &p.tokens[o.span.0..=o.span.1] {
            let tags = lex.tags(&t.lemma);
            if tags.contains(Pos::Det) || tags.contains(Pos::Conj) || concept.contains(t.lemma.as_str()) {
                continue;
            }
            let lower = t.surface.to_lowercase();
            if concept.contains(lower.as_str()) {
                continue;
            }
            s += self
                .cfg
                .modifier_bonus
                .get(&t.lemma)
                .or_else(|| self.cfg.modifier_bonus.get(&lower))
                .copied()
                .unwrap_or(0.0);
        }
        if let Some(link) = self.cfg.hyponyms.get(&o.concept) {
            s += self.cfg.depth_bonus * link.depth as f64;
        }
        s
    }

    /// Normalized attention share of every object of `p`.
    pub fn shares(&self, p: &Prompt) -> (Vec<ObjectEntity>, Vec<f64>) {
        let objects = self.extractor.extract(p).unwrap_or_default();
        let eff: Vec<f64> = objects.iter().map(|o| self.effective_salience(o, p)).collect();
        let total: f64 = eff.iter().sum();
        let shares = if total > 0.0 {
            eff.iter().map(|e| e / total).collect()
        } else {
            vec![1.0 / objects.len().max(1) as f64; objects.len()]
        };
        (objects, shares)
    }

    /// Concepts of `p` that appear in its image.
    pub fn present_in(&self, p: &Prompt) -> Vec<String> {
        let (objects, shares) = self.shares(p);
        let mut present: Vec<String> = objects
            .iter()
            .zip(&shares)
            .filter(|(_, &s)| s >= self.cfg.appearance_threshold)
            .map(|(o, _)| o.concept.clone())
            .collect();
        present.sort();
        present.dedup();
        present
    }

    /// Present concepts encoded in `image_ref`, widened with the base
    /// concepts of present hyponyms.
    pub fn present_concepts(&self, image_ref: &str) -> Result<BTreeSet<String>, BackendError> {
        let unknown = || BackendError::UnknownImageRef(image_ref.to_string());
        let mut parts = image_ref.splitn(4, ':');
        if parts.next() != Some("sim") {
            return Err(unknown());
        }
        for _ in 0..2 {
            let field = parts.next().ok_or_else(unknown)?;
            if field.len() != 16 || u64::from_str_radix(field, 16).is_err() {
                return Err(unknown());
            }
        }
        let list = parts.next().ok_or_else(unknown)?;
        let mut out = BTreeSet::new();
        for c in list.split('|').filter(|c| !c.is_empty()) {
            let mut cur = c.to_string();
            out.insert(cur.clone());
            for _ in 0..8 {
                match self.cfg.hyponyms.get(&cur) {
                    Some(link) => {
                        cur = link.base.clone();
                        out.insert(cur.clone());
                    }
                    None => break,
                }
            }
        }
        Ok(out)
    }

    fn jitter(&self, image_ref: &str, text: &str) -> f64 {
        let u = (fnv(&[image_ref, text], self.cfg.seed) >> 11) as f64 / (1u64 << 53) as f64;
        (2.0 * u - 1.0) * JITTER
    }

    fn known(&self, concept: &str) -> bool {
        self.cfg.salience.contains_key(concept) || self.cfg.hyponyms.contains_key(concept)
    }

    /// Family index used by the embedding; unregistered text has none.
    pub fn family(&self, text: &str) -> Option<usize> {
        self.families.get(&self.concept_key(text)).copied()
    }
}

impl Generator for SimWorld {
    fn generate(&self, prompt: &Prompt, seed: u64) -> Result<GenerationRecord, BackendError> {
        let (objects, shares) = self.shares(prompt);
        let mut taps: Vec<TokenAttentionPair> = (0..prompt.tokens.len())
            .map(|token_index| TokenAttentionPair { token_index, score: NON_OBJECT_SCORE })
            .collect();
        let mut present = Vec::new();
        for (o, &share) in objects.iter().zip(&shares) {
            let n = (o.span.1 - o.span.0 + 1) as f64;
            for tap in &mut taps[o.span.0..=o.span.1] {
                tap.score = share / n;
            }
            if share >= self.cfg.appearance_threshold {
                present.push(o.concept.clone());
            }
        }
        present.sort();
        present.dedup();
        let image_ref = format!(
            "sim:{seed:016x}:{:016x}:{}",
            fnv(&[&prompt.text], self.cfg.seed),
            present.join("|")
        );
        Ok(GenerationRecord { prompt_id: prompt.id.clone(), image_ref, seed, taps })
    }
}

impl Scorer for SimWorld {
    fn similarity(&self, image_ref: &str, text: &str) -> Result<f64, BackendError> {
        let present = self.present_concepts(image_ref)?;
        let score = |concept: &str| {
            let base = if present.contains(concept) { PRESENT_SIMILARITY } else { ABSENT_SIMILARITY };
            (base + self.jitter(image_ref, concept)).clamp(0.0, 1.0)
        };
        let concept = self.concept_key(text);
        if present.contains(&concept) || self.known(&concept) {
            return Ok(score(&concept));
        }
        let p = Prompt::new("", text, self.extractor.lexicon());
        let objects = self.extractor.extract(&p).unwrap_or_default();
        if objects.is_empty() {
            return Ok(BARE_TEXT_SIMILARITY);
        }
        Ok(objects.iter().map(|o| score(&o.concept)).sum::<f64>() / objects.len() as f64)
    }
}

impl Suggester for SimWorld {
    fn suggest(&self, req: &SuggestRequest<'_>) -> Result<Vec<String>, BackendError> {
        Ok(self
            .cfg
            .suggestions
            .get(&req.template)
            .and_then(|m| m.get(req.object))
            .map(|items| items.iter().flat_map(|s| split_semicolon_list(s)).collect())
            .unwrap_or_default())
    }
}

impl Embedder for SimWorld {
    fn embed(&self, text: &str) -> Result<Vec<f64>, BackendError> {
        let key = self.concept_key(text);
        let mut rng = ChaCha8Rng::seed_from_u64(fnv(&[&key], self.cfg.seed));
        let mut hashed: Vec<f64> = (0..HASH_DIM).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = hashed.iter().map(|x| x * x).sum::<f64>().sqrt();
        hashed.iter_mut().for_each(|x| *x /= norm);
        let mut v = vec![0.0; self.family_count];
        match self.families.get(&key) {
            Some(&f) => {
                v[f] = FAMILY_WEIGHT.sqrt();
                v.extend(hashed.iter().map(|x| x * (1.0 - FAMILY_WEIGHT).sqrt()));
            }
            None => v.extend(hashed),
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::cosine;

    fn world(cfg: SimWorldConfig) -> SimWorld {
        SimWorld::new(cfg, Arc::new(Lexicon::bundled()), Some((&WordNet::bundled(), 6))).unwrap()
    }

    fn two_object_world() -> SimWorld {
        let mut cfg = SimWorldConfig::new(0.3);
        cfg.salience.insert("bicycle".into(), 3.0);
        cfg.salience.insert("donut".into(), 1.0);
        cfg.modifier_bonus.insert("hollow-centered".into(), 2.0);
        cfg.drifted.insert("suspension fork".into());
        world(cfg)
    }

    fn prompt(w: &SimWorld, text: &str) -> Prompt {
        Prompt::new("p", text, w.extractor().lexicon())
    }

    #[test]
    fn shares_and_presence() {
        let w = two_object_world();
        let p = prompt(&w, "a bicycle and a donut");
        let rec = w.generate(&p, 7).unwrap();
        assert_eq!(rec.taps.len(), p.tokens.len());
        assert!((rec.taps[1].score - 0.75).abs() < 1e-12);
        assert!((rec.taps[4].score - 0.25).abs() < 1e-12);
        assert_eq!(rec.taps[0].score, NON_OBJECT_SCORE);
        let present = w.present_concepts(&rec.image_ref).unwrap();
        assert!(present.contains("bicycle") && !present.contains("donut"));

        let p = prompt(&w, "a bicycle and a hollow-centered donut");
        let (_, shares) = w.shares(&p);
        assert!((shares[0] - 0.5).abs() < 1e-12 && (shares[1] - 0.5).abs() < 1e-12);
        assert_eq!(w.present_in(&p), ["bicycle", "donut"]);
    }

    #[test]
    fn single_object_always_present() {
        let w = two_object_world();
        let p = prompt(&w, "a donut");
        assert_eq!(w.shares(&p).1, vec![1.0]);
    }

    #[test]
    fn similarity_bands() {
        let w = two_object_world();
        let rec = w.generate(&prompt(&w, "a bicycle and a donut"), 1).unwrap();
        let s = w.similarity(&rec.image_ref, "bicycle").unwrap();
        assert!((0.88..=0.92).contains(&s));
        let s2 = w.similarity(&rec.image_ref, "donut").unwrap();
        assert!((0.08..=0.12).contains(&s2));
        assert_eq!(w.similarity(&rec.image_ref, "bicycle").unwrap(), s);
        let whole = w.similarity(&rec.image_ref, "a bicycle and a donut").unwrap();
        assert!((whole - 0.5).abs() <= 0.02);
        assert_eq!(w.similarity(&rec.image_ref, "very bright").unwrap(), BARE_TEXT_SIMILARITY);
        assert!(matches!(w.similarity("bogus", "bicycle"), Err(BackendError::UnknownImageRef(_))));
    }

    #[test]
    fn hyponym_counts_as_base() {
        let w = two_object_world();
        let link = w.hyponym_link("mountain bike").unwrap();
        assert_eq!((link.base.as_str(), link.depth), ("bicycle", 1));
        let rec = w.generate(&prompt(&w, "a mountain bike and a donut"), 1).unwrap();
        assert!(w.similarity(&rec.image_ref, "bicycle").unwrap() > 0.5);
    }

    #[test]
    fn embeddings_follow_taxonomy() {
        let w = two_object_world();
        let e = |t: &str| w.embed(t).unwrap();
        assert!((cosine(&e("bicycle"), &e("bicycle")) - 1.0).abs() < 1e-9);
        let n: f64 = e("bicycle").iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-9);
        assert!(cosine(&e("bicycle"), &e("mountain bike")) >= 0.7);
        assert!(cosine(&e("bicycle"), &e("suspension fork")) <= 0.3);
        assert!(cosine(&e("bicycle"), &e("donut")) <= 0.3);
    }

    #[test]
    fn suggestions_from_bundled_world() {
        let w = SimWorld::bundled();
        let req = |t, o| SuggestRequest { template: t, object: o, prompt: None };
        assert_eq!(
            w.suggest(&req(TemplateKind::Shape, "bicycle")).unwrap(),
            ["two-wheeled bicycle", "bicycle with pedals", "bicycle with chain and gears"]
        );
        assert_eq!(w.suggest(&req(TemplateKind::Color, "apple")).unwrap(), ["red apple", "green apple"]);
        assert!(w.suggest(&req(TemplateKind::Shape, "flibbertigibbet")).unwrap().is_empty());
    }

    #[test]
    fn invalid_world_rejected() {
        let mut cfg = SimWorldConfig::new(1.0);
        assert!(SimWorld::new(cfg.clone(), Arc::new(Lexicon::bundled()), None).is_err());
        cfg.appearance_threshold = 0.3;
        cfg.salience.insert("cat".into(), -1.0);
        assert!(SimWorld::new(cfg, Arc::new(Lexicon::bundled()), None).is_err());
    }
}
