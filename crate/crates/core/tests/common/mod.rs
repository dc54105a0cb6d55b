//! Synthetic benchmark worlds for integration tests.
//!
//! Each case has one weak object that the simulator leaves out of the image
//! and a known way to bring it back: a color modifier, a direct hyponym, or
//! a grandchild hyponym reached past a decoy branch.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use patcher_core::backends::sim::{HyponymLink, SimWorld, SimWorldConfig};
use patcher_core::backends::TemplateKind;
use patcher_core::dataset::{PromptRecord, Source};
use patcher_core::enhancement::WordNet;
use patcher_core::extraction::Extractor;
use patcher_core::lexicon::Lexicon;

const BUNDLED_LEXICON: &str = include_str!("../../data/lexicon.tsv");

pub const TAU: f64 = 0.25;
pub const DEPTH_BONUS: f64 = 0.1;
pub const WEAK: f64 = 0.2;
pub const DECOY: f64 = 0.02;
pub const DIM: f64 = 0.01;
pub const APEX: f64 = 0.5;
pub const PAIR_STRONG: f64 = 1.0;
pub const TRIPLE_STRONG: f64 = 0.5;
pub const BRIGHT_BONUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fix {
    /// Second color suggestion carries a salient modifier.
    Modifier,
    /// The first hyponym already appears.
    DirectHyponym,
    /// Decoy child (worse attention) with three children, then an
    /// improving child whose own child appears.
    DeepHyponym,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub fix: Fix,
    pub weak: String,
    pub strong: Vec<String>,
    pub record: PromptRecord,
}

pub struct Suite {
    pub lexicon: Arc<Lexicon>,
    pub extractor: Extractor,
    pub wordnet: WordNet,
    pub world: SimWorld,
    pub cases: Vec<Case>,
    /// Every replacement of each weak word the pipeline can try.
    pub candidates: BTreeMap<String, Vec<Candidate>>,
    pub salience: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub phrase: String,
    pub salience: f64,
    pub bonus: f64,
}

/// Two-letter tag; the alphabet skips "s" so no word looks like a plural.
fn alpha(i: usize) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrtuvwxyz";
    let n = ALPHABET.len();
    [ALPHABET[i % n], ALPHABET[(i / n) % n]].iter().map(|&b| b as char).collect()
}

struct Taxonomy {
    index: Vec<String>,
    data: Vec<String>,
    next: u64,
}

impl Taxonomy {
    fn new() -> Self {
        Taxonomy { index: Vec::new(), data: Vec::new(), next: 100 }
    }

    fn alloc(&mut self) -> u64 {
        self.next += 1;
        self.next
    }

    fn synset(&mut self, offset: u64, word: &str, children: &[u64]) {
        let ptrs: String = children.iter().map(|c| format!(" ~ {c:08} n 0000")).collect();
        self.data.push(format!("{offset:08} 05 n 01 {word} 0 {:03}{ptrs} | synthetic", children.len()));
        self.index.push(format!("{word} n 1 1 ~ 1 0 {offset:08}"));
    }
}

/// Build `n` cases cycling through `mix`. Cases alternate between two- and
/// three-object prompts; every weak word is used by exactly one case.
pub fn build_suite(n: usize, mix: &[Fix]) -> Suite {
    build_suite_with(n, mix, |_, _| Vec::new())
}

/// As [`build_suite`], with LLM rewrite suggestions per case.
pub fn build_suite_with(n: usize, mix: &[Fix], rewrites: impl Fn(&Case, &BTreeMap<&str, String>) -> Vec<String>) -> Suite {
    let mut lex = String::from(BUNDLED_LEXICON);
    lex.push_str("\ncrimson\tADJ\npale\tADJ\nwith\tOTHER\n");
    let mut cfg = SimWorldConfig::new(TAU);
    cfg.depth_bonus = DEPTH_BONUS;
    cfg.seed = 7;
    cfg.modifier_bonus.insert("crimson".into(), BRIGHT_BONUS);
    let mut tax = Taxonomy::new();
    let mut cases = Vec::new();
    let mut candidates = BTreeMap::new();
    let mut names_per_case = Vec::new();

    for i in 0..n {
        let a = alpha(i);
        let fix = mix[i % mix.len()];
        let weak = format!("weak{a}");
        let mut noun = |w: &str| {
            lex.push_str(w);
            lex.push_str("\tNOUN\n");
        };
        noun(&weak);
        cfg.salience.insert(weak.clone(), WEAK);
        let mut names: BTreeMap<&str, String> = BTreeMap::new();
        let mut cands = Vec::new();
        let link = |depth| HyponymLink { base: weak.clone(), depth };
        match fix {
            Fix::Modifier => {
                let pale = format!("pale {weak}");
                let crimson = format!("crimson {weak}");
                cfg.suggest(TemplateKind::Color, &weak, &[&format!("{pale}; {crimson}")]);
                cands.push(Candidate { phrase: pale, salience: WEAK, bonus: 0.0 });
                cands.push(Candidate { phrase: crimson, salience: WEAK, bonus: BRIGHT_BONUS });
            }
            Fix::DirectHyponym => {
                let apex = format!("apex{a}");
                noun(&apex);
                cfg.salience.insert(apex.clone(), APEX);
                cfg.hyponyms.insert(apex.clone(), link(1));
                let (root, child) = (tax.alloc(), tax.alloc());
                tax.synset(child, &apex, &[]);
                tax.synset(root, &weak, &[child]);
                cands.push(Candidate { phrase: apex.clone(), salience: APEX, bonus: DEPTH_BONUS });
                names.insert("apex", apex);
            }
            Fix::DeepHyponym => {
                let decoy = format!("dull{a}");
                let good = format!("keen{a}");
                let apex = format!("apex{a}");
                let dims: Vec<String> = (0..3).map(|k| format!("dim{a}{}", alpha(k))).collect();
                for w in [&decoy, &good, &apex].into_iter().chain(&dims) {
                    noun(w);
                }
                cfg.salience.insert(decoy.clone(), DECOY);
                cfg.salience.insert(apex.clone(), APEX);
                cfg.hyponyms.insert(decoy.clone(), link(1));
                cfg.hyponyms.insert(good.clone(), link(1));
                cfg.hyponyms.insert(apex.clone(), link(2));
                for d in &dims {
                    cfg.salience.insert(d.clone(), DIM);
                    cfg.hyponyms.insert(d.clone(), link(2));
                }
                let root = tax.alloc();
                let (o_decoy, o_good, o_apex) = (tax.alloc(), tax.alloc(), tax.alloc());
                let o_dims: Vec<u64> = dims.iter().map(|_| tax.alloc()).collect();
                for (d, &o) in dims.iter().zip(&o_dims) {
                    tax.synset(o, d, &[]);
                }
                tax.synset(o_apex, &apex, &[]);
                tax.synset(o_good, &good, &[o_apex]);
                tax.synset(o_decoy, &decoy, &o_dims);
                tax.synset(root, &weak, &[o_decoy, o_good]);
                cands.push(Candidate { phrase: decoy.clone(), salience: DECOY, bonus: DEPTH_BONUS });
                cands.push(Candidate { phrase: good.clone(), salience: WEAK, bonus: DEPTH_BONUS });
                for d in &dims {
                    cands.push(Candidate { phrase: d.clone(), salience: DIM, bonus: 2.0 * DEPTH_BONUS });
                }
                cands.push(Candidate { phrase: apex.clone(), salience: APEX, bonus: 2.0 * DEPTH_BONUS });
                names.insert("decoy", decoy);
                names.insert("good", good);
                names.insert("apex", apex);
            }
        }
        let triple = i % 2 == 1;
        let strong: Vec<String> = if triple {
            vec![format!("calm{a}"), format!("cozy{a}")]
        } else {
            vec![format!("bold{a}")]
        };
        for s in &strong {
            noun(s);
            cfg.salience.insert(s.clone(), if triple { TRIPLE_STRONG } else { PAIR_STRONG });
        }
        let (text, source) = if triple {
            (format!("a {} with a {} and a {weak}", strong[0], strong[1]), Source::ThreeOp)
        } else if i % 4 == 0 {
            (format!("a {weak} and a {}", strong[0]), Source::TwOp)
        } else {
            (format!("a {} and a {weak}", strong[0]), Source::TwOp)
        };
        let mut objects = strong.clone();
        objects.push(weak.clone());
        objects.sort();
        let record = PromptRecord::new(format!("case{i:03}"), text, objects, source);
        candidates.insert(weak.clone(), cands);
        cases.push(Case { fix, weak, strong, record });
        names_per_case.push(names);
    }
    for (case, names) in cases.iter().zip(&names_per_case) {
        let items = rewrites(case, names);
        if !items.is_empty() {
            let refs: Vec<&str> = items.iter().map(String::as_str).collect();
            cfg.suggest(TemplateKind::LlmRepair, &case.weak, &[&refs.join("; ")]);
        }
    }

    let lexicon = Arc::new(Lexicon::parse(&lex).expect("synthetic lexicon parses"));
    let wordnet = WordNet::parse(&tax.index.join("\n"), &tax.data.join("\n")).expect("synthetic taxonomy parses");
    let salience = cfg.salience.clone();
    let world = SimWorld::new(cfg, lexicon.clone(), Some((&wordnet, 6))).expect("synthetic world is valid");
    let extractor = Extractor::builtin(lexicon.clone());
    Suite { lexicon, extractor, wordnet, world, cases, candidates, salience }
}

impl Suite {
    pub fn records(&self) -> Vec<PromptRecord> {
        self.cases.iter().map(|c| c.record.clone()).collect()
    }

    /// Independent arithmetic: does replacing the weak object by `cand`
    /// bring every object of the case above the appearance threshold?
    pub fn candidate_repairs(&self, case: &Case, cand: &Candidate) -> bool {
        let strong: Vec<f64> = case.strong.iter().map(|s| self.salience[s]).collect();
        let weak = cand.salience + cand.bonus;
        let total: f64 = strong.iter().sum::<f64>() + weak;
        let all_present = strong.iter().chain([&weak]).all(|e| e / total >= TAU);
        all_present
    }

    /// The unrepaired prompt must leave the weak object out and keep the
    /// others.
    pub fn baseline_neglects_weak(&self, case: &Case) -> bool {
        let strong: Vec<f64> = case.strong.iter().map(|s| self.salience[s]).collect();
        let total: f64 = strong.iter().sum::<f64>() + WEAK;
        WEAK / total < TAU && strong.iter().all(|s| s / total >= TAU)
    }
}
