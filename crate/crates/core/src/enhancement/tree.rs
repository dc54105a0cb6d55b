//! Hyponym trees and similarity pruning.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::wordnet::{WordNet, WordNetError};
use crate::backends::{cosine, BackendError, Embedder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponymNode {
    pub lemma: String,
    pub synset_id: String,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub sim_to_root: Option<f64>,
    pub pruned: bool,
}

/// Arena-backed tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyponymTree {
    nodes: Vec<HyponymNode>,
}

impl HyponymTree {
    pub fn single(lemma: impl Into<String>, synset_id: impl Into<String>) -> Self {
        HyponymTree {
            nodes: vec![HyponymNode {
                lemma: lemma.into(),
                synset_id: synset_id.into(),
                depth: 0,
                parent: None,
                children: Vec::new(),
                sim_to_root: None,
                pruned: false,
            }],
        }
    }

    /// Append a child of `parent` and return its id.
    pub fn add_child(&mut self, parent: usize, lemma: impl Into<String>, synset_id: impl Into<String>) -> usize {
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(HyponymNode {
            lemma: lemma.into(),
            synset_id: synset_id.into(),
            depth,
            parent: Some(parent),
            children: Vec::new(),
            sim_to_root: None,
            pruned: false,
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn root(&self) -> &HyponymNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &HyponymNode {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: usize) -> &mut HyponymNode {
        &mut self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[HyponymNode] {
        &self.nodes
    }

    pub fn find(&self, lemma: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.lemma == lemma)
    }

    /// Other children of the node's parent, in order.
    pub fn siblings(&self, id: usize) -> Vec<usize> {
        match self.nodes[id].parent {
            Some(p) => self.nodes[p].children.iter().copied().filter(|&c| c != id).collect(),
            None => Vec::new(),
        }
    }

    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.nodes[id].children.iter().rev().copied().collect();
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev().copied());
        }
        out
    }

    /// Non-root nodes that survived pruning.
    pub fn unpruned_count(&self) -> usize {
        self.nodes.iter().skip(1).filter(|n| !n.pruned).count()
    }

    /// Structural and pruning invariant violations, as messages.
    pub fn violations(&self, threshold: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return vec!["tree has no root".into()];
        }
        if self.nodes[0].parent.is_some() || self.nodes[0].depth != 0 {
            out.push("root has a parent or non-zero depth".into());
        }
        if self.nodes[0].pruned {
            out.push("root is pruned".into());
        }
        for (id, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                let child = &self.nodes[c];
                if child.parent != Some(id) {
                    out.push(format!("node {c} does not point back to parent {id}"));
                }
                if child.depth != n.depth + 1 {
                    out.push(format!("node {c} depth {} under depth {}", child.depth, n.depth));
                }
                if n.pruned && !child.pruned {
                    out.push(format!("node {c} retained under pruned node {id}"));
                }
            }
            if id > 0 && !n.pruned {
                if let Some(t) = threshold {
                    match n.sim_to_root {
                        Some(s) if s >= t => {}
                        other => out.push(format!("retained node {id} has similarity {other:?} below {t}")),
                    }
                }
            }
        }
        out
    }
}

/// All hyponyms of the first noun sense of `lemma`, breadth first, down to
/// `max_depth`. A synset reachable along several paths appears once.
pub fn build_hyponym_tree(lemma: &str, wordnet: &WordNet, max_depth: usize) -> Result<HyponymTree, WordNetError> {
    let first = *wordnet
        .noun_senses(lemma)
        .first()
        .ok_or_else(|| WordNetError::LemmaNotFound(lemma.to_string()))?;
    let root = wordnet.synset(first).ok_or_else(|| WordNetError::LemmaNotFound(lemma.to_string()))?;
    let mut tree = HyponymTree::single(lemma.trim().replace('_', " "), root.id());
    let mut seen = HashSet::from([first]);
    let mut queue = VecDeque::from([(0usize, first)]);
    while let Some((id, offset)) = queue.pop_front() {
        if tree.node(id).depth >= max_depth {
            continue;
        }
        let Some(synset) = wordnet.synset(offset) else { continue };
        for &h in &synset.hyponyms {
            if !seen.insert(h) {
                continue;
            }
            if let Some(child) = wordnet.synset(h) {
                let cid = tree.add_child(id, child.lemma(), child.id());
                queue.push_back((cid, h));
            }
        }
    }
    Ok(tree)
}

/// Breadth-first pruning: a node whose embedding cosine to the root falls
/// below `threshold` is pruned together with its whole subtree.
pub fn prune_tree(mut tree: HyponymTree, embedder: &dyn Embedder, threshold: f64) -> Result<HyponymTree, BackendError> {
    let mut cache: HashMap<String, Vec<f64>> = HashMap::new();
    let mut embed = |text: &str| -> Result<Vec<f64>, BackendError> {
        if let Some(v) = cache.get(text) {
            return Ok(v.clone());
        }
        let v = embedder.embed(text)?;
        cache.insert(text.to_string(), v.clone());
        Ok(v)
    };
    let root_vec = embed(&tree.root().lemma)?;
    tree.node_mut(0).sim_to_root = Some(1.0);
    tree.node_mut(0).pruned = false;
    let mut queue: VecDeque<usize> = tree.root().children.iter().copied().collect();
    while let Some(id) = queue.pop_front() {
        let v = embed(&tree.node(id).lemma)?;
        let sim = cosine(&v, &root_vec).clamp(-1.0, 1.0);
        tree.node_mut(id).sim_to_root = Some(sim);
        if sim < threshold {
            tree.node_mut(id).pruned = true;
            for d in tree.descendants(id) {
                tree.node_mut(d).pruned = true;
            }
        } else {
            tree.node_mut(id).pruned = false;
            queue.extend(tree.node(id).children.iter().copied());
        }
    }
    Ok(tree)
}
