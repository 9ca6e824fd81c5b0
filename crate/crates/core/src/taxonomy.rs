//! Per-POS hypernym DAG with memoized hypernym sets, depths, shortest
//! paths and least common subsumers.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph;
use crate::wordnet::{Database, PartOfSpeech, SynsetId};

/// Offset reserved for the synthetic verb root.
pub const VIRTUAL_ROOT_OFFSET: u32 = u32::MAX;
/// Display name of the synthetic verb root.
pub const VIRTUAL_ROOT_NAME: &str = "*root*.v";
/// Name of the noun root synset.
pub const NOUN_ROOT_NAME: &str = "entity.n.01";

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclePolicy {
    /// Fail with [`Error::CycleDetected`].
    Reject,
    /// Drop the edges closing each cycle, found by a depth-first walk in
    /// ascending offset order, and log them.
    BreakBackEdges,
}

#[derive(Debug, Clone, Copy)]
pub struct TaxonomyOptions {
    pub include_instance_hypernyms: bool,
    pub cycle_policy: CyclePolicy,
}

impl Default for TaxonomyOptions {
    fn default() -> Self {
        TaxonomyOptions {
            include_instance_hypernyms: true,
            cycle_policy: CyclePolicy::Reject,
        }
    }
}

impl TaxonomyOptions {
    /// Settings for the released WordNet files, which contain a verb cycle.
    pub fn wordnet() -> Self {
        TaxonomyOptions {
            include_instance_hypernyms: true,
            cycle_policy: CyclePolicy::BreakBackEdges,
        }
    }
}

/// H_a: every synset reachable through one or more hypernym edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypernymClosure {
    pub members: BTreeSet<SynsetId>,
}

/// S_a = H_a ∪ {a}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypernymSet {
    pub members: BTreeSet<SynsetId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepresentationSets {
    pub common: BTreeSet<SynsetId>,
    pub unique_a: BTreeSet<SynsetId>,
    pub unique_b: BTreeSet<SynsetId>,
}

/// Sizes of the representation sets: `alpha = |S_a \ S_b|`,
/// `beta = |S_b \ S_a|`, `gamma = |S_a ∩ S_b|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HisScalars {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

impl HisScalars {
    pub fn new(alpha: u32, beta: u32, gamma: u32) -> Self {
        HisScalars { alpha, beta, gamma }
    }

    pub fn swapped(self) -> Self {
        HisScalars::new(self.beta, self.alpha, self.gamma)
    }

    pub fn total(self) -> u32 {
        self.alpha + self.beta + self.gamma
    }
}

#[derive(Debug)]
pub struct Taxonomy {
    pos: PartOfSpeech,
    ids: Vec<SynsetId>,
    names: Vec<String>,
    dense: HashMap<SynsetId, u32>,
    name_index: HashMap<String, u32>,
    parents: Vec<Vec<u32>>,
    children: Vec<Vec<u32>>,
    root: Option<u32>,
    depth: Vec<u32>,
    max_depth: Vec<u32>,
    hypernym_sets: Vec<OnceLock<Box<[u32]>>>,
    removed_edges: Vec<(SynsetId, SynsetId)>,
}

/// Builds the hypernym DAG of one part of speech.
pub fn build_taxonomy(db: &Database, pos: PartOfSpeech, options: TaxonomyOptions) -> Result<Taxonomy> {
    let nodes = db
        .synsets_of(pos)
        .map(|s| {
            let mut parents = s.direct_hypernyms.clone();
            if options.include_instance_hypernyms {
                parents.extend(&s.instance_hypernyms);
            }
            Ok((s.id, db.canonical_name(s.id)?.to_string(), parents))
        })
        .collect::<Result<Vec<_>>>()?;
    Taxonomy::from_nodes(pos, nodes, options.cycle_policy)
}

impl Taxonomy {
    /// `nodes` holds `(id, canonical name, parents)`; parents outside the
    /// node set are an error.
    pub fn from_nodes(
        pos: PartOfSpeech,
        mut nodes: Vec<(SynsetId, String, Vec<SynsetId>)>,
        cycle_policy: CyclePolicy,
    ) -> Result<Taxonomy> {
        nodes.sort_by_key(|(id, _, _)| *id);
        let mut dense = HashMap::with_capacity(nodes.len());
        for (i, (id, _, _)) in nodes.iter().enumerate() {
            if id.pos != pos {
                return Err(Error::CrossPos(pos, id.pos));
            }
            if dense.insert(*id, i as u32).is_some() {
                return Err(Error::Inconsistent(format!("duplicate node {id}")));
            }
        }
        let mut parents = Vec::with_capacity(nodes.len());
        for (id, _, ps) in &nodes {
            let mut list = Vec::with_capacity(ps.len());
            for p in ps {
                let &pi = dense
                    .get(p)
                    .ok_or_else(|| Error::DanglingPointer(format!("hypernym {p} of {id}")))?;
                if !list.contains(&pi) {
                    list.push(pi);
                }
            }
            list.sort_unstable();
            parents.push(list);
        }
        let ids: Vec<SynsetId> = nodes.iter().map(|(id, _, _)| *id).collect();
        let names: Vec<String> = nodes.into_iter().map(|(_, name, _)| name).collect();

        let mut removed_edges = Vec::new();
        match cycle_policy {
            CyclePolicy::Reject => {
                if let Some(cycle) = graph::find_cycle(&parents) {
                    let witness = cycle.iter().map(|&i| names[i as usize].clone()).collect();
                    return Err(Error::CycleDetected { witness });
                }
            }
            CyclePolicy::BreakBackEdges => {
                for (c, p) in graph::break_back_edges(&mut parents) {
                    log::info!(
                        "dropping hypernym edge {} -> {} to break a cycle",
                        names[c as usize],
                        names[p as usize]
                    );
                    removed_edges.push((ids[c as usize], ids[p as usize]));
                }
            }
        }

        let n = ids.len();
        let mut children = vec![Vec::new(); n];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p as usize].push(c as u32);
            }
        }
        let name_index: HashMap<String, u32> = names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i as u32))
            .collect();
        let root = match pos {
            PartOfSpeech::Noun => name_index.get(NOUN_ROOT_NAME).copied(),
            PartOfSpeech::Verb => None,
        };

        let mut taxonomy = Taxonomy {
            pos,
            ids,
            names,
            dense,
            name_index,
            parents,
            children,
            root,
            depth: Vec::new(),
            max_depth: Vec::new(),
            hypernym_sets: (0..n).map(|_| OnceLock::new()).collect(),
            removed_edges,
        };
        taxonomy.compute_depths();
        let unreachable = taxonomy.depth.iter().filter(|&&d| d == UNREACHABLE).count();
        if unreachable > 0 {
            log::warn!("{unreachable} {pos} synsets cannot reach {NOUN_ROOT_NAME}");
        }
        Ok(taxonomy)
    }

    /// Parents-before-children order.
    fn topological_order(&self) -> Vec<u32> {
        let n = self.ids.len();
        let mut pending: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<u32> = (0..n as u32).filter(|&i| pending[i as usize] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(node) = queue.pop_front() {
            order.push(node);
            for &c in &self.children[node as usize] {
                pending[c as usize] -= 1;
                if pending[c as usize] == 0 {
                    queue.push_back(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "taxonomy must be acyclic");
        order
    }

    fn compute_depths(&mut self) {
        let n = self.ids.len();
        let mut depth = vec![UNREACHABLE; n];
        let mut max_depth = vec![0u32; n];
        for node in self.topological_order() {
            let i = node as usize;
            let ps = &self.parents[i];
            if ps.is_empty() {
                depth[i] = match (self.pos, self.root) {
                    (PartOfSpeech::Verb, _) => 1,
                    (PartOfSpeech::Noun, Some(r)) if r != node => UNREACHABLE,
                    (PartOfSpeech::Noun, _) => 0,
                };
            } else {
                let best = ps.iter().map(|&p| depth[p as usize]).min().unwrap_or(UNREACHABLE);
                depth[i] = if best == UNREACHABLE { UNREACHABLE } else { best + 1 };
                max_depth[i] = 1 + ps.iter().map(|&p| max_depth[p as usize]).max().unwrap_or(0);
            }
        }
        self.depth = depth;
        self.max_depth = max_depth;
    }

    pub fn pos(&self) -> PartOfSpeech {
        self.pos
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in ascending offset order.
    pub fn ids(&self) -> &[SynsetId] {
        &self.ids
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.dense.contains_key(&id)
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Edges dropped by [`CyclePolicy::BreakBackEdges`], as `(child, parent)`.
    pub fn removed_edges(&self) -> &[(SynsetId, SynsetId)] {
        &self.removed_edges
    }

    pub fn virtual_root(&self) -> Option<SynsetId> {
        (self.pos == PartOfSpeech::Verb).then(|| SynsetId::new(PartOfSpeech::Verb, VIRTUAL_ROOT_OFFSET))
    }

    pub fn name(&self, id: SynsetId) -> Result<&str> {
        if Some(id) == self.virtual_root() {
            return Ok(VIRTUAL_ROOT_NAME);
        }
        Ok(&self.names[self.index_of(id)? as usize])
    }

    pub fn resolve(&self, name: &str) -> Result<SynsetId> {
        self.name_index
            .get(name)
            .map(|&i| self.ids[i as usize])
            .ok_or_else(|| Error::UnknownSynset(name.to_string()))
    }

    pub(crate) fn index_of(&self, id: SynsetId) -> Result<u32> {
        if id.pos != self.pos {
            return Err(Error::CrossPos(self.pos, id.pos));
        }
        self.dense
            .get(&id)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    pub(crate) fn id_at(&self, index: u32) -> SynsetId {
        self.ids[index as usize]
    }

    pub(crate) fn name_at(&self, index: u32) -> &str {
        &self.names[index as usize]
    }

    pub(crate) fn parents_at(&self, index: u32) -> &[u32] {
        &self.parents[index as usize]
    }

    pub fn direct_hypernyms(&self, id: SynsetId) -> Result<Vec<SynsetId>> {
        let i = self.index_of(id)?;
        Ok(self.parents[i as usize].iter().map(|&p| self.id_at(p)).collect())
    }

    /// Sorted dense indices of S_a, memoized.
    pub(crate) fn set_at(&self, index: u32) -> &[u32] {
        self.hypernym_sets[index as usize].get_or_init(|| {
            let mut seen = vec![index];
            let mut stack = vec![index];
            while let Some(node) = stack.pop() {
                for &p in &self.parents[node as usize] {
                    if !seen.contains(&p) {
                        seen.push(p);
                        stack.push(p);
                    }
                }
            }
            seen.sort_unstable();
            seen.into_boxed_slice()
        })
    }

    fn to_ids(&self, indices: impl IntoIterator<Item = u32>) -> BTreeSet<SynsetId> {
        indices.into_iter().map(|i| self.id_at(i)).collect()
    }

    pub fn hypernym_closure(&self, id: SynsetId) -> Result<HypernymClosure> {
        let i = self.index_of(id)?;
        let members = self.to_ids(self.set_at(i).iter().copied().filter(|&x| x != i));
        Ok(HypernymClosure { members })
    }

    pub fn hypernym_set(&self, id: SynsetId) -> Result<HypernymSet> {
        let i = self.index_of(id)?;
        Ok(HypernymSet {
            members: self.to_ids(self.set_at(i).iter().copied()),
        })
    }

    pub fn representation_sets(&self, a: SynsetId, b: SynsetId) -> Result<RepresentationSets> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let (sa, sb) = (self.set_at(ia), self.set_at(ib));
        let common: Vec<u32> = sa.iter().copied().filter(|x| sb.binary_search(x).is_ok()).collect();
        Ok(RepresentationSets {
            unique_a: self.to_ids(sa.iter().copied().filter(|x| common.binary_search(x).is_err())),
            unique_b: self.to_ids(sb.iter().copied().filter(|x| common.binary_search(x).is_err())),
            common: self.to_ids(common),
        })
    }

    pub fn his_scalars(&self, a: SynsetId, b: SynsetId) -> Result<HisScalars> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.scalars_at(ia, ib))
    }

    pub(crate) fn scalars_at(&self, a: u32, b: u32) -> HisScalars {
        let (sa, sb) = (self.set_at(a), self.set_at(b));
        let gamma = sorted_intersection_len(sa, sb) as u32;
        HisScalars::new(sa.len() as u32 - gamma, sb.len() as u32 - gamma, gamma)
    }

    /// Fewest hypernym edges to the root: entity.n.01 for nouns (or any
    /// parentless node when the taxonomy has no entity.n.01), the virtual
    /// root for verbs.
    pub fn depth(&self, id: SynsetId) -> Result<u32> {
        if Some(id) == self.virtual_root() {
            return Ok(0);
        }
        let i = self.index_of(id)?;
        self.depth_at(i).ok_or(Error::Unreachable(id))
    }

    pub(crate) fn depth_at(&self, index: u32) -> Option<u32> {
        let d = self.depth[index as usize];
        (d != UNREACHABLE).then_some(d)
    }

    /// Longest hypernym path to a parentless synset, virtual root excluded.
    pub fn max_depth(&self, id: SynsetId) -> Result<u32> {
        Ok(self.max_depth[self.index_of(id)? as usize])
    }

    pub(crate) fn max_depth_at(&self, index: u32) -> u32 {
        self.max_depth[index as usize]
    }

    /// Largest [`Taxonomy::max_depth`] over all nodes, plus one for the
    /// virtual root edge on verbs.
    pub fn taxonomy_depth(&self) -> u32 {
        let deepest = self.max_depth.iter().copied().max().unwrap_or(0);
        match self.pos {
            PartOfSpeech::Noun => deepest,
            PartOfSpeech::Verb => deepest + 1,
        }
    }

    /// Edge distances from `index` to every member of its hypernym set.
    pub(crate) fn up_distances(&self, index: u32) -> Vec<(u32, u32)> {
        let mut dist = vec![(index, 0u32)];
        let mut queue = VecDeque::from([(index, 0u32)]);
        while let Some((node, d)) = queue.pop_front() {
            for &p in &self.parents[node as usize] {
                if !dist.iter().any(|&(x, _)| x == p) {
                    dist.push((p, d + 1));
                    queue.push_back((p, d + 1));
                }
            }
        }
        dist
    }

    /// Edge count of the shortest up-down path through a common hypernym
    /// (or the virtual root for verbs), plus one.
    pub fn shortest_path_length(&self, a: SynsetId, b: SynsetId) -> Result<u32> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.path_edges_at(ia, ib)
            .map(|edges| edges + 1)
            .ok_or_else(|| Error::DegenerateInput(format!("no common hypernym between {a} and {b}")))
    }

    pub(crate) fn path_edges_at(&self, a: u32, b: u32) -> Option<u32> {
        if a == b {
            return Some(0);
        }
        let da = self.up_distances(a);
        let db = self.up_distances(b);
        let mut best = da
            .iter()
            .filter_map(|&(x, dx)| db.iter().find(|&&(y, _)| y == x).map(|&(_, dy)| dx + dy))
            .min();
        if self.pos == PartOfSpeech::Verb {
            let via_root = self.depth[a as usize] + self.depth[b as usize];
            best = Some(best.map_or(via_root, |d| d.min(via_root)));
        }
        best
    }

    /// Deepest member of S_a ∩ S_b by longest root path, ties to the
    /// smaller offset.
    pub fn lcs(&self, a: SynsetId, b: SynsetId) -> Result<Option<SynsetId>> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.lcs_at(ia, ib).map(|i| self.id_at(i)))
    }

    pub(crate) fn lcs_at(&self, a: u32, b: u32) -> Option<u32> {
        let sb = self.set_at(b);
        // dense indices ascend with offset, so the first maximum wins ties
        let mut best: Option<(u32, u32)> = None;
        for &x in self.set_at(a).iter().filter(|x| sb.binary_search(x).is_ok()) {
            let d = self.max_depth[x as usize];
            let d = if d == UNREACHABLE { 0 } else { d };
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((x, d));
            }
        }
        best.map(|(x, _)| x)
    }

    /// Every synset with `id` in its hypernym closure.
    pub fn descendants(&self, id: SynsetId) -> Result<Vec<SynsetId>> {
        let i = self.index_of(id)?;
        let mut seen = vec![false; self.len()];
        let mut stack = vec![i];
        let mut out = Vec::new();
        while let Some(node) = stack.pop() {
            for &c in &self.children[node as usize] {
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    out.push(self.id_at(c));
                    stack.push(c);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The taxonomy restricted to `root` and its descendants; edges leaving
    /// that set are dropped, so `root` becomes the only parentless node.
    pub fn subtaxonomy(&self, root: SynsetId) -> Result<Taxonomy> {
        let mut keep = self.descendants(root)?;
        keep.push(root);
        let kept: std::collections::HashSet<SynsetId> = keep.iter().copied().collect();
        let nodes = keep
            .iter()
            .map(|&id| {
                let i = self.dense[&id];
                let parents = self.parents[i as usize]
                    .iter()
                    .map(|&p| self.id_at(p))
                    .filter(|p| kept.contains(p))
                    .collect();
                (id, self.names[i as usize].clone(), parents)
            })
            .collect();
        Taxonomy::from_nodes(self.pos, nodes, CyclePolicy::Reject)
    }
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::parse_edge_list;

    fn fixture(text: &str, pos: PartOfSpeech) -> (Database, Taxonomy) {
        let db = parse_edge_list(text).unwrap();
        let t = build_taxonomy(&db, pos, TaxonomyOptions::default()).unwrap();
        (db, t)
    }

    fn id(db: &Database, name: &str) -> SynsetId {
        db.resolve_name(name).unwrap()
    }

    fn names(db: &Database, set: &BTreeSet<SynsetId>) -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&i| db.canonical_name(i).unwrap().to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn minimal_dag() {
        let (db, t) = fixture("a.n\nb.n\nb.n -> a.n", PartOfSpeech::Noun);
        assert_eq!(t.len(), 2);
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.virtual_root(), None);
        assert_eq!(t.depth(id(&db, "a.n.01")).unwrap(), 0);
        assert_eq!(t.depth(id(&db, "b.n.01")).unwrap(), 1);
    }

    #[test]
    fn cycle_is_rejected_or_broken() {
        let nodes = |_: ()| {
            let a = SynsetId::new(PartOfSpeech::Noun, 1);
            let b = SynsetId::new(PartOfSpeech::Noun, 2);
            vec![(a, "a.n.01".to_string(), vec![b]), (b, "b.n.01".to_string(), vec![a])]
        };
        let err = Taxonomy::from_nodes(PartOfSpeech::Noun, nodes(()), CyclePolicy::Reject).unwrap_err();
        match err {
            Error::CycleDetected { witness } => assert_eq!(witness, ["a.n.01", "b.n.01", "a.n.01"]),
            other => panic!("unexpected {other}"),
        }
        let t = Taxonomy::from_nodes(PartOfSpeech::Noun, nodes(()), CyclePolicy::BreakBackEdges).unwrap();
        assert_eq!(t.edge_count(), 1);
        assert_eq!(
            t.removed_edges(),
            [(
                SynsetId::new(PartOfSpeech::Noun, 2),
                SynsetId::new(PartOfSpeech::Noun, 1)
            )]
        );
    }

    #[test]
    fn chain_closure_and_sets() {
        let (db, t) = fixture("a.n\nb.n\nc.n\nc.n -> b.n\nb.n -> a.n", PartOfSpeech::Noun);
        let (a, b, c) = (id(&db, "a.n.01"), id(&db, "b.n.01"), id(&db, "c.n.01"));
        assert_eq!(t.hypernym_closure(c).unwrap().members, BTreeSet::from([a, b]));
        assert_eq!(t.hypernym_set(c).unwrap().members, BTreeSet::from([a, b, c]));
        assert!(t.hypernym_closure(a).unwrap().members.is_empty());
        assert_eq!(t.hypernym_set(a).unwrap().members, BTreeSet::from([a]));
        // hypernym degeneracy: b ∈ H_c
        assert_eq!(t.his_scalars(c, b).unwrap(), HisScalars::new(1, 0, 2));
    }

    #[test]
    fn siblings() {
        let (db, t) = fixture("a.n\nb.n\nc.n\nb.n -> a.n\nc.n -> a.n", PartOfSpeech::Noun);
        let (a, b, c) = (id(&db, "a.n.01"), id(&db, "b.n.01"), id(&db, "c.n.01"));
        let sets = t.representation_sets(b, c).unwrap();
        assert_eq!(sets.common, BTreeSet::from([a]));
        assert_eq!(sets.unique_a, BTreeSet::from([b]));
        assert_eq!(sets.unique_b, BTreeSet::from([c]));
        assert_eq!(t.his_scalars(b, c).unwrap(), HisScalars::new(1, 1, 1));
        assert_eq!(t.shortest_path_length(b, c).unwrap(), 3);
        assert_eq!(t.lcs(b, c).unwrap(), Some(a));
        assert_eq!(names(&db, &sets.common), ["a.n.01"]);
    }

    #[test]
    fn identity_pair() {
        let (db, t) = fixture("a.n\nb.n\nb.n -> a.n", PartOfSpeech::Noun);
        let b = id(&db, "b.n.01");
        let sets = t.representation_sets(b, b).unwrap();
        assert_eq!(sets.common, t.hypernym_set(b).unwrap().members);
        assert!(sets.unique_a.is_empty() && sets.unique_b.is_empty());
        assert_eq!(t.his_scalars(b, b).unwrap(), HisScalars::new(0, 0, 2));
        assert_eq!(t.shortest_path_length(b, b).unwrap(), 1);
        assert_eq!(t.lcs(b, b).unwrap(), Some(b));
    }

    #[test]
    fn verb_roots_meet_at_the_virtual_root() {
        let (db, t) = fixture("x.v\ny.v\nz.v\nz.v -> y.v", PartOfSpeech::Verb);
        let (x, y, z) = (id(&db, "x.v.01"), id(&db, "y.v.01"), id(&db, "z.v.01"));
        let root = t.virtual_root().unwrap();
        assert_eq!(t.depth(root).unwrap(), 0);
        assert_eq!(t.depth(x).unwrap(), 1);
        assert_eq!(t.depth(z).unwrap(), 2);
        assert_eq!(t.his_scalars(x, y).unwrap(), HisScalars::new(1, 1, 0));
        assert_eq!(t.his_scalars(x, z).unwrap(), HisScalars::new(1, 2, 0));
        assert_eq!(t.shortest_path_length(x, y).unwrap(), 3);
        assert_eq!(t.shortest_path_length(x, z).unwrap(), 4);
        assert_eq!(t.lcs(x, y).unwrap(), None);
        assert!(!t.hypernym_set(x).unwrap().members.contains(&root));
        assert_eq!(t.name(root).unwrap(), VIRTUAL_ROOT_NAME);
    }

    #[test]
    fn multiple_parents_union() {
        let text = "r.n\np.n\nq.n\nc.n\np.n -> r.n\nq.n -> r.n\nc.n -> p.n\nc.n -> q.n\n";
        let (db, t) = fixture(text, PartOfSpeech::Noun);
        let c = id(&db, "c.n.01");
        assert_eq!(t.hypernym_set(c).unwrap().members.len(), 4);
        assert_eq!(t.depth(c).unwrap(), 2);
        assert_eq!(t.max_depth(c).unwrap(), 2);
        // p and q tie in depth; the smaller offset wins
        assert_eq!(t.lcs(c, c).unwrap(), Some(c));
        let p = id(&db, "p.n.01");
        let q = id(&db, "q.n.01");
        assert_eq!(t.lcs(p, q).unwrap(), Some(id(&db, "r.n.01")));
        let d = t.descendants(id(&db, "r.n.01")).unwrap();
        assert_eq!(d, vec![p, q, c]);
    }

    #[test]
    fn lcs_ties_go_to_smaller_offset() {
        let text = "r.n\np.n\nq.n\nc.n\nd.n\np.n -> r.n\nq.n -> r.n\nc.n -> p.n\nc.n -> q.n\nd.n -> p.n\nd.n -> q.n\n";
        let (db, t) = fixture(text, PartOfSpeech::Noun);
        assert_eq!(
            t.lcs(id(&db, "c.n.01"), id(&db, "d.n.01")).unwrap(),
            Some(id(&db, "p.n.01"))
        );
    }

    #[test]
    fn entity_root_governs_noun_depth() {
        let text = "entity.n\nthing.n\nstray.n\nthing.n -> entity.n\n";
        let (db, t) = fixture(text, PartOfSpeech::Noun);
        assert_eq!(t.depth(id(&db, "thing.n.01")).unwrap(), 1);
        assert!(matches!(t.depth(id(&db, "stray.n.01")), Err(Error::Unreachable(_))));
    }

    #[test]
    fn unknown_and_cross_pos() {
        let (db, t) = fixture("a.n\ngo.v", PartOfSpeech::Noun);
        assert!(matches!(
            t.hypernym_set(SynsetId::new(PartOfSpeech::Noun, 99)),
            Err(Error::UnknownSynset(_))
        ));
        assert!(matches!(
            t.his_scalars(id(&db, "a.n.01"), id(&db, "go.v.01")),
            Err(Error::CrossPos(..))
        ));
    }

    #[test]
    fn subtaxonomy_keeps_descendants() {
        let text =
            "top.n\nmid.n\nleaf.n\nother.n\nmid.n -> top.n\nleaf.n -> mid.n\nleaf.n -> other.n\nother.n -> top.n\n";
        let (db, t) = fixture(text, PartOfSpeech::Noun);
        let sub = t.subtaxonomy(id(&db, "mid.n.01")).unwrap();
        assert_eq!(sub.len(), 2);
        let leaf = id(&db, "leaf.n.01");
        assert_eq!(sub.hypernym_set(leaf).unwrap().members.len(), 2);
        assert_eq!(sub.depth(leaf).unwrap(), 1);
        assert_eq!(sub.resolve("leaf.n.01").unwrap(), leaf);
    }
}
