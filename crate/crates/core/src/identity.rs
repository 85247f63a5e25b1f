//! Prefix-free node IDs with reserved slots, and Cantor labelling.
//!
//! Every node owns an *area*, a binary prefix. Its ID is `area + "0"`;
//! its children live under `area + "1"`. A node with `m` children at
//! assignment time gives child `k` the area `area + "1" + bin(k, w)` with
//! `w` the bit length of `m`, and keeps slot `m` as its reserve. Later
//! arrivals consume the reserve `r`: the newcomer gets area `r + "0"` and
//! the reserve moves to `r + "1"`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("unknown parent `{0}`")]
    UnknownParent(String),
    #[error("key already has an id")]
    AlreadyAssigned,
    #[error("tuple length {0} outside 1..=5")]
    TupleLength(usize),
}

/// A binary string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(bits: impl Into<String>) -> Self {
        let bits = bits.into();
        assert!(bits.bytes().all(|b| b == b'0' || b == b'1'), "ids are binary strings");
        NodeId(bits)
    }

    pub fn bits(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The integer with binary expansion `1` followed by the bits.
    pub fn as_int(&self) -> BigUint {
        let mut v = BigUint::one();
        for b in self.0.bytes() {
            v <<= 1u32;
            if b == b'1' {
                v += 1u32;
            }
        }
        v
    }

    pub fn is_prefix_of(&self, other: &NodeId) -> bool {
        other.0.starts_with(&self.0)
    }

    fn child(&self, suffix: &str) -> NodeId {
        NodeId(format!("{}{}", self.0, suffix))
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.0)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub key: String,
    pub parent: Option<String>,
    pub id: NodeId,
}

/// Assigned IDs keyed by node, with each node's reserve and an append-only log.
#[derive(Debug, Clone)]
pub struct IdRegistry<K: Ord + Clone> {
    area: BTreeMap<K, NodeId>,
    reserve: BTreeMap<K, NodeId>,
    log: Vec<LogEntry>,
}

impl<K: Ord + Clone + fmt::Debug> IdRegistry<K> {
    fn empty() -> Self {
        Self { area: BTreeMap::new(), reserve: BTreeMap::new(), log: Vec::new() }
    }

    pub fn id(&self, k: &K) -> Option<NodeId> {
        self.area.get(k).map(|a| a.child("0"))
    }

    pub fn contains(&self, k: &K) -> bool {
        self.area.contains_key(k)
    }

    pub fn len(&self) -> usize {
        self.area.len()
    }

    pub fn is_empty(&self) -> bool {
        self.area.is_empty()
    }

    pub fn ids(&self) -> Vec<NodeId> {
        self.area.values().map(|a| a.child("0")).collect()
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    fn record(&mut self, key: K, parent: Option<&K>, area: NodeId) {
        self.log.push(LogEntry {
            key: format!("{key:?}"),
            parent: parent.map(|p| format!("{p:?}")),
            id: area.child("0"),
        });
        self.area.insert(key, area);
    }

    /// Gives `key` an ID under `parent`, consuming the parent's reserve.
    pub fn assign_new(&mut self, parent: &K, key: K) -> Result<NodeId, IdentityError> {
        if self.area.contains_key(&key) {
            return Err(IdentityError::AlreadyAssigned);
        }
        let parent_area = self.area.get(parent).ok_or_else(|| IdentityError::UnknownParent(format!("{parent:?}")))?;
        let r = self.reserve.get(parent).cloned().unwrap_or_else(|| parent_area.child("1"));
        self.reserve.insert(parent.clone(), r.child("1"));
        self.reserve.entry(key.clone()).or_insert_with(|| r.child("01"));
        self.record(key.clone(), Some(parent), r.child("0"));
        Ok(self.id(&key).expect("just assigned"))
    }

    /// True when no assigned ID is a prefix of another.
    pub fn is_prefix_free(&self) -> bool {
        let mut ids = self.ids();
        ids.sort();
        // Anything sorting between a string and one of its extensions is
        // itself an extension, so adjacent pairs suffice.
        ids.windows(2).all(|w| !w[0].is_prefix_of(&w[1]))
    }
}

/// Assigns IDs over a BFS spanning tree rooted at `root`. Each node's tree
/// parent is its in-neighbour one layer up with the smallest ID. Nodes the
/// BFS never reaches attach under their smallest-ID neighbour that already
/// has one (or the root).
pub fn assign_ids<K: Ord + Clone + fmt::Debug>(root: &K, nodes: &[K], edges: &[(K, K)]) -> IdRegistry<K> {
    let mut out: BTreeMap<&K, Vec<&K>> = BTreeMap::new();
    let mut inn: BTreeMap<&K, Vec<&K>> = BTreeMap::new();
    for (u, v) in edges {
        out.entry(u).or_default().push(v);
        inn.entry(v).or_default().push(u);
    }
    let mut reg = IdRegistry::empty();
    reg.record(root.clone(), None, NodeId::new(""));
    let mut layer = vec![root.clone()];
    let mut seen: BTreeSet<K> = BTreeSet::from([root.clone()]);
    while !layer.is_empty() {
        let layer_set: BTreeSet<&K> = layer.iter().collect();
        let mut next: BTreeSet<K> = BTreeSet::new();
        for u in &layer {
            for v in out.get(u).into_iter().flatten() {
                if !seen.contains(*v) {
                    next.insert((*v).clone());
                }
            }
        }
        let mut children: BTreeMap<K, Vec<K>> = BTreeMap::new();
        for v in &next {
            let parent = inn[v]
                .iter()
                .filter(|p| layer_set.contains(**p))
                .min_by_key(|p| reg.id(p).expect("layer has ids").as_int())
                .expect("BFS child has a parent in the previous layer");
            children.entry((*parent).clone()).or_default().push(v.clone());
        }
        for (p, kids) in children {
            give_children(&mut reg, &p, &kids);
        }
        seen.extend(next.iter().cloned());
        layer = next.into_iter().collect();
    }
    // Stragglers: attach to the smallest-ID neighbour that already has an ID.
    let mut pending: VecDeque<K> = nodes.iter().filter(|k| !reg.contains(k)).cloned().collect();
    let mut stalled = 0;
    while let Some(k) = pending.pop_front() {
        let neighbour = inn
            .get(&k)
            .into_iter()
            .flatten()
            .chain(out.get(&k).into_iter().flatten())
            .filter(|n| reg.contains(n))
            .min_by_key(|n| reg.id(n).unwrap().as_int())
            .map(|n| (*n).clone());
        match neighbour {
            Some(p) => {
                reg.assign_new(&p, k).expect("fresh key");
                stalled = 0;
            }
            None if stalled > pending.len() => {
                reg.assign_new(root, k).expect("fresh key");
                stalled = 0;
            }
            None => {
                pending.push_back(k);
                stalled += 1;
            }
        }
    }
    reg
}

fn give_children<K: Ord + Clone + fmt::Debug>(reg: &mut IdRegistry<K>, parent: &K, kids: &[K]) {
    let base = reg.area[parent].child("1");
    let m = kids.len();
    let w = (usize::BITS - m.leading_zeros()) as usize;
    let slot = |k: usize| if w == 0 { String::new() } else { format!("{k:0w$b}") };
    for (k, kid) in kids.iter().enumerate() {
        reg.record(kid.clone(), Some(parent), base.child(&slot(k)));
    }
    reg.reserve.insert(parent.clone(), base.child(&slot(m)));
}

/// π(x, y) = (x + y)(x + y + 1)/2 + y.
pub fn cantor_pair(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    ((&s * (&s + 1u32)) >> 1u32) + y
}

pub fn cantor_unpair(n: &BigUint) -> (BigUint, BigUint) {
    // w = ⌊(√(8n + 1) − 1) / 2⌋ is the diagonal holding n.
    let w = ((n * 8u32 + 1u32).sqrt() - 1u32) >> 1u32;
    let t = (&w * (&w + 1u32)) >> 1u32;
    let y = n - t;
    let x = w - &y;
    (x, y)
}

/// Left fold of the pairing: K(a, b, c) = π(π(a, b), c).
pub fn cantor_tuple(v: &[BigUint]) -> Result<BigUint, IdentityError> {
    if v.is_empty() || v.len() > 5 {
        return Err(IdentityError::TupleLength(v.len()));
    }
    Ok(v[1..].iter().fold(v[0].clone(), |acc, x| cantor_pair(&acc, x)))
}

pub fn cantor_untuple(n: &BigUint, k: usize) -> Result<Vec<BigUint>, IdentityError> {
    if k == 0 || k > 5 {
        return Err(IdentityError::TupleLength(k));
    }
    let mut out = Vec::with_capacity(k);
    let mut cur = n.clone();
    for _ in 1..k {
        let (x, y) = cantor_unpair(&cur);
        out.push(y);
        cur = x;
    }
    out.push(cur);
    out.reverse();
    Ok(out)
}

/// Convenience for small arguments.
pub fn cantor_tuple_u64(v: &[u64]) -> Result<BigUint, IdentityError> {
    cantor_tuple(&v.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>())
}
