//! Degree-≤3 "virtual robust gadget" graph and local join/leave surgery.
//!
//! Every original node `v` is replaced by a gadget: one binary broadcast
//! tree per incoming unit link (leaves: one connection per outgoing link
//! plus a virtual reserve) and one inverted binary coding tree per outgoing
//! unit link (leaves: one connection per incoming link plus a reserve).
//! Connection leaves are wired so that each incoming link reaches each
//! outgoing link along exactly one path. The source is a row of source
//! copies, one per outgoing unit link.
//!
//! Node and edge ids are never reused, so coefficient maps keyed by them
//! survive surgery unchanged.

mod check;
mod surgery;

pub use check::{DegreeViolation, PathViolation};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::network::{Network, Role};

pub type VNodeId = usize;
pub type VEdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("joining `{0}` would create a cycle")]
    WouldCycle(String),
    #[error("links may not enter the source")]
    SourceInLink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    SourceCopy,
    Broadcast,
    Coding,
    Connection,
    Virtual,
    SinkCopy,
}

/// Which part of its gadget a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    In,
    Out,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VNode {
    pub kind: NodeKind,
    /// Frozen at creation.
    pub depth: u32,
    /// Original node whose gadget holds this node.
    pub origin: String,
    /// Unit link whose tree (or source copy) holds this node.
    pub link: String,
    pub side: Side,
    /// Creation index among source copies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    /// Reachable from some source copy.
    pub active: bool,
    /// Connection leaf whose partner link has left.
    pub dead: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Tree,
    Cross,
    Link,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VEdge {
    pub tail: VNodeId,
    pub head: VNodeId,
    pub kind: EdgeKind,
    /// For link edges, the unit link they carry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tree {
    root: VNodeId,
    /// Connection leaves keyed by the partner link, in link order.
    conns: Vec<(String, VNodeId)>,
    reserve: VNodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Gadget {
    role: Role,
    in_trees: Vec<(String, Tree)>,
    out_trees: Vec<(String, Tree)>,
    source_copies: Vec<(String, VNodeId)>,
}

impl Gadget {
    fn new(role: Role) -> Self {
        Self { role, in_trees: Vec::new(), out_trees: Vec::new(), source_copies: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LinkInfo {
    tail: String,
    head: String,
    edge: VEdgeId,
}

/// Reserve split performed by a join: `parent` was a reserve leaf and now
/// has children `conn` and `reserve`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Split {
    parent: VNodeId,
    reserve: VNodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualGraph {
    nodes: BTreeMap<VNodeId, VNode>,
    edges: BTreeMap<VEdgeId, VEdge>,
    ins: BTreeMap<VNodeId, BTreeSet<VEdgeId>>,
    outs: BTreeMap<VNodeId, BTreeSet<VEdgeId>>,
    gadgets: BTreeMap<String, Gadget>,
    /// Original node ids in creation order.
    gadget_order: Vec<String>,
    links: BTreeMap<String, LinkInfo>,
    /// Unit link ids in creation order; this is the wiring order.
    link_order: Vec<String>,
    /// Keyed by the connection node a split created.
    splits: BTreeMap<VNodeId, Split>,
    source: String,
    sinks: Vec<String>,
    next_node: VNodeId,
    next_edge: VEdgeId,
    next_slot: usize,
    joins: usize,
}

impl VirtualGraph {
    /// Builds the gadget graph of a validated network.
    pub fn transform(net: &Network) -> Self {
        let mut vg = VirtualGraph {
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            ins: BTreeMap::new(),
            outs: BTreeMap::new(),
            gadgets: BTreeMap::new(),
            gadget_order: Vec::new(),
            links: BTreeMap::new(),
            link_order: Vec::new(),
            splits: BTreeMap::new(),
            source: net.source.clone(),
            sinks: net.sinks.clone(),
            next_node: 0,
            next_edge: 0,
            next_slot: 0,
            joins: 0,
        };
        for n in &net.nodes {
            vg.gadgets.insert(n.id.clone(), Gadget::new(n.role));
            vg.gadget_order.push(n.id.clone());
        }
        let units = net.unit_links();
        for l in &units {
            vg.link_order.push(l.id.clone());
            vg.links.insert(l.id.clone(), LinkInfo { tail: l.tail.clone(), head: l.head.clone(), edge: usize::MAX });
        }
        for v in vg.gadget_order.clone() {
            let ins = vg.in_links(&v);
            let outs = vg.out_links(&v);
            if v == vg.source {
                for b in &outs {
                    vg.add_source_copy(b);
                }
                continue;
            }
            for a in &ins {
                vg.build_tree(&v, a, Side::In, &outs);
            }
            for b in &outs {
                vg.build_tree(&v, b, Side::Out, &ins);
            }
        }
        for v in vg.gadget_order.clone() {
            vg.wire_gadget(&v);
        }
        for l in &units {
            vg.wire_link(&l.id);
        }
        let all: BTreeSet<VNodeId> = vg.nodes.keys().copied().collect();
        vg.assign_depths(&all);
        vg.refresh_active();
        vg
    }

    // ----- construction helpers -------------------------------------------

    fn new_node(&mut self, kind: NodeKind, origin: &str, link: &str, side: Side) -> VNodeId {
        let id = self.next_node;
        self.next_node += 1;
        self.nodes.insert(
            id,
            VNode {
                kind,
                depth: 0,
                origin: origin.to_string(),
                link: link.to_string(),
                side,
                slot: None,
                active: true,
                dead: false,
            },
        );
        self.ins.insert(id, BTreeSet::new());
        self.outs.insert(id, BTreeSet::new());
        id
    }

    fn add_edge(&mut self, tail: VNodeId, head: VNodeId, kind: EdgeKind, link: Option<String>) -> VEdgeId {
        let id = self.next_edge;
        self.next_edge += 1;
        self.edges.insert(id, VEdge { tail, head, kind, link });
        self.outs.get_mut(&tail).expect("tail exists").insert(id);
        self.ins.get_mut(&head).expect("head exists").insert(id);
        id
    }

    fn remove_edge(&mut self, e: VEdgeId) {
        if let Some(edge) = self.edges.remove(&e) {
            if let Some(s) = self.outs.get_mut(&edge.tail) {
                s.remove(&e);
            }
            if let Some(s) = self.ins.get_mut(&edge.head) {
                s.remove(&e);
            }
        }
    }

    fn remove_node(&mut self, n: VNodeId) {
        let incident: Vec<VEdgeId> = self.ins[&n].iter().chain(self.outs[&n].iter()).copied().collect();
        for e in incident {
            self.remove_edge(e);
        }
        self.nodes.remove(&n);
        self.ins.remove(&n);
        self.outs.remove(&n);
    }

    fn add_source_copy(&mut self, link: &str) -> VNodeId {
        let source = self.source.clone();
        let id = self.new_node(NodeKind::SourceCopy, &source, link, Side::Source);
        self.nodes.get_mut(&id).unwrap().slot = Some(self.next_slot);
        self.next_slot += 1;
        self.gadgets.get_mut(&source).unwrap().source_copies.push((link.to_string(), id));
        id
    }

    /// Creates the tree of `link` inside gadget `v` with one connection leaf
    /// per partner link and a reserve, and registers it with the gadget.
    fn build_tree(&mut self, v: &str, link: &str, side: Side, partners: &[String]) {
        let mut leaves = Vec::with_capacity(partners.len() + 1);
        let mut conns = Vec::with_capacity(partners.len());
        for p in partners {
            let c = self.new_node(NodeKind::Connection, v, link, side);
            conns.push((p.clone(), c));
            leaves.push(c);
        }
        let reserve = self.new_node(NodeKind::Virtual, v, link, side);
        leaves.push(reserve);
        let internal = if side == Side::In { NodeKind::Broadcast } else { NodeKind::Coding };
        let root = if leaves.len() == 1 {
            let r = self.new_node(NodeKind::Broadcast, v, link, side);
            self.tree_edge(r, reserve, side);
            r
        } else {
            self.build_subtree(&leaves, internal, v, link, side)
        };
        let is_sink = self.gadgets[v].role == Role::Sink;
        if side == Side::In && is_sink {
            self.nodes.get_mut(&root).unwrap().kind = NodeKind::SinkCopy;
        }
        let tree = Tree { root, conns, reserve };
        let g = self.gadgets.get_mut(v).unwrap();
        match side {
            Side::In => g.in_trees.push((link.to_string(), tree)),
            Side::Out => g.out_trees.push((link.to_string(), tree)),
            Side::Source => unreachable!(),
        }
    }

    /// Left-leaning balanced tree: the left subtree takes ⌈L/2⌉ leaves.
    fn build_subtree(&mut self, leaves: &[VNodeId], kind: NodeKind, v: &str, link: &str, side: Side) -> VNodeId {
        if leaves.len() == 1 {
            return leaves[0];
        }
        let k = leaves.len().div_ceil(2);
        let left = self.build_subtree(&leaves[..k], kind, v, link, side);
        let right = self.build_subtree(&leaves[k..], kind, v, link, side);
        let n = self.new_node(kind, v, link, side);
        self.tree_edge(n, left, side);
        self.tree_edge(n, right, side);
        n
    }

    /// Tree edge oriented away from the root on the in side, towards it on
    /// the out side.
    fn tree_edge(&mut self, parent: VNodeId, child: VNodeId, side: Side) {
        match side {
            Side::Out => self.add_edge(child, parent, EdgeKind::Tree, None),
            _ => self.add_edge(parent, child, EdgeKind::Tree, None),
        };
    }

    /// Cross edges of gadget `v`: in-tree(a) leaf for b → out-tree(b) leaf for a.
    fn wire_gadget(&mut self, v: &str) {
        let g = self.gadgets[v].clone();
        for (a, tin) in &g.in_trees {
            for (b, cin) in &tin.conns {
                let tout = &g.out_trees.iter().find(|(l, _)| l == b).expect("out tree").1;
                let cout = tout.conns.iter().find(|(l, _)| l == a).expect("matching leaf").1;
                self.add_edge(*cin, cout, EdgeKind::Cross, None);
            }
        }
    }

    fn wire_link(&mut self, link: &str) {
        let info = self.links[link].clone();
        let from = self.link_emitter(&info.tail, link);
        let to = self.tree(&info.head, link, Side::In).root;
        let e = self.add_edge(from, to, EdgeKind::Link, Some(link.to_string()));
        self.links.get_mut(link).unwrap().edge = e;
    }

    fn link_emitter(&self, tail: &str, link: &str) -> VNodeId {
        let g = &self.gadgets[tail];
        if tail == self.source {
            g.source_copies.iter().find(|(l, _)| l == link).expect("source copy").1
        } else {
            self.tree(tail, link, Side::Out).root
        }
    }

    fn tree(&self, v: &str, link: &str, side: Side) -> &Tree {
        let g = &self.gadgets[v];
        let list = if side == Side::In { &g.in_trees } else { &g.out_trees };
        &list.iter().find(|(l, _)| l == link).expect("tree exists").1
    }

    fn tree_mut(&mut self, v: &str, link: &str, side: Side) -> &mut Tree {
        let g = self.gadgets.get_mut(v).expect("gadget exists");
        let list = if side == Side::In { &mut g.in_trees } else { &mut g.out_trees };
        &mut list.iter_mut().find(|(l, _)| l == link).expect("tree exists").1
    }

    fn in_links(&self, v: &str) -> Vec<String> {
        self.link_order.iter().filter(|l| self.links[*l].head == v).cloned().collect()
    }

    fn out_links(&self, v: &str) -> Vec<String> {
        self.link_order.iter().filter(|l| self.links[*l].tail == v).cloned().collect()
    }

    /// Sets the depth of every node in `targets` from a BFS over the current
    /// graph. Targets the BFS misses take the smallest depth among their
    /// successors, or 0.
    fn assign_depths(&mut self, targets: &BTreeSet<VNodeId>) {
        let dist = self.bfs_from_sources();
        for &n in targets {
            if let Some(&d) = dist.get(&n) {
                self.nodes.get_mut(&n).unwrap().depth = d;
            }
        }
        let order = self.topo_order();
        for &n in order.iter().rev() {
            if !targets.contains(&n) || dist.contains_key(&n) {
                continue;
            }
            let d = self.outs[&n].iter().map(|e| self.nodes[&self.edges[e].head].depth).min().unwrap_or(0);
            self.nodes.get_mut(&n).unwrap().depth = d;
        }
    }

    fn bfs_from_sources(&self) -> BTreeMap<VNodeId, u32> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for (&n, node) in &self.nodes {
            if node.kind == NodeKind::SourceCopy {
                dist.insert(n, 0);
                queue.push_back(n);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            for e in &self.outs[&u] {
                let v = self.edges[e].head;
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(v) {
                    slot.insert(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn refresh_active(&mut self) {
        let reach = self.bfs_from_sources();
        for (n, node) in self.nodes.iter_mut() {
            node.active = reach.contains_key(n);
        }
    }

    // ----- queries ---------------------------------------------------------

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn sinks(&self) -> &[String] {
        &self.sinks
    }

    pub fn node(&self, n: VNodeId) -> Option<&VNode> {
        self.nodes.get(&n)
    }

    pub fn edge(&self, e: VEdgeId) -> Option<&VEdge> {
        self.edges.get(&e)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (VNodeId, &VNode)> {
        self.nodes.iter().map(|(&k, v)| (k, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (VEdgeId, &VEdge)> {
        self.edges.iter().map(|(&k, v)| (k, v))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Incoming edge ids of `n`, ascending.
    pub fn in_edges(&self, n: VNodeId) -> Vec<VEdgeId> {
        self.ins.get(&n).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    pub fn out_edges(&self, n: VNodeId) -> Vec<VEdgeId> {
        self.outs.get(&n).map(|s| s.iter().copied().collect()).unwrap_or_default()
    }

    /// Original node ids in creation order.
    pub fn original_nodes(&self) -> &[String] {
        &self.gadget_order
    }

    pub fn has_original(&self, v: &str) -> bool {
        self.gadgets.contains_key(v)
    }

    /// Unit link ids in wiring order.
    pub fn link_ids(&self) -> &[String] {
        &self.link_order
    }

    /// `(tail, head, link edge)` of a unit link.
    pub fn link(&self, id: &str) -> Option<(&str, &str, VEdgeId)> {
        self.links.get(id).map(|l| (l.tail.as_str(), l.head.as_str(), l.edge))
    }

    /// Virtual edges realising each unit link.
    pub fn provenance(&self) -> BTreeMap<String, Vec<VEdgeId>> {
        self.links.iter().map(|(k, l)| (k.clone(), vec![l.edge])).collect()
    }

    /// Source copies in slot order.
    pub fn source_copies(&self) -> Vec<VNodeId> {
        let mut v: Vec<(usize, VNodeId)> =
            self.nodes.iter().filter_map(|(&n, node)| node.slot.map(|s| (s, n))).collect();
        v.sort();
        v.into_iter().map(|(_, n)| n).collect()
    }

    /// Link edges entering sink `t`, in wiring order.
    pub fn sink_inputs(&self, t: &str) -> Vec<VEdgeId> {
        self.in_links(t).iter().map(|l| self.links[l].edge).collect()
    }

    /// All nodes in a deterministic topological order.
    pub fn topo_order(&self) -> Vec<VNodeId> {
        let mut indeg: BTreeMap<VNodeId, usize> = self.ins.iter().map(|(&n, s)| (n, s.len())).collect();
        let mut ready: BTreeSet<VNodeId> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| n).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for e in &self.outs[&u] {
                let v = self.edges[e].head;
                let d = indeg.get_mut(&v).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(v);
                }
            }
        }
        assert_eq!(order.len(), self.nodes.len(), "virtual graph must stay acyclic");
        order
    }

    /// Coding nodes that are reachable from the source.
    pub fn active_coding_nodes(&self) -> Vec<VNodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Coding && n.active)
            .map(|(&k, _)| k)
            .collect()
    }

    /// Nodes of the gadget of original node `v`.
    pub fn gadget_nodes(&self, v: &str) -> Vec<VNodeId> {
        self.nodes.iter().filter(|(_, n)| n.origin == v).map(|(&k, _)| k).collect()
    }

    /// Number of joins performed so far.
    pub fn join_count(&self) -> usize {
        self.joins
    }
}
