use std::collections::BTreeMap;

use serde::Serialize;

use super::{NodeKind, Side, VEdge, VNode, VNodeId, VirtualGraph};
use crate::network::flow::max_flow;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub node: VNodeId,
    pub kind: NodeKind,
    pub indegree: usize,
    pub outdegree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathViolation {
    pub gadget: String,
    pub in_link: String,
    pub out_link: String,
    pub paths: u64,
}

fn degree_ok(node: &VNode, i: usize, o: usize) -> bool {
    match node.kind {
        NodeKind::SourceCopy => i == 0 && (1..=2).contains(&o),
        NodeKind::Coding => i == 2 && o == 1,
        NodeKind::Broadcast | NodeKind::SinkCopy => i == 1 && o <= 2,
        NodeKind::Connection => (i == 1 && o <= 2) || (i == 0 && o == 1),
        NodeKind::Virtual => (i == 1 && o == 0) || (i == 0 && o == 1),
    }
}

#[derive(Serialize)]
struct ExportNode<'a> {
    id: String,
    role: &'static str,
    #[serde(flatten)]
    node: &'a VNode,
}

#[derive(Serialize)]
struct ExportEdge<'a> {
    id: String,
    tail: String,
    head: String,
    cap: u32,
    #[serde(flatten)]
    edge: &'a VEdge,
}

#[derive(Serialize)]
struct Export<'a> {
    nodes: Vec<ExportNode<'a>>,
    edges: Vec<ExportEdge<'a>>,
    source: &'a str,
    sinks: &'a [String],
    provenance: BTreeMap<String, Vec<String>>,
}

impl VirtualGraph {
    /// Nodes whose (in, out) degree is not allowed for their kind.
    pub fn degree_violations(&self) -> Vec<DegreeViolation> {
        self.nodes
            .iter()
            .filter_map(|(&n, node)| {
                let (i, o) = (self.ins[&n].len(), self.outs[&n].len());
                (!degree_ok(node, i, o)).then_some(DegreeViolation { node: n, kind: node.kind, indegree: i, outdegree: o })
            })
            .collect()
    }

    /// Gadget link pairs not joined by exactly one path inside the gadget,
    /// plus trees whose reserve is missing (reported with `paths = 0` and
    /// an empty partner).
    pub fn path_violations(&self) -> Vec<PathViolation> {
        let order = self.topo_order();
        let mut out = Vec::new();
        for (v, g) in &self.gadgets {
            for (side, trees) in [(Side::In, &g.in_trees), (Side::Out, &g.out_trees)] {
                for (l, t) in trees {
                    let r = &self.nodes[&t.reserve];
                    let leaf = match side {
                        Side::In => self.outs[&t.reserve].is_empty(),
                        _ => self.ins[&t.reserve].is_empty(),
                    };
                    if r.kind != NodeKind::Virtual || !leaf {
                        out.push(PathViolation { gadget: v.clone(), in_link: l.clone(), out_link: String::new(), paths: 0 });
                    }
                }
            }
            for (a, tin) in &g.in_trees {
                let counts = self.count_paths_within(v, tin.root, &order);
                for (b, tout) in &g.out_trees {
                    let paths = counts.get(&tout.root).copied().unwrap_or(0);
                    if paths != 1 {
                        out.push(PathViolation { gadget: v.clone(), in_link: a.clone(), out_link: b.clone(), paths });
                    }
                }
            }
        }
        out
    }

    fn count_paths_within(&self, v: &str, from: VNodeId, order: &[VNodeId]) -> BTreeMap<VNodeId, u64> {
        let mut count = BTreeMap::from([(from, 1u64)]);
        for &u in order {
            let Some(&c) = count.get(&u) else { continue };
            for e in &self.outs[&u] {
                let h = self.edges[e].head;
                if self.nodes[&h].origin == v {
                    *count.entry(h).or_insert(0) += c;
                }
            }
        }
        count
    }

    /// Unit max-flow from the source copies to each sink's input links;
    /// the minimum over sinks.
    pub fn min_cut(&self) -> usize {
        self.sink_cuts().into_iter().map(|(_, c)| c).min().unwrap_or(0)
    }

    pub fn sink_cuts(&self) -> Vec<(String, usize)> {
        let index: BTreeMap<VNodeId, usize> = self.nodes.keys().enumerate().map(|(i, &n)| (n, i)).collect();
        let n = index.len();
        let (s, t) = (n, n + 1);
        let mut pairs: Vec<(usize, usize)> = self.edges.values().map(|e| (index[&e.tail], index[&e.head])).collect();
        for c in self.source_copies() {
            pairs.push((s, index[&c]));
        }
        let base = pairs.len();
        self.sinks
            .iter()
            .map(|sink| {
                pairs.truncate(base);
                for e in self.sink_inputs(sink) {
                    pairs.push((index[&self.edges[&e].head], t));
                }
                (sink.clone(), max_flow(n + 2, &pairs, s, t).value)
            })
            .collect()
    }

    /// JSON in the network schema, extended with kind, depth and origin.
    pub fn to_json(&self) -> String {
        let nodes = self
            .nodes
            .iter()
            .map(|(&n, node)| ExportNode {
                id: format!("n{n}"),
                role: match node.kind {
                    NodeKind::SourceCopy => "source",
                    NodeKind::SinkCopy => "sink",
                    _ => "internal",
                },
                node,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(&e, edge)| ExportEdge {
                id: format!("x{e}"),
                tail: format!("n{}", edge.tail),
                head: format!("n{}", edge.head),
                cap: 1,
                edge,
            })
            .collect();
        let provenance = self
            .provenance()
            .into_iter()
            .map(|(l, es)| (l, es.into_iter().map(|e| format!("x{e}")).collect()))
            .collect();
        let export = Export { nodes, edges, source: &self.source, sinks: &self.sinks, provenance };
        serde_json::to_string_pretty(&export).expect("virtual graph serializes")
    }
}
