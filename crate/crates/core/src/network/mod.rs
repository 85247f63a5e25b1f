//! Directed acyclic networks: the JSON model, validation, min-cut, depth.

pub mod flow;
mod gen;

pub use gen::{butterfly, combination, lower_bound, random_dag, LowerBoundMode};

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("cycle detected through node `{0}`")]
    CycleDetected(String),
    #[error("sink `{0}` is unreachable from the source")]
    UnreachableSink(String),
    #[error("malformed ids: {0}")]
    MalformedIds(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("invalid network json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Sink,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub cap: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    pub source: String,
    pub sinks: Vec<String>,
}

/// One unit of capacity of an original edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitLink {
    /// `edge#copy`.
    pub id: String,
    pub edge: String,
    pub copy: u32,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkCut {
    pub sink: String,
    pub value: usize,
    /// Edge-disjoint paths, each a list of unit-link ids.
    pub paths: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutSpec {
    /// Minimum over sinks of the source-to-sink max-flow.
    pub value: usize,
    pub per_sink: Vec<SinkCut>,
}

impl Network {
    pub fn from_json(s: &str) -> Result<Self, NetworkError> {
        let net: Network = serde_json::from_str(s).map_err(|e| NetworkError::Json(e.to_string()))?;
        net.validate()?;
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn node_index(&self) -> HashMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    /// Largest single-link capacity.
    pub fn max_capacity(&self) -> u32 {
        self.edges.iter().map(|e| e.cap).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if n.id.is_empty() || !ids.insert(n.id.as_str()) {
                return Err(NetworkError::MalformedIds(format!("node id `{}` empty or repeated", n.id)));
            }
        }
        let sources: Vec<&NodeRecord> = self.nodes.iter().filter(|n| n.role == Role::Source).collect();
        if sources.len() != 1 || sources[0].id != self.source {
            return Err(NetworkError::MalformedIds(format!(
                "exactly one source node required and it must be `{}`",
                self.source
            )));
        }
        if self.sinks.is_empty() {
            return Err(NetworkError::MalformedIds("no sinks".into()));
        }
        let mut sink_set = HashSet::new();
        for t in &self.sinks {
            let role = self.nodes.iter().find(|n| &n.id == t).map(|n| n.role);
            if role != Some(Role::Sink) || !sink_set.insert(t.as_str()) {
                return Err(NetworkError::MalformedIds(format!("sink `{t}` missing, repeated or not a sink")));
            }
        }
        if self.nodes.iter().any(|n| n.role == Role::Sink && !sink_set.contains(n.id.as_str())) {
            return Err(NetworkError::MalformedIds("sink-role node absent from the sink list".into()));
        }
        let mut edge_ids = HashSet::new();
        for e in &self.edges {
            if e.id.is_empty() || e.id.contains('#') || !edge_ids.insert(e.id.as_str()) {
                return Err(NetworkError::MalformedIds(format!("edge id `{}` empty, repeated or contains `#`", e.id)));
            }
            if !ids.contains(e.tail.as_str()) || !ids.contains(e.head.as_str()) {
                return Err(NetworkError::MalformedIds(format!("edge `{}` references an unknown node", e.id)));
            }
            if e.cap == 0 {
                return Err(NetworkError::MalformedIds(format!("edge `{}` has zero capacity", e.id)));
            }
        }
        self.topo_order()?;
        if let Some(e) = self.edges.iter().find(|e| e.head == self.source) {
            return Err(NetworkError::MalformedIds(format!("edge `{}` enters the source", e.id)));
        }
        let depth = self.depth_map();
        for t in &self.sinks {
            if !depth.contains_key(t) {
                return Err(NetworkError::UnreachableSink(t.clone()));
            }
        }
        Ok(())
    }

    /// Topological order of node ids; ties broken by position in `nodes`.
    pub fn topo_order(&self) -> Result<Vec<String>, NetworkError> {
        let idx = self.node_index();
        let mut indeg = vec![0usize; self.nodes.len()];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            let (u, v) = (idx[e.tail.as_str()], idx[e.head.as_str()]);
            out[u].push(v);
            indeg[v] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> = (0..self.nodes.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(u) = ready.pop_first() {
            order.push(self.nodes[u].id.clone());
            for &v in &out[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.insert(v);
                }
            }
        }
        if order.len() != self.nodes.len() {
            let stuck = (0..self.nodes.len()).find(|&i| indeg[i] > 0).expect("some node on a cycle");
            return Err(NetworkError::CycleDetected(self.nodes[stuck].id.clone()));
        }
        Ok(order)
    }

    /// Capacity expansion: an edge of capacity `w` becomes `w` unit links.
    pub fn unit_links(&self) -> Vec<UnitLink> {
        self.edges
            .iter()
            .flat_map(|e| {
                (0..e.cap).map(move |k| UnitLink {
                    id: format!("{}#{k}", e.id),
                    edge: e.id.clone(),
                    copy: k,
                    tail: e.tail.clone(),
                    head: e.head.clone(),
                })
            })
            .collect()
    }

    pub fn min_cut(&self) -> CutSpec {
        let idx = self.node_index();
        let links = self.unit_links();
        let pairs: Vec<(usize, usize)> = links.iter().map(|l| (idx[l.tail.as_str()], idx[l.head.as_str()])).collect();
        let s = idx[self.source.as_str()];
        let per_sink: Vec<SinkCut> = self
            .sinks
            .iter()
            .map(|t| {
                let r = flow::max_flow(self.nodes.len(), &pairs, s, idx[t.as_str()]);
                SinkCut {
                    sink: t.clone(),
                    value: r.value,
                    paths: r.paths.iter().map(|p| p.iter().map(|&e| links[e].id.clone()).collect()).collect(),
                }
            })
            .collect();
        CutSpec { value: per_sink.iter().map(|c| c.value).min().unwrap_or(0), per_sink }
    }

    /// BFS distance in edges from the source; unreachable nodes are absent.
    pub fn depth_map(&self) -> BTreeMap<String, u32> {
        let idx = self.node_index();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out[idx[e.tail.as_str()]].push(idx[e.head.as_str()]);
        }
        let mut depth: Vec<Option<u32>> = vec![None; self.nodes.len()];
        let Some(&s) = idx.get(self.source.as_str()) else {
            return BTreeMap::new();
        };
        depth[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let d = depth[u].expect("queued nodes have a depth");
            for &v in &out[u] {
                if depth[v].is_none() {
                    depth[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        self.nodes
            .iter()
            .zip(depth)
            .filter_map(|(n, d)| d.map(|d| (n.id.clone(), d)))
            .collect()
    }

    /// Copy of the network with every edge replaced by its unit links.
    pub fn expanded(&self) -> Network {
        let edges = self
            .unit_links()
            .into_iter()
            .map(|l| EdgeRecord { id: l.id.replace('#', "_"), tail: l.tail, head: l.head, cap: 1 })
            .collect();
        Network { edges, ..self.clone() }
    }
}
