//! Unit-capacity max-flow with edge-disjoint path extraction.

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: usize,
    /// Edge-disjoint `s → t` paths as lists of edge indices.
    pub paths: Vec<Vec<usize>>,
}

/// Max-flow from `s` to `t` where every edge `(tail, head)` has capacity one.
///
/// Edmonds-Karp: BFS for a shortest augmenting path in the residual graph,
/// repeated until none exists.
pub fn max_flow(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> FlowResult {
    if s == t {
        return FlowResult { value: 0, paths: Vec::new() };
    }
    // Residual arcs: forward arc of edge e is 2e, backward arc is 2e+1.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push(2 * e);
        adj[v].push(2 * e + 1);
    }
    let mut flow = vec![false; edges.len()];
    let arc_ends = |arc: usize| {
        let (u, v) = edges[arc / 2];
        if arc.is_multiple_of(2) { (u, v) } else { (v, u) }
    };
    let mut value = 0;
    loop {
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &arc in &adj[u] {
                let usable = if arc % 2 == 0 { !flow[arc / 2] } else { flow[arc / 2] };
                let (_, v) = arc_ends(arc);
                if usable && !seen[v] {
                    seen[v] = true;
                    via[v] = Some(arc);
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            break;
        }
        let mut v = t;
        while let Some(arc) = via[v] {
            flow[arc / 2] = arc % 2 == 0;
            v = arc_ends(arc).0;
        }
        value += 1;
    }
    FlowResult { value, paths: decompose(n, edges, &flow, s, t, value) }
}

fn decompose(n: usize, edges: &[(usize, usize)], flow: &[bool], s: usize, t: usize, value: usize) -> Vec<Vec<usize>> {
    let mut out_flow: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(u, _)) in edges.iter().enumerate().rev() {
        if flow[e] {
            out_flow[u].push(e);
        }
    }
    let mut paths = Vec::with_capacity(value);
    for _ in 0..value {
        let mut path = Vec::new();
        let mut u = s;
        let mut guard = 0;
        while u != t {
            let e = out_flow[u].pop().expect("flow conservation");
            path.push(e);
            u = edges[e].1;
            guard += 1;
            assert!(guard <= edges.len(), "flow contains a cycle");
        }
        paths.push(path);
    }
    paths
}
