//! Deterministic network generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeRecord, Network, NetworkError, NodeRecord, Role};

fn node(id: impl Into<String>, role: Role) -> NodeRecord {
    NodeRecord { id: id.into(), role }
}

fn edge(id: impl Into<String>, tail: &str, head: &str, cap: u32) -> EdgeRecord {
    EdgeRecord { id: id.into(), tail: tail.into(), head: head.into(), cap }
}

/// The classical butterfly: two sinks, min-cut 2, one bottleneck edge `c → d`.
pub fn butterfly() -> Network {
    let nodes = vec![
        node("s", Role::Source),
        node("a", Role::Internal),
        node("b", Role::Internal),
        node("c", Role::Internal),
        node("d", Role::Internal),
        node("t1", Role::Sink),
        node("t2", Role::Sink),
    ];
    let edges = [
        ("sa", "s", "a"),
        ("sb", "s", "b"),
        ("ac", "a", "c"),
        ("bc", "b", "c"),
        ("cd", "c", "d"),
        ("at1", "a", "t1"),
        ("bt2", "b", "t2"),
        ("dt1", "d", "t1"),
        ("dt2", "d", "t2"),
    ]
    .into_iter()
    .map(|(id, t, h)| edge(id, t, h, 1))
    .collect();
    Network { nodes, edges, source: "s".into(), sinks: vec!["t1".into(), "t2".into()] }
}

/// Random DAG on `n_nodes` nodes: `s`, internal `v1..`, sinks `t1..` last.
///
/// Every forward pair (non-sink tail) gets a unit edge with probability
/// `edge_prob`. Afterwards each sink whose min-cut falls short of `min_cut`
/// receives direct `s → t` unit edges (`x…`) until it reaches it.
pub fn random_dag(
    seed: u64,
    n_nodes: usize,
    edge_prob: f64,
    n_sinks: usize,
    min_cut: usize,
) -> Result<Network, NetworkError> {
    if n_sinks == 0 || n_nodes < n_sinks + 1 {
        return Err(NetworkError::ParameterOutOfRange(format!(
            "need at least one sink and a source: n_nodes={n_nodes}, n_sinks={n_sinks}"
        )));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(NetworkError::ParameterOutOfRange(format!("edge_prob={edge_prob}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_internal = n_nodes - 1 - n_sinks;
    let mut nodes = vec![node("s", Role::Source)];
    nodes.extend((1..=n_internal).map(|i| node(format!("v{i}"), Role::Internal)));
    nodes.extend((1..=n_sinks).map(|i| node(format!("t{i}"), Role::Sink)));
    let first_sink = 1 + n_internal;
    let mut edges = Vec::new();
    for i in 0..first_sink {
        for j in i + 1..n_nodes {
            if rng.gen_bool(edge_prob) {
                edges.push(edge(format!("e{}", edges.len()), &nodes[i].id, &nodes[j].id, 1));
            }
        }
    }
    let sinks: Vec<String> = nodes[first_sink..].iter().map(|n| n.id.clone()).collect();
    let mut net = Network { nodes, edges, source: "s".into(), sinks };
    let mut extra = 0;
    let cut = net.min_cut();
    for sc in &cut.per_sink {
        for _ in sc.value..min_cut {
            net.edges.push(edge(format!("x{extra}"), "s", &sc.sink, 1));
            extra += 1;
        }
    }
    net.validate()?;
    Ok(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundMode {
    /// One sink for every pair of forwarding nodes.
    ManySinks,
    /// A single sink on the pair `(v_i, v_j)`.
    OneSink(usize, usize),
}

/// Binary tree of capacity-2 links and depth `depth` rooted at the source,
/// whose `2^depth` leaves `v0, v1, …` are the forwarding nodes; sinks hang
/// off pairs of forwarding nodes by unit links.
pub fn lower_bound(depth: u32, mode: LowerBoundMode) -> Result<Network, NetworkError> {
    if !(1..=8).contains(&depth) {
        return Err(NetworkError::ParameterOutOfRange(format!("depth={depth} (allowed 1..=8)")));
    }
    let leaves = 1usize << depth;
    let name = |level: u32, i: usize| {
        if level == 0 {
            "s".to_string()
        } else if level == depth {
            format!("v{i}")
        } else {
            format!("n{level}_{i}")
        }
    };
    let mut nodes = vec![node("s", Role::Source)];
    let mut edges = Vec::new();
    for level in 1..=depth {
        for i in 0..1usize << level {
            nodes.push(node(name(level, i), Role::Internal));
            edges.push(edge(format!("b{level}_{i}"), &name(level - 1, i / 2), &name(level, i), 2));
        }
    }
    let pairs: Vec<(usize, usize)> = match mode {
        LowerBoundMode::ManySinks => (0..leaves).flat_map(|i| (i + 1..leaves).map(move |j| (i, j))).collect(),
        LowerBoundMode::OneSink(i, j) => {
            if i == j || i.max(j) >= leaves {
                return Err(NetworkError::ParameterOutOfRange(format!("pair ({i},{j}) with {leaves} leaves")));
            }
            vec![(i.min(j), i.max(j))]
        }
    };
    let mut sinks = Vec::new();
    for (i, j) in pairs {
        let t = format!("t{i}_{j}");
        nodes.push(node(&t, Role::Sink));
        edges.push(edge(format!("l{i}_{j}a"), &name(depth, i), &t, 1));
        edges.push(edge(format!("l{i}_{j}b"), &name(depth, j), &t, 1));
        sinks.push(t);
    }
    let net = Network { nodes, edges, source: "s".into(), sinks };
    net.validate()?;
    Ok(net)
}

/// Combination network: `s` feeds `n` relays `u0..` by unit links and every
/// `k`-subset of relays feeds its own sink.
pub fn combination(n: usize, k: usize) -> Result<Network, NetworkError> {
    let count = binomial(n, k);
    if k == 0 || k > n || count > 5000 {
        return Err(NetworkError::ParameterOutOfRange(format!("combination({n},{k})")));
    }
    let mut nodes = vec![node("s", Role::Source)];
    let mut edges = Vec::new();
    for i in 0..n {
        nodes.push(node(format!("u{i}"), Role::Internal));
        edges.push(edge(format!("su{i}"), "s", &format!("u{i}"), 1));
    }
    let mut sinks = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let t = format!("t{}", subset.iter().map(usize::to_string).collect::<Vec<_>>().join("_"));
        nodes.push(node(&t, Role::Sink));
        for &i in &subset {
            edges.push(edge(format!("u{i}{t}"), &format!("u{i}"), &t, 1));
        }
        sinks.push(t);
        // Next subset in lexicographic order.
        let Some(p) = (0..k).rev().find(|&p| subset[p] < n - k + p) else { break };
        subset[p] += 1;
        for q in p + 1..k {
            subset[q] = subset[q - 1] + 1;
        }
    }
    let net = Network { nodes, edges, source: "s".into(), sinks };
    net.validate()?;
    Ok(net)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_counts() {
        let n = lower_bound(2, LowerBoundMode::ManySinks).unwrap();
        let forwarding = n.nodes.iter().filter(|x| x.id.starts_with('v')).count();
        assert_eq!((forwarding, n.sinks.len()), (4, 6));
        assert_eq!(lower_bound(3, LowerBoundMode::ManySinks).unwrap().sinks.len(), 28);
        assert_eq!(n.min_cut().value, 2);
        let one = lower_bound(3, LowerBoundMode::OneSink(2, 5)).unwrap();
        assert_eq!(one.sinks, vec!["t2_5".to_string()]);
        assert!(lower_bound(0, LowerBoundMode::ManySinks).is_err());
    }

    #[test]
    fn random_dag_is_reproducible() {
        let a = random_dag(1, 10, 0.3, 2, 2).unwrap();
        let b = random_dag(1, 10, 0.3, 2, 2).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.min_cut().value >= 2);
    }

    #[test]
    fn combination_shape() {
        let c = combination(4, 2).unwrap();
        assert_eq!(c.sinks.len(), 6);
        assert_eq!(c.min_cut().value, 2);
    }
}
