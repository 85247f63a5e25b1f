use std::collections::{BTreeMap, BTreeSet};

use univnc::algebra::{BinaryPoly, Exponent};
use univnc::codes::{vg_registry, CodeAssignment, CoeffInput, Design, DesignParams};
use univnc::network::butterfly;
use univnc::sim::{decode, encode_payloads, percolate, random_messages, transfer_matrix};
use univnc::transform::{NodeKind, VEdgeId, VirtualGraph};

use crate::common::{dag_corpus, ensure};

pub fn r2d2_zero_error() -> Result<String, String> {
    let mut nets = vec![butterfly()];
    nets.extend(dag_corpus(50, 1));
    let mut decodes = 0;
    for (i, net) in nets.iter().enumerate() {
        ensure!(net.min_cut().value >= 2, "network {i} has min-cut below 2");
        let vg = VirtualGraph::transform(net);
        let reg = vg_registry(&vg);
        let ca = CodeAssignment::assign(Design::R2d2, DesignParams::new(2, 0.1, net.sinks.len(), 0), &vg, &reg)
            .map_err(|e| e.to_string())?;
        let perc = percolate(&vg, &ca).map_err(|e| e.to_string())?;
        let mats: Vec<_> = vg
            .sinks()
            .iter()
            .map(|t| transfer_matrix(&vg, &perc, t).map_err(|e| format!("network {i} sink {t}: {e}")))
            .collect::<Result<_, _>>()?;
        for trial in 0..100u64 {
            let x = random_messages(i as u64 * 1000 + trial, 2, 64);
            let pay = encode_payloads(&vg, &ca, &perc, &x).map_err(|e| e.to_string())?;
            for (t, (m, chosen)) in vg.sinks().iter().zip(&mats) {
                let y: Vec<BinaryPoly> = chosen.iter().map(|e| pay[e].clone()).collect();
                let got = decode(m, &y).map_err(|e| format!("network {i} sink {t}: {e}"))?;
                ensure!(got == x, "network {i} sink {t} trial {trial}: wrong messages");
                decodes += 1;
            }
        }
    }
    Ok(format!("{} networks, {decodes} sink decodes of 64-bit message pairs, 0 failures", nets.len()))
}

/// One source-to-input path: the message slot it starts from, the sum of
/// the exponents of the monomial coefficients along it, and its edges.
#[derive(Clone)]
struct Path {
    slot: usize,
    exp: Exponent,
    edges: Vec<VEdgeId>,
}

fn monomial_exponent(ca: &CodeAssignment, node: usize, input: CoeffInput, out: VEdgeId) -> Result<Exponent, String> {
    let c = ca.get(node, input, out).ok_or_else(|| format!("node {node} has no coefficient"))?;
    ensure!(c.is_polynomial() && c.num().is_monomial(), "coefficient at node {node} is not a monomial");
    Ok(c.num().low_exponent().expect("nonzero"))
}

/// Every path from the source copies into edge `e`, enumerated without
/// using the percolation code.
fn paths_into(
    vg: &VirtualGraph,
    ca: &CodeAssignment,
    e: VEdgeId,
    memo: &mut BTreeMap<VEdgeId, Vec<Path>>,
) -> Result<Vec<Path>, String> {
    if let Some(p) = memo.get(&e) {
        return Ok(p.clone());
    }
    let r = ca.params.rate;
    let tail = vg.edge(e).expect("edge").tail;
    let node = vg.node(tail).expect("node");
    let mut out = Vec::new();
    match node.kind {
        NodeKind::SourceCopy => {
            let slot = node.slot.expect("slot");
            if slot < r {
                out.push(Path { slot, exp: Exponent::zero(), edges: vec![e] });
            } else {
                for k in 0..r {
                    out.push(Path { slot: k, exp: monomial_exponent(ca, tail, CoeffInput::Message(k), e)?, edges: vec![e] });
                }
            }
        }
        kind => {
            for f in vg.in_edges(tail) {
                let step = if kind == NodeKind::Coding {
                    monomial_exponent(ca, tail, CoeffInput::Edge(f), e)?
                } else {
                    Exponent::zero()
                };
                for mut p in paths_into(vg, ca, f, memo)? {
                    p.exp = p.exp.add(&step);
                    p.edges.push(e);
                    out.push(p);
                }
            }
        }
    }
    memo.insert(e, out.clone());
    Ok(out)
}

fn live_coding_nodes(vg: &VirtualGraph) -> usize {
    vg.active_coding_nodes()
        .into_iter()
        .filter(|&n| vg.in_edges(n).iter().all(|&e| vg.node(vg.edge(e).unwrap().tail).unwrap().active))
        .count()
}

pub fn c3p0_zero_error() -> Result<String, String> {
    let mut checked = 0;
    let mut skipped = 0;
    let mut systems = 0;
    let mut base = 2;
    while checked < 20 {
        for net in dag_corpus(20, base) {
            if checked == 20 {
                break;
            }
            let vg = VirtualGraph::transform(&net);
            if live_coding_nodes(&vg) > 12 {
                skipped += 1;
                continue;
            }
            let reg = vg_registry(&vg);
            let ca = CodeAssignment::assign(Design::C3p0, DesignParams::new(2, 0.1, net.sinks.len(), 0), &vg, &reg)
                .map_err(|e| e.to_string())?;
            let perc = percolate(&vg, &ca).map_err(|e| e.to_string())?;
            let mut memo = BTreeMap::new();
            for t in vg.sinks() {
                let (m, chosen) = transfer_matrix(&vg, &perc, t).map_err(|e| e.to_string())?;
                let det = m.det().map_err(|e| e.to_string())?;
                ensure!(!det.is_zero(), "sink {t}: det is zero");
                ensure!(det.is_polynomial(), "sink {t}: det is not a polynomial");
                let rows: Vec<Vec<Path>> =
                    chosen.iter().map(|&e| paths_into(&vg, &ca, e, &mut memo)).collect::<Result<_, _>>()?;
                // Terms of det: all pairs of paths from distinct slots,
                // with equal exponents cancelling in pairs.
                let mut terms: BTreeSet<Exponent> = BTreeSet::new();
                let mut disjoint: Vec<Exponent> = Vec::new();
                for p in &rows[0] {
                    for q in &rows[1] {
                        if p.slot == q.slot {
                            continue;
                        }
                        let e = p.exp.add(&q.exp);
                        if !terms.insert(e.clone()) {
                            terms.remove(&e);
                        }
                        if p.edges.iter().all(|x| !q.edges.contains(x)) {
                            disjoint.push(e);
                        }
                    }
                }
                ensure!(!disjoint.is_empty(), "sink {t}: no edge-disjoint path pair");
                let distinct: BTreeSet<&Exponent> = disjoint.iter().collect();
                ensure!(distinct.len() == disjoint.len(), "sink {t}: two disjoint path systems share a power of z");
                let from_oracle = BinaryPoly::sparse_from(terms);
                ensure!(&from_oracle == det.num(), "sink {t}: det differs from the path expansion");
                systems += disjoint.len();
            }
            checked += 1;
        }
        base += 1;
    }
    Ok(format!(
        "20 networks with at most 12 coding nodes ({skipped} skipped as larger), {systems} disjoint path systems, all powers distinct, det nonzero"
    ))
}
