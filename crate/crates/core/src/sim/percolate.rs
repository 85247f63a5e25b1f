//! Header percolation: global coding vectors in topological order.

use std::collections::BTreeMap;

use crate::algebra::{PolyMatrix, Rational};
use crate::codes::{CodeAssignment, CoeffInput, CoeffKey, Design};
use crate::transform::{NodeKind, VEdgeId, VNodeId, VirtualGraph};

use super::SimError;

/// Global coding vectors of every edge, plus what the R2-D² rule decided.
#[derive(Debug, Clone, PartialEq)]
pub struct Percolation {
    pub rate: usize,
    pub gcv: BTreeMap<VEdgeId, Vec<Rational>>,
    /// Local factors actually applied where they are not stored in the
    /// assignment (R2-D² nodes).
    pub realized: BTreeMap<CoeffKey, Rational>,
    /// R2-D² nodes that received nothing at all.
    pub flagged: Vec<VNodeId>,
}

impl Percolation {
    /// The local factor applied at `key`, wherever it is recorded.
    pub fn local<'a>(&'a self, ca: &'a CodeAssignment, key: &CoeffKey) -> Option<&'a Rational> {
        if ca.design == Design::R2d2 {
            self.realized.get(key)
        } else {
            ca.coeffs.get(key)
        }
    }
}

pub(crate) fn zero_vec(r: usize) -> Vec<Rational> {
    vec![Rational::zero(); r]
}

pub(crate) fn unit_vec(r: usize, k: usize) -> Vec<Rational> {
    let mut v = zero_vec(r);
    v[k] = Rational::one();
    v
}

fn axpy(acc: &mut [Rational], c: &Rational, x: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, xi) in acc.iter_mut().zip(x) {
        if !xi.is_zero() {
            *a = a.add(&c.mul(xi));
        }
    }
}

/// Pushes unit vectors out of the first `R` source copies and combines them
/// node by node. Inactive nodes emit zero.
pub fn percolate(vg: &VirtualGraph, ca: &CodeAssignment) -> Result<Percolation, SimError> {
    let r = ca.params.rate;
    let mut perc = Percolation { rate: r, gcv: BTreeMap::new(), realized: BTreeMap::new(), flagged: Vec::new() };
    for n in vg.topo_order() {
        let node = vg.node(n).expect("ordered node");
        let outs = vg.out_edges(n);
        let ins = vg.in_edges(n);
        if !node.active {
            for o in outs {
                perc.gcv.insert(o, zero_vec(r));
            }
            continue;
        }
        let g: Vec<Vec<Rational>> =
            ins.iter().map(|e| perc.gcv.get(e).cloned().unwrap_or_else(|| zero_vec(r))).collect();
        match node.kind {
            NodeKind::SourceCopy => {
                let slot = node.slot.expect("source copies have slots");
                for o in outs {
                    let v = if slot < r {
                        unit_vec(r, slot)
                    } else {
                        (0..r)
                            .map(|k| {
                                ca.get(n, CoeffInput::Message(k), o).cloned().ok_or(SimError::UncoveredCodingNode(n))
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    perc.gcv.insert(o, v);
                }
            }
            NodeKind::Coding if ca.design == Design::R2d2 => {
                let m = PolyMatrix::from_rows(g.clone()).expect("rectangular");
                let rank = m.rank();
                for o in outs {
                    let (coeffs, out) = match rank {
                        0 => {
                            perc.flagged.push(n);
                            (vec![Rational::zero(); ins.len()], zero_vec(r))
                        }
                        1 => {
                            let first = g.iter().position(|v| v.iter().any(|x| !x.is_zero())).expect("rank 1");
                            let c = (0..ins.len())
                                .map(|i| if i == first { Rational::one() } else { Rational::zero() })
                                .collect();
                            (c, g[first].clone())
                        }
                        _ => {
                            let target: Vec<Rational> = (0..r)
                                .map(|k| {
                                    ca.get(n, CoeffInput::Message(k), o)
                                        .cloned()
                                        .ok_or(SimError::UncoveredCodingNode(n))
                                })
                                .collect::<Result<_, _>>()?;
                            let inv = m.inverse().map_err(SimError::Algebra)?;
                            let t = PolyMatrix::from_rows(vec![target.clone()]).expect("row");
                            let c = t.mul(&inv).map_err(SimError::Algebra)?;
                            (c.row(0).to_vec(), target)
                        }
                    };
                    for (i, &e) in ins.iter().enumerate() {
                        perc.realized.insert(CoeffKey { node: n, input: CoeffInput::Edge(e), output: o }, coeffs[i].clone());
                    }
                    perc.gcv.insert(o, out);
                }
            }
            NodeKind::Coding => {
                for o in outs {
                    let mut acc = zero_vec(r);
                    for (&e, ge) in ins.iter().zip(&g) {
                        let c = ca.get(n, CoeffInput::Edge(e), o).ok_or(SimError::UncoveredCodingNode(n))?;
                        axpy(&mut acc, c, ge);
                    }
                    perc.gcv.insert(o, acc);
                }
            }
            _ => {
                let v = g.first().cloned().unwrap_or_else(|| zero_vec(r));
                for o in outs {
                    perc.gcv.insert(o, v.clone());
                }
            }
        }
    }
    Ok(perc)
}

/// The `R × R` transfer matrix of sink `t`: rows are the vectors on the
/// lexicographically first `R`-subset of its input links of maximal rank.
pub fn transfer_matrix(
    vg: &VirtualGraph,
    perc: &Percolation,
    sink: &str,
) -> Result<(PolyMatrix, Vec<VEdgeId>), SimError> {
    let r = perc.rate;
    let inputs = vg.sink_inputs(sink);
    if inputs.len() < r {
        return Err(SimError::SinkTooFewInputs { sink: sink.to_string(), inputs: inputs.len(), rate: r });
    }
    let row = |e: VEdgeId| perc.gcv.get(&e).cloned().unwrap_or_else(|| zero_vec(r));
    let build = |chosen: &[VEdgeId]| PolyMatrix::from_rows(chosen.iter().map(|&e| row(e)).collect()).expect("rows");
    let full = build(&inputs).rank();
    let chosen = if full == r {
        // Greedy in link order yields the lexicographically first basis.
        let mut chosen = Vec::with_capacity(r);
        for &e in &inputs {
            chosen.push(e);
            if build(&chosen).rank() < chosen.len() {
                chosen.pop();
            }
            if chosen.len() == r {
                break;
            }
        }
        chosen
    } else {
        first_subset_with_rank(&inputs, r, full, |s| build(s).rank())
    };
    Ok((build(&chosen), chosen))
}

fn first_subset_with_rank(
    items: &[VEdgeId],
    k: usize,
    target: usize,
    rank: impl Fn(&[VEdgeId]) -> usize,
) -> Vec<VEdgeId> {
    let n = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<VEdgeId> = idx.iter().map(|&i| items[i]).collect();
        if rank(&subset) == target {
            return subset;
        }
        let Some(p) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            return items[..k].to_vec();
        };
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
