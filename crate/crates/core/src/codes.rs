//! Local coding coefficient designs: WUP, SUP, R2-D² and C3-P0.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BinaryPoly, Exponent, Rational};
use crate::identity::{assign_ids, cantor_tuple, IdRegistry};
use crate::transform::{NodeKind, VEdgeId, VNodeId, VirtualGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodesError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("node {0} has no id")]
    MissingId(VNodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Wup,
    Sup,
    R2d2,
    C3p0,
}

impl Design {
    pub fn is_deterministic(self) -> bool {
        matches!(self, Design::R2d2 | Design::C3p0)
    }

    pub const ALL: [Design; 4] = [Design::Wup, Design::Sup, Design::R2d2, Design::C3p0];
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Design::Wup => "wup",
            Design::Sup => "sup",
            Design::R2d2 => "r2d2",
            Design::C3p0 => "c3p0",
        })
    }
}

impl std::str::FromStr for Design {
    type Err = CodesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wup" => Ok(Design::Wup),
            "sup" => Ok(Design::Sup),
            "r2d2" => Ok(Design::R2d2),
            "c3p0" => Ok(Design::C3p0),
            _ => Err(CodesError::BadParameter(format!("unknown design `{s}`"))),
        }
    }
}

/// Key of the ID registry over a virtual graph: a root standing for the
/// source, with the source copies as its children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VgKey {
    Source,
    Node(VNodeId),
}

pub type VgRegistry = IdRegistry<VgKey>;

fn registry_edges(vg: &VirtualGraph) -> Vec<(VgKey, VgKey)> {
    let mut edges: Vec<(VgKey, VgKey)> =
        vg.source_copies().into_iter().map(|c| (VgKey::Source, VgKey::Node(c))).collect();
    edges.extend(vg.edges().map(|(_, e)| (VgKey::Node(e.tail), VgKey::Node(e.head))));
    edges
}

pub fn vg_registry(vg: &VirtualGraph) -> VgRegistry {
    let mut nodes = vec![VgKey::Source];
    nodes.extend(vg.nodes().map(|(n, _)| VgKey::Node(n)));
    assign_ids(&VgKey::Source, &nodes, &registry_edges(vg))
}

/// Gives every node created since the registry was built an ID under its
/// smallest-ID in-neighbour (else out-neighbour, else the root).
pub fn extend_registry(reg: &mut VgRegistry, vg: &VirtualGraph) {
    for n in vg.topo_order() {
        let key = VgKey::Node(n);
        if reg.contains(&key) {
            continue;
        }
        let node = vg.node(n).expect("listed node");
        let ins: Vec<VgKey> = if node.kind == NodeKind::SourceCopy {
            vec![VgKey::Source]
        } else {
            vg.in_edges(n).iter().map(|&e| VgKey::Node(vg.edge(e).unwrap().tail)).collect()
        };
        let outs: Vec<VgKey> = vg.out_edges(n).iter().map(|&e| VgKey::Node(vg.edge(e).unwrap().head)).collect();
        let pick = |cands: &[VgKey]| {
            cands
                .iter()
                .filter(|k| reg.contains(k))
                .min_by_key(|k| reg.id(k).unwrap().as_int())
                .copied()
        };
        let parent = pick(&ins).or_else(|| pick(&outs)).unwrap_or(VgKey::Source);
        reg.assign_new(&parent, key).expect("fresh node");
    }
}

/// ⌈log₂ x⌉ for x ≥ 1.
fn ceil_log2(x: f64) -> u64 {
    let mut k = 0u64;
    while 2f64.powi(k as i32) < x {
        k += 1;
    }
    k
}

fn check_epsilon(eps: f64) -> Result<(), CodesError> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(CodesError::BadEpsilon(eps.to_string()))
    }
}

/// 2Δ + 1 + ⌈log₂(R·|T|/ε)⌉.
pub fn wup_degree(depth: u32, rate: usize, nsinks: usize, eps: f64) -> Result<u64, CodesError> {
    check_epsilon(eps)?;
    if rate == 0 || nsinks == 0 {
        return Err(CodesError::BadParameter("rate and sink count must be positive".into()));
    }
    Ok(2 * depth as u64 + 1 + ceil_log2(rate as f64 * nsinks as f64 / eps))
}

/// (R+1)(Δ+1+⌈log₂R⌉) + Δ + ⌈log₂(1/ε)⌉ − 1.
pub fn sup_degree(depth: u32, rate: usize, eps: f64) -> Result<u64, CodesError> {
    check_epsilon(eps)?;
    if rate == 0 {
        return Err(CodesError::BadParameter("rate must be positive".into()));
    }
    let r = rate as u64;
    let d = depth as u64;
    Ok((r + 1) * (d + 1 + ceil_log2(rate as f64)) + d + ceil_log2(1.0 / eps) - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CoeffInput {
    Edge(VEdgeId),
    /// Source message `k`, used by source copies beyond the first `R`.
    Message(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CoeffKey {
    pub node: VNodeId,
    pub input: CoeffInput,
    pub output: VEdgeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignParams {
    pub rate: usize,
    pub epsilon: f64,
    pub nsinks: usize,
    pub seed: u64,
}

impl DesignParams {
    pub fn new(rate: usize, epsilon: f64, nsinks: usize, seed: u64) -> Self {
        Self { rate, epsilon, nsinks, seed }
    }
}

/// Local coding coefficients of one design over one virtual graph.
///
/// For WUP, SUP and C3-P0 the value under `(node, in, out)` is the factor
/// applied to input `in` when forming output `out`. For R2-D² a node's two
/// entries `Message(0)` and `Message(1)` are the components of the global
/// vector `(1, β)` it is designed to emit on `out`; the local factors that
/// realise it follow from the received vectors during percolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeAssignment {
    pub design: Design,
    pub params: DesignParams,
    pub coeffs: BTreeMap<CoeffKey, Rational>,
}

#[derive(Serialize)]
struct ExportCoeff {
    node: String,
    tail_edge: String,
    head_edge: String,
    coeff: Rational,
}

#[derive(Serialize)]
struct ExportAssignment<'a> {
    design: Design,
    params: &'a DesignParams,
    coeffs: Vec<ExportCoeff>,
}

/// Nodes that need coefficients: coding nodes, and source copies whose
/// slot is at least the rate.
fn coded_nodes(vg: &VirtualGraph, rate: usize) -> Vec<VNodeId> {
    vg.nodes()
        .filter(|(_, n)| n.kind == NodeKind::Coding || (n.kind == NodeKind::SourceCopy && n.slot.unwrap_or(0) >= rate))
        .map(|(k, _)| k)
        .collect()
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// RNG owned by one node: a function of the master seed and the node id only.
pub fn node_rng(master: u64, node: VNodeId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master ^ splitmix64(node as u64)))
}

/// Uniform polynomial of degree ≤ `d`: `d + 1` independent fair bits.
pub fn random_poly(rng: &mut impl Rng, d: u64) -> BinaryPoly {
    let bits = d as usize + 1;
    let mut words: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.gen()).collect();
    if !bits.is_multiple_of(64) {
        *words.last_mut().unwrap() &= (1u64 << (bits % 64)) - 1;
    }
    BinaryPoly::from_words(words)
}

/// β for the label `k`: the polynomial whose coefficient vector is the
/// binary expansion of `k`. Distinct labels give distinct polynomials.
pub fn r2d2_beta(k: &BigUint) -> BinaryPoly {
    BinaryPoly::from_biguint_bits(k)
}

impl CodeAssignment {
    pub fn new(design: Design, params: DesignParams) -> Result<Self, CodesError> {
        match design {
            Design::Wup => {
                wup_degree(0, params.rate, params.nsinks, params.epsilon)?;
            }
            Design::Sup => {
                sup_degree(0, params.rate, params.epsilon)?;
            }
            Design::R2d2 if params.rate != 2 => {
                return Err(CodesError::BadParameter("R2-D2 needs rate 2".into()));
            }
            _ if params.rate == 0 => return Err(CodesError::BadParameter("rate must be positive".into())),
            _ => {}
        }
        Ok(Self { design, params, coeffs: BTreeMap::new() })
    }

    /// Builds a full assignment.
    pub fn assign(
        design: Design,
        params: DesignParams,
        vg: &VirtualGraph,
        reg: &VgRegistry,
    ) -> Result<Self, CodesError> {
        let mut ca = Self::new(design, params)?;
        ca.extend(vg, reg)?;
        Ok(ca)
    }

    /// Assigns coefficients to every coded node that has none yet, and
    /// forgets entries whose node or edges no longer exist. Existing
    /// entries are never recomputed.
    pub fn extend(&mut self, vg: &VirtualGraph, reg: &VgRegistry) -> Result<(), CodesError> {
        self.coeffs.retain(|k, _| {
            let live_edge = |e: VEdgeId| vg.edge(e).is_some();
            let input_ok = match k.input {
                CoeffInput::Edge(e) => live_edge(e),
                CoeffInput::Message(_) => true,
            };
            // A split parent folded back into a reserve keeps its entries:
            // they are unused while it relays nothing and valid again if it
            // is split anew.
            vg.node(k.node).is_some() && input_ok && live_edge(k.output)
        });
        let covered: BTreeSet<VNodeId> = self.coeffs.keys().map(|k| k.node).collect();
        for n in coded_nodes(vg, self.params.rate) {
            if covered.contains(&n) {
                continue;
            }
            let entries = self.node_coefficients(vg, reg, n)?;
            self.coeffs.extend(entries);
        }
        Ok(())
    }

    /// The design's local rule at one node.
    fn node_coefficients(
        &self,
        vg: &VirtualGraph,
        reg: &VgRegistry,
        n: VNodeId,
    ) -> Result<Vec<(CoeffKey, Rational)>, CodesError> {
        let node = vg.node(n).expect("coded node exists");
        let inputs: Vec<CoeffInput> = if node.kind == NodeKind::SourceCopy {
            (0..self.params.rate).map(CoeffInput::Message).collect()
        } else {
            vg.in_edges(n).into_iter().map(CoeffInput::Edge).collect()
        };
        let outputs = vg.out_edges(n);
        let id_int = |key: VgKey, node: VNodeId| reg.id(&key).map(|id| id.as_int()).ok_or(CodesError::MissingId(node));
        let mut out = Vec::new();
        match self.design {
            Design::Wup | Design::Sup => {
                let p = &self.params;
                let budget = match self.design {
                    Design::Wup => wup_degree(node.depth, p.rate, p.nsinks, p.epsilon)?,
                    _ => sup_degree(node.depth, p.rate, p.epsilon)?,
                };
                let mut rng = node_rng(p.seed, n);
                for &o in &outputs {
                    for &i in &inputs {
                        let c = Rational::from_poly(random_poly(&mut rng, budget));
                        out.push((CoeffKey { node: n, input: i, output: o }, c));
                    }
                }
            }
            Design::R2d2 => {
                let v = id_int(VgKey::Node(n), n)?;
                for &o in &outputs {
                    let head = vg.edge(o).unwrap().head;
                    let w = id_int(VgKey::Node(head), head)?;
                    let k = cantor_tuple(&[v.clone(), BigUint::ZERO, w]).expect("3-tuple");
                    let beta = Rational::from_poly(r2d2_beta(&k));
                    out.push((CoeffKey { node: n, input: CoeffInput::Message(0), output: o }, Rational::one()));
                    out.push((CoeffKey { node: n, input: CoeffInput::Message(1), output: o }, beta));
                }
            }
            Design::C3p0 => {
                let v = id_int(VgKey::Node(n), n)?;
                for &o in &outputs {
                    let head = vg.edge(o).unwrap().head;
                    let w = id_int(VgKey::Node(head), head)?;
                    for &i in &inputs {
                        let tuple = match i {
                            CoeffInput::Edge(e) => {
                                let tail = vg.edge(e).unwrap().tail;
                                let u = id_int(VgKey::Node(tail), tail)?;
                                [u, BigUint::ZERO, v.clone(), BigUint::ZERO, w.clone()]
                            }
                            CoeffInput::Message(k) => {
                                [v.clone(), BigUint::from(k), v.clone(), BigUint::ZERO, w.clone()]
                            }
                        };
                        let k = cantor_tuple(&tuple).expect("5-tuple");
                        let c = BinaryPoly::monomial(Exponent::pow2(k));
                        out.push((CoeffKey { node: n, input: i, output: o }, Rational::from_poly(c)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn get(&self, node: VNodeId, input: CoeffInput, output: VEdgeId) -> Option<&Rational> {
        self.coeffs.get(&CoeffKey { node, input, output })
    }

    pub fn covers(&self, node: VNodeId) -> bool {
        let lo = CoeffKey { node, input: CoeffInput::Edge(0), output: 0 };
        self.coeffs.range(lo..).next().is_some_and(|(k, _)| k.node == node)
    }

    /// Largest degree over all stored coefficients.
    pub fn max_degree(&self) -> crate::algebra::Degree {
        self.coeffs.values().map(Rational::degree).max().unwrap_or(crate::algebra::Degree::NegInfinity)
    }

    /// Entries present in `self` whose values differ in `later` or that
    /// vanished from `later` although their node and edges still exist.
    pub fn changed_entries(&self, later: &CodeAssignment, vg: &VirtualGraph) -> Vec<CoeffKey> {
        self.coeffs
            .iter()
            .filter(|(k, v)| {
                let live = vg.node(k.node).is_some()
                    && vg.edge(k.output).is_some()
                    && match k.input {
                        CoeffInput::Edge(e) => vg.edge(e).is_some(),
                        CoeffInput::Message(_) => true,
                    };
                live && later.coeffs.get(k) != Some(v)
            })
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| ExportCoeff {
                node: format!("n{}", k.node),
                tail_edge: match k.input {
                    CoeffInput::Edge(e) => format!("x{e}"),
                    CoeffInput::Message(m) => format!("msg{m}"),
                },
                head_edge: format!("x{}", k.output),
                coeff: v.clone(),
            })
            .collect();
        let export = ExportAssignment { design: self.design, params: &self.params, coeffs };
        serde_json::to_string_pretty(&export).expect("assignment serializes")
    }
}
