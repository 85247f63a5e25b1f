//! End-to-end simulation: percolation, payloads, decoding, Monte Carlo
//! estimates and churn scripts.

mod churn;
mod header;
mod montecarlo;
mod payload;
mod percolate;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, BinaryPoly, Degree, PolyMatrix};
use crate::codes::{vg_registry, CodeAssignment, CodesError, Design, DesignParams};
use crate::codes::random_poly;
use crate::network::Network;
use crate::transform::{TransformError, VEdgeId, VNodeId, VirtualGraph};

pub use churn::{robustness_scenario, ChurnEvent, ChurnStep};
pub use header::{
    deserialize_gcv, frame_bits, header_frame, header_unframe, serialize_gcv, unframe_bits,
};
pub use montecarlo::{monte_carlo, McResult, McTrial};
pub use payload::{applied_degree, decode, encode_payloads, payload_guard};
pub use percolate::{percolate, transfer_matrix, Percolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("coding node {0} has no coefficients")]
    UncoveredCodingNode(VNodeId),
    #[error("sink {sink} has {inputs} input links, fewer than the rate {rate}")]
    SinkTooFewInputs { sink: String, inputs: usize, rate: usize },
    #[error("expected {expected} messages, got {got}")]
    MessageCount { expected: usize, got: usize },
    #[error("a payload is not a polynomial")]
    NonPolynomialPayload,
    #[error("payload on edge {0} exceeds the degree guard")]
    DegreeOverflow(VEdgeId),
    #[error("payload on edge {0} differs from its coding vector applied to the messages")]
    RelationViolated(VEdgeId),
    #[error("transfer matrix is singular")]
    Singular,
    #[error("decoding division left a remainder")]
    DecodeInexact,
    #[error("framing error at bit {0}")]
    Framing(usize),
    #[error("malformed header")]
    HeaderSyntax,
    #[error("trials must be positive")]
    ZeroTrials,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Codes(#[from] CodesError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Serializes a degree as a JSON number when it fits in `u64`, as a
/// decimal string when it does not, and as `null` for the zero polynomial.
pub fn serialize_degree<S: Serializer>(d: &Degree, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Degree::NegInfinity => s.serialize_none(),
        Degree::Finite(e) => match e.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.collect_str(e),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkReport {
    pub id: String,
    pub decodable: bool,
    pub det: String,
    pub decode_ok: bool,
    pub min_cut: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(serialize_with = "serialize_degree")]
    pub max_coeff_degree: Degree,
    #[serde(serialize_with = "serialize_degree")]
    pub max_header_degree: Degree,
    #[serde(serialize_with = "serialize_degree")]
    pub total_delay: Degree,
    pub header_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub sinks: Vec<SinkReport>,
    pub metrics: Metrics,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn all_decoded(&self) -> bool {
        self.sinks.iter().all(|s| s.decodable && s.decode_ok)
    }
}

/// `rate` random messages of `bits` coefficients each.
pub fn random_messages(seed: u64, rate: usize, bits: u64) -> Vec<BinaryPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_7373_6167_6573);
    (0..rate).map(|_| random_poly(&mut rng, bits.saturating_sub(1))).collect()
}

/// Largest degree over the entries of the decoding filter `T⁻¹`. Sparse
/// matrices are measured on the unreduced `adj(T)/det(T)`.
fn decoder_delay(t: &PolyMatrix) -> Result<Degree, SimError> {
    let sparse = t.entries().iter().any(|e| e.num().is_sparse());
    let entries = if sparse {
        let mut m = t.adjugate()?.entries().to_vec();
        m.push(t.det()?);
        m
    } else {
        t.inverse()?.entries().to_vec()
    };
    Ok(entries.iter().map(|e| e.degree()).max().unwrap_or(Degree::NegInfinity))
}

/// Decodes at every sink of an already coded virtual graph.
pub fn simulate(vg: &VirtualGraph, ca: &CodeAssignment, messages: &[BinaryPoly]) -> Result<RunReport, SimError> {
    let perc = percolate(vg, ca)?;
    let payloads = encode_payloads(vg, ca, &perc, messages)?;
    let cuts: BTreeMap<String, usize> = vg.sink_cuts().into_iter().collect();
    let mut sinks = Vec::new();
    let mut delay = Degree::NegInfinity;
    for t in vg.sinks() {
        let min_cut = cuts.get(t).copied().unwrap_or(0);
        let (m, chosen) = match transfer_matrix(vg, &perc, t) {
            Ok(x) => x,
            Err(SimError::SinkTooFewInputs { .. }) => {
                sinks.push(SinkReport { id: t.clone(), decodable: false, det: "0x0/0x1".into(), decode_ok: false, min_cut });
                continue;
            }
            Err(e) => return Err(e),
        };
        let det = m.det()?;
        let decodable = !det.is_zero();
        let decode_ok = decodable && {
            let received: Vec<BinaryPoly> = chosen.iter().map(|e| payloads[e].clone()).collect();
            decode(&m, &received)? == messages
        };
        if decodable {
            delay = delay.max(decoder_delay(&m)?);
        }
        sinks.push(SinkReport { id: t.clone(), decodable, det: det.to_string(), decode_ok, min_cut });
    }
    let max_header_degree =
        perc.gcv.values().flatten().map(|r| r.degree()).max().unwrap_or(Degree::NegInfinity);
    let header_bits = perc.gcv.values().map(|g| header_frame(g).len() as u64).max().unwrap_or(0);
    let metrics = Metrics { max_coeff_degree: applied_degree(ca, &perc), max_header_degree, total_delay: delay, header_bits };
    Ok(RunReport { sinks, metrics })
}

/// Transforms, codes and simulates a network in one go.
pub fn run(
    net: &Network,
    design: Design,
    params: DesignParams,
    messages: &[BinaryPoly],
) -> Result<RunReport, SimError> {
    let vg = VirtualGraph::transform(net);
    let reg = vg_registry(&vg);
    let ca = CodeAssignment::assign(design, params, &vg, &reg)?;
    simulate(&vg, &ca, messages)
}
