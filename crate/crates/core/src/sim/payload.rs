//! Payload propagation and decoding at the sinks.

use std::collections::BTreeMap;

use crate::algebra::{BinaryPoly, Degree, Exponent, PolyMatrix, Rational};
use crate::codes::{CodeAssignment, CoeffInput, CoeffKey};
use crate::transform::{NodeKind, VEdgeId, VirtualGraph};

use super::percolate::Percolation;
use super::SimError;

/// Largest coefficient degree actually applied anywhere in the network.
pub fn applied_degree(ca: &CodeAssignment, perc: &Percolation) -> Degree {
    let stored = ca.max_degree();
    let realized = perc.realized.values().map(Rational::degree).max().unwrap_or(Degree::NegInfinity);
    stored.max(realized)
}

/// Degree bound every payload must respect: message degree plus one
/// coefficient degree per coding hop on the longest path, plus slack.
pub fn payload_guard(vg: &VirtualGraph, ca: &CodeAssignment, perc: &Percolation, messages: &[BinaryPoly]) -> Exponent {
    let mut hops: BTreeMap<usize, u64> = BTreeMap::new();
    let mut longest = 0u64;
    for n in vg.topo_order() {
        let node = vg.node(n).expect("ordered node");
        let here = vg.in_edges(n).iter().map(|e| hops[&vg.edge(*e).unwrap().tail]).max().unwrap_or(0)
            + u64::from(matches!(node.kind, NodeKind::Coding | NodeKind::SourceCopy));
        longest = longest.max(here);
        hops.insert(n, here);
    }
    let msg = messages.iter().filter_map(|m| m.small_degree()).max().unwrap_or(0) as u64;
    let coeff = match applied_degree(ca, perc) {
        Degree::Finite(e) => e,
        Degree::NegInfinity => Exponent::zero(),
    };
    // Rational local factors can carry their denominator degree through one hop.
    coeff.mul_small(2 * longest).add(&Exponent::from_u64(msg + 16))
}

fn combine(vec: &[Rational], messages: &[BinaryPoly]) -> Result<BinaryPoly, SimError> {
    let mut acc = BinaryPoly::zero();
    for (c, x) in vec.iter().zip(messages) {
        if c.is_zero() || x.is_zero() {
            continue;
        }
        let t = c.mul_poly(x);
        if !t.is_polynomial() {
            return Err(SimError::NonPolynomialPayload);
        }
        acc = acc.add(t.num());
    }
    Ok(acc)
}

/// Runs the messages through the network with the local coefficients and
/// checks that every edge carries its global coding vector applied to the
/// messages.
pub fn encode_payloads(
    vg: &VirtualGraph,
    ca: &CodeAssignment,
    perc: &Percolation,
    messages: &[BinaryPoly],
) -> Result<BTreeMap<VEdgeId, BinaryPoly>, SimError> {
    let r = perc.rate;
    if messages.len() != r {
        return Err(SimError::MessageCount { expected: r, got: messages.len() });
    }
    let guard = payload_guard(vg, ca, perc, messages);
    let mut pay: BTreeMap<VEdgeId, BinaryPoly> = BTreeMap::new();
    for n in vg.topo_order() {
        let node = vg.node(n).expect("ordered node");
        let ins = vg.in_edges(n);
        for o in vg.out_edges(n) {
            let y = if !node.active {
                BinaryPoly::zero()
            } else {
                match node.kind {
                    NodeKind::SourceCopy => {
                        let slot = node.slot.expect("slot");
                        if slot < r {
                            messages[slot].clone()
                        } else {
                            let c: Vec<Rational> = (0..r)
                                .map(|k| ca.get(n, CoeffInput::Message(k), o).cloned().unwrap_or_else(Rational::zero))
                                .collect();
                            combine(&c, messages)?
                        }
                    }
                    NodeKind::Coding => {
                        let mut acc = Rational::zero();
                        for &e in &ins {
                            let key = CoeffKey { node: n, input: CoeffInput::Edge(e), output: o };
                            let c = perc.local(ca, &key).ok_or(SimError::UncoveredCodingNode(n))?;
                            acc = acc.add(&c.mul_poly(&pay[&e]));
                        }
                        if !acc.is_polynomial() {
                            return Err(SimError::NonPolynomialPayload);
                        }
                        acc.num().clone()
                    }
                    _ => ins.first().map(|e| pay[e].clone()).unwrap_or_else(BinaryPoly::zero),
                }
            };
            if let Degree::Finite(d) = y.degree() {
                if d > guard {
                    return Err(SimError::DegreeOverflow(o));
                }
            }
            let expected = combine(&perc.gcv[&o], messages)?;
            if expected != y {
                return Err(SimError::RelationViolated(o));
            }
            pay.insert(o, y);
        }
    }
    Ok(pay)
}

/// Recovers the messages from the payloads on the chosen input links.
///
/// Dense transfer matrices go through the rational inverse, scaled by the
/// common denominator. Sparse ones go through the adjugate and an exact
/// division by the determinant, which never needs a gcd of huge
/// polynomials.
pub fn decode(t: &PolyMatrix, received: &[BinaryPoly]) -> Result<Vec<BinaryPoly>, SimError> {
    let n = t.rows();
    if received.len() != n || t.cols() != n {
        return Err(SimError::MessageCount { expected: n, got: received.len() });
    }
    let sparse = t.entries().iter().any(|e| e.num().is_sparse() || e.den().is_sparse());
    let (scaled, divisor) = if sparse || n == 1 {
        let det = t.det().map_err(SimError::Algebra)?;
        if det.is_zero() || !det.is_polynomial() {
            return Err(SimError::Singular);
        }
        (t.adjugate().map_err(SimError::Algebra)?, det.num().clone())
    } else {
        let inv = t.inverse().map_err(|_| SimError::Singular)?;
        let mut lcd = BinaryPoly::one();
        for e in inv.entries() {
            lcd = lcd.lcm(e.den()).map_err(SimError::Algebra)?;
        }
        let lcd_r = Rational::from_poly(lcd.clone());
        let cleared: Vec<Rational> = inv.entries().iter().map(|e| e.mul(&lcd_r)).collect();
        (PolyMatrix::new(n, n, cleared).map_err(SimError::Algebra)?, lcd)
    };
    // Received payloads are row combinations: Y = T·X, so X = T⁻¹·Y.
    (0..n)
        .map(|k| {
            let mut acc = BinaryPoly::zero();
            for (j, y) in received.iter().enumerate() {
                let a = scaled.get(k, j);
                if a.is_zero() || y.is_zero() {
                    continue;
                }
                if !a.is_polynomial() {
                    return Err(SimError::DecodeInexact);
                }
                acc = acc.add(&a.num().mul(y));
            }
            acc.div_exact(&divisor).map_err(|_| SimError::DecodeInexact)
        })
        .collect()
}
