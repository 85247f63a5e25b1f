use std::collections::BTreeSet;

use univnc::algebra::{Degree, Rational};
use univnc::codes::{vg_registry, CodeAssignment, Design, DesignParams};
use univnc::network::{lower_bound, LowerBoundMode};
use univnc::sim::{percolate, random_messages, simulate};
use univnc::transform::VirtualGraph;

use crate::common::ensure;

/// The coefficient a forwarding node puts on one outgoing link, as the
/// ratio of the second to the first entry of its coding vector.
fn ratio(gcv: &[Rational]) -> Option<Rational> {
    gcv[1].div(&gcv[0]).ok()
}

pub fn lower_bound_trend() -> Result<String, String> {
    let depth = 4;
    let net = lower_bound(depth, LowerBoundMode::ManySinks).map_err(|e| e.to_string())?;
    let vg = VirtualGraph::transform(&net);
    let reg = vg_registry(&vg);
    let ca = CodeAssignment::assign(Design::R2d2, DesignParams::new(2, 0.1, net.sinks.len(), 0), &vg, &reg)
        .map_err(|e| e.to_string())?;
    let perc = percolate(&vg, &ca).map_err(|e| e.to_string())?;
    let leaves = 1usize << depth;
    let mut per_leaf = BTreeSet::new();
    let mut all = BTreeSet::new();
    for i in 0..leaves {
        let leaf = format!("v{i}");
        let mut first = None;
        for l in vg.link_ids() {
            let (tail, _, e) = vg.link(l).expect("listed link");
            if tail != leaf {
                continue;
            }
            let r = ratio(&perc.gcv[&e]).ok_or_else(|| format!("{leaf} sends a vector without a first entry"))?;
            first.get_or_insert(r.clone());
            all.insert(r);
        }
        per_leaf.insert(first.ok_or_else(|| format!("{leaf} has no outgoing link"))?);
    }
    ensure!(per_leaf.len() >= leaves - 1, "only {} distinct leaf coefficients", per_leaf.len());
    let x = random_messages(1, 2, 64);
    ensure!(simulate(&vg, &ca, &x).map_err(|e| e.to_string())?.all_decoded(), "a sink failed at depth {depth}");

    let mut degrees = Vec::new();
    for d in 2..=5 {
        let net = lower_bound(d, LowerBoundMode::ManySinks).map_err(|e| e.to_string())?;
        let vg = VirtualGraph::transform(&net);
        let reg = vg_registry(&vg);
        let ca = CodeAssignment::assign(Design::R2d2, DesignParams::new(2, 0.1, net.sinks.len(), 0), &vg, &reg)
            .map_err(|e| e.to_string())?;
        let report = simulate(&vg, &ca, &x).map_err(|e| e.to_string())?;
        ensure!(report.all_decoded(), "a sink failed at depth {d}");
        let Degree::Finite(e) = report.metrics.max_coeff_degree else { return Err(format!("no coefficients at depth {d}")) };
        degrees.push(e.to_u64().ok_or("degree does not fit in u64")?);
    }
    ensure!(degrees.windows(2).all(|w| w[0] < w[1]), "max coefficient degree does not grow with depth: {degrees:?}");
    Ok(format!(
        "depth 4: {} distinct leaf coefficients ({} over all leaf links); max degree by depth 2..5: {degrees:?}",
        per_leaf.len(),
        all.len()
    ))
}
