use univnc::codes::{extend_registry, vg_registry, CodeAssignment, Design, DesignParams};
use univnc::network::{butterfly, Network};
use univnc::sim::monte_carlo;
use univnc::transform::VirtualGraph;

use crate::common::{dag_corpus, ensure};

fn grid() -> Vec<Network> {
    let mut nets = vec![butterfly()];
    nets.extend(dag_corpus(20, 3));
    nets
}

/// Runs the 21 × {0.5, 0.2} × 500-trial grid and checks every cell.
fn bound_grid(design: Design) -> Result<(f64, usize), String> {
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for (i, net) in grid().iter().enumerate() {
        let vg = VirtualGraph::transform(net);
        let reg = vg_registry(&vg);
        for eps in [0.5, 0.2] {
            let params = DesignParams::new(2, eps, net.sinks.len(), 0);
            let r = monte_carlo(&vg, &reg, design, params, 500, 17 + i as u64).map_err(|e| e.to_string())?;
            ensure!(
                r.rate <= eps + 3.0 * r.ci95,
                "network {i}, eps {eps}: failure rate {} above {}",
                r.rate,
                eps + 3.0 * r.ci95
            );
            worst = worst.max(r.rate / eps);
            cells += 1;
        }
    }
    Ok((worst, cells))
}

pub fn wup_bound() -> Result<String, String> {
    let (worst, cells) = bound_grid(Design::Wup)?;
    Ok(format!("{cells} cells of 500 trials, worst rate/eps = {worst:.3}"))
}

pub fn sup_bound() -> Result<String, String> {
    let (worst, cells) = bound_grid(Design::Sup)?;
    // Strong universality: the assignment ignores how many sinks there are.
    let mut compared = 0;
    for net in grid() {
        let vg = VirtualGraph::transform(&net);
        let reg = vg_registry(&vg);
        let base = CodeAssignment::assign(Design::Sup, DesignParams::new(2, 0.2, 1, 99), &vg, &reg)
            .map_err(|e| e.to_string())?;
        for nsinks in [2, 3, 10, 1000] {
            let other = CodeAssignment::assign(Design::Sup, DesignParams::new(2, 0.2, nsinks, 99), &vg, &reg)
                .map_err(|e| e.to_string())?;
            ensure!(other.coeffs == base.coeffs, "assignment changed with {nsinks} sinks");
            compared += 1;
        }
        // Growing the skeleton by a new downstream node leaves every old
        // coefficient alone.
        let mut grown = vg.clone();
        let mut reg2 = reg.clone();
        let relay = net.nodes.iter().find(|n| n.id != net.source && !net.sinks.contains(&n.id)).map(|n| n.id.clone());
        if let Some(relay) = relay {
            grown.join_link(&relay, "w_new").map_err(|e| e.to_string())?;
            extend_registry(&mut reg2, &grown);
            let fresh = CodeAssignment::assign(Design::Sup, DesignParams::new(2, 0.2, net.sinks.len() + 1, 99), &grown, &reg2)
                .map_err(|e| e.to_string())?;
            let changed = base.changed_entries(&fresh, &grown);
            ensure!(changed.is_empty(), "growing the network changed {} coefficients", changed.len());
            compared += 1;
        }
    }
    Ok(format!(
        "{cells} cells of 500 trials, worst rate/eps = {worst:.3}; {compared} sink-count or growth variations keep coefficients identical"
    ))
}
