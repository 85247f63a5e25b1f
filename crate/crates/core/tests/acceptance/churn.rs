use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use univnc::codes::{Design, DesignParams};
use univnc::network::Network;
use univnc::sim::{random_messages, robustness_scenario, ChurnEvent};
use univnc::transform::VirtualGraph;

use crate::common::{dag_corpus, ensure};

/// Up to ten valid joins and leaves, checked against a scratch copy of the
/// virtual graph so that every event applies.
fn script(net: &Network, rng: &mut ChaCha8Rng, tag: usize) -> Vec<ChurnEvent> {
    let mut vg = VirtualGraph::transform(net);
    let mut names: Vec<String> = net.nodes.iter().map(|n| n.id.clone()).collect();
    let target = rng.gen_range(1..=10);
    let mut events = Vec::new();
    let mut attempts = 0;
    while events.len() < target && attempts < 200 {
        attempts += 1;
        if rng.gen_bool(0.4) {
            let Some(link) = vg.link_ids().choose(rng).cloned() else { continue };
            vg.leave_link(&link).expect("listed link");
            events.push(ChurnEvent::Leave { link });
        } else {
            let tail = names.choose(rng).unwrap().clone();
            let head = if rng.gen_bool(0.2) { format!("w{tag}_{attempts}") } else { names.choose(rng).unwrap().clone() };
            if vg.join_link(&tail, &head).is_ok() {
                if !names.contains(&head) {
                    names.push(head.clone());
                }
                events.push(ChurnEvent::Join { tail, head });
            }
        }
    }
    events
}

pub fn robustness() -> Result<String, String> {
    let nets = dag_corpus(50, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let scripts: Vec<Vec<ChurnEvent>> = nets.iter().enumerate().map(|(i, n)| script(n, &mut rng, i)).collect();
    let eps = 0.2;
    let mut summary = Vec::new();
    for design in Design::ALL {
        let (mut eligible, mut failing) = (0usize, 0usize);
        for (i, (net, events)) in nets.iter().zip(&scripts).enumerate() {
            let x = random_messages(i as u64, 2, 64);
            let params = DesignParams::new(2, eps, net.sinks.len(), 500 + i as u64);
            let steps = robustness_scenario(net, design, params, &x, events).map_err(|e| format!("{design} script {i}: {e}"))?;
            for (k, s) in steps.iter().enumerate() {
                ensure!(s.changed.is_empty(), "{design} script {i} step {k}: {} coefficients changed", s.changed.len());
                ensure!(s.degree_violations == 0 && s.path_violations == 0, "{design} script {i} step {k}: gadget invariants broken");
                let covered: Vec<_> = s.report.sinks.iter().filter(|t| t.min_cut >= 2).collect();
                if covered.is_empty() {
                    continue;
                }
                eligible += 1;
                let ok = covered.iter().all(|t| t.decodable && t.decode_ok);
                if design.is_deterministic() {
                    ensure!(ok, "{design} script {i} step {k}: a sink with min-cut >= 2 failed to decode");
                } else {
                    failing += usize::from(!ok);
                }
            }
        }
        let p = failing as f64 / eligible.max(1) as f64;
        let ci = 1.96 * (p * (1.0 - p) / eligible.max(1) as f64).sqrt();
        ensure!(p <= eps + 3.0 * ci, "{design}: failure rate {p:.3} over churn steps exceeds {eps} + 3·ci95");
        summary.push(format!("{design} {failing}/{eligible}"));
    }
    let events: usize = scripts.iter().map(Vec::len).sum();
    Ok(format!(
        "50 scripts, {events} events, no existing coefficient changed; failing steps with min-cut >= 2: {}",
        summary.join(", ")
    ))
}

