use serde::{Deserialize, Serialize};

use crate::algebra::BinaryPoly;
use crate::codes::{extend_registry, vg_registry, CodeAssignment, CoeffKey, Design, DesignParams};
use crate::network::Network;
use crate::transform::VirtualGraph;

use super::{simulate, RunReport, SimError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChurnEvent {
    Join { tail: String, head: String },
    Leave { link: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChurnStep {
    /// `None` for the state before the first event.
    pub event: Option<ChurnEvent>,
    /// Link created or removed by the event.
    pub link: Option<String>,
    pub min_cut: usize,
    pub degree_violations: usize,
    pub path_violations: usize,
    /// Coefficients of surviving nodes that the event altered.
    pub changed: Vec<String>,
    pub report: RunReport,
}

fn key_name(k: &CoeffKey) -> String {
    format!("{k:?}")
}

/// Applies a script of joins and leaves. After each event only the new
/// coding nodes receive coefficients; the step records whether any older
/// coefficient moved, the structural checks and a full decode.
pub fn robustness_scenario(
    net: &Network,
    design: Design,
    params: DesignParams,
    messages: &[BinaryPoly],
    events: &[ChurnEvent],
) -> Result<Vec<ChurnStep>, SimError> {
    let mut vg = VirtualGraph::transform(net);
    let mut reg = vg_registry(&vg);
    let mut ca = CodeAssignment::assign(design, params, &vg, &reg)?;
    let step = |vg: &VirtualGraph, ca: &CodeAssignment, event, link, changed| -> Result<ChurnStep, SimError> {
        Ok(ChurnStep {
            event,
            link,
            min_cut: vg.min_cut(),
            degree_violations: vg.degree_violations().len(),
            path_violations: vg.path_violations().len(),
            changed,
            report: simulate(vg, ca, messages)?,
        })
    };
    let mut steps = vec![step(&vg, &ca, None, None, Vec::new())?];
    for ev in events {
        let link = match ev {
            ChurnEvent::Join { tail, head } => vg.join_link(tail, head)?,
            ChurnEvent::Leave { link } => {
                vg.leave_link(link)?;
                link.clone()
            }
        };
        extend_registry(&mut reg, &vg);
        let before = ca.clone();
        ca.extend(&vg, &reg)?;
        let changed = before.changed_entries(&ca, &vg).iter().map(key_name).collect();
        steps.push(step(&vg, &ca, Some(ev.clone()), Some(link), changed)?);
    }
    Ok(steps)
}
