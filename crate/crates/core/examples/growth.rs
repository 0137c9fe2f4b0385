//! The growable tree splitting leaves towards the best region and trimming
//! them again once the environment changes.

use msad::{Environment, ModelParams, Simulation, SystemGraph, TopologyKind};

fn leaves(graph: &SystemGraph) -> String {
    graph
        .leaves()
        .map(|(_, leaf)| {
            let regions: Vec<String> = leaf.regions.iter().map(ToString::to_string).collect();
            format!("[{}]={:.1}", regions.join(","), leaf.resident_assets)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> msad::Result<()> {
    let params = ModelParams::default().with_beta(0.7);
    let mut sim = Simulation::from_topology(
        TopologyKind::GrowableTree,
        100.0,
        params,
        Environment::paper(),
    )?;
    for _ in 0..1200 {
        let row = sim.step()?;
        if [0, 10, 100, 399, 410, 450, 799, 850, 1199].contains(&row.step) {
            println!(
                "t={:<4} nodes={:<2} {}",
                row.step,
                row.node_count,
                leaves(sim.graph())
            );
        }
    }
    Ok(())
}
