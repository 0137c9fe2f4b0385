//! A hand-built graph: two regional managers sharing a middle leaf, under a
//! fixed environment with one rich region.

use msad::{Environment, ModelParams, Simulation, SystemGraph};

fn main() -> msad::Result<()> {
    let mut g = SystemGraph::new();
    let west = g.add_decision();
    let east = g.add_decision();
    let a = g.add_service([1], 30.0);
    let b = g.add_service([2], 30.0);
    let c = g.add_service([3], 40.0);
    for (parent, child) in [(west, a), (west, b), (east, b), (east, c)] {
        g.add_edge(parent, child)?;
    }
    g.bootstrap_flows();

    let env = Environment::fixed(vec![0.1, 0.2, 0.4])?;
    let params = ModelParams::default().with_beta(1.0).with_alpha(0.5);
    let mut sim = Simulation::new(g, params, env)?;
    for _ in 0..60 {
        let row = sim.step()?;
        if row.step % 10 == 0 {
            println!(
                "t={:<3} profit={:6.2} moved={:5.2}% assets={:?}",
                row.step,
                row.profit,
                row.relocated_pct,
                row.region_assets
                    .iter()
                    .map(|x| (x * 10.0).round() / 10.0)
                    .collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}
