//! One run of the fixed tree under the switching environment, printing how
//! assets follow the best region.

use msad::{Environment, ModelParams, Simulation, TopologyKind};

fn main() -> msad::Result<()> {
    let params = ModelParams::default().with_beta(0.7);
    let sim =
        Simulation::from_topology(TopologyKind::FixedTree, 100.0, params, Environment::paper())?;
    let result = sim.run(1200)?;

    println!("step  profit  region 1..8");
    for row in result
        .rows
        .iter()
        .filter(|r| [0, 100, 399, 400, 450, 799, 800, 1199].contains(&r.step))
    {
        let regions: Vec<String> = row
            .region_assets
            .iter()
            .map(|a| format!("{a:5.1}"))
            .collect();
        println!("{:4}  {:6.2}  {}", row.step, row.profit, regions.join(" "));
    }
    println!(
        "mean profit over the first 800 steps: {:.2}",
        result.mean_profit(0, 800)?
    );
    Ok(())
}
