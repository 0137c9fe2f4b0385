//! Smoothed flows: with gamma below one, estimates approach their targets
//! geometrically instead of jumping.

use msad::flows::update_bottom_up_flows;
use msad::{Environment, ModelParams, SystemGraph};

fn main() -> msad::Result<()> {
    let env = Environment::fixed(vec![0.3, 0.1])?;
    for gamma in [1.0, 0.5, 0.2] {
        let mut g = SystemGraph::new();
        let root = g.add_decision();
        let a = g.add_service([1], 60.0);
        let b = g.add_service([2], 40.0);
        g.add_edge(root, a)?;
        g.add_edge(root, b)?;

        let params = ModelParams::default().with_gammas(gamma);
        let trace: Vec<String> = (0..8)
            .map(|t| {
                update_bottom_up_flows(&mut g, &params, &env, t)?;
                Ok(format!("{:.1}", g.up_assets(root)))
            })
            .collect::<msad::Result<_>>()?;
        println!("gamma {gamma}: root asset estimate {}", trace.join(" -> "));
    }
    Ok(())
}
