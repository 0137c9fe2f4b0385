//! How fast each static topology moves its assets after the best region
//! jumps from one end to the other.

use msad::{Environment, ModelParams, TopologyKind};

fn main() -> msad::Result<()> {
    let env = Environment::paper();
    let params = ModelParams::default().with_beta(0.7);
    for kind in TopologyKind::ALL.into_iter().filter(|k| !k.is_growable()) {
        let result = msad::run(kind, &params, &env, 1200)?;
        let crossover = |from: u64, winner: usize, loser: usize| {
            result
                .rows
                .iter()
                .find(|r| r.step >= from && r.region_assets[winner] > r.region_assets[loser])
                .map(|r| r.step - from)
        };
        println!(
            "{:<12} right side leads {:?} steps after t=400, left side {:?} steps after t=800",
            kind.name(),
            crossover(400, 7, 0),
            crossover(800, 0, 7),
        );
    }
    Ok(())
}
