//! Mean profit for every topology across competition factors, with the
//! smaller relocation rate used for the comparison table.

use msad::config::ExperimentConfig;
use msad::experiment::{run_sweep, DEFAULT_SWEEP_WINDOW};
use msad::TopologyKind;

fn main() -> msad::Result<()> {
    let mut base = ExperimentConfig::paper(TopologyKind::GrowableTree, 0.0);
    base.params.alpha = 0.2;
    let betas = [0.0, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1];
    let table = run_sweep(&TopologyKind::ALL, &betas, &base, DEFAULT_SWEEP_WINDOW)?;

    print!("{:>5}", "beta");
    for t in &table.topologies {
        print!("{:>12}", t.name());
    }
    println!();
    for (beta, row) in table.betas.iter().zip(&table.cells) {
        print!("{beta:>5.1}");
        for v in row {
            print!("{v:>12.1}");
        }
        println!();
    }
    Ok(())
}
