//! Loading an experiment from TOML and writing its metrics CSV.

use msad::{parse_config, run_experiment};

const CONFIG: &str = r#"
topology = "circle"
beta = 0.9
alpha = 0.2
total_steps = 800

[environment]
period = 200
"#;

fn main() -> msad::Result<()> {
    let mut config = parse_config(CONFIG)?;
    config.output_path = std::env::temp_dir().join("msad_circle.csv");
    let result = run_experiment(&config)?;
    println!("{}", config.to_toml());
    println!(
        "wrote {} rows to {}; mean profit {:.2}",
        result.rows.len(),
        config.output_path.display(),
        result.mean_profit(0, 800)?
    );
    Ok(())
}
