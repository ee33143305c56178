//! Runs an experiment config in memory through the library, without the
//! command-line front end, and prints the headline scalars.
//!
//! cargo run --example run_experiment -- [config.json]

use semiquant::experiment::{execute, load_config, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => ExperimentConfig::from_json_str(
            r#"{"experiment": "limit-cycle", "params": {"omega": 1, "lambda": 1, "mu": 1}, "dim": 20,
                "sweep": {"lambda": [0.5, 1, 2]}}"#,
        )?,
    };
    let out = execute(&cfg)?;
    for (k, v) in &out.summary {
        println!("{k:<24} {v:.12e}");
    }
    for (name, contents) in &out.files {
        println!("-- {name}: {} lines", contents.lines().count());
    }
    Ok(())
}
