//! Loads a scenario file and writes the population time series as CSV,
//! the same layout the `simulate` subcommand produces.
//!
//! cargo run --example population_csv -- crates/core/scenarios/four_level.json

use std::io::stdout;

use rabi_ladder::cli::{output, ScenarioConfig};
use rabi_ladder::evolution::time_series;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/four_level.json").to_string()
    });
    let cfg = ScenarioConfig::load(path.as_ref())?;
    let model = cfg.model()?;
    let series = time_series(
        &model,
        &cfg.grid(),
        cfg.initial_level,
        &cfg.propagator_options(),
        false,
    )?;
    output::write_csv(&mut stdout().lock(), &series, cfg.n)?;
    Ok(())
}
