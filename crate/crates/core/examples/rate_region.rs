//! Inner-bound region and outer sum-rate line of a noisy-receiver channel,
//! written as CSV to a temporary directory.

use fsmac::optimize::OptimizerConfig;
use fsmac::regions::{inner_bound_region, lambda_grid, save_region, ScenarioDescriptor, DEFAULT_LAMBDA_SAMPLES};
use fsmac::spec_file::load_channel;

fn main() -> fsmac::Result<()> {
    let model = load_channel(concat!(env!("CARGO_MANIFEST_DIR"), "/data/noisy_receiver.json"))?;
    let scenario = ScenarioDescriptor::default_for(&model);
    let region = inner_bound_region(&model, &scenario, &lambda_grid(DEFAULT_LAMBDA_SAMPLES), &OptimizerConfig::default())?;
    println!("scenario {}", scenario.kind.name());
    println!("outer sum rate {:.6}", region.outer_sum_rate.unwrap_or(f64::NAN));
    for (ra, rb) in &region.hull {
        println!("  ({ra:.6}, {rb:.6})");
    }
    let dir = std::env::temp_dir().join("fsmac_rate_region");
    std::fs::create_dir_all(&dir).map_err(|source| fsmac::Error::Io { path: dir.clone(), source })?;
    save_region(&region, &dir.join("hull.csv"), &dir.join("pieces.csv"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
