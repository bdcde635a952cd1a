//! Cooperative region (common message plus a private message at encoder b)
//! next to the non-cooperative region of the same channel.

use fsmac::optimize::OptimizerConfig;
use fsmac::regions::{inner_bound_region, lambda_grid, ScenarioDescriptor, ScenarioKind};
use fsmac::spec_file::load_channel;

fn main() -> fsmac::Result<()> {
    let model = load_channel(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cooperative_binary.json"))?;
    let config = OptimizerConfig::default();
    let lambdas = lambda_grid(17);
    for kind in [ScenarioKind::CausalNoisyCsitFullCsir, ScenarioKind::Cooperative] {
        let region = inner_bound_region(&model, &ScenarioDescriptor::new(kind), &lambdas, &config)?;
        println!("{}: max Ra + Rb = {:.6}", kind.name(), region.max_sum());
        for (ra, rb) in &region.hull {
            println!("  ({ra:.6}, {rb:.6})");
        }
    }
    Ok(())
}
