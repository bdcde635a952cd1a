//! Strategy form against auxiliary-variable form of the cooperative region,
//! with a reduced sample count.

use fsmac::optimize::OptimizerConfig;
use fsmac::spec_file::load_channel;
use fsmac::verify::{verify_auxiliary_equivalence, AuxiliaryCheck};

fn main() -> fsmac::Result<()> {
    let channel = load_channel(concat!(env!("CARGO_MANIFEST_DIR"), "/data/cooperative_binary.json"))?.reduced()?;
    let check = AuxiliaryCheck {
        samples: 500,
        ..AuxiliaryCheck::default()
    };
    let report = verify_auxiliary_equivalence(&channel, &check, &OptimizerConfig::default())?;
    print!("{}", report.to_text());
    Ok(())
}
