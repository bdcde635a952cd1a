//! Sum-rate capacity of the XOR MAC, checked against the grid oracle.

use fsmac::optimize::{exhaustive_oracle, maximize_sum_rate, OptimizerConfig, OracleObjective};
use fsmac::spec_file::load_channel;

fn main() -> fsmac::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/xor_mac.json");
    let channel = load_channel(path)?.reduced()?;
    let best = maximize_sum_rate(&channel, &OptimizerConfig::default())?;
    let oracle = exhaustive_oracle(&channel, OracleObjective::SumRate, 8)?;
    println!("sum rate      {:.6}", best.value);
    println!("grid oracle   {:.6}", oracle.value);
    println!("piA           {:?}", best.policy.pi_a());
    println!("piB           {:?}", best.policy.pi_b());
    println!("pentagon      Ra <= {:.6}, Rb <= {:.6}, Ra + Rb <= {:.6}", best.rates.r_a, best.rates.r_b, best.rates.r_sum);
    Ok(())
}
