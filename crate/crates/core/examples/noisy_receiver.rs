//! Reducing a noisy-receiver model to its equivalent complete-CSIR channel,
//! and the deterministic-CSIT scenario on the same model.

use fsmac::model::equivalent_channel;
use fsmac::optimize::{maximize_sum_rate, maximize_team_objective, OptimizerConfig};
use fsmac::regions::{resolve_scenario, ScenarioDescriptor};
use fsmac::spec_file::{load_channel, ChannelModel};

fn main() -> fsmac::Result<()> {
    let model = load_channel(concat!(env!("CARGO_MANIFEST_DIR"), "/data/noisy_receiver.json"))?;
    let ChannelModel::NoisyReceiver(m) = &model else { unreachable!("bundled file is a noisy_receiver spec") };
    let config = OptimizerConfig::default();

    let reduced = equivalent_channel(m)?;
    println!("equivalent channel rows:");
    for row in reduced.channel().to_rows() {
        println!("  {row:?}");
    }
    let sum = maximize_sum_rate(&reduced, &config)?;
    println!("sum rate with noisy encoder CSI  {:.6}", sum.value);

    // encoders told s^r itself (a) and nothing (b)
    let det = ScenarioDescriptor::deterministic(vec![0, 1], vec![0, 0]);
    let problem = resolve_scenario(&model, &det, config.enumeration_limit)?;
    let best = maximize_team_objective(problem.kernel(), (1.0, 0.0, 0.0), &config)?;
    println!("sum rate with fA = id, fB = 0    {:.6}", best.value);
    Ok(())
}
