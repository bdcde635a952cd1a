//! Binary multiplier channel with noisy receiver CSI, swept over the
//! receiver's CSI noise.

use fsmac::information::binary_entropy;
use fsmac::model::BinaryMultiplierSpec;
use fsmac::optimize::OptimizerConfig;
use fsmac::verify::verify_binary_multiplier;

fn main() -> fsmac::Result<()> {
    println!("pR     1-h2(pR)  optimizer  verdict");
    for p_r in [0.0, 0.05, 0.1, 0.2, 0.3] {
        let spec = BinaryMultiplierSpec { p_s: 0.5, p_r };
        let r = verify_binary_multiplier(&spec, &OptimizerConfig::default())?;
        println!(
            "{p_r:<6} {:.6}  {:.6}   {}",
            1.0 - binary_entropy(p_r),
            r.value_of("optimizer sum-rate").unwrap_or(f64::NAN),
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
