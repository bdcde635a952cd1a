//! Monte Carlo random coding on a noisy two-bit channel: error rate against
//! block length at a fixed rate pair.

use fsmac::information::TeamPolicy;
use fsmac::model::{FsMacChannel, StochasticKernel};
use fsmac::simulate::{estimate_error, write_reports_csv, SimulationParams};

fn main() -> fsmac::Result<()> {
    // Y = (Xa, Xb), each bit through a BSC(0.05)
    let p = 0.05;
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|r| {
            let (xa, xb) = (r >> 1, r & 1);
            (0..4)
                .map(|y| {
                    let fa = if y >> 1 == xa { 1.0 - p } else { p };
                    let fb = if y & 1 == xb { 1.0 - p } else { p };
                    fa * fb
                })
                .collect()
        })
        .collect();
    let channel = FsMacChannel::without_csit(1, 2, 2, 4, vec![1.0], StochasticKernel::from_rows("channel", &rows, 1e-12)?)?;
    let policy = TeamPolicy::uniform(2, 2);
    let mut reports = Vec::new();
    for n in [50, 100, 200, 400] {
        let mut params = SimulationParams::new(n, 0.02, 0.02, 100, 1);
        params.epsilon = 0.15;
        reports.push(estimate_error(&channel, &policy, &params)?);
    }
    write_reports_csv(&reports, &mut std::io::stdout()).expect("stdout");
    Ok(())
}
