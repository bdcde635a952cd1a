//! Modulo-additive channel: the sum rate equals `log q - H_min`.
//!
//! Runs the bundled binary instance and a ternary instance whose noise does
//! not depend on the state alone.

use fsmac::model::{build_modulo_additive, ModuloAdditiveSpec, StochasticKernel};
use fsmac::optimize::{h_min_bruteforce, maximize_sum_rate, OptimizerConfig};
use fsmac::spec_file::{load_spec, SpecFile};
use fsmac::verify::verify_modulo_example;

fn report(name: &str, spec: &ModuloAdditiveSpec) -> fsmac::Result<()> {
    let h = h_min_bruteforce(spec)?;
    let best = maximize_sum_rate(&build_modulo_additive(spec)?, &OptimizerConfig::default())?;
    println!("{name}: H_min = {:.6}, log q - H_min = {:.6}, optimizer = {:.6}", h.value, (spec.q as f64).log2() - h.value, best.value);
    Ok(())
}

fn main() -> fsmac::Result<()> {
    let SpecFile::ModuloAdditive(binary) = load_spec(concat!(env!("CARGO_MANIFEST_DIR"), "/data/modulo_q2.json"))? else {
        unreachable!("bundled file is a modulo_additive spec")
    };
    report("q = 2", &binary)?;
    print!("{}", verify_modulo_example(&binary, &OptimizerConfig::default())?.to_text());

    let csi = StochasticKernel::from_rows("csi", &[vec![0.8, 0.2], vec![0.3, 0.7]], 1e-9)?;
    let ternary = ModuloAdditiveSpec {
        q: 3,
        state_dist: vec![0.5, 0.5],
        csi_a: csi.clone(),
        csi_b: csi,
        noise_given_state: StochasticKernel::from_rows("z", &[vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8]], 1e-9)?,
    };
    report("q = 3", &ternary)
}
