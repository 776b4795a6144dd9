//! Dynamical-localization certificate: disorder-averaged sup-over-time
//! propagator block norms versus separation, and the decay-law fit.
//! Clean chains spread ballistically and the stretched-exponential fit
//! is rejected; disordered chains produce a clean decay with eta > 0.
//! Runs in a few seconds.

use quench_ising::chain::DisorderModel;
use quench_ising::localization::{fit_decay, sup_norm_profile, TimeGrid};
use quench_ising::Error;

fn main() -> quench_ising::Result<()> {
    let n = 128;
    let h = 0.5;
    let distances = [16usize, 24, 32, 40, 48, 56];
    let realizations = 12;
    let grid = TimeGrid::new(200.0);

    for epsilon in [0.0, 0.5] {
        let model = DisorderModel::new(epsilon, h, n, 31)?;
        eprintln!("profiling epsilon={epsilon} ...");
        let profile = sup_norm_profile(&model, &grid, &distances, realizations)?;
        println!("epsilon = {epsilon}, N = {n}, sup over t in [0, {}]:", grid.t_max);
        println!("{:>6}  {:>12}  {:>10}", "D", "mean sup", "err");
        for s in &profile {
            println!("{:>6}  {:>12.5e}  {:>10.1e}", s.d, s.mean, s.std_error);
        }
        match fit_decay(&profile) {
            Ok(fit) => {
                println!(
                    "fit: C = {:.4}, eta = {:.4}, zeta = {:.4} (rms log residual {:.1e})",
                    fit.c_fit, fit.eta_fit, fit.zeta_fit, fit.residual
                );
                println!(
                    "constrained zeta=1: eta = {:.4} +- {:.4}",
                    fit.zeta1.eta_fit, fit.zeta1.eta_stderr
                );
            }
            Err(Error::DecayFitRejected(reason)) => {
                println!("fit rejected: {reason}");
            }
            Err(other) => return Err(other),
        }
        println!();
    }
    Ok(())
}
