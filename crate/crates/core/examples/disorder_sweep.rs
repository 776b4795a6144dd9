//! Disorder-averaged string correlation and cut entropy at a fixed late
//! time: clean chains scramble (correlations collapse, entropy grows with
//! the cut), strongly disordered chains freeze. Runs in a few seconds.

use quench_ising::chain::{ChainSpec, DisorderModel};
use quench_ising::freefermion::{diagonalize_chain, Quench};
use quench_ising::numeric::{jackknife_stderr, mean_and_stderr};
use quench_ising::observables::{correlation_xx, entanglement_entropy};

fn main() -> quench_ising::Result<()> {
    let n = 128;
    let (h0, h) = (0.0, 0.5);
    let t = 250.0;
    let distances = [8usize, 16, 32, 64];
    let realizations = 12;

    println!("N={n}, quench h0={h0} -> h={h}, t={t}, {realizations} realizations");
    println!();
    println!(
        "{:>8} {:>4}  {:>11} {:>11}  {:>11} {:>11}",
        "epsilon", "D", "C mean", "C err", "S mean", "S err"
    );
    for epsilon in [0.0, 0.5] {
        let model = DisorderModel::new(epsilon, h, n, 7)?;
        let mut corr = vec![Vec::new(); distances.len()];
        let mut ent = vec![Vec::new(); distances.len()];
        for r in 0..realizations {
            let spec = model.sample_chain(r);
            let initial = ChainSpec::new(spec.couplings.clone(), vec![h0; n])?;
            let quench =
                Quench::new(&diagonalize_chain(&initial)?, &diagonalize_chain(&spec)?)?;
            let prop = quench.propagator(t);
            for (di, &d) in distances.iter().enumerate() {
                let j = (n - d) / 2;
                corr[di].push(correlation_xx(&prop, j, j + d)?.magnitude);
                ent[di].push(entanglement_entropy(&prop, j + 1, d)?.bits);
            }
        }
        for (di, &d) in distances.iter().enumerate() {
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            let (cm, _) = mean_and_stderr(&corr[di]);
            let ce = jackknife_stderr(&corr[di], mean);
            let (sm, _) = mean_and_stderr(&ent[di]);
            let se = jackknife_stderr(&ent[di], mean);
            println!(
                "{epsilon:>8.3} {d:>4}  {cm:>11.4e} {ce:>11.1e}  {sm:>11.5} {se:>11.1e}"
            );
        }
    }
    println!();
    println!("disorder pins both columns: correlations stay finite, entropy stops growing");
    Ok(())
}
