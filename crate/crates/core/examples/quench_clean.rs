//! Clean-ring quench: entanglement entropy and string correlation versus
//! time, showing linear growth, saturation, and the finite-size revival
//! dip near t = N / (2 v_max). Runs in a few seconds.

use quench_ising::chain::ChainSpec;
use quench_ising::cleantheory::revival_period;
use quench_ising::freefermion::{diagonalize_chain, Quench};
use quench_ising::observables::{correlation_xx, entanglement_entropy};

fn main() -> quench_ising::Result<()> {
    let n = 128;
    let (h0, h) = (0.0, 0.5);
    let d = 32;

    let initial = ChainSpec::uniform(n, 1.0, h0)?;
    let fin = ChainSpec::uniform(n, 1.0, h)?;
    let quench = Quench::new(&diagonalize_chain(&initial)?, &diagonalize_chain(&fin)?)?;

    let (j, l) = ((n - d) / 2, (n - d) / 2 + d);
    let first = (n - d) / 2 + 1;

    println!("clean quench h0={h0} -> h={h}, N={n}, cut and separation D={d}");
    println!();
    println!("{:>6}  {:>12}  {:>14}", "t", "S(D) [bits]", "C^xx(D)");
    let mut trace = Vec::new();
    for step in 0..=40 {
        let t = 4.0 * step as f64;
        let prop = quench.propagator(t);
        let s = entanglement_entropy(&prop, first, d)?.bits;
        let c = correlation_xx(&prop, j, l)?.magnitude;
        println!("{t:>6.0}  {s:>12.6}  {c:>14.6e}");
        trace.push((t, s));
    }

    // The revival shows up as a local entropy minimum one wrap time in.
    let t_q = revival_period(n, h)?;
    let dip = trace
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1].0)
        .find(|&t| t > 0.5 * t_q);
    println!();
    println!("expected revival period N/(2 v_max) = {t_q}");
    match dip {
        Some(t) => println!("entropy dips at t = {t} on this grid"),
        None => println!("no dip resolved on this coarse grid"),
    }
    Ok(())
}
