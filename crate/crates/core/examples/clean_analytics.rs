//! Closed-form clean-chain results: dispersion extremes, the fastest
//! quasiparticle, semiclassical entropy/correlation growth, and the
//! stationary-ensemble summary the growth saturates to. Instant.

use quench_ising::cleantheory::{
    dispersion, gge, max_group_velocity, revival_period, semiclassical_correlation,
    semiclassical_entropy, static_laws, CleanQuenchSpec, StaticLaw,
};

fn main() -> quench_ising::Result<()> {
    let (h0, h) = (0.0, 0.5);
    let n = 256;
    let spec = CleanQuenchSpec::new(h0, h, Some(n))?;

    println!("quench h0={h0} -> h={h} on the clean ring");
    println!(
        "dispersion: omega(0) = {}, omega(pi) = {}",
        dispersion(h, 0.0),
        dispersion(h, std::f64::consts::PI)
    );
    let (p_star, v_max) = max_group_velocity(h);
    println!("fastest quasiparticle: v_max = {v_max:.6} at p* = {p_star:.6}");
    println!("revival period N/(2 v_max) = {}", revival_period(n, h)?);
    println!();

    let summary = gge(&spec)?;
    println!(
        "stationary ensemble: 1/xi_eff = {:.8}, entropy density = {:.8} bits/site",
        summary.inverse_xi_eff, summary.entropy_density_bits
    );
    match static_laws(1.0, h)? {
        StaticLaw::Perimeter {
            limit_correlator,
            alpha,
        } => println!(
            "static ground state: perimeter law, limit correlator {limit_correlator:.6}, alpha = {alpha:.6}"
        ),
        StaticLaw::Area { xi } => println!("static ground state: area law, xi = {xi:.6}"),
    }
    println!();

    println!(
        "{:>6} {:>6}  {:>14}  {:>14}",
        "t", "D", "S(D,t) [bits]", "corr exponent"
    );
    for &t in &[10.0, 25.0, 50.0, 1e6] {
        for &d in &[32usize, 64, 128] {
            println!(
                "{t:>6.0} {d:>6}  {:>14.6}  {:>14.6}",
                semiclassical_entropy(&spec, d, t)?,
                semiclassical_correlation(&spec, d, t)?
            );
        }
    }
    println!();
    println!(
        "late-time check: S(D,inf)/D -> entropy density, exponent/D -> -1/xi_eff"
    );
    let d = 128;
    println!(
        "  S/D = {:.8} vs {:.8}",
        semiclassical_entropy(&spec, d, 1e9)? / d as f64,
        summary.entropy_density_bits
    );
    println!(
        "  exponent/D = {:.8} vs {:.8}",
        semiclassical_correlation(&spec, d, 1e9)? / d as f64,
        -summary.inverse_xi_eff
    );
    Ok(())
}
