//! Acceptance suite: one test per advertised guarantee, numbered so the
//! per-test result line doubles as the criterion's pass/fail line. Run
//! with `--nocapture` to see the measured values behind each verdict.
//!
//! The whole suite is sized for a desk machine but not for a blink:
//! criteria 6 and 7 are disorder averages over hundreds of realizations
//! at N = 512 and N = 256 and take a few minutes each on one core.

use quench_ising::assembly2d::{assemble_entropy, Sector};
use quench_ising::chain::{ChainSpec, DisorderModel, ParitySector};
use quench_ising::cleantheory::{gge, semiclassical_entropy, CleanQuenchSpec};
use quench_ising::freefermion::{diagonalize_chain, Quench};
use quench_ising::localization::{fit_decay, sup_norm_profile, TimeGrid};
use quench_ising::observables::{correlation_xx, entanglement_entropy};
use quench_ising::oracle::{dense_correlation, dense_entropy, dense_evolve, dense_ground_state};
use quench_ising::Error;
use rayon::prelude::*;

/// Quench from fields `h0` everywhere to fields `h` everywhere over the
/// given couplings.
fn quench(couplings: &[f64], h0: f64, h: f64) -> Quench {
    let n = couplings.len();
    let initial = ChainSpec::new(couplings.to_vec(), vec![h0; n]).unwrap();
    let fin = ChainSpec::new(couplings.to_vec(), vec![h; n]).unwrap();
    Quench::new(
        &diagonalize_chain(&initial).unwrap(),
        &diagonalize_chain(&fin).unwrap(),
    )
    .unwrap()
}

/// 1-based site pair at separation `d`, centered in the ring.
fn centered_pair(n: usize, d: usize) -> (usize, usize) {
    let j = ((n - d) / 2).max(1);
    (j, j + d)
}

/// 1-based first site of a centered cut of `len` sites.
fn centered_cut(n: usize, len: usize) -> usize {
    ((n - len) / 2 + 1).max(1)
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let tb = ts.iter().sum::<f64>() / n;
    let yb = ys.iter().sum::<f64>() / n;
    let sxy: f64 = ts.iter().zip(ys).map(|(t, y)| (t - tb) * (y - yb)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tb).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_free_fermion_matches_dense_oracle() {
    let sizes = [6usize, 8, 10];
    let times = [0.0, 0.7, 1.7, 5.0];
    let mut worst_corr = 0.0f64;
    let mut worst_ent = 0.0f64;
    for inst in 0..20usize {
        let n = sizes[inst % sizes.len()];
        let model = DisorderModel::new(0.5, 0.5, n, 41).unwrap();
        let spec = model.sample_chain(inst as u64);
        let initial = ChainSpec::new(spec.couplings.clone(), vec![0.0; n]).unwrap();
        let q = quench(&spec.couplings, 0.0, 0.5);
        let ground = dense_ground_state(&initial, ParitySector::EvenParity).unwrap();
        for &t in &times {
            let prop = q.propagator(t);
            let dense = dense_evolve(&ground.state, &spec, t).unwrap();
            for j in 1..n {
                for l in (j + 1)..=n {
                    let free = correlation_xx(&prop, j, l).unwrap().magnitude;
                    let exact = dense_correlation(&dense, j, l).unwrap().abs();
                    worst_corr = worst_corr.max((free - exact).abs());
                }
            }
            for (first, len) in [(1, 1), (1, 2), (2, 2), (1, n / 2)] {
                let free = entanglement_entropy(&prop, first, len).unwrap().bits;
                let exact = dense_entropy(&dense, first, len).unwrap();
                worst_ent = worst_ent.max((free - exact).abs());
            }
        }
    }
    println!(
        "criterion 1: 20 instances, worst correlation deviation {worst_corr:.3e} \
         (tolerance 1e-8), worst entropy deviation {worst_ent:.3e} bits (tolerance 1e-7)"
    );
    assert!(worst_corr < 1e-8, "correlation deviation {worst_corr:.3e}");
    assert!(worst_ent < 1e-7, "entropy deviation {worst_ent:.3e}");
}

#[test]
fn criterion_02_clean_correlation_asymptote() {
    let n = 512;
    let prop = quench(&vec![1.0; n], 0.0, 0.5).propagator(200.0);
    let factor = (1.0 + 0.75f64.sqrt()) / 2.0;
    for d in [8usize, 16, 32] {
        let (j, l) = centered_pair(n, d);
        let got = correlation_xx(&prop, j, l).unwrap().magnitude;
        let want = factor.powi(d as i32 + 1);
        let rel = (got - want).abs() / want;
        println!(
            "criterion 2: D={d} |C|={got:.6e} asymptote={want:.6e} rel {rel:.4} (tolerance 0.02)"
        );
        assert!(rel <= 0.02, "D={d} off by {rel:.4}");
    }
}

#[test]
fn criterion_03_static_ghz_values() {
    let n = 64;
    let prop = quench(&vec![1.0; n], 0.0, 0.5).propagator(0.0);
    let (j, l) = centered_pair(n, 16);
    let corr = correlation_xx(&prop, j, l).unwrap().magnitude;
    let half = entanglement_entropy(&prop, 1, n / 2).unwrap().bits;
    println!("criterion 3: t=0 correlation {corr:.12}, half-chain entropy {half:.12} bits");
    assert!((corr - 1.0).abs() < 1e-8, "correlation {corr}");
    assert!((half - 1.0).abs() < 1e-8, "entropy {half}");
}

#[test]
fn criterion_04_revival_quasi_period() {
    let n = 256;
    let d = 64;
    let q = quench(&vec![1.0; n], 0.0, 0.5);
    let first = centered_cut(n, d);
    let ts: Vec<f64> = (110..=146).map(f64::from).collect();
    let ss: Vec<f64> = ts
        .par_iter()
        .map(|&t| entanglement_entropy(&q.propagator(t), first, d).unwrap().bits)
        .collect();
    let mut best = 0;
    for i in 0..ss.len() {
        if ss[i] < ss[best] {
            best = i;
        }
    }
    let t_min = ts[best];
    println!(
        "criterion 4: S(D=64,t) minimum at t={t_min} (S={:.4} bits), window [120,136], T_q=128",
        ss[best]
    );
    assert!(best > 0 && best + 1 < ss.len(), "minimum at grid edge");
    assert!(
        ss[best] < ss[best - 1] && ss[best] < ss[best + 1],
        "not a strict local minimum"
    );
    assert!(
        (120.0..=136.0).contains(&t_min),
        "minimum at t={t_min}, outside [120,136]"
    );
}

#[test]
fn criterion_05_linear_growth_slope() {
    let n = 512;
    let d = 128;
    let q = quench(&vec![1.0; n], 0.0, 0.5);
    let first = centered_cut(n, d);
    let spec = CleanQuenchSpec::new(0.0, 0.5, None).unwrap();
    let ts: Vec<f64> = vec![10.0, 20.0, 30.0, 40.0, 50.0];
    let exact: Vec<f64> = ts
        .par_iter()
        .map(|&t| entanglement_entropy(&q.propagator(t), first, d).unwrap().bits)
        .collect();
    let semi: Vec<f64> = ts
        .iter()
        .map(|&t| semiclassical_entropy(&spec, d, t).unwrap())
        .collect();
    let s_exact = slope(&ts, &exact);
    let s_semi = slope(&ts, &semi);
    let rel = (s_exact - s_semi).abs() / s_semi;
    println!(
        "criterion 5: S(D=128) slope over t in [10,50]: exact {s_exact:.6} bits/t, \
         semiclassical {s_semi:.6} bits/t, rel {rel:.4} (tolerance 0.05)"
    );
    assert!(rel <= 0.05, "slope off by {rel:.4}");
}

#[test]
fn criterion_06_localization_saturation() {
    let n = 512;
    let t = 250.0;
    let realizations = 200u64;
    // Four anchor pairs per realization; the shared left edge cancels its
    // fluctuation in each S(256) - S(128) difference exactly, and the
    // anchors are farther apart than the localization length, so the
    // estimator averages twelve effectively independent cut edges.
    let anchors = [65usize, 97, 129, 161];
    let (j64, l64) = centered_pair(n, 64);

    let per_real: Vec<(f64, f64, f64)> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let spec = DisorderModel::new(0.5, 0.5, n, 7).unwrap().sample_chain(r);
            let prop = quench(&spec.couplings, 0.0, 0.5).propagator(t);
            let mut s128 = 0.0;
            let mut s256 = 0.0;
            for &a in &anchors {
                s128 += entanglement_entropy(&prop, a, 128).unwrap().bits / 4.0;
                s256 += entanglement_entropy(&prop, a, 256).unwrap().bits / 4.0;
            }
            let c64 = correlation_xx(&prop, j64, l64).unwrap().magnitude;
            (s128, s256, c64)
        })
        .collect();
    let r = realizations as f64;
    let s128 = per_real.iter().map(|v| v.0).sum::<f64>() / r;
    let s256 = per_real.iter().map(|v| v.1).sum::<f64>() / r;
    let c64 = per_real.iter().map(|v| v.2).sum::<f64>() / r;

    let clean = quench(&vec![1.0; n], 0.0, 0.5).propagator(t);
    let mut clean128 = 0.0;
    let mut clean256 = 0.0;
    for &a in &anchors {
        clean128 += entanglement_entropy(&clean, a, 128).unwrap().bits / 4.0;
        clean256 += entanglement_entropy(&clean, a, 256).unwrap().bits / 4.0;
    }
    let clean_c64 = correlation_xx(&clean, j64, l64).unwrap().magnitude;

    let gap = s256 - s128;
    let clean_gap = clean256 - clean128;
    let ratio = c64 / clean_c64;
    println!(
        "criterion 6: eps=0.5 S(256)-S(128) = {gap:.4} bits (threshold 0.05); \
         clean gap {clean_gap:.4} bits (threshold 0.5); \
         C(64) disordered {c64:.4} vs clean {clean_c64:.4}, ratio {ratio:.2} (threshold 10)"
    );
    assert!(gap < 0.05, "disordered entropy still grows: {gap:.4} bits");
    assert!(clean_gap > 0.5, "clean entropy gap only {clean_gap:.4} bits");
    assert!(ratio > 10.0, "correlation ratio only {ratio:.2}");
}

#[test]
fn criterion_07_localization_bound_fit() {
    let n = 256;
    let grid = TimeGrid::new(500.0);
    let distances = [16usize, 32, 48, 64, 96, 112, 128];
    let profile = |epsilon: f64, realizations: usize| {
        let model = DisorderModel::new(epsilon, 0.5, n, 31).unwrap();
        sup_norm_profile(&model, &grid, &distances, realizations).unwrap()
    };

    let fit_half = fit_decay(&profile(0.5, 200)).unwrap();
    let fit_quarter = fit_decay(&profile(0.25, 200)).unwrap();
    // Raw eta values at different fitted zeta are not comparable (eta
    // carries units of d^(-zeta)), so the ordering is asserted on the
    // constrained zeta = 1 companion fits both results carry.
    let (e5, s5) = (fit_half.zeta1.eta_fit, fit_half.zeta1.eta_stderr);
    let (e25, s25) = (fit_quarter.zeta1.eta_fit, fit_quarter.zeta1.eta_stderr);
    println!(
        "criterion 7: eta(0.5) = {e5:.5} +- {s5:.5} (free zeta {:.3}), \
         eta(0.25) = {e25:.5} +- {s25:.5} (free zeta {:.3})",
        fit_half.zeta_fit, fit_quarter.zeta_fit
    );
    assert!(
        e5 - e25 > 2.0 * (s5 * s5 + s25 * s25).sqrt(),
        "eta(0.5) = {e5:.5} does not exceed eta(0.25) = {e25:.5} significantly"
    );
    assert!(e25 > 2.0 * s25, "eta(0.25) = {e25:.5} consistent with zero");

    // The deterministic clean control must be refused, not fitted.
    match fit_decay(&profile(0.0, 2)) {
        Err(Error::DecayFitRejected(reason)) => {
            println!("criterion 7: clean fit rejected: {reason}");
        }
        Ok(fit) => panic!(
            "clean profile was fitted: eta {:.4} zeta {:.4} C {:.4}",
            fit.eta_fit, fit.zeta_fit, fit.c_fit
        ),
        Err(other) => panic!("clean profile errored unexpectedly: {other:?}"),
    }
}

#[test]
fn criterion_08_te_assembly_exact() {
    let m_rows = 5usize;
    let rows = vec![1.0f64; 2 * m_rows];
    let x = assemble_entropy(&rows, Sector::XSector).unwrap();
    let z = assemble_entropy(&rows, Sector::ZSector).unwrap();
    println!(
        "criterion 8: 2M = {} GHZ rows -> x-sector S = {}, z-sector S = {}, gamma = {}",
        2 * m_rows,
        x.total_bits,
        z.total_bits,
        z.gamma_topo
    );
    assert_eq!(x.total_bits, 10.0);
    assert_eq!(z.total_bits, 9.0);
    assert_eq!(z.gamma_topo, 1.0);
    assert!(x.convention_dependent);
}

#[test]
fn criterion_09_gge_consistency() {
    let spec = CleanQuenchSpec::new(0.0, 0.5, None).unwrap();
    let density = gge(&spec).unwrap().entropy_density_bits;
    let d = 64;
    let per_site = semiclassical_entropy(&spec, d, 1e9).unwrap() / d as f64;
    let rel = (per_site - density).abs() / density;
    println!(
        "criterion 9: semiclassical S(D,inf)/D = {per_site:.8} bits vs GGE density \
         {density:.8} bits, rel {rel:.2e} (tolerance 0.01)"
    );
    assert!(rel <= 0.01, "GGE mismatch {rel:.3e}");
}

#[test]
fn criterion_10_numerical_hygiene() {
    // The library already hard-errors when a correlation determinant
    // falls below -1e-8 or a mode weight leaves [0, 1+1e-6], so criteria
    // 1 through 6 passing is itself a hygiene statement. This test
    // samples representative workloads from each and asserts the bounds
    // on the reported values directly.
    let mut min_det = f64::INFINITY;
    let mut nu_lo = f64::INFINITY;
    let mut nu_hi = f64::NEG_INFINITY;
    let mut dets = 0usize;
    let mut nus = 0usize;

    let mut scan = |prop: &quench_ising::QuenchPropagator, pairs: &[(usize, usize)], cuts: &[(usize, usize)]| {
        for &(j, l) in pairs {
            let c = correlation_xx(prop, j, l).unwrap();
            min_det = min_det.min(c.det);
            dets += 1;
        }
        for &(first, len) in cuts {
            let e = entanglement_entropy(prop, first, len).unwrap();
            for &v in &e.nu {
                nu_lo = nu_lo.min(v);
                nu_hi = nu_hi.max(v);
                nus += 1;
            }
        }
    };

    // Oracle-scale disordered instances (criterion 1 workload).
    for inst in 0..3u64 {
        let spec = DisorderModel::new(0.5, 0.5, 10, 41).unwrap().sample_chain(inst);
        let q = quench(&spec.couplings, 0.0, 0.5);
        for t in [0.0, 0.7, 5.0] {
            let prop = q.propagator(t);
            let pairs: Vec<(usize, usize)> = (2..=10).map(|l| (1, l)).collect();
            scan(&prop, &pairs, &[(1, 5)]);
        }
    }
    // Clean chain at N = 512 (criteria 2 through 5 workloads).
    let clean = quench(&vec![1.0; 512], 0.0, 0.5);
    for t in [0.0, 30.0, 200.0, 250.0] {
        let prop = clean.propagator(t);
        scan(
            &prop,
            &[centered_pair(512, 8), centered_pair(512, 32), centered_pair(512, 64)],
            &[(centered_cut(512, 128), 128)],
        );
    }
    // Disordered chains at N = 512 (criterion 6 workload).
    for r in 0..3u64 {
        let spec = DisorderModel::new(0.5, 0.5, 512, 7).unwrap().sample_chain(r);
        let prop = quench(&spec.couplings, 0.0, 0.5).propagator(250.0);
        scan(
            &prop,
            &[centered_pair(512, 64), centered_pair(512, 128)],
            &[(129, 128), (129, 256)],
        );
    }

    println!(
        "criterion 10: {dets} determinants, min {min_det:.3e} (bound -1e-8); \
         {nus} mode weights in [{nu_lo:.3e}, {nu_hi:.9}] (bounds [0, 1+1e-6])"
    );
    assert!(min_det >= -1e-8, "determinant {min_det:.3e} below bound");
    assert!(nu_lo >= 0.0, "mode weight {nu_lo:.3e} below zero");
    assert!(nu_hi <= 1.0 + 1e-6, "mode weight {nu_hi} above bound");
}
