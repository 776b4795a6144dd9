//! Small numeric utilities: adaptive quadrature with known interior kinks,
//! 1D minimization, root bracketing, the spectral norm of a complex 2x2
//! block, and jackknife error estimates for disorder averages.

use crate::{Error, Result};
use num_complex::Complex64;

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
///
/// Tolerates integrable log-type singularities at the endpoints: a
/// non-finite endpoint sample is replaced by one nudged `1e-14 (b-a)`
/// inside, and a subinterval that still disagrees once it has shrunk to
/// `2^-52` of the span is accepted as is. Both truncations sit far below
/// any tolerance used in this crate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("non-finite interval".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    let nudge = 1e-14 * (b - a);
    let mut fa = f(a);
    if !fa.is_finite() {
        fa = f(a + nudge);
    }
    let mut fb = f(b);
    if !fb.is_finite() {
        fb = f(b - nudge);
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !(fa.is_finite() && fm.is_finite() && fb.is_finite()) {
        return Err(Error::Quadrature(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let whole = simpson(a, b, fa, fm, fb);
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, tol, 52)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Quadrature(format!(
            "integrand not integrable on [{a}, {b}]"
        )))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.is_finite() && delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        // The interval has shrunk to 2^-52 of the original span. Around an
        // integrable singularity its true mass is below any usable
        // tolerance, so a finite estimate is accepted rather than failed.
        let estimate = left + right;
        if estimate.is_finite() {
            return Ok(estimate);
        }
        return Err(Error::Quadrature(format!(
            "max recursion depth at [{a}, {b}]"
        )));
    }
    let half = 0.5 * tol;
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

/// Integrates `f` over `[a, b]` splitting at the interior points `kinks`
/// (values outside `(a, b)` are ignored). Each smooth piece is handled by
/// [`adaptive_simpson`].
pub fn integrate_with_kinks<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    kinks: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|p| *p > a && *p < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);
    let per_piece = tol / edges.len() as f64;
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], per_piece)?;
    }
    Ok(total)
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`; accurate to `xtol` in the argument.
pub fn golden_min<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// Bisection root of `f` on a bracketing interval `[a, b]` (`f(a)` and
/// `f(b)` of opposite signs) to argument tolerance `xtol`.
pub fn bisect_root<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Quadrature(format!(
            "root not bracketed on [{a}, {b}]"
        )));
    }
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Operator (spectral) norm of a complex 2x2 matrix `[[a, b], [c, d]]`,
/// passed row-major. Closed form via the eigenvalues of `B^dagger B`.
pub fn spectral_norm_2x2(block: [Complex64; 4]) -> f64 {
    let [a, b, c, d] = block;
    let g11 = a.norm_sqr() + c.norm_sqr();
    let g22 = b.norm_sqr() + d.norm_sqr();
    let g12 = a.conj() * b + c.conj() * d;
    let mean = 0.5 * (g11 + g22);
    let disc = (0.5 * (g11 - g22)).powi(2) + g12.norm_sqr();
    (mean + disc.sqrt()).max(0.0).sqrt()
}

/// Pfaffian of a small real antisymmetric matrix by recursive expansion
/// along the first row. Exponential cost; intended for cross-checks with
/// dimension <= 8.
#[cfg(test)]
pub(crate) fn pfaffian_small(m: &ndarray::Array2<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    assert!(n % 2 == 0, "pfaffian needs even dimension");
    assert!(n <= 10, "recursive pfaffian is for small cross-checks only");
    if n == 0 {
        return 1.0;
    }
    if n == 2 {
        return m[[0, 1]];
    }
    let mut acc = 0.0;
    let mut sign = 1.0;
    for j in 1..n {
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let mut minor = ndarray::Array2::<f64>::zeros((n - 2, n - 2));
        for (r, &kr) in keep.iter().enumerate() {
            for (c, &kc) in keep.iter().enumerate() {
                minor[[r, c]] = m[[kr, kc]];
            }
        }
        acc += sign * m[[0, j]] * pfaffian_small(&minor);
        sign = -sign;
    }
    acc
}

/// Mean and plain standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n > 0);
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Delete-1 jackknife standard error of an arbitrary statistic.
///
/// For the sample mean this reproduces the usual `s/sqrt(n)` exactly; for
/// nonlinear statistics it gives the first-order bias-robust error bar.
pub fn jackknife_stderr<F: Fn(&[f64]) -> f64>(xs: &[f64], stat: F) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mut leave_one = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(n - 1);
    for i in 0..n {
        buf.clear();
        buf.extend_from_slice(&xs[..i]);
        buf.extend_from_slice(&xs[i + 1..]);
        leave_one.push(stat(&buf));
    }
    let m = leave_one.iter().sum::<f64>() / n as f64;
    let ss = leave_one.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    ((n as f64 - 1.0) / n as f64 * ss).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_exact_on_polynomials() {
        let f = |x: f64| 3.0 * x * x;
        let v = adaptive_simpson(&f, 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-10);
    }

    #[test]
    fn simpson_log_singularity_integrable() {
        // int_0^1 ln x dx = -1; the -inf endpoint sample is nudged inward.
        let f = |x: f64| x.ln();
        let v = adaptive_simpson(&f, 0.0, 1.0, 1e-9).unwrap();
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-6);
    }

    #[test]
    fn kink_split_handles_abs() {
        let f = |x: f64| x.abs();
        let v = integrate_with_kinks(&f, -1.0, 1.0, &[0.0], 1e-12).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn golden_finds_parabola_min() {
        // Argument accuracy for a smooth minimum saturates near
        // sqrt(machine epsilon); the value converges much further.
        let f = |x: f64| (x - 0.3).powi(2) + 1.0;
        let (x, v) = golden_min(&f, -1.0, 1.0, 1e-10);
        assert_abs_diff_eq!(x, 0.3, epsilon = 5e-7);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bisect_finds_root() {
        let f = |x: f64| x * x - 2.0;
        let r = bisect_root(&f, 0.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::SQRT_2, epsilon = 1e-10);
    }

    #[test]
    fn spectral_norm_matches_singular_value() {
        // [[0, 2], [0, 0]] has spectral norm 2.
        let z = Complex64::new(0.0, 0.0);
        let two = Complex64::new(2.0, 0.0);
        assert_abs_diff_eq!(spectral_norm_2x2([z, two, z, z]), 2.0, epsilon = 1e-14);
        // Unitary has norm 1.
        let c = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, 0.4);
        let s = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, -1.1);
        let u = [c, s, -s.conj(), c.conj()];
        assert_abs_diff_eq!(spectral_norm_2x2(u), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        use ndarray_linalg::Determinant;
        let mut m = ndarray::Array2::<f64>::zeros((6, 6));
        let mut v = 0.3f64;
        for i in 0..6 {
            for j in (i + 1)..6 {
                v = (v * 1.7 + 0.13).sin();
                m[[i, j]] = v;
                m[[j, i]] = -v;
            }
        }
        let pf = pfaffian_small(&m);
        let det = m.det().unwrap();
        assert_abs_diff_eq!(pf * pf, det, epsilon = 1e-10);
    }

    #[test]
    fn jackknife_matches_plain_stderr_for_mean() {
        let xs: Vec<f64> = (0..40).map(|i| (i as f64 * 0.77).sin()).collect();
        let (_, se) = mean_and_stderr(&xs);
        let jk = jackknife_stderr(&xs, |s| s.iter().sum::<f64>() / s.len() as f64);
        assert_abs_diff_eq!(se, jk, epsilon = 1e-12);
    }
}
