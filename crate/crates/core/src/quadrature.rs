//! Adaptive quadrature used by the non-analytic field kinds.

use crate::error::{CcError, Result};
use crate::geometry::CellClass;
use num_complex::Complex64;

pub const DEFAULT_EVAL_CAP: u64 = 10_000_000;

/// Adaptive Simpson on [a, b] with relative tolerance `rel_tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    eval_cap: u64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut evals: u64 = 0;
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    evals += 3;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(
        f, a, b, fa, fm, fb, whole, rel_tol, 30, &mut evals, eval_cap,
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    depth: u32,
    evals: &mut u64,
    eval_cap: u64,
) -> Result<f64> {
    if *evals > eval_cap {
        return Err(CcError::QuadratureBudgetExceeded(*evals));
    }
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * lm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * rm + fb);
    let delta = left + right - whole;
    let scale = whole.abs().max(left.abs() + right.abs()).max(1e-300);
    if depth == 0 || delta.abs() <= 15.0 * rel_tol * scale.max(1e-14) {
        Ok(left + right + delta / 15.0)
    } else {
        let l = simpson_rec(
            f,
            a,
            m,
            fa,
            lm,
            fm,
            left,
            rel_tol,
            depth - 1,
            evals,
            eval_cap,
        )?;
        let r = simpson_rec(
            f,
            m,
            b,
            fm,
            rm,
            fb,
            right,
            rel_tol,
            depth - 1,
            evals,
            eval_cap,
        )?;
        Ok(l + r)
    }
}

/// Adaptive 2D integral of a density over `region ∩ bbox`.
///
/// `classify` reports how a cell sits relative to the region;
/// `cell_mass` returns the exact density integral over a full cell.
/// Partial cells are subdivided; once a cell is smaller than the local
/// resolution limit its mass is weighted by a sampled coverage fraction.
pub fn integrate_region<C, M>(
    lo: Complex64,
    hi: Complex64,
    classify: &C,
    cell_mass: &M,
    abs_tol: f64,
    eval_cap: u64,
) -> Result<f64>
where
    C: Fn(Complex64, Complex64) -> CellClass,
    M: Fn(Complex64, Complex64) -> f64,
{
    let mut evals: u64 = 0;
    let diam = ((hi - lo).re.abs()).max((hi - lo).im.abs());
    if diam <= 0.0 {
        return Ok(0.0);
    }
    let min_size = (diam * 1e-4).max(abs_tol.sqrt() * 1e-3);
    let mut total = 0.0;
    let mut stack = vec![(lo, hi, 0u32)];
    while let Some((clo, chi, depth)) = stack.pop() {
        evals += 1;
        if evals > eval_cap {
            return Err(CcError::QuadratureBudgetExceeded(evals));
        }
        match classify(clo, chi) {
            CellClass::Outside => {}
            CellClass::Inside => total += cell_mass(clo, chi),
            CellClass::Partial => {
                let w = chi.re - clo.re;
                let h = chi.im - clo.im;
                if depth >= 40 || (w <= min_size && h <= min_size) {
                    // coverage fraction from a 4x4 sample of the cell
                    let mut hits = 0;
                    for i in 0..4 {
                        for j in 0..4 {
                            let p = Complex64::new(
                                clo.re + (i as f64 + 0.5) * w / 4.0,
                                clo.im + (j as f64 + 0.5) * h / 4.0,
                            );
                            let eps = 1e-12;
                            if classify(p, Complex64::new(p.re + eps, p.im + eps))
                                != CellClass::Outside
                            {
                                hits += 1;
                            }
                        }
                    }
                    total += cell_mass(clo, chi) * (hits as f64) / 16.0;
                } else {
                    let mx = 0.5 * (clo.re + chi.re);
                    let my = 0.5 * (clo.im + chi.im);
                    stack.push((clo, Complex64::new(mx, my), depth + 1));
                    stack.push((
                        Complex64::new(mx, clo.im),
                        Complex64::new(chi.re, my),
                        depth + 1,
                    ));
                    stack.push((
                        Complex64::new(clo.re, my),
                        Complex64::new(mx, chi.im),
                        depth + 1,
                    ));
                    stack.push((Complex64::new(mx, my), chi, depth + 1));
                }
            }
        }
    }
    Ok(total)
}
