//! Test-only oracles that evaluate the sectionally analytic function phi(z, k)
//! directly as a path integral along its defining contour, with graded-panel
//! quadrature near the spectral point. Solver modules check their jump and
//! residue formulas against these values; nothing here is used by the solvers
//! themselves.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::geometry::DiskDomain;
use crate::lax::{circle_cut_crossings, lambda_ref_raw};
use crate::oracles::ExactSolution;
use crate::quad::integrate_param;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Panel boundaries on [t0, t1] graded geometrically toward each point of
/// `refine_at` down to `min_size`.
fn graded_breaks(t0: f64, t1: f64, refine_at: &[f64], min_size: f64) -> Vec<f64> {
    let mut breaks = vec![t0, t1];
    for &r0 in refine_at {
        let r = r0.clamp(t0, t1);
        breaks.push(r);
        let mut step = min_size;
        while step < t1 - t0 {
            if r + step < t1 {
                breaks.push(r + step);
            }
            if r - step > t0 {
                breaks.push(r - step);
            }
            step *= 2.0;
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    breaks
}

fn integrate_graded<F: FnMut(f64) -> Complex64>(
    mut f: F,
    t0: f64,
    t1: f64,
    refine_at: &[f64],
    min_size: f64,
) -> Complex64 {
    let breaks = graded_breaks(t0, t1, refine_at, min_size);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        acc += integrate_param(&mut f, w[0], w[1], 16);
    }
    acc
}

/// Direct evaluation of phi(z, k) for the even family alpha = -2m: the path
/// runs from z_r along the circle (lower part for Im k >= Im z, upper part
/// otherwise) to z_l, then along the horizontal segment to z.
pub fn phi_even_direct(
    dom: &DiskDomain,
    u: &ExactSolution,
    m: u32,
    z: Complex64,
    k: Complex64,
) -> Complex64 {
    let a = dom.center();
    let (zl, _zr) = dom.chord_endpoints(z).unwrap();
    let tr = dom.theta_right(z).unwrap();
    let tl = PI - tr;
    let e = -(m as i32) - 1;
    // lower part for Im k >= Im z (theta decreasing), upper otherwise
    let (t_start, t_end) = if k.im >= z.im { (tr, tl - 2.0 * PI) } else { (tr, tl) };

    // candidate angles of the kernel singularities in the traversed range
    let lo = t_start.min(t_end);
    let hi = t_start.max(t_end);
    let mut refine = Vec::new();
    for near in [(k - a).arg(), (-k.conj() - a).arg()] {
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let c = near + shift;
            if c >= lo - 0.5 && c <= hi + 0.5 {
                refine.push(c);
            }
        }
    }
    let dist = ((k - a).norm() - 1.0)
        .abs()
        .min(((-k.conj() - a).norm() - 1.0).abs());
    let min_panel = dist.max(1e-6) / 4.0;

    let arc = integrate_graded(
        |theta| {
            let zp = Complex64::new(a + theta.cos(), theta.sin());
            let pair = ((k - zp) * (k + zp.conj())).powi(e);
            let ut = -theta.sin() * u.ux(zp) + theta.cos() * u.uy(zp);
            let un = theta.cos() * u.ux(zp) + theta.sin() * u.uy(zp);
            pair * ((k - I * zp.im) * ut + I * zp.re * un)
        },
        lo,
        hi,
        &refine,
        min_panel,
    );
    let arc = if t_end > t_start { arc } else { -arc };

    // segment leg from z_l to z, dz = dzbar = dx
    let seg = integrate_graded(
        |x| {
            let zp = Complex64::new(x, z.im);
            let pair = ((k - zp) * (k + zp.conj())).powi(e);
            pair * ((k + zp.conj()) * u.uz(zp) + (k - zp) * u.uzbar(zp))
        },
        zl.re,
        z.re,
        &[k.re],
        min_panel,
    );
    arc + seg
}

/// Direct evaluation of phi(z, k) for the odd family alpha = -2m+1 on the
/// given sheet (1: path along the upper circle arc, determination like +k at
/// the sheet infinity; 2: lower arc, like -k).
///
/// The square-root determination starts at z_r with the sign that makes the
/// tracked determination end at the sheet's own one after all cut crossings,
/// and flips wherever the moving cut sweeps across k.
pub fn phi_odd_direct(
    dom: &DiskDomain,
    u: &ExactSolution,
    m: u32,
    z: Complex64,
    k: Complex64,
    sheet: u8,
) -> Complex64 {
    let a = dom.center();
    let (zl, _zr) = dom.chord_endpoints(z).unwrap();
    let tr = dom.theta_right(z).unwrap();
    let tl = PI - tr;
    let lam_pow = -(2 * m as i32) - 1;
    let (t_start, t_end, sheet_sign) = if sheet == 1 {
        (tr, tl, 1.0)
    } else {
        (tr, tl - 2.0 * PI, -1.0)
    };
    let lo = t_start.min(t_end);
    let hi = t_start.max(t_end);

    // crossing angles along the traversed arc, ordered by traversal
    let mut crossings: Vec<f64> = Vec::new();
    for base in circle_cut_crossings(a, k) {
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let c = base + shift;
            if c > lo && c < hi {
                crossings.push(c);
            }
        }
    }
    let n_cross = crossings.len() as u32;
    let start_sign = sheet_sign * if n_cross.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sign_at = |theta: f64| -> f64 {
        let passed = if t_end > t_start {
            crossings.iter().filter(|&&c| c < theta).count()
        } else {
            crossings.iter().filter(|&&c| c > theta).count()
        };
        start_sign * if passed % 2 == 0 { 1.0 } else { -1.0 }
    };

    // refine toward both kernel singularities: z' = k and z' = -conj(k)
    let mut refine = Vec::new();
    for near in [(k - a).arg(), (-k.conj() - a).arg()] {
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let c = near + shift;
            if c >= lo - 0.5 && c <= hi + 0.5 {
                refine.push(c);
            }
        }
    }
    refine.extend_from_slice(&crossings);
    let dist = ((k - a).norm() - 1.0)
        .abs()
        .min(((-k.conj() - a).norm() - 1.0).abs());
    let min_panel = dist.max(1e-7) / 4.0;

    let arc = integrate_graded(
        |theta| {
            let zp = Complex64::new(a + theta.cos(), theta.sin());
            let lam = sign_at(theta) * lambda_ref_raw(zp, k);
            let ut = -theta.sin() * u.ux(zp) + theta.cos() * u.uy(zp);
            let un = theta.cos() * u.ux(zp) + theta.sin() * u.uy(zp);
            lam.powi(lam_pow) * ((k - I * zp.im) * ut + I * zp.re * un)
        },
        lo,
        hi,
        &refine,
        min_panel,
    );
    let arc = if t_end > t_start { arc } else { -arc };

    // segment leg from z_l to z at constant height Im z; the determination is
    // the one reached at the end of the arc (no crossings for Im k != Im z)
    let end_sign = sign_at(if t_end > t_start { hi } else { lo });
    let seg_min = (k.im - z.im).abs().max(1e-7) / 4.0;
    let seg = integrate_graded(
        |x| {
            let zp = Complex64::new(x, z.im);
            let lam = end_sign * lambda_ref_raw(zp, k);
            lam.powi(lam_pow) * ((k + zp.conj()) * u.uz(zp) + (k - zp) * u.uzbar(zp))
        },
        zl.re,
        z.re,
        &[k.re, -k.conj().re],
        seg_min,
    );
    arc + seg
}
