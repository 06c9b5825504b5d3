//! The closed one-forms W(z, k) attached to the equation, the kernel w(z, k)
//! they factor through on the boundary circle, and the square root
//! lambda(z', k) = sqrt((k - z')(k + conj(z'))) with its branch cut on the
//! horizontal segment from -conj(z') to z'.
//!
//! The reference determination `lambda_ref` behaves like k at infinity. A
//! [`SqrtBranch`] records a sign relative to it; tracking a determination
//! along a path flips the sign each time the moving cut sweeps across k.

use num_complex::Complex64;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::geometry::CirclePoint;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Proximity below which evaluation at a pole or branch point is refused.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Tolerance for deciding whether the moving branch cut passes through k.
pub const CROSSING_TOL: f64 = 1e-10;

/// Determination of sqrt((k - z')(k + conj(z'))) that behaves like
/// k - i Im(z') (hence like k) at infinity, with the branch cut exactly on
/// the open segment (-conj(z'), z').
///
/// Computed as (k - i y') sqrt(1 - (x' / (k - i y'))^2) with the principal
/// square root, which puts the cut on that horizontal segment.
pub fn lambda_ref(zp: Complex64, k: Complex64) -> Result<Complex64> {
    let xp = zp.re;
    let w = k - I * zp.im;
    // Strictly inside the open cut: k - i y' real with |k - i y'| < x'.
    // Near the endpoints the square root tends to zero and stays evaluable.
    if w.im.abs() < SINGULARITY_TOL && w.re.abs() < xp - SINGULARITY_TOL {
        return Err(Error::OnBranchCut { z: zp, k });
    }
    let r = xp / w;
    Ok(w * (Complex64::new(1.0, 0.0) - r * r).sqrt())
}

/// [`lambda_ref`] without the on-cut rejection, for integrands whose
/// quadrature nodes may land within roundoff of the moving cut with
/// negligible weight. The principal-branch formula stays finite there; only
/// the side of the cut is then decided by rounding noise.
pub(crate) fn lambda_ref_raw(zp: Complex64, k: Complex64) -> Complex64 {
    let w = k - I * zp.im;
    let r = zp.re / w;
    w * (Complex64::new(1.0, 0.0) - r * r).sqrt()
}

/// Which sheet of the two-sheeted surface a determination belongs to.
/// The upper sheet carries the determination that behaves like +k at its
/// infinity, the lower sheet the one behaving like -k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Upper,
    Lower,
}

/// A branch state for lambda: the sheet convention at the start of a path and
/// the current sign relative to [`lambda_ref`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtBranch {
    pub sheet: Sheet,
    pub sign: f64,
}

impl SqrtBranch {
    /// Start state on the upper sheet: lambda = +lambda_ref.
    pub fn upper() -> Self {
        SqrtBranch { sheet: Sheet::Upper, sign: 1.0 }
    }

    /// Start state on the lower sheet: lambda = -lambda_ref.
    pub fn lower() -> Self {
        SqrtBranch { sheet: Sheet::Lower, sign: -1.0 }
    }

    pub fn flipped(self) -> Self {
        SqrtBranch { sheet: self.sheet, sign: -self.sign }
    }

    pub fn lambda(&self, zp: Complex64, k: Complex64) -> Result<Complex64> {
        Ok(self.sign * lambda_ref(zp, k)?)
    }
}

/// Does the cut segment (-conj(z'), z') sweep across k as z' moves from p to q?
///
/// The sweep is linearized between the two nearby points; the crossing happens
/// when the height passes Im(k) while the horizontal span covers Re(k).
/// Ambiguous geometry (k within [`CROSSING_TOL`] of the span edge, or a sweep
/// sliding along the cut height) is reported as an error.
fn cut_crosses(p: Complex64, q: Complex64, k: Complex64) -> Result<bool> {
    let (y1, y2) = (p.im, q.im);
    let dy = y2 - y1;
    if dy.abs() < 1e-14 {
        if (y1 - k.im).abs() < 1e-14 && k.re.abs() < p.re.max(q.re) {
            return Err(Error::AmbiguousCrossing { k, tol: CROSSING_TOL });
        }
        return Ok(false);
    }
    let t = (k.im - y1) / dy;
    // Half-open on the start side so consecutive segments never double count.
    if t <= 0.0 || t > 1.0 {
        return Ok(false);
    }
    let xs = p.re + t * (q.re - p.re);
    let margin = xs - k.re.abs();
    if margin.abs() < CROSSING_TOL {
        return Err(Error::AmbiguousCrossing { k, tol: CROSSING_TOL });
    }
    Ok(margin > 0.0)
}

/// Track a continuous determination of lambda(z', k) along a sampled path.
///
/// Returns one branch state per path point; the state at index 0 is `start`.
/// The path must stay away from the branch points z' = k and z' = -conj(k).
pub fn lambda_track(path: &[Complex64], k: Complex64, start: SqrtBranch) -> Result<Vec<SqrtBranch>> {
    let mut states = Vec::with_capacity(path.len());
    let mut cur = start;
    states.push(cur);
    for w in path.windows(2) {
        let (p, q) = (w[0], w[1]);
        if (q - k).norm() < SINGULARITY_TOL || (q + k.conj()).norm() < SINGULARITY_TOL {
            return Err(Error::NearSingularity {
                k,
                singular: q,
                tol: SINGULARITY_TOL,
            });
        }
        if cut_crosses(p, q, k)? {
            cur = cur.flipped();
        }
        states.push(cur);
    }
    Ok(states)
}

/// Angles in [0, 2 pi) at which the moving cut of z'(theta) = a + e^{i theta}
/// sweeps across k during one counter-clockwise circuit of the circle.
pub fn circle_cut_crossings(a: f64, k: Complex64) -> Vec<f64> {
    let mut out = Vec::new();
    if k.im.abs() >= 1.0 {
        return out;
    }
    let t1 = k.im.asin();
    for theta in [t1, std::f64::consts::PI - t1] {
        let x = a + theta.cos();
        if k.re.abs() < x {
            let th = theta.rem_euclid(2.0 * std::f64::consts::PI);
            out.push(th);
        }
    }
    out.sort_by(|p, q| p.partial_cmp(q).unwrap());
    out
}

fn check_distance(k: Complex64, zp: Complex64) -> Result<()> {
    for s in [zp, -zp.conj()] {
        if (k - s).norm() < SINGULARITY_TOL {
            return Err(Error::NearSingularity { k, singular: s, tol: SINGULARITY_TOL });
        }
    }
    Ok(())
}

/// Kernel factor [(k - z)(k + conj(z))]^(alpha/2 - 1); for odd alpha the half
/// power is resolved through the supplied determination of lambda.
fn pair_power(zp: Complex64, k: Complex64, alpha: i32, branch: Option<&SqrtBranch>) -> Result<Complex64> {
    let prod = (k - zp) * (k + zp.conj());
    if alpha.rem_euclid(2) == 0 {
        let e = alpha / 2 - 1;
        Ok(prod.powi(e))
    } else {
        let b = branch.expect("odd alpha requires a branch state");
        let lam = b.lambda(zp, k)?;
        // exponent alpha - 2 over lambda^2 = prod
        Ok(lam.powi(alpha - 2))
    }
}

/// The closed form W contracted with a boundary velocity, per unit arclength:
/// [(k-z)(k+conj z)]^(alpha/2-1) ((k - i y) u_t + i x u_n).
///
/// For alpha not in 2N* the spectral point k must stay away from z and
/// -conj(z); for odd alpha a branch state is required.
pub fn w_form_circle(
    p: &CirclePoint,
    k: Complex64,
    alpha: i32,
    ut: f64,
    un: f64,
    branch: Option<&SqrtBranch>,
) -> Result<Complex64> {
    if !(alpha >= 2 && alpha % 2 == 0) {
        check_distance(k, p.z)?;
    }
    let factor = pair_power(p.z, k, alpha, branch)?;
    let g = (k - I * p.z.im) * ut + I * p.z.re * un;
    Ok(factor * g)
}

/// The closed form W contracted with an arbitrary velocity (dz, dzbar):
/// [(k-z)(k+conj z)]^(alpha/2-1) [(k + conj z) u_z dz + (k - z) u_zbar dzbar].
pub fn w_form_complex(
    zp: Complex64,
    k: Complex64,
    alpha: i32,
    uz: Complex64,
    uzbar: Complex64,
    dz: Complex64,
    branch: Option<&SqrtBranch>,
) -> Result<Complex64> {
    if !(alpha >= 2 && alpha % 2 == 0) {
        check_distance(k, zp)?;
    }
    let factor = pair_power(zp, k, alpha, branch)?;
    let dzbar = dz.conj();
    Ok(factor * ((k + zp.conj()) * uz * dz + (k - zp) * uzbar * dzbar))
}

/// The second closed form, contracted with a velocity dz:
/// [(k-z)(k+conj z)]^(-alpha/2) x^(alpha-2)
///   [(k + conj z)(2x u_z + (alpha-1) u) dz + (k - z)(2x u_zbar + (alpha-1) u) dzbar].
#[allow(clippy::too_many_arguments)]
pub fn w2_form_complex(
    zp: Complex64,
    k: Complex64,
    alpha: i32,
    u: f64,
    uz: Complex64,
    uzbar: Complex64,
    dz: Complex64,
    branch: Option<&SqrtBranch>,
) -> Result<Complex64> {
    let x = zp.re;
    assert!(x > 0.0, "the conjugated form lives in the right half-plane");
    let factor = if alpha % 2 == 0 {
        let e = -alpha / 2;
        if e < 0 {
            check_distance(k, zp)?;
        }
        ((k - zp) * (k + zp.conj())).powi(e)
    } else {
        check_distance(k, zp)?;
        let b = branch.expect("odd alpha requires a branch state");
        b.lambda(zp, k)?.powi(-alpha)
    };
    let au = (alpha - 1) as f64 * u;
    let dzbar = dz.conj();
    Ok(factor
        * x.powi(alpha - 2)
        * ((k + zp.conj()) * (2.0 * x * uz + au) * dz + (k - zp) * (2.0 * x * uzbar + au) * dzbar))
}

/// The boundary kernel w(z, k) = (k + conj z)^(-m-1) ((k - iy) u_t + ix u_n) / tau
/// for the even family; the odd variant carries the exponent -m-1/2, resolved
/// as lambda^(-2m-1) (k - z)^(m + 1/2) with the principal square root on the
/// (k - z) factor. Only products with matching (k - z) half powers are
/// branch-meaningful; the solvers form those products through lambda alone.
pub fn w_kernel(
    p: &CirclePoint,
    k: Complex64,
    m: u32,
    odd: bool,
    ut: f64,
    un: f64,
    branch: Option<&SqrtBranch>,
) -> Result<Complex64> {
    check_distance(k, p.z)?;
    let g = ((k - I * p.z.im) * ut + I * p.z.re * un) / p.tangent;
    if !odd {
        Ok((k + p.z.conj()).powi(-(m as i32) - 1) * g)
    } else {
        let b = branch.expect("odd parity requires a branch state");
        let lam = b.lambda(p.z, k)?;
        let half = (k - p.z).sqrt();
        Ok(lam.powi(-2 * m as i32 - 1) * (k - p.z).powi(m as i32) * half * g)
    }
}

/// Expansion of the boundary kernel and its tangential derivatives in powers
/// of nu = (k + conj(z'))^(-1) with theta-series coefficients.
///
/// Writing w = (k + conj z')^(-s) R_0 with s = m + 1 (even) or m + 1/2 (odd),
/// repeated application of the operator (1/tau) d/d(theta) stays in this form:
/// each derivative maps the expansion R_j to R_{j+1} exactly in coefficient
/// space. The same holds for d/dk.
#[derive(Debug, Clone)]
pub(crate) struct WExpansion {
    /// rho[i] multiplies nu^(min_pow + i).
    rho: Vec<TrigSeries>,
    min_pow: i64,
    /// Exponent s of the carried factor (k + conj z')^(-s).
    s: f64,
}

impl WExpansion {
    /// Base expansion R_0 = g tau^(-1) with
    /// g = (k + conj z') u_t + x' (i u_n - u_t).
    pub fn base(a: f64, u_t: &TrigSeries, u_n: &TrigSeries, s: f64) -> Self {
        // tau^(-1) = conj(tau) = -i e^{-i theta}
        let taubar = |s: &TrigSeries| s.harmonic_shift(-1).scale(-I);
        let mut xser = TrigSeries::zero(1);
        xser.set_coeff(0, Complex64::new(a, 0.0));
        xser.set_coeff(1, Complex64::new(0.5, 0.0));
        xser.set_coeff(-1, Complex64::new(0.5, 0.0));

        let rho_m1 = taubar(u_t);
        let rho_0 = taubar(&xser.mul(&u_n.scale(I).add(&u_t.scale(-Complex64::new(1.0, 0.0)))));
        WExpansion {
            rho: vec![rho_m1, rho_0],
            min_pow: -1,
            s,
        }
    }

    /// Apply the tangential-derivative operator once.
    pub fn dt(&self) -> Self {
        // d/dtheta of conj(z') is conj(tau); tau^(-1) = conj(tau).
        let taubar = |ser: &TrigSeries| ser.harmonic_shift(-1).scale(-I);
        let npow = self.rho.len();
        let mut rho = Vec::with_capacity(npow + 1);
        for j in 0..=npow {
            // contribution tau^(-1) d/dtheta rho_p  at power p (j = p - min_pow)
            let mut term = if j < npow {
                taubar(&self.rho[j].deriv(1))
            } else {
                TrigSeries::zero(0)
            };
            // contribution (-(p-1) - s) tau^(-2) rho_{p-1} at power p
            if j >= 1 {
                let pm1 = self.min_pow + (j as i64 - 1);
                let c = -(pm1 as f64) - self.s;
                let shifted = taubar(&taubar(&self.rho[j - 1])).scale(Complex64::new(c, 0.0));
                term = term.add(&shifted);
            }
            rho.push(term.compress(0.0));
        }
        WExpansion { rho, min_pow: self.min_pow, s: self.s }
    }

    /// Apply d/dk once (holding theta fixed).
    pub fn dk(&self) -> Self {
        let npow = self.rho.len();
        let mut rho = Vec::with_capacity(npow + 1);
        for j in 0..=npow {
            let term = if j >= 1 {
                let pm1 = self.min_pow + (j as i64 - 1);
                self.rho[j - 1].scale(Complex64::new(-(pm1 as f64) - self.s, 0.0))
            } else {
                TrigSeries::zero(0)
            };
            rho.push(term);
        }
        WExpansion { rho, min_pow: self.min_pow, s: self.s }
    }

    /// Evaluate the expansion (without the carried (k + conj z')^(-s) factor).
    pub fn eval(&self, theta: f64, zbar: Complex64, k: Complex64) -> Complex64 {
        let nu = 1.0 / (k + zbar);
        let mut acc = Complex64::new(0.0, 0.0);
        // Horner from the highest power down to min_pow.
        for ser in self.rho.iter().rev() {
            acc = acc * nu + ser.eval(theta);
        }
        acc * nu.powi(self.min_pow as i32)
    }

    /// Evaluate on a precomputed grid of theta-samples of the coefficients.
    pub fn sampled(&self, n: usize) -> SampledExpansion {
        SampledExpansion {
            values: self.rho.iter().map(|s| s.eval_grid(n)).collect(),
            min_pow: self.min_pow,
        }
    }
}

/// Grid samples of a [`WExpansion`] for fast per-k evaluation at all nodes.
#[derive(Debug, Clone)]
pub(crate) struct SampledExpansion {
    values: Vec<Vec<Complex64>>,
    min_pow: i64,
}

impl SampledExpansion {
    pub fn eval_node(&self, node: usize, zbar: Complex64, k: Complex64) -> Complex64 {
        let nu = 1.0 / (k + zbar);
        let mut acc = Complex64::new(0.0, 0.0);
        for row in self.values.iter().rev() {
            acc = acc * nu + row[node];
        }
        acc * nu.powi(self.min_pow as i32)
    }
}

/// Convenience: build the expansion ladder R_0 .. R_levels for boundary data.
pub(crate) fn expansion_ladder(
    a: f64,
    data: &BoundaryData,
    s: f64,
    levels: usize,
) -> Vec<WExpansion> {
    let mut out = Vec::with_capacity(levels + 1);
    out.push(WExpansion::base(a, &data.u_t, &data.u_n, s));
    for j in 0..levels {
        let next = out[j].dt();
        out.push(next);
    }
    out
}
