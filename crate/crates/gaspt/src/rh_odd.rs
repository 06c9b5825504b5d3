//! Interior solver for the odd family alpha = -2m+1, m >= 0: jump data on the
//! two-sheeted contour covering the boundary circle, assembled from the
//! singular part J0 at the right chord endpoint and arc integrals of the
//! square-root kernel, and the circle-integral representation
//!
//!   u(z) = -(1/2 pi) Im oint_C ((k - z_r)(k + conj z_r))^m J(z, k)
//!          / sqrt((k - z)(k + conj z)) dk + u(z_r) + R_m(z),
//!
//! integrated counter-clockwise from z_r, where the square root starts
//! positive and switches determination at z_l so it stays continuous along
//! the path. Jumps on the upper arc use the upper-sheet determination
//! (lambda like +k at infinity), jumps on the lower arc the lower-sheet one.
//!
//! R_m is a branch-point residue correction, absent for m = 0. The chord-
//! normalized phi function keeps inverse-square-root singular parts at the
//! two branch points k = z and k = -conj(z) of its Riemann surface; on the
//! genus-zero surface no subtraction of those parts can vanish at both
//! infinities unless their coefficient is purely imaginary, so they shift
//! the value extracted at infinity by the real part of the coefficient. For
//! m = 1 this gives
//!
//!   R_1(z) = (x^2 - x_r^2) u_x(z) / x,
//!
//! and u_x is recovered from boundary data through the recurrence map: the
//! lifted field x^{-1} u_x solves the alpha = +1 equation, an m = 0 problem
//! whose Cauchy data follow from u_t, u_n and the equation itself.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::geometry::DiskDomain;
use crate::lax::{expansion_ladder, lambda_ref, lambda_ref_raw, Sheet, WExpansion};
use crate::quad::{integrate_param, integrate_sin_clustered, sqrt_endpoint_left, sqrt_endpoint_right};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Odd integration-by-parts coefficients
/// c_j = (-1)^j Gamma(m - 1/2 - j) / Gamma(m + 1/2), j = 0..m-1.
pub fn c_coeffs_odd(m: u32) -> Vec<f64> {
    // Gamma(n + 1/2) via the half-integer recurrence.
    let gamma_half = |n: u32| -> f64 {
        let mut v = PI.sqrt();
        for i in 1..=n {
            v *= i as f64 - 0.5;
        }
        v
    };
    let denom = gamma_half(m);
    (0..m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * gamma_half(m - 1 - j) / denom
        })
        .collect()
}

/// The coefficient of the fully reduced kernel, extending c_{m-1} to m = 0
/// where it equals -1.
fn c_last_odd(m: u32) -> f64 {
    if m == 0 {
        -1.0
    } else {
        *c_coeffs_odd(m).last().unwrap()
    }
}

/// Descriptor of a jump evaluation point on the two-sheeted contour.
#[derive(Debug, Clone, Copy)]
pub struct OddJumpSpec {
    pub m: u32,
    /// Standard angle of k on the circle.
    pub theta_k: f64,
    pub sheet: Sheet,
    /// Angle of the partner point with the same imaginary part.
    pub theta_partner: f64,
}

/// Node counts for the odd solver: outer nodes per arc pair, inner nodes for
/// the square-root arc integrals.
#[derive(Debug, Clone, Copy)]
pub struct OddParams {
    pub n_outer: usize,
    pub n_inner: usize,
}

impl Default for OddParams {
    fn default() -> Self {
        OddParams { n_outer: 512, n_inner: 96 }
    }
}

pub struct OddSolver {
    dom: DiskDomain,
    m: u32,
    params: OddParams,
    trace: TrigSeries,
    /// Tangential ladder R_0 .. R_m for the odd exponent s = m + 1/2.
    ladder: Vec<WExpansion>,
    cj: Vec<f64>,
    c_last: f64,
    /// Solver for the lifted field x^{-1} u_x (alpha = +1), feeding the
    /// branch-point residue correction when m = 1.
    aux: Option<Box<OddSolver>>,
}

impl OddSolver {
    pub fn new(dom: DiskDomain, data: &BoundaryData, params: OddParams) -> Result<Self> {
        data.validate()?;
        if data.alpha % 2 == 0 || data.alpha > 1 {
            return Err(Error::AlphaMismatch { expected: 1, got: data.alpha });
        }
        let m = ((1 - data.alpha) / 2) as u32;
        let s = m as f64 + 0.5;
        let aux = if m == 1 {
            let lifted = lifted_field_data(dom.center(), data)?;
            Some(Box::new(OddSolver::new(dom, &lifted, params)?))
        } else {
            None
        };
        Ok(OddSolver {
            dom,
            m,
            params,
            trace: data.trace_series()?,
            ladder: expansion_ladder(dom.center(), data, s, m as usize),
            cj: c_coeffs_odd(m),
            c_last: c_last_odd(m),
            aux,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn circle_point(&self, theta: f64) -> Complex64 {
        Complex64::new(self.dom.center() + theta.cos(), theta.sin())
    }

    /// Descriptor of a jump evaluation point: validates the angle against the
    /// sheet's arc and records the partner point with the same height.
    pub fn jump_spec(&self, z: Complex64, theta_k: f64, sheet: Sheet) -> Result<OddJumpSpec> {
        let theta_r = self.dom.theta_right(z)?;
        let theta_l = PI - theta_r;
        let k = self.circle_point(theta_k);
        match sheet {
            Sheet::Upper => {
                if !(theta_k > theta_r && theta_k < theta_l) {
                    return Err(Error::BadSpectralPoint { k, what: "angle not on the upper arc" });
                }
            }
            Sheet::Lower => {
                if !(theta_k < theta_r && theta_k > theta_l - 2.0 * PI) {
                    return Err(Error::BadSpectralPoint { k, what: "angle not on the lower arc" });
                }
            }
        }
        let theta_partner = match sheet {
            Sheet::Upper => PI - theta_k,
            Sheet::Lower => -PI - theta_k,
        };
        Ok(OddJumpSpec { m: self.m, theta_k, sheet, theta_partner })
    }

    /// The endpoint-singular part J0 of the jump (raw, not normalized):
    /// 2 sum_j c_j (k - z_r)^(j-m+1/2) dt^j w(z_r, k), with the half powers
    /// resolved through the sheet determination of lambda at z_r. Zero for
    /// m = 0.
    pub fn j0(&self, z: Complex64, theta_k: f64, sheet: Sheet) -> Result<Complex64> {
        let spec = self.jump_spec(z, theta_k, sheet)?;
        let theta_r = self.dom.theta_right(z)?;
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let k = self.circle_point(spec.theta_k);
        let s0 = match sheet {
            Sheet::Upper => 1.0,
            Sheet::Lower => -1.0,
        };
        let mut j0 = Complex64::default();
        if self.m > 0 {
            let lam0 = s0 * lambda_ref_raw(zr, k);
            for (j, &cj) in self.cj.iter().enumerate() {
                j0 += 2.0
                    * cj
                    * lam0
                    * (k - zr).powi(j as i32 - self.m as i32)
                    * (k + zr.conj()).powi(-(self.m as i32) - 1)
                    * self.r_eval(j, theta_r, k);
            }
        }
        Ok(j0)
    }

    /// The kernel expansion value R_j at an arbitrary angle.
    fn r_eval(&self, level: usize, theta: f64, k: Complex64) -> Complex64 {
        let zp = self.circle_point(theta);
        self.ladder[level].eval(theta, zp.conj(), k)
    }

    /// W~ integrand per unit theta with the signed determination:
    /// 2 c_{m-1} lambda (k - z')^{-1} (k + conj z')^{-m-1} R_m tau.
    fn wtilde(&self, theta: f64, k: Complex64, sign: f64) -> Complex64 {
        let zp = self.circle_point(theta);
        let lam = sign * lambda_ref_raw(zp, k);
        let tau = I * Complex64::from_polar(1.0, theta);
        2.0 * self.c_last
            * lam
            * (k + zp.conj()).powi(-(self.m as i32) - 1)
            / (k - zp)
            * self.r_eval(self.m as usize, theta, k)
            * tau
    }

    /// Normalized jump ((k - z_r)(k + conj z_r))^m J(z, k) for k on the circle
    /// at standard angle theta_k of the given sheet.
    ///
    /// Upper sheet: k on the arc above the chord, inner path counter-clockwise
    /// from z_r. Lower sheet: k below, inner path clockwise from z_r. Points
    /// on the left half of either arc pick up a determination switch where the
    /// moving cut sweeps k, at the partner angle.
    pub fn jump_normalized(&self, z: Complex64, theta_k: f64, sheet: Sheet) -> Result<Complex64> {
        let theta_r = self.dom.theta_right(z)?;
        let theta_l = PI - theta_r;
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let k = self.circle_point(theta_k);
        let s0 = match sheet {
            Sheet::Upper => 1.0,
            Sheet::Lower => -1.0,
        };
        // At the contour endpoint the normalized jump vanishes; return the
        // limit instead of degenerate quadrature.
        if (theta_k - theta_r).abs() < 1e-14 {
            return Ok(Complex64::default());
        }
        // validate the angle lies on the sheet's arc
        match sheet {
            Sheet::Upper => {
                if !(theta_k > theta_r && theta_k < theta_l) {
                    return Err(Error::BadSpectralPoint { k, what: "angle not on the upper arc" });
                }
            }
            Sheet::Lower => {
                if !(theta_k < theta_r && theta_k > theta_l - 2.0 * PI) {
                    return Err(Error::BadSpectralPoint { k, what: "angle not on the lower arc" });
                }
            }
        }

        let m = self.m;
        let norm = ((k - zr) * (k + zr.conj())).powi(m as i32);

        // J0 part, already normalized:
        // 2 sum_j c_j lambda_i(z_r,k) (k - z_r)^j (k + conj z_r)^{m-1} R_j(theta_r, k)
        let mut j0 = Complex64::new(0.0, 0.0);
        if m > 0 {
            let lam0 = s0 * lambda_ref_raw(zr, k);
            for (j, &cj) in self.cj.iter().enumerate() {
                j0 += 2.0
                    * cj
                    * lam0
                    * (k - zr).powi(j as i32)
                    / (k + zr.conj())
                    * self.r_eval(j, theta_r, k);
            }
        }

        // Arc integral of W~ from z_r to k with the tracked determination.
        let n = self.params.n_inner;
        let inner = match sheet {
            Sheet::Upper => {
                let flip = if theta_k > 0.5 * PI { Some(PI - theta_k) } else { None };
                match flip {
                    None => sqrt_endpoint_right(|t| self.wtilde(t, k, s0), theta_r, theta_k, n),
                    Some(tf) => {
                        integrate_param(|t| self.wtilde(t, k, s0), theta_r, tf, n)
                            + sqrt_endpoint_right(|t| self.wtilde(t, k, -s0), tf, theta_k, n)
                    }
                }
            }
            Sheet::Lower => {
                // traversal with decreasing theta: flip orientation of each piece
                let flip = if theta_k < -0.5 * PI { Some(-PI - theta_k) } else { None };
                match flip {
                    None => -sqrt_endpoint_left(|t| self.wtilde(t, k, s0), theta_k, theta_r, n),
                    Some(tf) => {
                        -integrate_param(|t| self.wtilde(t, k, s0), tf, theta_r, n)
                            - sqrt_endpoint_left(|t| self.wtilde(t, k, -s0), theta_k, tf, n)
                    }
                }
            }
        };
        Ok(j0 + norm * inner)
    }

    /// Raw jump J(z, k); singular like (k - z_r)^{1/2 - m} at the endpoint for
    /// m >= 1, so callers near z_r should prefer the normalized form.
    pub fn jump(&self, z: Complex64, theta_k: f64, sheet: Sheet) -> Result<Complex64> {
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let k = self.circle_point(theta_k);
        let norm = ((k - zr) * (k + zr.conj())).powi(self.m as i32);
        Ok(self.jump_normalized(z, theta_k, sheet)? / norm)
    }

    /// Value of u at the interior point z from the circle representation.
    ///
    /// Supported for alpha = 1 and alpha = -1; more negative odd orders need
    /// higher branch-point corrections that are not implemented.
    pub fn solve(&self, z: Complex64) -> Result<f64> {
        if self.m > 1 {
            return Err(Error::Unsupported(format!(
                "odd interior evaluation implemented for alpha in {{1, -1}}, not alpha = {}",
                1 - 2 * self.m as i32
            )));
        }
        let theta_r = self.dom.theta_right(z)?;
        let theta_l = PI - theta_r;
        let n_arc = (self.params.n_outer / 2).max(8);

        // upper arc: k on C_up, upper-sheet jump, lambda_out = +lambda_ref
        let upper = integrate_sin_clustered(
            |theta| {
                let k = self.circle_point(theta);
                let tau = I * Complex64::from_polar(1.0, theta);
                let lam = lambda_ref(z, k).expect("interior z keeps the cut off the circle");
                self.jump_normalized(z, theta, Sheet::Upper).unwrap() / lam * tau
            },
            theta_r,
            theta_l,
            n_arc,
        );
        // lower arc: continue counter-clockwise, determination switched at z_l
        let lower = integrate_sin_clustered(
            |theta| {
                let std_theta = theta - 2.0 * PI;
                let k = self.circle_point(std_theta);
                let tau = I * Complex64::from_polar(1.0, std_theta);
                let lam = -lambda_ref(z, k).expect("interior z keeps the cut off the circle");
                self.jump_normalized(z, std_theta, Sheet::Lower).unwrap() / lam * tau
            },
            theta_l,
            theta_r + 2.0 * PI,
            n_arc,
        );
        let total = upper + lower;
        let mut value = -total.im / (2.0 * PI) + self.trace.eval_real(theta_r);
        if let Some(aux) = &self.aux {
            // branch-point residue (x^2 - x_r^2) u_x(z) / x, with u_x = x w
            let (_, zr) = self.dom.chord_endpoints(z)?;
            let w = aux.solve(z)?;
            value += (z.re * z.re - zr.re * zr.re) * w;
        }
        Ok(value)
    }
}

/// Cauchy data of the lifted field w = x^{-1} u_x on the circle, for a
/// solution u of the alpha = -1 equation with boundary data `data`.
///
/// The boundary Hessian of u follows from the tangential derivatives of u_t
/// and u_n together with the equation itself, which closes the 3x3 system for
/// (u_xx, u_xy, u_yy) at each boundary angle.
fn lifted_field_data(a: f64, data: &BoundaryData) -> Result<BoundaryData> {
    let ut = data.u_t.clone();
    let un = data.u_n.clone();
    let dut = ut.deriv(1);
    let dun = un.deriv(1);
    let alpha = data.alpha as f64;
    let hessian = move |theta: f64| {
        let (s, c) = theta.sin_cos();
        let x = a + c;
        let at = ut.eval_real(theta);
        let bn = un.eval_real(theta);
        let ux = -s * at + c * bn;
        let uy = c * at + s * bn;
        let rhs1 = dut.eval_real(theta) + c * ux + s * uy;
        let rhs2 = dun.eval_real(theta) + s * ux - c * uy;
        let rhs3 = -alpha / x * ux;
        let p = s * s - c * c;
        let q = 2.0 * s * c;
        let r1 = rhs1 - c * c * rhs3;
        let r2 = rhs2 - s * c * rhs3;
        let uxx = p * r1 - q * r2;
        let uxy = -p * r2 - q * r1;
        (ux, uxx, uxy)
    };
    let order = data.u_t.order().max(data.u_n.order()) + 28;
    let h1 = hessian.clone();
    let trace_w = TrigSeries::fit_fn(
        move |theta| {
            let x = a + theta.cos();
            h1(theta).0 / x
        },
        order,
    )
    .compress(1e-14);
    let un_w = TrigSeries::fit_fn(
        move |theta| {
            let (s, c) = theta.sin_cos();
            let x = a + c;
            let (ux, uxx, uxy) = hessian(theta);
            let wx = (uxx - ux / x) / x;
            let wy = uxy / x;
            c * wx + s * wy
        },
        order,
    )
    .compress(1e-14);
    let anchor = trace_w.eval_real(0.0);
    Ok(BoundaryData {
        alpha: 1,
        u_t: trace_w.deriv(1),
        u_n: un_w,
        trace: Some(trace_w),
        trace_anchor: Some(anchor),
    })
}

/// One-call convenience wrapper around [`OddSolver`].
pub fn solve_odd(
    z: Complex64,
    data: &BoundaryData,
    dom: &DiskDomain,
    params: OddParams,
) -> Result<f64> {
    OddSolver::new(*dom, data, params)?.solve(z)
}
