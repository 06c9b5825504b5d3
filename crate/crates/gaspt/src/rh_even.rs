//! Interior solver for the even family alpha = -2m, m >= 0: the jump
//! J(z, k) = -closed-circle integral of W(., k), its normalized form
//! J~ = ((k-z)(k+conj z))^m J, the residue correction assembled from the
//! polar part of the normalized phi function at the right chord endpoint, and
//! the final chord-integral representation
//!
//!   u(z) = -(1/pi) Im int_(z, z_r) J~(z, k) dk + 2 Re(a_r) + u(z_r).
//!
//! Away from the boundary circle the jump is a plain periodic trapezoid sum.
//! Near the circle (the chord end k -> z_r) it switches to the single-pole
//! kernel obtained from m integrations by parts,
//! J = c_{m-1} oint (k - z')^{-1} dt^m w(z', k) dz', evaluated with a local
//! Taylor subtraction of the analytic numerator so the accuracy is uniform up
//! to the endpoint.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::geometry::DiskDomain;
use crate::lax::{expansion_ladder, SampledExpansion, WExpansion};
use crate::quad::gauss_legendre;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Integration-by-parts coefficients c_j = (-1)^j Gamma(m-j) / Gamma(m+1),
/// j = 0..m-1. Empty for m = 0.
pub fn c_coeffs(m: u32) -> Vec<f64> {
    let mut fact = vec![1.0f64; (m + 2) as usize];
    for i in 1..fact.len() {
        fact[i] = fact[i - 1] * i as f64;
    }
    (0..m)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact[(m - j - 1) as usize] / fact[m as usize]
        })
        .collect()
}

/// The coefficient in front of the fully integrated-by-parts single-pole
/// kernel: (-1)^(m-1) / m!, which extends c_{m-1} down to m = 0.
fn c_last(m: u32) -> f64 {
    let mut f = 1.0f64;
    for i in 1..=m {
        f *= i as f64;
    }
    if m.is_multiple_of(2) {
        -1.0 / f
    } else {
        1.0 / f
    }
}

/// Sampled jump values J~(z, k) on the chord (z, z_r).
#[derive(Debug, Clone)]
pub struct JumpTable {
    pub nodes: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

/// Laurent data of the normalized phi function at the right chord endpoint.
#[derive(Debug, Clone)]
pub struct PolarPart {
    /// Laurent coefficients of phi at z_r, degrees -m..-1 (index d holds degree d-m).
    pub coeffs: Vec<Complex64>,
    /// Residue of the normalized phi at z_r.
    pub a_r: Complex64,
}

/// Node counts for the even solver.
#[derive(Debug, Clone, Copy)]
pub struct EvenParams {
    pub n_circle: usize,
    pub n_chord: usize,
}

impl Default for EvenParams {
    fn default() -> Self {
        EvenParams { n_circle: 256, n_chord: 64 }
    }
}

/// Distance to the circle below which the jump switches to the subtracted
/// single-pole kernel.
const NEAR_BAND: f64 = 0.12;
/// Taylor degree of the local subtraction.
const TAYLOR_DEG: usize = 5;

pub struct EvenSolver {
    dom: DiskDomain,
    m: u32,
    params: EvenParams,
    trace: TrigSeries,
    /// Tangential-derivative ladder R_0 .. R_{m + TAYLOR_DEG}.
    ladder: Vec<WExpansion>,
    /// The grid-sampled ladder on the circle quadrature grid.
    sampled: Vec<SampledExpansion>,
    /// Boundary grids of u_t, u_n for the far-field trapezoid.
    ut_grid: Vec<f64>,
    un_grid: Vec<f64>,
    cj: Vec<f64>,
    c_last: f64,
}

impl EvenSolver {
    pub fn new(dom: DiskDomain, data: &BoundaryData, params: EvenParams) -> Result<Self> {
        data.validate()?;
        if data.alpha > 0 || data.alpha % 2 != 0 {
            return Err(Error::AlphaMismatch { expected: -(data.alpha.abs() & !1), got: data.alpha });
        }
        let m = (-data.alpha / 2) as u32;
        let s = m as f64 + 1.0;
        let ladder = expansion_ladder(dom.center(), data, s, m as usize + TAYLOR_DEG);
        let n = params.n_circle;
        let sampled = ladder.iter().map(|e| e.sampled(n)).collect();
        let ut_grid = (0..n)
            .map(|i| data.u_t.eval_real(2.0 * PI * i as f64 / n as f64))
            .collect();
        let un_grid = (0..n)
            .map(|i| data.u_n.eval_real(2.0 * PI * i as f64 / n as f64))
            .collect();
        Ok(EvenSolver {
            dom,
            m,
            params,
            trace: data.trace_series()?,
            ladder,
            sampled,
            ut_grid,
            un_grid,
            cj: c_coeffs(m),
            c_last: c_last(m),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn node_theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.params.n_circle as f64
    }

    /// J(z, k) = -oint W(., k) for k strictly inside the disk. The value does
    /// not depend on z; z enters only through the admissible chord.
    pub fn jump(&self, k: Complex64) -> Result<Complex64> {
        let dist = -self.dom.boundary_distance(k);
        if dist <= 0.0 {
            return Err(Error::BadSpectralPoint { k, what: "jump is defined inside the disk" });
        }
        Ok(self.jump_inside(k))
    }

    /// Plain spectral trapezoid of the defining kernel.
    fn jump_far(&self, k: Complex64) -> Complex64 {
        let n = self.params.n_circle;
        let a = self.dom.center();
        let h = 2.0 * PI / n as f64;
        let e = -(self.m as i32) - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let theta = self.node_theta(j);
            let z = Complex64::new(a + theta.cos(), theta.sin());
            let pair = ((k - z) * (k + z.conj())).powi(e);
            let g = (k - I * z.im) * self.ut_grid[j] + I * z.re * self.un_grid[j];
            acc += pair * g;
        }
        -acc * h
    }

    /// Single-pole kernel with local Taylor subtraction, accurate uniformly
    /// as k approaches the circle.
    fn jump_near(&self, k: Complex64) -> Complex64 {
        let n = self.params.n_circle;
        let a = self.dom.center();
        let h = 2.0 * PI / n as f64;
        let m = self.m as usize;
        let s = self.m as i32 + 1;

        // Nearest circle point and the z'-Taylor coefficients of the
        // numerator V = dt^m w there: V^(i) = ladder[m+i] evaluated at theta*.
        let theta_star = (k - a).arg();
        let zeta = Complex64::new(a + theta_star.cos(), theta_star.sin());
        let nu_star = (k + zeta.conj()).powi(-s);
        let mut taylor = [Complex64::new(0.0, 0.0); TAYLOR_DEG + 1];
        let mut factorial = 1.0;
        for (i, c) in taylor.iter_mut().enumerate() {
            if i > 0 {
                factorial *= i as f64;
            }
            *c = self.ladder[m + i].eval(theta_star, zeta.conj(), k) * nu_star / factorial;
        }
        let t_eval = |w: Complex64| {
            let d = w - zeta;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in taylor.iter().rev() {
                acc = acc * d + c;
            }
            acc
        };

        let mut trapz = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let theta = self.node_theta(j);
            let z = Complex64::new(a + theta.cos(), theta.sin());
            let denom = z - k;
            if denom.norm() < 1e-12 {
                // numerator matches to TAYLOR_DEG; the limit vanishes
                continue;
            }
            let tau = I * Complex64::from_polar(1.0, theta);
            let v = self.sampled[m].eval_node(j, z.conj(), k) * (k + z.conj()).powi(-s);
            trapz += (v - t_eval(z)) / denom * tau;
        }
        trapz *= h;
        -self.c_last * (trapz + 2.0 * PI * I * t_eval(k))
    }

    /// Normalized jump J~(z, k) = ((k - z)(k + conj z))^m J(z, k) for k on
    /// the chord (z, z_r); points off the chord (within 1e-9) are rejected.
    /// The representation never integrates over the left sub-chord (z_l, z),
    /// where the jump vanishes.
    pub fn jump_normalized(&self, z: Complex64, k: Complex64) -> Result<Complex64> {
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let tol = 1e-9;
        if (k.im - z.im).abs() > tol || k.re < z.re - tol || k.re > zr.re + tol {
            return Err(Error::BadSpectralPoint { k, what: "not on the chord (z, z_r)" });
        }
        let norm = ((k - z) * (k + z.conj())).powi(self.m as i32);
        Ok(norm * self.jump_inside(k))
    }

    /// J(z, k) continued to any k strictly inside the disk (the chord value
    /// and its analytic continuation are the same circle integral).
    fn jump_inside(&self, k: Complex64) -> Complex64 {
        let dist = -self.dom.boundary_distance(k);
        if dist > NEAR_BAND {
            self.jump_far(k)
        } else {
            self.jump_near(k)
        }
    }

    /// Jump values at the chord Gauss nodes.
    pub fn jump_table(&self, z: Complex64) -> Result<JumpTable> {
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let rule = gauss_legendre(self.params.n_chord);
        let mut nodes = Vec::with_capacity(rule.nodes.len());
        let mut values = Vec::with_capacity(rule.nodes.len());
        for &x in &rule.nodes {
            let t = 0.5 * (x + 1.0);
            let k = z + (zr - z) * t;
            nodes.push(k);
            values.push(self.jump_normalized(z, k)?);
        }
        Ok(JumpTable { nodes, values })
    }

    /// Mixed derivative d_k^j dt^l w evaluated at (z' = z_r, k = z_r).
    fn w_derivative_at(&self, theta_r: f64, zr: Complex64, j: usize, ell: usize) -> Complex64 {
        let mut exp = self.ladder[ell].clone();
        for _ in 0..j {
            exp = exp.dk();
        }
        let s = self.m as i32 + 1;
        exp.eval(theta_r, zr.conj(), zr) * (zr + zr.conj()).powi(-s)
    }

    /// Polar part of the normalized phi at z_r and its residue a_r.
    ///
    /// The Laurent coefficients of phi come from the bracketed terms of the m
    /// integrations by parts; the residue of the normalized function is the
    /// degree -1 coefficient of the product with the Taylor expansion of
    /// ((k - z)(k + conj z))^m about z_r.
    pub fn polar_residue(&self, z: Complex64) -> Result<PolarPart> {
        let m = self.m as usize;
        if m == 0 {
            return Ok(PolarPart { coeffs: vec![], a_r: Complex64::new(0.0, 0.0) });
        }
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let theta_r = self.dom.theta_right(z)?;

        // phi_polar(k) = -sum_l c_l sum_j d_k^j dt^l w(z_r, z_r) / j! (k-z_r)^(j+l-m)
        let mut laurent = vec![Complex64::new(0.0, 0.0); m]; // index d: degree d - m
        for ell in 0..m {
            let mut factorial = 1.0;
            for j in 0..(m - ell) {
                if j > 0 {
                    factorial *= j as f64;
                }
                let val = self.w_derivative_at(theta_r, zr, j, ell);
                laurent[j + ell] += -self.cj[ell] * val / factorial;
            }
        }

        // Taylor of q(k) = ((k-z)(k+conj z))^m about z_r up to degree m-1.
        let b1 = zr - z;
        let b2 = zr + z.conj();
        let binom = |n: usize, k: usize| -> f64 {
            let mut v = 1.0;
            for i in 0..k {
                v = v * (n - i) as f64 / (i + 1) as f64;
            }
            v
        };
        let mut q = vec![Complex64::new(0.0, 0.0); m];
        for (s, slot) in q.iter_mut().enumerate() {
            for i in 0..=s {
                let c1 = binom(m, i);
                let c2 = binom(m, s - i);
                *slot += c1 * b1.powi((m - i) as i32) * c2 * b2.powi((m - (s - i)) as i32);
            }
        }

        // residue of q * polar: coefficient of (k - z_r)^{-1}
        let mut a_r = Complex64::new(0.0, 0.0);
        for d in 1..=m {
            // polar degree -d is laurent index m - d
            let p = laurent[m - d];
            if d - 1 < m {
                a_r += p * q[d - 1];
            }
        }
        Ok(PolarPart { coeffs: laurent, a_r })
    }

    /// Value of u at the interior point z from the chord representation.
    pub fn solve(&self, z: Complex64) -> Result<f64> {
        let (_, zr) = self.dom.chord_endpoints(z)?;
        let theta_r = self.dom.theta_right(z)?;
        let rule = gauss_legendre(self.params.n_chord);
        let dir = zr - z;
        let mut integral = Complex64::new(0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let t = 0.5 * (x + 1.0);
            let k = z + dir * t;
            integral += self.jump_normalized(z, k)? * *w;
        }
        integral *= dir * 0.5;
        let residue_term = if self.m > 0 { 2.0 * self.polar_residue(z)?.a_r.re } else { 0.0 };
        Ok(-integral.im / PI + residue_term + self.trace.eval_real(theta_r))
    }
}

/// One-call convenience wrapper around [`EvenSolver`].
pub fn solve_even(
    z: Complex64,
    data: &BoundaryData,
    dom: &DiskDomain,
    params: EvenParams,
) -> Result<f64> {
    EvenSolver::new(*dom, data, params)?.solve(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{boundary_trace, named_oracle};
    use crate::probe;

    fn dom() -> DiskDomain {
        DiskDomain::new(2.0).unwrap()
    }

    #[test]
    fn c_coeff_values() {
        assert!(c_coeffs(0).is_empty());
        assert_eq!(c_coeffs(1), vec![1.0]);
        assert_eq!(c_coeffs(2), vec![0.5, -0.5]);
        let c3 = c_coeffs(3);
        let want = [2.0 / 6.0, -1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in c3.iter().zip(want.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(c_last(0), -1.0);
        assert_eq!(c_last(1), 1.0);
        assert_eq!(c_last(2), -0.5);
    }

    #[test]
    fn jump_harmonic_u_eq_x_is_cauchy_value() {
        // For m = 0 the circle integral of W collapses by the Cauchy formula:
        // oint W = -2 pi i u_z(k), so J = -oint W = 2 pi i u_z(k) = pi i for
        // u = x. (Feeding this through the chord representation returns
        // u(z) = x, which fixes the sign unambiguously.)
        let d = dom();
        let u = named_oracle("x").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let z = Complex64::new(2.0, 0.3);
        let (_, zr) = d.chord_endpoints(z).unwrap();
        for t in [0.05, 0.4, 0.8, 0.97, 0.999] {
            let k = z + (zr - z) * t;
            let j = solver.jump(k).unwrap();
            assert!(
                (j - Complex64::new(0.0, PI)).norm() < 1e-9,
                "t={t}: {j}"
            );
        }
    }

    #[test]
    fn normalized_jump_rejects_off_chord_points() {
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let z = Complex64::new(2.0, 0.3);
        // off the chord height
        assert!(solver.jump_normalized(z, Complex64::new(2.4, 0.5)).is_err());
        // on the left sub-chord (z_l, z)
        assert!(solver.jump_normalized(z, Complex64::new(1.4, 0.3)).is_err());
        // on the chord: fine
        assert!(solver.jump_normalized(z, Complex64::new(2.5, 0.3)).is_ok());
    }

    #[test]
    fn jump_constant_data_vanishes() {
        let d = dom();
        let data = BoundaryData::new(0, TrigSeries::zero(4), TrigSeries::zero(4), 5.0);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let j = solver.jump(Complex64::new(2.4, 0.1)).unwrap();
        assert!(j.norm() < 1e-14);
    }

    #[test]
    fn near_and_far_forms_agree() {
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        // points in the band where both evaluations are accurate
        for (re, im) in [(2.8, 0.05), (2.6, 0.4), (1.25, -0.2)] {
            let k = Complex64::new(re, im);
            let far = solver.jump_far(k);
            let near = solver.jump_near(k);
            assert!(
                (far - near).norm() < 1e-10 * far.norm().max(1.0),
                "k={k}: far={far} near={near}"
            );
        }
    }

    #[test]
    fn jump_self_convergence_near_endpoint() {
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let coarse = EvenSolver::new(d, &data, EvenParams { n_circle: 256, n_chord: 64 }).unwrap();
        let fine = EvenSolver::new(d, &data, EvenParams { n_circle: 512, n_chord: 64 }).unwrap();
        let z = Complex64::new(2.0, 0.3);
        let (_, zr) = d.chord_endpoints(z).unwrap();
        for t in [0.9, 0.99, 0.9999, 1.0] {
            let k = z + (zr - z) * t;
            let a = coarse.jump_normalized(z, k).unwrap();
            let b = fine.jump_normalized(z, k).unwrap();
            assert!((a - b).norm() < 1e-8, "t={t}: {a} vs {b}");
            assert!(a.norm() < 1e3, "normalized jump stays finite");
        }
    }

    #[test]
    fn endpoint_value_matches_chord_extrapolation() {
        // J~ extended to k = z_r by the single-pole kernel agrees with
        // Richardson extrapolation along the chord.
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let z = Complex64::new(2.1, 0.25);
        let (_, zr) = d.chord_endpoints(z).unwrap();
        let dir = zr - z;
        let eps = 1e-3;
        let f1 = solver.jump_normalized(z, zr - dir * eps).unwrap();
        let f2 = solver.jump_normalized(z, zr - dir * (eps / 2.0)).unwrap();
        let extrap = 2.0 * f2 - f1;
        let direct = solver.jump_normalized(z, zr).unwrap();
        assert!((extrap - direct).norm() < 1e-6 * direct.norm().max(1.0));
    }

    #[test]
    fn jump_table_values_stay_finite_to_the_endpoint() {
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let z = Complex64::new(2.05, 0.4);
        let table = solver.jump_table(z).unwrap();
        assert_eq!(table.nodes.len(), 64);
        let sup = table.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(sup.is_finite() && sup < 1e3, "normalized jump magnitude {sup}");
        // nodes lie on the chord
        for &k in &table.nodes {
            assert!((k.im - z.im).abs() < 1e-14);
        }
    }

    #[test]
    fn polar_residue_zero_for_constant() {
        let d = dom();
        let data = BoundaryData::new(-2, TrigSeries::zero(4), TrigSeries::zero(4), 1.0);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let p = solver.polar_residue(Complex64::new(2.0, 0.2)).unwrap();
        assert!(p.a_r.norm() < 1e-14);
    }

    #[test]
    fn polar_residue_small_circle_oracle() {
        // a_r = (1/2 pi i) [ oint phi~ dk + int_(z_r - rho)^(z_r) J~ dt ]
        // with phi evaluated by direct leg quadrature of its defining path
        // integral; the second term removes the jump-line contribution that
        // crosses the small circle.
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams { n_circle: 512, n_chord: 64 }).unwrap();
        let z = Complex64::new(2.05, 0.3);
        let (_, zr) = d.chord_endpoints(z).unwrap();
        let rho = 1e-2;
        let m = 1u32;

        // trapezoid in angle: sum f(ang) * (2 pi / n), with f = phi~ dk/dang;
        // half-offset nodes keep k off the jump line.
        let n_contour = 160;
        let mut contour = Complex64::new(0.0, 0.0);
        for i in 0..n_contour {
            let ang = 2.0 * PI * (i as f64 + 0.5) / n_contour as f64;
            let k = zr + rho * Complex64::from_polar(1.0, ang);
            let phi = probe::phi_even_direct(&d, &u, m, z, k);
            let norm = ((k - z) * (k + z.conj())).powi(m as i32);
            let dk_dang = rho * Complex64::from_polar(1.0, ang) * I;
            contour += phi * norm * dk_dang;
        }
        contour *= 2.0 * PI / n_contour as f64;

        // jump-line correction on (z_r - rho, z_r)
        let jump_part = crate::quad::integrate_param(
            |t| {
                let k = zr - rho + t * rho;
                solver.jump_normalized(z, k).unwrap()
            },
            0.0,
            1.0,
            32,
        ) * rho;

        let oracle = (contour + jump_part) / (2.0 * PI * I);
        let direct = solver.polar_residue(z).unwrap().a_r;
        assert!(
            (oracle - direct).norm() < 1e-6 * direct.norm().max(1.0),
            "oracle {oracle} vs direct {direct}"
        );
    }

    #[test]
    fn mirrored_residue_is_conjugate() {
        // a_{-r} = conj(a_r), so that a_r + a_{-r} = 2 Re(a_r) in the final
        // representation: evaluate the mirrored residue through the
        // small-circle oracle at -conj(z_r), using phi(z, -conj k) = -conj(phi(z, k)).
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams { n_circle: 512, n_chord: 64 }).unwrap();
        let z = Complex64::new(2.05, 0.3);
        let (_, zr) = d.chord_endpoints(z).unwrap();
        let rho = 1e-2;
        let m = 1;
        let zmr = -zr.conj();
        let n_contour = 160;
        let mut contour = Complex64::new(0.0, 0.0);
        for i in 0..n_contour {
            let ang = 2.0 * PI * (i as f64 + 0.5) / n_contour as f64;
            let k = zmr + rho * Complex64::from_polar(1.0, ang);
            // phi at mirrored k through the conjugation symmetry
            let phi = -probe::phi_even_direct(&d, &u, m, z, -k.conj()).conj();
            let norm = ((k - z) * (k + z.conj())).powi(m as i32);
            let dk_dang = rho * Complex64::from_polar(1.0, ang) * I;
            contour += phi * norm * dk_dang;
        }
        contour *= 2.0 * PI / n_contour as f64;
        // The mirrored jump line enters the circle on (zmr, zmr + rho), with
        // jump values -conj of those at the mirrored chord points.
        let jump_part = crate::quad::integrate_param(
            |t| {
                let k = zr - rho + t * rho;
                -solver.jump_normalized(z, k).unwrap().conj()
            },
            0.0,
            1.0,
            32,
        ) * rho;
        let a_mr = (contour + jump_part) / (2.0 * PI * I);
        let a_r = solver.polar_residue(z).unwrap().a_r;
        assert!(
            (a_mr - a_r.conj()).norm() < 1e-5 * a_r.norm().max(1.0),
            "a_mr {a_mr} vs conj a_r {}",
            a_r.conj()
        );
    }

    #[test]
    fn solve_laplace_reproduces_x() {
        let d = dom();
        let u = named_oracle("x").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        for (re, im) in [(2.0, 0.0), (2.3, 0.4), (1.5, -0.5), (2.0, 0.85)] {
            let z = Complex64::new(re, im);
            let got = solver.solve(z).unwrap();
            assert!((got - z.re).abs() < 1e-8, "z={z}: {got}");
        }
    }

    #[test]
    fn solve_laplace_harmonic_quadratic() {
        let d = dom();
        let u = named_oracle("x2-y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        for (re, im) in [(2.2, 0.3), (1.6, 0.2), (2.0, -0.6)] {
            let z = Complex64::new(re, im);
            let got = solver.solve(z).unwrap();
            assert!((got - u.u(z)).abs() < 1e-6, "z={z}: {got} vs {}", u.u(z));
        }
    }

    #[test]
    fn solve_alpha_minus_two() {
        let d = dom();
        for name in ["x2+y2", "x3"] {
            let u = named_oracle(name).unwrap();
            let data = boundary_trace(&u, &d, 16);
            let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
            let scale = u.scale();
            for (re, im) in [(2.0, 0.3), (2.4, -0.2), (1.45, 0.1), (2.0, 0.0)] {
                let z = Complex64::new(re, im);
                let got = solver.solve(z).unwrap();
                assert!(
                    (got - u.u(z)).abs() < 1e-5 * scale,
                    "{name} z={z}: {got} vs {}",
                    u.u(z)
                );
            }
        }
    }

    #[test]
    fn residue_term_is_load_bearing() {
        // Dropping 2 Re(a_r) must break the m = 1 solution badly.
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let data = boundary_trace(&u, &d, 16);
        let solver = EvenSolver::new(d, &data, EvenParams::default()).unwrap();
        let z = Complex64::new(2.1, 0.35);
        let full = solver.solve(z).unwrap();
        let residue = 2.0 * solver.polar_residue(z).unwrap().a_r.re;
        let truncated = full - residue;
        assert!((full - u.u(z)).abs() < 1e-5 * u.scale());
        assert!((truncated - u.u(z)).abs() > 1e-2, "negative control too small");
    }

    #[test]
    fn additive_constant_equivariance() {
        let d = dom();
        let u = named_oracle("x2+y2").unwrap();
        let mut data = boundary_trace(&u, &d, 16);
        let z = Complex64::new(2.2, 0.15);
        let base = solve_even(z, &data, &d, EvenParams::default()).unwrap();
        // shift the trace by a constant c
        let c = 3.25;
        data.trace = Some(data.trace.clone().unwrap().add(&TrigSeries::constant(c)));
        data.trace_anchor = data.trace_anchor.map(|v| v + c);
        let shifted = solve_even(z, &data, &d, EvenParams::default()).unwrap();
        assert!((shifted - base - c).abs() < 1e-9);
    }
}
