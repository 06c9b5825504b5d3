//! Dirichlet-to-Neumann conversion for even alpha via the global relation
//!
//!   oint_C [(k-z)(k+conj z)]^(alpha/2-1) ((k - iy) u_t + i x u_n) ds = 0,
//!   k outside both disks.
//!
//! Transported to the unit circle with mu = -1/(k+a) and the involution
//! phi(z) = -z/(1+2az), the relation couples the Cauchy-kernel functionals
//! Phi_i of the analytic halves of the data. Multiplying by
//! S(mu) = (mu^2+2a mu+1)^(2m-1)/(1+2a mu)^m turns each functional into the
//! differential operator
//!
//!   D[h](z) = sum_p alpha_p z^(m-1-p) (z^2+2az+1)^p h^(p)(z),
//!
//! whose analytic-at-z1 inversion is a forward recurrence with nonvanishing
//! leading weights. The Neumann data are then rebuilt from the recovered
//! analytic half plus a polynomial part fixed by a small least-squares solve
//! of the same differential identity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::geometry::DiskDomain;
use crate::lax::circle_cut_crossings;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Geometry of the Mobius transport: roots z1, z2 of z^2 + 2az + 1, the
/// excluded inner disk of the annulus, and the involution phi.
#[derive(Debug, Clone, Copy)]
pub struct MobiusFrame {
    pub a: f64,
    pub z1: f64,
    pub z2: f64,
    pub beta: f64,
    pub inner_center: f64,
    pub inner_radius: f64,
}

impl MobiusFrame {
    pub fn new(a: f64) -> Result<Self> {
        if a <= 1.0 {
            return Err(Error::InvalidCenter { a });
        }
        let s = (a * a - 1.0).sqrt();
        Ok(MobiusFrame {
            a,
            z1: -a + s,
            z2: -a - s,
            beta: 2.0 * s,
            inner_center: -2.0 * a / (4.0 * a * a - 1.0),
            inner_radius: 1.0 / (4.0 * a * a - 1.0),
        })
    }

    /// The involution phi(z) = -z / (1 + 2az); it maps mu = -1/(k+a) to
    /// 1/(k-a) and exchanges z1 and z2.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        -z / (1.0 + 2.0 * self.a * z)
    }

    /// True if mu lies in the annulus (unit disk minus the inner disk),
    /// the image of the admissible exterior spectral points.
    pub fn in_annulus(&self, mu: Complex64) -> bool {
        mu.norm() < 1.0 && (mu - self.inner_center).norm() > self.inner_radius
    }

    /// S(mu) = (mu - z1)^(2m-1) (mu - z2)^(2m-1) / (2 a mu + 1)^m.
    pub fn s_factor(&self, mu: Complex64, m: usize) -> Complex64 {
        let quad = mu * mu + 2.0 * self.a * mu + 1.0;
        quad.powi(2 * m as i32 - 1) / (2.0 * self.a * mu + 1.0).powi(m as i32)
    }

    /// Sample circle |mu| = r placed inside the annulus, between the inner
    /// obstacles (inner disk, z1) and the unit circle.
    pub fn sample_radius(&self) -> f64 {
        let edge = (self.inner_center.abs() + self.inner_radius).max(self.z1.abs());
        0.5 * (1.0 + edge)
    }
}

/// Truncated Taylor series about a center.
#[derive(Debug, Clone)]
pub struct Taylor {
    pub center: Complex64,
    pub c: Vec<Complex64>,
}

impl Taylor {
    pub fn zero(center: Complex64) -> Self {
        Taylor { center, c: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.c.get(j).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        let mut acc = Complex64::default();
        for &c in self.c.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// Value of the q-th derivative at z.
    pub fn eval_deriv(&self, z: Complex64, q: usize) -> Complex64 {
        let w = z - self.center;
        let mut acc = Complex64::default();
        for j in (q..self.c.len()).rev() {
            let mut f = 1.0;
            for i in 0..q {
                f *= (j - i) as f64;
            }
            acc = acc * w + self.c[j] * f;
        }
        acc
    }

    pub fn deriv(&self) -> Taylor {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &v)| v * j as f64)
            .collect();
        Taylor { center: self.center, c }
    }

    pub fn add(&self, other: &Taylor) -> Taylor {
        assert_eq!(self.center, other.center);
        let n = self.c.len().max(other.c.len());
        let c = (0..n).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Taylor { center: self.center, c }
    }

    pub fn scale(&self, s: Complex64) -> Taylor {
        Taylor { center: self.center, c: self.c.iter().map(|&v| v * s).collect() }
    }

    pub fn mul(&self, other: &Taylor) -> Taylor {
        assert_eq!(self.center, other.center);
        if self.c.is_empty() || other.c.is_empty() {
            return Taylor::zero(self.center);
        }
        let mut c = vec![Complex64::default(); self.c.len() + other.c.len() - 1];
        for (i, &x) in self.c.iter().enumerate() {
            if x == Complex64::default() {
                continue;
            }
            for (j, &y) in other.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Taylor { center: self.center, c }
    }

    /// Multiply by (z - center)^k.
    pub fn shift_up(&self, k: usize) -> Taylor {
        let mut c = vec![Complex64::default(); k];
        c.extend_from_slice(&self.c);
        Taylor { center: self.center, c }
    }

    /// Exact recentering by repeated synthetic division (Horner shift).
    pub fn recenter(&self, new_center: Complex64) -> Taylor {
        let d = new_center - self.center;
        let mut work = self.c.clone();
        let n = work.len();
        let mut out = vec![Complex64::default(); n];
        for item in out.iter_mut().take(n) {
            // divide work by (w - d): remainder is the next coefficient
            let mut rem = Complex64::default();
            for j in (0..work.len()).rev() {
                let t = work[j] + rem * d;
                work[j] = rem;
                rem = t;
            }
            *item = rem;
            work.pop();
        }
        Taylor { center: new_center, c: out }
    }

    pub fn truncate_tail(mut self, tol: f64) -> Taylor {
        while let Some(&last) = self.c.last() {
            if last.norm() < tol && self.c.len() > 1 {
                self.c.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn sup(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Analytic half g of a real series: f(theta) = g(z) + conj-g(1/z) on |z| = 1,
/// with Im g(0) set to zero.
pub fn split_real(series: &TrigSeries) -> Result<Taylor> {
    series.require_real()?;
    let n = series.order() as i64;
    let mut c = Vec::with_capacity(n as usize + 1);
    c.push(Complex64::new(series.coeff(0).re / 2.0, 0.0));
    for j in 1..=n {
        c.push(series.coeff(j));
    }
    Ok(Taylor { center: Complex64::default(), c })
}

/// alpha_p = (-1)^(m-1+p) (2m-p-2)! / ((m-p-1)! p!), p = 0..m-1.
pub fn alpha_coeffs(m: usize) -> Vec<f64> {
    assert!(m >= 1);
    let fact = |n: usize| -> f64 { (1..=n).map(|i| i as f64).product() };
    (0..m)
        .map(|p| {
            let sign = if (m - 1 + p).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * fact(2 * m - p - 2) / (fact(m - p - 1) * fact(p))
        })
        .collect()
}

fn fact_recip(q: i64) -> f64 {
    // 1/q! with the convention 1/q! = 0 for negative q.
    if q < 0 {
        0.0
    } else {
        1.0 / (1..=q).map(|i| i as f64).product::<f64>()
    }
}

/// beta_l^n from the series solution of the differential equation about z1,
/// exactly as displayed in the source formula (factorials of negative
/// integers giving zero).
pub fn beta_coeff(m: usize, ell: usize, n: usize, frame: &MobiusFrame) -> f64 {
    assert!(ell < m);
    let beta = frame.beta;
    let z1 = frame.z1;
    // (n-l)!/n! = 1/(n (n-1) ... (n-l+1))
    let mut prefactor = 1.0;
    for i in 0..ell {
        prefactor /= (n - i) as f64;
    }
    prefactor /= beta.powi(ell as i32);
    let fact = |q: i64| -> f64 {
        if q < 0 {
            f64::NAN
        } else {
            (1..=q).map(|i| i as f64).product()
        }
    };
    let mut total = 0.0;
    for k in 0..m {
        let outer = (beta / z1).powi(k as i32) * fact_recip((m - 1 - k) as i64)
            * fact_recip(k as i64 - ell as i64);
        if outer == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for p in 0..m {
            let denom = fact_recip(k as i64 - p as i64)
                * fact_recip(n as i64 - ell as i64 - p as i64)
                * fact_recip(ell as i64 + p as i64 - k as i64);
            if denom == 0.0 {
                continue;
            }
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * fact((2 * m - p - 2) as i64) * denom;
        }
        total += outer * inner;
    }
    prefactor * total
}

/// Recurrence weights G_l^n for the z^n coefficient of D[h] expanded about
/// z1: [z^n] D[h](z + z1) = sum_l a_{n-l} G_l^n. These are the row-rescaled
/// beta coefficients, G_l^n = n! (-1)^(m-1) z1^(m-1) beta_l^n.
fn ode_weight(m: usize, ell: usize, n: usize, frame: &MobiusFrame) -> f64 {
    let alphas = alpha_coeffs(m);
    let binom = |n: i64, k: i64| -> f64 {
        if k < 0 || k > n {
            return 0.0;
        }
        let mut v = 1.0;
        for i in 0..k {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    };
    let mut total = 0.0;
    for (p, &ap) in alphas.iter().enumerate() {
        if ell + p > n {
            continue;
        }
        // falling factorial (n-l)(n-l-1)...(n-l-p+1)
        let mut fall = 1.0;
        for i in 0..p {
            fall *= (n - ell - i) as f64;
        }
        let mut pair = 0.0;
        for k1 in 0..=ell {
            let k2 = ell - k1;
            pair += binom((m - 1 - p) as i64, k1 as i64)
                * frame.z1.powi((m - 1 - p) as i64 as i32 - k1 as i32)
                * binom(p as i64, k2 as i64)
                * frame.beta.powi(p as i32 - k2 as i32);
        }
        total += ap * fall * pair;
    }
    total
}

/// Solve D[h] = H for the solution analytic at z1, as a Taylor series about
/// z1 of length `len`. The leading weights G_0^n never vanish.
pub fn ode_solve(h_rhs: &Taylor, m: usize, frame: &MobiusFrame, len: usize) -> Taylor {
    let z1 = Complex64::new(frame.z1, 0.0);
    assert_eq!(h_rhs.center, z1);
    if m == 1 {
        // order-zero equation: D = identity
        let mut c = h_rhs.c.clone();
        c.resize(len, Complex64::default());
        return Taylor { center: z1, c };
    }
    let mut a = vec![Complex64::default(); len];
    for n in 0..len {
        let mut rhs = h_rhs.coeff(n);
        for ell in 1..m.min(n + 1) {
            rhs -= a[n - ell] * ode_weight(m, ell, n, frame);
        }
        a[n] = rhs / ode_weight(m, 0, n, frame);
    }
    Taylor { center: z1, c: a }
}

/// The differential operator D[h] = sum_p alpha_p z^(m-1-p) (z^2+2az+1)^p h^(p)
/// on polynomials about 0.
pub fn apply_d(h: &Taylor, m: usize, frame: &MobiusFrame) -> Taylor {
    assert_eq!(h.center, Complex64::default());
    let alphas = alpha_coeffs(m);
    let quad = Taylor {
        center: Complex64::default(),
        c: vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0 * frame.a, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    };
    let mut out = Taylor::zero(Complex64::default());
    let mut dh = h.clone();
    let mut quad_pow = Taylor {
        center: Complex64::default(),
        c: vec![Complex64::new(1.0, 0.0)],
    };
    for (p, &ap) in alphas.iter().enumerate() {
        let term = dh.mul(&quad_pow).shift_up(m - 1 - p).scale(Complex64::new(ap, 0.0));
        out = out.add(&term);
        dh = dh.deriv();
        quad_pow = quad_pow.mul(&quad);
    }
    out
}

/// Cauchy-kernel functional of the analytic half g:
/// Phi(mu; g) = (2 i pi / (m-1)!) d^(m-1)/dz^(m-1) [ z^(m-1) g(z)
///              (1 - phi(mu) z)^-m ] at z = mu.
pub fn phi_functional(g: &Taylor, m: usize, frame: &MobiusFrame, mu: Complex64) -> Complex64 {
    let h = g.shift_up(m - 1);
    let c = frame.phi(mu);
    let base = Complex64::new(1.0, 0.0) - c * mu;
    let fact = |n: usize| -> f64 { (1..=n).map(|i| i as f64).product() };
    let mut binom = 1.0;
    let mut acc = Complex64::default();
    for q in 0..m {
        // binom(m-1, q) h^(q)(mu) c^(m-1-q) (2m-2-q)!/(m-1)! (1-c mu)^(q-2m+1)
        let term = binom
            * fact(2 * m - 2 - q)
            / fact(m - 1)
            * h.eval_deriv(mu, q)
            * c.powi((m - 1 - q) as i32)
            * base.powi(q as i32 - 2 * m as i32 + 1);
        acc += term;
        binom = binom * (m - 1 - q) as f64 / (q + 1) as f64;
    }
    2.0 * PI * I / fact(m - 1) * acc
}

/// conj-composed functional: conj(Phi(conj(w); g)), analytic in w.
fn phi_bar(g: &Taylor, m: usize, frame: &MobiusFrame, w: Complex64) -> Complex64 {
    phi_functional(g, m, frame, w.conj()).conj()
}

/// Diagnostics of a Neumann (or Dirichlet) reconstruction.
#[derive(Debug, Clone)]
pub struct DtnReport {
    /// Max |global relation| over the exterior check set, relative to the
    /// boundary-data norm.
    pub residual_norm: f64,
    /// Residual of the polynomial least-squares solve.
    pub lsq_residual: f64,
    /// Condition number of that solve.
    pub condition: f64,
    /// Deviation of the recovered polynomial from conjugate symmetry.
    pub symmetry_defect: f64,
}

/// Shared reconstruction engine. Given the analytic halves g2 (the factor
/// multiplied by -i(a+1/mu)) and g3 of the known side of the global relation
/// at engine order m, recover the real function f with
/// T_f(mu) = T_g3(mu) - i(a + 1/mu) T_g2(mu).
fn recover_f(
    g2: &Taylor,
    g3: &Taylor,
    m: usize,
    frame: &MobiusFrame,
) -> Result<(TrigSeries, f64, f64, f64)> {
    let a = frame.a;
    let z1 = Complex64::new(frame.z1, 0.0);

    // H = D[h3] - i (a + 1/z) D[h2]; D[h2] vanishes at 0, so the division is a
    // coefficient shift.
    let d3 = apply_d(&g3.shift_up(m - 1), m, frame);
    let d2 = apply_d(&g2.shift_up(m - 1), m, frame);
    let scale = d2.sup().max(d3.sup()).max(1e-300);
    if d2.coeff(0).norm() > 1e-10 * scale {
        return Err(Error::NonzeroMean { mean: d2.coeff(0).norm() });
    }
    let d2_over_z = Taylor { center: d2.center, c: d2.c.iter().skip(1).copied().collect() };
    let h_rhs = d3.add(&d2_over_z.add(&d2.scale(Complex64::new(a, 0.0))).scale(-I));

    // analytic-at-z1 solution, transported back to 0
    let tail = 120;
    let len = h_rhs.degree() + tail;
    let h_z1 = ode_solve(&h_rhs.recenter(z1), m, frame, len);
    // decay check of the series tail
    let tail_mag: f64 = h_z1.c[len.saturating_sub(6)..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if tail_mag > 1e-8 * h_z1.sup().max(1e-300) {
        return Err(Error::NoConvergence { what: "series solution about z1", residual: tail_mag });
    }
    let h0 = h_z1.recenter(Complex64::default()).truncate_tail(1e-13 * h_z1.sup());

    // h-tilde: coefficients of z^(m-1), z^m, ... shifted down
    let htilde = Taylor {
        center: Complex64::default(),
        c: h0.c.iter().skip(m - 1).copied().collect(),
    };

    // Polynomial part: solve D[Q](mu_s) = S(mu_s) (m-1)!/(2 i pi) *
    //   [known(mu_s) - T_htilde(mu_s)] in the monomial basis, dim 2m-1.
    let n_samples = (4 * m).max(8);
    let r = frame.sample_radius();
    let dim = 2 * m - 1;
    let mut mat = DMatrix::<Complex64>::zeros(n_samples, dim);
    let mut rhs = DVector::<Complex64>::zeros(n_samples);
    let alphas = alpha_coeffs(m);
    for s in 0..n_samples {
        let mu = Complex64::from_polar(r, 2.0 * PI * (s as f64 + 0.5) / n_samples as f64);
        let pm = frame.phi(mu);
        let known = (phi_functional(g3, m, frame, mu) - phi_bar(g3, m, frame, pm))
            - I * (a + 1.0 / mu) * (phi_functional(g2, m, frame, mu) - phi_bar(g2, m, frame, pm));
        let t_ht = phi_functional(&htilde, m, frame, mu) - phi_bar(&htilde, m, frame, pm);
        let fact_m1: f64 = (1..m).map(|i| i as f64).product();
        rhs[s] = frame.s_factor(mu, m) * (known - t_ht) * fact_m1 / (2.0 * PI * I);
        let quad = mu * mu + 2.0 * a * mu + 1.0;
        for j in 0..dim {
            let mut v = Complex64::default();
            for (p, &ap) in alphas.iter().enumerate() {
                if p > j {
                    continue;
                }
                let mut fall = 1.0;
                for i in 0..p {
                    fall *= (j - i) as f64;
                }
                v += ap * mu.powi((m - 1 - p) as i32) * quad.powi(p as i32) * fall
                    * mu.powi((j - p) as i32);
            }
            mat[(s, j)] = v;
        }
    }
    let svd = mat.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = smax / smin.max(1e-300);
    let q = svd
        .solve(&rhs, 1e-14 * smax)
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    let fitted = &mat * &q;
    let lsq_residual = (0..n_samples)
        .map(|s| (fitted[s] - rhs[s]).norm())
        .fold(0.0, f64::max)
        / rhs.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);

    // conjugate symmetry of the polynomial: Q_{m-1-j} = conj(Q_{m-1+j})
    let mut symmetry_defect = 0.0f64;
    let qscale = (0..dim).map(|j| q[j].norm()).fold(0.0, f64::max).max(1e-300);
    for j in 0..dim {
        symmetry_defect =
            symmetry_defect.max((q[j] - q[dim - 1 - j].conj()).norm() / qscale);
    }

    // assemble f = 2 Re htilde(e^{i theta}) + sum_j q_j e^{i (j-m+1) theta}
    let order = htilde.degree().max(m);
    let mut f = TrigSeries::zero(order);
    for (j, &c) in htilde.c.iter().enumerate() {
        f.set_coeff(j as i64, f.coeff(j as i64) + c);
        f.set_coeff(-(j as i64), f.coeff(-(j as i64)) + c.conj());
    }
    for j in 0..dim {
        let idx = j as i64 - (m as i64 - 1);
        let sym = 0.5 * (q[j] + q[dim - 1 - j].conj());
        f.set_coeff(idx, f.coeff(idx) + sym);
    }
    Ok((f.compress(1e-13 * f.sup_coeff()), lsq_residual, condition, symmetry_defect))
}

/// Divide a series by (a + cos theta)^power pointwise and refit.
fn divide_by_x(f: &TrigSeries, a: f64, power: i32, extra_order: usize) -> TrigSeries {
    let order = f.order() + extra_order;
    TrigSeries::fit_fn(
        |theta| f.eval_real(theta) / (a + theta.cos()).powi(power),
        order,
    )
    .compress(1e-13)
}

/// Exterior check set for residual reporting.
fn check_points(a: f64) -> Vec<Complex64> {
    let r = (a + 2.0).max(3.0);
    (0..16)
        .map(|i| Complex64::from_polar(r, 2.0 * PI * (i as f64 + 0.3) / 16.0))
        .filter(|k| (k - a).norm() > 1.2 && (k + a).norm() > 1.2)
        .collect()
}

fn report_residual(data: &BoundaryData, dom: &DiskDomain) -> f64 {
    let scale = data.u_t.l2_norm().max(data.u_n.l2_norm()).max(1e-300);
    check_points(dom.center())
        .iter()
        .map(|&k| global_residual(data, dom, k).map(|v| v.norm()).unwrap_or(f64::NAN))
        .fold(0.0, f64::max)
        / scale
}

/// Recover the Neumann data u_n from the Dirichlet data u_t for
/// alpha = -2(m-1), m >= 1.
pub fn reconstruct_un_negative(
    u_t: &TrigSeries,
    m: usize,
    dom: &DiskDomain,
) -> Result<(TrigSeries, DtnReport)> {
    assert!(m >= 1);
    let frame = MobiusFrame::new(dom.center())?;
    u_t.require_real()?;
    let mean = u_t.mean().norm();
    if mean > 1e-9 * u_t.sup_coeff().max(1.0) {
        return Err(Error::NonzeroMean { mean });
    }
    // g2 from u_t, g3 from y u_t
    let mut sin_ser = TrigSeries::zero(1);
    sin_ser.set_coeff(1, Complex64::new(0.0, -0.5));
    sin_ser.set_coeff(-1, Complex64::new(0.0, 0.5));
    let g2 = split_real(u_t)?;
    let g3 = split_real(&u_t.mul(&sin_ser))?;
    let (f, lsq_residual, condition, symmetry_defect) = recover_f(&g2, &g3, m, &frame)?;
    let u_n = divide_by_x(&f, frame.a, 1, 40);
    let alpha = -2 * (m as i32 - 1);
    let data = BoundaryData {
        alpha,
        u_t: u_t.clone(),
        u_n: u_n.clone(),
        trace: None,
        trace_anchor: Some(0.0),
    };
    let residual_norm = report_residual(&data, dom);
    Ok((u_n, DtnReport { residual_norm, lsq_residual, condition, symmetry_defect }))
}

/// Recover u_n from the trace and u_t for alpha = 2(m+1), m >= 0, through the
/// global relation of the second closed form (the first form does not carry
/// enough information for positive alpha).
pub fn reconstruct_un_positive(
    trace: &TrigSeries,
    u_t: &TrigSeries,
    m: usize,
    dom: &DiskDomain,
) -> Result<(TrigSeries, DtnReport)> {
    let frame = MobiusFrame::new(dom.center())?;
    trace.require_real()?;
    u_t.require_real()?;
    let a = frame.a;
    let m_eng = m + 1;
    // F_A = X^{2m} [ X sin(theta) u_t - (2m+1)(1 + a cos theta) u ]
    // F_B = X^{2m} [ X u_t - (2m+1) sin(theta) u ],  X = a + cos(theta);
    // F_B = d/dtheta [ X^{2m+1} u ] has zero mean.
    let mut cos_ser = TrigSeries::zero(1);
    cos_ser.set_coeff(1, Complex64::new(0.5, 0.0));
    cos_ser.set_coeff(-1, Complex64::new(0.5, 0.0));
    let mut sin_ser = TrigSeries::zero(1);
    sin_ser.set_coeff(1, Complex64::new(0.0, -0.5));
    sin_ser.set_coeff(-1, Complex64::new(0.0, 0.5));
    let x_ser = cos_ser.add(&TrigSeries::constant(a));
    let mut x_pow = TrigSeries::constant(1.0);
    for _ in 0..(2 * m) {
        x_pow = x_pow.mul(&x_ser);
    }
    let coef = (2 * m + 1) as f64;
    let one_plus_acos = TrigSeries::constant(1.0).add(&cos_ser.scale(Complex64::new(a, 0.0)));
    let f_a = x_pow.mul(
        &x_ser
            .mul(&sin_ser.mul(u_t))
            .add(&one_plus_acos.mul(trace).scale(Complex64::new(-coef, 0.0))),
    );
    let f_b = x_pow.mul(
        &x_ser
            .mul(u_t)
            .add(&sin_ser.mul(trace).scale(Complex64::new(-coef, 0.0))),
    );
    let mean = f_b.mean().norm();
    if mean > 1e-8 * f_b.sup_coeff().max(1.0) {
        return Err(Error::NonzeroMean { mean });
    }
    let mut f_b = f_b;
    f_b.set_coeff(0, Complex64::default());
    let g2 = split_real(&f_b.compress(1e-14 * f_b.sup_coeff()))?;
    let g3 = split_real(&f_a.compress(1e-14 * f_a.sup_coeff()))?;
    let (f, lsq_residual, condition, symmetry_defect) = recover_f(&g2, &g3, m_eng, &frame)?;
    let u_n = divide_by_x(&f, a, 2 * m as i32 + 2, 48);
    let data = BoundaryData {
        alpha: 2 * (m as i32 + 1),
        u_t: u_t.clone(),
        u_n: u_n.clone(),
        trace: Some(trace.clone()),
        trace_anchor: Some(trace.eval_real(0.0)),
    };
    let residual_norm = report_residual(&data, dom);
    Ok((u_n, DtnReport { residual_norm, lsq_residual, condition, symmetry_defect }))
}

/// Recover the Dirichlet data u_t from the Neumann data u_n for even alpha,
/// through the conjugate equation: v with v_t = x^alpha u_n solves the
/// -alpha equation, and u_t = -x^-alpha v_n.
pub fn reconstruct_ut_from_un(
    u_n: &TrigSeries,
    alpha: i32,
    dom: &DiskDomain,
) -> Result<(TrigSeries, DtnReport)> {
    assert!(alpha % 2 == 0);
    let a = dom.center();
    let vt = TrigSeries::fit_fn(
        |theta| (a + theta.cos()).powi(alpha) * u_n.eval_real(theta),
        u_n.order() + 40,
    )
    .compress(1e-13);
    let mean = vt.mean().norm();
    if mean > 1e-8 * vt.sup_coeff().max(1.0) {
        return Err(Error::InconsistentData { residual: mean });
    }
    let mut vt = vt;
    vt.set_coeff(0, Complex64::default());
    let neg_alpha = -alpha;
    let (vn, report) = if neg_alpha <= 0 {
        let m = (1 - neg_alpha / 2) as usize;
        reconstruct_un_negative(&vt, m, dom)?
    } else {
        let m = (neg_alpha / 2 - 1) as usize;
        let vtrace = vt.antiderivative(0.0)?;
        reconstruct_un_positive(&vtrace, &vt, m, dom)?
    };
    let ut = TrigSeries::fit_fn(
        |theta| -(a + theta.cos()).powi(-alpha) * vn.eval_real(theta),
        vn.order() + 40,
    )
    .compress(1e-13);
    Ok((ut, report))
}

/// Residual of the first-form global relation at the exterior point k:
/// oint [(k-z)(k+conj z)]^(alpha/2-1) ((k-iy) u_t + ix u_n) ds. For odd alpha
/// the half power follows the determination tracked continuously along the
/// circle from the reference branch at theta = 0.
pub fn global_residual(data: &BoundaryData, dom: &DiskDomain, k: Complex64) -> Result<Complex64> {
    let a = dom.center();
    if (k - a).norm() <= 1.0 || (k + a).norm() <= 1.0 {
        return Err(Error::BadSpectralPoint { k, what: "inside one of the excluded disks" });
    }
    let n = 512.max(8 * (data.u_t.order().max(data.u_n.order()) + 1));
    let crossings = circle_cut_crossings(a, k);
    let alpha = data.alpha;
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::default();
    for i in 0..n {
        let theta = i as f64 * h;
        let zp = Complex64::new(a + theta.cos(), theta.sin());
        let factor = if alpha % 2 == 0 {
            ((k - zp) * (k + zp.conj())).powi(alpha / 2 - 1)
        } else {
            let flips = crossings.iter().filter(|&&c| c <= theta).count();
            let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
            (sign * crate::lax::lambda_ref(zp, k)?).powi(alpha - 2)
        };
        let g = (k - I * zp.im) * data.u_t.eval_real(theta) + I * zp.re * data.u_n.eval_real(theta);
        acc += factor * g;
    }
    Ok(acc * h)
}

/// Numerical rank of the map from u_n coefficients (truncation `order`) to
/// the first-form global-relation functionals for alpha = 2(m+1), sampled at
/// exterior points. The positive-power kernel only sees the first m+1
/// derivatives of the analytic half, so the rank cannot exceed 2m+1 and the
/// map cannot determine u_n.
pub fn first_form_rank(m: usize, order: usize, dom: &DiskDomain) -> usize {
    let alpha = 2 * (m as i32 + 1);
    let a = dom.center();
    let ks = check_points(a);
    let dim = 2 * order + 1;
    // real parametrization: c_0, Re c_n, Im c_n
    let mut mat = DMatrix::<f64>::zeros(2 * ks.len(), dim);
    let zero_t = TrigSeries::zero(order);
    for (col, which) in (0..dim).map(|c| (c, c)) {
        let mut un = TrigSeries::zero(order);
        if which == 0 {
            un.set_coeff(0, Complex64::new(1.0, 0.0));
        } else {
            let n = ((which - 1) / 2 + 1) as i64;
            if which % 2 == 1 {
                un.set_coeff(n, Complex64::new(0.5, 0.0));
                un.set_coeff(-n, Complex64::new(0.5, 0.0));
            } else {
                un.set_coeff(n, Complex64::new(0.0, -0.5));
                un.set_coeff(-n, Complex64::new(0.0, 0.5));
            }
        }
        let data = BoundaryData {
            alpha,
            u_t: zero_t.clone(),
            u_n: un,
            trace: None,
            trace_anchor: Some(0.0),
        };
        for (row, &k) in ks.iter().enumerate() {
            let v = global_residual(&data, dom, k).unwrap();
            mat[(2 * row, col)] = v.re;
            mat[(2 * row + 1, col)] = v.im;
        }
    }
    let svd = mat.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > 1e-9 * smax).count()
}
