//! Independent ground truth for the solvers: exact polynomial and rational
//! solutions of Delta u + (alpha/x) u_x = 0 found by a null-space ansatz, the
//! recurrence map u -> x^{-1} u_x (alpha -> alpha + 2) and the symmetry map
//! u -> x^{alpha-1} u (alpha -> 2 - alpha), conjugation through the
//! generalized Cauchy-Riemann system, a second-order finite-difference
//! Dirichlet solver on a polar grid, and boundary-trace extraction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::{Error, Result};
use crate::geometry::DiskDomain;
use crate::quad::integrate_param;

/// One monomial c x^p y^q; p may be negative (x > 0 in the domain), q >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub c: f64,
    pub px: i32,
    pub qy: u32,
}

type FieldFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Form {
    Monomials(Vec<Term>),
    Closure { u: FieldFn, ux: FieldFn, uy: FieldFn },
}

/// Which representation an exact solution carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    BivariatePoly,
    Rational,
    Closure,
}

/// An exact solution of Delta u + (alpha/x) u_x = 0 with exact evaluators for
/// u and its first derivatives. Construction verifies the equation residual
/// at scattered points in the right half-plane.
#[derive(Clone)]
pub struct ExactSolution {
    pub alpha: i32,
    form: Form,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.form {
            Form::Monomials(t) => write!(f, "ExactSolution(alpha={}, {:?})", self.alpha, t),
            Form::Closure { .. } => write!(f, "ExactSolution(alpha={}, closure)", self.alpha),
        }
    }
}

fn eval_terms(terms: &[Term], z: Complex64) -> f64 {
    let (x, y) = (z.re, z.im);
    terms
        .iter()
        .map(|t| t.c * x.powi(t.px) * y.powi(t.qy as i32))
        .sum()
}

fn dx_terms(terms: &[Term]) -> Vec<Term> {
    terms
        .iter()
        .filter(|t| t.px != 0)
        .map(|t| Term { c: t.c * t.px as f64, px: t.px - 1, qy: t.qy })
        .collect()
}

fn dy_terms(terms: &[Term]) -> Vec<Term> {
    terms
        .iter()
        .filter(|t| t.qy != 0)
        .map(|t| Term { c: t.c * t.qy as f64, px: t.px, qy: t.qy - 1 })
        .collect()
}

fn prune(mut terms: Vec<Term>, tol: f64) -> Vec<Term> {
    terms.retain(|t| t.c.abs() > tol);
    terms
}

/// Deterministic scattered points in {0.8 <= x <= 3.4, |y| <= 1}.
fn gate_points(n: usize) -> Vec<Complex64> {
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n)
        .map(|_| Complex64::new(0.8 + 2.6 * next(), -1.0 + 2.0 * next()))
        .collect()
}

impl ExactSolution {
    /// Build from monomials and verify the equation residual at 100 points.
    pub fn from_monomials(alpha: i32, terms: Vec<Term>) -> Result<Self> {
        let sol = ExactSolution { alpha, form: Form::Monomials(prune(terms, 0.0)) };
        sol.residual_gate()?;
        Ok(sol)
    }

    pub fn kind(&self) -> SolutionKind {
        match &self.form {
            Form::Monomials(t) => {
                if t.iter().all(|t| t.px >= 0) {
                    SolutionKind::BivariatePoly
                } else {
                    SolutionKind::Rational
                }
            }
            Form::Closure { .. } => SolutionKind::Closure,
        }
    }

    pub fn u(&self, z: Complex64) -> f64 {
        match &self.form {
            Form::Monomials(t) => eval_terms(t, z),
            Form::Closure { u, .. } => u(z),
        }
    }

    pub fn ux(&self, z: Complex64) -> f64 {
        match &self.form {
            Form::Monomials(t) => eval_terms(&dx_terms(t), z),
            Form::Closure { ux, .. } => ux(z),
        }
    }

    pub fn uy(&self, z: Complex64) -> f64 {
        match &self.form {
            Form::Monomials(t) => eval_terms(&dy_terms(t), z),
            Form::Closure { uy, .. } => uy(z),
        }
    }

    /// Complex derivative u_z = (u_x - i u_y)/2.
    pub fn uz(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.ux(z), -self.uy(z)) * 0.5
    }

    /// Conjugate derivative u_zbar = (u_x + i u_y)/2.
    pub fn uzbar(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.ux(z), self.uy(z)) * 0.5
    }

    /// PDE residual Delta u + (alpha/x) u_x at z.
    ///
    /// Exact differentiation for monomial forms; fourth-order differences of
    /// the exact first derivatives for closure forms.
    pub fn residual(&self, z: Complex64) -> f64 {
        match &self.form {
            Form::Monomials(t) => {
                let uxx = eval_terms(&dx_terms(&dx_terms(t)), z);
                let uyy = eval_terms(&dy_terms(&dy_terms(t)), z);
                let ux = eval_terms(&dx_terms(t), z);
                uxx + uyy + self.alpha as f64 / z.re * ux
            }
            Form::Closure { ux, uy, .. } => {
                let h = 1e-3;
                let d4 = |f: &FieldFn, dir: Complex64| {
                    (-f(z + 2.0 * h * dir) + 8.0 * f(z + h * dir) - 8.0 * f(z - h * dir)
                        + f(z - 2.0 * h * dir))
                        / (12.0 * h)
                };
                let uxx = d4(ux, Complex64::new(1.0, 0.0));
                let uyy = d4(uy, Complex64::new(0.0, 1.0));
                uxx + uyy + self.alpha as f64 / z.re * ux(z)
            }
        }
    }

    /// Largest |u| over the gate points, used to scale residual checks.
    pub fn scale(&self) -> f64 {
        gate_points(100)
            .iter()
            .map(|&z| self.u(z).abs())
            .fold(0.0, f64::max)
            .max(1e-30)
    }

    fn residual_gate(&self) -> Result<()> {
        let scale = self.scale();
        let tol = match self.form {
            Form::Monomials(_) => 1e-10,
            // finite differences limit the closure check
            Form::Closure { .. } => 1e-8,
        };
        let mut worst = 0.0f64;
        for z in gate_points(100) {
            worst = worst.max(self.residual(z).abs());
        }
        if worst > tol * scale.max(1.0) {
            return Err(Error::NoConvergence { what: "equation residual gate", residual: worst });
        }
        Ok(())
    }
}

/// Basis of polynomial solutions u = sum c_{jk} x^{2j} y^k with 2j + k <= max_degree,
/// found as the null space of the equation operator on that monomial space.
pub fn poly_solutions(alpha: i32, max_degree: u32) -> Result<Vec<ExactSolution>> {
    assert!(max_degree <= 12);
    // Enumerate basis monomials x^{2j} y^k.
    let mut basis = Vec::new();
    for j in 0..=(max_degree / 2) {
        for k in 0..=(max_degree - 2 * j) {
            basis.push((j, k));
        }
    }
    let index = |j: u32, k: u32| basis.iter().position(|&(a, b)| (a, b) == (j, k));
    // L(x^{2j} y^k) = 2j (2j - 1 + alpha) x^{2j-2} y^k + k (k-1) x^{2j} y^{k-2}
    let mut mat = DMatrix::<f64>::zeros(basis.len(), basis.len());
    for (col, &(j, k)) in basis.iter().enumerate() {
        if j > 0 {
            let c = (2 * j) as f64 * ((2 * j) as f64 - 1.0 + alpha as f64);
            if let Some(row) = index(j - 1, k) {
                mat[(row, col)] += c;
            }
        }
        if k > 1 {
            let c = (k * (k - 1)) as f64;
            if let Some(row) = index(j, k - 2) {
                mat[(row, col)] += c;
            }
        }
    }
    let svd = mat.svd(true, true);
    let v_t = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-12 * smax.max(1.0);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol {
            let row = v_t.row(i);
            let terms: Vec<Term> = basis
                .iter()
                .enumerate()
                .filter(|&(c, _)| row[c].abs() > 1e-12)
                .map(|(c, &(j, k))| Term { c: row[c], px: 2 * j as i32, qy: k })
                .collect();
            out.push(ExactSolution::from_monomials(alpha, terms)?);
        }
    }
    // nalgebra does not sort null vectors; put low-degree solutions first
    out.sort_by_key(|s| match &s.form {
        Form::Monomials(t) => t.iter().map(|t| t.px + t.qy as i32).max().unwrap_or(0),
        _ => 0,
    });
    Ok(out)
}

/// The recurrence map: if u solves the alpha equation, x^{-1} u_x solves the
/// alpha + 2 equation.
pub fn lift(u: &ExactSolution) -> Result<ExactSolution> {
    let Form::Monomials(terms) = &u.form else {
        return Err(Error::UnsupportedKind);
    };
    let lifted: Vec<Term> = dx_terms(terms)
        .into_iter()
        .map(|t| Term { c: t.c, px: t.px - 1, qy: t.qy })
        .collect();
    let scale: f64 = lifted.iter().map(|t| t.c.abs()).sum();
    if scale < 1e-14 {
        return Err(Error::DegenerateSolution);
    }
    ExactSolution::from_monomials(u.alpha + 2, lifted)
}

/// The symmetry map: if u solves the alpha equation, x^{alpha-1} u solves the
/// 2 - alpha equation.
pub fn sym_map(u: &ExactSolution) -> Result<ExactSolution> {
    let Form::Monomials(terms) = &u.form else {
        return Err(Error::UnsupportedKind);
    };
    let mapped: Vec<Term> = terms
        .iter()
        .map(|t| Term { c: t.c, px: t.px + u.alpha - 1, qy: t.qy })
        .collect();
    ExactSolution::from_monomials(2 - u.alpha, mapped)
}

/// Conjugate function v with v_x = -sigma u_y, v_y = sigma u_x for
/// sigma = x^p, p = u.alpha: v solves the conductivity equation for 1/sigma,
/// i.e. the -alpha equation. v is normalized to vanish at `base_point` and is
/// evaluated by a line integral along the straight segment from there.
pub fn cr_conjugate(u: &ExactSolution, base_point: Complex64) -> Result<ExactSolution> {
    let p = u.alpha;
    let u0 = u.clone();
    let u1 = u.clone();
    let sigma = move |z: Complex64| z.re.powi(p);
    let s0 = sigma;
    let vx: FieldFn = {
        let s = sigma;
        Arc::new(move |z| -s(z) * u0.uy(z))
    };
    let vy: FieldFn = Arc::new(move |z| s0(z) * u1.ux(z));
    let (vx0, vy0) = (vx.clone(), vy.clone());
    let v: FieldFn = Arc::new(move |z| {
        let dir = z - base_point;
        integrate_param(
            |t| {
                let p = base_point + dir * t;
                Complex64::new(vx0(p) * dir.re + vy0(p) * dir.im, 0.0)
            },
            0.0,
            1.0,
            64,
        )
        .re
    });
    let sol = ExactSolution { alpha: -p, form: Form::Closure { u: v, ux: vx, uy: vy } };
    sol.residual_gate()?;
    Ok(sol)
}

/// Boundary data of an exact solution on the circle of `dom`, fitted at the
/// given series order.
pub fn boundary_trace(u: &ExactSolution, dom: &DiskDomain, order: usize) -> BoundaryData {
    let a = dom.center();
    let trace = TrigSeries::fit_fn(|t| u.u(Complex64::new(a + t.cos(), t.sin())), order);
    let u_t = TrigSeries::fit_fn(
        |t| {
            let z = Complex64::new(a + t.cos(), t.sin());
            -t.sin() * u.ux(z) + t.cos() * u.uy(z)
        },
        order,
    );
    let u_n = TrigSeries::fit_fn(
        |t| {
            let z = Complex64::new(a + t.cos(), t.sin());
            t.cos() * u.ux(z) + t.sin() * u.uy(z)
        },
        order,
    );
    let anchor = trace.eval_real(0.0);
    BoundaryData {
        alpha: u.alpha,
        u_t,
        u_n,
        trace: Some(trace),
        trace_anchor: Some(anchor),
    }
}

/// Solution values of the finite-difference reference solver on its polar grid.
#[derive(Debug, Clone)]
pub struct FDGrid {
    pub a: f64,
    pub n_r: usize,
    pub n_phi: usize,
    pub h: f64,
    /// Interior values, rows i = 1..n_r-1 (radius i*h), columns j (angle).
    values: Vec<f64>,
    center: f64,
    boundary: Vec<f64>,
    /// Maximum discrete-operator residual after relaxation.
    pub final_residual: f64,
}

impl FDGrid {
    fn val(&self, i: usize, j: usize) -> f64 {
        let j = j % self.n_phi;
        if i == 0 {
            self.center
        } else if i == self.n_r {
            self.boundary[j]
        } else {
            self.values[(i - 1) * self.n_phi + j]
        }
    }

    /// Bilinear interpolation in (r, phi).
    pub fn eval(&self, z: Complex64) -> f64 {
        let w = z - self.a;
        let r = w.norm();
        let phi = w.arg().rem_euclid(2.0 * PI);
        let fr = (r / self.h).min(self.n_r as f64 - 1e-12);
        let i0 = fr.floor() as usize;
        let tr = fr - i0 as f64;
        let dphi = 2.0 * PI / self.n_phi as f64;
        let fp = phi / dphi;
        let j0 = (fp.floor() as usize) % self.n_phi;
        let tp = fp - fp.floor();
        let v00 = self.val(i0, j0);
        let v01 = self.val(i0, j0 + 1);
        let v10 = self.val(i0 + 1, j0);
        let v11 = self.val(i0 + 1, j0 + 1);
        (1.0 - tr) * ((1.0 - tp) * v00 + tp * v01) + tr * ((1.0 - tp) * v10 + tp * v11)
    }
}

/// Second-order finite-difference solution of the Dirichlet problem on the
/// disk, on a polar grid about the center, solved by SOR relaxation.
pub fn fd_solve(alpha: i32, trace: &TrigSeries, dom: &DiskDomain, n_r: usize) -> Result<FDGrid> {
    let a = dom.center();
    let n_phi = (4 * n_r).max(16);
    assert!(n_r * n_phi <= 100_000, "grid too large");
    let h = 1.0 / n_r as f64;
    let dphi = 2.0 * PI / n_phi as f64;
    let boundary: Vec<f64> = (0..n_phi).map(|j| trace.eval_real(j as f64 * dphi)).collect();
    let scale = boundary.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);

    let mut grid = FDGrid {
        a,
        n_r,
        n_phi,
        h,
        values: vec![0.0; (n_r - 1) * n_phi],
        center: 0.0,
        boundary,
        final_residual: f64::INFINITY,
    };

    // Precompute stencil coefficients per (i, j).
    let mut coef = Vec::with_capacity((n_r - 1) * n_phi);
    for i in 1..n_r {
        let r = i as f64 * h;
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let x = a + r * phi.cos();
            let drift = 1.0 / r + alpha as f64 * phi.cos() / x;
            let swirl = alpha as f64 * phi.sin() / (x * r);
            let c_ip = 1.0 / (h * h) + drift / (2.0 * h);
            let c_im = 1.0 / (h * h) - drift / (2.0 * h);
            let c_jp = 1.0 / (r * r * dphi * dphi) - swirl / (2.0 * dphi);
            let c_jm = 1.0 / (r * r * dphi * dphi) + swirl / (2.0 * dphi);
            let c_0 = -2.0 / (h * h) - 2.0 / (r * r * dphi * dphi);
            coef.push([c_ip, c_im, c_jp, c_jm, c_0]);
        }
    }

    let omega = 2.0 / (1.0 + (PI * h).sin());
    let max_iter = 200_000;
    let mut iter = 0;
    loop {
        let mut max_change = 0.0f64;
        // center update: Laplacian closure through the ring average plus the
        // first-order drift term evaluated from the ring.
        let mut avg = 0.0;
        let mut avg_cos = 0.0;
        for j in 0..n_phi {
            let v = grid.val(1, j);
            avg += v;
            avg_cos += v * (j as f64 * dphi).cos();
        }
        avg /= n_phi as f64;
        avg_cos /= n_phi as f64;
        let new_center = avg + alpha as f64 / a * (h / 2.0) * avg_cos;
        max_change = max_change.max((new_center - grid.center).abs());
        grid.center = new_center;

        for i in 1..n_r {
            for j in 0..n_phi {
                let c = coef[(i - 1) * n_phi + j];
                let nb = c[0] * grid.val(i + 1, j)
                    + c[1] * grid.val(i - 1, j)
                    + c[2] * grid.val(i, j + 1)
                    + c[3] * grid.val(i, j + n_phi - 1);
                let gs = -nb / c[4];
                let old = grid.values[(i - 1) * n_phi + j];
                let new = old + omega * (gs - old);
                max_change = max_change.max((new - old).abs());
                grid.values[(i - 1) * n_phi + j] = new;
            }
        }
        iter += 1;
        if max_change < 1e-13 * scale {
            break;
        }
        if iter >= max_iter {
            return Err(Error::NoConvergence { what: "finite-difference relaxation", residual: max_change });
        }
    }

    // report the true discrete residual
    let mut res = 0.0f64;
    for i in 1..n_r {
        for j in 0..n_phi {
            let c = coef[(i - 1) * n_phi + j];
            let r = c[0] * grid.val(i + 1, j)
                + c[1] * grid.val(i - 1, j)
                + c[2] * grid.val(i, j + 1)
                + c[3] * grid.val(i, j + n_phi - 1)
                + c[4] * grid.val(i, j);
            res = res.max(r.abs());
        }
    }
    grid.final_residual = res * h * h; // operator scales like 1/h^2
    Ok(grid)
}

/// Named oracle catalogue used by the command-line tools and tests.
pub fn named_oracle(name: &str) -> Result<ExactSolution> {
    let t = |c: f64, px: i32, qy: u32| Term { c, px, qy };
    match name {
        // harmonic (alpha = 0)
        "x" => ExactSolution::from_monomials(0, vec![t(1.0, 1, 0)]),
        "x2-y2" => ExactSolution::from_monomials(0, vec![t(1.0, 2, 0), t(-1.0, 0, 2)]),
        // Re((z-a)^3) for a = 2: expand (x-2)^3 - 3(x-2)y^2
        "re-zma3" => ExactSolution::from_monomials(
            0,
            vec![
                t(1.0, 3, 0),
                t(-6.0, 2, 0),
                t(12.0, 1, 0),
                t(-8.0, 0, 0),
                t(-3.0, 1, 2),
                t(6.0, 0, 2),
            ],
        ),
        // alpha = -2
        "x3" => ExactSolution::from_monomials(-2, vec![t(1.0, 3, 0)]),
        "x2+y2" => ExactSolution::from_monomials(-2, vec![t(1.0, 2, 0), t(1.0, 0, 2)]),
        // alpha = 1
        "x2-2y2" => ExactSolution::from_monomials(1, vec![t(1.0, 2, 0), t(-2.0, 0, 2)]),
        // alpha = 2: recurrence lift of Re(z^3)
        "lift-rez3" => ExactSolution::from_monomials(2, vec![t(3.0, 1, 0), t(-3.0, -1, 2)]),
        // alpha = -1: symmetry map of the alpha = 3 solution x^2 - 4 y^2
        "symlift-m1" => {
            let e3 = ExactSolution::from_monomials(3, vec![t(1.0, 2, 0), t(-4.0, 0, 2)])?;
            sym_map(&e3)
        }
        other => Err(Error::Unsupported(format!("unknown oracle `{other}`"))),
    }
}
