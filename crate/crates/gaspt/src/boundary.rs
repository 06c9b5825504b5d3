//! Boundary data on the circle C(a, 1) as truncated Fourier series in the
//! angle theta, together with spectral differentiation, antiderivatives, and
//! the conversion between complex derivatives and tangential/normal
//! derivatives along the circle.
//!
//! The circle has radius 1, so arclength equals theta and the tangential
//! derivative is exactly d/d(theta).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Truncated Fourier series sum_{n=-N..N} c_n e^{i n theta}.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    order: usize,
    /// coeffs[j] holds c_{j - order}; length 2*order + 1.
    coeffs: Vec<Complex64>,
}

impl TrigSeries {
    pub fn zero(order: usize) -> Self {
        TrigSeries {
            order,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * order + 1],
        }
    }

    pub fn constant(value: f64) -> Self {
        let mut s = TrigSeries::zero(0);
        s.coeffs[0] = Complex64::new(value, 0.0);
        s
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 2 * order + 1);
        TrigSeries { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient c_n (zero outside the stored band).
    pub fn coeff(&self, n: i64) -> Complex64 {
        let idx = n + self.order as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, v: Complex64) {
        let idx = (n + self.order as i64) as usize;
        self.coeffs[idx] = v;
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        // Horner in e^{i theta} over the band -N..N.
        let e = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * e + c;
        }
        acc * Complex64::from_polar(1.0, -(self.order as f64) * theta)
    }

    pub fn eval_real(&self, theta: f64) -> f64 {
        self.eval(theta).re
    }

    /// Values on the uniform grid theta_i = 2 pi i / m.
    pub fn eval_grid(&self, m: usize) -> Vec<Complex64> {
        (0..m)
            .map(|i| self.eval(2.0 * PI * i as f64 / m as f64))
            .collect()
    }

    /// j-th spectral derivative in theta: c_n -> (i n)^j c_n.
    pub fn deriv(&self, j: u32) -> TrigSeries {
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let n = idx as i64 - self.order as i64;
            *c *= (I * n as f64).powi(j as i32);
        }
        out
    }

    /// Antiderivative in theta pinned to `anchor_value` at theta = 0.
    /// Requires zero mean.
    pub fn antiderivative(&self, anchor_value: f64) -> Result<TrigSeries> {
        let m = self.mean().norm();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if m > 1e-10 * scale.max(1.0) {
            return Err(Error::NonzeroMean { mean: m });
        }
        let mut out = TrigSeries::zero(self.order);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            let n = idx as i64 - self.order as i64;
            if n != 0 {
                out.coeffs[idx] = c / (I * n as f64);
            }
        }
        let at0 = out.eval(0.0).re;
        out.set_coeff(0, Complex64::new(anchor_value - at0, 0.0));
        Ok(out)
    }

    /// Deviation from the conjugate-coefficient symmetry of a real function.
    pub fn reality_defect(&self) -> f64 {
        let mut d = self.coeff(0).im.abs();
        for n in 1..=self.order as i64 {
            d = d.max((self.coeff(n) - self.coeff(-n).conj()).norm());
        }
        d
    }

    pub fn require_real(&self) -> Result<()> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let d = self.reality_defect();
        if d > 1e-9 * scale.max(1.0) {
            return Err(Error::NonRealSeries { deviation: d });
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> TrigSeries {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &TrigSeries) -> TrigSeries {
        let order = self.order.max(other.order);
        let mut out = TrigSeries::zero(order);
        for n in -(order as i64)..=(order as i64) {
            out.set_coeff(n, self.coeff(n) + other.coeff(n));
        }
        out
    }

    /// Pointwise product, exact by coefficient convolution (band grows).
    pub fn mul(&self, other: &TrigSeries) -> TrigSeries {
        let order = self.order + other.order;
        let mut out = TrigSeries::zero(order);
        for (ia, &ca) in self.coeffs.iter().enumerate() {
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            let na = ia as i64 - self.order as i64;
            for (ib, &cb) in other.coeffs.iter().enumerate() {
                let nb = ib as i64 - other.order as i64;
                let idx = (na + nb + order as i64) as usize;
                out.coeffs[idx] += ca * cb;
            }
        }
        out
    }

    /// Multiply by e^{i k theta}: shift all coefficient indices by k.
    pub fn harmonic_shift(&self, k: i64) -> TrigSeries {
        let order = self.order + k.unsigned_abs() as usize;
        let mut out = TrigSeries::zero(order);
        for (ia, &ca) in self.coeffs.iter().enumerate() {
            let na = ia as i64 - self.order as i64;
            out.set_coeff(na + k, ca);
        }
        out
    }

    /// Drop trailing coefficients below `tol` to keep band sizes small.
    pub fn compress(&self, tol: f64) -> TrigSeries {
        let mut n = self.order as i64;
        while n > 0 && self.coeff(n).norm() < tol && self.coeff(-n).norm() < tol {
            n -= 1;
        }
        let order = n as usize;
        let mut out = TrigSeries::zero(order);
        for m in -n..=n {
            out.set_coeff(m, self.coeff(m));
        }
        out
    }

    pub fn sup_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Discrete Fourier interpolant of order N from samples on a uniform grid.
    ///
    /// Exact on band-limited inputs of order <= N when the grid has at least
    /// 2N+1 points. The grid must be theta_i = 2 pi i / M up to 1e-9.
    pub fn fit(samples: &[(f64, Complex64)], order: usize) -> Result<TrigSeries> {
        let m = samples.len();
        if m < 2 * order + 1 {
            return Err(Error::TooFewSamples {
                needed: 2 * order + 1,
                order,
                got: m,
            });
        }
        let h = 2.0 * PI / m as f64;
        for (i, &(theta, _)) in samples.iter().enumerate() {
            let expected = i as f64 * h;
            let mut d = (theta - expected) % (2.0 * PI);
            if d > PI {
                d -= 2.0 * PI;
            }
            if d < -PI {
                d += 2.0 * PI;
            }
            if d.abs() > 1e-9 {
                return Err(Error::NonUniformGrid);
            }
        }
        let mut out = TrigSeries::zero(order);
        for n in -(order as i64)..=(order as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &(_, v)) in samples.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -(n as f64) * (i as f64 * h));
            }
            out.set_coeff(n, acc / m as f64);
        }
        Ok(out)
    }

    pub fn fit_real(samples: &[(f64, f64)], order: usize) -> Result<TrigSeries> {
        let complex: Vec<(f64, Complex64)> = samples
            .iter()
            .map(|&(t, v)| (t, Complex64::new(v, 0.0)))
            .collect();
        TrigSeries::fit(&complex, order)
    }

    /// Fit a real function given as a closure, sampled on a uniform grid fine
    /// enough for the requested order.
    pub fn fit_fn<F: Fn(f64) -> f64>(f: F, order: usize) -> TrigSeries {
        let m = 2 * order + 2;
        let samples: Vec<(f64, Complex64)> = (0..m)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / m as f64;
                (t, Complex64::new(f(t), 0.0))
            })
            .collect();
        TrigSeries::fit(&samples, order).expect("uniform grid by construction")
    }
}

/// Tangential/normal derivative pair at a boundary point from the complex
/// one-form contractions: u_z dz = (u_t + i u_n) ds / 2 and
/// u_zbar dzbar = (u_t - i u_n) ds / 2.
pub fn complex_to_directional(uz_dz: Complex64, uzbar_dzbar: Complex64) -> (Complex64, Complex64) {
    let ut = uz_dz + uzbar_dzbar;
    let un = (uz_dz - uzbar_dzbar) / I;
    (ut, un)
}

/// Inverse of [`complex_to_directional`].
pub fn directional_to_complex(ut_ds: Complex64, un_ds: Complex64) -> (Complex64, Complex64) {
    (0.5 * (ut_ds + I * un_ds), 0.5 * (ut_ds - I * un_ds))
}

/// Dirichlet/Neumann data of a solution on the boundary circle.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub alpha: i32,
    pub u_t: TrigSeries,
    pub u_n: TrigSeries,
    /// Dirichlet trace, if known directly.
    pub trace: Option<TrigSeries>,
    /// Value of u at theta = 0, used to integrate u_t when no trace is given.
    pub trace_anchor: Option<f64>,
}

impl BoundaryData {
    pub fn new(alpha: i32, u_t: TrigSeries, u_n: TrigSeries, trace_anchor: f64) -> Self {
        BoundaryData {
            alpha,
            u_t,
            u_n,
            trace: None,
            trace_anchor: Some(trace_anchor),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.u_t.require_real()?;
        self.u_n.require_real()?;
        let mean = self.u_t.mean().norm();
        if mean > 1e-9 * self.u_t.sup_coeff().max(1.0) {
            return Err(Error::NonzeroMean { mean });
        }
        Ok(())
    }

    /// The Dirichlet trace as a series: either stored, or the antiderivative
    /// of u_t pinned at the anchor.
    pub fn trace_series(&self) -> Result<TrigSeries> {
        if let Some(t) = &self.trace {
            return Ok(t.clone());
        }
        let anchor = self.trace_anchor.ok_or(Error::MissingTrace)?;
        self.u_t.antiderivative(anchor)
    }
}

/// Parse boundary samples in the CSV layout `theta,ut,un` (one header line)
/// into fitted series. The thetas must form a uniform grid with at least
/// 2*order + 1 points.
pub fn fit_samples_csv(text: &str, order: usize) -> Result<(TrigSeries, TrigSeries)> {
    let mut ut = Vec::new();
    let mut un = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("theta")) {
            continue;
        }
        let mut cols = line.split(',');
        let parse = |v: Option<&str>| -> Result<f64> {
            v.and_then(|s| s.trim().parse().ok())
                .ok_or(Error::NonUniformGrid)
        };
        let theta = parse(cols.next())?;
        ut.push((theta, parse(cols.next())?));
        un.push((theta, parse(cols.next())?));
    }
    Ok((TrigSeries::fit_real(&ut, order)?, TrigSeries::fit_real(&un, order)?))
}

/// On-disk JSON document for boundary data (coefficients ordered n = -N..N).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryDoc {
    pub alpha: i32,
    pub a: f64,
    #[serde(rename = "N")]
    pub order: usize,
    pub ut: Vec<[f64; 2]>,
    pub un: Vec<[f64; 2]>,
    pub trace_anchor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm: Option<f64>,
}

fn coeffs_to_json(s: &TrigSeries, order: usize) -> Vec<[f64; 2]> {
    (-(order as i64)..=(order as i64))
        .map(|n| {
            let c = s.coeff(n);
            [c.re, c.im]
        })
        .collect()
}

impl BoundaryDoc {
    pub fn from_data(data: &BoundaryData, a: f64) -> Result<Self> {
        let order = data.u_t.order().max(data.u_n.order());
        let anchor = match data.trace_anchor {
            Some(v) => v,
            None => data.trace_series()?.eval_real(0.0),
        };
        Ok(BoundaryDoc {
            alpha: data.alpha,
            a,
            order,
            ut: coeffs_to_json(&data.u_t, order),
            un: coeffs_to_json(&data.u_n, order),
            trace_anchor: anchor,
            residual_norm: None,
        })
    }

    pub fn to_data(&self) -> Result<BoundaryData> {
        let parse = |raw: &[[f64; 2]]| -> Result<TrigSeries> {
            if raw.len() != 2 * self.order + 1 {
                return Err(Error::TooFewSamples {
                    needed: 2 * self.order + 1,
                    order: self.order,
                    got: raw.len(),
                });
            }
            Ok(TrigSeries::from_coeffs(
                self.order,
                raw.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
            ))
        };
        Ok(BoundaryData {
            alpha: self.alpha,
            u_t: parse(&self.ut)?,
            u_n: parse(&self.un)?,
            trace: None,
            trace_anchor: Some(self.trace_anchor),
        })
    }
}
