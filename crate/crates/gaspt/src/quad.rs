//! Quadrature engines: periodic trapezoid on the boundary circle, Gauss-Legendre
//! on segments and arcs, and a square-root endpoint rule for integrands with an
//! inverse-square-root singularity at one end of the interval.
//!
//! All rules are deterministic. Refinement happens by whole-rule node doubling
//! in the callers, never by adaptive subdivision inside a rule.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// Kind tag for a quadrature rule, mostly useful for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    PeriodicTrapezoid,
    GaussLegendre,
    SqrtEndpoint,
}

/// Nodes and weights of a quadrature rule on a reference interval.
///
/// Gauss-Legendre rules live on [-1, 1]; the periodic trapezoid lives on
/// [0, 2pi). Weights sum to the interval length.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    // Returns (P_n(x), P_n'(x)) by the three-term recurrence.
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_legendre_compute(n: usize) -> QuadratureRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = x;
        weights[i] = w;
        nodes[n - 1 - i] = -x;
        weights[n - 1 - i] = w;
    }
    if !n.is_multiple_of(2) {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLegendre,
    }
}

fn gauss_cache() -> &'static RwLock<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: std::sync::OnceLock<RwLock<HashMap<usize, Arc<QuadratureRule>>>> =
        std::sync::OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Gauss-Legendre rule with `n` nodes on [-1, 1], cached per `n`.
pub fn gauss_legendre(n: usize) -> Arc<QuadratureRule> {
    if let Some(rule) = gauss_cache().read().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(gauss_legendre_compute(n));
    gauss_cache().write().unwrap().insert(n, rule.clone());
    rule
}

/// Periodic trapezoid sum of `f` over theta in [0, 2pi) with `n` nodes.
///
/// Spectrally accurate for integrands analytic in a strip around the real
/// theta axis. NaN at a node is reported with its index.
pub fn integrate_circle<F: FnMut(f64) -> Complex64>(mut f: F, n: usize) -> Result<Complex64> {
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let v = f(i as f64 * h);
        if v.re.is_nan() || v.im.is_nan() {
            return Err(Error::NanAtNode { index: i });
        }
        acc += v;
    }
    Ok(acc * h)
}

/// Gauss-Legendre integral of `f` over the real interval [a, b].
pub fn integrate_param<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let rule = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Gauss-Legendre integral of `f(k) dk` along the straight segment from `a` to `b`.
pub fn integrate_segment<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    a: Complex64,
    b: Complex64,
    n: usize,
) -> Complex64 {
    let dir = b - a;
    integrate_param(|t| f(a + dir * t) * dir, 0.0, 1.0, n)
}

/// Integral over [t0, t1] of an integrand behaving like g(t)/sqrt(|t - t0|)
/// with g smooth: substitute t = t0 + s^2 and apply Gauss-Legendre in s.
///
/// `f` is the full integrand including the singular factor; it is only ever
/// evaluated strictly inside (t0, t1].
pub fn sqrt_endpoint_left<F: FnMut(f64) -> Complex64>(mut f: F, t0: f64, t1: f64, n: usize) -> Complex64 {
    assert!(t1 > t0);
    let smax = (t1 - t0).sqrt();
    integrate_param(|s| f(t0 + s * s) * (2.0 * s), 0.0, smax, n)
}

/// Same as [`sqrt_endpoint_left`] with the singularity at the right endpoint `t1`.
pub fn sqrt_endpoint_right<F: FnMut(f64) -> Complex64>(mut f: F, t0: f64, t1: f64, n: usize) -> Complex64 {
    assert!(t1 > t0);
    let smax = (t1 - t0).sqrt();
    integrate_param(|s| f(t1 - s * s) * (2.0 * s), 0.0, smax, n)
}

/// Integral over [a, b] with square-root clustering of nodes at both ends.
///
/// Substitutes t = mid + half*sin(pi s / 2); the Jacobian vanishes linearly at
/// the ends, which restores fast convergence for integrands with |t-end|^(1/2)
/// behavior at either endpoint.
pub fn integrate_sin_clustered<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    integrate_param(
        |s| {
            let t = mid + half * (0.5 * PI * s).sin();
            let jac = half * 0.5 * PI * (0.5 * PI * s).cos();
            f(t) * jac
        },
        -1.0,
        1.0,
        n,
    )
}
