//! Front door for interior field evaluation: dispatches boundary data to the
//! even or odd solver by the parity of alpha, and serves alpha >= 2 through
//! the symmetry map (x^(alpha-1) u solves the 2 - alpha equation), solving
//! the transformed problem and dividing the result back.

use num_complex::Complex64;

use crate::boundary::{BoundaryData, TrigSeries};
use crate::error::Result;
use crate::geometry::DiskDomain;
use crate::rh_even::{EvenParams, EvenSolver};
use crate::rh_odd::{OddParams, OddSolver};

/// Boundary data of v = x^(alpha-1) u, which solves the 2 - alpha equation.
pub fn symmetry_transform(data: &BoundaryData, dom: &DiskDomain) -> Result<BoundaryData> {
    let a = dom.center();
    let alpha = data.alpha;
    let trace = data.trace_series()?;
    let order = data.u_t.order().max(data.u_n.order()).max(trace.order()) + 40;
    let p = alpha - 1;
    let xs = |theta: f64| a + theta.cos();
    let v_trace = TrigSeries::fit_fn(|t| xs(t).powi(p) * trace.eval_real(t), order).compress(1e-13);
    let v_t = TrigSeries::fit_fn(
        |t| {
            xs(t).powi(p) * data.u_t.eval_real(t)
                + p as f64 * xs(t).powi(p - 1) * (-t.sin()) * trace.eval_real(t)
        },
        order,
    )
    .compress(1e-13);
    let v_n = TrigSeries::fit_fn(
        |t| {
            xs(t).powi(p) * data.u_n.eval_real(t)
                + p as f64 * xs(t).powi(p - 1) * t.cos() * trace.eval_real(t)
        },
        order,
    )
    .compress(1e-13);
    let anchor = v_trace.eval_real(0.0);
    Ok(BoundaryData {
        alpha: 2 - alpha,
        u_t: v_t,
        u_n: v_n,
        trace: Some(v_trace),
        trace_anchor: Some(anchor),
    })
}

enum Inner {
    Even(EvenSolver),
    Odd(OddSolver),
}

/// Interior solver for any supported integer alpha.
pub struct FieldSolver {
    inner: Inner,
    /// Set when the problem was transformed through the symmetry map; holds
    /// the power p = alpha - 1 to divide out of the transformed field.
    undo_power: Option<i32>,
    pub original_alpha: i32,
    pub solved_alpha: i32,
}

impl FieldSolver {
    pub fn new(
        dom: DiskDomain,
        data: &BoundaryData,
        even: EvenParams,
        odd: OddParams,
    ) -> Result<Self> {
        let alpha = data.alpha;
        let (work, undo_power) = if alpha >= 2 {
            (symmetry_transform(data, &dom)?, Some(alpha - 1))
        } else {
            (data.clone(), None)
        };
        let inner = if work.alpha % 2 == 0 {
            Inner::Even(EvenSolver::new(dom, &work, even)?)
        } else {
            Inner::Odd(OddSolver::new(dom, &work, odd)?)
        };
        Ok(FieldSolver {
            inner,
            undo_power,
            original_alpha: alpha,
            solved_alpha: work.alpha,
        })
    }

    pub fn solve(&self, z: Complex64) -> Result<f64> {
        let v = match &self.inner {
            Inner::Even(s) => s.solve(z)?,
            Inner::Odd(s) => s.solve(z)?,
        };
        Ok(match self.undo_power {
            Some(p) => v / z.re.powi(p),
            None => v,
        })
    }

    pub fn was_transformed(&self) -> bool {
        self.undo_power.is_some()
    }
}
