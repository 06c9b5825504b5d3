//! Disk and circle geometry in the right half-plane: the domain D(a, 1) with
//! a > 1, chord endpoints through an interior point, the mirror map
//! z -> -conj(z), and the composite integration paths from the right chord
//! endpoint to an interior point.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Points closer than this to the boundary circle are treated as boundary
/// points and rejected by interior-only operations.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// The open disk D(a, 1) centered at a > 1 on the positive real axis.
///
/// The radius is fixed to 1, so arclength on the boundary circle equals the
/// angular parameter theta.
#[derive(Debug, Clone, Copy)]
pub struct DiskDomain {
    a: f64,
}

/// A point of the boundary circle together with its angle and unit tangent.
#[derive(Debug, Clone, Copy)]
pub struct CirclePoint {
    pub theta: f64,
    pub z: Complex64,
    pub tangent: Complex64,
}

impl DiskDomain {
    pub fn new(a: f64) -> Result<Self> {
        if a <= 1.0 || a.is_nan() {
            return Err(Error::InvalidCenter { a });
        }
        Ok(DiskDomain { a })
    }

    pub fn center(&self) -> f64 {
        self.a
    }

    /// Boundary point at angle theta, counter-clockwise from the rightmost point.
    pub fn point(&self, theta: f64) -> CirclePoint {
        let e = Complex64::from_polar(1.0, theta);
        CirclePoint {
            theta,
            z: Complex64::new(self.a, 0.0) + e,
            tangent: Complex64::new(0.0, 1.0) * e,
        }
    }

    /// Signed distance of z from the boundary circle (negative inside).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        (z - self.a).norm() - 1.0
    }

    /// True if z is strictly inside, more than `margin` away from the circle.
    pub fn is_interior(&self, z: Complex64, margin: f64) -> bool {
        self.boundary_distance(z) < -margin
    }

    fn require_interior(&self, z: Complex64) -> Result<()> {
        if self.is_interior(z, BOUNDARY_TOL) {
            Ok(())
        } else {
            Err(Error::NotInterior { z, tol: BOUNDARY_TOL })
        }
    }

    /// Endpoints (z_l, z_r) of the horizontal chord through the interior point z:
    /// both on the circle, with the same imaginary part as z, z_l to the left.
    pub fn chord_endpoints(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.require_interior(z)?;
        let y = z.im;
        let dx = (1.0 - y * y).sqrt();
        Ok((
            Complex64::new(self.a - dx, y),
            Complex64::new(self.a + dx, y),
        ))
    }

    /// Angle in (-pi/2, pi/2) of the right chord endpoint z_r.
    pub fn theta_right(&self, z: Complex64) -> Result<f64> {
        self.require_interior(z)?;
        Ok(z.im.asin())
    }

    /// The integration path from z_r to z: an arc of the circle over the upper
    /// or lower part, followed by the horizontal segment from z_l to z.
    pub fn gamma_path(&self, z: Complex64, side: ArcSide) -> Result<Path> {
        let (zl, _zr) = self.chord_endpoints(z)?;
        let tr = self.theta_right(z)?;
        let tl = PI - tr;
        let arc = match side {
            // Counter-clockwise over the top.
            ArcSide::Upper => PathLeg::Arc {
                theta0: tr,
                theta1: tl,
            },
            // Clockwise under the bottom.
            ArcSide::Lower => PathLeg::Arc {
                theta0: tr,
                theta1: tl - 2.0 * PI,
            },
        };
        Ok(Path {
            legs: vec![arc, PathLeg::Segment { start: zl, end: z }],
            domain: *self,
        })
    }
}

/// Mirror map z -> -conj(z), the reflection through the imaginary axis.
pub fn mirror(z: Complex64) -> Complex64 {
    -z.conj()
}

/// Which part of the circle an arc leg follows relative to the chord.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcSide {
    Upper,
    Lower,
}

/// One smooth leg of a path: a circle arc parametrized by theta (traversed
/// from theta0 to theta1, in either direction), or a straight segment.
#[derive(Debug, Clone, Copy)]
pub enum PathLeg {
    Arc { theta0: f64, theta1: f64 },
    Segment { start: Complex64, end: Complex64 },
}

impl PathLeg {
    pub fn start_point(&self, dom: &DiskDomain) -> Complex64 {
        match *self {
            PathLeg::Arc { theta0, .. } => dom.point(theta0).z,
            PathLeg::Segment { start, .. } => start,
        }
    }

    pub fn end_point(&self, dom: &DiskDomain) -> Complex64 {
        match *self {
            PathLeg::Arc { theta1, .. } => dom.point(theta1).z,
            PathLeg::Segment { end, .. } => end,
        }
    }

    /// Position and velocity at parameter t in [0, 1].
    pub fn at(&self, t: f64, dom: &DiskDomain) -> (Complex64, Complex64) {
        match *self {
            PathLeg::Arc { theta0, theta1 } => {
                let th = theta0 + t * (theta1 - theta0);
                let p = dom.point(th);
                (p.z, p.tangent * (theta1 - theta0))
            }
            PathLeg::Segment { start, end } => (start + (end - start) * t, end - start),
        }
    }

    pub fn arclength(&self) -> f64 {
        match *self {
            PathLeg::Arc { theta0, theta1 } => (theta1 - theta0).abs(),
            PathLeg::Segment { start, end } => (end - start).norm(),
        }
    }
}

/// A continuous piecewise-smooth path made of legs.
#[derive(Debug, Clone)]
pub struct Path {
    pub legs: Vec<PathLeg>,
    pub domain: DiskDomain,
}

impl Path {
    pub fn start_point(&self) -> Complex64 {
        self.legs[0].start_point(&self.domain)
    }

    pub fn end_point(&self) -> Complex64 {
        self.legs.last().unwrap().end_point(&self.domain)
    }

    /// Sample the path as a polyline with `per_leg` points per leg.
    pub fn polyline(&self, per_leg: usize) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.legs.len() * per_leg + 1);
        pts.push(self.start_point());
        for leg in &self.legs {
            for i in 1..=per_leg {
                let t = i as f64 / per_leg as f64;
                pts.push(leg.at(t, &self.domain).0);
            }
        }
        pts
    }
}
