//! Localization and Newton refinement of characteristic roots.
//!
//! For each index n the strip rectangle Π_n = (πn−π/2, πn+π/2) × (−H, H)
//! holds exactly one simple root once the series step contracts there; the
//! winding number over the rectangle boundary certifies the count.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

use crate::cauchy::{char_fn, char_fn_jet_at, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::nonlocal::OperatorContext;

/// How an eigenvalue record was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Shooting,
    Series,
    Asymptotic2,
    Asymptotic4,
    Galerkin,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Shooting => "shooting",
            Method::Series => "series",
            Method::Asymptotic2 => "asymptotic2",
            Method::Asymptotic4 => "asymptotic4",
            Method::Galerkin => "galerkin",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Some(match s {
            "shooting" => Method::Shooting,
            "series" => Method::Series,
            "asymptotic2" => Method::Asymptotic2,
            "asymptotic4" => Method::Asymptotic4,
            "galerkin" => Method::Galerkin,
            _ => return None,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone)]
pub struct EigenvalueRecord {
    pub n: usize,
    pub z: Complex64,
    pub lambda: Complex64,
    pub method: Method,
    pub residual: f64,
}

/// Rectangle Π_n in the z-plane.
#[derive(Debug, Clone, Copy)]
pub struct RootBox {
    pub n: usize,
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_half_height: f64,
}

/// Winding-number contours need a nondegenerate height even for V = Q = 0.
pub const MIN_BOX_HALF_HEIGHT: f64 = 0.1;

pub fn make_box(n: usize, v_bound: f64) -> RootBox {
    RootBox {
        n,
        re_lo: PI * n as f64 - PI / 2.0,
        re_hi: PI * n as f64 + PI / 2.0,
        im_half_height: (std::f64::consts::SQRT_2 * v_bound).max(MIN_BOX_HALF_HEIGHT),
    }
}

impl RootBox {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.re_lo && z.re < self.re_hi && z.im.abs() <= self.im_half_height
    }
}

/// Newton iteration from z₀ = πn using the analytic jet derivative.
pub fn find_root(ctx: &OperatorContext, rbox: &RootBox, tol: f64) -> Result<EigenvalueRecord> {
    let n = rbox.n;
    let mut z = Complex64::new(PI * n as f64, 0.0);
    for _ in 0..50 {
        let jet = char_fn_jet_at(ctx, z, 1)?;
        let f = jet.value();
        if f.norm() <= tol * z.norm().max(1.0) {
            return Ok(EigenvalueRecord {
                n,
                z,
                lambda: z * z,
                method: Method::Shooting,
                residual: f.norm(),
            });
        }
        let df = jet.derivative(1);
        let step = f / df;
        z -= step;
        if !rbox.contains(z) {
            return Err(Error::RootEscapedBox { n });
        }
        if step.norm() < 1e-15 * z.norm() {
            let residual = char_fn(ctx, z, DEFAULT_TOL)?.norm();
            if residual <= tol * z.norm().max(1.0) {
                return Ok(EigenvalueRecord {
                    n,
                    z,
                    lambda: z * z,
                    method: Method::Shooting,
                    residual,
                });
            }
        }
    }
    Err(Error::RootNoConvergence { n, steps: 50 })
}

pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// Winding number of the characteristic function along the box boundary,
/// by discrete phase accumulation over at least 256 samples.
pub fn count_roots(ctx: &OperatorContext, rbox: &RootBox) -> Result<usize> {
    let mut samples = 256usize;
    loop {
        match try_winding(ctx, rbox, samples) {
            Ok(w) => return Ok(w),
            Err(WindingFailure::CoarseSampling) if samples < 4096 => samples *= 2,
            Err(WindingFailure::CoarseSampling) => {
                return Err(Error::BoundaryNearZero { min_abs: 0.0 })
            }
            Err(WindingFailure::NearZero(min_abs)) => {
                return Err(Error::BoundaryNearZero { min_abs })
            }
            Err(WindingFailure::Inner(e)) => return Err(e),
        }
    }
}

enum WindingFailure {
    NearZero(f64),
    CoarseSampling,
    Inner(Error),
}

fn try_winding(
    ctx: &OperatorContext,
    rbox: &RootBox,
    samples: usize,
) -> std::result::Result<usize, WindingFailure> {
    let h = rbox.im_half_height;
    let corners = [
        Complex64::new(rbox.re_lo, -h),
        Complex64::new(rbox.re_hi, -h),
        Complex64::new(rbox.re_hi, h),
        Complex64::new(rbox.re_lo, h),
    ];
    let per_edge = samples / 4;
    let mut points = Vec::with_capacity(4 * per_edge);
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        for k in 0..per_edge {
            points.push(a + (b - a) * (k as f64 / per_edge as f64));
        }
    }
    let mut values = Vec::with_capacity(points.len());
    let mut min_abs = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    for &z in &points {
        let f = char_fn(ctx, z, DEFAULT_TOL).map_err(WindingFailure::Inner)?;
        min_abs = min_abs.min(f.norm());
        max_abs = max_abs.max(f.norm());
        values.push(f);
    }
    if min_abs < 1e-7 * max_abs {
        return Err(WindingFailure::NearZero(min_abs));
    }
    let mut total = 0.0;
    for k in 0..values.len() {
        let next = values[(k + 1) % values.len()];
        let delta = (next / values[k]).arg();
        if delta.abs() > 0.8 * PI {
            return Err(WindingFailure::CoarseSampling);
        }
        total += delta;
    }
    let winding = total / (2.0 * PI);
    Ok(winding.round().max(0.0) as usize)
}

/// count_roots with the box height enlarged 1.5× on near-zero boundaries.
pub fn count_roots_with_retry(ctx: &OperatorContext, rbox: &RootBox) -> Result<usize> {
    let mut rbox = *rbox;
    let mut last = Error::BoundaryNearZero { min_abs: 0.0 };
    for _ in 0..4 {
        match count_roots(ctx, &rbox) {
            Ok(w) => return Ok(w),
            Err(Error::BoundaryNearZero { min_abs }) => {
                last = Error::BoundaryNearZero { min_abs };
                rbox.im_half_height *= 1.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Smallest index with verified contraction on its box and unit winding
/// number; below it only the Galerkin section is trusted.
pub fn n_check(ctx: &OperatorContext, scan_limit: usize) -> Result<usize> {
    for n in 1..=scan_limit {
        let rbox = make_box(n, ctx.v_bound());
        let corner = Complex64::new(rbox.re_lo, 0.0);
        if ctx.contraction_ratio(corner) >= 1.0 {
            continue;
        }
        if let Ok(1) = count_roots_with_retry(ctx, &rbox) {
            return Ok(n);
        }
    }
    Err(Error::NoUniformRegime { scanned: scan_limit })
}
