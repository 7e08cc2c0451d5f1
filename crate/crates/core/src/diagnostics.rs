//! Cross-method comparison tables, error-slope fits, and the
//! quadratic-closeness signature of the eigenfunction system.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::cauchy::eigenfunction;
use crate::error::{Error, Result};
use crate::galerkin::galerkin_eigenvalues;
use crate::grid::{l2_norm, GridFunction};
use crate::nonlocal::OperatorContext;
use crate::roots::{find_root, make_box, EigenvalueRecord, Method, DEFAULT_ROOT_TOL};
use crate::series::{series_eigenvalue, CoefficientTable};

/// Gaps below this floor are clamped before any log-log fit.
pub const GAP_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub n_lo: usize,
    pub n_hi: usize,
    pub methods: Vec<Method>,
    pub series_terms: usize,
    pub galerkin_modes: usize,
}

#[derive(Debug, Clone)]
pub struct MethodGap {
    pub method: Method,
    pub gap: f64,
    pub gap_n: f64,
    pub gap_n3: f64,
}

#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub n: usize,
    /// λ and residual per method, in the configured method order.
    pub values: Vec<(Method, Complex64, f64)>,
    pub reference: Method,
    /// Absolute gaps to the reference, with n·gap and n³·gap.
    pub gaps: Vec<MethodGap>,
}

fn wrap(n: usize, method: Method) -> impl FnOnce(Error) -> Error {
    move |source| Error::MethodFailed {
        n,
        method: method.tag().to_string(),
        source: Box::new(source),
    }
}

/// Eigenvalue of one method at one index.
pub fn eigenvalue_by_method(
    ctx: &OperatorContext,
    n: usize,
    method: Method,
    cfg: &CompareConfig,
    galerkin: Option<&[EigenvalueRecord]>,
) -> Result<EigenvalueRecord> {
    match method {
        Method::Shooting => find_root(ctx, &make_box(n, ctx.v_bound()), DEFAULT_ROOT_TOL)
            .map_err(wrap(n, method)),
        Method::Series => {
            let table = CoefficientTable::build(ctx, n, cfg.series_terms).map_err(wrap(n, method))?;
            series_eigenvalue(&table, cfg.series_terms).map_err(wrap(n, method))
        }
        Method::Asymptotic2 => Ok(crate::asymptotics::lambda_two_term(ctx, n)),
        Method::Asymptotic4 => crate::asymptotics::lambda_four_term(ctx, n).map_err(wrap(n, method)),
        Method::Galerkin => galerkin
            .and_then(|records| records.get(n).cloned())
            .ok_or_else(|| {
                wrap(n, method)(Error::TrustBandExceeded {
                    n_max: n,
                    limit: cfg.galerkin_modes / 4,
                })
            }),
    }
}

/// One row per index; shooting is the reference when present.
pub fn compare(ctx: &OperatorContext, cfg: &CompareConfig) -> Result<Vec<ComparisonRow>> {
    assert!(!cfg.methods.is_empty(), "method list must be nonempty");
    let galerkin_records = if cfg.methods.contains(&Method::Galerkin) {
        Some(galerkin_eigenvalues(ctx, cfg.galerkin_modes, cfg.n_hi)?)
    } else {
        None
    };
    let reference = if cfg.methods.contains(&Method::Shooting) {
        Method::Shooting
    } else {
        cfg.methods[0]
    };
    (cfg.n_lo..=cfg.n_hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let mut values = Vec::with_capacity(cfg.methods.len());
            for &method in &cfg.methods {
                let rec = eigenvalue_by_method(ctx, n, method, cfg, galerkin_records.as_deref())?;
                values.push((method, rec.lambda, rec.residual));
            }
            let lambda_ref = values
                .iter()
                .find(|(m, _, _)| *m == reference)
                .map(|(_, l, _)| *l)
                .expect("reference method is in the list");
            let gaps = values
                .iter()
                .filter(|(m, _, _)| *m != reference)
                .map(|(m, l, _)| {
                    let gap = (l - lambda_ref).norm();
                    MethodGap {
                        method: *m,
                        gap,
                        gap_n: gap * n as f64,
                        gap_n3: gap * (n as f64).powi(3),
                    }
                })
                .collect();
            Ok(ComparisonRow { n, values, reference, gaps })
        })
        .collect()
}

/// Least-squares slope of log(error) against log(n).
pub fn slope_fit(pairs: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(n, e)| (n.ln(), e.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::BelowFloor { min: 5 });
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Ok((m * sxy - sx * sy) / (m * sxx - sx * sx))
}

#[derive(Debug, Clone)]
pub struct BariReport {
    /// (n, d_n) with d_n the L² distance of the n-th normalized eigenfunction
    /// from √2·cos(πn·).
    pub distances: Vec<(usize, f64)>,
    /// Running sums Σ_{n≤N} d_n².
    pub partial_sums: Vec<f64>,
}

/// Quadratic-closeness check of the eigenfunction system against the
/// orthonormal cosine modes.
pub fn bari_closeness(ctx: &OperatorContext, n_lo: usize, n_hi: usize) -> Result<BariReport> {
    let distances: Vec<(usize, f64)> = (n_lo..=n_hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let root = find_root(ctx, &make_box(n, ctx.v_bound()), DEFAULT_ROOT_TOL)
                .map_err(wrap(n, Method::Shooting))?;
            let phi = eigenfunction(ctx, root.z).map_err(wrap(n, Method::Shooting))?;
            let mode = GridFunction::from_fn(&ctx.grid, |x| {
                Complex64::new(2.0f64.sqrt() * (PI * n as f64 * x).cos(), 0.0)
            });
            let diff = GridFunction::new(
                Arc::clone(&ctx.grid),
                phi.values
                    .iter()
                    .zip(&mode.values)
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            Ok((n, l2_norm(&diff)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut partial_sums = Vec::with_capacity(distances.len());
    let mut acc = 0.0;
    for (_, d) in &distances {
        acc += d * d;
        partial_sums.push(acc);
    }
    Ok(BariReport { distances, partial_sums })
}
