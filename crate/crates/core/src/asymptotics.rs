//! Explicit two- and four-term eigenvalue asymptotics and the localization
//! curve traced by the large eigenvalues in the complex plane.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{integrate, GridFunction};
use crate::nonlocal::OperatorContext;
use crate::roots::{EigenvalueRecord, Method};

/// The six oscillatory coefficients G_{n,1..6} and the combinations
/// Λ_{n,1}, Λ_{n,2} entering the four-term asymptotics.
#[derive(Debug, Clone)]
pub struct AsymptoticTerms {
    pub n: usize,
    pub g: [Complex64; 6],
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

fn range_integral(
    ctx: &OperatorContext,
    lo_idx: usize,
    hi_idx: usize,
    f: impl Fn(f64) -> Complex64,
) -> Complex64 {
    let gf = GridFunction::from_fn(&ctx.grid, |x| f(x));
    integrate(&gf, lo_idx, hi_idx).expect("breakpoint indices are in range")
}

fn v_range(ctx: &OperatorContext) -> (usize, usize) {
    (0, ctx.grid.node_index(1.0 - ctx.alpha).expect("1-alpha is a node"))
}

fn q_range(ctx: &OperatorContext) -> (usize, usize) {
    (ctx.grid.node_index(ctx.beta).expect("beta is a node"), ctx.grid.len() - 1)
}

/// ∫₀^{1−α} V dt.
pub fn v_mass(ctx: &OperatorContext) -> Complex64 {
    let (lo, hi) = v_range(ctx);
    range_integral(ctx, lo, hi, |x| ctx.v.eval(x, 0).unwrap())
}

/// ∫_β^1 Q dt.
pub fn q_mass(ctx: &OperatorContext) -> Complex64 {
    let (lo, hi) = q_range(ctx);
    range_integral(ctx, lo, hi, |x| ctx.q.eval(x, 0).unwrap())
}

/// All six G values plus Λ₁ and Λ₂; needs two potential derivatives for the
/// V″/Q″ integrals and boundary terms inside Λ₂.
pub fn compute_g(ctx: &OperatorContext, n: usize) -> Result<AsymptoticTerms> {
    for p in [&ctx.v, &ctx.q] {
        let available = p.derivative_order_available();
        if available < 2 {
            return Err(Error::DerivativeUnavailable { requested: 2, available });
        }
    }
    let pn = PI * n as f64;
    let (alpha, beta) = (ctx.alpha, ctx.beta);
    let (ca, sa) = ((pn * alpha).cos(), (pn * alpha).sin());
    let (cb, sb) = ((pn * beta).cos(), (pn * beta).sin());
    let v_int = v_mass(ctx);
    let q_int = q_mass(ctx);
    let v_edge = ctx.v.eval(1.0 - alpha, 0)? + ctx.v.eval(0.0, 0)?;
    let q_edge = ctx.q.eval(1.0, 0)? + ctx.q.eval(beta, 0)?;

    let g1 = v_int * ca + q_int * cb;
    let g2 = v_int * ((alpha + 1.0) * sa) + q_int * ((beta - 1.0) * sb);
    let g3 = v_int * ((alpha + 1.0).powi(2) * ca) + q_int * ((beta - 1.0).powi(2) * cb);
    let g4 = -v_edge * sa - q_edge * sb;
    let g5 = v_edge * ((alpha - 1.0) * ca) + q_edge * ((beta - 1.0) * cb);
    let g6 = ctx.v.eval(1.0 - alpha, 0)? * (-v_int * sa + q_int * sb) * sa;

    let lambda1 = g4 - g1 * g2;

    let (vlo, vhi) = v_range(ctx);
    let (qlo, qhi) = q_range(ctx);
    let v2_int = range_integral(ctx, vlo, vhi, |t| {
        ctx.v.eval(t, 2).unwrap() * (pn * (2.0 * t + alpha)).cos()
    });
    let q2_int = range_integral(ctx, qlo, qhi, |t| {
        ctx.q.eval(t, 2).unwrap() * (pn * (2.0 * t - beta)).cos()
    });
    let dv_edge = (ctx.v.eval(1.0 - alpha, 1)? - ctx.v.eval(0.0, 1)?) * ca;
    let dq_edge = (ctx.q.eval(1.0, 1)? - ctx.q.eval(beta, 1)?) * cb;

    let lambda2 = g1 * g1 * g1 / 6.0 + g1 * g2 * g2 - g3 * g1 * g1 / 2.0 - g1 * g1 * 2.0
        - g1 * g5
        - g2 * g4
        + g6 * 4.0
        + dv_edge
        + dq_edge
        - v2_int
        - q2_int;

    Ok(AsymptoticTerms { n, g: [g1, g2, g3, g4, g5, g6], lambda1, lambda2 })
}

/// λ ≈ π²n² + 2∫V cos πnt cos πn(t+α) + 2∫Q cos πnt cos πn(t−β).
pub fn lambda_two_term(ctx: &OperatorContext, n: usize) -> EigenvalueRecord {
    let pn = PI * n as f64;
    let (vlo, vhi) = v_range(ctx);
    let (qlo, qhi) = q_range(ctx);
    let v_term = range_integral(ctx, vlo, vhi, |t| {
        ctx.v.eval(t, 0).unwrap() * ((pn * t).cos() * (pn * (t + ctx.alpha)).cos())
    });
    let q_term = range_integral(ctx, qlo, qhi, |t| {
        ctx.q.eval(t, 0).unwrap() * ((pn * t).cos() * (pn * (t - ctx.beta)).cos())
    });
    let lambda = Complex64::new(pn * pn, 0.0) + (v_term + q_term) * 2.0;
    EigenvalueRecord { n, z: lambda.sqrt(), lambda, method: Method::Asymptotic2, residual: 0.0 }
}

/// λ ≈ π²n² + G₁ + Λ₁/(2πn) + Λ₂/(4π²n²); requires W²-smooth potentials.
pub fn lambda_four_term(ctx: &OperatorContext, n: usize) -> Result<EigenvalueRecord> {
    let terms = compute_g(ctx, n)?;
    let pn = PI * n as f64;
    let lambda = Complex64::new(pn * pn, 0.0)
        + terms.g[0]
        + terms.lambda1 / (2.0 * pn)
        + terms.lambda2 / (4.0 * pn * pn);
    Ok(EigenvalueRecord {
        n,
        z: lambda.sqrt(),
        lambda,
        method: Method::Asymptotic4,
        residual: 0.0,
    })
}

/// Points of Γ_{α,β}: t² + v(α)cos tα + q(β)cos tβ.
pub fn gamma_curve(ctx: &OperatorContext, t_samples: &[f64]) -> Vec<Complex64> {
    let v_int = v_mass(ctx);
    let q_int = q_mass(ctx);
    t_samples
        .iter()
        .map(|&t| {
            Complex64::new(t * t, 0.0)
                + v_int * (t * ctx.alpha).cos()
                + q_int * (t * ctx.beta).cos()
        })
        .collect()
}
