//! The auxiliary Cauchy problem and the characteristic function.
//!
//! φ(·,z) solves −φ″ + V·φ(·+α) + Q·φ(·−β) = z²φ with φ(0)=1, φ′(0)=0,
//! realized as the fixed point of φ = cos z· + (M φ)/z and summed as the
//! operator geometric series Σ M^j Φ / z^j. Eigenvalues λ = z² correspond to
//! zeros of φ′(1,z) = −z sin z + (L φ)(1,z).

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{inner_product, l2_norm, GridFunction};
use crate::jet::{jet_sin, TaylorJet};
use crate::nonlocal::{JetFunction, OperatorContext};

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_TERMS: usize = 64;

/// Relative residual below which a z value is accepted as a root.
pub const ROOT_ACCEPT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CauchySolution {
    pub z: Complex64,
    pub phi: GridFunction,
    pub terms_used: usize,
    pub last_term_norm: f64,
    /// Sup-norms of the summed series terms, starting at j = 1.
    pub term_norms: Vec<f64>,
}

fn check_admissible(ctx: &OperatorContext, z: Complex64) -> Result<()> {
    let ratio = ctx.contraction_ratio(z);
    if ratio >= 1.0 {
        Err(Error::NotAdmissible { ratio })
    } else {
        Ok(())
    }
}

/// Sum the series φ = Σ_j M^j Φ / z^j until the term norm drops below
/// tol × (first term norm).
pub fn solve_cauchy(
    ctx: &OperatorContext,
    z: Complex64,
    tol: f64,
    max_terms: usize,
) -> Result<CauchySolution> {
    check_admissible(ctx, z)?;
    let tables = ctx.trig_tables(z);
    solve_with_tables(ctx, z, tol, max_terms, &tables)
}

fn solve_with_tables(
    ctx: &OperatorContext,
    z: Complex64,
    tol: f64,
    max_terms: usize,
    tables: &(Vec<Complex64>, Vec<Complex64>),
) -> Result<CauchySolution> {
    let mut term = tables.0.clone(); // Φ(x) = cos zx
    let first_norm = term.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut phi = term.clone();
    let mut term_norms = Vec::new();
    for j in 1..=max_terms {
        let next = ctx.apply_m_with_tables(tables, &term);
        term = next.values;
        for v in &mut term {
            *v /= z;
        }
        let tn = term.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (acc, v) in phi.iter_mut().zip(&term) {
            *acc += v;
        }
        term_norms.push(tn);
        if tn < tol * first_norm {
            return Ok(CauchySolution {
                z,
                phi: GridFunction::new(Arc::clone(&ctx.grid), phi),
                terms_used: j,
                last_term_norm: tn,
                term_norms,
            });
        }
    }
    let observed = match term_norms.as_slice() {
        [.., a, b] => b / a.max(1e-300),
        _ => f64::INFINITY,
    };
    Err(Error::NonConvergence { max_terms, ratio: observed })
}

/// φ′(1,z) = −z sin z + (L φ)(1,z); its zeros give eigenvalues λ = z².
pub fn char_fn(ctx: &OperatorContext, z: Complex64, tol: f64) -> Result<Complex64> {
    check_admissible(ctx, z)?;
    let tables = ctx.trig_tables(z);
    let sol = solve_with_tables(ctx, z, tol, DEFAULT_MAX_TERMS, &tables)?;
    Ok(-z * z.sin() + ctx.apply_l_at_one(&tables, &sol.phi.values))
}

/// Taylor jet of the characteristic function about a real center.
pub fn char_fn_jet(ctx: &OperatorContext, center: f64, order: usize) -> Result<TaylorJet> {
    char_fn_jet_at(ctx, Complex64::new(center, 0.0), order)
}

/// Jet of the characteristic function about an arbitrary (complex) center.
pub(crate) fn char_fn_jet_at(
    ctx: &OperatorContext,
    center: Complex64,
    order: usize,
) -> Result<TaylorJet> {
    check_admissible(ctx, center)?;
    TaylorJet::check_order(order)?;
    let tables = ctx.jet_tables(center, order)?;
    let z_inv = TaylorJet::variable(center, order).reciprocal();

    // Φ jets are exactly the cos table.
    let mut term = JetFunction {
        grid: Arc::clone(&ctx.grid),
        jets: tables.cos_x.clone(),
    };
    let first_norm = term.sup_norm();
    let mut phi = term.clone();
    let mut converged = false;
    for _ in 1..=DEFAULT_MAX_TERMS {
        let mut next = ctx.apply_m_jet_with_tables(&tables, &term)?;
        for jet in &mut next.jets {
            *jet = jet.mul(&z_inv);
        }
        term = next;
        let tn = term.sup_norm();
        for (acc, jet) in phi.jets.iter_mut().zip(&term.jets) {
            *acc = acc.add(jet);
        }
        if tn < DEFAULT_TOL * first_norm {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            max_terms: DEFAULT_MAX_TERMS,
            ratio: ctx.contraction_ratio(center),
        });
    }
    let l_phi = ctx.apply_l_jet_at_one(&tables, &phi)?;
    let z_jet = TaylorJet::variable(center, order);
    let minus_z_sin_z = z_jet.mul(&jet_sin(center, 1.0, order)).scale(Complex64::new(-1.0, 0.0));
    Ok(minus_z_sin_z.add(&l_phi))
}

/// Normalized eigenfunction for a characteristic root: unit discrete L² norm
/// and phase fixed against the nearest unperturbed mode cos(πn·).
pub fn eigenfunction(ctx: &OperatorContext, z_root: Complex64) -> Result<GridFunction> {
    let f = char_fn(ctx, z_root, DEFAULT_TOL)?;
    if f.norm() > ROOT_ACCEPT * z_root.norm().max(1.0) {
        return Err(Error::NotARoot { z: z_root, residual: f.norm() });
    }
    let sol = solve_cauchy(ctx, z_root, DEFAULT_TOL, DEFAULT_MAX_TERMS)?;
    let mut phi = sol.phi;
    let norm = l2_norm(&phi);
    for v in &mut phi.values {
        *v /= norm;
    }
    let n = (z_root.re / std::f64::consts::PI).round().max(1.0);
    let mode = GridFunction::from_fn(&ctx.grid, |x| {
        Complex64::new((std::f64::consts::PI * n * x).cos(), 0.0)
    });
    let overlap = inner_product(&phi, &mode).conj();
    if overlap.norm() > 1e-12 {
        let phase = overlap / overlap.norm();
        for v in &mut phi.values {
            *v *= phase;
        }
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn free_ctx(res: usize) -> OperatorContext {
        OperatorContext::new(Potential::zero(), Potential::zero(), 0.5, 0.5, res).unwrap()
    }

    #[test]
    fn unperturbed_solution_is_cosine() {
        let ctx = free_ctx(256);
        let sol = solve_cauchy(&ctx, c(PI, 0.0), DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(sol.terms_used, 1);
        for (k, &x) in ctx.grid.nodes().iter().enumerate() {
            assert!((sol.phi.values[k] - c((PI * x).cos(), 0.0)).norm() < 1e-14);
        }
        assert_eq!(sol.phi.values[0], c(1.0, 0.0));
    }

    #[test]
    fn unit_translations_reduce_to_free_problem() {
        let ctx = OperatorContext::new(
            Potential::constant(2.0, -1.0),
            Potential::constant(1.0, 0.5),
            1.0,
            1.0,
            256,
        )
        .unwrap();
        let z = c(2.0 * PI, 0.0);
        let sol = solve_cauchy(&ctx, z, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        for (k, &x) in ctx.grid.nodes().iter().enumerate() {
            assert!((sol.phi.values[k] - c((2.0 * PI * x).cos(), 0.0)).norm() < 1e-13);
        }
        let f = char_fn(&ctx, z, DEFAULT_TOL).unwrap();
        assert!((f - (-z * z.sin())).norm() < 1e-12);
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        // uniform grid (alpha = 0, beta = 1): fourth-order stencil for φ″
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::zero(),
            0.0,
            1.0,
            4096,
        )
        .unwrap();
        let z = c(10.0, 0.0);
        let sol = solve_cauchy(&ctx, z, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        let phi = &sol.phi.values;
        let nodes = ctx.grid.nodes();
        let h = nodes[1] - nodes[0];
        let mut worst: f64 = 0.0;
        for k in 2..nodes.len() - 2 {
            let d2 = (-phi[k - 2] + phi[k - 1] * 16.0 - phi[k] * 30.0 + phi[k + 1] * 16.0
                - phi[k + 2])
                / (12.0 * h * h);
            // alpha = 0 translation is the identity
            let residual = -d2 + phi[k] - z * z * phi[k];
            worst = worst.max(residual.norm());
        }
        assert!(worst < 1e-6, "residual {worst}");
    }

    #[test]
    fn integral_equation_residual_contract() {
        let ctx = OperatorContext::new(
            Potential::constant(0.6, 0.2),
            Potential::constant(0.3, -0.1),
            0.3,
            0.6,
            1024,
        )
        .unwrap();
        let z = c(9.5, 0.2);
        let tol = 1e-12;
        let sol = solve_cauchy(&ctx, z, tol, DEFAULT_MAX_TERMS).unwrap();
        let m_phi = ctx.apply_m(z, &sol.phi).unwrap();
        let mut worst: f64 = 0.0;
        for (k, &x) in ctx.grid.nodes().iter().enumerate() {
            let r = sol.phi.values[k] - (z * x).cos() - m_phi.values[k] / z;
            worst = worst.max(r.norm());
        }
        assert!(worst <= 10.0 * tol * 2.0, "residual {worst}");
    }

    #[test]
    fn term_norms_decay_geometrically() {
        let ctx = OperatorContext::new(
            Potential::constant(0.5, 0.2),
            Potential::constant(0.25, 0.0),
            0.4,
            0.3,
            512,
        )
        .unwrap();
        let vb = ctx.v_bound();
        for z in [c(8.0, 0.3), c(15.0, -0.5)] {
            let bound = vb * (std::f64::consts::SQRT_2 * vb).exp() / z.norm();
            let sol = solve_cauchy(&ctx, z, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
            for pair in sol.term_norms.windows(2) {
                if pair[0] > 1e-13 {
                    assert!(pair[1] / pair[0] <= bound * (1.0 + 1e-9), "ratio {}", pair[1] / pair[0]);
                }
            }
        }
    }

    #[test]
    fn initial_conditions() {
        let ctx = OperatorContext::new(
            Potential::constant(0.7, 0.0),
            Potential::constant(0.2, 0.1),
            0.3,
            0.6,
            512,
        )
        .unwrap();
        let z = c(11.0, 0.0);
        let sol = solve_cauchy(&ctx, z, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(sol.phi.values[0], c(1.0, 0.0));
        // discrete derivative at zero shrinks with resolution
        let slope = |res: usize| {
            let ctx = OperatorContext::new(
                Potential::constant(0.7, 0.0),
                Potential::constant(0.2, 0.1),
                0.3,
                0.6,
                res,
            )
            .unwrap();
            let sol = solve_cauchy(&ctx, z, DEFAULT_TOL, DEFAULT_MAX_TERMS).unwrap();
            let h = ctx.grid.nodes()[1];
            ((sol.phi.values[1] - sol.phi.values[0]) / h).norm()
        };
        assert!(slope(2048) < slope(512) / 2.0);
    }

    #[test]
    fn truncation_is_idempotent() {
        let ctx = OperatorContext::new(
            Potential::constant(0.5, 0.1),
            Potential::zero(),
            0.25,
            0.5,
            256,
        )
        .unwrap();
        let z = c(12.0, 0.1);
        let a = solve_cauchy(&ctx, z, DEFAULT_TOL, 64).unwrap();
        let b = solve_cauchy(&ctx, z, DEFAULT_TOL, 40).unwrap();
        assert_eq!(a.terms_used, b.terms_used);
        for k in 0..ctx.grid.len() {
            assert_eq!(a.phi.values[k], b.phi.values[k]);
        }
    }

    #[test]
    fn admissibility_gate() {
        let ctx = OperatorContext::new(
            Potential::constant(3.0, 0.0),
            Potential::constant(2.0, 0.0),
            0.3,
            0.6,
            128,
        )
        .unwrap();
        assert!(matches!(
            solve_cauchy(&ctx, c(2.0, 0.0), DEFAULT_TOL, 64),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn char_fn_unperturbed() {
        let ctx = free_ctx(256);
        for n in 1..=4 {
            let z = c(PI * n as f64, 0.0);
            let f = char_fn(&ctx, z, DEFAULT_TOL).unwrap();
            assert!(f.norm() < 1e-12, "n={n}: {f}");
        }
        let z = c(7.3, 0.4);
        let f = char_fn(&ctx, z, DEFAULT_TOL).unwrap();
        assert!((f - (-z * z.sin())).norm() < 1e-12);
    }

    #[test]
    fn char_fn_refinement_oracle() {
        let mk = |res: usize| {
            OperatorContext::new(
                Potential::constant(1.0, 0.0),
                Potential::zero(),
                0.0,
                1.0,
                res,
            )
            .unwrap()
        };
        let z = c(PI, 0.0);
        let coarse = char_fn(&mk(4096), z, DEFAULT_TOL).unwrap();
        let fine = char_fn(&mk(16384), z, DEFAULT_TOL).unwrap();
        assert!((coarse - fine).norm() < 1e-8, "gap {}", (coarse - fine).norm());
    }

    #[test]
    fn char_fn_jet_unperturbed_derivative() {
        let ctx = free_ctx(256);
        for n in [1usize, 2, 5] {
            let jet = char_fn_jet(&ctx, PI * n as f64, 1).unwrap();
            assert!(jet.value().norm() < 1e-12);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expect = -(PI * n as f64) * sign;
            assert!((jet.derivative(1) - c(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn char_fn_jet_order_zero_is_value() {
        let ctx = OperatorContext::new(
            Potential::constant(0.4, 0.2),
            Potential::constant(0.3, 0.0),
            0.3,
            0.7,
            512,
        )
        .unwrap();
        let center = 3.0 * PI;
        let jet = char_fn_jet(&ctx, center, 0).unwrap();
        let direct = char_fn(&ctx, c(center, 0.0), DEFAULT_TOL).unwrap();
        assert!((jet.value() - direct).norm() < 1e-12);
    }

    #[test]
    fn char_fn_jet_matches_finite_difference() {
        let ctx = OperatorContext::new(
            Potential::CosineSeries(vec![c(0.4, 0.1), c(0.0, 0.0), c(0.2, -0.1)]),
            Potential::constant(0.25, 0.15),
            0.3,
            0.7,
            1024,
        )
        .unwrap();
        let center = 4.0 * PI;
        let h = 1e-5;
        let jet = char_fn_jet(&ctx, center, 1).unwrap();
        let plus = char_fn(&ctx, c(center + h, 0.0), DEFAULT_TOL).unwrap();
        let minus = char_fn(&ctx, c(center - h, 0.0), DEFAULT_TOL).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        assert!((jet.derivative(1) - fd).norm() < 1e-6);
    }

    #[test]
    fn char_fn_jet_cauchy_integral_oracle() {
        // discrete Cauchy integrals on a circle reproduce the jet coefficients
        let ctx = OperatorContext::new(
            Potential::constant(0.3, 0.1),
            Potential::constant(0.2, 0.0),
            0.4,
            0.6,
            1024,
        )
        .unwrap();
        let center = 3.0 * PI;
        let jet = char_fn_jet(&ctx, center, 3).unwrap();
        let r = 0.4;
        let m_samples = 64;
        for m in 0..=3usize {
            let mut acc = c(0.0, 0.0);
            for k in 0..m_samples {
                let theta = 2.0 * PI * k as f64 / m_samples as f64;
                let w = c(0.0, 1.0) * theta;
                let zk = c(center, 0.0) + w.exp() * r;
                let f = char_fn(&ctx, zk, DEFAULT_TOL).unwrap();
                acc += f * (-w * m as f64).exp();
            }
            let coeff = acc / m_samples as f64 / r.powi(m as i32);
            assert!(
                (coeff - jet.coeffs[m]).norm() < 1e-6,
                "m={m}: cauchy {coeff} jet {}",
                jet.coeffs[m]
            );
        }
    }

    #[test]
    fn eigenfunction_unperturbed() {
        let ctx = free_ctx(2048);
        for n in [1usize, 3] {
            let phi = eigenfunction(&ctx, c(PI * n as f64, 0.0)).unwrap();
            let norm = l2_norm(&phi);
            assert!((norm - 1.0).abs() < 1e-10);
            for (k, &x) in ctx.grid.nodes().iter().enumerate().step_by(101) {
                let expect = 2.0f64.sqrt() * (PI * n as f64 * x).cos();
                assert!(
                    (phi.values[k] - c(expect, 0.0)).norm() < 1e-4,
                    "x={x}: {} vs {expect}",
                    phi.values[k]
                );
            }
        }
    }

    #[test]
    fn eigenfunction_rejects_non_roots() {
        let ctx = free_ctx(256);
        assert!(matches!(
            eigenfunction(&ctx, c(PI + 0.3, 0.0)),
            Err(Error::NotARoot { .. })
        ));
    }
}
