use num_complex::Complex64;
use shiftspec::cauchy::eigenfunction;
use shiftspec::diagnostics::slope_fit;
use shiftspec::galerkin::galerkin_eigenvalues;
use shiftspec::roots::{find_root, make_box, n_check, DEFAULT_ROOT_TOL};
use shiftspec::series::{series_eigenvalue, CoefficientTable};
use shiftspec::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

fn smooth() -> OperatorContext {
    let v = Potential::CosineSeries(vec![c(0.5, 0.25), c(0.0, 0.0), c(0.35, -0.15)]);
    let q = Potential::CosineSeries(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.1)]);
    OperatorContext::new(v, q, 0.3, 0.7, 4096).unwrap()
}

fn main() {
    let t0 = std::time::Instant::now();
    let ctx = smooth();
    println!("v_bound = {:.3}", ctx.v_bound());
    let n0 = n_check(&ctx, 30).unwrap();
    println!("n_check = {n0}  ({:.1?})", t0.elapsed());

    // series convergence at n=20
    let shoot = find_root(&ctx, &make_box(20, ctx.v_bound()), DEFAULT_ROOT_TOL).unwrap();
    let table = CoefficientTable::build(&ctx, 20, 6).unwrap();
    for n_terms in 1..=6 {
        let rec = series_eigenvalue(&table, n_terms).unwrap();
        println!("N={n_terms}: |series-shoot| = {:.3e}  (remainder est {:.3e})",
            (rec.lambda - shoot.lambda).norm(), rec.residual);
    }
    println!("rho: {:?}", table.rho.iter().map(|r| r.norm()).collect::<Vec<_>>());

    // slope for N=4 over n in [20,200]
    let mut pairs = Vec::new();
    for &n in &[20usize, 28, 40, 57, 80, 113, 160, 200] {
        let s = find_root(&ctx, &make_box(n, ctx.v_bound()), DEFAULT_ROOT_TOL).unwrap();
        let t = CoefficientTable::build(&ctx, n, 4).unwrap();
        let rec = series_eigenvalue(&t, 4).unwrap();
        let gap = (rec.lambda - s.lambda).norm().max(1e-11);
        pairs.push((n as f64, gap));
        println!("n={n}: gap {gap:.3e}");
    }
    println!("series N=4 slope: {:.3}", slope_fit(&pairs).unwrap());
    println!("elapsed {:.1?}", t0.elapsed());

    // criterion 2 classical slope
    let vcl = Potential::CosineSeries(vec![c(1.0, 0.0), c(0.5, 0.0)]);
    let qcl = Potential::constant(0.3, 0.0);
    let cl = OperatorContext::new(vcl, qcl, 0.0, 0.0, 4096).unwrap();
    let mut pairs = Vec::new();
    for &n in &[10usize, 14, 19, 27, 37, 52, 72, 100] {
        let s = find_root(&cl, &make_box(n, cl.v_bound()), DEFAULT_ROOT_TOL).unwrap();
        let err = (s.lambda - c((PI * n as f64).powi(2) + 1.3, 0.0)).norm().max(1e-11);
        pairs.push((n as f64, err));
        println!("classical n={n}: err {err:.3e}");
    }
    println!("classical slope: {:.3}", slope_fit(&pairs).unwrap());
    println!("elapsed {:.1?}", t0.elapsed());

    // criterion 3 gap: shooting vs galerkin K=256
    let gal = galerkin_eigenvalues(&ctx, 256, 16).unwrap();
    let mut worst: f64 = 0.0;
    for n in 5..=15 {
        let s = find_root(&ctx, &make_box(n, ctx.v_bound()), DEFAULT_ROOT_TOL).unwrap();
        let gap = (s.lambda - gal[n].lambda).norm();
        worst = worst.max(gap);
    }
    println!("crit3 worst shoot-galerkin gap n=5..15: {worst:.3e}  ({:.1?})", t0.elapsed());

    // bari growth
    let mut sum30 = 0.0;
    let mut sum60 = 0.0;
    for n in n0..=60 {
        let root = find_root(&ctx, &make_box(n, ctx.v_bound()), DEFAULT_ROOT_TOL).unwrap();
        let phi = eigenfunction(&ctx, root.z).unwrap();
        let mode = GridFunction::from_fn(&ctx.grid, |x| c(2.0f64.sqrt() * (PI * n as f64 * x).cos(), 0.0));
        let d2: f64 = {
            let diff = GridFunction::new(std::sync::Arc::clone(&ctx.grid),
                phi.values.iter().zip(&mode.values).map(|(a, b)| a - b).collect());
            shiftspec::grid::l2_norm(&diff).powi(2)
        };
        if n <= 30 { sum30 += d2; }
        sum60 += d2;
    }
    println!("bari: sum30 {sum30:.4}, sum60 {sum60:.4}, growth {:.2}%", (sum60 - sum30) / sum30 * 100.0);
    println!("total {:.1?}", t0.elapsed());
}
