//! Independent spectral-Galerkin oracle in the Neumann cosine basis.
//!
//! The basis ψ₀ = 1, ψ_k = √2·cos(πkx) diagonalizes −d²/dx² under Neumann
//! conditions exactly, so discretization error lives only in the bounded
//! nonlocal term. The finite section is solved by a dense complex
//! eigensolver: balancing, Householder reduction to Hessenberg form, and
//! shifted QR with deflation.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::nonlocal::OperatorContext;
use crate::roots::{EigenvalueRecord, Method};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix in row-major order.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            data.extend(row);
        }
        DenseMatrix { dim, data }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

fn basis_table(nodes: &[f64], shift: f64, k_dim: usize) -> Vec<f64> {
    // table[m * g + i] = ψ_m(nodes[i] + shift), ψ_0 = 1, ψ_m = √2 cos(πmx)
    let g = nodes.len();
    let mut table = vec![0.0; k_dim * g];
    let sqrt2 = 2.0f64.sqrt();
    for (i, &x) in nodes.iter().enumerate() {
        let y = PI * (x + shift);
        let step = y.cos();
        let mut prev = 1.0;
        let mut curr = step;
        table[i] = 1.0;
        for m in 1..k_dim {
            table[m * g + i] = sqrt2 * curr;
            let next = 2.0 * step * curr - prev;
            prev = curr;
            curr = next;
        }
    }
    table
}

/// Matrix of the operator in the first K cosine modes:
/// A_{km} = (πk)²δ_{km} + ⟨B ψ_m, ψ_k⟩ by breakpoint-aware quadrature.
pub fn assemble(ctx: &OperatorContext, k_dim: usize) -> DenseMatrix {
    let nodes = ctx.grid.nodes();
    let iva = ctx.grid.node_index(1.0 - ctx.alpha).expect("1-alpha is a node");
    let iqb = ctx.grid.node_index(ctx.beta).expect("beta is a node");
    let last = ctx.grid.len() - 1;

    let v_nodes: Vec<f64> = nodes[..=iva].to_vec();
    let q_nodes: Vec<f64> = nodes[iqb..].to_vec();
    let wv = ctx.grid.trapezoid_weights(0, iva);
    let wq = ctx.grid.trapezoid_weights(iqb, last);

    // weighted potential samples over each support
    let v_weighted: Vec<Complex64> = v_nodes
        .iter()
        .zip(&wv)
        .map(|(&x, &w)| ctx.v.eval(x, 0).unwrap() * w)
        .collect();
    let q_weighted: Vec<Complex64> = q_nodes
        .iter()
        .zip(&wq)
        .map(|(&x, &w)| ctx.q.eval(x, 0).unwrap() * w)
        .collect();

    let psi_va = basis_table(&v_nodes, ctx.alpha, k_dim); // ψ_m(t+α)
    let psi_v0 = basis_table(&v_nodes, 0.0, k_dim); // ψ_k(t)
    let psi_qb = basis_table(&q_nodes, -ctx.beta, k_dim); // ψ_m(t−β)
    let psi_q0 = basis_table(&q_nodes, 0.0, k_dim);

    let gv = v_nodes.len();
    let gq = q_nodes.len();
    let v_active = ctx.alpha < 1.0 && gv > 1;
    let q_active = ctx.beta < 1.0 && gq > 1;

    let rows: Vec<Vec<Complex64>> = (0..k_dim)
        .into_par_iter()
        .map(|k| {
            let mut row = vec![ZERO; k_dim];
            if v_active {
                let wk: Vec<Complex64> = (0..gv)
                    .map(|i| v_weighted[i] * psi_v0[k * gv + i])
                    .collect();
                for (m, slot) in row.iter_mut().enumerate() {
                    let psi_m = &psi_va[m * gv..(m + 1) * gv];
                    let mut acc = ZERO;
                    for i in 0..gv {
                        acc += wk[i] * psi_m[i];
                    }
                    *slot += acc;
                }
            }
            if q_active {
                let wk: Vec<Complex64> = (0..gq)
                    .map(|i| q_weighted[i] * psi_q0[k * gq + i])
                    .collect();
                for (m, slot) in row.iter_mut().enumerate() {
                    let psi_m = &psi_qb[m * gq..(m + 1) * gq];
                    let mut acc = ZERO;
                    for i in 0..gq {
                        acc += wk[i] * psi_m[i];
                    }
                    *slot += acc;
                }
            }
            let pk = PI * k as f64;
            row[k] += Complex64::new(pk * pk, 0.0);
            row
        })
        .collect();
    DenseMatrix::from_rows(rows)
}

/// All eigenvalues, ascending by modulus with real-then-imaginary tie-break.
pub fn dense_eigs(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.data.clone();
    balance(n, &mut h);
    hessenberg(n, &mut h);
    let mut eigs = qr_eigenvalues(n, &mut h)?;
    eigs.sort_unstable_by(|x, y| {
        x.norm()
            .total_cmp(&y.norm())
            .then(x.re.total_cmp(&y.re))
            .then(x.im.total_cmp(&y.im))
    });
    Ok(eigs)
}

/// Diagonal scaling by powers of two to even out row/column norms.
fn balance(n: usize, a: &mut [Complex64]) {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = 4.0;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j * n + i].norm();
                    r += a[i * n + j].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX2;
            }
            let g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX2;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[i * n + j] *= inv;
                    a[j * n + i] *= f;
                }
            }
        }
        if done {
            return;
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(n: usize, a: &mut [Complex64]) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for j in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in j + 1..n {
            norm2 += a[i * n + j].norm_sqr();
        }
        if norm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let norm = norm2.sqrt();
        let x0 = a[(j + 1) * n + j];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        v[j + 1] = x0 - alpha;
        for i in j + 2..n {
            v[i] = a[i * n + j];
        }
        let vnorm2: f64 = (j + 1..n).map(|i| v[i].norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // left:  A ← (I − τ v v*) A on rows j+1.., columns j..
        for col in j..n {
            let mut s = ZERO;
            for i in j + 1..n {
                s += v[i].conj() * a[i * n + col];
            }
            s *= tau;
            for i in j + 1..n {
                a[i * n + col] -= v[i] * s;
            }
        }
        // right: A ← A (I − τ v v*) on columns j+1..
        for row in 0..n {
            let mut s = ZERO;
            for i in j + 1..n {
                s += a[row * n + i] * v[i];
            }
            s *= tau;
            for i in j + 1..n {
                a[row * n + i] -= s * v[i].conj();
            }
        }
        a[(j + 1) * n + j] = alpha;
        for i in j + 2..n {
            a[i * n + j] = ZERO;
        }
    }
}

fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let m = na.max(nb);
    let t = m * ((na / m).powi(2) + (nb / m).powi(2)).sqrt();
    (na / t, (a / na) * b.conj() / t)
}

fn eig_2x2(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> (Complex64, Complex64) {
    let mid = (p + s) * 0.5;
    let det = p * s - q * r;
    let d = (mid * mid - det).sqrt();
    (mid + d, mid - d)
}

fn qr_eigenvalues(n: usize, h: &mut [Complex64]) -> Result<Vec<Complex64>> {
    let eps = f64::EPSILON;
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let cap = 30 * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    loop {
        // deflation scan for the window ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo * n + lo - 1].norm();
            let scale = h[(lo - 1) * n + lo - 1].norm() + h[lo * n + lo].norm();
            if sub <= eps * scale.max(f64::MIN_POSITIVE) {
                h[lo * n + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[hi * n + hi]);
            if hi == 0 {
                return Ok(eigs);
            }
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if hi - lo == 1 {
            let (e1, e2) = eig_2x2(
                h[lo * n + lo],
                h[lo * n + hi],
                h[hi * n + lo],
                h[hi * n + hi],
            );
            eigs.push(e1);
            eigs.push(e2);
            if lo == 0 {
                return Ok(eigs);
            }
            hi = lo - 1;
            since_deflation = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::QrNoConvergence(cap));
        }
        let shift = if since_deflation > 0 && since_deflation % 10 == 0 {
            h[hi * n + hi] + Complex64::new(0.75 * h[hi * n + hi - 1].norm(), 0.0)
        } else {
            let (e1, e2) = eig_2x2(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                h[hi * n + hi],
            );
            let target = h[hi * n + hi];
            if (e1 - target).norm() <= (e2 - target).norm() {
                e1
            } else {
                e2
            }
        };
        qr_sweep(n, h, lo, hi, shift);
        total += 1;
        since_deflation += 1;
    }
}

/// One explicit shifted QR step H ← Q*(H−σI)Q + σI on the window [lo, hi].
fn qr_sweep(n: usize, h: &mut [Complex64], lo: usize, hi: usize, sigma: Complex64) {
    for k in lo..=hi {
        h[k * n + k] -= sigma;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[k * n + k], h[(k + 1) * n + k]);
        for col in k..=hi {
            let t1 = h[k * n + col];
            let t2 = h[(k + 1) * n + col];
            h[k * n + col] = t1 * c + s * t2;
            h[(k + 1) * n + col] = -s.conj() * t1 + t2 * c;
        }
        h[(k + 1) * n + k] = ZERO;
        rots.push((c, s));
    }
    for (offset, &(c, s)) in rots.iter().enumerate() {
        let k = lo + offset;
        for row in lo..=(k + 1).min(hi) {
            let t1 = h[row * n + k];
            let t2 = h[row * n + k + 1];
            h[row * n + k] = t1 * c + t2 * s.conj();
            h[row * n + k + 1] = -t1 * s + t2 * c;
        }
    }
    for k in lo..=hi {
        h[k * n + k] += sigma;
    }
}

/// First n_max+1 eigenvalues of the K-mode section with refinement residuals
/// against the 2K-mode section. Only the lower quarter of the spectrum is
/// trusted.
pub fn galerkin_eigenvalues(
    ctx: &OperatorContext,
    k_dim: usize,
    n_max: usize,
) -> Result<Vec<EigenvalueRecord>> {
    if n_max > k_dim / 4 {
        return Err(Error::TrustBandExceeded { n_max, limit: k_dim / 4 });
    }
    let eigs = dense_eigs(&assemble(ctx, k_dim))?;
    let refined = dense_eigs(&assemble(ctx, 2 * k_dim))?;
    let mut records = Vec::with_capacity(n_max + 1);
    for idx in 0..=n_max {
        let lambda = eigs[idx];
        let gap = (lambda - refined[idx]).norm();
        if gap > 1e-4 {
            return Err(Error::UnderResolved { index: idx, gap });
        }
        records.push(EigenvalueRecord {
            n: idx,
            z: lambda.sqrt(),
            lambda,
            method: Method::Galerkin,
            residual: gap,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn assemble_free_operator_is_diagonal() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.5, 0.5, 256).unwrap();
        let a = assemble(&ctx, 8);
        for k in 0..8 {
            for m in 0..8 {
                let expect = if k == m { (PI * k as f64).powi(2) } else { 0.0 };
                assert!((a.at(k, m) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn assemble_corner_entry() {
        let alpha = 0.3;
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::zero(),
            alpha,
            0.5,
            2048,
        )
        .unwrap();
        let a = assemble(&ctx, 4);
        assert!((a.at(0, 0) - c(1.0 - alpha, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn assemble_unit_translations_diagonal() {
        let ctx = OperatorContext::new(
            Potential::constant(2.0, 1.0),
            Potential::constant(-1.0, 0.3),
            1.0,
            1.0,
            256,
        )
        .unwrap();
        let a = assemble(&ctx, 6);
        for k in 0..6 {
            for m in 0..6 {
                if k != m {
                    assert!(a.at(k, m).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn eigs_identity_and_diagonal() {
        let mut id = DenseMatrix::zeros(3);
        for i in 0..3 {
            *id.at_mut(i, i) = c(1.0, 0.0);
        }
        let eigs = dense_eigs(&id).unwrap();
        for e in eigs {
            assert!((e - c(1.0, 0.0)).norm() < 1e-14);
        }
        let mut d = DenseMatrix::zeros(3);
        for i in 0..3 {
            *d.at_mut(i, i) = c(i as f64 + 1.0, 0.0);
        }
        let eigs = dense_eigs(&d).unwrap();
        for (i, e) in eigs.iter().enumerate() {
            assert!((e - c(i as f64 + 1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigs_companion_matrix() {
        // companion of z² − 3z + 2 = (z−1)(z−2)
        let a = DenseMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(-2.0, 0.0)],
            vec![c(1.0, 0.0), c(3.0, 0.0)],
        ]);
        let eigs = dense_eigs(&a).unwrap();
        assert!((eigs[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((eigs[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eigs_unitary_conjugated_diagonal() {
        // Householder reflector from a fixed vector: exactly unitary
        let n = 12;
        let mut rng = StdRng::seed_from_u64(7);
        let w: Vec<Complex64> = (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let wn2: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        let spectrum: Vec<Complex64> = (0..n)
            .map(|i| c(i as f64 - 3.0, ((i * 7) % 5) as f64 - 2.0))
            .collect();
        let mut a = DenseMatrix::zeros(n);
        // A = P D P with P = I − 2ww*/|w|²
        let p = |i: usize, j: usize| -> Complex64 {
            let delta = if i == j { c(1.0, 0.0) } else { ZERO };
            delta - w[i] * w[j].conj() * (2.0 / wn2)
        };
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += p(i, k) * spectrum[k] * p(k, j);
                }
                *a.at_mut(i, j) = acc;
            }
        }
        let mut eigs = dense_eigs(&a).unwrap();
        let mut expect = spectrum.clone();
        let key = |x: &Complex64| (x.norm(), x.re, x.im);
        eigs.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        expect.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (e, x) in eigs.iter().zip(&expect) {
            assert!((e - x).norm() < 1e-9, "{e} vs {x}");
        }
    }

    #[test]
    fn eigs_trace_invariants_random() {
        let n = 20;
        let mut rng = StdRng::seed_from_u64(42);
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                *a.at_mut(i, j) = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let eigs = dense_eigs(&a).unwrap();
        let trace: Complex64 = (0..n).map(|i| a.at(i, i)).sum();
        let sum: Complex64 = eigs.iter().sum();
        assert!((trace - sum).norm() < 1e-10 * n as f64);
        let mut trace_sq = ZERO;
        for i in 0..n {
            for k in 0..n {
                trace_sq += a.at(i, k) * a.at(k, i);
            }
        }
        let sum_sq: Complex64 = eigs.iter().map(|e| e * e).sum();
        assert!((trace_sq - sum_sq).norm() < 1e-9 * n as f64);
    }

    #[test]
    fn unperturbed_spectrum_is_exact() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.5, 0.5, 256).unwrap();
        let eigs = dense_eigs(&assemble(&ctx, 64)).unwrap();
        for n in 0..16 {
            let expect = (PI * n as f64).powi(2);
            assert!(
                (eigs[n] - c(expect, 0.0)).norm() < 1e-10,
                "n={n}: {} vs {expect}",
                eigs[n]
            );
        }
    }

    #[test]
    fn classical_rank_one_shift() {
        // α = β = 0, V ≡ 1: eigenvalues shift by exactly 1
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::zero(),
            0.0,
            0.0,
            1024,
        )
        .unwrap();
        let recs = galerkin_eigenvalues(&ctx, 128, 10).unwrap();
        for rec in recs.iter().skip(1) {
            let expect = (PI * rec.n as f64).powi(2) + 1.0;
            assert!(
                (rec.lambda - c(expect, 0.0)).norm() < 1e-6,
                "n={}: {}",
                rec.n,
                rec.lambda
            );
        }
    }

    #[test]
    fn trust_band_enforced() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.5, 0.5, 128).unwrap();
        assert!(matches!(
            galerkin_eigenvalues(&ctx, 16, 5),
            Err(Error::TrustBandExceeded { .. })
        ));
    }

    #[test]
    fn spectral_enclosure() {
        let ctx = OperatorContext::new(
            Potential::constant(0.5, 0.25),
            Potential::CosineSeries(vec![c(0.0, 0.0), c(0.3, -0.1)]),
            0.3,
            0.7,
            1024,
        )
        .unwrap();
        let vb = ctx.v_bound();
        let recs = galerkin_eigenvalues(&ctx, 64, 12).unwrap();
        for rec in recs {
            assert!(rec.lambda.im.abs() <= vb + 1e-9);
            assert!(rec.lambda.re >= -vb - 1e-9);
        }
    }

    #[test]
    fn refinement_residual_shrinks_with_k() {
        let ctx = OperatorContext::new(
            Potential::CosineSeries(vec![c(0.5, 0.2), c(0.3, 0.0)]),
            Potential::constant(0.2, -0.1),
            0.4,
            0.6,
            2048,
        )
        .unwrap();
        let coarse = galerkin_eigenvalues(&ctx, 32, 6).unwrap();
        let fine = galerkin_eigenvalues(&ctx, 64, 6).unwrap();
        let max_res = |r: &[EigenvalueRecord]| {
            r.iter().map(|rec| rec.residual).fold(0.0f64, f64::max)
        };
        assert!(max_res(&fine) <= max_res(&coarse) + 1e-12);
    }
}
