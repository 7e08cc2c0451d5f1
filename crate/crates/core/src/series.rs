//! Convergent eigenvalue series in inverse powers of πn.
//!
//! Builds Taylor jets of f_j(z) = (L M^j Φ)(1) about πn, the alternating
//! factorial table E_{t,l}, the composition sums ω_i and H_{s,m}, and the
//! coefficient recurrence ρ_i. Partial sums give
//! λ_n = (πn + Σ_i ρ_i/(πn)^{i+1})² with an a-posteriori geometric remainder
//! estimate fitted from the computed |ρ_i|.

use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::jet::TaylorJet;
use crate::nonlocal::{JetFunction, OperatorContext};
use crate::roots::{EigenvalueRecord, Method};

/// Jets of f_j(z) = (L M^j Φ)(1) about z = πn for j = 0..=j_max.
pub fn compute_fj_jets(
    ctx: &OperatorContext,
    n: usize,
    j_max: usize,
    order: usize,
) -> Result<Vec<TaylorJet>> {
    TaylorJet::check_order(order)?;
    let center = Complex64::new(PI * n as f64, 0.0);
    let tables = ctx.jet_tables(center, order)?;
    // Φ jets are exactly the cos(z·x) table.
    let mut u = JetFunction {
        grid: Arc::clone(&ctx.grid),
        jets: tables.cos_x.clone(),
    };
    let mut jets = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        jets.push(ctx.apply_l_jet_at_one(&tables, &u)?);
        if j < j_max {
            u = ctx.apply_m_jet_with_tables(&tables, &u)?;
        }
    }
    Ok(jets)
}

/// E_{t,l} = Σ_j (−1)^{l−j−1} (l−1)!/((l−j−1)!·j!) · c_{t−l+j+1}(f_j),
/// summing j from max(0, l−t−1) to l−1.
pub fn compute_e(fj_jets: &[TaylorJet], t: usize, l: usize) -> Result<Complex64> {
    assert!(l >= 1, "E_{{t,l}} requires l >= 1");
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (l.saturating_sub(t + 1))..=(l - 1) {
        let m = t + j + 1 - l; // derivative order, >= 0 by the j range
        let jet = fj_jets
            .get(j)
            .ok_or(Error::JetOrderInsufficient { j, order: m })?;
        if m > jet.order() {
            return Err(Error::JetOrderInsufficient { j, order: m });
        }
        let sign = if (l - j - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * binomial_ratio(l - 1, l - j - 1, j);
        acc += jet.coeffs[m] * weight;
    }
    Ok(acc)
}

/// (l−1)!/((l−j−1)!·j!) with small arguments; exact in f64.
fn binomial_ratio(l1: usize, a: usize, b: usize) -> f64 {
    let fact = |m: usize| (1..=m).map(|k| k as f64).product::<f64>();
    fact(l1) / (fact(a) * fact(b))
}

/// All t-tuples of nonnegative integers summing to p, in lexicographic order.
/// For t = 0 the list is {()} when p = 0 and empty when p > 0.
pub fn weak_compositions(p: usize, t: usize) -> Arc<Vec<Vec<usize>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(p, t)) {
        return Arc::clone(hit);
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; t];
    fill_compositions(p, 0, &mut current, &mut out);
    let arc = Arc::new(out);
    cache.lock().unwrap().insert((p, t), Arc::clone(&arc));
    arc
}

fn fill_compositions(remaining: usize, pos: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if pos == current.len() {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill_compositions(remaining - v, pos + 1, current, out);
    }
}

fn composition_sum(rho: &[Complex64], p: usize, t: usize) -> Complex64 {
    weak_compositions(p, t)
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .map(|&k| rho[k])
                .product::<Complex64>()
        })
        .sum()
}

/// Everything Theorem-2-shaped for one (n, α, β): f_j jets, the E table,
/// and the coefficients ρ_i and ω_i up to a requested depth.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub fj_jets: Vec<TaylorJet>,
    pub e_table: BTreeMap<(usize, usize), Complex64>,
    pub rho: Vec<Complex64>,
    pub omega: Vec<Complex64>,
}

impl CoefficientTable {
    /// Build jets of order N for j ≤ N−1 and run the recurrence to ρ_{N−1}.
    pub fn build(ctx: &OperatorContext, n: usize, capacity: usize) -> Result<Self> {
        assert!(capacity >= 1);
        let order = capacity.min(crate::jet::JET_ORDER_CAP);
        let fj_jets = compute_fj_jets(ctx, n, capacity - 1, order)?;
        let mut e_table = BTreeMap::new();
        for t in 0..capacity {
            for l in 1..=(capacity - t) {
                e_table.insert((t, l), compute_e(&fj_jets, t, l)?);
            }
        }
        let (rho, omega) = run_recurrence(n, capacity, &e_table);
        Ok(CoefficientTable {
            n,
            alpha: ctx.alpha,
            beta: ctx.beta,
            fj_jets,
            e_table,
            rho,
            omega,
        })
    }

    pub fn e(&self, t: usize, l: usize) -> Option<Complex64> {
        self.e_table.get(&(t, l)).copied()
    }
}

/// ρ_i = (−1)^n ω_i − Σ_{s=1}^{[i/2]} H_{s,i−2s}, with ω_i from the E table
/// and products of earlier ρ over weak compositions.
fn run_recurrence(
    n: usize,
    depth: usize,
    e_table: &BTreeMap<(usize, usize), Complex64>,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut rho: Vec<Complex64> = Vec::with_capacity(depth);
    let mut omega = Vec::with_capacity(depth);
    for i in 0..depth {
        let mut om = Complex64::new(0.0, 0.0);
        for p in 0..=i {
            for t in 0..=(i - p) {
                let l = i + 1 - t - p;
                let e = e_table[&(t, l)];
                if e.norm_sqr() == 0.0 {
                    continue;
                }
                om += e * composition_sum(&rho, p, t);
            }
        }
        omega.push(om);
        let mut value = om * sign;
        if i >= 2 {
            for s in 1..=(i / 2) {
                value -= h_coefficient(&rho, s, i - 2 * s);
            }
        }
        rho.push(value);
    }
    (rho, omega)
}

/// H_{s,m} = (−1)^s/(2s+1)! Σ_{ν∈Z₊^{2s+1}, |ν|=m} ρ_{ν₁}⋯ρ_{ν_{2s+1}}.
fn h_coefficient(rho: &[Complex64], s: usize, m: usize) -> Complex64 {
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    let fact = (1..=(2 * s + 1)).map(|k| k as f64).product::<f64>();
    composition_sum(rho, m, 2 * s + 1) * (sign / fact)
}

/// Eigenvalue from the N-term partial sum, with the fitted remainder bound
/// 2·ĉ₁·ĉ₂^N/(πn)^N carried as the record residual.
pub fn series_eigenvalue(table: &CoefficientTable, n_terms: usize) -> Result<EigenvalueRecord> {
    if n_terms > table.rho.len() {
        return Err(Error::InsufficientCoefficients {
            requested: n_terms,
            available: table.rho.len(),
        });
    }
    let pn = PI * table.n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 1.0;
    for i in 0..n_terms {
        sum += table.rho[i] / scale;
        scale *= pn;
    }
    let z = Complex64::new(pn, 0.0) + sum / pn;
    let remainder = fitted_remainder(&table.rho, n_terms, pn)?;
    Ok(EigenvalueRecord {
        n: table.n,
        z,
        lambda: z * z,
        method: Method::Series,
        residual: remainder,
    })
}

/// Least-squares fit of |ρ_i| ≤ ĉ₁·ĉ₂^i on the computed range, ignoring
/// coefficients at noise level; advisory metadata, not a correctness gate.
fn fitted_remainder(rho: &[Complex64], n_terms: usize, pn: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = rho
        .iter()
        .enumerate()
        .filter(|(_, r)| r.norm() >= 1e-13)
        .map(|(i, r)| (i as f64, r.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    let (c1, c2) = if denom.abs() < 1e-30 {
        (pts[0].1.exp(), 1.0)
    } else {
        let slope = (m * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / m;
        (intercept.exp(), slope.exp())
    };
    if c2 >= pn {
        return Err(Error::SeriesUnreliable { ratio: c2 / pn });
    }
    Ok(2.0 * c1 * (c2 / pn).powi(n_terms as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn compositions_examples() {
        let got = weak_compositions(2, 2);
        assert_eq!(*got, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(*weak_compositions(0, 0), vec![Vec::<usize>::new()]);
        assert!(weak_compositions(3, 0).is_empty());
    }

    proptest! {
        #[test]
        fn compositions_count_and_sums(p in 0usize..7, t in 0usize..5) {
            let comps = weak_compositions(p, t);
            for tuple in comps.iter() {
                prop_assert_eq!(tuple.len(), t);
                prop_assert_eq!(tuple.iter().sum::<usize>(), p);
            }
            let expected = if t == 0 {
                usize::from(p == 0)
            } else {
                // C(p + t - 1, t - 1)
                let mut num = 1usize;
                let mut den = 1usize;
                for k in 0..t - 1 {
                    num *= p + t - 1 - k;
                    den *= k + 1;
                }
                num / den
            };
            prop_assert_eq!(comps.len(), expected);
        }
    }

    #[test]
    fn fj_jets_vanish_for_zero_potentials() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.3, 0.6, 128).unwrap();
        let jets = compute_fj_jets(&ctx, 3, 2, 3).unwrap();
        for jet in jets {
            for coeff in &jet.coeffs {
                assert_eq!(*coeff, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn f0_closed_form_constant_potential() {
        // V ≡ 1, Q ≡ 0: f0(πn) = (−1)^n[(1−α)cos(πnα)/2 − sin(πnα)/(2πn)]
        let alpha = 0.3;
        let n = 2usize;
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::zero(),
            alpha,
            0.5,
            2048,
        )
        .unwrap();
        let jets = compute_fj_jets(&ctx, n, 0, 0).unwrap();
        let pn = PI * n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expect = sign * (0.5 * (1.0 - alpha) * (pn * alpha).cos() - (pn * alpha).sin() / (2.0 * pn));
        assert!(
            (jets[0].value() - c(expect, 0.0)).norm() < 1e-6,
            "got {} expect {expect}",
            jets[0].value()
        );
    }

    #[test]
    fn f0_jet_matches_finite_differences() {
        let ctx = OperatorContext::new(
            Potential::constant(0.5, 0.25),
            Potential::CosineSeries(vec![c(0.0, 0.0), c(0.3, -0.1)]),
            0.3,
            0.7,
            1024,
        )
        .unwrap();
        let n = 4usize;
        let jets = compute_fj_jets(&ctx, n, 1, 2).unwrap();
        let h = 1e-5;
        // direct evaluation of f_j at shifted z through the plain path
        let f_direct = |j: usize, dz: f64| -> Complex64 {
            let z = c(PI * n as f64 + dz, 0.0);
            let tables = ctx.trig_tables(z);
            let mut u: Vec<Complex64> = tables.0.clone();
            for _ in 0..j {
                u = ctx.apply_m_with_tables(&tables, &u).values;
            }
            ctx.apply_l_at_one(&tables, &u)
        };
        for j in 0..=1usize {
            let d1 = (f_direct(j, h) - f_direct(j, -h)) / (2.0 * h);
            let d2 = (f_direct(j, h) - f_direct(j, 0.0) * 2.0 + f_direct(j, -h)) / (h * h);
            assert!((jets[j].derivative(1) - d1).norm() < 1e-5, "j={j} first");
            assert!((jets[j].derivative(2) - d2).norm() < 1e-5, "j={j} second");
        }
    }

    #[test]
    fn e_table_instances() {
        let ctx = OperatorContext::new(
            Potential::constant(0.6, -0.2),
            Potential::constant(0.4, 0.1),
            0.25,
            0.5,
            512,
        )
        .unwrap();
        let jets = compute_fj_jets(&ctx, 3, 2, 3).unwrap();
        let e01 = compute_e(&jets, 0, 1).unwrap();
        assert!((e01 - jets[0].value()).norm() < 1e-15);
        let e12 = compute_e(&jets, 1, 2).unwrap();
        let expect = -jets[0].value() + jets[1].derivative(1);
        assert!((e12 - expect).norm() < 1e-14);
        let e02 = compute_e(&jets, 0, 2).unwrap();
        assert!((e02 - jets[1].value()).norm() < 1e-15);
        let e11 = compute_e(&jets, 1, 1).unwrap();
        assert!((e11 - jets[0].derivative(1)).norm() < 1e-14);
    }

    #[test]
    fn e_vanishes_for_zero_potentials() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.3, 0.6, 128).unwrap();
        let jets = compute_fj_jets(&ctx, 2, 3, 4).unwrap();
        for t in 0..3 {
            for l in 1..=3 {
                assert_eq!(compute_e(&jets, t, l).unwrap(), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn e_insufficient_order_detected() {
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::zero(),
            0.5,
            0.5,
            128,
        )
        .unwrap();
        let jets = compute_fj_jets(&ctx, 2, 1, 1).unwrap();
        assert!(matches!(
            compute_e(&jets, 3, 1),
            Err(Error::JetOrderInsufficient { .. })
        ));
        assert!(matches!(
            compute_e(&jets, 0, 3),
            Err(Error::JetOrderInsufficient { .. })
        ));
    }

    #[test]
    fn rho_leading_coefficients() {
        let ctx = OperatorContext::new(
            Potential::constant(0.5, 0.2),
            Potential::constant(0.3, -0.1),
            0.3,
            0.7,
            1024,
        )
        .unwrap();
        for n in [3usize, 4] {
            let table = CoefficientTable::build(&ctx, n, 3).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let f0 = table.fj_jets[0].value();
            let df0 = table.fj_jets[0].derivative(1);
            let f1 = table.fj_jets[1].value();
            assert!((table.rho[0] - f0 * sign).norm() < 1e-13);
            assert!((table.rho[1] - (f0 * df0 + f1 * sign)).norm() < 1e-13);
            // symbol-level identity ω₀ = E_{0,1}
            assert!((table.omega[0] - table.e(0, 1).unwrap()).norm() < 1e-15);
        }
    }

    #[test]
    fn rho_zero_for_zero_potentials() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.4, 0.2, 128).unwrap();
        let table = CoefficientTable::build(&ctx, 5, 6).unwrap();
        for r in &table.rho {
            assert_eq!(*r, c(0.0, 0.0));
        }
        let rec = series_eigenvalue(&table, 6).unwrap();
        let pn = PI * 5.0;
        assert!((rec.lambda - c(pn * pn, 0.0)).norm() < 1e-12);
        assert_eq!(rec.residual, 0.0);
    }

    #[test]
    fn unit_translations_give_unperturbed_series() {
        let ctx = OperatorContext::new(
            Potential::constant(1.0, 0.0),
            Potential::constant(1.0, 0.0),
            1.0,
            1.0,
            256,
        )
        .unwrap();
        let table = CoefficientTable::build(&ctx, 4, 4).unwrap();
        let rec = series_eigenvalue(&table, 4).unwrap();
        let pn = PI * 4.0;
        assert!((rec.lambda - c(pn * pn, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn requesting_too_many_terms_errors() {
        let ctx = OperatorContext::new(Potential::zero(), Potential::zero(), 0.5, 0.5, 128).unwrap();
        let table = CoefficientTable::build(&ctx, 3, 2).unwrap();
        assert!(matches!(
            series_eigenvalue(&table, 5),
            Err(Error::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn coefficient_growth_bounded_over_translations() {
        let mut worst: f64 = 0.0;
        for &alpha in &[0.0, 0.3, 0.8] {
            for &beta in &[0.1, 0.5, 1.0] {
                let ctx = OperatorContext::new(
                    Potential::constant(0.5, 0.2),
                    Potential::constant(0.3, 0.0),
                    alpha,
                    beta,
                    512,
                )
                .unwrap();
                let table = CoefficientTable::build(&ctx, 8, 6).unwrap();
                for (i, r) in table.rho.iter().enumerate().skip(1) {
                    if r.norm() > 1e-13 {
                        worst = worst.max(r.norm().powf(1.0 / i as f64));
                    }
                }
            }
        }
        assert!(worst < 20.0, "geometric base {worst}");
    }
}
