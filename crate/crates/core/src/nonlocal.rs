//! The nonlocal free term B(α,β) and the Volterra-type operators M and L.
//!
//! (B u)(x) = V(x)·u(x+α) for x+α ≤ 1 plus Q(x)·u(x−β) for x−β ≥ 0, with u
//! continued by zero outside [0,1]. M and L integrate B u against sin z(x−t)
//! and cos z(x−t). Both come in plain complex and Taylor-jet arithmetic.
//!
//! B u jumps exactly at x = 1−α and x = β; those points are grid nodes and
//! the interval quadrature uses one-sided endpoint values, which keeps the
//! composite trapezoid second order.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{make_grid, Grid, GridFunction};
use crate::jet::{jet_cos, jet_sin, TaylorJet};
use crate::potential::Potential;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Precomputed state for applying B, M, L on a fixed grid.
#[derive(Debug, Clone)]
pub struct OperatorContext {
    pub v: Potential,
    pub q: Potential,
    pub alpha: f64,
    pub beta: f64,
    pub grid: Arc<Grid>,
    v_nodes: Vec<Complex64>,
    q_nodes: Vec<Complex64>,
    /// Node index of 1−α (support of the V-term is [0, nodes[idx_va]]).
    idx_va: usize,
    /// Node index of β (support of the Q-term is [nodes[idx_qb], 1]).
    idx_qb: usize,
    /// locate(x_k + α) for k = 0..=idx_va.
    shift_a: Vec<(usize, f64)>,
    /// locate(x_k − β) for k = idx_qb.., indexed k − idx_qb.
    shift_b: Vec<(usize, f64)>,
    v_bound: f64,
}

impl OperatorContext {
    pub fn new(v: Potential, q: Potential, alpha: f64, beta: f64, resolution: usize) -> Result<Self> {
        let grid = make_grid(alpha, beta, resolution)?;
        Self::with_grid(v, q, alpha, beta, grid)
    }

    pub fn with_grid(
        v: Potential,
        q: Potential,
        alpha: f64,
        beta: f64,
        grid: Arc<Grid>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfDomain { x: alpha });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::OutOfDomain { x: beta });
        }
        let nodes = grid.nodes().to_vec();
        let n = nodes.len();
        let v_nodes = nodes.iter().map(|&x| v.eval(x, 0)).collect::<Result<Vec<_>>>()?;
        let q_nodes = nodes.iter().map(|&x| q.eval(x, 0)).collect::<Result<Vec<_>>>()?;
        let idx_va = grid
            .node_index(1.0 - alpha)
            .expect("grid is built around the 1-alpha breakpoint");
        let idx_qb = grid
            .node_index(beta)
            .expect("grid is built around the beta breakpoint");
        let snap = |pair: (usize, f64)| {
            let (i, w) = pair;
            if w < 1e-9 {
                (i, 0.0)
            } else if w > 1.0 - 1e-9 {
                (i, 1.0)
            } else {
                (i, w)
            }
        };
        let shift_a = (0..=idx_va)
            .map(|k| snap(grid.locate((nodes[k] + alpha).min(1.0))))
            .collect();
        let shift_b = (idx_qb..n)
            .map(|k| snap(grid.locate((nodes[k] - beta).max(0.0))))
            .collect();
        // Terms with zero-length support act as the zero operator.
        let v_bound = if alpha < 1.0 { v.sup_norm() } else { 0.0 }
            + if beta < 1.0 { q.sup_norm() } else { 0.0 };
        Ok(OperatorContext {
            v,
            q,
            alpha,
            beta,
            grid,
            v_nodes,
            q_nodes,
            idx_va,
            idx_qb,
            shift_a,
            shift_b,
            v_bound,
        })
    }

    /// ‖V‖_∞ + ‖Q‖_∞, the computable stand-in for the operator-norm constant.
    pub fn v_bound(&self) -> f64 {
        self.v_bound
    }

    /// Geometric ratio bounding the series step: v_bound·e^{|Im z|}/Re z.
    /// The kernel satisfies |sin z(x−t)| ≤ e^{|Im z|}, which on the spectral
    /// strip |Im z| ≤ √2·v_bound reproduces the worst-case e^{√2·v_bound}.
    pub fn contraction_ratio(&self, z: Complex64) -> f64 {
        if z.re <= 0.0 {
            return f64::INFINITY;
        }
        self.v_bound * z.im.abs().exp() / z.re
    }

    pub fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if u.same_grid(&self.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn u_shift_a(&self, u: &[Complex64], k: usize) -> Complex64 {
        let (i, w) = self.shift_a[k];
        if w == 0.0 {
            u[i]
        } else if w == 1.0 {
            u[i + 1]
        } else {
            u[i] * (1.0 - w) + u[i + 1] * w
        }
    }

    fn u_shift_b(&self, u: &[Complex64], k: usize) -> Complex64 {
        let (i, w) = self.shift_b[k - self.idx_qb];
        if w == 0.0 {
            u[i]
        } else if w == 1.0 {
            u[i + 1]
        } else {
            u[i] * (1.0 - w) + u[i + 1] * w
        }
    }

    /// Node values of B u with inclusive endpoints. The terms with α = 1 or
    /// β = 1 have zero-length support and vanish as operators.
    pub fn apply_b(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        let n = self.grid.len();
        let mut values = vec![ZERO; n];
        if self.alpha < 1.0 {
            for k in 0..=self.idx_va {
                values[k] += self.v_nodes[k] * self.u_shift_a(&u.values, k);
            }
        }
        if self.beta < 1.0 {
            for k in self.idx_qb..n {
                values[k] += self.q_nodes[k] * self.u_shift_b(&u.values, k);
            }
        }
        Ok(GridFunction::new(Arc::clone(&self.grid), values))
    }

    /// One-sided endpoint values of B u per interval, for the quadrature.
    fn b_interval_values(&self, u: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.len();
        let mut left = vec![ZERO; n - 1];
        let mut right = vec![ZERO; n - 1];
        for i in 0..self.idx_va {
            left[i] += self.v_nodes[i] * self.u_shift_a(u, i);
            right[i] += self.v_nodes[i + 1] * self.u_shift_a(u, i + 1);
        }
        for i in self.idx_qb..n - 1 {
            left[i] += self.q_nodes[i] * self.u_shift_b(u, i);
            right[i] += self.q_nodes[i + 1] * self.u_shift_b(u, i + 1);
        }
        (left, right)
    }

    /// cos(z·x_k) and sin(z·x_k) tables for the angle-addition split.
    pub fn trig_tables(&self, z: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut cz = Vec::with_capacity(self.grid.len());
        let mut sz = Vec::with_capacity(self.grid.len());
        for &x in self.grid.nodes() {
            let w = z * x;
            cz.push(w.cos());
            sz.push(w.sin());
        }
        (cz, sz)
    }

    /// (M u)(x) = ∫₀ˣ (B u)(t) sin z(x−t) dt at every node.
    pub fn apply_m(&self, z: Complex64, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        let tables = self.trig_tables(z);
        Ok(self.apply_m_with_tables(&tables, &u.values))
    }

    /// (L u)(x) = ∫₀ˣ (B u)(t) cos z(x−t) dt at every node.
    pub fn apply_l(&self, z: Complex64, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        let tables = self.trig_tables(z);
        Ok(self.apply_l_with_tables(&tables, &u.values))
    }

    pub(crate) fn apply_m_with_tables(
        &self,
        (cz, sz): &(Vec<Complex64>, Vec<Complex64>),
        u: &[Complex64],
    ) -> GridFunction {
        let (cs, ss) = self.cumulative(cz, sz, u);
        let values = (0..self.grid.len())
            .map(|k| sz[k] * cs[k] - cz[k] * ss[k])
            .collect();
        GridFunction::new(Arc::clone(&self.grid), values)
    }

    pub(crate) fn apply_l_with_tables(
        &self,
        (cz, sz): &(Vec<Complex64>, Vec<Complex64>),
        u: &[Complex64],
    ) -> GridFunction {
        let (cs, ss) = self.cumulative(cz, sz, u);
        let values = (0..self.grid.len())
            .map(|k| cz[k] * cs[k] + sz[k] * ss[k])
            .collect();
        GridFunction::new(Arc::clone(&self.grid), values)
    }

    /// Boundary value (L u)(1) only; shares the cumulative pass.
    pub(crate) fn apply_l_at_one(
        &self,
        (cz, sz): &(Vec<Complex64>, Vec<Complex64>),
        u: &[Complex64],
    ) -> Complex64 {
        let (cs, ss) = self.cumulative(cz, sz, u);
        let k = self.grid.len() - 1;
        cz[k] * cs[k] + sz[k] * ss[k]
    }

    /// Running integrals C(x) = ∫₀ˣ (B u) cos zt dt and S(x) = ∫₀ˣ (B u) sin zt dt.
    fn cumulative(
        &self,
        cz: &[Complex64],
        sz: &[Complex64],
        u: &[Complex64],
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let (bl, br) = self.b_interval_values(u);
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let mut cs = Vec::with_capacity(n);
        let mut ss = Vec::with_capacity(n);
        let mut c_acc = ZERO;
        let mut s_acc = ZERO;
        cs.push(c_acc);
        ss.push(s_acc);
        for i in 0..n - 1 {
            let half_h = 0.5 * (nodes[i + 1] - nodes[i]);
            c_acc += (bl[i] * cz[i] + br[i] * cz[i + 1]) * half_h;
            s_acc += (bl[i] * sz[i] + br[i] * sz[i + 1]) * half_h;
            cs.push(c_acc);
            ss.push(s_acc);
        }
        (cs, ss)
    }

    /// Jet-valued trig tables about `center`.
    pub fn jet_tables(&self, center: Complex64, order: usize) -> Result<JetTables> {
        TaylorJet::check_order(order)?;
        let sin_x = self.grid.nodes().iter().map(|&x| jet_sin(center, x, order)).collect();
        let cos_x = self.grid.nodes().iter().map(|&x| jet_cos(center, x, order)).collect();
        Ok(JetTables { center, order, sin_x, cos_x })
    }

    /// M with the kernel expanded as a truncated Taylor jet in (z − center).
    pub fn apply_m_jet(&self, center: f64, order: usize, u: &JetFunction) -> Result<JetFunction> {
        let tables = self.jet_tables(Complex64::new(center, 0.0), order)?;
        self.apply_m_jet_with_tables(&tables, u)
    }

    pub(crate) fn apply_m_jet_with_tables(
        &self,
        tables: &JetTables,
        u: &JetFunction,
    ) -> Result<JetFunction> {
        let (cs, ss) = self.cumulative_jet(tables, u)?;
        let jets = (0..self.grid.len())
            .map(|k| tables.sin_x[k].mul(&cs[k]).sub(&tables.cos_x[k].mul(&ss[k])))
            .collect();
        Ok(JetFunction { grid: Arc::clone(&self.grid), jets })
    }

    pub fn apply_l_jet(&self, center: f64, order: usize, u: &JetFunction) -> Result<JetFunction> {
        let tables = self.jet_tables(Complex64::new(center, 0.0), order)?;
        self.apply_l_jet_with_tables(&tables, u)
    }

    pub(crate) fn apply_l_jet_with_tables(
        &self,
        tables: &JetTables,
        u: &JetFunction,
    ) -> Result<JetFunction> {
        let (cs, ss) = self.cumulative_jet(tables, u)?;
        let jets = (0..self.grid.len())
            .map(|k| tables.cos_x[k].mul(&cs[k]).add(&tables.sin_x[k].mul(&ss[k])))
            .collect();
        Ok(JetFunction { grid: Arc::clone(&self.grid), jets })
    }

    pub(crate) fn apply_l_jet_at_one(
        &self,
        tables: &JetTables,
        u: &JetFunction,
    ) -> Result<TaylorJet> {
        let (cs, ss) = self.cumulative_jet(tables, u)?;
        let k = self.grid.len() - 1;
        Ok(tables.cos_x[k].mul(&cs[k]).add(&tables.sin_x[k].mul(&ss[k])))
    }

    fn cumulative_jet(
        &self,
        tables: &JetTables,
        u: &JetFunction,
    ) -> Result<(Vec<TaylorJet>, Vec<TaylorJet>)> {
        if !Arc::ptr_eq(&u.grid, &self.grid) && u.grid.nodes() != self.grid.nodes() {
            return Err(Error::GridMismatch);
        }
        for jet in &u.jets {
            if jet.order() != tables.order {
                return Err(Error::JetOrderMismatch { expected: tables.order, got: jet.order() });
            }
        }
        let (bl, br) = self.b_interval_values_jet(&u.jets, tables);
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let mut cs = Vec::with_capacity(n);
        let mut ss = Vec::with_capacity(n);
        let mut c_acc = TaylorJet::zero(tables.center, tables.order);
        let mut s_acc = c_acc.clone();
        cs.push(c_acc.clone());
        ss.push(s_acc.clone());
        for i in 0..n - 1 {
            let half_h = Complex64::new(0.5 * (nodes[i + 1] - nodes[i]), 0.0);
            c_acc = c_acc.add(
                &bl[i]
                    .mul(&tables.cos_x[i])
                    .add(&br[i].mul(&tables.cos_x[i + 1]))
                    .scale(half_h),
            );
            s_acc = s_acc.add(
                &bl[i]
                    .mul(&tables.sin_x[i])
                    .add(&br[i].mul(&tables.sin_x[i + 1]))
                    .scale(half_h),
            );
            cs.push(c_acc.clone());
            ss.push(s_acc.clone());
        }
        Ok((cs, ss))
    }

    fn b_interval_values_jet(
        &self,
        u: &[TaylorJet],
        tables: &JetTables,
    ) -> (Vec<TaylorJet>, Vec<TaylorJet>) {
        let n = self.grid.len();
        let zero = TaylorJet::zero(tables.center, tables.order);
        let mut left = vec![zero.clone(); n - 1];
        let mut right = vec![zero; n - 1];
        let shift_a = |k: usize| -> TaylorJet {
            let (i, w) = self.shift_a[k];
            if w == 0.0 {
                u[i].clone()
            } else if w == 1.0 {
                u[i + 1].clone()
            } else {
                u[i]
                    .scale(Complex64::new(1.0 - w, 0.0))
                    .add(&u[i + 1].scale(Complex64::new(w, 0.0)))
            }
        };
        let shift_b = |k: usize| -> TaylorJet {
            let (i, w) = self.shift_b[k - self.idx_qb];
            if w == 0.0 {
                u[i].clone()
            } else if w == 1.0 {
                u[i + 1].clone()
            } else {
                u[i]
                    .scale(Complex64::new(1.0 - w, 0.0))
                    .add(&u[i + 1].scale(Complex64::new(w, 0.0)))
            }
        };
        for i in 0..self.idx_va {
            left[i] = left[i].add(&shift_a(i).scale(self.v_nodes[i]));
            right[i] = right[i].add(&shift_a(i + 1).scale(self.v_nodes[i + 1]));
        }
        for i in self.idx_qb..n - 1 {
            left[i] = left[i].add(&shift_b(i).scale(self.q_nodes[i]));
            right[i] = right[i].add(&shift_b(i + 1).scale(self.q_nodes[i + 1]));
        }
        (left, right)
    }
}

/// Per-node jets of sin(z·x) and cos(z·x) about a fixed expansion center.
#[derive(Debug, Clone)]
pub struct JetTables {
    pub center: Complex64,
    pub order: usize,
    pub(crate) sin_x: Vec<TaylorJet>,
    pub(crate) cos_x: Vec<TaylorJet>,
}

/// Grid function whose values are Taylor jets in (z − center).
#[derive(Debug, Clone)]
pub struct JetFunction {
    pub grid: Arc<Grid>,
    pub jets: Vec<TaylorJet>,
}

impl JetFunction {
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> TaylorJet) -> Self {
        JetFunction {
            grid: Arc::clone(grid),
            jets: grid.nodes().iter().map(|&x| f(x)).collect(),
        }
    }

    /// Max over nodes of the ℓ¹ coefficient norm.
    pub fn sup_norm(&self) -> f64 {
        self.jets
            .iter()
            .map(|j| j.coeffs.iter().map(|c| c.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Grid function of a fixed coefficient.
    pub fn coefficient(&self, m: usize) -> GridFunction {
        GridFunction::new(
            Arc::clone(&self.grid),
            self.jets.iter().map(|j| j.coeffs[m]).collect(),
        )
    }
}
