//! Breakpoint-aware grids on [0,1] and sampled complex functions.
//!
//! The translated arguments kink integrands exactly at 1−α and β, so those
//! points are forced onto the grid; composite trapezoid then stays O(h²).

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};

const SNAP: f64 = 1e-12;

/// Ascending nodes on [0,1] containing 0, 1, and the translation breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

impl Grid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node equal to `x` (within snapping tolerance).
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let pos = self.nodes.partition_point(|&t| t < x - SNAP);
        if pos < self.nodes.len() && (self.nodes[pos] - x).abs() <= SNAP {
            Some(pos)
        } else {
            None
        }
    }

    /// Interval index and interpolation weight for x, clamped to [0,1].
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.nodes.len();
        let pos = self.nodes.partition_point(|&t| t <= x).clamp(1, n - 1);
        let i = pos - 1;
        let w = ((x - self.nodes[i]) / (self.nodes[i + 1] - self.nodes[i])).clamp(0.0, 1.0);
        (i, w)
    }

    /// Trapezoid weight of each node over the index range [a, b].
    pub fn trapezoid_weights(&self, a: usize, b: usize) -> Vec<f64> {
        let mut w = vec![0.0; b.saturating_sub(a) + 1];
        for i in a..b {
            let h = self.nodes[i + 1] - self.nodes[i];
            w[i - a] += 0.5 * h;
            w[i + 1 - a] += 0.5 * h;
        }
        w
    }
}

/// Near-uniform grid with at least `resolution` intervals, containing 0, 1,
/// and the interior breakpoints 1−α and β.
///
/// When a slightly larger interval count makes every breakpoint an exact
/// multiple of the spacing, the grid is made uniform at that count; the
/// translated evaluations then land on nodes and need no interpolation.
pub fn make_grid(alpha: f64, beta: f64, resolution: usize) -> Result<Arc<Grid>> {
    if resolution < 16 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    let mut breaks: Vec<f64> = Vec::new();
    for p in [1.0 - alpha, beta] {
        if p > SNAP && p < 1.0 - SNAP && breaks.iter().all(|&q| (q - p).abs() > SNAP) {
            breaks.push(p);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for r in resolution..=resolution + 128 {
        let aligned = breaks
            .iter()
            .all(|&p| (p * r as f64 - (p * r as f64).round()).abs() < 1e-6);
        if !aligned {
            continue;
        }
        let mut nodes: Vec<f64> = (0..=r).map(|j| j as f64 / r as f64).collect();
        for &p in &breaks {
            let idx = (p * r as f64).round() as usize;
            nodes[idx] = p;
        }
        return Ok(Arc::new(Grid { nodes }));
    }

    // incommensurate breakpoints: subdivide each segment separately
    let mut edges = breaks;
    edges.insert(0, 0.0);
    edges.push(1.0);
    let h0 = 1.0 / resolution as f64;
    let mut nodes = Vec::with_capacity(resolution + 4);
    for seg in edges.windows(2) {
        let (p, q) = (seg[0], seg[1]);
        let m = ((q - p) / h0 - 1e-9).ceil().max(1.0) as usize;
        for j in 0..m {
            nodes.push(p + (q - p) * j as f64 / m as f64);
        }
    }
    nodes.push(1.0);
    Ok(Arc::new(Grid { nodes }))
}

/// Complex samples on a grid.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Self {
        assert_eq!(grid.len(), values.len());
        GridFunction { grid, values }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        GridFunction { grid: Arc::clone(grid), values }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Value at x by linear interpolation between neighboring nodes.
    pub fn interp(&self, x: f64) -> Complex64 {
        let (i, w) = self.grid.locate(x);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    pub fn same_grid(&self, other: &Arc<Grid>) -> bool {
        Arc::ptr_eq(&self.grid, other) || self.grid.nodes() == other.nodes()
    }
}

/// Composite trapezoid of `f` over the node index range [a_index, b_index].
pub fn integrate(f: &GridFunction, a_index: usize, b_index: usize) -> Result<Complex64> {
    let n = f.grid.len();
    if a_index > b_index || b_index >= n {
        return Err(Error::IndexOutOfRange {
            index: a_index.max(b_index),
            len: n,
        });
    }
    let nodes = f.grid.nodes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in a_index..b_index {
        let h = nodes[i + 1] - nodes[i];
        acc += (f.values[i] + f.values[i + 1]) * (0.5 * h);
    }
    Ok(acc)
}

/// Discrete L² inner product ∫ f·conj(g) over the whole grid.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Complex64 {
    let nodes = f.grid.nodes();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..nodes.len() - 1 {
        let h = nodes[i + 1] - nodes[i];
        acc += (f.values[i] * g.values[i].conj() + f.values[i + 1] * g.values[i + 1].conj())
            * (0.5 * h);
    }
    acc
}

/// Discrete L² norm.
pub fn l2_norm(f: &GridFunction) -> f64 {
    inner_product(f, f).re.max(0.0).sqrt()
}
