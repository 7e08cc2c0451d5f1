//! Truncated Taylor series in (z − center) with complex coefficients.
//!
//! Coefficients are plain Taylor coefficients: f ≈ Σ c_m (z−center)^m, so
//! ∂_z^m f = m!·c_m. Arithmetic is closed at a fixed order by truncation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the jet order carried through quadrature.
pub const JET_ORDER_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl TaylorJet {
    pub fn zero(center: Complex64, order: usize) -> Self {
        TaylorJet {
            center,
            coeffs: vec![Complex64::new(0.0, 0.0); order + 1],
        }
    }

    pub fn constant(center: Complex64, order: usize, value: Complex64) -> Self {
        let mut jet = Self::zero(center, order);
        jet.coeffs[0] = value;
        jet
    }

    /// The identity jet z ↦ z about `center`.
    pub fn variable(center: Complex64, order: usize) -> Self {
        let mut jet = Self::zero(center, order);
        jet.coeffs[0] = center;
        if order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn check_order(order: usize) -> Result<()> {
        if order > JET_ORDER_CAP {
            Err(Error::JetOrderTooLarge { requested: order, cap: JET_ORDER_CAP })
        } else {
            Ok(())
        }
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// m-th derivative ∂_z^m f = m!·c_m.
    pub fn derivative(&self, m: usize) -> Complex64 {
        self.coeffs[m] * factorial(m)
    }

    pub fn add(&self, other: &TaylorJet) -> TaylorJet {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        TaylorJet { center: self.center, coeffs }
    }

    pub fn sub(&self, other: &TaylorJet) -> TaylorJet {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        TaylorJet { center: self.center, coeffs }
    }

    pub fn scale(&self, s: Complex64) -> TaylorJet {
        TaylorJet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &TaylorJet) -> TaylorJet {
        let p = self.coeffs.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p];
        for i in 0..p {
            if self.coeffs[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..p - i {
                coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        TaylorJet { center: self.center, coeffs }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> TaylorJet {
        let p = self.coeffs.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p];
        let inv0 = Complex64::new(1.0, 0.0) / self.coeffs[0];
        coeffs[0] = inv0;
        for k in 1..p {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = -acc * inv0;
        }
        TaylorJet { center: self.center, coeffs }
    }
}

/// Jet of z ↦ sin(a·z) about `center`: c_m = a^m sin(a·center + mπ/2)/m!.
pub fn jet_sin(center: Complex64, a: f64, order: usize) -> TaylorJet {
    jet_trig(center, a, order, true)
}

/// Jet of z ↦ cos(a·z) about `center`: c_m = a^m cos(a·center + mπ/2)/m!.
pub fn jet_cos(center: Complex64, a: f64, order: usize) -> TaylorJet {
    jet_trig(center, a, order, false)
}

fn jet_trig(center: Complex64, a: f64, order: usize, sine: bool) -> TaylorJet {
    let w = center * a;
    let (sw, cw) = (w.sin(), w.cos());
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut factor = 1.0; // a^m / m!
    for m in 0..=order {
        // shift by mπ/2 cycles s, c, -s, -c (sine) or c, -s, -c, s (cosine)
        let base = match (sine, m % 4) {
            (true, 0) => sw,
            (true, 1) => cw,
            (true, 2) => -sw,
            (true, _) => -cw,
            (false, 0) => cw,
            (false, 1) => -sw,
            (false, 2) => -cw,
            (false, _) => sw,
        };
        coeffs.push(base * factor);
        factor *= a / (m + 1) as f64;
    }
    TaylorJet { center, coeffs }
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}
