//! Complex-valued coefficient functions on [0,1].
//!
//! Four families: constants, polynomials, cosine series (`a·cos(kπx)` and
//! sums thereof), and tabulated data with linear interpolation. The first
//! three carry analytic derivatives of any order; tabulated data does not.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A complex potential on [0,1].
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Constant(Complex64),
    /// Coefficients c0 + c1·x + c2·x² + …
    Polynomial(Vec<Complex64>),
    /// Cosine series Σ_j c_j·cos(jπx).
    CosineSeries(Vec<Complex64>),
    /// Sampled values, linearly interpolated; abscissae strictly ascending in [0,1].
    Tabulated { xs: Vec<f64>, values: Vec<Complex64> },
}

impl Potential {
    pub fn zero() -> Self {
        Potential::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(re: f64, im: f64) -> Self {
        Potential::Constant(Complex64::new(re, im))
    }

    /// Highest derivative order this potential can evaluate.
    pub fn derivative_order_available(&self) -> usize {
        match self {
            Potential::Tabulated { .. } => 0,
            _ => usize::MAX,
        }
    }

    /// Value of the `deriv`-th derivative at `x`.
    pub fn eval(&self, x: f64, deriv: usize) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        let available = self.derivative_order_available();
        if deriv > available {
            return Err(Error::DerivativeUnavailable { requested: deriv, available });
        }
        Ok(match self {
            Potential::Constant(c) => {
                if deriv == 0 {
                    *c
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Potential::Polynomial(coeffs) => {
                // Horner on the deriv-times differentiated coefficient list.
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &c) in coeffs.iter().enumerate().skip(deriv).rev() {
                    let mut fall = 1.0;
                    for m in 0..deriv {
                        fall *= (j - m) as f64;
                    }
                    acc = acc * x + c * fall;
                }
                acc
            }
            Potential::CosineSeries(coeffs) => {
                // d^m cos(jπx) = (jπ)^m cos(jπx + mπ/2)
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &c) in coeffs.iter().enumerate() {
                    let w = j as f64 * PI;
                    let phase = w * x + deriv as f64 * PI / 2.0;
                    acc += c * w.powi(deriv as i32) * phase.cos();
                }
                acc
            }
            Potential::Tabulated { xs, values } => {
                let pos = xs.partition_point(|&t| t <= x);
                if pos == 0 {
                    values[0]
                } else if pos == xs.len() {
                    values[values.len() - 1]
                } else {
                    let (x0, x1) = (xs[pos - 1], xs[pos]);
                    let w = (x - x0) / (x1 - x0);
                    values[pos - 1] * (1.0 - w) + values[pos] * w
                }
            }
        })
    }

    /// Upper bound for sup_{[0,1]} |p(x)|.
    ///
    /// Exact for constants and tabulated data (piecewise-linear attains its
    /// maximum modulus at a node); a coefficient-sum bound for the analytic
    /// families.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Potential::Constant(c) => c.norm(),
            Potential::Polynomial(coeffs) => coeffs.iter().map(|c| c.norm()).sum(),
            Potential::CosineSeries(coeffs) => coeffs.iter().map(|c| c.norm()).sum(),
            Potential::Tabulated { values, .. } => {
                values.iter().map(|c| c.norm()).fold(0.0, f64::max)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// Parse the CLI potential grammar:
    /// `const:re[,im]`, `poly:c0,c1,...`, `trig:a,k` (a·cos(kπx)), `file:path`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::PotentialParse {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = spec.split_once(':').ok_or_else(|| bad("missing `kind:` prefix"))?;
        match kind {
            "const" => {
                let parts: Vec<&str> = rest.split(',').collect();
                match parts.as_slice() {
                    [re] => Ok(Potential::Constant(Complex64::new(
                        parse_real(re).ok_or_else(|| bad("bad real part"))?,
                        0.0,
                    ))),
                    [re, im] => Ok(Potential::Constant(Complex64::new(
                        parse_real(re).ok_or_else(|| bad("bad real part"))?,
                        parse_real(im).ok_or_else(|| bad("bad imaginary part"))?,
                    ))),
                    _ => Err(bad("expected `const:re[,im]`")),
                }
            }
            "poly" => {
                let coeffs = rest
                    .split(',')
                    .map(parse_complex)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad("bad coefficient"))?;
                if coeffs.is_empty() {
                    return Err(bad("empty coefficient list"));
                }
                Ok(Potential::Polynomial(coeffs))
            }
            "trig" => {
                let (a, k) = rest.split_once(',').ok_or_else(|| bad("expected `trig:a,k`"))?;
                let amp = parse_complex(a).ok_or_else(|| bad("bad amplitude"))?;
                let freq: usize = k.trim().parse().map_err(|_| bad("bad frequency"))?;
                let mut coeffs = vec![Complex64::new(0.0, 0.0); freq + 1];
                coeffs[freq] = amp;
                Ok(Potential::CosineSeries(coeffs))
            }
            "file" => {
                let text = std::fs::read_to_string(rest)?;
                let mut xs = Vec::new();
                let mut values = Vec::new();
                for (lineno, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let cols: Vec<&str> = line.split(',').collect();
                    if cols.len() != 3 {
                        return Err(bad(&format!("line {}: expected `x,re,im`", lineno + 1)));
                    }
                    let x = parse_real(cols[0]).ok_or_else(|| bad("bad abscissa"))?;
                    let re = parse_real(cols[1]).ok_or_else(|| bad("bad re column"))?;
                    let im = parse_real(cols[2]).ok_or_else(|| bad("bad im column"))?;
                    if let Some(&prev) = xs.last() {
                        if x <= prev {
                            return Err(bad("abscissae must be strictly ascending"));
                        }
                    }
                    if !(0.0..=1.0).contains(&x) {
                        return Err(bad("abscissa outside [0,1]"));
                    }
                    xs.push(x);
                    values.push(Complex64::new(re, im));
                }
                if xs.len() < 2 {
                    return Err(bad("need at least two samples"));
                }
                Ok(Potential::Tabulated { xs, values })
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

fn parse_real(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok()
}

/// Accepts `re`, `re+imi`, `re-imi`, or `imi`.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Some(stripped) = s.strip_suffix('i') {
        // Split at the last '+'/'-' that is not a leading sign or exponent sign.
        let bytes = stripped.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let b = bytes[i];
            if (b == b'+' || b == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re = parse_real(&stripped[..i])?;
                let im_str = &stripped[i..];
                let im = if im_str == "+" || im_str == "-" {
                    return None;
                } else {
                    parse_real(im_str)?
                };
                Some(Complex64::new(re, im))
            }
            None => Some(Complex64::new(0.0, parse_real(stripped)?)),
        }
    } else {
        Some(Complex64::new(parse_real(s)?, 0.0))
    }
}
