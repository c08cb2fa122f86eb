//! The function `φ` of the Gaussian approximation and its inverse.
//!
//! For a symmetric Gaussian LLR `u ~ N(x, 2x)`,
//! `φ(x) = 1 - E[tanh(u/2)]` for `x > 0` and `φ(0) = 1`.
//!
//! Completing the square turns the integral into
//!
//! ```text
//! φ(x) = exp(-x/4) / sqrt(4πx) · ∫ sech(u/2) exp(-u²/(4x)) du
//! ```
//!
//! whose integrand is even, bounded by one and decays like `exp(-|u|/2)`.
//! This form keeps full relative precision when `φ(x)` is tiny, which the
//! check-node update needs near convergence. [`phi_direct`] evaluates it by
//! adaptive quadrature. [`phi`] and [`phi_inv`] use a cubic Hermite table of
//! `ln φ` against `ln x` (4096 knots on `[1e-6, 60]`, exact slopes) and fall
//! back to quadrature above the table and to the Taylor series below it.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::quad::integrate;
use crate::{Error, Result};

const TABLE_KNOTS: usize = 4096;
const TABLE_MIN: f64 = 1e-6;
const TABLE_MAX: f64 = 60.0;
const QUAD_REL_TOL: f64 = 1e-14;

/// `φ(x)` via the lookup table.
pub fn phi(x: f64) -> Result<f64> {
    check_phi_arg(x)?;
    Ok(phi_fast(x))
}

/// `φ(x)` via adaptive quadrature; the accuracy reference for [`phi`].
pub fn phi_direct(x: f64) -> Result<f64> {
    check_phi_arg(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(ln_phi_direct(x).exp())
}

/// `φ⁻¹(y)` for `y ∈ (0, 1]`.
pub fn phi_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("phi_inv argument {y} outside (0, 1]")));
    }
    Ok(phi_inv_fast(y))
}

fn check_phi_arg(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("phi argument {x} must be finite and >= 0")))
    }
}

/// `I(x) = ∫ sech(u/2) exp(-u²/4x) du` and its derivative in `x`.
fn sech_integral(x: f64, with_derivative: bool) -> (f64, f64) {
    let upper = (14.0 * x.sqrt()).min(90.0);
    let inv4x = 0.25 / x;
    let value = 2.0 * integrate(|u| (-u * u * inv4x).exp() / (0.5 * u).cosh(), 0.0, upper, 0.0, QUAD_REL_TOL);
    let deriv = if with_derivative {
        let scale = inv4x / x;
        2.0 * integrate(
            |u| u * u * scale * (-u * u * inv4x).exp() / (0.5 * u).cosh(),
            0.0,
            upper,
            0.0,
            QUAD_REL_TOL,
        )
    } else {
        0.0
    };
    (value, deriv)
}

pub(crate) fn ln_phi_direct(x: f64) -> f64 {
    let (i, _) = sech_integral(x, false);
    -0.25 * x - 0.5 * (4.0 * PI * x).ln() + i.ln()
}

/// `(ln φ(x), d ln φ / dx)`.
fn ln_phi_with_slope(x: f64) -> (f64, f64) {
    let (i, di) = sech_integral(x, true);
    let value = -0.25 * x - 0.5 * (4.0 * PI * x).ln() + i.ln();
    let slope = -0.25 - 0.5 / x + di / i;
    (value, slope)
}

/// Taylor series `1 - x/2 + x²/4 - 5x³/24`, accurate far below `TABLE_MIN`.
fn phi_series(x: f64) -> f64 {
    1.0 - x * (0.5 - x * (0.25 - x * 5.0 / 24.0))
}

struct PhiTable {
    t0: f64,
    dt: f64,
    // ln φ at each knot, and its derivative in t = ln x
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PhiTable {
    fn build() -> Self {
        let t0 = TABLE_MIN.ln();
        let dt = (TABLE_MAX.ln() - t0) / (TABLE_KNOTS - 1) as f64;
        let (values, slopes) = (0..TABLE_KNOTS)
            .map(|k| {
                let x = if k == TABLE_KNOTS - 1 { TABLE_MAX } else { (t0 + k as f64 * dt).exp() };
                let (v, s) = ln_phi_with_slope(x);
                (v, s * x)
            })
            .unzip();
        PhiTable { t0, dt, values, slopes }
    }

    #[inline]
    fn hermite(&self, k: usize, s: f64) -> f64 {
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[k]
            + h10 * self.dt * self.slopes[k]
            + h01 * self.values[k + 1]
            + h11 * self.dt * self.slopes[k + 1]
    }

    #[inline]
    fn hermite_deriv(&self, k: usize, s: f64) -> f64 {
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.values[k] + d10 * self.dt * self.slopes[k] + d01 * self.values[k + 1] + d11 * self.dt * self.slopes[k + 1]
    }

    fn ln_phi(&self, x: f64) -> f64 {
        let pos = (x.ln() - self.t0) / self.dt;
        let k = (pos.floor() as usize).min(TABLE_KNOTS - 2);
        self.hermite(k, pos - k as f64)
    }

    fn first(&self) -> f64 {
        self.values[0]
    }

    fn last(&self) -> f64 {
        self.values[TABLE_KNOTS - 1]
    }

    /// Solves `ln φ(x) = target` for `target` within the table range.
    fn invert(&self, target: f64) -> f64 {
        // values decrease with k
        let k = self.values.partition_point(|&v| v >= target).clamp(1, TABLE_KNOTS - 1) - 1;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let span = self.values[k + 1] - self.values[k];
        let mut s = if span != 0.0 { ((target - self.values[k]) / span).clamp(0.0, 1.0) } else { 0.5 };
        for _ in 0..60 {
            let g = self.hermite(k, s) - target;
            if g > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let d = self.hermite_deriv(k, s);
            let mut next = if d < 0.0 { s - g / d } else { f64::NAN };
            if !(next >= lo && next <= hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() < 1e-15 {
                s = next;
                break;
            }
            s = next;
        }
        (self.t0 + (k as f64 + s) * self.dt).exp()
    }
}

fn table() -> &'static PhiTable {
    static TABLE: OnceLock<PhiTable> = OnceLock::new();
    TABLE.get_or_init(PhiTable::build)
}

#[inline]
pub(crate) fn phi_fast(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < TABLE_MIN {
        phi_series(x)
    } else if x <= TABLE_MAX {
        table().ln_phi(x).exp()
    } else {
        ln_phi_direct(x).exp()
    }
}

pub(crate) fn phi_inv_fast(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let tab = table();
    let target = y.ln();
    if target >= tab.first() {
        // y is within ~5e-7 of one: invert the series
        let mut x = 2.0 * (1.0 - y);
        for _ in 0..8 {
            let f = phi_series(x) - y;
            let d = -0.5 + x * (0.5 - x * 15.0 / 24.0);
            x -= f / d;
        }
        return x.max(0.0);
    }
    if target >= tab.last() {
        return tab.invert(target);
    }
    // Beyond the table ln φ is close to linear with slope -1/4.
    let (mut lo, mut hi) = (TABLE_MAX, f64::INFINITY);
    let mut x = TABLE_MAX + 4.0 * (tab.last() - target);
    for _ in 0..100 {
        let (v, slope) = ln_phi_with_slope(x);
        let g = v - target;
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - g / slope;
        if !(next > lo && next < hi) {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x };
        }
        if (next - x).abs() <= 1e-13 * x {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    // 80-digit values of 1 - (4πx)^(-1/2) ∫ tanh(u/2) exp(-(u-x)²/4x) du
    const REFERENCE: [(f64, f64); 13] = [
        (1e-6, 0.99999950000024999979),
        (1e-4, 0.99995000249979169374),
        (1e-3, 0.9995002497919370281),
        (0.1, 0.95231484176976068288),
        (1.0, 0.64988659532486918568),
        (2.0, 0.44959950920667282971),
        (5.0, 0.16879302507739345574),
        (10.0, 0.038462811369382677444),
        (20.0, 0.0024113147354122573302),
        (50.0, 8.9282004289214136801e-7),
        (60.0, 6.7374330125991922172e-8),
        (100.0, 2.4042525188165181543e-12),
        (300.0, 2.7190246672911012863e-34),
    ];

    #[test]
    fn direct_matches_reference() {
        for (x, want) in REFERENCE {
            let got = phi_direct(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-11, "phi_direct({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn table_matches_reference() {
        for (x, want) in REFERENCE {
            let got = phi(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "phi({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn boundary_values() {
        assert_eq!(phi(0.0).unwrap(), 1.0);
        assert_eq!(phi_direct(0.0).unwrap(), 1.0);
        assert_eq!(phi_inv(1.0).unwrap(), 0.0);
        assert!(phi(1e4).unwrap() < 1e-300);
        assert!(phi(-1.0).is_err());
        assert!(phi_inv(0.0).is_err());
        assert!(phi_inv(1.5).is_err());
        let near_zero = phi(1e-9).unwrap();
        assert!((near_zero - (1.0 - 5e-10)).abs() < 1e-18);
    }

    #[test]
    fn inverse_roundtrip_all_regions() {
        for x in [1e-9, 1e-7, 1e-6, 3e-6, 0.01, 0.1, 1.0, 5.0, 20.0, 59.9, 60.0, 61.0, 150.0, 800.0, 2500.0] {
            let y = phi(x).unwrap();
            let back = phi_inv(y).unwrap();
            assert!((back - x).abs() <= 1e-8 * x.max(1.0), "x={x} y={y} back={back}");
        }
        for y in [0.999_999_9, 0.9, 0.5, 1e-3, 1e-7, 1e-50, 1e-300] {
            let x = phi_inv(y).unwrap();
            assert!(((phi(x).unwrap() - y) / y).abs() < 1e-8, "y={y} x={x}");
        }
    }

    #[test]
    fn table_is_monotone_on_dense_grid() {
        let mut prev = phi(1e-7).unwrap();
        let mut x = 1e-7;
        while x < 70.0 {
            x *= 1.0007;
            let cur = phi(x).unwrap();
            assert!(cur < prev, "phi not decreasing at {x}");
            prev = cur;
        }
    }
}
