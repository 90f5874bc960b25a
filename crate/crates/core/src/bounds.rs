//! Compressibility condition and recovery error-bound coefficients.
//!
//! With `g(delta) = sqrt(2) delta / (1 - delta)` and the norm constants of
//! [`crate::constants`], the two inequalities the recovery analysis chains
//! together admit a positive matrix inverse exactly when
//! `g * r * d / f < 1`. Solving that determinant condition for `delta`
//! gives the closed-form threshold
//!
//! `delta* = f a gamma / (f a gamma + sqrt(2) b d)`,
//!
//! which specializes to `sqrt(2) - 1` for conventional sparsity and to
//! `1 / (sqrt(2 s_max) + 1)` for the group LASSO. Below the threshold, the
//! recovery error obeys
//!
//! `||xhat - x||_2 <= D1 sigma + D2 eps` and
//! `||xhat - x||_A <= D3 sigma + D4 eps`
//!
//! with the coefficients computed here. For conventional sparsity,
//! `D3 = sqrt(k) D1` and `D4 = sqrt(k) D2` exactly.

use crate::constants::NormConstants;
use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Coefficients and verdict at a given `delta_2k`.
#[derive(Clone, Copy, Debug)]
pub struct BoundReport {
    pub delta2k: f64,
    /// Largest `delta_2k` admitting finite coefficients.
    pub threshold: f64,
    pub compressible: bool,
    /// Infinite when not compressible.
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub l2_bound: Option<f64>,
    pub approx_bound: Option<f64>,
}

/// The compressibility threshold `f a gamma / (f a gamma + sqrt(2) b d)`.
pub fn compressibility_threshold(c: &NormConstants) -> f64 {
    let fag = c.f * c.a * c.gamma;
    fag / (fag + SQRT2 * c.b * c.d)
}

/// Denominator shared by all four coefficients; positive iff compressible.
fn denominator(c: &NormConstants, delta: f64) -> f64 {
    1.0 - (1.0 + SQRT2 * c.r * c.d / c.f) * delta
}

const DENOM_FLOOR: f64 = 1e-12;

/// Evaluate `D1..D4` at `delta_2k` in `[0, 1)`. Past the threshold the
/// coefficients are reported as `+inf` rather than huge floats.
pub fn bound_coefficients(c: &NormConstants, delta2k: f64) -> Result<BoundReport> {
    if !(0.0..1.0).contains(&delta2k) {
        return Err(Error::InvalidRange { name: "delta2k" });
    }
    let threshold = compressibility_threshold(c);
    let denom = denominator(c, delta2k);
    let compressible = delta2k < threshold && denom > DENOM_FLOOR;
    let (d1, d2, d3, d4) = if compressible {
        let root = (1.0 + delta2k).sqrt();
        (
            (c.r * (1.0 + c.gamma) / c.f) * (1.0 + (SQRT2 - 1.0) * delta2k) / denom,
            2.0 * (1.0 + c.r * c.d / c.f) * root / denom,
            c.r * (1.0 + c.gamma) * (1.0 + (SQRT2 * c.d / c.f - 1.0) * delta2k) / denom,
            2.0 * c.d * (1.0 + c.r) * root / denom,
        )
    } else {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY)
    };
    Ok(BoundReport {
        delta2k,
        threshold,
        compressible,
        d1,
        d2,
        d3,
        d4,
        l2_bound: None,
        approx_bound: None,
    })
}

/// `(D1 sigma + D2 eps, D3 sigma + D4 eps)`.
pub fn evaluate_bound(rep: &BoundReport, sigma: f64, eps: f64) -> Result<(f64, f64)> {
    if !rep.compressible {
        return Err(Error::NotCompressible);
    }
    if sigma < 0.0 {
        return Err(Error::InvalidRange { name: "sigma" });
    }
    if eps < 0.0 {
        return Err(Error::InvalidRange { name: "eps" });
    }
    Ok((rep.d1 * sigma + rep.d2 * eps, rep.d3 * sigma + rep.d4 * eps))
}

/// Report with the bound fields filled in.
pub fn report_with_bounds(mut rep: BoundReport, sigma: f64, eps: f64) -> Result<BoundReport> {
    let (l2, approx) = evaluate_bound(&rep, sigma, eps)?;
    rep.l2_bound = Some(l2);
    rep.approx_bound = Some(approx);
    Ok(rep)
}
