//! Generalized shift `T_x^y` and the B-convolution.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{FnField, PositivePoint, ScalarField};
use crate::quadrature::{integrate_angular_cos, integrate_orthant, QuadSpec, WeightVector};
use crate::specfun::ln_gamma_unchecked;

/// `C_v* = prod Gamma(v_i + 1/2) / (Gamma(1/2) Gamma(v_i))`, which makes `T 1 = 1`.
pub fn shift_constant(v: &WeightVector) -> f64 {
    v.values()
        .iter()
        .map(|&vi| (ln_gamma_unchecked(vi + 0.5) - 0.5 * PI.ln() - ln_gamma_unchecked(vi)).exp())
        .product()
}

/// The variant with `Gamma(v_i + 1)` in the numerator, kept for comparison.
pub fn shift_constant_printed(v: &WeightVector) -> f64 {
    v.values()
        .iter()
        .map(|&vi| (ln_gamma_unchecked(vi + 1.0) - 0.5 * PI.ln() - ln_gamma_unchecked(vi)).exp())
        .product()
}

/// `(T_x^y f)(x) = C_v* int_{[0,pi]^n} f(sqrt(x_i^2 + y_i^2 - 2 x_i y_i cos theta_i)) prod sin^{2v_i-1} theta_i`.
pub fn shift(f: &dyn ScalarField, x: &PositivePoint, y: &PositivePoint, v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    v.check_dim(x.dim())?;
    v.check_dim(y.dim())?;
    shift_raw(f, x.coords(), y.coords(), v, spec)
}

/// Shift on raw coordinates (callers have checked dimensions).
pub(crate) fn shift_raw(f: &dyn ScalarField, x: &[f64], y: &[f64], v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    if v.dim() > 3 {
        return Err(Error::UnsupportedDimension(v.dim()));
    }
    let n = v.dim();
    let integral = integrate_angular_cos(
        |t| {
            let mut z = [0.0; 3];
            for i in 0..n {
                let r2 = x[i] * x[i] + y[i] * y[i] - 2.0 * x[i] * y[i] * t[i];
                z[i] = r2.max(0.0).sqrt();
            }
            f.eval(&z[..n])
        },
        v,
        spec,
    )?;
    Ok(shift_constant(v) * integral)
}

/// `(f * g)(x) = int f(y) (T_x^y g)(x) prod y_i^{2 v_i} dy`.
///
/// Quadrature over `y` follows the decay class of `f`; shift integrals use
/// the angular order of `inner`.
pub fn bconvolve(
    f: &dyn ScalarField,
    g: &dyn ScalarField,
    x: &PositivePoint,
    v: &WeightVector,
    outer: &QuadSpec,
    inner: &QuadSpec,
) -> Result<f64> {
    v.check_dim(x.dim())?;
    bconvolve_raw(f, g, x.coords(), v, outer, inner)
}

pub(crate) fn bconvolve_raw(
    f: &dyn ScalarField,
    g: &dyn ScalarField,
    x: &[f64],
    v: &WeightVector,
    outer: &QuadSpec,
    inner: &QuadSpec,
) -> Result<f64> {
    if v.dim() > 3 {
        return Err(Error::UnsupportedDimension(v.dim()));
    }
    inner.validate()?;
    let integrand = FnField::new(
        |y: &[f64]| {
            let fy = f.eval(y);
            if fy == 0.0 {
                return 0.0;
            }
            // dimensions and budget were validated above, so the shift cannot fail
            let s = shift_raw(g, x, y, v, inner).unwrap_or(f64::NAN);
            fy * s
        },
        f.decay_class(),
    );
    Ok(integrate_orthant(&integrand, v, outer)?.value)
}

/// A B-convolution `x -> (f * g)(x)` packaged as a field.
pub struct Convolution<'a> {
    pub f: &'a dyn ScalarField,
    pub g: &'a dyn ScalarField,
    pub v: &'a WeightVector,
    pub outer: QuadSpec,
    pub inner: QuadSpec,
}

impl ScalarField for Convolution<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        bconvolve_raw(self.f, self.g, x, self.v, &self.outer, &self.inner).unwrap_or(f64::NAN)
    }

    fn decay_class(&self) -> crate::field::DecayClass {
        self.f.decay_class()
    }
}
