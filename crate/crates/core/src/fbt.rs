//! Fourier–Bessel transform
//! `F_B f(x) = C_v int f(y) prod j_{v_i-1/2}(x_i y_i) y_i^{2 v_i} dy`.
//!
//! With `C_v = prod (2^{v_i-1/2} Gamma(v_i+1/2))^{-1}` the transform is its own
//! inverse on the orthant, and `F_B exp(-t|y|^2) = (2t)^{-N/2} exp(-|x|^2/(4t))`
//! where `N = n + 2|v|`.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactConst;
use crate::field::{FnField, PositivePoint, ScalarField};
use crate::quadrature::{integrate_orthant, rational_from_f64, QuadSpec, WeightVector};
use crate::shiftconv::Convolution;
use crate::specfun::{ln_gamma_unchecked, normalized_j_order};

/// The normalization `C_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformConstant {
    pub value: f64,
    pub exact: ExactConst,
}

impl TransformConstant {
    pub fn new(v: &WeightVector) -> Result<Self> {
        Ok(Self { value: transform_constant(v), exact: transform_constant_exact(v)? })
    }
}

pub fn transform_constant(v: &WeightVector) -> f64 {
    v.values()
        .iter()
        .map(|&vi| (-(vi - 0.5) * std::f64::consts::LN_2 - ln_gamma_unchecked(vi + 0.5)).exp())
        .product()
}

pub fn transform_constant_exact(v: &WeightVector) -> Result<ExactConst> {
    let half = Rational64::new(1, 2);
    let mut c = ExactConst::one();
    for &vi in v.exact()? {
        c = c * ExactConst::pow2(half - vi) * ExactConst::gamma_pow(vi + half, -1)?;
    }
    Ok(c)
}

/// The variant without the Gamma factor, `prod (2^{v_i-1/2} (v_i+1/2))^{-1}`.
pub fn transform_constant_printed(v: &WeightVector) -> f64 {
    v.values().iter().map(|&vi| 1.0 / (2f64.powf(vi - 0.5) * (vi + 0.5))).product()
}

/// Numerical transform at `x` through [`integrate_orthant`].
pub fn fb_numeric(f: &dyn ScalarField, x: &PositivePoint, v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    v.check_dim(x.dim())?;
    fb_numeric_raw(f, x.coords(), v, spec)
}

pub(crate) fn fb_numeric_raw(f: &dyn ScalarField, x: &[f64], v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    let orders: Vec<f64> = v.values().iter().map(|vi| vi - 0.5).collect();
    if let Some(&bad) = v.values().iter().find(|&&vi| vi < 0.5) {
        return Err(Error::UnsupportedOrder(bad));
    }
    let integrand = FnField::new(
        |y: &[f64]| {
            let mut kernel = 1.0;
            for i in 0..y.len() {
                kernel *= normalized_j_order(orders[i], x[i] * y[i]);
            }
            f.eval(y) * kernel
        },
        f.decay_class(),
    );
    Ok(transform_constant(v) * integrate_orthant(&integrand, v, spec)?.value)
}

/// The transform is an involution on even profiles, so inversion re-applies it.
pub fn fb_inverse_numeric(f: &dyn ScalarField, x: &PositivePoint, v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    fb_numeric(f, x, v, spec)
}

/// Transform of a field, itself evaluated by quadrature at each point.
pub struct Transformed<'a> {
    pub f: &'a dyn ScalarField,
    pub v: &'a WeightVector,
    pub spec: QuadSpec,
}

impl ScalarField for Transformed<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        fb_numeric_raw(self.f, x, self.v, &self.spec).unwrap_or(f64::NAN)
    }

    fn decay_class(&self) -> crate::field::DecayClass {
        crate::field::DecayClass::RapidlyDecaying
    }
}

/// Radial power law `coefficient * |x|^exponent`.
///
/// `coefficient` is `None` when a Gamma argument sits on a pole; `degenerate`
/// names that argument.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLaw {
    pub coefficient: Option<ExactConst>,
    pub exponent: Rational64,
    pub degenerate: Option<String>,
}

impl PowerLaw {
    pub fn new(coefficient: ExactConst, exponent: Rational64) -> Self {
        Self { coefficient: Some(coefficient), exponent, degenerate: None }
    }

    fn degenerate(argument: String, exponent: Rational64) -> Self {
        Self { coefficient: None, exponent, degenerate: Some(argument) }
    }

    pub fn coefficient_f64(&self) -> Result<f64> {
        match &self.coefficient {
            Some(c) => Ok(c.to_f64()),
            None => Err(Error::Degenerate { argument: self.degenerate.clone().unwrap_or_default() }),
        }
    }

    pub fn exponent_f64(&self) -> f64 {
        self.exponent.to_f64().unwrap_or(f64::NAN)
    }

    pub fn eval(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::Singular(format!("power law evaluated at |x| = {radius}")));
        }
        Ok(self.coefficient_f64()? * radius.powf(self.exponent_f64()))
    }

    pub fn mul(&self, other: &PowerLaw) -> PowerLaw {
        match (&self.coefficient, &other.coefficient) {
            (Some(a), Some(b)) => PowerLaw::new(a.clone() * b.clone(), self.exponent + other.exponent),
            _ => PowerLaw::degenerate(
                self.degenerate.clone().or_else(|| other.degenerate.clone()).unwrap_or_default(),
                self.exponent + other.exponent,
            ),
        }
    }

    pub fn scale(&self, c: &ExactConst) -> PowerLaw {
        match &self.coefficient {
            Some(a) => PowerLaw::new(a.clone() * c.clone(), self.exponent),
            None => self.clone(),
        }
    }
}

/// Serializable summary of a power law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawSummary {
    pub coefficient: Option<f64>,
    pub coefficient_exact: Option<String>,
    pub exponent: String,
    pub degenerate: Option<String>,
}

impl From<&PowerLaw> for PowerLawSummary {
    fn from(p: &PowerLaw) -> Self {
        Self {
            coefficient: p.coefficient.as_ref().map(ExactConst::to_f64),
            coefficient_exact: p.coefficient.as_ref().map(|c| c.to_string()),
            exponent: p.exponent.to_string(),
            degenerate: p.degenerate.clone(),
        }
    }
}

/// `F_B |y|^{-alpha} = 2^{N/2 - alpha} Gamma((N - alpha)/2) / Gamma(alpha/2) |x|^{alpha - N}`.
///
/// The coefficient follows from `|y|^{-alpha} = Gamma(alpha/2)^{-1} int t^{alpha/2-1} exp(-t|y|^2) dt`
/// and the Gaussian transform; see [`fb_powerlaw_printed`] for the form with
/// `2^{N - 2 alpha}`, which agrees only when `N = 2 alpha`.
pub fn fb_powerlaw(alpha: f64, n: usize, v: &WeightVector) -> Result<PowerLaw> {
    let a = rational_from_f64(alpha)?;
    fb_powerlaw_exact(a, n, v)
}

pub fn fb_powerlaw_exact(alpha: Rational64, n: usize, v: &WeightVector) -> Result<PowerLaw> {
    v.check_dim(n)?;
    let big_n = v.exact_homogeneous_dim()?;
    let half = Rational64::new(1, 2);
    powerlaw_with_power_of_two(alpha, big_n * half - alpha, big_n)
}

/// Variant with coefficient `2^{N - 2 alpha} Gamma((N - alpha)/2) / Gamma(alpha/2)`.
pub fn fb_powerlaw_printed(alpha: f64, n: usize, v: &WeightVector) -> Result<PowerLaw> {
    let a = rational_from_f64(alpha)?;
    v.check_dim(n)?;
    let big_n = v.exact_homogeneous_dim()?;
    powerlaw_with_power_of_two(a, big_n - a * 2, big_n)
}

fn powerlaw_with_power_of_two(alpha: Rational64, two: Rational64, big_n: Rational64) -> Result<PowerLaw> {
    let half = Rational64::new(1, 2);
    let exponent = alpha - big_n;
    let top = (big_n - alpha) * half;
    let bottom = alpha * half;
    let coef = ExactConst::gamma(top)
        .and_then(|g| Ok(g * ExactConst::gamma_pow(bottom, -1)?))
        .map(|g| g * ExactConst::pow2(two));
    match coef {
        Ok(c) => Ok(PowerLaw::new(c, exponent)),
        Err(Error::Degenerate { argument }) => Ok(PowerLaw::degenerate(argument, exponent)),
        Err(e) => Err(e),
    }
}

/// Both sides of the convolution identity at `x`: `(F_B(f*g)(x), F_B f(x) * F_B g(x))`.
///
/// `outer` drives the transform and convolution integrals over the orthant,
/// `inner` the angular shift integrals.
pub fn fb_conv_check(
    f: &dyn ScalarField,
    g: &dyn ScalarField,
    x: &PositivePoint,
    v: &WeightVector,
    outer: &QuadSpec,
    inner: &QuadSpec,
) -> Result<(f64, f64)> {
    v.check_dim(x.dim())?;
    let conv = Convolution { f, g, v, outer: outer.clone(), inner: inner.clone() };
    let lhs = fb_numeric(&conv, x, v, outer)?;
    let rhs = fb_numeric(f, x, v, outer)? * fb_numeric(g, x, v, outer)?;
    if !lhs.is_finite() {
        return Err(Error::Precondition("convolution integrand produced a non-finite value".into()));
    }
    Ok((lhs, rhs))
}

/// `F_B exp(-t|y|^2)` at `x`.
pub fn gaussian_transform(t: f64, x: &[f64], v: &WeightVector) -> f64 {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    (2.0 * t).powf(-0.5 * v.homogeneous_dim()) * (-r2 / (4.0 * t)).exp()
}

/// Inverse images compose back: checks `F_B F_B |y|^{-alpha} = |y|^{-alpha}`
/// on the symbolic level and returns the product of coefficients (exactly 1).
pub fn powerlaw_round_trip(alpha: Rational64, n: usize, v: &WeightVector) -> Result<(PowerLaw, PowerLaw, Option<ExactConst>)> {
    let first = fb_powerlaw_exact(alpha, n, v)?;
    let dual = -first.exponent;
    let second = fb_powerlaw_exact(dual, n, v)?;
    let product = match (&first.coefficient, &second.coefficient) {
        (Some(a), Some(b)) => Some(a.clone() * b.clone()),
        _ => None,
    };
    Ok((first, second, product))
}

pub fn is_exact_one(c: &ExactConst) -> bool {
    *c == ExactConst::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussPoly;
    use approx::assert_relative_eq;

    fn w(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn constant_examples() {
        assert_relative_eq!(transform_constant(&w(&[0.5])), 1.0, max_relative = 1e-15);
        let v1 = w(&[1.0]);
        assert_relative_eq!(transform_constant(&v1), (2.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(transform_constant_exact(&v1).unwrap().to_f64(), transform_constant(&v1), max_relative = 1e-14);
        assert_relative_eq!(transform_constant_printed(&w(&[0.5])), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn powerlaw_examples() {
        let p = fb_powerlaw(1.0, 1, &w(&[0.5])).unwrap();
        assert_eq!(p.coefficient, Some(ExactConst::one()));
        assert_eq!(p.exponent, Rational64::from_integer(-1));
        let p2 = fb_powerlaw(2.0, 2, &w(&[0.5, 0.5])).unwrap();
        assert_eq!(p2.coefficient, Some(ExactConst::one()));
        assert_eq!(p2.exponent, Rational64::from_integer(-2));
        // alpha = N - 2 gives exponent -2 for any n
        let v3 = w(&[0.5, 1.0, 1.5]);
        let e = fb_powerlaw(v3.homogeneous_dim() - 2.0, 3, &v3).unwrap();
        assert_eq!(e.exponent, Rational64::from_integer(-2));
    }

    #[test]
    fn printed_and_derived_agree_only_when_n_is_twice_alpha() {
        let v = w(&[0.5]);
        let a = fb_powerlaw(1.0, 1, &v).unwrap();
        let b = fb_powerlaw_printed(1.0, 1, &v).unwrap();
        assert_eq!(a, b);
        let a = fb_powerlaw(1.5, 1, &v).unwrap().coefficient_f64().unwrap();
        let b = fb_powerlaw_printed(1.5, 1, &v).unwrap().coefficient_f64().unwrap();
        assert_relative_eq!(b / a, 2f64.powf(-0.5), max_relative = 1e-14);
    }

    #[test]
    fn poles_flag_degenerate() {
        let v = w(&[0.5]);
        let p = fb_powerlaw(2.0, 1, &v).unwrap();
        assert!(p.coefficient.is_none());
        assert_eq!(p.degenerate.as_deref(), Some("0"));
        assert!(p.eval(1.0).is_err());
        let q = fb_powerlaw(-2.0, 1, &v).unwrap();
        assert_eq!(q.degenerate.as_deref(), Some("-1"));
    }

    #[test]
    fn round_trip_is_exact() {
        for (alpha, v) in [(Rational64::new(6, 5), w(&[0.5])), (Rational64::new(3, 2), w(&[0.6, 1.5]))] {
            let n = v.dim();
            let (first, second, product) = powerlaw_round_trip(alpha, n, &v).unwrap();
            assert_eq!(second.exponent, -alpha);
            assert_eq!(first.exponent, alpha - v.exact_homogeneous_dim().unwrap());
            assert!(is_exact_one(&product.unwrap()));
        }
    }

    #[test]
    fn gaussian_transform_matches_quadrature() {
        let spec = QuadSpec::default();
        for v in [w(&[0.5]), w(&[1.0]), w(&[0.7, 1.3])] {
            let n = v.dim();
            let g = GaussPoly::gaussian(n, 0.8).unwrap();
            for x in [0.3, 1.0, 2.2] {
                let p = PositivePoint::new(vec![x; n]).unwrap();
                let got = fb_numeric(&g, &p, &v, &spec).unwrap();
                assert_relative_eq!(got, gaussian_transform(0.8, p.coords(), &v), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn unsupported_order_in_transform() {
        let v = w(&[0.3]);
        let g = GaussPoly::gaussian(1, 1.0).unwrap();
        let p = PositivePoint::new(vec![1.0]).unwrap();
        assert_eq!(fb_numeric(&g, &p, &v, &QuadSpec::default()), Err(Error::UnsupportedOrder(0.3)));
    }
}
