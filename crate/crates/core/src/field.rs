//! Scalar fields on the positive orthant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::WeightVector;
use crate::specfun::{ln_gamma_unchecked, normalized_j_derivative, normalized_j_order};

/// A point with strictly positive coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivePoint(Vec<f64>);

impl PositivePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Config("point must have at least one coordinate".into()));
        }
        for &c in &coords {
            if !c.is_finite() || c <= 0.0 {
                return Err(Error::Domain { context: "positive point coordinate", value: c });
            }
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|c| c * lambda).collect())
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayClass {
    RapidlyDecaying,
    PolynomialGrowth,
    CompactSupport,
    SingularAtOrigin,
}

/// An evaluable function on the open orthant.
pub trait ScalarField {
    fn eval(&self, x: &[f64]) -> f64;

    fn decay_class(&self) -> DecayClass;

    /// Highest derivative order for which `partial` returns values.
    fn smoothness_order(&self) -> usize {
        0
    }

    /// Mixed partial `d^{|alpha|} f / dx^alpha` when available analytically.
    fn partial(&self, _multi_index: &[usize], _x: &[f64]) -> Option<f64> {
        None
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn decay_class(&self) -> DecayClass {
        (**self).decay_class()
    }
    fn smoothness_order(&self) -> usize {
        (**self).smoothness_order()
    }
    fn partial(&self, multi_index: &[usize], x: &[f64]) -> Option<f64> {
        (**self).partial(multi_index, x)
    }
}

/// Closure-backed field without analytic partials.
pub struct FnField<F> {
    f: F,
    class: DecayClass,
}

impl<F: Fn(&[f64]) -> f64> FnField<F> {
    pub fn new(f: F, class: DecayClass) -> Self {
        Self { f, class }
    }

    pub fn rapid(f: F) -> Self {
        Self::new(f, DecayClass::RapidlyDecaying)
    }
}

impl<F: Fn(&[f64]) -> f64> ScalarField for FnField<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn decay_class(&self) -> DecayClass {
        self.class
    }
}

/// One term `coef * prod_i y_i^{2 m_i} exp(-a_i y_i^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussTerm {
    pub coef: f64,
    pub powers: Vec<u32>,
    pub rates: Vec<f64>,
}

/// Finite sums of even monomials times anisotropic Gaussians.
///
/// The class is closed under every `B_{x_i}` (applied exactly), which makes it
/// the test-function family for weak-form checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPoly {
    dim: usize,
    terms: Vec<GaussTerm>,
}

impl GaussPoly {
    pub fn new(dim: usize, terms: Vec<GaussTerm>) -> Result<Self> {
        for t in &terms {
            if t.powers.len() != dim || t.rates.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: t.powers.len().max(t.rates.len()) });
            }
            if t.rates.iter().any(|&a| !(a > 0.0)) {
                return Err(Error::Config("Gaussian rates must be positive".into()));
            }
        }
        Ok(Self { dim, terms })
    }

    /// `exp(-a |y|^2)`.
    pub fn gaussian(dim: usize, a: f64) -> Result<Self> {
        Self::new(dim, vec![GaussTerm { coef: 1.0, powers: vec![0; dim], rates: vec![a; dim] }])
    }

    /// `exp(-sum a_i y_i^2)`.
    pub fn anisotropic(rates: Vec<f64>) -> Result<Self> {
        let dim = rates.len();
        Self::new(dim, vec![GaussTerm { coef: 1.0, powers: vec![0; dim], rates }])
    }

    /// Narrow Gaussian `exp(-|y|^2 / w^2)` normalized to unit weighted mass.
    pub fn delta_surrogate(v: &WeightVector, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Domain { context: "bump width", value: width });
        }
        let a = 1.0 / (width * width);
        let g = Self::gaussian(v.dim(), a)?;
        let mass = g.weighted_mass(v);
        Ok(g.scale(1.0 / mass))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GaussTerm] {
        &self.terms
    }

    pub fn scale(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    pub fn add(mut self, other: GaussPoly) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        self.terms.extend(other.terms);
        Ok(self.simplified())
    }

    /// `f(y / s)`: stretches the field by `s`.
    pub fn rescaled(&self, s: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let factor: f64 = t.powers.iter().map(|&m| s.powi(-2 * m as i32)).product();
                GaussTerm {
                    coef: t.coef * factor,
                    powers: t.powers.clone(),
                    rates: t.rates.iter().map(|a| a / (s * s)).collect(),
                }
            })
            .collect();
        Self { dim: self.dim, terms }
    }

    /// `int f(y) prod y_i^{2 v_i} dy` in closed form.
    pub fn weighted_mass(&self, v: &WeightVector) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coef
                    * t.powers
                        .iter()
                        .zip(&t.rates)
                        .zip(v.values())
                        .map(|((&m, &a), &vi)| {
                            // int_0^inf y^{2m+2v} e^{-a y^2} dy = Gamma(m+v+1/2) / (2 a^{m+v+1/2})
                            let s = m as f64 + vi + 0.5;
                            0.5 * (ln_gamma_unchecked(s) - s * a.ln()).exp()
                        })
                        .product::<f64>()
            })
            .sum()
    }

    pub fn value_at_origin(&self) -> f64 {
        self.terms.iter().filter(|t| t.powers.iter().all(|&m| m == 0)).map(|t| t.coef).sum()
    }

    /// `B_{x_i}` applied exactly.
    pub fn apply_bessel(&self, axis: usize, v: &WeightVector) -> Result<Self> {
        v.check_dim(self.dim)?;
        if axis >= self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: axis + 1 });
        }
        let vi = v.values()[axis];
        let mut out = Vec::with_capacity(3 * self.terms.len());
        for t in &self.terms {
            let m = t.powers[axis];
            let a = t.rates[axis];
            let mf = m as f64;
            let mut push = |c: f64, power: u32| {
                if c != 0.0 {
                    let mut powers = t.powers.clone();
                    powers[axis] = power;
                    out.push(GaussTerm { coef: t.coef * c, powers, rates: t.rates.clone() });
                }
            };
            if m > 0 {
                push(2.0 * mf * (2.0 * mf - 1.0 + 2.0 * vi), m - 1);
            }
            push(-2.0 * a * (4.0 * mf + 1.0 + 2.0 * vi), m);
            push(4.0 * a * a, m + 1);
        }
        Ok(Self { dim: self.dim, terms: out }.simplified())
    }

    /// `sum_i s_i B_{x_i}` with signs `s_i`.
    pub fn apply_signed_sum(&self, signs: &[f64], v: &WeightVector) -> Result<Self> {
        if signs.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: signs.len() });
        }
        let mut terms = Vec::new();
        for (i, &s) in signs.iter().enumerate() {
            if s != 0.0 {
                terms.extend(self.apply_bessel(i, v)?.scale(s).terms);
            }
        }
        Ok(Self { dim: self.dim, terms }.simplified())
    }

    /// Merge terms with equal powers and rates; drop zeros.
    fn simplified(self) -> Self {
        let mut merged: Vec<GaussTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            if let Some(slot) = merged.iter_mut().find(|s| s.powers == t.powers && s.rates == t.rates) {
                slot.coef += t.coef;
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.coef != 0.0);
        Self { dim: self.dim, terms: merged }
    }
}

/// `d^k/dy^k [y^{2m} exp(-a y^2)]`.
fn axis_derivative(m: u32, a: f64, order: usize, y: f64) -> f64 {
    // polynomial coefficients in y, times exp(-a y^2)
    let mut poly = vec![0.0; 2 * m as usize + 1];
    poly[2 * m as usize] = 1.0;
    for _ in 0..order {
        let mut next = vec![0.0; poly.len() + 1];
        for (p, &c) in poly.iter().enumerate() {
            if p > 0 {
                next[p - 1] += c * p as f64;
            }
            next[p + 1] -= 2.0 * a * c;
        }
        poly = next;
    }
    let value = poly.iter().rev().fold(0.0, |acc, &c| acc * y + c);
    value * (-a * y * y).exp()
}

impl ScalarField for GaussPoly {
    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut prod = t.coef;
                let mut expo = 0.0;
                for ((&m, &a), &y) in t.powers.iter().zip(&t.rates).zip(x) {
                    prod *= (y * y).powi(m as i32);
                    expo -= a * y * y;
                }
                prod * expo.exp()
            })
            .sum()
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::RapidlyDecaying
    }

    fn smoothness_order(&self) -> usize {
        usize::MAX
    }

    fn partial(&self, multi_index: &[usize], x: &[f64]) -> Option<f64> {
        if multi_index.len() != self.dim || x.len() != self.dim {
            return None;
        }
        Some(
            self.terms
                .iter()
                .map(|t| {
                    t.coef
                        * (0..self.dim)
                            .map(|i| axis_derivative(t.powers[i], t.rates[i], multi_index[i], x[i]))
                            .product::<f64>()
                })
                .sum(),
        )
    }
}

/// The Bessel plane wave `prod_i j_{v_i - 1/2}(x_i y_i)` at a fixed frequency `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave {
    orders: Vec<f64>,
    frequency: Vec<f64>,
}

impl PlaneWave {
    pub fn new(v: &WeightVector, frequency: Vec<f64>) -> Result<Self> {
        v.check_dim(frequency.len())?;
        let orders = v
            .values()
            .iter()
            .map(|&vi| crate::specfun::BesselOrder::from_weight(vi).map(|o| o.mu()))
            .collect::<Result<_>>()?;
        if frequency.iter().any(|&y| !y.is_finite() || y < 0.0) {
            return Err(Error::Config("plane-wave frequencies must be finite and >= 0".into()));
        }
        Ok(Self { orders, frequency })
    }

    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }
}

impl ScalarField for PlaneWave {
    fn eval(&self, x: &[f64]) -> f64 {
        self.orders
            .iter()
            .zip(&self.frequency)
            .zip(x)
            .map(|((&mu, &y), &xi)| normalized_j_order(mu, xi * y))
            .product()
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::PolynomialGrowth
    }

    fn smoothness_order(&self) -> usize {
        usize::MAX
    }

    fn partial(&self, multi_index: &[usize], x: &[f64]) -> Option<f64> {
        if multi_index.len() != self.orders.len() || x.len() != self.orders.len() {
            return None;
        }
        Some(
            (0..self.orders.len())
                .map(|i| {
                    let y = self.frequency[i];
                    let k = multi_index[i];
                    y.powi(k as i32) * normalized_j_derivative(self.orders[i], x[i] * y, k)
                })
                .product(),
        )
    }
}

/// `|y|^{-alpha}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawField {
    pub alpha: f64,
}

impl ScalarField for PowerLawField {
    fn eval(&self, x: &[f64]) -> f64 {
        norm(x).powf(-self.alpha)
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::PolynomialGrowth
    }
}

/// Off-centre bump `exp(-|y - c|^2 / w^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl ScalarField for Bump {
    fn eval(&self, x: &[f64]) -> f64 {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        (-d2 / (self.width * self.width)).exp()
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::RapidlyDecaying
    }
}

/// Largest relative mismatch between analytic first/second partials and
/// central differences over `points`; fails if it exceeds `tol`.
pub fn check_partials(f: &dyn ScalarField, points: &[Vec<f64>], tol: f64) -> Result<f64> {
    if f.smoothness_order() == 0 {
        return Err(Error::Capability("field exposes no analytic partials".into()));
    }
    let mut worst = 0.0f64;
    for x in points {
        let n = x.len();
        for i in 0..n {
            let h = 1e-4 * x[i].abs().max(1e-2);
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[i] += h;
            minus[i] -= h;
            let fp = f.eval(&plus);
            let fm = f.eval(&minus);
            let f0 = f.eval(x);
            let mut e1 = vec![0; n];
            e1[i] = 1;
            let mut e2 = vec![0; n];
            e2[i] = 2;
            let checks = [
                (f.partial(&e1, x), (fp - fm) / (2.0 * h)),
                (f.partial(&e2, x), (fp - 2.0 * f0 + fm) / (h * h)),
            ];
            for (analytic, fd) in checks {
                let Some(a) = analytic else {
                    return Err(Error::Capability("missing analytic partial".into()));
                };
                let rel = (a - fd).abs() / (1.0 + a.abs());
                worst = worst.max(rel);
            }
        }
    }
    if worst > tol {
        return Err(Error::Precondition(format!("analytic partials disagree with finite differences: {worst:e}")));
    }
    Ok(worst)
}
