//! Bessel differential operators.
//!
//! `B_i = d^2/dx_i^2 + (2 v_i / x_i) d/dx_i`, `Delta_B = sum B_i`,
//! `Box_B = sum_{i<p} B_i - sum_{i>=p} B_i` and `Diamond_B = Box_B Delta_B`.
//!
//! An operator is held as a sum of products of signed linear factors
//! `sum_i s_i B_i`. Analytic mode expands it into a polynomial in the
//! commuting `B_i`, turns each `B_i^a` into `sum_{d,e} c x_i^{-e} d^d/dx_i^d`
//! and pairs that with the field's analytic partials. Finite-difference mode
//! applies the factors as nested central differences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PositivePoint, ScalarField};
use crate::kernels::SignatureSplit;
use crate::quadrature::WeightVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    BesselAxis(usize),
    LaplaceBessel,
    BoxBessel(SignatureSplit),
    DiamondBessel(SignatureSplit),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Differentiation {
    Analytic,
    /// Nested central differences; `h0` defaults to `1e-3 * min_i x_i`.
    FiniteDifference { h0: Option<f64> },
}

/// How the diamond operator is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiamondForm {
    /// `Box_B^k` applied to `Delta_B^k`
    Factored,
    /// `[(sum_{i<p} B_i)^2 - (sum_{i>=p} B_i)^2]^k`
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub k: usize,
    pub differentiation: Differentiation,
    pub diamond_form: DiamondForm,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, k: usize, differentiation: Differentiation) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain { context: "operator iterate", value: 0.0 });
        }
        Ok(Self { kind, k, differentiation, diamond_form: DiamondForm::Factored })
    }

    pub fn bracketed(mut self) -> Self {
        self.diamond_form = DiamondForm::Bracketed;
        self
    }

    /// Degree in the `B_i`.
    pub fn degree(&self) -> usize {
        match self.kind {
            OperatorKind::DiamondBessel(_) => 2 * self.k,
            _ => self.k,
        }
    }
}

/// `sum_i s_i B_i`.
type LinearFactor = Vec<f64>;

/// `sum_j c_j prod_l L_{j,l}`.
type FactorExpr = Vec<(f64, Vec<LinearFactor>)>;

fn factor_expr(spec: &OperatorSpec, n: usize) -> Result<FactorExpr> {
    let k = spec.k;
    let laplace = vec![1.0; n];
    let expr = match spec.kind {
        OperatorKind::BesselAxis(i) => {
            if i >= n {
                return Err(Error::DimensionMismatch { expected: n, got: i + 1 });
            }
            let mut f = vec![0.0; n];
            f[i] = 1.0;
            vec![(1.0, vec![f; k])]
        }
        OperatorKind::LaplaceBessel => vec![(1.0, vec![laplace; k])],
        OperatorKind::BoxBessel(split) => {
            split.check(n)?;
            vec![(1.0, vec![split.signs(); k])]
        }
        OperatorKind::DiamondBessel(split) => {
            split.check(n)?;
            match spec.diamond_form {
                DiamondForm::Factored => {
                    let mut factors = vec![split.signs(); k];
                    factors.extend(vec![laplace; k]);
                    vec![(1.0, factors)]
                }
                DiamondForm::Bracketed => {
                    let plus: LinearFactor = (0..n).map(|i| if i < split.p { 1.0 } else { 0.0 }).collect();
                    let minus: LinearFactor = (0..n).map(|i| if i < split.p { 0.0 } else { 1.0 }).collect();
                    // (P^2 - M^2)^k = sum_j binom(k, j) (-1)^j P^{2(k-j)} M^{2j}
                    (0..=k)
                        .map(|j| {
                            let c = binomial(k, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
                            let mut factors = vec![plus.clone(); 2 * (k - j)];
                            factors.extend(vec![minus.clone(); 2 * j]);
                            (c, factors)
                        })
                        .collect()
                }
            }
        }
    };
    Ok(expr)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Expand into `sum_alpha c_alpha prod_i B_i^{alpha_i}`.
fn expand(expr: &FactorExpr, n: usize) -> BTreeMap<Vec<usize>, f64> {
    let mut total: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (c, factors) in expr {
        let mut poly: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        poly.insert(vec![0; n], *c);
        for factor in factors {
            let mut next: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (mono, coef) in &poly {
                for (i, &s) in factor.iter().enumerate() {
                    if s == 0.0 {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[i] += 1;
                    *next.entry(m).or_insert(0.0) += coef * s;
                }
            }
            poly = next;
        }
        for (mono, coef) in poly {
            *total.entry(mono).or_insert(0.0) += coef;
        }
    }
    total.retain(|_, c| *c != 0.0);
    total
}

/// `B^a` in one variable as `sum (d, e) -> c x^{-e} d^d`, with `c = 2v`.
fn bessel_power_1d(a: usize, c: f64) -> BTreeMap<(usize, i32), f64> {
    let mut op: BTreeMap<(usize, i32), f64> = BTreeMap::new();
    op.insert((0, 0), 1.0);
    for _ in 0..a {
        let mut next: BTreeMap<(usize, i32), f64> = BTreeMap::new();
        for (&(d, e), &coef) in &op {
            let ef = e as f64;
            // B (x^{-e} D^d) = (e(e+1) - c e) x^{-e-2} D^d + (c - 2e) x^{-e-1} D^{d+1} + x^{-e} D^{d+2}
            let terms = [
                ((d, e + 2), ef * (ef + 1.0) - c * ef),
                ((d + 1, e + 1), c - 2.0 * ef),
                ((d + 2, e), 1.0),
            ];
            for (key, t) in terms {
                if t != 0.0 {
                    *next.entry(key).or_insert(0.0) += coef * t;
                }
            }
        }
        next.retain(|_, c| *c != 0.0);
        op = next;
    }
    op
}

fn apply_analytic(expr: &FactorExpr, f: &dyn ScalarField, x: &[f64], v: &WeightVector, degree: usize) -> Result<f64> {
    let n = x.len();
    if f.smoothness_order() < 2 * degree {
        return Err(Error::Capability(format!(
            "analytic mode needs partials of order {}; field provides {}",
            2 * degree,
            f.smoothness_order()
        )));
    }
    let poly = expand(expr, n);
    let mut per_axis_cache: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    let mut total = 0.0;
    for (mono, coef) in &poly {
        // per axis: list of (derivative order, coefficient at x_i)
        let axis_ops: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| {
                per_axis_cache
                    .entry((i, mono[i]))
                    .or_insert_with(|| {
                        let op = bessel_power_1d(mono[i], 2.0 * v.values()[i]);
                        let mut by_d: BTreeMap<usize, f64> = BTreeMap::new();
                        for (&(d, e), &c) in &op {
                            *by_d.entry(d).or_insert(0.0) += c * x[i].powi(-e);
                        }
                        by_d.into_iter().collect()
                    })
                    .clone()
            })
            .collect();
        // tensor product over axes
        let mut stack: Vec<(Vec<usize>, f64)> = vec![(Vec::with_capacity(n), *coef)];
        for ops in &axis_ops {
            let mut next = Vec::with_capacity(stack.len() * ops.len());
            for (idx, c) in &stack {
                for &(d, a) in ops {
                    let mut m = idx.clone();
                    m.push(d);
                    next.push((m, c * a));
                }
            }
            stack = next;
        }
        for (multi, c) in stack {
            let p = f.partial(&multi, x).ok_or_else(|| {
                Error::Capability(format!("field has no analytic partial {multi:?}"))
            })?;
            total += c * p;
        }
    }
    Ok(total)
}

/// Nested central differences: factor `level` (0 = innermost) uses `h0 2^level`.
fn apply_fd(expr: &FactorExpr, f: &dyn ScalarField, x: &[f64], v: &WeightVector, h0: f64) -> Result<f64> {
    let depth = expr.iter().map(|(_, fs)| fs.len()).max().unwrap_or(0);
    let reach: f64 = (0..depth).map(|l| h0 * 2f64.powi(l as i32)).sum();
    if x.iter().any(|&xi| xi <= reach) {
        return Err(Error::Domain { context: "finite-difference stencil leaves the orthant", value: reach });
    }
    let mut total = 0.0;
    for (c, factors) in expr {
        total += c * nested(factors, f, x, v, h0);
    }
    Ok(total)
}

fn nested(factors: &[LinearFactor], f: &dyn ScalarField, x: &[f64], v: &WeightVector, h0: f64) -> f64 {
    let Some((outer, inner)) = factors.split_first() else {
        return f.eval(x);
    };
    let level = inner.len();
    let h = h0 * 2f64.powi(level as i32);
    let mut point = x.to_vec();
    let center = nested(inner, f, x, v, h0);
    let mut acc = 0.0;
    for (i, &s) in outer.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        point[i] = x[i] + h;
        let plus = nested(inner, f, &point, v, h0);
        point[i] = x[i] - h;
        let minus = nested(inner, f, &point, v, h0);
        point[i] = x[i];
        let d2 = (plus - 2.0 * center + minus) / (h * h);
        let d1 = (plus - minus) / (2.0 * h);
        acc += s * (d2 + 2.0 * v.values()[i] / x[i] * d1);
    }
    acc
}

/// `B_{x_i} f` at `x`.
pub fn apply_bessel_axis(f: &dyn ScalarField, axis: usize, x: &PositivePoint, v: &WeightVector, mode: Differentiation) -> Result<f64> {
    let spec = OperatorSpec::new(OperatorKind::BesselAxis(axis), 1, mode)?;
    apply_operator(&spec, f, x, v)
}

/// Iterated operator at `x`.
pub fn apply_operator(spec: &OperatorSpec, f: &dyn ScalarField, x: &PositivePoint, v: &WeightVector) -> Result<f64> {
    v.check_dim(x.dim())?;
    let expr = factor_expr(spec, x.dim())?;
    match spec.differentiation {
        Differentiation::Analytic => apply_analytic(&expr, f, x.coords(), v, spec.degree()),
        Differentiation::FiniteDifference { h0 } => {
            if spec.k > 2 {
                return Err(Error::Capability("finite differences support iterates k <= 2".into()));
            }
            let min_x = x.coords().iter().copied().fold(f64::INFINITY, f64::min);
            let h0 = h0.unwrap_or(1e-3 * min_x);
            apply_fd(&expr, f, x.coords(), v, h0)
        }
    }
}

/// The operator as a field, for pairing in quadrature.
pub struct Applied<'a> {
    pub spec: OperatorSpec,
    pub f: &'a dyn ScalarField,
    pub v: &'a WeightVector,
}

impl ScalarField for Applied<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        match PositivePoint::new(x.to_vec()) {
            Ok(p) => apply_operator(&self.spec, self.f, &p, self.v).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    }

    fn decay_class(&self) -> crate::field::DecayClass {
        self.f.decay_class()
    }
}
