//! Deterministic quadrature.
//!
//! * Gauss–Jacobi rules on `[-1, 1]` (Gauss–Legendre is the `alpha = beta = 0`
//!   case), computed by Sturm-sequence bisection on the Jacobi matrix.
//! * Angular tensor integrals `int_{[0,pi]^n} f(theta) prod sin^{2v_i-1}(theta_i)`,
//!   evaluated with the Gegenbauer rule in `t = cos(theta)` so that the endpoint
//!   behaviour of the weight is integrated exactly.
//! * Orthant integrals `int_{R_+^n} f(y) prod y_i^{2 v_i} dy` on composite,
//!   optionally geometrically graded panels; slowly decaying integrands are
//!   Abel-damped with `exp(-eps * sum y_i)` and extrapolated to `eps -> 0`.
//! * A radial/angular variant for integrands that are singular at the origin.
//!
//! Every sum is reduced pairwise in ascending node order, axis by axis, so the
//! result does not depend on scheduling.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DecayClass, ScalarField};
use crate::specfun::ln_gamma_unchecked;

/// Bessel weights `v = (v_1, ..., v_n)`, each positive, with `|v| = sum v_i`.
///
/// Weights that are small rationals are also kept exactly, for constant algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
    exact: Option<Vec<Rational64>>,
    total: f64,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("weight vector must have n >= 1 entries".into()));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::Domain { context: "weight vector", value: bad });
        }
        let exact = values.iter().map(|&v| rational_from_f64(v)).collect::<Result<Vec<_>>>().ok();
        let total = values.iter().sum();
        Ok(Self { values, exact, total })
    }

    pub fn from_rationals(exact: Vec<Rational64>) -> Result<Self> {
        let values = exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
        let mut w = Self::new(values)?;
        w.exact = Some(exact);
        Ok(w)
    }

    /// `n` copies of the same weight.
    pub fn uniform(n: usize, v: f64) -> Result<Self> {
        Self::new(vec![v; n])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weights as rationals; `None` unless every weight is a small rational.
    pub fn exact(&self) -> Result<&[Rational64]> {
        self.exact.as_deref().ok_or_else(|| {
            Error::Precondition(format!("exact arithmetic needs rational weights (denominator <= 1e6), got {:?}", self.values))
        })
    }

    /// `|v| = v_1 + ... + v_n`
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn exact_total(&self) -> Result<Rational64> {
        Ok(self.exact()?.iter().copied().fold(Rational64::from_integer(0), |a, b| a + b))
    }

    /// The homogeneous dimension `n + 2|v|`.
    pub fn homogeneous_dim(&self) -> f64 {
        self.dim() as f64 + 2.0 * self.total
    }

    pub fn exact_homogeneous_dim(&self) -> Result<Rational64> {
        Ok(Rational64::from_integer(self.dim() as i64) + self.exact_total()? * 2)
    }

    pub fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// Recover a small rational from a decimal-like float (0.6 -> 3/5).
pub fn rational_from_f64(v: f64) -> Result<Rational64> {
    let r = Rational64::approximate_float(v)
        .ok_or(Error::Domain { context: "rational conversion", value: v })?;
    if r.to_f64() != Some(v) || *r.denom() > 1_000_000 {
        return Err(Error::Domain { context: "rational conversion", value: v });
    }
    Ok(r)
}

/// Quadrature budget.
///
/// `nodes_per_axis` is the order of the angular rule and the Gauss–Legendre
/// order of each panel on the half line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    pub nodes_per_axis: usize,
    pub truncation_radius: f64,
    pub panel_width: f64,
    /// Geometric refinement levels towards the origin, applied to fields
    /// tagged singular-at-origin.
    pub grading_levels: usize,
    /// Abel damping exponents, strictly decreasing; used for fields tagged
    /// polynomial-growth.
    pub regularization_schedule: Vec<f64>,
    pub extrapolation_order: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            nodes_per_axis: 32,
            truncation_radius: 10.0,
            panel_width: 2.5,
            grading_levels: 40,
            regularization_schedule: vec![0.2, 0.1, 0.05, 0.025],
            extrapolation_order: 3,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(Error::Config("nodes_per_axis must be >= 2".into()));
        }
        if !(self.truncation_radius > 0.0) || !self.truncation_radius.is_finite() {
            return Err(Error::Config("truncation_radius must be positive".into()));
        }
        if !(self.panel_width > 0.0) || !self.panel_width.is_finite() {
            return Err(Error::Config("panel_width must be positive".into()));
        }
        if self.extrapolation_order < 1 {
            return Err(Error::Config("extrapolation_order must be >= 1".into()));
        }
        validate_schedule(&self.regularization_schedule)
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes_per_axis = nodes;
        self
    }

    pub fn with_radius(mut self, radius: f64, panel_width: f64) -> Self {
        self.truncation_radius = radius;
        self.panel_width = panel_width;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.extrapolation_order = schedule.len().saturating_sub(1).max(1);
        self.regularization_schedule = schedule;
        self
    }
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    for &eps in schedule {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!("regularization exponent {eps} must be positive")));
        }
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("regularization schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Gauss–Legendre rule of order `n` on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::Domain { context: "gauss rule order", value: 0.0 });
    }
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::Domain { context: "jacobi exponent", value: alpha.min(beta) });
    }
    let (diag, offsq) = jacobi_recurrence(n, alpha, beta);
    let ln_mu0 = (alpha + beta + 1.0) * 2f64.ln() + ln_gamma_unchecked(alpha + 1.0)
        + ln_gamma_unchecked(beta + 1.0)
        - ln_gamma_unchecked(alpha + beta + 2.0);
    let mu0 = ln_mu0.exp();

    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&diag, &offsq, mid) > i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        nodes.push(0.5 * (lo + hi));
    }

    let off: Vec<f64> = offsq.iter().map(|b| b.sqrt()).collect();
    let weights = nodes
        .iter()
        .map(|&x| {
            // orthonormal recurrence; weight = 1 / sum p_k(x)^2
            let mut prev = 0.0;
            let mut cur = 1.0 / mu0.sqrt();
            let mut acc = cur * cur;
            for k in 0..n - 1 {
                let next = ((x - diag[k]) * cur - if k > 0 { off[k - 1] * prev } else { 0.0 }) / off[k];
                prev = cur;
                cur = next;
                acc += cur * cur;
            }
            1.0 / acc
        })
        .collect();
    Ok(GaussRule { nodes, weights })
}

/// Diagonal `a_0..a_{n-1}` and squared off-diagonal `b_1..b_{n-1}` of the
/// monic Jacobi recurrence.
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(n);
    diag.push((beta - alpha) / (ab + 2.0));
    for k in 1..n {
        let s = 2.0 * k as f64 + ab;
        diag.push((beta * beta - alpha * alpha) / (s * (s + 2.0)));
    }
    let mut offsq = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let b = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        offsq.push(b);
    }
    (diag, offsq)
}

/// Number of eigenvalues of the Jacobi matrix below `x`.
fn sturm_count(diag: &[f64], offsq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d == 0.0 {
        d = -f64::EPSILON;
    }
    if d < 0.0 {
        count += 1;
    }
    for k in 1..diag.len() {
        d = diag[k] - x - offsq[k - 1] / d;
        if d == 0.0 {
            d = -f64::EPSILON;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss–Jacobi rule.
pub fn cached_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Arc<GaussRule>> {
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = rule_cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(n, alpha, beta)?);
    rule_cache().lock().expect("rule cache poisoned").insert(key, Arc::clone(&rule));
    Ok(rule)
}

/// Rule in `t = cos(theta)` for `int_0^pi g(theta) sin^{2v-1}(theta) d theta`.
pub(crate) fn angular_rule(v: f64, nodes: usize) -> Result<Arc<GaussRule>> {
    cached_jacobi(nodes, v - 1.0, v - 1.0)
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, &x| acc + x);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sum over a tensor grid: axis-major, ascending node index, pairwise within
/// each axis.
fn tensor_sum(rules: &[&GaussRule], point: &mut Vec<f64>, f: &mut dyn FnMut(&[f64]) -> f64) -> f64 {
    let depth = point.len();
    if depth == rules.len() {
        return f(point);
    }
    let rule = rules[depth];
    let mut terms = Vec::with_capacity(rule.len());
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        point.push(x);
        terms.push(w * tensor_sum(rules, point, f));
        point.pop();
    }
    pairwise_sum(&terms)
}

/// `int_{[0,pi]^n} f(theta) prod_i sin^{2v_i - 1}(theta_i) d theta`, `n <= 3`.
pub fn integrate_angular(f: impl Fn(&[f64]) -> f64, v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    integrate_angular_cos(|t| {
        let theta: Vec<f64> = t.iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect();
        f(&theta)
    }, v, spec)
}

/// Same integral with the integrand given as a function of `cos(theta_i)`.
pub fn integrate_angular_cos(f: impl Fn(&[f64]) -> f64, v: &WeightVector, spec: &QuadSpec) -> Result<f64> {
    let n = v.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let rules: Vec<Arc<GaussRule>> = v
        .values()
        .iter()
        .map(|&vi| angular_rule(vi, spec.nodes_per_axis))
        .collect::<Result<_>>()?;
    let refs: Vec<&GaussRule> = rules.iter().map(|r| r.as_ref()).collect();
    let mut point = Vec::with_capacity(n);
    Ok(tensor_sum(&refs, &mut point, &mut |t| f(t)))
}

/// Composite rule on `[0, radius]` for `int g(y) y^power dy`, the weight
/// folded into the returned weights.
///
/// Optional geometric grading towards 0 splits the first panel
/// `[0, panel_width]` at `panel_width * 2^-l`; the innermost panel uses a
/// Gauss–Jacobi rule that integrates `y^power` exactly.
pub fn half_line_rule(nodes: usize, radius: f64, panel_width: f64, grading_levels: usize, power: f64) -> Result<GaussRule> {
    if !(power > -1.0) {
        return Err(Error::Domain { context: "half-line weight power", value: power });
    }
    let base = cached_jacobi(nodes, 0.0, 0.0)?;
    let inner = cached_jacobi(nodes, 0.0, power)?;
    let first = panel_width.min(radius);
    let mut breaks = vec![0.0];
    for l in (1..=grading_levels).rev() {
        breaks.push(first * 0.5f64.powi(l as i32));
    }
    let panels = (radius / panel_width).ceil().max(1.0) as usize;
    for i in 1..=panels {
        breaks.push((i as f64 * panel_width).min(radius));
    }
    breaks.dedup();
    let mut out = GaussRule { nodes: Vec::new(), weights: Vec::new() };
    for (idx, w) in breaks.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        if idx == 0 {
            // y = half (1 + s): y^power = half^power (1 + s)^power
            let scale = half.powf(power + 1.0);
            for (&x, &wt) in inner.nodes.iter().zip(&inner.weights) {
                out.nodes.push(mid + half * x);
                out.weights.push(scale * wt);
            }
        } else {
            for (&x, &wt) in base.nodes.iter().zip(&base.weights) {
                let y = mid + half * x;
                out.nodes.push(y);
                out.weights.push(half * wt * y.powf(power));
            }
        }
    }
    Ok(out)
}

/// An integral value together with the Richardson tableau when damping was used.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub tableau: Option<Vec<Vec<f64>>>,
}

/// `int_{R_+^n} f(y) prod y_i^{2 v_i} dy`.
///
/// Fields tagged polynomial-growth are Abel-damped by `exp(-eps sum y_i)` for
/// every `eps` in the schedule (truncated at `max(radius, 36/eps)`) and the
/// results are extrapolated to `eps = 0`. Other fields are integrated directly
/// on `[0, radius]^n`.
pub fn integrate_orthant(f: &dyn ScalarField, v: &WeightVector, spec: &QuadSpec) -> Result<Integral> {
    spec.validate()?;
    let n = v.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let graded = f.decay_class() == DecayClass::SingularAtOrigin
        || f.decay_class() == DecayClass::PolynomialGrowth;
    let levels = if graded { spec.grading_levels } else { 0 };

    if f.decay_class() != DecayClass::PolynomialGrowth {
        let value = box_integral(|y| f.eval(y), v, spec.nodes_per_axis, spec.truncation_radius, spec.panel_width, levels)?;
        return Ok(Integral { value, error_estimate: 0.0, tableau: None });
    }

    let schedule = &spec.regularization_schedule;
    if schedule.is_empty() {
        return Err(Error::Config("polynomial-growth field needs a regularization schedule".into()));
    }
    validate_schedule(schedule)?;
    let mut samples = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let radius = spec.truncation_radius.max(36.0 / eps);
        let value = box_integral(
            |y| f.eval(y) * (-eps * y.iter().sum::<f64>()).exp(),
            v,
            spec.nodes_per_axis,
            radius,
            spec.panel_width,
            levels,
        )?;
        samples.push(value);
    }
    richardson_to_zero(schedule, &samples, spec.extrapolation_order)
}

fn box_integral(
    f: impl Fn(&[f64]) -> f64,
    v: &WeightVector,
    nodes: usize,
    radius: f64,
    panel_width: f64,
    levels: usize,
) -> Result<f64> {
    let rules: Vec<GaussRule> = v
        .values()
        .iter()
        .map(|&vi| half_line_rule(nodes, radius, panel_width, levels, 2.0 * vi))
        .collect::<Result<_>>()?;
    let refs: Vec<&GaussRule> = rules.iter().collect();
    let mut point = Vec::with_capacity(v.dim());
    Ok(tensor_sum(&refs, &mut point, &mut |y| f(y)))
}

/// Neville extrapolation of `I(eps)` to `eps = 0`.
pub fn richardson_to_zero(eps: &[f64], samples: &[f64], order: usize) -> Result<Integral> {
    let m = samples.len();
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![samples[i]];
        for j in 1..=i.min(order) {
            let t = row[j - 1];
            let prev = tableau[i - 1][j - 1];
            row.push(t + (t - prev) * eps[i] / (eps[i - j] - eps[i]));
        }
        tableau.push(row);
    }
    let diagonal: Vec<f64> = tableau.iter().map(|row| *row.last().expect("non-empty row")).collect();
    let value = *diagonal.last().expect("non-empty schedule");
    let error_estimate = if m >= 2 { (diagonal[m - 1] - diagonal[m - 2]).abs() } else { f64::INFINITY };

    if m >= 3 {
        let diffs: Vec<f64> = diagonal.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let growing = diffs.windows(2).all(|w| w[1] > w[0]);
        let scale = diagonal.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
        if growing && diffs[diffs.len() - 1] > 1e-6 * scale {
            return Err(Error::NonConvergence { diagonal, tableau });
        }
    }
    Ok(Integral { value, error_estimate, tableau: Some(tableau) })
}

/// Stick-breaking rules for `int_{simplex} g(s) prod s_i^{a_i} ds` over the
/// `m`-part simplex, as `m - 1` rules on `[0, 1]` and the constant factor.
fn simplex_rules(a: &[f64], nodes: usize) -> Result<(Vec<GaussRule>, f64)> {
    let m = a.len();
    let mut rules = Vec::with_capacity(m.saturating_sub(1));
    let mut factor = 1.0;
    for j in 0..m.saturating_sub(1) {
        // u^{a_j} (1-u)^{sum_{i>j} a_i + m-2-j}
        let expo_u = a[j];
        let expo_1mu: f64 = a[j + 1..].iter().sum::<f64>() + (m - 2 - j) as f64;
        let rule = cached_jacobi(nodes, expo_1mu, expo_u)?;
        factor *= 2f64.powf(-expo_u - expo_1mu - 1.0);
        rules.push(GaussRule { nodes: rule.nodes.iter().map(|s| 0.5 * (1.0 + s)).collect(), weights: rule.weights.clone() });
    }
    Ok((rules, factor))
}

/// Simplex point from stick-breaking fractions.
fn simplex_point(u: &[f64], m: usize, out: &mut [f64]) {
    let mut remaining = 1.0;
    for j in 0..m.saturating_sub(1) {
        let t = remaining * u[j];
        out[j] = t;
        remaining -= t;
    }
    out[m - 1] = remaining.max(0.0);
}

/// `int_{R_+^n} |y|^s f(y) prod y_i^{2v_i} dy` in radial/angular coordinates
/// `y = r omega`, truncated at the budget's radius.
///
/// The angular part is parametrized through the simplex `t_i = omega_i^2`
/// (stick-breaking) with Gauss–Jacobi rules absorbing the power weights, and
/// the radial rule absorbs `r^{N-1+s}`, so `f` only needs to be smooth.
pub fn integrate_orthant_polar(f: impl Fn(&[f64]) -> f64, v: &WeightVector, spec: &QuadSpec, radial_power: f64) -> Result<f64> {
    spec.validate()?;
    let n = v.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    let big_n = v.homogeneous_dim();
    let radial = half_line_rule(spec.nodes_per_axis, spec.truncation_radius, spec.panel_width, 0, big_n - 1.0 + radial_power)?;
    let a: Vec<f64> = v.values().iter().map(|vi| vi - 0.5).collect();
    let (stick, factor) = simplex_rules(&a, spec.nodes_per_axis)?;
    let refs: Vec<&GaussRule> = stick.iter().collect();
    let mut point = Vec::with_capacity(n);
    let mut t = vec![0.0; n];
    let mut y = vec![0.0; n];
    let total = tensor_sum(&refs, &mut point, &mut |u| {
        simplex_point(u, n, &mut t);
        radial_sum(&radial, &t, &mut y, &f)
    });
    Ok(2f64.powi(1 - n as i32) * factor * total)
}

fn radial_sum(radial: &GaussRule, t: &[f64], y: &mut [f64], f: &impl Fn(&[f64]) -> f64) -> f64 {
    let omega: Vec<f64> = t.iter().map(|ti| ti.sqrt()).collect();
    let terms: Vec<f64> = radial
        .nodes
        .iter()
        .zip(&radial.weights)
        .map(|(&r, &w)| {
            for (yi, oi) in y.iter_mut().zip(&omega) {
                *yi = r * oi;
            }
            w * f(y)
        })
        .collect();
    pairwise_sum(&terms)
}

/// `int_{V > 0} V^beta f(y) prod y_i^{2v_i} dy` over the cone of the split
/// whose first `p` coordinates are the plus group, `V = sum_{i<p} y_i^2 - sum_{i>=p} y_i^2`.
///
/// With `T = sum_{i<p} omega_i^2` one has `V = r^2 (2T - 1)`, so the cone is
/// `T > 1/2`; the factor `(2T - 1)^beta` is absorbed by a Gauss–Jacobi rule
/// on `[1/2, 1]` and `r^{2 beta}` by the radial rule.
pub fn integrate_cone_polar(f: impl Fn(&[f64]) -> f64, v: &WeightVector, p: usize, spec: &QuadSpec, beta: f64) -> Result<f64> {
    spec.validate()?;
    let n = v.dim();
    if n > 3 {
        return Err(Error::UnsupportedDimension(n));
    }
    if p == 0 || p > n {
        return Err(Error::Config(format!("plus group size {p} invalid for n = {n}")));
    }
    if !(beta > -1.0) {
        return Err(Error::Precondition(format!("cone weight V^{beta} is not integrable at the boundary")));
    }
    if p == n {
        return integrate_orthant_polar(f, v, spec, 2.0 * beta);
    }
    let q = n - p;
    let big_n = v.homogeneous_dim();
    let radial = half_line_rule(spec.nodes_per_axis, spec.truncation_radius, spec.panel_width, 0, big_n - 1.0 + 2.0 * beta)?;
    let a: Vec<f64> = v.values().iter().map(|vi| vi - 0.5).collect();
    let a_plus: f64 = a[..p].iter().sum();
    let a_minus: f64 = a[p..].iter().sum();
    let gamma = a_minus + q as f64 - 1.0;
    let t_rule = cached_jacobi(spec.nodes_per_axis, gamma, beta)?;
    // T = (3 + s) / 4: (2T - 1)^beta (1 - T)^gamma dT = 2^-beta 4^-gamma / 4 (1+s)^beta (1-s)^gamma ds
    let t_rule = GaussRule {
        nodes: t_rule.nodes.iter().map(|s| 0.25 * (3.0 + s)).collect(),
        weights: t_rule
            .nodes
            .iter()
            .zip(&t_rule.weights)
            .map(|(s, w)| {
                let t = 0.25 * (3.0 + s);
                w * t.powf(a_plus + p as f64 - 1.0)
            })
            .collect(),
    };
    let t_factor = 2f64.powf(-beta) * 4f64.powf(-gamma) * 0.25;
    let (plus_rules, plus_factor) = simplex_rules(&a[..p], spec.nodes_per_axis)?;
    let (minus_rules, minus_factor) = simplex_rules(&a[p..], spec.nodes_per_axis)?;
    let mut refs: Vec<&GaussRule> = vec![&t_rule];
    refs.extend(plus_rules.iter());
    refs.extend(minus_rules.iter());
    let mut point = Vec::with_capacity(refs.len());
    let mut t = vec![0.0; n];
    let mut y = vec![0.0; n];
    let total = tensor_sum(&refs, &mut point, &mut |u| {
        let big_t = u[0];
        simplex_point(&u[1..p], p, &mut t[..p]);
        simplex_point(&u[p..], q, &mut t[p..]);
        for ti in &mut t[..p] {
            *ti *= big_t;
        }
        for ti in &mut t[p..] {
            *ti *= 1.0 - big_t;
        }
        radial_sum(&radial, &t, &mut y, &f)
    });
    Ok(2f64.powi(1 - n as i32) * t_factor * plus_factor * minus_factor * total)
}

/// `prod_i B(v_i, 1/2)`, the angular mass of `prod sin^{2v_i-1}`.
pub fn angular_mass(v: &WeightVector) -> f64 {
    v.values()
        .iter()
        .map(|&vi| (ln_gamma_unchecked(vi) + 0.5 * PI.ln() - ln_gamma_unchecked(vi + 0.5)).exp())
        .product()
}
