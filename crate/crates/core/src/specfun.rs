//! Special functions: Gamma, Bessel `J_mu` of real order `mu >= 0`, and the
//! normalized Bessel function
//!
//! ```text
//! j_mu(t) = 2^mu Gamma(mu + 1) t^(-mu) J_mu(t),    j_mu(0) = 1,
//! ```
//!
//! which for `mu = v - 1/2` is the eigenfunction of the Bessel operator
//! `d^2/dx^2 + (2v/x) d/dx` with eigenvalue `-y^2` when evaluated at `x * y`.
//!
//! `J_mu` uses three regimes: the power series for `t <= 8`, Hankel's
//! asymptotic expansion once `t >= max(25, 2 mu^2)`, and Miller's backward
//! recurrence (normalized with the Neumann sum) in between.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const SERIES_LIMIT: f64 = 8.0;

/// A real argument for Gamma; rejects non-finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealArg(f64);

impl RealArg {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain { context: "gamma", value });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Order of `J_mu`; restricted to `mu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::Domain { context: "bessel order", value: mu });
        }
        Ok(Self(mu))
    }

    /// The working order `v - 1/2` for a Bessel weight `v`.
    pub fn from_weight(v: f64) -> Result<Self> {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain { context: "bessel weight", value: v });
        }
        if v < 0.5 {
            return Err(Error::UnsupportedOrder(v));
        }
        Ok(Self(v - 0.5))
    }

    pub fn mu(self) -> f64 {
        self.0
    }
}

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Gamma(x + 1) form)
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Gamma function for real, non-pole arguments.
pub fn gamma(x: RealArg) -> Result<f64> {
    let x = x.value();
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

/// Convenience wrapper over [`gamma`] for plain `f64` inputs.
pub fn gamma_f64(x: f64) -> Result<f64> {
    gamma(RealArg::new(x)?)
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        // exact factorials
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    if x > 20.0 {
        // the Lanczos fit drifts to ~1e-13 near 171; evaluate in [19, 20)
        // and climb with the recurrence, every base + k being exact
        let m = (x - 19.0).floor();
        let base = x - m;
        let mut acc = gamma_unchecked(base);
        for k in 0..m as usize {
            acc *= base + k as f64;
        }
        return acc;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let half = t.powf((z + 0.5) / 2.0);
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
}

/// `ln |Gamma(x)|` for real, non-pole arguments.
pub fn ln_gamma(x: RealArg) -> Result<f64> {
    let x = x.value();
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < 20.0 {
        return gamma_unchecked(x).ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Bessel function of the first kind `J_mu(t)` for `mu >= 0`, `t >= 0`.
pub fn bessel_j(order: BesselOrder, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain { context: "bessel_j", value: t });
    }
    Ok(bessel_j_unchecked(order.mu(), t))
}

pub(crate) fn bessel_j_unchecked(mu: f64, t: f64) -> f64 {
    if t == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    if t <= SERIES_LIMIT {
        let prefactor = (mu * (0.5 * t).ln() - ln_gamma_unchecked(mu + 1.0)).exp();
        return prefactor * normalized_series(mu, t);
    }
    if t >= asymptotic_threshold(mu) {
        if let Some(value) = hankel_asymptotic(mu, t) {
            return value;
        }
    }
    miller(mu, t)
}

fn asymptotic_threshold(mu: f64) -> f64 {
    25.0_f64.max(2.0 * mu * mu)
}

/// `Gamma(mu+1) sum_m (-t^2/4)^m / (m! Gamma(mu+m+1))`, i.e. `j_mu(t)`.
fn normalized_series(mu: f64, t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= -q / (m * (mu + m));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && m > q.sqrt() {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum
}

fn hankel_asymptotic(mu: f64, t: f64) -> Option<f64> {
    let four_mu2 = 4.0 * mu * mu;
    let mut a = 1.0; // a_k / t^k
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (four_mu2 - odd * odd) / (8.0 * kf * t);
        let mag = a.abs();
        if mag > last && mag > 1e-17 {
            break;
        }
        last = mag;
        // signs: P uses (-1)^{k/2} for even k, Q uses (-1)^{(k-1)/2} for odd k
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if mag < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let chi = t - (0.5 * mu + 0.25) * PI;
    Some((2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// Miller's backward recurrence, normalized by
/// `(t/2)^nu0 = sum_k (nu0 + 2k) Gamma(nu0 + k) / k! * J_{nu0+2k}(t)`.
fn miller(mu: f64, t: f64) -> f64 {
    let base = mu.floor();
    let nu0 = mu - base;
    let target = base as usize;
    let start = target.max(t.ceil() as usize) + 40 + (t.cbrt() * 8.0) as usize;

    // Neumann weights: w_0 = Gamma(nu0+1), w_k = (nu0+2k) Gamma(nu0+k)/k!
    let half = start / 2 + 1;
    let mut weights = Vec::with_capacity(half + 1);
    weights.push(gamma_unchecked(nu0 + 1.0));
    let mut ratio = gamma_unchecked(nu0 + 1.0); // Gamma(nu0+k)/k! at k = 1
    for k in 1..=half {
        let kf = k as f64;
        if k > 1 {
            ratio *= (nu0 + kf - 1.0) / kf;
        }
        weights.push((nu0 + 2.0 * kf) * ratio);
    }

    let mut above = 0.0; // f_{i+1}
    let mut current = 1e-30; // f_i
    let mut at_target = 0.0;
    let mut norm = 0.0;
    let mut i = start;
    loop {
        if i == target {
            at_target = current;
        }
        if i % 2 == 0 {
            norm += weights[i / 2] * current;
        }
        if i == 0 {
            break;
        }
        let order = nu0 + i as f64;
        let below = 2.0 * order / t * current - above;
        above = current;
        current = below;
        i -= 1;
        if current.abs() > 1e250 {
            let s = 1e-250;
            current *= s;
            above *= s;
            at_target *= s;
            norm *= s;
        }
    }
    at_target * (0.5 * t).powf(nu0) / norm
}

/// Normalized Bessel function `j_{v-1/2}(t)` for weight `v >= 1/2`.
///
/// The two-argument form `j_{v-1/2}(x, y)` is `normalized_j(v, x * y)`.
pub fn normalized_j(v: f64, t: f64) -> Result<f64> {
    let order = BesselOrder::from_weight(v)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain { context: "normalized_j", value: t });
    }
    Ok(normalized_j_order(order.mu(), t))
}

/// `j_mu(t)` by order rather than weight.
pub(crate) fn normalized_j_order(mu: f64, t: f64) -> f64 {
    if t <= SERIES_LIMIT {
        return normalized_series(mu, t);
    }
    let scale = (ln_gamma_unchecked(mu + 1.0) - mu * (0.5 * t).ln()).exp();
    scale * bessel_j_unchecked(mu, t)
}

/// `d^m/dt^m j_mu(t)` using `j_mu'(t) = -t / (2(mu+1)) j_{mu+1}(t)`.
pub(crate) fn normalized_j_derivative(mu: f64, t: f64, m: usize) -> f64 {
    // terms c * t^a * j_{mu+b}(t)
    let mut terms: Vec<(f64, i32, u32)> = vec![(1.0, 0, 0)];
    for _ in 0..m {
        let mut next: Vec<(f64, i32, u32)> = Vec::with_capacity(terms.len() * 2);
        for &(c, a, b) in &terms {
            if a != 0 {
                push_term(&mut next, c * a as f64, a - 1, b);
            }
            push_term(&mut next, -c / (2.0 * (mu + b as f64 + 1.0)), a + 1, b + 1);
        }
        terms = next;
    }
    let mut sum = 0.0;
    for &(c, a, b) in &terms {
        sum += c * t.powi(a) * normalized_j_order(mu + b as f64, t);
    }
    sum
}

fn push_term(terms: &mut Vec<(f64, i32, u32)>, c: f64, a: i32, b: u32) {
    if let Some(slot) = terms.iter_mut().find(|(_, ta, tb)| *ta == a && *tb == b) {
        slot.0 += c;
    } else {
        terms.push((c, a, b));
    }
}

/// Euler Beta function.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    let lg = ln_gamma(RealArg::new(a)?)? + ln_gamma(RealArg::new(b)?)?
        - ln_gamma(RealArg::new(a + b)?)?;
    let sign = gamma_sign(a) * gamma_sign(b) * gamma_sign(a + b);
    Ok(sign * lg.exp())
}

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_half_is_sqrt_pi() {
        assert_relative_eq!(gamma_f64(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_eq!(gamma_f64(1.0).unwrap(), 1.0);
        // Gamma(2.5) = 1.5 * 0.5 * Gamma(1/2)
        assert_relative_eq!(gamma_f64(2.5).unwrap(), 0.75 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(gamma_f64(x), Err(Error::Pole(x)));
        }
        assert!(gamma_f64(f64::NAN).is_err());
    }

    #[test]
    fn gamma_negative_half_integers() {
        // Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4/3 sqrt(pi)
        assert_relative_eq!(gamma_f64(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_f64(-1.5).unwrap(), 4.0 / 3.0 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn gamma_recurrence_on_grid() {
        for i in 0..100 {
            let x = 0.1 + 19.9 * i as f64 / 99.0;
            let lhs = gamma_f64(x + 1.0).unwrap();
            let rhs = x * gamma_f64(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.3, 1.7, 10.5, 30.25, -0.5] {
            let g = gamma_f64(x).unwrap().abs().ln();
            assert_relative_eq!(ln_gamma(RealArg::new(x).unwrap()).unwrap(), g, epsilon = 1e-12);
        }
    }

    #[test]
    fn bessel_basic_values() {
        let o0 = BesselOrder::new(0.0).unwrap();
        let o1 = BesselOrder::new(1.0).unwrap();
        assert_eq!(bessel_j(o0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(o1, 0.0).unwrap(), 0.0);
        let t = PI / 2.0;
        let half = bessel_j(BesselOrder::new(0.5).unwrap(), t).unwrap();
        assert_relative_eq!(half, (2.0 / (PI * t)).sqrt() * t.sin(), epsilon = 1e-14);
        assert!(bessel_j(o0, -1.0).is_err());
        assert!(BesselOrder::new(-0.25).is_err());
    }

    #[test]
    fn half_integer_closed_form_across_regimes() {
        // J_{1/2}(t) = sqrt(2/(pi t)) sin t ; J_{3/2}(t) = sqrt(2/(pi t)) (sin t / t - cos t)
        for &t in &[0.3, 5.0, 9.0, 17.0, 24.0, 31.0, 60.0, 99.0] {
            let s = (2.0 / (PI * t)).sqrt();
            let j12 = bessel_j_unchecked(0.5, t);
            let j32 = bessel_j_unchecked(1.5, t);
            assert!((j12 - s * t.sin()).abs() < 1e-13, "t={t}");
            assert!((j32 - s * (t.sin() / t - t.cos())).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn regimes_agree_at_switchover() {
        for &mu in &[0.0, 0.1, 0.5, 1.0, 2.5] {
            for &t in &[8.5, 12.0, 26.0, 40.0] {
                let m = miller(mu, t);
                let full = bessel_j_unchecked(mu, t);
                assert!((m - full).abs() < 1e-13, "mu={mu} t={t}: {m} vs {full}");
            }
        }
    }

    #[test]
    fn normalized_j_values() {
        assert_eq!(normalized_j(0.7, 0.0).unwrap(), 1.0);
        for &t in &[0.5, 3.0, 11.0, 40.0] {
            let j0 = bessel_j_unchecked(0.0, t);
            assert!((normalized_j(0.5, t).unwrap() - j0).abs() < 1e-14);
        }
        assert!(matches!(normalized_j(0.3, 1.0), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn derivative_identity_matches_finite_difference() {
        let mu = 0.5;
        let t = 2.3;
        let h = 1e-4;
        let fd1 = (normalized_j_order(mu, t + h) - normalized_j_order(mu, t - h)) / (2.0 * h);
        let fd2 = (normalized_j_order(mu, t + h) - 2.0 * normalized_j_order(mu, t)
            + normalized_j_order(mu, t - h))
            / (h * h);
        assert!((normalized_j_derivative(mu, t, 1) - fd1).abs() < 1e-8);
        assert!((normalized_j_derivative(mu, t, 2) - fd2).abs() < 1e-6);
    }

    #[test]
    fn beta_matches_angular_mass() {
        // B(3/2, 1/2) = pi/2
        assert_relative_eq!(beta(1.5, 0.5).unwrap(), PI / 2.0, max_relative = 1e-14);
    }
}
