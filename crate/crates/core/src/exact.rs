//! Exact constants of the form `q * 2^a * pi^b * prod Gamma(g_j)^{e_j}`.
//!
//! `q` is an arbitrary-precision rational, `a` and `b` are rationals and the
//! Gamma arguments are rationals reduced into `(0, 1]` by the recurrence
//! (so `Gamma(5/2)` becomes `3/4 * pi^{1/2}`). With that canonical form,
//! equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::specfun::gamma_unchecked;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactConst {
    coef: BigRational,
    /// fractional part of the power of two, in `[0, 1)`
    two: Rational64,
    pi: Rational64,
    gammas: BTreeMap<Rational64, i64>,
}

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn pow_big(base: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

impl ExactConst {
    pub fn one() -> Self {
        Self::rational(Rational64::one())
    }

    pub fn zero() -> Self {
        Self::rational(Rational64::zero())
    }

    pub fn rational(q: Rational64) -> Self {
        Self::big_rational(big(q))
    }

    pub fn integer(q: i64) -> Self {
        Self::rational(Rational64::from_integer(q))
    }

    fn big_rational(coef: BigRational) -> Self {
        Self { coef, two: Rational64::zero(), pi: Rational64::zero(), gammas: BTreeMap::new() }
    }

    /// `2^a`.
    pub fn pow2(a: Rational64) -> Self {
        let whole = a.floor();
        let frac = a - whole;
        let two = BigRational::from_integer(BigInt::from(2));
        let mut c = Self::big_rational(pow_big(&two, whole.to_integer()));
        c.two = frac;
        c
    }

    /// `pi^b`.
    pub fn pi_pow(b: Rational64) -> Self {
        let mut c = Self::one();
        c.pi = b;
        c
    }

    /// `Gamma(g)^e`; a pole is reported as [`Error::Degenerate`].
    pub fn gamma_pow(g: Rational64, e: i64) -> Result<Self> {
        if g.is_integer() && g <= Rational64::zero() {
            return Err(Error::Degenerate { argument: g.to_string() });
        }
        let mut c = Self::one();
        if e == 0 {
            return Ok(c);
        }
        let one = Rational64::one();
        let mut a = g;
        let mut factor = BigRational::one();
        // Gamma(a) = (a-1) Gamma(a-1)
        while a > one {
            a -= one;
            factor *= big(a);
        }
        // Gamma(a) = Gamma(a+1) / a
        while a <= Rational64::zero() {
            factor /= big(a);
            a += one;
        }
        c.coef = pow_big(&factor, e);
        if a == one {
            return Ok(c);
        }
        if a == Rational64::new(1, 2) {
            c.pi = Rational64::new(e, 2);
            return Ok(c);
        }
        c.gammas.insert(a, e);
        Ok(c)
    }

    pub fn gamma(g: Rational64) -> Result<Self> {
        Self::gamma_pow(g, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.coef.is_negative()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain { context: "reciprocal of exact zero", value: 0.0 });
        }
        let inv = Self {
            coef: self.coef.recip(),
            two: Rational64::zero(),
            pi: -self.pi,
            gammas: self.gammas.iter().map(|(&g, &e)| (g, -e)).collect(),
        };
        Ok(inv * Self::pow2(-self.two))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        let mut out = Self::one();
        for _ in 0..e {
            out = out * self.clone();
        }
        Ok(out)
    }

    /// `self / other` if both differ by a rational factor only.
    pub fn rational_ratio(&self, other: &Self) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        let r = self.clone() * other.recip().ok()?;
        (r.two.is_zero() && r.pi.is_zero() && r.gammas.is_empty()).then_some(r.coef)
    }

    pub fn to_f64(&self) -> f64 {
        let mut value = self.coef.numer().to_f64().unwrap_or(f64::NAN) / self.coef.denom().to_f64().unwrap_or(f64::NAN);
        if !value.is_finite() {
            // huge numerator and denominator: go through logarithms of the magnitude
            let ln = ln_big(self.coef.numer()) - ln_big(self.coef.denom());
            value = self.coef.signum().to_f64().unwrap_or(1.0) * ln.exp();
        }
        value *= 2f64.powf(self.two.to_f64().unwrap_or(f64::NAN));
        value *= std::f64::consts::PI.powf(self.pi.to_f64().unwrap_or(f64::NAN));
        for (g, &e) in &self.gammas {
            value *= gamma_unchecked(g.to_f64().unwrap_or(f64::NAN)).powi(e as i32);
        }
        value
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

impl Mul for ExactConst {
    type Output = ExactConst;

    fn mul(mut self, rhs: ExactConst) -> ExactConst {
        self.coef *= rhs.coef;
        self.pi += rhs.pi;
        for (g, e) in rhs.gammas {
            let slot = self.gammas.entry(g).or_insert(0);
            *slot += e;
            if *slot == 0 {
                self.gammas.remove(&g);
            }
        }
        let two = self.two + rhs.two;
        self.two = Rational64::zero();
        if self.coef.is_zero() {
            self.pi = Rational64::zero();
            self.gammas.clear();
            return self;
        }
        let scaled = ExactConst::pow2(two);
        self.coef *= scaled.coef;
        self.two = scaled.two;
        self
    }
}

impl Div for ExactConst {
    type Output = Result<ExactConst>;

    fn div(self, rhs: ExactConst) -> Result<ExactConst> {
        Ok(self * rhs.recip()?)
    }
}

impl Neg for ExactConst {
    type Output = ExactConst;

    fn neg(mut self) -> ExactConst {
        self.coef = -self.coef;
        self
    }
}

impl fmt::Display for ExactConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coef)?;
        if !self.two.is_zero() {
            write!(f, " * 2^({})", self.two)?;
        }
        if !self.pi.is_zero() {
            write!(f, " * pi^({})", self.pi)?;
        }
        for (g, e) in &self.gammas {
            if *e == 1 {
                write!(f, " * Gamma({g})")?;
            } else {
                write!(f, " * Gamma({g})^({e})")?;
            }
        }
        Ok(())
    }
}

/// Least common multiple of rational denominators, used when building
/// rational exponents from weight vectors.
pub fn common_denominator(values: &[Rational64]) -> i64 {
    values.iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn gamma_canonical_forms() {
        assert_eq!(ExactConst::gamma(r(1, 1)).unwrap(), ExactConst::one());
        assert_eq!(ExactConst::gamma(r(4, 1)).unwrap(), ExactConst::integer(6));
        assert_eq!(ExactConst::gamma(r(1, 2)).unwrap(), ExactConst::pi_pow(r(1, 2)));
        let g52 = ExactConst::gamma(r(5, 2)).unwrap();
        assert_eq!(g52, ExactConst::rational(r(3, 4)) * ExactConst::pi_pow(r(1, 2)));
        assert_relative_eq!(g52.to_f64(), 1.329_340_388_179_137, max_relative = 1e-14);
        let gm12 = ExactConst::gamma(r(-1, 2)).unwrap();
        assert_relative_eq!(gm12.to_f64(), -2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        let g13 = ExactConst::gamma(r(7, 3)).unwrap();
        assert_relative_eq!(g13.to_f64(), gamma_unchecked(7.0 / 3.0), max_relative = 1e-13);
    }

    #[test]
    fn poles_are_degenerate() {
        assert_eq!(ExactConst::gamma(r(0, 1)), Err(Error::Degenerate { argument: "0".into() }));
        assert!(ExactConst::gamma(r(-3, 1)).is_err());
    }

    #[test]
    fn powers_of_two_fold() {
        let a = ExactConst::pow2(r(3, 2)) * ExactConst::pow2(r(1, 2));
        assert_eq!(a, ExactConst::integer(4));
        let b = ExactConst::pow2(r(-1, 3));
        assert_relative_eq!(b.to_f64(), 2f64.powf(-1.0 / 3.0), max_relative = 1e-15);
    }

    #[test]
    fn reciprocal_cancels() {
        let c = ExactConst::rational(r(-5, 7))
            * ExactConst::pow2(r(5, 3))
            * ExactConst::pi_pow(r(3, 2))
            * ExactConst::gamma(r(11, 4)).unwrap();
        let one = c.clone() * c.recip().unwrap();
        assert_eq!(one, ExactConst::one());
        assert_eq!(c.rational_ratio(&c), Some(BigRational::one()));
        assert!(c.is_negative());
        assert!(ExactConst::zero().recip().is_err());
    }

    #[test]
    fn display_is_readable() {
        let c = ExactConst::rational(r(3, 4)) * ExactConst::pi_pow(r(1, 2)) * ExactConst::gamma(r(1, 3)).unwrap();
        assert_eq!(c.to_string(), "3/4 * pi^(1/2) * Gamma(1/3)");
    }
}
