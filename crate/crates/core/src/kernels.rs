//! Elementary-solution kernels and their Fourier images.
//!
//! * `S_{2k}(x) = c_S(k) |x|^{2k-N}` with
//!   `c_S(k) = 2^{N-4k} Gamma((N-2k)/2) / prod 2^{v_i-1/2} Gamma(v_i+1/2)`,
//!   and `E = -S_2`.
//! * `R_{2k}(x) = V^{(2k-N)/2} / K_n(2k)` on the cone `V > 0`, with `V` the
//!   signed quadratic form of a `(p, q)` split.
//! * Fourier images of the diamond iterates and of the diamond kernel as
//!   exact multiples of powers of `Q = (x_1^2+..+x_p^2)^2 - (x_{p+1}^2+..)^2`.
//!
//! Here `N = n + 2|v|`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactConst;
use crate::fbt::{fb_powerlaw_exact, transform_constant, transform_constant_exact, PowerLaw};
use crate::field::{norm, DecayClass, PositivePoint, ScalarField};
use crate::quadrature::WeightVector;

/// Coordinates `0..p` form the plus group, `p..p+q` the minus group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSplit {
    pub p: usize,
    pub q: usize,
}

impl SignatureSplit {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Config("split needs p >= 1".into()));
        }
        Ok(Self { p, q })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.n() });
        }
        Ok(())
    }

    /// `+1` on the plus group, `-1` on the minus group.
    pub fn signs(&self) -> Vec<f64> {
        (0..self.n()).map(|i| if i < self.p { 1.0 } else { -1.0 }).collect()
    }

    /// Whether `n` odd with `p` odd and `q` even, or `n` even with `p` and `q` odd.
    pub fn parity_hypothesis(&self) -> bool {
        let (n, p, q) = (self.n(), self.p, self.q);
        (n % 2 == 1 && p % 2 == 1 && q % 2 == 0) || (n % 2 == 0 && p % 2 == 1 && q % 2 == 1)
    }

    /// `V = sum_{i<p} x_i^2 - sum_{i>=p} x_i^2`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, c)| if i < self.p { c * c } else { -c * c }).sum()
    }

    /// `Q = (sum_{i<p} x_i^2)^2 - (sum_{i>=p} x_i^2)^2 = |x|^2 V`.
    pub fn bracket(&self, x: &[f64]) -> f64 {
        let plus: f64 = x[..self.p].iter().map(|c| c * c).sum();
        let minus: f64 = x[self.p..].iter().map(|c| c * c).sum();
        plus * plus - minus * minus
    }
}

/// A point of the cone `V > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    pub x: PositivePoint,
    pub v_form: f64,
}

impl ConePoint {
    pub fn new(x: PositivePoint, split: &SignatureSplit) -> Result<Self> {
        split.check(x.dim())?;
        let v_form = split.quadratic_form(x.coords());
        let r2: f64 = x.coords().iter().map(|c| c * c).sum();
        if v_form.abs() < 1e-12 * r2 || v_form <= 0.0 {
            return Err(Error::OutsideCone(v_form));
        }
        Ok(Self { x, v_form })
    }
}

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// `prod_i 2^{v_i - 1/2} Gamma(v_i + 1/2)`, the reciprocal of `C_v`.
fn product_constant(v: &WeightVector) -> Result<ExactConst> {
    transform_constant_exact(v)?.recip()
}

/// Coefficient of `S_{2k}`.
pub fn s_coefficient(k: usize, v: &WeightVector) -> Result<ExactConst> {
    let big_n = v.exact_homogeneous_dim()?;
    let kk = Rational64::from_integer(k as i64);
    let top = ExactConst::pow2(big_n - kk * 4) * ExactConst::gamma((big_n - kk * 2) * half())?;
    top / product_constant(v)?
}

/// `S_{2k}` coefficient that actually inverts `(-1)^k Delta_B^k` in this
/// normalization: `C_v 2^{N/2-2k} Gamma(N/2-k) / Gamma(k)`.
pub fn s_coefficient_elementary(k: usize, v: &WeightVector) -> Result<ExactConst> {
    if k == 0 {
        return Err(Error::Domain { context: "kernel order", value: 0.0 });
    }
    let big_n = v.exact_homogeneous_dim()?;
    let kk = Rational64::from_integer(k as i64);
    transform_constant_exact(v)?
        * ExactConst::pow2(big_n * half() - kk * 2)
        * ExactConst::gamma(big_n * half() - kk)?
        / ExactConst::gamma(kk)?
}

/// Homogeneity order `2k - N`.
pub fn kernel_exponent(k: usize, v: &WeightVector) -> f64 {
    2.0 * k as f64 - v.homogeneous_dim()
}

pub fn kernel_exponent_exact(k: usize, v: &WeightVector) -> Result<Rational64> {
    Ok(Rational64::from_integer(2 * k as i64) - v.exact_homogeneous_dim()?)
}

pub fn eval_s(k: usize, x: &PositivePoint, v: &WeightVector) -> Result<f64> {
    v.check_dim(x.dim())?;
    if k == 0 {
        return Err(Error::Domain { context: "kernel order", value: 0.0 });
    }
    let c = s_coefficient(k, v)?.to_f64();
    Ok(c * x.norm().powf(kernel_exponent(k, v)))
}

pub fn eval_e(x: &PositivePoint, v: &WeightVector) -> Result<f64> {
    Ok(-eval_s(1, x, v)?)
}

/// `K_n(2k)`; a pole in any Gamma factor is reported as degenerate.
pub fn const_kn(k: usize, v: &WeightVector, split: &SignatureSplit) -> Result<ExactConst> {
    split.check(v.dim())?;
    let big_n = v.exact_homogeneous_dim()?;
    let kk = Rational64::from_integer(k as i64);
    let p = Rational64::from_integer(split.p as i64);
    let two_v = v.exact_total()? * 2;
    let one = Rational64::from_integer(1);
    let two = Rational64::from_integer(2);
    let num = ExactConst::pi_pow((big_n - one) * half())
        * ExactConst::gamma((two + kk * 2 - big_n) * half())?
        * ExactConst::gamma((one - kk * 2) * half())?
        * ExactConst::gamma(kk * 2)?;
    let den = ExactConst::gamma((two + kk * 2 - p - two_v) * half())?
        * ExactConst::gamma((p - kk * 2) * half())?;
    num / den
}

pub fn eval_r(k: usize, x: &ConePoint, v: &WeightVector, split: &SignatureSplit) -> Result<f64> {
    v.check_dim(x.x.dim())?;
    let kn = const_kn(k, v, split)?.to_f64();
    Ok(x.v_form.powf(0.5 * kernel_exponent(k, v)) / kn)
}

/// `C(v, m, k, n)`, the coefficient of `S_{2(k+m)}`.
pub fn const_c(v: &WeightVector, m: usize, k: usize) -> Result<ExactConst> {
    s_coefficient(m + k, v)
}

/// `c |x|^lambda` as a field with first and second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPower {
    pub coef: f64,
    pub exponent: f64,
}

impl ScalarField for RadialPower {
    fn eval(&self, x: &[f64]) -> f64 {
        self.coef * norm(x).powf(self.exponent)
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::SingularAtOrigin
    }

    fn smoothness_order(&self) -> usize {
        2
    }

    fn partial(&self, multi_index: &[usize], x: &[f64]) -> Option<f64> {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let lam = self.exponent;
        let base = |p: f64| self.coef * r2.powf(0.5 * lam - p);
        let nonzero: Vec<(usize, usize)> = multi_index.iter().copied().enumerate().filter(|&(_, d)| d > 0).collect();
        match nonzero.as_slice() {
            [] => Some(self.eval(x)),
            [(i, 1)] => Some(lam * x[*i] * base(1.0)),
            [(i, 2)] => Some(lam * base(1.0) + lam * (lam - 2.0) * x[*i] * x[*i] * base(2.0)),
            [(i, 1), (j, 1)] => Some(lam * (lam - 2.0) * x[*i] * x[*j] * base(2.0)),
            _ => None,
        }
    }
}

/// `c V^{lambda/2}` on the cone, with first and second partials.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePower {
    pub coef: f64,
    pub exponent: f64,
    pub split: SignatureSplit,
}

impl ScalarField for ConePower {
    fn eval(&self, x: &[f64]) -> f64 {
        let vf = self.split.quadratic_form(x);
        if vf <= 0.0 {
            return f64::NAN;
        }
        self.coef * vf.powf(0.5 * self.exponent)
    }

    fn decay_class(&self) -> DecayClass {
        DecayClass::SingularAtOrigin
    }

    fn smoothness_order(&self) -> usize {
        2
    }

    fn partial(&self, multi_index: &[usize], x: &[f64]) -> Option<f64> {
        let vf = self.split.quadratic_form(x);
        if vf <= 0.0 {
            return None;
        }
        let s = self.split.signs();
        let h = 0.5 * self.exponent;
        let base = |p: f64| self.coef * vf.powf(h - p);
        let nonzero: Vec<(usize, usize)> = multi_index.iter().copied().enumerate().filter(|&(_, d)| d > 0).collect();
        match nonzero.as_slice() {
            [] => Some(self.eval(x)),
            [(i, 1)] => Some(2.0 * h * s[*i] * x[*i] * base(1.0)),
            [(i, 2)] => Some(2.0 * h * s[*i] * base(1.0) + 4.0 * h * (h - 1.0) * x[*i] * x[*i] * base(2.0)),
            [(i, 1), (j, 1)] => Some(4.0 * h * (h - 1.0) * s[*i] * s[*j] * x[*i] * x[*j] * base(2.0)),
            _ => None,
        }
    }
}

pub fn s_field(k: usize, v: &WeightVector) -> Result<RadialPower> {
    Ok(RadialPower { coef: s_coefficient(k, v)?.to_f64(), exponent: kernel_exponent(k, v) })
}

pub fn r_field(k: usize, v: &WeightVector, split: &SignatureSplit) -> Result<ConePower> {
    Ok(ConePower {
        coef: 1.0 / const_kn(k, v, split)?.to_f64(),
        exponent: kernel_exponent(k, v),
        split: *split,
    })
}

/// `C_v Q^k`, the image of `diamond_B^k delta`.
pub fn fb_diamond_delta(k: usize, x: &PositivePoint, v: &WeightVector, split: &SignatureSplit) -> Result<f64> {
    v.check_dim(x.dim())?;
    split.check(x.dim())?;
    Ok(transform_constant(v) * split.bracket(x.coords()).powi(k as i32))
}

/// `C_v / Q^k`, the image of the diamond kernel `(-1)^k S_{2k} * R_{2k}`.
pub fn fb_diamond_kernel(k: usize, x: &PositivePoint, v: &WeightVector, split: &SignatureSplit) -> Result<f64> {
    v.check_dim(x.dim())?;
    split.check(x.dim())?;
    let q = split.bracket(x.coords());
    let r2: f64 = x.coords().iter().map(|c| c * c).sum();
    if q.abs() <= 1e-12 * r2 * r2 {
        return Err(Error::Singular(format!("bracket vanishes at {:?}", x.coords())));
    }
    Ok(transform_constant(v) / q.powi(k as i32))
}

/// Exact image `coefficient * Q^power`.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketImage {
    pub coefficient: ExactConst,
    pub power: i64,
}

impl BracketImage {
    pub fn mul(&self, other: &BracketImage) -> BracketImage {
        BracketImage { coefficient: self.coefficient.clone() * other.coefficient.clone(), power: self.power + other.power }
    }

    /// Multiply by the bare bracket `Q^r`.
    pub fn times_bracket(&self, r: i64) -> BracketImage {
        BracketImage { coefficient: self.coefficient.clone(), power: self.power + r }
    }

    pub fn eval(&self, x: &[f64], split: &SignatureSplit) -> f64 {
        self.coefficient.to_f64() * split.bracket(x).powi(self.power as i32)
    }

    pub fn is_constant(&self) -> bool {
        self.power == 0
    }
}

pub fn diamond_delta_image(k: usize, v: &WeightVector) -> Result<BracketImage> {
    Ok(BracketImage { coefficient: transform_constant_exact(v)?, power: k as i64 })
}

pub fn diamond_kernel_image(k: usize, v: &WeightVector) -> Result<BracketImage> {
    Ok(BracketImage { coefficient: transform_constant_exact(v)?, power: -(k as i64) })
}

/// Image of `S_{2k}` through the power-law rule, `c_S(k) F_B |y|^{2k-N}`.
///
/// Both factors carry `Gamma((N-2k)/2)` (numerator of `c_S`, denominator of
/// the power-law image); they are cancelled by hand, leaving
/// `C_v 2^{N/2-2k} Gamma(k) |x|^{-2k}`, finite even where `c_S` has a pole.
pub fn s_image(k: usize, v: &WeightVector) -> Result<PowerLaw> {
    if k == 0 {
        return Err(Error::Domain { context: "kernel order", value: 0.0 });
    }
    let big_n = v.exact_homogeneous_dim()?;
    let kk = Rational64::from_integer(k as i64);
    let coef = transform_constant_exact(v)? * ExactConst::pow2(big_n * half() - kk * 2) * ExactConst::gamma(kk)?;
    Ok(PowerLaw::new(coef, -kk * 2))
}

/// `c_S(k) F_B |y|^{2k-N}` without the cancellation; degenerate where either
/// factor is.
pub fn s_image_uncancelled(k: usize, v: &WeightVector) -> Result<PowerLaw> {
    let alpha = -kernel_exponent_exact(k, v)?;
    let base = fb_powerlaw_exact(alpha, v.dim(), v)?;
    Ok(base.scale(&s_coefficient(k, v)?))
}

/// The image `-|x|^{-2k}` stated for `S_{2k}`.
pub fn s_image_claimed(k: usize) -> PowerLaw {
    PowerLaw::new(-ExactConst::one(), Rational64::from_integer(-2 * k as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    E,
    S,
    R,
    DiamondConv,
    DiracIterate,
}

/// A symbolic kernel term.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub order: usize,
    pub v: WeightVector,
    pub split: Option<SignatureSplit>,
    /// Gamma argument at a pole, if any constant of the family is degenerate.
    pub degenerate: Option<String>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, order: usize, v: WeightVector, split: Option<SignatureSplit>) -> Result<Self> {
        if let Some(s) = &split {
            s.check(v.dim())?;
        }
        let needs_split = matches!(family, KernelFamily::R | KernelFamily::DiamondConv);
        if needs_split && split.is_none() {
            return Err(Error::Config(format!("{family:?} kernels need a (p, q) split")));
        }
        if matches!(family, KernelFamily::S | KernelFamily::R | KernelFamily::DiamondConv) && order == 0 {
            return Err(Error::Domain { context: "kernel order", value: 0.0 });
        }
        let check = match family {
            KernelFamily::E => s_coefficient(1, &v).map(|_| ()),
            KernelFamily::S => s_coefficient(order, &v).map(|_| ()),
            KernelFamily::R => const_kn(order, &v, split.as_ref().expect("checked")).map(|_| ()),
            KernelFamily::DiamondConv => s_coefficient(order, &v)
                .and_then(|_| const_kn(order, &v, split.as_ref().expect("checked")).map(|_| ())),
            KernelFamily::DiracIterate => Ok(()),
        };
        let degenerate = match check {
            Ok(()) => None,
            Err(Error::Degenerate { argument }) => Some(argument),
            Err(e) => return Err(e),
        };
        Ok(Self { family, order, v, split, degenerate })
    }

    /// Pointwise value for the function-valued families.
    pub fn eval(&self, x: &PositivePoint) -> Result<f64> {
        if let Some(arg) = &self.degenerate {
            return Err(Error::Degenerate { argument: arg.clone() });
        }
        match self.family {
            KernelFamily::E => eval_e(x, &self.v),
            KernelFamily::S => eval_s(self.order, x, &self.v),
            KernelFamily::R => {
                let split = self.split.as_ref().expect("checked at construction");
                let cp = ConePoint::new(x.clone(), split)?;
                eval_r(self.order, &cp, &self.v, split)
            }
            KernelFamily::DiamondConv | KernelFamily::DiracIterate => Err(Error::Capability(format!(
                "{:?} is a distribution; use its Fourier image",
                self.family
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermTag {
    /// an ordinary function (`2k - 2r >= N`)
    Ordinary,
    /// a tempered distribution that is not an ordinary function
    Tempered,
    /// a finite combination of `delta` and its diamond iterates
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTerm {
    pub coefficient: f64,
    pub kernel: KernelSpec,
    pub tag: TermTag,
}

/// Which of the three solution shapes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionCase {
    Elementary,
    Mixed,
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiamondSolution {
    pub case: SolutionCase,
    pub terms: Vec<SolutionTerm>,
    /// whether the split satisfies the parity hypothesis (recorded, not enforced)
    pub parity_hypothesis: bool,
}

/// Symbolic solution of `diamond_B^k u = sum_{r=0}^m c_r diamond_B^r delta`.
///
/// * `m = 0`: `c_0 (-1)^k S_{2k} * R_{2k}`.
/// * `0 < m < k`: the diamond kernels of order `k - r` for `r = 1..m`.
/// * `m >= k`: `c_r diamond_B^{r-k} delta` for `r = k..m`.
pub fn solve_diamond_rhs(k: usize, coeffs: &[f64], v: &WeightVector, split: &SignatureSplit) -> Result<DiamondSolution> {
    if k == 0 {
        return Err(Error::Domain { context: "diamond order", value: 0.0 });
    }
    if coeffs.is_empty() {
        return Err(Error::Config("at least c_0 is required".into()));
    }
    split.check(v.dim())?;
    let m = coeffs.len() - 1;
    let big_n = v.exact_homogeneous_dim()?;
    let tag_for = |order: usize| {
        if Rational64::from_integer(2 * order as i64) >= big_n {
            TermTag::Ordinary
        } else {
            TermTag::Tempered
        }
    };
    let diamond = |order: usize| KernelSpec::new(KernelFamily::DiamondConv, order, v.clone(), Some(*split));
    let mut terms = Vec::new();
    let case = if m == 0 {
        terms.push(SolutionTerm { coefficient: coeffs[0], kernel: diamond(k)?, tag: tag_for(k) });
        SolutionCase::Elementary
    } else if m < k {
        for r in 1..=m {
            terms.push(SolutionTerm { coefficient: 1.0, kernel: diamond(k - r)?, tag: tag_for(k - r) });
        }
        SolutionCase::Mixed
    } else {
        for (r, &c) in coeffs.iter().enumerate().skip(k) {
            terms.push(SolutionTerm {
                coefficient: c,
                kernel: KernelSpec::new(KernelFamily::DiracIterate, r - k, v.clone(), Some(*split))?,
                tag: TermTag::Singular,
            });
        }
        SolutionCase::Singular
    };
    Ok(DiamondSolution { case, terms, parity_hypothesis: split.parity_hypothesis() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::check_partials;
    use approx::assert_relative_eq;

    fn w(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn pt(c: &[f64]) -> PositivePoint {
        PositivePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn kn_examples() {
        let v1 = w(&[0.5]);
        let s1 = SignatureSplit::new(1, 0).unwrap();
        let k = const_kn(1, &v1, &s1).unwrap();
        // pi^{1/2} Gamma(1) Gamma(-1/2) Gamma(2) / (Gamma(1) Gamma(-1/2)) = sqrt(pi)
        assert_relative_eq!(k.to_f64(), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        let v2 = w(&[0.5, 0.5]);
        let s2 = SignatureSplit::new(2, 0).unwrap();
        assert_eq!(const_kn(1, &v2, &s2), Err(Error::Degenerate { argument: "0".into() }));
        // n = 3, p = 3, half weights: Gamma((2 + 2 - 6)/2) = Gamma(-1) in the numerator
        let v3 = w(&[0.5, 0.5, 0.5]);
        let s3 = SignatureSplit::new(3, 0).unwrap();
        assert_eq!(const_kn(1, &v3, &s3), Err(Error::Degenerate { argument: "-1".into() }));
    }

    #[test]
    fn s_and_e() {
        let v = w(&[0.5, 0.5]);
        // N = 4, k = 1: 2^0 Gamma(1) / (1 * 1) = 1
        assert_eq!(s_coefficient(1, &v).unwrap(), ExactConst::one());
        let x = pt(&[0.6, 0.8]);
        assert_relative_eq!(eval_s(1, &x, &v).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(eval_e(&x, &v).unwrap() + eval_s(1, &x, &v).unwrap(), 0.0, epsilon = 1e-15);
        assert_eq!(kernel_exponent_exact(1, &v).unwrap(), Rational64::from_integer(-2));
        let x2 = x.scaled(2.0).unwrap();
        let v3 = w(&[0.6, 1.1]);
        let ratio = eval_s(2, &x2, &v3).unwrap() / eval_s(2, &x, &v3).unwrap();
        assert_relative_eq!(ratio, 2f64.powf(4.0 - 2.0 - 3.4), max_relative = 1e-12);
    }

    #[test]
    fn elementary_and_stated_s_coefficients_agree_when_n_is_four() {
        let v = w(&[0.5, 0.5]);
        assert_eq!(s_coefficient(1, &v).unwrap(), s_coefficient_elementary(1, &v).unwrap());
        let v = w(&[0.5, 0.5, 0.5]);
        let ratio = s_coefficient(1, &v).unwrap().to_f64() / s_coefficient_elementary(1, &v).unwrap().to_f64();
        // 2^{N/2 - 2k} Gamma(k) with N = 6
        assert_relative_eq!(ratio, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn cone_membership() {
        let split = SignatureSplit::new(1, 1).unwrap();
        assert!(ConePoint::new(pt(&[2.0, 1.0]), &split).is_ok());
        assert!(matches!(ConePoint::new(pt(&[1.0, 2.0]), &split), Err(Error::OutsideCone(_))));
        assert!(matches!(ConePoint::new(pt(&[1.0, 1.0]), &split), Err(Error::OutsideCone(_))));
    }

    #[test]
    fn r_scaling_and_euler() {
        let v = w(&[0.6, 0.7, 1.3]);
        let split = SignatureSplit::new(1, 2).unwrap();
        let x = pt(&[2.0, 0.5, 0.4]);
        let cp = ConePoint::new(x.clone(), &split).unwrap();
        let cp3 = ConePoint::new(x.scaled(3.0).unwrap(), &split).unwrap();
        let lam = kernel_exponent(1, &v);
        let ratio = eval_r(1, &cp3, &v, &split).unwrap() / eval_r(1, &cp, &v, &split).unwrap();
        assert_relative_eq!(ratio, 3f64.powf(lam), max_relative = 1e-12);
        let r = r_field(1, &v, &split).unwrap();
        check_partials(&r, &[x.coords().to_vec()], 1e-5).unwrap();
        let euler: f64 = (0..3).map(|i| {
            let mut e = [0usize; 3];
            e[i] = 1;
            x.coords()[i] * r.partial(&e, x.coords()).unwrap()
        }).sum();
        assert_relative_eq!(euler, lam * r.eval(x.coords()), max_relative = 1e-12);
    }

    #[test]
    fn radial_power_partials() {
        let s = s_field(1, &w(&[0.6, 0.9])).unwrap();
        check_partials(&s, &[vec![0.5, 1.2], vec![2.0, 0.3]], 1e-5).unwrap();
    }

    #[test]
    fn diamond_images() {
        let v = w(&[0.5, 0.5, 0.5]);
        let split = SignatureSplit::new(2, 1).unwrap();
        let x = pt(&[1.0, 1.0, 1.0]);
        assert_relative_eq!(fb_diamond_delta(1, &x, &v, &split).unwrap(), 3.0, max_relative = 1e-15);
        assert_relative_eq!(fb_diamond_delta(0, &x, &v, &split).unwrap(), 1.0, max_relative = 1e-15);
        let s11 = SignatureSplit::new(1, 1).unwrap();
        let v2 = w(&[1.0, 1.0]);
        assert_eq!(fb_diamond_delta(2, &pt(&[1.0, 1.0]), &v2, &s11).unwrap(), 0.0);
        assert!(matches!(fb_diamond_kernel(1, &pt(&[1.0, 1.0]), &v2, &s11), Err(Error::Singular(_))));
        let cv = transform_constant(&v2);
        let y = pt(&[1.7, 0.6]);
        let prod = fb_diamond_delta(2, &y, &v2, &s11).unwrap() * fb_diamond_kernel(2, &y, &v2, &s11).unwrap();
        assert_relative_eq!(prod, cv * cv, max_relative = 1e-12);
    }

    #[test]
    fn combinator_cases() {
        let v = w(&[0.5, 0.5, 0.5]);
        let split = SignatureSplit::new(2, 1).unwrap();
        let a = solve_diamond_rhs(2, &[1.0], &v, &split).unwrap();
        assert_eq!(a.case, SolutionCase::Elementary);
        assert_eq!(a.terms.len(), 1);
        assert_eq!(a.terms[0].kernel.family, KernelFamily::DiamondConv);
        assert_eq!(a.terms[0].kernel.order, 2);
        let b = solve_diamond_rhs(3, &[1.0, 2.0, 3.0], &v, &split).unwrap();
        let orders: Vec<usize> = b.terms.iter().map(|t| t.kernel.order).collect();
        assert_eq!(orders, vec![2, 1]);
        // N = 6: 2(k - r) = 4, 2 are both below N
        assert!(b.terms.iter().all(|t| t.tag == TermTag::Tempered));
        let c = solve_diamond_rhs(1, &[1.0, 2.0, 3.0], &v, &split).unwrap();
        let orders: Vec<usize> = c.terms.iter().map(|t| t.kernel.order).collect();
        assert_eq!(orders, vec![0, 1]);
        assert_eq!(c.terms.iter().map(|t| t.coefficient).collect::<Vec<_>>(), vec![2.0, 3.0]);
        assert!(c.terms.iter().all(|t| t.kernel.family == KernelFamily::DiracIterate));
    }

    #[test]
    fn degenerate_kernels_are_flagged_not_fatal() {
        let v = w(&[0.5, 0.5]);
        let split = SignatureSplit::new(2, 0).unwrap();
        let spec = KernelSpec::new(KernelFamily::R, 1, v, Some(split)).unwrap();
        assert_eq!(spec.degenerate.as_deref(), Some("0"));
        assert!(matches!(spec.eval(&pt(&[1.0, 1.0])), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn s_image_through_power_law_rule() {
        let v = w(&[0.5, 0.5]);
        let img = s_image(1, &v).unwrap();
        assert_eq!(img.exponent, Rational64::from_integer(-2));
        // C_v 2^{N/2 - 2} Gamma(1) = 1 for N = 4
        assert_eq!(img.coefficient, Some(ExactConst::one()));
        let generic = w(&[0.6, 0.9, 1.3]);
        for k in 1..=3 {
            assert_eq!(s_image(k, &generic).unwrap(), s_image_uncancelled(k, &generic).unwrap());
        }
        // N = 4, k = 2: c_S has Gamma(0), the image is still finite
        assert!(s_coefficient(2, &v).is_err());
        assert!(s_image(2, &v).unwrap().coefficient.is_some());
    }
}
