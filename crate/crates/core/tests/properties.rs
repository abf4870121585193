use besselkit_core::audit::{run_suite, AuditConfig};
use besselkit_core::fbt::powerlaw_round_trip;
use besselkit_core::field::FnField;
use besselkit_core::kernels::{diamond_kernel_image, r_field, s_field, s_image, BracketImage, SignatureSplit};
use besselkit_core::shiftconv::shift;
use besselkit_core::specfun::{gamma_f64, normalized_j};
use besselkit_core::{fbt, ExactConst, GaussPoly, PositivePoint, QuadSpec, ScalarField, WeightVector};
use num_rational::Rational64;
use proptest::prelude::*;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        Dd::two_sum(s.0, lo)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.0 * b;
        let e = self.0.mul_add(b, -p);
        Dd::two_sum(p, e + self.1 * b)
    }

    fn div_f(self, b: f64) -> Dd {
        let q = self.0 / b;
        let r = Dd::two_sum(self.0, -(q * b)).add(Dd(-(q.mul_add(b, -(q * b))), 0.0)).add(Dd(self.1, 0.0));
        Dd::two_sum(q, r.0 / b)
    }
}

/// `sum_m (-t^2/4)^m / (m! (mu+1)_m)` in double-double; no Gamma values needed.
fn normalized_j_series(mu: f64, t: f64) -> f64 {
    let z = -0.25 * t * t;
    let mut term = Dd(1.0, 0.0);
    let mut sum = Dd(1.0, 0.0);
    for m in 1..200 {
        let m = m as f64;
        term = term.mul_f(z).div_f(m).div_f(mu + m);
        sum = sum.add(term);
        if term.0.abs() < 1e-34 {
            break;
        }
    }
    sum.0 + sum.1
}

fn pt(c: &[f64]) -> PositivePoint {
    PositivePoint::new(c.to_vec()).unwrap()
}

/// Rational weights in `[1/2, 3]` with denominator 10.
fn rational_weights(n: usize) -> impl Strategy<Value = Vec<Rational64>> {
    proptest::collection::vec(5i64..=30, n).prop_map(|v| v.into_iter().map(|a| Rational64::new(a, 10)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma_f64(x + 1.0).unwrap();
        let rhs = x * gamma_f64(x).unwrap();
        // each evaluation carries the ~2e-15 error of the Lanczos fit
        prop_assert!((lhs - rhs).abs() <= 8e-15 * lhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn gamma_reflection(x in 0.01f64..0.99) {
        let prod = gamma_f64(x).unwrap() * gamma_f64(1.0 - x).unwrap();
        let want = std::f64::consts::PI / (std::f64::consts::PI * x).sin();
        prop_assert!((prod - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn normalized_j_matches_series(v in 0.5f64..3.0, t in 0.0f64..10.0) {
        let got = normalized_j(v, t).unwrap();
        let want = normalized_j_series(v - 0.5, t);
        prop_assert!((got - want).abs() <= 2e-14, "j({v}, {t}) = {got}, series {want}");
    }

    #[test]
    fn normalized_j_is_bounded(v in 0.5f64..3.0, t in 0.0f64..80.0) {
        prop_assert!(normalized_j(v, t).unwrap().abs() <= 1.0 + 1e-14);
    }

    #[test]
    fn shift_preserves_constants(v in proptest::collection::vec(0.5f64..2.5, 1..=3), x in 0.05f64..3.0, y in 0.05f64..3.0) {
        let w = WeightVector::new(v.clone()).unwrap();
        let n = v.len();
        let c = FnField::rapid(|_: &[f64]| 2.5);
        let s = shift(&c, &pt(&vec![x; n]), &pt(&vec![y; n]), &w, &QuadSpec::default()).unwrap();
        prop_assert!((s - 2.5).abs() < 1e-12);
    }

    #[test]
    fn shift_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, x in 0.1f64..2.0, y in 0.1f64..2.0, v in 0.5f64..2.0) {
        let w = WeightVector::new(vec![v, v + 0.3]).unwrap();
        let spec = QuadSpec::default();
        let f = GaussPoly::gaussian(2, 0.7).unwrap();
        let g = GaussPoly::anisotropic(vec![1.2, 0.4]).unwrap();
        let h = f.clone().scale(a).add(g.clone().scale(b)).unwrap();
        let (px, py) = (pt(&[x, y]), pt(&[y, x]));
        let lhs = shift(&h, &px, &py, &w, &spec).unwrap();
        let rhs = a * shift(&f, &px, &py, &w, &spec).unwrap() + b * shift(&g, &px, &py, &w, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + lhs.abs()));
    }

    #[test]
    fn powerlaw_transform_is_an_involution(num in 1i64..40, v in rational_weights(2)) {
        let w = WeightVector::from_rationals(v).unwrap();
        let alpha = Rational64::new(num, 10);
        prop_assume!(alpha < w.exact_homogeneous_dim().unwrap());
        let (first, second, product) = powerlaw_round_trip(alpha, 2, &w).unwrap();
        prop_assert_eq!(second.exponent, -alpha);
        prop_assert_eq!(first.exponent, alpha - w.exact_homogeneous_dim().unwrap());
        if let Some(p) = product {
            prop_assert!(fbt::is_exact_one(&p), "product {}", p);
        }
    }

    #[test]
    fn exact_constants_cancel(a in 1i64..20, b in 1i64..20, g in 1i64..30) {
        let x = ExactConst::rational(Rational64::new(a, b)) * ExactConst::pow2(Rational64::new(a, 7)) * ExactConst::gamma(Rational64::new(g, 6)).unwrap();
        let back = (x.clone() / x.clone()).unwrap();
        prop_assert_eq!(back, ExactConst::one());
        prop_assert_eq!(x.recip().unwrap().recip().unwrap(), x);
    }

    #[test]
    fn s_image_exponents_add(k in 1usize..4, m in 1usize..4, v in rational_weights(3)) {
        let w = WeightVector::from_rationals(v).unwrap();
        let product = s_image(k, &w).unwrap().mul(&s_image(m, &w).unwrap());
        prop_assert_eq!(product.exponent, s_image(k + m, &w).unwrap().exponent);
    }

    #[test]
    fn diamond_kernels_compose(k in 1usize..4, m in 1usize..4, v in rational_weights(3)) {
        let w = WeightVector::from_rationals(v).unwrap();
        let lhs = diamond_kernel_image(k, &w).unwrap().mul(&diamond_kernel_image(m, &w).unwrap());
        let target = diamond_kernel_image(k + m, &w).unwrap();
        let cv = fbt::transform_constant_exact(&w).unwrap();
        prop_assert_eq!(lhs, BracketImage { coefficient: target.coefficient * cv, power: target.power });
    }

    #[test]
    fn kernels_are_homogeneous(scale in 0.2f64..5.0, a in 0.5f64..3.0, b in 0.1f64..0.9, c in 0.1f64..0.9) {
        let w = WeightVector::new(vec![0.6, 0.7, 1.3]).unwrap();
        let split = SignatureSplit::new(1, 2).unwrap();
        // inside the cone: a^2 > (b a)^2 + (c a)^2 needs b^2 + c^2 < 1
        prop_assume!(b * b + c * c < 0.95);
        let x = [a, b * a, c * a];
        let xs: Vec<f64> = x.iter().map(|t| t * scale).collect();
        for k in 1..=2 {
            let lambda = 2.0 * k as f64 - 3.0 - 2.0 * 2.6;
            let s = s_field(k, &w).unwrap();
            let r = r_field(k, &w, &split).unwrap();
            let factor = scale.powf(lambda);
            prop_assert!((s.eval(&xs) - factor * s.eval(&x)).abs() <= 1e-12 * s.eval(&xs).abs());
            prop_assert!((r.eval(&xs) - factor * r.eval(&x)).abs() <= 1e-12 * r.eval(&xs).abs());
        }
    }
}

#[test]
fn exact_suites_are_deterministic() {
    let cfg = AuditConfig::new(WeightVector::new(vec![0.6, 0.7, 0.8]).unwrap(), SignatureSplit::new(2, 1).unwrap(), 2).unwrap();
    for suite in ["lemma5", "lemma7", "theorem3", "eq16"] {
        let mut a = run_suite(suite, &cfg).unwrap();
        let mut b = run_suite(suite, &cfg).unwrap();
        for r in a.iter_mut().chain(b.iter_mut()) {
            r.runtime_ms = 0;
        }
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn numerical_suite_is_bit_identical() {
    let cfg = AuditConfig::new(WeightVector::new(vec![0.5, 0.5]).unwrap(), SignatureSplit::new(2, 0).unwrap(), 1).unwrap();
    let strip = |mut rs: Vec<besselkit_core::audit::AuditReport>| {
        for r in &mut rs {
            r.runtime_ms = 0;
        }
        serde_json::to_string(&rs).unwrap()
    };
    assert_eq!(strip(run_suite("lemma2", &cfg).unwrap()), strip(run_suite("lemma2", &cfg).unwrap()));
}

#[test]
fn irrational_weights_work_numerically_but_not_exactly() {
    let w = WeightVector::new(vec![std::f64::consts::SQRT_2, 0.5]).unwrap();
    let f = GaussPoly::gaussian(2, 1.0).unwrap();
    let x = PositivePoint::new(vec![0.7, 1.2]).unwrap();
    let numeric = fbt::fb_numeric(&f, &x, &w, &QuadSpec::default()).unwrap();
    assert!((numeric - fbt::gaussian_transform(1.0, x.coords(), &w)).abs() < 1e-10);
    assert!(matches!(s_image(1, &w), Err(besselkit_core::Error::Precondition(_))));
}
