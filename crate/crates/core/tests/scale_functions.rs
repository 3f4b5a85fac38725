mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twolayer_core::expsum::{BelowZero, ExpSum, Term};
use twolayer_core::scale::Monotone;
use twolayer_core::{Error, Process, ScaleSet, Side};

fn expo_scales() -> ScaleSet {
    ScaleSet::build(&expo_model(), 0.2).unwrap()
}

fn weibull_scales() -> ScaleSet {
    ScaleSet::build(&weibull_model(1.0), WEIBULL_Q).unwrap()
}

/// `int_c^z WW(z - y) g(y) dy`, split at the kink of `g` at zero.
fn conv_oracle(s: &ScaleSet, g: impl Fn(f64) -> f64, c: f64, z: f64) -> f64 {
    if z <= c {
        // WW(z - y) = 0 on (z, c]
        return 0.0;
    }
    let ww = s.family(Process::Y).w();
    let f = |y: f64| ww.eval(z - y) * g(y);
    if c < 0.0 && z > 0.0 {
        simpson(&f, c, 0.0, 1e-13) + simpson(&f, 0.0, z, 1e-13)
    } else {
        simpson(&f, c, z, 1e-13)
    }
}

fn r_oracle(s: &ScaleSet, c: f64, z: f64) -> f64 {
    let x = s.family(Process::X);
    x.z().eval(z) + s.q() * s.delta() * conv_oracle(s, |y| x.w().eval(y), c, z)
}

fn rt_oracle(s: &ScaleSet, c: f64, z: f64) -> f64 {
    let x = s.family(Process::X);
    s.big_r().eval(z) + s.delta() * conv_oracle(s, |y| x.z().eval(y), c, z)
}

#[test]
fn exponential_closed_form() {
    let s = expo_scales();
    let w = s.family(Process::X).w();
    for x in [0.0f64, 0.3, 1.0, 2.5, 7.0] {
        let want = (2.0 * x).exp() / 0.6 - (-2.0 * x / 11.0).exp() / 1.32;
        assert_relative_eq!(w.eval(x), want, max_relative = 1e-10);
    }
    assert_relative_eq!(w.eval(0.0), 1.0 / 1.1, epsilon = 1e-10);
    assert_relative_eq!(s.family(Process::Y).w().eval(0.0), 1.0, epsilon = 1e-10);
}

#[test]
fn values_below_zero() {
    for s in [expo_scales(), weibull_scales()] {
        for which in [Process::Y, Process::X] {
            let f = s.family(which);
            assert_eq!(f.z().eval(-3.0), 1.0);
            assert_eq!(f.zbar().eval(-3.0), -3.0);
            assert_eq!(f.wbar().eval(-3.0), 0.0);
            assert_eq!(f.w().eval(-3.0), 0.0);
        }
    }
}

#[test]
fn boundary_values_at_zero() {
    let s = expo_scales();
    let bx = s.boundary_values(Process::X);
    assert_relative_eq!(bx.w_zero, 1.0 / 1.1, epsilon = 1e-10);
    assert_relative_eq!(bx.w_prime_zero, (0.2 + 4.0) / (1.1 * 1.1), epsilon = 1e-8);
    let by = s.boundary_values(Process::Y);
    assert_relative_eq!(by.w_prime_zero, (0.2 + 4.0) / 1.0, epsilon = 1e-8);

    let s = weibull_scales();
    for which in [Process::Y, Process::X] {
        let b = s.boundary_values(which);
        assert!(b.w_zero.abs() < 1e-10, "{which:?}: W(0) = {}", b.w_zero);
        assert_relative_eq!(b.w_prime_zero, 2.0 / (0.2 * 0.2), epsilon = 1e-8);
    }
}

#[test]
fn scale_functions_increasing() {
    for (s, hi) in [(expo_scales(), 6.0), (weibull_scales(), 20.0)] {
        for which in [Process::Y, Process::X] {
            let w = s.family(which).w();
            let mut prev = w.eval(0.0);
            assert!(prev >= -1e-12);
            for i in 1..1000 {
                let v = w.eval(hi * i as f64 / 999.0);
                assert!(v >= prev, "{which:?} decreases at step {i}");
                prev = v;
            }
        }
    }
}

#[test]
fn integral_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for s in [expo_scales(), weibull_scales()] {
        for which in [Process::Y, Process::X] {
            let f = s.family(which);
            for _ in 0..20 {
                let x = rng.random_range(0.05..8.0);
                let dz = fd(|t| f.z().eval(t), x, 1e-5);
                assert!(rel_err(dz, s.q() * f.w().eval(x)) < 1e-6);
                let dzbar = fd(|t| f.zbar().eval(t), x, 1e-5);
                assert!(rel_err(dzbar, f.z().eval(x)) < 1e-6);
            }
        }
    }
}

#[test]
fn r_functions_trivial_ranges() {
    let s = expo_scales();
    for c in [0.0, 0.5, 2.0] {
        assert_eq!(s.r_fn(c, -0.7), 1.0);
        assert_relative_eq!(s.r_fn(c, 0.0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(s.rt_fn(c, -0.7), -0.7 - 4.5, epsilon = 1e-12);
        assert_relative_eq!(s.rt_fn(c, 0.0), -4.5, epsilon = 1e-12);
    }
    // empty effective range z <= c: r reduces to Z
    assert_relative_eq!(s.r_fn(3.0, 2.0), s.family(Process::X).z().eval(2.0), epsilon = 1e-14);
}

#[test]
fn r_functions_match_quadrature() {
    let s = expo_scales();
    assert!(rel_err(s.r_fn(2.0, 3.0), r_oracle(&s, 2.0, 3.0)) < 1e-8);
    assert!(rel_err(s.rt_fn(2.0, 3.0), rt_oracle(&s, 2.0, 3.0)) < 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in [expo_scales(), weibull_scales()] {
        for _ in 0..50 {
            let c = rng.random_range(-1.0..5.0);
            let z = rng.random_range(-1.0..6.0);
            let (r, ro) = (s.r_fn(c, z), r_oracle(&s, c, z));
            assert!((r - ro).abs() <= 1e-7 * ro.abs().max(1.0), "r_{c}({z}): {r} vs {ro}");
            let (rt, rto) = (s.rt_fn(c, z), rt_oracle(&s, c, z));
            assert!((rt - rto).abs() <= 1e-7 * rto.abs().max(1.0), "rt_{c}({z}): {rt} vs {rto}");
        }
    }
}

#[test]
fn r_derivatives_match_finite_differences() {
    let s = weibull_scales();
    for (c, z) in [(1.0, 2.5), (0.5, 4.0), (3.0, 3.5)] {
        let d = s.r_deriv(c, z, 1, Side::Above);
        assert!(rel_err(d, fd(|t| s.r_fn(c, t), z, 1e-5)) < 1e-6);
        let d = s.rt_deriv(c, z, 1, Side::Above);
        assert!(rel_err(d, fd(|t| s.rt_fn(c, t), z, 1e-5)) < 1e-6);
    }
}

#[test]
fn monotone_inverses() {
    let s = expo_scales();
    assert_eq!(s.inverse(Process::Y, Monotone::Z, 1.0).unwrap(), 0.0);
    assert_eq!(s.inverse(Process::Y, Monotone::ZBar, 0.0).unwrap(), 0.0);
    let target = 0.1 / 0.12 + 4.5;
    let b0 = s.inverse(Process::Y, Monotone::ZBar, target).unwrap();
    assert!((s.family(Process::Y).zbar().eval(b0) - target).abs() < 1e-10);
    let k = s.inverse(Process::X, Monotone::Z, 1.0 / 0.6).unwrap();
    assert!((s.family(Process::X).z().eval(k) - 1.0 / 0.6).abs() < 1e-10);
    assert!(matches!(s.inverse(Process::Y, Monotone::Z, 0.5), Err(Error::OutOfRange { .. })));
    assert!(matches!(s.inverse(Process::Y, Monotone::ZBar, -0.1), Err(Error::OutOfRange { .. })));
}

#[test]
fn laplace_transform_identity() {
    let m = expo_model();
    let s = expo_scales();
    assert!(s.verify_laplace(&m, Process::X, 3.0).unwrap() < 1e-10);
    let root = s.family(Process::X).roots.positive_root;
    assert!(matches!(s.verify_laplace(&m, Process::X, root), Err(Error::OutOfRange { .. })));

    let m = weibull_model(1.0);
    let s = weibull_scales();
    let phi = s.family(Process::Y).roots.positive_root;
    assert!(s.verify_laplace(&m, Process::Y, phi + 1.0).unwrap() < 1e-8);
}

#[test]
fn laplace_transform_by_quadrature() {
    // independent of the termwise transform
    let s = expo_scales();
    let w = s.family(Process::X).w();
    let theta = 3.0;
    let num = simpson(&|x: f64| (-theta * x).exp() * w.eval(x), 0.0, 60.0, 1e-12);
    let want = 1.0 / (expo_model().psi(Process::X, theta).unwrap() - 0.2);
    assert!((num - want).abs() < 1e-8);
}

fn exp_sum() -> impl Strategy<Value = ExpSum> {
    prop::collection::vec((-3.0f64..3.0, -2.0f64..1.5), 1..5).prop_map(|v| {
        ExpSum::new(v.into_iter().map(|(c, r)| Term::real(c, r)).collect(), BelowZero::Zero)
    })
}

proptest! {
    #[test]
    fn integral_then_derivative(f in exp_sum(), x in 0.01f64..4.0) {
        let back = f.integral().derivative();
        prop_assert!((back.eval(x) - f.eval(x)).abs() < 1e-9 * f.eval(x).abs().max(1.0));
        prop_assert!(f.integral().eval(0.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_difference(f in exp_sum(), x in 0.1f64..4.0) {
        let d = f.derivative().eval(x);
        let num = fd(|t| f.eval(t), x, 1e-5);
        prop_assert!((d - num).abs() < 1e-6 * d.abs().max(1.0));
    }

    #[test]
    fn laplace_matches_terms(coef in -3.0f64..3.0, rate in -2.0f64..1.0, theta in 1.5f64..6.0) {
        let f = ExpSum::new(vec![Term::real(coef, rate)], BelowZero::Zero);
        let want = coef / (theta - rate);
        prop_assert!((f.laplace(theta).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0));
    }
}
