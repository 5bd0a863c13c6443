use bbf_core::kernels::*;
use bbf_core::quad::{integrate, Tolerance};
use proptest::prelude::*;

const PI: f64 = core::f64::consts::PI;

#[test]
fn heat_kernel_normalization_and_values() {
    let wide = Cutoff::new(10.0, 20.0, 5).unwrap();
    let tol = Tolerance::new(1e-13, 1e-13);
    let mass = integrate(|s| heat_kernel(&wide, 0.01, 3.0, s).unwrap().direct, -20.0, 20.0, &[3.0, 2.5, 3.5], tol).unwrap();
    assert!((mass.value - 1.0).abs() < 1e-10);

    let c = Cutoff::default();
    let k = heat_kernel(&c, 0.01, 5.0, 5.0).unwrap();
    assert!((k.direct - 1.0 / (4.0 * PI * 0.01).sqrt()).abs() < 1e-14);
    assert_eq!(k.image, 0.0);
    assert_eq!(k.remainder, 0.0);
    let (a, b) = (heat_kernel(&c, 0.2, 0.3, 0.7).unwrap(), heat_kernel(&c, 0.2, 0.7, 0.3).unwrap());
    assert_eq!(a, b);
    assert!(heat_kernel(&c, 0.2, f64::NAN, 0.1).is_err());
}

#[test]
fn erf_reduction_matches_quadrature() {
    let tol = Tolerance::new(1e-13, 1e-14);
    let s = KernelScale::new(0.01, 1.0).unwrap();
    let q = heat_time_integral_quad(&s, 1.0, tol).unwrap();
    assert!((heat_time_integral(&s, 1.0) - q).abs() < 1e-8);
    for i in 0..10 {
        let u = -1.0 + 0.2 * i as f64 + 0.05;
        for j in 0..10 {
            let eps = 1e-4 * 10f64.powf(3.0 * j as f64 / 9.0);
            let s = KernelScale::new(eps, 1.0).unwrap();
            let q = heat_time_integral_quad(&s, u, tol).unwrap();
            let c = heat_time_integral(&s, u);
            assert!((c - q).abs() < 1e-8, "u={u} eps={eps}: {c} vs {q}");
        }
    }
}

#[test]
fn noninvariant_limit_is_cutoff_times_sign() {
    let c = Cutoff::default();
    let s = KernelScale::new(1e-14, 1e18).unwrap();
    for i in 0..40 {
        let u = -1.2 + 0.06 * i as f64 + 0.013;
        let p = propagator_noninvariant(&c, &s, u);
        assert!((p - c.eval(u) * u.signum()).abs() < 1e-8, "u={u}");
    }
}

proptest! {
    #[test]
    fn propagator_symmetries(t1 in 0.0f64..1.5, t2 in 0.0f64..1.5, e in 0.001f64..0.05) {
        let c = Cutoff::default();
        let s = KernelScale::new(e, 4.0 * e).unwrap();
        let p = propagator(&c, &s, t1, t2).unwrap();
        let q = propagator(&c, &s, t2, t1).unwrap();
        prop_assert!((p.direct + q.direct).abs() < 1e-15);
        prop_assert_eq!(p.image, q.image);
        // reflecting t₁ swaps channels, the channel tensors differ by the Γ sign
        let r = propagator(&c, &s, -t1, t2).unwrap();
        prop_assert!((r.direct + p.image).abs() < 1e-15);
        prop_assert!((r.image + p.direct).abs() < 1e-15);
        let k = heat_kernel(&c, e, t1, t2).unwrap();
        let kr = heat_kernel(&c, e, -t1, t2).unwrap();
        prop_assert_eq!(kr.direct, k.image);
        prop_assert_eq!(kr.image, k.direct);
    }

    #[test]
    fn propagator_additivity(t1 in 0.0f64..1.2, t2 in 0.0f64..1.2, e in 0.001f64..0.05) {
        let c = Cutoff::default();
        let (l, l2) = (3.0 * e, 20.0 * e);
        let a = propagator(&c, &KernelScale::new(e, l).unwrap(), t1, t2).unwrap();
        let b = propagator(&c, &KernelScale::new(l, l2).unwrap(), t1, t2).unwrap();
        let ab = propagator(&c, &KernelScale::new(e, l2).unwrap(), t1, t2).unwrap();
        prop_assert!((a.direct + b.direct - ab.direct).abs() < 1e-10);
        prop_assert!((a.image + b.image - ab.image).abs() < 1e-10);
    }
}

fn quartic(center: f64, half: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let x = (t - center) / half;
        if x.abs() >= 1.0 {
            0.0
        } else {
            15.0 / 16.0 * (1.0 - x * x) * (1.0 - x * x) / half
        }
    }
}

#[test]
fn cocycle_half() {
    let narrow = quartic(3.0, 0.05);
    let wide = quartic(2.5, 2.0);
    let raw = |t: f64| {
        let x = t - 1.0;
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - x * x)).exp()
        }
    };
    let norm = integrate(raw, 0.0, 2.0, &[], Tolerance::new(1e-15, 1e-15)).unwrap().value;
    let smooth = move |t: f64| raw(t) / norm;
    for (lo, hi, f) in [
        (2.95, 3.05, &narrow as &dyn Fn(f64) -> f64),
        (0.5, 4.5, &wide as &dyn Fn(f64) -> f64),
        (0.0, 2.0, &smooth as &dyn Fn(f64) -> f64),
    ] {
        let v = cocycle_half_check(&Bump { lo, hi, phi: f }).unwrap();
        assert!((v - 0.5).abs() < 1e-10, "{v}");
    }
    let half = |t: f64| 0.5 * narrow(t);
    assert!(matches!(cocycle_half_check(&Bump { lo: 2.95, hi: 3.05, phi: &half }), Err(KernelError::NotNormalized(_))));
}

#[test]
fn propagator_derivative_is_kernel_difference() {
    let c = Cutoff::default();
    let s = KernelScale::new(0.01, 0.1).unwrap();
    // grid inside the plateau of both channels
    let grid = square_grid(0.02, 0.2, 10);
    let r = kernel_propagator_identity(&c, &s, &grid, 1e-3).unwrap();
    assert!(r.max <= 1e-4, "{r:?}");
    let s2 = KernelScale::new(0.02, 0.1).unwrap();
    assert!(kernel_propagator_identity(&c, &s2, &grid, 1e-3).unwrap().max <= 1e-4);
    let same = KernelScale::new(0.05, 0.05).unwrap();
    assert_eq!(kernel_propagator_identity(&c, &same, &grid, 1e-3).unwrap().max, 0.0);
    // with f₀ ≡ 1 on the whole box the residual is pure finite-difference error
    let wide = Cutoff::new(10.0, 20.0, 5).unwrap();
    let r = kernel_propagator_identity(&wide, &s, &square_grid(0.0, 3.0, 12), 1e-4).unwrap();
    assert!(r.max <= 1e-6, "{r:?}");
    // inside the cutoff's transition region the declared-zero remainder shows up
    let r = kernel_propagator_identity(&c, &KernelScale::new(0.01, 0.3).unwrap(), &[(0.7, 0.0)], 1e-4).unwrap();
    assert!(r.max > 1e-3);
}
