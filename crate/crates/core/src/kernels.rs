//! Half-line heat kernels and propagators by the method of images: a direct channel in
//! u = t₁ − t₂ and an image channel in u = t₁ + t₂, both localized by an even cutoff f₀.

use alloc::vec::Vec;

use thiserror::Error;

use crate::quad::{integrate, QuadError, Tolerance};

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("cutoff needs 0 < a < b and order in {{3, 5, 7}}, got a={a}, b={b}, order={order}")]
    BadCutoff { a: f64, b: f64, order: u32 },
    #[error("scale needs 0 < ε ≤ L, got ε={eps}, L={l}")]
    BadScale { eps: f64, l: f64 },
    #[error("non-finite input")]
    NonFinite,
    #[error("bump is not normalized: ∫φ = {0}")]
    NotNormalized(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Even cutoff: 1 on |u| ≤ a, 0 on |u| ≥ b, smoothstep in between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    a: f64,
    b: f64,
    order: u32,
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff { a: 0.5, b: 1.0, order: 5 }
    }
}

impl Cutoff {
    pub fn new(a: f64, b: f64, order: u32) -> Result<Self, KernelError> {
        if !(a > 0.0 && b > a && b.is_finite()) || ![3, 5, 7].contains(&order) {
            return Err(KernelError::BadCutoff { a, b, order });
        }
        Ok(Cutoff { a, b, order })
    }

    pub fn plateau(&self) -> f64 {
        self.a
    }

    pub fn support(&self) -> f64 {
        self.b
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn step(&self, x: f64) -> f64 {
        match self.order {
            3 => x * x * (3.0 - 2.0 * x),
            5 => x * x * x * (10.0 + x * (-15.0 + 6.0 * x)),
            _ => x * x * x * x * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x))),
        }
    }

    fn step_deriv(&self, x: f64) -> f64 {
        let y = x * (1.0 - x);
        match self.order {
            3 => 6.0 * y,
            5 => 30.0 * y * y,
            _ => 140.0 * y * y * y,
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let r = u.abs();
        if r <= self.a {
            1.0
        } else if r >= self.b {
            0.0
        } else {
            1.0 - self.step((r - self.a) / (self.b - self.a))
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        let r = u.abs();
        if r <= self.a || r >= self.b {
            0.0
        } else {
            -u.signum() * self.step_deriv((r - self.a) / (self.b - self.a)) / (self.b - self.a)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelScale {
    pub eps: f64,
    pub l: f64,
}

impl KernelScale {
    pub fn new(eps: f64, l: f64) -> Result<Self, KernelError> {
        if !(eps > 0.0 && l >= eps && l.is_finite()) {
            return Err(KernelError::BadScale { eps, l });
        }
        Ok(KernelScale { eps, l })
    }
}

/// Coefficients of the direct (t^a⊗t_a + t_a⊗t^a) and image (t^a⊗t_a − t_a⊗t^a) channels.
/// The remainder term is declared zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPointValue {
    pub direct: f64,
    pub image: f64,
    pub remainder: f64,
}

fn finite(xs: &[f64]) -> Result<(), KernelError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(KernelError::NonFinite)
    }
}

/// f₀(u) e^{−u²/4T}/√(4πT).
pub fn gaussian(cutoff: &Cutoff, time: f64, u: f64) -> f64 {
    let f = cutoff.eval(u);
    if f == 0.0 {
        return 0.0;
    }
    f * libm::exp(-u * u / (4.0 * time)) / (2.0 * SQRT_PI * libm::sqrt(time))
}

pub fn heat_kernel(cutoff: &Cutoff, time: f64, t1: f64, t2: f64) -> Result<TwoPointValue, KernelError> {
    finite(&[time, t1, t2])?;
    if !(time > 0.0) {
        return Err(KernelError::BadScale { eps: time, l: time });
    }
    Ok(TwoPointValue {
        direct: gaussian(cutoff, time, t1 - t2),
        image: gaussian(cutoff, time, t1 + t2),
        remainder: 0.0,
    })
}

/// erf(u/2√ε) − erf(u/2√L); tends to sgn(u) as ε → 0, L → ∞.
pub fn erf_bracket(scale: &KernelScale, u: f64) -> f64 {
    let hi = if scale.eps > 0.0 { libm::erf(u / (2.0 * libm::sqrt(scale.eps))) } else { u.signum() };
    let lo = if scale.l.is_finite() { libm::erf(u / (2.0 * libm::sqrt(scale.l))) } else { 0.0 };
    hi - lo
}

/// ∫_ε^L e^{−u²/4T} T^{−3/2} dT in closed form: (2√π/u)·(erf bracket).
pub fn heat_time_integral(scale: &KernelScale, u: f64) -> f64 {
    if u == 0.0 {
        2.0 * (1.0 / libm::sqrt(scale.eps) - 1.0 / libm::sqrt(scale.l))
    } else {
        2.0 * SQRT_PI * erf_bracket(scale, u) / u
    }
}

/// The same heat-time integral by adaptive quadrature over T.
pub fn heat_time_integral_quad(scale: &KernelScale, u: f64, tol: Tolerance) -> Result<f64, KernelError> {
    let g = |t: f64| libm::exp(-u * u / (4.0 * t)) / (t * libm::sqrt(t));
    // the integrand peaks at T = u²/6
    let peak = u * u / 6.0;
    let pts = [peak, 4.0 * peak, 16.0 * peak];
    Ok(integrate(g, scale.eps, scale.l, &pts, tol)?.value)
}

/// Non-invariant propagator coefficient f₀(u)·(erf bracket), u = t₁ − t₂.
pub fn propagator_noninvariant(cutoff: &Cutoff, scale: &KernelScale, u: f64) -> f64 {
    let f = cutoff.eval(u);
    if f == 0.0 {
        0.0
    } else {
        f * erf_bracket(scale, u)
    }
}

/// σ-invariant propagator: half of the non-invariant profile in each channel.
pub fn propagator(cutoff: &Cutoff, scale: &KernelScale, t1: f64, t2: f64) -> Result<TwoPointValue, KernelError> {
    finite(&[t1, t2])?;
    Ok(TwoPointValue {
        direct: 0.5 * propagator_noninvariant(cutoff, scale, t1 - t2),
        image: 0.5 * propagator_noninvariant(cutoff, scale, t1 + t2),
        remainder: 0.0,
    })
}

/// A normalized bump φ on [lo, hi] given by its profile.
pub struct Bump<'a> {
    pub lo: f64,
    pub hi: f64,
    pub phi: &'a dyn Fn(f64) -> f64,
}

/// ∫_{t ≥ 0} φ(1 − Φ) with Φ(t) = ∫₀^t φ.
pub fn cocycle_half_check(bump: &Bump<'_>) -> Result<f64, KernelError> {
    let tol = Tolerance::new(1e-13, 1e-13);
    let lo = bump.lo.max(0.0);
    let total = integrate(bump.phi, lo, bump.hi, &[], tol)?.value;
    if (total - 1.0).abs() > 1e-10 {
        return Err(KernelError::NotNormalized(total));
    }
    let mut failure = None;
    let outer = integrate(
        |t| {
            let big_phi = match integrate(bump.phi, lo, t, &[], tol) {
                Ok(e) => e.value,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            };
            (bump.phi)(t) * (1.0 - big_phi)
        },
        lo,
        bump.hi,
        &[],
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(outer.value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResidual {
    pub max: f64,
    /// Grid point with the largest residual.
    pub at: (f64, f64),
}

/// Checks (d⊗1 + 1⊗d)P(ε,L) = K_ε − K_L channel by channel with centered differences.
/// Away from the cutoff's transition region the identity is exact up to O(h²).
pub fn kernel_propagator_identity(
    cutoff: &Cutoff,
    scale: &KernelScale,
    grid: &[(f64, f64)],
    h: f64,
) -> Result<IdentityResidual, KernelError> {
    let mut worst = IdentityResidual { max: 0.0, at: grid.first().copied().unwrap_or((0.0, 0.0)) };
    for &(t1, t2) in grid {
        let p = |a: f64, b: f64| propagator(cutoff, scale, a, b);
        let d1p = p(t1 + h, t2)?;
        let d1m = p(t1 - h, t2)?;
        let d2p = p(t1, t2 + h)?;
        let d2m = p(t1, t2 - h)?;
        let ke = heat_kernel(cutoff, scale.eps, t1, t2)?;
        let kl = heat_kernel(cutoff, scale.l, t1, t2)?;
        let dir_target = ke.direct - kl.direct;
        let img_target = ke.image - kl.image;
        // dt₁ coefficient: direct channel (dt₁ − dt₂), image channel (dt₁ + dt₂)
        let res = [
            (d1p.direct - d1m.direct) / (2.0 * h) - dir_target,
            -(d2p.direct - d2m.direct) / (2.0 * h) - dir_target,
            (d1p.image - d1m.image) / (2.0 * h) - img_target,
            (d2p.image - d2m.image) / (2.0 * h) - img_target,
        ];
        for r in res {
            if r.abs() > worst.max {
                worst = IdentityResidual { max: r.abs(), at: (t1, t2) };
            }
        }
    }
    Ok(worst)
}

/// Uniform grid on [lo, hi]², `n` points per side.
pub fn square_grid(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    let mut g = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            g.push((lo + step * i as f64, lo + step * j as f64));
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        for order in [3, 5, 7] {
            let c = Cutoff::new(0.5, 1.0, order).unwrap();
            assert_eq!(c.eval(0.3), 1.0);
            assert_eq!(c.eval(-1.2), 0.0);
            assert_eq!(c.eval(0.7), c.eval(-0.7));
            assert!((c.eval(0.75) - 0.5).abs() < 1e-12);
            let h = 1e-6;
            let fd = (c.eval(0.8 + h) - c.eval(0.8 - h)) / (2.0 * h);
            assert!((fd - c.deriv(0.8)).abs() < 1e-6);
        }
        assert!(Cutoff::new(1.0, 0.5, 5).is_err());
        assert!(Cutoff::new(0.5, 1.0, 4).is_err());
    }
}
