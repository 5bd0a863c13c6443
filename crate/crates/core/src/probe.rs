//! Cubic B-spline probe profiles on the half-line.

use alloc::vec::Vec;

/// A single cubic B-spline basis function on five knots (repeats allowed).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BSpline {
    knots: [f64; 5],
}

impl BSpline {
    /// Panics unless the knots are finite and nondecreasing with t₀ < t₄.
    pub fn new(knots: [f64; 5]) -> Self {
        assert!(knots.iter().all(|k| k.is_finite()), "finite knots");
        assert!(knots.windows(2).all(|w| w[0] <= w[1]) && knots[0] < knots[4], "nondecreasing knots");
        BSpline { knots }
    }

    /// Uniform spline with support [lo, lo + 4h].
    pub fn uniform(lo: f64, h: f64) -> Self {
        BSpline::new([lo, lo + h, lo + 2.0 * h, lo + 3.0 * h, lo + 4.0 * h])
    }

    /// (1 − t/h)³ on [0, h]: the clamped first basis function, equal to 1 at t = 0.
    pub fn clamped(h: f64) -> Self {
        BSpline::new([0.0, 0.0, 0.0, 0.0, h])
    }

    pub fn knots(&self) -> &[f64; 5] {
        &self.knots
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[4])
    }

    fn basis(&self, i: usize, p: usize, x: f64) -> f64 {
        let t = &self.knots;
        if p == 0 {
            return if t[i] <= x && x < t[i + 1] { 1.0 } else { 0.0 };
        }
        let mut v = 0.0;
        let d1 = t[i + p] - t[i];
        if d1 > 0.0 {
            v += (x - t[i]) / d1 * self.basis(i, p - 1, x);
        }
        let d2 = t[i + p + 1] - t[i + 1];
        if d2 > 0.0 {
            v += (t[i + p + 1] - x) / d2 * self.basis(i + 1, p - 1, x);
        }
        v
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < self.knots[0] || x >= self.knots[4] {
            return 0.0;
        }
        self.basis(0, 3, x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if x < self.knots[0] || x >= self.knots[4] {
            return 0.0;
        }
        let t = &self.knots;
        let mut v = 0.0;
        if t[3] > t[0] {
            v += 3.0 / (t[3] - t[0]) * self.basis(0, 2, x);
        }
        if t[4] > t[1] {
            v -= 3.0 / (t[4] - t[1]) * self.basis(1, 2, x);
        }
        v
    }
}

/// A spline profile, optionally multiplied by t so that it vanishes at the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub spline: BSpline,
    pub flagged: bool,
}

impl Probe {
    pub fn plain(spline: BSpline) -> Self {
        Probe { spline, flagged: false }
    }

    pub fn flagged(spline: BSpline) -> Self {
        Probe { spline, flagged: true }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = self.spline.eval(t);
        if self.flagged {
            t * s
        } else {
            s
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if self.flagged {
            self.spline.eval(t) + t * self.spline.deriv(t)
        } else {
            self.spline.deriv(t)
        }
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.spline.support();
        (lo.max(0.0), hi)
    }

    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.spline.knots().to_vec();
        k.dedup();
        k
    }
}
