//! Discrete doubling on a circle of circumference 2: each fiber line of V carries a
//! periodic (trivial) or antiperiodic (Möbius) sector, with the reflection i ↦ −i twisted
//! by Γ = +1 on L₁ and −1 on the chosen complement L₁′.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{complement_in, complete_with_standard, intersection, Matrix};
use crate::quant::{LagrangianPair, QuantError, SymplecticSpace};
use crate::scalar::{frac, int, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HodgeError {
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error("mesh needs an even node count ≥ 4, got {0}")]
    BadMesh(usize),
    #[error("doubling needs an even (ungraded) symplectic space")]
    OddFiber,
    #[error("complement construction failed: {0}")]
    Complement(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleMesh {
    n: usize,
}

impl CircleMesh {
    pub fn new(n: usize) -> Result<Self, HodgeError> {
        if n < 4 || n % 2 != 0 {
            return Err(HodgeError::BadMesh(n));
        }
        Ok(CircleMesh { n })
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> Scalar {
        frac(2, self.n as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Trivial,
    Mobius,
}

impl Sector {
    /// v(i + N) = wrap · v(i).
    fn wrap(self) -> i64 {
        match self {
            Sector::Trivial => 1,
            Sector::Mobius => -1,
        }
    }
}

/// V = (L₁∩L₂) ⊕ D ⊕ C₁ ⊕ C₂ with L₁ = I⊕C₁, L₂ = I⊕C₂, L₁′ = C₂⊕D, L₂′ = C₁⊕D.
#[derive(Clone, Debug)]
pub struct FiberSplit {
    pub intersection: Vec<Vec<Scalar>>,
    pub d: Vec<Vec<Scalar>>,
    pub c1: Vec<Vec<Scalar>>,
    pub c2: Vec<Vec<Scalar>>,
}

impl FiberSplit {
    pub fn l1_complement(&self) -> Vec<Vec<Scalar>> {
        self.c2.iter().chain(&self.d).cloned().collect()
    }

    pub fn l2_complement(&self) -> Vec<Vec<Scalar>> {
        self.c1.iter().chain(&self.d).cloned().collect()
    }
}

pub fn split_fiber(v: &SymplecticSpace, pair: &LagrangianPair) -> Result<FiberSplit, HodgeError> {
    let n = v.dim();
    let i = intersection(n, &pair.l1, &pair.l2);
    let c1 = complement_in(n, &i, &pair.l1);
    let c2 = complement_in(n, &i, &pair.l2);
    let mut c = c1.clone();
    c.extend(c2.iter().cloned());
    let s = v.orthogonal(&c);
    if s.len() != 2 * i.len() {
        return Err(HodgeError::Complement("ω is degenerate on C₁⊕C₂"));
    }
    // dual vectors to I inside S, then an isotropic correction by I
    let j = complement_in(n, &i, &s);
    let k = i.len();
    let inv = if k == 0 {
        Matrix::zeros(0, 0)
    } else {
        let pairing = Matrix::from_rows(i.iter().map(|a| j.iter().map(|b| v.pair(a, b)).collect()).collect());
        pairing.inverse().ok_or(HodgeError::Complement("I does not pair with its complement in S"))?
    };
    let mut d: Vec<Vec<Scalar>> = (0..k)
        .map(|b| {
            let mut x = vec![Scalar::zero(); n];
            for (m, jm) in j.iter().enumerate() {
                let coef = &inv[(m, b)];
                for (xi, ji) in x.iter_mut().zip(jm) {
                    *xi += coef * ji;
                }
            }
            x
        })
        .collect();
    let gram: Vec<Vec<Scalar>> = d.iter().map(|a| d.iter().map(|b| v.pair(a, b)).collect()).collect();
    for (a, da) in d.iter_mut().enumerate() {
        for (c, ic) in i.iter().enumerate() {
            let x = &gram[c][a] * frac(1, 2);
            for (y, z) in da.iter_mut().zip(ic) {
                *y += &x * z;
            }
        }
    }
    if !v.is_isotropic(&d) {
        return Err(HodgeError::Complement("D is not isotropic"));
    }
    Ok(FiberSplit { intersection: i, d, c1, c2 })
}

/// A fiber line: basis vector, its sector and its Γ-eigenvalue.
#[derive(Clone, Debug)]
pub struct FiberLine {
    pub vector: Vec<Scalar>,
    pub sector: Sector,
    pub gamma: i64,
}

#[derive(Clone, Debug)]
pub struct DiscreteDoubleComplex {
    mesh: CircleMesh,
    split: FiberSplit,
    lines: Vec<FiberLine>,
}

pub fn build_double(v: &SymplecticSpace, pair: &LagrangianPair, n: usize) -> Result<DiscreteDoubleComplex, HodgeError> {
    if (0..v.dim()).any(|i| v.gens().is_odd(i)) {
        return Err(HodgeError::OddFiber);
    }
    v.check_lagrangian(&pair.l1)?;
    v.check_lagrangian(&pair.l2)?;
    let mesh = CircleMesh::new(n)?;
    let split = split_fiber(v, pair)?;
    let mut lines = Vec::new();
    let mut push = |vs: &[Vec<Scalar>], sector, gamma| {
        for x in vs {
            lines.push(FiberLine { vector: x.clone(), sector, gamma });
        }
    };
    push(&split.intersection, Sector::Trivial, 1);
    push(&split.d, Sector::Trivial, -1);
    push(&split.c2, Sector::Mobius, -1);
    push(&split.c1, Sector::Mobius, 1);
    Ok(DiscreteDoubleComplex { mesh, split, lines })
}

impl DiscreteDoubleComplex {
    pub fn mesh(&self) -> CircleMesh {
        self.mesh
    }

    pub fn split(&self) -> &FiberSplit {
        &self.split
    }

    pub fn lines(&self) -> &[FiberLine] {
        &self.lines
    }

    /// (Möbius fiber dim, trivial fiber dim).
    pub fn fiber_dims(&self) -> (usize, usize) {
        let m = self.lines.iter().filter(|l| l.sector == Sector::Mobius).count();
        (m, self.lines.len() - m)
    }

    /// Forward difference on one fiber line, 0-forms (nodes) to 1-forms (edges j → j+1).
    pub fn q_block(&self, sector: Sector) -> Matrix {
        let n = self.mesh.n;
        let mut q = Matrix::zeros(n, n);
        for j in 0..n {
            q[(j, j)] = int(-1);
            if j + 1 < n {
                q[(j, j + 1)] = int(1);
            } else {
                q[(j, 0)] += int(sector.wrap());
            }
        }
        q
    }

    pub fn q_gf_block(&self, sector: Sector) -> Matrix {
        self.q_block(sector).transpose()
    }

    /// σ on 0-forms: (σv)_i = Γ v(N − i), read through the sector's wrap.
    pub fn sigma0_block(&self, sector: Sector, gamma: i64) -> Matrix {
        let n = self.mesh.n;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            if i == 0 {
                s[(0, 0)] = int(gamma * sector.wrap());
            } else {
                s[(i, n - i)] = int(gamma);
            }
        }
        s
    }

    /// σ on 1-forms: the reflected edge, with the orientation flip of dt.
    pub fn sigma1_block(&self, gamma: i64) -> Matrix {
        let n = self.mesh.n;
        let mut s = Matrix::zeros(n, n);
        for j in 0..n {
            s[(j, n - 1 - j)] = int(-gamma);
        }
        s
    }

    /// Exact structural checks: σ² = 1, σQ = Qσ, σQ^GF = Q^GFσ on every fiber line.
    pub fn check(&self) -> Result<(), &'static str> {
        let n = self.mesh.n;
        let id = Matrix::identity(n);
        for l in &self.lines {
            let q = self.q_block(l.sector);
            let qgf = q.transpose();
            let s0 = self.sigma0_block(l.sector, l.gamma);
            let s1 = self.sigma1_block(l.gamma);
            if s0.mul(&s0) != id || s1.mul(&s1) != id {
                return Err("σ is not an involution");
            }
            if s1.mul(&q) != q.mul(&s0) {
                return Err("σ does not commute with Q");
            }
            if s0.mul(&qgf) != qgf.mul(&s1) {
                return Err("σ does not commute with Q^GF");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicReport {
    /// dims of σ-invariant harmonic forms in degrees 0 and 1.
    pub dims: [usize; 2],
    /// Every harmonic form found is constant along the circle.
    pub constant: bool,
}

fn invariant_kernel(lap: &Matrix, sigma: &Matrix) -> Vec<Vec<Scalar>> {
    let shifted = sigma.sub(&Matrix::identity(sigma.rows()));
    lap.stack(&shifted).nullspace()
}

/// (ker [Q, Q^GF])^σ per form degree, line by line.
pub fn invariant_harmonic_dims(c: &DiscreteDoubleComplex) -> HarmonicReport {
    let mut dims = [0, 0];
    let mut constant = true;
    for l in &c.lines {
        let q = c.q_block(l.sector);
        let qgf = q.transpose();
        let kernels = [
            invariant_kernel(&qgf.mul(&q), &c.sigma0_block(l.sector, l.gamma)),
            invariant_kernel(&q.mul(&qgf), &c.sigma1_block(l.gamma)),
        ];
        for (deg, ker) in kernels.iter().enumerate() {
            dims[deg] += ker.len();
            constant &= ker.iter().all(|v| v.iter().all(|x| x == &v[0]));
        }
    }
    HarmonicReport { dims, constant }
}

/// Plain harmonic dims (no σ), for comparison with the invariant ones.
pub fn harmonic_dims(c: &DiscreteDoubleComplex) -> [usize; 2] {
    let mut dims = [0, 0];
    for l in &c.lines {
        let q = c.q_block(l.sector);
        let qgf = q.transpose();
        dims[0] += qgf.mul(&q).nullspace().len();
        dims[1] += q.mul(&qgf).nullspace().len();
    }
    dims
}

/// Lagrangian L₂ with prescribed dim L₁∩L₂ = k in the Darboux space of dim 2n, L₁ = span(q).
pub fn example_pair(n: usize, k: usize, twist: i64) -> (SymplecticSpace, LagrangianPair) {
    let v = SymplecticSpace::darboux(n);
    let e = |i: usize| {
        let mut x = vec![Scalar::zero(); 2 * n];
        x[i] = int(1);
        x
    };
    let l1: Vec<Vec<Scalar>> = (0..n).map(e).collect();
    // L₂: q_i for i < k, then p_i + twist·q_i graphs for the rest
    let l2: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            if i < k {
                e(i)
            } else {
                let mut x = e(n + i);
                x[i] = int(twist);
                x
            }
        })
        .collect();
    let pair = LagrangianPair::new(&v, l1, l2).expect("example pair is Lagrangian");
    (v, pair)
}

/// A basis-completed copy of V used for checking the splitting is a direct sum.
pub fn split_is_direct(v: &SymplecticSpace, s: &FiberSplit) -> bool {
    let mut all = s.intersection.clone();
    all.extend(s.d.iter().cloned());
    all.extend(s.c1.iter().cloned());
    all.extend(s.c2.iter().cloned());
    all.len() == v.dim() && complete_with_standard(v.dim(), &all).is_empty()
}
