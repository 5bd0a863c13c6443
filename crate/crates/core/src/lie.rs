//! Lie algebras by structure constants, Chevalley–Eilenberg complexes, the twisted
//! differential on Sym(g[1] ⊕ g^∨[−1]) and the 2D BF obstruction complex.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::graded::{Cohomology, GradedComplex, GradedError, GradedMap, GradedSpace};
use crate::linalg::Matrix;
use crate::scalar::{self, frac, int, Scalar};
use crate::superpoly::{nilpotent_exp, operator_matrix, Exps, Generators, MonoBasis, Op, Operator};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("structure tensor has {got} entries, expected {expected}")]
    Shape { got: usize, expected: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("Jacobi identity fails")]
    Jacobi,
    #[error("algebra is not unimodular (adjoint trace of basis element {0} is nonzero)")]
    NotUnimodular(usize),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("operators differ at ({row}, {col}): {lhs} vs {rhs}")]
    Mismatch { row: String, col: String, lhs: String, rhs: String },
    #[error("output monomial {0} lies outside the truncation")]
    Overflow(String),
}

/// Structure constants `f^{ab}_c` with `[t^a, t^b] = f^{ab}_c t^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    f: Vec<Scalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LieReport {
    pub antisymmetric: bool,
    pub jacobi: bool,
    pub unimodular: bool,
}

impl LieAlgebra {
    pub fn new(name: &str, dim: usize, f: Vec<Scalar>) -> Result<Self, LieError> {
        if f.len() != dim * dim * dim {
            return Err(LieError::Shape { got: f.len(), expected: dim * dim * dim });
        }
        Ok(LieAlgebra { name: name.to_string(), dim, f })
    }

    /// Builds from brackets `[t^a, t^b] = Σ c t^k` given once per unordered pair.
    pub fn from_brackets(name: &str, dim: usize, brackets: &[(usize, usize, usize, Scalar)]) -> Self {
        let mut f = vec![Scalar::zero(); dim * dim * dim];
        for (a, b, c, v) in brackets {
            f[(a * dim + b) * dim + c] += v.clone();
            f[(b * dim + a) * dim + c] -= v.clone();
        }
        LieAlgebra { name: name.to_string(), dim, f }
    }

    pub fn abelian(n: usize) -> Self {
        LieAlgebra { name: format!("abelian{n}"), dim: n, f: vec![Scalar::zero(); n * n * n] }
    }

    /// Basis (e, f, h) with [e,f]=h, [h,e]=2e, [h,f]=−2f.
    pub fn sl2() -> Self {
        LieAlgebra::from_brackets("sl2", 3, &[(0, 1, 2, int(1)), (2, 0, 0, int(2)), (2, 1, 1, int(-2))])
    }

    /// Basis (x, y, z) with [x,y]=z.
    pub fn heisenberg3() -> Self {
        LieAlgebra::from_brackets("heisenberg3", 3, &[(0, 1, 2, int(1))])
    }

    /// Basis (x, y) with [x,y]=y; not unimodular.
    pub fn affine2() -> Self {
        LieAlgebra::from_brackets("affine2", 2, &[(0, 1, 1, int(1))])
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "sl2" => Some(Self::sl2()),
            "heisenberg3" => Some(Self::heisenberg3()),
            "affine2" => Some(Self::affine2()),
            _ => {
                let n = name.strip_prefix("abelian")?.parse().ok()?;
                Some(Self::abelian(n))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> &Scalar {
        &self.f[(a * self.dim + b) * self.dim + c]
    }

    /// Nonzero entries `(a, b, c, f^{ab}_c)`.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let n = self.dim;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.f(a, b, c);
                    if !v.is_zero() {
                        out.push((a, b, c, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.f.iter().all(Zero::is_zero)
    }

    /// Parses the text format: first line the dimension, then `a b c p/q` lines.
    pub fn parse(name: &str, text: &str) -> Result<Self, LieError> {
        let mut dim: Option<usize> = None;
        let mut f = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| LieError::Parse { line: k + 1, msg: msg.to_string() };
            match dim {
                None => {
                    let n: usize = line.parse().map_err(|_| err("expected dimension"))?;
                    dim = Some(n);
                    f = vec![Scalar::zero(); n * n * n];
                }
                Some(n) => {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(err("expected `a b c p/q`"));
                    }
                    let idx = |s: &str| -> Result<usize, LieError> {
                        let i: usize = s.parse().map_err(|_| err("bad index"))?;
                        if i >= n {
                            return Err(err("index out of range"));
                        }
                        Ok(i)
                    };
                    let (a, b, c) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
                    let v = scalar::parse(parts[3]).ok_or_else(|| err("bad coefficient"))?;
                    f[(a * n + b) * n + c] = v;
                }
            }
        }
        let n = dim.ok_or(LieError::Parse { line: 0, msg: "empty input".to_string() })?;
        LieAlgebra::new(name, n, f)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.dim);
        for (a, b, c, v) in self.entries() {
            s.push_str(&format!("{a} {b} {c} {}\n", scalar::format(&v)));
        }
        s
    }

    pub fn check(&self) -> LieReport {
        let n = self.dim;
        let antisymmetric =
            (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| *self.f(a, b, c) == -self.f(b, a, c).clone())));
        let mut jacobi = true;
        'outer: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let mut s = Scalar::zero();
                        for d in 0..n {
                            s += self.f(a, b, d) * self.f(d, c, e);
                            s += self.f(b, c, d) * self.f(d, a, e);
                            s += self.f(c, a, d) * self.f(d, b, e);
                        }
                        if !s.is_zero() {
                            jacobi = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        LieReport { antisymmetric, jacobi, unimodular: self.adjoint_traces().iter().all(Zero::is_zero) }
    }

    /// `tr ad_{t^b} = Σ_a f^{ba}_a` for each b.
    pub fn adjoint_traces(&self) -> Vec<Scalar> {
        let n = self.dim;
        (0..n).map(|b| (0..n).fold(Scalar::zero(), |acc, a| acc + self.f(b, a, a))).collect()
    }

    pub fn require_unimodular(&self) -> Result<(), LieError> {
        match self.adjoint_traces().iter().position(|t| !t.is_zero()) {
            Some(b) => Err(LieError::NotUnimodular(b)),
            None => Ok(()),
        }
    }

    fn require_jacobi(&self) -> Result<(), LieError> {
        if self.check().jacobi {
            Ok(())
        } else {
            Err(LieError::Jacobi)
        }
    }
}

/// Coefficient modules for Chevalley–Eilenberg cochains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CeModule {
    /// The trivial module ℚ.
    Trivial,
    /// Sym(g[1]) with the coadjoint-type action.
    SymG1,
    /// Sym(g[1] ⊕ g^∨[−1]) = C^•(g, C_•(g)), including the chain differential.
    Full,
}

/// Generators of Sym(g[1] ⊕ g^∨[−1]): `up(a)` is t^a in degree −1, `low(a)` is t_a in degree +1.
#[derive(Clone, Debug)]
pub struct PolyFrame {
    dim: usize,
    gens: Generators,
}

impl PolyFrame {
    pub fn new(dim: usize) -> Self {
        let mut names: Vec<String> = (0..dim).map(|a| format!("T{a}")).collect();
        names.extend((0..dim).map(|a| format!("t{a}")));
        let mut degrees = vec![-1; dim];
        degrees.extend(vec![1; dim]);
        PolyFrame { dim, gens: Generators::new(names, degrees) }
    }

    pub fn gens(&self) -> &Generators {
        &self.gens
    }

    pub fn up(&self, a: usize) -> usize {
        a
    }

    pub fn low(&self, a: usize) -> usize {
        self.dim + a
    }

    /// Every monomial, shortest first.
    pub fn full_basis(&self) -> MonoBasis {
        MonoBasis::up_to_length(&self.gens, 2 * self.dim as u32, |_| true)
    }

    pub fn truncated_basis(&self, max_len: u32) -> MonoBasis {
        MonoBasis::up_to_length(&self.gens, max_len, |_| true)
    }

    /// Cochain part ½ f^{ab}_c t_a t_b ∂^c.
    pub fn cochain_term(&self, l: &LieAlgebra) -> Operator {
        let mut op = Operator::new();
        for (a, b, c, v) in l.entries() {
            op.push(v * frac(1, 2), vec![Op::Mul(self.low(a)), Op::Mul(self.low(b)), Op::Deriv(self.low(c))]);
        }
        op
    }

    /// Module part f^{ab}_c t_b t^c ∂_a.
    pub fn action_term(&self, l: &LieAlgebra) -> Operator {
        let mut op = Operator::new();
        for (a, b, c, v) in l.entries() {
            op.push(v, vec![Op::Mul(self.low(b)), Op::Mul(self.up(c)), Op::Deriv(self.up(a))]);
        }
        op
    }

    /// Chain differential −f^{ab}_c t^c ∂_a ∂_b.
    pub fn chain_term(&self, l: &LieAlgebra) -> Operator {
        let mut op = Operator::new();
        for (a, b, c, v) in l.entries() {
            op.push(-v, vec![Op::Mul(self.up(c)), Op::Deriv(self.up(a)), Op::Deriv(self.up(b))]);
        }
        op
    }

    /// Trivector term ½ f^{ab}_c ∂_a ∂_b ∂^c.
    pub fn trivector_term(&self, l: &LieAlgebra) -> Operator {
        let mut op = Operator::new();
        for (a, b, c, v) in l.entries() {
            op.push(v * frac(1, 2), vec![Op::Deriv(self.up(a)), Op::Deriv(self.up(b)), Op::Deriv(self.low(c))]);
        }
        op
    }

    /// ∂_tr = Σ_a ∂_a ∂^a.
    pub fn trace_operator(&self) -> Operator {
        let mut op = Operator::new();
        for a in 0..self.dim {
            op.push(int(1), vec![Op::Deriv(self.up(a)), Op::Deriv(self.low(a))]);
        }
        op
    }

    pub fn d_ce(&self, l: &LieAlgebra) -> Operator {
        let mut op = self.cochain_term(l);
        op.extend(self.action_term(l));
        op.extend(self.chain_term(l));
        op
    }

    pub fn d_q(&self, l: &LieAlgebra) -> Operator {
        let mut op = self.cochain_term(l);
        op.extend(self.action_term(l));
        op.extend(self.trivector_term(l));
        op
    }

    pub fn matrix(&self, op: &Operator, basis: &MonoBasis) -> Matrix {
        operator_matrix(&self.gens, op, basis, basis).expect("full basis is closed under every operator")
    }
}

/// The Chevalley–Eilenberg complex with the chosen coefficients, on the whole (finite) algebra.
pub fn ce_complex(l: &LieAlgebra, module: CeModule) -> Result<GradedComplex, LieError> {
    l.require_jacobi()?;
    let n = l.dim();
    match module {
        CeModule::Trivial => {
            let gens = Generators::new((0..n).map(|a| format!("t{a}")).collect(), vec![1; n]);
            let mut op = Operator::new();
            for (a, b, c, v) in l.entries() {
                op.push(v * frac(1, 2), vec![Op::Mul(a), Op::Mul(b), Op::Deriv(c)]);
            }
            let basis = MonoBasis::up_to_length(&gens, n as u32, |_| true);
            let m = operator_matrix(&gens, &op, &basis, &basis).expect("closed");
            Ok(GradedComplex::from_matrix(basis.graded_space(&gens, ""), &m)?)
        }
        CeModule::SymG1 | CeModule::Full => {
            let frame = PolyFrame::new(n);
            let mut op = frame.cochain_term(l);
            op.extend(frame.action_term(l));
            if module == CeModule::Full {
                op.extend(frame.chain_term(l));
            }
            let basis = frame.full_basis();
            let m = frame.matrix(&op, &basis);
            Ok(GradedComplex::from_matrix(basis.graded_space(frame.gens(), ""), &m)?)
        }
    }
}

fn restrict_columns(m: &Matrix, basis: &MonoBasis, max_len: u32) -> (Matrix, Vec<usize>) {
    let cols: Vec<usize> =
        (0..basis.len()).filter(|&j| basis.get(j).iter().sum::<u32>() <= max_len).collect();
    (m.select_columns(&cols), cols)
}

fn mismatch(basis: &MonoBasis, frame: &PolyFrame, cols: &[usize], lhs: &Matrix, rhs: &Matrix) -> Option<LieError> {
    let diff = lhs.sub(rhs);
    diff.first_nonzero().map(|(i, j, _)| LieError::Mismatch {
        row: frame.gens().mono_label(basis.get(i)),
        col: frame.gens().mono_label(basis.get(cols[j])),
        lhs: scalar::format(&lhs[(i, j)]),
        rhs: scalar::format(&rhs[(i, j)]),
    })
}

/// d^q on monomials of length ≤ `truncation`, landing in length ≤ `truncation + 1`.
pub fn dq_differential(l: &LieAlgebra, truncation: u32) -> Result<GradedMap, LieError> {
    l.require_unimodular()?;
    let frame = PolyFrame::new(l.dim());
    let source = frame.truncated_basis(truncation);
    let target = frame.truncated_basis(truncation + 1);
    let m = operator_matrix(frame.gens(), &frame.d_q(l), &source, &target)
        .map_err(|e: Exps| LieError::Overflow(frame.gens().mono_label(&e)))?;
    Ok(GradedMap::from_matrix(
        source.graded_space(frame.gens(), ""),
        target.graded_space(frame.gens(), ""),
        1,
        &m,
    )?)
}

/// (d^q)² = 0 on monomials up to the truncation.
pub fn dq_square_check(l: &LieAlgebra, truncation: u32) -> Result<(), LieError> {
    l.require_unimodular()?;
    let frame = PolyFrame::new(l.dim());
    let basis = frame.full_basis();
    let d = frame.matrix(&frame.d_q(l), &basis);
    let (sq, cols) = restrict_columns(&d.mul(&d), &basis, truncation);
    let zero = Matrix::zeros(sq.rows(), sq.cols());
    match mismatch(&basis, &frame, &cols, &sq, &zero) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// d^q = exp(∂_tr) ∘ d_CE ∘ exp(−∂_tr) on monomials up to the truncation.
pub fn conjugation_check(l: &LieAlgebra, truncation: u32) -> Result<(), LieError> {
    l.require_unimodular()?;
    let frame = PolyFrame::new(l.dim());
    let basis = frame.full_basis();
    let tr = frame.matrix(&frame.trace_operator(), &basis);
    let e_plus = nilpotent_exp(&tr);
    let e_minus = nilpotent_exp(&tr.scale(&int(-1)));
    let conj = e_plus.mul(&frame.matrix(&frame.d_ce(l), &basis)).mul(&e_minus);
    let dq = frame.matrix(&frame.d_q(l), &basis);
    let (lhs, cols) = restrict_columns(&dq, &basis, truncation);
    let (rhs, _) = restrict_columns(&conj, &basis, truncation);
    match mismatch(&basis, &frame, &cols, &lhs, &rhs) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Matrix of the conjugated CE differential exp(∂_tr) d_CE exp(−∂_tr) on the full basis.
pub fn conjugated_ce_matrix(l: &LieAlgebra, frame: &PolyFrame, basis: &MonoBasis) -> Matrix {
    let tr = frame.matrix(&frame.trace_operator(), basis);
    nilpotent_exp(&tr).mul(&frame.matrix(&frame.d_ce(l), basis)).mul(&nilpotent_exp(&tr.scale(&int(-1))))
}

/// Per-degree cohomology dimensions of the B-weight `weight` piece of the obstruction complex:
/// cochains C^p(g, Sym^w g) in degree p − 2 followed by Sym^w(g) in degree −1, joined by the
/// identity on C^0.
pub fn bweight_obstruction(l: &LieAlgebra, weight: u32) -> Result<Cohomology, LieError> {
    l.require_jacobi()?;
    let complex = bweight_complex(l, weight)?;
    Ok(complex.cohomology())
}

pub fn bweight_complex(l: &LieAlgebra, weight: u32) -> Result<GradedComplex, LieError> {
    let n = l.dim();
    let mut names: Vec<String> = (0..n).map(|a| format!("t{a}")).collect();
    names.extend((0..n).map(|a| format!("s{a}")));
    let mut degrees = vec![1; n];
    degrees.extend(vec![0; n]);
    let gens = Generators::new(names, degrees);
    let w = weight;
    let basis = MonoBasis::up_to_length(&gens, n as u32 + w, |e| e[n..].iter().sum::<u32>() == w);
    let mut op = Operator::new();
    for (a, b, c, v) in l.entries() {
        op.push(v.clone() * frac(1, 2), vec![Op::Mul(a), Op::Mul(b), Op::Deriv(c)]);
        op.push(v, vec![Op::Mul(b), Op::Mul(n + c), Op::Deriv(n + a)]);
    }
    let d = operator_matrix(&gens, &op, &basis, &basis).expect("weight is preserved");
    let sym: Vec<usize> = (0..basis.len()).filter(|&j| basis.get(j)[..n].iter().all(|&k| k == 0)).collect();
    let total = basis.len() + sym.len();
    let mut m = Matrix::zeros(total, total);
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            m[(i, j)] = d[(i, j)].clone();
        }
    }
    for (k, &j) in sym.iter().enumerate() {
        m[(basis.len() + k, j)] = int(1);
    }
    let mut labels: Vec<String> = basis.monos().iter().map(|e| format!("C:{}", gens.mono_label(e))).collect();
    let mut degs: Vec<i32> = basis.monos().iter().map(|e| gens.mono_degree(e) - 2).collect();
    for &j in &sym {
        labels.push(format!("S:{}", gens.mono_label(basis.get(j))));
        degs.push(-1);
    }
    Ok(GradedComplex::from_matrix(GradedSpace::new(labels, degs)?, &m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_reports() {
        let r = LieAlgebra::abelian(3).check();
        assert!(r.antisymmetric && r.jacobi && r.unimodular);
        let r = LieAlgebra::sl2().check();
        assert!(r.antisymmetric && r.jacobi && r.unimodular);
        let r = LieAlgebra::affine2().check();
        assert!(r.jacobi && !r.unimodular);
        assert_eq!(LieAlgebra::affine2().adjoint_traces()[0], int(1));
    }

    #[test]
    fn text_roundtrip() {
        let l = LieAlgebra::sl2();
        let back = LieAlgebra::parse("sl2", &l.to_text()).unwrap();
        assert_eq!(back, l);
        assert!(LieAlgebra::parse("x", "2\n0 1 5 1\n").is_err());
        assert!(LieAlgebra::parse("x", "2\n0 1 1\n").is_err());
    }

    #[test]
    fn trivial_ce_sl2() {
        let c = ce_complex(&LieAlgebra::sl2(), CeModule::Trivial).unwrap();
        assert_eq!(c.cohomology().dims, vec![(0, 1), (1, 0), (2, 0), (3, 1)]);
    }

    #[test]
    fn bweight_complex_squares_to_zero() {
        for w in 1..=2 {
            bweight_complex(&LieAlgebra::sl2(), w).unwrap();
        }
    }
}
