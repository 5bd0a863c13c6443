//! Weyl algebras, Fock modules, the constant-Π star product and the interval
//! factorization algebra F_{A,M} of a pointed right module.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ccr::{add_into, add_term, CcrAlgebra, Element, Key};
use crate::clifford::{clifford_algebra, next_permutation};
use crate::linalg::{complete_with_standard, intersection, span_basis, Matrix};
use crate::scalar::{self, factorial, frac, int, Scalar};
use crate::superpoly::{Exps, Generators, MonoBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantError {
    #[error("pairing is not graded antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("pairing is degenerate (rank {rank} < {dim})")]
    Degenerate { rank: usize, dim: usize },
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace has dimension {got}, Lagrangian needs {expected}")]
    NotLagrangian { got: usize, expected: usize },
    #[error("vector mixes parities")]
    Inhomogeneous,
    #[error("element type does not match interval {0}")]
    TypeMismatch(usize),
    #[error("invalid interval configuration: {0}")]
    BadConfig(String),
    #[error("algebra is not associative at basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit law fails at basis element {0}")]
    NotUnital(usize),
    #[error("module law fails at ({0}, {1}, {2})")]
    NotModule(usize, usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// (V, ω) with ω(x_i, x_j) = `omega[(i, j)]`.
#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    gens: Generators,
    omega: Matrix,
}

impl SymplecticSpace {
    pub fn new(gens: Generators, omega: Matrix) -> Result<Self, QuantError> {
        let n = gens.len();
        assert_eq!((omega.rows(), omega.cols()), (n, n));
        for i in 0..n {
            for j in 0..n {
                let sign = if gens.is_odd(i) && gens.is_odd(j) { int(1) } else { int(-1) };
                if omega[(i, j)] != &omega[(j, i)] * &sign {
                    return Err(QuantError::NotAntisymmetric(i, j));
                }
                if !omega[(i, j)].is_zero() && gens.is_odd(i) != gens.is_odd(j) {
                    return Err(QuantError::NotAntisymmetric(i, j));
                }
            }
        }
        let rank = omega.rank();
        if rank < n {
            return Err(QuantError::Degenerate { rank, dim: n });
        }
        Ok(SymplecticSpace { gens, omega })
    }

    /// Darboux space with basis q_1..q_n, p_1..p_n and ω(q_i, p_i) = 1.
    pub fn darboux(n: usize) -> Self {
        let mut names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        names.extend((0..n).map(|i| format!("p{i}")));
        let mut omega = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            omega[(i, n + i)] = int(1);
            omega[(n + i, i)] = int(-1);
        }
        SymplecticSpace { gens: Generators::new(names, vec![0; 2 * n]), omega }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn gens(&self) -> &Generators {
        &self.gens
    }

    pub fn omega(&self) -> &Matrix {
        &self.omega
    }

    pub fn pair(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let wv = self.omega.apply(v);
        u.iter().zip(&wv).fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn is_isotropic(&self, basis: &[Vec<Scalar>]) -> bool {
        basis.iter().all(|u| basis.iter().all(|v| self.pair(u, v).is_zero()))
    }

    pub fn check_lagrangian(&self, basis: &[Vec<Scalar>]) -> Result<(), QuantError> {
        let b = span_basis(self.dim(), basis);
        if !self.is_isotropic(&b) {
            return Err(QuantError::NotIsotropic);
        }
        if 2 * b.len() != self.dim() {
            return Err(QuantError::NotLagrangian { got: b.len(), expected: self.dim() / 2 });
        }
        Ok(())
    }

    /// ω-orthogonal complement of a subspace.
    pub fn orthogonal(&self, basis: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        if basis.is_empty() {
            return complete_with_standard(self.dim(), &[]);
        }
        let rows: Vec<Vec<Scalar>> = basis.iter().map(|u| self.omega.transpose().apply(u)).collect();
        Matrix::from_rows(rows).nullspace()
    }

    pub fn weyl(&self) -> CcrAlgebra {
        CcrAlgebra::new(self.gens.clone(), self.omega.clone(), 1)
    }
}

#[derive(Clone, Debug)]
pub struct LagrangianPair {
    pub l1: Vec<Vec<Scalar>>,
    pub l2: Vec<Vec<Scalar>>,
}

impl LagrangianPair {
    pub fn new(v: &SymplecticSpace, l1: Vec<Vec<Scalar>>, l2: Vec<Vec<Scalar>>) -> Result<Self, QuantError> {
        v.check_lagrangian(&l1)?;
        v.check_lagrangian(&l2)?;
        Ok(LagrangianPair { l1: span_basis(v.dim(), &l1), l2: span_basis(v.dim(), &l2) })
    }
}

pub fn weyl_product(w: &CcrAlgebra, x: &Element, y: &Element) -> Element {
    w.mul(x, y)
}

fn vector_parity(gens: &Generators, v: &[Scalar]) -> Result<bool, QuantError> {
    let mut parity = None;
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            let p = gens.is_odd(i);
            if parity.is_some_and(|q| q != p) {
                return Err(QuantError::Inhomogeneous);
            }
            parity = Some(p);
        }
    }
    Ok(parity.unwrap_or(false))
}

/// W(V)/L·W(V), the quotient by the right submodule generated by a Lagrangian L.
///
/// Works in an adapted basis (basis of L first, then standard complement vectors) so that
/// the normal-ordered monomials with a leading L-letter span L·W(V).
#[derive(Clone, Debug)]
pub struct FockModule {
    adapted: CcrAlgebra,
    /// Columns: old generator x_i expressed in adapted generators.
    to_adapted: Matrix,
    l_dim: usize,
}

impl FockModule {
    pub fn new(v: &SymplecticSpace, l: &[Vec<Scalar>]) -> Result<Self, QuantError> {
        v.check_lagrangian(l)?;
        let n = v.dim();
        let lb = span_basis(n, l);
        let comp = complete_with_standard(n, &lb);
        let mut cols = lb.clone();
        cols.extend(comp);
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (k, c) in cols.iter().enumerate() {
            let odd = vector_parity(v.gens(), c)?;
            let deg = c
                .iter()
                .position(|x| !x.is_zero())
                .map(|i| v.gens().degree(i))
                .unwrap_or(if odd { 1 } else { 0 });
            names.push(if k < lb.len() { format!("l{k}") } else { format!("c{}", k - lb.len()) });
            degrees.push(deg);
        }
        let b = Matrix::from_columns(n, &cols);
        let omega_new = b.transpose().mul(v.omega()).mul(&b);
        let to_adapted = b.inverse().expect("adapted basis is a basis");
        Ok(FockModule {
            adapted: CcrAlgebra::new(Generators::new(names, degrees), omega_new, 1),
            to_adapted,
            l_dim: lb.len(),
        })
    }

    pub fn adapted(&self) -> &CcrAlgebra {
        &self.adapted
    }

    /// Rewrites a Weyl element in the adapted generators.
    pub fn transform(&self, x: &Element) -> Element {
        let n = self.to_adapted.rows();
        let mut out = Element::new();
        for ((h, e), c) in x {
            let mut acc = Element::new();
            add_term(&mut acc, (*h, vec![0; n]), c.clone());
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    let lin = self.adapted.linear(&self.to_adapted.column(i));
                    acc = self.adapted.mul(&acc, &lin);
                }
            }
            add_into(&mut out, &acc, &Scalar::one());
        }
        out
    }

    fn kill(&self, x: Element) -> Element {
        x.into_iter().filter(|((_, e), _)| e[..self.l_dim].iter().all(|&k| k == 0)).collect()
    }

    /// Class of `w` in F(L), as an element over the complement generators `c*`.
    pub fn reduce(&self, w: &Element) -> Element {
        self.kill(self.transform(w))
    }

    /// Right action of W(V) on a reduced class.
    pub fn act(&self, class: &Element, a: &Element) -> Element {
        self.kill(self.adapted.mul(class, &self.transform(a)))
    }

    pub fn format(&self, x: &Element) -> String {
        self.adapted.format(x)
    }
}

pub fn fock_reduce(v: &SymplecticSpace, w: &Element, l: &[Vec<Scalar>]) -> Result<Element, QuantError> {
    Ok(FockModule::new(v, l)?.reduce(w))
}

/// Commutative polynomials in n even coordinates with an ħ-grading, same keys as [`Element`].
pub type PolyH = Element;

fn poly_mul(a: &PolyH, b: &PolyH) -> PolyH {
    let mut out = PolyH::new();
    for ((ha, ea), ca) in a {
        for ((hb, eb), cb) in b {
            let e: Exps = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            add_term(&mut out, (ha + hb, e), ca * cb);
        }
    }
    out
}

fn poly_deriv(a: &PolyH, i: usize) -> PolyH {
    let mut out = PolyH::new();
    for ((h, e), c) in a {
        if e[i] > 0 {
            let mut e2 = e.clone();
            e2[i] -= 1;
            add_term(&mut out, (*h, e2), c * int(e[i] as i64));
        }
    }
    out
}

fn poly_degree(a: &PolyH) -> u32 {
    a.keys().map(|(_, e)| e.iter().sum::<u32>()).max().unwrap_or(0)
}

/// f ∗ g = Σ_n (ħ/2)^n/n! Π^{a₁b₁}⋯Π^{aₙbₙ} (∂_{a₁⋯aₙ} f)(∂_{b₁⋯bₙ} g), finite for polynomials.
pub fn star_product(pi: &Matrix, f: &PolyH, g: &PolyH) -> PolyH {
    let n = pi.rows();
    let max_n = poly_degree(f).min(poly_degree(g));
    let mut out = PolyH::new();
    // level holds the pairs (∂^α f, ∂^β g) weighted by Π products, summed over ordered index choices.
    let mut level: Vec<(Scalar, PolyH, PolyH)> = vec![(Scalar::one(), f.clone(), g.clone())];
    for k in 0..=max_n {
        let coeff = frac(1, 2).pow(k as i32) / factorial(k as usize);
        for (w, a, b) in &level {
            let prod = poly_mul(a, b);
            for ((h, e), c) in prod {
                add_term(&mut out, (h + k, e), c * w * &coeff);
            }
        }
        if k == max_n {
            break;
        }
        let mut next = Vec::new();
        for (w, a, b) in &level {
            for i in 0..n {
                for j in 0..n {
                    if pi[(i, j)].is_zero() {
                        continue;
                    }
                    let da = poly_deriv(a, i);
                    let db = poly_deriv(b, j);
                    if !da.is_empty() && !db.is_empty() {
                        next.push((w * &pi[(i, j)], da, db));
                    }
                }
            }
        }
        level = next;
    }
    out
}

/// Matrix of the bivector ω^{−1}: V^∨ → V in the standard dual basis, `Π^{ab} = e^a(Π e^b)`.
pub fn bivector_of(omega: &Matrix) -> Matrix {
    omega.inverse().expect("symplectic form is invertible").transpose()
}

/// Linear function ν_v = ω(v, ·) of a generator, as a polynomial in the dual coordinates.
pub fn dual_coordinate(omega: &Matrix, i: usize) -> PolyH {
    let n = omega.rows();
    let mut p = PolyH::new();
    for k in 0..n {
        let mut e = vec![0; n];
        e[k] = 1;
        add_term(&mut p, (0, e), omega[(i, k)].clone());
    }
    p
}

/// Weyl (symmetric) ordering of a commutative monomial, ħ-powers carried along.
pub fn symmetrize(w: &CcrAlgebra, p: &PolyH) -> Element {
    let mut out = Element::new();
    for ((h, e), c) in p {
        let mut letters = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            letters.extend(core::iter::repeat_n(i, k as usize));
        }
        let k = letters.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let norm = c / factorial(k);
        let mut acc = Element::new();
        loop {
            let word: Vec<usize> = perm.iter().map(|&p| letters[p]).collect();
            add_into(&mut acc, &w.word(&word), &norm);
            if !next_permutation(&mut perm) {
                break;
            }
        }
        for ((hh, ee), cc) in acc {
            add_term(&mut out, (hh + h, ee), cc);
        }
    }
    out
}

/// Substitutes x_i ↦ ν_{x_i} in a commutative polynomial.
pub fn to_dual_coordinates(omega: &Matrix, p: &PolyH) -> PolyH {
    let n = omega.rows();
    let mut out = PolyH::new();
    for ((h, e), c) in p {
        let mut acc = PolyH::new();
        add_term(&mut acc, (*h, vec![0; n]), c.clone());
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                acc = poly_mul(&acc, &dual_coordinate(omega, i));
            }
        }
        for (kk, v) in acc {
            add_term(&mut out, kk, v);
        }
    }
    out
}

/// (basis of L₁∩L₂, basis of a complement of L₁+L₂).
pub fn topmech_cohomology(
    v: &SymplecticSpace,
    l1: &[Vec<Scalar>],
    l2: &[Vec<Scalar>],
) -> Result<(Vec<Vec<Scalar>>, Vec<Vec<Scalar>>), QuantError> {
    v.check_lagrangian(l1)?;
    v.check_lagrangian(l2)?;
    let n = v.dim();
    let inter = intersection(n, l1, l2);
    let mut all = l1.to_vec();
    all.extend(l2.iter().cloned());
    let sum = span_basis(n, &all);
    Ok((inter, complete_with_standard(n, &sum)))
}

/// Finite-dimensional graded algebra by sparse structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    labels: Vec<String>,
    degrees: Vec<i32>,
    unit: Vec<Scalar>,
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
}

fn sparse(v: &[Scalar]) -> Vec<(usize, Scalar)> {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

impl FiniteAlgebra {
    pub fn new(labels: Vec<String>, degrees: Vec<i32>, unit: Vec<Scalar>, table: Vec<Vec<Vec<Scalar>>>) -> Self {
        let table = table.iter().map(|row| row.iter().map(|v| sparse(v)).collect()).collect();
        FiniteAlgebra { labels, degrees, unit, table }
    }

    /// The algebra spanned by all normal-ordered monomials of a finite CCR algebra (ħ-free).
    pub fn from_ccr(alg: &CcrAlgebra, basis: &MonoBasis) -> Self {
        let n = basis.len();
        let key = |i: usize| -> Key { (0, basis.get(i).clone()) };
        let vec_of = |x: &Element| {
            let mut v = vec![Scalar::zero(); n];
            for ((h, e), c) in x {
                assert_eq!(*h, 0, "finite algebra must be ħ-free");
                v[basis.position(e).expect("closed basis")] += c.clone();
            }
            v
        };
        let table = (0..n).map(|i| (0..n).map(|j| vec_of(&alg.mul_mono(&key(i), &key(j)))).collect()).collect();
        let mut unit = vec![Scalar::zero(); n];
        unit[basis.position(&vec![0; alg.gens().len()]).expect("unit monomial")] = Scalar::one();
        FiniteAlgebra::new(
            basis.monos().iter().map(|e| alg.gens().mono_label(e)).collect(),
            basis.monos().iter().map(|e| alg.gens().mono_degree(e)).collect(),
            unit,
            table,
        )
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        v
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in &self.table[i][j] {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    /// Adds `c · e_k` to the product `e_i · e_j` (negative controls).
    pub fn perturb(&mut self, i: usize, j: usize, k: usize, c: Scalar) {
        let row = &mut self.table[i][j];
        match row.iter_mut().find(|(kk, _)| *kk == k) {
            Some((_, v)) => *v += c,
            None => row.push((k, c)),
        }
    }

    pub fn check(&self) -> Result<(), QuantError> {
        let n = self.dim();
        for i in 0..n {
            let e = self.basis_vector(i);
            if self.mul(&self.unit, &e) != e || self.mul(&e, &self.unit) != e {
                return Err(QuantError::NotUnital(i));
            }
        }
        for i in 0..n {
            let ei = self.basis_vector(i);
            for j in 0..n {
                let ij = self.mul(&ei, &self.basis_vector(j));
                for k in 0..n {
                    let ek = self.basis_vector(k);
                    let jk = self.mul(&self.basis_vector(j), &ek);
                    if self.mul(&ij, &ek) != self.mul(&ei, &jk) {
                        return Err(QuantError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// Text form: `dim`, `degrees`, `unit` lines then `i j k p/q` for e_i e_j ∋ c e_k.
    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\n", self.dim());
        let degs: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        s.push_str(&format!("degrees {}\n", degs.join(" ")));
        let unit: Vec<String> = self.unit.iter().map(scalar::format).collect();
        s.push_str(&format!("unit {}\n", unit.join(" ")));
        for (i, row) in self.table.iter().enumerate() {
            for (j, entries) in row.iter().enumerate() {
                for (k, c) in entries {
                    if !c.is_zero() {
                        s.push_str(&format!("{i} {j} {k} {}\n", scalar::format(c)));
                    }
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, QuantError> {
        let mut dim = None;
        let mut degrees = Vec::new();
        let mut unit = Vec::new();
        let mut table: Vec<Vec<Vec<Scalar>>> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| QuantError::Parse { line: k + 1, msg: m.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "dim" => {
                    let n: usize = parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| err("bad dim"))?;
                    dim = Some(n);
                    table = vec![vec![vec![Scalar::zero(); n]; n]; n];
                }
                "degrees" => {
                    degrees = parts[1..].iter().map(|s| s.parse().map_err(|_| err("bad degree"))).collect::<Result<_, _>>()?
                }
                "unit" => {
                    unit = parts[1..].iter().map(|s| scalar::parse(s).ok_or_else(|| err("bad unit"))).collect::<Result<_, _>>()?
                }
                _ => {
                    let n = dim.ok_or_else(|| err("dim must come first"))?;
                    if parts.len() != 4 {
                        return Err(err("expected `i j k p/q`"));
                    }
                    let idx = |s: &str| s.parse::<usize>().ok().filter(|&i| i < n).ok_or_else(|| err("bad index"));
                    let (i, j, kk) = (idx(parts[0])?, idx(parts[1])?, idx(parts[2])?);
                    table[i][j][kk] = scalar::parse(parts[3]).ok_or_else(|| err("bad coefficient"))?;
                }
            }
        }
        let n = dim.ok_or(QuantError::Parse { line: 0, msg: "missing dim".to_string() })?;
        if degrees.len() != n || unit.len() != n {
            return Err(QuantError::Parse { line: 0, msg: "degrees/unit length mismatch".to_string() });
        }
        Ok(FiniteAlgebra::new((0..n).map(|i| format!("b{i}")).collect(), degrees, unit, table))
    }
}

/// Right module over a [`FiniteAlgebra`] with a distinguished point.
#[derive(Clone, Debug)]
pub struct PointedModule {
    labels: Vec<String>,
    degrees: Vec<i32>,
    point: Vec<Scalar>,
    /// `action[i][j]` = e_i · a_j.
    action: Vec<Vec<Vec<(usize, Scalar)>>>,
}

impl PointedModule {
    pub fn new(labels: Vec<String>, degrees: Vec<i32>, point: Vec<Scalar>, action: Vec<Vec<Vec<Scalar>>>) -> Self {
        let action = action.iter().map(|row| row.iter().map(|v| sparse(v)).collect()).collect();
        PointedModule { labels, degrees, point, action }
    }

    /// A as a right module over itself, pointed by the unit.
    pub fn regular(a: &FiniteAlgebra) -> Self {
        PointedModule {
            labels: a.labels.clone(),
            degrees: a.degrees.clone(),
            point: a.unit.clone(),
            action: a.table.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn point(&self) -> &[Scalar] {
        &self.point
    }

    pub fn act(&self, m: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, x) in m.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in a.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in &self.action[i][j] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    pub fn check(&self, a: &FiniteAlgebra) -> Result<(), QuantError> {
        for i in 0..self.dim() {
            let mut e = vec![Scalar::zero(); self.dim()];
            e[i] = Scalar::one();
            if self.act(&e, a.unit()) != e {
                return Err(QuantError::NotUnital(i));
            }
            for j in 0..a.dim() {
                let ej = a.basis_vector(j);
                let mj = self.act(&e, &ej);
                for k in 0..a.dim() {
                    let ek = a.basis_vector(k);
                    if self.act(&mj, &ek) != self.act(&e, &a.mul(&ej, &ek)) {
                        return Err(QuantError::NotModule(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Λg = Sym(g[1]) as an exterior algebra on generators of degree −1, acting on itself.
pub fn exterior_fa(dim: usize) -> IntervalFa {
    let gens = Generators::new((0..dim).map(|a| format!("T{a}")).collect(), vec![-1; dim]);
    let alg = CcrAlgebra::new(gens.clone(), Matrix::zeros(dim, dim), 0);
    let basis = MonoBasis::up_to_length(&gens, dim as u32, |_| true);
    let a = FiniteAlgebra::from_ccr(&alg, &basis);
    let m = PointedModule::regular(&a);
    IntervalFa::new(a, m).expect("exterior algebra is associative")
}

/// Cl(g) acting on its Fock-type quotient Cl(g)/(e^a Cl(g)), pointed by the class of 1.
pub fn clifford_fa(dim: usize) -> IntervalFa {
    let cl = clifford_algebra(dim);
    let basis = MonoBasis::up_to_length(cl.gens(), 2 * dim as u32, |_| true);
    let a = FiniteAlgebra::from_ccr(&cl, &basis);
    let mbasis: Vec<usize> = (0..basis.len()).filter(|&i| basis.get(i)[..dim].iter().all(|&k| k == 0)).collect();
    let mpos = |e: &Exps| mbasis.iter().position(|&i| basis.get(i) == e);
    let mut action = Vec::new();
    for &i in &mbasis {
        let mut row = Vec::new();
        for j in 0..basis.len() {
            let prod = cl.mul_mono(&(0, basis.get(i).clone()), &(0, basis.get(j).clone()));
            let mut v = vec![Scalar::zero(); mbasis.len()];
            for ((_, e), c) in prod {
                if let Some(k) = mpos(&e) {
                    v[k] += c;
                }
            }
            row.push(v);
        }
        action.push(row);
    }
    let mut point = vec![Scalar::zero(); mbasis.len()];
    point[mpos(&vec![0; 2 * dim]).expect("unit class")] = Scalar::one();
    let m = PointedModule::new(
        mbasis.iter().map(|&i| cl.gens().mono_label(basis.get(i))).collect(),
        mbasis.iter().map(|&i| cl.gens().mono_degree(basis.get(i))).collect(),
        point,
        action,
    );
    IntervalFa::new(a, m).expect("Clifford module is well defined")
}

/// F_{A,M}: A on open intervals, M on intervals containing 0.
#[derive(Clone, Debug)]
pub struct IntervalFa {
    a: FiniteAlgebra,
    m: PointedModule,
}

impl IntervalFa {
    pub fn new(a: FiniteAlgebra, m: PointedModule) -> Result<Self, QuantError> {
        a.check()?;
        m.check(&a)?;
        Ok(IntervalFa { a, m })
    }

    /// Skips validation; used to probe the axiom checker with broken data.
    pub fn new_unchecked(a: FiniteAlgebra, m: PointedModule) -> Self {
        IntervalFa { a, m }
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.a
    }

    pub fn module(&self) -> &PointedModule {
        &self.m
    }
}

/// Interval with integer endpoints: `[0, end)` when `at_zero`, else `(start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub start: i64,
    pub end: i64,
    pub at_zero: bool,
}

impl Interval {
    pub fn open(start: i64, end: i64) -> Self {
        Interval { start, end, at_zero: false }
    }

    pub fn half_open(end: i64) -> Self {
        Interval { start: 0, end, at_zero: true }
    }

    fn valid(&self) -> bool {
        self.start >= 0 && self.start < self.end && (!self.at_zero || self.start == 0)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        if other.at_zero && !self.at_zero {
            return false;
        }
        self.start <= other.start && other.end <= self.end
    }

    fn disjoint(&self, other: &Interval) -> bool {
        self.end <= other.start || other.end <= self.start
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalConfig {
    pub intervals: Vec<Interval>,
    pub target: Interval,
}

impl IntervalConfig {
    pub fn validate(&self) -> Result<(), QuantError> {
        let bad = |m: &str| Err(QuantError::BadConfig(m.to_string()));
        if !self.target.valid() || self.intervals.iter().any(|i| !i.valid()) {
            return bad("malformed interval");
        }
        if self.intervals.iter().filter(|i| i.at_zero).count() > 1 {
            return bad("more than one interval contains 0");
        }
        for (k, i) in self.intervals.iter().enumerate() {
            if !self.target.contains(i) {
                return bad("interval not contained in target");
            }
            if self.intervals[k + 1..].iter().any(|j| !i.disjoint(j)) {
                return bad("intervals overlap");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaElement {
    A(Vec<Scalar>),
    M(Vec<Scalar>),
}

impl FaElement {
    fn vector(&self) -> &[Scalar] {
        match self {
            FaElement::A(v) | FaElement::M(v) => v,
        }
    }

    fn degree(&self, fa: &IntervalFa) -> i32 {
        let degs = match self {
            FaElement::A(_) => fa.a.degrees(),
            FaElement::M(_) => fa.m.degrees(),
        };
        self.vector().iter().position(|c| !c.is_zero()).map_or(0, |i| degs[i])
    }
}

/// Structure map m_{U₁…U_k}^V: Koszul-sign the inputs into spatial order, then multiply left to right,
/// starting from the point (or the M-input) when the target contains 0.
pub fn fa_structure_map(fa: &IntervalFa, config: &IntervalConfig, elements: &[FaElement]) -> Result<FaElement, QuantError> {
    config.validate()?;
    if elements.len() != config.intervals.len() {
        return Err(QuantError::BadConfig(format!(
            "{} elements for {} intervals",
            elements.len(),
            config.intervals.len()
        )));
    }
    for (k, (iv, el)) in config.intervals.iter().zip(elements).enumerate() {
        let ok = match el {
            FaElement::A(v) => !iv.at_zero && v.len() == fa.a.dim(),
            FaElement::M(v) => iv.at_zero && v.len() == fa.m.dim(),
        };
        if !ok {
            return Err(QuantError::TypeMismatch(k));
        }
    }
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by_key(|&k| config.intervals[k].start);
    let degs: Vec<i32> = elements.iter().map(|e| e.degree(fa)).collect();
    let sign = int(crate::graded::koszul_parity(&order, &degs));
    let scale = |v: Vec<Scalar>| -> Vec<Scalar> { v.into_iter().map(|c| c * &sign).collect() };
    if config.target.at_zero {
        let mut cur = fa.m.point().to_vec();
        for &k in &order {
            cur = match &elements[k] {
                FaElement::M(v) => v.clone(),
                FaElement::A(v) => fa.m.act(&cur, v),
            };
        }
        Ok(FaElement::M(scale(cur)))
    } else {
        let mut cur = fa.a.unit().to_vec();
        for &k in &order {
            cur = fa.a.mul(&cur, elements[k].vector());
        }
        Ok(FaElement::A(scale(cur)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FaReport {
    pub shapes: usize,
    pub evaluations: usize,
    pub failure: Option<String>,
}

impl FaReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Abstract nested configuration: a node is an interval whose children sit inside it in spatial order.
#[derive(Clone, Debug)]
struct Node {
    at_zero: bool,
    /// Input slot; inner nodes without children are empty configurations.
    leaf: bool,
    children: Vec<Node>,
}

fn enumerate_nodes(at_zero: bool, depth: usize, max_children: usize) -> Vec<Node> {
    if depth == 0 {
        return vec![Node { at_zero, leaf: true, children: Vec::new() }];
    }
    let mut out = Vec::new();
    for k in 0..=max_children {
        // first child may touch 0 only when the parent does
        let kinds: Vec<bool> = if at_zero && k > 0 { vec![false, true] } else { vec![false] };
        for first_zero in kinds {
            let mut partial: Vec<Vec<Node>> = vec![Vec::new()];
            for c in 0..k {
                let child_zero = c == 0 && first_zero;
                let opts = enumerate_nodes(child_zero, depth - 1, max_children);
                let mut next = Vec::new();
                for p in &partial {
                    for o in &opts {
                        let mut q = p.clone();
                        q.push(o.clone());
                        next.push(q);
                    }
                }
                partial = next;
            }
            for children in partial {
                out.push(Node { at_zero, leaf: false, children });
            }
        }
    }
    out
}

/// Places a node tree on integer intervals; returns (interval, children placements).
#[derive(Clone, Debug)]
struct Placed {
    iv: Interval,
    leaf: bool,
    children: Vec<Placed>,
}

fn width(n: &Node) -> i64 {
    if n.children.is_empty() {
        1
    } else {
        n.children.iter().map(|c| width(c) + 1).sum::<i64>() + 1
    }
}

fn place(n: &Node, start: i64) -> Placed {
    let end = start + width(n);
    let mut pos = start;
    let mut children = Vec::new();
    for (k, c) in n.children.iter().enumerate() {
        let s = if k == 0 && c.at_zero { 0 } else { pos + 1 };
        let p = place(c, s);
        pos = p.iv.end;
        children.push(p);
    }
    let iv = if n.at_zero { Interval::half_open(end) } else { Interval::open(start, end) };
    Placed { iv, leaf: n.leaf, children }
}

fn leaves(p: &Placed, out: &mut Vec<Interval>) {
    if p.leaf {
        out.push(p.iv);
    }
    for c in &p.children {
        leaves(c, out);
    }
}

/// Deterministic generator for sample elements.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn small(&mut self) -> i64 {
        (self.next() % 1999) as i64 - 999
    }
}

fn homogeneous_sample(degrees: &[i32], rng: &mut Lcg) -> Vec<Scalar> {
    let mut degs: Vec<i32> = degrees.to_vec();
    degs.sort_unstable();
    degs.dedup();
    let d = degs[(rng.next() as usize) % degs.len()];
    degrees.iter().map(|&x| if x == d { int(rng.small()) } else { Scalar::zero() }).collect()
}

/// Evaluates a placed tree level by level (inner structure maps first), with the inputs of
/// every node listed in the order given by `perm_of`.
fn eval_nested(
    fa: &IntervalFa,
    p: &Placed,
    inputs: &mut core::slice::Iter<'_, FaElement>,
    reverse: bool,
) -> Result<FaElement, QuantError> {
    if p.leaf {
        return Ok(inputs.next().expect("one input per leaf").clone());
    }
    let mut ivs = Vec::new();
    let mut els = Vec::new();
    for c in &p.children {
        ivs.push(c.iv);
        els.push(eval_nested(fa, c, inputs, reverse)?);
    }
    let mut sign = 1;
    if reverse {
        // listing the tensor factors backwards costs the Koszul sign of the reversal
        let degs: Vec<i32> = els.iter().map(|e| e.degree(fa)).collect();
        let rev: Vec<usize> = (0..els.len()).rev().collect();
        sign = crate::graded::koszul_parity(&rev, &degs);
        ivs.reverse();
        els.reverse();
    }
    let out = fa_structure_map(fa, &IntervalConfig { intervals: ivs, target: p.iv }, &els)?;
    Ok(match out {
        FaElement::A(v) => FaElement::A(v.into_iter().map(|c| c * int(sign)).collect()),
        FaElement::M(v) => FaElement::M(v.into_iter().map(|c| c * int(sign)).collect()),
    })
}

/// Checks composition (nested = flattened) and symmetry (listing order) over all nested
/// configurations with at most `depth` levels and 3 intervals per level.
pub fn fa_axiom_check(fa: &IntervalFa, depth: usize) -> FaReport {
    let mut report = FaReport::default();
    let mut rng = Lcg(0x5eed);
    let budget: u64 = 512;
    for root_zero in [false, true] {
        for shape in enumerate_nodes(root_zero, depth.max(1), 3) {
            report.shapes += 1;
            let placed = place(&shape, 0);
            let mut leaf_ivs = Vec::new();
            leaves(&placed, &mut leaf_ivs);
            let dims: Vec<usize> = leaf_ivs.iter().map(|iv| if iv.at_zero { fa.m.dim() } else { fa.a.dim() }).collect();
            let total: u64 = dims.iter().fold(1u64, |acc, &d| acc.saturating_mul(d as u64));
            let mut tuples: Vec<Vec<FaElement>> = Vec::new();
            let make = |iv: &Interval, v: Vec<Scalar>| if iv.at_zero { FaElement::M(v) } else { FaElement::A(v) };
            if total <= budget {
                let mut idx = vec![0usize; dims.len()];
                loop {
                    tuples.push(
                        leaf_ivs
                            .iter()
                            .zip(&idx)
                            .zip(&dims)
                            .map(|((iv, &i), &d)| {
                                let mut v = vec![Scalar::zero(); d];
                                v[i] = Scalar::one();
                                make(iv, v)
                            })
                            .collect(),
                    );
                    let mut k = 0;
                    while k < idx.len() {
                        idx[k] += 1;
                        if idx[k] < dims[k] {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                    if k == idx.len() {
                        break;
                    }
                }
            } else {
                for _ in 0..6 {
                    tuples.push(
                        leaf_ivs
                            .iter()
                            .map(|iv| {
                                let degs = if iv.at_zero { fa.m.degrees() } else { fa.a.degrees() };
                                make(iv, homogeneous_sample(degs, &mut rng))
                            })
                            .collect(),
                    );
                }
            }
            for tuple in &tuples {
                report.evaluations += 1;
                let flat = IntervalConfig { intervals: leaf_ivs.clone(), target: placed.iv };
                let expected = match fa_structure_map(fa, &flat, tuple) {
                    Ok(v) => v,
                    Err(e) => {
                        report.failure = Some(format!("flat map failed: {e}"));
                        return report;
                    }
                };
                for reverse in [false, true] {
                    let got = eval_nested(fa, &placed, &mut tuple.iter(), reverse);
                    if got.as_ref() != Ok(&expected) {
                        report.failure = Some(format!(
                            "composition fails on configuration {:?} (reversed listing: {reverse})",
                            placed_summary(&placed)
                        ));
                        return report;
                    }
                }
            }
        }
    }
    report
}

fn placed_summary(p: &Placed) -> String {
    let iv = if p.iv.at_zero { format!("[0,{})", p.iv.end) } else { format!("({},{})", p.iv.start, p.iv.end) };
    if p.leaf {
        iv
    } else {
        let kids: Vec<String> = p.children.iter().map(placed_summary).collect();
        format!("{iv}{{{}}}", kids.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_enumeration_counts() {
        // open root, depth 1: 0..3 open children
        assert_eq!(enumerate_nodes(false, 1, 3).len(), 4);
        // at-zero root, depth 1: k=0 once, else two choices for the first child
        assert_eq!(enumerate_nodes(true, 1, 3).len(), 7);
    }

    #[test]
    fn placement_is_valid() {
        for shape in enumerate_nodes(true, 2, 3) {
            let p = place(&shape, 0);
            fn check(p: &Placed) {
                let cfg = IntervalConfig { intervals: p.children.iter().map(|c| c.iv).collect(), target: p.iv };
                cfg.validate().unwrap();
                p.children.iter().for_each(check);
            }
            check(&p);
        }
    }
}
