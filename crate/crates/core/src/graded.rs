//! Graded vector spaces, maps and complexes over the rationals.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{independent_subset, Matrix};
use crate::scalar::{int, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("length mismatch: {0} labels, {1} degrees")]
    LengthMismatch(usize, usize),
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("duplicate basis label {0}")]
    DuplicateLabel(String),
    #[error("map entry connects degree {from} to {to}, expected shift {shift}")]
    DegreeViolation { from: i32, to: i32, shift: i32 },
    #[error("matrix is {rows}x{cols}, expected {exp_rows}x{exp_cols}")]
    Shape { rows: usize, cols: usize, exp_rows: usize, exp_cols: usize },
    #[error("differential does not square to zero: entry ({target}, {input}) is {value}")]
    NotNilpotent { target: String, input: String, value: String },
    #[error("differential must have degree +1, got {0}")]
    WrongDegree(i32),
}

/// Sign of reordering graded factors: `perm[i]` is the original index of the factor now in slot `i`.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<Scalar, GradedError> {
    if perm.len() != degrees.len() {
        return Err(GradedError::LengthMismatch(perm.len(), degrees.len()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(GradedError::NotPermutation(perm.len()));
        }
        seen[p] = true;
    }
    Ok(int(koszul_parity(perm, degrees)))
}

/// Same as [`koszul_sign`] without validation, as ±1.
pub fn koszul_parity(perm: &[usize], degrees: &[i32]) -> i64 {
    let mut odd_swaps = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] % 2 != 0 && degrees[perm[j]] % 2 != 0 {
                odd_swaps += 1;
            }
        }
    }
    if odd_swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    labels: Vec<String>,
    degrees: Vec<i32>,
}

impl GradedSpace {
    pub fn new(labels: Vec<String>, degrees: Vec<i32>) -> Result<Self, GradedError> {
        if labels.len() != degrees.len() {
            return Err(GradedError::LengthMismatch(labels.len(), degrees.len()));
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(GradedError::DuplicateLabel(w[0].clone()));
            }
        }
        Ok(GradedSpace { labels, degrees })
    }

    /// Basis `prefix0, prefix1, ...` all in one degree.
    pub fn uniform(prefix: &str, n: usize, degree: i32) -> Self {
        let labels = (0..n).map(|i| alloc::format!("{prefix}{i}")).collect();
        GradedSpace { labels, degrees: vec![degree; n] }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    /// Indices of basis vectors in degree `d`, in basis order.
    pub fn indices_in(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    /// Occupied degrees in increasing order.
    pub fn occupied_degrees(&self) -> Vec<i32> {
        let mut d = self.degrees.clone();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn dims_by_degree(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for &d in &self.degrees {
            *m.entry(d).or_insert(0) += 1;
        }
        m
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A homogeneous linear map, stored as blocks from each source degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: GradedSpace,
    target: GradedSpace,
    shift: i32,
    blocks: BTreeMap<i32, Matrix>,
}

impl GradedMap {
    /// Builds the map from its full matrix (rows index the target basis).
    pub fn from_matrix(
        source: GradedSpace,
        target: GradedSpace,
        shift: i32,
        m: &Matrix,
    ) -> Result<Self, GradedError> {
        if m.rows() != target.dim() || m.cols() != source.dim() {
            return Err(GradedError::Shape {
                rows: m.rows(),
                cols: m.cols(),
                exp_rows: target.dim(),
                exp_cols: source.dim(),
            });
        }
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() && target.degree(i) != source.degree(j) + shift {
                    return Err(GradedError::DegreeViolation {
                        from: source.degree(j),
                        to: target.degree(i),
                        shift,
                    });
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for d in source.occupied_degrees() {
            let cols = source.indices_in(d);
            let rows = target.indices_in(d + shift);
            if rows.is_empty() {
                continue;
            }
            let b = m.select_rows(&rows).select_columns(&cols);
            if !b.is_zero() {
                blocks.insert(d, b);
            }
        }
        Ok(GradedMap { source, target, shift, blocks })
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, shift: i32) -> Self {
        GradedMap { source, target, shift, blocks: BTreeMap::new() }
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    /// Block from source degree `d` to target degree `d + shift` (zero if omitted).
    pub fn block(&self, d: i32) -> Matrix {
        self.blocks.get(&d).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.target.indices_in(d + self.shift).len(), self.source.indices_in(d).len())
        })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.target.dim(), self.source.dim());
        for (&d, b) in &self.blocks {
            let cols = self.source.indices_in(d);
            let rows = self.target.indices_in(d + self.shift);
            for (bi, &i) in rows.iter().enumerate() {
                for (bj, &j) in cols.iter().enumerate() {
                    m[(i, j)] = b[(bi, bj)].clone();
                }
            }
        }
        m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> GradedMap {
        assert_eq!(other.target, self.source, "composition of incompatible maps");
        let m = self.to_matrix().mul(&other.to_matrix());
        GradedMap::from_matrix(other.source.clone(), self.target.clone(), self.shift + other.shift, &m)
            .expect("composite of homogeneous maps is homogeneous")
    }
}

#[derive(Clone, Debug)]
pub struct GradedComplex {
    space: GradedSpace,
    differential: GradedMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cohomology {
    /// (degree, dimension) for every occupied degree, ascending.
    pub dims: Vec<(i32, usize)>,
    /// Cocycle representatives spanning a complement of the coboundaries, as full-space vectors.
    pub representatives: BTreeMap<i32, Vec<Vec<Scalar>>>,
}

impl Cohomology {
    pub fn dim(&self, d: i32) -> usize {
        self.dims.iter().find(|(k, _)| *k == d).map_or(0, |(_, n)| *n)
    }

    pub fn total(&self) -> usize {
        self.dims.iter().map(|(_, n)| n).sum()
    }

    pub fn euler(&self) -> i64 {
        self.dims.iter().map(|&(d, n)| if d % 2 == 0 { n as i64 } else { -(n as i64) }).sum()
    }
}

impl GradedComplex {
    /// Checks `d ∘ d = 0` exactly.
    pub fn new(space: GradedSpace, differential: GradedMap) -> Result<Self, GradedError> {
        if differential.shift() != 1 {
            return Err(GradedError::WrongDegree(differential.shift()));
        }
        assert_eq!(differential.source(), &space);
        assert_eq!(differential.target(), &space);
        let sq = differential.to_matrix().mul(&differential.to_matrix());
        if let Some((i, j, v)) = sq.first_nonzero() {
            return Err(GradedError::NotNilpotent {
                target: space.label(i).to_string(),
                input: space.label(j).to_string(),
                value: crate::scalar::format(v),
            });
        }
        Ok(GradedComplex { space, differential })
    }

    pub fn from_matrix(space: GradedSpace, d: &Matrix) -> Result<Self, GradedError> {
        let map = GradedMap::from_matrix(space.clone(), space.clone(), 1, d)?;
        GradedComplex::new(space, map)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    pub fn cohomology(&self) -> Cohomology {
        let n = self.space.dim();
        let mut dims = Vec::new();
        let mut representatives = BTreeMap::new();
        for d in self.space.occupied_degrees() {
            let idx = self.space.indices_in(d);
            let prev_idx = self.space.indices_in(d - 1);
            let out = self.differential.block(d);
            let inc = self.differential.block(d - 1);
            let embed = |local: &[Scalar]| {
                let mut v = vec![Scalar::zero(); n];
                for (k, &i) in idx.iter().enumerate() {
                    v[i] = local[k].clone();
                }
                v
            };
            let cocycles: Vec<Vec<Scalar>> = if out.rows() == 0 {
                (0..idx.len())
                    .map(|k| {
                        let mut e = vec![Scalar::zero(); idx.len()];
                        e[k] = Scalar::one();
                        e
                    })
                    .collect()
            } else {
                out.nullspace()
            };
            let boundaries: Vec<Vec<Scalar>> =
                if prev_idx.is_empty() { Vec::new() } else { inc.columns() };
            let nb = boundaries.len();
            let mut family = boundaries;
            family.extend(cocycles.iter().cloned());
            let chosen = independent_subset(idx.len(), &family);
            let b_rank = chosen.iter().filter(|&&k| k < nb).count();
            let reps: Vec<Vec<Scalar>> =
                chosen.iter().filter(|&&k| k >= nb).map(|&k| embed(&family[k])).collect();
            debug_assert_eq!(reps.len(), cocycles.len() - b_rank);
            dims.push((d, reps.len()));
            representatives.insert(d, reps);
        }
        Cohomology { dims, representatives }
    }

    /// Euler characteristic of the chain groups.
    pub fn chain_euler(&self) -> i64 {
        self.space
            .dims_by_degree()
            .iter()
            .map(|(&d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }
}

/// A graded-commutative monomial: labels sorted by (degree, index), odd labels at most once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<usize>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    /// Canonicalizes a word of basis indices; `None` when an odd factor repeats.
    pub fn from_word(space: &GradedSpace, word: &[usize]) -> Option<(i64, Monomial)> {
        let key = |i: usize| (space.degree(i), i);
        let mut perm: Vec<usize> = (0..word.len()).collect();
        perm.sort_by_key(|&k| key(word[k]));
        let degs: Vec<i32> = word.iter().map(|&i| space.degree(i)).collect();
        let sign = koszul_parity(&perm, &degs);
        let factors: Vec<usize> = perm.iter().map(|&k| word[k]).collect();
        for w in factors.windows(2) {
            if w[0] == w[1] && space.degree(w[0]) % 2 != 0 {
                return None;
            }
        }
        Some((sign, Monomial { factors }))
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self, space: &GradedSpace) -> i32 {
        self.factors.iter().map(|&i| space.degree(i)).sum()
    }

    pub fn label(&self, space: &GradedSpace) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<&str> = self.factors.iter().map(|&i| space.label(i)).collect();
        parts.join("*")
    }
}

/// Canonical monomials of word length `k`.
pub fn sym_monomials(space: &GradedSpace, k: usize) -> Vec<Monomial> {
    let mut order: Vec<usize> = (0..space.dim()).collect();
    order.sort_by_key(|&i| (space.degree(i), i));
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        space: &GradedSpace,
        order: &[usize],
        start: usize,
        k: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Monomial>,
    ) {
        if cur.len() == k {
            out.push(Monomial { factors: cur.clone() });
            return;
        }
        for pos in start..order.len() {
            let i = order[pos];
            cur.push(i);
            let next = if space.degree(i) % 2 != 0 { pos + 1 } else { pos };
            rec(space, order, next, k, cur, out);
            cur.pop();
        }
    }
    rec(space, &order, 0, k, &mut cur, &mut out);
    out
}

/// k-th graded symmetric power, with basis the canonical monomials.
pub fn sym_power(space: &GradedSpace, k: usize) -> GradedSpace {
    let monos = sym_monomials(space, k);
    let labels = monos.iter().map(|m| m.label(space)).collect();
    let degrees = monos.iter().map(|m| m.degree(space)).collect();
    GradedSpace { labels, degrees }
}

/// Coefficient of x^k in Π(1+x)^{odd} / Π(1−x)^{even}.
pub fn sym_power_count(n_even: usize, n_odd: usize, k: usize) -> u128 {
    let mut coeffs = vec![0u128; k + 1];
    coeffs[0] = 1;
    for _ in 0..n_odd {
        for j in (1..=k).rev() {
            coeffs[j] += coeffs[j - 1];
        }
    }
    for _ in 0..n_even {
        for j in 1..=k {
            coeffs[j] += coeffs[j - 1];
        }
    }
    coeffs[k]
}
