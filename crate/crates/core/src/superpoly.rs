//! Graded-commutative polynomial algebras and the differential operators built from
//! left multiplications and left derivatives.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::graded::GradedSpace;
use crate::linalg::Matrix;
use crate::scalar::{int, Scalar};

/// Exponent vector in generator order; odd exponents are 0 or 1.
pub type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generators {
    names: Vec<String>,
    degrees: Vec<i32>,
}

impl Generators {
    pub fn new(names: Vec<String>, degrees: Vec<i32>) -> Self {
        assert_eq!(names.len(), degrees.len());
        Generators { names, degrees }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.degrees[i] % 2 != 0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn mono_degree(&self, e: &[u32]) -> i32 {
        e.iter().zip(&self.degrees).map(|(&k, &d)| k as i32 * d).sum()
    }

    pub fn mono_label(&self, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.names[i].clone()),
                _ => parts.push(format!("{}^{}", self.names[i], k)),
            }
        }
        if parts.is_empty() {
            String::from("1")
        } else {
            parts.join("*")
        }
    }

    /// Parity of the odd letters strictly before generator `i`.
    fn odd_prefix(&self, e: &[u32], i: usize) -> u32 {
        (0..i).filter(|&j| self.is_odd(j)).map(|j| e[j]).sum::<u32>() % 2
    }
}

pub type Poly = BTreeMap<Exps, Scalar>;

pub fn poly_add_term(p: &mut Poly, e: Exps, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match p.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Elementary operator on a graded polynomial algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Mul(usize),
    Deriv(usize),
}

impl Op {
    /// Applies to a single monomial, returning (sign/coefficient, result) or `None` for zero.
    pub fn apply_mono(self, g: &Generators, e: &[u32]) -> Option<(i64, Exps)> {
        match self {
            Op::Mul(i) => {
                if g.is_odd(i) && e[i] == 1 {
                    return None;
                }
                let sign = if g.is_odd(i) && g.odd_prefix(e, i) == 1 { -1 } else { 1 };
                let mut out = e.to_vec();
                out[i] += 1;
                Some((sign, out))
            }
            Op::Deriv(i) => {
                if e[i] == 0 {
                    return None;
                }
                let sign = if g.is_odd(i) && g.odd_prefix(e, i) == 1 { -1 } else { 1 };
                let mut out = e.to_vec();
                let k = out[i] as i64;
                out[i] -= 1;
                Some((sign * k, out))
            }
        }
    }
}

/// Linear combination of words in elementary operators; a word acts right to left.
#[derive(Clone, Debug, Default)]
pub struct Operator {
    terms: Vec<(Scalar, Vec<Op>)>,
}

impl Operator {
    pub fn new() -> Self {
        Operator { terms: Vec::new() }
    }

    /// Adds `c * ops[0] ∘ ops[1] ∘ ... ∘ ops[n-1]`.
    pub fn push(&mut self, c: Scalar, ops: Vec<Op>) {
        if !c.is_zero() {
            self.terms.push((c, ops));
        }
    }

    pub fn extend(&mut self, other: Operator) {
        self.terms.extend(other.terms);
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply_mono(&self, g: &Generators, e: &[u32]) -> Poly {
        let mut out = Poly::new();
        for (c, ops) in &self.terms {
            let mut cur: Exps = e.to_vec();
            let mut coeff: i64 = 1;
            let mut alive = true;
            for op in ops.iter().rev() {
                match op.apply_mono(g, &cur) {
                    Some((s, next)) => {
                        coeff *= s;
                        cur = next;
                    }
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
            if alive {
                poly_add_term(&mut out, cur, c * int(coeff));
            }
        }
        out
    }

    pub fn apply(&self, g: &Generators, p: &Poly) -> Poly {
        let mut out = Poly::new();
        for (e, c) in p {
            for (k, v) in self.apply_mono(g, e) {
                poly_add_term(&mut out, k, v * c);
            }
        }
        out
    }
}

/// An ordered list of monomials spanning a finite piece of the algebra.
#[derive(Clone, Debug)]
pub struct MonoBasis {
    monos: Vec<Exps>,
    index: BTreeMap<Exps, usize>,
}

impl MonoBasis {
    pub fn new(monos: Vec<Exps>) -> Self {
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonoBasis { monos, index }
    }

    /// All monomials with total word length ≤ `max_len`, optionally with a weight filter.
    pub fn up_to_length(g: &Generators, max_len: u32, filter: impl Fn(&[u32]) -> bool) -> Self {
        let mut out = Vec::new();
        let mut cur = vec![0u32; g.len()];
        fn rec(
            g: &Generators,
            i: usize,
            left: u32,
            cur: &mut Vec<u32>,
            out: &mut Vec<Exps>,
            filter: &dyn Fn(&[u32]) -> bool,
        ) {
            if i == g.len() {
                if filter(cur) {
                    out.push(cur.clone());
                }
                return;
            }
            let cap = if g.is_odd(i) { left.min(1) } else { left };
            for k in 0..=cap {
                cur[i] = k;
                rec(g, i + 1, left - k, cur, out, filter);
            }
            cur[i] = 0;
        }
        rec(g, 0, max_len, &mut cur, &mut out, &filter);
        out.sort_by(|a, b| {
            let la: u32 = a.iter().sum();
            let lb: u32 = b.iter().sum();
            la.cmp(&lb).then_with(|| b.cmp(a))
        });
        MonoBasis::new(out)
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monos(&self) -> &[Exps] {
        &self.monos
    }

    pub fn get(&self, i: usize) -> &Exps {
        &self.monos[i]
    }

    pub fn position(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn graded_space(&self, g: &Generators, prefix: &str) -> GradedSpace {
        GradedSpace::new(
            self.monos.iter().map(|m| format!("{prefix}{}", g.mono_label(m))).collect(),
            self.monos.iter().map(|m| g.mono_degree(m)).collect(),
        )
        .expect("monomial labels are unique")
    }

    pub fn vector_of(&self, p: &Poly) -> Result<Vec<Scalar>, Exps> {
        let mut v = vec![Scalar::zero(); self.len()];
        for (e, c) in p {
            match self.position(e) {
                Some(i) => v[i] = c.clone(),
                None => return Err(e.clone()),
            }
        }
        Ok(v)
    }

    pub fn poly_of(&self, v: &[Scalar]) -> Poly {
        let mut p = Poly::new();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                p.insert(self.monos[i].clone(), c.clone());
            }
        }
        p
    }
}

/// Matrix of `op` from `source` to `target`; `Err` carries the first monomial outside `target`.
pub fn operator_matrix(
    g: &Generators,
    op: &Operator,
    source: &MonoBasis,
    target: &MonoBasis,
) -> Result<Matrix, Exps> {
    let mut m = Matrix::zeros(target.len(), source.len());
    for (j, e) in source.monos().iter().enumerate() {
        for (k, c) in op.apply_mono(g, e) {
            match target.position(&k) {
                Some(i) => m[(i, j)] = c,
                None => return Err(k),
            }
        }
    }
    Ok(m)
}

/// exp of a nilpotent matrix, as a finite sum.
pub fn nilpotent_exp(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut acc = Matrix::identity(n);
    let mut power = Matrix::identity(n);
    let mut k = 1i64;
    loop {
        power = power.mul(a).scale(&(Scalar::one() / int(k)));
        if power.is_zero() {
            return acc;
        }
        acc = acc.add(&power);
        k += 1;
        assert!(k as usize <= n + 1, "matrix is not nilpotent");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn two_odd() -> Generators {
        Generators::new(vec!["x".to_string(), "y".to_string()], vec![1, 1])
    }

    #[test]
    fn odd_multiplication_anticommutes() {
        let g = two_odd();
        let mut xy = Operator::new();
        xy.push(int(1), vec![Op::Mul(0), Op::Mul(1)]);
        let mut yx = Operator::new();
        yx.push(int(1), vec![Op::Mul(1), Op::Mul(0)]);
        let a = xy.apply_mono(&g, &[0, 0]);
        let b = yx.apply_mono(&g, &[0, 0]);
        assert_eq!(a.get(&vec![1, 1]), Some(&int(1)));
        assert_eq!(b.get(&vec![1, 1]), Some(&int(-1)));
    }

    #[test]
    fn derivative_is_odd_derivation() {
        let g = two_odd();
        // d/dy (x y) = -x
        let p = Op::Deriv(1).apply_mono(&g, &[1, 1]).unwrap();
        assert_eq!(p, (-1, vec![1, 0]));
        let even = Generators::new(vec!["s".to_string()], vec![0]);
        assert_eq!(Op::Deriv(0).apply_mono(&even, &[3]), Some((3, vec![2])));
    }
}
