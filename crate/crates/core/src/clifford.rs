//! The Clifford model Cl(g): generators e^a (degree −1) and e_b (degree +1) with
//! e^a e_b + e_b e^a = 2δ^a_b, compared against the CE differential through PBW symmetrization.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::ccr::{add_into, CcrAlgebra, Element, Key};
use crate::lie::{conjugated_ce_matrix, LieAlgebra, LieError, PolyFrame};
use crate::linalg::Matrix;
use crate::scalar::{self, factorial, frac, int, Scalar};
use crate::superpoly::{Exps, Generators, MonoBasis};

pub type CliffordElement = Element;

/// Cl(g) in normal order: all e^a (indices 0..ℓ) before all e_b (indices ℓ..2ℓ), ascending.
pub fn clifford_algebra(dim: usize) -> CcrAlgebra {
    let mut names: Vec<alloc::string::String> = (0..dim).map(|a| format!("E{a}")).collect();
    names.extend((0..dim).map(|a| format!("e{a}")));
    let mut degrees = vec![-1; dim];
    degrees.extend(vec![1; dim]);
    let mut comm = Matrix::zeros(2 * dim, 2 * dim);
    for a in 0..dim {
        comm[(a, dim + a)] = int(2);
        comm[(dim + a, a)] = int(2);
    }
    CcrAlgebra::new(Generators::new(names, degrees), comm, 0)
}

/// θ = ½ f^{ab}_c e_a e_b e^c.
pub fn theta(l: &LieAlgebra, cl: &CcrAlgebra) -> Element {
    let n = l.dim();
    let mut out = Element::new();
    for (a, b, c, v) in l.entries() {
        add_into(&mut out, &cl.word(&[n + a, n + b, c]), &(v * frac(1, 2)));
    }
    out
}

/// Graded commutator [θ, x] with θ odd, on a basis monomial.
pub fn commutator_with_odd(cl: &CcrAlgebra, th: &Element, key: &Key) -> Element {
    let mut x = Element::new();
    x.insert(key.clone(), Scalar::one());
    let mut out = cl.mul(th, &x);
    let sign = if cl.is_odd(key) { int(1) } else { int(-1) };
    add_into(&mut out, &cl.mul(&x, th), &sign);
    out
}

/// Graded symmetrization of a monomial of odd letters: (1/k!) Σ_σ sgn(σ) e_{σ(1)}⋯e_{σ(k)}.
pub fn pbw(cl: &CcrAlgebra, e: &[u32]) -> Element {
    let letters: Vec<usize> = (0..e.len()).filter(|&i| e[i] == 1).collect();
    let k = letters.len();
    let mut out = Element::new();
    let mut perm: Vec<usize> = (0..k).collect();
    let norm = Scalar::one() / factorial(k);
    loop {
        let word: Vec<usize> = perm.iter().map(|&p| letters[p]).collect();
        let sign = if perm_parity(&perm) { int(-1) } else { int(1) };
        add_into(&mut out, &cl.word(&word), &(sign * &norm));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn perm_parity(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn element_vector(basis: &MonoBasis, x: &Element) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); basis.len()];
    for ((h, e), c) in x {
        debug_assert_eq!(*h, 0);
        let i = basis.position(e).expect("Clifford monomials live in the exterior basis");
        v[i] += c.clone();
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordReport {
    /// λ with PBW⁻¹ ∘ [θ, ·] ∘ PBW = λ · exp(∂_tr) d_CE exp(−∂_tr); `None` when both vanish.
    pub constant: Option<Scalar>,
    pub checked_inputs: usize,
}

/// Compares the Clifford commutator with the CE differential of C^•(g, C_•(g)),
/// transported through the symmetrization PBW map, on inputs of length ≤ `truncation`.
pub fn clifford_differential_check(l: &LieAlgebra, truncation: u32) -> Result<CliffordReport, LieError> {
    l.require_unimodular()?;
    let n = l.dim();
    let frame = PolyFrame::new(n);
    let basis = frame.full_basis();
    let cl = clifford_algebra(n);
    let th = theta(l, &cl);
    let cols = |m: &Vec<Vec<Scalar>>| Matrix::from_columns(basis.len(), m);
    let pbw_m = cols(&basis.monos().iter().map(|e| element_vector(&basis, &pbw(&cl, e))).collect());
    let d_m = cols(
        &basis
            .monos()
            .iter()
            .map(|e: &Exps| element_vector(&basis, &commutator_with_odd(&cl, &th, &(0, e.clone()))))
            .collect(),
    );
    let pbw_inv = pbw_m.inverse().expect("PBW map is unitriangular");
    let transported = pbw_inv.mul(&d_m).mul(&pbw_m);
    let target = conjugated_ce_matrix(l, &frame, &basis);
    let inputs: Vec<usize> =
        (0..basis.len()).filter(|&j| basis.get(j).iter().sum::<u32>() <= truncation).collect();
    let lhs = transported.select_columns(&inputs);
    let rhs = target.select_columns(&inputs);
    let constant = match (lhs.first_nonzero(), rhs.first_nonzero()) {
        (None, None) => None,
        (Some((i, j, v)), _) if !rhs[(i, j)].is_zero() => Some(v / &rhs[(i, j)]),
        (_, Some((i, j, _))) | (Some((i, j, _)), None) => {
            return Err(LieError::Mismatch {
                row: frame.gens().mono_label(basis.get(i)),
                col: frame.gens().mono_label(basis.get(inputs[j])),
                lhs: scalar::format(&lhs[(i, j)]),
                rhs: scalar::format(&rhs[(i, j)]),
            })
        }
    };
    if let Some(c) = &constant {
        let scaled = rhs.scale(c);
        if let Some((i, j, _)) = lhs.sub(&scaled).first_nonzero() {
            return Err(LieError::Mismatch {
                row: frame.gens().mono_label(basis.get(i)),
                col: frame.gens().mono_label(basis.get(inputs[j])),
                lhs: scalar::format(&lhs[(i, j)]),
                rhs: scalar::format(&scaled[(i, j)]),
            });
        }
    }
    Ok(CliffordReport { constant, checked_inputs: inputs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        let cl = clifford_algebra(2);
        let x = cl.word(&[2, 0]);
        assert_eq!(x.get(&(0, vec![1, 0, 1, 0])), Some(&int(-1)));
        assert_eq!(x.get(&(0, vec![0, 0, 0, 0])), Some(&int(2)));
        assert!(cl.word(&[2, 1]).get(&(0, vec![0, 0, 0, 0])).is_none());
    }
}
