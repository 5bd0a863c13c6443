//! Algebras presented by generators with constant graded commutators,
//! `x_i x_j − (−1)^{|x_i||x_j|} x_j x_i = C_ij ħ^h`, kept in normal order by generator index.
//! Weyl algebras (h = 1) and Clifford algebras (h = 0) are both of this shape.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::linalg::Matrix;
use crate::scalar::{frac, Scalar};
use crate::superpoly::{Exps, Generators};

/// (power of ħ, exponent vector).
pub type Key = (u32, Exps);
pub type Element = BTreeMap<Key, Scalar>;

pub fn add_term(x: &mut Element, k: Key, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match x.entry(k) {
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

pub fn add_into(x: &mut Element, y: &Element, scale: &Scalar) {
    for (k, c) in y {
        add_term(x, k.clone(), c * scale);
    }
}

#[derive(Clone, Debug)]
pub struct CcrAlgebra {
    gens: Generators,
    comm: Matrix,
    hbar_power: u32,
}

impl CcrAlgebra {
    pub fn new(gens: Generators, comm: Matrix, hbar_power: u32) -> Self {
        assert_eq!(comm.rows(), gens.len());
        assert_eq!(comm.cols(), gens.len());
        CcrAlgebra { gens, comm, hbar_power }
    }

    pub fn gens(&self) -> &Generators {
        &self.gens
    }

    pub fn comm(&self) -> &Matrix {
        &self.comm
    }

    pub fn hbar_power(&self) -> u32 {
        self.hbar_power
    }

    pub fn one(&self) -> Element {
        let mut x = Element::new();
        x.insert((0, vec![0; self.gens.len()]), Scalar::one());
        x
    }

    pub fn scalar(&self, c: Scalar) -> Element {
        let mut x = Element::new();
        add_term(&mut x, (0, vec![0; self.gens.len()]), c);
        x
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = vec![0; self.gens.len()];
        e[i] = 1;
        let mut x = Element::new();
        x.insert((0, e), Scalar::one());
        x
    }

    /// Linear combination of generators.
    pub fn linear(&self, coeffs: &[Scalar]) -> Element {
        let mut x = Element::new();
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; self.gens.len()];
            e[i] = 1;
            add_term(&mut x, (0, e), c.clone());
        }
        x
    }

    fn swap_sign(&self, i: usize, j: usize) -> bool {
        self.gens.is_odd(i) && self.gens.is_odd(j)
    }

    /// Normal-ordered `mono · x_g`.
    fn mul_gen_right(&self, key: &Key, g: usize) -> Element {
        let (h, e) = key;
        let mut out = Element::new();
        let last = e.iter().rposition(|&k| k > 0);
        match last {
            None => {
                let mut e2 = e.clone();
                e2[g] += 1;
                out.insert((*h, e2), Scalar::one());
            }
            Some(l) if l < g => {
                let mut e2 = e.clone();
                e2[g] += 1;
                out.insert((*h, e2), Scalar::one());
            }
            Some(l) if l == g => {
                if self.gens.is_odd(g) {
                    let c = &self.comm[(g, g)] * frac(1, 2);
                    if !c.is_zero() {
                        let mut e2 = e.clone();
                        e2[g] -= 1;
                        out.insert((h + self.hbar_power, e2), c);
                    }
                } else {
                    let mut e2 = e.clone();
                    e2[g] += 1;
                    out.insert((*h, e2), Scalar::one());
                }
            }
            Some(l) => {
                let mut u = e.clone();
                u[l] -= 1;
                let ukey = (*h, u.clone());
                let s = if self.swap_sign(l, g) { -Scalar::one() } else { Scalar::one() };
                for ((hh, m), c) in self.mul_gen_right(&ukey, g) {
                    let mut m2 = m;
                    m2[l] += 1;
                    add_term(&mut out, (hh, m2), c * &s);
                }
                let c = self.comm[(l, g)].clone();
                if !c.is_zero() {
                    add_term(&mut out, (h + self.hbar_power, u), c);
                }
            }
        }
        out
    }

    pub fn mul_mono(&self, a: &Key, b: &Key) -> Element {
        let mut cur = Element::new();
        cur.insert((a.0 + b.0, a.1.clone()), Scalar::one());
        for (g, &k) in b.1.iter().enumerate() {
            for _ in 0..k {
                let mut next = Element::new();
                for (key, c) in &cur {
                    add_into(&mut next, &self.mul_gen_right(key, g), c);
                }
                cur = next;
            }
        }
        cur
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::new();
        for (ka, ca) in x {
            for (kb, cb) in y {
                add_into(&mut out, &self.mul_mono(ka, kb), &(ca * cb));
            }
        }
        out
    }

    /// Normal-ordered product of a word of generators.
    pub fn word(&self, letters: &[usize]) -> Element {
        let mut cur = self.one();
        for &g in letters {
            let mut next = Element::new();
            for (key, c) in &cur {
                add_into(&mut next, &self.mul_gen_right(key, g), c);
            }
            cur = next;
        }
        cur
    }

    /// Total degree of a basis monomial (ħ counted as degree 0).
    pub fn degree(&self, key: &Key) -> i32 {
        self.gens.mono_degree(&key.1)
    }

    pub fn is_odd(&self, key: &Key) -> bool {
        self.degree(key) % 2 != 0
    }

    pub fn format(&self, x: &Element) -> String {
        if x.is_empty() {
            return String::from("0");
        }
        let mut parts = Vec::new();
        for ((h, e), c) in x {
            let mut s = crate::scalar::format(c);
            if *h > 0 {
                s.push_str(&alloc::format!("*hbar^{h}"));
            }
            let m = self.gens.mono_label(e);
            if m != "1" {
                s.push('*');
                s.push_str(&m);
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use alloc::string::ToString;

    fn weyl2() -> CcrAlgebra {
        let g = Generators::new(vec!["q".to_string(), "p".to_string()], vec![0, 0]);
        CcrAlgebra::new(g, Matrix::from_i64(&[&[0, 1], &[-1, 0]]), 1)
    }

    #[test]
    fn canonical_relation() {
        let w = weyl2();
        let qp = w.word(&[0, 1]);
        let pq = w.word(&[1, 0]);
        let mut diff = qp.clone();
        add_into(&mut diff, &pq, &int(-1));
        let mut hbar = Element::new();
        hbar.insert((1, vec![0, 0]), int(1));
        assert_eq!(diff, hbar);
    }

    #[test]
    fn clifford_square() {
        let g = Generators::new(vec!["a".to_string(), "b".to_string()], vec![-1, 1]);
        let c = CcrAlgebra::new(g, Matrix::from_i64(&[&[0, 2], &[2, 0]]), 0);
        // b a = -a b + 2
        let ba = c.word(&[1, 0]);
        assert_eq!(ba.get(&(0, vec![1, 1])), Some(&int(-1)));
        assert_eq!(ba.get(&(0, vec![0, 0])), Some(&int(2)));
        assert!(c.word(&[0, 0]).is_empty());
    }
}
