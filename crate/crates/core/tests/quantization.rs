use bbf_core::ccr::{add_into, Element};
use bbf_core::linalg::Matrix;
use bbf_core::quant::*;
use bbf_core::scalar::{int, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

fn hbar(n: usize, c: i64) -> Element {
    let mut x = Element::new();
    x.insert((1, vec![0; n]), int(c));
    x
}

fn sub(a: &Element, b: &Element) -> Element {
    let mut d = a.clone();
    add_into(&mut d, b, &int(-1));
    d
}

fn v(xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| int(x)).collect()
}

#[test]
fn weyl_relation_and_unit() {
    let s = SymplecticSpace::darboux(1);
    let w = s.weyl();
    let (q, p) = (w.generator(0), w.generator(1));
    assert_eq!(sub(&weyl_product(&w, &q, &p), &weyl_product(&w, &p, &q)), hbar(2, 1));
    assert_eq!(weyl_product(&w, &q, &w.one()), q);
}

#[test]
fn weyl_associative_on_short_words() {
    let s = SymplecticSpace::darboux(1);
    let w = s.weyl();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for len in 1..=4 {
        let mut next = Vec::new();
        for a in &words {
            if a.len() == len - 1 {
                for g in 0..2 {
                    let mut b = a.clone();
                    b.push(g);
                    next.push(b);
                }
            }
        }
        words.extend(next);
    }
    for a in &words {
        for b in &words {
            for c in &words {
                if a.len() + b.len() + c.len() > 4 {
                    continue;
                }
                let (x, y, z) = (w.word(a), w.word(b), w.word(c));
                let l = w.mul(&w.mul(&x, &y), &z);
                let r = w.mul(&x, &w.mul(&y, &z));
                assert_eq!(l, r, "{a:?} {b:?} {c:?}");
            }
        }
    }
}

#[test]
fn rejects_bad_pairings() {
    let g = SymplecticSpace::darboux(1).gens().clone();
    assert!(SymplecticSpace::new(g.clone(), Matrix::from_i64(&[&[0, 1], &[1, 0]])).is_err());
    assert!(SymplecticSpace::new(g, Matrix::from_i64(&[&[0, 0], &[0, 0]])).is_err());
}

#[test]
fn fock_examples() {
    let s = SymplecticSpace::darboux(1);
    let w = s.weyl();
    let l = vec![v(&[0, 1])];
    let fock = FockModule::new(&s, &l).unwrap();
    assert!(fock.reduce(&w.generator(1)).is_empty());
    let one = fock.reduce(&w.one());
    assert_eq!(one.len(), 1);
    assert_eq!(one.values().next(), Some(&int(1)));
    // p·q lies in p·W, while q·p = p·q + ħ leaves ħ behind
    assert!(fock.reduce(&w.word(&[1, 0])).is_empty());
    assert_eq!(fock.reduce(&w.word(&[0, 1])), hbar(2, 1));
    assert!(fock_reduce(&s, &w.one(), &[v(&[1, 1])]).is_ok());
    assert!(FockModule::new(&s, &[v(&[1, 0]), v(&[0, 1])]).is_err());
}

fn small_element(n: usize, terms: &[(Vec<u32>, i64)]) -> Element {
    let mut x = Element::new();
    for (e, c) in terms {
        let mut e = e.clone();
        e.resize(n, 0);
        bbf_core::ccr::add_term(&mut x, (0, e), int(*c));
    }
    x
}

fn element_strategy(n: usize) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec((prop::collection::vec(0u32..3, n), -3i64..4), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fock_right_module(w_t in element_strategy(4), a_t in element_strategy(4), mix in -2i64..3) {
        let s = SymplecticSpace::darboux(2);
        let w = s.weyl();
        // L = span(p0 + mix·q1, p1 + mix·q0) is Lagrangian
        let l = vec![v(&[0, mix, 1, 0]), v(&[mix, 0, 0, 1])];
        let fock = FockModule::new(&s, &l).unwrap();
        let x = small_element(4, &w_t);
        let a = small_element(4, &a_t);
        prop_assert_eq!(fock.reduce(&w.mul(&x, &a)), fock.act(&fock.reduce(&x), &a));
    }

    #[test]
    fn star_matches_weyl_on_quadratics(f_t in element_strategy(2), g_t in element_strategy(2)) {
        let s = SymplecticSpace::darboux(1);
        let w = s.weyl();
        let f: Element = small_element(2, &f_t).into_iter().filter(|((_, e), _)| e.iter().sum::<u32>() <= 2).collect();
        let g: Element = small_element(2, &g_t).into_iter().filter(|((_, e), _)| e.iter().sum::<u32>() <= 2).collect();
        // generator coordinates: the Poisson bivector is ω itself
        let fg = star_product(s.omega(), &f, &g);
        prop_assert_eq!(w.mul(&symmetrize(&w, &f), &symmetrize(&w, &g)), symmetrize(&w, &fg));
    }
}

#[test]
fn star_linear_commutator_and_dual_identification() {
    let pi = Matrix::from_i64(&[&[0, 3, -1], &[-3, 0, 2], &[1, -2, 0]]);
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = (small_element(3, &[({ let mut e = vec![0; 3]; e[i] = 1; e }, 1)]),
                          small_element(3, &[({ let mut e = vec![0; 3]; e[j] = 1; e }, 1)]));
            let c = sub(&star_product(&pi, &a, &b), &star_product(&pi, &b, &a));
            let expect: Element = if pi[(i, j)].is_zero() { Element::new() } else {
                let mut x = Element::new();
                x.insert((1, vec![0; 3]), pi[(i, j)].clone());
                x
            };
            assert_eq!(c, expect);
        }
    }
    // Π = ω^{-1} on dual coordinates gives back ħω
    let s = SymplecticSpace::darboux(2);
    let pi = bivector_of(s.omega());
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = (dual_coordinate(s.omega(), i), dual_coordinate(s.omega(), j));
            let c = sub(&star_product(&pi, &a, &b), &star_product(&pi, &b, &a));
            let got = c.get(&(1, vec![0; 4])).cloned().unwrap_or_else(Scalar::zero);
            assert_eq!(got, s.omega()[(i, j)].clone());
            assert!(c.len() <= 1);
        }
    }
}

#[test]
fn star_zero_bivector_is_commutative_product() {
    let f = small_element(2, &[(vec![1, 0], 2), (vec![0, 2], 1)]);
    let g = small_element(2, &[(vec![1, 1], 1), (vec![0, 0], -1)]);
    let z = Matrix::zeros(2, 2);
    let prod = star_product(&z, &f, &g);
    let expect = small_element(2, &[(vec![2, 1], 2), (vec![1, 3], 1), (vec![1, 0], -2), (vec![0, 2], -1)]);
    assert_eq!(prod, expect);
}

#[test]
fn star_associative_on_cubics() {
    let pi = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
    let mut monos = Vec::new();
    for d in 0..=3u32 {
        for a in 0..=d {
            monos.push(small_element(2, &[(vec![a, d - a], 1)]));
        }
    }
    for f in &monos {
        for g in &monos {
            for h in &monos {
                let l = star_product(&pi, &star_product(&pi, f, g), h);
                let r = star_product(&pi, f, &star_product(&pi, g, h));
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn topmech_examples() {
    let s = SymplecticSpace::darboux(1);
    let (i, q) = topmech_cohomology(&s, &[v(&[1, 0])], &[v(&[1, 0])]).unwrap();
    assert_eq!((i.len(), q.len()), (1, 1));
    let (i, q) = topmech_cohomology(&s, &[v(&[1, 0])], &[v(&[0, 1])]).unwrap();
    assert_eq!((i.len(), q.len()), (0, 0));
    let s4 = SymplecticSpace::darboux(2);
    let l1 = vec![v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])];
    let l2 = vec![v(&[1, 0, 0, 0]), v(&[0, 0, 0, 1])];
    let (i, q) = topmech_cohomology(&s4, &l1, &l2).unwrap();
    assert_eq!((i.len(), q.len()), (1, 1));
    assert!(topmech_cohomology(&s4, &[v(&[1, 0, 1, 0])], &l2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lagrangian_duality(a in -3i64..4, b in -3i64..4, c in -3i64..4, d in -3i64..4) {
        // graphs of symmetric maps are Lagrangian in the Darboux space
        let s = SymplecticSpace::darboux(2);
        let l1 = vec![v(&[1, 0, a, b]), v(&[0, 1, b, c])];
        let l2 = vec![v(&[1, 0, d, 0]), v(&[0, 1, 0, a])];
        let (i, q) = topmech_cohomology(&s, &l1, &l2).unwrap();
        prop_assert_eq!(i.len(), q.len());
    }
}

#[test]
fn structure_map_examples() {
    let fa = exterior_fa(3);
    let a = fa.algebra();
    let (x, y) = (a.basis_vector(1), a.basis_vector(2));
    let open2 = IntervalConfig { intervals: vec![Interval::open(1, 2), Interval::open(3, 4)], target: Interval::open(0, 5) };
    let got = fa_structure_map(&fa, &open2, &[FaElement::A(x.clone()), FaElement::A(y.clone())]).unwrap();
    assert_eq!(got, FaElement::A(a.mul(&x, &y)));
    // listing odd inputs backwards costs a Koszul sign
    let swapped = IntervalConfig { intervals: vec![Interval::open(3, 4), Interval::open(1, 2)], target: Interval::open(0, 5) };
    let got2 = fa_structure_map(&fa, &swapped, &[FaElement::A(y.clone()), FaElement::A(x.clone())]).unwrap();
    let FaElement::A(xy) = &got else { panic!() };
    assert_eq!(got2, FaElement::A(xy.iter().map(|c| -c).collect()));

    let m0 = fa.module().point().to_vec();
    let ident = IntervalConfig { intervals: vec![Interval::half_open(1)], target: Interval::half_open(2) };
    let mx = FaElement::M(a.mul(&m0, &x));
    assert_eq!(fa_structure_map(&fa, &ident, &[mx.clone()]).unwrap(), mx);
    let empty = IntervalConfig { intervals: vec![], target: Interval::half_open(2) };
    assert_eq!(fa_structure_map(&fa, &empty, &[]).unwrap(), FaElement::M(m0));
    let empty_open = IntervalConfig { intervals: vec![], target: Interval::open(1, 2) };
    assert_eq!(fa_structure_map(&fa, &empty_open, &[]).unwrap(), FaElement::A(a.unit().to_vec()));

    assert!(matches!(fa_structure_map(&fa, &ident, &[FaElement::A(x.clone())]), Err(QuantError::TypeMismatch(0))));
    let overlap = IntervalConfig { intervals: vec![Interval::open(1, 3), Interval::open(2, 4)], target: Interval::open(0, 5) };
    assert!(overlap.validate().is_err());
    let two_zero = IntervalConfig { intervals: vec![Interval::half_open(1), Interval::half_open(2)], target: Interval::half_open(3) };
    assert!(two_zero.validate().is_err());
    let outside = IntervalConfig { intervals: vec![Interval::half_open(1)], target: Interval::open(0, 3) };
    assert!(outside.validate().is_err());
}

#[test]
fn exterior_axioms_pass() {
    let r = fa_axiom_check(&exterior_fa(3), 2);
    assert!(r.passed(), "{:?}", r.failure);
    assert!(r.shapes > 100);
}

#[test]
fn clifford_axioms_pass() {
    let fa = clifford_fa(3);
    assert_eq!((fa.algebra().dim(), fa.module().dim()), (64, 8));
    let r = fa_axiom_check(&fa, 2);
    assert!(r.passed(), "{:?}", r.failure);
}

#[test]
fn perturbed_algebra_is_caught() {
    let fa = exterior_fa(3);
    let mut a = fa.algebra().clone();
    // e_{T0} · e_{T1} gains a stray unit component
    let t0 = a.labels().iter().position(|l| l == "T0").unwrap();
    let t1 = a.labels().iter().position(|l| l == "T1").unwrap();
    let unit = a.unit().iter().position(|c| !c.is_zero()).unwrap();
    a.perturb(t0, t1, unit, int(1));
    assert!(a.check().is_err());
    let bad = IntervalFa::new_unchecked(a.clone(), PointedModule::regular(&a));
    let r = fa_axiom_check(&bad, 2);
    assert!(r.failure.is_some());
}

#[test]
fn algebra_text_roundtrip() {
    let a = exterior_fa(2).algebra().clone();
    let b = FiniteAlgebra::parse(&a.to_text()).unwrap();
    assert_eq!(b.to_text(), a.to_text());
    assert!(FiniteAlgebra::parse("dim 2\ndegrees 0 0\nunit 1 0\n0 5 0 1\n").is_err());
}
