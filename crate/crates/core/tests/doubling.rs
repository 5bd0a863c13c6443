use bbf_core::hodge::*;
use bbf_core::quant::{topmech_cohomology, LagrangianPair, SymplecticSpace};
use bbf_core::scalar::{int, Scalar};
use proptest::prelude::*;

fn v(xs: &[i64]) -> Vec<Scalar> {
    xs.iter().map(|&x| int(x)).collect()
}

/// Graph of a symmetric matrix, then a partial (q_k, p_k) ↦ (p_k, −q_k) swap.
fn lagrangian(n: usize, sym: &[i64], swap: &[bool]) -> Vec<Vec<Scalar>> {
    let s = |i: usize, j: usize| {
        let (a, b) = (i.min(j), i.max(j));
        sym[a * n + b]
    };
    (0..n)
        .map(|i| {
            let mut x = vec![0i64; 2 * n];
            x[i] = 1;
            for j in 0..n {
                x[n + j] = s(i, j);
            }
            for k in 0..n {
                if swap[k] {
                    let (q, p) = (x[k], x[n + k]);
                    x[k] = p;
                    x[n + k] = -q;
                }
            }
            v(&x)
        })
        .collect()
}

fn check_instance(space: &SymplecticSpace, pair: &LagrangianPair, n_nodes: usize) {
    let c = build_double(space, pair, n_nodes).unwrap();
    c.check().unwrap();
    let s = c.split();
    assert!(split_is_direct(space, s));
    space.check_lagrangian(&s.l1_complement()).unwrap();
    space.check_lagrangian(&s.l2_complement()).unwrap();
    let (inter, quot) = topmech_cohomology(space, &pair.l1, &pair.l2).unwrap();
    let r = invariant_harmonic_dims(&c);
    assert_eq!(r.dims, [inter.len(), quot.len()]);
    assert!(r.constant);
    assert_eq!(c.fiber_dims(), (space.dim() - 2 * inter.len(), 2 * inter.len()));
}

#[test]
fn fiber_examples() {
    let s = SymplecticSpace::darboux(1);
    let same = LagrangianPair::new(&s, vec![v(&[1, 0])], vec![v(&[1, 0])]).unwrap();
    assert_eq!(build_double(&s, &same, 8).unwrap().fiber_dims(), (0, 2));
    let tr = LagrangianPair::new(&s, vec![v(&[1, 0])], vec![v(&[0, 1])]).unwrap();
    assert_eq!(build_double(&s, &tr, 8).unwrap().fiber_dims(), (2, 0));
    let (s4, p4) = example_pair(2, 1, 3);
    assert_eq!(build_double(&s4, &p4, 8).unwrap().fiber_dims(), (2, 2));
}

#[test]
fn harmonic_examples() {
    let s = SymplecticSpace::darboux(1);
    let same = LagrangianPair::new(&s, vec![v(&[1, 0])], vec![v(&[1, 0])]).unwrap();
    for n in [4, 6, 8, 16, 64] {
        let c = build_double(&s, &same, n).unwrap();
        assert_eq!(invariant_harmonic_dims(&c).dims, [1, 1]);
        // without σ both constants survive in each degree
        assert_eq!(harmonic_dims(&c), [2, 2]);
    }
    let tr = LagrangianPair::new(&s, vec![v(&[1, 0])], vec![v(&[0, 1])]).unwrap();
    let c = build_double(&s, &tr, 16).unwrap();
    assert_eq!(invariant_harmonic_dims(&c).dims, [0, 0]);
    assert_eq!(harmonic_dims(&c), [0, 0]);
    let (s4, p4) = example_pair(2, 1, -2);
    for n in [16, 64] {
        assert_eq!(invariant_harmonic_dims(&build_double(&s4, &p4, n).unwrap()).dims, [1, 1]);
    }
}

#[test]
fn rejects_bad_input() {
    let s = SymplecticSpace::darboux(1);
    let same = LagrangianPair::new(&s, vec![v(&[1, 0])], vec![v(&[1, 0])]).unwrap();
    assert!(matches!(build_double(&s, &same, 5), Err(HodgeError::BadMesh(5))));
    assert!(matches!(build_double(&s, &same, 2), Err(HodgeError::BadMesh(2))));
    let bad = LagrangianPair { l1: vec![v(&[1, 0]), v(&[0, 1])], l2: vec![v(&[1, 0])] };
    assert!(build_double(&s, &bad, 8).is_err());
}

#[test]
fn mesh_spacing() {
    assert_eq!(CircleMesh::new(8).unwrap().spacing(), bbf_core::scalar::frac(1, 4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariant_kernel_matches_algebra(
        sym1 in prop::collection::vec(-2i64..3, 4),
        sym2 in prop::collection::vec(-2i64..3, 4),
        sw1 in prop::collection::vec(any::<bool>(), 2),
        sw2 in prop::collection::vec(any::<bool>(), 2),
        n_idx in 0usize..3,
    ) {
        let space = SymplecticSpace::darboux(2);
        let pair = LagrangianPair::new(&space, lagrangian(2, &sym1, &sw1), lagrangian(2, &sym2, &sw2)).unwrap();
        check_instance(&space, &pair, [4, 8, 16][n_idx]);
    }
}

#[test]
fn dim_two_pairs() {
    let space = SymplecticSpace::darboux(1);
    for a in -2..=2 {
        for sw in [false, true] {
            let pair = LagrangianPair::new(&space, lagrangian(1, &[a], &[sw]), lagrangian(1, &[1], &[false])).unwrap();
            for n in [8, 16] {
                check_instance(&space, &pair, n);
            }
        }
    }
}
