use bbf_core::clifford::clifford_differential_check;
use bbf_core::graded::GradedComplex;
use bbf_core::lie::{
    bweight_obstruction, ce_complex, conjugation_check, dq_differential, dq_square_check, CeModule,
    LieAlgebra, LieError,
};
use bbf_core::scalar::int;

fn unimodular_algebras() -> Vec<LieAlgebra> {
    vec![LieAlgebra::abelian(2), LieAlgebra::abelian(3), LieAlgebra::sl2(), LieAlgebra::heisenberg3()]
}

fn all_algebras() -> Vec<LieAlgebra> {
    let mut v = unimodular_algebras();
    v.push(LieAlgebra::affine2());
    v
}

fn assert_euler(c: &GradedComplex) {
    assert_eq!(c.cohomology().euler(), c.chain_euler());
}

#[test]
fn ce_differentials_square_to_zero() {
    for l in all_algebras() {
        for m in [CeModule::Trivial, CeModule::SymG1, CeModule::Full] {
            let c = ce_complex(&l, m).unwrap_or_else(|e| panic!("{} {:?}: {e}", l.name(), m));
            assert_euler(&c);
        }
    }
}

#[test]
fn abelian_ce_is_zero() {
    for m in [CeModule::Trivial, CeModule::SymG1, CeModule::Full] {
        assert!(ce_complex(&LieAlgebra::abelian(3), m).unwrap().differential().is_zero());
    }
}

#[test]
fn sl2_trivial_cohomology() {
    let h = ce_complex(&LieAlgebra::sl2(), CeModule::Trivial).unwrap().cohomology();
    assert_eq!(h.dims, vec![(0, 1), (1, 0), (2, 0), (3, 1)]);
}

#[test]
fn dq_squares_to_zero_and_matches_conjugation() {
    for l in unimodular_algebras() {
        for t in 0..=4 {
            dq_square_check(&l, t).unwrap_or_else(|e| panic!("{} trunc {t}: {e}", l.name()));
            conjugation_check(&l, t).unwrap_or_else(|e| panic!("{} trunc {t}: {e}", l.name()));
        }
    }
}

#[test]
fn dq_basic_examples() {
    let d = dq_differential(&LieAlgebra::sl2(), 3).unwrap();
    let m = d.to_matrix();
    // the constant monomial is the first basis element
    assert!(m.column(0).iter().all(|x| *x == int(0)));
    assert!(dq_differential(&LieAlgebra::abelian(3), 4).unwrap().is_zero());
    assert!(matches!(dq_differential(&LieAlgebra::affine2(), 2), Err(LieError::NotUnimodular(0))));
    assert!(matches!(conjugation_check(&LieAlgebra::affine2(), 2), Err(LieError::NotUnimodular(_))));
}

#[test]
fn clifford_constant_is_two() {
    for l in [LieAlgebra::sl2(), LieAlgebra::heisenberg3()] {
        for t in 1..=4 {
            let r = clifford_differential_check(&l, t).unwrap();
            assert_eq!(r.constant, Some(int(2)), "{} trunc {t}", l.name());
        }
    }
    let r = clifford_differential_check(&LieAlgebra::abelian(2), 4).unwrap();
    assert_eq!(r.constant, None);
    assert!(clifford_differential_check(&LieAlgebra::affine2(), 2).is_err());
}

#[test]
fn bweight_one_sl2_is_g_shifted() {
    let h = bweight_obstruction(&LieAlgebra::sl2(), 1).unwrap();
    assert_eq!(h.total(), 3);
    assert_eq!(h.dim(-1), 3);
    assert_eq!(h.dim(0), 0);
    assert_eq!(h.dim(1), 0);
}

#[test]
fn bweight_one_abelian_counts() {
    for n in 1..=3usize {
        let h = bweight_obstruction(&LieAlgebra::abelian(n), 1).unwrap();
        let choose = |k: usize| -> usize {
            if k > n { 0 } else { (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)) }
        };
        assert_eq!(h.dim(-2), 0);
        assert_eq!(h.dim(-1), n * n);
        assert_eq!(h.dim(0), choose(2) * n);
        assert_eq!(h.dim(1), choose(3) * n);
    }
}
