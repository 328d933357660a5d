//! Frozen exact values.

use num_bigint::BigInt;
use num_rational::BigRational;
use orbifold_tqm::chains::{tr_g, Chain};
use orbifold_tqm::correlate::Correlator;
use orbifold_tqm::exactnum::{Cyclo, HbarSeries, ScalarK};
use orbifold_tqm::forms::Form;
use orbifold_tqm::model::Model;
use orbifold_tqm::simplex::{bernoulli, weight, wheel_closed_form, wheel_coefficient};
use orbifold_tqm::weyl::{MatrixWeyl, Weyl};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn darboux() -> Model {
    Model::build(1, 1, 1, 1, &[], None).unwrap()
}

#[test]
fn inverse_of_one_minus_zeta3() {
    let z = Cyclo::zeta_pow(3, 1);
    let inv = (Cyclo::one() - z.clone()).inv().unwrap();
    let expect = &(Cyclo::from_int(2) + z) * &Cyclo::frac(1, 3);
    assert_eq!(inv, expect);
    assert_eq!(inv.to_string(), "(2/3) + (1/3)*z3^1");
}

#[test]
fn zeta_relations() {
    let z3 = Cyclo::zeta_pow(3, 1);
    assert_eq!(z3.pow(2), -(Cyclo::one() + z3.clone()));
    assert_eq!(Cyclo::zeta_pow(4, 2), Cyclo::from_int(-1));
    assert_eq!(Cyclo::zeta_pow(6, 3), Cyclo::from_int(-1));
    assert!(Cyclo::zeta_pow(12, 12).is_one());
    assert!((Cyclo::one() - Cyclo::zeta_pow(5, 0)).inv().is_err());
}

#[test]
fn scalar_rendering() {
    let c = &Cyclo::frac(3, 2) * &Cyclo::zeta_pow(3, 1);
    assert_eq!(ScalarK::monomial(c, -1, 2).to_string(), "(3/2)*z3^1*h^-1*u^2");
    assert_eq!(HbarSeries::monomial(Cyclo::frac(-1, 8), 1).to_string(), "-(1/8)*h^1");
}

#[test]
fn vacuum_factors() {
    let m = Model::build(1, 0, 1, 2, &[1], None).unwrap();
    assert_eq!(m.vacuum_factor(), Cyclo::frac(1, 4));
    let m = Model::build(1, 0, 1, 3, &[1], None).unwrap();
    assert_eq!(m.vacuum_factor(), Cyclo::frac(1, 3));
    let m = Model::build(1, 0, 1, 4, &[1], None).unwrap();
    assert_eq!(m.vacuum_factor(), Cyclo::frac(1, 2));
}

#[test]
fn p2_vanishes_for_involutions() {
    let m = Model::build(1, 0, 1, 2, &[1], None).unwrap();
    assert!(m.kernels().p2.iter().flatten().all(Cyclo::is_zero));
}

#[test]
fn contraction_and_berezin_of_volume_form() {
    let m = darboux();
    let f = Form::dvar(&m, 0).wedge(&Form::dvar(&m, 1));
    assert_eq!(f.iota_pi1(&m).render(&m), "-1");
    assert_eq!(f.berezin(&m).unwrap(), ScalarK::monomial(Cyclo::from_int(-1), 1, 0).with_trunc(f.berezin(&m).unwrap().trunc()));
}

#[test]
fn free_correlation_of_darboux_pair() {
    let m = darboux();
    let c = Chain::from_tensor(&m, &[MatrixWeyl::scalar(&m, &Weyl::var(&m, 0)), MatrixWeyl::scalar(&m, &Weyl::var(&m, 1))], &Cyclo::one())
        .unwrap();
    let f = Correlator::new(&m).free_correlation(&c).unwrap();
    assert_eq!(f.render(&m), "y1^1*dy2");
}

#[test]
fn tau1_of_z_pair_at_involution() {
    let m = Model::build(1, 0, 1, 2, &[1], None).unwrap();
    let v = Correlator::new(&m).tau1(&[Weyl::var(&m, 0), Weyl::var(&m, 1)]).unwrap();
    assert_eq!(v.to_string(), "-(1/8)*h^1");
}

#[test]
fn moyal_commutator_of_darboux_pair() {
    let m = darboux();
    let (y1, y2) = (Weyl::var(&m, 0), Weyl::var(&m, 1));
    let c = y1.moyal(&m, &y2).sub(&y2.moyal(&m, &y1));
    assert_eq!(c.render(&m), "h^1");
}

#[test]
fn twisted_matrix_trace() {
    let m = Model::build(1, 1, 2, 2, &[], Some(vec![vec![Cyclo::one(), Cyclo::zero()], vec![Cyclo::zero(), Cyclo::from_int(-1)]]))
        .unwrap();
    assert_eq!(m.twist_trace(), Cyclo::zero());
    let id = vec![vec![Cyclo::one(), Cyclo::zero()], vec![Cyclo::zero(), Cyclo::zero()]];
    assert_eq!(tr_g(&m, &[id]).unwrap(), Cyclo::one());
}

#[test]
fn simplex_weights() {
    assert_eq!(weight(1, &[]), q(1, 1));
    assert_eq!(weight(3, &[]), q(1, 2));
    assert_eq!(weight(2, &[(0, 1)]), q(0, 1));
    assert_eq!(weight(2, &[(0, 1), (1, 0)]), q(-1, 12));
}

#[test]
fn wheel_coefficients() {
    assert_eq!(wheel_coefficient(2), q(-1, 24));
    assert_eq!(wheel_coefficient(3), q(0, 1));
    assert_eq!(wheel_coefficient(4), q(1, 2880));
    assert_eq!(wheel_coefficient(6), q(-1, 181440));
    for k in [2, 4, 6] {
        assert_eq!(wheel_coefficient(k), wheel_closed_form(k));
    }
    assert_eq!(bernoulli(6), q(1, 42));
}
