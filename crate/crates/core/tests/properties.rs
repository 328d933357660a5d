use proptest::prelude::*;

use orbifold_tqm::charclass::curvature;
use orbifold_tqm::cli::parse::parse_observable;
use orbifold_tqm::cli::verify::reference_models;
use orbifold_tqm::corpus::Corpus;
use orbifold_tqm::correlate::Correlator;
use orbifold_tqm::exactnum::{Cyclo, HbarSeries};
use orbifold_tqm::model::Model;
use orbifold_tqm::simplex::weight;

fn model(i: usize) -> Model {
    let ms = reference_models(3, 6);
    ms[i % ms.len()].clone()
}

fn order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![1u32, 2, 3, 4, 5, 6, 8, 12])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cyclo_field_axioms(seed in any::<u64>(), n in order()) {
        let mut cp = Corpus::new(seed);
        let (a, b, c) = (cp.cyclo(n, 4), cp.cyclo(n, 4), cp.cyclo(n, 4));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn series_truncation_is_compatible_with_products(seed in any::<u64>(), t in 1i64..6) {
        let mut cp = Corpus::new(seed);
        let a = HbarSeries::from_terms((-1..4).map(|e| (e, cp.cyclo(3, 2))), 6);
        let b = HbarSeries::from_terms((0..4).map(|e| (e, cp.cyclo(3, 2))), 6);
        let lhs = (&a.truncated(t) * &b.truncated(t)).truncated(t);
        prop_assert!(lhs.eq_upto(&(&a * &b).truncated(t)));
    }

    #[test]
    fn moyal_is_associative_and_equivariant(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let mut cp = Corpus::new(seed);
        let (a, b, c) = (cp.weyl(&m, 3, 1, 3), cp.weyl(&m, 3, 1, 3), cp.weyl(&m, 2, 1, 3));
        prop_assert!(a.moyal(&m, &b).moyal(&m, &c).eq_upto(&a.moyal(&m, &b.moyal(&m, &c))));
        prop_assert!(a.moyal(&m, &b).g_act(&m).eq_upto(&a.g_act(&m).moyal(&m, &b.g_act(&m))));
        let p = a.invariant_project(&m);
        prop_assert_eq!(p.invariant_project(&m), p);
    }

    #[test]
    fn matrix_moyal_is_associative(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let mut cp = Corpus::new(seed);
        let (a, b, c) = (cp.matrix_weyl(&m, 2, 1, 2), cp.matrix_weyl(&m, 2, 1, 2), cp.matrix_weyl(&m, 2, 0, 2));
        prop_assert!(a.moyal(&m, &b).moyal(&m, &c).eq_upto(&a.moyal(&m, &b.moyal(&m, &c))));
        prop_assert!(a.moyal(&m, &b).g_act(&m).eq_upto(&a.g_act(&m).moyal(&m, &b.g_act(&m))));
    }

    #[test]
    fn hochschild_and_connes_square_to_zero(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let c = Corpus::new(seed).invariant_chain(&m, 3, 6, 1, 3);
        let b = c.b_g(&m);
        let bb = c.connes_b(&m).unwrap();
        prop_assert!(b.b_g(&m).is_zero_upto());
        prop_assert!(bb.connes_b_unchecked(&m).is_zero_upto());
        prop_assert!(b.connes_b_unchecked(&m).add(&bb.b_g(&m)).is_zero_upto());
    }

    #[test]
    fn correlation_intertwines_differentials(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let cor = Correlator::new(&m);
        let c = Corpus::new(seed).invariant_chain(&m, 2, 6, 1, 3);
        let f = cor.free_correlation(&c).unwrap();
        prop_assert!(f.bv_delta(&m).shift(1, 0).eq_upto(&cor.free_correlation(&c.b_g(&m)).unwrap()));
        prop_assert!(f.d_2k(&m).eq_upto(&cor.free_correlation(&c.connes_b(&m).unwrap()).unwrap()));
        prop_assert!(f.gm_nabla().eq_upto(&cor.free_correlation_unchecked(&c.gm_nabla())));
    }

    #[test]
    fn weights_are_rotation_invariant(p in 2usize..5, raw in prop::collection::vec((0usize..5, 0usize..5), 0..4), s in 1usize..5) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % p, b % p)).filter(|(a, b)| a != b).collect();
        let rotated: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| ((a + s) % p, (b + s) % p)).collect();
        prop_assert_eq!(weight(p, &edges), weight(p, &rotated));
    }

    #[test]
    fn curvature_is_antisymmetric(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let mut cp = Corpus::new(seed);
        let (x, y) = (cp.lie_value(&m, 3, 2), cp.lie_value(&m, 3, 2));
        let a = curvature(&m, &x, &y);
        let b = curvature(&m, &y, &x);
        prop_assert!(a.r1.eq_upto(&b.r1.neg()));
        prop_assert!(a.r2.eq_upto(&b.r2.neg()));
        prop_assert!(a.r4.eq_upto(&-&b.r4));
        let neg: Vec<Vec<Cyclo>> = b.r3.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
        prop_assert_eq!(a.r3, neg);
    }

    #[test]
    fn observables_round_trip_through_rendering(seed in any::<u64>(), mi in 0usize..8) {
        let m = model(mi);
        let w = Corpus::new(seed).matrix_weyl(&m, 3, 1, 3);
        let text = w.render(&m);
        let back = parse_observable(&text, &m).unwrap();
        prop_assert!(back.warnings.is_empty());
        prop_assert_eq!(back.value.render(&m), text);
    }
}
