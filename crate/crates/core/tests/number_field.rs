mod common;

use bianchi::number_field::{cusp_classes, make_ring, rat, AlgebraicNumber, FieldError};
use proptest::prelude::*;

fn squarefree(m: i64) -> bool {
    (2..).take_while(|p| p * p <= m).all(|p| m % (p * p) != 0)
}

fn admissible() -> impl Strategy<Value = i64> {
    (2i64..60).prop_filter("squarefree, not 3", |m| *m != 3 && squarefree(*m))
}

#[test]
fn rejects_bad_m() {
    assert_eq!(make_ring(1).unwrap_err(), FieldError::ExcludedUnits(1));
    assert_eq!(make_ring(3).unwrap_err(), FieldError::ExcludedUnits(3));
    assert_eq!(make_ring(4).unwrap_err(), FieldError::NotSquarefree(4));
    assert_eq!(make_ring(18).unwrap_err(), FieldError::NotSquarefree(18));
    assert_eq!(make_ring(0).unwrap_err(), FieldError::NonPositive(0));
    assert_eq!(make_ring(-5).unwrap_err(), FieldError::NonPositive(-5));
}

#[test]
fn discriminants() {
    for m in [2, 5, 6, 7, 10, 11, 13, 15, 19, 23] {
        assert_eq!(make_ring(m).unwrap().discriminant, common::discriminant(m));
    }
}

#[test]
fn class_numbers_match_reduced_forms() {
    for m in (2..=30).filter(|m| *m != 3 && squarefree(*m)) {
        let ring = make_ring(m).unwrap();
        let h = common::class_number_by_forms(ring.discriminant);
        let classes = cusp_classes(&ring);
        assert_eq!(classes.class_number, h, "m = {m}");
        assert_eq!(classes.cusp_reps.len(), h);
        assert!(classes.cusp_reps[0].is_infinity());
        // the representatives lie in pairwise distinct classes
        let idx: Vec<usize> = classes.cusp_reps.iter().map(|c| classes.cusp_class(&ring, c)).collect();
        assert_eq!(idx, (0..h).collect::<Vec<_>>(), "m = {m}");
    }
}

#[test]
fn frozen_class_numbers() {
    let want = [(2, 1), (5, 2), (6, 2), (7, 1), (10, 2), (11, 1), (13, 2), (15, 2)];
    for (m, h) in want {
        assert_eq!(common::class_number_by_forms(common::discriminant(m)), h);
    }
}

#[test]
fn m6_second_cusp() {
    let ring = make_ring(6).unwrap();
    let c = &cusp_classes(&ring).cusp_reps[1];
    assert_eq!(c.value().unwrap(), AlgebraicNumber::new(rat(0, 1), rat(1, 2), 6));
}

proptest! {
    #[test]
    fn norm_is_multiplicative(m in admissible(), p in -20i64..20, q in -20i64..20, r in -20i64..20, s in -20i64..20) {
        let ring = make_ring(m).unwrap();
        let x = ring.from_coords(p, q);
        let y = ring.from_coords(r, s);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert!(ring.is_integer(&(&x * &y)));
        prop_assert!(ring.is_integer(&(&x + &y)));
    }

    #[test]
    fn only_units_are_signs(m in admissible()) {
        let ring = make_ring(m).unwrap();
        let mut units = ring.elements_of_norm(1);
        units.sort_by(|a, b| a.lex_cmp(b));
        prop_assert_eq!(units, vec![ring.from_int(-1), ring.from_int(1)]);
    }

    #[test]
    fn coordinates_round_trip(m in admissible(), p in -50i64..50, q in -50i64..50) {
        let ring = make_ring(m).unwrap();
        let x = ring.from_coords(p, q);
        let c = ring.coords(&x).unwrap();
        prop_assert_eq!((c.p, c.q), (p, q));
        prop_assert_eq!(rat(ring.coords_norm(c), 1), x.norm());
    }
}
