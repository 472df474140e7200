mod common;

use bianchi::borel_serre::{boundary_subcomplex, cusp_stabiliser_gens};
use bianchi::group::{BoundaryPoint, GroupElement};
use bianchi::homology::snf::IntMatrix;
use bianchi::homology::ChainComplex;
use bianchi::number_field::{cusp_classes, int, make_ring, rat, AlgebraicNumber, Rational};
use num_bigint::BigInt;
use num_traits::Zero;

fn quotient_complex(m: i64) -> ChainComplex {
    let q = &common::pipeline(m).quotient;
    let (v, e, f) = (q.vertex_orbits.len(), q.edge_orbits.len(), q.face_orbits.len());
    let mut d1 = IntMatrix::zeros(v, e);
    for (j, b) in q.edge_boundary.iter().enumerate() {
        for (i, x) in b {
            d1.set(*i, j, BigInt::from(*x));
        }
    }
    let mut d2 = IntMatrix::zeros(e, f);
    for (j, b) in q.face_boundary.iter().enumerate() {
        for (i, x) in b {
            d2.set(*i, j, BigInt::from(*x));
        }
    }
    let mut d3 = IntMatrix::zeros(f, 1);
    for (i, x) in &q.cell3_boundary {
        d3.set(*i, 0, BigInt::from(*x));
    }
    ChainComplex::new(vec![v, e, f, 1], vec![d1, d2, d3])
}

#[test]
fn boundaries_compose_to_zero() {
    for m in common::M_SET {
        let y = &common::pipeline(m).compactified;
        y.complex.check().unwrap();
        boundary_subcomplex(y).complex.check().unwrap();
        quotient_complex(m).check().unwrap();
    }
}

#[test]
fn one_torus_per_ideal_class() {
    for m in common::M_SET {
        let ring = make_ring(m).unwrap();
        let h = common::class_number_by_forms(ring.discriminant);
        let y = &common::pipeline(m).compactified;
        assert_eq!(y.cusp_count(), h, "m = {m}");
        let bd = boundary_subcomplex(y);
        assert_eq!(bd.complex.dims, vec![h, 2 * h, h]);
        assert_eq!(y.complex.cells(0), y.interior_vertices + h);
        assert_eq!(y.complex.cells(1), y.interior_edges + 2 * h);
        assert_eq!(y.complex.cells(2), y.interior_faces + h);
        assert_eq!(y.complex.cells(3), 1);
        assert!(y.cusp_coefficients.iter().all(|c| c == &int(1)), "m = {m}");
    }
}

#[test]
fn truncated_edges_end_on_torus_vertices() {
    for m in common::M_SET {
        let y = &common::pipeline(m).compactified;
        let d1 = y.complex.boundary(1);
        let torus_vertices: Vec<usize> = y.tori.iter().map(|t| t.vertex).collect();
        for t in &y.tori {
            // torus loops are closed
            assert!(d1.column(t.edge_x).iter().all(Zero::is_zero));
            assert!(d1.column(t.edge_y).iter().all(Zero::is_zero));
        }
        for (e, torus) in &y.truncated {
            assert!(*e < y.interior_edges);
            let col = d1.column(*e);
            assert!(!col[y.tori[*torus].vertex].is_zero() || col.iter().all(Zero::is_zero), "m = {m}");
        }
        // no edge reaches a cusp except through a torus vertex
        for e in 0..y.interior_edges {
            let col = d1.column(e);
            let touches = torus_vertices.iter().any(|v| !col[*v].is_zero());
            let listed = y.truncated.iter().any(|(f, _)| *f == e);
            assert!(!touches || listed, "m = {m}, edge {e}");
        }
    }
}

#[test]
fn quotient_edge_orbits_m6() {
    let pl = common::pipeline(6);
    assert_eq!(pl.quotient.cusp_orbits.len(), 2);
    // the eleven orbits of edges of the quotient, plus two loops per torus
    assert_eq!(pl.quotient.edge_orbits.len(), 11);
    assert_eq!(pl.compactified.complex.dims, vec![8, 15, 8, 1]);
}

fn fixes(g: &GroupElement, z: &AlgebraicNumber) -> bool {
    g.act(&BoundaryPoint::Finite { z: z.clone(), zeta_sq: Rational::zero() })
        == BoundaryPoint::Finite { z: z.clone(), zeta_sq: Rational::zero() }
}

/// Parabolic elements fixing `s` are `[[1 - ts, ts^2], [-t, 1 + ts]]`; search
/// `t` over a box and compare the lattice of admissible `t` with the one
/// spanned by the computed generators.
#[test]
fn stabiliser_of_the_m6_cusp() {
    let ring = make_ring(6).unwrap();
    let s = AlgebraicNumber::new(rat(0, 1), rat(1, 2), 6);
    let cusp = cusp_classes(&ring).cusp_reps[1].clone();
    assert_eq!(cusp.value().unwrap(), s);
    let mut admissible = Vec::new();
    for p in -6..=6 {
        for q in -6..=6 {
            let t = ring.from_coords(p, q);
            let ts = &t * &s;
            if ring.is_integer(&ts) && ring.is_integer(&(&ts * &s)) {
                admissible.push((p, q));
            }
        }
    }
    // the admissible t form 2O
    assert!(admissible.iter().all(|(p, q)| p % 2 == 0 && q % 2 == 0));
    assert_eq!(admissible.len(), 7 * 7);

    let y = &common::pipeline(6).compactified;
    for gens in [cusp_stabiliser_gens(&ring, &cusp), y.tori[1].gens.clone()] {
        let mut ts = Vec::new();
        for g in [&gens.gamma_x, &gens.gamma_y] {
            assert!(g.in_sl2(&ring));
            assert!(fixes(g, &s));
            assert_eq!((&g.a + &g.d).a, int(2));
            let t = -&g.c;
            let ts_ = &t * &s;
            let want = GroupElement::new(&ring.one() - &ts_, &ts_ * &s, -&t, &ring.one() + &ts_);
            assert_eq!(g, &want);
            let c = ring.coords(&t).unwrap();
            ts.push((c.p, c.q));
        }
        assert!(fixes(&gens.gamma_x.mul(&gens.gamma_y), &s));
        assert_eq!(gens.gamma_x.mul(&gens.gamma_y), gens.gamma_y.mul(&gens.gamma_x));
        let det = common::abs_det(&[
            vec![BigInt::from(ts[0].0), BigInt::from(ts[0].1)],
            vec![BigInt::from(ts[1].0), BigInt::from(ts[1].1)],
        ]);
        // index 4 in O, the covolume of 2O
        assert_eq!(det, BigInt::from(4));
        for (p, q) in &admissible {
            assert!(in_span(ts[0], ts[1], (*p, *q)));
        }
    }
}

fn in_span(u: (i64, i64), v: (i64, i64), w: (i64, i64)) -> bool {
    let det = u.0 * v.1 - u.1 * v.0;
    let a = w.0 * v.1 - w.1 * v.0;
    let b = u.0 * w.1 - u.1 * w.0;
    a % det == 0 && b % det == 0
}

#[test]
fn infinity_generators_are_unit_translations() {
    for m in common::M_SET {
        let ring = make_ring(m).unwrap();
        let y = &common::pipeline(m).compactified;
        let t = &y.tori[0];
        assert!(t.cusp.is_infinity());
        assert_eq!(t.gens.gamma_x, GroupElement::translation(&ring.one()));
        assert_eq!(t.gens.gamma_y, GroupElement::translation(&ring.omega()));
    }
}
