//! The floor of the polyhedron as an exact power diagram over the period domain.

use num_traits::{Signed, Zero};

use super::polygon::{self, HalfPlane, Pt};
use super::{coprime, dist_sq_to_box, enumerate_hemispheres, sort_hemispheres, sqrt_upper, Hemisphere, PeriodDomain};
use crate::number_field::{int, AlgebraicNumber, Rational, Ring};

/// A cell of the floor: the part of the period domain where `sphere` is the highest hemisphere.
#[derive(Clone, Debug)]
pub(crate) struct FloorCell {
    pub sphere: Hemisphere,
    /// Counter-clockwise, no collinear vertices.
    pub poly: Vec<Pt>,
}

#[derive(Clone, Debug)]
pub(crate) struct Floor {
    pub cells: Vec<FloorCell>,
    /// Cell vertices at height zero.
    #[cfg_attr(not(test), allow(dead_code))]
    pub singular: Vec<Pt>,
}

/// Half-plane where `pow_s <= pow_t`.
fn power_halfplane(ring: &Ring, s: &Hemisphere, t: &Hemisphere) -> HalfPlane {
    let (c1, c2) = (&s.center, &t.center);
    let m = int(ring.m);
    HalfPlane {
        ca: int(2) * (&c2.a - &c1.a),
        cb: int(2) * m * (&c2.b - &c1.b),
        c0: c1.norm() - c2.norm() - &s.radius_sq + &t.radius_sq,
    }
}

struct Bbox {
    amin: Rational,
    amax: Rational,
    bmin: Rational,
    bmax: Rational,
}

fn shadow_box(ring: &Ring, h: &Hemisphere) -> Bbox {
    let ra = sqrt_upper(&h.radius_sq);
    let rb = sqrt_upper(&(&h.radius_sq / int(ring.m)));
    Bbox {
        amin: &h.center.a - &ra,
        amax: &h.center.a + &ra,
        bmin: &h.center.b - &rb,
        bmax: &h.center.b + &rb,
    }
}

/// All translates of the listed hemispheres whose open shadow meets the period domain.
pub(crate) fn local_translates(domain: &PeriodDomain, hs: &[Hemisphere]) -> Vec<Hemisphere> {
    let ring = &domain.ring;
    let mut out = Vec::new();
    for h in hs {
        let bb = shadow_box(ring, h);
        // R + t meets the shadow  <=>  the shadow translated by -t meets R
        for t in domain.translates_meeting_box(&bb.amin, &bb.amax, &bb.bmin, &bb.bmax) {
            let g = h.translate(&(-&t));
            if domain.dist_sq(&g.center) < g.radius_sq {
                out.push(g);
            }
        }
    }
    sort_hemispheres(&mut out);
    out
}

/// The power diagram of `local` restricted to the period domain.
pub(crate) fn power_cells(domain: &PeriodDomain, local: &[Hemisphere]) -> Vec<FloorCell> {
    let ring = &domain.ring;
    let rect = domain.polygon();
    let boxes: Vec<Bbox> = local.iter().map(|h| shadow_box(ring, h)).collect();
    let mut cells = Vec::new();
    for (i, s) in local.iter().enumerate() {
        let bb = &boxes[i];
        let boxpoly = vec![
            ring.elem(bb.amin.clone(), bb.bmin.clone()),
            ring.elem(bb.amax.clone(), bb.bmin.clone()),
            ring.elem(bb.amax.clone(), bb.bmax.clone()),
            ring.elem(bb.amin.clone(), bb.bmax.clone()),
        ];
        let mut poly = polygon::intersect(&rect, &boxpoly);
        for (j, t) in local.iter().enumerate() {
            if poly.is_empty() {
                break;
            }
            if i == j {
                continue;
            }
            let d = dist_sq_to_box(ring, &t.center, &bb.amin, &bb.amax, &bb.bmin, &bb.bmax);
            if d >= t.radius_sq {
                continue;
            }
            let hp = power_halfplane(ring, s, t);
            if hp.is_degenerate() {
                // concentric: the larger one wins outright
                if t.radius_sq > s.radius_sq {
                    poly.clear();
                }
                continue;
            }
            poly = polygon::clip(&poly, &hp);
        }
        if !poly.is_empty() {
            cells.push(FloorCell { sphere: s.clone(), poly: polygon::canonical_rotation(poly) });
        }
    }
    cells
}

/// Is `z` a cusp of a non-principal ideal class?
pub(crate) fn is_nonprincipal_cusp(ring: &Ring, z: &AlgebraicNumber) -> bool {
    let c = ring.cusp_at(z);
    let i = ring.cusp_ideal(&c);
    !i.is_unit() && !ring.is_principal(&i)
}

/// Computes the floor over the period domain, or `None` if the translates of
/// `hs` leave part of it uncovered.
pub(crate) fn floor(domain: &PeriodDomain, hs: &[Hemisphere]) -> Option<Floor> {
    let ring = &domain.ring;
    if hs.is_empty() {
        return None;
    }
    let local = local_translates(domain, hs);
    let cells = power_cells(domain, &local);
    let mut area = Rational::zero();
    let mut singular: Vec<Pt> = Vec::new();
    for c in &cells {
        area += polygon::area2(&c.poly);
        for v in &c.poly {
            let p = c.sphere.power(v);
            if p.is_positive() {
                return None;
            }
            if p.is_zero() {
                if !is_nonprincipal_cusp(ring, v) {
                    return None;
                }
                if !singular.contains(v) {
                    singular.push(v.clone());
                }
            }
        }
    }
    if area != polygon::area2(&domain.polygon()) {
        return None;
    }
    singular.sort_by(|x, y| x.lex_cmp(y));
    Some(Floor { cells, singular })
}

/// True iff the translates of `hemispheres` cover the period domain up to
/// finitely many non-principal cusps.
pub fn swan_terminated(hemispheres: &[Hemisphere], ring: &Ring) -> bool {
    let domain = PeriodDomain::new(ring);
    floor(&domain, hemispheres).is_some()
}

/// Hemispheres passing strictly above the point `(z, h)` of the floor.
pub(crate) fn pokers_at(ring: &Ring, z: &AlgebraicNumber, height_sq: &Rational) -> Vec<Hemisphere> {
    let one = int(1);
    let mut out = Vec::new();
    let zero = ring.zero();
    let nbound = &one / height_sq;
    for mu in ring.elements_near(&zero, &nbound) {
        if mu.is_zero() || mu.lex_cmp(&zero).is_lt() {
            continue;
        }
        let n = mu.norm();
        if n >= nbound {
            continue;
        }
        let bound = &one - &n * height_sq;
        let center = &mu * z;
        for lam in ring.elements_near(&center, &bound) {
            if (&center - &lam).norm() >= bound {
                continue;
            }
            if coprime(ring, &lam, &mu) {
                out.push(Hemisphere::new(lam, mu.clone()));
            }
        }
    }
    out
}

/// The hemispheres carrying the floor, one per translation class, in canonical order.
///
/// Starts from the hemispheres with `N(mu) <= k` for the least `k` whose
/// translates cover the period domain, then adds any hemisphere passing
/// strictly above a floor vertex until none does. A hemisphere passing above
/// some floor point passes above a vertex of the floor cell containing it,
/// since within a cell the difference of two powers is affine.
pub fn build_hemisphere_set(ring: &Ring) -> Vec<Hemisphere> {
    let domain = PeriodDomain::new(ring);
    let mut k = 1i64;
    let mut seen = 0;
    let mut hs = loop {
        let hs = enumerate_hemispheres(ring, &crate::number_field::rat(1, k));
        // norms not represented by O add nothing new
        if hs.len() > seen && swan_terminated(&hs, ring) {
            break hs;
        }
        seen = hs.len();
        k += 1;
    };
    loop {
        let fl = floor(&domain, &hs).expect("adding hemispheres keeps the domain covered");
        let mut added = false;
        for c in &fl.cells {
            for v in &c.poly {
                let h = -c.sphere.power(v);
                if !h.is_positive() {
                    continue;
                }
                for p in pokers_at(ring, v, &h) {
                    let t = domain.reduction(&p.center);
                    let q = p.translate(&(-&t));
                    if !hs.iter().any(|x| x.key() == q.key()) {
                        hs.push(q);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
        sort_hemispheres(&mut hs);
    }
    // keep only hemispheres that actually carry a piece of floor
    let fl = floor(&domain, &hs).expect("covered");
    let mut carriers: Vec<Hemisphere> = Vec::new();
    for c in &fl.cells {
        let t = domain.reduction(&c.sphere.center);
        let q = c.sphere.translate(&(-&t));
        if !carriers.iter().any(|x| x.key() == q.key()) {
            carriers.push(q);
        }
    }
    sort_hemispheres(&mut carriers);
    carriers
}
