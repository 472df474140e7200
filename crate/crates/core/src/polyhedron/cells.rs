//! Cell extraction: the floor power diagram is refined until every face is
//! carried by a single face pairing, i.e. each face is `P ∩ hP` for one `h`.
//!
//! A floor cell on the hemisphere `S` is moved by the element `g_S` whose
//! isometric sphere is `S`; on `S` that element acts in projection as a
//! Euclidean isometry of the `z`-plane ([`GroupElement::sphere_map`]), so
//! images of polygons stay polygons. A cell whose image straddles several
//! cells is cut along the pulled-back boundaries; cells paired with themselves
//! are cut along their fold line; edges reversed by a stabiliser are cut at
//! their midpoint.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use super::floor::floor;
use super::polygon::{self, HalfPlane, Pt};
use super::{
    Edge, EdgeCarrier, Face, FaceCarrier, FundamentalPolyhedron, Hemisphere, PeriodDomain, Point,
    PolyhedronError, VertexRef,
};
use crate::group::{isometric_sphere_element, GroupElement};
use crate::number_field::{int, AlgebraicNumber, CuspPoint, Rational, Ring};

const MAX_ROUNDS: usize = 64;

#[derive(Clone, Debug)]
struct Piece {
    sphere: Hemisphere,
    /// Counter-clockwise, no collinear vertices.
    poly: Vec<Pt>,
    g: GroupElement,
}

/// Where the image of a piece lands: `g z + shift` lies in piece `target`.
#[derive(Clone, Debug)]
struct Part {
    shift: AlgebraicNumber,
    target: usize,
    poly: Vec<Pt>,
}

type Key = (AlgebraicNumber, Rational);

fn key_index(pieces: &[Piece]) -> HashMap<Key, Vec<usize>> {
    let mut by_key: HashMap<Key, Vec<usize>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        by_key.entry(p.sphere.key()).or_default().push(i);
    }
    by_key
}

fn image_parts(
    domain: &PeriodDomain,
    pieces: &[Piece],
    by_key: &HashMap<Key, Vec<usize>>,
    i: usize,
) -> Result<Vec<Part>, PolyhedronError> {
    let p = &pieces[i];
    let g = &p.g;
    let img = polygon::make_ccw(p.poly.iter().map(|v| g.sphere_map(v)).collect());
    let target_center = g.a.checked_div(&g.c).expect("hemisphere element has c != 0");
    let (amin, amax, bmin, bmax) = polygon::bbox(&img);
    let rect = domain.polygon();
    let mut parts = Vec::new();
    let mut total = Rational::zero();
    for t in domain.translates_meeting_box(&amin, &amax, &bmin, &bmax) {
        let shift = -&t;
        let moved: Vec<Pt> = img.iter().map(|v| v + &shift).collect();
        let clipped = polygon::intersect(&moved, &rect);
        if clipped.is_empty() {
            continue;
        }
        let key = (&target_center + &shift, p.sphere.radius_sq.clone());
        for &j in by_key.get(&key).map(|v| v.as_slice()).unwrap_or(&[]) {
            let inter = polygon::intersect(&clipped, &pieces[j].poly);
            if !inter.is_empty() {
                total += polygon::area2(&inter);
                parts.push(Part { shift: shift.clone(), target: j, poly: inter });
            }
        }
    }
    if total != polygon::area2(&img) {
        return Err(PolyhedronError::ImageNotOnFloor(format!("{:?}", p.sphere)));
    }
    Ok(parts)
}

fn refine_round(domain: &PeriodDomain, pieces: &[Piece]) -> Result<Option<Vec<Piece>>, PolyhedronError> {
    let by_key = key_index(pieces);
    let mut out = Vec::with_capacity(pieces.len());
    let mut changed = false;
    for i in 0..pieces.len() {
        let parts = image_parts(domain, pieces, &by_key, i)?;
        if parts.len() == 1 {
            out.push(pieces[i].clone());
            continue;
        }
        changed = true;
        let ginv = pieces[i].g.inverse();
        for part in parts {
            let pre: Vec<Pt> = part.poly.iter().map(|w| ginv.sphere_map(&(w - &part.shift))).collect();
            let pre = polygon::simplify(polygon::make_ccw(pre));
            if !pre.is_empty() {
                out.push(Piece { poly: polygon::canonical_rotation(pre), ..pieces[i].clone() });
            }
        }
    }
    Ok(changed.then_some(out))
}

/// `N(z - p) <= N(z - q)`.
fn bisector(ring: &Ring, p: &Pt, q: &Pt) -> HalfPlane {
    HalfPlane {
        ca: int(2) * (&q.a - &p.a),
        cb: int(2 * ring.m) * (&q.b - &p.b),
        c0: p.norm() - q.norm(),
    }
}

/// Splits pieces mapped onto themselves along the fixed line of the pairing.
fn fold_round(domain: &PeriodDomain, pieces: &[Piece]) -> Result<Option<Vec<Piece>>, PolyhedronError> {
    let by_key = key_index(pieces);
    let mut out = Vec::with_capacity(pieces.len());
    let mut changed = false;
    for i in 0..pieces.len() {
        let parts = image_parts(domain, pieces, &by_key, i)?;
        let part = &parts[0];
        if part.target != i {
            out.push(pieces[i].clone());
            continue;
        }
        let p = &pieces[i];
        let map = |v: &Pt| &p.g.sphere_map(v) + &part.shift;
        let v = p
            .poly
            .iter()
            .find(|v| map(v) != **v)
            .ok_or_else(|| PolyhedronError::Inconsistent("pairing fixes a face pointwise".into()))?;
        let hp = bisector(&domain.ring, v, &map(v));
        for half in [polygon::clip(&p.poly, &hp), polygon::clip(&p.poly, &hp.complement())] {
            if half.is_empty() {
                return Err(PolyhedronError::Inconsistent("fold line misses a self-paired face".into()));
            }
            out.push(Piece { poly: polygon::canonical_rotation(half), ..p.clone() });
        }
        changed = true;
    }
    Ok(changed.then_some(out))
}

fn on_boundary(poly: &[Pt], v: &Pt) -> bool {
    polygon::contains_closed(poly, v) && !polygon::contains_strict(poly, v)
}

fn on_rectangle_boundary(domain: &PeriodDomain, v: &Pt) -> bool {
    domain.contains_closed(v) && !polygon::contains_strict(&domain.polygon(), v)
}

#[derive(Default)]
struct PointSet {
    pts: Vec<Pt>,
    set: HashSet<Pt>,
}

impl PointSet {
    fn insert(&mut self, p: Pt) -> bool {
        if self.set.insert(p.clone()) {
            self.pts.push(p);
            true
        } else {
            false
        }
    }
}

/// Closes the vertex set under the face pairings and the wall translations.
fn close_vertices(
    domain: &PeriodDomain,
    pieces: &[Piece],
    maps: &[Part],
    extra: &[Pt],
) -> Result<PointSet, PolyhedronError> {
    let mut vs = PointSet::default();
    for p in pieces {
        for v in &p.poly {
            vs.insert(v.clone());
        }
    }
    for v in domain.boundary_vertices().into_iter().chain(extra.iter().cloned()) {
        vs.insert(v);
    }
    for _ in 0..MAX_ROUNDS {
        let mut new: Vec<Pt> = Vec::new();
        for (p, part) in pieces.iter().zip(maps) {
            for v in &vs.pts {
                if on_boundary(&p.poly, v) {
                    let w = &p.g.sphere_map(v) + &part.shift;
                    if !vs.set.contains(&w) && !new.contains(&w) {
                        new.push(w);
                    }
                }
            }
        }
        for v in &vs.pts {
            if on_rectangle_boundary(domain, v) {
                for w in domain.wall_images(v) {
                    if !vs.set.contains(&w) && !new.contains(&w) {
                        new.push(w);
                    }
                }
            }
        }
        if new.is_empty() {
            return Ok(vs);
        }
        for w in new {
            vs.insert(w);
        }
    }
    Err(PolyhedronError::RefinementDiverged(MAX_ROUNDS))
}

/// Points of `vs` on the closed segment `p -> q`, in order, endpoints excluded.
fn points_inside(vs: &PointSet, p: &Pt, q: &Pt) -> Vec<Pt> {
    let mut inner: Vec<(Rational, Pt)> = vs
        .pts
        .iter()
        .filter(|v| polygon::strictly_inside_segment(p, q, v))
        .map(|v| (polygon::param_on_segment(p, q, v), v.clone()))
        .collect();
    inner.sort_by(|x, y| x.0.cmp(&y.0));
    inner.into_iter().map(|x| x.1).collect()
}

fn full_cycle(vs: &PointSet, poly: &[Pt]) -> Vec<Pt> {
    let n = poly.len();
    let mut out = Vec::new();
    for i in 0..n {
        out.push(poly[i].clone());
        out.extend(points_inside(vs, &poly[i], &poly[(i + 1) % n]));
    }
    out
}

fn lex_cmp_polys(x: &[Pt], y: &[Pt]) -> std::cmp::Ordering {
    for (a, b) in x.iter().zip(y) {
        let c = a.lex_cmp(b);
        if c.is_ne() {
            return c;
        }
    }
    x.len().cmp(&y.len())
}

struct Builder {
    edges: Vec<Edge>,
    index: HashMap<(VertexRef, VertexRef), usize>,
}

impl Builder {
    fn edge(&mut self, u: VertexRef, w: VertexRef, carrier: EdgeCarrier) -> (usize, i32) {
        let (lo, hi, sign) = if u <= w { (u, w, 1) } else { (w, u, -1) };
        if let Some(&i) = self.index.get(&(lo, hi)) {
            return (i, sign);
        }
        self.edges.push(Edge { ends: [lo, hi], carrier });
        self.index.insert((lo, hi), self.edges.len() - 1);
        (self.edges.len() - 1, sign)
    }

    fn face(&mut self, cycle: Vec<VertexRef>, carrier: FaceCarrier, vertical_to: Option<VertexRef>) -> Face {
        let n = cycle.len();
        let edges = (0..n)
            .map(|i| {
                let (u, w) = (cycle[i], cycle[(i + 1) % n]);
                let kind = if Some(u) == vertical_to || Some(w) == vertical_to {
                    EdgeCarrier::Vertical
                } else {
                    EdgeCarrier::Floor
                };
                self.edge(u, w, kind)
            })
            .collect();
        Face { cycle, edges, carrier }
    }
}

fn assemble(
    domain: &PeriodDomain,
    hemispheres: &[Hemisphere],
    pieces: &[Piece],
    vs: &PointSet,
) -> Result<FundamentalPolyhedron, PolyhedronError> {
    let ring = domain.ring;
    let height = |v: &Pt| -> Option<Rational> {
        pieces
            .iter()
            .find(|p| polygon::contains_closed(&p.poly, v))
            .map(|p| -p.sphere.power(v))
    };
    let mut finite: Vec<Point> = Vec::new();
    let mut cusps: Vec<Pt> = Vec::new();
    for v in &vs.pts {
        let h = height(v).ok_or_else(|| PolyhedronError::Inconsistent(format!("vertex {} off the floor", v)))?;
        if h.is_negative() {
            return Err(PolyhedronError::Inconsistent(format!("vertex {} below ground", v)));
        }
        if h.is_zero() {
            cusps.push(v.clone());
        } else {
            finite.push(Point::new(v.clone(), h));
        }
    }
    finite.sort_by(|x, y| x.z.lex_cmp(&y.z));
    cusps.sort_by(|x, y| x.lex_cmp(y));
    let mut refs: HashMap<Pt, VertexRef> = HashMap::new();
    for (i, p) in finite.iter().enumerate() {
        refs.insert(p.z.clone(), VertexRef::Finite(i));
    }
    for (i, z) in cusps.iter().enumerate() {
        refs.insert(z.clone(), VertexRef::Cusp(i + 1));
    }
    let inf = VertexRef::Cusp(0);
    let mut cusp_vertices = vec![CuspPoint::infinity(ring.m)];
    cusp_vertices.extend(cusps.iter().map(|z| ring.cusp_at(z)));

    let mut b = Builder { edges: Vec::new(), index: HashMap::new() };
    let mut faces = Vec::new();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&i, &j| lex_cmp_polys(&pieces[i].poly, &pieces[j].poly));
    for i in order {
        let p = &pieces[i];
        let mut cyc = full_cycle(vs, &p.poly);
        // outward normal points down: clockwise seen from above
        cyc[1..].reverse();
        let cycle: Vec<VertexRef> = cyc.iter().map(|v| refs[v]).collect();
        faces.push(b.face(cycle, FaceCarrier::Hemisphere(p.sphere.clone()), None));
    }
    for (k, side) in domain.sides().iter().enumerate() {
        let mut cycle = vec![refs[&side.from]];
        cycle.extend(points_inside(vs, &side.from, &side.to).iter().map(|v| refs[v]));
        cycle.push(refs[&side.to]);
        cycle.push(inf);
        faces.push(b.face(cycle, FaceCarrier::Wall(k), Some(inf)));
    }
    Ok(FundamentalPolyhedron {
        ring,
        domain: domain.clone(),
        hemispheres: hemispheres.to_vec(),
        vertices: finite,
        cusp_vertices,
        edges: b.edges,
        faces,
    })
}

/// Builds the cell structure of the polyhedron bounded by the translates of `hemispheres`.
pub fn extract_cells(hemispheres: &[Hemisphere], ring: &Ring) -> Result<FundamentalPolyhedron, PolyhedronError> {
    let domain = PeriodDomain::new(ring);
    let fl = floor(&domain, hemispheres).ok_or(PolyhedronError::NotTerminated)?;
    let mut pieces = Vec::with_capacity(fl.cells.len());
    for c in fl.cells {
        let g = isometric_sphere_element(ring, &c.sphere.lambda, &c.sphere.mu)
            .ok_or_else(|| PolyhedronError::Inconsistent(format!("{:?} is not coprime", c.sphere)))?;
        pieces.push(Piece { sphere: c.sphere, poly: c.poly, g });
    }
    let mut rounds = 0;
    loop {
        while let Some(next) = refine_round(&domain, &pieces)? {
            pieces = next;
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(PolyhedronError::RefinementDiverged(MAX_ROUNDS));
            }
        }
        match fold_round(&domain, &pieces)? {
            Some(next) => pieces = next,
            None => break,
        }
    }
    let by_key = key_index(&pieces);
    let mut maps = Vec::with_capacity(pieces.len());
    for i in 0..pieces.len() {
        let mut parts = image_parts(&domain, &pieces, &by_key, i)?;
        let part = parts.pop().expect("one part after refinement");
        if !polygon::same_vertex_set(&part.poly, &pieces[part.target].poly) {
            return Err(PolyhedronError::Inconsistent("face image is a proper subset of a face".into()));
        }
        maps.push(part);
    }
    let mut extra: Vec<Pt> = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let vs = close_vertices(&domain, &pieces, &maps, &extra)?;
        let poly = assemble(&domain, hemispheres, &pieces, &vs)?;
        let flipped = crate::quotient_cw::reversed_edges(&poly)
            .map_err(|e| PolyhedronError::Inconsistent(e.to_string()))?;
        if flipped.is_empty() {
            return Ok(poly);
        }
        for e in flipped {
            let [u, w] = poly.edges[e].ends;
            let (VertexRef::Finite(i), VertexRef::Finite(j)) = (u, w) else {
                return Err(PolyhedronError::Inconsistent("cusp edge reversed by a stabiliser".into()));
            };
            let mid = (&poly.vertices[i].z + &poly.vertices[j].z).scale(&crate::number_field::rat(1, 2));
            if !extra.contains(&mid) {
                extra.push(mid);
            }
        }
    }
    Err(PolyhedronError::RefinementDiverged(MAX_ROUNDS))
}
