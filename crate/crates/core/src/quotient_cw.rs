//! Face pairings of the fundamental polyhedron and the induced cell structure on `Γ\H`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{isometric_sphere_element, BoundaryPoint};
use crate::polyhedron::polygon;
use crate::polyhedron::{FaceCarrier, FundamentalPolyhedron, VertexRef};

pub use crate::group::GroupElement;

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("no pairing found for face {0}")]
    UnpairedFace(usize),
    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),
}

/// `element` maps `face` onto `partner`, reversing the induced orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePairing {
    pub face: usize,
    pub partner: usize,
    pub element: GroupElement,
}

/// `element` maps the member cell onto `sign` times the representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitMember {
    pub cell: usize,
    pub element: GroupElement,
    pub sign: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellOrbit {
    pub dimension: usize,
    pub representative: usize,
    pub members: Vec<OrbitMember>,
}

/// A signed combination of cells, sorted by cell index, without zero coefficients.
pub type SignedCells = Vec<(usize, i64)>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientComplex {
    /// Vertex cells are numbered finite vertices first, then cusp vertices.
    pub vertex_orbits: Vec<CellOrbit>,
    pub edge_orbits: Vec<CellOrbit>,
    pub face_orbits: Vec<CellOrbit>,
    /// Indices into `vertex_orbits` of the orbits of cusps; the first is the orbit of infinity.
    pub cusp_orbits: Vec<usize>,
    /// Per cell: (orbit index, element to representative, sign).
    pub vertex_orbit_of: Vec<usize>,
    pub edge_orbit_of: Vec<(usize, i32)>,
    pub face_orbit_of: Vec<(usize, i32)>,
    /// Boundary of each edge orbit in vertex orbits.
    pub edge_boundary: Vec<SignedCells>,
    /// Boundary of each face orbit in edge orbits.
    pub face_boundary: Vec<SignedCells>,
    /// Boundary of the 3-cell in face orbits.
    pub cell3_boundary: SignedCells,
    pub pairings: Vec<FacePairing>,
}

pub fn vertex_cell(poly: &FundamentalPolyhedron, v: VertexRef) -> usize {
    match v {
        VertexRef::Finite(i) => i,
        VertexRef::Cusp(j) => poly.vertices.len() + j,
    }
}

pub fn vertex_ref(poly: &FundamentalPolyhedron, cell: usize) -> VertexRef {
    if cell < poly.vertices.len() {
        VertexRef::Finite(cell)
    } else {
        VertexRef::Cusp(cell - poly.vertices.len())
    }
}

/// Images of the vertices of a face, when they are all vertices of the polyhedron.
pub fn map_cycle(poly: &FundamentalPolyhedron, h: &GroupElement, cycle: &[VertexRef]) -> Option<Vec<VertexRef>> {
    cycle.iter().map(|v| poly.find_vertex(&h.act(&poly.boundary_point(*v)))).collect()
}

/// True when `image` is `target` read backwards, up to rotation.
fn is_reversed_rotation(image: &[VertexRef], target: &[VertexRef]) -> bool {
    let n = target.len();
    if image.len() != n {
        return false;
    }
    let Some(k) = target.iter().position(|v| *v == image[0]) else { return false };
    (0..n).all(|i| image[i] == target[(k + n - i) % n])
}

fn candidate_elements(poly: &FundamentalPolyhedron, face: usize) -> Vec<GroupElement> {
    let f = &poly.faces[face];
    match &f.carrier {
        FaceCarrier::Wall(k) => {
            let t = &poly.domain.sides()[*k].translation;
            vec![GroupElement::translation(&(-t))]
        }
        FaceCarrier::Hemisphere(s) => {
            let Some(g) = isometric_sphere_element(&poly.ring, &s.lambda, &s.mu) else { return vec![] };
            let zs: Vec<_> = f
                .cycle
                .iter()
                .filter_map(|v| match g.act(&poly.boundary_point(*v)) {
                    BoundaryPoint::Finite { z, .. } => Some(z),
                    BoundaryPoint::Infinity => None,
                })
                .collect();
            if zs.is_empty() {
                return vec![];
            }
            let (amin, amax, bmin, bmax) = polygon::bbox(&zs);
            poly.domain
                .translates_meeting_box(&amin, &amax, &bmin, &bmax)
                .into_iter()
                .map(|t| GroupElement::translation(&(-&t)).mul(&g))
                .collect()
        }
    }
}

/// Finds, for every face, the element of `SL2(O)` carrying it onto its partner.
pub fn pair_faces(poly: &FundamentalPolyhedron) -> Result<Vec<FacePairing>, QuotientError> {
    let n = poly.faces.len();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut out = Vec::new();
    for i in 0..n {
        if partner[i].is_some() {
            continue;
        }
        let cycle = &poly.faces[i].cycle;
        let mut found = None;
        for h in candidate_elements(poly, i) {
            if !h.in_sl2(&poly.ring) {
                continue;
            }
            let Some(img) = map_cycle(poly, &h, cycle) else { continue };
            let j = poly.faces.iter().position(|f| is_reversed_rotation(&img, &f.cycle));
            if let Some(j) = j {
                found = Some((j, h));
                break;
            }
        }
        let (j, h) = found.ok_or(QuotientError::UnpairedFace(i))?;
        if j == i || partner[j].is_some() {
            return Err(QuotientError::UnpairedFace(i));
        }
        partner[i] = Some(j);
        partner[j] = Some(i);
        out.push(FacePairing { face: i, partner: j, element: h });
    }
    Ok(out)
}

struct Step {
    to: usize,
    element: GroupElement,
    sign: i32,
}

struct Transitions {
    vertex: Vec<Vec<Step>>,
    edge: Vec<Vec<Step>>,
    face: Vec<Vec<Step>>,
}

fn transitions(poly: &FundamentalPolyhedron, pairings: &[FacePairing]) -> Result<Transitions, QuotientError> {
    let nv = poly.vertex_count();
    let mut t = Transitions {
        vertex: (0..nv).map(|_| Vec::new()).collect(),
        edge: (0..poly.edges.len()).map(|_| Vec::new()).collect(),
        face: (0..poly.faces.len()).map(|_| Vec::new()).collect(),
    };
    for p in pairings {
        let f = &poly.faces[p.face];
        let h = &p.element;
        let hinv = h.inverse();
        let img = map_cycle(poly, h, &f.cycle).ok_or(QuotientError::UnpairedFace(p.face))?;
        let n = f.cycle.len();
        for k in 0..n {
            let (a, b) = (vertex_cell(poly, f.cycle[k]), vertex_cell(poly, img[k]));
            t.vertex[a].push(Step { to: b, element: h.clone(), sign: 1 });
            t.vertex[b].push(Step { to: a, element: hinv.clone(), sign: 1 });
            let (e, s0) = f.edges[k];
            let (e2, s1) = poly.find_edge(img[k], img[(k + 1) % n]).ok_or(QuotientError::UnpairedFace(p.face))?;
            let s = s0 * s1;
            t.edge[e].push(Step { to: e2, element: h.clone(), sign: s });
            t.edge[e2].push(Step { to: e, element: hinv.clone(), sign: s });
        }
        t.face[p.face].push(Step { to: p.partner, element: h.clone(), sign: -1 });
        t.face[p.partner].push(Step { to: p.face, element: hinv, sign: -1 });
    }
    Ok(t)
}

/// Breadth-first orbit search. Returns the orbits, the per-cell (orbit, sign)
/// and the cells found mapped onto themselves with reversed orientation.
fn orbits(
    dimension: usize,
    steps: &[Vec<Step>],
    m: i64,
) -> (Vec<CellOrbit>, Vec<(usize, i32)>, Vec<usize>) {
    let n = steps.len();
    let mut state: Vec<Option<(usize, GroupElement, i32)>> = vec![None; n];
    let mut out: Vec<CellOrbit> = Vec::new();
    let mut conflicts = Vec::new();
    for start in 0..n {
        if state[start].is_some() {
            continue;
        }
        let o = out.len();
        state[start] = Some((o, GroupElement::identity(m), 1));
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let (_, kx, ex) = state[x].clone().expect("queued cells are labelled");
            members.push(OrbitMember { cell: x, element: kx.clone(), sign: ex });
            for s in &steps[x] {
                // h x = sign y, so k_x h^-1 maps y to sign * e_x * rep
                let ey = s.sign * ex;
                match &state[s.to] {
                    Some((_, _, e)) => {
                        if *e != ey && !conflicts.contains(&s.to) {
                            conflicts.push(s.to);
                        }
                    }
                    None => {
                        state[s.to] = Some((o, kx.mul(&s.element.inverse()), ey));
                        queue.push_back(s.to);
                    }
                }
            }
        }
        members.sort_by_key(|mm| mm.cell);
        out.push(CellOrbit { dimension, representative: start, members });
    }
    let of = state.into_iter().map(|s| {
        let (o, _, e) = s.expect("every cell is labelled");
        (o, e)
    });
    (out, of.collect(), conflicts)
}

/// Edges mapped onto themselves with reversed orientation by some element.
pub fn reversed_edges(poly: &FundamentalPolyhedron) -> Result<Vec<usize>, QuotientError> {
    let pairings = pair_faces(poly)?;
    let t = transitions(poly, &pairings)?;
    let (_, _, conflicts) = orbits(1, &t.edge, poly.ring.m);
    Ok(conflicts)
}

pub(crate) fn add_term(acc: &mut SignedCells, cell: usize, coeff: i64) {
    match acc.binary_search_by_key(&cell, |x| x.0) {
        Ok(i) => {
            acc[i].1 += coeff;
            if acc[i].1 == 0 {
                acc.remove(i);
            }
        }
        Err(i) => {
            if coeff != 0 {
                acc.insert(i, (cell, coeff));
            }
        }
    }
}

pub fn build_quotient(poly: &FundamentalPolyhedron, pairings: &[FacePairing]) -> Result<QuotientComplex, QuotientError> {
    let m = poly.ring.m;
    let t = transitions(poly, pairings)?;
    let (vertex_orbits, vof, vc) = orbits(0, &t.vertex, m);
    let (edge_orbits, edge_orbit_of, ec) = orbits(1, &t.edge, m);
    let (face_orbits, face_orbit_of, fc) = orbits(2, &t.face, m);
    if !vc.is_empty() || !ec.is_empty() || !fc.is_empty() {
        return Err(QuotientError::InconsistentOrientation(format!(
            "cells reversed by stabilisers: vertices {:?}, edges {:?}, faces {:?}",
            vc, ec, fc
        )));
    }
    let vertex_orbit_of: Vec<usize> = vof.iter().map(|x| x.0).collect();
    let mut cusp_orbits: Vec<usize> = Vec::new();
    for j in 0..poly.cusp_vertices.len() {
        let o = vertex_orbit_of[vertex_cell(poly, VertexRef::Cusp(j))];
        if !cusp_orbits.contains(&o) {
            cusp_orbits.push(o);
        }
    }
    let edge_boundary = edge_orbits
        .iter()
        .map(|o| {
            let [p, q] = poly.edges[o.representative].ends;
            let mut acc = SignedCells::new();
            add_term(&mut acc, vertex_orbit_of[vertex_cell(poly, q)], 1);
            add_term(&mut acc, vertex_orbit_of[vertex_cell(poly, p)], -1);
            acc
        })
        .collect();
    let face_boundary = face_orbits
        .iter()
        .map(|o| {
            let mut acc = SignedCells::new();
            for &(e, s) in &poly.faces[o.representative].edges {
                let (eo, es) = edge_orbit_of[e];
                add_term(&mut acc, eo, (s * es) as i64);
            }
            acc
        })
        .collect();
    let mut cell3_boundary = SignedCells::new();
    for &(fo, fs) in &face_orbit_of {
        add_term(&mut cell3_boundary, fo, fs as i64);
    }
    Ok(QuotientComplex {
        vertex_orbits,
        edge_orbits,
        face_orbits,
        cusp_orbits,
        vertex_orbit_of,
        edge_orbit_of,
        face_orbit_of,
        edge_boundary,
        face_boundary,
        cell3_boundary,
        pairings: pairings.to_vec(),
    })
}
