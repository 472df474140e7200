//! Attaching a 2-torus at every cusp orbit: the chain complex of the
//! Borel–Serre compactification `Y` and of its boundary `∂Y`.
//!
//! A cusp `c = lambda / mu` is moved to infinity by
//! `sigma = [[0, 1/mu], [-mu, lambda]]`; there its stabiliser becomes the
//! translations by the lattice `I^-2`, `I = (lambda, mu)`. Every edge of the
//! polyhedron ending at a cusp becomes, near that cusp, a vertical line over a
//! point of `C / I^-2`; every face becomes a vertical strip whose top side is a
//! segment between two such points. Truncated edges are anchored at the torus
//! vertex, so each top side contributes the lattice vector between the anchors
//! of its two edges, written in the torus basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{BoundaryPoint, GroupElement};
use crate::homology::snf::{preimage_lattice, IntMatrix};
use crate::homology::ChainComplex;
use crate::number_field::{AlgebraicNumber, CuspPoint, Rational, Ring};
use crate::polyhedron::polygon::cross;
use crate::polyhedron::{FundamentalPolyhedron, VertexRef};
use crate::quotient_cw::{build_quotient, pair_faces, vertex_cell, QuotientComplex, QuotientError};

#[derive(Debug, Error)]
pub enum BorelSerreError {
    #[error("no stabiliser generators supplied for cusp orbit {0}")]
    MissingGenerators(usize),
    #[error("generators for {0:?} do not fix the cusp or do not generate its stabiliser")]
    BadGenerators(CuspPoint),
    #[error("cusp data inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspStabiliserGens {
    pub cusp: CuspPoint,
    pub gamma_x: GroupElement,
    pub gamma_y: GroupElement,
}

/// `sigma` with `sigma(cusp) = infinity`; the identity at infinity.
pub fn cusp_conjugator(ring: &Ring, cusp: &CuspPoint) -> GroupElement {
    if cusp.is_infinity() {
        return GroupElement::identity(ring.m);
    }
    let inv_mu = cusp.mu.inv().expect("finite cusp has mu != 0");
    GroupElement::new(ring.zero(), inv_mu, -&cusp.mu, cusp.lambda.clone())
}

/// A basis of the translation lattice `sigma Stab(c) sigma^-1`, positively oriented.
pub fn cusp_lattice_basis(ring: &Ring, cusp: &CuspPoint) -> [AlgebraicNumber; 2] {
    if cusp.is_infinity() {
        return [ring.one(), ring.omega()];
    }
    let i = ring.cusp_ideal(cusp);
    let ib = ring.ideal_conj(&i);
    let sq = ring.ideal_mul(&ib, &ib);
    let n = Rational::from_integer(BigInt::from(i.norm()));
    let scale = Rational::one() / (&n * &n);
    let [b0, b1] = sq.basis();
    let u = ring.from_coords(b0.p, b0.q).scale(&scale);
    let mut v = ring.from_coords(b1.p, b1.q).scale(&scale);
    if cross(&u, &v).is_negative() {
        v = -v;
    }
    [u, v]
}

fn stabiliser_element(ring: &Ring, cusp: &CuspPoint, t: &AlgebraicNumber) -> GroupElement {
    let s = cusp_conjugator(ring, cusp);
    s.inverse().mul(&GroupElement::translation(t)).mul(&s)
}

/// Generators of the stabiliser of `cusp` in `SL2(O)` modulo `±1`, from a
/// positively oriented basis of its translation lattice.
pub fn cusp_stabiliser_gens_with_basis(ring: &Ring, cusp: &CuspPoint, basis: &[AlgebraicNumber; 2]) -> CuspStabiliserGens {
    CuspStabiliserGens {
        cusp: cusp.clone(),
        gamma_x: stabiliser_element(ring, cusp, &basis[0]),
        gamma_y: stabiliser_element(ring, cusp, &basis[1]),
    }
}

pub fn cusp_stabiliser_gens(ring: &Ring, cusp: &CuspPoint) -> CuspStabiliserGens {
    cusp_stabiliser_gens_with_basis(ring, cusp, &cusp_lattice_basis(ring, cusp))
}

/// Reads the translation vectors back from a generator pair and checks them.
fn translation_basis(ring: &Ring, g: &CuspStabiliserGens) -> Result<[AlgebraicNumber; 2], BorelSerreError> {
    let s = cusp_conjugator(ring, &g.cusp);
    let sinv = s.inverse();
    let mut out = Vec::new();
    for h in [&g.gamma_x, &g.gamma_y] {
        if !h.in_sl2(ring) {
            return Err(BorelSerreError::BadGenerators(g.cusp.clone()));
        }
        let mut t = s.mul(h).mul(&sinv);
        if t.a == -&ring.one() {
            t = t.neg();
        }
        if !(t.a == ring.one() && t.d == ring.one() && t.c.is_zero()) {
            return Err(BorelSerreError::BadGenerators(g.cusp.clone()));
        }
        out.push(t.b);
    }
    let basis = [out[0].clone(), out[1].clone()];
    // they must span the full lattice, with positive orientation
    let full = cusp_lattice_basis(ring, &g.cusp);
    if cross(&basis[0], &basis[1]) != cross(&full[0], &full[1]) {
        return Err(BorelSerreError::BadGenerators(g.cusp.clone()));
    }
    Ok(basis)
}

fn lattice_coords(basis: &[AlgebraicNumber; 2], t: &AlgebraicNumber) -> Option<(i64, i64)> {
    let det = cross(&basis[0], &basis[1]);
    let a = cross(t, &basis[1]) / &det;
    let b = cross(&basis[0], t) / &det;
    if a.is_integer() && b.is_integer() {
        Some((a.to_integer().to_i64()?, b.to_integer().to_i64()?))
    } else {
        None
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusBlock {
    /// Index into the quotient's cusp orbit list.
    pub cusp_orbit: usize,
    /// The cusp vertex representing the orbit.
    pub cusp: CuspPoint,
    pub gens: CuspStabiliserGens,
    /// Translation vectors of `gamma_x`, `gamma_y` after conjugation to infinity.
    pub basis: [AlgebraicNumber; 2],
    pub vertex: usize,
    pub edge_x: usize,
    pub edge_y: usize,
    pub cell2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopEdge {
    pub face_orbit: usize,
    pub torus: usize,
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompactifiedComplex {
    pub ring: Ring,
    pub complex: ChainComplex,
    pub tori: Vec<TorusBlock>,
    pub top_edges: Vec<TopEdge>,
    /// `(edge orbit, torus)` for every truncated edge end.
    pub truncated: Vec<(usize, usize)>,
    /// Coefficient of each torus 2-cell in the boundary of the 3-cell, read
    /// off from the cusp cross-sections of the polyhedron.
    #[serde(with = "crate::number_field::rational_vec_str")]
    pub cusp_coefficients: Vec<Rational>,
    pub vertex_labels: Vec<String>,
    pub edge_labels: Vec<String>,
    pub face_labels: Vec<String>,
    pub interior_vertices: usize,
    pub interior_edges: usize,
    pub interior_faces: usize,
}

impl CompactifiedComplex {
    pub fn cusp_count(&self) -> usize {
        self.tori.len()
    }
}

/// Group elements carrying each vertex cell to its orbit representative.
fn vertex_elements(poly: &FundamentalPolyhedron, q: &QuotientComplex) -> Vec<GroupElement> {
    let mut out = vec![GroupElement::identity(poly.ring.m); poly.vertex_count()];
    for o in &q.vertex_orbits {
        for mm in &o.members {
            out[mm.cell] = mm.element.clone();
        }
    }
    out
}

struct CuspFrame<'a> {
    poly: &'a FundamentalPolyhedron,
    q: &'a QuotientComplex,
    k: Vec<GroupElement>,
    /// Conjugator per cusp orbit (indexed like `q.cusp_orbits`).
    sigma: Vec<GroupElement>,
}

impl CuspFrame<'_> {
    fn torus_of(&self, c: VertexRef) -> usize {
        let o = self.q.vertex_orbit_of[vertex_cell(self.poly, c)];
        self.q.cusp_orbits.iter().position(|&x| x == o).expect("cusp vertex lies in a cusp orbit")
    }

    /// Position over the horosphere at `c` of the vertical line to `other`.
    fn position(&self, c: VertexRef, other: VertexRef) -> Result<AlgebraicNumber, BorelSerreError> {
        let i = self.torus_of(c);
        let g = self.sigma[i].mul(&self.k[vertex_cell(self.poly, c)]);
        match g.act(&self.poly.boundary_point(other)) {
            BoundaryPoint::Finite { z, .. } => Ok(z),
            BoundaryPoint::Infinity => Err(BorelSerreError::Inconsistent("edge with both ends at one cusp".into())),
        }
    }
}

/// The vertex cell at the other end of `e` from position `j`.
fn ends(poly: &FundamentalPolyhedron, e: usize) -> [VertexRef; 2] {
    poly.edges[e].ends
}

/// Builds `Y` from the quotient and one generator pair per cusp orbit.
pub fn attach_tori(
    poly: &FundamentalPolyhedron,
    q: &QuotientComplex,
    gens: &[CuspStabiliserGens],
) -> Result<CompactifiedComplex, BorelSerreError> {
    let ring = poly.ring;
    let h = q.cusp_orbits.len();
    let mut reps = Vec::with_capacity(h);
    for (i, &o) in q.cusp_orbits.iter().enumerate() {
        let rep = q.vertex_orbits[o].representative;
        let VertexRef::Cusp(j) = crate::quotient_cw::vertex_ref(poly, rep) else {
            return Err(BorelSerreError::Inconsistent("cusp orbit without cusp representative".into()));
        };
        let cusp = poly.cusp_vertices[j].clone();
        let g = gens.iter().find(|g| g.cusp == cusp).ok_or(BorelSerreError::MissingGenerators(i))?;
        reps.push((cusp, g.clone()));
    }
    let bases: Vec<[AlgebraicNumber; 2]> =
        reps.iter().map(|(_, g)| translation_basis(&ring, g)).collect::<Result<_, _>>()?;
    let frame = CuspFrame {
        poly,
        q,
        k: vertex_elements(poly, q),
        sigma: reps.iter().map(|(c, _)| cusp_conjugator(&ring, c)).collect(),
    };

    // cell numbering
    let is_cusp_orbit: Vec<Option<usize>> = (0..q.vertex_orbits.len())
        .map(|o| q.cusp_orbits.iter().position(|&x| x == o))
        .collect();
    let mut c0_index = vec![0usize; q.vertex_orbits.len()];
    let mut vertex_labels = Vec::new();
    for (o, c) in is_cusp_orbit.iter().enumerate() {
        if c.is_none() {
            c0_index[o] = vertex_labels.len();
            vertex_labels.push(format!("v{}", vertex_labels.len()));
        }
    }
    let interior_vertices = vertex_labels.len();
    for (o, c) in is_cusp_orbit.iter().enumerate() {
        if let Some(i) = c {
            c0_index[o] = interior_vertices + i;
        }
    }
    for i in 0..h {
        vertex_labels.push(format!("T{}.pt", i));
    }
    let interior_edges = q.edge_orbits.len();
    let interior_faces = q.face_orbits.len();
    let mut edge_labels: Vec<String> = (0..interior_edges).map(|k| format!("e{}", k)).collect();
    let mut face_labels: Vec<String> = (0..interior_faces).map(|k| format!("f{}", k)).collect();
    let mut tori = Vec::new();
    for (i, (cusp, g)) in reps.iter().enumerate() {
        edge_labels.push(format!("x{}", i));
        edge_labels.push(format!("y{}", i));
        face_labels.push(format!("T{}", i));
        tori.push(TorusBlock {
            cusp_orbit: i,
            cusp: cusp.clone(),
            gens: g.clone(),
            basis: bases[i].clone(),
            vertex: interior_vertices + i,
            edge_x: interior_edges + 2 * i,
            edge_y: interior_edges + 2 * i + 1,
            cell2: interior_faces + i,
        });
    }
    let n0 = interior_vertices + h;
    let n1 = interior_edges + 2 * h;
    let n2 = interior_faces + h;

    // anchors: (edge orbit, end of the representative) -> position
    let mut anchor: std::collections::HashMap<(usize, usize), AlgebraicNumber> = Default::default();
    let mut truncated = Vec::new();
    for (eo, orbit) in q.edge_orbits.iter().enumerate() {
        let e = ends(poly, orbit.representative);
        for j in 0..2 {
            if let VertexRef::Cusp(_) = e[j] {
                anchor.insert((eo, j), frame.position(e[j], e[1 - j])?);
                truncated.push((eo, frame.torus_of(e[j])));
            }
        }
    }
    // lattice offset of edge `e` at its end `c`
    let offset = |e: usize, c: VertexRef| -> Result<(usize, AlgebraicNumber), BorelSerreError> {
        let en = ends(poly, e);
        let j = if en[0] == c { 0 } else { 1 };
        let (eo, sign) = q.edge_orbit_of[e];
        let jr = if sign == 1 { j } else { 1 - j };
        let p = frame.position(c, en[1 - j])?;
        let a = anchor.get(&(eo, jr)).ok_or_else(|| BorelSerreError::Inconsistent("missing anchor".into()))?;
        Ok((frame.torus_of(c), &p - a))
    };

    let mut d1 = IntMatrix::zeros(n0, n1);
    for (eo, b) in q.edge_boundary.iter().enumerate() {
        for &(vo, coeff) in b {
            d1.add_to(c0_index[vo], eo, &BigInt::from(coeff));
        }
    }
    let mut d2 = IntMatrix::zeros(n1, n2);
    let mut top_edges = Vec::new();
    for (fo, b) in q.face_boundary.iter().enumerate() {
        for &(eo, coeff) in b {
            d2.add_to(eo, fo, &BigInt::from(coeff));
        }
        let f = &poly.faces[q.face_orbits[fo].representative];
        let n = f.cycle.len();
        for k in 0..n {
            let c = f.cycle[k];
            if !matches!(c, VertexRef::Cusp(_)) {
                continue;
            }
            let e_in = f.edges[(k + n - 1) % n].0;
            let e_out = f.edges[k].0;
            let (i, t_in) = offset(e_in, c)?;
            let (_, t_out) = offset(e_out, c)?;
            let (a, bb) = lattice_coords(&bases[i], &(&t_out - &t_in)).ok_or_else(|| {
                BorelSerreError::Inconsistent(format!("top side of face orbit {} is not a lattice vector", fo))
            })?;
            d2.add_to(tori[i].edge_x, fo, &BigInt::from(a));
            d2.add_to(tori[i].edge_y, fo, &BigInt::from(bb));
            top_edges.push(TopEdge { face_orbit: fo, torus: i, a, b: bb });
        }
    }

    // cross-section areas: sum over all faces and their cusp corners
    let mut area2 = vec![Rational::zero(); h];
    for f in &poly.faces {
        let n = f.cycle.len();
        for k in 0..n {
            let c = f.cycle[k];
            if !matches!(c, VertexRef::Cusp(_)) {
                continue;
            }
            let p_in = frame.position(c, f.cycle[(k + n - 1) % n])?;
            let p_out = frame.position(c, f.cycle[(k + 1) % n])?;
            area2[frame.torus_of(c)] += cross(&p_out, &p_in);
        }
    }
    let cusp_coefficients: Vec<Rational> = (0..h)
        .map(|i| &area2[i] / (cross(&bases[i][0], &bases[i][1]) * Rational::from_integer(BigInt::from(2))))
        .collect();
    let mut d3 = IntMatrix::zeros(n2, 1);
    for &(fo, coeff) in &q.cell3_boundary {
        d3.add_to(fo, 0, &BigInt::from(coeff));
    }
    for (i, c) in cusp_coefficients.iter().enumerate() {
        if !c.is_integer() {
            return Err(BorelSerreError::Inconsistent(format!("cusp cross-section {} covers {} tori", i, c)));
        }
        d3.add_to(tori[i].cell2, 0, &c.to_integer());
    }
    let complex = ChainComplex::new(vec![n0, n1, n2, 1], vec![d1, d2, d3]);
    Ok(CompactifiedComplex {
        ring,
        complex,
        tori,
        top_edges,
        truncated,
        cusp_coefficients,
        vertex_labels,
        edge_labels,
        face_labels,
        interior_vertices,
        interior_edges,
        interior_faces,
    })
}

/// Sublattice of `Z^2` of coefficient pairs `(a, b)` with `a x_i + b y_i` a boundary in `Y`.
pub fn dying_lattice(c: &CompactifiedComplex, torus: usize) -> Vec<Vec<BigInt>> {
    let t = &c.tori[torus];
    let n1 = c.complex.dims[1];
    let mut g = IntMatrix::zeros(n1, 2);
    g.set(t.edge_x, 0, BigInt::one());
    g.set(t.edge_y, 1, BigInt::one());
    preimage_lattice(&g, &c.complex.boundary(2))
}

/// Chooses the basis at each non-principal cusp so that `gamma_x` is the
/// generator whose torus loop bounds; infinity keeps `(1, omega)`.
fn adapted_gens(ring: &Ring, c: &CompactifiedComplex) -> Vec<CuspStabiliserGens> {
    c.tori
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.cusp.is_infinity() {
                return t.gens.clone();
            }
            let l = dying_lattice(c, i);
            if l.len() != 1 {
                return t.gens.clone();
            }
            let (p, q) = (&l[0][0], &l[0][1]);
            let e = p.extended_gcd(q);
            if !e.gcd.is_one() {
                return t.gens.clone();
            }
            // p s - q r = 1 with (r, s) = (-y, x) from x p + y q = 1
            let (r, s) = (-&e.y, e.x.clone());
            let [w1, w2] = &t.basis;
            let combo = |a: &BigInt, b: &BigInt| {
                &w1.scale(&Rational::from_integer(a.clone())) + &w2.scale(&Rational::from_integer(b.clone()))
            };
            let basis = [combo(p, q), combo(&r, &s)];
            cusp_stabiliser_gens_with_basis(ring, &t.cusp, &basis)
        })
        .collect()
}

/// The full construction: pairings, quotient, and tori with adapted bases.
pub fn compactify(poly: &FundamentalPolyhedron) -> Result<(QuotientComplex, CompactifiedComplex), BorelSerreError> {
    let pairings = pair_faces(poly)?;
    let q = build_quotient(poly, &pairings)?;
    let provisional: Vec<CuspStabiliserGens> = q
        .cusp_orbits
        .iter()
        .map(|&o| {
            let rep = q.vertex_orbits[o].representative;
            let VertexRef::Cusp(j) = crate::quotient_cw::vertex_ref(poly, rep) else { unreachable!() };
            cusp_stabiliser_gens(&poly.ring, &poly.cusp_vertices[j])
        })
        .collect();
    let first = attach_tori(poly, &q, &provisional)?;
    let gens = adapted_gens(&poly.ring, &first);
    let y = attach_tori(poly, &q, &gens)?;
    Ok((q, y))
}

/// The boundary `∂Y` as a sub-complex: the torus cells and their indices in `Y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySubcomplex {
    pub complex: ChainComplex,
    /// For each degree, the index in `Y` of each cell of `∂Y`.
    pub inclusion: Vec<Vec<usize>>,
}

pub fn boundary_subcomplex(c: &CompactifiedComplex) -> BoundarySubcomplex {
    let h = c.tori.len();
    let inclusion = vec![
        c.tori.iter().map(|t| t.vertex).collect::<Vec<_>>(),
        c.tori.iter().flat_map(|t| [t.edge_x, t.edge_y]).collect(),
        c.tori.iter().map(|t| t.cell2).collect(),
    ];
    let complex = ChainComplex::new(vec![h, 2 * h, h], vec![IntMatrix::zeros(h, 2 * h), IntMatrix::zeros(2 * h, h)]);
    BoundarySubcomplex { complex, inclusion }
}
