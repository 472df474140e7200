//! The Bianchi fundamental polyhedron.
//!
//! The polyhedron is the part of upper half-space lying above every
//! hemisphere `|mu z - lambda|^2 + N(mu) zeta^2 = 1` (with `(lambda, mu)`
//! coprime) and over a fundamental rectangle of the translation lattice `O`.
//! Seen from above, the floor is the power diagram of the hemisphere
//! shadows: the difference of two "heights squared" is affine in `z`, so all
//! cell boundaries project to straight segments and every computation below is
//! exact planar geometry over `Q`.

pub mod polygon;
mod floor;
mod cells;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::BoundaryPoint;
use crate::number_field::{
    floor_rat, int, rat, rational_str, AlgebraicNumber, CuspPoint, OmegaKind, Rational, Ring,
};
use polygon::Pt;

pub use cells::extract_cells;
pub use floor::{build_hemisphere_set, swan_terminated};

#[derive(Debug, Error)]
pub enum PolyhedronError {
    #[error("hemisphere list does not cover the period domain")]
    NotTerminated,
    #[error("face image does not land on the floor: {0}")]
    ImageNotOnFloor(String),
    #[error("cell refinement did not stabilise after {0} rounds")]
    RefinementDiverged(usize),
    #[error("inconsistent cell structure: {0}")]
    Inconsistent(String),
}

/// A point `(z, zeta)` of upper half-space, stored with `zeta^2`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub z: AlgebraicNumber,
    #[serde(with = "rational_str")]
    pub zeta_sq: Rational,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, zeta^2={})", self.z, self.zeta_sq)
    }
}

impl Point {
    pub fn new(z: AlgebraicNumber, zeta_sq: Rational) -> Self {
        Point { z, zeta_sq }
    }

    pub fn as_boundary_point(&self) -> BoundaryPoint {
        BoundaryPoint::Finite { z: self.z.clone(), zeta_sq: self.zeta_sq.clone() }
    }
}

/// The hemisphere centred at `lambda / mu` with radius `1 / |mu|`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hemisphere {
    pub lambda: AlgebraicNumber,
    pub mu: AlgebraicNumber,
    pub center: AlgebraicNumber,
    #[serde(with = "rational_str")]
    pub radius_sq: Rational,
}

impl fmt::Debug for Hemisphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{} / {}]", self.lambda, self.mu)
    }
}

impl Hemisphere {
    /// Normalises the sign of `(lambda, mu)` so that `mu` is lexicographically positive.
    pub fn new(lambda: AlgebraicNumber, mu: AlgebraicNumber) -> Self {
        let zero = AlgebraicNumber::zero(mu.m);
        let (lambda, mu) = if mu.lex_cmp(&zero).is_lt() { (-lambda, -mu) } else { (lambda, mu) };
        let center = lambda.checked_div(&mu).expect("mu must be nonzero");
        let radius_sq = Rational::one() / mu.norm();
        Hemisphere { lambda, mu, center, radius_sq }
    }

    pub fn translate(&self, t: &AlgebraicNumber) -> Self {
        Hemisphere::new(&self.lambda + &(t * &self.mu), self.mu.clone())
    }

    /// `zeta^2 - (radius^2 - |z - center|^2)`: negative strictly below.
    pub fn power(&self, z: &AlgebraicNumber) -> Rational {
        (z - &self.center).norm() - &self.radius_sq
    }

    /// Key identifying the hemisphere as a set.
    pub fn key(&self) -> (AlgebraicNumber, Rational) {
        (self.center.clone(), self.radius_sq.clone())
    }
}

/// Height squared of the hemisphere above `z`, when `z` lies strictly inside its shadow.
pub fn height_on(h: &Hemisphere, z: &AlgebraicNumber) -> Option<Rational> {
    let v = -h.power(z);
    v.is_positive().then_some(v)
}

/// True iff `p` lies on some hemisphere and no hemisphere passes strictly above it.
pub fn is_on_floor(p: &Point, hemispheres: &[Hemisphere]) -> bool {
    let mut on = false;
    for h in hemispheres {
        let hs = -h.power(&p.z);
        if hs > p.zeta_sq {
            return false;
        }
        if hs == p.zeta_sq {
            on = true;
        }
    }
    on
}

/// One side of the fundamental rectangle together with the lattice vector `t`
/// such that the side is shared with the translate `R + t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub from: AlgebraicNumber,
    pub to: AlgebraicNumber,
    pub translation: AlgebraicNumber,
}

/// The fundamental rectangle for the translations by `O`:
/// `-1/2 <= Re z <= 1/2` and `0 <= b <= b_max` for `z = a + b sqrt(-m)`,
/// with `b_max = 1` when `omega = sqrt(-m)` and `1/2` otherwise (a brick
/// layout whose top and bottom walls split at `a = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodDomain {
    pub ring: Ring,
    #[serde(with = "rational_str")]
    pub b_max: Rational,
}

impl PeriodDomain {
    pub fn new(ring: &Ring) -> Self {
        let b_max = match ring.omega_kind {
            OmegaKind::SqrtMinusM => int(1),
            OmegaKind::HalfOnePlusSqrt => rat(1, 2),
        };
        PeriodDomain { ring: *ring, b_max }
    }

    fn pt(&self, a: Rational, b: Rational) -> AlgebraicNumber {
        self.ring.elem(a, b)
    }

    pub fn is_brick(&self) -> bool {
        self.ring.omega_kind == OmegaKind::HalfOnePlusSqrt
    }

    /// Corner cycle, counter-clockwise, including the brick split points.
    pub fn boundary_vertices(&self) -> Vec<Pt> {
        let h = rat(1, 2);
        let mut v = vec![self.pt(-&h, int(0))];
        if self.is_brick() {
            v.push(self.pt(int(0), int(0)));
        }
        v.push(self.pt(h.clone(), int(0)));
        v.push(self.pt(h.clone(), self.b_max.clone()));
        if self.is_brick() {
            v.push(self.pt(int(0), self.b_max.clone()));
        }
        v.push(self.pt(-&h, self.b_max.clone()));
        v
    }

    /// The rectangle as a convex polygon (corners only).
    pub fn polygon(&self) -> Vec<Pt> {
        let h = rat(1, 2);
        vec![
            self.pt(-&h, int(0)),
            self.pt(h.clone(), int(0)),
            self.pt(h.clone(), self.b_max.clone()),
            self.pt(-&h, self.b_max.clone()),
        ]
    }

    pub fn sides(&self) -> Vec<Side> {
        let r = &self.ring;
        let w = r.omega();
        let one = r.one();
        let bv = self.boundary_vertices();
        let n = bv.len();
        let trans: Vec<AlgebraicNumber> = if self.is_brick() {
            vec![-&w, &one - &w, one.clone(), w.clone(), &w - &one, -&one]
        } else {
            vec![-&w, one.clone(), w.clone(), -&one]
        };
        (0..n)
            .map(|i| Side { from: bv[i].clone(), to: bv[(i + 1) % n].clone(), translation: trans[i].clone() })
            .collect()
    }

    pub fn contains_closed(&self, z: &AlgebraicNumber) -> bool {
        let h = rat(1, 2);
        z.a >= -&h && z.a <= h && !z.b.is_negative() && z.b <= self.b_max
    }

    /// Half-open membership: left and bottom walls closed, right and top open.
    pub fn contains_half_open(&self, z: &AlgebraicNumber) -> bool {
        let h = rat(1, 2);
        z.a >= -&h && z.a < h && !z.b.is_negative() && z.b < self.b_max
    }

    pub fn center(&self) -> AlgebraicNumber {
        self.pt(int(0), &self.b_max / int(2))
    }

    /// Squared distance (in the norm metric) from the center to a corner.
    pub fn circumradius_sq(&self) -> Rational {
        let hb = &self.b_max / int(2);
        rat(1, 4) + int(self.ring.m) * &hb * &hb
    }

    pub fn area_over_sqrt_m(&self) -> Rational {
        self.b_max.clone()
    }

    /// The lattice vector `t` with `z - t` in the half-open rectangle.
    pub fn reduction(&self, z: &AlgebraicNumber) -> AlgebraicNumber {
        let r = &self.ring;
        match r.omega_kind {
            OmegaKind::SqrtMinusM => {
                let j = floor_rat(&z.b);
                let i = floor_rat(&(&z.a + rat(1, 2)));
                r.from_coords(i, j)
            }
            OmegaKind::HalfOnePlusSqrt => {
                let j = floor_rat(&(&z.b * int(2)));
                let a = &z.a - rat(j, 2);
                let i = floor_rat(&(a + rat(1, 2)));
                r.from_coords(i, j)
            }
        }
    }

    pub fn reduce(&self, z: &AlgebraicNumber) -> AlgebraicNumber {
        z - &self.reduction(z)
    }

    /// Lattice vectors `t` for which `R + t` can meet the box `[amin, amax] x [bmin, bmax]`.
    pub fn translates_meeting_box(
        &self,
        amin: &Rational,
        amax: &Rational,
        bmin: &Rational,
        bmax: &Rational,
    ) -> Vec<AlgebraicNumber> {
        let r = &self.ring;
        let mut out = Vec::new();
        let jden = if self.is_brick() { 2 } else { 1 };
        let jlo = floor_rat(&(bmin * int(jden))) - 1;
        let jhi = floor_rat(&(bmax * int(jden))) + 1;
        for j in jlo..=jhi {
            let shift = if self.is_brick() { rat(j, 2) } else { int(0) };
            let ilo = floor_rat(&(amin - &shift)) - 1;
            let ihi = floor_rat(&(amax - &shift)) + 2;
            for i in ilo..=ihi {
                let t = r.from_coords(i, j);
                let tb = &t.b;
                let ta = &t.a;
                let lo_a = ta - rat(1, 2);
                let hi_a = ta + rat(1, 2);
                let lo_b = tb.clone();
                let hi_b = tb + &self.b_max;
                if hi_a < *amin || lo_a > *amax || hi_b < *bmin || lo_b > *bmax {
                    continue;
                }
                out.push(t);
            }
        }
        out
    }

    /// Squared norm-distance from `z` to the closed rectangle.
    pub fn dist_sq(&self, z: &AlgebraicNumber) -> Rational {
        dist_sq_to_box(&self.ring, z, &rat(-1, 2), &rat(1, 2), &int(0), &self.b_max)
    }

    /// Images of a boundary point under the side pairings (the point itself excluded).
    pub fn wall_images(&self, z: &AlgebraicNumber) -> Vec<AlgebraicNumber> {
        let mut out = Vec::new();
        for s in self.sides() {
            if on_segment_closed(&s.from, &s.to, z) {
                let w = z - &s.translation;
                if &w != z && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }
}

fn on_segment_closed(p: &Pt, q: &Pt, v: &Pt) -> bool {
    v == p || v == q || polygon::strictly_inside_segment(p, q, v)
}

pub(crate) fn dist_sq_to_box(
    ring: &Ring,
    z: &AlgebraicNumber,
    amin: &Rational,
    amax: &Rational,
    bmin: &Rational,
    bmax: &Rational,
) -> Rational {
    let clamp = |x: &Rational, lo: &Rational, hi: &Rational| -> Rational {
        if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            Rational::zero()
        }
    };
    let da = clamp(&z.a, amin, amax);
    let db = clamp(&z.b, bmin, bmax);
    &da * &da + int(ring.m) * &db * &db
}

/// Rational upper bound for `sqrt(x)`, within about `1/1024`.
pub(crate) fn sqrt_upper(x: &Rational) -> Rational {
    if !x.is_positive() {
        return Rational::zero();
    }
    let mut s = if *x > Rational::one() { x.clone() } else { Rational::one() };
    let grid = int(1024);
    for _ in 0..8 {
        let next = (&s + x / &s) / int(2);
        // round up onto the 1/1024 grid; stays an upper bound
        let up = (&next * &grid).ceil() / &grid;
        if up >= s {
            break;
        }
        s = up;
    }
    s
}

/// All coprime `(lambda, mu)` with `radius_sq >= min_radius_sq`, one per class
/// modulo translation by `O`, each centred in the half-open period domain.
pub fn enumerate_hemispheres(ring: &Ring, min_radius_sq: &Rational) -> Vec<Hemisphere> {
    assert!(min_radius_sq.is_positive());
    let domain = PeriodDomain::new(ring);
    let max_norm = floor_rat(&(Rational::one() / min_radius_sq));
    let mut out: Vec<Hemisphere> = Vec::new();
    let zero = ring.zero();
    for mu in ring.elements_near(&zero, &int(max_norm)) {
        if mu.is_zero() || mu.lex_cmp(&zero).is_lt() {
            continue;
        }
        let n = mu.norm();
        let center = &domain.center() * &mu;
        let bound = domain.circumradius_sq() * &n;
        for lam in ring.elements_near(&center, &bound) {
            let c = lam.checked_div(&mu).expect("nonzero");
            if !domain.contains_half_open(&c) {
                continue;
            }
            if !coprime(ring, &lam, &mu) {
                continue;
            }
            out.push(Hemisphere::new(lam, mu.clone()));
        }
    }
    sort_hemispheres(&mut out);
    out
}

pub(crate) fn sort_hemispheres(hs: &mut Vec<Hemisphere>) {
    hs.sort_by(|x, y| {
        y.radius_sq
            .cmp(&x.radius_sq)
            .then_with(|| x.center.lex_cmp(&y.center))
    });
    hs.dedup_by(|x, y| x.key() == y.key());
}

pub fn coprime(ring: &Ring, lambda: &AlgebraicNumber, mu: &AlgebraicNumber) -> bool {
    ring.ideal_of(&[lambda.clone(), mu.clone()]).map(|i| i.is_unit()).unwrap_or(false)
}

/// Reference to a vertex of the polyhedron closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexRef {
    Finite(usize),
    Cusp(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeCarrier {
    /// A geodesic arc on the floor, above a straight segment of the rectangle.
    Floor,
    /// A vertical half-line above a point of the rectangle boundary, ending at infinity.
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub ends: [VertexRef; 2],
    pub carrier: EdgeCarrier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceCarrier {
    Hemisphere(Hemisphere),
    /// Index into [`PeriodDomain::sides`].
    Wall(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    /// Vertex cycle oriented by the outward normal of the polyhedron.
    pub cycle: Vec<VertexRef>,
    /// `(edge index, +1 | -1)` along the cycle.
    pub edges: Vec<(usize, i32)>,
    pub carrier: FaceCarrier,
}

/// The polyhedron as a cell structure on its closure, cusps included.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FundamentalPolyhedron {
    pub ring: Ring,
    pub domain: PeriodDomain,
    pub hemispheres: Vec<Hemisphere>,
    pub vertices: Vec<Point>,
    /// Index 0 is always the cusp at infinity.
    pub cusp_vertices: Vec<CuspPoint>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
}

impl FundamentalPolyhedron {
    pub fn boundary_point(&self, v: VertexRef) -> BoundaryPoint {
        match v {
            VertexRef::Finite(i) => self.vertices[i].as_boundary_point(),
            VertexRef::Cusp(i) => match self.cusp_vertices[i].value() {
                None => BoundaryPoint::Infinity,
                Some(z) => BoundaryPoint::Finite { z, zeta_sq: Rational::zero() },
            },
        }
    }

    /// Looks a point up among the vertices.
    pub fn find_vertex(&self, p: &BoundaryPoint) -> Option<VertexRef> {
        match p {
            BoundaryPoint::Infinity => Some(VertexRef::Cusp(0)),
            BoundaryPoint::Finite { z, zeta_sq } => {
                if zeta_sq.is_zero() {
                    self.cusp_vertices
                        .iter()
                        .position(|c| c.value().as_ref() == Some(z))
                        .map(VertexRef::Cusp)
                } else {
                    self.vertices
                        .iter()
                        .position(|v| &v.z == z && &v.zeta_sq == zeta_sq)
                        .map(VertexRef::Finite)
                }
            }
        }
    }

    pub fn find_edge(&self, u: VertexRef, v: VertexRef) -> Option<(usize, i32)> {
        self.edges.iter().enumerate().find_map(|(i, e)| {
            if e.ends == [u, v] {
                Some((i, 1))
            } else if e.ends == [v, u] {
                Some((i, -1))
            } else {
                None
            }
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() + self.cusp_vertices.len()
    }

    /// `V - E + F` of the boundary sphere, which must equal 2.
    pub fn euler_characteristic_of_boundary(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Carriers crossing the imaginary plane `Re z = 0`: for every floor face
    /// meeting that line in a segment, the hemisphere and the `b`-interval.
    pub fn imaginary_plane_arcs(&self) -> Vec<(Hemisphere, Rational, Rational)> {
        let mut out = Vec::new();
        for f in &self.faces {
            let FaceCarrier::Hemisphere(h) = &f.carrier else { continue };
            let pts: Vec<Pt> = f.cycle.iter().filter_map(|v| self.boundary_point(*v).z().cloned()).collect();
            if let Some((lo, hi)) = polygon_line_a0(&pts) {
                out.push((h.clone(), lo, hi));
            }
        }
        out.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.2.cmp(&y.2)));
        // faces split along the imaginary axis contribute the same arc twice
        out.dedup_by(|x, y| x.0.key() == y.0.key() && x.1 == y.1 && x.2 == y.2);
        merge_arcs(out)
    }
}

fn merge_arcs(arcs: Vec<(Hemisphere, Rational, Rational)>) -> Vec<(Hemisphere, Rational, Rational)> {
    let mut out: Vec<(Hemisphere, Rational, Rational)> = Vec::new();
    for a in arcs {
        if let Some(last) = out.last_mut() {
            if last.0.key() == a.0.key() && last.2 == a.1 {
                last.2 = a.2;
                continue;
            }
        }
        out.push(a);
    }
    out
}

/// Intersection of a convex polygon with the line `a = 0`, as a `b`-interval of positive length.
pub(crate) fn polygon_line_a0(pts: &[Pt]) -> Option<(Rational, Rational)> {
    let n = pts.len();
    let mut bs: Vec<Rational> = Vec::new();
    for i in 0..n {
        let p = &pts[i];
        let q = &pts[(i + 1) % n];
        if p.a.is_zero() {
            bs.push(p.b.clone());
        }
        if (p.a.is_negative() && q.a.is_positive()) || (p.a.is_positive() && q.a.is_negative()) {
            let t = &p.a / (&p.a - &q.a);
            bs.push(&p.b + &(&q.b - &p.b) * t);
        }
    }
    let lo = bs.iter().min()?.clone();
    let hi = bs.iter().max()?.clone();
    (lo < hi).then_some((lo, hi))
}
