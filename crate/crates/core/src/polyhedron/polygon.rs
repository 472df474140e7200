//! Exact convex polygons in the `z`-plane.
//!
//! A point `a + b sqrt(-m)` is drawn at plane coordinates `(a, b)`. Affine
//! notions (lines, convexity, orientation, area ratios) do not depend on the
//! `sqrt(m)` scaling of the second axis, so everything here works on `(a, b)`.

use num_traits::{Signed, Zero};

use crate::number_field::{AlgebraicNumber, Rational};

pub type Pt = AlgebraicNumber;

/// Cross product of `u` and `v` in `(a, b)` coordinates.
pub fn cross(u: &Pt, v: &Pt) -> Rational {
    &u.a * &v.b - &u.b * &v.a
}

/// Twice the signed area of the triangle `p q r` (positive when counter-clockwise).
pub fn orient(p: &Pt, q: &Pt, r: &Pt) -> Rational {
    cross(&(q - p), &(r - p))
}

/// The closed half-plane `ca * a + cb * b + c0 <= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub ca: Rational,
    pub cb: Rational,
    pub c0: Rational,
}

impl HalfPlane {
    pub fn eval(&self, p: &Pt) -> Rational {
        &self.ca * &p.a + &self.cb * &p.b + &self.c0
    }

    pub fn complement(&self) -> HalfPlane {
        HalfPlane { ca: -&self.ca, cb: -&self.cb, c0: -&self.c0 }
    }

    /// Half-plane to the left of the directed line `p -> q`.
    pub fn left_of(p: &Pt, q: &Pt) -> HalfPlane {
        // orient(p, q, z) >= 0  <=>  -orient <= 0
        let d = q - p;
        // orient = d.a (z.b - p.b) - d.b (z.a - p.a)
        HalfPlane {
            ca: d.b.clone(),
            cb: -&d.a,
            c0: &d.a * &p.b - &d.b * &p.a,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.ca.is_zero() && self.cb.is_zero()
    }
}

pub fn area2(poly: &[Pt]) -> Rational {
    let n = poly.len();
    let mut s = Rational::zero();
    for i in 0..n {
        s += cross(&poly[i], &poly[(i + 1) % n]);
    }
    s
}

pub fn clip(poly: &[Pt], h: &HalfPlane) -> Vec<Pt> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let vals: Vec<Rational> = poly.iter().map(|p| h.eval(p)).collect();
    let mut out: Vec<Pt> = Vec::with_capacity(n + 2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (fp, fq) = (&vals[i], &vals[j]);
        if !fp.is_positive() {
            out.push(poly[i].clone());
        }
        if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
            let t = fp / (fp - fq);
            let d = &poly[j] - &poly[i];
            out.push(&poly[i] + &d.scale(&t));
        }
    }
    simplify(out)
}

/// Removes repeated and collinear vertices; returns an empty vector for a
/// polygon of zero area.
pub fn simplify(mut poly: Vec<Pt>) -> Vec<Pt> {
    poly.dedup();
    while poly.len() > 1 && poly.first() == poly.last() {
        poly.pop();
    }
    loop {
        let n = poly.len();
        if n < 3 {
            return Vec::new();
        }
        let mut removed = false;
        for i in 0..n {
            let prev = &poly[(i + n - 1) % n];
            let next = &poly[(i + 1) % n];
            if orient(prev, &poly[i], next).is_zero() {
                poly.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    if poly.len() < 3 || area2(&poly).is_zero() {
        return Vec::new();
    }
    poly
}

pub fn clip_many<'a>(poly: &[Pt], hs: impl IntoIterator<Item = &'a HalfPlane>) -> Vec<Pt> {
    let mut cur = poly.to_vec();
    for h in hs {
        if cur.is_empty() {
            break;
        }
        cur = clip(&cur, h);
    }
    cur
}

/// Intersection of two convex polygons, both counter-clockwise.
pub fn intersect(p: &[Pt], q: &[Pt]) -> Vec<Pt> {
    let n = q.len();
    let hs: Vec<HalfPlane> = (0..n).map(|i| HalfPlane::left_of(&q[i], &q[(i + 1) % n])).collect();
    clip_many(p, &hs)
}

pub fn make_ccw(mut poly: Vec<Pt>) -> Vec<Pt> {
    if area2(&poly).is_negative() {
        poly.reverse();
    }
    poly
}

/// Rotates the cycle so it starts at its lexicographically least vertex.
pub fn canonical_rotation(mut poly: Vec<Pt>) -> Vec<Pt> {
    if let Some((k, _)) = poly.iter().enumerate().min_by(|x, y| x.1.lex_cmp(y.1)) {
        poly.rotate_left(k);
    }
    poly
}

/// Same vertex set (both are simple convex cycles).
pub fn same_vertex_set(p: &[Pt], q: &[Pt]) -> bool {
    p.len() == q.len() && p.iter().all(|v| q.contains(v))
}

/// True when `v` lies strictly between `p` and `q` on the segment `pq`.
pub fn strictly_inside_segment(p: &Pt, q: &Pt, v: &Pt) -> bool {
    if !orient(p, q, v).is_zero() || v == p || v == q {
        return false;
    }
    let d = q - p;
    let w = v - p;
    let t_num = &d.a * &w.a + &d.b * &w.b;
    let len2 = &d.a * &d.a + &d.b * &d.b;
    t_num.is_positive() && t_num < len2
}

/// Parameter of `v` along `p -> q` (assumes collinearity).
pub fn param_on_segment(p: &Pt, q: &Pt, v: &Pt) -> Rational {
    let d = q - p;
    let w = v - p;
    (&d.a * &w.a + &d.b * &w.b) / (&d.a * &d.a + &d.b * &d.b)
}

/// Closed point-in-convex-polygon test (counter-clockwise polygon).
pub fn contains_closed(poly: &[Pt], v: &Pt) -> bool {
    let n = poly.len();
    (0..n).all(|i| !orient(&poly[i], &poly[(i + 1) % n], v).is_negative())
}

pub fn contains_strict(poly: &[Pt], v: &Pt) -> bool {
    let n = poly.len();
    (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], v).is_positive())
}

/// Bounding box `(min, max)` in `(a, b)` coordinates.
pub fn bbox(poly: &[Pt]) -> (Rational, Rational, Rational, Rational) {
    let mut it = poly.iter();
    let first = it.next().expect("nonempty polygon");
    let (mut amin, mut amax, mut bmin, mut bmax) =
        (first.a.clone(), first.a.clone(), first.b.clone(), first.b.clone());
    for p in it {
        if p.a < amin {
            amin = p.a.clone();
        }
        if p.a > amax {
            amax = p.a.clone();
        }
        if p.b < bmin {
            bmin = p.b.clone();
        }
        if p.b > bmax {
            bmax = p.b.clone();
        }
    }
    (amin, amax, bmin, bmax)
}
