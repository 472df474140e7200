//! Elements of `SL2(K)` and their action on the closure of upper half-space.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::number_field::{AlgebraicNumber, CuspPoint, Rational, Ring};

/// A 2x2 matrix `[[a, b], [c, d]]` over `K`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: AlgebraicNumber,
    pub b: AlgebraicNumber,
    pub c: AlgebraicNumber,
    pub d: AlgebraicNumber,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point of `H` or of its boundary `C ∪ {∞}`.
///
/// `Finite { zeta_sq: 0 }` is a point of the sphere at infinity (a cusp when
/// `z` lies in `K`).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite {
        z: AlgebraicNumber,
        #[serde(with = "crate::number_field::rational_str")]
        zeta_sq: Rational,
    },
    Infinity,
}

impl BoundaryPoint {
    pub fn is_cusp(&self) -> bool {
        match self {
            BoundaryPoint::Infinity => true,
            BoundaryPoint::Finite { zeta_sq, .. } => zeta_sq.is_zero(),
        }
    }

    pub fn z(&self) -> Option<&AlgebraicNumber> {
        match self {
            BoundaryPoint::Finite { z, .. } => Some(z),
            BoundaryPoint::Infinity => None,
        }
    }
}

impl GroupElement {
    pub fn new(a: AlgebraicNumber, b: AlgebraicNumber, c: AlgebraicNumber, d: AlgebraicNumber) -> Self {
        GroupElement { a, b, c, d }
    }

    pub fn identity(m: i64) -> Self {
        let (o, z) = (AlgebraicNumber::one(m), AlgebraicNumber::zero(m));
        GroupElement::new(o.clone(), z.clone(), z, o)
    }

    /// `[[1, t], [0, 1]]`.
    pub fn translation(t: &AlgebraicNumber) -> Self {
        let m = t.m;
        GroupElement::new(
            AlgebraicNumber::one(m),
            t.clone(),
            AlgebraicNumber::zero(m),
            AlgebraicNumber::one(m),
        )
    }

    pub fn det(&self) -> AlgebraicNumber {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement::new(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    pub fn is_identity_up_to_sign(&self) -> bool {
        let m = self.a.m;
        *self == GroupElement::identity(m) || self.neg() == GroupElement::identity(m)
    }

    /// Equal in `PSL2`.
    pub fn eq_up_to_sign(&self, o: &GroupElement) -> bool {
        self == o || self.neg() == *o
    }

    pub fn in_sl2(&self, ring: &Ring) -> bool {
        self.det() == ring.one()
            && [&self.a, &self.b, &self.c, &self.d].iter().all(|x| ring.is_integer(x))
    }

    /// Canonical sign: first nonzero of `(c, d)` made "positive" lexicographically.
    pub fn normalized(&self) -> GroupElement {
        let key = if !self.c.is_zero() { &self.c } else { &self.d };
        let zero = AlgebraicNumber::zero(self.a.m);
        if key.lex_cmp(&zero) == std::cmp::Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Möbius action on a point of `H` or its boundary.
    pub fn act(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite {
                        z: self.a.checked_div(&self.c).expect("c nonzero"),
                        zeta_sq: Rational::zero(),
                    }
                }
            }
            BoundaryPoint::Finite { z, zeta_sq } => {
                let cz_d = &(&self.c * z) + &self.d;
                let den = cz_d.norm() + self.c.norm() * zeta_sq;
                if den.is_zero() {
                    return BoundaryPoint::Infinity;
                }
                let az_b = &(&self.a * z) + &self.b;
                let num = &(&az_b * &cz_d.conj()) + &(&self.a * &self.c.conj()).scale(zeta_sq);
                let inv = Rational::one() / &den;
                BoundaryPoint::Finite { z: num.scale(&inv), zeta_sq: zeta_sq * &inv * &inv }
            }
        }
    }

    pub fn act_on_cusp(&self, ring: &Ring, c: &CuspPoint) -> CuspPoint {
        let lam = &(&self.a * &c.lambda) + &(&self.b * &c.mu);
        let mu = &(&self.c * &c.lambda) + &(&self.d * &c.mu);
        if mu.is_zero() {
            return CuspPoint::infinity(ring.m);
        }
        ring.cusp_at(&lam.checked_div(&mu).expect("mu nonzero"))
    }

    /// The restriction of the action to the isometric sphere `|cz + d| = 1`,
    /// read in the `z`-plane: `z -> (a - conj(cz + d)) / c`. For `c = 0` the
    /// element is a translation and the formula is `z -> (az + b) / d`.
    pub fn sphere_map(&self, z: &AlgebraicNumber) -> AlgebraicNumber {
        if self.c.is_zero() {
            return (&(&self.a * z) + &self.b).checked_div(&self.d).expect("d nonzero");
        }
        let w = &(&self.c * z) + &self.d;
        (&self.a - &w.conj()).checked_div(&self.c).expect("c nonzero")
    }
}

/// An element of `SL2(O)` with bottom row `(mu, -lambda)`, whose isometric
/// sphere `|mu z - lambda| = 1` is the hemisphere over `lambda / mu`.
///
/// Needs `(lambda, mu)` coprime. The top-left entry `a` solves
/// `a lambda = -1 (mod mu)` and is found among residues `p + q omega` with
/// `0 <= p, q < N(mu)`.
pub fn isometric_sphere_element(ring: &Ring, lambda: &AlgebraicNumber, mu: &AlgebraicNumber) -> Option<GroupElement> {
    let n = ring.coords(&(&mu.conj() * mu))?.p;
    let minus_one = ring.from_int(-1);
    for p in 0..n.max(1) {
        for q in 0..n.max(1) {
            let a = ring.from_coords(p, q);
            let rest = &minus_one - &(&a * lambda);
            let Some(b) = rest.checked_div(mu) else { continue };
            if ring.is_integer(&b) {
                let g = GroupElement::new(a, b, mu.clone(), -lambda);
                debug_assert!(g.in_sl2(ring));
                return Some(g);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::{int, make_ring, rat};

    #[test]
    fn translation_and_inversion() {
        let r = make_ring(6).unwrap();
        let t = GroupElement::translation(&r.one());
        let p = BoundaryPoint::Finite { z: r.elem(rat(1, 3), rat(1, 5)), zeta_sq: rat(2, 7) };
        assert_eq!(
            t.act(&p),
            BoundaryPoint::Finite { z: r.elem(rat(4, 3), rat(1, 5)), zeta_sq: rat(2, 7) }
        );
        let s = GroupElement::new(r.zero(), r.from_int(-1), r.one(), r.zero());
        assert!(s.in_sl2(&r));
        let q = BoundaryPoint::Finite { z: r.zero(), zeta_sq: int(4) };
        assert_eq!(s.act(&q), BoundaryPoint::Finite { z: r.zero(), zeta_sq: rat(1, 4) });
        assert_eq!(s.act(&BoundaryPoint::Infinity), BoundaryPoint::Finite { z: r.zero(), zeta_sq: int(0) });
    }

    #[test]
    fn cusp_action() {
        let r = make_ring(6).unwrap();
        let inf = CuspPoint::infinity(6);
        assert!(GroupElement::identity(6).act_on_cusp(&r, &inf).is_infinity());
        assert!(GroupElement::translation(&r.omega()).act_on_cusp(&r, &inf).is_infinity());
        let s = GroupElement::new(r.zero(), r.from_int(-1), r.one(), r.zero());
        assert_eq!(s.act_on_cusp(&r, &inf).value(), Some(r.zero()));
    }

    #[test]
    fn sphere_map_agrees_with_action() {
        let r = make_ring(6).unwrap();
        // isometric sphere of g is centered at 1/2 with radius 1/2
        let g = GroupElement::new(r.one(), r.zero(), r.from_int(-2), r.one());
        let z = r.elem(rat(1, 2), rat(1, 10));
        let zeta_sq = rat(1, 4) - (&z - &r.elem(rat(1, 2), int(0))).norm();
        let img = g.act(&BoundaryPoint::Finite { z: z.clone(), zeta_sq: zeta_sq.clone() });
        match img {
            BoundaryPoint::Finite { z: w, zeta_sq: t } => {
                assert_eq!(t, zeta_sq);
                assert_eq!(w, g.sphere_map(&z));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn sphere_elements() {
        let r = make_ring(6).unwrap();
        let lam = &r.from_int(-1) + &r.omega();
        let mu = r.from_int(2);
        let g = isometric_sphere_element(&r, &lam, &mu).unwrap();
        assert!(g.in_sl2(&r));
        assert_eq!(g.c, mu);
        assert_eq!(g.d, -&lam);
        let r7 = make_ring(7).unwrap();
        let h = isometric_sphere_element(&r7, &r7.one(), &r7.omega()).unwrap();
        assert!(h.in_sl2(&r7));
    }
}
