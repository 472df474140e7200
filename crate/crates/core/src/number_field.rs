//! Exact arithmetic in an imaginary quadratic field `K = Q(sqrt(-m))`.
//!
//! Every field element is stored over the basis `{1, sqrt(-m)}` with rational
//! coordinates, whichever generator the ring of integers uses. Membership in
//! `O = Z[omega]` is a predicate ([`Ring::is_integer`]), not a type.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Serde adapter writing a rational as the string `"p/q"` (or `"p"`).
pub mod rational_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse::<Rational>().map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", s, e)))
    }
}

/// The same, for a list of rationals.
pub mod rational_vec_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.trim().parse::<Rational>().map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", s, e))))
            .collect()
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("m = {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("m = {0} is excluded: the Gaussian (m = 1) and Eisenstein (m = 3) integers carry units beyond {{+1, -1}}")]
    ExcludedUnits(i64),
    #[error("m must be a positive integer, got {0}")]
    NonPositive(i64),
}

/// Which generator `omega` gives `O = Z[omega]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaKind {
    /// `omega = sqrt(-m)`, for `m = 1, 2 (mod 4)`.
    SqrtMinusM,
    /// `omega = (1 + sqrt(-m)) / 2`, for `m = 3 (mod 4)`.
    HalfOnePlusSqrt,
}

/// The ring of integers of `Q(sqrt(-m))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    pub m: i64,
    pub omega_kind: OmegaKind,
    pub discriminant: i64,
}

fn is_squarefree(n: i64) -> bool {
    let mut k = 2i64;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

pub fn make_ring(m: i64) -> Result<Ring, FieldError> {
    if m <= 0 {
        return Err(FieldError::NonPositive(m));
    }
    if m == 1 || m == 3 {
        return Err(FieldError::ExcludedUnits(m));
    }
    if !is_squarefree(m) {
        return Err(FieldError::NotSquarefree(m));
    }
    let (omega_kind, discriminant) = if m % 4 == 3 {
        (OmegaKind::HalfOnePlusSqrt, -m)
    } else {
        (OmegaKind::SqrtMinusM, -4 * m)
    };
    Ok(Ring { m, omega_kind, discriminant })
}

/// `a + b sqrt(-m)` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraicNumber {
    #[serde(with = "rational_str")]
    pub a: Rational,
    #[serde(with = "rational_str")]
    pub b: Rational,
    pub m: i64,
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = |f: &mut fmt::Formatter<'_>, b: &Rational| {
            if b.is_one() {
                write!(f, "sqrt(-{})", self.m)
            } else {
                write!(f, "{}*sqrt(-{})", b, self.m)
            }
        };
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => {
                if self.b.is_negative() {
                    write!(f, "-")?;
                }
                root(f, &self.b.abs())
            }
            (false, false) => {
                write!(f, "{} {} ", self.a, if self.b.is_negative() { "-" } else { "+" })?;
                root(f, &self.b.abs())
            }
        }
    }
}

impl AlgebraicNumber {
    pub fn new(a: Rational, b: Rational, m: i64) -> Self {
        AlgebraicNumber { a, b, m }
    }

    pub fn zero(m: i64) -> Self {
        Self::new(Rational::zero(), Rational::zero(), m)
    }

    pub fn one(m: i64) -> Self {
        Self::new(Rational::one(), Rational::zero(), m)
    }

    pub fn from_int(n: i64, m: i64) -> Self {
        Self::new(int(n), Rational::zero(), m)
    }

    pub fn from_rational(r: Rational, m: i64) -> Self {
        Self::new(r, Rational::zero(), m)
    }

    /// `sqrt(-m)` itself.
    pub fn sqrt_neg(m: i64) -> Self {
        Self::new(Rational::zero(), Rational::one(), m)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -&self.b, self.m)
    }

    /// `a^2 + m b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a + int(self.m) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.a / &n, c.b / &n, self.m))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self * &i)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.a * r, &self.b * r, self.m)
    }

    /// Lexicographic order on `(a, b)`; used only for canonical ordering.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.a.cmp(&other.a).then_with(|| self.b.cmp(&other.b))
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        debug_assert_eq!(self.m, o.m);
        AlgebraicNumber::new(&self.a + &o.a, &self.b + &o.b, self.m)
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        debug_assert_eq!(self.m, o.m);
        AlgebraicNumber::new(&self.a - &o.a, &self.b - &o.b, self.m)
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, o: &AlgebraicNumber) -> AlgebraicNumber {
        debug_assert_eq!(self.m, o.m);
        let a = &self.a * &o.a - int(self.m) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        AlgebraicNumber::new(a, b, self.m)
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber::new(-&self.a, -&self.b, self.m)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $f(self, o: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

/// An element of `O` written as `p + q omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OCoords {
    pub p: i64,
    pub q: i64,
}

impl Ring {
    pub fn omega(&self) -> AlgebraicNumber {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => AlgebraicNumber::sqrt_neg(self.m),
            OmegaKind::HalfOnePlusSqrt => AlgebraicNumber::new(rat(1, 2), rat(1, 2), self.m),
        }
    }

    pub fn zero(&self) -> AlgebraicNumber {
        AlgebraicNumber::zero(self.m)
    }

    pub fn one(&self) -> AlgebraicNumber {
        AlgebraicNumber::one(self.m)
    }

    pub fn from_int(&self, n: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_int(n, self.m)
    }

    pub fn elem(&self, a: Rational, b: Rational) -> AlgebraicNumber {
        AlgebraicNumber::new(a, b, self.m)
    }

    /// `p + q omega`.
    pub fn from_coords(&self, p: i64, q: i64) -> AlgebraicNumber {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => self.elem(int(p), int(q)),
            OmegaKind::HalfOnePlusSqrt => self.elem(int(p) + rat(q, 2), rat(q, 2)),
        }
    }

    /// Rational coordinates of `x` in the basis `{1, omega}`.
    pub fn rational_coords(&self, x: &AlgebraicNumber) -> (Rational, Rational) {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => (x.a.clone(), x.b.clone()),
            OmegaKind::HalfOnePlusSqrt => {
                let q = &x.b + &x.b;
                (&x.a - &x.b, q)
            }
        }
    }

    /// Integer coordinates in `{1, omega}`, or `None` when `x` is not in `O`.
    pub fn coords(&self, x: &AlgebraicNumber) -> Option<OCoords> {
        let (p, q) = self.rational_coords(x);
        if !p.is_integer() || !q.is_integer() {
            return None;
        }
        Some(OCoords { p: p.to_integer().to_i64()?, q: q.to_integer().to_i64()? })
    }

    pub fn is_integer(&self, x: &AlgebraicNumber) -> bool {
        let (p, q) = self.rational_coords(x);
        p.is_integer() && q.is_integer()
    }

    /// Norm of `p + q omega` in integers.
    pub fn coords_norm(&self, c: OCoords) -> i64 {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => c.p * c.p + self.m * c.q * c.q,
            OmegaKind::HalfOnePlusSqrt => c.p * c.p + c.p * c.q + (1 + self.m) / 4 * c.q * c.q,
        }
    }

    /// `(p + q omega) * omega` in coordinates.
    pub fn coords_times_omega(&self, c: OCoords) -> OCoords {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => OCoords { p: -self.m * c.q, q: c.p },
            OmegaKind::HalfOnePlusSqrt => OCoords { p: -(1 + self.m) / 4 * c.q, q: c.p + c.q },
        }
    }

    /// Covolume of `O` in the plane, divided by `sqrt(m)`.
    pub fn covolume_over_sqrt_m(&self) -> Rational {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => int(1),
            OmegaKind::HalfOnePlusSqrt => rat(1, 2),
        }
    }

    /// All elements `x` of `O` with `N(x - center) <= bound`, sorted by
    /// `(N(x - center), a, b)`.
    pub fn elements_near(&self, center: &AlgebraicNumber, bound: &Rational) -> Vec<AlgebraicNumber> {
        if bound.is_negative() {
            return Vec::new();
        }
        // |b - cb| <= sqrt(bound / m), |a - ca| <= sqrt(bound)
        let rb = ceil_sqrt(&(bound / int(self.m))) + 1;
        let ra = ceil_sqrt(bound) + 1;
        let half = matches!(self.omega_kind, OmegaKind::HalfOnePlusSqrt);
        // b runs over integers (or half-integers), a over integers (or a ≡ b mod 1)
        let step_den = if half { 2 } else { 1 };
        let bmin = floor_rat(&((&center.b - int(rb)) * int(step_den)));
        let bmax = ceil_rat(&((&center.b + int(rb)) * int(step_den)));
        let mut out = Vec::new();
        for bn in bmin..=bmax {
            let b = rat(bn, step_den);
            let db = &b - &center.b;
            let rest = bound - int(self.m) * &db * &db;
            if rest.is_negative() {
                continue;
            }
            let amin = floor_rat(&(&center.a - int(ra)));
            let amax = ceil_rat(&(&center.a + int(ra)));
            for an in amin..=amax {
                let a = if half && bn.rem_euclid(2) == 1 { int(an) + rat(1, 2) } else { int(an) };
                let x = self.elem(a, b.clone());
                if (&x - center).norm() <= *bound {
                    out.push(x);
                }
            }
        }
        out.sort_by(|x, y| {
            (x - center)
                .norm()
                .cmp(&(y - center).norm())
                .then_with(|| x.lex_cmp(y))
        });
        out
    }

    /// All nonzero elements of `O` with norm exactly `n`.
    pub fn elements_of_norm(&self, n: i64) -> Vec<AlgebraicNumber> {
        self.elements_near(&self.zero(), &int(n))
            .into_iter()
            .filter(|x| x.norm() == int(n))
            .collect()
    }
}

pub fn floor_rat(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().expect("coordinate out of range")
}

pub fn ceil_rat(r: &Rational) -> i64 {
    r.ceil().to_integer().to_i64().expect("coordinate out of range")
}

/// Smallest integer `k >= 0` with `k^2 >= r`.
pub fn ceil_sqrt(r: &Rational) -> i64 {
    if !r.is_positive() {
        return 0;
    }
    let c = ceil_rat(r);
    let mut k = (c as f64).sqrt() as i64;
    while k > 0 && int((k - 1) * (k - 1)) >= *r {
        k -= 1;
    }
    while int(k * k) < *r {
        k += 1;
    }
    k
}

/// An integral ideal of `O` in Hermite normal form: the Z-lattice spanned by
/// `a` and `b + c omega`, with `0 <= b < a` and `c | a`, `c | b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Ideal {
    pub fn norm(&self) -> i64 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn contains(&self, x: OCoords) -> bool {
        if x.q.rem_euclid(self.c) != 0 {
            return false;
        }
        let k = x.q / self.c;
        (x.p - k * self.b).rem_euclid(self.a) == 0
    }

    pub fn basis(&self) -> [OCoords; 2] {
        [OCoords { p: self.a, q: 0 }, OCoords { p: self.b, q: self.c }]
    }
}

/// Hermite normal form of the Z-lattice spanned by `vecs` (must have rank 2).
pub fn lattice_hnf(vecs: &[OCoords]) -> Option<Ideal> {
    // column reduction on the q coordinate, then on p
    let mut vs: Vec<(i64, i64)> = vecs.iter().map(|v| (v.p, v.q)).filter(|v| *v != (0, 0)).collect();
    // gcd-combine the q coordinates into a single vector
    let mut pivot: Option<(i64, i64)> = None;
    let mut rest_p: i64 = 0;
    for v in vs.drain(..) {
        match pivot {
            None => {
                if v.1 == 0 {
                    rest_p = rest_p.gcd(&v.0);
                } else {
                    pivot = Some(v);
                }
            }
            Some(pv) => {
                if v.1 == 0 {
                    rest_p = rest_p.gcd(&v.0);
                    continue;
                }
                // extended gcd on q coordinates
                let g = pv.1.extended_gcd(&v.1);
                let (s, t) = (g.x, g.y);
                let newp = (s * pv.0 + t * v.0, g.gcd);
                // the combination eliminating q
                let (u, w) = (v.1 / g.gcd, pv.1 / g.gcd);
                let elim = u * pv.0 - w * v.0;
                rest_p = rest_p.gcd(&elim);
                pivot = Some(newp);
            }
        }
    }
    let (pp, pq) = pivot?;
    if rest_p == 0 {
        return None;
    }
    let a = rest_p.abs();
    let (mut b, c) = if pq < 0 { (-pp, -pq) } else { (pp, pq) };
    b = b.rem_euclid(a);
    Some(Ideal { a, b, c })
}

impl Ring {
    /// The ideal generated by the given elements of `O`.
    pub fn ideal(&self, gens: &[OCoords]) -> Option<Ideal> {
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for g in gens {
            vecs.push(*g);
            vecs.push(self.coords_times_omega(*g));
        }
        lattice_hnf(&vecs)
    }

    pub fn ideal_of(&self, gens: &[AlgebraicNumber]) -> Option<Ideal> {
        let cs: Option<Vec<OCoords>> = gens.iter().map(|g| self.coords(g)).collect();
        self.ideal(&cs?)
    }

    pub fn ideal_mul(&self, i: &Ideal, j: &Ideal) -> Ideal {
        let mut gens = Vec::new();
        for x in i.basis() {
            for y in j.basis() {
                gens.push(self.coords_mul(x, y));
            }
        }
        self.ideal(&gens).expect("product of nonzero ideals is nonzero")
    }

    pub fn ideal_conj(&self, i: &Ideal) -> Ideal {
        let gens: Vec<OCoords> = i.basis().iter().map(|x| self.coords_conj(*x)).collect();
        self.ideal(&gens).expect("conjugate of nonzero ideal is nonzero")
    }

    pub fn coords_mul(&self, x: OCoords, y: OCoords) -> OCoords {
        let xo = self.coords_times_omega(x);
        OCoords { p: x.p * y.p + xo.p * y.q, q: x.q * y.p + xo.q * y.q }
    }

    pub fn coords_conj(&self, x: OCoords) -> OCoords {
        match self.omega_kind {
            OmegaKind::SqrtMinusM => OCoords { p: x.p, q: -x.q },
            // conj(omega) = 1 - omega
            OmegaKind::HalfOnePlusSqrt => OCoords { p: x.p + x.q, q: -x.q },
        }
    }

    /// True iff the ideal is principal, decided by searching for an element of
    /// norm `N(I)` inside `I`.
    pub fn is_principal(&self, i: &Ideal) -> bool {
        self.principal_generator(i).is_some()
    }

    pub fn principal_generator(&self, i: &Ideal) -> Option<AlgebraicNumber> {
        self.elements_of_norm(i.norm())
            .into_iter()
            .find(|x| i.contains(self.coords(x).expect("integral")))
    }

    pub fn ideals_equivalent(&self, i: &Ideal, j: &Ideal) -> bool {
        self.is_principal(&self.ideal_mul(i, &self.ideal_conj(j)))
    }

    /// All integral ideals of norm exactly `n`.
    pub fn ideals_of_norm(&self, n: i64) -> Vec<Ideal> {
        let mut out = Vec::new();
        for c in 1..=n {
            if n % c != 0 {
                continue;
            }
            let a = n / c;
            if a % c != 0 {
                continue;
            }
            for b in (0..a).step_by(c as usize) {
                let cand = Ideal { a, b, c };
                let closed = cand
                    .basis()
                    .iter()
                    .all(|v| cand.contains(self.coords_times_omega(*v)));
                if closed {
                    out.push(cand);
                }
            }
        }
        out
    }

    /// Integer upper bound for the Minkowski constant `(2/pi) sqrt(|D|)`.
    pub fn minkowski_bound(&self) -> i64 {
        // 2/pi < 6367/10000
        let d = self.discriminant.unsigned_abs() as i128;
        let mut n: i64 = 1;
        while (n as i128 + 1).pow(2) * 100_000_000 <= 6367i128 * 6367 * d {
            n += 1;
        }
        n
    }
}

/// A cusp `lambda / mu` of hyperbolic 3-space, with `mu = 0` encoding infinity.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CuspPoint {
    pub lambda: AlgebraicNumber,
    pub mu: AlgebraicNumber,
}

impl fmt::Debug for CuspPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            None => write!(f, "inf"),
            Some(z) => write!(f, "cusp({})", z),
        }
    }
}

impl CuspPoint {
    pub fn infinity(m: i64) -> Self {
        CuspPoint { lambda: AlgebraicNumber::one(m), mu: AlgebraicNumber::zero(m) }
    }

    pub fn is_infinity(&self) -> bool {
        self.mu.is_zero()
    }

    /// The point `lambda / mu` of `K`, or `None` at infinity.
    pub fn value(&self) -> Option<AlgebraicNumber> {
        self.lambda.checked_div(&self.mu)
    }
}

impl Ring {
    /// Reduced representation of the cusp at `z`: `mu` of least norm with
    /// `mu z` integral, ties broken by `(N(lambda), a, b)` of `mu` then sign.
    pub fn cusp_at(&self, z: &AlgebraicNumber) -> CuspPoint {
        if self.is_integer(z) {
            return CuspPoint { lambda: z.clone(), mu: self.one() };
        }
        // common integer denominator bounds the search
        let d = z.a.denom().lcm(z.b.denom()) * BigInt::from(2);
        let dn = d.to_i64().expect("denominator fits");
        let mut best: Option<(Rational, Rational, AlgebraicNumber, AlgebraicNumber)> = None;
        for mu in self.elements_near(&self.zero(), &int(dn * dn)) {
            if mu.is_zero() {
                continue;
            }
            let lam = &mu * z;
            if !self.is_integer(&lam) {
                continue;
            }
            let key = (mu.norm(), lam.norm());
            let better = match &best {
                None => true,
                Some((bn, bl, bmu, _)) => {
                    (key.0.clone(), key.1.clone()).cmp(&(bn.clone(), bl.clone()))
                        .then_with(|| bmu.lex_cmp(&mu))
                        == Ordering::Less
                }
            };
            if better {
                best = Some((key.0, key.1, mu, lam));
            }
        }
        let (_, _, mu, lambda) = best.expect("d * z is integral");
        CuspPoint { lambda, mu }
    }

    /// The ideal `(lambda, mu)` attached to a cusp.
    pub fn cusp_ideal(&self, c: &CuspPoint) -> Ideal {
        self.ideal_of(&[c.lambda.clone(), c.mu.clone()]).expect("cusp has integral nonzero pair")
    }
}

/// One cusp representative per ideal class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealClassSet {
    pub class_number: usize,
    pub class_ideals: Vec<Ideal>,
    pub cusp_reps: Vec<CuspPoint>,
}

impl IdealClassSet {
    /// Index of the class containing `i`.
    pub fn class_of(&self, ring: &Ring, i: &Ideal) -> usize {
        self.class_ideals
            .iter()
            .position(|j| ring.ideals_equivalent(i, j))
            .expect("every ideal lies in some class")
    }

    pub fn cusp_class(&self, ring: &Ring, c: &CuspPoint) -> usize {
        if c.is_infinity() {
            return 0;
        }
        self.class_of(ring, &ring.cusp_ideal(c))
    }
}

impl Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ideal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [a, b, c] = <[i64; 3]>::deserialize(d)?;
        Ok(Ideal { a, b, c })
    }
}

/// The ideal classes of `O`, each paired with a cusp representative in the
/// closed fundamental rectangle of the translation lattice (infinity for the
/// principal class).
pub fn cusp_classes(ring: &Ring) -> IdealClassSet {
    let bound = ring.minkowski_bound();
    let mut class_ideals: Vec<Ideal> = vec![Ideal { a: 1, b: 0, c: 1 }];
    for n in 2..=bound {
        for i in ring.ideals_of_norm(n) {
            if !class_ideals.iter().any(|j| ring.ideals_equivalent(&i, j)) {
                class_ideals.push(i);
            }
        }
    }
    let domain = crate::polyhedron::PeriodDomain::new(ring);
    let mut cusp_reps = vec![CuspPoint::infinity(ring.m)];
    for class in class_ideals.iter().skip(1) {
        // increasing N(mu); for each mu the candidates lambda with lambda/mu in the rectangle
        let mut found: Option<CuspPoint> = None;
        let mut n = 2;
        while found.is_none() {
            let mut cands: Vec<CuspPoint> = Vec::new();
            for mu in ring.elements_of_norm(n) {
                let rmax = domain.circumradius_sq() * int(n);
                let center = &domain.center() * &mu;
                for lam in ring.elements_near(&center, &(rmax + int(1))) {
                    let z = lam.checked_div(&mu).expect("mu nonzero");
                    if !domain.contains_closed(&z) {
                        continue;
                    }
                    let Some(id) = ring.ideal_of(&[lam.clone(), mu.clone()]) else { continue };
                    if id.is_unit() || !ring.ideals_equivalent(&id, class) {
                        continue;
                    }
                    cands.push(ring.cusp_at(&z));
                }
            }
            cands.sort_by(|x, y| {
                x.mu.norm()
                    .cmp(&y.mu.norm())
                    .then_with(|| x.lambda.norm().cmp(&y.lambda.norm()))
                    .then_with(|| x.value().unwrap().lex_cmp(&y.value().unwrap()))
            });
            found = cands.into_iter().next();
            n += 1;
        }
        cusp_reps.push(found.expect("loop exits with a representative"));
    }
    IdealClassSet { class_number: class_ideals.len(), class_ideals, cusp_reps }
}
