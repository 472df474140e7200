//! Integral homology of cellular chain complexes, the map `alpha` induced by
//! including the boundary tori, and the long exact sequence of the pair.

pub mod snf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::borel_serre::{boundary_subcomplex, CompactifiedComplex};
pub use snf::{kernel_basis, lattice_basis, preimage_lattice, smith_normal_form, IntMatrix, SnfResult};

#[derive(Debug, Error)]
pub enum HomologyError {
    #[error("not a chain complex: the composite of the boundaries in degrees {0} and {} is nonzero", .0 + 1)]
    NotAComplex(usize),
    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),
}

/// `C_0 <- C_1 <- ... <- C_top`, with `boundaries[n - 1]` the map out of degree `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Self {
        assert_eq!(boundaries.len() + 1, dims.len());
        for (n, b) in boundaries.iter().enumerate() {
            assert_eq!((b.rows, b.cols), (dims[n], dims[n + 1]), "boundary {} has the wrong shape", n + 1);
        }
        ChainComplex { dims, boundaries }
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn cells(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    /// The boundary out of degree `n`; zero outside the stored range.
    pub fn boundary(&self, n: usize) -> IntMatrix {
        if n >= 1 && n <= self.boundaries.len() {
            self.boundaries[n - 1].clone()
        } else {
            IntMatrix::zeros(if n == 0 { 0 } else { self.cells(n - 1) }, self.cells(n))
        }
    }

    pub fn check(&self) -> Result<(), HomologyError> {
        for n in 1..self.boundaries.len() {
            if !self.boundary(n).mul(&self.boundary(n + 1)).is_zero() {
                return Err(HomologyError::NotAComplex(n));
            }
        }
        Ok(())
    }

    /// The complex spanned by the given cells in each degree (assumed closed under boundary).
    pub fn restrict(&self, cells: &[Vec<usize>]) -> ChainComplex {
        let dims = cells.iter().map(|c| c.len()).collect();
        let boundaries = (1..cells.len()).map(|n| self.boundary(n).select(&cells[n - 1], &cells[n])).collect();
        ChainComplex::new(dims, boundaries)
    }
}

/// Coordinates of a homology class: free part, then torsion residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }

    pub fn has_infinite_order(&self) -> bool {
        self.free.iter().any(|x| !x.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub degree: usize,
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    pub free_generators: Vec<Vec<BigInt>>,
    pub torsion_generators: Vec<Vec<BigInt>>,
    // chain -> coordinates in the cycle lattice, adapted to the boundaries
    coords: IntMatrix,
    invariants: Vec<BigInt>,
    outgoing: IntMatrix,
}

impl HomologyGroup {
    /// Class of a cycle, or `None` if `z` is not a cycle.
    pub fn class_of(&self, z: &[BigInt]) -> Option<HomologyClass> {
        if self.outgoing.mul_vec(z).iter().any(|x| !x.is_zero()) {
            return None;
        }
        let c = self.coords.mul_vec(z);
        let mut free = Vec::new();
        let mut torsion = Vec::new();
        for (j, x) in c.into_iter().enumerate() {
            match self.invariants.get(j) {
                Some(d) if d.is_one() => {}
                Some(d) => torsion.push(x.mod_floor(d)),
                None => free.push(x),
            }
        }
        Some(HomologyClass { free, torsion })
    }
}

pub fn homology(c: &ChainComplex, n: usize) -> Result<HomologyGroup, HomologyError> {
    let dn = c.boundary(n);
    let dn1 = c.boundary(n + 1);
    if !dn.mul(&dn1).is_zero() {
        return Err(HomologyError::NotAComplex(n));
    }
    let cells = c.cells(n);
    let s = smith_normal_form(&dn);
    let r = s.rank();
    let k = s.v.columns(r..cells);
    let proj = s.v_inv.rows_range(r..cells);
    let s2 = smith_normal_form(&proj.mul(&dn1));
    let gens = k.mul(&s2.u_inv);
    let mut free_generators = Vec::new();
    let mut torsion_generators = Vec::new();
    let mut torsion = Vec::new();
    for j in 0..gens.cols {
        match s2.diag.get(j) {
            Some(d) if d.is_one() => {}
            Some(d) => {
                torsion.push(d.clone());
                torsion_generators.push(gens.column(j));
            }
            None => free_generators.push(gens.column(j)),
        }
    }
    Ok(HomologyGroup {
        degree: n,
        free_rank: free_generators.len(),
        torsion,
        free_generators,
        torsion_generators,
        coords: s2.u.mul(&proj),
        invariants: s2.diag,
        outgoing: dn,
    })
}

/// `boundary(chain) = target`, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCertificate {
    pub target: Vec<BigInt>,
    pub chain: Vec<BigInt>,
}

impl ChainCertificate {
    pub fn holds(&self, boundary: &IntMatrix) -> bool {
        boundary.mul_vec(&self.chain) == self.target
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Certificate(ChainCertificate),
    /// The target in Smith coordinates has a nonzero residue at `index`.
    NotInImage { target: Vec<BigInt>, index: usize, residue: BigInt },
}

impl Membership {
    pub fn certificate(&self) -> Option<&ChainCertificate> {
        match self {
            Membership::Certificate(c) => Some(c),
            Membership::NotInImage { .. } => None,
        }
    }
}

pub fn solve_in_image(boundary: &IntMatrix, cycle: &[BigInt]) -> Membership {
    solve_with_snf(&smith_normal_form(boundary), boundary.cols, cycle)
}

fn solve_with_snf(s: &SnfResult, cols: usize, cycle: &[BigInt]) -> Membership {
    let y = s.u.mul_vec(cycle);
    let r = s.rank();
    let mut w = vec![BigInt::zero(); cols];
    for (i, yi) in y.iter().enumerate() {
        let residue = if i < r { yi.mod_floor(&s.diag[i]) } else { yi.clone() };
        if !residue.is_zero() {
            return Membership::NotInImage { target: cycle.to_vec(), index: i, residue };
        }
        if i < r {
            w[i] = yi / &s.diag[i];
        }
    }
    Membership::Certificate(ChainCertificate { target: cycle.to_vec(), chain: s.v.mul_vec(&w) })
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

fn lattice_rank(rows: usize, cols: &[&IntMatrix]) -> usize {
    lattice_basis(&concat(rows, cols)).len()
}

fn concat(rows: usize, cols: &[&IntMatrix]) -> IntMatrix {
    cols.iter().fold(IntMatrix::zeros(rows, 0), |acc, m| acc.hcat(m))
}

fn same_lattice(rows: usize, a: &[&IntMatrix], b: &[&IntMatrix]) -> bool {
    lattice_basis(&concat(rows, a)) == lattice_basis(&concat(rows, b))
}

/// Inclusion of the cells `sub` into `n` cells, as a matrix.
fn inclusion_matrix(n: usize, sub: &[usize]) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, sub.len());
    for (j, &i) in sub.iter().enumerate() {
        m.set(i, j, BigInt::one());
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspVerdict {
    pub torus: usize,
    pub x: Membership,
    pub y: Membership,
}

impl CuspVerdict {
    pub fn exactly_one_dies(&self) -> bool {
        self.x.certificate().is_some() != self.y.certificate().is_some()
    }
}

/// `alpha_n : H_n(boundary) -> H_n(Y)`. The boundary tori have zero
/// differentials, so their homology is free on the cells.
#[derive(Clone, Debug)]
pub struct AlphaMap {
    pub degree: usize,
    /// One column per boundary cell: its class in `H_n(Y)` (free coordinates, then torsion).
    pub matrix: Vec<HomologyClass>,
    /// Basis of the kernel, in boundary-cell coordinates.
    pub kernel: Vec<Vec<BigInt>>,
    pub image_rank: usize,
    pub per_cusp: Vec<CuspVerdict>,
    pub source_labels: Vec<String>,
}

pub fn alpha(c: &CompactifiedComplex, n: usize) -> Result<AlphaMap, HomologyError> {
    assert!(n <= 2, "alpha is defined in degrees 0, 1, 2");
    let b = boundary_subcomplex(c);
    let cells = &b.inclusion[n];
    let h = homology(&c.complex, n)?;
    let total = c.complex.cells(n);
    let g = inclusion_matrix(total, cells);
    let matrix = cells
        .iter()
        .map(|&i| h.class_of(&unit(total, i)).expect("torus cells are cycles"))
        .collect();
    let d = c.complex.boundary(n + 1);
    let kernel = preimage_lattice(&g, &d);
    let image_rank = lattice_rank(total, &[&g, &d]) - lattice_rank(total, &[&d]);
    let per_cusp = if n == 1 {
        let s = smith_normal_form(&d);
        c.tori
            .iter()
            .enumerate()
            .map(|(i, t)| CuspVerdict {
                torus: i,
                x: solve_with_snf(&s, d.cols, &unit(total, t.edge_x)),
                y: solve_with_snf(&s, d.cols, &unit(total, t.edge_y)),
            })
            .collect()
    } else {
        Vec::new()
    };
    let labels = [&c.vertex_labels, &c.edge_labels, &c.face_labels][n];
    Ok(AlphaMap {
        degree: n,
        matrix,
        kernel,
        image_rank,
        per_cusp,
        source_labels: cells.iter().map(|&i| labels[i].clone()).collect(),
    })
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    /// All 0-cells define the same class in degree 0.
    pub part0: bool,
    /// Per cusp, exactly one of the two torus 1-cells bounds.
    pub part1: bool,
    pub verdicts: Vec<CuspVerdict>,
    /// The 3-cell's boundary is the sum of the torus 2-cells.
    pub part2: bool,
    pub cell3_boundary: Vec<BigInt>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.part0 && self.part1 && self.part2
    }
}

pub fn verify_theorem(c: &CompactifiedComplex) -> TheoremReport {
    let d1 = c.complex.boundary(1);
    let n0 = c.complex.cells(0);
    let s1 = smith_normal_form(&d1);
    let part0 = (1..n0).all(|v| {
        let mut diff = unit(n0, v);
        diff[0] -= 1;
        solve_with_snf(&s1, d1.cols, &diff).certificate().is_some()
    });
    let d2 = c.complex.boundary(2);
    let s2 = smith_normal_form(&d2);
    let n1 = c.complex.cells(1);
    let verdicts: Vec<CuspVerdict> = c
        .tori
        .iter()
        .enumerate()
        .map(|(i, t)| CuspVerdict {
            torus: i,
            x: solve_with_snf(&s2, d2.cols, &unit(n1, t.edge_x)),
            y: solve_with_snf(&s2, d2.cols, &unit(n1, t.edge_y)),
        })
        .collect();
    let part1 = !verdicts.is_empty() && verdicts.iter().all(CuspVerdict::exactly_one_dies);
    let cell3_boundary = c.complex.boundary(3).column(0);
    let mut expected = vec![BigInt::zero(); c.complex.cells(2)];
    for t in &c.tori {
        expected[t.cell2] = BigInt::one();
    }
    let part2 = cell3_boundary == expected;
    TheoremReport { part0, part1, verdicts, part2, cell3_boundary }
}

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub x_infinity_bounds: bool,
    pub certificate: Option<ChainCertificate>,
    pub y_infinity_infinite_order: bool,
}

impl CommutatorReport {
    pub fn holds(&self) -> bool {
        self.x_infinity_bounds && self.y_infinity_infinite_order
    }
}

/// The classes of the loops of `[[1, 1], [0, 1]]` and `[[1, omega], [0, 1]]` at infinity.
pub fn commutator_witness(c: &CompactifiedComplex) -> Result<CommutatorReport, HomologyError> {
    let t = c.tori.iter().find(|t| t.cusp.is_infinity()).expect("the cusp at infinity is attached");
    let n1 = c.complex.cells(1);
    let h1 = homology(&c.complex, 1)?;
    let x = unit(n1, t.edge_x);
    let membership = solve_in_image(&c.complex.boundary(2), &x);
    let y_class = h1.class_of(&unit(n1, t.edge_y)).expect("torus loops are cycles");
    Ok(CommutatorReport {
        x_infinity_bounds: h1.class_of(&x).expect("torus loops are cycles").is_zero(),
        certificate: membership.certificate().cloned(),
        y_infinity_infinite_order: y_class.has_infinite_order(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Boundary,
    Total,
    Relative,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LesNode {
    pub space: Space,
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    /// Rank of the image of the incoming map.
    pub incoming_rank: usize,
    pub exact: bool,
}

impl LesNode {
    pub fn label(&self) -> String {
        let s = match self.space {
            Space::Boundary => "dY",
            Space::Total => "Y",
            Space::Relative => "Y/dY",
        };
        format!("H{}({})", self.degree, s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LesReport {
    /// From `H_top(dY)` down to `H_0(Y/dY)`.
    pub nodes: Vec<LesNode>,
    pub exact: bool,
    pub h1_cusp_rank: usize,
    pub h2_cusp_rank: usize,
}

impl LesReport {
    pub fn node(&self, space: Space, degree: usize) -> Option<&LesNode> {
        self.nodes.iter().find(|n| n.space == space && n.degree == degree)
    }
}

struct Pair {
    spaces: [ChainComplex; 3],
    inc: Vec<IntMatrix>,
    proj: Vec<IntMatrix>,
}

impl Pair {
    fn complex(&self, s: Space) -> &ChainComplex {
        &self.spaces[s as usize]
    }

    /// Chain-level representative of the map leaving `(s, n)`.
    fn outgoing(&self, s: Space, n: usize) -> Option<(Space, usize, IntMatrix)> {
        match s {
            Space::Boundary => Some((Space::Total, n, self.inc[n].clone())),
            Space::Total => Some((Space::Relative, n, self.proj[n].clone())),
            Space::Relative => {
                if n == 0 {
                    return None;
                }
                let lift = self.proj[n].transpose();
                let d = self.complex(Space::Total).boundary(n).mul(&lift);
                Some((Space::Boundary, n - 1, self.inc[n - 1].transpose().mul(&d)))
            }
        }
    }

    fn incoming(&self, s: Space, n: usize) -> Option<(Space, usize, IntMatrix)> {
        let (src, m) = match s {
            Space::Boundary => (Space::Relative, n + 1),
            Space::Total => (Space::Boundary, n),
            Space::Relative => (Space::Total, n),
        };
        if m > self.complex(Space::Total).top() {
            return None;
        }
        self.outgoing(src, m).map(|(_, _, f)| (src, m, f))
    }
}

fn cycles(c: &ChainComplex, n: usize) -> IntMatrix {
    kernel_basis(&c.boundary(n))
}

pub fn long_exact_sequence(c: &CompactifiedComplex) -> Result<LesReport, HomologyError> {
    let y = &c.complex;
    y.check()?;
    let b = boundary_subcomplex(c);
    let top = y.top();
    let mut sub = b.inclusion.clone();
    sub.resize(top + 1, Vec::new());
    let rest: Vec<Vec<usize>> =
        (0..=top).map(|n| (0..y.cells(n)).filter(|i| !sub[n].contains(i)).collect()).collect();
    let pair = Pair {
        spaces: [y.restrict(&sub), y.clone(), y.restrict(&rest)],
        inc: (0..=top).map(|n| inclusion_matrix(y.cells(n), &sub[n])).collect(),
        proj: (0..=top).map(|n| inclusion_matrix(y.cells(n), &rest[n]).transpose()).collect(),
    };
    let mut nodes = Vec::new();
    for n in (0..=top).rev() {
        for s in [Space::Boundary, Space::Total, Space::Relative] {
            let cx = pair.complex(s);
            let rows = cx.cells(n);
            let z = cycles(cx, n);
            let bd = cx.boundary(n + 1);
            let image = match pair.incoming(s, n) {
                Some((src, m, f)) => f.mul(&cycles(pair.complex(src), m)),
                None => IntMatrix::zeros(rows, 0),
            };
            let kernel = match pair.outgoing(s, n) {
                Some((dst, m, g)) => {
                    let target = pair.complex(dst).boundary(m + 1);
                    let pre = preimage_lattice(&g.mul(&z), &target);
                    z.mul(&IntMatrix::from_columns(z.cols, &pre))
                }
                None => z.clone(),
            };
            let exact = same_lattice(rows, &[&image, &bd], &[&kernel, &bd]);
            let h = homology(cx, n)?;
            nodes.push(LesNode {
                space: s,
                degree: n,
                free_rank: h.free_rank,
                torsion: h.torsion.iter().map(|t| t.to_string()).collect(),
                incoming_rank: lattice_rank(rows, &[&image, &bd]) - lattice_rank(rows, &[&bd]),
                exact,
            });
        }
    }
    let exact = nodes.iter().all(|n| n.exact);
    let rank = |s: Space, d: usize| nodes.iter().find(|x| x.space == s && x.degree == d).map_or(0, |x| x.free_rank);
    let image = |s: Space, d: usize| nodes.iter().find(|x| x.space == s && x.degree == d).map_or(0, |x| x.incoming_rank);
    let h1_cusp_rank = rank(Space::Total, 1) - image(Space::Total, 1);
    let h2_cusp_rank = rank(Space::Total, 2) - image(Space::Total, 2);
    Ok(LesReport { nodes, exact, h1_cusp_rank, h2_cusp_rank })
}

/// A complex written with the labels of a hand-drawn picture: boundaries are
/// label-to-coefficient lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelledComplex {
    pub m: i64,
    #[serde(default)]
    pub note: Vec<String>,
    pub vertices: Vec<String>,
    pub edges: Vec<LabelledCell>,
    pub faces: Vec<LabelledCell>,
    pub expected: FixtureExpectation,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelledCell {
    pub label: String,
    pub boundary: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureExpectation {
    pub ker_d1_rank: usize,
    pub im_d2_rank: usize,
    pub h1_rank: usize,
}

impl LabelledComplex {
    fn matrix(rows: &[String], cols: &[LabelledCell]) -> Result<IntMatrix, HomologyError> {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (l, x) in &c.boundary {
                let i = rows
                    .iter()
                    .position(|r| r == l)
                    .ok_or_else(|| HomologyError::FixtureMismatch(format!("unknown cell {} in the boundary of {}", l, c.label)))?;
                m.add_to(i, j, &BigInt::from(*x));
            }
        }
        Ok(m)
    }

    pub fn to_complex(&self) -> Result<ChainComplex, HomologyError> {
        let edge_labels: Vec<String> = self.edges.iter().map(|e| e.label.clone()).collect();
        let d1 = Self::matrix(&self.vertices, &self.edges)?;
        let d2 = Self::matrix(&edge_labels, &self.faces)?;
        Ok(ChainComplex::new(vec![self.vertices.len(), self.edges.len(), self.faces.len()], vec![d1, d2]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub edges: usize,
    pub ker_d1_rank: usize,
    pub im_d2_rank: usize,
    pub h1_rank: usize,
}

pub fn example_fixture_check(f: &LabelledComplex) -> Result<FixtureReport, HomologyError> {
    let c = f.to_complex()?;
    c.check()?;
    let d1 = c.boundary(1);
    let d2 = c.boundary(2);
    let im_d2_rank = smith_normal_form(&d2).rank();
    let report = FixtureReport {
        edges: c.cells(1),
        ker_d1_rank: c.cells(1) - smith_normal_form(&d1).rank(),
        im_d2_rank,
        h1_rank: homology(&c, 1)?.free_rank,
    };
    let got = FixtureExpectation {
        ker_d1_rank: report.ker_d1_rank,
        im_d2_rank: report.im_d2_rank,
        h1_rank: report.h1_rank,
    };
    if got != f.expected {
        return Err(HomologyError::FixtureMismatch(format!("expected {:?}, computed {:?}", f.expected, got)));
    }
    Ok(report)
}

/// The fixture transcribed from the worked example for `m = 6`.
pub fn bundled_fixture() -> LabelledComplex {
    serde_json::from_str(include_str!("../../../../fixtures/m6_paper_example.json")).expect("bundled fixture parses")
}
