//! End-to-end pipeline, the cell file, and serializable reports.
//!
//! All exact quantities are written as strings: rationals as `"p/q"`,
//! integers in decimal. Chains are lists of `[label, coefficient]` pairs.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::borel_serre::{compactify, BorelSerreError, CompactifiedComplex};
use crate::group::GroupElement;
use crate::homology::{
    alpha, commutator_witness, example_fixture_check, homology, long_exact_sequence, verify_theorem, FixtureReport,
    HomologyClass, HomologyError, LabelledComplex, LesReport, Membership,
};
use crate::number_field::{cusp_classes, make_ring, FieldError};
use crate::polyhedron::{build_hemisphere_set, extract_cells, FundamentalPolyhedron, PolyhedronError};
use crate::quotient_cw::QuotientComplex;

pub const CELL_SCHEMA: &str = "bianchi-cells/1";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Polyhedron(#[from] PolyhedronError),
    #[error(transparent)]
    BorelSerre(#[from] BorelSerreError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("cell file rejected: {0}")]
    Load(String),
}

/// Everything computed for one `m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Pipeline {
    pub schema: String,
    pub m: i64,
    pub polyhedron: FundamentalPolyhedron,
    pub quotient: QuotientComplex,
    pub compactified: CompactifiedComplex,
}

impl Pipeline {
    pub fn compute(m: i64) -> Result<Self, PipelineError> {
        let ring = make_ring(m)?;
        let hs = build_hemisphere_set(&ring);
        let polyhedron = extract_cells(&hs, &ring)?;
        let (quotient, compactified) = compactify(&polyhedron)?;
        Ok(Pipeline { schema: CELL_SCHEMA.into(), m, polyhedron, quotient, compactified })
    }

    pub fn dump(&self) -> String {
        serde_json::to_string_pretty(self).expect("cell data serializes")
    }

    /// Reads a cell file and checks the parts the reports depend on.
    pub fn load(text: &str) -> Result<Self, PipelineError> {
        let p: Pipeline = serde_json::from_str(text).map_err(|e| PipelineError::Load(e.to_string()))?;
        if p.schema != CELL_SCHEMA {
            return Err(PipelineError::Load(format!("unknown schema {:?}", p.schema)));
        }
        let ring = make_ring(p.m)?;
        let bad = |s: &str| Err(PipelineError::Load(s.into()));
        if p.polyhedron.ring != ring || p.compactified.ring != ring {
            return bad("ring does not match m");
        }
        let y = &p.compactified;
        y.complex.check()?;
        if y.complex.dims.len() != 4 || y.complex.cells(3) != 1 {
            return bad("expected cells in degrees 0 to 3 with a single 3-cell");
        }
        if y.vertex_labels.len() != y.complex.cells(0)
            || y.edge_labels.len() != y.complex.cells(1)
            || y.face_labels.len() != y.complex.cells(2)
        {
            return bad("label lists do not match the cell counts");
        }
        if y.tori.len() != p.quotient.cusp_orbits.len() {
            return bad("one torus per cusp orbit expected");
        }
        for t in &y.tori {
            if t.vertex >= y.complex.cells(0) || t.edge_y >= y.complex.cells(1) || t.cell2 >= y.complex.cells(2) {
                return bad("torus cell index out of range");
            }
            if !t.gens.gamma_x.in_sl2(&ring) || !t.gens.gamma_y.in_sl2(&ring) {
                return bad("cusp stabiliser generator outside SL2(O)");
            }
        }
        for pr in &p.quotient.pairings {
            if !pr.element.in_sl2(&ring) {
                return bad("face pairing outside SL2(O)");
            }
        }
        Ok(p)
    }
}

pub type LabeledChain = Vec<(String, String)>;

pub fn labeled_chain(labels: &[String], v: &[BigInt]) -> LabeledChain {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (labels[i].clone(), x.to_string()))
        .collect()
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn labels(y: &CompactifiedComplex, n: usize) -> Vec<String> {
    match n {
        0 => y.vertex_labels.clone(),
        1 => y.edge_labels.clone(),
        2 => y.face_labels.clone(),
        _ => vec!["P".into()],
    }
}

fn matrix_strings(g: &GroupElement) -> [[String; 2]; 2] {
    [[g.a.to_string(), g.b.to_string()], [g.c.to_string(), g.d.to_string()]]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupReport {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<String>,
    pub free_generators: Vec<LabeledChain>,
    pub torsion_generators: Vec<LabeledChain>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusReport {
    pub label: String,
    pub cusp: String,
    pub gamma_x: [[String; 2]; 2],
    pub gamma_y: [[String; 2]; 2],
    /// `(face label, a, b)`: the face gains `a x + b y` on this torus.
    pub top_edges: Vec<(String, i64, i64)>,
    /// Edge labels re-anchored at the torus vertex.
    pub truncated_edges: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComputeReport {
    pub m: i64,
    pub discriminant: i64,
    pub class_number: usize,
    pub hemispheres: usize,
    pub polyhedron_vertices: usize,
    pub polyhedron_edges: usize,
    pub polyhedron_faces: usize,
    pub cusps: usize,
    pub vertex_orbits: usize,
    pub edge_orbits: usize,
    pub face_orbits: usize,
    pub interior_edge_orbits: usize,
    pub face_pairings: usize,
    #[serde(rename = "H0_rank")]
    pub h0_rank: usize,
    #[serde(rename = "H1_rank")]
    pub h1_rank: usize,
    #[serde(rename = "H2_rank")]
    pub h2_rank: usize,
    #[serde(rename = "H3_rank")]
    pub h3_rank: usize,
    pub homology: Vec<GroupReport>,
    pub boundary_of_3cell: LabeledChain,
    pub tori: Vec<TorusReport>,
}

pub fn compute_report(p: &Pipeline) -> Result<ComputeReport, PipelineError> {
    let y = &p.compactified;
    let mut groups = Vec::new();
    for n in 0..=3 {
        let h = homology(&y.complex, n)?;
        let l = labels(y, n);
        groups.push(GroupReport {
            degree: n,
            rank: h.free_rank,
            torsion: strings(&h.torsion),
            free_generators: h.free_generators.iter().map(|g| labeled_chain(&l, g)).collect(),
            torsion_generators: h.torsion_generators.iter().map(|g| labeled_chain(&l, g)).collect(),
        });
    }
    let tori = y
        .tori
        .iter()
        .enumerate()
        .map(|(i, t)| TorusReport {
            label: y.face_labels[t.cell2].clone(),
            cusp: match t.cusp.value() {
                None => "infinity".into(),
                Some(z) => z.to_string(),
            },
            gamma_x: matrix_strings(&t.gens.gamma_x),
            gamma_y: matrix_strings(&t.gens.gamma_y),
            top_edges: y
                .top_edges
                .iter()
                .filter(|e| e.torus == i)
                .map(|e| (y.face_labels[e.face_orbit].clone(), e.a, e.b))
                .collect(),
            truncated_edges: y.truncated.iter().filter(|e| e.1 == i).map(|e| y.edge_labels[e.0].clone()).collect(),
        })
        .collect();
    let ring = make_ring(p.m)?;
    Ok(ComputeReport {
        m: p.m,
        discriminant: ring.discriminant,
        class_number: cusp_classes(&ring).class_number,
        hemispheres: p.polyhedron.hemispheres.len(),
        polyhedron_vertices: p.polyhedron.vertex_count(),
        polyhedron_edges: p.polyhedron.edges.len(),
        polyhedron_faces: p.polyhedron.faces.len(),
        cusps: y.tori.len(),
        vertex_orbits: y.complex.cells(0),
        edge_orbits: y.complex.cells(1),
        face_orbits: y.complex.cells(2),
        interior_edge_orbits: y.interior_edges,
        face_pairings: p.quotient.pairings.len(),
        h0_rank: groups[0].rank,
        h1_rank: groups[1].rank,
        h2_rank: groups[2].rank,
        h3_rank: groups[3].rank,
        boundary_of_3cell: labeled_chain(&y.face_labels, &y.complex.boundary(3).column(0)),
        homology: groups,
        tori,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub cycle: String,
    pub bounds: bool,
    /// A 2-chain with the cycle as boundary.
    pub certificate: Option<LabeledChain>,
    /// Index and value of a nonzero Smith residue proving the cycle does not bound.
    pub obstruction: Option<(usize, String)>,
}

fn membership_report(y: &CompactifiedComplex, cycle: &str, m: &Membership) -> MembershipReport {
    match m {
        Membership::Certificate(c) => MembershipReport {
            cycle: cycle.into(),
            bounds: true,
            certificate: Some(labeled_chain(&y.face_labels, &c.chain)),
            obstruction: None,
        },
        Membership::NotInImage { index, residue, .. } => MembershipReport {
            cycle: cycle.into(),
            bounds: false,
            certificate: None,
            obstruction: Some((*index, residue.to_string())),
        },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuspReport {
    pub torus: String,
    pub x: MembershipReport,
    pub y: MembershipReport,
    pub exactly_one_bounds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremJson {
    pub m: i64,
    pub part0_single_vertex_class: bool,
    pub part1_one_loop_per_torus_bounds: bool,
    pub part2_boundary_is_sum_of_tori: bool,
    pub cusps: Vec<CuspReport>,
    pub boundary_of_3cell: LabeledChain,
    pub x_infinity_bounds: bool,
    pub y_infinity_infinite_order: bool,
    pub holds: bool,
}

pub fn theorem_report(p: &Pipeline) -> Result<TheoremJson, PipelineError> {
    let y = &p.compactified;
    let t = verify_theorem(y);
    let c = commutator_witness(y)?;
    let cusps = t
        .verdicts
        .iter()
        .map(|v| {
            let tb = &y.tori[v.torus];
            CuspReport {
                torus: y.face_labels[tb.cell2].clone(),
                x: membership_report(y, &y.edge_labels[tb.edge_x], &v.x),
                y: membership_report(y, &y.edge_labels[tb.edge_y], &v.y),
                exactly_one_bounds: v.exactly_one_dies(),
            }
        })
        .collect();
    Ok(TheoremJson {
        m: p.m,
        part0_single_vertex_class: t.part0,
        part1_one_loop_per_torus_bounds: t.part1,
        part2_boundary_is_sum_of_tori: t.part2,
        cusps,
        boundary_of_3cell: labeled_chain(&y.face_labels, &t.cell3_boundary),
        x_infinity_bounds: c.x_infinity_bounds,
        y_infinity_infinite_order: c.y_infinity_infinite_order,
        holds: t.holds() && c.holds(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassReport {
    pub free: Vec<String>,
    pub torsion: Vec<String>,
}

impl From<&HomologyClass> for ClassReport {
    fn from(c: &HomologyClass) -> Self {
        ClassReport { free: strings(&c.free), torsion: strings(&c.torsion) }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaDegree {
    pub degree: usize,
    pub source: Vec<String>,
    /// Class in `H_n(Y)` of each source cell.
    pub images: Vec<ClassReport>,
    pub kernel: Vec<LabeledChain>,
    pub kernel_rank: usize,
    pub image_rank: usize,
    /// The clause of the corollary on `alpha` in this degree.
    pub expected_shape: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaJson {
    pub m: i64,
    pub cusps: usize,
    pub degrees: Vec<AlphaDegree>,
    pub per_cusp: Vec<CuspReport>,
    pub holds: bool,
}

pub fn alpha_report(p: &Pipeline) -> Result<AlphaJson, PipelineError> {
    let y = &p.compactified;
    let h = y.tori.len();
    let mut degrees = Vec::new();
    let mut per_cusp = Vec::new();
    for n in 0..=2 {
        let a = alpha(y, n)?;
        let kernel: Vec<LabeledChain> = a.kernel.iter().map(|k| labeled_chain(&a.source_labels, k)).collect();
        let expected_shape = match n {
            0 => a.kernel.len() + 1 == h && a.image_rank == 1,
            1 => a.kernel.len() == h && a.per_cusp.iter().all(|v| v.exactly_one_dies()),
            _ => {
                let all_ones = vec![BigInt::one(); h];
                a.kernel.len() == 1 && (a.kernel[0] == all_ones || a.kernel[0] == all_ones.iter().map(|x| -x).collect::<Vec<_>>())
            }
        };
        if n == 1 {
            per_cusp = a
                .per_cusp
                .iter()
                .map(|v| {
                    let tb = &y.tori[v.torus];
                    CuspReport {
                        torus: y.face_labels[tb.cell2].clone(),
                        x: membership_report(y, &y.edge_labels[tb.edge_x], &v.x),
                        y: membership_report(y, &y.edge_labels[tb.edge_y], &v.y),
                        exactly_one_bounds: v.exactly_one_dies(),
                    }
                })
                .collect();
        }
        degrees.push(AlphaDegree {
            degree: n,
            source: a.source_labels.clone(),
            images: a.matrix.iter().map(ClassReport::from).collect(),
            kernel_rank: kernel.len(),
            kernel,
            image_rank: a.image_rank,
            expected_shape,
        });
    }
    let holds = degrees.iter().all(|d| d.expected_shape);
    Ok(AlphaJson { m: p.m, cusps: h, degrees, per_cusp, holds })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LesJson {
    pub m: i64,
    #[serde(flatten)]
    pub les: LesReport,
    pub ranks_agree: bool,
    pub holds: bool,
}

pub fn les_report(p: &Pipeline) -> Result<LesJson, PipelineError> {
    let les = long_exact_sequence(&p.compactified)?;
    let ranks_agree = les.h1_cusp_rank == les.h2_cusp_rank;
    let holds = les.exact && ranks_agree;
    Ok(LesJson { m: p.m, les, ranks_agree, holds })
}

pub fn fixture_report(f: &LabelledComplex) -> Result<FixtureReport, PipelineError> {
    Ok(example_fixture_check(f)?)
}
