use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use bianchi::figures::{bottom_facets_svg, imaginary_plane_svg};
use bianchi::homology::bundled_fixture;
use bianchi::number_field::make_ring;
use bianchi::report::{
    alpha_report, compute_report, fixture_report, les_report, theorem_report, AlphaJson, ComputeReport, CuspReport,
    LabeledChain, LesJson, Pipeline, PipelineError, TheoremJson,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "bianchi", version, about = "Borel-Serre compactified Bianchi quotients and their homology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cell complex and report orbit counts and homology.
    Compute(Opts),
    /// Check the three parts of the boundary theorem and the commutator corollaries.
    VerifyTheorem(Opts),
    /// The map induced on homology by the boundary inclusion, degrees 0 to 2.
    Alpha(Opts),
    /// The long exact sequence of the pair (Y, boundary), with exactness at every node.
    Les(Opts),
    /// Ranks of the bundled hand-transcribed m = 6 complex.
    FixtureCheck(Opts),
}

#[derive(clap::Args, Debug)]
struct Opts {
    #[arg(short = 'm', allow_negative_numbers = true)]
    m: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the computed cells to this JSON file.
    #[arg(long)]
    dump_cells: Option<PathBuf>,
    /// Read cells from a JSON file instead of computing them.
    #[arg(long)]
    load_cells: Option<PathBuf>,
    #[arg(long, value_enum)]
    figure: Option<Figure>,
    /// Destination of the SVG figure.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Figure {
    ImaginaryPlane,
    BottomFacets,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Field(_) | PipelineError::Load(_) => Failure::Input(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("verification failed: {}", msg);
            ExitCode::from(1)
        }
    }
}

fn opts(c: &Command) -> &Opts {
    match c {
        Command::Compute(o)
        | Command::VerifyTheorem(o)
        | Command::Alpha(o)
        | Command::Les(o)
        | Command::FixtureCheck(o) => o,
    }
}

fn pipeline(o: &Opts) -> Result<Pipeline, Failure> {
    if let Some(m) = o.m {
        make_ring(m).map_err(|e| Failure::Input(e.to_string()))?;
    }
    let p = match &o.load_cells {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))?;
            let p = Pipeline::load(&text)?;
            if let Some(m) = o.m {
                if m != p.m {
                    return Err(Failure::Input(format!("-m {} but {} holds m = {}", m, path.display(), p.m)));
                }
            }
            p
        }
        None => {
            let m = o.m.ok_or_else(|| Failure::Input("-m is required".into()))?;
            Pipeline::compute(m)?
        }
    };
    if let Some(path) = &o.dump_cells {
        fs::write(path, p.dump()).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))?;
    }
    if let Some(fig) = o.figure {
        let out = o.out.as_ref().ok_or_else(|| Failure::Input("--figure needs --out".into()))?;
        let svg = match fig {
            Figure::ImaginaryPlane => imaginary_plane_svg(&p.polyhedron),
            Figure::BottomFacets => bottom_facets_svg(&p.polyhedron),
        };
        fs::write(out, svg).map_err(|e| Failure::Input(format!("{}: {}", out.display(), e)))?;
    }
    Ok(p)
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) {
    let body = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("report serializes") + "\n",
        Format::Text => text(value),
    };
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn run(c: &Command) -> Result<(), Failure> {
    let o = opts(c);
    if o.out.is_some() && o.figure.is_none() {
        return Err(Failure::Input("--out is only used together with --figure".into()));
    }
    match c {
        Command::FixtureCheck(_) => {
            if let Some(m) = o.m {
                make_ring(m).map_err(|e| Failure::Input(e.to_string()))?;
                if m != 6 {
                    return Err(Failure::Input("the bundled fixture is for m = 6".into()));
                }
            }
            let r = fixture_report(&bundled_fixture())?;
            emit(o.format, &r, |r| {
                format!(
                    "fixture m = 6: {} edge orbits, rank ker d1 = {}, rank im d2 = {}, H1 rank = {}\nok\n",
                    r.edges, r.ker_d1_rank, r.im_d2_rank, r.h1_rank
                )
            });
            Ok(())
        }
        Command::Compute(_) => {
            let p = pipeline(o)?;
            let r = compute_report(&p)?;
            emit(o.format, &r, compute_text);
            Ok(())
        }
        Command::VerifyTheorem(_) => {
            let p = pipeline(o)?;
            let r = theorem_report(&p)?;
            emit(o.format, &r, theorem_text);
            if r.holds {
                Ok(())
            } else {
                Err(Failure::Check(theorem_failures(&r)))
            }
        }
        Command::Alpha(_) => {
            let p = pipeline(o)?;
            let r = alpha_report(&p)?;
            emit(o.format, &r, alpha_text);
            if r.holds {
                Ok(())
            } else {
                let bad: Vec<String> =
                    r.degrees.iter().filter(|d| !d.expected_shape).map(|d| format!("alpha_{}", d.degree)).collect();
                Err(Failure::Check(format!("unexpected kernel shape for {}", bad.join(", "))))
            }
        }
        Command::Les(_) => {
            let p = pipeline(o)?;
            let r = les_report(&p)?;
            emit(o.format, &r, les_text);
            if r.holds {
                Ok(())
            } else if !r.les.exact {
                let bad: Vec<String> = r.les.nodes.iter().filter(|n| !n.exact).map(|n| n.label()).collect();
                Err(Failure::Check(format!("sequence not exact at {}", bad.join(", "))))
            } else {
                Err(Failure::Check(format!(
                    "cuspidal ranks differ: H1 {} vs H2 {}",
                    r.les.h1_cusp_rank, r.les.h2_cusp_rank
                )))
            }
        }
    }
}

fn chain_text(c: &LabeledChain) -> String {
    if c.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (l, x)) in c.iter().enumerate() {
        let (sign, mag) = match x.strip_prefix('-') {
            Some(mag) => ("-", mag),
            None => ("+", x.as_str()),
        };
        if i == 0 {
            if sign == "-" {
                s.push('-');
            }
        } else {
            write!(s, " {} ", sign).unwrap();
        }
        if mag != "1" {
            s.push_str(mag);
        }
        s.push_str(l);
    }
    s
}

fn compute_text(r: &ComputeReport) -> String {
    let mut s = String::new();
    writeln!(s, "m = {}  (discriminant {}, class number {})", r.m, r.discriminant, r.class_number).unwrap();
    writeln!(s, "floor hemispheres: {}", r.hemispheres).unwrap();
    writeln!(
        s,
        "polyhedron: {} vertices ({} cusps), {} edges, {} faces",
        r.polyhedron_vertices, r.cusps, r.polyhedron_edges, r.polyhedron_faces
    )
    .unwrap();
    writeln!(
        s,
        "compactified quotient: {} vertices, {} edges ({} interior), {} faces, 1 solid",
        r.vertex_orbits, r.edge_orbits, r.interior_edge_orbits, r.face_orbits
    )
    .unwrap();
    for g in &r.homology {
        let tors: String = g.torsion.iter().map(|t| format!(" + Z/{}", t)).collect();
        writeln!(s, "H{} = Z^{}{}", g.degree, g.rank, tors).unwrap();
        for z in &g.free_generators {
            writeln!(s, "    {}", chain_text(z)).unwrap();
        }
    }
    writeln!(s, "boundary of P: {}", chain_text(&r.boundary_of_3cell)).unwrap();
    for t in &r.tori {
        writeln!(s, "torus {} at cusp {}", t.label, t.cusp).unwrap();
        writeln!(s, "    gamma_x = {:?}", t.gamma_x).unwrap();
        writeln!(s, "    gamma_y = {:?}", t.gamma_y).unwrap();
        let i = &t.label[1..];
        for (f, a, b) in &t.top_edges {
            let top = vec![(format!("x{}", i), a.to_string()), (format!("y{}", i), b.to_string())];
            let top: LabeledChain = top.into_iter().filter(|(_, c)| c != "0").collect();
            writeln!(s, "    top edge of {}: {}", f, chain_text(&top)).unwrap();
        }
    }
    s
}

fn cusp_line(s: &mut String, c: &CuspReport) {
    let show = |bounds: bool| if bounds { "bounds" } else { "does not bound" };
    writeln!(s, "  {}: {} {}, {} {}", c.torus, c.x.cycle, show(c.x.bounds), c.y.cycle, show(c.y.bounds)).unwrap();
    for m in [&c.x, &c.y] {
        if let Some(cert) = &m.certificate {
            writeln!(s, "      {} = boundary of {}", m.cycle, chain_text(cert)).unwrap();
        }
    }
}

fn verdict(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn theorem_text(r: &TheoremJson) -> String {
    let mut s = String::new();
    writeln!(s, "m = {}", r.m).unwrap();
    writeln!(s, "(0) all vertices homologous: {}", verdict(r.part0_single_vertex_class)).unwrap();
    writeln!(s, "(1) exactly one torus loop bounds per cusp: {}", verdict(r.part1_one_loop_per_torus_bounds)).unwrap();
    for c in &r.cusps {
        cusp_line(&mut s, c);
    }
    writeln!(
        s,
        "(2) boundary of P = {}: {}",
        chain_text(&r.boundary_of_3cell),
        verdict(r.part2_boundary_is_sum_of_tori)
    )
    .unwrap();
    writeln!(s, "[[1,1],[0,1]] in the commutator subgroup: {}", verdict(r.x_infinity_bounds)).unwrap();
    writeln!(s, "[[1,omega],[0,1]] of infinite order in the abelianisation: {}", verdict(r.y_infinity_infinite_order))
        .unwrap();
    s
}

fn theorem_failures(r: &TheoremJson) -> String {
    let mut bad = Vec::new();
    if !r.part0_single_vertex_class {
        bad.push("part (0): vertices in distinct H0 classes");
    }
    if !r.part1_one_loop_per_torus_bounds {
        bad.push("part (1): a torus without exactly one bounding loop");
    }
    if !r.part2_boundary_is_sum_of_tori {
        bad.push("part (2): boundary of P is not the sum of the torus 2-cells");
    }
    if !r.x_infinity_bounds {
        bad.push("x at infinity does not bound");
    }
    if !r.y_infinity_infinite_order {
        bad.push("y at infinity has finite order");
    }
    bad.join("; ")
}

fn alpha_text(r: &AlphaJson) -> String {
    let mut s = String::new();
    writeln!(s, "m = {}, {} cusp(s)", r.m, r.cusps).unwrap();
    for d in &r.degrees {
        writeln!(
            s,
            "alpha_{}: image rank {}, kernel rank {} [{}]",
            d.degree,
            d.image_rank,
            d.kernel_rank,
            verdict(d.expected_shape)
        )
        .unwrap();
        for k in &d.kernel {
            writeln!(s, "    kernel: {}", chain_text(k)).unwrap();
        }
        if d.degree == 1 {
            for c in &r.per_cusp {
                cusp_line(&mut s, c);
            }
        }
    }
    s
}

fn les_text(r: &LesJson) -> String {
    let mut s = String::new();
    writeln!(s, "m = {}", r.m).unwrap();
    for n in &r.les.nodes {
        let tors: String = n.torsion.iter().map(|t| format!(" + Z/{}", t)).collect();
        writeln!(s, "{:>9} = Z^{}{:<8} image rank {}  exact: {}", n.label(), n.free_rank, tors, n.incoming_rank, verdict(n.exact))
            .unwrap();
    }
    writeln!(s, "rank H1_cusp = {}, rank H2_cusp = {}: {}", r.les.h1_cusp_rank, r.les.h2_cusp_rank, verdict(r.ranks_agree))
        .unwrap();
    s
}
