mod common;

use bianchi::figures::{bottom_facets_svg, imaginary_plane_svg};
use bianchi::polyhedron::FaceCarrier;
use bianchi::report::{alpha_report, compute_report, les_report, theorem_report, Pipeline, PipelineError};
use serde_json::Value;

fn reports(p: &Pipeline) -> Vec<Value> {
    vec![
        serde_json::to_value(compute_report(p).unwrap()).unwrap(),
        serde_json::to_value(theorem_report(p).unwrap()).unwrap(),
        serde_json::to_value(alpha_report(p).unwrap()).unwrap(),
        serde_json::to_value(les_report(p).unwrap()).unwrap(),
    ]
}

#[test]
fn dump_load_round_trip() {
    for m in [2, 6, 7] {
        let p = common::pipeline(m);
        let text = p.dump();
        let q = Pipeline::load(&text).unwrap();
        assert_eq!(reports(p), reports(&q), "m = {m}");
        assert_eq!(q.dump(), text);
    }
}

#[test]
fn load_rejects_damaged_files() {
    let text = common::pipeline(2).dump();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["schema"] = "something-else".into();
    assert!(matches!(Pipeline::load(&v.to_string()), Err(PipelineError::Load(_))));

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["m"] = 4.into();
    assert!(Pipeline::load(&v.to_string()).is_err());

    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["m"] = 5.into();
    assert!(Pipeline::load(&v.to_string()).is_err());

    assert!(Pipeline::load("{").is_err());
}

#[test]
fn m6_compute_report() {
    let r = serde_json::to_value(compute_report(common::pipeline(6)).unwrap()).unwrap();
    assert_eq!(r["cusps"], 2);
    assert_eq!(r["class_number"], 2);
    assert_eq!(r["edge_orbits"], 15);
    assert_eq!(r["H0_rank"], 1);
    assert_eq!(r["H1_rank"], 2);
    assert_eq!(r["H2_rank"], 1);
    assert_eq!(r["H3_rank"], 0);
    let d3: Vec<(String, String)> = serde_json::from_value(r["boundary_of_3cell"].clone()).unwrap();
    assert_eq!(d3.len(), 2);
    assert!(d3.iter().all(|(_, c)| c == "1"));
}

#[test]
fn rationals_are_written_as_fractions() {
    let text = common::pipeline(6).dump();
    assert!(text.contains("\"1/2\""));
    assert!(!text.contains("0.5"));
}

fn attr<'a>(tag: &'a str, name: &str) -> &'a str {
    let key = format!("{name}=\"");
    let i = tag.find(&key).unwrap() + key.len();
    let j = tag[i..].find('"').unwrap();
    &tag[i..i + j]
}

#[test]
fn imaginary_plane_figure_lists_every_arc() {
    for m in [2, 6, 10] {
        let p = &common::pipeline(m).polyhedron;
        let svg = imaginary_plane_svg(p);
        let arcs: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"arc\"")).collect();
        let want = p.imaginary_plane_arcs();
        assert_eq!(arcs.len(), want.len(), "m = {m}");
        for (line, (h, lo, hi)) in arcs.iter().zip(&want) {
            assert_eq!(attr(line, "data-center"), h.center.to_string());
            assert_eq!(attr(line, "data-radius-sq"), h.radius_sq.to_string());
            assert_eq!(attr(line, "data-b-range"), format!("{lo},{hi}"));
        }
        assert_eq!(svg.matches("class=\"translate\"").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn bottom_facets_figure_has_one_polygon_per_floor_face() {
    for m in [2, 6, 10] {
        let p = &common::pipeline(m).polyhedron;
        let svg = bottom_facets_svg(p);
        let floor: Vec<_> = p
            .faces
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match &f.carrier {
                FaceCarrier::Hemisphere(s) => Some((i, s)),
                FaceCarrier::Wall(_) => None,
            })
            .collect();
        let facets: Vec<&str> = svg.lines().filter(|l| l.contains("class=\"facet\"")).collect();
        assert_eq!(facets.len(), floor.len(), "m = {m}");
        for (line, (i, s)) in facets.iter().zip(&floor) {
            assert_eq!(attr(line, "data-face"), i.to_string());
            assert_eq!(attr(line, "data-radius-sq"), s.radius_sq.to_string());
        }
    }
}

#[test]
fn figures_are_deterministic() {
    let p = &common::pipeline(2).polyhedron;
    let again = Pipeline::compute(2).unwrap();
    assert_eq!(imaginary_plane_svg(p), imaginary_plane_svg(&again.polyhedron));
    assert_eq!(bottom_facets_svg(p), bottom_facets_svg(&again.polyhedron));
}
