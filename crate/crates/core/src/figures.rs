//! SVG cross-sections of the fundamental polyhedron.
//!
//! Geometry is drawn from exact data; every arc and facet also carries its
//! exact description in `data-` attributes so that figures can be compared
//! without parsing floating point.

use std::fmt::Write;

use num_traits::{ToPrimitive, Zero};

use crate::number_field::Rational;
use crate::polyhedron::{FaceCarrier, FundamentalPolyhedron};

const SCALE: f64 = 400.0;

fn f(x: &Rational) -> f64 {
    x.to_f64().expect("finite rational")
}

fn num(x: f64) -> String {
    let s = format!("{:.3}", x);
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn header(out: &mut String, x0: f64, y0: f64, w: f64, h: f64, title: &str) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(x0),
        num(y0),
        num(w),
        num(h),
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(out, "<title>{}</title>", title).unwrap();
}

/// The polyhedron cut by the vertical plane `Re z = 0`: one arc per floor
/// carrier crossing that plane, with the walls of the translates of the
/// period rectangle dashed.
///
/// Horizontal coordinate: `Im z`; vertical: height above the plane.
pub fn imaginary_plane_svg(p: &FundamentalPolyhedron) -> String {
    let m = p.ring.m as f64;
    let sm = m.sqrt();
    let arcs = p.imaginary_plane_arcs();
    let b_max = &p.domain.b_max;
    let (t_lo, t_hi) = (0.0, f(b_max) * sm);
    let top = arcs
        .iter()
        .map(|(h, _, _)| (f(&h.radius_sq) - f(&h.center.a).powi(2)).max(0.0).sqrt())
        .fold(1.0f64, f64::max)
        * 1.25;
    let pad = 0.1;
    let mut out = String::new();
    header(
        &mut out,
        (t_lo - pad) * SCALE,
        -(top + pad) * SCALE,
        (t_hi - t_lo + 2.0 * pad) * SCALE,
        (top + 2.0 * pad) * SCALE,
        &format!("Re z = 0 section, m = {}", p.ring.m),
    );
    writeln!(
        out,
        r#"<line class="axis" x1="{}" y1="0.000" x2="{}" y2="0.000" stroke="black" stroke-width="1"/>"#,
        num((t_lo - pad) * SCALE),
        num((t_hi + pad) * SCALE)
    )
    .unwrap();
    for b in [Rational::zero(), b_max.clone()] {
        let x = num(f(&b) * sm * SCALE);
        writeln!(
            out,
            r#"<line class="translate" data-b="{}" x1="{}" y1="0.000" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6,4"/>"#,
            b,
            x,
            x,
            num(-top * SCALE)
        )
        .unwrap();
    }
    for (h, lo, hi) in &arcs {
        // circle in the (Im z, height) plane
        let r2 = f(&h.radius_sq) - f(&h.center.a).powi(2);
        let r = r2.max(0.0).sqrt();
        let c = f(&h.center.b) * sm;
        let height = |b: f64| (r2 - (b * sm - c).powi(2)).max(0.0).sqrt();
        let (b0, b1) = (f(lo), f(hi));
        writeln!(
            out,
            r#"<path class="arc" data-center="{}" data-radius-sq="{}" data-b-range="{},{}" d="M {} {} A {} {} 0 0 1 {} {}" fill="none" stroke="black" stroke-width="2"/>"#,
            h.center,
            h.radius_sq,
            lo,
            hi,
            num(b0 * sm * SCALE),
            num(-height(b0) * SCALE),
            num(r * SCALE),
            num(r * SCALE),
            num(b1 * sm * SCALE),
            num(-height(b1) * SCALE)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Vertical projection of the floor: one closed polygon per bottom facet.
/// Facet edges are intersections of two spheres, so their shadows are straight.
pub fn bottom_facets_svg(p: &FundamentalPolyhedron) -> String {
    let sm = (p.ring.m as f64).sqrt();
    let to_xy = |a: &Rational, b: &Rational| (f(a) * SCALE, -f(b) * sm * SCALE);
    let pad = 0.1 * SCALE;
    let (w, h) = (SCALE, f(&p.domain.b_max) * sm * SCALE);
    let mut out = String::new();
    header(&mut out, -w / 2.0 - pad, -h - pad, w + 2.0 * pad, h + 2.0 * pad, &format!("bottom facets, m = {}", p.ring.m));
    let rect: Vec<String> = p
        .domain
        .polygon()
        .iter()
        .map(|z| {
            let (x, y) = to_xy(&z.a, &z.b);
            format!("{},{}", num(x), num(y))
        })
        .collect();
    writeln!(
        out,
        r#"<polygon class="domain" points="{}" fill="none" stroke="gray" stroke-dasharray="6,4"/>"#,
        rect.join(" ")
    )
    .unwrap();
    for (i, face) in p.faces.iter().enumerate() {
        let FaceCarrier::Hemisphere(s) = &face.carrier else { continue };
        let pts: Vec<String> = face
            .cycle
            .iter()
            .filter_map(|v| p.boundary_point(*v).z().cloned())
            .map(|z| {
                let (x, y) = to_xy(&z.a, &z.b);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let shade = 200 - 40 * (i % 4);
        writeln!(
            out,
            r#"<polygon class="facet" data-face="{}" data-center="{}" data-radius-sq="{}" points="{}" fill="rgb({},{},255)" stroke="black" stroke-width="1"/>"#,
            i,
            s.center,
            s.radius_sq,
            pts.join(" "),
            shade,
            shade
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
