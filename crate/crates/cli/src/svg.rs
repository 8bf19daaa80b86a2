//! Deterministic SVG rendering of a portrait document on the Poincaré disk.

use std::fmt::Write;

use bh_core::equilibria::EquilibriumKind;
use bh_core::portrait::{PortraitDocument, Stability};

pub const SIZE: f64 = 800.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 380.0;

fn to_canvas(p: [f64; 2]) -> (f64, f64) {
    (CENTER + RADIUS * p[0], CENTER - RADIUS * p[1])
}

fn polyline(out: &mut String, pts: &[[f64; 2]], class: &str) {
    if pts.len() < 2 {
        return;
    }
    out.push_str("<polyline class=\"");
    out.push_str(class);
    out.push_str("\" points=\"");
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = to_canvas(p);
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.3},{y:.3}");
    }
    out.push_str("\"/>\n");
}

fn marker_fill(kind: &EquilibriumKind) -> &'static str {
    match kind {
        EquilibriumKind::StableFocus | EquilibriumKind::StableNode => "#1f4e9c",
        EquilibriumKind::UnstableNode => "#c0392b",
        EquilibriumKind::Saddle => "#ffffff",
        EquilibriumKind::SaddleNode | EquilibriumKind::Sectors(_) => "#7f7f7f",
    }
}

/// Same document in, same bytes out: no clocks, maps or float formatting
/// that depends on locale.
pub fn render(doc: &PortraitDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">",
        s = SIZE
    );
    out.push_str(
        "<style>\
.orbit{fill:none;stroke:#b0b0b0;stroke-width:0.6}\
.unstable{fill:none;stroke:#c0392b;stroke-width:1.6}\
.stable{fill:none;stroke:#1f4e9c;stroke-width:1.6}\
.wave{fill:none;stroke:#1e8449;stroke-width:3}\
.eq{stroke:#000;stroke-width:1}\
text{font-family:sans-serif;font-size:12px}\
</style>\n",
    );
    let p = &doc.params;
    let _ = writeln!(
        out,
        "<title>n={} k={} c={} class {}</title>",
        p.n,
        p.k,
        p.c,
        doc.class.class.tag.as_str()
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let _ = writeln!(
        out,
        "<circle cx=\"{CENTER:.3}\" cy=\"{CENTER:.3}\" r=\"{RADIUS:.3}\" fill=\"none\" stroke=\"#000\" stroke-width=\"1.5\"/>"
    );
    for orbit in &doc.orbits {
        polyline(&mut out, orbit, "orbit");
    }
    for s in &doc.separatrices {
        let class = match s.branch.stability {
            Stability::Unstable => "unstable",
            Stability::Stable => "stable",
        };
        polyline(&mut out, &s.points, class);
    }
    for h in &doc.highlight {
        polyline(&mut out, h, "wave");
    }
    for m in &doc.equilibria {
        let (x, y) = to_canvas([m.x, m.y]);
        let _ = writeln!(
            out,
            "<circle class=\"eq\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"5.000\" fill=\"{}\"/>",
            marker_fill(&m.kind)
        );
        // Labels sit outside the disk for points at infinity.
        let r = m.x.hypot(m.y);
        let (lx, ly) = if r > 0.99 {
            to_canvas([m.x * 1.035, m.y * 1.035])
        } else {
            (x + 7.0, y - 7.0)
        };
        let _ = writeln!(
            out,
            "<text x=\"{lx:.3}\" y=\"{ly:.3}\" text-anchor=\"middle\">{} ({})</text>",
            m.label, m.glyph
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"10.000\" y=\"20.000\">class {} ({})</text>",
        doc.class.class.tag.as_str(),
        doc.class.class.equivalence_class.as_str()
    );
    out.push_str("</svg>\n");
    out
}
