//! SVG rendering of 2-d designs.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lds::CandidateSet;
use crate::metrics::{minimax_detail, minimax_points};
use crate::mmc::{nearest, Design};
use crate::points::PointSet;
use crate::region::Region;

fn project(points: &PointSet, c: [usize; 2]) -> PointSet {
    let rows: Vec<[f64; 2]> = points.rows().map(|r| [r[c[0]], r[c[1]]]).collect();
    PointSet::from_rows(&rows).expect("two coordinates per row")
}

/// SVG of the design inside its region, with the segment joining the
/// candidate farthest from the design to its nearest design point.
///
/// Drawing coordinates are data coordinates (the y axis is flipped by a group
/// transform), so the witness segment's endpoints can be read back from the
/// `x1, y1, x2, y2` attributes of the element with id `witness`. With
/// `coords`, the design and candidates are projected onto those two
/// coordinates first.
pub fn render_svg(design: &Design, candidates: &CandidateSet, coords: Option<[usize; 2]>) -> Result<String> {
    let region = candidates.region();
    let (pts, distance, witness, near) = match coords {
        None => {
            if design.dim() != 2 {
                return Err(Error::InvalidConfig("plot needs a 2-d design; pass coordinates to project".into()));
            }
            let m = minimax_detail(design, candidates)?;
            (design.points().clone(), m.distance, m.witness_point, m.nearest_point)
        }
        Some(c) => {
            let pd = project(design.points(), c);
            let pc = project(candidates.points(), c);
            let (distance, j) = minimax_points(&pc, &pd);
            let (i, _) = nearest(pc.row(j), &pd);
            let (w, m) = (pc.row(j).to_vec(), pd.row(i).to_vec());
            (pd, distance, w, m)
        }
    };

    let (lo, hi) = match coords {
        None => region.bounding_box(),
        Some(c) => {
            let (l, h) = region.bounding_box();
            (vec![l[c[0]], l[c[1]]], vec![h[c[0]], h[c[1]]])
        }
    };
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let margin = 0.05 * span;
    let caption = 0.08 * span;
    let stroke = 0.004 * span;
    let (vx, vy) = (lo[0] - margin, lo[1] - margin);
    let (vw, vh) = (hi[0] - lo[0] + 2.0 * margin, hi[1] - lo[1] + 2.0 * margin + caption);

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}" width="600" height="{}">"#,
        (600.0 * vh / vw).round()
    )
    .unwrap();
    writeln!(s, "<title>{}-point design, minimax distance {distance:.6}</title>", pts.len()).unwrap();
    writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, lo[1] + hi[1]).unwrap();
    let outline = format!(r#"fill="none" stroke="black" stroke-width="{stroke}""#);
    match (region, coords) {
        (Region::Hypercube(_), None) => {
            writeln!(s, r#"<rect id="region" x="0" y="0" width="1" height="1" {outline}/>"#).unwrap()
        }
        (Region::Simplex(_), None) => {
            writeln!(s, r#"<polygon id="region" points="0,0 0,1 1,1" {outline}/>"#).unwrap()
        }
        (Region::Ball(_), None) => writeln!(s, r#"<circle id="region" cx="0" cy="0" r="1" {outline}/>"#).unwrap(),
        (Region::Polygon(poly), None) => {
            let v: Vec<String> = poly.vertices().iter().map(|v| format!("{},{}", v[0], v[1])).collect();
            writeln!(s, r#"<polygon id="region" points="{}" {outline}/>"#, v.join(" ")).unwrap()
        }
        (_, Some(_)) => writeln!(
            s,
            r#"<rect id="region" x="{}" y="{}" width="{}" height="{}" stroke-dasharray="{}" {outline}/>"#,
            lo[0],
            lo[1],
            hi[0] - lo[0],
            hi[1] - lo[1],
            4.0 * stroke
        )
        .unwrap(),
    }
    writeln!(s, r#"<g id="design" fill="black">"#).unwrap();
    for r in pts.rows() {
        writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, r[0], r[1], 0.012 * span).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(
        s,
        r#"<line id="witness" x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="{}"/>"#,
        witness[0],
        witness[1],
        near[0],
        near[1],
        1.5 * stroke
    )
    .unwrap();
    writeln!(s, "</g>").unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="{}" font-family="sans-serif">minimax = {distance:.6} (n = {}, N = {})</text>"#,
        lo[0],
        hi[1] + margin + 0.6 * caption,
        0.45 * caption,
        pts.len(),
        candidates.len()
    )
    .unwrap();
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}
