//! Static SVG rendering of planar instances.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::Simplex;
use crate::rational::Point;
use crate::tangents::{ClosedSet, TangentCertificate};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct View {
    lo: [f64; 2],
    scale: f64,
}

impl View {
    fn map(&self, p: &[f64]) -> (f64, f64) {
        let x = MARGIN + (p[0] - self.lo[0]) * self.scale;
        let y = SIZE - MARGIN - (p[1] - self.lo[1]) * self.scale;
        (x, y)
    }
}

fn xy(p: &Point) -> [f64; 2] {
    let v = p.to_f64();
    [v[0], v[1]]
}

fn polygon(out: &mut String, view: &View, s: &Simplex, style: &str) {
    let pts: Vec<(f64, f64)> = s.vertices().iter().map(|v| view.map(&xy(v))).collect();
    match pts.len() {
        1 => {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" {style}/>"#,
                pts[0].0, pts[0].1
            );
        }
        2 => {
            let _ = writeln!(
                out,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke-width="3" {style}/>"#,
                pts[0].0, pts[0].1, pts[1].0, pts[1].1
            );
        }
        _ => {
            let list: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            let _ = writeln!(out, r#"<polygon points="{}" {style}/>"#, list.join(" "));
        }
    }
}

/// Render `X` and, optionally, a certificate's `S`, `F` and tangent segment.
/// Inputs outside the plane need `force_projection`, which draws the first
/// two coordinates.
pub fn plot2d(
    x: &ClosedSet,
    cert: Option<&TangentCertificate>,
    force_projection: bool,
) -> Result<String> {
    let n = x.dim();
    if n != 2 && !force_projection {
        return Err(Error::Precondition(format!(
            "plot2d draws planar sets; X lives in dimension {n} (use the forced projection)"
        )));
    }
    if n < 2 {
        return Err(Error::Precondition(
            "cannot project a set of dimension below 2".into(),
        ));
    }
    let mut all: Vec<[f64; 2]> = x.isolated_points().map(xy).collect();
    if let Some(q) = x.polyhedral_part() {
        all.extend(
            q.generators()
                .iter()
                .flat_map(|g| g.vertices().iter().map(xy)),
        );
    }
    let chain = match cert {
        Some(c) => {
            all.extend(c.s.vertices().iter().map(xy));
            c.c_spec()?.chain_vertices()
        }
        None => Vec::new(),
    };
    all.extend(chain.iter().map(xy));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &all {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if all.is_empty() {
        lo = [0.0; 2];
        hi = [1.0; 2];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let view = View {
        lo,
        scale: (SIZE - 2.0 * MARGIN) / span,
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    if n != 2 {
        let _ = writeln!(out, "<!-- projection onto the first two coordinates -->");
    }
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(q) = x.polyhedral_part() {
        for g in q.generators() {
            polygon(&mut out, &view, g, r##"fill="#d9d9d9" stroke="#808080""##);
        }
    }
    if let Some(c) = cert {
        polygon(
            &mut out,
            &view,
            &c.s,
            r##"fill="#f4cccc" fill-opacity="0.6" stroke="#cc0000""##,
        );
        polygon(
            &mut out,
            &view,
            &c.f,
            r##"fill="#9fc5e8" stroke="#0b5394""##,
        );
        for w in chain.windows(2) {
            let (a, b) = (view.map(&xy(&w[0])), view.map(&xy(&w[1])));
            let _ = writeln!(
                out,
                r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#38761d" stroke-width="2"/>"##,
                a.0, a.1, b.0, b.1
            );
        }
    }
    for p in x.samples().iter().flat_map(|s| s.points()) {
        let (cx, cy) = view.map(&xy(p));
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="1.5" fill="black"/>"#
        );
    }
    for p in x.declared_limits() {
        let (cx, cy) = view.map(&xy(p));
        let _ = writeln!(
            out,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="3.5" fill="none" stroke="#000000"/>"##
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangents::{MonomialGenerator, PointSequence};

    #[test]
    fn three_dimensional_sets_need_forcing() {
        let g = MonomialGenerator {
            exponents: vec![2, 4, 1],
            coefficients: None,
            from: 2,
            to: 20,
            step: 1,
        };
        let seq = PointSequence::from_generator(g, Point::from_ints(&[0, 0, 0])).unwrap();
        let x = ClosedSet::new(None, vec![seq], vec![Point::from_ints(&[0, 0, 0])]).unwrap();
        assert!(plot2d(&x, None, false).is_err());
        let svg = plot2d(&x, None, true).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("projection"));
    }
}
