//! Self-contained SVG scatter plots of resonance clouds in the `mu` plane.
//!
//! The view is 800×800 and shows `|Re mu|, |Im mu| <= max(1.2 sqrt q, 2)`.
//! Reference geometry: the unit circle (blue), the circle of radius
//! `1/sqrt q` (green), the points `±sqrt q` (black) and `±1/sqrt q`
//! (green). Resonances are red dots whose area grows with multiplicity.

use std::fmt::Write;

use gofres_core::random::{ReferenceGeometry, ResonanceCloud};

pub const SIZE: f64 = 800.0;

/// Half-width of the plotted square.
pub fn extent(q: u64) -> f64 {
    (1.2 * (q as f64).sqrt()).max(2.0)
}

struct View {
    r: f64,
}

impl View {
    fn x(&self, re: f64) -> f64 {
        (re + self.r) / (2.0 * self.r) * SIZE
    }

    fn y(&self, im: f64) -> f64 {
        (self.r - im) / (2.0 * self.r) * SIZE
    }

    fn len(&self, d: f64) -> f64 {
        d / (2.0 * self.r) * SIZE
    }
}

/// The plot of one or more clouds over the same `q`.
pub fn render(q: u64, clouds: &[ResonanceCloud]) -> String {
    let view = View { r: extent(q) };
    let geo = ReferenceGeometry::new(q);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<defs><clipPath id="view"><rect x="0" y="0" width="{SIZE}" height="{SIZE}"/></clipPath></defs>"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(s, r##"<g clip-path="url(#view)">"##);
    let (cx, cy) = (view.x(0.0), view.y(0.0));
    let _ = writeln!(s, r##"<line x1="0" y1="{cy:.3}" x2="{SIZE}" y2="{cy:.3}" stroke="#bbbbbb" stroke-width="1"/>"##);
    let _ = writeln!(s, r##"<line x1="{cx:.3}" y1="0" x2="{cx:.3}" y2="{SIZE}" stroke="#bbbbbb" stroke-width="1"/>"##);
    for (radius, colour) in [(geo.unit_radius, "blue"), (geo.inner_radius, "green")] {
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
            view.len(radius)
        );
    }
    for (points, colour) in [(geo.cusp_points, "black"), (geo.funnel_points, "green")] {
        for x in points {
            let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{cy:.3}" r="5" fill="{colour}"/>"#, view.x(x));
        }
    }
    for cl in clouds {
        for p in &cl.points {
            let r = 2.5 * (p.multiplicity as f64).sqrt();
            let _ = writeln!(
                s,
                r#"<circle cx="{:.3}" cy="{:.3}" r="{r:.3}" fill="red" fill-opacity="0.7"/>"#,
                view.x(p.re),
                view.y(p.im)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let label = clouds
        .iter()
        .map(|c| format!("n={} q={} c={} f={} seed={}", c.spec.n, c.spec.q, c.spec.c, c.spec.f, c.spec.seed))
        .collect::<Vec<_>>()
        .join("; ");
    let _ = writeln!(s, r#"<text x="10" y="20" font-family="monospace" font-size="14">{label}</text>"#);
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use gofres_core::random::{CloudPoint, SurgerySpec};

    #[test]
    fn geometry() {
        assert_eq!(extent(2), 2.0);
        assert!((extent(6) - 1.2 * 6f64.sqrt()).abs() < 1e-15);
        let cloud = ResonanceCloud {
            spec: SurgerySpec::new(4, 2, 0, 6, 0),
            points: vec![CloudPoint { re: 0.0, im: 0.0, multiplicity: 4 }],
            reference: ReferenceGeometry::new(2),
        };
        let svg = render(2, &[cloud]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        // unit circle radius: 1 / 4 * 800
        assert!(svg.contains(r#"r="200.000" fill="none" stroke="blue""#));
        assert!(svg.contains(r#"<circle cx="400.000" cy="400.000" r="5.000" fill="red""#));
        assert_eq!(svg.matches(r#"r="5" fill="black""#).count(), 2);
        assert_eq!(svg.matches(r#"r="5" fill="green""#).count(), 2);
    }
}
