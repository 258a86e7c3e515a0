use std::fmt::Write;

use super::eval::{Frame, Scene};
use crate::interp::draw::{DrawKind, Placement, Role};
use crate::interp::geom::GeoPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStyle {
    /// Pixels per scene unit.
    pub scale: f64,
    pub mark_radius_px: f64,
    pub font_px: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            scale: 10.0,
            mark_radius_px: 2.5,
            font_px: 12.0,
        }
    }
}

fn f(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Clips the infinite line through p, q to the box.
fn clip(p: GeoPoint, q: GeoPoint, lo: GeoPoint, hi: GeoPoint) -> Option<(GeoPoint, GeoPoint)> {
    let d = q.sub(p);
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (o, v, a, b) in [(p.x, d.x, lo.x, hi.x), (p.y, d.y, lo.y, hi.y)] {
        if v.abs() < 1e-12 {
            if o < a || o > b {
                return None;
            }
            continue;
        }
        let (s0, s1) = ((a - o) / v, (b - o) / v);
        t0 = t0.max(s0.min(s1));
        t1 = t1.min(s0.max(s1));
    }
    (t0.is_finite() && t0 <= t1).then(|| (p.add(d.scale(t0)), p.add(d.scale(t1))))
}

fn unit(v: GeoPoint) -> GeoPoint {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v.scale(1.0 / n)
    }
}

/// One SVG document; `None` draws every layer in black.
pub fn render_svg(scene: &Scene, frame: Option<Frame>, style: &RenderStyle) -> String {
    let (lo, hi) = scene.bbox();
    let px = 1.0 / style.scale;
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        f(w * style.scale),
        f(h * style.scale),
        f(lo.x),
        f(-hi.y),
        f(w),
        f(h)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        f(lo.x),
        f(-hi.y),
        f(w),
        f(h)
    );
    let xy = |p: GeoPoint| (f(p.x), f(-p.y));
    for op in &scene.ops {
        if frame.is_some_and(|fr| !fr.shows(op.layer)) {
            continue;
        }
        let color = if frame.is_some_and(|fr| fr.highlights(op.layer)) {
            "red"
        } else {
            "black"
        };
        let width = match op.role {
            Role::Construction => px,
            Role::Highlight => 1.5 * px,
        };
        let stroke = format!(r#"stroke="{color}" stroke-width="{}" fill="none""#, f(width));
        let seg = |out: &mut String, p: GeoPoint, q: GeoPoint| {
            let ((x1, y1), (x2, y2)) = (xy(p), xy(q));
            let _ = writeln!(out, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {stroke}/>"#);
        };
        match &op.kind {
            DrawKind::Segment { p, q } => seg(&mut out, *p, *q),
            DrawKind::Line { p, q } => {
                if let Some((a, b)) = clip(*p, *q, lo, hi) {
                    seg(&mut out, a, b);
                }
            }
            DrawKind::Circle { center, through } => {
                let (cx, cy) = xy(*center);
                let _ = writeln!(
                    out,
                    r#"<circle cx="{cx}" cy="{cy}" r="{}" {stroke}/>"#,
                    f(center.dist(*through))
                );
            }
            DrawKind::Mark {
                at,
                label,
                circled,
                placement,
            } => {
                let (cx, cy) = xy(*at);
                if *circled {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{cx}" cy="{cy}" r="{}" stroke="{color}" stroke-width="{}" fill="white"/>"#,
                        f(style.mark_radius_px * px),
                        f(px)
                    );
                }
                let (dx, dy, anchor) = match placement {
                    Placement::Right => (4.0, 4.0, "start"),
                    Placement::Top => (0.0, -6.0, "middle"),
                    Placement::Bottom => (0.0, 6.0 + style.font_px, "middle"),
                };
                let text = label.replace('&', "&amp;").replace('<', "&lt;");
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{anchor}" fill="{color}">{text}</text>"#,
                    f(at.x + dx * px),
                    f(-at.y + dy * px),
                    f(style.font_px * px)
                );
            }
            DrawKind::RightAngle {
                vertex,
                toward_a,
                toward_b,
            } => {
                let (va, vb) = (toward_a.sub(*vertex), toward_b.sub(*vertex));
                let s = (0.25 * va.norm().min(vb.norm())).min(1.0);
                let (u, v) = (unit(va).scale(s), unit(vb).scale(s));
                let pts = [vertex.add(u), vertex.add(u).add(v), vertex.add(v)];
                let list: Vec<String> = pts
                    .iter()
                    .map(|&p| {
                        let (x, y) = xy(p);
                        format!("{x},{y}")
                    })
                    .collect();
                let _ = writeln!(out, r#"<polyline points="{}" {stroke}/>"#, list.join(" "));
            }
            DrawKind::ParallelTicks { a, b, c, d } => {
                for (p, q) in [(*a, *b), (*c, *d)] {
                    seg(&mut out, p, q);
                    let dir = unit(q.sub(p));
                    let n = GeoPoint::new(-dir.y, dir.x);
                    let s = (0.1 * p.dist(q)).min(0.6);
                    let tip = p.add(q).scale(0.5).add(dir.scale(s / 2.0));
                    let back = tip.sub(dir.scale(s));
                    seg(&mut out, back.add(n.scale(s / 2.0)), tip);
                    seg(&mut out, back.sub(n.scale(s / 2.0)), tip);
                }
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
