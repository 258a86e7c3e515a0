use serde::{Deserialize, Serialize};

use super::geom::GeoPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    Right,
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Construction,
    /// Decorations stressing a derived fact.
    Highlight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DrawKind {
    Mark {
        at: GeoPoint,
        label: String,
        circled: bool,
        placement: Placement,
    },
    Segment {
        p: GeoPoint,
        q: GeoPoint,
    },
    /// Infinite line through two points, clipped at render time.
    Line {
        p: GeoPoint,
        q: GeoPoint,
    },
    Circle {
        center: GeoPoint,
        through: GeoPoint,
    },
    RightAngle {
        vertex: GeoPoint,
        toward_a: GeoPoint,
        toward_b: GeoPoint,
    },
    /// Segments ab and cd with matching arrow ticks.
    ParallelTicks {
        a: GeoPoint,
        b: GeoPoint,
        c: GeoPoint,
        d: GeoPoint,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawOp {
    pub kind: DrawKind,
    pub layer: usize,
    pub role: Role,
}

impl DrawKind {
    /// Points the op must show, for bounding boxes.
    pub fn extent(&self) -> Vec<GeoPoint> {
        match self {
            DrawKind::Mark { at, .. } => vec![*at],
            DrawKind::Segment { p, q } | DrawKind::Line { p, q } => vec![*p, *q],
            DrawKind::Circle { center, through } => {
                let r = center.dist(*through);
                vec![
                    GeoPoint::new(center.x - r, center.y - r),
                    GeoPoint::new(center.x + r, center.y + r),
                ]
            }
            DrawKind::RightAngle { vertex, .. } => vec![*vertex],
            DrawKind::ParallelTicks { a, b, c, d } => vec![*a, *b, *c, *d],
        }
    }
}
