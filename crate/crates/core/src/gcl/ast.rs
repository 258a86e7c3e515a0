use std::fmt;

use indexmap::IndexMap;

/// A numeric argument: a literal or the name of a number object.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Lit(f64),
    Name(String),
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Lit(v) => write!(f, "{v}"),
            Num::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkStyle {
    Cmark,
    CmarkT,
    CmarkB,
    MarkT,
}

impl MarkStyle {
    pub fn keyword(self) -> &'static str {
        match self {
            MarkStyle::Cmark => "cmark",
            MarkStyle::CmarkT => "cmark_t",
            MarkStyle::CmarkB => "cmark_b",
            MarkStyle::MarkT => "mark_t",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Procedure {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    /// `point n x y`, optionally with a second coordinate pair for GCLC animation.
    Point {
        name: String,
        x: Num,
        y: Num,
        to: Option<(Num, Num)>,
    },
    Towards {
        name: String,
        a: String,
        b: String,
        t: Num,
    },
    Midpoint {
        name: String,
        a: String,
        b: String,
    },
    Line {
        name: String,
        a: String,
        b: String,
    },
    Circle {
        name: String,
        center: String,
        through: String,
    },
    Intersec2 {
        first: String,
        second: String,
        o1: String,
        o2: String,
    },
    Distance {
        name: String,
        a: String,
        b: String,
    },
    Random {
        name: String,
        lo: Num,
        hi: Num,
    },
    DrawSegment(String, String),
    DrawLine(String, String),
    DrawCircle(String),
    DrawRightAngle {
        vertex: String,
        a: String,
        b: String,
    },
    DrawParallel([String; 4]),
    Mark(MarkStyle, String),
    Procedure(Procedure),
    Call {
        name: String,
        args: Vec<String>,
    },
    Include(String),
    AnimationFrames(u32, u32),
    HideLayersFrom(String),
    Layer(usize),
    /// Full-line comment; the text after `%`.
    Comment(String),
}

/// A parsed file with its includes resolved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GclProgram {
    pub stmts: Vec<Stmt>,
    /// Included file name → its statements, in first-inclusion order.
    pub included: IndexMap<String, Vec<Stmt>>,
}

impl GclProgram {
    /// Every procedure definition, own and included.
    pub fn procedures(&self) -> IndexMap<&str, &Procedure> {
        let mut out = IndexMap::new();
        for s in self.stmts.iter().chain(self.included.values().flatten()) {
            if let Stmt::Procedure(p) = s {
                out.insert(p.name.as_str(), p);
            }
        }
        out
    }

    /// The file's own text, includes left as `include` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.stmts {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

fn braces(f: &mut fmt::Formatter<'_>, xs: &[String]) -> fmt::Result {
    f.write_str("{")?;
    for x in xs {
        write!(f, " {x}")?;
    }
    f.write_str(" }")
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Point { name, x, y, to } => {
                write!(f, "point {name} {x} {y}")?;
                if let Some((x2, y2)) = to {
                    write!(f, " {x2} {y2}")?;
                }
                Ok(())
            }
            Stmt::Towards { name, a, b, t } => write!(f, "towards {name} {a} {b} {t}"),
            Stmt::Midpoint { name, a, b } => write!(f, "midpoint {name} {a} {b}"),
            Stmt::Line { name, a, b } => write!(f, "line {name} {a} {b}"),
            Stmt::Circle { name, center, through } => write!(f, "circle {name} {center} {through}"),
            Stmt::Intersec2 { first, second, o1, o2 } => write!(f, "intersec2 {first} {second} {o1} {o2}"),
            Stmt::Distance { name, a, b } => write!(f, "distance {name} {a} {b}"),
            Stmt::Random { name, lo, hi } => write!(f, "random {name} {lo} {hi}"),
            Stmt::DrawSegment(a, b) => write!(f, "drawsegment {a} {b}"),
            Stmt::DrawLine(a, b) => write!(f, "drawline {a} {b}"),
            Stmt::DrawCircle(c) => write!(f, "drawcircle {c}"),
            Stmt::DrawRightAngle { vertex, a, b } => write!(f, "drawrightangle {vertex} {a} {b}"),
            Stmt::DrawParallel([a, b, c, d]) => write!(f, "drawparallel {a} {b} {c} {d}"),
            Stmt::Mark(style, p) => write!(f, "{} {p}", style.keyword()),
            Stmt::Procedure(p) => {
                write!(f, "procedure {} ", p.name)?;
                braces(f, &p.params)?;
                f.write_str(" {\n")?;
                for s in &p.body {
                    for line in s.to_string().lines() {
                        writeln!(f, "  {line}")?;
                    }
                }
                f.write_str("}")
            }
            Stmt::Call { name, args } => {
                write!(f, "call {name} ")?;
                braces(f, args)
            }
            Stmt::Include(file) => write!(f, "include {file}"),
            Stmt::AnimationFrames(n, m) => write!(f, "animation_frames {n} {m}"),
            Stmt::HideLayersFrom(d) => write!(f, "hide_layers_from {d}"),
            Stmt::Layer(k) => write!(f, "layer {k}"),
            Stmt::Comment(text) => write!(f, "%{text}"),
        }
    }
}
