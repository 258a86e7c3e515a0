use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::{GclProgram, MarkStyle, Num, Procedure, Stmt};
use super::GclError;
use crate::interp::draw::{DrawKind, DrawOp, Placement, Role};
use crate::interp::geom::{self, GeoPoint, Which};

const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obj {
    Point(GeoPoint),
    Line(GeoPoint, GeoPoint),
    Circle { center: GeoPoint, through: GeoPoint },
    Number(f64),
}

struct Slot {
    name: String,
    obj: Option<Obj>,
}

/// Executes statements against a store of named objects.
///
/// Procedure parameters alias the caller's slots; any other name assigned
/// inside a call is local to it.
pub struct Machine {
    procs: HashMap<String, Procedure>,
    included: IndexMap<String, Vec<Stmt>>,
    done_includes: HashSet<String>,
    slots: Vec<Slot>,
    frames: Vec<IndexMap<String, usize>>,
    pub ops: Vec<DrawOp>,
    pub layer: usize,
    pub rng: ChaCha8Rng,
    pub frame_count: Option<u32>,
    pub hide_from: Option<String>,
}

impl Machine {
    pub fn new(procs: impl IntoIterator<Item = Procedure>, rng: ChaCha8Rng) -> Self {
        Machine {
            procs: procs.into_iter().map(|p| (p.name.clone(), p)).collect(),
            included: IndexMap::new(),
            done_includes: HashSet::new(),
            slots: Vec::new(),
            frames: vec![IndexMap::new()],
            ops: Vec::new(),
            layer: 0,
            rng,
            frame_count: None,
            hide_from: None,
        }
    }

    pub fn for_program(p: &GclProgram, seed: u64) -> Self {
        let mut m = Machine::new(p.procedures().into_values().cloned(), ChaCha8Rng::seed_from_u64(seed));
        m.included = p.included.clone();
        m
    }

    pub fn add_procedure(&mut self, p: Procedure) {
        self.procs.insert(p.name.clone(), p);
    }

    pub fn has_procedure(&self, name: &str) -> bool {
        self.procs.contains_key(name)
    }

    /// Binds `name` in the current frame.
    pub fn define(&mut self, name: &str, obj: Obj) {
        let frame = self.frames.last_mut().expect("frame");
        match frame.get(name) {
            Some(&i) => self.slots[i].obj = Some(obj),
            None => {
                frame.insert(name.to_string(), self.slots.len());
                self.slots.push(Slot {
                    name: name.to_string(),
                    obj: Some(obj),
                });
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<Obj> {
        let &i = self.frames.last()?.get(name)?;
        self.slots[i].obj
    }

    pub fn point(&self, name: &str) -> Option<GeoPoint> {
        match self.get(name)? {
            Obj::Point(p) => Some(p),
            _ => None,
        }
    }

    /// Objects bound in the outermost frame, in definition order.
    pub fn globals(&self) -> IndexMap<String, Obj> {
        self.frames[0]
            .iter()
            .filter_map(|(n, &i)| self.slots[i].obj.map(|o| (n.clone(), o)))
            .collect()
    }

    pub fn run(&mut self, stmts: &[Stmt]) -> Result<(), GclError> {
        stmts.iter().try_for_each(|s| self.exec(s))
    }

    fn slot(&self, name: &str, cmd: &Stmt) -> Result<(usize, Obj), GclError> {
        let undefined = || GclError::UndefinedName {
            name: name.to_string(),
            command: cmd.to_string(),
        };
        let &i = self.frames.last().and_then(|f| f.get(name)).ok_or_else(undefined)?;
        Ok((i, self.slots[i].obj.ok_or_else(undefined)?))
    }

    fn wrong(name: &str, expected: &'static str, cmd: &Stmt) -> GclError {
        GclError::WrongKind {
            name: name.to_string(),
            expected,
            command: cmd.to_string(),
        }
    }

    fn pt(&self, name: &str, cmd: &Stmt) -> Result<GeoPoint, GclError> {
        match self.slot(name, cmd)?.1 {
            Obj::Point(p) => Ok(p),
            _ => Err(Self::wrong(name, "point", cmd)),
        }
    }

    fn label(&self, name: &str, cmd: &Stmt) -> Result<String, GclError> {
        Ok(self.slots[self.slot(name, cmd)?.0].name.clone())
    }

    fn num(&self, n: &Num, cmd: &Stmt) -> Result<f64, GclError> {
        match n {
            Num::Lit(v) => Ok(*v),
            Num::Name(name) => match self.slot(name, cmd)?.1 {
                Obj::Number(v) => Ok(v),
                _ => Err(Self::wrong(name, "number", cmd)),
            },
        }
    }

    fn draw(&mut self, kind: DrawKind, role: Role) {
        self.ops.push(DrawOp {
            kind,
            layer: self.layer,
            role,
        });
    }

    /// Draws from [0,1).
    pub fn random_unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    fn exec(&mut self, s: &Stmt) -> Result<(), GclError> {
        match s {
            Stmt::Point { name, x, y, .. } => {
                let p = GeoPoint::new(self.num(x, s)?, self.num(y, s)?);
                self.define(name, Obj::Point(p));
            }
            Stmt::Towards { name, a, b, t } => {
                let p = geom::towards(self.pt(a, s)?, self.pt(b, s)?, self.num(t, s)?);
                self.define(name, Obj::Point(p));
            }
            Stmt::Midpoint { name, a, b } => {
                let p = geom::midpoint(self.pt(a, s)?, self.pt(b, s)?);
                self.define(name, Obj::Point(p));
            }
            Stmt::Line { name, a, b } => {
                let obj = Obj::Line(self.pt(a, s)?, self.pt(b, s)?);
                self.define(name, obj);
            }
            Stmt::Circle { name, center, through } => {
                let obj = Obj::Circle {
                    center: self.pt(center, s)?,
                    through: self.pt(through, s)?,
                };
                self.define(name, obj);
            }
            Stmt::Distance { name, a, b } => {
                let d = self.pt(a, s)?.dist(self.pt(b, s)?);
                self.define(name, Obj::Number(d));
            }
            Stmt::Random { name, lo, hi } => {
                let (lo, hi) = (self.num(lo, s)?, self.num(hi, s)?);
                let v = lo + (hi - lo) * self.random_unit();
                self.define(name, Obj::Number(v));
            }
            Stmt::Intersec2 { first, second, o1, o2 } => {
                let (x, y) = self.intersect(o1, o2, s)?;
                self.define(first, Obj::Point(x));
                self.define(second, Obj::Point(y));
            }
            Stmt::DrawSegment(a, b) => {
                let (p, q) = (self.pt(a, s)?, self.pt(b, s)?);
                self.draw(DrawKind::Segment { p, q }, Role::Construction);
            }
            Stmt::DrawLine(a, b) => {
                let (p, q) = (self.pt(a, s)?, self.pt(b, s)?);
                self.draw(DrawKind::Line { p, q }, Role::Construction);
            }
            Stmt::DrawCircle(c) => match self.slot(c, s)?.1 {
                Obj::Circle { center, through } => {
                    self.draw(DrawKind::Circle { center, through }, Role::Construction)
                }
                _ => return Err(Self::wrong(c, "circle", s)),
            },
            Stmt::DrawRightAngle { vertex, a, b } => {
                let kind = DrawKind::RightAngle {
                    vertex: self.pt(vertex, s)?,
                    toward_a: self.pt(a, s)?,
                    toward_b: self.pt(b, s)?,
                };
                self.draw(kind, Role::Highlight);
            }
            Stmt::DrawParallel([a, b, c, d]) => {
                let kind = DrawKind::ParallelTicks {
                    a: self.pt(a, s)?,
                    b: self.pt(b, s)?,
                    c: self.pt(c, s)?,
                    d: self.pt(d, s)?,
                };
                self.draw(kind, Role::Highlight);
            }
            Stmt::Mark(style, p) => {
                let at = self.pt(p, s)?;
                let label = self.label(p, s)?;
                let (circled, placement) = match style {
                    MarkStyle::Cmark => (true, Placement::Right),
                    MarkStyle::CmarkT => (true, Placement::Top),
                    MarkStyle::CmarkB => (true, Placement::Bottom),
                    MarkStyle::MarkT => (false, Placement::Top),
                };
                self.draw(
                    DrawKind::Mark {
                        at,
                        label,
                        circled,
                        placement,
                    },
                    Role::Construction,
                );
            }
            Stmt::Procedure(_) | Stmt::Comment(_) => {}
            Stmt::Call { name, args } => self.call(name, args)?,
            Stmt::Include(file) => {
                if self.done_includes.insert(file.clone()) {
                    if let Some(stmts) = self.included.get(file).cloned() {
                        self.run(&stmts).map_err(|e| e.in_file(file))?;
                    }
                }
            }
            Stmt::AnimationFrames(n, _) => self.frame_count = Some(*n),
            Stmt::HideLayersFrom(d) => {
                self.slot(d, s)?;
                self.hide_from = Some(d.clone());
            }
            Stmt::Layer(k) => self.layer = *k,
        }
        Ok(())
    }

    /// Both points of `intersec2`.
    fn intersect(&self, o1: &str, o2: &str, s: &Stmt) -> Result<(GeoPoint, GeoPoint), GclError> {
        let geo = |e| GclError::Geometry {
            command: s.to_string(),
            source: e,
        };
        let both = |f: &dyn Fn(Which) -> Result<GeoPoint, geom::GeomError>| {
            Ok((f(Which::First).map_err(geo)?, f(Which::Second).map_err(geo)?))
        };
        match (self.slot(o1, s)?.1, self.slot(o2, s)?.1) {
            (Obj::Circle { center: c1, through: t1 }, Obj::Circle { center: c2, through: t2 }) => {
                both(&|w| geom::circle_circle(c1, t1, c2, t2, w))
            }
            (Obj::Line(p, q), Obj::Circle { center, through }) | (Obj::Circle { center, through }, Obj::Line(p, q)) => {
                both(&|w| geom::line_circle(p, q, center, center.dist(through), w))
            }
            (Obj::Line(p1, q1), Obj::Line(p2, q2)) => {
                let x = geom::line_line(p1, q1, p2, q2).map_err(geo)?;
                Ok((x, x))
            }
            (Obj::Line(..) | Obj::Circle { .. }, _) => Err(Self::wrong(o2, "line or circle", s)),
            _ => Err(Self::wrong(o1, "line or circle", s)),
        }
    }

    pub fn call(&mut self, name: &str, args: &[String]) -> Result<(), GclError> {
        let proc = self
            .procs
            .get(name)
            .cloned()
            .ok_or_else(|| GclError::UndefinedProcedure(name.to_string()))?;
        if proc.params.len() != args.len() {
            return Err(GclError::Arity {
                procedure: name.to_string(),
                expected: proc.params.len(),
                found: args.len(),
            });
        }
        if self.frames.len() > MAX_CALL_DEPTH {
            return Err(GclError::TooDeep(name.to_string()));
        }
        let mut frame = IndexMap::new();
        for (param, arg) in proc.params.iter().zip(args) {
            let caller = self.frames.last_mut().expect("frame");
            let i = match caller.get(arg) {
                Some(&i) => i,
                None => {
                    caller.insert(arg.clone(), self.slots.len());
                    self.slots.push(Slot {
                        name: arg.clone(),
                        obj: None,
                    });
                    self.slots.len() - 1
                }
            };
            frame.insert(param.clone(), i);
        }
        self.frames.push(frame);
        let r = self.run(&proc.body);
        self.frames.pop();
        r.map_err(|e| e.in_file(&format!("procedure {name}")))
    }
}

/// One animation frame: layers below `index` are shown, layer `index − 1`
/// in red.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub index: usize,
}

impl Frame {
    pub fn shows(self, layer: usize) -> bool {
        layer < self.index
    }

    pub fn highlights(self, layer: usize) -> bool {
        layer + 1 == self.index
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub objects: IndexMap<String, Obj>,
    pub ops: Vec<DrawOp>,
    pub declared_frames: Option<u32>,
}

impl Scene {
    pub fn point(&self, name: &str) -> Option<GeoPoint> {
        match self.objects.get(name)? {
            Obj::Point(p) => Some(*p),
            _ => None,
        }
    }

    /// Number of distinct layers, counting from 0 up to the highest used.
    pub fn layer_count(&self) -> usize {
        self.ops.iter().map(|o| o.layer + 1).max().unwrap_or(0)
    }

    pub fn frame_count(&self) -> usize {
        self.declared_frames
            .map_or(self.layer_count() + 1, |n| n as usize)
    }

    pub fn frames(&self) -> Vec<Frame> {
        (1..=self.frame_count()).map(|index| Frame { index }).collect()
    }

    /// (min, max) corners of the drawn geometry, padded by 5% of the larger side.
    pub fn bbox(&self) -> (GeoPoint, GeoPoint) {
        let pts: Vec<GeoPoint> = self.ops.iter().flat_map(|o| o.kind.extent()).collect();
        if pts.is_empty() {
            return (GeoPoint::new(-1., -1.), GeoPoint::new(1., 1.));
        }
        let fold = |f: fn(f64, f64) -> f64, g: fn(&GeoPoint) -> f64| {
            pts.iter().map(g).reduce(f).expect("nonempty")
        };
        let (x0, x1) = (fold(f64::min, |p| p.x), fold(f64::max, |p| p.x));
        let (y0, y1) = (fold(f64::min, |p| p.y), fold(f64::max, |p| p.y));
        let m = 0.05 * (x1 - x0).max(y1 - y0).max(1.0);
        (GeoPoint::new(x0 - m, y0 - m), GeoPoint::new(x1 + m, y1 + m))
    }
}

pub fn evaluate(p: &GclProgram, seed: u64) -> Result<Scene, GclError> {
    let mut m = Machine::for_program(p, seed);
    m.run(&p.stmts)?;
    Ok(Scene {
        objects: m.globals(),
        ops: m.ops,
        declared_frames: m.frame_count,
    })
}
