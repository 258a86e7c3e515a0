use std::collections::HashMap;
use std::path::PathBuf;

use indexmap::IndexMap;

use super::ast::{GclProgram, MarkStyle, Num, Procedure, Stmt};
use super::GclError;

/// Maps include names to file text.
pub trait Resolver {
    fn resolve(&self, name: &str) -> Option<String>;
}

impl Resolver for HashMap<String, String> {
    fn resolve(&self, name: &str) -> Option<String> {
        self.get(name).cloned()
    }
}

impl Resolver for IndexMap<String, String> {
    fn resolve(&self, name: &str) -> Option<String> {
        self.get(name).cloned()
    }
}

/// Resolves includes relative to a directory.
pub struct DirResolver(pub PathBuf);

impl Resolver for DirResolver {
    fn resolve(&self, name: &str) -> Option<String> {
        std::fs::read_to_string(self.0.join(name)).ok()
    }
}

/// Rejects every include.
pub struct NoIncludes;

impl Resolver for NoIncludes {
    fn resolve(&self, _: &str) -> Option<String> {
        None
    }
}

/// Tries each resolver in turn.
pub struct Chain<'a>(pub Vec<&'a dyn Resolver>);

impl Resolver for Chain<'_> {
    fn resolve(&self, name: &str) -> Option<String> {
        self.0.iter().find_map(|r| r.resolve(name))
    }
}

struct Line {
    no: usize,
    toks: Vec<String>,
    comment: Option<String>,
}

fn lex(text: &str) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('%') {
            out.push(Line {
                no: i + 1,
                toks: Vec::new(),
                comment: Some(rest.to_string()),
            });
            continue;
        }
        let code = raw.split('%').next().unwrap_or("");
        let toks: Vec<String> = code
            .replace('{', " { ")
            .replace('}', " } ")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if !toks.is_empty() {
            out.push(Line {
                no: i + 1,
                toks,
                comment: None,
            });
        }
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
}

impl Parser {
    fn syntax(no: usize, msg: impl Into<String>) -> GclError {
        GclError::Syntax {
            line: no,
            message: msg.into(),
        }
    }

    fn block(&mut self, in_proc: bool) -> Result<Vec<Stmt>, GclError> {
        let mut out = Vec::new();
        while self.pos < self.lines.len() {
            let line = &self.lines[self.pos];
            self.pos += 1;
            if let Some(c) = &line.comment {
                out.push(Stmt::Comment(c.clone()));
                continue;
            }
            if line.toks[0] == "}" {
                if in_proc && line.toks.len() == 1 {
                    return Ok(out);
                }
                return Err(Self::syntax(line.no, "unexpected '}'"));
            }
            if line.toks[0] == "procedure" {
                let (no, toks) = (line.no, line.toks.clone());
                out.push(self.procedure(no, &toks)?);
                continue;
            }
            out.push(command(line.no, &line.toks)?);
        }
        if in_proc {
            let last = self.lines.last().map_or(0, |l| l.no);
            return Err(Self::syntax(last, "unterminated procedure"));
        }
        Ok(out)
    }

    fn procedure(&mut self, no: usize, toks: &[String]) -> Result<Stmt, GclError> {
        let bad = || Self::syntax(no, "expected `procedure name { params } {`");
        let name = toks.get(1).filter(|n| is_ident(n)).ok_or_else(bad)?.clone();
        let (params, rest) = braced(&toks[2..]).ok_or_else(bad)?;
        if rest != ["{"] || !params.iter().all(|p| is_ident(p)) {
            return Err(bad());
        }
        let body = self.block(true)?;
        Ok(Stmt::Procedure(Procedure { name, params, body }))
    }
}

/// Splits `{ a b } rest` into the braced items and the remainder.
fn braced(toks: &[String]) -> Option<(Vec<String>, &[String])> {
    if toks.first()? != "{" {
        return None;
    }
    let end = toks.iter().position(|t| t == "}")?;
    Some((toks[1..end].to_vec(), &toks[end + 1..]))
}

fn num(no: usize, t: &str) -> Result<Num, GclError> {
    let numeric = t.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
    if numeric {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Num::Lit)
            .ok_or_else(|| Parser::syntax(no, format!("bad number `{t}`")))
    } else if is_ident(t) {
        Ok(Num::Name(t.to_string()))
    } else {
        Err(Parser::syntax(no, format!("bad number `{t}`")))
    }
}

fn int<T: std::str::FromStr>(no: usize, t: &str) -> Result<T, GclError> {
    t.parse().map_err(|_| Parser::syntax(no, format!("expected an integer, got `{t}`")))
}

fn command(no: usize, toks: &[String]) -> Result<Stmt, GclError> {
    let cmd = toks[0].as_str();
    let args = &toks[1..];
    let arity = |n: usize| -> Result<(), GclError> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Parser::syntax(no, format!("`{cmd}` takes {n} arguments, got {}", args.len())))
        }
    };
    let names = |from: usize, to: usize| -> Result<(), GclError> {
        match args[from..to].iter().find(|a| !is_ident(a)) {
            Some(a) => Err(Parser::syntax(no, format!("bad name `{a}`"))),
            None => Ok(()),
        }
    };
    let s = |i: usize| args[i].clone();
    let stmt = match cmd {
        "point" => {
            if args.len() != 3 && args.len() != 5 {
                return Err(Parser::syntax(no, "`point` takes 3 or 5 arguments"));
            }
            names(0, 1)?;
            let to = if args.len() == 5 {
                Some((num(no, &args[3])?, num(no, &args[4])?))
            } else {
                None
            };
            Stmt::Point {
                name: s(0),
                x: num(no, &args[1])?,
                y: num(no, &args[2])?,
                to,
            }
        }
        "towards" => {
            arity(4)?;
            names(0, 3)?;
            Stmt::Towards {
                name: s(0),
                a: s(1),
                b: s(2),
                t: num(no, &args[3])?,
            }
        }
        "random" => {
            arity(3)?;
            names(0, 1)?;
            Stmt::Random {
                name: s(0),
                lo: num(no, &args[1])?,
                hi: num(no, &args[2])?,
            }
        }
        "midpoint" | "line" | "circle" | "distance" => {
            arity(3)?;
            names(0, 3)?;
            let (name, a, b) = (s(0), s(1), s(2));
            match cmd {
                "midpoint" => Stmt::Midpoint { name, a, b },
                "line" => Stmt::Line { name, a, b },
                "circle" => Stmt::Circle {
                    name,
                    center: a,
                    through: b,
                },
                _ => Stmt::Distance { name, a, b },
            }
        }
        "intersec2" => {
            arity(4)?;
            names(0, 4)?;
            Stmt::Intersec2 {
                first: s(0),
                second: s(1),
                o1: s(2),
                o2: s(3),
            }
        }
        "drawsegment" | "drawline" => {
            arity(2)?;
            names(0, 2)?;
            if cmd == "drawsegment" {
                Stmt::DrawSegment(s(0), s(1))
            } else {
                Stmt::DrawLine(s(0), s(1))
            }
        }
        "drawcircle" | "hide_layers_from" => {
            arity(1)?;
            names(0, 1)?;
            if cmd == "drawcircle" {
                Stmt::DrawCircle(s(0))
            } else {
                Stmt::HideLayersFrom(s(0))
            }
        }
        "drawrightangle" => {
            arity(3)?;
            names(0, 3)?;
            Stmt::DrawRightAngle {
                vertex: s(0),
                a: s(1),
                b: s(2),
            }
        }
        "drawparallel" => {
            arity(4)?;
            names(0, 4)?;
            Stmt::DrawParallel([s(0), s(1), s(2), s(3)])
        }
        "cmark" | "cmark_t" | "cmark_b" | "mark_t" => {
            arity(1)?;
            names(0, 1)?;
            let style = match cmd {
                "cmark" => MarkStyle::Cmark,
                "cmark_t" => MarkStyle::CmarkT,
                "cmark_b" => MarkStyle::CmarkB,
                _ => MarkStyle::MarkT,
            };
            Stmt::Mark(style, s(0))
        }
        "call" => {
            let bad = || Parser::syntax(no, "expected `call name { args }`");
            let name = args.first().filter(|n| is_ident(n)).ok_or_else(bad)?.clone();
            let (list, rest) = braced(&args[1..]).ok_or_else(bad)?;
            if !rest.is_empty() || !list.iter().all(|a| is_ident(a)) {
                return Err(bad());
            }
            Stmt::Call { name, args: list }
        }
        "include" => {
            arity(1)?;
            Stmt::Include(s(0))
        }
        "animation_frames" => {
            arity(2)?;
            Stmt::AnimationFrames(int(no, &args[0])?, int(no, &args[1])?)
        }
        "layer" => {
            arity(1)?;
            Stmt::Layer(int(no, &args[0])?)
        }
        other => {
            return Err(GclError::UnknownCommand {
                line: no,
                command: other.to_string(),
            })
        }
    };
    Ok(stmt)
}

/// Parses one file without touching its includes.
pub fn parse_file(text: &str) -> Result<Vec<Stmt>, GclError> {
    let mut p = Parser { lines: lex(text), pos: 0 };
    p.block(false)
}

fn resolve_into(
    stmts: &[Stmt],
    resolver: &dyn Resolver,
    stack: &mut Vec<String>,
    out: &mut IndexMap<String, Vec<Stmt>>,
) -> Result<(), GclError> {
    for s in stmts {
        let Stmt::Include(file) = s else { continue };
        if stack.contains(file) {
            return Err(GclError::IncludeCycle(file.clone()));
        }
        if out.contains_key(file) {
            continue;
        }
        let text = resolver
            .resolve(file)
            .ok_or_else(|| GclError::MissingInclude(file.clone()))?;
        let inner = parse_file(&text).map_err(|e| e.in_file(file))?;
        stack.push(file.clone());
        resolve_into(&inner, resolver, stack, out)?;
        stack.pop();
        out.insert(file.clone(), inner);
    }
    Ok(())
}

/// Parses `text`, resolving each included file once.
pub fn parse_gcl(text: &str, resolver: &dyn Resolver) -> Result<GclProgram, GclError> {
    let stmts = parse_file(text)?;
    let mut included = IndexMap::new();
    resolve_into(&stmts, resolver, &mut Vec::new(), &mut included)?;
    let prog = GclProgram { stmts, included };
    check_calls(&prog)?;
    Ok(prog)
}

fn check_calls(prog: &GclProgram) -> Result<(), GclError> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for s in prog.stmts.iter().chain(prog.included.values().flatten()) {
        if let Stmt::Procedure(p) = s {
            if seen.insert(&p.name, p.params.len()).is_some() {
                return Err(GclError::DuplicateProcedure(p.name.clone()));
            }
        }
    }
    fn walk(stmts: &[Stmt], seen: &HashMap<&str, usize>) -> Result<(), GclError> {
        for s in stmts {
            match s {
                Stmt::Procedure(p) => walk(&p.body, seen)?,
                Stmt::Call { name, args } => {
                    if let Some(&n) = seen.get(name.as_str()) {
                        if n != args.len() {
                            return Err(GclError::Arity {
                                procedure: name.clone(),
                                expected: n,
                                found: args.len(),
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
    walk(&prog.stmts, &seen)?;
    for stmts in prog.included.values() {
        walk(stmts, &seen)?;
    }
    Ok(())
}
