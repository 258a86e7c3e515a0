use std::fmt;

use crate::formula::{Atom, Term};

use super::TptpError;

/// First-order formula tree over the supported connectives.
#[derive(Debug, Clone, PartialEq)]
pub enum Fof {
    Forall(Vec<String>, Box<Fof>),
    Exists(Vec<String>, Box<Fof>),
    Implies(Box<Fof>, Box<Fof>),
    And(Vec<Fof>),
    Or(Vec<Fof>),
    Not(Box<Fof>),
    Atom(Atom),
    Eq(Term, Term),
    Neq(Term, Term),
    True,
    False,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub role: Role,
    pub body: Fof,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Forall,
    Exists,
    Not,
    And,
    Or,
    Implies,
    Eq,
    Neq,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrack => f.write_str("'['"),
            Tok::RBrack => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::Colon => f.write_str("':'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Forall => f.write_str("'!'"),
            Tok::Exists => f.write_str("'?'"),
            Tok::Not => f.write_str("'~'"),
            Tok::And => f.write_str("'&'"),
            Tok::Or => f.write_str("'|'"),
            Tok::Implies => f.write_str("'=>'"),
            Tok::Eq => f.write_str("'='"),
            Tok::Neq => f.write_str("'!='"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, TptpError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: l0,
                col: c0,
            });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBrack, 1, &mut i, &mut col),
            ']' => push(Tok::RBrack, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '?' => push(Tok::Exists, 1, &mut i, &mut col),
            '~' => push(Tok::Not, 1, &mut i, &mut col),
            '&' => push(Tok::And, 1, &mut i, &mut col),
            '|' => push(Tok::Or, 1, &mut i, &mut col),
            '!' if chars.get(i + 1) == Some(&'=') => push(Tok::Neq, 2, &mut i, &mut col),
            '!' => push(Tok::Forall, 1, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            c if c.is_ascii_alphabetic() || c == '$' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Ident(word),
                    line: l0,
                    col: c0,
                });
            }
            other => {
                return Err(TptpError::Syntax {
                    line,
                    column: col,
                    expected: format!("a token, found {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Name of the entry being parsed, for error attribution.
    entry: String,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn error(&self, expected: &str) -> TptpError {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(s) => (s.line, s.col),
            None => (1, 1),
        };
        TptpError::Syntax {
            line,
            column,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), TptpError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<String, TptpError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn entry(&mut self) -> Result<AnnotatedFormula, TptpError> {
        let kw = self.ident()?;
        if kw != "fof" {
            self.pos -= 1;
            return Err(self.error("'fof'"));
        }
        self.expect(Tok::LParen)?;
        let name = self.ident()?;
        if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
            self.pos -= 1;
            return Err(self.error("lower-case formula name"));
        }
        self.entry = name.clone();
        self.expect(Tok::Comma)?;
        let role = match self.ident()?.as_str() {
            "axiom" => Role::Axiom,
            "conjecture" => Role::Conjecture,
            _ => return Err(TptpError::UnsupportedRole(name)),
        };
        self.expect(Tok::Comma)?;
        let body = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(AnnotatedFormula { name, role, body })
    }

    // precedence: => below | below & below unary
    fn formula(&mut self) -> Result<Fof, TptpError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let rhs = self.disjunction()?;
            return Ok(Fof::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Fof, TptpError> {
        let mut parts = vec![self.conjunction()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Fof::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Fof, TptpError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Fof::And(parts)
        })
    }

    fn var_list(&mut self) -> Result<Vec<String>, TptpError> {
        self.expect(Tok::LBrack)?;
        let mut vars = Vec::new();
        loop {
            let v = self.ident()?;
            if !crate::formula::is_variable_name(&v) {
                self.pos -= 1;
                return Err(self.error("variable"));
            }
            vars.push(v);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RBrack) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("',' or ']'")),
            }
        }
        self.expect(Tok::Colon)?;
        Ok(vars)
    }

    fn unary(&mut self) -> Result<Fof, TptpError> {
        match self.peek() {
            Some(Tok::Forall) => {
                self.pos += 1;
                let vars = self.var_list()?;
                Ok(Fof::Forall(vars, Box::new(self.unary()?)))
            }
            Some(Tok::Exists) => {
                self.pos += 1;
                let vars = self.var_list()?;
                Ok(Fof::Exists(vars, Box::new(self.unary()?)))
            }
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Fof::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(w)) if w == "$true" || w == "$false" => {
                let f = if w == "$true" { Fof::True } else { Fof::False };
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Ident(w)) if w.starts_with('$') => Err(self.error("formula")),
            Some(Tok::Ident(_)) => self.atomic(),
            _ => Err(self.error("formula")),
        }
    }

    fn term(&mut self) -> Result<Term, TptpError> {
        let name = self.ident()?;
        if self.peek() == Some(&Tok::LParen) {
            return Err(TptpError::FunctionSymbolsUnsupported(self.entry.clone()));
        }
        Ok(Term::parse(&name))
    }

    fn atomic(&mut self) -> Result<Fof, TptpError> {
        let lhs_is_atom = matches!(self.peek_at(1), Some(Tok::LParen));
        if lhs_is_atom {
            let pred = self.ident()?;
            if crate::formula::is_variable_name(&pred) {
                self.pos -= 1;
                return Err(self.error("predicate symbol"));
            }
            self.expect(Tok::LParen)?;
            let mut args = Vec::new();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("',' or ')'")),
                }
            }
            if matches!(self.peek(), Some(Tok::Eq | Tok::Neq)) {
                // f(X) = t: a compound term on the left of an equation
                return Err(TptpError::FunctionSymbolsUnsupported(self.entry.clone()));
            }
            return Ok(Fof::Atom(Atom::new(pred, args)));
        }
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                Ok(Fof::Eq(lhs, self.term()?))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                Ok(Fof::Neq(lhs, self.term()?))
            }
            _ if !lhs.is_var() => Ok(Fof::Atom(Atom::new(lhs.name(), Vec::new()))),
            _ => Err(self.error("'=' or '!='")),
        }
    }
}

fn check_bound(f: &Fof, scope: &mut Vec<String>, entry: &str) -> Result<(), TptpError> {
    let check_term = |t: &Term, scope: &Vec<String>| match t {
        Term::Var(v) if !scope.contains(v) => Err(TptpError::UnboundVariable {
            formula: entry.to_string(),
            var: v.clone(),
        }),
        _ => Ok(()),
    };
    match f {
        Fof::Forall(vs, b) | Fof::Exists(vs, b) => {
            let n = scope.len();
            scope.extend(vs.iter().cloned());
            let r = check_bound(b, scope, entry);
            scope.truncate(n);
            r
        }
        Fof::Implies(a, b) => {
            check_bound(a, scope, entry)?;
            check_bound(b, scope, entry)
        }
        Fof::And(xs) | Fof::Or(xs) => xs.iter().try_for_each(|x| check_bound(x, scope, entry)),
        Fof::Not(x) => check_bound(x, scope, entry),
        Fof::Atom(a) => a.args.iter().try_for_each(|t| check_term(t, scope)),
        Fof::Eq(s, t) | Fof::Neq(s, t) => {
            check_term(s, scope)?;
            check_term(t, scope)
        }
        Fof::True | Fof::False => Ok(()),
    }
}

/// Reads every `fof(name, role, formula).` entry in file order.
pub fn parse_tptp(text: &str) -> Result<Vec<AnnotatedFormula>, TptpError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        entry: String::new(),
    };
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        let f = p.entry()?;
        check_bound(&f.body, &mut Vec::new(), &f.name)?;
        out.push(f);
    }
    Ok(out)
}

fn write_term(t: &Term) -> &str {
    t.name()
}

impl fmt::Display for Fof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fof::Forall(vs, b) => write!(f, "(! [{}] : {})", vs.join(","), b),
            Fof::Exists(vs, b) => write!(f, "(? [{}] : {})", vs.join(","), b),
            Fof::Implies(a, b) => write!(f, "({a} => {b})"),
            Fof::And(xs) | Fof::Or(xs) => {
                let op = if matches!(self, Fof::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Fof::Not(x) => write!(f, "(~ {x})"),
            Fof::Atom(a) if a.args.is_empty() => f.write_str(&a.pred),
            Fof::Atom(a) => write!(f, "{a}"),
            Fof::Eq(s, t) => write!(f, "({} = {})", write_term(s), write_term(t)),
            Fof::Neq(s, t) => write!(f, "({} != {})", write_term(s), write_term(t)),
            Fof::True => f.write_str("$true"),
            Fof::False => f.write_str("$false"),
        }
    }
}

impl fmt::Display for AnnotatedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fof({},{},{}).", self.name, self.role, self.body)
    }
}
