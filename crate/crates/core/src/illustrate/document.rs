use crate::gcl::{parse_gcl, GclError, GclProgram, Num, Procedure, Resolver, Stmt};

/// A compiled illustration: the theorem procedure, the existence procedure,
/// the construction procedures they use and a main file tying them together.
#[derive(Debug, Clone, PartialEq)]
pub struct GclDocument {
    pub theorem: Procedure,
    pub exists_name: String,
    pub exists_text: String,
    /// Premise constants, the parameters of the existence procedure.
    pub constants: Vec<String>,
    /// Called procedures with their dependencies, first use first.
    pub procedures: Vec<String>,
    /// `(file name, text)` for each entry of `procedures`.
    pub procedure_files: Vec<(String, String)>,
    /// Frame count when animated.
    pub frames: Option<u32>,
}

impl GclDocument {
    pub fn name(&self) -> &str {
        &self.theorem.name
    }

    pub fn theorem_file(&self) -> String {
        format!("{}.gcl", self.theorem.name)
    }

    pub fn exists_file(&self) -> String {
        format!("{}.gcl", self.exists_name)
    }

    pub fn main_file(&self) -> String {
        format!("main_{}.gcl", self.theorem.name)
    }

    pub fn theorem_text(&self) -> String {
        format!("{}\n", Stmt::Procedure(self.theorem.clone()))
    }

    pub fn main_stmts(&self) -> Vec<Stmt> {
        let mut out = vec![
            Stmt::Comment(" ----- Proof illustration -----".into()),
            Stmt::Include(self.theorem_file()),
            Stmt::Include(self.exists_file()),
        ];
        out.extend(self.procedure_files.iter().map(|(f, _)| Stmt::Include(f.clone())));
        out.push(Stmt::Comment("-----".into()));
        out.push(Stmt::Call {
            name: self.exists_name.clone(),
            args: self.constants.clone(),
        });
        out.push(Stmt::Call {
            name: self.theorem.name.clone(),
            args: self.theorem.params.clone(),
        });
        if let Some(n) = self.frames {
            let lit = |v: f64| Num::Lit(v);
            out.extend([
                Stmt::AnimationFrames(n, 1),
                Stmt::Point {
                    name: "A0".into(),
                    x: lit(0.0),
                    y: lit(0.0),
                    to: None,
                },
                Stmt::Point {
                    name: "A1".into(),
                    x: lit(1.0),
                    y: lit(0.0),
                    to: Some((lit(n as f64), lit(0.0))),
                },
                Stmt::Distance {
                    name: "dA".into(),
                    a: "A0".into(),
                    b: "A1".into(),
                },
                Stmt::HideLayersFrom("dA".into()),
            ]);
        }
        out
    }

    pub fn main_text(&self) -> String {
        self.main_stmts().iter().map(|s| format!("{s}\n")).collect()
    }

    /// Every file of the document, main file last.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = vec![
            (self.theorem_file(), self.theorem_text()),
            (self.exists_file(), self.exists_text.clone()),
        ];
        out.extend(self.procedure_files.iter().cloned());
        out.push((self.main_file(), self.main_text()));
        out
    }

    /// The main file parsed with every include resolved from the document.
    pub fn program(&self) -> Result<GclProgram, GclError> {
        parse_gcl(&self.main_text(), self)
    }
}

impl Resolver for GclDocument {
    fn resolve(&self, name: &str) -> Option<String> {
        self.files().into_iter().find(|(f, _)| f == name).map(|(_, t)| t)
    }
}
