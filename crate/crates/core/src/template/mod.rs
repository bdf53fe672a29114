//! Template DSL front end: parsing, staticness analysis, and compilation to
//! a hoisted-constant table plus an instruction tree.
//!
//! The DSL is deliberately small — elements, literal and dynamic attributes,
//! text holes, keyed each-blocks, if/else blocks — just enough surface for
//! every compile-time optimization to have something to chew on. State paths
//! are read-only dot paths.

mod analyze;
mod compile;
mod parse;

pub use analyze::{analyze, Analyzed, AnalyzedKind};
pub use compile::{
    compile, compile_analyzed, compile_without_hoisting, emit, load, CompileError, CompiledModule,
    Instr, InstrKey, ModuleError,
};
pub use parse::{parse, ParseError};

use indexmap::IndexMap;

/// Nonempty dot-separated identifier path into the state value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathExpr {
    pub segments: Vec<String>,
}

impl PathExpr {
    pub fn new(segments: Vec<String>) -> Self {
        assert!(!segments.is_empty(), "state paths are nonempty");
        PathExpr { segments }
    }

    /// Parse `a.b.c`; returns None unless every segment is an identifier.
    pub fn parse(text: &str) -> Option<PathExpr> {
        let segments: Vec<String> = text.split('.').map(str::to_string).collect();
        if segments.is_empty() || !segments.iter().all(|s| is_ident(s)) {
            return None;
        }
        Some(PathExpr { segments })
    }

    pub fn dotted(&self) -> String {
        self.segments.join(".")
    }
}

impl std::fmt::Display for PathExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.dotted())
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut bytes = s.bytes();
    match bytes.next() {
        Some(b) if b.is_ascii_alphabetic() || b == b'_' => {}
        _ => return false,
    }
    bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Element key source: a literal attribute or a dynamic path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateKey {
    Literal(String),
    Dynamic(PathExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TemplateAst {
    Element(ElementT),
    Text(String),
    Hole(PathExpr),
    Each(EachT),
    If(IfT),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementT {
    pub tag: String,
    pub static_attrs: IndexMap<String, String>,
    pub dynamic_attrs: Vec<(String, PathExpr)>,
    pub key: Option<TemplateKey>,
    pub children: Vec<TemplateAst>,
}

/// `{#each list as item key=item.field}` — the key path is stored relative
/// to the item; the body root is a single element.
#[derive(Clone, Debug, PartialEq)]
pub struct EachT {
    pub list: PathExpr,
    pub item: String,
    pub key: PathExpr,
    pub body: Box<TemplateAst>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IfT {
    pub cond: PathExpr,
    pub then_children: Vec<TemplateAst>,
    pub else_children: Vec<TemplateAst>,
}
