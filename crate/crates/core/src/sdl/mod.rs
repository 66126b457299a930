//! Structure-definition language.
//!
//! A document is a sequence of `;`-terminated statements; `#` starts a line
//! comment and basis indices are 1-based:
//!
//! ```text
//! base x1, x2;
//! bundle g rank 3;
//! anchor g: e1 = d/dx1, e2 = d/dx2;
//! bracket g: [1,2] = -e3;
//! bundle theta rank 1;
//! map phi: theta -> g: e1 = e3;
//! action act: g on theta;
//! structure crossed_module cm = (theta, phi, g, act);
//! ```
//!
//! Bracket entries `[i,j] = s` also set `[j,i] = -s` unless `[j,i]` is given.
//! Bundles may be referenced dually as `g*`; anchors and brackets on `g*`
//! define an algebroid on the dual bundle. Other blocks:
//! `form C on K*: [i,j] = poly;` (symmetric, `[j,i]` implied),
//! `multivector r on theta degree 2: [1,2] = poly;` and
//! `structure KIND NAME = (args);` with kinds `algebroid`, `crossed_module`,
//! `matched_pair`, `bialgebroid`, `bicrossed`, `coquadratic`,
//! `manin_triple`, `rmatrix`, `courant` and `invariant_h`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ring::{Base, Poly};

pub mod build;
pub mod emit;
mod lexer;
mod parser;
mod printer;

pub use build::{resolve, Object, Resolved};
pub use printer::print;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagClass {
    Lexical,
    Syntactic,
    Referential,
    Dimensional,
}

impl fmt::Display for DiagClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DiagClass::Lexical => "lexical",
            DiagClass::Syntactic => "syntax",
            DiagClass::Referential => "reference",
            DiagClass::Dimensional => "dimension",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub class: DiagClass,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} error: {}", self.line, self.col, self.class, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleRef {
    pub name: String,
    pub dual: bool,
}

impl BundleRef {
    pub fn new(name: &str, dual: bool) -> Self {
        BundleRef {
            name: name.into(),
            dual,
        }
    }

    pub fn dualized(&self) -> Self {
        BundleRef {
            name: self.name.clone(),
            dual: !self.dual,
        }
    }
}

impl fmt::Display for BundleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.dual { "*" } else { "" })
    }
}

/// Vector of coefficients in the target frame.
pub type SectionCoeffs = Vec<Poly>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionBlock {
    pub actor: BundleRef,
    pub target: BundleRef,
    /// `(actor index, target index) -> e_i ▷ e_a`.
    pub entries: BTreeMap<(usize, usize), SectionCoeffs>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapBlock {
    pub source: BundleRef,
    pub target: BundleRef,
    /// Source index -> image.
    pub entries: BTreeMap<usize, SectionCoeffs>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormBlock {
    pub bundle: BundleRef,
    pub entries: BTreeMap<(usize, usize), Poly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivectorBlock {
    pub bundle: BundleRef,
    pub degree: usize,
    pub entries: BTreeMap<Vec<usize>, Poly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureKind {
    Algebroid,
    CrossedModule,
    MatchedPair,
    Bialgebroid,
    Bicrossed,
    Coquadratic,
    ManinTriple,
    RMatrix,
    Courant,
    InvariantH,
}

impl StructureKind {
    pub const ALL: [StructureKind; 10] = [
        StructureKind::Algebroid,
        StructureKind::CrossedModule,
        StructureKind::MatchedPair,
        StructureKind::Bialgebroid,
        StructureKind::Bicrossed,
        StructureKind::Coquadratic,
        StructureKind::ManinTriple,
        StructureKind::RMatrix,
        StructureKind::Courant,
        StructureKind::InvariantH,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            StructureKind::Algebroid => "algebroid",
            StructureKind::CrossedModule => "crossed_module",
            StructureKind::MatchedPair => "matched_pair",
            StructureKind::Bialgebroid => "bialgebroid",
            StructureKind::Bicrossed => "bicrossed",
            StructureKind::Coquadratic => "coquadratic",
            StructureKind::ManinTriple => "manin_triple",
            StructureKind::RMatrix => "rmatrix",
            StructureKind::Courant => "courant",
            StructureKind::InvariantH => "invariant_h",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Name(BundleRef),
    /// 0-based.
    Indices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub kind: StructureKind,
    pub name: String,
    pub args: Vec<Arg>,
}

/// Parsed document. Carries no source positions, so structurally equal
/// documents compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Document {
    pub base: Vec<String>,
    pub bundles: BTreeMap<String, usize>,
    pub anchors: BTreeMap<BundleRef, BTreeMap<usize, SectionCoeffs>>,
    pub brackets: BTreeMap<BundleRef, BTreeMap<(usize, usize), SectionCoeffs>>,
    pub actions: BTreeMap<String, ActionBlock>,
    pub maps: BTreeMap<String, MapBlock>,
    pub forms: BTreeMap<String, FormBlock>,
    pub multivectors: BTreeMap<String, MultivectorBlock>,
    /// In declaration order; later structures may reference earlier ones.
    pub structures: Vec<Structure>,
}

impl Document {
    pub fn base(&self) -> Base {
        Base::new(self.base.clone())
    }

    pub fn rank_of(&self, r: &BundleRef) -> Option<usize> {
        self.bundles.get(&r.name).copied()
    }

    pub fn structure(&self, name: &str) -> Option<&Structure> {
        self.structures.iter().find(|s| s.name == name)
    }
}

/// Parses and validates a document.
pub fn parse(text: &str) -> Result<Document, Vec<Diagnostic>> {
    parser::parse_document(text).map_err(|d| vec![d])
}

/// Parses a polynomial literal over `base`.
pub fn parse_poly_literal(text: &str, base: &Base) -> Result<Poly, String> {
    parser::parse_poly(text, base).map_err(|d| d.to_string())
}
