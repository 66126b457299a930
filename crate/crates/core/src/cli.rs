//! The `lbk` command line. Exit codes: 0 all checks pass, 1 a mathematical
//! check fails, 2 input error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::algebroid::check_algebroid;
use crate::bicrossed::{
    bicrossed_from_triple, build_from_invariant_h, build_from_rmatrix, check_bicrossed, check_coquadratic,
    check_h_invariance, check_manin_triple, check_rmatrix_pipeline, check_round_trip_bicrossed,
    check_round_trip_triple, check_theorem_equivalence, triple_from_bicrossed, BicrossedModule,
};
use crate::crossmod::{check_crossed_module, check_dual_compatibility, semidirect};
use crate::doubles::{
    build_courant_double, build_double, check_bialgebroid, check_courant, check_matched_pair,
    check_restricted_brackets,
};
use crate::error::Error;
use crate::report::CheckReport;
use crate::sdl::emit::{algebroid_document, bicrossed_document, courant_document, manin_document};
use crate::sdl::{parse, print, resolve, Diagnostic, Document, Object, Resolved, StructureKind};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lbk", version, about = "Exact checks for Lie algebroid structures written in SDL")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = ReportFormat::Text, global = true)]
    pub report: ReportFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every applicable checker on each declared structure.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Only check this structure.
        #[arg(long)]
        structure: Option<String>,
    },
    /// Build a derived structure and write it as SDL.
    Construct {
        file: PathBuf,
        #[arg(long, value_enum)]
        op: Op,
        /// Source structure; defaults to the last one of the right kind.
        #[arg(long)]
        structure: Option<String>,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite an existing output file.
        #[arg(long)]
        force: bool,
    },
    /// Check one of the structural theorems on a structure.
    VerifyTheorem {
        file: PathBuf,
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        structure: Option<String>,
    },
    /// Print the canonical form of a document.
    Fmt { file: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    /// Crossed module to `A = g ⋉ θ`.
    Semidirect,
    /// Matched pair to `P ⋈ Q`.
    Double,
    /// Bialgebroid or bicrossed module to its Courant double.
    CourantDouble,
    /// Manin triple to bicrossed module.
    TripleToBicrossed,
    /// Bicrossed module to Manin triple.
    BicrossedToTriple,
    /// Crossed module r-matrix to bicrossed module.
    FromRmatrix,
    /// Invariant element of `P ⊗ Q` to bicrossed module.
    FromInvariantH,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// Bicrossed module iff `(g, θ*)` is a matched pair.
    MatchedPair,
    /// Bicrossed modules and co-quadratic Manin triples correspond.
    RoundTrip,
}

/// Text written to the two streams and the exit code for one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(file: &Path, msg: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("{}: {msg}\n", file.display()),
            code: EXIT_INPUT,
        }
    }

    fn merge(&mut self, other: Outcome) {
        self.stdout.push_str(&other.stdout);
        self.stderr.push_str(&other.stderr);
        self.code = self.code.max(other.code);
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { files, structure } => {
            // one thread per file; results are collected in input order
            let outcomes: Vec<Outcome> = std::thread::scope(|s| {
                let handles: Vec<_> = files
                    .iter()
                    .map(|f| s.spawn(move || check_file(f, structure.as_deref(), cli.report)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
            });
            let mut out = Outcome::default();
            for o in outcomes {
                out.merge(o);
            }
            out
        }
        Command::Construct {
            file,
            op,
            structure,
            out,
            force,
        } => construct(file, *op, structure.as_deref(), out.as_deref(), *force),
        Command::VerifyTheorem {
            file,
            theorem,
            structure,
        } => verify_theorem(file, *theorem, structure.as_deref(), cli.report),
        Command::Fmt { file } => match load_document(file) {
            Ok(doc) => Outcome {
                stdout: print(&doc),
                ..Outcome::default()
            },
            Err(o) => o,
        },
    }
}

fn diagnostics_text(file: &Path, diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{}:{d}\n", file.display())).collect()
}

fn load_document(file: &Path) -> Result<Document, Outcome> {
    let text = std::fs::read_to_string(file).map_err(|e| Outcome::input_error(file, e))?;
    parse(&text).map_err(|d| Outcome {
        stdout: String::new(),
        stderr: diagnostics_text(file, &d),
        code: EXIT_INPUT,
    })
}

fn load(file: &Path) -> Result<Resolved, Outcome> {
    let doc = load_document(file)?;
    resolve(&doc).map_err(|e| Outcome::input_error(file, e))
}

/// Every checker that applies to `obj`.
pub fn check_object(name: &str, obj: &Object) -> Vec<CheckReport> {
    let labeled = |mut r: CheckReport| {
        r.structure = format!("{name}: {}", r.structure);
        r
    };
    let from_result = |law: &str, r: crate::Result<CheckReport>| match r {
        Ok(r) => r,
        Err(e) => error_report(law, e),
    };
    let reports = match obj {
        Object::Algebroid(a) => vec![check_algebroid(a)],
        Object::CrossedModule(cm) => vec![check_crossed_module(cm)],
        Object::MatchedPair(mp) => vec![check_matched_pair(mp)],
        Object::Bialgebroid(b) => vec![check_bialgebroid(b)],
        Object::Bicrossed(b) => vec![
            check_bicrossed(b),
            from_result("dual compatibility", check_dual_compatibility(&b.cm, &b.dual)),
            from_result("restricted brackets", check_restricted_brackets(&b.courant(), &b.cm, &b.dual)),
        ],
        Object::Coquadratic(k) => vec![check_coquadratic(k)],
        Object::ManinTriple(mt) => vec![from_result("manin triple", check_manin_triple(mt))],
        Object::RMatrix { cm, r } => vec![from_result("r-matrix", check_rmatrix_pipeline(cm, r).map(|(_, rep)| rep))],
        Object::Courant(c) => vec![check_courant(c)],
        Object::InvariantH { mp, h } => {
            let inv = from_result("invariance", check_h_invariance(mp, h));
            if inv.passed() {
                vec![inv, from_result("bicrossed", build_from_invariant_h(mp, h).map(|b| check_bicrossed(&b)))]
            } else {
                vec![inv]
            }
        }
    };
    reports.into_iter().map(labeled).collect()
}

/// A failed report for a construction that could not be carried out.
fn error_report(law: &str, e: Error) -> CheckReport {
    let mut r = CheckReport::new(law);
    let (witness, detail) = match &e {
        Error::Hypothesis { witness, .. } => (witness.clone(), e.to_string()),
        _ => (Vec::new(), e.to_string()),
    };
    r.push_flag("construction", law, false, Some(detail));
    if let Some(last) = r.entries.last_mut() {
        last.witness = witness;
    }
    r
}

fn render(file: &Path, reports: &[CheckReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => {
            let mut s = format!("== {}\n", file.display());
            for r in reports {
                s.push_str(&r.to_string());
            }
            s
        }
        ReportFormat::Structured => {
            let v = serde_json::json!({
                "file": file.display().to_string(),
                "verdict": if reports.iter().all(CheckReport::passed) { "pass" } else { "fail" },
                "reports": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
    }
}

fn verdict(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(CheckReport::passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

pub fn check_file(file: &Path, only: Option<&str>, format: ReportFormat) -> Outcome {
    let resolved = match load(file) {
        Ok(r) => r,
        Err(o) => return o,
    };
    if let Some(name) = only {
        if resolved.get(name).is_none() {
            return Outcome::input_error(file, format!("no structure named `{name}`"));
        }
    }
    let reports: Vec<CheckReport> = resolved
        .objects
        .iter()
        .filter(|(n, _)| only.is_none_or(|o| o == n))
        .flat_map(|(n, o)| check_object(n, o))
        .collect();
    Outcome {
        stdout: render(file, &reports, format),
        stderr: String::new(),
        code: verdict(&reports),
    }
}

/// The named structure, or the last one of an accepted kind.
fn select<'a>(resolved: &'a Resolved, name: Option<&str>, kinds: &[StructureKind]) -> Result<(&'a str, &'a Object), String> {
    let wanted: Vec<&str> = kinds.iter().map(|k| k.keyword()).collect();
    match name {
        Some(n) => match resolved.get(n) {
            Some(o) if kinds.contains(&o.kind()) => Ok((resolved.objects.iter().find(|(m, _)| m == n).unwrap().0.as_str(), o)),
            Some(o) => Err(format!("`{n}` is a {}, expected {}", o.kind().keyword(), wanted.join(" or "))),
            None => Err(format!("no structure named `{n}`")),
        },
        None => resolved
            .objects
            .iter()
            .rev()
            .find(|(_, o)| kinds.contains(&o.kind()))
            .map(|(n, o)| (n.as_str(), o))
            .ok_or_else(|| format!("no {} structure in the document", wanted.join(" or "))),
    }
}

fn bicrossed_of(obj: &Object) -> crate::Result<BicrossedModule> {
    match obj {
        Object::Bicrossed(b) => Ok(b.clone()),
        Object::RMatrix { cm, r } => build_from_rmatrix(cm, r),
        Object::InvariantH { mp, h } => build_from_invariant_h(mp, h),
        Object::ManinTriple(mt) => bicrossed_from_triple(mt),
        _ => unreachable!("selected by kind"),
    }
}

fn construct(file: &Path, op: Op, name: Option<&str>, out: Option<&Path>, force: bool) -> Outcome {
    if let Some(path) = out {
        if path.exists() && !force {
            return Outcome::input_error(path, "exists; pass --force to overwrite");
        }
    }
    let resolved = match load(file) {
        Ok(r) => r,
        Err(o) => return o,
    };
    use StructureKind as K;
    let kinds: &[StructureKind] = match op {
        Op::Semidirect => &[K::CrossedModule],
        Op::Double => &[K::MatchedPair],
        Op::CourantDouble => &[K::Bialgebroid, K::Bicrossed],
        Op::TripleToBicrossed => &[K::ManinTriple],
        Op::BicrossedToTriple => &[K::Bicrossed],
        Op::FromRmatrix => &[K::RMatrix],
        Op::FromInvariantH => &[K::InvariantH],
    };
    let (_, obj) = match select(&resolved, name, kinds) {
        Ok(x) => x,
        Err(msg) => return Outcome::input_error(file, msg),
    };
    let built: crate::Result<Document> = match (op, obj) {
        (Op::Semidirect, Object::CrossedModule(cm)) => semidirect(cm).map(|a| algebroid_document(&a, "A")),
        (Op::Double, Object::MatchedPair(mp)) => build_double(mp).map(|a| algebroid_document(&a, "D")),
        (Op::CourantDouble, Object::Bialgebroid(b)) => build_courant_double(b).map(|c| courant_document(&c)),
        (Op::CourantDouble, Object::Bicrossed(b)) => {
            build_courant_double(&b.bialgebroid()).map(|c| courant_document(&c))
        }
        (Op::BicrossedToTriple, Object::Bicrossed(b)) => triple_from_bicrossed(b).map(|mt| manin_document(&mt)),
        (Op::TripleToBicrossed | Op::FromRmatrix | Op::FromInvariantH, o) => {
            bicrossed_of(o).map(|b| bicrossed_document(&b))
        }
        _ => unreachable!("selected by kind"),
    };
    let doc = match built {
        Ok(d) => d,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("{}: construction failed: {e}\n", file.display()),
                code: EXIT_FAIL,
            }
        }
    };
    let text = print(&doc);
    match out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => Outcome::default(),
            Err(e) => Outcome::input_error(path, e),
        },
        None => Outcome {
            stdout: text,
            ..Outcome::default()
        },
    }
}

fn verify_theorem(file: &Path, theorem: Theorem, name: Option<&str>, format: ReportFormat) -> Outcome {
    let resolved = match load(file) {
        Ok(r) => r,
        Err(o) => return o,
    };
    use StructureKind as K;
    let kinds: &[StructureKind] = match theorem {
        Theorem::MatchedPair => &[K::Bicrossed, K::RMatrix, K::InvariantH],
        Theorem::RoundTrip => &[K::Bicrossed, K::ManinTriple, K::RMatrix, K::InvariantH],
    };
    let (sname, obj) = match select(&resolved, name, kinds) {
        Ok(x) => x,
        Err(msg) => return Outcome::input_error(file, msg),
    };
    let report = match (theorem, obj) {
        (Theorem::RoundTrip, Object::ManinTriple(mt)) => check_round_trip_triple(mt),
        (Theorem::RoundTrip, o) => bicrossed_of(o).and_then(|b| check_round_trip_bicrossed(&b)),
        (Theorem::MatchedPair, o) => bicrossed_of(o).map(|b| check_theorem_equivalence(&b)),
    };
    let mut report = report.unwrap_or_else(|e| error_report("construction", e));
    report.structure = format!("{sname}: {}", report.structure);
    let reports = [report];
    Outcome {
        stdout: render(file, &reports, format),
        stderr: String::new(),
        code: verdict(&reports),
    }
}
