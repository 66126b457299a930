use std::fmt::Write as _;

use num_traits::{One, Signed};

use super::{Arg, Document};
use crate::ring::Poly;

/// Renders `Σ c_k sym(k)`; `"0"` if every coefficient vanishes.
pub(crate) fn render_combination(coeffs: &[Poly], sym: impl Fn(usize) -> String) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let s = sym(k);
        let (neg, body) = match c.as_constant() {
            Some(v) if v.abs().is_one() => (v.is_negative(), s),
            Some(v) => (v.is_negative(), format!("{}*{s}", v.abs())),
            None => (false, format!("({c})*{s}")),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn section(coeffs: &[Poly]) -> String {
    render_combination(coeffs, |k| format!("e{}", k + 1))
}

fn statement(out: &mut String, head: &str, entries: Vec<String>) {
    if entries.is_empty() {
        writeln!(out, "{head};").unwrap();
        return;
    }
    writeln!(out, "{head}:").unwrap();
    let n = entries.len();
    for (i, e) in entries.into_iter().enumerate() {
        writeln!(out, "  {e}{}", if i + 1 == n { ";" } else { "," }).unwrap();
    }
}

/// Canonical text: base, bundles, anchors, brackets, actions, maps, forms and
/// multivectors each sorted by name, then structures in declaration order.
pub fn print(doc: &Document) -> String {
    let mut out = String::new();
    let base = doc.base();
    if !doc.base.is_empty() {
        writeln!(out, "base {};", doc.base.join(", ")).unwrap();
        out.push('\n');
    }
    for (name, rank) in &doc.bundles {
        writeln!(out, "bundle {name} rank {rank};").unwrap();
    }
    let mut sections: Vec<String> = Vec::new();
    for (b, rows) in &doc.anchors {
        let mut s = String::new();
        let entries = rows
            .iter()
            .map(|(i, v)| {
                let field = render_combination(v, |k| format!("d/d{}", base.vars()[k]));
                format!("e{} = {field}", i + 1)
            })
            .collect();
        statement(&mut s, &format!("anchor {b}"), entries);
        sections.push(s);
    }
    for (b, tab) in &doc.brackets {
        let mut s = String::new();
        let entries = tab
            .iter()
            .map(|((i, j), v)| format!("[{},{}] = {}", i + 1, j + 1, section(v)))
            .collect();
        statement(&mut s, &format!("bracket {b}"), entries);
        sections.push(s);
    }
    for (name, a) in &doc.actions {
        let mut s = String::new();
        let entries = a
            .entries
            .iter()
            .map(|((i, j), v)| format!("[{},{}] = {}", i + 1, j + 1, section(v)))
            .collect();
        statement(&mut s, &format!("action {name}: {} on {}", a.actor, a.target), entries);
        sections.push(s);
    }
    for (name, m) in &doc.maps {
        let mut s = String::new();
        let entries = m
            .entries
            .iter()
            .map(|(i, v)| format!("e{} = {}", i + 1, section(v)))
            .collect();
        statement(&mut s, &format!("map {name}: {} -> {}", m.source, m.target), entries);
        sections.push(s);
    }
    for (name, f) in &doc.forms {
        let mut s = String::new();
        let entries = f
            .entries
            .iter()
            .map(|((i, j), v)| format!("[{},{}] = {v}", i + 1, j + 1))
            .collect();
        statement(&mut s, &format!("form {name} on {}", f.bundle), entries);
        sections.push(s);
    }
    for (name, m) in &doc.multivectors {
        let mut s = String::new();
        let entries = m
            .entries
            .iter()
            .map(|(idx, v)| {
                let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
                format!("[{}] = {v}", idx.join(","))
            })
            .collect();
        statement(
            &mut s,
            &format!("multivector {name} on {} degree {}", m.bundle, m.degree),
            entries,
        );
        sections.push(s);
    }
    for s in sections {
        out.push('\n');
        out.push_str(&s);
    }
    if !doc.structures.is_empty() {
        out.push('\n');
    }
    for st in &doc.structures {
        let args: Vec<String> = st
            .args
            .iter()
            .map(|a| match a {
                Arg::Name(r) => r.to_string(),
                Arg::Indices(v) => {
                    let v: Vec<String> = v.iter().map(|i| (i + 1).to_string()).collect();
                    format!("[{}]", v.join(", "))
                }
            })
            .collect();
        writeln!(out, "structure {} {} = ({});", st.kind.keyword(), st.name, args.join(", ")).unwrap();
    }
    out
}
