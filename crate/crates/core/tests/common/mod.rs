//! Random well-formed SDL documents.

use proptest::prelude::*;

/// Random polynomial text over `vars`, e.g. `-3/2*x1^2*x2 + 1`.
fn poly(vars: usize) -> impl Strategy<Value = String> {
    let term = (-4i32..=4, 1i32..=3, prop::collection::vec(0u32..=2, vars)).prop_map(|(n, d, exps)| {
        let mut t = if d == 1 { n.to_string() } else { format!("{n}/{d}") };
        for (k, e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => t.push_str(&format!("*x{}", k + 1)),
                _ => t.push_str(&format!("*x{}^{e}", k + 1)),
            }
        }
        t
    });
    prop::collection::vec(term, 1..=3).prop_map(|ts| ts.join(" + "))
}

/// `coef*e{i}` summed over a random subset of `1..=rank`.
fn section(vars: usize, rank: usize, sym: &'static str) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::option::of(poly(vars)), rank).prop_map(move |cs| {
        let parts: Vec<String> = cs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| format!("({c})*{sym}{}", i + 1)))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    })
}

fn entries(v: Vec<(String, String)>) -> String {
    v.iter().map(|(k, s)| format!("{k} = {s}")).collect::<Vec<_>>().join(",\n  ")
}

pub fn document() -> impl Strategy<Value = String> {
    (0usize..=2, 1usize..=3, 1usize..=3).prop_flat_map(|(vars, r1, r2)| {
        let pairs = |n: usize| {
            (0..n).flat_map(move |i| (i + 1..n).map(move |j| format!("[{},{}]", i + 1, j + 1))).collect::<Vec<_>>()
        };
        let bracket1 = prop::collection::vec(section(vars, r1, "e"), pairs(r1).len());
        let bracket2 = prop::collection::vec(section(vars, r2, "e"), pairs(r2).len());
        let anchor = if vars > 0 {
            prop::collection::vec(prop::option::of(section(vars, vars, "d/dx")), r1).boxed()
        } else {
            Just(vec![None; r1]).boxed()
        };
        let map = prop::collection::vec(section(vars, r2, "e"), r1);
        let action = prop::collection::vec(section(vars, r1, "e"), r1 * r2);
        let form = prop::collection::vec(poly(vars), r2 * (r2 + 1) / 2);
        let mv = prop::collection::vec(poly(vars), pairs(r1).len());
        (bracket1, bracket2, anchor, map, action, form, mv).prop_map(move |(b1, b2, anchor, map, action, form, mv)| {
            let mut t = String::new();
            if vars > 0 {
                let names: Vec<String> = (1..=vars).map(|k| format!("x{k}")).collect();
                t.push_str(&format!("base {};\n", names.join(", ")));
            }
            t.push_str(&format!("bundle t rank {r1};\nbundle g rank {r2};\n"));
            let anchor: Vec<(String, String)> = anchor
                .into_iter()
                .enumerate()
                .filter_map(|(i, s)| s.map(|s| (format!("e{}", i + 1), s)))
                .collect();
            if !anchor.is_empty() {
                t.push_str(&format!("anchor t:\n  {};\n", entries(anchor)));
            }
            if !b1.is_empty() {
                t.push_str(&format!("bracket t*:\n  {};\n", entries(pairs(r1).into_iter().zip(b1).collect())));
            }
            if !b2.is_empty() {
                t.push_str(&format!("bracket g:\n  {};\n", entries(pairs(r2).into_iter().zip(b2).collect())));
            }
            let rows = (0..r1).map(|a| format!("e{}", a + 1)).zip(map).collect();
            t.push_str(&format!("map m: t -> g:\n  {};\n", entries(rows)));
            let idx = (0..r2).flat_map(|i| (0..r1).map(move |a| format!("[{},{}]", i + 1, a + 1)));
            t.push_str(&format!("action act: g on t:\n  {};\n", entries(idx.zip(action).collect())));
            let idx = (0..r2).flat_map(|i| (i..r2).map(move |j| format!("[{},{}]", i + 1, j + 1)));
            t.push_str(&format!("form C on g*:\n  {};\n", entries(idx.zip(form).collect())));
            if !mv.is_empty() {
                t.push_str(&format!("multivector r on t degree 2:\n  {};\n", entries(pairs(r1).into_iter().zip(mv).collect())));
            }
            t.push_str("structure algebroid ta = (t*);\n");
            t.push_str("structure crossed_module cm = (t, m, g, act);\n");
            t.push_str("structure coquadratic k = (g, C);\n");
            t
        })
    })
}
