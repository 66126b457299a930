//! Kernel objects to documents.

use std::collections::BTreeMap;

use crate::algebroid::Algebroid;
use crate::bicrossed::{BicrossedModule, ManinTriple};
use crate::crossmod::{ActionTable, BundleMap, CrossedModule};
use crate::doubles::{Bialgebroid, CourantStructure, MatchedPair};
use crate::exterior::GradedElement;
use crate::ring::matrix::Matrix;
use crate::ring::{Base, Poly};

use super::{ActionBlock, Arg, BundleRef, Document, FormBlock, MapBlock, MultivectorBlock, Structure, StructureKind};

fn coeffs(s: &GradedElement) -> Vec<Poly> {
    (0..s.frame().rank()).map(|k| s.coeff(k)).collect()
}

fn is_zero(v: &[Poly]) -> bool {
    v.iter().all(Poly::is_zero)
}

/// Builds a document bundle by bundle. Bundle names are chosen by the caller;
/// kernel frame names are not carried over.
pub struct Emitter {
    doc: Document,
}

impl Emitter {
    pub fn new(base: &Base) -> Self {
        Emitter {
            doc: Document {
                base: base.vars().to_vec(),
                ..Document::default()
            },
        }
    }

    pub fn finish(self) -> Document {
        self.doc
    }

    pub fn bundle(&mut self, name: &str, rank: usize) -> BundleRef {
        self.doc.bundles.insert(name.into(), rank);
        BundleRef::new(name, false)
    }

    /// Anchor and bracket of `a` on `r`. Only `[i,j]` with `i < j` is written
    /// when the table is antisymmetric there.
    pub fn algebroid(&mut self, r: &BundleRef, a: &Algebroid) {
        self.table(r, a.anchor_matrix(), |i, j| a.bracket_basis(i, j).clone(), a.rank());
    }

    fn table(&mut self, r: &BundleRef, anchor: &[Vec<Poly>], entry: impl Fn(usize, usize) -> GradedElement, n: usize) {
        let rows: BTreeMap<usize, Vec<Poly>> = anchor
            .iter()
            .enumerate()
            .filter(|(_, v)| !is_zero(v))
            .map(|(i, v)| (i, v.clone()))
            .collect();
        if !rows.is_empty() {
            self.doc.anchors.insert(r.clone(), rows);
        }
        let mut tab = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let (a, b) = (entry(i, j), entry(j, i));
                if !a.is_zero() || i == j && !b.is_zero() {
                    tab.insert((i, j), coeffs(&a));
                }
                if i != j && !a.add(&b).is_zero() {
                    tab.insert((j, i), coeffs(&b));
                }
            }
        }
        if !tab.is_empty() {
            self.doc.brackets.insert(r.clone(), tab);
        }
    }

    pub fn action(&mut self, name: &str, actor: &BundleRef, target: &BundleRef, act: &ActionTable) {
        let mut entries = BTreeMap::new();
        for i in 0..act.actor().rank() {
            for a in 0..act.target().rank() {
                let v = coeffs(act.entry(i, a));
                if !is_zero(&v) {
                    entries.insert((i, a), v);
                }
            }
        }
        self.doc.actions.insert(
            name.into(),
            ActionBlock {
                actor: actor.clone(),
                target: target.clone(),
                entries,
            },
        );
    }

    pub fn map(&mut self, name: &str, source: &BundleRef, target: &BundleRef, m: &BundleMap) {
        let entries = m
            .matrix()
            .iter()
            .enumerate()
            .filter(|(_, v)| !is_zero(v))
            .map(|(a, v)| (a, v.clone()))
            .collect();
        self.doc.maps.insert(
            name.into(),
            MapBlock {
                source: source.clone(),
                target: target.clone(),
                entries,
            },
        );
    }

    /// Upper triangle of a symmetric matrix.
    pub fn form(&mut self, name: &str, bundle: &BundleRef, c: &Matrix) {
        let mut entries = BTreeMap::new();
        for (i, row) in c.iter().enumerate() {
            for (j, v) in row.iter().enumerate().skip(i) {
                if !v.is_zero() {
                    entries.insert((i, j), v.clone());
                }
            }
        }
        self.doc.forms.insert(
            name.into(),
            FormBlock {
                bundle: bundle.clone(),
                entries,
            },
        );
    }

    pub fn structure(&mut self, kind: StructureKind, name: &str, args: Vec<Arg>) {
        self.doc.structures.push(Structure {
            kind,
            name: name.into(),
            args,
        });
    }

    fn crossed_module(&mut self, name: &str, theta: &BundleRef, g: &BundleRef, cm: &CrossedModule) {
        self.algebroid(theta, &cm.theta);
        self.algebroid(g, &cm.g);
        let (phi, act) = (format!("{name}_phi"), format!("{name}_act"));
        self.map(&phi, theta, g, &cm.phi);
        self.action(&act, g, theta, &cm.action);
        self.structure(
            StructureKind::CrossedModule,
            name,
            vec![
                Arg::Name(theta.clone()),
                Arg::Name(BundleRef::new(&phi, false)),
                Arg::Name(g.clone()),
                Arg::Name(BundleRef::new(&act, false)),
            ],
        );
    }

    fn matched_pair(&mut self, name: &str, p: &BundleRef, q: &BundleRef, mp: &MatchedPair) {
        self.algebroid(p, &mp.p);
        self.algebroid(q, &mp.q);
        let (pq, qp) = (format!("{name}_pq"), format!("{name}_qp"));
        self.action(&pq, p, q, &mp.act_pq);
        self.action(&qp, q, p, &mp.act_qp);
        self.structure(
            StructureKind::MatchedPair,
            name,
            vec![Arg::Name(p.clone()), Arg::Name(q.clone()), named(&pq), named(&qp)],
        );
    }
}

fn named(name: &str) -> Arg {
    Arg::Name(BundleRef::new(name, false))
}

/// `bundle A` with `structure algebroid A = (A)`.
pub fn algebroid_document(a: &Algebroid, name: &str) -> Document {
    let mut e = Emitter::new(a.base());
    let r = e.bundle(name, a.rank());
    e.algebroid(&r, a);
    e.structure(StructureKind::Algebroid, &format!("{name}_alg"), vec![Arg::Name(r)]);
    e.finish()
}

/// Bundles `g`, `theta`; crossed modules `cm`, `dual`; `structure bicrossed b`.
pub fn bicrossed_document(b: &BicrossedModule) -> Document {
    let mut e = Emitter::new(b.cm.g.base());
    let g = e.bundle("g", b.cm.g.rank());
    let theta = e.bundle("theta", b.cm.theta.rank());
    e.crossed_module("cm", &theta, &g, &b.cm);
    e.crossed_module("dual", &g.dualized(), &theta.dualized(), &b.dual);
    e.structure(StructureKind::Bicrossed, "b", vec![named("cm"), named("dual")]);
    e.finish()
}

/// Bundles `g`, `theta` and `structure crossed_module cm`.
pub fn crossed_module_document(cm: &CrossedModule) -> Document {
    let mut e = Emitter::new(cm.g.base());
    let g = e.bundle("g", cm.g.rank());
    let theta = e.bundle("theta", cm.theta.rank());
    e.crossed_module("cm", &theta, &g, cm);
    e.finish()
}

/// Bundles `P`, `Q`, actions `pq`, `qp` and `structure matched_pair mp`.
pub fn matched_pair_document(mp: &MatchedPair) -> Document {
    let mut e = Emitter::new(mp.p.base());
    let p = e.bundle("P", mp.p.rank());
    let q = e.bundle("Q", mp.q.rank());
    e.matched_pair("mp", &p, &q, mp);
    e.finish()
}

/// Bundle `A` with structures on `A` and `A*`; `structure bialgebroid ab`.
pub fn bialgebroid_document(b: &Bialgebroid) -> Document {
    let mut e = Emitter::new(b.a.base());
    let a = e.bundle("A", b.a.rank());
    e.algebroid(&a, &b.a);
    e.algebroid(&a.dualized(), &b.a_star);
    e.structure(StructureKind::Bialgebroid, "ab", vec![Arg::Name(a.clone()), Arg::Name(a.dualized())]);
    e.finish()
}

/// [`crossed_module_document`] with `multivector r` and `structure rmatrix rm`.
pub fn rmatrix_document(cm: &CrossedModule, r: &GradedElement) -> Document {
    let mut doc = crossed_module_document(cm);
    let mut entries = BTreeMap::new();
    for (idx, c) in r.components() {
        entries.insert(idx.to_vec(), c.clone());
    }
    doc.multivectors.insert(
        "r".into(),
        MultivectorBlock {
            bundle: BundleRef::new("theta", false),
            degree: r.degree(),
            entries,
        },
    );
    doc.structures.push(Structure {
        kind: StructureKind::RMatrix,
        name: "rm".into(),
        args: vec![named("cm"), named("r")],
    });
    doc
}

/// [`matched_pair_document`] with `map h: Q* -> P` and `structure invariant_h ih`.
pub fn invariant_h_document(mp: &MatchedPair, h: &Matrix) -> Document {
    let mut e = Emitter::new(mp.p.base());
    let p = e.bundle("P", mp.p.rank());
    let q = e.bundle("Q", mp.q.rank());
    e.matched_pair("mp", &p, &q, mp);
    let rows: Matrix = (0..mp.q.rank()).map(|a| (0..mp.p.rank()).map(|i| h[i][a].clone()).collect()).collect();
    let m = BundleMap::new(&mp.q.frame().dual(), mp.p.frame(), rows).expect("shape of h");
    e.map("h", &q.dualized(), &p, &m);
    e.structure(StructureKind::InvariantH, "ih", vec![named("mp"), named("h")]);
    e.finish()
}

/// Bundle `K`, form `C` on `K*`, `coquadratic kq` and `manin_triple mt`.
pub fn manin_document(mt: &ManinTriple) -> Document {
    let k = &mt.k.k;
    let mut e = Emitter::new(k.base());
    let r = e.bundle("K", k.rank());
    e.algebroid(&r, k);
    e.form("C", &r.dualized(), &mt.k.c);
    e.structure(StructureKind::Coquadratic, "kq", vec![Arg::Name(r), named("C")]);
    e.structure(
        StructureKind::ManinTriple,
        "mt",
        vec![named("kq"), Arg::Indices(mt.p.clone()), Arg::Indices(mt.q.clone())],
    );
    e.finish()
}

/// Bundle `E` with anchor, Dorfman table and metric `G`; `structure courant`.
pub fn courant_document(c: &CourantStructure) -> Document {
    let mut e = Emitter::new(c.base());
    let r = e.bundle("E", c.rank());
    e.table(&r, c.anchor_matrix(), |i, j| c.entry(i, j).clone(), c.rank());
    e.form("G", &r, c.metric());
    e.structure(StructureKind::Courant, "courant", vec![Arg::Name(r), named("G")]);
    e.finish()
}
