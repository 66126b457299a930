//! Document to kernel objects.

use crate::algebroid::Algebroid;
use crate::bicrossed::{BicrossedModule, CoquadraticAlgebroid, ManinTriple};
use crate::crossmod::{ActionTable, BundleMap, CrossedModule};
use crate::doubles::{Bialgebroid, CourantStructure, MatchedPair};
use crate::error::{Error, Result};
use crate::exterior::{Frame, GradedElement};
use crate::ring::matrix::{self, Matrix};
use crate::ring::{Base, Poly};

use super::{Arg, BundleRef, Document, Structure, StructureKind};

#[derive(Clone, Debug)]
pub enum Object {
    Algebroid(Algebroid),
    CrossedModule(CrossedModule),
    MatchedPair(MatchedPair),
    Bialgebroid(Bialgebroid),
    Bicrossed(BicrossedModule),
    Coquadratic(CoquadraticAlgebroid),
    ManinTriple(ManinTriple),
    RMatrix { cm: CrossedModule, r: GradedElement },
    Courant(CourantStructure),
    /// `h[i][a]` for `P` index `i`, `Q` index `a`.
    InvariantH { mp: MatchedPair, h: Matrix },
}

impl Object {
    pub fn kind(&self) -> StructureKind {
        match self {
            Object::Algebroid(_) => StructureKind::Algebroid,
            Object::CrossedModule(_) => StructureKind::CrossedModule,
            Object::MatchedPair(_) => StructureKind::MatchedPair,
            Object::Bialgebroid(_) => StructureKind::Bialgebroid,
            Object::Bicrossed(_) => StructureKind::Bicrossed,
            Object::Coquadratic(_) => StructureKind::Coquadratic,
            Object::ManinTriple(_) => StructureKind::ManinTriple,
            Object::RMatrix { .. } => StructureKind::RMatrix,
            Object::Courant(_) => StructureKind::Courant,
            Object::InvariantH { .. } => StructureKind::InvariantH,
        }
    }
}

/// Every declared structure, built, in declaration order.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub base: Base,
    pub objects: Vec<(String, Object)>,
}

impl Resolved {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }
}

pub fn resolve(doc: &Document) -> Result<Resolved> {
    let mut b = Builder {
        doc,
        base: doc.base(),
        objects: Vec::new(),
    };
    for s in &doc.structures {
        let obj = b.structure(s).map_err(|e| Error::InvalidStructure {
            structure: s.name.clone(),
            reason: e.to_string(),
        })?;
        b.objects.push((s.name.clone(), obj));
    }
    Ok(Resolved {
        base: b.base,
        objects: b.objects,
    })
}

struct Builder<'a> {
    doc: &'a Document,
    base: Base,
    objects: Vec<(String, Object)>,
}

fn name_arg(arg: &Arg) -> &BundleRef {
    match arg {
        Arg::Name(r) => r,
        Arg::Indices(_) => unreachable!("checked by the parser"),
    }
}

fn indices_arg(arg: &Arg) -> &[usize] {
    match arg {
        Arg::Indices(v) => v,
        Arg::Name(_) => unreachable!("checked by the parser"),
    }
}

impl Builder<'_> {
    fn frame(&self, r: &BundleRef) -> Frame {
        let f = Frame::new(&r.name, self.doc.bundles[&r.name], &self.base);
        if r.dual {
            f.dual()
        } else {
            f
        }
    }

    fn object(&self, name: &str) -> &Object {
        self.objects
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, o)| o)
            .expect("parser checks declaration order")
    }

    /// A bundle reference or the name of an `algebroid` structure.
    fn algebroid(&self, arg: &Arg) -> Result<Algebroid> {
        let r = name_arg(arg);
        if !self.doc.bundles.contains_key(&r.name) {
            if let Object::Algebroid(a) = self.object(&r.name) {
                return Ok(a.clone());
            }
        }
        self.algebroid_on(r)
    }

    fn algebroid_on(&self, r: &BundleRef) -> Result<Algebroid> {
        let frame = self.frame(r);
        let (anchor, table) = self.table(r, &frame)?;
        Algebroid::new(&frame, anchor, table)
    }

    /// Anchor rows and the bracket table with implied `[j,i] = −[i,j]`.
    fn table(&self, r: &BundleRef, frame: &Frame) -> Result<(Vec<Vec<Poly>>, Vec<Vec<GradedElement>>)> {
        let n = frame.rank();
        let mut anchor = vec![vec![Poly::zero(&self.base); self.base.dim()]; n];
        if let Some(rows) = self.doc.anchors.get(r) {
            for (&i, v) in rows {
                anchor[i] = v.clone();
            }
        }
        let mut table = vec![vec![GradedElement::zero(frame, 1); n]; n];
        if let Some(entries) = self.doc.brackets.get(r) {
            for (&(i, j), v) in entries {
                let s = GradedElement::vector(frame, v.clone())?;
                if !entries.contains_key(&(j, i)) {
                    table[j][i] = s.neg();
                }
                table[i][j] = s;
            }
        }
        Ok((anchor, table))
    }

    fn action(&self, name: &str) -> Result<ActionTable> {
        let block = &self.doc.actions[name];
        let actor = self.algebroid_on(&block.actor)?;
        let target = self.frame(&block.target);
        let mut act = ActionTable::zero(&actor, &target);
        for (&(i, a), v) in &block.entries {
            act.set(i, a, GradedElement::vector(&target, v.clone())?)?;
        }
        Ok(act)
    }

    fn map(&self, name: &str) -> Result<BundleMap> {
        let block = &self.doc.maps[name];
        let (source, target) = (self.frame(&block.source), self.frame(&block.target));
        let mut rows = matrix::zeros(&self.base, source.rank(), target.rank());
        for (&a, v) in &block.entries {
            rows[a] = v.clone();
        }
        BundleMap::new(&source, &target, rows)
    }

    /// Symmetric matrix with implied `[j,i] = [i,j]`.
    fn form(&self, name: &str) -> Matrix {
        let block = &self.doc.forms[name];
        let n = self.doc.bundles[&block.bundle.name];
        let mut c = matrix::zeros(&self.base, n, n);
        for (&(i, j), v) in &block.entries {
            c[i][j] = v.clone();
            if !block.entries.contains_key(&(j, i)) {
                c[j][i] = v.clone();
            }
        }
        c
    }

    fn multivector(&self, name: &str) -> GradedElement {
        let block = &self.doc.multivectors[name];
        let mut m = GradedElement::zero(&self.frame(&block.bundle), block.degree);
        for (idx, v) in &block.entries {
            m.add_basis_term(idx, v);
        }
        m
    }

    fn crossed_module(&self, args: &[Arg]) -> Result<CrossedModule> {
        let theta = self.algebroid(&args[0])?;
        let phi = self.map(&name_arg(&args[1]).name)?;
        let g = self.algebroid(&args[2])?;
        let act = self.action(&name_arg(&args[3]).name)?.with_actor(&g)?;
        CrossedModule::new(theta, g, phi, act)
    }

    fn named_cm(&self, arg: &Arg) -> CrossedModule {
        match self.object(&name_arg(arg).name) {
            Object::CrossedModule(cm) => cm.clone(),
            _ => unreachable!("checked by the parser"),
        }
    }

    fn structure(&self, s: &Structure) -> Result<Object> {
        let args = &s.args;
        Ok(match s.kind {
            StructureKind::Algebroid => Object::Algebroid(self.algebroid_on(name_arg(&args[0]))?),
            StructureKind::CrossedModule => Object::CrossedModule(self.crossed_module(args)?),
            StructureKind::MatchedPair => {
                let p = self.algebroid(&args[0])?;
                let q = self.algebroid(&args[1])?;
                let pq = self.action(&name_arg(&args[2]).name)?.with_actor(&p)?;
                let qp = self.action(&name_arg(&args[3]).name)?.with_actor(&q)?;
                Object::MatchedPair(MatchedPair::new(p, q, pq, qp)?)
            }
            StructureKind::Bialgebroid => {
                Object::Bialgebroid(Bialgebroid::new(self.algebroid(&args[0])?, self.algebroid(&args[1])?)?)
            }
            StructureKind::Bicrossed => {
                Object::Bicrossed(BicrossedModule::new(self.named_cm(&args[0]), self.named_cm(&args[1]))?)
            }
            StructureKind::Coquadratic => {
                let k = self.algebroid(&args[0])?;
                Object::Coquadratic(CoquadraticAlgebroid::new(k, self.form(&name_arg(&args[1]).name))?)
            }
            StructureKind::ManinTriple => {
                let k = match self.object(&name_arg(&args[0]).name) {
                    Object::Coquadratic(k) => k.clone(),
                    _ => unreachable!("checked by the parser"),
                };
                Object::ManinTriple(ManinTriple {
                    k,
                    p: indices_arg(&args[1]).to_vec(),
                    q: indices_arg(&args[2]).to_vec(),
                })
            }
            StructureKind::RMatrix => Object::RMatrix {
                cm: self.named_cm(&args[0]),
                r: self.multivector(&name_arg(&args[1]).name),
            },
            StructureKind::Courant => {
                let r = name_arg(&args[0]);
                let frame = self.frame(r);
                let (anchor, table) = self.table(r, &frame)?;
                Object::Courant(CourantStructure::new(&frame, self.form(&name_arg(&args[1]).name), anchor, table)?)
            }
            StructureKind::InvariantH => {
                let mp = match self.object(&name_arg(&args[0]).name) {
                    Object::MatchedPair(mp) => mp.clone(),
                    _ => unreachable!("checked by the parser"),
                };
                let m = self.map(&name_arg(&args[1]).name)?;
                let h = (0..mp.p.rank())
                    .map(|i| (0..mp.q.rank()).map(|a| m.entry(a, i).clone()).collect())
                    .collect();
                Object::InvariantH { mp, h }
            }
        })
    }
}
