//! Matched pairs and their doubles, Lie bialgebroids, and Courant algebroids
//! given by a Dorfman bracket on a frame.
//!
//! A [`CourantStructure`] stores the Dorfman bracket on basis elements only.
//! On general sections it is extended by `⟦x, f y⟧ = (ρ(x)f) y + f⟦x,y⟧` and
//! `⟦f x, y⟧ = f⟦x,y⟧ − (ρ(y)f) x + ⟨x,y⟩ D f`.

use crate::algebroid::{check_algebroid, Algebroid, Section};
use crate::crossmod::{check_representation, slot_multipliers, ActionTable, CrossedModule};
use crate::error::{Error, Result};
use crate::exterior::{Frame, GradedElement};
use crate::report::{CheckReport, Law};
use crate::ring::matrix::{self, Matrix};
use crate::ring::{Base, Poly};

fn unit(f: &Frame, i: usize) -> Section {
    GradedElement::unit(f, i)
}

fn coords(base: &Base) -> Vec<Poly> {
    (0..base.dim()).map(|k| Poly::var(base, k).unwrap()).collect()
}

fn apply_field(v: &[Poly], f: &Poly) -> Poly {
    let mut out = Poly::zero(f.base());
    for (l, c) in v.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &(c * &f.partial(l).unwrap());
        }
    }
    out
}

fn with_detail(label: &Option<String>, extra: impl Into<String>) -> Option<String> {
    let extra = extra.into();
    Some(match label {
        Some(l) => format!("{l}, {extra}"),
        None => extra,
    })
}

/// Two algebroids over the same base, each acting on the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedPair {
    pub p: Algebroid,
    pub q: Algebroid,
    /// `P` acting on `Q`.
    pub act_pq: ActionTable,
    /// `Q` acting on `P`.
    pub act_qp: ActionTable,
}

impl MatchedPair {
    pub fn new(p: Algebroid, q: Algebroid, act_pq: ActionTable, act_qp: ActionTable) -> Result<Self> {
        p.base().ensure_same(q.base())?;
        p.frame().ensure_eq(act_pq.actor().frame())?;
        q.frame().ensure_eq(act_pq.target())?;
        q.frame().ensure_eq(act_qp.actor().frame())?;
        p.frame().ensure_eq(act_qp.target())?;
        if !p.same_tables(act_pq.actor()) || !q.same_tables(act_qp.actor()) {
            return Err(Error::InvalidStructure {
                structure: "matched pair".into(),
                reason: "an action is defined for a different algebroid structure".into(),
            });
        }
        Ok(MatchedPair { p, q, act_pq, act_qp })
    }

    /// Both actions zero.
    pub fn trivial(p: Algebroid, q: Algebroid) -> Result<Self> {
        let act_pq = ActionTable::zero(&p, q.frame());
        let act_qp = ActionTable::zero(&q, p.frame());
        MatchedPair::new(p, q, act_pq, act_qp)
    }
}

/// `X▷[Y1,Y2] = [X▷Y1,Y2] + [Y1,X▷Y2] + (Y2▷X)▷Y1 − (Y1▷X)▷Y2` for `X` in
/// `x_alg` acting by `act_xy` and `Y` in `y_alg` acting back by `act_yx`.
fn derivation_law(id: &str, law: &str, x_alg: &Algebroid, y_alg: &Algebroid, act_xy: &ActionTable, act_yx: &ActionTable) -> Law {
    let mut out = Law::new(id, law);
    for i in 0..x_alg.rank() {
        for a in 0..y_alg.rank() {
            for b in 0..y_alg.rank() {
                for (label, m) in slot_multipliers(x_alg.base(), 3) {
                    let x = unit(x_alg.frame(), i).mul_fn(&m[0]);
                    let y1 = unit(y_alg.frame(), a).mul_fn(&m[1]);
                    let y2 = unit(y_alg.frame(), b).mul_fn(&m[2]);
                    let lhs = act_xy.act(&x, &y_alg.bracket(&y1, &y2).unwrap()).unwrap();
                    let rhs = y_alg
                        .bracket(&act_xy.act(&x, &y1).unwrap(), &y2)
                        .unwrap()
                        .add(&y_alg.bracket(&y1, &act_xy.act(&x, &y2).unwrap()).unwrap())
                        .add(&act_xy.act(&act_yx.act(&y2, &x).unwrap(), &y1).unwrap())
                        .sub(&act_xy.act(&act_yx.act(&y1, &x).unwrap(), &y2).unwrap());
                    out.record_with(&[i, a, b], &lhs.sub(&rhs), label);
                }
            }
        }
    }
    out
}

/// Both algebroids, both representations and the three compatibility
/// identities, on basis tuples with coefficient multipliers `1, x_k`.
pub fn check_matched_pair(mp: &MatchedPair) -> CheckReport {
    let (p, q) = (&mp.p, &mp.q);
    let mut report = CheckReport::new(format!("({}, {})", p.name(), q.name()));
    report.absorb("P", check_algebroid(p));
    report.absorb("Q", check_algebroid(q));
    report.absorb("P-on-Q", check_representation(&mp.act_pq));
    report.absorb("Q-on-P", check_representation(&mp.act_qp));

    let base = p.base();
    let xs = coords(base);
    let mut anchors = Law::new("anchors", "[ρ_P(X),ρ_Q(Y)] = −ρ_P(Y▷X) + ρ_Q(X▷Y)");
    for i in 0..p.rank() {
        for a in 0..q.rank() {
            for (label, m) in slot_multipliers(base, 2) {
                let x = unit(p.frame(), i).mul_fn(&m[0]);
                let y = unit(q.frame(), a).mul_fn(&m[1]);
                let yx = mp.act_qp.act(&y, &x).unwrap();
                let xy = mp.act_pq.act(&x, &y).unwrap();
                for (k, xk) in xs.iter().enumerate() {
                    let lhs = &p.anchor_apply(&x, &q.anchor_apply(&y, xk).unwrap()).unwrap()
                        - &q.anchor_apply(&y, &p.anchor_apply(&x, xk).unwrap()).unwrap();
                    let rhs = &q.anchor_apply(&xy, xk).unwrap() - &p.anchor_apply(&yx, xk).unwrap();
                    anchors.record_with(&[i, a], &(&lhs - &rhs), with_detail(&label, format!("on {}", base.vars()[k])));
                }
            }
        }
    }
    report.push(anchors);
    report.push(derivation_law(
        "P-derivation",
        "X▷[Y1,Y2] = [X▷Y1,Y2] + [Y1,X▷Y2] + (Y2▷X)▷Y1 − (Y1▷X)▷Y2",
        p,
        q,
        &mp.act_pq,
        &mp.act_qp,
    ));
    report.push(derivation_law(
        "Q-derivation",
        "Y▷[X1,X2] = [Y▷X1,X2] + [X1,Y▷X2] + (X2▷Y)▷X1 − (X1▷Y)▷X2",
        q,
        p,
        &mp.act_qp,
        &mp.act_pq,
    ));
    report
}

/// `P ⋈ Q` without validation: anchor `ρ_P + ρ_Q`,
/// `[X, Y] = −Y▷X ⊕ X▷Y` for `X ∈ P`, `Y ∈ Q`.
pub fn double_algebroid(mp: &MatchedPair) -> Algebroid {
    let (p, q) = (&mp.p, &mp.q);
    let rp = p.rank();
    let frame = p.frame().direct_sum(q.frame());
    let mut out = Algebroid::abelian(&frame);
    let emb_p = |s: &Section| s.relabel(&frame, |k| k);
    let emb_q = |s: &Section| s.relabel(&frame, |k| k + rp);
    for i in 0..rp {
        out.set_anchor(i, p.anchor_matrix()[i].clone()).unwrap();
        for j in 0..rp {
            out.set_bracket_entry(i, j, emb_p(p.bracket_basis(i, j))).unwrap();
        }
    }
    for a in 0..q.rank() {
        out.set_anchor(rp + a, q.anchor_matrix()[a].clone()).unwrap();
        for b in 0..q.rank() {
            out.set_bracket_entry(rp + a, rp + b, emb_q(q.bracket_basis(a, b))).unwrap();
        }
        for i in 0..rp {
            let s = emb_q(mp.act_pq.entry(i, a)).sub(&emb_p(mp.act_qp.entry(a, i)));
            out.set_bracket_entry(rp + a, i, s.neg()).unwrap();
            out.set_bracket_entry(i, rp + a, s).unwrap();
        }
    }
    out
}

/// `P ⋈ Q` for a valid matched pair.
pub fn build_double(mp: &MatchedPair) -> Result<Algebroid> {
    let rep = check_matched_pair(mp);
    if let Some(f) = rep.failures().next() {
        return Err(Error::InvalidStructure {
            structure: rep.structure.clone(),
            reason: format!("{} fails at {:?}: {}", f.id, f.witness, f.residual),
        });
    }
    Ok(double_algebroid(mp))
}

/// Splits `l` into its first `p_frame.rank()` and remaining basis elements.
/// Both halves must be closed under the bracket.
pub fn decompose(l: &Algebroid, p_frame: &Frame, q_frame: &Frame) -> Result<MatchedPair> {
    let (rp, rq) = (p_frame.rank(), q_frame.rank());
    if rp + rq != l.rank() {
        return Err(Error::Shape(format!(
            "split {rp} + {rq} does not match rank {}",
            l.rank()
        )));
    }
    let not_closed = |i: usize, j: usize, half: &str| Error::InvalidStructure {
        structure: l.name().to_string(),
        reason: format!("{half} half is not closed under the bracket at ({}, {})", i + 1, j + 1),
    };
    let mut p = Algebroid::abelian(p_frame);
    let mut q = Algebroid::abelian(q_frame);
    for i in 0..rp {
        p.set_anchor(i, l.anchor_matrix()[i].clone())?;
        for j in 0..rp {
            let s = l.bracket_basis(i, j);
            if (rp..l.rank()).any(|k| !s.coeff(k).is_zero()) {
                return Err(not_closed(i, j, "first"));
            }
            p.set_bracket_entry(i, j, GradedElement::vector(p_frame, s.coeffs()[..rp].to_vec())?)?;
        }
    }
    for a in 0..rq {
        q.set_anchor(a, l.anchor_matrix()[rp + a].clone())?;
        for b in 0..rq {
            let s = l.bracket_basis(rp + a, rp + b);
            if (0..rp).any(|k| !s.coeff(k).is_zero()) {
                return Err(not_closed(rp + a, rp + b, "second"));
            }
            q.set_bracket_entry(a, b, GradedElement::vector(q_frame, s.coeffs()[rp..].to_vec())?)?;
        }
    }
    let mut act_pq = ActionTable::zero(&p, q_frame);
    let mut act_qp = ActionTable::zero(&q, p_frame);
    for i in 0..rp {
        for a in 0..rq {
            let c = l.bracket_basis(i, rp + a).coeffs();
            act_pq.set(i, a, GradedElement::vector(q_frame, c[rp..].to_vec())?)?;
            act_qp.set(a, i, GradedElement::vector(p_frame, c[..rp].to_vec())?.neg())?;
        }
    }
    MatchedPair::new(p, q, act_pq, act_qp)
}

/// `(A, A*)` with `A*` an algebroid on the dual frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bialgebroid {
    pub a: Algebroid,
    pub a_star: Algebroid,
}

impl Bialgebroid {
    pub fn new(a: Algebroid, a_star: Algebroid) -> Result<Self> {
        a.frame().dual().ensure_eq(a_star.frame())?;
        Ok(Bialgebroid { a, a_star })
    }

    /// `d_*` on multivectors of `A`.
    pub fn d_star(&self, p: &GradedElement) -> Result<GradedElement> {
        self.a_star.differential(p)
    }
}

/// Both algebroids and the derivation law
/// `d_*[u,v] = [d_*u,v] + (−1)^{k−1}[u,d_*v]` for sections `u` and `v` a
/// section or a coordinate function.
pub fn check_bialgebroid(b: &Bialgebroid) -> CheckReport {
    let a = &b.a;
    let mut report = CheckReport::new(format!("({}, {})", a.frame(), b.a_star.frame()));
    report.absorb("A", check_algebroid(a));
    report.absorb("A*", check_algebroid(&b.a_star));
    let base = a.base();
    let e = |i| unit(a.frame(), i);

    let mut law = Law::new("derivation", "d*[u,v] = [d*u,v] + [u,d*v]");
    for i in 0..a.rank() {
        for j in 0..a.rank() {
            for (label, m) in slot_multipliers(base, 2) {
                let u = e(i).mul_fn(&m[0]);
                let v = e(j).mul_fn(&m[1]);
                let lhs = b.d_star(&a.schouten(&u, &v).unwrap()).unwrap();
                let rhs = a
                    .schouten(&b.d_star(&u).unwrap(), &v)
                    .unwrap()
                    .add(&a.schouten(&u, &b.d_star(&v).unwrap()).unwrap());
                law.record_with(&[i, j], &lhs.sub(&rhs), label);
            }
        }
    }
    for i in 0..a.rank() {
        for (k, xk) in coords(base).into_iter().enumerate() {
            for (label, m) in slot_multipliers(base, 1) {
                let u = e(i).mul_fn(&m[0]);
                let f = GradedElement::scalar(a.frame(), xk.clone());
                let lhs = b.d_star(&a.schouten(&u, &f).unwrap()).unwrap();
                let rhs = a
                    .schouten(&b.d_star(&u).unwrap(), &f)
                    .unwrap()
                    .add(&a.schouten(&u, &b.d_star(&f).unwrap()).unwrap());
                law.record_with(&[i], &lhs.sub(&rhs), with_detail(&label, format!("v = {}", base.vars()[k])));
            }
        }
    }
    report.push(law);
    report
}

/// Courant algebroid on a frame: symmetric metric with polynomial inverse,
/// anchor rows and Dorfman bracket of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourantStructure {
    frame: Frame,
    metric: Matrix,
    metric_inv: Matrix,
    anchor: Vec<Vec<Poly>>,
    dorfman: Vec<Vec<Section>>,
}

impl CourantStructure {
    pub fn new(frame: &Frame, metric: Matrix, anchor: Vec<Vec<Poly>>, dorfman: Vec<Vec<Section>>) -> Result<Self> {
        let (r, n) = (frame.rank(), frame.base().dim());
        if metric.len() != r || metric.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("metric must be {r} x {r}")));
        }
        if !matrix::is_symmetric(&metric) {
            return Err(Error::Shape("metric is not symmetric".into()));
        }
        if anchor.len() != r || anchor.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("anchor must be {r} x {n}")));
        }
        if dorfman.len() != r || dorfman.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("Dorfman table must be {r} x {r}")));
        }
        for s in dorfman.iter().flatten() {
            frame.ensure_eq(s.frame())?;
        }
        let metric_inv = matrix::inverse(&metric, frame.base())?;
        Ok(CourantStructure {
            frame: frame.clone(),
            metric,
            metric_inv,
            anchor,
            dorfman,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn base(&self) -> &Base {
        self.frame.base()
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn anchor_matrix(&self) -> &[Vec<Poly>] {
        &self.anchor
    }

    pub fn entry(&self, i: usize, j: usize) -> &Section {
        &self.dorfman[i][j]
    }

    /// Replaces one basis entry of the Dorfman table.
    pub fn set_entry(&mut self, i: usize, j: usize, s: Section) -> Result<()> {
        self.frame.check_index(i)?;
        self.frame.check_index(j)?;
        self.frame.ensure_eq(s.frame())?;
        self.dorfman[i][j] = s;
        Ok(())
    }

    pub fn pairing(&self, x: &Section, y: &Section) -> Result<Poly> {
        self.frame.ensure_eq(x.frame())?;
        self.frame.ensure_eq(y.frame())?;
        let mut out = Poly::zero(self.base());
        for (i, f) in x.components() {
            for (j, g) in y.components() {
                let m = &self.metric[i[0]][j[0]];
                if !m.is_zero() {
                    out = &out + &(&(f * g) * m);
                }
            }
        }
        Ok(out)
    }

    pub fn anchor_vector(&self, x: &Section) -> Result<Vec<Poly>> {
        self.frame.ensure_eq(x.frame())?;
        let mut v = vec![Poly::zero(self.base()); self.base().dim()];
        for (i, f) in x.components() {
            for (k, c) in self.anchor[i[0]].iter().enumerate() {
                v[k] = &v[k] + &(f * c);
            }
        }
        Ok(v)
    }

    pub fn anchor_apply(&self, x: &Section, f: &Poly) -> Result<Poly> {
        Ok(apply_field(&self.anchor_vector(x)?, f))
    }

    /// `D f`, defined by `⟨D f, x⟩ = ρ(x) f`.
    pub fn d(&self, f: &Poly) -> Section {
        let r = self.rank();
        let cov: Vec<Poly> = (0..r).map(|l| apply_field(&self.anchor[l], f)).collect();
        let mut coeffs = vec![Poly::zero(self.base()); r];
        for (k, c) in coeffs.iter_mut().enumerate() {
            for (l, v) in cov.iter().enumerate() {
                if !v.is_zero() {
                    *c = &*c + &(&self.metric_inv[k][l] * v);
                }
            }
        }
        GradedElement::vector(&self.frame, coeffs).unwrap()
    }

    pub fn dorfman(&self, x: &Section, y: &Section) -> Result<Section> {
        self.frame.ensure_eq(x.frame())?;
        self.frame.ensure_eq(y.frame())?;
        let mut out = GradedElement::zero(&self.frame, 1);
        for (ii, f) in x.components() {
            let i = ii[0];
            for (jj, g) in y.components() {
                let j = jj[0];
                out = out.add(&self.dorfman[i][j].mul_fn(&(f * g)));
                out.add_basis_term(&[j], &(f * &apply_field(&self.anchor[i], g)));
                out.add_basis_term(&[i], &-(g * &apply_field(&self.anchor[j], f)));
                let m = &self.metric[i][j];
                if !m.is_zero() {
                    out = out.add(&self.d(f).mul_fn(&(g * m)));
                }
            }
        }
        Ok(out)
    }
}

/// The Courant double `A ⊕ A*` of a pair of algebroids in duality, without
/// validation. Basis: `A` first, then `A*`.
pub fn courant_double(b: &Bialgebroid) -> CourantStructure {
    let (a, s) = (&b.a, &b.a_star);
    let r = a.rank();
    let base = a.base();
    let frame = a.frame().direct_sum(s.frame());
    let emb_a = |x: &GradedElement| x.relabel(&frame, |k| k);
    let emb_s = |x: &GradedElement| x.relabel(&frame, |k| k + r);
    let e = |i| unit(a.frame(), i);
    let eps = |i| unit(s.frame(), i);

    let mut metric = matrix::zeros(base, 2 * r, 2 * r);
    for i in 0..r {
        metric[i][r + i] = Poly::one(base);
        metric[r + i][i] = Poly::one(base);
    }
    let mut anchor = a.anchor_matrix().to_vec();
    anchor.extend(s.anchor_matrix().iter().cloned());

    let d_star_e: Vec<GradedElement> = (0..r).map(|i| s.differential(&e(i)).unwrap()).collect();
    let d_eps: Vec<GradedElement> = (0..r).map(|i| a.differential(&eps(i)).unwrap()).collect();
    let mut dorfman = vec![vec![GradedElement::zero(&frame, 1); 2 * r]; 2 * r];
    for i in 0..r {
        for j in 0..r {
            dorfman[i][j] = emb_a(a.bracket_basis(i, j));
            dorfman[r + i][r + j] = emb_s(s.bracket_basis(i, j));
            // ⟦X, ξ⟧ = −ι_ξ d_* X + L_X ξ
            dorfman[i][r + j] = emb_a(&s.interior(&eps(j), &d_star_e[i]).unwrap().neg())
                .add(&emb_s(&a.lie_derivative(&e(i), &eps(j)).unwrap()));
            // ⟦ξ, X⟧ = L_ξ X − ι_X d ξ
            dorfman[r + i][j] = emb_a(&s.lie_derivative(&eps(i), &e(j)).unwrap())
                .sub(&emb_s(&a.interior(&e(j), &d_eps[i]).unwrap()));
        }
    }
    CourantStructure::new(&frame, metric, anchor, dorfman).expect("split metric is invertible")
}

/// The double of a valid Lie bialgebroid.
pub fn build_courant_double(b: &Bialgebroid) -> Result<CourantStructure> {
    let rep = check_bialgebroid(b);
    if let Some(f) = rep.failures().next() {
        return Err(Error::InvalidStructure {
            structure: rep.structure.clone(),
            reason: format!("{} fails at {:?}: {}", f.id, f.witness, f.residual),
        });
    }
    Ok(courant_double(b))
}

/// The Courant axioms, plus `ρ∘D = 0`. The Jacobi-type axiom is checked on
/// basis triples, the others also with coefficient multipliers `1, x_k`;
/// `f` ranges over the coordinate functions.
pub fn check_courant(c: &CourantStructure) -> CheckReport {
    let r = c.rank();
    let base = c.base().clone();
    let xs = coords(&base);
    let e = |i| unit(c.frame(), i);
    let db = |x: &Section, y: &Section| c.dorfman(x, y).unwrap();
    let pair = |x: &Section, y: &Section| c.pairing(x, y).unwrap();
    let var = |k: usize| format!("f = {}", base.vars()[k]);
    let mut report = CheckReport::new(c.frame().to_string());

    let mut ca1 = Law::new("CA1-leibniz", "⟦x,⟦y,z⟧⟧ = ⟦⟦x,y⟧,z⟧ + ⟦y,⟦x,z⟧⟧");
    for i in 0..r {
        for j in 0..r {
            let ij = db(&e(i), &e(j));
            for k in 0..r {
                let lhs = db(&e(i), &db(&e(j), &e(k)));
                let rhs = db(&ij, &e(k)).add(&db(&e(j), &db(&e(i), &e(k))));
                ca1.record(&[i, j, k], &lhs.sub(&rhs));
            }
        }
    }
    report.push(ca1);

    let mut ca2 = Law::new("CA2-anchor", "ρ(⟦x,y⟧) = [ρ(x),ρ(y)]");
    for i in 0..r {
        for j in 0..r {
            for (label, m) in slot_multipliers(&base, 2) {
                let x = e(i).mul_fn(&m[0]);
                let y = e(j).mul_fn(&m[1]);
                let xy = db(&x, &y);
                for (k, xk) in xs.iter().enumerate() {
                    let lhs = c.anchor_apply(&xy, xk).unwrap();
                    let rhs = &c.anchor_apply(&x, &c.anchor_apply(&y, xk).unwrap()).unwrap()
                        - &c.anchor_apply(&y, &c.anchor_apply(&x, xk).unwrap()).unwrap();
                    ca2.record_with(&[i, j], &(&lhs - &rhs), with_detail(&label, format!("on {}", base.vars()[k])));
                }
            }
        }
    }
    report.push(ca2);

    let mut ca3 = Law::new("CA3-right-leibniz", "⟦x,fy⟧ = (ρ(x)f)y + f⟦x,y⟧");
    for i in 0..r {
        for j in 0..r {
            for (k, f) in xs.iter().enumerate() {
                for (label, m) in slot_multipliers(&base, 1) {
                    let x = e(i).mul_fn(&m[0]);
                    let lhs = db(&x, &e(j).mul_fn(f));
                    let rhs = e(j)
                        .mul_fn(&c.anchor_apply(&x, f).unwrap())
                        .add(&db(&x, &e(j)).mul_fn(f));
                    ca3.record_with(&[i, j], &lhs.sub(&rhs), with_detail(&label, var(k)));
                }
            }
        }
    }
    report.push(ca3);

    let mut ca4 = Law::new("CA4-symmetric-part", "⟦x,y⟧ + ⟦y,x⟧ = D⟨x,y⟩");
    for i in 0..r {
        for j in i..r {
            for (label, m) in slot_multipliers(&base, 2) {
                let x = e(i).mul_fn(&m[0]);
                let y = e(j).mul_fn(&m[1]);
                let lhs = db(&x, &y).add(&db(&y, &x));
                ca4.record_with(&[i, j], &lhs.sub(&c.d(&pair(&x, &y))), label);
            }
        }
    }
    report.push(ca4);

    let mut ca5 = Law::new("CA5-D-null", "⟦Df,x⟧ = 0");
    for (k, f) in xs.iter().enumerate() {
        let df = c.d(f);
        for j in 0..r {
            for (label, m) in slot_multipliers(&base, 1) {
                ca5.record_with(&[j], &db(&df, &e(j).mul_fn(&m[0])), with_detail(&label, var(k)));
            }
        }
    }
    report.push(ca5);

    let mut ca6 = Law::new("CA6-metric-invariance", "ρ(x)⟨y,z⟩ = ⟨⟦x,y⟧,z⟩ + ⟨y,⟦x,z⟧⟩");
    for i in 0..r {
        for j in 0..r {
            for k in j..r {
                for (label, m) in slot_multipliers(&base, 3) {
                    let x = e(i).mul_fn(&m[0]);
                    let y = e(j).mul_fn(&m[1]);
                    let z = e(k).mul_fn(&m[2]);
                    let lhs = c.anchor_apply(&x, &pair(&y, &z)).unwrap();
                    let rhs = &pair(&db(&x, &y), &z) + &pair(&y, &db(&x, &z));
                    ca6.record_with(&[i, j, k], &(&lhs - &rhs), label);
                }
            }
        }
    }
    report.push(ca6);

    let mut rho_d = Law::new("anchor-of-D", "ρ(Df) = 0");
    for (k, f) in xs.iter().enumerate() {
        let v = c.anchor_vector(&c.d(f)).unwrap();
        for (l, comp) in v.iter().enumerate() {
            rho_d.record_with(&[], comp, Some(format!("{}, ∂/∂{}", var(k), base.vars()[l])));
        }
    }
    report.push(rho_d);
    report
}

/// Maximal isotropy and closure of the span of `span`. The spanning sections
/// must be in pivot form: each has coefficient 1 at an index where all the
/// others vanish.
pub fn check_dirac(c: &CourantStructure, span: &[Section]) -> Result<CheckReport> {
    let mut pivots = Vec::with_capacity(span.len());
    for (a, s) in span.iter().enumerate() {
        c.frame().ensure_eq(s.frame())?;
        let p = (0..c.rank()).find(|&k| {
            s.coeff(k) == Poly::one(c.base())
                && span.iter().enumerate().all(|(b, t)| b == a || t.coeff(k).is_zero())
        });
        pivots.push(p.ok_or_else(|| Error::Shape(format!("spanning section {} has no pivot", a + 1)))?);
    }
    let mut report = CheckReport::new(format!("span in {}", c.frame()));
    report.push_flag(
        "maximal",
        "2 dim D = rank E",
        2 * span.len() == c.rank(),
        Some(format!("dim {} in rank {}", span.len(), c.rank())),
    );
    let mut iso = Law::new("isotropy", "⟨s_a,s_b⟩ = 0");
    for a in 0..span.len() {
        for b in a..span.len() {
            iso.record(&[a, b], &c.pairing(&span[a], &span[b])?);
        }
    }
    report.push(iso);
    let mut closed = Law::new("closure", "⟦s_a,s_b⟧ ∈ span");
    for a in 0..span.len() {
        for b in 0..span.len() {
            let br = c.dorfman(&span[a], &span[b])?;
            let mut rest = br.clone();
            for (k, s) in span.iter().enumerate() {
                rest = rest.sub(&s.mul_fn(&br.coeff(pivots[k])));
            }
            closed.record(&[a, b], &rest);
        }
    }
    report.push(closed);
    Ok(report)
}

/// [`check_dirac`] for the span of basis elements.
pub fn check_dirac_indices(c: &CourantStructure, idx: &[usize]) -> Result<CheckReport> {
    for &i in idx {
        c.frame().check_index(i)?;
    }
    let span: Vec<Section> = idx.iter().map(|&i| unit(c.frame(), i)).collect();
    check_dirac(c, &span)
}

/// The pair `(g, θ*)` attached to crossed modules in duality: `g` acts on
/// `θ*` dually to its action on `θ`, and `θ*` acts on `g` dually to its
/// action on `g*`.
pub fn dual_matched_pair(cm: &CrossedModule, dual: &CrossedModule) -> Result<MatchedPair> {
    cm.g.frame().dual().ensure_eq(dual.theta.frame())?;
    cm.theta.frame().dual().ensure_eq(dual.g.frame())?;
    MatchedPair::new(cm.g.clone(), dual.g.clone(), cm.action.dual(), dual.action.dual())
}

/// `x∨ξ ∈ θ` for `x ∈ g = P`, `ξ ∈ g*`: `⟨x∨ξ, α⟩ = ⟨ξ, α▷x⟩`, with
/// `θ* = Q`.
pub fn vee_left(mp: &MatchedPair, x: &Section, xi: &Section) -> Result<Section> {
    let theta = mp.q.frame().dual();
    let mut coeffs = Vec::with_capacity(theta.rank());
    for c in 0..theta.rank() {
        let ax = mp.act_qp.act(&unit(mp.q.frame(), c), x)?;
        coeffs.push(GradedElement::pair(xi, &ax)?);
    }
    GradedElement::vector(&theta, coeffs)
}

/// `α∨u ∈ g*` for `α ∈ θ* = Q`, `u ∈ θ`: `⟨α∨u, x⟩ = ⟨u, x▷α⟩`.
pub fn vee_right(mp: &MatchedPair, alpha: &Section, u: &Section) -> Result<Section> {
    let gdual = mp.p.frame().dual();
    let mut coeffs = Vec::with_capacity(gdual.rank());
    for i in 0..mp.p.rank() {
        let xa = mp.act_pq.act(&unit(mp.p.frame(), i), alpha)?;
        coeffs.push(GradedElement::pair(u, &xa)?);
    }
    GradedElement::vector(&gdual, coeffs)
}

/// Basis tables `e_i∨ε_j` and `α_a∨u_b`.
pub fn vee_operators(mp: &MatchedPair) -> Result<(Vec<Vec<Section>>, Vec<Vec<Section>>)> {
    let (g, ts) = (mp.p.frame(), mp.q.frame());
    let (gd, t) = (g.dual(), ts.dual());
    let left = (0..g.rank())
        .map(|i| (0..g.rank()).map(|j| vee_left(mp, &unit(g, i), &unit(&gd, j))).collect())
        .collect::<Result<_>>()?;
    let right = (0..ts.rank())
        .map(|a| (0..t.rank()).map(|b| vee_right(mp, &unit(ts, a), &unit(&t, b))).collect())
        .collect::<Result<_>>()?;
    Ok((left, right))
}

/// Index layout of the double of `A_{g▷θ}` and `A_{θ*▷g*}`: `g`, `θ`, `g*`, `θ*`.
struct Layout {
    frame: Frame,
    rg: usize,
    rt: usize,
}

impl Layout {
    fn embed(&self, s: &Section, offset: usize) -> Section {
        s.relabel(&self.frame, |k| k + offset)
    }
    fn g(&self, s: &Section) -> Section {
        self.embed(s, 0)
    }
    fn theta(&self, s: &Section) -> Section {
        self.embed(s, self.rg)
    }
    fn g_dual(&self, s: &Section) -> Section {
        self.embed(s, self.rg + self.rt)
    }
    fn theta_dual(&self, s: &Section) -> Section {
        self.embed(s, 2 * self.rg + self.rt)
    }
}

/// Compares the Dorfman bracket of `e`, the double of the semidirect
/// algebroids of `cm` and `dual`, with the closed forms
/// `x∘ξ = L_xξ − L_ξx + x∨ξ`, `α∘u = L_αu − L_uα + α∨u`,
/// `x∘α = x▷α − α▷x` and `ξ∘u = u∘ξ = 0`. Whether `g*` and `θ` are
/// abelian under `∘` is reported for information.
pub fn check_restricted_brackets(e: &CourantStructure, cm: &CrossedModule, dual: &CrossedModule) -> Result<CheckReport> {
    let mp = dual_matched_pair(cm, dual)?;
    let (g, theta) = (&cm.g, &cm.theta);
    let (gs, ts) = (&dual.theta, &dual.g);
    let lay = Layout {
        frame: e.frame().clone(),
        rg: g.rank(),
        rt: theta.rank(),
    };
    if e.rank() != 2 * (lay.rg + lay.rt) {
        return Err(Error::Shape(format!(
            "double of rank {} does not split as g + θ + g* + θ*",
            e.rank()
        )));
    }
    let base = g.base();
    let db = |x: &Section, y: &Section| e.dorfman(x, y);
    let mut report = CheckReport::new(format!("double of {} -> {}", theta.name(), g.name()));

    let mut c1 = Law::new("g+g*", "x∘ξ = L_x ξ − L_ξ x + x∨ξ");
    for i in 0..lay.rg {
        for j in 0..lay.rg {
            for (label, m) in slot_multipliers(base, 2) {
                let x = unit(g.frame(), i).mul_fn(&m[0]);
                let xi = unit(gs.frame(), j).mul_fn(&m[1]);
                let lhs = db(&lay.g(&x), &lay.g_dual(&xi))?;
                let rhs = lay
                    .g_dual(&g.lie_derivative(&x, &xi)?)
                    .sub(&lay.g(&gs.lie_derivative(&xi, &x)?))
                    .add(&lay.theta(&vee_left(&mp, &x, &xi)?));
                c1.record_with(&[i, j], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(c1);

    let mut c2 = Law::new("theta*+theta", "α∘u = L_α u − L_u α + α∨u");
    for a in 0..lay.rt {
        for b in 0..lay.rt {
            for (label, m) in slot_multipliers(base, 2) {
                let al = unit(ts.frame(), a).mul_fn(&m[0]);
                let u = unit(theta.frame(), b).mul_fn(&m[1]);
                let lhs = db(&lay.theta_dual(&al), &lay.theta(&u))?;
                let rhs = lay
                    .theta(&ts.lie_derivative(&al, &u)?)
                    .sub(&lay.theta_dual(&theta.lie_derivative(&u, &al)?))
                    .add(&lay.g_dual(&vee_right(&mp, &al, &u)?));
                c2.record_with(&[a, b], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(c2);

    let mut c3 = Law::new("g+theta*", "x∘α = x▷α − α▷x");
    for i in 0..lay.rg {
        for a in 0..lay.rt {
            for (label, m) in slot_multipliers(base, 2) {
                let x = unit(g.frame(), i).mul_fn(&m[0]);
                let al = unit(ts.frame(), a).mul_fn(&m[1]);
                let lhs = db(&lay.g(&x), &lay.theta_dual(&al))?;
                let rhs = lay
                    .theta_dual(&mp.act_pq.act(&x, &al)?)
                    .sub(&lay.g(&mp.act_qp.act(&al, &x)?));
                c3.record_with(&[i, a], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(c3);

    let mut c4 = Law::new("g*+theta", "ξ∘u = 0 and u∘ξ = 0");
    for j in 0..lay.rg {
        for b in 0..lay.rt {
            for (label, m) in slot_multipliers(base, 2) {
                let xi = lay.g_dual(&unit(gs.frame(), j).mul_fn(&m[0]));
                let u = lay.theta(&unit(theta.frame(), b).mul_fn(&m[1]));
                c4.record_with(&[j, b], &db(&xi, &u)?, with_detail(&label, "ξ∘u"));
                c4.record_with(&[j, b], &db(&u, &xi)?, with_detail(&label, "u∘ξ"));
            }
        }
    }
    report.push(c4);

    let mut nonzero = Vec::new();
    for j in 0..lay.rg {
        for k in 0..lay.rg {
            if !db(&lay.g_dual(&unit(gs.frame(), j)), &lay.g_dual(&unit(gs.frame(), k)))?.is_zero() {
                nonzero.push(format!("ξ{}∘ξ{}", j + 1, k + 1));
            }
        }
    }
    for a in 0..lay.rt {
        for b in 0..lay.rt {
            if !db(&lay.theta(&unit(theta.frame(), a)), &lay.theta(&unit(theta.frame(), b)))?.is_zero() {
                nonzero.push(format!("u{}∘u{}", a + 1, b + 1));
            }
        }
    }
    let detail = if nonzero.is_empty() {
        "pure g*, θ brackets vanish as well".to_string()
    } else {
        format!("pure brackets are the algebroid brackets of g* and θ; nonzero: {}", nonzero.join(", "))
    };
    report.push_info("g*+theta-pure", "ξ∘η = [ξ,η], u∘v = [u,v]", detail);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossmod::semidirect_algebroid;
    use crate::fixtures;

    fn poly(base: &Base, s: &str) -> Poly {
        Poly::parse(s, base).unwrap()
    }

    #[test]
    fn action_matched_pair_passes() {
        let mp = fixtures::action_matched_pair();
        let rep = check_matched_pair(&mp);
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn action_matched_pair_formulas() {
        // X▷(f x) = X(f) x and (f x)▷X = f[∂x, X] on sample sections
        let mp = fixtures::action_matched_pair();
        let base = mp.p.base().clone();
        let x_field = unit(mp.p.frame(), 0).mul_fn(&poly(&base, "x1^2"));
        let fx = unit(mp.q.frame(), 0).mul_fn(&poly(&base, "x1^3 + 2"));
        let got = mp.act_pq.act(&x_field, &fx).unwrap();
        assert_eq!(got.coeff(0), poly(&base, "3*x1^4"));
        // [∂x, x1^2 ∂x] = 2 x1 ∂x, times f
        let got = mp.act_qp.act(&fx, &x_field).unwrap();
        assert_eq!(got.coeff(0), poly(&base, "(x1^3 + 2)*2*x1"));
    }

    #[test]
    fn trivial_matched_pair_passes() {
        let p = Algebroid::abelian(&Frame::new("p", 2, &Base::point()));
        let q = Algebroid::abelian(&Frame::new("q", 3, &Base::point()));
        assert!(check_matched_pair(&MatchedPair::trivial(p, q).unwrap()).passed());
    }

    #[test]
    fn mutated_action_is_reported() {
        let mut mp = fixtures::action_matched_pair();
        let bump = mp.act_pq.entry(0, 0).add(&unit(mp.q.frame(), 0));
        mp.act_pq.set(0, 0, bump).unwrap();
        let rep = check_matched_pair(&mp);
        let failing: Vec<_> = rep.failures().map(|f| f.id.clone()).collect();
        assert!(failing.iter().any(|id| id == "anchors"), "{failing:?}");
        assert!(build_double(&mp).is_err());
    }

    #[test]
    fn doubles_and_round_trips() {
        let mp = fixtures::action_matched_pair();
        let l = build_double(&mp).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(check_algebroid(&l).passed());
        assert_eq!(decompose(&l, mp.p.frame(), mp.q.frame()).unwrap(), mp);
        let again = double_algebroid(&decompose(&l, mp.p.frame(), mp.q.frame()).unwrap());
        assert_eq!(again, l);

        let p = fixtures::g2();
        let q = Algebroid::abelian(&Frame::new("q", 1, p.base()));
        let triv = MatchedPair::trivial(p.clone(), q.clone()).unwrap();
        let sum = build_double(&triv).unwrap();
        let back = decompose(&sum, p.frame(), q.frame()).unwrap();
        assert!(back.act_pq.is_zero() && back.act_qp.is_zero());
    }

    #[test]
    fn semidirect_splits_into_its_action() {
        let cm = fixtures::symplectic_cm();
        let l = semidirect_algebroid(&cm);
        let mp = decompose(&l, cm.g.frame(), cm.theta.frame()).unwrap();
        assert_eq!(mp.act_pq, cm.action);
        assert!(mp.act_qp.is_zero());
    }

    #[test]
    fn decompose_rejects_open_halves() {
        // span{e1, e2} of the symplectic algebroid is not closed: [e1,e2] = −e3
        let l = fixtures::symplectic_g();
        let p = Frame::new("p", 2, l.base());
        let q = Frame::new("q", 1, l.base());
        let err = decompose(&l, &p, &q).unwrap_err();
        assert!(err.to_string().contains("(1, 2)"), "{err}");
    }

    #[test]
    fn bialgebroid_examples() {
        let a = fixtures::g2();
        let triv = Bialgebroid::new(a.clone(), Algebroid::abelian(&a.frame().dual())).unwrap();
        assert!(check_bialgebroid(&triv).passed());

        let sym = fixtures::symplectic_g();
        let triv = Bialgebroid::new(sym.clone(), Algebroid::abelian(&sym.frame().dual())).unwrap();
        assert!(check_bialgebroid(&triv).passed());

        let lam = GradedElement::basis(a.frame(), &[0, 1]).unwrap();
        let exact = fixtures::exact_bialgebroid(&a, &lam);
        assert!(check_bialgebroid(&exact).passed());

        // every dual structure on a 2-dimensional Lie algebra is a bialgebra,
        // so perturb the Poisson bialgebroid of x1 ∂1∧∂2 instead
        let tm = fixtures::tangent(&Base::standard(2));
        let poisson = Bialgebroid::new(tm.clone(), fixtures::poisson_dual()).unwrap();
        assert!(check_bialgebroid(&poisson).passed());
        let mut bad = poisson.a_star.clone();
        let s = bad.bracket_basis(0, 1).add(&unit(bad.frame(), 0));
        bad.set_bracket(0, 1, s).unwrap();
        let bad = Bialgebroid::new(tm, bad).unwrap();
        assert!(!check_bialgebroid(&bad).passed());
    }

    #[test]
    fn exact_bialgebroid_dual_table_matches_formula() {
        // Λ = e1∧e2 on g2: [ε_i, ε_j]_Λ = L_{Λ♯ε_i}ε_j − ι_{Λ♯ε_j} dε_i,
        // Λ♯ε1 = e2, Λ♯ε2 = −e1, dε2 = −ε1∧ε2.
        let a = fixtures::g2();
        let lam = GradedElement::basis(a.frame(), &[0, 1]).unwrap();
        let b = fixtures::exact_bialgebroid(&a, &lam);
        let eps = |i| unit(&a.frame().dual(), i);
        // L_{e2} ε2 = ι_{e2} dε2 = ε1 ; ι_{−e1} dε1 = 0 since dε1 = 0
        assert_eq!(b.a_star.bracket_basis(0, 1), &eps(0));
    }

    #[test]
    fn courant_double_examples() {
        let base = Base::new(["x"]);
        let tm = fixtures::tangent(&base);
        let b = Bialgebroid::new(tm.clone(), Algebroid::abelian(&tm.frame().dual())).unwrap();
        let c = build_courant_double(&b).unwrap();
        let e = |i| unit(c.frame(), i);
        let x = poly(&base, "x");
        // ⟦∂x, x dx⟧ = dx
        assert_eq!(c.dorfman(&e(0), &e(1).mul_fn(&x)).unwrap(), e(1));
        let v = e(0).add(&e(1));
        assert_eq!(c.pairing(&v, &v).unwrap(), Poly::int(&base, 2));
        assert!(c.dorfman(&e(1), &e(1).mul_fn(&x)).unwrap().is_zero());
        // D f = df for a trivial dual
        assert_eq!(c.d(&poly(&base, "x^2")), e(1).mul_fn(&poly(&base, "2*x")));
        assert!(check_courant(&c).passed());
    }

    #[test]
    fn doubles_satisfy_courant_axioms() {
        let g = fixtures::g2();
        for b in [
            Bialgebroid::new(g.clone(), Algebroid::abelian(&g.frame().dual())).unwrap(),
            fixtures::exact_bialgebroid(&g, &GradedElement::basis(g.frame(), &[0, 1]).unwrap()),
            Bialgebroid::new(fixtures::symplectic_g(), Algebroid::abelian(&fixtures::symplectic_g().frame().dual())).unwrap(),
        ] {
            let c = build_courant_double(&b).unwrap();
            let rep = check_courant(&c);
            assert!(rep.passed(), "{rep}");
            let r = b.a.rank();
            let lower: Vec<usize> = (0..r).collect();
            let upper: Vec<usize> = (r..2 * r).collect();
            assert!(check_dirac_indices(&c, &lower).unwrap().passed());
            assert!(check_dirac_indices(&c, &upper).unwrap().passed());
        }
    }

    #[test]
    fn mutated_dorfman_entry_fails() {
        let g = fixtures::g2();
        let b = Bialgebroid::new(g.clone(), Algebroid::abelian(&g.frame().dual())).unwrap();
        let mut c = courant_double(&b);
        let s = c.entry(0, 1).add(&unit(c.frame(), 0));
        c.set_entry(0, 1, s).unwrap();
        let rep = check_courant(&c);
        assert!(rep.failures().any(|f| f.id.starts_with("CA1") || f.id.starts_with("CA6")), "{rep}");
    }

    #[test]
    fn diagonal_is_not_isotropic() {
        let g = fixtures::g2();
        let b = Bialgebroid::new(g.clone(), Algebroid::abelian(&g.frame().dual())).unwrap();
        let c = courant_double(&b);
        let diag: Vec<Section> = (0..2).map(|i| unit(c.frame(), i).add(&unit(c.frame(), i + 2))).collect();
        let rep = check_dirac(&c, &diag).unwrap();
        let f = rep.failures().find(|f| f.id == "isotropy").unwrap();
        assert_eq!(f.residual, "2");
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let base = Base::point();
        let f = Frame::new("e", 2, &base);
        let m = matrix::zeros(&base, 2, 2);
        let table = vec![vec![GradedElement::zero(&f, 1); 2]; 2];
        assert!(matches!(
            CourantStructure::new(&f, m, vec![vec![]; 2], table),
            Err(Error::DegenerateMetric(_))
        ));
    }

    #[test]
    fn vee_tables() {
        let cm = fixtures::trivial_cm(2, 2);
        let mp = dual_matched_pair(&cm, &fixtures::trivial_dual(&cm)).unwrap();
        let (l, r) = vee_operators(&mp).unwrap();
        assert!(l.iter().flatten().chain(r.iter().flatten()).all(GradedElement::is_zero));

        // brute force of both defining pairings on every basis triple
        for cm in [fixtures::adjoint_cm(), fixtures::symplectic_cm()] {
            let dual = fixtures::trivial_dual(&cm);
            let mp = dual_matched_pair(&cm, &dual).unwrap();
            let (l, r) = vee_operators(&mp).unwrap();
            let (g, ts) = (cm.g.frame().clone(), dual.g.frame().clone());
            let t = ts.dual();
            for i in 0..g.rank() {
                for j in 0..g.rank() {
                    for a in 0..ts.rank() {
                        // ρ_{θ*}(α)⟨ξ,x⟩ − ⟨x, α▷ξ⟩ with θ* acting on g* by dual.action
                        let alt = -GradedElement::pair(&unit(&g, i), dual.action.entry(a, j)).unwrap();
                        let got = GradedElement::pair(&l[i][j], &unit(&ts, a)).unwrap();
                        assert_eq!(got, alt);
                    }
                }
            }
            for a in 0..ts.rank() {
                for b in 0..t.rank() {
                    for i in 0..g.rank() {
                        // ρ_g(x)⟨α,u⟩ − ⟨α, x▷u⟩, constant pairing
                        let alt = -GradedElement::pair(&unit(&ts, a), cm.action.entry(i, b)).unwrap();
                        let got = GradedElement::pair(&r[a][b], &unit(&g, i)).unwrap();
                        assert_eq!(got, alt);
                    }
                }
            }
        }
    }
}
