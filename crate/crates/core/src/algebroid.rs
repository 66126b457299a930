//! Lie algebroids on framed bundles: anchor, bracket, Cartan calculus and the
//! Schouten bracket.
//!
//! Sign convention for the Schouten bracket: `[X, f] = ρ(X)f` on degree
//! (1, 0), odd Leibniz in both slots and graded antisymmetry
//! `[P, Q] = −(−1)^{(p−1)(q−1)} [Q, P]`. With it, `[e1∧e2, e1] = −e1∧e2` for
//! the two-dimensional nonabelian Lie algebra `[e1, e2] = e2`.

use crate::error::{Error, Result};
use crate::exterior::{index_tuples, Frame, GradedElement};
use crate::report::{CheckReport, Law};
use crate::ring::{Base, Poly};

pub type Section = GradedElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebroid {
    frame: Frame,
    /// `anchor[i][k]`: coefficient of `∂/∂x_k` in `ρ(e_i)`.
    anchor: Vec<Vec<Poly>>,
    /// `structure[i][j] = [e_i, e_j]`.
    structure: Vec<Vec<Section>>,
}

impl Algebroid {
    /// Abelian algebroid with zero anchor.
    pub fn abelian(frame: &Frame) -> Self {
        let r = frame.rank();
        let n = frame.base().dim();
        Algebroid {
            frame: frame.clone(),
            anchor: vec![vec![Poly::zero(frame.base()); n]; r],
            structure: vec![vec![GradedElement::zero(frame, 1); r]; r],
        }
    }

    pub fn new(frame: &Frame, anchor: Vec<Vec<Poly>>, structure: Vec<Vec<Section>>) -> Result<Self> {
        let r = frame.rank();
        let n = frame.base().dim();
        if anchor.len() != r || anchor.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("anchor of {frame} must be {r} x {n}")));
        }
        if structure.len() != r || structure.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("bracket table of {frame} must be {r} x {r}")));
        }
        for row in &anchor {
            for p in row {
                frame.base().ensure_same(p.base())?;
            }
        }
        for row in &structure {
            for s in row {
                frame.ensure_eq(s.frame())?;
                if s.degree() != 1 {
                    return Err(Error::Degree("bracket entries must have degree 1".into()));
                }
            }
        }
        Ok(Algebroid {
            frame: frame.clone(),
            anchor,
            structure,
        })
    }

    /// Sets `ρ(e_i)` to `Σ_k v[k] ∂/∂x_k`.
    pub fn set_anchor(&mut self, i: usize, v: Vec<Poly>) -> Result<()> {
        self.frame.check_index(i)?;
        if v.len() != self.base().dim() {
            return Err(Error::Shape("anchor row length".into()));
        }
        self.anchor[i] = v;
        Ok(())
    }

    /// Sets `[e_i, e_j] = s` and `[e_j, e_i] = −s`.
    pub fn set_bracket(&mut self, i: usize, j: usize, s: Section) -> Result<()> {
        self.set_bracket_entry(j, i, s.neg())?;
        self.set_bracket_entry(i, j, s)
    }

    /// Sets only the `(i, j)` entry; antisymmetry is left to the checker.
    pub fn set_bracket_entry(&mut self, i: usize, j: usize, s: Section) -> Result<()> {
        self.frame.check_index(i)?;
        self.frame.check_index(j)?;
        self.frame.ensure_eq(s.frame())?;
        self.structure[i][j] = s;
        Ok(())
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn base(&self) -> &Base {
        self.frame.base()
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn name(&self) -> &str {
        self.frame.name()
    }

    pub fn anchor_matrix(&self) -> &[Vec<Poly>] {
        &self.anchor
    }

    pub fn structure(&self) -> &[Vec<Section>] {
        &self.structure
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Section {
        &self.structure[i][j]
    }

    pub fn has_zero_anchor(&self) -> bool {
        self.anchor.iter().flatten().all(Poly::is_zero)
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().flatten().all(GradedElement::is_zero)
    }

    /// Same anchor and structure functions, ignoring frame names.
    pub fn same_tables(&self, other: &Algebroid) -> bool {
        self.rank() == other.rank()
            && self.anchor == other.anchor
            && (0..self.rank()).all(|i| {
                (0..self.rank()).all(|j| {
                    self.structure[i][j].coeffs() == other.structure[i][j].coeffs()
                })
            })
    }

    /// Copy on `frame` with basis element `i` moved to position `perm[i]`.
    pub fn reindexed(&self, frame: &Frame, perm: &[usize]) -> Result<Algebroid> {
        if frame.rank() != self.rank() || perm.len() != self.rank() {
            return Err(Error::Shape("reindexing must preserve rank".into()));
        }
        let mut out = Algebroid::abelian(frame);
        for i in 0..self.rank() {
            out.anchor[perm[i]] = self.anchor[i].clone();
            for j in 0..self.rank() {
                out.structure[perm[i]][perm[j]] = self.structure[i][j].relabel(frame, |k| perm[k]);
            }
        }
        Ok(out)
    }

    /// Same tables on a frame of equal rank.
    pub fn on_frame(&self, frame: &Frame) -> Result<Algebroid> {
        let id: Vec<usize> = (0..self.rank()).collect();
        self.reindexed(frame, &id)
    }

    fn ensure_section(&self, x: &Section) -> Result<()> {
        self.frame.ensure_eq(x.frame())?;
        if x.degree() != 1 {
            return Err(Error::Degree(format!("expected a section, got degree {}", x.degree())));
        }
        Ok(())
    }

    fn ensure_form(&self, w: &GradedElement) -> Result<()> {
        self.frame.dual().ensure_eq(w.frame())
    }

    /// Coefficients of the vector field `ρ(X)`.
    pub fn anchor_vector(&self, x: &Section) -> Result<Vec<Poly>> {
        self.ensure_section(x)?;
        let n = self.base().dim();
        let mut v = vec![Poly::zero(self.base()); n];
        for (idx, c) in x.components() {
            for (k, a) in self.anchor[idx[0]].iter().enumerate() {
                v[k] = &v[k] + &(c * a);
            }
        }
        Ok(v)
    }

    /// `ρ(X)f`.
    pub fn anchor_apply(&self, x: &Section, f: &Poly) -> Result<Poly> {
        self.base().ensure_same(f.base())?;
        let v = self.anchor_vector(x)?;
        let mut out = Poly::zero(self.base());
        for (k, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &f.partial(k)?);
            }
        }
        Ok(out)
    }

    /// `ρ(e_i)f`.
    pub fn anchor_basis(&self, i: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.base());
        for (k, a) in self.anchor[i].iter().enumerate() {
            if !a.is_zero() {
                out = &out + &(a * &f.partial(k).expect("variable index"));
            }
        }
        out
    }

    pub fn bracket(&self, x: &Section, y: &Section) -> Result<Section> {
        self.ensure_section(x)?;
        self.ensure_section(y)?;
        let mut out = GradedElement::zero(&self.frame, 1);
        for (ix, fx) in x.components() {
            let i = ix[0];
            for (iy, gy) in y.components() {
                let j = iy[0];
                out = out.add(&self.structure[i][j].mul_fn(&(fx * gy)));
            }
        }
        for (iy, gy) in y.components() {
            let d = self.anchor_apply(x, gy)?;
            out.add_basis_term(&[iy[0]], &d);
        }
        for (ix, fx) in x.components() {
            let d = self.anchor_apply(y, fx)?;
            out.add_basis_term(&[ix[0]], &-d);
        }
        Ok(out)
    }

    /// Evaluates `ω([e_a, e_b], e_rest...)`.
    fn eval_on_bracket(&self, w: &GradedElement, a: usize, b: usize, rest: &[usize]) -> Poly {
        let mut out = Poly::zero(self.base());
        for (m, c) in self.structure[a][b].components() {
            let mut args = vec![m[0]];
            args.extend_from_slice(rest);
            let v = w.eval_basis(&args);
            if !v.is_zero() {
                out = &out + &(c * &v);
            }
        }
        out
    }

    /// Algebroid differential on `Γ(∧•A*)`, computed from the Koszul formula on
    /// basis tuples.
    pub fn differential(&self, w: &GradedElement) -> Result<GradedElement> {
        self.ensure_form(w)?;
        let k = w.degree();
        let dual = self.frame.dual();
        let mut out = GradedElement::zero(&dual, k + 1);
        for t in index_tuples(self.rank(), k + 1) {
            let mut val = Poly::zero(self.base());
            for a in 0..=k {
                let mut rest = t.clone();
                rest.remove(a);
                let term = self.anchor_basis(t[a], &w.get(&rest));
                val = if a % 2 == 0 { &val + &term } else { &val - &term };
            }
            for a in 0..=k {
                for b in (a + 1)..=k {
                    let rest: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != a && *p != b)
                        .map(|(_, v)| *v)
                        .collect();
                    let term = self.eval_on_bracket(w, t[a], t[b], &rest);
                    val = if (a + b) % 2 == 0 { &val + &term } else { &val - &term };
                }
            }
            out.add_basis_term(&t, &val);
        }
        Ok(out)
    }

    /// `ι_X ω`; zero on functions.
    pub fn interior(&self, x: &Section, w: &GradedElement) -> Result<GradedElement> {
        self.ensure_section(x)?;
        self.ensure_form(w)?;
        if w.degree() == 0 {
            return Ok(GradedElement::zero(w.frame(), 0));
        }
        GradedElement::contract(x, w)
    }

    /// `L_X = ι_X d + d ι_X`.
    pub fn lie_derivative(&self, x: &Section, w: &GradedElement) -> Result<GradedElement> {
        let a = self.interior(x, &self.differential(w)?)?;
        if w.degree() == 0 {
            return Ok(a);
        }
        let b = self.differential(&self.interior(x, w)?)?;
        Ok(a.add(&b))
    }

    /// `ι_{df} P` for a basis multivector `e_I`, i.e.
    /// `Σ_a (−1)^a (ρ(e_{I_a})f) e_{I∖a}`.
    fn contract_df_basis(&self, idx: &[usize], f: &Poly) -> GradedElement {
        let mut out = GradedElement::zero(&self.frame, idx.len() - 1);
        for a in 0..idx.len() {
            let d = self.anchor_basis(idx[a], f);
            if d.is_zero() {
                continue;
            }
            let mut rest = idx.to_vec();
            rest.remove(a);
            out.add_basis_term(&rest, &if a % 2 == 0 { d } else { -d });
        }
        out
    }

    /// `[e_I, e_J]` for basis multivectors of degrees at least 1.
    fn schouten_basis(&self, i: &[usize], j: &[usize]) -> GradedElement {
        let deg = i.len() + j.len() - 1;
        let mut out = GradedElement::zero(&self.frame, deg);
        for a in 0..i.len() {
            let mut ri = i.to_vec();
            ri.remove(a);
            for b in 0..j.len() {
                let br = &self.structure[i[a]][j[b]];
                if br.is_zero() {
                    continue;
                }
                let mut rj = j.to_vec();
                rj.remove(b);
                let mut tail = ri.clone();
                tail.extend_from_slice(&rj);
                let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                let rest = GradedElement::basis(&self.frame, &tail).expect("indices in range");
                let term = br.wedge(&rest).expect("same frame");
                out = out.add(&term.scale_int(sign));
            }
        }
        out
    }

    /// Schouten bracket of multivector fields.
    pub fn schouten(&self, p: &GradedElement, q: &GradedElement) -> Result<GradedElement> {
        self.frame.ensure_eq(p.frame())?;
        self.frame.ensure_eq(q.frame())?;
        let (dp, dq) = (p.degree(), q.degree());
        if dp + dq == 0 {
            return Err(Error::Degree("Schouten bracket of two functions".into()));
        }
        let deg = dp + dq - 1;
        let mut out = GradedElement::zero(&self.frame, deg);
        let sign_pq = if ((dp as i64 - 1) * (dq as i64 - 1)).rem_euclid(2) == 0 {
            1
        } else {
            -1
        };
        for (ii, f) in p.components() {
            for (jj, g) in q.components() {
                // f g [e_I, e_J]
                if dp >= 1 && dq >= 1 {
                    let t = self.schouten_basis(ii, jj);
                    out = out.add(&t.mul_fn(&(f * g)));
                }
                // f [e_I, g] ∧ e_J, with [e_I, g] = (−1)^{p−1} ι_{dg} e_I
                if dp >= 1 {
                    let c = self.contract_df_basis(ii, g);
                    if !c.is_zero() {
                        let ej = GradedElement::basis(&self.frame, jj)?;
                        let t = c.wedge(&ej)?.mul_fn(f);
                        out = out.add(&if (dp - 1) % 2 == 0 { t } else { t.neg() });
                    }
                }
                // −(−1)^{(p−1)(q−1)} g [e_J, f] ∧ e_I
                if dq >= 1 {
                    let c = self.contract_df_basis(jj, f);
                    if !c.is_zero() {
                        let ei = GradedElement::basis(&self.frame, ii)?;
                        let t = c.wedge(&ei)?.mul_fn(g);
                        let s = -sign_pq * if (dq - 1) % 2 == 0 { 1 } else { -1 };
                        out = out.add(&t.scale_int(s));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Dual algebroid of a bivector `Λ` on `A`:
/// `[ξ, η] = L_{Λ♯ξ}η − ι_{Λ♯η}dξ`, anchor `ρ∘Λ♯`, with `Λ♯ξ = ι_ξΛ`.
///
/// This is an algebroid whenever `[[Λ, Λ], X] = 0` for all `X`; callers
/// decide whether to check that.
pub fn exact_dual_algebroid(a: &Algebroid, lambda: &GradedElement) -> Result<Algebroid> {
    a.frame().ensure_eq(lambda.frame())?;
    if lambda.degree() != 2 {
        return Err(Error::Degree("r-matrix must be a bivector".into()));
    }
    let dual = a.frame().dual();
    let r = a.rank();
    let sharp: Vec<Section> = (0..r)
        .map(|i| GradedElement::contract(&GradedElement::unit(&dual, i), lambda))
        .collect::<Result<_>>()?;
    let mut out = Algebroid::abelian(&dual);
    for i in 0..r {
        out.anchor[i] = a.anchor_vector(&sharp[i])?;
    }
    for i in 0..r {
        let di = a.differential(&GradedElement::unit(&dual, i))?;
        for j in 0..r {
            let l = a.lie_derivative(&sharp[i], &GradedElement::unit(&dual, j))?;
            let c = a.interior(&sharp[j], &di)?;
            out.structure[i][j] = l.sub(&c);
        }
    }
    Ok(out)
}

/// Verifies antisymmetry of the table, Jacobi on basis triples and that the
/// anchor intertwines brackets on coordinate functions.
pub fn check_algebroid(a: &Algebroid) -> CheckReport {
    let mut report = CheckReport::new(a.name());
    let r = a.rank();
    let e = |i| GradedElement::unit(a.frame(), i);

    let mut anti = Law::new("antisymmetry", "[e_i,e_j] + [e_j,e_i] = 0");
    for i in 0..r {
        for j in i..r {
            let s = a.structure[i][j].add(&a.structure[j][i]);
            anti.record(&[i, j], &s);
        }
    }
    report.push(anti);

    let mut jac = Law::new("jacobi", "[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j] = 0");
    for i in 0..r {
        for j in (i + 1)..r {
            for k in (j + 1)..r {
                let t = |x: usize, y: usize, z: usize| {
                    a.bracket(&a.bracket(&e(x), &e(y)).unwrap(), &e(z)).unwrap()
                };
                let s = t(i, j, k).add(&t(j, k, i)).add(&t(k, i, j));
                jac.record(&[i, j, k], &s);
            }
        }
    }
    report.push(jac);

    let mut hom = Law::new("anchor-homomorphism", "ρ([e_i,e_j])x_k = [ρ(e_i),ρ(e_j)]x_k");
    let n = a.base().dim();
    for i in 0..r {
        for j in (i + 1)..r {
            let br = a.bracket(&e(i), &e(j)).unwrap();
            for k in 0..n {
                let xk = Poly::var(a.base(), k).unwrap();
                let lhs = a.anchor_apply(&br, &xk).unwrap();
                let rhs = &a.anchor_basis(i, &a.anchor_basis(j, &xk))
                    - &a.anchor_basis(j, &a.anchor_basis(i, &xk));
                hom.record_with(&[i, j], &(&lhs - &rhs), Some(format!("on {}", a.base().vars()[k])));
            }
        }
    }
    report.push(hom);
    report
}
