//! Representations, bundle maps and crossed modules of Lie algebroids.
//!
//! An action of an algebroid `g` on a bundle `θ` is stored as the table
//! `e_i ▷ u_a` and extended by `(f x) ▷ u = f (x ▷ u)` and
//! `x ▷ (f u) = (ρ(x)f) u + f (x ▷ u)`.

use crate::algebroid::{check_algebroid, Algebroid, Section};
use crate::error::{Error, Result};
use crate::exterior::{Frame, GradedElement};
use crate::report::{CheckReport, Law};
use crate::ring::{Base, Poly};

/// Coefficient multipliers used when a law is checked beyond basis
/// elements: `1, x_1, ..., x_n`, each paired with a label.
pub fn multipliers(base: &Base) -> Vec<(String, Poly)> {
    let mut out = vec![("1".to_string(), Poly::one(base))];
    for (k, v) in base.vars().iter().enumerate() {
        out.push((v.clone(), Poly::var(base, k).unwrap()));
    }
    out
}

/// Multiplier assignments for a law with `slots` arguments: all ones, then
/// each non-trivial multiplier on one slot at a time.
pub fn slot_multipliers(base: &Base, slots: usize) -> Vec<(Option<String>, Vec<Poly>)> {
    let m = multipliers(base);
    let ones = vec![Poly::one(base); slots];
    let mut out = vec![(None, ones.clone())];
    for s in 0..slots {
        for (label, p) in &m[1..] {
            let mut v = ones.clone();
            v[s] = p.clone();
            out.push((Some(format!("{label} on argument {}", s + 1)), v));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTable {
    actor: Algebroid,
    target: Frame,
    /// `table[i][a] = e_i ▷ u_a`.
    table: Vec<Vec<Section>>,
}

impl ActionTable {
    pub fn zero(actor: &Algebroid, target: &Frame) -> Self {
        ActionTable {
            actor: actor.clone(),
            target: target.clone(),
            table: vec![vec![GradedElement::zero(target, 1); target.rank()]; actor.rank()],
        }
    }

    pub fn new(actor: &Algebroid, target: &Frame, table: Vec<Vec<Section>>) -> Result<Self> {
        let mut out = ActionTable::zero(actor, target);
        if table.len() != actor.rank() || table.iter().any(|r| r.len() != target.rank()) {
            return Err(Error::Shape(format!(
                "action table must be {} x {}",
                actor.rank(),
                target.rank()
            )));
        }
        for (i, row) in table.into_iter().enumerate() {
            for (a, s) in row.into_iter().enumerate() {
                out.set(i, a, s)?;
            }
        }
        Ok(out)
    }

    pub fn set(&mut self, i: usize, a: usize, s: Section) -> Result<()> {
        self.actor.frame().check_index(i)?;
        self.target.check_index(a)?;
        self.target.ensure_eq(s.frame())?;
        if s.degree() != 1 {
            return Err(Error::Degree("action entries must be sections".into()));
        }
        self.table[i][a] = s;
        Ok(())
    }

    pub fn actor(&self) -> &Algebroid {
        &self.actor
    }

    pub fn target(&self) -> &Frame {
        &self.target
    }

    pub fn entry(&self, i: usize, a: usize) -> &Section {
        &self.table[i][a]
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().flatten().all(GradedElement::is_zero)
    }

    /// Same table with the actor replaced (e.g. after an actor frame rename).
    pub fn with_actor(&self, actor: &Algebroid) -> Result<Self> {
        if actor.rank() != self.actor.rank() {
            return Err(Error::Shape("actor rank changed".into()));
        }
        Ok(ActionTable {
            actor: actor.clone(),
            ..self.clone()
        })
    }

    /// Same table on a renamed target frame of equal rank.
    pub fn with_target(&self, target: &Frame) -> Self {
        ActionTable {
            actor: self.actor.clone(),
            target: target.clone(),
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(|s| s.reframed(target)).collect())
                .collect(),
        }
    }

    /// `x ▷ u` for sections of the actor and the target.
    pub fn act(&self, x: &Section, u: &Section) -> Result<Section> {
        self.actor.frame().ensure_eq(x.frame())?;
        self.target.ensure_eq(u.frame())?;
        let mut out = GradedElement::zero(&self.target, 1);
        for (ia, ua) in u.components() {
            let d = self.actor.anchor_apply(x, ua)?;
            out.add_basis_term(&[ia[0]], &d);
        }
        for (ix, fx) in x.components() {
            for (ia, ua) in u.components() {
                out = out.add(&self.table[ix[0]][ia[0]].mul_fn(&(fx * ua)));
            }
        }
        Ok(out)
    }

    /// `x ▷ P` on multivectors of the target, extended as a derivation.
    pub fn act_multi(&self, x: &Section, p: &GradedElement) -> Result<GradedElement> {
        self.actor.frame().ensure_eq(x.frame())?;
        self.target.ensure_eq(p.frame())?;
        let mut out = GradedElement::zero(&self.target, p.degree());
        for (idx, f) in p.components() {
            let d = self.actor.anchor_apply(x, f)?;
            out.add_basis_term(idx, &d);
            for pos in 0..idx.len() {
                let image = self.act(x, &GradedElement::unit(&self.target, idx[pos]))?;
                let before = GradedElement::basis(&self.target, &idx[..pos])?;
                let after = GradedElement::basis(&self.target, &idx[pos + 1..])?;
                let t = before.wedge(&image)?.wedge(&after)?;
                out = out.add(&t.mul_fn(f));
            }
        }
        Ok(out)
    }

    /// Contragredient action on the dual bundle:
    /// `<x ▷ α, u> = ρ(x)<α, u> − <α, x ▷ u>`.
    pub fn dual(&self) -> ActionTable {
        let target = self.target.dual();
        let mut out = ActionTable::zero(&self.actor, &target);
        for i in 0..self.actor.rank() {
            for b in 0..target.rank() {
                let mut s = GradedElement::zero(&target, 1);
                for a in 0..self.target.rank() {
                    s.add_basis_term(&[a], &-self.table[i][a].coeff(b));
                }
                out.table[i][b] = s;
            }
        }
        out
    }
}

/// Flatness `[x,y] ▷ u = x ▷ (y ▷ u) − y ▷ (x ▷ u)` and anchor compatibility
/// `x ▷ (f u) = (ρ(x)f) u + f (x ▷ u)`.
pub fn check_representation(act: &ActionTable) -> CheckReport {
    let g = &act.actor;
    let mut report = CheckReport::new(format!("{} on {}", g.name(), act.target));
    let x = |i| GradedElement::unit(g.frame(), i);
    let u = |a| GradedElement::unit(&act.target, a);
    let mults = multipliers(g.base());

    let mut flat = Law::new("flatness", "[x,y]▷u = x▷(y▷u) − y▷(x▷u)");
    for i in 0..g.rank() {
        for j in (i + 1)..g.rank() {
            let br = g.bracket(&x(i), &x(j)).unwrap();
            for a in 0..act.target.rank() {
                for (label, m) in &mults {
                    let ua = u(a).mul_fn(m);
                    let lhs = act.act(&br, &ua).unwrap();
                    let rhs = act
                        .act(&x(i), &act.act(&x(j), &ua).unwrap())
                        .unwrap()
                        .sub(&act.act(&x(j), &act.act(&x(i), &ua).unwrap()).unwrap());
                    flat.record_with(&[i, j, a], &lhs.sub(&rhs), (label != "1").then(|| format!("u scaled by {label}")));
                }
            }
        }
    }
    report.push(flat);

    let mut anchor = Law::new("anchor-compatibility", "x▷(f u) = (ρ(x)f) u + f (x▷u)");
    for i in 0..g.rank() {
        for a in 0..act.target.rank() {
            for (label, m) in &mults[1..] {
                let lhs = act.act(&x(i), &u(a).mul_fn(m)).unwrap();
                let rhs = u(a)
                    .mul_fn(&g.anchor_basis(i, m))
                    .add(&act.act(&x(i), &u(a)).unwrap().mul_fn(m));
                anchor.record_with(&[i, a], &lhs.sub(&rhs), Some(format!("f = {label}")));
            }
        }
    }
    report.push(anchor);
    report
}

/// Bundle map given by `matrix[a][i]`, the `e_i` coefficient of the image of
/// the source basis element `e_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMap {
    source: Frame,
    target: Frame,
    matrix: Vec<Vec<Poly>>,
}

impl BundleMap {
    pub fn zero(source: &Frame, target: &Frame) -> Self {
        BundleMap {
            source: source.clone(),
            target: target.clone(),
            matrix: vec![vec![Poly::zero(source.base()); target.rank()]; source.rank()],
        }
    }

    pub fn new(source: &Frame, target: &Frame, matrix: Vec<Vec<Poly>>) -> Result<Self> {
        source.base().ensure_same(target.base())?;
        if matrix.len() != source.rank() || matrix.iter().any(|r| r.len() != target.rank()) {
            return Err(Error::Shape(format!(
                "map {source} -> {target} needs a {} x {} matrix",
                source.rank(),
                target.rank()
            )));
        }
        Ok(BundleMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        })
    }

    pub fn source(&self) -> &Frame {
        &self.source
    }

    pub fn target(&self) -> &Frame {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<Poly>] {
        &self.matrix
    }

    pub fn entry(&self, a: usize, i: usize) -> &Poly {
        &self.matrix[a][i]
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Poly::is_zero)
    }

    pub fn apply(&self, u: &Section) -> Result<Section> {
        self.source.ensure_eq(u.frame())?;
        let mut out = GradedElement::zero(&self.target, 1);
        for (ia, c) in u.components() {
            for (i, m) in self.matrix[ia[0]].iter().enumerate() {
                out.add_basis_term(&[i], &(c * m));
            }
        }
        Ok(out)
    }

    pub fn image(&self, a: usize) -> Section {
        GradedElement::vector(&self.target, self.matrix[a].clone()).unwrap()
    }

    /// `−φ*: target* → source*`.
    pub fn neg_transpose(&self) -> BundleMap {
        let mut m = vec![vec![Poly::zero(self.source.base()); self.source.rank()]; self.target.rank()];
        for (a, row) in self.matrix.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                m[i][a] = -v;
            }
        }
        BundleMap {
            source: self.target.dual(),
            target: self.source.dual(),
            matrix: m,
        }
    }

    /// Same matrix between renamed frames of equal ranks.
    pub fn reframed(&self, source: &Frame, target: &Frame) -> BundleMap {
        BundleMap {
            source: source.clone(),
            target: target.clone(),
            matrix: self.matrix.clone(),
        }
    }
}

/// `θ --φ--> g` with `g` acting on `θ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedModule {
    pub theta: Algebroid,
    pub g: Algebroid,
    pub phi: BundleMap,
    pub action: ActionTable,
}

impl CrossedModule {
    pub fn new(theta: Algebroid, g: Algebroid, phi: BundleMap, action: ActionTable) -> Result<Self> {
        theta.frame().ensure_eq(phi.source())?;
        g.frame().ensure_eq(phi.target())?;
        g.frame().ensure_eq(action.actor().frame())?;
        theta.frame().ensure_eq(action.target())?;
        if !g.same_tables(action.actor()) {
            return Err(Error::InvalidStructure {
                structure: "crossed module".into(),
                reason: "action is defined for a different algebroid structure on g".into(),
            });
        }
        Ok(CrossedModule { theta, g, phi, action })
    }
}

/// Algebroid axioms on both sides, the representation laws, `ρ_θ = 0`,
/// isotropy `ρ_g∘φ = 0`, the Peiffer identity `φ(u)▷v = [u,v]` and
/// equivariance `φ(x▷u) = [x,φ(u)]`. The morphism property of `φ` is
/// reported separately.
pub fn check_crossed_module(cm: &CrossedModule) -> CheckReport {
    let (theta, g) = (&cm.theta, &cm.g);
    let mut report = CheckReport::new(format!("{} -> {}", theta.name(), g.name()));
    report.absorb("theta", check_algebroid(theta));
    report.absorb("g", check_algebroid(g));
    report.absorb("action", check_representation(&cm.action));

    let mut zero_anchor = Law::new("theta-anchor", "ρ_θ = 0");
    for a in 0..theta.rank() {
        for (k, v) in theta.anchor_matrix()[a].iter().enumerate() {
            zero_anchor.record_with(&[a], v, Some(format!("∂/∂{}", g.base().vars()[k])));
        }
    }
    report.push(zero_anchor);

    let mut iso = Law::new("isotropy", "ρ_g∘φ = 0");
    for a in 0..theta.rank() {
        let v = g.anchor_vector(&cm.phi.image(a)).unwrap();
        for (k, c) in v.iter().enumerate() {
            iso.record_with(&[a], c, Some(format!("∂/∂{}", g.base().vars()[k])));
        }
    }
    report.push(iso);

    let x = |i| GradedElement::unit(g.frame(), i);
    let u = |a| GradedElement::unit(theta.frame(), a);

    let mut peiffer = Law::new("CM1-peiffer", "φ(u)▷v = [u,v]");
    for a in 0..theta.rank() {
        for b in 0..theta.rank() {
            for (label, m) in slot_multipliers(g.base(), 2) {
                let ua = u(a).mul_fn(&m[0]);
                let vb = u(b).mul_fn(&m[1]);
                let lhs = cm.action.act(&cm.phi.apply(&ua).unwrap(), &vb).unwrap();
                let rhs = theta.bracket(&ua, &vb).unwrap();
                peiffer.record_with(&[a, b], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(peiffer);

    let mut equiv = Law::new("CM2-equivariance", "φ(x▷u) = [x,φ(u)]");
    for i in 0..g.rank() {
        for a in 0..theta.rank() {
            for (label, m) in slot_multipliers(g.base(), 2) {
                let xi = x(i).mul_fn(&m[0]);
                let ua = u(a).mul_fn(&m[1]);
                let lhs = cm.phi.apply(&cm.action.act(&xi, &ua).unwrap()).unwrap();
                let rhs = g.bracket(&xi, &cm.phi.apply(&ua).unwrap()).unwrap();
                equiv.record_with(&[i, a], &lhs.sub(&rhs), label);
            }
        }
    }
    let equiv_ok = equiv.passed();
    report.push(equiv);

    let mut morph = Law::new("morphism", "φ[u,v] = [φ(u),φ(v)]");
    for a in 0..theta.rank() {
        for b in (a + 1)..theta.rank() {
            let lhs = cm.phi.apply(&theta.bracket(&u(a), &u(b)).unwrap()).unwrap();
            let rhs = g.bracket(&cm.phi.image(a), &cm.phi.image(b)).unwrap();
            morph.record(&[a, b], &lhs.sub(&rhs));
        }
    }
    let morph_ok = morph.passed();
    let peiffer_ok = report.stage_passed("CM1-peiffer");
    report.push(morph);
    let note = match (peiffer_ok && equiv_ok, morph_ok) {
        (true, true) => "implied by peiffer and equivariance; not independently needed",
        (true, false) => "fails although peiffer and equivariance hold; independently needed",
        (false, _) => "peiffer or equivariance fails; implication not applicable",
    };
    report.push_info("morphism-dependence", "φ[u,v] = φ(φ(u)▷v) = [φ(u),φ(v)]", note.into());
    report
}

fn hypothesis(law: &str, witness: &[usize], residual: &GradedElement) -> Error {
    Error::Hypothesis {
        law: law.into(),
        witness: witness.iter().map(|i| i + 1).collect(),
        residual: residual.to_string(),
    }
}

/// Builds the unique bracket `[u,v] = φ(u)▷v` on `θ` making the data a
/// crossed module, after checking `φ(x▷u) = [x,φ(u)]` and
/// `φ(u)▷v = −φ(v)▷u`.
pub fn induce_theta_bracket(
    theta_frame: &Frame,
    g: &Algebroid,
    phi: &BundleMap,
    action: &ActionTable,
) -> Result<CrossedModule> {
    let x = |i| GradedElement::unit(g.frame(), i);
    let u = |a| GradedElement::unit(theta_frame, a);
    for i in 0..g.rank() {
        for a in 0..theta_frame.rank() {
            for (_, m) in slot_multipliers(g.base(), 2) {
                let xi = x(i).mul_fn(&m[0]);
                let ua = u(a).mul_fn(&m[1]);
                let lhs = phi.apply(&action.act(&xi, &ua)?)?;
                let rhs = g.bracket(&xi, &phi.apply(&ua)?)?;
                let r = lhs.sub(&rhs);
                if !r.is_zero() {
                    return Err(hypothesis("φ(x▷u) = [x,φ(u)]", &[i, a], &r));
                }
            }
        }
    }
    for a in 0..theta_frame.rank() {
        for b in a..theta_frame.rank() {
            let r = action
                .act(&phi.image(a), &u(b))?
                .add(&action.act(&phi.image(b), &u(a))?);
            if !r.is_zero() {
                return Err(hypothesis("φ(u)▷v = −φ(v)▷u", &[a, b], &r));
            }
        }
    }
    CrossedModule::new(
        induced_bracket_algebroid(theta_frame, phi, action)?,
        g.clone(),
        phi.clone(),
        action.clone(),
    )
}

/// Lie algebra bundle on `theta_frame` with `[u_a, u_b] = φ(u_a)▷u_b`,
/// without checking any hypothesis.
pub fn induced_bracket_algebroid(theta_frame: &Frame, phi: &BundleMap, action: &ActionTable) -> Result<Algebroid> {
    let mut theta = Algebroid::abelian(theta_frame);
    for a in 0..theta_frame.rank() {
        for b in 0..theta_frame.rank() {
            let s = action.act(&phi.image(a), &GradedElement::unit(theta_frame, b))?;
            theta.set_bracket_entry(a, b, s)?;
        }
    }
    Ok(theta)
}

/// Algebroid on `g ⊕ θ` with anchor `(ρ_g, 0)` and mixed bracket `[x,u] = x▷u`.
/// No validity check.
pub fn semidirect_algebroid(cm: &CrossedModule) -> Algebroid {
    let (g, theta) = (&cm.g, &cm.theta);
    let frame = g.frame().direct_sum(theta.frame());
    let rg = g.rank();
    let mut out = Algebroid::abelian(&frame);
    for i in 0..rg {
        out.set_anchor(i, g.anchor_matrix()[i].clone()).unwrap();
    }
    let emb_g = |s: &Section| s.relabel(&frame, |k| k);
    let emb_t = |s: &Section| s.relabel(&frame, |k| k + rg);
    for i in 0..rg {
        for j in 0..rg {
            out.set_bracket_entry(i, j, emb_g(g.bracket_basis(i, j))).unwrap();
        }
        for a in 0..theta.rank() {
            let s = emb_t(cm.action.entry(i, a));
            out.set_bracket_entry(rg + a, i, s.neg()).unwrap();
            out.set_bracket_entry(i, rg + a, s).unwrap();
        }
    }
    for a in 0..theta.rank() {
        for b in 0..theta.rank() {
            out.set_bracket_entry(rg + a, rg + b, emb_t(theta.bracket_basis(a, b))).unwrap();
        }
    }
    out
}

/// `A_{g▷θ}` for a valid crossed module.
pub fn semidirect(cm: &CrossedModule) -> Result<Algebroid> {
    let rep = check_crossed_module(cm);
    if let Some(f) = rep.failures().next() {
        return Err(Error::InvalidStructure {
            structure: rep.structure.clone(),
            reason: format!("{} fails at {:?}: {}", f.id, f.witness, f.residual),
        });
    }
    Ok(semidirect_algebroid(cm))
}

/// Dual data `(g*, φ↑ = −φ*, θ*, ▷)` where `theta_dual` is an algebroid on
/// `θ*` and `g_dual_action` is its action on `g*`. The bracket on `g*` is the
/// one forced by the Peiffer identity, `[ξ,η] = φ↑(ξ)▷η`; validity is left
/// to [`check_crossed_module`].
pub fn dualize(cm: &CrossedModule, theta_dual: &Algebroid, g_dual_action: &ActionTable) -> Result<CrossedModule> {
    cm.theta.frame().dual().ensure_eq(theta_dual.frame())?;
    let g_dual = cm.g.frame().dual();
    g_dual.ensure_eq(g_dual_action.target())?;
    let phi_up = cm.phi.neg_transpose();
    let gstar = induced_bracket_algebroid(&g_dual, &phi_up, g_dual_action)?;
    CrossedModule::new(gstar, theta_dual.clone(), phi_up, g_dual_action.clone())
}

/// Whether `dual` is wired as the dual of `cm`: frames `g*`, `θ*` and
/// `φ↑ = −φ*`.
pub fn duality_wiring(cm: &CrossedModule, dual: &CrossedModule) -> Result<()> {
    cm.g.frame().dual().ensure_eq(dual.theta.frame())?;
    cm.theta.frame().dual().ensure_eq(dual.g.frame())?;
    let expected = cm.phi.neg_transpose();
    if expected.matrix() != dual.phi.matrix() {
        let (a, i) = (0..dual.phi.source().rank())
            .flat_map(|a| (0..dual.phi.target().rank()).map(move |i| (a, i)))
            .find(|&(a, i)| expected.entry(a, i) != dual.phi.entry(a, i))
            .unwrap();
        return Err(Error::Hypothesis {
            law: "φ↑ = −φ*".into(),
            witness: vec![a + 1, i + 1],
            residual: (dual.phi.entry(a, i) - expected.entry(a, i)).to_string(),
        });
    }
    Ok(())
}

/// `φ↑(L_x ξ) = x▷φ↑(ξ)` and `φ(u)▷α = L_u α`, where `φ↑` is taken from
/// `dual` and `g` acts on `θ*` contragrediently.
pub fn check_dual_compatibility(cm: &CrossedModule, dual: &CrossedModule) -> Result<CheckReport> {
    cm.g.frame().dual().ensure_eq(dual.phi.source())?;
    cm.theta.frame().dual().ensure_eq(dual.phi.target())?;
    let (g, theta) = (&cm.g, &cm.theta);
    let coact = cm.action.dual();
    let phi_up = &dual.phi;
    let mut report = CheckReport::new(format!("{} -> {} with dual", theta.name(), g.name()));

    let x = |i| GradedElement::unit(g.frame(), i);
    let xi = |i| GradedElement::unit(&g.frame().dual(), i);
    let u = |a| GradedElement::unit(theta.frame(), a);
    let al = |a| GradedElement::unit(&theta.frame().dual(), a);

    let mut first = Law::new("dual-map-equivariance", "φ↑(L_x ξ) = x▷φ↑(ξ)");
    for i in 0..g.rank() {
        for j in 0..g.rank() {
            for (label, m) in slot_multipliers(g.base(), 2) {
                let xv = x(i).mul_fn(&m[0]);
                let xiv = xi(j).mul_fn(&m[1]);
                let lhs = phi_up.apply(&g.lie_derivative(&xv, &xiv)?)?;
                let rhs = coact.act(&xv, &phi_up.apply(&xiv)?)?;
                first.record_with(&[i, j], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(first);

    let mut second = Law::new("coadjoint-peiffer", "φ(u)▷α = L_u α");
    for a in 0..theta.rank() {
        for b in 0..theta.rank() {
            for (label, m) in slot_multipliers(g.base(), 2) {
                let uv = u(a).mul_fn(&m[0]);
                let alv = al(b).mul_fn(&m[1]);
                let lhs = coact.act(&cm.phi.apply(&uv)?, &alv)?;
                let rhs = theta.lie_derivative(&uv, &alv)?;
                second.record_with(&[a, b], &lhs.sub(&rhs), label);
            }
        }
    }
    report.push(second);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn representation_examples() {
        let g = fixtures::g2();
        let trivial = ActionTable::zero(&g, &Frame::new("t", 2, g.base()));
        assert!(check_representation(&trivial).passed());
        let ad = fixtures::adjoint_action(&g, g.frame());
        assert!(check_representation(&ad).passed());
        let sym = fixtures::symplectic_cm();
        assert!(check_representation(&sym.action).passed());
    }

    #[test]
    fn adjoint_action_brute_force() {
        let g = fixtures::g2();
        let ad = fixtures::adjoint_action(&g, g.frame());
        for i in 0..2 {
            for a in 0..2 {
                let x = GradedElement::unit(g.frame(), i);
                let u = GradedElement::unit(g.frame(), a);
                assert_eq!(ad.act(&x, &u).unwrap(), g.bracket(&x, &u).unwrap());
            }
        }
    }

    #[test]
    fn crossed_module_examples() {
        let sym = fixtures::symplectic_cm();
        let rep = check_crossed_module(&sym);
        assert!(rep.passed(), "{rep}");
        for id in ["CM1-peiffer", "CM2-equivariance", "isotropy"] {
            assert!(rep.entry(id).is_some(), "{id}");
        }
        assert!(check_crossed_module(&fixtures::adjoint_cm()).passed());
        assert!(check_crossed_module(&fixtures::trivial_cm(2, 3)).passed());
    }

    #[test]
    fn broken_isotropy_is_reported() {
        let mut cm = fixtures::symplectic_cm();
        let g = &cm.g;
        let mut m = cm.phi.matrix().to_vec();
        m[0][0] = Poly::one(g.base());
        cm.phi = BundleMap::new(cm.theta.frame(), g.frame(), m).unwrap();
        let rep = check_crossed_module(&cm);
        assert!(rep.failures().any(|f| f.id == "isotropy"));
    }

    #[test]
    fn induced_brackets() {
        let cm = fixtures::trivial_cm(2, 2);
        let t = induce_theta_bracket(cm.theta.frame(), &cm.g, &cm.phi, &cm.action).unwrap();
        assert!(t.theta.is_abelian());

        let ad = fixtures::adjoint_cm();
        let t = induce_theta_bracket(ad.theta.frame(), &ad.g, &ad.phi, &ad.action).unwrap();
        assert!(t.theta.same_tables(&fixtures::g2()));

        let sym = fixtures::symplectic_cm();
        let t = induce_theta_bracket(sym.theta.frame(), &sym.g, &sym.phi, &sym.action).unwrap();
        assert!(t.theta.is_abelian());
        assert!(check_crossed_module(&t).passed());
    }

    #[test]
    fn induce_rejects_failed_hypothesis() {
        // φ = id on g2 with the zero action: φ(x▷u) = 0 ≠ [x,φ(u)].
        let g = fixtures::g2();
        let theta = Frame::new("t", 2, g.base());
        let phi = BundleMap::new(&theta, g.frame(), crate::ring::matrix::identity(g.base(), 2)).unwrap();
        let err = induce_theta_bracket(&theta, &g, &phi, &ActionTable::zero(&g, &theta)).unwrap_err();
        match err {
            Error::Hypothesis { law, witness, .. } => {
                assert!(law.contains("φ(x▷u)"));
                assert_eq!(witness, vec![1, 2]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reinducing_is_idempotent() {
        for cm in [fixtures::adjoint_cm(), fixtures::symplectic_cm(), fixtures::rotation_cm()] {
            let t = induce_theta_bracket(cm.theta.frame(), &cm.g, &cm.phi, &cm.action).unwrap();
            assert!(t.theta.same_tables(&cm.theta));
        }
    }

    #[test]
    fn semidirect_examples() {
        let triv = semidirect(&fixtures::trivial_cm(1, 2)).unwrap();
        assert!(triv.is_abelian() && triv.has_zero_anchor());

        let sym = fixtures::symplectic_cm();
        let a = semidirect(&sym).unwrap();
        assert_eq!(a.rank(), 4);
        assert!(check_algebroid(&a).passed());
        // restrictions reproduce g, θ and the action
        for i in 0..3 {
            assert_eq!(a.anchor_matrix()[i], sym.g.anchor_matrix()[i]);
            for j in 0..3 {
                assert_eq!(a.bracket_basis(i, j).coeffs()[..3], sym.g.bracket_basis(i, j).coeffs()[..]);
            }
            assert_eq!(a.bracket_basis(i, 3).coeffs()[3..], sym.action.entry(i, 0).coeffs()[..]);
        }

        let ad = semidirect(&fixtures::adjoint_cm()).unwrap();
        assert_eq!(ad.rank(), 4);
        assert!(check_algebroid(&ad).passed());
    }

    #[test]
    fn dualize_examples() {
        let cm = fixtures::trivial_cm(2, 3);
        let d = dualize(
            &cm,
            &Algebroid::abelian(&cm.theta.frame().dual()),
            &ActionTable::zero(&Algebroid::abelian(&cm.theta.frame().dual()), &cm.g.frame().dual()),
        )
        .unwrap();
        assert!(d.phi.is_zero());

        let ad = fixtures::adjoint_cm();
        let td = Algebroid::abelian(&ad.theta.frame().dual());
        let d = dualize(&ad, &td, &ActionTable::zero(&td, &ad.g.frame().dual())).unwrap();
        let neg_id: Vec<Vec<Poly>> = crate::ring::matrix::identity(ad.g.base(), 2)
            .into_iter()
            .map(|r| r.into_iter().map(|p| -p).collect())
            .collect();
        assert_eq!(d.phi.matrix(), &neg_id[..]);
        assert!(duality_wiring(&ad, &d).is_ok());
    }

    #[test]
    fn dual_action_matches_pairing_and_is_involutive() {
        let g = fixtures::g2();
        let ad = fixtures::adjoint_action(&g, g.frame());
        let co = ad.dual();
        for i in 0..2 {
            for b in 0..2 {
                for a in 0..2 {
                    // <x ▷ α, u> = ρ(x)<α,u> − <α, x ▷ u>, ρ = 0
                    let lhs = GradedElement::pair(co.entry(i, b), &GradedElement::unit(g.frame(), a)).unwrap();
                    let rhs = -GradedElement::pair(&GradedElement::unit(&g.frame().dual(), b), ad.entry(i, a)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert_eq!(co.dual(), ad);
        let zero = ActionTable::zero(&g, &Frame::new("t", 3, g.base()));
        assert!(zero.dual().is_zero());
        let sym = fixtures::symplectic_cm();
        assert_eq!(sym.action.dual().dual(), sym.action);
    }

    #[test]
    fn dual_compatibility_examples() {
        let cm = fixtures::trivial_cm(2, 2);
        let d = fixtures::trivial_dual(&cm);
        assert!(check_dual_compatibility(&cm, &d).unwrap().passed());

        let sym = fixtures::symplectic_cm();
        let d = fixtures::trivial_dual(&sym);
        assert!(check_dual_compatibility(&sym, &d).unwrap().passed());

        let ad = fixtures::adjoint_cm();
        let mut d = fixtures::trivial_dual(&ad);
        assert!(check_dual_compatibility(&ad, &d).unwrap().passed());
        // both laws are linear in φ↑, so a global sign flip goes unnoticed
        let flipped = BundleMap::new(d.phi.source(), d.phi.target(), crate::ring::matrix::identity(ad.g.base(), 2)).unwrap();
        let mut f = d.clone();
        f.phi = flipped;
        assert!(duality_wiring(&ad, &f).is_err());
        assert!(check_dual_compatibility(&ad, &f).unwrap().passed());
        // rewire φ↑(ε1) = ε2
        let (zero, one) = (Poly::zero(ad.g.base()), Poly::one(ad.g.base()));
        let m = vec![vec![zero.clone(), one], vec![zero.clone(), zero]];
        d.phi = BundleMap::new(d.phi.source(), d.phi.target(), m).unwrap();
        assert!(duality_wiring(&ad, &d).is_err());
        let rep = check_dual_compatibility(&ad, &d).unwrap();
        assert!(rep.failures().any(|f| f.id == "dual-map-equivariance"));
    }
}
