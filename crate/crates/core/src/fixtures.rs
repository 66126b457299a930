//! Standard small structures, built programmatically. The corpus files under
//! `corpus/` describe the same objects in SDL.

use crate::algebroid::{exact_dual_algebroid, Algebroid};
use crate::bicrossed::BicrossedModule;
use crate::crossmod::{dualize, ActionTable, BundleMap, CrossedModule};
use crate::doubles::{Bialgebroid, MatchedPair};
use crate::exterior::{Frame, GradedElement};
use crate::ring::{matrix, Base, Poly};

fn unit(f: &Frame, i: usize) -> GradedElement {
    GradedElement::unit(f, i)
}

/// Tangent algebroid of `R^n` in the coordinate frame.
pub fn tangent(base: &Base) -> Algebroid {
    let n = base.dim();
    let mut a = Algebroid::abelian(&Frame::new("TM", n, base));
    for i in 0..n {
        let mut row = vec![Poly::zero(base); n];
        row[i] = Poly::one(base);
        a.set_anchor(i, row).unwrap();
    }
    a
}

/// Two-dimensional nonabelian Lie algebra `[e1, e2] = e2` over a point.
pub fn g2() -> Algebroid {
    let f = Frame::new("g2", 2, &Base::point());
    let mut a = Algebroid::abelian(&f);
    a.set_bracket(0, 1, unit(&f, 1)).unwrap();
    a
}

/// Rank 3 over a point with `[e1,e2] = e1 + e2`, `[e1,e3] = e3`,
/// `[e2,e3] = e3`. Jacobi fails on `(e1, e2, e3)` with Jacobiator `2e3`.
pub fn mutated_g2() -> Algebroid {
    let f = Frame::new("g3", 3, &Base::point());
    let mut a = Algebroid::abelian(&f);
    a.set_bracket(0, 1, unit(&f, 0).add(&unit(&f, 1))).unwrap();
    a.set_bracket(0, 2, unit(&f, 2)).unwrap();
    a.set_bracket(1, 2, unit(&f, 2)).unwrap();
    a
}

/// `TM ⊕ (M × R)` over `R^2` with `ω = dx1∧dx2`:
/// `[X+f, Y+g] = [X,Y] + X(g) − Y(f) − ω(X,Y)`. Basis `∂1, ∂2, 1`.
pub fn symplectic_g() -> Algebroid {
    let base = Base::standard(2);
    let f = Frame::new("g", 3, &base);
    let mut a = Algebroid::abelian(&f);
    let (one, zero) = (Poly::one(&base), Poly::zero(&base));
    a.set_anchor(0, vec![one.clone(), zero.clone()]).unwrap();
    a.set_anchor(1, vec![zero, one]).unwrap();
    a.set_bracket(0, 1, unit(&f, 2).neg()).unwrap();
    a
}

/// Dual of `TR^2` for the Poisson bivector `x1 ∂1∧∂2`.
pub fn poisson_dual() -> Algebroid {
    let t = tangent(&Base::standard(2));
    let x = Poly::var(t.base(), 0).unwrap();
    let lam = GradedElement::basis(t.frame(), &[0, 1]).unwrap().mul_fn(&x);
    exact_dual_algebroid(&t, &lam).unwrap()
}

/// Action algebroid of the abelian `R` acting on `R` by `∂x1`.
pub fn action_algebroid() -> Algebroid {
    let base = Base::standard(1);
    let mut a = Algebroid::abelian(&Frame::new("Mr", 1, &base));
    a.set_anchor(0, vec![Poly::one(&base)]).unwrap();
    a
}

/// Adjoint action of `g` on a frame of the same rank: `e_i ▷ u_a = [e_i, e_a]`.
pub fn adjoint_action(g: &Algebroid, target: &Frame) -> ActionTable {
    let mut act = ActionTable::zero(g, target);
    for i in 0..g.rank() {
        for a in 0..g.rank() {
            act.set(i, a, g.bracket_basis(i, a).reframed(target)).unwrap();
        }
    }
    act
}

/// `M × R --inclusion--> TM ⊕ (M × R)` over `R^2`, acting by `(X+f)▷g = X(g)`.
pub fn symplectic_cm() -> CrossedModule {
    let g = symplectic_g();
    let base = g.base().clone();
    let theta = Algebroid::abelian(&Frame::new("theta", 1, &base));
    let phi = BundleMap::new(
        theta.frame(),
        g.frame(),
        vec![vec![Poly::zero(&base), Poly::zero(&base), Poly::one(&base)]],
    )
    .unwrap();
    let action = ActionTable::zero(&g, theta.frame());
    CrossedModule::new(theta, g, phi, action).unwrap()
}

/// `g2 --id--> g2` with the adjoint action.
pub fn adjoint_cm() -> CrossedModule {
    let g = g2();
    let theta = g.on_frame(&Frame::new("h2", 2, g.base())).unwrap();
    let phi = BundleMap::new(theta.frame(), g.frame(), matrix::identity(g.base(), 2)).unwrap();
    let action = adjoint_action(&g, theta.frame());
    CrossedModule::new(theta, g, phi, action).unwrap()
}

/// Abelian `θ` of rank `rt` and `g` of rank `rg` over a point, zero map and action.
pub fn trivial_cm(rt: usize, rg: usize) -> CrossedModule {
    let base = Base::point();
    let theta = Algebroid::abelian(&Frame::new("t", rt, &base));
    let g = Algebroid::abelian(&Frame::new("g", rg, &base));
    let phi = BundleMap::zero(theta.frame(), g.frame());
    let action = ActionTable::zero(&g, theta.frame());
    CrossedModule::new(theta, g, phi, action).unwrap()
}

/// Abelian `R^2` with `R` acting by the rotation `e1 ↦ e2`, `e2 ↦ −e1`,
/// and `φ = 0`.
pub fn rotation_cm() -> CrossedModule {
    let base = Base::point();
    let theta = Algebroid::abelian(&Frame::new("p", 2, &base));
    let g = Algebroid::abelian(&Frame::new("so2", 1, &base));
    let phi = BundleMap::zero(theta.frame(), g.frame());
    let mut action = ActionTable::zero(&g, theta.frame());
    action.set(0, 0, unit(theta.frame(), 1)).unwrap();
    action.set(0, 1, unit(theta.frame(), 0).neg()).unwrap();
    CrossedModule::new(theta, g, phi, action).unwrap()
}

/// Dual of `cm` with abelian, anchorless `θ*` acting trivially on `g*`.
pub fn trivial_dual(cm: &CrossedModule) -> CrossedModule {
    let theta_dual = Algebroid::abelian(&cm.theta.frame().dual());
    let action = ActionTable::zero(&theta_dual, &cm.g.frame().dual());
    dualize(cm, &theta_dual, &action).unwrap()
}

/// `(TR, R^g)` for `g = R` acting by `∂x1`: `X▷(f x) = X(f) x` and
/// `(f x)▷X = f[∂x1, X]`. Both basis tables vanish.
pub fn action_matched_pair() -> MatchedPair {
    let p = tangent(&Base::standard(1));
    let q = action_algebroid();
    MatchedPair::trivial(p, q).unwrap()
}

/// `(A, A*_Λ)` with the dual bracket of the bivector `Λ`.
pub fn exact_bialgebroid(a: &Algebroid, lambda: &GradedElement) -> Bialgebroid {
    Bialgebroid::new(a.clone(), exact_dual_algebroid(a, lambda).unwrap()).unwrap()
}

/// `cm` with [`trivial_dual`].
fn with_trivial_dual(cm: CrossedModule) -> BicrossedModule {
    let dual = trivial_dual(&cm);
    BicrossedModule::new(cm, dual).unwrap()
}

pub fn trivial_bicrossed() -> BicrossedModule {
    with_trivial_dual(trivial_cm(2, 2))
}

pub fn symplectic_bicrossed() -> BicrossedModule {
    with_trivial_dual(symplectic_cm())
}

/// [`adjoint_cm`] with abelian duals: `A = g2 ⋉ g2`, `A* = g2* ⊕ g2*`.
pub fn adjoint_bicrossed() -> BicrossedModule {
    with_trivial_dual(adjoint_cm())
}

pub fn rotation_bicrossed() -> BicrossedModule {
    with_trivial_dual(rotation_cm())
}

/// Adds `α1 ▷ ξ1 = ξ1` to the dual action. Both crossed modules stay valid
/// when `φ = 0` and `g*` has rank 1, but the matched pair fails.
pub fn mutate_dual_action(b: &BicrossedModule) -> BicrossedModule {
    let mut action = b.dual.action.clone();
    let target = action.target().clone();
    let v = action.entry(0, 0).add(&unit(&target, 0));
    action.set(0, 0, v).unwrap();
    let dual = dualize(&b.cm, &b.dual.g, &action).unwrap();
    BicrossedModule::new(b.cm.clone(), dual).unwrap()
}

/// Heisenberg `h3` (`[u1,u2] = u3`) included into `h3 ⋊ R`, where the extra
/// generator `D` acts by `u1 ↦ u1`, `u3 ↦ u3`. `D` does not preserve
/// `u1∧u2∧u3`.
pub fn non_invariant_rmatrix_cm() -> CrossedModule {
    let base = Base::point();
    let tf = Frame::new("h3", 3, &base);
    let mut theta = Algebroid::abelian(&tf);
    theta.set_bracket(0, 1, unit(&tf, 2)).unwrap();
    let gf = Frame::new("h3D", 4, &base);
    let mut g = Algebroid::abelian(&gf);
    g.set_bracket(0, 1, unit(&gf, 2)).unwrap();
    g.set_bracket(3, 0, unit(&gf, 0)).unwrap();
    g.set_bracket(3, 2, unit(&gf, 2)).unwrap();
    let mut rows = matrix::zeros(&base, 3, 4);
    for a in 0..3 {
        rows[a][a] = Poly::one(&base);
    }
    let phi = BundleMap::new(&tf, &gf, rows).unwrap();
    let mut action = ActionTable::zero(&g, &tf);
    for i in 0..4 {
        for a in 0..3 {
            let v = g.bracket_basis(i, a);
            let coeffs = (0..3).map(|k| v.coeff(k)).collect();
            action.set(i, a, GradedElement::vector(&tf, coeffs).unwrap()).unwrap();
        }
    }
    CrossedModule::new(theta, g, phi, action).unwrap()
}

/// Heisenberg `[e1,e2] = e3` and abelian `R` with zero actions. The
/// invariant elements of `P ⊗ Q` are the multiples of `e3 ⊗ f1`.
pub fn central_matched_pair() -> MatchedPair {
    let base = Base::point();
    let pf = Frame::new("heis", 3, &base);
    let mut p = Algebroid::abelian(&pf);
    p.set_bracket(0, 1, unit(&pf, 2)).unwrap();
    let q = Algebroid::abelian(&Frame::new("q", 1, &base));
    MatchedPair::trivial(p, q).unwrap()
}
