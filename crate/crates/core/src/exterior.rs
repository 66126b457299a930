//! Exterior algebra of a framed free module with polynomial coefficients.
//!
//! A [`Frame`] names a free module with a fixed basis `e_1..e_r`; its dual
//! frame carries the dual basis with `<e_i, e_j*> = delta_ij`. A
//! [`GradedElement`] of degree `k` stores one polynomial per strictly
//! increasing index tuple of length `k`. Elements of the dual frame are forms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{Base, Poly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    name: Arc<str>,
    rank: usize,
    base: Base,
    starred: bool,
}

impl Frame {
    pub fn new(name: &str, rank: usize, base: &Base) -> Self {
        Frame {
            name: name.into(),
            rank,
            base: base.clone(),
            starred: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn is_dual(&self) -> bool {
        self.starred
    }

    pub fn dual(&self) -> Frame {
        Frame {
            starred: !self.starred,
            ..self.clone()
        }
    }

    /// Identifier-safe name: `g` or `g_dual`.
    pub fn ident(&self) -> String {
        if self.starred {
            format!("{}_dual", self.name)
        } else {
            self.name.to_string()
        }
    }

    /// Frame of `self ⊕ other`, basis of `self` first.
    pub fn direct_sum(&self, other: &Frame) -> Frame {
        Frame::new(
            &format!("{}_{}", self.ident(), other.ident()),
            self.rank + other.rank,
            &self.base,
        )
    }

    /// Same frame data under a new name.
    pub fn renamed(&self, name: &str) -> Frame {
        Frame {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn ensure_eq(&self, other: &Frame) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.rank {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                what: "basis index",
                index: i,
                size: self.rank,
            })
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.starred { "*" } else { "" })
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({self}, rank {})", self.rank)
    }
}

/// Sorts `idx` ascending and returns the permutation sign, or `None` if an
/// index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// All strictly increasing tuples of length `k` from `0..n`.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedElement {
    frame: Frame,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly>,
}

impl GradedElement {
    pub fn zero(frame: &Frame, degree: usize) -> Self {
        GradedElement {
            frame: frame.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn scalar(frame: &Frame, f: Poly) -> Self {
        let mut out = GradedElement::zero(frame, 0);
        out.set(vec![], f);
        out
    }

    /// `e_{i1} ∧ ... ∧ e_{ik}` in any order, sign included.
    pub fn basis(frame: &Frame, idx: &[usize]) -> Result<Self> {
        for &i in idx {
            frame.check_index(i)?;
        }
        let mut out = GradedElement::zero(frame, idx.len());
        if let Some((sorted, sign)) = sort_with_sign(idx) {
            out.set(sorted, Poly::int(frame.base(), sign));
        }
        Ok(out)
    }

    /// Basis vector `e_i`.
    pub fn unit(frame: &Frame, i: usize) -> Self {
        GradedElement::basis(frame, &[i]).expect("basis index in range")
    }

    /// Degree-1 element from its coefficient vector.
    pub fn vector(frame: &Frame, coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() != frame.rank() {
            return Err(Error::Shape(format!(
                "{} coefficients for rank {} frame {}",
                coeffs.len(),
                frame.rank(),
                frame
            )));
        }
        let mut out = GradedElement::zero(frame, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            frame.base().ensure_same(c.base())?;
            out.set(vec![i], c);
        }
        Ok(out)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &Base {
        self.frame.base()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.comps.iter()
    }

    /// Component at a sorted index tuple.
    pub fn get(&self, idx: &[usize]) -> Poly {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.base()))
    }

    /// Value on basis elements given in any order (alternating).
    pub fn eval_basis(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx) {
            Some((s, sign)) => {
                let v = self.get(&s);
                if sign < 0 {
                    -v
                } else {
                    v
                }
            }
            None => Poly::zero(self.base()),
        }
    }

    /// Coefficient `i` of a degree-1 element.
    pub fn coeff(&self, i: usize) -> Poly {
        self.get(&[i])
    }

    pub fn coeffs(&self) -> Vec<Poly> {
        (0..self.frame.rank()).map(|i| self.coeff(i)).collect()
    }

    /// Scalar value of a degree-0 element.
    pub fn scalar_value(&self) -> Poly {
        self.get(&[])
    }

    fn set(&mut self, idx: Vec<usize>, f: Poly) {
        if f.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, f);
        }
    }

    fn accumulate(&mut self, idx: Vec<usize>, f: &Poly) {
        if f.is_zero() {
            return;
        }
        let cur = self.get(&idx);
        self.set(idx, &cur + f);
    }

    /// Adds `f * e_idx` where `idx` may be unsorted.
    pub fn add_basis_term(&mut self, idx: &[usize], f: &Poly) {
        if let Some((s, sign)) = sort_with_sign(idx) {
            if sign < 0 {
                self.accumulate(s, &-f);
            } else {
                self.accumulate(s, f);
            }
        }
    }

    fn ensure_compatible(&self, other: &GradedElement) -> Result<()> {
        self.frame.ensure_eq(&other.frame)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &GradedElement) -> Result<Self> {
        self.ensure_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.accumulate(k.clone(), v);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &GradedElement) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    /// Panicking forms for internal use on elements known to be compatible.
    pub fn add(&self, other: &GradedElement) -> Self {
        self.checked_add(other).expect("incompatible graded elements")
    }

    pub fn sub(&self, other: &GradedElement) -> Self {
        self.checked_sub(other).expect("incompatible graded elements")
    }

    pub fn neg(&self) -> Self {
        self.map(|p| -p)
    }

    /// Multiplies every component by the function `f`.
    pub fn mul_fn(&self, f: &Poly) -> Self {
        self.map(|p| p * f)
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.map(|p| p.scale(&crate::ring::rat(c)))
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut out = GradedElement::zero(&self.frame, self.degree);
        for (k, v) in &self.comps {
            out.set(k.clone(), f(v));
        }
        out
    }

    /// Same components viewed in another frame of equal rank.
    pub fn reframed(&self, frame: &Frame) -> Self {
        assert_eq!(frame.rank(), self.frame.rank());
        GradedElement {
            frame: frame.clone(),
            ..self.clone()
        }
    }

    /// Relabels basis indices by `perm` into `frame`.
    pub fn relabel(&self, frame: &Frame, perm: impl Fn(usize) -> usize) -> Self {
        let mut out = GradedElement::zero(frame, self.degree);
        for (k, v) in &self.comps {
            let mapped: Vec<usize> = k.iter().map(|&i| perm(i)).collect();
            out.add_basis_term(&mapped, v);
        }
        out
    }

    pub fn wedge(&self, other: &GradedElement) -> Result<Self> {
        self.frame.ensure_eq(&other.frame)?;
        let degree = self.degree + other.degree;
        let mut out = GradedElement::zero(&self.frame, degree);
        if degree > self.frame.rank() {
            return Ok(out);
        }
        for (ka, va) in &self.comps {
            for (kb, vb) in &other.comps {
                let mut idx = ka.clone();
                idx.extend_from_slice(kb);
                out.add_basis_term(&idx, &(va * vb));
            }
        }
        Ok(out)
    }

    /// Interior product `ι_x ω`, where `x` has degree 1 and `ω` lives on the
    /// dual frame of `x`.
    pub fn contract(x: &GradedElement, omega: &GradedElement) -> Result<Self> {
        if x.degree != 1 {
            return Err(Error::Degree(format!(
                "contraction needs a degree-1 element, got degree {}",
                x.degree
            )));
        }
        if omega.degree == 0 {
            return Err(Error::Degree("cannot contract into degree 0".into()));
        }
        x.frame.dual().ensure_eq(&omega.frame)?;
        let mut out = GradedElement::zero(&omega.frame, omega.degree - 1);
        for (xi, xv) in &x.comps {
            let i = xi[0];
            for (k, v) in &omega.comps {
                if let Some(pos) = k.iter().position(|&j| j == i) {
                    let mut rest = k.clone();
                    rest.remove(pos);
                    let term = xv * v;
                    out.accumulate(rest, &if pos % 2 == 0 { term } else { -term });
                }
            }
        }
        Ok(out)
    }

    /// Pairing of elements of equal degree on dual frames, with the
    /// determinant convention `<a∧b, α∧β> = α(a)β(b) − α(b)β(a)`.
    pub fn pair(a: &GradedElement, b: &GradedElement) -> Result<Poly> {
        a.frame.dual().ensure_eq(&b.frame)?;
        if a.degree != b.degree {
            return Err(Error::Degree(format!(
                "pairing degree {} with degree {}",
                a.degree, b.degree
            )));
        }
        let mut out = Poly::zero(a.base());
        for (k, v) in &a.comps {
            if let Some(w) = b.comps.get(k) {
                out = &out + &(v * w);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let star = if self.frame.is_dual() { "*" } else { "" };
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(k, v)| {
                if k.is_empty() {
                    return v.to_string();
                }
                let basis = k
                    .iter()
                    .map(|i| format!("e{}{}", i + 1, star))
                    .collect::<Vec<_>>()
                    .join("^");
                if v.as_constant().is_some_and(|c| c == crate::ring::rat(1)) {
                    basis
                } else {
                    format!("({v})*{basis}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} deg {}] {}", self.frame, self.degree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Base;
    use proptest::prelude::*;

    fn frame(rank: usize) -> Frame {
        Frame::new("V", rank, &Base::new(["x", "y"]))
    }

    fn poly(s: &str) -> Poly {
        Poly::parse(s, &Base::new(["x", "y"])).unwrap()
    }

    fn e(f: &Frame, idx: &[usize]) -> GradedElement {
        GradedElement::basis(f, idx).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let f = frame(3);
        assert_eq!(e(&f, &[0]).wedge(&e(&f, &[1])).unwrap(), e(&f, &[0, 1]));
        assert_eq!(
            e(&f, &[1]).wedge(&e(&f, &[0])).unwrap(),
            e(&f, &[0, 1]).neg()
        );
        assert!(e(&f, &[0]).wedge(&e(&f, &[0])).unwrap().is_zero());
        let a = e(&f, &[0]).mul_fn(&poly("x"));
        let b = e(&f, &[1]).mul_fn(&poly("y"));
        assert_eq!(a.wedge(&b).unwrap(), e(&f, &[0, 1]).mul_fn(&poly("x*y")));
    }

    #[test]
    fn wedge_rejects_mixed_variance() {
        let f = frame(2);
        assert!(matches!(
            e(&f, &[0]).wedge(&e(&f.dual(), &[0])),
            Err(Error::FrameMismatch { .. })
        ));
    }

    #[test]
    fn contraction_examples() {
        let f = frame(3);
        let d = f.dual();
        let c = GradedElement::contract(&e(&f, &[0]), &e(&d, &[0, 1])).unwrap();
        assert_eq!(c, e(&d, &[1]));
        assert!(GradedElement::contract(&e(&f, &[1]), &e(&d, &[0]))
            .unwrap()
            .is_zero());
        assert!(matches!(
            GradedElement::contract(&e(&f, &[0]), &GradedElement::scalar(&d, poly("1"))),
            Err(Error::Degree(_))
        ));
    }

    /// Evaluates a form on basis vectors by the multilinear definition:
    /// sum over the sorted components of the determinant of pairings.
    fn multilinear_eval(omega: &GradedElement, args: &[usize]) -> Poly {
        let b = omega.base().clone();
        let mut out = Poly::zero(&b);
        for (k, v) in omega.components() {
            // det [delta(k_r, args_s)]
            let n = k.len();
            let m: Vec<Vec<Poly>> = (0..n)
                .map(|r| {
                    (0..n)
                        .map(|s| Poly::int(&b, (k[r] == args[s]) as i64))
                        .collect()
                })
                .collect();
            out = out + v * crate::ring::matrix::determinant(&m, &b);
        }
        out
    }

    #[test]
    fn contraction_matches_multilinear_definition() {
        let f = frame(3);
        let d = f.dual();
        let omega = e(&d, &[0, 1, 2]).mul_fn(&poly("x"));
        let c = GradedElement::contract(&e(&f, &[0]), &omega).unwrap();
        assert_eq!(c, e(&d, &[1, 2]).mul_fn(&poly("x")));
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(c.eval_basis(&[a, b]), multilinear_eval(&omega, &[0, a, b]));
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let f = frame(2);
        let d = f.dual();
        let p = |a: &GradedElement, b: &GradedElement| GradedElement::pair(a, b).unwrap();
        assert_eq!(p(&e(&f, &[0]), &e(&d, &[0])), poly("1"));
        assert!(p(&e(&f, &[0]), &e(&d, &[1])).is_zero());
        let x = e(&f, &[0]).mul_fn(&poly("x")).add(&e(&f, &[1]));
        let xi = e(&d, &[0]).mul_fn(&poly("y"));
        assert_eq!(p(&x, &xi), poly("x*y"));
        assert_eq!(p(&xi, &x), poly("x*y"));
        assert!(GradedElement::pair(&x, &x).is_err());
    }

    fn arb_elem(f: Frame, degree: usize) -> impl Strategy<Value = GradedElement> {
        let tuples = index_tuples(f.rank(), degree);
        let b = f.base().clone();
        prop::collection::vec(crate::ring::tests::arb_poly(b), tuples.len()).prop_map(
            move |coeffs| {
                let mut out = GradedElement::zero(&f, degree);
                for (t, c) in tuples.iter().zip(coeffs) {
                    out.add_basis_term(t, &c);
                }
                out
            },
        )
    }

    fn arb_any(f: Frame) -> impl Strategy<Value = GradedElement> {
        (0..=f.rank()).prop_flat_map(move |k| arb_elem(f.clone(), k))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wedge_graded_commutative(a in arb_any(frame(4)), b in arb_any(frame(4))) {
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            let sign = if a.degree() * b.degree() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(ab, ba.scale_int(sign));
        }

        #[test]
        fn wedge_associative(a in arb_any(frame(4)), b in arb_any(frame(4)), c in arb_any(frame(4))) {
            prop_assert_eq!(
                a.wedge(&b).unwrap().wedge(&c).unwrap(),
                a.wedge(&b.wedge(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn contraction_is_graded_derivation(
            x in arb_elem(frame(4), 1),
            w in arb_any(frame(4).dual()),
            t in arb_any(frame(4).dual()),
        ) {
            prop_assume!(w.degree() >= 1 && t.degree() >= 1);
            let lhs = GradedElement::contract(&x, &w.wedge(&t).unwrap()).unwrap();
            let first = GradedElement::contract(&x, &w).unwrap().wedge(&t).unwrap();
            let second = w.wedge(&GradedElement::contract(&x, &t).unwrap()).unwrap();
            let sign = if w.degree() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(lhs, first.add(&second.scale_int(sign)));
        }
    }
}
