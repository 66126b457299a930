//! Exact scalars: rationals and multivariate polynomials over the rationals.
//!
//! Polynomials model smooth functions on the base. Every polynomial carries
//! its ordered variable list ([`Base`]); mixing bases is a structural error.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub mod matrix;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Ordered list of base coordinate names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Base(Arc<[String]>);

impl Base {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        Base(vars.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    /// The zero-dimensional base.
    pub fn point() -> Self {
        Base::new(Vec::<String>::new())
    }

    /// `x1, ..., xn`.
    pub fn standard(n: usize) -> Self {
        Base::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    pub fn ensure_same(&self, other: &Base) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BaseMismatch {
                left: self.0.join(", "),
                right: other.0.join(", "),
            })
        }
    }
}

impl fmt::Debug for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Base[{}]", self.0.join(", "))
    }
}

/// Dense exponent vector. Ordered graded-lexicographically: total degree
/// first, then lexicographic with `x1` most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over the rationals in the variables of `base`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    base: Base,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(base: &Base) -> Self {
        Poly {
            base: base.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(base: &Base, c: Rational) -> Self {
        let mut p = Poly::zero(base);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(base.dim()), c);
        }
        p
    }

    pub fn int(base: &Base, c: i64) -> Self {
        Poly::constant(base, rat(c))
    }

    pub fn one(base: &Base) -> Self {
        Poly::int(base, 1)
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(base: &Base, i: usize) -> Result<Self> {
        if i >= base.dim() {
            return Err(Error::IndexOutOfRange {
                what: "base variable",
                index: i,
                size: base.dim(),
            });
        }
        Ok(Poly::term(base, Monomial::var(base.dim(), i), rat(1)))
    }

    /// Single term. The exponent vector must match the base dimension.
    pub fn term(base: &Base, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.0.len(), base.dim(), "exponent vector length");
        let mut p = Poly::zero(base);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant value, if the polynomial has degree at most zero.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.base.ensure_same(&other.base)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.base.ensure_same(&other.base)?;
        let mut out = Poly::zero(&self.base);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.base);
        }
        Poly {
            base: self.base.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Formal partial derivative in variable `i` (0-based).
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.base.dim() {
            return Err(Error::IndexOutOfRange {
                what: "base variable",
                index: i,
                size: self.base.dim(),
            });
        }
        let mut out = Poly::zero(&self.base);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, c * rat(e as i64));
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(&self.base);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Parses a polynomial literal such as `3/2*x1^2*x2 - x1 + 1`.
    pub fn parse(text: &str, base: &Base) -> Result<Poly, String> {
        crate::sdl::parse_poly_literal(text, base)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

fn fmt_monomial(base: &Base, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(base.0[i].clone()),
            _ => parts.push(format!("{}^{}", base.0[i], e)),
        }
    }
    parts.join("*")
}

/// Canonical rendering, terms in descending graded-lex order.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mono = fmt_monomial(&self.base, m);
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

// Operator forms panic on base mismatch; internal code only combines
// polynomials it has already checked to share a base.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomial base mismatch")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b2() -> Base {
        Base::new(["x", "y"])
    }

    fn p(s: &str) -> Poly {
        Poly::parse(s, &b2()).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(p("x^2 + 1") + p("-1"), p("x^2"));
        assert_eq!(p("1/2") + p("1/3"), Poly::constant(&b2(), ratio(5, 6)));
        assert_eq!(p("x*y") + p("y*x"), p("2*x*y"));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("x + 1") * p("x - 1"), p("x^2 - 1"));
        assert!((Poly::zero(&b2()) * p("x^3 + y")).is_zero());
        assert_eq!(p("2*x") * p("3*y"), p("6*x*y"));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(p("x^2*y").partial(0).unwrap(), p("2*x*y"));
        assert!(p("x^2").partial(1).unwrap().is_zero());
        // expand first, then differentiate term by term
        let expanded = p("x + 1") * p("x - 1");
        let mut oracle = Poly::zero(&b2());
        for (m, c) in expanded.terms() {
            if m.0[0] > 0 {
                let mut e = m.clone();
                e.0[0] -= 1;
                oracle = oracle + Poly::term(&b2(), e, c * rat(m.0[0] as i64));
            }
        }
        assert_eq!(expanded.partial(0).unwrap(), oracle);
        assert_eq!(oracle, p("2*x"));
    }

    #[test]
    fn structural_errors() {
        let a = Poly::one(&Base::new(["x"]));
        assert!(matches!(a.checked_add(&p("y")), Err(Error::BaseMismatch { .. })));
        assert!(matches!(a.checked_mul(&p("y")), Err(Error::BaseMismatch { .. })));
        assert!(matches!(a.partial(1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn canonical_display() {
        let b = Base::standard(2);
        let q = Poly::parse("1 - x1 + 3/2*x2*x1^2", &b).unwrap();
        assert_eq!(q.to_string(), "3/2*x1^2*x2 - x1 + 1");
        assert_eq!(Poly::parse("-x2 - 2/3", &b).unwrap().to_string(), "-x2 - 2/3");
        assert_eq!(Poly::zero(&b).to_string(), "0");
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(a < b);
        assert!(c < a);
    }

    pub(crate) fn arb_poly(base: Base) -> impl Strategy<Value = Poly> {
        let n = base.dim();
        prop::collection::vec(
            (prop::collection::vec(0u32..3, n), -4i64..5, 1i64..4),
            0..5,
        )
        .prop_map(move |ts| {
            let mut out = Poly::zero(&base);
            for (e, num, den) in ts {
                out = out + Poly::term(&base, Monomial(e), ratio(num, den));
            }
            out
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(b2()), b in arb_poly(b2()), c in arb_poly(b2())) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn leibniz(a in arb_poly(b2()), b in arb_poly(b2()), i in 0usize..2) {
            let lhs = (&a * &b).partial(i).unwrap();
            let rhs = &a.partial(i).unwrap() * &b + &a * &b.partial(i).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mixed_partials_commute(a in arb_poly(Base::standard(3)), i in 0usize..3, j in 0usize..3) {
            prop_assert_eq!(
                a.partial(i).unwrap().partial(j).unwrap(),
                a.partial(j).unwrap().partial(i).unwrap()
            );
        }

        #[test]
        fn display_parses_back(a in arb_poly(b2())) {
            prop_assert_eq!(Poly::parse(&a.to_string(), &b2()).unwrap(), a);
        }
    }
}
