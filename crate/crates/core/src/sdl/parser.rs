use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::lexer::{lex, Tok, Token};
use super::{
    ActionBlock, Arg, BundleRef, DiagClass, Diagnostic, Document, FormBlock, MapBlock,
    MultivectorBlock, Structure, StructureKind,
};
use crate::exterior::sort_with_sign;
use crate::ring::{Base, Poly, Rational};

type PResult<T> = Result<T, Diagnostic>;

/// What non-scalar symbols an expression may contain.
#[derive(Clone, Copy)]
enum Gens {
    None,
    /// `e1..eN`.
    Basis(usize),
    /// `d/dx_k`.
    Deriv,
}

/// Linear combination of generators with polynomial coefficients, plus a
/// scalar part.
#[derive(Clone)]
struct Lin {
    scalar: Poly,
    gens: BTreeMap<usize, Poly>,
}

impl Lin {
    fn scalar(p: Poly) -> Self {
        Lin {
            scalar: p,
            gens: BTreeMap::new(),
        }
    }

    fn gen(base: &Base, k: usize) -> Self {
        let mut gens = BTreeMap::new();
        gens.insert(k, Poly::one(base));
        Lin {
            scalar: Poly::zero(base),
            gens,
        }
    }

    fn is_scalar(&self) -> bool {
        self.gens.is_empty()
    }

    fn add(mut self, other: Lin) -> Lin {
        self.scalar = &self.scalar + &other.scalar;
        for (k, v) in other.gens {
            let cur = self.gens.remove(&k);
            let s = match cur {
                Some(c) => &c + &v,
                None => v,
            };
            if !s.is_zero() {
                self.gens.insert(k, s);
            }
        }
        self
    }

    fn scale(self, p: &Poly) -> Lin {
        Lin {
            scalar: &self.scalar * p,
            gens: self
                .gens
                .into_iter()
                .map(|(k, v)| (k, &v * p))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    fn neg(self) -> Lin {
        let m1 = Poly::int(self.scalar.base(), -1);
        self.scale(&m1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Named {
    Bundle,
    Action,
    Map,
    Form,
    Multivector,
    Structure(StructureKind),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    base: Base,
    doc: Document,
    names: BTreeMap<String, Named>,
    statements: usize,
}

fn diag(class: DiagClass, t: &Token, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        class,
        line: t.line,
        col: t.col,
        message: message.into(),
    }
}

const KEYWORDS: [&str; 9] = [
    "base",
    "bundle",
    "anchor",
    "bracket",
    "action",
    "map",
    "form",
    "multivector",
    "structure",
];

fn basis_symbol(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('e')?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

impl Parser {
    fn new(text: &str, base: Base) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            base,
            doc: Document::default(),
            names: BTreeMap::new(),
            statements: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at(&self, t: &Tok) -> bool {
        &self.peek().tok == t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Token> {
        if self.at(&t) {
            Ok(self.next())
        } else {
            let p = self.peek().clone();
            Err(diag(
                DiagClass::Syntactic,
                &p,
                format!("expected {}, found {}", t.describe(), p.tok.describe()),
            ))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(diag(
                DiagClass::Syntactic,
                &t,
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            other => Err(diag(
                DiagClass::Syntactic,
                &t,
                format!("expected `{kw}`, found {}", other.describe()),
            )),
        }
    }

    fn expect_usize(&mut self) -> PResult<(usize, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Int(s) => s
                .parse::<usize>()
                .map(|v| (v, t.clone()))
                .map_err(|_| diag(DiagClass::Syntactic, &t, "number too large")),
            other => Err(diag(
                DiagClass::Syntactic,
                &t,
                format!("expected a number, found {}", other.describe()),
            )),
        }
    }

    /// 1-based index converted to 0-based, range-checked against `rank`.
    fn expect_index(&mut self, rank: usize, what: &str) -> PResult<usize> {
        let (v, t) = self.expect_usize()?;
        if v == 0 || v > rank {
            return Err(diag(
                DiagClass::Dimensional,
                &t,
                format!("index {v} out of range for {what} (rank {rank})"),
            ));
        }
        Ok(v - 1)
    }

    fn declare(&mut self, name: &str, kind: Named, t: &Token) -> PResult<()> {
        if KEYWORDS.contains(&name) {
            return Err(diag(DiagClass::Syntactic, t, format!("`{name}` is a keyword")));
        }
        if self.base.index_of(name).is_some() || basis_symbol(name).is_some() {
            return Err(diag(
                DiagClass::Referential,
                t,
                format!("name `{name}` clashes with a variable or basis symbol"),
            ));
        }
        if self.names.contains_key(name) {
            return Err(diag(DiagClass::Referential, t, format!("duplicate name `{name}`")));
        }
        self.names.insert(name.into(), kind);
        Ok(())
    }

    fn bundle_ref(&mut self) -> PResult<(BundleRef, Token)> {
        let (name, t) = self.expect_ident("a bundle name")?;
        if self.names.get(&name) != Some(&Named::Bundle) {
            return Err(diag(DiagClass::Referential, &t, format!("undefined bundle `{name}`")));
        }
        let dual = self.eat(&Tok::Star);
        Ok((BundleRef::new(&name, dual), t))
    }

    fn rank(&self, r: &BundleRef) -> usize {
        self.doc.bundles[&r.name]
    }

    // ---- expressions ----

    fn expr(&mut self, gens: Gens) -> PResult<Lin> {
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let mut acc = self.term(gens)?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.add(self.term(gens)?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.add(self.term(gens)?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, gens: Gens) -> PResult<Lin> {
        let mut acc = self.factor(gens)?;
        loop {
            if self.at(&Tok::Star) {
                let op = self.next();
                let rhs = self.factor(gens)?;
                acc = if acc.is_scalar() {
                    rhs.scale(&acc.scalar)
                } else if rhs.is_scalar() {
                    acc.scale(&rhs.scalar)
                } else {
                    return Err(diag(DiagClass::Syntactic, &op, "product of two basis symbols"));
                };
            } else if self.at(&Tok::Slash) {
                let op = self.next();
                let rhs = self.factor(gens)?;
                let c = if rhs.is_scalar() { rhs.scalar.as_constant() } else { None };
                match c {
                    Some(c) if !c.is_zero() => {
                        acc = acc.scale(&Poly::constant(&self.base, c.recip()));
                    }
                    _ => {
                        return Err(diag(
                            DiagClass::Syntactic,
                            &op,
                            "division only by nonzero constants",
                        ))
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self, gens: Gens) -> PResult<Lin> {
        let a = self.atom(gens)?;
        if self.at(&Tok::Caret) {
            let op = self.next();
            let (k, _) = self.expect_usize()?;
            if !a.is_scalar() {
                return Err(diag(DiagClass::Syntactic, &op, "power of a basis symbol"));
            }
            let k = u32::try_from(k).map_err(|_| diag(DiagClass::Syntactic, &op, "exponent too large"))?;
            return Ok(Lin::scalar(a.scalar.pow(k)));
        }
        Ok(a)
    }

    fn atom(&mut self, gens: Gens) -> PResult<Lin> {
        let t = self.next();
        match &t.tok {
            Tok::Int(s) => {
                let n: BigInt = s.parse().expect("lexer yields digits");
                Ok(Lin::scalar(Poly::constant(&self.base, Rational::from_integer(n))))
            }
            Tok::LParen => {
                let e = self.expr(gens)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Minus => Ok(self.factor(gens)?.neg()),
            Tok::Ident(s) => {
                if let Some(i) = self.base.index_of(s) {
                    return Ok(Lin::scalar(Poly::var(&self.base, i).unwrap()));
                }
                if let (Gens::Basis(rank), Some(k)) = (gens, basis_symbol(s)) {
                    if k == 0 || k > rank {
                        return Err(diag(
                            DiagClass::Dimensional,
                            &t,
                            format!("basis symbol `{s}` out of range for rank {rank}"),
                        ));
                    }
                    return Ok(Lin::gen(&self.base, k - 1));
                }
                Err(diag(DiagClass::Referential, &t, format!("unknown symbol `{s}`")))
            }
            Tok::Deriv(v) => {
                if !matches!(gens, Gens::Deriv) {
                    return Err(diag(DiagClass::Syntactic, &t, "vector field not allowed here"));
                }
                match self.base.index_of(v) {
                    Some(i) => Ok(Lin::gen(&self.base, i)),
                    None => Err(diag(DiagClass::Referential, &t, format!("unknown variable `{v}`"))),
                }
            }
            other => Err(diag(
                DiagClass::Syntactic,
                &t,
                format!("expected an expression, found {}", other.describe()),
            )),
        }
    }

    fn scalar_expr(&mut self) -> PResult<Poly> {
        Ok(self.expr(Gens::None)?.scalar)
    }

    /// Coefficient vector of length `rank` from `e1..eN` combinations.
    fn section_expr(&mut self, rank: usize) -> PResult<Vec<Poly>> {
        let t = self.peek().clone();
        let lin = self.expr(Gens::Basis(rank))?;
        if !lin.scalar.is_zero() {
            return Err(diag(
                DiagClass::Dimensional,
                &t,
                "expected a combination of basis symbols, found a scalar",
            ));
        }
        let mut v = vec![Poly::zero(&self.base); rank];
        for (k, p) in lin.gens {
            v[k] = p;
        }
        Ok(v)
    }

    fn vector_field_expr(&mut self) -> PResult<Vec<Poly>> {
        let t = self.peek().clone();
        let lin = self.expr(Gens::Deriv)?;
        if !lin.scalar.is_zero() {
            return Err(diag(
                DiagClass::Dimensional,
                &t,
                "expected a combination of d/dx terms, found a scalar",
            ));
        }
        let mut v = vec![Poly::zero(&self.base); self.base.dim()];
        for (k, p) in lin.gens {
            v[k] = p;
        }
        Ok(v)
    }

    /// `[i, j, ...]` with 0-based results.
    fn index_list(&mut self, rank: usize, what: &str) -> PResult<(Vec<usize>, Token)> {
        let open = self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                out.push(self.expect_index(rank, what)?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok((out, open))
    }

    fn pair_key(&mut self, r1: usize, r2: usize, what: &str) -> PResult<((usize, usize), Token)> {
        let open = self.expect(Tok::LBracket)?;
        let i = self.expect_index(r1, what)?;
        self.expect(Tok::Comma)?;
        let j = self.expect_index(r2, what)?;
        if !self.at(&Tok::RBracket) {
            let t = self.peek().clone();
            return Err(diag(DiagClass::Dimensional, &t, "expected exactly two indices"));
        }
        self.next();
        Ok(((i, j), open))
    }

    /// `e<k>` on the left of an anchor or map entry.
    fn basis_key(&mut self, rank: usize, what: &str) -> PResult<(usize, Token)> {
        let (s, t) = self.expect_ident("a basis symbol")?;
        match basis_symbol(&s) {
            Some(k) if k >= 1 && k <= rank => Ok((k - 1, t)),
            Some(k) => Err(diag(
                DiagClass::Dimensional,
                &t,
                format!("basis symbol e{k} out of range for {what} (rank {rank})"),
            )),
            None => Err(diag(DiagClass::Syntactic, &t, format!("expected a basis symbol, found `{s}`"))),
        }
    }

    fn entries<F>(&mut self, mut each: F) -> PResult<()>
    where
        F: FnMut(&mut Self) -> PResult<()>,
    {
        loop {
            each(self)?;
            if !self.eat(&Tok::Comma) {
                return Ok(());
            }
        }
    }

    // ---- statements ----

    fn statement(&mut self) -> PResult<()> {
        let (kw, t) = self.expect_ident("a statement keyword")?;
        self.statements += 1;
        match kw.as_str() {
            "base" => self.base_stmt(&t),
            "bundle" => self.bundle_stmt(),
            "anchor" => self.anchor_stmt(),
            "bracket" => self.bracket_stmt(),
            "action" => self.action_stmt(),
            "map" => self.map_stmt(),
            "form" => self.form_stmt(),
            "multivector" => self.multivector_stmt(),
            "structure" => self.structure_stmt(),
            _ => Err(diag(
                DiagClass::Syntactic,
                &t,
                format!("unknown statement `{kw}`"),
            )),
        }?;
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn base_stmt(&mut self, t: &Token) -> PResult<()> {
        if self.statements != 1 {
            return Err(diag(DiagClass::Syntactic, t, "`base` must be the first statement"));
        }
        let mut vars: Vec<String> = Vec::new();
        if !self.at(&Tok::Semi) {
            loop {
                let (v, vt) = self.expect_ident("a variable name")?;
                if vars.contains(&v) {
                    return Err(diag(DiagClass::Referential, &vt, format!("duplicate variable `{v}`")));
                }
                if basis_symbol(&v).is_some() || KEYWORDS.contains(&v.as_str()) || v == "d" {
                    return Err(diag(DiagClass::Syntactic, &vt, format!("`{v}` is reserved")));
                }
                vars.push(v);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.base = Base::new(vars.clone());
        self.doc.base = vars;
        Ok(())
    }

    fn bundle_stmt(&mut self) -> PResult<()> {
        let (name, t) = self.expect_ident("a bundle name")?;
        self.expect_keyword("rank")?;
        let (rank, _) = self.expect_usize()?;
        self.declare(&name, Named::Bundle, &t)?;
        self.doc.bundles.insert(name, rank);
        Ok(())
    }

    fn anchor_stmt(&mut self) -> PResult<()> {
        let (b, _) = self.bundle_ref()?;
        self.expect(Tok::Colon)?;
        let rank = self.rank(&b);
        self.entries(|p| {
            let (i, t) = p.basis_key(rank, &b.to_string())?;
            p.expect(Tok::Eq)?;
            let v = p.vector_field_expr()?;
            let rows = p.doc.anchors.entry(b.clone()).or_default();
            if rows.insert(i, v).is_some() {
                return Err(diag(DiagClass::Referential, &t, format!("duplicate anchor entry e{}", i + 1)));
            }
            Ok(())
        })
    }

    fn bracket_stmt(&mut self) -> PResult<()> {
        let (b, _) = self.bundle_ref()?;
        self.expect(Tok::Colon)?;
        let rank = self.rank(&b);
        self.entries(|p| {
            let (key, t) = p.pair_key(rank, rank, &b.to_string())?;
            p.expect(Tok::Eq)?;
            let v = p.section_expr(rank)?;
            let tab = p.doc.brackets.entry(b.clone()).or_default();
            if tab.insert(key, v).is_some() {
                return Err(diag(
                    DiagClass::Referential,
                    &t,
                    format!("duplicate bracket entry [{},{}]", key.0 + 1, key.1 + 1),
                ));
            }
            Ok(())
        })
    }

    fn action_stmt(&mut self) -> PResult<()> {
        let (name, t) = self.expect_ident("an action name")?;
        self.expect(Tok::Colon)?;
        let (actor, _) = self.bundle_ref()?;
        self.expect_keyword("on")?;
        let (target, _) = self.bundle_ref()?;
        self.declare(&name, Named::Action, &t)?;
        let (ra, rt) = (self.rank(&actor), self.rank(&target));
        let mut block = ActionBlock {
            actor: actor.clone(),
            target: target.clone(),
            entries: BTreeMap::new(),
        };
        if self.eat(&Tok::Colon) {
            self.entries(|p| {
                let open = p.expect(Tok::LBracket)?;
                let i = p.expect_index(ra, &format!("actor {actor}"))?;
                p.expect(Tok::Comma)?;
                let a = p.expect_index(rt, &format!("target {target}"))?;
                p.expect(Tok::RBracket)?;
                p.expect(Tok::Eq)?;
                let v = p.section_expr(rt)?;
                if block.entries.insert((i, a), v).is_some() {
                    return Err(diag(
                        DiagClass::Referential,
                        &open,
                        format!("duplicate action entry [{},{}]", i + 1, a + 1),
                    ));
                }
                Ok(())
            })?;
        }
        self.doc.actions.insert(name, block);
        Ok(())
    }

    fn map_stmt(&mut self) -> PResult<()> {
        let (name, t) = self.expect_ident("a map name")?;
        self.expect(Tok::Colon)?;
        let (source, _) = self.bundle_ref()?;
        self.expect(Tok::Arrow)?;
        let (target, _) = self.bundle_ref()?;
        self.declare(&name, Named::Map, &t)?;
        let (rs, rt) = (self.rank(&source), self.rank(&target));
        let mut block = MapBlock {
            source: source.clone(),
            target,
            entries: BTreeMap::new(),
        };
        if self.eat(&Tok::Colon) {
            self.entries(|p| {
                let (i, kt) = p.basis_key(rs, &source.to_string())?;
                p.expect(Tok::Eq)?;
                let v = p.section_expr(rt)?;
                if block.entries.insert(i, v).is_some() {
                    return Err(diag(DiagClass::Referential, &kt, format!("duplicate map entry e{}", i + 1)));
                }
                Ok(())
            })?;
        }
        self.doc.maps.insert(name, block);
        Ok(())
    }

    fn form_stmt(&mut self) -> PResult<()> {
        let (name, t) = self.expect_ident("a form name")?;
        self.expect_keyword("on")?;
        let (bundle, _) = self.bundle_ref()?;
        self.declare(&name, Named::Form, &t)?;
        let r = self.rank(&bundle);
        let mut block = FormBlock {
            bundle: bundle.clone(),
            entries: BTreeMap::new(),
        };
        if self.eat(&Tok::Colon) {
            self.entries(|p| {
                let ((i, j), open) = p.pair_key(r, r, &bundle.to_string())?;
                p.expect(Tok::Eq)?;
                let v = p.scalar_expr()?;
                let key = (i.min(j), i.max(j));
                if block.entries.insert(key, v).is_some() {
                    return Err(diag(
                        DiagClass::Referential,
                        &open,
                        format!("duplicate form entry [{},{}] (forms are symmetric)", i + 1, j + 1),
                    ));
                }
                Ok(())
            })?;
        }
        self.doc.forms.insert(name, block);
        Ok(())
    }

    fn multivector_stmt(&mut self) -> PResult<()> {
        let (name, t) = self.expect_ident("a multivector name")?;
        self.expect_keyword("on")?;
        let (bundle, _) = self.bundle_ref()?;
        self.expect_keyword("degree")?;
        let (degree, dt) = self.expect_usize()?;
        self.declare(&name, Named::Multivector, &t)?;
        let r = self.rank(&bundle);
        if degree > r {
            return Err(diag(
                DiagClass::Dimensional,
                &dt,
                format!("degree {degree} exceeds rank {r} of {bundle}"),
            ));
        }
        let mut block = MultivectorBlock {
            bundle: bundle.clone(),
            degree,
            entries: BTreeMap::new(),
        };
        if self.eat(&Tok::Colon) {
            self.entries(|p| {
                let (idx, open) = p.index_list(r, &bundle.to_string())?;
                if idx.len() != degree {
                    return Err(diag(
                        DiagClass::Dimensional,
                        &open,
                        format!("expected {degree} indices, found {}", idx.len()),
                    ));
                }
                p.expect(Tok::Eq)?;
                let v = p.scalar_expr()?;
                let Some((sorted, sign)) = sort_with_sign(&idx) else {
                    return Err(diag(DiagClass::Dimensional, &open, "repeated index in multivector entry"));
                };
                let v = if sign < 0 { -v } else { v };
                if block.entries.insert(sorted, v).is_some() {
                    return Err(diag(DiagClass::Referential, &open, "duplicate multivector entry"));
                }
                Ok(())
            })?;
        }
        self.doc.multivectors.insert(name, block);
        Ok(())
    }

    fn structure_stmt(&mut self) -> PResult<()> {
        let (kw, kt) = self.expect_ident("a structure kind")?;
        let kind = StructureKind::from_keyword(&kw)
            .ok_or_else(|| diag(DiagClass::Syntactic, &kt, format!("unknown structure kind `{kw}`")))?;
        let (name, nt) = self.expect_ident("a structure name")?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LParen)?;
        let mut args: Vec<(Arg, Token)> = Vec::new();
        if !self.at(&Tok::RParen) {
            loop {
                let t = self.peek().clone();
                if self.at(&Tok::LBracket) {
                    self.next();
                    let mut idx = Vec::new();
                    if !self.at(&Tok::RBracket) {
                        loop {
                            let (v, it) = self.expect_usize()?;
                            if v == 0 {
                                return Err(diag(DiagClass::Dimensional, &it, "indices are 1-based"));
                            }
                            idx.push(v - 1);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBracket)?;
                    args.push((Arg::Indices(idx), t));
                } else {
                    let (n, _) = self.expect_ident("an argument name")?;
                    let dual = self.eat(&Tok::Star);
                    args.push((Arg::Name(BundleRef::new(&n, dual)), t));
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        let close = self.expect(Tok::RParen)?;
        self.validate_structure(kind, &args, &close)?;
        self.declare(&name, Named::Structure(kind), &nt)?;
        self.doc.structures.push(Structure {
            kind,
            name,
            args: args.into_iter().map(|(a, _)| a).collect(),
        });
        Ok(())
    }

    // ---- structure argument validation ----

    fn arg_name<'a>(&self, arg: &'a (Arg, Token)) -> PResult<&'a BundleRef> {
        match &arg.0 {
            Arg::Name(r) => Ok(r),
            Arg::Indices(_) => Err(diag(DiagClass::Syntactic, &arg.1, "expected a name, found an index list")),
        }
    }

    /// Resolves a bundle or algebroid-structure argument to its bundle.
    fn algebroid_arg(&self, arg: &(Arg, Token)) -> PResult<BundleRef> {
        let r = self.arg_name(arg)?;
        match self.names.get(&r.name) {
            Some(Named::Bundle) => Ok(r.clone()),
            Some(Named::Structure(StructureKind::Algebroid)) if !r.dual => {
                match &self.doc.structure(&r.name).unwrap().args[0] {
                    Arg::Name(b) => Ok(b.clone()),
                    Arg::Indices(_) => unreachable!("validated earlier"),
                }
            }
            Some(_) => Err(diag(
                DiagClass::Referential,
                &arg.1,
                format!("`{r}` is not a bundle or algebroid"),
            )),
            None => Err(diag(DiagClass::Referential, &arg.1, format!("undefined name `{}`", r.name))),
        }
    }

    fn named_arg(&self, arg: &(Arg, Token), want: Named, what: &str) -> PResult<String> {
        let r = self.arg_name(arg)?;
        match self.names.get(&r.name) {
            Some(k) if *k == want && !r.dual => Ok(r.name.clone()),
            Some(_) => Err(diag(DiagClass::Referential, &arg.1, format!("`{r}` is not {what}"))),
            None => Err(diag(DiagClass::Referential, &arg.1, format!("undefined name `{}`", r.name))),
        }
    }

    fn mismatch(&self, arg: &(Arg, Token), msg: String) -> Diagnostic {
        diag(DiagClass::Referential, &arg.1, msg)
    }

    /// Returns (theta, g) bundles of a crossed-module structure.
    fn cm_bundles(&self, name: &str) -> (BundleRef, BundleRef) {
        let s = self.doc.structure(name).unwrap();
        let m = match &s.args[1] {
            Arg::Name(r) => &self.doc.maps[&r.name],
            Arg::Indices(_) => unreachable!(),
        };
        (m.source.clone(), m.target.clone())
    }

    fn validate_structure(&self, kind: StructureKind, args: &[(Arg, Token)], close: &Token) -> PResult<()> {
        let arity = match kind {
            StructureKind::Algebroid => 1,
            StructureKind::CrossedModule | StructureKind::MatchedPair => 4,
            StructureKind::ManinTriple => 3,
            _ => 2,
        };
        if args.len() != arity {
            return Err(diag(
                DiagClass::Syntactic,
                close,
                format!("`{}` takes {arity} arguments, found {}", kind.keyword(), args.len()),
            ));
        }
        match kind {
            StructureKind::Algebroid => {
                self.algebroid_arg(&args[0])?;
            }
            StructureKind::CrossedModule => {
                let theta = self.algebroid_arg(&args[0])?;
                let phi = self.named_arg(&args[1], Named::Map, "a map")?;
                let g = self.algebroid_arg(&args[2])?;
                let act = self.named_arg(&args[3], Named::Action, "an action")?;
                let m = &self.doc.maps[&phi];
                if m.source != theta || m.target != g {
                    return Err(self.mismatch(
                        &args[1],
                        format!("map `{phi}` goes {} -> {}, expected {theta} -> {g}", m.source, m.target),
                    ));
                }
                let a = &self.doc.actions[&act];
                if a.actor != g || a.target != theta {
                    return Err(self.mismatch(
                        &args[3],
                        format!("action `{act}` is {} on {}, expected {g} on {theta}", a.actor, a.target),
                    ));
                }
            }
            StructureKind::MatchedPair => {
                let p = self.algebroid_arg(&args[0])?;
                let q = self.algebroid_arg(&args[1])?;
                for (k, (actor, target)) in [(2, (&p, &q)), (3, (&q, &p))] {
                    let n = self.named_arg(&args[k], Named::Action, "an action")?;
                    let a = &self.doc.actions[&n];
                    if &a.actor != actor || &a.target != target {
                        return Err(self.mismatch(
                            &args[k],
                            format!("action `{n}` is {} on {}, expected {actor} on {target}", a.actor, a.target),
                        ));
                    }
                }
            }
            StructureKind::Bialgebroid => {
                let a = self.algebroid_arg(&args[0])?;
                let b = self.algebroid_arg(&args[1])?;
                if b != a.dualized() {
                    return Err(self.mismatch(&args[1], format!("expected the dual bundle {}", a.dualized())));
                }
            }
            StructureKind::Bicrossed => {
                let c1 = self.named_arg(&args[0], Named::Structure(StructureKind::CrossedModule), "a crossed module")?;
                let c2 = self.named_arg(&args[1], Named::Structure(StructureKind::CrossedModule), "a crossed module")?;
                let (t1, g1) = self.cm_bundles(&c1);
                let (t2, g2) = self.cm_bundles(&c2);
                if t2 != g1.dualized() || g2 != t1.dualized() {
                    return Err(self.mismatch(
                        &args[1],
                        format!("dual crossed module must map {} -> {}, found {t2} -> {g2}", g1.dualized(), t1.dualized()),
                    ));
                }
            }
            StructureKind::Coquadratic | StructureKind::Courant => {
                let k = self.algebroid_arg(&args[0])?;
                let c = self.named_arg(&args[1], Named::Form, "a form")?;
                let want = if kind == StructureKind::Coquadratic { k.dualized() } else { k };
                let got = &self.doc.forms[&c].bundle;
                if *got != want {
                    return Err(self.mismatch(&args[1], format!("form `{c}` is on {got}, expected {want}")));
                }
            }
            StructureKind::ManinTriple => {
                let c = self.named_arg(&args[0], Named::Structure(StructureKind::Coquadratic), "a coquadratic algebroid")?;
                let s = self.doc.structure(&c).unwrap();
                let k = self.algebroid_arg(&(s.args[0].clone(), args[0].1.clone()))?;
                let rank = self.rank(&k);
                for a in &args[1..] {
                    match &a.0 {
                        Arg::Indices(v) => {
                            if let Some(bad) = v.iter().find(|&&i| i >= rank) {
                                return Err(diag(
                                    DiagClass::Dimensional,
                                    &a.1,
                                    format!("index {} out of range for {k} (rank {rank})", bad + 1),
                                ));
                            }
                            if sort_with_sign(v).is_none() {
                                return Err(diag(DiagClass::Dimensional, &a.1, "repeated index"));
                            }
                        }
                        Arg::Name(_) => {
                            return Err(diag(DiagClass::Syntactic, &a.1, "expected an index list"));
                        }
                    }
                }
            }
            StructureKind::RMatrix => {
                let c = self.named_arg(&args[0], Named::Structure(StructureKind::CrossedModule), "a crossed module")?;
                let r = self.named_arg(&args[1], Named::Multivector, "a multivector")?;
                let (theta, _) = self.cm_bundles(&c);
                let mv = &self.doc.multivectors[&r];
                if mv.bundle != theta || mv.degree != 2 {
                    return Err(self.mismatch(&args[1], format!("r-matrix must be a bivector on {theta}")));
                }
            }
            StructureKind::InvariantH => {
                let mp = self.named_arg(&args[0], Named::Structure(StructureKind::MatchedPair), "a matched pair")?;
                let h = self.named_arg(&args[1], Named::Map, "a map")?;
                let s = self.doc.structure(&mp).unwrap().clone();
                let tok = args[0].1.clone();
                let p = self.algebroid_arg(&(s.args[0].clone(), tok.clone()))?;
                let q = self.algebroid_arg(&(s.args[1].clone(), tok))?;
                let m = &self.doc.maps[&h];
                if m.source != q.dualized() || m.target != p {
                    return Err(self.mismatch(
                        &args[1],
                        format!("map `{h}` must go {} -> {p}", q.dualized()),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn parse_document(text: &str) -> PResult<Document> {
    let mut p = Parser::new(text, Base::point())?;
    while !p.at(&Tok::Eof) {
        p.statement()?;
    }
    Ok(p.doc)
}

pub fn parse_poly(text: &str, base: &Base) -> PResult<Poly> {
    let mut p = Parser::new(text, base.clone())?;
    let v = p.scalar_expr()?;
    p.expect(Tok::Eof)?;
    Ok(v)
}
