use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Parsed, Span};
use crate::constructions::MorseTrace;
use crate::descriptor::{Assertion, AxisFiber, ComponentId, FoldEvent, RoundFoldDescriptor, Triviality};
use crate::expr::{ManifoldExpr, NamedManifold, Twist};

type PResult<T> = Result<T, Diagnostic>;

pub(crate) struct SpannedFile {
    pub value: Parsed,
    pub header: Span,
    pub event_spans: Vec<Span>,
}

const DESCRIPTOR_FIELDS: &str = "m, n, trivial, axis, twist, half, assert, events";
const TRACE_FIELDS: &str = "boundary, events, label";

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

pub(crate) fn parse_file(text: &str) -> PResult<SpannedFile> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let header = p.span();
    let kw = p.ident().map_err(|d| d.with_hint("a file starts with `roundfold`, `trace` or `manifold`"))?;
    let (value, event_spans) = match kw.as_str() {
        "roundfold" => {
            let (d, spans) = p.descriptor_block()?;
            (Parsed::Descriptor(d), spans)
        }
        "trace" => {
            let (t, spans) = p.trace_block()?;
            (Parsed::Trace(t), spans)
        }
        "manifold" => {
            let e = p.expr()?;
            p.eat(";");
            (Parsed::Manifold(e), Vec::new())
        }
        other => {
            return Err(Diagnostic::error(header, format!("unknown header `{other}`"))
                .with_hint("expected `roundfold`, `trace` or `manifold`"))
        }
    };
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(SpannedFile { value, header, event_spans })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::error(self.span(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a string")),
        }
    }

    fn id(&mut self) -> PResult<ComponentId> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a component id")),
        }
    }

    fn int(&mut self) -> PResult<i128> {
        let neg = self.eat("-");
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn ranged<T: TryFrom<i128>>(&mut self, what: &str) -> PResult<T> {
        let span = self.span();
        let v = self.int()?;
        T::try_from(v).map_err(|_| Diagnostic::error(span, format!("{what} {v} is out of range")))
    }

    fn twist(&mut self) -> PResult<Twist> {
        if self.is_kw("trivial") {
            self.bump();
            return Ok(Twist::Trivial);
        }
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(Twist::Label(s))
            }
            _ => Err(self.unexpected("a label string or `trivial`")),
        }
    }

    fn list<T>(&mut self, open: &str, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(open)?;
        let mut out = Vec::new();
        while !self.is_punct(close) {
            out.push(item(self)?);
            if !self.eat(",") {
                break;
            }
        }
        self.expect(close)?;
        Ok(out)
    }

    pub(crate) fn expr(&mut self) -> PResult<ManifoldExpr> {
        let first = self.term()?;
        if !self.is_punct("*") {
            return Ok(first);
        }
        let mut factors = vec![first];
        while self.eat("*") {
            factors.push(self.term()?);
        }
        Ok(ManifoldExpr::Product(factors))
    }

    fn term(&mut self) -> PResult<ManifoldExpr> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let span = self.span();
        let head = self.ident().map_err(|d| d.with_hint("expressions start with S, Sigma, Theta, bundle, csum, prod, named or `(`"))?;
        match head.as_str() {
            "S" => {
                self.expect("(")?;
                let d = self.ranged("dimension")?;
                self.expect(")")?;
                Ok(ManifoldExpr::StandardSphere(d))
            }
            "Sigma" | "Theta" => {
                self.expect("(")?;
                let dim = self.ranged("dimension")?;
                self.expect(",")?;
                let t = self.twist()?;
                self.expect(")")?;
                Ok(if head == "Sigma" {
                    ManifoldExpr::AlmostSphere { dim, twist: t }
                } else {
                    ManifoldExpr::HomotopySphere { dim, theta: t }
                })
            }
            "bundle" => {
                self.expect("(")?;
                let fiber = self.expr()?;
                self.keyword("over")?;
                let base = self.ranged("base dimension")?;
                let twist = if self.eat(",") {
                    self.keyword("twist")?;
                    self.twist()?
                } else {
                    Twist::Trivial
                };
                self.expect(")")?;
                Ok(ManifoldExpr::bundle(fiber, base, twist))
            }
            "csum" => Ok(ManifoldExpr::ConnectedSum(self.list("(", ")", Self::expr)?)),
            "prod" => Ok(ManifoldExpr::Product(self.list("(", ")", Self::expr)?)),
            "named" => self.named(),
            other => Err(Diagnostic::error(span, format!("unknown expression `{other}`"))
                .with_hint("expected S, Sigma, Theta, bundle, csum, prod or named")),
        }
    }

    fn named(&mut self) -> PResult<ManifoldExpr> {
        self.expect("(")?;
        let name = self.string()?;
        let mut n = NamedManifold::new(name, 0);
        let mut dim = None;
        let mut seen = BTreeSet::new();
        while self.eat(",") {
            let span = self.span();
            let key = self.ident()?;
            if !seen.insert(key.clone()) {
                return Err(Diagnostic::error(span, format!("duplicate field `{key}`")));
            }
            self.expect("=")?;
            match key.as_str() {
                "dim" => dim = Some(self.ranged("dimension")?),
                "euler" => n.euler = Some(self.ranged("Euler characteristic")?),
                "conn" => n.connectivity = self.ranged("connectivity")?,
                "ranks" => n.ranks = Some(self.list("[", "]", |p| p.ranged("rank"))?),
                "torsion" => n.torsion = self.list("[", "]", |p| p.ranged("degree"))?,
                other => {
                    return Err(Diagnostic::error(span, format!("unknown field `{other}` in named"))
                        .with_hint("fields are dim, euler, conn, ranks, torsion"))
                }
            }
        }
        let close = self.span();
        self.expect(")")?;
        n.dim = dim.ok_or_else(|| Diagnostic::error(close, "named manifold needs `dim`"))?;
        Ok(ManifoldExpr::Named(n))
    }

    fn component(&mut self) -> PResult<(ComponentId, ManifoldExpr)> {
        let id = self.id()?;
        self.expect(":")?;
        Ok((id, self.expr()?))
    }

    fn event(&mut self) -> PResult<FoldEvent> {
        let span = self.span();
        let kind = self.ident()?;
        self.expect("(")?;
        let e = match kind.as_str() {
            "birth" => {
                let (id, fiber) = self.component()?;
                FoldEvent::Birth { id, fiber }
            }
            "death" => FoldEvent::Death { id: self.id()? },
            "split" => {
                let from = self.id()?;
                self.expect("->")?;
                let left = self.component()?;
                self.expect(",")?;
                let right = self.component()?;
                let twist = if self.eat(",") {
                    self.keyword("twist")?;
                    Some(self.twist()?)
                } else {
                    None
                };
                FoldEvent::Split { from, left, right, twist }
            }
            "merge" => {
                let left = self.id()?;
                self.expect(",")?;
                let right = self.id()?;
                self.expect("->")?;
                FoldEvent::Merge { left, right, into: self.component()? }
            }
            "generic" => {
                self.keyword("i")?;
                self.expect("=")?;
                let index = self.ranged("index")?;
                self.expect(",")?;
                let id = self.id()?;
                self.expect(":")?;
                let before = self.expr()?;
                self.expect("->")?;
                let after = self.expr()?;
                self.expect(",")?;
                self.keyword("chi_sing")?;
                self.expect("=")?;
                let chi_sing = self.ranged("chi_sing")?;
                FoldEvent::Generic { index, id, before, after, chi_sing }
            }
            other => {
                return Err(Diagnostic::error(span, format!("unknown event `{other}`"))
                    .with_hint("events are birth, death, split, merge, generic"))
            }
        };
        self.expect(")")?;
        Ok(e)
    }

    fn events(&mut self) -> PResult<(Vec<FoldEvent>, Vec<Span>)> {
        let mut spans = Vec::new();
        let events = self.list("[", "]", |p| {
            spans.push(p.span());
            p.event()
        })?;
        Ok((events, spans))
    }

    fn axis(&mut self) -> PResult<AxisFiber> {
        let span = self.span();
        let kind = self.ident()?;
        self.expect("(")?;
        let a = match kind.as_str() {
            "cylinder" => AxisFiber::Cylinder(self.expr()?),
            "punctured" => {
                let e = self.expr()?;
                self.expect(",")?;
                AxisFiber::PuncturedCylinder(e, self.ranged("hole count")?)
            }
            "named_boundary" => {
                let name = self.string()?;
                self.expect(",")?;
                let boundary = self.list("[", "]", Self::expr)?;
                let props = if self.eat(",") {
                    self.keyword("props")?;
                    self.expect("=")?;
                    self.list("[", "]", |p| match p.peek().clone() {
                        Tok::Str(s) | Tok::Ident(s) => {
                            p.bump();
                            Ok(s)
                        }
                        _ => Err(p.unexpected("a property name")),
                    })?
                } else {
                    Vec::new()
                };
                AxisFiber::NamedWithBoundary { name, boundary, props }
            }
            other => {
                return Err(Diagnostic::error(span, format!("unknown axis fiber `{other}`"))
                    .with_hint("expected cylinder, punctured or named_boundary"))
            }
        };
        self.expect(")")?;
        Ok(a)
    }

    /// Reads `{ key = value; ... }`, dispatching each value to `field`.
    fn block(&mut self, fields: &str, mut field: impl FnMut(&mut Self, &str, Span) -> PResult<bool>) -> PResult<Span> {
        let open = self.span();
        self.expect("{")?;
        let mut seen = BTreeSet::new();
        while !self.is_punct("}") {
            let span = self.span();
            let key = self.ident()?;
            if !seen.insert(key.clone()) {
                return Err(Diagnostic::error(span, format!("duplicate field `{key}`")));
            }
            self.expect("=")?;
            if !field(self, &key, span)? {
                return Err(Diagnostic::error(span, format!("unknown field `{key}`")).with_hint(format!("fields are {fields}")));
            }
            if !self.eat(";") {
                break;
            }
        }
        self.expect("}")?;
        Ok(open)
    }

    fn descriptor_block(&mut self) -> PResult<(RoundFoldDescriptor, Vec<Span>)> {
        let (mut m, mut n, mut events, mut spans) = (None, None, None, Vec::new());
        let mut triviality = Triviality::Absent;
        let (mut axis, mut twist, mut half, mut assertions) = (None, Twist::Trivial, None, BTreeSet::new());
        let open = self.block(DESCRIPTOR_FIELDS, |p, key, _| {
            match key {
                "m" => m = Some(p.ranged::<u32>("m")?),
                "n" => n = Some(p.ranged::<u32>("n")?),
                "trivial" => {
                    let span = p.span();
                    let kw = p.ident()?;
                    triviality = Triviality::from_keyword(&kw).ok_or_else(|| {
                        Diagnostic::error(span, format!("unknown triviality `{kw}`")).with_hint("expected none, top, pl or smooth")
                    })?;
                }
                "axis" => axis = Some(p.axis()?),
                "twist" => twist = p.twist()?,
                "half" => {
                    let span = p.span();
                    half = Some(match p.ident()?.as_str() {
                        "true" => true,
                        "false" => false,
                        other => return Err(Diagnostic::error(span, format!("expected true or false, found `{other}`"))),
                    });
                }
                "assert" => {
                    assertions = p
                        .list("[", "]", |p| {
                            let span = p.span();
                            let kw = p.ident()?;
                            Assertion::from_keyword(&kw).ok_or_else(|| {
                                Diagnostic::error(span, format!("unknown assertion `{kw}`"))
                                    .with_hint("expected null_homotopic or restriction_trivial")
                            })
                        })?
                        .into_iter()
                        .collect();
                }
                "events" => {
                    let (e, s) = p.events()?;
                    events = Some(e);
                    spans = s;
                }
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let missing = |what: &str| Diagnostic::error(open, format!("roundfold block is missing `{what}`"));
        let (m, n) = (m.ok_or_else(|| missing("m"))?, n.ok_or_else(|| missing("n"))?);
        let mut d = RoundFoldDescriptor::new(m, n, events.ok_or_else(|| missing("events"))?);
        d.triviality = triviality;
        d.axis = axis;
        d.twist = twist;
        d.half_trace = half.unwrap_or(n == 1);
        d.assertions = assertions;
        Ok((d, spans))
    }

    fn trace_block(&mut self) -> PResult<(MorseTrace, Vec<Span>)> {
        let (mut boundary, mut events, mut spans, mut label) = (Vec::new(), None, Vec::new(), None);
        let open = self.block(TRACE_FIELDS, |p, key, _| {
            match key {
                "boundary" => boundary = p.list("[", "]", Self::component)?,
                "events" => {
                    let (e, s) = p.events()?;
                    events = Some(e);
                    spans = s;
                }
                "label" => label = Some(p.axis()?),
                _ => return Ok(false),
            }
            Ok(true)
        })?;
        let events = events.ok_or_else(|| Diagnostic::error(open, "trace block is missing `events`"))?;
        Ok((MorseTrace { boundary, events, label }, spans))
    }
}
