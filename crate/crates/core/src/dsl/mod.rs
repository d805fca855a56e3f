//! Text format for descriptors, Morse traces and manifold expressions.
//!
//! ```text
//! roundfold {
//!   m = 7; n = 4; trivial = smooth;
//!   events = [ birth(c1 : S(3)), split(c1 -> c2 : S(3), c3 : S(3)) ];
//! }
//! ```

mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;

use crate::constructions::MorseTrace;
use crate::descriptor::{AxisFiber, FoldEvent, RoundFoldDescriptor};
use crate::error::Error;
use crate::expr::{ManifoldExpr, Twist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), span, hint: None }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.span.line, self.span.col, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Descriptor(RoundFoldDescriptor),
    Trace(MorseTrace),
    Manifold(ManifoldExpr),
}

impl Parsed {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Parsed::Descriptor(_) => "roundfold",
            Parsed::Trace(_) => "trace",
            Parsed::Manifold(_) => "manifold",
        }
    }
}

/// Parses without semantic checks.
pub fn parse_syntax(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    parser::parse_file(text).map(|s| s.value).map_err(|d| vec![d])
}

/// Parses and checks: descriptors are validated, traces replayed, and
/// expressions checked for dimension clashes.
pub fn parse(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let file = parser::parse_file(text).map_err(|d| vec![d])?;
    let at = |event: Option<usize>| event.and_then(|k| file.event_spans.get(k).copied()).unwrap_or(file.header);
    let diagnostics: Vec<Diagnostic> = match &file.value {
        Parsed::Descriptor(d) => d.validate().violations.iter().map(|v| Diagnostic::error(at(v.event), &v.message)).collect(),
        Parsed::Trace(t) => match t.levels() {
            Ok(_) => Vec::new(),
            Err(Error::Validation(vs)) => vs.iter().map(|v| Diagnostic::error(at(v.event), &v.message)).collect(),
            Err(e) => vec![Diagnostic::error(file.header, e.to_string())],
        },
        Parsed::Manifold(e) => match e.check() {
            Ok(()) => Vec::new(),
            Err(err) => vec![Diagnostic::error(file.header, err.to_string())],
        },
    };
    if diagnostics.is_empty() {
        Ok(file.value)
    } else {
        Err(diagnostics)
    }
}

/// Parses a bare expression, as accepted after the `manifold` header.
pub fn parse_expr(text: &str) -> Result<ManifoldExpr, Vec<Diagnostic>> {
    match parse(&format!("manifold {text}")) {
        Ok(Parsed::Manifold(e)) => Ok(e),
        Ok(_) => unreachable!("manifold header yields an expression"),
        Err(mut ds) => {
            for d in &mut ds {
                if d.span.line == 1 {
                    d.span.col = d.span.col.saturating_sub("manifold ".len()).max(1);
                }
            }
            Err(ds)
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn print_id(id: &str) -> String {
    if is_ident(id) {
        id.to_string()
    } else {
        quote(id)
    }
}

fn print_twist(t: &Twist) -> String {
    match t {
        Twist::Trivial => "trivial".into(),
        Twist::Label(s) => quote(s),
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

pub fn print_expr(e: &ManifoldExpr) -> String {
    match e {
        ManifoldExpr::StandardSphere(d) => format!("S({d})"),
        ManifoldExpr::AlmostSphere { dim, twist } => format!("Sigma({dim}, {})", print_twist(twist)),
        ManifoldExpr::HomotopySphere { dim, theta } => format!("Theta({dim}, {})", print_twist(theta)),
        ManifoldExpr::Product(fs) if fs.len() >= 2 => fs
            .iter()
            .map(|f| match f {
                ManifoldExpr::Product(inner) if inner.len() >= 2 => format!("({})", print_expr(f)),
                _ => print_expr(f),
            })
            .collect::<Vec<_>>()
            .join(" * "),
        ManifoldExpr::Product(fs) => format!("prod({})", join(fs, print_expr)),
        ManifoldExpr::BundleTotal { fiber, base, twist } => match twist {
            Twist::Trivial => format!("bundle({} over {base})", print_expr(fiber)),
            t => format!("bundle({} over {base}, twist {})", print_expr(fiber), print_twist(t)),
        },
        ManifoldExpr::ConnectedSum(ss) => format!("csum({})", join(ss, print_expr)),
        ManifoldExpr::Named(n) => {
            let mut s = format!("named({}, dim={}", quote(&n.name), n.dim);
            if let Some(e) = n.euler {
                s.push_str(&format!(", euler={e}"));
            }
            if n.connectivity != 0 {
                s.push_str(&format!(", conn={}", n.connectivity));
            }
            if let Some(r) = &n.ranks {
                s.push_str(&format!(", ranks=[{}]", join(r, u64::to_string)));
            }
            if !n.torsion.is_empty() {
                s.push_str(&format!(", torsion=[{}]", join(&n.torsion, u32::to_string)));
            }
            s.push(')');
            s
        }
    }
}

pub fn print_event(e: &FoldEvent) -> String {
    let comp = |(id, x): &(String, ManifoldExpr)| format!("{} : {}", print_id(id), print_expr(x));
    match e {
        FoldEvent::Birth { id, fiber } => format!("birth({} : {})", print_id(id), print_expr(fiber)),
        FoldEvent::Death { id } => format!("death({})", print_id(id)),
        FoldEvent::Split { from, left, right, twist } => {
            let marker = twist.as_ref().map_or(String::new(), |t| format!(", twist {}", print_twist(t)));
            format!("split({} -> {}, {}{marker})", print_id(from), comp(left), comp(right))
        }
        FoldEvent::Merge { left, right, into } => {
            format!("merge({}, {} -> {})", print_id(left), print_id(right), comp(into))
        }
        FoldEvent::Generic { index, id, before, after, chi_sing } => format!(
            "generic(i={index}, {} : {} -> {}, chi_sing={chi_sing})",
            print_id(id),
            print_expr(before),
            print_expr(after)
        ),
    }
}

pub fn print_axis(a: &AxisFiber) -> String {
    match a {
        AxisFiber::Cylinder(e) => format!("cylinder({})", print_expr(e)),
        AxisFiber::PuncturedCylinder(e, h) => format!("punctured({}, {h})", print_expr(e)),
        AxisFiber::NamedWithBoundary { name, boundary, props } => {
            let mut s = format!("named_boundary({}, [{}]", quote(name), join(boundary, print_expr));
            if !props.is_empty() {
                s.push_str(&format!(", props=[{}]", join(props, |p| quote(p))));
            }
            s.push(')');
            s
        }
    }
}

fn print_events(out: &mut String, events: &[FoldEvent]) {
    if events.is_empty() {
        out.push_str("  events = [];\n");
        return;
    }
    out.push_str("  events = [\n");
    for (k, e) in events.iter().enumerate() {
        let sep = if k + 1 < events.len() { "," } else { "" };
        out.push_str(&format!("    {}{sep}\n", print_event(e)));
    }
    out.push_str("  ];\n");
}

pub fn print_descriptor(d: &RoundFoldDescriptor) -> String {
    let mut out = String::from("roundfold {\n");
    out.push_str(&format!("  m = {};\n  n = {};\n", d.m, d.n));
    out.push_str(&format!("  trivial = {};\n", d.triviality.keyword()));
    if let Some(a) = &d.axis {
        out.push_str(&format!("  axis = {};\n", print_axis(a)));
    }
    if !d.twist.is_trivial() {
        out.push_str(&format!("  twist = {};\n", print_twist(&d.twist)));
    }
    if d.half_trace != (d.n == 1) {
        out.push_str(&format!("  half = {};\n", d.half_trace));
    }
    if !d.assertions.is_empty() {
        let a: Vec<&str> = d.assertions.iter().map(|a| a.keyword()).collect();
        out.push_str(&format!("  assert = [{}];\n", a.join(", ")));
    }
    print_events(&mut out, &d.events);
    out.push_str("}\n");
    out
}

pub fn print_trace(t: &MorseTrace) -> String {
    let mut out = String::from("trace {\n");
    let boundary = join(&t.boundary, |(id, e)| format!("{} : {}", print_id(id), print_expr(e)));
    out.push_str(&format!("  boundary = [{boundary}];\n"));
    print_events(&mut out, &t.events);
    if let Some(a) = &t.label {
        out.push_str(&format!("  label = {};\n", print_axis(a)));
    }
    out.push_str("}\n");
    out
}

pub fn print(p: &Parsed) -> String {
    match p {
        Parsed::Descriptor(d) => print_descriptor(d),
        Parsed::Trace(t) => print_trace(t),
        Parsed::Manifold(e) => format!("manifold {}\n", print_expr(e)),
    }
}
