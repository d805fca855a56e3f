//! Command surface of `rfm`. Exit codes: 0 success, 1 diagnostics, 2 usage.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rfm_core::classify::{ClassificationResult, Dim5Input};
use rfm_core::dsl::{self, Diagnostic, Parsed, Span};
use rfm_core::presets::{self, Preset};
use rfm_core::report::{self, Report};
use rfm_core::surgery::NullHomotopy;
use rfm_core::{
    build_reeb, classify, combine, decompose, dim5_recognizer, euler_characteristic, prop1_report, synthesize,
    trivial_spinning, HomologyProfile, MorseTrace, RoundFoldDescriptor,
};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "rfm", version, about = "Round fold map calculus")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a descriptor, trace or expression file.
    Validate { file: String },
    /// Reeb complex of a descriptor.
    Reeb {
        file: String,
        /// Write the component forest as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Integral homology of the Reeb space.
    Homology { file: String },
    /// Euler characteristic of the source manifold.
    Euler { file: String },
    /// Rank law and simple connectivity for sphere-fiber descriptors.
    Prop1 { file: String },
    /// Identify the source manifold.
    Classify { file: String },
    /// Build a descriptor realizing a manifold expression.
    Synthesize {
        expr: String,
        #[arg(long)]
        n: Option<u32>,
    },
    /// Glue B into A at a proper-core sphere of A.
    Combine {
        a: String,
        b: String,
        #[arg(long)]
        component: String,
        #[arg(long)]
        assume_null_homotopic: bool,
    },
    /// Split off the inward subtree of a standard-sphere component.
    Decompose {
        file: String,
        #[arg(long)]
        region: usize,
        #[arg(long)]
        component: String,
        #[arg(long)]
        assume_null_homotopic: bool,
    },
    /// Spin a Morse trace around S^{n-1}.
    Spin {
        trace: String,
        #[arg(long)]
        n: u32,
    },
    /// Decide round fold maps into the plane for a 5-manifold (expression or file).
    Dim5 { input: String },
    /// Print a preset as an .rfm file.
    Preset { name: String },
    /// List preset families and files on RFM_PRESET_PATH.
    ListPresets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Reeb { .. } => "reeb",
            Command::Homology { .. } => "homology",
            Command::Euler { .. } => "euler",
            Command::Prop1 { .. } => "prop1",
            Command::Classify { .. } => "classify",
            Command::Synthesize { .. } => "synthesize",
            Command::Combine { .. } => "combine",
            Command::Decompose { .. } => "decompose",
            Command::Spin { .. } => "spin",
            Command::Dim5 { .. } => "dim5",
            Command::Preset { .. } => "preset",
            Command::ListPresets => "list-presets",
        }
    }
}

const START: Span = Span { line: 1, col: 1 };

/// Failure carrying diagnostics, tagged with the input they refer to.
struct Failure {
    source: String,
    diagnostics: Vec<Diagnostic>,
}

impl Failure {
    fn lib(source: &str, e: rfm_core::Error) -> Self {
        Failure { source: source.to_string(), diagnostics: vec![Diagnostic::error(START, e.to_string())] }
    }
}

type Outcome = Result<(String, Value), Failure>;

/// Reads `preset:NAME` from the catalog, anything else from disk.
fn load(source: &str) -> Result<Parsed, Failure> {
    if let Some(name) = source.strip_prefix("preset:") {
        return presets::preset(name).map(|p| Parsed::Descriptor(p.descriptor)).map_err(|e| Failure::lib(source, e));
    }
    let text = std::fs::read_to_string(source).map_err(|e| Failure {
        source: source.to_string(),
        diagnostics: vec![Diagnostic::error(START, format!("cannot read file: {e}"))],
    })?;
    dsl::parse(&text).map_err(|diagnostics| Failure { source: source.to_string(), diagnostics })
}

fn load_descriptor(source: &str) -> Result<RoundFoldDescriptor, Failure> {
    match load(source)? {
        Parsed::Descriptor(d) => Ok(d),
        other => Err(Failure {
            source: source.to_string(),
            diagnostics: vec![Diagnostic::error(START, format!("expected a roundfold block, found {}", other.kind_name()))],
        }),
    }
}

fn load_trace(source: &str) -> Result<MorseTrace, Failure> {
    match load(source)? {
        Parsed::Trace(t) => Ok(t),
        other => Err(Failure {
            source: source.to_string(),
            diagnostics: vec![Diagnostic::error(START, format!("expected a trace block, found {}", other.kind_name()))],
        }),
    }
}

fn group_text(profile: &HomologyProfile) -> String {
    profile
        .groups
        .iter()
        .map(|g| {
            let mut parts = Vec::new();
            match g.rank {
                0 => {}
                1 => parts.push("Z".to_string()),
                r => parts.push(format!("Z^{r}")),
            }
            parts.extend(g.torsion.iter().map(|t| format!("Z/{t}")));
            let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
            format!("H_{} = {body}\n", g.degree)
        })
        .collect()
}

fn classification_text(r: &ClassificationResult) -> String {
    let mut out = String::new();
    match (&r.manifold, r.confidence) {
        (Some(m), Some(c)) => out.push_str(&format!("{m}\nup to {}\n", json!(c).as_str().unwrap_or_default())),
        _ => {
            out.push_str("unclassified\n");
            for f in &r.nearest_failures {
                out.push_str(&format!("  failed {}: {}\n", f.name, f.detail));
            }
        }
    }
    for step in &r.chain {
        let site = step.site.as_ref().map_or(String::new(), |s| format!(" at {s}"));
        out.push_str(&format!("  {}{site}: {}\n", step.rule, step.citation));
    }
    for n in &r.notes {
        if n != "unclassified" {
            out.push_str(&format!("  note: {n}\n"));
        }
    }
    out
}

fn descriptor_value(d: &RoundFoldDescriptor) -> Value {
    let mut v = report::descriptor_json(d);
    v["text"] = json!(dsl::print_descriptor(d));
    v
}

fn null_homotopy_text(n: &NullHomotopy) -> String {
    match n {
        NullHomotopy::Derived(why) => format!("null-homotopy derived: {why}"),
        NullHomotopy::Assumed => "null-homotopy assumed by the caller".to_string(),
    }
}

fn execute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Validate { file } => match load(file)? {
            Parsed::Descriptor(d) => {
                let fibers = d.regular_fibers().map_err(|e| Failure::lib(file, e))?;
                let mut text = format!("ok: roundfold m = {}, n = {}, l = {}\n", d.m, d.n, d.l());
                for (r, f) in fibers.iter().enumerate() {
                    let comps: Vec<String> = f.iter().map(|(id, e)| format!("{id}: {e}")).collect();
                    text.push_str(&format!("  region {r}: [{}]\n", comps.join(", ")));
                }
                Ok((text, json!({ "kind": "roundfold", "fibers": report::fibers_json(&fibers), "l": d.l() })))
            }
            Parsed::Trace(t) => {
                let levels = t.levels().map_err(|e| Failure::lib(file, e))?;
                Ok((
                    format!("ok: trace with {} critical levels\n", t.events.len()),
                    json!({ "kind": "trace", "levels": report::fibers_json(&levels) }),
                ))
            }
            Parsed::Manifold(e) => {
                let norm = e.normalize().map_err(|err| Failure::lib(file, err))?;
                Ok((format!("ok: {norm}\n"), json!({ "kind": "manifold", "normalized": norm })))
            }
        },
        Command::Reeb { file, dot } => {
            let d = load_descriptor(file)?;
            let w = build_reeb(&d).map_err(|e| Failure::lib(file, e))?;
            let forest = &w.forest;
            if let Some(path) = dot {
                std::fs::write(path, report::forest_dot(forest, &d)).map_err(|e| Failure {
                    source: path.display().to_string(),
                    diagnostics: vec![Diagnostic::error(START, format!("cannot write DOT file: {e}"))],
                })?;
            }
            let cells = w.complex.cell_counts().to_vec();
            let text = format!(
                "cells by degree: {cells:?}\nforest: {} nodes, {} edges, {} component(s), {} cycle(s)\ncapped leaves: {}, free leaves: {}\n",
                forest.nodes.len(),
                forest.edges.len(),
                forest.component_count(),
                forest.cycle_count(),
                forest.capped_leaves().len(),
                forest.free_leaves().len()
            );
            Ok((
                text,
                json!({
                    "cells": cells,
                    "forest": forest,
                    "capped_leaves": forest.capped_leaves().len(),
                    "free_leaves": forest.free_leaves().len(),
                    "cycle_count": forest.cycle_count(),
                }),
            ))
        }
        Command::Homology { file } => {
            let d = load_descriptor(file)?;
            let h = build_reeb(&d).and_then(|w| w.homology()).map_err(|e| Failure::lib(file, e))?;
            Ok((group_text(&h), json!(h)))
        }
        Command::Euler { file } => {
            let chi = match load(file)? {
                Parsed::Descriptor(d) => euler_characteristic(&d),
                Parsed::Manifold(e) => e.euler(),
                Parsed::Trace(_) => Err(rfm_core::Error::Argument("a trace has no closed source manifold".into())),
            }
            .map_err(|e| Failure::lib(file, e))?;
            Ok((format!("{chi}\n"), json!(chi)))
        }
        Command::Prop1 { file } => {
            let d = load_descriptor(file)?;
            let r = prop1_report(&d).map_err(|e| Failure::lib(file, e))?;
            let mut text = format!("H_{} of the Reeb space: Z^{}\n", r.h_n.degree, r.h_n.rank);
            if let Some(s) = &r.source_h_n {
                text.push_str(&format!("H_{} of the source: Z^{}\n", s.degree, s.rank));
            }
            text.push_str(&format!("simply connected: {}\n", r.simply_connected));
            for h in &r.homotopy {
                text.push_str(&format!("  {h}\n"));
            }
            Ok((text, json!(r)))
        }
        Command::Classify { file } => {
            let d = load_descriptor(file)?;
            let r = classify(&d);
            Ok((classification_text(&r), json!(r)))
        }
        Command::Synthesize { expr, n } => {
            let e = dsl::parse_expr(expr).map_err(|diagnostics| Failure { source: expr.clone(), diagnostics })?;
            let d = synthesize(&e, *n).map_err(|err| Failure::lib(expr, err))?;
            Ok((dsl::print_descriptor(&d), descriptor_value(&d)))
        }
        Command::Combine { a, b, component, assume_null_homotopic } => {
            let (f1, f2) = (load_descriptor(a)?, load_descriptor(b)?);
            let c = combine(&f1, component, &f2, *assume_null_homotopic).map_err(|e| Failure::lib(a, e))?;
            let r = classify(&c.descriptor);
            let mut text = dsl::print_descriptor(&c.descriptor);
            text.push_str(&format!("# {}\n", null_homotopy_text(&c.null_homotopy)));
            if let Some(m) = &r.manifold {
                text.push_str(&format!("# source: {m}\n"));
            }
            Ok((
                text,
                json!({
                    "descriptor": descriptor_value(&c.descriptor),
                    "site": c.site,
                    "renamed": c.renamed,
                    "null_homotopy": c.null_homotopy,
                    "classification": r,
                }),
            ))
        }
        Command::Decompose { file, region, component, assume_null_homotopic } => {
            let f = load_descriptor(file)?;
            let parts = decompose(&f, *region, component, *assume_null_homotopic).map_err(|e| Failure::lib(file, e))?;
            let text = format!(
                "# outer\n{}# inner\n{}# {}\n",
                dsl::print_descriptor(&parts.outer),
                dsl::print_descriptor(&parts.inner),
                null_homotopy_text(&parts.null_homotopy)
            );
            Ok((
                text,
                json!({
                    "outer": descriptor_value(&parts.outer),
                    "inner": descriptor_value(&parts.inner),
                    "null_homotopy": parts.null_homotopy,
                }),
            ))
        }
        Command::Spin { trace, n } => {
            let t = load_trace(trace)?;
            let d = trivial_spinning(&t, *n).map_err(|e| Failure::lib(trace, e))?;
            Ok((dsl::print_descriptor(&d), descriptor_value(&d)))
        }
        Command::Dim5 { input } => {
            let from_file = std::path::Path::new(input).is_file() || input.starts_with("preset:");
            let verdict = if from_file {
                match load(input)? {
                    Parsed::Descriptor(d) => dim5_recognizer(Dim5Input::Descriptor(&d)),
                    Parsed::Manifold(e) => dim5_recognizer(Dim5Input::Expr(&e)),
                    Parsed::Trace(_) => Err(rfm_core::Error::Argument("expected a descriptor or an expression".into())),
                }
            } else {
                let e = dsl::parse_expr(input).map_err(|diagnostics| Failure { source: input.clone(), diagnostics })?;
                dim5_recognizer(Dim5Input::Expr(&e))
            }
            .map_err(|e| Failure::lib(input, e))?;
            let decision = json!(verdict.decision);
            let mut text = format!("{}\n  {}\n", decision.as_str().unwrap_or_default(), verdict.citation);
            for n in &verdict.notes {
                text.push_str(&format!("  note: {n}\n"));
            }
            let mut v = json!(verdict);
            if let Some(w) = &verdict.witness {
                text.push_str(&dsl::print_descriptor(w));
                v["witness"] = descriptor_value(w);
            }
            Ok((text, v))
        }
        Command::Preset { name } => {
            let p: Preset = presets::preset(name).map_err(|e| Failure::lib(name, e))?;
            Ok((
                presets::render_preset_file(&p),
                json!({
                    "name": p.name,
                    "alias": p.alias,
                    "expected": p.expected,
                    "tier": p.tier,
                    "descriptor": descriptor_value(&p.descriptor),
                }),
            ))
        }
        Command::ListPresets => {
            let all = presets::list_presets();
            let width = all.iter().map(|(a, _)| a.len()).max().unwrap_or(0);
            let text = all.iter().map(|(a, b)| format!("{a:<width$}  {b}\n")).collect();
            let v = all.iter().map(|(a, b)| json!({ "name": a, "description": b })).collect();
            Ok((text, Value::Array(v)))
        }
    }
}

fn input_value(cmd: &Command) -> Value {
    match cmd {
        Command::Validate { file }
        | Command::Reeb { file, .. }
        | Command::Homology { file }
        | Command::Euler { file }
        | Command::Prop1 { file }
        | Command::Classify { file } => json!({ "file": file }),
        Command::Synthesize { expr, n } => json!({ "expr": expr, "n": n }),
        Command::Combine { a, b, component, assume_null_homotopic } => {
            json!({ "a": a, "b": b, "component": component, "assume_null_homotopic": assume_null_homotopic })
        }
        Command::Decompose { file, region, component, assume_null_homotopic } => json!({
            "file": file, "region": region, "component": component, "assume_null_homotopic": assume_null_homotopic
        }),
        Command::Spin { trace, n } => json!({ "trace": trace, "n": n }),
        Command::Dim5 { input } => json!({ "input": input }),
        Command::Preset { name } => json!({ "name": name }),
        Command::ListPresets => json!({}),
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut report = Report::new(cli.command.name(), input_value(&cli.command));
    let code = match execute(&cli.command) {
        Ok((text, value)) => {
            if cli.json {
                report.result = value;
                let _ = out.write_all(report.render().as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            0
        }
        Err(f) => {
            for d in &f.diagnostics {
                let _ = writeln!(err, "{}:{d}", f.source);
            }
            if cli.json {
                report.diagnostics = f.diagnostics;
                let _ = out.write_all(report.render().as_bytes());
            }
            1
        }
    };
    let _ = out.flush();
    code
}

pub fn main_with_std() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
