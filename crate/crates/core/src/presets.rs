//! Catalog of named round fold maps with their expected source manifolds.
//!
//! Extra presets are read from `.rfm` files in the directories listed in
//! `RFM_PRESET_PATH`. Such a file may carry `# expect: EXPR` and
//! `# alias: NAME` comment lines; without `expect` the classification of
//! the descriptor is taken as the oracle.

use std::path::{Path, PathBuf};

use crate::classify::{classify, special_generic_descriptor, synthesize, Confidence};
use crate::constructions::{from_bundle, iterated_bundle_spin};
use crate::descriptor::RoundFoldDescriptor;
use crate::dsl::{self, Parsed};
use crate::error::{Error, Result};
use crate::expr::{ManifoldExpr, Twist};
use crate::surgery::combine;

pub const PRESET_PATH_VAR: &str = "RFM_PRESET_PATH";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preset {
    pub name: String,
    pub descriptor: RoundFoldDescriptor,
    pub expected: ManifoldExpr,
    pub tier: Confidence,
    pub alias: Option<String>,
}

/// Signatures of the built-in families, with a one-line description.
pub const CATALOG: [(&str, &str); 9] = [
    ("special_generic(m,n)", "single fold sphere; the source is a homotopy m-sphere"),
    ("milnor_sphere(theta)", "S^3-bundle over S^4 with clutching label theta"),
    ("sphere_bundle(m,n[,twist])", "S^{m-n}-bundle over S^n"),
    ("so5_mod_so_k(k)", "SO(5)/SO(k) as an iterated bundle over S^4 (k = 2)"),
    ("so5_mod_so2", "SO(5)/SO(2), fibers S^3 and S^2 over S^4"),
    ("cp3_over_s4", "CP^3 as an S^2-bundle over S^4"),
    ("bott3(b,c)", "3-stage Bott manifold over S^2 with c even"),
    ("s4_bott_sum", "S^4-bundle over S^2 summed with an (S^2 x S^2)-bundle over S^2"),
    ("sphere_bundle_sum(k,m,n)", "connected sum of k S^{m-n}-bundles over S^n"),
];

/// Concrete instances shipped as `.rfm` files.
pub const SHIPPED: [&str; 11] = [
    "special_generic(5,2)",
    "special_generic(7,2)",
    "special_generic(7,3)",
    "milnor_sphere(theta)",
    "sphere_bundle(6,2,tau)",
    "so5_mod_so2",
    "cp3_over_s4",
    "bott3(1,2)",
    "s4_bott_sum",
    "sphere_bundle_sum(3,5,2)",
    "sphere_bundle_sum(4,8,4)",
];

fn split_call(name: &str) -> Result<(&str, Vec<String>)> {
    let name = name.trim();
    let Some(open) = name.find('(') else { return Ok((name, Vec::new())) };
    let inner = name[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::Argument(format!("unbalanced parentheses in preset name `{name}`")))?;
    let args = inner
        .split(',')
        .map(|a| a.trim().trim_matches('"').to_string())
        .filter(|a| !a.is_empty())
        .collect();
    Ok((name[..open].trim(), args))
}

fn uint(args: &[String], k: usize, what: &str) -> Result<u32> {
    let a = args.get(k).ok_or_else(|| Error::Argument(format!("missing argument `{what}`")))?;
    a.parse().map_err(|_| Error::Argument(format!("`{what}` must be a non-negative integer, got `{a}`")))
}

fn label(args: &[String], k: usize, default: &str) -> Twist {
    match args.get(k).map(String::as_str) {
        Some("trivial") => Twist::Trivial,
        Some(s) => Twist::label(s),
        None => Twist::label(default),
    }
}

fn arity(name: &str, args: &[String], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::Argument(format!("preset `{name}` takes {allowed:?} arguments, got {}", args.len())))
    }
}

fn s(d: u32) -> ManifoldExpr {
    ManifoldExpr::sphere(d)
}

fn built_in(full: &str) -> Result<Option<Preset>> {
    let (name, args) = split_call(full)?;
    let smooth = |descriptor: RoundFoldDescriptor, expected: ManifoldExpr, alias: Option<&str>| -> Result<Option<Preset>> {
        Ok(Some(Preset {
            name: full.trim().to_string(),
            descriptor,
            expected: expected.normalize()?,
            tier: Confidence::Diffeomorphism,
            alias: alias.map(str::to_string),
        }))
    };
    match name {
        "special_generic" => {
            arity(name, &args, &[2])?;
            let (m, n) = (uint(&args, 0, "m")?, uint(&args, 1, "n")?);
            if n == 0 || n >= m {
                return Err(Error::Argument(format!("special_generic needs 1 <= n < m, got ({m}, {n})")));
            }
            let expected = if m - n <= 3 {
                s(m)
            } else {
                ManifoldExpr::homotopy_sphere(m, format!("theta({m},{n})#1"))
            };
            smooth(special_generic_descriptor(m, n), expected, None)
        }
        "milnor_sphere" => {
            arity(name, &args, &[0, 1])?;
            let t = label(&args, 0, "theta");
            let e = ManifoldExpr::bundle(s(3), 4, t.clone());
            smooth(from_bundle(&s(3), 4, t, None)?, e, Some("homotopy 7-sphere"))
        }
        "sphere_bundle" => {
            arity(name, &args, &[2, 3])?;
            let (m, n) = (uint(&args, 0, "m")?, uint(&args, 1, "n")?);
            if n == 0 || n >= m {
                return Err(Error::Argument(format!("sphere_bundle needs 1 <= n < m, got ({m}, {n})")));
            }
            let t = label(&args, 2, "trivial");
            let e = ManifoldExpr::bundle(s(m - n), n, t.clone());
            smooth(from_bundle(&s(m - n), n, t, None)?, e, None)
        }
        "so5_mod_so_k" | "so5_mod_so2" => {
            let k = if name == "so5_mod_so2" {
                arity(name, &args, &[0])?;
                2
            } else {
                arity(name, &args, &[1])?;
                uint(&args, 0, "k")?
            };
            if k != 2 {
                return Err(Error::NoConstruction(format!(
                    "SO(5)/SO({k}) needs a Morse trace on SO(3)/SO({k}) x [0, 1], which is not in the catalog"
                )));
            }
            let fibers = [s(3), s(2)];
            let twists = [Twist::label("stiefel"), Twist::label("flag")];
            let d = iterated_bundle_spin(&fibers, 4, &twists, true, None)?;
            let e = ManifoldExpr::bundle(ManifoldExpr::product(fibers.to_vec()), 4, d.twist.clone());
            smooth(d, e, Some("SO(5)/SO(2)"))
        }
        "cp3_over_s4" => {
            arity(name, &args, &[0])?;
            let t = Twist::label("twistor");
            let e = ManifoldExpr::bundle(s(2), 4, t.clone());
            smooth(from_bundle(&s(2), 4, t, None)?, e, Some("CP^3"))
        }
        "bott3" => {
            arity(name, &args, &[2])?;
            let parse_int = |k: usize, what: &str| -> Result<i64> {
                args[k].parse().map_err(|_| Error::Argument(format!("`{what}` must be an integer, got `{}`", args[k])))
            };
            let (b, c) = (parse_int(0, "b")?, parse_int(1, "c")?);
            if c % 2 != 0 {
                return Err(Error::Hypothesis(format!(
                    "c = {c} is odd, so the second stage does not restrict to a trivial bundle over the fiber"
                )));
            }
            let fibers = [s(2), s(2)];
            let twists = [Twist::label("hirzebruch"), Twist::label(format!("bott(b={b},c={c})"))];
            let d = iterated_bundle_spin(&fibers, 2, &twists, true, None)?;
            let e = ManifoldExpr::bundle(ManifoldExpr::product(fibers.to_vec()), 2, d.twist.clone());
            smooth(d, e, Some("3-stage Bott manifold"))
        }
        "s4_bott_sum" => {
            arity(name, &args, &[0])?;
            let f1 = from_bundle(&s(4), 2, Twist::label("tau"), None)?;
            let fiber = ManifoldExpr::product(vec![s(2), s(2)]);
            let f2 = from_bundle(&fiber, 2, Twist::label("bott"), None)?;
            let site = f1.core()?.ids().last().cloned().expect("bundle core has two components");
            let d = combine(&f1, &site, &f2, false)?.descriptor;
            let e = ManifoldExpr::csum(vec![
                ManifoldExpr::bundle(s(4), 2, Twist::label("tau")),
                ManifoldExpr::bundle(fiber, 2, Twist::label("bott")),
            ]);
            smooth(d, e, None)
        }
        "sphere_bundle_sum" => {
            arity(name, &args, &[3])?;
            let (k, m, n) = (uint(&args, 0, "k")?, uint(&args, 1, "m")?, uint(&args, 2, "n")?);
            if k == 0 || n == 0 || m < 2 * n {
                return Err(Error::Argument(format!("sphere_bundle_sum needs k >= 1 and m >= 2n, got ({k}, {m}, {n})")));
            }
            let e = ManifoldExpr::csum(
                (1..=k).map(|i| ManifoldExpr::bundle(s(m - n), n, Twist::label(format!("t{i}")))).collect(),
            );
            smooth(synthesize(&e, Some(n))?, e, None)
        }
        _ => Ok(None),
    }
}

fn search_path() -> Vec<PathBuf> {
    std::env::var_os(PRESET_PATH_VAR)
        .map(|v| std::env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()).collect())
        .unwrap_or_default()
}

/// Reads a preset file. `# expect:` and `# alias:` lines are optional.
pub fn load_preset_file(name: &str, path: &Path) -> Result<Preset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
    let descriptor = match dsl::parse(&text) {
        Ok(Parsed::Descriptor(d)) => d,
        Ok(other) => {
            return Err(Error::Argument(format!("{} holds a {} block, not roundfold", path.display(), other.kind_name())))
        }
        Err(ds) => {
            let msgs: Vec<String> = ds.iter().map(|d| format!("{}:{d}", path.display())).collect();
            return Err(Error::Argument(msgs.join("; ")));
        }
    };
    let directive = |key: &str| {
        text.lines().find_map(|l| l.trim().strip_prefix('#')?.trim().strip_prefix(key).map(|r| r.trim().to_string()))
    };
    let classified = classify(&descriptor);
    let expected = match directive("expect:") {
        Some(e) => dsl::parse_expr(&e)
            .map_err(|ds| Error::Argument(format!("bad `expect` line in {}: {}", path.display(), ds[0])))?
            .normalize()?,
        None => classified.manifold.clone().ok_or_else(|| {
            Error::NoConstruction(format!("{} has no `expect` line and does not classify", path.display()))
        })?,
    };
    Ok(Preset {
        name: name.to_string(),
        descriptor,
        expected,
        tier: classified.confidence.unwrap_or(Confidence::Homeomorphism),
        alias: directive("alias:"),
    })
}

/// Looks up `name` (e.g. `special_generic(7,2)`) among the built-ins, then
/// as `NAME.rfm` in the `RFM_PRESET_PATH` directories.
pub fn preset(name: &str) -> Result<Preset> {
    if let Some(p) = built_in(name)? {
        return Ok(p);
    }
    for dir in search_path() {
        let file = dir.join(format!("{}.rfm", name.trim()));
        if file.is_file() {
            return load_preset_file(name.trim(), &file);
        }
    }
    Err(Error::UnknownPreset(name.trim().to_string()))
}

/// Built-in signatures followed by the file stems found on `RFM_PRESET_PATH`.
pub fn list_presets() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = CATALOG.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let mut extra = Vec::new();
    for dir in search_path() {
        let Ok(entries) = std::fs::read_dir(&dir) else { continue };
        for entry in entries.flatten() {
            let p = entry.path();
            if p.extension().is_some_and(|e| e == "rfm") {
                if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                    extra.push((stem.to_string(), format!("from {}", dir.display())));
                }
            }
        }
    }
    extra.sort();
    out.extend(extra);
    out
}

/// File name used for a shipped preset instance.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect::<String>()
        .trim_end_matches('_')
        .to_string()
}

/// Canonical `.rfm` text for a preset, with its oracle as comment lines.
pub fn render_preset_file(p: &Preset) -> String {
    let mut out = format!("# preset: {}\n", p.name);
    if let Some(a) = &p.alias {
        out.push_str(&format!("# alias: {a}\n"));
    }
    out.push_str(&format!("# expect: {}\n", p.expected));
    out.push_str(&dsl::print_descriptor(&p.descriptor));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_presets_classify_to_their_oracle() {
        for name in SHIPPED {
            let p = preset(name).unwrap();
            assert!(p.descriptor.validate().is_ok(), "{name}");
            let r = classify(&p.descriptor);
            assert_eq!(r.manifold.as_ref(), Some(&p.expected), "{name}: {:?}", r.nearest_failures);
            assert_eq!(r.confidence, Some(p.tier), "{name}");
        }
    }

    #[test]
    fn special_generic_shape() {
        let p = preset("special_generic(7,2)").unwrap();
        assert_eq!(p.descriptor.l(), 1);
        assert_eq!(p.expected, ManifoldExpr::homotopy_sphere(7, "theta(7,2)#1"));
    }

    #[test]
    fn argument_errors() {
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
        assert!(matches!(preset("bott3(1,3)"), Err(Error::Hypothesis(_))));
        assert!(matches!(preset("special_generic(2,3)"), Err(Error::Argument(_))));
        assert!(matches!(preset("so5_mod_so_k(1)"), Err(Error::NoConstruction(_))));
    }

    #[test]
    fn stems() {
        assert_eq!(file_stem("special_generic(7,2)"), "special_generic_7_2");
        assert_eq!(file_stem("cp3_over_s4"), "cp3_over_s4");
    }
}
