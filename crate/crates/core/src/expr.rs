//! Formal closed-manifold expressions.
//!
//! A [`ManifoldExpr`] names a closed manifold built from spheres, homotopy
//! spheres, products, sphere-based bundles and connected sums. Equality of
//! expressions is equality of their [`normalize`](ManifoldExpr::normalize)d
//! forms; nothing coarser (such as diffeomorphism detection) is attempted.
//! Twist and exotic-structure labels are opaque: two different labels are
//! never identified.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Number of oriented diffeomorphism classes of homotopy 7-spheres.
pub const THETA_7_ORDER: usize = 28;

/// Classes of homotopy 7-spheres known to admit no special generic map into
/// 3-space. Stored as data only; it is never derived.
pub const THETA_7_WITHOUT_SPECIAL_GENERIC_INTO_R3: usize = 14;

/// An opaque clutching / exotic-structure label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Twist {
    Trivial,
    Label(String),
}

impl Twist {
    pub fn label(text: impl Into<String>) -> Self {
        Twist::Label(text.into())
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Twist::Trivial)
    }

    pub fn text(&self) -> &str {
        match self {
            Twist::Trivial => "",
            Twist::Label(s) => s,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Twist::Trivial => Value::Null,
            Twist::Label(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: Option<&Value>) -> Result<Self> {
        match v {
            None | Some(Value::Null) => Ok(Twist::Trivial),
            Some(Value::String(s)) => Ok(Twist::Label(s.clone())),
            Some(other) => Err(Error::Structural(format!("label must be a string or null, got {other}"))),
        }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Twist::Trivial => f.write_str("trivial"),
            Twist::Label(s) => write!(f, "{s:?}"),
        }
    }
}

/// Formal composition of two homotopy-sphere labels. No group law beyond
/// concatenation is applied; the trivial label is the unit.
pub fn compose_theta(a: &Twist, b: &Twist) -> Twist {
    match (a, b) {
        (Twist::Trivial, x) | (x, Twist::Trivial) => x.clone(),
        (Twist::Label(x), Twist::Label(y)) => Twist::Label(format!("{x}+{y}")),
    }
}

/// A manifold known only through declared invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NamedManifold {
    pub name: String,
    pub dim: u32,
    pub euler: Option<i64>,
    /// Largest `k` such that the manifold is `k`-connected (0 = connected).
    pub connectivity: u32,
    /// Free homology ranks by degree, when declared.
    pub ranks: Option<Vec<u64>>,
    /// Degrees carrying torsion in integral homology.
    pub torsion: Vec<u32>,
}

impl NamedManifold {
    pub fn new(name: impl Into<String>, dim: u32) -> Self {
        NamedManifold {
            name: name.into(),
            dim,
            euler: None,
            connectivity: 0,
            ranks: None,
            torsion: Vec::new(),
        }
    }

    pub fn with_euler(mut self, euler: i64) -> Self {
        self.euler = Some(euler);
        self
    }

    pub fn with_connectivity(mut self, c: u32) -> Self {
        self.connectivity = c;
        self
    }

    pub fn with_ranks(mut self, ranks: Vec<u64>) -> Self {
        self.ranks = Some(ranks);
        self
    }

    pub fn with_torsion(mut self, degrees: Vec<u32>) -> Self {
        self.torsion = degrees;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ManifoldExpr {
    StandardSphere(u32),
    /// Twisted double of a standard disc.
    AlmostSphere { dim: u32, twist: Twist },
    /// An element of the group of homotopy spheres of this dimension.
    HomotopySphere { dim: u32, theta: Twist },
    Product(Vec<ManifoldExpr>),
    /// Total space of a fiber bundle over the standard sphere of dimension `base`.
    BundleTotal { fiber: Box<ManifoldExpr>, base: u32, twist: Twist },
    ConnectedSum(Vec<ManifoldExpr>),
    Named(NamedManifold),
}

use ManifoldExpr::*;

impl ManifoldExpr {
    pub fn sphere(dim: u32) -> Self {
        StandardSphere(dim)
    }

    pub fn almost_sphere(dim: u32, twist: impl Into<String>) -> Self {
        AlmostSphere { dim, twist: Twist::Label(twist.into()) }
    }

    pub fn homotopy_sphere(dim: u32, theta: impl Into<String>) -> Self {
        HomotopySphere { dim, theta: Twist::Label(theta.into()) }
    }

    pub fn product(factors: Vec<ManifoldExpr>) -> Self {
        Product(factors)
    }

    pub fn bundle(fiber: ManifoldExpr, base: u32, twist: Twist) -> Self {
        BundleTotal { fiber: Box::new(fiber), base, twist }
    }

    pub fn csum(summands: Vec<ManifoldExpr>) -> Self {
        ConnectedSum(summands)
    }

    fn tag(&self) -> u8 {
        match self {
            StandardSphere(_) => 0,
            AlmostSphere { .. } => 1,
            HomotopySphere { .. } => 2,
            Product(_) => 3,
            BundleTotal { .. } => 4,
            ConnectedSum(_) => 5,
            Named(_) => 6,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StandardSphere(_) => "sphere",
            AlmostSphere { .. } => "almost_sphere",
            HomotopySphere { .. } => "homotopy_sphere",
            Product(_) => "product",
            BundleTotal { .. } => "bundle",
            ConnectedSum(_) => "csum",
            Named(_) => "named",
        }
    }

    /// Dimension, assuming the expression is well formed.
    pub fn dim(&self) -> u32 {
        match self {
            StandardSphere(d) => *d,
            AlmostSphere { dim, .. } | HomotopySphere { dim, .. } => *dim,
            Product(fs) => fs.iter().map(ManifoldExpr::dim).sum(),
            BundleTotal { fiber, base, .. } => fiber.dim() + base,
            ConnectedSum(ss) => ss.first().map_or(0, ManifoldExpr::dim),
            Named(n) => n.dim,
        }
    }

    pub fn children(&self) -> &[ManifoldExpr] {
        match self {
            Product(v) | ConnectedSum(v) => v,
            BundleTotal { fiber, .. } => std::slice::from_ref(fiber.as_ref()),
            _ => &[],
        }
    }

    fn label_text(&self) -> &str {
        match self {
            AlmostSphere { twist, .. } | BundleTotal { twist, .. } => twist.text(),
            HomotopySphere { theta, .. } => theta.text(),
            Named(n) => &n.name,
            _ => "",
        }
    }

    /// Standard sphere, almost-sphere or homotopy sphere.
    pub fn is_sphere_like(&self) -> bool {
        matches!(self, StandardSphere(_) | AlmostSphere { .. } | HomotopySphere { .. })
    }

    pub fn is_standard_sphere(&self) -> bool {
        matches!(self.normalize(), Ok(StandardSphere(_)))
    }

    /// Checks the structural invariants: nonempty lists, matching connected-sum dimensions.
    pub fn check(&self) -> Result<()> {
        match self {
            Product(fs) => {
                if fs.is_empty() {
                    return Err(Error::Structural("product with no factors".into()));
                }
                fs.iter().try_for_each(ManifoldExpr::check)
            }
            BundleTotal { fiber, base, .. } => {
                if *base == 0 {
                    return Err(Error::Structural("bundle over a 0-sphere".into()));
                }
                fiber.check()
            }
            ConnectedSum(ss) => {
                let Some(first) = ss.first() else {
                    return Err(Error::Structural("connected sum with no summands".into()));
                };
                ss.iter().try_for_each(ManifoldExpr::check)?;
                let m = first.dim();
                if m == 0 {
                    return Err(Error::Structural("connected sum of 0-dimensional manifolds".into()));
                }
                let offending: Vec<String> = ss
                    .iter()
                    .filter(|s| s.dim() != m)
                    .map(|s| format!("{s} (dim {})", s.dim()))
                    .collect();
                if offending.is_empty() {
                    Ok(())
                } else {
                    Err(Error::Structural(format!(
                        "connected sum summands must share dimension {m} (first summand {first}); offending: {}",
                        offending.join(", ")
                    )))
                }
            }
            _ => Ok(()),
        }
    }

    /// Canonical form: products and connected sums flattened and sorted,
    /// trivial bundles rewritten as products, sphere summands of a connected
    /// sum dropped, trivially-labelled (almost/homotopy) spheres outside
    /// dimension 4 replaced by standard spheres.
    pub fn normalize(&self) -> Result<ManifoldExpr> {
        self.check()?;
        Ok(self.normalize_unchecked())
    }

    fn normalize_unchecked(&self) -> ManifoldExpr {
        match self {
            StandardSphere(d) => StandardSphere(*d),
            AlmostSphere { dim, twist } | HomotopySphere { dim, theta: twist }
                if twist.is_trivial() && *dim != 4 =>
            {
                StandardSphere(*dim)
            }
            AlmostSphere { .. } | HomotopySphere { .. } | Named(_) => self.clone(),
            Product(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                for f in fs {
                    match f.normalize_unchecked() {
                        Product(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                out.sort();
                if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    Product(out)
                }
            }
            BundleTotal { fiber, base, twist } => {
                let fiber = fiber.normalize_unchecked();
                if twist.is_trivial() {
                    Product(vec![fiber, StandardSphere(*base)]).normalize_unchecked()
                } else {
                    BundleTotal { fiber: Box::new(fiber), base: *base, twist: twist.clone() }
                }
            }
            ConnectedSum(ss) => {
                let m = self.dim();
                let mut out = Vec::with_capacity(ss.len());
                for s in ss {
                    match s.normalize_unchecked() {
                        ConnectedSum(inner) => out.extend(inner),
                        StandardSphere(_) => {}
                        other => out.push(other),
                    }
                }
                out.sort();
                match out.len() {
                    0 => StandardSphere(m),
                    1 => out.pop().unwrap(),
                    _ => ConnectedSum(out),
                }
            }
        }
    }

    /// Euler characteristic.
    pub fn euler(&self) -> Result<i64> {
        self.check()?;
        self.euler_unchecked()
    }

    fn euler_unchecked(&self) -> Result<i64> {
        let chi = match self {
            StandardSphere(d) | AlmostSphere { dim: d, .. } | HomotopySphere { dim: d, .. } => sphere_euler(*d),
            Product(fs) => {
                let mut acc = 1;
                for f in fs {
                    acc *= f.euler_unchecked()?;
                }
                acc
            }
            BundleTotal { fiber, base, .. } => fiber.euler_unchecked()? * sphere_euler(*base),
            ConnectedSum(ss) => {
                let m = self.dim();
                let mut acc = 0;
                for s in ss {
                    acc += s.euler_unchecked()?;
                }
                acc - (ss.len() as i64 - 1) * sphere_euler(m)
            }
            Named(n) => n
                .euler
                .ok_or_else(|| Error::InvariantUnavailable(format!("no Euler characteristic declared for `{}`", n.name)))?,
        };
        if self.dim() % 2 == 1 && chi != 0 {
            return Err(Error::Inconsistent(format!(
                "odd-dimensional closed manifold {self} evaluates to Euler characteristic {chi}"
            )));
        }
        Ok(chi)
    }

    /// Free homology ranks (rational Betti numbers) indexed by degree `0..=dim`.
    ///
    /// Defined on spheres, products of expressions with known ranks, sphere
    /// bundles whose Euler class is forced to vanish, trivial bundles, connected
    /// sums of connected summands, and named manifolds with declared ranks.
    pub fn homology_ranks(&self) -> Result<Vec<u64>> {
        self.check()?;
        self.ranks_unchecked()
    }

    fn ranks_unchecked(&self) -> Result<Vec<u64>> {
        let dim = self.dim() as usize;
        match self {
            StandardSphere(d) | AlmostSphere { dim: d, .. } | HomotopySphere { dim: d, .. } => {
                let mut r = vec![0; *d as usize + 1];
                r[0] += 1;
                r[*d as usize] += 1;
                Ok(r)
            }
            Product(fs) => {
                let mut acc = vec![1u64];
                for f in fs {
                    acc = convolve(&acc, &f.ranks_unchecked()?);
                }
                Ok(acc)
            }
            BundleTotal { fiber, base, twist } => {
                let f = fiber.normalize_unchecked();
                let sphere_fiber_without_euler_class = f.is_sphere_like() && f.dim() + 1 != *base;
                if twist.is_trivial() || sphere_fiber_without_euler_class {
                    Ok(convolve(&fiber.ranks_unchecked()?, &StandardSphere(*base).ranks_unchecked()?))
                } else {
                    Err(Error::InvariantUnavailable(format!(
                        "homology of the twisted bundle {self} is not determined by its labels"
                    )))
                }
            }
            ConnectedSum(ss) => {
                let mut r = vec![0u64; dim + 1];
                for s in ss {
                    let sr = s.ranks_unchecked()?;
                    if sr[0] != 1 || sr[dim] != 1 {
                        return Err(Error::InvariantUnavailable(format!(
                            "summand {s} is not a connected orientable closed manifold"
                        )));
                    }
                    for (k, v) in sr.iter().enumerate().take(dim).skip(1) {
                        r[k] += v;
                    }
                }
                r[0] = 1;
                r[dim] = 1;
                Ok(r)
            }
            Named(n) => match &n.ranks {
                Some(r) if r.len() == dim + 1 => Ok(r.clone()),
                Some(r) => Err(Error::Structural(format!(
                    "`{}` declares {} ranks for dimension {}",
                    n.name,
                    r.len(),
                    n.dim
                ))),
                None => Err(Error::InvariantUnavailable(format!("no homology ranks declared for `{}`", n.name))),
            },
        }
    }

    /// `(degree, rank)` pairs with nonzero rank.
    pub fn nonzero_ranks(&self) -> Result<Vec<(u32, u64)>> {
        Ok(self
            .homology_ranks()?
            .into_iter()
            .enumerate()
            .filter(|(_, r)| *r != 0)
            .map(|(k, r)| (k as u32, r))
            .collect())
    }

    /// Largest `k` with the manifold `k`-connected; `-1` when disconnected.
    pub fn connectivity(&self) -> i64 {
        match self {
            StandardSphere(d) | AlmostSphere { dim: d, .. } | HomotopySphere { dim: d, .. } => *d as i64 - 1,
            Product(fs) => fs.iter().map(ManifoldExpr::connectivity).min().unwrap_or(-1),
            BundleTotal { fiber, base, .. } => fiber.connectivity().min(*base as i64 - 1),
            ConnectedSum(ss) => ss.iter().map(ManifoldExpr::connectivity).min().unwrap_or(-1),
            Named(n) => n.connectivity as i64,
        }
    }

    /// Factors of a product (the expression itself otherwise).
    pub fn factors(&self) -> Vec<ManifoldExpr> {
        match self {
            Product(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }

    /// Summands of a connected sum (the expression itself otherwise).
    pub fn summands(&self) -> Vec<ManifoldExpr> {
        match self {
            ConnectedSum(ss) => ss.clone(),
            other => vec![other.clone()],
        }
    }

    pub fn to_json(&self) -> Value {
        let children: Vec<Value> = self.children().iter().map(ManifoldExpr::to_json).collect();
        let label = match self {
            AlmostSphere { twist, .. } | BundleTotal { twist, .. } => twist.to_json(),
            HomotopySphere { theta, .. } => theta.to_json(),
            Named(n) => Value::String(n.name.clone()),
            _ => Value::Null,
        };
        let euler = self.euler().map(Value::from).unwrap_or(Value::Null);
        let mut obj = json!({
            "kind": self.kind_name(),
            "dim": self.dim(),
            "children": children,
            "label": label,
            "euler": euler,
        });
        if let Named(n) = self {
            obj["connectivity"] = json!(n.connectivity);
            obj["ranks"] = json!(n.ranks);
            obj["torsion"] = json!(n.torsion);
        }
        obj
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Structural(format!("manifold JSON: {what}"));
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing `kind`"))?;
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing `dim`"))? as u32;
        let children = match v.get("children") {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(a)) => a.iter().map(ManifoldExpr::from_json).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(bad("`children` must be an array")),
        };
        let label = v.get("label");
        let e = match kind {
            "sphere" => StandardSphere(dim),
            "almost_sphere" => AlmostSphere { dim, twist: Twist::from_json(label)? },
            "homotopy_sphere" => HomotopySphere { dim, theta: Twist::from_json(label)? },
            "product" => Product(children),
            "csum" => ConnectedSum(children),
            "bundle" => {
                let [fiber]: [ManifoldExpr; 1] =
                    children.try_into().map_err(|_| bad("bundle needs exactly one child"))?;
                let base = dim
                    .checked_sub(fiber.dim())
                    .filter(|b| *b > 0)
                    .ok_or_else(|| bad("bundle dimension must exceed fiber dimension"))?;
                BundleTotal { fiber: Box::new(fiber), base, twist: Twist::from_json(label)? }
            }
            "named" => {
                let name = label.and_then(Value::as_str).ok_or_else(|| bad("named manifold needs a label"))?;
                let mut n = NamedManifold::new(name, dim);
                n.euler = v.get("euler").and_then(Value::as_i64);
                n.connectivity = v.get("connectivity").and_then(Value::as_u64).unwrap_or(0) as u32;
                n.ranks = v
                    .get("ranks")
                    .and_then(Value::as_array)
                    .map(|a| a.iter().filter_map(Value::as_u64).collect());
                n.torsion = v
                    .get("torsion")
                    .and_then(Value::as_array)
                    .map(|a| a.iter().filter_map(Value::as_u64).map(|x| x as u32).collect())
                    .unwrap_or_default();
                Named(n)
            }
            other => return Err(bad(&format!("unknown kind `{other}`"))),
        };
        if e.dim() != dim {
            return Err(bad(&format!("declared dim {dim} does not match computed dim {}", e.dim())));
        }
        e.check()?;
        Ok(e)
    }
}

/// Euler characteristic of the standard `d`-sphere.
pub fn sphere_euler(d: u32) -> i64 {
    if d.is_multiple_of(2) {
        2
    } else {
        0
    }
}

fn convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

// Total order: variant tag, dimension, children, label text, then remaining fields.
impl Ord for ManifoldExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.tag()
            .cmp(&other.tag())
            .then_with(|| self.dim().cmp(&other.dim()))
            .then_with(|| self.children().cmp(other.children()))
            .then_with(|| self.label_text().cmp(other.label_text()))
            .then_with(|| match (self, other) {
                (AlmostSphere { twist: a, .. }, AlmostSphere { twist: b, .. })
                | (HomotopySphere { theta: a, .. }, HomotopySphere { theta: b, .. }) => a.cmp(b),
                (BundleTotal { base: a, twist: ta, .. }, BundleTotal { base: b, twist: tb, .. }) => {
                    a.cmp(b).then_with(|| ta.cmp(tb))
                }
                (Named(a), Named(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
    }
}

impl PartialOrd for ManifoldExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ManifoldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::print_expr(self))
    }
}

impl Serialize for ManifoldExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ManifoldExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        ManifoldExpr::from_json(&v).map_err(serde::de::Error::custom)
    }
}
