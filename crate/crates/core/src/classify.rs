//! Recognition of source manifolds from descriptors, and the converse
//! synthesis of descriptors from manifold expressions.

use serde::Serialize;

use crate::constructions::from_bundle;
use crate::descriptor::{Assertion, AxisFiber, FiberConfiguration, FoldEvent, RoundFoldDescriptor, Triviality};
use crate::error::{Error, Result};
use crate::expr::{ManifoldExpr, NamedManifold, Twist, THETA_7_ORDER, THETA_7_WITHOUT_SPECIAL_GENERIC_INTO_R3};
use crate::reeb::{derived_simply_connected, euler_characteristic, prop1_hypotheses, HypothesisCheck};
use crate::surgery::{combine, decompose};

/// Strength of the identification between the source manifold and the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    Homeomorphism,
    #[serde(rename = "pl")]
    Pl,
    Diffeomorphism,
}

impl Confidence {
    pub fn from_triviality(t: Triviality) -> Option<Self> {
        match t {
            Triviality::Absent => None,
            Triviality::Topological => Some(Confidence::Homeomorphism),
            Triviality::Pl => Some(Confidence::Pl),
            Triviality::Smooth => Some(Confidence::Diffeomorphism),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleApplication {
    pub rule: String,
    pub citation: String,
    pub hypotheses: Vec<HypothesisCheck>,
    pub result: ManifoldExpr,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    /// `None` when no rule applies.
    pub manifold: Option<ManifoldExpr>,
    pub chain: Vec<RuleApplication>,
    pub confidence: Option<Confidence>,
    pub notes: Vec<String>,
    /// Failed hypotheses of the rules that came closest, when unclassified.
    pub nearest_failures: Vec<HypothesisCheck>,
}

impl ClassificationResult {
    pub fn is_classified(&self) -> bool {
        self.manifold.is_some()
    }

    pub fn rules(&self) -> Vec<&str> {
        self.chain.iter().map(|r| r.rule.as_str()).collect()
    }
}

struct Fired {
    manifold: ManifoldExpr,
    confidence: Confidence,
    chain: Vec<RuleApplication>,
    notes: Vec<String>,
}

enum Outcome {
    Fired(Fired),
    Failed(Vec<HypothesisCheck>),
}

struct Ctx<'a> {
    d: &'a RoundFoldDescriptor,
    fibers: Vec<FiberConfiguration>,
    thetas: &'a mut usize,
}

impl Ctx<'_> {
    fn fiber_dim(&self) -> u32 {
        self.d.fiber_dim()
    }

    fn fresh_theta(&mut self) -> ManifoldExpr {
        *self.thetas += 1;
        ManifoldExpr::homotopy_sphere(self.d.m, format!("theta({},{})#{}", self.d.m, self.d.n, self.thetas))
    }
}

fn check(name: &str, holds: bool, detail: impl Into<String>) -> HypothesisCheck {
    HypothesisCheck::new(name, holds, detail)
}

fn all_hold(checks: &[HypothesisCheck]) -> bool {
    checks.iter().all(|c| c.holds)
}

fn norm(e: &ManifoldExpr) -> ManifoldExpr {
    e.normalize().unwrap_or_else(|_| e.clone())
}

fn is_sphere(e: &ManifoldExpr, d: u32) -> bool {
    norm(e) == ManifoldExpr::sphere(d)
}

fn is_almost_sphere(e: &ManifoldExpr, d: u32) -> bool {
    matches!(norm(e), ManifoldExpr::AlmostSphere { dim, .. } if dim == d)
}

fn fired(rule: &str, citation: &str, hypotheses: Vec<HypothesisCheck>, manifold: ManifoldExpr, c: Confidence) -> Outcome {
    let manifold = norm(&manifold);
    Outcome::Fired(Fired {
        chain: vec![RuleApplication {
            rule: rule.into(),
            citation: citation.into(),
            hypotheses,
            result: manifold.clone(),
            site: None,
        }],
        manifold,
        confidence: c,
        notes: Vec::new(),
    })
}

const BUNDLE_CITATION: &str =
    "cylinder axis with trivial surrounding bundle: the source is an F-bundle over S^n at the tier of the triviality";
const PLANE_CITATION: &str =
    "maps into the plane with cylinder axis are smoothly trivial (pseudoisotopy for m >= 7, sphere fibers for m = 3, 4)";
const PAIR_CITATION: &str =
    "two fold spheres with almost-sphere core pair: connected sum of a homotopy sphere and an almost-sphere bundle";
const SPHERE_SUM_CITATION: &str =
    "sphere fibers with l core components: connected sum of l - 1 sphere bundles over S^n (m >= 2n)";
const ALMOST_SUM_CITATION: &str =
    "standard-sphere regular fibers with almost-sphere core components: connected sum of l - 1 almost-sphere bundles";
const MIXED_CITATION: &str =
    "decomposition along a standard-sphere fiber splits off a bundle with (n-1)-connected fiber F";
const DECOMPOSE_CITATION: &str =
    "decomposition along a standard-sphere fiber realizes a connected-sum splitting of the source (m >= 2n)";
const THETA_CITATION: &str =
    "axis fiber E with the declared boundary or connectivity property splits off a homotopy sphere with connected singular set";
const SPECIAL_GENERIC_CITATION: &str =
    "connected singular set: the source is a homotopy sphere, standard when 1 <= m - n <= 3";

fn bundle_recognition(ctx: &Ctx) -> Outcome {
    let d = ctx.d;
    let fiber = match &d.axis {
        Some(AxisFiber::Cylinder(f)) => Some(f),
        _ => None,
    };
    let tier = Confidence::from_triviality(d.triviality);
    let checks = vec![
        check("axis_is_cylinder", fiber.is_some(), format!("axis {}", describe_axis(&d.axis))),
        check("surrounding_bundle_trivial", tier.is_some(), format!("triviality {}", d.triviality.keyword())),
    ];
    match (fiber, tier) {
        (Some(f), Some(c)) => fired(
            "bundle_recognition",
            BUNDLE_CITATION,
            checks,
            ManifoldExpr::bundle(f.clone(), d.n, d.twist.clone()),
            c,
        ),
        _ => Outcome::Failed(checks),
    }
}

fn plane_smoothing_checks(ctx: &Ctx) -> (Vec<HypothesisCheck>, Option<ManifoldExpr>) {
    let d = ctx.d;
    let fiber = match &d.axis {
        Some(AxisFiber::Cylinder(f)) => Some(f.clone()),
        _ => None,
    };
    let fiber_ok = fiber.as_ref().is_some_and(|f| {
        (d.m >= 7 && f.connectivity() >= 1) || ((d.m == 3 || d.m == 4) && is_sphere(f, d.m - 2))
    });
    let checks = vec![
        check("target_is_plane", d.n == 2, format!("n = {}", d.n)),
        check("axis_is_cylinder", fiber.is_some(), format!("axis {}", describe_axis(&d.axis))),
        check(
            "fiber_condition",
            fiber_ok,
            "m >= 7 with simply connected F, or m in {3, 4} with F = S^{m-2}",
        ),
    ];
    (checks, fiber)
}

fn plane_smoothing(ctx: &Ctx, r1: Outcome) -> Outcome {
    let (checks, fiber) = plane_smoothing_checks(ctx);
    let applies = all_hold(&checks);
    match (r1, fiber) {
        (Outcome::Fired(mut f), _) if applies && f.confidence < Confidence::Diffeomorphism => {
            f.confidence = Confidence::Diffeomorphism;
            f.chain.push(RuleApplication {
                rule: "plane_smoothing".into(),
                citation: PLANE_CITATION.into(),
                hypotheses: checks,
                result: f.manifold.clone(),
                site: None,
            });
            Outcome::Fired(f)
        }
        (Outcome::Fired(f), _) => Outcome::Fired(f),
        (Outcome::Failed(_), Some(fiber)) if applies => fired(
            "plane_smoothing",
            PLANE_CITATION,
            checks,
            ManifoldExpr::bundle(fiber, 2, ctx.d.twist.clone()),
            Confidence::Diffeomorphism,
        ),
        (Outcome::Failed(mut prev), _) => {
            prev.extend(checks);
            Outcome::Failed(prev)
        }
    }
}

fn split_twist(d: &RoundFoldDescriptor, k: usize, marker: &Option<Twist>) -> Twist {
    match marker {
        Some(t) => t.clone(),
        None if d.l() == 2 && !d.twist.is_trivial() => d.twist.clone(),
        None => Twist::Label(format!("unspecified@{}", k + 1)),
    }
}

fn almost_sphere_pair(ctx: &mut Ctx) -> Outcome {
    let d = ctx.d;
    let dim = ctx.fiber_dim();
    let shape = match d.events.as_slice() {
        [FoldEvent::Birth { .. }, FoldEvent::Split { left, right, twist, .. }]
            if is_almost_sphere(&left.1, dim) && norm(&left.1) == norm(&right.1) =>
        {
            Some((left.1.clone(), twist.clone()))
        }
        _ => None,
    };
    let checks = vec![
        check("two_fold_spheres", d.l() == 2, format!("l = {}", d.l())),
        check("almost_sphere_core_pair", shape.is_some(), "core is two copies of one almost-sphere"),
        check("smooth", d.triviality == Triviality::Smooth, d.triviality.keyword()),
        check("axis_not_cylinder", !matches!(d.axis, Some(AxisFiber::Cylinder(_))), describe_axis(&d.axis)),
        check("m_ge_2n", d.m >= 2 * d.n, format!("m = {}, n = {}", d.m, d.n)),
    ];
    if !all_hold(&checks) {
        return Outcome::Failed(checks);
    }
    let (sigma, marker) = shape.unwrap();
    let twist = split_twist(d, 1, &marker);
    let theta = ctx.fresh_theta();
    fired(
        "almost_sphere_pair",
        PAIR_CITATION,
        checks,
        ManifoldExpr::csum(vec![theta, ManifoldExpr::bundle(sigma, d.n, twist)]),
        Confidence::Diffeomorphism,
    )
}

fn sphere_bundle_sum(ctx: &Ctx) -> Outcome {
    let d = ctx.d;
    let dim = ctx.fiber_dim();
    let l = d.l();
    let births_sphere = matches!(d.events.first(), Some(FoldEvent::Birth { fiber, .. }) if is_sphere(fiber, dim));
    let splits_sphere = d.events[1..].iter().all(|e| {
        matches!(e, FoldEvent::Split { left, right, .. } if is_sphere(&left.1, dim) && is_sphere(&right.1, dim))
    });
    let axis_ok = match &d.axis {
        None => true,
        Some(AxisFiber::Cylinder(s)) => is_sphere(s, dim),
        Some(AxisFiber::PuncturedCylinder(s, h)) => is_sphere(s, dim) && *h as usize + 2 == l,
        _ => false,
    };
    let checks = vec![
        check("m_ge_2n", d.m >= 2 * d.n, format!("m = {}, n = {}", d.m, d.n)),
        check("several_fold_spheres", l >= 2, format!("l = {l}")),
        check("birth_then_sphere_splits", births_sphere && splits_sphere, "one sphere birth followed by splits into spheres"),
        check("smooth", d.triviality == Triviality::Smooth, d.triviality.keyword()),
        check("axis_sphere_cylinder_with_holes", axis_ok, describe_axis(&d.axis)),
    ];
    if !all_hold(&checks) {
        return Outcome::Failed(checks);
    }
    let summands = d
        .events
        .iter()
        .enumerate()
        .filter_map(|(k, e)| match e {
            FoldEvent::Split { twist, .. } => {
                Some(ManifoldExpr::bundle(ManifoldExpr::sphere(dim), d.n, split_twist(d, k, twist)))
            }
            _ => None,
        })
        .collect();
    fired("sphere_bundle_sum", SPHERE_SUM_CITATION, checks, ManifoldExpr::csum(summands), Confidence::Diffeomorphism)
}

fn almost_sphere_bundle_sum(ctx: &Ctx) -> Outcome {
    let d = ctx.d;
    let dim = ctx.fiber_dim();
    let l = d.l();
    let shape = matches!(d.events.first(), Some(FoldEvent::Birth { .. }))
        && d.events[1..].iter().all(|e| matches!(e, FoldEvent::Split { .. }));
    let inner_regions_standard = ctx.fibers[1..l].iter().all(|f| f.labels().all(|e| is_sphere(e, dim)));
    let core = &ctx.fibers[l];
    let core_sphere_like = core.labels().all(|e| is_sphere(e, dim) || is_almost_sphere(e, dim));
    let exotic_core = core.labels().filter(|e| is_almost_sphere(e, dim)).count();
    let mut summands = Vec::new();
    let mut non_standard = 0usize;
    for (k, e) in d.events.iter().enumerate() {
        if let FoldEvent::Split { left, right, twist, .. } = e {
            let fiber = [&left.1, &right.1]
                .into_iter()
                .find(|x| !is_sphere(x, dim))
                .cloned()
                .unwrap_or_else(|| ManifoldExpr::sphere(dim));
            if !is_sphere(&fiber, dim) {
                non_standard += 1;
            }
            summands.push(ManifoldExpr::bundle(fiber, d.n, split_twist(d, k, twist)));
        }
    }
    let bound = (l - 1).saturating_sub(l / 2);
    let checks = vec![
        check("m_ge_2n", d.m >= 2 * d.n, format!("m = {}, n = {}", d.m, d.n)),
        check("several_fold_spheres", l >= 2, format!("l = {l}")),
        check("birth_then_splits", shape, "one birth followed by splits"),
        check("non_core_fibers_standard", inner_regions_standard, "regular fibers outside the core are standard spheres"),
        check(
            "core_almost_spheres",
            core_sphere_like && exotic_core >= 1,
            format!("{exotic_core} almost-sphere core component(s)"),
        ),
        check("smooth", d.triviality == Triviality::Smooth, d.triviality.keyword()),
        check(
            "non_standard_summand_bound",
            non_standard >= bound,
            format!("{non_standard} non-standard summand(s), at least {bound} required"),
        ),
    ];
    if !all_hold(&checks) {
        return Outcome::Failed(checks);
    }
    fired(
        "almost_sphere_bundle_sum",
        ALMOST_SUM_CITATION,
        checks,
        ManifoldExpr::csum(summands),
        Confidence::Diffeomorphism,
    )
}

fn has_fiber_piece(f: &RoundFoldDescriptor) -> bool {
    matches!(&f.axis, Some(AxisFiber::Cylinder(x)) if !norm(x).is_sphere_like())
}

fn iterated_decomposition(ctx: &mut Ctx) -> Outcome {
    let d = ctx.d;
    let dim = ctx.fiber_dim();
    let l = d.l();
    let mut checks = vec![
        check("m_ge_2n", d.m >= 2 * d.n, format!("m = {}, n = {}", d.m, d.n)),
        check("at_least_three_fold_spheres", l >= 3, format!("l = {l}")),
    ];
    if !all_hold(&checks) {
        return Outcome::Failed(checks);
    }
    let assume = d.has_assertion(Assertion::NullHomotopic);
    let mut site = None;
    'regions: for region in (1..=l).rev() {
        for (id, label) in ctx.fibers[region].iter() {
            if !is_sphere(label, dim) {
                continue;
            }
            if let Ok(parts) = decompose(d, region, id, assume) {
                if parts.inner.l() >= 2 && parts.outer.l() >= 2 {
                    site = Some((region, id.clone(), parts));
                    break 'regions;
                }
            }
        }
    }
    checks.push(check(
        "separable_sphere_site",
        site.is_some(),
        "a standard-sphere fiber component whose inward subtree splits off",
    ));
    let Some((region, id, parts)) = site else { return Outcome::Failed(checks) };
    let outer = classify_with(&parts.outer, ctx.thetas);
    let inner = classify_with(&parts.inner, ctx.thetas);
    let (Some(a), Some(b)) = (&outer.manifold, &inner.manifold) else {
        checks.push(check("pieces_classified", false, "a piece of the decomposition is unclassified"));
        return Outcome::Failed(checks);
    };
    checks.push(check("pieces_classified", true, "both pieces classified"));
    let mixed = has_fiber_piece(&parts.inner) || has_fiber_piece(&parts.outer);
    let (rule, citation) = if mixed {
        ("mixed_fiber_sum", MIXED_CITATION)
    } else {
        ("iterated_decomposition", DECOMPOSE_CITATION)
    };
    let manifold = norm(&ManifoldExpr::csum(vec![a.clone(), b.clone()]));
    let mut chain = vec![RuleApplication {
        rule: rule.into(),
        citation: citation.into(),
        hypotheses: checks,
        result: manifold.clone(),
        site: Some(format!("region {region}, component {id}")),
    }];
    chain.extend(outer.chain);
    chain.extend(inner.chain);
    let mut notes = outer.notes;
    notes.extend(inner.notes);
    if let crate::surgery::NullHomotopy::Assumed = parts.null_homotopy {
        notes.push(format!("null-homotopy at {id} assumed by the author"));
    }
    Outcome::Fired(Fired {
        manifold,
        confidence: outer.confidence.min(inner.confidence).unwrap_or(Confidence::Homeomorphism),
        chain,
        notes,
    })
}

const E_PROPS: [&str; 2] = ["boundary_n_minus_1_connected", "pi_n_minus_1_trivial"];

fn theta_split(ctx: &mut Ctx) -> Outcome {
    let d = ctx.d;
    let named = match &d.axis {
        Some(AxisFiber::NamedWithBoundary { name, props, .. }) => Some((name.clone(), props.clone())),
        _ => None,
    };
    let prop_ok = named.as_ref().is_some_and(|(_, props)| props.iter().any(|p| E_PROPS.contains(&p.as_str())));
    let tier = Confidence::from_triviality(d.triviality);
    let checks = vec![
        check("m_ge_2n", d.m >= 2 * d.n, format!("m = {}, n = {}", d.m, d.n)),
        check("several_fold_spheres", d.l() > 1, format!("l = {}", d.l())),
        check("axis_named_with_boundary", named.is_some(), describe_axis(&d.axis)),
        check("axis_property_declared", prop_ok, format!("one of {}", E_PROPS.join(", "))),
        check("surrounding_bundle_trivial", tier.is_some(), d.triviality.keyword()),
    ];
    if !all_hold(&checks) {
        return Outcome::Failed(checks);
    }
    let (name, _) = named.unwrap();
    let mut rest = NamedManifold::new(format!("M[{name}]"), d.m);
    rest.euler = euler_characteristic(d).ok();
    let theta = ctx.fresh_theta();
    fired(
        "theta_split",
        THETA_CITATION,
        checks,
        ManifoldExpr::csum(vec![theta, ManifoldExpr::Named(rest)]),
        tier.unwrap(),
    )
}

fn special_generic(ctx: &mut Ctx) -> Outcome {
    let d = ctx.d;
    let checks = vec![check("connected_singular_set", d.l() == 1, format!("l = {}", d.l()))];
    if d.l() != 1 {
        return Outcome::Failed(checks);
    }
    let gap = d.m - d.n;
    let manifold = if (1..=3).contains(&gap) { ManifoldExpr::sphere(d.m) } else { ctx.fresh_theta() };
    let mut out = fired("special_generic", SPECIAL_GENERIC_CITATION, checks, manifold, Confidence::Diffeomorphism);
    if (d.m, d.n) == (7, 3) {
        if let Outcome::Fired(f) = &mut out {
            f.notes.push(format!(
                "{THETA_7_WITHOUT_SPECIAL_GENERIC_INTO_R3} of the {THETA_7_ORDER} classes of homotopy 7-spheres admit no special generic map into R^3"
            ));
        }
    }
    out
}

fn describe_axis(axis: &Option<AxisFiber>) -> String {
    match axis {
        None => "none".into(),
        Some(AxisFiber::Cylinder(f)) => format!("cylinder({f})"),
        Some(AxisFiber::PuncturedCylinder(f, h)) => format!("punctured({f}, {h})"),
        Some(AxisFiber::NamedWithBoundary { name, .. }) => format!("named_boundary({name:?})"),
    }
}

fn classify_with(d: &RoundFoldDescriptor, thetas: &mut usize) -> ClassificationResult {
    let fibers = match d.regular_fibers() {
        Ok(f) => f,
        Err(e) => {
            return ClassificationResult {
                manifold: None,
                chain: Vec::new(),
                confidence: None,
                notes: vec![e.to_string()],
                nearest_failures: Vec::new(),
            }
        }
    };
    let mut ctx = Ctx { d, fibers, thetas };
    let mut failures: Vec<Vec<HypothesisCheck>> = Vec::new();

    let r1 = bundle_recognition(&ctx);
    let steps: [&dyn Fn(&mut Ctx) -> Outcome; 6] = [
        &|c| almost_sphere_pair(c),
        &|c| sphere_bundle_sum(c),
        &|c| almost_sphere_bundle_sum(c),
        &|c| iterated_decomposition(c),
        &|c| theta_split(c),
        &|c| special_generic(c),
    ];
    let mut outcome = plane_smoothing(&ctx, r1);
    for step in steps {
        match outcome {
            Outcome::Fired(_) => break,
            Outcome::Failed(f) => {
                failures.push(f);
                outcome = step(&mut ctx);
            }
        }
    }
    match outcome {
        Outcome::Fired(f) => ClassificationResult {
            manifold: Some(f.manifold),
            chain: f.chain,
            confidence: Some(f.confidence),
            notes: f.notes,
            nearest_failures: Vec::new(),
        },
        Outcome::Failed(f) => {
            failures.push(f);
            let fewest = failures.iter().map(|f| f.iter().filter(|c| !c.holds).count()).min().unwrap_or(0);
            let nearest = failures
                .into_iter()
                .filter(|f| f.iter().filter(|c| !c.holds).count() == fewest)
                .flatten()
                .filter(|c| !c.holds)
                .collect();
            ClassificationResult {
                manifold: None,
                chain: Vec::new(),
                confidence: None,
                notes: vec!["unclassified".into()],
                nearest_failures: nearest,
            }
        }
    }
}

pub fn classify(d: &RoundFoldDescriptor) -> ClassificationResult {
    let mut thetas = 0;
    classify_with(d, &mut thetas)
}

/// One summand of a synthesizable connected sum.
struct Piece {
    fiber: ManifoldExpr,
    twist: Twist,
}

fn sphere_dims(e: &ManifoldExpr) -> Option<Vec<u32>> {
    match e {
        ManifoldExpr::Product(fs) => fs
            .iter()
            .map(|f| match f {
                ManifoldExpr::StandardSphere(d) => Some(*d),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

fn infer_target_dim(summands: &[ManifoldExpr], m: u32) -> Option<u32> {
    let bases: Vec<u32> = summands
        .iter()
        .filter_map(|s| match s {
            ManifoldExpr::BundleTotal { base, .. } => Some(*base),
            _ => None,
        })
        .collect();
    if let Some(&b) = bases.first() {
        return bases.iter().all(|x| *x == b).then_some(b);
    }
    let candidates = |s: &ManifoldExpr| -> Vec<u32> {
        sphere_dims(s).map_or_else(Vec::new, |dims| {
            dims.into_iter().filter(|&n| n >= 1 && n < m).collect()
        })
    };
    let mut common = candidates(summands.first()?);
    for s in &summands[1..] {
        let c = candidates(s);
        common.retain(|n| c.contains(n));
    }
    common.sort();
    let fitting: Vec<u32> = common.iter().copied().filter(|&n| m >= 2 * n).collect();
    fitting.last().or(common.last()).copied()
}

fn piece_of(summand: &ManifoldExpr, n: u32) -> Result<Piece> {
    let blocked = || Error::NoConstruction(format!("no round fold map known for the summand {summand}"));
    let piece = match summand {
        ManifoldExpr::BundleTotal { fiber, base, twist } if *base == n => Piece { fiber: (**fiber).clone(), twist: twist.clone() },
        ManifoldExpr::Product(fs) => {
            let at = fs.iter().position(|f| *f == ManifoldExpr::sphere(n)).ok_or_else(blocked)?;
            let mut rest = fs.clone();
            rest.remove(at);
            let fiber = if rest.len() == 1 { rest.pop().unwrap() } else { ManifoldExpr::product(rest) };
            Piece { fiber, twist: Twist::Trivial }
        }
        _ => return Err(blocked()),
    };
    let f = norm(&piece.fiber);
    let supported = matches!(f, ManifoldExpr::StandardSphere(_) | ManifoldExpr::AlmostSphere { .. })
        || sphere_dims(&f).is_some();
    if !supported {
        return Err(blocked());
    }
    Ok(piece)
}

/// Special generic map with a single sphere birth.
pub fn special_generic_descriptor(m: u32, n: u32) -> RoundFoldDescriptor {
    RoundFoldDescriptor::new(m, n, vec![FoldEvent::Birth { id: "c1".into(), fiber: ManifoldExpr::sphere(m - n) }])
        .with_triviality(Triviality::Smooth)
}

/// Builds a descriptor whose source is the given manifold, for connected
/// sums of bundles over `S^n` with sphere, almost-sphere or product-of-sphere fibers.
pub fn synthesize(e: &ManifoldExpr, n: Option<u32>) -> Result<RoundFoldDescriptor> {
    let e = e.normalize()?;
    let m = e.dim();
    match &e {
        ManifoldExpr::StandardSphere(_) => {
            let n = n.unwrap_or(2);
            if n == 0 || n >= m {
                return Err(Error::Argument(format!("need 1 <= n < m for S^{m}")));
            }
            return Ok(special_generic_descriptor(m, n));
        }
        ManifoldExpr::HomotopySphere { .. } | ManifoldExpr::AlmostSphere { .. } => {
            let n = n.unwrap_or(2);
            if n != 2 || m == 4 || m <= 2 {
                return Err(Error::NoConstruction(format!(
                    "homotopy spheres are realized only over the plane in dimensions other than 4, got {e} with n = {n}"
                )));
            }
            return Ok(special_generic_descriptor(m, n));
        }
        _ => {}
    }
    let summands = e.summands();
    let n = match n {
        Some(n) => n,
        None => infer_target_dim(&summands, m)
            .ok_or_else(|| Error::NoConstruction(format!("cannot infer a common base sphere for {e}")))?,
    };
    if n == 0 || n >= m {
        return Err(Error::Argument(format!("target dimension {n} out of range for dimension {m}")));
    }
    let pieces: Vec<Piece> = summands.iter().map(|s| piece_of(s, n)).collect::<Result<_>>()?;
    let build = |p: &Piece| from_bundle(&p.fiber, n, p.twist.clone(), None);
    if let [single] = pieces.as_slice() {
        return build(single);
    }
    if m < 2 * n {
        return Err(Error::NoConstruction(format!("connected sums need m >= 2n, got m = {m}, n = {n}")));
    }
    let d = m - n;
    let (spheres, others): (Vec<&Piece>, Vec<&Piece>) = pieces.iter().partition(|p| is_sphere(&p.fiber, d));
    let limit = if spheres.is_empty() { 1 } else { spheres.len() + 1 };
    if others.len() > limit {
        return Err(Error::NoConstruction(format!(
            "{} summands with non-sphere fibers but only {limit} standard-sphere sites",
            others.len()
        )));
    }
    let mut order = spheres.into_iter().chain(others);
    let mut acc = build(order.next().unwrap())?;
    for piece in order {
        let site = acc
            .core()?
            .iter()
            .filter(|(_, x)| is_sphere(x, d))
            .map(|(id, _)| id.clone())
            .last()
            .ok_or_else(|| Error::NoConstruction("no standard-sphere site left".into()))?;
        acc = combine(&acc, &site, &build(piece)?, false)?.descriptor;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim5Decision {
    Admits,
    Rejected,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dim5Verdict {
    pub decision: Dim5Decision,
    pub citation: String,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub witness: Option<RoundFoldDescriptor>,
    pub witness_l: Option<usize>,
}

pub enum Dim5Input<'a> {
    Expr(&'a ManifoldExpr),
    Descriptor(&'a RoundFoldDescriptor),
}

const BARDEN: &str = "Barden: a closed simply connected 5-manifold has torsion-free H_2 iff it is a connected sum of S^3-bundles over S^2";
const RANK_LAW: &str =
    "sphere fibers with folds of index 0 or 1 force pi_2(M) = H_2(M; Z) free of rank l - 1 for maps of closed simply connected 5-manifolds into the plane";

fn admits(witness: RoundFoldDescriptor, citation: &str, notes: Vec<String>) -> Dim5Verdict {
    Dim5Verdict {
        decision: Dim5Decision::Admits,
        citation: citation.into(),
        notes,
        witness_l: Some(witness.l()),
        witness: Some(witness),
    }
}

/// Decides whether a closed simply connected 5-manifold admits a round fold
/// map into the plane with sphere fibers and folds of index 0 or 1.
pub fn dim5_recognizer(input: Dim5Input) -> Result<Dim5Verdict> {
    match input {
        Dim5Input::Descriptor(d) => {
            if (d.m, d.n) != (5, 2) {
                return Err(Error::Scope(format!("dimension pair ({}, {}) is not (5, 2)", d.m, d.n)));
            }
            let checks = prop1_hypotheses(d)?;
            if all_hold(&checks) && derived_simply_connected(d) {
                Ok(admits(d.clone(), RANK_LAW, Vec::new()))
            } else {
                Ok(Dim5Verdict {
                    decision: Dim5Decision::Undetermined,
                    citation: RANK_LAW.into(),
                    notes: checks.into_iter().filter(|c| !c.holds).map(|c| c.detail).collect(),
                    witness: None,
                    witness_l: None,
                })
            }
        }
        Dim5Input::Expr(e) => {
            let e = e.normalize()?;
            if e.dim() != 5 {
                return Err(Error::Scope(format!("{e} has dimension {}, not 5", e.dim())));
            }
            if e.connectivity() < 1 {
                return Err(Error::Scope(format!("{e} is not known to be simply connected")));
            }
            if e.is_sphere_like() {
                return Ok(admits(special_generic_descriptor(5, 2), SPECIAL_GENERIC_CITATION, Vec::new()));
            }
            let s3_bundle = |s: &ManifoldExpr| match s {
                ManifoldExpr::BundleTotal { fiber, base: 2, .. } => is_sphere(fiber, 3),
                ManifoldExpr::Product(_) => sphere_dims(s).is_some_and(|mut d| {
                    d.sort();
                    d == [2, 3]
                }),
                _ => false,
            };
            let summands = e.summands();
            if summands.iter().all(s3_bundle) {
                return Ok(admits(synthesize(&e, Some(2))?, BARDEN, Vec::new()));
            }
            if let ManifoldExpr::Named(named) = &e {
                if named.torsion.contains(&2) {
                    let mut notes = vec!["H_2 has torsion, so no such map exists".to_string()];
                    if named.ranks.as_ref().is_some_and(|r| r[1..5].iter().all(|x| *x == 0)) {
                        notes.push(
                            "rational homology sphere: whether it admits a round fold map into the plane outside this class is open"
                                .into(),
                        );
                    }
                    return Ok(Dim5Verdict {
                        decision: Dim5Decision::Rejected,
                        citation: BARDEN.into(),
                        notes,
                        witness: None,
                        witness_l: None,
                    });
                }
                let Some(ranks) = &named.ranks else {
                    return Err(Error::InvariantUnavailable(format!(
                        "`{}` declares neither torsion nor homology ranks",
                        named.name
                    )));
                };
                let k = ranks[2] as usize;
                let form = if k == 0 {
                    ManifoldExpr::sphere(5)
                } else {
                    ManifoldExpr::csum(
                        (1..=k)
                            .map(|i| {
                                ManifoldExpr::bundle(ManifoldExpr::sphere(3), 2, Twist::Label(format!("{}#{i}", named.name)))
                            })
                            .collect(),
                    )
                };
                let witness = synthesize(&form, Some(2))?;
                return Ok(admits(witness, BARDEN, vec![format!("{} is identified with {form}", named.name)]));
            }
            Err(Error::InvariantUnavailable(format!("{e} is outside the recognizable 5-dimensional fragment")))
        }
    }
}
