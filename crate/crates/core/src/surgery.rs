//! Combining and decomposing round fold maps along standard-sphere fiber
//! components; on source manifolds these realize connected sum and its
//! splitting.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::descriptor::{Assertion, AxisFiber, ComponentId, FoldEvent, RoundFoldDescriptor, Triviality};
use crate::error::{Error, Result};
use crate::expr::{ManifoldExpr, Twist};
use crate::reeb::derived_simply_connected;

/// How the null-homotopy hypothesis on the gluing sphere was discharged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "snake_case")]
pub enum NullHomotopy {
    Derived(String),
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combined {
    pub descriptor: RoundFoldDescriptor,
    pub site: ComponentId,
    /// Ids of the second map that were renamed, old to new.
    pub renamed: BTreeMap<ComponentId, ComponentId>,
    pub null_homotopy: NullHomotopy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposed {
    /// The map keeping the chosen component as a passive core component.
    pub outer: RoundFoldDescriptor,
    /// The split-off map, starting with a fresh birth of the chosen component.
    pub inner: RoundFoldDescriptor,
    pub null_homotopy: NullHomotopy,
}

fn require_dims(f: &RoundFoldDescriptor) -> Result<()> {
    if f.m < 2 * f.n {
        return Err(Error::Hypothesis(format!(
            "surgery along fiber spheres needs m >= 2n, got m = {}, n = {}",
            f.m, f.n
        )));
    }
    Ok(())
}

fn is_standard_sphere(e: &ManifoldExpr, d: u32) -> bool {
    matches!(e.normalize(), Ok(ManifoldExpr::StandardSphere(k)) if k == d)
}

/// Tries to discharge the null-homotopy hypothesis from the map's own data.
pub fn derive_null_homotopy(f: &RoundFoldDescriptor) -> Option<String> {
    if f.m >= 2 * f.n && derived_simply_connected(f) {
        return Some(format!(
            "sphere fibers, folds of index 0 or 1 and a tree component graph give pi_k(M) = 0 for k <= {}",
            f.n - 1
        ));
    }
    if let Some(AxisFiber::Cylinder(fiber)) = &f.axis {
        if f.triviality == Triviality::Smooth && fiber.connectivity() >= f.n as i64 - 1 {
            return Some(format!(
                "total space of a bundle over S^{} with {}-connected fiber {fiber}",
                f.n,
                f.n - 1
            ));
        }
    }
    None
}

fn null_homotopy(f: &RoundFoldDescriptor, assume: bool) -> Result<NullHomotopy> {
    match derive_null_homotopy(f) {
        Some(reason) => Ok(NullHomotopy::Derived(reason)),
        None if assume || f.has_assertion(Assertion::NullHomotopic) => Ok(NullHomotopy::Assumed),
        None => Err(Error::Hypothesis(
            "cannot derive that the gluing sphere is null-homotopic; assert null_homotopic to proceed".into(),
        )),
    }
}

fn sphere_cylinder_holes(f: &RoundFoldDescriptor) -> Option<u32> {
    let d = f.fiber_dim();
    match &f.axis {
        Some(AxisFiber::Cylinder(s)) if is_standard_sphere(s, d) => Some(0),
        Some(AxisFiber::PuncturedCylinder(s, h)) if is_standard_sphere(s, d) => Some(*h),
        _ => None,
    }
}

fn is_special_generic(f: &RoundFoldDescriptor) -> bool {
    matches!(f.events.as_slice(), [FoldEvent::Birth { .. }])
}

/// Combines `f2` into `f1` at the proper-core sphere `site` of `f1`.
pub fn combine(
    f1: &RoundFoldDescriptor,
    site: &str,
    f2: &RoundFoldDescriptor,
    assume_null_homotopic: bool,
) -> Result<Combined> {
    let core1 = f1.core()?;
    f2.validate().into_result()?;
    if (f1.m, f1.n) != (f2.m, f2.n) {
        return Err(Error::Argument(format!(
            "dimension pairs differ: ({}, {}) and ({}, {})",
            f1.m, f1.n, f2.m, f2.n
        )));
    }
    require_dims(f1)?;
    let d = f1.fiber_dim();
    match core1.get(site) {
        None => return Err(Error::Site(format!("{site} is not a proper-core component of the first map"))),
        Some(e) if !is_standard_sphere(e, d) => {
            return Err(Error::Site(format!("proper-core component {site} is {e}, not S^{d}")))
        }
        _ => {}
    }
    let born = match f2.events.first() {
        Some(FoldEvent::Birth { id, fiber }) if is_standard_sphere(fiber, d) => id.clone(),
        Some(FoldEvent::Birth { id, .. }) if assume_null_homotopic => id.clone(),
        _ => {
            return Err(Error::Hypothesis(
                "the outermost fold of the second map must be the birth of a standard sphere".into(),
            ))
        }
    };
    let witness = null_homotopy(f2, assume_null_homotopic)?;

    let taken: HashSet<ComponentId> = f1.events.iter().flat_map(FoldEvent::ids).cloned().collect();
    let mut next = f1.next_auto_id().max(f2.next_auto_id());
    let mut renamed = BTreeMap::new();
    renamed.insert(born.clone(), site.to_string());
    for event in &f2.events[1..] {
        for id in event.ids() {
            if renamed.contains_key(id) {
                continue;
            }
            let target = if taken.contains(id) {
                loop {
                    let candidate = format!("c{next}");
                    next += 1;
                    if !taken.contains(&candidate) {
                        break candidate;
                    }
                }
            } else {
                id.clone()
            };
            renamed.insert(id.clone(), target);
        }
    }
    let mut events = f1.events.clone();
    events.extend(f2.events[1..].iter().map(|e| e.rename(&mut |id| renamed[id].clone())));

    let mut result = RoundFoldDescriptor::new(f1.m, f1.n, events);
    result.triviality = f1.triviality.min(f2.triviality);
    result.assertions = f1.assertions.union(&f2.assertions).copied().collect();
    result.assertions.remove(&Assertion::NullHomotopic);
    if witness == NullHomotopy::Assumed {
        result.assertions.insert(Assertion::NullHomotopic);
    }
    let core = result.core()?;
    (result.axis, result.twist) = if is_special_generic(f1) {
        (f2.axis.clone(), f2.twist.clone())
    } else if is_special_generic(f2) {
        (f1.axis.clone(), f1.twist.clone())
    } else if let (Some(h1), Some(h2)) = (sphere_cylinder_holes(f1), sphere_cylinder_holes(f2)) {
        (Some(AxisFiber::PuncturedCylinder(ManifoldExpr::sphere(d), h1 + h2 + 1)), Twist::Trivial)
    } else {
        let axis = AxisFiber::NamedWithBoundary {
            name: "assembled".into(),
            boundary: core.labels().cloned().collect(),
            props: Vec::new(),
        };
        (Some(axis), Twist::Trivial)
    };
    result.validate().into_result()?;
    renamed.retain(|k, v| k != v);
    Ok(Combined { descriptor: result, site: site.to_string(), renamed, null_homotopy: witness })
}

/// Left fold of [`combine`]; without explicit sites, each map is glued at
/// the next proper-core standard sphere of the original `f1`.
pub fn combine_iterated(
    f1: &RoundFoldDescriptor,
    maps: &[RoundFoldDescriptor],
    sites: Option<&[ComponentId]>,
    assume_null_homotopic: bool,
) -> Result<RoundFoldDescriptor> {
    let d = f1.fiber_dim();
    let sites: Vec<ComponentId> = match sites {
        Some(s) => s.to_vec(),
        None => f1
            .core()?
            .iter()
            .filter(|(_, e)| is_standard_sphere(e, d))
            .map(|(id, _)| id.clone())
            .collect(),
    };
    if sites.len() < maps.len() {
        return Err(Error::Site(format!(
            "site exhaustion: {} maps to glue but only {} standard-sphere sites",
            maps.len(),
            sites.len()
        )));
    }
    let mut acc = f1.clone();
    for (f2, site) in maps.iter().zip(&sites) {
        acc = combine(&acc, site, f2, assume_null_homotopic)?.descriptor;
    }
    Ok(acc)
}

/// Events after region `region` that belong to the inward subtree of `component`.
fn subtree(f: &RoundFoldDescriptor, region: usize, component: &str) -> Result<Vec<usize>> {
    let mut members: HashSet<ComponentId> = HashSet::from([component.to_string()]);
    let mut picked = Vec::new();
    for (k, event) in f.events.iter().enumerate().skip(region) {
        let consumed = event.consumed();
        let inside = consumed.iter().filter(|id| members.contains(**id)).count();
        if inside == 0 {
            continue;
        }
        if inside < consumed.len() {
            return Err(Error::NotSeparable(format!(
                "event {} merges the subtree of {component} with an outside component",
                k + 1
            )));
        }
        for id in consumed {
            members.remove(id);
        }
        for (id, _) in event.produced() {
            members.insert(id.clone());
        }
        picked.push(k);
    }
    Ok(picked)
}

/// Axis fiber and twist read off the shape of a piece produced by decomposition.
fn infer_axis(f: &RoundFoldDescriptor) -> (Option<AxisFiber>, Twist) {
    let d = f.fiber_dim();
    let sphere = ManifoldExpr::sphere(d);
    let sphere_only = matches!(f.events.first(), Some(FoldEvent::Birth { fiber, .. }) if is_standard_sphere(fiber, d))
        && f.events[1..].iter().all(|e| {
            matches!(e, FoldEvent::Split { left, right, .. }
                if is_standard_sphere(&left.1, d) && is_standard_sphere(&right.1, d))
        });
    if sphere_only {
        let twist = match f.events.as_slice() {
            [_, FoldEvent::Split { twist: Some(t), .. }] => t.clone(),
            _ => Twist::Trivial,
        };
        return match f.l() {
            1 => (None, Twist::Trivial),
            2 => (Some(AxisFiber::Cylinder(sphere)), twist),
            l => (Some(AxisFiber::PuncturedCylinder(sphere, l as u32 - 2)), Twist::Trivial),
        };
    }
    if let Some((FoldEvent::Split { left, right, twist: Some(t), .. }, middle)) = f.events[1..].split_last() {
        let linear = matches!(f.events.first(), Some(FoldEvent::Birth { .. }))
            && middle.iter().all(|e| matches!(e, FoldEvent::Generic { .. }));
        if linear && left.1.normalize().ok() == right.1.normalize().ok() {
            return (Some(AxisFiber::Cylinder(left.1.clone())), t.clone());
        }
    }
    let boundary = f.core().map(|c| c.labels().cloned().collect()).unwrap_or_default();
    (Some(AxisFiber::NamedWithBoundary { name: "piece".into(), boundary, props: Vec::new() }), Twist::Trivial)
}

/// Splits off the inward subtree of the standard-sphere component
/// `component` of region `region` (regions numbered `1..=l` from the outside).
pub fn decompose(
    f: &RoundFoldDescriptor,
    region: usize,
    component: &str,
    assume_null_homotopic: bool,
) -> Result<Decomposed> {
    let fibers = f.regular_fibers()?;
    require_dims(f)?;
    let d = f.fiber_dim();
    if region == 0 || region > f.l() {
        return Err(Error::Site(format!("region must lie in 1..={}, got {region}", f.l())));
    }
    match fibers[region].get(component) {
        None => return Err(Error::Site(format!("{component} is not a fiber component of region {region}"))),
        Some(e) if !is_standard_sphere(e, d) => {
            return Err(Error::Site(format!("component {component} of region {region} is {e}, not S^{d}")))
        }
        _ => {}
    }
    let picked = subtree(f, region, component)?;
    let picked_set: HashSet<usize> = picked.iter().copied().collect();

    let mut inner_events = vec![FoldEvent::Birth { id: component.to_string(), fiber: ManifoldExpr::sphere(d) }];
    inner_events.extend(picked.iter().map(|&k| f.events[k].clone()));
    let outer_events: Vec<FoldEvent> = f
        .events
        .iter()
        .enumerate()
        .filter(|(k, _)| !picked_set.contains(k))
        .map(|(_, e)| e.clone())
        .collect();

    let build = |events: Vec<FoldEvent>| {
        let mut g = RoundFoldDescriptor::new(f.m, f.n, events);
        g.triviality = f.triviality;
        g.assertions = f.assertions.clone();
        g.assertions.remove(&Assertion::NullHomotopic);
        (g.axis, g.twist) = infer_axis(&g);
        g
    };
    let outer = build(outer_events);
    let mut inner = build(inner_events);
    let witness = null_homotopy(&inner, assume_null_homotopic)?;
    if witness == NullHomotopy::Assumed {
        inner.assertions.insert(Assertion::NullHomotopic);
    }
    outer.validate().into_result()?;
    inner.validate().into_result()?;
    Ok(Decomposed { outer, inner, null_homotopy: witness })
}

/// Sort key of an event in canonical form; component references are canonical names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum EventKey {
    Birth(ManifoldExpr),
    Death(usize),
    Split(usize, Vec<(ManifoldExpr, Option<Twist>)>),
    Merge(Vec<usize>, ManifoldExpr),
    Generic(usize, u32, ManifoldExpr, ManifoldExpr, i64),
}

/// Events reordered and renamed canonically: two descriptors with the same
/// dependency structure between events yield the same list.
pub fn canonical_events(f: &RoundFoldDescriptor) -> Vec<FoldEvent> {
    // Tokens are component versions; each event consumes and produces tokens.
    let mut current: HashMap<&ComponentId, usize> = HashMap::new();
    let mut next_token = 0usize;
    let mut consumes: Vec<Vec<usize>> = Vec::new();
    let mut produces: Vec<Vec<usize>> = Vec::new();
    for event in &f.events {
        consumes.push(event.consumed().iter().filter_map(|id| current.get(id).copied()).collect());
        let mut out = Vec::new();
        for (id, _) in event.produced() {
            current.insert(id, next_token);
            out.push(next_token);
            next_token += 1;
        }
        if let FoldEvent::Death { id } = event {
            current.remove(id);
        }
        produces.push(out);
    }

    let mut alive: HashSet<usize> = HashSet::new();
    let mut name: HashMap<usize, usize> = HashMap::new();
    let mut fresh = 0usize;
    let mut done = vec![false; f.events.len()];
    let mut out = Vec::with_capacity(f.events.len());
    let label = |e: &ManifoldExpr| e.normalize().unwrap_or_else(|_| e.clone());

    for _ in 0..f.events.len() {
        let mut best: Option<(EventKey, usize)> = None;
        for (k, event) in f.events.iter().enumerate() {
            if done[k] || !consumes[k].iter().all(|t| alive.contains(t)) {
                continue;
            }
            let names: Vec<usize> = consumes[k].iter().map(|t| name[t]).collect();
            let key = match event {
                FoldEvent::Birth { fiber, .. } => EventKey::Birth(label(fiber)),
                FoldEvent::Death { .. } => EventKey::Death(names[0]),
                FoldEvent::Split { left, right, twist, .. } => {
                    let mut kids = vec![(label(&left.1), twist.clone()), (label(&right.1), twist.clone())];
                    kids.sort();
                    EventKey::Split(names[0], kids)
                }
                FoldEvent::Merge { into, .. } => {
                    let mut n = names.clone();
                    n.sort();
                    EventKey::Merge(n, label(&into.1))
                }
                FoldEvent::Generic { index, before, after, chi_sing, .. } => {
                    EventKey::Generic(names[0], *index, label(before), label(after), *chi_sing)
                }
            };
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, k));
            }
        }
        let Some((_, k)) = best else { break };
        done[k] = true;
        let event = &f.events[k];
        let consumed_names: Vec<usize> = consumes[k].iter().map(|t| name[t]).collect();
        for t in &consumes[k] {
            alive.remove(t);
        }
        let mut mint = |t: usize, name: &mut HashMap<usize, usize>| {
            name.insert(t, fresh);
            fresh += 1;
            format!("k{}", fresh)
        };
        let canonical = match event {
            FoldEvent::Birth { fiber, .. } => {
                let id = mint(produces[k][0], &mut name);
                FoldEvent::Birth { id, fiber: label(fiber) }
            }
            FoldEvent::Death { .. } => FoldEvent::Death { id: format!("k{}", consumed_names[0] + 1) },
            FoldEvent::Split { left, right, twist, .. } => {
                let (mut a, mut b) = ((produces[k][0], label(&left.1)), (produces[k][1], label(&right.1)));
                if b.1 < a.1 {
                    std::mem::swap(&mut a, &mut b);
                }
                let ia = mint(a.0, &mut name);
                let ib = mint(b.0, &mut name);
                FoldEvent::Split {
                    from: format!("k{}", consumed_names[0] + 1),
                    left: (ia, a.1),
                    right: (ib, b.1),
                    twist: twist.clone(),
                }
            }
            FoldEvent::Merge { into, .. } => {
                let mut n = consumed_names.clone();
                n.sort();
                let id = mint(produces[k][0], &mut name);
                FoldEvent::Merge {
                    left: format!("k{}", n[0] + 1),
                    right: format!("k{}", n[1] + 1),
                    into: (id, label(&into.1)),
                }
            }
            FoldEvent::Generic { index, before, after, chi_sing, .. } => {
                name.insert(produces[k][0], consumed_names[0]);
                FoldEvent::Generic {
                    index: *index,
                    id: format!("k{}", consumed_names[0] + 1),
                    before: label(before),
                    after: label(after),
                    chi_sing: *chi_sing,
                }
            }
        };
        alive.extend(produces[k].iter().copied());
        out.push(canonical);
    }
    out
}

/// Equality of descriptors up to renaming components and reordering
/// independent events.
pub fn isomorphic(a: &RoundFoldDescriptor, b: &RoundFoldDescriptor) -> bool {
    (a.m, a.n, a.half_trace) == (b.m, b.n, b.half_trace) && canonical_events(a) == canonical_events(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::from_bundle;

    fn bundle(d: u32, n: u32, t: &str) -> RoundFoldDescriptor {
        from_bundle(&ManifoldExpr::sphere(d), n, Twist::label(t), None).unwrap()
    }

    #[test]
    fn combine_two_sphere_bundles() {
        let f1 = bundle(3, 2, "a");
        let f2 = bundle(3, 2, "b");
        let c = combine(&f1, "c2", &f2, false).unwrap();
        assert_eq!(c.descriptor.l(), 3);
        assert_eq!(c.descriptor.core().unwrap().len(), 3);
        assert!(matches!(c.null_homotopy, NullHomotopy::Derived(_)));
        assert_eq!(c.descriptor.axis, Some(AxisFiber::PuncturedCylinder(ManifoldExpr::sphere(3), 1)));
    }

    #[test]
    fn combine_requires_m_at_least_2n() {
        let f = bundle(3, 4, "a");
        assert!(matches!(combine(&f, "c2", &f, true), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn combine_rejects_bad_site() {
        let f = bundle(3, 2, "a");
        assert!(matches!(combine(&f, "c1", &f, false), Err(Error::Site(_))));
    }

    #[test]
    fn decompose_inverts_combine() {
        let f1 = bundle(3, 2, "a");
        let f2 = bundle(3, 2, "b");
        let c = combine(&f1, "c2", &f2, false).unwrap();
        let region = f1.l();
        let parts = decompose(&c.descriptor, region, "c2", false).unwrap();
        assert!(isomorphic(&parts.outer, &f1));
        assert!(isomorphic(&parts.inner, &f2));
        assert_eq!(parts.outer.l() + parts.inner.l(), c.descriptor.l() + 1);
    }

    #[test]
    fn empty_subtree_splits_off_special_generic() {
        let f = bundle(3, 2, "a");
        let parts = decompose(&f, 2, "c3", false).unwrap();
        assert_eq!(parts.inner.l(), 1);
        assert_eq!(parts.outer.events, f.events);
    }

    #[test]
    fn merges_across_the_subtree_are_not_separable() {
        let s = ManifoldExpr::sphere(4);
        let f = RoundFoldDescriptor::new(6, 2, vec![
            FoldEvent::Birth { id: "c1".into(), fiber: s.clone() },
            FoldEvent::Birth { id: "c2".into(), fiber: s.clone() },
            FoldEvent::Merge { left: "c1".into(), right: "c2".into(), into: ("c3".into(), s) },
        ]);
        assert!(matches!(decompose(&f, 2, "c1", true), Err(Error::NotSeparable(_))));
    }

    #[test]
    fn canonical_form_ignores_names_and_interleaving() {
        let s = ManifoldExpr::sphere(3);
        let split = |from: &str, a: &str, b: &str| FoldEvent::Split {
            from: from.into(),
            left: (a.into(), s.clone()),
            right: (b.into(), s.clone()),
            twist: None,
        };
        let a = RoundFoldDescriptor::new(5, 2, vec![
            FoldEvent::Birth { id: "c1".into(), fiber: s.clone() },
            split("c1", "c2", "c3"),
            split("c2", "c4", "c5"),
            split("c3", "c6", "c7"),
        ]);
        let b = RoundFoldDescriptor::new(5, 2, vec![
            FoldEvent::Birth { id: "x".into(), fiber: s.clone() },
            split("x", "y", "z"),
            split("z", "u", "v"),
            split("y", "p", "q"),
        ]);
        assert!(isomorphic(&a, &b));
        let c = RoundFoldDescriptor::new(5, 2, vec![
            FoldEvent::Birth { id: "x".into(), fiber: s.clone() },
            split("x", "y", "z"),
            split("z", "u", "v"),
            split("v", "p", "q"),
        ]);
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn iterated_combination_exhausts_sites() {
        let f1 = bundle(3, 2, "a");
        let maps = vec![bundle(3, 2, "b"), bundle(3, 2, "c")];
        let g = combine_iterated(&f1, &maps, None, false).unwrap();
        assert_eq!(g.l(), 4);
        let maps = vec![bundle(3, 2, "b"); 3];
        assert!(matches!(combine_iterated(&f1, &maps, None, false), Err(Error::Site(_))));
        assert_eq!(combine_iterated(&f1, &[], None, false).unwrap(), f1);
    }
}
