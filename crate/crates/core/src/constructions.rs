//! Builders for explicit round fold maps: spinning a boundary-anchored Morse
//! function, bundles over spheres, and iterated bundles.

use crate::descriptor::{
    replay, Assertion, AxisFiber, ComponentId, FiberConfiguration, FoldEvent, RoundFoldDescriptor, Triviality,
    Violation,
};
use crate::error::{Error, Result};
use crate::expr::{ManifoldExpr, NamedManifold, Twist};

/// Skeleton of a Morse function on a compact manifold whose minimum level
/// is the boundary. Events are listed upward, from the boundary to the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseTrace {
    pub boundary: Vec<(ComponentId, ManifoldExpr)>,
    pub events: Vec<FoldEvent>,
    pub label: Option<AxisFiber>,
}

impl MorseTrace {
    pub fn new(boundary: Vec<(ComponentId, ManifoldExpr)>, events: Vec<FoldEvent>) -> Self {
        MorseTrace { boundary, events, label: None }
    }

    pub fn fiber_dim(&self) -> Option<u32> {
        self.boundary
            .first()
            .map(|(_, e)| e.dim())
            .or_else(|| self.events.iter().flat_map(FoldEvent::produced).map(|(_, e)| e.dim()).next())
    }

    /// Level sets from the boundary upward, checked along the way.
    pub fn levels(&self) -> Result<Vec<FiberConfiguration>> {
        let Some(dim) = self.fiber_dim() else {
            return Err(Error::Argument("trace has neither boundary nor critical points".into()));
        };
        let mut violations = Vec::new();
        let mut ids = std::collections::HashSet::new();
        for (id, e) in &self.boundary {
            if !ids.insert(id) {
                violations.push(Violation { event: None, message: format!("duplicate boundary component {id}") });
            }
            if e.dim() != dim {
                violations.push(Violation {
                    event: None,
                    message: format!("boundary component {id} has dimension {} instead of {dim}", e.dim()),
                });
            }
        }
        let start: FiberConfiguration = self.boundary.iter().cloned().collect();
        let levels = replay(start, &self.events, dim, &mut violations);
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        if !levels.last().is_some_and(FiberConfiguration::is_empty) {
            return Err(Error::Validation(vec![Violation {
                event: None,
                message: "trace does not terminate at empty fiber".into(),
            }]));
        }
        Ok(levels)
    }
}

/// Revolves a trace around `S^{n-1}`: the top of the trace becomes the
/// outermost fold sphere and the boundary becomes the proper core.
pub fn trivial_spinning(t: &MorseTrace, n: u32) -> Result<RoundFoldDescriptor> {
    if n < 1 {
        return Err(Error::Argument("target dimension must be positive".into()));
    }
    let levels = t.levels()?;
    let dim = t.fiber_dim().unwrap_or(0);
    let mut events = Vec::with_capacity(t.events.len());
    for (k, event) in t.events.iter().enumerate().rev() {
        let below = &levels[k];
        let label = |id: &str| below.get(id).cloned().expect("replayed trace");
        events.push(match event.clone() {
            FoldEvent::Birth { id, .. } => FoldEvent::Death { id },
            FoldEvent::Death { id } => {
                let fiber = label(&id);
                FoldEvent::Birth { id, fiber }
            }
            FoldEvent::Merge { left, right, into } => FoldEvent::Split {
                from: into.0,
                left: (left.clone(), label(&left)),
                right: (right.clone(), label(&right)),
                twist: None,
            },
            FoldEvent::Split { from, left, right, .. } => FoldEvent::Merge {
                left: left.0,
                right: right.0,
                into: (from.clone(), label(&from)),
            },
            FoldEvent::Generic { index, id, before, after, chi_sing } => {
                FoldEvent::Generic { index, id, before: after, after: before, chi_sing }
            }
        });
    }
    let mut d = RoundFoldDescriptor::new(dim + n, n, events).with_triviality(Triviality::Smooth);
    d.axis = t.label.clone();
    d.validate().into_result()?;
    Ok(d)
}

/// Two-critical-point trace on `F x [0, 1]` for a sphere or almost-sphere `F`:
/// the ends merge into a sphere, which is then capped by a maximum.
pub fn sphere_trace(fiber: &ManifoldExpr) -> MorseTrace {
    let d = fiber.dim();
    MorseTrace {
        boundary: vec![("c2".into(), fiber.clone()), ("c3".into(), fiber.clone())],
        events: vec![
            FoldEvent::Merge {
                left: "c2".into(),
                right: "c3".into(),
                into: ("c1".into(), ManifoldExpr::sphere(d)),
            },
            FoldEvent::Death { id: "c1".into() },
        ],
        label: Some(AxisFiber::Cylinder(fiber.clone())),
    }
}

/// Sphere dimensions of a product of at least two standard spheres.
fn sphere_factors(fiber: &ManifoldExpr) -> Option<Vec<u32>> {
    match fiber.normalize().ok()? {
        ManifoldExpr::Product(fs) => fs
            .iter()
            .map(|f| match f {
                ManifoldExpr::StandardSphere(d) if *d > 0 => Some(*d),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

/// Product trace on `F x [0, 1]` for `F` a product of spheres: one critical
/// point per cell of the product cell structure of `F`, the empty cell
/// giving the merge of the two ends and the top cell the final maximum.
pub fn product_trace(fiber: &ManifoldExpr) -> Option<MorseTrace> {
    let dims = sphere_factors(fiber)?;
    let k = dims.len();
    let d: u32 = dims.iter().sum();
    let cell_dim = |mask: u32| -> u32 { (0..k).filter(|i| mask & (1 << i) != 0).map(|i| dims[i]).sum() };
    let mut cells: Vec<u32> = (0..1u32 << k).collect();
    cells.sort_by_key(|&mask| (cell_dim(mask), mask));

    // Level set after the cells in `remaining` are still to come.
    let level = |remaining: &[u32]| -> ManifoldExpr {
        let full = (1u32 << k) - 1;
        if remaining.len() + 1 == cells.len() && !remaining.contains(&0) {
            return ManifoldExpr::csum(vec![fiber.clone(), fiber.clone()]);
        }
        let base = remaining.iter().copied().min_by_key(|&m| (cell_dim(m), m)).unwrap_or(full);
        let closure: Vec<u32> = (0..=full).filter(|m| m & base == base).collect();
        let mut sorted = remaining.to_vec();
        sorted.sort();
        if sorted == closure {
            let mut factors: Vec<ManifoldExpr> = (0..k)
                .filter(|i| base & (1 << i) == 0)
                .map(|i| ManifoldExpr::sphere(dims[i]))
                .collect();
            factors.push(ManifoldExpr::sphere(cell_dim(base)));
            let e = if factors.len() == 1 { factors.pop().unwrap() } else { ManifoldExpr::product(factors) };
            return e.normalize().unwrap_or(e);
        }
        let euler = if d.is_multiple_of(2) {
            2 * remaining.iter().map(|&m| if cell_dim(m) % 2 == 0 { 1 } else { -1 }).sum::<i64>()
        } else {
            0
        };
        let tag: Vec<String> = sorted.iter().map(|m| m.to_string()).collect();
        ManifoldExpr::Named(NamedManifold::new(format!("level[{}]", tag.join(",")), d).with_euler(euler))
    };

    let mut events = vec![FoldEvent::Merge {
        left: "c2".into(),
        right: "c3".into(),
        into: ("c1".into(), level(&cells[1..])),
    }];
    for idx in 1..cells.len() - 1 {
        let h = cell_dim(cells[idx]) + 1;
        let before = level(&cells[idx..]);
        let after = level(&cells[idx + 1..]);
        let chi_sing = before.euler().unwrap_or(0) - crate::expr::sphere_euler(h - 1) + 1;
        events.push(FoldEvent::Generic { index: h.min(d + 1 - h), id: "c1".into(), before, after, chi_sing });
    }
    events.push(FoldEvent::Death { id: "c1".into() });
    Some(MorseTrace {
        boundary: vec![("c2".into(), fiber.clone()), ("c3".into(), fiber.clone())],
        events,
        label: Some(AxisFiber::Cylinder(fiber.clone())),
    })
}

/// Default trace on `F x [0, 1]` when one is known.
pub fn default_trace(fiber: &ManifoldExpr) -> Option<MorseTrace> {
    match fiber.normalize().ok()? {
        ManifoldExpr::StandardSphere(_) | ManifoldExpr::AlmostSphere { .. } => Some(sphere_trace(fiber)),
        _ => product_trace(fiber),
    }
}

/// Round fold map on the total space of an `F`-bundle over `S^n`, whose
/// proper-core fiber is two copies of `F`.
pub fn from_bundle(
    fiber: &ManifoldExpr,
    n: u32,
    twist: Twist,
    trace: Option<&MorseTrace>,
) -> Result<RoundFoldDescriptor> {
    fiber.check()?;
    if fiber.dim() == 0 {
        return Err(Error::Argument("the fiber must have positive dimension".into()));
    }
    if n == 0 {
        return Err(Error::Argument("target dimension must be positive".into()));
    }
    let owned;
    let trace = match trace {
        Some(t) => t,
        None => {
            owned = default_trace(fiber)
                .ok_or_else(|| Error::Argument(format!("trace required: no default trace for fiber {fiber}")))?;
            &owned
        }
    };
    let want = fiber.normalize()?;
    let ends: Vec<_> = trace.boundary.iter().map(|(_, e)| e.normalize()).collect::<Result<_>>()?;
    if ends.len() != 2 || ends.iter().any(|e| *e != want) {
        return Err(Error::Argument(format!(
            "trace boundary must be two copies of {fiber}, found [{}]",
            trace.boundary.iter().map(|(id, e)| format!("{id}: {e}")).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut d = trivial_spinning(trace, n)?;
    d.axis = Some(AxisFiber::Cylinder(fiber.clone()));
    d.twist = twist.clone();
    let (a, b) = (&trace.boundary[0].0, &trace.boundary[1].0);
    for event in d.events.iter_mut().rev() {
        if let FoldEvent::Split { left, right, twist: marker, .. } = event {
            if (&left.0 == a && &right.0 == b) || (&left.0 == b && &right.0 == a) {
                *marker = Some(twist);
                break;
            }
        }
    }
    Ok(d)
}

/// Round fold map on an iterated bundle with fibers `F_1, ..., F_k` over
/// `S^n`, provided each stage restricts to a trivial bundle.
pub fn iterated_bundle_spin(
    fibers: &[ManifoldExpr],
    n: u32,
    twists: &[Twist],
    restriction_trivial: bool,
    trace: Option<&MorseTrace>,
) -> Result<RoundFoldDescriptor> {
    match fibers {
        [] => Err(Error::Argument("no fibers given".into())),
        [single] => from_bundle(single, n, twists.first().cloned().unwrap_or(Twist::Trivial), trace),
        _ => {
            if !restriction_trivial {
                return Err(Error::Hypothesis(
                    "each bundle stage must restrict to a trivial bundle; assert restriction_trivial".into(),
                ));
            }
            let product = ManifoldExpr::product(fibers.to_vec());
            let twist = if twists.iter().all(Twist::is_trivial) {
                Twist::Trivial
            } else {
                Twist::Label(twists.iter().map(|t| t.text().to_string()).collect::<Vec<_>>().join("/"))
            };
            let mut d = from_bundle(&product, n, twist, trace)?;
            d.assertions.insert(Assertion::RestrictionTrivial);
            Ok(d)
        }
    }
}
