//! Combinatorial normal form of a round fold map.
//!
//! A descriptor lists the fold events met when walking from the unbounded
//! outer region inward to the proper core. Regular fibers between
//! consecutive fold spheres are recovered by replaying the events.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{sphere_euler, ManifoldExpr, Twist};

pub type ComponentId = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FoldEvent {
    Birth { id: ComponentId, fiber: ManifoldExpr },
    Death { id: ComponentId },
    /// `twist` marks a split closing an `F x [-1, 1]` cylinder with the given clutching label.
    Split {
        from: ComponentId,
        left: (ComponentId, ManifoldExpr),
        right: (ComponentId, ManifoldExpr),
        twist: Option<Twist>,
    },
    Merge {
        left: ComponentId,
        right: ComponentId,
        into: (ComponentId, ManifoldExpr),
    },
    /// Fold of index `index` changing the diffeomorphism type of one component in place.
    Generic {
        index: u32,
        id: ComponentId,
        before: ManifoldExpr,
        after: ManifoldExpr,
        chi_sing: i64,
    },
}

impl FoldEvent {
    pub fn index(&self) -> u32 {
        match self {
            FoldEvent::Birth { .. } | FoldEvent::Death { .. } => 0,
            FoldEvent::Split { .. } | FoldEvent::Merge { .. } => 1,
            FoldEvent::Generic { index, .. } => *index,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FoldEvent::Birth { .. } => "birth",
            FoldEvent::Death { .. } => "death",
            FoldEvent::Split { .. } => "split",
            FoldEvent::Merge { .. } => "merge",
            FoldEvent::Generic { .. } => "generic",
        }
    }

    /// Components present before the event that it acts on.
    pub fn consumed(&self) -> Vec<&ComponentId> {
        match self {
            FoldEvent::Birth { .. } => vec![],
            FoldEvent::Death { id } | FoldEvent::Generic { id, .. } => vec![id],
            FoldEvent::Split { from, .. } => vec![from],
            FoldEvent::Merge { left, right, .. } => vec![left, right],
        }
    }

    /// Components present after the event that it produced or modified.
    pub fn produced(&self) -> Vec<(&ComponentId, &ManifoldExpr)> {
        match self {
            FoldEvent::Birth { id, fiber } => vec![(id, fiber)],
            FoldEvent::Death { .. } => vec![],
            FoldEvent::Split { left, right, .. } => vec![(&left.0, &left.1), (&right.0, &right.1)],
            FoldEvent::Merge { into, .. } => vec![(&into.0, &into.1)],
            FoldEvent::Generic { id, after, .. } => vec![(id, after)],
        }
    }

    /// Every component id mentioned by the event.
    pub fn ids(&self) -> Vec<&ComponentId> {
        let mut ids = self.consumed();
        for (id, _) in self.produced() {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids
    }

    /// Applies `f` to every component id in the event.
    pub fn rename(&self, f: &mut impl FnMut(&str) -> ComponentId) -> FoldEvent {
        match self.clone() {
            FoldEvent::Birth { id, fiber } => FoldEvent::Birth { id: f(&id), fiber },
            FoldEvent::Death { id } => FoldEvent::Death { id: f(&id) },
            FoldEvent::Split { from, left, right, twist } => FoldEvent::Split {
                from: f(&from),
                left: (f(&left.0), left.1),
                right: (f(&right.0), right.1),
                twist,
            },
            FoldEvent::Merge { left, right, into } => FoldEvent::Merge {
                left: f(&left),
                right: f(&right),
                into: (f(&into.0), into.1),
            },
            FoldEvent::Generic { index, id, before, after, chi_sing } => FoldEvent::Generic {
                index,
                id: f(&id),
                before,
                after,
                chi_sing,
            },
        }
    }
}

/// Strength of the known triviality of the surrounding bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Triviality {
    #[serde(rename = "none")]
    Absent,
    #[serde(rename = "top")]
    Topological,
    #[serde(rename = "pl")]
    Pl,
    Smooth,
}

impl Triviality {
    pub fn keyword(self) -> &'static str {
        match self {
            Triviality::Absent => "none",
            Triviality::Topological => "top",
            Triviality::Pl => "pl",
            Triviality::Smooth => "smooth",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Triviality::Absent,
            "top" => Triviality::Topological,
            "pl" => Triviality::Pl,
            "smooth" => Triviality::Smooth,
            _ => return None,
        })
    }

    pub const ALL: [Triviality; 4] = [Triviality::Absent, Triviality::Topological, Triviality::Pl, Triviality::Smooth];
}

/// Compact manifold with boundary met by the preimage of an axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AxisFiber {
    Cylinder(ManifoldExpr),
    PuncturedCylinder(ManifoldExpr, u32),
    NamedWithBoundary {
        name: String,
        boundary: Vec<ManifoldExpr>,
        /// Caller-declared properties, e.g. `boundary_connected` or `simply_connected`.
        props: Vec<String>,
    },
}

impl AxisFiber {
    pub fn has_prop(&self, prop: &str) -> bool {
        matches!(self, AxisFiber::NamedWithBoundary { props, .. } if props.iter().any(|p| p == prop))
    }
}

/// Facts outside the combinatorics that the author vouches for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    NullHomotopic,
    RestrictionTrivial,
}

impl Assertion {
    pub fn keyword(self) -> &'static str {
        match self {
            Assertion::NullHomotopic => "null_homotopic",
            Assertion::RestrictionTrivial => "restriction_trivial",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "null_homotopic" => Some(Assertion::NullHomotopic),
            "restriction_trivial" => Some(Assertion::RestrictionTrivial),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundFoldDescriptor {
    pub m: u32,
    pub n: u32,
    /// Outermost fold sphere first.
    pub events: Vec<FoldEvent>,
    pub triviality: Triviality,
    pub axis: Option<AxisFiber>,
    pub twist: Twist,
    /// `n = 1`: the events describe one half of a mirror-symmetric function.
    pub half_trace: bool,
    pub assertions: BTreeSet<Assertion>,
}

impl RoundFoldDescriptor {
    pub fn new(m: u32, n: u32, events: Vec<FoldEvent>) -> Self {
        RoundFoldDescriptor {
            m,
            n,
            events,
            triviality: Triviality::Absent,
            axis: None,
            twist: Twist::Trivial,
            half_trace: n == 1,
            assertions: BTreeSet::new(),
        }
    }

    pub fn with_triviality(mut self, t: Triviality) -> Self {
        self.triviality = t;
        self
    }

    pub fn with_axis(mut self, axis: AxisFiber) -> Self {
        self.axis = Some(axis);
        self
    }

    pub fn fiber_dim(&self) -> u32 {
        self.m.saturating_sub(self.n)
    }

    /// Number of fold spheres.
    pub fn l(&self) -> usize {
        self.events.len()
    }

    /// Connected components of the singular set (doubled for half traces).
    pub fn singular_component_count(&self) -> usize {
        if self.half_trace {
            2 * self.l()
        } else {
            self.l()
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn regular_fibers(&self) -> Result<Vec<FiberConfiguration>> {
        regular_fibers(self)
    }

    pub fn core(&self) -> Result<FiberConfiguration> {
        Ok(self.regular_fibers()?.pop().unwrap_or_default())
    }

    pub fn component_forest(&self) -> Result<ComponentForest> {
        component_forest(self)
    }

    pub fn has_assertion(&self, a: Assertion) -> bool {
        self.assertions.contains(&a)
    }

    /// Smallest `k` such that no id `c<j>` with `j >= k` appears in the events.
    pub fn next_auto_id(&self) -> usize {
        self.events
            .iter()
            .flat_map(FoldEvent::ids)
            .filter_map(|id| id.strip_prefix('c').and_then(|s| s.parse::<usize>().ok()))
            .max()
            .map_or(1, |k| k + 1)
    }
}

/// Components of a regular fiber, in a stable order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiberConfiguration {
    components: Vec<(ComponentId, ManifoldExpr)>,
}

impl FiberConfiguration {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ManifoldExpr> {
        self.components.iter().find(|(c, _)| c == id).map(|(_, e)| e)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ComponentId, &ManifoldExpr)> {
        self.components.iter().map(|(c, e)| (c, e))
    }

    pub fn ids(&self) -> impl Iterator<Item = &ComponentId> {
        self.components.iter().map(|(c, _)| c)
    }

    pub fn labels(&self) -> impl Iterator<Item = &ManifoldExpr> {
        self.components.iter().map(|(_, e)| e)
    }

    fn position(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|(c, _)| c == id)
    }

    /// Sum of component Euler characteristics.
    pub fn euler(&self) -> Result<i64> {
        self.labels().map(ManifoldExpr::euler).sum()
    }

    /// Applies one event, assuming it has been checked.
    fn apply(&mut self, event: &FoldEvent) {
        match event {
            FoldEvent::Birth { id, fiber } => self.components.push((id.clone(), fiber.clone())),
            FoldEvent::Death { id } => self.components.retain(|(c, _)| c != id),
            FoldEvent::Split { from, left, right, .. } => {
                let at = self.position(from).unwrap_or(self.components.len());
                self.components.retain(|(c, _)| c != from);
                let at = at.min(self.components.len());
                self.components.insert(at, right.clone());
                self.components.insert(at, left.clone());
            }
            FoldEvent::Merge { left, right, into } => {
                let at = [self.position(left), self.position(right)]
                    .into_iter()
                    .flatten()
                    .min()
                    .unwrap_or(self.components.len());
                self.components.retain(|(c, _)| c != left && c != right);
                let at = at.min(self.components.len());
                self.components.insert(at, into.clone());
            }
            FoldEvent::Generic { id, after, .. } => {
                if let Some(slot) = self.components.iter_mut().find(|(c, _)| c == id) {
                    slot.1 = after.clone();
                }
            }
        }
    }
}

impl FromIterator<(ComponentId, ManifoldExpr)> for FiberConfiguration {
    fn from_iter<I: IntoIterator<Item = (ComponentId, ManifoldExpr)>>(iter: I) -> Self {
        FiberConfiguration { components: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Violation {
    /// Zero-based event position, when the violation is tied to one event.
    pub event: Option<usize>,
    pub message: String,
}

impl Violation {
    fn at(event: usize, message: impl Into<String>) -> Self {
        Violation { event: Some(event), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Violation { event: None, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.event {
            Some(k) => write!(f, "event {}: {}", k + 1, self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Region fibers, outermost first; present when replay succeeded.
    pub fibers: Option<Vec<FiberConfiguration>>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Vec<FiberConfiguration>> {
        match (self.violations.is_empty(), self.fibers) {
            (true, Some(f)) => Ok(f),
            (_, _) if !self.violations.is_empty() => Err(Error::Validation(self.violations)),
            _ => Err(Error::Validation(vec![Violation::global("replay failed")])),
        }
    }
}

/// Replays `events` from `start`, checking each event against the current
/// configuration. Shared by descriptors (inward) and Morse traces (upward).
pub(crate) fn replay(
    start: FiberConfiguration,
    events: &[FoldEvent],
    fiber_dim: u32,
    violations: &mut Vec<Violation>,
) -> Vec<FiberConfiguration> {
    let mut seen: HashSet<ComponentId> = start.ids().cloned().collect();
    let mut fibers = vec![start.clone()];
    let mut config = start;
    let max_index = fiber_dim.div_ceil(2);

    let check_expr = |k: usize, id: &str, e: &ManifoldExpr, violations: &mut Vec<Violation>| {
        if let Err(err) = e.check() {
            violations.push(Violation::at(k, format!("component {id}: {err}")));
        } else if e.dim() != fiber_dim {
            violations.push(Violation::at(
                k,
                format!("component {id} has dimension {} but fibers have dimension {fiber_dim}", e.dim()),
            ));
        }
    };

    for (k, event) in events.iter().enumerate() {
        let before = violations.len();
        let kind = event.kind_name();
        let kind = format!("{}{}", kind[..1].to_uppercase(), &kind[1..]);
        for id in event.consumed() {
            if !config.contains(id) {
                violations.push(Violation::at(k, format!("{kind} on absent component {id}")));
            }
        }
        let consumed = event.consumed();
        if consumed.len() == 2 && consumed[0] == consumed[1] {
            violations.push(Violation::at(k, format!("{kind} uses component {} twice", consumed[0])));
        }
        let mut fresh = HashSet::new();
        for (id, e) in event.produced() {
            check_expr(k, id, e, violations);
            let keeps_id = matches!(event, FoldEvent::Generic { .. });
            if !keeps_id && (seen.contains(id) || !fresh.insert(id.clone())) {
                violations.push(Violation::at(k, format!("duplicate component id {id}")));
            }
        }

        match event {
            FoldEvent::Birth { id, fiber } => {
                let ok = matches!(
                    fiber.normalize(),
                    Ok(ManifoldExpr::StandardSphere(_) | ManifoldExpr::AlmostSphere { .. })
                );
                if !ok {
                    violations.push(Violation::at(
                        k,
                        format!("Birth of {id} must create a standard sphere or almost-sphere, got {fiber}"),
                    ));
                }
            }
            FoldEvent::Death { id } => {
                if let Some(label) = config.get(id) {
                    let ok = matches!(
                        label.normalize(),
                        Ok(ManifoldExpr::StandardSphere(_) | ManifoldExpr::AlmostSphere { .. })
                    );
                    if !ok {
                        violations.push(Violation::at(
                            k,
                            format!("Death of {id} requires a sphere or almost-sphere, found {label}"),
                        ));
                    }
                }
            }
            FoldEvent::Split { from, left, right, .. } => {
                if let Some(whole) = config.get(from) {
                    check_euler_additivity(k, whole, &left.1, &right.1, fiber_dim, violations);
                }
            }
            FoldEvent::Merge { left, right, into } => {
                if let (Some(a), Some(b)) = (config.get(left), config.get(right)) {
                    check_euler_additivity(k, &into.1, a, b, fiber_dim, violations);
                }
            }
            FoldEvent::Generic { index, id, before: declared, .. } => {
                if *index == 0 || *index > max_index {
                    violations.push(Violation::at(
                        k,
                        format!("fold index {index} outside 1..={max_index} for fibers of dimension {fiber_dim}"),
                    ));
                }
                check_expr(k, id, declared, violations);
                if let Some(current) = config.get(id) {
                    if current.normalize().ok() != declared.normalize().ok() {
                        violations.push(Violation::at(
                            k,
                            format!("Generic on {id} declares {declared} but the component is {current}"),
                        ));
                    }
                }
            }
        }

        if violations.len() == before {
            let count_before = config.len() as i64;
            config.apply(event);
            let expected = match event {
                FoldEvent::Birth { .. } | FoldEvent::Split { .. } => 1,
                FoldEvent::Death { .. } | FoldEvent::Merge { .. } => -1,
                FoldEvent::Generic { .. } => 0,
            };
            debug_assert_eq!(config.len() as i64 - count_before, expected);
        }
        for (id, _) in event.produced() {
            seen.insert(id.clone());
        }
        fibers.push(config.clone());
    }
    fibers
}

fn check_euler_additivity(
    k: usize,
    whole: &ManifoldExpr,
    a: &ManifoldExpr,
    b: &ManifoldExpr,
    d: u32,
    violations: &mut Vec<Violation>,
) {
    if let (Ok(w), Ok(x), Ok(y)) = (whole.euler(), a.euler(), b.euler()) {
        if w != x + y - sphere_euler(d) {
            violations.push(Violation::at(
                k,
                format!(
                    "index-1 fold between {whole} and {a}, {b} breaks Euler additivity ({w} != {x} + {y} - {})",
                    sphere_euler(d)
                ),
            ));
        }
    }
}

pub fn validate(d: &RoundFoldDescriptor) -> ValidationReport {
    let mut violations = Vec::new();
    if d.n == 0 {
        violations.push(Violation::global("target dimension n must be at least 1"));
    }
    if d.m <= d.n {
        violations.push(Violation::global(format!(
            "source dimension m = {} must exceed target dimension n = {}",
            d.m, d.n
        )));
    }
    if d.events.is_empty() {
        violations.push(Violation::global("a round fold map needs at least one fold sphere"));
    }
    if d.half_trace != (d.n == 1) {
        violations.push(Violation::global("half-trace form is used exactly when n = 1"));
    }
    if !violations.is_empty() {
        return ValidationReport { violations, fibers: None };
    }

    let fibers = replay(FiberConfiguration::default(), &d.events, d.fiber_dim(), &mut violations);
    let core = fibers.last().cloned().unwrap_or_default();
    if let Some(axis) = &d.axis {
        check_axis(axis, &core, d.fiber_dim(), &mut violations);
    }
    ValidationReport { violations, fibers: Some(fibers) }
}

fn check_axis(axis: &AxisFiber, core: &FiberConfiguration, dim: u32, violations: &mut Vec<Violation>) {
    let boundary = match axis {
        AxisFiber::Cylinder(f) | AxisFiber::PuncturedCylinder(f, _) => vec![f.clone(), f.clone()],
        AxisFiber::NamedWithBoundary { boundary, .. } => boundary.clone(),
    };
    if let AxisFiber::PuncturedCylinder(_, 0) = axis {
        violations.push(Violation::global("a punctured cylinder needs at least one hole"));
    }
    let mut remaining: Vec<Option<ManifoldExpr>> = core.labels().map(|e| e.normalize().ok()).collect();
    for b in &boundary {
        if b.dim() != dim {
            violations.push(Violation::global(format!(
                "axis boundary component {b} has dimension {} instead of {dim}",
                b.dim()
            )));
            continue;
        }
        let want = b.normalize().ok();
        match remaining.iter().position(|r| *r == want && r.is_some()) {
            Some(i) => {
                remaining.remove(i);
            }
            None => violations.push(Violation::global(format!(
                "the proper-core fiber lacks the axis boundary component {b}"
            ))),
        }
    }
}

pub fn regular_fibers(d: &RoundFoldDescriptor) -> Result<Vec<FiberConfiguration>> {
    validate(d).into_result()
}

/// Vertex of the radial component graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForestNode {
    /// The fold sphere of this (zero-based) event.
    Event { event: usize },
    /// A component crossing this event's fold sphere untouched.
    Passive { event: usize, id: ComponentId },
    /// A component of the proper-core fiber.
    Capped { id: ComponentId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForestEdge {
    /// Region `1..=l`, region `l` being the proper core.
    pub region: usize,
    pub id: ComponentId,
    pub outer: usize,
    pub inner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentForest {
    pub nodes: Vec<ForestNode>,
    pub edges: Vec<ForestEdge>,
}

impl ComponentForest {
    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.outer == node).count() + self.edges.iter().filter(|e| e.inner == node).count()
    }

    pub fn capped_leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i], ForestNode::Capped { .. }))
            .collect()
    }

    /// Leaves at index-0 folds (births and deaths).
    pub fn free_leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i], ForestNode::Event { .. }) && self.degree(i) == 1)
            .collect()
    }

    pub fn component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut count = self.nodes.len();
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.outer), find(&mut parent, e.inner));
            if a != b {
                parent[a] = b;
                count -= 1;
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// First Betti number of the graph.
    pub fn cycle_count(&self) -> usize {
        self.edges.len() + self.component_count() - self.nodes.len()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.cycle_count() == 0
    }

    pub fn node_name(&self, node: usize) -> String {
        match &self.nodes[node] {
            ForestNode::Event { event } => format!("e{}", event + 1),
            ForestNode::Passive { event, id } => format!("p{}_{id}", event + 1),
            ForestNode::Capped { id } => format!("core_{id}"),
        }
    }
}

pub fn component_forest(d: &RoundFoldDescriptor) -> Result<ComponentForest> {
    let fibers = regular_fibers(d)?;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut open: HashMap<ComponentId, usize> = HashMap::new();

    for (k, event) in d.events.iter().enumerate() {
        let here = nodes.len();
        nodes.push(ForestNode::Event { event: k });
        let touched: HashSet<&ComponentId> = event.consumed().into_iter().collect();
        let mut next = HashMap::new();
        for id in fibers[k].ids() {
            let outer = open[id];
            if touched.contains(id) {
                edges.push(ForestEdge { region: k, id: id.clone(), outer, inner: here });
            } else {
                let p = nodes.len();
                nodes.push(ForestNode::Passive { event: k, id: id.clone() });
                edges.push(ForestEdge { region: k, id: id.clone(), outer, inner: p });
                next.insert(id.clone(), p);
            }
        }
        for (id, _) in event.produced() {
            next.insert(id.clone(), here);
        }
        open = next;
    }
    let l = d.events.len();
    for id in fibers[l].ids() {
        let cap = nodes.len();
        nodes.push(ForestNode::Capped { id: id.clone() });
        edges.push(ForestEdge { region: l, id: id.clone(), outer: open[id], inner: cap });
    }
    Ok(ComponentForest { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(d: u32) -> ManifoldExpr {
        ManifoldExpr::sphere(d)
    }

    fn birth(id: &str, e: ManifoldExpr) -> FoldEvent {
        FoldEvent::Birth { id: id.into(), fiber: e }
    }

    fn split(from: &str, a: &str, b: &str, e: ManifoldExpr) -> FoldEvent {
        FoldEvent::Split { from: from.into(), left: (a.into(), e.clone()), right: (b.into(), e), twist: None }
    }

    #[test]
    fn special_generic_validates() {
        let d = RoundFoldDescriptor::new(7, 2, vec![birth("c1", s(5))]);
        let fibers = d.regular_fibers().unwrap();
        assert_eq!(fibers.len(), 2);
        assert!(fibers[0].is_empty());
        assert_eq!(fibers[1].len(), 1);
    }

    #[test]
    fn split_on_absent_component() {
        let d = RoundFoldDescriptor::new(5, 2, vec![split("c1", "c2", "c3", s(3))]);
        let report = d.validate();
        assert_eq!(report.violations[0].message, "Split on absent component c1");
        assert_eq!(report.violations[0].event, Some(0));
    }

    #[test]
    fn two_sphere_core() {
        let d = RoundFoldDescriptor::new(6, 2, vec![birth("c1", s(4)), split("c1", "c2", "c3", s(4))]);
        let fibers = d.regular_fibers().unwrap();
        assert_eq!(fibers.iter().map(FiberConfiguration::len).collect::<Vec<_>>(), vec![0, 1, 2]);
        let forest = d.component_forest().unwrap();
        assert!(forest.is_tree());
        assert_eq!(forest.free_leaves().len(), 1);
        assert_eq!(forest.capped_leaves().len(), 2);
        assert_eq!((0..forest.nodes.len()).filter(|&i| forest.degree(i) == 3).count(), 1);
    }

    #[test]
    fn merge_back_forms_a_cycle() {
        let d = RoundFoldDescriptor::new(5, 2, vec![
            birth("c1", s(3)),
            split("c1", "c2", "c3", s(3)),
            FoldEvent::Merge { left: "c2".into(), right: "c3".into(), into: ("c4".into(), s(3)) },
            FoldEvent::Death { id: "c4".into() },
        ]);
        let forest = d.component_forest().unwrap();
        assert_eq!(forest.cycle_count(), 1);
        assert!(forest.capped_leaves().is_empty());
    }

    #[test]
    fn single_birth_forest() {
        let d = RoundFoldDescriptor::new(4, 2, vec![birth("c1", s(2))]);
        let forest = d.component_forest().unwrap();
        assert_eq!(forest.edges.len(), 1);
        assert_eq!(forest.free_leaves().len(), 1);
        assert_eq!(forest.capped_leaves().len(), 1);
    }

    #[test]
    fn passive_components_add_edges_per_region() {
        let d = RoundFoldDescriptor::new(5, 2, vec![
            birth("c1", s(3)),
            birth("c2", s(3)),
            split("c1", "c3", "c4", s(3)),
        ]);
        let fibers = d.regular_fibers().unwrap();
        let forest = d.component_forest().unwrap();
        let expected: usize = fibers[1..].iter().map(FiberConfiguration::len).sum();
        assert_eq!(forest.edges.len(), expected);
        assert_eq!(forest.component_count(), 2);
    }

    #[test]
    fn rejects_duplicate_ids_and_bad_index() {
        let d = RoundFoldDescriptor::new(5, 2, vec![birth("c1", s(3)), birth("c1", s(3))]);
        assert!(d.validate().violations.iter().any(|v| v.message.contains("duplicate")));

        let d = RoundFoldDescriptor::new(5, 2, vec![
            birth("c1", s(3)),
            FoldEvent::Generic { index: 3, id: "c1".into(), before: s(3), after: s(3), chi_sing: 1 },
        ]);
        assert!(d.validate().violations.iter().any(|v| v.message.contains("fold index 3")));
    }

    #[test]
    fn cylinder_axis_needs_two_copies_in_core() {
        let d = RoundFoldDescriptor::new(5, 2, vec![birth("c1", s(3))]).with_axis(AxisFiber::Cylinder(s(3)));
        assert!(!d.validate().is_ok());
    }

    #[test]
    fn euler_additivity_enforced() {
        let d = RoundFoldDescriptor::new(6, 2, vec![
            birth("c1", s(4)),
            FoldEvent::Split {
                from: "c1".into(),
                left: ("c2".into(), s(4)),
                right: ("c3".into(), ManifoldExpr::product(vec![s(2), s(2)])),
                twist: None,
            },
        ]);
        assert!(d.validate().violations.iter().any(|v| v.message.contains("Euler")));
    }
}
