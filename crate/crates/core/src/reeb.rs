//! CW model of the Reeb space, homology reports and the Euler characteristic
//! of the source manifold.
//!
//! For `n >= 2` the Reeb space is `S^{n-1} x L` with one `n`-disc glued along
//! `S^{n-1} x {v}` for every proper-core leaf `v` of the component graph `L`.
//! `S^{n-1}` carries its minimal structure: a point `p` and one top cell `s`.
//! For `n = 1` the Reeb space is a graph: two mirror copies of `L` whose core
//! leaves are joined by an edge.

use serde::Serialize;

use crate::chain::{homology, ChainComplex, HomologyProfile};
use crate::descriptor::{ComponentForest, FoldEvent, RoundFoldDescriptor};
use crate::error::{Error, Result};
use crate::expr::{sphere_euler, ManifoldExpr};
use crate::snf::IntMatrix;

/// Where a cell of the Reeb complex comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellOrigin {
    /// `{v} x p`
    VertexPoint { node: usize },
    /// `{v} x s`
    VertexSphere { node: usize },
    /// `e x p`
    EdgePoint { edge: usize },
    /// `e x s`
    EdgeSphere { edge: usize },
    /// Disc over a proper-core leaf.
    Cap { node: usize },
    /// One of the two mirror copies (`n = 1`).
    VertexCopy { node: usize, side: u8 },
    EdgeCopy { edge: usize, side: u8 },
    /// Edge joining the mirror copies of a core leaf (`n = 1`).
    CoreEdge { node: usize },
}

#[derive(Debug, Clone)]
pub struct ReebComplex {
    pub complex: ChainComplex,
    /// `cells[k][i]` is the origin of the `i`-th cell of degree `k`.
    pub cells: Vec<Vec<CellOrigin>>,
    pub forest: ComponentForest,
}

impl ReebComplex {
    pub fn cap_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| matches!(c, CellOrigin::Cap { .. } | CellOrigin::CoreEdge { .. }))
            .count()
    }

    pub fn homology(&self) -> Result<HomologyProfile> {
        homology(&self.complex)
    }
}

struct Builder {
    cells: Vec<Vec<CellOrigin>>,
    entries: Vec<Vec<(usize, usize, i64)>>,
}

impl Builder {
    fn new(top: usize) -> Self {
        Builder { cells: vec![Vec::new(); top + 1], entries: vec![Vec::new(); top + 1] }
    }

    fn add(&mut self, degree: usize, origin: CellOrigin) -> usize {
        self.cells[degree].push(origin);
        self.cells[degree].len() - 1
    }

    /// Records `coeff * face` in the boundary of `cell` (both indices in their degrees).
    fn face(&mut self, degree: usize, cell: usize, face: usize, coeff: i64) {
        self.entries[degree].push((face, cell, coeff));
    }

    fn finish(self, forest: ComponentForest) -> Result<ReebComplex> {
        let counts: Vec<usize> = self.cells.iter().map(Vec::len).collect();
        let boundaries = (1..counts.len())
            .map(|k| {
                let mut m = IntMatrix::zeros(counts[k - 1], counts[k]);
                for &(i, j, v) in &self.entries[k] {
                    m.add_to(i, j, v);
                }
                m
            })
            .collect();
        let complex = ChainComplex::new(counts, boundaries)?;
        Ok(ReebComplex { complex, cells: self.cells, forest })
    }
}

pub fn build_reeb(d: &RoundFoldDescriptor) -> Result<ReebComplex> {
    let forest = d.component_forest()?;
    let caps = forest.capped_leaves();
    if d.n == 1 {
        return build_graph_double(forest, &caps);
    }
    let n = d.n as usize;
    let mut b = Builder::new(n);
    let v_p: Vec<usize> = (0..forest.nodes.len())
        .map(|node| b.add(0, CellOrigin::VertexPoint { node }))
        .collect();
    let v_s: Vec<usize> = (0..forest.nodes.len())
        .map(|node| b.add(n - 1, CellOrigin::VertexSphere { node }))
        .collect();
    for (edge, e) in forest.edges.iter().enumerate() {
        let c = b.add(1, CellOrigin::EdgePoint { edge });
        b.face(1, c, v_p[e.inner], 1);
        b.face(1, c, v_p[e.outer], -1);
    }
    for (edge, e) in forest.edges.iter().enumerate() {
        let c = b.add(n, CellOrigin::EdgeSphere { edge });
        b.face(n, c, v_s[e.inner], 1);
        b.face(n, c, v_s[e.outer], -1);
    }
    for &node in &caps {
        let c = b.add(n, CellOrigin::Cap { node });
        b.face(n, c, v_s[node], 1);
    }
    b.finish(forest)
}

fn build_graph_double(forest: ComponentForest, caps: &[usize]) -> Result<ReebComplex> {
    let mut b = Builder::new(1);
    let mut vertex = vec![[0usize; 2]; forest.nodes.len()];
    for side in 0..2u8 {
        for (node, v) in vertex.iter_mut().enumerate() {
            v[side as usize] = b.add(0, CellOrigin::VertexCopy { node, side });
        }
    }
    for side in 0..2u8 {
        for (edge, e) in forest.edges.iter().enumerate() {
            let c = b.add(1, CellOrigin::EdgeCopy { edge, side });
            b.face(1, c, vertex[e.inner][side as usize], 1);
            b.face(1, c, vertex[e.outer][side as usize], -1);
        }
    }
    for &node in caps {
        let c = b.add(1, CellOrigin::CoreEdge { node });
        b.face(1, c, vertex[node][1], 1);
        b.face(1, c, vertex[node][0], -1);
    }
    b.finish(forest)
}

/// Euler characteristic of the source manifold by additivity over the
/// stratification into fold spheres, open annuli and the open core disc.
pub fn euler_characteristic(d: &RoundFoldDescriptor) -> Result<i64> {
    let fibers = d.regular_fibers()?;
    let sphere = sphere_euler(d.n - 1);
    let mut chi = 0i64;
    for (k, event) in d.events.iter().enumerate() {
        let outer = &fibers[k];
        let consumed = event.consumed();
        let mut passive = 0i64;
        for (id, label) in outer.iter() {
            if !consumed.contains(&id) {
                passive += label.euler()?;
            }
        }
        let singular = match event {
            FoldEvent::Birth { .. } | FoldEvent::Death { .. } => 1,
            FoldEvent::Split { left, right, .. } => left.1.euler()? + right.1.euler()? - 1,
            FoldEvent::Merge { left, right, .. } => {
                let a = outer.get(left).map(ManifoldExpr::euler).transpose()?.unwrap_or(0);
                let b = outer.get(right).map(ManifoldExpr::euler).transpose()?.unwrap_or(0);
                a + b - 1
            }
            FoldEvent::Generic { chi_sing, .. } => *chi_sing,
        };
        chi += sphere * (passive + singular);
    }
    let l = d.events.len();
    for region in &fibers[1..l] {
        chi -= sphere * region.euler()?;
    }
    let core_sign = if d.n.is_multiple_of(2) { 1 } else { -1 };
    chi += core_sign * fibers[l].euler()?;
    if d.m % 2 == 1 && chi != 0 {
        return Err(Error::Inconsistent(format!(
            "odd-dimensional source but the fiber data give Euler characteristic {chi}"
        )));
    }
    Ok(chi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl HypothesisCheck {
    pub fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        HypothesisCheck { name: name.into(), holds, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeRank {
    pub degree: u32,
    pub rank: usize,
}

/// Homotopy and homology facts for maps whose fibers are spheres and whose folds have index 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop1Report {
    pub hypotheses: Vec<HypothesisCheck>,
    /// Number of proper-core fiber components.
    pub l: usize,
    /// Degree-`n` homology of the Reeb space.
    #[serde(rename = "H_n")]
    pub h_n: DegreeRank,
    /// Degree-`n` homology of the source manifold, when determined.
    pub source_h_n: Option<DegreeRank>,
    pub simply_connected: bool,
    pub homotopy: Vec<String>,
    pub reeb_homology: HomologyProfile,
}

/// Checklist used by [`prop1_report`]; exposed so callers can report failures.
pub fn prop1_hypotheses(d: &RoundFoldDescriptor) -> Result<Vec<HypothesisCheck>> {
    let fibers = d.regular_fibers()?;
    let forest = d.component_forest()?;
    let non_spheres: Vec<String> = fibers
        .iter()
        .flat_map(|f| f.iter())
        .filter(|(_, e)| !e.normalize().map(|x| x.is_sphere_like()).unwrap_or(false))
        .map(|(id, e)| format!("{id}: {e}"))
        .collect();
    let high_index: Vec<String> = d
        .events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.index() >= 2)
        .map(|(k, e)| format!("event {} has index {}", k + 1, e.index()))
        .collect();
    let l = fibers.last().map_or(0, |f| f.len());
    Ok(vec![
        HypothesisCheck::new(
            "fibers_are_spheres",
            non_spheres.is_empty(),
            if non_spheres.is_empty() {
                "every regular fiber component is a sphere or almost-sphere".to_string()
            } else {
                format!("non-sphere components: {}", non_spheres.join(", "))
            },
        ),
        HypothesisCheck::new(
            "indices_0_or_1",
            high_index.is_empty(),
            if high_index.is_empty() { "all folds have index 0 or 1".to_string() } else { high_index.join(", ") },
        ),
        HypothesisCheck::new("m_gt_n_ge_2", d.m > d.n && d.n >= 2, format!("m = {}, n = {}", d.m, d.n)),
        HypothesisCheck::new(
            "component_graph_connected",
            forest.is_connected(),
            format!("{} component(s)", forest.component_count()),
        ),
        HypothesisCheck::new("core_nonempty", l >= 1, format!("{l} proper-core component(s)")),
    ])
}

/// Whether the descriptor is in the sphere-fiber, index-0/1 class with a tree
/// component graph and `m - n >= 2`; then the source is simply connected.
pub fn derived_simply_connected(d: &RoundFoldDescriptor) -> bool {
    let Ok(checks) = prop1_hypotheses(d) else { return false };
    if !checks.iter().all(|c| c.holds) {
        return false;
    }
    d.m - d.n >= 2 && d.component_forest().map(|f| f.is_tree()).unwrap_or(false)
}

pub fn prop1_report(d: &RoundFoldDescriptor) -> Result<Prop1Report> {
    let hypotheses = prop1_hypotheses(d)?;
    let failed: Vec<String> = hypotheses
        .iter()
        .filter(|h| !h.holds)
        .map(|h| format!("{} ({})", h.name, h.detail))
        .collect();
    if !failed.is_empty() {
        return Err(Error::Hypothesis(failed.join("; ")));
    }
    let reeb = build_reeb(d)?;
    let profile = reeb.homology()?;
    let l = reeb.forest.capped_leaves().len();
    let (m, n) = (d.m, d.n);
    let rank_n = profile.rank(n as usize);
    let tree = reeb.forest.is_tree();
    if tree {
        let expected_ok = rank_n == l - 1
            && profile.is_torsion_free()
            && (1..n as usize).all(|k| profile.rank(k) == 0);
        if !expected_ok {
            return Err(Error::Inconsistent(format!(
                "Reeb space homology {:?} is not that of a bouquet of {} copies of S^{n}",
                profile.betti(),
                l - 1
            )));
        }
    }
    let simply_connected = tree && m - n >= 2;
    let mut homotopy = vec![format!("pi_k(M) = pi_k(W_f) for 0 <= k <= {}", m - n - 1)];
    let mut source_h_n = None;
    if simply_connected && m >= 2 * n {
        homotopy.push(format!("pi_k(M) = 0 for 1 <= k <= {}", n - 1));
        let rank = if m > 2 * n { l - 1 } else { 2 * (l - 1) };
        if m > 2 * n {
            homotopy.push(format!("pi_{n}(M) = H_{n}(M; Z) = Z^{}", l - 1));
        }
        source_h_n = Some(DegreeRank { degree: n, rank });
    } else if m < 2 * n {
        homotopy.push(format!("H_{n}(M; Z) is not determined since m < 2n"));
    }
    Ok(Prop1Report {
        hypotheses,
        l,
        h_n: DegreeRank { degree: n, rank: rank_n },
        source_h_n,
        simply_connected,
        homotopy,
        reeb_homology: profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::FoldEvent;

    fn s(d: u32) -> ManifoldExpr {
        ManifoldExpr::sphere(d)
    }

    fn two_sphere(m: u32, n: u32) -> RoundFoldDescriptor {
        let d = m - n;
        RoundFoldDescriptor::new(m, n, vec![
            FoldEvent::Birth { id: "c1".into(), fiber: s(d) },
            FoldEvent::Split { from: "c1".into(), left: ("c2".into(), s(d)), right: ("c3".into(), s(d)), twist: None },
        ])
    }

    #[test]
    fn special_generic_reeb_space_is_a_disc() {
        let d = RoundFoldDescriptor::new(5, 2, vec![FoldEvent::Birth { id: "c1".into(), fiber: s(3) }]);
        let h = build_reeb(&d).unwrap().homology().unwrap();
        assert_eq!(h.betti(), vec![1, 0, 0]);
    }

    #[test]
    fn two_core_components_give_one_sphere() {
        for n in 2..5 {
            let h = build_reeb(&two_sphere(2 * n + 1, n)).unwrap().homology().unwrap();
            let mut expected = vec![0; n as usize + 1];
            expected[0] = 1;
            expected[n as usize] = 1;
            assert_eq!(h.betti(), expected);
        }
    }

    #[test]
    fn cycle_gives_first_homology() {
        let d = RoundFoldDescriptor::new(5, 2, vec![
            FoldEvent::Birth { id: "c1".into(), fiber: s(3) },
            FoldEvent::Split { from: "c1".into(), left: ("c2".into(), s(3)), right: ("c3".into(), s(3)), twist: None },
            FoldEvent::Merge { left: "c2".into(), right: "c3".into(), into: ("c4".into(), s(3)) },
        ]);
        let h = build_reeb(&d).unwrap().homology().unwrap();
        assert!(h.rank(1) >= 1);
    }

    #[test]
    fn half_trace_graph() {
        let h = build_reeb(&two_sphere(3, 1)).unwrap().homology().unwrap();
        assert_eq!(h.betti(), vec![1, 1]);
    }

    #[test]
    fn euler_of_sphere_bundles() {
        assert_eq!(euler_characteristic(&two_sphere(4, 2)).unwrap(), 4);
        assert_eq!(euler_characteristic(&two_sphere(5, 3)).unwrap(), 0);
        assert_eq!(euler_characteristic(&two_sphere(6, 3)).unwrap(), 0);
        assert_eq!(euler_characteristic(&two_sphere(6, 2)).unwrap(), 4);
        assert_eq!(euler_characteristic(&two_sphere(3, 1)).unwrap(), 0);
        assert_eq!(euler_characteristic(&two_sphere(4, 1)).unwrap(), 0);
    }

    #[test]
    fn prop1_ranks() {
        let r = prop1_report(&two_sphere(5, 2)).unwrap();
        assert_eq!(r.h_n.rank, 1);
        assert_eq!(r.source_h_n, Some(DegreeRank { degree: 2, rank: 1 }));
        let r = prop1_report(&two_sphere(4, 2)).unwrap();
        assert_eq!(r.source_h_n, Some(DegreeRank { degree: 2, rank: 2 }));
        let r = prop1_report(&two_sphere(7, 4)).unwrap();
        assert_eq!(r.h_n, DegreeRank { degree: 4, rank: 1 });
        assert_eq!(r.source_h_n, None);
    }

    #[test]
    fn prop1_rejects_high_index() {
        let d = RoundFoldDescriptor::new(8, 2, vec![
            FoldEvent::Birth { id: "c1".into(), fiber: s(6) },
            FoldEvent::Generic { index: 2, id: "c1".into(), before: s(6), after: s(6), chi_sing: 1 },
        ]);
        assert!(matches!(prop1_report(&d), Err(Error::Hypothesis(_))));
    }
}
