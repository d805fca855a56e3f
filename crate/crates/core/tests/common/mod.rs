#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rfm_core::constructions::MorseTrace;
use rfm_core::{AxisFiber, FoldEvent, ManifoldExpr, NamedManifold, RoundFoldDescriptor, Triviality, Twist};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn s(d: u32) -> ManifoldExpr {
    ManifoldExpr::sphere(d)
}

/// Sphere birth followed by `l - 1` splits of randomly chosen core spheres.
pub fn sphere_tree(rng: &mut StdRng, m: u32, n: u32, l: usize) -> RoundFoldDescriptor {
    let d = m - n;
    let mut core = vec!["c1".to_string()];
    let mut events = vec![FoldEvent::Birth { id: "c1".into(), fiber: s(d) }];
    let mut next = 2;
    for _ in 1..l {
        let at = rng.random_range(0..core.len());
        let from = core.remove(at);
        let (a, b) = (format!("c{next}"), format!("c{}", next + 1));
        next += 2;
        let twist = match rng.random_range(0..3) {
            0 => None,
            1 => Some(Twist::Trivial),
            _ => Some(Twist::label(format!("t{}", rng.random_range(0..5)))),
        };
        events.push(FoldEvent::Split { from, left: (a.clone(), s(d)), right: (b.clone(), s(d)), twist });
        core.push(a);
        core.push(b);
    }
    RoundFoldDescriptor::new(m, n, events).with_triviality(Triviality::Smooth)
}

/// Random `(m, n)` with `2 <= n <= 4` and `2n <= m <= 12`.
pub fn dims(rng: &mut StdRng) -> (u32, u32) {
    let n = rng.random_range(2..=4);
    (rng.random_range(2 * n..=12), n)
}

fn label(rng: &mut StdRng) -> String {
    const POOL: [&str; 6] = ["a", "tau", "x y", "q\"uote", "back\\slash", "tab\tnl\n"];
    POOL[rng.random_range(0..POOL.len())].to_string()
}

fn twist(rng: &mut StdRng) -> Twist {
    if rng.random_bool(0.3) {
        Twist::Trivial
    } else {
        Twist::Label(label(rng))
    }
}

/// Arbitrary expression tree, not necessarily dimensionally consistent.
pub fn expr(rng: &mut StdRng, depth: u32) -> ManifoldExpr {
    let leaf = depth == 0 || rng.random_bool(0.4);
    let pick = if leaf { rng.random_range(0..4) } else { rng.random_range(0..7) };
    match pick {
        0 => s(rng.random_range(0..9)),
        1 => ManifoldExpr::AlmostSphere { dim: rng.random_range(1..9), twist: twist(rng) },
        2 => ManifoldExpr::HomotopySphere { dim: rng.random_range(1..9), theta: twist(rng) },
        3 => {
            let mut n = NamedManifold::new(label(rng), rng.random_range(0..9));
            if rng.random_bool(0.5) {
                n.euler = Some(rng.random_range(-40..40));
            }
            n.connectivity = rng.random_range(0..3);
            if rng.random_bool(0.5) {
                n.ranks = Some((0..=n.dim).map(|_| rng.random_range(0..4)).collect());
            }
            if rng.random_bool(0.3) {
                n.torsion = vec![rng.random_range(1..4)];
            }
            ManifoldExpr::Named(n)
        }
        4 => ManifoldExpr::Product((0..rng.random_range(0..4)).map(|_| expr(rng, depth - 1)).collect()),
        5 => ManifoldExpr::bundle(expr(rng, depth - 1), rng.random_range(0..6), twist(rng)),
        _ => ManifoldExpr::ConnectedSum((0..rng.random_range(0..4)).map(|_| expr(rng, depth - 1)).collect()),
    }
}

fn id(rng: &mut StdRng) -> String {
    const POOL: [&str; 6] = ["c1", "c2", "k3", "core_a", "with space", "x-y"];
    POOL[rng.random_range(0..POOL.len())].to_string()
}

pub fn event(rng: &mut StdRng) -> FoldEvent {
    match rng.random_range(0..5) {
        0 => FoldEvent::Birth { id: id(rng), fiber: expr(rng, 2) },
        1 => FoldEvent::Death { id: id(rng) },
        2 => FoldEvent::Split {
            from: id(rng),
            left: (id(rng), expr(rng, 2)),
            right: (id(rng), expr(rng, 2)),
            twist: rng.random_bool(0.5).then(|| twist(rng)),
        },
        3 => FoldEvent::Merge { left: id(rng), right: id(rng), into: (id(rng), expr(rng, 2)) },
        _ => FoldEvent::Generic {
            index: rng.random_range(0..4),
            id: id(rng),
            before: expr(rng, 1),
            after: expr(rng, 1),
            chi_sing: rng.random_range(-5..5),
        },
    }
}

pub fn axis(rng: &mut StdRng) -> AxisFiber {
    match rng.random_range(0..3) {
        0 => AxisFiber::Cylinder(expr(rng, 2)),
        1 => AxisFiber::PuncturedCylinder(expr(rng, 2), rng.random_range(0..5)),
        _ => AxisFiber::NamedWithBoundary {
            name: label(rng),
            boundary: (0..rng.random_range(0..3)).map(|_| expr(rng, 1)).collect(),
            props: (0..rng.random_range(0..3)).map(|_| label(rng)).collect(),
        },
    }
}

/// Syntactically arbitrary descriptor.
pub fn descriptor(rng: &mut StdRng) -> RoundFoldDescriptor {
    let n = rng.random_range(0..6);
    let mut d = RoundFoldDescriptor::new(rng.random_range(0..14), n, (0..rng.random_range(0..6)).map(|_| event(rng)).collect());
    d.triviality = Triviality::ALL[rng.random_range(0..4)];
    if rng.random_bool(0.5) {
        d.axis = Some(axis(rng));
    }
    d.twist = twist(rng);
    d.half_trace = rng.random_bool(0.5);
    if rng.random_bool(0.3) {
        d.assertions.insert(rfm_core::Assertion::NullHomotopic);
    }
    if rng.random_bool(0.3) {
        d.assertions.insert(rfm_core::Assertion::RestrictionTrivial);
    }
    d
}

pub fn trace(rng: &mut StdRng) -> MorseTrace {
    MorseTrace {
        boundary: (0..rng.random_range(0..3)).map(|_| (id(rng), expr(rng, 2))).collect(),
        events: (0..rng.random_range(0..5)).map(|_| event(rng)).collect(),
        label: rng.random_bool(0.5).then(|| axis(rng)),
    }
}

/// Connected sum of `k` sphere bundles over `S^n` with random clutching labels.
pub fn sphere_bundle_sum(rng: &mut StdRng, k: usize, m: u32, n: u32) -> ManifoldExpr {
    ManifoldExpr::csum(
        (0..k)
            .map(|_| {
                let t = if rng.random_bool(0.25) { Twist::Trivial } else { Twist::label(format!("t{}", rng.random_range(0..4))) };
                ManifoldExpr::bundle(s(m - n), n, t)
            })
            .collect(),
    )
}
