//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rfm_core::classify::{Dim5Decision, Dim5Input};
use rfm_core::dsl::{self, Parsed};
use rfm_core::presets::{self, SHIPPED};
use rfm_core::report::Report;
use rfm_core::snf::rational_rank;
use rfm_core::*;

use common::*;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rank_law() -> Result<String, String> {
    let mut rng = rng(1);
    for trial in 0..200 {
        let (m, n) = dims(&mut rng);
        let l = rng.random_range(1..=20);
        let d = sphere_tree(&mut rng, m, n, l);
        let h = build_reeb(&d).map_err(|e| e.to_string())?.homology().map_err(|e| e.to_string())?;
        let n = n as usize;
        ensure(h.rank(n) == l - 1, || format!("trial {trial}: rank H_{n} = {} for l = {l}", h.rank(n)))?;
        ensure(h.is_torsion_free(), || format!("trial {trial}: torsion in {:?}", h.groups))?;
        ensure((1..n).all(|k| h.rank(k) == 0), || format!("trial {trial}: betti {:?}", h.betti()))?;
    }
    Ok("200 descriptors: H_n free of rank l-1, lower degrees vanish".into())
}

fn bouquet() -> Result<String, String> {
    let mut count = 0;
    for n in 1..=5u32 {
        for m in n + 1..=12 {
            let d = from_bundle(&s(m - n), n, Twist::label("tau"), None).map_err(|e| e.to_string())?;
            let h = build_reeb(&d).map_err(|e| e.to_string())?.homology().map_err(|e| e.to_string())?;
            let mut want = vec![0; h.groups.len()];
            want[0] = 1;
            want[n as usize] = 1;
            ensure(h.betti() == want && h.is_torsion_free(), || format!("({m}, {n}): betti {:?}", h.betti()))?;
            count += 1;
        }
    }
    Ok(format!("{count} sphere bundles have Reeb spaces with the homology of S^n"))
}

fn surgery_arithmetic() -> Result<String, String> {
    let mut rng = rng(3);
    for trial in 0..100 {
        let (m, n) = dims(&mut rng);
        let f1 = { let l = rng.random_range(1..=8); sphere_tree(&mut rng, m, n, l) };
        let f2 = { let l = rng.random_range(1..=8); sphere_tree(&mut rng, m, n, l) };
        let core = f1.core().map_err(|e| e.to_string())?;
        let site = core.ids().nth(rng.random_range(0..core.len())).unwrap().clone();
        let c = combine(&f1, &site, &f2, false).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(c.descriptor.l() == f1.l() + f2.l() - 1, || format!("trial {trial}: l = {}", c.descriptor.l()))?;
        let parts = decompose(&c.descriptor, f1.l(), &site, false).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(isomorphic(&parts.outer, &f1) && isomorphic(&parts.inner, &f2), || {
            format!("trial {trial}: decompose does not invert combine at {site}")
        })?;
    }
    let mut done = 0;
    let mut trial = 0;
    while done < 100 {
        trial += 1;
        let (m, n) = dims(&mut rng);
        let g = { let l = rng.random_range(3..=12); sphere_tree(&mut rng, m, n, l) };
        let fibers = g.regular_fibers().map_err(|e| e.to_string())?;
        let sites: Vec<(usize, String)> = (1..g.l())
            .flat_map(|r| fibers[r].ids().map(move |id| (r, id.clone())))
            .filter(|(r, id)| {
                g.events[*r..].iter().any(|e| e.consumed().contains(&id))
            })
            .collect();
        if sites.is_empty() {
            continue;
        }
        let (r, id) = &sites[rng.random_range(0..sites.len())];
        let parts = match decompose(&g, *r, id, false) {
            Ok(p) => p,
            Err(Error::NotSeparable(_)) => continue,
            Err(e) => return Err(format!("decomposable trial {trial}: {e}")),
        };
        let back = combine(&parts.outer, id, &parts.inner, false).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(isomorphic(&back.descriptor, &g), || format!("trial {trial}: recombination at {id} differs"))?;
        done += 1;
    }
    Ok("100 combine/decompose pairs and 100 decompose/combine round trips".into())
}

fn catalog_fibers() -> Vec<ManifoldExpr> {
    let mut out: Vec<ManifoldExpr> = (1..=6).map(s).collect();
    out.push(ManifoldExpr::almost_sphere(5, "sigma"));
    out.push(ManifoldExpr::almost_sphere(7, "sigma"));
    for (a, b) in [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (2, 4)] {
        out.push(ManifoldExpr::product(vec![s(a), s(b)]));
    }
    out.push(ManifoldExpr::product(vec![s(2), s(2), s(2)]));
    out
}

fn euler_triangle() -> Result<String, String> {
    let chi = |d: &RoundFoldDescriptor| euler_characteristic(d).map_err(|e| e.to_string());
    let mut checked = 0;
    let mut all = Vec::new();
    for f in catalog_fibers() {
        for n in 1..=4 {
            let d = from_bundle(&f, n, Twist::label("t"), None).map_err(|e| format!("{f} over {n}: {e}"))?;
            let want = f.euler().unwrap() * rfm_core::expr::sphere_euler(n);
            ensure(chi(&d)? == want, || format!("{f} over S^{n}: {} vs {want}", chi(&d).unwrap()))?;
            checked += 1;
            all.push(d);
        }
    }
    let mut rng = rng(4);
    for trial in 0..100 {
        let (m, n) = dims(&mut rng);
        let f1 = { let l = rng.random_range(1..=6); sphere_tree(&mut rng, m, n, l) };
        let f2 = { let l = rng.random_range(1..=6); sphere_tree(&mut rng, m, n, l) };
        let site = f1.core().unwrap().ids().next().unwrap().clone();
        let c = combine(&f1, &site, &f2, false).map_err(|e| e.to_string())?.descriptor;
        let want = chi(&f1)? + chi(&f2)? - rfm_core::expr::sphere_euler(m);
        ensure(chi(&c)? == want, || format!("trial {trial}: combine gives {} instead of {want}", chi(&c).unwrap()))?;
        all.extend([f1, f2, c]);
    }
    for p in SHIPPED {
        all.push(preset(p).map_err(|e| e.to_string())?.descriptor);
    }
    for d in &all {
        let x = chi(d)?;
        ensure(d.m % 2 == 0 || x == 0, || format!("odd m = {} with chi = {x}", d.m))?;
        ensure(!(d.n == 2 && d.m % 2 == 0) || x % 2 == 0, || format!("n = 2, m = {} with odd chi = {x}", d.m))?;
    }
    Ok(format!("{checked} bundles, 100 sums, {} parity checks", all.len()))
}

fn classification_roundtrip() -> Result<String, String> {
    let mut rng = rng(5);
    for trial in 0..200 {
        let (m, n) = dims(&mut rng);
        let k = rng.random_range(1..=9);
        let e = sphere_bundle_sum(&mut rng, k, m, n);
        let d = synthesize(&e, Some(n)).map_err(|err| format!("trial {trial}: {e}: {err}"))?;
        ensure(d.l() == k + 1, || format!("trial {trial}: l = {} for k = {k}", d.l()))?;
        let want = e.normalize().unwrap();
        let got = classify(&d).manifold;
        ensure(got.as_ref() == Some(&want), || format!("trial {trial}: {e} classified as {got:?}"))?;
        let report = prop1_report(&d).map_err(|err| format!("trial {trial}: {err}"))?;
        let ranks = want.homology_ranks().map_err(|err| err.to_string())?;
        let expect = if m > 2 * n { k } else { 2 * k };
        let source = report.source_h_n.map(|r| r.rank);
        ensure(ranks[n as usize] as usize == expect && source == Some(expect), || {
            format!("trial {trial}: H_{n} of {want} is {}, prop1 gives {source:?}, expected {expect}", ranks[n as usize])
        })?;
    }
    Ok("200 sums of up to 9 sphere bundles".into())
}

fn dim5() -> Result<String, String> {
    let mut rng = rng(6);
    for trial in 0..50 {
        let k = rng.random_range(1..=8);
        let e = sphere_bundle_sum(&mut rng, k, 5, 2);
        let v = dim5_recognizer(Dim5Input::Expr(&e)).map_err(|err| format!("trial {trial}: {err}"))?;
        ensure(v.decision == Dim5Decision::Admits, || format!("trial {trial}: {e} not admitted"))?;
        let w = v.witness.ok_or("missing witness")?;
        ensure(w.validate().is_ok() && w.l() == k + 1, || format!("trial {trial}: bad witness for {e}"))?;
    }
    for t in [vec![2], vec![2, 3], vec![1, 2]] {
        let named = ManifoldExpr::Named(NamedManifold::new("W", 5).with_connectivity(1).with_torsion(t.clone()));
        let v = dim5_recognizer(Dim5Input::Expr(&named)).map_err(|e| e.to_string())?;
        ensure(v.decision == Dim5Decision::Rejected && v.citation.contains("Barden"), || {
            format!("torsion {t:?} not rejected: {v:?}")
        })?;
    }
    Ok("50 sums of S^3-bundles admitted with witnesses, torsion examples rejected".into())
}

fn det(mut a: Vec<Vec<i128>>) -> i128 {
    // Bareiss elimination
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

/// Invariant factors from determinantal divisors.
fn oracle_factors(a: &[Vec<i64>]) -> Vec<BigInt> {
    let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
    let mut divisors = vec![BigInt::from(1)];
    for k in 1..=r.min(c) {
        let mut g = BigInt::zero();
        'outer: for rows in combinations(r, k) {
            for cols in combinations(c, k) {
                let minor = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
                g = g.gcd(&BigInt::from(det(minor)));
                if g == BigInt::from(1) {
                    break 'outer;
                }
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| &w[1] / &w[0]).collect()
}

fn snf_oracle() -> Result<String, String> {
    let mut rng = rng(7);
    for trial in 0..500 {
        let (r, c) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let zero_bias = rng.random_bool(0.5);
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if zero_bias && rng.random_bool(0.6) { 0 } else { rng.random_range(-9..=9) })
                    .collect()
            })
            .collect();
        let m = IntMatrix::from_rows(&rows);
        let form = smith_normal_form(&m);
        let want = oracle_factors(&rows);
        let got: Vec<BigInt> = form.factors.iter().filter(|f| !f.is_zero()).map(|f| f.abs()).collect();
        ensure(got == want, || format!("trial {trial}: {rows:?} gives {got:?}, oracle {want:?}"))?;
        ensure(form.rank == want.len() && rational_rank(&m) == want.len(), || format!("trial {trial}: rank mismatch"))?;
    }
    Ok("500 random matrices match determinantal divisors".into())
}

fn square_zero() -> Result<String, String> {
    let mut rng = rng(8);
    let mut all: Vec<RoundFoldDescriptor> = Vec::new();
    for _ in 0..100 {
        let (m, n) = dims(&mut rng);
        all.push({ let l = rng.random_range(1..=20); sphere_tree(&mut rng, m, n, l) });
    }
    for f in catalog_fibers() {
        for n in 1..=4 {
            all.push(from_bundle(&f, n, Twist::Trivial, None).map_err(|e| e.to_string())?);
        }
    }
    for p in SHIPPED {
        all.push(preset(p).map_err(|e| e.to_string())?.descriptor);
    }
    for d in &all {
        let w = build_reeb(d).map_err(|e| e.to_string())?;
        w.complex.check_square_zero().map_err(|e| e.to_string())?;
    }
    Ok(format!("{} Reeb complexes", all.len()))
}

fn preset_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn parser() -> Result<String, String> {
    let mut rng = rng(9);
    for trial in 0..1000 {
        let value = match trial % 3 {
            0 => Parsed::Descriptor(descriptor(&mut rng)),
            1 => Parsed::Trace(trace(&mut rng)),
            _ => Parsed::Manifold(expr(&mut rng, 4)),
        };
        let text = dsl::print(&value);
        let back = dsl::parse_syntax(&text).map_err(|ds| format!("trial {trial}: {}\n{text}", ds[0]))?;
        ensure(back == value, || format!("trial {trial}: round trip changed\n{text}"))?;
    }
    let mut files = 0;
    for name in SHIPPED {
        let path = preset_dir().join(format!("{}.rfm", presets::file_stem(name)));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let Ok(Parsed::Descriptor(d)) = dsl::parse(&text) else {
            return Err(format!("{} does not parse to a valid descriptor", path.display()));
        };
        let r = classify(&d);
        ensure(r.is_classified(), || format!("{} is unclassified", path.display()))?;
        let render = || {
            let mut report = Report::new("classify", serde_json::json!(text));
            report.result = serde_json::to_value(classify(&d)).unwrap();
            report.render()
        };
        ensure(render() == render(), || format!("{}: JSON differs between runs", path.display()))?;
        files += 1;
    }
    Ok(format!("1000 fuzzed round trips, {files} preset files"))
}

fn preset_oracles() -> Result<String, String> {
    let milnor = preset("milnor_sphere(theta)").map_err(|e| e.to_string())?;
    let r = classify(&milnor.descriptor);
    ensure(
        r.manifold == Some(ManifoldExpr::bundle(s(3), 4, Twist::label("theta")))
            && r.confidence == Some(Confidence::Diffeomorphism),
        || format!("milnor_sphere classified as {:?} at {:?}", r.manifold, r.confidence),
    )?;
    let mut count = 0;
    for n in 1..=9u32 {
        for m in n + 1..=(n + 3).min(12) {
            let p = preset(&format!("special_generic({m},{n})")).map_err(|e| e.to_string())?;
            let r = classify(&p.descriptor);
            ensure(r.manifold == Some(s(m)), || format!("special_generic({m},{n}) gives {:?}", r.manifold))?;
            count += 1;
        }
    }
    let sum = preset("s4_bott_sum").map_err(|e| e.to_string())?;
    let r = classify(&sum.descriptor);
    let want = ManifoldExpr::csum(vec![
        ManifoldExpr::bundle(s(4), 2, Twist::label("tau")),
        ManifoldExpr::bundle(ManifoldExpr::product(vec![s(2), s(2)]), 2, Twist::label("bott")),
    ])
    .normalize()
    .unwrap();
    ensure(r.manifold == Some(want) && r.chain[0].rule == "mixed_fiber_sum", || {
        format!("s4_bott_sum gives {:?} via {:?}", r.manifold, r.rules())
    })?;
    Ok(format!("milnor family, {count} special generic maps, mixed sum"))
}

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        ("rank law for sphere-fiber trees", rank_law, Duration::from_secs(5)),
        ("bouquet homology of sphere bundles", bouquet, Duration::from_secs(1)),
        ("surgery arithmetic", surgery_arithmetic, Duration::from_secs(5)),
        ("Euler characteristic coherence", euler_triangle, Duration::from_secs(2)),
        ("classification round trip", classification_roundtrip, Duration::from_secs(5)),
        ("dimension-5 recognizer", dim5, Duration::from_secs(1)),
        ("Smith normal form oracle", snf_oracle, Duration::from_secs(10)),
        ("boundary squares to zero", square_zero, Duration::from_secs(10)),
        ("parser round trip and presets", parser, Duration::from_secs(10)),
        ("preset catalog oracles", preset_oracles, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}, but took {took:.2?} (budget {budget:?})")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
