mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{components_by_dfs, free_reduce, model_mismatches, random_graph, Affine};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roughends::bass_serre::FundamentalGroup;
use roughends::catalog::{run_catalog, verify_theorem_b_evidence, witness_chain, Catalog, EXIT_INCONSISTENT};
use roughends::cayley::GeneratingPair;
use roughends::ends::{classify_ends, EndsVerdict};
use roughends::graph::{EdgeId, SerreGraph, VertexId};
use roughends::group::Group;
use roughends::level::{check_composition, enumerate_cosets, eta_map};
use roughends::oracle::tree_sphere_sizes;
use roughends::presets;
use roughends::qlinalg::{delta_matrix, rank_kernel_cokernel, SparseMatrixQ};
use roughends::rewriting::Word;
use roughends::spec::{resolve_pair, Backend, GroupSpec, SpecGroup};
use roughends::Result;

const CAP: usize = 200_000;

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Check {
    let spent = start.elapsed();
    ensure(spent < limit, || format!("took {spent:.2?}, limit {limit:?}"))
}

fn boundary_counts() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..1000 {
        let (n, pairs) = random_graph(&mut rng, 40);
        let g = SerreGraph::from_geometric(n, &pairs).map_err(|e| e.to_string())?;
        let c = components_by_dfs(n, &pairs);
        let p = rank_kernel_cokernel(&delta_matrix(&g).matrix);
        ensure(p.ker_dim + n == pairs.len() + c, || format!("graph {i}: ker {} with V {n}, E {}, c {c}", p.ker_dim, pairs.len()))?;
        ensure(p.coker_dim == c, || format!("graph {i}: coker {} with c {c}", p.coker_dim))?;
        let tree = c == 1 && pairs.len() + 1 == n;
        let by_ranks = p.ker_dim == 0 && p.coker_dim == 1;
        ensure(tree == by_ranks && tree == g.is_tree_combinatorial(), || format!("graph {i}: tree test disagrees"))?;
    }
    within(start, Duration::from_secs(10))
}

fn verdict_of<G: SpecGroup>(g: &G, pair: &GeneratingPair<G::Elem>) -> Result<EndsVerdict> {
    Ok(classify_ends(g, pair, 3, 12, CAP)?.verdict)
}

fn default_verdict(spec: &GroupSpec) -> Result<EndsVerdict> {
    match Backend::from_spec(spec)? {
        Backend::Rewriting(g) => verdict_of(&g, &resolve_pair(&g, &Default::default())?),
        Backend::Gog(g) => verdict_of(&g, &resolve_pair(&g, &Default::default())?),
    }
}

fn ends_of_catalog_groups() -> Check {
    let start = Instant::now();
    let catalog = Catalog::default_catalog();
    let expected: [(&str, fn(&EndsVerdict) -> bool); 10] = [
        ("z-rewriting", |v| *v == EndsVerdict::ExactlyTwoAtScale),
        ("z-hnn", |v| *v == EndsVerdict::ExactlyTwoAtScale),
        ("d-infinity-rewriting", |v| *v == EndsVerdict::ExactlyTwoAtScale),
        ("d-infinity-amalgam", |v| *v == EndsVerdict::ExactlyTwoAtScale),
        ("finite-c5", |v| *v == EndsVerdict::ZeroEnds),
        ("finite-d3", |v| *v == EndsVerdict::ZeroEnds),
        ("c3-rewriting", |v| *v == EndsVerdict::ZeroEnds),
        ("c2-c3", |v| matches!(v, EndsVerdict::AtLeast(k) if *k >= 3)),
        ("z2-rewriting", |v| *v == EndsVerdict::AtMostOneAtScale),
        ("sl2z", |v| matches!(v, EndsVerdict::AtLeast(k) if *k >= 3)),
    ];
    for (name, pred) in expected {
        let entry = catalog.entry(name).ok_or_else(|| format!("{name} missing from catalog"))?;
        let v = default_verdict(&entry.group).map_err(|e| format!("{name}: {e}"))?;
        ensure(pred(&v), || format!("{name}: got {v:?}"))?;
    }
    within(start, Duration::from_secs(30))
}

fn witness_chains() -> Check {
    let start = Instant::now();
    let groups = [
        ("d-infinity-amalgam", presets::gog_d_infinity()),
        ("z-hnn", presets::gog_z()),
        ("c2-c3", presets::gog_c2_c3()),
        ("c4-c4-over-c2", presets::gog_c4_c4_over_c2()),
    ];
    for (name, gog) in groups {
        let g = presets::fundamental(gog);
        let w = witness_chain(&g, EdgeId(0), 8, CAP).map_err(|e| format!("{name}: {e}"))?;
        ensure(w.almost_invariant && w.failures == 0, || format!("{name}: almost invariance failed"))?;
        ensure(w.b_on_sphere > 0 && w.complement_on_sphere > 0, || format!("{name}: one side does not escape"))?;
        ensure(w.escaping_after_removal >= 2 && w.within_bound, || format!("{name}: cut gives {w:?}"))?;
        ensure(w.certified, || format!("{name}: not certified"))?;
    }
    within(start, Duration::from_secs(30))
}

fn normal_form_oracles() -> Check {
    let mut failures = Vec::new();
    let z = presets::fundamental(presets::gog_z());
    let t = z.parse("t0").map_err(|e| e.to_string())?;
    let n = model_mismatches(&z, &[t.clone(), z.inv(&t)], &[1i64, -1], 0, |a, b| a + b, 4);
    failures.push(("z-hnn", n));

    let d = presets::fundamental(presets::gog_d_infinity());
    let gens = vec![d.parse("v0:1").map_err(|e| e.to_string())?, d.parse("v1:1").map_err(|e| e.to_string())?];
    let n = model_mismatches(&d, &gens, &[Affine(-1, 0), Affine(-1, 1)], Affine(1, 0), |a, b| a.then(*b), 4);
    failures.push(("d-infinity-amalgam", n));

    let z2 = presets::rewriting_z2();
    let gens: Vec<Word> = (0..4u16).map(|l| Word(vec![l])).collect();
    let images = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
    failures.push(("z2-rewriting", model_mismatches(&z2, &gens, &images, (0, 0), |a, b| (a.0 + b.0, a.1 + b.1), 4)));

    let f2 = presets::rewriting_f2();
    let images: Vec<Vec<u16>> = (0..4u16).map(|l| vec![l]).collect();
    let compose = |a: &Vec<u16>, b: &Vec<u16>| free_reduce(&[a.as_slice(), b.as_slice()].concat());
    failures.push(("f2-rewriting", model_mismatches(&f2, &gens, &images, Vec::new(), compose, 4)));

    let bad: Vec<String> = failures.iter().filter(|(_, n)| *n > 0).map(|(name, n)| format!("{name}: {n}")).collect();
    ensure(bad.is_empty(), || bad.join(", "))
}

fn tree_exactness() -> Check {
    let catalog = Catalog::default_catalog();
    let mut seen = 0;
    for entry in &catalog.entries {
        let GroupSpec::GraphOfGroups(spec) = &entry.group else { continue };
        seen += 1;
        let ev = verify_theorem_b_evidence(entry, 4, CAP).map_err(|e| format!("{}: {e}", entry.name))?;
        ensure(ev.passed && ev.rows.len() == 4, || format!("{}: {:?}", entry.name, ev.rows))?;
        let g = FundamentalGroup::from_spec(spec).map_err(|e| e.to_string())?;
        let spheres = tree_sphere_sizes(g.gog(), 4).map_err(|e| e.to_string())?;
        for row in &ev.rows {
            let predicted: u128 = spheres[..=row.radius].iter().sum();
            ensure(row.vertices as u128 == predicted, || {
                format!("{} radius {}: {} vertices, predicted {predicted}", entry.name, row.radius, row.vertices)
            })?;
            ensure(row.geometric_edges + 1 == row.vertices, || format!("{} radius {}: not a tree", entry.name, row.radius))?;
        }
    }
    ensure(seen > 0, || "no graph-of-groups entries".into())
}

fn pair_invariance() -> Check {
    let catalog = Catalog::default_catalog();
    for name in ["d-infinity-amalgam", "c2-c3"] {
        let entry = catalog.entry(name).ok_or_else(|| format!("{name} missing"))?;
        let Backend::Gog(g) = Backend::from_spec(&entry.group).map_err(|e| e.to_string())? else {
            return Err(format!("{name} is not a graph of groups"));
        };
        let pairs = entry.pairs_or_default();
        ensure(pairs.len() >= 2, || format!("{name}: only {} pair", pairs.len()))?;
        let mut verdicts = Vec::new();
        for p in &pairs {
            let pair = resolve_pair(&g, p).map_err(|e| e.to_string())?;
            verdicts.push(verdict_of(&g, &pair).map_err(|e| format!("{name}: {e}"))?);
        }
        ensure(verdicts.windows(2).all(|w| w[0].class() == w[1].class()), || format!("{name}: {verdicts:?}"))?;
    }
    Ok(())
}

fn eta_properties() -> Check {
    let chains = [
        ("c4-c4-over-c2", presets::fundamental(presets::gog_c4_c4_over_c2())),
        ("sl2z", presets::fundamental(presets::gog_sl2z())),
    ];
    for (name, g) in chains {
        let err = |e: roughends::Error| format!("{name}: {e}");
        let u = g.vertex_subgroup(VertexId(0)).map_err(err)?;
        let v = g.edge_subgroup(EdgeId(0)).map_err(err)?;
        let w = vec![g.identity()];
        let cols = enumerate_cosets(&g, &u, &g.generators(), 3, CAP).map_err(err)?;
        let same = eta_map(&g, &u, &u, &cols).map_err(err)?;
        ensure(same.matrix == SparseMatrixQ::identity(same.cols.len()), || format!("{name}: η_UU is not the identity"))?;
        for (a, b) in [(&u, &v), (&v, &w), (&u, &w)] {
            let r = eta_map(&g, a, b, &cols).map_err(err)?.report();
            ensure(r.column_sums_one && r.uniform_entries && r.injective, || format!("{name}: {r:?}"))?;
        }
        ensure(check_composition(&g, &u, &v, &w, &cols).map_err(err)?, || format!("{name}: composition fails"))?;
    }
    Ok(())
}

fn negative_control() -> Check {
    let report = run_catalog(&Catalog::negative_control());
    ensure(report.exit_code == EXIT_INCONSISTENT, || format!("library exit code {}", report.exit_code))?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/catalog_negative_control.json");
    let out = Command::new(env!("CARGO_BIN_EXE_roughends")).args(["verify", path]).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(EXIT_INCONSISTENT), || format!("cli exit code {:?}", out.status.code()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("boundary map counts on 1000 random graphs", boundary_counts),
        ("ends of catalog groups", ends_of_catalog_groups),
        ("splitting witness chains", witness_chains),
        ("normal forms against oracles", normal_form_oracles),
        ("tree exactness at radii 1..4", tree_exactness),
        ("generating pair invariance", pair_invariance),
        ("level map properties", eta_properties),
        ("negative control exits 1", negative_control),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let spent = start.elapsed();
        match result {
            Ok(()) => println!("PASS {} {name} ({spent:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({spent:.2?}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
