use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use roughends::bass_serre::FundamentalGroup;
use roughends::catalog::{run_catalog, Catalog, EXIT_BUDGET, EXIT_INCONSISTENT, EXIT_OK};
use roughends::cayley::RoughCayleyTruncation;
use roughends::ends::{classify_truncation, find_cut, EndsEstimate};
use roughends::graph::{EdgeId, GraphLiteral, SerreGraph};
use roughends::group::Group;
use roughends::qlinalg::graph_homology;
use roughends::spec::{resolve_pair, Backend, GroupFile, SpecGroup};
use roughends::witness::{check_almost_invariance, cut_from_witness, dh1_nonvanishing_certificate, AIWitness, Dh1Class};
use roughends::{Error, Result};

#[derive(Parser)]
#[command(name = "roughends", version, about = "Ends, splittings and almost invariant sets of groups acting on trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count escaping components around balls in the rough Cayley graph.
    Ends {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        pair: usize,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
        #[arg(long = "R", default_value_t = 12)]
        big_r: usize,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Extract a cut from the rough Cayley graph.
    Cut {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        pair: usize,
        #[arg(long = "R", default_value_t = 12)]
        big_r: usize,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Half-tree witness for a splitting edge, with its checks.
    Witness {
        spec: PathBuf,
        #[arg(long)]
        edge: u64,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Run every entry of a catalog.
    Verify { catalog: PathBuf },
    /// Truncate the Bass-Serre tree, check exactness and write DOT.
    Tree {
        spec: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
    /// Kernel and cokernel of the boundary map of a finite graph.
    Homology {
        graph: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the built-in catalog.
    Catalog {
        #[arg(long)]
        negative_control: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T) {
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, value).and_then(|()| writeln!(out).map_err(serde_json::Error::io));
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    }
}

fn load(path: &Path) -> Result<(GroupFile, Backend)> {
    let file = GroupFile::parse(&read(path)?)?;
    let backend = Backend::from_spec(&file.group)?;
    Ok((file, backend))
}

fn load_gog(path: &Path) -> Result<FundamentalGroup> {
    match load(path)?.1 {
        Backend::Gog(g) => Ok(g),
        Backend::Rewriting(_) => Err(Error::Spec("this command needs a graph of groups".into())),
    }
}

#[derive(Serialize)]
struct EndsOutput {
    pair: usize,
    k_order: usize,
    generators: Vec<String>,
    #[serde(flatten)]
    estimate: EndsEstimate,
}

fn ends<G: SpecGroup>(g: &G, file: &GroupFile, index: usize, rmax: usize, big_r: usize, cap: usize) -> Result<i32> {
    let pair = truncation_pair(g, file, index)?;
    let t = RoughCayleyTruncation::build(g, &pair, big_r, cap)?;
    let estimate = classify_truncation(&t, rmax)?;
    emit(&EndsOutput {
        pair: index,
        k_order: pair.k().len(),
        generators: pair.s().iter().map(|s| g.render(s)).collect(),
        estimate,
    });
    Ok(EXIT_OK)
}

fn truncation_pair<G: SpecGroup>(
    g: &G,
    file: &GroupFile,
    index: usize,
) -> Result<roughends::cayley::GeneratingPair<G::Elem>> {
    let pairs = file.pairs_or_default();
    let spec = pairs.get(index).ok_or_else(|| Error::Spec(format!("no pair {index}; {} listed", pairs.len())))?;
    resolve_pair(g, spec)
}

#[derive(Serialize)]
struct CutOutput {
    radius: usize,
    exhausted: bool,
    probe_radius: Option<usize>,
    vertices: Vec<String>,
    coboundary: Vec<(String, String)>,
}

fn cut<G: SpecGroup>(g: &G, file: &GroupFile, index: usize, big_r: usize, cap: usize) -> Result<i32> {
    let pair = truncation_pair(g, file, index)?;
    let t = RoughCayleyTruncation::build(g, &pair, big_r, cap)?;
    let found = find_cut(&t);
    let label = |i: usize| g.render(&t.labels[i]);
    let out = CutOutput {
        radius: t.radius,
        exhausted: t.exhausted,
        probe_radius: found.as_ref().map(|c| c.probe_radius),
        vertices: found.as_ref().map(|c| c.vertices.iter().map(|&i| label(i)).collect()).unwrap_or_default(),
        coboundary: found
            .as_ref()
            .map(|c| {
                c.coboundary
                    .iter()
                    .map(|&e| {
                        let o = t.graph.origin(e).expect("edge").0 as usize;
                        let x = t.graph.terminus(e).expect("edge").0 as usize;
                        (label(o), label(x))
                    })
                    .collect()
            })
            .unwrap_or_default(),
    };
    emit(&out);
    Ok(EXIT_OK)
}

fn witness(path: &Path, edge: u64, radius: usize, cap: usize) -> Result<i32> {
    let g = load_gog(path)?;
    let w = AIWitness::from_splitting(&g, EdgeId(edge), None)?;
    let t = RoughCayleyTruncation::build(&g, w.pair(), radius, cap)?;
    let check = check_almost_invariance(&g, w.pair(), &w, &t.labels);
    let class = dh1_nonvanishing_certificate(&g, w.pair(), &w, &check, &t)?;
    let cut = cut_from_witness(&g, w.pair(), &w, &t)?;
    let derivations: Vec<serde_json::Value> = w
        .derivation_values()
        .into_iter()
        .map(|(s, d)| {
            let values: serde_json::Map<String, serde_json::Value> =
                d.iter().map(|(x, v)| (g.render(x), (*v).into())).collect();
            serde_json::json!({ "generator": g.render(&s), "values": values })
        })
        .collect();
    let ok = check.passed && class.class == Dh1Class::Nonzero && cut.within_bound && cut.escaping_after_removal >= 2;
    emit(&serde_json::json!({
        "witness": w.to_json(),
        "check": check,
        "class": class,
        "cut": {
            "coboundary": cut.coboundary.len(),
            "bound": cut.bound,
            "sharp_bound": cut.sharp_bound,
            "within_bound": cut.within_bound,
            "escaping_after_removal": cut.escaping_after_removal,
            "c_b_size": cut.c_b.len(),
        },
        "derivations": derivations,
        "certified": ok,
    }));
    Ok(verdict(ok))
}

fn tree(path: &Path, radius: usize, dot: Option<&Path>, cap: usize) -> Result<i32> {
    let g = load_gog(path)?;
    let t = g.tree_truncation(radius, cap)?;
    if let Some(dot) = dot {
        write(dot, &g.tree_dot(&t))?;
    }
    let cert = g.exactness_on_truncation(radius, cap)?;
    let ok = cert.passed();
    emit(&serde_json::json!({
        "exactness": cert,
        "passed": ok,
        "vertices": t.labels.iter().map(|x| g.render(x)).collect::<Vec<_>>(),
        "dot": dot.map(|p| p.display().to_string()),
    }));
    Ok(verdict(ok))
}

fn homology(path: &Path, dot: Option<&Path>) -> Result<i32> {
    let lit: GraphLiteral = serde_json::from_str(&read(path)?).map_err(|e| Error::Spec(e.to_string()))?;
    let graph = SerreGraph::from_literal(&lit)?;
    if let Some(dot) = dot {
        write(dot, &graph.to_dot("graph", |_| None))?;
    }
    let report = graph_homology(&graph);
    let ok = report.counts_agree && report.is_tree == report.is_tree_linear;
    emit(&report);
    Ok(verdict(ok))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Ends { spec, pair, rmax, big_r, cap } => {
            let (file, backend) = load(&spec)?;
            match &backend {
                Backend::Rewriting(g) => ends(g, &file, pair, rmax, big_r, cap),
                Backend::Gog(g) => ends(g, &file, pair, rmax, big_r, cap),
            }
        }
        Command::Cut { spec, pair, big_r, cap } => {
            let (file, backend) = load(&spec)?;
            match &backend {
                Backend::Rewriting(g) => cut(g, &file, pair, big_r, cap),
                Backend::Gog(g) => cut(g, &file, pair, big_r, cap),
            }
        }
        Command::Witness { spec, edge, radius, cap } => witness(&spec, edge, radius, cap),
        Command::Verify { catalog } => {
            let report = run_catalog(&Catalog::parse(&read(&catalog)?)?);
            emit(&report);
            Ok(report.exit_code)
        }
        Command::Tree { spec, radius, dot, cap } => tree(&spec, radius, dot.as_deref(), cap),
        Command::Homology { graph, dot } => homology(&graph, dot.as_deref()),
        Command::Catalog { negative_control } => {
            emit(&if negative_control { Catalog::negative_control() } else { Catalog::default_catalog() });
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { EXIT_BUDGET } else { EXIT_INCONSISTENT } as u8)
        }
    }
}
