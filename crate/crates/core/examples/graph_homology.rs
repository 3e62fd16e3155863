//! Boundary map of a few small graphs and the dimension counts it yields.

use roughends::graph::SerreGraph;
use roughends::qlinalg::{augmentation, delta_matrix, graph_homology, verify_short_exact};

fn main() -> roughends::Result<()> {
    let graphs = [
        ("segment", SerreGraph::from_geometric(2, &[(0, 1)])?),
        ("triangle", SerreGraph::from_geometric(3, &[(0, 1), (1, 2), (2, 0)])?),
        ("loop", SerreGraph::from_geometric(1, &[(0, 0)])?),
        ("theta plus point", SerreGraph::from_geometric(3, &[(0, 1), (0, 1), (0, 1)])?),
    ];
    for (name, g) in &graphs {
        let h = graph_homology(g);
        println!(
            "{name:>16}: |V|={} |E|={} c={} ker={} coker={} tree={}",
            h.vertices, h.geometric_edges, h.components, h.ker_dim, h.coker_dim, h.is_tree
        );
    }

    let path = SerreGraph::from_geometric(4, &[(0, 1), (1, 2), (2, 3)])?;
    let delta = delta_matrix(&path).matrix;
    let check = verify_short_exact(&delta, &augmentation(path.vertex_count()))?;
    println!("path of length 3: 0 -> Q^3 -> Q^4 -> Q -> 0 exact = {}", check.exact);
    println!("{}", path.to_dot("path", |_| None));
    Ok(())
}
