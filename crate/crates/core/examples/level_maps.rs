//! Level maps between permutation modules along the chain
//! vertex group ⊇ edge group ⊇ 1 in C4 *_{C2} C4.

use roughends::graph::{EdgeId, VertexId};
use roughends::group::Group;
use roughends::level::{check_composition, enumerate_cosets, eta_map};
use roughends::presets;

fn main() -> roughends::Result<()> {
    let g = presets::fundamental(presets::gog_c4_c4_over_c2());
    let u = g.vertex_subgroup(VertexId(0))?;
    let v = g.edge_subgroup(EdgeId(0))?;
    let w = vec![g.identity()];
    let cols = enumerate_cosets(&g, &u, &g.generators(), 2, 100_000)?;
    for (name, a, b) in [("U->V", &u, &v), ("V->1", &v, &w), ("U->1", &u, &w)] {
        let m = eta_map(&g, a, b, &cols)?;
        println!("{name}: {:?}", m.report());
    }
    println!("composition holds: {}", check_composition(&g, &u, &v, &w, &cols)?);

    let m = eta_map(&g, &u, &v, &cols[..1])?;
    for (r, c, x) in m.matrix.entries() {
        println!("  eta[{}, {}] = {x}", g.render(&m.rows[r]), g.render(&m.cols[c]));
    }
    Ok(())
}
