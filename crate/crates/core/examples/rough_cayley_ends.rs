//! End counts on rough Cayley graphs, for word groups and for fundamental
//! groups of graphs of finite groups with a nontrivial `K`.

use roughends::cayley::GeneratingPair;
use roughends::ends::classify_ends;
use roughends::graph::VertexId;
use roughends::group::Group;
use roughends::presets;

fn main() -> roughends::Result<()> {
    for (name, g, r_max, big_r) in [
        ("Z", presets::rewriting_z(), 3, 12),
        ("Z^2", presets::rewriting_z2(), 3, 12),
        ("D_inf", presets::rewriting_d_infinity(), 3, 12),
        ("F2", presets::rewriting_f2(), 2, 8),
        ("C5", presets::rewriting_cyclic(5), 3, 12),
    ] {
        let pair = GeneratingPair::new(&g, vec![g.identity()], g.letter_elements())?;
        let est = classify_ends(&g, &pair, r_max, big_r, 200_000)?;
        let counts: Vec<usize> = est.probes.iter().map(|p| p.c_s).collect();
        println!("{name:>6}: {:?} from counts {counts:?}", est.verdict);
    }

    let g = presets::fundamental(presets::gog_c2_c3());
    let k = g.vertex_subgroup(VertexId(1))?;
    let pair = GeneratingPair::symmetrized(&g, k, vec![g.parse("v0:1")?])?;
    let est = classify_ends(&g, &pair, 3, 12, 200_000)?;
    println!("C2*C3 over G/C3: {:?}", est.verdict);
    Ok(())
}
