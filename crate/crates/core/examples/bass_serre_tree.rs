//! The Bass-Serre tree of C2 * C3: a truncation, its exactness check and a
//! DOT rendering.

use roughends::group::Group;
use roughends::presets;

fn main() -> roughends::Result<()> {
    let g = presets::fundamental(presets::gog_c2_c3());
    println!("splitting: {:?}", g.gog().splitting_classify().overall);

    let x = g.parse("v0:1")?;
    let y = g.parse("v1:1")?;
    let w = g.product([&x, &y, &x, &y, &y]);
    println!("x y x y y = {}", g.render(&w));
    println!("inverse   = {}", g.render(&g.inv(&w)));

    let t = g.tree_truncation(4, 10_000)?;
    let degrees: Vec<usize> = (0..3).map(|i| g.tree_children(&t.labels[i]).len()).collect();
    println!("{} tree vertices; children of the first three: {degrees:?}", t.labels.len());
    for r in 1..=4 {
        let cert = g.exactness_on_truncation(r, 10_000)?;
        println!("radius {r}: V={} E={} exact={}", cert.vertices, cert.geometric_edges, cert.passed());
    }

    let path = std::env::temp_dir().join("c2_c3_tree.dot");
    std::fs::write(&path, g.tree_dot(&t)).map_err(|e| roughends::Error::Spec(e.to_string()))?;
    println!("DOT written to {}", path.display());
    Ok(())
}
