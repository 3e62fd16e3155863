//! From a splitting to an almost invariant set, a nonzero cohomology class
//! and a cut, on the infinite dihedral group.

use roughends::bass_serre::FundamentalGroup;
use roughends::cayley::RoughCayleyTruncation;
use roughends::graph::EdgeId;
use roughends::group::Group;
use roughends::presets;
use roughends::witness::{check_almost_invariance, cut_from_witness, dh1_nonvanishing_certificate, AIWitness};

fn main() -> roughends::Result<()> {
    let g: FundamentalGroup = presets::fundamental(presets::gog_d_infinity());
    let w = AIWitness::from_splitting(&g, EdgeId(0), None)?;
    for c in w.certificates() {
        let cosets: Vec<String> = c.cosets.iter().map(|x| g.render(x)).collect();
        println!("s = {:<8} declared sB \u{394} B within {cosets:?}", g.render(&c.generator));
    }

    let t = RoughCayleyTruncation::build(&g, w.pair(), 8, 10_000)?;
    let report = check_almost_invariance(&g, w.pair(), &w, &t.labels);
    println!("checked {} cosets, observed differences {:?}", report.cosets_checked, report.observed_differences);

    let class = dh1_nonvanishing_certificate(&g, w.pair(), &w, &report, &t)?;
    println!("class {:?}: {} sphere cosets in B, {} outside", class.class, class.b_on_sphere, class.complement_on_sphere);

    let cut = cut_from_witness(&g, w.pair(), &w, &t)?;
    println!(
        "cut: |coboundary| = {} (bound {}), escaping components after removal = {}",
        cut.coboundary.len(),
        cut.bound,
        cut.escaping_after_removal
    );
    for (s, d) in w.derivation_values() {
        let terms: Vec<String> = d.iter().map(|(x, v)| format!("{v:+}·[{}]", g.render(x))).collect();
        println!("d({}) = {}", g.render(&s), if terms.is_empty() { "0".into() } else { terms.join(" ") });
    }
    Ok(())
}
