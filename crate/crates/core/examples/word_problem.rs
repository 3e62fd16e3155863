//! Normal forms in shortlex rewriting systems, and a system that fails the
//! confluence check.

use roughends::group::Group;
use roughends::presets;
use roughends::rewriting::RewritingSystem;

fn main() -> roughends::Result<()> {
    let z2 = presets::rewriting_z2();
    for w in ["ba", "bAaB", "BAba", "abAB"] {
        println!("Z^2   {w:>6} -> {}", z2.render(&z2.element(w)?));
    }
    let d = presets::rewriting_d_infinity();
    for w in ["xyyxx", "XYXY", "yxyx"] {
        println!("D_inf {w:>6} -> {}", d.render(&d.element(w)?));
    }

    let balls: Vec<usize> = (0..=4)
        .map(|r| z2.ball_enumerate(&z2.letter_elements(), r, 10_000).map(|b| b.len()))
        .collect::<roughends::Result<_>>()?;
    println!("Z^2 ball sizes: {balls:?}");

    let bad = RewritingSystem::from_strings(&["a", "b"], &[("ab", "b"), ("ba", "a")])?;
    match bad.verify_confluence() {
        Ok(()) => println!("unexpectedly confluent"),
        Err(f) => println!(
            "not confluent: {} -> {} | {}",
            bad.render(&f.overlap),
            bad.render(&f.left),
            bad.render(&f.right)
        ),
    }
    Ok(())
}
