//! Smallest trees computing each Boolean function of few variables.

use andor::trees::build_atlas;

fn main() -> andor::Result<()> {
    let atlas = build_atlas(5)?;
    println!("{} functions reached by trees with at most 5 leaves", atlas.len());
    for (key, e) in atlas.sorted().into_iter().take(12) {
        let w = e.witness.as_ref().map_or("-".to_string(), |c| c.to_string());
        println!("{key:<10} L={} {w}", e.size);
    }
    Ok(())
}
