//! Expansions of a small tree keep its Boolean function.

use andor::patterns::{generate_expansions, ExpansionKind};
use andor::trees::{class_key, Class};

fn main() -> andor::Result<()> {
    let base: Class = "(1:+ & 2:+)".parse()?;
    let key = class_key(&base)?;
    for kind in [ExpansionKind::T, ExpansionKind::X] {
        let out = generate_expansions(&base, kind, 5, 3)?;
        let kept = out.iter().filter(|c| class_key(c) == Ok(key)).count();
        println!("{kind}: {} expansions of {base} to size 5, {kept} keep {key}", out.len());
        for c in out.iter().take(4) {
            println!("  {c}");
        }
    }
    Ok(())
}
