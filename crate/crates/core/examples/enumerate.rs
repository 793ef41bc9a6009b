//! Exhaustive enumeration of small classes with their evaluations.

use andor::patterns::is_simple_tautology;
use andor::trees::{enumerate_classes, truth_table};

fn main() -> andor::Result<()> {
    for c in enumerate_classes(3, 2)? {
        let t = truth_table(&c)?;
        let bits: String = (0..t.len()).map(|a| if t.get(a) { '1' } else { '0' }).collect();
        let mark = if is_simple_tautology(&c) { "  simple tautology" } else { "" };
        println!("{c:<22} {bits}{mark}");
    }
    Ok(())
}
