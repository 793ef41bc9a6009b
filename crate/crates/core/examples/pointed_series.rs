//! The structure series and the pointed-leaf bracket on simple tautologies.

use andor::combinatorics::rational_to_f64;
use andor::patterns::st_count_exact;
use andor::series::{dc_counts, marked_gf, tree_structure_gf};

fn main() -> andor::Result<()> {
    let order = 40;
    let i = tree_structure_gf(order)?;
    let pointed = marked_gf(order, 2)?;
    for n in [5, 10, 20, 40] {
        let r = rational_to_f64(&(pointed.coeff(n) / i.coeff(n)));
        println!("n={n:>2}  I_n={}  Itilde_n/I_n={r:.4}", i.coeff(n));
    }
    for n in 2..=5u64 {
        let d = dc_counts(n, n)?;
        let st = st_count_exact(n as usize, n as usize)?;
        println!("n={n}  {} <= ST={st} <= {}", d.lower(), d.dc);
    }
    Ok(())
}
