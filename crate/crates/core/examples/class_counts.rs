//! Class counts and the ratio `rat_n` under a few variable budgets.

use andor::combinatorics::{count_classes, m_threshold, rat, Cutoffs, Schedule};

fn main() -> andor::Result<()> {
    for n in 1..=8 {
        println!("T({n},{n}) = {}", count_classes(n, n)?);
    }
    let cutoffs = Cutoffs::default();
    println!("{:>8} {:>12} {:>12} {:>6}", "n", "rat (k=n)", "rat (k=√n)", "M_n");
    for n in [10u64, 100, 1_000, 10_000, 100_000] {
        let id = rat(n, &Schedule::Identity, cutoffs)?.to_f64();
        let sq = rat(n, &Schedule::Sqrt, cutoffs)?.to_f64();
        println!("{n:>8} {id:>12.6} {sq:>12.6} {:>6}", m_threshold(n));
    }
    Ok(())
}
