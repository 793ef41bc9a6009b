//! Repetition censuses for the pattern languages N, P and N[N].

use andor::patterns::{repetition_distribution, tautologies_without_repetition, PatternLang};

fn main() -> andor::Result<()> {
    let n = 5;
    for lang in [PatternLang::n(), PatternLang::p()] {
        let dist = repetition_distribution(n, n, &lang)?;
        let shown: Vec<String> = dist.iter().map(|c| c.to_string()).collect();
        println!("{lang}: classes by repetition count {}", shown.join(" "));
    }
    let nn = PatternLang::n_pow(2)?;
    let missing = tautologies_without_repetition(n, n, &nn)?;
    println!("tautologies of size {n} without an {nn} repetition: {}", missing.len());
    Ok(())
}
