//! Draws uniform classes and checks the frequencies against a chi-square
//! bound.

use std::collections::HashMap;

use andor::combinatorics::Cutoffs;
use andor::sampler::{chi_square_critical, chi_square_uniform, ClassSampler, SamplerState, Z_999};
use andor::trees::enumerate_classes;

fn main() -> andor::Result<()> {
    let (n, k) = (3, 3);
    let index: HashMap<_, _> = enumerate_classes(n, k)?.enumerate().map(|(i, c)| (c, i)).collect();
    let sampler = ClassSampler::new(n, k, Cutoffs::default())?;
    let mut rng = SamplerState::new(1, 0).rng();
    let mut counts = vec![0u64; index.len()];
    for _ in 0..50_000 {
        counts[index[&sampler.sample(&mut rng)]] += 1;
    }
    let stat = chi_square_uniform(&counts);
    let crit = chi_square_critical(index.len() - 1, Z_999);
    println!("{} classes, chi2 = {stat:.1}, critical = {crit:.1}", index.len());
    println!("one draw at n=24: {}", ClassSampler::new(24, 4, Cutoffs::default())?.sample(&mut rng));
    Ok(())
}
