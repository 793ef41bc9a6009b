use num_bigint::BigUint;
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::draw::{ClassSampler, SamplerState};
use super::event::Event;
use crate::combinatorics::{m_threshold, rat_for_k, Cutoffs, Schedule};
use crate::error::{domain, Result};
use crate::trees::{for_each_class, Analyzer, Class, DEFAULT_SAT_BUDGET};

/// Samples per substream. Chunk `j` of a run draws from stream
/// `stream_id * 2^32 + j`, so results do not depend on the worker count.
pub const CHUNK: u64 = 4096;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

/// Below this many hits the Wilson interval replaces the normal one.
const WILSON_BELOW: u64 = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub event: String,
    pub n: u64,
    pub k_n: u64,
    pub m_n: u64,
    pub rat_n: f64,
    /// Classified samples; `point = hits / samples`.
    pub samples: u64,
    pub hits: u64,
    pub point: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Samples on which the decision procedure ran out of budget.
    pub unclassified: u64,
}

impl Estimate {
    pub fn from_counts(event: &Event, n: u64, k_n: u64, rat_n: f64, samples: u64, hits: u64, unclassified: u64) -> Estimate {
        let (point, stderr, ci_lo, ci_hi) = interval(hits, samples);
        Estimate {
            event: event.to_string(),
            n,
            k_n,
            m_n: m_threshold(n),
            rat_n,
            samples,
            hits,
            point,
            stderr,
            ci_lo,
            ci_hi,
            unclassified,
        }
    }

    /// Fields in [`ESTIMATE_HEADER`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.event.clone(),
            self.n.to_string(),
            self.k_n.to_string(),
            self.m_n.to_string(),
            format!("{:.10e}", self.rat_n),
            self.samples.to_string(),
            self.hits.to_string(),
            format!("{:.10e}", self.point),
            format!("{:.6e}", self.stderr),
            format!("{:.10e}", self.ci_lo),
            format!("{:.10e}", self.ci_hi),
            self.unclassified.to_string(),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }
}

pub const ESTIMATE_HEADER: &str = "event,n,k_n,M_n,rat_n,samples,hits,point,stderr,ci_lo,ci_hi,unclassified";

pub fn estimates_csv(rows: &[Estimate]) -> String {
    let mut s = format!("{ESTIMATE_HEADER}\n");
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// `(point, stderr, lo, hi)`; Wilson bounds when hits are few.
pub fn interval(hits: u64, samples: u64) -> (f64, f64, f64, f64) {
    if samples == 0 {
        return (f64::NAN, f64::NAN, 0.0, 1.0);
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let se = (p * (1.0 - p) / n).sqrt();
    if hits < WILSON_BELOW {
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        let lo = if hits == 0 { 0.0 } else { (centre - half).max(0.0) };
        return (p, se, lo, (centre + half).min(1.0));
    }
    (p, se, (p - Z95 * se).max(0.0), (p + Z95 * se).min(1.0))
}

/// Settings shared by estimates and sweeps.
#[derive(Debug, Clone, Copy)]
pub struct RunSettings {
    pub cutoffs: Cutoffs,
    pub sat_budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            cutoffs: Cutoffs::default(),
            sat_budget: DEFAULT_SAT_BUDGET,
            workers: None,
        }
    }
}

fn chunk_rng(state: &SamplerState, chunk: u64) -> ChaCha8Rng {
    SamplerState::new(state.seed, (state.stream_id << 32) | chunk).rng()
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| crate::Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// `(hits, unclassified)` per event over `samples` draws.
fn tally(
    sampler: &ClassSampler,
    events: &[Event],
    samples: u64,
    state: &SamplerState,
    settings: &RunSettings,
) -> Result<Vec<(u64, u64)>> {
    let chunks = samples.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|j| {
                let mut rng = chunk_rng(state, j);
                let mut analyzer = Analyzer::new(settings.sat_budget);
                let mut acc = vec![(0u64, 0u64); events.len()];
                let count = CHUNK.min(samples - j * CHUNK);
                for _ in 0..count {
                    let c = sampler.sample(&mut rng);
                    for (e, a) in events.iter().zip(acc.iter_mut()) {
                        match e.test(&c, &mut analyzer)? {
                            Some(true) => a.0 += 1,
                            Some(false) => {}
                            None => a.1 += 1,
                        }
                    }
                }
                Ok(acc)
            })
            .try_reduce(
                || vec![(0, 0); events.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| {
                        x.0 += y.0;
                        x.1 += y.1;
                    });
                    Ok(a)
                },
            )
    };
    with_workers(settings.workers, run)?
}

/// One row per `(n, event)`, `n`-major. Every event at a given `n` is
/// evaluated on the same samples.
pub fn sweep(
    n_values: &[u64],
    sched: &Schedule,
    events: &[Event],
    samples: u64,
    state: &SamplerState,
    settings: &RunSettings,
) -> Result<Vec<Estimate>> {
    if samples == 0 {
        return domain("sample count must be positive");
    }
    let mut rows = Vec::new();
    for &n in n_values {
        if n == 0 {
            return domain("size n must be at least 1");
        }
        let k = sched.k(n);
        let sampler = ClassSampler::new(n as usize, k as usize, settings.cutoffs)?;
        let rat = rat_for_k(n, k, settings.cutoffs)?.to_f64();
        let counts = tally(&sampler, events, samples, state, settings)?;
        for (e, (hits, unc)) in events.iter().zip(counts) {
            rows.push(Estimate::from_counts(e, n, k, rat, samples - unc, hits, unc));
        }
    }
    Ok(rows)
}

pub fn estimate(
    n: u64,
    sched: &Schedule,
    event: &Event,
    samples: u64,
    state: &SamplerState,
    settings: &RunSettings,
) -> Result<Estimate> {
    Ok(sweep(&[n], sched, std::slice::from_ref(event), samples, state, settings)?.remove(0))
}

/// Lines `n,k,seed,stream,index,<class>`; `stream` is the chunk substream.
pub fn dump_samples(n: u64, k: u64, count: u64, state: &SamplerState, cutoffs: Cutoffs) -> Result<Vec<String>> {
    let sampler = ClassSampler::new(n as usize, k as usize, cutoffs)?;
    let mut out = Vec::with_capacity(count as usize);
    for j in 0..count.div_ceil(CHUNK) {
        let mut rng = chunk_rng(state, j);
        let stream = (state.stream_id << 32) | j;
        for i in 0..CHUNK.min(count - j * CHUNK) {
            let c: Class = sampler.sample(&mut rng);
            out.push(format!("{n},{},{},{stream},{i},{c}", sampler.k(), state.seed));
        }
    }
    Ok(out)
}

/// Exact probability of `event` under the uniform law, by enumeration.
pub fn exact_probability(n: usize, k: usize, event: &Event) -> Result<BigRational> {
    let mut analyzer = Analyzer::default();
    let (mut hits, mut total) = (0u64, 0u64);
    let mut err = None;
    for_each_class(n, k, |s, l| {
        let c = Class::new(s.clone(), l.to_vec()).expect("enumerated labelling");
        total += 1;
        match event.test(&c, &mut analyzer) {
            Ok(Some(true)) => hits += 1,
            Ok(_) => {}
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(BigRational::new(BigUint::from(hits).into(), BigUint::from(total).into()))
}

/// Pearson statistic of `observed` counts against equal expected counts.
pub fn chi_square_uniform(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    observed.iter().map(|&o| (o as f64 - e).powi(2) / e).sum()
}

/// Upper quantile of chi-square with `df` degrees of freedom at normal
/// quantile `z` (Wilson-Hilferty).
pub fn chi_square_critical(df: usize, z: f64) -> f64 {
    let d = df as f64;
    let h = 2.0 / (9.0 * d);
    d * (1.0 - h + z * h.sqrt()).powi(3)
}

/// Normal quantile for an upper tail of 0.001.
pub const Z_999: f64 = 3.090232306167813;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::rational_to_f64;
    use crate::trees::{enumerate_classes, Structure};
    use std::collections::HashMap;

    #[test]
    fn intervals() {
        let (p, se, lo, hi) = interval(500, 1000);
        assert_eq!(p, 0.5);
        assert!((se - (0.25f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert!(lo < 0.5 && hi > 0.5);
        let (p, _, lo, hi) = interval(0, 100);
        assert_eq!((p, lo), (0.0, 0.0));
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn critical_values() {
        // df=1: 10.83, df=5: 20.52, df=39: 72.05 at alpha 0.001
        for (df, want) in [(5, 20.515), (39, 72.055), (100, 149.449)] {
            let got = chi_square_critical(df, Z_999);
            assert!((got / want - 1.0).abs() < 0.012, "df={df}: {got}");
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let ev = [Event::IsTrue, Event::Satisfiable];
        let st = SamplerState::new(11, 0);
        let run = |w| {
            let s = RunSettings { workers: Some(w), ..RunSettings::default() };
            sweep(&[8, 16], &Schedule::Identity, &ev, 10_000, &st, &s).unwrap()
        };
        assert_eq!(run(1), run(3));
        assert!(sweep(&[], &Schedule::Identity, &ev, 10, &st, &RunSettings::default()).unwrap().is_empty());
    }

    #[test]
    fn estimate_matches_exact_at_two() {
        let st = SamplerState::new(5, 1);
        let e = estimate(2, &Schedule::Identity, &Event::IsTrue, 200_000, &st, &RunSettings::default()).unwrap();
        assert!((e.point - 1.0 / 6.0).abs() < 3.0 * e.stderr, "{e:?}");
        let exact = exact_probability(2, 2, &Event::Satisfiable).unwrap();
        assert!((rational_to_f64(&exact) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn class_chi_square_small() {
        let cs = ClassSampler::new(3, 3, Cutoffs::default()).unwrap();
        let index: HashMap<Class, usize> = enumerate_classes(3, 3).unwrap().enumerate().map(|(i, c)| (c, i)).collect();
        let mut counts = vec![0u64; index.len()];
        let mut rng = SamplerState::new(9, 0).rng();
        for _ in 0..100_000 {
            counts[index[&cs.sample(&mut rng)]] += 1;
        }
        assert!(chi_square_uniform(&counts) < chi_square_critical(counts.len() - 1, Z_999));
        let _ = Structure::leaf();
    }

    #[test]
    fn dumps_are_prefixed() {
        let lines = dump_samples(4, 2, 3, &SamplerState::new(1, 0), Cutoffs::default()).unwrap();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("4,2,1,0,2,("));
    }
}
