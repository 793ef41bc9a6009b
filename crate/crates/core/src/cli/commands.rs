use num_bigint::BigUint;
use num_rational::BigRational;

use super::output::Emitter;
use super::verify::run_suite;
use super::*;
use crate::combinatorics::{b_exact, count_classes, m_threshold, rat_exact, rat_for_k, rational_to_f64};
use crate::error::Result;
use crate::patterns::{generate_expansions, repetition_distribution};
use crate::sampler::{dump_samples, sweep, SamplerState, ESTIMATE_HEADER};
use crate::series::{marked_gf, tree_structure_gf, u_series};
use crate::trees::{build_atlas_with_budget, check_budget, class_key, enumerate_classes, Analyzer};

type Summary = Vec<(String, String)>;

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

pub(super) fn fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Runs the command; `Ok(true)` when an invariant check failed.
pub(super) fn execute(cli: &Cli, seed: Option<u64>, em: &mut Emitter) -> Result<bool> {
    let g = &cli.global;
    let (summary, failed) = match &cli.command {
        Command::Count(a) => (count(a, g, em)?, false),
        Command::Threshold(a) => (threshold(a, em)?, false),
        Command::Enumerate(a) => (enumerate(a, g, em)?, false),
        Command::Atlas(a) => (atlas(a, g, em)?, false),
        Command::Estimate(a) => {
            let events = Events(vec![a.event.clone()]);
            (estimate(&Sizes(vec![a.n]), &a.budget, &events, a.samples, a.sampling.stream, seed, g, em)?, false)
        }
        Command::Sweep(a) => (estimate(&a.n, &a.budget, &a.events, a.samples, a.sampling.stream, seed, g, em)?, false),
        Command::Sample(a) => (sample(a, seed, g, em)?, false),
        Command::Verify(a) => verify(a, g, em)?,
        Command::Series(a) => (series(a, em)?, false),
        Command::Census(a) => (census(a, g, em)?, false),
        Command::Expand(a) => (expand(a, em)?, false),
    };
    em.finish(&summary)?;
    Ok(failed)
}

fn count(a: &CountArgs, g: &GlobalArgs, em: &mut Emitter) -> Result<Summary> {
    let cutoffs = g.cutoffs();
    em.begin(&["n", "k", "T", "B", "rat", "rat_float"])?;
    for &n in &a.n.0 {
        let k = a.budget.k(n);
        let exact = cutoffs.exact(n, k);
        let (t, b) = if exact {
            (count_classes(n, k)?.to_string(), fraction(&b_exact(n, k)?))
        } else {
            (String::new(), String::new())
        };
        let (rat, rat_float) = match (n, exact) {
            (1, _) => (String::new(), String::new()),
            (_, true) => {
                let q = rat_exact(n, k)?;
                (fraction(&q), rational_to_f64(&q).to_string())
            }
            (_, false) => (String::new(), rat_for_k(n, k, cutoffs)?.to_f64().to_string()),
        };
        em.row(&[n.to_string(), k.to_string(), t, b, rat, rat_float])?;
    }
    Ok(vec![kv("exact_fields_below", format!("n<={} and n*k<={}", cutoffs.exact_n, cutoffs.exact_work))])
}

fn threshold(a: &ThresholdArgs, em: &mut Emitter) -> Result<Summary> {
    em.begin(&["n", "M_n", "M_n_ln_M_n_over_n"])?;
    for &n in &a.n.0 {
        let m = m_threshold(n);
        let ratio = m as f64 * (m as f64).ln() / n as f64;
        em.row(&[n.to_string(), m.to_string(), ratio.to_string()])?;
    }
    Ok(Vec::new())
}

fn enumerate(a: &EnumerateArgs, g: &GlobalArgs, em: &mut Emitter) -> Result<Summary> {
    let (n, k) = (a.n, a.budget.k(a.n));
    check_budget(n as usize, g.enum_budget)?;
    let classes = enumerate_classes(n as usize, k as usize)?;
    let mut analyzer = Analyzer::new(g.sat_budget);
    em.begin(&["class"])?;
    let (mut total, mut kept, mut unknown) = (0u64, 0u64, 0u64);
    for c in classes {
        total += 1;
        let keep = match &a.filter {
            None => true,
            Some(e) => match e.test(&c, &mut analyzer)? {
                Some(b) => b,
                None => {
                    unknown += 1;
                    false
                }
            },
        };
        if keep {
            kept += 1;
            em.row(&[c.to_string()])?;
        }
    }
    let expected = count_classes(n, k)?;
    let mut s = vec![
        kv("n", n),
        kv("k", k),
        kv("classes", total),
        kv("count_formula", &expected),
        kv("census_matches_formula", BigUint::from(total) == expected),
    ];
    if let Some(e) = &a.filter {
        s.push(kv("filter", e));
        s.push(kv("matched", kept));
        s.push(kv("probability", fraction(&BigRational::new(kept.into(), total.into()))));
        s.push(kv("undecided", unknown));
    }
    Ok(s)
}

fn atlas(a: &AtlasArgs, g: &GlobalArgs, em: &mut Emitter) -> Result<Summary> {
    let atlas = build_atlas_with_budget(a.max_size, g.enum_budget)?;
    em.begin(&["key", "L", "E", "R", "witness"])?;
    for (key, e) in atlas.sorted() {
        let witness = e.witness.as_ref().map_or_else(|| "-".to_string(), |c| c.to_string());
        let r = e.size - key.essential();
        em.row(&[key.to_string(), e.size.to_string(), key.essential().to_string(), r.to_string(), witness])?;
    }
    Ok(vec![kv("functions", atlas.len()), kv("exhausted_up_to", atlas.exhausted_up_to())])
}

#[allow(clippy::too_many_arguments)]
fn estimate(
    sizes: &Sizes,
    budget: &BudgetArgs,
    events: &Events,
    samples: u64,
    stream: u64,
    seed: Option<u64>,
    g: &GlobalArgs,
    em: &mut Emitter,
) -> Result<Summary> {
    let state = SamplerState::new(seed.expect("seeded command"), stream);
    let rows = sweep(&sizes.0, &budget.effective(), &events.0, samples, &state, &g.run_settings())?;
    em.begin(&ESTIMATE_HEADER.split(',').collect::<Vec<_>>())?;
    let mut unclassified = 0;
    for r in &rows {
        unclassified += r.unclassified;
        em.row(&r.csv_fields())?;
    }
    Ok(vec![kv("unclassified_total", unclassified)])
}

fn sample(a: &SampleArgs, seed: Option<u64>, g: &GlobalArgs, em: &mut Emitter) -> Result<Summary> {
    let state = SamplerState::new(seed.expect("seeded command"), a.sampling.stream);
    let lines = dump_samples(a.n, a.budget.effective().k(a.n), a.count, &state, g.cutoffs())?;
    em.begin(&["n", "k", "seed", "stream", "index", "class"])?;
    for l in &lines {
        em.row(&l.splitn(6, ',').map(str::to_string).collect::<Vec<_>>())?;
    }
    Ok(vec![kv("samples", lines.len())])
}

fn verify(a: &VerifyArgs, g: &GlobalArgs, em: &mut Emitter) -> Result<(Summary, bool)> {
    em.begin(&["suite", "check", "status", "detail"])?;
    let (mut passed, mut failed) = (0, 0);
    for &s in &a.suite {
        for c in run_suite(s, a.max_n, a.order, g)? {
            if c.pass {
                passed += 1;
            } else {
                failed += 1;
            }
            let status = if c.pass { "pass" } else { "FAIL" };
            em.row(&[c.suite.to_string(), c.check, status.to_string(), c.detail])?;
        }
    }
    Ok((vec![kv("passed", passed), kv("failed", failed)], failed > 0))
}

fn series(a: &SeriesArgs, em: &mut Emitter) -> Result<Summary> {
    let s = match a.which {
        Which::I => tree_structure_gf(a.order)?,
        Which::U => u_series(a.order)?,
        Which::Itilde => marked_gf(a.order, 2)?,
        Which::I3 => marked_gf(a.order, 3)?,
        Which::I4 => marked_gf(a.order, 4)?,
    };
    em.begin(&["n", "numerator", "denominator"])?;
    for (n, c) in s.coeffs().iter().enumerate() {
        em.row(&[n.to_string(), c.numer().to_string(), c.denom().to_string()])?;
    }
    Ok(vec![kv("series", format!("{:?}", a.which)), kv("order", a.order)])
}

fn census(a: &CensusArgs, g: &GlobalArgs, em: &mut Emitter) -> Result<Summary> {
    let (n, k) = (a.n as usize, a.budget.k(a.n) as usize);
    check_budget(n, g.enum_budget)?;
    let dist = repetition_distribution(n, k, &a.lang)?;
    let total: BigUint = dist.iter().sum();
    em.begin(&["n", "k", "lang", "r", "count_exact", "count_ge", "total"])?;
    for &r in &a.r {
        let exact = dist.get(r).cloned().unwrap_or_default();
        let ge: BigUint = dist.iter().skip(r).sum();
        em.row(&[
            n.to_string(),
            k.to_string(),
            a.lang.to_string(),
            r.to_string(),
            exact.to_string(),
            ge.to_string(),
            total.to_string(),
        ])?;
    }
    Ok(vec![kv("classes", &total)])
}

fn expand(a: &ExpandArgs, em: &mut Emitter) -> Result<Summary> {
    let k = a.k.unwrap_or(a.target_n);
    let base_key = class_key(&a.base)?;
    let out = generate_expansions(&a.base, a.kind, a.target_n, k)?;
    em.begin(&["class", "key", "preserves_key"])?;
    let mut preserved = 0;
    for c in &out {
        let key = class_key(c)?;
        preserved += (key == base_key) as usize;
        em.row(&[c.to_string(), key.to_string(), (key == base_key).to_string()])?;
    }
    Ok(vec![
        kv("base", &a.base),
        kv("base_key", base_key),
        kv("kind", a.kind),
        kv("expansions", out.len()),
        kv("preserving", preserved),
    ])
}
