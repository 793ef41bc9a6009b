//! Exact invariant suites behind `verify`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{GlobalArgs, Suite};
use crate::combinatorics::{
    bonferroni_failures_upto, catalan, count_classes, m_threshold, rational_to_f64, unimodality_exact,
    unimodality_log,
};
use crate::error::Result;
use crate::patterns::{
    is_simple_contradiction, repetition_distribution, st_count_exact, tautologies_without_repetition,
    Grammar, PatternLang, Production, Role,
};
use crate::series::{dc_counts, marked_gf, tree_structure_gf};
use crate::trees::{check_budget, enumerate_classes, key_census, Connective, FunctionKey};

pub(super) struct Check {
    pub suite: &'static str,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

/// Target of the pointed-to-plain coefficient ratio and its relative
/// tolerance.
const POINTED_RATIO_TARGET: f64 = 3.0;
const POINTED_RATIO_TOL: f64 = 0.05;

pub(super) fn run_suite(s: Suite, max_n: Option<u64>, order: usize, g: &GlobalArgs) -> Result<Vec<Check>> {
    match s {
        Suite::Bonferroni => Ok(bonferroni(max_n.unwrap_or(200))),
        Suite::Unimodal => Ok(unimodal(max_n.unwrap_or(100))),
        Suite::Series => series(order),
        Suite::DcBrackets => dc_brackets(max_n.unwrap_or(6), g),
        Suite::Census => census(max_n.unwrap_or(6), g),
        Suite::Duality => duality(max_n.unwrap_or(5), g),
    }
}

fn list(v: &[u64]) -> String {
    let shown: Vec<String> = v.iter().take(10).map(u64::to_string).collect();
    let more = if v.len() > 10 { " ..." } else { "" };
    format!("[{}{more}]", shown.join(" "))
}

fn bonferroni(max_n: u64) -> Vec<Check> {
    let bad = bonferroni_failures_upto(max_n);
    vec![Check {
        suite: "bonferroni",
        check: format!("partial sums bracket B for p <= n <= {max_n}"),
        pass: bad.is_empty(),
        detail: format!("failing n: {}", list(&bad)),
    }]
}

fn unimodal(max_n: u64) -> Vec<Check> {
    let mut peak_bad = Vec::new();
    let mut log_bad = Vec::new();
    for n in 1..=max_n {
        let u = unimodality_exact(n);
        // a_1 = a_2 at n = 2, the only tie
        if (n != 2 && !u.strict) || u.peak != m_threshold(n) {
            peak_bad.push(n);
        }
        if unimodality_log(n) != u {
            log_bad.push(n);
        }
    }
    vec![
        Check {
            suite: "unimodal",
            check: format!("single strict peak at M_n for n <= {max_n}"),
            pass: peak_bad.is_empty(),
            detail: format!("failing n: {}", list(&peak_bad)),
        },
        Check {
            suite: "unimodal",
            check: format!("log-domain scan agrees with exact for n <= {max_n}"),
            pass: log_bad.is_empty(),
            detail: format!("failing n: {}", list(&log_bad)),
        },
    ]
}

fn series(order: usize) -> Result<Vec<Check>> {
    let i = tree_structure_gf(order)?;
    let bad: Vec<u64> = (1..=order as u64)
        .filter(|&n| {
            let want = BigRational::from_integer(BigInt::from(catalan(n)) << (n - 1) as usize);
            *i.coeff(n as usize) != want
        })
        .collect();
    let pointed = marked_gf(order.max(2), 2)?;
    let ratios: Vec<f64> = (2..=order)
        .map(|n| rational_to_f64(&(pointed.coeff(n) / i.coeff(n))))
        .collect();
    let last = *ratios.last().unwrap_or(&f64::NAN);
    let rel = (last - POINTED_RATIO_TARGET).abs() / POINTED_RATIO_TARGET;
    let increasing = ratios.windows(2).skip(1).all(|w| w[1] > w[0]);
    Ok(vec![
        Check {
            suite: "series",
            check: format!("[z^n]I = 2^(n-1) C_n for n <= {order}"),
            pass: bad.is_empty(),
            detail: format!("failing n: {}", list(&bad)),
        },
        Check {
            suite: "series",
            check: format!("Itilde_n/I_n within 5% of 3 at n = {order}"),
            pass: rel <= POINTED_RATIO_TOL,
            detail: format!("ratio {last:.6} (relative error {rel:.4})"),
        },
        Check {
            suite: "series",
            check: format!("Itilde_n/I_n increasing over 3 <= n <= {order}"),
            pass: increasing,
            detail: format!("ratio at n=3: {:.6}", ratios.get(1).copied().unwrap_or(f64::NAN)),
        },
    ])
}

fn dc_brackets(max_n: u64, g: &GlobalArgs) -> Result<Vec<Check>> {
    check_budget(max_n as usize, g.enum_budget)?;
    let mut out = Vec::new();
    for n in 2..=max_n {
        let mut bad = Vec::new();
        let mut widest = String::new();
        for k in 1..=n {
            let st = BigRational::from_integer(st_count_exact(n as usize, k as usize)?.into());
            let d = dc_counts(n, k)?;
            if !(d.lower() <= st && st <= d.dc) {
                bad.push(k);
            }
            if k == n {
                widest = format!("k={n}: {} <= {} <= {}", d.lower(), st, d.dc);
            }
        }
        out.push(Check {
            suite: "dc-brackets",
            check: format!("DC - DC3 - DC4 <= ST <= DC at n = {n}, all k"),
            pass: bad.is_empty(),
            detail: if bad.is_empty() { widest } else { format!("failing k: {}", list(&bad)) },
        });
    }
    Ok(out)
}

fn census(max_n: u64, g: &GlobalArgs) -> Result<Vec<Check>> {
    check_budget(max_n as usize, g.enum_budget)?;
    let nn = PatternLang::n_pow(2)?;
    let n_lang = PatternLang::n();
    let mut out = Vec::new();
    for n in 1..=max_n as usize {
        let k = n.min(6);
        let exceptions = tautologies_without_repetition(n, k, &nn)?;
        out.push(Check {
            suite: "census",
            check: format!("every tautology has an N[N] repetition at n = {n}, k = {k}"),
            pass: exceptions.is_empty(),
            detail: match exceptions.first() {
                Some(c) => format!("{} exceptions, first {c}", exceptions.len()),
                None => "0 exceptions".into(),
            },
        });
        let total: num_bigint::BigUint = repetition_distribution(n, n, &n_lang)?.iter().sum();
        let want = count_classes(n as u64, n as u64)?;
        out.push(Check {
            suite: "census",
            check: format!("N repetition census sums to T at n = {n}"),
            pass: total == want,
            detail: format!("{total} vs {want}"),
        });
    }
    Ok(out)
}

/// `N` with the placeholder on the left child of the conjunction.
fn n_left() -> PatternLang {
    PatternLang::Grammar(Grammar {
        name: "N'".into(),
        productions: vec![
            Production { conn: Connective::Or, left: Role::Recurse, right: Role::Recurse },
            Production { conn: Connective::And, left: Role::Placeholder, right: Role::Recurse },
        ],
    })
}

fn duality(max_n: u64, g: &GlobalArgs) -> Result<Vec<Check>> {
    check_budget(max_n as usize, g.enum_budget)?;
    let mut out = Vec::new();
    for n in 1..=max_n as usize {
        let k = n.min(6);
        let keys = key_census(n, k, g.enum_budget)?;
        let t = keys.get(&FunctionKey::TRUE).copied().unwrap_or(0);
        let f = keys.get(&FunctionKey::FALSE).copied().unwrap_or(0);
        out.push(Check {
            suite: "duality",
            check: format!("#true = #false at n = {n}"),
            pass: t == f,
            detail: format!("{t} vs {f}"),
        });
        let st = st_count_exact(n, k)?;
        let sc = enumerate_classes(n, k)?.filter(is_simple_contradiction).count();
        out.push(Check {
            suite: "duality",
            check: format!("#simple tautologies = #simple contradictions at n = {n}"),
            pass: st == sc.into(),
            detail: format!("{st} vs {sc}"),
        });
        let dn = repetition_distribution(n, k, &PatternLang::n())?;
        let dp = repetition_distribution(n, k, &PatternLang::p())?;
        let dl = repetition_distribution(n, k, &n_left())?;
        out.push(Check {
            suite: "duality",
            check: format!("repetition census of N = of P = of N mirrored at n = {n}"),
            pass: dn == dp && dn == dl,
            detail: format!("{dn:?}"),
        });
    }
    Ok(out)
}
