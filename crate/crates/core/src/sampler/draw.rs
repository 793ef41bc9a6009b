use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, WeightedAliasIndex};

use crate::combinatorics::{ln_block_weights, Cutoffs, StirlingRows};
use crate::error::{domain, Error, Result};
use crate::trees::{Class, Connective, Literal, Node, Structure};

/// Seed and substream of a random stream. Equal states give equal draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SamplerState {
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplerState {
    pub fn new(seed: u64, stream_id: u64) -> SamplerState {
        SamplerState { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_id);
        r
    }
}

/// Subtree sizes up to this bound use precomputed split tables.
const SPLIT_TABLE_MAX: usize = 2048;

/// Uniform sampler of connective-labelled structures with `n` leaves.
#[derive(Debug, Clone)]
pub struct StructureSampler {
    n: usize,
    ln_catalan: Vec<f64>,
    /// `cdf[s][i-1] = P(left size <= i)` for subtree size `s`.
    cdf: Vec<Vec<f64>>,
}

impl StructureSampler {
    pub fn new(n: usize) -> Result<StructureSampler> {
        if n == 0 {
            return domain("size n must be at least 1");
        }
        // C_1 = 1, C_{m+1} = C_m (4m - 2) / (m + 1)
        let mut ln_catalan = vec![0.0; n + 1];
        for m in 1..n {
            ln_catalan[m + 1] = ln_catalan[m] + ((4 * m - 2) as f64).ln() - ((m + 1) as f64).ln();
        }
        let mut cdf = vec![Vec::new(); n.min(SPLIT_TABLE_MAX) + 1];
        for (s, row) in cdf.iter_mut().enumerate().skip(2) {
            let mut acc = 0.0;
            *row = (1..s)
                .map(|i| {
                    acc += (ln_catalan[i] + ln_catalan[s - i] - ln_catalan[s]).exp();
                    acc
                })
                .collect();
        }
        Ok(StructureSampler { n, ln_catalan, cdf })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Left subtree size for a subtree of size `s`, given a uniform `u`.
    fn split(&self, s: usize, u: f64) -> usize {
        if s < self.cdf.len() {
            let row = &self.cdf[s];
            return (row.partition_point(|&c| c <= u) + 1).min(s - 1);
        }
        // alternate between the two ends, where the mass is
        let lc = &self.ln_catalan;
        let mut left = u;
        let (mut a, mut b) = (1, s - 1);
        while a <= b {
            for i in if a == b { vec![a] } else { vec![a, b] } {
                left -= (lc[i] + lc[s - i] - lc[s]).exp();
                if left < 0.0 {
                    return i;
                }
            }
            a += 1;
            b -= 1;
        }
        s / 2
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Structure {
        let mut nodes = Vec::with_capacity(2 * self.n - 1);
        let mut stack = Vec::with_capacity(self.n);
        stack.push(self.n);
        while let Some(s) = stack.pop() {
            if s == 1 {
                nodes.push(Node::Leaf);
                continue;
            }
            // one draw per node: the high 53 bits place the split, the lowest
            // bit picks the connective
            let r: u64 = rng.gen();
            let a = self.split(s, (r >> 11) as f64 * (1.0 / (1u64 << 53) as f64));
            let conn = if r & 1 == 1 { Connective::Or } else { Connective::And };
            let i = nodes.len();
            nodes.push(Node::Internal { conn, right: (i + 2 * a) as u32 });
            stack.push(s - a);
            stack.push(a);
        }
        Structure::from_nodes_unchecked(nodes)
    }
}

/// Uniform sampler of set partitions of `n` leaves into exactly `p` blocks
/// for every `p <= max_p`.
#[derive(Debug, Clone)]
pub struct PartitionSampler {
    n: usize,
    max_p: usize,
    /// `single[m * (max_p + 1) + q] = S(m-1,q-1) / S(m,q)`: the chance that
    /// leaf `m` is alone in its block given `q` blocks on the first `m`.
    single: Vec<f64>,
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl PartitionSampler {
    pub fn new(n: usize, max_p: usize) -> Result<PartitionSampler> {
        if n == 0 || max_p == 0 || max_p > n {
            return domain(format!("need 1 <= p <= n, got n={n} p={max_p}"));
        }
        // ln rho(m, q), rho(m, q) = S(m,q) / S(m,q-1), one row at a time:
        // rho(m,q) = (q rho(m-1,q) + 1) / (q - 1 + 1/rho(m-1,q-1))
        let w = max_p + 1;
        let mut single = vec![0.0; (n + 1) * w];
        let mut prev = vec![f64::NEG_INFINITY; w];
        let mut row = vec![f64::NEG_INFINITY; w];
        for m in 1..=n {
            for q in 1..=max_p.min(m) {
                single[m * w + q] = 1.0 / (((q as f64).ln() + prev[q]).exp() + 1.0);
            }
            row[1] = f64::INFINITY;
            for q in 2..=max_p.min(m) {
                let num = ln_add((q as f64).ln() + prev[q], 0.0);
                let den = ln_add(((q - 1) as f64).ln(), -prev[q - 1]);
                row[q] = num - den;
            }
            std::mem::swap(&mut prev, &mut row);
        }
        Ok(PartitionSampler { n, max_p, single })
    }

    /// Block of every leaf in restricted-growth form.
    pub fn sample<R: Rng>(&self, p: usize, rng: &mut R) -> Result<Vec<u32>> {
        if p == 0 || p > self.max_p {
            return domain(format!("block count {p} outside 1..={}", self.max_p));
        }
        let mut raw = vec![0u32; self.n];
        let mut q = p;
        for m in (1..=self.n).rev() {
            if rng.gen::<f64>() < self.single[m * (self.max_p + 1) + q] {
                q -= 1;
                raw[m - 1] = q as u32;
            } else {
                raw[m - 1] = rng.gen_range(0..q as u32);
            }
        }
        debug_assert_eq!(q, 0);
        let mut map = vec![u32::MAX; p];
        let mut next = 0;
        for b in raw.iter_mut() {
            if map[*b as usize] == u32::MAX {
                map[*b as usize] = next;
                next += 1;
            }
            *b = map[*b as usize];
        }
        Ok(raw)
    }
}

#[derive(Debug, Clone)]
enum BlockLaw {
    /// Cumulative integer weights `S(n,p) 2^{n-p}` for `p = 1..`.
    Exact(Vec<BigUint>),
    Alias { lo: usize, table: WeightedAliasIndex<f64> },
}

/// Uniform sampler of classes of size `n` over at most `k` blocks.
#[derive(Debug, Clone)]
pub struct ClassSampler {
    n: usize,
    k: usize,
    structures: StructureSampler,
    partitions: PartitionSampler,
    blocks: BlockLaw,
}

impl ClassSampler {
    pub fn new(n: usize, k: usize, cutoffs: Cutoffs) -> Result<ClassSampler> {
        if n == 0 || k == 0 {
            return domain("need n >= 1 and k >= 1");
        }
        let k = k.min(n);
        let (blocks, max_p) = if cutoffs.exact(n as u64, k as u64) {
            let mut rows = StirlingRows::new(k);
            rows.seek(n as u64);
            let mut acc = BigUint::zero();
            let cum: Vec<BigUint> = (1..=k)
                .map(|p| {
                    acc += rows.get(p) << (n - p);
                    acc.clone()
                })
                .collect();
            (BlockLaw::Exact(cum), k)
        } else {
            let (lo, logs) = ln_block_weights(n as u64, k as u64)?;
            let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
            let hi = lo as usize + w.len() - 1;
            let table = WeightedAliasIndex::new(w).map_err(|e| Error::Domain(format!("alias table: {e}")))?;
            (BlockLaw::Alias { lo: lo as usize, table }, hi)
        };
        Ok(ClassSampler {
            n,
            k,
            structures: StructureSampler::new(n)?,
            partitions: PartitionSampler::new(n, max_p)?,
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample_block_count<R: Rng>(&self, rng: &mut R) -> usize {
        match &self.blocks {
            BlockLaw::Exact(cum) => {
                let u = rng.gen_biguint_below(cum.last().unwrap());
                cum.partition_point(|c| *c <= u) + 1
            }
            BlockLaw::Alias { lo, table } => lo + table.sample(rng),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Class {
        let p = self.sample_block_count(rng);
        let structure = self.structures.sample(rng);
        let rgs = self.partitions.sample(p, rng).expect("block count within table");
        let mut seen = vec![false; p];
        let leaves = rgs
            .into_iter()
            .map(|b| {
                let first = !std::mem::replace(&mut seen[b as usize], true);
                Literal { block: b, negated: !first && rng.gen() }
            })
            .collect();
        Class::from_canonical(structure, leaves)
    }
}

pub fn sample_structure(n: usize, state: &SamplerState) -> Result<Structure> {
    Ok(StructureSampler::new(n)?.sample(&mut state.rng()))
}

pub fn sample_partition(n: usize, p: usize, state: &SamplerState) -> Result<Vec<u32>> {
    PartitionSampler::new(n, p)?.sample(p, &mut state.rng())
}

pub fn sample_class(n: usize, k: usize, state: &SamplerState) -> Result<Class> {
    Ok(ClassSampler::new(n, k, Cutoffs::default())?.sample(&mut state.rng()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{catalan, stirling2};

    #[test]
    fn singleton_probabilities_match_exact_ratios() {
        let ps = PartitionSampler::new(30, 30).unwrap();
        for m in 2..=30u64 {
            for q in 1..=m {
                let want = crate::combinatorics::rational_to_f64(&num_rational::BigRational::new(
                    stirling2(m - 1, q - 1).into(),
                    stirling2(m, q).into(),
                ));
                let got = ps.single[m as usize * 31 + q as usize];
                assert!((got - want).abs() < 1e-12 * want.max(1e-300), "m={m} q={q}");
            }
        }
        assert_eq!(ps.single[31 + 1], 1.0);
    }

    #[test]
    fn split_table_sums_to_one() {
        let s = StructureSampler::new(200).unwrap();
        for size in [2, 3, 10, 200] {
            assert!((s.cdf[size].last().unwrap() - 1.0).abs() < 1e-9);
        }
        let lc = s.ln_catalan[20];
        assert!((lc - crate::combinatorics::rational_to_f64(&num_rational::BigRational::from_integer(catalan(20).into())).ln()).abs() < 1e-9);
    }

    #[test]
    fn trivial_draws() {
        let st = SamplerState::new(1, 0);
        assert_eq!(sample_structure(1, &st).unwrap(), Structure::leaf());
        assert_eq!(sample_partition(5, 5, &st).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(sample_partition(5, 1, &st).unwrap(), vec![0; 5]);
        assert_eq!(sample_class(1, 1, &st).unwrap(), Class::single());
        assert!(sample_partition(3, 4, &st).is_err());
    }

    #[test]
    fn samples_are_valid_and_reproducible() {
        let cs = ClassSampler::new(64, 64, Cutoffs::default()).unwrap();
        let mut a = SamplerState::new(7, 3).rng();
        let mut b = SamplerState::new(7, 3).rng();
        for _ in 0..50 {
            let c = cs.sample(&mut a);
            assert_eq!(c, cs.sample(&mut b));
            let s = Structure::from_nodes(c.structure().nodes().to_vec()).unwrap();
            assert_eq!(s.size(), 64);
            assert!(crate::trees::is_canonical_labels(c.leaves()));
        }
    }

    #[test]
    fn alias_and_exact_block_laws_agree_in_mean() {
        let exact = ClassSampler::new(200, 200, Cutoffs::default()).unwrap();
        let alias = ClassSampler::new(200, 200, Cutoffs { exact_n: 0, exact_work: 0 }).unwrap();
        let mut r = SamplerState::new(3, 0).rng();
        let mean = |s: &ClassSampler, r: &mut ChaCha8Rng| {
            (0..20_000).map(|_| s.sample_block_count(r) as f64).sum::<f64>() / 20_000.0
        };
        let (a, b) = (mean(&exact, &mut r), mean(&alias, &mut r));
        assert!((a - b).abs() < 0.5, "{a} vs {b}");
    }
}
