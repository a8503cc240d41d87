//! Seeded, schedule-independent Monte-Carlo harness.
//!
//! Replication `r` draws from its own ChaCha8 stream `(seed, r)`.
//! Replications are grouped in fixed-size chunks; each chunk keeps running
//! moments, and chunks are merged in index order, so the summary does not
//! depend on how many worker threads ran the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symtensor::{jacobi_eigenvalues, num_components, POSDEF_EPS};

pub const CHUNK: usize = 4096;

/// Seed plus the stream-splitting rule: replication `r` uses stream `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }

    /// An independent family, e.g. for a second estimator compared with
    /// the first.
    pub fn derive(&self, tag: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        rng.set_stream(tag);
        Self { seed: rng.random() }
    }
}

/// Running count, mean and centred sum of squares per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self { count: 0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    pub fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let k = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / k;
            *s += d * (v - *m);
        }
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * nb / n;
            self.m2[i] += other.m2[i] + d * d * na * nb / n;
        }
        self.count += other.count;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> Vec<f64> {
        let d = (self.count as f64 - 1.0).max(1.0);
        self.m2.iter().map(|s| (s / d).max(0.0)).collect()
    }
}

#[derive(Debug, Clone)]
struct Chunk {
    moments: Moments,
    posdef: u64,
}

/// Raw chunk results of a run.
#[derive(Debug, Clone)]
pub struct McRun {
    chunks: Vec<Chunk>,
    posdef_dim: Option<usize>,
}

/// Per-component summary of a Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub replications: u64,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub std_error: Vec<f64>,
    /// `sd / |mean|`, `None` where the mean is zero.
    pub cv: Vec<Option<f64>>,
    /// Fraction of replications whose leading rank-2 block is positive
    /// definite, when requested.
    pub posdef_fraction: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McOptions {
    /// Treat the first `C(n+1, 2)` outputs as a rank-2 tensor over ℝⁿ and
    /// count positive-definite replications.
    pub posdef_dim: Option<usize>,
}

/// Runs `replications` independent evaluations of `estimate`.
pub fn mc_run<F>(replications: u64, stream: &RngStream, options: McOptions, estimate: F) -> Result<McRun>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync,
{
    try_mc_run(replications, stream, options, |rng| Ok(estimate(rng)))
}

/// [`mc_run`] for estimators that can fail; the run stops with the error.
pub fn try_mc_run<F>(replications: u64, stream: &RngStream, options: McOptions, estimate: F) -> Result<McRun>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    if replications < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 replications, got {replications}")));
    }
    let n_chunks = (replications as usize).div_ceil(CHUNK);
    let width = std::sync::OnceLock::new();
    let chunks: Vec<Chunk> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = (c * CHUNK) as u64;
            let hi = (lo + CHUNK as u64).min(replications);
            let mut moments: Option<Moments> = None;
            let mut posdef = 0;
            for r in lo..hi {
                let mut rng = stream.substream(r);
                let x = estimate(&mut rng)?;
                if *width.get_or_init(|| x.len()) != x.len() {
                    return Err(Error::InvalidArgument("estimator output length changed between replications".into()));
                }
                if let Some(n) = options.posdef_dim {
                    if x.len() < num_components(n, 2) {
                        return Err(Error::InvalidArgument("output too short for a rank-2 tensor".into()));
                    }
                    if leading_posdef(&x, n) {
                        posdef += 1;
                    }
                }
                moments.get_or_insert_with(|| Moments::new(x.len())).push(&x);
            }
            Ok(Chunk { moments: moments.expect("non-empty chunk"), posdef })
        })
        .collect::<Result<_>>()?;
    Ok(McRun { chunks, posdef_dim: options.posdef_dim })
}

fn leading_posdef(x: &[f64], n: usize) -> bool {
    let m = num_components(n, 2);
    let idx = crate::symtensor::multi_indices(n, 2);
    let mut a = vec![vec![0.0; n]; n];
    for (v, ix) in x[..m].iter().zip(&idx) {
        a[ix[0]][ix[1]] = *v;
        a[ix[1]][ix[0]] = *v;
    }
    jacobi_eigenvalues(a)[0] > POSDEF_EPS
}

impl McRun {
    pub fn replications(&self) -> u64 {
        self.chunks.iter().map(|c| c.moments.count).sum()
    }

    /// Chunk moments merged in index order.
    pub fn moments(&self) -> Moments {
        let mut acc = Moments::new(self.chunks[0].moments.mean.len());
        for c in &self.chunks {
            acc.merge(&c.moments);
        }
        acc
    }

    pub fn summary(&self) -> McSummary {
        let m = self.moments();
        let variance = m.variance();
        let n = m.count as f64;
        let std_error = variance.iter().map(|v| (v / n).sqrt()).collect();
        let cv = variance
            .iter()
            .zip(&m.mean)
            .map(|(v, mu)| if *mu != 0.0 { Some(v.sqrt() / mu.abs()) } else { None })
            .collect();
        let posdef_fraction = self.posdef_dim.map(|_| self.chunks.iter().map(|c| c.posdef).sum::<u64>() as f64 / n);
        McSummary { replications: m.count, mean: m.mean, variance, std_error, cv, posdef_fraction }
    }

    /// Percentile bootstrap interval for the variance of `component`,
    /// resampling whole chunks (blocks of i.i.d. replications) with
    /// replacement.
    pub fn variance_ci(&self, component: usize, level: f64, resamples: usize, seed: u64) -> (f64, f64) {
        let k = self.chunks.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vals: Vec<f64> = (0..resamples)
            .map(|_| {
                let mut acc = Moments::new(1);
                for _ in 0..k {
                    let c = &self.chunks[rng.random_range(0..k)].moments;
                    let one = Moments { count: c.count, mean: vec![c.mean[component]], m2: vec![c.m2[component]] };
                    acc.merge(&one);
                }
                acc.variance()[0]
            })
            .collect();
        vals.sort_by(f64::total_cmp);
        let alpha = 0.5 * (1.0 - level);
        let pick = |p: f64| vals[((p * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
        (pick(alpha), pick(1.0 - alpha))
    }
}

impl McSummary {
    /// `|mean - truth| ≤ z · SE` per component, with a small absolute
    /// allowance for rounding when the standard error vanishes.
    pub fn within_se(&self, truth: &[f64], z: f64) -> Vec<bool> {
        self.mean
            .iter()
            .zip(truth)
            .zip(&self.std_error)
            .map(|((m, t), se)| (m - t).abs() <= z * se + 1e-12 * (1.0 + t.abs()))
            .collect()
    }

    /// Largest `|mean - truth| / SE` over components with positive SE.
    pub fn max_z(&self, truth: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(truth)
            .zip(&self.std_error)
            .map(|((m, t), se)| if *se > 0.0 { (m - t).abs() / se } else if (m - t).abs() > 1e-12 * (1.0 + t.abs()) { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_estimator_has_zero_variance() {
        let run = mc_run(100, &RngStream::new(1), McOptions::default(), |_| vec![3.0, -1.0]).unwrap();
        let s = run.summary();
        assert_eq!(s.mean, vec![3.0, -1.0]);
        assert_eq!(s.variance, vec![0.0, 0.0]);
        assert_eq!(s.cv, vec![Some(0.0), Some(0.0)]);
    }

    #[test]
    fn failures_and_ragged_output_abort_the_run() {
        let err = try_mc_run(10, &RngStream::new(1), McOptions::default(), |rng| {
            if rng.random::<f64>() < 0.5 { Err(Error::Degenerate("x".into())) } else { Ok(vec![1.0]) }
        });
        assert!(matches!(err, Err(Error::Degenerate(_))));
        let ragged = mc_run(10, &RngStream::new(1), McOptions::default(), |rng| vec![0.0; 1 + usize::from(rng.random::<bool>())]);
        assert!(ragged.is_err());
    }

    #[test]
    fn same_seed_same_summary() {
        let f = |rng: &mut ChaCha8Rng| vec![rng.random::<f64>(), rng.random::<f64>().powi(2)];
        let a = mc_run(10_000, &RngStream::new(7), McOptions::default(), f).unwrap().summary();
        let b = mc_run(10_000, &RngStream::new(7), McOptions::default(), f).unwrap().summary();
        assert_eq!(a, b);
        let c = mc_run(10_000, &RngStream::new(8), McOptions::default(), f).unwrap().summary();
        assert_ne!(a, c);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let f = |rng: &mut ChaCha8Rng| vec![rng.random::<f64>().ln()];
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_run(20_000, &RngStream::new(3), McOptions::default(), f).unwrap().summary());
        let b = four.install(|| mc_run(20_000, &RngStream::new(3), McOptions::default(), f).unwrap().summary());
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_moments() {
        let s = mc_run(200_000, &RngStream::new(11), McOptions::default(), |rng| vec![rng.random::<f64>()])
            .unwrap()
            .summary();
        assert!(s.within_se(&[0.5], 4.0)[0]);
        assert!((s.variance[0] - 1.0 / 12.0).abs() < 1e-3);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.3).collect();
        let mut all = Moments::new(1);
        xs.iter().for_each(|x| all.push(&[*x]));
        let (mut a, mut b) = (Moments::new(1), Moments::new(1));
        xs[..313].iter().for_each(|x| a.push(&[*x]));
        xs[313..].iter().for_each(|x| b.push(&[*x]));
        a.merge(&b);
        assert!((a.mean[0] - all.mean[0]).abs() < 1e-12);
        assert!((a.m2[0] - all.m2[0]).abs() < 1e-8);
    }

    #[test]
    fn bootstrap_interval_covers_variance() {
        let run = mc_run(100_000, &RngStream::new(5), McOptions::default(), |rng| vec![rng.random::<f64>()]).unwrap();
        let (lo, hi) = run.variance_ci(0, 0.99, 500, 1);
        assert!(lo < 1.0 / 12.0 && 1.0 / 12.0 < hi, "{lo} {hi}");
    }

    #[test]
    fn too_few_replications() {
        assert!(mc_run(1, &RngStream::new(0), McOptions::default(), |_| vec![0.0]).is_err());
    }
}
