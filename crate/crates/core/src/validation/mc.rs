//! Seeded Monte-Carlo estimates of the link metrics.
//!
//! Samples are generated in fixed-size chunks; chunk k draws from ChaCha8
//! stream k of the point seed. Chunks run in parallel and their Welford
//! accumulators are merged in chunk order, so results are bit-identical for
//! any thread count.

use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fading::{SampleMode, SumSampler};
use crate::metrics::LinkConfig;
use crate::specfun::q_function;

pub const MIN_SAMPLES: u64 = 10_000;
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub mode: SampleMode,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64, mode: SampleMode) -> Result<Self> {
        let c = Self {
            n_samples,
            seed,
            mode,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::domain(format!(
                "Monte-Carlo needs at least {MIN_SAMPLES} samples, got {}",
                self.n_samples
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiEstimate {
    pub mean: f64,
    /// Sample standard deviation over √n.
    pub std_error: f64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    Capacity,
    Ber,
    Outage,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Capacity, MetricKind::Ber, MetricKind::Outage];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricKind::Capacity => "capacity",
            MetricKind::Ber => "ber",
            MetricKind::Outage => "outage",
        }
    }
}

/// Streaming count / mean / M2.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn estimate(&self) -> CiEstimate {
        let var = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        CiEstimate {
            mean: self.mean,
            std_error: (var / self.n.max(1) as f64).sqrt(),
            n: self.n,
        }
    }
}

/// SplitMix64 finaliser of (master, index): independent per-point seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Estimates of every metric from one shared set of channel draws, in the
/// order of [`MetricKind::ALL`].
pub fn mc_metrics(cfg: &LinkConfig, gamma_th: f64, mc: &McConfig) -> Result<[CiEstimate; 3]> {
    cfg.validate()?;
    mc.validate()?;
    if !(gamma_th >= 0.0) {
        return Err(Error::domain(format!(
            "gamma_th must be non-negative, got {gamma_th}"
        )));
    }
    let model = cfg.model()?;
    let sampler = SumSampler::new(&model, mc.mode);
    let eta = cfg.eta();
    let k_ber = 2.0 * eta * cfg.lambda_mod;
    let n_chunks = mc.n_samples.div_ceil(CHUNK);
    let parts: Vec<[Welford; 3]> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(mc.seed, c);
            let len = CHUNK.min(mc.n_samples - c * CHUNK);
            let mut acc = [Welford::default(); 3];
            for _ in 0..len {
                let g = sampler.draw(&mut rng);
                acc[0].push((eta * g).ln_1p() / LN_2);
                acc[1].push(q_function((k_ber * g).sqrt()));
                acc[2].push(if eta * g < gamma_th { 1.0 } else { 0.0 });
            }
            acc
        })
        .collect();
    let mut total = [Welford::default(); 3];
    for p in &parts {
        for (t, x) in total.iter_mut().zip(p) {
            t.merge(x);
        }
    }
    Ok(total.map(|w| w.estimate()))
}

/// Estimate of one metric. `gamma_th` is only read for outage.
pub fn mc_metric(
    cfg: &LinkConfig,
    which: MetricKind,
    gamma_th: f64,
    mc: &McConfig,
) -> Result<CiEstimate> {
    let all = mc_metrics(
        cfg,
        if which == MetricKind::Outage {
            gamma_th
        } else {
            0.0
        },
        mc,
    )?;
    Ok(all[which as usize])
}

/// Draw `n` raw aggregate powers (for distribution tests), deterministic in
/// `seed`.
pub fn draw_sums(cfg: &LinkConfig, mode: SampleMode, n: usize, seed: u64) -> Result<Vec<f64>> {
    let model = cfg.model()?;
    let sampler = SumSampler::new(&model, mode);
    let n_chunks = (n as u64).div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK.min(n as u64 - c * CHUNK);
            (0..len).map(|_| sampler.draw(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fading::FadingParams;
    use crate::metrics::avg_capacity;

    fn link(n: u32, m: f64, m_s: f64, eta: f64, g_bar: f64) -> LinkConfig {
        LinkConfig::with_eta(FadingParams::new(m, m_s, g_bar).unwrap(), n, eta, 1.0).unwrap()
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut seq = Welford::default();
        xs.iter().for_each(|x| seq.push(*x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..313].iter().for_each(|x| a.push(*x));
        xs[313..].iter().for_each(|x| b.push(*x));
        a.merge(&b);
        assert!((a.mean - seq.mean).abs() < 1e-12);
        assert!((a.m2 - seq.m2).abs() < 1e-9 * seq.m2);
    }

    #[test]
    fn rejects_small_sample_counts() {
        assert!(McConfig::new(9_999, 1, SampleMode::ModelDraw).is_err());
        assert!(McConfig::new(10_000, 1, SampleMode::ModelDraw).is_ok());
    }

    #[test]
    fn zero_threshold_never_outage() {
        let mc = McConfig::new(20_000, 5, SampleMode::ModelDraw).unwrap();
        let e = mc_metric(&link(1, 1.0, 5.0, 100.0, 1.0), MetricKind::Outage, 0.0, &mc).unwrap();
        assert_eq!((e.mean, e.std_error, e.n), (0.0, 0.0, 20_000));
    }

    #[test]
    fn capacity_covers_closed_form() {
        let c = link(1, 1.0, 5.0, 100.0, 1.0);
        let mc = McConfig::new(1_000_000, 42, SampleMode::ModelDraw).unwrap();
        let e = mc_metric(&c, MetricKind::Capacity, 0.0, &mc).unwrap();
        let exact = avg_capacity(&c).unwrap().value;
        assert!(
            (e.mean - exact).abs() <= 3.0 * e.std_error,
            "{} vs {exact} ± {}",
            e.mean,
            e.std_error
        );
    }

    #[test]
    fn single_cell_modes_agree_for_ber() {
        // with one cell the two draws share a law when ḡ = m_s/(m_s − 1)
        let c = link(1, 1.0, 5.0, 100.0, 1.25);
        let a = mc_metric(
            &c,
            MetricKind::Ber,
            0.0,
            &McConfig::new(200_000, 1, SampleMode::ModelDraw).unwrap(),
        )
        .unwrap();
        let b = mc_metric(
            &c,
            MetricKind::Ber,
            0.0,
            &McConfig::new(200_000, 2, SampleMode::PhysicalDraw).unwrap(),
        )
        .unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() <= 3.0 * se);
    }

    #[test]
    fn independent_of_thread_count() {
        let c = link(8, 1.0, 5.0, 10.0, 1.0);
        let mc = McConfig::new(300_000, 9, SampleMode::PhysicalDraw).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_metrics(&c, 2.0, &mc).unwrap())
        };
        let (a, b) = (run(1), run(4));
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean.to_bits(), y.mean.to_bits());
            assert_eq!(x.std_error.to_bits(), y.std_error.to_bits());
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(s.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    proptest::proptest! {
        #[test]
        fn welford_merge_is_split_invariant(xs in proptest::collection::vec(-1e3f64..1e3, 2..300), cut in 0usize..300) {
            let cut = cut.min(xs.len());
            let mut seq = Welford::default();
            xs.iter().for_each(|x| seq.push(*x));
            let (mut a, mut b) = (Welford::default(), Welford::default());
            xs[..cut].iter().for_each(|x| a.push(*x));
            xs[cut..].iter().for_each(|x| b.push(*x));
            a.merge(&b);
            proptest::prop_assert!((a.mean - seq.mean).abs() <= 1e-9 * (1.0 + seq.mean.abs()));
            proptest::prop_assert!((a.m2 - seq.m2).abs() <= 1e-9 * (1.0 + seq.m2));
        }
    }
}
