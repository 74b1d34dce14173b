//! Monte Carlo playback of the full two-period purchase.
//!
//! Each episode draws five uniforms in a fixed order: the standardized low
//! and high prices, the background factor, the first-mover coin and the
//! acceptance coin. Prices use inverse-cdf beta sampling so the sampler shares
//! its distribution functions with the analytic code.
//!
//! Episodes are grouped into blocks of [`BLOCK_SIZE`]. Block `b` uses
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, and block statistics are
//! merged in block order, so reports do not depend on the number of worker
//! threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::first_mover::FirstMoverKernel;
use crate::pricing::{beta_quantile, MarketModel, PriceRange, Seller};
use crate::strategy::{DecisionModel, StrategySpec, Verdict};

/// Episodes per random-number stream.
pub const BLOCK_SIZE: u64 = 8192;

/// Random inputs of one episode, before the buyer acts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeDraw {
    pub x_l: f64,
    pub x_h: f64,
    pub first_mover: Seller,
    /// Uniform on `[0, 1)`; the offer is accepted iff it falls below the
    /// strategy's acceptance probability.
    pub u_accept: f64,
}

impl EpisodeDraw {
    pub fn first_offer(&self) -> f64 {
        match self.first_mover {
            Seller::Low => self.x_l,
            Seller::High => self.x_h,
        }
    }

    pub fn second_offer(&self) -> f64 {
        match self.first_mover {
            Seller::Low => self.x_h,
            Seller::High => self.x_l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Episode {
    pub x_l: f64,
    pub x_h: f64,
    pub first_mover: Seller,
    pub first_offer: f64,
    pub decision: Verdict,
    pub paid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationReport {
    pub n: u64,
    pub mean_paid: f64,
    /// Unbiased sample standard deviation over `sqrt(n)`.
    pub std_err: f64,
    pub accept_rate: f64,
    pub seed: u64,
}

/// Draws `(X_L, X_H)` from three uniforms.
pub fn sample_prices<R: Rng + ?Sized>(model: &MarketModel, rng: &mut R) -> Result<(f64, f64)> {
    let u = [
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    ];
    prices_from_uniforms(model, u)
}

fn prices_from_uniforms(model: &MarketModel, u: [f64; 3]) -> Result<(f64, f64)> {
    let z_l = beta_quantile(u[0], &model.low)?;
    let z_h = beta_quantile(u[1], &model.high)?;
    let z = beta_quantile(u[2], &model.background)?;
    let range = &model.range;
    Ok((
        range.x_min() + z_l * z * range.rho(),
        range.x_min() + z_h * z * range.rho(),
    ))
}

/// `Low` with probability `p(x_l, x_h)`.
pub fn sample_first_mover<K: FirstMoverKernel + ?Sized, R: Rng + ?Sized>(
    x_l: f64,
    x_h: f64,
    kernel: &K,
    rng: &mut R,
) -> Result<Seller> {
    first_mover_from_uniform(x_l, x_h, kernel, rng.random::<f64>())
}

fn first_mover_from_uniform<K: FirstMoverKernel + ?Sized>(
    x_l: f64,
    x_h: f64,
    kernel: &K,
    u: f64,
) -> Result<Seller> {
    Ok(if u < kernel.prob(x_l, x_h)? {
        Seller::Low
    } else {
        Seller::High
    })
}

/// Draws one episode's prices, first mover and acceptance coin.
pub fn sample_episode<K: FirstMoverKernel + ?Sized, R: Rng + ?Sized>(
    market: &MarketModel,
    kernel: &K,
    rng: &mut R,
) -> Result<EpisodeDraw> {
    let (x_l, x_h) = sample_prices(market, rng)?;
    let first_mover = sample_first_mover(x_l, x_h, kernel, rng)?;
    let u_accept = rng.random::<f64>();
    Ok(EpisodeDraw {
        x_l,
        x_h,
        first_mover,
        u_accept,
    })
}

/// Plays `strategy` against the first offer. On rejection the buyer pays the
/// second-period price with no further choice.
pub fn run_episode(
    strategy: &StrategySpec,
    draw: &EpisodeDraw,
    guess: Option<f64>,
    range: &PriceRange,
) -> Result<Episode> {
    let first_offer = draw.first_offer();
    let accept = draw.u_accept < strategy.acceptance(first_offer, guess, range)?;
    let (decision, paid) = if accept {
        (Verdict::Accept, first_offer)
    } else {
        (Verdict::Reject, draw.second_offer())
    };
    Ok(Episode {
        x_l: draw.x_l,
        x_h: draw.x_h,
        first_mover: draw.first_mover,
        first_offer,
        decision,
        paid,
    })
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
    accepted: u64,
}

impl Accumulator {
    fn push(&mut self, paid: f64, accepted: bool) {
        self.n += 1;
        let delta = paid - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (paid - self.mean);
        self.accepted += u64::from(accepted);
    }

    fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
        self.accepted += other.accepted;
    }

    fn report(&self, seed: u64) -> SimulationReport {
        let variance = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        SimulationReport {
            n: self.n,
            mean_paid: self.mean,
            std_err: (variance / self.n as f64).sqrt(),
            accept_rate: self.accepted as f64 / self.n as f64,
            seed,
        }
    }
}

/// Mean price paid by one strategy over `n` simulated episodes.
pub fn estimate_expected_price<K: FirstMoverKernel>(
    strategy: &StrategySpec,
    model: &DecisionModel<K>,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let mut reports = compare_strategies(std::slice::from_ref(strategy), model, n, seed)?;
    Ok(reports.remove(0))
}

/// Runs every strategy on the same episode stream (common random numbers).
///
/// Strategies that use a guess are given the realized second-period price.
pub fn compare_strategies<K: FirstMoverKernel>(
    strategies: &[StrategySpec],
    model: &DecisionModel<K>,
    n: u64,
    seed: u64,
) -> Result<Vec<SimulationReport>> {
    if strategies.is_empty() {
        return Err(Error::InvalidParameter("no strategies to simulate".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "episode count must be at least 1".into(),
        ));
    }
    let range = model.market().range;
    for s in strategies {
        s.validate(&range)?;
    }
    let blocks = n.div_ceil(BLOCK_SIZE);
    let per_block = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
            let mut acc = vec![Accumulator::default(); strategies.len()];
            for _ in 0..len {
                let draw = sample_episode(model.market(), model.first_mover(), &mut rng)?;
                let guess = Some(draw.second_offer());
                for (s, a) in strategies.iter().zip(acc.iter_mut()) {
                    let e = run_episode(s, &draw, guess, &range)?;
                    a.push(e.paid, e.decision == Verdict::Accept);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![Accumulator::default(); strategies.len()];
    for block in &per_block {
        for (t, a) in total.iter_mut().zip(block) {
            t.merge(a);
        }
    }
    Ok(total.iter().map(|a| a.report(seed)).collect())
}
