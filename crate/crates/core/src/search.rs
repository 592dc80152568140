//! Randomized search for instrument pairs with a large gap `p_succ − p₂`.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! result does not depend on thread count or scheduling. Sample kinds cycle
//! through every [`SampleKind`] for both parties. Ties on the gap resolve
//! to the lowest sample index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::game::{BornKernel, GameStats, InputDistribution};
use crate::instrument::{InstrumentParams, Party, SampleKind};
use crate::pauli::{pauli_decompose, PauliDecomposition};
use crate::process::ProcessMatrix;
use crate::TOL;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RefineConfig {
    pub steps: usize,
    /// initial Gaussian step; decays linearly to a tenth of itself
    pub scale: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self { steps: 400, scale: 0.3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Refinement {
    pub gap: f64,
    pub accepted: usize,
    pub alice: InstrumentParams,
    pub bob: InstrumentParams,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSearchResult {
    pub best_gap: f64,
    pub best_index: usize,
    pub alice: InstrumentParams,
    pub bob: InstrumentParams,
    pub samples: usize,
    pub seed: u64,
    pub process: PauliDecomposition,
    pub refinement: Option<Refinement>,
    /// best gap (refined if available) above `1/2 + TOL`
    pub exceeds_bound: bool,
}

impl BoundSearchResult {
    pub fn max_gap(&self) -> f64 {
        self.refinement
            .as_ref()
            .map_or(self.best_gap, |r| r.gap.max(self.best_gap))
    }
}

pub fn sample_kinds(index: usize) -> (SampleKind, SampleKind) {
    let n = SampleKind::ALL.len();
    (SampleKind::ALL[index % n], SampleKind::ALL[(index / n) % n])
}

/// Parameters of sample `index` under `seed`.
pub fn sample_pair(seed: u64, index: usize) -> (InstrumentParams, InstrumentParams) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let (ka, kb) = sample_kinds(index);
    let a = InstrumentParams::sample(&mut rng, ka);
    let b = InstrumentParams::sample(&mut rng, kb);
    (a, b)
}

fn gap_of(kernel: &BornKernel, a: &InstrumentParams, b: &InstrumentParams) -> Result<f64> {
    let table = kernel.table(&a.build(Party::A), &b.build(Party::B));
    Ok(GameStats::from_table(table, InputDistribution::uniform())?.gap())
}

/// Larger gap wins; equal gaps keep the lower index.
fn better(lhs: (usize, f64), rhs: (usize, f64)) -> (usize, f64) {
    if rhs.1 > lhs.1 || (rhs.1 == lhs.1 && rhs.0 < lhs.0) {
        rhs
    } else {
        lhs
    }
}

/// One shared stream of instrument pairs evaluated against every process.
pub fn bound_search_many(ws: &[ProcessMatrix], samples: usize, seed: u64) -> Result<Vec<BoundSearchResult>> {
    let kernels: Vec<BornKernel> = ws.iter().map(|w| BornKernel::new(w.operator())).collect();
    let per_sample: Vec<Result<Vec<f64>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (pa, pb) = sample_pair(seed, i);
            let (ia, ib) = (pa.build(Party::A), pb.build(Party::B));
            kernels
                .iter()
                .map(|k| Ok(GameStats::from_table(k.table(&ia, &ib), InputDistribution::uniform())?.gap()))
                .collect()
        })
        .collect();
    let mut best = vec![(0usize, f64::NEG_INFINITY); ws.len()];
    for (i, gaps) in per_sample.into_iter().enumerate() {
        for (slot, g) in best.iter_mut().zip(gaps?) {
            *slot = better(*slot, (i, g));
        }
    }
    ws.iter()
        .zip(best)
        .map(|(w, (index, gap))| {
            let (alice, bob) = sample_pair(seed, index);
            Ok(BoundSearchResult {
                best_gap: gap,
                best_index: index,
                alice,
                bob,
                samples,
                seed,
                process: pauli_decompose(w.operator())?,
                refinement: None,
                exceeds_bound: gap > 0.5 + TOL,
            })
        })
        .collect()
}

pub fn bound_search(
    w: &ProcessMatrix,
    samples: usize,
    seed: u64,
    refine: Option<RefineConfig>,
) -> Result<BoundSearchResult> {
    let mut result = bound_search_many(std::slice::from_ref(w), samples.max(1), seed)?
        .pop()
        .expect("one process in, one result out");
    result.samples = samples;
    if let Some(cfg) = refine {
        let r = hill_climb(w, &result.alice, &result.bob, seed, samples as u64, cfg)?;
        result.exceeds_bound = result.exceeds_bound || r.gap > 0.5 + TOL;
        result.refinement = Some(r);
    }
    Ok(result)
}

/// Alternating Gaussian moves on Alice's and Bob's parameters, accepting
/// strict improvements only. Uses RNG stream `stream`, disjoint from the
/// sampling streams.
pub fn hill_climb(
    w: &ProcessMatrix,
    alice: &InstrumentParams,
    bob: &InstrumentParams,
    seed: u64,
    stream: u64,
    cfg: RefineConfig,
) -> Result<Refinement> {
    let kernel = BornKernel::new(w.operator());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let (mut a, mut b) = (alice.clone(), bob.clone());
    let mut gap = gap_of(&kernel, &a, &b)?;
    let mut accepted = 0;
    for step in 0..cfg.steps {
        let frac = step as f64 / cfg.steps.max(1) as f64;
        let scale = cfg.scale * (1.0 - 0.9 * frac);
        let (na, nb) = if step % 2 == 0 {
            (a.perturb(&mut rng, scale), b.clone())
        } else {
            (a.clone(), b.perturb(&mut rng, scale))
        };
        let g = gap_of(&kernel, &na, &nb)?;
        if g > gap {
            gap = g;
            a = na;
            b = nb;
            accepted += 1;
        }
    }
    Ok(Refinement {
        gap,
        accepted,
        alice: a,
        bob: b,
    })
}
