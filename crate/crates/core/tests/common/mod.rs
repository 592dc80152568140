#![allow(dead_code)]

use causal_work::instrument::{random_instrument, Instrument, Party, SampleKind};
use causal_work::operator::Operator;
use causal_work::process::{random_valid, ProcessMatrix};
use causal_work::random::ginibre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G + G†` for a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dims: &[usize]) -> Operator {
    let d = dims.iter().product();
    let g = ginibre(rng, d, d);
    Operator::new(&g + g.adjoint(), dims.to_vec()).unwrap()
}

/// Random valid process with one instrument per party, drawn from `kinds`.
pub fn random_game(seed: u64, kinds: &[SampleKind]) -> (ProcessMatrix, Instrument, Instrument) {
    let mut r = rng(seed);
    let w = random_valid(&mut r);
    let ka = kinds[r.random_range(0..kinds.len())];
    let kb = kinds[r.random_range(0..kinds.len())];
    let a = random_instrument(Party::A, r.random(), ka);
    let b = random_instrument(Party::B, r.random(), kb);
    (w, a, b)
}
