//! Pauli-sector form of the game gap.
//!
//! A valid `W` splits into its non-signalling part plus two signalling
//! sectors:
//!
//! * A→B: `c_{αij} σ_α ⊗ σ_i ⊗ σ_j ⊗ I` with `α ∈ {I,X,Y,Z}`, `i, j ∈ {X,Y,Z}`;
//! * B→A: `c′_{iαj} σ_i ⊗ I ⊗ σ_α ⊗ σ_j` with `i, j ∈ {X,Y,Z}`, `α ∈ {I,X,Y,Z}`.
//!
//! Under uniform inputs the gap is `(c·m + c′·m′)/4` with
//! `m_{αij} = Tr[(M^A_0 − M^A_1) σ_α σ_i] · Tr[(M^B_{0|1} − M^B_{1|0}) σ_j I]` and
//! `m′_{iαj} = Tr[(M^A_{0|1} − M^A_{1|0}) σ_i I] · Tr[(M^B_0 − M^B_1) σ_α σ_j]`,
//! where `M_x = Σ_a M_{a|x}`. The non-signalling part never contributes.

use serde::Serialize;

use crate::error::Result;
use crate::game::{game_stats, InputDistribution};
use crate::instrument::Instrument;
use crate::operator::Operator;
use crate::pauli::{pauli_decompose, Pauli, PauliDecomposition, PauliString};
use crate::process::ProcessMatrix;
use crate::TOL;

/// Indexed `[α][i][j]` for sector A and `[i][α][j]` for sector B, with α
/// running over I,X,Y,Z and Latin indices over X,Y,Z.
pub type SectorA = [[[f64; 3]; 3]; 4];
pub type SectorB = [[[f64; 3]; 4]; 3];

#[derive(Clone, Debug, Serialize)]
pub struct AppendixTerms {
    pub c: SectorA,
    pub c_prime: SectorB,
    pub m: SectorA,
    pub m_prime: SectorB,
    pub m_norm: f64,
    pub m_prime_norm: f64,
    pub direct_gap: f64,
    pub reconstructed_gap: f64,
    /// largest Pauli coefficient of W outside the non-signalling part and
    /// the two sectors
    pub residual: f64,
    /// `false` when `residual` exceeds tolerance; the gap identity need not
    /// hold then
    pub complete: bool,
}

impl AppendixTerms {
    pub fn identity_deviation(&self) -> f64 {
        (self.direct_gap - self.reconstructed_gap).abs()
    }
}

fn letters(s: [Pauli; 4]) -> PauliString {
    PauliString::new(s.to_vec())
}

fn sector_a_string(alpha: Pauli, i: Pauli, j: Pauli) -> PauliString {
    letters([alpha, i, j, Pauli::I])
}

fn sector_b_string(i: Pauli, alpha: Pauli, j: Pauli) -> PauliString {
    letters([i, Pauli::I, alpha, j])
}

fn is_nonsignalling(s: &PauliString) -> bool {
    s.letters()[1] == Pauli::I && s.letters()[3] == Pauli::I
}

fn is_sector_a(s: &PauliString) -> bool {
    let l = s.letters();
    l[1] != Pauli::I && l[2] != Pauli::I && l[3] == Pauli::I
}

fn is_sector_b(s: &PauliString) -> bool {
    let l = s.letters();
    l[0] != Pauli::I && l[1] == Pauli::I && l[3] != Pauli::I
}

fn two_qubit_trace(op: &Operator, p: Pauli, q: Pauli) -> f64 {
    PauliString::new(vec![p, q]).trace_with(op).re
}

/// `Tr[(M_0 − M_1) σ_α σ_i]` for α ∈ {I,X,Y,Z}, i ∈ {X,Y,Z}.
pub fn channel_difference(inst: &Instrument) -> [[f64; 3]; 4] {
    let diff = &inst.channel(0) - &inst.channel(1);
    let mut out = [[0.0; 3]; 4];
    for (ai, &alpha) in Pauli::ALL.iter().enumerate() {
        for (ii, &i) in Pauli::XYZ.iter().enumerate() {
            out[ai][ii] = two_qubit_trace(&diff, alpha, i);
        }
    }
    out
}

/// `Tr[(M_{0|1} − M_{1|0}) σ_i I]` for i ∈ {X,Y,Z}.
pub fn cross_difference(inst: &Instrument) -> [f64; 3] {
    let diff = inst.op(0, 1) - inst.op(1, 0);
    Pauli::XYZ.map(|i| two_qubit_trace(&diff, i, Pauli::I))
}

/// `Σ_{α,i} |Tr[(M_0 − M_1) σ_α σ_i]|²`
pub fn channel_difference_weight(inst: &Instrument) -> f64 {
    channel_difference(inst).iter().flatten().map(|v| v * v).sum()
}

/// `Σ_i |Tr[(M_{0|1} − M_{1|0}) σ_i I]|²`
pub fn cross_difference_weight(inst: &Instrument) -> f64 {
    cross_difference(inst).iter().map(|v| v * v).sum()
}

fn norm<'a>(vals: impl Iterator<Item = &'a f64>) -> f64 {
    vals.map(|v| v * v).sum::<f64>().sqrt()
}

pub fn appendix_terms(w: &ProcessMatrix, alice: &Instrument, bob: &Instrument) -> Result<AppendixTerms> {
    let dec = pauli_decompose(w.operator())?;
    terms_from_decomposition(&dec, w, alice, bob)
}

fn terms_from_decomposition(
    dec: &PauliDecomposition,
    w: &ProcessMatrix,
    alice: &Instrument,
    bob: &Instrument,
) -> Result<AppendixTerms> {
    let mut c = [[[0.0; 3]; 3]; 4];
    let mut c_prime = [[[0.0; 3]; 4]; 3];
    for (ai, &alpha) in Pauli::ALL.iter().enumerate() {
        for (ii, &i) in Pauli::XYZ.iter().enumerate() {
            for (ji, &j) in Pauli::XYZ.iter().enumerate() {
                c[ai][ii][ji] = dec.coefficient(&sector_a_string(alpha, i, j));
                c_prime[ii][ai][ji] = dec.coefficient(&sector_b_string(i, alpha, j));
            }
        }
    }
    let residual = dec
        .iter()
        .filter(|(s, _)| !(is_nonsignalling(s) || is_sector_a(s) || is_sector_b(s)))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);

    let a_chan = channel_difference(alice);
    let b_cross = cross_difference(bob);
    let a_cross = cross_difference(alice);
    let b_chan = channel_difference(bob);
    let mut m = [[[0.0; 3]; 3]; 4];
    let mut m_prime = [[[0.0; 3]; 4]; 3];
    let mut dot = 0.0;
    for ai in 0..4 {
        for ii in 0..3 {
            for ji in 0..3 {
                m[ai][ii][ji] = a_chan[ai][ii] * b_cross[ji];
                m_prime[ii][ai][ji] = a_cross[ii] * b_chan[ai][ji];
                dot += c[ai][ii][ji] * m[ai][ii][ji] + c_prime[ii][ai][ji] * m_prime[ii][ai][ji];
            }
        }
    }
    let stats = game_stats(w, alice, bob, InputDistribution::uniform())?;
    Ok(AppendixTerms {
        m_norm: norm(m.iter().flatten().flatten()),
        m_prime_norm: norm(m_prime.iter().flatten().flatten()),
        c,
        c_prime,
        m,
        m_prime,
        direct_gap: stats.gap(),
        reconstructed_gap: dot / 4.0,
        residual,
        complete: residual <= TOL,
    })
}
