//! Entropies of the final state, in bits.
//!
//! With the optimal rotations the 16 product states in the mixture are
//! orthonormal, so the spectrum of ρ is exactly `{λ_{abxy}}` and
//! `S(ρ) = H(x,y) + H(a,b) − I(x,y : a,b)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{indices, GameStats};
use crate::operator::Operator;
use crate::{EIG_CUTOFF, TOL};

/// Red pair: Alice's square and Bob's circle.
pub const RED: [usize; 2] = [0, 1];
/// Blue pair: Alice's circle and Bob's square.
pub const BLUE: [usize; 2] = [2, 3];

/// `−Σ p log₂ p` over entries above the cutoff.
pub fn shannon(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter().filter(|&v| v > EIG_CUTOFF).map(|v| -v * v.log2()).sum()
}

pub fn von_neumann_entropy(rho: &Operator) -> Result<f64> {
    let vals = rho.eigenvalues()?;
    let min = *vals.last().expect("non-empty operator");
    if min < -TOL {
        return Err(Error::NegativeEigenvalue(min));
    }
    Ok(shannon(vals))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoReport {
    pub s_red: f64,
    pub s_blue: f64,
    pub s_red_blue: f64,
    pub h_ab: f64,
    pub i_io: f64,
    pub i_red_blue: f64,
    /// `2 + I_IO − H_AB`, an upper bound on `I_red_blue`
    pub bound_value: f64,
    /// Shannon entropy of the inputs; 2 for uniform inputs
    pub h_xy: f64,
    /// `|S_red_blue − (H_xy + H_AB − I_IO)|`
    pub identity_deviation: f64,
}

/// `p′(a,b) = Σ_{x,y} λ_{abxy}`
fn output_marginal(stats: &GameStats) -> [f64; 4] {
    let mut m = [0.0; 4];
    for (a, b, x, y) in indices() {
        m[a * 2 + b] += stats.lambda(a, b, x, y);
    }
    m
}

fn input_marginal(stats: &GameStats) -> [f64; 4] {
    let mut m = [0.0; 4];
    for (a, b, x, y) in indices() {
        m[x * 2 + y] += stats.lambda(a, b, x, y);
    }
    m
}

/// `H(a,b)` of the output marginal.
pub fn output_entropy(stats: &GameStats) -> f64 {
    shannon(output_marginal(stats))
}

/// Classical mutual information between `(x,y)` and `(a,b)` under `λ`.
pub fn io_mutual_information(stats: &GameStats) -> f64 {
    let joint = indices().map(|(a, b, x, y)| stats.lambda(a, b, x, y));
    shannon(input_marginal(stats)) + shannon(output_marginal(stats)) - shannon(joint)
}

/// Largest difference between sorted eigenvalues of ρ and sorted `λ`.
pub fn spectrum_deviation(stats: &GameStats, rho: &Operator) -> Result<f64> {
    let mut vals = rho.eigenvalues()?;
    let mut lam: Vec<f64> = indices().map(|(a, b, x, y)| stats.lambda(a, b, x, y)).collect();
    if vals.len() != lam.len() {
        return Err(Error::WrongDims {
            expected: vec![2, 2, 2, 2],
            got: rho.dims().to_vec(),
        });
    }
    vals.sort_by(f64::total_cmp);
    lam.sort_by(f64::total_cmp);
    Ok(vals.iter().zip(&lam).map(|(v, l)| (v - l).abs()).fold(0.0, f64::max))
}

pub fn info_report(stats: &GameStats, rho: &Operator) -> Result<InfoReport> {
    let dev = spectrum_deviation(stats, rho)?;
    if dev > TOL {
        return Err(Error::SpectrumMismatch(dev));
    }
    let s_red = von_neumann_entropy(&rho.partial_trace(&RED)?)?;
    let s_blue = von_neumann_entropy(&rho.partial_trace(&BLUE)?)?;
    let s_red_blue = von_neumann_entropy(rho)?;
    let h_ab = output_entropy(stats);
    let i_io = io_mutual_information(stats);
    let h_xy = shannon(input_marginal(stats));
    Ok(InfoReport {
        s_red,
        s_blue,
        s_red_blue,
        h_ab,
        i_io,
        i_red_blue: s_red + s_blue - s_red_blue,
        bound_value: 2.0 + i_io - h_ab,
        h_xy,
        identity_deviation: (s_red_blue - (h_xy + h_ab - i_io)).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyIdentity {
    /// `|S(ρ) − (2 + H_AB − I_IO)|`
    pub deviation: f64,
    /// spectrum of ρ against `λ`
    pub spectrum_deviation: f64,
}

pub fn entropy_identity_check(stats: &GameStats, rho: &Operator) -> Result<EntropyIdentity> {
    let s = von_neumann_entropy(rho)?;
    Ok(EntropyIdentity {
        deviation: (s - (2.0 + output_entropy(stats) - io_mutual_information(stats))).abs(),
        spectrum_deviation: spectrum_deviation(stats, rho)?,
    })
}

/// Direction of each quantity along a sequence of reports taken at
/// increasing α.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Trend {
    pub h_ab_increasing: bool,
    pub h_minus_i_io_decreasing: bool,
    pub i_red_blue_increasing: bool,
}

pub fn trend(reports: &[InfoReport]) -> Trend {
    let strictly = |f: &dyn Fn(&InfoReport) -> f64, up: bool| {
        reports.windows(2).all(|w| {
            let d = f(&w[1]) - f(&w[0]);
            if up {
                d > 0.0
            } else {
                d < 0.0
            }
        })
    };
    Trend {
        h_ab_increasing: strictly(&|r| r.h_ab, true),
        h_minus_i_io_decreasing: strictly(&|r| r.h_ab - r.i_io, false),
        i_red_blue_increasing: strictly(&|r| r.i_red_blue, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::InputDistribution;
    use crate::operator::qubit;
    use crate::thermo::{final_state, ConditionalUnitaries};

    #[test]
    fn basic_entropies() {
        assert!(von_neumann_entropy(&qubit::singlet()).unwrap().abs() < 1e-12);
        let mixed = Operator::identity(&[2, 2]).scale(0.25);
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);
        let bad = qubit::proj(0).scale(1.2) - qubit::proj(1).scale(0.2);
        assert!(matches!(von_neumann_entropy(&bad), Err(Error::NegativeEigenvalue(_))));
    }

    #[test]
    fn uniform_table_is_uncorrelated() {
        let stats = GameStats::from_table([[[[0.25; 2]; 2]; 2]; 2], InputDistribution::uniform()).unwrap();
        let rho = final_state(&stats, &ConditionalUnitaries::optimal()).unwrap();
        let r = info_report(&stats, &rho).unwrap();
        assert!(r.i_io.abs() < 1e-12);
        assert!((r.h_ab - 2.0).abs() < 1e-12);
        assert!((r.s_red_blue - 4.0).abs() < 1e-12);
        assert!(r.i_red_blue.abs() < 1e-12);
    }

    #[test]
    fn wrong_rotations_detected() {
        let mut u = ConditionalUnitaries::optimal();
        u.bob = [qubit::id(), qubit::id()];
        u.alice = [qubit::id(), qubit::id()];
        let mut t2 = [[[[0.25; 2]; 2]; 2]; 2];
        t2[0][0][0][0] = 0.5;
        t2[1][1][0][0] = 0.0;
        let stats2 = GameStats::from_table(t2, InputDistribution::uniform()).unwrap();
        let rho2 = final_state(&stats2, &u).unwrap();
        assert!(matches!(info_report(&stats2, &rho2), Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn trend_detects_direction() {
        let mk = |h: f64, i: f64, irb: f64| InfoReport {
            s_red: 0.0,
            s_blue: 0.0,
            s_red_blue: 0.0,
            h_ab: h,
            i_io: i,
            i_red_blue: irb,
            bound_value: 0.0,
            h_xy: 2.0,
            identity_deviation: 0.0,
        };
        let t = trend(&[mk(1.0, 0.5, 0.1), mk(1.1, 0.7, 0.2)]);
        assert!(t.h_ab_increasing && t.h_minus_i_io_decreasing && t.i_red_blue_increasing);
        let t = trend(&[mk(1.0, 0.5, 0.3), mk(1.1, 0.5, 0.2)]);
        assert!(!t.h_minus_i_io_decreasing && !t.i_red_blue_increasing);
    }
}
