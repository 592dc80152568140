//! Work extraction from the four-qubit state left behind by the game.
//!
//! Every qubit carries `H_q = ε(σ_x + 1)/2`: ground state `|−⟩` at 0,
//! excited `|+⟩` at ε. After the squares are measured (giving the inputs
//! `x`, `y`), each circle sits in the computational state opposite to the
//! other party's input, and each party rotates its circle conditioned on
//! its guess.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{indices, GameStats};
use crate::operator::{kron_all, qubit, Operator};
use crate::TOL;

/// Subsystems of the physical state.
pub const ALICE_SQUARE: usize = 0;
pub const BOB_CIRCLE: usize = 1;
pub const ALICE_CIRCLE: usize = 2;
pub const BOB_SQUARE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitHamiltonian {
    pub eps: f64,
}

impl QubitHamiltonian {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::OutOfRange {
                name: "eps",
                value: eps,
                min: f64::MIN_POSITIVE,
                max: f64::MAX,
            });
        }
        Ok(Self { eps })
    }

    /// `ε(σ_x + 1)/2`
    pub fn single(&self) -> Operator {
        (&qubit::sigma_x() + &qubit::id()).scale(self.eps / 2.0)
    }

    /// Sum of single-qubit terms over all four qubits.
    pub fn free(&self) -> Operator {
        local_sum(&self.single(), 4)
    }

    /// Free Hamiltonian of the two circle qubits (Bob's, then Alice's).
    pub fn circles(&self) -> Operator {
        local_sum(&self.single(), 2)
    }

    /// `−ε |+⟩⟨+| ⊗ |+⟩⟨+|` between the circles.
    pub fn interaction(&self) -> Operator {
        let plus = Operator::projector(&qubit::ket_plus());
        plus.kron(&plus).scale(-self.eps)
    }

    pub fn circles_interacting(&self) -> Operator {
        &self.circles() + &self.interaction()
    }
}

fn local_sum(h: &Operator, n: usize) -> Operator {
    let id = qubit::id();
    (0..n)
        .map(|k| {
            let factors: Vec<&Operator> = (0..n).map(|j| if j == k { h } else { &id }).collect();
            kron_all(factors)
        })
        .reduce(|a, b| &a + &b)
        .expect("at least one qubit")
}

/// Conditional rotations: party applies `alice[a]` / `bob[b]` to its circle
/// after producing output `a` / `b`.
#[derive(Clone, Debug)]
pub struct ConditionalUnitaries {
    pub alice: [Operator; 2],
    pub bob: [Operator; 2],
}

impl ConditionalUnitaries {
    /// `U_0 = |+⟩⟨0| + |−⟩⟨1|`, `U_1 = |−⟩⟨0| + |+⟩⟨1|`, so `U_g|ḡ⟩ = |−⟩`:
    /// a correct guess leaves the circle in its ground state.
    pub fn optimal() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = |v: f64| num_complex::Complex64::new(v * h, 0.0);
        let u0 = Operator::qubit([c(1.0), c(1.0), c(1.0), c(-1.0)]);
        let u1 = Operator::qubit([c(1.0), c(1.0), c(-1.0), c(1.0)]);
        Self {
            alice: [u0.clone(), u1.clone()],
            bob: [u0, u1],
        }
    }

    pub fn check(&self) -> Result<()> {
        for u in self.alice.iter().chain(&self.bob) {
            if u.dims() != [2] {
                return Err(Error::WrongDims {
                    expected: vec![2],
                    got: u.dims().to_vec(),
                });
            }
            let dev = u.unitarity_deviation();
            if dev > TOL {
                return Err(Error::NotUnitary(dev));
            }
        }
        Ok(())
    }
}

/// `ρ = Σ λ_{abxy} |x⟩⟨x| ⊗ U_b|x̄⟩⟨x̄|U_b† ⊗ U_a|ȳ⟩⟨ȳ|U_a† ⊗ |y⟩⟨y|`
pub fn final_state(stats: &GameStats, u: &ConditionalUnitaries) -> Result<Operator> {
    u.check()?;
    let mut rho = Operator::zeros(&[2, 2, 2, 2]);
    for (a, b, x, y) in indices() {
        let lam = stats.lambda(a, b, x, y);
        if lam == 0.0 {
            continue;
        }
        let bob_circle = qubit::proj(1 - x).conjugate_by(&u.bob[b])?;
        let alice_circle = qubit::proj(1 - y).conjugate_by(&u.alice[a])?;
        let term = kron_all([&qubit::proj(x), &bob_circle, &alice_circle, &qubit::proj(y)]);
        rho = &rho + &term.scale(lam);
    }
    Ok(rho)
}

pub fn average_energy(rho: &Operator, h: &Operator) -> f64 {
    rho.trace_product(h).re
}

/// `|Tr[ρ H] − (2ε − (p_succ − p₂)ε)|` for the optimal rotations.
pub fn energy_identity_check(stats: &GameStats, ham: &QubitHamiltonian) -> Result<f64> {
    let rho = final_state(stats, &ConditionalUnitaries::optimal())?;
    let want = 2.0 * ham.eps - stats.gap() * ham.eps;
    Ok((average_energy(&rho, &ham.free()) - want).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    pub probability: f64,
}

/// Discrete energy distribution with strictly increasing levels.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EnergyPmf(pub Vec<Level>);

impl EnergyPmf {
    /// Merge levels closer than `1e-9 ε` and sort ascending.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>, eps: f64) -> Self {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<Level> = Vec::new();
        for (energy, probability) in pairs {
            match levels.last_mut() {
                Some(last) if (energy - last.energy).abs() <= 1e-9 * eps => last.probability += probability,
                _ => levels.push(Level { energy, probability }),
            }
        }
        Self(levels)
    }

    pub fn levels(&self) -> &[Level] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().map(|l| l.probability).sum()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().map(|l| l.energy * l.probability).sum()
    }

    /// Probability at the level within `1e-9 ε` of `energy`, zero if absent.
    pub fn weight_at(&self, energy: f64, eps: f64) -> f64 {
        self.0
            .iter()
            .find(|l| (l.energy - energy).abs() <= 1e-9 * eps)
            .map_or(0.0, |l| l.probability)
    }

    /// Largest weight difference over the union of both level sets.
    pub fn max_deviation(&self, other: &EnergyPmf, eps: f64) -> f64 {
        self.0
            .iter()
            .chain(other.0.iter())
            .map(|l| (self.weight_at(l.energy, eps) - other.weight_at(l.energy, eps)).abs())
            .fold(0.0, f64::max)
    }
}

/// `{0: p_succ, ε: p₁, 2ε: p₂}`
pub fn circle_energy_pmf(stats: &GameStats, eps: f64) -> EnergyPmf {
    EnergyPmf::from_pairs([(0.0, stats.p_succ), (eps, stats.p1), (2.0 * eps, stats.p2)], eps)
}

/// Energy distribution of the circle pair measured in the eigenbasis of
/// `h_circles` (dims `[2, 2]`, Bob's circle first).
pub fn spectral_circle_pmf(rho: &Operator, h_circles: &Operator, eps: f64) -> Result<EnergyPmf> {
    let marginal = rho.partial_trace(&[BOB_CIRCLE, ALICE_CIRCLE])?;
    let eig = h_circles.eig_hermitian()?;
    let pairs: Vec<(f64, f64)> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let v = eig.vectors.column(k);
            let p = (v.adjoint() * marginal.matrix() * v)[(0, 0)].re;
            (e, p)
        })
        .collect();
    Ok(EnergyPmf::from_pairs(pairs, eps))
}

#[derive(Clone, Debug, Serialize)]
pub struct InteractingWork {
    pub pmf: EnergyPmf,
    pub work: f64,
    /// `⟨w⟩ > ε/4`, out of reach for any definite causal order
    pub beats_causal_bound: bool,
}

/// With the circle coupling on, both-excited costs only ε, so the circle
/// energy is 0 with probability `p_succ` and ε otherwise, and
/// `⟨w⟩ = (p_succ − 1/4)ε`.
pub fn interacting_work(p_succ: f64, eps: f64) -> Result<InteractingWork> {
    if !(-TOL..=1.0 + TOL).contains(&p_succ) {
        return Err(Error::OutOfRange {
            name: "p_succ",
            value: p_succ,
            min: 0.0,
            max: 1.0,
        });
    }
    let work = (p_succ - 0.25) * eps;
    Ok(InteractingWork {
        pmf: EnergyPmf::from_pairs([(0.0, p_succ), (eps, 1.0 - p_succ)], eps),
        work,
        beats_causal_bound: work > 0.25 * eps + TOL * eps,
    })
}

#[derive(Clone, Debug)]
pub struct Passive {
    pub state: Operator,
    pub ergotropy: f64,
}

/// Passive state of `rho0` for `h`: populations sorted descending placed on
/// energies sorted ascending. Degenerate populations keep the eigensolver
/// order, so the representative may vary across platforms while the
/// ergotropy does not.
pub fn passive_state(rho0: &Operator, h: &Operator) -> Result<Passive> {
    if rho0.dims() != h.dims() {
        return Err(Error::IncompatibleDims(rho0.dims().to_vec(), h.dims().to_vec()));
    }
    let r = rho0.eig_hermitian()?.values;
    let mut he = h.eig_hermitian()?;
    he.values.reverse();
    let n = he.vectors.ncols();
    let vectors = crate::operator::Matrix::from_fn(n, n, |i, j| he.vectors[(i, n - 1 - j)]);
    let passive = crate::operator::Eigen {
        values: r.clone(),
        vectors,
    }
    .reconstruct(rho0.dims());
    let passive_energy: f64 = r.iter().zip(&he.values).map(|(p, e)| p * e).sum();
    Ok(Passive {
        state: passive,
        ergotropy: average_energy(rho0, h) - passive_energy,
    })
}

pub fn ergotropy(rho0: &Operator, h: &Operator) -> Result<f64> {
    Ok(passive_state(rho0, h)?.ergotropy)
}

/// Average ergotropy of B after a projective measurement on A, each outcome
/// weighted by its probability; zero-probability outcomes are skipped.
pub fn daemonic_ergotropy(rho_ab: &Operator, h_b: &Operator, projectors: &[Operator]) -> Result<f64> {
    if rho_ab.num_subsystems() != 2 {
        return Err(Error::InvalidMeasurement(format!(
            "state must be bipartite, got dims {:?}",
            rho_ab.dims()
        )));
    }
    let d_a = rho_ab.dims()[0];
    check_projective(projectors, d_a)?;
    let id_b = Operator::identity(&[rho_ab.dims()[1]]);
    let mut total = 0.0;
    for p in projectors {
        let lifted = p.kron(&id_b);
        let branch = lifted.compose(rho_ab)?.compose(&lifted)?.partial_trace(&[1])?;
        let prob = branch.trace().re;
        if prob <= crate::EIG_CUTOFF {
            continue;
        }
        total += prob * ergotropy(&branch.scale(1.0 / prob), h_b)?;
    }
    Ok(total)
}

fn check_projective(projectors: &[Operator], d: usize) -> Result<()> {
    if projectors.len() != d {
        return Err(Error::InvalidMeasurement(format!(
            "expected {d} rank-one projectors, got {}",
            projectors.len()
        )));
    }
    let mut sum = Operator::zeros(&[d]);
    for (k, p) in projectors.iter().enumerate() {
        if p.dims() != [d] {
            return Err(Error::InvalidMeasurement(format!(
                "projector {k} has dims {:?}",
                p.dims()
            )));
        }
        let sq = p.compose(p)?;
        if sq.max_abs_diff(p) > TOL || p.hermiticity_deviation() > TOL || (p.trace().re - 1.0).abs() > TOL {
            return Err(Error::InvalidMeasurement(format!(
                "operator {k} is not a rank-one projector"
            )));
        }
        sum = &sum + p;
    }
    if sum.max_abs_diff(&Operator::identity(&[d])) > TOL {
        return Err(Error::InvalidMeasurement(
            "projectors do not sum to the identity".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ThermoReport {
    pub eps: f64,
    #[serde(skip)]
    pub rho: Operator,
    pub average_energy: f64,
    pub circle_energy: f64,
    pub work: f64,
    pub circle_pmf: EnergyPmf,
    /// largest weight difference between `circle_pmf` and the spectral
    /// distribution of ρ's circle marginal
    pub spectral_deviation: f64,
    /// `|⟨E⟩ − (2ε − (p_succ − p₂)ε)|`
    pub identity_deviation: f64,
    pub interacting: InteractingWork,
}

pub fn thermo_report(stats: &GameStats, ham: &QubitHamiltonian) -> Result<ThermoReport> {
    let eps = ham.eps;
    let rho = final_state(stats, &ConditionalUnitaries::optimal())?;
    let average = average_energy(&rho, &ham.free());
    let circle_pmf = circle_energy_pmf(stats, eps);
    let spectral = spectral_circle_pmf(&rho, &ham.circles(), eps)?;
    Ok(ThermoReport {
        eps,
        average_energy: average,
        circle_energy: circle_pmf.mean(),
        work: 2.0 * eps - average,
        spectral_deviation: circle_pmf.max_deviation(&spectral, eps),
        identity_deviation: (average - (2.0 * eps - stats.gap() * eps)).abs(),
        circle_pmf,
        interacting: interacting_work(stats.p_succ, eps)?,
        rho,
    })
}
