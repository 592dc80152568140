//! Local operations of one party as Choi–Jamiołkowski operators.
//!
//! `M_{a|x}` lives on `(input wire, output wire)` and equals
//! `[(I ⊗ 𝓜_{a|x})(|φ⁺⟩⟨φ⁺|)]^T` with the unnormalized `|φ⁺⟩ = |00⟩ + |11⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{kron_all, qubit, Matrix, Operator};
use crate::pauli::{operator_from_terms, Pauli, PauliString};
use crate::random;
use crate::TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// The four CJ operators of one party, indexed `ops[a][x]`.
#[derive(Clone, Debug)]
pub struct Instrument {
    party: Party,
    ops: [[Operator; 2]; 2],
}

impl Instrument {
    pub fn new(party: Party, ops: [[Operator; 2]; 2]) -> Result<Self> {
        for op in ops.iter().flatten() {
            if op.dims() != [2, 2] {
                return Err(Error::WrongDims {
                    expected: vec![2, 2],
                    got: op.dims().to_vec(),
                });
            }
        }
        Ok(Self { party, ops })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    /// `M_{a|x}`
    pub fn op(&self, a: usize, x: usize) -> &Operator {
        &self.ops[a][x]
    }

    /// `M_x = Σ_a M_{a|x}`, the CJ operator of the coarse-grained channel.
    pub fn channel(&self, x: usize) -> Operator {
        &self.ops[0][x] + &self.ops[1][x]
    }

    pub fn with_party(mut self, party: Party) -> Self {
        self.party = party;
        self
    }

    pub fn map_ops(&self, f: impl Fn(&Operator) -> Operator) -> Self {
        Self {
            party: self.party,
            ops: [
                [f(&self.ops[0][0]), f(&self.ops[0][1])],
                [f(&self.ops[1][0]), f(&self.ops[1][1])],
            ],
        }
    }
}

/// CJ operator of the CP map with the given 2×2 Kraus operators.
pub fn cj_of_kraus(kraus: &[Matrix]) -> Operator {
    if kraus.is_empty() {
        return Operator::zeros(&[2, 2]);
    }
    let choi = random::choi_matrix(kraus);
    Operator::new(choi.transpose(), vec![2, 2]).expect("2x2 Kraus operators")
}

/// Build an instrument from Kraus operators `kraus[a][x]`, checking
/// `Σ_{a,k} K†K = I` for each input.
pub fn cj_from_kraus(party: Party, kraus: &[[Vec<Matrix>; 2]; 2]) -> Result<Instrument> {
    for x in 0..2 {
        let mut sum = Matrix::zeros(2, 2);
        for branch in kraus.iter() {
            for k in &branch[x] {
                if k.shape() != (2, 2) {
                    return Err(Error::WrongDims {
                        expected: vec![2, 2],
                        got: vec![k.nrows(), k.ncols()],
                    });
                }
                sum += k.adjoint() * k;
            }
        }
        let deviation = (sum - Matrix::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > TOL {
            return Err(Error::IncompleteKraus { x, deviation });
        }
    }
    let ops = [
        [cj_of_kraus(&kraus[0][0]), cj_of_kraus(&kraus[0][1])],
        [cj_of_kraus(&kraus[1][0]), cj_of_kraus(&kraus[1][1])],
    ];
    Instrument::new(party, ops)
}

#[derive(Clone, Debug, Serialize)]
pub struct InputCheck {
    pub x: usize,
    pub min_eigenvalues: [f64; 2],
    /// max-abs deviation of `Tr_O[Σ_a M_{a|x}]` from the identity
    pub trace_deviation: f64,
    pub positive: bool,
    pub trace_preserving: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstrumentReport {
    pub party: Party,
    pub inputs: [InputCheck; 2],
}

impl InstrumentReport {
    pub fn passed(&self) -> bool {
        self.inputs.iter().all(|c| c.positive && c.trace_preserving)
    }
}

impl std::fmt::Display for InstrumentReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.inputs {
            writeln!(
                f,
                "x={}  min eig (a=0) {:.9}  (a=1) {:.9}  trace deviation {:.3e}  {}",
                c.x,
                c.min_eigenvalues[0],
                c.min_eigenvalues[1],
                c.trace_deviation,
                if c.positive && c.trace_preserving { "ok" } else { "FAIL" }
            )?;
        }
        write!(f, "overall {}", if self.passed() { "valid" } else { "INVALID" })
    }
}

pub fn validate_instrument(inst: &Instrument) -> InstrumentReport {
    let check = |x: usize| {
        let min_eigenvalues = [0, 1].map(|a| {
            let op = inst.op(a, x);
            let herm = (op + &op.dagger()).scale(0.5);
            let min = herm.min_eigenvalue().expect("Hermitian part");
            // a non-Hermitian operator cannot be positive
            if op.hermiticity_deviation() > TOL {
                f64::NEG_INFINITY
            } else {
                min
            }
        });
        let reduced = inst.channel(x).partial_trace(&[0]).expect("two subsystems");
        let trace_deviation = reduced.max_abs_diff(&qubit::id());
        InputCheck {
            x,
            min_eigenvalues,
            trace_deviation,
            positive: min_eigenvalues.iter().all(|&m| m >= -TOL),
            trace_preserving: trace_deviation <= TOL,
        }
    };
    InstrumentReport {
        party: inst.party,
        inputs: [check(0), check(1)],
    }
}

/// Operations paired with the α-family: on input 0 always output 1 through
/// the identity channel; on input 1 measure σ_z, output the result and
/// prepare |0⟩. Identical for both parties.
pub fn alpha_family_instruments() -> (Instrument, Instrument) {
    let ops = [
        [Operator::zeros(&[2, 2]), qubit::proj(0).kron(&qubit::proj(0))],
        [qubit::phi_plus(), qubit::proj(1).kron(&qubit::proj(0))],
    ];
    let a = Instrument::new(Party::A, ops).expect("2x2 operators");
    let b = a.clone().with_party(Party::B);
    (a, b)
}

/// `σ_z I ± σ_x I ± σ_z σ_x ± σ_x σ_x`
fn signed_combo(s1: f64, s2: f64, s3: f64) -> Operator {
    operator_from_terms(&[("ZI", 1.0), ("XI", s1), ("ZX", s2), ("XX", s3)]).expect("static strings")
}

/// `(1/4)(I + outer·combo/√2 + tail·Iσ_x)`
fn bob_saturating_op(outer: f64, signs: (f64, f64, f64), tail: f64) -> Operator {
    let combo = signed_combo(signs.0, signs.1, signs.2).scale(outer * FRAC_1_SQRT_2);
    let tail = operator_from_terms(&[("IX", tail)]).expect("static string");
    (&(&Operator::identity(&[2, 2]) + &combo) + &tail).scale(0.25)
}

/// Operations reaching `p_succ − p₂ = 1/2` on the α-family at α = 1/√2
/// (`p_succ = 1/2`, `p₂ = 0`).
///
/// Alice: `(1/4)(I ± σ_z I ± I σ_z ± σ_z σ_z)`. Bob: rank-one projectors
/// `(1/4)(I ± (1/√2)(σ_z I ± σ_x I ± σ_z σ_x ± σ_x σ_x) ± I σ_x)`.
/// For `M_{1|0}` the sign pattern is `−(+,−,−)` with `−Iσ_x`; this is the
/// only assignment within three sign flips of the commonly quoted form that
/// keeps `Tr_O[M_{0|0} + M_{1|0}] = I`.
pub fn saturating_instruments() -> (Instrument, Instrument) {
    let alice = |s1: f64, s2: f64, s3: f64| {
        operator_from_terms(&[("II", 0.25), ("ZI", s1 / 4.0), ("IZ", s2 / 4.0), ("ZZ", s3 / 4.0)])
            .expect("static strings")
    };
    let a = Instrument::new(
        Party::A,
        [
            [alice(1.0, 1.0, 1.0), alice(1.0, -1.0, -1.0)],
            [alice(-1.0, -1.0, 1.0), alice(-1.0, 1.0, -1.0)],
        ],
    )
    .expect("2x2 operators");
    let b = Instrument::new(
        Party::B,
        [
            [
                bob_saturating_op(1.0, (1.0, 1.0, 1.0), 1.0),
                bob_saturating_op(1.0, (1.0, -1.0, -1.0), -1.0),
            ],
            [
                bob_saturating_op(-1.0, (1.0, -1.0, -1.0), -1.0),
                bob_saturating_op(-1.0, (1.0, 1.0, 1.0), 1.0),
            ],
        ],
    )
    .expect("2x2 operators");
    (a, b)
}

/// Classical strategy: measure the input wire in the computational basis
/// (result `m`), output `table[x][m]`, and send `|x⟩` on the output wire.
/// The 16 tables cover every deterministic guess that may depend on both the
/// local input and the received bit.
pub fn classical_instrument(party: Party, table: [[usize; 2]; 2]) -> Instrument {
    let op = |a: usize, x: usize| {
        (0..2)
            .filter(|&m| table[x][m] == a)
            .map(|m| qubit::proj(m).kron(&qubit::proj(x)))
            .fold(Operator::zeros(&[2, 2]), |acc, t| &acc + &t)
    };
    Instrument::new(party, [[op(0, 0), op(0, 1)], [op(1, 0), op(1, 1)]]).expect("2x2 operators")
}

/// All 16 tables for [`classical_instrument`].
pub fn classical_tables() -> impl Iterator<Item = [[usize; 2]; 2]> {
    (0..16usize).map(|k| [[k >> 3 & 1, k >> 2 & 1], [k >> 1 & 1, k & 1]])
}

/// Bloch data of one branch: `M = (q/2)(I + r·σ⊗I + I⊗s·σ + Σ t_ij σ_i⊗σ_j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchParams {
    pub q: f64,
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BranchParams {
    pub fn to_operator(&self) -> Operator {
        let mut terms: Vec<(String, f64)> = vec![("II".into(), self.q / 2.0)];
        for (i, p) in Pauli::XYZ.iter().enumerate() {
            terms.push((format!("{}I", p.as_char()), self.q / 2.0 * self.r[i]));
            terms.push((format!("I{}", p.as_char()), self.q / 2.0 * self.s[i]));
            for (j, p2) in Pauli::XYZ.iter().enumerate() {
                terms.push((format!("{}{}", p.as_char(), p2.as_char()), self.q / 2.0 * self.t[i][j]));
            }
        }
        let terms: Vec<(&str, f64)> = terms.iter().map(|(s, c)| (s.as_str(), *c)).collect();
        operator_from_terms(&terms).expect("two-qubit strings")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PauliParams {
    /// `q_{a|x}` for every branch, `q[a][x]`
    pub q: [[f64; 2]; 2],
    /// `None` where `q_{a|x} = 0`: no Bloch data exists for that branch
    pub branches: [[Option<BranchParams>; 2]; 2],
    /// `|Σ_a q_{a|x} r_{a|x}|` per input; zero for a valid instrument
    pub balance_deviation: [f64; 2],
}

fn pauli_coeff(op: &Operator, s: &str) -> f64 {
    let ps: PauliString = s.parse().expect("static string");
    ps.trace_with(op).re
}

pub fn pauli_params(inst: &Instrument) -> PauliParams {
    let mut q = [[0.0; 2]; 2];
    let mut branches: [[Option<BranchParams>; 2]; 2] = Default::default();
    let mut balance = [[0.0f64; 3]; 2];
    for a in 0..2 {
        for x in 0..2 {
            let m = inst.op(a, x);
            let qa = m.trace().re / 2.0;
            q[a][x] = qa;
            // q r_i = Tr[M σ_i⊗I] / 2, so the balance needs no division
            for (i, p) in Pauli::XYZ.iter().enumerate() {
                balance[x][i] += pauli_coeff(m, &format!("{}I", p.as_char())) / 2.0;
            }
            if qa.abs() <= TOL {
                continue;
            }
            let scale = 1.0 / (2.0 * qa);
            let mut r = [0.0; 3];
            let mut s = [0.0; 3];
            let mut t = [[0.0; 3]; 3];
            for (i, p) in Pauli::XYZ.iter().enumerate() {
                r[i] = pauli_coeff(m, &format!("{}I", p.as_char())) * scale;
                s[i] = pauli_coeff(m, &format!("I{}", p.as_char())) * scale;
                for (j, p2) in Pauli::XYZ.iter().enumerate() {
                    t[i][j] = pauli_coeff(m, &format!("{}{}", p.as_char(), p2.as_char())) * scale;
                }
            }
            branches[a][x] = Some(BranchParams { q: qa, r, s, t });
        }
    }
    let norm = |v: [f64; 3]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
    PauliParams {
        q,
        branches,
        balance_deviation: [norm(balance[0]), norm(balance[1])],
    }
}

/// Sampling families for random instruments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    /// Rank-one projective measurement along a uniform Bloch direction, then
    /// preparation of a Haar-random pure state per outcome; outcome labels
    /// swapped with probability 1/2.
    ProjectiveReprepare,
    /// Projective measurement with Lüders update, followed by a Haar-random
    /// unitary conditioned on the outcome.
    UnitaryConditioned,
    /// Two-outcome POVM `E_0 = ((1+β)I + η n·σ)/2`, `|β| + η ≤ 1`, with
    /// Lüders update and an outcome-conditioned Haar unitary. Small η gives
    /// nearly coherent channels that the other two kinds never produce.
    Unsharp,
}

impl SampleKind {
    pub const ALL: [SampleKind; 3] = [
        SampleKind::ProjectiveReprepare,
        SampleKind::UnitaryConditioned,
        SampleKind::Unsharp,
    ];
}

/// Per-input parameters: POVM `E_0 = ((1+bias)I + sharpness·n·σ)/2`, Kraus
/// `K_a = U_a √E_a` with `U_a` given as SU(2) quaternions, and an optional
/// swap of the outcome labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputParams {
    pub direction: [f64; 3],
    pub bias: f64,
    pub sharpness: f64,
    pub unitaries: [[f64; 4]; 2],
    pub relabel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstrumentParams {
    pub kind: SampleKind,
    pub inputs: [InputParams; 2],
}

fn normalize<const N: usize>(v: [f64; N]) -> [f64; N] {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if n < 1e-12 {
        let mut e = [0.0; N];
        e[N - 1] = 1.0;
        return e;
    }
    v.map(|c| c / n)
}

/// SU(2) element `w I − i(x σ_x + y σ_y + z σ_z)`.
fn su2(q: [f64; 4]) -> Matrix {
    let [w, x, y, z] = normalize(q);
    Matrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(w, -z),
            Complex64::new(-y, -x),
            Complex64::new(y, -x),
            Complex64::new(w, z),
        ],
    )
}

/// Principal square root of `(c I + v·σ)` for `c ≥ |v|`.
fn sqrt_bloch(c: f64, v: [f64; 3]) -> Matrix {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (lp, lm) = ((c + len).max(0.0).sqrt(), (c - len).max(0.0).sqrt());
    let half_sum = (lp + lm) / 2.0;
    let half_diff = if len > 1e-15 { (lp - lm) / 2.0 / len } else { 0.0 };
    let [x, y, z] = v.map(|t| t * half_diff);
    Matrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(half_sum + z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(half_sum - z, 0.0),
        ],
    )
}

impl InputParams {
    fn kraus(&self) -> [Matrix; 2] {
        let n = normalize(self.direction);
        let eta = self.sharpness.clamp(0.0, 1.0);
        let beta = self.bias.clamp(-(1.0 - eta), 1.0 - eta);
        let e0 = sqrt_bloch((1.0 + beta) / 2.0, n.map(|c| c * eta / 2.0));
        let e1 = sqrt_bloch((1.0 - beta) / 2.0, n.map(|c| -c * eta / 2.0));
        let k0 = su2(self.unitaries[0]) * e0;
        let k1 = su2(self.unitaries[1]) * e1;
        if self.relabel {
            [k1, k0]
        } else {
            [k0, k1]
        }
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R, kind: SampleKind) -> Self {
        let direction = random::unit_vector(rng);
        let (bias, sharpness) = match kind {
            SampleKind::ProjectiveReprepare | SampleKind::UnitaryConditioned => (0.0, 1.0),
            SampleKind::Unsharp => {
                let eta: f64 = rng.random_range(0.0..=1.0);
                let slack = 1.0 - eta;
                (rng.random_range(-slack..=slack), eta)
            }
        };
        let unitaries = match kind {
            // a Haar-random post-measurement state: rotate |n_a⟩ to it
            SampleKind::ProjectiveReprepare => {
                let n = direction;
                let mut us = [[0.0; 4]; 2];
                for (a, u) in us.iter_mut().enumerate() {
                    let sign = if a == 0 { 1.0 } else { -1.0 };
                    let target = random::unit_vector(rng);
                    *u = rotation_between(n.map(|c| c * sign), target);
                }
                us
            }
            _ => [random::unit_quaternion(rng), random::unit_quaternion(rng)],
        };
        let relabel = matches!(kind, SampleKind::ProjectiveReprepare) && rng.random_bool(0.5);
        Self {
            direction,
            bias,
            sharpness,
            unitaries,
            relabel,
        }
    }
}

/// Quaternion of a rotation taking Bloch vector `from` to `to`.
fn rotation_between(from: [f64; 3], to: [f64; 3]) -> [f64; 4] {
    let dot: f64 = from.iter().zip(&to).map(|(a, b)| a * b).sum();
    let cross = [
        from[1] * to[2] - from[2] * to[1],
        from[2] * to[0] - from[0] * to[2],
        from[0] * to[1] - from[1] * to[0],
    ];
    let cn = cross.iter().map(|c| c * c).sum::<f64>().sqrt();
    let angle = cn.atan2(dot);
    let axis = if cn > 1e-12 {
        cross.map(|c| c / cn)
    } else {
        // antiparallel or parallel: any perpendicular axis
        let trial = if from[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let c = [
            from[1] * trial[2] - from[2] * trial[1],
            from[2] * trial[0] - from[0] * trial[2],
            from[0] * trial[1] - from[1] * trial[0],
        ];
        normalize(c)
    };
    let (s, c) = (angle / 2.0).sin_cos();
    [c, axis[0] * s, axis[1] * s, axis[2] * s]
}

impl InstrumentParams {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, kind: SampleKind) -> Self {
        Self {
            kind,
            inputs: [InputParams::sample(rng, kind), InputParams::sample(rng, kind)],
        }
    }

    pub fn build(&self, party: Party) -> Instrument {
        let [k00, k10] = self.inputs[0].kraus();
        let [k01, k11] = self.inputs[1].kraus();
        let ops = [
            [cj_of_kraus(&[k00]), cj_of_kraus(&[k01])],
            [cj_of_kraus(&[k10]), cj_of_kraus(&[k11])],
        ];
        Instrument::new(party, ops).expect("2x2 CJ operators")
    }

    /// Gaussian move in parameter space, staying inside the kind's family.
    pub fn perturb<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Self {
        let mut next = self.clone();
        for input in next.inputs.iter_mut() {
            let mut jitter = |v: &mut f64| *v += scale * rng.sample::<f64, _>(StandardNormal);
            input.direction.iter_mut().for_each(&mut jitter);
            input.unitaries.iter_mut().flatten().for_each(&mut jitter);
            if self.kind == SampleKind::Unsharp {
                jitter(&mut input.sharpness);
                jitter(&mut input.bias);
                input.sharpness = input.sharpness.clamp(0.0, 1.0);
                let slack = 1.0 - input.sharpness;
                input.bias = input.bias.clamp(-slack, slack);
            }
            input.direction = normalize(input.direction);
            input.unitaries = input.unitaries.map(normalize);
        }
        next
    }
}

/// Deterministic random instrument for the given seed.
pub fn random_instrument(party: Party, seed: u64, kind: SampleKind) -> Instrument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    InstrumentParams::sample(&mut rng, kind).build(party)
}

/// `|ψ⟩⟨ψ|` measure-and-prepare CJ operator: outcome projector on the input
/// (transposed) times the prepared state on the output.
pub fn measure_prepare(effect: &Operator, prepared: &Operator) -> Operator {
    kron_all([&effect.transpose(), prepared])
}
